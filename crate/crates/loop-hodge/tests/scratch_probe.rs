use loop_hodge::laurent::LaurentMatrix;
use loop_hodge::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn probe() {
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let x = sample::random_laurent(&mut r, 2, -2, 3, 1.0);
    let json = serde_json::to_string(&x).unwrap();
    let back: LaurentMatrix = serde_json::from_str(&json).unwrap();
    println!("distance = {:e}", back.distance(&x));
    println!("windows: {:?} vs {:?}", back.window(), x.window());
    println!("json head: {}", &json[..300.min(json.len())]);
}
