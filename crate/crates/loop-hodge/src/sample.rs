//! Seeded sampling of matrices and loops for fuzz sweeps and tests.
//!
//! Every generator takes the RNG explicitly so that sweeps are
//! reproducible per seed.

use crate::laurent::{exp_loop, LaurentMatrix};
use crate::mat::{self, CMat, CVec};
use num_complex::Complex64;
use rand::Rng;

pub fn random_complex(rng: &mut impl Rng, scale: f64) -> Complex64 {
    Complex64::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

pub fn random_unit_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, scale: f64) -> CMat {
    CMat::from_fn(n, n, |_, _| random_complex(rng, scale))
}

pub fn random_vector(rng: &mut impl Rng, n: usize, scale: f64) -> CVec {
    CVec::from_fn(n, |_, _| random_complex(rng, scale))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> CMat {
    let a = random_matrix(rng, n, scale);
    mat::hermitian_part(&a)
}

pub fn random_anti_hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> CMat {
    let a = random_matrix(rng, n, scale);
    mat::anti_hermitian_part(&a)
}

/// Hermitian positive-definite with eigenvalues bounded away from zero.
pub fn random_positive_definite(rng: &mut impl Rng, n: usize, scale: f64) -> CMat {
    let a = random_matrix(rng, n, scale);
    &a * a.adjoint() + mat::cident(n).scale(0.5)
}

pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMat {
    let k = random_anti_hermitian(rng, n, 1.0);
    mat::expm(&k)
}

pub fn random_laurent(rng: &mut impl Rng, n: usize, lo: i64, hi: i64, scale: f64) -> LaurentMatrix {
    let coeffs = (lo..=hi).map(|_| random_matrix(rng, n, scale)).collect();
    LaurentMatrix::from_coeffs(lo, coeffs)
}

/// Element of Λ_σ𝔤 on window [−k, k]: a₋ₙ = (−1)^{n+1} aₙ*, a₀ anti-Hermitian.
pub fn random_sigma_algebra(rng: &mut impl Rng, n: usize, neg_lo: i64, scale: f64) -> LaurentMatrix {
    let k = neg_lo.abs();
    let mut coeffs = vec![mat::czero(n); (2 * k + 1) as usize];
    coeffs[k as usize] = random_anti_hermitian(rng, n, scale);
    for m in 1..=k {
        let a = random_matrix(rng, n, scale);
        let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
        coeffs[(k - m) as usize] = a.adjoint().scale(sign);
        coeffs[(k + m) as usize] = a;
    }
    LaurentMatrix::from_coeffs(-k, coeffs)
}

/// Λ⁰_σ𝔤: as above with vanishing degree-0 coefficient.
pub fn random_sigma_zero_mean(rng: &mut impl Rng, n: usize, k: i64, scale: f64) -> LaurentMatrix {
    let mut coeffs = vec![mat::czero(n); (2 * k + 1) as usize];
    for m in 1..=k {
        let a = random_matrix(rng, n, scale);
        let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
        coeffs[(k - m) as usize] = a.adjoint().scale(sign);
        coeffs[(k + m) as usize] = a;
    }
    LaurentMatrix::from_coeffs(-k, coeffs)
}

/// Horizontal σ-direction: degrees ±1 only, a₋₁ = a₁*.
pub fn random_horizontal_sigma(rng: &mut impl Rng, n: usize, scale: f64) -> LaurentMatrix {
    let a = random_matrix(rng, n, scale);
    LaurentMatrix::from_coeffs(-1, vec![a.adjoint(), mat::czero(n), a])
}

/// Loop with values in 𝔨 = 𝔲(n) pointwise: a₋ₙ = −aₙ*, a₀ anti-Hermitian.
pub fn random_lambda_k(rng: &mut impl Rng, n: usize, k: i64, scale: f64) -> LaurentMatrix {
    let mut coeffs = vec![mat::czero(n); (2 * k + 1) as usize];
    coeffs[k as usize] = random_anti_hermitian(rng, n, scale);
    for m in 1..=k {
        let a = random_matrix(rng, n, scale);
        coeffs[(k - m) as usize] = a.adjoint().scale(-1.0);
        coeffs[(k + m) as usize] = a;
    }
    LaurentMatrix::from_coeffs(-k, coeffs)
}

/// Element of Λ_σG: exponential of a window-[−1,1] σ-algebra element,
/// resolved on a wide window and trimmed. Keep `scale` at 0.3 or below so
/// the trimmed tail stays under 1e−12.
pub fn random_sigma_group(rng: &mut impl Rng, n: usize, scale: f64) -> LaurentMatrix {
    let x = random_sigma_algebra(rng, n, -1, scale);
    exp_loop(&x, 16, 1e-10)
        .expect("sigma exponential within window")
        .trimmed(1e-12)
}

/// Invertible loop that is generically not σ̂-fixed.
pub fn random_invertible_loop(rng: &mut impl Rng, n: usize, scale: f64) -> LaurentMatrix {
    let x = random_laurent(rng, n, -1, 1, scale);
    exp_loop(&x, 16, 1e-10)
        .expect("exponential within window")
        .trimmed(1e-12)
}
