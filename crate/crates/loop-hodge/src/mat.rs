//! Small helpers over `nalgebra` complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn czero(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn cident(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Frobenius norm, sqrt(Tr(A A*)).
pub fn frob(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frob_vec(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Max |entry| of the difference.
pub fn max_entry_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

pub fn anti_hermitian_part(a: &CMat) -> CMat {
    (a - a.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let sym = nalgebra::SymmetricEigen::new(a.clone());
    let mut ev: Vec<f64> = sym.eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Principal square root of a Hermitian positive-definite matrix.
pub fn hermitian_sqrt(a: &CMat) -> Option<CMat> {
    let sym = nalgebra::SymmetricEigen::new(a.clone());
    if sym.eigenvalues.iter().any(|&l| l <= 0.0) {
        return None;
    }
    let d = CMat::from_diagonal(&sym.eigenvalues.map(|l| Complex64::new(l.sqrt(), 0.0)));
    Some(&sym.eigenvectors * d * sym.eigenvectors.adjoint())
}

/// Polar decomposition `a = h u` with `h` Hermitian positive-definite and
/// `u` unitary. Fails when `a` is singular.
pub fn polar(a: &CMat) -> Option<(CMat, CMat)> {
    let h = hermitian_sqrt(&(a * a.adjoint()))?;
    let h_inv = h.clone().try_inverse()?;
    let u = h_inv * a;
    Some((h, u))
}

/// Singular values, descending.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let svd = a.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Rank with an absolute singular-value threshold.
pub fn rank(a: &CMat, threshold: f64) -> usize {
    singular_values(a).iter().filter(|&&s| s > threshold).count()
}

/// Orthonormal basis of the nullspace (right singular vectors below threshold).
pub fn nullspace(a: &CMat, threshold: f64) -> Vec<CVec> {
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let mut out = Vec::new();
    for (i, row) in vt.row_iter().enumerate() {
        let s = if i < svd.singular_values.len() {
            svd.singular_values[i]
        } else {
            0.0
        };
        if s <= threshold {
            out.push(row.adjoint());
        }
    }
    out
}

pub fn solve(a: &CMat, b: &CVec) -> Option<CVec> {
    a.clone().lu().solve(b)
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = frob(a);
    let k = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(1.0 / 2f64.powi(k as i32));
    let mut sum = cident(n);
    let mut term = cident(n);
    for m in 1..=30 {
        term = (&term * &scaled).scale(1.0 / m as f64);
        sum += &term;
        if frob(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..k {
        sum = &sum * &sum;
    }
    sum
}
