//! Matrix-valued finite Laurent series in the loop parameter λ.
//!
//! `LaurentMatrix` is the computational carrier for loop-algebra and
//! loop-group elements: a square complex matrix per degree on a finite
//! window `[lo, hi]`, all other coefficients implicitly zero. The twisted
//! involution σ̂, the Λ_σ + Λ⁺ splitting, Sobolev norms, the complex
//! structure J on zero-mean σ-loops and the horizontal band live here.
//!
//! Pointwise operations (group inverse, group involution, exponentials)
//! are validated on alias-free evaluation grids: a power-of-two grid of at
//! least four times the window span is exact for the polynomial-degree
//! data handled here.

use crate::error::{Error, Result};
use crate::mat::{self, CMat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default absolute tolerance on coefficients for equality and membership.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Minimum pointwise |det| for loop-group inversion.
pub const DET_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LaurentMatrix {
    n: usize,
    lo: i64,
    coeffs: Vec<CMat>,
}

/// Which involution to apply: σ(X) = −X* on the algebra,
/// σ(A) = (A*)⁻¹ on the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvolutionKind {
    Algebra,
    Group,
}

/// Membership classes checked by [`membership`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopClass {
    /// σ̂-fixed at the algebra level: σ(aₙ) = (−1)ⁿ a₋ₙ.
    SigmaAlgebra,
    /// σ̂-fixed at the group level: γ(−λ)* γ(λ) = I pointwise.
    SigmaGroup,
    /// Only nonnegative degrees.
    Plus,
    /// Only degrees −1 and +1.
    Horizontal,
    /// Degree-0 only, unitary coefficient.
    ConstantUnitary,
}

#[derive(Debug, Clone, Copy)]
pub struct MembershipCheck {
    pub residual: f64,
    pub pass: bool,
}

impl LaurentMatrix {
    pub fn from_coeffs(lo: i64, coeffs: Vec<CMat>) -> Self {
        assert!(!coeffs.is_empty(), "coefficient list must be non-empty");
        let n = coeffs[0].nrows();
        for c in &coeffs {
            assert_eq!(c.nrows(), n);
            assert_eq!(c.ncols(), n);
        }
        let mut out = Self { n, lo, coeffs };
        out.normalize();
        out
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            lo: 0,
            coeffs: vec![mat::czero(n)],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            lo: 0,
            coeffs: vec![mat::cident(n)],
        }
    }

    pub fn constant(m: CMat) -> Self {
        Self::from_coeffs(0, vec![m])
    }

    /// The single term `m · λ^deg`.
    pub fn monomial(deg: i64, m: CMat) -> Self {
        Self::from_coeffs(deg, vec![m])
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi())
    }

    /// Coefficient at a degree, zero outside the window.
    pub fn coeff(&self, deg: i64) -> CMat {
        if deg < self.lo || deg > self.hi() {
            mat::czero(self.n)
        } else {
            self.coeffs[(deg - self.lo) as usize].clone()
        }
    }

    pub fn coeff_ref(&self, deg: i64) -> Option<&CMat> {
        if deg < self.lo || deg > self.hi() {
            None
        } else {
            Some(&self.coeffs[(deg - self.lo) as usize])
        }
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi()
    }

    /// Drop exactly-zero boundary coefficients; the zero element collapses
    /// to window (0, 0).
    fn normalize(&mut self) {
        let is_zero = |m: &CMat| m.iter().all(|z| z.re == 0.0 && z.im == 0.0);
        while self.coeffs.len() > 1 && is_zero(self.coeffs.last().unwrap()) {
            self.coeffs.pop();
        }
        while self.coeffs.len() > 1 && is_zero(&self.coeffs[0]) {
            self.coeffs.remove(0);
            self.lo += 1;
        }
        if self.coeffs.len() == 1 && is_zero(&self.coeffs[0]) {
            self.lo = 0;
        }
    }

    /// Drop boundary coefficients below `tol` in Frobenius norm.
    pub fn trimmed(&self, tol: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        let mut lo = self.lo;
        while coeffs.len() > 1 && mat::frob(coeffs.last().unwrap()) <= tol {
            coeffs.pop();
        }
        while coeffs.len() > 1 && mat::frob(&coeffs[0]) <= tol {
            coeffs.remove(0);
            lo += 1;
        }
        if coeffs.len() == 1 && mat::frob(&coeffs[0]) <= tol {
            return Self::zero(self.n);
        }
        Self { n: self.n, lo, coeffs }
    }

    /// Restrict to degrees in `[lo, hi]`, returning the result and the
    /// largest coefficient norm that was dropped.
    pub fn truncated(&self, lo: i64, hi: i64) -> (Self, f64) {
        let mut dropped = 0.0f64;
        let mut coeffs = Vec::new();
        for d in lo..=hi {
            coeffs.push(self.coeff(d));
        }
        for d in self.degrees() {
            if d < lo || d > hi {
                dropped = dropped.max(mat::frob(&self.coeffs[(d - self.lo) as usize]));
            }
        }
        (Self::from_coeffs(lo, coeffs), dropped)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs
            .iter()
            .all(|m| m.iter().all(|z| z.re == 0.0 && z.im == 0.0))
    }

    /// Largest coefficient Frobenius norm.
    pub fn sup_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(mat::frob).fold(0.0, f64::max)
    }

    /// Largest coefficient norm over degrees where `pred` holds.
    pub fn sup_coeff_norm_where(&self, pred: impl Fn(i64) -> bool) -> f64 {
        self.degrees()
            .filter(|&d| pred(d))
            .map(|d| mat::frob(&self.coeffs[(d - self.lo) as usize]))
            .fold(0.0, f64::max)
    }

    /// Per-degree coefficient norms as (degree, norm) pairs.
    pub fn coeff_norms(&self) -> Vec<(i64, f64)> {
        self.degrees()
            .map(|d| (d, mat::frob(&self.coeffs[(d - self.lo) as usize])))
            .collect()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_coeffs(self.lo, self.coeffs.iter().map(|m| m * s).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let coeffs = (lo..=hi).map(|d| self.coeff(d) + other.coeff(d)).collect();
        Ok(Self::from_coeffs(lo, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Multiply every degree by λ^k.
    pub fn shifted(&self, k: i64) -> Self {
        Self {
            n: self.n,
            lo: self.lo + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Pointwise adjoint X(λ)*: the coefficient at degree k is a₋ₖ*.
    pub fn adjoint_pointwise(&self) -> Self {
        let lo = -self.hi();
        let hi = -self.lo;
        let coeffs = (lo..=hi).map(|d| self.coeff(-d).adjoint()).collect();
        Self::from_coeffs(lo, coeffs)
    }

    /// Evaluate at a point of the circle (or anywhere in ℂ*).
    pub fn eval(&self, lambda: Complex64) -> CMat {
        let mut acc = mat::czero(self.n);
        let mut pow = lambda.powi(self.lo as i32);
        for c in &self.coeffs {
            acc += c * pow;
            pow *= lambda;
        }
        acc
    }

    /// Evaluations at the G-th roots of unity.
    pub fn eval_grid(&self, g: usize) -> Vec<CMat> {
        (0..g)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / g as f64;
                self.eval(Complex64::from_polar(1.0, th))
            })
            .collect()
    }

    /// Inverse discrete Fourier transform of grid samples onto `[lo, hi]`.
    /// Exact when the sampled function is a Laurent polynomial with
    /// degrees inside an alias-free band for the grid.
    pub fn from_grid(samples: &[CMat], lo: i64, hi: i64) -> Self {
        let g = samples.len();
        let n = samples[0].nrows();
        let mut coeffs = Vec::new();
        for k in lo..=hi {
            let mut acc = mat::czero(n);
            for (j, s) in samples.iter().enumerate() {
                let th = -2.0 * PI * (j as f64) * (k as f64) / g as f64;
                acc += s * Complex64::from_polar(1.0, th);
            }
            coeffs.push(acc.scale(1.0 / g as f64));
        }
        Self::from_coeffs(lo, coeffs)
    }

    /// Coefficientwise comparison over the union window.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// Max entrywise distance over the union window.
    pub fn distance(&self, other: &Self) -> f64 {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        (lo..=hi)
            .map(|d| mat::max_entry_diff(&self.coeff(d), &other.coeff(d)))
            .fold(0.0, f64::max)
    }
}

/// Power-of-two evaluation grid that is alias-free for data of the given
/// degree span.
pub fn grid_size_for_span(span: i64) -> usize {
    let mut g = 8usize;
    let need = (4 * span.max(1)) as usize;
    while g < need {
        g *= 2;
    }
    g
}

/// Cauchy product of Laurent loops.
pub fn laurent_mul(a: &LaurentMatrix, b: &LaurentMatrix) -> Result<LaurentMatrix> {
    if a.n != b.n {
        return Err(Error::SizeMismatch(a.n, b.n));
    }
    let lo = a.lo + b.lo;
    let hi = a.hi() + b.hi();
    let mut coeffs: Vec<CMat> = (lo..=hi).map(|_| mat::czero(a.n)).collect();
    for i in a.degrees() {
        let ai = &a.coeffs[(i - a.lo) as usize];
        for j in b.degrees() {
            let bj = &b.coeffs[(j - b.lo) as usize];
            coeffs[(i + j - lo) as usize] += ai * bj;
        }
    }
    Ok(LaurentMatrix::from_coeffs(lo, coeffs))
}

/// Commutator [a, b] = ab − ba.
pub fn bracket(a: &LaurentMatrix, b: &LaurentMatrix) -> Result<LaurentMatrix> {
    laurent_mul(a, b)?.sub(&laurent_mul(b, a)?)
}

/// The twisted involution σ̂: γ(λ) ↦ σ(γ(−λ)).
///
/// On the algebra the coefficient formula σ̂(ξ)ₙ = (−1)ⁿ σ(a₋ₙ) is exact;
/// on the group the result is computed pointwise on an alias-free grid and
/// truncated to the mirrored window.
pub fn twisted_involution(x: &LaurentMatrix, kind: InvolutionKind) -> Result<LaurentMatrix> {
    match kind {
        InvolutionKind::Algebra => Ok(twisted_involution_algebra(x)),
        InvolutionKind::Group => {
            let span = x.hi() - x.lo;
            let w = x.lo.abs().max(x.hi().abs()).max(span);
            twisted_involution_group(x, w)
        }
    }
}

pub fn twisted_involution_algebra(x: &LaurentMatrix) -> LaurentMatrix {
    let lo = -x.hi();
    let hi = -x.lo;
    let coeffs = (lo..=hi)
        .map(|d| {
            let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            // (−1)^d σ(a_{−d}) with σ(X) = −X*
            x.coeff(-d).adjoint().scale(-sign)
        })
        .collect();
    LaurentMatrix::from_coeffs(lo, coeffs)
}

/// Group-level σ̂(γ)(λ) = (γ(−λ)*)⁻¹, sampled on a grid and truncated to
/// `[−window, window]`.
pub fn twisted_involution_group(x: &LaurentMatrix, window: i64) -> Result<LaurentMatrix> {
    let span = (x.hi() - x.lo).max(2 * window);
    let g = grid_size_for_span(span);
    let mut samples = Vec::with_capacity(g);
    let mut min_det = f64::INFINITY;
    for j in 0..g {
        let th = 2.0 * PI * j as f64 / g as f64;
        let lam = Complex64::from_polar(1.0, th);
        let m = x.eval(-lam).adjoint();
        let det = m.determinant().norm();
        min_det = min_det.min(det);
        if det < DET_THRESHOLD {
            return Err(Error::NearSingular(det));
        }
        samples.push(m.try_inverse().ok_or(Error::NearSingular(det))?);
    }
    Ok(LaurentMatrix::from_grid(&samples, -window, window))
}

/// Split γ = γ_σ + γ₊ with γ_σ ∈ Λ_σ𝔤 and γ₊ supported in degrees ≥ 0.
///
/// Degrees ≠ 0 follow the coefficient recipe ãₙ = (−1)ⁿσ(a₋ₙ) for n ≥ 1;
/// the degree-0 coefficient is split canonically: anti-Hermitian part to
/// γ_σ, Hermitian part to γ₊. Exact arithmetic, reconstructs the input.
pub fn decompose_sigma_plus(g: &LaurentMatrix) -> (LaurentMatrix, LaurentMatrix) {
    let n = g.size();
    let lo = g.lo().min(-g.hi()).min(0);
    let hi = g.hi().max(-g.lo()).max(0);
    let mut sigma = Vec::new();
    for d in lo..=hi {
        let c = if d < 0 {
            g.coeff(d)
        } else if d == 0 {
            mat::anti_hermitian_part(&g.coeff(0))
        } else {
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            g.coeff(-d).adjoint().scale(-sign)
        };
        sigma.push(c);
    }
    let sigma = LaurentMatrix::from_coeffs(lo, sigma);
    let mut plus = Vec::new();
    for d in 0..=hi.max(0) {
        let c = if d == 0 {
            mat::hermitian_part(&g.coeff(0))
        } else {
            g.coeff(d) - sigma.coeff(d)
        };
        plus.push(c);
    }
    let plus = if plus.is_empty() {
        LaurentMatrix::zero(n)
    } else {
        LaurentMatrix::from_coeffs(0, plus)
    };
    (sigma, plus)
}

/// H^s norm (Σₙ (1+n²)^s ‖aₙ‖_F²)^{1/2}.
pub fn sobolev_norm(x: &LaurentMatrix, s: f64) -> f64 {
    x.degrees()
        .map(|d| {
            let w = (1.0 + (d as f64) * (d as f64)).powf(s);
            let c = x.coeff_ref(d).expect("degree in window");
            w * mat::frob(c).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// The complex structure J on zero-mean σ-loops: multiplies negative
/// degrees by i and positive degrees by −i. Requires a vanishing degree-0
/// coefficient.
pub fn j_complex_structure(x: &LaurentMatrix) -> Result<LaurentMatrix> {
    if mat::frob(&x.coeff(0)) > DEFAULT_TOL * (1.0 + x.sup_coeff_norm()) {
        return Err(Error::Precondition(
            "j_complex_structure requires zero degree-0 coefficient".into(),
        ));
    }
    let coeffs = x
        .degrees()
        .map(|d| {
            let c = x.coeff(d);
            match d.cmp(&0) {
                std::cmp::Ordering::Less => c * mat::I,
                std::cmp::Ordering::Equal => mat::czero(x.n),
                std::cmp::Ordering::Greater => c * (-mat::I),
            }
        })
        .collect();
    Ok(LaurentMatrix::from_coeffs(x.lo, coeffs))
}

/// Keep only degrees −1 and +1.
pub fn horizontal_project(x: &LaurentMatrix) -> LaurentMatrix {
    let mut coeffs = vec![mat::czero(x.n); 3];
    coeffs[0] = x.coeff(-1);
    coeffs[2] = x.coeff(1);
    LaurentMatrix::from_coeffs(-1, coeffs)
}

/// Truncating product used inside iterative algorithms; records the
/// largest dropped coefficient norm.
fn mul_trunc(
    a: &LaurentMatrix,
    b: &LaurentMatrix,
    window: i64,
    dropped: &mut f64,
) -> Result<LaurentMatrix> {
    let full = laurent_mul(a, b)?;
    let (t, d) = full.truncated((-window).max(full.lo().min(0)), window.min(full.hi().max(0)));
    *dropped = dropped.max(d);
    Ok(t)
}

/// Exponential of a Laurent loop, truncated to `[−window, window]`.
///
/// Scaling-and-squaring over the Laurent arithmetic; agrees with the
/// pointwise matrix exponential of evaluations. Coefficient mass pushed
/// past the window above `tol` is an error, not a silent truncation.
pub fn exp_loop(x: &LaurentMatrix, window: i64, tol: f64) -> Result<LaurentMatrix> {
    let needed = x.lo().abs().max(x.hi().abs());
    if window < needed {
        return Err(Error::WindowTooSmall {
            context: format!("exp_loop window {window} below input degree {needed}"),
            magnitude: f64::INFINITY,
            tol,
        });
    }
    // sup_λ ‖x(λ)‖ ≤ Σ‖aₖ‖
    let norm_bound: f64 = x.coeff_norms().iter().map(|(_, v)| v).sum();
    let k = if norm_bound > 0.5 {
        (norm_bound / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let y = x.scale(Complex64::new(1.0 / 2f64.powi(k as i32), 0.0));
    let mut dropped = 0.0f64;
    let mut sum = LaurentMatrix::identity(x.n);
    let mut term = LaurentMatrix::identity(x.n);
    for m in 1..=40 {
        term = mul_trunc(&term, &y, window, &mut dropped)?
            .scale(Complex64::new(1.0 / m as f64, 0.0));
        sum = sum.add(&term)?;
        if term.sup_coeff_norm() < 1e-18 {
            break;
        }
    }
    for _ in 0..k {
        sum = mul_trunc(&sum, &sum, window, &mut dropped)?;
    }
    let edge = sum
        .sup_coeff_norm_where(|d| d.abs() >= window - 1)
        .max(dropped);
    if (dropped > 0.0 || sum.hi() >= window - 1 || sum.lo() <= -(window - 1)) && edge > tol {
        return Err(Error::WindowTooSmall {
            context: format!("exp_loop result not resolved in window {window}"),
            magnitude: edge,
            tol,
        });
    }
    Ok(sum.trimmed(0.0))
}

/// Pointwise inverse of a loop-group element, truncated to
/// `[−window, window]`. The minimum |det| over the grid must clear
/// [`DET_THRESHOLD`]; the product g·g⁻¹ is verified against `tol`.
pub fn group_inverse(g: &LaurentMatrix, window: i64, tol: f64) -> Result<LaurentMatrix> {
    let span = (g.hi() - g.lo()).max(2 * window);
    let grid = grid_size_for_span(span);
    let mut samples = Vec::with_capacity(grid);
    let mut min_det = f64::INFINITY;
    for j in 0..grid {
        let th = 2.0 * PI * j as f64 / grid as f64;
        let m = g.eval(Complex64::from_polar(1.0, th));
        let det = m.determinant().norm();
        min_det = min_det.min(det);
        if det < DET_THRESHOLD {
            return Err(Error::NearSingular(det));
        }
        samples.push(m.try_inverse().ok_or(Error::NearSingular(det))?);
    }
    let inv = LaurentMatrix::from_grid(&samples, -window, window).trimmed(0.0);
    let prod = laurent_mul(g, &inv)?;
    let residual = prod.distance(&LaurentMatrix::identity(g.n));
    if residual > tol {
        return Err(Error::WindowTooSmall {
            context: format!("group_inverse window {window} leaves product residual"),
            magnitude: residual,
            tol,
        });
    }
    Ok(inv)
}

/// Residual of the defining condition of a membership class, and the
/// verdict against `tol`.
pub fn membership(x: &LaurentMatrix, class: LoopClass, tol: f64) -> MembershipCheck {
    let residual = match class {
        LoopClass::SigmaAlgebra => {
            let fixed = twisted_involution_algebra(x);
            x.sub(&fixed).map(|d| d.sup_coeff_norm()).unwrap_or(f64::NAN)
        }
        LoopClass::SigmaGroup => {
            let span = x.hi() - x.lo();
            let g = grid_size_for_span(span);
            let ident = mat::cident(x.n);
            (0..g)
                .map(|j| {
                    let th = 2.0 * PI * j as f64 / g as f64;
                    let lam = Complex64::from_polar(1.0, th);
                    // σ̂(γ) = γ ⟺ γ(−λ)* γ(λ) = I
                    let m = x.eval(-lam).adjoint() * x.eval(lam);
                    mat::frob(&(m - &ident))
                })
                .fold(0.0, f64::max)
        }
        LoopClass::Plus => x.sup_coeff_norm_where(|d| d < 0),
        LoopClass::Horizontal => x.sup_coeff_norm_where(|d| d != -1 && d != 1),
        LoopClass::ConstantUnitary => {
            let off = x.sup_coeff_norm_where(|d| d != 0);
            let a0 = x.coeff(0);
            let unit = mat::frob(&(a0.adjoint() * &a0 - mat::cident(x.n)));
            off.max(unit)
        }
    };
    MembershipCheck {
        residual,
        pass: residual <= tol,
    }
}

#[derive(Serialize, Deserialize)]
struct LaurentJson {
    n: usize,
    lo: i64,
    hi: i64,
    coeffs: Vec<Vec<Vec<[f64; 2]>>>,
}

impl Serialize for LaurentMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|m| {
                (0..self.n)
                    .map(|r| (0..self.n).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        LaurentJson {
            n: self.n,
            lo: self.lo,
            hi: self.hi(),
            coeffs,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LaurentMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = LaurentJson::deserialize(de)?;
        if raw.coeffs.len() as i64 != raw.hi - raw.lo + 1 {
            return Err(serde::de::Error::custom("window does not match coefficients"));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|m| {
                if m.len() != raw.n || m.iter().any(|row| row.len() != raw.n) {
                    return Err(serde::de::Error::custom("coefficient is not n×n"));
                }
                Ok(CMat::from_fn(raw.n, raw.n, |r, c| {
                    Complex64::new(m[r][c][0], m[r][c][1])
                }))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(LaurentMatrix::from_coeffs(raw.lo, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn mul_identity_and_monomials() {
        let mut r = rng();
        let g = sample::random_laurent(&mut r, 3, -4, 4, 1.0);
        let id = LaurentMatrix::identity(3);
        assert!(laurent_mul(&id, &g).unwrap().approx_eq(&g, 0.0));
        let lm = LaurentMatrix::monomial(-1, mat::cident(2));
        let lp = LaurentMatrix::monomial(1, mat::cident(2));
        let prod = laurent_mul(&lm, &lp).unwrap();
        assert!(prod.approx_eq(&LaurentMatrix::identity(2), 0.0));
        assert_eq!(prod.window(), (0, 0));
    }

    #[test]
    fn mul_matches_pointwise_evaluation() {
        let mut r = rng();
        let a = sample::random_laurent(&mut r, 3, -4, 4, 0.8);
        let b = sample::random_laurent(&mut r, 3, -4, 4, 0.8);
        let prod = laurent_mul(&a, &b).unwrap();
        let g = 32;
        let samples: Vec<CMat> = a
            .eval_grid(g)
            .into_iter()
            .zip(b.eval_grid(g))
            .map(|(x, y)| x * y)
            .collect();
        let oracle = LaurentMatrix::from_grid(&samples, -8, 8);
        assert!(prod.distance(&oracle) < 1e-12, "{}", prod.distance(&oracle));
    }

    #[test]
    fn mul_size_mismatch_is_error() {
        let a = LaurentMatrix::identity(2);
        let b = LaurentMatrix::identity(3);
        assert!(matches!(laurent_mul(&a, &b), Err(Error::SizeMismatch(2, 3))));
    }

    #[test]
    fn sigma_fixes_constant_anti_hermitian() {
        let mut r = rng();
        let k0 = sample::random_anti_hermitian(&mut r, 3, 1.0);
        let x = LaurentMatrix::constant(k0);
        let s = twisted_involution(&x, InvolutionKind::Algebra).unwrap();
        assert!(s.approx_eq(&x, 1e-15));
    }

    #[test]
    fn sigma_fixes_odd_hermitian_pair() {
        let mut r = rng();
        let p = sample::random_hermitian(&mut r, 3, 1.0);
        let x = LaurentMatrix::monomial(-1, p.clone())
            .add(&LaurentMatrix::monomial(1, p))
            .unwrap();
        let s = twisted_involution(&x, InvolutionKind::Algebra).unwrap();
        assert!(s.approx_eq(&x, 1e-15));
    }

    #[test]
    fn sigma_coefficient_formula() {
        let mut r = rng();
        let a = sample::random_matrix(&mut r, 3, 1.0);
        let x = LaurentMatrix::monomial(-1, a.clone());
        let s = twisted_involution(&x, InvolutionKind::Algebra).unwrap();
        // σ̂(λ⁻¹A) has single degree +1 coefficient (−1)¹σ(A) = A*
        assert_eq!(s.window(), (1, 1));
        assert!(mat::max_entry_diff(&s.coeff(1), &a.adjoint()) < 1e-15);
    }

    #[test]
    fn sigma_is_involution_both_levels() {
        let mut r = rng();
        let x = sample::random_laurent(&mut r, 2, -3, 3, 0.7);
        let twice = twisted_involution_algebra(&twisted_involution_algebra(&x));
        assert!(twice.approx_eq(&x, 1e-14));

        let g = sample::random_sigma_group(&mut r, 2, 0.3);
        let once = twisted_involution_group(&g, 16).unwrap();
        let again = twisted_involution_group(&once, 16).unwrap();
        assert!(again.approx_eq(&g, 1e-9), "{}", again.distance(&g));
    }

    #[test]
    fn sigma_fixed_set_closed_under_bracket() {
        let mut r = rng();
        for _ in 0..10 {
            let x = sample::random_sigma_algebra(&mut r, 3, -3, 0.8);
            let y = sample::random_sigma_algebra(&mut r, 3, -3, 0.8);
            let b = bracket(&x, &y).unwrap();
            let check = membership(&b, LoopClass::SigmaAlgebra, 1e-12);
            assert!(check.pass, "bracket residual {}", check.residual);
        }
    }

    #[test]
    fn decompose_sigma_plus_examples() {
        let mut r = rng();
        // already σ → (γ, 0)
        let s = sample::random_sigma_algebra(&mut r, 2, -3, 0.8);
        let (gs, gp) = decompose_sigma_plus(&s);
        assert!(gs.approx_eq(&s, 1e-14));
        assert!(gp.sup_coeff_norm() < 1e-14);

        // γ = λ⁻¹A → (λ⁻¹A + λA*, −λA*)
        let a = sample::random_matrix(&mut r, 2, 1.0);
        let g = LaurentMatrix::monomial(-1, a.clone());
        let (gs, gp) = decompose_sigma_plus(&g);
        let want_sigma = LaurentMatrix::monomial(-1, a.clone())
            .add(&LaurentMatrix::monomial(1, a.adjoint()))
            .unwrap();
        let want_plus = LaurentMatrix::monomial(1, a.adjoint().scale(-1.0));
        assert!(gs.approx_eq(&want_sigma, 1e-15));
        assert!(gp.approx_eq(&want_plus, 1e-15));
    }

    #[test]
    fn decompose_reconstructs_exactly() {
        let mut r = rng();
        for _ in 0..20 {
            let g = sample::random_laurent(&mut r, 3, -3, 3, 1.0);
            let (gs, gp) = decompose_sigma_plus(&g);
            let back = gs.add(&gp).unwrap();
            assert!(back.approx_eq(&g, 0.0), "reconstruction must be exact");
            assert!(membership(&gs, LoopClass::SigmaAlgebra, 1e-13).pass);
            assert!(membership(&gp, LoopClass::Plus, 0.0).pass);
        }
    }

    #[test]
    fn sobolev_examples() {
        let x = LaurentMatrix::identity(2);
        assert!((sobolev_norm(&x, 0.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((sobolev_norm(&x, 3.5) - 2f64.sqrt()).abs() < 1e-15);

        let mut e11 = mat::czero(2);
        e11[(0, 0)] = mat::ONE;
        let y = LaurentMatrix::monomial(1, e11);
        assert!((sobolev_norm(&y, 1.0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sobolev_termwise_and_monotone() {
        let mut r = rng();
        let x = sample::random_laurent(&mut r, 3, -4, 4, 0.9);
        let direct: f64 = x
            .degrees()
            .map(|d| (1.0 + (d * d) as f64).powf(1.25) * mat::frob(&x.coeff(d)).powi(2))
            .sum();
        assert!((sobolev_norm(&x, 1.25).powi(2) - direct).abs() < 1e-12);
        assert!(sobolev_norm(&x, 2.0) >= sobolev_norm(&x, 1.0));
    }

    #[test]
    fn j_structure_examples() {
        let mut r = rng();
        let a = sample::random_matrix(&mut r, 2, 1.0);
        let x = LaurentMatrix::monomial(-1, a.clone())
            .add(&LaurentMatrix::monomial(1, a.adjoint()))
            .unwrap();
        let jx = j_complex_structure(&x).unwrap();
        let want = LaurentMatrix::monomial(-1, a.clone() * mat::I)
            .add(&LaurentMatrix::monomial(1, a.adjoint() * (-mat::I)))
            .unwrap();
        assert!(jx.approx_eq(&want, 1e-15));

        let jjx = j_complex_structure(&jx).unwrap();
        assert!(jjx.approx_eq(&x.neg(), 1e-15));

        for _ in 0..20 {
            let s = sample::random_sigma_zero_mean(&mut r, 2, 3, 0.8);
            let js = j_complex_structure(&s).unwrap();
            assert!(membership(&js, LoopClass::SigmaAlgebra, 1e-12).pass);
            // J multiplies coefficients by unit scalars
            assert!((sobolev_norm(&js, 1.5) - sobolev_norm(&s, 1.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn j_rejects_nonzero_mean() {
        let x = LaurentMatrix::identity(2);
        assert!(j_complex_structure(&x).is_err());
    }

    #[test]
    fn horizontal_projection() {
        let x = LaurentMatrix::identity(3);
        assert!(horizontal_project(&x).is_zero());

        let mut r = rng();
        let a = sample::random_matrix(&mut r, 2, 1.0);
        let b = sample::random_matrix(&mut r, 2, 1.0);
        let c = sample::random_matrix(&mut r, 2, 1.0);
        let x = LaurentMatrix::monomial(-1, a.clone())
            .add(&LaurentMatrix::monomial(1, b.clone()))
            .unwrap()
            .add(&LaurentMatrix::monomial(2, c))
            .unwrap();
        let h = horizontal_project(&x);
        let want = LaurentMatrix::monomial(-1, a)
            .add(&LaurentMatrix::monomial(1, b))
            .unwrap();
        assert!(h.approx_eq(&want, 0.0));

        for _ in 0..20 {
            let y = sample::random_laurent(&mut r, 2, -4, 4, 1.0);
            let once = horizontal_project(&y);
            let twice = horizontal_project(&once);
            assert!(twice.approx_eq(&once, 0.0));
        }
    }

    #[test]
    fn exp_examples() {
        let z = LaurentMatrix::zero(3);
        let e = exp_loop(&z, 4, 1e-12).unwrap();
        assert!(e.approx_eq(&LaurentMatrix::identity(3), 0.0));

        let mut r = rng();
        let k0 = sample::random_anti_hermitian(&mut r, 3, 1.0);
        let e = exp_loop(&LaurentMatrix::constant(k0), 4, 1e-12).unwrap();
        assert!(membership(&e, LoopClass::ConstantUnitary, 1e-12).pass);

        let p = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ]));
        let x = LaurentMatrix::monomial(-1, p.clone())
            .add(&LaurentMatrix::monomial(1, p))
            .unwrap();
        let e = exp_loop(&x, 16, 1e-10).unwrap();
        for j in 0..16 {
            let th = 2.0 * PI * j as f64 / 16.0;
            let lam = Complex64::from_polar(1.0, th);
            let got = e.eval(lam);
            let want = mat::expm(&x.eval(lam));
            assert!(mat::max_entry_diff(&got, &want) < 1e-10);
        }
    }

    #[test]
    fn exp_of_sigma_element_lands_in_sigma_group() {
        let mut r = rng();
        let x = sample::random_sigma_algebra(&mut r, 2, -1, 0.3);
        let e = exp_loop(&x, 14, 1e-10).unwrap();
        let check = membership(&e, LoopClass::SigmaGroup, 1e-10);
        assert!(check.pass, "residual {}", check.residual);
    }

    #[test]
    fn exp_window_too_small_is_reported() {
        let p = mat::cident(2).scale(3.0);
        let x = LaurentMatrix::monomial(-1, p.clone())
            .add(&LaurentMatrix::monomial(1, p))
            .unwrap();
        match exp_loop(&x, 2, 1e-12) {
            Err(Error::WindowTooSmall { .. }) => {}
            other => panic!("expected WindowTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn inverse_examples() {
        let id = LaurentMatrix::identity(3);
        let inv = group_inverse(&id, 4, 1e-12).unwrap();
        assert!(inv.approx_eq(&id, 1e-13));

        let lam_i = LaurentMatrix::monomial(1, mat::cident(2));
        let inv = group_inverse(&lam_i, 4, 1e-12).unwrap();
        assert!(inv.approx_eq(&LaurentMatrix::monomial(-1, mat::cident(2)), 1e-13));

        let mut r = rng();
        let x = sample::random_sigma_algebra(&mut r, 2, -1, 0.3);
        let g = exp_loop(&x, 14, 1e-10).unwrap();
        let ginv = group_inverse(&g, 14, 1e-10).unwrap();
        let prod = laurent_mul(&g, &ginv).unwrap();
        assert!(prod.distance(&LaurentMatrix::identity(2)) < 1e-10);
    }

    #[test]
    fn inverse_near_singular_is_rejected() {
        // (1+λ)I vanishes at λ = −1
        let g = LaurentMatrix::constant(mat::cident(2))
            .add(&LaurentMatrix::monomial(1, mat::cident(2)))
            .unwrap();
        assert!(matches!(
            group_inverse(&g, 8, 1e-10),
            Err(Error::NearSingular(_))
        ));
    }

    #[test]
    fn membership_examples() {
        let mut r = rng();
        let u = sample::random_unitary(&mut r, 3);
        let cu = LaurentMatrix::constant(u);
        assert!(membership(&cu, LoopClass::SigmaGroup, 1e-12).pass);
        assert!(membership(&cu, LoopClass::Plus, 0.0).pass);
        assert!(membership(&cu, LoopClass::ConstantUnitary, 1e-12).pass);

        let a = sample::random_matrix(&mut r, 3, 1.0);
        let bad = LaurentMatrix::monomial(-1, a);
        assert!(!membership(&bad, LoopClass::Plus, 1e-10).pass);
    }

    #[test]
    fn symm_princ_finite_window() {
        // σ-group ∧ plus ⟹ constant unitary, checked on generated loops
        let mut r = rng();
        let u = sample::random_unitary(&mut r, 2);
        let cu = LaurentMatrix::constant(u);
        assert!(membership(&cu, LoopClass::SigmaGroup, 1e-12).pass);
        assert!(membership(&cu, LoopClass::Plus, 0.0).pass);
        assert!(membership(&cu, LoopClass::ConstantUnitary, 1e-12).pass);

        for _ in 0..10 {
            let x = sample::random_sigma_algebra(&mut r, 2, -1, 0.3);
            let g = exp_loop(&x, 14, 1e-10).unwrap();
            let in_sigma = membership(&g, LoopClass::SigmaGroup, 1e-10).pass;
            let in_plus = membership(&g, LoopClass::Plus, 1e-10).pass;
            if in_sigma && in_plus {
                assert!(membership(&g, LoopClass::ConstantUnitary, 1e-8).pass);
            }
        }
    }

    #[test]
    fn serde_roundtrip() {
        let mut r = rng();
        let x = sample::random_laurent(&mut r, 2, -2, 3, 1.0);
        let json = serde_json::to_string(&x).unwrap();
        let back: LaurentMatrix = serde_json::from_str(&json).unwrap();
        assert!(back.approx_eq(&x, 0.0));
    }
}
