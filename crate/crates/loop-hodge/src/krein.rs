//! Truncated-window model of the Krein space L²(S¹, ℂⁿ).
//!
//! Vectors are finitely supported Fourier series with coefficients in ℂⁿ;
//! the indefinite form is B(f,g) = Σₙ (−1)ⁿ h(fₙ, gₙ) and the right shift
//! T maps degree n to n+1 (a B-anti-isometry). Subspaces are spanned by
//! finitely many vectors inside a degree window; axioms that involve
//! infinite intersections or unions are replaced by windowed dimension
//! counts, flagged as window-limited rather than certified.
//!
//! The base Hermitian form h defaults to the standard inner product; a
//! signed variant (h = diag(±1)) carries graded Hodge embeddings whose
//! weights contribute signs (−1)^p.

use crate::error::{Error, Result};
use crate::laurent::{self, LaurentMatrix};
use crate::mat::{self, CMat, CVec};
use crate::report::Report;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Pivot threshold for rank decisions in indefinite Gram computations.
pub const PIVOT_THRESHOLD: f64 = 1e-10;

/// Finitely supported element of L²(S¹, ℂⁿ): one coefficient vector per
/// degree in `[lo, lo + coeffs.len() - 1]`.
#[derive(Debug, Clone)]
pub struct KreinVector {
    n: usize,
    lo: i64,
    coeffs: Vec<CVec>,
}

impl KreinVector {
    pub fn from_coeffs(lo: i64, coeffs: Vec<CVec>) -> Self {
        assert!(!coeffs.is_empty());
        let n = coeffs[0].len();
        assert!(coeffs.iter().all(|c| c.len() == n));
        let mut v = Self { n, lo, coeffs };
        v.normalize();
        v
    }

    /// The basis vector e_i placed at a single degree.
    pub fn unit(n: usize, component: usize, degree: i64) -> Self {
        let mut c = CVec::zeros(n);
        c[component] = mat::ONE;
        Self {
            n,
            lo: degree,
            coeffs: vec![c],
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            lo: 0,
            coeffs: vec![CVec::zeros(n)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, degree: i64) -> CVec {
        if degree < self.lo || degree > self.hi() {
            CVec::zeros(self.n)
        } else {
            self.coeffs[(degree - self.lo) as usize].clone()
        }
    }

    fn normalize(&mut self) {
        let is_zero = |c: &CVec| c.iter().all(|z| z.re == 0.0 && z.im == 0.0);
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

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let coeffs = (lo..=hi).map(|d| self.coeff(d) + other.coeff(d)).collect();
        Ok(Self::from_coeffs(lo, coeffs))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Shift every degree by k (multiplication by λᵏ).
    pub fn shifted(&self, k: i64) -> Self {
        Self {
            n: self.n,
            lo: self.lo + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn sup_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(mat::frob_vec).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        (lo..=hi)
            .map(|d| mat::frob_vec(&(self.coeff(d) - other.coeff(d))))
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct KreinVectorJson {
    n: usize,
    lo: i64,
    hi: i64,
    coeffs: Vec<Vec<[f64; 2]>>,
}

impl Serialize for KreinVector {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        KreinVectorJson {
            n: self.n,
            lo: self.lo,
            hi: self.hi(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for KreinVector {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = KreinVectorJson::deserialize(de)?;
        if raw.coeffs.len() as i64 != raw.hi - raw.lo + 1
            || raw.coeffs.iter().any(|c| c.len() != raw.n)
        {
            return Err(serde::de::Error::custom("inconsistent vector window"));
        }
        Ok(KreinVector::from_coeffs(
            raw.lo,
            raw.coeffs
                .iter()
                .map(|c| CVec::from_fn(raw.n, |i, _| Complex64::new(c[i][0], c[i][1])))
                .collect(),
        ))
    }
}

/// The right-shift operator T: degree n ↦ n+1.
pub fn right_shift(f: &KreinVector) -> KreinVector {
    f.shifted(1)
}

/// Base Hermitian form h = diag(signs) on ℂⁿ. Standard structure: all +1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KreinStructure {
    pub n: usize,
    pub signs: Vec<f64>,
}

impl KreinStructure {
    pub fn standard(n: usize) -> Self {
        Self {
            n,
            signs: vec![1.0; n],
        }
    }

    pub fn signed(signs: Vec<f64>) -> Self {
        Self {
            n: signs.len(),
            signs,
        }
    }

    fn h(&self, u: &CVec, v: &CVec) -> Complex64 {
        u.iter()
            .zip(v.iter())
            .zip(self.signs.iter())
            .map(|((a, b), s)| a * b.conj() * Complex64::new(*s, 0.0))
            .sum()
    }
}

/// The Krein form B(f,g) = Σₙ (−1)ⁿ h(fₙ, gₙ) for the standard h.
pub fn krein_form(f: &KreinVector, g: &KreinVector) -> Result<Complex64> {
    krein_form_with(&KreinStructure::standard(f.dim()), f, g)
}

/// The Krein form over a signed base structure.
pub fn krein_form_with(
    structure: &KreinStructure,
    f: &KreinVector,
    g: &KreinVector,
) -> Result<Complex64> {
    if f.dim() != g.dim() || f.dim() != structure.n {
        return Err(Error::SizeMismatch(f.dim(), g.dim()));
    }
    let lo = f.lo().min(g.lo());
    let hi = f.hi().max(g.hi());
    let mut acc = Complex64::new(0.0, 0.0);
    for d in lo..=hi {
        let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        acc += structure.h(&f.coeff(d), &g.coeff(d)) * Complex64::new(sign, 0.0);
    }
    Ok(acc)
}

/// Rotate the loop parameter: φ_μ(f)(λ) = f(μλ), i.e. the degree-n
/// coefficient is scaled by μⁿ. Requires |μ| = 1.
pub fn circle_rotate(f: &KreinVector, mu: Complex64) -> Result<KreinVector> {
    if (mu.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "circle_rotate needs |mu| = 1, got {}",
            mu.norm()
        )));
    }
    let coeffs = (f.lo()..=f.hi())
        .map(|d| f.coeff(d) * mu.powi(d as i32))
        .collect();
    Ok(KreinVector::from_coeffs(f.lo(), coeffs))
}

/// Residual of the intertwining relation μ·(T∘φ_μ) = φ_μ∘T on one vector.
pub fn intertwine_check(f: &KreinVector, mu: Complex64) -> Result<f64> {
    let lhs = right_shift(&circle_rotate(f, mu)?).scale(mu);
    let rhs = circle_rotate(&right_shift(f), mu)?;
    Ok(lhs.distance(&rhs))
}

/// Subspace of the windowed model, spanned by finitely many vectors whose
/// support lies inside the window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KreinSubspace {
    pub structure: KreinStructure,
    pub window: (i64, i64),
    pub basis: Vec<KreinVector>,
}

impl KreinSubspace {
    pub fn from_basis(
        structure: KreinStructure,
        window: (i64, i64),
        basis: Vec<KreinVector>,
    ) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::InvalidInput("empty basis".into()));
        }
        for b in &basis {
            if b.dim() != structure.n {
                return Err(Error::SizeMismatch(b.dim(), structure.n));
            }
            if b.lo() < window.0 || b.hi() > window.1 {
                return Err(Error::InvalidInput(
                    "basis vector support exceeds the window".into(),
                ));
            }
        }
        Ok(Self {
            structure,
            window,
            basis,
        })
    }

    /// The Fourier-nonnegative model subspace: degrees 0..hi of the window.
    pub fn fourier_nonnegative(n: usize, window: (i64, i64)) -> Self {
        let mut basis = Vec::new();
        for d in 0..=window.1 {
            for i in 0..n {
                basis.push(KreinVector::unit(n, i, d));
            }
        }
        Self {
            structure: KreinStructure::standard(n),
            window,
            basis,
        }
    }

    /// Apply a loop g pointwise to every basis vector: g·W. Basis vectors
    /// whose image would leave the window are dropped.
    pub fn acted_by(&self, g: &LaurentMatrix) -> Result<Self> {
        if g.size() != self.structure.n {
            return Err(Error::SizeMismatch(g.size(), self.structure.n));
        }
        let mut basis = Vec::new();
        for b in &self.basis {
            if b.lo() + g.lo() >= self.window.0 && b.hi() + g.hi() <= self.window.1 {
                basis.push(multiply_vector(g, b)?);
            }
        }
        if basis.is_empty() {
            return Err(Error::WindowTooSmall {
                context: "acted_by dropped every basis vector".into(),
                magnitude: f64::INFINITY,
                tol: 0.0,
            });
        }
        Ok(Self {
            structure: self.structure.clone(),
            window: self.window,
            basis,
        })
    }

    pub fn flat_dim(&self) -> usize {
        self.structure.n * (self.window.1 - self.window.0 + 1) as usize
    }

    fn flatten(&self, v: &KreinVector) -> CVec {
        let span = (self.window.1 - self.window.0 + 1) as usize;
        let n = self.structure.n;
        let mut out = CVec::zeros(n * span);
        for d in v.lo()..=v.hi() {
            if d < self.window.0 || d > self.window.1 {
                continue;
            }
            let block = (d - self.window.0) as usize;
            let c = v.coeff(d);
            for i in 0..n {
                out[block * n + i] = c[i];
            }
        }
        out
    }

    fn unflatten(&self, v: &CVec) -> KreinVector {
        let span = (self.window.1 - self.window.0 + 1) as usize;
        let n = self.structure.n;
        let coeffs = (0..span)
            .map(|b| CVec::from_fn(n, |i, _| v[b * n + i]))
            .collect();
        KreinVector::from_coeffs(self.window.0, coeffs)
    }

    fn basis_matrix(&self) -> CMat {
        let cols: Vec<CVec> = self.basis.iter().map(|b| self.flatten(b)).collect();
        CMat::from_columns(&cols)
    }

    /// Diagonal weights of B on the flattened window: (−1)^d · signs.
    fn b_weights(&self) -> Vec<f64> {
        let n = self.structure.n;
        let mut w = Vec::with_capacity(self.flat_dim());
        for d in self.window.0..=self.window.1 {
            let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            for i in 0..n {
                w.push(sign * self.structure.signs[i]);
            }
        }
        w
    }

    fn b_gram(&self, left: &[CVec], right: &[CVec]) -> CMat {
        let w = self.b_weights();
        CMat::from_fn(left.len(), right.len(), |i, j| {
            left[i]
                .iter()
                .zip(right[j].iter())
                .zip(w.iter())
                .map(|((a, b), s)| a * b.conj() * Complex64::new(*s, 0.0))
                .sum()
        })
    }
}

/// Pointwise action of a matrix loop on a vector (Cauchy product).
pub fn multiply_vector(g: &LaurentMatrix, f: &KreinVector) -> Result<KreinVector> {
    if g.size() != f.dim() {
        return Err(Error::SizeMismatch(g.size(), f.dim()));
    }
    let lo = g.lo() + f.lo();
    let hi = g.hi() + f.hi();
    let mut coeffs: Vec<CVec> = (lo..=hi).map(|_| CVec::zeros(f.dim())).collect();
    for i in g.lo()..=g.hi() {
        let gi = g.coeff(i);
        for j in f.lo()..=f.hi() {
            coeffs[(i + j - lo) as usize] += &gi * f.coeff(j);
        }
    }
    Ok(KreinVector::from_coeffs(lo, coeffs))
}

struct SplitOffShift {
    /// Flattened shifted basis vectors that stay inside the window.
    tw: Vec<CVec>,
    /// How many basis vectors could not be shift-checked.
    window_limited: usize,
    /// max distance of a checkable shifted vector from span(W).
    shift_residual: f64,
}

fn split_off_shift(w: &KreinSubspace) -> SplitOffShift {
    let m = w.basis_matrix();
    // Orthonormal column span w.r.t. the auxiliary positive product.
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > PIVOT_THRESHOLD)
        .count();
    let q = u.columns(0, rank).into_owned();

    let mut tw = Vec::new();
    let mut window_limited = 0usize;
    let mut shift_residual = 0.0f64;
    for b in &w.basis {
        if b.hi() + 1 > w.window.1 {
            window_limited += 1;
            continue;
        }
        let s = w.flatten(&right_shift(b));
        let proj = &q * (q.adjoint() * &s);
        shift_residual = shift_residual.max(mat::frob_vec(&(s - &proj)));
        tw.push(proj);
    }
    SplitOffShift {
        tw,
        window_limited,
        shift_residual,
    }
}

/// B-orthogonal complement of span(tw) inside span(W), by B-Gram
/// pseudo-orthogonalization with pivot threshold [`PIVOT_THRESHOLD`].
fn b_complement(w: &KreinSubspace, split: &SplitOffShift) -> Result<Vec<CVec>> {
    let tw = &split.tw;
    let w_cols: Vec<CVec> = w.basis.iter().map(|b| w.flatten(b)).collect();
    if tw.is_empty() {
        return Ok(w_cols);
    }
    let c = w.b_gram(tw, tw);
    let min_pivot = mat::hermitian_eigenvalues(&c)
        .iter()
        .map(|e| e.abs())
        .fold(f64::INFINITY, f64::min);
    if min_pivot < PIVOT_THRESHOLD {
        return Err(Error::DegenerateGram(min_pivot));
    }
    let ct = c.transpose();
    let lu = ct.lu();
    let mut candidates = Vec::new();
    for col in &w_cols {
        let rhs = CVec::from_fn(tw.len(), |k, _| {
            let g = w.b_gram(std::slice::from_ref(col), std::slice::from_ref(&tw[k]));
            g[(0, 0)]
        });
        let alpha = lu
            .solve(&rhs)
            .ok_or(Error::DegenerateGram(min_pivot))?;
        let mut proj = CVec::zeros(col.len());
        for (k, t) in tw.iter().enumerate() {
            proj += t * alpha[k];
        }
        candidates.push(col - proj);
    }
    // Rank-reduce the candidates.
    let cand = CMat::from_columns(&candidates);
    let svd = cand.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > PIVOT_THRESHOLD)
        .count();
    Ok((0..rank).map(|i| u.column(i).into_owned()).collect())
}

/// Windowed verification of the outgoing-subspace axioms.
///
/// Checks, at finite window: linear independence of the basis, TW ⊂ W,
/// nondegeneracy of B on W, positive-definiteness of B on H = W ⊖ TW,
/// and the shrinking/filling dimension counts for T^k W. Dimension counts
/// are reported, not certified; basis vectors whose shift leaves the
/// window are flagged as window-limited.
pub fn check_outgoing(w: &KreinSubspace, tol: f64) -> Report {
    let mut rep = Report::new("check_outgoing");
    rep.param("window", format!("[{}, {}]", w.window.0, w.window.1));
    rep.param("basis", w.basis.len());

    let m = w.basis_matrix();
    let sv = mat::singular_values(&m);
    let min_sv = sv.last().copied().unwrap_or(0.0);
    rep.check_lower("basis_min_singular_value", min_sv, PIVOT_THRESHOLD);

    let split = split_off_shift(w);
    rep.check("shift_containment", split.shift_residual, tol);
    rep.info("window_limited_vectors", split.window_limited as f64);
    if split.window_limited > 0 {
        rep.note(format!(
            "{} basis vector(s) at the window edge excluded from the shift check",
            split.window_limited
        ));
    }

    // Nondegeneracy of B restricted to W.
    let w_cols: Vec<CVec> = w.basis.iter().map(|b| w.flatten(b)).collect();
    let gram = w.b_gram(&w_cols, &w_cols);
    let min_abs_eig = mat::hermitian_eigenvalues(&gram)
        .iter()
        .map(|e| e.abs())
        .fold(f64::INFINITY, f64::min);
    rep.check_lower("b_gram_min_abs_eigenvalue", min_abs_eig, PIVOT_THRESHOLD);

    // Positivity of H = W ⊖ TW.
    match b_complement(w, &split) {
        Ok(h_basis) if !h_basis.is_empty() => {
            let h_gram = w.b_gram(&h_basis, &h_basis);
            let eigs = mat::hermitian_eigenvalues(&h_gram);
            let min_eig = eigs.first().copied().unwrap_or(f64::NAN);
            rep.info("h_dim", h_basis.len() as f64);
            rep.check_lower("h_gram_min_eigenvalue", min_eig, PIVOT_THRESHOLD);
        }
        Ok(_) => {
            rep.check_flag("h_nonempty", false);
        }
        Err(e) => {
            rep.check_flag(format!("h_computed ({e})"), false);
        }
    }

    // Windowed dimension counts for ∩ T^k W (shrinking) and ∪ T^{-k} W
    // (filling). Shifted vectors are kept only while fully inside the
    // window, so counts are exact as far as they go.
    let mut shrink_dims = Vec::new();
    let mut k = 0i64;
    loop {
        let cols: Vec<CVec> = w
            .basis
            .iter()
            .filter(|b| b.hi() + k <= w.window.1)
            .map(|b| w.flatten(&b.shifted(k)))
            .collect();
        if cols.is_empty() {
            break;
        }
        let rank = mat::rank(&CMat::from_columns(&cols), PIVOT_THRESHOLD);
        shrink_dims.push(rank);
        k += 1;
        if k > w.window.1 - w.window.0 {
            break;
        }
    }
    let shrinking = shrink_dims.windows(2).all(|p| p[1] < p[0]);
    rep.check_flag("intersection_dims_strictly_shrinking", shrinking);
    rep.note(format!("windowed dim T^k W: {shrink_dims:?}"));

    let mut fill_dims = Vec::new();
    let mut union_cols: Vec<CVec> = Vec::new();
    for k in 0..=(w.window.1 - w.window.0) {
        for b in &w.basis {
            if b.lo() - k >= w.window.0 {
                union_cols.push(w.flatten(&b.shifted(-k)));
            }
        }
        if union_cols.is_empty() {
            break;
        }
        fill_dims.push(mat::rank(&CMat::from_columns(&union_cols), PIVOT_THRESHOLD));
    }
    let nondecreasing = fill_dims.windows(2).all(|p| p[1] >= p[0]);
    rep.check_flag("union_dims_nondecreasing", nondecreasing);
    rep.info(
        "union_final_dim",
        fill_dims.last().copied().unwrap_or(0) as f64,
    );
    rep.note(format!("windowed dim span ∪ T^-k W: {fill_dims:?}"));

    rep
}

/// dim(W ⊖ TW), the rank of the subspace's fiber.
pub fn virtual_dimension(w: &KreinSubspace) -> Result<usize> {
    let split = split_off_shift(w);
    let h = b_complement(w, &split)?;
    Ok(h.len())
}

/// The canonical isomorphism Φ from the standard model L²(S¹, ℂᵐ) (m the
/// virtual dimension) onto the structure generated by W: a B-orthonormal
/// basis (h₁…h_m) of H = W ⊖ TW is chosen and Φ maps e_j @ d to T^d h_j.
pub struct CanonicalIso {
    pub virtual_dim: usize,
    pub window: (i64, i64),
    /// Degrees d for which T^d h_j stays inside the window unclipped;
    /// residuals are measured there to keep window artifacts out.
    pub unclipped: (i64, i64),
    /// Φ(e_j @ d) as a windowed vector, indexed by (d − lo)·m + j.
    pub matrix: CMat,
    structure: KreinStructure,
}

impl CanonicalIso {
    /// Image of the standard basis vector e_j @ d.
    pub fn image_of(&self, component: usize, degree: i64) -> KreinVector {
        let span = (self.window.1 - self.window.0 + 1) as usize;
        let m = self.virtual_dim;
        let idx = (degree - self.window.0) as usize * m + component;
        assert!((degree >= self.window.0) && (degree <= self.window.1));
        let col = self.matrix.column(idx).into_owned();
        let n = self.structure.n;
        let coeffs = (0..span)
            .map(|b| CVec::from_fn(n, |i, _| col[b * n + i]))
            .collect();
        KreinVector::from_coeffs(self.window.0, coeffs)
    }

    /// Max residual of shift intertwining Φ∘T = T∘Φ over interior degrees.
    pub fn shift_intertwine_residual(&self) -> f64 {
        let mut res: f64 = 0.0;
        for d in self.window.0..self.window.1 {
            for j in 0..self.virtual_dim {
                let a = right_shift(&self.image_of(j, d));
                let b = self.image_of(j, d + 1);
                // Ignore mass pushed past the window edge by the shift.
                if a.hi() <= self.window.1 {
                    res = res.max(a.distance(&b));
                }
            }
        }
        res
    }

    /// Max |B(Φx, Φy) − B(x, y)| over pairs of standard basis vectors.
    pub fn b_preservation_residual(&self) -> f64 {
        let mut res: f64 = 0.0;
        let std_structure = KreinStructure::standard(self.virtual_dim);
        for d in self.window.0..=self.window.1 {
            for e in self.window.0..=self.window.1 {
                for j in 0..self.virtual_dim {
                    for k in 0..self.virtual_dim {
                        let x = KreinVector::unit(self.virtual_dim, j, d);
                        let y = KreinVector::unit(self.virtual_dim, k, e);
                        let want = krein_form_with(&std_structure, &x, &y).unwrap();
                        let got = krein_form_with(
                            &self.structure,
                            &self.image_of(j, d),
                            &self.image_of(k, e),
                        )
                        .unwrap();
                        res = res.max((want - got).norm());
                    }
                }
            }
        }
        res
    }
}

/// Build the canonical isomorphism for an outgoing subspace.
///
/// The B-orthonormal basis of H is produced by Gram–Schmidt in input
/// order, with the phase fixed so the first entry above the pivot
/// threshold is real positive.
pub fn canonical_isomorphism(w: &KreinSubspace) -> Result<CanonicalIso> {
    let split = split_off_shift(w);
    let h_cols = b_complement(w, &split)?;
    if h_cols.is_empty() {
        return Err(Error::DegenerateGram(0.0));
    }
    // Gram–Schmidt w.r.t. B (positive definite on H).
    let mut ortho: Vec<CVec> = Vec::new();
    for col in &h_cols {
        let mut v = col.clone();
        for u in &ortho {
            let inner = w.b_gram(std::slice::from_ref(&v), std::slice::from_ref(u))[(0, 0)];
            v -= u * inner;
        }
        let norm2 = w.b_gram(std::slice::from_ref(&v), std::slice::from_ref(&v))[(0, 0)].re;
        if norm2 <= PIVOT_THRESHOLD {
            return Err(Error::DegenerateGram(norm2));
        }
        v = v.scale(1.0 / norm2.sqrt());
        // Deterministic phase: first significant entry real positive.
        if let Some(z) = v.iter().find(|z| z.norm() > PIVOT_THRESHOLD) {
            let phase = z / z.norm();
            v *= phase.conj();
        }
        ortho.push(v);
    }
    let m = ortho.len();
    let span = (w.window.1 - w.window.0 + 1) as usize;
    let h_vectors: Vec<KreinVector> = ortho.iter().map(|c| w.unflatten(c)).collect();
    let mut cols = Vec::with_capacity(span * m);
    for d in w.window.0..=w.window.1 {
        for h in &h_vectors {
            let shifted = h.shifted(d);
            let (inside, _outside) = clip_to_window(&shifted, w.window);
            cols.push(w.flatten(&inside));
        }
    }
    Ok(CanonicalIso {
        virtual_dim: m,
        window: w.window,
        matrix: CMat::from_columns(&cols),
        structure: w.structure.clone(),
    })
}

fn clip_to_window(v: &KreinVector, window: (i64, i64)) -> (KreinVector, f64) {
    let mut outside = 0.0f64;
    let mut coeffs = Vec::new();
    for d in window.0..=window.1 {
        coeffs.push(v.coeff(d));
    }
    for d in v.lo()..=v.hi() {
        if d < window.0 || d > window.1 {
            outside = outside.max(mat::frob_vec(&v.coeff(d)));
        }
    }
    (KreinVector::from_coeffs(window.0, coeffs), outside)
}

/// Graded input for the classical Hodge embedding: one Hermitian Gram
/// block per weight p, required to be (−1)^p positive definite.
#[derive(Debug, Clone)]
pub struct GradedHodgeInput {
    /// (weight, gram) sorted by weight.
    pub blocks: Vec<(i32, CMat)>,
}

impl GradedHodgeInput {
    pub fn new(mut blocks: Vec<(i32, CMat)>) -> Self {
        blocks.sort_by_key(|(p, _)| *p);
        Self { blocks }
    }

    /// Unit grams of the given signs: gram_p = (−1)^p I.
    pub fn with_unit_blocks(dims: &[(i32, usize)]) -> Self {
        let blocks = dims
            .iter()
            .map(|&(p, d)| {
                let sign = if p.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                (p, mat::cident(d).scale(sign))
            })
            .collect();
        Self::new(blocks)
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|(_, g)| g.nrows()).sum()
    }
}

/// Embed a graded (classical) Hodge structure as an outgoing subspace:
/// W = ⊕ₙ T^{−n} FⁿV, carried on the window in normalized coordinates
/// where each Gram block becomes (−1)^p·I. The degree-d slice of W is
/// F^{−d}V = ⊕_{p ≥ −d} V^p.
pub fn embed_classical_hodge(
    input: &GradedHodgeInput,
    window: (i64, i64),
) -> Result<KreinSubspace> {
    if input.blocks.is_empty() {
        return Err(Error::InvalidInput("no weight blocks".into()));
    }
    // Validate: (−1)^p · gram positive definite per block.
    for (p, gram) in &input.blocks {
        if mat::max_entry_diff(gram, &gram.adjoint()) > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "gram at weight {p} is not Hermitian"
            )));
        }
        let sign = if p.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let eigs = mat::hermitian_eigenvalues(&gram.scale(sign));
        if eigs.first().copied().unwrap_or(0.0) <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "gram at weight {p} is not (−1)^p positive definite"
            )));
        }
    }
    let n = input.total_dim();
    let mut signs = Vec::with_capacity(n);
    for (p, gram) in &input.blocks {
        let sign = if p.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        signs.extend(std::iter::repeat(sign).take(gram.nrows()));
    }
    let structure = KreinStructure::signed(signs);

    // Component offsets per weight block.
    let mut offsets = Vec::new();
    let mut off = 0usize;
    for (p, gram) in &input.blocks {
        offsets.push((*p, off, gram.nrows()));
        off += gram.nrows();
    }

    let mut basis = Vec::new();
    for d in window.0..=window.1 {
        for &(p, off, dim) in &offsets {
            // Slice at degree d carries V^p exactly when p ≥ −d.
            if (p as i64) >= -d {
                for i in 0..dim {
                    basis.push(KreinVector::unit(n, off + i, d));
                }
            }
        }
    }
    KreinSubspace::from_basis(structure, window, basis)
}

/// Outcome of testing an operator against the commutant of the shift.
pub struct CommutantCheck {
    pub commutes: bool,
    pub residual: f64,
    pub multiplier: Option<LaurentMatrix>,
}

/// Test whether an operator on the windowed space commutes with the right
/// shift; if it does (within `tol` on the interior), extract its Laurent
/// multiplier coefficients. An operator commuting with T has constant
/// blocks along each degree diagonal.
pub fn commutant_check(m: &CMat, n: usize, window: (i64, i64), tol: f64) -> CommutantCheck {
    let span = (window.1 - window.0 + 1) as usize;
    assert_eq!(m.nrows(), n * span);
    assert_eq!(m.ncols(), n * span);
    let block = |out_d: usize, in_d: usize| -> CMat {
        m.view((out_d * n, in_d * n), (n, n)).into_owned()
    };
    let mut residual = 0.0f64;
    let mut coeffs = Vec::new();
    let lo = -(span as i64 - 1);
    let hi = span as i64 - 1;
    for k in lo..=hi {
        // Average the blocks on diagonal k, then measure deviation.
        let mut avg = mat::czero(n);
        let mut count = 0usize;
        for in_d in 0..span {
            let out_d = in_d as i64 + k;
            if out_d >= 0 && (out_d as usize) < span {
                avg += block(out_d as usize, in_d);
                count += 1;
            }
        }
        if count == 0 {
            coeffs.push(mat::czero(n));
            continue;
        }
        avg = avg.scale(1.0 / count as f64);
        for in_d in 0..span {
            let out_d = in_d as i64 + k;
            if out_d >= 0 && (out_d as usize) < span {
                residual = residual.max(mat::frob(&(block(out_d as usize, in_d) - &avg)));
            }
        }
        coeffs.push(avg);
    }
    let commutes = residual <= tol;
    CommutantCheck {
        commutes,
        residual,
        multiplier: if commutes {
            Some(LaurentMatrix::from_coeffs(lo, coeffs).trimmed(tol))
        } else {
            None
        },
    }
}

/// Build the windowed matrix of the multiplication operator by a loop.
pub fn multiplication_operator(g: &LaurentMatrix, window: (i64, i64)) -> CMat {
    let n = g.size();
    let span = (window.1 - window.0 + 1) as usize;
    let mut m = CMat::zeros(n * span, n * span);
    for in_d in 0..span {
        for k in g.lo()..=g.hi() {
            let out_d = in_d as i64 + k;
            if out_d >= 0 && (out_d as usize) < span {
                let c = g.coeff(k);
                for r in 0..n {
                    for s in 0..n {
                        m[((out_d as usize) * n + r, in_d * n + s)] = c[(r, s)];
                    }
                }
            }
        }
    }
    m
}

/// Check σ̂-fixedness and B-isometry of a loop side by side; the verdicts
/// must agree. Probes B with `pairs` random finitely-supported vectors
/// (exact evaluation, no truncation involved).
pub fn isometry_iff_sigma(
    g: &LaurentMatrix,
    rng: &mut impl rand::Rng,
    pairs: usize,
    tol: f64,
) -> Report {
    let mut rep = Report::new("isometry_iff_sigma");
    let sigma = laurent::membership(g, laurent::LoopClass::SigmaGroup, tol);
    rep.check("sigma_fixedness_residual", sigma.residual, tol);

    let n = g.size();
    let mut b_res = 0.0f64;
    for _ in 0..pairs {
        let f = random_vector_in_band(rng, n, -2, 2);
        let h = random_vector_in_band(rng, n, -2, 2);
        let before = krein_form(&f, &h).unwrap();
        let gf = multiply_vector(g, &f).unwrap();
        let gh = multiply_vector(g, &h).unwrap();
        let after = krein_form(&gf, &gh).unwrap();
        b_res = b_res.max((after - before).norm());
    }
    rep.check("b_isometry_residual", b_res, tol);
    let agree = (sigma.residual <= tol) == (b_res <= tol);
    rep.check_flag("verdicts_agree", agree);
    rep
}

fn random_vector_in_band(rng: &mut impl rand::Rng, n: usize, lo: i64, hi: i64) -> KreinVector {
    let coeffs = (lo..=hi)
        .map(|_| CVec::from_fn(n, |_, _| crate::sample::random_complex(rng, 1.0)))
        .collect();
    KreinVector::from_coeffs(lo, coeffs)
}
