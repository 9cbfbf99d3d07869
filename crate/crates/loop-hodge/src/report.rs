//! Named residuals with tolerances and verdicts, and the convention
//! ledger that all signed quantities in this crate refer to.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Version tag of the convention ledger below. Embedded in every report
/// so that signed numbers are never quoted without their conventions.
pub const LEDGER_VERSION: &str = "ledger-v1";

/// The convention ledger. Every signed or gauge-dependent quantity in the
/// crate is stated relative to these choices:
///
/// 1. Circle integrals use the invariant measure of total mass 1;
///    quadrature is the trapezoid rule on a uniform θ-grid, exact for
///    trigonometric polynomials below the aliasing limit.
/// 2. Base orientation: dz∧dz̄ = −2i dx∧dy, volume form dx∧dy.
///    Curvature is F = dA + A∧A for a connection d + A; under this
///    ledger the abelian field A = z dz̄ has F_{zz̄} = +1.
/// 3. Hitchin energy density against dx∧dy is −Tr(Θ Θ*)/2π per complex
///    axis; on the unit-area square torus the rank-1 field Θ = t
///    integrates to −|t|²/2π.
/// 4. Transport solves dP = −A_λ(γ′) P with P(start) = I, where
///    A_λ = A + λ⁻¹Θ dz + λΘ* dz̄. The logarithmic differential
///    ζ := (dP) P⁻¹ equals −A_λ, so the Higgs field is recovered as
///    Θ = −(ζ_z)₋₁.
/// 5. Period cosets are gauge-fixed by the polar decomposition of the
///    degree-0 coefficient g₀ = H·U: the representative is g·U*, whose
///    degree-0 coefficient is Hermitian positive-definite.
/// 6. σ̂ acts on the algebra by σ̂(ξ)ₙ = (−1)ⁿσ(a₋ₙ) with σ(X) = −X*,
///    and on the group pointwise by γ(λ) ↦ (γ(−λ)*)⁻¹.
/// 7. The closed cocycle form ω(ξ,η) = −Σₙ n·Tr(aₙ b₋ₙ) is gated behind
///    a startup self-test against quadrature of (i/2π)∫⟨ξ, η′⟩ dθ.
/// 8. Horizontal curvature: iβ(f, Jf) = −½(Tr(a₁a₁*) + Tr(a₋₁a₋₁*));
///    the magnitude constant is c = ½ and the common sign is negative.
///    Definiteness and magnitude are asserted; the sign is recorded, not
///    asserted against any external source.
/// 9. Under 1–5 the energy–curvature proportionality constant is 1.
pub mod ledger {
    /// Magnitude constant in |iβ(f, Jf)| = c·(Tr(a₁a₁*) + Tr(a₋₁a₋₁*)).
    /// Fixed once by quadrature (see the acceptance suite) and recorded.
    pub const HORIZONTAL_CURVATURE_C: f64 = 0.5;
    /// Common sign of iβ(f, Jf) over horizontal directions.
    pub const HORIZONTAL_CURVATURE_SIGN: f64 = -1.0;
    /// Expected ratio of Hitchin energy density to the pulled-back
    /// determinant-line curvature (i/2π)β_D.
    pub const ENERGY_CURVATURE_RATIO: f64 = 1.0;
}

/// How a recorded value relates to its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    /// Residual: must stay at or below the tolerance.
    AtMost,
    /// Bounded quantity: must stay at or above the tolerance.
    AtLeast,
    /// Informational only; never affects the verdict.
    Info,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub sense: Sense,
    pub pass: bool,
}

/// A named bundle of residuals with tolerances and verdicts.
///
/// Deterministic given the same inputs: parameters are kept sorted and
/// rendering is fixed-format. The runtime field is the only
/// run-dependent part.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub parameters: BTreeMap<String, String>,
    pub entries: Vec<ResidualEntry>,
    pub notes: Vec<String>,
    pub ledger_version: String,
    pub tool_version: String,
    pub runtime_ms: u128,
}

impl Report {
    pub fn new(scenario: impl Into<String>) -> Self {
        Report {
            scenario: scenario.into(),
            parameters: BTreeMap::new(),
            entries: Vec::new(),
            notes: Vec::new(),
            ledger_version: LEDGER_VERSION.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            runtime_ms: 0,
        }
    }

    pub fn param(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.into(), value.to_string());
        self
    }

    /// Record a residual that must stay at or below `tolerance`.
    pub fn check(&mut self, name: impl Into<String>, value: f64, tolerance: f64) -> &mut Self {
        let pass = value.is_finite() && value <= tolerance;
        self.entries.push(ResidualEntry {
            name: name.into(),
            value,
            tolerance,
            sense: Sense::AtMost,
            pass,
        });
        self
    }

    /// Record a quantity that must stay at or above `bound`.
    pub fn check_lower(&mut self, name: impl Into<String>, value: f64, bound: f64) -> &mut Self {
        let pass = value.is_finite() && value >= bound;
        self.entries.push(ResidualEntry {
            name: name.into(),
            value,
            tolerance: bound,
            sense: Sense::AtLeast,
            pass,
        });
        self
    }

    /// Record a boolean verdict (value 0 = pass, 1 = fail).
    pub fn check_flag(&mut self, name: impl Into<String>, ok: bool) -> &mut Self {
        self.entries.push(ResidualEntry {
            name: name.into(),
            value: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            sense: Sense::AtMost,
            pass: ok,
        });
        self
    }

    /// Record an informational value that does not affect the verdict.
    pub fn info(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.entries.push(ResidualEntry {
            name: name.into(),
            value,
            tolerance: f64::INFINITY,
            sense: Sense::Info,
            pass: true,
        });
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.value)
    }

    pub fn entry(&self, name: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Fold another report's entries in under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: &Report) -> &mut Self {
        for e in &other.entries {
            self.entries.push(ResidualEntry {
                name: format!("{prefix}.{}", e.name),
                ..e.clone()
            });
        }
        for n in &other.notes {
            self.notes.push(format!("{prefix}: {n}"));
        }
        self
    }

    /// Structured-text rendering. Every line except `runtime_ms` is
    /// deterministic for a fixed (config, seed).
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario: {}", self.scenario);
        let _ = writeln!(out, "ledger: {}", self.ledger_version);
        let _ = writeln!(out, "tool_version: {}", self.tool_version);
        for (k, v) in &self.parameters {
            let _ = writeln!(out, "param {k} = {v}");
        }
        for e in &self.entries {
            let verdict = if e.pass { "PASS" } else { "FAIL" };
            match e.sense {
                Sense::Info => {
                    let _ = writeln!(out, "info {} = {:.17e}", e.name, e.value);
                }
                Sense::AtMost => {
                    let _ = writeln!(
                        out,
                        "{verdict} {} = {:.17e} (<= {:.3e})",
                        e.name, e.value, e.tolerance
                    );
                }
                Sense::AtLeast => {
                    let _ = writeln!(
                        out,
                        "{verdict} {} = {:.17e} (>= {:.3e})",
                        e.name, e.value, e.tolerance
                    );
                }
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ = writeln!(
            out,
            "verdict: {}",
            if self.all_pass() { "PASS" } else { "FAIL" }
        );
        let _ = writeln!(out, "runtime_ms: {}", self.runtime_ms);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_and_lookup() {
        let mut r = Report::new("unit");
        r.check("small", 1e-13, 1e-12);
        r.check("big", 1.0, 1e-12);
        assert!(!r.all_pass());
        assert_eq!(r.value("small"), Some(1e-13));
        assert!(r.entry("big").map(|e| !e.pass).unwrap());
    }

    #[test]
    fn render_is_stable_apart_from_runtime() {
        let mut a = Report::new("unit");
        a.param("seed", 7).check("x", 0.0, 1.0);
        let mut b = a.clone();
        a.runtime_ms = 3;
        b.runtime_ms = 99;
        let strip = |s: String| {
            s.lines()
                .filter(|l| !l.starts_with("runtime_ms"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(strip(a.render_text()), strip(b.render_text()));
    }
}
