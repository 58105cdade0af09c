//! Closed forms of the transformed potentials for the free particle and
//! the harmonic oscillator, with the chains that generate them.
//!
//! Two families also circulate with a different time factor. The
//! [`Form::Derived`] variant is the one the transformation engine
//! reproduces; [`Form::Printed`] keeps the other for comparison:
//!
//! * juxtaposed pair: prefactor `−2(1+t²)^{-1}` (derived) or `−2(1+t²)`;
//! * anharmonic oscillator: well depth `2λ² sin^{-2}(2ωt)` (derived) or
//!   `2λ² sin^{-1/2}(2ωt)`.
//!
//! The variants coincide at `t = 0` and at `sin 2ωt = 1` respectively.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::darboux::DarbouxChain;
use crate::error::{Error, Result};
use crate::numerics::{Interval, PotentialField, SolutionOracle};
use crate::seeds::{free_particle_solution, oscillator_nonstationary_seed};
use crate::specfun::{f_poly_derivs, j_poly_derivs, q_poly};

/// Largest `k` or `n` the free families are validated for.
pub const MAX_FREE_INDEX: usize = 6;
/// Largest odd index `l` of the even/odd pair family.
pub const MAX_PAIR_INDEX: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    #[default]
    Derived,
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PotentialFamily {
    FreeEvenK { k: usize },
    FreeOddK { k: usize },
    FreeJuxtaposedN { n: usize },
    FreeEvenoddMl { m: usize, l: usize },
    OscillatorAnharmonic { lambda: f64, omega: f64 },
}

fn s2(t: f64) -> f64 {
    1.0 + t * t
}

fn z_of(x: f64, t: f64) -> f64 {
    x / s2(t).sqrt()
}

fn q(k: usize, z: f64) -> f64 {
    q_poly(k as i32, z).expect("nonnegative degree")
}

/// `−(1+t²)^{-1}(1 + 2n(n−1) q_{n−2}/q_n − 2n² (q_{n−1}/q_n)²)`, the
/// potential generated by the single seed `ψ_{n+1/2}`.
fn single_seed(n: usize, x: f64, t: f64) -> f64 {
    let z = z_of(x, t);
    let qn = q(n, z);
    let nf = n as f64;
    let curvature = if n >= 2 { 2.0 * nf * (nf - 1.0) * q(n - 2, z) / qn } else { 0.0 };
    let slope = if n >= 1 { q(n - 1, z) / qn } else { 0.0 };
    -(1.0 + curvature - 2.0 * nf * nf * slope * slope) / s2(t)
}

/// Even-index free family `v^{(2k)}`, regular on the whole line.
pub fn free_even(k: usize, x: f64, t: f64) -> Result<f64> {
    PotentialFamily::FreeEvenK { k }.validate()?;
    Ok(single_seed(2 * k, x, t))
}

/// Odd-index free family `v^{(2k+1)}` on `x > 0`; `+2/x²` barrier at the origin.
pub fn free_odd(k: usize, x: f64, t: f64) -> Result<f64> {
    PotentialFamily::FreeOddK { k }.validate()?;
    if !(x > 0.0) {
        return Err(Error::domain(format!(
            "the odd free family lives on x > 0, got x = {x}"
        )));
    }
    Ok(single_seed(2 * k + 1, x, t))
}

/// `−2(1+t²)^{∓1}[J_n''/J_n − (J_n'/J_n)² − 1]`, regular for every `n`.
pub fn free_juxtaposed(n: usize, x: f64, t: f64, form: Form) -> Result<f64> {
    PotentialFamily::FreeJuxtaposedN { n }.validate()?;
    let [j, dj, d2j] = j_poly_derivs(n as i32, z_of(x, t))?;
    let bracket = d2j / j - (dj / j).powi(2) - 1.0;
    let prefactor = match form {
        Form::Derived => -2.0 / s2(t),
        Form::Printed => -2.0 * s2(t),
    };
    Ok(prefactor * bracket)
}

/// `−2(1+t²)^{-1}(1 + (log f_ml)'')` for `m` even and `l > m` odd.
pub fn free_evenodd(m: usize, l: usize, x: f64, t: f64) -> Result<f64> {
    PotentialFamily::FreeEvenoddMl { m, l }.validate()?;
    let [f, df, d2f] = f_poly_derivs(m as i32, l as i32, z_of(x, t))?;
    Ok(-2.0 * (1.0 + d2f / f - (df / f).powi(2)) / s2(t))
}

/// `ω²x² − 2λ² sin^{-p}(2ωt) sech²(λx / sin 2ωt)` with `p = 2` (derived) or
/// `p = 1/2`, for `sin 2ωt > 0`.
pub fn oscillator_anharmonic(lambda: f64, omega: f64, x: f64, t: f64, form: Form) -> Result<f64> {
    PotentialFamily::OscillatorAnharmonic { lambda, omega }.validate()?;
    let s = (2.0 * omega * t).sin();
    if !(s > 0.0) {
        return Err(Error::Singular {
            x,
            t,
            reason: format!("sin(2 omega t) = {s} is not positive"),
        });
    }
    let depth = match form {
        Form::Derived => s.powi(-2),
        Form::Printed => s.powf(-0.5),
    };
    let sech = 1.0 / (lambda * x / s).cosh();
    Ok(omega * omega * x * x - 2.0 * lambda * lambda * depth * sech * sech)
}

impl PotentialFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialFamily::FreeEvenK { .. } => "free-even-k",
            PotentialFamily::FreeOddK { .. } => "free-odd-k",
            PotentialFamily::FreeJuxtaposedN { .. } => "free-juxtaposed-n",
            PotentialFamily::FreeEvenoddMl { .. } => "free-evenodd-ml",
            PotentialFamily::OscillatorAnharmonic { .. } => "oscillator-anharmonic",
        }
    }

    /// Checks the parameters against the validated ranges.
    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialFamily::FreeEvenK { k: i }
            | PotentialFamily::FreeOddK { k: i }
            | PotentialFamily::FreeJuxtaposedN { n: i } => {
                if i > MAX_FREE_INDEX {
                    return Err(Error::domain(format!(
                        "{} index {i} exceeds the validated maximum {MAX_FREE_INDEX}",
                        self.name()
                    )));
                }
            }
            PotentialFamily::FreeEvenoddMl { m, l } => {
                if m % 2 != 0 || l % 2 != 1 || l <= m || l > MAX_PAIR_INDEX {
                    return Err(Error::domain(format!(
                        "free-evenodd-ml needs m even, l odd, m < l <= {MAX_PAIR_INDEX}; got ({m}, {l})"
                    )));
                }
            }
            PotentialFamily::OscillatorAnharmonic { lambda, omega } => {
                if !(omega > 0.0) || !omega.is_finite() || !lambda.is_finite() {
                    return Err(Error::domain(format!(
                        "oscillator-anharmonic needs finite lambda and omega > 0; got ({lambda}, {omega})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> Interval {
        match self {
            PotentialFamily::FreeOddK { .. } => Interval::positive_half_line(),
            _ => Interval::real_line(),
        }
    }

    pub fn evaluate(&self, x: f64, t: f64, form: Form) -> Result<f64> {
        match *self {
            PotentialFamily::FreeEvenK { k } => free_even(k, x, t),
            PotentialFamily::FreeOddK { k } => free_odd(k, x, t),
            PotentialFamily::FreeJuxtaposedN { n } => free_juxtaposed(n, x, t, form),
            PotentialFamily::FreeEvenoddMl { m, l } => free_evenodd(m, l, x, t),
            PotentialFamily::OscillatorAnharmonic { lambda, omega } => {
                oscillator_anharmonic(lambda, omega, x, t, form)
            }
        }
    }

    /// Background potential the family decays to as `|x| → ∞`.
    pub fn background(&self, x: f64) -> f64 {
        match *self {
            PotentialFamily::OscillatorAnharmonic { omega, .. } => omega * omega * x * x,
            _ => 0.0,
        }
    }

    /// Transformation functions that generate the family.
    pub fn seeds(&self) -> Result<Vec<Arc<dyn SolutionOracle>>> {
        self.validate()?;
        let free = |lambda: f64| -> Result<Arc<dyn SolutionOracle>> {
            Ok(Arc::new(free_particle_solution(lambda)?))
        };
        Ok(match *self {
            PotentialFamily::FreeEvenK { k } => vec![free(2.0 * k as f64 + 0.5)?],
            PotentialFamily::FreeOddK { k } => vec![free(2.0 * k as f64 + 1.5)?],
            PotentialFamily::FreeJuxtaposedN { n } => {
                vec![free(-(n as f64) - 0.5)?, free(-(n as f64) - 1.5)?]
            }
            PotentialFamily::FreeEvenoddMl { m, l } => {
                vec![free(m as f64 + 0.5)?, free(l as f64 + 0.5)?]
            }
            PotentialFamily::OscillatorAnharmonic { lambda, omega } => {
                vec![Arc::new(oscillator_nonstationary_seed(lambda, omega)?)]
            }
        })
    }

    /// The Crum chain whose transformed potential the closed form expresses.
    pub fn engine_chain(&self) -> Result<Arc<DarbouxChain>> {
        let t_ref = match *self {
            PotentialFamily::OscillatorAnharmonic { omega, .. } => {
                std::f64::consts::PI / (4.0 * omega)
            }
            _ => 0.0,
        };
        DarbouxChain::with_probes(self.seeds()?, t_ref, self.domain().probe_points().to_vec())
    }

    pub fn field(&self, form: Form) -> Result<FamilyPotential> {
        self.validate()?;
        Ok(FamilyPotential { family: *self, form })
    }
}

/// A closed-form family as a [`PotentialField`].
#[derive(Debug, Clone, Copy)]
pub struct FamilyPotential {
    family: PotentialFamily,
    form: Form,
}

impl FamilyPotential {
    pub fn family(&self) -> PotentialFamily {
        self.family
    }
}

impl PotentialField for FamilyPotential {
    fn value(&self, x: f64, t: f64) -> Result<f64> {
        self.family.evaluate(x, t, self.form)
    }

    fn domain(&self) -> Interval {
        self.family.domain()
    }

    fn label(&self) -> String {
        format!("{:?}[{:?}]", self.family, self.form)
    }

    fn is_stationary(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::transformed_potential;
    use crate::specfun::f_poly;

    #[test]
    fn documented_values() {
        for &t in &[0.0, 0.5, 1.7] {
            for &x in &[-2.0, 0.0, 3.0] {
                assert!((free_even(0, x, t).unwrap() + 1.0 / s2(t)).abs() < 1e-15);
                assert!((free_juxtaposed(0, x, t, Form::Derived).unwrap() - 2.0 / s2(t)).abs() < 1e-14);
                assert!((free_evenodd(0, 1, x, t).unwrap() + 2.0 / s2(t)).abs() < 1e-14);
            }
        }
        assert!((free_even(1, 0.0, 0.0).unwrap() + 5.0).abs() < 1e-15);
        assert!((free_juxtaposed(0, 0.4, 0.0, Form::Printed).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn free_odd_ground_member_and_barrier() {
        let t: f64 = 0.8;
        for &x in &[0.3, 1.0, 4.0] {
            let z = z_of(x, t);
            let expected = -(1.0 - 2.0 / (z * z)) / s2(t);
            assert!((free_odd(0, x, t).unwrap() - expected).abs() < 1e-13);
        }
        let x = 1e-4;
        assert!((free_odd(0, x, t).unwrap() * x * x - 2.0).abs() < 1e-6);
        assert!(free_odd(0, 0.0, t).is_err());
        assert!(free_odd(0, -1.0, t).is_err());
    }

    #[test]
    fn evenodd_origin_value_from_polynomial_arithmetic() {
        // f₀₃ = q₄ − q₃ q₁ = (z⁴ + 6z² + 3) − (z³ + 3z) z = 3z² + 3
        let f = |z: f64| f_poly(0, 3, z).unwrap();
        assert!((f(0.0) - 3.0).abs() < 1e-14 && (f(1.0) - 6.0).abs() < 1e-13);
        // (log f)'' at 0 = f''/f = 6/3
        assert!((free_evenodd(0, 3, 0.0, 0.0).unwrap() + 2.0 * 3.0).abs() < 1e-13);
    }

    #[test]
    fn anharmonic_limits() {
        let (lambda, omega) = (0.9, 1.0);
        let t: f64 = 0.3;
        let s = (2.0 * t).sin();
        let v = oscillator_anharmonic(lambda, omega, 0.0, t, Form::Derived).unwrap();
        assert!((v + 2.0 * lambda * lambda / (s * s)).abs() < 1e-12);
        let flat = oscillator_anharmonic(0.0, omega, 1.5, t, Form::Derived).unwrap();
        assert_eq!(flat, 2.25);
        assert!(oscillator_anharmonic(lambda, omega, 0.0, 2.0, Form::Derived).is_err());
        let peak = std::f64::consts::PI / 4.0;
        let a = oscillator_anharmonic(lambda, omega, 0.7, peak, Form::Derived).unwrap();
        let b = oscillator_anharmonic(lambda, omega, 0.7, peak, Form::Printed).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn parameter_validation() {
        assert!(free_even(7, 0.0, 0.0).is_err());
        assert!(free_evenodd(1, 3, 0.0, 0.0).is_err());
        assert!(free_evenodd(2, 4, 0.0, 0.0).is_err());
        assert!(free_evenodd(4, 3, 0.0, 0.0).is_err());
        assert!(free_evenodd(0, 11, 0.0, 0.0).is_err());
        assert!(oscillator_anharmonic(1.0, -1.0, 0.0, 0.3, Form::Derived).is_err());
    }

    #[test]
    fn closed_forms_match_engine_at_sample_points() {
        let cases = [
            (PotentialFamily::FreeEvenK { k: 2 }, vec![(-1.3, 0.4), (2.2, 1.6)]),
            (PotentialFamily::FreeOddK { k: 1 }, vec![(0.7, 0.4), (3.2, 1.6)]),
            (PotentialFamily::FreeJuxtaposedN { n: 3 }, vec![(-1.3, 0.4), (2.2, 1.6)]),
            (PotentialFamily::FreeEvenoddMl { m: 2, l: 5 }, vec![(-1.3, 0.4), (2.2, 1.6)]),
            (
                PotentialFamily::OscillatorAnharmonic { lambda: 1.0, omega: 1.0 },
                vec![(-1.3, 0.3), (2.2, 0.55)],
            ),
        ];
        for (family, points) in cases {
            let chain = family.engine_chain().unwrap();
            for (x, t) in points {
                let engine = transformed_potential(&chain, x, t).unwrap();
                let closed = family.evaluate(x, t, Form::Derived).unwrap();
                assert!((engine - closed).abs() < 1e-9, "{family:?} at ({x}, {t}): {engine} vs {closed}");
            }
        }
    }

    #[test]
    fn printed_variants_disagree_with_engine_away_from_coincidence() {
        let jux = PotentialFamily::FreeJuxtaposedN { n: 1 };
        let chain = jux.engine_chain().unwrap();
        let engine = transformed_potential(&chain, 0.5, 1.0).unwrap();
        let printed = jux.evaluate(0.5, 1.0, Form::Printed).unwrap();
        assert!((engine - printed).abs() > 0.1);
        let anh = PotentialFamily::OscillatorAnharmonic { lambda: 1.0, omega: 1.0 };
        let chain = anh.engine_chain().unwrap();
        let engine = transformed_potential(&chain, 0.2, 0.3).unwrap();
        let printed = anh.evaluate(0.2, 0.3, Form::Printed).unwrap();
        assert!((engine - printed).abs() > 0.1);
    }
}
