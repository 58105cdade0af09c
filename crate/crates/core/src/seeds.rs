//! Analytic solutions used as transformation functions and test states.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    FreePotential, HarmonicPotential, Jet, JetField, PotentialField, SolutionOracle,
    ANALYTIC_ORDER_CAP,
};
use crate::specfun::{poly_jet, PolyKind};

fn check_order(label: impl FnOnce() -> String, order: usize) -> Result<()> {
    if order > ANALYTIC_ORDER_CAP {
        return Err(Error::capability(label(), order, ANALYTIC_ORDER_CAP));
    }
    Ok(())
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * j as f64)
}

/// Free-particle solution
/// `ψ_λ = (1+t²)^{-1/4} exp[i x² t/(4+4t²) + iλ arctan t] Q_λ(z)`,
/// `z = x (1+t²)^{-1/2}`, for half-integer `λ`.
///
/// * `λ = n + ½`: `Q = e^{z²/4} q_n(z)`; nodeless on ℝ for even `n`.
/// * `λ = −n − ½`: `Q = e^{−z²/4} He_n(z)`; square integrable with `n` nodes.
///
/// `q_n` differs from `H_n(iz/√2)` by the constant `(√2 i)^n`, which does
/// not affect any transformation built from the seed.
#[derive(Debug, Clone)]
pub struct FreeParticleSolution {
    n: usize,
    growing: bool,
    potential: Arc<dyn PotentialField>,
}

pub fn free_particle_solution(lambda: f64) -> Result<FreeParticleSolution> {
    let twice = 2.0 * lambda;
    let rounded = twice.round();
    if !lambda.is_finite() || (twice - rounded).abs() > 1e-12 || (rounded as i64) % 2 == 0 {
        return Err(Error::Unsupported(format!(
            "free-particle seeds are implemented for half-integer lambda only, got {lambda}"
        )));
    }
    let n = ((rounded.abs() as usize) - 1) / 2;
    Ok(FreeParticleSolution {
        n,
        growing: rounded > 0.0,
        potential: Arc::new(FreePotential),
    })
}

impl FreeParticleSolution {
    pub fn lambda(&self) -> f64 {
        let mag = self.n as f64 + 0.5;
        if self.growing {
            mag
        } else {
            -mag
        }
    }

    pub fn index(&self) -> usize {
        self.n
    }

    pub fn is_square_integrable(&self) -> bool {
        !self.growing
    }

    /// `∫|ψ|² dx = √(2π) n!` for the square-integrable branch (conserved in t).
    pub fn norm_squared(&self) -> Option<f64> {
        (!self.growing).then(|| (2.0 * PI).sqrt() * factorial(self.n))
    }
}

impl JetField for FreeParticleSolution {
    fn jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        check_order(|| self.label(), order)?;
        let s2 = 1.0 + t * t;
        let xv = Jet::variable(x, order);
        let z = &xv * (1.0 / s2.sqrt());
        let envelope = if self.growing { 0.25 } else { -0.25 };
        let quad = Complex64::new(envelope / s2, 0.25 * t / s2);
        let exponent = (&xv * &xv).scale(quad);
        let kind = if self.growing { PolyKind::Q } else { PolyKind::He };
        let poly = poly_jet(kind, self.n, &z);
        let prefactor = Complex64::from_polar(s2.powf(-0.25), self.lambda() * t.atan());
        Ok((&exponent.exp() * &poly).scale(prefactor))
    }

    fn max_order(&self) -> usize {
        ANALYTIC_ORDER_CAP
    }

    fn label(&self) -> String {
        format!("free(lambda={})", self.lambda())
    }
}

impl SolutionOracle for FreeParticleSolution {
    fn potential(&self) -> Arc<dyn PotentialField> {
        self.potential.clone()
    }

    fn node_count(&self) -> Option<usize> {
        Some(if self.growing { self.n % 2 } else { self.n })
    }
}

/// Oscillator eigenstate `ψ_n = H_n(√ω x) exp(−iω(2n+1)t − ωx²/2)` of
/// `H = −∂²ₓ + ω²x²`, eigenvalue `ω(2n+1)`.
#[derive(Debug, Clone)]
pub struct OscillatorEigenstate {
    n: usize,
    omega: f64,
    potential: Arc<dyn PotentialField>,
}

pub fn oscillator_eigenstate(n: i32, omega: f64) -> Result<OscillatorEigenstate> {
    let n = usize::try_from(n).map_err(|_| Error::domain(format!("level must be >= 0, got {n}")))?;
    let potential = HarmonicPotential::new(omega)?;
    Ok(OscillatorEigenstate {
        n,
        omega,
        potential: Arc::new(potential),
    })
}

impl OscillatorEigenstate {
    pub fn level(&self) -> usize {
        self.n
    }

    pub fn energy(&self) -> f64 {
        self.omega * (2 * self.n + 1) as f64
    }

    /// `∫|ψ_n|² dx = 2ⁿ n! √(π/ω)`.
    pub fn norm_squared(&self) -> f64 {
        2f64.powi(self.n as i32) * factorial(self.n) * (PI / self.omega).sqrt()
    }
}

impl JetField for OscillatorEigenstate {
    fn jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        check_order(|| self.label(), order)?;
        let xv = Jet::variable(x, order);
        let y = &xv * self.omega.sqrt();
        let gauss = (&(&xv * &xv) * (-0.5 * self.omega)).exp();
        let phase = Complex64::from_polar(1.0, -self.energy() * t);
        Ok((&poly_jet(PolyKind::H, self.n, &y) * &gauss).scale(phase))
    }

    fn max_order(&self) -> usize {
        ANALYTIC_ORDER_CAP
    }

    fn label(&self) -> String {
        format!("oscillator-eigen(n={}, omega={})", self.n, self.omega)
    }
}

impl SolutionOracle for OscillatorEigenstate {
    fn potential(&self) -> Arc<dyn PotentialField> {
        self.potential.clone()
    }

    fn eigenvalue(&self) -> Option<f64> {
        Some(self.energy())
    }

    fn node_count(&self) -> Option<usize> {
        Some(self.n)
    }
}

/// Non-normalisable stationary oscillator solution
/// `p_n(√ω x) exp(+ωx²/2 + iω(2n+1)t)`, `p_n(y) = (−i)ⁿ H_n(iy)`, with
/// eigenvalue `−ω(2n+1)` below the spectrum. Nodeless for even `n`, and
/// `1/u` is square integrable, which makes it a transformation function
/// for which the integral inverse of the transformation operator exists.
#[derive(Debug, Clone)]
pub struct OscillatorGrowingState {
    n: usize,
    omega: f64,
    potential: Arc<dyn PotentialField>,
}

pub fn oscillator_growing_state(n: i32, omega: f64) -> Result<OscillatorGrowingState> {
    let n = usize::try_from(n).map_err(|_| Error::domain(format!("level must be >= 0, got {n}")))?;
    let potential = HarmonicPotential::new(omega)?;
    Ok(OscillatorGrowingState {
        n,
        omega,
        potential: Arc::new(potential),
    })
}

impl OscillatorGrowingState {
    pub fn energy(&self) -> f64 {
        -self.omega * (2 * self.n + 1) as f64
    }
}

impl JetField for OscillatorGrowingState {
    fn jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        check_order(|| self.label(), order)?;
        let xv = Jet::variable(x, order);
        let y = &xv * self.omega.sqrt();
        let envelope = (&(&xv * &xv) * (0.5 * self.omega)).exp();
        let phase = Complex64::from_polar(1.0, -self.energy() * t);
        Ok((&poly_jet(PolyKind::P, self.n, &y) * &envelope).scale(phase))
    }

    fn max_order(&self) -> usize {
        ANALYTIC_ORDER_CAP
    }

    fn label(&self) -> String {
        format!("oscillator-growing(n={}, omega={})", self.n, self.omega)
    }
}

impl SolutionOracle for OscillatorGrowingState {
    fn potential(&self) -> Arc<dyn PotentialField> {
        self.potential.clone()
    }

    fn eigenvalue(&self) -> Option<f64> {
        Some(self.energy())
    }

    fn node_count(&self) -> Option<usize> {
        Some(self.n % 2)
    }
}

/// Nonstationary oscillator solution
/// `u = sin^{-1/2}(2ωt) cosh(λx / sin 2ωt) exp[i(ωx² − λ²/ω) cot(2ωt)/2]`,
/// defined while `sin(2ωt) > 0`. Nodeless in `x`, not square integrable.
#[derive(Debug, Clone)]
pub struct OscillatorNonstationarySeed {
    lambda: f64,
    omega: f64,
    potential: Arc<dyn PotentialField>,
}

pub fn oscillator_nonstationary_seed(lambda: f64, omega: f64) -> Result<OscillatorNonstationarySeed> {
    if !lambda.is_finite() {
        return Err(Error::domain(format!("lambda must be finite, got {lambda}")));
    }
    let potential = HarmonicPotential::new(omega)?;
    Ok(OscillatorNonstationarySeed {
        lambda,
        omega,
        potential: Arc::new(potential),
    })
}

impl OscillatorNonstationarySeed {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// A time where `sin(2ωt) = 1`.
    pub fn peak_time(&self) -> f64 {
        PI / (4.0 * self.omega)
    }
}

impl JetField for OscillatorNonstationarySeed {
    fn jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        check_order(|| self.label(), order)?;
        let (s, c) = (2.0 * self.omega * t).sin_cos();
        if s <= 0.0 {
            return Err(Error::Singular {
                x,
                t,
                reason: format!("sin(2 omega t) = {s} is not positive"),
            });
        }
        let cot = c / s;
        let xv = Jet::variable(x, order);
        let profile = (&xv * (self.lambda / s)).cosh();
        let w = self.omega;
        let chirp = (&(&xv * &xv) * w)
            .scale(Complex64::new(0.0, 0.5 * cot))
            .exp();
        let constant = Complex64::from_polar(
            s.powf(-0.5),
            -0.5 * cot * self.lambda * self.lambda / w,
        );
        Ok((&profile * &chirp).scale(constant))
    }

    fn max_order(&self) -> usize {
        ANALYTIC_ORDER_CAP
    }

    fn label(&self) -> String {
        format!(
            "oscillator-nonstationary(lambda={}, omega={})",
            self.lambda, self.omega
        )
    }
}

impl SolutionOracle for OscillatorNonstationarySeed {
    fn potential(&self) -> Arc<dyn PotentialField> {
        self.potential.clone()
    }

    fn node_count(&self) -> Option<usize> {
        Some(0)
    }
}

/// Serializable description of a cataloged seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SeedSpec {
    FreeLambda { lambda: f64 },
    OscillatorEigen { n: i32, omega: f64 },
    OscillatorNonstationary { lambda: f64, omega: f64 },
    OscillatorGrowing { n: i32, omega: f64 },
}

impl SeedSpec {
    pub fn build(&self) -> Result<Arc<dyn SolutionOracle>> {
        Ok(match *self {
            SeedSpec::FreeLambda { lambda } => Arc::new(free_particle_solution(lambda)?),
            SeedSpec::OscillatorEigen { n, omega } => Arc::new(oscillator_eigenstate(n, omega)?),
            SeedSpec::OscillatorNonstationary { lambda, omega } => {
                Arc::new(oscillator_nonstationary_seed(lambda, omega)?)
            }
            SeedSpec::OscillatorGrowing { n, omega } => {
                Arc::new(oscillator_growing_state(n, omega)?)
            }
        })
    }

    pub fn family(&self) -> &'static str {
        match self {
            SeedSpec::FreeLambda { .. } => "free-lambda",
            SeedSpec::OscillatorEigen { .. } => "oscillator-eigen",
            SeedSpec::OscillatorNonstationary { .. } => "oscillator-nonstationary",
            SeedSpec::OscillatorGrowing { .. } => "oscillator-growing",
        }
    }

    /// Analytic zero count in `x` on the real line.
    pub fn node_count(&self) -> Result<usize> {
        self.build()?
            .node_count()
            .ok_or_else(|| Error::Unsupported("node count unknown".into()))
    }

    /// The seed's frequency, for oscillator families.
    pub fn omega(&self) -> Option<f64> {
        match *self {
            SeedSpec::FreeLambda { .. } => None,
            SeedSpec::OscillatorEigen { omega, .. }
            | SeedSpec::OscillatorNonstationary { omega, .. }
            | SeedSpec::OscillatorGrowing { omega, .. } => Some(omega),
        }
    }
}

/// Every seed the verification suites exercise: free `λ = ±(n+½)` for
/// `n ≤ 6`, oscillator eigenstates `n ≤ 4` at `ω = 1`, and the nonstationary
/// oscillator seed at `λ = 1`, `ω = 1`.
pub fn catalog() -> Vec<SeedSpec> {
    let mut out = Vec::new();
    for n in 0..=6 {
        out.push(SeedSpec::FreeLambda { lambda: n as f64 + 0.5 });
        out.push(SeedSpec::FreeLambda { lambda: -(n as f64) - 0.5 });
    }
    for n in 0..=4 {
        out.push(SeedSpec::OscillatorEigen { n, omega: 1.0 });
    }
    out.push(SeedSpec::OscillatorNonstationary {
        lambda: 1.0,
        omega: 1.0,
    });
    out
}
