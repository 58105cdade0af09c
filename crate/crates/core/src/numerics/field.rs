//! Functions of `(x, t)` that expose exact x-derivatives through jets.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::grid::Interval;
use super::jet::Jet;
use crate::error::{Error, Result};

/// Highest derivative order analytic oracles are validated for.
pub const ANALYTIC_ORDER_CAP: usize = 40;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// A complex function of `(x, t)` with exact x-derivatives.
pub trait JetField: Send + Sync + fmt::Debug {
    /// Taylor jet in `x` at `(x, t)` carrying derivatives up to `order`.
    fn jet(&self, x: f64, t: f64, order: usize) -> Result<Jet>;

    fn max_order(&self) -> usize;

    fn label(&self) -> String;

    fn value(&self, x: f64, t: f64) -> Result<Complex64> {
        Ok(self.jet(x, t, 0)?.value())
    }

    fn dx(&self, k: usize, x: f64, t: f64) -> Result<Complex64> {
        if k > self.max_order() {
            return Err(Error::capability(self.label(), k, self.max_order()));
        }
        Ok(self.jet(x, t, k)?.derivative(k))
    }
}

/// Real potential energy `U(x, t)` in `H = -∂²ₓ + U`.
pub trait PotentialField: Send + Sync + fmt::Debug {
    fn value(&self, x: f64, t: f64) -> Result<f64>;

    /// Jet of `U` in `x`. Closed-form potentials without derivative support
    /// only answer `order == 0`.
    fn jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        if order > 0 {
            return Err(Error::capability(self.label(), order, 0));
        }
        Ok(Jet::constant(Complex64::new(self.value(x, t)?, 0.0), 0))
    }

    fn domain(&self) -> Interval;

    fn label(&self) -> String;

    fn is_stationary(&self) -> bool;
}

/// A solution of `i∂ₜψ = (-∂²ₓ + U)ψ` for its attached potential.
pub trait SolutionOracle: JetField {
    fn potential(&self) -> Arc<dyn PotentialField>;

    /// Eigenvalue of the stationary Hamiltonian, when the solution has one.
    fn eigenvalue(&self) -> Option<f64> {
        None
    }

    /// Number of x-zeros on the potential's domain, when known analytically.
    fn node_count(&self) -> Option<usize> {
        None
    }

    /// `∂ₜψ` taken from the evolution equation itself.
    fn dt(&self, x: f64, t: f64) -> Result<Complex64> {
        let jet = self.jet(x, t, 2)?;
        let u = self.potential().value(x, t)?;
        let h_psi = -jet.derivative(2) + jet.value() * u;
        Ok(-I * h_psi)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FreePotential;

impl PotentialField for FreePotential {
    fn value(&self, _x: f64, _t: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn jet(&self, _x: f64, _t: f64, order: usize) -> Result<Jet> {
        Ok(Jet::zero(order))
    }

    fn domain(&self) -> Interval {
        Interval::real_line()
    }

    fn label(&self) -> String {
        "free".into()
    }

    fn is_stationary(&self) -> bool {
        true
    }
}

/// `U = ω² x²`.
#[derive(Debug, Clone, Copy)]
pub struct HarmonicPotential {
    omega: f64,
}

impl HarmonicPotential {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::domain(format!("oscillator frequency must be positive, got {omega}")));
        }
        Ok(HarmonicPotential { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

impl PotentialField for HarmonicPotential {
    fn value(&self, x: f64, _t: f64) -> Result<f64> {
        Ok(self.omega * self.omega * x * x)
    }

    fn jet(&self, x: f64, _t: f64, order: usize) -> Result<Jet> {
        let w2 = self.omega * self.omega;
        let var = Jet::variable(x, order);
        Ok(&(&var * &var) * w2)
    }

    fn domain(&self) -> Interval {
        Interval::real_line()
    }

    fn label(&self) -> String {
        format!("harmonic(omega={})", self.omega)
    }

    fn is_stationary(&self) -> bool {
        true
    }
}

/// The identically vanishing field.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl JetField for ZeroField {
    fn jet(&self, _x: f64, _t: f64, order: usize) -> Result<Jet> {
        Ok(Jet::zero(order))
    }

    fn max_order(&self) -> usize {
        usize::MAX
    }

    fn label(&self) -> String {
        "0".into()
    }
}

/// The zero solution of a given equation.
#[derive(Debug, Clone)]
pub struct ZeroSolution {
    potential: Arc<dyn PotentialField>,
}

impl ZeroSolution {
    pub fn new(potential: Arc<dyn PotentialField>) -> Self {
        ZeroSolution { potential }
    }
}

impl JetField for ZeroSolution {
    fn jet(&self, _x: f64, _t: f64, order: usize) -> Result<Jet> {
        Ok(Jet::zero(order))
    }

    fn max_order(&self) -> usize {
        usize::MAX
    }

    fn label(&self) -> String {
        "0".into()
    }
}

impl SolutionOracle for ZeroSolution {
    fn potential(&self) -> Arc<dyn PotentialField> {
        self.potential.clone()
    }
}

/// `Σ cᵢ fᵢ` for arbitrary fields.
#[derive(Debug, Clone)]
pub struct FieldSum {
    terms: Vec<(Complex64, Arc<dyn JetField>)>,
}

impl FieldSum {
    pub fn new(terms: Vec<(Complex64, Arc<dyn JetField>)>) -> Self {
        FieldSum { terms }
    }
}

impl JetField for FieldSum {
    fn jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        let mut acc = Jet::zero(order);
        for (c, f) in &self.terms {
            acc += &f.jet(x, t, order)?.scale(*c);
        }
        Ok(acc)
    }

    fn max_order(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, f)| f.max_order())
            .min()
            .unwrap_or(usize::MAX)
    }

    fn label(&self) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, f)| format!("({c})·{}", f.label()))
            .collect();
        parts.join(" + ")
    }
}

/// Linear combination of solutions of one equation; again a solution.
#[derive(Debug, Clone)]
pub struct Superposition {
    terms: Vec<(Complex64, Arc<dyn SolutionOracle>)>,
    potential: Arc<dyn PotentialField>,
}

impl Superposition {
    pub fn new(terms: Vec<(Complex64, Arc<dyn SolutionOracle>)>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::domain("superposition needs at least one term"))?;
        let potential = first.1.potential();
        let label = potential.label();
        if terms.iter().any(|(_, s)| s.potential().label() != label) {
            return Err(Error::domain("superposed solutions must share one potential"));
        }
        Ok(Superposition { terms, potential })
    }
}

impl JetField for Superposition {
    fn jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        let mut acc = Jet::zero(order);
        for (c, f) in &self.terms {
            acc += &f.jet(x, t, order)?.scale(*c);
        }
        Ok(acc)
    }

    fn max_order(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, f)| f.max_order())
            .min()
            .unwrap_or(usize::MAX)
    }

    fn label(&self) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, f)| format!("({c})·{}", f.label()))
            .collect();
        parts.join(" + ")
    }
}

impl SolutionOracle for Superposition {
    fn potential(&self) -> Arc<dyn PotentialField> {
        self.potential.clone()
    }
}
