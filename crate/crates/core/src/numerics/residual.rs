use num_complex::Complex64;
use serde::Serialize;

use super::field::{JetField, PotentialField, I};
use super::grid::SpaceTimeGrid;
use super::stencil::central_first;
use crate::error::{Error, Result};

/// Maximum of a pointwise residual over a set of nodes.
///
/// `scale` is the largest modulus of the checked function over the same
/// nodes, so `relative()` is the residual of the function normalised to unit
/// sup-norm: the figure that does not depend on an arbitrary normalisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub max_abs: f64,
    pub scale: f64,
    pub worst_x: f64,
    pub worst_t: f64,
}

impl Residual {
    pub fn zero() -> Self {
        Residual {
            max_abs: 0.0,
            scale: 0.0,
            worst_x: f64::NAN,
            worst_t: f64::NAN,
        }
    }

    pub fn relative(&self) -> f64 {
        if self.max_abs == 0.0 {
            0.0
        } else if self.scale == 0.0 {
            f64::INFINITY
        } else {
            self.max_abs / self.scale
        }
    }

    /// Folds one pointwise sample into the running maximum.
    pub fn record(&mut self, x: f64, t: f64, residual: f64, magnitude: f64) {
        if residual > self.max_abs || (self.max_abs == 0.0 && self.worst_x.is_nan()) {
            self.max_abs = residual;
            self.worst_x = x;
            self.worst_t = t;
        }
        self.scale = self.scale.max(magnitude);
    }

    /// Componentwise maximum, keeping the location of the larger residual.
    pub fn max(self, other: Residual) -> Residual {
        let mut out = if other.max_abs > self.max_abs { other } else { self };
        out.scale = self.scale.max(other.scale);
        out
    }

    /// Maximum of the relative residuals of independently scaled checks.
    pub fn worst_relative<I: IntoIterator<Item = Residual>>(items: I) -> f64 {
        items.into_iter().map(|r| r.relative()).fold(0.0, f64::max)
    }
}

/// `max |i ∂ₜψ − (−∂²ₓψ + Uψ)|` over the interior nodes of `grid`.
///
/// `∂ₜ` is the second-order central difference with the grid's time step;
/// `∂²ₓ` comes from the oracle's exact derivatives.
pub fn fd_schrodinger_residual(
    psi: &dyn JetField,
    potential: &dyn PotentialField,
    grid: &SpaceTimeGrid,
) -> Result<Residual> {
    if psi.max_order() < 2 {
        return Err(Error::capability(
            format!("Schrödinger residual of {}", psi.label()),
            2,
            psi.max_order(),
        ));
    }
    if !grid.has_interior() {
        return Err(Error::Grid(format!(
            "finite-difference residuals need at least {} nodes per axis",
            super::grid::MIN_STENCIL_NODES
        )));
    }
    let tau = grid.tau();
    let mut out = Residual::zero();
    for (x, t) in grid.interior() {
        let jet = psi.jet(x, t, 2)?;
        let u = potential.value(x, t)?;
        let minus = psi.value(x, t - tau)?;
        let plus = psi.value(x, t + tau)?;
        let dt = central_first(minus, plus, tau);
        let h_psi: Complex64 = -jet.derivative(2) + jet.value() * u;
        let r = (I * dt - h_psi).norm();
        out.record(x, t, r, jet.value().norm());
    }
    Ok(out)
}

/// Residuals at the grid's time step and at half of it, with their ratio.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvergenceCheck {
    pub coarse: Residual,
    pub fine: Residual,
    pub ratio: f64,
}

pub fn residual_convergence(
    psi: &dyn JetField,
    potential: &dyn PotentialField,
    grid: &SpaceTimeGrid,
) -> Result<ConvergenceCheck> {
    let coarse = fd_schrodinger_residual(psi, potential, grid)?;
    let half = grid.clone().with_time_step(grid.tau() / 2.0)?;
    let fine = fd_schrodinger_residual(psi, potential, &half)?;
    let ratio = if fine.max_abs == 0.0 {
        if coarse.max_abs == 0.0 {
            f64::NAN
        } else {
            f64::INFINITY
        }
    } else {
        coarse.max_abs / fine.max_abs
    };
    Ok(ConvergenceCheck { coarse, fine, ratio })
}
