//! Time-dependent Darboux transformations and their Crum chains.
//!
//! A chain of transformation functions `u₁ … u_N` solving
//! `i uₜ = −uₓₓ + U₀ u` maps solutions `ψ` of the same equation to
//! `Lψ = L_N(t) W(u₁ … u_N, ψ)/W(u₁ … u_N)`, which solve the equation with
//! `U_N = U₀ − (log|W|²)ₓₓ`. The positive gauge factor
//! `L_N(t) = exp(2 ∫ Im(log W)ₓₓ dt)` is fixed by `L_N(t_ref) = 1`.

mod chain;
mod images;
mod krein;

pub use chain::{log_deriv, DarbouxChain, GAUGE_SPREAD_TOL, NEAR_POLE_THRESHOLD};
pub use images::{
    apply_hamiltonian, AdjointImage, ChainImage, TransformedPotential,
};
pub use krein::{krein_admissible, wronskian_sign_scan, SignScan};

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{JetField, PotentialField, Residual, SolutionOracle, SpaceTimeGrid};

/// `sup |∂ₓ³ arg W|` over the grid nodes: zero exactly when the transformed
/// potential is real. The scale is `max(1, sup |∂ₓ³ log W|)`.
pub fn reality_residual(chain: &DarbouxChain, grid: &SpaceTimeGrid) -> Result<Residual> {
    let mut out = Residual::zero();
    for (x, t) in grid.nodes() {
        let d3 = chain.log_wronskian_jet(x, t, 3)?.derivative(3);
        out.record(x, t, d3.im.abs(), d3.norm().max(1.0));
    }
    Ok(out)
}

pub fn gauge_factor(chain: &DarbouxChain, t: f64) -> Result<f64> {
    chain.gauge_factor(t)
}

pub fn transformed_potential(chain: &DarbouxChain, x: f64, t: f64) -> Result<f64> {
    chain.potential_value(x, t)
}

pub fn apply_chain(chain: &DarbouxChain, psi: &dyn JetField, x: f64, t: f64) -> Result<Complex64> {
    Ok(chain.apply_jet(psi, x, t, 0)?.value())
}

/// `max |(L⁺L − ∏(h₀ − C_i))ψ|` over the grid nodes and test states, with
/// the scale taken from `∏(h₀ − C_i)ψ`.
pub fn factorization_residual(
    chain: &Arc<DarbouxChain>,
    test_states: &[Arc<dyn SolutionOracle>],
    grid: &SpaceTimeGrid,
) -> Result<Residual> {
    let constants = stationary_constants(chain)?;
    let base = chain.seed_potential();
    let mut out = Residual::zero();
    for psi in test_states {
        let image = ChainImage::new(chain, psi.clone())?;
        for (x, t) in grid.nodes() {
            let lhs = chain.adjoint_apply_jet(&image, x, t, 0)?.value();
            let rhs = polynomial_in_h(base.as_ref(), psi.as_ref(), &constants, x, t)?;
            out.record(x, t, (lhs - rhs).norm(), rhs.norm().max(psi.value(x, t)?.norm()));
        }
    }
    Ok(out)
}

/// `max |(LL⁺ − ∏(h_N − C_i))χ|` for states `χ` of the transformed
/// equation.
pub fn partner_factorization_residual(
    chain: &Arc<DarbouxChain>,
    test_states: &[Arc<dyn JetField>],
    grid: &SpaceTimeGrid,
) -> Result<Residual> {
    let constants = stationary_constants(chain)?;
    let image_potential = TransformedPotential::new(chain);
    let mut out = Residual::zero();
    for chi in test_states {
        let adjoint = AdjointImage::new(chain, chi.clone())?;
        for (x, t) in grid.nodes() {
            let lhs = chain.apply_jet(&adjoint, x, t, 0)?.value();
            let rhs = polynomial_in_h(&image_potential, chi.as_ref(), &constants, x, t)?;
            out.record(x, t, (lhs - rhs).norm(), rhs.norm().max(chi.value(x, t)?.norm()));
        }
    }
    Ok(out)
}

pub(crate) fn stationary_constants(chain: &DarbouxChain) -> Result<Vec<f64>> {
    if !chain.seed_potential().is_stationary() {
        return Err(Error::Unsupported(
            "factorization is checked for stationary seed potentials only".into(),
        ));
    }
    chain
        .constants()
        .iter()
        .map(|c| {
            c.ok_or_else(|| {
                Error::Unsupported("a transformation function has no declared constant C".into())
            })
        })
        .collect()
}

/// `∏(h − C_i) f` at `(x, t)` with `h = −∂²ₓ + U` applied through jets.
pub fn polynomial_in_h(
    potential: &dyn PotentialField,
    f: &dyn JetField,
    constants: &[f64],
    x: f64,
    t: f64,
) -> Result<Complex64> {
    let order = 2 * constants.len();
    if f.max_order() < order {
        return Err(Error::capability(format!("polynomial in h of {}", f.label()), order, f.max_order()));
    }
    let mut jet = f.jet(x, t, order)?;
    for &c in constants {
        let applied = apply_hamiltonian(potential, &jet, x, t)?;
        jet = &applied - &jet.truncate(applied.order()).scale_re(c);
    }
    Ok(jet.value())
}

#[cfg(test)]
mod tests;
