use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    det_jets, integrate, Jet, JetField, PotentialField, QuadratureOptions, SolutionOracle,
};

/// Relative size below which a Wronskian counts as vanishing.
pub const NEAR_POLE_THRESHOLD: f64 = 1e-12;

/// Largest tolerated spread of `Im(log W)ₓₓ` across the probe points.
pub const GAUGE_SPREAD_TOL: f64 = 1e-8;

const GAUGE_QUAD_TOL: f64 = 1e-12;

/// Crum chain of transformation functions `u₁ … u_N` for one seed
/// potential, with the gauge reference time `t_ref` where `L_N = 1`.
pub struct DarbouxChain {
    seed_potential: Arc<dyn PotentialField>,
    seeds: Vec<Arc<dyn SolutionOracle>>,
    constants: Vec<Option<f64>>,
    t_ref: f64,
    probes: Vec<f64>,
    gauge_cache: Mutex<HashMap<u64, f64>>,
}

impl std::fmt::Debug for DarbouxChain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DarbouxChain")
            .field("seed_potential", &self.seed_potential.label())
            .field("seeds", &self.seed_labels())
            .field("t_ref", &self.t_ref)
            .finish()
    }
}

/// Jets of every seed at one point, with enough derivatives to form
/// Wronskians of a requested order.
pub(crate) struct SeedJets {
    jets: Vec<Jet>,
    x: f64,
    t: f64,
}

fn derivative_rows(jet: &Jet, rows: usize, order: usize) -> Vec<Jet> {
    let mut out = Vec::with_capacity(rows);
    let mut current = jet.clone();
    for k in 0..rows {
        if k > 0 {
            current = current.differentiate();
        }
        out.push(current.truncate(order));
    }
    out
}

fn wronskian_of(columns: &[Jet], order: usize) -> Jet {
    let n = columns.len();
    let cols: Vec<Vec<Jet>> = columns.iter().map(|j| derivative_rows(j, n, order)).collect();
    let matrix: Vec<Vec<Jet>> = (0..n)
        .map(|k| (0..n).map(|j| cols[j][k].clone()).collect())
        .collect();
    det_jets(&matrix)
}

impl SeedJets {
    /// `W(u₁ … u_j)` for the first `j` seeds as a jet of `order`; `j = 0`
    /// gives the constant 1.
    pub(crate) fn leading_wronskian(&self, j: usize, order: usize) -> Jet {
        if j == 0 {
            return Jet::constant(Complex64::new(1.0, 0.0), order);
        }
        wronskian_of(&self.jets[..j], order)
    }

    pub(crate) fn wronskian(&self, order: usize) -> Jet {
        self.leading_wronskian(self.jets.len(), order)
    }

    /// `W(u₁ … u_N, ψ)` as a jet of `order`.
    pub(crate) fn bordered(&self, psi: &Jet, order: usize) -> Jet {
        let mut cols = self.jets.clone();
        cols.push(psi.clone());
        wronskian_of(&cols, order)
    }

    /// Magnitude the Wronskian would have without cancellation.
    pub(crate) fn scale(&self) -> f64 {
        let n = self.jets.len();
        self.jets
            .iter()
            .map(|j| (0..=n.min(j.order())).map(|k| j.derivative(k).norm()).fold(0.0, f64::max))
            .product()
    }

    /// `W` jet of `order`, refusing near a node.
    pub(crate) fn regular_wronskian(&self, order: usize) -> Result<Jet> {
        let w = self.wronskian(order);
        let scale = self.scale();
        let magnitude = w.value().norm();
        if !(magnitude >= NEAR_POLE_THRESHOLD * scale) || !w.is_finite() {
            return Err(Error::NearPole {
                x: self.x,
                t: self.t,
                magnitude,
                scale,
            });
        }
        Ok(w)
    }
}

impl DarbouxChain {
    /// Chain with gauge reference `t_ref`, probing gauge x-independence at
    /// the seed potential's domain probe points.
    pub fn new(seeds: Vec<Arc<dyn SolutionOracle>>, t_ref: f64) -> Result<Arc<Self>> {
        let probes = match seeds.first() {
            Some(s) => s.potential().domain().probe_points().to_vec(),
            None => Vec::new(),
        };
        Self::with_probes(seeds, t_ref, probes)
    }

    pub fn with_probes(
        seeds: Vec<Arc<dyn SolutionOracle>>,
        t_ref: f64,
        probes: Vec<f64>,
    ) -> Result<Arc<Self>> {
        let first = seeds
            .first()
            .ok_or_else(|| Error::domain("a chain needs at least one transformation function"))?;
        if !t_ref.is_finite() {
            return Err(Error::domain("t_ref must be finite"));
        }
        let seed_potential = first.potential();
        let label = seed_potential.label();
        if let Some(bad) = seeds.iter().find(|s| s.potential().label() != label) {
            return Err(Error::domain(format!(
                "{} is not a solution for {}",
                bad.label(),
                label
            )));
        }
        if probes.len() < 2 {
            return Err(Error::domain("at least two probe points are required"));
        }
        let constants = seeds.iter().map(|s| s.eigenvalue()).collect();
        let chain = DarbouxChain {
            seed_potential,
            seeds,
            constants,
            t_ref,
            probes,
            gauge_cache: Mutex::new(HashMap::new()),
        };
        let mut regular = false;
        for &x in &chain.probes {
            match chain.seed_jets(x, t_ref, 0)?.regular_wronskian(0) {
                Ok(_) => regular = true,
                Err(Error::NearPole { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        if !regular {
            return Err(Error::DegenerateChain(format!(
                "Wronskian of [{}] vanishes at every probe point at t = {t_ref}",
                chain.seed_labels().join(", ")
            )));
        }
        Ok(Arc::new(chain))
    }

    pub fn order(&self) -> usize {
        self.seeds.len()
    }

    pub fn seeds(&self) -> &[Arc<dyn SolutionOracle>] {
        &self.seeds
    }

    pub fn seed_potential(&self) -> Arc<dyn PotentialField> {
        self.seed_potential.clone()
    }

    pub fn constants(&self) -> &[Option<f64>] {
        &self.constants
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }

    pub fn probes(&self) -> &[f64] {
        &self.probes
    }

    pub fn seed_labels(&self) -> Vec<String> {
        self.seeds.iter().map(|s| s.label()).collect()
    }

    pub fn label(&self) -> String {
        format!(
            "crum[{}; t_ref={}]({})",
            self.seed_labels().join(", "),
            self.t_ref,
            self.seed_potential.label()
        )
    }

    /// Stationary seed potential and every seed carries a constant `C_i`.
    pub fn is_stationary(&self) -> bool {
        self.seed_potential.is_stationary() && self.constants.iter().all(Option::is_some)
    }

    /// Highest derivative order available for Wronskian jets.
    pub fn max_wronskian_order(&self) -> usize {
        let n = self.order();
        let seed_max = self.seeds.iter().map(|s| s.max_order()).min().unwrap_or(0);
        (seed_max + 1).saturating_sub(n)
    }

    pub(crate) fn seed_jets(&self, x: f64, t: f64, order: usize) -> Result<SeedJets> {
        let n = self.order();
        let needed = (order + n - 1).max(n);
        let mut jets = Vec::with_capacity(n);
        for s in &self.seeds {
            if s.max_order() < needed {
                return Err(Error::capability(
                    format!("Crum chain of {n} functions"),
                    needed,
                    s.max_order(),
                ));
            }
            jets.push(s.jet(x, t, needed)?);
        }
        Ok(SeedJets { jets, x, t })
    }

    /// Jet of `W(u₁ … u_N)` in `x`, with the near-pole check.
    pub fn wronskian_jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        self.seed_jets(x, t, order)?.regular_wronskian(order)
    }

    /// Jet of `log W`.
    pub fn log_wronskian_jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        self.wronskian_jet(x, t, order)?.ln()
    }

    /// `Im(log W)ₓₓ` at `t`, checked for x-independence across the probes.
    pub fn gauge_rate(&self, t: f64) -> Result<f64> {
        let mut samples = Vec::with_capacity(self.probes.len());
        for &x in &self.probes {
            match self.log_wronskian_jet(x, t, 2) {
                Ok(j) => samples.push(j.derivative(2).im),
                Err(Error::NearPole { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        if samples.len() < 2 {
            return Err(Error::DegenerateChain(format!(
                "fewer than two regular probe points at t = {t}"
            )));
        }
        let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let spread = hi - lo;
        if !(spread <= GAUGE_SPREAD_TOL * (1.0 + hi.abs())) {
            return Err(Error::RealityViolation { t, spread });
        }
        Ok(samples[0])
    }

    /// `L_N(t) = exp(2 ∫_{t_ref}^t Im(log W)ₓₓ dt')`.
    pub fn gauge_factor(&self, t: f64) -> Result<f64> {
        if let Some(&g) = self.gauge_cache.lock().unwrap().get(&t.to_bits()) {
            return Ok(g);
        }
        let integral = integrate(
            |s| Ok(Complex64::new(self.gauge_rate(s)?, 0.0)),
            self.t_ref,
            t,
            QuadratureOptions::with_tol(GAUGE_QUAD_TOL),
        )?;
        let g = (2.0 * integral.re).exp();
        self.gauge_cache.lock().unwrap().insert(t.to_bits(), g);
        Ok(g)
    }

    /// Jet of `U_N = U₀ − (log|W|²)ₓₓ`.
    pub fn potential_jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        let log_w = self.log_wronskian_jet(x, t, order + 2)?;
        let correction = log_w.differentiate().differentiate().re().scale_re(2.0);
        let base = self.seed_potential.jet(x, t, order)?;
        Ok(&base - &correction)
    }

    /// `U_N(x, t)`.
    pub fn potential_value(&self, x: f64, t: f64) -> Result<f64> {
        let log_w = self.log_wronskian_jet(x, t, 2)?;
        let base = self.seed_potential.value(x, t)?;
        Ok(base - 2.0 * log_w.derivative(2).re)
    }

    /// Jet of `W(u₁ … u_N, ψ)/W(u₁ … u_N)` (the chain without its gauge).
    pub fn monic_apply_jet(&self, psi: &dyn JetField, x: f64, t: f64, order: usize) -> Result<Jet> {
        let n = self.order();
        let needed = order + n;
        if psi.max_order() < needed {
            return Err(Error::capability(
                format!("applying a chain of {n} functions"),
                needed,
                psi.max_order(),
            ));
        }
        let seeds = self.seed_jets(x, t, order + 1)?;
        let w = seeds.regular_wronskian(order)?;
        let psi_jet = psi.jet(x, t, needed)?;
        seeds.bordered(&psi_jet, order).checked_div(&w)
    }

    /// Jet of `Lψ = L_N(t) W(u₁ … u_N, ψ)/W(u₁ … u_N)`.
    pub fn apply_jet(&self, psi: &dyn JetField, x: f64, t: f64, order: usize) -> Result<Jet> {
        let gauge = self.gauge_factor(t)?;
        Ok(self.monic_apply_jet(psi, x, t, order)?.scale_re(gauge))
    }

    /// Jets of `w_j = (log v_j)ₓ`, `v_j = W(u₁ … u_j)/W(u₁ … u_{j−1})`: the
    /// first-order factors `A_j = ∂ₓ − w_j` with `A_N ⋯ A_1` the monic chain.
    pub fn factor_log_derivatives(&self, x: f64, t: f64, order: usize) -> Result<Vec<Jet>> {
        let n = self.order();
        let seeds = self.seed_jets(x, t, order + 1)?;
        let mut out = Vec::with_capacity(n);
        let mut prev = Jet::zero(order + 1);
        for j in 1..=n {
            let w = seeds.leading_wronskian(j, order + 1);
            let scale = SeedJets {
                jets: seeds.jets[..j].to_vec(),
                x,
                t,
            }
            .scale();
            if !(w.value().norm() >= NEAR_POLE_THRESHOLD * scale) {
                return Err(Error::NearPole {
                    x,
                    t,
                    magnitude: w.value().norm(),
                    scale,
                });
            }
            let log_w = w.ln()?;
            out.push((&log_w - &prev).differentiate());
            prev = log_w;
        }
        Ok(out)
    }

    /// Jet of `L⁺χ = A₁⁺ ⋯ A_N⁺ χ` with `A⁺ = −∂ₓ − w*`, defined for
    /// stationary chains.
    pub fn adjoint_apply_jet(&self, chi: &dyn JetField, x: f64, t: f64, order: usize) -> Result<Jet> {
        if !self.is_stationary() {
            return Err(Error::Unsupported(
                "the adjoint chain is only defined for stationary seed potentials with known constants".into(),
            ));
        }
        let n = self.order();
        let needed = order + n;
        if chi.max_order() < needed {
            return Err(Error::capability(
                format!("adjoint of a chain of {n} functions"),
                needed,
                chi.max_order(),
            ));
        }
        let factors = self.factor_log_derivatives(x, t, needed - 1)?;
        let mut f = chi.jet(x, t, needed)?;
        for w in factors.iter().rev() {
            let df = f.differentiate();
            f = -(&df + &(&w.conj() * &f));
        }
        Ok(f.truncate(order))
    }
}

/// k-th x-derivative of `log u` from exact oracle derivatives.
pub fn log_deriv(u: &dyn JetField, x: f64, t: f64, order: usize) -> Result<Complex64> {
    if order == 0 {
        return Err(Error::domain("log_deriv needs order >= 1"));
    }
    if u.max_order() < order {
        return Err(Error::capability(format!("log-derivative of {}", u.label()), order, u.max_order()));
    }
    let jet = u.jet(x, t, order)?;
    let scale = (0..=order).map(|k| jet.derivative(k).norm()).fold(0.0, f64::max);
    let magnitude = jet.value().norm();
    if !(magnitude >= NEAR_POLE_THRESHOLD * scale) || magnitude == 0.0 {
        return Err(Error::NearPole { x, t, magnitude, scale });
    }
    Ok(jet.ln()?.derivative(order))
}
