//! Crank–Nicolson propagation of `i ψₜ = −ψₓₓ + U(x, t) ψ` in a box with
//! homogeneous Dirichlet walls, independent of any transformation
//! structure.
//!
//! Each step solves `(1 + iτH/2) ψⁿ⁺¹ = (1 − iτH/2) ψⁿ` with the
//! three-point Laplacian and `U` sampled at the mid-step time, which keeps
//! the scheme second order and exactly unitary in the discrete norm.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{linspace, JetField, PotentialField};

/// Default limit on the boundary density relative to the initial peak density.
pub const DEFAULT_LEAKAGE_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct PropagationRun {
    pub potential: Arc<dyn PotentialField>,
    pub x_min: f64,
    pub x_max: f64,
    pub nodes: usize,
    pub tau: f64,
    pub t0: f64,
    pub t_final: f64,
    /// Samples on the `nodes` equispaced points; the two wall values are
    /// ignored and held at zero.
    pub initial: Vec<Complex64>,
    pub leakage_limit: f64,
    pub snapshot_times: Vec<f64>,
}

impl PropagationRun {
    /// Samples `field` at `t0` on `nodes` equispaced points of `[x_min, x_max]`.
    pub fn from_field(
        potential: Arc<dyn PotentialField>,
        field: &dyn JetField,
        (x_min, x_max, nodes): (f64, f64, usize),
        tau: f64,
        (t0, t_final): (f64, f64),
    ) -> Result<Self> {
        if nodes < 5 || !(x_max > x_min) {
            return Err(Error::Grid(format!(
                "box [{x_min}, {x_max}] with {nodes} nodes is not a valid grid"
            )));
        }
        let initial = linspace(x_min, x_max, nodes)
            .into_iter()
            .map(|x| field.value(x, t0))
            .collect::<Result<Vec<_>>>()?;
        let run = PropagationRun {
            potential,
            x_min,
            x_max,
            nodes,
            tau,
            t0,
            t_final,
            initial,
            leakage_limit: DEFAULT_LEAKAGE_LIMIT,
            snapshot_times: Vec::new(),
        };
        run.validate()?;
        Ok(run)
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nodes)
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nodes - 1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 5 || !(self.x_max > self.x_min) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(Error::Grid(format!(
                "box [{}, {}] with {} nodes is not a valid grid",
                self.x_min, self.x_max, self.nodes
            )));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::Grid(format!("time step must be positive, got {}", self.tau)));
        }
        if !(self.t_final >= self.t0) || !self.t0.is_finite() || !self.t_final.is_finite() {
            return Err(Error::Grid(format!(
                "need t0 <= t_final, got {} and {}",
                self.t0, self.t_final
            )));
        }
        if self.initial.len() != self.nodes {
            return Err(Error::Grid(format!(
                "initial state has {} samples for {} nodes",
                self.initial.len(),
                self.nodes
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub state: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Diagnostics {
    pub steps: usize,
    /// Step actually used: the requested one shrunk to divide the span.
    pub tau: f64,
    pub initial_norm_squared: f64,
    /// Largest `|‖ψⁿ‖² − ‖ψ⁰‖²| / ‖ψ⁰‖²` over the run.
    pub max_norm_drift: f64,
    /// Largest density next to a wall relative to the initial peak density.
    pub max_leakage: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Propagation {
    pub x_nodes: Vec<f64>,
    pub h: f64,
    pub t_final: f64,
    pub state: Vec<Complex64>,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Diagnostics,
}

/// `h Σ |ψⱼ|²`.
pub fn discrete_norm_squared(state: &[Complex64], h: f64) -> f64 {
    h * state.iter().map(|v| v.norm_sqr()).sum::<f64>()
}

/// Solves a tridiagonal system with constant off-diagonals `off` and
/// diagonal `diag`, overwriting `rhs` with the solution.
fn thomas(off: Complex64, diag: &[Complex64], rhs: &mut [Complex64], scratch: &mut Vec<Complex64>) {
    let n = diag.len();
    scratch.clear();
    scratch.resize(n, Complex64::new(0.0, 0.0));
    let mut denom = diag[0];
    scratch[0] = off / denom;
    rhs[0] /= denom;
    for j in 1..n {
        denom = diag[j] - off * scratch[j - 1];
        scratch[j] = off / denom;
        rhs[j] = (rhs[j] - off * rhs[j - 1]) / denom;
    }
    for j in (0..n - 1).rev() {
        let next = rhs[j + 1];
        rhs[j] -= scratch[j] * next;
    }
}

pub fn propagate(run: &PropagationRun) -> Result<Propagation> {
    run.validate()?;
    let x = run.x_nodes();
    let h = run.h();
    let n = run.nodes;
    let span = run.t_final - run.t0;
    let steps = if span == 0.0 { 0 } else { (span / run.tau - 1e-9).ceil().max(1.0) as usize };
    let tau = if steps == 0 { run.tau } else { span / steps as f64 };

    let mut psi = run.initial.clone();
    psi[0] = Complex64::new(0.0, 0.0);
    psi[n - 1] = Complex64::new(0.0, 0.0);
    let norm0 = discrete_norm_squared(&psi, h);
    let peak = psi.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);

    let inner = n - 2;
    let half = Complex64::new(0.0, 0.5 * tau);
    let kinetic = 1.0 / (h * h);
    let off = -half * kinetic;
    let mut diag = vec![Complex64::new(0.0, 0.0); inner];
    let mut rhs = vec![Complex64::new(0.0, 0.0); inner];
    let mut potential = vec![0.0; inner];
    let mut scratch = Vec::with_capacity(inner);

    let mut snapshot_times = run.snapshot_times.clone();
    snapshot_times.sort_by(f64::total_cmp);
    let mut pending = snapshot_times.into_iter().peekable();
    let mut snapshots = Vec::new();
    let mut max_drift: f64 = 0.0;
    let mut max_leakage: f64 = 0.0;
    let mut t = run.t0;

    let mut take_snapshots = |t: f64, psi: &[Complex64], pending: &mut std::iter::Peekable<std::vec::IntoIter<f64>>| {
        while let Some(&ts) = pending.peek() {
            if ts <= t + 0.5 * tau {
                snapshots.push(Snapshot { t, state: psi.to_vec() });
                pending.next();
            } else {
                break;
            }
        }
    };
    take_snapshots(t, &psi, &mut pending);

    for step in 0..steps {
        let t_mid = run.t0 + (step as f64 + 0.5) * tau;
        for j in 0..inner {
            potential[j] = run.potential.value(x[j + 1], t_mid)?;
        }
        for j in 0..inner {
            let hd = 2.0 * kinetic + potential[j];
            diag[j] = Complex64::new(1.0, 0.0) + half * hd;
            let left = psi[j];
            let right = psi[j + 2];
            let centre = psi[j + 1];
            let h_psi = (centre * (2.0 * kinetic) - (left + right) * kinetic) + centre * potential[j];
            rhs[j] = centre - half * h_psi;
        }
        thomas(off, &diag, &mut rhs, &mut scratch);
        psi[1..n - 1].copy_from_slice(&rhs);
        t = run.t0 + (step + 1) as f64 * tau;

        if norm0 > 0.0 {
            let drift = (discrete_norm_squared(&psi, h) - norm0).abs() / norm0;
            max_drift = max_drift.max(drift);
            let leakage = psi[1].norm_sqr().max(psi[n - 2].norm_sqr()) / peak;
            max_leakage = max_leakage.max(leakage);
            if leakage > run.leakage_limit {
                return Err(Error::BoxTooSmall {
                    leakage,
                    limit: run.leakage_limit,
                });
            }
        }
        take_snapshots(t, &psi, &mut pending);
    }

    Ok(Propagation {
        x_nodes: x,
        h,
        t_final: t,
        state: psi,
        snapshots,
        diagnostics: Diagnostics {
            steps,
            tau,
            initial_norm_squared: norm0,
            max_norm_drift: max_drift,
            max_leakage,
        },
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct L2Error {
    pub absolute: f64,
    /// Absolute error over the reference's discrete norm.
    pub relative: f64,
}

/// Discrete L² distance between gridded samples and a reference field at `t`.
pub fn l2_error(state: &[Complex64], x_nodes: &[f64], reference: &dyn JetField, t: f64) -> Result<L2Error> {
    if state.len() != x_nodes.len() || x_nodes.len() < 2 {
        return Err(Error::Grid("state and nodes differ in length".into()));
    }
    let h = x_nodes[1] - x_nodes[0];
    let mut diff = 0.0;
    let mut norm = 0.0;
    for (v, &x) in state.iter().zip(x_nodes) {
        let r = reference.value(x, t)?;
        diff += (v - r).norm_sqr();
        norm += r.norm_sqr();
    }
    let absolute = (h * diff).sqrt();
    let norm = (h * norm).sqrt();
    let relative = if absolute == 0.0 { 0.0 } else { absolute / norm };
    Ok(L2Error { absolute, relative })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvergenceLevel {
    pub h: f64,
    pub tau: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub levels: Vec<ConvergenceLevel>,
    /// `error[k] / error[k+1]`.
    pub ratios: Vec<f64>,
    /// Set when some refinement did not reduce the error.
    pub non_monotone: bool,
}

/// Propagates `run` at `levels` resolutions, halving `h` and `τ` together,
/// and measures the absolute L² error against `reference` at the final
/// time.
pub fn convergence_study(run: &PropagationRun, reference: &dyn JetField, levels: usize) -> Result<ConvergenceStudy> {
    if levels < 2 {
        return Err(Error::domain("a convergence study needs at least two levels"));
    }
    run.validate()?;
    let mut out = Vec::with_capacity(levels);
    for level in 0..levels {
        let factor = 1usize << level;
        let nodes = (run.nodes - 1) * factor + 1;
        let x = linspace(run.x_min, run.x_max, nodes);
        let initial = x
            .iter()
            .map(|&xi| reference.value(xi, run.t0))
            .collect::<Result<Vec<_>>>()?;
        let refined = PropagationRun {
            nodes,
            tau: run.tau / factor as f64,
            initial,
            snapshot_times: Vec::new(),
            ..run.clone()
        };
        let result = propagate(&refined)?;
        let err = l2_error(&result.state, &result.x_nodes, reference, result.t_final)?;
        out.push(ConvergenceLevel {
            h: result.h,
            tau: result.diagnostics.tau,
            error: err.absolute,
        });
    }
    let ratios: Vec<f64> = out
        .windows(2)
        .map(|w| if w[1].error == 0.0 { f64::NAN } else { w[0].error / w[1].error })
        .collect();
    let non_monotone = out.windows(2).any(|w| w[1].error > w[0].error);
    Ok(ConvergenceStudy {
        levels: out,
        ratios,
        non_monotone,
    })
}

/// `⟨a, b⟩ = h Σ a*ⱼ bⱼ`.
pub fn discrete_inner(a: &[Complex64], b: &[Complex64], h: f64) -> Complex64 {
    a.iter().zip(b).map(|(p, q)| p.conj() * q).sum::<Complex64>() * h
}
