//! Two-component structure built on a Darboux chain: supercharges, the
//! integral inverse `M` of a first-order transformation, and the
//! anticommutators of the nilpotent generators.
//!
//! States are pairs `Ψ = (ψ, χ)` with `ψ` living in the seed equation and
//! `χ` in the transformed one. `Q = Lσ⁻` maps `(ψ, χ) ↦ (0, Lψ)`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::darboux::{apply_hamiltonian, ChainImage, DarbouxChain, TransformedPotential};
use crate::error::{Error, Result};
use crate::numerics::{
    fd_schrodinger_residual, five_point_first, integrate, FieldSum, Jet, JetField,
    PotentialField, QuadratureOptions, Residual, SolutionOracle, SpaceTimeGrid, ZeroField,
};

/// Linear operator on x-dependent fields, applied lazily through jets.
#[derive(Debug, Clone)]
pub enum FieldOp {
    Identity,
    /// `L` of the chain.
    Chain(Arc<DarbouxChain>),
    /// `L⁺` of a stationary chain.
    Adjoint(Arc<DarbouxChain>),
    /// The integral inverse `M`.
    Inverse(Arc<InverseOperator>),
    /// `−∂²ₓ + U`.
    Hamiltonian(Arc<dyn PotentialField>),
    /// Applied right to left: `Compose([A, B])` is `A ∘ B`.
    Compose(Vec<FieldOp>),
    Sum(Vec<(Complex64, FieldOp)>),
}

impl FieldOp {
    pub fn then(self, outer: FieldOp) -> FieldOp {
        FieldOp::Compose(vec![outer, self])
    }

    pub fn apply(&self, f: Arc<dyn JetField>) -> Arc<dyn JetField> {
        match self {
            FieldOp::Identity => f,
            FieldOp::Compose(ops) => ops.iter().rev().fold(f, |acc, op| op.apply(acc)),
            FieldOp::Sum(terms) => Arc::new(FieldSum::new(
                terms.iter().map(|(c, op)| (*c, op.apply(f.clone()))).collect(),
            )),
            _ => Arc::new(OpField {
                op: self.clone(),
                f,
            }),
        }
    }
}

#[derive(Debug)]
struct OpField {
    op: FieldOp,
    f: Arc<dyn JetField>,
}

impl JetField for OpField {
    fn jet(&self, x: f64, t: f64, order: usize) -> Result<Jet> {
        match &self.op {
            FieldOp::Chain(chain) => chain.apply_jet(self.f.as_ref(), x, t, order),
            FieldOp::Adjoint(chain) => chain.adjoint_apply_jet(self.f.as_ref(), x, t, order),
            FieldOp::Inverse(m) => m.apply_jet(self.f.as_ref(), x, t, order),
            FieldOp::Hamiltonian(u) => apply_hamiltonian(u.as_ref(), &self.f.jet(x, t, order + 2)?, x, t),
            FieldOp::Identity | FieldOp::Compose(_) | FieldOp::Sum(_) => {
                unreachable!("structural operators are expanded by FieldOp::apply")
            }
        }
    }

    fn max_order(&self) -> usize {
        let inner = self.f.max_order();
        match &self.op {
            FieldOp::Chain(c) | FieldOp::Adjoint(c) => inner.saturating_sub(c.order()),
            FieldOp::Inverse(m) => (inner + 1).min(m.seed().max_order()),
            FieldOp::Hamiltonian(_) => inner.saturating_sub(2),
            _ => inner,
        }
    }

    fn label(&self) -> String {
        let name = match &self.op {
            FieldOp::Chain(_) => "L",
            FieldOp::Adjoint(_) => "L+",
            FieldOp::Inverse(_) => "M",
            FieldOp::Hamiltonian(_) => "h",
            _ => "?",
        };
        format!("{name}({})", self.f.label())
    }
}

/// `Ψ = (upper, lower)`.
#[derive(Debug, Clone)]
pub struct SuperState {
    pub upper: Arc<dyn JetField>,
    pub lower: Arc<dyn JetField>,
}

impl SuperState {
    pub fn new(upper: Arc<dyn JetField>, lower: Arc<dyn JetField>) -> Self {
        SuperState { upper, lower }
    }

    /// `(ψ, Lψ)`, a solution of the two-component equation.
    pub fn from_solution(chain: &Arc<DarbouxChain>, psi: Arc<dyn SolutionOracle>) -> Result<Self> {
        let image = ChainImage::new(chain, psi.clone())?;
        Ok(SuperState {
            upper: psi,
            lower: Arc::new(image),
        })
    }

    pub fn zero() -> Self {
        SuperState {
            upper: Arc::new(ZeroField),
            lower: Arc::new(ZeroField),
        }
    }

    pub fn value(&self, x: f64, t: f64) -> Result<(Complex64, Complex64)> {
        Ok((self.upper.value(x, t)?, self.lower.value(x, t)?))
    }
}

/// 2×2 matrix of field operators; `None` is the zero operator, so products
/// that vanish for structural reasons vanish exactly.
#[derive(Debug, Clone)]
pub struct SuperOperator {
    pub entries: [[Option<FieldOp>; 2]; 2],
}

impl SuperOperator {
    pub fn zero() -> Self {
        SuperOperator {
            entries: [[None, None], [None, None]],
        }
    }

    /// `Q = Lσ⁻`.
    pub fn supercharge(chain: &Arc<DarbouxChain>) -> Self {
        let mut op = Self::zero();
        op.entries[1][0] = Some(FieldOp::Chain(chain.clone()));
        op
    }

    /// `Q⁺ = L⁺σ⁺`, stationary chains only.
    pub fn supercharge_adjoint(chain: &Arc<DarbouxChain>) -> Result<Self> {
        if !chain.is_stationary() {
            return Err(Error::Unsupported(
                "Q+ needs the adjoint chain, available for stationary seed potentials only".into(),
            ));
        }
        let mut op = Self::zero();
        op.entries[0][1] = Some(FieldOp::Adjoint(chain.clone()));
        Ok(op)
    }

    /// `Q_g = g M σ⁺`.
    pub fn generator(g: FieldOp, inverse: &Arc<InverseOperator>) -> Self {
        let mut op = Self::zero();
        op.entries[0][1] = Some(FieldOp::Inverse(inverse.clone()).then(g));
        op
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Option::is_none)
    }

    /// Operator product `self · rhs`.
    pub fn compose(&self, rhs: &SuperOperator) -> SuperOperator {
        let mut out = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                let terms: Vec<(Complex64, FieldOp)> = (0..2)
                    .filter_map(|k| match (&self.entries[i][k], &rhs.entries[k][j]) {
                        (Some(a), Some(b)) => Some((
                            Complex64::new(1.0, 0.0),
                            FieldOp::Compose(vec![a.clone(), b.clone()]),
                        )),
                        _ => None,
                    })
                    .collect();
                out.entries[i][j] = collapse(terms);
            }
        }
        out
    }

    pub fn add(&self, rhs: &SuperOperator) -> SuperOperator {
        let mut out = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                let terms: Vec<(Complex64, FieldOp)> = [&self.entries[i][j], &rhs.entries[i][j]]
                    .into_iter()
                    .flatten()
                    .map(|op| (Complex64::new(1.0, 0.0), op.clone()))
                    .collect();
                out.entries[i][j] = collapse(terms);
            }
        }
        out
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, rhs: &SuperOperator) -> SuperOperator {
        self.compose(rhs).add(&rhs.compose(self))
    }

    pub fn apply(&self, state: &SuperState) -> SuperState {
        let row = |i: usize| -> Arc<dyn JetField> {
            let parts: Vec<(Complex64, Arc<dyn JetField>)> = [&state.upper, &state.lower]
                .into_iter()
                .enumerate()
                .filter_map(|(k, comp)| {
                    self.entries[i][k]
                        .as_ref()
                        .map(|op| (Complex64::new(1.0, 0.0), op.apply(comp.clone())))
                })
                .collect();
            match parts.len() {
                0 => Arc::new(ZeroField),
                1 => parts.into_iter().next().unwrap().1,
                _ => Arc::new(FieldSum::new(parts)),
            }
        };
        SuperState {
            upper: row(0),
            lower: row(1),
        }
    }
}

fn collapse(mut terms: Vec<(Complex64, FieldOp)>) -> Option<FieldOp> {
    match terms.len() {
        0 => None,
        1 => Some(terms.pop().unwrap().1),
        _ => Some(FieldOp::Sum(terms)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Supercharge {
    Q,
    QDagger,
}

pub fn supercharge_apply(
    direction: Supercharge,
    chain: &Arc<DarbouxChain>,
    state: &SuperState,
) -> Result<SuperState> {
    let op = match direction {
        Supercharge::Q => SuperOperator::supercharge(chain),
        Supercharge::QDagger => SuperOperator::supercharge_adjoint(chain)?,
    };
    Ok(op.apply(state))
}

/// Component residuals of `(i∂ₜ − H)Ψ = 0`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SuperResidual {
    pub upper: Residual,
    pub lower: Residual,
}

impl SuperResidual {
    pub fn worst_relative(&self) -> f64 {
        Residual::worst_relative([self.upper, self.lower])
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.max_abs.max(self.lower.max_abs)
    }
}

/// FD residuals of the upper component under `U₀` and the lower one under
/// the chain's transformed potential.
pub fn super_residual(
    state: &SuperState,
    chain: &Arc<DarbouxChain>,
    grid: &SpaceTimeGrid,
) -> Result<SuperResidual> {
    let upper = fd_schrodinger_residual(state.upper.as_ref(), chain.seed_potential().as_ref(), grid)?;
    let lower = fd_schrodinger_residual(state.lower.as_ref(), &TransformedPotential::new(chain), grid)?;
    Ok(SuperResidual { upper, lower })
}

/// Half-width of the window on which `‖φ‖` is integrated for the kernel overlap.
pub const NORM_WINDOW: f64 = 40.0;

/// Default absolute tolerance of the quadrature inside `M`.
pub const INVERSE_QUAD_TOL: f64 = 1e-12;

/// `Mφ = [L₁ v*]^{-1} ∫ₐˣ v* φ dy` with `v = 1/(L₁ u*)`, which reduces to
/// `Mφ = u ∫ₐˣ φ/(L₁ u) dy`. It inverts a first-order chain on its image
/// when `1/u` is square integrable.
#[derive(Debug)]
pub struct InverseOperator {
    chain: Arc<DarbouxChain>,
    lower: f64,
    tol: f64,
}

impl InverseOperator {
    /// Integrates from the left end of the seed potential's domain. Fails
    /// with `Unsupported` when `1/u` is not square integrable at `t_ref`.
    pub fn new(chain: &Arc<DarbouxChain>) -> Result<Self> {
        if chain.order() != 1 {
            return Err(Error::Unsupported(format!(
                "the integral inverse is implemented for first-order chains, got order {}",
                chain.order()
            )));
        }
        let op = InverseOperator {
            chain: chain.clone(),
            lower: chain.seed_potential().domain().a,
            tol: INVERSE_QUAD_TOL,
        };
        op.check_square_integrable(chain.t_ref())?;
        Ok(op)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn chain(&self) -> &Arc<DarbouxChain> {
        &self.chain
    }

    pub fn seed(&self) -> &Arc<dyn SolutionOracle> {
        &self.chain.seeds()[0]
    }

    pub fn lower_limit(&self) -> f64 {
        self.lower
    }

    /// `∫|1/u|²` over the domain, after checking the integrand has decayed
    /// far out on each infinite side.
    pub fn check_square_integrable(&self, t: f64) -> Result<f64> {
        let u = self.seed();
        let domain = self.chain.seed_potential().domain();
        let probe = domain.probe_points()[0];
        let density = |x: f64| -> Result<f64> { Ok(self.seed_reciprocal(x, t)?.norm_sqr()) };
        let reference = density(probe)?;
        let mut tails = Vec::new();
        if !domain.a.is_finite() {
            tails.push(probe - 40.0);
        }
        if !domain.b.is_finite() {
            tails.push(probe + 40.0);
        }
        for x in tails {
            let d = density(x)?;
            if !(d <= 1e-16 * reference) {
                return Err(Error::Unsupported(format!(
                    "1/u of {} is not square integrable (|1/u|² = {d:e} at x = {x})",
                    u.label()
                )));
            }
        }
        integrate(
            |x| Ok(Complex64::new(density(x)?, 0.0)),
            domain.a,
            domain.b,
            QuadratureOptions::with_tol(1e-10 * reference),
        )
        .map(|v| v.re)
        .map_err(|e| Error::Unsupported(format!("1/u is not square integrable: {e}")))
    }

    fn seed_value(&self, x: f64, t: f64) -> Result<Complex64> {
        let u = self.seed().value(x, t)?;
        if !(u.norm() > 0.0) || !u.norm().is_finite() {
            return Err(Error::Singular {
                x,
                t,
                reason: "the transformation function vanishes".into(),
            });
        }
        Ok(u)
    }

    /// `1/u`, taken as zero where evaluating `u` overflows (far tails of a
    /// growing seed, where `inf·0` may also surface as NaN).
    fn seed_reciprocal(&self, x: f64, t: f64) -> Result<Complex64> {
        let u = self.seed().value(x, t)?;
        if !(u.re.is_finite() && u.im.is_finite()) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if !(u.norm() > 0.0) {
            return Err(Error::Singular {
                x,
                t,
                reason: "the transformation function vanishes".into(),
            });
        }
        Ok(u.inv())
    }

    /// `∫ₐˣ φ/(L₁u) dy`.
    pub fn primitive(&self, phi: &dyn JetField, x: f64, t: f64) -> Result<Complex64> {
        let gauge = self.chain.gauge_factor(t)?;
        integrate(
            |y| {
                let r = self.seed_reciprocal(y, t)?;
                if r.norm() == 0.0 {
                    return Ok(r);
                }
                Ok(phi.value(y, t)? * r / gauge)
            },
            self.lower,
            x,
            QuadratureOptions::with_tol(self.tol),
        )
    }

    /// `(Mφ)(x, t)` by adaptive quadrature.
    pub fn apply_value(&self, phi: &dyn JetField, x: f64, t: f64) -> Result<Complex64> {
        Ok(self.seed_value(x, t)? * self.primitive(phi, x, t)?)
    }

    /// Jet of `Mφ`: `u · F` with `F' = φ/(L₁u)` exact and `F(x)` from
    /// quadrature.
    pub fn apply_jet(&self, phi: &dyn JetField, x: f64, t: f64, order: usize) -> Result<Jet> {
        let value = self.primitive(phi, x, t)?;
        let u = self.seed().jet(x, t, order)?;
        self.seed_value(x, t)?;
        if order == 0 {
            return Ok(u.scale(value));
        }
        let gauge = self.chain.gauge_factor(t)?;
        let integrand = phi.jet(x, t, order - 1)?.checked_div(&u.truncate(order - 1).scale_re(gauge))?;
        Ok(&u * &integrand.integrate(value))
    }

    /// `(LMφ)(x, t)` where the derivative of `Mφ` is a five-point
    /// difference of quadrature values with step `h`, so the check does not
    /// reuse the exact derivative `F' = φ/(L₁u)`.
    pub fn left_inverse_value(&self, phi: &dyn JetField, x: f64, t: f64, h: f64) -> Result<Complex64> {
        let m = |y: f64| self.apply_value(phi, y, t);
        let centre = m(x)?;
        let slope = five_point_first([m(x - 2.0 * h)?, m(x - h)?, m(x + h)?, m(x + 2.0 * h)?], h);
        let u = self.seed().jet(x, t, 1)?;
        let w = u.derivative(1) / u.value();
        Ok((slope - w * centre) * self.chain.gauge_factor(t)?)
    }

    /// `|⟨φ₀, φ⟩| / (‖φ₀‖ ‖φ‖)` with `φ₀ = 1/(L₁ u*)` over the domain.
    pub fn overlap_with_kernel(&self, phi: &dyn JetField, t: f64) -> Result<f64> {
        let gauge = self.chain.gauge_factor(t)?;
        let domain = self.chain.seed_potential().domain();
        let opts = QuadratureOptions::with_tol(1e-12);
        let inner = integrate(
            |y| {
                let r = self.seed_reciprocal(y, t)?;
                if r.norm() == 0.0 {
                    return Ok(r);
                }
                Ok(phi.value(y, t)? * r / gauge)
            },
            domain.a,
            domain.b,
            opts,
        )?;
        let norm_kernel = self.check_square_integrable(t)?.sqrt() / gauge;
        // `φ` is only evaluated on a window wide enough for its decay; far
        // out its construction from the growing seed overflows.
        let (a, b) = (domain.a.max(-NORM_WINDOW), domain.b.min(NORM_WINDOW));
        let norm_phi = integrate(|y| Ok(Complex64::new(phi.value(y, t)?.norm_sqr(), 0.0)), a, b, opts)?
            .re
            .sqrt();
        if norm_phi == 0.0 {
            return Ok(0.0);
        }
        Ok(inner.norm() / (norm_kernel * norm_phi))
    }
}

/// `∫_{−X}^{X} |f(x, t)|² dx` to relative accuracy `10⁻¹²`.
pub fn truncated_norm_squared(f: &dyn JetField, t: f64, half_width: f64) -> Result<f64> {
    let density = |x: f64| Ok(Complex64::new(f.value(x, t)?.norm_sqr(), 0.0));
    let rough = integrate(density, -half_width, half_width, QuadratureOptions::with_tol(1e-3))?.re;
    if rough == 0.0 {
        return Ok(0.0);
    }
    Ok(integrate(density, -half_width, half_width, QuadratureOptions::with_tol(1e-12 * rough.abs()))?.re)
}

/// Symmetries available as generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Symmetry {
    Identity,
    /// `h = L⁺L + α` of a stationary first-order chain, `α` the seed constant.
    Hamiltonian,
}

impl Symmetry {
    /// `g` on the seed side and its partner `ḡ` with `Lg = ḡL`.
    pub fn operators(&self, chain: &Arc<DarbouxChain>) -> Result<(FieldOp, FieldOp)> {
        match self {
            Symmetry::Identity => Ok((FieldOp::Identity, FieldOp::Identity)),
            Symmetry::Hamiltonian => {
                if !chain.is_stationary() || chain.order() != 1 {
                    return Err(Error::Unsupported(
                        "h = L+L + alpha is a symmetry here only for stationary first-order chains".into(),
                    ));
                }
                let alpha = Complex64::new(chain.constants()[0].expect("stationary"), 0.0);
                let one = Complex64::new(1.0, 0.0);
                let l = FieldOp::Chain(chain.clone());
                let ld = FieldOp::Adjoint(chain.clone());
                let g = FieldOp::Sum(vec![
                    (one, FieldOp::Compose(vec![ld.clone(), l.clone()])),
                    (alpha, FieldOp::Identity),
                ]);
                let g_bar = FieldOp::Sum(vec![
                    (one, FieldOp::Compose(vec![l, ld])),
                    (alpha, FieldOp::Identity),
                ]);
                Ok((g, g_bar))
            }
        }
    }
}

/// Residuals of `{P₀, Q_g}Ψ = (gψ, ḡχ)` for `Ψ = (ψ, Lψ)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnticommutatorCheck {
    pub upper: Residual,
    pub lower: Residual,
}

impl AnticommutatorCheck {
    pub fn worst_relative(&self) -> f64 {
        Residual::worst_relative([self.upper, self.lower])
    }
}

/// Evaluates `{P₀, Q_g}` with `P₀ = Lσ⁻`, `Q_g = gMσ⁺` on `(ψ, Lψ)` for each
/// test state and compares with `(gψ, ḡLψ)` on the grid nodes.
pub fn anticommutator_check(
    g: Symmetry,
    inverse: &Arc<InverseOperator>,
    test_states: &[Arc<dyn SolutionOracle>],
    grid: &SpaceTimeGrid,
) -> Result<AnticommutatorCheck> {
    let chain = inverse.chain().clone();
    let (g_op, g_bar) = g.operators(&chain)?;
    let p0 = SuperOperator::supercharge(&chain);
    let qg = SuperOperator::generator(g_op.clone(), inverse);
    let anti = p0.anticommutator(&qg);
    let mut upper = Residual::zero();
    let mut lower = Residual::zero();
    for psi in test_states {
        let state = SuperState::from_solution(&chain, psi.clone())?;
        let lhs = anti.apply(&state);
        let expected_upper = g_op.apply(state.upper.clone());
        let expected_lower = g_bar.apply(state.lower.clone());
        for (x, t) in grid.nodes() {
            let (a, b) = lhs.value(x, t)?;
            let ea = expected_upper.value(x, t)?;
            let eb = expected_lower.value(x, t)?;
            upper.record(x, t, (a - ea).norm(), ea.norm());
            lower.record(x, t, (b - eb).norm(), eb.norm());
        }
    }
    Ok(AnticommutatorCheck { upper, lower })
}
