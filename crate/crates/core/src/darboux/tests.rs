use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::*;
use crate::error::Error;
use crate::numerics::{
    fd_schrodinger_residual, residual_convergence, FreePotential, Interval, Jet, JetField,
    PotentialField, SolutionOracle, SpaceTimeGrid, ANALYTIC_ORDER_CAP, I,
};
use crate::seeds::{free_particle_solution, oscillator_eigenstate, oscillator_nonstationary_seed};

fn free(lambda: f64) -> Arc<dyn SolutionOracle> {
    Arc::new(free_particle_solution(lambda).unwrap())
}

fn osc(n: i32) -> Arc<dyn SolutionOracle> {
    Arc::new(oscillator_eigenstate(n, 1.0).unwrap())
}

/// `exp(i a x³ − b x²)`, attached to the free potential only so that a chain
/// can be built from it; not a solution.
#[derive(Debug)]
struct Synthetic {
    a: f64,
    b: f64,
}

impl JetField for Synthetic {
    fn jet(&self, x: f64, _t: f64, order: usize) -> crate::Result<Jet> {
        let xv = Jet::variable(x, order);
        let x2 = &xv * &xv;
        let x3 = &x2 * &xv;
        Ok((&x3.scale(I * self.a) - &x2.scale_re(self.b)).exp())
    }
    fn max_order(&self) -> usize {
        ANALYTIC_ORDER_CAP
    }
    fn label(&self) -> String {
        format!("synthetic({}, {})", self.a, self.b)
    }
}

impl SolutionOracle for Synthetic {
    fn potential(&self) -> Arc<dyn PotentialField> {
        Arc::new(FreePotential)
    }
}

#[test]
fn log_deriv_closed_forms() {
    let gauss = free_particle_solution(-0.5).unwrap();
    let d1 = log_deriv(&gauss, 1.0, 0.0, 1).unwrap();
    assert!((d1 - Complex64::new(-0.5, 0.0)).norm() < 1e-14);
    for k in 1..=3 {
        assert_eq!(log_deriv(&gauss, 0.7, 0.0, k).unwrap().im, 0.0);
    }
    let cubic = Synthetic { a: 1.0, b: 0.0 };
    let d3 = log_deriv(&cubic, 0.4, 0.0, 3).unwrap();
    assert!((d3 - Complex64::new(0.0, 6.0)).norm() < 1e-12);
    let odd = free_particle_solution(-1.5).unwrap();
    assert!(matches!(log_deriv(&odd, 0.0, 0.3, 1), Err(Error::NearPole { .. })));
}

#[test]
fn reality_residual_vanishes_for_quadratic_phases() {
    let grid = SpaceTimeGrid::uniform((-5.0, 5.0, 20), (0.0, 2.0, 9)).unwrap();
    for lambda in [0.5, -0.5, 2.5, -2.5, 4.5] {
        let chain = DarbouxChain::new(vec![free(lambda)], 0.0).unwrap();
        let r = reality_residual(&chain, &grid).unwrap();
        assert!(r.max_abs <= 1e-10, "lambda {lambda}: {r:?}");
    }
    let stationary = DarbouxChain::new(vec![osc(0)], 0.0).unwrap();
    assert!(reality_residual(&stationary, &grid).unwrap().max_abs < 1e-12);
    let synthetic = DarbouxChain::new(vec![Arc::new(Synthetic { a: 1.0, b: 1.0 })], 0.0).unwrap();
    let r = reality_residual(&synthetic, &grid).unwrap();
    assert!((r.max_abs - 6.0).abs() < 1e-9);
}

#[test]
fn gauge_factor_closed_forms() {
    for lambda in [0.5, -0.5, 1.5, -3.5] {
        let chain = DarbouxChain::new(vec![free(lambda)], 0.0).unwrap();
        for &t in &[0.0, 0.4, 1.0, 2.0, -0.7] {
            let g = gauge_factor(&chain, t).unwrap();
            assert!((g - (1.0 + t * t).sqrt()).abs() < 1e-9, "t {t}: {g}");
        }
    }
    let pair = DarbouxChain::new(vec![free(-0.5), free(-1.5)], 0.0).unwrap();
    assert!((pair.gauge_factor(1.5).unwrap() - 3.25).abs() < 1e-9);
    let stationary = DarbouxChain::new(vec![osc(0), osc(1)], 0.0).unwrap();
    assert!((stationary.gauge_factor(1.3).unwrap() - 1.0).abs() < 1e-12);
    let omega = 1.3;
    let seed = oscillator_nonstationary_seed(0.8, omega).unwrap();
    let t_ref = seed.peak_time();
    let chain = DarbouxChain::new(vec![Arc::new(seed)], t_ref).unwrap();
    for &t in &[0.2, 0.5, 1.0] {
        let expected = (2.0 * omega * t).sin();
        assert!((chain.gauge_factor(t).unwrap() - expected).abs() < 1e-9);
    }
}

#[test]
fn gauge_rejects_x_dependent_phase_curvature() {
    let chain = DarbouxChain::new(vec![Arc::new(Synthetic { a: 1.0, b: 0.0 })], 0.0).unwrap();
    assert!(matches!(chain.gauge_rate(0.5), Err(Error::RealityViolation { .. })));
}

#[test]
fn transformed_potential_closed_forms() {
    let single = DarbouxChain::new(vec![free(0.5)], 0.0).unwrap();
    let pair = DarbouxChain::new(vec![free(-0.5), free(-1.5)], 0.0).unwrap();
    for &t in &[0.0, 0.6, 1.8] {
        for &x in &[-3.0, -0.2, 0.0, 2.5] {
            let u1 = transformed_potential(&single, x, t).unwrap();
            assert!((u1 + 1.0 / (1.0 + t * t)).abs() < 1e-12);
            let u2 = transformed_potential(&pair, x, t).unwrap();
            assert!((u2 - 2.0 / (1.0 + t * t)).abs() < 1e-11);
        }
    }
}

#[test]
fn transformed_potential_poles_are_reported() {
    let chain = DarbouxChain::new(vec![free(-1.5)], 0.0).unwrap();
    let err = transformed_potential(&chain, 0.0, 0.5).unwrap_err();
    assert_eq!(err.location(), Some((0.0, 0.5)));
}

#[test]
fn duplicate_seeds_form_a_degenerate_chain() {
    let err = DarbouxChain::new(vec![free(0.5), free(0.5)], 0.0).unwrap_err();
    assert!(matches!(err, Error::DegenerateChain(_)));
    assert!(DarbouxChain::new(vec![], 0.0).is_err());
    assert!(DarbouxChain::new(vec![free(0.5), osc(0)], 0.0).is_err());
}

#[test]
fn chain_annihilates_its_seeds() {
    let chain = DarbouxChain::new(vec![free(-0.5), free(-1.5)], 0.0).unwrap();
    for seed in chain.seeds().to_vec() {
        for &(x, t) in &[(0.3, 0.2), (-1.1, 1.4)] {
            let v = apply_chain(&chain, seed.as_ref(), x, t).unwrap();
            assert!(v.norm() < 1e-12, "{v}");
        }
    }
}

#[test]
fn first_order_chain_matches_the_first_order_operator() {
    let u = free(2.5);
    let psi = free(-1.5);
    let chain = DarbouxChain::new(vec![u.clone()], 0.0).unwrap();
    for &(x, t) in &[(0.3, 0.2), (-1.1, 1.4), (2.0, 0.9)] {
        let uj = u.jet(x, t, 1).unwrap();
        let pj = psi.jet(x, t, 1).unwrap();
        let expected = (pj.derivative(1) - uj.derivative(1) / uj.value() * pj.value())
            * chain.gauge_factor(t).unwrap();
        let got = apply_chain(&chain, psi.as_ref(), x, t).unwrap();
        assert!((got - expected).norm() < 1e-12 * expected.norm().max(1.0));
    }
}

fn intertwining_grid() -> SpaceTimeGrid {
    SpaceTimeGrid::uniform((-6.0, 6.0, 25), (0.0, 2.0, 11))
        .unwrap()
        .with_time_step(1e-3)
        .unwrap()
}

#[test]
fn images_solve_the_transformed_equation() {
    let chain = DarbouxChain::new(vec![free(0.5)], 0.0).unwrap();
    let image = ChainImage::new(&chain, free(-2.5)).unwrap();
    let potential = TransformedPotential::new(&chain);
    let grid = intertwining_grid();
    let r = fd_schrodinger_residual(&image, &potential, &grid).unwrap();
    assert!(r.relative() <= 1e-4, "{r:?}");
    let conv = residual_convergence(&image, &potential, &grid).unwrap();
    assert!((3.5..=4.5).contains(&conv.ratio), "{conv:?}");
}

#[test]
fn wrong_gauge_breaks_intertwining() {
    // The monic operator without L_N(t) does not intertwine.
    let chain = DarbouxChain::new(vec![free(0.5)], 0.0).unwrap();
    #[derive(Debug)]
    struct Monic(Arc<DarbouxChain>, Arc<dyn SolutionOracle>);
    impl JetField for Monic {
        fn jet(&self, x: f64, t: f64, order: usize) -> crate::Result<Jet> {
            self.0.monic_apply_jet(self.1.as_ref(), x, t, order)
        }
        fn max_order(&self) -> usize {
            30
        }
        fn label(&self) -> String {
            "monic".into()
        }
    }
    let monic = Monic(chain.clone(), free(-2.5));
    let potential = TransformedPotential::new(&chain);
    let r = fd_schrodinger_residual(&monic, &potential, &intertwining_grid()).unwrap();
    assert!(r.relative() > 1e-2);
}

#[test]
fn iterated_first_order_steps_reproduce_the_crum_potential() {
    let u1 = free(-0.5);
    let u2 = free(-1.5);
    let first = DarbouxChain::new(vec![u1.clone()], 0.0).unwrap();
    let v2: Arc<dyn SolutionOracle> = Arc::new(ChainImage::new(&first, u2.clone()).unwrap());
    let second = DarbouxChain::new(vec![v2], 0.0).unwrap();
    let crum = DarbouxChain::new(vec![u1, u2], 0.0).unwrap();
    for &t in &[0.0, 0.7, 1.5] {
        for &x in &[-2.0, -0.4, 0.9, 3.0] {
            let a = transformed_potential(&second, x, t).unwrap();
            let b = transformed_potential(&crum, x, t).unwrap();
            assert!((a - b).abs() < 1e-8, "x {x} t {t}: {a} vs {b}");
        }
    }
}

#[test]
fn sign_scan_counts_nodes() {
    let grid = SpaceTimeGrid::uniform((-10.0, 10.0, 801), (0.0, 1.0, 5)).unwrap();
    let l2 = |n: usize| free(-(n as f64) - 0.5);
    let scan = |idx: &[usize]| {
        let chain = DarbouxChain::new(idx.iter().map(|&n| l2(n)).collect(), 0.0).unwrap();
        wronskian_sign_scan(&chain, &grid).unwrap().changes
    };
    assert_eq!(scan(&[0]), 0);
    assert_eq!(scan(&[1]), 1);
    assert_eq!(scan(&[2]), 2);
    assert_eq!(scan(&[2, 3]), 0);
    assert_eq!(scan(&[4, 5]), 0);
    assert!(scan(&[1, 3]) > 0);
    let odd = DarbouxChain::new(vec![l2(1)], 0.0).unwrap();
    let located = wronskian_sign_scan(&odd, &grid).unwrap();
    assert_eq!(located.locations.len(), grid.t_nodes().len());
    assert!(located.locations.iter().all(|&(x, _)| x.abs() < 0.03));
}

#[test]
fn ground_state_factorization_gives_the_level_spacing() {
    let chain = DarbouxChain::new(vec![osc(0)], 0.0).unwrap();
    for n in 0..=4 {
        let psi = osc(n);
        let image = ChainImage::new(&chain, psi.clone()).unwrap();
        for &x in &[-1.3, 0.2, 2.1] {
            let lhs = chain.adjoint_apply_jet(&image, x, 0.4, 0).unwrap().value();
            let rhs = psi.value(x, 0.4).unwrap() * (2 * n) as f64;
            assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()), "n {n}");
        }
    }
    let grid = SpaceTimeGrid::uniform((-4.0, 4.0, 17), (0.0, 1.0, 5)).unwrap();
    let states: Vec<_> = (0..=4).map(osc).collect();
    let r = factorization_residual(&chain, &states, &grid).unwrap();
    assert!(r.relative() < 1e-9, "{r:?}");
    let pair = DarbouxChain::new(vec![osc(0), osc(1)], 0.0).unwrap();
    let r2 = factorization_residual(&pair, &states, &grid).unwrap();
    assert!(r2.relative() < 1e-8, "{r2:?}");
}

#[test]
fn factorization_refuses_nonstationary_chains() {
    let chain = DarbouxChain::new(vec![free(0.5)], 0.0).unwrap();
    let grid = SpaceTimeGrid::uniform((-1.0, 1.0, 5), (0.0, 1.0, 5)).unwrap();
    let r = factorization_residual(&chain, &[free(-0.5)], &grid);
    assert!(matches!(r, Err(Error::Unsupported(_))));
    let seed = oscillator_nonstationary_seed(1.0, 1.0).unwrap();
    let t_ref = PI / 4.0;
    let ns = DarbouxChain::new(vec![Arc::new(seed)], t_ref).unwrap();
    assert!(AdjointImage::new(&ns, osc(0)).is_err());
}

#[test]
fn half_line_chain_uses_half_line_probes() {
    let chain = DarbouxChain::with_probes(
        vec![free(1.5)],
        0.0,
        Interval::positive_half_line().probe_points().to_vec(),
    )
    .unwrap();
    assert!(chain.gauge_factor(1.0).is_ok());
}
