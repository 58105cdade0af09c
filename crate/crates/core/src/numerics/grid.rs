use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interval `[a, b]` of the extended real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(Error::domain(format!("interval requires a < b, got [{a}, {b}]")));
        }
        Ok(Interval { a, b })
    }

    pub fn real_line() -> Self {
        Interval {
            a: f64::NEG_INFINITY,
            b: f64::INFINITY,
        }
    }

    pub fn positive_half_line() -> Self {
        Interval {
            a: 0.0,
            b: f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    /// Strict interior membership; the half-line `(0, ∞)` excludes the origin.
    pub fn contains_interior(&self, x: f64) -> bool {
        x > self.a && x < self.b
    }

    /// Three distinct interior points, spread out on the natural length scale.
    pub fn probe_points(&self) -> [f64; 3] {
        match (self.a.is_finite(), self.b.is_finite()) {
            (false, false) => [-0.9, 0.4, 1.3],
            (true, false) => [self.a + 0.6, self.a + 1.1, self.a + 1.7],
            (false, true) => [self.b - 1.7, self.b - 1.1, self.b - 0.6],
            (true, true) => {
                let w = self.b - self.a;
                [self.a + 0.31 * w, self.a + 0.52 * w, self.a + 0.73 * w]
            }
        }
    }
}

/// Rectangular sampling of `x × t`.
///
/// `h` and `tau` are the stencil steps used by finite differences. For a
/// uniform grid they default to the node spacing; they may be set smaller
/// so that a coarse set of sample nodes can be probed with a fine stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeGrid {
    x_nodes: Vec<f64>,
    t_nodes: Vec<f64>,
    h: f64,
    tau: f64,
}

/// Nodes excluded on each side when iterating the interior.
pub const HALO: usize = 2;
/// Nodes per axis needed for a non-empty interior.
pub const MIN_STENCIL_NODES: usize = 2 * HALO + 1;

fn max_spacing(nodes: &[f64]) -> f64 {
    nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

fn check_axis(name: &str, nodes: &[f64]) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::Grid(format!("{name} axis has no nodes")));
    }
    if nodes.iter().any(|v| !v.is_finite()) {
        return Err(Error::Grid(format!("{name} nodes must be finite")));
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid(format!("{name} nodes must be strictly increasing")));
    }
    Ok(())
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + step * i as f64 })
        .collect()
}

fn interior(nodes: &[f64]) -> &[f64] {
    if nodes.len() < MIN_STENCIL_NODES {
        &[]
    } else {
        &nodes[HALO..nodes.len() - HALO]
    }
}

impl SpaceTimeGrid {
    pub fn new(x_nodes: Vec<f64>, t_nodes: Vec<f64>) -> Result<Self> {
        check_axis("x", &x_nodes)?;
        check_axis("t", &t_nodes)?;
        let h = max_spacing(&x_nodes);
        let tau = max_spacing(&t_nodes);
        Ok(SpaceTimeGrid {
            x_nodes,
            t_nodes,
            h,
            tau,
        })
    }

    pub fn uniform(x: (f64, f64, usize), t: (f64, f64, usize)) -> Result<Self> {
        Self::new(linspace(x.0, x.1, x.2), linspace(t.0, t.1, t.2))
    }

    pub fn with_time_step(mut self, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Grid(format!("time step must be positive, got {tau}")));
        }
        self.tau = tau;
        Ok(self)
    }

    pub fn with_space_step(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Grid(format!("space step must be positive, got {h}")));
        }
        self.h = h;
        Ok(self)
    }

    pub fn x_nodes(&self) -> &[f64] {
        &self.x_nodes
    }

    pub fn t_nodes(&self) -> &[f64] {
        &self.t_nodes
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Nodes at least `HALO` away from either end; empty on short axes.
    pub fn interior_x(&self) -> &[f64] {
        interior(&self.x_nodes)
    }

    pub fn interior_t(&self) -> &[f64] {
        interior(&self.t_nodes)
    }

    /// Whether both axes have at least [`MIN_STENCIL_NODES`] nodes.
    pub fn has_interior(&self) -> bool {
        self.x_nodes.len() >= MIN_STENCIL_NODES && self.t_nodes.len() >= MIN_STENCIL_NODES
    }

    /// Interior nodes in row-major order (t outer, x inner).
    pub fn interior(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.interior_t()
            .iter()
            .flat_map(move |&t| self.interior_x().iter().map(move |&x| (x, t)))
    }

    /// All nodes in row-major order (t outer, x inner).
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t_nodes
            .iter()
            .flat_map(move |&t| self.x_nodes.iter().map(move |&x| (x, t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_rejects_empty() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NEG_INFINITY, 0.0).is_ok());
    }

    #[test]
    fn short_axes_have_empty_interiors() {
        let short = SpaceTimeGrid::uniform((0.0, 1.0, 4), (0.0, 1.0, 5)).unwrap();
        assert!(!short.has_interior());
        assert_eq!(short.interior().count(), 0);
        assert_eq!(short.nodes().count(), 20);
        assert_eq!(SpaceTimeGrid::uniform((0.0, 0.0, 1), (0.5, 0.5, 1)).unwrap().nodes().count(), 1);
        assert!(SpaceTimeGrid::new(vec![], vec![0.0]).is_err());
        let g = SpaceTimeGrid::uniform((0.0, 1.0, 5), (0.0, 1.0, 9)).unwrap();
        assert_eq!(g.interior_x().len(), 1);
        assert_eq!(g.interior_t().len(), 5);
        assert!((g.tau() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_unordered_nodes() {
        let err = SpaceTimeGrid::new(vec![0.0, 1.0, 0.5, 2.0, 3.0], linspace(0.0, 1.0, 5));
        assert!(matches!(err, Err(Error::Grid(_))));
    }

    #[test]
    fn probe_points_are_interior() {
        for iv in [
            Interval::real_line(),
            Interval::positive_half_line(),
            Interval::new(-2.0, 5.0).unwrap(),
        ] {
            for p in iv.probe_points() {
                assert!(iv.contains_interior(p));
            }
        }
    }
}
