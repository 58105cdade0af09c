use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::SpaceTimeGrid;

use super::chain::DarbouxChain;

/// Sign conservation of `W(u_{k₁} … u_{k_N})` for the square-integrable
/// family: `∏(k − kᵢ) ≥ 0` for every integer `k ≥ 0`.
pub fn krein_admissible(indices: &[usize]) -> Result<bool> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain(format!("duplicate indices in {indices:?}")));
    }
    let Some(&max) = sorted.last() else {
        return Err(Error::domain("empty index set"));
    };
    Ok((0..=max).all(|k| {
        sorted
            .iter()
            .filter(|&&ki| ki > k)
            .count()
            % 2
            == 0
            || sorted.contains(&k)
    }))
}

/// Sign changes of the real-normalised Wronskian along `x`.
#[derive(Debug, Clone, Serialize)]
pub struct SignScan {
    /// Largest count over the scanned times.
    pub changes: usize,
    pub per_time: Vec<(f64, usize)>,
    /// `(x, t)` midpoints of the node intervals where the sign flips.
    pub locations: Vec<(f64, f64)>,
}

/// Counts sign changes of `W e^{−iφ(x)}` along the grid's x-nodes at each
/// t-node, where `φ` is the quadratic phase of `W` read off the jet of
/// `log W` at the node of largest `|W|`.
pub fn wronskian_sign_scan(chain: &DarbouxChain, grid: &SpaceTimeGrid) -> Result<SignScan> {
    let mut per_time = Vec::with_capacity(grid.t_nodes().len());
    let mut locations = Vec::new();
    for &t in grid.t_nodes() {
        let mut values = Vec::with_capacity(grid.x_nodes().len());
        for &x in grid.x_nodes() {
            values.push(chain.seed_jets(x, t, 0)?.wronskian(0).value());
        }
        let (peak, _) = values
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bv), (i, v)| if v.norm() > bv { (i, v.norm()) } else { (bi, bv) });
        let x0 = grid.x_nodes()[peak];
        let log_w = chain.log_wronskian_jet(x0, t, 2)?;
        let c = log_w.coeffs();
        let mut changes = 0;
        let mut previous = 0.0f64;
        let mut previous_x = f64::NAN;
        for (&x, w) in grid.x_nodes().iter().zip(&values) {
            let d = x - x0;
            let phase = c[0].im + c[1].im * d + c[2].im * d * d;
            let real = (w * Complex64::from_polar(1.0, -phase)).re;
            if real != 0.0 {
                if previous != 0.0 && previous.signum() != real.signum() {
                    changes += 1;
                    locations.push((0.5 * (previous_x + x), t));
                }
                previous = real;
                previous_x = x;
            }
        }
        per_time.push((t, changes));
    }
    let changes = per_time.iter().map(|&(_, c)| c).max().unwrap_or(0);
    Ok(SignScan { changes, per_time, locations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(indices: &[usize]) -> bool {
        let max = *indices.iter().max().unwrap() as i64;
        (0..=max + 3).all(|k| indices.iter().map(|&ki| (k - ki as i64) as f64).product::<f64>() >= 0.0)
    }

    #[test]
    fn matches_direct_product_scan() {
        for a in 0..8 {
            assert_eq!(krein_admissible(&[a]).unwrap(), direct(&[a]));
            for b in a + 1..8 {
                assert_eq!(krein_admissible(&[a, b]).unwrap(), direct(&[a, b]), "{a},{b}");
                for c in b + 1..8 {
                    assert_eq!(krein_admissible(&[c, a, b]).unwrap(), direct(&[a, b, c]));
                }
            }
        }
    }

    #[test]
    fn documented_cases() {
        assert!(krein_admissible(&[0]).unwrap());
        assert!(!krein_admissible(&[1]).unwrap());
        assert!(krein_admissible(&[3, 4]).unwrap());
        assert!(!krein_admissible(&[1, 3]).unwrap());
        assert!(krein_admissible(&[2, 2]).is_err());
        assert!(krein_admissible(&[]).is_err());
    }
}
