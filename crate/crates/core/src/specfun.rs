//! Hermite-type polynomial sequences evaluated by three-term recurrences.
//!
//! All sequences obey `P_{k+1}(z) = a z P_k(z) + b k P_{k-1}(z)` with
//! `P_0 = 1`:
//!
//! | sequence | `a` | `b` | relation |
//! |----------|-----|-----|----------|
//! | `H_k`    | 2   | -2  | physicists' Hermite |
//! | `He_k`   | 1   | -1  | `He_k(z) = 2^{-k/2} H_k(z/√2)` |
//! | `q_k`    | 1   | +1  | `q_k(z) = (-i)^k He_k(iz)` |
//! | `p_k`    | 2   | +2  | `p_k(y) = (-i)^k H_k(iy)` |
//!
//! and `d/dz P_k = a k P_{k-1}`. Evaluation is validated up to degree 20;
//! beyond that the values grow fast enough that relative rounding of the
//! recurrence is no longer checked.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Jet;

pub const VALIDATED_DEGREE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolyKind {
    /// Physicists' Hermite `H_k`.
    H,
    /// Probabilists' Hermite `He_k`.
    He,
    /// `q_k(z) = (-i)^k He_k(iz)`, positive coefficients.
    Q,
    /// `p_k(y) = (-i)^k H_k(iy)`, positive coefficients.
    P,
    /// `J_k = k J_{k-1} + He_k²`, `J_0 = 1`.
    J,
}

impl PolyKind {
    fn recurrence(self) -> Option<(f64, f64)> {
        match self {
            PolyKind::H => Some((2.0, -2.0)),
            PolyKind::He => Some((1.0, -1.0)),
            PolyKind::Q => Some((1.0, 1.0)),
            PolyKind::P => Some((2.0, 2.0)),
            PolyKind::J => None,
        }
    }
}

/// A polynomial family with a degree cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolySequence {
    pub kind: PolyKind,
    pub degree_cap: usize,
}

impl PolySequence {
    pub fn new(kind: PolyKind) -> Self {
        PolySequence {
            kind,
            degree_cap: VALIDATED_DEGREE,
        }
    }

    fn check(&self, k: i32) -> Result<usize> {
        let k = degree(k)?;
        if k > self.degree_cap {
            return Err(Error::domain(format!(
                "degree {k} exceeds the cap {} of {:?}",
                self.degree_cap, self.kind
            )));
        }
        Ok(k)
    }

    pub fn eval(&self, k: i32, z: f64) -> Result<f64> {
        let k = self.check(k)?;
        Ok(match self.kind.recurrence() {
            Some((a, b)) => three_term(k, z, a, b)[0],
            None => j_derivs(k, z)[0],
        })
    }

    /// First derivative in `z`.
    pub fn derivative(&self, k: i32, z: f64) -> Result<f64> {
        let k = self.check(k)?;
        Ok(match self.kind.recurrence() {
            Some((a, b)) => three_term(k, z, a, b)[1],
            None => j_derivs(k, z)[1],
        })
    }
}

fn degree(k: i32) -> Result<usize> {
    usize::try_from(k).map_err(|_| Error::domain(format!("polynomial degree must be >= 0, got {k}")))
}

/// `[P_k, P'_k, P''_k]` at `z`.
fn three_term(k: usize, z: f64, a: f64, b: f64) -> [f64; 3] {
    let vals = sequence(k, z, a, b);
    let at = |j: isize| if j < 0 { 0.0 } else { vals[j as usize] };
    let k_f = k as f64;
    let k_i = k as isize;
    [
        vals[k],
        a * k_f * at(k_i - 1),
        a * a * k_f * (k_f - 1.0) * at(k_i - 2),
    ]
}

fn sequence(k: usize, z: f64, a: f64, b: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(1.0);
    if k >= 1 {
        out.push(a * z);
    }
    for j in 1..k {
        let next = a * z * out[j] + b * j as f64 * out[j - 1];
        out.push(next);
    }
    out
}

/// `[J_k, J'_k, J''_k]` at `z` from `J_k = k J_{k-1} + He_k²`.
fn j_derivs(k: usize, z: f64) -> [f64; 3] {
    let mut j = [1.0, 0.0, 0.0];
    for s in 1..=k {
        let [he, dhe, d2he] = three_term(s, z, 1.0, -1.0);
        let sf = s as f64;
        j = [
            sf * j[0] + he * he,
            sf * j[1] + 2.0 * he * dhe,
            sf * j[2] + 2.0 * (dhe * dhe + he * d2he),
        ];
    }
    j
}

pub fn hermite_h(k: i32, z: f64) -> Result<f64> {
    Ok(three_term(degree(k)?, z, 2.0, -2.0)[0])
}

/// Probabilists' Hermite polynomial `He_k(z)`.
pub fn hermite_he(k: i32, z: f64) -> Result<f64> {
    Ok(three_term(degree(k)?, z, 1.0, -1.0)[0])
}

/// `[He_k, He'_k, He''_k]`.
pub fn hermite_he_derivs(k: i32, z: f64) -> Result<[f64; 3]> {
    Ok(three_term(degree(k)?, z, 1.0, -1.0))
}

/// `q_k(z) = (-i)^k He_k(iz)`; real with nonnegative coefficients.
pub fn q_poly(k: i32, z: f64) -> Result<f64> {
    Ok(three_term(degree(k)?, z, 1.0, 1.0)[0])
}

/// `[q_k, q'_k, q''_k]`.
pub fn q_poly_derivs(k: i32, z: f64) -> Result<[f64; 3]> {
    Ok(three_term(degree(k)?, z, 1.0, 1.0))
}

/// `J_k(z) = k J_{k-1}(z) + He_k(z)²`, `J_0 = 1`.
pub fn j_poly(k: i32, z: f64) -> Result<f64> {
    Ok(j_derivs(degree(k)?, z)[0])
}

/// `[J_k, J'_k, J''_k]`.
pub fn j_poly_derivs(k: i32, z: f64) -> Result<[f64; 3]> {
    Ok(j_derivs(degree(k)?, z))
}

fn check_f_indices(m: i32, l: i32) -> Result<(usize, usize)> {
    let m = degree(m)?;
    let l = degree(l)?;
    if l <= m {
        return Err(Error::domain(format!(
            "f_ml needs l > m (f_mm vanishes identically), got m = {m}, l = {l}"
        )));
    }
    Ok((m, l))
}

/// `f_ml(z) = q_m q_{l+1} − q_l q_{m+1}`.
pub fn f_poly(m: i32, l: i32, z: f64) -> Result<f64> {
    Ok(f_poly_derivs(m, l, z)?[0])
}

/// `[f_ml, f'_ml, f''_ml]`, using `f_ml = l q_m q_{l-1} − m q_l q_{m-1}`
/// for the derivatives.
pub fn f_poly_derivs(m: i32, l: i32, z: f64) -> Result<[f64; 3]> {
    let (m, l) = check_f_indices(m, l)?;
    let q = sequence(l + 1, z, 1.0, 1.0);
    let qd = |k: usize| three_term(k, z, 1.0, 1.0);
    let value = q[m] * q[l + 1] - q[l] * q[m + 1];
    let [qm, dqm, d2qm] = qd(m);
    let [ql1, dql1, d2ql1] = qd(l + 1);
    let [ql, dql, d2ql] = qd(l);
    let [qm1, dqm1, d2qm1] = qd(m + 1);
    let d1 = dqm * ql1 + qm * dql1 - dql * qm1 - ql * dqm1;
    let d2 = d2qm * ql1 + 2.0 * dqm * dql1 + qm * d2ql1 - d2ql * qm1 - 2.0 * dql * dqm1 - ql * d2qm1;
    Ok([value, d1, d2])
}

/// Evaluates `P_k` of the given recurrence family on a jet argument.
pub fn poly_jet(kind: PolyKind, k: usize, z: &Jet) -> Jet {
    let (a, b) = kind
        .recurrence()
        .expect("jet evaluation is defined for the three-term families");
    let order = z.order();
    let one = Jet::constant(Complex64::new(1.0, 0.0), order);
    if k == 0 {
        return one;
    }
    let mut prev = one;
    let mut cur = z * a;
    for j in 1..k {
        let next = &(&(z * &cur) * a) + &(&prev * (b * j as f64));
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: `(-i)^k He_k(iz)` in complex arithmetic.
    fn q_reference(k: usize, z: f64) -> Complex64 {
        let w = Complex64::new(0.0, z);
        let mut prev = Complex64::new(1.0, 0.0);
        let mut cur = w;
        let he = if k == 0 {
            prev
        } else {
            for j in 1..k {
                let next = w * cur - prev * j as f64;
                prev = cur;
                cur = next;
            }
            cur
        };
        Complex64::new(0.0, -1.0).powu(k as u32) * he
    }

    #[test]
    fn hermite_he_values() {
        assert_eq!(hermite_he(0, 3.7).unwrap(), 1.0);
        assert_eq!(hermite_he(2, 1.0).unwrap(), 0.0);
        assert_eq!(hermite_he(3, 2.0).unwrap(), 2.0);
        assert!(matches!(hermite_he(-1, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn he_is_rescaled_h() {
        for k in 0..10 {
            for &z in &[-2.3, -0.4, 0.0, 1.1, 3.0] {
                let lhs = hermite_he(k, z).unwrap();
                let rhs = 2f64.powf(-(k as f64) / 2.0) * hermite_h(k, z / 2f64.sqrt()).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn q_poly_values() {
        assert_eq!(q_poly(0, -5.0).unwrap(), 1.0);
        assert_eq!(q_poly(2, 1.0).unwrap(), 2.0);
        assert_eq!(q_poly(4, 1.0).unwrap(), 10.0);
        assert!(q_poly(-2, 1.0).is_err());
    }

    #[test]
    fn q_poly_matches_complex_definition() {
        for k in 0..=12usize {
            let mut z = -6.0;
            while z <= 6.0 {
                let reference = q_reference(k, z);
                let value = q_poly(k as i32, z).unwrap();
                let tol = 1e-12 * reference.norm().max(1.0);
                assert!((value - reference.re).abs() <= tol, "k={k} z={z}");
                assert!(reference.im.abs() <= tol);
                z += 0.25;
            }
        }
    }

    #[test]
    fn j_poly_golden_values() {
        assert_eq!(j_poly(0, 0.3).unwrap(), 1.0);
        assert_eq!(j_poly(1, 2.0).unwrap(), 5.0);
        assert_eq!(j_poly(2, 1.0).unwrap(), 4.0);
        assert!(j_poly(-3, 0.0).is_err());
    }

    #[test]
    fn j_poly_is_positive_and_self_consistent() {
        for k in 0..=8 {
            let mut z = -8.0;
            while z <= 8.0 {
                let j = j_poly(k, z).unwrap();
                assert!(j > 0.0);
                if k > 0 {
                    let he = hermite_he(k, z).unwrap();
                    let rec = j - k as f64 * j_poly(k - 1, z).unwrap() - he * he;
                    assert!(rec.abs() <= 1e-9 * j);
                }
                z += 0.05;
            }
        }
    }

    #[test]
    fn j_poly_matches_christoffel_darboux_sum() {
        // J_k = k! Σ He_s² / s!
        for k in 0..7 {
            let z = 0.83;
            let mut fact = 1.0;
            let mut sum = 0.0;
            for s in 0..=k {
                if s > 0 {
                    fact *= s as f64;
                }
                sum += hermite_he(s, z).unwrap().powi(2) / fact;
            }
            assert!((j_poly(k, z).unwrap() - fact * sum).abs() < 1e-10 * fact * sum);
        }
    }

    #[test]
    fn f_poly_values() {
        for &z in &[-3.0, 0.0, 0.7, 2.0] {
            assert!((f_poly(0, 1, z).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(f_poly(0, 3, 0.0).unwrap(), 3.0);
        assert!(f_poly(2, 2, 0.5).is_err());
        assert!(f_poly(3, 1, 0.5).is_err());
    }

    #[test]
    fn f_poly_derivatives_match_alternate_form() {
        // f_ml = l q_m q_{l-1} - m q_l q_{m-1}
        let alt = |m: i32, l: i32, z: f64| {
            let q = |k: i32| if k < 0 { 0.0 } else { q_poly(k, z).unwrap() };
            l as f64 * q(m) * q(l - 1) - m as f64 * q(l) * q(m - 1)
        };
        for (m, l) in [(0, 1), (0, 3), (2, 3), (2, 7), (4, 9)] {
            let z = 0.61;
            let [f, d1, d2] = f_poly_derivs(m, l, z).unwrap();
            assert!((f - alt(m, l, z)).abs() < 1e-10 * f.abs().max(1.0));
            let e = 1e-4;
            let fd1 = (alt(m, l, z + e) - alt(m, l, z - e)) / (2.0 * e);
            let fd2 = (alt(m, l, z + e) - 2.0 * f + alt(m, l, z - e)) / (e * e);
            assert!((d1 - fd1).abs() < 1e-5 * d1.abs().max(1.0));
            assert!((d2 - fd2).abs() < 1e-4 * d2.abs().max(1.0));
        }
    }

    #[test]
    fn admissible_f_poly_is_nodeless() {
        for m in [0, 2, 4] {
            for l in ((m + 1)..=9).step_by(2) {
                let mut z = -8.0;
                while z <= 8.0 {
                    assert!(f_poly(m, l, z).unwrap() > 0.0, "m={m} l={l} z={z}");
                    z += 0.01;
                }
            }
        }
    }

    #[test]
    fn poly_jet_derivatives_follow_recurrence() {
        let z = Jet::variable(0.45, 3);
        for kind in [PolyKind::H, PolyKind::He, PolyKind::Q, PolyKind::P] {
            let seq = PolySequence::new(kind);
            for k in 0..8 {
                let jet = poly_jet(kind, k, &z);
                assert!((jet.value().re - seq.eval(k as i32, 0.45).unwrap()).abs() < 1e-12);
                assert!((jet.derivative(1).re - seq.derivative(k as i32, 0.45).unwrap()).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn degree_cap_is_enforced() {
        let seq = PolySequence {
            kind: PolyKind::He,
            degree_cap: 4,
        };
        assert!(seq.eval(5, 0.0).is_err());
        assert!(seq.eval(4, 0.0).is_ok());
        assert_eq!(PolySequence::new(PolyKind::J).eval(2, 1.0).unwrap(), 4.0);
    }
}
