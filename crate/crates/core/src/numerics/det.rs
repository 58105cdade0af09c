//! Small complex determinants and Wronskians built from exact derivatives.

use std::sync::Arc;

use num_complex::Complex64;

use super::field::JetField;
use super::jet::Jet;
use crate::error::{Error, Result};

/// Determinant by LU factorisation with partial pivoting. Consumes `m`.
pub fn det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .unwrap();
        if m[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for row in col + 1..n {
            let factor = m[row][col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = m[col][k];
                m[row][k] -= factor * v;
            }
        }
    }
    det
}

/// Determinant of a square matrix of jets by cofactor expansion.
///
/// Jets do not admit pivoting on magnitude, and the matrices handled here
/// are at most a handful of rows, so the expansion is both exact in
/// structure and cheap.
pub fn det_jets(m: &[Vec<Jet>]) -> Jet {
    let n = m.len();
    match n {
        0 => Jet::constant(Complex64::new(1.0, 0.0), 0),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        _ => {
            let mut acc: Option<Jet> = None;
            for col in 0..n {
                let minor: Vec<Vec<Jet>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != col)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][col] * &det_jets(&minor);
                acc = Some(match acc {
                    None => term,
                    Some(a) if col % 2 == 0 => &a + &term,
                    Some(a) => &a - &term,
                });
            }
            acc.unwrap()
        }
    }
}

/// Derivative-row matrix `M[k][j] = ∂ₓᵏ fⱼ` as jets of order `order`.
pub fn wronskian_matrix(
    fields: &[Arc<dyn JetField>],
    x: f64,
    t: f64,
    order: usize,
) -> Result<Vec<Vec<Jet>>> {
    let n = fields.len();
    let needed = order + n.saturating_sub(1);
    let mut columns = Vec::with_capacity(n);
    for f in fields {
        if f.max_order() < needed {
            return Err(Error::capability(
                format!("Wronskian of {} functions", n),
                needed,
                f.max_order(),
            ));
        }
        let mut rows = Vec::with_capacity(n);
        let mut jet = f.jet(x, t, needed)?;
        for k in 0..n {
            if k > 0 {
                jet = jet.differentiate();
            }
            rows.push(jet.truncate(order));
        }
        columns.push(rows);
    }
    Ok((0..n)
        .map(|k| (0..n).map(|j| columns[j][k].clone()).collect())
        .collect())
}

/// Jet of `W(f₁, …, f_N)` in `x`.
pub fn wronskian_jet(
    fields: &[Arc<dyn JetField>],
    x: f64,
    t: f64,
    order: usize,
) -> Result<Jet> {
    if fields.is_empty() {
        return Err(Error::domain("Wronskian of an empty list"));
    }
    Ok(det_jets(&wronskian_matrix(fields, x, t, order)?))
}

/// `W(f₁, …, f_N)(x, t)` from exact oracle derivatives.
pub fn wronskian(fields: &[Arc<dyn JetField>], x: f64, t: f64) -> Result<Complex64> {
    if fields.is_empty() {
        return Err(Error::domain("Wronskian of an empty list"));
    }
    let n = fields.len();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (j, f) in fields.iter().enumerate() {
        if f.max_order() + 1 < n {
            return Err(Error::capability(
                format!("Wronskian of {} functions", n),
                n - 1,
                f.max_order(),
            ));
        }
        let jet = f.jet(x, t, n - 1)?;
        for (k, row) in m.iter_mut().enumerate() {
            row[j] = jet.derivative(k);
        }
    }
    Ok(det(m))
}

/// Product over columns of the largest entry modulus among derivative
/// orders `0..=n`: the magnitude the Wronskian would have without
/// cancellation, used to recognise a node.
pub fn wronskian_scale(fields: &[Arc<dyn JetField>], x: f64, t: f64) -> Result<f64> {
    let n = fields.len();
    let mut scale = 1.0;
    for f in fields {
        let order = n.min(f.max_order());
        let jet = f.jet(x, t, order)?;
        let col = (0..=order).map(|k| jet.derivative(k).norm()).fold(0.0, f64::max);
        scale *= col;
    }
    Ok(scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::field::I;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lu_det_matches_cofactor_expansion() {
        let m = vec![
            vec![c(1.0, 2.0), c(0.5, -1.0), c(3.0, 0.0)],
            vec![c(-2.0, 0.0), c(1.0, 1.0), c(0.0, 4.0)],
            vec![c(0.3, 0.3), c(2.0, -0.5), c(1.0, 0.0)],
        ];
        let jets: Vec<Vec<Jet>> = m
            .iter()
            .map(|row| row.iter().map(|v| Jet::constant(*v, 0)).collect())
            .collect();
        let expected = det_jets(&jets).value();
        assert!((det(m) - expected).norm() < 1e-12);
    }

    #[test]
    fn singular_matrix_has_zero_det() {
        let m = vec![vec![c(1.0, 0.0), I], vec![c(2.0, 0.0), I * 2.0]];
        assert!(det(m).norm() < 1e-15);
    }
}
