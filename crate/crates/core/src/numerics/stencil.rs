//! Finite-difference stencils on uniformly spaced samples.

use num_complex::Complex64;

/// Second-order central first derivative.
pub fn central_first(minus: Complex64, plus: Complex64, h: f64) -> Complex64 {
    (plus - minus) / (2.0 * h)
}

/// Fourth-order five-point first derivative from `f(x-2h), f(x-h), f(x+h), f(x+2h)`.
pub fn five_point_first(samples: [Complex64; 4], h: f64) -> Complex64 {
    let [m2, m1, p1, p2] = samples;
    (m2 - m1 * 8.0 + p1 * 8.0 - p2) / (12.0 * h)
}

/// Second-order central second derivative.
pub fn central_second(minus: Complex64, center: Complex64, plus: Complex64, h: f64) -> Complex64 {
    (plus - center * 2.0 + minus) / (h * h)
}

/// First derivative of gridded samples: central in the interior, second-order
/// one-sided at the two ends.
pub fn grid_first_derivative(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len();
    if n < 3 {
        return vec![Complex64::new(0.0, 0.0); n];
    }
    let mut out = Vec::with_capacity(n);
    out.push((values[0] * -3.0 + values[1] * 4.0 - values[2]) / (2.0 * h));
    for i in 1..n - 1 {
        out.push(central_first(values[i - 1], values[i + 1], h));
    }
    out.push((values[n - 1] * 3.0 - values[n - 2] * 4.0 + values[n - 3]) / (2.0 * h));
    out
}
