//! Order-of-convergence fits and polynomial extrapolation.

use crate::error::{Error, Result};

/// Least-squares line through `(ln h, ln err)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderFit {
    /// Slope of the fitted line.
    pub order: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl OrderFit {
    pub fn predict(&self, h: f64) -> f64 {
        (self.intercept + self.order * h.ln()).exp()
    }
}

/// Fits `err ≈ C h^p` through `(h, err)` pairs on a log-log scale.
pub fn fit_order(samples: &[(f64, f64)]) -> Result<OrderFit> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter("an order fit needs at least two samples".into()));
    }
    if samples.iter().any(|&(h, e)| !(h > 0.0 && e > 0.0 && h.is_finite() && e.is_finite())) {
        return Err(Error::InvalidParameter(
            "order fit samples must be positive and finite".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    fit_line(&pts)
}

/// Ordinary least-squares line `y = intercept + order x`.
pub fn fit_line(pts: &[(f64, f64)]) -> Result<OrderFit> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("abscissae must not all coincide".into()));
    }
    let order = sxy / sxx;
    let intercept = my - order * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(OrderFit {
        order,
        intercept,
        r_squared,
    })
}

/// Value at `x = 0` of the interpolating polynomial through `(x_k, y_k)`.
///
/// With `n` points this cancels the first `n - 1` powers of `x` in an
/// expansion `y(x) = y(0) + c1 x + c2 x² + …`.
pub fn extrapolate_to_zero<T>(samples: &[(f64, T)]) -> Result<T>
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    if samples.is_empty() {
        return Err(Error::InvalidParameter("extrapolation needs at least one sample".into()));
    }
    for (i, a) in samples.iter().enumerate() {
        if samples[..i].iter().any(|b| b.0 == a.0) {
            return Err(Error::InvalidParameter("extrapolation nodes must be distinct".into()));
        }
    }
    // Lagrange basis evaluated at zero
    let mut acc: Option<T> = None;
    for (k, &(xk, yk)) in samples.iter().enumerate() {
        let mut w = 1.0;
        for (m, &(xm, _)) in samples.iter().enumerate() {
            if m != k {
                w *= xm / (xm - xk);
            }
        }
        let term = yk * w;
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    Ok(acc.expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn exact_power_law() {
        let s: Vec<_> = [0.1, 0.05, 0.025].iter().map(|&h| (h, 3.0 * h * h)).collect();
        let f = fit_order(&s).unwrap();
        assert!((f.order - 2.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!((f.predict(0.2) - 0.12).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_order(&[(0.1, 1.0)]).is_err());
        assert!(fit_order(&[(0.1, 1.0), (0.1, 2.0)]).is_err());
        assert!(fit_order(&[(0.1, 0.0), (0.2, 1.0)]).is_err());
    }

    #[test]
    fn extrapolation_removes_polynomial_terms() {
        let f = |x: f64| 1.5 - 2.0 * x + 0.7 * x * x;
        let s: Vec<_> = [0.1, 0.05, 0.025].iter().map(|&x| (x, f(x))).collect();
        assert!((extrapolate_to_zero(&s).unwrap() - 1.5).abs() < 1e-13);
        let z: Vec<_> = [0.2, 0.1].iter().map(|&x| (x, Complex64::new(1.0, 2.0) * (1.0 + x))).collect();
        assert!((extrapolate_to_zero(&z).unwrap() - Complex64::new(1.0, 2.0)).norm() < 1e-13);
        assert!(extrapolate_to_zero(&[(0.1, 1.0), (0.1, 2.0)]).is_err());
    }
}
