//! Independent numerical path to the causal kernel: inverse Fourier
//! transform of `F` along the shifted line `ω - iy`, and the power series
//! that the Bessel closed forms resum.
//!
//! The transformed integrand is `Env · G(w) · e^{iωt}` with `w = ω - a_y`,
//! `a_y = a + iy` and `G(w) = (A/w² + B/w) e^{ic/w}`. For large `|w|`,
//! `G = C1/w + C2/w² + C3/w³ + O(w⁻⁴)`; the three leading terms are
//! transformed exactly with [`residue_ikj`] and only the remainder is
//! integrated numerically, so the truncated tails cost `O(omega_max⁻³)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bq::Biquaternion;
use crate::convergence::extrapolate_to_zero;
use crate::error::{Error, Result};
use crate::fundamental::KernelCoefficients;
use crate::medium::MediumParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Gauss-Legendre points per panel.
pub const PANEL_NODES: usize = 16;
/// Minimum ratio of `omega_max` to `max(|a|, c/y)`.
pub const WIDTH_FACTOR: f64 = 50.0;
/// Default node budget of [`ContourSpec::for_point`].
pub const DEFAULT_NODE_BUDGET: usize = 4_000_000;
/// Relative size of the last retained series term.
pub const SERIES_TOL: f64 = 1e-17;

/// Shifted integration line `ω - iy` for `ω ∈ [a - omega_max, a + omega_max]`
/// with at most `n_omega` quadrature nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    pub y: f64,
    pub omega_max: f64,
    pub n_omega: usize,
}

impl ContourSpec {
    pub fn new(y: f64, omega_max: f64, n_omega: usize) -> Result<Self> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::InvalidParameter(format!("y must be positive, got {y}")));
        }
        if !(omega_max > 0.0 && omega_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega_max must be positive, got {omega_max}")));
        }
        if n_omega == 0 {
            return Err(Error::InvalidParameter("n_omega must be positive".into()));
        }
        Ok(Self { y, omega_max, n_omega })
    }

    /// Smallest admissible width for the kernel at `x`, with the default
    /// node budget.
    pub fn for_point(x: [f64; 3], params: &MediumParams, y: f64) -> Result<Self> {
        let k = KernelCoefficients::new(x, params)?;
        Self::new(y, min_width(&k, y), DEFAULT_NODE_BUDGET)
    }
}

fn min_width(k: &KernelCoefficients, y: f64) -> f64 {
    WIDTH_FACTOR * k.a.abs().max(k.c / y)
}

fn gauss_legendre() -> &'static ([f64; PANEL_NODES], [f64; PANEL_NODES]) {
    static RULE: OnceLock<([f64; PANEL_NODES], [f64; PANEL_NODES])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = PANEL_NODES;
        let mut x = [0.0; PANEL_NODES];
        let mut w = [0.0; PANEL_NODES];
        for i in 0..n {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // P_n and P_n' by the three-term recurrence
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            x[i] = -z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        (x, w)
    })
}

/// Panels `[u, v]` on `ω - a >= 0`; mirrored for the left half.
///
/// Each panel spans at most `2π` of the integrand's phase, estimated from
/// `|t| + c/|w|²` at its end nearest the pole, and at most half its distance
/// from the pole plus `y`.
fn right_panels(t: f64, c: f64, y: f64, width: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut d = 0.0;
    while d < width {
        let rate = t.abs() + c / (d * d + y * y);
        let len = (2.0 * PI / rate).min(0.5 * (d + y)).min(width - d);
        out.push((d, d + len));
        d += len;
    }
    out
}

/// Coefficients `C1..C3` of the large-`w` expansion of `G`.
fn expansion(k: &KernelCoefficients) -> [Biquaternion; 3] {
    let ic = I * k.c;
    [
        k.b_coef,
        k.a_coef + k.b_coef.scale(ic),
        k.a_coef.scale(ic) + k.b_coef.scale(ic * ic * 0.5),
    ]
}

/// Numerical inverse transform
/// `(1/2π) ∫ (A/(ω-a_y)² + B/(ω-a_y)) Env e^{ic/(ω-a_y)} e^{iωt} dω`.
///
/// For `t > 0` the exact value is `e^{-yt} f(t, x)`; for `t < 0` it is zero.
/// Errors with [`Error::Resolution`] when the contour is narrower than
/// `50 max(|a|, c/y)`, when the panels need more than `n_omega` nodes, or
/// when the node spacing at the pole exceeds `y/3`.
pub fn inverse_fourier_f(t: f64, x: [f64; 3], params: &MediumParams, contour: &ContourSpec) -> Result<Biquaternion> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("t must be finite, got {t}")));
    }
    let k = KernelCoefficients::new(x, params)?;
    let y = contour.y;
    let need = min_width(&k, y);
    if contour.omega_max < need {
        return Err(Error::Resolution(format!(
            "omega_max = {} is below the required {need}",
            contour.omega_max
        )));
    }
    let panels = right_panels(t, k.c, y, contour.omega_max);
    let nodes = 2 * panels.len() * PANEL_NODES;
    if nodes > contour.n_omega {
        return Err(Error::Resolution(format!(
            "contour needs {nodes} nodes, budget is {}",
            contour.n_omega
        )));
    }
    // the widest gap of a 16-point rule is below 0.1 of the panel length
    if 0.1 * (panels[0].1 - panels[0].0) > y / 3.0 {
        return Err(Error::Resolution("node spacing at the pole exceeds y/3".into()));
    }

    let a_y = Complex64::new(k.a, y);
    let coef = expansion(&k);
    let remainder = |omega: f64| -> Biquaternion {
        let w = Complex64::new(omega, 0.0) - a_y;
        let inv = w.inv();
        let g = (k.a_coef.scale(inv * inv) + k.b_coef.scale(inv)).scale((I * k.c * inv).exp());
        let s = coef[0].scale(inv) + coef[1].scale(inv * inv) + coef[2].scale(inv * inv * inv);
        (g - s).scale(Complex64::from_polar(1.0, omega * t))
    };
    let (gx, gw) = gauss_legendre();
    let pieces: Vec<Biquaternion> = panels
        .par_iter()
        .map(|&(u, v)| {
            let half = 0.5 * (v - u);
            let mid = 0.5 * (u + v);
            let mut acc = Biquaternion::ZERO;
            for (xi, wi) in gx.iter().zip(gw) {
                let d = mid + half * xi;
                acc += (remainder(k.a + d) + remainder(k.a - d)) * (wi * half);
            }
            acc
        })
        .collect();
    let integral: Biquaternion = pieces.into_iter().sum::<Biquaternion>() * (0.5 / PI);

    let mut exact = Biquaternion::ZERO;
    for (n, c) in coef.iter().enumerate() {
        exact += c.scale(residue_ikj(1, n as u32, t, a_y)? / (2.0 * PI));
    }
    Ok((integral + exact).scale(k.envelope))
}

/// `y -> 0` limit of [`inverse_fourier_f`] by polynomial extrapolation
/// through the given offsets, each on its minimal admissible contour.
pub fn inverse_fourier_f_limit(t: f64, x: [f64; 3], params: &MediumParams, ys: &[f64]) -> Result<Biquaternion> {
    let samples = ys
        .iter()
        .map(|&y| {
            let c = ContourSpec::for_point(x, params, y)?;
            Ok((y, inverse_fourier_f(t, x, params, &c)?))
        })
        .collect::<Result<Vec<_>>>()?;
    extrapolate_to_zero(&samples)
}

/// Residue value `I_{k,j} = 2πi H(t) (it)^{j+k-1} e^{i a_y t} / (j+k-1)!`
/// of `∫ e^{iωt} (ω - a_y)^{-(j+k)} dω`.
pub fn residue_ikj(k: u32, j: u32, t: f64, a_y: Complex64) -> Result<Complex64> {
    if k + j < 1 {
        return Err(Error::InvalidParameter("residue needs j + k >= 1".into()));
    }
    if !t.is_finite() {
        return Err(Error::Domain(format!("t must be finite, got {t}")));
    }
    if t < 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n = (j + k - 1) as i32;
    let fact: f64 = (1..=n).map(f64::from).product();
    Ok(2.0 * PI * I * (I * t).powi(n) * (I * a_y * t).exp() / fact)
}

/// `I_k = (1/2π) Σ_j (ic)^j/j! I_{k,j}` for `k ∈ {1, 2}`, summed over at
/// most `n_terms` terms:
/// `I_1 = i H e^{i a_y t} Σ (-ct)^j/(j!)²`,
/// `I_2 = -H t e^{i a_y t} Σ (-ct)^j/(j!(j+1)!)`.
///
/// Fails with [`Error::Truncation`] if the last retained term still exceeds
/// `1e-17` of the sum.
pub fn ik_series(k: u32, t: f64, c: f64, a_y: Complex64, n_terms: usize) -> Result<Complex64> {
    if k != 1 && k != 2 {
        return Err(Error::InvalidParameter(format!("k must be 1 or 2, got {k}")));
    }
    if !(c >= 0.0 && c.is_finite() && t.is_finite()) {
        return Err(Error::Domain(format!("need c >= 0 and finite t, got c = {c}, t = {t}")));
    }
    if t < 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if n_terms == 0 {
        return Err(Error::Truncation("no series terms requested".into()));
    }
    let x = -c * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut converged = x == 0.0;
    for j in 1..n_terms {
        term *= x / (j as f64 * (j as f64 + k as f64 - 1.0));
        sum += term;
        if term.abs() <= SERIES_TOL * sum.abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Truncation(format!(
            "{n_terms} terms leave a last term of {term:e} against a sum of {sum:e}"
        )));
    }
    let phase = (I * a_y * t).exp();
    Ok(match k {
        1 => I * phase * sum,
        _ => -t * phase * sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::{fundamental_f, fundamental_f_regularized};
    use crate::specfun::{bessel_j0, bessel_j1};

    fn unit() -> MediumParams {
        MediumParams::new(1.0, 1.0, 1.0).unwrap()
    }

    fn rel(a: Biquaternion, b: Biquaternion) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn gauss_legendre_rule() {
        let (x, w) = gauss_legendre();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact for degree 31
        let m: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((m - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn residue_examples() {
        let a_y = Complex64::new(1.0, 0.05);
        let r = residue_ikj(1, 0, 1.0, a_y).unwrap();
        assert!((r - 2.0 * PI * I * (I * a_y).exp()).norm() < 1e-14);
        let r = residue_ikj(2, 0, 1.0, a_y).unwrap();
        assert!((r + 2.0 * PI * (I * a_y).exp()).norm() < 1e-14);
        for (k, j) in [(1, 0), (1, 3), (2, 2)] {
            assert_eq!(residue_ikj(k, j, -1.0, a_y).unwrap(), Complex64::new(0.0, 0.0));
        }
        assert!(residue_ikj(0, 0, 1.0, a_y).is_err());
    }

    #[test]
    fn series_is_the_sum_of_residues() {
        let a_y = Complex64::new(0.7, 0.1);
        let (t, c) = (0.8, 1.3);
        for k in [1u32, 2] {
            let mut direct = Complex64::new(0.0, 0.0);
            let mut w = Complex64::new(1.0, 0.0);
            for j in 0..40u32 {
                if j > 0 {
                    w *= I * c / j as f64;
                }
                direct += w * residue_ikj(k, j, t, a_y).unwrap() / (2.0 * PI);
            }
            let s = ik_series(k, t, c, a_y, 200).unwrap();
            assert!((s - direct).norm() < 1e-13 * s.norm());
        }
    }

    #[test]
    fn series_matches_bessel_forms() {
        let a_y = Complex64::new(1.0, 0.05);
        let t = 0.9;
        let mut ct: f64 = 1e-6;
        while ct <= 20.0 {
            let c = ct / t;
            let z = 2.0 * ct.sqrt();
            let phase = (I * a_y * t).exp();
            let i1 = I * phase * bessel_j0(z).unwrap();
            let i2 = -phase * (t / c).sqrt() * bessel_j1(z).unwrap();
            assert!((ik_series(1, t, c, a_y, 500).unwrap() - i1).norm() <= 1e-12);
            assert!((ik_series(2, t, c, a_y, 500).unwrap() - i2).norm() <= 1e-12);
            ct *= 1.37;
        }
        let s = ik_series(1, 2.0, 0.0, a_y, 1).unwrap();
        assert!((s - I * (I * a_y * 2.0).exp()).norm() < 1e-15);
    }

    #[test]
    fn series_truncation_reported() {
        assert!(matches!(
            ik_series(1, 1.0, 20.0, Complex64::new(1.0, 0.0), 5),
            Err(Error::Truncation(_))
        ));
        assert!(ik_series(3, 1.0, 1.0, Complex64::new(1.0, 0.0), 50).is_err());
    }

    #[test]
    fn contour_validation() {
        assert!(ContourSpec::new(0.0, 10.0, 10).is_err());
        let p = unit();
        let x = [1.0, 0.0, 0.0];
        let c = ContourSpec::for_point(x, &p, 0.05).unwrap();
        let narrow = ContourSpec { omega_max: 0.5 * c.omega_max, ..c };
        assert!(matches!(inverse_fourier_f(1.0, x, &p, &narrow), Err(Error::Resolution(_))));
        let starved = ContourSpec { n_omega: 100, ..c };
        assert!(matches!(inverse_fourier_f(1.0, x, &p, &starved), Err(Error::Resolution(_))));
    }

    #[test]
    fn matches_regularized_closed_form() {
        let p = unit();
        let x = [1.0, 0.0, 0.0];
        let y = 0.05;
        let c = ContourSpec::for_point(x, &p, y).unwrap();
        let got = inverse_fourier_f(1.0, x, &p, &c).unwrap();
        let want = fundamental_f_regularized(1.0, x, &p, y).unwrap();
        assert!(rel(got, want) < 1e-6, "{}", rel(got, want));
    }

    #[test]
    fn limit_matches_fundamental() {
        let p = MediumParams::new(1.0, 1.0, 0.5).unwrap();
        let x = [0.3, -0.4, 0.5];
        let got = inverse_fourier_f_limit(1.5, x, &p, &[0.05, 0.025, 0.0125]).unwrap();
        let want = fundamental_f(1.5, x, &p).unwrap();
        assert!(rel(got, want) < 1e-4, "{}", rel(got, want));
    }

    #[test]
    fn vanishes_before_the_source_fires() {
        let p = unit();
        let x = [0.6, 0.2, -0.3];
        let base = ContourSpec::for_point(x, &p, 0.05).unwrap();
        let norms: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&m| {
                let c = ContourSpec { omega_max: m * base.omega_max, ..base };
                inverse_fourier_f(-0.5, x, &p, &c).unwrap().norm()
            })
            .collect();
        let scale = fundamental_f(0.5, x, &p).unwrap().norm();
        assert!(norms[0] < 1e-6 * scale, "{norms:?}");
        assert!(norms[2] <= norms[0]);
    }
}
