//! Closed-form kernels.
//!
//! * `Θ_α(x) = -e^{iα|x|} / (4π|x|)` and the fundamental solution of
//!   `D + α`, `K_α = -grad Θ_α + α Θ_α = (α + x/|x|² - iα x/|x|) Θ_α`;
//! * the frequency-domain kernel `F(ω, x)` of the operator `M`;
//! * the causal fundamental solution `f(t, x)` of `M`, which vanishes for
//!   `t < 0`.
//!
//! `f` is available in two algebraically equivalent forms. The final form
//! is written with `K_{1/β}` and `Θ_{1/β}`; the intermediate form uses the
//! coefficients `A(x)`, `B(x)`, the envelope `e^{i|x|/β}/(4π|x|)` and
//! `c(x) = |x|/(β² sqrt(εμ))` that come out of the inverse transform. Both
//! are kept so they can be checked against each other.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bq::Biquaternion;
use crate::error::{Error, Result};
use crate::medium::MediumParams;
use crate::specfun::bessel_j0_j1;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Returns `(|x|, x/|x|)`, rejecting the origin.
pub(crate) fn radius_and_direction(x: [f64; 3]) -> Result<(f64, [f64; 3])> {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if !r.is_finite() {
        return Err(Error::Domain(format!("non-finite point {x:?}")));
    }
    if r == 0.0 {
        return Err(Error::Singularity("kernel evaluated at x = 0".into()));
    }
    Ok((r, x.map(|c| c / r)))
}

fn check_alpha(alpha: Complex64) -> Result<()> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::Domain(format!("alpha must be finite, got {alpha}")));
    }
    if alpha.im < 0.0 {
        return Err(Error::Domain(format!("Im alpha must be >= 0, got {alpha}")));
    }
    Ok(())
}

fn theta_at_radius(r: f64, alpha: Complex64) -> Complex64 {
    -(I * alpha * r).exp() / (4.0 * PI * r)
}

/// `Θ_α(x) = -e^{iα|x|} / (4π|x|)`, for `Im α >= 0`.
pub fn theta_alpha(x: [f64; 3], alpha: Complex64) -> Result<Complex64> {
    check_alpha(alpha)?;
    let (r, _) = radius_and_direction(x)?;
    Ok(theta_at_radius(r, alpha))
}

/// Scalar/vector coefficients of `K_α` along the radial direction:
/// `K_α = s + v x̂` with `s = αΘ`, `v = (1/r - iα)Θ`.
fn k_alpha_radial(r: f64, alpha: Complex64) -> (Complex64, Complex64) {
    let theta = theta_at_radius(r, alpha);
    (alpha * theta, (real(1.0 / r) - I * alpha) * theta)
}

fn radial_to_bq(s: Complex64, v: Complex64, dir: [f64; 3]) -> Biquaternion {
    Biquaternion::new(s, dir.map(|d| v * d))
}

/// Fundamental solution of `D + α`: `(α + x/|x|² - iα x/|x|) Θ_α(x)`.
pub fn k_alpha(x: [f64; 3], alpha: Complex64) -> Result<Biquaternion> {
    check_alpha(alpha)?;
    let (r, dir) = radius_and_direction(x)?;
    let (s, v) = k_alpha_radial(r, alpha);
    Ok(radial_to_bq(s, v, dir))
}

/// `‖(1 + i x/|x|) K_α(x)‖`; the Silver-Müller type condition requires
/// this to be `o(1/|x|)`.
pub fn radiation_residual(x: [f64; 3], alpha: Complex64) -> Result<f64> {
    let k = k_alpha(x, alpha)?;
    let (_, dir) = radius_and_direction(x)?;
    let lhs = Biquaternion::new(real(1.0), dir.map(|d| I * d));
    Ok((lhs * k).norm())
}

/// `α(ω) = sqrt(εμ) ω / (β sqrt(εμ) ω - 1)`.
pub fn alpha_of_omega(omega: Complex64, params: &MediumParams) -> Result<Complex64> {
    params.require_chiral()?;
    let s = params.sqrt_eps_mu();
    let denom = params.beta() * s * omega - 1.0;
    if denom.norm() <= 1e-14 * (1.0 + (params.beta() * s * omega).norm()) {
        return Err(Error::Pole(format!("omega = {omega} is at the pole a = {}", params.pole()?)));
    }
    Ok(s * omega / denom)
}

/// Frequency-domain kernel: `F(ω, x) = K_{α(ω)}(x) / (i (β sqrt(εμ) ω - 1))`.
#[allow(non_snake_case)]
pub fn fourier_F(omega: Complex64, x: [f64; 3], params: &MediumParams) -> Result<Biquaternion> {
    let alpha = alpha_of_omega(omega, params)?;
    let k = k_alpha(x, alpha)?;
    let denom = I * (params.beta() * params.sqrt_eps_mu() * omega - 1.0);
    Ok(k.scale(denom.inv()))
}

/// The pieces of `F` after the substitution `ω - a`:
/// `F = (A/(ω-a)² + B/(ω-a)) · Env · e^{ic/(ω-a)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelCoefficients {
    /// Pole `a = 1/(β sqrt(εμ))`.
    pub a: f64,
    /// `c(x) = |x| / (β² sqrt(εμ))`.
    pub c: f64,
    /// `Env(x) = e^{i|x|/β} / (4π|x|)`.
    pub envelope: Complex64,
    /// `A(x) = i/(β³ εμ) (1 - i x/|x|)`.
    pub a_coef: Biquaternion,
    /// `B(x) = i/(β sqrt(εμ)) ((1/β)(1 - i x/|x|) + x/|x|²)`.
    pub b_coef: Biquaternion,
}

impl KernelCoefficients {
    pub fn new(x: [f64; 3], params: &MediumParams) -> Result<Self> {
        let a = params.pole()?;
        let (r, dir) = radius_and_direction(x)?;
        let beta = params.beta();
        let s = params.sqrt_eps_mu();
        let one_minus_ix = Biquaternion::new(real(1.0), dir.map(|d| -I * d));
        let a_coef = one_minus_ix.scale(I / (beta.powi(3) * s * s));
        let b_inner = one_minus_ix.scale_real(1.0 / beta) + Biquaternion::from_real_vector(dir.map(|d| d / r));
        let b_coef = b_inner.scale(I / (beta * s));
        Ok(Self {
            a,
            c: r / (beta * beta * s),
            envelope: (I * (r / beta)).exp() / (4.0 * PI * r),
            a_coef,
            b_coef,
        })
    }

    /// `F` evaluated through the `(ω - a)` parametrisation.
    pub fn fourier(&self, omega: Complex64) -> Result<Biquaternion> {
        let w = omega - self.a;
        if w.norm() == 0.0 {
            return Err(Error::Pole(format!("omega = {omega} is at the pole")));
        }
        let inv = w.inv();
        let spectral = self.a_coef.scale(inv * inv) + self.b_coef.scale(inv);
        Ok(spectral.scale(self.envelope * (I * self.c * inv).exp()))
    }

    /// `e^{i a_y t} Env (-A sqrt(t/c) J1(2 sqrt(ct)) + i B J0(2 sqrt(ct)))`
    /// for `t >= 0` with pole `a_y = a + iy`; `y = 0` gives `f`.
    fn time_domain(&self, t: f64, y: f64) -> Result<Biquaternion> {
        let arg = 2.0 * (self.c * t).sqrt();
        let (j0, j1) = bessel_j0_j1(arg)?;
        let a_y = Complex64::new(self.a, y);
        let pref = (I * a_y * t).exp() * self.envelope;
        let bracket = self.a_coef.scale_real(-(t / self.c).sqrt() * j1) + self.b_coef.scale(I * j0);
        Ok(bracket.scale(pref))
    }
}

/// `F(ω, x)` through `A`, `B`, `Env` and `c`; equals [`fourier_F`].
#[allow(non_snake_case)]
pub fn fourier_F_reparametrized(omega: Complex64, x: [f64; 3], params: &MediumParams) -> Result<Biquaternion> {
    KernelCoefficients::new(x, params)?.fourier(omega)
}

/// Radial decomposition of the causal kernel: for `t >= 0`,
/// `f(t, x) = s(t, |x|) + v(t, |x|) x/|x|`.
pub fn fundamental_radial(t: f64, r: f64, params: &MediumParams) -> Result<(Complex64, Complex64)> {
    params.require_chiral()?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Singularity(format!("kernel radius must be positive, got {r}")));
    }
    if !t.is_finite() {
        return Err(Error::Domain(format!("t must be finite, got {t}")));
    }
    if t < 0.0 {
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    let beta = params.beta();
    let s = params.sqrt_eps_mu();
    let quarter = s.sqrt();
    let alpha = real(1.0 / beta);
    let arg = 2.0 * (t * r).sqrt() / (beta.abs() * quarter);
    let (j0, j1_abs) = bessel_j0_j1(arg)?;
    // J1 is odd; a negative beta flips the sign of its argument
    let j1 = j1_abs * beta.signum();
    let theta = theta_at_radius(r, alpha);
    let (ks, kv) = k_alpha_radial(r, alpha);
    // i Θ / (β (εμ)^{1/4}) sqrt(t/|x|) J1, multiplied by (1 - i x̂)
    let g = I * theta * ((t / r).sqrt() * j1 / (beta * quarter));
    let pref = (I * (t / (beta * s))).exp() / (beta * s);
    Ok((pref * (ks * j0 + g), pref * (kv * j0 - I * g)))
}

/// Causal fundamental solution of `M = β sqrt(εμ) ∂t D + sqrt(εμ) ∂t - iD`
/// in the final `K_{1/β}`, `Θ_{1/β}` form. `H(0) = 1`, so `f(0, x)` is the
/// limit from `t > 0`; for `t < 0` the result is exactly zero.
pub fn fundamental_f(t: f64, x: [f64; 3], params: &MediumParams) -> Result<Biquaternion> {
    let (r, dir) = radius_and_direction(x)?;
    let (s, v) = fundamental_radial(t, r, params)?;
    Ok(radial_to_bq(s, v, dir))
}

/// Causal fundamental solution in the intermediate
/// `H(t) e^{iat} Env (-A sqrt(t/c) J1(2 sqrt(ct)) + i B J0(2 sqrt(ct)))` form.
pub fn fundamental_f_intermediate(t: f64, x: [f64; 3], params: &MediumParams) -> Result<Biquaternion> {
    fundamental_f_regularized(t, x, params, 0.0)
}

/// Closed form with the pole shifted to `a_y = a + iy`, i.e. the inverse
/// transform of `F(ω - iy, x)` before the limit `y -> 0`. Equals
/// `e^{-yt} f(t, x)`.
pub fn fundamental_f_regularized(t: f64, x: [f64; 3], params: &MediumParams, y: f64) -> Result<Biquaternion> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("t must be finite, got {t}")));
    }
    let coefs = KernelCoefficients::new(x, params)?;
    if t < 0.0 {
        return Ok(Biquaternion::ZERO);
    }
    coefs.time_domain(t, y)
}

/// A sample of the causal kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelPoint {
    pub t: f64,
    pub x: [f64; 3],
    pub value: Biquaternion,
}

impl KernelPoint {
    pub fn evaluate(t: f64, x: [f64; 3], params: &MediumParams) -> Result<Self> {
        Ok(Self {
            t,
            x,
            value: fundamental_f(t, x, params)?,
        })
    }
}
