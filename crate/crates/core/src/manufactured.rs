//! Closed-form test fields built from finite sums of plane waves
//! `Re(amp e^{i(k·x - ωt)})`, on which rot, div, grad and `∂t` act exactly
//! as multiplication by `ik×`, `ik·`, `ik` and `-iω`.

use num_complex::Complex64;

use crate::medium::MediumParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarMode {
    pub amp: Complex64,
    pub k: [f64; 3],
    pub omega: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VectorMode {
    pub amp: [Complex64; 3],
    pub k: [f64; 3],
    pub omega: f64,
}

fn phase(k: [f64; 3], omega: f64, t: f64, x: [f64; 3]) -> Complex64 {
    let arg = k[0] * x[0] + k[1] * x[1] + k[2] * x[2] - omega * t;
    Complex64::from_polar(1.0, arg)
}

fn cross(a: [Complex64; 3], b: [Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn ik(k: [f64; 3]) -> [Complex64; 3] {
    k.map(|c| I * c)
}

/// Real scalar field `Re Σ amp e^{i(k·x - ωt)}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScalarModeSum {
    pub modes: Vec<ScalarMode>,
}

/// Real vector field `Re Σ amp e^{i(k·x - ωt)}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VectorModeSum {
    pub modes: Vec<VectorMode>,
}

impl ScalarModeSum {
    pub fn new(modes: Vec<ScalarMode>) -> Self {
        Self { modes }
    }

    pub fn eval(&self, t: f64, x: [f64; 3]) -> f64 {
        self.modes.iter().map(|m| (m.amp * phase(m.k, m.omega, t, x)).re).sum()
    }

    fn map(&self, f: impl Fn(&ScalarMode) -> Complex64) -> Self {
        Self {
            modes: self.modes.iter().map(|m| ScalarMode { amp: f(m), ..*m }).collect(),
        }
    }

    pub fn dt(&self) -> Self {
        self.map(|m| -I * m.omega * m.amp)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|m| m.amp * c)
    }

    pub fn grad(&self) -> VectorModeSum {
        VectorModeSum {
            modes: self
                .modes
                .iter()
                .map(|m| VectorMode {
                    amp: ik(m.k).map(|c| c * m.amp),
                    k: m.k,
                    omega: m.omega,
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut modes = self.modes.clone();
        modes.extend_from_slice(&other.modes);
        Self { modes }
    }
}

impl VectorModeSum {
    pub fn new(modes: Vec<VectorMode>) -> Self {
        Self { modes }
    }

    pub fn eval(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for m in &self.modes {
            let p = phase(m.k, m.omega, t, x);
            for c in 0..3 {
                out[c] += (m.amp[c] * p).re;
            }
        }
        out
    }

    fn map(&self, f: impl Fn(&VectorMode) -> [Complex64; 3]) -> Self {
        Self {
            modes: self.modes.iter().map(|m| VectorMode { amp: f(m), ..*m }).collect(),
        }
    }

    pub fn dt(&self) -> Self {
        self.map(|m| m.amp.map(|a| -I * m.omega * a))
    }

    pub fn rot(&self) -> Self {
        self.map(|m| cross(ik(m.k), m.amp))
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|m| m.amp.map(|a| a * c))
    }

    pub fn div(&self) -> ScalarModeSum {
        ScalarModeSum {
            modes: self
                .modes
                .iter()
                .map(|m| {
                    let k = ik(m.k);
                    ScalarMode {
                        amp: k[0] * m.amp[0] + k[1] * m.amp[1] + k[2] * m.amp[2],
                        k: m.k,
                        omega: m.omega,
                    }
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut modes = self.modes.clone();
        modes.extend_from_slice(&other.modes);
        Self { modes }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }
}

/// Exact solution of the chiral Maxwell system with its sources.
///
/// From a vector potential `W` and a scalar `φ`:
/// `H = rot W`, `E = -μ ∂t (W + β rot W) + grad φ`, which satisfy the
/// magnetic equations identically; `ρ` and `j` are then read off the
/// electric ones, so continuity holds exactly.
#[derive(Clone, Debug)]
pub struct ManufacturedMaxwell {
    pub e: VectorModeSum,
    pub h: VectorModeSum,
    pub rho: ScalarModeSum,
    pub j: VectorModeSum,
}

impl ManufacturedMaxwell {
    pub fn new(w: &VectorModeSum, phi: &ScalarModeSum, params: &MediumParams) -> Self {
        let (eps, mu, beta) = (params.epsilon(), params.mu(), params.beta());
        let h = w.rot();
        let e = w.add(&w.rot().scale(beta)).dt().scale(-mu).add(&phi.grad());
        let rho = e.div().scale(eps);
        let j = h.rot().sub(&e.dt().add(&e.rot().dt().scale(beta)).scale(eps));
        Self { e, h, rho, j }
    }

    /// A fixed three-mode example used across the test suites.
    pub fn standard(params: &MediumParams) -> Self {
        let c = Complex64::new;
        let w = VectorModeSum::new(vec![
            VectorMode {
                amp: [c(0.3, 0.1), c(-0.2, 0.4), c(0.5, 0.0)],
                k: [1.1, -0.6, 0.8],
                omega: 1.3,
            },
            VectorMode {
                amp: [c(0.0, -0.35), c(0.25, 0.0), c(-0.1, 0.2)],
                k: [-0.5, 0.9, 0.4],
                omega: -0.7,
            },
        ]);
        let phi = ScalarModeSum::new(vec![ScalarMode {
            amp: c(0.4, -0.2),
            k: [0.7, 0.3, -1.0],
            omega: 0.9,
        }]);
        Self::new(&w, &phi, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
        let h = 1e-5;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    fn sample_vec() -> VectorModeSum {
        let c = Complex64::new;
        VectorModeSum::new(vec![
            VectorMode {
                amp: [c(1.0, 0.5), c(-0.3, 0.0), c(0.2, -0.7)],
                k: [0.4, 1.2, -0.9],
                omega: 0.6,
            },
            VectorMode {
                amp: [c(0.0, 1.0), c(0.8, 0.1), c(-0.5, 0.0)],
                k: [-1.0, 0.2, 0.5],
                omega: 1.7,
            },
        ])
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let u = sample_vec();
        let (t, x) = (0.3, [0.2, -0.4, 0.7]);
        let rot = u.rot().eval(t, x);
        let du = |a: usize, c: usize| {
            fd(
                |s| {
                    let mut y = x;
                    y[a] = s;
                    u.eval(t, y)[c]
                },
                x[a],
            )
        };
        let expect_rot = [du(1, 2) - du(2, 1), du(2, 0) - du(0, 2), du(0, 1) - du(1, 0)];
        for c in 0..3 {
            assert!((rot[c] - expect_rot[c]).abs() < 1e-8);
        }
        let div = u.div().eval(t, x);
        assert!((div - (du(0, 0) + du(1, 1) + du(2, 2))).abs() < 1e-8);
        let dt = u.dt().eval(t, x);
        for c in 0..3 {
            assert!((dt[c] - fd(|s| u.eval(s, x)[c], t)).abs() < 1e-8);
        }
    }

    #[test]
    fn rot_is_divergence_free_and_rot_grad_vanishes() {
        let u = sample_vec();
        let p = [0.1, 0.2, -0.3];
        assert!(u.rot().div().eval(0.5, p).abs() < 1e-14);
        let phi = u.div();
        assert!(phi.grad().rot().eval(0.5, p).iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn manufactured_fields_satisfy_the_system() {
        let params = MediumParams::new(1.4, 0.7, 0.35).unwrap();
        let m = ManufacturedMaxwell::standard(&params);
        let (eps, mu, beta) = (params.epsilon(), params.mu(), params.beta());
        let max1 = m.h.rot().sub(&m.e.dt().add(&m.e.rot().dt().scale(beta)).scale(eps)).sub(&m.j);
        let max2 = m.e.rot().add(&m.h.dt().add(&m.h.rot().dt().scale(beta)).scale(mu));
        let cont = m.rho.dt().add(&m.j.div());
        for &(t, x) in &[(0.0, [0.0; 3]), (1.3, [0.4, -0.2, 0.9]), (-0.7, [2.0, 1.0, -1.5])] {
            assert!(max1.eval(t, x).iter().all(|v| v.abs() < 1e-13));
            assert!(max2.eval(t, x).iter().all(|v| v.abs() < 1e-13));
            assert!(m.h.div().eval(t, x).abs() < 1e-13);
            assert!((m.e.div().eval(t, x) - m.rho.eval(t, x) / eps).abs() < 1e-13);
            assert!(cont.eval(t, x).abs() < 1e-13);
        }
    }
}
