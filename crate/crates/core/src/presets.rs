//! Ready-made sources: an oscillating Gaussian dipole, a static charge
//! cloud, and sources tabulated on a regular grid.

use crate::error::{Error, Result};
use crate::maxwell::{SourceSpec, SupportBox};

/// Parameters of [`gaussian_pulse`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPulse {
    /// Dipole direction and strength.
    pub j0: [f64; 3],
    pub center: [f64; 3],
    pub sigma: f64,
    pub t_center: f64,
    pub sigma_t: f64,
    /// Support half-widths in units of `sigma` and `sigma_t`.
    pub cutoff: f64,
}

impl Default for GaussianPulse {
    fn default() -> Self {
        Self {
            j0: [0.0, 0.0, 1.0],
            center: [0.0; 3],
            sigma: 0.3,
            t_center: 1.2,
            sigma_t: 0.2,
            cutoff: 5.0,
        }
    }
}

impl GaussianPulse {
    fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma_t > 0.0 && self.cutoff > 0.0) {
            return Err(Error::InvalidParameter(
                "gaussian pulse widths and cutoff must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Box outside which the source is below `exp(-cutoff²/2)` of its peak.
    pub fn support(&self) -> SupportBox {
        let w = self.cutoff * self.sigma;
        let wt = self.cutoff * self.sigma_t;
        SupportBox {
            t: [self.t_center - wt, self.t_center + wt],
            x: std::array::from_fn(|k| [self.center[k] - w, self.center[k] + w]),
        }
    }
}

/// `j = j0 G(x) g'(t)`, `ρ = -(j0 · grad G(x)) g(t)` with Gaussians
/// `G(x) = exp(-|x - c|²/(2σ²))` and `g(t) = exp(-(t - tc)²/(2σt²))`.
/// Continuity holds exactly and the derivatives are supplied analytically.
pub fn gaussian_pulse(p: GaussianPulse) -> Result<SourceSpec> {
    p.validate()?;
    let spatial = move |x: [f64; 3]| {
        let d: [f64; 3] = std::array::from_fn(|k| x[k] - p.center[k]);
        let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        let g = (-r2 / (2.0 * p.sigma * p.sigma)).exp();
        // j0 · grad G
        let dot = -(p.j0[0] * d[0] + p.j0[1] * d[1] + p.j0[2] * d[2]) / (p.sigma * p.sigma) * g;
        (g, dot)
    };
    let temporal = move |t: f64| {
        let u = (t - p.t_center) / p.sigma_t;
        let g = (-0.5 * u * u).exp();
        let g1 = -u / p.sigma_t * g;
        (g, g1)
    };
    Ok(SourceSpec::new(
        move |t, x| -spatial(x).1 * temporal(t).0,
        move |t, x| {
            let s = spatial(x).0 * temporal(t).1;
            p.j0.map(|c| c * s)
        },
    )
    .with_rho_t(move |t, x| -spatial(x).1 * temporal(t).1)
    .with_div_j(move |t, x| spatial(x).1 * temporal(t).1)
    .with_support(p.support()))
}

/// Parameters of [`compact_dipole`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompactDipole {
    pub j0: [f64; 3],
    pub center: [f64; 3],
    pub radius: f64,
    pub t_center: f64,
    pub half_width: f64,
}

/// `(1 - u²)⁴` for `|u| < 1`, zero elsewhere, with its derivative.
fn bump(u: f64) -> (f64, f64) {
    if u.abs() >= 1.0 {
        (0.0, 0.0)
    } else {
        let w = 1.0 - u * u;
        (w.powi(4), -8.0 * u * w.powi(3))
    }
}

/// Dipole source like [`gaussian_pulse`] with the Gaussians replaced by
/// `C³` bumps, so it vanishes identically outside a ball of `radius` and
/// outside `|t - t_center| < half_width`.
pub fn compact_dipole(p: CompactDipole) -> Result<SourceSpec> {
    if !(p.radius > 0.0 && p.half_width > 0.0) {
        return Err(Error::InvalidParameter("compact dipole radius and width must be positive".into()));
    }
    let spatial = move |x: [f64; 3]| {
        let d: [f64; 3] = std::array::from_fn(|k| x[k] - p.center[k]);
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() / p.radius;
        // b(x) = (1 - r²)⁴, grad b = -8 (1 - r²)³ d / R²
        if r >= 1.0 {
            return (0.0, 0.0);
        }
        let w = 1.0 - r * r;
        let dot = p.j0[0] * d[0] + p.j0[1] * d[1] + p.j0[2] * d[2];
        (w.powi(4), -8.0 * w.powi(3) * dot / (p.radius * p.radius))
    };
    let temporal = move |t: f64| {
        let (g, g1) = bump((t - p.t_center) / p.half_width);
        (g, g1 / p.half_width)
    };
    Ok(SourceSpec::new(
        move |t, x| -spatial(x).1 * temporal(t).0,
        move |t, x| {
            let s = spatial(x).0 * temporal(t).1;
            p.j0.map(|c| c * s)
        },
    )
    .with_rho_t(move |t, x| -spatial(x).1 * temporal(t).1)
    .with_div_j(move |t, x| spatial(x).1 * temporal(t).1)
    .with_support(SupportBox {
        t: [p.t_center - p.half_width, p.t_center + p.half_width],
        x: std::array::from_fn(|k| [p.center[k] - p.radius, p.center[k] + p.radius]),
    }))
}

/// Parameters of [`static_charge`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaticCharge {
    pub charge: f64,
    pub center: [f64; 3],
    pub sigma: f64,
}

impl Default for StaticCharge {
    fn default() -> Self {
        Self {
            charge: 1.0,
            center: [0.0; 3],
            sigma: 0.3,
        }
    }
}

/// Time-independent Gaussian charge cloud with total charge `charge` and no
/// current. Its temporal support is unbounded.
pub fn static_charge(p: StaticCharge) -> Result<SourceSpec> {
    if !(p.sigma > 0.0) {
        return Err(Error::InvalidParameter("static charge width must be positive".into()));
    }
    let norm = p.charge / ((2.0 * std::f64::consts::PI).powf(1.5) * p.sigma.powi(3));
    let w = 8.0 * p.sigma;
    Ok(SourceSpec::new(
        move |_, x| {
            let r2: f64 = (0..3).map(|k| (x[k] - p.center[k]).powi(2)).sum();
            norm * (-r2 / (2.0 * p.sigma * p.sigma)).exp()
        },
        |_, _| [0.0; 3],
    )
    .with_rho_t(|_, _| 0.0)
    .with_div_j(|_, _| 0.0)
    .with_support(SupportBox {
        t: [f64::NEG_INFINITY, f64::INFINITY],
        x: std::array::from_fn(|k| [p.center[k] - w, p.center[k] + w]),
    }))
}

/// `(ρ, j1, j2, j3)` tabulated on a regular `(t, x1, x2, x3)` lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSource {
    /// First node on each axis.
    pub origin: [f64; 4],
    pub steps: [f64; 4],
    pub counts: [usize; 4],
    /// Values in lexicographic `(t, x1, x2, x3)` order.
    pub values: Vec<[f64; 4]>,
}

impl SampledSource {
    /// Builds the table from unordered rows `(t, x1, x2, x3, ρ, j1, j2, j3)`
    /// that must fill a regular lattice exactly once.
    pub fn from_rows(rows: &[[f64; 8]]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("sampled source has no rows".into()));
        }
        let mut axes: [Vec<f64>; 4] = Default::default();
        for (ax, vals) in axes.iter_mut().enumerate() {
            let mut v: Vec<f64> = rows.iter().map(|r| r[ax]).collect();
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter("non-finite coordinate".into()));
            }
            v.sort_by(f64::total_cmp);
            v.dedup();
            *vals = v;
        }
        let counts: [usize; 4] = std::array::from_fn(|a| axes[a].len());
        let mut steps = [1.0; 4];
        for a in 0..4 {
            if counts[a] > 1 {
                let h = (axes[a][counts[a] - 1] - axes[a][0]) / (counts[a] - 1) as f64;
                if axes[a].windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0)) {
                    return Err(Error::InvalidParameter(format!("axis {a} is not uniformly spaced")));
                }
                steps[a] = h;
            }
        }
        let total: usize = counts.iter().product();
        if total != rows.len() {
            return Err(Error::InvalidParameter(format!(
                "{} rows do not fill a {:?} lattice",
                rows.len(),
                counts
            )));
        }
        let origin: [f64; 4] = std::array::from_fn(|a| axes[a][0]);
        let mut values = vec![[f64::NAN; 4]; total];
        for r in rows {
            let idx: [usize; 4] = std::array::from_fn(|a| ((r[a] - origin[a]) / steps[a]).round() as usize);
            let lin = ((idx[0] * counts[1] + idx[1]) * counts[2] + idx[2]) * counts[3] + idx[3];
            if !values[lin][0].is_nan() {
                return Err(Error::InvalidParameter(format!("duplicate lattice node at {:?}", &r[..4])));
            }
            values[lin] = [r[4], r[5], r[6], r[7]];
        }
        Ok(Self {
            origin,
            steps,
            counts,
            values,
        })
    }

    fn at(&self, i: [usize; 4]) -> [f64; 4] {
        let c = self.counts;
        self.values[((i[0] * c[1] + i[1]) * c[2] + i[2]) * c[3] + i[3]]
    }

    /// Multilinear interpolation; zero outside the lattice.
    pub fn interpolate(&self, t: f64, x: [f64; 3]) -> [f64; 4] {
        let p = [t, x[0], x[1], x[2]];
        let mut lo = [0usize; 4];
        let mut frac = [0.0; 4];
        for a in 0..4 {
            let u = (p[a] - self.origin[a]) / self.steps[a];
            let last = (self.counts[a] - 1) as f64;
            if !(u >= -1e-12 && u <= last + 1e-12) {
                return [0.0; 4];
            }
            let u = u.clamp(0.0, last);
            let i = (u.floor() as usize).min(self.counts[a].saturating_sub(2));
            lo[a] = i;
            frac[a] = if self.counts[a] > 1 { u - i as f64 } else { 0.0 };
        }
        let mut out = [0.0; 4];
        for corner in 0..16usize {
            let mut w = 1.0;
            let mut idx = lo;
            for a in 0..4 {
                if corner >> a & 1 == 1 {
                    if self.counts[a] == 1 {
                        w = 0.0;
                        break;
                    }
                    idx[a] += 1;
                    w *= frac[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            if w != 0.0 {
                let v = self.at(idx);
                for k in 0..4 {
                    out[k] += w * v[k];
                }
            }
        }
        out
    }

    pub fn support(&self) -> SupportBox {
        let end = |a: usize| self.origin[a] + self.steps[a] * (self.counts[a] - 1) as f64;
        SupportBox {
            t: [self.origin[0], end(0)],
            x: std::array::from_fn(|k| [self.origin[k + 1], end(k + 1)]),
        }
    }

    /// Source whose derivatives are taken by finite differences.
    pub fn into_source(self) -> SourceSpec {
        let support = self.support();
        let table = std::sync::Arc::new(self);
        let t2 = table.clone();
        SourceSpec::new(
            move |t, x| table.interpolate(t, x)[0],
            move |t, x| {
                let v = t2.interpolate(t, x);
                [v[1], v[2], v[3]]
            },
        )
        .with_support(support)
    }
}
