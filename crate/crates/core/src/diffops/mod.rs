//! Central finite-difference application of the vector-calculus and
//! quaternionic operators to sampled fields.
//!
//! Every operator evaluates only on the interior of its input grid: the
//! output grid drops `order/2` nodes at both ends of every axis, time
//! included, and no one-sided stencils are used. Mixed derivatives such as
//! `∂t ∂k` are tensor products of the 1-D stencils, so composite operators
//! need the same margin as their first-order parts.

mod grid;

use num_complex::Complex64;
use rayon::prelude::*;

pub use grid::{common_grid, SampledField, SpacetimeGrid};

use crate::bq::Biquaternion;
use crate::error::{Error, Result};
use crate::medium::MediumParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative size below which a scalar or vector part counts as absent.
const SHAPE_TOL: f64 = 1e-12;

/// Accuracy order of the central stencils; the boundary policy is always
/// shrink-domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StencilSpec {
    order: usize,
}

impl Default for StencilSpec {
    fn default() -> Self {
        Self { order: 2 }
    }
}

impl StencilSpec {
    pub fn new(order: usize) -> Result<Self> {
        match order {
            2 | 4 => Ok(Self { order }),
            _ => Err(Error::InvalidParameter(format!("stencil order must be 2 or 4, got {order}"))),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn margin(&self) -> usize {
        self.order / 2
    }

    fn taps(&self, derivative: u8) -> &'static [(isize, f64)] {
        match (self.order, derivative) {
            (_, 0) => &[(0, 1.0)],
            (2, 1) => &[(-1, -0.5), (1, 0.5)],
            (2, 2) => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
            (4, 1) => &[(-2, 1.0 / 12.0), (-1, -2.0 / 3.0), (1, 2.0 / 3.0), (2, -1.0 / 12.0)],
            (4, 2) => &[
                (-2, -1.0 / 12.0),
                (-1, 4.0 / 3.0),
                (0, -2.5),
                (1, 4.0 / 3.0),
                (2, -1.0 / 12.0),
            ],
            _ => unreachable!("derivative order {derivative} not tabulated"),
        }
    }
}

/// Stencil access around one interior node.
pub struct Node<'a> {
    field: &'a SampledField,
    idx: [usize; 4],
    stencil: StencilSpec,
}

impl Node<'_> {
    pub fn coord(&self) -> (f64, [f64; 3]) {
        self.field.grid().coord(self.idx)
    }

    pub fn value(&self) -> Biquaternion {
        self.field.at(self.idx)
    }

    /// Mixed partial derivative with `orders[a]` derivatives along axis `a`
    /// (0 = t, 1..=3 = x1..x3), each order at most 2.
    pub fn d(&self, orders: [u8; 4]) -> Biquaternion {
        let steps = self.field.grid().steps();
        let taps = orders.map(|o| self.stencil.taps(o));
        let mut scale = 1.0;
        for a in 0..4 {
            scale /= steps[a].powi(orders[a] as i32);
        }
        let at = |base: usize, off: isize| (base as isize + off) as usize;
        let mut acc = Biquaternion::ZERO;
        for &(o0, w0) in taps[0] {
            let i0 = at(self.idx[0], o0);
            for &(o1, w1) in taps[1] {
                let i1 = at(self.idx[1], o1);
                let w01 = w0 * w1;
                for &(o2, w2) in taps[2] {
                    let i2 = at(self.idx[2], o2);
                    let w012 = w01 * w2;
                    for &(o3, w3) in taps[3] {
                        let i3 = at(self.idx[3], o3);
                        acc += self.field.at([i0, i1, i2, i3]) * (w012 * w3);
                    }
                }
            }
        }
        acc * scale
    }

    /// First derivative along one axis.
    pub fn d1(&self, axis: usize) -> Biquaternion {
        let mut o = [0u8; 4];
        o[axis] = 1;
        self.d(o)
    }

    /// `∂t` followed by `∂_axis`, or `∂t²` when `axis == 0`.
    pub fn dt_d1(&self, axis: usize) -> Biquaternion {
        let mut o = [1u8, 0, 0, 0];
        o[axis] += 1;
        self.d(o)
    }
}

/// Evaluates `op` at every interior node of `field`; the result lives on
/// the shrunken grid.
pub fn apply_nodewise<F>(field: &SampledField, stencil: StencilSpec, op: F) -> Result<SampledField>
where
    F: Fn(&Node<'_>) -> Biquaternion + Sync,
{
    let m = stencil.margin();
    let out = field.grid().shrink(m)?;
    let values = (0..out.len())
        .into_par_iter()
        .map(|lin| {
            let i = out.unravel(lin);
            let node = Node {
                field,
                idx: [i[0] + m, i[1] + m, i[2] + m, i[3] + m],
                stencil,
            };
            op(&node)
        })
        .collect();
    SampledField::new(out, values)
}

fn units() -> [Biquaternion; 3] {
    [Biquaternion::unit(1), Biquaternion::unit(2), Biquaternion::unit(3)]
}

/// `D g = i1 ∂1 g + i2 ∂2 g + i3 ∂3 g` from the per-axis derivatives.
#[inline]
fn moisil_teodoresco(d: [Biquaternion; 3]) -> Biquaternion {
    let u = units();
    u[0] * d[0] + u[1] * d[1] + u[2] * d[2]
}

fn has_scalar_part(field: &SampledField) -> bool {
    field.max_scalar_norm() > SHAPE_TOL * field.max_norm()
}

fn check_vectorial(field: &SampledField, what: &str) -> Result<()> {
    if has_scalar_part(field) {
        return Err(Error::Shape(format!("{what} needs a purely vectorial field")));
    }
    Ok(())
}

fn check_scalar(field: &SampledField, what: &str) -> Result<()> {
    let scale = field.max_norm();
    if field.max_vector_norm() > SHAPE_TOL * scale {
        return Err(Error::Shape(format!("{what} needs a purely scalar field")));
    }
    Ok(())
}

/// Single partial derivative along `axis`.
pub fn apply_partial(field: &SampledField, axis: usize, stencil: StencilSpec) -> Result<SampledField> {
    if axis > 3 {
        return Err(Error::InvalidParameter(format!("axis must be 0..=3, got {axis}")));
    }
    apply_nodewise(field, stencil, |n| n.d1(axis))
}

/// Moisil-Teodoresco operator `D = i1 ∂1 + i2 ∂2 + i3 ∂3`, acting from the
/// left.
pub fn apply_d(field: &SampledField, stencil: StencilSpec) -> Result<SampledField> {
    apply_nodewise(field, stencil, |n| moisil_teodoresco([n.d1(1), n.d1(2), n.d1(3)]))
}

/// `D + α`.
pub fn apply_d_alpha(field: &SampledField, alpha: Complex64, stencil: StencilSpec) -> Result<SampledField> {
    apply_nodewise(field, stencil, |n| {
        moisil_teodoresco([n.d1(1), n.d1(2), n.d1(3)]) + n.value() * alpha
    })
}

fn apply_m_signed(field: &SampledField, params: &MediumParams, stencil: StencilSpec, sign: f64) -> Result<SampledField> {
    let s = params.sqrt_eps_mu();
    let bs = params.beta() * s;
    let c = I * sign;
    apply_nodewise(field, stencil, move |n| {
        let dtd = moisil_teodoresco([n.dt_d1(1), n.dt_d1(2), n.dt_d1(3)]);
        let d = moisil_teodoresco([n.d1(1), n.d1(2), n.d1(3)]);
        dtd * bs + n.d1(0) * s + d * c
    })
}

/// `M = β sqrt(εμ) ∂t D + sqrt(εμ) ∂t - iD`. Rejects `β = 0`; the
/// non-chiral operator is [`apply_m_nonchiral`].
pub fn apply_m(field: &SampledField, params: &MediumParams, stencil: StencilSpec) -> Result<SampledField> {
    params.require_chiral()?;
    apply_m_signed(field, params, stencil, -1.0)
}

/// `M* = β sqrt(εμ) ∂t D + sqrt(εμ) ∂t + iD`.
pub fn apply_m_star(field: &SampledField, params: &MediumParams, stencil: StencilSpec) -> Result<SampledField> {
    params.require_chiral()?;
    apply_m_signed(field, params, stencil, 1.0)
}

/// `sqrt(εμ) ∂t - iD`, the `β = 0` form of `M`. Ignores `params.beta()`.
pub fn apply_m_nonchiral(field: &SampledField, params: &MediumParams, stencil: StencilSpec) -> Result<SampledField> {
    let p = params.with_beta(0.0)?;
    apply_m_signed(field, &p, stencil, -1.0)
}

/// `sqrt(εμ) ∂t + iD`, the `β = 0` form of `M*`. Ignores `params.beta()`.
pub fn apply_m_star_nonchiral(field: &SampledField, params: &MediumParams, stencil: StencilSpec) -> Result<SampledField> {
    let p = params.with_beta(0.0)?;
    apply_m_signed(field, &p, stencil, 1.0)
}

/// Left-hand side of the chiral wave equation,
/// `rot rot U + εμ ∂t² U + 2βεμ ∂t² rot U + β²εμ ∂t² rot rot U`,
/// for purely vectorial `U`.
pub fn apply_chiral_wave(field: &SampledField, params: &MediumParams, stencil: StencilSpec) -> Result<SampledField> {
    if has_scalar_part(field) {
        return Err(Error::Domain("the chiral wave operator needs a purely vectorial field".into()));
    }
    let em = params.epsilon() * params.mu();
    let beta = params.beta();
    apply_nodewise(field, stencil, move |n| {
        // t_order selects plain (0) or ∂t² (2) versions of rot and rot rot
        let comp = |q: Biquaternion, k: usize| q.v[k];
        let rot = |t_order: u8| {
            let d = |j: usize, k: usize| {
                let mut o = [t_order, 0, 0, 0];
                o[j + 1] += 1;
                comp(n.d(o), k)
            };
            [d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)]
        };
        let rotrot = |t_order: u8| {
            let mut out = [Complex64::new(0.0, 0.0); 3];
            for (i, o_i) in out.iter_mut().enumerate() {
                for j in 0..3 {
                    if j == i {
                        continue;
                    }
                    let mut mixed = [t_order, 0, 0, 0];
                    mixed[i + 1] += 1;
                    mixed[j + 1] += 1;
                    let mut pure = [t_order, 0, 0, 0];
                    pure[j + 1] = 2;
                    *o_i += comp(n.d(mixed), j) - comp(n.d(pure), i);
                }
            }
            out
        };
        let rr = rotrot(0);
        let rr_tt = rotrot(2);
        let r_tt = rot(2);
        let u_tt = n.d([2, 0, 0, 0]);
        let v = std::array::from_fn(|k| {
            rr[k] + em * u_tt.v[k] + 2.0 * beta * em * r_tt[k] + beta * beta * em * rr_tt[k]
        });
        Biquaternion::vector(v)
    })
}

/// Non-chiral wave operator `εμ ∂t² - Δ`, componentwise.
pub fn apply_wave_nonchiral(field: &SampledField, params: &MediumParams, stencil: StencilSpec) -> Result<SampledField> {
    let em = params.epsilon() * params.mu();
    apply_nodewise(field, stencil, move |n| {
        let lap = n.d([0, 2, 0, 0]) + n.d([0, 0, 2, 0]) + n.d([0, 0, 0, 2]);
        n.d([2, 0, 0, 0]) * em - lap
    })
}

/// Curl of the vector part; the input must be purely vectorial.
pub fn apply_rot(field: &SampledField, stencil: StencilSpec) -> Result<SampledField> {
    check_vectorial(field, "rot")?;
    apply_nodewise(field, stencil, |n| {
        let d = [n.d1(1).v, n.d1(2).v, n.d1(3).v];
        Biquaternion::vector([d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]])
    })
}

/// Divergence of the vector part, returned as a scalar field.
pub fn apply_div(field: &SampledField, stencil: StencilSpec) -> Result<SampledField> {
    check_vectorial(field, "div")?;
    apply_nodewise(field, stencil, |n| {
        Biquaternion::scalar(n.d1(1).v[0] + n.d1(2).v[1] + n.d1(3).v[2])
    })
}

/// Gradient of the scalar part, returned as a vector field.
pub fn apply_grad(field: &SampledField, stencil: StencilSpec) -> Result<SampledField> {
    check_scalar(field, "grad")?;
    apply_nodewise(field, stencil, |n| Biquaternion::vector([n.d1(1).s, n.d1(2).s, n.d1(3).s]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bq::Biquaternion as Bq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(n: usize, h: f64) -> SpacetimeGrid {
        SpacetimeGrid::uniform(h, h, [n; 4], [0.1, -0.2, 0.3, 0.05]).unwrap()
    }

    fn params() -> MediumParams {
        MediumParams::new(1.5, 0.8, 0.4).unwrap()
    }

    fn s2() -> StencilSpec {
        StencilSpec::new(2).unwrap()
    }

    fn s4() -> StencilSpec {
        StencilSpec::new(4).unwrap()
    }

    #[test]
    fn stencil_orders() {
        assert!(StencilSpec::new(3).is_err());
        assert_eq!(StencilSpec::default().margin(), 1);
        assert_eq!(s4().margin(), 2);
    }

    #[test]
    fn constant_fields_are_annihilated() {
        let g = grid(5, 0.1);
        let q = Bq::new(c(1.0, 2.0), [c(0.5, -1.0), c(3.0, 0.0), c(0.0, 1.0)]);
        let f = SampledField::from_fn(g, |_, _| q);
        let p = params();
        for st in [s2(), s4()] {
            assert!(apply_d(&f, st).unwrap().max_norm() < 1e-10);
            assert!(apply_m(&f, &p, st).unwrap().max_norm() < 1e-10);
            assert!(apply_m_star(&f, &p, st).unwrap().max_norm() < 1e-10);
        }
        let v = SampledField::from_fn(g, |_, _| Bq::vector(q.v));
        assert!(apply_chiral_wave(&v, &p, s2()).unwrap().max_norm() < 1e-8);
    }

    #[test]
    fn d_of_linear_field_is_exact() {
        // u = x2 i1: div u = 0, rot u = (0, 0, -1), so D u = (0; -i3)
        let g = grid(4, 0.25);
        let f = SampledField::from_fn(g, |_, x| Bq::from_real_vector([x[1], 0.0, 0.0]));
        let d = apply_d(&f, s2()).unwrap();
        for v in d.values() {
            assert!((*v + Bq::unit(3)).norm() < 1e-13);
        }
        let r = apply_rot(&f, s2()).unwrap();
        for v in r.values() {
            assert!((*v + Bq::unit(3)).norm() < 1e-13);
        }
        // rot (0, 0, x1) = (0, -1, 0)
        let f = SampledField::from_fn(g, |_, x| Bq::from_real_vector([0.0, 0.0, x[0]]));
        for v in apply_rot(&f, s2()).unwrap().values() {
            assert!((*v + Bq::unit(2)).norm() < 1e-13);
        }
        // rot (0, x1, 0) = (0, 0, 1)
        let f = SampledField::from_fn(g, |_, x| Bq::from_real_vector([0.0, x[0], 0.0]));
        for v in apply_rot(&f, s2()).unwrap().values() {
            assert!((*v - Bq::unit(3)).norm() < 1e-13);
        }
    }

    #[test]
    fn d_on_real_vector_is_minus_div_plus_rot() {
        let g = grid(6, 0.1);
        let f = SampledField::from_fn(g, |t, x| {
            Bq::from_real_vector([x[1] * x[2] + t, x[0].sin(), x[0] * x[1] * x[2]])
        });
        let d = apply_d(&f, s2()).unwrap();
        let div = apply_div(&f, s2()).unwrap();
        let rot = apply_rot(&f, s2()).unwrap();
        for ((a, b), r) in d.values().iter().zip(div.values()).zip(rot.values()) {
            assert!((*a - (*r - *b)).norm() < 1e-12);
        }
    }

    #[test]
    fn time_harmonic_spatially_constant() {
        // V = e^{iωt}(0; i1): M V = sqrt(εμ) ∂t V, and ∂t e^{iωt} -> i sin(ω dt)/dt
        let p = params();
        let omega = 2.0;
        let dt = 0.01;
        let g = SpacetimeGrid::uniform(dt, 0.1, [5, 3, 3, 3], [0.0; 4]).unwrap();
        let f = SampledField::from_fn(g, |t, _| Bq::unit(1) * (c(0.0, omega * t)).exp());
        let m = apply_m(&f, &p, s2()).unwrap();
        let exact_factor = c(0.0, p.sqrt_eps_mu() * omega);
        for (lin, v) in m.values().iter().enumerate() {
            let (t, _) = m.grid().coord(m.grid().unravel(lin));
            let expected = Bq::unit(1) * (c(0.0, omega * t)).exp() * exact_factor;
            assert!((*v - expected).norm() < 1e-4 * expected.norm());
        }
    }

    #[test]
    fn m_star_is_conjugate_of_m_on_real_fields() {
        let p = params();
        let g = grid(5, 0.1);
        let f = SampledField::from_fn(g, |t, x| {
            Bq::from_components([t * x[0], 0.0, x[1].cos(), 0.0, (t + x[2]).sin(), 0.0, x[0] * x[1], 0.0])
        });
        let m = apply_m(&f, &p, s2()).unwrap();
        let ms = apply_m_star(&f, &p, s2()).unwrap();
        for (a, b) in m.values().iter().zip(ms.values()) {
            assert!((a.conj_complex() - *b).norm() < 1e-12);
        }
    }

    #[test]
    fn sign_of_the_d_term() {
        // g = x1 + t: D g = i1, ∂t g = 1, ∂t D g = 0
        let p = params();
        let g = SampledField::from_fn(grid(3, 0.2), |t, x| Bq::from(x[0] + t));
        let s = p.sqrt_eps_mu();
        let m = apply_m(&g, &p, s2()).unwrap();
        let ms = apply_m_star(&g, &p, s2()).unwrap();
        let expected = Bq::from(s) - Bq::unit(1) * c(0.0, 1.0);
        assert!((m.values()[0] - expected).norm() < 1e-12);
        assert!((ms.values()[0] - expected.conj_complex()).norm() < 1e-12);
    }

    #[test]
    fn beta_zero_rejected_by_chiral_operator() {
        let p = MediumParams::new(1.0, 1.0, 0.0).unwrap();
        let f = SampledField::zeros(grid(3, 0.1));
        assert!(apply_m(&f, &p, s2()).is_err());
        assert!(apply_m_nonchiral(&f, &p, s2()).is_ok());
    }

    #[test]
    fn grid_too_small() {
        let g = SpacetimeGrid::uniform(0.1, 0.1, [3, 3, 2, 3], [0.0; 4]).unwrap();
        let f = SampledField::zeros(g);
        assert!(matches!(apply_d(&f, s2()), Err(Error::Dimension(_))));
        let g = grid(4, 0.1);
        assert!(matches!(apply_d(&SampledField::zeros(g), s4()), Err(Error::Dimension(_))));
    }

    #[test]
    fn shape_checks() {
        let g = grid(3, 0.1);
        let s = SampledField::from_fn(g, |_, _| Bq::from(1.0));
        let v = SampledField::from_fn(g, |_, _| Bq::unit(1));
        assert!(matches!(apply_rot(&s, s2()), Err(Error::Shape(_))));
        assert!(matches!(apply_div(&s, s2()), Err(Error::Shape(_))));
        assert!(matches!(apply_grad(&v, s2()), Err(Error::Shape(_))));
        assert!(matches!(apply_chiral_wave(&s, &params(), s2()), Err(Error::Domain(_))));
    }

    #[test]
    fn vector_identities() {
        let g = grid(9, 0.05);
        let phi = SampledField::from_fn(g, |t, x| Bq::from((x[0] * x[1]).sin() + x[2] * x[2] * t));
        let rg = apply_rot(&apply_grad(&phi, s2()).unwrap(), s2()).unwrap();
        assert!(rg.max_norm() < 1e-10);
        let u = SampledField::from_fn(g, |t, x| {
            Bq::from_real_vector([(x[1] + t).sin(), x[0] * x[2], (x[0] * x[1]).cos()])
        });
        let dr = apply_div(&apply_rot(&u, s2()).unwrap(), s2()).unwrap();
        assert!(dr.max_norm() < 1e-10);
    }

    #[test]
    fn linearity_of_m() {
        let p = params();
        let g = grid(5, 0.1);
        let f = SampledField::from_fn(g, |t, x| Bq::from_components([t, x[0], x[1] * t, 1.0, x[2], 0.0, t * t, x[0] * x[1]]));
        let h = SampledField::from_fn(g, |t, x| Bq::from_components([x[2].sin(), t, 0.0, x[1], 1.0, t * x[0], 0.0, 2.0]));
        let (a, b) = (c(1.5, -0.5), c(-0.25, 2.0));
        let comb = SampledField::new(
            *f.grid(),
            f.values().iter().zip(h.values()).map(|(x, y)| *x * a + *y * b).collect(),
        )
        .unwrap();
        let lhs = apply_m(&comb, &p, s2()).unwrap();
        let mf = apply_m(&f, &p, s2()).unwrap();
        let mh = apply_m(&h, &p, s2()).unwrap();
        for ((l, x), y) in lhs.values().iter().zip(mf.values()).zip(mh.values()) {
            let r = *x * a + *y * b;
            assert!((*l - r).norm() <= 1e-12 * r.norm().max(1.0));
        }
    }

    #[test]
    fn d_commutes_with_dt() {
        let g = grid(9, 0.05);
        let f = SampledField::from_fn(g, |t, x| {
            Bq::from_components([(t * x[0]).sin(), 0.0, x[1] * t * t, x[2], (x[0] + x[1] * t).cos(), 0.0, t * x[2], x[0]])
        });
        let a = apply_d(&apply_partial(&f, 0, s2()).unwrap(), s2()).unwrap();
        let b = apply_partial(&apply_d(&f, s2()).unwrap(), 0, s2()).unwrap();
        assert!(a.difference(&b).unwrap().max_norm() < 1e-10);
    }

    fn plane_wave_errors(order: usize) -> Vec<(f64, f64)> {
        // f = e^{i<k,x>}(1; 0): D f = i (k1 i1 + k2 i2 + k3 i3) f
        let k = [1.3, -0.7, 0.4];
        let st = StencilSpec::new(order).unwrap();
        [0.08, 0.04, 0.02]
            .iter()
            .map(|&h| {
                let g = SpacetimeGrid::uniform(h, h, [5, 9, 9, 9], [0.0, 0.2, 0.1, -0.3]).unwrap();
                let f = SampledField::from_fn(g, |_, x| Bq::from(c(0.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]).exp()));
                let d = apply_d(&f, st).unwrap();
                let kv = Bq::vector(k.map(|kk| c(0.0, kk)));
                let err = d
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(lin, v)| {
                        let (_, x) = d.grid().coord(d.grid().unravel(lin));
                        let exact = kv * Bq::from(c(0.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]).exp());
                        (*v - exact).norm()
                    })
                    .fold(0.0, f64::max);
                (h, err)
            })
            .collect()
    }

    #[test]
    fn plane_wave_convergence_order() {
        for order in [2usize, 4] {
            let e = plane_wave_errors(order);
            let slope = crate::convergence::fit_order(&e).unwrap().order;
            assert!((slope - order as f64).abs() < 0.3, "order {order}: slope {slope}");
        }
    }
}
