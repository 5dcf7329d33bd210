//! Translation between the physical fields `(E, H, ρ, j)` and the
//! quaternionic field `V = E - i sqrt(μ/ε) H` with right-hand side
//! `MV = -sqrt(μ/ε) j - β sqrt(μ/ε) ∂t ρ + iρ/ε`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bq::Biquaternion;
use crate::diffops::{apply_m, apply_nodewise, Node, SampledField, SpacetimeGrid, StencilSpec};
use crate::error::{Error, Result};
use crate::manufactured::ManufacturedMaxwell;
use crate::medium::MediumParams;

/// Default scalar-part tolerance of [`recover_eh`], relative to the field.
pub const RECOVER_TOL: f64 = 1e-12;
/// Continuity tolerance for sources with analytic derivatives.
pub const ANALYTIC_CONTINUITY_TOL: f64 = 1e-10;
/// Constant in the `C h^order` continuity tolerance for sampled derivatives.
pub const SAMPLED_CONTINUITY_FACTOR: f64 = 10.0;

pub type ScalarFn = Arc<dyn Fn(f64, [f64; 3]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(f64, [f64; 3]) -> [f64; 3] + Send + Sync>;

/// Real electric and magnetic fields sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EMField {
    grid: SpacetimeGrid,
    e: Vec<[f64; 3]>,
    h: Vec<[f64; 3]>,
}

impl EMField {
    pub fn new(grid: SpacetimeGrid, e: Vec<[f64; 3]>, h: Vec<[f64; 3]>) -> Result<Self> {
        if e.len() != grid.len() || h.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "E has {} and H has {} samples for a grid of {}",
                e.len(),
                h.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, e, h })
    }

    pub fn zeros(grid: SpacetimeGrid) -> Self {
        Self {
            grid,
            e: vec![[0.0; 3]; grid.len()],
            h: vec![[0.0; 3]; grid.len()],
        }
    }

    /// Samples `f(t, x) = (E, H)` at every node.
    pub fn from_fn<F>(grid: SpacetimeGrid, f: F) -> Self
    where
        F: Fn(f64, [f64; 3]) -> ([f64; 3], [f64; 3]) + Sync,
    {
        let (e, h) = (0..grid.len())
            .into_par_iter()
            .map(|lin| {
                let (t, x) = grid.coord(grid.unravel(lin));
                f(t, x)
            })
            .unzip();
        Self { grid, e, h }
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        &self.grid
    }

    pub fn e(&self) -> &[[f64; 3]] {
        &self.e
    }

    pub fn h(&self) -> &[[f64; 3]] {
        &self.h
    }

    /// Packs the fields as `E + iH` so one stencil pass differentiates both.
    fn packed(&self) -> SampledField {
        let values = self
            .e
            .iter()
            .zip(&self.h)
            .map(|(e, h)| Biquaternion::vector(std::array::from_fn(|k| Complex64::new(e[k], h[k]))))
            .collect();
        SampledField::new(self.grid, values).expect("lengths checked at construction")
    }
}

/// Axis-aligned spacetime box containing the support of a source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportBox {
    pub t: [f64; 2],
    pub x: [[f64; 2]; 3],
}

impl SupportBox {
    pub fn contains(&self, t: f64, x: [f64; 3]) -> bool {
        self.t[0] <= t && t <= self.t[1] && (0..3).all(|k| self.x[k][0] <= x[k] && x[k] <= self.x[k][1])
    }

    pub fn contains_box(&self, other: &SupportBox) -> bool {
        self.t[0] <= other.t[0]
            && other.t[1] <= self.t[1]
            && (0..3).all(|k| self.x[k][0] <= other.x[k][0] && other.x[k][1] <= self.x[k][1])
    }
}

/// Charge and current densities given as callables, optionally with the
/// analytic `∂t ρ` and `div j` used by the continuity check.
#[derive(Clone)]
pub struct SourceSpec {
    rho: ScalarFn,
    j: VectorFn,
    rho_t: Option<ScalarFn>,
    div_j: Option<ScalarFn>,
    support: Option<SupportBox>,
}

impl std::fmt::Debug for SourceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SourceSpec")
            .field("analytic_derivatives", &self.has_analytic_derivatives())
            .field("support", &self.support)
            .finish()
    }
}

/// Outcome of a continuity check `∂t ρ + div j = 0` over a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuityReport {
    /// Largest `|∂t ρ + div j|` over the nodes.
    pub residual: f64,
    /// Largest `|∂t ρ| + |div j|`, the reference magnitude.
    pub scale: f64,
    pub tolerance: f64,
    pub analytic: bool,
}

impl ContinuityReport {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

impl SourceSpec {
    pub fn new<R, J>(rho: R, j: J) -> Self
    where
        R: Fn(f64, [f64; 3]) -> f64 + Send + Sync + 'static,
        J: Fn(f64, [f64; 3]) -> [f64; 3] + Send + Sync + 'static,
    {
        Self {
            rho: Arc::new(rho),
            j: Arc::new(j),
            rho_t: None,
            div_j: None,
            support: None,
        }
    }

    pub fn zero() -> Self {
        Self::new(|_, _| 0.0, |_, _| [0.0; 3])
            .with_rho_t(|_, _| 0.0)
            .with_div_j(|_, _| 0.0)
    }

    pub fn with_rho_t<F>(mut self, f: F) -> Self
    where
        F: Fn(f64, [f64; 3]) -> f64 + Send + Sync + 'static,
    {
        self.rho_t = Some(Arc::new(f));
        self
    }

    pub fn with_div_j<F>(mut self, f: F) -> Self
    where
        F: Fn(f64, [f64; 3]) -> f64 + Send + Sync + 'static,
    {
        self.div_j = Some(Arc::new(f));
        self
    }

    pub fn with_support(mut self, support: SupportBox) -> Self {
        self.support = Some(support);
        self
    }

    /// Sources of a manufactured solution, with exact derivatives.
    pub fn from_manufactured(m: &ManufacturedMaxwell) -> Self {
        let (rho, j, rho_t, div_j) = (m.rho.clone(), m.j.clone(), m.rho.dt(), m.j.div());
        Self::new(move |t, x| rho.eval(t, x), move |t, x| j.eval(t, x))
            .with_rho_t(move |t, x| rho_t.eval(t, x))
            .with_div_j(move |t, x| div_j.eval(t, x))
    }

    /// Superposition of two sources; analytic derivatives and support boxes
    /// are kept when both operands have them.
    pub fn plus(&self, other: &SourceSpec) -> SourceSpec {
        let (a, b) = (self.clone(), other.clone());
        let (a2, b2) = (self.clone(), other.clone());
        let mut out = SourceSpec::new(
            move |t, x| a.rho(t, x) + b.rho(t, x),
            move |t, x| {
                let (u, v) = (a2.j(t, x), b2.j(t, x));
                std::array::from_fn(|k| u[k] + v[k])
            },
        );
        if let (Some(f), Some(g)) = (self.rho_t.clone(), other.rho_t.clone()) {
            out.rho_t = Some(Arc::new(move |t, x| f(t, x) + g(t, x)));
        }
        if let (Some(f), Some(g)) = (self.div_j.clone(), other.div_j.clone()) {
            out.div_j = Some(Arc::new(move |t, x| f(t, x) + g(t, x)));
        }
        if let (Some(s), Some(o)) = (self.support, other.support) {
            out.support = Some(SupportBox {
                t: [s.t[0].min(o.t[0]), s.t[1].max(o.t[1])],
                x: std::array::from_fn(|k| [s.x[k][0].min(o.x[k][0]), s.x[k][1].max(o.x[k][1])]),
            });
        }
        out
    }

    pub fn rho(&self, t: f64, x: [f64; 3]) -> f64 {
        (self.rho)(t, x)
    }

    pub fn j(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        (self.j)(t, x)
    }

    pub fn support(&self) -> Option<SupportBox> {
        self.support
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.rho_t.is_some() && self.div_j.is_some()
    }

    /// `∂t ρ`, analytic when available, otherwise a central difference with
    /// step `dt`.
    pub fn rho_t(&self, t: f64, x: [f64; 3], dt: f64, stencil: StencilSpec) -> f64 {
        match &self.rho_t {
            Some(f) => f(t, x),
            None => central_difference(|s| self.rho(s, x), t, dt, stencil),
        }
    }

    /// `div j`, analytic when available, otherwise central differences with
    /// steps `dx`.
    pub fn div_j(&self, t: f64, x: [f64; 3], dx: [f64; 3], stencil: StencilSpec) -> f64 {
        match &self.div_j {
            Some(f) => f(t, x),
            None => (0..3)
                .map(|k| {
                    central_difference(
                        |s| {
                            let mut y = x;
                            y[k] = s;
                            self.j(t, y)[k]
                        },
                        x[k],
                        dx[k],
                        stencil,
                    )
                })
                .sum(),
        }
    }

    /// Evaluates `∂t ρ + div j` on every node of `grid`.
    ///
    /// The tolerance is [`ANALYTIC_CONTINUITY_TOL`] times the reference
    /// magnitude (at least one) for analytic derivatives, and
    /// `SAMPLED_CONTINUITY_FACTOR · h^order` relative otherwise, where `h` is
    /// the largest grid step.
    pub fn continuity(&self, grid: &SpacetimeGrid, stencil: StencilSpec) -> ContinuityReport {
        let dx = grid.dx();
        let dt = grid.dt();
        let (residual, scale) = (0..grid.len())
            .into_par_iter()
            .map(|lin| {
                let (t, x) = grid.coord(grid.unravel(lin));
                let a = self.rho_t(t, x, dt, stencil);
                let b = self.div_j(t, x, dx, stencil);
                ((a + b).abs(), a.abs() + b.abs())
            })
            .reduce(|| (0.0, 0.0), |p, q| (p.0.max(q.0), p.1.max(q.1)));
        let analytic = self.has_analytic_derivatives();
        let tolerance = if analytic {
            ANALYTIC_CONTINUITY_TOL * scale.max(1.0)
        } else {
            let h = grid.steps().into_iter().fold(0.0, f64::max);
            SAMPLED_CONTINUITY_FACTOR * h.powi(stencil.order() as i32) * scale
        };
        ContinuityReport {
            residual,
            scale,
            tolerance,
            analytic,
        }
    }

    /// Like [`SourceSpec::continuity`] but fails when the tolerance is
    /// exceeded.
    pub fn check_continuity(&self, grid: &SpacetimeGrid, stencil: StencilSpec) -> Result<ContinuityReport> {
        let r = self.continuity(grid, stencil);
        if r.passed() {
            Ok(r)
        } else {
            Err(Error::Continuity {
                residual: r.residual,
                tolerance: r.tolerance,
            })
        }
    }

    /// The quaternionic right-hand side at one point.
    pub fn rhs_at(&self, t: f64, x: [f64; 3], params: &MediumParams, dt: f64, stencil: StencilSpec) -> Biquaternion {
        let kappa = params.impedance();
        let rho = self.rho(t, x);
        let rho_t = self.rho_t(t, x, dt, stencil);
        let j = self.j(t, x);
        Biquaternion::new(
            Complex64::new(-params.beta() * kappa * rho_t, rho / params.epsilon()),
            j.map(|c| Complex64::new(-kappa * c, 0.0)),
        )
    }
}

fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64, stencil: StencilSpec) -> f64 {
    match stencil.order() {
        2 => (f(x + h) - f(x - h)) / (2.0 * h),
        _ => (8.0 * (f(x + h) - f(x - h)) - (f(x + 2.0 * h) - f(x - 2.0 * h))) / (12.0 * h),
    }
}

/// `V = E - i sqrt(μ/ε) H`.
pub fn assemble_v(em: &EMField, params: &MediumParams) -> SampledField {
    let kappa = params.impedance();
    let values = em
        .e
        .iter()
        .zip(&em.h)
        .map(|(e, h)| Biquaternion::vector(std::array::from_fn(|k| Complex64::new(e[k], -kappa * h[k]))))
        .collect();
    SampledField::new(em.grid, values).expect("lengths checked at construction")
}

/// Inverse of [`assemble_v`] with the default scalar-part tolerance.
pub fn recover_eh(v: &SampledField, params: &MediumParams) -> Result<EMField> {
    recover_eh_with_tolerance(v, params, RECOVER_TOL)
}

/// `E = Re vec V`, `H = -sqrt(ε/μ) Im vec V`. Fails when the scalar part
/// exceeds `tol` times the largest node norm.
pub fn recover_eh_with_tolerance(v: &SampledField, params: &MediumParams, tol: f64) -> Result<EMField> {
    let scalar = v.max_scalar_norm();
    if scalar > tol * v.max_norm() {
        return Err(Error::Shape(format!(
            "scalar part {scalar:e} exceeds {tol:e} relative; V must be purely vectorial"
        )));
    }
    let inv_kappa = 1.0 / params.impedance();
    let e = v.values().iter().map(|q| q.v.map(|c| c.re)).collect();
    let h = v.values().iter().map(|q| q.v.map(|c| -inv_kappa * c.im)).collect();
    EMField::new(*v.grid(), e, h)
}

/// Samples `MV` on `grid`, rejecting sources that violate continuity.
pub fn assemble_rhs(
    src: &SourceSpec,
    grid: &SpacetimeGrid,
    params: &MediumParams,
    stencil: StencilSpec,
) -> Result<SampledField> {
    src.check_continuity(grid, stencil)?;
    Ok(assemble_rhs_unchecked(src, grid, params, stencil))
}

pub(crate) fn assemble_rhs_unchecked(
    src: &SourceSpec,
    grid: &SpacetimeGrid,
    params: &MediumParams,
    stencil: StencilSpec,
) -> SampledField {
    let dt = grid.dt();
    SampledField::from_fn(*grid, |t, x| src.rhs_at(t, x, params, dt, stencil))
}

/// One residual field with its norms.
#[derive(Clone, Debug)]
pub struct ResidualComponent {
    pub field: SampledField,
    pub max: f64,
    pub l2: f64,
}

impl ResidualComponent {
    fn new(field: SampledField) -> Self {
        Self {
            max: field.max_norm(),
            l2: field.l2_norm(),
            field,
        }
    }
}

/// Residuals of the four equations of the chiral Maxwell system.
#[derive(Clone, Debug)]
pub struct MaxwellResidual {
    /// `rot H - ε(∂t E + β ∂t rot E) - j`
    pub ampere: ResidualComponent,
    /// `rot E + μ(∂t H + β ∂t rot H)`
    pub faraday: ResidualComponent,
    /// `div E - ρ/ε`
    pub gauss_e: ResidualComponent,
    /// `div H`
    pub gauss_h: ResidualComponent,
}

impl MaxwellResidual {
    pub fn max(&self) -> f64 {
        [&self.ampere, &self.faraday, &self.gauss_e, &self.gauss_h]
            .iter()
            .map(|c| c.max)
            .fold(0.0, f64::max)
    }

    pub fn l2(&self) -> f64 {
        [&self.ampere, &self.faraday, &self.gauss_e, &self.gauss_h]
            .iter()
            .map(|c| c.l2 * c.l2)
            .sum::<f64>()
            .sqrt()
    }
}

/// Curl and divergence of the packed field at a node; `t_order` selects the
/// plain (0) or `∂t` (1) versions.
fn rot_div(n: &Node<'_>, t_order: u8) -> ([Complex64; 3], Complex64) {
    let d = |a: usize| {
        let mut o = [t_order, 0, 0, 0];
        o[a + 1] = 1;
        n.d(o).v
    };
    let (d1, d2, d3) = (d(0), d(1), d(2));
    (
        [d2[2] - d3[1], d3[0] - d1[2], d1[1] - d2[0]],
        d1[0] + d2[1] + d3[2],
    )
}

fn split(c: [Complex64; 3]) -> ([f64; 3], [f64; 3]) {
    (c.map(|z| z.re), c.map(|z| z.im))
}

/// Residuals of `em` against the sources on the interior of its grid.
pub fn maxwell_residual(
    em: &EMField,
    src: &SourceSpec,
    params: &MediumParams,
    stencil: StencilSpec,
) -> Result<MaxwellResidual> {
    let (eps, mu, beta) = (params.epsilon(), params.mu(), params.beta());
    let packed = em.packed();
    // the four residuals packed into one biquaternion per node:
    // scalar = (gauss_e) + i (gauss_h), vector = ampere + i faraday
    let res = apply_nodewise(&packed, stencil, |n| {
        let (t, x) = n.coord();
        let (rot, div) = rot_div(n, 0);
        let (rot_t, _) = rot_div(n, 1);
        let dt = n.d1(0).v;
        let (rot_e, rot_h) = split(rot);
        let (rot_t_e, rot_t_h) = split(rot_t);
        let (dt_e, dt_h) = split(dt);
        let j = src.j(t, x);
        let ampere: [f64; 3] = std::array::from_fn(|k| rot_h[k] - eps * (dt_e[k] + beta * rot_t_e[k]) - j[k]);
        let faraday: [f64; 3] = std::array::from_fn(|k| rot_e[k] + mu * (dt_h[k] + beta * rot_t_h[k]));
        Biquaternion::new(
            Complex64::new(div.re - src.rho(t, x) / eps, div.im),
            std::array::from_fn(|k| Complex64::new(ampere[k], faraday[k])),
        )
    })?;
    let grid = *res.grid();
    let pick = |f: &dyn Fn(&Biquaternion) -> Biquaternion| {
        ResidualComponent::new(SampledField::new(grid, res.values().iter().map(f).collect()).unwrap())
    };
    Ok(MaxwellResidual {
        ampere: pick(&|q| Biquaternion::vector(q.v.map(|z| z.re.into()))),
        faraday: pick(&|q| Biquaternion::vector(q.v.map(|z| z.im.into()))),
        gauss_e: pick(&|q| Biquaternion::from(q.s.re)),
        gauss_h: pick(&|q| Biquaternion::from(q.s.im)),
    })
}

/// `MV - q`, together with its scalar and vector parts.
#[derive(Clone, Debug)]
pub struct QuaternionicResidual {
    pub field: SampledField,
}

impl QuaternionicResidual {
    pub fn max(&self) -> f64 {
        self.field.max_norm()
    }

    pub fn l2(&self) -> f64 {
        self.field.l2_norm()
    }

    pub fn scalar_part(&self) -> SampledField {
        self.field.map(|q| Biquaternion::scalar(q.s))
    }

    pub fn vector_part(&self) -> SampledField {
        self.field.map(|q| Biquaternion::vector(q.v))
    }

    /// Real part of the vector residual; equals `-sqrt(μ/ε)` times the
    /// Ampère residual.
    pub fn vector_real(&self) -> SampledField {
        self.field.map(|q| Biquaternion::vector(q.v.map(|z| z.re.into())))
    }

    /// Imaginary part of the vector residual; equals minus the Faraday
    /// residual.
    pub fn vector_imag(&self) -> SampledField {
        self.field.map(|q| Biquaternion::vector(q.v.map(|z| z.im.into())))
    }
}

/// `M V - q` on the interior of `V`'s grid.
pub fn quaternionic_residual(
    v: &SampledField,
    src: &SourceSpec,
    params: &MediumParams,
    stencil: StencilSpec,
) -> Result<QuaternionicResidual> {
    if v.max_scalar_norm() > RECOVER_TOL * v.max_norm() {
        return Err(Error::Shape("V must be purely vectorial".into()));
    }
    let mv = apply_m(v, params, stencil)?;
    let q = assemble_rhs(src, mv.grid(), params, stencil)?;
    let values = mv.values().iter().zip(q.values()).map(|(a, b)| *a - *b).collect();
    Ok(QuaternionicResidual {
        field: SampledField::new(*mv.grid(), values)?,
    })
}

/// Residuals of the divergence consequences of the vector equations:
/// `∂t div H` and `∂t div E - ∂t ρ / ε`, as max norms.
pub fn divergence_consequences(
    em: &EMField,
    src: &SourceSpec,
    params: &MediumParams,
    stencil: StencilSpec,
) -> Result<(f64, f64)> {
    let eps = params.epsilon();
    let dt = em.grid.dt();
    let r = apply_nodewise(&em.packed(), stencil, |n| {
        let (t, x) = n.coord();
        let (_, div_t) = rot_div(n, 1);
        Biquaternion::from(Complex64::new(div_t.re - src.rho_t(t, x, dt, stencil) / eps, div_t.im))
    })?;
    let e = r.values().iter().map(|q| q.s.re.abs()).fold(0.0, f64::max);
    let h = r.values().iter().map(|q| q.s.im.abs()).fold(0.0, f64::max);
    Ok((h, e))
}
