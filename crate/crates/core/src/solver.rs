//! Sourced fields by causal spacetime convolution `V = f * q` of the
//! fundamental solution with the quaternionic right-hand side, the kernel
//! being the left factor of every product.
//!
//! The source is integrated by the midpoint rule over the cells of a
//! regular lattice. Cells closer than `r0` to an output point are left out,
//! and cells later than the output time never enter the sum. When the output
//! times sit on cell edges and the output positions on cell centres, every
//! kernel value needed is one of a small set indexed by the time lag and the
//! sorted absolute lattice offset, which is tabulated once.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bq::{bq_mul, Biquaternion};
use crate::diffops::{SampledField, SpacetimeGrid, StencilSpec};
use crate::error::{Error, Result};
use crate::fundamental::{fundamental_f, fundamental_radial};
use crate::maxwell::{assemble_rhs, recover_eh_with_tolerance, EMField, SourceSpec, SupportBox};
use crate::medium::MediumParams;

/// Default bound on `max |scalar V| / max ‖V‖` accepted when recovering
/// `E` and `H`.
pub const DEFAULT_SCALAR_TOL: f64 = 0.1;

/// Geometry and quadrature of one convolution.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionPlan {
    params: MediumParams,
    cells: SpacetimeGrid,
    outputs: SpacetimeGrid,
    r0: f64,
    stencil: StencilSpec,
    scalar_tol: f64,
}

impl ConvolutionPlan {
    /// `cells` holds the source cell centres; `outputs` the evaluation
    /// points. `r0` defaults to half the smallest spatial step.
    pub fn new(params: MediumParams, cells: SpacetimeGrid, outputs: SpacetimeGrid) -> Result<Self> {
        params.require_chiral()?;
        let r0 = 0.5 * cells.dx().into_iter().fold(f64::INFINITY, f64::min);
        Ok(Self {
            params,
            cells,
            outputs,
            r0,
            stencil: StencilSpec::default(),
            scalar_tol: DEFAULT_SCALAR_TOL,
        })
    }

    /// Cells of size `dt × dx³` tiling `[t0, t0 + nt dt] × Π[x0_k, x0_k + n_k dx]`.
    pub fn cells_for_box(t0: f64, dt: f64, x0: [f64; 3], dx: f64, counts: [usize; 4]) -> Result<SpacetimeGrid> {
        SpacetimeGrid::new(
            dt,
            [dx; 3],
            counts,
            [t0 + 0.5 * dt, x0[0] + 0.5 * dx, x0[1] + 0.5 * dx, x0[2] + 0.5 * dx],
        )
    }

    /// Smallest plan whose cells share the output steps, line up with the
    /// outputs and cover `support` up to the last output time.
    pub fn covering(params: MediumParams, support: SupportBox, outputs: SpacetimeGrid) -> Result<Self> {
        let dx = outputs.dx();
        if (0..3).any(|k| (dx[k] - dx[0]).abs() > 1e-12 * dx[0]) {
            return Err(Error::InvalidParameter("covering plans need equal spatial steps".into()));
        }
        let finite = support.t.iter().chain(support.x.iter().flatten()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Truncation("source support is unbounded".into()));
        }
        let (o, dt, h) = (outputs.origin(), outputs.dt(), dx[0]);
        let t_last = o[0] + (outputs.counts()[0] - 1) as f64 * dt;
        let t0 = o[0] + ((support.t[0] - o[0]) / dt + 1e-9).floor() * dt;
        let nt = (((t_last - t0) / dt).round() as usize).max(1);
        let mut first = [0.0; 3];
        let mut counts = [nt, 0, 0, 0];
        for k in 0..3 {
            let lo = ((support.x[k][0] + 0.5 * h - o[k + 1]) / h + 1e-9).floor();
            let hi = ((support.x[k][1] - 0.5 * h - o[k + 1]) / h - 1e-9).ceil();
            first[k] = o[k + 1] + lo * h - 0.5 * h;
            counts[k + 1] = (hi - lo) as usize + 1;
        }
        let cells = Self::cells_for_box(t0, dt, first, h, counts)?;
        Self::new(params, cells, outputs)
    }

    pub fn with_r0(mut self, r0: f64) -> Result<Self> {
        if !(r0 >= 0.0 && r0.is_finite()) {
            return Err(Error::InvalidParameter(format!("r0 must be nonnegative, got {r0}")));
        }
        self.r0 = r0;
        Ok(self)
    }

    pub fn with_stencil(mut self, stencil: StencilSpec) -> Self {
        self.stencil = stencil;
        self
    }

    pub fn with_scalar_tolerance(mut self, tol: f64) -> Self {
        self.scalar_tol = tol;
        self
    }

    pub fn params(&self) -> &MediumParams {
        &self.params
    }

    pub fn cells(&self) -> &SpacetimeGrid {
        &self.cells
    }

    pub fn outputs(&self) -> &SpacetimeGrid {
        &self.outputs
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// The spacetime box covered by the source cells.
    pub fn source_box(&self) -> SupportBox {
        let c = &self.cells;
        let (o, h, n) = (c.origin(), c.steps(), c.counts());
        let span = |a: usize| [o[a] - 0.5 * h[a], o[a] + (n[a] as f64 - 0.5) * h[a]];
        SupportBox {
            t: span(0),
            x: [span(1), span(2), span(3)],
        }
    }

    fn last_output_time(&self) -> f64 {
        let o = &self.outputs;
        o.origin()[0] + (o.counts()[0] - 1) as f64 * o.dt()
    }

    /// Lattice indices of the outputs relative to the cells, when every
    /// output time is a cell edge and every output position a cell centre.
    fn alignment(&self) -> Option<[Vec<i64>; 4]> {
        let dx = self.cells.dx();
        if (0..3).any(|k| (dx[k] - dx[0]).abs() > 1e-12 * dx[0]) {
            return None;
        }
        let co = self.cells.origin();
        let ch = self.cells.steps();
        let mut out: [Vec<i64>; 4] = Default::default();
        for (a, idx) in out.iter_mut().enumerate() {
            let shift = if a == 0 { 0.5 } else { 0.0 };
            for i in 0..self.outputs.counts()[a] {
                let p = self.outputs.origin()[a] + i as f64 * self.outputs.steps()[a];
                let u = (p - co[a]) / ch[a] - shift;
                if (u - u.round()).abs() > 1e-6 {
                    return None;
                }
                idx.push(u.round() as i64);
            }
        }
        Some(out)
    }
}

/// Output of [`convolve_solution`].
#[derive(Clone, Debug)]
pub struct Solution {
    pub v: SampledField,
    pub em: EMField,
    /// `max |scalar V| / max ‖V‖`; zero for the exact solution.
    pub scalar_ratio: f64,
}

fn check_support(src: &SourceSpec, plan: &ConvolutionPlan) -> Result<()> {
    let Some(s) = src.support() else {
        return Ok(());
    };
    let b = plan.source_box();
    let space_ok = (0..3).all(|k| b.x[k][0] <= s.x[k][0] && s.x[k][1] <= b.x[k][1]);
    if !space_ok {
        return Err(Error::Truncation(format!(
            "source support {:?} extends beyond the plan box {:?}",
            s.x, b.x
        )));
    }
    if s.t[0] < b.t[0] {
        return Err(Error::Truncation(format!(
            "source is active at t = {} before the plan box starts at {}",
            s.t[0], b.t[0]
        )));
    }
    if plan.last_output_time() > b.t[1] && s.t[1] > b.t[1] {
        return Err(Error::Truncation(format!(
            "outputs up to t = {} need source times beyond the plan box end {}",
            plan.last_output_time(),
            b.t[1]
        )));
    }
    Ok(())
}

/// Solves `M V = q` for the sources in `src` by causal convolution and
/// returns `V` with the recovered `E` and `H`.
pub fn convolve_solution(src: &SourceSpec, plan: &ConvolutionPlan) -> Result<Solution> {
    check_support(src, plan)?;
    let q = assemble_rhs(src, &plan.cells, &plan.params, plan.stencil)?;
    let v = convolve(&q, plan)?;
    let norm = v.max_norm();
    let scalar_ratio = if norm > 0.0 { v.max_scalar_norm() / norm } else { 0.0 };
    let em = recover_eh_with_tolerance(&v, &plan.params, plan.scalar_tol)?;
    Ok(Solution { v, em, scalar_ratio })
}

/// Convolution of the kernel with a right-hand side sampled on the plan's
/// cell centres.
pub fn convolve(q: &SampledField, plan: &ConvolutionPlan) -> Result<SampledField> {
    if q.grid() != &plan.cells {
        return Err(Error::Dimension("right-hand side must be sampled on the plan cells".into()));
    }
    match plan.alignment() {
        Some(idx) => convolve_tabulated(q, plan, &idx),
        None => convolve_direct(q, plan),
    }
}

fn convolve_direct(q: &SampledField, plan: &ConvolutionPlan) -> Result<SampledField> {
    let cells = &plan.cells;
    let vol = cells.cell_volume();
    let r0 = plan.r0;
    SampledField::try_from_fn(plan.outputs, |t, x| {
        let mut acc = Biquaternion::ZERO;
        for lin in 0..cells.len() {
            let (tau, xi) = cells.coord(cells.unravel(lin));
            if tau > t {
                continue;
            }
            let d = [x[0] - xi[0], x[1] - xi[1], x[2] - xi[2]];
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if r < r0 || r == 0.0 {
                continue;
            }
            acc += bq_mul(&fundamental_f(t - tau, d, &plan.params)?, &q.values()[lin]);
        }
        Ok(acc * vol)
    })
}

/// Index of a sorted triple `a <= b <= c` in a packed tetrahedral table.
#[inline]
fn triple_index(a: usize, b: usize, c: usize) -> usize {
    c * (c + 1) * (c + 2) / 6 + b * (b + 1) / 2 + a
}

#[inline]
fn sort3(mut a: usize, mut b: usize, mut c: usize) -> (usize, usize, usize) {
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    if b > c {
        std::mem::swap(&mut b, &mut c);
    }
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    (a, b, c)
}

/// `(s, v)` of the radial kernel for every time lag and lattice offset.
struct KernelTable {
    per_lag: usize,
    values: Vec<(Complex64, Complex64)>,
    radius: Vec<f64>,
}

impl KernelTable {
    fn build(params: &MediumParams, dt: f64, dx: f64, lags: usize, reach: usize) -> Result<Self> {
        let per_lag = triple_index(0, 0, reach + 1);
        let mut radius = vec![0.0; per_lag];
        for c in 0..=reach {
            for b in 0..=c {
                for a in 0..=b {
                    radius[triple_index(a, b, c)] = dx * ((a * a + b * b + c * c) as f64).sqrt();
                }
            }
        }
        let values = (0..lags * per_lag)
            .into_par_iter()
            .map(|e| {
                let (m, tri) = (e / per_lag, e % per_lag);
                let r = radius[tri];
                if r == 0.0 {
                    return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
                }
                fundamental_radial((m as f64 + 0.5) * dt, r, params)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            per_lag,
            values,
            radius,
        })
    }
}

fn convolve_tabulated(q: &SampledField, plan: &ConvolutionPlan, idx: &[Vec<i64>; 4]) -> Result<SampledField> {
    let cells = &plan.cells;
    let n = cells.counts();
    let dx = cells.dx()[0];
    let vol = cells.cell_volume();
    let lags = idx[0].iter().map(|&k| (k + 1).clamp(0, n[0] as i64) as usize).max().unwrap_or(0);
    let reach = (1..4)
        .flat_map(|a| idx[a].iter().map(move |&i| i.abs().max((i - (n[a] as i64 - 1)).abs())))
        .max()
        .unwrap_or(0) as usize;
    let table = KernelTable::build(&plan.params, cells.dt(), dx, lags.max(1), reach)?;
    let r0 = plan.r0;
    let out = plan.outputs;
    let q = q.values();
    let values = (0..out.len())
        .into_par_iter()
        .map(|lin| {
            let o = out.unravel(lin);
            let (k, ix, iy, iz) = (idx[0][o[0]], idx[1][o[1]], idx[2][o[2]], idx[3][o[3]]);
            let mut acc = Biquaternion::ZERO;
            let last = k.min(n[0] as i64 - 1);
            for tn in 0..=last {
                let m = (k - tn) as usize;
                let row = &table.values[m * table.per_lag..(m + 1) * table.per_lag];
                let base_t = tn as usize * n[1];
                for i in 0..n[1] {
                    let di = ix - i as i64;
                    let base_i = (base_t + i) * n[2];
                    for j in 0..n[2] {
                        let dj = iy - j as i64;
                        let base_j = (base_i + j) * n[3];
                        for l in 0..n[3] {
                            let dl = iz - l as i64;
                            let (a, b, c) = sort3(di.unsigned_abs() as usize, dj.unsigned_abs() as usize, dl.unsigned_abs() as usize);
                            let tri = triple_index(a, b, c);
                            let r = table.radius[tri];
                            if r < r0 || r == 0.0 {
                                continue;
                            }
                            let (s, v) = row[tri];
                            let scale = dx / r;
                            let f = Biquaternion::new(
                                s,
                                [v * (di as f64 * scale), v * (dj as f64 * scale), v * (dl as f64 * scale)],
                            );
                            acc += bq_mul(&f, &q[base_j + l]);
                        }
                    }
                }
            }
            acc * vol
        })
        .collect();
    SampledField::new(out, values)
}

/// A-priori error contributions of a plan for a given source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureReport {
    /// Bound on the omitted singular-ball integral from the `x/|x|³` part
    /// of the kernel; proportional to `r0`.
    pub singular_ball_cauchy: f64,
    /// Bound from the `1/|x|` parts of the kernel; proportional to `r0²`.
    pub singular_ball_envelope: f64,
    /// Sum of the two singular-ball bounds.
    pub singular_ball_bound: f64,
    /// Largest source norm on the boundary cells of the plan box relative to
    /// the largest source norm overall; zero for a source that vanishes
    /// there.
    pub truncation_estimate: f64,
}

/// Bounds the error committed by excluding the ball `|x - ξ| < r0` and by
/// truncating the source to the plan box.
///
/// Near the origin `‖f(t, y)‖ <= (1/(|β|√(εμ))) (1/(4π)) (1/|y|² + 2/(|β||y|)
/// + √2 t/(β² √(εμ) |y|))`, using `|J0| <= 1` and `|J1(z)| <= z/2`; the
/// bound integrates this over the ball and over the elapsed time, against
/// `√2 sup ‖q‖`.
pub fn estimate_quadrature_error(plan: &ConvolutionPlan, src: &SourceSpec) -> Result<QuadratureReport> {
    let q = crate::maxwell::assemble_rhs(src, &plan.cells, &plan.params, plan.stencil)?;
    let sup = q.max_norm();
    let n = plan.cells.counts();
    let boundary = (0..q.values().len())
        .filter(|&lin| {
            let i = plan.cells.unravel(lin);
            (1..4).any(|a| i[a] == 0 || i[a] + 1 == n[a])
        })
        .map(|lin| q.values()[lin].norm())
        .fold(0.0, f64::max);
    let b = plan.params.beta().abs();
    let s = plan.params.sqrt_eps_mu();
    let span = (plan.last_output_time() - plan.source_box().t[0]).max(0.0);
    let r0 = plan.r0;
    let lead = std::f64::consts::SQRT_2 * sup * span / (b * s);
    let cauchy = lead * r0;
    let envelope = lead * (r0 * r0 / b + std::f64::consts::SQRT_2 * span * r0 * r0 / (2.0 * b * b * s));
    Ok(QuadratureReport {
        singular_ball_cauchy: cauchy,
        singular_ball_envelope: envelope,
        singular_ball_bound: cauchy + envelope,
        truncation_estimate: if sup > 0.0 { boundary / sup } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxwell::assemble_rhs;
    use crate::presets::{compact_dipole, gaussian_pulse, CompactDipole, GaussianPulse};

    fn params() -> MediumParams {
        MediumParams::new(1.0, 1.0, 0.5).unwrap()
    }

    fn bump_source(center: [f64; 3], radius: f64, t_c: f64) -> SourceSpec {
        compact_dipole(CompactDipole {
            j0: [0.0, 0.0, 1.0],
            center,
            radius,
            t_center: t_c,
            half_width: 0.2,
        })
        .unwrap()
    }

    fn small_plan(n: usize, outputs: SpacetimeGrid) -> ConvolutionPlan {
        let h = 0.8 / n as f64;
        let cells = ConvolutionPlan::cells_for_box(0.0, h, [-0.4; 3], h, [n, n, n, n]).unwrap();
        ConvolutionPlan::new(params(), cells, outputs).unwrap().with_scalar_tolerance(1.0)
    }

    fn aligned_outputs(n: usize, t_index: usize) -> SpacetimeGrid {
        let h = 0.8 / n as f64;
        SpacetimeGrid::uniform(h, h, [2, 2, 2, 2], [t_index as f64 * h, -0.4 + 2.5 * h, -0.4 + 3.5 * h, -0.4 + 2.5 * h]).unwrap()
    }

    #[test]
    fn zero_source_gives_zero_field() {
        let plan = small_plan(6, aligned_outputs(6, 4));
        let sol = convolve_solution(&SourceSpec::zero(), &plan).unwrap();
        assert_eq!(sol.v.max_norm(), 0.0);
        assert!(sol.em.e().iter().chain(sol.em.h()).all(|v| *v == [0.0; 3]));
        let rep = estimate_quadrature_error(&plan, &SourceSpec::zero()).unwrap();
        assert_eq!(rep.singular_ball_bound, 0.0);
        assert_eq!(rep.truncation_estimate, 0.0);
    }

    #[test]
    fn tabulated_and_direct_paths_agree() {
        let n = 6;
        let plan = small_plan(n, aligned_outputs(n, 4));
        assert!(plan.alignment().is_some());
        let src = bump_source([0.0; 3], 0.3, 0.25);
        let q = assemble_rhs(&src, plan.cells(), plan.params(), StencilSpec::default()).unwrap();
        let a = convolve_tabulated(&q, &plan, &plan.alignment().unwrap()).unwrap();
        let b = convolve_direct(&q, &plan).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((*x - *y).norm() <= 1e-12 * y.norm().max(1e-300), "{x:?} {y:?}");
        }
        assert!(a.max_norm() > 0.0);
    }

    #[test]
    fn misaligned_outputs_use_direct_evaluation() {
        let n = 6;
        let h = 0.8 / n as f64;
        let out = SpacetimeGrid::uniform(h, h, [1, 2, 1, 1], [0.6, 0.013, 0.0, 0.0]).unwrap();
        let plan = small_plan(n, out);
        assert!(plan.alignment().is_none());
        let src = bump_source([0.0; 3], 0.3, 0.25);
        let q = assemble_rhs(&src, plan.cells(), plan.params(), StencilSpec::default()).unwrap();
        assert!(convolve(&q, &plan).unwrap().max_norm() > 0.0);
    }

    #[test]
    fn causality_under_future_perturbation() {
        let n = 6;
        let h = 0.8 / n as f64;
        let plan = small_plan(n, aligned_outputs(n, 3));
        let src = bump_source([0.0; 3], 0.3, 0.25);
        let q = assemble_rhs(&src, plan.cells(), plan.params(), StencilSpec::default()).unwrap();
        let base = convolve(&q, &plan).unwrap();
        let t_last = plan.outputs().origin()[0] + h;
        let perturbed = q.map(|v| *v);
        let mut vals = perturbed.into_values();
        for (lin, v) in vals.iter_mut().enumerate() {
            let (tau, _) = plan.cells().coord(plan.cells().unravel(lin));
            if tau > t_last {
                *v = *v + Biquaternion::from_components([1e3, -7.0, 3.0, 0.5, 1.0, 2.0, -4.0, 9.0]);
            }
        }
        let pq = SampledField::new(*plan.cells(), vals).unwrap();
        let after = convolve(&pq, &plan).unwrap();
        assert_eq!(base.values(), after.values());
    }

    #[test]
    fn linear_in_the_source() {
        let n = 5;
        let plan = small_plan(n, aligned_outputs(n, 3));
        let a = assemble_rhs(&bump_source([0.0; 3], 0.3, 0.25), plan.cells(), plan.params(), StencilSpec::default()).unwrap();
        let b = assemble_rhs(&bump_source([0.05, 0.0, -0.05], 0.25, 0.2), plan.cells(), plan.params(), StencilSpec::default()).unwrap();
        let (ca, cb) = (Complex64::new(0.7, -1.1), Complex64::new(-2.0, 0.3));
        let comb = SampledField::new(
            *plan.cells(),
            a.values().iter().zip(b.values()).map(|(x, y)| x.scale(ca) + y.scale(cb)).collect(),
        )
        .unwrap();
        let (va, vb, vc) = (convolve(&a, &plan).unwrap(), convolve(&b, &plan).unwrap(), convolve(&comb, &plan).unwrap());
        let scale = va.max_norm() + vb.max_norm();
        for ((x, y), z) in va.values().iter().zip(vb.values()).zip(vc.values()) {
            assert!((x.scale(ca) + y.scale(cb) - *z).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn translation_covariance() {
        let n = 6;
        let h = 0.8 / n as f64;
        let plan = small_plan(n, aligned_outputs(n, 4));
        let base = convolve_solution(&bump_source([0.0; 3], 0.25, 0.25), &plan).unwrap();
        let shift = [h, 2.0 * h, -h, h];
        let moved_cells = SpacetimeGrid::new(
            h,
            [h; 3],
            plan.cells().counts(),
            std::array::from_fn(|a| plan.cells().origin()[a] + shift[a]),
        )
        .unwrap();
        let moved_out = SpacetimeGrid::new(
            h,
            [h; 3],
            plan.outputs().counts(),
            std::array::from_fn(|a| plan.outputs().origin()[a] + shift[a]),
        )
        .unwrap();
        let moved_plan = ConvolutionPlan::new(params(), moved_cells, moved_out)
            .unwrap()
            .with_scalar_tolerance(1.0);
        let src = bump_source([shift[1], shift[2], shift[3]], 0.25, 0.25 + shift[0]);
        let moved = convolve_solution(&src, &moved_plan).unwrap();
        let scale = base.v.max_norm();
        for (x, y) in base.v.values().iter().zip(moved.v.values()) {
            assert!((*x - *y).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn doubling_a_box_around_a_compact_source() {
        let n = 6;
        let h = 0.8 / n as f64;
        let src = bump_source([0.0; 3], 0.3, 0.25);
        let out = aligned_outputs(n, 4);
        let small = small_plan(n, out);
        let big_cells = ConvolutionPlan::cells_for_box(0.0, h, [-0.4 - 3.0 * h; 3], h, [n, 2 * n, 2 * n, 2 * n]).unwrap();
        let big = ConvolutionPlan::new(params(), big_cells, out).unwrap().with_scalar_tolerance(1.0);
        let a = convolve_solution(&src, &small).unwrap();
        let b = convolve_solution(&src, &big).unwrap();
        assert_eq!(estimate_quadrature_error(&small, &src).unwrap().truncation_estimate, 0.0);
        for (x, y) in a.v.values().iter().zip(b.v.values()) {
            assert!((*x - *y).norm() <= 1e-12 * a.v.max_norm());
        }
    }

    #[test]
    fn support_outside_the_box_is_reported() {
        let plan = small_plan(4, aligned_outputs(4, 2));
        let src = gaussian_pulse(GaussianPulse::default()).unwrap();
        assert!(matches!(convolve_solution(&src, &plan), Err(Error::Truncation(_))));
    }

    #[test]
    fn singular_ball_bound_scaling() {
        let n = 6;
        let plan = small_plan(n, aligned_outputs(n, 4));
        let src = bump_source([0.0; 3], 0.3, 0.25);
        let r1 = estimate_quadrature_error(&plan, &src).unwrap();
        let half = plan.clone().with_r0(0.5 * plan.r0()).unwrap();
        let r2 = estimate_quadrature_error(&half, &src).unwrap();
        assert!((r2.singular_ball_cauchy / r1.singular_ball_cauchy - 0.5).abs() < 1e-12);
        assert!((r2.singular_ball_envelope / r1.singular_ball_envelope - 0.25).abs() < 1e-12);
        assert!(r2.singular_ball_bound < r1.singular_ball_bound);
    }

    #[test]
    fn kernel_table_indexing() {
        let mut seen = std::collections::HashSet::new();
        for c in 0..6 {
            for b in 0..=c {
                for a in 0..=b {
                    assert!(seen.insert(triple_index(a, b, c)));
                }
            }
        }
        assert_eq!(seen.len(), triple_index(0, 0, 6));
        assert_eq!(sort3(3, 1, 2), (1, 2, 3));
    }

    #[test]
    fn covering_plan_is_aligned_and_covers_the_support() {
        let params = MediumParams::new(1.0, 1.0, 0.5).unwrap();
        let pulse = GaussianPulse::default();
        let out = SpacetimeGrid::uniform(0.1, 0.25, [3, 2, 2, 2], [1.0, 0.3, -0.2, 0.05]).unwrap();
        let plan = ConvolutionPlan::covering(params, pulse.support(), out).unwrap();
        assert!(plan.alignment().is_some());
        let b = plan.source_box();
        let s = pulse.support();
        assert!(b.t[0] <= s.t[0] && (b.t[1] - 1.2).abs() < 1e-9);
        for k in 0..3 {
            assert!(b.x[k][0] <= s.x[k][0] && s.x[k][1] <= b.x[k][1]);
            assert!(b.x[k][1] - b.x[k][0] < s.x[k][1] - s.x[k][0] + 2.0 * 0.25 + 1e-9);
        }
        assert!(check_support(&gaussian_pulse(pulse).unwrap(), &plan).is_ok());
        let unbounded = SupportBox {
            t: [f64::NEG_INFINITY, 1.0],
            ..s
        };
        let out = SpacetimeGrid::uniform(0.1, 0.25, [3, 2, 2, 2], [1.0, 0.3, -0.2, 0.05]).unwrap();
        assert!(matches!(ConvolutionPlan::covering(params, unbounded, out), Err(Error::Truncation(_))));
    }
}
