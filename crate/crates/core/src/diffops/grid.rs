use rayon::prelude::*;

use crate::bq::Biquaternion;
use crate::error::{Error, Result};

/// Uniform spacetime lattice. Axis 0 is time, axes 1..=3 are `x1..x3`.
/// Node `(it, ix, iy, iz)` sits at `origin + (it dt, ix dx1, iy dx2, iz dx3)`
/// and is stored at linear index `((it nx + ix) ny + iy) nz + iz`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpacetimeGrid {
    steps: [f64; 4],
    counts: [usize; 4],
    origin: [f64; 4],
}

impl SpacetimeGrid {
    pub fn new(dt: f64, dx: [f64; 3], counts: [usize; 4], origin: [f64; 4]) -> Result<Self> {
        let steps = [dt, dx[0], dx[1], dx[2]];
        if steps.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::InvalidParameter(format!("grid steps must be positive, got {steps:?}")));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid origin must be finite, got {origin:?}")));
        }
        if counts.contains(&0) {
            return Err(Error::Dimension(format!("grid counts must be nonzero, got {counts:?}")));
        }
        Ok(Self { steps, counts, origin })
    }

    /// Grid with equal spacing `h` on all three spatial axes.
    pub fn uniform(dt: f64, h: f64, counts: [usize; 4], origin: [f64; 4]) -> Result<Self> {
        Self::new(dt, [h; 3], counts, origin)
    }

    pub fn dt(&self) -> f64 {
        self.steps[0]
    }

    pub fn dx(&self) -> [f64; 3] {
        [self.steps[1], self.steps[2], self.steps[3]]
    }

    pub fn steps(&self) -> [f64; 4] {
        self.steps
    }

    pub fn counts(&self) -> [usize; 4] {
        self.counts
    }

    pub fn origin(&self) -> [f64; 4] {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Spacetime cell measure `dt dx1 dx2 dx3`.
    pub fn cell_volume(&self) -> f64 {
        self.steps.iter().product()
    }

    #[inline]
    pub fn index(&self, idx: [usize; 4]) -> usize {
        let [_, nx, ny, nz] = self.counts;
        ((idx[0] * nx + idx[1]) * ny + idx[2]) * nz + idx[3]
    }

    #[inline]
    pub fn unravel(&self, mut lin: usize) -> [usize; 4] {
        let [_, nx, ny, nz] = self.counts;
        let iz = lin % nz;
        lin /= nz;
        let iy = lin % ny;
        lin /= ny;
        let ix = lin % nx;
        [lin / nx, ix, iy, iz]
    }

    /// `(t, x)` of a node.
    #[inline]
    pub fn coord(&self, idx: [usize; 4]) -> (f64, [f64; 3]) {
        let c = |a: usize| self.origin[a] + idx[a] as f64 * self.steps[a];
        (c(0), [c(1), c(2), c(3)])
    }

    /// The grid with `margin` nodes removed at both ends of every axis.
    pub fn shrink(&self, margin: usize) -> Result<Self> {
        let mut counts = self.counts;
        let mut origin = self.origin;
        for a in 0..4 {
            if self.counts[a] < 2 * margin + 1 {
                return Err(Error::Dimension(format!(
                    "axis {a} has {} nodes, a stencil margin of {margin} needs at least {}",
                    self.counts[a],
                    2 * margin + 1
                )));
            }
            counts[a] -= 2 * margin;
            origin[a] += margin as f64 * self.steps[a];
        }
        Ok(Self {
            steps: self.steps,
            counts,
            origin,
        })
    }

    /// Node offset of `inner` inside `self`, if `inner` is an aligned
    /// sub-lattice with the same steps.
    pub fn offset_of(&self, inner: &SpacetimeGrid) -> Result<[usize; 4]> {
        let mut off = [0usize; 4];
        for a in 0..4 {
            let h = self.steps[a];
            if (inner.steps[a] - h).abs() > 1e-12 * h {
                return Err(Error::Dimension(format!("grid step mismatch on axis {a}")));
            }
            let k = (inner.origin[a] - self.origin[a]) / h;
            let kr = k.round();
            if (k - kr).abs() > 1e-6 || kr < 0.0 {
                return Err(Error::Dimension(format!("grids are not aligned on axis {a}")));
            }
            off[a] = kr as usize;
            if off[a] + inner.counts[a] > self.counts[a] {
                return Err(Error::Dimension(format!("sub-grid exceeds grid on axis {a}")));
            }
        }
        Ok(off)
    }

    /// Smallest of the four spacings.
    pub fn min_step(&self) -> f64 {
        self.steps.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Biquaternion samples on every node of a [`SpacetimeGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    grid: SpacetimeGrid,
    values: Vec<Biquaternion>,
}

impl SampledField {
    pub fn new(grid: SpacetimeGrid, values: Vec<Biquaternion>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: SpacetimeGrid) -> Self {
        Self {
            grid,
            values: vec![Biquaternion::ZERO; grid.len()],
        }
    }

    /// Samples `f(t, x)` at every node, in parallel.
    pub fn from_fn<F>(grid: SpacetimeGrid, f: F) -> Self
    where
        F: Fn(f64, [f64; 3]) -> Biquaternion + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|lin| {
                let (t, x) = grid.coord(grid.unravel(lin));
                f(t, x)
            })
            .collect();
        Self { grid, values }
    }

    /// Like [`SampledField::from_fn`] for fallible samplers.
    pub fn try_from_fn<F>(grid: SpacetimeGrid, f: F) -> Result<Self>
    where
        F: Fn(f64, [f64; 3]) -> Result<Biquaternion> + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|lin| {
                let (t, x) = grid.coord(grid.unravel(lin));
                f(t, x)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Biquaternion] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Biquaternion> {
        self.values
    }

    #[inline]
    pub fn at(&self, idx: [usize; 4]) -> Biquaternion {
        self.values[self.grid.index(idx)]
    }

    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(&Biquaternion) -> Biquaternion + Sync + Send,
    {
        Self {
            grid: self.grid,
            values: self.values.par_iter().map(f).collect(),
        }
    }

    /// Restriction to an aligned sub-grid.
    pub fn crop(&self, target: &SpacetimeGrid) -> Result<Self> {
        let off = self.grid.offset_of(target)?;
        let values = (0..target.len())
            .map(|lin| {
                let i = target.unravel(lin);
                self.at([i[0] + off[0], i[1] + off[1], i[2] + off[2], i[3] + off[3]])
            })
            .collect();
        Ok(Self { grid: *target, values })
    }

    /// `self - other` on the common sub-grid of the two fields.
    pub fn difference(&self, other: &SampledField) -> Result<Self> {
        let common = common_grid(&self.grid, &other.grid)?;
        let a = self.crop(&common)?;
        let b = other.crop(&common)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| *x - *y).collect();
        Ok(Self { grid: common, values })
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(Biquaternion::norm).fold(0.0, f64::max)
    }

    /// Discrete `L²` norm, `sqrt(sum ‖v‖² dt dx1 dx2 dx3)`.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm() * v.norm()).sum();
        (sum * self.grid.cell_volume()).sqrt()
    }

    /// Largest scalar-part magnitude.
    pub fn max_scalar_norm(&self) -> f64 {
        self.values.iter().map(|v| v.s.norm()).fold(0.0, f64::max)
    }

    /// Largest vector-part magnitude.
    pub fn max_vector_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| Biquaternion::vector(v.v).norm())
            .fold(0.0, f64::max)
    }
}

/// Intersection of two grids that share steps and lattice alignment.
pub fn common_grid(a: &SpacetimeGrid, b: &SpacetimeGrid) -> Result<SpacetimeGrid> {
    let mut origin = [0.0; 4];
    let mut counts = [0usize; 4];
    for ax in 0..4 {
        let h = a.steps[ax];
        if (b.steps[ax] - h).abs() > 1e-12 * h {
            return Err(Error::Dimension(format!("grid step mismatch on axis {ax}")));
        }
        let shift = (b.origin[ax] - a.origin[ax]) / h;
        if (shift - shift.round()).abs() > 1e-6 {
            return Err(Error::Dimension(format!("grids are not aligned on axis {ax}")));
        }
        let shift = shift.round() as i64;
        let lo = shift.max(0);
        let hi = (a.counts[ax] as i64).min(shift + b.counts[ax] as i64);
        if hi <= lo {
            return Err(Error::Dimension(format!("grids do not overlap on axis {ax}")));
        }
        origin[ax] = a.origin[ax] + lo as f64 * h;
        counts[ax] = (hi - lo) as usize;
    }
    Ok(SpacetimeGrid {
        steps: a.steps,
        counts,
        origin,
    })
}
