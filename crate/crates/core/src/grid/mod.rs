//! Regular-grid scalar fields and time series.
//!
//! A [`ScalarField`] stores one timestep of a piecewise-linear scalar function
//! sampled on the vertices of a regular grid. Values are laid out x-fastest:
//! vertex `(i, j, k)` has flat index `i + nx * (j + ny * k)`. Two-dimensional
//! fields use `nz = 1`.

mod generate;
mod io;

pub use generate::{
    gen_birth_lift_fixture, gen_gaussian_mixture, gen_merge_fixture, gen_moving_gaussians, gen_random_gaussians,
    gen_swap_fixture, gen_translating_gaussians, gen_whirling_gaussians, Blob, MergeFixtureParams,
    RandomGaussiansParams, TranslatingParams, WhirlingParams,
};
pub use io::{load_field, load_series, save_field, save_series, FieldFormat};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid grid dimensions {0:?}: every axis needs at least one vertex")]
    EmptyDims([usize; 3]),
    #[error("invalid spacing {0:?}: components must be positive and finite")]
    BadSpacing([f64; 3]),
    #[error("dimension mismatch: dims {dims:?} need {expected} values, found {found}")]
    DimensionMismatch {
        dims: [usize; 3],
        expected: usize,
        found: usize,
    },
    #[error("non-finite value at {location}")]
    NonFinite { location: String },
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
    #[error("list length mismatch: {centers} centers, {amplitudes} amplitudes, {sigmas} sigmas")]
    LengthMismatch {
        centers: usize,
        amplitudes: usize,
        sigmas: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("time indices must be strictly increasing ({previous} followed by {next})")]
    TimeOrder { previous: usize, next: usize },
    #[error("empty time series")]
    EmptySeries,
    #[error("series is not uniform: timestep {0} has a different grid")]
    NonUniform(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Geometry of a regular grid: vertex counts, world-space origin and spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    pub dims: [usize; 3],
    pub origin: [T; 3],
    pub spacing: [T; 3],
}

/// Freudenthal (Kuhn) triangulation edges: all non-zero offsets in {0,1}^3
/// and their negations. Offsets leaving the grid are skipped, so a grid with
/// `nz = 1` gets the 6-neighborhood and a 3D grid the 14-neighborhood.
const FREUDENTHAL_OFFSETS: [[isize; 3]; 14] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 0],
    [1, 0, 1],
    [0, 1, 1],
    [1, 1, 1],
    [-1, 0, 0],
    [0, -1, 0],
    [0, 0, -1],
    [-1, -1, 0],
    [-1, 0, -1],
    [0, -1, -1],
    [-1, -1, -1],
];

impl<T: Scalar> Grid<T> {
    pub fn new(dims: [usize; 3], origin: [T; 3], spacing: [T; 3]) -> Result<Self, GridError> {
        if dims.iter().any(|&d| d == 0) {
            return Err(GridError::EmptyDims(dims));
        }
        if spacing.iter().any(|s| !(s.is_finite() && *s > T::zero())) {
            return Err(GridError::BadSpacing(spacing.map(|s| s.as_f64())));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(GridError::NonFinite {
                location: "origin".into(),
            });
        }
        Ok(Self { dims, origin, spacing })
    }

    /// Grid with the given vertex counts spanning `[0,1]` along its longest
    /// axis, with equal spacing on every axis.
    pub fn unit(dims: [usize; 3]) -> Result<Self, GridError> {
        let longest = dims.iter().copied().max().unwrap_or(1).max(2) - 1;
        let h = T::one() / T::lit(longest as f64);
        Self::new(dims, [T::zero(); 3], [h; 3])
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    #[inline]
    pub fn is_2d(&self) -> bool {
        self.dims[2] == 1
    }

    #[inline]
    pub fn index(&self, ijk: [usize; 3]) -> usize {
        ijk[0] + self.dims[0] * (ijk[1] + self.dims[1] * ijk[2])
    }

    #[inline]
    pub fn ijk(&self, v: usize) -> [usize; 3] {
        let nx = self.dims[0];
        let ny = self.dims[1];
        [v % nx, (v / nx) % ny, v / (nx * ny)]
    }

    /// World coordinates of vertex `v`.
    #[inline]
    pub fn position(&self, v: usize) -> [T; 3] {
        let ijk = self.ijk(v);
        [0, 1, 2].map(|a| self.origin[a] + self.spacing[a] * T::lit(ijk[a] as f64))
    }

    /// World coordinates of the far corner of the grid.
    pub fn upper_corner(&self) -> [T; 3] {
        [0, 1, 2].map(|a| self.origin[a] + self.spacing[a] * T::lit((self.dims[a] - 1) as f64))
    }

    /// World-space center of the bounding box.
    pub fn center(&self) -> [T; 3] {
        let hi = self.upper_corner();
        [0, 1, 2].map(|a| (self.origin[a] + hi[a]) * T::lit(0.5))
    }

    /// Calls `f` on every Freudenthal neighbor of `v` inside the grid.
    #[inline]
    pub fn for_each_neighbor(&self, v: usize, mut f: impl FnMut(usize)) {
        let ijk = self.ijk(v);
        for off in FREUDENTHAL_OFFSETS.iter() {
            let mut n = [0usize; 3];
            let mut inside = true;
            for a in 0..3 {
                let c = ijk[a] as isize + off[a];
                if c < 0 || c >= self.dims[a] as isize {
                    inside = false;
                    break;
                }
                n[a] = c as usize;
            }
            if inside {
                f(self.index(n));
            }
        }
    }
}

/// One timestep of a scalar field on a regular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    pub grid: Grid<T>,
    pub values: Vec<T>,
    pub time_index: usize,
}

impl<T: Scalar> ScalarField<T> {
    pub fn new(grid: Grid<T>, values: Vec<T>, time_index: usize) -> Result<Self, GridError> {
        let grid = Grid::new(grid.dims, grid.origin, grid.spacing)?;
        let expected = grid.num_vertices();
        if values.len() != expected {
            return Err(GridError::DimensionMismatch {
                dims: grid.dims,
                expected,
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite {
                location: format!("value index {i} (vertex {:?})", grid.ijk(i)),
            });
        }
        Ok(Self {
            grid,
            values,
            time_index,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(min, max)` of the field values.
    pub fn range(&self) -> (T, T) {
        self.values
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// Ordered sequence of fields, one per timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    pub fields: Vec<ScalarField<T>>,
    pub uniform: bool,
}

impl<T: Scalar> TimeSeries<T> {
    pub fn new(fields: Vec<ScalarField<T>>) -> Result<Self, GridError> {
        for w in fields.windows(2) {
            if w[1].time_index <= w[0].time_index {
                return Err(GridError::TimeOrder {
                    previous: w[0].time_index,
                    next: w[1].time_index,
                });
            }
        }
        let uniform = fields.windows(2).all(|w| w[0].grid == w[1].grid);
        Ok(Self { fields, uniform })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.fields.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Index of the first field whose grid differs from the first one, if any.
    pub fn first_non_uniform(&self) -> Option<usize> {
        let first = self.fields.first()?.grid;
        self.fields.iter().position(|f| f.grid != first)
    }
}

/// Perturbs every vertex by an independent uniform sample in
/// `[-a/2, a/2] * range`, where `range` is the scalar range of `field`.
pub fn add_noise<T: Scalar>(field: &ScalarField<T>, amplitude_fraction: T, seed: u64) -> ScalarField<T> {
    let mut out = field.clone();
    if amplitude_fraction <= T::zero() {
        return out;
    }
    let (lo, hi) = field.range();
    let half = (amplitude_fraction * (hi - lo) * T::lit(0.5)).as_f64();
    if half <= 0.0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in out.values.iter_mut() {
        let delta: f64 = rng.gen_range(-half..=half);
        *v += T::lit(delta);
    }
    out
}

/// Applies [`add_noise`] to every timestep. Timestep `t` uses a seed derived
/// from `seed` and its position in the series.
pub fn add_noise_series<T: Scalar>(series: &TimeSeries<T>, amplitude_fraction: T, seed: u64) -> TimeSeries<T> {
    let fields = series
        .fields
        .iter()
        .enumerate()
        .map(|(i, f)| add_noise(f, amplitude_fraction, derive_seed(seed, i as u64)))
        .collect();
    TimeSeries {
        fields,
        uniform: series.uniform,
    }
}

/// SplitMix64 step, used to derive independent per-timestep seeds.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Keeps timesteps `0, stride, 2*stride, ...`, preserving their time indices.
pub fn downsample_time<T: Scalar>(series: &TimeSeries<T>, stride: usize) -> Result<TimeSeries<T>, GridError> {
    if stride == 0 {
        return Err(GridError::InvalidParameter("stride must be at least 1".into()));
    }
    let fields: Vec<_> = series.fields.iter().step_by(stride).cloned().collect();
    TimeSeries::new(fields)
}

/// Affine maps applied by [`normalize`]. A normalized coordinate is
/// `(x - spatial_offset) * spatial_scale`; a normalized value is
/// `(v - scalar_offset) * scalar_scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationInfo<T> {
    pub spatial_offset: [T; 3],
    pub spatial_scale: T,
    pub scalar_offset: T,
    pub scalar_scale: T,
    /// Set when the series has zero scalar range; every value then maps to 0.
    pub degenerate_scalar: bool,
}

impl<T: Scalar> NormalizationInfo<T> {
    pub fn map_point(&self, p: [T; 3]) -> [T; 3] {
        [0, 1, 2].map(|a| (p[a] - self.spatial_offset[a]) * self.spatial_scale)
    }

    pub fn unmap_point(&self, p: [T; 3]) -> [T; 3] {
        [0, 1, 2].map(|a| p[a] / self.spatial_scale + self.spatial_offset[a])
    }

    pub fn map_value(&self, v: T) -> T {
        (v - self.scalar_offset) * self.scalar_scale
    }

    pub fn unmap_value(&self, v: T) -> T {
        if self.degenerate_scalar {
            self.scalar_offset
        } else {
            v / self.scalar_scale + self.scalar_offset
        }
    }
}

/// Maps world coordinates so the bounding box of the whole series spans
/// `[0,1]` along its longest axis (aspect preserved), and scalar values so the
/// global min/max over all timesteps span `[0,1]`.
pub fn normalize<T: Scalar>(series: &TimeSeries<T>) -> Result<(TimeSeries<T>, NormalizationInfo<T>), GridError> {
    if series.is_empty() {
        return Err(GridError::EmptySeries);
    }
    let mut lo = [T::infinity(); 3];
    let mut hi = [T::neg_infinity(); 3];
    let mut vmin = T::infinity();
    let mut vmax = T::neg_infinity();
    for f in &series.fields {
        let up = f.grid.upper_corner();
        for a in 0..3 {
            lo[a] = lo[a].min(f.grid.origin[a]);
            hi[a] = hi[a].max(up[a]);
        }
        let (a, b) = f.range();
        vmin = vmin.min(a);
        vmax = vmax.max(b);
    }
    let longest = (0..3).map(|a| hi[a] - lo[a]).fold(T::zero(), T::max);
    let spatial_scale = if longest > T::zero() {
        T::one() / longest
    } else {
        T::one()
    };
    let degenerate_scalar = !(vmax > vmin);
    let scalar_scale = if degenerate_scalar {
        T::zero()
    } else {
        T::one() / (vmax - vmin)
    };
    let info = NormalizationInfo {
        spatial_offset: lo,
        spatial_scale,
        scalar_offset: vmin,
        scalar_scale,
        degenerate_scalar,
    };

    let fields = series
        .fields
        .iter()
        .map(|f| {
            let grid = Grid {
                dims: f.grid.dims,
                origin: info.map_point(f.grid.origin),
                spacing: f.grid.spacing.map(|s| s * spatial_scale),
            };
            let values = f.values.iter().map(|&v| info.map_value(v)).collect();
            ScalarField {
                grid,
                values,
                time_index: f.time_index,
            }
        })
        .collect();
    Ok((
        TimeSeries {
            fields,
            uniform: series.uniform,
        },
        info,
    ))
}
