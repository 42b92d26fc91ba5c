//! Synthetic gaussian-mixture fields used as tracking fixtures.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Grid, GridError, ScalarField, TimeSeries};
use crate::scalar::Scalar;

/// One isotropic gaussian bump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blob<T> {
    pub center: [T; 3],
    pub amplitude: T,
    pub sigma: T,
}

/// `values[v] = sum_k amp_k * exp(-|pos(v) - center_k|^2 / (2 sigma_k^2))`.
pub fn gen_gaussian_mixture<T: Scalar>(
    grid: Grid<T>,
    centers: &[[T; 3]],
    amplitudes: &[T],
    sigmas: &[T],
) -> Result<ScalarField<T>, GridError> {
    if centers.len() != amplitudes.len() || centers.len() != sigmas.len() {
        return Err(GridError::LengthMismatch {
            centers: centers.len(),
            amplitudes: amplitudes.len(),
            sigmas: sigmas.len(),
        });
    }
    if let Some(s) = sigmas.iter().find(|s| !(**s > T::zero())) {
        return Err(GridError::InvalidParameter(format!("sigma must be positive, got {s}")));
    }
    let blobs: Vec<Blob<T>> = centers
        .iter()
        .zip(amplitudes)
        .zip(sigmas)
        .map(|((&center, &amplitude), &sigma)| Blob {
            center,
            amplitude,
            sigma,
        })
        .collect();
    mixture(grid, &blobs, 0)
}

fn mixture<T: Scalar>(grid: Grid<T>, blobs: &[Blob<T>], time_index: usize) -> Result<ScalarField<T>, GridError> {
    let grid = Grid::new(grid.dims, grid.origin, grid.spacing)?;
    let two = T::lit(2.0);
    let values = (0..grid.num_vertices())
        .map(|v| {
            let p = grid.position(v);
            blobs.iter().fold(T::zero(), |acc, b| {
                let d2 = (0..3)
                    .map(|a| (p[a] - b.center[a]).powi(2))
                    .fold(T::zero(), |s, x| s + x);
                acc + b.amplitude * (-d2 / (two * b.sigma * b.sigma)).exp()
            })
        })
        .collect();
    ScalarField::new(grid, values, time_index)
}

/// Builds a series where the blobs at step `t` are given by `blobs_at(t)`.
pub fn gen_moving_gaussians<T: Scalar>(
    grid: Grid<T>,
    timesteps: usize,
    mut blobs_at: impl FnMut(usize) -> Vec<Blob<T>>,
) -> Result<TimeSeries<T>, GridError> {
    if timesteps == 0 {
        return Err(GridError::InvalidParameter("timesteps must be at least 1".into()));
    }
    let mut fields = Vec::with_capacity(timesteps);
    for t in 0..timesteps {
        let blobs = blobs_at(t);
        if let Some(b) = blobs.iter().find(|b| !(b.sigma > T::zero())) {
            return Err(GridError::InvalidParameter(format!(
                "sigma must be positive, got {}",
                b.sigma
            )));
        }
        fields.push(mixture(grid, &blobs, t)?);
    }
    TimeSeries::new(fields)
}

/// Gaussians orbiting the domain center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhirlingParams<T> {
    pub n: usize,
    pub timesteps: usize,
    pub dims: [usize; 3],
    pub orbit_radius: T,
    /// Radians per timestep.
    pub angular_speed: T,
    pub sigma: T,
    pub amplitude: T,
    /// Gaussian `k` gets amplitude `amplitude * (1 - amplitude_falloff * k / n)`.
    pub amplitude_falloff: T,
}

impl Default for WhirlingParams<f64> {
    fn default() -> Self {
        Self {
            n: 8,
            timesteps: 50,
            dims: [64, 64, 1],
            orbit_radius: 0.3,
            angular_speed: 2.0 * PI / 50.0,
            sigma: 0.05,
            amplitude: 1.0,
            amplitude_falloff: 0.0,
        }
    }
}

impl<T: Scalar> WhirlingParams<T> {
    /// Center of gaussian `k` at step `t`, on the unit-extent grid.
    pub fn center(&self, grid: &Grid<T>, k: usize, t: usize) -> [T; 3] {
        let c = grid.center();
        let angle = T::lit(2.0 * PI * k as f64 / self.n as f64) + T::lit(t as f64) * self.angular_speed;
        [
            c[0] + self.orbit_radius * angle.cos(),
            c[1] + self.orbit_radius * angle.sin(),
            c[2],
        ]
    }

    pub fn amplitude_of(&self, k: usize) -> T {
        self.amplitude * (T::one() - self.amplitude_falloff * T::lit(k as f64 / self.n as f64))
    }
}

/// Gaussian `k` sits at angle `2*pi*k/n + t*angular_speed` on a circle of
/// radius `orbit_radius` around the domain center. The grid spans `[0,1]`
/// along its longest axis.
pub fn gen_whirling_gaussians<T: Scalar>(params: &WhirlingParams<T>) -> Result<TimeSeries<T>, GridError> {
    if params.n == 0 {
        return Err(GridError::InvalidParameter("need at least one gaussian".into()));
    }
    let grid = Grid::unit(params.dims)?;
    gen_moving_gaussians(grid, params.timesteps, |t| {
        (0..params.n)
            .map(|k| Blob {
                center: params.center(&grid, k, t),
                amplitude: params.amplitude_of(k),
                sigma: params.sigma,
            })
            .collect()
    })
}

/// Gaussians translating with a common constant velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslatingParams<T> {
    pub timesteps: usize,
    pub dims: [usize; 3],
    pub starts: Vec<[T; 3]>,
    pub amplitudes: Vec<T>,
    pub sigma: T,
    /// World units per timestep.
    pub velocity: [T; 3],
}

impl Default for TranslatingParams<f64> {
    fn default() -> Self {
        // A column of three features moving along +x. Features 4 sigma apart
        // have small split-tree leaves, so a 5-step jump leaves them disjoint.
        Self {
            timesteps: 50,
            dims: [161, 81, 1],
            starts: vec![[0.2, 0.4, 0.0], [0.2, 0.5, 0.0], [0.2, 0.6, 0.0]],
            amplitudes: vec![0.8, 1.0, 0.6],
            sigma: 0.025,
            velocity: [0.024, 0.0, 0.0],
        }
    }
}

impl<T: Scalar> TranslatingParams<T> {
    pub fn center(&self, k: usize, t: usize) -> [T; 3] {
        let s = self.starts[k];
        [0, 1, 2].map(|a| s[a] + self.velocity[a] * T::lit(t as f64))
    }
}

/// The grid spans `[0, (nx-1)/(ny-1)] x [0, 1]` for 2D dims with nx >= ny.
pub fn gen_translating_gaussians<T: Scalar>(params: &TranslatingParams<T>) -> Result<TimeSeries<T>, GridError> {
    if params.starts.len() != params.amplitudes.len() {
        return Err(GridError::LengthMismatch {
            centers: params.starts.len(),
            amplitudes: params.amplitudes.len(),
            sigmas: params.starts.len(),
        });
    }
    let grid = short_axis_unit_grid(params.dims)?;
    gen_moving_gaussians(grid, params.timesteps, |t| {
        (0..params.starts.len())
            .map(|k| Blob {
                center: params.center(k, t),
                amplitude: params.amplitudes[k],
                sigma: params.sigma,
            })
            .collect()
    })
}

fn short_axis_unit_grid<T: Scalar>(dims: [usize; 3]) -> Result<Grid<T>, GridError> {
    let shortest = dims[..2].iter().copied().min().unwrap_or(1).max(2) - 1;
    let h = T::one() / T::lit(shortest as f64);
    Grid::new(dims, [T::zero(); 3], [h; 3])
}

/// Two gaussians moving along +x that converge into one. The trailing
/// gaussian appears at `late_start`, catches up with the leading one, and the
/// pair fuses into a single feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeFixtureParams<T> {
    pub timesteps: usize,
    pub dims: [usize; 3],
    pub sigma: T,
    pub lead_start: T,
    pub lead_speed: T,
    pub lead_amplitude: T,
    pub trail_start: T,
    pub trail_speed: T,
    pub trail_amplitude: T,
    pub late_start: usize,
}

impl Default for MergeFixtureParams<f64> {
    fn default() -> Self {
        Self {
            timesteps: 30,
            dims: [97, 49, 1],
            sigma: 0.06,
            lead_start: 0.8,
            lead_speed: 0.01,
            lead_amplitude: 0.8,
            trail_start: 0.3,
            trail_speed: 0.035,
            trail_amplitude: 1.0,
            late_start: 2,
        }
    }
}

impl<T: Scalar> MergeFixtureParams<T> {
    /// x coordinates of the (lead, trail) gaussians at step `t`. Once the
    /// trail catches up it stays on the lead.
    pub fn positions(&self, t: usize) -> (T, T) {
        let tt = T::lit(t as f64);
        let lead = self.lead_start + self.lead_speed * tt;
        let trail = self.trail_start + self.trail_speed * tt;
        (lead, if trail < lead { trail } else { lead })
    }
}

/// Grid spans `[0, 2] x [0, 1]` for the default dims.
pub fn gen_merge_fixture<T: Scalar>(params: &MergeFixtureParams<T>) -> Result<TimeSeries<T>, GridError> {
    let grid = short_axis_unit_grid(params.dims)?;
    let y = grid.center()[1];
    gen_moving_gaussians(grid, params.timesteps, |t| {
        let (xl, xt) = params.positions(t);
        let mut blobs = vec![Blob {
            center: [xl, y, T::zero()],
            amplitude: params.lead_amplitude,
            sigma: params.sigma,
        }];
        if t >= params.late_start {
            blobs.push(Blob {
                center: [xt, y, T::zero()],
                amplitude: params.trail_amplitude,
                sigma: params.sigma,
            });
        }
        blobs
    })
}

/// Randomly placed gaussians drifting with constant random velocities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomGaussiansParams {
    pub n: usize,
    pub timesteps: usize,
    pub dims: [usize; 3],
    pub seed: u64,
    /// Largest per-axis displacement per timestep.
    pub max_speed: f64,
}

impl Default for RandomGaussiansParams {
    fn default() -> Self {
        Self {
            n: 4,
            timesteps: 10,
            dims: [64, 64, 1],
            seed: 0,
            max_speed: 0.01,
        }
    }
}

/// Centers in `[0.15, 0.85]` along every non-flat axis, amplitudes in
/// `[0.3, 1]`, sigmas in `[0.03, 0.08]`, on a grid spanning `[0,1]` along its
/// longest axis.
pub fn gen_random_gaussians<T: Scalar>(params: &RandomGaussiansParams) -> Result<TimeSeries<T>, GridError> {
    let grid = Grid::unit(params.dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let flat = params.dims.map(|d| d == 1);
    let blobs: Vec<(Blob<T>, [f64; 3])> = (0..params.n)
        .map(|_| {
            let mut center = [T::zero(); 3];
            let mut velocity = [0.0; 3];
            for a in 0..3 {
                if !flat[a] {
                    center[a] = T::lit(rng.gen_range(0.15..=0.85));
                    velocity[a] = rng.gen_range(-params.max_speed..=params.max_speed);
                }
            }
            let blob = Blob {
                center,
                amplitude: T::lit(rng.gen_range(0.3..=1.0)),
                sigma: T::lit(rng.gen_range(0.03..=0.08)),
            };
            (blob, velocity)
        })
        .collect();
    gen_moving_gaussians(grid, params.timesteps, |t| {
        blobs
            .iter()
            .map(|(b, v)| Blob {
                center: [0, 1, 2].map(|a| b.center[a] + T::lit(v[a] * t as f64)),
                ..*b
            })
            .collect()
    })
}

/// Two fields with similar diagrams whose two weaker maxima trade places:
/// `f` has amplitudes 0.7 at `(0.25, 0.25)` and 0.4 at `(0.75, 0.25)`,
/// `g` the reverse. Both share the global maximum at `(0.5, 0.75)`.
pub fn gen_swap_fixture<T: Scalar>() -> Result<(ScalarField<T>, ScalarField<T>), GridError> {
    let grid = Grid::unit([65, 65, 1])?;
    let at = |x: f64, y: f64| [T::lit(x), T::lit(y), T::zero()];
    let centers = [at(0.5, 0.75), at(0.25, 0.25), at(0.75, 0.25)];
    let sigmas = [T::lit(0.1); 3];
    let f = gen_gaussian_mixture(grid, &centers, &[T::one(), T::lit(0.7), T::lit(0.4)], &sigmas)?;
    let mut g = gen_gaussian_mixture(grid, &centers, &[T::one(), T::lit(0.4), T::lit(0.7)], &sigmas)?;
    g.time_index = 1;
    Ok((f, g))
}

/// Two overlapping gaussians at `(0.5, 0.3)` and `(0.5, 0.7)` whose
/// amplitudes (1.0 and 0.9) swap between the two fields, over a fixed pit
/// at `(0.1, 0.5)`. The higher maximum forms the essential pair, born at the
/// pit, so the birth of the pair at each location changes between fields.
pub fn gen_birth_lift_fixture<T: Scalar>() -> Result<(ScalarField<T>, ScalarField<T>), GridError> {
    let grid = Grid::unit([65, 65, 1])?;
    let at = |x: f64, y: f64| [T::lit(x), T::lit(y), T::zero()];
    let centers = [at(0.5, 0.3), at(0.5, 0.7), at(0.1, 0.5)];
    let sigmas = [T::lit(0.12), T::lit(0.12), T::lit(0.1)];
    let f = gen_gaussian_mixture(grid, &centers, &[T::one(), T::lit(0.9), T::lit(-0.5)], &sigmas)?;
    let mut g = gen_gaussian_mixture(grid, &centers, &[T::lit(0.9), T::one(), T::lit(-0.5)], &sigmas)?;
    g.time_index = 1;
    Ok((f, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_mixture_is_zero() {
        let grid = Grid::<f64>::unit([8, 8, 1]).unwrap();
        let f = gen_gaussian_mixture(grid, &[], &[], &[]).unwrap();
        assert!(f.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mixture_length_mismatch() {
        let grid = Grid::<f64>::unit([8, 8, 1]).unwrap();
        let err = gen_gaussian_mixture(grid, &[[0.5, 0.5, 0.0]], &[1.0, 2.0], &[0.1]);
        assert!(matches!(err, Err(GridError::LengthMismatch { .. })));
    }

    #[test]
    fn mixture_peak_value() {
        let grid = Grid::<f64>::unit([11, 11, 1]).unwrap();
        let f = gen_gaussian_mixture(grid, &[[0.5, 0.5, 0.0]], &[2.0], &[0.1]).unwrap();
        let center = grid.index([5, 5, 0]);
        assert!((f.values[center] - 2.0).abs() < 1e-15);
        let v = f.values[grid.index([6, 5, 0])];
        assert!((v - 2.0 * (-0.01f64 / 0.02).exp()).abs() < 1e-12);
    }

    #[test]
    fn static_whirl_is_constant_in_time() {
        let params = WhirlingParams {
            angular_speed: 0.0,
            timesteps: 4,
            dims: [16, 16, 1],
            ..WhirlingParams::default()
        };
        let s = gen_whirling_gaussians(&params).unwrap();
        assert_eq!(s.len(), 4);
        for f in &s.fields[1..] {
            assert_eq!(f.values, s.fields[0].values);
        }
        assert!(s.uniform);
    }

    #[test]
    fn whirl_centers_on_circle() {
        let params = WhirlingParams::<f64>::default();
        let grid = Grid::unit(params.dims).unwrap();
        for t in [0, 7, 49] {
            for k in 0..params.n {
                let c = params.center(&grid, k, t);
                let r = ((c[0] - 0.5).powi(2) + (c[1] - 0.5).powi(2)).sqrt();
                assert!((r - params.orbit_radius).abs() < 1e-12);
            }
        }
        // per-step displacement stays below sigma
        let a = params.center(&grid, 0, 0);
        let b = params.center(&grid, 0, 1);
        let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        assert!(d < params.sigma);
    }

    #[test]
    fn merge_fixture_trail_appears_late() {
        let p = MergeFixtureParams::<f64>::default();
        let s = gen_merge_fixture(&p).unwrap();
        assert_eq!(s.len(), p.timesteps);
        let (lo0, hi0) = s.fields[0].range();
        assert!(hi0 <= p.lead_amplitude + 1e-12 && lo0 >= 0.0);
        let (_, hi) = s.fields[p.late_start].range();
        assert!(hi > p.lead_amplitude);
    }
}
