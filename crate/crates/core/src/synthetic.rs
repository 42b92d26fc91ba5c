//! Random persistence diagrams for tests and benchmarks.
//!
//! Values live in `[0, 1]` and positions in the unit square (`z = 0`).
//! Near-diagonal pairs have persistence below 0.02 and a saddle close to
//! their extremum, like the noise pairs of a real field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::persistence::{CriticalIndex, CriticalPoint, PairClass, PersistenceDiagram, PersistencePair};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct DiagramSpec {
    pub pairs: usize,
    /// Fraction of pairs with tiny persistence.
    pub near_diagonal: f64,
    pub class: PairClass,
}

fn point<T: Scalar>(vertex_id: usize, xy: [f64; 2], value: f64, index: CriticalIndex) -> CriticalPoint<T> {
    CriticalPoint {
        vertex_id,
        coords: [T::lit(xy[0]), T::lit(xy[1]), T::zero()],
        value: T::lit(value),
        index,
    }
}

fn make_pair<T: Scalar>(
    id: usize,
    class: PairClass,
    birth: f64,
    death: f64,
    ext: [f64; 2],
    other: [f64; 2],
) -> PersistencePair<T> {
    let (b_xy, d_xy, b_idx, d_idx) = match class {
        PairClass::SaddleMax => (other, ext, CriticalIndex::Saddle, CriticalIndex::Maximum),
        PairClass::MinSaddle => (ext, other, CriticalIndex::Minimum, CriticalIndex::Saddle),
    };
    let birth_point = point(2 * id, b_xy, birth, b_idx);
    let death_point = point(2 * id + 1, d_xy, death, d_idx);
    PersistencePair::new(birth_point, death_point, class, false)
}

fn random_pair<T: Scalar>(rng: &mut ChaCha8Rng, id: usize, spec: &DiagramSpec) -> PersistencePair<T> {
    let near = rng.gen::<f64>() < spec.near_diagonal;
    let (pers, reach) = if near {
        (rng.gen_range(0.0..0.02), 0.02)
    } else {
        (rng.gen_range(0.05..0.5), 0.15)
    };
    let birth = rng.gen_range(0.0..1.0 - pers);
    let ext = [rng.gen::<f64>(), rng.gen::<f64>()];
    let other = [
        (ext[0] + rng.gen_range(-reach..reach)).clamp(0.0, 1.0),
        (ext[1] + rng.gen_range(-reach..reach)).clamp(0.0, 1.0),
    ];
    make_pair(id, spec.class, birth, birth + pers, ext, other)
}

/// A random diagram; no essential pair.
pub fn random_diagram<T: Scalar>(seed: u64, spec: &DiagramSpec) -> PersistenceDiagram<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = (0..spec.pairs).map(|k| random_pair(&mut rng, k, spec)).collect();
    PersistenceDiagram {
        time_index: 0,
        pairs,
        field_range: (T::zero(), T::one()),
    }
}

/// The next "timestep" of `d`: every pair is jittered by up to `jitter` in
/// value and position, a fraction `turnover` of the pairs is replaced by
/// fresh random ones, and the result is truncated or extended to
/// `target_len` pairs.
pub fn perturb_diagram<T: Scalar>(
    seed: u64,
    d: &PersistenceDiagram<T>,
    spec: &DiagramSpec,
    jitter: f64,
    turnover: f64,
    target_len: usize,
) -> PersistenceDiagram<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(target_len);
    for (k, p) in d.pairs.iter().enumerate().take(target_len) {
        if rng.gen::<f64>() < turnover {
            pairs.push(random_pair(&mut rng, k, spec));
            continue;
        }
        let mut shift = || rng.gen_range(-jitter..=jitter);
        let pers = (p.persistence.as_f64() + shift()).max(0.0);
        let birth = (p.birth.as_f64() + shift()).clamp(0.0, 1.0 - pers);
        let e = p.extremum().coords;
        let o = p.partner().coords;
        let ext = [
            (e[0].as_f64() + shift()).clamp(0.0, 1.0),
            (e[1].as_f64() + shift()).clamp(0.0, 1.0),
        ];
        let other = [
            (o[0].as_f64() + shift()).clamp(0.0, 1.0),
            (o[1].as_f64() + shift()).clamp(0.0, 1.0),
        ];
        pairs.push(make_pair(k, p.pair_class, birth, birth + pers, ext, other));
    }
    for k in pairs.len()..target_len {
        pairs.push(random_pair(&mut rng, k, spec));
    }
    PersistenceDiagram {
        time_index: d.time_index + 1,
        pairs,
        field_range: d.field_range,
    }
}

/// Two consecutive-looking diagrams with `n1` and `n2` pairs.
pub fn random_diagram_pair<T: Scalar>(
    seed: u64,
    n1: usize,
    n2: usize,
    near_diagonal: f64,
) -> (PersistenceDiagram<T>, PersistenceDiagram<T>) {
    let spec = DiagramSpec {
        pairs: n1,
        near_diagonal,
        class: PairClass::SaddleMax,
    };
    let d1 = random_diagram(seed, &spec);
    let d2 = perturb_diagram(seed.wrapping_add(0x9e37_79b9), &d1, &spec, 0.01, 0.2, n2);
    (d1, d2)
}
