//! Multi-start search for the largest CHSH value a state can reach.
//!
//! Each of the four directions is parametrized by two spherical angles,
//! giving an 8-dimensional periodic landscape. From every start the search
//! runs coordinate-wise line searches: a `grid_points` scan over one full
//! period of the coordinate, then golden-section refinement of the best
//! bracket down to `tolerance`. Sweeps repeat until a full pass no longer
//! improves the value.

use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::quantum::{correlator, Mat2, TwoQubitState, UnitVector3};
use crate::rng::stream_rng;

use super::chsh_value;

const TAU: f64 = std::f64::consts::TAU;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq)]
pub struct ChshOptimizerConfig {
    pub starts: usize,
    pub seed: u64,
    /// Points of the coarse scan preceding each golden-section refinement.
    pub grid_points: usize,
    /// Bracket width at which golden-section refinement stops.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for ChshOptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            seed: 0,
            grid_points: 20,
            tolerance: 1e-8,
            max_sweeps: 500,
        }
    }
}

/// Alice's `(â, â′)` and Bob's `(b̂, b̂′)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub alice: [UnitVector3; 2],
    pub bob: [UnitVector3; 2],
}

impl ChshSettings {
    pub fn from_angles(angles: &[f64; 8]) -> Self {
        let d = |k: usize| UnitVector3::from_spherical(angles[2 * k], angles[2 * k + 1]);
        Self {
            alice: [d(0), d(1)],
            bob: [d(2), d(3)],
        }
    }

    /// Born-rule CHSH value of `state` at these settings.
    pub fn chsh(&self, state: &TwoQubitState) -> Result<f64> {
        let e = |i: usize, j: usize| correlator(state, &self.alice[i], &self.bob[j]);
        chsh_value(e(0, 0)?, e(0, 1)?, e(1, 0)?, e(1, 1)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshOptimum {
    pub value: f64,
    pub settings: ChshSettings,
}

/// Real correlation tensor `T[i][j] = ⟨σ_i ⊗ σ_j⟩`, so that `E(a, b) = aᵀ T b`.
fn correlation_tensor(state: &TwoQubitState) -> [[f64; 3]; 3] {
    let paulis = [Mat2::pauli_x(), Mat2::pauli_y(), Mat2::pauli_z()];
    let mut t = [[0.0; 3]; 3];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = state.expectation(&paulis[i], &paulis[j]).re;
        }
    }
    t
}

struct Landscape {
    tensor: [[f64; 3]; 3],
}

impl Landscape {
    fn value(&self, angles: &[f64; 8]) -> f64 {
        let dirs: [[f64; 3]; 4] = std::array::from_fn(|k| {
            let (st, ct) = angles[2 * k].sin_cos();
            let (sp, cp) = angles[2 * k + 1].sin_cos();
            [st * cp, st * sp, ct]
        });
        let e = |a: &[f64; 3], b: &[f64; 3]| {
            a.iter()
                .zip(&self.tensor)
                .map(|(ai, row)| ai * row.iter().zip(b).map(|(t, bj)| t * bj).sum::<f64>())
                .sum::<f64>()
        };
        (e(&dirs[0], &dirs[2]) + e(&dirs[0], &dirs[3]) + e(&dirs[1], &dirs[2])
            - e(&dirs[1], &dirs[3]))
        .abs()
    }

    fn along(&self, angles: &mut [f64; 8], k: usize, t: f64) -> f64 {
        angles[k] = t;
        self.value(angles)
    }

    /// Best value on coordinate `k`; updates `angles` only on improvement.
    fn line_search(&self, angles: &mut [f64; 8], k: usize, current: f64, config: &ChshOptimizerConfig) -> f64 {
        let origin = angles[k];
        let mut probe = *angles;
        let step = TAU / config.grid_points as f64;
        let (mut best_t, mut best_v) = (origin, current);
        for m in 1..config.grid_points {
            let t = origin + step * m as f64;
            let v = self.along(&mut probe, k, t);
            if v > best_v {
                best_t = t;
                best_v = v;
            }
        }

        let (mut lo, mut hi) = (best_t - step, best_t + step);
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let mut f1 = self.along(&mut probe, k, x1);
        let mut f2 = self.along(&mut probe, k, x2);
        while hi - lo > config.tolerance {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = self.along(&mut probe, k, x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = self.along(&mut probe, k, x1);
            }
        }
        let mid = 0.5 * (lo + hi);
        let fm = self.along(&mut probe, k, mid);
        for (t, v) in [(x1, f1), (x2, f2), (mid, fm)] {
            if v > best_v {
                best_t = t;
                best_v = v;
            }
        }

        angles[k] = best_t.rem_euclid(TAU);
        best_v
    }

    fn climb(&self, mut angles: [f64; 8], config: &ChshOptimizerConfig) -> ([f64; 8], f64) {
        let mut value = self.value(&angles);
        for _ in 0..config.max_sweeps {
            let before = value;
            for k in 0..8 {
                value = self.line_search(&mut angles, k, value, config);
            }
            if value - before <= 1e-15 {
                break;
            }
        }
        (angles, value)
    }
}

fn random_start<R: Rng>(rng: &mut R) -> [f64; 8] {
    let mut angles = [0.0; 8];
    for k in 0..4 {
        // uniform on the sphere
        let u: f64 = rng.gen();
        angles[2 * k] = (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos();
        angles[2 * k + 1] = TAU * rng.gen::<f64>();
    }
    angles
}

/// Largest CHSH value found for `state` over all four measurement directions.
///
/// Starts are drawn from `stream_rng(seed, start_index)` and climbed in
/// parallel; the best value wins, ties going to the lowest start index. The
/// returned value is recomputed from the final directions with the Born rule.
pub fn chsh_quantum_max(state: &TwoQubitState, config: &ChshOptimizerConfig) -> Result<ChshOptimum> {
    let landscape = Landscape {
        tensor: correlation_tensor(state),
    };
    let climbed: Vec<([f64; 8], f64)> = (0..config.starts.max(1))
        .into_par_iter()
        .map(|s| {
            let start = random_start(&mut stream_rng(config.seed, s as u64));
            landscape.climb(start, config)
        })
        .collect();

    let mut best = &climbed[0];
    for candidate in &climbed[1..] {
        if candidate.1 > best.1 {
            best = candidate;
        }
    }
    let settings = ChshSettings::from_angles(&best.0);
    Ok(ChshOptimum {
        value: settings.chsh(state)?,
        settings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::singlet;

    #[test]
    fn tensor_of_singlet_is_minus_identity() {
        let t = correlation_tensor(&singlet());
        for (i, row) in t.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expected = if i == j { -1.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn landscape_matches_born_rule() {
        let state = singlet();
        let landscape = Landscape {
            tensor: correlation_tensor(&state),
        };
        let angles = [0.1, 0.2, 1.3, 2.9, 2.2, 4.0, 0.7, 5.5];
        let settings = ChshSettings::from_angles(&angles);
        let direct = settings.chsh(&state).unwrap();
        assert!((landscape.value(&angles) - direct).abs() < 1e-12);
    }

    #[test]
    fn singlet_reaches_two_root_two() {
        let best = chsh_quantum_max(&singlet(), &ChshOptimizerConfig::default()).unwrap();
        assert!((best.value - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-6, "{}", best.value);
    }

    #[test]
    fn deterministic_for_seed() {
        let config = ChshOptimizerConfig {
            starts: 4,
            seed: 11,
            ..Default::default()
        };
        let a = chsh_quantum_max(&singlet(), &config).unwrap();
        let b = chsh_quantum_max(&singlet(), &config).unwrap();
        assert_eq!(a, b);
    }
}
