//! Seeded fuzz harnesses for the metric axioms and length inequalities.
//!
//! Sample `i` draws from its own ChaCha stream of the base seed, so results do
//! not depend on thread scheduling; samples run on rayon and are merged in
//! index order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::complex::{cone, Complex};
use crate::metric::{cartesian_invariance_check, in_ball, strong_triangle_check, GoodMetric};
use crate::random::{random_acyclic, random_chain_map, random_complex};
use crate::rmodule::Ring;

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub ring: Ring,
    pub samples: usize,
    pub seed: u64,
    /// Ball levels are drawn from `2..=max_level`.
    pub max_level: u64,
    pub max_dim: usize,
}

impl FuzzConfig {
    pub fn new(ring: Ring, samples: usize, seed: u64) -> Self {
        Self {
            ring,
            samples,
            seed,
            max_level: 6,
            max_dim: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzViolation {
    pub sample: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzReport {
    pub samples: usize,
    pub violations: usize,
    pub first_violation: Option<FuzzViolation>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn run<F>(cfg: &FuzzConfig, sample: F) -> FuzzReport
where
    F: Fn(&mut ChaCha8Rng) -> Option<String> + Sync,
{
    let outcomes: Vec<Option<String>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| sample(&mut sample_rng(cfg.seed, i)))
        .collect();
    let violations = outcomes.iter().filter(|o| o.is_some()).count();
    let first_violation = outcomes
        .into_iter()
        .enumerate()
        .find_map(|(sample, o)| o.map(|detail| FuzzViolation { sample, detail }));
    FuzzReport {
        samples: cfg.samples,
        violations,
        first_violation,
    }
}

/// A random complex of amplitude ≤ 2 placed at a random degree.
pub fn random_placed_complex<R: Rng + ?Sized>(rng: &mut R, ring: Ring, spread: i64, max_dim: usize) -> Complex {
    let lo = rng.gen_range(-spread..=spread);
    random_complex(rng, ring, lo, lo + 2, max_dim, 0.25)
}

/// A random member of `B_n`: a random complex moved by a shift chosen
/// uniformly among those landing in the ball.
pub fn random_ball_member<R: Rng + ?Sized>(
    rng: &mut R,
    ring: Ring,
    m: &GoodMetric,
    n: u64,
    max_dim: usize,
) -> Complex {
    let reach = 2 * n as i64 + 4;
    for _ in 0..20 {
        let x = random_complex(rng, ring, -1, 1, max_dim, 0.3);
        let support = x.cohomology_support();
        let shifts: Vec<i64> = (-reach..=reach)
            .filter(|&t| {
                let moved: Vec<i64> = support.iter().map(|d| d - t).collect();
                m.support_in_ball(&moved, n)
            })
            .collect();
        if !shifts.is_empty() {
            let t = shifts[rng.gen_range(0..shifts.len())];
            return x.shift(t);
        }
    }
    random_acyclic(rng, ring, 0, max_dim)
}

/// Extension closure: for `b, b' ∈ B_n` and a random map `T⁻¹b' -> b`, the
/// cone lies in `B_n`.
pub fn axiom_i_fuzz(m: &GoodMetric, cfg: &FuzzConfig) -> FuzzReport {
    run(cfg, |rng| {
        let n = rng.gen_range(2..=cfg.max_level.max(2));
        let b = random_ball_member(rng, cfg.ring, m, n, cfg.max_dim);
        let b2 = random_ball_member(rng, cfg.ring, m, n, cfg.max_dim);
        let f = random_chain_map(rng, &b2.shift(-1), &b);
        let z = cone(&f).z;
        (!in_ball(&z, n, m)).then(|| format!("level {n}: cone {z} of map into {b} leaves the ball"))
    })
}

/// `length(g∘f) ≤ max(length f, length g)` on random composable pairs.
pub fn strong_triangle_fuzz(m: &GoodMetric, cfg: &FuzzConfig) -> FuzzReport {
    run(cfg, |rng| {
        let x = random_placed_complex(rng, cfg.ring, 3, cfg.max_dim);
        let y = random_placed_complex(rng, cfg.ring, 3, cfg.max_dim);
        let z = random_placed_complex(rng, cfg.ring, 3, cfg.max_dim);
        let f = random_chain_map(rng, &x, &y);
        let g = random_chain_map(rng, &y, &z);
        let check = strong_triangle_check(&f, &g, m).expect("composable by construction");
        (!check.holds()).then(|| {
            format!(
                "lengths f = {}, g = {}, g∘f = {} for {x} -> {y} -> {z}",
                check.f, check.g, check.composite
            )
        })
    })
}

/// `length f = length g` on random homotopy pushout squares.
pub fn cartesian_fuzz(m: &GoodMetric, cfg: &FuzzConfig) -> FuzzReport {
    run(cfg, |rng| {
        let a = random_placed_complex(rng, cfg.ring, 3, cfg.max_dim);
        let b = random_placed_complex(rng, cfg.ring, 3, cfg.max_dim);
        let c = random_placed_complex(rng, cfg.ring, 3, cfg.max_dim);
        let f = random_chain_map(rng, &a, &b);
        let h = random_chain_map(rng, &a, &c);
        let check = cartesian_invariance_check(&f, &h, m).expect("shared source by construction");
        (!check.holds()).then(|| format!("length f = {}, length g = {} for a = {a}", check.f, check.g))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_deterministic() {
        let ring = Ring::new(2, 2).unwrap();
        let cfg = FuzzConfig::new(ring, 40, 11);
        let m = GoodMetric::metric_i();
        assert_eq!(axiom_i_fuzz(&m, &cfg), axiom_i_fuzz(&m, &cfg));
        assert_eq!(strong_triangle_fuzz(&m, &cfg), strong_triangle_fuzz(&m, &cfg));
    }

    #[test]
    fn ball_members_are_in_the_ball() {
        let ring = Ring::new(3, 3).unwrap();
        let mut rng = sample_rng(5, 0);
        for m in [GoodMetric::metric_i(), GoodMetric::metric_ii().dual(), GoodMetric::metric_iii()] {
            for n in 2..6 {
                let b = random_ball_member(&mut rng, ring, &m, n, 4);
                assert!(in_ball(&b, n, &m));
            }
        }
    }

    #[test]
    fn standard_metrics_pass_small_fuzz() {
        let ring = Ring::new(2, 2).unwrap();
        let cfg = FuzzConfig::new(ring, 30, 1);
        for m in [GoodMetric::metric_i(), GoodMetric::metric_ii(), GoodMetric::metric_iii()] {
            assert!(axiom_i_fuzz(&m, &cfg).passed());
            assert!(strong_triangle_fuzz(&m, &cfg).passed());
            assert!(cartesian_fuzz(&m, &cfg).passed());
        }
    }
}
