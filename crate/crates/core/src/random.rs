//! Seeded random modules, complexes and chain maps.
//!
//! Random R-linear data is drawn uniformly from the solution space of the
//! relevant linear constraints, so every sample satisfies its invariants by
//! construction.

use std::collections::BTreeMap;

use rand::Rng;

use crate::complex::{ChainMap, Complex};
use crate::linalg::{kernel_basis, Matrix};
use crate::rmodule::{hom_basis, projective_cover_and_syzygy, RModule, Ring};

/// Random Jordan type of total dimension at most `max_dim` (possibly zero).
pub fn random_module<R: Rng + ?Sized>(rng: &mut R, ring: Ring, max_dim: usize) -> RModule {
    let mut budget = rng.gen_range(0..=max_dim);
    let mut blocks = Vec::new();
    while budget > 0 {
        let j = rng.gen_range(1..=ring.n().min(budget));
        blocks.push(j);
        budget -= j;
    }
    RModule::new(ring, blocks).expect("block sizes are in range")
}

/// Nonzero random module.
pub fn random_nonzero_module<R: Rng + ?Sized>(rng: &mut R, ring: Ring, max_dim: usize) -> RModule {
    loop {
        let m = random_module(rng, ring, max_dim.max(1));
        if !m.is_zero() {
            return m;
        }
    }
}

fn random_vector<R: Rng + ?Sized>(rng: &mut R, p: u32, len: usize) -> Vec<u32> {
    (0..len).map(|_| rng.gen_range(0..p)).collect()
}

/// Uniform element of the span of the columns of `basis`.
fn random_combination<R: Rng + ?Sized>(rng: &mut R, basis: &Matrix) -> Vec<u32> {
    let coeffs = random_vector(rng, basis.field().modulus(), basis.cols());
    basis.mul_vec(&coeffs)
}

/// Random R-linear map matrix `m -> nn`.
pub fn random_map_matrix<R: Rng + ?Sized>(rng: &mut R, m: &RModule, nn: &RModule) -> Matrix {
    let field = m.field();
    let mut out = Matrix::zeros(field, nn.dim(), m.dim());
    for h in hom_basis(m, nn).expect("same ring") {
        let c = rng.gen_range(0..field.modulus());
        if c != 0 {
            out = out.add(&h.matrix().scale(c));
        }
    }
    out
}

/// Random complex with components in degrees `lo..=hi`.
///
/// Each differential is uniform among R-linear maps killing the image of the
/// previous one; with probability `zero_diff` it is set to zero instead.
pub fn random_complex<R: Rng + ?Sized>(
    rng: &mut R,
    ring: Ring,
    lo: i64,
    hi: i64,
    max_dim: usize,
    zero_diff: f64,
) -> Complex {
    let comps = (lo..=hi).map(|i| (i, random_module(rng, ring, max_dim))).collect();
    complex_on(rng, ring, comps, zero_diff)
}

/// Random complex of free modules of rank at most `max_rank` in degrees `lo..=hi`.
pub fn random_free_complex<R: Rng + ?Sized>(
    rng: &mut R,
    ring: Ring,
    lo: i64,
    hi: i64,
    max_rank: usize,
    zero_diff: f64,
) -> Complex {
    let comps = (lo..=hi)
        .map(|i| (i, RModule::free(ring, rng.gen_range(0..=max_rank))))
        .collect();
    complex_on(rng, ring, comps, zero_diff)
}

fn complex_on<R: Rng + ?Sized>(
    rng: &mut R,
    ring: Ring,
    comps: BTreeMap<i64, RModule>,
    zero_diff: f64,
) -> Complex {
    let field = ring.field();
    let (lo, hi) = match (comps.keys().next(), comps.keys().last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Complex::zero(ring),
    };
    let mut diffs: BTreeMap<i64, Matrix> = BTreeMap::new();
    for i in lo..hi {
        let (src, tgt) = (&comps[&i], &comps[&(i + 1)]);
        if src.is_zero() || tgt.is_zero() || rng.gen_bool(zero_diff) {
            continue;
        }
        let basis = hom_basis(src, tgt).expect("same ring");
        if basis.is_empty() {
            continue;
        }
        let prev = diffs
            .get(&(i - 1))
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(field, src.dim(), comps.get(&(i - 1)).map_or(0, RModule::dim)));
        // Constraint (Σ c_k h_k) ∘ prev = 0.
        let cols: Vec<Vec<u32>> = basis
            .iter()
            .map(|h| h.matrix().mul(&prev).vectorize())
            .collect();
        let sys = Matrix::from_columns(field, tgt.dim() * prev.cols(), &cols);
        let coeffs = random_combination(rng, &kernel_basis(&sys));
        let mut d = Matrix::zeros(field, tgt.dim(), src.dim());
        for (h, &c) in basis.iter().zip(&coeffs) {
            if c != 0 {
                d = d.add(&h.matrix().scale(c));
            }
        }
        diffs.insert(i, d);
    }
    Complex::from_maps(ring, &comps, &diffs).expect("random differentials square to zero")
}

/// Uniform random chain map `x -> y`.
pub fn random_chain_map<R: Rng + ?Sized>(rng: &mut R, x: &Complex, y: &Complex) -> ChainMap {
    let field = x.ring().field();
    let mut unknowns: Vec<(i64, Matrix)> = Vec::new();
    for i in x.degrees() {
        if y.dim(i) == 0 {
            continue;
        }
        for h in hom_basis(&x.component(i), &y.component(i)).expect("same ring") {
            unknowns.push((i, h.matrix().clone()));
        }
    }
    if unknowns.is_empty() {
        return ChainMap::zero(x, y);
    }
    // Constraint per degree i: f^{i+1} d_X^i - d_Y^i f^i = 0.
    let degrees: Vec<i64> = x.degrees().collect();
    let offsets: Vec<usize> = degrees
        .iter()
        .scan(0, |acc, &i| {
            let o = *acc;
            *acc += y.dim(i + 1) * x.dim(i);
            Some(o)
        })
        .collect();
    let rows: usize = degrees.iter().map(|&i| y.dim(i + 1) * x.dim(i)).sum();
    let mut sys = Matrix::zeros(field, rows, unknowns.len());
    for (u, (deg, h)) in unknowns.iter().enumerate() {
        for (k, &i) in degrees.iter().enumerate() {
            let contrib = if i + 1 == *deg {
                h.mul(&x.diff(i))
            } else if i == *deg {
                y.diff(i).mul(h).neg()
            } else {
                continue;
            };
            for (r, v) in contrib.vectorize().into_iter().enumerate() {
                if v != 0 {
                    let cur = sys.get(offsets[k] + r, u);
                    sys.set(offsets[k] + r, u, field.add(cur, v));
                }
            }
        }
    }
    let coeffs = random_combination(rng, &kernel_basis(&sys));
    let mut maps: BTreeMap<i64, Matrix> = BTreeMap::new();
    for ((i, h), &c) in unknowns.iter().zip(&coeffs) {
        if c == 0 {
            continue;
        }
        let term = h.scale(c);
        maps.entry(*i)
            .and_modify(|m| *m = m.add(&term))
            .or_insert(term);
    }
    ChainMap::new(x.clone(), y.clone(), maps).expect("solution space consists of chain maps")
}

/// The acyclic complex `ΩM -> F -> M` in degrees `degree - 1 .. degree + 1`,
/// built from the projective cover of a random module. It is not contractible
/// unless `M` is free.
pub fn random_acyclic<R: Rng + ?Sized>(rng: &mut R, ring: Ring, degree: i64, max_dim: usize) -> Complex {
    let m = random_module(rng, ring, max_dim);
    let cover = projective_cover_and_syzygy(&m);
    Complex::new(
        ring,
        degree - 1,
        vec![cover.syzygy.clone(), cover.cover.clone(), m],
        vec![cover.inclusion.matrix().clone(), cover.surjection.matrix().clone()],
    )
    .expect("short exact sequence is a complex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_objects_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, n) in [(2, 2), (3, 3), (2, 1)] {
            let ring = Ring::new(p, n).unwrap();
            for _ in 0..20 {
                let x = random_complex(&mut rng, ring, -2, 2, 5, 0.2);
                let y = random_complex(&mut rng, ring, -2, 2, 5, 0.2);
                let f = random_chain_map(&mut rng, &x, &y);
                assert_eq!(f.source(), &x);
                let a = random_acyclic(&mut rng, ring, 0, 4);
                assert!(a.is_acyclic());
            }
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let ring = Ring::new(2, 2).unwrap();
        let a = random_complex(&mut ChaCha8Rng::seed_from_u64(3), ring, -1, 2, 6, 0.1);
        let b = random_complex(&mut ChaCha8Rng::seed_from_u64(3), ring, -1, 2, 6, 0.1);
        assert_eq!(a, b);
    }
}
