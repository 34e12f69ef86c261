//! Finitely generated modules over `R = F_p[x]/(x^n)`.
//!
//! A module is stored by its Jordan type: a descending list of block sizes
//! `1 <= j <= n`. The canonical basis lists blocks in that order and, inside a
//! block with generator `e`, the vectors `e, xe, ..., x^{j-1}e`. Maps carry
//! matrices in canonical bases.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, EchelonBasis, Fp, Matrix};
use crate::nilpotent::{canonical_action, subquotient as raw_subquotient, Subquotient};

/// `F_p[x]/(x^n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    field: Fp,
    n: usize,
}

impl Ring {
    pub fn new(p: u32, n: usize) -> Result<Self> {
        let field = Fp::new(p)?;
        if n == 0 {
            return Err(Error::InvalidRing("nilpotency degree must be at least 1".into()));
        }
        Ok(Self { field, n })
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.modulus()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn check_same(&self, other: &Ring) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::RingMismatch(self.to_string(), other.to_string()))
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}[x]/(x^{})", self.p(), self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RModule {
    ring: Ring,
    blocks: Vec<usize>,
}

impl fmt::Display for RModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.blocks.iter().map(|j| j.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

impl RModule {
    /// Module with the given Jordan type (any order; stored descending).
    pub fn new(ring: Ring, blocks: impl Into<Vec<usize>>) -> Result<Self> {
        let mut blocks = blocks.into();
        if let Some(&bad) = blocks.iter().find(|&&j| j == 0 || j > ring.n) {
            return Err(Error::InvalidModule(format!(
                "block size {bad} outside 1..={} for {ring}",
                ring.n
            )));
        }
        blocks.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { ring, blocks })
    }

    pub fn zero(ring: Ring) -> Self {
        Self {
            ring,
            blocks: Vec::new(),
        }
    }

    /// `R^rank`.
    pub fn free(ring: Ring, rank: usize) -> Self {
        Self {
            ring,
            blocks: vec![ring.n; rank],
        }
    }

    /// The residue field `k = R/(x)`.
    pub fn simple(ring: Ring) -> Self {
        Self {
            ring,
            blocks: vec![1],
        }
    }

    /// `R/(x^j)`.
    pub fn cyclic(ring: Ring, j: usize) -> Result<Self> {
        Self::new(ring, vec![j])
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn field(&self) -> Fp {
        self.ring.field
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Projective (= free, since R is local) iff every block has size `n`.
    pub fn is_free(&self) -> bool {
        self.blocks.iter().all(|&j| j == self.ring.n)
    }

    /// Start offset of every block in the canonical basis.
    pub fn block_offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, &j| {
                let o = *acc;
                *acc += j;
                Some(o)
            })
            .collect()
    }

    /// Matrix of multiplication by `x` in the canonical basis.
    pub fn x_action(&self) -> Matrix {
        canonical_action(self.field(), &self.blocks)
    }

    /// Removes all free blocks.
    pub fn strip_free(&self) -> RModule {
        RModule {
            ring: self.ring,
            blocks: self
                .blocks
                .iter()
                .copied()
                .filter(|&j| j != self.ring.n)
                .collect(),
        }
    }

    /// Permutation matrix reversing each block; conjugates the action onto
    /// its transpose.
    pub fn block_reversal(&self) -> Matrix {
        let dim = self.dim();
        let mut m = Matrix::zeros(self.field(), dim, dim);
        for (o, &j) in self.block_offsets().iter().zip(&self.blocks) {
            for t in 0..j {
                m.set(o + t, o + j - 1 - t, 1);
            }
        }
        m
    }

    /// Syzygy `ΩM` (kernel of the projective cover).
    pub fn syzygy(&self) -> RModule {
        projective_cover_and_syzygy(self).syzygy
    }

    /// `Ω^e M`.
    pub fn syzygy_power(&self, e: usize) -> RModule {
        let mut m = self.clone();
        for _ in 0..e {
            m = m.syzygy();
        }
        m
    }
}

/// Direct sum in canonical form together with the inclusion matrices of the
/// summands. Projections are the transposes of the inclusions.
pub fn direct_sum(ring: Ring, summands: &[&RModule]) -> (RModule, Vec<Matrix>) {
    let mut tagged = Vec::new();
    for (s, m) in summands.iter().enumerate() {
        for (o, &j) in m.block_offsets().iter().zip(m.blocks()) {
            tagged.push((j, s, *o));
        }
    }
    tagged.sort_by_key(|t| std::cmp::Reverse(t.0));
    let sum = RModule {
        ring,
        blocks: tagged.iter().map(|t| t.0).collect(),
    };
    let total = sum.dim();
    let mut incs: Vec<Matrix> = summands
        .iter()
        .map(|m| Matrix::zeros(ring.field, total, m.dim()))
        .collect();
    let mut offset = 0;
    for &(j, s, o) in &tagged {
        for t in 0..j {
            incs[s].set(offset + t, o + t, 1);
        }
        offset += j;
    }
    (sum, incs)
}

/// An R-linear map between modules, in canonical bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RModuleMap {
    source: RModule,
    target: RModule,
    matrix: Matrix,
}

impl RModuleMap {
    pub fn new(source: RModule, target: RModule, matrix: Matrix) -> Result<Self> {
        source.ring.check_same(&target.ring)?;
        if matrix.shape() != (target.dim(), source.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "map {source} -> {target} needs a {}x{} matrix, got {}x{}",
                target.dim(),
                source.dim(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        let map = Self {
            source,
            target,
            matrix,
        };
        if !map.is_r_linear() {
            return Err(Error::validation(
                format!("map {} -> {}", map.source, map.target),
                "matrix does not commute with the x-action",
            ));
        }
        Ok(map)
    }

    pub(crate) fn new_unchecked(source: RModule, target: RModule, matrix: Matrix) -> Self {
        debug_assert_eq!(matrix.shape(), (target.dim(), source.dim()));
        Self {
            source,
            target,
            matrix,
        }
    }

    pub fn zero(source: RModule, target: RModule) -> Self {
        let matrix = Matrix::zeros(source.field(), target.dim(), source.dim());
        Self::new_unchecked(source, target, matrix)
    }

    pub fn identity(m: RModule) -> Self {
        let matrix = Matrix::identity(m.field(), m.dim());
        Self::new_unchecked(m.clone(), m, matrix)
    }

    pub fn source(&self) -> &RModule {
        &self.source
    }

    pub fn target(&self) -> &RModule {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn is_r_linear(&self) -> bool {
        self.matrix.mul(&self.source.x_action()) == self.target.x_action().mul(&self.matrix)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &RModuleMap) -> Result<RModuleMap> {
        if first.target != self.source {
            return Err(Error::NotComposable(format!(
                "{} -> {} then {} -> {}",
                first.source, first.target, self.source, self.target
            )));
        }
        Ok(Self::new_unchecked(
            first.source.clone(),
            self.target.clone(),
            self.matrix.mul(&first.matrix),
        ))
    }
}

/// An F_p-basis of `Hom_R(m, nn)`.
///
/// A map out of `m` is determined by where the block generators go; a block of
/// size `j` may go anywhere in `ker x^j`.
pub fn hom_basis(m: &RModule, nn: &RModule) -> Result<Vec<RModuleMap>> {
    m.ring.check_same(&nn.ring)?;
    let f = m.field();
    let a = nn.x_action();
    let mut out = Vec::new();
    for (o, &j) in m.block_offsets().iter().zip(m.blocks()) {
        let kernel = kernel_basis(&a.pow(j));
        for w in kernel.columns() {
            let mut mat = Matrix::zeros(f, nn.dim(), m.dim());
            let mut v = w;
            for t in 0..j {
                for (r, &val) in v.iter().enumerate() {
                    mat.set(r, o + t, val);
                }
                v = a.mul_vec(&v);
            }
            out.push(RModuleMap::new_unchecked(m.clone(), nn.clone(), mat));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Kernel,
    Image,
    Cokernel,
}

/// Kernel, image or cokernel of a map, re-canonicalized to a Jordan type.
///
/// The structural map is the inclusion (kernel into the source, image into
/// the target) or the projection (target onto the cokernel).
pub fn subquotient(map: &RModuleMap, which: Part) -> (RModule, RModuleMap) {
    let f = map.source.field();
    let ring = map.source.ring;
    match which {
        Part::Kernel => {
            let a = map.source.x_action();
            let upper = kernel_basis(&map.matrix);
            let sq = raw_subquotient(&a, &upper, &Matrix::zeros(f, a.rows(), 0));
            let k = module_of(ring, &sq);
            let inc = RModuleMap::new_unchecked(k.clone(), map.source.clone(), sq.reps);
            (k, inc)
        }
        Part::Image => {
            let a = map.target.x_action();
            let sq = raw_subquotient(&a, &map.matrix, &Matrix::zeros(f, a.rows(), 0));
            let im = module_of(ring, &sq);
            let inc = RModuleMap::new_unchecked(im.clone(), map.target.clone(), sq.reps);
            (im, inc)
        }
        Part::Cokernel => {
            let a = map.target.x_action();
            let sq = raw_subquotient(&a, &Matrix::identity(f, a.rows()), &map.matrix);
            let c = module_of(ring, &sq);
            let proj = RModuleMap::new_unchecked(map.target.clone(), c.clone(), sq.coords);
            (c, proj)
        }
    }
}

pub(crate) fn module_of(ring: Ring, sq: &Subquotient) -> RModule {
    RModule {
        ring,
        blocks: sq.blocks.clone(),
    }
}

/// Minimal free cover `F ↠ M` and the syzygy `ΩM = ker`.
#[derive(Clone, Debug)]
pub struct ProjectiveCover {
    pub cover: RModule,
    pub surjection: RModuleMap,
    pub syzygy: RModule,
    pub inclusion: RModuleMap,
}

pub fn projective_cover_and_syzygy(m: &RModule) -> ProjectiveCover {
    let ring = m.ring;
    let n = ring.n;
    let cover = RModule::free(ring, m.blocks.len());
    let mut mat = Matrix::zeros(ring.field, m.dim(), cover.dim());
    for (b, (o, &j)) in m.block_offsets().iter().zip(m.blocks()).enumerate() {
        for t in 0..j {
            mat.set(o + t, b * n + t, 1);
        }
    }
    let surjection = RModuleMap::new_unchecked(cover.clone(), m.clone(), mat);
    let (syzygy, inclusion) = subquotient(&surjection, Part::Kernel);
    ProjectiveCover {
        cover,
        surjection,
        syzygy,
        inclusion,
    }
}

/// Stable Hom: `Hom_R(m, nn)` modulo maps factoring through a projective.
#[derive(Clone, Debug)]
pub struct StableHom {
    pub dim: usize,
    /// Coset representatives of a basis of the quotient.
    pub reps: Vec<RModuleMap>,
}

pub fn stable_hom(m: &RModule, nn: &RModule) -> Result<StableHom> {
    m.ring.check_same(&nn.ring)?;
    let cover = projective_cover_and_syzygy(nn);
    let len = m.dim() * nn.dim();
    let mut ech = EchelonBasis::new(m.field(), len);
    for g in hom_basis(m, &cover.cover)? {
        let through = cover.surjection.compose(&g)?;
        ech.insert(&through.matrix.vectorize());
    }
    let mut reps = Vec::new();
    for h in hom_basis(m, nn)? {
        if ech.insert(&h.matrix.vectorize()) {
            reps.push(h);
        }
    }
    Ok(StableHom {
        dim: reps.len(),
        reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(p: u32, n: usize) -> Ring {
        Ring::new(p, n).unwrap()
    }

    /// dim Hom(M, N) by solving the commutation system X A_M = A_N X directly.
    fn hom_dim_bruteforce(m: &RModule, nn: &RModule) -> usize {
        let f = m.field();
        let (dm, dn) = (m.dim(), nn.dim());
        let am = m.x_action();
        let an = nn.x_action();
        let unknowns = dm * dn;
        let mut sys = Matrix::zeros(f, dn * dm, unknowns);
        for u in 0..unknowns {
            let mut e = vec![0; unknowns];
            e[u] = 1;
            let x = Matrix::unvectorize(f, dn, dm, &e);
            let col = x.mul(&am).sub(&an.mul(&x)).vectorize();
            for (r, v) in col.into_iter().enumerate() {
                sys.set(r, u, v);
            }
        }
        unknowns - sys.rank()
    }

    fn hom_dim_pairing(m: &RModule, nn: &RModule) -> usize {
        m.blocks()
            .iter()
            .flat_map(|&a| nn.blocks().iter().map(move |&b| a.min(b)))
            .sum()
    }

    #[test]
    fn hom_examples() {
        let r = ring(2, 2);
        let free = RModule::free(r, 1);
        let k = RModule::simple(r);
        assert_eq!(hom_basis(&free, &free).unwrap().len(), 2);
        assert_eq!(hom_basis(&k, &free).unwrap().len(), 1);
        assert!(hom_basis(&free, &RModule::zero(r)).unwrap().is_empty());
        assert_eq!(hom_dim_bruteforce(&free, &free), 2);
        assert_eq!(hom_dim_bruteforce(&k, &free), 1);
    }

    #[test]
    fn hom_ring_mismatch() {
        let a = RModule::simple(ring(2, 2));
        let b = RModule::simple(ring(3, 2));
        assert!(matches!(hom_basis(&a, &b), Err(Error::RingMismatch(..))));
        assert!(matches!(stable_hom(&a, &b), Err(Error::RingMismatch(..))));
    }

    #[test]
    fn subquotient_examples() {
        let r = ring(2, 2);
        let free = RModule::free(r, 1);
        let id = RModuleMap::identity(free.clone());
        assert!(subquotient(&id, Part::Kernel).0.is_zero());

        let m = RModule::new(r, vec![2, 1]).unwrap();
        let zero_in = RModuleMap::zero(RModule::zero(r), m.clone());
        assert_eq!(subquotient(&zero_in, Part::Cokernel).0, m);

        let x = RModuleMap::new(free.clone(), free.clone(), free.x_action()).unwrap();
        let (k, inc) = subquotient(&x, Part::Kernel);
        assert_eq!(k, RModule::simple(r));
        assert!(inc.is_r_linear());
        assert_eq!(subquotient(&x, Part::Image).0, RModule::simple(r));
        assert_eq!(subquotient(&x, Part::Cokernel).0, RModule::simple(r));
    }

    #[test]
    fn non_linear_map_rejected() {
        let r = ring(2, 2);
        let free = RModule::free(r, 1);
        let swap = Matrix::from_rows(r.field(), &[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(
            RModuleMap::new(free.clone(), free, swap),
            Err(Error::Validation { .. })
        ));
    }

    #[test]
    fn cover_examples() {
        let r = ring(2, 2);
        let free = RModule::free(r, 1);
        let c = projective_cover_and_syzygy(&free);
        assert_eq!(c.cover, free);
        assert_eq!(c.surjection.matrix(), &Matrix::identity(r.field(), 2));
        assert!(c.syzygy.is_zero());

        let k = RModule::simple(r);
        let c = projective_cover_and_syzygy(&k);
        assert_eq!(c.cover, free);
        assert_eq!(c.syzygy, k);
        assert!(c.surjection.is_r_linear() && c.inclusion.is_r_linear());
        assert!(c.surjection.compose(&c.inclusion).unwrap().matrix().is_zero());

        let r3 = ring(2, 3);
        let m = RModule::cyclic(r3, 2).unwrap();
        assert_eq!(m.syzygy(), RModule::simple(r3));
    }

    #[test]
    fn stable_hom_examples() {
        let r = ring(2, 2);
        let free = RModule::free(r, 1);
        let k = RModule::simple(r);
        let m = RModule::new(r, vec![2, 1, 1]).unwrap();
        assert_eq!(stable_hom(&free, &m).unwrap().dim, 0);
        assert_eq!(stable_hom(&k, &k).unwrap().dim, 1);
        let r1 = ring(2, 1);
        let k1 = RModule::simple(r1);
        assert_eq!(stable_hom(&k1, &k1).unwrap().dim, 0);
    }

    #[test]
    fn freeness() {
        let r = ring(2, 2);
        assert!(RModule::free(r, 1).is_free());
        assert!(!RModule::simple(r).is_free());
        assert!(!RModule::new(r, vec![2, 1]).unwrap().is_free());
        assert!(RModule::zero(r).is_free());
    }

    #[test]
    fn omega_is_two_periodic() {
        for n in 1..=5 {
            let r = ring(3, n);
            for j in 1..n {
                let m = RModule::cyclic(r, j).unwrap();
                assert_eq!(m.syzygy(), RModule::cyclic(r, n - j).unwrap(), "n={n} j={j}");
                assert_eq!(m.syzygy_power(2), m);
            }
            assert!(RModule::free(r, 2).syzygy().is_zero());
        }
    }

    #[test]
    fn direct_sum_inclusions_are_linear() {
        let r = ring(3, 3);
        let a = RModule::new(r, vec![1, 3]).unwrap();
        let b = RModule::new(r, vec![2]).unwrap();
        let (s, incs) = direct_sum(r, &[&a, &b]);
        assert_eq!(s.blocks(), &[3, 2, 1]);
        for (inc, m) in incs.iter().zip([&a, &b]) {
            RModuleMap::new(m.clone(), s.clone(), inc.clone()).unwrap();
            assert_eq!(inc.transpose().mul(inc), Matrix::identity(r.field(), m.dim()));
        }
    }

    fn arb_module(n: usize) -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(1..=n, 0..4)
    }

    proptest! {
        #[test]
        fn hom_dimension_matches_pairing(n in 1usize..=4, a in arb_module(4), b in arb_module(4)) {
            let r = ring(2, n);
            let a: Vec<usize> = a.into_iter().map(|j| j.min(n)).collect();
            let b: Vec<usize> = b.into_iter().map(|j| j.min(n)).collect();
            let m = RModule::new(r, a).unwrap();
            let nn = RModule::new(r, b).unwrap();
            let basis = hom_basis(&m, &nn).unwrap();
            prop_assert_eq!(basis.len(), hom_dim_pairing(&m, &nn));
            prop_assert_eq!(basis.len(), hom_dim_bruteforce(&m, &nn));
            let mut ech = EchelonBasis::new(r.field(), m.dim() * nn.dim());
            for h in &basis {
                prop_assert!(h.is_r_linear());
                prop_assert!(ech.insert(&h.matrix().vectorize()));
            }
        }

        #[test]
        fn stable_hom_vanishes_on_free(n in 1usize..=4, a in arb_module(4), rank in 0usize..3) {
            let r = ring(3, n);
            let a: Vec<usize> = a.into_iter().map(|j| j.min(n)).collect();
            let m = RModule::new(r, a).unwrap();
            let free = RModule::free(r, rank);
            prop_assert_eq!(stable_hom(&m, &free).unwrap().dim, 0);
            prop_assert_eq!(stable_hom(&free, &m).unwrap().dim, 0);
        }

        #[test]
        fn kernel_inclusion_is_exact(n in 1usize..=3, a in arb_module(3), b in arb_module(3), pick in any::<u64>()) {
            let r = ring(2, n);
            let a: Vec<usize> = a.into_iter().map(|j| j.min(n)).collect();
            let b: Vec<usize> = b.into_iter().map(|j| j.min(n)).collect();
            let m = RModule::new(r, a).unwrap();
            let nn = RModule::new(r, b).unwrap();
            let basis = hom_basis(&m, &nn).unwrap();
            let mut mat = Matrix::zeros(r.field(), nn.dim(), m.dim());
            for (i, h) in basis.iter().enumerate() {
                if pick >> (i % 64) & 1 == 1 {
                    mat = mat.add(h.matrix());
                }
            }
            let f = RModuleMap::new(m.clone(), nn.clone(), mat).unwrap();
            let (k, inc) = subquotient(&f, Part::Kernel);
            let (im, _) = subquotient(&f, Part::Image);
            let (c, proj) = subquotient(&f, Part::Cokernel);
            prop_assert!(inc.is_r_linear() && proj.is_r_linear());
            prop_assert!(f.compose(&inc).unwrap().matrix().is_zero());
            prop_assert_eq!(k.dim() + im.dim(), m.dim());
            prop_assert_eq!(im.dim() + c.dim(), nn.dim());
            prop_assert!(proj.compose(&f).unwrap().matrix().is_zero());
        }
    }
}
