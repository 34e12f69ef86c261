//! Bounded cochain complexes over `mod R` and the triangulated operations on
//! them.
//!
//! Conventions:
//! - `(T^t X)^i = X^{i+t}` with differential `(-1)^t d`.
//! - `cone(f)^i = X^{i+1} ⊕ Y^i` with differential `(a, b) ↦ (-d a, f a + d b)`.
//! - Derived morphisms `A -> B` are strict chain maps out of a projective
//!   resolution of `A`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, solve, Matrix};
use crate::nilpotent::{subquotient, Subquotient};
use crate::rmodule::{direct_sum, hom_basis, module_of, RModule, Ring};

#[derive(Clone, PartialEq, Eq)]
pub struct Complex {
    ring: Ring,
    start: i64,
    modules: Vec<RModule>,
    /// `diffs[k]` maps `modules[k]` to `modules[k + 1]`.
    diffs: Vec<Matrix>,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Complex[{}]", self)
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.modules.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .modules
            .iter()
            .enumerate()
            .map(|(k, m)| format!("{}@{}", m, self.start + k as i64))
            .collect();
        write!(f, "{}", parts.join(" -> "))
    }
}

impl Complex {
    pub fn zero(ring: Ring) -> Self {
        Self {
            ring,
            start: 0,
            modules: Vec::new(),
            diffs: Vec::new(),
        }
    }

    /// `m` placed in degree `degree`.
    pub fn concentrated(m: RModule, degree: i64) -> Self {
        let ring = m.ring();
        Self {
            ring,
            start: degree,
            modules: vec![m],
            diffs: Vec::new(),
        }
        .normalized()
    }

    /// Consecutive components starting in degree `start`; `diffs[k]` is the
    /// differential out of `modules[k]`.
    pub fn new(ring: Ring, start: i64, modules: Vec<RModule>, diffs: Vec<Matrix>) -> Result<Self> {
        if diffs.len() + 1 != modules.len() && !(modules.is_empty() && diffs.is_empty()) {
            return Err(Error::DimensionMismatch(format!(
                "{} components need {} differentials, got {}",
                modules.len(),
                modules.len().saturating_sub(1),
                diffs.len()
            )));
        }
        let c = Self {
            ring,
            start,
            modules,
            diffs,
        };
        c.validate()?;
        Ok(c.normalized())
    }

    /// Components and differentials keyed by degree. Missing differentials
    /// are zero; a differential keyed `i` maps degree `i` to `i + 1`.
    pub fn from_maps(
        ring: Ring,
        components: &BTreeMap<i64, RModule>,
        diffs: &BTreeMap<i64, Matrix>,
    ) -> Result<Self> {
        let nonzero: Vec<i64> = components
            .iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(&i, _)| i)
            .collect();
        for (&i, d) in diffs {
            let src = components.get(&i).map_or(0, RModule::dim);
            let tgt = components.get(&(i + 1)).map_or(0, RModule::dim);
            if d.shape() != (tgt, src) {
                return Err(Error::validation(
                    "complex",
                    format!(
                        "d^{i} must be {tgt}x{src}, got {}x{}",
                        d.rows(),
                        d.cols()
                    ),
                ));
            }
        }
        let (Some(&lo), Some(&hi)) = (nonzero.first(), nonzero.last()) else {
            return Ok(Self::zero(ring));
        };
        let modules: Vec<RModule> = (lo..=hi)
            .map(|i| {
                components
                    .get(&i)
                    .cloned()
                    .unwrap_or_else(|| RModule::zero(ring))
            })
            .collect();
        for m in &modules {
            ring.check_same(&m.ring())?;
        }
        let diffs = (lo..hi)
            .map(|i| {
                diffs.get(&i).cloned().unwrap_or_else(|| {
                    Matrix::zeros(
                        ring.field(),
                        modules[(i + 1 - lo) as usize].dim(),
                        modules[(i - lo) as usize].dim(),
                    )
                })
            })
            .collect();
        Self::new(ring, lo, modules, diffs)
    }

    fn validate(&self) -> Result<()> {
        for (k, m) in self.modules.iter().enumerate() {
            self.ring.check_same(&m.ring())?;
            if k + 1 < self.modules.len() {
                let i = self.start + k as i64;
                let d = &self.diffs[k];
                let next = &self.modules[k + 1];
                if d.shape() != (next.dim(), m.dim()) {
                    return Err(Error::validation(
                        "complex",
                        format!(
                            "d^{i} must be {}x{}, got {}x{}",
                            next.dim(),
                            m.dim(),
                            d.rows(),
                            d.cols()
                        ),
                    ));
                }
                if d.mul(&m.x_action()) != next.x_action().mul(d) {
                    return Err(Error::validation(
                        "complex",
                        format!("d^{i} is not R-linear"),
                    ));
                }
            }
        }
        for k in 0..self.diffs.len().saturating_sub(1) {
            if !self.diffs[k + 1].mul(&self.diffs[k]).is_zero() {
                let i = self.start + k as i64;
                return Err(Error::validation(
                    "complex",
                    format!("d^{} ∘ d^{} ≠ 0 (degrees {}, {})", i + 1, i, i, i + 1),
                ));
            }
        }
        Ok(())
    }

    /// Drops zero components at both ends.
    fn normalized(mut self) -> Self {
        while self.modules.last().is_some_and(RModule::is_zero) {
            self.modules.pop();
            self.diffs.pop();
        }
        let lead = self.modules.iter().take_while(|m| m.is_zero()).count();
        if lead == self.modules.len() {
            return Self::zero(self.ring);
        }
        self.modules.drain(..lead);
        self.diffs.drain(..lead);
        self.start += lead as i64;
        self
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.modules.is_empty()
    }

    /// Inclusive range of degrees carrying nonzero components.
    pub fn range(&self) -> Option<(i64, i64)> {
        if self.modules.is_empty() {
            None
        } else {
            Some((self.start, self.start + self.modules.len() as i64 - 1))
        }
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.start..self.start + self.modules.len() as i64
    }

    pub fn component(&self, i: i64) -> RModule {
        self.component_ref(i)
            .cloned()
            .unwrap_or_else(|| RModule::zero(self.ring))
    }

    pub fn component_ref(&self, i: i64) -> Option<&RModule> {
        let k = i.checked_sub(self.start)?;
        if k < 0 {
            return None;
        }
        self.modules.get(k as usize)
    }

    pub fn dim(&self, i: i64) -> usize {
        self.component_ref(i).map_or(0, RModule::dim)
    }

    /// Total F_p-dimension.
    pub fn total_dim(&self) -> usize {
        self.modules.iter().map(RModule::dim).sum()
    }

    /// The differential `X^i -> X^{i+1}` (zero outside the support).
    pub fn diff(&self, i: i64) -> Matrix {
        let k = i - self.start;
        if k >= 0 && (k as usize) < self.diffs.len() {
            self.diffs[k as usize].clone()
        } else {
            Matrix::zeros(self.ring.field(), self.dim(i + 1), self.dim(i))
        }
    }

    pub fn x_action(&self, i: i64) -> Matrix {
        self.component(i).x_action()
    }

    /// `T^t X`.
    pub fn shift(&self, t: i64) -> Complex {
        let diffs = if t.rem_euclid(2) == 1 {
            self.diffs.iter().map(Matrix::neg).collect()
        } else {
            self.diffs.clone()
        };
        Complex {
            ring: self.ring,
            start: self.start - t,
            modules: self.modules.clone(),
            diffs,
        }
    }

    pub fn cohomology_dim(&self, i: i64) -> usize {
        let dim = self.dim(i);
        if dim == 0 {
            return 0;
        }
        dim - self.diff(i).rank() - self.diff(i - 1).rank()
    }

    /// Degrees with nonzero cohomology, ascending.
    pub fn cohomology_support(&self) -> Vec<i64> {
        self.degrees()
            .filter(|&i| self.cohomology_dim(i) > 0)
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.degrees().all(|i| self.cohomology_dim(i) == 0)
    }

    /// `H^i` with cycle representatives and a coordinate map on cycles.
    pub fn cohomology_data(&self, i: i64) -> Cohomology {
        let a = self.x_action(i);
        let cycles = kernel_basis(&self.diff(i));
        let boundaries = self.diff(i - 1);
        let sq = subquotient(&a, &cycles, &boundaries);
        Cohomology {
            module: module_of(self.ring, &sq),
            data: sq,
        }
    }

    pub fn cohomology(&self, i: i64) -> RModule {
        self.cohomology_data(i).module
    }

    /// Brutal truncation `σ_{≥k}`: components in degrees `≥ k`, a subcomplex.
    pub fn truncate_below(&self, k: i64) -> Complex {
        let Some((lo, hi)) = self.range() else {
            return self.clone();
        };
        if k <= lo {
            return self.clone();
        }
        if k > hi {
            return Complex::zero(self.ring);
        }
        let skip = (k - lo) as usize;
        Complex {
            ring: self.ring,
            start: k,
            modules: self.modules[skip..].to_vec(),
            diffs: self.diffs[skip..].to_vec(),
        }
        .normalized()
    }

    /// Degreewise F_p-dual with negated degrees and transposed differentials.
    pub fn dualize(&self) -> Complex {
        let Some((lo, hi)) = self.range() else {
            return self.clone();
        };
        let modules: Vec<RModule> = (-hi..=-lo).map(|i| self.component(-i)).collect();
        let diffs = (-hi..-lo)
            .map(|i| {
                let src = self.component(-i);
                let tgt = self.component(-i - 1);
                tgt.block_reversal()
                    .mul(&self.diff(-i - 1).transpose())
                    .mul(&src.block_reversal())
            })
            .collect();
        Complex {
            ring: self.ring,
            start: -hi,
            modules,
            diffs,
        }
    }

    /// Direct sum with inclusions and projections.
    pub fn direct_sum(a: &Complex, b: &Complex) -> Result<DirectSum> {
        a.ring.check_same(&b.ring)?;
        let ring = a.ring;
        let lo = a.range().map(|r| r.0).into_iter().chain(b.range().map(|r| r.0)).min();
        let hi = a.range().map(|r| r.1).into_iter().chain(b.range().map(|r| r.1)).max();
        let (Some(lo), Some(hi)) = (lo, hi) else {
            let z = Complex::zero(ring);
            return Ok(DirectSum {
                sum: z.clone(),
                inc_a: ChainMap::zero(a, &z),
                inc_b: ChainMap::zero(b, &z),
                proj_a: ChainMap::zero(&z, a),
                proj_b: ChainMap::zero(&z, b),
            });
        };
        let mut mods = BTreeMap::new();
        let mut incs = BTreeMap::new();
        for i in lo..=hi {
            let (s, inc) = direct_sum(ring, &[&a.component(i), &b.component(i)]);
            mods.insert(i, s);
            incs.insert(i, inc);
        }
        let mut diffs = BTreeMap::new();
        for i in lo..hi {
            let (ia, ib) = (&incs[&i][0], &incs[&i][1]);
            let (ja, jb) = (&incs[&(i + 1)][0], &incs[&(i + 1)][1]);
            let d = ja
                .mul(&a.diff(i))
                .mul(&ia.transpose())
                .add(&jb.mul(&b.diff(i)).mul(&ib.transpose()));
            diffs.insert(i, d);
        }
        let sum = Complex::from_maps(ring, &mods, &diffs)?;
        let pick = |which: usize, transpose: bool| -> BTreeMap<i64, Matrix> {
            incs.iter()
                .map(|(&i, v)| {
                    let m = &v[which];
                    (i, if transpose { m.transpose() } else { m.clone() })
                })
                .collect()
        };
        Ok(DirectSum {
            inc_a: ChainMap::new_unchecked(a.clone(), sum.clone(), pick(0, false)),
            inc_b: ChainMap::new_unchecked(b.clone(), sum.clone(), pick(1, false)),
            proj_a: ChainMap::new_unchecked(sum.clone(), a.clone(), pick(0, true)),
            proj_b: ChainMap::new_unchecked(sum.clone(), b.clone(), pick(1, true)),
            sum,
        })
    }

    /// `is_perfect` helper: smallest degree with a nonzero component.
    pub fn min_degree(&self) -> Option<i64> {
        self.range().map(|r| r.0)
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.range().map(|r| r.1)
    }
}

/// `H^i` of a complex.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub module: RModule,
    /// Representatives live in `X^i`; coordinates apply to cycles of `X^i`.
    pub data: Subquotient,
}

#[derive(Clone, Debug)]
pub struct DirectSum {
    pub sum: Complex,
    pub inc_a: ChainMap,
    pub inc_b: ChainMap,
    pub proj_a: ChainMap,
    pub proj_b: ChainMap,
}

/// A strict chain map between bounded complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    /// Components on the source's degrees; absent degrees are zero.
    maps: BTreeMap<i64, Matrix>,
}

impl ChainMap {
    /// Validates shapes, R-linearity and commutation with the differentials.
    pub fn new(source: Complex, target: Complex, maps: BTreeMap<i64, Matrix>) -> Result<Self> {
        source.ring.check_same(&target.ring)?;
        for (&i, m) in &maps {
            if m.shape() != (target.dim(i), source.dim(i)) {
                return Err(Error::validation(
                    "chain map",
                    format!(
                        "component {i} must be {}x{}, got {}x{}",
                        target.dim(i),
                        source.dim(i),
                        m.rows(),
                        m.cols()
                    ),
                ));
            }
        }
        let map = Self::assemble(source, target, maps);
        map.check()?;
        Ok(map)
    }

    pub(crate) fn new_unchecked(
        source: Complex,
        target: Complex,
        maps: BTreeMap<i64, Matrix>,
    ) -> Self {
        let out = Self::assemble(source, target, maps);
        debug_assert!(out.check().is_ok(), "invalid chain map: {:?}", out.check());
        out
    }

    fn assemble(source: Complex, target: Complex, maps: BTreeMap<i64, Matrix>) -> Self {
        let maps = maps
            .into_iter()
            .filter(|(i, m)| source.dim(*i) > 0 && target.dim(*i) > 0 && !m.is_zero())
            .collect();
        Self {
            source,
            target,
            maps,
        }
    }

    fn check(&self) -> Result<()> {
        for (&i, m) in &self.maps {
            let (s, t) = (self.source.x_action(i), self.target.x_action(i));
            if m.mul(&s) != t.mul(m) {
                return Err(Error::validation(
                    "chain map",
                    format!("component {i} is not R-linear"),
                ));
            }
        }
        for i in self.span() {
            let lhs = self.component(i + 1).mul(&self.source.diff(i));
            let rhs = self.target.diff(i).mul(&self.component(i));
            if lhs != rhs {
                return Err(Error::validation(
                    "chain map",
                    format!("does not commute with the differentials at degree {i}"),
                ));
            }
        }
        Ok(())
    }

    /// Degrees where either complex is nonzero, padded by one below.
    #[allow(clippy::reversed_empty_ranges)]
    fn span(&self) -> std::ops::RangeInclusive<i64> {
        let ends: Vec<i64> = [self.source.range(), self.target.range()]
            .into_iter()
            .flatten()
            .flat_map(|(a, b)| [a, b])
            .collect();
        match (ends.iter().min(), ends.iter().max()) {
            (Some(&lo), Some(&hi)) => lo - 1..=hi,
            _ => 0..=-1,
        }
    }

    pub fn zero(source: &Complex, target: &Complex) -> Self {
        Self {
            source: source.clone(),
            target: target.clone(),
            maps: BTreeMap::new(),
        }
    }

    pub fn identity(x: &Complex) -> Self {
        let maps = x
            .degrees()
            .map(|i| (i, Matrix::identity(x.ring.field(), x.dim(i))))
            .collect();
        Self::new_unchecked(x.clone(), x.clone(), maps)
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn component(&self, i: i64) -> Matrix {
        self.maps.get(&i).cloned().unwrap_or_else(|| {
            Matrix::zeros(
                self.source.ring.field(),
                self.target.dim(i),
                self.source.dim(i),
            )
        })
    }

    pub fn components(&self) -> &BTreeMap<i64, Matrix> {
        &self.maps
    }

    pub fn is_zero(&self) -> bool {
        self.maps.is_empty()
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap> {
        if first.target != self.source {
            return Err(Error::NotComposable(format!(
                "target {} of the first map differs from source {} of the second",
                first.target, self.source
            )));
        }
        let maps = first
            .source
            .degrees()
            .map(|i| (i, self.component(i).mul(&first.component(i))))
            .collect();
        Ok(Self::new_unchecked(
            first.source.clone(),
            self.target.clone(),
            maps,
        ))
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::DimensionMismatch(
                "chain maps with different endpoints".into(),
            ));
        }
        let maps = self
            .source
            .degrees()
            .map(|i| (i, self.component(i).add(&other.component(i))))
            .collect();
        Ok(Self::new_unchecked(
            self.source.clone(),
            self.target.clone(),
            maps,
        ))
    }

    pub fn neg(&self) -> ChainMap {
        let maps = self.maps.iter().map(|(&i, m)| (i, m.neg())).collect();
        Self::new_unchecked(self.source.clone(), self.target.clone(), maps)
    }

    /// `T^t f`.
    pub fn shift(&self, t: i64) -> ChainMap {
        let maps = self.maps.iter().map(|(&i, m)| (i - t, m.clone())).collect();
        Self::new_unchecked(self.source.shift(t), self.target.shift(t), maps)
    }

    /// The induced map `H^i(source) -> H^i(target)` in canonical bases.
    pub fn on_cohomology(&self, i: i64) -> Matrix {
        let hs = self.source.cohomology_data(i);
        let ht = self.target.cohomology_data(i);
        ht.data.coords.mul(&self.component(i)).mul(&hs.data.reps)
    }

    pub fn is_quasi_iso(&self) -> bool {
        cone(self).z.is_acyclic()
    }

    /// Contravariant dual `D(target) -> D(source)`.
    pub fn dualize(&self) -> ChainMap {
        let src = self.target.dualize();
        let tgt = self.source.dualize();
        let maps = self
            .maps
            .iter()
            .map(|(&i, m)| {
                let xs = self.source.component(i);
                let ys = self.target.component(i);
                (
                    -i,
                    xs.block_reversal().mul(&m.transpose()).mul(&ys.block_reversal()),
                )
            })
            .collect();
        ChainMap::new_unchecked(src, tgt, maps)
    }
}

/// `X --f--> Y --g--> Z --h--> TX` with `Z = cone(f)`.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub x: Complex,
    pub y: Complex,
    pub z: Complex,
    pub f: ChainMap,
    pub g: ChainMap,
    pub h: ChainMap,
}

pub fn cone(f: &ChainMap) -> Triangle {
    let x = &f.source;
    let y = &f.target;
    let ring = x.ring;
    let tx = x.shift(1);
    let lo = [tx.min_degree(), y.min_degree()].into_iter().flatten().min();
    let hi = [tx.max_degree(), y.max_degree()].into_iter().flatten().max();
    let (Some(lo), Some(hi)) = (lo, hi) else {
        let z = Complex::zero(ring);
        return Triangle {
            x: x.clone(),
            y: y.clone(),
            g: ChainMap::zero(y, &z),
            h: ChainMap::zero(&z, &tx),
            z,
            f: f.clone(),
        };
    };
    let mut mods = BTreeMap::new();
    let mut incs = BTreeMap::new();
    for i in lo..=hi {
        let (s, inc) = direct_sum(ring, &[&x.component(i + 1), &y.component(i)]);
        mods.insert(i, s);
        incs.insert(i, inc);
    }
    let mut diffs = BTreeMap::new();
    for i in lo..hi {
        let (ia, ib) = (&incs[&i][0], &incs[&i][1]);
        let (ja, jb) = (&incs[&(i + 1)][0], &incs[&(i + 1)][1]);
        let d = ja
            .mul(&x.diff(i + 1).neg())
            .mul(&ia.transpose())
            .add(&jb.mul(&f.component(i + 1)).mul(&ia.transpose()))
            .add(&jb.mul(&y.diff(i)).mul(&ib.transpose()));
        diffs.insert(i, d);
    }
    let z = Complex::from_maps(ring, &mods, &diffs).expect("cone differential squares to zero");
    let g_maps = incs.iter().map(|(&i, v)| (i, v[1].clone())).collect();
    let h_maps = incs.iter().map(|(&i, v)| (i, v[0].transpose())).collect();
    Triangle {
        x: x.clone(),
        y: y.clone(),
        f: f.clone(),
        g: ChainMap::new_unchecked(y.clone(), z.clone(), g_maps),
        h: ChainMap::new_unchecked(z.clone(), tx, h_maps),
        z,
    }
}

/// A null-homotopy `s` with `f = d s + s d`, components `s^i: X^i -> Y^{i-1}`.
pub fn null_homotopy(f: &ChainMap) -> Option<BTreeMap<i64, Matrix>> {
    let x = &f.source;
    let y = &f.target;
    let field = x.ring.field();
    let span: Vec<i64> = f.span().collect();
    // Unknowns: coefficients of hom bases of Hom(X^i, Y^{i-1}).
    let mut unknowns: Vec<(i64, Matrix)> = Vec::new();
    for i in x.degrees() {
        for h in hom_basis(&x.component(i), &y.component(i - 1)).ok()? {
            unknowns.push((i, h.matrix().clone()));
        }
    }
    let offsets: Vec<(i64, usize)> = span
        .iter()
        .scan(0, |acc, &i| {
            let o = *acc;
            *acc += y.dim(i) * x.dim(i);
            Some((i, o))
        })
        .collect();
    let rows: usize = span.iter().map(|&i| y.dim(i) * x.dim(i)).sum();
    let mut sys = Matrix::zeros(field, rows, unknowns.len());
    let mut rhs = Matrix::zeros(field, rows, 1);
    for &(i, o) in &offsets {
        for (r, v) in f.component(i).vectorize().into_iter().enumerate() {
            rhs.set(o + r, 0, v);
        }
    }
    for (u, (i, s)) in unknowns.iter().enumerate() {
        // s: X^i -> Y^{i-1} contributes d_Y^{i-1} s to degree i and s d_X^{i-1} to degree i-1.
        for (deg, contrib) in [(*i, y.diff(i - 1).mul(s)), (*i - 1, s.mul(&x.diff(i - 1)))] {
            if let Some(&(_, o)) = offsets.iter().find(|(d, _)| *d == deg) {
                for (r, v) in contrib.vectorize().into_iter().enumerate() {
                    if v != 0 {
                        let cur = sys.get(o + r, u);
                        sys.set(o + r, u, field.add(cur, v));
                    }
                }
            }
        }
    }
    let sol = solve(&sys, &rhs).ok()??;
    let mut out: BTreeMap<i64, Matrix> = BTreeMap::new();
    for (u, (i, s)) in unknowns.iter().enumerate() {
        let c = sol.get(u, 0);
        if c == 0 {
            continue;
        }
        let term = s.scale(c);
        out.entry(*i)
            .and_modify(|m| *m = m.add(&term))
            .or_insert(term);
    }
    Some(out)
}

pub fn is_null_homotopic(f: &ChainMap) -> bool {
    null_homotopy(f).is_some()
}

/// Truncated minimal free resolution of a complex.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub target: Complex,
    /// Degree cut: the free part lives in degrees `>= depth`.
    pub depth: i64,
    /// Free complex, minimal (differentials land in `x·P`).
    pub free: Complex,
    /// Comparison map `free -> target`; an isomorphism on `H^i` for `i > depth`.
    pub comparison: ChainMap,
    /// The module of relative cycles left uncovered at the cut. When
    /// `depth <= min degree` this is the kernel of the last differential,
    /// i.e. the syzygy the resolution would continue with.
    pub syzygy: RModule,
    /// Representatives of the syzygy's canonical basis inside `free^depth`.
    pub syzygy_inclusion: Matrix,
}

/// Minimal free resolution of `x` built degree by degree from the top, down to
/// degree `depth`.
///
/// At each degree the new free module covers a minimal generating set of the
/// cycles of the partial mapping cone modulo boundaries coming from `x`, which
/// makes the result minimal and lets deeper runs extend shallower ones.
pub fn projective_resolution(x: &Complex, depth: i64) -> Resolution {
    let ring = x.ring;
    let field = ring.field();
    let n = ring.n();
    let Some(top) = x.max_degree() else {
        return Resolution {
            target: x.clone(),
            depth,
            free: x.clone(),
            comparison: ChainMap::zero(x, x),
            syzygy: RModule::zero(ring),
            syzygy_inclusion: Matrix::zeros(field, 0, 0),
        };
    };
    let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
    let mut d_free: BTreeMap<i64, Matrix> = BTreeMap::new();
    let mut phi: BTreeMap<i64, Matrix> = BTreeMap::new();
    let mut i = top.max(depth - 1);
    let (syzygy, syzygy_inclusion) = loop {
        let r_next = ranks.get(&(i + 1)).copied().unwrap_or(0);
        let r_next2 = ranks.get(&(i + 2)).copied().unwrap_or(0);
        let pn = r_next * n;
        let xi = x.dim(i);
        let ambient = pn + xi;
        let action = RModule::free(ring, r_next).x_action().block_diag(&x.x_action(i));
        // Cone differential C^i = P^{i+1} ⊕ X^i -> C^{i+1} = P^{i+2} ⊕ X^{i+1}.
        let mut delta = Matrix::zeros(field, r_next2 * n + x.dim(i + 1), ambient);
        if let Some(d) = d_free.get(&(i + 1)) {
            delta.paste(0, 0, &d.neg());
        }
        if let Some(p) = phi.get(&(i + 1)) {
            delta.paste(r_next2 * n, 0, p);
        }
        delta.paste(r_next2 * n, pn, &x.diff(i));
        let cycles = kernel_basis(&delta);
        let dx_prev = x.diff(i - 1);
        let mut lower = Matrix::zeros(field, ambient, dx_prev.cols());
        lower.paste(pn, 0, &dx_prev);
        let sq = subquotient(&action, &cycles, &lower);

        if i < depth {
            break (
                module_of(ring, &sq),
                sq.reps.submatrix(0..pn, 0..sq.reps.cols()),
            );
        }
        let gens = sq.generators();
        let a = gens.len();
        if a > 0 {
            let mut g = Matrix::zeros(field, ambient, a * n);
            for (k, z) in gens.into_iter().enumerate() {
                let mut v = z;
                for t in 0..n {
                    for (row, &val) in v.iter().enumerate() {
                        g.set(row, k * n + t, val);
                    }
                    v = action.mul_vec(&v);
                }
            }
            ranks.insert(i, a);
            d_free.insert(i, g.submatrix(0..pn, 0..a * n).neg());
            phi.insert(i, g.submatrix(pn..ambient, 0..a * n));
        }
        i -= 1;
    };

    let components: BTreeMap<i64, RModule> = ranks
        .iter()
        .map(|(&i, &r)| (i, RModule::free(ring, r)))
        .collect();
    let diffs: BTreeMap<i64, Matrix> = d_free
        .into_iter()
        .filter(|(i, _)| ranks.contains_key(&(i + 1)))
        .collect();
    let free = Complex::from_maps(ring, &components, &diffs)
        .expect("resolution differentials square to zero");
    let comparison = ChainMap::new_unchecked(free.clone(), x.clone(), phi);
    Resolution {
        target: x.clone(),
        depth,
        free,
        comparison,
        syzygy,
        syzygy_inclusion,
    }
}

/// Whether every differential of a free complex lands in the radical `x·P`.
pub fn is_minimal_free(p: &Complex) -> bool {
    let n = p.ring().n();
    p.degrees().all(|i| {
        let d = p.diff(i);
        let rank = p.dim(i + 1) / n;
        (0..rank).all(|b| d.row(b * n).iter().all(|&v| v == 0))
    })
}

/// `dim_{F_p} Hom_{D^b}(A, T^d B)`.
///
/// Computed as `H^d` of the Hom complex `Hom_R(P, B)` where `P` is the
/// minimal resolution of `A` cut at `min(B) - d - 2`.
pub fn derived_hom(a: &Complex, b: &Complex, d: i64) -> Result<usize> {
    a.ring.check_same(&b.ring)?;
    let Some(b_min) = b.min_degree() else {
        return Ok(0);
    };
    if a.is_zero() {
        return Ok(0);
    }
    let res = projective_resolution(a, b_min - d - 2);
    Ok(hom_complex_cohomology(&res.free, b, d))
}

/// `dim H^d Hom_R(P, B)` for a bounded complex `P` of free modules.
pub fn hom_complex_cohomology(p: &Complex, b: &Complex, d: i64) -> usize {
    let dim_d = hom_dimension(p, b, d);
    if dim_d == 0 {
        return 0;
    }
    dim_d - hom_differential(p, b, d).rank() - hom_differential(p, b, d - 1).rank()
}

fn hom_layout(p: &Complex, b: &Complex, j: i64) -> Vec<(i64, usize, usize)> {
    let n = p.ring().n();
    let mut offset = 0;
    let mut out = Vec::new();
    for i in p.degrees() {
        let rank = p.dim(i) / n;
        let bd = b.dim(i + j);
        out.push((i, offset, rank));
        offset += rank * bd;
    }
    out
}

fn hom_dimension(p: &Complex, b: &Complex, j: i64) -> usize {
    let n = p.ring().n();
    p.degrees().map(|i| p.dim(i) / n * b.dim(i + j)).sum()
}

/// Matrix of `δ: Hom^j -> Hom^{j+1}`, `δf = d_B f - (-1)^j f d_P`, in
/// coordinates given by the images of the free generators.
fn hom_differential(p: &Complex, b: &Complex, j: i64) -> Matrix {
    let field = p.ring().field();
    let n = p.ring().n();
    let src = hom_layout(p, b, j);
    let tgt = hom_layout(p, b, j + 1);
    let mut m = Matrix::zeros(field, hom_dimension(p, b, j + 1), hom_dimension(p, b, j));
    if m.rows() == 0 || m.cols() == 0 {
        return m;
    }
    let sign_flip = j.rem_euclid(2) == 0;
    for &(i, so, rank) in &src {
        let bd = b.dim(i + j);
        if bd == 0 || rank == 0 {
            continue;
        }
        let db = b.diff(i + j);
        let bd_next = b.dim(i + j + 1);
        // d_B ∘ f^i lands in the (i, ·) slot of Hom^{j+1}.
        if let Some(&(_, to, _)) = tgt.iter().find(|t| t.0 == i) {
            for a in 0..rank {
                m.paste(to + a * bd_next, so + a * bd, &db);
            }
        }
        // -(-1)^j f^i ∘ d_P^{i-1} lands in the (i-1, ·) slot.
        if let Some(&(_, to, prev_rank)) = tgt.iter().find(|t| t.0 == i - 1) {
            let dp = p.diff(i - 1);
            let ab = b.x_action(i + j);
            let powers: Vec<Matrix> = (0..n).map(|t| ab.pow(t)).collect();
            for a_prev in 0..prev_rank {
                for a in 0..rank {
                    let mut block = Matrix::zeros(field, bd, bd);
                    for (t, pw) in powers.iter().enumerate() {
                        let c = dp.get(a * n + t, a_prev * n);
                        if c != 0 {
                            block = block.add(&pw.scale(c));
                        }
                    }
                    if sign_flip {
                        block = block.neg();
                    }
                    let (r0, c0) = (to + a_prev * bd, so + a * bd);
                    for r in 0..bd {
                        for c in 0..bd {
                            let v = field.add(m.get(r0 + r, c0 + c), block.get(r, c));
                            m.set(r0 + r, c0 + c, v);
                        }
                    }
                }
            }
        }
    }
    m
}
