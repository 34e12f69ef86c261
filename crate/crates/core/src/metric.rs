//! Good metrics given by cohomology-vanishing ball families.
//!
//! A metric assigns to each level `n ≥ 1` a set of degrees `V_n`; the ball
//! `B_n` consists of the complexes with `H^i = 0` for all `i ∈ V_n`, and
//! `V_1` is always empty. Lengths of morphisms are read off the cohomology
//! support of their cones in closed form.

use std::cmp::Ordering;
use std::fmt;

use crate::complex::{cone, ChainMap, Complex};
use crate::error::{Error, Result};
use crate::fuzz::{axiom_i_fuzz, FuzzConfig, FuzzReport};
use crate::rmodule::RModule;

const NEG_INF: i64 = i64::MIN;
const POS_INF: i64 = i64::MAX;

/// A set of integer degrees, stored as disjoint, non-adjacent closed
/// intervals in increasing order. `i64::MIN` / `i64::MAX` endpoints stand for
/// unbounded ends.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct VanishingSpec {
    intervals: Vec<(i64, i64)>,
}

impl VanishingSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn all() -> Self {
        Self::from_intervals(vec![(NEG_INF, POS_INF)])
    }

    /// `{i : i > a}`.
    pub fn ray_above(a: i64) -> Self {
        Self::from_intervals(vec![(a.saturating_add(1), POS_INF)])
    }

    /// `{i : i < b}`.
    pub fn ray_below(b: i64) -> Self {
        Self::from_intervals(vec![(NEG_INF, b.saturating_sub(1))])
    }

    /// `{i : a < i < b}`.
    pub fn interval(a: i64, b: i64) -> Self {
        Self::from_intervals(vec![(a.saturating_add(1), b.saturating_sub(1))])
    }

    pub fn point(d: i64) -> Self {
        Self::from_intervals(vec![(d, d)])
    }

    fn from_intervals(mut raw: Vec<(i64, i64)>) -> Self {
        raw.retain(|&(lo, hi)| lo <= hi);
        raw.sort();
        let mut out: Vec<(i64, i64)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            match out.last_mut() {
                Some(last) if last.1 == POS_INF || lo <= last.1 + 1 => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        Self { intervals: out }
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, d: i64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= d && d <= hi)
    }

    /// Least element, `None` if empty or unbounded below.
    pub fn min(&self) -> Option<i64> {
        self.intervals.first().map(|i| i.0).filter(|&lo| lo != NEG_INF)
    }

    pub fn is_bounded_below(&self) -> bool {
        self.intervals.first().is_none_or(|i| i.0 != NEG_INF)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        Self::from_intervals(all)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut next = NEG_INF;
        let mut open = true;
        for &(lo, hi) in &self.intervals {
            if lo != NEG_INF {
                out.push((next, lo - 1));
            }
            if hi == POS_INF {
                open = false;
                break;
            }
            next = hi + 1;
        }
        if open {
            out.push((next, POS_INF));
        }
        Self::from_intervals(out)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.complement().union(&other.complement()).complement()
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// `{d + t : d ∈ self}`.
    pub fn shift(&self, t: i64) -> Self {
        let move_end = |e: i64| if e == NEG_INF || e == POS_INF { e } else { e + t };
        Self::from_intervals(
            self.intervals
                .iter()
                .map(|&(lo, hi)| (move_end(lo), move_end(hi)))
                .collect(),
        )
    }

    /// `{-d : d ∈ self}`.
    pub fn negate(&self) -> Self {
        let flip = |e: i64| match e {
            NEG_INF => POS_INF,
            POS_INF => NEG_INF,
            e => -e,
        };
        Self::from_intervals(self.intervals.iter().map(|&(lo, hi)| (flip(hi), flip(lo))).collect())
    }

    /// The element closest to 0 (ties towards the negative side).
    pub fn representative(&self) -> Option<i64> {
        self.intervals
            .iter()
            .map(|&(lo, hi)| 0.clamp(lo, hi))
            .min_by_key(|&d| (d.unsigned_abs(), d))
    }
}

impl fmt::Display for VanishingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        for (k, &(lo, hi)) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, " ∪ ")?;
            }
            match (lo, hi) {
                (NEG_INF, POS_INF) => write!(f, "all")?,
                (NEG_INF, hi) => write!(f, "i < {}", hi + 1)?,
                (lo, POS_INF) => write!(f, "i > {}", lo - 1)?,
                (lo, hi) if lo == hi => write!(f, "i = {lo}")?,
                (lo, hi) => write!(f, "{} < i < {}", lo - 1, hi + 1)?,
            }
        }
        Ok(())
    }
}

/// One affine piece of a vanishing family, evaluated at level `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// `{i > c·n + o}`
    Above { c: i64, o: i64 },
    /// `{i < c·n + o}`
    Below { c: i64, o: i64 },
    /// `{c1·n + o1 < i < c2·n + o2}`
    Between { c1: i64, o1: i64, c2: i64, o2: i64 },
}

impl Constraint {
    pub fn at(&self, n: i64) -> VanishingSpec {
        match *self {
            Constraint::Above { c, o } => VanishingSpec::ray_above(c * n + o),
            Constraint::Below { c, o } => VanishingSpec::ray_below(c * n + o),
            Constraint::Between { c1, o1, c2, o2 } => {
                VanishingSpec::interval(c1 * n + o1, c2 * n + o2)
            }
        }
    }

    fn shift_offsets(&self, t: i64) -> Self {
        match *self {
            Constraint::Above { c, o } => Constraint::Above { c, o: o + t },
            Constraint::Below { c, o } => Constraint::Below { c, o: o + t },
            Constraint::Between { c1, o1, c2, o2 } => Constraint::Between {
                c1,
                o1: o1 + t,
                c2,
                o2: o2 + t,
            },
        }
    }

    /// Inequalities `a·n ≤ b` equivalent to `d` lying in the constraint.
    fn inequalities(&self, d: i64) -> Vec<(i64, i64)> {
        match *self {
            Constraint::Above { c, o } => vec![(c, d - o - 1)],
            Constraint::Below { c, o } => vec![(-c, o - d - 1)],
            Constraint::Between { c1, o1, c2, o2 } => vec![(c1, d - o1 - 1), (-c2, o2 - d - 1)],
        }
    }

    /// Least level `n ≥ 2` whose set contains `d`.
    fn first_level_containing(&self, d: i64) -> Option<i64> {
        let mut lower = 2i64;
        let mut upper = POS_INF;
        for (a, b) in self.inequalities(d) {
            match a.cmp(&0) {
                Ordering::Equal if b < 0 => return None,
                Ordering::Equal => {}
                Ordering::Greater => upper = upper.min(b.div_euclid(a)),
                Ordering::Less => lower = lower.max(ceil_div(b, a)),
            }
        }
        (lower <= upper).then_some(lower)
    }
}

fn ceil_div(b: i64, a: i64) -> i64 {
    let q = b / a;
    if (b % a != 0) && ((b < 0) == (a < 0)) {
        q + 1
    } else {
        q
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Constraint::Above { c, o } => write!(f, "above {c} {o}"),
            Constraint::Below { c, o } => write!(f, "below {c} {o}"),
            Constraint::Between { c1, o1, c2, o2 } => write!(f, "interval {c1} {o1} {c2} {o2}"),
        }
    }
}

/// A ball family `n ↦ V_n`, the union of its constraints for `n ≥ 2` and
/// empty at `n = 1`. With the dual flag set, degrees are negated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GoodMetric {
    name: String,
    constraints: Vec<Constraint>,
    dual: bool,
}

impl GoodMetric {
    pub fn new(name: impl Into<String>, constraints: Vec<Constraint>) -> Self {
        Self {
            name: name.into(),
            constraints,
            dual: false,
        }
    }

    /// Balls `H^i = 0` for `i > -n`.
    pub fn metric_i() -> Self {
        Self::new("i", vec![Constraint::Above { c: -1, o: 0 }])
    }

    /// Balls `H^i = 0` for `i < n`.
    pub fn metric_ii() -> Self {
        Self::new("ii", vec![Constraint::Below { c: 1, o: 0 }])
    }

    /// Balls `H^i = 0` for `-n < i < n`.
    pub fn metric_iii() -> Self {
        Self::new(
            "iii",
            vec![Constraint::Between {
                c1: -1,
                o1: 0,
                c2: 1,
                o2: 0,
            }],
        )
    }

    /// Parses `i`, `ii`, `iii`, optionally suffixed with `:dual`.
    pub fn standard(name: &str) -> Result<Self> {
        let (base, dual) = match name.strip_suffix(":dual") {
            Some(b) => (b, true),
            None => (name, false),
        };
        let m = match base {
            "i" => Self::metric_i(),
            "ii" => Self::metric_ii(),
            "iii" => Self::metric_iii(),
            other => return Err(Error::Precondition(format!("unknown metric `{other}`"))),
        };
        Ok(if dual { m.dual() } else { m })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..self.clone()
        }
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn is_dual(&self) -> bool {
        self.dual
    }

    /// Same family measured on the opposite side.
    pub fn dual(&self) -> Self {
        let name = match self.name.strip_suffix(":dual") {
            Some(b) => b.to_string(),
            None => format!("{}:dual", self.name),
        };
        Self {
            name,
            constraints: self.constraints.clone(),
            dual: !self.dual,
        }
    }

    /// The family `{T^t B_n}`; its vanishing sets are `V_n - t`.
    pub fn shifted(&self, t: i64) -> Self {
        let delta = if self.dual { t } else { -t };
        Self {
            name: format!("T^{t} {}", self.name),
            constraints: self.constraints.iter().map(|c| c.shift_offsets(delta)).collect(),
            dual: self.dual,
        }
    }

    /// The raw specification at level `n`, before the dual flag is applied.
    pub fn spec(&self, n: u64) -> VanishingSpec {
        if n <= 1 {
            return VanishingSpec::empty();
        }
        self.constraints
            .iter()
            .fold(VanishingSpec::empty(), |acc, c| acc.union(&c.at(n as i64)))
    }

    /// Degrees where objects of `B_n` must have vanishing cohomology.
    pub fn vanishing_set(&self, n: u64) -> VanishingSpec {
        let s = self.spec(n);
        if self.dual {
            s.negate()
        } else {
            s
        }
    }

    pub fn support_in_ball(&self, support: &[i64], n: u64) -> bool {
        let v = self.vanishing_set(n);
        support.iter().all(|&d| !v.contains(d))
    }

    /// Least level `n ≥ 2` whose ball excludes an object with support `support`.
    fn first_excluding_level(&self, support: &[i64]) -> Option<u64> {
        support
            .iter()
            .flat_map(|&d| {
                let d = if self.dual { -d } else { d };
                self.constraints.iter().filter_map(move |c| c.first_level_containing(d))
            })
            .min()
            .map(|n| n as u64)
    }

    /// Length of a morphism whose cone has the given cohomology support.
    pub fn length_of_support(&self, support: &[i64]) -> Length {
        if support.is_empty() {
            return Length::Zero;
        }
        match self.first_excluding_level(support) {
            Some(n) => Length::Inverse(n - 1),
            None => Length::Zero,
        }
    }
}

impl fmt::Display for GoodMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// `H^i(X) = 0` for every `i` in the vanishing set at level `n`.
pub fn in_ball(x: &Complex, n: u64, m: &GoodMetric) -> bool {
    m.support_in_ball(&x.cohomology_support(), n)
}

/// An exact length in `{0} ∪ {1/n : n ≥ 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Length {
    Zero,
    /// `1/n`
    Inverse(u64),
}

impl Length {
    /// Whether the length is strictly below `1/n`.
    pub fn is_below_inverse(&self, n: u64) -> bool {
        match *self {
            Length::Zero => true,
            Length::Inverse(k) => k > n,
        }
    }
}

impl Ord for Length {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Length::Zero, Length::Zero) => Ordering::Equal,
            (Length::Zero, _) => Ordering::Less,
            (_, Length::Zero) => Ordering::Greater,
            (Length::Inverse(a), Length::Inverse(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for Length {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Zero => write!(f, "0"),
            Length::Inverse(1) => write!(f, "1"),
            Length::Inverse(n) => write!(f, "1/{n}"),
        }
    }
}

/// `inf {1/n : cone(f) ∈ B_n}`.
pub fn length(f: &ChainMap, m: &GoodMetric) -> Length {
    m.length_of_support(&cone(f).z.cohomology_support())
}

/// A failure of `T^s B_{n+1} ⊆ B_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub level: u64,
    pub shift: i64,
    /// Degree `d` of the witness: `k` placed so that `T^s` of it sits at `d`.
    pub degree: i64,
    /// The witness `X ∈ B_{n+1}` with `T^s X ∉ B_n`.
    pub witness: Complex,
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub metric: String,
    pub levels_checked: u64,
    pub shift_violation: Option<AxiomViolation>,
    /// Cohomology-vanishing balls are closed under extensions by the long
    /// exact sequence, whatever the shape of `V_n`.
    pub extension_closed: bool,
    pub fuzz: FuzzReport,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.shift_violation.is_none() && self.extension_closed && self.fuzz.violations == 0
    }
}

/// Symbolic check of `T^s B_{n+1} ⊆ B_n` for `s ∈ {-1, 0, 1}` and
/// `1 ≤ n ≤ levels`, returning the first failure with a verified witness.
pub fn check_shift_axiom(
    m: &GoodMetric,
    ring: crate::rmodule::Ring,
    levels: u64,
) -> Option<AxiomViolation> {
    for n in 1..=levels {
        let here = m.vanishing_set(n);
        let next = m.vanishing_set(n + 1);
        for s in [-1i64, 0, 1] {
            let diff = here.difference(&next.shift(-s));
            if let Some(d) = diff.representative() {
                let witness = Complex::concentrated(RModule::simple(ring), d + s);
                debug_assert!(in_ball(&witness, n + 1, m));
                debug_assert!(!in_ball(&witness.shift(s), n, m));
                return Some(AxiomViolation {
                    level: n,
                    shift: s,
                    degree: d,
                    witness,
                });
            }
        }
    }
    None
}

/// Both axioms: the shift axiom symbolically up to `levels`, extension
/// closure symbolically and by seeded fuzzing.
pub fn check_good_axioms(m: &GoodMetric, levels: u64, fuzz: &FuzzConfig) -> AxiomReport {
    AxiomReport {
        metric: m.name().to_string(),
        levels_checked: levels,
        shift_violation: check_shift_axiom(m, fuzz.ring, levels),
        extension_closed: true,
        fuzz: axiom_i_fuzz(m, fuzz),
    }
}

/// Outcome of comparing two metrics at the ball level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    /// `witness[n-1] = m(n)`: `B¹_m ⊆ B²_n` and `B²_m ⊆ B¹_n`.
    Equivalent { witness: Vec<u64> },
    /// No `m ≤ bound` works at `level`. `separating[m-1]` is a degree `d`
    /// such that `k` at `d` separates the balls at `(level, m)`.
    NotEquivalent {
        level: u64,
        separating: Vec<Separation>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separation {
    pub m: u64,
    pub degree: i64,
    /// Whether `k` at `degree` lies in `B¹_m` but not `B²_n` (else the reverse).
    pub first_side: bool,
}

/// Decides equivalence on levels `1..=levels`, searching `m ≤ bound`.
pub fn equivalent(m1: &GoodMetric, m2: &GoodMetric, levels: u64, bound: u64) -> Equivalence {
    let mut witness = Vec::new();
    for n in 1..=levels {
        let v1 = m1.vanishing_set(n);
        let v2 = m2.vanishing_set(n);
        let found = (1..=bound).find(|&m| {
            v2.is_subset(&m1.vanishing_set(m)) && v1.is_subset(&m2.vanishing_set(m))
        });
        match found {
            Some(m) => witness.push(m),
            None => {
                let separating = (1..=bound)
                    .map(|m| {
                        if let Some(d) = v2.difference(&m1.vanishing_set(m)).representative() {
                            Separation {
                                m,
                                degree: d,
                                first_side: true,
                            }
                        } else {
                            let d = v1
                                .difference(&m2.vanishing_set(m))
                                .representative()
                                .expect("one inclusion fails");
                            Separation {
                                m,
                                degree: d,
                                first_side: false,
                            }
                        }
                    })
                    .collect();
                return Equivalence::NotEquivalent {
                    level: n,
                    separating,
                };
            }
        }
    }
    Equivalence::Equivalent { witness }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriangleCheck {
    pub f: Length,
    pub g: Length,
    pub composite: Length,
}

impl TriangleCheck {
    pub fn holds(&self) -> bool {
        self.composite <= self.f.max(self.g)
    }
}

/// `length(g∘f) ≤ max(length f, length g)`.
pub fn strong_triangle_check(f: &ChainMap, g: &ChainMap, m: &GoodMetric) -> Result<TriangleCheck> {
    let gf = g.compose(f)?;
    Ok(TriangleCheck {
        f: length(f, m),
        g: length(g, m),
        composite: length(&gf, m),
    })
}

#[derive(Clone, Debug)]
pub struct CartesianCheck {
    pub f: Length,
    pub g: Length,
    /// The induced `g : c -> d`.
    pub induced: ChainMap,
}

impl CartesianCheck {
    pub fn holds(&self) -> bool {
        self.f == self.g
    }
}

/// Completes `f : a -> b`, `h : a -> c` to a homotopy pushout square with
/// `d = cone(a -> b ⊕ c)` and compares `length f` with `length(c -> d)`.
pub fn cartesian_invariance_check(
    f: &ChainMap,
    h: &ChainMap,
    m: &GoodMetric,
) -> Result<CartesianCheck> {
    if f.source() != h.source() {
        return Err(Error::SourceMismatch(format!(
            "{} vs {}",
            f.source(),
            h.source()
        )));
    }
    let sum = Complex::direct_sum(f.target(), h.target())?;
    let u = sum
        .inc_a
        .compose(&f.neg())?
        .add(&sum.inc_b.compose(h)?)?;
    let tri = cone(&u);
    let g = tri.g.compose(&sum.inc_b)?;
    Ok(CartesianCheck {
        f: length(f, m),
        g: length(&g, m),
        induced: g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmodule::Ring;

    fn ring() -> Ring {
        Ring::new(2, 2).unwrap()
    }

    fn k_at(d: i64) -> Complex {
        Complex::concentrated(RModule::simple(ring()), d)
    }

    #[test]
    fn spec_set_algebra() {
        let a = VanishingSpec::ray_above(-2);
        assert!(a.contains(-1) && !a.contains(-2));
        assert_eq!(a.complement(), VanishingSpec::ray_below(-1));
        assert_eq!(VanishingSpec::interval(2, 3), VanishingSpec::empty());
        assert_eq!(
            VanishingSpec::interval(-3, 0).union(&VanishingSpec::interval(-1, 3)),
            VanishingSpec::interval(-3, 3)
        );
        assert_eq!(a.shift(2), VanishingSpec::ray_above(0));
        assert_eq!(a.negate(), VanishingSpec::ray_below(2));
        assert!(VanishingSpec::interval(-2, 2).is_subset(&a));
        assert_eq!(
            VanishingSpec::ray_below(2)
                .difference(&VanishingSpec::ray_above(-3))
                .representative(),
            Some(-3)
        );
        assert_eq!(VanishingSpec::all().complement(), VanishingSpec::empty());
        assert_eq!(format!("{}", VanishingSpec::interval(-2, 2)), "-2 < i < 2");
    }

    #[test]
    fn standard_balls() {
        let m = GoodMetric::metric_i();
        assert!(in_ball(&k_at(0), 1, &m));
        assert!(!in_ball(&k_at(0), 2, &m));
        assert!(in_ball(&k_at(-2), 2, &m));
        let acyclic = cone(&ChainMap::identity(&k_at(0))).z;
        for m in [GoodMetric::metric_i(), GoodMetric::metric_ii(), GoodMetric::metric_iii()] {
            for n in 1..10 {
                assert!(in_ball(&acyclic, n, &m));
            }
        }
    }

    #[test]
    fn lengths_of_zero_maps() {
        let m = GoodMetric::metric_i();
        let zero = Complex::zero(ring());
        let f = ChainMap::zero(&zero, &k_at(-5));
        assert_eq!(length(&f, &m), Length::Inverse(5));
        let f = ChainMap::zero(&zero, &k_at(0));
        assert_eq!(length(&f, &m), Length::Inverse(1));
        assert_eq!(length(&ChainMap::identity(&k_at(3)), &m), Length::Zero);
        assert_eq!(format!("{}", Length::Inverse(5)), "1/5");
        assert_eq!(format!("{}", Length::Inverse(1)), "1");
    }

    #[test]
    fn length_order_is_rational_order() {
        let mut v = vec![Length::Inverse(1), Length::Zero, Length::Inverse(7), Length::Inverse(2)];
        v.sort();
        assert_eq!(
            v,
            vec![Length::Zero, Length::Inverse(7), Length::Inverse(2), Length::Inverse(1)]
        );
        assert!(Length::Inverse(3).is_below_inverse(2));
        assert!(!Length::Inverse(2).is_below_inverse(2));
    }

    #[test]
    fn closed_forms_for_standard_metrics() {
        for d in -8i64..=8 {
            let s = [d];
            let expect = |k: i64| Length::Inverse(k.max(1) as u64);
            assert_eq!(GoodMetric::metric_i().length_of_support(&s), expect(-d));
            assert_eq!(GoodMetric::metric_ii().length_of_support(&s), expect(d));
            assert_eq!(GoodMetric::metric_iii().length_of_support(&s), expect(d.abs()));
        }
    }

    #[test]
    fn standard_metrics_satisfy_shift_axiom() {
        for m in [GoodMetric::metric_i(), GoodMetric::metric_ii(), GoodMetric::metric_iii()] {
            assert_eq!(check_shift_axiom(&m, ring(), 50), None);
            assert_eq!(check_shift_axiom(&m.dual(), ring(), 50), None);
        }
    }

    #[test]
    fn non_shrinking_family_is_rejected() {
        let broken = GoodMetric::new("flat", vec![Constraint::Above { c: 0, o: 0 }]);
        let v = check_shift_axiom(&broken, ring(), 10).expect("violation");
        assert_eq!((v.level, v.shift, v.degree), (2, -1, 1));
        assert!(in_ball(&v.witness, 3, &broken));
        assert!(!in_ball(&v.witness.shift(-1), 2, &broken));
    }

    #[test]
    fn equivalence_verdicts() {
        let i = GoodMetric::metric_i();
        assert_eq!(
            equivalent(&i, &i, 6, 20),
            Equivalence::Equivalent {
                witness: (1..=6).collect()
            }
        );
        match equivalent(&i, &GoodMetric::metric_ii(), 6, 10) {
            Equivalence::NotEquivalent { level, separating } => {
                assert_eq!(level, 2);
                assert_eq!(separating[0].degree, 0);
                for s in &separating[1..] {
                    assert_eq!(s.degree, -(s.m as i64));
                }
            }
            other => panic!("unexpected {other:?}"),
        }
        for m in [GoodMetric::metric_i(), GoodMetric::metric_ii(), GoodMetric::metric_iii()] {
            let Equivalence::Equivalent { witness } = equivalent(&m, &m.shifted(1), 20, 40) else {
                panic!("shifted family should be equivalent");
            };
            assert_eq!(witness[0], 1);
            for n in 2..=20u64 {
                assert_eq!(witness[n as usize - 1], n + 1);
            }
        }
    }

    #[test]
    fn shifted_family_vanishing_sets() {
        let m = GoodMetric::metric_ii().dual().shifted(2);
        for n in 2..8 {
            assert_eq!(m.vanishing_set(n), GoodMetric::metric_ii().dual().vanishing_set(n).shift(-2));
        }
        assert_eq!(GoodMetric::standard("i:dual").unwrap().vanishing_set(3), GoodMetric::metric_ii().vanishing_set(3));
        assert!(GoodMetric::standard("iv").is_err());
    }

    #[test]
    fn triangle_and_cartesian_trivial_cases() {
        let m = GoodMetric::metric_i();
        let zero = Complex::zero(ring());
        let x = k_at(-3);
        let f = ChainMap::zero(&zero, &x);
        let check = strong_triangle_check(&ChainMap::identity(&zero), &f, &m).unwrap();
        assert_eq!((check.f, check.g, check.composite), (Length::Zero, Length::Inverse(3), Length::Inverse(3)));
        assert!(check.holds());
        assert!(strong_triangle_check(&f, &f, &m).is_err());

        let c = cartesian_invariance_check(&f, &ChainMap::identity(&zero), &m).unwrap();
        assert!(c.holds());
        let c = cartesian_invariance_check(&f, &ChainMap::zero(&zero, &zero), &m).unwrap();
        assert_eq!(c.g, Length::Inverse(3));
        assert!(cartesian_invariance_check(&f, &ChainMap::identity(&x), &m).is_err());
    }
}
