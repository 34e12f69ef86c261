//! Towers `X_1 -> X_2 -> ...`, Cauchy certificates and degreewise colimits.

use std::collections::BTreeMap;

use crate::complex::{projective_resolution, ChainMap, Complex};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::metric::{length, GoodMetric, Length, VanishingSpec};
use crate::rmodule::{RModule, Ring};

/// How a tower continues past its explicit prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    /// The tower ends with its prefix.
    None,
    /// The last prefix term repeats with identity maps.
    Constant,
    /// `X_k = σ_{≥-k}` of the minimal free resolution of `M`, with the
    /// subcomplex inclusions as connecting maps.
    Truncation(RModule),
}

#[derive(Clone, Debug)]
pub struct Tower {
    ring: Ring,
    prefix: Vec<Complex>,
    maps: Vec<ChainMap>,
    tail: Tail,
}

impl Tower {
    /// Validates that `maps[k]` runs `prefix[k] -> prefix[k+1]` and that a
    /// truncation tail agrees with the prefix.
    pub fn new(ring: Ring, prefix: Vec<Complex>, maps: Vec<ChainMap>, tail: Tail) -> Result<Self> {
        if prefix.len() != maps.len() + 1 && !(prefix.is_empty() && maps.is_empty()) {
            return Err(Error::validation(
                "tower",
                format!("{} terms need {} connecting maps", prefix.len(), prefix.len().saturating_sub(1)),
            ));
        }
        for x in &prefix {
            ring.check_same(&x.ring())?;
        }
        for (k, f) in maps.iter().enumerate() {
            if f.source() != &prefix[k] || f.target() != &prefix[k + 1] {
                return Err(Error::validation(
                    "tower",
                    format!("map {} does not run X_{} -> X_{}", k + 1, k + 1, k + 2),
                ));
            }
        }
        match &tail {
            Tail::None | Tail::Constant if prefix.is_empty() => {
                return Err(Error::validation("tower", "an explicit tower needs at least one term"));
            }
            Tail::Truncation(m) => {
                ring.check_same(&m.ring())?;
            }
            _ => {}
        }
        let tower = Tower {
            ring,
            prefix,
            maps,
            tail,
        };
        if let Tail::Truncation(_) = tower.tail {
            let generated = tower.generated_terms(tower.prefix.len() + 1);
            for (k, x) in tower.prefix.iter().enumerate() {
                if x != &generated[k] {
                    return Err(Error::validation(
                        "tower",
                        format!("prefix term X_{} differs from the truncation rule", k + 1),
                    ));
                }
            }
            for (k, f) in tower.maps.iter().enumerate() {
                if f != &inclusion(&generated[k], &generated[k + 1]) {
                    return Err(Error::validation(
                        "tower",
                        format!("map {} is not the truncation inclusion", k + 1),
                    ));
                }
            }
        }
        Ok(tower)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn prefix(&self) -> &[Complex] {
        &self.prefix
    }

    pub fn maps(&self) -> &[ChainMap] {
        &self.maps
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Number of available terms, `None` if infinite.
    pub fn finite_len(&self) -> Option<usize> {
        match self.tail {
            Tail::None => Some(self.prefix.len()),
            _ => None,
        }
    }

    /// `X_1 ..= X_count` of a truncation tail from a single resolution.
    fn generated_terms(&self, count: usize) -> Vec<Complex> {
        let Tail::Truncation(m) = &self.tail else {
            unreachable!("only truncation tails are generated");
        };
        let full = projective_resolution(&Complex::concentrated(m.clone(), 0), -(count as i64)).free;
        (1..=count as i64).map(|k| full.truncate_below(-k)).collect()
    }

    /// `X_1 ..= X_count`, generating tail terms as needed.
    pub fn terms(&self, count: usize) -> Result<Vec<Complex>> {
        match &self.tail {
            Tail::Truncation(_) => Ok(self.generated_terms(count)),
            Tail::Constant => {
                let last = self.prefix.last().expect("validated nonempty");
                let mut out: Vec<Complex> = self.prefix.iter().take(count).cloned().collect();
                out.resize(count, last.clone());
                Ok(out)
            }
            Tail::None => {
                if count > self.prefix.len() {
                    return Err(Error::Precondition(format!(
                        "tower has only {} terms",
                        self.prefix.len()
                    )));
                }
                Ok(self.prefix[..count].to_vec())
            }
        }
    }

    pub fn term(&self, k: usize) -> Result<Complex> {
        if k == 0 {
            return Err(Error::Precondition("towers are indexed from 1".into()));
        }
        Ok(self.terms(k)?.pop().expect("k ≥ 1"))
    }

    /// Connecting maps `X_k -> X_{k+1}` for `k = 1..count`, given the terms.
    fn connecting(&self, terms: &[Complex]) -> Vec<ChainMap> {
        (0..terms.len().saturating_sub(1))
            .map(|k| match &self.tail {
                Tail::Truncation(_) => inclusion(&terms[k], &terms[k + 1]),
                _ if k < self.maps.len() => self.maps[k].clone(),
                _ => ChainMap::identity(&terms[k]),
            })
            .collect()
    }

    /// All composites `X_i -> X_j` for `1 ≤ i < j ≤ horizon`, keyed by `(i, j)`.
    fn composites(&self, terms: &[Complex]) -> BTreeMap<(usize, usize), ChainMap> {
        let steps = self.connecting(terms);
        let mut out = BTreeMap::new();
        for i in 1..=terms.len() {
            let mut acc = ChainMap::identity(&terms[i - 1]);
            for j in i + 1..=terms.len() {
                acc = steps[j - 2].compose(&acc).expect("consecutive maps compose");
                out.insert((i, j), acc.clone());
            }
        }
        out
    }
}

/// The inclusion of a brutal truncation into a longer one.
fn inclusion(small: &Complex, big: &Complex) -> ChainMap {
    let maps: BTreeMap<i64, Matrix> = small
        .degrees()
        .filter(|&i| small.dim(i) > 0)
        .map(|i| (i, Matrix::identity(small.ring().field(), small.dim(i))))
        .collect();
    ChainMap::new(small.clone(), big.clone(), maps).expect("truncations are subcomplexes")
}

/// The tower of truncated minimal resolutions of `m`.
pub fn truncation_tower(m: &RModule) -> Tower {
    Tower {
        ring: m.ring(),
        prefix: Vec::new(),
        maps: Vec::new(),
        tail: Tail::Truncation(m.clone()),
    }
}

/// The constant tower at `x`.
pub fn constant_tower(x: &Complex) -> Tower {
    Tower {
        ring: x.ring(),
        prefix: vec![x.clone()],
        maps: Vec::new(),
        tail: Tail::Constant,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelStatus {
    /// Every measured composite `X_i -> X_j` with `threshold ≤ i < j` is
    /// shorter than `1/n`.
    Certified { threshold: usize },
    /// The composite `X_i -> X_j` has length `≥ 1/n` for arbitrarily large `i`.
    Violated { i: usize, j: usize, length: Length },
    /// No threshold below the horizon works and the tail gives no closed form.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CauchyStatus {
    Cauchy,
    NotCauchy,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct CauchyCertificate {
    pub metric: String,
    /// Terms examined; clamped to the prefix for finite towers.
    pub horizon: usize,
    /// `levels[n-1]` is the verdict at level `n`.
    pub levels: Vec<LevelStatus>,
    /// Measured `length(X_i -> X_j)` for `1 ≤ i < j ≤ horizon`.
    pub lengths: BTreeMap<(usize, usize), Length>,
    /// Whether the verdicts hold beyond the horizon (structural tails).
    pub unconditional: bool,
}

impl CauchyCertificate {
    pub fn status(&self) -> CauchyStatus {
        if self.levels.iter().any(|l| matches!(l, LevelStatus::Violated { .. })) {
            CauchyStatus::NotCauchy
        } else if self.levels.iter().all(|l| matches!(l, LevelStatus::Certified { .. })) {
            CauchyStatus::Cauchy
        } else {
            CauchyStatus::Inconclusive
        }
    }

    pub fn threshold(&self, n: usize) -> Option<usize> {
        match self.levels.get(n.checked_sub(1)?) {
            Some(LevelStatus::Certified { threshold }) => Some(*threshold),
            _ => None,
        }
    }
}

/// Least `M ≤ horizon - 1` such that every measured composite starting at
/// `i ≥ M` is shorter than `1/n`.
fn measured_threshold(lengths: &BTreeMap<(usize, usize), Length>, horizon: usize, n: u64) -> Option<usize> {
    let mut best = None;
    for m in (1..horizon).rev() {
        let ok = lengths
            .range((m, 0)..(m + 1, 0))
            .all(|(_, l)| l.is_below_inverse(n));
        if !ok {
            break;
        }
        best = Some(m);
    }
    best
}

/// Degrees that must stay cohomology-free for lengths to drop below `1/n`.
fn short_set(m: &GoodMetric, n: u64) -> VanishingSpec {
    (2..=n + 1).fold(VanishingSpec::empty(), |acc, l| acc.union(&m.vanishing_set(l)))
}

/// Certifies Cauchy-ness at levels `1..=levels` using composites up to `horizon`.
pub fn is_cauchy(t: &Tower, m: &GoodMetric, horizon: usize, levels: u64) -> Result<CauchyCertificate> {
    if horizon < 2 {
        return Err(Error::Precondition("horizon must be at least 2".into()));
    }
    let horizon = match t.tail {
        Tail::None => horizon.min(t.prefix.len()),
        Tail::Constant => horizon.max(t.prefix.len()),
        Tail::Truncation(_) => horizon,
    };
    let terms = t.terms(horizon)?;
    let lengths: BTreeMap<(usize, usize), Length> = t
        .composites(&terms)
        .iter()
        .map(|(&k, f)| (k, length(f, m)))
        .collect();

    let mut out = Vec::new();
    let unconditional = !matches!(t.tail, Tail::None);
    for n in 1..=levels {
        let status = match &t.tail {
            Tail::Truncation(module) if module.strip_free().is_zero() => {
                LevelStatus::Certified { threshold: 1 }
            }
            Tail::Truncation(_) => truncation_level(t, m, n)?,
            // Past the prefix every composite factors through identities.
            Tail::Constant => LevelStatus::Certified {
                threshold: measured_threshold(&lengths, horizon, n).unwrap_or(horizon),
            },
            Tail::None => match measured_threshold(&lengths, horizon, n) {
                Some(threshold) => LevelStatus::Certified { threshold },
                None => LevelStatus::Inconclusive,
            },
        };
        out.push(status);
    }
    Ok(CauchyCertificate {
        metric: m.name().to_string(),
        horizon,
        levels: out,
        lengths,
        unconditional,
    })
}

/// Closed form for truncations of a module with a non-free part: the cone of
/// `X_i -> X_j` has cohomology exactly in degrees `-j` and `-i-1`.
fn truncation_level(t: &Tower, m: &GoodMetric, n: u64) -> Result<LevelStatus> {
    let short = short_set(m, n);
    if short.is_bounded_below() {
        let threshold = short.min().map_or(1, |lo| (-lo).max(1)) as usize;
        return Ok(LevelStatus::Certified { threshold });
    }
    let top = short.intervals()[0].1;
    let i = (-top - 1).max(1) as usize;
    let terms = t.terms(i + 1)?;
    let f = inclusion(&terms[i - 1], &terms[i]);
    Ok(LevelStatus::Violated {
        i,
        j: i + 1,
        length: length(&f, m),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColimitEntry {
    pub degree: i64,
    /// `H^i(X_horizon)`.
    pub module: RModule,
    /// Least `k` with `H^i(X_k) -> H^i(X_{k+1})` an isomorphism for all
    /// `k ≤ horizon - 1`; `None` if the last map is not one.
    pub index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColimitTable {
    pub window: (i64, i64),
    pub horizon: usize,
    pub entries: Vec<ColimitEntry>,
}

impl ColimitTable {
    pub fn is_conclusive(&self) -> bool {
        self.entries.iter().all(|e| e.index.is_some())
    }

    pub fn inconclusive_degrees(&self) -> Vec<i64> {
        self.entries.iter().filter(|e| e.index.is_none()).map(|e| e.degree).collect()
    }

    pub fn support(&self) -> Vec<i64> {
        self.entries.iter().filter(|e| !e.module.is_zero()).map(|e| e.degree).collect()
    }

    /// `⊕ H^i[-i]` over the window, with zero differential.
    pub fn representative(&self, ring: Ring) -> Complex {
        let comps: BTreeMap<i64, RModule> = self
            .entries
            .iter()
            .filter(|e| !e.module.is_zero())
            .map(|e| (e.degree, e.module.clone()))
            .collect();
        Complex::from_maps(ring, &comps, &BTreeMap::new()).expect("zero differential")
    }
}

/// Degreewise stabilized cohomology of the tower over `window` (inclusive).
pub fn colimit(t: &Tower, window: (i64, i64), horizon: usize) -> Result<ColimitTable> {
    if horizon < 2 {
        return Err(Error::Precondition("horizon must be at least 2".into()));
    }
    if window.0 > window.1 {
        return Err(Error::Precondition(format!("empty window {}..{}", window.0, window.1)));
    }
    let horizon = match t.tail {
        Tail::None => horizon.min(t.prefix.len()),
        Tail::Constant => horizon.max(t.prefix.len() + 1),
        Tail::Truncation(_) => horizon,
    };
    let terms = t.terms(horizon)?;
    let steps = t.connecting(&terms);
    let mut entries = Vec::new();
    for i in window.0..=window.1 {
        let mut index = None;
        for k in (1..horizon).rev() {
            let h = steps[k - 1].on_cohomology(i);
            let iso = h.rows() == h.cols() && h.rank() == h.rows();
            if !iso {
                break;
            }
            index = Some(k);
        }
        entries.push(ColimitEntry {
            degree: i,
            module: terms[horizon - 1].cohomology(i),
            index,
        });
    }
    Ok(ColimitTable {
        window,
        horizon,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Ring {
        Ring::new(2, 2).unwrap()
    }

    #[test]
    fn truncation_tower_of_residue_field() {
        let k = RModule::simple(ring());
        let t = truncation_tower(&k);
        let terms = t.terms(4).unwrap();
        for (idx, x) in terms.iter().enumerate() {
            let kk = idx as i64 + 1;
            assert_eq!(x.range(), Some((-kk, 0)));
            assert!(x.degrees().all(|i| x.component(i) == RModule::free(ring(), 1)));
            assert_eq!(x.cohomology(0), k);
            assert_eq!(x.cohomology(-kk), k);
        }
        assert_eq!(truncation_tower(&RModule::zero(ring())).term(3).unwrap(), Complex::zero(ring()));
        let r = RModule::free(ring(), 1);
        assert_eq!(truncation_tower(&r).term(5).unwrap(), Complex::concentrated(r, 0));
    }

    #[test]
    fn flagship_certificate_metric_i() {
        let t = truncation_tower(&RModule::simple(ring()));
        let cert = is_cauchy(&t, &GoodMetric::metric_i(), 8, 10).unwrap();
        assert_eq!(cert.status(), CauchyStatus::Cauchy);
        assert!(cert.unconditional);
        for n in 1..=10 {
            assert_eq!(cert.threshold(n), Some(n));
        }
        for (&(i, _), l) in &cert.lengths {
            assert_eq!(*l, Length::Inverse(i as u64 + 1));
        }
    }

    #[test]
    fn truncation_tower_is_not_cauchy_for_metric_ii() {
        let t = truncation_tower(&RModule::simple(ring()));
        let cert = is_cauchy(&t, &GoodMetric::metric_ii(), 6, 3).unwrap();
        assert_eq!(cert.status(), CauchyStatus::NotCauchy);
        for l in &cert.lengths {
            assert_eq!(*l.1, Length::Inverse(1));
        }
        match &cert.levels[0] {
            LevelStatus::Violated { length, .. } => assert_eq!(*length, Length::Inverse(1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constant_and_prefix_towers() {
        let k = Complex::concentrated(RModule::simple(ring()), -2);
        let cert = is_cauchy(&constant_tower(&k), &GoodMetric::metric_ii(), 5, 4).unwrap();
        assert_eq!(cert.status(), CauchyStatus::Cauchy);
        assert!((1..=4).all(|n| cert.threshold(n) == Some(1)));

        // Growing support with zero maps: no level-2 certificate.
        let xs: Vec<Complex> = (1..=4)
            .map(|d| Complex::concentrated(RModule::simple(ring()), -d))
            .collect();
        let maps = xs.windows(2).map(|w| ChainMap::zero(&w[0], &w[1])).collect();
        let t = Tower::new(ring(), xs, maps, Tail::None).unwrap();
        let cert = is_cauchy(&t, &GoodMetric::metric_i(), 10, 6).unwrap();
        assert_eq!(cert.horizon, 4);
        assert_eq!(cert.status(), CauchyStatus::Inconclusive);
        assert!(is_cauchy(&t, &GoodMetric::metric_i(), 1, 1).is_err());
    }

    #[test]
    fn tower_validation() {
        let k0 = Complex::concentrated(RModule::simple(ring()), 0);
        let k1 = k0.shift(-1);
        let bad = Tower::new(ring(), vec![k0.clone(), k1.clone()], vec![ChainMap::identity(&k0)], Tail::None);
        assert!(bad.is_err());
        let gen = truncation_tower(&RModule::simple(ring())).terms(2).unwrap();
        let ok = Tower::new(
            ring(),
            gen.clone(),
            vec![inclusion(&gen[0], &gen[1])],
            Tail::Truncation(RModule::simple(ring())),
        );
        assert!(ok.is_ok());
        let wrong = Tower::new(ring(), vec![k0], vec![], Tail::Truncation(RModule::simple(ring())));
        assert!(wrong.is_err());
    }

    #[test]
    fn colimit_tables() {
        let k = RModule::simple(ring());
        let table = colimit(&truncation_tower(&k), (-4, 2), 8).unwrap();
        assert!(table.is_conclusive());
        assert_eq!(table.support(), vec![0]);
        assert_eq!(table.entries.iter().find(|e| e.degree == 0).unwrap().module, k);
        assert_eq!(table.representative(ring()), Complex::concentrated(k.clone(), 0));
        for e in &table.entries {
            assert!(e.index.unwrap() <= e.degree.unsigned_abs() as usize + 1);
        }

        let r = RModule::free(ring(), 1);
        let table = colimit(&truncation_tower(&r), (-2, 2), 4).unwrap();
        assert_eq!(table.representative(ring()), Complex::concentrated(r, 0));

        let x = Complex::concentrated(k.clone(), 3);
        let table = colimit(&constant_tower(&x), (0, 4), 2).unwrap();
        assert!(table.is_conclusive());
        assert_eq!(table.representative(ring()), x);
    }
}
