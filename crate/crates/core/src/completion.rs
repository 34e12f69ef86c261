//! Membership in the completion, perfection, and the singularity category.

use std::collections::BTreeSet;

use crate::cauchy::{colimit, is_cauchy, CauchyCertificate, CauchyStatus, ColimitTable, Tail, Tower};
use crate::complex::{derived_hom, projective_resolution, Complex};
use crate::error::{Error, Result};
use crate::metric::GoodMetric;
use crate::rmodule::{stable_hom, RModule};

/// A three-valued verdict; `Inconclusive` carries the reason.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Inconclusive(String),
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

/// The colimit of a tower together with its provenance.
#[derive(Clone, Debug)]
pub struct CompletionObject {
    pub tower: Tower,
    pub metric: GoodMetric,
    pub certificate: CauchyCertificate,
    pub table: ColimitTable,
    /// Present when the table is conclusive.
    pub representative: Option<Complex>,
}

impl CompletionObject {
    pub fn new(
        tower: Tower,
        metric: GoodMetric,
        horizon: usize,
        levels: u64,
        window: (i64, i64),
    ) -> Result<Self> {
        let certificate = is_cauchy(&tower, &metric, horizon, levels)?;
        let table = colimit(&tower, window, horizon)?;
        let representative = table
            .is_conclusive()
            .then(|| table.representative(tower.ring()));
        Ok(CompletionObject {
            tower,
            metric,
            certificate,
            table,
            representative,
        })
    }

    /// Degrees where the colimit can have cohomology at all.
    pub fn plausible_support(&self) -> Result<BTreeSet<i64>> {
        Ok(match self.tower.tail() {
            Tail::Truncation(m) if m.is_zero() => BTreeSet::new(),
            Tail::Truncation(_) => BTreeSet::from([0]),
            Tail::Constant => self
                .tower
                .prefix()
                .last()
                .expect("constant towers have a term")
                .cohomology_support()
                .into_iter()
                .collect(),
            Tail::None => self
                .tower
                .terms(self.table.horizon)?
                .iter()
                .flat_map(Complex::cohomology_support)
                .collect(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct CompactSupport {
    pub verdict: Verdict,
    pub support: Vec<i64>,
    /// `dim Hom(X_i, rep)` along the certified suffix; all equal when the
    /// functor check passes.
    pub spot_check: Vec<(usize, usize)>,
}

/// Decides whether the colimit has finitely many nonzero cohomology modules,
/// spot-checking that `Hom(-, rep)` is constant along the certified suffix.
pub fn is_compactly_supported(c: &CompletionObject) -> Result<CompactSupport> {
    let (lo, hi) = c.table.window;
    let inconclusive = |why: String| CompactSupport {
        verdict: Verdict::Inconclusive(why),
        support: c.table.support(),
        spot_check: Vec::new(),
    };
    if !c.table.is_conclusive() {
        return Ok(inconclusive(format!(
            "no stabilization within horizon in degrees {:?}",
            c.table.inconclusive_degrees()
        )));
    }
    let plausible = c.plausible_support()?;
    if let Some(d) = plausible.iter().find(|&&d| d <= lo || d >= hi) {
        return Ok(inconclusive(format!(
            "degree {d} is not strictly inside the window {lo}..{hi}"
        )));
    }
    let rep = c.representative.as_ref().expect("conclusive table");
    let levels = c.certificate.levels.len();
    let start = (1..=levels)
        .rev()
        .find_map(|n| c.certificate.threshold(n))
        .filter(|&m| m < c.certificate.horizon);
    let mut spot_check = Vec::new();
    if let Some(m) = start {
        let terms = c.tower.terms(c.certificate.horizon)?;
        for (k, x) in terms.iter().enumerate().skip(m - 1) {
            spot_check.push((k + 1, derived_hom(x, rep, 0)?));
        }
    }
    let stable = spot_check.windows(2).all(|w| w[0].1 == w[1].1);
    Ok(CompactSupport {
        verdict: Verdict::from_bool(stable),
        support: c.table.support(),
        spot_check,
    })
}

/// Membership in the triangulated completion: a colimit of a Cauchy tower
/// that is compactly supported.
pub fn in_s(c: &CompletionObject) -> Result<Verdict> {
    match c.certificate.status() {
        CauchyStatus::NotCauchy => Err(Error::Precondition(format!(
            "tower is not Cauchy for metric {}",
            c.metric
        ))),
        CauchyStatus::Inconclusive => Ok(Verdict::Inconclusive(
            "Cauchy property not certified within horizon".into(),
        )),
        CauchyStatus::Cauchy => Ok(is_compactly_supported(c)?.verdict),
    }
}

/// Syzygy left over when resolving `x` one step below its lowest degree.
fn cut_syzygy(x: &Complex) -> (RModule, i64) {
    let Some(lo) = x.min_degree() else {
        return (RModule::zero(x.ring()), 0);
    };
    let depth = lo - 1;
    let res = projective_resolution(x, depth);
    (res.syzygy, depth)
}

/// Quasi-isomorphic to a bounded complex of free modules.
pub fn is_perfect(x: &Complex) -> bool {
    cut_syzygy(x).0.is_zero()
}

/// Injective resolutions correspond to free ones under the exact duality.
pub fn has_bounded_injective_resolution(x: &Complex) -> bool {
    is_perfect(&x.dualize())
}

/// A class in the singularity category: `module` shifted so that the
/// complex is `Ω^{shift-1}(module)` in the stable module category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingClass {
    pub module: RModule,
    pub shift: i64,
}

impl SingClass {
    pub fn is_zero(&self) -> bool {
        self.module.is_zero()
    }
}

pub fn syzygy_class(x: &Complex) -> SingClass {
    let (module, shift) = cut_syzygy(x);
    SingClass {
        module: module.strip_free(),
        shift,
    }
}

/// `dim Hom` in the singularity category, after aligning both classes with
/// syzygies to the smaller shift.
pub fn sing_hom(a: &SingClass, b: &SingClass) -> Result<usize> {
    a.module.ring().check_same(&b.module.ring())?;
    if a.is_zero() || b.is_zero() {
        return Ok(0);
    }
    let e = a.shift.min(b.shift);
    let ma = a.module.syzygy_power((a.shift - e) as usize);
    let mb = b.module.syzygy_power((b.shift - e) as usize);
    Ok(stable_hom(&ma, &mb)?.dim)
}
