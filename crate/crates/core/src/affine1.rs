//! Affine groups `G = V ⋊ H` with `V = F_q` and `H ≤ ΓL₁(q)`.
//!
//! [`classify`] decides basic/non-basic arithmetically; [`oracle_check`]
//! rebuilds `G` as a permutation group on `F_q` and evaluates the definition
//! with brute-force normal covering numbers.

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{Elem, FieldTable};
use crate::gammal1::{GammaL1, Gl1Subgroup};
use crate::groupengine::{self, compose_perms, FiniteGroup, Gamma};
use crate::numth;
use crate::verdict::{DecidedBy, Reason, VerdictKind};

/// Largest `q · |H|` handled by the brute-force oracle.
pub const ORACLE_ORDER_CAP: usize = 5_000;

/// Classification of one subgroup `H ≤ ΓL₁(q)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub reason: Option<Reason>,
    /// A maximal subgroup of `H` whose conjugates cover `H*` (present iff basic).
    pub witness: Option<Gl1Subgroup>,
    pub decided_by: DecidedBy,
}

impl Verdict {
    fn not_applicable(reason: Reason, decided_by: DecidedBy) -> Self {
        Verdict {
            kind: VerdictKind::NotApplicable,
            reason: Some(reason),
            witness: None,
            decided_by,
        }
    }
}

/// Maximal subgroups of `h` containing `k`. Subgroups of ΓL₁(q) are
/// supersolvable, so these are exactly the prime-index overgroups of `k` in `h`.
fn maximal_overgroups(gl: &GammaL1, h: Gl1Subgroup, k: Gl1Subgroup) -> Vec<Gl1Subgroup> {
    let order = gl.order(h);
    gl.enumerate_subgroups()
        .into_iter()
        .filter(|&m| {
            let mo = gl.order(m);
            mo < order
                && order % mo == 0
                && numth::is_prime(order / mo)
                && gl.is_subgroup_of(m, h)
                && gl.is_subgroup_of(k, m)
        })
        .collect()
}

fn decide(
    gl: &GammaL1,
    h: Gl1Subgroup,
    irreducible: bool,
    nilpotent: impl FnOnce() -> bool,
    star_closure: impl FnOnce() -> Gl1Subgroup,
) -> Verdict {
    if !irreducible {
        return Verdict::not_applicable(Reason::Reducible, DecidedBy::Irreducibility);
    }
    if gl.f() == 1 && h == gl.trivial() {
        return Verdict::not_applicable(Reason::CyclicG, DecidedBy::CyclicGroup);
    }
    if !nilpotent() {
        return Verdict::not_applicable(Reason::GammaHEqualsTwo, DecidedBy::Nilpotency);
    }
    let k = star_closure();
    if k == h {
        return Verdict {
            kind: VerdictKind::NonBasic,
            reason: None,
            witness: None,
            decided_by: DecidedBy::StarClosure,
        };
    }
    let witness = maximal_overgroups(gl, h, k).into_iter().next();
    debug_assert!(witness.is_some(), "a proper normal subgroup lies in a maximal one");
    Verdict {
        kind: VerdictKind::Basic,
        reason: None,
        witness,
        decided_by: DecidedBy::StarClosure,
    }
}

/// Classifies `V ⋊ H` for `H` given by its canonical triple.
pub fn classify(gl: &GammaL1, h: Gl1Subgroup) -> Result<Verdict> {
    if !gl.is_valid(h) {
        return Err(Error::domain(format!(
            "{h} is not a canonical subgroup triple of ΓL₁({})",
            gl.field().q()
        )));
    }
    Ok(decide(
        gl,
        h,
        gl.is_irreducible(h),
        || gl.is_nilpotent_fast(h),
        || gl.star_closure(h),
    ))
}

/// One row of a dimension-1 scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub p: u32,
    pub f: u32,
    pub q: u32,
    pub d: u32,
    pub j: u32,
    pub i: u32,
    pub order: u64,
    pub irreducible: bool,
    pub nilpotent: bool,
    pub h_star: usize,
    pub star_generates: bool,
    pub verdict: VerdictKind,
    pub reason: Option<Reason>,
    pub witness: Option<Gl1Subgroup>,
    pub decided_by: DecidedBy,
    /// Least triple in the ⟨λ⟩-conjugacy class.
    pub lambda_class: Gl1Subgroup,
}

impl ScanRecord {
    pub fn triple(&self) -> Gl1Subgroup {
        Gl1Subgroup::new(self.d, self.j, self.i)
    }
}

/// Every fact reported for `h`, with the verdict.
pub fn analyze(gl: &GammaL1, h: Gl1Subgroup) -> ScanRecord {
    let t = gl.field();
    let irreducible = gl.is_irreducible(h);
    let nilpotent = gl.is_nilpotent_fast(h);
    let star = gl.h_star(h);
    let closure = gl
        .generated_subgroup(&star)
        .expect("elements of H lie in ΓL₁(q)");
    let verdict = decide(gl, h, irreducible, || nilpotent, || closure);
    ScanRecord {
        p: t.p(),
        f: t.f(),
        q: t.q(),
        d: h.d,
        j: h.j,
        i: h.i,
        order: gl.order(h),
        irreducible,
        nilpotent,
        h_star: star.len(),
        star_generates: closure == h,
        verdict: verdict.kind,
        reason: verdict.reason,
        witness: verdict.witness,
        decided_by: verdict.decided_by,
        lambda_class: gl.lambda_class(h)[0],
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub basic: usize,
    pub nonbasic: usize,
    pub notapplicable: usize,
    pub failures: usize,
}

/// Records of a scan, sorted by `(q, d, j, i)`, with any classification violations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub records: Vec<ScanRecord>,
    pub failures: Vec<String>,
}

impl ScanReport {
    pub fn summary(&self) -> Summary {
        let count = |k| self.records.iter().filter(|r| r.verdict == k).count();
        Summary {
            basic: count(VerdictKind::Basic),
            nonbasic: count(VerdictKind::NonBasic),
            notapplicable: count(VerdictKind::NotApplicable),
            failures: self.failures.len(),
        }
    }

    pub fn nonbasic(&self) -> impl Iterator<Item = &ScanRecord> {
        self.records.iter().filter(|r| r.verdict == VerdictKind::NonBasic)
    }
}

/// Classifies every subgroup of every ΓL₁(q) with `qmin <= q <= qmax`, checking
/// that the non-basic ones are exactly the irreducible dihedral 2-groups
/// `⟨σ, λ^{(p-1)e}⟩` (up to ⟨λ⟩-conjugacy) with `p ≡ 3 (mod 4)` and `f = 2`.
pub fn scan_dim1(qmin: u32, qmax: u32) -> Result<ScanReport> {
    let fields = numth::prime_powers(qmin as u64, qmax as u64)
        .into_iter()
        .map(|(p, f)| FieldTable::new(p, f))
        .collect::<Result<Vec<_>>>()?;
    let tasks: Vec<(usize, Gl1Subgroup)> = fields
        .iter()
        .enumerate()
        .flat_map(|(k, t)| {
            GammaL1::new(t)
                .enumerate_subgroups()
                .into_iter()
                .map(move |h| (k, h))
        })
        .collect();
    let results: Vec<(ScanRecord, Option<String>)> = tasks
        .par_iter()
        .map(|&(k, h)| {
            let gl = GammaL1::new(&fields[k]);
            let record = analyze(&gl, h);
            let failure = scan_violation(&gl, &record);
            (record, failure)
        })
        .collect();
    let mut report = ScanReport::default();
    for (record, failure) in results {
        report.failures.extend(failure);
        report.records.push(record);
    }
    report
        .records
        .sort_by_key(|r| (r.q, r.d, r.j, r.i));
    Ok(report)
}

/// The classification violation recorded for `r`, if any.
pub fn scan_violation(gl: &GammaL1, r: &ScanRecord) -> Option<String> {
    let h = r.triple();
    let nonbasic = r.verdict == VerdictKind::NonBasic;
    let predicted = r.irreducible && gl.is_dihedral_shape(h);
    if nonbasic != predicted {
        return Some(format!(
            "q={} H={h}: verdict {} but dihedral-shape prediction {}",
            r.q, r.verdict, predicted
        ));
    }
    if nonbasic && !(r.irreducible && r.nilpotent) {
        return Some(format!("q={} H={h}: non-basic but not irreducible and nilpotent", r.q));
    }
    None
}

/// Outcome of the divisibility check for one nilpotent irreducible subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCheck {
    pub q: u32,
    pub h: Gl1Subgroup,
    pub largest_prime: u64,
    pub index: u64,
    pub verdict: VerdictKind,
}

impl IndexCheck {
    pub fn holds(&self) -> bool {
        self.index % self.largest_prime == 0 && self.verdict == VerdictKind::Basic
    }
}

/// For every nilpotent irreducible `H`, `q <= qmax`, whose order has a largest
/// prime `r > 2`: `r` divides `|H : ⟨H*⟩|` and the verdict is basic.
pub fn verify_index_divisibility(qmax: u32) -> Result<Vec<IndexCheck>> {
    let report = scan_dim1(2, qmax)?;
    Ok(report
        .records
        .iter()
        .filter(|r| r.irreducible && r.nilpotent)
        .filter_map(|r| {
            let largest = numth::factorize(r.order).ok()?.largest_prime()?;
            (largest > 2).then_some((r, largest))
        })
        .map(|(r, largest)| {
            let t = FieldTable::new(r.p, r.f).expect("scanned field");
            let gl = GammaL1::new(&t);
            let closure = gl.star_closure(r.triple());
            IndexCheck {
                q: r.q,
                h: r.triple(),
                largest_prime: largest,
                index: r.order / gl.order(closure),
                verdict: r.verdict,
            }
        })
        .collect())
}

/// `V ⋊ H` acting on the points of `F_q` (`0` is the zero vector, `e + 1` is `λ^e`),
/// with the set of translations.
pub fn build_affine_group(gl: &GammaL1, h: Gl1Subgroup, cap: usize) -> Result<(FiniteGroup, FixedBitSet)> {
    let t = gl.field();
    let q = t.q() as usize;
    let perm = |map: &dyn Fn(Elem) -> Elem| -> Vec<u32> {
        (0..q).map(|x| t.point_index(map(t.point(x))) as u32).collect()
    };
    let mut gens: Vec<Vec<u32>> = (0..t.f())
        .map(|k| perm(&|x| t.add(x, Elem::exp(k))))
        .collect();
    for g in gl.generators(h) {
        gens.push(perm(&|x| gl.apply(g, x)));
    }
    let identity: Vec<u32> = (0..q as u32).collect();
    let closure = groupengine::closure(&gens, identity, |a, b| compose_perms(a, b), cap)?;
    let group = FiniteGroup::from_closure(&closure, cap)?;
    let mut translations = FixedBitSet::with_capacity(group.order());
    for (idx, p) in closure.elements().iter().enumerate() {
        let shift = t.point(p[0] as usize);
        if (0..q).all(|x| p[x] as usize == t.point_index(t.add(t.point(x), shift))) {
            translations.insert(idx);
        }
    }
    Ok((group, translations))
}

/// The definition of (non-)basic evaluated directly on `V ⋊ H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub q: u32,
    pub h: Gl1Subgroup,
    pub group_order: usize,
    pub v_unique_minimal_normal: bool,
    pub v_abelian: bool,
    /// `γ(G/V)`, `None` when undefined or not computed.
    pub gamma_h: Option<usize>,
    pub gamma_g: Option<usize>,
    pub oracle: (VerdictKind, Option<Reason>),
    pub classified: (VerdictKind, Option<Reason>),
}

impl OracleOutcome {
    pub fn agrees(&self) -> bool {
        self.oracle == self.classified
    }
}

/// Brute-force evaluation of the definition; `Ok(None)` when `q · |H|` exceeds `cap`.
pub fn oracle_check(gl: &GammaL1, h: Gl1Subgroup, cap: usize) -> Result<Option<OracleOutcome>> {
    let q = gl.field().q();
    let size = q as u64 * gl.order(h);
    if size > cap as u64 {
        return Ok(None);
    }
    let verdict = classify(gl, h)?;
    let (g, v) = build_affine_group(gl, h, cap)?;
    if g.order() as u64 != size {
        return Err(Error::contract(format!(
            "affine group has order {} instead of {size}",
            g.order()
        )));
    }
    let minimal = g.minimal_normal_subgroups();
    let unique = minimal.len() == 1 && minimal[0] == v;
    let v_gens = g.generating_set(&v);
    let abelian = v_gens
        .iter()
        .all(|&a| v_gens.iter().all(|&b| g.mul(a, b) == g.mul(b, a)));
    let mut outcome = OracleOutcome {
        q,
        h,
        group_order: g.order(),
        v_unique_minimal_normal: unique,
        v_abelian: abelian,
        gamma_h: None,
        gamma_g: None,
        oracle: (VerdictKind::NotApplicable, Some(Reason::Reducible)),
        classified: (verdict.kind, verdict.reason),
    };
    if !(unique && abelian) {
        return Ok(Some(outcome));
    }
    if g.is_cyclic() {
        outcome.oracle = (VerdictKind::NotApplicable, Some(Reason::CyclicG));
        return Ok(Some(outcome));
    }
    let gamma_h = g.quotient(&v)?.group.normal_covering_number(2)?;
    outcome.gamma_h = gamma_h.value();
    if gamma_h.is_two() {
        outcome.oracle = (VerdictKind::NotApplicable, Some(Reason::GammaHEqualsTwo));
        return Ok(Some(outcome));
    }
    let gamma_g = g.normal_covering_number(2)?;
    outcome.gamma_g = gamma_g.value();
    outcome.oracle = match gamma_g {
        Gamma::Value { value: 2, .. } => (VerdictKind::Basic, None),
        _ => (VerdictKind::NonBasic, None),
    };
    Ok(Some(outcome))
}
