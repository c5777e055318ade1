//! Verification suites: each runs a family of checks and returns one record per check.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affine1::{self, ScanRecord};
use crate::error::{Error, Result};
use crate::ffield::{Elem, FieldTable};
use crate::gammal1::{GammaL1, Gl1Subgroup, SemilinearScalar};
use crate::groupengine::{self, small, FiniteGroup};
use crate::linalg::FpMatrix;
use crate::matgrp::{self, Caps, ExtensionEmbedding, GammaLd, MatrixVerdict, MonomialGen, SemilinearMatrix};
use crate::numth;
use crate::verdict::VerdictKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Thm11,
    Thm12,
    Thm39,
    Dim2,
    Dim3,
    Su3,
    Lemmas,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Thm11,
        Suite::Thm12,
        Suite::Thm39,
        Suite::Dim2,
        Suite::Dim3,
        Suite::Su3,
        Suite::Lemmas,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Thm11 => "thm11",
            Suite::Thm12 => "thm12",
            Suite::Thm39 => "thm39",
            Suite::Dim2 => "dim2",
            Suite::Dim3 => "dim3",
            Suite::Su3 => "su3",
            Suite::Lemmas => "lemmas",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown suite {s:?}")))
    }
}

/// One check and its outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: Suite,
    pub check: String,
    pub subject: String,
    pub verdict: Option<VerdictKind>,
    pub observed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Largest `q` for the dimension-1 scans.
    pub qmax: u32,
    /// Largest `q` for brute-force checks in dimension 1.
    pub oracle_qmax: u32,
    /// Largest `|V ⋊ H|` built as a permutation group.
    pub affine_order_cap: usize,
    pub caps: Caps,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            qmax: 729,
            oracle_qmax: 64,
            affine_order_cap: affine1::ORACLE_ORDER_CAP,
            caps: Caps::default(),
            seed: 0,
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    match suite {
        Suite::Thm11 => covering_corpus_suite(cfg),
        Suite::Thm12 => dihedral_scan_suite(cfg),
        Suite::Thm39 => index_suite(cfg),
        Suite::Dim2 => dim2_suite(cfg),
        Suite::Dim3 => dim3_suite(cfg),
        Suite::Su3 => su3_suite(cfg),
        Suite::Lemmas => lemma_suite(cfg),
    }
}

fn record(suite: Suite, check: &str, subject: String, observed: String, pass: bool) -> CheckRecord {
    CheckRecord {
        suite,
        check: check.to_string(),
        subject,
        verdict: None,
        observed,
        pass,
    }
}

fn subject(q: u32, h: Gl1Subgroup) -> String {
    format!("q={q} H={h}")
}

fn fields_up_to(qmin: u32, qmax: u32) -> Result<Vec<FieldTable>> {
    numth::prime_powers(qmin as u64, qmax as u64)
        .into_iter()
        .map(|(p, f)| FieldTable::new(p, f))
        .collect()
}

/// `H ≤ ΓL₁(q)` as an abstract group, with its elements in table order.
pub fn gl1_group(gl: &GammaL1, h: Gl1Subgroup, cap: usize) -> Result<(FiniteGroup, Vec<SemilinearScalar>)> {
    let c = groupengine::closure(
        &gl.generators(h),
        SemilinearScalar::IDENTITY,
        |a, b| gl.multiply(*a, *b).expect("elements of ΓL₁(q)"),
        cap,
    )?;
    Ok((FiniteGroup::from_closure(&c, cap)?, c.elements().to_vec()))
}

/// A named group of the covering-number corpus.
pub struct CorpusGroup {
    pub name: String,
    pub group: FiniteGroup,
}

/// Every subgroup of `ΓL₁(q)` for `q <= qmax`, every `V ⋊ H` from the same range of
/// order at most `affine_cap`, and `Q₈`, `D₈`, `Sym(3)`, `Alt(4)`, `Sym(4)`.
pub fn covering_corpus(qmax: u32, affine_cap: usize) -> Result<Vec<CorpusGroup>> {
    let mut out = vec![
        CorpusGroup { name: "Q8".into(), group: small::quaternion() },
        CorpusGroup { name: "D8".into(), group: small::dihedral(4) },
        CorpusGroup { name: "Sym(3)".into(), group: small::sym(3) },
        CorpusGroup { name: "Alt(4)".into(), group: small::alt4() },
        CorpusGroup { name: "Sym(4)".into(), group: small::sym(4) },
    ];
    for t in fields_up_to(2, qmax)? {
        let gl = GammaL1::new(&t);
        for h in gl.enumerate_subgroups() {
            let (g, _) = gl1_group(&gl, h, groupengine::DEFAULT_TABLE_CAP)?;
            out.push(CorpusGroup { name: format!("H {}", subject(t.q(), h)), group: g });
            if t.q() as u64 * gl.order(h) <= affine_cap as u64 {
                let (g, _) = affine1::build_affine_group(&gl, h, affine_cap)?;
                out.push(CorpusGroup { name: format!("V:H {}", subject(t.q(), h)), group: g });
            }
        }
    }
    Ok(out)
}

/// Supersolvable non-cyclic groups have `γ = 2` exactly when they are not nilpotent.
fn covering_corpus_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let corpus = covering_corpus(cfg.oracle_qmax, 2000)?;
    let results: Vec<Result<Vec<CheckRecord>>> = corpus
        .par_iter()
        .map(|c| {
            let g = &c.group;
            let nilpotent = g.is_nilpotent()?;
            let supersolvable = g.is_supersolvable()?;
            let mut out = vec![record(
                Suite::Thm11,
                "nilpotency-cross-check",
                c.name.clone(),
                format!("maximal-normal {nilpotent}"),
                nilpotent == g.is_nilpotent_by_sylow(),
            )];
            if g.order() <= 200 {
                out.push(record(
                    Suite::Thm11,
                    "supersolvability-cross-check",
                    c.name.clone(),
                    format!("prime-index {supersolvable}"),
                    supersolvable == g.is_supersolvable_by_chief_series()?,
                ));
            }
            if supersolvable && !g.is_cyclic() {
                let two = g.normal_covering_number(2)?.is_two();
                out.push(record(
                    Suite::Thm11,
                    "gamma-two-iff-not-nilpotent",
                    c.name.clone(),
                    format!("|G|={} nilpotent={nilpotent} gamma2={two}", g.order()),
                    two != nilpotent,
                ));
            }
            Ok(out)
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// `q = p²` with `p ≡ 3 (mod 4)` prime and `q <= qmax`.
pub fn dihedral_fields(qmax: u32) -> Vec<u32> {
    (3..)
        .take_while(|p| p * p <= qmax)
        .filter(|&p| p % 4 == 3 && numth::is_prime(p as u64))
        .map(|p| p * p)
        .collect()
}

fn scan_record_check(gl: &GammaL1, r: &ScanRecord) -> CheckRecord {
    let violation = affine1::scan_violation(gl, r);
    CheckRecord {
        suite: Suite::Thm12,
        check: "nonbasic-iff-dihedral-shape".into(),
        subject: subject(r.q, r.triple()),
        verdict: Some(r.verdict),
        observed: violation.clone().unwrap_or_else(|| {
            format!("{} by {}", r.reason.map_or("-", |x| x.as_str()), r.decided_by)
        }),
        pass: violation.is_none(),
    }
}

fn dihedral_scan_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let report = affine1::scan_dim1(2, cfg.qmax)?;
    let fields: HashMap<u32, FieldTable> = fields_up_to(2, cfg.qmax)?
        .into_iter()
        .map(|t| (t.q(), t))
        .collect();
    let mut out: Vec<CheckRecord> = report
        .records
        .iter()
        .map(|r| scan_record_check(&GammaL1::new(&fields[&r.q]), r))
        .collect();
    let found: BTreeSet<u32> = report.nonbasic().map(|r| r.q).collect();
    let expected: BTreeSet<u32> = dihedral_fields(cfg.qmax).into_iter().collect();
    out.push(record(
        Suite::Thm12,
        "nonbasic-fields",
        format!("q<={}", cfg.qmax),
        format!("{found:?}"),
        found == expected,
    ));
    let mut oracle = Vec::new();
    for t in fields_up_to(2, cfg.oracle_qmax)? {
        let gl = GammaL1::new(&t);
        for h in gl.enumerate_subgroups() {
            oracle.push((t.clone(), h));
        }
    }
    let checks: Vec<Result<Option<CheckRecord>>> = oracle
        .par_iter()
        .map(|(t, h)| {
            let gl = GammaL1::new(t);
            Ok(affine1::oracle_check(&gl, *h, cfg.affine_order_cap)?.map(|o| CheckRecord {
                suite: Suite::Thm12,
                check: "oracle-agreement".into(),
                subject: subject(o.q, o.h),
                verdict: Some(o.classified.0),
                observed: format!(
                    "oracle {} gamma(H)={:?} gamma(G)={:?}",
                    o.oracle.0, o.gamma_h, o.gamma_g
                ),
                pass: o.agrees(),
            }))
        })
        .collect();
    for c in checks {
        out.extend(c?);
    }
    Ok(out)
}

fn index_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    Ok(affine1::verify_index_divisibility(cfg.qmax)?
        .into_iter()
        .map(|c| CheckRecord {
            suite: Suite::Thm39,
            check: "largest-prime-divides-star-index".into(),
            subject: subject(c.q, c.h),
            verdict: Some(c.verdict),
            observed: format!("r={} index={}", c.largest_prime, c.index),
            pass: c.holds(),
        })
        .collect())
}

/// A named generating set for a matrix-group instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub gens: Vec<SemilinearMatrix>,
    /// The preimage when the instance is an extension-field image.
    pub preimage: Option<Gl1Subgroup>,
}

fn diag(exps: &[u32]) -> MonomialGen {
    MonomialGen::diagonal(exps)
}

/// Diagonal parts of the monomial instances: generating sets of diagonal subgroups.
fn diagonal_parts(n: u32, dim: usize) -> Vec<(String, Vec<MonomialGen>)> {
    let mut parts = vec![("1".to_string(), vec![])];
    for k in numth::divisors(n as u64).into_iter().map(|k| k as u32).filter(|&k| k < n) {
        let unit = |i: usize| {
            let mut e = vec![0; dim];
            e[i] = k;
            diag(&e)
        };
        parts.push((format!("D({k})"), (0..dim).map(unit).collect()));
        parts.push((format!("Z({k})"), vec![diag(&vec![k; dim])]));
        parts.push((format!("L({k})"), vec![unit(0)]));
        let mut anti = vec![0; dim];
        anti[0] = k;
        anti[1] = (n - k) % n;
        parts.push((format!("A({k})"), vec![diag(&anti)]));
    }
    parts
}

fn monomial_instances(t: &FieldTable, dim: usize) -> Result<Vec<Instance>> {
    let ctx = GammaLd::new(t, dim)?;
    let n = t.order();
    let perm_parts: Vec<(&str, Vec<MonomialGen>)> = if dim == 2 {
        let mut v = vec![
            ("", vec![]),
            ("ι", vec![MonomialGen::permutation(&[1, 0])]),
            ("ιλ", vec![MonomialGen { diag: vec![0, 1], perm: vec![1, 0], s: 0 }]),
        ];
        if n % 2 == 0 {
            v.push(("ι(-1)", vec![MonomialGen { diag: vec![0, n / 2], perm: vec![1, 0], s: 0 }]));
        }
        v
    } else {
        vec![
            ("", vec![]),
            ("ι3", vec![MonomialGen::permutation(&[1, 2, 0])]),
            ("ι2", vec![MonomialGen::permutation(&[1, 0, 2])]),
            ("ι3ι2", vec![MonomialGen::permutation(&[1, 2, 0]), MonomialGen::permutation(&[1, 0, 2])]),
        ]
    };
    let mut frob_parts = vec![("", vec![])];
    if t.f() > 1 {
        frob_parts.push(("σ", vec![MonomialGen::frobenius(dim, 1)]));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (dn, dg) in diagonal_parts(n, dim) {
        for (pn, pg) in &perm_parts {
            for (fname, fg) in &frob_parts {
                let specs: Vec<MonomialGen> = dg.iter().chain(pg).chain(fg).cloned().collect();
                let gens = matgrp::monomial_subgroup(&ctx, &specs)?;
                let mut key = ctx.closure(&gens, groupengine::DEFAULT_CLOSURE_CAP)?.elements().to_vec();
                key.sort_unstable();
                if seen.insert(key) {
                    out.push(Instance {
                        name: format!("q={} <{dn}{pn}{fname}>", t.q()),
                        gens,
                        preimage: None,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn extension_instances(small: &FieldTable, big: &FieldTable) -> Result<Vec<Instance>> {
    let emb = ExtensionEmbedding::new(small, big)?;
    let gl = GammaL1::new(big);
    Ok(gl
        .enumerate_subgroups()
        .into_iter()
        .map(|h| Instance {
            name: format!("ΓL1({}) {h}", big.q()),
            gens: gl.generators(h).into_iter().map(|g| emb.image(g)).collect(),
            preimage: Some(h),
        })
        .collect())
}

fn describe(v: &MatrixVerdict) -> String {
    let mut s = format!("|H|={}", v.order);
    if let Some(r) = v.reason {
        s.push_str(&format!(" {r}"));
    }
    if let Some(k) = v.star_size {
        s.push_str(&format!(" |H*|={k}"));
    }
    if let Some(w) = v.witness_order {
        s.push_str(&format!(" witness-order={w}"));
    }
    if let Some(p) = &v.partial {
        s.push_str(&format!(" partial={p}"));
    }
    s
}

/// Classifies every instance and checks `conclusion` on non-basic verdicts; extension
/// images must also agree with the dimension-1 classification of their preimage.
fn run_instances(
    suite: Suite,
    ctx: &GammaLd,
    big: Option<&FieldTable>,
    instances: &[Instance],
    caps: Caps,
    conclusion: &(dyn Fn(&Instance, &MatrixVerdict) -> Result<bool> + Sync),
    check: &str,
) -> Result<Vec<CheckRecord>> {
    let results: Vec<Result<Vec<CheckRecord>>> = instances
        .par_iter()
        .map(|inst| {
            let v = matgrp::classify_matrix_group(ctx, &inst.gens, caps)?;
            let ok = v.kind != Some(VerdictKind::NonBasic) || conclusion(inst, &v)?;
            let mut out = vec![CheckRecord {
                suite,
                check: check.to_string(),
                subject: inst.name.clone(),
                verdict: v.kind,
                observed: describe(&v),
                pass: ok,
            }];
            if let (Some(h), Some(big)) = (inst.preimage, big) {
                let expected = affine1::classify(&GammaL1::new(big), h)?.kind;
                out.push(record(
                    suite,
                    "embedding-agrees-with-dimension-1",
                    inst.name.clone(),
                    format!("matrix {:?} scalar {expected}", v.kind),
                    v.kind == Some(expected),
                ));
            }
            Ok(out)
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

fn two_group_conclusion(f: u32) -> impl Fn(&Instance, &MatrixVerdict) -> Result<bool> + Sync {
    move |_, v| Ok(f.is_power_of_two() && v.order.is_power_of_two())
}

fn dim2_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (p, f) in [(2, 2), (3, 2)] {
        let t = FieldTable::new(p, f)?;
        let big = FieldTable::new(p, 2 * f)?;
        let ctx = GammaLd::new(&t, 2)?;
        let check = "nonbasic-implies-2-group";
        let concl = two_group_conclusion(t.f());
        out.extend(run_instances(Suite::Dim2, &ctx, None, &monomial_instances(&t, 2)?, cfg.caps, &concl, check)?);
        out.extend(run_instances(
            Suite::Dim2,
            &ctx,
            Some(&big),
            &extension_instances(&t, &big)?,
            cfg.caps,
            &concl,
            check,
        )?);
    }
    Ok(out)
}

/// `H` is a `{2,3}`-group, or `f` is even and `H` normalizes a copy of `SU₃(√q)`
/// in the standard form.
fn dim3_conclusion(ctx: &GammaLd, inst: &Instance, v: &MatrixVerdict, cap: usize) -> Result<bool> {
    if matgrp::is_23_number(v.order as u64) {
        return Ok(true);
    }
    if ctx.field().f() % 2 != 0 {
        return Ok(false);
    }
    Ok(matgrp::has_normal_su3(ctx, &ctx.closure(&inst.gens, cap)?))
}

fn dim3_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let t = FieldTable::new(2, 2)?;
    let big = FieldTable::new(2, 6)?;
    let ctx = GammaLd::new(&t, 3)?;
    let check = "nonbasic-implies-23-group-or-su3";
    let cap = cfg.caps.closure;
    let concl = |inst: &Instance, v: &MatrixVerdict| dim3_conclusion(&ctx, inst, v, cap);
    let mut out = run_instances(Suite::Dim3, &ctx, None, &monomial_instances(&t, 3)?, cfg.caps, &concl, check)?;
    out.extend(run_instances(
        Suite::Dim3,
        &ctx,
        Some(&big),
        &extension_instances(&t, &big)?,
        cfg.caps,
        &concl,
        check,
    )?);
    let su3 = Instance {
        name: "SU3(2)".into(),
        gens: matgrp::su3_generators(&ctx, 2)?,
        preimage: None,
    };
    out.extend(run_instances(Suite::Dim3, &ctx, None, &[su3], cfg.caps, &concl, check)?);

    let t16 = FieldTable::new(2, 4)?;
    let ctx16 = GammaLd::new(&t16, 3)?;
    let gens = matgrp::su3_generators(&ctx16, 4)?;
    let v = matgrp::classify_matrix_group(&ctx16, &gens, cfg.caps)?;
    let normal = matgrp::has_normal_su3(&ctx16, &ctx16.closure(&gens, cap)?);
    out.push(CheckRecord {
        suite: Suite::Dim3,
        check: check.into(),
        subject: "SU3(4)".into(),
        verdict: v.kind,
        observed: format!("{} normal-SU3={normal}", describe(&v)),
        pass: v.kind != Some(VerdictKind::NonBasic) || normal,
    });
    Ok(out)
}

fn su3_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let mut out = su3_records(2, cfg.caps.closure)?;
    out.extend(su3_records(4, cfg.caps.closure)?);
    Ok(out)
}

/// The structural checks on `SU₃(q0)`, one record each.
pub fn su3_records(q0: u32, cap: usize) -> Result<Vec<CheckRecord>> {
    let r = matgrp::su3_checks(q0, cap)?;
    let n = q0 as usize;
    let subject = format!("SU3({q0})");
    let mut out = Vec::new();
    let mut push = |check: &str, observed: String, pass: bool| {
        out.push(record(Suite::Su3, check, subject.clone(), observed, pass))
    };
    push("order", r.order.to_string(), r.order as u64 == matgrp::su3_order(q0 as u64));
    push(
        "orbit-count",
        format!("{:?}", r.orbit_sizes),
        r.orbit_sizes.len() == n + 1 && r.orbit_sizes.iter().sum::<usize>() == n.pow(6),
    );
    push("stabilizer-e1", r.stab_e1.to_string(), r.stab_e1 == n.pow(3));
    push("stabilizer-e2", r.stab_e2.to_string(), r.stab_e2 == n * (n * n - 1));
    push("star-generates", format!("|H*|={}", r.star_size), r.star_generates);
    push("unipotent-j3", r.has_unipotent_j3.to_string(), r.has_unipotent_j3);
    push("unipotent-j1-j2", r.has_unipotent_j1_j2.to_string(), r.has_unipotent_j1_j2);
    push("order-q0-plus-1", r.has_order_q0_plus_1.to_string(), r.has_order_q0_plus_1);
    push("order-q0-minus-1", r.has_order_q0_minus_1.to_string(), r.has_order_q0_minus_1);
    push("irreducible", r.irreducible.to_string(), r.irreducible);
    Ok(out)
}

/// `n / 2^{v₂(n)}`.
fn odd(n: u64) -> u64 {
    numth::odd_part(n)
}

fn lemma_scan_checks(records: &[ScanRecord]) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for r in records {
        let (p, f, q) = (r.p as u64, r.f as u64, r.q as u64);
        let h = r.triple();
        let (d, j, i) = (h.d as u64, h.j as u64, h.i as u64);
        let pj = p.pow(j as u32);
        let n = (q - 1) / d;
        let fj = f / j;
        let subj = subject(r.q, h);
        if r.star_generates {
            out.push(record(
                Suite::Lemmas,
                "star-generated-divisibility",
                subj.clone(),
                format!("p^j-1={} d={d} i={i}", pj - 1),
                d % (pj - 1) == 0 && i % (pj - 1) == 0,
            ));
        }
        if !r.nilpotent {
            continue;
        }
        let star_index = if r.star_generates {
            1
        } else {
            let t = FieldTable::new(r.p, r.f).expect("scanned field");
            let gl = GammaL1::new(&t);
            r.order / gl.order(gl.star_closure(h))
        };
        let missing: Vec<u64> = numth::prime_set(n)
            .into_iter()
            .filter(|&s| fj % s != 0 && star_index % s != 0)
            .collect();
        out.push(record(
            Suite::Lemmas,
            "coprime-primes-divide-star-index",
            subj.clone(),
            format!("index={star_index} missing={missing:?}"),
            missing.is_empty(),
        ));
        if !r.star_generates {
            continue;
        }
        let exceptional = p != 2 && pj % 4 == 3 && fj % 2 == 0;
        let pass = if exceptional {
            // n divides (f/j) 2^{v₂(p^j+1) - v₂(d)}, an exponent that may be negative.
            let e = numth::v_r(2, pj + 1).expect("positive") as i64 - numth::v_r(2, d).expect("positive") as i64;
            let lhs = n << (-e).max(0);
            let rhs = fj << e.max(0);
            rhs % lhs == 0
        } else {
            fj % n == 0
        };
        out.push(record(
            Suite::Lemmas,
            "order-of-quotient-divides-degree",
            subj.clone(),
            format!("(q-1)/d={n} f/j={fj} exceptional={exceptional}"),
            pass,
        ));
        out.push(record(
            Suite::Lemmas,
            "odd-part-divides-degree",
            subj,
            format!("odd((q-1)/d)={} f/j={fj}", odd(n)),
            fj % odd(n) == 0,
        ));
    }
    out
}

/// Random `(r, x, n)` with `r | x`, checked by modular exponentiation.
pub fn binomial_instances(count: usize, seed: u64) -> Vec<(u64, u64, u64)> {
    let primes: Vec<u64> = (2..60).filter(|&r| numth::is_prime(r)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = primes[rng.gen_range(0..primes.len())];
            // Favor r = 2 with v₂(x) = 1, where the congruence changes shape.
            let x = if r == 2 && rng.gen_bool(0.5) {
                2 * (2 * rng.gen_range(0..500u64) + 1)
            } else {
                r * rng.gen_range(1..=1000u64)
            };
            (r, x, rng.gen_range(1..=5000u64))
        })
        .collect()
}

fn binomial_checks(cfg: &SuiteConfig) -> Vec<CheckRecord> {
    binomial_instances(1000, cfg.seed)
        .into_iter()
        .map(|(r, x, n)| {
            let subj = format!("r={r} x={x} n={n}");
            match numth::lift_congruence(r, x, n) {
                Ok(c) => {
                    let direct = numth::pow_mod((1 + x) % c.modulus, n, c.modulus);
                    record(
                        Suite::Lemmas,
                        "binomial-lifting",
                        subj,
                        format!("{} mod {}", c.residue, c.modulus),
                        direct == c.residue % c.modulus,
                    )
                }
                Err(e) => record(Suite::Lemmas, "binomial-lifting", subj, e.to_string(), false),
            }
        })
        .collect()
}

/// A pair `J ⊴ H ≤ ΓL₁(q)` with `H` irreducible and `H/J` abelian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulePair {
    pub q: u32,
    pub h: Gl1Subgroup,
    pub j: Gl1Subgroup,
}

fn normal_with_abelian_quotient(gl: &GammaL1, h: Gl1Subgroup, j: Gl1Subgroup) -> bool {
    if !gl.is_subgroup_of(j, h) {
        return false;
    }
    let gens = gl.generators(h);
    let conj_ok = gens
        .iter()
        .all(|&g| gl.generators(j).into_iter().all(|x| gl.contains(j, gl.conjugate(x, g))));
    let comm_ok = gens.iter().all(|&a| {
        gens.iter().all(|&b| {
            let ab = gl.multiply(a, b).expect("in ΓL₁");
            let ba = gl.multiply(b, a).expect("in ΓL₁");
            gl.contains(j, gl.multiply(gl.inverse(ba), ab).expect("in ΓL₁"))
        })
    });
    conj_ok && comm_ok
}

/// All pairs for `q <= qmax`; with `contains_scalars`, only those with `J ⊇ H ∩ ⟨λ⟩`.
pub fn module_pairs(qmax: u32, contains_scalars: bool) -> Result<Vec<ModulePair>> {
    let mut out = Vec::new();
    for t in fields_up_to(2, qmax)? {
        let gl = GammaL1::new(&t);
        let subs = gl.enumerate_subgroups();
        for &h in subs.iter().filter(|&&h| gl.is_irreducible(h)) {
            let scalars = Gl1Subgroup::new(h.d, t.f(), 0);
            for &j in &subs {
                if (!contains_scalars || gl.is_subgroup_of(scalars, j)) && normal_with_abelian_quotient(&gl, h, j) {
                    out.push(ModulePair { q: t.q(), h, j });
                }
            }
        }
    }
    Ok(out)
}

/// `dim V`, the least dimension of an irreducible `F_p J`-submodule, and `|H : J|`.
pub fn module_ratio(pair: &ModulePair) -> Result<groupengine::DimRatio> {
    let (p, f) = numth::factorize(pair.q as u64)?.factors()[0];
    let t = FieldTable::new(p as u32, f)?;
    let gl = GammaL1::new(&t);
    let ctx = GammaLd::new(&t, 1)?;
    let (g, elems) = gl1_group(&gl, pair.h, groupengine::DEFAULT_TABLE_CAP)?;
    let rep: Vec<FpMatrix> = elems
        .iter()
        .map(|x| {
            ctx.from_rows(&[vec![Elem::exp(x.a)]], x.s)
                .map(|m| ctx.fp_linearize(&m))
        })
        .collect::<Result<_>>()?;
    let mut j = fixedbitset::FixedBitSet::with_capacity(elems.len());
    for (k, x) in elems.iter().enumerate() {
        if gl.contains(pair.j, *x) {
            j.insert(k);
        }
    }
    g.module_dim_divisibility(p as u32, &rep, &j)
}

/// Up to `count` pairs sampled without replacement, in a fixed order for a given seed.
pub fn sample_pairs(mut pairs: Vec<ModulePair>, count: usize, seed: u64) -> Vec<ModulePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = count.min(pairs.len());
    for i in 0..k {
        let r = rng.gen_range(i..pairs.len());
        pairs.swap(i, r);
    }
    pairs.truncate(k);
    pairs.sort_by_key(|x| (x.q, x.h, x.j));
    pairs
}

fn module_checks(cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (check, restricted) in [("module-dimension-ratio", false), ("module-dimension-ratio-scalar-kernel", true)] {
        let pairs = sample_pairs(module_pairs(cfg.oracle_qmax, restricted)?, 100, cfg.seed);
        for pair in pairs {
            let r = module_ratio(&pair)?;
            out.push(record(
                Suite::Lemmas,
                check,
                format!("{} J={}", subject(pair.q, pair.h), pair.j),
                format!("dimV={} dimW={} index={}", r.dim_v, r.dim_w, r.index),
                r.holds(),
            ));
        }
    }
    Ok(out)
}

fn lemma_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let report = affine1::scan_dim1(2, cfg.qmax)?;
    let mut out = lemma_scan_checks(&report.records);
    for t in fields_up_to(2, cfg.oracle_qmax)? {
        let gl = GammaL1::new(&t);
        for h in gl.enumerate_subgroups() {
            let (g, _) = gl1_group(&gl, h, groupengine::DEFAULT_TABLE_CAP)?;
            let fast = gl.is_nilpotent_fast(h);
            out.push(record(
                Suite::Lemmas,
                "nilpotency-by-prime-sets",
                subject(t.q(), h),
                format!("arithmetic {fast}"),
                fast == g.is_nilpotent_by_sylow(),
            ));
        }
    }
    out.extend(binomial_checks(cfg));
    out.extend(module_checks(cfg)?);
    Ok(out)
}
