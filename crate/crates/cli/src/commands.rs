use std::fmt;
use std::fs;
use std::process::ExitCode;

use serde::Serialize;

use ncover::affine1::{self, ORACLE_ORDER_CAP};
use ncover::ffield::FieldTable;
use ncover::gammal1::{GammaL1, Gl1Subgroup};
use ncover::groupengine::{self, FiniteGroup, Gamma};
use ncover::matgrp::{self, Caps, GammaLd, MatrixVerdict};
use ncover::numth;
use ncover::report::{Format, Report, ScanRow};
use ncover::suites::{self, Suite, SuiteConfig};
use ncover::verdict::{DecidedBy, Reason, VerdictKind};

use crate::{Cli, Command, GammaTarget, OutputFormat, SuiteArg, Target};

#[derive(Debug)]
pub enum Failure {
    Lib(ncover::Error),
    Usage(String),
    /// A re-checked assertion that no longer holds.
    Assertion(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Lib(_) | Failure::Usage(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Usage(msg) | Failure::Assertion(msg) => f.write_str(msg),
        }
    }
}

impl From<ncover::Error> for Failure {
    fn from(e: ncover::Error) -> Self {
        Failure::Lib(e)
    }
}

type Result<T> = std::result::Result<T, Failure>;

struct Settings {
    caps: Caps,
    affine_cap: usize,
    seed: u64,
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let opts = &cli.opts;
    if let Some(n) = opts.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    let settings = Settings {
        caps: Caps {
            closure: opts.cap.map_or(groupengine::DEFAULT_CLOSURE_CAP, |c| c as usize),
            lattice: opts.lattice_cap.map_or(groupengine::DEFAULT_LATTICE_CAP, |c| c as usize),
        },
        affine_cap: opts.cap.map_or(ORACLE_ORDER_CAP, |c| c as usize),
        seed: opts.seed,
    };
    let config = serde_json::to_value(cli).map_err(|e| Failure::Usage(e.to_string()))?;
    let timestamp = (!opts.deterministic)
        .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    let default = match cli.command {
        Command::Field { .. } => OutputFormat::Table,
        _ => OutputFormat::Json,
    };
    let format = match opts.format.unwrap_or(default) {
        OutputFormat::Table => Format::Table,
        OutputFormat::Json => Format::Json,
        OutputFormat::Csv => Format::Csv,
    };
    let report = |records: &dyn ErasedRecords| records.report(config.clone(), timestamp.clone());
    let report = match &cli.command {
        Command::Scan { dim, qmin, qmax } => report(&scan(*dim, *qmin, *qmax)?)?,
        Command::Check(target) => match &target.gens {
            None => report(&vec![check_triple(target)?])?,
            Some(_) => report(&vec![check_gens(target, &settings)?])?,
        },
        Command::Gamma(target) => match &target.target.gens {
            None => report(&vec![gamma_triple(&target.target, &settings)?])?,
            Some(_) => report(&vec![gamma_gens(target, &settings)?])?,
        },
        Command::Verify {
            suite,
            qmax,
            oracle_qmax,
        } => {
            let defaults = SuiteConfig::default();
            let cfg = SuiteConfig {
                qmax: qmax.unwrap_or(defaults.qmax),
                oracle_qmax: oracle_qmax.unwrap_or(defaults.oracle_qmax),
                affine_order_cap: settings.affine_cap,
                caps: settings.caps,
                seed: settings.seed,
            };
            report(&suites::run_suite(suite_of(*suite), &cfg)?)?
        }
        Command::Recheck { report: path } => report(&recheck(path)?)?,
        Command::Su3 { q0 } => report(&suites::su3_records(*q0, settings.caps.closure)?)?,
        Command::Field { p, f } => {
            let t = FieldTable::new(*p, *f)?;
            if format == Format::Table {
                let text = format!(
                    "p={}\nf={}\nq={}\nmodulus={}\n{}",
                    t.p(),
                    t.f(),
                    t.q(),
                    t.modulus_string(),
                    t.exp_table_csv()
                );
                write_output(opts.output.as_deref(), &text)?;
                return Ok(ExitCode::SUCCESS);
            }
            report(&field_rows(&t))?
        }
    };
    write_output(opts.output.as_deref(), &report.render(format)?)?;
    Ok(if report.summary.failures > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

/// Lets the command arms hand back different record types.
trait ErasedRecords {
    fn report(&self, config: serde_json::Value, timestamp: Option<String>) -> Result<Report>;
}

impl<T: Serialize> ErasedRecords for Vec<T> {
    fn report(&self, config: serde_json::Value, timestamp: Option<String>) -> Result<Report> {
        Ok(Report::new(config, timestamp, self)?)
    }
}

fn write_output(path: Option<&std::path::Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn suite_of(s: SuiteArg) -> Suite {
    match s {
        SuiteArg::Thm11 => Suite::Thm11,
        SuiteArg::Thm12 => Suite::Thm12,
        SuiteArg::Thm39 => Suite::Thm39,
        SuiteArg::Dim2 => Suite::Dim2,
        SuiteArg::Dim3 => Suite::Dim3,
        SuiteArg::Su3 => Suite::Su3,
        SuiteArg::Lemmas => Suite::Lemmas,
    }
}

fn field_of(q: u32) -> Result<FieldTable> {
    let fact = numth::factorize(q as u64)?;
    match fact.factors() {
        [(p, f)] => Ok(FieldTable::new(*p as u32, *f)?),
        _ => Err(Failure::Usage(format!("q = {q} is not a prime power"))),
    }
}

fn scan(dim: u32, qmin: u32, qmax: u32) -> Result<Vec<ScanRow>> {
    if dim != 1 {
        return Err(Failure::Usage(
            "scan covers dimension 1; dimensions 2 and 3 run as `verify --suite dim2` or `--suite dim3`".into(),
        ));
    }
    if qmin > qmax {
        return Err(Failure::Usage(format!("--qmin {qmin} exceeds --qmax {qmax}")));
    }
    let report = affine1::scan_dim1(qmin, qmax)?;
    let mut fields = std::collections::HashMap::new();
    report
        .records
        .into_iter()
        .map(|record| {
            let t = match fields.entry(record.q) {
                std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::hash_map::Entry::Vacant(e) => e.insert(FieldTable::new(record.p, record.f)?),
            };
            let gl = GammaL1::new(t);
            let pass = affine1::scan_violation(&gl, &record).is_none();
            Ok(ScanRow { record, pass })
        })
        .collect()
}

fn triple(target: &Target, gl: &GammaL1) -> Result<Gl1Subgroup> {
    let (Some(d), Some(j), Some(i)) = (target.d, target.j, target.i) else {
        return Err(Failure::Usage("--d, --j and --i are required without --gens".into()));
    };
    let h = Gl1Subgroup::new(d, j, i);
    if !gl.enumerate_subgroups().contains(&h) {
        return Err(Failure::Usage(format!(
            "{h} is not a canonical subgroup triple of ΓL₁({})",
            target.q
        )));
    }
    Ok(h)
}

fn check_triple(target: &Target) -> Result<ScanRow> {
    let t = field_of(target.q)?;
    let gl = GammaL1::new(&t);
    let h = triple(target, &gl)?;
    let record = affine1::analyze(&gl, h);
    let pass = affine1::scan_violation(&gl, &record).is_none();
    Ok(ScanRow { record, pass })
}

fn read_gens(target: &Target, t: &FieldTable) -> Result<Vec<matgrp::SemilinearMatrix>> {
    let path = target.gens.as_ref().expect("called with --gens");
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(matgrp::parse_generator_spec(&text, t)?)
}

#[derive(Debug, Serialize)]
struct MatrixRow {
    q: u32,
    dim: usize,
    generators: usize,
    order: usize,
    verdict: Option<VerdictKind>,
    reason: Option<Reason>,
    star_size: Option<usize>,
    star_generates: Option<bool>,
    witness_order: Option<usize>,
    decided_by: DecidedBy,
    partial: Option<String>,
    /// The dimension-specific conclusion for non-basic verdicts.
    pass: bool,
}

fn check_gens(target: &Target, s: &Settings) -> Result<MatrixRow> {
    let t = field_of(target.q)?;
    let gens = read_gens(target, &t)?;
    let ctx = GammaLd::new(&t, gens[0].dim())?;
    let v: MatrixVerdict = matgrp::classify_matrix_group(&ctx, &gens, s.caps)?;
    if v.kind.is_none() {
        eprintln!(
            "warning: |H| = {} exceeds the lattice cap {}; verdict undetermined",
            v.order, s.caps.lattice
        );
    }
    let pass = if v.kind != Some(VerdictKind::NonBasic) {
        true
    } else {
        match ctx.dim() {
            2 => t.f().is_power_of_two() && v.order.is_power_of_two(),
            3 => {
                matgrp::is_23_number(v.order as u64)
                    || (t.f() % 2 == 0 && matgrp::has_normal_su3(&ctx, &ctx.closure(&gens, s.caps.closure)?))
            }
            _ => true,
        }
    };
    Ok(MatrixRow {
        q: t.q(),
        dim: ctx.dim(),
        generators: gens.len(),
        order: v.order,
        verdict: v.kind,
        reason: v.reason,
        star_size: v.star_size,
        star_generates: v.star_generates,
        witness_order: v.witness_order,
        decided_by: v.decided_by,
        partial: v.partial,
        pass,
    })
}

#[derive(Debug, Serialize)]
struct OracleRow {
    q: u32,
    h: Gl1Subgroup,
    group_order: usize,
    v_unique_minimal_normal: bool,
    v_abelian: bool,
    gamma_h: Option<usize>,
    gamma_g: Option<usize>,
    oracle_verdict: VerdictKind,
    oracle_reason: Option<Reason>,
    verdict: VerdictKind,
    reason: Option<Reason>,
    pass: bool,
}

fn gamma_triple(target: &Target, s: &Settings) -> Result<OracleRow> {
    let t = field_of(target.q)?;
    let gl = GammaL1::new(&t);
    let h = triple(target, &gl)?;
    let Some(o) = affine1::oracle_check(&gl, h, s.affine_cap)? else {
        return Err(Failure::Usage(format!(
            "|V ⋊ H| = {} exceeds the cap of {} (raise --cap or NCOVER_CAP)",
            t.q() as u64 * gl.order(h),
            s.affine_cap
        )));
    };
    Ok(OracleRow {
        q: o.q,
        h: o.h,
        group_order: o.group_order,
        v_unique_minimal_normal: o.v_unique_minimal_normal,
        v_abelian: o.v_abelian,
        gamma_h: o.gamma_h,
        gamma_g: o.gamma_g,
        oracle_verdict: o.oracle.0,
        oracle_reason: o.oracle.1,
        verdict: o.classified.0,
        reason: o.classified.1,
        pass: o.agrees(),
    })
}

#[derive(Debug, Serialize)]
struct GammaRow {
    q: u32,
    dim: usize,
    order: usize,
    gamma: String,
}

fn gamma_gens(target: &GammaTarget, s: &Settings) -> Result<GammaRow> {
    let t = field_of(target.target.q)?;
    let gens = read_gens(&target.target, &t)?;
    let ctx = GammaLd::new(&t, gens[0].dim())?;
    let c = ctx.closure(&gens, s.caps.closure)?;
    let g = FiniteGroup::from_closure(&c, s.caps.lattice)?;
    let gamma = match g.normal_covering_number(target.kmax)? {
        Gamma::Value { value, .. } => value.to_string(),
        Gamma::Exceeds(k) => format!(">{k}"),
        Gamma::UndefinedCyclic => "undefined-cyclic".into(),
    };
    Ok(GammaRow {
        q: t.q(),
        dim: ctx.dim(),
        order: g.order(),
        gamma,
    })
}

#[derive(Debug, Serialize)]
struct FieldRow {
    exponent: u32,
    coefficients: Vec<u32>,
}

fn field_rows(t: &FieldTable) -> Vec<FieldRow> {
    (0..t.order())
        .map(|e| FieldRow {
            exponent: e,
            coefficients: t.to_vector(ncover::ffield::Elem::exp(e)),
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct RecheckRow {
    record: usize,
    q: u32,
    h: Gl1Subgroup,
    stored: VerdictKind,
    verdict: VerdictKind,
    /// Fields whose stored value differs from the recomputed record.
    differs: Vec<String>,
    pass: bool,
}

fn recheck(path: &std::path::Path) -> Result<Vec<RecheckRow>> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let report = ncover::report::parse_report_json(&text)?;
    let mut fields: std::collections::HashMap<u32, FieldTable> = std::collections::HashMap::new();
    let mut rows = Vec::new();
    for (k, value) in report.records.iter().enumerate() {
        let row: ScanRow = serde_json::from_value(value.clone())
            .map_err(|e| Failure::Usage(format!("record {k} is not a dimension-1 record: {e}")))?;
        let stored = row.record;
        let t = match fields.entry(stored.q) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(field_of(stored.q)?),
        };
        let gl = GammaL1::new(t);
        let h = stored.triple();
        if (t.p(), t.f()) != (stored.p, stored.f) || !gl.enumerate_subgroups().contains(&h) {
            return Err(Failure::Usage(format!("record {k}: {h} is not a subgroup triple of ΓL₁({})", stored.q)));
        }
        let fresh = affine1::analyze(&gl, h);
        let (a, b) = (
            serde_json::to_value(&stored).expect("records serialize"),
            serde_json::to_value(&fresh).expect("records serialize"),
        );
        let differs: Vec<String> = b
            .as_object()
            .expect("records are objects")
            .iter()
            .filter(|(key, v)| a.get(key.as_str()) != Some(v))
            .map(|(key, _)| key.clone())
            .collect();
        let check_ok = affine1::scan_violation(&gl, &fresh).is_none();
        rows.push(RecheckRow {
            record: k,
            q: stored.q,
            h,
            stored: stored.verdict,
            verdict: fresh.verdict,
            pass: differs.is_empty() && row.pass == check_ok,
            differs,
        });
    }
    if !report.summary_consistent() {
        return Err(Failure::Assertion(format!(
            "stored summary {:?} does not match the records ({:?})",
            report.summary,
            ncover::report::summarize(&report.records)
        )));
    }
    Ok(rows)
}
