use proptest::prelude::*;
use serde_json::json;

use ncover::affine1;
use ncover::ffield::{Elem, FieldTable};
use ncover::gammal1::GammaL1;
use ncover::matgrp::{self, GammaLd, SemilinearMatrix};
use ncover::numth;
use ncover::report::{self, Format, Report, ScanRow};

const FIELDS: [(u32, u32); 7] = [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3), (5, 2), (2, 4)];

fn entry(t: &FieldTable, code: u32) -> Elem {
    if code % (t.q()) == 0 {
        Elem::ZERO
    } else {
        Elem::exp(code % t.order())
    }
}

fn matrix(ctx: &GammaLd, codes: &[u32], s: u32) -> Option<SemilinearMatrix> {
    let d = ctx.dim();
    let rows: Vec<Vec<Elem>> = (0..d)
        .map(|r| (0..d).map(|c| entry(ctx.field(), codes[r * d + c])).collect())
        .collect();
    ctx.from_rows(&rows, s % ctx.field().f()).ok()
}

proptest! {
    #[test]
    fn linearization_is_multiplicative(
        field in 0..FIELDS.len(),
        dim in 1usize..=3,
        a in prop::collection::vec(0u32..10_000, 9),
        b in prop::collection::vec(0u32..10_000, 9),
        sa in 0u32..8,
        sb in 0u32..8,
    ) {
        let (p, f) = FIELDS[field];
        let t = FieldTable::new(p, f).unwrap();
        let ctx = GammaLd::new(&t, dim).unwrap();
        let (Some(x), Some(y)) = (matrix(&ctx, &a, sa), matrix(&ctx, &b, sb)) else {
            return Ok(());
        };
        prop_assert_eq!(ctx.fp_linearize(&ctx.mul(&x, &y)), ctx.fp_linearize(&x).mul(&ctx.fp_linearize(&y)));
        // The action on vectors agrees with the linearized action.
        for k in [1usize, 7, 19] {
            let k = k % ctx.vector_count();
            let v = ctx.vector(k);
            let image = ctx.apply(&x, &v[..dim]);
            let flat: Vec<u32> = v[..dim].iter().flat_map(|&e| t.to_vector(e)).collect();
            let expect: Vec<u32> = image[..dim].iter().flat_map(|&e| t.to_vector(e)).collect();
            prop_assert_eq!(ctx.fp_linearize(&x).apply(&flat), expect);
        }
    }

    #[test]
    fn generator_spec_round_trips(
        field in 0..FIELDS.len(),
        dim in 1usize..=3,
        gens in prop::collection::vec((prop::collection::vec(0u32..10_000, 9), 0u32..8), 1..5),
    ) {
        let (p, f) = FIELDS[field];
        let t = FieldTable::new(p, f).unwrap();
        let ctx = GammaLd::new(&t, dim).unwrap();
        let gens: Vec<SemilinearMatrix> = gens.iter().filter_map(|(c, s)| matrix(&ctx, c, *s)).collect();
        prop_assume!(!gens.is_empty());
        let text = matgrp::format_generator_spec(&gens);
        prop_assert_eq!(matgrp::parse_generator_spec(&text, &t).unwrap(), gens);
    }

    #[test]
    fn verdicts_are_invariant_under_lambda_conjugation(q_index in 0usize..40, pick in any::<prop::sample::Index>(), t in 0i64..1000) {
        let (p, f) = numth::prime_powers(2, 128)[q_index % 40];
        let table = FieldTable::new(p, f).unwrap();
        let gl = GammaL1::new(&table);
        let subs = gl.enumerate_subgroups();
        let h = subs[pick.index(subs.len())];
        let k = gl.conjugate_by_lambda(h, t);
        prop_assert!(subs.contains(&k));
        prop_assert_eq!(gl.order(k), gl.order(h));
        let (a, b) = (affine1::analyze(&gl, h), affine1::analyze(&gl, k));
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.reason, b.reason);
        prop_assert_eq!(a.h_star, b.h_star);
        prop_assert_eq!(a.lambda_class, b.lambda_class);
    }

    #[test]
    fn reports_round_trip(qmax in 2u32..40, seed in any::<u64>(), failures in prop::collection::vec(any::<bool>(), 0..8)) {
        let scan = affine1::scan_dim1(2, qmax).unwrap();
        let mut rows: Vec<ScanRow> = scan.records.into_iter().map(|record| ScanRow { record, pass: true }).collect();
        for (k, &fail) in failures.iter().enumerate() {
            if fail && !rows.is_empty() {
                let n = rows.len();
                rows[k % n].pass = false;
            }
        }
        let r = Report::new(json!({"qmax": qmax, "seed": seed}), None, &rows).unwrap();
        let again = report::parse_report_json(&r.render(Format::Json).unwrap()).unwrap();
        prop_assert!(again.summary_consistent());
        prop_assert_eq!(again.summary.failures, rows.iter().filter(|r| !r.pass).count());
        prop_assert_eq!(again, r);
    }

    #[test]
    fn binomial_congruences_hold(r_index in 0usize..10, m in 1u64..2000, n in 1u64..100_000) {
        let r = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29][r_index];
        let x = r * m;
        let c = numth::lift_congruence(r, x, n).unwrap();
        prop_assert_eq!(numth::pow_mod(1 + x, n, c.modulus), c.residue % c.modulus);
    }
}
