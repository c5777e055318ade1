//! Runs the checked-in fuzz corpus through the parsers with the fuzz targets' round-trip checks.

use std::fs;
use std::path::{Path, PathBuf};

use ncover::ffield::FieldTable;
use ncover::groupengine::FiniteGroup;
use ncover::matgrp;
use ncover::report::{self, Format};

const REJECTED: [&str; 5] = ["not_latin", "too_many", "bad_frobenius", "singular", "malformed"];

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            let stem = Path::new(&path).file_stem().unwrap().to_string_lossy().into_owned();
            (stem, fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn expect_ok(name: &str) -> bool {
    !REJECTED.contains(&name)
}

#[test]
fn group_table_seeds() {
    for (name, bytes) in seeds("group_table") {
        let parsed = FiniteGroup::from_text(std::str::from_utf8(&bytes).unwrap());
        assert_eq!(parsed.is_ok(), expect_ok(&name), "{name}");
        if let Ok(g) = parsed {
            assert_eq!(FiniteGroup::from_text(&g.to_text()).unwrap().order(), g.order());
        }
    }
}

#[test]
fn generator_spec_seeds() {
    let fields = [(2, 2), (3, 2), (2, 4), (5, 1)];
    for (name, bytes) in seeds("generator_spec") {
        let (pick, rest) = bytes.split_first().unwrap();
        let (p, f) = fields[*pick as usize % fields.len()];
        let t = FieldTable::new(p, f).unwrap();
        let parsed = matgrp::parse_generator_spec(std::str::from_utf8(rest).unwrap(), &t);
        assert_eq!(parsed.is_ok(), expect_ok(&name), "{name}: {parsed:?}");
        if let Ok(gens) = parsed {
            assert_eq!(matgrp::parse_generator_spec(&matgrp::format_generator_spec(&gens), &t).unwrap(), gens);
        }
    }
}

#[test]
fn report_json_seeds() {
    for (name, bytes) in seeds("report_json") {
        let parsed = report::parse_report_json(std::str::from_utf8(&bytes).unwrap());
        assert_eq!(parsed.is_ok(), expect_ok(&name), "{name}");
        if let Ok(r) = parsed {
            assert!(r.summary_consistent(), "{name}");
            let json = r.render(Format::Json).unwrap();
            assert_eq!(report::parse_report_json(&json).unwrap(), r);
        }
    }
}
