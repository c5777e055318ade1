#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use ncover::ffield::FieldTable;
use ncover::matgrp;

const FIELDS: [(u32, u32); 4] = [(2, 2), (3, 2), (2, 4), (5, 1)];

fn tables() -> &'static [FieldTable] {
    static T: OnceLock<Vec<FieldTable>> = OnceLock::new();
    T.get_or_init(|| FIELDS.iter().map(|&(p, f)| FieldTable::new(p, f).unwrap()).collect())
}

fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let t = &tables()[pick as usize % FIELDS.len()];
    if let Ok(gens) = matgrp::parse_generator_spec(text, t) {
        let again = matgrp::parse_generator_spec(&matgrp::format_generator_spec(&gens), t).expect("printed specs parse");
        assert_eq!(again, gens);
    }
});
