#![no_main]

use libfuzzer_sys::fuzz_target;
use ncover::report::{self, Format};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(r) = report::parse_report_json(text) {
        for format in [Format::Table, Format::Csv] {
            let _ = r.render(format);
        }
        let json = r.render(Format::Json).expect("parsed reports render");
        assert_eq!(report::parse_report_json(&json).expect("rendered reports parse"), r);
    }
});
