#![no_main]

use libfuzzer_sys::fuzz_target;
use ncover::groupengine::FiniteGroup;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = FiniteGroup::from_text(text) {
        let again = FiniteGroup::from_text(&g.to_text()).expect("printed tables parse");
        assert_eq!(again.order(), g.order());
    }
});
