#![no_main]

use kawahara::evolution::Checkpoint;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = Checkpoint::from_json_str(s) {
        assert!(c.t.is_finite());
        let _ = Checkpoint::from_json_str(&c.to_json_string()).expect("re-parse of own output");
    }
});
