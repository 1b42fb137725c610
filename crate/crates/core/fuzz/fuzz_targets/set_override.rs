#![no_main]

use kawahara::cli::apply_override;
use libfuzzer_sys::fuzz_target;
use serde_json::{json, Value};

// First line is the `--set` argument, the rest an optional base document.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let (spec, base) = s.split_once('\n').unwrap_or((s, ""));
    let mut target = serde_json::from_str::<Value>(base).unwrap_or_else(|_| json!({}));
    let _ = apply_override(&mut target, spec);
});
