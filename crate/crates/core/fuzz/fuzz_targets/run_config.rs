#![no_main]

use kawahara::cli::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(value) = serde_json::from_slice::<serde_json::Value>(data) else { return };
    if let Ok(cfg) = RunConfig::from_value(value) {
        let back = serde_json::to_value(&cfg).unwrap();
        assert_eq!(RunConfig::from_value(back).expect("valid config re-validates"), cfg);
    }
});
