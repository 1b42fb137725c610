#![no_main]

use kawahara::SpectralField;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(field) = SpectralField::from_json_str(s) {
        let again = SpectralField::from_json_str(&field.to_json_string()).expect("re-parse of own output");
        assert_eq!(again.kmax(), field.kmax());
    }
});
