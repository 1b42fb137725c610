#![no_main]

use kawahara::SpectralField;
use libfuzzer_sys::fuzz_target;
use num_complex::Complex64;

// Byte 0 picks kmax; the rest is read as little-endian (re, im) pairs.
fuzz_target!(|data: &[u8]| {
    let Some((&k, rest)) = data.split_first() else { return };
    let full: Vec<Complex64> = rest
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    if let Ok(field) = SpectralField::from_full_spectrum(k as usize, &full) {
        assert_eq!(field.kmax(), k as usize);
        assert!(field.is_finite());
    }
});
