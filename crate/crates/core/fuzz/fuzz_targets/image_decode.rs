#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = bioens::image::decode_bytes(data) {
        for p in img.planes() {
            assert!(p.data().iter().all(|v| (0.0..=255.0).contains(v)));
        }
    }
});
