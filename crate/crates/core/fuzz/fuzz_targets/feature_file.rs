#![no_main]

use bioens::io::parse_feature_file;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = parse_feature_file(text) {
        let again = parse_feature_file(&file.to_text().expect("parsed file serializes")).expect("round trip parses");
        assert_eq!(again, file);
    }
});
