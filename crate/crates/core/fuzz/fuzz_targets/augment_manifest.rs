#![no_main]

use bioens::augment::parse_augment_manifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_augment_manifest(text) {
        let mut out = String::from(bioens::augment::export::MANIFEST_HEADER);
        out.push('\n');
        for r in &rows {
            out.push_str(&r.to_line());
            out.push('\n');
        }
        assert_eq!(parse_augment_manifest(&out).expect("round trip parses").len(), rows.len());
    }
});
