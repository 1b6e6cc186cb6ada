#![no_main]

use bioens::io::parse_score_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = parse_score_csv(text) {
        let csv = table.to_csv().expect("parsed table serializes");
        let again = parse_score_csv(&csv).expect("round trip parses");
        assert_eq!(again.classes, table.classes);
        assert_eq!(again.rows.len(), table.rows.len());
    }
});
