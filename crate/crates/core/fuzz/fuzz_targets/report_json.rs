#![no_main]

use bioens::learning::EvalReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = EvalReport::from_json(text) {
        let again = EvalReport::from_json(&report.to_json()).expect("round trip parses");
        assert_eq!(again.members, report.members);
    }
});
