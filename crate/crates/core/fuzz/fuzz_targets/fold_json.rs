#![no_main]

use bioens::FoldPlan;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(plan) = FoldPlan::from_json(text) {
        assert_eq!(FoldPlan::from_json(&plan.to_json()).expect("round trip parses"), plan);
        assert_eq!(plan.fold_sizes().iter().sum::<usize>(), plan.assignment.len());
    }
});
