#![no_main]

use cstar_approx::io::DistReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(report) = DistReport::parse(data) {
        // Anything that parses must survive a round trip.
        let again = DistReport::parse(&report.to_json()).expect("re-parse of serialized report");
        assert_eq!(again.to_json(), report.to_json());
    }
});
