#![no_main]

use cstar_approx::io::load_problem;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = load_problem(data);
});
