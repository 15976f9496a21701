#![no_main]
use disk_uniform::io::{parse_problem, serialize_problem};
use libfuzzer_sys::fuzz_target;

// Anything that parses must serialize to canonical text that parses back
// to the same problem.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_problem(text) {
        let canonical = serialize_problem(&p);
        let again = parse_problem(&canonical).expect("canonical output parses");
        assert_eq!(again, p);
        assert_eq!(serialize_problem(&again), canonical);
    }
});
