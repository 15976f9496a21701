#![no_main]
use disk_uniform::io::Preset;
use disk_uniform::layout::BoundaryScenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = s.parse::<Preset>() {
        assert_eq!(p.to_string().parse::<Preset>().ok(), Some(p));
    }
    if let Ok(sc) = s.parse::<BoundaryScenario>() {
        assert_eq!(sc.to_string().parse::<BoundaryScenario>().ok(), Some(sc));
    }
});
