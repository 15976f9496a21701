#![no_main]
use disk_uniform::complex::{augment, validate_disk, Complex};
use libfuzzer_sys::fuzz_target;

// First byte: vertex count. Then one face per three bytes.
fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let ids: Vec<u32> = (0..u32::from(n)).collect();
    let faces: Vec<[u32; 3]> = rest.chunks_exact(3).map(|c| [c[0].into(), c[1].into(), c[2].into()]).collect();
    if let Ok(d) = validate_disk(&ids, &faces) {
        assert_eq!(d.euler_characteristic(), 1);
        let aug = augment(&d);
        // the augmented complex is a sphere
        let chi = aug.vertex_count() as i64 - aug.edges().len() as i64 + aug.faces().len() as i64;
        assert_eq!(chi, 2);
    }
});
