#![no_main]

use libfuzzer_sys::fuzz_target;
use lfock::appendix::Family;
use lfock::params::{parse_basis, parse_complex, parse_grid, parse_truncation};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(z) = parse_complex(s) {
        assert!(z.re.is_finite() && z.im.is_finite());
    }
    if let Ok(g) = parse_grid(s) {
        let v = g.values();
        assert_eq!(v.len(), g.steps);
        assert!(v.iter().all(|x| x.is_finite()));
        assert_eq!(parse_grid(&g.to_string()).unwrap(), g);
    }
    let _ = parse_truncation(s);
    let _ = parse_basis(s);
    let _ = Family::parse(s);
});
