#![no_main]

use libfuzzer_sys::fuzz_target;
use lfock::sweep::SweepResult;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = SweepResult::from_json(s) {
        let again = SweepResult::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(again, r);
    }
});
