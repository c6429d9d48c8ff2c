#![no_main]

use libfuzzer_sys::fuzz_target;
use lfock::sweep::SweepResult;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = SweepResult::from_csv(s) {
        let again = SweepResult::from_csv(&r.to_csv().unwrap()).unwrap();
        assert_eq!(again, r);
    }
});
