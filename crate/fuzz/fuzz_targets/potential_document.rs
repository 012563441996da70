#![no_main]

use fermi_rpa::Potential;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(v) = Potential::from_json(data) {
        assert!(v.iter().all(|(_, vk)| vk.is_finite()));
    }
});
