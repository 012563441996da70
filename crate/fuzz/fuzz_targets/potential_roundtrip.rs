#![no_main]

use fermi_rpa::Potential;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(v) = Potential::from_json(data) else {
        return;
    };
    let again = Potential::from_json(v.to_json().as_bytes()).expect("serialized potential parses");
    assert_eq!(v, again);
});
