#![no_main]

use fermi_rpa::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(cfg) = RunConfig::from_json(data) {
        let again = RunConfig::from_json(cfg.to_json().as_bytes()).expect("serialized config parses");
        assert_eq!(cfg, again);
    }
});
