#![no_main]

use libfuzzer_sys::fuzz_target;
use mevdro::io::{read_configurations, write_configurations};

fuzz_target!(|data: &[u8]| {
    if let Ok(cfgs) = read_configurations(data) {
        let mut buf = Vec::new();
        if write_configurations(&mut buf, &cfgs).is_ok() {
            assert_eq!(read_configurations(&buf[..]).unwrap(), cfgs);
        }
    }
});
