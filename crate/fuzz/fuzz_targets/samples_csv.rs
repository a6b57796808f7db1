#![no_main]

use libfuzzer_sys::fuzz_target;
use mevdro::io::{read_samples, write_samples};

fuzz_target!(|data: &[u8]| {
    if let Ok(samples) = read_samples(data) {
        // anything accepted must survive a write/read cycle unchanged
        let dim = samples.first().map_or(1, Vec::len);
        let mut buf = Vec::new();
        if write_samples(&mut buf, &samples, dim).is_ok() {
            assert_eq!(read_samples(&buf[..]).unwrap(), samples);
        }
    }
});
