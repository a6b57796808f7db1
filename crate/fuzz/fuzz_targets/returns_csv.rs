#![no_main]

use libfuzzer_sys::fuzz_target;
use mevdro::experiments::industry_average;
use mevdro::io::read_returns;

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = read_returns(data) {
        let _ = industry_average(&records);
    }
});
