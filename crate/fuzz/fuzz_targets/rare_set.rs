#![no_main]

use libfuzzer_sys::fuzz_target;
use mevdro::duals::RareSet;
use mevdro::Norm;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(set) = text.parse::<RareSet>() {
        let origin = vec![0.0; set.dim()];
        let _ = set.distance(&origin, Norm::L2);
    }
});
