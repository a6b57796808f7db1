#![no_main]

use libfuzzer_sys::fuzz_target;
use mevdro::evt::DependenceModel;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(model) = DependenceModel::from_json(text) {
        let ones = vec![1.0; model.dim()];
        let _ = model.cdf(&ones);
    }
});
