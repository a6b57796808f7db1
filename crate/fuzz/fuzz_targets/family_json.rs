#![no_main]

use libfuzzer_sys::fuzz_target;
use mevdro::adversary::AdversaryFamily;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(family) = AdversaryFamily::from_json(text) {
        let again = AdversaryFamily::from_json(&family.to_json()).unwrap();
        assert_eq!(again.to_json(), family.to_json());
    }
});
