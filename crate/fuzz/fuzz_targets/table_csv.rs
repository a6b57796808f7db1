#![no_main]

use libfuzzer_sys::fuzz_target;
use mevdro::experiments::block_maxima;
use mevdro::io::read_table;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = read_table(data) {
        let _ = block_maxima(&table, 5);
    }
});
