#![no_main]

use libfuzzer_sys::fuzz_target;
use rlatt_core::Partition;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = text.parse::<Partition>() {
        let again: Partition = p.to_string().parse().expect("display output must parse");
        assert_eq!(again, p);
    }
});
