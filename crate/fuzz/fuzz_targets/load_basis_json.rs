#![no_main]

use libfuzzer_sys::fuzz_target;
use rlatt_core::schema::{to_json, BasisFile};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = BasisFile::from_json(text) {
        let again = BasisFile::from_json(&to_json(&file)).expect("written file must load");
        assert_eq!(again, file);
    }
});
