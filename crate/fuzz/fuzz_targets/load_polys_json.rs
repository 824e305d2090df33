#![no_main]

use libfuzzer_sys::fuzz_target;
use rlatt_core::schema::{to_json, PolysFile};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = PolysFile::from_json(text) {
        let again = PolysFile::from_json(&to_json(&file)).expect("written file must load");
        assert_eq!(again, file);
    }
});
