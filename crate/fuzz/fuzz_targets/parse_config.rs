#![no_main]

use libfuzzer_sys::fuzz_target;
use rlatt_core::config::PartialConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(partial) = PartialConfig::from_toml_str(text) {
        if let Ok(cfg) = partial.resolve() {
            let _ = cfg.nome.points();
        }
    }
});
