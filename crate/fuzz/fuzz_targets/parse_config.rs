#![no_main]

use libfuzzer_sys::fuzz_target;
use smartpath_cli::config::{parse_config, ConfigError};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    match parse_config(text) {
        Ok(cfg) => {
            assert!(cfg.target.alpha >= 0.5 && cfg.target.lambda > 0.0);
            assert!(!cfg.tau_grid.is_empty());
            assert!(cfg.tau_grid.iter().all(|t| *t > 0.0 && *t < 1.0));
            assert!(!cfg.checks.is_empty());
        }
        Err(ConfigError::Schema(errs)) => assert!(!errs.is_empty()),
        Err(ConfigError::Syntax(_)) => {}
    }
});
