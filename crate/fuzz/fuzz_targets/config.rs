#![no_main]

use braess_cli::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(config) = ExperimentConfig::from_json_bytes(data) {
        let text = config.to_json();
        let again = ExperimentConfig::from_json_bytes(text.as_bytes()).expect("serialized config parses");
        assert_eq!(again.command.name(), config.command.name());
        assert_eq!(again.seeds, config.seeds);
    }
});
