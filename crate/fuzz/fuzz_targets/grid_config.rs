#![no_main]

use libfuzzer_sys::fuzz_target;
use satroute::config::parse_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(grid) = parse_config(text) {
        let again = parse_config(&grid.to_json()).expect("serialized grid parses");
        assert_eq!(again, grid);
    }
});
