#![no_main]

use libfuzzer_sys::fuzz_target;
use satroute::topology::{read_topology, write_topology};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(network) = read_topology(text) {
        let again = read_topology(&write_topology(&network)).expect("written dump parses");
        assert_eq!(again, network);
    }
});
