#![no_main]

use libfuzzer_sys::fuzz_target;
use satroute::lp::{export_lp_text, parse_lp_text};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(lp) = parse_lp_text(text) {
        // Anything the reader accepts must survive a write and re-read.
        let written = export_lp_text(&lp).expect("parsed model exports");
        let again = parse_lp_text(&written).expect("exported model parses");
        assert_eq!(export_lp_text(&again).expect("re-export"), written);
    }
});
