//! Fuzzes the experiment CSV row parser: any accepted line must round-trip
//! through serialization.

#![no_main]

use ddmwis::bench::CsvRow;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(row) = CsvRow::parse(line) {
        let reparsed = CsvRow::parse(&row.to_line()).expect("own serialization must parse");
        assert_eq!(row, reparsed);
    }
});
