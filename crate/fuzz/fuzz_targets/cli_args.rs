#![no_main]

use libfuzzer_sys::fuzz_target;

// Arguments are separated by NUL or whitespace; only parsing and validation
// run, so a valid heavy command cannot stall the fuzzer.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let args = std::iter::once("melonlab")
        .chain(text.split(|c: char| c == '\0' || c.is_whitespace()).filter(|s| !s.is_empty()));
    let _ = melonlab_cli::parse_and_validate(args);
});
