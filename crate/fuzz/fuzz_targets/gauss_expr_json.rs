#![no_main]

use libfuzzer_sys::fuzz_target;
use melonlab::gauss::GaussExpr;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(expr) = GaussExpr::from_json(text) else {
        return;
    };
    let again = GaussExpr::from_json(&expr.to_json()).expect("serialized form parses");
    assert_eq!(expr, again);
    let _ = expr.diff();
    let _ = expr.eval(0.5);
});
