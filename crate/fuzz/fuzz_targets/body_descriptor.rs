#![no_main]

use hardscatter::geometry2d::BodyDescriptor;
use hardscatter::ConvexBody2D;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(desc) = BodyDescriptor::from_json(text) {
        let again = BodyDescriptor::from_json(&desc.to_json()).expect("serialized descriptor re-parses");
        assert_eq!(desc.hash(), again.hash());
    }
    let _ = ConvexBody2D::from_json(text);
});
