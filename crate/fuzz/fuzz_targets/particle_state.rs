#![no_main]

use hardscatter::dynamics::ParticleState;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = serde_json::from_slice::<ParticleState>(data) {
        let _ = s.is_finite();
        let _ = serde_json::to_string(&s).expect("state serializes");
    }
});
