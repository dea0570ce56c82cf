#![no_main]

use hardscatter::geometry2d::{contact_data, docd};
use hardscatter::{CollisionParam2D, ConvexBody2D};
use libfuzzer_sys::fuzz_target;

// Any body that parses must give finite, positive touching distances.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(body) = ConvexBody2D::from_json(text) else { return };
    let mi = body.mass_inertia();
    assert!(mi.m > 0.0 && mi.j > 0.0);
    for k in 0..8 {
        let beta = CollisionParam2D::new(0.8 * k as f64, 1.3 * k as f64, -0.7 * k as f64);
        let d = docd(&body, &beta);
        assert!(d.is_finite() && d > 0.0);
        if let Ok(c) = contact_data(&body, &beta) {
            assert!(c.p.iter().all(|x| x.is_finite()));
        }
    }
});
