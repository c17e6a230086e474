//! Benchmark fixtures shared by the criterion benches.

use skelembed::{generate_instance, Instance};

/// Seeded instances of growing size: (label, instance).
pub fn fixtures() -> Vec<(String, Instance)> {
    [(10, 63), (30, 255), (30, 1023), (50, 511)]
        .into_iter()
        .map(|(m, n)| {
            (
                format!("m{m}_n{n}"),
                generate_instance(m, n, 7).expect("fixture generates"),
            )
        })
        .collect()
}
