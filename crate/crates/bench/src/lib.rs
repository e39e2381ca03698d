//! Fixtures shared by the benchmarks.

use digitscreen::DatasetColumn;

/// A deterministic column of `m` counts spread over five decades.
pub fn synthetic_column(m: usize) -> DatasetColumn {
    let mut x: u64 = 0x9e37_79b9_7f4a_7c15;
    let values = (0..m)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let u = (x >> 11) as f64 / (1u64 << 53) as f64;
            10f64.powf(1.0 + 4.0 * u) as u64
        })
        .collect();
    DatasetColumn::new("bench", values, 0)
}
