//! Rendering of bucket tables as CSV and aligned text, and comparison of
//! computed tallies against the published reference counts.

use std::fmt::Write as _;

use crate::analysis::{Histogram, BUCKET_COUNT, BUCKET_LABELS};

/// Table CSV: one `bucket_label,count` line per interval, then
/// total/zero/overflow footer rows prefixed with `#`.
pub fn table_csv(h: &Histogram) -> String {
    let mut text = String::from("bucket_label,count\n");
    for (label, count) in BUCKET_LABELS.iter().zip(h.counts) {
        writeln!(text, "{label},{count}").unwrap();
    }
    writeln!(text, "# total,{}", h.total()).unwrap();
    writeln!(text, "# zero,{}", h.zero_count).unwrap();
    writeln!(text, "# overflow,{}", h.overflow_count).unwrap();
    text
}

/// Aligned text rendering with the interval labels as a header row.
pub fn table_text(title: &str, h: &Histogram) -> String {
    let mut text = format!("{title}\n");
    let width = 9;
    for label in BUCKET_LABELS {
        write!(text, "{label:>width$}").unwrap();
    }
    writeln!(text, "{:>width$}", "total").unwrap();
    for count in h.counts {
        write!(text, "{count:>width$}").unwrap();
    }
    writeln!(text, "{:>width$}", h.total()).unwrap();
    writeln!(text, "zero-delta records: {}", h.zero_count).unwrap();
    writeln!(text, "overflow (|delta| > p) records: {}", h.overflow_count).unwrap();
    text
}

/// Per-bucket differences between a computed tally and reference counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableComparison {
    /// computed − reference, per bucket.
    pub diffs: [i64; BUCKET_COUNT],
    pub total_abs_deviation: u64,
}

pub fn compare_counts(computed: &[u64; BUCKET_COUNT], reference: &[u64; BUCKET_COUNT]) -> TableComparison {
    let mut diffs = [0i64; BUCKET_COUNT];
    let mut total = 0u64;
    for j in 0..BUCKET_COUNT {
        diffs[j] = computed[j] as i64 - reference[j] as i64;
        total += diffs[j].unsigned_abs();
    }
    TableComparison { diffs, total_abs_deviation: total }
}

/// Side-by-side comparison block for reports.
pub fn comparison_text(
    title: &str,
    computed: &Histogram,
    reference: &[u64; BUCKET_COUNT],
) -> String {
    let cmp = compare_counts(&computed.counts, reference);
    let mut text = format!("{title}\n");
    writeln!(text, "{:>10} {:>9} {:>9} {:>6}", "bucket", "computed", "reference", "diff").unwrap();
    for j in 0..BUCKET_COUNT {
        writeln!(
            text,
            "{:>10} {:>9} {:>9} {:>+6}",
            BUCKET_LABELS[j], computed.counts[j], reference[j], cmp.diffs[j]
        )
        .unwrap();
    }
    writeln!(
        text,
        "{:>10} {:>9} {:>9}   total absolute deviation: {}",
        "total",
        computed.total(),
        reference.iter().sum::<u64>(),
        cmp.total_abs_deviation
    )
    .unwrap();
    text
}
