#![no_main]

use libfuzzer_sys::fuzz_target;
use smartpath_cli::output::{format_value, parse_report_csv, CSV_HEADER};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(csv) = parse_report_csv(text) else {
        return;
    };
    let n = csv.grid.len();
    assert!([&csv.lhs, &csv.rhs, &csv.abs_dev, &csv.rel_dev]
        .iter()
        .all(|c| c.len() == n));

    // Rewriting in the canonical format must parse back to the same bits, NaN payloads aside.
    let mut out = format!("{CSV_HEADER}\n");
    for i in 0..n {
        let row = [
            csv.grid[i],
            csv.lhs[i],
            csv.rhs[i],
            csv.abs_dev[i],
            csv.rel_dev[i],
        ]
        .map(format_value);
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let again = parse_report_csv(&out).expect("canonical CSV parses");
    let bits = |v: &[f64]| {
        v.iter()
            .map(|x| {
                if x.is_nan() {
                    f64::NAN.to_bits()
                } else {
                    x.to_bits()
                }
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(bits(&csv.grid), bits(&again.grid));
    assert_eq!(bits(&csv.lhs), bits(&again.lhs));
    assert_eq!(bits(&csv.rhs), bits(&again.rhs));
    assert_eq!(bits(&csv.abs_dev), bits(&again.abs_dev));
    assert_eq!(bits(&csv.rel_dev), bits(&again.rel_dev));
});
