use smartpath::verify::{CheckReport, Relation, Tol};
use smartpath_cli::output::{parse_report_csv, report_csv, timings_json, CSV_HEADER};
use smartpath_cli::svg::{render_svg, PlotOptions, Series};

fn report() -> CheckReport {
    CheckReport::evaluated(
        "lsi",
        Relation::AtMost,
        vec![0.1, 0.5, 0.9],
        vec![1.0 / 3.0, 2e-300, -0.0],
        vec![0.5, 1e300, 7.0],
        Tol::new(1e-10, 0.0),
        "note",
    )
}

#[test]
fn csv_round_trips_exactly() {
    let r = report();
    let text = report_csv(&r);
    assert!(text.starts_with(&format!("{CSV_HEADER}\n")));
    let parsed = parse_report_csv(&text).unwrap();
    assert_eq!(parsed.grid, r.grid);
    assert_eq!(parsed.lhs, r.lhs);
    assert_eq!(parsed.rhs, r.rhs);
    let devs = r.deviations();
    assert_eq!(parsed.abs_dev, devs.iter().map(|d| d.0).collect::<Vec<_>>());
    assert_eq!(parsed.rel_dev, devs.iter().map(|d| d.1).collect::<Vec<_>>());
}

#[test]
fn csv_rows_use_fixed_scientific_format() {
    let text = report_csv(&report());
    let row = text.lines().nth(1).unwrap();
    assert_eq!(row.split(',').next().unwrap(), "1.0000000000000001e-1");
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn skipped_report_has_header_only() {
    let text = report_csv(&CheckReport::skipped("hsi", "no density"));
    assert_eq!(text, format!("{CSV_HEADER}\n"));
    assert_eq!(parse_report_csv(&text).unwrap().grid.len(), 0);
}

#[test]
fn csv_errors_carry_line_numbers() {
    assert_eq!(parse_report_csv("").unwrap_err().line, 1);
    assert_eq!(parse_report_csv("a,b\n").unwrap_err().line, 1);
    let bad = format!("{CSV_HEADER}\n1,2,3,4,5\n1,2,3\n");
    assert_eq!(parse_report_csv(&bad).unwrap_err().line, 3);
    let bad = format!("{CSV_HEADER}\n1,2,x,4,5\n");
    let e = parse_report_csv(&bad).unwrap_err();
    assert_eq!(e.line, 2);
    assert!(e.msg.contains("`x`"));
}

#[test]
fn timings_are_keyed_by_report() {
    let mut r = report();
    r.runtime_ms = 42;
    let v: serde_json::Value = serde_json::from_str(&timings_json(&[r])).unwrap();
    assert_eq!(v["lsi"], 42);
}

fn opts(log_y: bool) -> PlotOptions {
    PlotOptions {
        title: "a <b> & c".into(),
        x_label: "tau".into(),
        y_label: "D".into(),
        log_y,
    }
}

#[test]
fn svg_without_data_still_draws_axes() {
    let s = render_svg(&[], &opts(false));
    assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    assert!(s.contains("a &lt;b&gt; &amp; c"));
    assert_eq!(s.matches("<path d=\"M").count(), 1);
}

#[test]
fn svg_constant_series_is_finite() {
    let series = [Series {
        label: "flat".into(),
        x: vec![0.1, 0.5, 0.9],
        y: vec![2.0; 3],
    }];
    let s = render_svg(&series, &opts(false));
    assert!(!s.contains("NaN") && !s.contains("inf"));
    assert_eq!(s.matches("<path d=\"M").count(), 2);
}

#[test]
fn svg_two_series_get_distinct_styles() {
    let series = [
        Series {
            label: "D".into(),
            x: vec![0.1, 0.5, 0.9],
            y: vec![0.01, 0.1, 1.0],
        },
        Series {
            label: "J".into(),
            x: vec![0.1, 0.5, 0.9],
            y: vec![0.02, -1.0, 2.0],
        },
    ];
    let s = render_svg(&series, &opts(true));
    assert!(s.contains("#1f77b4") && s.contains("#d62728"));
    assert_eq!(s.matches("fill=\"none\" stroke=\"#").count(), 2);
    assert!(!s.contains("NaN"));
}
