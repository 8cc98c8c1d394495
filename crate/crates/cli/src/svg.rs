//! Static SVG chart of sweep results: success rate against degree.
//!
//! One polyline per dimension, a circle per cell, and dashed vertical
//! markers at the two closed-form thresholds and at p/2. The canvas is a
//! fixed 800x500 viewBox and every coordinate is derived from the cell
//! values alone, so equal input bytes give equal output bytes.

use std::collections::BTreeMap;
use std::fmt::Write;

use lowdeg::experiments::SweepCell;
use lowdeg::Error;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 780.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 460.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

struct Series {
    /// (d, success_rate) in ascending d order.
    points: Vec<(u32, f64)>,
    d_lower: f64,
    d_upper: f64,
}

/// Renders the chart; cells without a success_rate column are ignored.
pub fn emit_svg(cells: &[SweepCell]) -> Result<String, Error> {
    let mut series: BTreeMap<u32, Series> = BTreeMap::new();
    for cell in cells {
        let Some(rate) = cell.success_rate else {
            continue;
        };
        let entry = series.entry(cell.p).or_insert(Series {
            points: Vec::new(),
            d_lower: cell.d_lower,
            d_upper: cell.d_upper,
        });
        entry.points.push((cell.d, rate));
    }
    if series.is_empty() {
        return Err(Error::InvalidParameter {
            name: "cells",
            reason: "nothing to plot: no cell carries a success rate",
        });
    }
    for s in series.values_mut() {
        s.points.sort_unstable_by_key(|&(d, _)| d);
    }

    let d_min = series
        .values()
        .flat_map(|s| s.points.iter().map(|&(d, _)| d))
        .min()
        .expect("nonempty") as f64;
    let d_max = series
        .values()
        .flat_map(|s| s.points.iter().map(|&(d, _)| d))
        .max()
        .expect("nonempty") as f64;
    // A degenerate single-degree domain still needs a finite scale.
    let (lo, hi) = if d_max > d_min {
        (d_min, d_max)
    } else {
        (d_min - 1.0, d_max + 1.0)
    };
    let x = |d: f64| LEFT + (d - lo) * (RIGHT - LEFT) / (hi - lo);
    let y = |rate: f64| TOP + (1.0 - rate) * (BOTTOM - TOP);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );

    // Axes.
    let _ = writeln!(
        out,
        "<line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"#333333\"/>"
    );
    let _ = writeln!(
        out,
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"#333333\"/>"
    );
    for i in 0..=4 {
        let rate = i as f64 / 4.0;
        let yy = y(rate);
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{yy}\" x2=\"{LEFT}\" y2=\"{yy}\" stroke=\"#333333\"/>",
            LEFT - 5.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
             text-anchor=\"end\">{rate}</text>",
            LEFT - 8.0,
            yy + 4.0
        );
    }
    let span = hi - lo;
    let step = (span / 16.0).ceil().max(1.0) as i64;
    let mut tick = lo.ceil() as i64;
    while tick as f64 <= hi {
        let xx = x(tick as f64);
        let _ = writeln!(
            out,
            "<line x1=\"{xx}\" y1=\"{BOTTOM}\" x2=\"{xx}\" y2=\"{}\" stroke=\"#333333\"/>",
            BOTTOM + 5.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{xx}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
             text-anchor=\"middle\">{tick}</text>",
            BOTTOM + 18.0
        );
        tick += step;
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
         text-anchor=\"middle\">d</text>",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 34.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">success rate</text>",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );

    // Data, one color per dimension.
    for (idx, (&p, s)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        if s.points.len() >= 2 {
            let mut coords = String::new();
            for &(d, rate) in &s.points {
                let _ = write!(coords, "{},{} ", x(d as f64), y(rate));
            }
            let _ = writeln!(
                out,
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
                 points=\"{}\"/>",
                coords.trim_end()
            );
        }
        for &(d, rate) in &s.points {
            let _ = writeln!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>",
                x(d as f64),
                y(rate)
            );
        }
        // Threshold markers, drawn only inside the data window.
        let markers = [
            (s.d_lower, "d_lower", 0.0),
            (s.d_upper, "d_upper", 12.0),
            (p as f64 / 2.0, "p/2", 24.0),
        ];
        for (value, label, offset) in markers {
            if !value.is_finite() || value < lo || value > hi {
                continue;
            }
            let xx = x(value);
            let _ = writeln!(
                out,
                "<line x1=\"{xx}\" y1=\"{TOP}\" x2=\"{xx}\" y2=\"{BOTTOM}\" \
                 stroke=\"{color}\" stroke-dasharray=\"4 3\"/>"
            );
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" \
                 fill=\"{color}\">{label}</text>",
                xx + 3.0,
                TOP + 10.0 + offset + 38.0 * idx as f64
            );
        }
        // Legend.
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
             fill=\"{color}\">p={p}</text>",
            RIGHT - 60.0,
            TOP + 14.0 + 16.0 * idx as f64
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
