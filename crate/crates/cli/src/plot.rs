//! Scatter plots of the first two coordinates, coloured by label.

use std::fmt::Write;

use isosplit::{DataMatrix, Labeling};

pub const SIZE: f64 = 800.0;
const MARGIN: f64 = 20.0;

pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#ad494a",
];

/// SVG document with one dot per point. One-dimensional data is drawn along
/// the horizontal midline.
pub fn scatter_svg(data: &DataMatrix, labels: &Labeling) -> String {
    let x: Vec<f64> = data.rows().map(|r| r[0]).collect();
    let y: Vec<f64> = data
        .rows()
        .map(|r| r.get(1).copied().unwrap_or(0.0))
        .collect();
    let sx = axis(&x);
    let sy = axis(&y);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for ((xi, yi), l) in x.iter().zip(&y).zip(labels.as_slice()) {
        let color = PALETTE[(l - 1) % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}"/>"#,
            sx(*xi),
            SIZE - sy(*yi)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Maps the range of `v` onto the drawable width.
fn axis(v: &[f64]) -> impl Fn(f64) -> f64 {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    move |t| {
        if span > 0.0 {
            MARGIN + (t - lo) / span * (SIZE - 2.0 * MARGIN)
        } else {
            SIZE / 2.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_circle_per_point_inside_the_viewport() {
        let data =
            DataMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 2.0], vec![5.0, -1.0]]).unwrap();
        let labels = Labeling::remap([1, 2, 13]);
        let svg = scatter_svg(&data, &labels);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains(r#"width="800""#));
        for c in svg.split("cx=\"").skip(1) {
            let v: f64 = c.split('"').next().unwrap().parse().unwrap();
            assert!((0.0..=SIZE).contains(&v));
        }
    }

    #[test]
    fn colours_cycle_after_twelve_labels() {
        let rows: Vec<Vec<f64>> = (0..13).map(|i| vec![i as f64]).collect();
        let data = DataMatrix::from_rows(&rows).unwrap();
        let labels = Labeling::from_contiguous((1..=13).collect()).unwrap();
        let svg = scatter_svg(&data, &labels);
        assert_eq!(svg.matches(PALETTE[0]).count(), 2);
    }
}
