//! CSV assembly and the optional sweep heatmap SVG.
//!
//! All numeric output goes through `Display`, whose shortest round-trip
//! representation makes repeated runs byte-identical.

use std::fmt::Write as _;

use vibrastab::stability::StabilityClass;

use crate::commands::SweepRow;

/// Map a verdict to its single-letter CSV code.
pub fn verdict_letter(class: StabilityClass) -> char {
    match class {
        StabilityClass::AsymptoticallyStable => 'A',
        StabilityClass::Stable => 'S',
        StabilityClass::Unstable => 'U',
        StabilityClass::Marginal => 'M',
    }
}

fn fill(class: StabilityClass) -> &'static str {
    match class {
        StabilityClass::AsymptoticallyStable => "#1a9850",
        StabilityClass::Stable => "#74add1",
        StabilityClass::Unstable => "#d73027",
        StabilityClass::Marginal => "#fee08b",
    }
}

/// Piecewise-linear map from a grid value to its index coordinate.
fn value_to_index(grid: &[f64], v: f64) -> Option<f64> {
    if grid.len() < 2 || v < grid[0] || v > *grid.last().unwrap() {
        return None;
    }
    for i in 0..grid.len() - 1 {
        if v <= grid[i + 1] {
            let w = (v - grid[i]) / (grid[i + 1] - grid[i]);
            return Some(i as f64 + w);
        }
    }
    None
}

/// Heatmap of sweep verdicts over the `(δ, k)` plane with the averaged
/// stability boundary `δ k sqrt(Γ) = sqrt((4γ² - a²)/4)` overlaid (when the
/// boundary exists, i.e. `4γ² > a²`).
pub fn sweep_svg(
    rows: &[SweepRow],
    delta_grid: &[f64],
    k_grid: &[f64],
    a: f64,
    gamma: f64,
    gamma_moment: f64,
) -> String {
    const CELL: f64 = 48.0;
    const MARGIN: f64 = 70.0;
    let w = MARGIN + CELL * k_grid.len() as f64 + 20.0;
    let h = MARGIN + CELL * delta_grid.len() as f64 + 20.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="16" font-size="13" font-family="monospace">stability sweep (x: k, y: delta)</text>"#,
        MARGIN
    );
    // y grows upward in delta: row di drawn from the bottom
    let y_of = |di: usize| h - 20.0 - CELL * (di as f64 + 1.0);
    let x_of = |ki: usize| MARGIN + CELL * ki as f64;
    for row in rows {
        let x = x_of(row.k_index);
        let y = y_of(row.delta_index);
        let color = row.verdict.map_or("#999999", fill);
        let _ = writeln!(
            s,
            r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{color}" stroke="#ffffff"/>"##
        );
    }
    for (ki, k) in k_grid.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" font-family="monospace" text-anchor="middle">{k}</text>"#,
            x_of(ki) + CELL / 2.0,
            h - 4.0
        );
    }
    for (di, d) in delta_grid.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" font-family="monospace" text-anchor="end">{d}</text>"#,
            MARGIN - 6.0,
            y_of(di) + CELL / 2.0 + 4.0
        );
    }
    // analytic boundary: delta*(k) = sqrt((4 gamma^2 - a^2)/4 / Gamma) / k
    let excess = (4.0 * gamma * gamma - a * a) / 4.0;
    if excess > 0.0 && gamma_moment > 0.0 && k_grid.len() >= 2 && delta_grid.len() >= 2 {
        let coeff = (excess / gamma_moment).sqrt();
        let mut points = Vec::new();
        let (kmin, kmax) = (k_grid[0], *k_grid.last().unwrap());
        for i in 0..=200 {
            let k = kmin + (kmax - kmin) * i as f64 / 200.0;
            let d = coeff / k;
            if let (Some(xi), Some(yi)) = (value_to_index(k_grid, k), value_to_index(delta_grid, d))
            {
                let x = MARGIN + CELL * (xi + 0.5);
                let y = h - 20.0 - CELL * (yi + 0.5);
                points.push(format!("{x},{y}"));
            }
        }
        if points.len() >= 2 {
            let _ = writeln!(
                s,
                r##"<polyline points="{}" fill="none" stroke="#000000" stroke-width="2" stroke-dasharray="6,3"/>"##,
                points.join(" ")
            );
        }
    }
    let _ = writeln!(s, "</svg>");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_index_interpolates() {
        let grid = [1.0, 2.0, 4.0];
        assert_eq!(value_to_index(&grid, 1.0), Some(0.0));
        assert_eq!(value_to_index(&grid, 3.0), Some(1.5));
        assert_eq!(value_to_index(&grid, 5.0), None);
    }

    #[test]
    fn svg_contains_cells_and_curve() {
        let rows = vec![
            SweepRow {
                delta_index: 0,
                k_index: 0,
                delta: 0.05,
                k: 80.0,
                margin: -1e-5,
                verdict: Some(StabilityClass::Unstable),
                sigma: None,
                r_squared: None,
                mode_verdicts: "U".into(),
                error: None,
            },
            SweepRow {
                delta_index: 1,
                k_index: 0,
                delta: 0.12,
                k: 80.0,
                margin: 1e-4,
                verdict: Some(StabilityClass::AsymptoticallyStable),
                sigma: Some(0.001),
                r_squared: Some(0.99),
                mode_verdicts: "A".into(),
                error: None,
            },
        ];
        let svg = sweep_svg(
            &rows,
            &[0.05, 0.12],
            &[80.0, 120.0],
            1.0,
            1.0,
            1.0 / (8.0 * std::f64::consts::PI.powi(2)),
        );
        assert!(svg.contains("<rect"));
        assert!(svg.contains("polyline"));
        assert!(svg.starts_with("<svg"));
    }
}
