//! Success-rate line chart as a standalone SVG.

use std::fmt::Write;

use sentry_core::eval::CampaignCell;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
];

/// One line per intruder count; x is team size, y is mean success in percent.
pub fn success_chart(cells: &[Vec<CampaignCell>]) -> String {
    let teams: Vec<usize> = cells
        .first()
        .map(|r| r.iter().map(|c| c.n_robots).collect())
        .unwrap_or_default();
    let (lo, hi) = match (teams.iter().min(), teams.iter().max()) {
        (Some(&a), Some(&b)) if b > a => (a as f64, b as f64),
        (Some(&a), _) => (a as f64 - 0.5, a as f64 + 0.5),
        _ => (0.0, 1.0),
    };
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |n: f64| LEFT + (n - lo) / (hi - lo) * pw;
    let sy = |pct: f64| TOP + (1.0 - pct / 100.0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    for pct in (0..=100).step_by(20) {
        let y = sy(pct as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{pct}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for &n in &teams {
        let x = sx(n as f64);
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{n}</text>"#,
            TOP + ph + 18.0
        );
    }
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">security robots</text>"#,
        LEFT + pw / 2.0,
        H - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.1}) rotate(-90)" text-anchor="middle">mean success rate (%)</text>"#,
        TOP + ph / 2.0
    );
    for (k, row) in cells.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = row
            .iter()
            .map(|c| format!("{:.1},{:.1}", sx(c.n_robots as f64), sy(c.mean_success)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        for c in row {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                sx(c.n_robots as f64),
                sy(c.mean_success)
            );
        }
        if let Some(c) = row.first() {
            let y = TOP + 10.0 + 18.0 * k as f64;
            let x = LEFT + pw + 12.0;
            let _ = writeln!(
                s,
                r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{} intruder{}</text>"#,
                x + 18.0,
                x + 24.0,
                y + 4.0,
                c.n_intruders,
                if c.n_intruders == 1 { "" } else { "s" }
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
