//! Picture of a planar solve: the polygon on the left, target and achieved
//! mass per facet direction as paired bars on the right.

use std::fmt::Write as _;

use pharmink_core::geom::{Polytope, SphericalMeasure};
use pharmink_core::MeasureAtomMap;

const W: f64 = 800.0;
const H: f64 = 400.0;
const PAD: f64 = 20.0;

pub fn solve_svg(body: &Polytope, target: &SphericalMeasure, achieved: &MeasureAtomMap) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Polygon, fitted into the left square.
    let r = body
        .vertices()
        .iter()
        .map(|v| v[0].abs().max(v[1].abs()))
        .fold(f64::MIN_POSITIVE, f64::max);
    let scale = (H / 2.0 - PAD) / r;
    let (cx, cy) = (H / 2.0, H / 2.0);
    let mut pts = String::new();
    for f in 0..body.facets().len() {
        let (a, _) = body.facet_endpoints(f);
        let _ = write!(pts, "{:.3},{:.3} ", cx + scale * a[0], cy - scale * a[1]);
    }
    let _ = writeln!(
        s,
        r##"<polygon points="{}" fill="#dde8f5" stroke="#1f4e8c" stroke-width="1.5"/>"##,
        pts.trim_end()
    );

    // Paired bars in the right half, one pair per target atom.
    let atoms = target.atoms();
    let x0 = H + PAD;
    let width = W - x0 - PAD;
    let slot = width / atoms.len().max(1) as f64;
    let top = atoms
        .iter()
        .map(|a| a.weight.max(achieved.mass_at(&a.xi)))
        .fold(f64::MIN_POSITIVE, f64::max);
    let base = H - 2.0 * PAD;
    let bar = |s: &mut String, x: f64, value: f64, color: &str| {
        let h = (base - PAD) * value / top;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.3}" y="{:.3}" width="{:.3}" height="{h:.3}" fill="{color}"/>"#,
            base - h,
            0.4 * slot
        );
    };
    for (i, a) in atoms.iter().enumerate() {
        let x = x0 + slot * i as f64 + 0.1 * slot;
        bar(&mut s, x, a.weight, "#9aa5b1");
        bar(&mut s, x + 0.4 * slot, achieved.mass_at(&a.xi), "#1f4e8c");
    }
    let _ = writeln!(
        s,
        r##"<line x1="{x0}" y1="{base}" x2="{:.3}" y2="{base}" stroke="black"/>"##,
        W - PAD
    );
    let _ = writeln!(
        s,
        r##"<text x="{x0}" y="{:.3}" font-family="sans-serif" font-size="12"><tspan fill="#9aa5b1">target</tspan> / <tspan fill="#1f4e8c">achieved</tspan> mass per direction</text>"##,
        H - PAD / 2.0
    );
    s.push_str("</svg>\n");
    s
}
