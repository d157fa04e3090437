use std::io::Write;

use super::solver::FlowField;
use super::EulerError;

/// One row per cell in source-mesh order.
pub fn write_csv(field: &FlowField, mut w: impl Write) -> Result<(), EulerError> {
    writeln!(w, "# meshstream field v1")?;
    writeln!(w, "cell,x,y,rho,u,v,p")?;
    let mut rows: Vec<(usize, usize)> = field.original.iter().copied().enumerate().collect();
    rows.sort_by_key(|r| r.1);
    for (i, t) in rows {
        let q = field.state[i];
        let c = field.centroid(i);
        let p = (field.gamma - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / q[0]);
        writeln!(w, "{t},{},{},{},{},{},{}", c[0], c[1], q[0], q[1] / q[0], q[2] / q[0], p)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct SvgOptions {
    pub width_px: f64,
    /// Color range; `None` uses the field's min and max density.
    pub range: Option<(f64, f64)>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { width_px: 1200.0, range: None }
    }
}

/// Density plot, one filled polygon per triangle.
pub fn write_svg(field: &FlowField, opts: &SvgOptions, mut w: impl Write) -> Result<(), EulerError> {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in field.corners.iter().flatten() {
        x0 = x0.min(c[0]);
        x1 = x1.max(c[0]);
        y0 = y0.min(c[1]);
        y1 = y1.max(c[1]);
    }
    let (lo, hi) = opts.range.unwrap_or_else(|| {
        field.state.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), q| (a.min(q[0]), b.max(q[0])))
    });
    let scale = opts.width_px / (x1 - x0).max(f64::MIN_POSITIVE);
    let height = (y1 - y0) * scale;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.1} {:.1}">"#,
        opts.width_px, height, opts.width_px, height
    )?;
    for (t, c) in field.corners.iter().enumerate() {
        let s = ((field.state[t][0] - lo) / (hi - lo).max(f64::MIN_POSITIVE)).clamp(0.0, 1.0);
        let [r, g, b] = colormap(s);
        let pts: Vec<String> =
            c.iter().map(|p| format!("{:.2},{:.2}", (p[0] - x0) * scale, (y1 - p[1]) * scale)).collect();
        let fill = format!("#{r:02x}{g:02x}{b:02x}");
        writeln!(w, r#"<polygon points="{}" fill="{fill}" stroke="{fill}" stroke-width="0.3"/>"#, pts.join(" "))?;
    }
    writeln!(w, "</svg>")?;
    Ok(())
}

/// Blue to red through white.
fn colormap(s: f64) -> [u8; 3] {
    let ch = |x: f64| (255.0 * x.clamp(0.0, 1.0)).round() as u8;
    if s < 0.5 {
        let a = 2.0 * s;
        [ch(0.2 + 0.8 * a), ch(0.3 + 0.7 * a), ch(0.8 + 0.2 * a)]
    } else {
        let a = 2.0 * (s - 0.5);
        [ch(1.0 - 0.2 * a), ch(1.0 - 0.8 * a), ch(1.0 - 0.85 * a)]
    }
}
