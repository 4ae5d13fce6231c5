use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::CliResult;
use crate::jet::C64;
use crate::orbit::{OrbitRecord, OrbitStatus};

/// The resolved configuration of a command as one line of JSON.
pub fn config_json<T: Serialize>(command: &str, args: &T) -> String {
    let value = serde_json::json!({ "command": command, "args": args, "version": env!("CARGO_PKG_VERSION") });
    value.to_string()
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

pub fn fmt_c(c: C64) -> String {
    format!("{:.12}{:+.12}i", c.re, c.im)
}

/// One row per seed; columns for `y` are empty for one-variable maps.
pub fn orbit_csv(records: &[OrbitRecord], config: &str) -> String {
    let mut s = format!("# holodyn orbit\n# config: {config}\n");
    s.push_str("seed_re_x,seed_im_x,seed_re_y,seed_im_y,status,period,mu,cardinality\n");
    for r in records {
        let (yr, yi) = match r.seed.get(1) {
            Some(y) => (y.re.to_string(), y.im.to_string()),
            None => (String::new(), String::new()),
        };
        let period = match r.status {
            OrbitStatus::Periodic(k) => k.to_string(),
            _ => String::new(),
        };
        let mu = r.mu.map(|m| m.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{yr},{yi},{},{period},{mu},{}",
            r.seed[0].re,
            r.seed[0].im,
            r.status.label(),
            r.cardinality
        );
    }
    s
}

const SVG_SIZE: f64 = 600.0;
const SVG_POINTS_PER_ORBIT: usize = 400;

/// Scatter plot of the stored orbit points in one coordinate plane.
pub fn orbit_svg(records: &[OrbitRecord], coord: usize, radius: f64, config: &str) -> String {
    let half = SVG_SIZE / 2.0;
    let to_px = |v: C64| (half + v.re / radius * (half - 10.0), half - v.im / radius * (half - 10.0));
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">"#
    );
    let _ = writeln!(s, "<!-- config: {} -->", config.replace("--", "- -"));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0) = to_px(C64::new(-radius, radius));
    let (x1, _) = to_px(C64::new(radius, radius));
    let _ = writeln!(
        s,
        r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        x1 - x0
    );
    for r in records {
        let color = match r.status {
            OrbitStatus::Escaped => "#1f77b4",
            OrbitStatus::Periodic(_) => "#2ca02c",
            OrbitStatus::BudgetExhausted => "#d62728",
        };
        let pts = std::iter::once(&r.seed)
            .chain(r.forward.iter())
            .chain(r.backward.iter())
            .take(SVG_POINTS_PER_ORBIT);
        for p in pts {
            if let Some(v) = p.get(coord) {
                let (x, y) = to_px(*v);
                let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1" fill="{color}"/>"#);
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
