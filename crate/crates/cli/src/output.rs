//! Output directory, CSV tables, minimal SVG polylines and the check report.

use crate::error::CliError;
use karman_core::solver::fmt17;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Fixed-width float text so identical runs give identical bytes.
pub fn num(x: f64) -> String {
    fmt17(x)
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)?;
        Ok(OutDir { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<(), CliError> {
        std::fs::write(self.path(name), text)?;
        Ok(())
    }

    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(self.path(name))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A polyline in data coordinates.
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
    pub color: &'static str,
}

/// SVG with the y axis pointing up and equal or independent axis scales.
pub fn svg(lines: &[Polyline], equal_aspect: bool, width: f64, height: f64) -> String {
    let pts = lines.iter().flat_map(|l| l.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.0);
        x1 = x1.max(p.0);
        y0 = y0.min(p.1);
        y1 = y1.max(p.1);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad = 0.05;
    let (mut sx, mut sy) = ((x1 - x0).max(1e-300), (y1 - y0).max(1e-300));
    if equal_aspect {
        let s = sx.max(sy);
        (sx, sy) = (s, s);
    }
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let kx = width * (1.0 - 2.0 * pad) / sx;
    let ky = height * (1.0 - 2.0 * pad) / sy;
    let map = |p: &(f64, f64)| (0.5 * width + (p.0 - cx) * kx, 0.5 * height - (p.1 - cy) * ky);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for line in lines {
        let tag = if line.closed { "polygon" } else { "polyline" };
        let coords: Vec<String> = line.points.iter().map(map).map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
        let _ = writeln!(s, r#"<{tag} fill="none" stroke="{}" stroke-width="1" points="{}"/>"#, line.color, coords.join(" "));
    }
    s.push_str("</svg>\n");
    s
}

/// Named invariant checks of one run.
#[derive(Default)]
pub struct Checks {
    items: Vec<(String, bool, String)>,
}

impl Checks {
    pub fn add(&mut self, name: &str, passed: bool, detail: String) {
        self.items.push((name.to_string(), passed, detail));
    }

    pub fn print(&self) {
        for (name, ok, detail) in &self.items {
            println!("{} {name}: {detail}", if *ok { "PASS" } else { "FAIL" });
        }
    }

    pub fn into_result(self) -> Result<(), CliError> {
        let failed: Vec<String> = self.items.into_iter().filter(|c| !c.1).map(|c| c.0).collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::Assertion(failed))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_maps_y_upward() {
        let s = svg(&[Polyline { points: vec![(0.0, 0.0), (1.0, 1.0)], closed: false, color: "black" }], true, 100.0, 100.0);
        assert!(s.contains("5.000,95.000 95.000,5.000"), "{s}");
    }

    #[test]
    fn failed_checks_are_named() {
        let mut c = Checks::default();
        c.add("good", true, String::new());
        c.add("bad", false, String::new());
        let e = c.into_result().unwrap_err();
        assert_eq!(e.exit_code(), 4);
        assert!(e.to_string().contains("bad") && !e.to_string().contains("good"));
    }
}
