//! Artifact writing: SVG polylines and a hashed manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
    pub stroke: String,
}

impl Polyline {
    pub fn new(points: Vec<(f64, f64)>, closed: bool, stroke: &str) -> Self {
        Polyline { points, closed, stroke: stroke.to_string() }
    }

    pub fn from_complex(points: &[Complex64], closed: bool, stroke: &str) -> Self {
        Self::new(points.iter().map(|z| (z.re, z.im)).collect(), closed, stroke)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    /// Output width in pixels; the height follows from the aspect ratio.
    pub width: f64,
    pub stroke_width: f64,
    /// Equal scaling on both axes.
    pub equal_aspect: bool,
    pub title: Option<String>,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle { width: 480.0, stroke_width: 1.5, equal_aspect: true, title: None }
    }
}

pub const PALETTE: [&str; 6] = ["#1f4e9c", "#c0392b", "#27864a", "#7d3c98", "#b9770e", "#222222"];

/// Standalone SVG document with one `<path>` per polyline.
pub fn render_svg(polylines: &[Polyline], style: &SvgStyle) -> Result<String> {
    let pts = polylines.iter().flat_map(|p| p.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let mut any = false;
    for &(x, y) in pts {
        any = true;
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !any {
        return Err(Error::Domain("nothing to draw".into()));
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-12);
    let (dx, dy) = ((x1 - x0).max(1e-12) + 2.0 * pad, (y1 - y0).max(1e-12) + 2.0 * pad);
    let width = style.width;
    let (sx, sy, height) = if style.equal_aspect {
        let s = width / dx;
        (s, s, dy * s)
    } else {
        (width / dx, width * 0.75 / dy, width * 0.75)
    };
    let map = |x: f64, y: f64| ((x - x0 + pad) * sx, height - (y - y0 + pad) * sy);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#,
        w = width,
        h = height
    );
    if let Some(t) = &style.title {
        let _ = writeln!(out, "<title>{}</title>", escape(t));
    }
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for p in polylines {
        let mut d = String::new();
        let mut pen_down = false;
        for &(x, y) in &p.points {
            if !(x.is_finite() && y.is_finite()) {
                pen_down = false;
                continue;
            }
            let (u, v) = map(x, y);
            let _ = write!(d, "{}{:.3},{:.3} ", if pen_down { "L" } else { "M" }, u, v);
            pen_down = true;
        }
        if p.closed {
            d.push('Z');
        }
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
            d.trim_end(),
            escape(&p.stroke),
            style.stroke_width
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Manifest {
    pub scenario: String,
    pub seed: Option<u64>,
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    /// Re-hashes every listed file under `root`; returns the paths whose content differs.
    pub fn verify(&self, root: &Path) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for e in &self.files {
            let data = fs::read(root.join(&e.path))?;
            if sha256_hex(&data) != e.sha256 {
                bad.push(e.path.clone());
            }
        }
        Ok(bad)
    }
}

/// File name of the manifest written by [`ArtifactWriter::finish`].
pub const MANIFEST_NAME: &str = "manifest.json";

/// Writes files below one directory and records them in a manifest.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    manifest: Manifest,
}

impl ArtifactWriter {
    pub fn new(root: &Path, scenario: &str, seed: Option<u64>) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(ArtifactWriter {
            root: root.to_path_buf(),
            manifest: Manifest { scenario: scenario.to_string(), seed, files: Vec::new() },
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes `contents` to `rel` (a `/`-separated relative path).
    pub fn write(&mut self, rel: &str, contents: &[u8]) -> Result<()> {
        if rel.is_empty() || Path::new(rel).is_absolute() || rel.split('/').any(|c| c == "..") {
            return Err(Error::Config(format!("invalid artifact path {rel:?}")));
        }
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
        self.manifest.files.retain(|e| e.path != rel);
        self.manifest.files.push(ManifestEntry { path: rel.to_string(), sha256: sha256_hex(contents), bytes: contents.len() });
        Ok(())
    }

    pub fn write_json(&mut self, rel: &str, value: &serde_json::Value) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(rel, s.as_bytes())
    }

    pub fn write_svg(&mut self, rel: &str, polylines: &[Polyline], style: &SvgStyle) -> Result<()> {
        let svg = render_svg(polylines, style)?;
        self.write(rel, svg.as_bytes())
    }

    /// Writes the manifest and returns it.
    pub fn finish(mut self) -> Result<Manifest> {
        self.manifest.files.sort_by(|a, b| a.path.cmp(&b.path));
        let mut s = serde_json::to_string_pretty(&self.manifest)?;
        s.push('\n');
        fs::write(self.root.join(MANIFEST_NAME), s)?;
        Ok(self.manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                (t.cos(), t.sin())
            })
            .collect()
    }

    #[test]
    fn single_closed_path() {
        let svg = render_svg(&[Polyline::new(circle(64), true, "black")], &SvgStyle::default()).unwrap();
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains("Z\""));
        assert!(svg.starts_with("<?xml"));
    }

    #[test]
    fn byte_stable() {
        let p = vec![Polyline::new(circle(50), true, "#123456"), Polyline::new(vec![(0.0, 0.0), (2.0, 1.0)], false, "red")];
        let a = render_svg(&p, &SvgStyle::default()).unwrap();
        let b = render_svg(&p, &SvgStyle::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<path").count(), 2);
    }

    #[test]
    fn equal_aspect() {
        let svg = render_svg(&[Polyline::new(vec![(0.0, 0.0), (2.0, 1.0)], false, "k")], &SvgStyle::default()).unwrap();
        assert!(svg.contains(r#"width="480.0" height="261.8""#), "{svg}");
    }

    #[test]
    fn empty_input_rejected() {
        assert!(render_svg(&[], &SvgStyle::default()).is_err());
    }

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::new(dir.path(), "test", Some(3)).unwrap();
        w.write("a.csv", b"x\n1\n").unwrap();
        w.write("sub/b.csv", b"y\n").unwrap();
        assert!(w.write("../c", b"").is_err());
        let m = w.finish().unwrap();
        assert_eq!(m.files.len(), 2);
        assert!(m.verify(dir.path()).unwrap().is_empty());
        fs::write(dir.path().join("a.csv"), b"changed").unwrap();
        assert_eq!(m.verify(dir.path()).unwrap(), vec!["a.csv".to_string()]);
        assert!(dir.path().join(MANIFEST_NAME).exists());
    }
}
