use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{Format, RunConfig};

/// Writes under the output directory through a temporary file and a rename.
pub struct Sink {
    dir: PathBuf,
    format: Format,
    svg: bool,
    written: Vec<String>,
}

impl Sink {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let dir = cfg.out_dir();
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir, format: cfg.format(), svg: cfg.svg.unwrap_or(false), written: vec![] })
    }

    pub fn svg_enabled(&self) -> bool {
        self.svg
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp-{}", std::process::id()));
        std::fs::write(&tmp, data).with_context(|| format!("writing {}", tmp.display()))?;
        std::fs::rename(&tmp, &path).with_context(|| format!("renaming to {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.bytes(name, s.as_bytes())
    }

    /// A table of flat rows as `<stem>.csv` or `<stem>.json`, per the configured format.
    pub fn table<T: Serialize>(&mut self, stem: &str, rows: &[T]) -> Result<PathBuf> {
        match self.format {
            Format::Json => self.json(&format!("{stem}.json"), rows),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(vec![]);
                for r in rows {
                    w.serialize(r)?;
                }
                let data = w.into_inner().map_err(|e| anyhow::anyhow!("csv: {e}"))?;
                self.bytes(&format!("{stem}.csv"), &data)
            }
        }
    }

    pub fn svg(&mut self, name: &str, chart: &Chart) -> Result<()> {
        if self.svg {
            self.bytes(name, chart.render().as_bytes())?;
        }
        Ok(())
    }

    /// `run-manifest.json` with the resolved configuration and the files written.
    pub fn manifest(&mut self, cfg: &RunConfig, extra: serde_json::Value) -> Result<()> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            tool: &'static str,
            version: &'static str,
            threads: usize,
            config: &'a RunConfig,
            resolved: serde_json::Value,
            outputs: Vec<String>,
        }
        let m = Manifest {
            tool: "neel",
            version: env!("CARGO_PKG_VERSION"),
            threads: rayon::current_num_threads(),
            config: cfg,
            resolved: extra,
            outputs: self.written.clone(),
        };
        self.json("run-manifest.json", &m)?;
        Ok(())
    }
}

/// Line chart over one or more series.
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

const COLOURS: [&str; 4] = ["#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad"];

impl Chart {
    pub fn render(&self) -> String {
        let (w, h, m) = (640.0, 400.0, 60.0);
        let tx = |x: f64| if self.log_x { x.log10() } else { x };
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|(_, s)| s.iter().map(|&(x, y)| (tx(x), y)))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
        );
        if !(x1 > x0) {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if !(y1 > y0) {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let px = |x: f64| m + (tx(x) - x0) / (x1 - x0) * (w - 2.0 * m);
        let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, esc(&self.title));
        let _ = writeln!(
            s,
            r#"<path d="M{m} {} H{} M{m} {} V{m}" stroke="black" fill="none"/>"#,
            h - m,
            w - m,
            h - m
        );
        for k in 0..=4 {
            let fx = x0 + (x1 - x0) * k as f64 / 4.0;
            let fy = y0 + (y1 - y0) * k as f64 / 4.0;
            let gx = m + (w - 2.0 * m) * k as f64 / 4.0;
            let gy = h - m - (h - 2.0 * m) * k as f64 / 4.0;
            let lx = if self.log_x { format!("1e{fx:.1}") } else { format!("{fx:.3}") };
            let _ = writeln!(s, r#"<text x="{gx}" y="{}" text-anchor="middle">{lx}</text>"#, h - m + 16.0);
            let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{fy:.4}</text>"#, m - 4.0, gy + 4.0);
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w / 2.0, h - 16.0, esc(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            h / 2.0,
            h / 2.0,
            esc(&self.y_label)
        );
        for (i, (name, data)) in self.series.iter().enumerate() {
            let c = COLOURS[i % COLOURS.len()];
            let d: Vec<String> = data
                .iter()
                .filter(|(x, y)| tx(*x).is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(s, r#"<polyline points="{}" stroke="{c}" fill="none" stroke-width="1.5"/>"#, d.join(" "));
            let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{c}">{}</text>"#, w - m - 120.0, m + 16.0 * i as f64, esc(name));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
