use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use neel_core::geometry::{Model, Sign, WallConfig};
use neel_core::micromag::SimulationParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything a run can be configured with. The JSON config file uses the same
/// field names; command-line flags take precedence over file values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub model: Option<Model>,
    pub alpha: Option<f64>,
    pub positions: Option<Vec<f64>>,
    pub signs: Option<Vec<Sign>>,
    /// Number of walls when positions are generated.
    pub n: Option<usize>,
    pub epsilon: Option<f64>,
    pub epsilons: Option<Vec<f64>>,
    pub nodes: Option<usize>,
    pub pad_factor: Option<usize>,
    pub half_width: Option<f64>,
    pub pin_separation: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub trace_every: Option<usize>,
    /// Second set of positions for a paired fit.
    pub compare_positions: Option<Vec<f64>>,
    pub starts: Option<usize>,
    pub path: Option<String>,
    pub eta_min: Option<f64>,
    pub eta_max: Option<f64>,
    pub points: Option<usize>,
    pub init: Option<PathBuf>,
    pub suite: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub svg: Option<bool>,
    pub seed: Option<u64>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl RunConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Values set in `flags` replace those in `self`.
    pub fn overlay(mut self, flags: &RunConfig) -> Self {
        overlay!(self, flags; command, model, alpha, positions, signs, n, epsilon, epsilons, nodes, pad_factor,
            half_width, pin_separation, tol, max_iter, trace_every, compare_positions, starts, path, eta_min,
            eta_max, points, init, suite, out_dir, format, svg, seed);
        self
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("neel-out"))
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(7)
    }

    pub fn model(&self) -> Result<Model> {
        self.model.context("missing --model (confined or unconfined)")
    }

    pub fn alpha(&self) -> Result<f64> {
        self.alpha.context("missing --alpha")
    }

    /// Signs expanded to `n` walls; a single sign with `n > 1` means alternating.
    fn resolved_signs(&self, n: usize) -> Result<Vec<Sign>> {
        match &self.signs {
            Some(s) if s.len() == n => Ok(s.clone()),
            Some(s) if s.len() == 1 => Ok(Sign::alternating(n, s[0])),
            Some(s) => bail!("{} signs given for {n} walls", s.len()),
            None => Ok(Sign::alternating(n, Sign::Plus)),
        }
    }

    fn default_positions(model: Model, n: usize) -> Vec<f64> {
        match model {
            Model::Confined => (0..n).map(|i| -1.0 + 2.0 * (i + 1) as f64 / (n + 1) as f64).collect(),
            Model::Unconfined => (0..n).map(|i| i as f64 - 0.5 * (n - 1) as f64).collect(),
        }
    }

    fn config_with(&self, positions: Option<&Vec<f64>>) -> Result<WallConfig> {
        let model = self.model()?;
        let alpha = self.alpha()?;
        let n = match (positions, self.n, &self.signs) {
            (Some(p), _, _) => p.len(),
            (None, Some(n), _) => n,
            (None, None, Some(s)) => s.len(),
            (None, None, None) => bail!("give wall positions (--walls/--positions) or a wall count (--n)"),
        };
        if n == 0 {
            bail!("at least one wall is needed");
        }
        if let (Some(p), Some(k)) = (positions, self.n) {
            if p.len() != k {
                bail!("--n {k} disagrees with {} positions", p.len());
            }
        }
        let a = positions.cloned().unwrap_or_else(|| Self::default_positions(model, n));
        Ok(WallConfig::new(model, alpha, a, self.resolved_signs(n)?)?)
    }

    pub fn wall_config(&self) -> Result<WallConfig> {
        self.config_with(self.positions.as_ref())
    }

    pub fn compare_config(&self) -> Result<Option<WallConfig>> {
        match &self.compare_positions {
            Some(p) => Ok(Some(self.config_with(Some(p))?)),
            None => Ok(None),
        }
    }

    pub fn simulation_params(&self) -> Result<SimulationParams> {
        let d = SimulationParams::default();
        let p = SimulationParams {
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            nodes: self.nodes.unwrap_or(d.nodes),
            pad_factor: self.pad_factor.unwrap_or(d.pad_factor),
            half_width: self.half_width.or(d.half_width),
            pin_separation: self.pin_separation.unwrap_or(d.pin_separation),
            tol: self.tol.unwrap_or(d.tol),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            trace_every: self.trace_every.unwrap_or(d.trace_every),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.epsilons.clone().unwrap_or_else(|| vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4])
    }
}

/// `a:d` pairs such as `-0.3:+1,0.4:-1`.
pub fn parse_walls(spec: &str) -> Result<(Vec<f64>, Vec<Sign>)> {
    let mut a = vec![];
    let mut d = vec![];
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (p, s) = item.rsplit_once(':').with_context(|| format!("wall '{item}' is not of the form position:sign"))?;
        a.push(p.trim().parse::<f64>().with_context(|| format!("bad wall position '{p}'"))?);
        d.push(s.parse::<Sign>()?);
    }
    if a.is_empty() {
        bail!("no walls in '{spec}'");
    }
    Ok((a, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walls_parse() {
        let (a, d) = parse_walls("-0.3:+1, 0.4:-").unwrap();
        assert_eq!(a, vec![-0.3, 0.4]);
        assert_eq!(d, vec![Sign::Plus, Sign::Minus]);
        assert!(parse_walls("0.1").is_err());
        assert!(parse_walls("0.1:2").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig { alpha: Some(1.0), nodes: Some(64), ..Default::default() };
        let flags = RunConfig { alpha: Some(2.0), ..Default::default() };
        let m = file.overlay(&flags);
        assert_eq!(m.alpha, Some(2.0));
        assert_eq!(m.nodes, Some(64));
    }

    #[test]
    fn single_sign_alternates() {
        let c = RunConfig {
            model: Some(Model::Confined),
            alpha: Some(1.0),
            n: Some(3),
            signs: Some(vec![Sign::Minus]),
            ..Default::default()
        };
        let w = c.wall_config().unwrap();
        assert_eq!(w.signs(), &[Sign::Minus, Sign::Plus, Sign::Minus]);
        assert_eq!(w.positions(), &[-0.5, 0.0, 0.5]);
    }
}
