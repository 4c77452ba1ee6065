use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::gfun::GSpec;
use crate::ensembles::EnsembleSpec;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::spectral::ComplexGrid;

/// A builtin name or an inline ensemble document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnsembleRef {
    Name(String),
    Spec(EnsembleSpec),
}

impl EnsembleRef {
    pub fn resolve(&self) -> Result<EnsembleSpec> {
        match self {
            EnsembleRef::Name(name) => EnsembleSpec::parse(name),
            EnsembleRef::Spec(spec) => Ok(spec.clone()),
        }
    }
}

impl From<EnsembleSpec> for EnsembleRef {
    fn from(spec: EnsembleSpec) -> Self {
        EnsembleRef::Spec(spec)
    }
}

/// A 1-based eigenvalue index, absolute or relative to `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexRule {
    /// `i` itself.
    Index(usize),
    /// `round(fraction * n)`, at least 1.
    Fraction(f64),
    /// `n - offset`.
    FromTop(usize),
}

impl IndexRule {
    pub fn resolve(self, n: usize) -> Result<usize> {
        let i = match self {
            IndexRule::Index(i) => i,
            IndexRule::Fraction(f) => ((f * n as f64).round() as usize).max(1),
            IndexRule::FromTop(k) => n.saturating_sub(k),
        };
        if i == 0 || i > n {
            return Err(Error::Config(format!("index rule {self:?} gives {i}, outside 1..={n}")));
        }
        Ok(i)
    }
}

/// Parses `n`, `n-K`, `n/K`, a fraction such as `0.5`, or a plain index.
impl FromStr for IndexRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Config(format!("index `{s}` is not n, n-K, n/K, a fraction or an integer"));
        if t == "n" {
            return Ok(IndexRule::FromTop(0));
        }
        if let Some(k) = t.strip_prefix("n-") {
            return k.trim().parse().map(IndexRule::FromTop).map_err(|_| bad());
        }
        if let Some(k) = t.strip_prefix("n/") {
            let k: f64 = k.trim().parse().map_err(|_| bad())?;
            return if k >= 1.0 { Ok(IndexRule::Fraction(1.0 / k)) } else { Err(bad()) };
        }
        if t.contains('.') {
            let f: f64 = t.parse().map_err(|_| bad())?;
            return if f > 0.0 && f <= 1.0 { Ok(IndexRule::Fraction(f)) } else { Err(bad()) };
        }
        t.parse().map(IndexRule::Index).map_err(|_| bad())
    }
}

/// What each trial measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statistic {
    /// `(λ_{n−j}(W_n) − 2) n^{2/3}` for `j < k`.
    EdgeTopK { k: usize },
    /// Mirror image at the bottom edge.
    EdgeBottomK { k: usize },
    /// `A`-scale gap `λ_{i+1}(A_n) − λ_i(A_n)`; `i = n` means the top gap
    /// `λ_n − λ_{n−1}`.
    GapAt { index: IndexRule, c0: f64 },
    /// `N_I` against `n ∫_I ρ_sc`.
    Esd { interval: Interval, delta: f64 },
    DelocSup,
    StieltjesGrid { grid: String },
    /// Distance of `λ_n(W_n)` to the top of the minor against the top gap.
    InterlaceBias,
    /// Projection of a column onto `d` minor eigenvectors.
    Projection { d: usize },
    /// `G(λ_{i_1}(A_n), …, λ_{i_k}(A_n))`.
    FourMoment { g: GSpec, indices: Vec<IndexRule> },
    /// Residuals of the Schur-complement resolvent identity at `z`, the
    /// interlacing identity and the last-coordinate formula at the top
    /// eigenvalue.
    Identities { z_re: f64, z_im: f64 },
}

impl Statistic {
    pub fn label(&self) -> &'static str {
        match self {
            Statistic::EdgeTopK { .. } => "edge_top_k",
            Statistic::EdgeBottomK { .. } => "edge_bottom_k",
            Statistic::GapAt { .. } => "gap_at",
            Statistic::Esd { .. } => "esd",
            Statistic::DelocSup => "deloc_sup",
            Statistic::StieltjesGrid { .. } => "stieltjes_grid",
            Statistic::InterlaceBias => "interlace_bias",
            Statistic::Projection { .. } => "projection",
            Statistic::FourMoment { .. } => "four_moment",
            Statistic::Identities { .. } => "identities",
        }
    }

    pub fn requires_two_ensembles(&self) -> bool {
        matches!(self, Statistic::FourMoment { .. })
    }

    pub(crate) fn grid(&self) -> Result<Option<ComplexGrid>> {
        match self {
            Statistic::StieltjesGrid { grid } => Ok(Some(grid.parse()?)),
            _ => Ok(None),
        }
    }
}

/// Pass/fail parameters. Each statistic reads the fields that apply to it;
/// an absent field means "report only".
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// ESD: `|N_I/n − ∫_I ρ_sc|` bound required in every trial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_fraction_error: Option<f64>,
    /// Delocalization: `C` in `sup ≤ C n^{-1/2} log n`. Projection: `C` in
    /// `|‖π_H X‖ − √d| ≤ C K log n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    /// Fraction of trials that must satisfy a per-trial bound (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_pass_fraction: Option<f64>,
    /// KS level for two-ensemble edge statistics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Gap tail: largest allowed frequency of `gap < n^{-c0}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_frequency: Option<f64>,
    /// Interlace bias: `median(minor distance) ≤ max_ratio · median(top gap)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<f64>,
    /// Stieltjes grid: bound on `|s_n − s|` over every grid point and trial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
    /// Four moment: `diff ≤ stderr_multiple · mc_stderr`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr_multiple: Option<f64>,
    /// Identities: bound on every residual in every trial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub ensembles: Vec<EnsembleRef>,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub statistic: Statistic,
    #[serde(default)]
    pub thresholds: Thresholds,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolved_ensembles(&self) -> Result<Vec<EnsembleSpec>> {
        self.ensembles.iter().map(EnsembleRef::resolve).collect()
    }

    /// Trial-seed labels: ensemble names, with `#2` appended to a repeated
    /// name so two copies of one ensemble draw independent samples.
    pub fn labels(&self) -> Result<Vec<String>> {
        let specs = self.resolved_ensembles()?;
        let mut labels: Vec<String> = Vec::new();
        for s in specs {
            let mut label = s.name().to_string();
            let mut copy = 2;
            while labels.contains(&label) {
                label = format!("{}#{copy}", s.name());
                copy += 1;
            }
            labels.push(label);
        }
        Ok(labels)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.ensembles.is_empty() || self.ensembles.len() > 2 {
            return Err(Error::Config("one or two ensembles are required".into()));
        }
        if self.statistic.requires_two_ensembles() && self.ensembles.len() != 2 {
            return Err(Error::Config(format!(
                "statistic {} compares two ensembles, got {}",
                self.statistic.label(),
                self.ensembles.len()
            )));
        }
        if self.n_values.is_empty() || self.n_values.iter().any(|&n| n < 2) {
            return Err(Error::Config("n_values must be nonempty with every n >= 2".into()));
        }
        self.resolved_ensembles()?;
        self.statistic.grid()?;
        for &n in &self.n_values {
            match &self.statistic {
                Statistic::EdgeTopK { k } | Statistic::EdgeBottomK { k } => {
                    if *k == 0 || *k > n {
                        return Err(Error::Config(format!("k = {k} must be in 1..={n}")));
                    }
                }
                Statistic::GapAt { index, c0 } => {
                    index.resolve(n)?;
                    if !(*c0 > 0.0 && *c0 < 1.0) {
                        return Err(Error::Config("gap c0 must lie in (0, 1)".into()));
                    }
                }
                Statistic::Esd { delta, .. } => {
                    if !(*delta > 0.0 && *delta < 0.5) {
                        return Err(Error::Config("esd delta must lie in (0, 1/2)".into()));
                    }
                }
                Statistic::Identities { z_im, .. } => {
                    if !(*z_im > 0.0) {
                        return Err(Error::Config("identity spectral parameter needs Im z > 0".into()));
                    }
                }
                Statistic::Projection { d } => {
                    if *d > n - 1 {
                        return Err(Error::Config(format!("projection d = {d} exceeds n - 1")));
                    }
                }
                Statistic::FourMoment { g, indices } => {
                    let mut resolved = indices
                        .iter()
                        .map(|r| r.resolve(n))
                        .collect::<Result<Vec<_>>>()?;
                    if resolved.is_empty() || resolved.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(Error::Config(
                            "four-moment indices must be strictly increasing".into(),
                        ));
                    }
                    resolved.dedup();
                    g.validate(resolved.len())?;
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_rules() {
        assert_eq!("n".parse::<IndexRule>().unwrap().resolve(100).unwrap(), 100);
        assert_eq!("n-1".parse::<IndexRule>().unwrap().resolve(100).unwrap(), 99);
        assert_eq!("n/2".parse::<IndexRule>().unwrap().resolve(100).unwrap(), 50);
        assert_eq!("0.25".parse::<IndexRule>().unwrap().resolve(100).unwrap(), 25);
        assert_eq!("7".parse::<IndexRule>().unwrap().resolve(100).unwrap(), 7);
        assert!("0".parse::<IndexRule>().unwrap().resolve(10).is_err());
        assert!("n-10".parse::<IndexRule>().unwrap().resolve(10).is_err());
        assert!("x".parse::<IndexRule>().is_err());
    }

    #[test]
    fn config_json_roundtrip() {
        let text = r#"{
            "name": "esd",
            "ensembles": ["gue", {"name": "g2", "symmetry": "complex_hermitian",
                "offdiag_atom": {"kind": "complex_gaussian", "var_re": 0.5, "var_im": 0.5, "cov": 0.0},
                "diag_atom": {"kind": "real_gaussian", "variance": 1.0}, "c": 1.0}],
            "n_values": [10],
            "trials": 2,
            "master_seed": 3,
            "statistic": {"kind": "esd", "interval": [-1.0, 1.0], "delta": 0.1},
            "thresholds": {"max_fraction_error": 0.02}
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.labels().unwrap(), vec!["gue".to_string(), "g2".to_string()]);
        let again = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = r#"{"name": "x", "ensembles": ["gue"], "n_values": [10], "trials": 1,
            "master_seed": 0, "statistic": {"kind": "edge_top_k", "k": 20}}"#;
        assert!(matches!(ExperimentConfig::from_json(base), Err(Error::Config(_))));
        let unknown = base.replace("\"gue\"", "\"nope\"");
        assert!(ExperimentConfig::from_json(&unknown).is_err());
        let zero = base.replace("\"trials\": 1", "\"trials\": 0");
        assert!(ExperimentConfig::from_json(&zero).is_err());
    }
}
