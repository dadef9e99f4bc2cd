//! Experiment configuration files.
//!
//! Configs are TOML. Every table rejects unknown keys so that a typo is a
//! config error instead of a silently ignored setting.

use std::path::Path;

use serde::{Deserialize, Serialize};
use symdesign::dynamics::{Boundary, IsingSpec, Method, TimeGrid};
use symdesign::ensemble::BasisSpec;
use symdesign::linalg::Operator;
use symdesign::moments::MomentBudget;
use symdesign::rng::stream_id;
use symdesign::symmetry::{ReflectionAxis, SectorKind, Sign};
use symdesign::C64;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    DesignScan,
    ViolationScan,
    MomentCheck,
    Dynamics,
    RmtBaseline,
    TransitionScan,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::DesignScan,
        ExperimentKind::ViolationScan,
        ExperimentKind::MomentCheck,
        ExperimentKind::Dynamics,
        ExperimentKind::RmtBaseline,
        ExperimentKind::TransitionScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::DesignScan => "design-scan",
            ExperimentKind::ViolationScan => "violation-scan",
            ExperimentKind::MomentCheck => "moment-check",
            ExperimentKind::Dynamics => "dynamics",
            ExperimentKind::RmtBaseline => "rmt-baseline",
            ExperimentKind::TransitionScan => "transition-scan",
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: ExperimentKind,
    /// Defaults to the experiment name.
    pub id: Option<String>,
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_orders")]
    pub t: Vec<usize>,
    pub threads: Option<usize>,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub sector: Vec<SectorConfig>,
    #[serde(default)]
    pub basis: Vec<BasisConfig>,
    #[serde(default)]
    pub budget: BudgetConfig,
    #[serde(default)]
    pub output: OutputConfig,
    pub design: Option<DesignConfig>,
    pub violation: Option<ViolationConfig>,
    pub moment: Option<MomentConfig>,
    pub dynamics: Option<DynamicsConfig>,
    pub transition: Option<TransitionConfig>,
}

fn default_samples() -> usize {
    10
}

fn default_orders() -> Vec<usize> {
    vec![1, 2, 3]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub n_a: usize,
    pub n_b: SiteRange,
    #[serde(default = "default_local_dim")]
    pub local_dim: usize,
}

fn default_local_dim() -> usize {
    2
}

/// A single `N_B`, a list, or an inclusive range `{ from, to }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SiteRange {
    One(usize),
    List(Vec<usize>),
    Range { from: usize, to: usize },
}

impl SiteRange {
    pub fn values(&self) -> Vec<usize> {
        match self {
            SiteRange::One(n) => vec![*n],
            SiteRange::List(v) => v.clone(),
            SiteRange::Range { from, to } => (*from..=*to).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SectorConfig {
    Identity,
    Translation {
        k: usize,
    },
    Z2 {
        parity: u8,
    },
    Reflection {
        /// `+1` or `-1`.
        sign: i8,
        /// Fixed site of the reflection; the mirror `s -> N-1-s` when absent.
        site: Option<usize>,
    },
    U1 {
        charge: i64,
    },
    TranslationPlusReflections,
}

impl SectorConfig {
    pub fn kind(&self, n: usize) -> Result<SectorKind, CliError> {
        Ok(match *self {
            SectorConfig::Identity => SectorKind::Identity,
            SectorConfig::Translation { k } => SectorKind::Translation { k },
            SectorConfig::Z2 { parity } => SectorKind::Z2 { parity },
            SectorConfig::Reflection { sign, site } => SectorKind::Reflection {
                axis: site.map_or(ReflectionAxis::Mirror, ReflectionAxis::Site),
                sign: match sign {
                    1 => Sign::Plus,
                    -1 => Sign::Minus,
                    other => {
                        return Err(CliError::Config(format!("sector.sign must be 1 or -1, got {other}")))
                    }
                },
            },
            SectorConfig::U1 { charge } => SectorKind::U1 { charge },
            SectorConfig::TranslationPlusReflections => SectorKind::translation_plus_reflections(n),
        })
    }

    /// Value of the `sector` column.
    pub fn name(&self) -> &'static str {
        match self {
            SectorConfig::Identity => "identity",
            SectorConfig::Translation { .. } => "translation",
            SectorConfig::Z2 { .. } => "z2",
            SectorConfig::Reflection { .. } => "reflection",
            SectorConfig::U1 { .. } => "u1",
            SectorConfig::TranslationPlusReflections => "translation_plus_reflections",
        }
    }

    /// Value of the `k` column: momentum, parity, sign or charge.
    pub fn label(&self) -> Option<i64> {
        match *self {
            SectorConfig::Translation { k } => Some(k as i64),
            SectorConfig::Z2 { parity } => Some(parity as i64),
            SectorConfig::Reflection { sign, .. } => Some(sign as i64),
            SectorConfig::U1 { charge } => Some(charge),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisConfig {
    Computational,
    LocalProduct {
        seed: Option<u64>,
        #[serde(default)]
        shared: bool,
    },
    GlobalHaar {
        seed: Option<u64>,
    },
    SigmaX,
    MixedLastSite {
        alpha: f64,
    },
    EigTb {
        #[serde(default = "default_power")]
        power: usize,
    },
    EigTbInserted {
        #[serde(default = "default_power")]
        power: usize,
        seed: Option<u64>,
    },
    /// Columns of a unitary; `im` defaults to zero.
    Custom {
        re: Vec<Vec<f64>>,
        im: Option<Vec<Vec<f64>>>,
    },
}

fn default_power() -> usize {
    1
}

impl BasisConfig {
    /// Basis spec for one `N_B`; unseeded random families derive their seed
    /// from the root seed, the basis position and `N_B`.
    pub fn spec(&self, root: u64, position: usize, n_b: usize) -> Result<BasisSpec, CliError> {
        let derived = |s: Option<u64>| s.unwrap_or_else(|| stream_id(&[root, 0xba51, position as u64, n_b as u64]));
        Ok(match self {
            BasisConfig::Computational => BasisSpec::Computational,
            BasisConfig::LocalProduct { seed, shared } => BasisSpec::LocalProduct { seed: derived(*seed), shared: *shared },
            BasisConfig::GlobalHaar { seed } => BasisSpec::GlobalHaar { seed: derived(*seed) },
            BasisConfig::SigmaX => BasisSpec::SigmaX,
            BasisConfig::MixedLastSite { alpha } => BasisSpec::MixedLastSite { alpha: *alpha },
            BasisConfig::EigTb { power } => BasisSpec::EigTB { power: *power, insertion: None },
            BasisConfig::EigTbInserted { power, seed } => {
                BasisSpec::EigTB { power: *power, insertion: Some(derived(*seed)) }
            }
            BasisConfig::Custom { re, im } => {
                let dim = re.len();
                if re.iter().any(|row| row.len() != dim)
                    || im.as_ref().is_some_and(|m| m.len() != dim || m.iter().any(|r| r.len() != dim))
                {
                    return Err(CliError::Config("basis.re and basis.im must be square and of equal size".into()));
                }
                BasisSpec::Custom(Operator::from_fn(dim, dim, |i, j| {
                    C64::new(re[i][j], im.as_ref().map_or(0.0, |m| m[i][j]))
                }))
            }
        })
    }

    /// Whether the basis needs a dense `d^N_B` matrix.
    pub fn is_dense(&self) -> bool {
        matches!(self, BasisConfig::GlobalHaar { .. } | BasisConfig::EigTbInserted { .. } | BasisConfig::Custom { .. })
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            BasisConfig::MixedLastSite { alpha } => Some(*alpha),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    #[serde(default = "default_max_order")]
    pub max_order: usize,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

fn default_max_order() -> usize {
    MomentBudget::default().max_order
}

fn default_max_dim() -> usize {
    MomentBudget::default().max_dim
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self { max_order: default_max_order(), max_dim: default_max_dim() }
    }
}

impl BudgetConfig {
    pub fn budget(&self) -> MomentBudget {
        MomentBudget { max_order: self.max_order, max_dim: self.max_dim }
    }
}

/// Output file names, relative to the `--out` directory.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Defaults to `<id>.csv`.
    pub csv: Option<String>,
    /// Defaults to `<id>.json`.
    pub json: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    /// Also scan Haar-random generator states as a benchmark.
    #[serde(default)]
    pub haar_benchmark: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViolationConfig {
    /// Emit one row per basis vector as well as the totals.
    #[serde(default)]
    pub profile: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentMode {
    /// Sampled sector states against the analytic sector moment.
    #[default]
    Sector,
    /// Projected ensembles of Z2 states in the sigma^x basis against the
    /// Z2 reference moment.
    Z2Sigmax,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentConfig {
    #[serde(default)]
    pub mode: MomentMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryName {
    Periodic,
    Open,
    WeakLink,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisorderName {
    None,
    Bond,
    Field,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Auto,
    Dense,
    Krylov,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start: f64,
    pub switch: f64,
    pub end: f64,
    pub log_points: usize,
    pub linear_points: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    #[serde(default = "default_boundary")]
    pub boundary: BoundaryName,
    /// Strength of the bond between the last and the first site for
    /// `boundary = "weak-link"`.
    #[serde(default = "default_weak_link")]
    pub j_1n: f64,
    pub hx: Option<f64>,
    pub hy: Option<f64>,
    pub j: Option<f64>,
    #[serde(default = "default_disorder")]
    pub disorder: DisorderName,
    #[serde(default)]
    pub variances: Vec<f64>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default = "default_method")]
    pub method: MethodName,
    #[serde(default = "default_krylov_dim")]
    pub krylov_dim: usize,
    #[serde(default = "default_krylov_tol")]
    pub krylov_tol: f64,
    #[serde(default = "default_fit_window")]
    pub fit_window: [f64; 2],
    #[serde(default = "default_tail")]
    pub long_time_fraction: f64,
    /// Explicit times; overrides `grid`.
    pub times: Option<Vec<f64>>,
    pub grid: Option<GridConfig>,
}

fn default_boundary() -> BoundaryName {
    BoundaryName::Periodic
}
fn default_weak_link() -> f64 {
    0.5
}
fn default_disorder() -> DisorderName {
    DisorderName::None
}
fn default_realizations() -> usize {
    10
}
fn default_method() -> MethodName {
    MethodName::Auto
}
fn default_krylov_dim() -> usize {
    30
}
fn default_krylov_tol() -> f64 {
    1e-9
}
fn default_fit_window() -> [f64; 2] {
    [1.0, 4.0]
}
fn default_tail() -> f64 {
    0.3
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        toml::from_str("").expect("all dynamics keys have defaults")
    }
}

impl DynamicsConfig {
    pub fn time_grid(&self) -> TimeGrid {
        match (&self.times, &self.grid) {
            (Some(t), _) => TimeGrid::Explicit(t.clone()),
            (None, Some(g)) => TimeGrid::LogLinear {
                start: g.start,
                switch: g.switch,
                end: g.end,
                log_points: g.log_points,
                linear_points: g.linear_points,
            },
            (None, None) => TimeGrid::default(),
        }
    }

    pub fn method(&self, n: usize) -> Method {
        match self.method {
            MethodName::Auto => match Method::auto(n) {
                Method::Krylov { .. } => Method::Krylov { dim: self.krylov_dim, tol: self.krylov_tol },
                dense => dense,
            },
            MethodName::Dense => Method::DenseEig,
            MethodName::Krylov => Method::Krylov { dim: self.krylov_dim, tol: self.krylov_tol },
        }
    }

    /// Clean spec on `n` sites.
    pub fn ising(&self, n: usize) -> IsingSpec {
        let mut spec = IsingSpec::chaotic(n);
        spec.hx = self.hx.unwrap_or(spec.hx);
        spec.hy = self.hy.unwrap_or(spec.hy);
        spec.j = self.j.unwrap_or(spec.j);
        spec.boundary = match self.boundary {
            BoundaryName::Periodic => Boundary::Periodic,
            BoundaryName::Open => Boundary::Open,
            BoundaryName::WeakLink => Boundary::WeakLink(self.j_1n),
        };
        spec
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionConfig {
    /// Explicit mixing parameters; overrides `alpha_points`.
    pub alphas: Option<Vec<f64>>,
    /// Number of evenly spaced points in `[0, 1]`.
    #[serde(default = "default_alpha_points")]
    pub alpha_points: usize,
}

fn default_alpha_points() -> usize {
    11
}

impl Default for TransitionConfig {
    fn default() -> Self {
        Self { alphas: None, alpha_points: default_alpha_points() }
    }
}

impl TransitionConfig {
    pub fn alphas(&self) -> Vec<f64> {
        match &self.alphas {
            Some(a) => a.clone(),
            None if self.alpha_points < 2 => vec![0.0],
            None => (0..self.alpha_points).map(|i| i as f64 / (self.alpha_points - 1) as f64).collect(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn id(&self) -> String {
        self.id.clone().unwrap_or_else(|| self.experiment.name().to_string())
    }

    pub fn n_b_values(&self) -> Vec<usize> {
        self.geometry.n_b.values()
    }

    /// Stream id of one work item.
    pub fn stream(&self, coords: &[u64]) -> u64 {
        let mut parts = vec![self.experiment.tag()];
        parts.extend_from_slice(coords);
        stream_id(&parts)
    }

    pub fn dynamics(&self) -> DynamicsConfig {
        self.dynamics.clone().unwrap_or_default()
    }

    pub fn moment_mode(&self) -> MomentMode {
        self.moment.as_ref().map(|m| m.mode).unwrap_or_default()
    }

    pub fn transition(&self) -> TransitionConfig {
        self.transition.clone().unwrap_or_default()
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let kind = self.experiment;
        let sections = [
            ("design", self.design.is_some(), ExperimentKind::DesignScan),
            ("violation", self.violation.is_some(), ExperimentKind::ViolationScan),
            ("moment", self.moment.is_some(), ExperimentKind::MomentCheck),
            ("dynamics", self.dynamics.is_some(), ExperimentKind::Dynamics),
            ("transition", self.transition.is_some(), ExperimentKind::TransitionScan),
        ];
        for (name, present, owner) in sections {
            if present && owner != kind {
                return bad(format!("[{name}] does not apply to experiment \"{}\"", kind.name()));
            }
        }
        if self.n_b_values().is_empty() {
            return bad("geometry.n_b is empty".into());
        }
        if self.geometry.local_dim < 2 {
            return bad(format!("geometry.local_dim must be >= 2, got {}", self.geometry.local_dim));
        }
        if self.samples == 0 {
            return bad("samples must be positive".into());
        }
        if self.t.is_empty() || self.t.contains(&0) {
            return bad("t must be a nonempty list of positive orders".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        let needs_sector = !matches!(kind, ExperimentKind::Dynamics);
        if needs_sector && self.sector.is_empty() {
            return bad(format!("experiment \"{}\" needs at least one [[sector]]", kind.name()));
        }
        if kind == ExperimentKind::Dynamics && !self.sector.is_empty() {
            return bad("[[sector]] does not apply to dynamics".into());
        }
        match kind {
            ExperimentKind::RmtBaseline => {
                if self.sector.iter().any(|s| {
                    !matches!(s, SectorConfig::Translation { .. } | SectorConfig::TranslationPlusReflections)
                }) {
                    return bad("rmt-baseline sectors must be translation or translation_plus_reflections".into());
                }
            }
            ExperimentKind::DesignScan | ExperimentKind::ViolationScan if self.basis.is_empty() => {
                return bad(format!("experiment \"{}\" needs at least one [[basis]]", kind.name()));
            }
            _ => {}
        }
        let z2_only = kind == ExperimentKind::TransitionScan
            || (kind == ExperimentKind::MomentCheck && self.moment_mode() == MomentMode::Z2Sigmax);
        if z2_only {
            if self.sector.iter().any(|s| !matches!(s, SectorConfig::Z2 { .. })) {
                return bad(format!("{} sectors must be z2", kind.name()));
            }
            if !self.basis.is_empty() {
                return bad(format!("{} fixes its own bases; remove [[basis]]", kind.name()));
            }
        }
        if kind == ExperimentKind::MomentCheck && self.moment_mode() == MomentMode::Sector && !self.basis.is_empty() {
            return bad("moment-check in sector mode takes no [[basis]]".into());
        }
        if kind == ExperimentKind::TransitionScan {
            for a in self.transition().alphas() {
                if !(0.0..=1.0).contains(&a) {
                    return bad(format!("transition.alphas must lie in [0, 1], got {a}"));
                }
            }
        }
        for b in &self.basis {
            if let BasisConfig::MixedLastSite { alpha } = b {
                if !(0.0..=1.0).contains(alpha) {
                    return bad(format!("basis.alpha must lie in [0, 1], got {alpha}"));
                }
            }
        }
        if kind == ExperimentKind::Dynamics {
            let d = self.dynamics();
            if self.geometry.local_dim != 2 {
                return bad("dynamics needs geometry.local_dim = 2".into());
            }
            if d.disorder == DisorderName::None && !d.variances.is_empty() {
                return bad("dynamics.variances needs dynamics.disorder = \"bond\" or \"field\"".into());
            }
            if d.disorder != DisorderName::None && d.variances.is_empty() {
                return bad("dynamics.disorder needs a nonempty dynamics.variances".into());
            }
            if d.disorder != DisorderName::None && d.boundary != BoundaryName::Periodic {
                return bad("disorder is only defined for boundary = \"periodic\"".into());
            }
            if d.realizations == 0 {
                return bad("dynamics.realizations must be positive".into());
            }
            if !(d.fit_window[0] > 0.0 && d.fit_window[1] > d.fit_window[0]) {
                return bad(format!("dynamics.fit_window must satisfy 0 < lo < hi, got {:?}", d.fit_window));
            }
            d.time_grid().times().map_err(|e| CliError::Config(format!("dynamics time grid: {e}")))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
experiment = "design-scan"
seed = 3
[geometry]
n_a = 2
n_b = { from = 2, to = 4 }
[[sector]]
kind = "translation"
k = 0
[[basis]]
family = "computational"
"#;

    #[test]
    fn minimal_config() {
        let c = Config::parse(MINIMAL).unwrap();
        assert_eq!(c.n_b_values(), vec![2, 3, 4]);
        assert_eq!(c.samples, 10);
        assert_eq!(c.t, vec![1, 2, 3]);
        assert_eq!(c.id(), "design-scan");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let typo = MINIMAL.replace("seed = 3", "seed = 3\nsampels = 4");
        assert!(matches!(Config::parse(&typo), Err(CliError::Config(m)) if m.contains("sampels")));
        let bad_family = MINIMAL.replace("\"computational\"", "\"computationl\"");
        assert!(matches!(Config::parse(&bad_family), Err(CliError::Config(m)) if m.contains("family")));
    }

    #[test]
    fn foreign_sections_are_rejected() {
        let c = format!("{MINIMAL}\n[dynamics]\nboundary = \"open\"\n");
        assert!(Config::parse(&c).is_err());
    }

    #[test]
    fn alpha_grid() {
        let t = TransitionConfig { alphas: None, alpha_points: 5 };
        assert_eq!(t.alphas(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
