//! TOML experiment configuration.
//!
//! Every physical quantity carries its unit in the key name, and quantities
//! that can be given in more than one unit accept exactly one spelling:
//!
//! ```toml
//! [scenario]
//! n_eve = 2
//! k_bob_db = 10.0           # or k_bob_linear
//! k_eve_db = 5.0
//! mean_snr_bob_db = 10.0    # omit both mean SNRs and angles when [geometry] is present
//! mean_snr_eve_db = 10.0
//! theta_b_rad = 1.0471975511965976   # or theta_b_deg
//! theta_e_deg = 45.0
//! secrecy_rate_bps_hz = 1.0
//!
//! [experiment]
//! kind = "sweep_tau"
//! n_alice = [2, 3, 4]
//! ```
//!
//! [`ConfigFile`] mirrors the file; [`ConfigFile::resolve`] checks it and
//! produces an [`ExperimentConfig`] in linear units and radians.

use std::fmt;

use serde::{Deserialize, Serialize};
use wiretap_core::localization::AnchorSet;
use wiretap_core::model::{db_to_linear, CartesianPosition, LinkBudget, LinkGeometry, Scenario};

/// A configuration problem, located by field and, where possible, line.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// Dotted field path such as `scenario.k_bob_db`.
    pub field: String,
    /// One-based line in the source text.
    pub line: Option<usize>,
    /// What is wrong.
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}, `{}`: {}", self.field, self.message),
            None => write!(f, "`{}`: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Outage versus `τ` per antenna count.
    SweepTau,
    /// Optimal `τ` and minimum outage per antenna count.
    Optimize,
    /// Minimum outage versus Bob's mean SNR.
    SweepSnr,
    /// Location-averaged outage versus `τ` per ranging accuracy.
    Uncertainty,
    /// Bundled oracle checks with a pass/fail verdict.
    Validate,
    /// Fisher information and location covariance per ranging accuracy.
    Fisher,
}

impl ExperimentKind {
    /// Name used in the config file and report footers.
    pub fn name(self) -> &'static str {
        match self {
            Self::SweepTau => "sweep_tau",
            Self::Optimize => "optimize",
            Self::SweepSnr => "sweep_snr",
            Self::Uncertainty => "uncertainty",
            Self::Validate => "validate",
            Self::Fisher => "fisher",
        }
    }
}

/// How the main channel enters outage curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    /// Average over `n_realizations` main-channel draws.
    Average,
    /// One main-channel draw per antenna count.
    SingleH,
}

/// `[scenario]` table.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(missing_docs)]
pub struct ScenarioSection {
    pub n_eve: Option<usize>,
    pub spacing_alice_wavelengths: Option<f64>,
    pub spacing_eve_wavelengths: Option<f64>,
    pub k_bob_db: Option<f64>,
    pub k_bob_linear: Option<f64>,
    pub k_eve_db: Option<f64>,
    pub k_eve_linear: Option<f64>,
    pub mean_snr_bob_db: Option<f64>,
    pub mean_snr_bob_linear: Option<f64>,
    pub mean_snr_eve_db: Option<f64>,
    pub mean_snr_eve_linear: Option<f64>,
    pub theta_b_rad: Option<f64>,
    pub theta_b_deg: Option<f64>,
    pub theta_e_rad: Option<f64>,
    pub theta_e_deg: Option<f64>,
    pub phi_e_rad: Option<f64>,
    pub phi_e_deg: Option<f64>,
    pub secrecy_rate_bps_hz: Option<f64>,
}

/// `[geometry]` table: positions relative to Alice at the origin plus a link
/// budget, either calibrated to target mean SNRs or given explicitly.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(missing_docs)]
pub struct GeometrySection {
    pub bob_m: Option<[f64; 2]>,
    pub eve_m: Option<[f64; 2]>,
    pub path_loss_exponent: Option<f64>,
    pub calibrate_mean_snr_bob_db: Option<f64>,
    pub calibrate_mean_snr_eve_db: Option<f64>,
    pub transmit_power_w: Option<f64>,
    pub noise_variance_bob_w: Option<f64>,
    pub noise_variance_eve_w: Option<f64>,
}

/// `[anchors]` table: explicit positions, or a circle around Eve's true
/// position (radius 3000 m at 45°, 135°, 225°, 315° when the table is absent).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(missing_docs)]
pub struct AnchorSection {
    pub positions_m: Option<Vec<[f64; 2]>>,
    pub radius_m: Option<f64>,
    pub bearings_deg: Option<Vec<f64>>,
}

/// `[experiment]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(missing_docs)]
pub struct ExperimentSection {
    pub kind: Option<ExperimentKind>,
    pub n_alice: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub grid_size: Option<usize>,
    pub mode: Option<ChannelMode>,
    pub n_realizations: Option<usize>,
    pub n_trials: Option<u64>,
    pub validate: Option<bool>,
    pub validate_taus: Option<Vec<f64>>,
    pub refine_iters: Option<usize>,
    pub mean_snr_bob_db: Option<Vec<f64>>,
    pub oracle_samples: Option<usize>,
    pub oracle_draws: Option<usize>,
    pub range_sigma_m: Option<Vec<f64>>,
    pub n_location_samples: Option<usize>,
    pub n_channel_realizations: Option<usize>,
    pub fix_main_channel: Option<bool>,
    pub evaluate_at_true_location: Option<bool>,
    pub phi_values_rad: Option<Vec<f64>>,
    pub invariant_configs: Option<usize>,
    pub cdf_model_tolerance: Option<f64>,
    pub output_path: Option<String>,
}

/// The configuration file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(missing_docs)]
pub struct ConfigFile {
    pub scenario: ScenarioSection,
    pub experiment: ExperimentSection,
    pub geometry: Option<GeometrySection>,
    pub anchors: Option<AnchorSection>,
}

/// Overrides from the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    /// Experiment named by the subcommand.
    pub kind: Option<ExperimentKind>,
    /// `--seed`.
    pub seed: Option<u64>,
    /// `--trials`.
    pub n_trials: Option<u64>,
    /// `--grid`.
    pub grid_size: Option<usize>,
    /// `--validate`.
    pub validate: bool,
    /// `--quick`: cap every sample count for a fast smoke run.
    pub quick: bool,
}

/// Sample-count caps applied by `--quick`.
pub mod quick {
    /// Monte Carlo trials.
    pub const TRIALS: u64 = 10_000;
    /// Main-channel realizations.
    pub const REALIZATIONS: usize = 1_000;
    /// Location samples and channel draws per location sample.
    pub const LOCATION: usize = 100;
    /// Random-search oracle samples.
    pub const ORACLE_SAMPLES: usize = 10_000;
    /// Main-channel draws for the oracle.
    pub const ORACLE_DRAWS: usize = 5;
    /// Random configurations for the structural invariants.
    pub const INVARIANT_CONFIGS: usize = 20;
}

/// Anchor layout after resolution.
#[derive(Debug, Clone, PartialEq)]
pub enum AnchorLayout {
    /// Fixed positions in meters.
    Positions(Vec<CartesianPosition>),
    /// A circle of anchors around Eve's true position.
    Circle {
        /// Radius in meters.
        radius: f64,
        /// Bearings in radians.
        bearings: Vec<f64>,
    },
}

impl AnchorLayout {
    /// Anchor set for ranging accuracy `range_sigma` (meters) around `eve`.
    pub fn build(
        &self,
        eve: CartesianPosition,
        range_sigma: f64,
    ) -> wiretap_core::Result<AnchorSet> {
        match self {
            Self::Positions(p) => AnchorSet::with_range_sigma(p.clone(), range_sigma),
            Self::Circle { radius, bearings } => {
                AnchorSet::circle(eve, *radius, bearings, range_sigma)
            }
        }
    }
}

const DEFAULT_ANCHOR_RADIUS: f64 = 3000.0;

fn default_bearings() -> Vec<f64> {
    [45.0f64, 135.0, 225.0, 315.0]
        .iter()
        .map(|d| d.to_radians())
        .collect()
}

/// Fully resolved settings in linear units and radians.
#[derive(Debug, Clone, PartialEq)]
#[allow(missing_docs)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Scenario with `n_alice` set to the first requested count.
    pub scenario: Scenario,
    pub geometry: Option<LinkGeometry>,
    pub n_alice: Vec<usize>,
    pub seed: u64,
    pub grid_size: usize,
    pub mode: ChannelMode,
    pub n_realizations: usize,
    pub n_trials: u64,
    pub validate: bool,
    pub validate_taus: Vec<f64>,
    pub refine_iters: usize,
    pub mean_snr_bob_db: Vec<f64>,
    pub oracle_samples: usize,
    pub oracle_draws: usize,
    pub range_sigma_m: Vec<f64>,
    pub n_location_samples: usize,
    pub n_channel_realizations: usize,
    pub fix_main_channel: bool,
    pub evaluate_at_true_location: bool,
    pub phi_values: Vec<f64>,
    pub invariant_configs: usize,
    pub cdf_model_tolerance: f64,
    pub anchors: AnchorLayout,
}

/// Parses TOML text, reporting syntax and type errors with their line.
pub fn parse(text: &str) -> Result<ConfigFile, ConfigError> {
    toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        ConfigError {
            field: "<file>".into(),
            line,
            message: e.message().to_string(),
        }
    })
}

/// Reads and parses a configuration file.
pub fn load(path: &std::path::Path) -> Result<(ConfigFile, String), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        field: "<file>".into(),
        line: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    Ok((parse(&text)?, text))
}

/// Line of `key` inside `[section]`, for diagnostics.
fn line_of(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
        } else if current == section {
            if let Some(rest) = line.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            field: format!("{section}.{key}"),
            line: line_of(self.text, section, key),
            message: message.into(),
        }
    }

    /// Exactly one of two unit spellings, converted to the canonical unit.
    fn one_of(
        &self,
        section: &str,
        (ka, va): (&str, Option<f64>),
        (kb, vb): (&str, Option<f64>),
        convert_b: fn(f64) -> f64,
    ) -> Result<Option<f64>, ConfigError> {
        match (va, vb) {
            (Some(_), Some(_)) => Err(self.err(
                section,
                kb,
                format!("give either `{ka}` or `{kb}`, not both"),
            )),
            (Some(a), None) => self.finite(section, ka, a).map(Some),
            (None, Some(b)) => self.finite(section, kb, b).map(|b| Some(convert_b(b))),
            (None, None) => Ok(None),
        }
    }

    fn finite(&self, section: &str, key: &str, v: f64) -> Result<f64, ConfigError> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.err(section, key, "must be a finite number"))
        }
    }

    fn required<T>(&self, section: &str, key: &str, v: Option<T>) -> Result<T, ConfigError> {
        v.ok_or_else(|| self.err(section, key, "is required"))
    }

    fn positive_count(&self, section: &str, key: &str, v: usize) -> Result<usize, ConfigError> {
        if v == 0 {
            Err(self.err(section, key, "must be at least 1"))
        } else {
            Ok(v)
        }
    }
}

fn deg_to_rad(v: f64) -> f64 {
    v.to_radians()
}

impl ConfigFile {
    /// Applies command-line overrides, then writes every defaulted
    /// experiment setting back into the file so that the serialized form
    /// pins the run completely.
    pub fn with_overrides(mut self, o: &Overrides) -> Self {
        let e = &mut self.experiment;
        if let Some(kind) = o.kind {
            e.kind = Some(kind);
        }
        if let Some(seed) = o.seed {
            e.seed = Some(seed);
        }
        if let Some(t) = o.n_trials {
            e.n_trials = Some(t);
        }
        if let Some(g) = o.grid_size {
            e.grid_size = Some(g);
        }
        if o.validate {
            e.validate = Some(true);
        }
        e.seed.get_or_insert(1);
        e.grid_size.get_or_insert(1001);
        e.mode.get_or_insert(ChannelMode::Average);
        e.n_realizations.get_or_insert(10_000);
        e.n_trials.get_or_insert(1_000_000);
        e.validate.get_or_insert(false);
        e.validate_taus
            .get_or_insert_with(|| vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        e.refine_iters.get_or_insert(60);
        e.oracle_samples.get_or_insert(100_000);
        e.oracle_draws.get_or_insert(20);
        e.n_location_samples.get_or_insert(1_000);
        e.n_channel_realizations.get_or_insert(1_000);
        e.fix_main_channel.get_or_insert(false);
        e.evaluate_at_true_location.get_or_insert(false);
        e.invariant_configs.get_or_insert(100);
        e.cdf_model_tolerance.get_or_insert(0.01);
        e.phi_values_rad.get_or_insert_with(|| {
            use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
            vec![0.0, FRAC_PI_4, FRAC_PI_2, PI]
        });
        if o.quick {
            let cap = |v: &mut Option<usize>, c: usize| *v = v.map(|x| x.min(c));
            e.n_trials = e.n_trials.map(|x| x.min(quick::TRIALS));
            cap(&mut e.n_realizations, quick::REALIZATIONS);
            cap(&mut e.n_location_samples, quick::LOCATION);
            cap(&mut e.n_channel_realizations, quick::LOCATION);
            cap(&mut e.oracle_samples, quick::ORACLE_SAMPLES);
            cap(&mut e.oracle_draws, quick::ORACLE_DRAWS);
            cap(&mut e.invariant_configs, quick::INVARIANT_CONFIGS);
        }
        self
    }

    /// The file with the output path removed, serialized for report footers.
    pub fn to_footer_toml(&self) -> String {
        let mut c = self.clone();
        c.experiment.output_path = None;
        toml::to_string(&c).expect("configuration is always representable as TOML")
    }

    /// Checks the configuration against `text` (used for line numbers).
    pub fn resolve(&self, text: &str) -> Result<ExperimentConfig, ConfigError> {
        let cx = Ctx { text };
        let s = &self.scenario;
        let e = &self.experiment;
        let sc = "scenario";
        let ex = "experiment";

        let k_bob = cx.one_of(
            sc,
            ("k_bob_linear", s.k_bob_linear),
            ("k_bob_db", s.k_bob_db),
            db_to_linear,
        )?;
        let k_bob = cx.required(sc, "k_bob_db", k_bob)?;
        let k_eve = cx.one_of(
            sc,
            ("k_eve_linear", s.k_eve_linear),
            ("k_eve_db", s.k_eve_db),
            db_to_linear,
        )?;
        let k_eve = cx.required(sc, "k_eve_db", k_eve)?;
        let snr_bob = cx.one_of(
            sc,
            ("mean_snr_bob_linear", s.mean_snr_bob_linear),
            ("mean_snr_bob_db", s.mean_snr_bob_db),
            db_to_linear,
        )?;
        let snr_eve = cx.one_of(
            sc,
            ("mean_snr_eve_linear", s.mean_snr_eve_linear),
            ("mean_snr_eve_db", s.mean_snr_eve_db),
            db_to_linear,
        )?;
        let theta_b = cx.one_of(
            sc,
            ("theta_b_rad", s.theta_b_rad),
            ("theta_b_deg", s.theta_b_deg),
            deg_to_rad,
        )?;
        let theta_e = cx.one_of(
            sc,
            ("theta_e_rad", s.theta_e_rad),
            ("theta_e_deg", s.theta_e_deg),
            deg_to_rad,
        )?;
        let phi_e = cx
            .one_of(
                sc,
                ("phi_e_rad", s.phi_e_rad),
                ("phi_e_deg", s.phi_e_deg),
                deg_to_rad,
            )?
            .unwrap_or(0.0);
        let secrecy_rate = cx.finite(
            sc,
            "secrecy_rate_bps_hz",
            cx.required(sc, "secrecy_rate_bps_hz", s.secrecy_rate_bps_hz)?,
        )?;
        let n_eve = cx.positive_count(sc, "n_eve", cx.required(sc, "n_eve", s.n_eve)?)?;
        let spacing_alice = s
            .spacing_alice_wavelengths
            .unwrap_or(wiretap_core::model::DEFAULT_SPACING);
        let spacing_eve = s
            .spacing_eve_wavelengths
            .unwrap_or(wiretap_core::model::DEFAULT_SPACING);

        let n_alice = cx.required(ex, "n_alice", e.n_alice.clone())?;
        if n_alice.is_empty() {
            return Err(cx.err(ex, "n_alice", "must list at least one antenna count"));
        }
        if let Some(&bad) = n_alice.iter().find(|&&n| n < 2) {
            return Err(cx.err(
                ex,
                "n_alice",
                format!("antenna counts must be at least 2, got {bad}"),
            ));
        }

        let geometry = match &self.geometry {
            None => None,
            Some(g) => Some(resolve_geometry(&cx, g)?),
        };
        let (bob_angle, eve_angle, mean_snr_bob, mean_snr_eve) = match geometry {
            Some(_) => {
                for (key, v) in [
                    ("mean_snr_bob_db", snr_bob),
                    ("mean_snr_eve_db", snr_eve),
                    ("theta_b_rad", theta_b),
                    ("theta_e_rad", theta_e),
                ] {
                    if v.is_some() {
                        return Err(cx.err(sc, key, "mean SNRs and angles come from [geometry]; remove them from [scenario]"));
                    }
                }
                (0.0, 0.0, 1.0, 1.0)
            }
            None => (
                cx.required(sc, "theta_b_rad", theta_b)?,
                cx.required(sc, "theta_e_rad", theta_e)?,
                cx.required(sc, "mean_snr_bob_db", snr_bob)?,
                cx.required(sc, "mean_snr_eve_db", snr_eve)?,
            ),
        };
        let base = Scenario {
            n_alice: n_alice[0],
            n_eve,
            spacing_alice,
            spacing_eve,
            k_bob,
            k_eve,
            mean_snr_bob,
            mean_snr_eve,
            bob_angle,
            eve_angle,
            eve_aoa: phi_e,
            secrecy_rate,
        };
        let scenario = match &geometry {
            Some(g) => g
                .apply(&base)
                .map_err(|err| cx.err("geometry", "bob_m", err.to_string()))?,
            None => base,
        };
        scenario.validate().map_err(|err| ConfigError {
            field: "scenario".into(),
            line: None,
            message: err.to_string(),
        })?;

        let kind = cx.required(ex, "kind", e.kind)?;
        let grid_size = e.grid_size.unwrap_or(1001);
        if grid_size < 2 {
            return Err(cx.err(ex, "grid_size", "needs at least 2 points"));
        }
        let count =
            |key: &str, v: Option<usize>, d: usize| cx.positive_count(ex, key, v.unwrap_or(d));
        let n_trials = e.n_trials.unwrap_or(1_000_000);
        if n_trials == 0 {
            return Err(cx.err(ex, "n_trials", "must be at least 1"));
        }
        let validate_taus = e
            .validate_taus
            .clone()
            .unwrap_or_else(|| vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        if validate_taus.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(cx.err(ex, "validate_taus", "every entry must lie in [0, 1]"));
        }
        let mean_snr_bob_db = e.mean_snr_bob_db.clone().unwrap_or_default();
        if kind == ExperimentKind::SweepSnr && mean_snr_bob_db.is_empty() {
            return Err(cx.err(
                ex,
                "mean_snr_bob_db",
                "sweep_snr needs a non-empty list of mean SNRs in dB",
            ));
        }
        if mean_snr_bob_db.iter().any(|v| !v.is_finite()) {
            return Err(cx.err(ex, "mean_snr_bob_db", "entries must be finite"));
        }
        let range_sigma_m = e.range_sigma_m.clone().unwrap_or_default();
        if matches!(kind, ExperimentKind::Uncertainty | ExperimentKind::Fisher) {
            if geometry.is_none() {
                return Err(ConfigError {
                    field: "geometry".into(),
                    line: None,
                    message: format!(
                        "{} needs a [geometry] table with Bob's and Eve's positions",
                        kind.name()
                    ),
                });
            }
            if range_sigma_m.is_empty() {
                return Err(cx.err(
                    ex,
                    "range_sigma_m",
                    "needs a non-empty list of ranging accuracies cσ_t in meters",
                ));
            }
        }
        if range_sigma_m.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(cx.err(
                ex,
                "range_sigma_m",
                "entries must be finite and non-negative",
            ));
        }
        let phi_values = e.phi_values_rad.clone().unwrap_or_else(|| {
            use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
            vec![0.0, FRAC_PI_4, FRAC_PI_2, PI]
        });
        if kind == ExperimentKind::Validate && phi_values.len() < 2 {
            return Err(cx.err(ex, "phi_values_rad", "needs at least two angles"));
        }
        let cdf_model_tolerance = e.cdf_model_tolerance.unwrap_or(0.01);
        if !(cdf_model_tolerance >= 0.0) {
            return Err(cx.err(ex, "cdf_model_tolerance", "must be non-negative"));
        }

        Ok(ExperimentConfig {
            kind,
            scenario,
            geometry,
            n_alice,
            seed: e.seed.unwrap_or(1),
            grid_size,
            mode: e.mode.unwrap_or(ChannelMode::Average),
            n_realizations: count("n_realizations", e.n_realizations, 10_000)?,
            n_trials,
            validate: e.validate.unwrap_or(false),
            validate_taus,
            refine_iters: e.refine_iters.unwrap_or(60),
            mean_snr_bob_db,
            oracle_samples: e.oracle_samples.unwrap_or(100_000),
            oracle_draws: e.oracle_draws.unwrap_or(20),
            range_sigma_m,
            n_location_samples: count("n_location_samples", e.n_location_samples, 1_000)?,
            n_channel_realizations: count(
                "n_channel_realizations",
                e.n_channel_realizations,
                1_000,
            )?,
            fix_main_channel: e.fix_main_channel.unwrap_or(false),
            evaluate_at_true_location: e.evaluate_at_true_location.unwrap_or(false),
            phi_values,
            invariant_configs: count("invariant_configs", e.invariant_configs, 100)?,
            cdf_model_tolerance,
            anchors: resolve_anchors(&cx, self.anchors.as_ref())?,
        })
    }
}

fn position(
    cx: &Ctx<'_>,
    section: &str,
    key: &str,
    v: [f64; 2],
) -> Result<CartesianPosition, ConfigError> {
    CartesianPosition::new(v[0], v[1]).map_err(|e| cx.err(section, key, e.to_string()))
}

fn resolve_geometry(cx: &Ctx<'_>, g: &GeometrySection) -> Result<LinkGeometry, ConfigError> {
    let sec = "geometry";
    let bob = position(cx, sec, "bob_m", cx.required(sec, "bob_m", g.bob_m)?)?;
    let eve = position(cx, sec, "eve_m", cx.required(sec, "eve_m", g.eve_m)?)?;
    let eta = cx.required(sec, "path_loss_exponent", g.path_loss_exponent)?;
    let origin = CartesianPosition::ORIGIN;
    let calibrated = g.calibrate_mean_snr_bob_db.is_some() || g.calibrate_mean_snr_eve_db.is_some();
    let explicit = g.transmit_power_w.is_some()
        || g.noise_variance_bob_w.is_some()
        || g.noise_variance_eve_w.is_some();
    let budget = match (calibrated, explicit) {
        (true, true) => {
            return Err(cx.err(
                sec,
                "transmit_power_w",
                "give either calibrate_mean_snr_*_db or transmit_power_w with noise_variance_*_w, not both",
            ))
        }
        (true, false) => LinkBudget::calibrated(
            eta,
            bob.distance_to(&origin),
            db_to_linear(cx.required(sec, "calibrate_mean_snr_bob_db", g.calibrate_mean_snr_bob_db)?),
            eve.distance_to(&origin),
            db_to_linear(cx.required(sec, "calibrate_mean_snr_eve_db", g.calibrate_mean_snr_eve_db)?),
        ),
        (false, true) => LinkBudget::new(
            cx.required(sec, "transmit_power_w", g.transmit_power_w)?,
            eta,
            cx.required(sec, "noise_variance_bob_w", g.noise_variance_bob_w)?,
            cx.required(sec, "noise_variance_eve_w", g.noise_variance_eve_w)?,
        ),
        (false, false) => {
            return Err(cx.err(
                sec,
                "calibrate_mean_snr_bob_db",
                "a link budget is required: calibrate_mean_snr_*_db or transmit_power_w with noise_variance_*_w",
            ))
        }
    }
    .map_err(|e| cx.err(sec, "path_loss_exponent", e.to_string()))?;
    Ok(LinkGeometry { budget, bob, eve })
}

fn resolve_anchors(cx: &Ctx<'_>, a: Option<&AnchorSection>) -> Result<AnchorLayout, ConfigError> {
    let sec = "anchors";
    let Some(a) = a else {
        return Ok(AnchorLayout::Circle {
            radius: DEFAULT_ANCHOR_RADIUS,
            bearings: default_bearings(),
        });
    };
    match (
        &a.positions_m,
        a.radius_m.is_some() || a.bearings_deg.is_some(),
    ) {
        (Some(_), true) => Err(cx.err(
            sec,
            "positions_m",
            "give either positions_m or radius_m/bearings_deg, not both",
        )),
        (Some(p), false) => {
            if p.len() < 3 {
                return Err(cx.err(
                    sec,
                    "positions_m",
                    "TDOA localization in the plane needs at least 3 anchors",
                ));
            }
            let positions = p
                .iter()
                .map(|&v| position(cx, sec, "positions_m", v))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(AnchorLayout::Positions(positions))
        }
        (None, _) => {
            let radius = a.radius_m.unwrap_or(DEFAULT_ANCHOR_RADIUS);
            if !(radius > 0.0) {
                return Err(cx.err(sec, "radius_m", "must be positive"));
            }
            let bearings = match &a.bearings_deg {
                Some(b) => b.iter().map(|d| d.to_radians()).collect(),
                None => default_bearings(),
            };
            if bearings.len() < 3 {
                return Err(cx.err(
                    sec,
                    "bearings_deg",
                    "TDOA localization in the plane needs at least 3 anchors",
                ));
            }
            Ok(AnchorLayout::Circle { radius, bearings })
        }
    }
}
