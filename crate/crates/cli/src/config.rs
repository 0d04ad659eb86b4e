//! Strict TOML run configurations.

use pathscatter::capture::{
    CaptureChannelSpec, CaptureQuadrature, CoordinateMode, HydrogenicState, Interaction, InteractionForm,
};
use pathscatter::influence::FixedPath;
use pathscatter::lattice::PropagatorOptions;
use pathscatter::quadrature::Tolerance;
use pathscatter::units::{reduced_masses, UnitSystem, PROTON_ELECTRON_MASS_RATIO};
use pathscatter::{CentralPotential64, LatticePotential64, LatticeSpec64, PairPotentials64, TimeGrid64};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Propagator,
    Evolve,
    BornElastic,
    Influence,
    ChargeTransfer,
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Propagator => "propagator",
            Self::Evolve => "evolve",
            Self::BornElastic => "born-elastic",
            Self::Influence => "influence",
            Self::ChargeTransfer => "charge-transfer",
            Self::Oracle => "oracle",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown key `{key}` in {}{}", if path.is_empty() { "the top level" } else { path.as_str() }, suggestion.as_ref().map(|s| format!(" (did you mean `{s}`?)")).unwrap_or_default())]
    UnknownKey {
        path: String,
        key: String,
        suggestion: Option<String>,
    },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("{0}")]
    Io(String),
}

fn invalid(field: &str, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorConfig {
    pub mass: f64,
    pub lattice: LatticeSpec64,
    pub time: TimeGrid64,
    pub potential: LatticePotential64,
    /// Source point `x_a` of the exported kernel column.
    pub source: f64,
    #[serde(default)]
    pub options: PropagatorOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub x0: f64,
    pub p0: f64,
    pub sigma0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub mass: f64,
    pub lattice: LatticeSpec64,
    pub time: TimeGrid64,
    pub potential: LatticePotential64,
    pub packet: PacketConfig,
    #[serde(default)]
    pub options: PropagatorOptions,
}

fn default_n_theta() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BornElasticConfig {
    pub potential: CentralPotential64,
    pub p: f64,
    pub mass: f64,
    /// Number of angles, uniformly spaced on `[0, π]`.
    pub angles: usize,
    /// Gauss–Legendre nodes of the total cross section.
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default)]
    pub tolerance: Tolerance<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// Ion propagates along a fixed electron path.
    K1,
    /// Electron propagates along a fixed ion path.
    K2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathConfig {
    Samples { values: Vec<f64> },
    Stationary { position: f64 },
    Linear { from: f64, to: f64 },
    Oscillating { center: f64, amplitude: f64, omega: f64 },
}

impl PathConfig {
    pub fn build(&self, grid: TimeGrid64) -> pathscatter::Result<FixedPath<f64>> {
        match self {
            Self::Samples { values } => FixedPath::new(grid, values.clone()),
            Self::Stationary { position } => FixedPath::stationary(grid, *position),
            Self::Linear { from, to } => {
                let (t0, d) = (grid.t_a, grid.duration());
                FixedPath::from_fn(grid, |t| from + (to - from) * (t - t0) / d)
            }
            Self::Oscillating {
                center,
                amplitude,
                omega,
            } => FixedPath::from_fn(grid, |t| center + amplitude * (omega * t).cos()),
        }
    }
}

fn default_leak() -> f64 {
    PropagatorOptions::default().leak_tolerance
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfluenceConfig {
    pub functional: Functional,
    /// Mass of the propagated particle.
    pub mass: f64,
    /// `[x_a, x_b]` of the propagated particle.
    pub endpoints: [f64; 2],
    pub lattice: LatticeSpec64,
    pub time: TimeGrid64,
    pub potentials: PairPotentials64,
    /// Fixed trajectory of the other particle.
    pub path: PathConfig,
    #[serde(default = "default_leak")]
    pub leak_tolerance: f64,
}

fn default_flux_power() -> u8 {
    2
}

fn default_coupling() -> f64 {
    1.0
}

fn default_proton_mass_ratio() -> f64 {
    PROTON_ELECTRON_MASS_RATIO
}

/// Capture channel `B⁺ + A(1s) → B(1s) + A⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    /// Target mass number.
    pub a: f64,
    /// Projectile mass number.
    pub b: f64,
    /// Bare nuclear charges.
    pub z_a: f64,
    pub z_b: f64,
    /// Effective charges of the initial (on A) and final (on B) 1s states.
    pub z_initial: f64,
    pub z_final: f64,
    /// Relative velocity in atomic units.
    pub velocity: f64,
    pub interaction: Interaction,
    #[serde(default)]
    pub form: InteractionForm,
    #[serde(default)]
    pub mode: CoordinateMode,
    #[serde(default = "default_flux_power")]
    pub flux_ratio_power: u8,
    #[serde(default = "default_coupling")]
    pub coupling: f64,
    #[serde(default = "default_proton_mass_ratio")]
    pub proton_mass_ratio: f64,
}

impl ChannelConfig {
    /// Parameter checks that do not depend on whether the exit channel is
    /// open; a closed channel surfaces as a domain error when the run starts.
    pub fn check(&self) -> Result<(), ConfigError> {
        for (field, v) in [
            ("channel.a", self.a),
            ("channel.b", self.b),
            ("channel.z_a", self.z_a),
            ("channel.z_b", self.z_b),
            ("channel.z_initial", self.z_initial),
            ("channel.z_final", self.z_final),
            ("channel.velocity", self.velocity),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return Err(invalid(field, format!("must be finite and positive, got {v}")));
            }
        }
        if self.proton_mass_ratio <= 1.0 || !self.proton_mass_ratio.is_finite() {
            return Err(invalid("channel.proton_mass_ratio", "must be finite and > 1"));
        }
        if !self.coupling.is_finite() {
            return Err(invalid("channel.coupling", "must be finite"));
        }
        Ok(())
    }

    pub fn build(&self) -> pathscatter::Result<CaptureChannelSpec> {
        let units = UnitSystem::with_proton_mass_ratio(self.proton_mass_ratio)?;
        let kin = reduced_masses(self.a, self.b, &units)?;
        if self.velocity <= 0.0 || !self.velocity.is_finite() {
            return Err(pathscatter::Error::Domain(format!(
                "velocity must be finite and positive, got {}",
                self.velocity
            )));
        }
        let e_a = 0.5 * kin.mu_a * self.velocity * self.velocity;
        let mut spec = CaptureChannelSpec::new(
            kin,
            e_a,
            HydrogenicState::ground(self.z_initial)?,
            HydrogenicState::ground(self.z_final)?,
            self.interaction,
            self.mode,
        )?
        .with_form(self.form)
        .with_coupling(self.coupling)
        .with_flux_ratio_power(self.flux_ratio_power);
        spec.z_a = self.z_a;
        spec.z_b = self.z_b;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeTransferConfig {
    pub channel: ChannelConfig,
    /// Number of angles, uniformly spaced on `[0, theta_max]`.
    pub angles: usize,
    pub theta_max: f64,
    #[serde(default)]
    pub quadrature: CaptureQuadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub channel: ChannelConfig,
    pub thetas: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub quadrature: CaptureQuadrature,
}

/// A validated run: the command and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "parameters", rename_all = "kebab-case")]
pub enum RunConfig {
    Propagator(PropagatorConfig),
    Evolve(EvolveConfig),
    BornElastic(BornElasticConfig),
    Influence(InfluenceConfig),
    ChargeTransfer(ChargeTransferConfig),
    Oracle(OracleConfig),
}

impl RunConfig {
    pub fn command(&self) -> Command {
        match self {
            Self::Propagator(_) => Command::Propagator,
            Self::Evolve(_) => Command::Evolve,
            Self::BornElastic(_) => Command::BornElastic,
            Self::Influence(_) => Command::Influence,
            Self::ChargeTransfer(_) => Command::ChargeTransfer,
            Self::Oracle(_) => Command::Oracle,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Oracle(o) => Some(o.seed),
            _ => None,
        }
    }

    /// Checks every physical invariant of the referenced types.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let ck = |field: &str, r: pathscatter::Result<()>| r.map_err(|e| invalid(field, e));
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be finite and positive, got {v}")))
            }
        };
        match self {
            Self::Propagator(c) => {
                positive("mass", c.mass)?;
                ck("lattice", c.lattice.validate())?;
                ck("time", c.time.validate())?;
                ck("potential", c.potential.validate())?;
                positive("options.leak_tolerance", c.options.leak_tolerance)?;
                if !(c.source >= c.lattice.x_min && c.source <= c.lattice.x_max) {
                    return Err(invalid("source", "must lie inside the lattice"));
                }
            }
            Self::Evolve(c) => {
                positive("mass", c.mass)?;
                ck("lattice", c.lattice.validate())?;
                ck("time", c.time.validate())?;
                ck("potential", c.potential.validate())?;
                positive("packet.sigma0", c.packet.sigma0)?;
                positive("options.leak_tolerance", c.options.leak_tolerance)?;
                if !c.packet.x0.is_finite() || !c.packet.p0.is_finite() {
                    return Err(invalid("packet", "x0 and p0 must be finite"));
                }
            }
            Self::BornElastic(c) => {
                ck("potential", c.potential.validate())?;
                positive("p", c.p)?;
                positive("mass", c.mass)?;
                if c.angles == 0 {
                    return Err(invalid("angles", "must be at least 1"));
                }
                if c.n_theta < 16 {
                    return Err(invalid("n_theta", format!("must be >= 16, got {}", c.n_theta)));
                }
                positive("tolerance.rel", c.tolerance.rel)?;
            }
            Self::Influence(c) => {
                positive("mass", c.mass)?;
                ck("lattice", c.lattice.validate())?;
                ck("time", c.time.validate())?;
                ck("potentials", c.potentials.validate())?;
                ck("path", c.path.build(c.time).map(|_| ()))?;
                positive("leak_tolerance", c.leak_tolerance)?;
                for x in c.endpoints {
                    if !(x >= c.lattice.x_min && x <= c.lattice.x_max) {
                        return Err(invalid("endpoints", format!("{x} lies outside the lattice")));
                    }
                }
            }
            Self::ChargeTransfer(c) => {
                c.channel.check()?;
                ck("quadrature", c.quadrature.validate())?;
                if c.angles == 0 {
                    return Err(invalid("angles", "must be at least 1"));
                }
                if !(c.theta_max > 0.0 && c.theta_max <= std::f64::consts::PI) {
                    return Err(invalid("theta_max", "must lie in (0, pi]"));
                }
            }
            Self::Oracle(c) => {
                c.channel.check()?;
                ck("quadrature", c.quadrature.validate())?;
                if c.thetas.is_empty() {
                    return Err(invalid("thetas", "must list at least one angle"));
                }
                if let Some(t) = c.thetas.iter().find(|t| !(0.0..=std::f64::consts::PI).contains(*t)) {
                    return Err(invalid("thetas", format!("{t} lies outside [0, pi]")));
                }
                if c.samples < pathscatter::capture::ORACLE_MIN_SAMPLES {
                    return Err(invalid(
                        "samples",
                        format!("must be >= {}", pathscatter::capture::ORACLE_MIN_SAMPLES),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Parses `text` for `command`, applies `--set path.to.key=value` overrides
/// and validates the result.
pub fn parse_config(command: Command, text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let value = toml::Value::Table(table);
    let config = match command {
        Command::Propagator => RunConfig::Propagator(deserialize(value)?),
        Command::Evolve => RunConfig::Evolve(deserialize(value)?),
        Command::BornElastic => RunConfig::BornElastic(deserialize(value)?),
        Command::Influence => RunConfig::Influence(deserialize(value)?),
        Command::ChargeTransfer => RunConfig::ChargeTransfer(deserialize(value)?),
        Command::Oracle => RunConfig::Oracle(deserialize(value)?),
    };
    config.validate()?;
    Ok(config)
}

fn deserialize<T: serde::de::DeserializeOwned>(value: toml::Value) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        let message = e.inner().to_string();
        match unknown_field(&message) {
            Some((key, expected)) => {
                let suggestion = expected
                    .iter()
                    .map(|c| (strsim::normalized_damerau_levenshtein(&key, c), c))
                    .filter(|(score, _)| *score >= 0.5)
                    .max_by(|a, b| a.0.total_cmp(&b.0))
                    .map(|(_, c)| c.clone());
                // the path ends at the offending key
                let parent = path.rsplit_once('.').map(|(p, _)| p.to_string()).unwrap_or_default();
                ConfigError::UnknownKey {
                    path: parent,
                    key,
                    suggestion,
                }
            }
            None => invalid(if path.is_empty() { "<root>" } else { &path }, message),
        }
    })
}

/// Parses serde's "unknown field `x`, expected one of `a`, `b`" message.
fn unknown_field(message: &str) -> Option<(String, Vec<String>)> {
    let rest = message.strip_prefix("unknown field `")?;
    let (key, rest) = rest.split_once('`')?;
    let expected = rest.split('`').skip(1).step_by(2).map(str::to_string).collect();
    Some((key.to_string(), expected))
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), ConfigError> {
    let (path, raw) = item
        .split_once('=')
        .ok_or_else(|| ConfigError::Syntax(format!("--set expects path.to.key=value, got `{item}`")))?;
    let path = path.trim();
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(ConfigError::Syntax(format!("invalid --set key `{path}`")));
    }
    let value = parse_value(raw.trim());
    let mut keys = path.split('.').peekable();
    let mut node = table;
    while let Some(k) = keys.next() {
        if keys.peek().is_none() {
            node.insert(k.to_string(), value);
            return Ok(());
        }
        let entry = node
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| ConfigError::Syntax(format!("--set {path}: `{k}` is not a table")))?;
    }
    Ok(())
}

/// A TOML literal, or a bare string when it does not parse as one.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
