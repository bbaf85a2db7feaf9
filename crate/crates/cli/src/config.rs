//! Run configuration: a single JSON document, with command-line flags taking
//! precedence over the file, and the file over built-in defaults.

use std::path::{Path, PathBuf};

use dqd_core::analysis::DEFAULT_TUNNELING_RATIO;
use dqd_core::units::temperature_from_millikelvin;
use dqd_core::{
    BathModel, Engine, PointSpec, QubitBinding, QubitParams, SweepParameter, SweepSpec, TimeGrid,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    Spectral,
    Evolve,
    T2,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum EngineName {
    ClosedForm,
    Numeric,
    Both,
}

impl From<EngineName> for Engine {
    fn from(e: EngineName) -> Self {
        match e {
            EngineName::ClosedForm => Engine::ClosedForm,
            EngineName::Numeric => Engine::Numeric,
            EngineName::Both => Engine::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Either `{"tunneling": T_c}` or `{"omega_l": ω_l, "ratio": r}` (ratio
/// defaults to 0.1). Omitted entirely, the phonon baths bind to their own ω_l.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tunneling: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    pub n_steps: usize,
    #[serde(default = "one")]
    pub stride: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameterName {
    OmegaL,
    Eta,
    /// Values in mK.
    TemperatureMk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameterName,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// The on-disk config document. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub bath: BathModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit: Option<QubitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_mk: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<EngineName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Command-line values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub engine: Option<EngineName>,
    pub format: Option<Format>,
}

/// A fully resolved run. `file` is the config with overrides and defaults
/// applied; it is echoed as the `meta` block of JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    #[serde(flatten)]
    pub file: ConfigFile,
}

impl RunConfig {
    pub fn resolve(
        subcommand: Subcommand,
        mut file: ConfigFile,
        overrides: Overrides,
    ) -> Result<Self, CliError> {
        file.bath.validate()?;

        if let Some(engine) = overrides.engine {
            file.engine = Some(engine);
        }
        let mut output = file.output.take().unwrap_or_default();
        if let Some(out) = overrides.out {
            output.path = Some(out);
        }
        if let Some(format) = overrides.format {
            output.format = Some(format);
        }
        output.format.get_or_insert(Format::Csv);
        file.output = Some(output);

        if subcommand != Subcommand::Spectral {
            file.engine.get_or_insert(EngineName::ClosedForm);
            file.qubit = Some(resolve_qubit(&file)?);
            if file.temperature_mk.is_none() {
                return Err(CliError::Usage("config: temperature_mk is required".into()));
            }
        }

        let run = RunConfig { subcommand, file };
        run.check()?;
        Ok(run)
    }

    fn check(&self) -> Result<(), CliError> {
        match self.subcommand {
            Subcommand::Spectral => {
                self.spectral_grid()?;
            }
            Subcommand::Evolve | Subcommand::T2 => {
                self.point()?;
                self.time_grid()?;
            }
            Subcommand::Sweep => {
                self.sweep_spec()?;
            }
        }
        Ok(())
    }

    pub fn format(&self) -> Format {
        self.file
            .output
            .as_ref()
            .and_then(|o| o.format)
            .unwrap_or_default()
    }

    pub fn out_path(&self) -> Option<&Path> {
        self.file.output.as_ref().and_then(|o| o.path.as_deref())
    }

    pub fn engine(&self) -> Engine {
        self.file.engine.unwrap_or(EngineName::ClosedForm).into()
    }

    /// ω grid for `spectral`: `count` evenly spaced points on `[min, max]`.
    pub fn spectral_grid(&self) -> Result<Vec<f64>, CliError> {
        let grid = self
            .file
            .grid
            .ok_or_else(|| CliError::Usage("config: spectral needs a grid".into()))?;
        let GridConfig { min, max, count } = grid;
        if !(min.is_finite() && max.is_finite()) || min < 0.0 || max <= min || count < 2 {
            return Err(CliError::Usage(format!(
                "invalid grid: need 0 <= min < max and count >= 2 (got min={min}, max={max}, count={count})"
            )));
        }
        let step = (max - min) / (count - 1) as f64;
        Ok((0..count)
            .map(|k| {
                if k == count - 1 {
                    max
                } else {
                    min + k as f64 * step
                }
            })
            .collect())
    }

    pub fn temperature(&self) -> Result<f64, CliError> {
        let mk = self
            .file
            .temperature_mk
            .ok_or_else(|| CliError::Usage("config: temperature_mk is required".into()))?;
        Ok(temperature_from_millikelvin(mk)?)
    }

    pub fn point(&self) -> Result<PointSpec, CliError> {
        let qubit = self.file.qubit.unwrap_or_default();
        let binding = match (qubit.tunneling, qubit.omega_l) {
            (Some(tc), None) => QubitBinding::Fixed(QubitParams::new(tc)?),
            (None, Some(omega_l)) => {
                let ratio = qubit.ratio.unwrap_or(DEFAULT_TUNNELING_RATIO);
                QubitParams::bound_to_omega_l(omega_l, ratio)?;
                QubitBinding::OmegaL { omega_l, ratio }
            }
            _ => return Err(CliError::Usage("config: qubit is unresolved".into())),
        };
        Ok(PointSpec {
            bath: self.file.bath,
            qubit: binding,
            temperature: self.temperature()?,
        })
    }

    pub fn time_grid(&self) -> Result<TimeGrid, CliError> {
        let time = self
            .file
            .time
            .ok_or_else(|| CliError::Usage("config: time {t_end, n_steps} is required".into()))?;
        Ok(TimeGrid::new(time.t_end, time.n_steps, time.stride)?)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, CliError> {
        let sweep = self.file.sweep.as_ref().ok_or_else(|| {
            CliError::Usage("config: sweep {parameter, values} is required".into())
        })?;
        let (parameter, values) = match sweep.parameter {
            SweepParameterName::OmegaL => (SweepParameter::OmegaL, sweep.values.clone()),
            SweepParameterName::Eta => (SweepParameter::Eta, sweep.values.clone()),
            SweepParameterName::TemperatureMk => (
                SweepParameter::Temperature,
                sweep
                    .values
                    .iter()
                    .map(|&v| temperature_from_millikelvin(v))
                    .collect::<Result<_, _>>()?,
            ),
        };
        let spec = SweepSpec {
            base: self.point()?,
            parameter,
            values,
            grid: self.time_grid()?,
            engine: self.engine(),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn resolve_qubit(file: &ConfigFile) -> Result<QubitConfig, CliError> {
    match file.qubit {
        Some(q) => match (q.tunneling, q.omega_l) {
            (Some(_), None) if q.ratio.is_none() => Ok(q),
            (None, Some(_)) => Ok(QubitConfig {
                ratio: Some(q.ratio.unwrap_or(DEFAULT_TUNNELING_RATIO)),
                ..q
            }),
            _ => Err(CliError::Usage(
                "config: qubit needs exactly one of {tunneling} or {omega_l, ratio}".into(),
            )),
        },
        None => match file.bath.omega_l() {
            Some(omega_l) => Ok(QubitConfig {
                tunneling: None,
                omega_l: Some(omega_l),
                ratio: Some(DEFAULT_TUNNELING_RATIO),
            }),
            None => Err(CliError::Usage(
                "config: an ohmic bath needs an explicit qubit (tunneling or omega_l)".into(),
            )),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"{
        "bath": {"kind": "pcpb", "g": 0.035, "omega_d": 0.02, "omega_l": 0.5},
        "temperature_mk": 30,
        "time": {"t_end": 2500, "n_steps": 100000, "stride": 100},
        "sweep": {"parameter": "omega_l", "values": [0.5, 0.7]}
    }"#;

    #[test]
    fn defaults_and_binding() {
        let run = RunConfig::resolve(
            Subcommand::Sweep,
            ConfigFile::parse(FIG1).unwrap(),
            Overrides::default(),
        )
        .unwrap();
        assert_eq!(run.engine(), Engine::ClosedForm);
        assert_eq!(run.format(), Format::Csv);
        assert_eq!(run.out_path(), None);
        let point = run.point().unwrap();
        assert_eq!(
            point.qubit,
            QubitBinding::OmegaL {
                omega_l: 0.5,
                ratio: 0.1
            }
        );
        assert_eq!(point.temperature, 0.030);
        assert_eq!(run.sweep_spec().unwrap().values, vec![0.5, 0.7]);
    }

    #[test]
    fn flags_override_file() {
        let mut file = ConfigFile::parse(FIG1).unwrap();
        file.engine = Some(EngineName::Numeric);
        file.output = Some(OutputConfig {
            path: Some("a.csv".into()),
            format: Some(Format::Csv),
        });
        let run = RunConfig::resolve(
            Subcommand::Sweep,
            file,
            Overrides {
                out: Some("b.json".into()),
                engine: Some(EngineName::Both),
                format: Some(Format::Json),
            },
        )
        .unwrap();
        assert_eq!(run.engine(), Engine::Both);
        assert_eq!(run.format(), Format::Json);
        assert_eq!(run.out_path(), Some(Path::new("b.json")));
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = FIG1.replace("\"temperature_mk\"", "\"temprature_mk\"");
        assert!(matches!(ConfigFile::parse(&text), Err(CliError::Usage(_))));
        let text = FIG1.replace("\"stride\": 100", "\"stride\": 100, \"dt\": 1");
        assert!(ConfigFile::parse(&text).is_err());
    }

    #[test]
    fn ohmic_requires_qubit() {
        let text = r#"{"bath": {"kind": "ohmic", "eta": 0.04, "omega_c": 0.05},
                       "temperature_mk": 30, "time": {"t_end": 10, "n_steps": 10}}"#;
        let err = RunConfig::resolve(
            Subcommand::Evolve,
            ConfigFile::parse(text).unwrap(),
            Overrides::default(),
        );
        assert!(matches!(err, Err(CliError::Usage(_))));
    }

    #[test]
    fn conflicting_qubit_rejected() {
        let text = r#"{"bath": {"kind": "ohmic", "eta": 0.04, "omega_c": 0.05},
                       "qubit": {"tunneling": 0.05, "omega_l": 0.5},
                       "temperature_mk": 30, "time": {"t_end": 10, "n_steps": 10}}"#;
        assert!(RunConfig::resolve(
            Subcommand::Evolve,
            ConfigFile::parse(text).unwrap(),
            Overrides::default()
        )
        .is_err());
    }

    #[test]
    fn spectral_grid_validation() {
        let base = r#"{"bath": {"kind": "ohmic", "eta": 0.04, "omega_c": 0.05}, "grid": GRID}"#;
        let ok = base.replace("GRID", r#"{"min": 0, "max": 0.2, "count": 5}"#);
        let run = RunConfig::resolve(
            Subcommand::Spectral,
            ConfigFile::parse(&ok).unwrap(),
            Overrides::default(),
        )
        .unwrap();
        assert_eq!(
            run.spectral_grid().unwrap(),
            vec![0.0, 0.05, 0.1, 0.15000000000000002, 0.2]
        );
        for bad in [
            r#"{"min": -1, "max": 0.2, "count": 5}"#,
            r#"{"min": 0.3, "max": 0.2, "count": 5}"#,
            r#"{"min": 0, "max": 0.2, "count": 1}"#,
        ] {
            let text = base.replace("GRID", bad);
            let err = RunConfig::resolve(
                Subcommand::Spectral,
                ConfigFile::parse(&text).unwrap(),
                Overrides::default(),
            );
            assert!(matches!(err, Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn temperature_sweep_in_millikelvin() {
        let text = FIG1.replace(
            r#""sweep": {"parameter": "omega_l", "values": [0.5, 0.7]}"#,
            r#""sweep": {"parameter": "temperature_mk", "values": [30, 200, 300, 1000]}"#,
        );
        let run = RunConfig::resolve(
            Subcommand::Sweep,
            ConfigFile::parse(&text).unwrap(),
            Overrides::default(),
        )
        .unwrap();
        let spec = run.sweep_spec().unwrap();
        assert_eq!(spec.parameter, SweepParameter::Temperature);
        assert_eq!(spec.values, vec![0.03, 0.2, 0.3, 1.0]);
    }
}
