//! Run configuration: a TOML file layered over per-experiment defaults, then
//! flag overrides.

use std::fmt;
use std::str::FromStr;

use horolab_core::exactnum::check_modulus;
use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SpiralLoglaw,
    SpiralKhintchine,
    Dioph,
    ApproxPoint,
    CosetCount,
    MeasureBand,
    BcRun,
    GeomValidate,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::SpiralLoglaw,
        Experiment::SpiralKhintchine,
        Experiment::Dioph,
        Experiment::ApproxPoint,
        Experiment::CosetCount,
        Experiment::MeasureBand,
        Experiment::BcRun,
        Experiment::GeomValidate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SpiralLoglaw => "spiral-loglaw",
            Experiment::SpiralKhintchine => "spiral-khintchine",
            Experiment::Dioph => "dioph",
            Experiment::ApproxPoint => "approx-point",
            Experiment::CosetCount => "coset-count",
            Experiment::MeasureBand => "measure-band",
            Experiment::BcRun => "bc-run",
            Experiment::GeomValidate => "geom-validate",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Approximation function `φ` for the Diophantine runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phi {
    /// `1/log t`.
    LogReciprocal,
    /// `t^{-s}`.
    Power(f64),
}

impl Phi {
    /// `(h/φ(h)) q^{−d}` for `h = q^j`, with one power per value so equal
    /// exponents give equal floats.
    pub fn normalized(self, q: u32, j: i64, d: i64) -> f64 {
        let qf = q as f64;
        match self {
            Phi::LogReciprocal => qf.powi((j - d) as i32) * j as f64 * qf.ln(),
            Phi::Power(s) => qf.powf((1.0 + s) * j as f64 - d as f64),
        }
    }

    /// Whether `∫ φ(t)/t dt` diverges.
    pub fn divergent(self) -> bool {
        match self {
            Phi::LogReciprocal => true,
            Phi::Power(s) => s <= 0.0,
        }
    }
}

impl fmt::Display for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phi::LogReciprocal => f.write_str("log-reciprocal"),
            Phi::Power(s) => write!(f, "power:{s}"),
        }
    }
}

impl FromStr for Phi {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "log-reciprocal" {
            return Ok(Phi::LogReciprocal);
        }
        let exp = s.strip_prefix("power:").ok_or_else(|| format!("unknown phi family {s:?}"))?;
        let v: f64 = exp.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        if !v.is_finite() || v < 0.0 {
            return Err(format!("exponent in {s:?} must be finite and ≥ 0"));
        }
        Ok(Phi::Power(v))
    }
}

impl Serialize for Phi {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Phi {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    /// Field size for the function-field runs.
    pub q: u32,
    /// `K<n>`, `petersen`, or a path to an edge-list file.
    pub graph: String,
    /// Target cycle as an ordered vertex list.
    pub cycle: String,
    /// Target vertex for approx-point.
    pub vertex: String,
    /// Free-group rank.
    pub k: u32,
    /// Largest double-coset depth enumerated.
    pub d_max: u32,
    /// Depth window width `N`.
    pub window_n: u32,
    /// Orbit shells `q^{h_min} ..= q^{h_max}`.
    pub h_min: i64,
    pub h_max: i64,
    /// Degree cap on orbit translations.
    pub orbit_cap: usize,
    pub t: u64,
    pub n_paths: u64,
    pub samples: u64,
    /// Digits kept per Haar sample.
    pub prec: usize,
    pub budget: usize,
    /// Statistics window; `[⌈√T⌉, T]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[u64; 2]>,
    /// Append the rational point `1/(X+1)` to the Diophantine samples.
    pub rational_fixture: bool,
    /// JSON instance file for bc-run; the built-in fixtures when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSpec {
    /// `κ` in units of `1/h`.
    pub kappa: Vec<f64>,
    pub phi: Vec<Phi>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    pub model: Model,
    pub rate: RateSpec,
}

/// Flag values that win over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<String>,
}

impl RunConfig {
    pub fn defaults(experiment: Experiment) -> RunConfig {
        let mut model = Model {
            q: 3,
            graph: "K4".into(),
            cycle: "0 1 2".into(),
            vertex: "0".into(),
            k: 2,
            d_max: 14,
            window_n: 1,
            h_min: 2,
            h_max: 6,
            orbit_cap: 7,
            t: 1_000_000,
            n_paths: 100,
            samples: 200,
            prec: 60,
            budget: 1 << 22,
            window: None,
            rational_fixture: true,
            instance: None,
        };
        match experiment {
            Experiment::MeasureBand => {
                model.d_max = 8;
                model.window_n = 2;
            }
            Experiment::GeomValidate => model.samples = 10_000,
            Experiment::Dioph => model.budget = 5_000_000,
            _ => {}
        }
        RunConfig {
            experiment,
            seed: 1,
            out: None,
            model,
            rate: RateSpec {
                kappa: vec![0.25, 0.5, 1.0, 2.0, 4.0],
                phi: vec![Phi::LogReciprocal, Phi::Power(1.0), Phi::Power(0.0)],
            },
        }
    }

    /// Layers `text` (TOML) over the defaults, then the flags, and validates.
    pub fn load(experiment: Experiment, text: Option<&str>, ov: &Overrides) -> Result<RunConfig, LabError> {
        let bad = |e: &dyn fmt::Display| LabError::Invalid(format!("config: {e}"));
        let mut table = toml::Table::try_from(RunConfig::defaults(experiment)).map_err(|e| bad(&e))?;
        if let Some(text) = text {
            let user: toml::Table = text.parse().map_err(|e| bad(&e))?;
            if let Some(name) = user.get("experiment") {
                if name.as_str() != Some(experiment.name()) {
                    return Err(LabError::Invalid(format!("config is for {name}, not {experiment}")));
                }
            }
            merge(&mut table, user);
        }
        let mut cfg: RunConfig = table.try_into().map_err(|e| bad(&e))?;
        if let Some(s) = ov.seed {
            cfg.seed = s;
        }
        if let Some(o) = &ov.out {
            cfg.out = Some(o.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// The statistics window actually used.
    pub fn window(&self) -> (u64, u64) {
        match self.model.window {
            Some([lo, hi]) => (lo, hi),
            None => horolab_core::flow::default_window(self.model.t),
        }
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let m = &self.model;
        let fail = |s: String| Err(LabError::Invalid(s));
        check_modulus(m.q).map_err(|e| LabError::Invalid(format!("q = {}: {e}", m.q)))?;
        if m.k < 2 {
            return fail(format!("rank k = {} must be at least 2", m.k));
        }
        if m.t < 4 || m.n_paths == 0 || m.samples == 0 {
            return fail("t ≥ 4, n_paths ≥ 1 and samples ≥ 1 are required".into());
        }
        if m.d_max < 2 || m.window_n == 0 || m.window_n > m.d_max {
            return fail(format!("need 2 ≤ d_max and 1 ≤ window_n ≤ d_max, got {} and {}", m.d_max, m.window_n));
        }
        if m.h_min < 1 || m.h_min > m.h_max {
            return fail(format!("need 1 ≤ h_min ≤ h_max, got {}..{}", m.h_min, m.h_max));
        }
        if m.prec < 8 || (m.prec as i64) <= m.h_max {
            return fail(format!("prec = {} is too small", m.prec));
        }
        if let Some([lo, hi]) = m.window {
            if lo < 2 || lo > hi || hi > m.t {
                return fail(format!("window [{lo}, {hi}] must satisfy 2 ≤ lo ≤ hi ≤ t"));
            }
        }
        if self.rate.kappa.iter().any(|k| !k.is_finite() || *k < 0.0) {
            return fail("kappa values must be finite and ≥ 0".into());
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
