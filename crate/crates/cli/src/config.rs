//! Strict JSON run configuration.
//!
//! Parsing walks the JSON tree by hand so that every error can name the
//! offending field as a JSON pointer (`/initial/gaussian/delta`).

use std::fmt;
use std::path::{Path, PathBuf};

use mzs_core::exprparse::parse_expr;
use mzs_core::potential::PotentialModel;
use mzs_core::propagator::{SchemeKind, StepOptions};
use serde_json::{Map, Value};

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    /// JSON pointer of the offending value; empty for the document root.
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "config {at}: {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(pointer: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { pointer: pointer.to_string(), message: message.into() }
}

fn child(pointer: &str, key: &str) -> String {
    format!("{pointer}/{}", key.replace('~', "~0").replace('/', "~1"))
}

/// An object whose keys are consumed one by one; leftovers are unknown keys.
struct Obj<'a> {
    map: Map<String, Value>,
    pointer: &'a str,
}

impl<'a> Obj<'a> {
    fn new(v: &Value, pointer: &'a str) -> Result<Self, ConfigError> {
        match v {
            Value::Object(m) => Ok(Self { map: m.clone(), pointer }),
            _ => Err(err(pointer, "expected an object")),
        }
    }

    fn take(&mut self, key: &str) -> Option<(Value, String)> {
        self.map.remove(key).map(|v| (v, child(self.pointer, key)))
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, p)) => v.as_f64().filter(|x| x.is_finite()).map(Some).ok_or_else(|| err(&p, "expected a finite number")),
        }
    }

    fn require_number(&mut self, key: &str) -> Result<f64, ConfigError> {
        self.number(key)?.ok_or_else(|| err(&child(self.pointer, key), "missing required number"))
    }

    fn string(&mut self, key: &str) -> Result<Option<(String, String)>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::String(s), p)) => Ok(Some((s, p))),
            Some((_, p)) => Err(err(&p, "expected a string")),
        }
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, p)) => v.as_u64().map(|n| Some(n as usize)).ok_or_else(|| err(&p, "expected a non-negative integer")),
        }
    }

    fn boolean(&mut self, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, p)) => v.as_bool().map(Some).ok_or_else(|| err(&p, "expected true or false")),
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.map.keys().next() {
            Some(k) => Err(err(&child(self.pointer, k), "unknown key")),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeltaScaling {
    Fixed,
    /// `δ(ε) = δ·ε/ε₀` with `ε₀` the configured epsilon.
    Linear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gaussian {
    pub x0: f64,
    pub k0: f64,
    pub delta: f64,
    pub scaling: DeltaScaling,
}

impl Default for Gaussian {
    fn default() -> Self {
        Self { x0: -0.3, k0: 0.1, delta: 1.22e-4, scaling: DeltaScaling::Fixed }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputPaths {
    pub dir: PathBuf,
    pub snapshot: String,
    pub summary: String,
    pub csv: String,
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), snapshot: "final.mzwf".into(), summary: "summary.json".into(), csv: "convergence.csv".into() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceSettings {
    /// `h_R = h / h_ratio`.
    pub h_ratio: f64,
    /// Initial `M_R ≈ m_ratio · M`.
    pub m_ratio: usize,
    pub refinement_factor: usize,
    pub max_refinements: usize,
    pub tolerance: f64,
    pub extrapolate: bool,
}

impl Default for ReferenceSettings {
    fn default() -> Self {
        Self { h_ratio: 200.0, m_ratio: 3, refinement_factor: 2, max_refinements: 3, tolerance: 1e-8, extrapolate: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sweep {
    Epsilon(Vec<f64>),
    Step(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub epsilon: f64,
    pub t_end: f64,
    pub h_over_eps: f64,
    pub m_times_eps: f64,
    pub sigma: f64,
    pub scheme: SchemeKind,
    pub potential: PotentialModel,
    /// The potential as written in the config, for summaries.
    pub potential_source: Value,
    pub initial: Gaussian,
    pub output: OutputPaths,
    pub snapshot_every: usize,
    pub lanczos: StepOptions,
    pub reference: ReferenceSettings,
    pub sweep: Option<Sweep>,
}

/// Smallest odd integer `≥ x`.
pub fn odd_ceil(x: f64) -> usize {
    let m = x.ceil().max(1.0) as usize;
    if m % 2 == 0 {
        m + 1
    } else {
        m
    }
}

impl RunConfig {
    /// The standard lattice-with-pulse experiment at `ε`, integrated to `T`.
    pub fn standard(epsilon: f64, t_end: f64) -> Self {
        Self {
            epsilon,
            t_end,
            h_over_eps: 2.0,
            m_times_eps: 5.0,
            sigma: 1.0,
            scheme: SchemeKind::Full,
            potential: PotentialModel::LatticeWithPulse,
            potential_source: serde_json::json!({ "builtin": "lattice_with_pulse" }),
            initial: Gaussian::default(),
            output: OutputPaths::default(),
            snapshot_every: 0,
            lanczos: StepOptions::default(),
            reference: ReferenceSettings::default(),
            sweep: None,
        }
    }

    pub fn grid_size(&self) -> usize {
        odd_ceil(self.m_times_eps / self.epsilon)
    }

    pub fn step(&self) -> f64 {
        self.h_over_eps * self.epsilon
    }

    pub fn step_count(&self) -> usize {
        (self.t_end / self.step()).ceil() as usize
    }

    /// The same configuration at another `ε`, with `h`, `M` and (if
    /// configured) `δ` following it.
    pub fn at_epsilon(&self, eps: f64) -> Self {
        let mut c = self.clone();
        if c.initial.scaling == DeltaScaling::Linear {
            c.initial.delta = self.initial.delta * eps / self.epsilon;
        }
        c.epsilon = eps;
        c
    }

    pub fn snapshot_path(&self) -> PathBuf {
        self.output.dir.join(&self.output.snapshot)
    }

    pub fn summary_path(&self) -> PathBuf {
        self.output.dir.join(&self.output.summary)
    }

    pub fn csv_path(&self) -> PathBuf {
        self.output.dir.join(&self.output.csv)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let v: Value = serde_json::from_str(text).map_err(|e| err("", format!("invalid JSON: {e}")))?;
        Self::from_value(&v)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| err("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_value(v: &Value) -> Result<Self, ConfigError> {
        let mut root = Obj::new(v, "")?;
        let epsilon = root.require_number("epsilon")?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(err("/epsilon", format!("must lie in (0, 1), got {epsilon}")));
        }
        let t_end = root.require_number("T")?;
        if t_end < 0.0 {
            return Err(err("/T", "must be non-negative"));
        }
        let mut c = Self::standard(epsilon, t_end);
        if let Some(x) = root.number("hOverEps")? {
            if x <= 0.0 {
                return Err(err("/hOverEps", "must be positive"));
            }
            c.h_over_eps = x;
        }
        if let Some(x) = root.number("MTimesEps")? {
            if x <= 0.0 {
                return Err(err("/MTimesEps", "must be positive"));
            }
            c.m_times_eps = x;
        }
        if let Some(x) = root.number("sigma")? {
            if !(x > 0.0 && x <= 1.0) {
                return Err(err("/sigma", "must lie in (0, 1]"));
            }
            c.sigma = x;
        }
        if let Some((s, p)) = root.string("scheme")? {
            c.scheme = s.parse().map_err(|e: String| err(&p, e))?;
        }
        if let Some((v, p)) = root.take("potential") {
            c.potential = parse_potential(&v, &p)?;
            c.potential_source = v;
        }
        if let Some((v, p)) = root.take("initial") {
            c.initial = parse_initial(&v, &p)?;
        }
        if let Some((v, p)) = root.take("output") {
            let mut o = Obj::new(&v, &p)?;
            if let Some((s, _)) = o.string("dir")? {
                c.output.dir = PathBuf::from(s);
            }
            for (key, slot) in [("snapshot", &mut c.output.snapshot), ("summary", &mut c.output.summary), ("csv", &mut c.output.csv)] {
                if let Some((s, _)) = o.string(key)? {
                    *slot = s;
                }
            }
            o.finish()?;
        }
        if let Some(n) = root.count("snapshotEvery")? {
            c.snapshot_every = n;
        }
        if let Some((v, p)) = root.take("lanczos") {
            let mut o = Obj::new(&v, &p)?;
            for (key, slot) in [("w2", &mut c.lanczos.lanczos_w2), ("w3", &mut c.lanczos.lanczos_w3)] {
                if let Some(n) = o.count(key)? {
                    if n == 0 {
                        return Err(err(&child(&p, key), "needs at least one iteration"));
                    }
                    *slot = n;
                }
            }
            o.finish()?;
        }
        if let Some((v, p)) = root.take("reference") {
            c.reference = parse_reference(&v, &p)?;
        }
        if let Some((v, p)) = root.take("sweep") {
            c.sweep = Some(parse_sweep(&v, &p)?);
        }
        root.finish()?;
        Ok(c)
    }
}

fn parse_potential(v: &Value, pointer: &str) -> Result<PotentialModel, ConfigError> {
    let mut o = Obj::new(v, pointer)?;
    let model = if let Some((name, p)) = o.string("builtin")? {
        match name.as_str() {
            "lattice_with_pulse" => PotentialModel::LatticeWithPulse,
            "lattice" => PotentialModel::Lattice,
            "pulse" => PotentialModel::Pulse,
            "zero" => PotentialModel::Zero,
            "constant" => PotentialModel::Constant(o.require_number("c")?),
            other => return Err(err(&p, format!("unknown builtin potential '{other}'"))),
        }
    } else if let Some((src, p)) = o.string("expr")? {
        let e = parse_expr(&src).map_err(|e| err(&p, format!("{e} (at byte {})", e.offset())))?;
        PotentialModel::Expr(e)
    } else {
        return Err(err(pointer, "expected {\"builtin\": ...} or {\"expr\": ...}"));
    };
    o.finish()?;
    Ok(model)
}

fn parse_initial(v: &Value, pointer: &str) -> Result<Gaussian, ConfigError> {
    let mut o = Obj::new(v, pointer)?;
    let (g, p) = o.take("gaussian").ok_or_else(|| err(pointer, "expected {\"gaussian\": {...}}"))?;
    o.finish()?;
    let mut go = Obj::new(&g, &p)?;
    let mut out = Gaussian::default();
    for (key, slot) in [("x0", &mut out.x0), ("k0", &mut out.k0), ("delta", &mut out.delta)] {
        if let Some(x) = go.number(key)? {
            *slot = x;
        }
    }
    if !(out.delta > 0.0) {
        return Err(err(&child(&p, "delta"), "must be positive"));
    }
    if let Some((s, sp)) = go.string("deltaScaling")? {
        out.scaling = match s.as_str() {
            "fixed" => DeltaScaling::Fixed,
            "linear" => DeltaScaling::Linear,
            _ => return Err(err(&sp, "expected \"fixed\" or \"linear\"")),
        };
    }
    go.finish()?;
    Ok(out)
}

fn parse_reference(v: &Value, pointer: &str) -> Result<ReferenceSettings, ConfigError> {
    let mut o = Obj::new(v, pointer)?;
    let mut r = ReferenceSettings::default();
    if let Some(x) = o.number("hRatio")? {
        if x < 1.0 {
            return Err(err(&child(pointer, "hRatio"), "must be at least 1"));
        }
        r.h_ratio = x;
    }
    if let Some(n) = o.count("mRatio")? {
        r.m_ratio = n.max(1);
    }
    if let Some(n) = o.count("refinementFactor")? {
        if n < 2 {
            return Err(err(&child(pointer, "refinementFactor"), "must be at least 2"));
        }
        r.refinement_factor = n;
    }
    if let Some(n) = o.count("maxRefinements")? {
        r.max_refinements = n;
    }
    if let Some(x) = o.number("tolerance")? {
        if !(x > 0.0) {
            return Err(err(&child(pointer, "tolerance"), "must be positive"));
        }
        r.tolerance = x;
    }
    if let Some(b) = o.boolean("extrapolate")? {
        r.extrapolate = b;
    }
    o.finish()?;
    Ok(r)
}

fn parse_sweep(v: &Value, pointer: &str) -> Result<Sweep, ConfigError> {
    let mut o = Obj::new(v, pointer)?;
    let list = |v: Value, p: &str| -> Result<Vec<f64>, ConfigError> {
        let arr = v.as_array().ok_or_else(|| err(p, "expected an array of numbers"))?;
        arr.iter()
            .enumerate()
            .map(|(i, x)| x.as_f64().filter(|x| *x > 0.0).ok_or_else(|| err(&child(p, &i.to_string()), "expected a positive number")))
            .collect()
    };
    let sweep = match (o.take("epsilon"), o.take("h")) {
        (Some((v, p)), None) => Sweep::Epsilon(list(v, &p)?),
        (None, Some((v, p))) => Sweep::Step(list(v, &p)?),
        _ => return Err(err(pointer, "expected exactly one of \"epsilon\" or \"h\"")),
    };
    o.finish()?;
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = RunConfig::from_json_str(r#"{"epsilon":0.015625,"T":0.5,"scheme":"full","potential":{"builtin":"lattice_with_pulse"}}"#)
            .unwrap();
        assert_eq!((c.h_over_eps, c.m_times_eps, c.sigma), (2.0, 5.0, 1.0));
        assert_eq!(c.initial, Gaussian::default());
        assert_eq!(c.grid_size(), 321);
        assert_eq!(c.step(), 0.03125);
        assert_eq!(c.step_count(), 16);
    }

    #[test]
    fn unknown_key_is_named_by_pointer() {
        let e = RunConfig::from_json_str(r#"{"epsilon":0.1,"T":1,"dt":0.1}"#).unwrap_err();
        assert_eq!(e.pointer, "/dt");
        let e = RunConfig::from_json_str(r#"{"epsilon":0.1,"T":1,"initial":{"gaussian":{"x1":0}}}"#).unwrap_err();
        assert_eq!(e.pointer, "/initial/gaussian/x1");
    }

    #[test]
    fn epsilon_must_be_in_the_unit_interval() {
        for eps in ["0", "1", "-0.5"] {
            let e = RunConfig::from_json_str(&format!(r#"{{"epsilon":{eps},"T":1}}"#)).unwrap_err();
            assert_eq!(e.pointer, "/epsilon");
        }
    }

    #[test]
    fn grid_size_rounds_up_to_odd() {
        assert_eq!(odd_ceil(320.0), 321);
        assert_eq!(odd_ceil(320.2), 321);
        assert_eq!(odd_ceil(321.0), 321);
    }

    #[test]
    fn potentials_parse() {
        let c = RunConfig::from_json_str(r#"{"epsilon":0.1,"T":1,"potential":{"builtin":"constant","c":2.5}}"#).unwrap();
        assert_eq!(c.potential, PotentialModel::Constant(2.5));
        let e = RunConfig::from_json_str(r#"{"epsilon":0.1,"T":1,"potential":{"expr":"sin(x"}}"#).unwrap_err();
        assert_eq!(e.pointer, "/potential/expr");
        let e = RunConfig::from_json_str(r#"{"epsilon":0.1,"T":1,"potential":{"builtin":"constant"}}"#).unwrap_err();
        assert_eq!(e.pointer, "/potential/c");
    }

    #[test]
    fn linear_delta_follows_epsilon() {
        let c = RunConfig::from_json_str(r#"{"epsilon":0.00390625,"T":1,"initial":{"gaussian":{"deltaScaling":"linear"}}}"#).unwrap();
        let d = c.at_epsilon(2.0 * c.epsilon);
        assert!((d.initial.delta - 2.44e-4).abs() < 1e-15);
        assert_eq!(c.at_epsilon(0.5).initial.x0, -0.3);
    }

    #[test]
    fn sweep_needs_one_list() {
        let c = RunConfig::from_json_str(r#"{"epsilon":0.1,"T":1,"sweep":{"h":[0.1,0.05]}}"#).unwrap();
        assert_eq!(c.sweep, Some(Sweep::Step(vec![0.1, 0.05])));
        let e = RunConfig::from_json_str(r#"{"epsilon":0.1,"T":1,"sweep":{"h":[0.1,-1]}}"#).unwrap_err();
        assert_eq!(e.pointer, "/sweep/h/1");
    }
}
