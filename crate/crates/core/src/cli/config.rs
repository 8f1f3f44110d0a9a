//! Experiment configuration: JSON file, flag overrides, validation and hashing.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::base::{BaseGroup, FreeGroup, Lattice};
use crate::error::{Error, Result};
use crate::lamp::{FiniteLampGroup, IntegerLamps, LampGroup};
use crate::lemma::InstanceParams;
use crate::stats::ProgressSpec;
use crate::tsp::DEFAULT_DP_CAP;
use crate::walk::{GeometricTail, StepDistribution};
use crate::wreath::Wreath;

/// Keys that never enter the config hash.
const UNHASHED: [&str; 4] = ["threads", "output", "records_output", "samples_output"];

/// `lamp`: `Z<q>` (cyclic), `Zd:<k>` (`Z^k`) or a path to a JSON lamp table.
/// `base`: `free:<k>` or `lattice:<d>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(default = "default_lamp")]
    pub lamp: String,
    #[serde(default = "default_base")]
    pub base: String,
}

fn default_lamp() -> String {
    "Z2".into()
}

fn default_base() -> String {
    "free:2".into()
}

impl Default for GroupSpec {
    fn default() -> Self {
        GroupSpec {
            lamp: default_lamp(),
            base: default_base(),
        }
    }
}

enum LampKind {
    Finite(FiniteLampGroup),
    Integer(IntegerLamps),
}

enum BaseKind {
    Free(FreeGroup),
    Lattice(Lattice),
}

fn parse_index(key: &str, s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::config(key, format!("`{s}` is not a non-negative integer")))
}

fn lamp_kind(spec: &str) -> Result<LampKind> {
    let s = spec.trim();
    let wrap = |e: Error| Error::config("group.lamp", e.to_string());
    if let Some(k) = s.strip_prefix("Zd:") {
        return IntegerLamps::new(parse_index("group.lamp", k)?)
            .map(LampKind::Integer)
            .map_err(wrap);
    }
    if let Some(q) = s.strip_prefix('Z').filter(|q| q.chars().all(|c| c.is_ascii_digit()) && !q.is_empty()) {
        return FiniteLampGroup::cyclic(parse_index("group.lamp", q)?)
            .map(LampKind::Finite)
            .map_err(wrap);
    }
    let path = s.strip_prefix("table:").unwrap_or(s);
    if path.ends_with(".json") {
        return FiniteLampGroup::from_json_file(Path::new(path))
            .map(LampKind::Finite)
            .map_err(wrap);
    }
    Err(Error::config(
        "group.lamp",
        format!("`{spec}`: expected Z<q>, Zd:<k> or a .json table file"),
    ))
}

fn base_kind(spec: &str) -> Result<BaseKind> {
    let wrap = |e: Error| Error::config("group.base", e.to_string());
    match spec.trim().split_once(':') {
        Some(("free", k)) => FreeGroup::new(parse_index("group.base", k)?)
            .map(BaseKind::Free)
            .map_err(wrap),
        Some(("lattice", d)) => Lattice::new(parse_index("group.base", d)?)
            .map(BaseKind::Lattice)
            .map_err(wrap),
        _ => Err(Error::config(
            "group.base",
            format!("`{spec}`: expected free:<k> or lattice:<d>"),
        )),
    }
}

/// Work that is generic over the concrete wreath product.
pub trait GroupTask {
    type Output;
    fn run<L: LampGroup, B: BaseGroup>(self, wreath: Wreath<L, B>) -> Result<Self::Output>;
}

impl GroupSpec {
    pub fn validate(&self) -> Result<()> {
        lamp_kind(&self.lamp)?;
        base_kind(&self.base)?;
        Ok(())
    }

    /// Builds the group and hands it to `task`.
    pub fn dispatch<T: GroupTask>(&self, task: T) -> Result<T::Output> {
        match (lamp_kind(&self.lamp)?, base_kind(&self.base)?) {
            (LampKind::Finite(l), BaseKind::Free(b)) => task.run(Wreath::new(l, b)),
            (LampKind::Finite(l), BaseKind::Lattice(b)) => task.run(Wreath::new(l, b)),
            (LampKind::Integer(l), BaseKind::Free(b)) => task.run(Wreath::new(l, b)),
            (LampKind::Integer(l), BaseKind::Lattice(b)) => task.run(Wreath::new(l, b)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub element: String,
    pub p: f64,
}

/// `μ`; elements use the `x=v,y=w;h` syntax.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    #[default]
    UniformGenerators,
    GeometricWord { q: f64 },
    Atoms {
        atoms: Vec<AtomSpec>,
        #[serde(default)]
        tail: Option<GeometricTail>,
        #[serde(default)]
        symmetric: bool,
    },
}

impl MeasureSpec {
    pub fn build<L: LampGroup, B: BaseGroup>(&self, wreath: &Wreath<L, B>) -> Result<StepDistribution<L, B>> {
        let wrap = |e: Error| Error::config("measure", e.to_string());
        match self {
            MeasureSpec::UniformGenerators => StepDistribution::uniform_generators(wreath),
            MeasureSpec::GeometricWord { q } => StepDistribution::geometric_word(wreath, *q),
            MeasureSpec::Atoms {
                atoms,
                tail,
                symmetric,
            } => {
                let atoms = atoms
                    .iter()
                    .map(|a| Ok((wreath.parse_element(&a.element)?, a.p)))
                    .collect::<Result<Vec<_>>>()
                    .map_err(wrap)?;
                StepDistribution::new(wreath, atoms, *tail, *symmetric)
            }
        }
        .map_err(wrap)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Default,
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    #[default]
    Auto,
    Tree,
    Dp,
    Brute,
    Heuristic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulateKind {
    #[default]
    Cocycle,
    Defect,
    Tracking,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LengthConfig {
    pub group: GroupSpec,
    pub element: String,
    pub dp_cap: Option<usize>,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TspConfig {
    pub group: GroupSpec,
    pub start: String,
    pub points: Vec<String>,
    pub end: String,
    pub solver: SolverChoice,
    pub dp_cap: usize,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for TspConfig {
    fn default() -> Self {
        TspConfig {
            group: GroupSpec::default(),
            start: "1".into(),
            points: Vec::new(),
            end: "1".into(),
            solver: SolverChoice::Auto,
            dp_cap: DEFAULT_DP_CAP,
            format: OutputFormat::Default,
            output: None,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BfsConfig {
    pub group: GroupSpec,
    pub radius: u64,
    pub limit: usize,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for BfsConfig {
    fn default() -> Self {
        BfsConfig {
            group: GroupSpec::default(),
            radius: 3,
            limit: crate::wreath::BFS_BALL_LIMIT,
            format: OutputFormat::Default,
            output: None,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub group: GroupSpec,
    pub measure: MeasureSpec,
    pub kind: SimulateKind,
    pub horizons: Vec<u64>,
    pub pairs: Vec<(u64, u64)>,
    pub progress: Option<ProgressSpec>,
    pub samples: u64,
    pub seed: u64,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            group: GroupSpec::default(),
            measure: MeasureSpec::default(),
            kind: SimulateKind::Cocycle,
            horizons: vec![1024],
            pairs: vec![(64, 64)],
            progress: None,
            samples: 100,
            seed: 0,
            format: OutputFormat::Default,
            output: None,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DefectTableConfig {
    pub group: GroupSpec,
    pub measure: MeasureSpec,
    /// Grid of `(n, n)` pairs.
    pub ns: Vec<u64>,
    pub powers: Vec<u32>,
    pub samples: u64,
    pub seed: u64,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub records_output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for DefectTableConfig {
    fn default() -> Self {
        DefectTableConfig {
            group: GroupSpec::default(),
            measure: MeasureSpec::default(),
            ns: (6..=12).map(|k| 1 << k).collect(),
            powers: vec![2],
            samples: 1000,
            seed: 0,
            format: OutputFormat::Default,
            output: None,
            records_output: None,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CltConfig {
    pub group: GroupSpec,
    pub measure: MeasureSpec,
    pub n: u64,
    pub samples: u64,
    /// Independent batch for `(ℓ̂, σ̂)`.
    pub calibration_samples: u64,
    pub alpha: f64,
    pub seed: u64,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub samples_output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for CltConfig {
    fn default() -> Self {
        CltConfig {
            group: GroupSpec::default(),
            measure: MeasureSpec::default(),
            n: 2000,
            samples: 5000,
            calibration_samples: 20_000,
            alpha: 0.01,
            seed: 0,
            format: OutputFormat::Default,
            output: None,
            samples_output: None,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackingConfig {
    pub group: GroupSpec,
    pub measure: MeasureSpec,
    pub horizons: Vec<u64>,
    pub progress: Option<ProgressSpec>,
    /// Trajectories with `d_H(id, Z̄_n) <= n / slow_divisor` count as slow.
    pub slow_divisor: u64,
    pub samples: u64,
    pub seed: u64,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub records_output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for TrackingConfig {
    fn default() -> Self {
        TrackingConfig {
            group: GroupSpec::default(),
            measure: MeasureSpec::default(),
            horizons: (7..=13).map(|k| 1 << k).collect(),
            progress: None,
            slow_divisor: 10,
            samples: 500,
            seed: 0,
            format: OutputFormat::Default,
            output: None,
            records_output: None,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyLemmaConfig {
    pub rank: usize,
    pub count: u64,
    pub seed: u64,
    pub d_min: u64,
    pub d_max: u64,
    pub axis_min: u64,
    pub axis_max: u64,
    pub max_points: usize,
    pub density: f64,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl VerifyLemmaConfig {
    pub fn params(&self) -> InstanceParams {
        InstanceParams {
            d_min: self.d_min,
            d_max: self.d_max,
            axis_min: self.axis_min,
            axis_max: self.axis_max,
            max_points: self.max_points,
            density: self.density,
        }
    }
}

impl Default for VerifyLemmaConfig {
    fn default() -> Self {
        let p = InstanceParams::default();
        VerifyLemmaConfig {
            rank: 2,
            count: 1000,
            seed: 0,
            d_min: p.d_min,
            d_max: p.d_max,
            axis_min: p.axis_min,
            axis_max: p.axis_max,
            max_points: p.max_points,
            density: p.density,
            format: OutputFormat::Default,
            output: None,
            threads: None,
        }
    }
}

fn positive(key: &str, v: u64) -> Result<()> {
    if v == 0 {
        return Err(Error::config(key, "must be positive"));
    }
    Ok(())
}

fn nonempty<T>(key: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::config(key, "must not be empty"));
    }
    Ok(())
}

fn threads_ok(t: Option<usize>) -> Result<()> {
    if t == Some(0) {
        return Err(Error::config("threads", "must be positive"));
    }
    Ok(())
}

/// Range checks beyond what deserialisation enforces.
pub trait Validate {
    fn validate(&self) -> Result<()>;
}

impl Validate for LengthConfig {
    fn validate(&self) -> Result<()> {
        self.group.validate()?;
        threads_ok(self.threads)
    }
}

impl Validate for TspConfig {
    fn validate(&self) -> Result<()> {
        self.group.validate()?;
        threads_ok(self.threads)
    }
}

impl Validate for BfsConfig {
    fn validate(&self) -> Result<()> {
        self.group.validate()?;
        positive("limit", self.limit as u64)?;
        threads_ok(self.threads)
    }
}

impl Validate for SimulateConfig {
    fn validate(&self) -> Result<()> {
        self.group.validate()?;
        positive("samples", self.samples)?;
        match self.kind {
            SimulateKind::Defect => nonempty("pairs", &self.pairs)?,
            _ => nonempty("horizons", &self.horizons)?,
        }
        if let Some(p) = &self.progress {
            p.validate()?;
        }
        threads_ok(self.threads)
    }
}

impl Validate for DefectTableConfig {
    fn validate(&self) -> Result<()> {
        self.group.validate()?;
        positive("samples", self.samples)?;
        nonempty("ns", &self.ns)?;
        nonempty("powers", &self.powers)?;
        if self.powers.iter().any(|&p| p == 0 || p > 8) {
            return Err(Error::config("powers", "each power must lie in 1..=8"));
        }
        threads_ok(self.threads)
    }
}

impl Validate for CltConfig {
    fn validate(&self) -> Result<()> {
        self.group.validate()?;
        positive("samples", self.samples)?;
        positive("calibration_samples", self.calibration_samples)?;
        if self.n < 2 {
            return Err(Error::config("n", "must be at least 2"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("alpha", "must lie in (0, 1)"));
        }
        threads_ok(self.threads)
    }
}

impl Validate for TrackingConfig {
    fn validate(&self) -> Result<()> {
        self.group.validate()?;
        positive("samples", self.samples)?;
        positive("slow_divisor", self.slow_divisor)?;
        nonempty("horizons", &self.horizons)?;
        if let Some(p) = &self.progress {
            p.validate()?;
        }
        threads_ok(self.threads)
    }
}

impl Validate for VerifyLemmaConfig {
    fn validate(&self) -> Result<()> {
        if !(2..=26).contains(&self.rank) {
            return Err(Error::config("rank", "must lie in 2..=26"));
        }
        positive("count", self.count)?;
        self.params().validate()?;
        threads_ok(self.threads)
    }
}

/// Sets `path` (dotted) in `root`, creating objects on the way.
pub fn set_path(root: &mut Map<String, Value>, path: &str, value: Value) {
    match path.split_once('.') {
        None => {
            root.insert(path.to_string(), value);
        }
        Some((head, rest)) => {
            let child = root
                .entry(head.to_string())
                .or_insert_with(|| Value::Object(Map::new()));
            if !child.is_object() {
                *child = Value::Object(Map::new());
            }
            set_path(child.as_object_mut().expect("object"), rest, value);
        }
    }
}

/// Reads a JSON object from `path`.
pub fn read_config_file(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(Error::config("config", "top level must be a JSON object")),
        Err(e) => Err(Error::config("config", e.to_string())),
    }
}

/// Deserialises and validates, naming the offending key on failure.
pub fn resolve<T: DeserializeOwned + Validate>(raw: Map<String, Value>) -> Result<T> {
    let cfg: T = serde_path_to_error::deserialize(Value::Object(raw)).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner().to_string();
        let key = if path == "." {
            // unknown or missing top-level fields carry the name in the message
            inner
                .split('`')
                .nth(1)
                .map(str::to_string)
                .unwrap_or_else(|| "config".into())
        } else {
            path
        };
        Error::config(key, inner)
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// SHA-256 of the canonical resolved config without thread counts and output paths.
pub fn config_hash<T: Serialize>(command: &str, cfg: &T) -> String {
    let mut v = serde_json::to_value(cfg).expect("configs serialise");
    if let Value::Object(m) = &mut v {
        for k in UNHASHED {
            m.remove(k);
        }
        m.insert("command".into(), Value::String(command.into()));
    }
    let canonical = serde_json::to_string(&v).expect("values serialise");
    hex::encode(Sha256::digest(canonical.as_bytes()))[..16].to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn obj(v: Value) -> Map<String, Value> {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn samples_zero_names_key() {
        let err = resolve::<CltConfig>(obj(json!({"samples": 0}))).unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "samples"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn bad_keys_are_named() {
        let key = |v: Value| match resolve::<SimulateConfig>(obj(v)).unwrap_err() {
            Error::Config { key, .. } => key,
            e => panic!("{e:?}"),
        };
        assert_eq!(key(json!({"samplez": 3})), "samplez");
        assert_eq!(key(json!({"samples": "many"})), "samples");
        assert_eq!(key(json!({"group": {"base": "tree:2"}})), "group.base");
        assert_eq!(key(json!({"group": {"lamp": "Q"}})), "group.lamp");
        assert_eq!(key(json!({"measure": {"type": "geometric_word", "q": "x"}})), "measure");
    }

    #[test]
    fn hash_ignores_threads_and_outputs() {
        let a = SimulateConfig::default();
        let mut b = a.clone();
        b.threads = Some(7);
        b.output = Some("x.csv".into());
        assert_eq!(config_hash("simulate", &a), config_hash("simulate", &b));
        b.seed = 1;
        assert_ne!(config_hash("simulate", &a), config_hash("simulate", &b));
        assert_ne!(config_hash("simulate", &a), config_hash("tracking", &a));
    }

    #[test]
    fn dotted_overrides() {
        let mut m = Map::new();
        set_path(&mut m, "group.base", json!("lattice:1"));
        set_path(&mut m, "seed", json!(4));
        let cfg: SimulateConfig = resolve(m).unwrap();
        assert_eq!(cfg.group.base, "lattice:1");
        assert_eq!(cfg.group.lamp, "Z2");
        assert_eq!(cfg.seed, 4);
    }

    #[test]
    fn group_specs() {
        for (lamp, base) in [("Z2", "free:2"), ("Z5", "lattice:2"), ("Zd:2", "free:3"), ("Zd:1", "lattice:1")] {
            GroupSpec {
                lamp: lamp.into(),
                base: base.into(),
            }
            .validate()
            .unwrap();
        }
        for (lamp, base) in [("Z1", "free:2"), ("Z2", "free:1"), ("Z2", "lattice:0"), ("missing.json", "free:2")] {
            assert!(GroupSpec {
                lamp: lamp.into(),
                base: base.into()
            }
            .validate()
            .is_err());
        }
    }
}
