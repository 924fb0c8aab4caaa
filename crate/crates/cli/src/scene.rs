//! Scene files: `{"model": node, "task": name, "params": {...}, "output": {"path", "format"}}`.

use std::path::PathBuf;

use serde_json::{Map, Value};
use weylkit::codec::{self, child, SlExtension};
use weylkit::nevanlinna::{LimitConfig, ProfileConfig};
use weylkit::{NevanlinnaFunction, SLModel};

use crate::error::{CliError, CliResult};
use crate::report::{self, Format};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Eval,
    Limit,
    Spectrum,
    Multiplicity,
    Invert,
    Compare,
    Verify,
    Acset,
}

pub const TASKS: [Task; 8] = [
    Task::Eval,
    Task::Limit,
    Task::Spectrum,
    Task::Multiplicity,
    Task::Invert,
    Task::Compare,
    Task::Verify,
    Task::Acset,
];

const LIMIT_KEYS: [&str; 4] = ["y0", "ratio", "limit_tol", "max_steps"];
const PROFILE_KEYS: [&str; 2] = ["rank_tol", "excl_eps"];

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Eval => "eval",
            Task::Limit => "limit",
            Task::Spectrum => "spectrum",
            Task::Multiplicity => "multiplicity",
            Task::Invert => "invert",
            Task::Compare => "compare",
            Task::Verify => "verify",
            Task::Acset => "acset",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        TASKS.into_iter().find(|t| t.name() == s)
    }

    /// Keys accepted in `params`.
    pub fn param_keys(self) -> Vec<&'static str> {
        let mut keys = match self {
            Task::Eval => vec!["points"],
            Task::Limit => vec!["t", "cross_check"],
            Task::Spectrum => vec!["window", "grid_points"],
            Task::Multiplicity => vec!["window", "grid_points", "grid"],
            Task::Invert => vec!["window", "grid_points", "edges", "excl_eps"],
            Task::Compare => vec!["window", "grid_points", "grid", "first", "second"],
            Task::Verify => vec!["suites"],
            Task::Acset => vec!["set", "parts"],
        };
        if matches!(
            self,
            Task::Limit | Task::Spectrum | Task::Multiplicity | Task::Invert | Task::Compare
        ) {
            keys.extend(LIMIT_KEYS);
        }
        if matches!(self, Task::Spectrum | Task::Multiplicity | Task::Compare) {
            keys.extend(PROFILE_KEYS);
        }
        keys
    }

    pub fn uses_model(self) -> bool {
        !matches!(self, Task::Verify | Task::Acset)
    }
}

/// The decoded `model` block. `sl` is kept when the top node is an `"sl"`
/// node, for window defaults and kernel flags.
#[derive(Clone, Debug)]
pub struct Model {
    pub function: NevanlinnaFunction,
    pub sl: Option<(SLModel, SlExtension)>,
    pub json: Value,
}

impl Model {
    pub fn from_json(v: &Value, path: &str) -> CliResult<Self> {
        let sl = if codec::node_kind(v, path)? == "sl" {
            Some(codec::sl_from_json(v, path)?)
        } else {
            None
        };
        let function = codec::function_from_json(v, path)?;
        let json = match &sl {
            Some((m, ext)) => serde_json::json!({
                "node": "sl",
                "T": codec::hermitian_to_json(m.t()),
                "extension": extension_name(*ext),
            }),
            None => codec::function_to_json(&function),
        };
        Ok(Model { function, sl, json })
    }
}

pub fn extension_name(e: SlExtension) -> &'static str {
    match e {
        SlExtension::Friedrichs => "friedrichs",
        SlExtension::Krein => "krein",
        SlExtension::Neumann => "neumann",
        SlExtension::Regularized => "regularized",
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Clone, Debug)]
pub struct Scene {
    pub task: Task,
    pub model: Option<Model>,
    pub params: Map<String, Value>,
    pub output: Output,
}

/// Command-line overrides; each replaces the scene parameter of the same name.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub window: Option<(f64, f64)>,
    pub grid_points: Option<usize>,
    pub y0: Option<f64>,
    pub ratio: Option<f64>,
    pub limit_tol: Option<f64>,
    pub max_steps: Option<usize>,
    pub rank_tol: Option<f64>,
    pub excl_eps: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Overrides {
    fn entries(&self) -> Vec<(&'static str, Value)> {
        let mut out = Vec::new();
        if let Some((a, b)) = self.window {
            out.push(("window", Value::Array(vec![report::num(a), report::num(b)])));
        }
        if let Some(n) = self.grid_points {
            out.push(("grid_points", n.into()));
        }
        for (key, v) in [
            ("y0", self.y0),
            ("ratio", self.ratio),
            ("limit_tol", self.limit_tol),
            ("rank_tol", self.rank_tol),
            ("excl_eps", self.excl_eps),
        ] {
            if let Some(x) = v {
                out.push((key, report::num(x)));
            }
        }
        if let Some(n) = self.max_steps {
            out.push(("max_steps", n.into()));
        }
        out
    }
}

fn line_col_error(e: &serde_json::Error, origin: &str) -> CliError {
    CliError::validation(format!("{origin}:{}:{}: {e}", e.line(), e.column()))
}

impl Scene {
    /// Parses scene text. `expected` is the subcommand's task; the scene's own
    /// `task` may be omitted then, and must agree if present.
    pub fn parse(text: &str, origin: &str, expected: Option<Task>) -> CliResult<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| line_col_error(&e, origin))?;
        let map = codec::object(&v, "", &["model", "task", "params", "output"])?;
        let task = match (map.get("task"), expected) {
            (Some(t), expected) => {
                let name = codec::string(t, "task")?;
                let task = Task::parse(name).ok_or_else(|| {
                    let names: Vec<_> = TASKS.iter().map(|t| t.name()).collect();
                    CliError::validation(format!(
                        "task: unknown task \"{name}\" (expected one of {})",
                        names.join(", ")
                    ))
                })?;
                if let Some(e) = expected.filter(|&e| e != task) {
                    return Err(CliError::validation(format!(
                        "task: scene declares \"{}\" but the subcommand is \"{}\"",
                        task.name(),
                        e.name()
                    )));
                }
                task
            }
            (None, Some(e)) => e,
            (None, None) => return Err(CliError::validation("task: missing required key")),
        };
        let model = match (map.get("model"), task.uses_model()) {
            (Some(m), true) => Some(Model::from_json(m, "model")?),
            (None, true) => {
                return Err(CliError::validation(format!(
                    "model: required for task {}",
                    task.name()
                )))
            }
            (Some(_), false) => {
                return Err(CliError::validation(format!("model: not used by task {}", task.name())));
            }
            (None, false) => None,
        };
        let params = match map.get("params") {
            Some(p) => codec::object(p, "params", &task.param_keys())?.clone(),
            None => Map::new(),
        };
        let output = match map.get("output") {
            Some(o) => {
                let om = codec::object(o, "output", &["path", "format"])?;
                let path = om
                    .get("path")
                    .map(|p| codec::string(p, "output.path").map(PathBuf::from))
                    .transpose()?;
                let format = match om.get("format") {
                    Some(f) => {
                        let s = codec::string(f, "output.format")?;
                        Format::parse(s).ok_or_else(|| CliError::validation("output.format: expected json or csv"))?
                    }
                    None => Format::Json,
                };
                Output { path, format }
            }
            None => Output {
                path: None,
                format: Format::Json,
            },
        };
        Ok(Scene {
            task,
            model,
            params,
            output,
        })
    }

    pub fn apply(&mut self, o: &Overrides) -> CliResult<()> {
        let allowed = self.task.param_keys();
        for (key, value) in o.entries() {
            if !allowed.contains(&key) {
                return Err(CliError::validation(format!(
                    "--{}: not a parameter of task {}",
                    key.replace('_', "-"),
                    self.task.name()
                )));
            }
            self.params.insert(key.into(), value);
        }
        if let Some(p) = &o.output {
            self.output.path = Some(p.clone());
        }
        if let Some(f) = o.format {
            self.output.format = f;
        }
        Ok(())
    }

    pub fn model(&self) -> &Model {
        self.model.as_ref().expect("validated: task uses a model")
    }

    pub fn reader(&self) -> Params<'_> {
        Params { map: &self.params }
    }
}

/// Typed access to `params` with field-path diagnostics.
pub struct Params<'a> {
    map: &'a Map<String, Value>,
}

impl<'a> Params<'a> {
    pub fn get(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key)
    }

    fn path(key: &str) -> String {
        child("params", key)
    }

    pub fn number(&self, key: &str, default: f64) -> CliResult<f64> {
        match self.map.get(key) {
            Some(v) => Ok(codec::number(v, &Self::path(key))?),
            None => Ok(default),
        }
    }

    pub fn positive(&self, key: &str, default: f64) -> CliResult<f64> {
        let x = self.number(key, default)?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(CliError::validation(format!(
                "{}: must be positive and finite",
                Self::path(key)
            )));
        }
        Ok(x)
    }

    pub fn unsigned(&self, key: &str, default: usize) -> CliResult<usize> {
        match self.map.get(key) {
            Some(v) => Ok(codec::unsigned(v, &Self::path(key))?),
            None => Ok(default),
        }
    }

    pub fn boolean(&self, key: &str, default: bool) -> CliResult<bool> {
        match self.map.get(key) {
            Some(v) => Ok(codec::boolean(v, &Self::path(key))?),
            None => Ok(default),
        }
    }

    pub fn numbers(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        let Some(v) = self.map.get(key) else {
            return Ok(None);
        };
        let path = Self::path(key);
        let xs = codec::array(v, &path)?
            .iter()
            .enumerate()
            .map(|(k, x)| codec::number(x, &codec::index(&path, k)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(xs))
    }

    pub fn window(&self, default: Option<(f64, f64)>) -> CliResult<(f64, f64)> {
        let path = Self::path("window");
        match self.numbers("window")? {
            Some(w) if w.len() == 2 && w[0] < w[1] => Ok((w[0], w[1])),
            Some(_) => Err(CliError::validation(format!("{path}: expected [a, b] with a < b"))),
            None => default.ok_or_else(|| CliError::validation(format!("{path}: required for this model"))),
        }
    }

    pub fn limit_config(&self) -> CliResult<LimitConfig<f64>> {
        let d = LimitConfig::<f64>::default();
        let cfg = LimitConfig {
            y0: self.positive("y0", d.y0)?,
            ratio: self.number("ratio", d.ratio)?,
            limit_tol: self.positive("limit_tol", d.limit_tol)?,
            max_steps: self.unsigned("max_steps", d.max_steps)?,
            cross_check: self.boolean("cross_check", d.cross_check)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn profile_config(&self) -> CliResult<ProfileConfig<f64>> {
        let d = ProfileConfig::<f64>::default();
        Ok(ProfileConfig {
            limit: self.limit_config()?,
            rank_tol: self.positive("rank_tol", d.rank_tol)?,
            excl_eps: self.number("excl_eps", d.excl_eps)?.max(0.0),
        })
    }
}
