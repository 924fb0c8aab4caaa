//! One runner per task. Each returns a fully assembled report.

use serde_json::{json, Map, Value};
use weylkit::acsets::verify_ac_lemmas;
use weylkit::codec::{self, SlExtension};
use weylkit::nevanlinna::{
    boundary_limit, multiplicity_profile, stieltjes_invert, uniform_grid, MultiplicityProfile, ProfileConfig,
};
use weylkit::triplet::{compare_extensions, Extension, SelfAdjointRelation};
use weylkit::{Complex64, IntervalSet};

use crate::error::{CliError, CliResult};
use crate::report::{self, fmt, num, nums, Report, Table};
use crate::scene::{Model, Params, Scene, Task};
use crate::verify;

const DEFAULT_GRID_POINTS: usize = 221;
const DEFAULT_INVERT_EDGES: usize = 301;

pub fn run(scene: &Scene) -> CliResult<Report> {
    match scene.task {
        Task::Eval => eval(scene),
        Task::Limit => limit(scene),
        Task::Spectrum => spectrum(scene),
        Task::Multiplicity => multiplicity(scene),
        Task::Invert => invert(scene),
        Task::Compare => compare(scene),
        Task::Verify => verify::run(scene),
        Task::Acset => acset(scene),
    }
}

fn base_config(scene: &Scene) -> Map<String, Value> {
    let mut m = Map::new();
    if let Some(model) = &scene.model {
        m.insert("model".into(), model.json.clone());
    }
    m
}

fn limit_echo(m: &mut Map<String, Value>, cfg: &weylkit::nevanlinna::LimitConfig<f64>) {
    m.insert("y0".into(), num(cfg.y0));
    m.insert("ratio".into(), num(cfg.ratio));
    m.insert("limit_tol".into(), num(cfg.limit_tol));
    m.insert("max_steps".into(), cfg.max_steps.into());
}

fn profile_echo(m: &mut Map<String, Value>, cfg: &ProfileConfig<f64>) {
    limit_echo(m, &cfg.limit);
    m.insert("rank_tol".into(), num(cfg.rank_tol));
    m.insert("excl_eps".into(), num(cfg.excl_eps));
}

/// `[t0 - 1, t0 + 10]` for Sturm-Liouville models.
fn default_window(model: &Model) -> Option<(f64, f64)> {
    model.sl.as_ref().map(|(m, _)| (m.t0() - 1.0, m.t0() + 10.0))
}

struct Grid {
    window: (f64, f64),
    points: Vec<f64>,
    explicit: bool,
}

fn grid(p: &Params, model: &Model, allow_explicit: bool) -> CliResult<Grid> {
    if allow_explicit {
        if let Some(g) = p.numbers("grid")? {
            if p.get("window").is_some() || p.get("grid_points").is_some() {
                return Err(CliError::validation(
                    "params.grid: give either grid or window/grid_points",
                ));
            }
            if g.len() < 2 || g.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(CliError::validation(
                    "params.grid: needs at least two strictly ascending points",
                ));
            }
            return Ok(Grid {
                window: (g[0], g[g.len() - 1]),
                points: g,
                explicit: true,
            });
        }
    }
    let window = p.window(default_window(model))?;
    let n = p.unsigned("grid_points", DEFAULT_GRID_POINTS)?;
    if n < 2 {
        return Err(CliError::validation("params.grid_points: must be at least 2"));
    }
    Ok(Grid {
        window,
        points: uniform_grid(window.0, window.1, n)?,
        explicit: false,
    })
}

fn grid_echo(m: &mut Map<String, Value>, g: &Grid) {
    if g.explicit {
        m.insert("grid".into(), nums(&g.points));
    } else {
        m.insert("window".into(), nums(&[g.window.0, g.window.1]));
        m.insert("grid_points".into(), g.points.len().into());
    }
}

fn profile_warnings(p: &MultiplicityProfile<f64>, warnings: &mut Vec<String>) {
    for &k in &p.excluded {
        warnings.push(format!(
            "excluded t={} (within excl_eps of a singular point)",
            fmt(p.grid[k])
        ));
    }
    for k in p.unconverged() {
        warnings.push(format!(
            "unconverged t={} (boundary limit did not converge)",
            fmt(p.grid[k])
        ));
    }
}

/// The Krein extension of a Sturm-Liouville model has eigenvalue 0 with
/// multiplicity `rank T`; it is flagged, not folded into the ac profile.
fn pp_flags(model: &Model, window: (f64, f64), warnings: &mut Vec<String>) -> Option<Value> {
    let (m, ext) = model.sl.as_ref()?;
    if *ext != SlExtension::Krein || !(window.0 <= 0.0 && 0.0 <= window.1) {
        return None;
    }
    let top = m.eigenvalues().iter().fold(1.0f64, |a, &l| a.max(l.abs()));
    let rank = m.eigenvalues().iter().filter(|&&l| l > 1e-12 * top).count();
    if rank == 0 {
        return None;
    }
    warnings.push(format!(
        "point spectrum flag at t=0: kernel of the Krein extension, multiplicity {rank}"
    ));
    Some(json!([{"t": 0.0, "kind": "krein-kernel", "multiplicity": rank}]))
}

fn eval(scene: &Scene) -> CliResult<Report> {
    let p = scene.reader();
    let path = "params.points";
    let raw = p
        .get("points")
        .ok_or_else(|| CliError::validation(format!("{path}: required")))?;
    let mut points = Vec::new();
    for (k, v) in codec::array(raw, path)?.iter().enumerate() {
        let kp = codec::index(path, k);
        let pair = codec::array(v, &kp)?;
        if pair.len() != 2 {
            return Err(CliError::validation(format!("{kp}: expected [re, im]")));
        }
        let z = Complex64::new(codec::number(&pair[0], &kp)?, codec::number(&pair[1], &kp)?);
        if z.im == 0.0 {
            return Err(CliError::validation(format!("{kp}: z must not lie on the real axis")));
        }
        points.push(z);
    }
    let f = &scene.model().function;
    let n = f.dim();
    let mut table = Table::new(&["z_re", "z_im"]);
    table.header.extend(report::matrix_columns("F", n));
    let mut values = Vec::new();
    for &z in &points {
        let v = f.evaluate(z)?;
        let mut row = vec![fmt(z.re), fmt(z.im)];
        row.extend(report::matrix_cells(&v));
        table.rows.push(row);
        values.push(json!({"z": report::complex(z), "value": report::matrix(&v)}));
    }
    let mut config = base_config(scene);
    config.insert("points".into(), points.iter().copied().map(report::complex).collect());
    let mut result = Map::new();
    result.insert("values".into(), Value::Array(values));
    Ok(Report {
        task: scene.task.name().into(),
        config: Value::Object(config),
        result,
        warnings: vec![],
        table,
    })
}

fn limit(scene: &Scene) -> CliResult<Report> {
    let p = scene.reader();
    let ts = p
        .numbers("t")?
        .ok_or_else(|| CliError::validation("params.t: required"))?;
    let cfg = p.limit_config()?;
    let f = &scene.model().function;
    let n = f.dim();
    let mut table = Table::new(&["t", "converged", "last_delta"]);
    table.header.extend(report::matrix_columns("F", n));
    let mut limits = Vec::new();
    let mut warnings = Vec::new();
    for &t in &ts {
        let lim = boundary_limit(f, t, &cfg)?;
        if !lim.converged {
            warnings.push(format!("unconverged t={} (last_delta {})", fmt(t), fmt(lim.last_delta)));
        }
        let mut row = vec![fmt(t), lim.converged.to_string(), fmt(lim.last_delta)];
        row.extend(report::matrix_cells(&lim.value));
        table.rows.push(row);
        let mut entry = Map::new();
        entry.insert("t".into(), num(t));
        entry.insert("converged".into(), lim.converged.into());
        entry.insert("last_delta".into(), num(lim.last_delta));
        entry.insert("steps".into(), lim.y_used.len().into());
        entry.insert("y_final".into(), num(lim.y_used.last().copied().unwrap_or(f64::NAN)));
        entry.insert("value".into(), report::matrix(&lim.value));
        if let Some(r) = lim.closed_form_residual {
            entry.insert("closed_form_residual".into(), num(r));
        }
        limits.push(Value::Object(entry));
    }
    let mut config = base_config(scene);
    config.insert("t".into(), nums(&ts));
    limit_echo(&mut config, &cfg);
    config.insert("cross_check".into(), cfg.cross_check.into());
    let mut result = Map::new();
    result.insert("limits".into(), Value::Array(limits));
    Ok(Report {
        task: scene.task.name().into(),
        config: Value::Object(config),
        result,
        warnings,
        table,
    })
}

fn profile_table(p: &MultiplicityProfile<f64>) -> Table {
    let mut table = Table::new(&["t", "d", "converged", "excluded"]);
    for (k, &t) in p.grid.iter().enumerate() {
        table.rows.push(vec![
            fmt(t),
            p.d[k].to_string(),
            (p.d[k] >= 0).to_string(),
            p.is_excluded(k).to_string(),
        ]);
    }
    table
}

fn spectrum(scene: &Scene) -> CliResult<Report> {
    let p = scene.reader();
    let model = scene.model();
    let g = grid(&p, model, false)?;
    let cfg = p.profile_config()?;
    let f = &model.function;
    let profile = multiplicity_profile(f, &g.points, &cfg)?;
    let support = profile.ac_support(&f.singular_points(), g.window.0, g.window.1);
    let mut warnings = Vec::new();
    profile_warnings(&profile, &mut warnings);
    let flags = pp_flags(model, g.window, &mut warnings);
    let mut table = Table::new(&["t", "d"]);
    for (k, &t) in profile.grid.iter().enumerate() {
        table.rows.push(vec![fmt(t), profile.d[k].to_string()]);
    }
    table.footer.push(("ac_spectrum".into(), format!("\"{support}\"")));
    let mut config = base_config(scene);
    grid_echo(&mut config, &g);
    profile_echo(&mut config, &cfg);
    let mut result = Map::new();
    result.insert("ac_spectrum".into(), codec::interval_set_to_json(&support));
    result.insert("ac_spectrum_text".into(), support.to_string().into());
    result.insert("grid".into(), nums(&profile.grid));
    result.insert("d".into(), profile.d.clone().into());
    result.insert("excluded".into(), profile.excluded.clone().into());
    if let Some(flags) = flags {
        result.insert("pp_flags".into(), flags);
    }
    Ok(Report {
        task: scene.task.name().into(),
        config: Value::Object(config),
        result,
        warnings,
        table,
    })
}

fn multiplicity(scene: &Scene) -> CliResult<Report> {
    let p = scene.reader();
    let model = scene.model();
    let g = grid(&p, model, true)?;
    let cfg = p.profile_config()?;
    let profile = multiplicity_profile(&model.function, &g.points, &cfg)?;
    let mut warnings = Vec::new();
    profile_warnings(&profile, &mut warnings);
    let flags = pp_flags(model, g.window, &mut warnings);
    let mut config = base_config(scene);
    grid_echo(&mut config, &g);
    profile_echo(&mut config, &cfg);
    let mut result = Map::new();
    result.insert("grid".into(), nums(&profile.grid));
    result.insert("d".into(), profile.d.clone().into());
    let converged: Vec<bool> = profile.d.iter().map(|&d| d >= 0).collect();
    result.insert("converged".into(), converged.into());
    result.insert("excluded".into(), profile.excluded.clone().into());
    if let Some(flags) = flags {
        result.insert("pp_flags".into(), flags);
    }
    Ok(Report {
        task: scene.task.name().into(),
        config: Value::Object(config),
        result,
        warnings,
        table: profile_table(&profile),
    })
}

fn invert(scene: &Scene) -> CliResult<Report> {
    let p = scene.reader();
    let model = scene.model();
    let (edges, explicit) = match p.numbers("edges")? {
        Some(e) => {
            if p.get("window").is_some() || p.get("grid_points").is_some() {
                return Err(CliError::validation(
                    "params.edges: give either edges or window/grid_points",
                ));
            }
            (e, true)
        }
        None => {
            let w = p.window(default_window(model))?;
            let n = p.unsigned("grid_points", DEFAULT_INVERT_EDGES)?;
            if n < 2 {
                return Err(CliError::validation("params.grid_points: must be at least 2"));
            }
            (uniform_grid(w.0, w.1, n)?, false)
        }
    };
    let mut cfg = ProfileConfig {
        limit: p.limit_config()?,
        ..ProfileConfig::default()
    };
    cfg.excl_eps = p.number("excl_eps", cfg.excl_eps)?.max(0.0);
    let f = &model.function;
    let inv = stieltjes_invert(f, &edges, &cfg)?;
    let n = f.dim();
    let mut table = Table::new(&["t"]);
    table.header.extend(report::matrix_columns("density", n));
    for piece in inv.measure.ac_pieces() {
        let mut row = vec![fmt(0.5 * (piece.a + piece.b))];
        row.extend(report::matrix_cells(piece.density.as_matrix()));
        table.rows.push(row);
    }
    let warnings = inv
        .omitted
        .iter()
        .map(|&k| {
            format!(
                "omitted cell [{}, {}) (unconverged or centred on a singular point)",
                fmt(edges[k]),
                fmt(edges[k + 1])
            )
        })
        .collect();
    let mut config = base_config(scene);
    if explicit {
        config.insert("edges".into(), nums(&edges));
    } else {
        config.insert("window".into(), nums(&[edges[0], edges[edges.len() - 1]]));
        config.insert("grid_points".into(), edges.len().into());
    }
    limit_echo(&mut config, &cfg.limit);
    config.insert("excl_eps".into(), num(cfg.excl_eps));
    let mut result = Map::new();
    result.insert("measure".into(), codec::measure_to_json(&inv.measure));
    result.insert("omitted".into(), inv.omitted.clone().into());
    Ok(Report {
        task: scene.task.name().into(),
        config: Value::Object(config),
        result,
        warnings,
        table,
    })
}

/// `"reference"`, `{"B": matrix}` or `{"op_basis": matrix, "B_op": matrix}`.
pub fn extension_from_json(v: &Value, path: &str, dim: usize) -> CliResult<Extension<f64>> {
    if let Some(s) = v.as_str() {
        return match s {
            "reference" => Ok(Extension::Reference),
            _ => Err(CliError::validation(format!(
                "{path}: expected \"reference\" or an object"
            ))),
        };
    }
    let map = codec::object(v, path, &["B", "op_basis", "B_op"])?;
    let check = |n: usize, what: &str| {
        if n == dim {
            Ok(())
        } else {
            Err(CliError::validation(format!(
                "{path}.{what}: dimension {n} does not match the model dimension {dim}"
            )))
        }
    };
    match (map.get("B"), map.get("op_basis"), map.get("B_op")) {
        (Some(b), None, None) => {
            let b = codec::hermitian_from_json(b, &codec::child(path, "B"))?;
            check(b.dim(), "B")?;
            Ok(Extension::Operator(b))
        }
        (None, Some(basis), Some(b_op)) => {
            let basis = codec::matrix_from_json(basis, &codec::child(path, "op_basis"))?;
            let b_op = codec::hermitian_from_json(b_op, &codec::child(path, "B_op"))?;
            check(basis.rows(), "op_basis")?;
            let rel =
                SelfAdjointRelation::new(basis, b_op).map_err(|e| CliError::validation(format!("{path}: {e}")))?;
            Ok(Extension::Relation(rel))
        }
        _ => Err(CliError::validation(format!(
            "{path}: give either B or both op_basis and B_op"
        ))),
    }
}

fn extension_echo(e: &Extension<f64>) -> Value {
    match e {
        Extension::Reference => "reference".into(),
        Extension::Operator(b) => json!({"B": codec::hermitian_to_json(b)}),
        Extension::Relation(r) => json!({
            "op_basis": codec::matrix_to_json(r.op_basis()),
            "B_op": codec::hermitian_to_json(r.b_op()),
        }),
    }
}

fn compare(scene: &Scene) -> CliResult<Report> {
    let p = scene.reader();
    let model = scene.model();
    let dim = model.function.dim();
    let first = match p.get("first") {
        Some(v) => extension_from_json(v, "params.first", dim)?,
        None => Extension::Reference,
    };
    let second = match p.get("second") {
        Some(v) => extension_from_json(v, "params.second", dim)?,
        None => return Err(CliError::validation("params.second: required")),
    };
    let g = grid(&p, model, true)?;
    let cfg = p.profile_config()?;
    let v = compare_extensions(&model.function, &first, &second, &g.points, &cfg)?;
    let mut warnings = Vec::new();
    for &k in &v.excluded {
        warnings.push(format!(
            "excluded t={} (within excl_eps of a singular point)",
            fmt(v.grid[k])
        ));
    }
    for k in v.unconverged() {
        warnings.push(format!(
            "unconverged t={} (boundary limit did not converge)",
            fmt(v.grid[k])
        ));
    }
    let mut table = Table::new(&["t", "d1", "d2", "excluded"]);
    for (k, &t) in v.grid.iter().enumerate() {
        let excluded = v.excluded.binary_search(&k).is_ok();
        table.rows.push(vec![
            fmt(t),
            v.d1[k].to_string(),
            v.d2[k].to_string(),
            excluded.to_string(),
        ]);
    }
    table.footer.push(("verdict".into(), v.verdict.as_str().into()));
    let mut config = base_config(scene);
    grid_echo(&mut config, &g);
    profile_echo(&mut config, &cfg);
    config.insert("first".into(), extension_echo(&first));
    config.insert("second".into(), extension_echo(&second));
    let mut result = Map::new();
    result.insert("verdict".into(), v.verdict.as_str().into());
    result.insert("grid".into(), nums(&v.grid));
    result.insert("d1".into(), v.d1.clone().into());
    result.insert("d2".into(), v.d2.clone().into());
    result.insert("excluded".into(), v.excluded.clone().into());
    Ok(Report {
        task: scene.task.name().into(),
        config: Value::Object(config),
        result,
        warnings,
        table,
    })
}

fn acset(scene: &Scene) -> CliResult<Report> {
    let p = scene.reader();
    let set = match p.get("set") {
        Some(v) => codec::interval_set_from_json(v, "params.set")?,
        None => return Err(CliError::validation("params.set: required")),
    };
    let parts: Vec<IntervalSet> = match p.get("parts") {
        Some(v) => codec::array(v, "params.parts")?
            .iter()
            .enumerate()
            .map(|(k, x)| codec::interval_set_from_json(x, &codec::index("params.parts", k)))
            .collect::<Result<_, _>>()?,
        None => vec![],
    };
    let r = verify_ac_lemmas(&set, &parts);
    let closure_ac = set.closure_ac();
    let mut config = Map::new();
    config.insert("set".into(), codec::interval_set_to_json(&set));
    config.insert("parts".into(), parts.iter().map(codec::interval_set_to_json).collect());
    let mut result = Map::new();
    result.insert("closure".into(), codec::interval_set_to_json(&set.closure()));
    result.insert("closure_ac".into(), codec::interval_set_to_json(&closure_ac));
    result.insert("measure".into(), num(set.measure()));
    result.insert("remainder".into(), codec::interval_set_to_json(&r.remainder));
    result.insert("remainder_measure".into(), num(r.remainder_measure));
    result.insert(
        "closure_of_union".into(),
        codec::interval_set_to_json(&r.closure_of_union),
    );
    result.insert(
        "union_of_closures".into(),
        codec::interval_set_to_json(&r.union_of_closures),
    );
    result.insert("null_remainder".into(), r.null_remainder.into());
    result.insert("union_rule".into(), r.union_rule.into());
    result.insert("passed".into(), r.passed().into());
    let mut table = Table::new(&["check", "value"]);
    for (k, v) in [
        ("closure_ac", format!("\"{closure_ac}\"")),
        ("remainder", format!("\"{}\"", r.remainder)),
        ("remainder_measure", fmt(r.remainder_measure)),
        ("null_remainder", r.null_remainder.to_string()),
        ("union_rule", r.union_rule.to_string()),
        ("passed", r.passed().to_string()),
    ] {
        table.rows.push(vec![k.into(), v]);
    }
    Ok(Report {
        task: scene.task.name().into(),
        config: Value::Object(config),
        result,
        warnings: vec![],
        table,
    })
}
