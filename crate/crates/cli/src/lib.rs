//! Scene-file runner for weylkit: parses a scene, dispatches the task and
//! renders a deterministic JSON or CSV report.

pub mod error;
pub mod report;
pub mod scene;
pub mod tasks;
pub mod verify;

use std::path::Path;

pub use error::{CliError, CliResult};
pub use report::{Format, Report};
pub use scene::{Overrides, Scene, Task};

/// Reads, validates and runs a scene file.
pub fn run_file(path: &Path, task: Option<Task>, overrides: &Overrides) -> CliResult<(Scene, Report)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    let mut scene = Scene::parse(&text, &path.display().to_string(), task)?;
    scene.apply(overrides)?;
    let report = tasks::run(&scene)?;
    Ok((scene, report))
}

/// Writes the rendered report to the scene's output path, or returns it for
/// standard output when no path is set.
pub fn emit(scene: &Scene, report: &Report) -> CliResult<Option<String>> {
    let text = report.render(scene.output.format);
    match &scene.output.path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::validation(format!("{}: {e}", p.display())))?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}
