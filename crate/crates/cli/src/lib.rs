//! Batch front end: reads a JSON description of a local torus action, runs
//! the requested pipelines and prints a text or JSON report.

pub mod input;
pub mod report;

use std::path::PathBuf;

use sha2::{Digest, Sha256};

pub use input::{parse_input, serialize_input, InputDocument, InputError, Resolved};
pub use report::{run, Command, InvariantReport, Section, Status};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Input = 1,
    Validation = 2,
    Scope = 3,
}

/// Bundled example documents, by name.
pub const FIXTURES: &[(&str, &str)] = &[
    ("holed_torus", include_str!("../fixtures/holed_torus.json")),
    ("cp1_x_cp1", include_str!("../fixtures/cp1_x_cp1.json")),
    ("cp2", include_str!("../fixtures/cp2.json")),
    ("s2_x_t2", include_str!("../fixtures/s2_x_t2.json")),
    ("closed_torus", include_str!("../fixtures/closed_torus.json")),
    ("point_rank_3", include_str!("../fixtures/point_rank_3.json")),
];

pub fn fixture(name: &str) -> Result<&'static str, InputError> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| InputError::UnknownFixture(name.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Fixture(String),
    Path(PathBuf),
    Text(String),
}

/// What the binary prints and the code it exits with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn load(source: &Source) -> Result<(String, Resolved, Option<String>), InputError> {
    let text = match source {
        Source::Fixture(name) => fixture(name)?.to_string(),
        Source::Path(p) => input::read_input(p)?,
        Source::Text(t) => t.clone(),
    };
    let doc = parse_input(&text)?;
    let resolved = doc.resolve()?;
    Ok((text, resolved, doc.name))
}

/// Runs `cmd` on `source`. With `section`, only that part of a report is
/// printed and it alone decides the exit code.
pub fn execute(cmd: Command, source: &Source, json: bool, section: Option<Command>) -> Outcome {
    let (text, resolved, name) = match load(source) {
        Ok(x) => x,
        Err(e) => {
            return Outcome {
                stdout: String::new(),
                stderr: format!("input error: {e}\n"),
                code: ExitCode::Input as i32,
            }
        }
    };
    let mut rep = run(cmd, &resolved, sha256_hex(&text), name);
    let mut code = rep.exit_code();
    if let Some(sec) = section {
        rep.sections.retain(|s| s.name == sec.name());
        code = rep.sections.first().map_or(ExitCode::Input as i32, Section::exit_code);
    }
    let stdout = if json { rep.render_json() + "\n" } else { rep.render_text() };
    let stderr = rep
        .sections
        .iter()
        .filter_map(|s| s.error.as_ref().map(|e| format!("{} failed [{}]: {}\n", s.name, e.kind, e.message)))
        .collect();
    Outcome { stdout, stderr, code }
}

pub fn fixture_listing() -> String {
    FIXTURES.iter().map(|(n, _)| format!("{n}\n")).collect()
}
