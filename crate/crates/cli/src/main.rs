use std::path::PathBuf;
use std::process;

use clap::Parser;
use loctorus_cli::{execute, fixture_listing, Command, Source};

/// Invariants of four-manifolds with a local torus action.
#[derive(Parser, Debug)]
#[command(name = "loctorus", version)]
struct Cli {
    /// Pipeline to run.
    #[arg(value_enum, required_unless_present = "fixtures")]
    command: Option<Command>,
    /// Name of a bundled fixture (see --fixtures).
    #[arg(conflicts_with = "input")]
    fixture: Option<String>,
    /// Path to a JSON input document.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Restrict a report to one section.
    #[arg(long, value_enum)]
    section: Option<Command>,
    /// List the bundled fixtures and exit.
    #[arg(long)]
    fixtures: bool,
}

fn main() {
    let cli = Cli::parse();
    if cli.fixtures {
        print!("{}", fixture_listing());
        return;
    }
    let command = cli.command.expect("clap enforces a command");
    let source = match (cli.input, cli.fixture) {
        (Some(p), _) => Source::Path(p),
        (None, Some(f)) => Source::Fixture(f),
        (None, None) => {
            eprintln!("input error: give a fixture name or --input <path>");
            process::exit(1);
        }
    };
    let out = execute(command, &source, cli.json, cli.section);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    process::exit(out.code);
}
