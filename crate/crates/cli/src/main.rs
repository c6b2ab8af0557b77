//! `quasilocal` scenario runner.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 1 I/O failure. Errors are printed to stderr as one JSON object.

mod commands;
mod config;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use config::{Outputs, ScenarioConfig};

#[derive(Parser, Debug)]
#[command(name = "quasilocal", version, about = "Quasi-local energy of small spheres in perturbed Schwarzschild")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (JSON). Defaults apply to every missing key.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. `--set background.m=2`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Integrate one radial mode and tabulate Z, its derivative and A(r).
    Radial,
    /// Solve the embedding equations for each surface distance.
    Embed,
    /// Energy and its time derivative on the (d, t) grid.
    Energy,
    /// Energy sweep with falloff fits in d.
    Sweep,
    /// Induced geometry and the Hawking line of each surface.
    Geometry,
    /// Loop integral of a field on the parameter sphere.
    Loop,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Radial => "radial",
            Command::Embed => "embed",
            Command::Energy => "energy",
            Command::Sweep => "sweep",
            Command::Geometry => "geometry",
            Command::Loop => "loop",
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl RunError {
    fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Numerical(_) => "numerical",
            RunError::Io(_) => "io",
        }
    }

    fn message(&self) -> &str {
        match self {
            RunError::Config(m) | RunError::Numerical(m) | RunError::Io(m) => m,
        }
    }

    fn code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

impl From<quasilocal::Error> for RunError {
    fn from(e: quasilocal::Error) -> Self {
        match e {
            quasilocal::Error::InvalidArgument(_) => RunError::Config(e.to_string()),
            _ => RunError::Numerical(e.to_string()),
        }
    }
}

/// Artifacts collected in memory and written only once a run succeeds.
pub struct Artifacts {
    stem: String,
    subcommand: &'static str,
    config: Value,
    outputs: Outputs,
    files: Vec<(String, String)>,
}

fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl Artifacts {
    fn new(cmd: Command, cfg: &ScenarioConfig) -> Self {
        Self {
            stem: cfg.outputs.prefix.clone().unwrap_or_else(|| cmd.name().to_string()),
            subcommand: cmd.name(),
            config: serde_json::to_value(cfg).expect("config serializes"),
            outputs: cfg.outputs.clone(),
            files: Vec::new(),
        }
    }

    fn name(&self, suffix: &str, ext: &str) -> String {
        if suffix.is_empty() {
            format!("{}.{ext}", self.stem)
        } else {
            format!("{}_{suffix}.{ext}", self.stem)
        }
    }

    pub fn csv(&mut self, suffix: &str, header: &[&str], rows: &[Vec<f64>]) {
        if !self.outputs.csv {
            return;
        }
        let mut s = format!("# config: {}\n{}\n", self.config, header.join(","));
        for r in rows {
            let cells: Vec<String> = r.iter().map(|&v| fmt_num(v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        self.files.push((self.name(suffix, "csv"), s));
    }

    pub fn json(&mut self, result: Value) {
        if !self.outputs.json {
            return;
        }
        let doc = json!({ "subcommand": self.subcommand, "config": self.config, "result": result });
        let mut s = serde_json::to_string_pretty(&doc).expect("json serializes");
        s.push('\n');
        self.files.push((self.name("", "json"), s));
    }

    pub fn svg(&mut self, plot: svg::Plot) {
        if !self.outputs.svg {
            return;
        }
        let desc = self.config.to_string();
        let s = svg::render(&svg::Plot { desc: &desc, ..plot });
        self.files.push((self.name("", "svg"), s));
    }

    fn write(self, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
        std::fs::create_dir_all(dir).map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))?;
        let mut written = Vec::new();
        for (name, content) in self.files {
            let p = dir.join(name);
            std::fs::write(&p, content).map_err(|e| RunError::Io(format!("{}: {e}", p.display())))?;
            written.push(p);
        }
        Ok(written)
    }
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, RunError> {
    let cfg = config::load(cli.config.as_deref(), &cli.set)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(RunError::Config("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| RunError::Io(e.to_string()))?;
    let mut out = Artifacts::new(cli.command, &cfg);
    pool.install(|| match cli.command {
        Command::Radial => commands::radial(&cfg, &mut out),
        Command::Embed => commands::embed_cmd(&cfg, &mut out),
        Command::Energy => commands::energy(&cfg, &mut out),
        Command::Sweep => commands::sweep(&cfg, &mut out),
        Command::Geometry => commands::geometry(&cfg, &mut out),
        Command::Loop => commands::loop_cmd(&cfg, &mut out),
    })?;
    out.write(&cli.out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = json!({ "error": { "kind": e.kind(), "message": e.message() } });
            eprintln!("{body}");
            ExitCode::from(e.code())
        }
    }
}
