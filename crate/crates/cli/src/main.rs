use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mecsvs::circuit::{cascade_generate, fidelity};
use mecsvs::probe::{build_state_vector, Parity, ProbeSpec};
use mecsvs::sweep::{emit_table, find_paper_crossovers, parse_config_text, run_sweep, Entry, Preset, SweepConfig};
use mecsvs::{verify, Error};

const EXIT_INVALID: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "mecsvs", version, about = "Multi-mode catalyzed squeezed-vacuum phase estimation bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the bound over a parameter grid
    Sweep(SweepArgs),
    /// Locate the reference crossover points
    Crossover {
        /// fig6a, fig7 or fig8a; all presets when omitted
        #[arg(long)]
        preset: Option<Preset>,
    },
    /// Cross-check closed forms against the Fock-space oracle
    Verify,
    /// Generate a probe with the heralded circuit and report its fidelity
    Circuit {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 8)]
        cutoff: usize,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long = "T", default_value_t = 0.9)]
        t: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "sym")]
        parity: Parity,
    },
}

/// Flags override keys read from `--config`.
#[derive(Args)]
struct SweepArgs {
    /// File of `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Grid `start:stop:step` or a single value
    #[arg(long)]
    r: Option<String>,
    /// Comma-separated transmissivities
    #[arg(long = "T")]
    t: Option<String>,
    /// Comma-separated catalysis photon numbers
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    d: Option<String>,
    /// Comma-separated detection efficiencies (lossless when absent)
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    parity: Option<String>,
    /// `r` or `mean` (grid values are total mean photon numbers)
    #[arg(long)]
    axis: Option<String>,
    /// `csv` or `json`
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    threads: Option<String>,
}

impl SweepArgs {
    fn entries(&self) -> Result<Vec<Entry>, Error> {
        let mut entries = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                parse_config_text(&text, &path.display().to_string())?
            }
            None => Vec::new(),
        };
        let flags = [
            ("r", &self.r),
            ("T", &self.t),
            ("n", &self.n),
            ("d", &self.d),
            ("eta", &self.eta),
            ("parity", &self.parity),
            ("axis", &self.axis),
            ("format", &self.format),
            ("out", &self.out),
            ("threads", &self.threads),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                entries.push(Entry {
                    key: key.to_string(),
                    value: v.clone(),
                    origin: format!("--{key}"),
                });
            }
        }
        Ok(entries)
    }
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(if err.is_numerical() { EXIT_NUMERICAL } else { EXIT_INVALID })
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sweep(args: &SweepArgs) -> ExitCode {
    let cfg = match args.entries().and_then(|e| SweepConfig::from_entries(&e)) {
        Ok(cfg) => cfg,
        Err(e) => return fail(&e),
    };
    let records = match run_sweep(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let written = open_output(cfg.out.as_deref())
        .and_then(|mut w| emit_table(&records, cfg.format, &mut w).and_then(|_| w.flush()));
    if let Err(e) = written {
        let target = cfg.out.as_ref().map_or("stdout".into(), |p| p.display().to_string());
        eprintln!("error: cannot write {target}: {e}");
        return ExitCode::from(EXIT_INVALID);
    }
    let failed = records.iter().filter(|r| r.is_error()).count();
    if failed > 0 {
        eprintln!("{failed} of {} points failed; see the flags column", records.len());
        return ExitCode::from(EXIT_PARTIAL);
    }
    ExitCode::SUCCESS
}

fn crossover(preset: Option<Preset>) -> ExitCode {
    let presets = preset.map_or_else(|| Preset::ALL.to_vec(), |p| vec![p]);
    let mut failures = 0;
    let mut last_err = None;
    for p in &presets {
        match find_paper_crossovers(*p) {
            Ok(report) => println!("{report}"),
            Err(e) => {
                eprintln!("error: {p}: {e}");
                failures += 1;
                last_err = Some(e);
            }
        }
    }
    match (failures, last_err) {
        (0, _) => ExitCode::SUCCESS,
        (f, Some(e)) if f == presets.len() => fail(&e),
        _ => ExitCode::from(EXIT_PARTIAL),
    }
}

fn verify_all() -> ExitCode {
    match verify::run_all() {
        Ok(checks) => {
            for c in &checks {
                println!("{c}");
            }
            if checks.iter().all(|c| c.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_NUMERICAL)
            }
        }
        Err(e) => fail(&e),
    }
}

fn circuit(spec: Result<ProbeSpec, Error>, cutoff: usize) -> ExitCode {
    let run = || -> Result<(), Error> {
        let spec = spec?;
        let out = cascade_generate(&spec, cutoff)?;
        let f = fidelity(&out.state, &build_state_vector(&spec, cutoff)?)?;
        println!("modes            {}", spec.modes());
        println!("patterns         {:?}", out.patterns);
        println!("herald prob      {:.6e}", out.herald_probability);
        println!("fidelity         {f:.12}");
        if let Some(w) = out.warning {
            println!("truncation       leakage {:.2e} > {:.0e}", w.leakage, w.tolerance);
        }
        Ok(())
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep(args) => sweep(&args),
        Command::Crossover { preset } => crossover(preset),
        Command::Verify => verify_all(),
        Command::Circuit {
            d,
            cutoff,
            r,
            t,
            n,
            parity,
        } => circuit(ProbeSpec::new(r, t, n, d, parity), cutoff),
    }
}
