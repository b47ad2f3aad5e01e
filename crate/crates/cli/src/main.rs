use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use varqdyn_cli::catalog::{self, ENTRIES};
use varqdyn_cli::config::{self, Overrides};
use varqdyn_cli::output::write_run;
use varqdyn_cli::{run, CliError};

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(io::stdout().lock(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "varqdyn", version, about = "Reduced quantum dynamics on immersed manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output root (default: $VARQDYN_OUT_DIR or ./varqdyn-out)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        dt: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t_end: Option<f64>,
    },
    /// List the reproduction catalog
    List,
    /// Run the full reproduction catalog
    Check {
        #[command(flatten)]
        common: Common,
    },
}

fn out_root(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("VARQDYN_OUT_DIR").map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("varqdyn-out"))
}

fn run_one(path: &Path, dir: &Path, ov: Overrides) -> Result<(), CliError> {
    let s = config::load(path, ov)?;
    let out = run(&s)?;
    let files = write_run(dir, &s, &out, Some(path))?;
    say!("{}: {} samples -> {}", s.name, out.rows.len(), files.csv.display());
    for (k, v) in &out.diagnostics {
        say!("  {k} = {v}");
    }
    Ok(())
}

fn check(dir: &Path) -> bool {
    let start = Instant::now();
    let outcomes = catalog::check(dir);
    for o in &outcomes {
        let verdict = if o.passed() { "PASS" } else { "FAIL" };
        say!("criterion {:>2} [{}] {verdict}  {:.2}s  {}", o.entry.id, o.entry.key, o.seconds, o.summary());
    }
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    say!("{passed}/{} passed in {:.1}s; evidence in {}", outcomes.len(), start.elapsed().as_secs_f64(), dir.display());
    passed == outcomes.len()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, common, dt, t_end } => run_one(&config, &out_root(common.out_dir), Overrides { dt, t_end }),
        Command::List => {
            for e in &ENTRIES {
                say!("{:>2}  {:<20} {}  ({})", e.id, e.key, e.title, e.topic);
            }
            Ok(())
        }
        Command::Check { common } => {
            if check(&out_root(common.out_dir)) {
                Ok(())
            } else {
                return ExitCode::from(1);
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("varqdyn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
