use std::path::PathBuf;
use std::process::ExitCode;

use algebroid::commands::{self, CechOp, Command};
use algebroid::scenario;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "algebroid", about = "Exact checks on forms over transitive Lie algebroids")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Cocycle, global form, connection and metric checks.
    Verify,
    /// Total differential of each form, plus random nilpotency checks.
    Diff,
    /// Hodge star, double-star law and scalar products.
    Hodge,
    /// Inner, full and trace integration.
    Integrate,
    /// Lie algebra cohomology in the adjoint and trivial representations.
    LieCohomology,
    /// Cech operations and spectral sequence pages.
    Cech {
        #[arg(value_enum, default_value_t = CechOp::All)]
        op: CechOp,
    },
    /// Gluing data from matrix transition functions.
    AtiyahGen,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = match cli.command {
        Cmd::Verify => Command::Verify,
        Cmd::Diff => Command::Diff,
        Cmd::Hodge => Command::Hodge,
        Cmd::Integrate => Command::Integrate,
        Cmd::LieCohomology => Command::LieCohomology,
        Cmd::Cech { op } => Command::Cech(op),
        Cmd::AtiyahGen => Command::AtiyahGen,
    };
    let Some(path) = cli.scenario else {
        eprintln!("error: --scenario <path> is required");
        return ExitCode::from(2);
    };
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let loaded = match scenario::load(&text) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let report = match commands::run(cmd, &loaded, cli.seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let json = report.to_json();
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &json) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{json}"),
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
