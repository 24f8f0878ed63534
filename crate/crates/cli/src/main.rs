use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use lingroups_cli::{execute, render_json, render_text, replay, CliError, Flags, Report, SCHEMA};

#[derive(Parser, Debug)]
#[command(name = "lingroups", version, about = "Decision procedures for finitely generated linear groups")]
struct Args {
    /// One of isfinite, order, issbf (tits), issolvable, isnbf, isabf, iscbf, isnilpotent,
    /// iscr, crpart, isintegral, level, index, member, issubgroup, normalclosure,
    /// issubnormal, normalizer, isdense, primes, orbit, stabilizer.
    command: String,
    /// Group file (JSON).
    file: PathBuf,
    /// Restrict congruence maps to this prime, or to primes up to it when unramified.
    #[arg(long)]
    prime: Option<u64>,
    /// Prime search bound for lattice commands.
    #[arg(long)]
    bound: Option<u64>,
    #[arg(long = "cap-order")]
    cap_order: Option<u64>,
    #[arg(long = "cap-pres")]
    cap_pres: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// SL or Sp.
    #[arg(long)]
    family: Option<String>,
    /// Skip this many admissible maps before choosing one.
    #[arg(long = "map-skip")]
    map_skip: Option<usize>,
    /// Comma-separated integer vector.
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    /// Decide orbits of the principal congruence subgroup of this level.
    #[arg(long)]
    modulus: Option<u64>,
    /// Rerun a saved JSON report and check that the value agrees.
    #[arg(long)]
    replay: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn run(args: Args) -> Result<Report, CliError> {
    let read = |p: &PathBuf| std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())));
    let text = read(&args.file)?;
    let start = Instant::now();
    let (body, note) = match &args.replay {
        Some(path) => {
            let recorded: Report = serde_json::from_str(&read(path)?)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            if recorded.schema != SCHEMA {
                return Err(CliError::Io(format!("unknown report schema {:?}", recorded.schema)));
            }
            (replay(&recorded, &text)?, Some("value matches the recorded report".to_string()))
        }
        None => {
            let flags = Flags {
                prime: args.prime,
                bound: args.bound,
                cap_order: args.cap_order,
                cap_pres: args.cap_pres,
                seed: args.seed,
                family: args.family,
                map_skip: args.map_skip,
                u: args.u,
                v: args.v,
                modulus: args.modulus,
            };
            (execute(&args.command, &text, &flags, None)?, None)
        }
    };
    Ok(Report {
        schema: SCHEMA.to_string(),
        body,
        wall_time_ms: start.elapsed().as_millis() as u64,
        replay: note,
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let json = args.json;
    match run(args) {
        Ok(r) => {
            if json {
                println!("{}", render_json(&r));
            } else {
                print!("{}", render_text(&r));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
