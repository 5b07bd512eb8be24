//! bidualkit: generate synthetic Selmer data, verify the theorem suites on
//! them, and summarize the resulting reports.

mod report;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use selmer_sim::{generate_selmer, generate_tower, DatumFile, Params, SelmerError};

use report::{Caps, Cell, Report, RunConfig};
use suites::{Instance, Suite};

const DEFAULT_CAP: u64 = 59049;

#[derive(Parser)]
#[command(name = "bidualkit", version, about = "Exterior biduals, Stark and Kolyvagin systems over synthetic Selmer data")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded datum (and optionally its tower) as JSON.
    Generate(GenerateArgs),
    /// Run verification suites on a datum file, a seed, or the whole grid.
    Verify(VerifyArgs),
    /// Summarize a report file.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct CellArgs {
    #[arg(long, default_value_t = 3)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// |Γ|, a power of p.
    #[arg(long, default_value_t = 3)]
    gamma: u64,
    #[arg(long, default_value_t = 1)]
    rank: usize,
    /// |𝒫|.
    #[arg(long, default_value_t = 2)]
    primes: usize,
    /// H non-free (not regular).
    #[arg(long)]
    degenerate: bool,
}

impl CellArgs {
    fn params(&self) -> Params {
        let p = Params::new(self.p, self.k, self.gamma, self.rank, self.primes);
        if self.degenerate {
            p.degenerate()
        } else {
            p
        }
    }

    fn cell(&self) -> Cell {
        Cell { p: self.p, k: self.k, gamma: self.gamma, rank: self.rank, primes: self.primes, degenerate: self.degenerate }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    cell: CellArgs,
    /// Also write tower lifts.
    #[arg(long)]
    tower: bool,
    /// Tower lifts without noise in the augmentation ideal.
    #[arg(long, requires = "tower")]
    no_noise: bool,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Datum file; without it the datum is generated from --seed and the cell flags.
    #[arg(long, conflicts_with = "grid")]
    datum: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    cell: CellArgs,
    #[arg(long = "suite", value_enum, value_delimiter = ',', default_value = "all")]
    suites: Vec<Suite>,
    /// Run every cell p ∈ {3,5}, k ∈ {1,2}, |Γ| ∈ {1,p}, r ∈ {1,2}, |𝒫| ∈ {1,2,3}.
    #[arg(long)]
    grid: bool,
    /// Seeds per cell with --grid, starting at --seed (default 0).
    #[arg(long, default_value_t = 5, requires = "grid")]
    seeds: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct ReportArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

enum Failure {
    Usage(String),
    Io(String),
}

impl From<SelmerError> for Failure {
    fn from(e: SelmerError) -> Self {
        match e {
            SelmerError::InvalidParams(s) => Failure::Usage(s),
            other => Failure::Io(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, s: &str) -> Result<(), Failure> {
    std::fs::write(path, s).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn cap_from_env() -> Result<u64, Failure> {
    match std::env::var("BIDUALKIT_CAP") {
        Err(_) => Ok(DEFAULT_CAP),
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("BIDUALKIT_CAP must be a non-negative integer, got {v:?}"))),
    }
}

fn generate(args: &GenerateArgs) -> Result<bool, Failure> {
    let datum = generate_selmer(args.seed, args.cell.params())?;
    let tower = if args.tower { Some(generate_tower(args.seed, &datum, !args.no_noise)?.lifts) } else { None };
    write(&args.output, &DatumFile::new(datum, tower).to_json())?;
    Ok(true)
}

fn grid_cells() -> Vec<CellArgs> {
    let mut out = Vec::new();
    for p in [3u64, 5] {
        for k in [1u32, 2] {
            for gamma in [1, p] {
                for rank in [1usize, 2] {
                    for primes in [1usize, 2, 3] {
                        out.push(CellArgs { p, k, gamma, rank, primes, degenerate: false });
                    }
                }
            }
        }
    }
    out
}

fn verify(args: &VerifyArgs) -> Result<bool, Failure> {
    let cap = cap_from_env()?;
    let suites = suites::normalize(&args.suites);
    let mut config = RunConfig {
        command: "verify".into(),
        seed: args.seed,
        cell: None,
        datum: args.datum.as_ref().map(|p| p.display().to_string()),
        grid_seeds: None,
        suites: suites.iter().map(|s| s.name().to_string()).collect(),
        output: args.output.as_ref().map(|p| p.display().to_string()),
        caps: Caps { enumeration: cap },
    };
    let mut checks = Vec::new();
    if args.grid {
        let base = args.seed.unwrap_or(0);
        config.grid_seeds = Some(args.seeds);
        // The toolkit suite does not depend on the datum.
        if suites.contains(&Suite::Appendix) {
            checks.extend(systems::appendix::appendix_suite(base));
        }
        for cell in grid_cells() {
            for seed in base..base + args.seeds {
                let datum = generate_selmer(seed, cell.params())?;
                let label = format!("[p{} k{} g{} r{} s{} #{seed}]", cell.p, cell.k, cell.gamma, cell.rank, cell.primes);
                let inst = Instance { label, datum, tower: None, seed, cap };
                for &s in suites.iter().filter(|&&s| s != Suite::Appendix) {
                    checks.extend(inst.run(s));
                }
            }
        }
    } else {
        let inst = match &args.datum {
            Some(path) => {
                let file = DatumFile::from_json(&read(path)?).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                let tower = file.tower_datum();
                let seed = args.seed.unwrap_or(file.datum.seed);
                config.seed = Some(seed);
                Instance { label: String::new(), datum: file.datum, tower, seed, cap }
            }
            None => {
                let seed = args.seed.ok_or_else(|| Failure::Usage("either --datum or --seed is required".into()))?;
                config.cell = Some(args.cell.cell());
                let datum = generate_selmer(seed, args.cell.params())?;
                Instance { label: String::new(), datum, tower: None, seed, cap }
            }
        };
        for &s in &suites {
            checks.extend(inst.run(s));
        }
    }
    let report = Report::new(config, checks);
    if let Some(path) = &args.output {
        write(path, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
    }
    print!("{}", report.summary());
    Ok(!report.failed())
}

fn show(args: &ReportArgs) -> Result<bool, Failure> {
    let text = read(&args.file)?;
    let report: Report = serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: {e}", args.file.display())))?;
    if report.schema != report::REPORT_SCHEMA {
        return Err(Failure::Io(format!("expected schema {}, found {}", report::REPORT_SCHEMA, report.schema)));
    }
    match args.format {
        Format::Text => print!("{}", report.summary()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    // Panics inside checks become FAIL verdicts with the message as witness.
    std::panic::set_hook(Box::new(|_| {}));
    let res = match &cli.cmd {
        Command::Generate(a) => generate(a),
        Command::Verify(a) => verify(a),
        Command::Report(a) => show(a),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
