use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use singlecopy::hamiltonian::{HamiltonianScheme, LocalHamiltonian};
use singlecopy::noise::NoiseKind;
use singlecopy::partitions::{count_regular, enumerate_regular};
use singlecopy::pauli::PauliObservable;
use singlecopy::protocols::{LcsTrialConfig, Scheme, SchemeConfig, SingletTrialConfig};
use singlecopy::rng::setup_stream;
use singlecopy::runner::{
    certificate_from_records, export_records, import_records, round_significant, run_campaign, CampaignConfig,
    DeltaPolicy, OutputFormat, StateSpec,
};
use singlecopy::sep_oracle::{max_product_expectation, min_product_expectation, OracleMethod};
use singlecopy::source::ProductState;
use singlecopy::Error;

const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Parser)]
#[command(name = "sv", version, about = "Single-copy entanglement detection campaigns and certificates")]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1)]
    trials: usize,
    /// Trial record file; the summary goes to stdout and `<out>.summary.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::JsonLines)]
    format: Format,
    /// Worker threads for trial execution.
    #[arg(long, global = true, env = "SV_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    JsonLines,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::JsonLines => OutputFormat::JsonLines,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// target, product:<labels>, product:oracle or noisy:<lambda>
    #[arg(long, default_value = "target")]
    state: String,
    /// Success margin, or `posthoc` to use the observed one.
    #[arg(long, default_value = "posthoc")]
    delta: String,
}

#[derive(Subcommand)]
enum Command {
    /// Singlet-pair scheme.
    Singlet {
        /// Number of pairs.
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Cluster-state scheme on a ring.
    Lcs {
        #[arg(long, default_value_t = 24)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        l: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Local-Hamiltonian scheme.
    Hamiltonian {
        #[arg(long)]
        file: PathBuf,
        /// See-saw restarts for the separable energy.
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Target mixed with separable noise.
    Noise {
        #[arg(long)]
        lambda: f64,
        /// white or colored:<file> (JSON list of Bloch vectors, tiled over the register)
        #[arg(long, default_value = "white")]
        kind: String,
        #[arg(long)]
        scheme: Scheme,
        /// Pairs (singlet) or qubits (lcs).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 8)]
        l: usize,
        /// Hamiltonian file for the Hamiltonian scheme.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value = "posthoc")]
        delta: String,
    },
    /// Count or list regular cluster partitions.
    Partitions {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        list: bool,
    },
    /// Optimize an observable over product states.
    Oracle {
        /// JSON object mapping Pauli strings to coefficients.
        #[arg(long)]
        obs: PathBuf,
        #[arg(long)]
        minimize: bool,
        #[arg(long, value_enum, default_value_t = Method::Grid)]
        method: Method,
    },
    /// Recompute a certificate from a record file.
    Certify {
        #[arg(long)]
        scheme: Scheme,
        #[arg(long)]
        records: PathBuf,
        /// Defaults to the pooled margin of the records.
        #[arg(long)]
        delta: Option<f64>,
        /// Hamiltonian file, required for the Hamiltonian scheme.
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Grid,
    Seesaw,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        // Closed stdout, e.g. piped into `head`.
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sv: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Csv(_) => 3,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Singlet { n, run } => {
            let scheme = SchemeConfig::Singlet(SingletTrialConfig::uniform(*n));
            campaign(cli, scheme, run.state.parse()?, run.delta.parse()?)
        }
        Command::Lcs { n, l, run } => {
            let scheme = SchemeConfig::Lcs(LcsTrialConfig::uniform(*n, *l));
            campaign(cli, scheme, run.state.parse()?, run.delta.parse()?)
        }
        Command::Hamiltonian { file, restarts, run } => {
            let scheme = hamiltonian_scheme(file, *restarts, cli.seed)?;
            campaign(cli, scheme, run.state.parse()?, run.delta.parse()?)
        }
        Command::Noise { lambda, kind, scheme, n, l, file, restarts, delta } => {
            let scheme = match scheme {
                Scheme::Singlet => SchemeConfig::Singlet(SingletTrialConfig::uniform(n.unwrap_or(8))),
                Scheme::Lcs => SchemeConfig::Lcs(LcsTrialConfig::uniform(n.unwrap_or(24), *l)),
                Scheme::Hamiltonian => {
                    let file = file
                        .as_ref()
                        .ok_or_else(|| Error::Config("--file is required for the Hamiltonian scheme".into()))?;
                    hamiltonian_scheme(file, *restarts, cli.seed)?
                }
            };
            let kind = noise_kind(kind, scheme.num_qubits())?;
            campaign(cli, scheme, StateSpec::Noisy { lambda: *lambda, kind }, delta.parse()?)
        }
        Command::Partitions { n, l, list } => partitions(*n, *l, *list),
        Command::Oracle { obs, minimize, method } => oracle(obs, *minimize, *method, cli.seed),
        Command::Certify { scheme, records, delta, hamiltonian, restarts } => {
            let records = import_records(records)?;
            if let Some(r) = records.iter().find(|r| r.scheme != *scheme) {
                return Err(Error::Config(format!("record file holds {} records, expected {scheme}", r.scheme)));
            }
            let gap = match (scheme, hamiltonian) {
                (Scheme::Hamiltonian, Some(file)) => match hamiltonian_scheme(file, *restarts, cli.seed)? {
                    SchemeConfig::Hamiltonian(h) => Some(h.gap().clone()),
                    _ => None,
                },
                (Scheme::Hamiltonian, None) => {
                    return Err(Error::Config("--hamiltonian is required for the Hamiltonian scheme".into()))
                }
                _ => None,
            };
            let cert = certificate_from_records(&records, *delta, gap.as_ref())?;
            print_json(&cert)
        }
    }
}

fn hamiltonian_scheme(file: &Path, restarts: usize, seed: u64) -> Result<SchemeConfig, Error> {
    let h = LocalHamiltonian::from_json_file(file)?;
    let scheme = HamiltonianScheme::analyze(h, restarts, &mut setup_stream(seed))?;
    Ok(SchemeConfig::Hamiltonian(Arc::new(scheme)))
}

fn noise_kind(spec: &str, n: usize) -> Result<NoiseKind, Error> {
    match spec.split_once(':') {
        None if spec == "white" => Ok(NoiseKind::White),
        Some(("colored", path)) => {
            let bloch: Vec<[f64; 3]> = serde_json::from_str(&fs::read_to_string(path)?)?;
            Ok(NoiseKind::Colored(Arc::new(ProductState::tiled(&bloch, n)?)))
        }
        _ => Err(Error::Config(format!("unknown noise kind {spec:?}; use white or colored:<file>"))),
    }
}

fn campaign(cli: &Cli, scheme: SchemeConfig, state: StateSpec, delta: DeltaPolicy) -> Result<(), Error> {
    let cfg = CampaignConfig { scheme, trials: cli.trials, master_seed: cli.seed, state, delta, threads: cli.threads };
    let c = run_campaign(&cfg)?;
    if let Some(out) = &cli.out {
        export_records(&c.records, out, cli.format.into())?;
        let mut summary_path = out.clone().into_os_string();
        summary_path.push(".summary.json");
        fs::write(summary_path, serde_json::to_string_pretty(&rounded(&c.summary)?)? + "\n")?;
    }
    print_json(&c.summary)
}

fn rounded<T: Serialize>(value: &T) -> Result<serde_json::Value, Error> {
    let mut v = serde_json::to_value(value)?;
    round_significant(&mut v, SIGNIFICANT_DIGITS);
    Ok(v)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Error> {
    let mut stdout = io::stdout().lock();
    serde_json::to_writer(&mut stdout, &rounded(value)?)?;
    stdout.write_all(b"\n")?;
    Ok(())
}

fn partitions(n: usize, l: usize, list: bool) -> Result<(), Error> {
    if list {
        let mut stdout = io::stdout().lock();
        for p in enumerate_regular(n, l) {
            serde_json::to_writer(&mut stdout, &p)?;
            stdout.write_all(b"\n")?;
        }
        return Ok(());
    }
    let count = count_regular(n, l)?;
    print_json(&serde_json::json!({ "n": n, "l": l, "count": serde_json::to_value(count)? }))
}

fn oracle(path: &Path, minimize: bool, method: Method, seed: u64) -> Result<(), Error> {
    let terms: BTreeMap<String, f64> = serde_json::from_str(&fs::read_to_string(path)?)?;
    let terms: Vec<(f64, &str)> = terms.iter().map(|(s, c)| (*c, s.as_str())).collect();
    let obs = PauliObservable::from_strs(&terms)?;
    let method = match method {
        Method::Grid => OracleMethod::grid(),
        Method::Seesaw => OracleMethod::seesaw(),
    };
    let mut rng = setup_stream(seed);
    let result = if minimize {
        min_product_expectation(&obs, method, &mut rng)?
    } else {
        max_product_expectation(&obs, method, &mut rng)?
    };
    print_json(&serde_json::json!({
        "value": result.value,
        "angles": result.ansatz.angles,
        "bloch": result.ansatz.bloch(),
    }))
}
