use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sigma_sheaf::config::{parse_config, EmitFormat, ProtocolName, SuiteConfig};
use sigma_sheaf::dist::{self, parse_rational};
use sigma_sheaf::protocol::{ChaumPedersen, Schnorr, SigmaProtocol};
use sigma_sheaf::record::RecordCodec;
use sigma_sheaf::site;
use sigma_sheaf::suite::{emit_report, run_suite};
use sigma_sheaf::view::ViewShape;

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "sigma-sheaf", version, about = "Exact checks for three-move proofs over attacker views")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured check and print a report.
    Suite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        emit: Option<EmitFormat>,
        /// Overrides the tolerance, as num/den.
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Print one honest and one simulated transcript side by side.
    Demo {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dump the view category and its declared coverings.
    Site {
        #[arg(long)]
        config: PathBuf,
    },
    /// Dump real and simulated distributions pushed to a view shape.
    Dist {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "a,e,z")]
        shape: ViewShape,
    },
}

fn load(path: &PathBuf) -> Result<SuiteConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("{}:\n{e}", path.display()))
}

macro_rules! with_protocol {
    ($config:expr, |$proto:ident| $body:expr) => {
        match $config.protocol {
            ProtocolName::Schnorr => {
                let $proto = &Schnorr::new($config.group);
                $body
            }
            ProtocolName::ChaumPedersen => {
                let built = match $config.h {
                    Some(h) => ChaumPedersen::with_base($config.group, h).map_err(|e| e.to_string())?,
                    None => ChaumPedersen::new($config.group),
                };
                let $proto = &built;
                $body
            }
        }
    };
}

fn demo<P: RecordCodec>(proto: &P, config: &SuiteConfig, seed: u64) -> Result<String, String> {
    let group = *proto.group();
    let (statement, witness) = proto.keygen(group.scalar(config.witness_value()).map_err(|e| e.to_string())?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || group.scalar_reduced(rng.gen_range(0..group.q()));
    let (r, e) = (draw(), draw());
    let (se, sz) = (draw(), draw());
    let honest = proto.honest_transcript(&witness, r, e);
    let simulated = config.simulator.run(proto, &statement, se, sz);
    Ok(format!(
        "honest     r={r} e={e}  {}  verifies={}\nsimulated  e={se} z={sz}  {}  verifies={}\n",
        proto.to_record(&statement, &honest),
        proto.verify(&statement, &honest),
        proto.to_record(&statement, &simulated),
        proto.verify(&statement, &simulated),
    ))
}

fn site_dump<P: SigmaProtocol>(proto: &P, config: &SuiteConfig) -> Result<String, String> {
    let (statement, _) = proto.keygen(proto.group().scalar(config.witness_value()).map_err(|e| e.to_string())?);
    let views = site::enumerate_views(proto, &statement).map_err(|e| e.to_string())?;
    Ok(site::dump_site(&site::declare_standard_coverings(views)))
}

fn dist_dump<P: SigmaProtocol>(proto: &P, config: &SuiteConfig, shape: ViewShape) -> Result<String, String> {
    let (statement, witness) = proto.keygen(proto.group().scalar(config.witness_value()).map_err(|e| e.to_string())?);
    let real = dist::real_distribution(proto, &witness).map_err(|e| e.to_string())?;
    let sim = dist::simulated_distribution_with(proto, &statement, config.simulator).map_err(|e| e.to_string())?;
    let (real, sim) = (dist::marginal_on_shape(&real, shape), dist::marginal_on_shape(&sim, shape));
    Ok(format!(
        "# real {shape}\n{}# simulated {shape} ({})\n{}# distance {}\n",
        real.dump(),
        config.simulator,
        sim.dump(),
        dist::format_rational(&dist::statistical_distance(&real, &sim)),
    ))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Suite { config, emit, epsilon } => {
            let mut config = load(&config)?;
            if let Some(eps) = epsilon {
                config.epsilon = parse_rational(&eps).map_err(|e| format!("--epsilon: {e}"))?;
            }
            let report = run_suite(&config).map_err(|e| e.to_string())?;
            print!("{}", emit_report(&report, emit.unwrap_or(config.emit)));
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAIL) })
        }
        Command::Demo { config, seed } => {
            let config = load(&config)?;
            print!("{}", with_protocol!(config, |proto| demo(proto, &config, seed))?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Site { config } => {
            let config = load(&config)?;
            print!("{}", with_protocol!(config, |proto| site_dump(proto, &config))?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Dist { config, shape } => {
            let config = load(&config)?;
            print!("{}", with_protocol!(config, |proto| dist_dump(proto, &config, shape))?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
