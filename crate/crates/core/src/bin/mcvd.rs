use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mcvd_im::geometry::{Topology, Vec3};
use mcvd_im::harness::{emit_csv, emit_csv_with_timing, run_sweep, CirCache, CirRequest, SweepSpec};
use mcvd_im::modulation::{derive_params, Mapping, Modulator, Scheme, SchemeConfig};
use mcvd_im::particle::{particle_ber, ChannelResponse, DiffusionParams, RowFill};
use mcvd_im::theory::index_scheme_ber;
use mcvd_im::Error;

#[derive(Parser)]
#[command(name = "mcvd", version, about = "Index modulation over diffusive molecular MIMO links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a channel response and print it, write it, or cache it.
    Cir {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Symbol duration, s.
        #[arg(long, default_value_t = 0.75)]
        t_s: f64,
        /// Simulate every transmit antenna instead of shifting antenna 1.
        #[arg(long)]
        per_antenna: bool,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Store in (or reuse from) this cache directory.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Run a sweep described by a `key = value` file and print CSV.
    Sweep {
        config: PathBuf,
        /// Override a key of the file, e.g. `--set max_bits=1e5`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        r_r: Option<f64>,
        #[arg(long)]
        d_x: Option<f64>,
        #[arg(long)]
        d_yz: Option<f64>,
        #[arg(long)]
        diffusion: Option<f64>,
        #[arg(long)]
        memory: Option<usize>,
        #[arg(long)]
        m_tx: Option<f64>,
        #[arg(long)]
        t_b: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Add a wall_time column.
        #[arg(long)]
        timing: bool,
    },
    /// Analytical error rate of MSSK, QMSSK or MSM.
    Theory {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Read the channel response from this file instead of simulating it.
        #[arg(long)]
        cir: Option<PathBuf>,
        /// Taps used by the analysis.
        #[arg(long, default_value_t = 5)]
        theory_memory: usize,
        /// Largest number of enumerated sequences.
        #[arg(long, default_value_t = 1e7)]
        limit: f64,
    },
    /// Particle-level MSSK error rate: walk every molecule, decode the last
    /// symbol of each burst.
    ParticleBer {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
}

#[derive(Args)]
struct ChannelArgs {
    #[arg(long, default_value_t = 8)]
    n_tx: usize,
    /// Receiver radius, µm.
    #[arg(long, default_value_t = 5.0)]
    r_r: f64,
    #[arg(long, default_value_t = 10.0)]
    d_x: f64,
    #[arg(long, default_value_t = 10.0)]
    d_yz: f64,
    /// Diffusion coefficient, µm²/s.
    #[arg(long, default_value_t = 79.4)]
    diffusion: f64,
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
    /// Flow towards the receiver, µm/s.
    #[arg(long, default_value_t = 0.0)]
    drift_vx: f64,
    /// Channel memory in symbols.
    #[arg(long, default_value_t = 5)]
    memory: usize,
    #[arg(long, default_value_t = 100_000)]
    molecules: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl ChannelArgs {
    fn topology(&self) -> mcvd_im::Result<Topology> {
        Topology::uca(self.n_tx, self.n_tx, self.r_r, self.d_x, self.d_yz)
    }

    fn params(&self) -> DiffusionParams {
        DiffusionParams {
            diffusion: self.diffusion,
            dt: self.dt,
            drift: Vec3::new(self.drift_vx, 0.0, 0.0),
            n_molecules: self.molecules,
            ..DiffusionParams::default()
        }
    }

    fn request(&self, t_s: f64, fill: RowFill) -> mcvd_im::Result<CirRequest> {
        Ok(CirRequest {
            topology: self.topology()?,
            params: self.params(),
            t_s,
            memory: self.memory,
            seed: self.seed,
            fill,
        })
    }
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(long, default_value = "mssk")]
    scheme: String,
    #[arg(long, default_value_t = 300.0)]
    m_tx: f64,
    #[arg(long, default_value_t = 0.25)]
    t_b: f64,
    #[arg(long, default_value = "gray")]
    mapping: String,
}

impl SchemeArgs {
    fn config(&self, n_tx: usize) -> mcvd_im::Result<SchemeConfig> {
        let scheme: Scheme = self.scheme.parse()?;
        let mapping: Mapping = self.mapping.parse()?;
        Ok(SchemeConfig::new(scheme).with_antennas(n_tx).with_m_tx(self.m_tx).with_t_b(self.t_b).with_mapping(mapping))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible { .. } => 2,
        Error::Io(_) | Error::Checksum(_) => 3,
        _ => 1,
    }
}

fn write_out(path: Option<&PathBuf>, bytes: &[u8]) -> mcvd_im::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn run(cli: Cli) -> mcvd_im::Result<()> {
    match cli.command {
        Command::Cir { channel, t_s, per_antenna, output, cache_dir } => {
            let fill = if per_antenna { RowFill::PerAntenna } else { RowFill::Shift };
            let request = channel.request(t_s, fill)?;
            let cir = match &cache_dir {
                Some(dir) => {
                    let cache = CirCache::new(dir);
                    let (cir, outcome) = cache.get_or_generate(&request)?;
                    eprintln!("{:?}: {}", outcome, cache.path_for(&request).display());
                    cir
                }
                None => request.generate()?,
            };
            if output.is_some() || cache_dir.is_none() {
                write_out(output.as_ref(), cir.to_text().as_bytes())?;
            }
        }
        Command::Sweep { config, overrides, r_r, d_x, d_yz, diffusion, memory, m_tx, t_b, seed, output, timing } => {
            let text = fs::read_to_string(&config)?;
            let mut spec = SweepSpec::parse(&text)?;
            let flags = [
                ("r_r", r_r.map(|v| v.to_string())),
                ("d_x", d_x.map(|v| v.to_string())),
                ("d_yz", d_yz.map(|v| v.to_string())),
                ("diffusion", diffusion.map(|v| v.to_string())),
                ("memory", memory.map(|v| v.to_string())),
                ("m_tx", m_tx.map(|v| v.to_string())),
                ("t_b", t_b.map(|v| v.to_string())),
                ("seed", seed.map(|v| v.to_string())),
            ];
            for (key, value) in flags.iter().filter_map(|(k, v)| v.as_ref().map(|v| (*k, v.as_str()))) {
                spec.set(key, value)?;
            }
            for kv in &overrides {
                let (key, value) =
                    kv.split_once('=').ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
                spec.set(key.trim(), value.trim())?;
            }
            spec.validate()?;
            let records = run_sweep(&spec)?;
            let csv = if timing { emit_csv_with_timing(&records) } else { emit_csv(&records) };
            write_out(output.as_ref(), &csv)?;
        }
        Command::Theory { channel, scheme, cir, theory_memory, limit } => {
            let cfg = scheme.config(channel.n_tx)?;
            if !cfg.scheme.is_index() {
                return Err(Error::Unsupported(format!("no analytical error rate for {}", cfg.scheme)));
            }
            let t_s = derive_params(&cfg)?.t_s;
            let beta = if cfg.scheme == Scheme::Msm { 2 } else { 1 };
            let response = match cir {
                Some(path) => ChannelResponse::from_text(&fs::read_to_string(path)?)?,
                None => {
                    // Fail on the guard before spending time on the walk.
                    let required = ((beta * cfg.n_tx) as f64).powi(theory_memory as i32);
                    if required > limit {
                        return Err(Error::Infeasible { required, limit });
                    }
                    let mut ch = channel;
                    ch.memory = ch.memory.max(theory_memory);
                    ch.request(t_s, RowFill::Shift)?.generate()?
                }
            };
            let emission = Modulator::new(&cfg)?.emission() as f64;
            let ber = index_scheme_ber(&response, theory_memory, emission, beta, &[cfg.mapping], limit)?[0];
            println!("{ber:.9e}");
        }
        Command::ParticleBer { channel, scheme, trials } => {
            let cfg = scheme.config(channel.n_tx)?;
            let tally = particle_ber(&cfg, &channel.topology()?, &channel.params(), channel.memory, trials, channel.seed)?;
            println!(
                "ber = {:.9e}\nstandard_error = {:.3e}\nbit_errors = {}\nbits = {}\ntrials = {}",
                tally.ber(),
                tally.trial_standard_error(),
                tally.errors,
                tally.bits,
                tally.trials
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
