use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use netpeb::cli::{
    cmd_cond_cdf, cmd_marginal, cmd_mi, cmd_pmf_l, cmd_sweep, exit_code, CommandOutput, CondCdfArgs, Config,
    MarginalArgs, MiArgs, PmfArgs, SweepArgs, DEFAULT_ELL_MAX,
};
use netpeb::infoanalysis::DEFAULT_BIN_WIDTH;
use netpeb::simulator::DEFAULT_MEAN_ANCHORS;
use netpeb::Result;

#[derive(Parser)]
#[command(name = "netpeb", version, about = "Position error benchmark distributions for random anchor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// CDF of the benchmark for a fixed number of anchors
    CondCdf {
        #[arg(long = "anchors", short = 'l')]
        l: usize,
        #[arg(long, default_value_t = 20.0)]
        sigma_r: f64,
        #[command(flatten)]
        grid: GridOpts,
        /// Append an empirical column from this many Monte Carlo draws
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Pmf of the number of hearable anchors
    PmfL {
        #[command(flatten)]
        params: ParamOpts,
        #[arg(long, default_value_t = DEFAULT_ELL_MAX)]
        ell_max: usize,
        /// Skip the per-band convolution (reuse = 1 only)
        #[arg(long)]
        direct: bool,
        /// Compare against this many network realizations
        #[arg(long)]
        validate: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MEAN_ANCHORS)]
        mean_anchors: f64,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Network-wide CDF of the benchmark
    Marginal {
        #[command(flatten)]
        params: ParamOpts,
        #[arg(long, default_value_t = 400)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_ELL_MAX)]
        ell_max: usize,
        #[arg(long)]
        validate: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MEAN_ANCHORS)]
        mean_anchors: f64,
        #[command(flatten)]
        out: OutOpts,
    },
    /// One marginal CDF per value of a parameter, plus a summary table
    Sweep {
        #[command(flatten)]
        params: ParamOpts,
        /// Config key to vary, e.g. reuse, q, gamma_db, sigma_r
        #[arg(long)]
        param: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<String>,
        #[arg(long, default_value_t = 400)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_ELL_MAX)]
        ell_max: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Mutual information between D and the largest gap terms
    Mi {
        #[arg(long = "anchors", short = 'l', value_delimiter = ',', default_value = "4,5,6,7,8")]
        l: Vec<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BIN_WIDTH)]
        bin_width: f64,
        #[arg(long)]
        no_assert: bool,
        #[command(flatten)]
        out: OutOpts,
    },
}

#[derive(Args)]
struct GridOpts {
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long, requires = "s_max")]
    s_min: Option<f64>,
    #[arg(long, requires = "s_min")]
    s_max: Option<f64>,
}

#[derive(Args)]
struct OutOpts {
    /// Output CSV (stdout when absent); a `.manifest` sidecar is written next to it
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

/// Network parameters: a config file, then individual overrides.
#[derive(Args)]
struct ParamOpts {
    /// key = value file listing every parameter
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    shadow_sigma_db: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long, conflicts_with = "gamma_db")]
    gamma: Option<String>,
    #[arg(long)]
    gamma_db: Option<String>,
    #[arg(long, conflicts_with = "beta_db")]
    beta: Option<String>,
    #[arg(long)]
    beta_db: Option<String>,
    #[arg(long)]
    reuse: Option<String>,
    #[arg(long)]
    sigma_r: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    n: Option<String>,
}

impl ParamOpts {
    fn resolve(&self) -> Result<Config> {
        let mut cfg = match &self.config {
            Some(path) => Config::parse(&fs::read_to_string(path)?)?,
            None => Config::default(),
        };
        let overrides = [
            ("alpha", &self.alpha),
            ("lambda", &self.lambda),
            ("shadow_sigma_db", &self.shadow_sigma_db),
            ("q", &self.q),
            ("gamma", &self.gamma),
            ("gamma_db", &self.gamma_db),
            ("beta", &self.beta),
            ("beta_db", &self.beta_db),
            ("reuse", &self.reuse),
            ("sigma_r", &self.sigma_r),
            ("m", &self.m),
            ("n", &self.n),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_single(mut output: CommandOutput, out: &OutOpts) -> Result<CommandOutput> {
    match &out.out {
        Some(path) => {
            fs::write(path, output.primary())?;
            output.manifest.outputs.push(path.display().to_string());
            fs::write(sidecar(path), output.manifest.render())?;
        }
        None => std::io::stdout().write_all(output.primary().as_bytes())?,
    }
    Ok(output)
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<CommandOutput> {
    let output = match cli.command {
        Command::CondCdf { l, sigma_r, grid, mc, seed, out } => {
            let range = grid.s_min.zip(grid.s_max);
            let args = CondCdfArgs { l, sigma_r, points: grid.points, range, mc, seed };
            write_single(cmd_cond_cdf(&args)?, &out)?
        }
        Command::PmfL { params, ell_max, direct, validate, seed, mean_anchors, out } => {
            let args = PmfArgs { config: params.resolve()?, ell_max, direct, validate, seed, mean_anchors };
            write_single(cmd_pmf_l(&args)?, &out)?
        }
        Command::Marginal { params, points, ell_max, validate, seed, mean_anchors, out } => {
            let args = MarginalArgs { config: params.resolve()?, points, ell_max, validate, seed, mean_anchors };
            write_single(cmd_marginal(&args)?, &out)?
        }
        Command::Sweep { params, param, values, points, ell_max, out_dir } => {
            let args = SweepArgs { config: params.resolve()?, param, values, points, ell_max };
            let mut output = cmd_sweep(&args)?;
            fs::create_dir_all(&out_dir)?;
            for (name, body) in &output.files {
                let path = out_dir.join(name);
                fs::write(&path, body)?;
                output.manifest.outputs.push(path.display().to_string());
            }
            fs::write(out_dir.join(format!("sweep_{}.manifest", args.param)), output.manifest.render())?;
            output
        }
        Command::Mi { l, samples, seed, bin_width, no_assert, out } => {
            let args = MiArgs { l_values: l, samples, seed, bin_width, no_assert };
            write_single(cmd_mi(&args)?, &out)?
        }
    };
    for note in &output.notes {
        eprintln!("{note}");
    }
    output.into_result()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
