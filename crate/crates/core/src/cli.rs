//! Command implementations behind the `netpeb` binary.
//!
//! Every command returns its CSV text plus a [`RunManifest`]; the binary only
//! parses flags and writes files. CSV bodies start with `# manifest <hash>`
//! where the hash covers the command, the full parameter set, the seed and the
//! crate version, so identical inputs give byte-identical files. Timestamps
//! and output paths go to the sidecar manifest only.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::analytic::{cond_cdf_s, CondCdfParams, MarginalParams, MarginalTerms};
use crate::cdf::{default_s_grid, geometric_grid, ks_distance, tabulate_cdf, CdfCurve};
use crate::error::{Error, Result};
use crate::infoanalysis::{mi_study, ordering_violations, write_mi_csv, MIN_RELIABLE_SAMPLES};
use crate::localizability::{db_to_linear, pmf_of_l, pmf_with_reuse, NetworkParams, Pmf};
use crate::simulator::{empirical_cdf, run_conditional_mc, run_network_mc, McEstimate, SimConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest per-entry pmf deviation accepted by `pmf_l --validate`.
pub const PMF_VALIDATION_TOLERANCE: f64 = 0.03;
/// Largest CDF sup-norm accepted by `marginal --validate`.
pub const MARGINAL_VALIDATION_TOLERANCE: f64 = 0.05;
/// Largest atom mismatch accepted by `marginal --validate`.
pub const ATOM_VALIDATION_TOLERANCE: f64 = 0.02;
/// Default truncation of tabulated anchor-count pmfs.
pub const DEFAULT_ELL_MAX: usize = 40;

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Config(_) => 2,
        Error::Validation(_) => 4,
        _ => 3,
    }
}

/// Full parameter set of a network experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub network: NetworkParams,
    pub sigma_r: f64,
    pub m: f64,
    pub n: usize,
}

const CONFIG_KEYS: [&str; 10] = ["alpha", "lambda", "shadow_sigma_db", "q", "gamma", "beta", "reuse", "sigma_r", "m", "n"];

impl Default for Config {
    /// Hexagonal 500 m layout, 8 dB shadowing, `α = 4`, `γ = 20 dB`, `β = 10 dB`, full load,
    /// no reuse, `σ_r = 20 m`, `M = 200 m`, `N = 10`.
    fn default() -> Self {
        Config {
            network: NetworkParams {
                alpha: 4.0,
                lambda: 2.0 / (3f64.sqrt() * 500.0 * 500.0),
                shadow_sigma_db: 8.0,
                q: 1.0,
                gamma: db_to_linear(20.0),
                beta: db_to_linear(10.0),
                reuse: 1,
            },
            sigma_r: 20.0,
            m: 200.0,
            n: 10,
        }
    }
}

impl Config {
    /// Parses `key = value` lines. `gamma` and `beta` may be given in dB with a `_db`
    /// suffix. Every key must be present exactly once; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Config> {
        let mut seen = BTreeSet::new();
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let canonical = cfg.set(key, value.trim())?;
            if !seen.insert(canonical) {
                return Err(Error::Usage(format!("line {}: {canonical} given twice", lineno + 1)));
            }
        }
        let missing: Vec<&str> = CONFIG_KEYS.iter().copied().filter(|k| !seen.contains(k)).collect();
        if !missing.is_empty() {
            return Err(Error::Usage(format!("config is missing {}", missing.join(", "))));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key and returns its canonical name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<&'static str> {
        let num = || -> Result<f64> {
            let v: f64 = value
                .parse()
                .map_err(|_| Error::Usage(format!("{key}: cannot parse {value:?} as a number")))?;
            if !v.is_finite() {
                return Err(Error::Usage(format!("{key}: value must be finite")));
            }
            Ok(v)
        };
        let int = || -> Result<usize> {
            value
                .parse()
                .map_err(|_| Error::Usage(format!("{key}: cannot parse {value:?} as an integer")))
        };
        let net = &mut self.network;
        Ok(match key {
            "alpha" => {
                net.alpha = num()?;
                "alpha"
            }
            "lambda" => {
                net.lambda = num()?;
                "lambda"
            }
            "shadow_sigma_db" => {
                net.shadow_sigma_db = num()?;
                "shadow_sigma_db"
            }
            "q" => {
                net.q = num()?;
                "q"
            }
            "gamma" => {
                net.gamma = num()?;
                "gamma"
            }
            "gamma_db" => {
                net.gamma = db_to_linear(num()?);
                "gamma"
            }
            "beta" => {
                net.beta = num()?;
                "beta"
            }
            "beta_db" => {
                net.beta = db_to_linear(num()?);
                "beta"
            }
            "reuse" => {
                net.reuse = u32::try_from(int()?).map_err(|_| Error::Usage("reuse too large".into()))?;
                "reuse"
            }
            "sigma_r" => {
                self.sigma_r = num()?;
                "sigma_r"
            }
            "m" => {
                self.m = num()?;
                "m"
            }
            "n" => {
                self.n = int()?;
                "n"
            }
            other => return Err(Error::Usage(format!("unknown parameter {other:?}"))),
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.marginal().validate()
    }

    pub fn marginal(&self) -> MarginalParams {
        MarginalParams { network: self.network, sigma_r: self.sigma_r, m: self.m, n: self.n }
    }

    /// Canonical `key=value` pairs, floats in round-trip form.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let n = &self.network;
        vec![
            ("alpha".into(), format!("{:?}", n.alpha)),
            ("lambda".into(), format!("{:?}", n.lambda)),
            ("shadow_sigma_db".into(), format!("{:?}", n.shadow_sigma_db)),
            ("q".into(), format!("{:?}", n.q)),
            ("gamma".into(), format!("{:?}", n.gamma)),
            ("beta".into(), format!("{:?}", n.beta)),
            ("reuse".into(), n.reuse.to_string()),
            ("sigma_r".into(), format!("{:?}", self.sigma_r)),
            ("m".into(), format!("{:?}", self.m)),
            ("n".into(), self.n.to_string()),
        ]
    }

    /// Renders a config file that [`Config::parse`] reads back exactly.
    pub fn to_file_text(&self) -> String {
        self.pairs().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Parameters, seed and version of a run, plus the artifacts it wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub version: String,
    pub created_unix: u64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, params: Vec<(String, String)>, seed: Option<u64>) -> Self {
        let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        RunManifest {
            command: command.into(),
            params,
            seed,
            version: VERSION.into(),
            created_unix,
            outputs: Vec::new(),
        }
    }

    /// SHA-256 over command, parameters, seed and version; timestamps and paths excluded.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.command.as_bytes());
        h.update(b"\n");
        for (k, v) in &self.params {
            h.update(format!("{k}={v}\n").as_bytes());
        }
        if let Some(seed) = self.seed {
            h.update(format!("seed={seed}\n").as_bytes());
        }
        h.update(format!("version={}\n", self.version).as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn header_line(&self) -> String {
        format!("# manifest {}\n", self.hash())
    }

    /// Sidecar text.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "hash = {}", self.hash());
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "version = {}", self.version);
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "seed = {seed}");
        }
        for (k, v) in &self.params {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "created_unix = {}", self.created_unix);
        for o in &self.outputs {
            let _ = writeln!(s, "output = {o}");
        }
        s
    }
}

/// Files produced by a command. The first file is the primary output.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub manifest: RunManifest,
    /// `(suggested file name, contents)`.
    pub files: Vec<(String, String)>,
    /// Human-readable summary lines.
    pub notes: Vec<String>,
    /// Set when a requested validation did not pass; the outputs are still complete.
    pub failure: Option<String>,
}

impl CommandOutput {
    fn single(manifest: RunManifest, name: &str, body: String) -> Self {
        let text = manifest.header_line() + &body;
        CommandOutput { manifest, files: vec![(name.into(), text)], notes: Vec::new(), failure: None }
    }

    pub fn primary(&self) -> &str {
        &self.files[0].1
    }

    /// Converts a failed validation into an error for exit-status purposes.
    pub fn into_result(self) -> Result<Self> {
        match &self.failure {
            Some(msg) => Err(Error::Validation(msg.clone())),
            None => Ok(self),
        }
    }
}

/// Abscissae for tabulation: `points` geometric points over `[lo, hi]` when a range is
/// given, otherwise the default grid above `a`.
fn s_grid(a: f64, m: Option<f64>, points: usize, range: Option<(f64, f64)>) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::Usage("grid needs at least one point".into()));
    }
    match range {
        Some((lo, hi)) => {
            if points == 1 {
                return Ok(vec![lo]);
            }
            geometric_grid(lo, hi, points).map_err(|e| Error::Usage(e.to_string()))
        }
        None => default_s_grid(a, m, points),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondCdfArgs {
    pub l: usize,
    pub sigma_r: f64,
    pub points: usize,
    pub range: Option<(f64, f64)>,
    pub mc: Option<usize>,
    pub seed: u64,
}

/// `s_meters,cdf` for a fixed anchor count, optionally with an empirical column.
pub fn cmd_cond_cdf(args: &CondCdfArgs) -> Result<CommandOutput> {
    if args.l < 3 {
        return Err(Error::Usage(format!("L must be at least 3, got {}", args.l)));
    }
    let p = CondCdfParams::new(args.l, args.sigma_r).map_err(|e| Error::Usage(e.to_string()))?;
    let grid = s_grid(p.a(), None, args.points, args.range)?;
    let curve = tabulate_cdf(|s| cond_cdf_s(s, &p), &grid, p.a(), "support [a, inf)")?;

    let mut params = vec![
        ("L".to_string(), args.l.to_string()),
        ("sigma_r".into(), format!("{:?}", args.sigma_r)),
        ("points".into(), args.points.to_string()),
    ];
    if let Some((lo, hi)) = args.range {
        params.push(("s_range".into(), format!("{lo:?}..{hi:?}")));
    }
    if let Some(n) = args.mc {
        params.push(("mc".into(), n.to_string()));
    }
    let manifest = RunManifest::new("cond_cdf", params, args.mc.map(|_| args.seed));

    let mut body = String::new();
    let mut notes = Vec::new();
    match args.mc {
        None => {
            body.push_str("s_meters,cdf\n");
            for (s, f) in curve.points() {
                let _ = writeln!(body, "{s},{f}");
            }
        }
        Some(n) => {
            let est = run_conditional_mc(args.l, args.sigma_r, n, args.seed)?;
            let emp = empirical_cdf(&est, &grid)?;
            body.push_str("s_meters,cdf,empirical_cdf\n");
            for ((s, f), (_, e)) in curve.points().iter().zip(emp.points()) {
                let _ = writeln!(body, "{s},{f},{e}");
            }
            let sup = ks_distance(
                est.sorted_samples(),
                |s| cond_cdf_s(s, &p).unwrap_or(f64::NAN),
                |s| cond_cdf_s(s, &p).unwrap_or(f64::NAN),
            );
            notes.push(format!("sup_norm={sup}"));
            notes.push(format!("mc_draws={n} degenerate={}", est.degenerate));
        }
    }
    Ok(CommandOutput { notes, ..CommandOutput::single(manifest, "cond_cdf.csv", body) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmfArgs {
    pub config: Config,
    pub ell_max: usize,
    /// Evaluate the single-band form directly; only valid without reuse.
    pub direct: bool,
    pub validate: Option<usize>,
    pub seed: u64,
    pub mean_anchors: f64,
}

fn sim_config(config: &Config, n_realizations: usize, seed: u64, mean_anchors: f64) -> SimConfig {
    SimConfig {
        network: config.network,
        sigma_r: config.sigma_r,
        n_max: config.n,
        m: config.m,
        n_realizations,
        mean_anchors,
        seed,
    }
}

/// Analytic pmf of the hearable-anchor count for `config`.
pub fn analytic_pmf(config: &Config, ell_max: usize, direct: bool) -> Result<Pmf> {
    if direct {
        if config.network.reuse != 1 {
            return Err(Error::Usage("--direct only applies with reuse = 1".into()));
        }
        config.network.validate()?;
        pmf_of_l(&config.network.band(), ell_max)
    } else {
        pmf_with_reuse(&config.network, ell_max)
    }
}

/// `ell,prob` plus a `tail_mass` row; with validation, empirical and deviation columns.
pub fn cmd_pmf_l(args: &PmfArgs) -> Result<CommandOutput> {
    args.config.validate()?;
    if args.ell_max < 3 {
        return Err(Error::Usage("ell_max must be at least 3".into()));
    }
    let pmf = analytic_pmf(&args.config, args.ell_max, args.direct)?;
    let mut params = args.config.pairs();
    params.push(("ell_max".into(), args.ell_max.to_string()));
    params.push(("direct".into(), args.direct.to_string()));
    if let Some(n) = args.validate {
        params.push(("validate".into(), n.to_string()));
        params.push(("mean_anchors".into(), format!("{:?}", args.mean_anchors)));
    }
    let manifest = RunManifest::new("pmf_l", params, args.validate.map(|_| args.seed));

    let mut body = String::new();
    let mut notes = vec![format!("p_localizable={}", pmf.survival(3))];
    let mut failure = None;
    match args.validate {
        None => {
            body.push_str("ell,prob\n");
            for (ell, p) in pmf.probs().iter().enumerate() {
                let _ = writeln!(body, "{ell},{p}");
            }
            let _ = writeln!(body, "tail_mass,{}", pmf.tail_mass());
        }
        Some(n) => {
            let est = run_network_mc(&sim_config(&args.config, n, args.seed, args.mean_anchors))?;
            body.push_str("ell,prob,empirical,deviation\n");
            let mut worst: f64 = 0.0;
            let mut emp_within = 0.0;
            for (ell, p) in pmf.probs().iter().enumerate() {
                let e = est.l_frequency(ell);
                emp_within += e;
                worst = worst.max((p - e).abs());
                let _ = writeln!(body, "{ell},{p},{e},{}", p - e);
            }
            let emp_tail = 1.0 - emp_within;
            worst = worst.max((pmf.tail_mass() - emp_tail).abs());
            let _ = writeln!(body, "tail_mass,{},{emp_tail},{}", pmf.tail_mass(), pmf.tail_mass() - emp_tail);
            notes.push(format!("max_deviation={worst}"));
            notes.push(format!("empirical_p_localizable={}", est.localizable_fraction()));
            if worst > PMF_VALIDATION_TOLERANCE {
                failure = Some(format!("pmf deviation {worst} exceeds {PMF_VALIDATION_TOLERANCE}"));
            }
        }
    }
    Ok(CommandOutput { notes, failure, ..CommandOutput::single(manifest, "pmf_l.csv", body) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalArgs {
    pub config: Config,
    pub points: usize,
    pub ell_max: usize,
    pub validate: Option<usize>,
    pub seed: u64,
    pub mean_anchors: f64,
}

/// Sup-norm between the analytic marginal CDF and network samples, with the atom at `M`
/// handled through its left limit.
pub fn marginal_sup_norm(terms: &MarginalTerms, est: &McEstimate) -> f64 {
    let m = terms.m();
    let below_m = terms.eval(m.next_down()).unwrap_or(f64::NAN);
    ks_distance(
        est.sorted_samples(),
        |s| terms.eval(s).unwrap_or(f64::NAN),
        |s| if s == m { below_m } else { terms.eval(s).unwrap_or(f64::NAN) },
    )
}

/// Network-wide CDF; with validation, an empirical column from the network simulator.
pub fn cmd_marginal(args: &MarginalArgs) -> Result<CommandOutput> {
    args.config.validate()?;
    let pmf = pmf_with_reuse(&args.config.network, args.ell_max.max(args.config.n))?;
    let terms = MarginalTerms::new(&args.config.marginal(), &pmf)?;
    let curve = terms.tabulate(args.points.max(2))?;
    let mut params = args.config.pairs();
    params.push(("points".into(), args.points.to_string()));
    params.push(("ell_max".into(), args.ell_max.to_string()));
    if let Some(n) = args.validate {
        params.push(("validate".into(), n.to_string()));
        params.push(("mean_anchors".into(), format!("{:?}", args.mean_anchors)));
    }
    let manifest = RunManifest::new("marginal", params, args.validate.map(|_| args.seed));

    let mut notes = vec![
        format!("atom_at_m={}", terms.unlocalizable_mass()),
        format!("localizable_fraction={}", terms.localizable_fraction()),
    ];
    let mut failure = None;
    let mut body = String::new();
    match args.validate {
        None => {
            body.push_str("s_meters,cdf\n");
            for (s, f) in curve.points() {
                let _ = writeln!(body, "{s},{f}");
            }
        }
        Some(n) => {
            let est = run_network_mc(&sim_config(&args.config, n, args.seed, args.mean_anchors))?;
            let grid: Vec<f64> = curve.points().iter().map(|p| p.0).collect();
            let emp = empirical_cdf(&est, &grid)?;
            body.push_str("s_meters,cdf,empirical_cdf\n");
            for ((s, f), (_, e)) in curve.points().iter().zip(emp.points()) {
                let _ = writeln!(body, "{s},{f},{e}");
            }
            let sup = marginal_sup_norm(&terms, &est);
            let emp_atom = est.atom_at(args.config.m);
            notes.push(format!("sup_norm={sup}"));
            notes.push(format!("empirical_atom_at_m={emp_atom}"));
            let atom_gap = (emp_atom - terms.unlocalizable_mass()).abs();
            if sup > MARGINAL_VALIDATION_TOLERANCE {
                failure = Some(format!("marginal sup-norm {sup} exceeds {MARGINAL_VALIDATION_TOLERANCE}"));
            } else if atom_gap > ATOM_VALIDATION_TOLERANCE {
                failure = Some(format!("atom mismatch {atom_gap} exceeds {ATOM_VALIDATION_TOLERANCE}"));
            }
        }
    }
    Ok(CommandOutput { notes, failure, ..CommandOutput::single(manifest, "marginal.csv", body) })
}

/// One summary row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub localizable_fraction: f64,
    pub p50: f64,
    pub p80: f64,
    pub p90: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepArgs {
    pub config: Config,
    pub param: String,
    pub values: Vec<String>,
    pub points: usize,
    pub ell_max: usize,
}

/// Analytic marginal curve and summary statistics for one configuration.
pub fn marginal_summary(config: &Config, points: usize, ell_max: usize) -> Result<(CdfCurve, MarginalTerms)> {
    let pmf = pmf_with_reuse(&config.network, ell_max.max(config.n))?;
    let terms = MarginalTerms::new(&config.marginal(), &pmf)?;
    Ok((terms.tabulate(points.max(2))?, terms))
}

/// One marginal CDF per value of `param`, plus `sweep_<param>_summary.csv`.
pub fn cmd_sweep(args: &SweepArgs) -> Result<CommandOutput> {
    if args.values.is_empty() {
        return Err(Error::Usage("sweep needs at least one value".into()));
    }
    let mut params = args.config.pairs();
    params.push(("sweep_param".into(), args.param.clone()));
    params.push(("sweep_values".into(), args.values.join(",")));
    params.push(("points".into(), args.points.to_string()));
    params.push(("ell_max".into(), args.ell_max.to_string()));
    let manifest = RunManifest::new("sweep", params, None);
    let header = manifest.header_line();

    let mut summary = header.clone() + "param,value,localizable_fraction,p50,p80,p90\n";
    let mut files = vec![(format!("sweep_{}_summary.csv", args.param), String::new())];
    let mut canonical = None;
    for value in &args.values {
        let mut cfg = args.config;
        let key = cfg.set(&args.param, value)?;
        canonical.get_or_insert(key);
        cfg.validate()?;
        let (curve, terms) = marginal_summary(&cfg, args.points, args.ell_max)?;
        let mut body = header.clone() + "s_meters,cdf\n";
        for (s, f) in curve.points() {
            let _ = writeln!(body, "{s},{f}");
        }
        files.push((format!("sweep_{}_{value}.csv", args.param), body));
        let row = SweepRow {
            value: value.parse().unwrap_or(f64::NAN),
            localizable_fraction: terms.localizable_fraction(),
            p50: terms.quantile(0.5)?,
            p80: terms.quantile(0.8)?,
            p90: terms.quantile(0.9)?,
        };
        let _ = writeln!(
            summary,
            "{},{value},{},{},{},{}",
            args.param, row.localizable_fraction, row.p50, row.p80, row.p90
        );
    }
    files[0].1 = summary;
    Ok(CommandOutput { manifest, files, notes: Vec::new(), failure: None })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiArgs {
    pub l_values: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub bin_width: f64,
    pub no_assert: bool,
}

/// Mutual information between `D` and the three largest gap terms for each `L`.
pub fn cmd_mi(args: &MiArgs) -> Result<CommandOutput> {
    let mut ls = args.l_values.clone();
    ls.sort_unstable();
    ls.dedup();
    if ls.is_empty() {
        return Err(Error::Usage("need at least one L".into()));
    }
    if let Some(bad) = ls.iter().find(|&&l| l < 3) {
        return Err(Error::Usage(format!("L must be at least 3, got {bad}")));
    }
    let mut notes = Vec::new();
    if args.samples < MIN_RELIABLE_SAMPLES {
        let msg = format!("warning: {} samples is below {MIN_RELIABLE_SAMPLES}; estimates are noisy", args.samples);
        log::warn!("{msg}");
        notes.push(msg);
    }
    let params = vec![
        ("L".to_string(), ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")),
        ("samples".into(), args.samples.to_string()),
        ("bin_width".into(), format!("{:?}", args.bin_width)),
    ];
    let manifest = RunManifest::new("mi", params, Some(args.seed));
    let rows = mi_study(&ls, args.samples, args.seed, args.bin_width)?;
    let mut buf = Vec::new();
    write_mi_csv(&rows, &mut buf)?;
    let body = String::from_utf8(buf).expect("csv is ascii");
    let violations = ordering_violations(&rows);
    let failure = if violations.is_empty() || args.no_assert {
        None
    } else {
        Some(format!("second largest gap term is not the most informative at L = {violations:?}"))
    };
    if !violations.is_empty() {
        notes.push(format!("ordering violated at L = {violations:?}"));
    }
    Ok(CommandOutput { notes, failure, ..CommandOutput::single(manifest, "mi.csv", body) })
}
