//! `modlab`: every experiment as a subcommand writing one CSV file, plus a
//! `<output>.meta` sidecar with the run configuration.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use modlab_core::charfn::{
    inverse_fourier_limit_tol, CharTrace, Counterexample, LambdaGrid, WeightedEnsemble,
    COUNTEREXAMPLE_RADIUS, DEFAULT_QUAD_TOL,
};
use modlab_core::cumulants::{cum1_limit, cum1_trace, BaseLaw};
use modlab_core::density::{certify, find_sigma0, DensityReport, RealPolynomial, SigmaSearch};
use modlab_core::geodesic::{enumerate_classes, phi1, sarnak_trace_in, selberg_check, GeodesicEnsemble};
use modlab_core::numeric::fmt_g17;
use modlab_core::specialfn::wieand_limit;
use modlab_core::vardi::{figure_traces, vardi_law_check, vardi_phi, vardi_phi_quadrature, FigureTrace};
use modlab_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "modlab", version, about = "Renormalized characteristic functions and arithmetic mod-Cauchy ensembles")]
struct Cli {
    /// Seed for Monte-Carlo streams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Logical partition count for Monte-Carlo streams. Results depend on it;
    /// the physical thread count never changes output.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    chunks: u64,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// CSV destination; a `<output>.meta` sidecar is written next to it.
    /// Standard output when absent (no sidecar).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scaled i.i.d. sums against exp(c_{k+1} (i lambda)^{k+1} / (k+1)!).
    ///
    /// Writes `lambda,re,im,label` rows for the finite-N value (label
    /// `cum1_lhs`) and the limit (label `cum1_limit`). With several --n values a
    /// trailing `n` column is added (`inf` on limit rows).
    IidModgauss(IidArgs),
    /// Nonnegativity and mass certificate for g_{P,sigma}.
    ///
    /// Without --sigma, doubles sigma from 0.125 until certified. Writes
    /// `sigma,min_value,integral,grid_radius,grid_points`.
    DensityCheck(DensityArgs),
    /// Renormalized Dedekind-sum traces exp(gamma_N |t|) Re E_N(exp(i t D_N)).
    ///
    /// Windows: a limit is claimed only for |t| < 4 pi/3; the asymptotic
    /// formula is uniform for |t| < 2 pi; larger |t| is exploratory. Each t's
    /// window is recorded in the sidecar. Writes `t,N,value`.
    DedekindFigure(FigureArgs),
    /// The limiting function Phi(t) as an integral over the modular surface.
    ///
    /// Window: |t| < 4 pi (pole of the prefactor at |t| = 4 pi). Writes
    /// `t,value,std_error,samples,seed`.
    VardiPhi(PhiArgs),
    /// KS distance of s(d,c) / (log c / 2 pi) over F_N to the standard Cauchy law.
    ///
    /// Writes `N,ks_distance`.
    VardiLaw(LawArgs),
    /// Primitive hyperbolic classes of PSL(2,Z) with norm <= x.
    ///
    /// Writes `trace,norm,length,psi,word`.
    Geodesics(GeodesicArgs),
    /// Length-weighted linking-number trace exp(gamma_x |t|) E_x(exp(i t psi)).
    ///
    /// Window: |t| <= pi/12. Larger |t| requires --exploratory and carries no
    /// convergence claim (empty phi1 column). Writes `t,x,value,phi1`.
    Sarnak(SarnakArgs),
    /// Prime geodesic normalization sum_{N(g) <= x} log N(g) / x.
    ///
    /// Writes `x,ratio,count`.
    Selberg(SelbergArgs),
    /// Limiting function for eigenvalue counts on an arc.
    ///
    /// Window: |t| < pi. Writes `t,gamma,value`.
    WieandLimit(WieandArgs),
    /// Fourier transforms of two measures agreeing on [-1/2, 1/2].
    ///
    /// Writes `lambda,measure_a,measure_b,closed_a,closed_b`.
    Counterexample(CounterexampleArgs),
    /// Inverse Fourier transform of exp(c (i lambda)^{k+1} / (k+1)!).
    ///
    /// Needs k+1 even and c (-1)^{(k+1)/2} < 0. Writes `x,density`.
    InvertLimit(InvertArgs),
}

#[derive(Args, Debug)]
struct IidArgs {
    #[arg(long, default_value_t = 3)]
    k: u32,
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1000000")]
    n: Vec<u64>,
    #[arg(long, default_value_t = 2.0)]
    lambda_max: f64,
    #[arg(long, default_value_t = 41)]
    points: usize,
    /// Base law as `value:weight` atoms, comma separated; the symmetric
    /// two-point law on {-1, 1} when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    atoms: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct DensityArgs {
    /// Coefficients of P from the constant term up, comma separated; the
    /// constant term must be 1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1")]
    poly: Vec<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 6.0)]
    radius_factor: f64,
    #[arg(long, default_value_t = 20_001)]
    points: usize,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    t: Vec<f64>,
    #[arg(long, default_value_t = 5000)]
    n_max: u64,
    #[arg(long, default_value_t = 10)]
    stride: u64,
}

#[derive(Args, Debug)]
struct PhiArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    t: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Deterministic tensor Gauss-Legendre quadrature instead of Monte-Carlo.
    #[arg(long)]
    quadrature: bool,
    /// Panels of 16 nodes per axis for --quadrature.
    #[arg(long, default_value_t = 32)]
    panels: usize,
}

#[derive(Args, Debug)]
struct LawArgs {
    #[arg(long, value_delimiter = ',', default_value = "500,5000")]
    n: Vec<u64>,
}

#[derive(Args, Debug)]
struct GeodesicArgs {
    #[arg(long)]
    x: f64,
}

#[derive(Args, Debug)]
struct SarnakArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    t: Vec<f64>,
    #[arg(long, default_value_t = 1e6)]
    x: f64,
    /// Allow |t| > pi/12.
    #[arg(long)]
    exploratory: bool,
}

#[derive(Args, Debug)]
struct SelbergArgs {
    #[arg(long, value_delimiter = ',', default_value = "1000,100000")]
    x: Vec<f64>,
}

#[derive(Args, Debug)]
struct WieandArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    t: Vec<f64>,
    /// Arc parameter in (0, 1/2).
    #[arg(long)]
    gamma: f64,
}

#[derive(Args, Debug)]
struct CounterexampleArgs {
    /// Explicit lambda values; overrides the uniform grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<f64>>,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    lo: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    hi: f64,
    #[arg(long, default_value_t = 81)]
    points: usize,
    /// Truncation radius X of the x-integral.
    #[arg(long, default_value_t = COUNTEREXAMPLE_RADIUS)]
    radius: f64,
}

#[derive(Args, Debug)]
struct InvertArgs {
    #[arg(long, default_value_t = 3)]
    k: u32,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    c: f64,
    #[arg(long, default_value_t = -6.0, allow_negative_numbers = true)]
    x_min: f64,
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    x_max: f64,
    #[arg(long, default_value_t = 121)]
    points: usize,
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    tol: f64,
}

/// CSV body plus extra sidecar entries.
struct Output {
    csv: String,
    meta: Vec<(String, String)>,
}

impl Output {
    fn new(header: &str) -> Self {
        Self { csv: format!("{header}\n"), meta: Vec::new() }
    }
}

fn trace_rows(out: &mut String, trace: &CharTrace, n: Option<&str>) {
    for (l, v) in trace.grid.points().iter().zip(&trace.values) {
        let _ = write!(out, "{},{},{},{}", fmt_g17(*l), fmt_g17(v.re), fmt_g17(v.im), trace.label);
        if let Some(n) = n {
            let _ = write!(out, ",{n}");
        }
        out.push('\n');
    }
}

fn parse_atoms(specs: &[String]) -> Result<WeightedEnsemble> {
    let atoms = specs
        .iter()
        .map(|s| {
            let (v, w) = s
                .split_once(':')
                .ok_or_else(|| Error::InvalidInput(format!("atom {s:?} is not value:weight")))?;
            let parse = |x: &str| {
                x.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad number {x:?}")))
            };
            Ok((parse(v)?, parse(w)?))
        })
        .collect::<Result<Vec<_>>>()?;
    WeightedEnsemble::new(atoms)
}

fn iid_modgauss(a: &IidArgs) -> Result<Output> {
    let base = match &a.atoms {
        Some(specs) => BaseLaw::Atoms(parse_atoms(specs)?),
        None => BaseLaw::PlusMinusOne,
    };
    let grid = LambdaGrid::uniform(-a.lambda_max, a.lambda_max, a.points)?;
    let sweep = a.n.len() > 1;
    let mut out = Output::new(if sweep { "lambda,re,im,label,n" } else { CharTrace::csv_header() });
    for &n in &a.n {
        let trace = cum1_trace(&base, a.k, n, &grid)?;
        trace_rows(&mut out.csv, &trace, sweep.then(|| n.to_string()).as_deref());
    }
    let c = base.cumulant(a.k + 1);
    let limit = CharTrace {
        grid: grid.clone(),
        values: grid.points().iter().map(|&l| cum1_limit(a.k, c, l)).collect(),
        label: "cum1_limit".into(),
    };
    trace_rows(&mut out.csv, &limit, sweep.then_some("inf"));
    out.meta.push(("cumulant_k_plus_1".into(), fmt_g17(c)));
    Ok(out)
}

fn density_check(a: &DensityArgs) -> Result<Output> {
    let p = RealPolynomial::new(a.poly.clone())?;
    let report = match a.sigma {
        Some(s) => certify(&p, s, a.radius_factor, a.points)?,
        None => find_sigma0(&p, a.radius_factor, a.points)?,
    };
    let mut out = Output::new(DensityReport::csv_header());
    out.csv.push_str(&report.csv_row());
    out.csv.push('\n');
    out.meta.push(("certified".into(), report.certified().to_string()));
    out.meta.push(("tail_certified".into(), report.tail_certified.to_string()));
    out.meta.push(("richardson_delta".into(), fmt_g17(report.richardson_delta)));
    if a.sigma.is_none() {
        out.meta.push(("search_initial_sigma".into(), fmt_g17(SigmaSearch::default().initial_sigma)));
    }
    Ok(out)
}

fn dedekind_figure(a: &FigureArgs) -> Result<Output> {
    let traces = figure_traces(&a.t, a.n_max, a.stride)?;
    let mut out = Output::new(FigureTrace::csv_header());
    for tr in &traces {
        out.csv.push_str(&tr.csv_rows());
        out.meta.push((format!("window[{}]", fmt_g17(tr.t)), tr.window.label().into()));
        out.meta.push((format!("max_abs_imag[{}]", fmt_g17(tr.t)), fmt_g17(tr.max_abs_imag())));
    }
    Ok(out)
}

fn vardi_phi_cmd(a: &PhiArgs, seed: u64, chunks: u64) -> Result<Output> {
    let mut out = Output::new("t,value,std_error,samples,seed");
    for &t in &a.t {
        let (est, samples) = if a.quadrature {
            let nodes = (a.panels.max(1) * 16) as u64;
            (vardi_phi_quadrature(t, a.panels)?, nodes * nodes)
        } else {
            (vardi_phi(t, a.samples, seed, chunks)?, a.samples)
        };
        let _ = writeln!(out.csv, "{},{},{},{},{}", fmt_g17(t), fmt_g17(est.value), fmt_g17(est.std_error), samples, seed);
    }
    out.meta.push(("method".into(), if a.quadrature { "quadrature" } else { "monte-carlo" }.into()));
    Ok(out)
}

fn vardi_law(a: &LawArgs) -> Result<Output> {
    let mut out = Output::new("N,ks_distance");
    for &n in &a.n {
        let _ = writeln!(out.csv, "{},{}", n, fmt_g17(vardi_law_check(n)?));
    }
    Ok(out)
}

fn geodesics(a: &GeodesicArgs) -> Result<Output> {
    let ens = enumerate_classes(a.x)?;
    let mut out = Output::new(GeodesicEnsemble::csv_header());
    out.csv.push_str(&ens.csv_rows());
    out.meta.push(("classes".into(), ens.len().to_string()));
    out.meta.push(("total_length".into(), fmt_g17(ens.total_length)));
    Ok(out)
}

fn sarnak(a: &SarnakArgs) -> Result<Output> {
    if !a.exploratory {
        for &t in &a.t {
            phi1(t)?;
        }
    }
    let ens = enumerate_classes(a.x)?;
    let mut out = Output::new("t,x,value,phi1");
    for &t in &a.t {
        let v = sarnak_trace_in(&ens, t)?;
        let p = phi1(t).map(fmt_g17).unwrap_or_default();
        let _ = writeln!(out.csv, "{},{},{},{}", fmt_g17(t), fmt_g17(a.x), fmt_g17(v.value), p);
        out.meta.push((format!("imag[{}]", fmt_g17(t)), fmt_g17(v.imag)));
    }
    out.meta.push(("exploratory".into(), a.exploratory.to_string()));
    Ok(out)
}

fn selberg(a: &SelbergArgs) -> Result<Output> {
    let mut out = Output::new("x,ratio,count");
    for &x in &a.x {
        let (ratio, count) = selberg_check(x)?;
        let _ = writeln!(out.csv, "{},{},{}", fmt_g17(x), fmt_g17(ratio), count);
    }
    Ok(out)
}

fn wieand(a: &WieandArgs) -> Result<Output> {
    let mut out = Output::new("t,gamma,value");
    for &t in &a.t {
        let v = wieand_limit(t, a.gamma)?;
        let _ = writeln!(out.csv, "{},{},{}", fmt_g17(t), fmt_g17(a.gamma), fmt_g17(v));
    }
    Ok(out)
}

fn counterexample(a: &CounterexampleArgs) -> Result<Output> {
    if !(a.radius > 0.0) {
        return Err(Error::InvalidInput(format!("radius {} must be > 0", a.radius)));
    }
    let lambdas = match &a.lambda {
        Some(ls) => ls.clone(),
        None => LambdaGrid::uniform(a.lo, a.hi, a.points)?.points().to_vec(),
    };
    let mut out = Output::new("lambda,measure_a,measure_b,closed_a,closed_b");
    for l in lambdas {
        let (ma, mb) = (Counterexample::A, Counterexample::B);
        let _ = writeln!(
            out.csv,
            "{},{},{},{},{}",
            fmt_g17(l),
            fmt_g17(ma.fourier_with_radius(l, a.radius)),
            fmt_g17(mb.fourier_with_radius(l, a.radius)),
            fmt_g17(ma.closed_form(l)),
            fmt_g17(mb.closed_form(l))
        );
    }
    out.meta.push(("tail_bound".into(), fmt_g17(Counterexample::tail_bound(a.radius))));
    Ok(out)
}

fn invert_limit(a: &InvertArgs) -> Result<Output> {
    let xs = LambdaGrid::uniform(a.x_min, a.x_max, a.points)?.points().to_vec();
    let ys = inverse_fourier_limit_tol(a.k, a.c, &xs, a.tol)?;
    let mut out = Output::new("x,density");
    for (x, y) in xs.iter().zip(&ys) {
        let _ = writeln!(out.csv, "{},{}", fmt_g17(*x), fmt_g17(*y));
    }
    Ok(out)
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::IidModgauss(a) => iid_modgauss(a),
        Command::DensityCheck(a) => density_check(a),
        Command::DedekindFigure(a) => dedekind_figure(a),
        Command::VardiPhi(a) => vardi_phi_cmd(a, cli.seed, cli.chunks),
        Command::VardiLaw(a) => vardi_law(a),
        Command::Geodesics(a) => geodesics(a),
        Command::Sarnak(a) => sarnak(a),
        Command::Selberg(a) => selberg(a),
        Command::WieandLimit(a) => wieand(a),
        Command::Counterexample(a) => counterexample(a),
        Command::InvertLimit(a) => invert_limit(a),
    }
}

/// `key=value` lines: the subcommand, every parameter as given or defaulted,
/// the artifact version and timing.
fn metadata(matches: &ArgMatches, extra: &[(String, String)], elapsed: f64, started: u64) -> String {
    let mut lines = Vec::new();
    if let Some((name, sub)) = matches.subcommand() {
        lines.push(format!("subcommand={name}"));
        let cmd = Cli::command();
        let mut ids: Vec<String> = cmd
            .get_arguments()
            .chain(cmd.find_subcommand(name).into_iter().flat_map(|c| c.get_arguments()))
            .map(|a| a.get_id().to_string())
            .filter(|id| id != "help" && id != "version")
            .collect();
        ids.sort_unstable();
        ids.dedup();
        for id in &ids {
            if let Ok(Some(raw)) = sub.try_get_raw(id) {
                let vals: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
                lines.push(format!("param.{id}={}", vals.join(",")));
            }
        }
    }
    lines.push(format!("version={}", env!("CARGO_PKG_VERSION")));
    lines.push(format!("started_unix={started}"));
    lines.push(format!("wall_clock_seconds={elapsed:.6}"));
    for (k, v) in extra {
        lines.push(format!("{k}={v}"));
    }
    lines.join("\n") + "\n"
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let out = match dispatch(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let elapsed = clock.elapsed().as_secs_f64();
    match &cli.output {
        None => print!("{}", out.csv),
        Some(path) => {
            let mut meta_path = path.clone().into_os_string();
            meta_path.push(".meta");
            let meta = metadata(&matches, &out.meta, elapsed, started);
            if let Err(e) = std::fs::write(path, &out.csv).and_then(|_| std::fs::write(&meta_path, meta)) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::SUCCESS
}
