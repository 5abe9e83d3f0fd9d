//! Command-line front end: evaluate Mittag-Leffler values, solve a
//! configured subdiffusion problem, verify a solution against its
//! specification, or report norm and membership diagnostics.
//!
//! Exit codes: 0 success (and verification pass), 1 verification fail,
//! 2 usage or configuration error, 3 numeric failure (no evaluation
//! strategy certified its tolerance).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subfrac::bases::{equivalence_constants, EllipticSymbol};
use subfrac::config::{self, BasisKind, BuiltProblem, DataKind, ForcingKind, RunConfig};
use subfrac::solve::{solve_with, SolutionField, VerificationReport};
use subfrac::special::{ml, ml_kernel, MlParams, Regime};
use subfrac::{Error, Result};

#[derive(Parser)]
#[command(name = "subfrac", version, about = "Spectral solver for time-fractional subdiffusion")]
struct Cli {
    /// Print only outcome lines
    #[arg(long, global = true)]
    quiet: bool,
    /// Print extra diagnostics
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate E_{rho,mu}(z), or the relaxation kernel t^{rho-1}E_{rho,rho}(-lambda t^rho)
    Ml {
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        /// Second parameter; defaults to 1
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        /// Argument for a plain evaluation
        #[arg(long, allow_hyphen_values = true)]
        z: Option<f64>,
        /// Evaluate the kernel instead; needs --lambda and --t
        #[arg(long)]
        kernel: bool,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
    },
    /// Solve the configured problem; write slices, coefficients, manifest
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
        /// Override the basis cutoff
        #[arg(long)]
        cutoff: Option<u32>,
        /// Worker threads (SUBFRAC_THREADS is the fallback)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Solve, then verify against the configuration; exit 1 on FAIL
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Directory for report.txt (optional)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cutoff: Option<u32>,
        /// Override the black-box derivative mesh resolution
        #[arg(long)]
        mesh: Option<usize>,
        /// Override the sampled-residual tolerance
        #[arg(long)]
        tol: Option<f64>,
        /// Comma-separated probe times
        #[arg(long, value_delimiter = ',')]
        probe_times: Option<Vec<f64>>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Sobolev norms, membership verdicts, equivalence constants
    Norms {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        cutoff: Option<u32>,
        /// Seed for the random-vector norm sandwich
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() {
    let cli = Cli::parse();
    let quiet = cli.quiet;
    let verbose = cli.verbose && !cli.quiet;
    let code = match run(cli.command, quiet, verbose) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("subfrac: error: {e}");
            match e {
                Error::AccuracyNotMet(_) => 3,
                _ => 2,
            }
        }
    };
    std::process::exit(code);
}

fn run(command: Command, quiet: bool, verbose: bool) -> Result<i32> {
    match command {
        Command::Ml { rho, mu, z, kernel, lambda, t } => cmd_ml(rho, mu, z, kernel, lambda, t),
        Command::Solve { config, out, cutoff, threads } => {
            cmd_solve(&config, &out, cutoff, threads, quiet, verbose)
        }
        Command::Verify { config, out, cutoff, mesh, tol, probe_times, threads } => {
            cmd_verify(&config, out.as_deref(), cutoff, mesh, tol, probe_times, threads, quiet, verbose)
        }
        Command::Norms { config, cutoff, seed } => cmd_norms(&config, cutoff, seed.unwrap_or(0)),
    }
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Series => "series",
        Regime::Asymptotic => "asymptotic",
        Regime::Integral => "integral",
    }
}

fn cmd_ml(
    rho: f64,
    mu: Option<f64>,
    z: Option<f64>,
    kernel: bool,
    lambda: Option<f64>,
    t: Option<f64>,
) -> Result<i32> {
    if kernel {
        let lambda = lambda.ok_or_else(|| Error::Config("ml: --kernel needs --lambda".into()))?;
        let t = t.ok_or_else(|| Error::Config("ml: --kernel needs --t".into()))?;
        if mu.is_some() {
            return Err(Error::Config("ml: the kernel fixes mu = rho; drop --mu".into()));
        }
        let v = ml_kernel(rho, lambda, t)?;
        println!("rho={rho} lambda={lambda} t={t} kernel={v}");
        return Ok(0);
    }
    let z = z.ok_or_else(|| Error::Config("ml: give --z, or --kernel with --lambda and --t".into()))?;
    if lambda.is_some() || t.is_some() {
        return Err(Error::Config("ml: --lambda/--t only apply with --kernel".into()));
    }
    let mu = mu.unwrap_or(1.0);
    let e = ml(MlParams { rho, mu }, z)?;
    println!(
        "rho={rho} mu={mu} z={z} value={} est_abs_error={} regime={}",
        e.value,
        e.est_abs_error,
        regime_name(e.regime)
    );
    Ok(0)
}

struct Overrides {
    cutoff: Option<u32>,
    mesh: Option<usize>,
    tol: Option<f64>,
    probe_times: Option<Vec<f64>>,
    threads: Option<usize>,
}

fn load_and_build(path: &Path, ov: &Overrides) -> Result<(RunConfig, BuiltProblem)> {
    let mut cfg = config::load_config(path)?;
    if let Some(k) = ov.cutoff {
        cfg.basis.cutoff = k;
    }
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut built = config::build(&cfg, &base)?;
    if let Some(m) = ov.mesh {
        built.verify.sample_intervals = m;
    }
    if let Some(t) = ov.tol {
        built.verify.blackbox_tol = t;
    }
    if let Some(times) = &ov.probe_times {
        built.verify.times = Some(times.clone());
    }
    let threads = ov
        .threads
        .or_else(|| std::env::var("SUBFRAC_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(built.solver.threads)
        .max(1);
    built.solver.threads = threads;
    built.verify.threads = threads;
    Ok((cfg, built))
}

fn data_kind_name(k: DataKind) -> &'static str {
    match k {
        DataKind::Zero => "zero",
        DataKind::Expression => "expression",
        DataKind::Mode => "mode",
        DataKind::Coefficients => "coefficients",
        DataKind::CoefficientsCsv => "coefficients_csv",
        DataKind::SamplesCsv => "samples_csv",
    }
}

fn join_values(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_solve(
    path: &Path,
    out: &Path,
    cutoff: Option<u32>,
    threads: Option<usize>,
    quiet: bool,
    verbose: bool,
) -> Result<i32> {
    let ov = Overrides { cutoff, mesh: None, tol: None, probe_times: None, threads };
    let (cfg, built) = load_and_build(path, &ov)?;
    let start = Instant::now();
    let field = solve_with(&built.spec, &built.solver)?;
    let solve_ms = start.elapsed().as_millis();
    if field.membership_warning() && !quiet {
        eprintln!(
            "subfrac: warning: membership hypothesis not met at tau={} (threshold {}); the finite series is still valid",
            field.membership().tau,
            built.spec.basis.membership_threshold()
        );
    }
    std::fs::create_dir_all(out)?;
    let mut files = Vec::new();

    let coeff_name = "coefficients.csv";
    write_text(&out.join(coeff_name), &coefficients_csv(&field))?;
    files.push(coeff_name.to_string());

    for (i, &t) in built.output_times.iter().enumerate() {
        let slice = field.synthesize_slice(t, built.output_grid)?;
        let name = format!("slice_{i:03}.csv");
        write_text(&out.join(&name), &slice_csv(&field, built.output_grid, t, &slice.values))?;
        files.push(name);
    }

    let manifest = manifest_text(&cfg, &built, &field, solve_ms, &files);
    write_text(&out.join("manifest.txt"), &manifest)?;

    if !quiet {
        println!(
            "solved {} modes (cutoff {}) in {} ms; wrote {} files to {}",
            built.spec.basis.modes().len(),
            built.spec.basis.cutoff(),
            solve_ms,
            files.len() + 1,
            out.display()
        );
    }
    if verbose {
        for (i, &t) in built.output_times.iter().enumerate() {
            let slice = field.synthesize_slice(t, built.output_grid)?;
            let sup = slice.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            println!("slice_{i:03} t={t} sup={sup}");
        }
    }
    Ok(0)
}

fn coefficients_csv(field: &SolutionField) -> String {
    let basis = field.basis();
    let n = basis.dimension();
    let mut s = String::from("# initial spectral coefficients\n");
    let header: Vec<String> = (1..=n).map(|j| format!("n{j}")).collect();
    s.push_str(&format!("{},re,im\n", header.join(",")));
    for (m, z) in basis.modes().iter().zip(&field.initial_coefficients().values) {
        let idx: Vec<String> = m.index.iter().map(|v| v.to_string()).collect();
        s.push_str(&format!("{},{},{}\n", idx.join(","), z.re, z.im));
    }
    s
}

fn slice_csv(field: &SolutionField, grid: usize, t: f64, values: &[f64]) -> String {
    let basis = field.basis();
    let n = basis.dimension();
    let axis = basis.axis_points(grid);
    let mut s = format!("# t={t}\n");
    let header: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
    s.push_str(&format!("{},value\n", header.join(",")));
    for (flat, v) in values.iter().enumerate() {
        let mut rem = flat;
        let mut coords = vec![0.0; n];
        for j in (0..n).rev() {
            coords[j] = axis[rem % axis.len()];
            rem /= axis.len();
        }
        let cs: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
        s.push_str(&format!("{},{v}\n", cs.join(",")));
    }
    s
}

fn manifest_text(
    cfg: &RunConfig,
    built: &BuiltProblem,
    field: &SolutionField,
    solve_ms: u128,
    files: &[String],
) -> String {
    let basis = field.basis();
    let mut m: BTreeMap<String, String> = BTreeMap::new();
    let put = |m: &mut BTreeMap<String, String>, k: &str, v: String| {
        m.insert(k.to_string(), v);
    };
    put(&mut m, "basis.cutoff", basis.cutoff().to_string());
    put(&mut m, "basis.dimension", basis.dimension().to_string());
    put(
        &mut m,
        "basis.kind",
        match cfg.basis.kind {
            BasisKind::Torus => "torus".into(),
            BasisKind::Sine => "sine".into(),
        },
    );
    put(&mut m, "basis.modes", basis.modes().len().to_string());
    if cfg.basis.kind == BasisKind::Torus {
        match &cfg.basis.symbol {
            None => put(&mut m, "basis.symbol", "laplacian".into()),
            Some(sym) => {
                put(&mut m, "basis.symbol.order", sym.order.to_string());
                let terms: Vec<String> = sym
                    .coefficients
                    .iter()
                    .map(|t| {
                        let p: Vec<String> = t.powers.iter().map(|v| v.to_string()).collect();
                        format!("[{}]:{}", p.join(" "), t.value)
                    })
                    .collect();
                put(&mut m, "basis.symbol.terms", terms.join(";"));
            }
        }
    }
    put(&mut m, "files", files.join(","));
    put(
        &mut m,
        "forcing.kind",
        cfg.forcing
            .as_ref()
            .map(|f| match f.kind {
                ForcingKind::Zero => "zero".to_string(),
                ForcingKind::Separable => "separable".to_string(),
                ForcingKind::SamplesCsv => "samples_csv".to_string(),
            })
            .unwrap_or_else(|| "zero".into()),
    );
    put(&mut m, "initial.kind", data_kind_name(cfg.initial.kind).into());
    put(
        &mut m,
        "membership.hypothesis_met",
        field.membership().hypothesis_met.to_string(),
    );
    put(&mut m, "membership.last_shell_mass", field.membership().last_shell_mass.to_string());
    put(&mut m, "membership.tau", field.membership().tau.to_string());
    put(&mut m, "membership.threshold", basis.membership_threshold().to_string());
    put(&mut m, "membership.weighted_sum", field.membership().weighted_sum.to_string());
    put(&mut m, "output.grid", built.output_grid.to_string());
    put(&mut m, "output.times", join_values(&built.output_times));
    put(&mut m, "problem.horizon", built.spec.horizon.to_string());
    put(&mut m, "problem.rho", built.spec.rho.to_string());
    put(&mut m, "settings.blackbox_points", built.verify.blackbox_points.to_string());
    put(&mut m, "settings.blackbox_tol", built.verify.blackbox_tol.to_string());
    put(
        &mut m,
        "settings.epsilon",
        built
            .verify
            .epsilon
            .map(|e| e.to_string())
            .unwrap_or_else(|| format!("default:{}", 0.5 * built.spec.rho)),
    );
    put(&mut m, "settings.ic_tol", built.verify.ic_tol.to_string());
    put(
        &mut m,
        "settings.probe_times",
        built
            .verify
            .times
            .as_ref()
            .map(|t| join_values(t))
            .unwrap_or_else(|| "default:log8".into()),
    );
    put(&mut m, "settings.sample_intervals", built.verify.sample_intervals.to_string());
    put(&mut m, "settings.space_probes", built.verify.space_probes.to_string());
    put(&mut m, "settings.spectral_tol", built.verify.spectral_tol.to_string());
    put(&mut m, "settings.tau", field.membership().tau.to_string());
    put(&mut m, "settings.threads", built.solver.threads.to_string());
    put(&mut m, "settings.uniqueness_tol", built.verify.uniqueness_tol.to_string());
    put(&mut m, "timing.solve_ms", solve_ms.to_string());
    put(&mut m, "version", env!("CARGO_PKG_VERSION").to_string());
    let mut s = String::new();
    for (k, v) in &m {
        s.push_str(&format!("{k}={v}\n"));
    }
    s
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    path: &Path,
    out: Option<&Path>,
    cutoff: Option<u32>,
    mesh: Option<usize>,
    tol: Option<f64>,
    probe_times: Option<Vec<f64>>,
    threads: Option<usize>,
    quiet: bool,
    verbose: bool,
) -> Result<i32> {
    let ov = Overrides { cutoff, mesh, tol, probe_times, threads };
    let (_, built) = load_and_build(path, &ov)?;
    let start = Instant::now();
    let mut field = solve_with(&built.spec, &built.solver)?;
    if let Some((mode, delta)) = built.inject {
        field = field.perturb_mode(mode, delta)?;
        if !quiet {
            println!("injected delta={delta} into mode {mode} before verification");
        }
    }
    let report: VerificationReport = subfrac::solve::verify(&field, &built.spec, &built.verify)?;
    if verbose {
        println!("solve+verify took {} ms", start.elapsed().as_millis());
        println!(
            "membership tau={} met={}",
            field.membership().tau,
            field.membership().hypothesis_met
        );
    }
    if quiet {
        println!("verification {}", if report.pass { "PASS" } else { "FAIL" });
    } else {
        print!("{report}");
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        write_text(&dir.join("report.txt"), &format!("{report}"))?;
    }
    Ok(if report.pass { 0 } else { 1 })
}

fn cmd_norms(path: &Path, cutoff: Option<u32>, seed: u64) -> Result<i32> {
    let ov = Overrides { cutoff, mesh: None, tol: None, probe_times: None, threads: None };
    let (cfg, built) = load_and_build(path, &ov)?;
    let basis = &built.spec.basis;
    let phi = built.spec.initial.resolve(basis)?;
    println!(
        "basis={} cutoff={} dimension={} modes={}",
        match cfg.basis.kind {
            BasisKind::Torus => "torus",
            BasisKind::Sine => "sine",
        },
        basis.cutoff(),
        basis.dimension(),
        basis.modes().len()
    );
    let tau = built.solver.tau.unwrap_or(basis.membership_threshold() + 0.5);
    for a in [0.0, 1.0, tau] {
        println!("sobolev a={a} norm={}", basis.sobolev_norm(&phi, a)?);
    }
    let report = basis.domain_membership(&phi, tau)?;
    println!(
        "membership tau={} threshold={} weighted_sum={} last_shell_mass={} hypothesis_met={}",
        report.tau,
        basis.membership_threshold(),
        report.weighted_sum,
        report.last_shell_mass,
        report.hypothesis_met
    );

    let symbol = match basis.symbol() {
        Some(s) => s.clone(),
        None => EllipticSymbol::laplacian(1),
    };
    let k0 = basis.cutoff();
    for k in [k0, 2 * k0, 4 * k0] {
        let (c1, c2) = equivalence_constants(&symbol, tau, k)?;
        println!("equivalence cutoff={k} c1={c1} c2={c2}");
    }

    // norm sandwich c1·R ≤ S ≤ c2·R on random coefficient vectors,
    // S = Σ(1+A^{2τ})|g|², R = Σ(1+|n|²)^{τm}|g|²
    let (c1, c2) = equivalence_constants(&symbol, tau, k0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tm = tau * symbol.order() as f64;
    let mut low = f64::INFINITY;
    let mut high = 0.0f64;
    let count = 100;
    for _ in 0..count {
        let mut s = 0.0f64;
        let mut r = 0.0f64;
        for mode in basis.modes() {
            let g: f64 = rng.gen_range(-1.0..1.0);
            let a = symbol.eval(&mode.index);
            let n2: f64 = mode.index.iter().map(|&c| (c * c) as f64).sum();
            s += (1.0 + a.powf(2.0 * tau)) * g * g;
            r += (1.0 + n2).powf(tm) * g * g;
        }
        let ratio = s / r;
        low = low.min(ratio / c1);
        high = high.max(ratio / c2);
    }
    let ok = low >= 1.0 - 1e-12 && high <= 1.0 + 1e-12;
    println!("sandwich vectors={count} seed={seed} low_margin={low} high_margin={high} ok={ok}");
    Ok(if ok { 0 } else { 1 })
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)?;
    Ok(())
}
