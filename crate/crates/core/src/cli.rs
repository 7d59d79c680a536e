//! Command-line front end. Every task renders its CSVs in memory first so a
//! failing run leaves no partial output behind.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::asymptotics::{convergence_slope, estimate_sigma, ExpansionSetup};
use crate::config::{ContinuationConfig, ProfileConfig, RunConfig, Task, TOOL_VERSION};
use crate::error::{Error, Result};
use crate::fd::system::state_field;
use crate::fd::{continuation, discrete_expansion_reference, geometric_schedule, Grid1D, GridField};
use crate::roots::Region;
use crate::spectrum2::{find_eigenvalues2, simplicity_expression2, EigsOptions, TwoLayerState};
use crate::spectrum3::{alpha_beta_scan, find_eigenvalues3, is_real_width, width_scan, Evaluated, SimplicityStatus};
use crate::C64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TRUNCATED: i32 = 3;

/// Half-width of the search box put around omega0_guess when no region is given.
const GUESS_BOX: f64 = 0.05;
/// eps of the tiny-amplitude solves behind the discrete nu reference.
const NU_REF_EPS: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(name = "kerrmodes", version, about = "Interface plasmons in layered dispersive media and their Kerr bifurcations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the task named in a config file.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified two-layer eigenvalues in a region.
    Eigs2(Common),
    /// Certified sandwich eigenvalues in a region.
    Eigs3(Common),
    /// Widths d_m(omega) on a real frequency grid, with alpha and beta.
    WidthScan(Common),
    /// Simplicity and isolation certificates of the eigenvalues in a region.
    Simplicity(Common),
    /// nu, phi and the discrete reference data at one eigenvalue.
    Asymptotics(AsymptoticsArgs),
    /// Continue the nonlinear branch in eps.
    Bifurcate(BifurcateArgs),
    /// Field profile of the linear mode or of a nonlinear solution.
    Profile(ProfileArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides output_dir).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Half-width of the computational domain.
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// Number of interior nodes (odd).
    #[arg(long = "N")]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AsymptoticsArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct BifurcateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: GridArgs,
    /// First eps of the geometric schedule.
    #[arg(long)]
    pub eps_min: Option<f64>,
    /// Last eps of the geometric schedule.
    #[arg(long)]
    pub eps_max: Option<f64>,
    /// Number of schedule points.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Newton tolerance on the residual infinity norm.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Newton iteration limit per point.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Predictor for the first point: 0 uses eps^{1/2} phi0, 1 adds eps^{3/2} phi.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub predictor_order: Option<u8>,
    /// Reuse the previous solution as is (no amplitude rescaling).
    #[arg(long)]
    pub strict_paper_continuation: bool,
    /// Also write one profile CSV per branch point.
    #[arg(long)]
    pub profiles: bool,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Sample the linear eigenfunction.
    #[arg(long, conflicts_with = "eps")]
    pub linear: bool,
    /// Solve the nonlinear problem at this eps and sample it.
    #[arg(long)]
    pub eps: Option<f64>,
}

/// Files a run produced and whether the branch stopped early.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub truncated: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "{m}"),
        }
    }
}

fn from_error(task: Task, e: Error) -> CliError {
    match e {
        Error::Config(m) => CliError::Config(m),
        other => CliError::Numerical(format!("{}: {other}", task.name())),
    }
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn cx(z: C64) -> [String; 2] {
    [f(z.re), f(z.im)]
}

fn ev(e: Evaluated) -> [String; 2] {
    match e.value() {
        Some(z) => cx(z),
        None => [String::new(), String::new()],
    }
}

struct Output<'a> {
    meta: String,
    files: Vec<(String, String)>,
    cfg: &'a RunConfig,
}

impl<'a> Output<'a> {
    fn new(cfg: &'a RunConfig, hash: &str) -> Self {
        let mut meta = format!(
            "# kerrmodes {TOOL_VERSION}; task={}; config_hash={hash}; units=nondimensional (eps0 = mu0 = 1)",
            cfg.task.name()
        );
        if matches!(cfg.task, Task::Asymptotics | Task::Bifurcate | Task::Profile) {
            meta.push_str(&format!("; newton_tol={:e}", cfg.continuation_or_default().tol));
        }
        Self {
            meta,
            files: Vec::new(),
            cfg,
        }
    }

    fn table(&mut self, name: &str, extra: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        let mut buf = self.meta.clone().into_bytes();
        buf.extend_from_slice(extra.as_bytes());
        buf.push(b'\n');
        let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header).map_err(io)?;
            for r in rows {
                w.write_record(&r).map_err(io)?;
            }
            w.flush().map_err(|e| Error::Config(format!("csv: {e}")))?;
        }
        self.files.push((name.to_string(), String::from_utf8(buf).expect("ascii output")));
        Ok(())
    }

    fn profile(&mut self, name: &str, extra: &str, u: &GridField) -> Result<()> {
        let js = u.grid.j_star();
        let mut rows = Vec::with_capacity(u.grid.n + 1);
        let row = |x: f64, side: &str, v: &[C64; 3]| {
            let mut r = vec![f(x), side.to_string()];
            for c in v {
                r.extend(cx(*c));
            }
            r
        };
        for j in 0..u.grid.n {
            if j == js {
                rows.push(row(0.0, "left", &u.values[j]));
                rows.push(row(0.0, "right", &u.right));
            } else {
                rows.push(row(u.grid.x(j), "", &u.values[j]));
            }
        }
        self.table(
            name,
            extra,
            &["x", "side", "u1_re", "u1_im", "u2_re", "u2_im", "u3_re", "u3_im"],
            rows,
        )
    }

    fn write(self, hash: &str) -> std::io::Result<Vec<PathBuf>> {
        let dir = &self.cfg.output_dir;
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        let cfg_text = format!(
            "# kerrmodes {TOOL_VERSION}; config_hash={hash}\n{}",
            self.cfg.to_toml().expect("config serialized during validation")
        );
        for (name, text) in std::iter::once(("config.toml".to_string(), cfg_text)).chain(self.files) {
            let p = dir.join(name);
            std::fs::write(&p, text)?;
            out.push(p);
        }
        Ok(out)
    }
}

fn search_region(cfg: &RunConfig) -> Result<Region> {
    match (cfg.region, cfg.omega0_guess) {
        (Some(r), _) => Ok(r),
        (None, Some(w)) => Region::new(w.re - GUESS_BOX, w.re + GUESS_BOX, w.im - GUESS_BOX, w.im + GUESS_BOX),
        (None, None) => Err(Error::Config("no region or omega0_guess".into())),
    }
}

/// Certified two-layer eigenvalue nearest omega0_guess (or the first one).
pub fn select_omega0(cfg: &RunConfig) -> Result<C64> {
    let region = search_region(cfg)?;
    let eigs = find_eigenvalues2(cfg.k, &cfg.geometry, &region, &EigsOptions::default())?;
    let target = cfg.omega0_guess;
    eigs.into_iter()
        .map(|c| c.omega0)
        .min_by(|a, b| match target {
            Some(t) => (a - t).norm().total_cmp(&(b - t).norm()),
            None => std::cmp::Ordering::Equal,
        })
        .ok_or_else(|| Error::Rejected("no certified eigenvalue in the search region".into()))
}

fn grid(cfg: &RunConfig) -> Grid1D {
    cfg.grid.expect("validated")
}

fn eigs2(out: &mut Output, cfg: &RunConfig) -> Result<()> {
    let eigs = find_eigenvalues2(cfg.k, &cfg.geometry, &cfg.region.expect("validated"), &EigsOptions::default())?;
    let rows = eigs
        .iter()
        .map(|c| {
            let mut r = Vec::new();
            r.extend(cx(c.omega0));
            r.extend(cx(c.mu_minus));
            r.extend(cx(c.mu_plus));
            r.push(c.algebraically_simple.to_string());
            r.push(c.isolation_radius.map(f).unwrap_or_default());
            r.push(f(c.residual));
            r
        })
        .collect();
    out.table(
        "eigs2.csv",
        "",
        &[
            "omega_re", "omega_im", "mu_minus_re", "mu_minus_im", "mu_plus_re", "mu_plus_im",
            "algebraically_simple", "isolation_radius", "residual",
        ],
        rows,
    )
}

fn eigs3_rows(cfg: &RunConfig) -> Result<Vec<Vec<String>>> {
    let (s, d) = cfg.geometry.as_sandwich()?;
    let eigs = find_eigenvalues3(cfg.k, &s, d, &cfg.region.expect("validated"), &EigsOptions::default())?;
    Ok(eigs
        .iter()
        .map(|p| {
            let mut r = Vec::new();
            r.extend(cx(p.omega));
            r.push(p.branch_index_m.map(|m| m.to_string()).unwrap_or_default());
            r.extend(ev(p.alpha_value));
            r.extend(ev(p.beta_value));
            r.push(p.beta_value.value().map(|b| f((d - b).norm())).unwrap_or_default());
            r.push((p.simplicity == SimplicityStatus::CertifiedSimple).to_string());
            r.push(p.isolated.map(|b| b.to_string()).unwrap_or_default());
            r.push(p.in_o_k.to_string());
            r.push(f(p.residual));
            r
        })
        .collect())
}

const EIGS3_HEADER: [&str; 12] = [
    "omega_re", "omega_im", "branch_m", "alpha_re", "alpha_im", "beta_re", "beta_im", "abs_d_minus_beta",
    "certified_simple", "isolated", "in_o_k", "residual",
];

fn eigs3(out: &mut Output, cfg: &RunConfig) -> Result<()> {
    let rows = eigs3_rows(cfg)?;
    out.table("eigs3.csv", "", &EIGS3_HEADER, rows)
}

fn width_scan_task(out: &mut Output, cfg: &RunConfig) -> Result<()> {
    let (s, d) = cfg.geometry.as_sandwich()?;
    let sc = cfg.scan.as_ref().expect("validated");
    let omegas = sc.omegas();
    let mmax = sc.m.iter().map(|m| m.abs()).max().unwrap_or(0);
    let all = width_scan(cfg.k, &s, &omegas, mmax);
    let mut crossings = Vec::new();
    for &m in &sc.m {
        let pts: Vec<_> = all.iter().filter(|p| p.m == m).collect();
        let rows = pts.iter().map(|p| vec![f(p.omega), f(p.d.re), f(p.d.im)]).collect();
        out.table(&format!("width_m{m}.csv"), "", &["omega", "d_re", "d_im"], rows)?;
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            // a jump of the log branch is not a crossing
            if !(is_real_width(a.d) && is_real_width(b.d)) || (b.d.re - a.d.re).abs() > 0.25 {
                continue;
            }
            let (ga, gb) = (a.d.re - d, b.d.re - d);
            if ga == 0.0 || ga * gb < 0.0 {
                let t = ga / (ga - gb);
                crossings.push(vec![m.to_string(), f(a.omega + t * (b.omega - a.omega))]);
            }
        }
        let ab = alpha_beta_scan(cfg.k, &s, &omegas, m)
            .iter()
            .map(|p| {
                let mut r = vec![f(p.omega), f(p.d)];
                r.extend(ev(p.alpha));
                r.extend(ev(p.beta));
                r.push(p.beta.value().map(|b| f((p.d - b).norm())).unwrap_or_default());
                r
            })
            .collect();
        out.table(
            &format!("alpha_beta_m{m}.csv"),
            "",
            &["omega", "d", "alpha_re", "alpha_im", "beta_re", "beta_im", "abs_d_minus_beta"],
            ab,
        )?;
    }
    out.table(
        "crossings.csv",
        &format!("; d={}", f(d)),
        &["m", "omega"],
        crossings,
    )
}

fn simplicity(out: &mut Output, cfg: &RunConfig) -> Result<()> {
    if cfg.geometry.as_sandwich().is_ok() {
        let rows = eigs3_rows(cfg)?;
        return out.table("simplicity.csv", "", &EIGS3_HEADER, rows);
    }
    let (l, r) = cfg.geometry.as_two_layer()?;
    let eigs = find_eigenvalues2(cfg.k, &cfg.geometry, &cfg.region.expect("validated"), &EigsOptions::default())?;
    let mut rows = Vec::new();
    for c in &eigs {
        let st = TwoLayerState::new(cfg.k, l, r, c.omega0)?;
        let mut row = Vec::new();
        row.extend(cx(c.omega0));
        row.extend(cx(simplicity_expression2(cfg.k, st.vm, st.wm, st.wp)));
        row.push(c.algebraically_simple.to_string());
        row.push(c.isolation_radius.map(f).unwrap_or_default());
        row.push(c.in_n_k.to_string());
        rows.push(row);
    }
    out.table(
        "simplicity.csv",
        "",
        &["omega_re", "omega_im", "simplicity_re", "simplicity_im", "algebraically_simple", "isolation_radius", "in_n_k"],
        rows,
    )
}

fn setup(cfg: &RunConfig) -> Result<ExpansionSetup> {
    let w0 = select_omega0(cfg)?;
    ExpansionSetup::new(cfg.k, &cfg.geometry, w0, grid(cfg))
}

fn scalar_rows(items: &[(&str, C64)]) -> Vec<Vec<String>> {
    items
        .iter()
        .map(|(n, z)| {
            let [a, b] = cx(*z);
            vec![n.to_string(), a, b]
        })
        .collect()
}

fn asymptotics_task(out: &mut Output, cfg: &RunConfig) -> Result<()> {
    let su = setup(cfg)?;
    let w0 = su.data.omega0;
    let (w0h, nuh) = discrete_expansion_reference(&su.ctx, w0, su.nu_grid.nu, &su.phi0_grid, NU_REF_EPS)?;
    let re = |x: f64| C64::new(x, 0.0);
    let rows = scalar_rows(&[
        ("omega0", w0),
        ("nu_exact", su.nu_exact.nu),
        ("nu_grid", su.nu_grid.nu),
        ("omega0_h", w0h),
        ("nu_h", nuh),
        ("phi_multiplier", su.phi.s),
        ("phi_relative_residual", re(su.phi.relative_residual)),
        ("phi_orthogonality", su.phi.orthogonality),
        ("nu_tail_bound", re(su.nu_exact.tail_bound)),
    ]);
    out.table("asymptotics.csv", "", &["quantity", "re", "im"], rows)?;
    out.profile("phi0_profile.csv", "", &su.phi0_grid)?;
    out.profile("phi_profile.csv", "", &su.data.phi)
}

fn branch_rows(b: &crate::fd::BifurcationBranch) -> Vec<Vec<String>> {
    b.points
        .iter()
        .map(|p| {
            vec![
                f(p.epsilon),
                f(p.omega.re),
                f(p.omega.im),
                f(p.residual_norm),
                p.newton_iters.to_string(),
                f(p.pt_defect),
                f(p.divergence_jump),
            ]
        })
        .collect()
}

fn bifurcate(out: &mut Output, cfg: &RunConfig) -> Result<Option<String>> {
    let cc = cfg.continuation_or_default();
    let su = setup(cfg)?;
    let w0 = su.data.omega0;
    let schedule = cc.schedule()?;
    let branch = continuation(&schedule, &su.ctx, &su.data, &su.phi0_grid, &cc.options())?;
    let g = grid(cfg);
    let extra = format!("; L={}; N={}", f(g.l), g.n);
    out.table(
        "branch.csv",
        &extra,
        &["epsilon", "omega_re", "omega_im", "residual", "iters", "pt_defect", "divergence_jump"],
        branch_rows(&branch),
    )?;
    let (w0h, nuh) = discrete_expansion_reference(&su.ctx, w0, su.nu_grid.nu, &su.phi0_grid, NU_REF_EPS)?;
    let mut summary = vec![
        ("omega0", w0),
        ("nu_exact", su.nu_exact.nu),
        ("nu_grid", su.nu_grid.nu),
        ("omega0_h", w0h),
        ("nu_h", nuh),
    ];
    if let Ok(s) = estimate_sigma(&branch, w0h, nuh) {
        summary.push(("sigma", s.sigma));
    }
    let pts: Vec<(f64, C64)> = branch.points.iter().map(|p| (p.epsilon, p.omega)).collect();
    if let Ok(s) = convergence_slope(&pts, w0h, nuh) {
        summary.push(("slope", C64::new(s, 0.0)));
    }
    out.table("summary.csv", &extra, &["quantity", "re", "im"], scalar_rows(&summary))?;
    if cc.profiles {
        for (i, st) in branch.states.iter().enumerate() {
            let u = state_field(&su.ctx, st)?;
            out.profile(&format!("profile_{i:04}.csv"), &format!("; eps={}", f(st.epsilon)), &u)?;
        }
    }
    Ok(branch.failure.map(|fl| format!("branch truncated at eps = {}: {}", fl.epsilon, fl.message)))
}

fn profile(out: &mut Output, cfg: &RunConfig) -> Result<Option<String>> {
    let p = cfg.profile.clone().unwrap_or_default();
    let su = setup(cfg)?;
    let Some(eps) = p.eps.filter(|_| !p.linear) else {
        out.profile("profile_linear.csv", "", &su.phi0_grid)?;
        return Ok(None);
    };
    let cc = cfg.continuation_or_default();
    let schedule = if eps <= cc.eps_min {
        vec![eps]
    } else {
        geometric_schedule(cc.eps_min, eps, cc.steps)?
    };
    let branch = continuation(&schedule, &su.ctx, &su.data, &su.phi0_grid, &cc.options())?;
    if let Some(fl) = branch.failure {
        return Err(Error::Rejected(format!(
            "could not reach eps = {eps}: stopped at {} ({})",
            fl.epsilon, fl.message
        )));
    }
    let st = branch.states.last().expect("non-empty schedule");
    let u = state_field(&su.ctx, st)?;
    out.profile(
        "profile_eps.csv",
        &format!("; eps={}; omega_re={}; omega_im={}", f(eps), f(st.omega().re), f(st.omega().im)),
        &u,
    )?;
    Ok(None)
}

/// Validates the config, runs its task and writes the artifacts.
pub fn run(cfg: &RunConfig) -> std::result::Result<RunReport, CliError> {
    cfg.validate().map_err(|e| from_error(cfg.task, e))?;
    let hash = cfg.hash().map_err(|e| from_error(cfg.task, e))?;
    let mut out = Output::new(cfg, &hash);
    let r = match cfg.task {
        Task::Eigs2 => eigs2(&mut out, cfg).map(|_| None),
        Task::Eigs3 => eigs3(&mut out, cfg).map(|_| None),
        Task::WidthScan => width_scan_task(&mut out, cfg).map(|_| None),
        Task::Simplicity => simplicity(&mut out, cfg).map(|_| None),
        Task::Asymptotics => asymptotics_task(&mut out, cfg).map(|_| None),
        Task::Bifurcate => bifurcate(&mut out, cfg),
        Task::Profile => profile(&mut out, cfg),
    };
    let truncated = r.map_err(|e| from_error(cfg.task, e))?;
    let files = out
        .write(&hash)
        .map_err(|e| CliError::Numerical(format!("writing {}: {e}", cfg.output_dir.display())))?;
    Ok(RunReport { files, truncated })
}

fn load(path: &Path, out: &Option<PathBuf>, task: Option<Task>) -> std::result::Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path).map_err(|e| CliError::Config(e.to_string().trim_start_matches("config error: ").to_string()))?;
    if let Some(t) = task {
        cfg.task = t;
    }
    if let Some(o) = out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

fn apply_grid(cfg: &mut RunConfig, g: &GridArgs) -> std::result::Result<(), CliError> {
    if g.l.is_none() && g.n.is_none() {
        return Ok(());
    }
    let base = cfg.grid;
    match (g.l.or(base.map(|b| b.l)), g.n.or(base.map(|b| b.n))) {
        (Some(l), Some(n)) => {
            cfg.grid = Some(Grid1D { l, n });
            Ok(())
        }
        _ => Err(CliError::Config("grid: --L and --N are both needed when the config has no grid".into())),
    }
}

fn apply_continuation(cfg: &mut RunConfig, a: &BifurcateArgs) {
    let mut c: ContinuationConfig = cfg.continuation_or_default();
    if let Some(v) = a.eps_min {
        c.eps_min = v;
    }
    if let Some(v) = a.eps_max {
        c.eps_max = v;
    }
    if let Some(v) = a.steps {
        c.steps = v;
    }
    if let Some(v) = a.tol {
        c.tol = v;
    }
    if let Some(v) = a.max_iters {
        c.max_iters = v;
    }
    if let Some(v) = a.predictor_order {
        c.predictor_order = v;
    }
    c.strict_paper_continuation |= a.strict_paper_continuation;
    c.profiles |= a.profiles;
    cfg.continuation = Some(c);
}

/// Builds the effective config a command line describes.
pub fn resolve(cli: &Cli) -> std::result::Result<RunConfig, CliError> {
    Ok(match &cli.command {
        Command::Run { config, out } => load(config, out, None)?,
        Command::Eigs2(c) => load(&c.config, &c.out, Some(Task::Eigs2))?,
        Command::Eigs3(c) => load(&c.config, &c.out, Some(Task::Eigs3))?,
        Command::WidthScan(c) => load(&c.config, &c.out, Some(Task::WidthScan))?,
        Command::Simplicity(c) => load(&c.config, &c.out, Some(Task::Simplicity))?,
        Command::Asymptotics(a) => {
            let mut cfg = load(&a.common.config, &a.common.out, Some(Task::Asymptotics))?;
            apply_grid(&mut cfg, &a.grid)?;
            cfg
        }
        Command::Bifurcate(a) => {
            let mut cfg = load(&a.common.config, &a.common.out, Some(Task::Bifurcate))?;
            apply_grid(&mut cfg, &a.grid)?;
            apply_continuation(&mut cfg, a);
            cfg
        }
        Command::Profile(a) => {
            let mut cfg = load(&a.common.config, &a.common.out, Some(Task::Profile))?;
            apply_grid(&mut cfg, &a.grid)?;
            if a.linear || a.eps.is_some() {
                cfg.profile = Some(ProfileConfig {
                    linear: a.linear,
                    eps: a.eps,
                });
            }
            cfg
        }
    })
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = resolve(&cli).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(rep) => {
            for p in &rep.files {
                println!("{}", p.display());
            }
            match rep.truncated {
                Some(m) => {
                    eprintln!("warning: {m}");
                    EXIT_TRUNCATED
                }
                None => EXIT_OK,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
