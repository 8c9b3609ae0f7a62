use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use fermion_shadows::error::Error;
use fermion_shadows::fgu::shadow_norm_observable;
use fermion_shadows::io::{plan_from_json, plan_to_json, rdm_table, state_from_json, tuple_label, Header, Table};
use fermion_shadows::majorana::MajoranaIndex;
use fermion_shadows::mapping::{Mapping, MappingKind};
use fermion_shadows::nc::{max_nc_shadow_norm_sq, EigenCache, EigenMethod, EigenProvenance, TypeClass};
use fermion_shadows::observables::{hamiltonian_variance_report, ingest_hamiltonian};
use fermion_shadows::pipeline::run_plan;
use fermion_shadows::planner::{coverage_plan, strategy_count, strategy_counts, Ensemble, Strategy};
use fermion_shadows::validate::run_validation;

const EXIT_USAGE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "fermion-shadows", version, about = "Classical-shadow tomography of fermionic RDMs")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "RAYON_NUM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MappingArg {
    Jw,
    Bk,
}

impl From<MappingArg> for MappingKind {
    fn from(m: MappingArg) -> Self {
        match m {
            MappingArg::Jw => MappingKind::JordanWigner,
            MappingArg::Bk => MappingKind::BravyiKitaev,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Fgu,
    Nc,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Fgu => Ensemble::Fgu,
            EnsembleArg::Nc => Ensemble::Nc,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw a randomized plan covering every target at least r times.
    Plan(PlanArgs),
    /// Simulate a plan on a state and estimate its k-RDM.
    Estimate(EstimateArgs),
    /// Settings needed by deterministic strategies.
    Count(CountArgs),
    /// Shadow-norm and single-shot variance report for a Hamiltonian.
    Variance(VarianceArgs),
    /// Run the exhaustive small-system oracle suite.
    Validate {
        /// Restrict to two modes.
        #[arg(long)]
        quick: bool,
    },
    /// Number-conserving channel eigenvalues per type class.
    NcEigen(NcEigenArgs),
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    modes: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "fgu")]
    ensemble: EnsembleArg,
    #[arg(long, value_enum, default_value = "jw")]
    mapping: MappingArg,
    #[arg(long, default_value_t = 50)]
    r: u64,
    #[arg(long)]
    seed: u64,
    /// Plan JSON destination; printed to stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    /// RDM order (defaults to the plan's k).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    shots: usize,
    #[arg(long)]
    seed: u64,
    /// RDM CSV destination (a .json mirror is written next to it).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Optional Majorana estimate table.
    #[arg(long)]
    estimates: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    /// A single strategy; all applicable strategies when absent.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    modes: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VarianceArgs {
    #[arg(long)]
    hamiltonian: PathBuf,
    /// tr(Hρ) without the identity part.
    #[arg(long, allow_hyphen_values = true)]
    expectation: f64,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct NcEigenArgs {
    #[arg(long)]
    modes: usize,
    #[arg(long)]
    degree: usize,
    #[arg(long, value_enum, default_value = "bk")]
    mapping: MappingArg,
    /// Monte Carlo sample count; exact enumeration when absent.
    #[arg(long)]
    samples: Option<u64>,
    /// Required with --samples.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Format(_) | Error::Parse { .. } => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(table: &Table, output: Option<&Path>) -> Result<(), Error> {
    match output {
        Some(p) => table.write(p),
        None => {
            print!("{}", table.to_csv());
            Ok(())
        }
    }
}

fn cmd_plan(a: &PlanArgs) -> Result<(), Error> {
    let mapping = Mapping::new(a.mapping.into(), a.modes)?;
    let plan = coverage_plan(a.modes, a.k, a.ensemble.into(), a.r, a.seed, &mapping)?;
    let text = plan_to_json(&plan)?;
    match &a.output {
        Some(p) => {
            std::fs::write(p, text)?;
            println!(
                "K_{}={} min_coverage={} mean_coverage={:.3} targets={}",
                plan.r,
                plan.k_r(),
                plan.min_coverage(),
                plan.mean_coverage(),
                plan.coverage.len()
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_estimate(a: &EstimateArgs) -> Result<(), Error> {
    let plan = plan_from_json(&read(&a.plan)?)?;
    let state = state_from_json(&read(&a.state)?, plan.mapping)?;
    if state.n != plan.n {
        return Err(Error::ModeMismatch { expected: plan.n, found: state.n });
    }
    let k = a.k.unwrap_or(plan.k);
    let mapping = Mapping::new(plan.mapping, plan.n)?;
    let res = run_plan(&state, &plan.settings, &mapping, k, a.shots, a.seed, EigenMethod::Exact)?;
    let header = Header::new()
        .with("command", "estimate")
        .with("state", a.state.display())
        .with("plan", a.plan.display())
        .with("n", plan.n)
        .with("k", k)
        .with("ensemble", plan.ensemble)
        .with("mapping", plan.mapping)
        .with("settings", plan.settings.len())
        .with("shots_per_setting", a.shots)
        .with("total_shots", res.shots)
        .with("seed", a.seed);
    if let Some(p) = &a.estimates {
        let mut t = Table::new(header.clone(), &["majorana", "degree", "estimate", "covered"]);
        for (mu, e) in &res.estimates {
            t.push(vec![json!(tuple_label(&mu.indices())), json!(mu.degree()), json!(e.mean), json!(e.covered)]);
        }
        t.write(p)?;
    }
    emit(&rdm_table(header, &res.rdm), a.output.as_deref())
}

fn cmd_count(a: &CountArgs) -> Result<(), Error> {
    let rows = match &a.strategy {
        Some(s) => {
            let st: Strategy = s.parse()?;
            vec![(st, strategy_count(st, a.k, a.modes)?)]
        }
        None => strategy_counts(a.k, a.modes)?,
    };
    let header = Header::new().with("command", "count").with("n", a.modes).with("k", a.k);
    let mut t = Table::new(header, &["strategy", "n", "k", "settings"]);
    for (st, c) in rows {
        // u128 exceeds JSON's integer range; counts are emitted as decimal strings when large
        let v = u64::try_from(c).map(|c| json!(c)).unwrap_or_else(|_| json!(c.to_string()));
        t.push(vec![json!(st.name()), json!(a.modes), json!(a.k), v]);
    }
    emit(&t, a.output.as_deref())
}

fn cmd_variance(a: &VarianceArgs) -> Result<(), Error> {
    let h = ingest_hamiltonian(&read(&a.hamiltonian)?, a.modes)?;
    let report = hamiltonian_variance_report(&h, a.expectation)?;
    debug_assert!((report.shadow_norm_sq - shadow_norm_observable(&h)?).abs() <= 1e-9 * report.shadow_norm_sq.max(1.0));
    let header = Header::new()
        .with("command", "variance")
        .with("hamiltonian", a.hamiltonian.display())
        .with("n", h.n)
        .with("terms", h.len())
        .with("identity", h.identity)
        .with("expectation", a.expectation)
        .with("shadow_norm_sq", report.shadow_norm_sq)
        .with("variance", report.variance);
    let mut t = Table::new(header, &["degree", "norm_contribution"]);
    for (d, c) in &report.per_degree {
        t.push(vec![json!(d), json!(c)]);
    }
    t.push(vec![json!("total"), json!(report.shadow_norm_sq)]);
    emit(&t, a.output.as_deref())
}

fn cmd_validate(quick: bool) -> Result<bool, Error> {
    let checks = run_validation(quick)?;
    let mut ok = true;
    for c in &checks {
        println!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    println!("{}/{} checks passed", checks.iter().filter(|c| c.passed).count(), checks.len());
    Ok(ok)
}

fn cmd_nc_eigen(a: &NcEigenArgs) -> Result<(), Error> {
    let method = match (a.samples, a.seed) {
        (None, _) => EigenMethod::Exact,
        (Some(samples), Some(seed)) => EigenMethod::MonteCarlo { samples, seed },
        (Some(_), None) => return Err(Error::InvalidArgument("--samples requires --seed".into())),
    };
    let mapping = Mapping::new(a.mapping.into(), a.modes)?;
    let (worst, lam) = max_nc_shadow_norm_sq(a.modes, a.degree, &mapping, method)?;
    let cache = EigenCache::new(mapping.clone(), method);
    let mut header = Header::new()
        .with("command", "nc-eigen")
        .with("n", a.modes)
        .with("degree", a.degree)
        .with("mapping", mapping.kind())
        .with("max_shadow_norm_sq", 1.0 / lam.value)
        .with("argmax", worst);
    if let (Some(s), Some(seed)) = (a.samples, a.seed) {
        header = header.with("samples", s).with("seed", seed);
    }
    let mut t = Table::new(
        header,
        &["mu", "mapping", "even_only", "odd_only", "both", "lambda", "shadow_norm_sq", "exact", "method", "std_error"],
    );
    // one row per type class when classes are orbits, otherwise every monomial
    let rows: Vec<MajoranaIndex> = if a.modes >= a.degree + 2 {
        TypeClass::all_of_degree(a.modes, a.degree)
            .into_iter()
            .map(|c| c.representative(a.modes))
            .collect::<Result<_, _>>()?
    } else {
        MajoranaIndex::all_of_degree(a.modes, a.degree).collect()
    };
    for mu in rows {
        let c = TypeClass::of(&mu);
        let v = cache.get(&mu)?;
        let se = match v.provenance {
            EigenProvenance::MonteCarlo { std_error, .. } => json!(std_error),
            EigenProvenance::ExactEnumeration { .. } => json!(0.0),
        };
        t.push(vec![
            json!(mu.to_string()),
            json!(mapping.kind().to_string()),
            json!(c.even_only),
            json!(c.odd_only),
            json!(c.both),
            json!(v.value),
            json!(1.0 / v.value),
            json!(v.exact.as_ref().map(|x| x.to_string())),
            json!(v.method_name()),
            se,
        ]);
    }
    emit(&t, a.output.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let result = match &cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Count(a) => cmd_count(a),
        Command::Variance(a) => cmd_variance(a),
        Command::NcEigen(a) => cmd_nc_eigen(a),
        Command::Validate { quick } => match cmd_validate(*quick) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(EXIT_VALIDATION),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
