//! `spectra`: spectra, energies, incidences and theorem sweeps over F_p.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error.
//! All stochastic paths take an explicit `--seed` (default 0); identical
//! flags and seeds produce byte-identical primary output.

use std::fs;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spectra_core::energy::{self, Method};
use spectra_core::error::{Error, Result};
use spectra_core::field::PrimeField;
use spectra_core::fourier::{self, FourierTable};
use spectra_core::harness::sweep::{self, SweepConfig};
use spectra_core::harness::{self, fmt12, SpectrumRule, TheoremReport};
use spectra_core::incidence::{self, IncidenceScene, SceneDim};
use spectra_core::selftest;
use spectra_core::set::{self, FpSet};

#[derive(Parser)]
#[command(
    name = "spectra",
    version,
    about = "Spectra, energies, incidences and verification sweeps over prime fields",
    after_help = "File formats (set files, scene files, sweep configs, CSV/JSONL schemas) \
                  are documented in FORMATS.md."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fourier transform of a set indicator and its large spectrum
    Spectrum(SpectrumArgs),
    /// Additive/multiplicative energies, sigma, balanced energy, C4 sums
    Energy(EnergyArgs),
    /// Multiplicative subgroups and their cosets
    Subgroup(SubgroupArgs),
    /// Incidence counts and incidence-bound checks on scene files
    Incidence(IncidenceArgs),
    /// Verify one inequality instance and emit a report row
    Verify(VerifyArgs),
    /// Run a verification sweep from a config file
    Sweep(SweepArgs),
    /// Run the exact-identity and oracle-equivalence suites
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum DftMethod {
    Fast,
    Direct,
}

#[derive(Args)]
struct SetInput {
    /// Inline set: comma-separated elements, e.g. 1,2,4
    #[arg(long, value_delimiter = ',')]
    set: Option<Vec<u64>>,
    /// Set file (newline-delimited decimals with a p=<p> header)
    #[arg(long, conflicts_with = "set")]
    set_file: Option<PathBuf>,
}

impl SetInput {
    fn load(&self, p: u64) -> Result<FpSet> {
        match (&self.set, &self.set_file) {
            (Some(v), _) => FpSet::from_elements(p, v.iter().copied()),
            (None, Some(path)) => {
                let file = fs::File::open(path)?;
                let s = FpSet::read_from(&mut BufReader::new(file))?;
                if s.modulus() != p {
                    return Err(Error::MismatchedModulus(s.modulus(), p));
                }
                Ok(s)
            }
            (None, None) => Err(Error::Parse("provide --set or --set-file".into())),
        }
    }

    fn is_given(&self) -> bool {
        self.set.is_some() || self.set_file.is_some()
    }
}

#[derive(Args)]
struct SpectrumArgs {
    /// Odd prime modulus
    #[arg(long)]
    p: u64,
    #[command(flatten)]
    input: SetInput,
    /// Threshold parameter in (0, 1]
    #[arg(long)]
    eps: f64,
    #[arg(long, value_enum, default_value = "fast")]
    method: DftMethod,
    /// Write the full table as CSV (xi,re,im,mag2)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnergyKind {
    Add,
    Mult,
    Sigma,
    Balanced,
    C4,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Convolution,
    Fourier,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Brute => Method::Brute,
            MethodArg::Convolution => Method::Convolution,
            MethodArg::Fourier => Method::Fourier,
        }
    }
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long)]
    p: u64,
    #[command(flatten)]
    input: SetInput,
    /// Second set for E+(A,B); defaults to A
    #[arg(long, value_delimiter = ',')]
    set_b: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    kind: EnergyKind,
    /// Moment order for --kind mult (1..=4)
    #[arg(long, default_value = "2")]
    k: u32,
    #[arg(long, value_enum, default_value = "convolution")]
    method: MethodArg,
    /// Write the underlying representation function as CSV (index,count)
    #[arg(long)]
    rep_out: Option<PathBuf>,
}

#[derive(Args)]
struct SubgroupArgs {
    #[arg(long)]
    p: u64,
    /// Subgroup order; must divide p - 1
    #[arg(long)]
    d: u64,
    /// Multiply the subgroup by this nonzero element
    #[arg(long)]
    coset: Option<u64>,
    /// Write the set in the set-file format
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum IncidenceCheck {
    Vinh,
    Planes,
    Lines,
}

#[derive(Args)]
struct IncidenceArgs {
    /// Scene file (header q=<q> dim=<2|3>, then P/S lines)
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, value_enum)]
    check: IncidenceCheck,
    /// Swap point/plane roles in the planes check
    #[arg(long)]
    dual: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremArg {
    Main,
    E4,
    Sigma,
    ZeroSum,
    AaPlusAa,
    Tightness,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Interval,
    Random,
    Subgroup,
    Explicit,
}

#[derive(Clone, Copy, ValueEnum)]
enum RRule {
    Full,
    Coset,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    theorem: TheoremArg,
    #[arg(long)]
    p: u64,
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Subgroup order (family subgroup); defaults to the battery rule
    #[arg(long)]
    d: Option<u64>,
    /// Interval length (family interval); defaults to the battery rule
    #[arg(long)]
    n: Option<u64>,
    /// Sample size (family random); defaults to the battery rule
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, default_value = "0")]
    seed: u64,
    #[arg(long, default_value = "0.5")]
    eps: f64,
    #[command(flatten)]
    input: SetInput,
    #[arg(long, value_enum, default_value = "full")]
    r_rule: RRule,
    /// Explicit R for theorems main/sigma (overrides --r-rule)
    #[arg(long, value_delimiter = ',')]
    r_set: Option<Vec<u64>>,
    /// Write the report row as CSV
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep config file; omitted = the built-in default battery
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Output base path; writes <base>.csv and <base>.jsonl
    #[arg(long)]
    out: Option<PathBuf>,
    /// Baseline JSON path for ratio non-regression
    #[arg(long)]
    baseline: Option<PathBuf>,
    /// Write (or overwrite) the baseline from this run instead of comparing
    #[arg(long)]
    bless: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Spectrum(args) => cmd_spectrum(args),
        Cmd::Energy(args) => cmd_energy(args),
        Cmd::Subgroup(args) => cmd_subgroup(args),
        Cmd::Incidence(args) => cmd_incidence(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Selftest => cmd_selftest(),
    }
}

fn table_csv(table: &FourierTable) -> String {
    let mut out = String::from("xi,re,im,mag2\n");
    for (xi, (v, m2)) in table.values().iter().zip(table.mag2()).enumerate() {
        out.push_str(&format!(
            "{xi},{},{},{}\n",
            fmt12(v.re),
            fmt12(v.im),
            fmt12(*m2)
        ));
    }
    out
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<ExitCode> {
    let field = PrimeField::new(args.p)?;
    let a = args.input.load(args.p)?;
    let table = match args.method {
        DftMethod::Fast => fourier::dft_fast(&field, &a),
        DftMethod::Direct => fourier::dft_direct(&field, &a),
    };
    let spec = fourier::spectrum(&table, args.eps)?;
    println!(
        "p={} |A|={} eps={} threshold={}",
        args.p,
        a.len(),
        fmt12(args.eps),
        fmt12(spec.threshold)
    );
    println!("spectrum size: {}", spec.len());
    for (r, m) in spec.elements.iter().zip(&spec.magnitudes) {
        println!("{r} {}", fmt12(*m));
    }
    if let Some(path) = args.out {
        fs::write(path, table_csv(&table))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_energy(args: EnergyArgs) -> Result<ExitCode> {
    let field = PrimeField::new(args.p)?;
    let a = args.input.load(args.p)?;
    let b = match &args.set_b {
        Some(v) => FpSet::from_elements(args.p, v.iter().copied())?,
        None => a.clone(),
    };
    let mut rep_csv: Option<String> = None;
    match args.kind {
        EnergyKind::Add => {
            let e = energy::additive_energy(&field, &a, &b, args.method.into())?;
            println!("E+(A,B) = {} (method: {})", e.value, e.method.as_str());
            if args.rep_out.is_some() {
                let rep = energy::rep_add(&field, &a, &b, energy::Sign::Plus)?;
                rep_csv = Some(rep_function_csv(&rep));
            }
        }
        EnergyKind::Mult => {
            let e = energy::mult_energy_k(&field, &a, args.k)?;
            println!(
                "Ex_{}(A) = {} (method: {})",
                args.k,
                e.value,
                e.method.as_str()
            );
            if args.rep_out.is_some() {
                let rep = energy::rep_mul(&field, &a, &a, energy::MulOp::Ratio)?;
                rep_csv = Some(rep_function_csv(&rep));
            }
        }
        EnergyKind::Sigma => {
            let e = energy::sigma_mult(&field, &a)?;
            println!("sigma_x(A) = {}", e.value);
        }
        EnergyKind::Balanced => {
            let bal = energy::balanced_additive_energy(&field, &a)?;
            println!("E+(f_A) via fourier = {}", fmt12(bal.via_fourier));
            println!("E+(f_A) via counts  = {}", fmt12(bal.via_counts));
        }
        EnergyKind::C4 => {
            let agg = energy::c4_aggregates(&field, &a)?;
            println!("sum C4   = {}", agg.sum);
            println!("sum C4^2 = {}", agg.sum_sq);
        }
    }
    if let Some(path) = args.rep_out {
        match rep_csv {
            Some(csv) => fs::write(path, csv)?,
            None => {
                return Err(Error::Parse(
                    "--rep-out applies to --kind add or mult".into(),
                ))
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn rep_function_csv(rep: &energy::RepFunction) -> String {
    let mut out = String::from("index,count\n");
    for (i, &c) in rep.counts().iter().enumerate() {
        out.push_str(&format!("{i},{c}\n"));
    }
    out
}

fn cmd_subgroup(args: SubgroupArgs) -> Result<ExitCode> {
    let field = PrimeField::new(args.p)?;
    let h = set::mult_subgroup(&field, args.d)?;
    let s = match args.coset {
        Some(lam) => set::coset(&field, &h, lam)?,
        None => h,
    };
    println!(
        "p={} order={} elements: {}",
        args.p,
        s.len(),
        s.elements()
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    if let Some(path) = args.out {
        let mut buf = Vec::new();
        s.write_to(&mut buf)?;
        fs::write(path, buf)?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Splits a 2D scene whose points form a Cartesian grid back into A and B.
fn grid_components(scene: &IncidenceScene) -> Result<(FpSet, FpSet)> {
    let q = scene.q();
    let mut xs = std::collections::BTreeSet::new();
    let mut ys = std::collections::BTreeSet::new();
    for p in scene.points() {
        xs.insert(p[0]);
        ys.insert(p[1]);
    }
    if xs.len() * ys.len() != scene.num_points() {
        return Err(Error::NotAGrid);
    }
    let a = FpSet::from_elements(q, xs)?;
    let b = FpSet::from_elements(q, ys)?;
    Ok((a, b))
}

fn cmd_incidence(args: IncidenceArgs) -> Result<ExitCode> {
    let file = fs::File::open(&args.scene)?;
    let scene = IncidenceScene::read_from(&mut BufReader::new(file))?;
    println!(
        "q={} points={} surfaces={}",
        scene.q(),
        scene.num_points(),
        scene.num_surfaces()
    );
    match args.check {
        IncidenceCheck::Vinh => {
            let rep = incidence::check_vinh(&scene)?;
            println!(
                "|sum I a b| = {} <= q||a||||b|| = {} : {}",
                fmt12(rep.lhs),
                fmt12(rep.rhs),
                if rep.pass { "pass" } else { "FAIL" }
            );
            if !rep.pass {
                return Err(Error::Parse("design bound violated".into()));
            }
        }
        IncidenceCheck::Planes => {
            let rep = incidence::point_plane_ratio(&scene, args.dual)?;
            print_incidence_report(&rep);
        }
        IncidenceCheck::Lines => {
            if scene.dim() != SceneDim::Two {
                return Err(Error::Parse("lines check needs a dim=2 scene".into()));
            }
            let (a, b) = grid_components(&scene)?;
            let lines: Vec<[u64; 3]> = scene
                .surfaces()
                .iter()
                .map(|s| [s[0], s[1], s[3]])
                .collect();
            let rep = incidence::line_point_ratio(scene.q(), &a, &b, &lines)?;
            print_incidence_report(&rep);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_incidence_report(rep: &incidence::IncidenceReport) {
    println!("incidences = {}", fmt12(rep.incidences));
    println!("expected   = {}", fmt12(rep.expected));
    println!("excess     = {}", fmt12(rep.excess));
    println!("bound      = {}", fmt12(rep.bound));
    println!("ratio      = {}", fmt12(rep.ratio));
    println!("k          = {}", rep.k);
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let field = PrimeField::new(args.p)?;
    let p = args.p;
    let (a, family_name): (FpSet, &str) = match args.family {
        FamilyArg::Interval => {
            let n = args.n.unwrap_or_else(|| sweep::family_target_size(p));
            (set::interval(&field, n)?, "interval")
        }
        FamilyArg::Random => {
            let size = args
                .size
                .unwrap_or_else(|| sweep::family_target_size(p) as usize);
            (set::random_set(&field, size, args.seed, true)?, "random")
        }
        FamilyArg::Subgroup => {
            let d = args.d.unwrap_or_else(|| sweep::subgroup_order_for(p));
            (set::mult_subgroup(&field, d)?, "subgroup")
        }
        FamilyArg::Explicit => {
            if !args.input.is_given() {
                return Err(Error::Parse(
                    "family explicit needs --set or --set-file".into(),
                ));
            }
            (args.input.load(p)?, "explicit")
        }
    };
    let explicit_r = args
        .r_set
        .as_ref()
        .map(|v| FpSet::from_elements(p, v.iter().copied()))
        .transpose()?;
    let rule = match (&explicit_r, args.r_rule) {
        (Some(r), _) => SpectrumRule::Explicit(r),
        (None, RRule::Full) => SpectrumRule::FullSpectrum,
        (None, RRule::Coset) => SpectrumRule::CosetSearch,
    };
    let mut rep: TheoremReport = match args.theorem {
        TheoremArg::Main => harness::verify_main(&field, &a, args.eps, rule)?,
        TheoremArg::E4 => harness::verify_e4(&field, &a, args.eps)?,
        TheoremArg::Sigma => harness::verify_sigma(&field, &a, args.eps, rule)?,
        TheoremArg::ZeroSum => harness::verify_zero_sum(&field, &a)?,
        TheoremArg::AaPlusAa => harness::verify_aa_plus_aa(&field, &a)?,
        TheoremArg::Tightness => {
            let d = args.d.unwrap_or_else(|| sweep::subgroup_order_for(p));
            harness::tightness_subgroup(&field, d, args.eps)?
        }
    };
    rep.family = family_name.to_string();
    rep.seed = args.seed;
    println!(
        "theorem={} family={} p={} |A|={} eps={} |R|={} precondition_ok={}",
        rep.theorem.as_str(),
        rep.family,
        rep.p,
        rep.set_size,
        fmt12(rep.eps),
        rep.r_size,
        rep.precondition_ok
    );
    println!("lhs   = {}", fmt12(rep.lhs));
    if let Some(exact) = rep.lhs_exact {
        println!("lhs(exact) = {exact}");
    }
    println!("rhs   = {}", fmt12(rep.rhs));
    println!("ratio = {}", fmt12(rep.ratio));
    println!("notes = {}", rep.notes);
    if let Some(path) = args.out {
        let mut csv = String::from(TheoremReport::csv_header());
        csv.push('\n');
        csv.push_str(&rep.csv_line());
        csv.push('\n');
        fs::write(path, csv)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode> {
    let mut cfg = match &args.config {
        Some(path) => SweepConfig::parse(&fs::read_to_string(path)?)?,
        None => SweepConfig::default(),
    };
    if let Some(out) = &args.out {
        cfg.output = Some(out.display().to_string());
    }
    if let Some(base) = &args.baseline {
        cfg.baseline = Some(base.display().to_string());
    }
    let reports = match args.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Parse(format!("thread pool: {e}")))?
            .install(|| sweep::run_sweep(&cfg)),
        None => sweep::run_sweep(&cfg),
    }?;
    println!("rows: {}", reports.len());
    let ratios = sweep::aggregate_max_ratios(&reports);
    for (key, v) in &ratios {
        println!("max_ratio {key} = {}", fmt12(*v));
    }
    if let Some(base) = &cfg.output {
        if let Some(dir) = PathBuf::from(base).parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        fs::write(format!("{base}.csv"), sweep::reports_to_csv(&reports))?;
        fs::write(format!("{base}.jsonl"), sweep::reports_to_jsonl(&reports))?;
        println!("wrote {base}.csv and {base}.jsonl");
    }
    if let Some(path) = &cfg.baseline {
        if args.bless {
            if let Some(bad) = ratios.iter().find(|(_, v)| !v.is_finite()) {
                return Err(Error::Parse(format!(
                    "cannot bless: ratio for {} is not finite",
                    bad.0
                )));
            }
            fs::write(path, sweep::baseline_to_json(&ratios))?;
            println!("blessed baseline written to {path}");
        } else {
            let baseline = sweep::baseline_from_json(&fs::read_to_string(path)?)?;
            let checks = sweep::compare_to_baseline(&ratios, &baseline);
            let mut failed = false;
            for c in &checks {
                println!(
                    "[{}] {} current={} baseline={}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.key,
                    fmt12(c.current),
                    fmt12(c.baseline)
                );
                failed |= !c.pass;
            }
            if failed {
                return Err(Error::Parse("ratio regression against baseline".into()));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_selftest() -> Result<ExitCode> {
    let outcomes = selftest::run_all();
    let mut failed = false;
    for c in &outcomes {
        println!(
            "[{}] {}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        failed |= !c.pass;
    }
    if failed {
        return Err(Error::Parse("selftest failures".into()));
    }
    println!("all {} checks passed", outcomes.len());
    Ok(ExitCode::SUCCESS)
}
