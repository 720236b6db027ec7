//! Command-line surface for the library: exact Gram/Weingarten data,
//! character moments, limit laws, free convolutions, graph spectra, the
//! circle-measure catalog, matrix-model samplers, and the full
//! verification suite.
//!
//! Output is JSON on stdout (rationals as `"p/q"` strings; floats only in
//! Monte-Carlo reports, always with a standard error); `--pretty` switches
//! to human-readable tables.  Scalar results print bare.  Exit codes:
//! 0 success, 1 verification mismatch, 2 invalid input, 3 resource cap.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use freespec::ade::{
    build_graph, circle_moment, poincare_coeffs, theorem_measure, verify_family, CircleMeasure,
    GraphFamily, MomentValue,
};
use freespec::freeprob::{
    free_add_conv, free_mult_conv, Law, MomentSequence, StarWord,
};
use freespec::graphs::{
    lex_free_product, loop_moments, vertex_spectral_measure, RootedColoredGraph,
};
use freespec::models::{
    pauli_character_mc, sn_fixed_point_moments, su2_mc_moment, ModulusMonomial,
};
use freespec::rational::{format_rat, Rat};
use freespec::verify::{run_all, VerifyCtx, DEFAULT_SEED};
use freespec::weingarten::{
    asymptotic_semicircle_report_cached, gram_matrix, integrate_monomial, matrix_json,
    truncated_character_moment_cached, weingarten_matrix_cached, MonomialSpec, WeingartenCache,
};
use freespec::{Error, Result};
use num_traits::Zero;

#[derive(Parser)]
#[command(
    name = "freespec",
    about = "Exact Gram/Weingarten calculus, free convolutions, graph spectra, \
             and circle-measure verification",
    version
)]
struct Cli {
    /// Human-readable tables instead of JSON
    #[arg(long, global = true)]
    pretty: bool,

    /// Seed for every Monte-Carlo subcommand
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Cap on worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Cache directory for Weingarten matrices
    /// (default: $FREESPEC_CACHE or ./.cache)
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact Gram matrix of the noncrossing pairings
    Gram {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: u64,
    },
    /// Exact Weingarten (inverse Gram) matrix
    Weingarten {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: u64,
    },
    /// Integrate an entry monomial, e.g. --monomial "1,1;1,1"
    Integrate {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        monomial: String,
    },
    /// Even moment of the truncated character: order 2k, size n, truncation s
    Truncated {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        s: u64,
    },
    /// Scaled truncated moments against the Catalan limit along a list of n
    #[command(name = "semicircle-report")]
    SemicircleReport {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: u64,
        /// Comma-separated sizes, e.g. 8,16,32,64
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
    },
    /// Moments (or star moments) of a closed-form law
    Law {
        #[arg(long, value_enum)]
        name: LawName,
        /// Variance for the semicircle law
        #[arg(long)]
        variance: Option<String>,
        /// Rate for the free Poisson law
        #[arg(long)]
        rate: Option<String>,
        /// Moment horizon
        #[arg(long = "K")]
        horizon: Option<usize>,
        /// Star word such as "cc*cc*" (star-only laws)
        #[arg(long)]
        word: Option<String>,
    },
    /// Free convolution of two moment-sequence files
    Freeconv {
        #[command(subcommand)]
        op: ConvOp,
    },
    /// Graph computations on rooted colored graphs
    Graph {
        #[command(subcommand)]
        op: GraphOp,
    },
    /// Circle-measure catalog: closed forms and walk-count verification
    Ade {
        #[command(subcommand)]
        op: AdeOp,
    },
    /// Matrix-model oracles
    Model {
        #[command(subcommand)]
        op: ModelOp,
    },
    /// Verification suites
    Verify {
        #[command(subcommand)]
        op: VerifyOp,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LawName {
    Semicircle,
    #[value(name = "free_poisson", alias = "free-poisson")]
    FreePoisson,
    #[value(name = "haar_unitary", alias = "haar-unitary")]
    HaarUnitary,
    Circular,
}

#[derive(Subcommand)]
enum ConvOp {
    /// Multiplicative free convolution
    Mult(ConvArgs),
    /// Additive free convolution
    Add(ConvArgs),
}

#[derive(Args)]
struct ConvArgs {
    /// First moment-sequence JSON file {"moments": ["p/q", ...]}
    #[arg(long)]
    mu: PathBuf,
    /// Second moment-sequence JSON file
    #[arg(long)]
    nu: PathBuf,
    /// Truncate both inputs to this horizon first
    #[arg(long = "K")]
    horizon: Option<usize>,
}

#[derive(Subcommand)]
enum GraphOp {
    /// Closed-walk counts at the root up to length K
    Loops {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "K", default_value_t = 6)]
        horizon: usize,
    },
    /// Spectral measure of the root vertex (numeric atoms)
    Measure {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Lexicographic free product: a copy of the first graph at each
    /// vertex of the second
    Product {
        /// The graph being copied
        #[arg(long = "in")]
        input: PathBuf,
        /// The frame graph
        #[arg(long = "in2")]
        input2: PathBuf,
    },
}

#[derive(Args)]
struct FamilyArgs {
    /// Family code: A, D, Ainf, Aaff, Aline, Daff, Dinf
    #[arg(long)]
    family: String,
    /// Parameter for the finite and affine families
    #[arg(long)]
    n: Option<u32>,
    /// Truncation radius for the infinite families
    #[arg(long)]
    radius: Option<u32>,
}

#[derive(Subcommand)]
enum AdeOp {
    /// Check walk counts against the closed-form measure up to order 2K
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "K", default_value_t = 6)]
        horizon: usize,
    },
    /// Print the closed-form circle measure of a family
    Measure {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Print the rooted graph of a family
    Graph {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Series coefficients (even walk counts) of a family's graph
    Poincare {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "K", default_value_t = 6)]
        horizon: usize,
    },
}

#[derive(Subcommand)]
enum ModelOp {
    /// Monte-Carlo integral of a squared-modulus monomial over Haar samples
    Su2 {
        /// Entry monomial with every entry an even number of times,
        /// e.g. "1,1;1,1;2,2;2,2"
        #[arg(long)]
        monomial: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Exact fixed-point moments of the full permutation group
    Sn {
        #[arg(long)]
        n: usize,
        #[arg(long = "K", default_value_t = 5)]
        horizon: usize,
    },
    /// Character moments and eigenvalue histogram of the Pauli magic model
    Pauli {
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long = "K", default_value_t = 4)]
        horizon: usize,
        /// Write the eigenvalue histogram to this CSV file
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyOp {
    /// Run every verification suite
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Ignore failure: the pool may already be initialized in tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let cache = match &cli.cache {
        Some(dir) => WeingartenCache::new(dir),
        None => WeingartenCache::from_env(),
    };
    match run(&cli, &cache) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli, cache: &WeingartenCache) -> Result<ExitCode> {
    match &cli.command {
        Command::Gram { k, n } => {
            let g = gram_matrix(*k, *n)?;
            print_matrix(&g, *k, *n, cli.pretty);
        }
        Command::Weingarten { k, n } => {
            let w = weingarten_matrix_cached(*k, *n, cache)?;
            print_matrix(&w, *k, *n, cli.pretty);
        }
        Command::Integrate { n, monomial } => {
            let spec: MonomialSpec = monomial.parse()?;
            println!("{}", format_rat(&integrate_monomial(*n, &spec)?));
        }
        Command::Truncated { k, n, s } => {
            let v = truncated_character_moment_cached(*k, *n, *s, cache)?;
            println!("{}", format_rat(&v));
        }
        Command::SemicircleReport { k, s, n } => {
            let rows = asymptotic_semicircle_report_cached(*k, *s, n, cache)?;
            if cli.pretty {
                println!("{:>8}  {:>16}  {:>16}", "n", "value", "error");
                for row in &rows {
                    println!(
                        "{:>8}  {:>16}  {:>16}",
                        row.n,
                        format_rat(&row.value),
                        format_rat(&row.error)
                    );
                }
            } else {
                let rows: Vec<serde_json::Value> = rows
                    .iter()
                    .map(|r| {
                        serde_json::json!({
                            "n": r.n,
                            "value": format_rat(&r.value),
                            "error": format_rat(&r.error),
                        })
                    })
                    .collect();
                println!("{}", serde_json::json!({ "k": k, "s": s, "rows": rows }));
            }
        }
        Command::Law { name, variance, rate, horizon, word } => {
            run_law(*name, variance.as_deref(), rate.as_deref(), *horizon, word.as_deref(), cli.pretty)?;
        }
        Command::Freeconv { op } => {
            let (args, multiplicative) = match op {
                ConvOp::Mult(a) => (a, true),
                ConvOp::Add(a) => (a, false),
            };
            let mu = load_moments(&args.mu, args.horizon)?;
            let nu = load_moments(&args.nu, args.horizon)?;
            if multiplicative {
                for (label, m) in [("mu", &mu), ("nu", &nu)] {
                    if m.moment(1).is_zero() {
                        eprintln!(
                            "warning: {label} has first moment 0; the multiplicative \
                             convolution is computed formally and may not determine \
                             a distribution"
                        );
                    }
                }
            }
            let out = if multiplicative {
                free_mult_conv(&mu, &nu)?
            } else {
                free_add_conv(&mu, &nu)?
            };
            print_moments(&out, cli.pretty);
        }
        Command::Graph { op } => run_graph(op, cli.pretty)?,
        Command::Ade { op } => return run_ade(op, cli.pretty),
        Command::Model { op } => run_model(op, cli.seed, cli.pretty)?,
        Command::Verify { op: VerifyOp::All } => {
            let ctx = VerifyCtx::new(WeingartenCache::new(cache.dir()), cli.seed);
            let reports = run_all(&ctx)?;
            let mut all_pass = true;
            for report in &reports {
                println!("{report}");
                all_pass &= report.pass();
            }
            if !all_pass {
                eprintln!("verification failed");
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_rat_arg(text: Option<&str>, default: i64, what: &str) -> Result<Rat> {
    match text {
        None => Ok(Rat::from_integer(default.into())),
        Some(t) => freespec::rational::parse_rat(t)
            .map_err(|_| Error::InvalidInput(format!("cannot parse {what} {t:?} as p/q"))),
    }
}

fn run_law(
    name: LawName,
    variance: Option<&str>,
    rate: Option<&str>,
    horizon: Option<usize>,
    word: Option<&str>,
    pretty: bool,
) -> Result<()> {
    let law = match name {
        LawName::Semicircle => Law::Semicircle {
            variance: parse_rat_arg(variance, 1, "variance")?,
        },
        LawName::FreePoisson => Law::FreePoisson {
            rate: parse_rat_arg(rate, 1, "rate")?,
        },
        LawName::HaarUnitary => Law::HaarUnitary,
        LawName::Circular => Law::Circular,
    };
    if let Some(text) = word {
        let word: StarWord = text.parse()?;
        println!("{}", format_rat(&law.star_moment(&word)?));
        return Ok(());
    }
    let horizon = horizon.unwrap_or(6);
    print_moments(&law.moments(horizon)?, pretty);
    Ok(())
}

fn run_graph(op: &GraphOp, pretty: bool) -> Result<()> {
    match op {
        GraphOp::Loops { input, horizon } => {
            let g = RootedColoredGraph::from_json(&std::fs::read_to_string(input)?)?;
            let walks = loop_moments(&g, *horizon);
            if pretty {
                for (k, w) in walks.iter().enumerate() {
                    println!("m_{k} = {w}");
                }
            } else {
                let shown: Vec<String> = walks.iter().map(|w| w.to_string()).collect();
                println!("{}", serde_json::json!({ "moments": shown }));
            }
        }
        GraphOp::Measure { input } => {
            let g = RootedColoredGraph::from_json(&std::fs::read_to_string(input)?)?;
            let measure = vertex_spectral_measure(&g);
            if pretty {
                for a in &measure.atoms {
                    println!("{:>12.6}  {:>12.6}", a.position, a.weight);
                }
            } else {
                let atoms: Vec<serde_json::Value> = measure
                    .atoms
                    .iter()
                    .map(|a| serde_json::json!({ "position": a.position, "weight": a.weight }))
                    .collect();
                println!("{}", serde_json::json!({ "atoms": atoms }));
            }
        }
        GraphOp::Product { input, input2 } => {
            let x = RootedColoredGraph::from_json(&std::fs::read_to_string(input)?)?;
            let y = RootedColoredGraph::from_json(&std::fs::read_to_string(input2)?)?;
            let product = lex_free_product(&x, &y)?;
            println!("{}", product.to_json());
        }
    }
    Ok(())
}

fn family_from_args(args: &FamilyArgs) -> Result<GraphFamily> {
    let need_n = || {
        args.n.ok_or_else(|| {
            Error::InvalidInput(format!("family {} needs --n", args.family))
        })
    };
    let need_radius = || {
        args.radius.ok_or_else(|| {
            Error::InvalidInput(format!("family {} needs --radius", args.family))
        })
    };
    Ok(match args.family.as_str() {
        "A" => GraphFamily::A { n: need_n()? },
        "D" => GraphFamily::D { n: need_n()? },
        "Aaff" => GraphFamily::AAffine { n: need_n()? },
        "Daff" => GraphFamily::DAffine { n: need_n()? },
        "Ainf" => GraphFamily::AInf { radius: need_radius()? },
        "Aline" => GraphFamily::ALine { radius: need_radius()? },
        "Dinf" => GraphFamily::DInf { radius: need_radius()? },
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown family {other:?}; expected A, D, Ainf, Aaff, Aline, Daff, or Dinf"
            )))
        }
    })
}

fn run_ade(op: &AdeOp, pretty: bool) -> Result<ExitCode> {
    match op {
        AdeOp::Verify { family, horizon } => {
            let fam = family_from_args(family)?;
            let report = verify_family(&fam, *horizon)?;
            println!("{report}");
            if !report.pass() {
                eprintln!("verification failed");
                return Ok(ExitCode::from(1));
            }
        }
        AdeOp::Measure { family } => {
            let fam = family_from_args(family)?;
            let measure = theorem_measure(&fam)?;
            if pretty {
                print_measure(&measure);
            } else {
                println!("{}", measure.to_json());
            }
        }
        AdeOp::Graph { family } => {
            let fam = family_from_args(family)?;
            println!("{}", build_graph(&fam)?.to_json());
        }
        AdeOp::Poincare { family, horizon } => {
            let fam = family_from_args(family)?;
            let coeffs = poincare_coeffs(&build_graph(&fam)?, *horizon);
            if pretty {
                for (k, c) in coeffs.iter().enumerate() {
                    println!("f_{k} = {c}");
                }
            } else {
                let shown: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                println!("{}", serde_json::json!({ "coefficients": shown }));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_measure(measure: &CircleMeasure) {
    for atom in measure.atoms() {
        let weight = if measure.alpha_atoms() {
            format!("{} * alpha", format_rat(&atom.weight))
        } else {
            format_rat(&atom.weight)
        };
        println!("atom at angle {} pi: weight {}", format_rat(&atom.angle), weight);
    }
    match measure.continuous() {
        freespec::ade::Continuous::None => {}
        freespec::ade::Continuous::Uniform(c) => {
            println!("continuous: uniform, coefficient {}", format_rat(c));
        }
        freespec::ade::Continuous::AlphaUniform(c) => {
            println!("continuous: alpha-uniform, coefficient {}", format_rat(c));
        }
    }
    for k in 0..=4usize {
        match circle_moment(measure, k) {
            Ok(MomentValue::Exact(v)) => println!("m_{} = {}", 2 * k, format_rat(&v)),
            Ok(MomentValue::Raw(x)) => println!("m_{} = {x} (numeric)", 2 * k),
            Err(_) => {}
        }
    }
}

fn run_model(op: &ModelOp, seed: u64, pretty: bool) -> Result<()> {
    match op {
        ModelOp::Su2 { monomial, samples } => {
            let spec: MonomialSpec = monomial.parse()?;
            let m = ModulusMonomial::from_monomial_spec(&spec)?;
            let est = su2_mc_moment(&m, *samples, seed)?;
            if pretty {
                println!("{:.6} +- {:.2e} over {} samples", est.mean, est.std_error, est.samples);
            } else {
                println!("{}", serde_json::to_string(&est).expect("estimate serializes"));
            }
        }
        ModelOp::Sn { n, horizon } => {
            print_moments(&sn_fixed_point_moments(*n, *horizon)?, pretty);
        }
        ModelOp::Pauli { samples, horizon, histogram } => {
            let mc = pauli_character_mc(*samples, *horizon, seed)?;
            if pretty {
                for (k, est) in mc.moments.iter().enumerate() {
                    println!("m_{k} = {:.6} +- {:.2e}", est.mean, est.std_error);
                }
            } else {
                println!("{}", mc.moments_json());
            }
            if let Some(path) = histogram {
                std::fs::write(path, mc.histogram.to_csv())?;
            }
        }
    }
    Ok(())
}

fn load_moments(path: &PathBuf, horizon: Option<usize>) -> Result<MomentSequence> {
    let m = MomentSequence::from_json(&std::fs::read_to_string(path)?)?;
    match horizon {
        Some(k) if k < m.horizon() => {
            MomentSequence::new(m.moments()[..k].to_vec())
        }
        _ => Ok(m),
    }
}

fn print_moments(m: &MomentSequence, pretty: bool) {
    if pretty {
        for (i, v) in m.moments().iter().enumerate() {
            println!("m_{} = {}", i + 1, format_rat(v));
        }
    } else {
        println!("{}", m.to_json());
    }
}

fn print_matrix(m: &freespec::linalg::RationalMatrix, k: usize, n: u64, pretty: bool) {
    if pretty {
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|j| format_rat(m.at(i, j))).collect();
            println!("{}", row.join("  "));
        }
    } else {
        println!("{}", matrix_json(k, n, m));
    }
}
