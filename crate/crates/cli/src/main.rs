//! `nahm`: evaluate Nahm sums, apply the lift and dual operators, verify
//! registry identities, recognize eta quotients and scan for candidates.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error,
//! 3 failed mathematical precondition.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nahm_core::identity::{Identity, Side, VerifyReport};
use nahm_core::nahm::{dual, eval_nahm, lift2to3, Matrix, NahmTriple};
use nahm_core::rational::{fmt_rational, int, lcm_i64, parse_rational};
use nahm_core::registry::{lookup, registry, verify_all, Binding, IdentityEntry};
use nahm_core::search::{recognize_series, scan_vectors, Recognition, SearchConfig};
use nahm_core::{Error, Monomial, QSeries, Rational};

#[derive(Parser)]
#[command(name = "nahm", version, about = "Exact q-series workbench for Nahm sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the expansion of a Nahm sum as `exponent:coefficient` pairs.
    Eval {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long, env = "NAHM_ORDER")]
        order: Option<String>,
        /// Print exponents over a multiple of this denominator.
        #[arg(long)]
        base_scale: Option<i64>,
    },
    /// Lift a rank two triple to rank three.
    Lift {
        #[arg(long)]
        triple: PathBuf,
    },
    /// Apply `(A, B, C) ↦ (A⁻¹, A⁻¹B, ½BᵀA⁻¹B − r/24 − C)`.
    Dual {
        #[arg(long)]
        triple: PathBuf,
    },
    /// Verify one registry entry (all bindings unless `--bind` is given) or an identity file.
    Verify {
        #[arg(long)]
        name: Option<String>,
        #[arg(long, env = "NAHM_ORDER")]
        order: Option<String>,
        /// Parameter binding such as `a=3/2,b=1/2`.
        #[arg(long)]
        bind: Option<String>,
        /// Identity JSON file with `lhs`, `rhs` and an optional `name`.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Monomial added to the right side, e.g. `q^7`.
        #[arg(long, allow_hyphen_values = true)]
        perturb: Option<String>,
    },
    /// Verify every registry entry at every stored binding.
    VerifyAll {
        #[arg(long, env = "NAHM_ORDER")]
        order: Option<String>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Peel a series into product exponents and look for a period.
    Recognize {
        #[command(flatten)]
        source: SeriesSource,
        #[arg(long, default_value_t = 120)]
        window: usize,
        #[arg(long, default_value_t = 60)]
        max_period: usize,
        #[arg(long, default_value_t = 0)]
        tail_skip: usize,
        /// Evaluation order; by default it grows until the window is covered.
        #[arg(long, env = "NAHM_ORDER")]
        order: Option<String>,
    },
    /// Scan rational linear terms for a fixed matrix.
    Search {
        /// JSON file with an `A` entry (a triple file works).
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 4)]
        denominator_bound: i64,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
        range: Option<Vec<String>>,
        #[arg(long, env = "NAHM_ORDER")]
        order: Option<String>,
        #[arg(long, default_value_t = 120)]
        window: usize,
        #[arg(long, default_value_t = 48)]
        max_period: usize,
        #[arg(long, default_value_t = 0)]
        tail_skip: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List registry entries.
    List,
    /// Print a registry identity as JSON.
    Show {
        #[arg(long)]
        name: String,
        #[arg(long)]
        bind: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        perturb: Option<String>,
    },
}

#[derive(Args)]
struct SeriesSource {
    /// Nahm triple JSON file.
    #[arg(long)]
    triple: Option<PathBuf>,
    /// Registry key; pair with `--side`.
    #[arg(long)]
    registry: Option<String>,
    /// Listing in the `eval` output format.
    #[arg(long)]
    series: Option<PathBuf>,
    #[arg(long, default_value = "lhs")]
    side: String,
    #[arg(long)]
    bind: Option<String>,
}

enum Failure {
    Verification,
    Input(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::RankMismatch { .. }
            | Error::NotSymmetric
            | Error::UnknownIdentity(_)
            | Error::UnboundParameter(_)
            | Error::InvalidBinding(_)
            | Error::WindowTooSmall { .. } => Failure::Input(e.to_string()),
            _ => Failure::Math(e.to_string()),
        }
    }
}

type Out = std::result::Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Math(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: Command) -> Out {
    match cmd {
        Command::Eval { triple, order, base_scale } => {
            let t = read_triple(&triple)?;
            let order = parse_order(order.as_deref(), 20)?;
            let f = eval_nahm(&t, &order)?;
            Ok(listing(&f, base_scale.unwrap_or(1))? + "\n")
        }
        Command::Lift { triple } => {
            let t = read_triple(&triple)?;
            let (a, b) = lift2to3(&t.a, &t.b)?;
            Ok(NahmTriple::new(a, b, t.c)?.to_json() + "\n")
        }
        Command::Dual { triple } => Ok(dual(&read_triple(&triple)?)?.to_json() + "\n"),
        Command::Verify { name, order, bind, file, perturb } => {
            let order = order.as_deref().map(parse_rational).transpose()?;
            let perturb = perturb.as_deref().map(str::parse::<Monomial>).transpose()?;
            let reports = match (file, name) {
                (Some(path), name) => {
                    let (fname, id) = Identity::from_json(&read(&path)?)?;
                    let key = name.or(fname).unwrap_or_else(|| stem(&path));
                    let id = maybe_perturb(id, perturb);
                    vec![id.verify(&key, order.as_ref().unwrap_or(&int(120)))]
                }
                (None, Some(name)) => {
                    let entry = lookup(&name)?;
                    let bindings = match bind {
                        Some(b) => vec![Binding::parse(&b)?],
                        None => entry.all_bindings(),
                    };
                    let mut out = Vec::new();
                    for b in bindings {
                        out.push(verify_entry(entry, &b, order.as_ref(), perturb.clone())?);
                    }
                    out
                }
                (None, None) => return Err(Failure::Input("verify needs --name or --file".into())),
            };
            report(&reports)
        }
        Command::VerifyAll { order, jobs } => {
            let order = order.as_deref().map(parse_rational).transpose()?;
            let reports = with_jobs(jobs, || verify_all(order.as_ref()))?;
            let mut text = String::new();
            for r in &reports {
                writeln!(text, "{r}").unwrap();
            }
            let passed = reports.iter().filter(|r| r.passed()).count();
            writeln!(text, "passed {passed}/{}", reports.len()).unwrap();
            print!("{text}");
            if passed == reports.len() {
                Ok(String::new())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Recognize { source, window, max_period, tail_skip, order } => {
            let order = order.as_deref().map(parse_rational).transpose()?;
            let rec = recognize_source(&source, window, max_period, tail_skip, order)?;
            Ok(describe(&rec, max_period) + "\n")
        }
        Command::Search { matrix, denominator_bound, range, order, window, max_period, tail_skip, jobs } => {
            let a = read_matrix(&matrix)?;
            let (lo, hi) = match range {
                Some(r) => (parse_rational(&r[0])?, parse_rational(&r[1])?),
                None => (int(-1), int(1)),
            };
            let order = parse_order(order.as_deref(), 160)?;
            if !order.is_integer() {
                return Err(Failure::Input("search order must be an integer".into()));
            }
            let cfg = SearchConfig {
                denominator_bound,
                lo,
                hi,
                order: order.to_integer().try_into().map_err(|_| Failure::Input("order too large".into()))?,
                window,
                max_period,
                tail_skip,
            };
            let found = with_jobs(jobs, || scan_vectors(&a, &cfg))??;
            let mut text = String::new();
            for c in &found {
                let b: Vec<String> = c.b.iter().map(fmt_rational).collect();
                writeln!(
                    text,
                    "candidate B=({}) period={} window={window} C={}",
                    b.join(","),
                    c.period(),
                    c.recognition.c.as_ref().map(fmt_rational).unwrap_or_else(|| "none".into())
                )
                .unwrap();
            }
            Ok(text)
        }
        Command::List => {
            let mut text = String::new();
            for e in registry() {
                writeln!(text, "{}\tbindings={}\torder={}\t{}", e.name, e.all_bindings().len(), e.default_order, e.anchor)
                    .unwrap();
            }
            Ok(text)
        }
        Command::Show { name, bind, perturb } => {
            let entry = lookup(&name)?;
            let b = pick_binding(entry, bind.as_deref())?;
            let perturb = perturb.as_deref().map(str::parse::<Monomial>).transpose()?;
            let id = maybe_perturb(entry.identity(&b)?, perturb);
            let mut v: serde_json::Value = serde_json::from_str(&id.to_json()).expect("identity json");
            v.as_object_mut().expect("object").insert("name".into(), entry.key(&b).into());
            Ok(serde_json::to_string_pretty(&v).expect("json") + "\n")
        }
    }
}

fn verify_entry(entry: &IdentityEntry, b: &Binding, order: Option<&Rational>, perturb: Option<Monomial>) -> std::result::Result<VerifyReport, Failure> {
    let id = maybe_perturb(entry.identity(b)?, perturb);
    let order = order.cloned().unwrap_or_else(|| int(entry.default_order));
    Ok(id.verify(&entry.key(b), &order))
}

fn maybe_perturb(id: Identity, m: Option<Monomial>) -> Identity {
    match m {
        Some(m) => id.perturbed(m),
        None => id,
    }
}

fn report(reports: &[VerifyReport]) -> Out {
    for r in reports {
        println!("{r}");
    }
    if reports.iter().all(VerifyReport::passed) {
        Ok(String::new())
    } else {
        Err(Failure::Verification)
    }
}

fn pick_binding(entry: &IdentityEntry, bind: Option<&str>) -> std::result::Result<Binding, Failure> {
    match bind {
        Some(b) => Ok(Binding::parse(b)?),
        None => Ok(entry.all_bindings().remove(0)),
    }
}

fn recognize_source(
    src: &SeriesSource,
    window: usize,
    max_period: usize,
    tail_skip: usize,
    order: Option<Rational>,
) -> std::result::Result<Recognition, Failure> {
    let given = [src.triple.is_some(), src.registry.is_some(), src.series.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Failure::Input("give exactly one of --triple, --registry, --series".into()));
    }
    if let Some(path) = &src.series {
        let f = parse_listing(&read(path)?, order.as_ref())?;
        return Ok(recognize_series(&f, window, max_period, tail_skip)?);
    }
    let build: Box<dyn Fn(&Rational) -> nahm_core::Result<QSeries>> = match (&src.triple, &src.registry) {
        (Some(path), _) => {
            let t = read_triple(path)?;
            Box::new(move |o| eval_nahm(&t, o))
        }
        (_, Some(key)) => {
            let entry = lookup(key)?;
            let b = pick_binding(entry, src.bind.as_deref())?;
            let id = entry.identity(&b)?;
            let side: Side = src.side.parse()?;
            Box::new(move |o| id.build_side(side, o))
        }
        _ => return Err(Failure::Input("no series source".into())),
    };
    if let Some(o) = order {
        return Ok(recognize_series(&build(&o)?, window, max_period, tail_skip)?);
    }
    if tail_skip + 2 * max_period > window {
        return Err(Error::WindowTooSmall { available: window, needed: tail_skip + 2 * max_period }.into());
    }
    let mut o = int(((window + 10) / 8).max(10) as i64);
    loop {
        match recognize_series(&build(&o)?, window, max_period, tail_skip) {
            Err(Error::WindowTooSmall { .. }) if o < int(1 << 20) => o *= int(2),
            r => return Ok(r?),
        }
    }
}

fn describe(r: &Recognition, max_period: usize) -> String {
    let Some(p) = r.period else {
        return format!("no period ≤ {max_period}");
    };
    let pattern: Vec<String> = r.pattern.iter().map(fmt_rational).collect();
    let mut s = format!("period={p} pattern=[{}]", pattern.join(","));
    match &r.c {
        Some(c) => write!(s, " C={}", fmt_rational(c)).unwrap(),
        None => s.push_str(" C=none"),
    }
    s
}

/// `k:c` pairs, or `k/D:c` when the exponents need a denominator `D > 1`.
fn listing(f: &QSeries, base_scale: i64) -> std::result::Result<String, Failure> {
    if base_scale < 1 {
        return Err(Failure::Input("base scale must be positive".into()));
    }
    let d = lcm_i64(f.scale(), base_scale);
    let g = f.with_scale(d);
    let items: Vec<String> = g
        .terms_scaled()
        .iter()
        .map(|(k, c)| if d == 1 { format!("{k}:{}", fmt_rational(c)) } else { format!("{k}/{d}:{}", fmt_rational(c)) })
        .collect();
    Ok(items.join(" "))
}

/// Inverse of [`listing`]; the result is known below `order`, or exact without one.
fn parse_listing(text: &str, order: Option<&Rational>) -> std::result::Result<QSeries, Failure> {
    let mut terms = Vec::new();
    for tok in text.split_whitespace() {
        let (e, c) = tok.split_once(':').ok_or_else(|| Failure::Input(format!("bad term {tok:?}")))?;
        terms.push((parse_rational(e)?, parse_rational(c)?));
    }
    let d = terms.iter().fold(1, |d, (e, _)| lcm_i64(d, e.denom().try_into().unwrap_or(1)));
    let scaled = terms.into_iter().map(|(e, c)| ((e * int(d)).to_integer().try_into().unwrap_or(i64::MAX), c));
    let f = QSeries::exact(d, scaled);
    Ok(match order {
        Some(o) => f.truncate(o),
        None => f,
    })
}

fn parse_order(s: Option<&str>, default: i64) -> std::result::Result<Rational, Failure> {
    let o = match s {
        Some(s) => parse_rational(s)?,
        None => int(default),
    };
    if o < int(0) {
        return Err(Failure::Input("order must be non-negative".into()));
    }
    Ok(o)
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> std::result::Result<T, Failure> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Failure::Input("--jobs must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Failure::Input(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn read_triple(path: &Path) -> std::result::Result<NahmTriple, Failure> {
    Ok(NahmTriple::from_json(&read(path)?)?)
}

fn read_matrix(path: &Path) -> std::result::Result<Matrix, Failure> {
    let v: serde_json::Value = serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(e.to_string()))?;
    let bad = || Failure::Input(format!("{}: expected \"A\": [[rational, ...], ...]", path.display()));
    let rows = v.get("A").and_then(|a| a.as_array()).ok_or_else(bad)?;
    let mut a = Vec::new();
    for row in rows {
        let mut out = Vec::new();
        for x in row.as_array().ok_or_else(bad)? {
            let s = match x {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) if n.is_i64() => n.to_string(),
                _ => return Err(bad()),
            };
            out.push(parse_rational(&s)?);
        }
        a.push(out);
    }
    if a.iter().any(|r| r.len() != a.len()) {
        return Err(Failure::Input("matrix is not square".into()));
    }
    Ok(a)
}
