mod repro;

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpol::bounds::{self, entropy_bound, upper_bound};
use cpol::enumerate::{census_stats, enumerate_orders, enumerate_to_file, OrderCensus};
use cpol::flips::{critical_pairs, flippable_pairs, neighbors_with_pairs};
use cpol::precise;
use cpol::represent::{find_trading_transform, random_witness_search};
use cpol::subset::Subset;
use cpol::{
    check_trading_transform, cone_from_order, irreducible_elements, is_representable,
    lexicographic_utilities, maclagan_utilities, order_from_utilities, validate_order, Certificate,
    ComparativeOrder, Error, TradingTransform, UtilityVector,
};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "cpol",
    version,
    about = "Comparative probability orders: flips, representability and facet bounds"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (falls back to CPOL_THREADS, then all cores).
    #[arg(long, global = true, env = "CPOL_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct OrderInput {
    /// Order file: `n`, then one subset per line, smallest first.
    #[arg(long)]
    order_file: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Builds the order induced by a utility vector.
    Construct {
        /// Comma-separated positive integers, e.g. `1,2,4`.
        #[arg(long, group = "source")]
        utilities: Option<String>,
        /// Lexicographic utilities `(1, 2, …, 2^{n-1})`.
        #[arg(long, group = "source")]
        lex: Option<usize>,
        /// The Fibonacci construction on `n + 1` atoms.
        #[arg(long, group = "source")]
        maclagan: Option<usize>,
        /// Also write the order file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lists critical and flippable pairs.
    Flips(OrderInput),
    /// Lists the orders reachable by one flip.
    Neighbors {
        #[command(flatten)]
        input: OrderInput,
        /// Decide representability of each neighbour as well.
        #[arg(long)]
        friendly: bool,
    },
    /// Decides representability (exit 3 when not representable).
    Represent {
        #[command(flatten)]
        input: OrderInput,
        /// Longest trading transform searched for directly.
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        /// Also try this many random utility vectors.
        #[arg(long, requires = "seed")]
        spot_check: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Checks a certificate produced by `represent`.
    Certify {
        #[command(flatten)]
        input: OrderInput,
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Enumerates every order on `n` atoms with singletons ranked 1 ≺ 2 ≺ … ≺ n.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// NDJSON output; resumes from complete records already present.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        budget: Option<f64>,
        /// Required for n = 6.
        #[arg(long)]
        allow_long: bool,
    },
    /// Census statistics of an NDJSON census file.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Lower and upper bounds on the number of flippable pairs.
    Bounds {
        #[arg(long, default_value_t = 3)]
        from: usize,
        #[arg(long, default_value_t = 20)]
        to: usize,
        /// Entropy parameter in (λ, 1/2), as a fraction.
        #[arg(long, default_value = "1/4")]
        c: String,
    },
    /// Checks the Fibonacci construction for a base `n`.
    VerifyFibonacci {
        #[arg(long)]
        n: usize,
        /// Permit bases above 11.
        #[arg(long)]
        allow_large: bool,
    },
    /// Runs every reproduction check and prints one line per criterion.
    Repro {
        /// Include the six-atom census.
        #[arg(long)]
        with_census6: bool,
        /// Budget in seconds for the six-atom census.
        #[arg(long)]
        budget: Option<f64>,
        /// Checkpoint file for the six-atom census.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
}

/// Exit statuses.
const EXIT_USAGE: u8 = 1;
const EXIT_VERIFICATION: u8 = 2;
const EXIT_NONREPRESENTABLE: u8 = 3;
const EXIT_BUDGET: u8 = 4;

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Resource { .. } => EXIT_BUDGET,
            Error::Verification(_) => EXIT_VERIFICATION,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(format: Format, value: &Value, text: impl FnOnce() -> String) {
    let out = match format {
        Format::Json => serde_json::to_string_pretty(value).expect("json"),
        Format::Text => text(),
    };
    let mut stdout = io::stdout().lock();
    let _ = writeln!(stdout, "{}", out.trim_end());
}

fn read_order(path: &Path) -> Result<ComparativeOrder, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let o = ComparativeOrder::parse(&text)?;
    if !validate_order(&o).is_valid() {
        return Err(usage(format!(
            "{} is not a comparative probability order: {}",
            path.display(),
            serde_json::to_string(&validate_order(&o)).expect("json")
        )));
    }
    Ok(o)
}

fn atoms_json(o: &ComparativeOrder) -> Value {
    json!(o.iter().map(|s| s.atoms()).collect::<Vec<_>>())
}

fn parse_fraction(s: &str) -> Result<BigRational, Failure> {
    let bad = || usage(format!("`{s}` is not a fraction p/q"));
    let (p, q) = s.split_once('/').ok_or_else(bad)?;
    let p: i64 = p.trim().parse().map_err(|_| bad())?;
    let q: i64 = q.trim().parse().map_err(|_| bad())?;
    if q <= 0 {
        return Err(bad());
    }
    Ok(BigRational::new(p.into(), q.into()))
}

fn budget(seconds: Option<f64>) -> Result<Option<Duration>, Failure> {
    seconds
        .map(|s| {
            Duration::try_from_secs_f64(s)
                .map_err(|_| usage("budget must be a nonnegative number of seconds"))
        })
        .transpose()
}

fn run(cli: &Cli) -> Outcome {
    let format = cli.format;
    match &cli.command {
        Command::Construct {
            utilities,
            lex,
            maclagan,
            out,
        } => {
            let u = match (utilities, lex, maclagan) {
                (Some(s), None, None) => {
                    let entries = s
                        .split(',')
                        .map(|t| t.trim().parse::<BigUint>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| usage(format!("bad utility list `{s}`")))?;
                    UtilityVector::new(entries)?
                }
                (None, Some(n), None) => lexicographic_utilities(*n)?,
                (None, None, Some(n)) => maclagan_utilities(*n)?,
                _ => return Err(usage("give exactly one of --utilities, --lex, --maclagan")),
            };
            let o = order_from_utilities(&u)?;
            if let Some(path) = out {
                fs::write(path, o.to_file_string())
                    .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            }
            let v = json!({ "n": o.n(), "utilities": u.to_string(), "order": atoms_json(&o) });
            emit(format, &v, || o.to_file_string());
            Ok(0)
        }
        Command::Flips(input) => {
            let o = read_order(&input.order_file)?;
            let crit = critical_pairs(&o);
            let flippable = flippable_pairs(&o);
            let irr = irreducible_elements(&cone_from_order(&o)?).len();
            let v = json!({
                "n": o.n(),
                "critical_pairs": crit.iter().map(|p| json!({
                    "A": p.a.atoms(), "B": p.b.atoms(), "rank": p.rank,
                })).collect::<Vec<_>>(),
                "flippable_pairs": flippable.iter().map(|p| p.report()).collect::<Vec<_>>(),
                "irreducible": irr,
            });
            emit(format, &v, || {
                let mut s = format!(
                    "critical pairs: {}\nflippable pairs: {}\n",
                    crit.len(),
                    flippable.len()
                );
                for p in &flippable {
                    s += &format!(
                        "  {:?} ≺ {:?}  rank {}  adjacencies {}\n",
                        p.a(),
                        p.b(),
                        p.base.rank,
                        p.adjacencies
                    );
                }
                s + &format!("irreducible elements: {irr}")
            });
            Ok(0)
        }
        Command::Neighbors { input, friendly } => {
            let o = read_order(&input.order_file)?;
            let here = friendly.then(|| is_representable(&o).is_representable());
            let rows: Vec<Value> = neighbors_with_pairs(&o)
                .into_iter()
                .map(|(p, x)| {
                    let mut row =
                        json!({ "A": p.a().atoms(), "B": p.b().atoms(), "order": x.to_line() });
                    if let Some(h) = here {
                        let r = is_representable(&x).is_representable();
                        row["representable"] = json!(r);
                        row["friendly"] = json!(r == h);
                    }
                    row
                })
                .collect();
            let mut v = json!({ "n": o.n(), "neighbors": rows });
            if let Some(h) = here {
                v["representable"] = json!(h);
            }
            emit(format, &v, || {
                rows.iter()
                    .map(|r| {
                        let tag = r.get("friendly").map_or(String::new(), |f| {
                            format!("  friendly: {}", if f == true { "yes" } else { "no" })
                        });
                        format!("{}{tag}", r["order"].as_str().unwrap())
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            });
            Ok(0)
        }
        Command::Represent {
            input,
            k_max,
            spot_check,
            seed,
        } => {
            let o = read_order(&input.order_file)?;
            let cert = is_representable(&o);
            let mut v = cert.to_json();
            if !cert.is_representable() {
                if let Some(t) = find_trading_transform(&o, *k_max) {
                    v["transform"] = t.to_json();
                }
            }
            if let (Some(trials), Some(seed)) = (spot_check, seed) {
                let found = random_witness_search(&o, *trials, *seed);
                v["spot_check"] = json!({
                    "trials": trials,
                    "seed": seed,
                    "witness": found.map(|u| u.to_string()),
                });
            }
            emit(format, &v, || match cert.utilities() {
                Some(u) => format!("representable: yes\nutilities: {u}"),
                None => {
                    let t = v
                        .get("transform")
                        .map_or("none found".to_string(), |t| t.to_string());
                    format!("representable: no\ntrading transform: {t}")
                }
            });
            Ok(if cert.is_representable() {
                0
            } else {
                EXIT_NONREPRESENTABLE
            })
        }
        Command::Certify { input, certificate } => {
            let o = read_order(&input.order_file)?;
            let text = fs::read_to_string(certificate)
                .map_err(|e| usage(format!("cannot read {}: {e}", certificate.display())))?;
            let cert: Value = serde_json::from_str(&text)
                .map_err(|e| usage(format!("certificate is not JSON: {e}")))?;
            let (verdict, valid) = check_certificate(&o, &cert)?;
            let v = json!({ "verdict": verdict, "valid": valid });
            emit(format, &v, || {
                format!(
                    "{verdict} certificate: {}",
                    if valid { "valid" } else { "INVALID" }
                )
            });
            Ok(if valid { 0 } else { EXIT_VERIFICATION })
        }
        Command::Enumerate {
            n,
            out,
            budget: secs,
            allow_long,
        } => {
            if *n == 6 && !allow_long {
                return Err(usage(
                    "n = 6 takes a long time; pass --allow-long (and consider --out and --budget)",
                ));
            }
            let budget = budget(*secs)?;
            match out {
                Some(path) => {
                    let count = enumerate_to_file(*n, path, budget)?;
                    let v = json!({ "n": n, "orders": count, "out": path.display().to_string() });
                    emit(format, &v, || {
                        format!("{count} orders written to {}", path.display())
                    });
                }
                None => {
                    let census = enumerate_orders(*n, budget)?;
                    census.write_ndjson(io::stdout().lock())?;
                }
            }
            Ok(0)
        }
        Command::Stats { input } => {
            let file = fs::File::open(input)
                .map_err(|e| usage(format!("cannot read {}: {e}", input.display())))?;
            let census = OrderCensus::read_ndjson(BufReader::new(file))?;
            let stats = census_stats(&census);
            let v = serde_json::to_value(&stats).expect("json");
            emit(format, &v, || {
                let hist = stats
                    .irr_histogram
                    .iter()
                    .map(|(k, c)| format!("{k}:{c}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                format!(
                    "n = {}\norders = {}\nrepresentable = {}\n|Irr| histogram = {hist}\nm = {}\nM = {}\nmin facets = {}\n\
                     full graph connected = {}\nrepresentable subgraph connected = {}\nF_{} = {}\nSearles: {}",
                    stats.n,
                    stats.orders,
                    stats.representable,
                    stats.m,
                    stats.facets_max,
                    stats.facets_min,
                    stats.graph_connected,
                    stats.representable_subgraph_connected,
                    stats.n + 1,
                    stats.fibonacci,
                    stats.searles
                )
            });
            Ok(0)
        }
        Command::Bounds { from, to, c } => {
            if from > to || *from == 0 {
                return Err(usage("need 1 ≤ --from ≤ --to"));
            }
            let c = parse_fraction(c)?;
            let rate_c = entropy_bound(1, &c)?.rate;
            let rate_lambda = precise::to_f64(&bounds::lambda_entropy().lo).exp2();
            let mut rows = Vec::new();
            for n in *from..=*to {
                let b = upper_bound(n)?;
                let e = entropy_bound(n, &c)?;
                let chain = bounds::entropy_chain(n, &c);
                rows.push(json!({
                    "n": n,
                    "fib_lower": b.fib_lower,
                    "s_star": b.s_star,
                    "count_upper": b.count_upper,
                    "entropy_bound": format!("{:.6e}", e.bound),
                    "chain": chain,
                }));
            }
            let v = json!({
                "c": c.to_string(),
                "rate_c": format!("{rate_c:.10}"),
                "rate_lambda": format!("{rate_lambda:.10}"),
                "rows": rows,
            });
            emit(format, &v, || {
                let mut s =
                    format!("2^H(c) = {rate_c:.10} (c = {c}), 2^H(λ) = {rate_lambda:.10}\n");
                s += &format!(
                    "{:>4} {:>14} {:>6} {:>14} {:>14}\n",
                    "n", "lower", "s*", "upper", "2^(H(c)n)"
                );
                for r in &rows {
                    s += &format!(
                        "{:>4} {:>14} {:>6} {:>14} {:>14}\n",
                        r["n"].as_u64().unwrap(),
                        r["fib_lower"].as_str().unwrap(),
                        r["s_star"].as_u64().unwrap(),
                        r["count_upper"].as_str().unwrap(),
                        r["entropy_bound"].as_str().unwrap()
                    );
                }
                s
            });
            Ok(0)
        }
        Command::VerifyFibonacci { n, allow_large } => {
            let report = if *n > bounds::MAX_CHECKED_BASE && *allow_large {
                eprintln!("warning: base {n} is beyond the routinely checked range and may take a long time");
                bounds::verify_fibonacci_construction_unchecked_range(*n)?
            } else {
                bounds::verify_fibonacci_construction(*n)?
            };
            let v = serde_json::to_value(&report).expect("json");
            emit(format, &v, || {
                format!(
                    "flippable = {} = F_{}, friendly: {}",
                    report.flippable,
                    report.fibonacci_index,
                    if report.friendly { "yes" } else { "no" }
                )
            });
            Ok(0)
        }
        Command::Repro {
            with_census6,
            budget: secs,
            checkpoint,
        } => {
            let opts = repro::Options {
                census6: *with_census6,
                budget: budget(*secs)?,
                checkpoint: checkpoint.clone(),
            };
            let results = repro::run_all(&opts);
            let passed = results.iter().all(|r| r.status != repro::Status::Fail);
            let v = json!(results
                .iter()
                .map(|r| json!({
                    "criterion": r.id,
                    "name": r.name,
                    "status": r.status.as_str(),
                    "detail": r.detail,
                }))
                .collect::<Vec<_>>());
            emit(format, &v, || {
                results
                    .iter()
                    .map(|r| {
                        format!(
                            "[{}] {:>2} {}: {}",
                            r.status.as_str(),
                            r.id,
                            r.name,
                            r.detail
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            });
            Ok(if passed { 0 } else { EXIT_VERIFICATION })
        }
    }
}

fn subsets_from_json(v: &Value, n: usize) -> Result<Vec<Subset>, Failure> {
    let bad = || usage("transform sides must be arrays of atom arrays");
    v.as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|s| {
            let atoms = s
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|a| a.as_u64().map(|a| a as usize).ok_or_else(bad))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Subset::from_atoms(&atoms, n)?)
        })
        .collect()
}

/// Returns the claimed verdict and whether the certificate proves it.
fn check_certificate(o: &ComparativeOrder, cert: &Value) -> Result<(String, bool), Failure> {
    let verdict = cert["verdict"]
        .as_str()
        .ok_or_else(|| usage("certificate lacks a verdict"))?;
    match verdict {
        "representable" => {
            let entries = cert["utilities"]
                .as_array()
                .ok_or_else(|| usage("certificate lacks utilities"))?
                .iter()
                .map(|x| match x {
                    Value::Number(n) => n.to_string().parse::<BigUint>().ok(),
                    Value::String(s) => s.parse::<BigUint>().ok(),
                    _ => None,
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| usage("utilities must be positive integers"))?;
            let valid = UtilityVector::new(entries)
                .and_then(|u| order_from_utilities(&u))
                .is_ok_and(|x| &x == o);
            Ok((verdict.into(), valid))
        }
        "nonrepresentable" => {
            let t = &cert["transform"];
            if t.is_null() {
                // no explicit certificate: fall back to the exact LP
                let valid = matches!(is_representable(o), Certificate::Nonrepresentable { .. });
                return Ok((verdict.into(), valid));
            }
            let t = TradingTransform {
                lower: subsets_from_json(&t["As"], o.n())?,
                upper: subsets_from_json(&t["Bs"], o.n())?,
            };
            let valid = check_trading_transform(&t, o).unwrap_or(false);
            Ok((verdict.into(), valid))
        }
        other => Err(usage(format!("unknown verdict `{other}`"))),
    }
}
