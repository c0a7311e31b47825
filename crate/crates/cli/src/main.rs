//! `hitchin-count`: universal polynomials, topology and point counts from
//! the command line.

mod cache;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hitchin_core::checks::{run_all, run_quick, CriterionReport};
use hitchin_core::counting::{
    count_m_fixed_det, count_m_with, count_n_trace0, verify_comparison, Count, CoverDatum, EvalPrecision, Method,
    WeilDatum,
};
use hitchin_core::oracle::{count_p1_rank1, count_p1_rank2};
use hitchin_core::polyalg::RatPoly;
use hitchin_core::topology::{euler_characteristic, poincare_polynomial};
use hitchin_core::twist::{twisted_h, twisted_h_tilde};
use hitchin_core::universal::{provenance, universal_h};

use cache::Cache;

pub const SCHEMA: &str = "hitchin-count/v1";

#[derive(Parser)]
#[command(name = "hitchin-count", version, about = "Counting stable Hitchin bundles with universal polynomials")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Cache directory for computed polynomials.
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Do not read or write the polynomial cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Recompute cache hits and fail if they differ.
    #[arg(long, global = true)]
    verify_cache: bool,
    /// Working precision of the numeric evaluation, in bits.
    #[arg(long, global = true, default_value_t = 256)]
    prec_bits: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[command(allow_negative_numbers = true)]
enum Command {
    /// The universal polynomial in x_1..x_g, z.
    #[command(allow_negative_numbers = true)]
    Universal { g: u32, n: u32, p: i64 },
    /// The root-of-unity average of a cover's universal polynomial.
    #[command(allow_negative_numbers = true)]
    Twisted {
        g: u32,
        n: u32,
        p: i64,
        d: u32,
        e: i64,
        /// Divide by the Jacobian factor and the power of z.
        #[arg(long)]
        quotient: bool,
    },
    /// Compactly supported Betti numbers of the trace-zero moduli space.
    #[command(allow_negative_numbers = true)]
    Poincare { g: u32, n: u32, deg_d: i64, e: i64 },
    /// Euler characteristic, from the Betti numbers and in closed form.
    #[command(allow_negative_numbers = true)]
    Euler { g: u32, n: u32, deg_d: i64, e: i64 },
    /// Points of the moduli space of rank n, degree e Hitchin bundles.
    #[command(allow_negative_numbers = true)]
    CountM {
        weil: PathBuf,
        n: u32,
        e: i64,
        deg_d: i64,
        m: u32,
        /// Use the numeric path even where an exact one exists.
        #[arg(long)]
        numeric: bool,
    },
    /// Points with fixed determinant, and with fixed determinant and trace zero.
    #[command(allow_negative_numbers = true)]
    CountN { weil: PathBuf, cover: PathBuf, n: u32, e: i64, deg_d: i64, m: u32 },
    /// The fixed-determinant count against the sum of cover counts.
    #[command(allow_negative_numbers = true)]
    Compare { weil: PathBuf, cover: PathBuf, n: u32, e: i64, deg_d: i64, m: u32 },
    /// Brute-force counts on the projective line.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Runs the acceptance suite.
    Selfcheck {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Stable pairs on P^1 over F_q.
    #[command(allow_negative_numbers = true)]
    P1 {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
        #[arg(long, allow_negative_numbers = true)]
        e: i64,
        #[arg(long = "degD", alias = "deg-d", allow_negative_numbers = true)]
        deg_d: i64,
        /// Extension degree (rank 1 only).
        #[arg(long, default_value_t = 1)]
        m: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Quick,
    Full,
}

/// Command output: a JSON document and its text rendering.
struct Output {
    json: Value,
    text: String,
    code: ExitCode,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { json, text, code: ExitCode::SUCCESS }
    }
}

fn with_schema(kind: &str, mut body: Value) -> Value {
    let mut out = serde_json::Map::new();
    out.insert("schema".into(), json!(SCHEMA));
    out.insert("kind".into(), json!(kind));
    if let Value::Object(map) = &mut body {
        out.append(map);
    }
    Value::Object(out)
}

/// `key: value` lines with the values aligned.
fn aligned(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}")).collect::<Vec<_>>().join("\n")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf, what: &str) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {what} {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| hitchin_core::Error::InvalidInput(format!("{what} {}: {e}", path.display())).into())
}

fn count_json(c: &Count) -> Value {
    serde_json::to_value(c).expect("counts serialize")
}

fn count_text(c: &Count) -> String {
    if c.exact {
        c.value.to_string()
    } else {
        format!("{} (residual {:.3e})", c.value, c.residual)
    }
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn polynomial_output(kind: &str, params: Value, poly: &RatPoly) -> Output {
    let mut body = params;
    body["poly"] = poly.to_json();
    Output::ok(with_schema(kind, body), poly.to_string())
}

fn run(cli: &Cli) -> Result<Output> {
    let cache = if cli.no_cache { None } else { cli.cache_dir.clone().or_else(cache::default_dir).map(Cache::new) };
    let cache = cache.as_ref();
    let prec = EvalPrecision::with_bits(cli.prec_bits);
    prec.check()?;
    Ok(match &cli.command {
        &Command::Universal { g, n, p } => {
            let key = cache::key("universal", &[g as i64, n as i64, p]);
            let poly = cache::cached(cache, cli.verify_cache, &key, || universal_h(g, n, p).map(|u| u.poly))?;
            let params =
                json!({ "g": g, "n": n, "p": p, "provenance": provenance("universal", &[g as i64, n as i64, p]) });
            polynomial_output("universal", params, &poly)
        }
        &Command::Twisted { g, n, p, d, e, quotient } => {
            let family = if quotient { "twisted-quotient" } else { "twisted" };
            let e_mod = if d > 0 { e.rem_euclid(d as i64) } else { e };
            let params = [g as i64, n as i64, p, d as i64, e_mod];
            let poly = cache::cached(cache, cli.verify_cache, &cache::key(family, &params), || {
                if quotient {
                    twisted_h_tilde(g, n, p, d, e)
                } else {
                    twisted_h(g, n, p, d, e).map(|t| t.poly)
                }
            })?;
            let body =
                json!({ "g": g, "n": n, "p": p, "d": d, "e_mod_d": e_mod, "provenance": provenance(family, &params) });
            polynomial_output(family, body, &poly)
        }
        &Command::Poincare { g, n, deg_d, e } => {
            let r = poincare_polynomial(g, n, deg_d, e)?;
            if !r.in_proven_range {
                eprintln!("warning: p = {} lies outside the range p >= 1 where the formula is proven", r.p);
            }
            let betti = r.betti.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
            let text = aligned(&[
                ("betti numbers", betti),
                ("top degree", r.top_degree().to_string()),
                ("euler characteristic", r.euler().to_string()),
            ]);
            Output::ok(with_schema("poincare", serde_json::to_value(&r)?), text)
        }
        &Command::Euler { g, n, deg_d, e } => {
            let r = euler_characteristic(g, n, deg_d, e)?;
            let text = aligned(&[
                ("from betti numbers", r.from_betti.to_string()),
                ("closed form", r.closed_form.to_string()),
            ]);
            Output::ok(with_schema("euler", serde_json::to_value(&r)?), text)
        }
        Command::CountM { weil, n, e, deg_d, m, numeric } => {
            let w: WeilDatum = read_json(weil, "Weil datum")?;
            let method = if *numeric { Method::Numeric } else { Method::Auto };
            let c = count_m_with(&w, *n, *e, *deg_d, *m, &prec, method)?;
            let body = json!({ "n": n, "e": e, "deg_d": deg_d, "m": m, "count": count_json(&c) });
            Output::ok(with_schema("count-m", body), count_text(&c))
        }
        Command::CountN { weil, cover, n, e, deg_d, m } => {
            let w: WeilDatum = read_json(weil, "Weil datum")?;
            let c: CoverDatum = read_json(cover, "cover datum")?;
            let fixed = count_m_fixed_det(&w, &c, *n, *e, *deg_d, *m, &prec)?;
            let trace0 = count_n_trace0(&w, &c, *n, *e, *deg_d, *m, &prec)?;
            warn(&trace0.warnings);
            let body = json!({
                "n": n, "e": e, "deg_d": deg_d, "m": m,
                "fixed_determinant": count_json(&fixed),
                "trace_zero": count_json(&trace0),
            });
            let text = aligned(&[("fixed determinant", count_text(&fixed)), ("trace zero", count_text(&trace0))]);
            Output::ok(with_schema("count-n", body), text)
        }
        Command::Compare { weil, cover, n, e, deg_d, m } => {
            let w: WeilDatum = read_json(weil, "Weil datum")?;
            let c: CoverDatum = read_json(cover, "cover datum")?;
            let r = verify_comparison(&w, &c, *n, *e, *deg_d, *m, &prec)?;
            warn(&r.warnings);
            let text = aligned(&[
                ("twisted polynomials", r.lhs.to_string()),
                ("cover counts", format!("{:.6} + {:.3e} i", r.rhs.0, r.rhs.1)),
                ("residual", format!("{:.3e}", r.residual)),
                ("agree", r.agree.to_string()),
            ]);
            let code = if r.agree { ExitCode::SUCCESS } else { ExitCode::from(1) };
            Output { json: with_schema("compare", serde_json::to_value(&r)?), text, code }
        }
        &Command::Oracle(OracleCommand::P1 { q, n, e, deg_d, m }) => match n {
            1 => {
                let v = count_p1_rank1(q, e, deg_d, m)?;
                let body = json!({ "q": q, "n": 1, "e": e, "deg_d": deg_d, "m": m, "total": v.to_string() });
                Output::ok(with_schema("oracle-p1", body), v.to_string())
            }
            2 => {
                if m != 1 {
                    return Err(
                        hitchin_core::Error::InvalidInput("the rank-2 oracle counts over F_q only".into()).into()
                    );
                }
                let r = count_p1_rank2(q, e, deg_d)?;
                let mut rows = vec![("total".to_string(), r.total.to_string())];
                for t in &r.by_type {
                    rows.push((
                        format!("O({}) + O({})", t.a, t.b),
                        format!(
                            "{} (stable {} of {}, |Aut| = {})",
                            t.contribution, t.stable, t.higgs_fields, t.automorphisms
                        ),
                    ));
                }
                let refs: Vec<(&str, String)> = rows.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
                Output::ok(with_schema("oracle-p1", serde_json::to_value(&r)?), aligned(&refs))
            }
            _ => {
                return Err(
                    hitchin_core::Error::InvalidInput(format!("the oracle handles ranks 1 and 2, not {n}")).into()
                )
            }
        },
        &Command::Selfcheck { level } => {
            let reports = match level {
                Level::Quick => run_quick(),
                Level::Full => run_all(),
            };
            selfcheck_output(&reports)
        }
    })
}

fn selfcheck_output(reports: &[CriterionReport]) -> Output {
    let passed = reports.iter().all(|r| r.passed);
    let mut lines = Vec::new();
    for r in reports {
        lines.push(r.line());
        if !r.passed {
            lines.extend(r.details.iter().map(|d| format!("    {d}")));
        }
    }
    let body = json!({ "passed": passed, "criteria": reports });
    let code = if passed { ExitCode::SUCCESS } else { ExitCode::from(2) };
    Output { json: with_schema("selfcheck", body), text: lines.join("\n"), code }
}

fn error_output(err: &anyhow::Error) -> (Value, ExitCode) {
    let (kind, bug) = match err.downcast_ref::<hitchin_core::Error>() {
        Some(e) => (e.kind(), e.is_bug()),
        None if err.downcast_ref::<std::io::Error>().is_some() => ("io", false),
        None => ("invalid_input", false),
    };
    let body = json!({ "error": { "kind": kind, "message": format!("{err:#}") } });
    (with_schema("error", body), ExitCode::from(if bug { 2 } else { 1 }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON output"));
            } else {
                println!("{}", out.text);
            }
            out.code
        }
        Err(err) => {
            let (body, code) = error_output(&err);
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&body).expect("JSON output"));
            }
            eprintln!("{}", serde_json::to_string(&body).expect("JSON output"));
            code
        }
    }
}
