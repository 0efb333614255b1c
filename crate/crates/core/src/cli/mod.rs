//! The `arithdist` command line: expression parsing, JSON I/O and suite drivers.

pub mod eval;
pub mod parse;

use std::fmt::Write as _;
use std::io::Read as _;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::action::{act, taylor, GroupFunction};
use crate::coalgebra::{mul_via_comul, PdPolynomial};
use crate::dagger::{
    ar_pairing_and_norm, banach_norm, dagger_classify, ord_profile, phi_valuation_growth, GrowthCertificate,
    TruncatedSeries,
};
use crate::diffops::{eval_at_identity, Chart, DiffOp};
use crate::dist::DistElement;
use crate::error::{Error, Result};
use crate::flag::{localization_check, qmap_on_bundle, TwistDatum};
use crate::group::GroupKind;
use crate::padic::{parse_rational, rational_to_string, Level, LevelContext, Prime, ValuedRational};
use crate::verify;

pub use eval::{eval_dist, eval_function, eval_op};
pub use parse::{parse, Expr};

#[derive(Parser, Debug)]
#[command(name = "arithdist", version, about = "Exact arithmetic in level-m distribution algebras")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// the prime
    #[arg(long, global = true, default_value_t = 2)]
    p: u64,
    /// the level: a non-negative integer or `inf`
    #[arg(long, global = true, default_value = "0")]
    m: Level,
    /// Ga:N, Gm:N, sl2, gl2, sl2xsl2 or product:A,B,...
    #[arg(long, global = true, default_value = "Ga:1")]
    group: GroupKind,
    /// print JSON instead of the text form
    #[arg(long, global = true)]
    json: bool,
    /// print coefficient valuations alongside results
    #[arg(long, global = true)]
    valuations: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normal form of an expression in the PBW basis.
    Normalize {
        expr: String,
        /// exit with status 1 unless the result is integral
        #[arg(long)]
        assert_integral: bool,
    },
    /// Product of two elements.
    Mul {
        a: String,
        b: String,
        /// compute through the comultiplication instead (commutative groups)
        #[arg(long)]
        via_comul: bool,
        #[arg(long)]
        assert_integral: bool,
    },
    /// Pair a distribution with a function on the group.
    Act {
        dist: String,
        function: String,
        /// also print the Taylor expansion at the identity up to this order
        #[arg(long)]
        taylor: Option<u64>,
    },
    /// The differential operator attached to a distribution.
    Qmap {
        expr: String,
        /// A1, Gm, P1:0 or P1:1 (default: the natural chart of the group)
        #[arg(long)]
        chart: Option<Chart>,
        /// twist of the line bundle on the projective line
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        lambda: i64,
        #[arg(long)]
        assert_integral: bool,
    },
    /// The distribution `f -> (P f)(identity)` of an operator.
    EvalE {
        op: String,
        #[arg(long, default_value = "A1")]
        chart: Chart,
    },
    /// Valuations of the level-change factors `q^(m)_k!/q^(m')_k!`.
    Phi {
        /// the target level m' (integer or inf)
        #[arg(long)]
        target: Option<Level>,
        #[arg(long, default_value_t = 64)]
        k_max: u64,
    },
    /// Global sections and central character on the projective line.
    FlagCheck {
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        lambda: i64,
    },
    /// Growth test for a truncated series given as JSON (inline, @file or @-).
    DaggerCheck {
        /// truncated series JSON (`@file`, `@-` or inline)
        #[arg(required_unless_present = "input", conflicts_with = "input")]
        series: Option<String>,
        #[arg(long)]
        input: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long, default_value_t = 8)]
        i_max: i64,
        /// Tate truncation (PdPolynomial JSON) to pair with
        #[arg(long)]
        tate: Option<String>,
        /// radius r = p^(-slope) for the pairing
        #[arg(long, default_value = "1/2")]
        slope: String,
    },
    /// Run the verification suites.
    Suite {
        /// run all eight criteria
        #[arg(long)]
        all: bool,
        /// criterion numbers or names
        names: Vec<String>,
    },
}

/// Exit status, standard output and standard error of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout, stderr: String::new() }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => out,
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn context(g: &GlobalOpts) -> Result<LevelContext> {
    LevelContext::new(g.p, g.m)
}

fn read_json(arg: &str) -> Result<Value> {
    let text = if arg == "@-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Malformed(e.to_string()))?;
        s
    } else if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{path}: {e}")))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).map_err(|e| Error::Malformed(e.to_string()))
}

fn is_json_arg(arg: &str) -> bool {
    arg.starts_with('@') || arg.trim_start().starts_with('{')
}

fn dist_arg(arg: &str, g: &GlobalOpts) -> Result<DistElement> {
    if is_json_arg(arg) {
        DistElement::from_json(&read_json(arg)?)
    } else {
        eval_dist(arg, &g.group, context(g)?)
    }
}

fn valuation_lines(out: &mut String, coeffs: impl Iterator<Item = (String, ValuedRational)>) {
    for (label, c) in coeffs {
        let v = c.valuation().map_or("inf".to_string(), |v| v.to_string());
        let _ = writeln!(out, "  v({label}) = {v}");
    }
}

fn print_dist(u: &DistElement, g: &GlobalOpts) -> String {
    if g.json {
        return format!("{}\n", serde_json::to_string_pretty(&u.to_json()).unwrap());
    }
    let mut out = format!("{u}\n");
    if g.valuations {
        let labels: Vec<(String, ValuedRational)> = u
            .valued_terms()
            .map(|(k, c)| {
                let single = DistElement::basis(u.group().clone(), *u.ctx(), k.clone()).map(|b| b.to_string()).unwrap_or_default();
                (single, c)
            })
            .collect();
        valuation_lines(&mut out, labels.into_iter());
    }
    out
}

fn print_op(op: &DiffOp, g: &GlobalOpts) -> String {
    if g.json {
        return format!("{}\n", serde_json::to_string_pretty(&op.to_json()).unwrap());
    }
    let mut out = format!("{op}\n");
    if g.valuations {
        let p = op.ctx().p;
        let items: Vec<(String, ValuedRational)> = op
            .terms()
            .map(|(j, k, c)| {
                let one = DiffOp::monomial(*op.ctx(), op.chart(), j, k, c.clone() / c.clone()).map(|m| m.to_string()).unwrap_or_default();
                (one, ValuedRational::new(c.clone(), p))
            })
            .collect();
        valuation_lines(&mut out, items.into_iter());
    }
    out
}

fn integrality_outcome(text: String, integral: bool, asserted: bool) -> Outcome {
    if asserted && !integral {
        Outcome { code: 1, stdout: text, stderr: "error: result is not integral\n".into() }
    } else {
        Outcome::ok(text)
    }
}

fn natural_chart(group: &GroupKind) -> Result<Chart> {
    match group {
        GroupKind::Additive(1) => Ok(Chart::AffineLine),
        GroupKind::Multiplicative(1) => Ok(Chart::Torus),
        GroupKind::Reductive(r) if r.datum().is_sl2() => Ok(Chart::P1(0)),
        g => Err(Error::UnsupportedGroup(format!("{g} has no operator realization"))),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Normalize { expr, assert_integral } => {
            let u = dist_arg(expr, g)?;
            Ok(integrality_outcome(print_dist(&u, g), u.is_integral(), *assert_integral))
        }
        Command::Mul { a, b, via_comul, assert_integral } => {
            let (a, b) = (dist_arg(a, g)?, dist_arg(b, g)?);
            let prod = if *via_comul { mul_via_comul(&a, &b)? } else { a.mul(&b)? };
            Ok(integrality_outcome(print_dist(&prod, g), prod.is_integral(), *assert_integral))
        }
        Command::Act { dist, function, taylor: order } => {
            let u = dist_arg(dist, g)?;
            let f = if is_json_arg(function) {
                GroupFunction::from_json(&read_json(function)?)?
            } else {
                eval_function(function, &g.group)?
            };
            let value = act(&u, &f)?;
            let mut out = if g.json {
                json!({"value": rational_to_string(value.value()), "valuation": value.valuation()}).to_string() + "\n"
            } else {
                format!("{}\n", crate::dist::rational_to_display(value.value()))
            };
            if let Some(n) = order {
                let t = taylor(&f, *n, context(g)?)?;
                out += &format!("{}\n", if g.json { t.to_json().to_string() } else { format_taylor(&t) });
            }
            if g.valuations && !g.json {
                let v = value.valuation().map_or("inf".into(), |v| v.to_string());
                out += &format!("  v = {v}\n");
            }
            Ok(Outcome::ok(out))
        }
        Command::Qmap { expr, chart, lambda, assert_integral } => {
            let u = dist_arg(expr, g)?;
            let chart = match chart {
                Some(c) => *c,
                None => natural_chart(u.group())?,
            };
            let op = if *lambda != 0 {
                qmap_on_bundle(&u, chart, TwistDatum::new(*lambda))?
            } else {
                crate::diffops::qmap(&u, chart)?
            };
            Ok(integrality_outcome(print_op(&op, g), op.is_integral(), *assert_integral))
        }
        Command::EvalE { op, chart } => {
            let ctx = context(g)?;
            let op = if is_json_arg(op) { DiffOp::from_json(&read_json(op)?)? } else { eval_op(op, ctx, *chart)? };
            Ok(Outcome::ok(print_dist(&eval_at_identity(&op)?, g)))
        }
        Command::Phi { target, k_max } => {
            let Level::Finite(m) = g.m else {
                return Err(Error::Malformed("phi needs a finite source level --m".into()));
            };
            let target = target.unwrap_or(Level::Finite(m + 1));
            let table = phi_valuation_growth(m, target, *k_max, Prime::new(g.p)?)?;
            if g.json {
                return Ok(Outcome::ok(serde_json::to_string_pretty(&table).unwrap() + "\n"));
            }
            let mut out = format!("p={} m={} m'={}\n", table.p, table.m, table.m_target);
            for (k, v) in &table.rows {
                let _ = writeln!(out, "{k:>6} {v:>6}");
            }
            let _ = writeln!(out, "monotone={} unbounded={}", table.monotone, table.unbounded);
            let ok = table.monotone && table.unbounded;
            Ok(Outcome { code: if ok { 0 } else { 1 }, stdout: out, stderr: String::new() })
        }
        Command::FlagCheck { n, lambda } => {
            let report = localization_check(*n, context(g)?, TwistDatum::new(*lambda))?;
            let out = if g.json {
                serde_json::to_string_pretty(&report).unwrap() + "\n"
            } else {
                let mut s = format!(
                    "n={} p={} m={} lambda={} theta={}\n",
                    report.n, report.p, report.m, report.lambda, report.theta
                );
                let _ = writeln!(
                    s,
                    "dim U={} rank={} global={} kernel={} (expected {})",
                    report.enveloping_dim, report.image_rank, report.global_dim, report.kernel_dim, report.central_kernel_dim
                );
                let _ = writeln!(
                    s,
                    "images global={} kernel={} surjective={} integral={} central={}",
                    report.images_global, report.kernel_matches, report.surjective, report.integral_images, report.casimir_central
                );
                for f in &report.failures {
                    let _ = writeln!(s, "FAIL {f}");
                }
                s
            };
            Ok(Outcome { code: if report.passed() { 0 } else { 1 }, stdout: out, stderr: String::new() })
        }
        Command::DaggerCheck { series, input, eta, c, horizon, i_max, tate, slope } => {
            // `--input` also takes a bare path
            let source = match (series, input) {
                (Some(s), _) => s.clone(),
                (None, Some(i)) if is_json_arg(i) => i.clone(),
                (None, Some(i)) => format!("@{i}"),
                (None, None) => unreachable!("clap requires one"),
            };
            let mut s = TruncatedSeries::from_json(&read_json(&source)?)?;
            if let Some(h) = horizon {
                s = s.truncate(*h);
            }
            match (eta, c) {
                (Some(e), Some(c)) => s = s.with_certificate(GrowthCertificate::new(parse_rational(e)?, parse_rational(c)?)?),
                (None, None) => {}
                _ => return Err(Error::Malformed("give both --eta and --c".into())),
            }
            let verdict = dagger_classify(&s)?;
            let profile = ord_profile(&s, *i_max)?;
            let norm = banach_norm(&s);
            let pairing = match tate {
                Some(t) => Some(ar_pairing_and_norm(&s, &PdPolynomial::from_json(&read_json(t)?)?, &parse_rational(slope)?)?),
                None => None,
            };
            let refuted = matches!(verdict, crate::dagger::DaggerVerdict::RefutedAtHorizon { .. });
            let out = if g.json {
                let mut v = json!({
                    "verdict": verdict,
                    "ord_profile": profile,
                    "banach_norm": rational_to_string(&norm),
                });
                if let Some(pp) = &pairing {
                    v["pairing"] = json!({
                        "value": rational_to_string(pp.value.value()),
                        "functional_bound": pp.functional_bound,
                        "tate_norm": pp.tate_norm,
                    });
                }
                serde_json::to_string_pretty(&v).unwrap() + "\n"
            } else {
                let mut o = String::new();
                let _ = match &verdict {
                    crate::dagger::DaggerVerdict::Certified { eta, c } => writeln!(o, "certified: v(a_k) >= {eta}*|k| + {c}"),
                    crate::dagger::DaggerVerdict::RefutedAtHorizon { degree, valuation, bound } => {
                        writeln!(o, "refuted at horizon: |k|={degree} has v={valuation} < {bound}")
                    }
                    crate::dagger::DaggerVerdict::Indeterminate { reason } => writeln!(o, "indeterminate: {reason}"),
                };
                let prof: Vec<String> = profile.iter().map(|x| x.map_or("-inf".into(), |d| d.to_string())).collect();
                let _ = writeln!(o, "ord profile: [{}]", prof.join(", "));
                let _ = writeln!(o, "norm: {}", crate::dist::rational_to_display(&norm));
                if let Some(pp) = &pairing {
                    let _ = writeln!(o, "pairing: {}", crate::dist::rational_to_display(pp.value.value()));
                    if let Some(b) = &pp.functional_bound {
                        let _ = writeln!(o, "functional bound: p^({}) at |k|={}", b.exponent, b.degree);
                    }
                }
                o
            };
            Ok(Outcome { code: if refuted { 1 } else { 0 }, stdout: out, stderr: String::new() })
        }
        Command::Suite { all, names } => {
            let ids: Vec<u8> = if *all || names.is_empty() {
                (1..=8).collect()
            } else {
                names.iter().map(|n| verify::criterion_id(n)).collect::<Result<_>>()?
            };
            let results: Vec<verify::CriterionOutcome> = ids.iter().map(|&i| verify::run_criterion(i)).collect();
            let ok = results.iter().all(|r| r.passed);
            let out = if g.json {
                serde_json::to_string_pretty(&results).unwrap() + "\n"
            } else {
                let mut s = String::new();
                for r in &results {
                    let _ = writeln!(s, "{}", r.summary_line());
                }
                let passed = results.iter().filter(|r| r.passed).count();
                let _ = writeln!(s, "{passed}/{} criteria passed", results.len());
                s
            };
            Ok(Outcome { code: if ok { 0 } else { 1 }, stdout: out, stderr: String::new() })
        }
    }
}

fn format_taylor(t: &PdPolynomial) -> String {
    let parts: Vec<String> = t
        .terms()
        .map(|(k, c)| {
            let idx: Vec<String> = k.iter().map(|x| x.to_string()).collect();
            format!("[{}]: {}", idx.join(","), crate::dist::rational_to_display(c))
        })
        .collect();
    format!("taylor {{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Outcome {
        run(std::iter::once("arithdist").chain(args.iter().copied()))
    }

    #[test]
    fn documented_invocations() {
        let o = cli(&["mul", "--group", "Ga", "--p", "2", "--m", "1", "xi<2>", "xi<2>"]);
        assert_eq!((o.code, o.stdout.as_str()), (0, "3*xi<4>\n"));
        let o = cli(&["qmap", "--group", "Gm", "--p", "3", "--m", "0", "xi<2>"]);
        assert_eq!((o.code, o.stdout.as_str()), (0, "T^2*d<2>\n"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(cli(&["normalize", "xi<"]).code, 2);
        assert!(cli(&["normalize", "xi<"]).stderr.contains("column 4"));
        assert_eq!(cli(&["frobnicate"]).code, 2);
        let o = cli(&["normalize", "--group", "Ga", "--m", "1", "xi/2", "--assert-integral"]);
        assert_eq!(o.code, 1);
        assert_eq!(cli(&["normalize", "--group", "Ga", "--m", "1", "xi/3", "--assert-integral"]).code, 0);
    }

    #[test]
    fn json_round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.json");
        let o = cli(&["normalize", "--group", "sl2", "--json", "f*e"]);
        std::fs::write(&path, &o.stdout).unwrap();
        let arg = format!("@{}", path.display());
        let back = cli(&["normalize", "--group", "sl2", &arg]);
        assert_eq!(back.stdout, "-h + e*f\n");
    }

    #[test]
    fn other_commands() {
        let o = cli(&["act", "--group", "Gm", "--m", "inf", "xi[2]", "T^3"]);
        assert_eq!(o.stdout, "3\n");
        let o = cli(&["eval-e", "--chart", "Gm", "--m", "1", "T^2*d<2> + T"]);
        assert_eq!(o.stdout, "1 + xi<2>\n");
        let o = cli(&["phi", "--m", "0", "--k-max", "32"]);
        assert_eq!(o.code, 0, "{}", o.stdout);
        let o = cli(&["flag-check", "--n", "2", "--p", "3", "--m", "1"]);
        assert_eq!(o.code, 0, "{}", o.stdout);
        let series = r#"{"p":2,"m":"inf","rank":1,"terms":[{"k":[0],"coeff":"1"},{"k":[1],"coeff":"2"},{"k":[2],"coeff":"4"}]}"#;
        let o = cli(&["dagger-check", series, "--eta", "1", "--c", "0"]);
        assert!(o.stdout.starts_with("certified"), "{}", o.stdout);
        let o = cli(&["dagger-check", series, "--eta", "2", "--c", "0"]);
        assert_eq!(o.code, 1);
    }
}
