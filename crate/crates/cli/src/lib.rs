//! `dq` command dispatch. [`run_command`] does all the work and returns the
//! exit code with the text to print, so tests can drive it in-process.

use std::fmt;
use std::fs;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dq_core::curve::{higgs_char_poly, quantize_plane_curve, QuantizationTarget};
use dq_core::expr::{self, ExprError};
use dq_core::maps::{verify_morphism, OperatorSampleSpec, SymbolMap};
use dq_core::operator::{OpAlgebra, SkewOperator};
use dq_core::polarization::{annihilator_kernel, Polarization};
use dq_core::sampling::SampleSpec;
use dq_core::serial::{self, DocError, SeriesDoc};
use dq_core::series::{HSeries, Var, VarSet};
use dq_core::star::{verify_poisson_laws, verify_star_axioms, Axiom, StarAlgebra};
use dq_core::synthesis::{
    synthesis_crosscheck, verify_quantization_conditions, CrosscheckReport, QuantizationData,
};
use dq_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "dq",
    version,
    about = "Exact deformation-quantization calculator"
)]
struct Cli {
    /// Truncation order N (results are exact mod h^(N+1)).
    #[arg(long, global = true, default_value_t = 6)]
    order: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for sampled verifications.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Star product of two series.
    Mul {
        #[arg(long)]
        algebra: String,
        f: String,
        g: String,
    },
    /// Star commutator of two series, or commutator of two operators.
    Commutator {
        #[command(flatten)]
        ctx: Ctx,
        f: String,
        g: String,
    },
    /// Normal form of an operator word.
    Nf {
        #[arg(long)]
        tag: String,
        /// Variables for general tags, e.g. `x1*,x2` (`*` marks invertible).
        #[arg(long)]
        vars: Option<String>,
        word: String,
    },
    /// Action of an ambient element (or a base operator) on a function.
    Apply {
        #[arg(long)]
        polarization: String,
        /// Read ELEMENT as an operator word on the base.
        #[arg(long)]
        operator: bool,
        element: String,
        f: String,
    },
    /// Degree-bounded annihilator kernel.
    Kernel {
        #[arg(long)]
        degree: i32,
        /// Operator algebra of ELEMENT.
        #[arg(
            long,
            conflicts_with = "polarization",
            required_unless_present = "polarization"
        )]
        tag: Option<String>,
        /// Read ELEMENT as an ambient series acting through this polarization.
        #[arg(long)]
        polarization: Option<String>,
        element: String,
    },
    /// Checks quantization data and compares the synthesized product with a
    /// closed form.
    SynthCheck {
        /// torus | torus-corrupted | mixed | mixed-opposite
        #[arg(long, conflicts_with = "data", required_unless_present = "data")]
        builtin: Option<String>,
        /// Quantization data file (JSON).
        #[arg(long)]
        data: Option<String>,
        /// Closed-form algebra to compare against (default: the data's own).
        #[arg(long)]
        against: Option<String>,
        /// Degree bound D of the built-in data.
        #[arg(long, default_value_t = 3)]
        degree: i32,
        /// Exponent bound of the compared monomials.
        #[arg(long, default_value_t = 3)]
        bound: i32,
        #[arg(long, default_value_t = 5)]
        max_mismatches: usize,
    },
    /// Quantizes a plane curve file.
    Quantize {
        #[arg(long)]
        target: String,
        /// Quantize the square of the curve polynomial.
        #[arg(long)]
        square: bool,
        curve: String,
    },
    /// Characteristic polynomial of a Higgs chart file.
    Charpoly { chart: String },
    /// Runs a sampled property suite.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Ctx {
    /// Star algebra (series arguments).
    #[arg(long)]
    algebra: Option<String>,
    /// Operator algebra (operator arguments).
    #[arg(long)]
    tag: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Suite {
    /// Unit, bilinearity, classical limit and associativity.
    Star {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Antisymmetry and Leibniz rule of the Poisson bracket.
    Poisson {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Morphism laws of a symbol map.
    Morphism {
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Quantization conditions of built-in or file data.
    Conditions {
        #[arg(long, conflicts_with = "data", required_unless_present = "data")]
        builtin: Option<String>,
        #[arg(long)]
        data: Option<String>,
        #[arg(long, default_value_t = 3)]
        degree: i32,
    },
}

/// Exit code together with what to print on stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, msg: impl fmt::Display) -> Self {
        let line = msg.to_string().replace('\n', " ");
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {line}\n"),
        }
    }
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<ExprError> for Failure {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Parse { .. } => Failure::Usage(e.to_string()),
            ExprError::Domain(d) => Failure::Domain(d),
        }
    }
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        match e {
            DocError::Syntax(m) => Failure::Usage(m),
            DocError::Domain(d) => Failure::Domain(d),
        }
    }
}

/// Bad flag values (unknown tags, names) are usage errors, not domain ones.
fn flag<T>(r: dq_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Usage(e.to_string()))
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read `{path}`: {e}")))
}

/// Rendered result plus whether a verification found a counterexample.
struct Rendered {
    text: String,
    verified: bool,
}

impl Rendered {
    fn value(text: String) -> Self {
        Rendered {
            text,
            verified: true,
        }
    }
}

pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(text),
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match dispatch(&cli) {
        Ok(r) => Outcome {
            code: if r.verified { EXIT_OK } else { EXIT_VERIFY },
            stdout: r.text,
            stderr: String::new(),
        },
        Err(Failure::Usage(m)) => Outcome::fail(EXIT_USAGE, m),
        Err(Failure::Domain(e)) => Outcome::fail(EXIT_DOMAIN, e),
    }
}

fn line(s: String) -> String {
    s + "\n"
}

fn series_out(cli: &Cli, f: &HSeries, alg: Option<&StarAlgebra>) -> String {
    line(match cli.format {
        Format::Json => serial::to_json(&serial::series_to_doc(f)),
        Format::Text => match alg {
            Some(a) => expr::format_star_series(f, a),
            None => expr::format_series(f),
        },
    })
}

fn operator_out(cli: &Cli, p: &SkewOperator) -> String {
    line(match cli.format {
        Format::Json => serial::to_json(&serial::operator_to_doc(p)),
        Format::Text => expr::format_operator(p),
    })
}

fn parse_vars(s: &str) -> Result<VarSet, Failure> {
    let vars = s
        .split(',')
        .map(|v| {
            let v = v.trim();
            match v.strip_suffix('*') {
                Some(name) => Var::new(name, true),
                None => Var::new(v, false),
            }
        })
        .collect();
    flag(VarSet::new(vars))
}

fn op_algebra(tag: &str, vars: Option<&str>) -> Result<OpAlgebra, Failure> {
    let vs = vars.map(parse_vars).transpose()?;
    flag(OpAlgebra::parse_with_vars(tag, vs.as_ref()))
}

fn load_data(
    builtin: Option<&str>,
    data: Option<&str>,
    degree: i32,
    order: usize,
) -> Result<QuantizationData, Failure> {
    match (builtin, data) {
        (Some(name), _) => flag(QuantizationData::builtin(name, degree, order)),
        (None, Some(path)) => Ok(serial::data_from_doc(&serial::from_json(&read(path)?)?)?),
        (None, None) => Err(Failure::Usage("expected --builtin or --data".into())),
    }
}

fn dispatch(cli: &Cli) -> Result<Rendered, Failure> {
    let n = cli.order;
    Ok(match &cli.command {
        Command::Mul { algebra, f, g } => {
            let alg: StarAlgebra = flag(algebra.parse())?;
            let a = expr::parse_series(f, &alg, n)?;
            let b = expr::parse_series(g, &alg, n)?;
            Rendered::value(series_out(cli, &alg.star_mul(&a, &b)?, Some(&alg)))
        }
        Command::Commutator { ctx, f, g } => {
            if let Some(algebra) = &ctx.algebra {
                let alg: StarAlgebra = flag(algebra.parse())?;
                let a = expr::parse_series(f, &alg, n)?;
                let b = expr::parse_series(g, &alg, n)?;
                Rendered::value(series_out(cli, &alg.star_commutator(&a, &b)?, Some(&alg)))
            } else {
                let alg = op_algebra(ctx.tag.as_deref().expect("clap group"), None)?;
                let p = expr::parse_operator(f, &alg, n)?;
                let q = expr::parse_operator(g, &alg, n)?;
                Rendered::value(operator_out(cli, &p.commutator(&q)?))
            }
        }
        Command::Nf { tag, vars, word } => {
            let alg = op_algebra(tag, vars.as_deref())?;
            Rendered::value(operator_out(cli, &expr::parse_operator(word, &alg, n)?))
        }
        Command::Apply {
            polarization,
            operator,
            element,
            f,
        } => {
            let pol: Polarization = flag(polarization.parse())?;
            let base = pol.base_algebra();
            let ambient = pol.ambient();
            let func = parse_base_function(f, &base, n)?;
            let out = if *operator {
                pol.polar_apply_operator(&expr::parse_operator(element, &base, n)?, &func)?
            } else {
                pol.polar_apply(&expr::parse_series(element, &ambient, n)?, &func)?
            };
            Rendered::value(series_out(cli, &out, None))
        }
        Command::Kernel {
            degree,
            tag,
            polarization,
            element,
        } => {
            let p = match (tag, polarization) {
                (Some(t), _) => expr::parse_operator(element, &op_algebra(t, None)?, n)?,
                (None, Some(pol)) => {
                    let pol: Polarization = flag(pol.parse())?;
                    pol.ambient_to_operator(&expr::parse_series(element, &pol.ambient(), n)?)?
                }
                (None, None) => {
                    return Err(Failure::Usage("expected --tag or --polarization".into()))
                }
            };
            let basis = annihilator_kernel(&p, *degree, n)?;
            Rendered::value(match cli.format {
                Format::Json => {
                    let docs: Vec<SeriesDoc> = basis.iter().map(serial::series_to_doc).collect();
                    line(serial::to_json(&docs))
                }
                Format::Text => basis.iter().map(|f| line(expr::format_series(f))).collect(),
            })
        }
        Command::SynthCheck {
            builtin,
            data,
            against,
            degree,
            bound,
            max_mismatches,
        } => {
            let data = load_data(builtin.as_deref(), data.as_deref(), *degree, n)?;
            let closed: StarAlgebra = match against {
                Some(a) => flag(a.parse())?,
                None => data.matching_closed_form().ok_or_else(|| {
                    Failure::Usage(format!(
                        "no closed form known for `{}`; pass --against",
                        data.name
                    ))
                })?,
            };
            let conditions = verify_quantization_conditions(&data)?;
            // data failing its own conditions has no well-defined product
            let cross = if conditions.passed() {
                synthesis_crosscheck(&data, &closed, *bound, *max_mismatches)?
            } else {
                CrosscheckReport::default()
            };
            let doc =
                serial::synthesis_report_doc(&data.name, &closed.to_string(), &conditions, &cross);
            let text = match cli.format {
                Format::Json => line(serial::to_json(&doc)),
                Format::Text => {
                    let mut s = String::new();
                    for c in &doc.conditions {
                        s += &format!(
                            "{} {}{}\n",
                            if c.passed { "ok  " } else { "FAIL" },
                            c.name,
                            detail(&c.detail)
                        );
                    }
                    s += &format!(
                        "{} {} vs {}: {} pairs, {} mismatches\n",
                        if cross.passed() { "ok  " } else { "FAIL" },
                        doc.data,
                        doc.closed_form,
                        doc.pairs_checked,
                        cross.mismatches.len()
                    );
                    for m in &cross.mismatches {
                        s += &format!(
                            "  ({}) * ({}): expected {}, got {}\n",
                            expr::format_star_series(&m.pair.0, &closed),
                            expr::format_star_series(&m.pair.1, &closed),
                            expr::format_star_series(&m.expected, &closed),
                            expr::format_series(&m.got)
                        );
                    }
                    s
                }
            };
            Rendered {
                text,
                verified: doc.passed,
            }
        }
        Command::Quantize {
            target,
            square,
            curve,
        } => {
            let t: QuantizationTarget = flag(target.parse())?;
            let mut c = serial::curve_from_doc(&serial::from_json(&read(curve)?)?)?;
            if *square {
                c = c.squared();
            }
            Rendered::value(operator_out(cli, &quantize_plane_curve(&c, t, n)?))
        }
        Command::Charpoly { chart } => {
            let h = serial::chart_from_doc(&serial::from_json(&read(chart)?)?)?;
            let c = higgs_char_poly(&h)?;
            Rendered::value(match cli.format {
                Format::Json => line(serial::to_json(&serial::curve_to_doc(&c))),
                Format::Text => line(expr::format_series(&HSeries::from_laurent(
                    c.poly().clone(),
                    0,
                ))),
            })
        }
        Command::Verify { suite } => verify(cli, suite)?,
    })
}

fn detail(d: &str) -> String {
    if d.is_empty() {
        String::new()
    } else {
        format!(": {d}")
    }
}

fn parse_base_function(f: &str, base: &OpAlgebra, n: usize) -> Result<HSeries, Failure> {
    // functions on the base multiply commutatively
    let p = expr::parse_operator(f, base, n)?;
    if p.terms().any(|(k, _)| k.iter().any(|&e| e != 0)) {
        return Err(Failure::Usage(format!(
            "`{f}` is an operator, expected a function"
        )));
    }
    Ok(p.coeff(&vec![0; base.vars().len()]))
}

fn sample_spec(cli: &Cli, samples: usize) -> SampleSpec {
    SampleSpec {
        samples,
        order: cli.order,
        seed: cli.seed,
        ..SampleSpec::default()
    }
}

fn verify(cli: &Cli, suite: &Suite) -> Result<Rendered, Failure> {
    let (json, ok, summary) = match suite {
        Suite::Star { algebra, samples } => {
            let alg: StarAlgebra = flag(algebra.parse())?;
            let r = verify_star_axioms(&alg, &sample_spec(cli, *samples), &Axiom::ALL)?;
            let doc = serial::axiom_report_doc(&r);
            (
                serial::to_json(&doc),
                r.passed(),
                count_summary(&r.algebra, &r.checked, r.failures.iter().map(|w| &w.check)),
            )
        }
        Suite::Poisson { algebra, samples } => {
            let alg: StarAlgebra = flag(algebra.parse())?;
            let r = verify_poisson_laws(&alg, &sample_spec(cli, *samples))?;
            let doc = serial::axiom_report_doc(&r);
            (
                serial::to_json(&doc),
                r.passed(),
                count_summary(&r.algebra, &r.checked, r.failures.iter().map(|w| &w.check)),
            )
        }
        Suite::Morphism { map, samples } => {
            let m: SymbolMap = flag(map.parse())?;
            let base = OperatorSampleSpec::default();
            let spec = OperatorSampleSpec {
                series: SampleSpec {
                    samples: *samples,
                    order: cli.order,
                    seed: cli.seed,
                    ..base.series.clone()
                },
                ..base
            };
            let r = verify_morphism(&m, &spec)?;
            let doc = serial::morphism_report_doc(&r);
            (
                serial::to_json(&doc),
                r.passed(),
                count_summary(&r.map, &r.checked, r.failures.iter().map(|w| &w.check)),
            )
        }
        Suite::Conditions {
            builtin,
            data,
            degree,
        } => {
            let d = load_data(builtin.as_deref(), data.as_deref(), *degree, cli.order)?;
            let r = verify_quantization_conditions(&d)?;
            let docs: Vec<serial::CheckDoc> = r
                .checks
                .iter()
                .map(|c| serial::CheckDoc {
                    name: c.name.clone(),
                    passed: c.passed,
                    detail: c.detail.clone(),
                })
                .collect();
            let summary = r
                .checks
                .iter()
                .map(|c| {
                    format!(
                        "{} {}{}\n",
                        if c.passed { "ok  " } else { "FAIL" },
                        c.name,
                        detail(&c.detail)
                    )
                })
                .collect();
            (serial::to_json(&docs), r.passed(), summary)
        }
    };
    let text = match cli.format {
        Format::Json => line(json),
        Format::Text => summary,
    };
    Ok(Rendered { text, verified: ok })
}

fn count_summary<'a>(
    name: &str,
    checked: &[(String, usize)],
    failed: impl Iterator<Item = &'a String>,
) -> String {
    let failed: Vec<&String> = failed.collect();
    let mut s = String::new();
    for (check, count) in checked {
        let status = if failed.contains(&check) {
            "FAIL"
        } else {
            "ok  "
        };
        s += &format!("{status} {name} {check} ({count} samples)\n");
    }
    s
}
