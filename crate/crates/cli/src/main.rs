//! `nilcomm`: command-line access to the algebra library.
//!
//! Exit codes: 0 success, 1 domain error, 2 parse error, 3 failed check.

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use nilcomm::envelope::{envelope_truncated, gap_witness, EnvelopePresentation};
use nilcomm::filtration::{commutator_filtration, nil_poisson_filtration, FiltrationChain};
use nilcomm::freelie::{expand_to_tensor, lyndon_basis};
use nilcomm::freepoisson::{e_inverse, poisson_bracket, symmetrize, to_lie};
use nilcomm::quantize::{bx_component, QuantizedAlgebra};
use nilcomm::syntax::{
    algebra_from_json, format_compact, format_poisson, format_tensor, parse_poisson, parse_presentation, parse_tensor,
    poisson_to_json, tensor_to_json, AlgebraJson, ParseError,
};
use nilcomm::verify::{checks, find_check, Check};
use nilcomm::{AlgebraError, PoissonElement, TensorElement};

#[derive(Parser)]
#[command(name = "nilcomm", version, about = "Exact free Lie and Poisson algebra computations")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lyndon basis of the free Lie algebra up to a star degree.
    Lyndon {
        #[arg(short = 'n', value_parser = clap::value_parser!(u8).range(1..=9))]
        n_gens: u8,
        #[arg(short = 'd')]
        max_star: usize,
    },
    /// Poisson bracket of two elements.
    Bracket {
        #[arg(short = 'n', value_parser = clap::value_parser!(u8).range(1..=9))]
        n_gens: u8,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// A Lie element written out in the tensor algebra.
    Expand {
        #[arg(short = 'n', value_parser = clap::value_parser!(u8).range(1..=9))]
        n_gens: u8,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Symmetrization of a Poisson element into the tensor algebra.
    E {
        #[arg(short = 'n', value_parser = clap::value_parser!(u8).range(1..=9))]
        n_gens: u8,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Inverse symmetrization of a tensor.
    Einv {
        #[arg(short = 'n', value_parser = clap::value_parser!(u8).range(1..=9))]
        n_gens: u8,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// The p-th component of the star product.
    Bp {
        #[arg(short = 'n', value_parser = clap::value_parser!(u8).range(1..=9))]
        n_gens: u8,
        #[arg(short = 'p')]
        p: usize,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Star product truncated above star degree d.
    Star {
        #[arg(short = 'n', value_parser = clap::value_parser!(u8).range(1..=9))]
        n_gens: u8,
        #[arg(short = 'd')]
        d: usize,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Graded pieces of a truncated Poisson envelope of a presented algebra.
    Envelope {
        file: String,
        #[arg(short = 'd')]
        d: usize,
        #[arg(short = 'N')]
        max_weight: usize,
    },
    /// The image of the naive de Rham map on a relation that vanishes.
    GapWitness {
        #[arg(short = 'n', default_value_t = 4, value_parser = clap::value_parser!(u8).range(4..=9))]
        n_gens: u8,
    },
    /// Commutator and nil-Poisson filtrations of an algebra given as JSON.
    Filtration { file: String },
    /// Associated graded of the quantized algebra against the Poisson pieces.
    Graded {
        #[arg(short = 'n', value_parser = clap::value_parser!(u8).range(1..=9))]
        n_gens: u8,
        #[arg(short = 'd')]
        d: usize,
        #[arg(short = 'N')]
        max_weight: usize,
    },
    /// Image of a noncommutative word under the star-product embedding.
    Ncembed {
        #[arg(short = 'n', value_parser = clap::value_parser!(u8).range(1..=9))]
        n_gens: u8,
        #[arg(short = 'd')]
        d: usize,
        /// Generator indices as digits, e.g. `121`.
        word: String,
    },
    /// Run the built-in property checks.
    Verify {
        /// One check, by name, `cNN` prefix or number.
        #[arg(long)]
        suite: Option<String>,
    },
}

enum Failure {
    Domain(String),
    Parse(String),
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Check(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Parse(m) | Failure::Check(m) => m,
        }
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e.to_string())
    }
}

/// What a command prints: a text rendering and a JSON value.
struct Output {
    text: String,
    json: Value,
}

fn poisson_out(a: &PoissonElement) -> Output {
    Output {
        text: format_poisson(a),
        json: json!(poisson_to_json(a)),
    }
}

fn tensor_out(t: &TensorElement) -> Output {
    Output {
        text: format_tensor(t),
        json: json!(tensor_to_json(t)),
    }
}

fn read_file(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Domain(format!("cannot read {path}: {e}")))
}

fn chain_json(chain: &FiltrationChain) -> Value {
    json!({ "ranks": chain.ranks(), "nil_order": chain.nil_order() })
}

fn chain_text(name: &str, chain: &FiltrationChain) -> String {
    let ranks: Vec<String> = chain.ranks().iter().map(usize::to_string).collect();
    let order = match chain.nil_order() {
        Some(d) => format!("nil of order {d} (F_{} = 0)", d + 1),
        None => "does not vanish".to_string(),
    };
    format!("{name}: ranks {}; {order}", ranks.join(" "))
}

fn run_checks(selected: Vec<Check>) -> (Output, bool) {
    // par_iter keeps the input order, so output stays sorted by name
    let results: Vec<_> = selected.par_iter().map(Check::run).collect();
    let passed = results.iter().filter(|r| r.passed).count();
    let mut text: Vec<String> = results.iter().map(|r| r.line()).collect();
    text.push(format!("{passed} of {} checks passed", results.len()));
    let json = json!({
        "passed": passed,
        "total": results.len(),
        "results": results
            .iter()
            .map(|r| json!({ "name": r.name, "criterion": r.criterion, "passed": r.passed, "detail": r.detail }))
            .collect::<Vec<_>>(),
    });
    (Output { text: text.join("\n"), json }, passed == results.len())
}

fn run(command: Command) -> Result<Output, (Failure, Option<Output>)> {
    let plain = |e: Failure| (e, None);
    match command {
        Command::Lyndon { n_gens, max_star } => {
            let basis = lyndon_basis(n_gens, max_star);
            let text = basis
                .iter()
                .map(|b| {
                    let digits: String = b.word.letters().iter().map(|l| l.to_string()).collect();
                    format!("{digits} {}", b.star_degree())
                })
                .collect::<Vec<_>>()
                .join("\n");
            let json = json!(basis
                .iter()
                .map(|b| json!({ "word": b.word.letters(), "star_degree": b.star_degree() }))
                .collect::<Vec<_>>());
            Ok(Output { text, json })
        }
        Command::Bracket { n_gens, a, b } => {
            let (a, b) = (parse(&a, n_gens).map_err(plain)?, parse(&b, n_gens).map_err(plain)?);
            Ok(poisson_out(&poisson_bracket(&a, &b)))
        }
        Command::Expand { n_gens, expr } => {
            let a = parse(&expr, n_gens).map_err(plain)?;
            let lie = to_lie(&a).ok_or_else(|| plain(AlgebraError::NotALieElement(format_poisson(&a)).into()))?;
            Ok(tensor_out(&expand_to_tensor(&lie)))
        }
        Command::E { n_gens, expr } => Ok(tensor_out(&symmetrize(&parse(&expr, n_gens).map_err(plain)?))),
        Command::Einv { n_gens, expr } => {
            let t = parse_tensor(&expr, n_gens).map_err(|e| plain(e.into()))?;
            Ok(poisson_out(&e_inverse(&t)))
        }
        Command::Bp { n_gens, p, a, b } => {
            let (a, b) = (parse(&a, n_gens).map_err(plain)?, parse(&b, n_gens).map_err(plain)?);
            Ok(poisson_out(&bx_component(&a, &b, p)))
        }
        Command::Star { n_gens, d, a, b } => {
            let q = QuantizedAlgebra::new(n_gens, d).map_err(|e| plain(e.into()))?;
            let (a, b) = (parse(&a, n_gens).map_err(plain)?, parse(&b, n_gens).map_err(plain)?);
            Ok(poisson_out(&q.truncated_product(&a, &b).map_err(|e| plain(e.into()))?))
        }
        Command::Envelope { file, d, max_weight } => {
            let text = read_file(&file).map_err(plain)?;
            let parsed = parse_presentation(&text).map_err(|e| plain(e.into()))?;
            let pres = EnvelopePresentation::new(parsed.n_gens, parsed.relations, d, max_weight)
                .map_err(|e| plain(e.into()))?;
            let pieces = envelope_truncated(&pres);
            let text = pieces
                .iter()
                .map(|p| {
                    format!(
                        "P_{}: rank {} (ambient {}, ideal {}, {})",
                        p.star_degree,
                        p.quotient_rank,
                        p.ambient_basis.len(),
                        p.ideal_span.rows(),
                        p.exactness.as_str()
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            let json = json!(pieces
                .iter()
                .map(|p| json!({
                    "star_degree": p.star_degree,
                    "ambient_rank": p.ambient_basis.len(),
                    "ideal_rank": p.ideal_span.rows(),
                    "quotient_rank": p.quotient_rank,
                    "exactness": p.exactness.as_str(),
                }))
                .collect::<Vec<_>>());
            Ok(Output { text, json })
        }
        Command::GapWitness { n_gens } => {
            let w = gap_witness(n_gens).map_err(|e| plain(e.into()))?;
            let status = if w.naive_image.is_zero() { "zero" } else { "nonzero" };
            let out = Output {
                text: format!(
                    "envelope side: {}; naive image: {} [{status}]",
                    format_compact(&w.envelope_side),
                    format_compact(&w.naive_image)
                ),
                json: json!({
                    "envelope_side": poisson_to_json(&w.envelope_side),
                    "naive_image": poisson_to_json(&w.naive_image),
                    "nonzero": !w.naive_image.is_zero(),
                }),
            };
            if w.envelope_side.is_zero() && !w.naive_image.is_zero() {
                Ok(out)
            } else {
                Err((Failure::Check("the witness did not separate the two sides".into()), Some(out)))
            }
        }
        Command::Filtration { file } => {
            let text = read_file(&file).map_err(plain)?;
            let doc: AlgebraJson =
                serde_json::from_str(&text).map_err(|e| plain(Failure::Parse(format!("{file}: {e}"))))?;
            let alg = algebra_from_json(&doc).map_err(|e| plain(e.into()))?;
            let comm = commutator_filtration(&alg).map_err(|e| plain(e.into()))?;
            let mut lines = vec![chain_text("commutator", &comm)];
            let mut json = json!({ "dim": alg.dim(), "commutator": chain_json(&comm) });
            if alg.has_bracket() {
                let np = nil_poisson_filtration(&alg).map_err(|e| plain(e.into()))?;
                lines.push(chain_text("nil-Poisson", &np));
                json["nil_poisson"] = chain_json(&np);
            }
            Ok(Output { text: lines.join("\n"), json })
        }
        Command::Graded { n_gens, d, max_weight } => {
            let q = QuantizedAlgebra::new(n_gens, d).map_err(|e| plain(e.into()))?;
            let ranks = q.graded_of_q(max_weight);
            let iso = q.graded_isomorphism_holds(max_weight);
            let mut lines: Vec<String> = ranks
                .iter()
                .map(|r| {
                    let verdict = if r.equal { "ok" } else { "MISMATCH" };
                    format!("gr_{}: rank {} expected {} {verdict}", r.n, r.rank, r.expected)
                })
                .collect();
            lines.push(format!("isomorphism with the Poisson pieces: {}", if iso { "yes" } else { "no" }));
            let out = Output {
                text: lines.join("\n"),
                json: json!({
                    "pieces": ranks
                        .iter()
                        .map(|r| json!({ "n": r.n, "rank": r.rank, "expected": r.expected, "equal": r.equal }))
                        .collect::<Vec<_>>(),
                    "isomorphism": iso,
                }),
            };
            if iso && ranks.iter().all(|r| r.equal) {
                Ok(out)
            } else {
                Err((Failure::Check("graded pieces disagree".into()), Some(out)))
            }
        }
        Command::Ncembed { n_gens, d, word } => {
            let letters = word
                .bytes()
                .enumerate()
                .map(|(k, b)| match b {
                    b'1'..=b'9' => Ok(b - b'0'),
                    _ => Err(Failure::Parse(format!("word: expected a digit 1-9 at offset {}", k + 1))),
                })
                .collect::<Result<Vec<u8>, _>>()
                .map_err(plain)?;
            let q = QuantizedAlgebra::new(n_gens, d).map_err(|e| plain(e.into()))?;
            Ok(poisson_out(&q.nc_embed(&letters).map_err(|e| plain(e.into()))?))
        }
        Command::Verify { suite } => {
            let selected = match suite {
                None => checks(),
                Some(key) => {
                    vec![find_check(&key).ok_or_else(|| plain(Failure::Parse(format!("no check named {key}"))))?]
                }
            };
            let (out, ok) = run_checks(selected);
            if ok {
                Ok(out)
            } else {
                Err((Failure::Check("some checks failed".into()), Some(out)))
            }
        }
    }
}

fn parse(src: &str, n_gens: u8) -> Result<PoissonElement, Failure> {
    Ok(parse_poisson(src, n_gens)?)
}

fn print(out: &Output, json: bool) {
    let body = if json {
        serde_json::to_string_pretty(&out.json).expect("JSON values serialize")
    } else {
        out.text.clone()
    };
    // a closed pipe (`| head`) is not an error worth reporting
    let _ = writeln!(io::stdout(), "{body}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print(&out, cli.json);
            ExitCode::SUCCESS
        }
        Err((failure, partial)) => {
            if let Some(out) = partial {
                print(&out, cli.json);
            }
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
