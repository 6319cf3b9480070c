//! The `invkit` command line.
//!
//! Every subcommand prints a text report to standard output and, with
//! `--json <path>`, writes a structured report wrapped as
//! `{"command", "pass", "report"}`. Exit status is 0 when every requested
//! check passed, 1 when a verification failed and 2 for usage or input
//! errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value as Json};

use crate::decomp::{
    build_pool, decompose, is_decomposable, lemma::lemma_pool, verify_indecomposability_argument, verify_lemma_dec,
    verify_generator_reduction, CaseDesc, Claim, LemmaPart, LinearTarget, Schedule,
};
use crate::error::{Error, Result};
use crate::genmat::{MatrixKind, ScalarMatrix};
use crate::invlang::{default_d, parse_expr, standard_set, standard_set_for_field, CASE_NAMES};
use crate::scalars::{FieldDescriptor, Scalar};
use crate::septest::{search_witness, separates, verify_minimality, MatrixTuple, Sampler, WITNESS_CASES};

#[derive(Parser, Debug)]
#[command(name = "invkit", version, about = "Exact computations with matrix invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Base field: Q, F<p>, QiS2 or F<p>iS2:<i>,<sqrt2>
    #[arg(long, global = true)]
    field: Option<String>,
    /// Write the structured report to this path
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Print decomposition certificates
    #[arg(long, global = true)]
    certificate: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an invariant at the tuples of an input file
    Eval {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        input: PathBuf,
    },
    /// Expand an invariant of generic matrices as a polynomial
    Expand {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value = "symmetric")]
        kind: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Check whether a standard set separates the two tuples of an input file
    Separate {
        #[arg(long)]
        case: String,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        input: PathBuf,
    },
    /// Machine checks of the witness tables and decomposability statements
    #[command(subcommand)]
    Verify(Verify),
    /// Decide whether an integer combination of invariants is decomposable
    Decompose {
        /// e.g. "tr(1 1 2 2 1 2)" or "tr(1 2 1 1 3) + tr(1 1 2 1 3)"
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "symmetric")]
        kind: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Random search for a witness pair for one member of a standard set
    SearchWitness {
        #[arg(long)]
        case: String,
        #[arg(long)]
        d: Option<usize>,
        /// the separator, e.g. "tr(1 2)"
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
        #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
        lo: i64,
        #[arg(long, default_value_t = 2)]
        hi: i64,
        /// slots (1-based) shared by both tuples of a candidate pair
        #[arg(long, value_delimiter = ',')]
        shared: Vec<usize>,
    },
    /// List the standard invariant sets
    ListSets,
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Check the built-in witness pairs of a case (all cases by default)
    Theorem {
        #[arg(long)]
        case: Option<String>,
    },
    /// Check the decomposability identities, one part or all
    Lemma {
        #[arg(long, default_value = "all")]
        part: String,
        #[arg(long, default_value_t = 2)]
        max_word_len: usize,
        #[arg(long, default_value_t = 2)]
        max_tail_len: usize,
    },
    /// Indecomposability of f1..f4: the span check over the field, plus the
    /// nilpotent substitution argument (over QiS2 unless the field has i and sqrt2)
    Indecomposable {
        #[arg(long, default_value = "all")]
        target: String,
    },
    /// Reduction of the extra generators to the generating set
    Reduction,
    /// Everything above
    All,
}

/// Outcome of one subcommand.
struct Outcome {
    command: String,
    pass: bool,
    text: String,
    report: Json,
}

/// Runs the command line `args` (including the program name) and returns
/// the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if let Some(path) = &cli.json {
                if let Err(e) = write_json(path, &out) {
                    eprintln!("error: {e}");
                    return 2;
                }
            }
            if out.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn write_json(path: &Path, out: &Outcome) -> std::io::Result<()> {
    let doc = json!({ "command": out.command, "pass": out.pass, "report": out.report });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable report");
    s.push('\n');
    fs::write(path, s)
}

fn field_or(cli: &Cli, default: FieldDescriptor) -> Result<FieldDescriptor> {
    match &cli.field {
        Some(s) => s.parse(),
        None => Ok(default),
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let q = FieldDescriptor::Rationals;
    match &cli.command {
        Command::Eval { expr, input } => eval(cli, expr, input),
        Command::Expand { expr, kind, n, d } => {
            let field = field_or(cli, q)?;
            let e = parse_expr(expr)?;
            let kind: MatrixKind = kind.parse()?;
            let d = d.unwrap_or_else(|| e.word.max_index());
            let p = e.expand(kind, *n, d, field)?;
            Ok(Outcome {
                command: "expand".into(),
                pass: true,
                text: format!("{p}\n"),
                report: json!({ "expr": e.to_string(), "kind": kind.to_string(), "n": n, "d": d, "field": field.to_string(), "polynomial": p.to_json() }),
            })
        }
        Command::Separate { case, d, input } => {
            let doc = read_input(input)?;
            let field = input_field(cli, &doc)?;
            let d = d.or_else(|| default_d(case)).ok_or_else(|| Error::UnknownCase(case.clone()))?;
            let set = standard_set_for_field(case, d, &field)?;
            let tuples = input_tuples(&doc, &field)?;
            if tuples.len() != 2 {
                return Err(Error::Input(format!("separate needs two tuples, found {}", tuples.len())));
            }
            let rep = separates(&set, &tuples[0], &tuples[1])?;
            let text = match &rep.first_separator {
                Some(f) => format!("separated by {}\n", f.to_notation(set.kind)),
                None => "not separated\n".to_string(),
            };
            Ok(Outcome { command: "separate".into(), pass: true, text, report: rep.to_json() })
        }
        Command::Verify(v) => verify(cli, v),
        Command::Decompose { target, kind, n, d } => {
            let field = field_or(cli, q)?;
            let target = parse_linear(target)?;
            let kind: MatrixKind = kind.parse()?;
            let d = d.unwrap_or_else(|| target.terms.iter().map(|(_, e)| e.word.max_index()).max().unwrap_or(1));
            let deg = target.multidegree(*n, d)?.degree();
            let pool = build_pool(CaseDesc::new(kind, *n, d, field), deg.saturating_sub(1).max(1))?;
            let rep = decompose(&target, &pool)?;
            let mut text = format!(
                "{} over {}: {}{}\n",
                target.to_notation(kind),
                field,
                if rep.decomposable { "decomposable" } else { "not decomposable" },
                if rep.verified { "" } else { " (unconfirmed)" }
            );
            if cli.certificate {
                text.push_str(&rep.certificate_text());
            }
            Ok(Outcome { command: "decompose".into(), pass: rep.verified, text, report: rep.to_json() })
        }
        Command::SearchWitness { case, d, f, seed, budget, lo, hi, shared } => {
            let field = field_or(cli, q)?;
            let d = d.or_else(|| default_d(case)).ok_or_else(|| Error::UnknownCase(case.clone()))?;
            let set = standard_set(case, d)?;
            let f = parse_expr(f)?;
            let sampler = Sampler { lo: *lo, hi: *hi, seed: *seed, shared: shared.clone(), ..Sampler::default() };
            let found = search_witness(&set, &f, &sampler, *budget, &field)?;
            let text = match &found {
                Some(w) => format!("found a witness for {}\n{}\n", f.to_notation(set.kind), serde_json::to_string(&w.to_json()).unwrap()),
                None => format!("no witness for {} within {budget} attempts\n", f.to_notation(set.kind)),
            };
            Ok(Outcome {
                command: "search-witness".into(),
                pass: found.is_some(),
                text,
                report: json!({ "case": case, "d": d, "f": f.to_string(), "seed": seed, "budget": budget, "witness": found.map(|w| w.to_json()) }),
            })
        }
        Command::ListSets => {
            let mut text = String::new();
            let mut sets = Vec::new();
            for case in CASE_NAMES {
                let d = default_d(case).unwrap_or(2);
                let set = standard_set(case, d)?;
                let names: Vec<String> = set.exprs.iter().map(|e| e.to_notation(set.kind)).collect();
                text.push_str(&format!("{case} (n={}, d={d}, {}, {} members): {}\n", set.n, set.kind, set.len(), names.join(", ")));
                sets.push(set.to_json());
            }
            Ok(Outcome { command: "list-sets".into(), pass: true, text, report: Json::Array(sets) })
        }
    }
}

fn eval(cli: &Cli, expr: &str, input: &Path) -> Result<Outcome> {
    let doc = read_input(input)?;
    let field = input_field(cli, &doc)?;
    let e = parse_expr(expr)?;
    let tuples = input_tuples(&doc, &field)?;
    let mut text = String::new();
    let mut values = Vec::new();
    for t in &tuples {
        let v = e.evaluate(&t.matrices)?;
        text.push_str(&format!("{v}\n"));
        values.push(v.to_json());
    }
    Ok(Outcome {
        command: "eval".into(),
        pass: true,
        text,
        report: json!({ "expr": e.to_string(), "field": field.to_string(), "values": values }),
    })
}

fn read_input(path: &Path) -> Result<Json> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// `--field` wins over the file's `field`, which defaults to Q.
fn input_field(cli: &Cli, doc: &Json) -> Result<FieldDescriptor> {
    match (&cli.field, doc["field"].as_str()) {
        (Some(s), _) => s.parse(),
        (None, Some(s)) => s.parse(),
        (None, None) => Ok(FieldDescriptor::Rationals),
    }
}

/// Reads `{n, d, kind, tuples}`. A matrix is either a list of rows or an
/// object `{n, kind, entries}`.
fn input_tuples(doc: &Json, field: &FieldDescriptor) -> Result<Vec<MatrixTuple>> {
    let kind: MatrixKind = doc["kind"].as_str().unwrap_or("general").parse()?;
    let tuples = doc["tuples"].as_array().ok_or_else(|| Error::Input("input needs `tuples`".into()))?;
    let mut out = Vec::new();
    for t in tuples {
        let mats = t.as_array().ok_or_else(|| Error::Input("a tuple is a list of matrices".into()))?;
        let mut ms = Vec::new();
        for m in mats {
            let mat = match m {
                Json::Array(rows) => {
                    let n = rows.len();
                    let mut entries = Vec::with_capacity(n * n);
                    for row in rows {
                        let row = row.as_array().ok_or_else(|| Error::Input("matrix rows must be arrays".into()))?;
                        for x in row {
                            entries.push(Scalar::from_json(x, field)?);
                        }
                    }
                    ScalarMatrix::from_entries(n, entries)?
                }
                _ => ScalarMatrix::from_json(m, field)?.0,
            };
            mat.check_kind(kind)?;
            ms.push(mat);
        }
        let t = MatrixTuple::new(*field, kind, ms)?;
        if let Some(n) = doc["n"].as_u64() {
            if t.n() != n as usize {
                return Err(Error::SizeMismatch(format!("declared n = {n}, found {}x{}", t.n(), t.n())));
            }
        }
        if let Some(d) = doc["d"].as_u64() {
            if t.d() != d as usize {
                return Err(Error::SizeMismatch(format!("declared d = {d}, found {} matrices", t.d())));
            }
        }
        out.push(t);
    }
    Ok(out)
}

/// Parses `c1*e1 + c2*e2 - ...` with optional integer coefficients.
pub fn parse_linear(text: &str) -> Result<LinearTarget> {
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut sign = 1i64;
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let push = |chunk: &str, sign: i64, terms: &mut Vec<(i64, crate::invlang::InvariantExpr)>| -> Result<()> {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            return Err(Error::Parse { pos: 0, msg: format!("empty term in `{text}`") });
        }
        let (coeff, rest) = match chunk.split_once('*') {
            Some((c, r)) if c.trim().parse::<i64>().is_ok() => (c.trim().parse::<i64>().unwrap(), r),
            _ => (1, chunk),
        };
        terms.push((sign * coeff, parse_expr(rest)?));
        Ok(())
    };
    for &(pos, ch) in &bytes {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 => {
                if !text[start..pos].trim().is_empty() {
                    push(&text[start..pos], sign, &mut terms)?;
                }
                sign = if ch == '-' { -1 } else { 1 };
                start = pos + 1;
            }
            _ => {}
        }
    }
    push(&text[start..], sign, &mut terms)?;
    Ok(LinearTarget { terms })
}

struct Section {
    name: String,
    pass: bool,
    text: String,
    report: Json,
}

fn theorem_sections(field: FieldDescriptor, case: Option<&str>) -> Result<Vec<Section>> {
    let cases: Vec<&str> = match case {
        Some(c) => vec![c],
        None => WITNESS_CASES.iter().map(|(c, _)| *c).collect(),
    };
    let mut out = Vec::new();
    for c in cases {
        let rep = verify_minimality(c, &field)?;
        let kind = standard_set(c, default_d(c).unwrap_or(2))?.kind;
        let mut text = rep.to_text(kind);
        let passed = rep.entries.iter().filter(|e| e.pass()).count();
        text.push_str(&format!("{c}: {passed}/{} witnesses pass\n", rep.entries.len()));
        out.push(Section { name: format!("theorem {c}"), pass: rep.pass(), text, report: rep.to_json() });
    }
    Ok(out)
}

fn lemma_sections(field: FieldDescriptor, part: &str, schedule: &Schedule, certs: bool) -> Result<Vec<Section>> {
    let parts: Vec<LemmaPart> = if part == "all" { LemmaPart::ALL.to_vec() } else { vec![part.parse()?] };
    let mut out = Vec::new();
    for p in parts {
        let rep = verify_lemma_dec(p, field, schedule)?;
        out.push(Section { name: format!("lemma {p}"), pass: rep.pass(), text: rep.to_text(certs), report: rep.to_json() });
    }
    Ok(out)
}

/// Span-based decomposability of the claims over `field`, plus the
/// substitution argument over `field` (or over `Q(i, sqrt2)` when `field`
/// lacks the roots).
fn indecomposable_sections(field: FieldDescriptor, target: &str, certs: bool) -> Result<Vec<Section>> {
    let claims: Vec<Claim> = if target == "all" { Claim::ALL.to_vec() } else { vec![target.parse()?] };
    let mut out = Vec::new();
    let span_field = match field.characteristic() {
        0 => FieldDescriptor::Rationals,
        p => FieldDescriptor::prime(p)?,
    };
    let pool = lemma_pool(span_field)?;
    let p = span_field.characteristic();
    let mut text = format!("span check over {span_field}\n");
    let mut reports = Vec::new();
    let mut pass = true;
    for &c in &claims {
        let rep = is_decomposable(&c.target(), &pool)?;
        let expect_decomposable = c == Claim::F4 && p != 3;
        let ok = rep.verified && rep.decomposable == expect_decomposable;
        pass &= ok;
        text.push_str(&format!(
            "  {} {}: {} ({})\n",
            c,
            c.target().to_notation(MatrixKind::Symmetric),
            if rep.decomposable { "decomposable" } else { "not decomposable" },
            if ok { "as expected" } else { "UNEXPECTED" }
        ));
        if certs {
            text.push_str(&rep.certificate_text());
        }
        reports.push(json!({ "claim": c.to_string(), "expected_decomposable": expect_decomposable, "pass": ok, "report": rep.to_json() }));
    }
    out.push(Section { name: format!("indecomposable span {span_field}"), pass, text, report: Json::Array(reports) });
    let arg_field = if field.has_special_roots() { field } else { FieldDescriptor::QAdjoinISqrt2 };
    for c in claims {
        let rep = verify_indecomposability_argument(c, arg_field)?;
        out.push(Section { name: format!("indecomposable argument {c} {arg_field}"), pass: rep.pass(), text: rep.to_text(), report: rep.to_json() });
    }
    Ok(out)
}

fn reduction_sections(field: FieldDescriptor, certs: bool) -> Result<Vec<Section>> {
    let rep = verify_generator_reduction(field)?;
    Ok(vec![Section { name: format!("reduction {field}"), pass: rep.pass(), text: rep.to_text(certs), report: rep.to_json() }])
}

fn verify(cli: &Cli, v: &Verify) -> Result<Outcome> {
    let q = FieldDescriptor::Rationals;
    let certs = cli.certificate;
    let (command, sections) = match v {
        Verify::Theorem { case } => ("verify theorem", theorem_sections(field_or(cli, q)?, case.as_deref())?),
        Verify::Lemma { part, max_word_len, max_tail_len } => {
            let schedule = Schedule { max_word_len: *max_word_len, max_tail_len: *max_tail_len, ..Schedule::default() };
            ("verify lemma", lemma_sections(field_or(cli, q)?, part, &schedule, certs)?)
        }
        Verify::Indecomposable { target } => {
            ("verify indecomposable", indecomposable_sections(field_or(cli, FieldDescriptor::QAdjoinISqrt2)?, target, certs)?)
        }
        Verify::Reduction => ("verify reduction", reduction_sections(field_or(cli, q)?, certs)?),
        Verify::All => {
            let field = field_or(cli, q)?;
            let mut s = theorem_sections(field, None)?;
            s.extend(lemma_sections(field, "all", &Schedule::default(), certs)?);
            s.extend(indecomposable_sections(field, "all", certs)?);
            s.extend(reduction_sections(field, certs)?);
            ("verify all", s)
        }
    };
    let pass = sections.iter().all(|s| s.pass);
    let mut text = String::new();
    for s in &sections {
        text.push_str(&s.text);
    }
    if sections.len() > 1 {
        text.push_str("summary:\n");
        for s in &sections {
            text.push_str(&format!("  {:<44} {}\n", s.name, if s.pass { "pass" } else { "FAIL" }));
        }
    }
    let report = Json::Array(sections.into_iter().map(|s| json!({ "name": s.name, "pass": s.pass, "report": s.report })).collect());
    Ok(Outcome { command: command.into(), pass, text, report })
}
