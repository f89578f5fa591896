//! Command-line front end.
//!
//! Input is either a JSON document `{"n": 3, "J": [[..], ..], "A": [[..], ..]}`
//! (`A` only for `verify`) or a plain comma-separated file holding the rows
//! of `J`. Reports go to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Number, Value};

use crate::cubic::{CaseLabel, SolutionKind};
use crate::linalg::MatR;
use crate::oracle::{closed_form_sweep, roundtrip_certify, SearchConfig};
use crate::solver::{
    classify, residual, solve, Classification, Current, Potential, SolutionReport,
};
use crate::Tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Structured,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "ymconst",
    version,
    about = "Constant solutions of SU(2) Yang-Mills with a constant current"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Residual threshold, relative to 1 + ‖J‖
    #[arg(long, global = true, default_value = "1e-9")]
    pub tol: f64,

    /// Relative gap below which singular values count as equal
    #[arg(long = "tie-tol", global = true, default_value = "1e-9")]
    pub tie_tol: f64,

    /// Relative size below which singular values count as zero
    #[arg(long = "zero-tol", global = true, default_value = "1e-12")]
    pub zero_tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Structured)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every constant solution for the current in FILE
    Solve { file: PathBuf },
    /// Check that the potential A in FILE solves its current J
    Verify { file: PathBuf },
    /// Print singular values, rank and case of the current in FILE
    Classify { file: PathBuf },
    /// Run the round-trip and brute-force cross checks
    Certify {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Largest dimension drawn in round-trip trials
        #[arg(long = "n", default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random positive triples for the Newton-vs-closed-form sweep
        #[arg(long, default_value_t = 50)]
        sweep: usize,
        /// Newton starts per triple
        #[arg(long, default_value_t = 500)]
        starts: usize,
    },
}

/// Parsed input file.
#[derive(Clone, Debug, PartialEq)]
pub struct InputDocument {
    pub n: usize,
    pub j: MatR,
    pub a: Option<MatR>,
}

#[derive(Debug)]
struct InputError(String);

fn input_err<T>(msg: impl Into<String>) -> Result<T, InputError> {
    Err(InputError(msg.into()))
}

fn parse_matrix(v: &Value, field: &str) -> Result<MatR, InputError> {
    let rows = match v.as_array() {
        Some(r) => r,
        None => return input_err(format!("field `{field}`: expected an array of rows")),
    };
    let mut data = Vec::with_capacity(rows.len() * 3);
    for (i, row) in rows.iter().enumerate() {
        let Some(entries) = row.as_array() else {
            return input_err(format!("field `{field}`: row {} is not an array", i + 1));
        };
        if entries.len() != 3 {
            return input_err(format!(
                "field `{field}`: row {} has {} entries, expected 3",
                i + 1,
                entries.len()
            ));
        }
        for (c, x) in entries.iter().enumerate() {
            match x.as_f64() {
                Some(f) if f.is_finite() => data.push(f),
                _ => {
                    return input_err(format!(
                        "field `{field}`: entry ({}, {}) is not a finite number",
                        i + 1,
                        c + 1
                    ))
                }
            }
        }
    }
    MatR::new(rows.len(), 3, data).map_err(|e| InputError(format!("field `{field}`: {e}")))
}

fn parse_structured(text: &str) -> Result<InputDocument, InputError> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| InputError(format!("malformed document: {e}")))?;
    let Some(obj) = doc.as_object() else {
        return input_err("document must be an object with fields `n` and `J`");
    };
    let n = match obj.get("n") {
        None => return input_err("field `n`: missing"),
        Some(v) => match v.as_u64() {
            Some(n) if n >= 1 => n as usize,
            _ => return input_err(format!("field `n`: expected a positive integer, got {v}")),
        },
    };
    let Some(jv) = obj.get("J") else {
        return input_err("field `J`: missing");
    };
    let j = parse_matrix(jv, "J")?;
    if j.rows() != n {
        return input_err(format!("field `J`: has {} rows, but n = {n}", j.rows()));
    }
    let a = match obj.get("A") {
        None | Some(Value::Null) => None,
        Some(av) => {
            let a = parse_matrix(av, "A")?;
            if a.rows() != n {
                return input_err(format!("field `A`: has {} rows, but n = {n}", a.rows()));
            }
            Some(a)
        }
    };
    Ok(InputDocument { n, j, a })
}

fn parse_csv(text: &str) -> Result<InputDocument, InputError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut data = Vec::new();
    let mut n = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| InputError(format!("csv row {}: {e}", i + 1)))?;
        if rec.len() != 3 {
            return input_err(format!(
                "field `J`: csv row {} has {} entries, expected 3",
                i + 1,
                rec.len()
            ));
        }
        for (c, s) in rec.iter().enumerate() {
            match s.parse::<f64>() {
                Ok(x) if x.is_finite() => data.push(x),
                _ => {
                    return input_err(format!(
                        "field `J`: entry ({}, {}) `{s}` is not a finite number",
                        i + 1,
                        c + 1
                    ))
                }
            }
        }
        n += 1;
    }
    if n == 0 {
        return input_err("field `J`: csv file has no rows");
    }
    let j = MatR::new(n, 3, data).map_err(|e| InputError(format!("field `J`: {e}")))?;
    Ok(InputDocument { n, j, a: None })
}

/// Parses document text; JSON when it starts with `{`, CSV otherwise.
pub fn parse_input(text: &str) -> Result<InputDocument, String> {
    let t = text.trim_start_matches('\u{feff}').trim_start();
    let r = if t.starts_with('{') {
        parse_structured(t)
    } else {
        parse_csv(t)
    };
    r.map_err(|e| e.0)
}

fn read_input(path: &Path) -> Result<InputDocument, String> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| format!("cannot read stdin: {e}"))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?
    };
    parse_input(&text)
}

/// JSON number carrying 17 significant digits.
fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    if x == 0.0 {
        return Value::Number(Number::from(0));
    }
    Number::from_str(&format!("{x:.16e}"))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn mat_json(m: &MatR) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|&x| num(x)).collect()))
            .collect(),
    )
}

fn csv_field(x: f64) -> String {
    format!("{x:.16e}")
}

fn tolerances_json(tol: &Tolerances, gate: f64) -> Value {
    json!({
        "tol": num(gate),
        "zero_tol": num(tol.zero),
        "tie_tol": num(tol.tie),
    })
}

fn expected_text(case: CaseLabel, rank: usize) -> String {
    match case {
        CaseLabel::OneDimensional if rank == 0 => "arbitrary solution expected".to_string(),
        CaseLabel::OneDimensional => "no solutions expected".to_string(),
        _ => match case.expected_count() {
            None => "a family of solutions expected".to_string(),
            Some(0) => "no solutions expected".to_string(),
            Some(1) => "1 solution expected".to_string(),
            Some(k) => format!("{k} solutions expected"),
        },
    }
}

fn case_words(case: CaseLabel) -> &'static str {
    match case {
        CaseLabel::ZeroCurrent => "zero current",
        CaseLabel::Rank1NoSolution => "rank one",
        CaseLabel::Rank2Unique => "rank two",
        CaseLabel::AllEqual => "all equal",
        CaseLabel::TwoLargeEqual => "two largest equal",
        CaseLabel::TwoSmallEqual => "two smallest equal",
        CaseLabel::AllDistinct => "all distinct",
        CaseLabel::OneDimensional => "one-dimensional",
    }
}

/// One-line summary such as `rank 3, all distinct, 2 solutions expected`.
pub fn classification_summary(c: &Classification) -> String {
    format!(
        "rank {}, {}, {}",
        c.rank,
        case_words(c.case),
        expected_text(c.case, c.rank)
    )
}

fn kind_str(kind: SolutionKind) -> &'static str {
    match kind {
        SolutionKind::Empty => "empty",
        SolutionKind::Finite => "finite",
        SolutionKind::OneParameterFamily => "family",
    }
}

fn report_json(r: &SolutionReport, gate: f64) -> Value {
    let solutions: Vec<Value> = r
        .solutions
        .iter()
        .map(|s| {
            let mut comps = Vec::new();
            for mu in 0..r.n {
                for nu in mu + 1..r.n {
                    let f = s.strength.component(mu, nu);
                    comps.push(json!({
                        "mu": mu + 1,
                        "nu": nu + 1,
                        "F": f.iter().map(|&x| num(x)).collect::<Vec<_>>(),
                    }));
                }
            }
            json!({
                "A": mat_json(s.potential.coeffs()),
                "A_diagonal": mat_json(&s.diagonal),
                "F": comps,
                "f2coeff": num(s.strength.f2coeff),
                "residual": num(s.residual),
            })
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("n".into(), json!(r.n));
    obj.insert("case".into(), json!(r.case.as_str()));
    obj.insert("kind".into(), json!(kind_str(r.kind)));
    obj.insert("rank".into(), json!(r.rank));
    obj.insert(
        "singular_values".into(),
        Value::Array(r.singular_values.iter().map(|&x| num(x)).collect()),
    );
    obj.insert("K".into(), r.k.map_or(Value::Null, num));
    obj.insert("solutions".into(), Value::Array(solutions));
    obj.insert(
        "family".into(),
        r.family.as_ref().map_or(Value::Null, |f| {
            json!({
                "canonical": mat_json(&f.canonical),
                "freedom": f.freedom,
                "yields_new_potentials": f.yields_new_potentials,
            })
        }),
    );
    obj.insert(
        "frame".into(),
        r.frame.as_ref().map_or(
            Value::Null,
            |f| json!({ "Q": mat_json(&f.q), "P": mat_json(&f.p) }),
        ),
    );
    obj.insert("tolerances".into(), tolerances_json(&r.tolerances, gate));
    Value::Object(obj)
}

fn emit(out: &mut dyn Write, v: &Value) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    tol: Tolerances,
    gate: f64,
    format: Format,
}

impl Ctx<'_> {
    fn gate_for(&self, j: &MatR) -> f64 {
        self.gate * (1.0 + j.frobenius_norm())
    }
}

fn cmd_solve(ctx: &mut Ctx, doc: InputDocument) -> std::io::Result<i32> {
    let j = Current::new(doc.j).expect("parser checks shape");
    let report = match solve(&j, &ctx.tol) {
        Ok(r) => r,
        Err(e) => {
            writeln!(ctx.err, "error: {e}")?;
            return Ok(EXIT_INVARIANT);
        }
    };
    match ctx.format {
        Format::Structured => emit(ctx.out, &report_json(&report, ctx.gate))?,
        Format::Csv => {
            writeln!(ctx.out, "solution,row,A1,A2,A3,f2coeff,residual")?;
            for (k, s) in report.solutions.iter().enumerate() {
                let a = s.potential.coeffs();
                for i in 0..a.rows() {
                    let r = a.row(i);
                    writeln!(
                        ctx.out,
                        "{},{},{},{},{},{},{}",
                        k + 1,
                        i + 1,
                        csv_field(r[0]),
                        csv_field(r[1]),
                        csv_field(r[2]),
                        csv_field(s.strength.f2coeff),
                        csv_field(s.residual)
                    )?;
                }
            }
        }
    }
    let gate = ctx.gate_for(j.coeffs());
    let worst = report.max_residual();
    if worst > gate {
        writeln!(
            ctx.err,
            "error: residual {worst:e} exceeds threshold {gate:e}"
        )?;
        return Ok(EXIT_INVARIANT);
    }
    Ok(EXIT_OK)
}

fn cmd_verify(ctx: &mut Ctx, doc: InputDocument) -> std::io::Result<i32> {
    let Some(a) = doc.a else {
        writeln!(
            ctx.err,
            "error: field `A`: missing (verify needs a potential)"
        )?;
        return Ok(EXIT_INPUT);
    };
    let j = Current::new(doc.j).expect("parser checks shape");
    let a = Potential::new(a).expect("parser checks shape");
    let r = residual(&a, &j).expect("parser checks row counts");
    let worst = r.max_abs();
    let gate = ctx.gate_for(j.coeffs());
    let ok = worst <= gate;
    match ctx.format {
        Format::Structured => emit(
            ctx.out,
            &json!({
                "n": doc.n,
                "residual_max": num(worst),
                "residual": mat_json(&r),
                "threshold": num(gate),
                "pass": ok,
                "tolerances": tolerances_json(&ctx.tol, ctx.gate),
            }),
        )?,
        Format::Csv => {
            writeln!(ctx.out, "row,R1,R2,R3")?;
            for i in 0..r.rows() {
                let x = r.row(i);
                writeln!(
                    ctx.out,
                    "{},{},{},{}",
                    i + 1,
                    csv_field(x[0]),
                    csv_field(x[1]),
                    csv_field(x[2])
                )?;
            }
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_classify(ctx: &mut Ctx, doc: InputDocument) -> std::io::Result<i32> {
    let j = Current::new(doc.j).expect("parser checks shape");
    let c = match classify(&j, &ctx.tol) {
        Ok(c) => c,
        Err(e) => {
            writeln!(ctx.err, "error: {e}")?;
            return Ok(EXIT_INVARIANT);
        }
    };
    let summary = classification_summary(&c);
    match ctx.format {
        Format::Structured => emit(
            ctx.out,
            &json!({
                "n": c.n,
                "singular_values": c.singular_values.iter().map(|&x| num(x)).collect::<Vec<_>>(),
                "rank": c.rank,
                "case": c.case.as_str(),
                "expected_solutions": match c.case.expected_count() {
                    Some(k) => json!(k),
                    None if c.case == CaseLabel::OneDimensional && c.rank == 1 => json!(0),
                    None => json!("family"),
                },
                "summary": summary,
                "tolerances": tolerances_json(&ctx.tol, ctx.gate),
            }),
        )?,
        Format::Csv => {
            writeln!(ctx.out, "s1,s2,s3,rank,case")?;
            let s = c.singular_values;
            writeln!(
                ctx.out,
                "{},{},{},{},{}",
                csv_field(s[0]),
                csv_field(s[1]),
                csv_field(s[2]),
                c.rank,
                c.case.as_str()
            )?;
        }
    }
    writeln!(ctx.err, "{summary}")?;
    Ok(EXIT_OK)
}

fn cmd_certify(
    ctx: &mut Ctx,
    trials: usize,
    n_max: usize,
    seed: u64,
    sweep: usize,
    starts: usize,
) -> std::io::Result<i32> {
    let rt = match roundtrip_certify(trials, n_max, seed) {
        Ok(r) => r,
        Err(e) => {
            writeln!(ctx.err, "error: {e}")?;
            return Ok(EXIT_INPUT);
        }
    };
    let cfg = SearchConfig {
        starts,
        ..SearchConfig::default()
    };
    let sw = match closed_form_sweep(sweep, (0.5, 10.0), seed, &cfg) {
        Ok(r) => r,
        Err(e) => {
            writeln!(ctx.err, "error: {e}")?;
            return Ok(EXIT_INPUT);
        }
    };
    let pass = rt.all_pass() && sw.all_match();
    match ctx.format {
        Format::Structured => emit(
            ctx.out,
            &json!({
                "seed": seed,
                "roundtrip": {
                    "trials": rt.trials,
                    "passes": rt.passes,
                    "worst_residual": num(rt.worst_residual),
                    "failures": rt.failures,
                },
                "newton_sweep": {
                    "trials": sw.trials,
                    "matches": sw.matches,
                    "max_root_count": sw.max_root_count,
                    "discrepancies": sw.discrepancies,
                },
                "pass": pass,
            }),
        )?,
        Format::Csv => {
            writeln!(ctx.out, "check,trials,passes")?;
            writeln!(ctx.out, "roundtrip,{},{}", rt.trials, rt.passes)?;
            writeln!(ctx.out, "newton_sweep,{},{}", sw.trials, sw.matches)?;
        }
    }
    for f in rt.failures.iter().chain(&sw.discrepancies) {
        writeln!(ctx.err, "fail: {f}")?;
    }
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn check_flags(cli: &Cli) -> Result<(), String> {
    for (name, v) in [
        ("--tol", cli.tol),
        ("--tie-tol", cli.tie_tol),
        ("--zero-tol", cli.zero_tol),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(format!("{name} must be a positive number, got {v}"));
        }
    }
    Ok(())
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    if let Err(msg) = check_flags(&cli) {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_INPUT;
    }
    let mut ctx = Ctx {
        out,
        err,
        tol: Tolerances {
            zero: cli.zero_tol,
            tie: cli.tie_tol,
            ..Tolerances::default()
        },
        gate: cli.tol,
        format: cli.format,
    };
    let result = match cli.command {
        Command::Certify {
            trials,
            n,
            seed,
            sweep,
            starts,
        } => cmd_certify(&mut ctx, trials, n, seed, sweep, starts),
        Command::Solve { ref file }
        | Command::Verify { ref file }
        | Command::Classify { ref file } => {
            let doc = match read_input(file) {
                Ok(d) => d,
                Err(msg) => {
                    let _ = writeln!(ctx.err, "error: {msg}");
                    return EXIT_INPUT;
                }
            };
            match cli.command {
                Command::Solve { .. } => cmd_solve(&mut ctx, doc),
                Command::Verify { .. } => cmd_verify(&mut ctx, doc),
                _ => cmd_classify(&mut ctx, doc),
            }
        }
    };
    match result {
        Ok(code) => code,
        // broken pipe and the like
        Err(_) => EXIT_INVARIANT,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_input() {
        let d = parse_input(r#"{"n": 2, "J": [[1, 0, 0], [0, 0, 0]]}"#).unwrap();
        assert_eq!(d.n, 2);
        assert_eq!(d.j[(0, 0)], 1.0);
        assert!(d.a.is_none());
    }

    #[test]
    fn structured_errors_name_the_field() {
        let e = parse_input(r#"{"n": 2, "J": [[1, 0, 0]]}"#).unwrap_err();
        assert!(e.contains("`J`"), "{e}");
        let e = parse_input(r#"{"n": 1, "J": [[1, 0]]}"#).unwrap_err();
        assert!(e.contains("`J`") && e.contains("3"), "{e}");
        let e = parse_input(r#"{"J": [[1, 0, 0]]}"#).unwrap_err();
        assert!(e.contains("`n`"), "{e}");
        let e = parse_input(r#"{"n": 1, "J": [[1, 0, 0]], "A": [[1, "x", 0]]}"#).unwrap_err();
        assert!(e.contains("`A`"), "{e}");
        let e = parse_input(r#"{"n": 0, "J": []}"#).unwrap_err();
        assert!(e.contains("`n`"), "{e}");
    }

    #[test]
    fn csv_input() {
        let d = parse_input("# J rows\n13,0,0\n0, 20, 0\n0,0,15\n").unwrap();
        assert_eq!(d.n, 3);
        assert_eq!(d.j[(1, 1)], 20.0);
        assert!(parse_input("1,2\n").is_err());
        assert!(parse_input("1,2,nan\n").is_err());
    }

    #[test]
    fn flag_defaults_match_library() {
        let cli = Cli::try_parse_from(["ymconst", "classify", "x"]).unwrap();
        assert_eq!(cli.tol, 1e-9);
        assert_eq!(cli.tie_tol, Tolerances::DEFAULT_TIE);
        assert_eq!(cli.zero_tol, Tolerances::DEFAULT_ZERO);
        assert_eq!(cli.format, Format::Structured);
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 6f64.powf(2.0 / 3.0), 1e-300, 0.0] {
            let v = num(x);
            let back: f64 = v.as_f64().unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn summary_text() {
        let c = classify(
            &Current::new(MatR::rect_diag(3, 3, &[13.0, 20.0, 15.0])).unwrap(),
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(
            classification_summary(&c),
            "rank 3, all distinct, 2 solutions expected"
        );
    }
}
