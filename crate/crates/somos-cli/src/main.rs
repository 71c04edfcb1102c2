//! `somos` — generate, fit, lift, and verify Somos and elliptic
//! divisibility sequences in exact arithmetic.
//!
//! Exit codes: 0 success, 1 internal error, 2 parse error, 3 zero
//! divisor while extending, 4 input is not a Somos sequence of the
//! requested gap, 5 verification failure, 6 point not on curve.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use somos::curve::{constants_from_e, verify_prop_basic, CurveModel, Point};
use somos::eds::{
    check_division_property, eds_generate, verify_ward_full, verify_ward_general, EdsInitials,
};
use somos::io as sio;
use somos::lift::lift_somos4;
use somos::quad::QuadScalar;
use somos::rat::{parse_rat, Rat};
use somos::seq::{extend_somos4, extend_somos5, verify_relation, SomosRelation, TwoSidedSequence};
use somos::somos5::fit_somos5;
use somos::{Error, Result};

#[derive(Parser)]
#[command(
    name = "somos",
    version,
    about = "Exact Somos / elliptic divisibility sequence toolkit"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Seed for any randomized sampling (verify --ward-full).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a sequence from a recurrence over an index range.
    Gen(GenArgs),
    /// Fit the gap-4 or gap-5 coefficients of a sequence.
    Fit(FitArgs),
    /// Derive and verify gap-k relations from a Somos-4 input.
    Lift(LiftArgs),
    /// Evaluate e_h = -x(M + hS) on a curve, optionally extracting the
    /// invariant triple.
    Curve(CurveArgs),
    /// Verify relations or divisibility-sequence identities on a file.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Recurrence gap (4 or 5); alternative to --eds.
    #[arg(long, conflicts_with = "eds")]
    gap: Option<i64>,
    /// Coefficients "lambda,mu" (with --gap).
    #[arg(long, requires = "gap", allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Generate an elliptic divisibility sequence from "W2,W3,W4".
    #[arg(long)]
    eds: bool,
    /// Initial values, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    init: String,
    /// Index of the first initial value (with --gap).
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    at: i64,
    /// Inclusive index range "a..b".
    #[arg(long, allow_hyphen_values = true)]
    range: String,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Gap to fit (4 or 5).
    #[arg(long, default_value_t = 4)]
    gap: i64,
    /// Fit window center; scans when absent.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<i64>,
    /// Sequence file ("-" for stdin).
    input: Option<PathBuf>,
}

#[derive(Args)]
struct LiftArgs {
    /// Gaps to derive, comma separated, e.g. "5,6,8".
    #[arg(long, short)]
    k: String,
    /// Sequence file ("-" for stdin).
    input: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    /// Curve model "a1,a2,a3,a4".
    #[arg(long, allow_hyphen_values = true)]
    model: String,
    /// Translation point "x,y" or "inf".
    #[arg(long = "M", allow_hyphen_values = true)]
    m: String,
    /// Inclusive index range "a..b".
    #[arg(long, allow_hyphen_values = true)]
    range: String,
    /// Extract (alpha^2, beta, gamma) and verify the identities.
    #[arg(long)]
    constants: bool,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Relation "k:lambda,mu" to check over the file's full window.
    #[arg(long, allow_hyphen_values = true)]
    relation: Option<String>,
    /// Check the divisibility-sequence relation for each m in "a..b".
    #[arg(long)]
    ward_m: Option<String>,
    /// Check the symmetric three-term identity on sampled triples.
    #[arg(long)]
    ward_full: bool,
    /// Number of sampled triples for --ward-full.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Check gcd(|W_i|, |W_j|) = |W_gcd(i,j)| for 1 <= i, j <= bound.
    #[arg(long)]
    division: Option<i64>,
    /// Sequence file ("-" for stdin).
    input: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::WrongGap { .. } | Error::DivisionByZero => 2,
        Error::ZeroDivision(_) => 3,
        Error::DegenerateFit
        | Error::NotSomos { .. }
        | Error::NonConstantInvariants
        | Error::DegenerateWindow(_) => 4,
        Error::RelationVerificationFailed { .. } => 5,
        Error::PointNotOnCurve => 6,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Gen(args) => cmd_gen(args, cli.format),
        Cmd::Fit(args) => cmd_fit(args, cli.format),
        Cmd::Lift(args) => cmd_lift(args, cli.format),
        Cmd::Curve(args) => cmd_curve(args, cli.format),
        Cmd::Verify(args) => cmd_verify(args, cli.seed),
    }
}

fn read_input(path: Option<&PathBuf>) -> Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
            Ok(buf)
        }
    }
}

/// Accepts either format regardless of --format so generated files pipe
/// straight back in.
fn read_sequence(path: Option<&PathBuf>) -> Result<TwoSidedSequence> {
    let text = read_input(path)?;
    if text.trim_start().starts_with('{') {
        Ok(sio::sequence_from_json(&text)?.0)
    } else {
        sio::sequence_from_tsv(&text)
    }
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_scalar_list(text: &str) -> Result<Vec<QuadScalar>> {
    text.split(',').map(|s| s.trim().parse()).collect()
}

fn parse_rat_list(text: &str) -> Result<Vec<Rat>> {
    text.split(',').map(parse_rat).collect()
}

fn parse_point(text: &str) -> Result<Point> {
    let text = text.trim();
    if text == "inf" {
        return Ok(Point::Infinity);
    }
    let coords = parse_rat_list(text)?;
    let [x, y]: [Rat; 2] = coords
        .try_into()
        .map_err(|_| Error::Parse(format!("expected `x,y` or `inf`, got `{text}`")))?;
    Ok(Point::affine(x, y))
}

fn cmd_gen(args: GenArgs, format: Format) -> Result<u8> {
    let range = sio::parse_range(&args.range)?;
    let init = parse_scalar_list(&args.init)?;
    let (seq, relation) = if args.eds {
        let [w2, w3, w4]: [QuadScalar; 3] = init
            .try_into()
            .map_err(|_| Error::Parse("--eds needs exactly W2,W3,W4".into()))?;
        let initials = EdsInitials::new(w2, w3, w4)?;
        (eds_generate(&initials, range)?, None)
    } else {
        let gap = args
            .gap
            .ok_or_else(|| Error::Parse("one of --gap or --eds is required".into()))?;
        let coeffs = parse_scalar_list(
            args.coeffs
                .as_deref()
                .ok_or_else(|| Error::Parse("--gap needs --coeffs".into()))?,
        )?;
        let [lambda, mu]: [QuadScalar; 2] = coeffs
            .try_into()
            .map_err(|_| Error::Parse("--coeffs needs exactly lambda,mu".into()))?;
        let rel = SomosRelation::new(gap, lambda, mu)?;
        let seq = match gap {
            4 => extend_somos4(
                args.at,
                init.try_into()
                    .map_err(|_| Error::Parse("gap 4 needs exactly four initial values".into()))?,
                &rel,
                range,
            )?,
            5 => extend_somos5(
                args.at,
                init.try_into()
                    .map_err(|_| Error::Parse("gap 5 needs exactly five initial values".into()))?,
                &rel,
                range,
            )?,
            _ => return Err(Error::Parse(format!("--gap must be 4 or 5, got {gap}"))),
        };
        (seq, Some(rel))
    };
    let text = match format {
        Format::Tsv => sio::sequence_to_tsv(&seq),
        Format::Json => format!("{}\n", sio::sequence_to_json(&seq, relation.as_ref())),
    };
    write_output(args.out.as_ref(), &text)?;
    Ok(0)
}

fn cmd_fit(args: FitArgs, format: Format) -> Result<u8> {
    let seq = read_sequence(args.input.as_ref())?;
    let rel = match args.gap {
        4 => somos::lift::fit_somos4(&seq, args.at)?,
        5 => fit_somos5(&seq, args.at)?,
        g => return Err(Error::Parse(format!("--gap must be 4 or 5, got {g}"))),
    };
    match format {
        Format::Tsv => println!("{rel}"),
        Format::Json => println!("{}", sio::relation_to_json(&rel, None)),
    }
    Ok(0)
}

fn cmd_lift(args: LiftArgs, format: Format) -> Result<u8> {
    let seq = read_sequence(args.input.as_ref())?;
    let gaps: Vec<i64> = args
        .k
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("invalid gap `{s}`")))
        })
        .collect::<Result<_>>()?;
    let outcome = lift_somos4(&seq, &gaps)?;
    let mut all_ok = true;
    let mut json_items = Vec::new();
    for (rel, report) in &outcome.derived {
        let ok = report.holds() && report.checked > 0;
        all_ok &= ok;
        match format {
            Format::Tsv => {
                let verdict = if ok {
                    "verified".to_string()
                } else if report.checked == 0 {
                    "window too small".to_string()
                } else {
                    format!("FAILED at h={}", report.first_failure().unwrap())
                };
                println!("{rel}\t{verdict}");
            }
            Format::Json => json_items.push(format!(
                r#"{{"gap":{},"lambda":"{}","mu":"{}","verified":{}}}"#,
                rel.gap(),
                rel.lambda(),
                rel.mu(),
                ok
            )),
        }
    }
    if format == Format::Json {
        println!("[{}]", json_items.join(","));
    }
    Ok(if all_ok { 0 } else { 5 })
}

fn cmd_curve(args: CurveArgs, format: Format) -> Result<u8> {
    let coeffs = parse_rat_list(&args.model)?;
    let [a1, a2, a3, a4]: [Rat; 4] = coeffs
        .try_into()
        .map_err(|_| Error::Parse("--model needs exactly a1,a2,a3,a4".into()))?;
    let curve = CurveModel::new(a1, a2, a3, a4)?;
    let m = parse_point(&args.m)?;
    if !curve.contains(&m) {
        return Err(Error::PointNotOnCurve);
    }
    let range = sio::parse_range(&args.range)?;
    let seq = curve.e_sequence(&m, range.clone())?;
    let mut text = match format {
        Format::Tsv => sio::sequence_to_tsv(&seq),
        Format::Json => format!("{}\n", sio::sequence_to_json(&seq, None)),
    };
    let mut code = 0u8;
    if args.constants {
        // A wider window keeps extraction independent of the printed range.
        let window =
            curve.e_sequence(&m, (*range.start() - 4).min(-4)..=(*range.end() + 4).max(4))?;
        let data = constants_from_e(&window, None)?;
        let (lo, hi) = window.span().expect("nonempty");
        let report = verify_prop_basic(&window, &data, lo + 1..=hi - 1)?;
        if !report.holds() {
            code = 5;
        }
        let verdict = if report.holds() { "verified" } else { "FAILED" };
        match format {
            Format::Tsv => {
                text.push_str(&format!("# {data}\n# identities {verdict}\n"));
            }
            Format::Json => {
                text = format!(
                    "{{\"terms\":{},\"constants\":{{\"alpha2\":\"{}\",\"beta\":\"{}\",\"gamma\":\"{}\"}},\"verified\":{}}}\n",
                    sio::sequence_to_json(&seq, None),
                    data.alpha_sq(),
                    data.beta(),
                    data.gamma(),
                    report.holds()
                );
            }
        }
    }
    write_output(args.out.as_ref(), &text)?;
    Ok(code)
}

fn cmd_verify(args: VerifyArgs, seed: u64) -> Result<u8> {
    let seq = read_sequence(args.input.as_ref())?;
    let (lo, hi) = seq.span().ok_or(Error::EmptySequence)?;
    let mut ok = true;

    if let Some(rel_text) = &args.relation {
        let rel = sio::relation_from_text(rel_text)?;
        let report = verify_relation(&seq, &rel, rel.checkable_range(lo, hi))?;
        let verdict = report.holds() && report.checked > 0;
        ok &= verdict;
        println!(
            "relation {rel}: {} (checked {}, skipped {})",
            if verdict { "ok" } else { "FAILED" },
            report.checked,
            report.skipped.len()
        );
        for (h, _) in report.failures.iter().take(10) {
            println!("  fails at h={h}");
        }
    }

    if let Some(ward_range) = &args.ward_m {
        for m in sio::parse_range(ward_range)? {
            let h_range = (lo + m).max(m)..=hi - m;
            let report = verify_ward_general(&seq, m, h_range)?;
            let verdict = report.holds() && report.checked > 0;
            ok &= verdict;
            println!(
                "ward m={m}: {} (checked {})",
                if verdict { "ok" } else { "FAILED" },
                report.checked
            );
            for (h, _) in report.failures.iter().take(10) {
                println!("  fails at h={h}");
            }
        }
    }

    if args.ward_full {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = hi.min(-lo) / 2;
        if t < 1 {
            return Err(Error::Parse(
                "sequence window too small for --ward-full sampling".into(),
            ));
        }
        let triples: Vec<(i64, i64, i64)> = (0..args.samples)
            .map(|_| {
                (
                    rng.gen_range(-t..=t),
                    rng.gen_range(-t..=t),
                    rng.gen_range(-t..=t),
                )
            })
            .collect();
        let report = verify_ward_full(&seq, &triples)?;
        ok &= report.holds();
        for (i, (h, m, n)) in triples.iter().enumerate() {
            let failed = report.failures.iter().any(|(t, _)| t == &(*h, *m, *n));
            println!(
                "triple {i}: ({h}, {m}, {n}) {}",
                if failed { "FAILED" } else { "ok" }
            );
        }
        println!(
            "ward symmetric: {} (checked {}, skipped {})",
            if report.holds() { "ok" } else { "FAILED" },
            report.checked,
            report.skipped.len()
        );
    }

    if let Some(bound) = args.division {
        let report = check_division_property(&seq, bound)?;
        ok &= report.holds();
        println!(
            "division property up to {bound}: {} (checked {})",
            if report.holds() { "ok" } else { "FAILED" },
            report.checked
        );
        for f in report.failures.iter().take(10) {
            println!("  gcd(|W_{}|, |W_{}|) = {} != {}", f.i, f.j, f.got, f.want);
        }
    }

    Ok(if ok { 0 } else { 5 })
}
