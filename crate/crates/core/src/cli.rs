//! Command-line pipelines. Every command returns a report plus an exit code:
//! 0 when all checks pass, 1 on a verification failure, 2 on a usage or
//! configuration error.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::axioms::{
    build_real_structure, check_order_conditions, check_reality_signs, norm_preservation_defect,
    opposite_action_defect, VerificationReport,
};
use crate::clifford::{build_clifford, expected_signs, CliffordRep, Sign, SignTriple, STRUCTURE_TOL};
use crate::dirac::{analytic_torus_spectrum, assemble_dirac, kernel_growth_probe, KernelProbe};
use crate::error::{Error, Result};
use crate::linalg::{vec_norm, C64};
use crate::nctorus::{FourierElement, ThetaMatrix, TruncatedGNS};
use crate::peterweyl::{
    majorization_check, random_admissible_choice, reference_spectrum, su2_weight_blocks, subrepresentation_spectrum,
    Majorization, WeightBlock, WeightLabel,
};
use crate::summability::{
    monotone_comparison, sigma_sequence_with, SummabilityConfig, SummabilityReport, Verdict as SumVerdict,
    DEFAULT_GROWTH_SLOPE, DEFAULT_TAIL_SPREAD,
};

pub const SCHEMA: &str = "1";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ergodic-dirac",
    version,
    about = "Dirac operators from ergodic actions, certified at finite truncation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Constructed vs. expected real-structure signs for n = 1..max-n.
    CliffordTable(CliffordTableArgs),
    /// Symmetry, commutator, grading, reality and order checks on a noncommutative torus.
    NctVerify(NctVerifyArgs),
    /// Dixmier partial sums and kernel growth for a torus Dirac operator.
    Summability(SummabilityArgs),
    /// SU(2) weight blocks, majorization and partial-sum comparison.
    Su2(Su2Args),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct CliffordTableArgs {
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..=12))]
    pub max_n: u64,
    /// Sign of the extra generator for odd n.
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub branch: Sign,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct NctVerifyArgs {
    /// Torus rank.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=12))]
    pub n: u64,
    /// Truncation radius of the Fourier box.
    #[arg(long = "N", default_value_t = 6, value_parser = clap::value_parser!(i64).range(1..))]
    pub radius: i64,
    /// `random`, a JSON file, a single number (n = 2) or an inline JSON matrix.
    #[arg(long, default_value = "random")]
    pub theta: String,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub branch: Sign,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of random monomial pairs for the order conditions.
    #[arg(long, default_value_t = 50)]
    pub pairs: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SummabilityArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=12))]
    pub n: u64,
    #[arg(long = "N", default_value_t = 30, value_parser = clap::value_parser!(i64).range(0..))]
    pub radius: i64,
    /// Summability exponent; defaults to n.
    #[arg(long)]
    pub exponent: Option<u32>,
    /// Active directions, 1-based and comma separated; defaults to all.
    #[arg(long, value_delimiter = ',')]
    pub active: Vec<usize>,
    /// Radii for the kernel growth probe; defaults to 5,10,20 when a
    /// direction is inactive.
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Vec<i64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TAIL_SPREAD)]
    pub tail_spread: f64,
    #[arg(long, default_value_t = DEFAULT_GROWTH_SLOPE)]
    pub growth_slope: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Su2Args {
    #[arg(long, default_value_t = 8)]
    pub cutoff: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Number of random admissible multiplicity choices.
    #[arg(long, default_value_t = 50)]
    pub choices: usize,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub branch: Sign,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// A finished command: rendered text and exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub output: String,
    /// Set when the report went to `--out` instead of stdout.
    pub written_to: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command. Writes to
/// `--out` when given; the rendered text is returned either way.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            return Outcome {
                exit_code: code,
                output: e.render().to_string(),
                written_to: None,
            };
        }
    };
    let (result, output) = match &cli.command {
        Command::CliffordTable(a) => (cmd_clifford_table(a), &a.output),
        Command::NctVerify(a) => (cmd_nct_verify(a), &a.output),
        Command::Summability(a) => (cmd_summability(a), &a.output),
        Command::Su2(a) => (cmd_su2(a), &a.output),
    };
    match result {
        Ok((text, passed)) => {
            if let Some(path) = &output.out {
                if let Err(e) = std::fs::write(path, &text) {
                    return Outcome {
                        exit_code: EXIT_USAGE,
                        output: format!("error: cannot write {}: {e}\n", path.display()),
                        written_to: None,
                    };
                }
            }
            Outcome {
                exit_code: if passed { EXIT_PASS } else { EXIT_FAIL },
                output: text,
                written_to: output.out.clone(),
            }
        }
        Err(e) => Outcome {
            exit_code: EXIT_USAGE,
            output: format!("error: {e}\n"),
            written_to: None,
        },
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

// clifford-table

#[derive(Debug, Serialize)]
pub struct CliffordRow {
    pub n: usize,
    pub dim: usize,
    pub constructed: SignTriple,
    pub expected: SignTriple,
    pub relation_defect: f64,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Debug, Serialize)]
struct CliffordTableReport {
    schema: &'static str,
    command: &'static str,
    branch: Sign,
    rows: Vec<CliffordRow>,
    all_match: bool,
}

/// One row per `n`: signs measured on the constructed representation and
/// the defect of the anticommutation relations.
pub fn clifford_table(max_n: usize, branch: Sign) -> Result<Vec<CliffordRow>> {
    (1..=max_n)
        .map(|n| {
            let cliff = build_clifford(n, branch)?;
            let constructed = cliff.signs();
            let expected = expected_signs(n);
            let relation_defect = cliff.relation_defect();
            Ok(CliffordRow {
                n,
                dim: cliff.dim(),
                constructed,
                expected,
                relation_defect,
                matches: constructed == expected && relation_defect < STRUCTURE_TOL,
            })
        })
        .collect()
}

fn cmd_clifford_table(args: &CliffordTableArgs) -> Result<(String, bool)> {
    let rows = clifford_table(args.max_n as usize, args.branch)?;
    let all_match = rows.iter().all(|r| r.matches);
    let text = match args.output.format {
        Format::Json => to_json(&CliffordTableReport {
            schema: SCHEMA,
            command: "clifford-table",
            branch: args.branch,
            rows,
            all_match,
        })?,
        Format::Csv => {
            let show = |s: Option<Sign>| s.map_or_else(String::new, |s| s.to_string());
            let mut out = String::from(
                "n,eps_j,eps_d,eps_gamma,expected_eps_j,expected_eps_d,expected_eps_gamma,relation_defect,match\n",
            );
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{:e},{}\n",
                    r.n,
                    r.constructed.eps_j,
                    r.constructed.eps_d,
                    show(r.constructed.eps_gamma),
                    r.expected.eps_j,
                    r.expected.eps_d,
                    show(r.expected.eps_gamma),
                    r.relation_defect,
                    if r.matches { "match" } else { "mismatch" }
                ));
            }
            out
        }
    };
    Ok((text, all_match))
}

// nct-verify

/// Resolves a `--theta` value: `random`, a file path, a bare number (n = 2
/// only) or an inline JSON array.
pub fn load_theta(source: &str, n: usize, rng: &mut ChaCha8Rng) -> Result<ThetaMatrix> {
    let theta = if source == "random" {
        random_theta(n, rng)?
    } else if std::path::Path::new(source).is_file() {
        let text = std::fs::read_to_string(source).map_err(|e| Error::Parse(format!("{source}: {e}")))?;
        ThetaMatrix::from_json(&text)?
    } else if let Ok(value) = source.trim().parse::<f64>() {
        if n != 2 {
            return Err(Error::InvalidArgument(format!(
                "a single theta value only determines the rank-2 matrix, got n = {n}"
            )));
        }
        ThetaMatrix::two_dim(value)
    } else {
        ThetaMatrix::from_json(source)?
    };
    if theta.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: theta.n(),
        });
    }
    Ok(theta)
}

/// Upper-triangular entries uniform in `[0, 1)`.
pub fn random_theta(n: usize, rng: &mut ChaCha8Rng) -> Result<ThetaMatrix> {
    let upper: Vec<f64> = (0..n * n.saturating_sub(1) / 2).map(|_| rng.gen::<f64>()).collect();
    ThetaMatrix::from_upper(n, &upper)
}

/// `c·U^p` with `|p_j| ≤ radius` and a unit-modulus coefficient.
pub fn random_monomial(n: usize, radius: i64, rng: &mut ChaCha8Rng) -> FourierElement {
    let p: Vec<i64> = (0..n).map(|_| rng.gen_range(-radius..=radius)).collect();
    let phase = rng.gen_range(0.0..2.0 * PI);
    FourierElement::monomial(p, C64::from_polar(1.0, phase))
}

#[derive(Debug, Serialize)]
struct Skipped {
    check: &'static str,
    reason: String,
}

#[derive(Debug, Serialize)]
struct NctConfigEcho {
    n: usize,
    #[serde(rename = "N")]
    radius: i64,
    theta: Vec<f64>,
    branch: Sign,
    seed: u64,
    pairs: usize,
    tolerance: f64,
}

#[derive(Debug, Serialize)]
struct NctVerifyReport {
    schema: &'static str,
    command: &'static str,
    config: NctConfigEcho,
    signs: Option<SignTriple>,
    checks: Vec<VerificationReport>,
    skipped: Vec<Skipped>,
    verdict: crate::axioms::Verdict,
}

/// Converts check-level failures into a failing report; structural errors
/// (bad input) propagate.
fn deviation_or_fail(r: Result<f64>) -> Result<f64> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::RelationFailed { deviation, .. }) => Ok(deviation),
        Err(Error::SignMismatch { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

fn cmd_nct_verify(args: &NctVerifyArgs) -> Result<(String, bool)> {
    let n = args.n as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let theta = load_theta(&args.theta, n, &mut rng)?;
    let cliff = build_clifford(n, args.branch)?;
    let gns = TruncatedGNS::new(n, args.radius)?;
    let all: Vec<usize> = (0..n).collect();
    let d = assemble_dirac(&cliff, &gns, &all)?;
    let tol = args.tolerance;
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    let mut report = |name: &str, dev: f64| checks.push(VerificationReport::new(name, n, &theta, dev, tol));

    let spectrum_dev = d
        .spectrum()?
        .multiset_deviation(&analytic_torus_spectrum(&cliff, &gns))
        .unwrap_or(f64::INFINITY);
    report("symmetry", d.hermiticity_defect().max(spectrum_dev));

    let mut comm_dev: f64 = 0.0;
    for j in 0..n {
        let c = d.commutator_with(&FourierElement::generator(n, j), &theta)?;
        comm_dev = comm_dev
            .max(c.formula_deviation)
            .max((c.interior_norm - 2.0 * PI).abs());
    }
    report("bounded-commutator", comm_dev);

    let r = ((args.radius - 1) / 2).max(0);
    let pairs: Vec<(FourierElement, FourierElement)> = (0..args.pairs)
        .map(|_| (random_monomial(n, r, &mut rng), random_monomial(n, r, &mut rng)))
        .collect();

    if cliff.gamma_s().is_some() {
        let mut elements: Vec<FourierElement> = (0..n).map(|j| FourierElement::generator(n, j)).collect();
        elements.extend(pairs.iter().map(|(a, _)| a.clone()));
        report("grading", d.check_grading(&elements, &theta)?.max_defect());
    } else {
        skipped.push(Skipped {
            check: "grading",
            reason: format!("n odd ({n}), skipped"),
        });
    }

    let j = build_real_structure(&cliff, &gns, &theta)?;
    let dsparse = d.to_sparse();
    let gamma = d.grading().ok();
    let signs = check_reality_signs(&dsparse, gamma.as_ref(), &j);
    let measured = signs.as_ref().ok().map(|s| s.signs);
    report("reality-signs", deviation_or_fail(signs.map(|s| s.max_deviation()))?);

    let mut norm_dev: f64 = 0.0;
    for _ in 0..4 {
        let mut v = || -> Vec<C64> {
            let raw: Vec<C64> = (0..j.dim())
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = vec_norm(&raw);
            raw.into_iter().map(|z| z / norm).collect()
        };
        let (xi, eta) = (v(), v());
        norm_dev = norm_dev.max(norm_preservation_defect(&j, &xi, &eta));
    }
    report("j-antiunitary", norm_dev);

    let per_pair: Vec<(f64, f64, f64)> = pairs
        .par_iter()
        .map(|(a, b)| {
            let o = check_order_conditions(&dsparse, a, b, &j, &theta)?;
            Ok((opposite_action_defect(b, &j, &theta)?, o.zeroth_order, o.first_order))
        })
        .collect::<Result<_>>()?;
    let (opp_dev, zeroth, first) = per_pair.iter().fold((0.0_f64, 0.0_f64, 0.0_f64), |acc, x| {
        (acc.0.max(x.0), acc.1.max(x.1), acc.2.max(x.2))
    });
    report("opposite-action", opp_dev);
    report("zeroth-order", zeroth);
    report("first-order", first);

    let passed = checks.iter().all(VerificationReport::passed);
    let text = match args.output.format {
        Format::Json => to_json(&NctVerifyReport {
            schema: SCHEMA,
            command: "nct-verify",
            config: NctConfigEcho {
                n,
                radius: args.radius,
                theta: theta.entries().to_vec(),
                branch: args.branch,
                seed: args.seed,
                pairs: args.pairs,
                tolerance: tol,
            },
            signs: measured,
            checks,
            skipped,
            verdict: if passed {
                crate::axioms::Verdict::Pass
            } else {
                crate::axioms::Verdict::Fail
            },
        })?,
        Format::Csv => {
            let mut out = String::from("check,n,theta,max_deviation,verdict\n");
            for c in &checks {
                let verdict = if c.passed() { "pass" } else { "fail" };
                out.push_str(&format!(
                    "{},{},{},{:e},{verdict}\n",
                    c.check, c.n, c.theta, c.max_deviation
                ));
            }
            for s in &skipped {
                out.push_str(&format!("{},{n},{},,skipped\n", s.check, theta.fingerprint()));
            }
            out
        }
    };
    Ok((text, passed))
}

// summability

#[derive(Debug, Serialize)]
struct SummabilityCliReport {
    schema: &'static str,
    command: &'static str,
    n: usize,
    #[serde(rename = "N")]
    radius: i64,
    active: Vec<usize>,
    ergodic: bool,
    config: SummabilityConfig,
    summability: SummabilityReport,
    kernel_probe: Option<KernelProbe>,
}

fn cmd_summability(args: &SummabilityArgs) -> Result<(String, bool)> {
    let n = args.n as usize;
    let active: Vec<usize> = if args.active.is_empty() {
        (0..n).collect()
    } else {
        let mut v = Vec::with_capacity(args.active.len());
        for &a in &args.active {
            if a == 0 || a > n {
                return Err(Error::InvalidArgument(format!("active direction {a} outside 1..={n}")));
            }
            v.push(a - 1);
        }
        v.sort_unstable();
        v.dedup();
        v
    };
    let ergodic = active.len() == n;
    let exponent = args.exponent.unwrap_or(n as u32);
    let config = SummabilityConfig {
        tail_spread: args.tail_spread,
        growth_slope: args.growth_slope,
    };
    let cliff = build_clifford(n, Sign::Plus)?;
    let gns = TruncatedGNS::new(n, args.radius)?;
    let spec = assemble_dirac(&cliff, &gns, &active)?.spectrum()?;
    let summability = sigma_sequence_with(&spec, exponent, &config)?;

    let radii: Vec<i64> = if !args.n_list.is_empty() {
        args.n_list.clone()
    } else if !ergodic {
        vec![5, 10, 20]
    } else {
        Vec::new()
    };
    let kernel_probe = if radii.is_empty() {
        None
    } else {
        Some(kernel_growth_probe(&cliff, n, &active, &radii)?)
    };

    let passed = !(ergodic && summability.verdict == SumVerdict::Growing);
    let text = match args.output.format {
        Format::Json => to_json(&SummabilityCliReport {
            schema: SCHEMA,
            command: "summability",
            n,
            radius: args.radius,
            active: active.iter().map(|a| a + 1).collect(),
            ergodic,
            config,
            summability,
            kernel_probe,
        })?,
        Format::Csv => summability.to_csv(),
    };
    Ok((text, passed))
}

// su2

#[derive(Debug, Serialize)]
struct ChoiceResult {
    choice: Vec<usize>,
    majorization: Majorization,
    monotone: bool,
}

#[derive(Debug, Serialize)]
struct Su2Report {
    schema: &'static str,
    command: &'static str,
    cutoff: usize,
    seed: u64,
    exponent: u32,
    blocks: Vec<WeightBlock>,
    results: Vec<ChoiceResult>,
    all_pass: bool,
}

/// Exponent used for SU(2) partial sums: the group dimension.
pub const SU2_EXPONENT: u32 = 3;

/// Majorization and partial-sum comparison for one multiplicity choice.
pub fn su2_choice_check(
    blocks: &[WeightBlock],
    reference: &SummabilityReport,
    reference_spec: &crate::dirac::SpectralData,
    choice: &[usize],
) -> Result<(Majorization, bool)> {
    let sub = subrepresentation_spectrum(blocks, choice)?;
    let maj = majorization_check(&sub, reference_spec);
    let monotone = if sub.is_empty() {
        true
    } else {
        monotone_comparison(
            &sigma_sequence_with(&sub, SU2_EXPONENT, &SummabilityConfig::default())?,
            reference,
        )?
    };
    Ok((maj, monotone))
}

fn cmd_su2(args: &Su2Args) -> Result<(String, bool)> {
    let cliff3: CliffordRep = build_clifford(3, args.branch)?;
    let blocks = su2_weight_blocks(args.cutoff, &cliff3)?;
    let reference_spec = reference_spectrum(&blocks)?;
    let reference = sigma_sequence_with(&reference_spec, SU2_EXPONENT, &SummabilityConfig::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut results = Vec::with_capacity(args.choices);
    for _ in 0..args.choices {
        let choice = random_admissible_choice(&blocks, &mut rng);
        let (majorization, monotone) = su2_choice_check(&blocks, &reference, &reference_spec, &choice)?;
        results.push(ChoiceResult {
            choice,
            majorization,
            monotone,
        });
    }
    let all_pass = results.iter().all(|r| r.majorization.holds && r.monotone);
    let text = match args.output.format {
        Format::Json => to_json(&Su2Report {
            schema: SCHEMA,
            command: "su2",
            cutoff: args.cutoff,
            seed: args.seed,
            exponent: SU2_EXPONENT,
            blocks,
            results,
            all_pass,
        })?,
        Format::Csv => {
            let mut out = String::from("label,d,m,value,multiplicity\n");
            for b in &blocks {
                let label = match &b.label {
                    WeightLabel::Spin(l) => l.to_string(),
                    WeightLabel::Lattice(p) => p.iter().map(i64::to_string).collect::<Vec<_>>().join(" "),
                };
                for (v, m) in b.eigenvalues.eigenvalues() {
                    out.push_str(&format!("{label},{},{},{v},{m}\n", b.d, b.m));
                }
            }
            out
        }
    };
    Ok((text, all_pass))
}
