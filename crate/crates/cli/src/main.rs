//! Command-line entry point: factorization pipelines, certificate
//! verification, Goto and embedding reports, finite-field oracles, and the
//! exact searches, all with JSON artifacts, explicit seeds and tolerances.
//!
//! Exit codes: 0 success, 1 usage or operational error, 2 verification
//! failure (a certificate whose recomputed residual exceeds the tolerance).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use serde_json::json;

use waring_core::exact::parse_scalar;
use waring_core::factorize::{
    central_two_squares, check_zeta4_condition, verify_cert, FactorizationCert, Pipeline,
};
use waring_core::goto::{build_goto, certify_goto};
use waring_core::group::GroupCtx;
use waring_core::matnum::{frobenius_dist, CMatrix};
use waring_core::oracle::product_coverage;
use waring_core::principal::build_embedding;
use waring_core::search::{prop41_search, sample_discriminant_squares, SearchBudget};
use waring_core::word::Word;

#[derive(Parser)]
#[command(name = "waring", about = "width-two word-map factorizations in compact classical groups", version)]
struct Cli {
    /// Cap on internal parallelism (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArg {
    /// Write the JSON artifact here as well as to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a group element as w1(A) * w2(B) and emit a certificate.
    Factorize {
        /// Group spec: su:N, sp:N, or k:2N.
        #[arg(long)]
        group: String,
        #[arg(long)]
        w1: String,
        #[arg(long)]
        w2: String,
        /// "random", "identity", or a path to a serialized matrix.
        #[arg(long, default_value = "random")]
        target: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Random-restart cap for the SU(2) preimage search.
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        /// Iteration cap per restart.
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Re-check a certificate from its serialized data alone.
    Verify {
        cert: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Build the Goto element of a group and print its certification report.
    Goto {
        #[arg(long)]
        group: String,
        /// Run the full exact certification (always on; kept for symmetry).
        #[arg(long, default_value_t = true)]
        check: bool,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Build a principal embedding and print weights, the basis change, and
    /// a spot-check report.
    Embed {
        /// Family name: su, sp, or k.
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        /// Include the basis-change matrix in the output.
        #[arg(long, default_value_t = false)]
        print: bool,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Exhaustive word-image and product-coverage measurement over SL_2(F_p).
    Oracle {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        w1: String,
        #[arg(long)]
        w2: String,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Exact two-square decomposition of the central element r I_{2n}.
    Central {
        #[arg(long)]
        n: usize,
        /// Scalar syntax: "p/q", "zeta:k:j", or "zeta:k:[c0,c1,...]".
        #[arg(long)]
        r: String,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Sample rational SL_2 tuples whose word value has square discriminant.
    SampleDiscriminant {
        #[arg(long)]
        w: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 50)]
        height: i64,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Exhaustive bounded scan: x^4 y^4 never hits -I over Q, with
    /// finite-field contrast for p in {3, 5, 7, 17}.
    Prop41 {
        #[arg(long, default_value_t = 5)]
        bound: i64,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Check whether zeta_4 is an attainable circle value of the word on SU(2).
    Zeta4 {
        #[arg(long)]
        w: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
        #[command(flatten)]
        output: OutputArg,
    },
}

fn emit<T: Serialize>(value: &T, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    println!("{text}");
    if let Some(path) = out {
        let mut f = std::fs::File::create(path)?;
        f.write_all(text.as_bytes())?;
        f.write_all(b"\n")?;
    }
    Ok(())
}

fn load_target(ctx: &GroupCtx, target: &str, seed: u64) -> anyhow::Result<CMatrix> {
    match target {
        "identity" => Ok(CMatrix::identity(ctx.dimension())),
        "random" => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            Ok(ctx.random_element(&mut rng)?)
        }
        path => {
            let text = std::fs::read_to_string(path)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

/// Exit 2 marker for verification failures.
#[derive(Debug)]
struct VerificationFailed;

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed")
    }
}

impl std::error::Error for VerificationFailed {}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global().ok();
    }
    match cli.command {
        Command::Factorize { group, w1, w2, target, seed, tol, restarts, iterations, output } => {
            let ctx = GroupCtx::parse(&group)?;
            let w1 = Word::parse(&w1)?;
            let w2 = Word::parse(&w2)?;
            let g = load_target(&ctx, &target, seed)?;
            let budget = SearchBudget { restarts, iterations };
            let pipeline = Pipeline::new(&ctx, &w1, &w2, tol, budget, seed)?;
            let cert = pipeline.factor(&g)?;
            emit(&cert, &output.out)?;
        }
        Command::Verify { cert, tol } => {
            let text = std::fs::read_to_string(&cert)?;
            let cert: FactorizationCert = serde_json::from_str(&text)?;
            let report = verify_cert(&cert, tol)?;
            emit(&report, &None)?;
            if !report.ok {
                return Err(VerificationFailed.into());
            }
        }
        Command::Goto { group, check, output } => {
            let ctx = GroupCtx::parse(&group)?;
            let x = build_goto(&ctx)?;
            let _ = check;
            let report = certify_goto(&x)?;
            emit(&report, &output.out)?;
            if !report.ok {
                return Err(VerificationFailed.into());
            }
        }
        Command::Embed { family, n, print, output } => {
            let fam = waring_core::family::lookup_family(&family)
                .ok_or_else(|| anyhow::anyhow!("unknown family {family:?} (expected su, sp, or k)"))?;
            let embed = build_embedding(fam, n)?;
            let ctx = GroupCtx::Compact { family: fam, n };
            // spot check: a torus image must be diagonal with the advertised
            // weight phases, and pass membership
            let theta = 0.37f64;
            let t2 = CMatrix::from_rows(&[
                vec![num::complex::Complex64::from_polar(1.0, theta), 0.0.into()],
                vec![0.0.into(), num::complex::Complex64::from_polar(1.0, -theta)],
            ]);
            let img = embed.embed(&t2);
            let diag = CMatrix::diagonal(&(0..img.dim()).map(|i| img.at(i, i)).collect::<Vec<_>>());
            let offdiag = frobenius_dist(&img, &diag)?;
            let member = ctx.member(&img, 1e-10)?;
            let report = json!({
                "family": fam.name(),
                "n": n,
                "dimension": fam.dimension(n),
                "weights": embed.weights,
                "sym_degree": embed.sym_degree,
                "with_trivial_summand": embed.with_trivial,
                "spot_check": {
                    "torus_image_offdiagonal": offdiag,
                    "member": member,
                },
                "basis_change": if print { serde_json::to_value(&embed.basis_change)? } else { serde_json::Value::Null },
            });
            emit(&report, &output.out)?;
        }
        Command::Oracle { p, w1, w2, report } => {
            let w1 = Word::parse(&w1)?;
            let w2 = Word::parse(&w2)?;
            let out = product_coverage(p, &w1, &w2)?;
            emit(&out, &report)?;
        }
        Command::Central { n, r, output } => {
            let r = parse_scalar(&r)?;
            let (p, q) = central_two_squares(n, &r)?;
            let to_rows = |m: &waring_core::exact::ExactMatrix| -> Vec<Vec<String>> {
                (0..m.dim())
                    .map(|i| (0..m.dim()).map(|j| m.get(i, j).serialize()).collect())
                    .collect()
            };
            let report = json!({
                "n": n,
                "dimension": 2 * n,
                "r": r.serialize(),
                "P": to_rows(&p),
                "Q": to_rows(&q),
                "identity_checked_exactly": true,
            });
            emit(&report, &output.out)?;
        }
        Command::SampleDiscriminant { w, count, height, output } => {
            let w = Word::parse(&w)?;
            let report = sample_discriminant_squares(&w, count, height)?;
            emit(&report, &output.out)?;
        }
        Command::Prop41 { bound, output } => {
            let report = prop41_search(bound)?;
            let w4 = Word::parse("x1^4")?;
            let mut contrast = Vec::new();
            for p in [3u32, 5, 7, 17] {
                let cov = product_coverage(p, &w4, &w4)?;
                contrast.push(json!({
                    "p": p,
                    "minus_identity_covered": cov.minus_identity_covered,
                    "coverage": cov.coverage,
                }));
            }
            let combined = json!({
                "rational_scan": report,
                "finite_field_contrast": contrast,
            });
            emit(&combined, &output.out)?;
            if !report.ok {
                return Err(VerificationFailed.into());
            }
        }
        Command::Zeta4 { w, seed, restarts, iterations, output } => {
            let w = Word::parse(&w)?;
            let report = check_zeta4_condition(&w, SearchBudget { restarts, iterations }, seed)?;
            emit(&report, &output.out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are successes, anything else is a
            // usage error (exit 1)
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.is::<VerificationFailed>() {
                eprintln!("error: {e}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        }
    }
}
