//! Command-line interface: group-definition files in, deterministic JSON
//! reports out. Exit codes: 0 pass, 1 check failed, 2 input error.

use crate::distributions::{self, TemperedDistribution};
use crate::error::{Error, Result};
use crate::groups;
use crate::numerics::quad::Box as QuadBox;
use crate::product_groups;
use crate::realization::{GroupElement, Realization};
use crate::schwartz::{self, ConvolutionBudget, LebesgueExponent, SeminormSpec, SmoothFunction};
use crate::verify;
use crate::weights::Weight;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Environment variable supplying the default seed.
pub const SEED_ENV: &str = "SOLVLIE_SEED";

#[derive(Parser)]
#[command(
    name = "solvlie",
    version,
    about = "Numerical harmonic analysis on simply connected solvable Lie groups"
)]
struct Cli {
    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    /// Emit compact JSON (the default; kept as an explicit switch).
    #[arg(long, global = true)]
    json: bool,
    /// Seed override; falls back to $SOLVLIE_SEED, then the group file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GroupArg {
    /// Bundled group name (heisenberg, axb, m2, r1, axb_x_heis) or a path to
    /// a group-definition JSON file.
    group: String,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the Lie algebra: Jacobi, solvability, nilradical.
    CheckAlgebra(GroupArg),
    /// Build the realization and report its shape with product spot checks.
    Realize(GroupArg),
    /// Group axioms, Haar/modular behavior, and the four weight properties.
    VerifyProperties {
        #[command(flatten)]
        group: GroupArg,
        /// Samples per scale.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Number of nested box levels for the volume check.
        #[arg(long, default_value_t = 4)]
        scales: usize,
    },
    /// Evaluate a Schwartz seminorm ‖σ^k X^α φ‖_q on a probe.
    Seminorm {
        #[command(flatten)]
        group: GroupArg,
        /// Probe label from the built-in library.
        #[arg(long)]
        probe: String,
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Comma-separated multi-index, e.g. "1,0,0".
        #[arg(long, default_value = "")]
        alpha: String,
        /// Lebesgue exponent: one, two, or inf.
        #[arg(long, default_value = "inf")]
        q: String,
        /// Quadrature/sampling box half-widths (comma-separated, or one
        /// value for a cube); defaults to the probe's decay metadata.
        #[arg(long)]
        r#box: Option<String>,
    },
    /// Evaluate (probe1 ∗ probe2)(g) at a group element.
    Convolve {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        probe1: String,
        #[arg(long)]
        probe2: String,
        /// Comma-separated coordinates (t, n) of the evaluation point.
        #[arg(long, default_value = "")]
        at: String,
        /// Quadrature points per axis.
        #[arg(long, default_value_t = 32)]
        points: usize,
        /// Switch to quasi-Monte-Carlo with this many samples.
        #[arg(long)]
        monte_carlo: Option<usize>,
    },
    /// Stabilization test for 𝒮_σ membership of a probe.
    Membership {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        probe: String,
        #[arg(long, default_value_t = 3)]
        k_max: usize,
        #[arg(long, default_value_t = 2)]
        alpha_max: usize,
        #[arg(long)]
        r#box: Option<String>,
    },
    /// Pair a distribution X^α[f] against a probe test function.
    Pair {
        #[command(flatten)]
        group: GroupArg,
        /// Embedded function f: a probe label, or "one" for the constant 1.
        #[arg(long, default_value = "one")]
        kernel: String,
        /// Derivative multi-index applied to the distribution.
        #[arg(long, default_value = "")]
        alpha: String,
        /// Test function probe label.
        #[arg(long)]
        probe: String,
        #[arg(long, default_value_t = 32)]
        points: usize,
    },
    /// Build the direct product of two groups and check σ ≤ Cσ₁σ₂.
    Product {
        /// First factor (bundled name or file).
        group1: String,
        /// Second factor (bundled name or file).
        group2: String,
        /// Samples per scale for the σ fit.
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
}

#[derive(Serialize)]
struct Report {
    command: String,
    version: String,
    seed: u64,
    /// SHA-256 over the group definition text(s) and the flag values.
    inputs_digest: String,
    verdict: String,
    results: serde_json::Value,
}

fn digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    format!("{:x}", h.finalize())
}

fn parse_alpha(s: &str, dim: usize) -> Result<Vec<usize>> {
    if s.trim().is_empty() {
        return Ok(vec![0; dim]);
    }
    let alpha: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Input(format!("alpha '{s}' is not a comma-separated multi-index")))?;
    if alpha.len() != dim {
        return Err(Error::Input(format!(
            "alpha has {} entries, group dimension is {dim}",
            alpha.len()
        )));
    }
    Ok(alpha)
}

fn parse_box(s: Option<&str>, r: &Realization, phi: &SmoothFunction, points: usize) -> Result<QuadBox> {
    match s {
        Some(text) => {
            let hw: Vec<f64> = text
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Input(format!("box '{text}' is not comma-separated numbers")))?;
            let hw = if hw.len() == 1 {
                vec![hw[0]; r.dim()]
            } else {
                hw
            };
            QuadBox::new(hw, points)
        }
        None => {
            let hw = phi
                .effective_half_widths(r.k(), r.d(), 1e-10)
                .unwrap_or_else(|| vec![4.0; r.dim()]);
            QuadBox::new(hw, points)
        }
    }
}

fn parse_point(s: &str, r: &Realization) -> Result<GroupElement> {
    let coords: Vec<f64> = if s.trim().is_empty() {
        vec![0.0; r.dim()]
    } else {
        s.split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Input(format!("point '{s}' is not comma-separated numbers")))?
    };
    if coords.len() != r.dim() {
        return Err(Error::Input(format!(
            "point has {} coordinates, group dimension is {}",
            coords.len(),
            r.dim()
        )));
    }
    Ok(GroupElement {
        t: coords[..r.k()].to_vec(),
        n: coords[r.k()..].to_vec(),
    })
}

fn load_group(name: &str) -> Result<(groups::GroupDefinition, String)> {
    let def = groups::load(name)?;
    let text = serde_json::to_string(&def).expect("definition serializes");
    Ok((def, text))
}

fn env_seed() -> Option<u64> {
    std::env::var(SEED_ENV).ok().and_then(|v| v.parse().ok())
}

/// Runs the CLI against `std::env::args`; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    run_parsed(cli)
}

fn run_parsed(cli: Cli) -> i32 {
    let seed_override = cli.seed.or_else(env_seed);
    match execute(&cli.command, seed_override) {
        Ok(report) => {
            let text = if cli.pretty {
                serde_json::to_string_pretty(&report).expect("report serializes")
            } else {
                serde_json::to_string(&report).expect("report serializes")
            };
            // tolerate a closed pipe (e.g. downstream `head`)
            use std::io::Write;
            let _ = writeln!(std::io::stdout(), "{text}");
            if report.verdict == "pass" {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Validation { .. } | Error::Contract(..) => 1,
                _ => 2,
            }
        }
    }
}

fn execute(cmd: &Command, seed_override: Option<u64>) -> Result<Report> {
    let version = env!("CARGO_PKG_VERSION").to_string();
    match cmd {
        Command::CheckAlgebra(g) => {
            let (def, text) = load_group(&g.group)?;
            let algebra = def.to_algebra()?;
            let solvable = algebra.is_solvable();
            let nil = def.nilradical_subspace()?;
            let nil_report = algebra.validate_nilradical(&nil)?;
            let pass = solvable && nil_report.is_ideal && nil_report.is_nilpotent;
            Ok(Report {
                command: "check-algebra".into(),
                version,
                seed: def.seed(),
                inputs_digest: digest(&[&text]),
                verdict: verdict(pass),
                results: serde_json::json!({
                    "name": def.name,
                    "dim": def.dim,
                    "jacobi": "pass",
                    "solvable": solvable,
                    "nilradical": nil_report,
                }),
            })
        }
        Command::Realize(g) => {
            let (def, text) = load_group(&g.group)?;
            let r = def.realize(seed_override)?;
            let seed = seed_override.unwrap_or_else(|| def.seed());
            let a = r.sample_elements(1.0, 2, seed ^ 0xA);
            let product = r.multiply(&a[0], &a[1])?;
            let inv_check = r.multiply(&a[0], &r.inverse(&a[0])?)?;
            Ok(Report {
                command: "realize".into(),
                version,
                seed,
                inputs_digest: digest(&[&text]),
                verdict: verdict(true),
                results: serde_json::json!({
                    "name": def.name,
                    "realization": r.summary(),
                    "spot_check": {
                        "g": a[0], "h": a[1], "gh": product,
                        "g_times_g_inverse_distance_to_identity":
                            inv_check.distance(&r.identity()),
                        "tolerance": verify::AXIOM_TOL,
                    },
                }),
            })
        }
        Command::VerifyProperties {
            group,
            samples,
            scales,
        } => {
            let (def, text) = load_group(&group.group)?;
            let r = def.realize(seed_override)?;
            let seed = seed_override.unwrap_or_else(|| def.seed());
            let axioms = verify::group_axiom_report(&r, 3 * samples, seed)?;
            let haar = verify::haar_report(&r, (*samples / 10).clamp(5, 40), seed ^ 0x7)?;
            let w = Weight::new(&r);
            let std_samples = w.standard_samples(*samples, seed ^ 0x9);
            let (q, _) = w.fit_size_exponent(&std_samples);
            let p = (r.dim() + 2) * q;
            let volume = w.check_volume_compensation(p, &w.default_boxes(*scales))?;
            let subpoly = w.check_subpolynomial(*samples, seed ^ 0x51)?;
            let inverse = w.check_inverse_equivalence(*samples, seed ^ 0x52)?;
            let modular = w.check_modular_domination(*samples, seed ^ 0x53)?;
            let pass = axioms.pass && haar.pass && volume.convergent && modular.violations.is_empty();
            Ok(Report {
                command: "verify-properties".into(),
                version,
                seed,
                inputs_digest: digest(&[&text, &samples.to_string(), &scales.to_string()]),
                verdict: verdict(pass),
                results: serde_json::json!({
                    "name": def.name,
                    "axioms": axioms,
                    "haar": haar,
                    "volume_compensation": volume,
                    "subpolynomial": subpoly,
                    "inverse_equivalence": inverse,
                    "modular_domination": modular,
                }),
            })
        }
        Command::Seminorm {
            group,
            probe,
            k,
            alpha,
            q,
            r#box,
        } => {
            let (def, text) = load_group(&group.group)?;
            let r = def.realize(seed_override)?;
            let seed = seed_override.unwrap_or_else(|| def.seed());
            let phi = schwartz::probe(&r, probe)?;
            let alpha_v = parse_alpha(alpha, r.dim())?;
            let exponent = match q.as_str() {
                "one" | "1" => LebesgueExponent::One,
                "two" | "2" => LebesgueExponent::Two,
                "inf" | "infinity" => LebesgueExponent::Infinity,
                other => {
                    return Err(Error::Input(format!(
                        "unknown Lebesgue exponent '{other}' (use one, two, inf)"
                    )))
                }
            };
            let spec = SeminormSpec::new(exponent, *k, alpha_v.clone())?;
            let domain = parse_box(r#box.as_deref(), &r, &phi, 16)?;
            let w = Weight::new(&r);
            let value = schwartz::seminorm(&r, &w, &phi, &spec, &domain)?;
            Ok(Report {
                command: "seminorm".into(),
                version,
                seed,
                inputs_digest: digest(&[
                    &text,
                    probe,
                    &k.to_string(),
                    alpha,
                    q,
                    r#box.as_deref().unwrap_or(""),
                ]),
                verdict: verdict(value.value.is_finite()),
                results: serde_json::json!({
                    "name": def.name,
                    "probe": probe,
                    "k": k,
                    "alpha": alpha_v,
                    "q": q,
                    "seminorm": value,
                }),
            })
        }
        Command::Convolve {
            group,
            probe1,
            probe2,
            at,
            points,
            monte_carlo,
        } => {
            let (def, text) = load_group(&group.group)?;
            let r = def.realize(seed_override)?;
            let seed = seed_override.unwrap_or_else(|| def.seed());
            let phi = schwartz::probe(&r, probe1)?;
            let psi = schwartz::probe(&r, probe2)?;
            let g = parse_point(at, &r)?;
            let budget = ConvolutionBudget {
                points_per_axis: *points,
                monte_carlo: *monte_carlo,
                seed,
            };
            let value = schwartz::convolve(&r, &phi, &psi, &g, &budget)?;
            Ok(Report {
                command: "convolve".into(),
                version,
                seed,
                inputs_digest: digest(&[
                    &text,
                    probe1,
                    probe2,
                    at,
                    &points.to_string(),
                    &format!("{monte_carlo:?}"),
                ]),
                verdict: verdict(value.value.norm().is_finite()),
                results: serde_json::json!({
                    "name": def.name,
                    "at": g,
                    "value_re": value.value.re,
                    "value_im": value.value.im,
                    "tail_bound": value.tail_bound,
                    "nodes": value.nodes,
                }),
            })
        }
        Command::Membership {
            group,
            probe,
            k_max,
            alpha_max,
            r#box,
        } => {
            let (def, text) = load_group(&group.group)?;
            let r = def.realize(seed_override)?;
            let seed = seed_override.unwrap_or_else(|| def.seed());
            let phi = schwartz::probe(&r, probe)?;
            let domain = parse_box(r#box.as_deref(), &r, &phi, 8)?;
            let w = Weight::new(&r);
            let report = schwartz::membership_report(&r, &w, &phi, *k_max, *alpha_max, &domain)?;
            let pass = report.consistent;
            Ok(Report {
                command: "membership".into(),
                version,
                seed,
                inputs_digest: digest(&[
                    &text,
                    probe,
                    &k_max.to_string(),
                    &alpha_max.to_string(),
                    r#box.as_deref().unwrap_or(""),
                ]),
                verdict: verdict(pass),
                results: serde_json::json!({
                    "name": def.name,
                    "membership": report,
                }),
            })
        }
        Command::Pair {
            group,
            kernel,
            alpha,
            probe,
            points,
        } => {
            let (def, text) = load_group(&group.group)?;
            let r = def.realize(seed_override)?;
            let seed = seed_override.unwrap_or_else(|| def.seed());
            let phi = schwartz::probe(&r, probe)?;
            let w = Weight::new(&r);
            let f = if kernel == "one" {
                SmoothFunction::new(
                    "one",
                    schwartz::Decay::SlowlyIncreasing {
                        order: 0,
                        amplitude: 1.0,
                    },
                    |_| num_complex::Complex64::new(1.0, 0.0),
                )
            } else {
                schwartz::probe(&r, kernel)?
            };
            let embedded = distributions::embed(&r, &w, f, 1)?;
            let alpha_v = parse_alpha(alpha, r.dim())?;
            let t: TemperedDistribution = distributions::derivative(embedded, alpha_v.clone())?;
            let domain = distributions::default_pairing_box(&r, &phi, *points)?;
            let value = distributions::pair(&r, &w, &t, &phi, &domain)?;
            Ok(Report {
                command: "pair".into(),
                version,
                seed,
                inputs_digest: digest(&[&text, kernel, alpha, probe, &points.to_string()]),
                verdict: verdict(value.re.is_finite() && value.im.is_finite()),
                results: serde_json::json!({
                    "name": def.name,
                    "kernel": kernel,
                    "alpha": alpha_v,
                    "probe": probe,
                    "pairing": value,
                }),
            })
        }
        Command::Product {
            group1,
            group2,
            samples,
        } => {
            let (def1, text1) = load_group(group1)?;
            let (def2, text2) = load_group(group2)?;
            let r1 = def1.realize(seed_override)?;
            let r2 = def2.realize(seed_override)?;
            let seed = seed_override.unwrap_or_else(|| def1.seed() ^ def2.seed().rotate_left(1));
            let pr = product_groups::direct_product(&r1, &r2, seed)?;
            let residual = product_groups::block_product_residual(&pr, 32, seed ^ 0xB)?;
            let sigma = product_groups::check_sigma_product(&pr, *samples, seed ^ 0xC)?;
            let pass = residual < 1e-10 && sigma.stable;
            Ok(Report {
                command: "product".into(),
                version,
                seed,
                inputs_digest: digest(&[&text1, &text2, &samples.to_string()]),
                verdict: verdict(pass),
                results: serde_json::json!({
                    "factors": [def1.name, def2.name],
                    "realization": pr.realization().summary(),
                    "scale2": pr.scale2(),
                    "block_product_residual": residual,
                    "block_product_tolerance": 1e-10,
                    "sigma_product": sigma,
                }),
            })
        }
    }
}

fn verdict(pass: bool) -> String {
    if pass { "pass" } else { "fail" }.to_string()
}
