//! Batch front end for the entropic-constant toolkit: generate instance
//! files from presets, compute individual constants, and audit the three
//! inequality families over seeded random ensembles.
//!
//! Exit codes are a stable contract: 0 success, 1 invalid input, 2 solver
//! non-convergence, 3 audit failure. All floating-point output is printed
//! with 17 significant digits. Quantities are natural-log based; `--log2`
//! rescales logarithmic outputs (entropies, divergences, the quadrature
//! correction) for display only.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use ncssa::algebra::Algebra;
use ncssa::channel::Channel;
use ncssa::constants::{self, KappaConfig, OverlapOptions};
use ncssa::inclusion::Inclusion;
use ncssa::linalg::{self, CMat};
use ncssa::random;
use ncssa::schema::{ChannelSpec, ElementSpec, InclusionSpec, InstanceSpec, PovmSpec};
use ncssa::verify::{self, InequalityReport, TheoremId};
use ncssa::{AlgElement, Error, Povm, Result};

const DIM_PRODUCT_CAP: usize = 64;
const LN2: f64 = std::f64::consts::LN_2;

#[derive(Parser)]
#[command(name = "ncssa", version, about = "Entropic uncertainty constants and inequality audits")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance file from a named preset.
    Gen(GenArgs),
    /// Compute one constant for an instance file and print JSON.
    Constant(ConstantArgs),
    /// Audit an inequality on a seeded ensemble and write a CSV report.
    Audit(AuditArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Preset family: mub | ptrace | cs | random.
    #[arg(long)]
    preset: String,
    /// Generator seed; defaults to $NCSSA_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Base dimension for the mub preset (must be prime).
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Left factor dimension (ptrace, random).
    #[arg(long = "d-a", default_value_t = 2)]
    d_a: usize,
    /// Right factor dimension (ptrace, random).
    #[arg(long = "d-b", default_value_t = 2)]
    d_b: usize,
    /// Base system dimension (random).
    #[arg(long = "d-m", default_value_t = 2)]
    d_m: usize,
    /// Commuting-square variant: tensor | mub.
    #[arg(long, default_value = "tensor")]
    variant: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstantArgs {
    /// Instance JSON file.
    instance: PathBuf,
    /// Which constant: cb | overlap | bsw | kappa | flo.
    #[arg(long)]
    constant: String,
    /// Solver seed; defaults to $NCSSA_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Rescale logarithmic outputs to base 2 (display only).
    #[arg(long)]
    log2: bool,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Args)]
struct AuditArgs {
    /// Inequality family: A | B | C.
    #[arg(long)]
    theorem: String,
    /// Number of seeded instances.
    #[arg(long)]
    seeds: u64,
    /// Instance dimensions (comma separated); per-theorem defaults apply.
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    /// CSV report path.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads for the seed loop; rows stay in seed order.
    #[arg(long)]
    jobs: Option<usize>,
    /// Base seed; defaults to $NCSSA_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Rescale logarithmic outputs to base 2 (display only).
    #[arg(long)]
    log2: bool,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Args)]
struct QuadArgs {
    /// Quadrature truncation half-width for the correction integral.
    #[arg(long = "quad-T")]
    quad_t: Option<f64>,
    /// Number of quadrature panels over the truncated window.
    #[arg(long = "quad-panels")]
    quad_panels: Option<usize>,
    /// Gauss nodes per panel.
    #[arg(long = "quad-nodes")]
    quad_nodes: Option<usize>,
    /// Panel-halving convergence tolerance for the correction.
    #[arg(long = "quad-tol")]
    quad_tol: Option<f64>,
}

impl QuadArgs {
    fn config(&self) -> KappaConfig {
        let mut cfg = KappaConfig::default();
        if let Some(t) = self.quad_t {
            cfg.panels.half_width = t;
        }
        if let Some(n) = self.quad_panels.filter(|&n| n > 0) {
            cfg.panels.panel_width = 2.0 * cfg.panels.half_width / n as f64;
        }
        if let Some(n) = self.quad_nodes {
            cfg.panels.nodes_per_panel = n;
        }
        if let Some(tol) = self.quad_tol {
            cfg.refine_tol = tol;
        }
        cfg
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = match cli.cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Constant(args) => cmd_constant(args),
        Cmd::Audit(args) => cmd_audit(args),
    };
    match run {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NonConvergence(_) | Error::Solver(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn default_seed(explicit: Option<u64>) -> u64 {
    explicit.unwrap_or_else(|| {
        std::env::var("NCSSA_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0)
    })
}

fn check_cap(dims: &[usize]) -> Result<()> {
    let product: usize = dims.iter().product();
    if product == 0 || product > DIM_PRODUCT_CAP {
        return Err(Error::input(format!(
            "dimension product {product} outside the desk-scale cap {DIM_PRODUCT_CAP}"
        )));
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let seed = default_seed(args.seed);
    let spec = match args.preset.as_str() {
        "mub" => gen_mub(args.d, seed)?,
        "ptrace" => gen_ptrace(args.d_a, args.d_b, seed)?,
        "cs" => gen_cs(&args.variant, seed)?,
        "random" => gen_random(args.d_m, args.d_a, args.d_b, seed)?,
        other => return Err(Error::input(format!("unknown preset '{other}'"))),
    };
    let text = spec.to_json()?;
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::input(format!("writing {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn gen_mub(d: usize, seed: u64) -> Result<InstanceSpec> {
    check_cap(&[d])?;
    let inst = verify::build_mub_instance(d)?;
    let comp = Povm::from_basis(&linalg::eye(d))?;
    let four = Povm::from_basis(&linalg::fourier_unitary(d))?;
    let mut spec = InstanceSpec::new("mub", seed, &[d]);
    spec.povm_a = Some(PovmSpec::from_povm(&comp));
    spec.povm_b = Some(PovmSpec::from_povm(&four));
    spec.phi_a = Some(ChannelSpec::from_povm(&comp));
    spec.phi_b = Some(ChannelSpec::from_povm(&four));
    spec.r_inc =
        Some(InclusionSpec::from_inclusion(&Inclusion::trivial(inst.phi_a.output(), 1.0)?));
    Ok(spec)
}

fn gen_ptrace(d_a: usize, d_b: usize, seed: u64) -> Result<InstanceSpec> {
    check_cap(&[d_a, d_b])?;
    let inst = verify::build_partial_trace_instance(d_a, d_b)?;
    let mut spec = InstanceSpec::new("ptrace", seed, &[d_a, d_b]);
    spec.phi_a = Some(ChannelSpec::from_channel(&inst.phi_a));
    spec.phi_b = Some(ChannelSpec::from_channel(&inst.phi_b));
    spec.r_inc =
        Some(InclusionSpec::from_inclusion(&Inclusion::trivial(inst.phi_a.output(), 1.0)?));
    Ok(spec)
}

fn gen_cs(variant: &str, seed: u64) -> Result<InstanceSpec> {
    let (preset, dims) = match variant {
        "tensor" => (verify::CommutingSquarePreset::TensorFactors, vec![4]),
        "mub" => (verify::CommutingSquarePreset::MubDiagonals, vec![2]),
        other => return Err(Error::input(format!("unknown commuting-square variant '{other}'"))),
    };
    let sq = verify::build_commuting_square(preset)?;
    let r_in_a = Inclusion::from_embed(sq.a_inc.cond_exp().compose(sq.r_inc.embed())?)?;
    let mut spec = InstanceSpec::new("cs", seed, &dims);
    spec.phi_a = Some(ChannelSpec::from_channel(sq.a_inc.cond_exp()));
    spec.phi_b = Some(ChannelSpec::from_channel(sq.b_inc.cond_exp()));
    spec.r_inc = Some(InclusionSpec::from_inclusion(&r_in_a));
    spec.a_inc = Some(InclusionSpec::from_inclusion(&sq.a_inc));
    spec.b_inc = Some(InclusionSpec::from_inclusion(&sq.b_inc));
    Ok(spec)
}

fn gen_random(d_m: usize, d_a: usize, d_b: usize, seed: u64) -> Result<InstanceSpec> {
    check_cap(&[d_m, d_a, d_b])?;
    let mut rng = random::seeded_rng(seed);
    let (phi_a, phi_b) = verify::random_channel_pair(d_m, d_a, d_b, &mut rng)?;
    let m = Algebra::full(d_m);
    let rho = random::ginibre_state(&m, &mut rng)?;
    let sigma = random::ginibre_state(&m, &mut rng)?;
    let omega = phi_b.apply(&sigma)?;
    let (exp_inc, e_r) = constants::trivial_state_expectation(phi_b.output(), &omega)?;
    let mut spec = InstanceSpec::new("random", seed, &[d_m, d_a, d_b]);
    spec.phi_a = Some(ChannelSpec::from_channel(&phi_a));
    spec.phi_b = Some(ChannelSpec::from_channel(&phi_b));
    spec.rho = Some(ElementSpec::from_element(&rho));
    spec.sigma = Some(ElementSpec::from_element(&sigma));
    spec.r_inc = Some(InclusionSpec::from_inclusion(&Inclusion::trivial(phi_a.output(), 1.0)?));
    spec.exp_inc = Some(InclusionSpec::from_inclusion(&exp_inc));
    spec.exp_channel = Some(ChannelSpec::from_channel(&e_r));
    Ok(spec)
}

fn fmt_f(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "\"nan\"".into()
    } else if x > 0.0 {
        "\"inf\"".into()
    } else {
        "\"-inf\"".into()
    }
}

fn matrix_json(m: &CMat) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let cells: Vec<String> = (0..m.ncols())
                .map(|j| format!("[{},{}]", fmt_f(m[(i, j)].re), fmt_f(m[(i, j)].im)))
                .collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn element_json(x: &AlgElement) -> String {
    let blocks: Vec<String> = x
        .algebra()
        .blocks()
        .iter()
        .map(|b| format!("{{\"dim\":{},\"weight\":{}}}", b.dim, fmt_f(b.weight)))
        .collect();
    let mats: Vec<String> = x.blocks().iter().map(matrix_json).collect();
    format!(
        "{{\"algebra\":{{\"blocks\":[{}]}},\"blocks\":[{}]}}",
        blocks.join(","),
        mats.join(",")
    )
}

fn cmd_constant(args: ConstantArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.instance)
        .map_err(|e| Error::input(format!("reading {}: {e}", args.instance.display())))?;
    let spec = InstanceSpec::from_json(&text)?;
    let seed = default_seed(args.seed);
    let log_scale = if args.log2 { LN2 } else { 1.0 };

    match args.constant.as_str() {
        "cb" => {
            let (phi_a, phi_b) = spec.channel_pair()?;
            let value = constants::cb_constant(&phi_a, &phi_b)?;
            println!("{{\"constant\":\"cb\",\"value\":{}}}", fmt_f(value));
        }
        "flo" => {
            let (p, q) = spec.povm_pair()?;
            let (value, argmax) = constants::frank_lieb_overlap(&p, &q)?;
            let pairs: Vec<String> = argmax.iter().map(|(x, z)| format!("[{x},{z}]")).collect();
            println!(
                "{{\"constant\":\"flo\",\"value\":{},\"argmax\":[{}]}}",
                fmt_f(value),
                pairs.join(",")
            );
        }
        "overlap" => {
            let (phi_a, phi_b) = spec.channel_pair()?;
            let r_inc = spec.constraint_inclusion()?;
            let opts = OverlapOptions { seed, ..OverlapOptions::default() };
            let res = constants::overlap_constant(&phi_a, &phi_b, &r_inc, &opts)?;
            println!(
                "{{\"constant\":\"overlap\",\"value\":{},\"rounds\":{},\"converged\":{},\"restarts_agree\":{},\"witness_a\":{},\"witness_b\":{}}}",
                fmt_f(res.value),
                res.diagnostics.rounds,
                res.diagnostics.converged,
                res.diagnostics.restarts_agree,
                element_json(&res.witness_a),
                element_json(&res.witness_b),
            );
            if !res.diagnostics.converged || !res.diagnostics.restarts_agree {
                return Ok(ExitCode::from(2));
            }
        }
        "bsw" => {
            let (phi_a, phi_b) = spec.channel_pair()?;
            let res = constants::bsw_constant(&phi_a, &phi_b, 8, seed)?;
            println!(
                "{{\"constant\":\"bsw\",\"value\":{},\"upper\":{},\"witness_a\":{},\"witness_b\":{}}}",
                fmt_f(res.lower),
                fmt_f(res.upper),
                element_json(&res.witness_a),
                element_json(&res.witness_b),
            );
        }
        "kappa" => {
            let (rho, sigma) = spec.state_pair()?;
            let (phi_a, phi_b) = spec.channel_pair()?;
            let (exp_inc, e_r) = spec.expectation()?;
            let cfg = args.quad.config();
            let res = constants::kappa(&rho, &sigma, &phi_a, &phi_b, &exp_inc, &e_r, &cfg)?;
            println!(
                "{{\"constant\":\"kappa\",\"value\":{},\"quad_error\":{},\"truncation\":{},\"samples\":{}}}",
                fmt_f(res.kappa / log_scale),
                fmt_f(res.quadrature_error_estimate / log_scale),
                fmt_f(res.truncation),
                res.samples.len(),
            );
        }
        other => return Err(Error::input(format!("unknown constant '{other}'"))),
    }
    Ok(ExitCode::SUCCESS)
}

struct Row {
    seed: u64,
    lhs: f64,
    rhs: f64,
    constant: f64,
    gap: f64,
    pass: bool,
    wall_ms: u128,
}

fn cmd_audit(args: AuditArgs) -> Result<ExitCode> {
    let theorem: TheoremId = args.theorem.parse()?;
    let dims: Vec<usize> = if args.dims.is_empty() {
        match theorem {
            TheoremId::A => vec![2, 2, 2, 2],
            TheoremId::B => vec![2, 2, 2],
            TheoremId::C => vec![2, 2],
            other => return Err(Error::input(format!("no audit ensemble for theorem {other}"))),
        }
    } else {
        args.dims.clone()
    };
    let expected = match theorem {
        TheoremId::A => 4,
        TheoremId::B => 3,
        _ => 2,
    };
    if dims.len() != expected {
        return Err(Error::input(format!(
            "theorem {theorem} takes {expected} dimensions, got {}",
            dims.len()
        )));
    }
    check_cap(&dims)?;

    let base = default_seed(args.seed);
    let cfg = args.quad.config();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::input(format!("thread pool: {e}")))?;
    let seeds: Vec<u64> = (0..args.seeds).collect();
    let rows: Vec<Row> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&s| audit_row(theorem, base, s, &dims, &cfg))
            .collect::<Result<Vec<_>>>()
    })?;

    // The constant column is the multiplicative constant for A and B and
    // the additive log-scale correction for C; only the latter rescales.
    let log_scale = if args.log2 { LN2 } else { 1.0 };
    let scale_constant = matches!(theorem, TheoremId::C);
    let mut csv = String::new();
    csv.push_str("# ncssa audit schema v1\n");
    csv.push_str("seed,dims,lhs,rhs,constant,gap,pass,wall_ms\n");
    let dims_label = dims.iter().map(ToString::to_string).collect::<Vec<_>>().join("x");
    let mut min_gap = f64::INFINITY;
    let mut all_pass = true;
    let mut total_ms: u128 = 0;
    for row in &rows {
        let c = if scale_constant { row.constant / log_scale } else { row.constant };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            row.seed,
            dims_label,
            csv_f(row.lhs / log_scale),
            csv_f(row.rhs / log_scale),
            csv_f(c),
            csv_f(row.gap / log_scale),
            row.pass,
            row.wall_ms,
        );
        min_gap = min_gap.min(row.gap / log_scale);
        all_pass &= row.pass;
        total_ms += row.wall_ms;
    }
    let min_field = if rows.is_empty() { String::new() } else { csv_f(min_gap) };
    let _ = writeln!(csv, "summary,{dims_label},,,,{min_field},{all_pass},{total_ms}");
    std::fs::write(&args.out, csv)
        .map_err(|e| Error::input(format!("writing {}: {e}", args.out.display())))?;
    println!(
        "theorem {theorem}: {} seeds, min gap {}, {}",
        rows.len(),
        if rows.is_empty() { "n/a".to_string() } else { format!("{min_gap:.3e}") },
        if all_pass { "all pass" } else { "FAILURES" },
    );
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn csv_f(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn audit_row(
    theorem: TheoremId,
    base: u64,
    seed: u64,
    dims: &[usize],
    cfg: &KappaConfig,
) -> Result<Row> {
    let start = Instant::now();
    let mut rng = random::seeded_rng(base.wrapping_add(seed));
    let report: InequalityReport = match theorem {
        TheoremId::A => {
            let (phi_a, phi_b) = verify::random_channel_pair(dims[0], dims[1], dims[2], &mut rng)?;
            let rho = random::ginibre_state(&Algebra::full(dims[0] * dims[3]), &mut rng)?;
            verify::check_theorem_a(&rho, &phi_a, &phi_b, None)?
        }
        TheoremId::B => {
            let (phi_a, phi_b) = verify::random_channel_pair(dims[0], dims[1], dims[2], &mut rng)?;
            let rho = random::ginibre_state(&Algebra::full(dims[0]), &mut rng)?;
            let r_inc = Inclusion::trivial(phi_a.output(), 1.0)?;
            let opts =
                OverlapOptions { restarts: 8, seed: base.wrapping_add(seed), ..OverlapOptions::default() };
            verify::check_theorem_b(&rho, &phi_a, &phi_b, &r_inc, &opts)?
        }
        _ => {
            let m = Algebra::full(dims[0]);
            let rho = random::ginibre_state(&m, &mut rng)?;
            let sigma = random::ginibre_state(&m, &mut rng)?;
            let phi_a = Channel::trace_channel(&m)?;
            let phi_b = random::stinespring_channel(dims[0], dims[1], dims[0], &mut rng)?;
            let omega = phi_b.apply(&sigma)?;
            let (exp_inc, e_r) = constants::trivial_state_expectation(phi_b.output(), &omega)?;
            verify::check_theorem_c(&rho, &sigma, &phi_a, &phi_b, &exp_inc, &e_r, cfg)?
        }
    };
    Ok(Row {
        seed,
        lhs: report.lhs,
        rhs: report.rhs,
        constant: report.constant_used,
        gap: report.gap,
        pass: report.pass,
        wall_ms: start.elapsed().as_millis(),
    })
}
