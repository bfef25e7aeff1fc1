//! Command-line front end for `ztcp-core`.
//!
//! [`run`] takes the argument vector and two writers so the binary and the
//! tests share one code path. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, solver converged, oracle agrees, verification passed |
//! | 1 | usage error, unreadable or malformed file, invalid parameter |
//! | 2 | a precondition of the theory fails (reported by name) |
//! | 3 | no convergence, failed verification, or oracle mismatch |

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use ztcp_core::io::{format_value, parse_tensor, parse_vector, serialize_tensor, serialize_vector};
use ztcp_core::{
    check_system_equivalence, classify, find_z_permutation, generate_instance,
    oracle_min_support_with, sparsest_solve, spectral_radius, tcp_residual, z_permuted_instance,
    Error, GeneratorParams, OracleCertificate, OracleOptions, Precondition, Scheme, SolveReport,
    SolveStatus, SolverConfig, SparsestResult, TcpInstance, TcpResidual, Tensor,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_APPLICABLE: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "ztcp",
    version,
    about = "Sparsest solutions of Z-tensor complementarity problems"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by all subcommands.
#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Residual tolerance for solvers, spectral brackets and verification.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 100_000)]
    max_iter: usize,
    #[arg(long, global = true, value_enum, default_value_t = SchemeArg::Jacobi)]
    scheme: SchemeArg,
    /// Components at or below this magnitude count as zero.
    #[arg(long, global = true, default_value_t = 1e-8)]
    zero_threshold: f64,
    /// Iterates above this max-norm are declared divergent.
    #[arg(long, global = true, default_value_t = 1e12)]
    divergence_bound: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Text)]
    output: OutputMode,
    /// Worker threads for oracle enumeration.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SchemeArg {
    Jacobi,
    GaussSeidel,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OutputMode {
    Text,
    JsonLines,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Z / partially Z / strong M classification and permutation certificate.
    Classify { tensor: PathBuf },
    /// Solve A x^(m-1) = b by the monotone iteration from 0.
    Solve { tensor: PathBuf, rhs: PathBuf },
    /// Sparsest complementarity solution via the least element.
    Sparsest {
        tensor: PathBuf,
        rhs: PathBuf,
        /// Cross-check the support size against brute-force enumeration.
        #[arg(long)]
        oracle: bool,
        /// Reorder equations to make the tensor a Z-tensor first.
        #[arg(long)]
        permute: bool,
    },
    /// Check a candidate solution against the complementarity conditions.
    Verify {
        tensor: PathBuf,
        rhs: PathBuf,
        solution: PathBuf,
    },
    /// Bracket the spectral radius of a nonnegative tensor.
    Rho { tensor: PathBuf },
    /// Row permutation that turns the tensor into a Z-tensor.
    Permz { tensor: PathBuf },
    /// Random strong M-tensor instance; writes <prefix>.tsr and <prefix>.vec.
    Gen {
        prefix: PathBuf,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0.5)]
        margin: f64,
    },
}

/// Failure that ends a subcommand early.
enum Fail {
    Usage(String),
    NotApplicable(Precondition),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::NotApplicable(p) => Fail::NotApplicable(p),
            other => Fail::Usage(other.to_string()),
        }
    }
}

struct Ctx<'a> {
    cfg: RunConfig,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn json(&self) -> bool {
        self.cfg.output == OutputMode::JsonLines
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig {
            tol: self.cfg.tol,
            max_iter: self.cfg.max_iter,
            scheme: match self.cfg.scheme {
                SchemeArg::Jacobi => Scheme::Jacobi,
                SchemeArg::GaussSeidel => Scheme::GaussSeidel,
            },
            divergence_bound: self.cfg.divergence_bound,
        }
    }

    fn emit(&mut self, record: Value, text: &[String]) {
        // write failures (closed pipe) are not recoverable here
        if self.json() {
            let _ = writeln!(self.out, "{record}");
        } else {
            for line in text {
                let _ = writeln!(self.out, "{line}");
            }
        }
    }
}

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let mut ctx = Ctx {
        cfg: cli.run,
        out,
        err,
    };
    if let Err(e) = ctx.solver().validate() {
        let _ = writeln!(ctx.err, "error: {e}");
        return EXIT_USAGE;
    }
    if !(ctx.cfg.zero_threshold >= 0.0) || ctx.cfg.threads == 0 {
        let _ = writeln!(
            ctx.err,
            "error: need --zero-threshold >= 0 and --threads >= 1"
        );
        return EXIT_USAGE;
    }
    let command = cli.command.name();
    let result = match cli.command {
        Command::Classify { tensor } => cmd_classify(&mut ctx, &tensor),
        Command::Solve { tensor, rhs } => cmd_solve(&mut ctx, &tensor, &rhs),
        Command::Sparsest {
            tensor,
            rhs,
            oracle,
            permute,
        } => cmd_sparsest(&mut ctx, &tensor, &rhs, oracle, permute),
        Command::Verify {
            tensor,
            rhs,
            solution,
        } => cmd_verify(&mut ctx, &tensor, &rhs, &solution),
        Command::Rho { tensor } => cmd_rho(&mut ctx, &tensor),
        Command::Permz { tensor } => cmd_permz(&mut ctx, &tensor),
        Command::Gen {
            prefix,
            n,
            m,
            density,
            margin,
        } => cmd_gen(&mut ctx, &prefix, n, m, density, margin),
    };
    match result {
        Ok(code) => code,
        Err(Fail::Usage(msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Fail::NotApplicable(p)) => {
            let _ = writeln!(ctx.err, "not applicable: {p}");
            let record = json!({
                "command": command,
                "status": "not_applicable",
                "precondition": p,
            });
            ctx.emit(
                record,
                &[format!("status: not_applicable ({})", variant_name(p))],
            );
            EXIT_NOT_APPLICABLE
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Solve { .. } => "solve",
            Command::Sparsest { .. } => "sparsest",
            Command::Verify { .. } => "verify",
            Command::Rho { .. } => "rho",
            Command::Permz { .. } => "permz",
            Command::Gen { .. } => "gen",
        }
    }
}

/// The serde name of a unit enum variant.
fn variant_name<T: serde::Serialize>(v: T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn load_tensor(path: &Path) -> Result<Tensor, Fail> {
    parse_tensor(&read(path)?).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn load_vector(path: &Path) -> Result<Vec<f64>, Fail> {
    parse_vector(&read(path)?).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn load_instance(tensor: &Path, rhs: &Path) -> Result<TcpInstance, Fail> {
    Ok(TcpInstance::new(load_tensor(tensor)?, load_vector(rhs)?)?)
}

fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

fn fmt_vec(x: &[f64]) -> String {
    x.iter()
        .map(|&v| format_value(v))
        .collect::<Vec<_>>()
        .join(" ")
}

fn fmt_idx(idx: &[usize]) -> String {
    format!(
        "{{{}}}",
        one_based(idx)
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    )
}

fn tcp_json(t: &TcpResidual) -> Value {
    json!({
        "primal_viol": t.primal_viol,
        "dual_viol": t.dual_viol,
        "compl_gap": t.compl_gap,
    })
}

fn tcp_text(t: &TcpResidual) -> String {
    format!(
        "tcp residual: primal {} dual {} gap {}",
        format_value(t.primal_viol),
        format_value(t.dual_viol),
        format_value(t.compl_gap)
    )
}

fn cmd_classify(ctx: &mut Ctx, path: &Path) -> Result<i32, Fail> {
    let a = load_tensor(path)?;
    let c = classify(&a, ctx.cfg.tol, ctx.cfg.max_iter)?;
    let perm = c.z_permutation.as_deref().map(one_based);
    let record = json!({
        "command": "classify",
        "order": a.order(),
        "dim": a.dim(),
        "is_z": c.is_z,
        "is_partially_z": c.is_partially_z,
        "split_s": c.split_s,
        "spectral_radius_bracket": c.spectral_radius_bracket,
        "is_strong_m": c.is_strong_m,
        "z_permutation": perm,
    });
    let mut text = vec![
        format!("order {} dim {} nnz {}", a.order(), a.dim(), a.nnz()),
        format!("is_z: {}", c.is_z),
        format!("is_partially_z: {}", c.is_partially_z),
    ];
    if let (Some(s), Some(br), Some(verdict)) =
        (c.split_s, c.spectral_radius_bracket, c.is_strong_m)
    {
        text.push(format!("split s: {}", format_value(s)));
        text.push(format!(
            "rho(B) in [{}, {}]{}",
            format_value(br.lo),
            format_value(br.hi),
            if br.converged { "" } else { " (not converged)" }
        ));
        text.push(format!("is_strong_m: {}", variant_name(verdict)));
    }
    match &perm {
        Some(p) => text.push(format!("z_permutation: {p:?}")),
        None => text.push("z_permutation: none".into()),
    }
    ctx.emit(record, &text);
    Ok(EXIT_OK)
}

fn solve_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Converged => EXIT_OK,
        SolveStatus::NotApplicable => EXIT_NOT_APPLICABLE,
        SolveStatus::MaxIter | SolveStatus::Diverged => EXIT_FAILED,
    }
}

fn cmd_solve(ctx: &mut Ctx, tensor: &Path, rhs: &Path) -> Result<i32, Fail> {
    let inst = load_instance(tensor, rhs)?;
    let r: SolveReport = ztcp_core::solve_multilinear(&inst, &ctx.solver())?;
    if let Some(p) = r.precondition {
        return Err(Fail::NotApplicable(p));
    }
    let record = json!({
        "command": "solve",
        "x": r.x,
        "residual_inf": r.residual_inf,
        "iterations": r.iterations,
        "status": r.status,
        "monotone": r.monotone,
        "precondition": r.precondition,
    });
    let text = vec![
        format!("status: {}", variant_name(r.status)),
        format!("x: {}", fmt_vec(&r.x)),
        format!("residual: {}", format_value(r.residual_inf)),
        format!("iterations: {}", r.iterations),
        format!("monotone: {}", r.monotone),
    ];
    ctx.emit(record, &text);
    if r.status != SolveStatus::Converged {
        let _ = writeln!(
            ctx.err,
            "solver stopped without converging: {}",
            variant_name(r.status)
        );
    }
    Ok(solve_code(r.status))
}

fn oracle_json(c: &OracleCertificate) -> Value {
    json!({
        "min_support_size": c.min_support_size,
        "witness": c.witness,
        "support": one_based(&c.support),
        "enumerated_supports": c.enumerated_supports,
        "skipped_supports": c.skipped_supports,
    })
}

fn cmd_sparsest(
    ctx: &mut Ctx,
    tensor: &Path,
    rhs: &Path,
    oracle: bool,
    permute: bool,
) -> Result<i32, Fail> {
    let inst = load_instance(tensor, rhs)?;
    let cfg = ctx.solver();
    let (perm, work) = if permute {
        let (p, w) = z_permuted_instance(&inst)?;
        (Some(p), w)
    } else {
        (None, inst.clone())
    };
    let mut res: SparsestResult = sparsest_solve(&work, &cfg, ctx.cfg.zero_threshold)?;
    if let Some(p) = perm {
        res.tcp = tcp_residual(&inst, &res.x_star)?;
        res.permutation = Some(p);
    }
    if oracle {
        let opts = OracleOptions {
            tol: ctx.cfg.tol,
            threads: ctx.cfg.threads,
            solver: SolverConfig {
                scheme: Scheme::Jacobi,
                ..cfg
            },
        };
        res.oracle = oracle_min_support_with(&work, &opts)?;
    }

    // an oracle that finds nothing feasible disagrees with any solver claim
    let matched = oracle.then(|| res.oracle_agrees().unwrap_or(false));
    let record = json!({
        "command": "sparsest",
        "x_star": res.x_star,
        "support": one_based(&res.support),
        "l0": res.l0,
        "objective": res.objective,
        "relaxation_valid": res.relaxation_valid,
        "status": res.status,
        "iterations": res.iterations,
        "residual_inf": res.residual_inf,
        "tcp": tcp_json(&res.tcp),
        "permutation": res.permutation.as_deref().map(one_based),
        "oracle": res.oracle.as_ref().map(oracle_json),
        "oracle_match": matched,
    });
    let mut text = vec![
        format!("status: {}", variant_name(res.status)),
        format!("x*: {}", fmt_vec(&res.x_star)),
        format!("support: {}", fmt_idx(&res.support)),
        format!("l0: {}", res.l0),
        format!("objective: {}", format_value(res.objective)),
        format!("iterations: {}", res.iterations),
        format!("residual: {}", format_value(res.residual_inf)),
        tcp_text(&res.tcp),
    ];
    if let Some(p) = &res.permutation {
        text.push(format!("permutation: {:?}", one_based(p)));
    }
    if !res.relaxation_valid {
        text.push("relaxation_valid: false".into());
    }
    if oracle {
        text.push(match (&res.oracle, matched) {
            (Some(c), Some(true)) => format!("oracle: MATCH (l0={})", c.min_support_size),
            (Some(c), _) => format!(
                "oracle: MISMATCH (solver l0={}, oracle l0={})",
                res.l0, c.min_support_size
            ),
            (None, _) => "oracle: MISMATCH (oracle found no solution)".into(),
        });
        if let Some(c) = &res.oracle {
            text.push(format!("oracle support: {}", fmt_idx(&c.support)));
        }
    }
    ctx.emit(record, &text);

    if !res.relaxation_valid {
        let _ = writeln!(
            ctx.err,
            "solver stopped without converging: {}",
            variant_name(res.status)
        );
        return Ok(EXIT_FAILED);
    }
    if matched == Some(false) {
        let _ = writeln!(
            ctx.err,
            "oracle disagrees with the least-element support size"
        );
        return Ok(EXIT_FAILED);
    }
    Ok(EXIT_OK)
}

fn cmd_verify(ctx: &mut Ctx, tensor: &Path, rhs: &Path, solution: &Path) -> Result<i32, Fail> {
    let inst = load_instance(tensor, rhs)?;
    let x = load_vector(solution)?;
    if x.len() != inst.dim() {
        return Err(Fail::Usage(format!(
            "solution has length {}, instance has dimension {}",
            x.len(),
            inst.dim()
        )));
    }
    let tol = ctx.cfg.tol;
    let tcp = tcp_residual(&inst, &x)?;
    let eq = inst.equation_residual(&x)?;
    // only meaningful where the theory applies
    let equivalence = check_system_equivalence(&inst, &x, tol).ok();
    let passed = tcp.within(tol);
    let record = json!({
        "command": "verify",
        "passed": passed,
        "tol": tol,
        "tcp": tcp_json(&tcp),
        "equation_residual": eq,
        "support": one_based(&ztcp_core::support(&x, ctx.cfg.zero_threshold)),
        "system_equivalence": equivalence,
    });
    let mut text = vec![
        format!("verify: {}", if passed { "PASS" } else { "FAIL" }),
        tcp_text(&tcp),
        format!("equation residual: {}", format_value(eq)),
    ];
    if let Some(ok) = equivalence {
        text.push(format!("system equivalence: {ok}"));
    }
    ctx.emit(record, &text);
    if !passed {
        let _ = writeln!(ctx.err, "complementarity residual exceeds {tol:e}");
        return Ok(EXIT_FAILED);
    }
    Ok(EXIT_OK)
}

fn cmd_rho(ctx: &mut Ctx, path: &Path) -> Result<i32, Fail> {
    let b = load_tensor(path)?;
    if !b.is_nonnegative() {
        return Err(Fail::NotApplicable(Precondition::NegativeEntries));
    }
    let br = spectral_radius(&b, ctx.cfg.tol, ctx.cfg.max_iter)?;
    let record = json!({
        "command": "rho",
        "lo": br.lo,
        "hi": br.hi,
        "iterations": br.iterations,
        "converged": br.converged,
    });
    let text = vec![
        format!("rho in [{}, {}]", format_value(br.lo), format_value(br.hi)),
        format!("iterations: {}", br.iterations),
        format!("converged: {}", br.converged),
    ];
    ctx.emit(record, &text);
    if !br.converged {
        let _ = writeln!(ctx.err, "bracket width {:e} exceeds --tol", br.width());
        return Ok(EXIT_FAILED);
    }
    Ok(EXIT_OK)
}

fn cmd_permz(ctx: &mut Ctx, path: &Path) -> Result<i32, Fail> {
    let a = load_tensor(path)?;
    let perm = find_z_permutation(&a).ok_or(Fail::NotApplicable(Precondition::NoZPermutation))?;
    let record = json!({
        "command": "permz",
        "permutation": one_based(&perm),
    });
    ctx.emit(record, &[format!("permutation: {:?}", one_based(&perm))]);
    Ok(EXIT_OK)
}

fn cmd_gen(
    ctx: &mut Ctx,
    prefix: &Path,
    n: usize,
    m: usize,
    density: f64,
    margin: f64,
) -> Result<i32, Fail> {
    let params = GeneratorParams {
        n,
        m,
        density,
        margin,
        seed: ctx.cfg.seed,
    };
    let g = generate_instance(&params)?;
    let with_ext = |ext: &str| {
        let mut p = prefix.as_os_str().to_owned();
        p.push(ext);
        PathBuf::from(p)
    };
    for (path, body) in [
        (with_ext(".tsr"), serialize_tensor(g.instance.tensor())),
        (with_ext(".vec"), serialize_vector(g.instance.rhs())),
    ] {
        fs::write(&path, body).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
        let _ = writeln!(ctx.err, "wrote {}", path.display());
    }
    let record = json!({
        "command": "gen",
        "params": params,
        "s": g.s,
        "planted": g.planted,
        "redraws": g.redraws,
        "nnz": g.instance.tensor().nnz(),
    });
    let text = vec![
        format!(
            "n {n} m {m} density {density} margin {margin} seed {}",
            params.seed
        ),
        format!("s: {}", format_value(g.s)),
        format!("planted: {}", fmt_vec(&g.planted)),
    ];
    ctx.emit(record, &text);
    Ok(EXIT_OK)
}
