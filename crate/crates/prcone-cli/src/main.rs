//! Command-line front end: JSON matrix I/O, single-shot relation checks,
//! LFT application and witness push-forwards, grid-level function checks,
//! seeded verification suites, and the worked counterexample.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use prcone::cara::{self, CaraFunction, DiscGrid, PsiBlock};
use prcone::json::{
    CaraFunctionJson, EquivWitnessJson, GridJson, MatrixJson, PrecWitnessJson,
};
use prcone::lft;
use prcone::linalg::CMatrix;
use prcone::pr::{self, PRMatrix};
use prcone::verify::{self, Suite, VerifyConfig};
use prcone::{C64, Error};

const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INVALID_W: u8 = 3;
const EXIT_DOMAIN: u8 = 4;

#[derive(Parser)]
#[command(
    name = "prcone",
    about = "Pre-order and equivalence checks on positive real matrices, \
             J-contractive linear fractional maps, and Caratheodory functions",
    version
)]
struct Cli {
    /// Tolerance for all residual and margin tests.
    #[arg(long, global = true, env = "PRCONE_TOL", default_value_t = 1e-9)]
    tol: f64,

    /// Write the JSON result to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check A ≺ B and emit the witness.
    CheckPrec {
        path_a: PathBuf,
        path_b: PathBuf,
    },
    /// Check A ~ B and emit the two-sided witness.
    CheckEquiv {
        path_a: PathBuf,
        path_b: PathBuf,
    },
    /// Linear fractional transformations by a J-contractive block matrix.
    #[command(subcommand)]
    Lft(LftCommand),
    /// Grid-level checks for Caratheodory functions.
    #[command(subcommand)]
    Cara(CaraCommand),
    /// Run seeded verification suites.
    Verify {
        /// One of: preorder, equivalence, lft_prec, lft_equiv, cara,
        /// example41, all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Reproduce a named result.
    #[command(subcommand)]
    Repro(ReproCommand),
}

#[derive(Subcommand)]
enum LftCommand {
    /// Apply T_W to A.
    Apply {
        path_w: PathBuf,
        path_a: PathBuf,
    },
    /// Push the witness of A ≺ B (and A ~ B when it holds) through T_W.
    Witness {
        path_w: PathBuf,
        path_a: PathBuf,
        path_b: PathBuf,
    },
}

#[derive(Args)]
struct GridArgs {
    /// Explicit grid radii, comma separated, strictly increasing in (0,1).
    #[arg(long, value_delimiter = ',')]
    grid_radii: Option<Vec<f64>>,
    /// Angular samples per ring.
    #[arg(long, default_value_t = 16)]
    grid_angles: usize,
}

impl GridArgs {
    fn build(&self) -> Result<DiscGrid, Error> {
        match &self.grid_radii {
            Some(r) => DiscGrid::new(r.clone(), self.grid_angles),
            None => DiscGrid::standard(6, self.grid_angles, 1e-2),
        }
    }
}

#[derive(Subcommand)]
enum CaraCommand {
    /// Check F ≺_C G over the grid.
    CheckPrec {
        path_f: PathBuf,
        path_g: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Check F ~_C G over the grid.
    CheckEquiv {
        path_f: PathBuf,
        path_g: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Apply T_Psi to F and sample the image on the grid. The symbol is a
    /// constant 2n x 2n J-contractive matrix, or the built-in scalar
    /// Mobius symbol when omitted.
    Tpsi {
        path_f: PathBuf,
        /// JSON matrix file with the constant symbol.
        #[arg(long)]
        psi_w: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Radial boundary probe along a unimodular direction.
    Probe {
        path_f: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        beta_re: f64,
        #[arg(long, default_value_t = 0.0)]
        beta_im: f64,
        /// Radial offsets 1 - |lambda|, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.1,0.01,0.001")]
        deltas: Vec<f64>,
    },
}

#[derive(Subcommand)]
enum ReproCommand {
    /// The scalar Mobius counterexample report.
    #[command(name = "example-4-1", alias = "example41")]
    Example41,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NotComparable { .. }
        | Error::NotEquivalent { .. }
        | Error::NotPositiveReal { .. }
        | Error::NotCaratheodory { .. }
        | Error::NotPsd { .. }
        | Error::InvalidWitness { .. }
        | Error::ReprMismatch { .. } => EXIT_VIOLATION,
        Error::NotJContractive { .. } | Error::WNotInvertible { .. } => EXIT_INVALID_W,
        Error::OutOfDomain { .. } | Error::OutsideDisc { .. } => EXIT_DOMAIN,
        _ => EXIT_INPUT,
    }
}

fn read_matrix(path: &Path) -> Result<CMatrix, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    let j: MatrixJson = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    j.to_matrix()
}

fn read_pr(path: &Path, tol: f64) -> Result<PRMatrix, Error> {
    pr::make_pr(&read_matrix(path)?, tol)
}

fn read_function(path: &Path, tol: f64) -> Result<CaraFunction, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    let j: CaraFunctionJson = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    j.to_function(tol)
}

fn emit(out: &Option<PathBuf>, value: &impl Serialize) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidArgument(format!("serialization: {e}")))?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let tol = cli.tol;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    match &cli.command {
        Command::CheckPrec { path_a, path_b } => {
            let a = read_pr(path_a, tol)?;
            let b = read_pr(path_b, tol)?;
            let w = pr::prec_check(&a, &b, tol)?;
            emit(
                &cli.json_out,
                &json!({
                    "relation": "prec",
                    "holds": true,
                    "witness": PrecWitnessJson::from_witness(&w),
                }),
            )?;
            Ok(0)
        }
        Command::CheckEquiv { path_a, path_b } => {
            let a = read_pr(path_a, tol)?;
            let b = read_pr(path_b, tol)?;
            let w = pr::equiv_check(&a, &b, tol)?;
            emit(
                &cli.json_out,
                &json!({
                    "relation": "equiv",
                    "holds": true,
                    "witness": EquivWitnessJson::from_witness(&w),
                }),
            )?;
            Ok(0)
        }
        Command::Lft(sub) => run_lft(cli, sub, tol),
        Command::Cara(sub) => run_cara(cli, sub, tol),
        Command::Verify {
            suite,
            trials,
            dim,
            seed,
        } => {
            let config = VerifyConfig {
                suite: suite.parse::<Suite>()?,
                trials: *trials,
                dim: *dim,
                seed: *seed,
                tol,
            };
            let report = verify::run(&config)?;
            let passed = report.passed();
            emit(&cli.json_out, &report)?;
            Ok(if passed { 0 } else { EXIT_VIOLATION })
        }
        Command::Repro(ReproCommand::Example41) => {
            let rep = cara::example_4_1(&[0.5, 1e-1, 1e-2, 1e-3], tol)?;
            let passed = rep.all_pass();
            emit(
                &cli.json_out,
                &json!({
                    "example": "4.1",
                    "j_margin_min": rep.j_margin_min,
                    "j2_literal_defect_min": rep.j2_literal_defect_min,
                    "t_one_sup_dev": rep.t_one_sup_dev,
                    "mobius_rel_devs": rep.mobius_rel_devs,
                    "re_formula_dev": rep.re_formula_dev,
                    "sup_q_ladder": rep.sup_q_ladder,
                    "det_max_dev": rep.det_max_dev,
                    "clauses": {
                        "a_j_contractive": rep.pass_a,
                        "b_fixed_one": rep.pass_b,
                        "c_mobius_values": rep.pass_c,
                        "d_re_formula": rep.pass_d,
                        "e_divergence": rep.pass_e,
                    },
                    "pass": passed,
                }),
            )?;
            Ok(if passed { 0 } else { EXIT_VIOLATION })
        }
    }
}

fn run_lft(cli: &Cli, sub: &LftCommand, tol: f64) -> Result<u8, Error> {
    match sub {
        LftCommand::Apply { path_w, path_a } => {
            let w = lft::validate_w(&read_matrix(path_w)?, tol)?;
            let a = read_pr(path_a, tol)?;
            let t = lft::apply(&w, &a, tol)?;
            emit(
                &cli.json_out,
                &json!({
                    "image": MatrixJson::from_matrix(&t.value),
                    "contractivity_margin": w.contractivity_margin,
                    "w_invertible": w.invertible,
                    "pr_margin": t.pr_margin,
                }),
            )?;
            Ok(0)
        }
        LftCommand::Witness {
            path_w,
            path_a,
            path_b,
        } => {
            let w = lft::validate_w(&read_matrix(path_w)?, tol)?;
            let a = read_pr(path_a, tol)?;
            let b = read_pr(path_b, tol)?;
            let fw = pr::prec_check(&a, &b, tol)?;
            let pushed = lft::prec_push(&w, &a, &b, &fw.x, tol)?;
            // oracle cross-check: recover the witness from the images
            let rec = pr::prec_check(&pushed.image_a, &pushed.image_b, tol)?;
            let dev = prcone::linalg::opnorm(&(rec.x_ambient() - &pushed.witness_ambient));
            let cross_ok = dev <= prcone::linalg::scaled_tol(
                tol * 10.0,
                1.0 + prcone::linalg::opnorm(&pushed.witness_ambient),
            );
            let equiv_part = pr::equiv_check(&a, &b, tol).ok().map(|ew| {
                lft::equiv_push(&w, &a, &b, &ew.xt, tol).map(|p| {
                    json!({
                        "xt_w": MatrixJson::from_matrix(&p.witness),
                        "norm_in": prcone::linalg::opnorm(&ew.xt),
                        "norm_out": prcone::linalg::opnorm(&p.witness),
                    })
                })
            });
            let equiv_json = match equiv_part {
                Some(Ok(v)) => v,
                Some(Err(e)) => return Err(e),
                None => serde_json::Value::Null,
            };
            emit(
                &cli.json_out,
                &json!({
                    "image_a": MatrixJson::from_matrix(&pushed.image_a.value),
                    "image_b": MatrixJson::from_matrix(&pushed.image_b.value),
                    "x_w": MatrixJson::from_matrix(&pushed.witness),
                    "residual": pushed.residual,
                    "cross_check_deviation": dev,
                    "cross_check_ok": cross_ok,
                    "equiv_push": equiv_json,
                }),
            )?;
            Ok(if cross_ok { 0 } else { EXIT_VIOLATION })
        }
    }
}

fn run_cara(cli: &Cli, sub: &CaraCommand, tol: f64) -> Result<u8, Error> {
    match sub {
        CaraCommand::CheckPrec {
            path_f,
            path_g,
            grid,
        } => {
            let f = read_function(path_f, tol)?;
            let g = read_function(path_g, tol)?;
            let grid = grid.build()?;
            let rep = cara::prec_c_check(&f, &g, &grid, tol)?;
            emit(
                &cli.json_out,
                &json!({
                    "relation": "prec_c",
                    "holds_on_grid": true,
                    "estimate": true,
                    "sup_q": rep.sup_q_estimate,
                    "delta_min": rep.delta_min,
                    "grid": GridJson::from_grid(&grid),
                    "q_norms": rep.q_norms.iter()
                        .map(|(l, n)| json!({"point": [l.re, l.im], "norm": n}))
                        .collect::<Vec<_>>(),
                }),
            )?;
            Ok(0)
        }
        CaraCommand::CheckEquiv {
            path_f,
            path_g,
            grid,
        } => {
            let f = read_function(path_f, tol)?;
            let g = read_function(path_g, tol)?;
            let grid = grid.build()?;
            let rep = cara::equiv_c_check(&f, &g, &grid, tol)?;
            emit(
                &cli.json_out,
                &json!({
                    "relation": "equiv_c",
                    "holds_on_grid": true,
                    "estimate": true,
                    "sup_qt": rep.sup_qt_estimate,
                    "sup_rt": rep.sup_rt_estimate,
                    "support_rank": rep.support_rank,
                    "delta_min": rep.delta_min,
                    "continuity_ok": rep.continuity_ok,
                    "max_increment_ratio": rep.max_increment_ratio,
                    "grid": GridJson::from_grid(&grid),
                }),
            )?;
            Ok(0)
        }
        CaraCommand::Tpsi {
            path_f,
            psi_w,
            grid,
        } => {
            let f = read_function(path_f, tol)?;
            let grid = grid.build()?;
            let mut psi = match psi_w {
                Some(path) => {
                    let w = lft::validate_w(&read_matrix(path)?, tol)?;
                    PsiBlock::from_constant_w(&w)?
                }
                None => PsiBlock::example_4_1(),
            };
            psi.validate(&grid, tol)?;
            let tf = cara::t_psi_apply(&psi, &f, &grid, tol)?;
            let samples = grid
                .points()
                .iter()
                .map(|&l| {
                    let v = tf.eval(l, tol)?;
                    Ok(json!({
                        "point": [l.re, l.im],
                        "value": MatrixJson::from_matrix(&v.value),
                    }))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            emit(
                &cli.json_out,
                &json!({
                    "jcontr_margin_on_grid": psi.jcontr_margin_on_grid,
                    "det_not_identically_zero": psi.det_not_identically_zero,
                    "singular_points": psi.singular_points.iter()
                        .map(|l| [l.re, l.im]).collect::<Vec<_>>(),
                    "samples": samples,
                }),
            )?;
            Ok(0)
        }
        CaraCommand::Probe {
            path_f,
            beta_re,
            beta_im,
            deltas,
        } => {
            let f = read_function(path_f, tol)?;
            let u = CMatrix::from_element(f.dim, 1, C64::new(1.0, 0.0));
            let p = cara::radial_limit_probe(&f, &u, C64::new(*beta_re, *beta_im), deltas, tol)?;
            emit(
                &cli.json_out,
                &json!({
                    "beta": [beta_re, beta_im],
                    "samples": p.samples.iter()
                        .map(|(d, v)| json!({"delta": d, "norm": v}))
                        .collect::<Vec<_>>(),
                    "decays": p.decays,
                }),
            )?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let payload = json!({
                "error": err.to_string(),
                "exit_code": exit_code_for(&err),
            });
            eprintln!("{}", serde_json::to_string_pretty(&payload).unwrap());
            ExitCode::from(exit_code_for(&err))
        }
    }
}
