//! `weakschmidt` command-line front end.
//!
//! Every analysis prints one JSON envelope `{command, config, result,
//! residuals}` on stdout. Exit status is 0 whenever the analysis ran (the
//! verdict lives in the JSON), 2 for unreadable or invalid input and 3 for
//! a numerical failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use weakschmidt::bell::{decompose, max_entanglement_residual, weyl_basis, BellBasis};
use weakschmidt::hadamard::{equivalent, family_n4, fourier, Equivalence, HadamardCandidate};
use weakschmidt::io::{self, StateInput};
use weakschmidt::schmidt_correlated::{
    detect, is_separable_sc, phase_separability, random_schmidt_correlated,
    random_separable_schmidt_correlated, DiagonalEnsemble,
};
use weakschmidt::states::{is_ppt, mix, schmidt_decompose, spectral_ensemble};
use weakschmidt::weak_svd::{check_strong, check_weak, check_weak_alt, diagonalize, residual, weak_defect};
use weakschmidt::{ComplexMatrix, DensityMatrix, Ensemble, Error, Tolerance};

#[derive(Parser)]
#[command(name = "weakschmidt", version, about = "Schmidt-correlated states, weak SVD and complex Hadamard tools")]
struct Cli {
    /// Numerical tolerance for all tests.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for the ChaCha8 generator behind every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Pretty,
}

impl Output {
    fn name(self) -> &'static str {
        match self {
            Output::Json => "json",
            Output::Pretty => "pretty",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Schmidt decomposition of a pure state.
    Schmidt { file: PathBuf },
    /// Decide whether a density matrix (or ensemble) is Schmidt-correlated.
    Detect { file: PathBuf },
    /// Separability verdict with every applicable criterion.
    Separable { file: PathBuf },
    /// Weak SVD of the matrix representations of an ensemble.
    WeakSvd { file: PathBuf },
    /// Complex Hadamard matrices: checks, constructions, equivalence.
    #[command(subcommand)]
    Hadamard(HadamardCommand),
    /// Generalized Bell bases built from Hadamard matrices.
    #[command(subcommand)]
    Bell(BellCommand),
    /// Print a random Schmidt-correlated density matrix in the input format.
    RandomSc {
        n: usize,
        rank: usize,
        /// Use a diagonal coherence matrix, giving a separable state.
        #[arg(long)]
        separable: bool,
    },
}

#[derive(Subcommand)]
enum HadamardCommand {
    /// Check that a matrix is complex Hadamard.
    Verify { file: PathBuf },
    /// Fourier matrix of order n.
    Fourier {
        n: usize,
        /// Print phase angles instead of complex entries.
        #[arg(long)]
        angles: bool,
    },
    /// One-parameter family of order 4.
    FamilyN4 {
        #[arg(allow_negative_numbers = true)]
        a: f64,
        /// Print phase angles instead of complex entries.
        #[arg(long)]
        angles: bool,
    },
    /// Search for a diagonal-and-permutation equivalence between two matrices.
    Equiv { first: PathBuf, second: PathBuf },
}

#[derive(Subcommand)]
enum BellCommand {
    /// Bell basis from a list of n Hadamard matrices of order n.
    Gen { file: PathBuf },
    /// Bell basis from n copies of the Fourier matrix.
    Weyl { n: usize },
    /// Coefficients of a density matrix in a Bell basis.
    Decompose { rho: PathBuf, basis: PathBuf },
}

enum Failure {
    Input(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome = Result<(Value, Value), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match Tolerance::new(cli.tol) {
        Ok(t) => t,
        Err(e) => return fail(Failure::from(e)),
    };
    let pretty = cli.output == Output::Pretty;
    if let Command::RandomSc { n, rank, separable } = cli.command {
        return match random_state(n, rank, separable, cli.seed) {
            Ok(v) => {
                emit(&io::to_json_string(&v, pretty))
            }
            Err(f) => fail(f),
        };
    }
    let (name, outcome) = run(&cli.command, &tol, cli.seed);
    match outcome {
        Ok((result, residuals)) => {
            let envelope = json!({
                "command": name,
                "config": {"tol": cli.tol, "seed": cli.seed, "output": cli.output.name()},
                "result": result,
                "residuals": residuals,
            });
            emit(&io::to_json_string(&envelope, pretty))
        }
        Err(f) => fail(f),
    }
}

fn emit(text: &str) -> ExitCode {
    // a closed pipe (e.g. `| head`) is not an error worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::SUCCESS
}

fn fail(f: Failure) -> ExitCode {
    match f {
        Failure::Input(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Failure::Numeric(msg) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: &Command, tol: &Tolerance, seed: u64) -> (&'static str, Outcome) {
    match cmd {
        Command::Schmidt { file } => ("schmidt", cmd_schmidt(file, tol)),
        Command::Detect { file } => ("detect", cmd_detect(file, tol)),
        Command::Separable { file } => ("separable", cmd_separable(file, tol)),
        Command::WeakSvd { file } => ("weak-svd", cmd_weak_svd(file, tol, seed)),
        Command::Hadamard(h) => match h {
            HadamardCommand::Verify { file } => ("hadamard verify", cmd_hadamard_verify(file, tol)),
            HadamardCommand::Fourier { n, angles } => ("hadamard fourier", hadamard_report(*n, || Ok(fourier(*n)), *angles, tol)),
            HadamardCommand::FamilyN4 { a, angles } => ("hadamard family-n4", hadamard_report(4, || Ok(family_n4(*a)), *angles, tol)),
            HadamardCommand::Equiv { first, second } => ("hadamard equiv", cmd_hadamard_equiv(first, second, tol)),
        },
        Command::Bell(b) => match b {
            BellCommand::Gen { file } => ("bell gen", read(file).and_then(|t| Ok(io::parse_bell_basis(&t, tol)?)).map(|b| bell_report(&b))),
            BellCommand::Weyl { n } => ("bell weyl", weyl(*n).map(|b| bell_report(&b))),
            BellCommand::Decompose { rho, basis } => ("bell decompose", cmd_bell_decompose(rho, basis, tol)),
        },
        Command::RandomSc { .. } => unreachable!("handled before dispatch"),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_rho(path: &Path, tol: &Tolerance) -> Result<(DensityMatrix, Option<Ensemble>), Failure> {
    Ok(match io::parse_state_input(&read(path)?, tol)? {
        StateInput::Density(rho) => (rho, None),
        StateInput::Ensemble(ens) => (mix(&ens), Some(ens)),
    })
}

fn cmd_schmidt(file: &Path, tol: &Tolerance) -> Outcome {
    let psi = io::parse_pure_state(&read(file)?)?;
    let form = schmidt_decompose(&psi, tol)?;
    let recon = form.reconstruct();
    let err: f64 = recon.iter().zip(psi.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let result = json!({
        "lambda": form.coefficients,
        "rank": form.rank(tol.eps),
        "basis_a": io::matrix_json(&form.basis_a),
        "basis_b": io::matrix_json(&form.basis_b),
    });
    Ok((result, json!({"reconstruction": err})))
}

fn cmd_detect(file: &Path, tol: &Tolerance) -> Outcome {
    let (rho, _) = read_rho(file, tol)?;
    let defect = weak_defect(&spectral_ensemble(&rho, tol)?.matrix_reps())?;
    match detect(&rho, tol)? {
        Some(form) => Ok((
            json!({
                "schmidt_correlated": true,
                "U": io::matrix_json(&form.u),
                "V": io::matrix_json(&form.v),
                "C": io::matrix_json(&form.c),
            }),
            json!({
                "weak_defect": defect,
                "reconstruction": form.residual(&rho),
                "uncorrelated_mass": form.uncorrelated_mass(&rho),
            }),
        )),
        None => Ok((
            json!({"schmidt_correlated": false, "U": null, "V": null, "C": null}),
            json!({"weak_defect": defect}),
        )),
    }
}

fn cmd_separable(file: &Path, tol: &Tolerance) -> Outcome {
    let (rho, given) = read_rho(file, tol)?;
    let ppt = is_ppt(&rho, tol)?;
    let spectral = spectral_ensemble(&rho, tol)?;
    let defect = weak_defect(&spectral.matrix_reps())?;
    let Some(form) = detect(&rho, tol)? else {
        // PPT is necessary for separability but not sufficient in general
        let separable = if ppt.ppt { Value::Null } else { json!(false) };
        return Ok((
            json!({
                "schmidt_correlated": false,
                "separable": separable,
                "witness": null,
                "necessary_condition_only": true,
                "criteria": {"ppt": ppt.ppt},
            }),
            json!({"weak_defect": defect, "ppt_min_eigenvalue": ppt.min_eigenvalue}),
        ));
    };
    let sc = is_separable_sc(&form, tol);
    let ens = given.unwrap_or(spectral);
    let diag = DiagonalEnsemble::extract(&ens, &form.u, &form.v)?;
    let orthogonal = diag.is_orthogonal(tol);
    let phase = phase_separability(&diag, tol);
    let mut agree = sc.separable == ppt.ppt && sc.separable == orthogonal;
    if let Some(v) = phase.separable {
        agree &= v == sc.separable;
    }
    let witness = sc.witness.map(|w| {
        json!({"j": w.j + 1, "l": w.l + 1, "coherence": w.coherence, "minor": w.minor})
    });
    let phase_json = json!({
        "applicable": phase.applicable,
        "separable": phase.separable,
        "reason": phase.reason,
        "phase_matrix": phase.decomposition.as_ref().map(|d| io::matrix_json(&d.phases)),
    });
    Ok((
        json!({
            "schmidt_correlated": true,
            "separable": sc.separable,
            "witness": witness,
            "necessary_condition_only": false,
            "criteria": {
                "coherence": sc.separable,
                "ppt": ppt.ppt,
                "orthogonality": orthogonal,
                "phase": phase_json,
            },
            "agree": agree,
        }),
        json!({
            "weak_defect": defect,
            "reconstruction": form.residual(&rho),
            "max_coherence": sc.max_coherence,
            "ppt_min_eigenvalue": ppt.min_eigenvalue,
        }),
    ))
}

fn cmd_weak_svd(file: &Path, tol: &Tolerance, seed: u64) -> Outcome {
    let ens = io::parse_ensemble(&read(file)?)?;
    let mats = ens.matrix_reps();
    let strong = check_strong(&mats, tol)?;
    let weak = check_weak(&mats, tol)?;
    let alt = check_weak_alt(&mats, tol)?;
    let defect = weak_defect(&mats)?;
    if !weak {
        return Ok((
            json!({"strong": strong, "weak": false, "weak_alt": alt, "U": null, "V": null, "alpha": null}),
            json!({"weak_defect": defect}),
        ));
    }
    let w = diagonalize(&mats, tol, seed)?;
    Ok((
        json!({
            "strong": strong,
            "weak": true,
            "weak_alt": alt,
            "U": io::matrix_json(&w.u),
            "V": io::matrix_json(&w.v),
            "alpha": io::matrix_json(&w.alpha_table()),
        }),
        json!({"weak_defect": defect, "off_diagonal": residual(&mats, &w)?}),
    ))
}

fn hadamard_residuals(h: &HadamardCandidate) -> Value {
    let n = h.order();
    let m = h.matrix();
    let unimodular = m.as_slice().iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let gram = (&(m * &m.adjoint()) - &ComplexMatrix::identity(n).scale_real(n as f64)).frobenius_norm();
    json!({"unimodularity": unimodular, "gram": gram})
}

fn hadamard_report(
    n: usize,
    build: impl FnOnce() -> Result<HadamardCandidate, Failure>,
    angles: bool,
    tol: &Tolerance,
) -> Outcome {
    if n == 0 {
        return Err(Failure::Input("order must be at least 1".into()));
    }
    let h = build()?;
    let mut result = if angles { io::hadamard_angles_json(&h) } else { io::hadamard_json(&h) };
    result["hadamard"] = json!(h.is_hadamard(tol));
    Ok((result, hadamard_residuals(&h)))
}

fn cmd_hadamard_verify(file: &Path, tol: &Tolerance) -> Outcome {
    let h = io::parse_hadamard(&read(file)?)?;
    Ok((json!({"n": h.order(), "hadamard": h.is_hadamard(tol)}), hadamard_residuals(&h)))
}

fn cmd_hadamard_equiv(first: &Path, second: &Path, tol: &Tolerance) -> Outcome {
    let h1 = io::parse_hadamard(&read(first)?)?;
    let h2 = io::parse_hadamard(&read(second)?)?;
    Ok(match equivalent(&h1, &h2, tol)? {
        Equivalence::Yes(w) => (
            json!({
                "equivalent": "yes",
                "witness": {
                    "D1": io::vector_json(&w.d1),
                    "D2": io::vector_json(&w.d2),
                    "row_perm": w.row_perm,
                    "col_perm": w.col_perm,
                },
            }),
            json!({"witness": w.residual(h1.matrix(), h2.matrix())}),
        ),
        Equivalence::No => (json!({"equivalent": "no", "witness": null}), json!({})),
        Equivalence::Unknown => (json!({"equivalent": "unknown", "witness": null}), json!({})),
    })
}

fn weyl(n: usize) -> Result<BellBasis, Failure> {
    if n == 0 {
        return Err(Failure::Input("order must be at least 1".into()));
    }
    Ok(weyl_basis(n))
}

fn bell_report(b: &BellBasis) -> (Value, Value) {
    let n = b.dim();
    let states: Vec<Value> = (0..n)
        .flat_map(|s| (0..n).map(move |l| (s, l)))
        .map(|(s, l)| json!({"s": s + 1, "l": l + 1, "vec": io::vector_json(b.state(s, l).amplitudes())}))
        .collect();
    let entangled = b.states().iter().map(max_entanglement_residual).fold(0.0, f64::max);
    let result = json!({"n": n, "hadamards": io::bell_basis_json(b)["hadamards"].clone(), "states": states});
    (result, json!({"gram": b.gram_residual(), "max_entanglement": entangled}))
}

fn cmd_bell_decompose(rho_file: &Path, basis_file: &Path, tol: &Tolerance) -> Outcome {
    let (rho, _) = read_rho(rho_file, tol)?;
    let basis = io::parse_bell_basis(&read(basis_file)?, tol)?;
    let d = decompose(&rho, &basis)?;
    let table: Vec<Value> = d
        .table(tol.eps)
        .into_iter()
        .map(|c| json!({"l": c.l + 1, "k": c.k + 1, "m": c.m + 1, "j": c.j + 1, "value": io::complex_json(c.value)}))
        .collect();
    let recon = (&d.reconstruct(&basis) - rho.matrix()).frobenius_norm();
    Ok((json!({"n": d.dim(), "coefficients": table}), json!({"reconstruction": recon})))
}

fn random_state(n: usize, rank: usize, separable: bool, seed: u64) -> Result<Value, Failure> {
    let (rho, _) = if separable {
        random_separable_schmidt_correlated(n, rank, seed)?
    } else {
        random_schmidt_correlated(n, rank, seed)?
    };
    Ok(io::density_json(&rho))
}
