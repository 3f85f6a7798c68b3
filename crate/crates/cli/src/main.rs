//! `cstar-approx`: distances to subalgebras, certificates and property checks
//! from the command line.
//!
//! Exit codes: 0 success, 1 other failure (including a failed property check),
//! 2 parse error, 3 solver budget exceeded, 4 certification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cstar_approx::certificate::{self, Witness};
use cstar_approx::harness::{self, CheckReport};
use cstar_approx::io::{self, CertificateReport, DistReport, Problem};
use cstar_approx::linalg::CMatrix;
use cstar_approx::representation;
use cstar_approx::solver::{self, Method, SolverOptions, DEFAULT_TOL_OUTER};
use cstar_approx::{Element, Error};
use serde_json::json;

#[derive(Parser)]
#[command(name = "cstar-approx", version, about = "Best approximation in finite-dimensional C*-algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    InteriorPoint,
    BisectionDykstra,
    OracleGrid,
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Leibniz,
    Strong,
    SameNorm,
    Commutant,
}

#[derive(Subcommand)]
enum Command {
    /// Distance from an element to the subalgebra, with a best approximation.
    Dist {
        file: PathBuf,
        element: String,
        #[arg(long, default_value_t = DEFAULT_TOL_OUTER)]
        tol: f64,
        /// Certify the minimizer with pure states; exit 4 if that fails.
        #[arg(long)]
        certify: bool,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value = "interior-point")]
        method: MethodArg,
    },
    /// Seeded property check on the file's subalgebra.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        property: Property,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Witness state for a minimal Hermitian element, reduced to pure states.
    Witness {
        file: PathBuf,
        element: String,
        #[arg(long)]
        json: bool,
    },
    /// Commutator realization `L(A) = ½‖[U, π(A)]‖` from the GNS space of a witness.
    Gns {
        file: PathBuf,
        element: String,
        /// Print the Hermitian unitary `U`.
        #[arg(long)]
        emit_unitary: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in worked examples.
    Examples {
        #[arg(long)]
        json: bool,
    },
    /// Operator norm of an element.
    Norm { file: PathBuf, element: String },
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Parse(_) => 2,
        Error::BudgetExceeded { .. } => 3,
        Error::Certification(_) => 4,
        _ => 1,
    }
}

fn load(path: &PathBuf) -> Result<Problem, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    io::load_problem(&text)
}

fn matrix_json(m: &CMatrix) -> serde_json::Value {
    json!((0..m.nrows()).map(|p| (0..m.ncols()).map(|q| [m[(p, q)].re, m[(p, q)].im]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn format_element(x: &Element) -> String {
    let mut out = String::new();
    for (j, b) in x.blocks().iter().enumerate() {
        out.push_str(&format!("  block {j}:\n"));
        for p in 0..b.nrows() {
            let row: Vec<String> = (0..b.ncols())
                .map(|q| {
                    let z = b[(p, q)];
                    if z.im.abs() < 1e-12 { format!("{:>12.8}", z.re) } else { format!("{:>12.8}{:+.8}i", z.re, z.im) }
                })
                .collect();
            out.push_str(&format!("    [{}]\n", row.join(" ")));
        }
    }
    out
}

fn print_witness(w: &Witness) {
    for (k, p) in w.pure_states.iter().enumerate() {
        let v: Vec<String> = p.vector.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
        println!("  state {k}: block {}, sign {:+}, weight {:.9}, vector [{}]", p.block, w.signs[k], w.weights[k], v.join(", "));
    }
    for (name, value) in &w.residuals {
        println!("  residual {name}: {value:.3e}");
    }
}

fn cmd_dist(file: &PathBuf, name: &str, tol: f64, certify: bool, as_json: bool, method: MethodArg) -> Result<(), Error> {
    let problem = load(file)?;
    let a = problem.element(name)?;
    let method = match method {
        MethodArg::InteriorPoint => Method::InteriorPoint,
        MethodArg::BisectionDykstra => Method::BisectionDykstra,
        MethodArg::OracleGrid => Method::OracleGrid,
    };
    let opts = SolverOptions { tol_outer: tol, method, ..Default::default() };
    let result = if certify {
        solver::best_approximation_with(a, &problem.subalgebra, &opts)?
    } else {
        solver::quotient_seminorm_with(a, &problem.subalgebra, &opts)?
    };
    let report = DistReport {
        radius: result.radius,
        minimizer: io::element_to_literal(&result.minimizer),
        certificate: result.certificate.as_ref().map(CertificateReport::from_witness),
        iterations: result.iterations,
    };
    if as_json {
        println!("{}", report.to_json());
    } else {
        println!("radius: {:.12}", result.radius);
        println!("bracket: [{:.12}, {:.12}]", result.lower_bound, result.radius);
        println!("iterations: {}", result.iterations);
        println!("minimizer:\n{}", format_element(&result.minimizer).trim_end());
        if let Some(w) = &result.certificate {
            println!("certificate ({} pure states):", w.len());
            print_witness(w);
        }
    }
    // Nothing to certify when the element already lies in the subalgebra.
    if certify && result.certificate.is_none() && result.radius > tol {
        return Err(Error::Certification("no pure-state certificate found for the minimizer".into()));
    }
    Ok(())
}

fn print_report(r: &CheckReport, as_json: bool) {
    if as_json {
        println!("{}", serde_json::to_string_pretty(r).expect("report serializes"));
    } else {
        println!("{}", r.summary());
        for c in &r.subchecks {
            println!("  {}: {:.6e} ({}) {}", c.name, c.value, c.requirement, if c.pass { "ok" } else { "FAILED" });
        }
        for d in &r.details {
            println!("  {d}");
        }
    }
}

fn cmd_check(file: &PathBuf, property: Property, trials: usize, seed: u64, as_json: bool) -> Result<bool, Error> {
    let problem = load(file)?;
    let s = &problem.subalgebra;
    let report = match property {
        Property::Leibniz => harness::check_leibniz(s, trials, seed)?,
        Property::Strong => harness::check_strong_leibniz(s, trials, seed)?,
        Property::SameNorm => harness::check_same_norm(s, trials, seed)?,
        Property::Commutant => harness::check_commutant_corollaries(seed)?,
    };
    print_report(&report, as_json);
    Ok(report.pass)
}

fn hermitian_element<'p>(problem: &'p Problem, name: &str) -> Result<&'p Element, Error> {
    let z = problem.element(name)?;
    if !z.is_hermitian(1e-9 * (1.0 + z.norm())) {
        return Err(Error::Precondition(format!("element {name:?} must be Hermitian")));
    }
    Ok(z)
}

fn cmd_witness(file: &PathBuf, name: &str, as_json: bool) -> Result<(), Error> {
    let problem = load(file)?;
    let z = hermitian_element(&problem, name)?;
    let s = &problem.subalgebra;
    let phi = certificate::find_witness(z, s).map_err(|e| Error::Certification(e.to_string()))?;
    let check = certificate::verify_witness(z, &phi, s, certificate::DEFAULT_CERT_TOL)?;
    if !check.valid {
        return Err(Error::Certification(format!("witness does not verify: {:?}", check.residuals)));
    }
    let w = certificate::certify_minimal(z, s)?;
    let uniqueness = certificate::uniqueness_check(z, &phi, s)?;
    if as_json {
        let out = json!({
            "norm": z.norm(),
            "density": phi.blocks().iter().map(matrix_json).collect::<Vec<_>>(),
            "residuals": check.residuals,
            "certificate": CertificateReport::from_witness(&w),
            "uniqueness": uniqueness.verdict,
            "faithfulness_min_eig": uniqueness.min_eig,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("finite values"));
    } else {
        println!("element {name:?} is minimal: norm {:.12} is attained by a witness state", z.norm());
        for (k, v) in &check.residuals {
            println!("  density residual {k}: {v:.3e}");
        }
        println!("pure-state form ({} states, at most {} needed):", w.len(), s.real_herm_dim() + 1);
        print_witness(&w);
        println!("uniqueness of 0 as best approximation: {:?} (min Gram eigenvalue {:.3e})", uniqueness.verdict, uniqueness.min_eig);
    }
    Ok(())
}

fn cmd_gns(file: &PathBuf, name: &str, emit_unitary: bool, as_json: bool) -> Result<(), Error> {
    let problem = load(file)?;
    let a = hermitian_element(&problem, name)?;
    let s = &problem.subalgebra;
    let best = solver::quotient_seminorm(a, s, DEFAULT_TOL_OUTER)?;
    let z = a - &best.minimizer;
    let phi = certificate::find_witness(&z, s).map_err(|e| Error::Certification(e.to_string()))?;
    let cs = representation::commutator_unitary(&z, s, &phi).map_err(|e| Error::Certification(e.to_string()))?;
    let value = cs.eval(a);
    if as_json {
        let mut out = json!({
            "dimension": cs.rep.dim(),
            "seminorm": best.radius,
            "commutator_seminorm": value,
            "unitary_defect": cs.unitary_defect(),
            "commutation_defect": cs.commutation_defect(s),
        });
        if emit_unitary {
            out["unitary"] = matrix_json(&cs.u);
        }
        println!("{}", serde_json::to_string_pretty(&out).expect("finite values"));
    } else {
        println!("GNS dimension: {}", cs.rep.dim());
        println!("L({name}) = {:.12}", best.radius);
        println!("(1/2)||[U, pi({name})]|| = {value:.12}");
        println!("||U - U*||, ||U^2 - 1|| <= {:.3e}", cs.unitary_defect());
        println!("max ||[U, pi(b)]|| = {:.3e}", cs.commutation_defect(s));
        if emit_unitary {
            let u = Element::new(vec![cs.u.clone()])?;
            println!("U:\n{}", format_element(&u).trim_end());
        }
    }
    Ok(())
}

fn cmd_examples(as_json: bool) -> Result<bool, Error> {
    let reports = harness::run_worked_examples()?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&reports).expect("reports serialize"));
    } else {
        for r in &reports {
            print_report(r, false);
        }
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Dist { file, element, tol, certify, json, method } => {
            cmd_dist(&file, &element, tol, certify, json, method).map(|_| true)
        }
        Command::Check { file, property, trials, seed, json } => cmd_check(&file, property, trials, seed, json),
        Command::Witness { file, element, json } => cmd_witness(&file, &element, json).map(|_| true),
        Command::Gns { file, element, emit_unitary, json } => cmd_gns(&file, &element, emit_unitary, json).map(|_| true),
        Command::Examples { json } => cmd_examples(json),
        Command::Norm { file, element } => {
            let problem = load(&file)?;
            println!("{:.12}", problem.element(&element)?.norm());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
