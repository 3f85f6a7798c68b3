//! Seeded property checks of the quotient seminorm and regression runs of the
//! worked examples.
//!
//! Violations are additive: `lhs − rhs` of the inequality under test, positive
//! when it fails. Trials run sequentially in index order, each on its own
//! random stream, so a report is reproducible from its seed.

use serde::{Deserialize, Serialize};

use crate::algebra::{BlockAlgebra, Element};
use crate::certificate::{self, Uniqueness};
use crate::error::{Error, Result};
use crate::exact;
use crate::fixtures::{Badnear, Exercise, NonUnique};
use crate::random::{self, trial_rng};
use crate::solver::{self, OracleOptions, DEFAULT_TOL_OUTER};
use crate::subalgebra::{self, Subalgebra, SubalgebraKind};

/// Tolerance for the sampled inequalities.
pub const PROPERTY_TOL: f64 = 1e-5;
/// Bound on `L(1)`.
pub const UNIT_TOL: f64 = 1e-9;
/// Smallest singular value of invertible draws.
pub const MIN_SINGULAR_VALUE: f64 = 0.1;

/// One named requirement inside a report.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SubCheck {
    pub name: String,
    pub value: f64,
    /// Human-readable requirement on `value`, such as `"<= 1e-5"`.
    pub requirement: String,
    pub pass: bool,
}

impl SubCheck {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        SubCheck { name: name.into(), value, requirement: format!("<= {bound:e}"), pass: value <= bound }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        SubCheck { name: name.into(), value, requirement: format!(">= {bound:e}"), pass: value >= bound }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        SubCheck { name: name.into(), value: if ok { 1.0 } else { 0.0 }, requirement: "true".into(), pass: ok }
    }
}

/// Outcome of a property check. `worst_violation` is the largest sampled
/// violation of the main inequality; `pass` also requires every sub-check.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub trials: usize,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: Option<u64>,
    pub subchecks: Vec<SubCheck>,
    pub details: Vec<String>,
}

impl CheckReport {
    fn new(name: String, seed: Option<u64>, tolerance: f64) -> Self {
        CheckReport {
            name,
            trials: 0,
            worst_violation: f64::NEG_INFINITY,
            tolerance,
            pass: false,
            seed,
            subchecks: Vec::new(),
            details: Vec::new(),
        }
    }

    fn record(&mut self, violation: f64) {
        self.trials += 1;
        self.worst_violation = self.worst_violation.max(violation);
    }

    fn finish(mut self) -> Self {
        if self.trials == 0 {
            self.worst_violation = 0.0;
        }
        self.pass = self.worst_violation <= self.tolerance && self.subchecks.iter().all(|c| c.pass);
        self
    }

    /// One line: `name: PASS (worst … over … trials)`.
    pub fn summary(&self) -> String {
        let failed: Vec<&str> = self.subchecks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        let mut line = format!(
            "{}: {} (worst violation {:.3e} over {} trials, tolerance {:.0e})",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.worst_violation,
            self.trials,
            self.tolerance
        );
        if !failed.is_empty() {
            line.push_str(&format!("; failed: {}", failed.join(", ")));
        }
        line
    }
}

fn seminorm(x: &Element, s: &Subalgebra) -> Result<f64> {
    Ok(solver::quotient_seminorm(x, s, DEFAULT_TOL_OUTER)?.radius)
}

fn in_trial<T>(index: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Trial { index, source: Box::new(e) })
}

fn draw(rng: &mut random::TrialRng, algebra: &BlockAlgebra, hermitian: bool) -> Element {
    if hermitian {
        random::hermitian(rng, algebra)
    } else {
        random::element(rng, algebra)
    }
}

/// `L(AC) ≤ L(A)‖C‖ + ‖A‖L(C)` and the same for `CA`, on seeded pairs;
/// even trials draw Hermitian pairs, odd trials general ones.
pub fn check_leibniz(s: &Subalgebra, trials: usize, seed: u64) -> Result<CheckReport> {
    let algebra = s.algebra();
    let mut report = CheckReport::new(format!("leibniz[{}]", s.label()), Some(seed), PROPERTY_TOL);
    for i in 0..trials {
        let mut rng = trial_rng(seed, i as u64);
        let hermitian = i % 2 == 0;
        let a = draw(&mut rng, algebra, hermitian);
        let c = draw(&mut rng, algebra, hermitian);
        let la = in_trial(i, seminorm(&a, s))?;
        let lc = in_trial(i, seminorm(&c, s))?;
        let rhs = la * c.norm() + a.norm() * lc;
        let lac = in_trial(i, seminorm(&(&a * &c), s))?;
        let lca = in_trial(i, seminorm(&(&c * &a), s))?;
        let v = (lac - rhs).max(lca - rhs);
        if v > PROPERTY_TOL {
            report.details.push(format!("trial {i}: L(AC) = {lac}, L(CA) = {lca}, bound {rhs}"));
        }
        report.record(v);
    }
    Ok(report.finish())
}

/// `L(A⁻¹) ≤ ‖A⁻¹‖² L(A)` on seeded invertible draws, plus `L(1) ≤ 1e-9`.
pub fn check_strong_leibniz(s: &Subalgebra, trials: usize, seed: u64) -> Result<CheckReport> {
    let algebra = s.algebra();
    let mut report = CheckReport::new(format!("strong-leibniz[{}]", s.label()), Some(seed), PROPERTY_TOL);
    let l_one = seminorm(&algebra.identity(), s)?;
    report.subchecks.push(SubCheck::at_most("L(1)", l_one, UNIT_TOL));
    for i in 0..trials {
        let mut rng = trial_rng(seed, i as u64);
        let a = random::invertible(&mut rng, algebra, i % 2 == 0, MIN_SINGULAR_VALUE);
        let inv = in_trial(i, a.try_inverse().ok_or_else(|| Error::Internal("draw is not invertible".into())))?;
        let la = in_trial(i, seminorm(&a, s))?;
        let linv = in_trial(i, seminorm(&inv, s))?;
        let bound = inv.norm().powi(2) * la;
        let v = linv - bound;
        if v > PROPERTY_TOL {
            report.details.push(format!("trial {i}: L(A^-1) = {linv}, bound {bound}"));
        }
        report.record(v);
    }
    Ok(report.finish())
}

/// Gap `M(A) − L(A)` between the norm-constrained and free distances, and
/// `‖B‖ ≤ 2‖A‖` for every free minimizer. `extra` elements run as additional
/// designated trials after the random ones. A passing report only says that
/// the property held on this sample.
pub fn check_same_norm(s: &Subalgebra, trials: usize, seed: u64) -> Result<CheckReport> {
    check_same_norm_with(s, trials, seed, &[])
}

pub fn check_same_norm_with(s: &Subalgebra, trials: usize, seed: u64, extra: &[Element]) -> Result<CheckReport> {
    let algebra = s.algebra();
    let mut report = CheckReport::new(format!("same-norm[{}]", s.label()), Some(seed), PROPERTY_TOL);
    let mut worst_growth = f64::NEG_INFINITY;
    let designated = extra.iter().cloned().map(Some);
    let random_draws = (0..trials).map(|_| None);
    for (i, given) in random_draws.chain(designated).enumerate() {
        let a = given.unwrap_or_else(|| draw(&mut trial_rng(seed, i as u64), algebra, i % 2 == 0));
        let free = in_trial(i, solver::quotient_seminorm(&a, s, DEFAULT_TOL_OUTER))?;
        let constrained = in_trial(i, solver::same_norm_distance(&a, s))?;
        let gap = constrained.radius_constrained - free.radius;
        worst_growth = worst_growth.max(free.minimizer.norm() - 2.0 * a.norm());
        if gap > PROPERTY_TOL || i >= trials {
            report.details.push(format!("trial {i}: L = {}, constrained = {}, gap = {gap:e}", free.radius, constrained.radius_constrained));
        }
        report.record(gap);
    }
    report.subchecks.push(SubCheck::at_most("||B|| - 2||A||", worst_growth.max(0.0), 1e-6));
    Ok(report.finish())
}

/// Elements commuting with ℬ, and instances whose best approximation is normal
/// and commutes with the target, are same-norm approximable.
pub fn check_commutant_corollaries(seed: u64) -> Result<CheckReport> {
    const TRIALS: usize = 100;
    const GAP_TOL: f64 = 1e-6;
    let algebra = BlockAlgebra::tuples(2, 3)?;
    let s = Subalgebra::standard(&algebra, &SubalgebraKind::ConstantTuple)?;
    let scalar_tuple = |d: [num_complex::Complex64; 3]| {
        Element::new(d.iter().map(|z| crate::linalg::identity(2) * *z).collect()).expect("2x2 blocks")
    };
    let mut report = CheckReport::new("commutant-corollaries".into(), Some(seed), GAP_TOL);

    // Scalar tuples commute with every constant tuple; the best approximation
    // is λ·1 with λ the center of the smallest disc around the entries.
    let c = |re: f64| num_complex::Complex64::new(re, 0.0);
    let designated = [([c(1.0), c(-1.0), c(0.0)], 0.0), ([c(2.0), c(0.0), c(1.0)], 1.0)];
    let mut cases: Vec<(Element, Option<f64>)> =
        designated.iter().map(|(d, lambda)| (scalar_tuple(*d), Some(*lambda))).collect();
    for i in 0..TRIALS {
        let mut rng = trial_rng(seed, i as u64);
        let d = [random::complex_gaussian(&mut rng), random::complex_gaussian(&mut rng), random::complex_gaussian(&mut rng)];
        cases.push((scalar_tuple(d), None));
    }
    let mut worst_scalar_excess = f64::NEG_INFINITY;
    let mut worst_lambda_error: f64 = 0.0;
    let mut worst_not_scalar: f64 = 0.0;
    for (i, (a, lambda)) in cases.iter().enumerate() {
        let free = in_trial(i, solver::quotient_seminorm(a, &s, DEFAULT_TOL_OUTER))?;
        let constrained = in_trial(i, solver::same_norm_distance(a, &s))?;
        let b = &free.minimizer;
        let mean = b.blocks()[0].trace() / num_complex::Complex64::new(2.0, 0.0);
        let scalar_part = algebra.identity().scale(mean);
        // Up to solver accuracy the minimizer is scalar; ‖λ‖ ≤ ‖A‖ then follows.
        worst_not_scalar = worst_not_scalar.max((b - &scalar_part).norm());
        worst_scalar_excess = worst_scalar_excess.max(mean.norm() - a.norm());
        if let Some(l) = lambda {
            worst_lambda_error = worst_lambda_error.max((mean - c(*l)).norm());
        }
        report.record(constrained.radius_constrained - free.radius);
    }

    // Commuting diagonal tuples: some best approximation is a constant diagonal,
    // which is normal and commutes with the target.
    let mut normal_instances = 0;
    for i in 0..50 {
        let mut rng = trial_rng(seed ^ 0x6e6f726d, i as u64);
        let blocks: Vec<_> = (0..3)
            .map(|_| {
                let x = random::uniform(&mut rng, -2.0, 2.0);
                let y = random::uniform(&mut rng, -2.0, 2.0);
                crate::linalg::diag_real(&[x, y])
            })
            .collect();
        let a = Element::new(blocks)?;
        let index = cases.len() + i;
        let free = in_trial(index, solver::quotient_seminorm(&a, &s, DEFAULT_TOL_OUTER))?;
        let b = &free.minimizer;
        let normal = b.commutator(&b.adjoint()).norm() <= 1e-6;
        let commutes = a.commutator(b).norm() <= 1e-6;
        if normal && commutes {
            normal_instances += 1;
            let constrained = in_trial(index, solver::same_norm_distance(&a, &s))?;
            report.record(constrained.radius_constrained - free.radius);
        }
    }
    report.subchecks.push(SubCheck::at_most("minimizer off scalars", worst_not_scalar, 1e-4));
    report.subchecks.push(SubCheck::at_most("|lambda| - ||A||", worst_scalar_excess.max(0.0), 1e-6));
    report.subchecks.push(SubCheck::at_most("designated lambda error", worst_lambda_error, 1e-4));
    report.details.push(format!("{normal_instances} of 50 diagonal instances had a normal commuting minimizer"));
    Ok(report.finish())
}

/// Badnear, non-unique and exercise regressions.
pub fn run_worked_examples() -> Result<Vec<CheckReport>> {
    Ok(vec![badnear_report()?, non_unique_report()?, exercise_report()?])
}

/// Rational spanning set of the constant tuples' Hermitian part.
fn rational_constant_basis() -> Vec<Element> {
    let c = crate::linalg::c64;
    let y = crate::linalg::CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    let mut out = Badnear::real_basis();
    out.push(Element::new(vec![y.clone(), y.clone(), y]).expect("2x2 blocks"));
    out
}

pub fn badnear_report() -> Result<CheckReport> {
    let f = Badnear::new();
    let s = &f.subalgebra;
    let mut report = CheckReport::new("badnear".into(), None, 1e-6);
    let mut push = |c: SubCheck| report.subchecks.push(c);

    let lz = solver::quotient_seminorm(&f.z, s, DEFAULT_TOL_OUTER)?;
    push(SubCheck::at_most("|L(Z) - 5|", (lz.radius - 5.0).abs(), 1e-6));

    let phi = f.witness_state();
    let check = certificate::verify_witness(&f.z, &phi, s, certificate::DEFAULT_CERT_TOL)?;
    push(SubCheck::flag("printed witness verifies", check.valid));
    let exact = exact::verify_witness_exact(&f.z, &phi, &rational_constant_basis())?;
    push(SubCheck::at_most("exact witness residual", exact.max_residual(), 0.0));
    push(SubCheck::flag("exact witness check", exact.is_exact()));

    let found = certificate::find_witness(&f.z, s)?;
    let found_check = certificate::verify_witness(&f.z, &found, s, certificate::DEFAULT_CERT_TOL)?;
    push(SubCheck::flag("computed witness verifies", found_check.valid));

    let mut w = f.witness();
    w.verify(&f.z, s, certificate::DEFAULT_CERT_TOL)?;
    let psi = certificate::witness_to_functional(&w, &f.algebra)?;
    let jd = psi.jordan_decompose();
    let states = Badnear::pure_states();
    let part = |terms: &[(usize, f64)]| -> Result<Vec<crate::linalg::CMatrix>> {
        let mut acc: Vec<crate::linalg::CMatrix> =
            f.algebra.block_dims().iter().map(|&n| crate::linalg::CMatrix::zeros(n, n)).collect();
        for &(k, weight) in terms {
            let p = &states[k].0;
            acc[p.block] += &p.vector * p.vector.adjoint() * num_complex::Complex64::new(weight, 0.0);
        }
        Ok(acc)
    };
    let want_plus = part(&[(0, 8.0 / 9.0), (1, 1.0 / 9.0)])?;
    let want_minus = part(&[(2, 4.0 / 9.0), (4, 5.0 / 9.0)])?;
    let diff = |got: &[crate::linalg::CMatrix], want: &[crate::linalg::CMatrix]| {
        got.iter().zip(want).map(|(g, w)| crate::linalg::max_abs_entry(&(g - w))).fold(0.0, f64::max)
    };
    push(SubCheck::at_most("psi+ mismatch", diff(jd.plus.repr(), &want_plus), 1e-9));
    push(SubCheck::at_most("psi- mismatch", diff(jd.minus.repr(), &want_minus), 1e-9));

    let uniq = certificate::uniqueness_check(&f.z, &phi, s)?;
    push(SubCheck::flag("witness faithful on B (unique best approximation)", uniq.verdict == Uniqueness::Unique));

    push(SubCheck::at_most("| ||A|| - 7 |", (f.a.norm() - 7.0).abs(), 1e-12));
    let best = solver::quotient_seminorm(&f.a, s, DEFAULT_TOL_OUTER)?;
    push(SubCheck::at_most("|L(A) - 5|", (best.radius - 5.0).abs(), 1e-6));
    push(SubCheck::at_most("||B - const diag(-8,0)||", (&best.minimizer - &f.b).norm(), 1e-3));
    push(SubCheck::at_most("| ||B|| - 8 |", (best.minimizer.norm() - 8.0).abs(), 1e-3));
    let constrained = solver::same_norm_distance(&f.a, s)?;
    push(SubCheck::at_least("same-norm gap", constrained.radius_constrained - best.radius, 1e-3));
    Ok(report.finish())
}

pub fn non_unique_report() -> Result<CheckReport> {
    let f = NonUnique::new();
    let s = &f.subalgebra;
    let mut report = CheckReport::new("non-unique".into(), None, 1e-6);
    let r = solver::quotient_seminorm(&f.a, s, DEFAULT_TOL_OUTER)?;
    report.subchecks.push(SubCheck::at_most("|L(A) - 1|", (r.radius - 1.0).abs(), 1e-6));
    for t in [0.0, 1.0, 2.0] {
        let d = (&f.a - &NonUnique::candidate(t)).norm();
        report.subchecks.push(SubCheck::at_most(&format!("| ||A - diag({t},0)|| - 1 |"), (d - 1.0).abs(), 1e-9));
    }
    let constrained = solver::same_norm_distance(&f.a, s)?;
    report.subchecks.push(SubCheck::at_most("same-norm gap", (constrained.radius_constrained - r.radius).max(0.0), 1e-6));
    let z = &f.a - &NonUnique::candidate(1.0);
    let phi = certificate::find_witness(&z, s)?;
    let uniq = certificate::uniqueness_check(&z, &phi, s)?;
    report.subchecks.push(SubCheck::flag("uniqueness inconclusive", uniq.verdict == Uniqueness::Inconclusive));
    Ok(report.finish())
}

pub fn exercise_report() -> Result<CheckReport> {
    let f = Exercise::new();
    let mut report = CheckReport::new("exercise".into(), None, 1e-5);
    let r = solver::quotient_seminorm(&f.a, &f.subalgebra, DEFAULT_TOL_OUTER)?;
    let opts = OracleOptions { refinements: 2, basis: Some(Exercise::symmetric_directions()), ..OracleOptions::new(1e-3) };
    let oracle = solver::oracle_grid_with(&f.a, &f.subalgebra, &opts)?;
    report.subchecks.push(SubCheck::at_most("|solver - oracle|", (r.radius - oracle.radius).abs(), 1e-5));
    report.details.push(format!("solver {} oracle {}", r.radius, oracle.radius));
    Ok(report.finish())
}

/// The four subalgebras of the sampled Leibniz checks.
pub fn default_subalgebras() -> Result<Vec<Subalgebra>> {
    Ok(vec![
        subalgebra::standard_subalgebra(&BlockAlgebra::full(3)?, &SubalgebraKind::Scalars)?,
        subalgebra::standard_subalgebra(&BlockAlgebra::full(2)?, &SubalgebraKind::Diagonal)?,
        subalgebra::standard_subalgebra(&BlockAlgebra::tuples(2, 3)?, &SubalgebraKind::ConstantTuple)?,
        subalgebra::standard_subalgebra(&BlockAlgebra::new(vec![2, 3])?, &SubalgebraKind::Center)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flip_squared_is_trivially_leibniz() {
        let (x, s, _) = crate::fixtures::flip().unwrap();
        let l = seminorm(&(&x * &x), &s).unwrap();
        assert!(l < 1e-7);
    }

    #[test]
    fn small_leibniz_run_is_reproducible() {
        let s = Subalgebra::standard(&BlockAlgebra::full(2).unwrap(), &SubalgebraKind::Diagonal).unwrap();
        let a = check_leibniz(&s, 6, 11).unwrap();
        let b = check_leibniz(&s, 6, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.pass, "{}", a.summary());
    }

    #[test]
    fn strong_leibniz_scalar_multiple_of_unit() {
        let s = Subalgebra::standard(&BlockAlgebra::full(2).unwrap(), &SubalgebraKind::Scalars).unwrap();
        let two = s.algebra().identity().scale_real(2.0);
        assert!(seminorm(&two.try_inverse().unwrap(), &s).unwrap() < 1e-9);
        assert!(check_strong_leibniz(&s, 4, 3).unwrap().pass);
    }

    #[test]
    fn report_requires_subchecks() {
        let mut r = CheckReport::new("x".into(), None, 1.0);
        r.record(0.0);
        r.subchecks.push(SubCheck::flag("never", false));
        assert!(!r.finish().pass);
    }
}
