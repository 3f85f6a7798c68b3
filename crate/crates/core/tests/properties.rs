use cstar_approx::random::{self, trial_rng};
use cstar_approx::solver::{self, DEFAULT_TOL_OUTER};
use cstar_approx::subalgebra::hs_project;
use cstar_approx::{BlockAlgebra, Element, Subalgebra, SubalgebraKind};
use num_complex::Complex64;
use proptest::prelude::*;

fn cases() -> Vec<Subalgebra> {
    let kinds = [
        (BlockAlgebra::full(3).unwrap(), SubalgebraKind::Scalars),
        (BlockAlgebra::full(2).unwrap(), SubalgebraKind::Diagonal),
        (BlockAlgebra::tuples(2, 3).unwrap(), SubalgebraKind::ConstantTuple),
        (BlockAlgebra::new(vec![2, 3]).unwrap(), SubalgebraKind::Center),
    ];
    kinds.iter().map(|(a, k)| Subalgebra::standard(a, k).unwrap()).collect()
}

fn l(x: &Element, s: &Subalgebra) -> f64 {
    solver::quotient_seminorm(x, s, DEFAULT_TOL_OUTER).unwrap().radius
}

fn draw(seed: u64, s: &Subalgebra, hermitian: bool) -> Element {
    let mut rng = trial_rng(seed, 0);
    if hermitian {
        random::hermitian(&mut rng, s.algebra())
    } else {
        random::element(&mut rng, s.algebra())
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn shift_by_subalgebra_leaves_seminorm(seed in any::<u64>(), which in 0usize..4, hermitian in any::<bool>()) {
        let s = &cases()[which];
        let a = draw(seed, s, hermitian);
        let mut rng = trial_rng(seed, 1);
        let coeffs: Vec<Complex64> = s.basis().iter().map(|_| random::complex_gaussian(&mut rng)).collect();
        let b = s.combine(&coeffs);
        prop_assert!((l(&(&a + &b), s) - l(&a, s)).abs() <= 1e-6);
    }

    #[test]
    fn seminorm_is_absolutely_homogeneous(seed in any::<u64>(), which in 0usize..4, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let s = &cases()[which];
        let a = draw(seed, s, false);
        let lambda = Complex64::new(re, im);
        prop_assert!((l(&a.scale(lambda), s) - lambda.norm() * l(&a, s)).abs() <= 1e-6);
    }

    #[test]
    fn seminorm_is_subadditive(seed in any::<u64>(), which in 0usize..4) {
        let s = &cases()[which];
        let a = draw(seed, s, seed % 2 == 0);
        let c = draw(seed.wrapping_add(1), s, seed % 3 == 0);
        prop_assert!(l(&(&a + &c), s) <= l(&a, s) + l(&c, s) + 1e-6);
    }

    #[test]
    fn sandwich_bounds(seed in any::<u64>(), which in 0usize..4, hermitian in any::<bool>()) {
        let s = &cases()[which];
        let a = draw(seed, s, hermitian);
        let r = l(&a, s);
        let projected = (&a - &hs_project(&a, s).unwrap()).norm();
        prop_assert!(r >= -1e-12);
        prop_assert!(r <= projected + 1e-9);
        prop_assert!(r <= a.norm() + 1e-9);
    }

    #[test]
    fn dilation_matches_direct_solve(seed in any::<u64>(), which in 0usize..4) {
        let s = &cases()[which];
        let a = draw(seed, s, true);
        let direct = l(&a, s);
        let dilated = l(&a.dilation(), s.dilated());
        prop_assert!((direct - dilated).abs() <= 1e-6, "direct {direct}, dilated {dilated}");
    }

    #[test]
    fn same_norm_never_beats_free_distance(seed in any::<u64>(), which in 0usize..4, hermitian in any::<bool>()) {
        let s = &cases()[which];
        let a = draw(seed, s, hermitian);
        let free = solver::quotient_seminorm(&a, s, DEFAULT_TOL_OUTER).unwrap();
        let constrained = solver::same_norm_distance(&a, s).unwrap();
        // Both radii are attained distances; only the certified lower end of the
        // free bracket is a hard floor for the constrained one.
        prop_assert!(constrained.radius_constrained >= free.lower_bound - 1e-9,
            "constrained {}, free [{}, {}]", constrained.radius_constrained, free.lower_bound, free.radius);
        prop_assert!(constrained.radius_constrained >= free.radius - DEFAULT_TOL_OUTER);
        prop_assert!(constrained.minimizer.norm() <= a.norm() + 1e-6);
    }
}

#[test]
fn flip_is_minimal_for_the_diagonal() {
    let (x, s, _) = cstar_approx::fixtures::flip().unwrap();
    let m = solver::minimality_check(&x, &s, 1e-6).unwrap();
    assert!(m.minimal);
    assert!((m.seminorm - 1.0).abs() <= 1e-6);
    let oracle = solver::oracle_grid(&x, &s, 1e-3).unwrap();
    assert!((oracle.radius - 1.0).abs() <= 1e-3);
}

#[test]
fn identity_is_not_minimal_for_scalars() {
    let algebra = BlockAlgebra::full(2).unwrap();
    let s = Subalgebra::standard(&algebra, &SubalgebraKind::Scalars).unwrap();
    let m = solver::minimality_check(&algebra.identity(), &s, 1e-6).unwrap();
    assert!(!m.minimal);
    assert!(m.seminorm <= 1e-9);
}

#[test]
fn midpoint_formula_for_scalars_in_m2() {
    // For Hermitian A in M_2 the distance to the scalars is half the eigenvalue spread.
    let algebra = BlockAlgebra::full(2).unwrap();
    let s = Subalgebra::standard(&algebra, &SubalgebraKind::Scalars).unwrap();
    for i in 0..10 {
        let a = random::hermitian(&mut trial_rng(77, i), &algebra);
        let m = a.block(0);
        let (p, q, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)].norm());
        let spread_half = (0.25 * (p - q) * (p - q) + b * b).sqrt();
        assert!((l(&a, &s) - spread_half).abs() <= 1e-6);
        let oracle = solver::oracle_grid(&a, &s, 1e-3).unwrap();
        assert!((oracle.radius - spread_half).abs() <= 1e-3);
    }
}
