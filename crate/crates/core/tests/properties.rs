use bisqueeze::deformations::{biorthogonality_matrix, build_rank_one, metric_eta, RankOneSpec};
use bisqueeze::dynamics::{capital_ops_analytic, DynamicsParams};
use bisqueeze::export::format_real;
use bisqueeze::numerics::{annihilator_matrix, FockOperator, FockVector};
use bisqueeze::operators::SqueezeParams;
use bisqueeze::Complex64 as C64;
use nalgebra::DMatrix;
use proptest::prelude::*;

const DIM: usize = 16;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

/// `(u, v, alpha)` with `<u, v> = 1` and `|alpha| < 0.9`.
fn rank_one_spec() -> impl Strategy<Value = RankOneSpec> {
    (prop::collection::vec(complex(), 4), prop::collection::vec(complex(), 4), complex()).prop_filter_map(
        "degenerate pair",
        |(u, v, alpha)| {
            let mut uc = vec![C64::new(0.0, 0.0); DIM];
            let mut vc = uc.clone();
            uc[..4].copy_from_slice(&u);
            vc[..4].copy_from_slice(&v);
            let u = FockVector::new(uc).ok()?.normalized();
            let v = FockVector::new(vc).ok()?;
            let uv = u.inner(&v).ok()?;
            if uv.norm() < 0.2 {
                return None;
            }
            let v = v.scale(C64::new(1.0, 0.0) / uv);
            RankOneSpec::new(u, v, alpha * 0.9).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn squeeze_coefficients_are_tied(r in 0.0..1.0f64, theta in -3.1..3.1f64) {
        let p = SqueezeParams::from_polar(r, theta);
        prop_assert!((p.lambda_b + p.lambda_a.conj()).norm() < 1e-15);
        prop_assert!((p.lambda_a.norm() - 0.5 * r.tanh()).abs() < 1e-15);
        prop_assert!((p.lambda + 0.5 * r.cosh().ln()).abs() < 1e-15);
    }

    #[test]
    fn adjoint_is_an_involution(entries in prop::collection::vec(complex(), DIM * DIM)) {
        let op = FockOperator::new(DMatrix::from_vec(DIM, DIM, entries)).unwrap();
        let back = op.adjoint().adjoint();
        prop_assert_eq!(back.matrix(), op.matrix());
    }

    #[test]
    fn rank_one_biorthogonal(spec in rank_one_spec()) {
        let m = build_rank_one(&spec, DIM).unwrap();
        let rep = biorthogonality_matrix(&m, DIM - 1).unwrap();
        prop_assert!(rep.max_deviation < 1e-10, "{}", rep.max_deviation);
    }

    #[test]
    fn metric_maps_phi_to_psi(spec in rank_one_spec(), n in 0usize..8) {
        let m = build_rank_one(&spec, DIM).unwrap();
        let eta = metric_eta(&m).unwrap().operator;
        let moved = eta.apply(&m.phi_fock(n).unwrap()).unwrap();
        prop_assert!(moved.distance(&m.psi_fock(n).unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn metric_inner_product_unwinds(spec in rank_one_spec(), x in prop::collection::vec(complex(), DIM)) {
        // <phi_n, eta x> = <Psi_n, x>
        let m = build_rank_one(&spec, DIM).unwrap();
        let eta = metric_eta(&m).unwrap().operator;
        let x = FockVector::new(x).unwrap();
        let ex = eta.apply(&x).unwrap();
        for n in 0..4 {
            let lhs = m.phi_fock(n).unwrap().inner(&ex).unwrap();
            let rhs = m.psi_fock(n).unwrap().inner(&x).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn capital_commutator_is_unit(spec in rank_one_spec(), lambda in -0.3..0.3f64, t in 0.0..2.0f64) {
        let m = build_rank_one(&spec, DIM).unwrap();
        let ops = capital_ops_analytic(&m, &DynamicsParams::new(0.0, lambda, t).unwrap()).unwrap();
        prop_assert!(ops.commutator_residual() < 1e-9);
    }

    #[test]
    fn reals_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        prop_assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
    }
}

#[test]
fn standard_ladder_commutator_on_block() {
    let a = annihilator_matrix(DIM).unwrap();
    let comm = a.commutator(&a.adjoint());
    assert!(comm.block_residual(&FockOperator::identity(DIM), DIM - 1) < 1e-14);
}
