use proptest::prelude::*;

use gq_ovoid::classical::{elliptic_q5, symplectic_w, Family};
use gq_ovoid::geometry::SparsityMode;
use gq_ovoid::ovoid::{self, BasePoint, CompletionPath, OnFailure, OvoidError, RunParams};
use gq_ovoid::{gqi, Backend, Execution, PairCheck};

#[test]
fn backends_agree() {
    for q in [2, 3, 4] {
        let matrix = elliptic_q5(q).unwrap();
        assert_eq!(matrix.backend(), Backend::Matrix);
        let search = matrix.clone().with_backend(Backend::LineSearch);
        for u in (0..matrix.num_points()).step_by(3) {
            assert_eq!(matrix.neighborhood(u), search.neighborhood(u));
            for v in (0..matrix.num_points()).step_by(5) {
                assert_eq!(matrix.is_collinear(u, v), search.is_collinear(u, v));
                assert_eq!(matrix.line_joining(u, v), search.line_joining(u, v));
            }
        }
        assert!(search.verify_axioms(PairCheck::Exhaustive).all_passed());
        let sparse = SparsityMode::Sampled {
            triples: 5_000,
            seed: 3,
        };
        assert_eq!(
            matrix.locally_sparse(sparse).unwrap(),
            search.locally_sparse(sparse).unwrap()
        );
        let params = RunParams {
            seed: 9,
            ..Default::default()
        };
        let a = ovoid::two_round(&matrix, &params).unwrap();
        let b = ovoid::two_round(&search, &params).unwrap();
        assert!(a.same_outcome(&b));
    }
}

#[test]
fn sparsity_is_schedule_independent() {
    let gq = elliptic_q5(4).unwrap();
    let mode = SparsityMode::Sampled {
        triples: 20_000,
        seed: 5,
    };
    let seq = gq.locally_sparse_with(mode, Execution::Sequential).unwrap();
    let par = gq.locally_sparse_with(mode, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
    let h4 = Family::Hermitian4.build(2).unwrap();
    assert_eq!(
        h4.locally_sparse_with(SparsityMode::Exhaustive, Execution::Sequential)
            .unwrap(),
        h4.locally_sparse_with(SparsityMode::Exhaustive, Execution::Parallel)
            .unwrap()
    );
}

#[test]
fn gqi_round_trip_of_every_family() {
    for family in [
        Family::EllipticQ5,
        Family::Symplectic,
        Family::ParabolicQ4,
        Family::Hermitian3,
        Family::Hermitian4,
    ] {
        let gq = family.build(2).unwrap();
        let back = gqi::from_str(&gqi::to_string(&gq), "back").unwrap();
        assert_eq!(gqi::to_string(&back), gqi::to_string(&gq));
        assert!(back.verify_axioms(PairCheck::Exhaustive).all_passed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_round_invariants(
        seed in any::<u64>(),
        q in prop::sample::select(vec![2u32, 3, 4]),
        alpha in 0.5f64..8.0,
        fixed_x in prop::option::of(0usize..27),
        restarts in 0u32..4,
    ) {
        let gq = elliptic_q5(q).unwrap();
        let params = RunParams {
            alpha,
            seed,
            x: fixed_x.map_or(BasePoint::Random, BasePoint::Fixed),
            max_restarts: restarts,
            on_failure: OnFailure::GreedyComplete,
            ..Default::default()
        };
        let res = ovoid::two_round(&gq, &params).unwrap();
        let members = &res.final_ovoid.members;
        prop_assert!(ovoid::is_partial_ovoid(&gq, members));
        prop_assert!(ovoid::is_maximal(&gq, members));
        prop_assert!(res.restarts_used <= restarts);
        if let Some(x) = fixed_x {
            prop_assert_eq!(res.x, x);
        }
        // S sits on distinct lines through x, and S and T end up in the output
        for p in &res.s_set {
            prop_assert!(*p != res.x && gq.is_collinear(*p, res.x));
        }
        for p in res.s_set.iter().chain(&res.t_set) {
            prop_assert!(members.contains(p));
        }
        prop_assert!(members.len() >= res.s_set.len() + res.t_set.len());
        if res.completion_path == CompletionPath::Clean {
            prop_assert_eq!(members.len(), res.s_set.len() + res.t_set.len());
        }
        let again = ovoid::two_round(&gq, &params).unwrap();
        prop_assert!(res.same_outcome(&again));
    }

    #[test]
    fn fail_policy_never_returns_non_maximal(seed in any::<u64>(), p in 0.0f64..0.2) {
        let gq = symplectic_w(3).unwrap();
        let params = RunParams {
            seed,
            p_override: Some(p),
            max_restarts: 0,
            on_failure: OnFailure::Fail,
            ..Default::default()
        };
        match ovoid::two_round(&gq, &params) {
            Ok(res) => {
                prop_assert_eq!(res.completion_path, CompletionPath::Clean);
                prop_assert!(ovoid::is_maximal(&gq, &res.final_ovoid.members));
            }
            Err(OvoidError::RunFailed(res)) => {
                prop_assert_eq!(res.completion_path, CompletionPath::Failed);
                prop_assert!(ovoid::is_partial_ovoid(&gq, &res.final_ovoid.members));
                prop_assert!(!ovoid::is_maximal(&gq, &res.final_ovoid.members));
            }
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn greedy_is_maximal(seed in any::<u64>(), q in prop::sample::select(vec![2u32, 3, 4, 5])) {
        let gq = elliptic_q5(q).unwrap();
        let g = ovoid::greedy_random(&gq, seed);
        prop_assert!(ovoid::is_maximal(&gq, &g.members));
        prop_assert!(g.len() as u64 >= ovoid::counting_lower_bound(q as u64, (q * q) as u64));
    }
}
