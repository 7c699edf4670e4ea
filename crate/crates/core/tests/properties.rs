use proptest::prelude::*;

use revoqsim_core::harness::stats::wilson;
use revoqsim_core::harness::unforge::{run_unforgeability_with, MeasureAndGuess, UnforgeParams};
use revoqsim_core::harness::SuccessEstimate;
use revoqsim_core::parallel::Execution;
use revoqsim_core::perm::{apply_perm_unitary, feistel_perm, sample_random_perm, ExplicitPerm, PermKey, Permutation};
use revoqsim_core::pointfn::{self, PointFunction, WkdParams};
use revoqsim_core::qstate::{trace_distance, DenseState, Outcome, Register, SubsetState, TupleState};
use revoqsim_core::revenc::{self, Backend, RevEncParams};
use revoqsim_core::rng::seeded;
use revoqsim_core::sponge::{build_table, range_bitmap, sponge_hash, SpongeParams, ValidOracle};
use revoqsim_core::BitString;

fn backend() -> impl Strategy<Value = Backend> {
    prop_oneof![Just(Backend::Keyed), Just(Backend::Explicit)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concat_split_round_trip(hi in any::<u64>(), lo in any::<u64>(), wh in 1u32..30, wl in 1u32..30) {
        let a = BitString::truncated(hi, wh);
        let b = BitString::truncated(lo, wl);
        let joined = a.concat(b).unwrap();
        prop_assert_eq!(joined.width(), wh + wl);
        prop_assert_eq!(joined.split(wl), (a, b));
    }

    #[test]
    fn feistel_is_a_bijection(key in proptest::collection::vec(any::<u8>(), 16..=32), width in 1u32..=16, x in any::<u64>()) {
        let phi = feistel_perm(PermKey::new(key).unwrap(), width);
        let x = x & ((1u64 << width) - 1);
        let y = phi.forward(x);
        prop_assert!(y < 1u64 << width);
        prop_assert_eq!(phi.inverse(y), x);
    }

    #[test]
    fn sampled_tables_are_bijections(seed in any::<u64>(), width in 1u32..=8) {
        let phi = sample_random_perm(width, &mut seeded(seed)).unwrap();
        let mut seen = vec![false; 1 << width];
        for x in 0..1u64 << width {
            let y = phi.forward(x);
            prop_assert!(!seen[y as usize]);
            seen[y as usize] = true;
            prop_assert_eq!(phi.inverse(y), x);
        }
    }

    #[test]
    fn subset_states_are_unit_and_move_with_the_permutation(
        seed in any::<u64>(),
        support in proptest::collection::btree_set(0u64..64, 1..20),
    ) {
        let s = SubsetState::new(6, support.iter().copied()).unwrap();
        let dense = s.to_dense().unwrap();
        prop_assert!((dense.norm() - 1.0).abs() < 1e-12);
        let phi = sample_random_perm(6, &mut seeded(seed)).unwrap();
        prop_assert_eq!(apply_perm_unitary(&phi, &dense).unwrap(), s.image(&phi).unwrap().to_dense().unwrap());
    }

    #[test]
    fn tuple_states_are_unit(tuple in proptest::collection::btree_set(0u64..16, 1..=4)) {
        let t = TupleState::new(4, tuple.into_iter().collect()).unwrap().to_dense().unwrap();
        prop_assert!((t.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_is_a_metric_on_pure_pairs(a in proptest::collection::btree_set(0u64..8, 1..8), b in proptest::collection::btree_set(0u64..8, 1..8)) {
        let sa = SubsetState::new(3, a).unwrap();
        let sb = SubsetState::new(3, b).unwrap();
        let (ra, rb) = (sa.to_dense().unwrap().to_density().unwrap(), sb.to_dense().unwrap().to_density().unwrap());
        let d = trace_distance(&ra, &rb).unwrap();
        prop_assert!((0.0..=1.0 + 1e-9).contains(&d));
        prop_assert!((d - trace_distance(&rb, &ra).unwrap()).abs() < 1e-9);
        let o = sa.overlap(&sb);
        prop_assert!((d - (1.0 - o * o).max(0.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn honest_revenc_round_trip(seed in any::<u64>(), mu in 0u64..4, k in 1usize..=2, backend in backend()) {
        let params = RevEncParams::new(2, 2, k, backend).unwrap();
        let mut rng = seeded(seed);
        let sk = revenc::keygen(&params, &mut rng).unwrap();
        let mu = BitString::new(mu, 2).unwrap();
        let (ct, vk) = revenc::encrypt(&sk, mu, &params, &mut rng).unwrap();
        let copy = ct.copies.copy(0).unwrap();
        prop_assert_eq!(revenc::decrypt(&sk, copy, ct.pad, &mut rng).unwrap(), mu);
        let p = revenc::accept_probability(&sk, &vk, &params, &ct.copies).unwrap();
        prop_assert!((p - 1.0).abs() < 1e-9);
        let rev = revenc::revoke(&sk, &vk, &params, &ct.copies, &mut rng).unwrap();
        prop_assert_eq!(rev.outcome, Outcome::Accept);
    }

    #[test]
    fn accept_probability_is_a_probability(seed in any::<u64>(), fake in 0u64..16) {
        let params = RevEncParams::new(2, 2, 2, Backend::Explicit).unwrap();
        let mut rng = seeded(seed);
        let sk = revenc::keygen(&params, &mut rng).unwrap();
        let (ct, vk) = revenc::encrypt(&sk, BitString::zero(2), &params, &mut rng).unwrap();
        let real = ct.copies.copy(0).unwrap().clone();
        let returned = Register::product(vec![real, DenseState::basis(4, fake).unwrap()]).unwrap();
        let p = revenc::accept_probability(&sk, &vk, &params, &returned).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn hybrid_round_trip(seed in any::<u64>(), m in 0u64..8) {
        let params = RevEncParams::new(2, 3, 1, Backend::Keyed).unwrap();
        let mut rng = seeded(seed);
        let sk = revenc::keygen(&params, &mut rng).unwrap();
        let m = BitString::new(m, 3).unwrap();
        let (ct, _) = pointfn::hybrid_encrypt(&sk, m, &params, &mut rng).unwrap();
        prop_assert_eq!(pointfn::hybrid_decrypt(&sk, &ct, &mut rng).unwrap(), m);
    }

    #[test]
    fn point_function_evaluates_on_the_marked_input(seed in any::<u64>(), lambda in 1u32..=3) {
        let params = WkdParams::with_defaults(lambda, 1);
        let mut rng = seeded(seed);
        let mut h = params.random_oracle(seeded(seed ^ 1)).unwrap();
        let p = PointFunction::random(lambda, &mut rng);
        let (mut state, vk) = pointfn::pf_compile(&p, &params, &mut h, &mut rng).unwrap();
        let untouched = state.clone();
        prop_assert_eq!(pointfn::pf_eval(&mut state, p.y, &mut h, &params, &mut rng).unwrap(), p.m);
        let rev = pointfn::pf_revoke(&vk, untouched.copies(), &params, &mut rng).unwrap();
        prop_assert!((rev.accept_probability - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wilson_interval_brackets_the_estimate(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
        let wins = ((trials as f64) * frac).floor() as u64;
        let e = SuccessEstimate::from_counts(wins, trials);
        prop_assert!(0.0 <= e.ci_lo && e.ci_lo <= e.p_hat && e.p_hat <= e.ci_hi && e.ci_hi <= 1.0);
        let (lo, hi) = wilson(wins, trials, 3.0);
        prop_assert!(lo <= e.ci_lo + 1e-12 && hi >= e.ci_hi - 1e-12);
    }

    #[test]
    fn sponge_tables_validate(seed in any::<u64>(), r in 2u32..=5, c in 1u32..=4, s in 0u64..4) {
        let params = SpongeParams { r, c, table_size: s.min(1 << r), backend: Backend::Explicit };
        let mut rng = seeded(seed);
        let phi = params.sample_perm(&mut rng).unwrap();
        let table = build_table(&phi, &params, &mut rng).unwrap();
        prop_assert!(table.is_consistent(&phi));
        let by_range = ValidOracle::<&ExplicitPerm>::by_range(&phi, table.iv, r);
        let by_fiber = ValidOracle::by_fiber(&phi, table.iv, r);
        for h in 0..1u64 << r {
            prop_assert_eq!(by_range.check(h), by_fiber.check(h));
        }
        for x in &table.inputs {
            let h = sponge_hash(&phi, table.iv, *x).unwrap();
            prop_assert!(range_bitmap(&phi, table.iv, r)[h.value() as usize]);
        }
    }
}

#[test]
fn execution_modes_agree() {
    let params = UnforgeParams { n: 6, s: 12, k: 2 };
    let a = run_unforgeability_with(Execution::Sequential, &params, &MeasureAndGuess, 500, 21).unwrap();
    let b = run_unforgeability_with(Execution::Parallel, &params, &MeasureAndGuess, 500, 21).unwrap();
    assert_eq!(a.digest, b.digest);
    assert_eq!(a.transcripts, b.transcripts);
}
