use gw_monogamy::cli::example_spec;
use gw_monogamy::convexroof::{self, roof_optimize, Direction, OptimizerBudget};
use gw_monogamy::gwstates::{self, GWSpec};
use gw_monogamy::linalg::C64;
use gw_monogamy::measures::{self, PureMeasure, TsallisParams};
use gw_monogamy::random::{self, rng_from_seed, GwSampling};
use gw_monogamy::{DensityMatrix, PartyPartition, PureState};
use rand::Rng;

const ORACLE_TOL: f64 = 1e-4;

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn pair() -> PartyPartition {
    PartyPartition::singletons(2)
}

fn budget(seed: u64) -> OptimizerBudget {
    OptimizerBudget { restarts: 60, ..OptimizerBudget::default() }.with_seed(seed)
}

fn min_max(rho: &DensityMatrix, measure: PureMeasure, seed: u64) -> (f64, f64) {
    let b = budget(seed);
    let min = roof_optimize(rho, &pair(), measure, Direction::Min, &b).unwrap().value;
    let max = roof_optimize(rho, &pair(), measure, Direction::Max, &b).unwrap().value;
    (min, max)
}

#[test]
#[allow(clippy::approx_constant)]
fn example_pairs_match_the_closed_form_in_both_directions() {
    let spec = example_spec();
    for (t, expected) in [(1, 0.5f64.sqrt()), (2, 2.0 * 0.5f64.sqrt() * 0.4), (3, 2.0 * 0.5f64.sqrt() * 0.3)] {
        let rho = gwstates::group_pair_state(&spec, &[0], &[t]).unwrap();
        let (min, max) = min_max(&rho, PureMeasure::Concurrence, t as u64);
        assert!((min - expected).abs() < ORACLE_TOL, "min {min} vs {expected}");
        assert!((max - expected).abs() < ORACLE_TOL, "max {max} vs {expected}");
    }
    assert!((gwstates::pairwise_concurrence_gw(&spec, 0, 1).unwrap() - 0.70711).abs() < 1e-5);
    assert!((gwstates::pairwise_concurrence_gw(&spec, 0, 2).unwrap() - 0.56569).abs() < 1e-5);
}

#[test]
fn example_three_party_marginal_spectrum() {
    let rho = gwstates::build_gw(&example_spec()).reduced(&[0, 1, 2]).unwrap();
    let spec = gw_monogamy::qstate::eigvals_hermitian(&rho).unwrap();
    assert!((spec[0] - 0.91).abs() < 1e-12);
    assert!((spec[1] - 0.09).abs() < 1e-12);
    assert!(spec[2..].iter().all(|v| v.abs() < 1e-12));
    let t2 = measures::tsallis_entropy(&rho, TsallisParams::new(2.0).unwrap()).unwrap();
    assert!((t2 - 0.1638).abs() < 1e-12);
}

#[test]
fn random_gwv_pairs_match_the_closed_form() {
    for seed in 0..6u64 {
        let mut rng = rng_from_seed(seed);
        let n = rng.random_range(3..=5);
        let p = rng.random_range(0.2..1.0);
        let spec = random::random_gw_spec(&mut rng, n, 2, p, GwSampling::default()).unwrap();
        let rho = gwstates::group_pair_state(&spec, &[0], &[n - 1]).unwrap();
        let expected = gwstates::pairwise_concurrence_gw(&spec, 0, n - 1).unwrap();
        let (min, max) = min_max(&rho, PureMeasure::Concurrence, seed);
        assert!((min - expected).abs() < ORACLE_TOL, "seed {seed}: min {min} vs {expected}");
        assert!((max - expected).abs() < ORACLE_TOL, "seed {seed}: max {max} vs {expected}");
    }
}

#[test]
fn group_pairs_match_the_closed_form() {
    let mut rng = rng_from_seed(17);
    let spec = random::random_gw_spec(&mut rng, 5, 1, 0.7, GwSampling::default()).unwrap();
    let rho = gwstates::group_pair_state(&spec, &[0, 3], &[1]).unwrap();
    let rho = measures::compress_local_supports(&rho).unwrap();
    let expected = gwstates::group_pair_concurrence(&spec, &[0, 3], &[1]).unwrap();
    let (min, max) = min_max(&rho, PureMeasure::Concurrence, 17);
    assert!((min - expected).abs() < ORACLE_TOL);
    assert!((max - expected).abs() < ORACLE_TOL);
}

#[test]
fn vacuum_admixed_pair_matches_wootters() {
    let (a, b) = (0.6f64, 0.8f64);
    let phi = PureState::new(vec![2, 2], vec![r(0.0), r(b), r(a), r(0.0)]).unwrap();
    let vac = PureState::basis(vec![2, 2], 0).unwrap();
    let rho = DensityMatrix::mixture(&[(0.91, &phi), (0.09, &vac)]).unwrap();
    let exact = 2.0 * 0.91 * a * b;
    assert!((measures::wootters_concurrence_2qubit(&rho).unwrap() - exact).abs() < 1e-12);
    let roof = convexroof::concurrence_mixed(&rho, &pair(), &budget(3)).unwrap();
    assert!((roof - exact).abs() < ORACLE_TOL);
}

#[test]
fn qutrit_pair_compresses_to_a_qubit_pair() {
    let mut rng = rng_from_seed(2024);
    let spec = random::random_gw_spec(&mut rng, 4, 3, 1.0, GwSampling::default()).unwrap();
    let rho = gwstates::group_pair_state(&spec, &[1], &[2]).unwrap();
    assert_eq!(rho.dims(), &[4, 4]);
    let effective = measures::project_to_effective_2x2(&rho).unwrap();
    assert_eq!(effective.dims(), &[2, 2]);
    let wootters = measures::wootters_concurrence_2qubit(&effective).unwrap();
    let roof = convexroof::concurrence_mixed(&rho, &pair(), &budget(4)).unwrap();
    assert!((wootters - roof).abs() < ORACLE_TOL, "{wootters} vs {roof}");
}

#[test]
fn tsallis_roof_of_gw_pairs_is_f_q_of_c_squared() {
    let spec = example_spec();
    let rho = gwstates::group_pair_state(&spec, &[0], &[1]).unwrap();
    let two = TsallisParams::new(2.0).unwrap();
    let t = convexroof::tsallis_mixed(&rho, &pair(), two, &budget(5)).unwrap();
    assert!((t - 0.25).abs() < 2e-4);

    let pcs = GWSpec::symmetric_w(2, 1).unwrap().with_p(0.7).unwrap();
    let rho = gwstates::build_pcs_mixture(&pcs);
    let three = TsallisParams::new(3.0).unwrap();
    let c = gwstates::pairwise_concurrence_gw(&pcs, 0, 1).unwrap();
    let t = convexroof::tsallis_mixed(&rho, &pair(), three, &budget(6)).unwrap();
    assert!((t - 3.0 * c * c / 8.0).abs() < 2e-4, "{t} vs {}", 3.0 * c * c / 8.0);
}

#[test]
fn assistance_exceeds_f_q_of_c_squared_on_vacuum_admixed_pairs() {
    // Ensemble {φ, |00⟩} of the (A1, A2) marginal already averages to 1/3 at q = 2.
    let rho = gwstates::group_pair_state(&example_spec(), &[0], &[1]).unwrap();
    let two = TsallisParams::new(2.0).unwrap();
    let res = roof_optimize(&rho, &pair(), PureMeasure::Tsallis(two), Direction::Max, &budget(7)).unwrap();
    assert!((res.value - 1.0 / 3.0).abs() < ORACLE_TOL, "{}", res.value);
    assert!(res.value > 0.25 + 0.05);
    let rebuilt = res.ensemble.reconstruct();
    assert!(rebuilt.max_abs_diff(rho.matrix()) < 1e-10);
}

#[test]
fn direction_and_trivial_cases() {
    let bell = PureState::normalized(vec![2, 2], vec![r(1.0), r(0.0), r(0.0), r(1.0)]).unwrap();
    for m in [PureMeasure::Concurrence, PureMeasure::Negativity] {
        let (min, max) = min_max(&bell.density(), m, 8);
        assert!((min - 1.0).abs() < 1e-9 && (max - 1.0).abs() < 1e-9);
    }
    let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
    let two = TsallisParams::new(2.0).unwrap();
    let (min, max) = min_max(&mixed, PureMeasure::Tsallis(two), 9);
    assert!(min.abs() < ORACLE_TOL);
    assert!(max >= min - 1e-9);
    assert!(max <= 0.5 + 1e-9);
}

#[test]
fn oracle_is_deterministic() {
    let rho = gwstates::group_pair_state(&example_spec(), &[0], &[2]).unwrap();
    let b = budget(11);
    let a = roof_optimize(&rho, &pair(), PureMeasure::Concurrence, Direction::Max, &b).unwrap();
    let c = roof_optimize(&rho, &pair(), PureMeasure::Concurrence, Direction::Max, &b).unwrap();
    assert_eq!(a.value.to_bits(), c.value.to_bits());
    assert_eq!(a.ensemble.weights, c.ensemble.weights);
}
