mod common;

use common::{phase_distance, pol_ket, random_real_strategy, random_strategy, rng};
use num_complex::Complex64;
use photon_arena::circuits::{pd_closed_form, run_pd, run_zs, target_state, zs_circuit, Strategy};
use photon_arena::detection::outcome_distribution;
use photon_arena::fock::PhotonPattern;
use photon_arena::optics::{pbs_with, PbsConvention};
use photon_arena::{FockState, PolarizedMode, StateVector};

#[test]
fn pd_output_matches_closed_form_for_random_strategies() {
    let mut r = rng(1);
    for _ in 0..100 {
        let (a, b) = (random_strategy(&mut r), random_strategy(&mut r));
        let out = run_pd(&a, &b).unwrap().output.unwrap();
        let expected = pd_closed_form(&a, &b).unwrap();
        assert!(out.max_amplitude_diff(&expected) <= 1e-12);
        assert!((out.inner_product(&expected).unwrap().norm() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn pd_probabilities_ignore_phases() {
    let mut r = rng(2);
    for _ in 0..50 {
        let (a, b) = (random_strategy(&mut r), random_strategy(&mut r));
        let real_a = Strategy::from_probability(a.probability()).unwrap();
        let real_b = Strategy::from_probability(b.probability()).unwrap();
        let d1 = outcome_distribution(&run_pd(&a, &b).unwrap().pre_selection);
        let d2 = outcome_distribution(&run_pd(&real_a, &real_b).unwrap().pre_selection);
        assert_eq!(d1.len(), d2.len());
        for ((r1, p1), (r2, p2)) in d1.iter().zip(&d2) {
            assert_eq!(r1, r2);
            assert!((p1 - p2).abs() <= 1e-12);
        }
    }
}

#[test]
fn only_transmit_h_convention_gives_the_closed_form() {
    // With V transmitting, |H>|V> would land at Bob instead of Alice.
    let h = StateVector::basis(FockState::from_photons(2, &[PolarizedMode::h(0), PolarizedMode::v(1)]).unwrap());
    let alt = pbs_with(2, 0, 1, PbsConvention::TransmitV).unwrap().apply(&h).unwrap();
    let closed = pd_closed_form(&Strategy::h(), &Strategy::v()).unwrap();
    assert!(alt.max_amplitude_diff(&closed) > 0.5);
    let out = run_pd(&Strategy::h(), &Strategy::v()).unwrap().output.unwrap();
    assert!(out.max_amplitude_diff(&closed) <= 1e-12);
}

#[test]
fn zs_with_balanced_ancillas_matches_target() {
    let mut r = rng(3);
    let b = Strategy::balanced();
    for _ in 0..100 {
        let (pa, pc) = (random_strategy(&mut r), random_strategy(&mut r));
        let run = run_zs(&pa, &b, &pc, &b).unwrap();
        let out = run.output.unwrap();
        let target = target_state(&pa, &pc).unwrap();
        assert!(phase_distance(&out, &target) <= 1e-12);
        assert!((run.success_probability - 0.25).abs() <= 1e-12);
    }
}

#[test]
fn zs_success_plus_rejected_branch_is_one() {
    let mut r = rng(4);
    let pattern = PhotonPattern::one_per_mode(4);
    for _ in 0..100 {
        let s: Vec<Strategy> = (0..4).map(|_| random_strategy(&mut r)).collect();
        let run = run_zs(&s[0], &s[1], &s[2], &s[3]).unwrap();
        let total = run.success_probability + run.failure_probability(&pattern);
        assert!((total - 1.0).abs() <= 1e-10);
        assert!(run.pre_selection.is_normalized());
    }
}

#[test]
fn zs_general_ancillas_give_product_of_fusions() {
    // kept branch = (a α|HH> + b β|VV>)_{13} ⊗ (c γ|HH> + d δ|VV>)_{24}
    let mut r = rng(5);
    for _ in 0..50 {
        let s: Vec<Strategy> = (0..4).map(|_| random_strategy(&mut r)).collect();
        let run = run_zs(&s[0], &s[1], &s[2], &s[3]).unwrap();
        let a_h = s[0].first() * s[1].first();
        let a_v = s[0].second() * s[1].second();
        let b_h = s[2].first() * s[3].first();
        let b_v = s[2].second() * s[3].second();
        let expected = StateVector::from_terms(
            4,
            [
                (pol_ket("HHHH"), a_h * b_h),
                (pol_ket("HVHV"), a_h * b_v),
                (pol_ket("VHVH"), a_v * b_h),
                (pol_ket("VVVV"), a_v * b_v),
            ],
        )
        .unwrap();
        let p = expected.norm_sqr();
        assert!((run.success_probability - p).abs() <= 1e-12);
        let out = run.output.unwrap();
        assert!(out.max_amplitude_diff(&expected.normalized().unwrap()) <= 1e-12);
    }
}

#[test]
fn zs_kept_branch_has_only_paired_terms() {
    // Outputs 1 and 3 always agree, as do 2 and 4; kets such as VHVV never
    // appear in the kept branch whatever the inputs.
    let mut r = rng(6);
    let allowed = ["HHHH", "HVHV", "VHVH", "VVVV"];
    for _ in 0..50 {
        let s: Vec<Strategy> = (0..4).map(|_| random_strategy(&mut r)).collect();
        let out = run_zs(&s[0], &s[1], &s[2], &s[3]).unwrap().output.unwrap();
        for (k, _) in out.terms() {
            assert!(allowed.iter().any(|a| pol_ket(a) == *k), "unexpected {k}");
        }
        assert_eq!(out.amplitude(&pol_ket("VHVV")), Complex64::default());
    }
}

#[test]
fn zs_pairs_are_perfectly_correlated() {
    let mut r = rng(7);
    let b = Strategy::balanced();
    for _ in 0..100 {
        let (pa, pc) = (random_real_strategy(&mut r), random_real_strategy(&mut r));
        let out = run_zs(&pa, &b, &pc, &b).unwrap().output.unwrap();
        let disagree: f64 = outcome_distribution(&out)
            .iter()
            .filter(|(rec, _)| {
                let p: Vec<_> = rec.outputs.iter().map(|c| c.single().unwrap()).collect();
                p[0] != p[2] || p[1] != p[3]
            })
            .map(|(_, p)| p)
            .sum();
        assert!(disagree <= 1e-12);
    }
}

#[test]
fn fusion_circuit_serializes() {
    let b = Strategy::balanced();
    let c = zs_circuit(&b, &b, &b, &b);
    let text = serde_json::to_string(&c).unwrap();
    let back: photon_arena::optics::Circuit = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
    assert_eq!(back.post_select, Some(vec![Some(1); 4]));
}
