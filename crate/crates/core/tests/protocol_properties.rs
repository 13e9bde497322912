//! Statistical and structural properties of full protocol runs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rsp_core::{
    check_locality, measure_qudit, outcome_probabilities, partial_trace, random_channel,
    random_channel_of_rank, random_target, run_conventional_rsp, run_optimal_drsp, sample_counts,
    stream_rng, ChannelState, Label, ProtocolKind, TargetState, theoretical_success_probability,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn fidelity_is_one_for_random_channels_and_targets() {
    for d in [2usize, 3, 4, 5] {
        let mut rng = stream_rng(1000 + d as u64, 0);
        for trial in 0..50u64 {
            let channel = random_channel(d, &mut rng).unwrap();
            let target = random_target(d, &mut rng).unwrap();
            let result = run_optimal_drsp(&channel, &target, trial).unwrap();
            assert!(
                (result.fidelity_to_target - 1.0).abs() < 1e-9,
                "d={d} trial={trial} fidelity={}",
                result.fidelity_to_target
            );
            check_locality(&result);
        }
    }
}

#[test]
fn fidelity_is_one_for_rank_deficient_channels() {
    for d in [2usize, 3, 5, 8] {
        let mut rng = stream_rng(2000 + d as u64, 0);
        for rank in 1..=d {
            let channel = random_channel_of_rank(d, rank, &mut rng).unwrap();
            let target = random_target(d, &mut rng).unwrap();
            let result = run_optimal_drsp(&channel, &target, rank as u64).unwrap();
            assert!(
                (result.fidelity_to_target - 1.0).abs() < 1e-9,
                "d={d} rank={rank} fidelity={}",
                result.fidelity_to_target
            );
        }
    }
}

#[test]
fn fidelity_survives_entangling_right_factors() {
    // A channel whose right Schmidt basis is a Hadamard rotation exercises
    // the receiver-side correction: diag(0.6, 0.8) · H.
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let coeffs = DMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.6 * h, 0.0),
            c(0.6 * h, 0.0),
            c(0.8 * h, 0.0),
            c(-0.8 * h, 0.0),
        ],
    );
    let channel = ChannelState::new(coeffs).unwrap();
    let mut rng = stream_rng(404, 0);
    for trial in 0..20u64 {
        let target = random_target(2, &mut rng).unwrap();
        let result = run_optimal_drsp(&channel, &target, trial).unwrap();
        assert!(
            (result.fidelity_to_target - 1.0).abs() < 1e-10,
            "trial={trial} fidelity={}",
            result.fidelity_to_target
        );
    }
}

#[test]
fn ancilla_outcomes_follow_channel_weights() {
    let channel = ChannelState::from_diagonal(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
    let target = TargetState::new(vec![c(0.6, 0.0), Complex64::from_polar(0.8, 0.5)]).unwrap();
    let runs = 2000u64;
    let mut counts = [0u64; 2];
    for seed in 0..runs {
        let result = run_optimal_drsp(&channel, &target, seed).unwrap();
        let m = result.outcomes[&Label::C];
        counts[m] += 1;
        assert_eq!(result.outcomes[&Label::A], (2 - m) % 2);
        assert!((result.fidelity_to_target - 1.0).abs() < 1e-9);
    }
    assert!(counts[0] > 0 && counts[1] > 0);
    let expected = [0.36 * runs as f64, 0.64 * runs as f64];
    let chi2: f64 = counts
        .iter()
        .zip(&expected)
        .map(|(&obs, &exp)| (obs as f64 - exp).powi(2) / exp)
        .sum();
    let bound = ChiSquared::new(1.0).unwrap().inverse_cdf(0.99);
    assert!(chi2 < bound, "chi2={chi2} bound={bound}");
}

#[test]
fn qutrit_outcome_distribution_matches_weights() {
    let channel =
        ChannelState::from_diagonal(&[c(0.48, 0.0), c(0.6, 0.0), c(0.64, 0.0)]).unwrap();
    let mut rng = stream_rng(7, 0);
    let target = random_target(3, &mut rng).unwrap();
    let runs = 3000u64;
    let mut counts = [0u64; 3];
    for seed in 0..runs {
        let result = run_optimal_drsp(&channel, &target, seed).unwrap();
        let m = result.outcomes[&Label::C];
        counts[m] += 1;
        assert_eq!(result.outcomes[&Label::A], (3 - m) % 3);
    }
    let probs = [0.48f64 * 0.48, 0.6 * 0.6, 0.64 * 0.64];
    let chi2: f64 = counts
        .iter()
        .zip(&probs)
        .map(|(&obs, &p)| {
            let exp = p * runs as f64;
            (obs as f64 - exp).powi(2) / exp
        })
        .sum();
    let bound = ChiSquared::new(2.0).unwrap().inverse_cdf(0.99);
    assert!(chi2 < bound, "chi2={chi2} bound={bound}");
}

#[test]
fn conventional_success_rate_tracks_theory() {
    let channel = ChannelState::from_diagonal(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
    let target = TargetState::new(vec![c(0.8, 0.0), c(0.0, -0.6)]).unwrap();
    let p = theoretical_success_probability(ProtocolKind::Conventional, &channel).unwrap();
    assert!((p - 0.72).abs() < 1e-12);

    let runs = 2000u64;
    let mut successes = 0u64;
    for seed in 0..runs {
        let result = run_conventional_rsp(&channel, &target, seed).unwrap();
        if result.succeeded {
            successes += 1;
            assert!((result.fidelity_to_target - 1.0).abs() < 1e-9);
        }
    }
    let freq = successes as f64 / runs as f64;
    let sigma = (p * (1.0 - p) / runs as f64).sqrt();
    assert!(
        (freq - p).abs() < 4.0 * sigma,
        "freq={freq} expected={p} sigma={sigma}"
    );
}

#[test]
fn conventional_success_rate_for_skewed_channels() {
    // strongly non-maximal channel: success should be rare but fidelity
    // still perfect when it happens
    let alpha = 0.2f64;
    let beta = (1.0 - alpha * alpha).sqrt();
    let channel = ChannelState::from_diagonal(&[c(alpha, 0.0), c(beta, 0.0)]).unwrap();
    let target = TargetState::new(vec![c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
    let p = theoretical_success_probability(ProtocolKind::Conventional, &channel).unwrap();
    assert!((p - 2.0 * alpha * alpha).abs() < 1e-12);

    let runs = 3000u64;
    let mut successes = 0u64;
    for seed in 0..runs {
        let result = run_conventional_rsp(&channel, &target, seed).unwrap();
        if result.succeeded {
            successes += 1;
            assert!((result.fidelity_to_target - 1.0).abs() < 1e-9);
        }
    }
    let freq = successes as f64 / runs as f64;
    let sigma = (p * (1.0 - p) / runs as f64).sqrt();
    assert!(
        (freq - p).abs() < 4.0 * sigma,
        "freq={freq} expected={p} sigma={sigma}"
    );
}

#[test]
fn deterministic_protocol_beats_conventional_on_every_channel() {
    let mut rng = stream_rng(606, 0);
    for _ in 0..30 {
        let channel = random_channel(2, &mut rng).unwrap();
        let p_conv =
            theoretical_success_probability(ProtocolKind::Conventional, &channel).unwrap();
        let p_det =
            theoretical_success_probability(ProtocolKind::OptimalDeterministic, &channel).unwrap();
        assert!(p_det >= p_conv - 1e-12);
        assert!((0.0..=1.0 + 1e-12).contains(&p_conv));
    }
}

#[test]
fn receiver_state_is_outcome_independent() {
    // Collapse the pre-measurement snapshot onto every (C, A) outcome pair
    // by hand; the receiver's reduced state must not depend on the pair.
    let mut rng = stream_rng(707, 0);
    for d in [2usize, 3, 4] {
        let channel = random_channel(d, &mut rng).unwrap();
        let target = random_target(d, &mut rng).unwrap();
        let result = run_optimal_drsp(&channel, &target, 0).unwrap();
        let pre = result.trace.last().unwrap();

        let mut reference: Option<DMatrix<Complex64>> = None;
        let c_probs = outcome_probabilities(pre, 2).unwrap();
        let mut c_cum = 0.0;
        for (m_c, &p_c) in c_probs.iter().enumerate() {
            if p_c > 1e-12 {
                let draw_c = c_cum + p_c / 2.0;
                let (got_c, _, after_c) = measure_qudit(pre, 2, draw_c).unwrap();
                assert_eq!(got_c, m_c);
                let a_probs = outcome_probabilities(&after_c, 0).unwrap();
                let mut a_cum = 0.0;
                for (m_a, &p_a) in a_probs.iter().enumerate() {
                    if p_a > 1e-12 {
                        let draw_a = a_cum + p_a / 2.0;
                        let (got_a, _, after_a) = measure_qudit(&after_c, 0, draw_a).unwrap();
                        assert_eq!(got_a, m_a);
                        let rho = partial_trace(&after_a, 1).unwrap();
                        match &reference {
                            None => reference = Some(rho.matrix().clone()),
                            Some(base) => {
                                let dev = (rho.matrix() - base)
                                    .iter()
                                    .map(|z| z.norm())
                                    .fold(0.0, f64::max);
                                assert!(
                                    dev < 1e-10,
                                    "d={d} outcomes ({m_c},{m_a}) deviate by {dev:.3e}"
                                );
                            }
                        }
                    }
                    a_cum += p_a;
                }
            }
            c_cum += p_c;
        }
    }
}

#[test]
fn final_outcome_histogram_matches_amplitudes() {
    // 1e5 sampled measurements of the pre-measurement snapshot, C then A,
    // against the squared amplitudes of its sender-side factor.
    let channel =
        ChannelState::from_diagonal(&[c(0.48, 0.0), c(0.6, 0.0), c(0.64, 0.0)]).unwrap();
    let target = TargetState::new(vec![c(0.36, 0.0), c(0.0, 0.48), c(0.8, 0.0)]).unwrap();
    let result = run_optimal_drsp(&channel, &target, 0).unwrap();
    let pre = result.trace.last().unwrap().clone();

    let shots = 100_000u64;
    let histogram = sample_counts(|| pre.clone(), &[2, 0], shots, 4242).unwrap();
    // outcome C = m pairs with A = (3 - m) mod 3
    let expected = [(vec![0usize, 0usize], 0.48f64), (vec![1, 2], 0.6), (vec![2, 1], 0.64)];
    let mut chi2 = 0.0;
    let mut seen = 0u64;
    for (outcome, amp) in &expected {
        let want = amp * amp * shots as f64;
        let got = histogram.count(outcome) as f64;
        chi2 += (got - want).powi(2) / want;
        seen += histogram.count(outcome);
    }
    assert_eq!(seen, shots, "only the paired outcomes may occur");
    let limit = ChiSquared::new(2.0).unwrap().inverse_cdf(0.99);
    assert!(chi2 < limit, "chi2={chi2} limit={limit}");
}
