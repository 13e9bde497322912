//! Golden transcripts and locality replay for full protocol runs.

use num_complex::Complex64;
use rsp_core::{
    assert_locality, run_conventional_rsp, run_optimal_drsp, ChannelState, Label, TargetState,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn channel() -> ChannelState {
    ChannelState::from_diagonal(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap()
}

fn target() -> TargetState {
    TargetState::new(vec![c(0.6, 0.0), Complex64::from_polar(0.8, 1.0)]).unwrap()
}

#[test]
fn drsp_transcript_golden() {
    let result = run_optimal_drsp(&channel(), &target(), 0).unwrap();
    let expected = "1\talice\tgate\tA\tschmidt-correction\n\
                    2\tbob\tgate\tB\tschmidt-correction\n\
                    3\talice\tgate\tA,C\tcontrolled-add\n\
                    4\talice\tgate\tA\tcompletion\n\
                    5\talice\tgate\tA,C\tbranch-controlled\n\
                    6\talice\ttransmission\tA\tA\n\
                    7\tbob\tgate\tA,B\tcontrolled-add\n\
                    8\tbob\tgate\tB,A\tcontrolled-subtract\n\
                    9\talice\tmeasurement\tC\t1\n\
                    10\talice\tclassical-message\tC\t1\n\
                    11\tbob\tmeasurement\tA\t1\n";
    assert_eq!(result.ledger.serialize_transcript(), expected);
    assert_eq!(result.outcomes[&Label::C], 1);
    assert_eq!(result.outcomes[&Label::A], 1);
}

#[test]
fn conventional_transcript_golden_on_success() {
    let result = run_conventional_rsp(&channel(), &target(), 5).unwrap();
    assert!(result.succeeded);
    let expected = "1\talice\tgate\tA\tschmidt-correction\n\
                    2\tbob\tgate\tB\tschmidt-correction\n\
                    3\talice\tgate\tA,C\tcontrolled-add\n\
                    4\talice\tgate\tA,C\tfilter\n\
                    5\talice\tgate\tA,C\tcontrolled-add\n\
                    6\talice\tmeasurement\tC\t0\n\
                    7\talice\tclassical-message\tC\t0\n\
                    8\talice\tgate\tA,C\tcontrolled-add\n\
                    9\talice\tgate\tA\tcompletion\n\
                    10\talice\tgate\tA,C\tbranch-controlled\n\
                    11\talice\ttransmission\tA\tA\n\
                    12\tbob\tgate\tA,B\tcontrolled-add\n\
                    13\tbob\tgate\tB,A\tcontrolled-subtract\n\
                    14\talice\tmeasurement\tC\t0\n\
                    15\talice\tclassical-message\tC\t0\n\
                    16\tbob\tmeasurement\tA\t0\n";
    assert_eq!(result.ledger.serialize_transcript(), expected);
}

#[test]
fn conventional_transcript_golden_on_failure() {
    let result = run_conventional_rsp(&channel(), &target(), 2).unwrap();
    assert!(!result.succeeded);
    let expected = "1\talice\tgate\tA\tschmidt-correction\n\
                    2\tbob\tgate\tB\tschmidt-correction\n\
                    3\talice\tgate\tA,C\tcontrolled-add\n\
                    4\talice\tgate\tA,C\tfilter\n\
                    5\talice\tgate\tA,C\tcontrolled-add\n\
                    6\talice\tmeasurement\tC\t1\n\
                    7\talice\tclassical-message\tC\t1\n";
    assert_eq!(result.ledger.serialize_transcript(), expected);
}

#[test]
fn transcripts_replay_locally_across_seeds_and_dimensions() {
    use rsp_core::{random_channel, random_target, stream_rng};
    for d in [2usize, 3, 4] {
        let mut rng = stream_rng(900 + d as u64, 0);
        for trial in 0..12u64 {
            let ch = random_channel(d, &mut rng).unwrap();
            let t = random_target(d, &mut rng).unwrap();
            let result = run_optimal_drsp(&ch, &t, trial).unwrap();
            let report = assert_locality(&result.ledger);
            assert!(report.is_local(), "violations: {:?}", report.violations);
            assert_eq!(report.checked_events, result.ledger.events().len());
        }
    }
    for seed in 0..12u64 {
        let result = run_conventional_rsp(&channel(), &target(), seed).unwrap();
        assert!(assert_locality(&result.ledger).is_local());
    }
}

#[test]
fn sender_never_touches_receiver_half() {
    use rsp_core::{EventKind, Party};
    let result = run_optimal_drsp(&channel(), &target(), 3).unwrap();
    for event in result.ledger.events() {
        if event.party == Party::Alice {
            match &event.kind {
                EventKind::Gate { subsystems, .. } => {
                    assert!(!subsystems.contains(&Label::B));
                }
                EventKind::Measurement { subsystem, .. } => {
                    assert_ne!(*subsystem, Label::B);
                }
                _ => {}
            }
        }
    }
}
