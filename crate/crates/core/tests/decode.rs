use proptest::prelude::*;
use sgdst_core::math::log_softmax;
use sgdst_core::mrc::{decode_span, MrcForward};

/// Every admissible (i, j), first maximum in row-major order.
fn brute_force(start: &[f64], end: &[f64], max_len: usize) -> Option<(usize, usize)> {
    let ls = log_softmax(start);
    let le = log_softmax(end);
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..start.len() {
        for j in 0..end.len() {
            if j < i || j - i >= max_len {
                continue;
            }
            let s = ls[i] + le[j];
            if best.is_none_or(|(b, _, _)| s > b) {
                best = Some((s, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

fn logits(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        prop::collection::vec(-4.0f64..4.0, n),
        // few distinct values, so ties are common
        prop::collection::vec((0i32..3).prop_map(f64::from), n),
    ]
}

fn case() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, usize)> {
    (1usize..=32).prop_flat_map(|n| (logits(n), logits(n), 1usize..=n + 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decode_matches_exhaustive_search((start, end, max_len) in case()) {
        let fwd = MrcForward::from_logits(start.clone(), end.clone(), 5.0);
        let got = decode_span(&fwd, max_len, 0.5).map(|p| (p.start, p.end));
        prop_assert_eq!(got, brute_force(&start, &end, max_len));
    }
}

#[test]
fn gate_below_threshold_abstains() {
    let fwd = MrcForward::from_logits(vec![1.0, 2.0], vec![0.0, 3.0], -1.0);
    assert_eq!(decode_span(&fwd, 4, 0.5), None);
}

#[test]
fn all_ties_pick_first_span() {
    let fwd = MrcForward::from_logits(vec![0.0; 5], vec![0.0; 5], 2.0);
    let p = decode_span(&fwd, 3, 0.5).unwrap();
    assert_eq!((p.start, p.end), (0, 0));
}
