use proptest::prelude::*;
use sgdst_core::metrics::{fuzzy_score, levenshtein};
use sgdst_core::numerals::{number_to_words, to_arabic, MAX_VALUE};
use sgdst_core::text::{mask_phone_numbers, tokenize_with_offsets};

fn text_strategy() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            "[a-zA-Z]{1,8}",
            "[0-9]{1,9}",
            Just(" ".to_string()),
            Just("  ".to_string()),
            "[-,.?!()$:'/]",
            "[éüßçñ]{1,3}",
            Just("\t".to_string()),
        ],
        0..24,
    )
    .prop_map(|parts| parts.concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn tokens_slice_back_out_of_the_text(text in text_strategy()) {
        let t = tokenize_with_offsets(&text);
        prop_assert_eq!(t.tokens.len(), t.offsets.len());
        let mut covered = vec![false; text.len()];
        let mut prev_end = 0;
        for (tok, &(s, e)) in t.tokens.iter().zip(&t.offsets) {
            prop_assert!(s < e && prev_end <= s);
            prop_assert_eq!(&text[s..e].to_lowercase(), tok);
            covered[s..e].iter_mut().for_each(|c| *c = true);
            prev_end = e;
        }
        for (i, c) in text.char_indices() {
            if !covered[i] {
                prop_assert!(c.is_whitespace(), "dropped {:?}", c);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn phone_masking_is_idempotent(text in text_strategy()) {
        let once = mask_phone_numbers(&text);
        prop_assert_eq!(mask_phone_numbers(&once), once);
    }

    #[test]
    fn short_digit_runs_survive(parts in prop::collection::vec(("[a-z]{1,6}", "[0-9]{1,4}"), 0..8)) {
        let text: String = parts.iter().map(|(w, d)| format!("{w} {d} ")).collect();
        prop_assert_eq!(mask_phone_numbers(&text), text);
    }

    #[test]
    fn fuzzy_score_is_symmetric_and_bounded(a in "[a-zA-Z ]{0,12}", b in "[a-zA-Z ]{0,12}") {
        let ab = fuzzy_score(&a, &b);
        prop_assert_eq!(ab, fuzzy_score(&b, &a));
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(levenshtein(&a, &b), strsim::levenshtein(&a, &b));
    }
}

#[test]
fn numerals_round_trip_in_both_forms() {
    for n in 0..=MAX_VALUE {
        let words = number_to_words(n).unwrap();
        assert_eq!(to_arabic(&words).as_deref(), Some(n.to_string().as_str()), "{words}");
        assert_eq!(to_arabic(&n.to_string()).as_deref(), Some(n.to_string().as_str()));
    }
}

#[test]
fn seven_digit_groups_are_masked() {
    assert_eq!(mask_phone_numbers("call 415-555-0132 now"), "call phone now");
    assert_eq!(mask_phone_numbers("room 1234, code 5678"), "room 1234, code 5678");
}
