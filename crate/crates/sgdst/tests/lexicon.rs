use std::collections::BTreeSet;

use sgdst_core::augment::{build_lexicon, CachedProvider, ExpansionProvider, ProviderKind};

fn providers() -> Vec<CachedProvider> {
    let schema = sgdst::synth::schema();
    sgdst::synth::provider_caches(&schema)
        .into_iter()
        .map(|(name, text)| CachedProvider::parse(name, ProviderKind::SynonymApi, &text).unwrap())
        .collect()
}

fn pairs(k: usize) -> BTreeSet<(String, String)> {
    let ps = providers();
    let refs: Vec<&dyn ExpansionProvider> = ps.iter().map(|p| p as &dyn ExpansionProvider).collect();
    let lex = build_lexicon(&sgdst::synth::schema(), &refs, k).unwrap();
    lex.terms().flat_map(|t| lex.lookup(t).into_iter().map(move |s| (t.to_string(), s.to_string()))).collect()
}

#[test]
fn lexicon_grows_with_k() {
    let mut prev = pairs(0);
    assert!(prev.is_empty());
    for k in 1..=10 {
        let cur = pairs(k);
        assert!(prev.is_subset(&cur), "k={k}");
        prev = cur;
    }
}

#[test]
fn lexicon_is_reproducible() {
    assert_eq!(pairs(10), pairs(10));
    let theater: BTreeSet<String> =
        pairs(10).into_iter().filter(|(t, _)| t == "theater").map(|(_, s)| s).collect();
    for s in ["broadway", "drama", "stage"] {
        assert!(theater.contains(s), "{s}");
    }
}

#[test]
fn missing_term_fails_loudly() {
    let p = CachedProvider::parse("empty", ProviderKind::SynonymApi, "").unwrap();
    let err = build_lexicon(&sgdst::synth::schema(), &[&p], 10).unwrap_err();
    assert!(err.to_string().contains("empty"));
}
