//! Property-based tests: score invariants, partition laws and provider
//! equivalences over randomly generated inputs.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ccdp_core::corpus::Corpus;
use ccdp_core::ect::{build_ects, normalize_subject};
use ccdp_core::linker::find_links;
use ccdp_core::proximity::{global_proximity, time_proximity, ProximityConfig, SemanticContext};
use ccdp_core::semantic::{
    cosine_similarity, soft_cosine_similarity, ExactCosine, Tokenizer, WordRelationModel,
};

fn seeded_corpus(seed: u64, size: usize) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    common::random_corpus(&mut rng, size)
}

proptest! {
    #[test]
    fn global_proximity_is_bounded_and_symmetric(seed in any::<u64>()) {
        let corpus = seeded_corpus(seed, 8);
        let tokenizer = Tokenizer::default();
        let ctx = SemanticContext::new(&tokenizer, &ExactCosine);
        let cfg = ProximityConfig::default();
        let msgs = corpus.messages();
        for i in 0..msgs.len() {
            for j in (i + 1)..msgs.len() {
                let fwd = global_proximity(&msgs[i], &msgs[j], &cfg, &ctx);
                let rev = global_proximity(&msgs[j], &msgs[i], &cfg, &ctx);
                for v in [fwd.ip, fwd.tp, fwd.ssp, fwd.asp, fwd.csp, fwd.sp, fwd.gp] {
                    prop_assert!((0.0..=1.0).contains(&v), "out of range: {v}");
                }
                prop_assert_eq!(fwd.ip, rev.ip);
                prop_assert_eq!(fwd.tp, rev.tp);
                prop_assert_eq!(fwd.sp, rev.sp);
                prop_assert_eq!(fwd.gp, rev.gp);
            }
        }
    }

    #[test]
    fn ects_partition_the_corpus(seed in any::<u64>()) {
        let corpus = seeded_corpus(seed, 20);
        let ects = build_ects(&corpus);
        let mut seen: Vec<&str> = ects
            .iter()
            .flat_map(|e| e.message_ids.iter().map(String::as_str))
            .collect();
        let before = seen.len();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(before, seen.len(), "a message appears in two ECTs");
        prop_assert_eq!(seen.len(), corpus.len(), "a message is missing from the partition");
        // Stable under recomputation.
        prop_assert_eq!(&build_ects(&corpus), &ects);
    }

    #[test]
    fn soft_cosine_with_empty_model_equals_cosine(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let identity = WordRelationModel::new(4);
        for _ in 0..50 {
            let a = common::random_bag(&mut rng, 6);
            let b = common::random_bag(&mut rng, 6);
            let soft = soft_cosine_similarity(&a, &b, &identity);
            let exact = cosine_similarity(&a, &b);
            prop_assert!((soft - exact).abs() < 1e-12, "soft={soft} exact={exact}");
        }
    }

    #[test]
    fn normalize_subject_is_idempotent(raw in "\\PC{0,40}") {
        let once = normalize_subject(&raw);
        prop_assert_eq!(&normalize_subject(&once), &once);
    }

    #[test]
    fn reply_prefixes_normalize_away(subject in "[a-z]{2,8}( [a-z]{2,8}){0,3}") {
        for prefixed in [
            format!("RE: {subject}"),
            format!("re: RE: {subject}"),
            format!("FW: {subject}"),
            format!("Fwd: {subject}"),
            format!("TR: {subject}"),
            format!("RE[4]: {subject}"),
        ] {
            prop_assert_eq!(&normalize_subject(&prefixed), &subject);
        }
    }

    #[test]
    fn time_proximity_is_bounded_and_decreasing(
        d1 in 0.0_f64..10_000.0,
        d2 in 0.0_f64..10_000.0,
        k in 1.0_f64..1_000.0,
    ) {
        let base = chrono::Utc::now();
        let near = base + chrono::Duration::seconds((d1.min(d2) * 3600.0) as i64);
        let far = base + chrono::Duration::seconds((d1.max(d2) * 3600.0) as i64);
        let tp_near = time_proximity(base, near, k);
        let tp_far = time_proximity(base, far, k);
        prop_assert!((0.0..=1.0).contains(&tp_near));
        prop_assert!(tp_near >= tp_far, "TP must not grow with distance");
        prop_assert_eq!(time_proximity(base, near, k), time_proximity(near, base, k));
    }

    #[test]
    fn links_shrink_as_threshold_grows(seed in any::<u64>()) {
        let corpus = seeded_corpus(seed, 15);
        let ects = build_ects(&corpus);
        let tokenizer = Tokenizer::default();
        let ctx = SemanticContext::new(&tokenizer, &ExactCosine);
        let mut previous = usize::MAX;
        for threshold in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let cfg = ProximityConfig { threshold, ..ProximityConfig::default() };
            let links = find_links(&corpus, &ects, &cfg, &ctx);
            prop_assert!(links.len() <= previous);
            previous = links.len();
        }
    }
}
