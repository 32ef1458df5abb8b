mod common;

use axiomforge::corpus;
use axiomforge::distance::{hybrid_rank, lev_rank, levenshtein, query_bound, semantic_rank, DistanceOracle};
use axiomforge::pddl::{parse_domain, print_canonical};
use proptest::prelude::*;

fn small_string() -> impl Strategy<Value = String> {
    prop::string::string_regex("[abc()? é]{0,24}").unwrap()
}

fn distinct_strings() -> impl Strategy<Value = Vec<String>> {
    prop::collection::btree_set("[a-e]{0,10}", 0..40).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn levenshtein_is_a_metric(a in small_string(), b in small_string(), c in small_string()) {
        let ab = levenshtein(&a, &b);
        prop_assert_eq!(levenshtein(&a, &a), 0);
        prop_assert_eq!(ab == 0, a == b);
        prop_assert_eq!(ab, levenshtein(&b, &a));
        prop_assert!(levenshtein(&a, &c) <= ab + levenshtein(&b, &c));
        prop_assert_eq!(ab, common::naive_levenshtein(&a, &b));
    }
}

proptest! {
    #[test]
    fn levenshtein_bounded_by_lengths(a in small_string(), b in small_string()) {
        let (la, lb) = (a.chars().count(), b.chars().count());
        let d = levenshtein(&a, &b);
        prop_assert!(d >= la.abs_diff(lb));
        prop_assert!(d <= la.max(lb));
    }

    #[test]
    fn semantic_rank_is_a_sorted_permutation(reference in "[a-e]{0,10}", items in distinct_strings()) {
        let oracle = DistanceOracle::levenshtein_mock();
        let ranked = semantic_rank(&reference, &items, &oracle).unwrap();
        let mut seen = ranked.order.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..items.len()).collect::<Vec<_>>());
        prop_assert_eq!(&ranked.order, &lev_rank(&reference, &items).order);
        prop_assert!(ranked.queries_used <= query_bound(items.len()));
    }

    #[test]
    fn hybrid_rank_keeps_every_candidate(reference in "[a-e]{0,10}", items in distinct_strings(), keep in 0usize..50) {
        let oracle = DistanceOracle::levenshtein_mock();
        let ranked = hybrid_rank(&reference, &items, keep, &oracle).unwrap();
        let mut seen = ranked.order.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..items.len()).collect::<Vec<_>>());
        let kept = keep.clamp(1, items.len().max(1)).min(items.len());
        prop_assert!(ranked.queries_used <= query_bound(kept));
    }

    #[test]
    fn canonical_form_ignores_layout(index in 0usize..12, seed in any::<u64>()) {
        let text = corpus::domain_text(corpus::NAMES[index]).unwrap();
        let mut state = seed;
        let mut noisy = String::new();
        for ch in text.chars() {
            if ch.is_whitespace() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                noisy.push_str(["\n", "  ", "\t ", " ; note\n"][(state >> 62) as usize]);
            } else {
                noisy.push(ch);
            }
        }
        let canonical = print_canonical(&parse_domain(text).unwrap());
        let reparsed = print_canonical(&parse_domain(&noisy).unwrap());
        prop_assert_eq!(&canonical, &reparsed);
        prop_assert_eq!(print_canonical(&parse_domain(&canonical).unwrap()), canonical);
    }
}
