//! Example abstraction: per-example transform-and-compress into a
//! [`MetaParam`] (the map stage), grouping into a [`ClusterTable`] and
//! longest-common-subsequence extraction (the merge stage).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::types::{ClusterEntry, ClusterTable, Example, MetaParam};

/// Symbol for CJK unified ideographs.
pub const SYM_CJK: char = 'z';
pub const SYM_LOWER: char = 'x';
pub const SYM_UPPER: char = 'X';
pub const SYM_DIGIT: char = 'd';

const MERGE_CHUNK: usize = 1024;

pub fn is_cjk(c: char) -> bool {
    ('\u{4E00}'..='\u{9FFF}').contains(&c)
}

/// Maps one character to its abstract symbol; anything outside the four
/// classes is kept as a literal.
pub fn transform_char(c: char) -> char {
    match c {
        _ if is_cjk(c) => SYM_CJK,
        'a'..='z' => SYM_LOWER,
        'A'..='Z' => SYM_UPPER,
        '0'..='9' => SYM_DIGIT,
        other => other,
    }
}

/// Abstracts a string and collapses runs of identical symbols.
///
/// `"SMS_123456"` becomes `"X_d"`.
pub fn transform_and_compress(raw: &str) -> Result<MetaParam> {
    if raw.is_empty() {
        return Err(Error::InvalidExample("empty string has no metaparam".into()));
    }
    Ok(MetaParam::from_symbols(raw.chars().map(transform_char)))
}

/// Suffix LCS lengths: `table[i * (m + 1) + j]` is the LCS length of `a[i..]` and `b[j..]`.
fn suffix_table(a: &[char], b: &[char]) -> Vec<u32> {
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    let mut t = vec![0u32; (n + 1) * w];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            t[i * w + j] = if a[i] == b[j] {
                t[(i + 1) * w + j + 1] + 1
            } else {
                t[(i + 1) * w + j].max(t[i * w + j + 1])
            };
        }
    }
    t
}

/// Match positions `(i, j)` of a longest common subsequence of `a` and `b`.
///
/// Among all maximal alignments this returns the one whose positions in `a`
/// are lexicographically smallest, with the earliest compatible position in
/// `b` for each.
pub fn lcs_alignment(a: &[char], b: &[char]) -> Vec<(usize, usize)> {
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    let t = suffix_table(a, b);
    let mut out = Vec::with_capacity(t[0] as usize);
    let (mut i, mut j) = (0, 0);
    let mut need = t[0];
    while need > 0 {
        let mut picked = None;
        'scan: for ii in i..n {
            // the first occurrence in b dominates later ones, since suffix
            // lengths never increase with j
            if let Some(jj) = (j..m).find(|&jj| b[jj] == a[ii]) {
                if t[(ii + 1) * w + jj + 1] + 1 == need {
                    picked = Some((ii, jj));
                    break 'scan;
                }
            }
        }
        let (ii, jj) = picked.expect("suffix table guarantees a continuation");
        out.push((ii, jj));
        i = ii + 1;
        j = jj + 1;
        need -= 1;
    }
    out
}

pub fn lcs_pair(a: &str, b: &str) -> String {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    lcs_alignment(&a, &b).into_iter().map(|(i, _)| a[i]).collect()
}

/// Left fold of [`lcs_pair`] over `strings` in the given order.
///
/// The result is a common subsequence of every input but not necessarily the
/// longest one: exact multi-string LCS is NP-hard.
pub fn common_subsequence<S: AsRef<str>>(strings: &[S]) -> Option<String> {
    let (first, rest) = strings.split_first()?;
    let mut acc = first.as_ref().to_string();
    for s in rest {
        if acc.is_empty() {
            break;
        }
        acc = lcs_pair(&acc, s.as_ref());
    }
    Some(acc)
}

/// Corpus-level common subsequence in canonical (sorted, deduplicated)
/// order. Exposed as a diagnostic only; templates use per-cluster values.
pub fn corpus_subsequence(examples: &[Example]) -> Option<String> {
    let mut raws: Vec<&str> = examples.iter().map(|e| e.raw.as_str()).collect();
    raws.sort_unstable();
    raws.dedup();
    common_subsequence(&raws)
}

impl ClusterTable {
    /// Combines two partial tables. Associative and commutative, so any
    /// partitioning of the map stage yields the same table.
    pub fn merge(mut self, other: ClusterTable) -> ClusterTable {
        self.total += other.total;
        for (key, entry) in other.entries {
            let slot = self.entries.entry(key).or_default();
            slot.frequency += entry.frequency;
            slot.members.extend(entry.members);
            slot.members.sort_unstable();
        }
        self
    }

    fn from_pairs(pairs: Vec<(MetaParam, String)>) -> ClusterTable {
        let mut entries: BTreeMap<MetaParam, ClusterEntry> = BTreeMap::new();
        let total = pairs.len();
        for (key, raw) in pairs {
            let e = entries.entry(key).or_default();
            e.frequency += 1;
            e.members.push(raw);
        }
        for e in entries.values_mut() {
            e.members.sort_unstable();
        }
        ClusterTable { entries, total }
    }
}

/// Groups examples by MetaParam.
pub fn build_cluster_table(examples: &[Example], exec: Execution) -> Result<ClusterTable> {
    let chunks: Vec<&[Example]> = examples.chunks(MERGE_CHUNK).collect();
    let partials = par::try_map(exec, &chunks, |chunk| {
        chunk
            .iter()
            .map(|ex| Ok((transform_and_compress(&ex.raw)?, ex.raw.clone())))
            .collect::<Result<Vec<_>>>()
            .map(ClusterTable::from_pairs)
    })?;
    Ok(partials
        .into_iter()
        .fold(ClusterTable::default(), ClusterTable::merge))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn examples(raws: &[&str]) -> Vec<Example> {
        raws.iter().map(|r| Example::new(*r).unwrap()).collect()
    }

    /// Per-character class oracle written independently of `transform_char`.
    fn class_oracle(c: char) -> char {
        if c.is_ascii_digit() {
            'd'
        } else if c.is_ascii_lowercase() {
            'x'
        } else if c.is_ascii_uppercase() {
            'X'
        } else if (0x4E00..=0x9FFF).contains(&(c as u32)) {
            'z'
        } else {
            c
        }
    }

    #[test]
    fn transform_examples() {
        let t = |s| transform_and_compress(s).unwrap().as_str().to_string();
        assert_eq!(t("SMS_123456"), "X_d");
        assert_eq!(t("123"), "d");
        assert_eq!(t("a"), "x");
        assert_eq!(t("ab-你好--7"), "x-z-d");
        assert_eq!(t("你好2024"), "zd");
        // accented Latin is a reserved literal
        assert_eq!(t("café"), "xé");
    }

    #[test]
    fn oracle_agrees_on_mixed_string() {
        let raw = "ab-你好--7";
        let mut expected: Vec<char> = raw.chars().map(class_oracle).collect();
        expected.dedup();
        let expected: String = expected.into_iter().collect();
        assert_eq!(transform_and_compress(raw).unwrap().as_str(), expected);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(
            transform_and_compress(""),
            Err(Error::InvalidExample(_))
        ));
    }

    #[test]
    fn lcs_examples() {
        assert_eq!(lcs_pair("abc", "abc"), "abc");
        assert_eq!(lcs_pair("ab", "ba"), "a");
        assert_eq!(lcs_pair("SMS_12", "SMS_99"), "SMS_");
        // brute force: the unique length-4 common subsequence
        assert_eq!(lcs_pair("(021)555", "(010)123"), "(01)");
        assert_eq!(lcs_pair("", "abc"), "");
    }

    #[test]
    fn lcs_prefers_leftmost_positions_in_first() {
        let a: Vec<char> = "aab".chars().collect();
        let b: Vec<char> = "ab".chars().collect();
        assert_eq!(lcs_alignment(&a, &b), vec![(0, 0), (2, 1)]);
    }

    #[test]
    fn common_subsequence_examples() {
        assert_eq!(common_subsequence(&["abc"]).unwrap(), "abc");
        assert_eq!(common_subsequence(&["(021)555", "(010)123"]).unwrap(), "(01)");
        assert_eq!(common_subsequence(&["xy", "ab"]).unwrap(), "");
        assert_eq!(common_subsequence::<&str>(&[]), None);
    }

    #[test]
    fn cluster_table_examples() {
        let t = build_cluster_table(&examples(&["SMS_1", "SMS_23", "abc"]), Execution::Parallel)
            .unwrap();
        assert_eq!(t.total(), 3);
        assert_eq!(t.len(), 2);
        let xd = t.get(&MetaParam::parse("X_d").unwrap()).unwrap();
        assert_eq!(xd.frequency, 2);
        assert_eq!(xd.members, ["SMS_1", "SMS_23"]);
        assert_eq!(t.get(&MetaParam::parse("x").unwrap()).unwrap().frequency, 1);

        let empty = build_cluster_table(&[], Execution::Parallel).unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.total(), 0);

        let same = vec![Example::new("A7").unwrap(); 100];
        let t = build_cluster_table(&same, Execution::Sequential).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get(&MetaParam::parse("Xd").unwrap()).unwrap().frequency, 100);
    }

    #[test]
    fn large_corpus_spans_chunks() {
        let raws: Vec<Example> = (0..5000)
            .map(|i| Example::new(format!("id_{i}")).unwrap())
            .collect();
        let seq = build_cluster_table(&raws, Execution::Sequential).unwrap();
        let par = build_cluster_table(&raws, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.total(), 5000);
    }

    fn brute_lcs_len(a: &[char], b: &[char]) -> usize {
        // enumerate subsequences of the shorter string
        let (s, l) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        let mut best = 0;
        for mask in 0u32..(1 << s.len()) {
            let sub: Vec<char> = (0..s.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| s[i])
                .collect();
            let mut it = l.iter();
            if sub.iter().all(|c| it.any(|x| x == c)) {
                best = best.max(sub.len());
            }
        }
        best
    }

    fn is_subsequence(needle: &str, hay: &str) -> bool {
        let mut it = hay.chars();
        needle.chars().all(|c| it.any(|x| x == c))
    }

    proptest! {
        #[test]
        fn metaparam_is_canonical(raw in "\\PC{1,40}") {
            let mp = transform_and_compress(&raw).unwrap();
            let chars: Vec<char> = mp.as_str().chars().collect();
            prop_assert!(chars.windows(2).all(|w| w[0] != w[1]));
            prop_assert!(chars.len() <= raw.chars().count());
            prop_assert_eq!(crate::types::canonicalize(mp.as_str()), mp.as_str());
        }

        #[test]
        fn lcs_matches_brute_force(a in "[abc]{0,8}", b in "[abc]{0,8}") {
            let ac: Vec<char> = a.chars().collect();
            let bc: Vec<char> = b.chars().collect();
            let got = lcs_pair(&a, &b);
            prop_assert_eq!(got.chars().count(), brute_lcs_len(&ac, &bc));
            prop_assert!(is_subsequence(&got, &a));
            prop_assert!(is_subsequence(&got, &b));
        }

        #[test]
        fn fold_is_common_subsequence(v in proptest::collection::vec("[a-d()]{1,10}", 1..6)) {
            let s = common_subsequence(&v).unwrap();
            for x in &v {
                prop_assert!(is_subsequence(&s, x));
            }
        }

        #[test]
        fn table_independent_of_order(
            v in proptest::collection::vec("[a-cA-C0-2_]{1,6}", 0..40),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let exs: Vec<Example> = v.iter().map(|r| Example::new(r.clone()).unwrap()).collect();
            let mut shuffled = exs.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = build_cluster_table(&exs, Execution::Sequential).unwrap();
            let b = build_cluster_table(&shuffled, Execution::Parallel).unwrap();
            prop_assert_eq!(&a, &b);
            let sum: usize = a.entries().values().map(|e| e.frequency).sum();
            prop_assert_eq!(sum, exs.len());
            for (k, e) in a.entries() {
                for m in &e.members {
                    prop_assert_eq!(&transform_and_compress(m).unwrap(), k);
                }
            }
        }

        #[test]
        fn merge_is_associative_and_commutative(
            a in proptest::collection::vec("[ab0_]{1,4}", 0..10),
            b in proptest::collection::vec("[ab0_]{1,4}", 0..10),
            c in proptest::collection::vec("[ab0_]{1,4}", 0..10),
        ) {
            let tab = |v: &Vec<String>| {
                build_cluster_table(
                    &v.iter().map(|r| Example::new(r.clone()).unwrap()).collect::<Vec<_>>(),
                    Execution::Sequential,
                ).unwrap()
            };
            let (ta, tb, tc) = (tab(&a), tab(&b), tab(&c));
            let left = ta.clone().merge(tb.clone()).merge(tc.clone());
            let right = ta.clone().merge(tb.clone().merge(tc.clone()));
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(ta.clone().merge(tb.clone()), tb.merge(ta));
        }
    }
}
