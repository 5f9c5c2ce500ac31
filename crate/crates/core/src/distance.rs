//! Damerau-Levenshtein edit distance (unrestricted: adjacent transpositions
//! may be edited further, unlike optimal string alignment).

use std::collections::HashMap;

pub fn damerau_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (n, m) = (a.len(), b.len());
    if n == 0 {
        return m;
    }
    if m == 0 {
        return n;
    }
    let inf = n + m;
    // (n + 2) x (m + 2) table with a sentinel row/column
    let w = m + 2;
    let mut d = vec![0usize; (n + 2) * w];
    d[0] = inf;
    for i in 0..=n {
        d[(i + 1) * w] = inf;
        d[(i + 1) * w + 1] = i;
    }
    for j in 0..=m {
        d[j + 1] = inf;
        d[w + j + 1] = j;
    }
    let mut last_row: HashMap<char, usize> = HashMap::new();
    for i in 1..=n {
        let mut last_match_col = 0;
        for j in 1..=m {
            let i1 = *last_row.get(&b[j - 1]).unwrap_or(&0);
            let j1 = last_match_col;
            let cost = if a[i - 1] == b[j - 1] {
                last_match_col = j;
                0
            } else {
                1
            };
            let sub = d[i * w + j] + cost;
            let ins = d[(i + 1) * w + j] + 1;
            let del = d[i * w + j + 1] + 1;
            let trans = d[i1 * w + j1] + (i - i1 - 1) + 1 + (j - j1 - 1);
            d[(i + 1) * w + j + 1] = sub.min(ins).min(del).min(trans);
        }
        last_row.insert(a[i - 1], i);
    }
    d[(n + 1) * w + m + 1]
}

/// True iff `damerau_levenshtein(a, b) <= bound`, with a cheap length prefilter.
pub fn within(a: &str, b: &str, bound: usize) -> bool {
    let (la, lb) = (a.chars().count(), b.chars().count());
    if la.abs_diff(lb) > bound {
        return false;
    }
    damerau_levenshtein(a, b) <= bound
}

#[cfg(test)]
mod tests {
    use std::collections::{HashSet, VecDeque};

    use proptest::prelude::*;

    use super::*;

    /// Shortest path over single insert/delete/substitute/adjacent-swap edits.
    fn bfs_distance(a: &str, b: &str, alphabet: &[char], max_depth: usize) -> Option<usize> {
        let mut seen = HashSet::from([a.to_string()]);
        let mut queue = VecDeque::from([(a.to_string(), 0usize)]);
        while let Some((s, d)) = queue.pop_front() {
            if s == b {
                return Some(d);
            }
            if d == max_depth {
                continue;
            }
            for next in single_edits(&s, alphabet) {
                if seen.insert(next.clone()) {
                    queue.push_back((next, d + 1));
                }
            }
        }
        None
    }

    fn single_edits(s: &str, alphabet: &[char]) -> Vec<String> {
        let c: Vec<char> = s.chars().collect();
        let mut out = Vec::new();
        for i in 0..=c.len() {
            for &x in alphabet {
                let mut v = c.clone();
                v.insert(i, x);
                out.push(v.into_iter().collect());
            }
            if i < c.len() {
                let mut v = c.clone();
                v.remove(i);
                out.push(v.iter().collect());
                for &x in alphabet {
                    let mut v = c.clone();
                    v[i] = x;
                    out.push(v.into_iter().collect());
                }
            }
            if i + 1 < c.len() {
                let mut v = c.clone();
                v.swap(i, i + 1);
                out.push(v.into_iter().collect());
            }
        }
        out
    }

    #[test]
    fn known_pairs() {
        assert_eq!(damerau_levenshtein("", ""), 0);
        assert_eq!(damerau_levenshtein("abc", ""), 3);
        assert_eq!(damerau_levenshtein("muisc", "music"), 1);
        assert_eq!(damerau_levenshtein("scool", "school"), 1);
        assert_eq!(damerau_levenshtein("ca", "abc"), 2);
        assert_eq!(damerau_levenshtein("kitten", "sitting"), 3);
        assert!(within("graduhte", "graduate", 2));
        assert!(!within("ab", "abcde", 2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn matches_exhaustive_search_on_short_strings(a in "[abc]{0,4}", b in "[abc]{0,4}") {
            let oracle = bfs_distance(&a, &b, &['a', 'b', 'c'], 8).unwrap();
            prop_assert_eq!(damerau_levenshtein(&a, &b), oracle);
        }

        #[test]
        fn bounded_agreement_up_to_length_ten(a in "[a-e]{0,10}", b in "[a-e]{0,10}") {
            let mut alphabet: Vec<char> = a.chars().chain(b.chars()).collect();
            alphabet.sort_unstable();
            alphabet.dedup();
            let oracle = bfs_distance(&a, &b, &alphabet, 2);
            let d = damerau_levenshtein(&a, &b);
            match oracle {
                Some(k) => prop_assert_eq!(d, k),
                None => prop_assert!(d > 2),
            }
        }

        #[test]
        fn bounded_agreement_on_near_pairs(a in "[a-e]{1,10}", edits in proptest::collection::vec((0usize..4, 0usize..10, 0usize..5), 0..3)) {
            let alphabet = ['a', 'b', 'c', 'd', 'e'];
            let mut v: Vec<char> = a.chars().collect();
            for (op, pos, ch) in edits {
                let p = pos % (v.len() + 1);
                match op {
                    0 => v.insert(p, alphabet[ch]),
                    1 if p < v.len() => { v.remove(p); }
                    2 if p < v.len() => v[p] = alphabet[ch],
                    3 if p + 1 < v.len() => v.swap(p, p + 1),
                    _ => {}
                }
            }
            let b: String = v.into_iter().collect();
            let oracle = bfs_distance(&a, &b, &alphabet, 2);
            let d = damerau_levenshtein(&a, &b);
            match oracle {
                Some(k) => prop_assert_eq!(d, k),
                None => prop_assert!(d > 2),
            }
        }

        #[test]
        fn symmetric(a in "[a-d]{0,8}", b in "[a-d]{0,8}") {
            prop_assert_eq!(damerau_levenshtein(&a, &b), damerau_levenshtein(&b, &a));
        }
    }
}
