//! Frequency-ranked spelling correction over single and double edits.

use std::collections::BTreeSet;

use crate::dictionaries::WordFrequencyList;

const ALPHABET: &str = "abcdefghijklmnopqrstuvwxyz";

/// All strings one insertion, deletion, substitution or adjacent swap away.
pub fn edits1(word: &str) -> BTreeSet<String> {
    let chars: Vec<char> = word.chars().collect();
    let mut out = BTreeSet::new();
    for i in 0..=chars.len() {
        let (left, right) = chars.split_at(i);
        let join = |mid: &[char], rest: &[char]| -> String { left.iter().chain(mid).chain(rest).collect() };
        if !right.is_empty() {
            out.insert(join(&[], &right[1..]));
        }
        if right.len() > 1 {
            out.insert(join(&[right[1], right[0]], &right[2..]));
        }
        for c in ALPHABET.chars() {
            if !right.is_empty() {
                out.insert(join(&[c], &right[1..]));
            }
            out.insert(join(&[c], right));
        }
    }
    out.remove(word);
    out
}

fn best_known<'a>(candidates: impl IntoIterator<Item = &'a String>, words: &WordFrequencyList) -> Option<String> {
    candidates
        .into_iter()
        .filter_map(|c| words.count(c).map(|n| (n, c)))
        // highest count first, then lexicographically smallest
        .max_by(|(na, a), (nb, b)| na.cmp(nb).then_with(|| b.cmp(a)))
        .map(|(_, c)| c.clone())
}

/// Most frequent known word within one edit, falling back to two edits.
/// `None` when the token is already known or nothing is close enough.
pub fn correct_spelling(token: &str, words: &WordFrequencyList) -> Option<String> {
    if words.contains(token) {
        return None;
    }
    let e1 = edits1(token);
    if let Some(best) = best_known(&e1, words) {
        return Some(best);
    }
    let e2: BTreeSet<String> = e1.iter().flat_map(|e| edits1(e)).collect();
    best_known(&e2, words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionaries::bundled;
    use crate::distance::damerau_levenshtein;

    /// Brute force over the whole list: nearest distance band, max count.
    fn oracle(token: &str, words: &WordFrequencyList) -> Option<String> {
        if words.contains(token) {
            return None;
        }
        for band in 1..=2 {
            let best = words
                .iter()
                .filter(|(w, _)| damerau_levenshtein(token, w) == band)
                .max_by(|(a, na), (b, nb)| na.cmp(nb).then_with(|| b.cmp(a)));
            if let Some((w, _)) = best {
                return Some(w.to_string());
            }
        }
        None
    }

    #[test]
    fn edits1_size() {
        // n deletions, n-1 swaps, 26n substitutions, 26(n+1) insertions, minus duplicates
        let e = edits1("ab");
        assert!(e.contains("b") && e.contains("ba") && e.contains("xab") && e.contains("ax"));
        assert!(!e.contains("ab"));
    }

    #[test]
    fn department_examples_against_brute_force() {
        let words = bundled::words();
        assert_eq!(correct_spelling("scool", &words).as_deref(), Some("school"));
        assert_eq!(correct_spelling("muisc", &words).as_deref(), Some("music"));
        assert_eq!(correct_spelling("music", &words), None);
        for t in ["scool", "muisc", "graduhte", "biolgy", "chemestry", "enginering", "histroy"] {
            assert_eq!(correct_spelling(t, &words), oracle(t, &words), "{t}");
        }
    }

    #[test]
    fn ties_break_lexicographically() {
        let words = WordFrequencyList::from_counts([("cat", 5), ("bat", 5), ("hat", 1)]);
        assert_eq!(correct_spelling("zat", &words).as_deref(), Some("bat"));
    }

    #[test]
    fn distance_two_only_when_one_is_empty() {
        let words = WordFrequencyList::from_counts([("abcd", 1), ("abxy", 1000)]);
        assert_eq!(correct_spelling("abcx", &words).as_deref(), Some("abcd"));
        let words = WordFrequencyList::from_counts([("abxy", 3)]);
        assert_eq!(correct_spelling("abcd", &words).as_deref(), Some("abxy"));
        assert_eq!(correct_spelling("zzzzzz", &words), None);
    }
}
