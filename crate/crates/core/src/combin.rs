//! Small combinatorial helpers shared by the tensor and state code.

/// Advances `v` to the next lexicographic permutation; returns `false` once
/// the last permutation has been passed (leaving `v` sorted again).
/// Repeated elements yield only distinct permutations.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All distinct orderings of a multiset, starting from its sorted form.
pub(crate) fn distinct_permutations(key: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = key.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

/// Every permutation of `0..n` (as slot maps), with its sign.
pub(crate) fn all_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![(cur.clone(), 1.0)];
    while next_permutation(&mut cur) {
        out.push((cur.clone(), parity_sign(&cur)));
    }
    out
}

/// Sign of the permutation that sorts `key`, by inversion count.
/// Meaningless (but harmless) when `key` has repeats.
pub(crate) fn parity_sign(key: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for a in 0..key.len() {
        for b in a + 1..key.len() {
            if key[a] > key[b] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) { 1.0 } else { -1.0 }
}

pub(crate) fn has_repeats(sorted: &[usize]) -> bool {
    sorted.windows(2).any(|w| w[0] == w[1])
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Number of distinct orderings of a sorted multiset key: n!/∏ mᵢ!.
pub(crate) fn arrangement_count(sorted: &[usize]) -> f64 {
    let mut denom = 1.0;
    let mut run = 1usize;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            denom *= factorial(run);
            run = 1;
        }
    }
    if !sorted.is_empty() {
        denom *= factorial(run);
    }
    factorial(sorted.len()) / denom
}

/// Sorted (non-decreasing) n-tuples over `0..dim`, or strictly increasing ones
/// when `strict` is set, in lexicographic order.
pub(crate) fn canonical_keys(n: usize, dim: usize, strict: bool) -> Vec<Vec<usize>> {
    fn rec(n: usize, dim: usize, strict: bool, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(n, dim, strict, if strict { i + 1 } else { i }, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, dim, strict, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Binomial coefficient as f64 (used only for size estimates).
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_permutations_of_multiset() {
        let perms = distinct_permutations(&[1, 0, 0]);
        assert_eq!(perms, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert_eq!(arrangement_count(&[0, 0, 1]), 3.0);
        assert_eq!(arrangement_count(&[0, 0, 1, 1]), 6.0);
    }

    #[test]
    fn permutation_signs_balance() {
        let perms = all_permutations(4);
        assert_eq!(perms.len(), 24);
        let total: f64 = perms.iter().map(|(_, s)| s).sum();
        assert_eq!(total, 0.0);
        assert_eq!(parity_sign(&[1, 0, 2]), -1.0);
        assert_eq!(parity_sign(&[2, 0, 1]), 1.0);
    }

    #[test]
    fn canonical_key_counts() {
        assert_eq!(canonical_keys(2, 3, false).len(), 6);
        assert_eq!(canonical_keys(2, 4, true).len(), 6);
        assert_eq!(binomial(5, 2), 10.0);
    }
}
