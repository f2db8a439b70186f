//! Combinatorial helpers over sorted index sets.

/// `C(n, k)` as `u128`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Lexicographic enumeration of the `k`-subsets of `items`.
///
/// `items` should be sorted for the output sets to be sorted.
pub struct Combinations<'a> {
    items: &'a [usize],
    idx: Vec<usize>,
    done: bool,
}

impl<'a> Combinations<'a> {
    pub fn new(items: &'a [usize], k: usize) -> Self {
        Combinations {
            items,
            idx: (0..k).collect(),
            done: k > items.len(),
        }
    }
}

impl Iterator for Combinations<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out: Vec<usize> = self.idx.iter().map(|&i| self.items[i]).collect();
        let k = self.idx.len();
        let n = self.items.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

pub fn combinations(items: &[usize], k: usize) -> Combinations<'_> {
    Combinations::new(items, k)
}

/// All `k`-subsets of `{0, …, n-1}` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (0..n).collect();
    combinations(&all, k).collect()
}

/// Sorted union of two disjoint sorted sets.
pub fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out.dedup();
    out
}

/// Elements of `a` not in `b`.
pub fn difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| !b.contains(x)).collect()
}

pub fn intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.contains(x)).collect()
}

/// Symmetric difference, sorted.
pub fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = difference(a, b);
    out.extend(difference(b, a));
    out.sort_unstable();
    out
}

/// `d(S, T) = |S \ T|` for equal-size sets.
pub fn distance(a: &[usize], b: &[usize]) -> usize {
    difference(a, b).len()
}

/// Complement of `set` in `{0, …, n-1}`.
pub fn complement(n: usize, set: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !set.contains(i)).collect()
}

/// Checks that `set` is strictly increasing and inside `[0, n)`.
pub fn is_valid_set(set: &[usize], n: usize) -> bool {
    set.windows(2).all(|w| w[0] < w[1]) && set.last().is_none_or(|&x| x < n)
}

/// Colexicographic rank of a sorted set among all sets of its size.
pub fn colex_rank(set: &[usize]) -> usize {
    set.iter()
        .enumerate()
        .map(|(i, &x)| binomial(x, i + 1) as usize)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 3), 56);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(10, 0), 1);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }

    #[test]
    fn combinations_lexicographic() {
        let sets = k_subsets(4, 2);
        assert_eq!(
            sets,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(k_subsets(3, 0), vec![Vec::<usize>::new()]);
        assert!(k_subsets(2, 3).is_empty());
    }

    proptest! {
        #[test]
        fn colex_rank_is_a_bijection(n in 1usize..9, k in 0usize..5) {
            let k = k.min(n);
            let mut ranks: Vec<usize> = k_subsets(n, k).iter().map(|s| colex_rank(s)).collect();
            ranks.sort_unstable();
            let expect: Vec<usize> = (0..binomial(n, k) as usize).collect();
            prop_assert_eq!(ranks, expect);
        }
    }
}
