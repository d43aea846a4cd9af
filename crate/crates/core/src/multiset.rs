//! Colexicographic enumeration of multisets (effective divisors of fixed degree).

/// Steps a non-decreasing index sequence over `0..n` to its colex successor.
///
/// Colex order compares the largest entry first, so the sequence starts at
/// all zeros and ends at all `n - 1`. Returns `false` once exhausted.
pub fn next_colex(items: &mut [usize], n: usize) -> bool {
    let d = items.len();
    for i in 0..d {
        let cap = if i + 1 < d { items[i + 1] } else { n - 1 };
        if items[i] < cap {
            items[i] += 1;
            items[..i].fill(0);
            return true;
        }
    }
    false
}

/// Number of multisets of size `d` over `n` symbols, saturating at `u128::MAX`.
pub fn multiset_count(n: usize, d: usize) -> u128 {
    if n == 0 {
        return u128::from(d == 0);
    }
    binomial((n + d - 1) as u128, d as u128)
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiply.
        acc = match acc.checked_mul(n - i) {
            Some(x) => x / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Chip vector of a multiset of vertex indices.
pub fn to_chips(items: &[usize], n: usize, chips: &mut [i64]) {
    debug_assert_eq!(chips.len(), n);
    chips.fill(0);
    for &v in items {
        chips[v] += 1;
    }
}
