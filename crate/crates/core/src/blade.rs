//! Basis monomials of an exterior algebra encoded as bit masks.
//!
//! Bit `k` set means generator `k` is present; generators are multiplied in
//! increasing bit order. Forms put `dx^mu` at bits `0..m` and `theta^a` at
//! bits `m..m+n`, so "dx before theta" is just increasing bit order.

pub type Blade = u32;

pub fn grade(b: Blade) -> usize {
    b.count_ones() as usize
}

/// Sign of `e^a ∧ e^b` relative to `e^{a|b}`, or `None` when they share a generator.
pub fn wedge_sign(a: Blade, b: Blade) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    // count pairs (x in a, y in b) with x > y
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let y = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> y >> 1).count_ones();
    }
    Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
}

/// Number of generators of `b` strictly below bit `k`.
pub fn below(b: Blade, k: u32) -> u32 {
    (b & ((1u32 << k) - 1)).count_ones()
}

pub fn bits(b: Blade) -> impl Iterator<Item = u32> {
    let mut rest = b;
    core::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let k = rest.trailing_zeros();
            rest &= rest - 1;
            Some(k)
        }
    })
}

pub fn from_indices(idx: &[u32]) -> Blade {
    idx.iter().fold(0, |acc, &k| acc | (1 << k))
}

/// Mask with bits `lo..hi` set.
pub fn range(lo: u32, hi: u32) -> Blade {
    if hi <= lo {
        0
    } else {
        (((1u64 << (hi - lo)) - 1) as u32) << lo
    }
}

/// Sign of the permutation sorting the concatenation `idx` (which must be distinct).
pub fn sort_sign(idx: &[u32]) -> Option<i32> {
    let mut sign = 1;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            if idx[i] == idx[j] {
                return None;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    Some(sign)
}

/// All masks inside `universe` with exactly `k` bits, in increasing numeric order.
pub fn subsets(universe: Blade, k: usize) -> alloc::vec::Vec<Blade> {
    let members: alloc::vec::Vec<u32> = bits(universe).collect();
    let mut out = alloc::vec::Vec::new();
    let total = members.len();
    if k > total {
        return out;
    }
    for sel in 0u32..(1u32 << total) {
        if sel.count_ones() as usize == k {
            out.push(bits(sel).fold(0, |acc, i| acc | (1 << members[i as usize])));
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs() {
        assert_eq!(wedge_sign(0b01, 0b10), Some(1));
        assert_eq!(wedge_sign(0b10, 0b01), Some(-1));
        assert_eq!(wedge_sign(0b11, 0b01), None);
        // e1e3 ∧ e2 = -e1e2e3
        assert_eq!(wedge_sign(0b101, 0b010), Some(-1));
        assert_eq!(sort_sign(&[2, 0, 1]), Some(1));
        assert_eq!(sort_sign(&[1, 0]), Some(-1));
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(0b111, 2), alloc::vec![0b011, 0b101, 0b110]);
        assert_eq!(range(2, 4), 0b1100);
        assert_eq!(below(0b1011, 3), 2);
    }
}
