use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// All ordered `k`-tuples of positive integers summing to `n`, in
/// lexicographic order. There are `C(n-1, k-1)` of them.
pub fn compositions(n: u32, k: u32) -> Result<Vec<Vec<u32>>> {
    if k < 1 || k > n {
        return Err(Error::InvalidArgument(format!(
            "compositions of {n} into {k} parts need 1 <= k <= n"
        )));
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; k as usize];
    fill(n, 0, &mut current, &mut out);
    Ok(out)
}

fn fill(remaining: u32, slot: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let slots_left = (current.len() - slot) as u32;
    if slots_left == 1 {
        current[slot] = remaining;
        out.push(current.clone());
        return;
    }
    // leave at least 1 for each later slot
    for part in 1..=remaining - (slots_left - 1) {
        current[slot] = part;
        fill(remaining - part, slot + 1, current, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Every tuple in `1..=n`^k, filtered by sum.
    fn brute_force(n: u32, k: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let total = (n as u64).pow(k);
        for mut code in 0..total {
            let mut t = Vec::new();
            for _ in 0..k {
                t.push((code % n as u64) as u32 + 1);
                code /= n as u64;
            }
            t.reverse();
            if t.iter().sum::<u32>() == n {
                out.push(t);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn three_into_two() {
        assert_eq!(compositions(3, 2).unwrap(), vec![vec![1, 2], vec![2, 1]]);
    }

    #[test]
    fn forced_single_tuple() {
        assert_eq!(compositions(4, 4).unwrap(), vec![vec![1, 1, 1, 1]]);
    }

    #[test]
    fn six_into_three_matches_enumeration() {
        let c = compositions(6, 3).unwrap();
        assert_eq!(c.len(), 10);
        assert_eq!(c, brute_force(6, 3));
    }

    #[test]
    fn counts_and_order_match_enumeration() {
        for n in 1..=7 {
            for k in 1..=n {
                let c = compositions(n, k).unwrap();
                assert_eq!(c.len() as u64, binomial(n as u64 - 1, k as u64 - 1));
                assert_eq!(c, brute_force(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn out_of_range_part_counts() {
        assert!(compositions(3, 4).is_err());
        assert!(compositions(3, 0).is_err());
    }
}
