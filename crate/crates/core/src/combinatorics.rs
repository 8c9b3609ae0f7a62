//! Exact binomials and colexicographic ranking of combinations.
//!
//! Combinations of `k` elements drawn from `0..n` are ranked in colex order:
//! `(a_0 < a_1 < ... < a_{k-1})` has rank `sum_i C(a_i, i + 1)`. For subsets
//! stored as bitmasks this is the same as ordering the masks as integers, so
//! [`combinations_mask`] yields masks in rank order.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact binomial coefficient. Returns zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1) at this point
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient in `u128`, or `None` on overflow.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        // acc * (n - i) / (i + 1) without overflowing the intermediate
        let num = n as u128 - i;
        let den = i + 1;
        let g = gcd(acc, den);
        let (a, d) = (acc / g, den / g);
        acc = a.checked_mul(num / d)?;
    }
    Some(acc)
}

/// Binomial coefficient as an exact rational.
pub fn binomial_rational(n: u64, k: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(binomial(n, k)))
}

/// Binomial coefficient as `f64` (lossy for large arguments).
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    binomial(n, k).to_f64().unwrap_or(f64::INFINITY)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Colex rank of a strictly increasing combination drawn from `0..n`.
pub fn rank_combination(n: usize, combo: &[usize]) -> Result<u128> {
    validate_combination(n, combo)?;
    let mut r: u128 = 0;
    for (i, &a) in combo.iter().enumerate() {
        r += binomial_u128(a as u64, i as u64 + 1).ok_or(Error::SizeLimit { n, limit: 128 })?;
    }
    Ok(r)
}

/// Inverse of [`rank_combination`].
pub fn unrank_combination(n: usize, k: usize, rank: u128) -> Result<Vec<usize>> {
    let count = binomial_u128(n as u64, k as u64).ok_or(Error::SizeLimit { n, limit: 128 })?;
    if rank >= count {
        return Err(Error::RankOutOfRange { n, k, rank, count });
    }
    let mut out = vec![0usize; k];
    let mut r = rank;
    let mut hi = n;
    for i in (0..k).rev() {
        // largest a < hi with C(a, i + 1) <= r
        let mut a = hi - 1;
        loop {
            let c = binomial_u128(a as u64, i as u64 + 1).unwrap_or(u128::MAX);
            if c <= r {
                break;
            }
            a -= 1;
        }
        r -= binomial_u128(a as u64, i as u64 + 1).unwrap_or(0);
        out[i] = a;
        hi = a;
    }
    Ok(out)
}

pub(crate) fn validate_combination(n: usize, combo: &[usize]) -> Result<()> {
    let increasing = combo.windows(2).all(|w| w[0] < w[1]);
    let in_range = combo.last().is_none_or(|&x| x < n);
    if increasing && in_range {
        Ok(())
    } else {
        Err(Error::InvalidCombination(combo.to_vec()))
    }
}

/// All `k`-subsets of `0..n` as bitmasks, in colex (= numeric) order.
///
/// Requires `n <= 128`.
pub fn combinations_mask(n: usize, k: usize) -> impl Iterator<Item = u128> {
    assert!(n <= 128, "combinations_mask supports at most 128 elements");
    let start: Option<u128> = if k > n {
        None
    } else if k == 0 {
        Some(0)
    } else if k == 128 {
        Some(u128::MAX)
    } else {
        Some((1u128 << k) - 1)
    };
    let limit_bit = n;
    std::iter::successors(start, move |&m| {
        if m == 0 {
            return None;
        }
        // Gosper's hack
        let c = m & m.wrapping_neg();
        let r = m.checked_add(c)?;
        let next = (((r ^ m) >> 2) / c) | r;
        if limit_bit < 128 && next >> limit_bit != 0 {
            None
        } else {
            Some(next)
        }
    })
}

/// All `k`-subsets of `0..n` as index vectors, in colex order.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    combinations_mask(n, k).map(mask_to_indices)
}

pub(crate) fn mask_to_indices(mut m: u128) -> Vec<usize> {
    let mut v = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        let t = m.trailing_zeros() as usize;
        v.push(t);
        m &= m - 1;
    }
    v
}

/// Rising factorial `(x)_l` as an exact rational.
pub fn pochhammer(x: i64, l: u64) -> BigRational {
    let mut acc = BigInt::one();
    for j in 0..l as i64 {
        acc *= BigInt::from(x + j);
    }
    BigRational::from_integer(acc)
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_cases() {
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(5, 0), BigUint::from(1u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
    }

    #[test]
    fn binomial_large_matches_product_oracle() {
        // 100*99*98*97 / 24
        let oracle = BigUint::from(100u32 * 99 * 98 * 97) / BigUint::from(24u32);
        assert_eq!(binomial(100, 4), oracle);
        assert_eq!(binomial(100, 4), BigUint::from(3_921_225u32));
        // no overflow at n = 200
        let c = binomial(200, 100);
        assert_eq!(c.to_string(), "90548514656103281165404177077484163874504589675413336841320");
    }

    #[test]
    fn binomial_u128_agrees_with_bigint() {
        for n in 0..=128u64 {
            for k in 0..=n {
                let big = binomial(n, k);
                assert_eq!(binomial_u128(n, k).map(BigUint::from), Some(big));
            }
        }
    }

    #[test]
    fn unrank_examples() {
        assert_eq!(unrank_combination(4, 2, 0).unwrap(), vec![0, 1]);
        assert_eq!(unrank_combination(4, 2, 5).unwrap(), vec![2, 3]);
        let c = unrank_combination(8, 4, 17).unwrap();
        assert_eq!(rank_combination(8, &c).unwrap(), 17);
    }

    #[test]
    fn colex_order_matches_enumeration() {
        let all: Vec<_> = combinations(4, 2).collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![2, 3]]);
        for (r, c) in combinations(7, 3).enumerate() {
            assert_eq!(rank_combination(7, &c).unwrap(), r as u128);
            assert_eq!(unrank_combination(7, 3, r as u128).unwrap(), c);
        }
        assert_eq!(combinations(10, 4).count(), 210);
        assert_eq!(combinations(5, 0).count(), 1);
        assert_eq!(combinations(3, 4).count(), 0);
    }

    #[test]
    fn ranking_errors() {
        assert!(matches!(unrank_combination(4, 2, 6), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(rank_combination(4, &[2, 1]), Err(Error::InvalidCombination(_))));
        assert!(rank_combination(4, &[1, 4]).is_err());
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(3, 0), BigRational::one());
        assert_eq!(pochhammer(3, 2), BigRational::from_integer(12.into()));
        assert_eq!(pochhammer(-2, 2), BigRational::from_integer(2.into()));
    }
}
