//! Small-integer number theory used across the crate.
//!
//! Everything here works on `u64` by trial division, which is ample for the
//! desk-scale parameters the library targets.

use num_integer::Integer;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut x: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= x {
        if x.is_multiple_of(d) {
            let mut e = 0;
            while x.is_multiple_of(d) {
                x /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if x > 1 {
        out.push((x, 1));
    }
    out
}

pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    matches!(factorize(x).as_slice(), [(_, 1)])
}

/// `Some((p, e))` when `x = p^e` with `p` prime and `e >= 1`.
pub fn prime_power(x: u64) -> Option<(u64, u32)> {
    if x < 2 {
        return None;
    }
    match factorize(x).as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}

pub fn euler_phi(x: u64) -> u64 {
    factorize(x)
        .into_iter()
        .fold(x, |acc, (p, _)| acc / p * (p - 1))
}

/// Units of `Z_a` taken as representatives in `[1, a]` (so `a = 1` yields `[1]`).
pub fn units(a: u64) -> Vec<u64> {
    (1..=a).filter(|&t| gcd(t, a) == 1).collect()
}

/// `base^exp`, or `None` on `u64` overflow.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

pub fn binomial(n: u64, k: u64) -> u128 {
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

/// Canonical residue of a signed integer modulo `n`.
pub fn rem_euclid(x: i64, n: u64) -> u64 {
    x.rem_euclid(n as i64) as u64
}

/// Writes `k = u*r + v` with `0 < v <= r`.
pub fn split_positive_remainder(k: u64, r: u64) -> (u64, u64) {
    let mut v = k % r;
    if v == 0 {
        v = r;
    }
    ((k - v) / r, v)
}
