//! Field-size and length bounds for optimal LRCs, in exact integer arithmetic.
//!
//! Fractional powers never appear: `x >= B^(c/d)` is checked as
//! `x^d >= B^c`, and floors of such quantities are found by binary search.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::locality::lrc_singleton_bound;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimePowerResult {
    pub value: u64,
    pub base: Option<u64>,
    pub exponent: Option<u32>,
}

impl PrimePowerResult {
    pub fn is_prime_power(&self) -> bool {
        self.base.is_some()
    }
}

pub fn is_prime_power(x: u64) -> Result<PrimePowerResult> {
    if x < 2 {
        return Err(Error::OutOfRange(x));
    }
    let pe = arith::prime_power(x);
    Ok(PrimePowerResult {
        value: x,
        base: pe.map(|(p, _)| p),
        exponent: pe.map(|(_, e)| e),
    })
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// Smallest prime power `Q` with `Q^root_exponent >= bound`.
pub fn psi(bound: u64, root_exponent: u32) -> u64 {
    assert!(root_exponent >= 1, "root exponent must be positive");
    let target = big(bound);
    // smallest integer with the required power, then walk up to a prime power
    let mut q = ceil_root(&target, root_exponent)
        .to_u64()
        .expect("root of a u64 fits");
    q = q.max(2);
    while arith::prime_power(q).is_none() {
        q += 1;
    }
    q
}

/// Smallest `x` with `x^e >= value`.
fn ceil_root(value: &BigUint, e: u32) -> BigUint {
    let fl = value.nth_root(e);
    if fl.pow(e) == *value {
        fl
    } else {
        fl + 1u32
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FieldBound {
    Bound {
        value: u64,
        /// The integer `B` under the root.
        radicand: u64,
        /// `q` must satisfy `q^root >= radicand`.
        root: u32,
    },
    NotApplicable {
        reason: String,
    },
}

impl FieldBound {
    pub fn value(&self) -> Option<u64> {
        match self {
            FieldBound::Bound { value, .. } => Some(*value),
            FieldBound::NotApplicable { .. } => None,
        }
    }
}

/// Lower bound on the field size of an optimal `[n, k]` LRC with
/// `(r, delta)`-locality, `n = m(r + delta - 1)` and `k = ur`, `u >= 2`.
///
/// Even `r` (needs `m >= u + 1`): smallest prime power `Q` with
/// `Q^(r/2) >= (u + 1) * floor((2r + 2delta - 2) / r) - 1`.
/// Odd `r` (needs `m >= u + 2`): smallest prime power `Q` with `Q^(r+1) >= u^2`.
pub fn field_bound_new(n: u64, k: u64, r: u64, delta: u64) -> FieldBound {
    let na = |reason: String| FieldBound::NotApplicable { reason };
    if r == 0 || delta < 2 {
        return na(format!(
            "need r >= 1 and delta >= 2, got r = {r}, delta = {delta}"
        ));
    }
    let a = r + delta - 1;
    if !n.is_multiple_of(a) {
        return na(format!("r + delta - 1 = {a} does not divide n = {n}"));
    }
    if !k.is_multiple_of(r) {
        return na(format!("r = {r} does not divide k = {k}"));
    }
    let (m, u) = (n / a, k / r);
    if u < 2 {
        return na(format!("u = k/r = {u} < 2"));
    }
    if r.is_multiple_of(2) {
        if m < u + 1 {
            return na(format!("even r needs m >= u + 1, got m = {m}, u = {u}"));
        }
        let radicand = (u + 1) * ((2 * r + 2 * delta - 2) / r) - 1;
        let root = (r / 2) as u32;
        FieldBound::Bound {
            value: psi(radicand, root),
            radicand,
            root,
        }
    } else {
        if m < u + 2 {
            return na(format!("odd r needs m >= u + 2, got m = {m}, u = {u}"));
        }
        let radicand = u * u;
        let root = (r + 1) as u32;
        FieldBound::Bound {
            value: psi(radicand, root),
            radicand,
            root,
        }
    }
}

/// `(u + 1) * floor((2r + 2delta - 2) / r) <= q^(r/2) + 1`.
pub fn lemma_even_check(q: u64, r: u64, delta: u64, u: u64) -> Result<bool> {
    if !r.is_multiple_of(2) {
        return Err(Error::OddR);
    }
    let lhs = big(u + 1) * big((2 * r + 2 * delta - 2) / r);
    Ok(lhs <= big(q).pow((r / 2) as u32) + 1u32)
}

/// `u <= q^((r+1)/2)`.
pub fn lemma_odd_check(q: u64, r: u64, u: u64) -> Result<bool> {
    if r.is_multiple_of(2) {
        return Err(Error::EvenR);
    }
    Ok(big(u) <= big(q).pow(r.div_ceil(2) as u32))
}

/// Shortens an optimal LRC profile by `epsilon` whole repair sets:
/// `(n, k, d) -> (n - epsilon*a, k, d - epsilon*a)` with `a = r + delta - 1`.
pub fn reduce_parameters(
    n: u64,
    k: u64,
    d: u64,
    r: u64,
    delta: u64,
    epsilon: u64,
) -> Result<(u64, u64, u64)> {
    if d <= r + delta {
        return Err(Error::DistanceTooSmall {
            d,
            min: r + delta + 1,
        });
    }
    let a = r + delta - 1;
    let max = (d - 1).div_ceil(a) - 1;
    if epsilon > max {
        return Err(Error::EpsilonTooLarge { epsilon, max });
    }
    let out = (n - epsilon * a, k, d - epsilon * a);
    let on_bound = |n: u64, d: u64| {
        lrc_singleton_bound(n as usize, k as usize, r as usize, delta as usize) == d as i64
    };
    if on_bound(n, d) {
        assert!(on_bound(out.0, out.2), "reduction keeps the bound tight");
    }
    Ok(out)
}

/// An `(n, 2, 2, delta, q)`-MR code needs `q >= n - 1`.
pub fn mr_field_floor_r2(n: u64) -> u64 {
    n.saturating_sub(1)
}

fn serialize_decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// A bound value; `order_estimate` marks asymptotic bounds evaluated with
/// every hidden constant set to 1, which carry no exact meaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Estimate {
    #[serde(serialize_with = "serialize_decimal")]
    pub value: BigUint,
    pub order_estimate: bool,
}

/// `floor(num/den * base^(exp/root))`.
fn floor_scaled_power(num: &BigUint, den: &BigUint, base: u64, exp: i64, root: u32) -> BigUint {
    assert!(!den.is_zero() && root > 0);
    let up = big(base).pow(exp.max(0) as u32);
    let down = big(base).pow((-exp).max(0) as u32);
    let rhs = num.pow(root) * up;
    let fits = |x: &BigUint| (x * den).pow(root) * &down <= rhs;
    let mut hi = BigUint::one();
    while fits(&hi) {
        hi <<= 1;
    }
    let mut lo = BigUint::zero();
    // invariant: fits(lo), !fits(hi)
    while &hi - &lo > BigUint::one() {
        let mid = (&lo + &hi) >> 1;
        if fits(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Upper bounds on the length of optimal LRCs from prior work.
///
/// `delta > 2`: with `t = floor((d-1)/delta) >= 2`, `T = t` (t even) or
/// `t - 1` (t odd), `k = ur + v` and `w - u = floor((d-1+v)/(r+delta-1))`,
/// returns `floor(T(r+delta-1) / (2r(q-1)) * q^((2(w-u)r - 2v)/T))`.
///
/// `delta = 2`: only an order bound exists, `d * q^(4(d-c)/(d-a') - 1)` with
/// `a' = d mod 4` in `1..=4` and `c = 2` for `a' <= 2`, `c = 3` otherwise;
/// returned as an order estimate.
pub fn length_bound_prior(q: u64, d: u64, r: u64, delta: u64, k: u64) -> Result<Estimate> {
    if q < 2 || r == 0 || delta < 2 {
        return Err(Error::HypothesisViolation(format!(
            "need q >= 2, r >= 1, delta >= 2 (q = {q}, r = {r}, delta = {delta})"
        )));
    }
    let (u, v) = (k / r, k % r);
    if delta == 2 {
        if d < 5 || k <= r {
            return Err(Error::HypothesisViolation(format!(
                "needs d >= 5 and k > r (d = {d}, k = {k}, r = {r})"
            )));
        }
        if v != 0 && k + (2 * r - 1) * v < 2 * r * r + 2 * r {
            return Err(Error::HypothesisViolation(format!(
                "needs r | k or k >= 2r^2 + 2r - (2r-1)(k mod r) (k = {k}, r = {r})"
            )));
        }
        let ap = (d - 1) % 4 + 1;
        let c = if ap <= 2 { 2 } else { 3 };
        let root = d - ap;
        let exp = 4 * (d - c) as i64 - root as i64;
        return Ok(Estimate {
            value: floor_scaled_power(&big(d), &BigUint::one(), q, exp, root as u32),
            order_estimate: true,
        });
    }
    if v != 0 && u < 2 * (r - v + 1) {
        return Err(Error::HypothesisViolation(format!(
            "needs v = 0 or u >= 2(r - v + 1) (k = {k} = {u}*{r} + {v})"
        )));
    }
    let t = (d - 1) / delta;
    if t < 2 {
        return Err(Error::HypothesisViolation(format!(
            "t = floor((d-1)/delta) = {t} < 2"
        )));
    }
    let tt = if t.is_multiple_of(2) { t } else { t - 1 };
    let a = r + delta - 1;
    let w_minus_u = (d - 1 + v) / a;
    let exp = 2 * (w_minus_u * r) as i64 - 2 * v as i64;
    let value = floor_scaled_power(&big(tt * a), &big(2 * r * (q - 1)), q, exp, tt as u32);
    Ok(Estimate {
        value,
        order_estimate: false,
    })
}

/// Constant-1 evaluation of the asymptotic field-size lower bound for
/// `(n, r, h, delta, q)`-MR codes with `m >= 2` repair sets.
///
/// `m >= h`: `n * r^min(delta-1, h-2)`. `m < h`, `m | h`: `n^(1 + m(delta-1)/h)`
/// when `delta - 1 <= h - 2h/m`, else `n^(m-1)`. Otherwise the general
/// `n * r^eps` with `eps = min(delta-1, h-2c)/c`, `c = ceil(h/m)`.
pub fn gm_field_estimate(n: u64, r: u64, h: u64, delta: u64, m: u64) -> Result<Estimate> {
    if h < 2 || m < 2 {
        return Err(Error::HypothesisViolation(format!(
            "needs h >= 2 and m >= 2 (h = {h}, m = {m})"
        )));
    }
    let one = BigUint::one();
    let value = if m >= h {
        big(n) * big(r).pow((delta - 1).min(h - 2) as u32)
    } else if h.is_multiple_of(m) {
        if delta - 1 <= h - 2 * h / m {
            floor_scaled_power(&big(n), &one, n, (m * (delta - 1)) as i64, h as u32)
        } else {
            big(n).pow((m - 1) as u32)
        }
    } else {
        let c = h.div_ceil(m);
        let num = (delta as i64 - 1).min(h as i64 - 2 * c as i64);
        floor_scaled_power(&big(n), &one, r, num, c as u32)
    };
    Ok(Estimate {
        value,
        order_estimate: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// No prime power lies between the lower bound and `q`.
    Optimal,
    /// Smaller prime powers satisfy the bound; see `gap`.
    Gap,
    /// `q` is below the bound, so no optimal LRC with these parameters exists.
    BelowBound,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldSizeVerdict {
    pub n: u64,
    pub k: u64,
    pub r: u64,
    pub delta: u64,
    pub q: u64,
    pub bound_new: FieldBound,
    /// `n - 1`, reported when `r = 2` and `k = 2m - 2`; it binds MR codes only.
    pub floor_r2: Option<u64>,
    pub verdict: Verdict,
    /// Prime powers `Q` with `bound <= Q < q`.
    pub gap: Vec<u64>,
    pub notes: Vec<String>,
}

/// Compares `q` with [`field_bound_new`] and lists any smaller admissible
/// prime powers.
pub fn optimal_field_size_verdict(n: u64, k: u64, r: u64, delta: u64, q: u64) -> FieldSizeVerdict {
    let bound_new = field_bound_new(n, k, r, delta);
    let a = r + delta - 1;
    let floor_r2 =
        (r == 2 && n.is_multiple_of(a) && k + 2 == 2 * (n / a)).then(|| mr_field_floor_r2(n));
    let mut notes = Vec::new();
    if floor_r2.is_some() {
        notes.push("floor_r2 applies to MR codes only and is not used in the verdict".to_string());
    }
    if let FieldBound::Bound { root, .. } = bound_new {
        if root > 1 && r.is_multiple_of(2) {
            notes.push(format!(
                "the even-r bound is read as the smallest Q with Q^{root} >= B"
            ));
        }
    }
    let (verdict, gap) = match bound_new.value() {
        None => (Verdict::NotApplicable, Vec::new()),
        Some(b) if q < b => (Verdict::BelowBound, Vec::new()),
        Some(b) => {
            let gap: Vec<u64> = (b..q)
                .filter(|&x| arith::prime_power(x).is_some())
                .collect();
            let v = if gap.is_empty() {
                Verdict::Optimal
            } else {
                Verdict::Gap
            };
            (v, gap)
        }
    };
    FieldSizeVerdict {
        n,
        k,
        r,
        delta,
        q,
        bound_new,
        floor_r2,
        verdict,
        gap,
        notes,
    }
}

pub const CSV_HEADER: &str = "n,k,r,delta,q,bound_new,floor_r2,verdict,notes";

impl FieldSizeVerdict {
    pub fn csv_row(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Optimal => "optimal".to_string(),
            Verdict::Gap => format!(
                "gap({})",
                self.gap
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
            Verdict::BelowBound => "below_bound".to_string(),
            Verdict::NotApplicable => "not_applicable".to_string(),
        };
        let mut notes = self.notes.clone();
        if let FieldBound::NotApplicable { reason } = &self.bound_new {
            notes.insert(0, reason.clone());
        }
        format!(
            "{},{},{},{},{},{},{},{},\"{}\"",
            self.n,
            self.k,
            self.r,
            self.delta,
            self.q,
            self.bound_new
                .value()
                .map_or(String::new(), |v| v.to_string()),
            self.floor_r2.map_or(String::new(), |v| v.to_string()),
            verdict,
            notes.join("; ").replace('"', "'")
        )
    }
}

/// Verdicts for every parameter set of the cyclic MR family with
/// `q^b <= max_field`, ordered by `(q^b, q, r, delta)`.
pub fn sweep(max_field: u64) -> Vec<FieldSizeVerdict> {
    let mut rows = Vec::new();
    for q in 2..=max_field {
        if arith::prime_power(q).is_none() {
            continue;
        }
        let mut b = 1u32;
        while let Some(qb) = arith::checked_pow(q, b).filter(|&v| v <= max_field) {
            let n = qb - 1;
            for a in 3..=n {
                if n % a != 0 {
                    continue;
                }
                for r in 2..a {
                    let p = crate::mr::MrParams::new(q, b, r, a + 1 - r);
                    if p.check_construction1().is_ok() {
                        rows.push((qb, q, r, p));
                    }
                }
            }
            b += 1;
        }
    }
    rows.sort_by_key(|&(qb, q, r, p)| (qb, q, r, p.delta));
    rows.into_iter()
        .map(|(qb, _, _, p)| optimal_field_size_verdict(p.n(), p.k(), p.r, p.delta, qb))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn psi_oracle(bound: u64, e: u32) -> u64 {
        (2u64..)
            .find(|&x| arith::prime_power(x).is_some() && (x as u128).pow(e) >= bound as u128)
            .unwrap()
    }

    #[test]
    fn prime_powers() {
        for x in [15, 62, 63] {
            assert!(!is_prime_power(x).unwrap().is_prime_power());
        }
        let r = is_prime_power(8).unwrap();
        assert_eq!((r.base, r.exponent), (Some(2), Some(3)));
        assert_eq!(is_prime_power(1), Err(Error::OutOfRange(1)));
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(15, 1), 16);
        assert_eq!(psi(62, 1), 64);
        assert_eq!(psi(16, 2), 4);
        assert_eq!(psi(17, 2), 5);
        assert_eq!(psi(1, 3), 2);
    }

    proptest! {
        #[test]
        fn psi_is_minimal(bound in 1u64..5000, e in 1u32..4) {
            let q = psi(bound, e);
            prop_assert_eq!(q, psi_oracle(bound, e));
        }

        #[test]
        fn floor_power_matches_float(num in 1u64..50, den in 1u64..50, base in 2u64..9, exp in -6i64..7, root in 1u32..4) {
            let exact = floor_scaled_power(&big(num), &big(den), base, exp, root).to_u64().unwrap();
            let approx = num as f64 / den as f64 * (base as f64).powf(exp as f64 / root as f64);
            // the float is only used to bracket the exact value
            prop_assert!((exact as f64) <= approx + 1e-9 && approx < exact as f64 + 1.0 + 1e-9);
        }
    }

    #[test]
    fn new_field_bound() {
        assert_eq!(field_bound_new(16, 6, 2, 3).value(), Some(16));
        assert_eq!(field_bound_new(63, 40, 2, 2).value(), Some(64));
        assert_eq!(field_bound_new(9, 4, 2, 2).value(), Some(8));
        // r = 2: B = m(delta + 1) - 1 = n - 1
        assert_eq!(
            field_bound_new(15, 8, 2, 2),
            FieldBound::Bound {
                value: 16,
                radicand: 14,
                root: 1
            }
        );
        assert!(matches!(
            field_bound_new(16, 7, 2, 3),
            FieldBound::NotApplicable { .. }
        ));
        assert!(matches!(
            field_bound_new(12, 2, 2, 2),
            FieldBound::NotApplicable { .. }
        ));
        // odd r: n = 6*5, k = 9 = 3*3, m = 6 >= 5; Q^4 >= 9 gives 2
        assert_eq!(field_bound_new(30, 9, 3, 3).value(), Some(2));
    }

    #[test]
    fn lemma_checks() {
        assert!(lemma_even_check(16, 2, 3, 3).unwrap());
        assert!(!lemma_even_check(13, 2, 3, 3).unwrap());
        assert_eq!(lemma_even_check(16, 3, 3, 3), Err(Error::OddR));
        assert!(lemma_odd_check(4, 3, 16).unwrap());
        assert!(!lemma_odd_check(4, 3, 17).unwrap());
        assert_eq!(lemma_odd_check(4, 2, 1), Err(Error::EvenR));
    }

    #[test]
    fn reductions() {
        assert_eq!(reduce_parameters(16, 6, 7, 2, 3, 1).unwrap(), (12, 6, 3));
        assert_eq!(reduce_parameters(16, 6, 7, 2, 3, 0).unwrap(), (16, 6, 7));
        assert_eq!(
            reduce_parameters(16, 6, 7, 2, 3, 2),
            Err(Error::EpsilonTooLarge { epsilon: 2, max: 1 })
        );
        assert_eq!(
            reduce_parameters(16, 6, 5, 2, 3, 0),
            Err(Error::DistanceTooSmall { d: 5, min: 6 })
        );
    }

    #[test]
    fn prior_length_bounds() {
        let b = length_bound_prior(4, 7, 2, 3, 6).unwrap();
        assert_eq!(b.value, big(10));
        assert!(!b.order_estimate);
        assert!(matches!(
            length_bound_prior(4, 6, 2, 3, 6),
            Err(Error::HypothesisViolation(_))
        ));
        let b = length_bound_prior(16, 5, 2, 2, 4).unwrap();
        assert!(b.order_estimate);
        // d = 5: a' = 1, exponent 4*3/4 - 1 = 2, so 5 * 16^2
        assert_eq!(b.value, big(1280));
    }

    #[test]
    fn mr_estimates() {
        assert_eq!(gm_field_estimate(80, 6, 2, 3, 10).unwrap().value, big(80));
        assert_eq!(gm_field_estimate(15, 2, 2, 2, 5).unwrap().value, big(15));
        // m = 2 divides h = 4, delta - 1 = 1 <= 4 - 4: false, so n^(m-1)
        assert_eq!(gm_field_estimate(10, 3, 4, 2, 2).unwrap().value, big(10));
        // m = 2 | h = 6, delta - 1 = 1 <= 6 - 6 false again; delta = 1 is excluded, try h = 8
        assert_eq!(gm_field_estimate(16, 3, 8, 2, 2).unwrap().value, big(16));
        // m = 4 | h = 8, delta - 1 = 2 <= 8 - 4: n^(1 + 4*2/8) = n^2
        assert_eq!(gm_field_estimate(16, 3, 8, 3, 4).unwrap().value, big(256));
        assert!(matches!(
            gm_field_estimate(16, 3, 2, 3, 1),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn verdicts() {
        for (n, k, r, d, q) in [(16, 6, 2, 3, 16), (63, 40, 2, 2, 64), (9, 4, 2, 2, 8)] {
            let v = optimal_field_size_verdict(n, k, r, d, q);
            assert_eq!(v.verdict, Verdict::Optimal, "{v:?}");
        }
        let v = optimal_field_size_verdict(15, 8, 2, 2, 16);
        assert_eq!(v.verdict, Verdict::Optimal);
        assert_eq!(v.floor_r2, Some(14));
        assert_eq!(
            v.csv_row(),
            "15,8,2,2,16,16,14,optimal,\"floor_r2 applies to MR codes only and is not used in the verdict\""
        );
        let v = optimal_field_size_verdict(16, 6, 2, 3, 19);
        assert_eq!((v.verdict, v.gap.clone()), (Verdict::Gap, vec![16, 17]));
        assert_eq!(v.floor_r2, Some(15));
        assert_eq!(
            optimal_field_size_verdict(16, 6, 2, 3, 13).verdict,
            Verdict::BelowBound
        );
    }

    #[test]
    fn sweep_rows() {
        let rows = sweep(16);
        assert!(rows.iter().any(|v| (v.n, v.k, v.q) == (15, 8, 16)));
        assert!(rows.iter().all(|v| v.verdict != Verdict::BelowBound));
    }
}
