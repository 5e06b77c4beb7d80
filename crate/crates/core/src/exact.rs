//! Exact decisions for the strict inequalities behind the replica thresholds.
//!
//! The central question has the shape `2^w > M` with `w` a dyadic rational
//! and `M` a big integer. Bit-length bounds settle almost every instance;
//! the residual band is decided by repeated squaring of the normalized
//! mantissa `M / 2^(bits(M)-1)`, peeling integer parts into the exponent so
//! the verdict is exact. Once the exact mantissa grows past a size cap the
//! squaring continues on a floor/ceil interval at escalating precision,
//! which still yields an exact verdict because the undecided comparisons
//! pit a rational against an irrational, so there are no ties left.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::tree::DyadicWeight;

/// Bit-size threshold at which the exact squaring chain hands over to
/// interval squaring.
const CHAIN_CAP_BITS: u64 = 1 << 16;

/// Starting precision for interval squaring, doubled on demand.
const INTERVAL_START_BITS: u64 = 256;
const INTERVAL_MAX_BITS: u64 = 1 << 24;

/// Binomial coefficient `C(n, k)` as a big integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Partial row sum `sum_{i=0}^{d-1} C(n, i)`.
pub fn binomial_partial_sum(n: u64, d: u64) -> BigUint {
    let mut term = BigUint::one();
    let mut sum = BigUint::zero();
    for i in 0..d {
        if i > 0 {
            if i > n {
                break;
            }
            term = term * BigUint::from(n - (i - 1)) / BigUint::from(i);
        }
        sum += &term;
    }
    sum
}

/// `log2(m)` as an f64, for reporting only (never for verdicts).
pub fn log2_f64(m: &BigUint) -> f64 {
    if m.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = m.bits();
    if bits <= 53 {
        return (m.to_u64().unwrap() as f64).log2();
    }
    let top = (m >> (bits - 53)).to_u64().unwrap();
    (top as f64).log2() + (bits - 53) as f64
}

/// Decides `2^w > m` exactly for a dyadic `w >= 0`.
pub fn pow2_gt(w: &DyadicWeight, m: &BigUint) -> bool {
    if m.is_zero() {
        return true;
    }
    if m.is_one() {
        return !w.is_zero();
    }
    let bits = m.bits() as u128;
    if w.floor() >= bits {
        return true;
    }
    if w.ceil() < bits {
        return false;
    }
    // Here w is strictly between bits-1 and bits (an integer w was settled
    // above), so floor(w) = bits - 1 and w has a fractional part.
    let s = bits - 1;
    if m.count_ones() == 1 {
        // m = 2^s exactly; 2^w > 2^s iff w > s, true for fractional w.
        return true;
    }
    let ld = w.log2_denominator();
    debug_assert!(ld > 0);
    let t = BigUint::from(w.numerator()) - (BigUint::from(s) << ld);
    squaring_chain(m.clone(), s as u64, t, ld)
}

/// Decides `2^t > x^(2^c)` for `x = mant / 2^s` in `[1, 2)`, `x > 1`.
fn squaring_chain(mut mant: BigUint, mut s: u64, mut t: BigUint, mut c: u32) -> bool {
    loop {
        if t.is_zero() {
            return false;
        }
        if t.bits() > c as u64 {
            return true;
        }
        if c == 0 {
            // 2^t > mant / 2^s  <=>  2^(t+s) > mant.
            return t.to_u64().map(|t| t + s >= mant.bits()).unwrap_or(true);
        }
        if mant.bits() > CHAIN_CAP_BITS {
            return interval_decide(&mant, s, &t, c);
        }
        let sq = &mant * &mant;
        let carry = sq.bits() == 2 * s + 2;
        if carry {
            let half = BigUint::one() << (c - 1);
            if t < half {
                return false;
            }
            t -= half;
            s = 2 * s + 1;
        } else {
            s *= 2;
        }
        mant = sq;
        c -= 1;
    }
}

/// Interval variant: compares the fractional exponent `t / 2^c` against
/// `log2(mant / 2^s)` bit by bit, widening precision until decided.
fn interval_decide(mant: &BigUint, s: u64, t: &BigUint, c: u32) -> bool {
    let mut precision = INTERVAL_START_BITS.max(t.bits() + 8);
    'escalate: while precision <= INTERVAL_MAX_BITS {
        let (mut lo, mut hi) = if s <= precision {
            let v = mant << (precision - s);
            (v.clone(), v)
        } else {
            let v = mant >> (s - precision);
            (v.clone(), v + 1u32)
        };
        let one = BigUint::one();
        for j in 1..=c {
            let f_bit = t.bit((c - j) as u64);
            let lo2 = &lo * &lo;
            let hi2 = &hi * &hi;
            let threshold = 2 * precision + 1;
            let y_bit = if lo2.bits() > threshold {
                lo = lo2 >> (precision + 1);
                hi = (hi2 + ((&one << (precision + 1)) - &one)) >> (precision + 1);
                true
            } else if hi2.bits() <= threshold {
                lo = lo2 >> precision;
                hi = (hi2 + ((&one << precision) - &one)) >> precision;
                false
            } else {
                precision *= 2;
                continue 'escalate;
            };
            if f_bit != y_bit {
                return f_bit;
            }
        }
        // All c exponent bits match; the mantissa's log keeps going
        // (it is irrational), so the exponent is strictly smaller.
        return false;
    }
    unreachable!("interval precision cap hit while comparing against an irrational")
}

/// Decides `2^(p/q) > m` exactly for a general rational exponent.
/// Sizes are guarded: the residual comparison computes `m^q`.
pub fn pow2_gt_rational(p: u64, q: u64, m: &BigUint) -> Result<bool> {
    if q == 0 {
        return Err(Error::Domain("zero denominator".into()));
    }
    if m.is_zero() {
        return Ok(true);
    }
    let bits = m.bits();
    if p / q >= bits {
        return Ok(true);
    }
    if p.div_ceil(q) < bits {
        return Ok(false);
    }
    if q.saturating_mul(bits) > (1 << 27) {
        return Err(Error::ResourceLimit(format!(
            "exact comparison m^{q} with {bits}-bit m is over the size cap"
        )));
    }
    Ok((BigUint::one() << p) > m.pow(q as u32))
}

/// Three-way exact comparison of a positive rational `x` against
/// `(a/b)^w` for positive integers `a, b` and a nonnegative rational `w`.
pub fn cmp_rational_vs_ratio_pow(
    x: &BigRational,
    a: u64,
    b: u64,
    w: &BigRational,
) -> Result<std::cmp::Ordering> {
    if a == 0 || b == 0 {
        return Err(Error::Domain("ratio base must be positive".into()));
    }
    if x.is_negative() || x.is_zero() {
        return Err(Error::Domain("left side must be positive".into()));
    }
    if w.is_negative() {
        return Err(Error::Domain("exponent must be nonnegative".into()));
    }
    let wn = w
        .numer()
        .to_u64()
        .ok_or_else(|| Error::ResourceLimit("exponent numerator too large".into()))?;
    let wd = w
        .denom()
        .to_u64()
        .ok_or_else(|| Error::ResourceLimit("exponent denominator too large".into()))?;
    let xu = x.numer().magnitude();
    let xv = x.denom().magnitude();
    let cost = wd.saturating_mul(xu.bits().max(xv.bits()))
        + wn.saturating_mul(64 - a.leading_zeros().min(b.leading_zeros()) as u64);
    if cost > (1 << 27) {
        return Err(Error::ResourceLimit("ratio power comparison over the size cap".into()));
    }
    // x^wd vs (a/b)^wn  <=>  xu^wd * b^wn  vs  xv^wd * a^wn.
    let lhs = xu.pow(wd as u32) * BigUint::from(b).pow(wn as u32);
    let rhs = xv.pow(wd as u32) * BigUint::from(a).pow(wn as u32);
    Ok(lhs.cmp(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitRng;
    use num_traits::FromPrimitive;
    use std::cmp::Ordering;

    fn w(num: u128, ld: u32) -> DyadicWeight {
        DyadicWeight::new(num, ld)
    }

    /// Independent oracle: fully expanded `2^p` vs `m^(2^ld)`.
    fn oracle_pow2_gt(wt: &DyadicWeight, m: &BigUint) -> bool {
        if m.is_zero() {
            return true;
        }
        let p = wt.numerator() as u64;
        let q = 1u32 << wt.log2_denominator();
        (BigUint::one() << p) > m.pow(q)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(10, 0), BigUint::one());
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial_partial_sum(10, 2), BigUint::from(11u32));
        assert_eq!(binomial_partial_sum(2, 2), BigUint::from(3u32));
        // Row sums: sum of a full row is 2^n.
        assert_eq!(binomial_partial_sum(12, 13), BigUint::from(1u32 << 12));
    }

    #[test]
    fn threshold_examples() {
        // 2^2 = 4 > 3
        assert!(pow2_gt(&w(2, 0), &BigUint::from(3u32)));
        // 2^(3/2) ~ 2.83 < 3, decided by 2^3 < 3^2
        assert!(!pow2_gt(&w(3, 1), &BigUint::from(3u32)));
        // any positive exponent beats 1
        assert!(pow2_gt(&w(1, 9), &BigUint::one()));
        assert!(!pow2_gt(&DyadicWeight::ZERO, &BigUint::one()));
        // powers of two against fractional exponents
        assert!(pow2_gt(&w(9, 2), &BigUint::from(4u32))); // 2^(2.25) > 4
        assert!(!pow2_gt(&w(7, 2), &BigUint::from(4u32))); // 2^(1.75) < 4
        assert!(!pow2_gt(&w(2, 0), &BigUint::from(4u32))); // equality is not >
    }

    #[test]
    fn matches_expanded_oracle_on_random_inputs() {
        let mut rng = SplitRng::new(2024);
        for _ in 0..4000 {
            let ld = (rng.next_u64() % 7) as u32;
            let num = 1 + rng.next_u64() % (40 << ld);
            let m = BigUint::from(1 + rng.next_u64() % 5000);
            let wt = w(num as u128, ld);
            assert_eq!(
                pow2_gt(&wt, &m),
                oracle_pow2_gt(&wt, &m),
                "w = {num}/2^{ld}, m = {m}"
            );
        }
    }

    #[test]
    fn interval_path_agrees_with_chain() {
        // Force near-boundary comparisons with denominators large enough to
        // make several squarings necessary, and check against the oracle.
        let mut rng = SplitRng::new(77);
        for _ in 0..300 {
            let ld = 6 + (rng.next_u64() % 3) as u32;
            let m = BigUint::from(3 + rng.next_u64() % 1000);
            let bits = m.bits() as u128;
            // Exponent inside the undecided band (bits-1, bits).
            let num = ((bits - 1) << ld) + 1 + (rng.next_u64() as u128 % (((1u128) << ld) - 1));
            let wt = w(num, ld);
            let by_chain = pow2_gt(&wt, &m);
            let by_interval = interval_decide(
                &m,
                m.bits() - 1,
                &BigUint::from(num - ((bits - 1) << ld)),
                ld,
            );
            assert_eq!(by_chain, by_interval, "w = {num}/2^{ld}, m = {m}");
            assert_eq!(by_chain, oracle_pow2_gt(&wt, &m));
        }
    }

    #[test]
    fn rational_exponent_comparison() {
        // Least n with 2^(n/2) > n + 1 is 6.
        for n in 1..=5u64 {
            assert!(!pow2_gt_rational(n, 2, &BigUint::from(n + 1)).unwrap());
        }
        assert!(pow2_gt_rational(6, 2, &BigUint::from(7u32)).unwrap());
        assert!(pow2_gt_rational(0, 3, &BigUint::zero()).unwrap());
        assert!(pow2_gt_rational(5, 0, &BigUint::one()).is_err());
    }

    #[test]
    fn ratio_power_comparison() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        // (3/2)^2 = 9/4 against 2: pow is larger.
        assert_eq!(
            cmp_rational_vs_ratio_pow(&r(2, 1), 3, 2, &r(2, 1)).unwrap(),
            Ordering::Less
        );
        // (3/2)^1 = 3/2 against 2: pow is smaller.
        assert_eq!(
            cmp_rational_vs_ratio_pow(&r(2, 1), 3, 2, &r(1, 1)).unwrap(),
            Ordering::Greater
        );
        // Exact equality: (9/4) vs (3/2)^2.
        assert_eq!(
            cmp_rational_vs_ratio_pow(&r(9, 4), 3, 2, &r(2, 1)).unwrap(),
            Ordering::Equal
        );
        // Fractional exponent: 2 vs (3/2)^(3/2): 2^2 = 4 vs (3/2)^3 = 27/8.
        assert_eq!(
            cmp_rational_vs_ratio_pow(&r(2, 1), 3, 2, &r(3, 2)).unwrap(),
            Ordering::Greater
        );
        assert!(cmp_rational_vs_ratio_pow(&r(-1, 1), 3, 2, &r(1, 1)).is_err());
    }

    #[test]
    fn log2_reporting() {
        assert_eq!(log2_f64(&BigUint::from(8u32)), 3.0);
        let big = BigUint::from_f64(2.0f64).unwrap().pow(100);
        assert!((log2_f64(&big) - 100.0).abs() < 1e-9);
    }
}
