use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::StatsError;

pub const MAX_BINOMIAL_N: u64 = 10_000;

/// An exact binomial probability under a fair coin, `numerator / 2^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinomialTail {
    pub k: u64,
    pub n: u64,
    #[serde(serialize_with = "decimal")]
    pub numerator: BigUint,
    #[serde(serialize_with = "decimal")]
    pub denominator: BigUint,
    /// `numerator / denominator` rounded to the nearest double (ties to even).
    pub p_float: f64,
}

fn decimal<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl BinomialTail {
    /// `numerator/denominator` in lowest terms.
    pub fn reduced(&self) -> (BigUint, BigUint) {
        if self.numerator.is_zero() {
            return (BigUint::zero(), BigUint::one());
        }
        let shift = self.numerator.trailing_zeros().unwrap_or(0).min(self.n);
        (&self.numerator >> shift, &self.denominator >> shift)
    }
}

fn check(k: u64, n: u64) -> Result<(), StatsError> {
    if n > MAX_BINOMIAL_N {
        return Err(StatsError::BadParameter(format!(
            "n must be <= {MAX_BINOMIAL_N}, got {n}"
        )));
    }
    if k > n {
        return Err(StatsError::BadParameter(format!("k = {k} exceeds n = {n}")));
    }
    Ok(())
}

/// `sum_{i=lo..=hi} C(n, i)` by walking the row from `C(n, n) = 1` downwards.
fn row_sum(n: u64, lo: u64, hi: u64) -> BigUint {
    let mut coeff = BigUint::one();
    let mut sum = BigUint::zero();
    let mut i = n;
    loop {
        if i <= hi && i >= lo {
            sum += &coeff;
        }
        if i == 0 || i <= lo {
            break;
        }
        // C(n, i-1) = C(n, i) * i / (n - i + 1)
        coeff = coeff * i / (n - i + 1);
        i -= 1;
    }
    sum
}

fn build(k: u64, n: u64, numerator: BigUint) -> BinomialTail {
    let p_float = dyadic_to_f64(&numerator, n);
    BinomialTail {
        k,
        n,
        numerator,
        denominator: BigUint::one() << n,
        p_float,
    }
}

/// `P(X >= k)` for `X ~ Binomial(n, 1/2)`, exactly.
pub fn binom_tail(k: u64, n: u64) -> Result<BinomialTail, StatsError> {
    check(k, n)?;
    Ok(build(k, n, row_sum(n, k, n)))
}

/// `P(X < k)`, the complement of [`binom_tail`].
pub fn binom_tail_below(k: u64, n: u64) -> Result<BinomialTail, StatsError> {
    check(k, n)?;
    let numerator = if k == 0 {
        BigUint::zero()
    } else {
        row_sum(n, 0, k - 1)
    };
    Ok(build(k, n, numerator))
}

fn pow2(e: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// `m * 2^e`, exact whenever the result is representable.
fn scale_pow2(mut x: f64, mut e: i64) -> f64 {
    while e > 1023 {
        x *= pow2(1023);
        e -= 1023;
    }
    while e < -1022 {
        x *= pow2(-1022);
        e += 1022;
    }
    x * pow2(e)
}

/// Correctly rounded `num / 2^n`, including the subnormal range.
fn dyadic_to_f64(num: &BigUint, n: u64) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let bits = num.bits() as i64;
    // Value lies in [2^exp, 2^(exp+1)).
    let exp = bits - 1 - n as i64;
    let precision = if exp >= -1022 { 53 } else { exp + 1075 };
    if precision < 0 {
        return 0.0;
    }
    if precision == 0 {
        // Between half and one minimum subnormal; the exact half ties to zero.
        let exact_half = num.trailing_zeros() == Some(bits as u64 - 1);
        return if exact_half { 0.0 } else { f64::from_bits(1) };
    }
    let drop = bits - precision;
    if drop <= 0 {
        let m = num.to_u64().expect("fits in 53 bits") as f64;
        return scale_pow2(m, -(n as i64));
    }
    let drop_u = drop as u64;
    let mut m = num >> drop_u;
    let rem = num - (&m << drop_u);
    let half = BigUint::one() << (drop_u - 1);
    let odd = m.bit(0);
    if rem > half || (rem == half && odd) {
        m += 1u32;
    }
    let m = m.to_u64().expect("fits in 54 bits") as f64;
    scale_pow2(m, drop - n as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Signed;
    use proptest::prelude::*;

    /// Independent C(n, k) by the multiplicative formula.
    fn choose(n: u64, k: u64) -> BigUint {
        let mut acc = BigUint::one();
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    }

    #[test]
    fn published_tails() {
        let t = binom_tail(9, 12).unwrap();
        assert_eq!(t.numerator, BigUint::from(299u32));
        assert_eq!(t.denominator, BigUint::from(4096u32));
        assert!((t.p_float - 0.073).abs() < 5e-4);

        let t = binom_tail(14, 17).unwrap();
        assert_eq!(t.numerator, BigUint::from(834u32));
        assert_eq!(t.denominator, BigUint::from(131072u32));
        assert!((t.p_float - 0.006).abs() < 5e-4);
        assert_eq!(t.reduced(), (BigUint::from(417u32), BigUint::from(65536u32)));
    }

    #[test]
    fn whole_row_is_one() {
        for n in [0, 1, 5, 64, 1000] {
            let t = binom_tail(0, n).unwrap();
            assert_eq!(t.numerator, t.denominator);
            assert_eq!(t.p_float, 1.0);
        }
    }

    #[test]
    fn matches_choose_oracle() {
        for n in 0..=30u64 {
            for k in 0..=n {
                let want: BigUint = (k..=n).map(|i| choose(n, i)).sum();
                let got = binom_tail(k, n).unwrap();
                assert_eq!(got.numerator, want);
                // Exact for these magnitudes.
                assert_eq!(got.p_float, want.to_f64().unwrap() / 2f64.powi(n as i32));
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(binom_tail(5, 4).is_err());
        assert!(binom_tail(0, MAX_BINOMIAL_N + 1).is_err());
        assert!(binom_tail(0, MAX_BINOMIAL_N).is_ok());
    }

    /// Exact (mantissa, exponent) of a finite positive double.
    fn f64_as_dyadic(x: f64) -> (BigInt, i64) {
        let bits = x.to_bits();
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        if exp_bits == 0 {
            (BigInt::from(frac), -1074)
        } else {
            (BigInt::from(frac | (1u64 << 52)), exp_bits - 1075)
        }
    }

    /// |num/2^n - x| as an exact dyadic numerator over 2^scale.
    fn distance(num: &BigUint, n: u64, x: f64, scale: i64) -> BigInt {
        let exact = BigInt::from(num.clone()) << (scale - n as i64) as usize;
        let (m, e) = f64_as_dyadic(x);
        let approx = m << (scale + e) as usize;
        (exact - approx).abs()
    }

    #[test]
    fn float_is_correctly_rounded_for_large_rows() {
        for &n in &[200u64, 1100, 2500, 10_000] {
            for &frac in &[0.5, 0.55, 0.7, 0.9, 0.97, 1.0] {
                let k = ((n as f64) * frac) as u64;
                let t = binom_tail(k, n).unwrap();
                let p = t.p_float;
                if p == 0.0 {
                    // Exact value must be at most half the smallest subnormal.
                    let d = distance(&t.numerator, n, f64::from_bits(1), 12000);
                    let half = BigInt::one() << (12000 - 1075) as usize;
                    assert!(d >= half);
                    continue;
                }
                let scale = 12000;
                let here = distance(&t.numerator, n, p, scale);
                let up = distance(&t.numerator, n, f64::from_bits(p.to_bits() + 1), scale);
                let down = distance(&t.numerator, n, f64::from_bits(p.to_bits() - 1), scale);
                assert!(here <= up && here <= down, "n={n} k={k}");
            }
        }
    }

    proptest! {
        #[test]
        fn tail_plus_complement_is_whole(n in 0u64..400, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac) as u64;
            let hi = binom_tail(k, n).unwrap();
            let lo = binom_tail_below(k, n).unwrap();
            prop_assert_eq!(&hi.numerator + &lo.numerator, hi.denominator);
        }

        #[test]
        fn tail_is_monotone(n in 1u64..300, frac in 0.0f64..1.0) {
            let k = ((n as f64) * frac) as u64;
            let a = binom_tail(k, n).unwrap();
            let b = binom_tail(k + 1, n).unwrap();
            prop_assert!(b.numerator <= a.numerator);
            prop_assert!(b.p_float <= a.p_float);
        }
    }
}
