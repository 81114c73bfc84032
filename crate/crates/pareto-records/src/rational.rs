//! Small helpers for arbitrary-precision rationals.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `1 / 2^e` as an exact rational.
pub fn pow2_inv(e: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << e)
}

/// `n` as an exact rational.
pub fn from_u64(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `1 / n` as an exact rational. Panics if `n == 0`.
pub fn inv_u64(n: u64) -> BigRational {
    assert!(n > 0, "division by zero");
    BigRational::new(BigInt::one(), BigInt::from(n))
}

/// Convert a rational to the nearest `f64`, correct to within one ulp even
/// when numerator and denominator individually overflow the `f64` range.
///
/// The naive `numer as f64 / denom as f64` breaks down once either side
/// exceeds ~1.8e308; record times in long simulations and the denominators of
/// exact probabilities (which grow like n!·n) both get there quickly. We
/// instead shift the numerator so the integer quotient carries about 64
/// significant bits, divide exactly, and scale back with an exact power of
/// two.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let negative = r.numer().sign() == Sign::Minus;
    let num = r.numer().abs().to_biguint().expect("abs is nonnegative");
    let den = r.denom().abs().to_biguint().expect("denominator is nonzero");

    // Aim for a quotient q with num ≈ q·den·2^shift and 2^63 ≤ q < 2^66.
    let shift = num.bits() as i64 - den.bits() as i64 - 64;
    let quotient = if shift >= 0 {
        (num >> shift as u64) / den
    } else {
        (num << (-shift) as u64) / den
    };
    let q = quotient
        .to_u128()
        .expect("quotient was scaled to roughly 64 bits");
    let magnitude = q as f64 * (shift as f64).exp2();
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

/// Render a float with 17 significant digits, enough to reconstruct the exact
/// bit pattern on read-back.
pub fn f64_repr(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::FromPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_values_match_direct_division() {
        for (n, d) in [(1i64, 3i64), (2, 7), (-5, 9), (1, 1), (7, 60), (167, 600)] {
            let exact = n as f64 / d as f64;
            let got = ratio_to_f64(&rat(n, d));
            assert!((got - exact).abs() <= exact.abs() * 1e-15, "{n}/{d}: {got} vs {exact}");
        }
        assert_eq!(ratio_to_f64(&rat(0, 5)), 0.0);
        assert_eq!(ratio_to_f64(&rat(1, 2)), 0.5);
        assert_eq!(ratio_to_f64(&rat(-3, 4)), -0.75);
    }

    #[test]
    fn huge_numerator_and_denominator_cancel() {
        // (10^400 + junk) / 10^400 ≈ 1, though both sides overflow f64.
        let big = BigInt::from(10u32).pow(400);
        let r = BigRational::new(&big + BigInt::from(12345u32), big.clone());
        let got = ratio_to_f64(&r);
        assert!((got - 1.0).abs() < 1e-12, "{got}");

        // 3·10^400 / 10^400 = 3 exactly.
        let r = BigRational::new(BigInt::from(3u32) * &big, big);
        assert_eq!(ratio_to_f64(&r), 3.0);
    }

    #[test]
    fn extreme_magnitudes_saturate_cleanly() {
        let big = BigInt::from(10u32).pow(400);
        let tiny = BigRational::new(BigInt::one(), big.clone());
        assert_eq!(ratio_to_f64(&tiny), 0.0);
        let huge = BigRational::new(big, BigInt::one());
        assert!(ratio_to_f64(&huge).is_infinite());
    }

    #[test]
    fn large_representable_values_are_close() {
        // ~1e194, the scale of record times in long runs: 7^230 / 3^10.
        let r = BigRational::new(BigInt::from(7u32).pow(230), BigInt::from(3u32).pow(10));
        let expected = 230.0 * 7f64.ln() - 10.0 * 3f64.ln();
        let got = ratio_to_f64(&r).ln();
        assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
    }

    #[test]
    fn power_of_two_helper() {
        assert_eq!(pow2_inv(0), BigRational::from_f64(1.0).unwrap());
        assert_eq!(pow2_inv(3), rat(1, 8));
        assert_eq!(ratio_to_f64(&pow2_inv(7)), 1.0 / 128.0);
    }

    #[test]
    fn seventeen_digit_rendering_round_trips() {
        for x in [0.1, 0.50334, 2.0 / 3.0, 1e-300, 1.7976931348623157e308, -0.125] {
            let s = f64_repr(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }
}
