//! Exact rational numbers.
//!
//! Every coefficient in the crate is a [`Rational`]: an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational as Rational;

/// Integer-valued rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`, reduced. Panics on a zero denominator.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `-p` or `p/q` (q nonzero).
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Least common multiple of the denominators (one for an empty slice).
pub fn denominator_lcm(values: &[Rational]) -> BigInt {
    values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Positive factor that turns `values` into coprime integers. Zero vectors map to one.
pub fn primitive_scale(values: &[Rational]) -> Rational {
    let lcm = denominator_lcm(values);
    let gcd = values
        .iter()
        .map(|v| (v.numer() * (&lcm / v.denom())).abs())
        .fold(BigInt::zero(), |acc, n| acc.gcd(&n));
    if gcd.is_zero() {
        Rational::one()
    } else {
        Rational::new(lcm, gcd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "3", "-7", "1/2", "-5/3"] {
            assert_eq!(format(&parse(s).unwrap()), s);
        }
        assert_eq!(parse("4/6").unwrap(), frac(2, 3));
        assert!(parse("1/0").is_none());
        assert!(parse("x").is_none());
    }

    #[test]
    fn primitive_scaling() {
        let v = [frac(1, 2), frac(1, 3)];
        let k = primitive_scale(&v);
        assert_eq!(k, int(6));
        let w = [int(4), int(-6)];
        assert_eq!(primitive_scale(&w), frac(1, 2));
        assert_eq!(primitive_scale(&[int(0)]), int(1));
    }
}
