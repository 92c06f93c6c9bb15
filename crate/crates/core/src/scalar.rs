//! Exact rational scalars.

use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Canonical text form: `a` for integers, `a/b` otherwise, with `b > 0` and `gcd(a, b) = 1`.
pub fn format(q: &Rational) -> String {
    q.to_string()
}

/// Parses `a`, `-a`, `a/b` (optionally surrounded by whitespace).
pub fn parse(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Argument(format!("not a rational number: {text:?}"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Argument(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Binomial coefficient C(n, k) (zero when k > n).
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_format() {
        assert_eq!(format(&ratio(6, -4)), "-3/2");
        assert_eq!(format(&int(5)), "5");
        assert_eq!(parse(" -3/2 ").unwrap(), ratio(-3, 2));
        assert_eq!(parse("4/2").unwrap(), int(2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(4, 0), 1);
    }
}
