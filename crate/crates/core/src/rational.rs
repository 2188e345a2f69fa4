//! Exact rational scalars.
//!
//! All numeric values in this crate are `Rat`s: arbitrary-precision
//! rationals kept in lowest terms with a positive denominator.  They
//! serialize as `"p/q"` strings (`"p"` when the denominator is 1), which is
//! exactly what `Display` produces.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub type Rat = num_rational::BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `num/den` as an exact rational.  Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Integer power with negative exponents allowed.
///
/// Panics when asked for a negative power of zero; callers guard zero bases
/// (that is what genericity of the torus weights is for).
pub fn rat_pow(base: &Rat, exp: i64) -> Rat {
    if exp == 0 {
        return Rat::one();
    }
    if base.is_zero() {
        assert!(exp > 0, "negative power of zero");
        return Rat::zero();
    }
    let mut acc = Rat::one();
    for _ in 0..exp.unsigned_abs() {
        acc *= base;
    }
    if exp < 0 {
        acc = acc.recip();
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Signed rational binomial (`(-1)^i C(n,k)` combinations come up a lot).
pub fn binomial_rat(n: u64, k: u64) -> Rat {
    Rat::from_integer(binomial(n, k))
}

/// Parse a `"p/q"` or `"p"` string.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (s, None),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| format!("invalid integer {num:?} in rational {s:?}"))?;
    let d: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| format!("invalid integer {d:?} in rational {s:?}"))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(format!("zero denominator in rational {s:?}"));
    }
    Ok(Rat::new(n, d))
}

/// `(-1)^k` as a rational.
pub fn sign(k: u64) -> Rat {
    if k.is_multiple_of(2) {
        Rat::one()
    } else {
        -Rat::one()
    }
}
