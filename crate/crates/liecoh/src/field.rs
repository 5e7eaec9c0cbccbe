//! Exact coefficient fields: arbitrary-precision rationals and prime fields.
//!
//! All linear algebra in this crate is generic over [`Field`]. The field is a
//! small value object (zero-sized for `Q`, one word for `F_p`) and elements are
//! an associated type, so prime-field elements stay plain `u64`s.

use num::bigint::BigInt;
use num::rational::{BigRational, Ratio};
use num::{One, Zero};
use std::fmt::Debug;

/// Field operations used by the elimination and cohomology code.
pub trait Field: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b))
    }

    /// `a - f*b`, the inner operation of row elimination.
    fn mul_sub(&self, a: &Self::Elem, f: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.sub(a, &self.mul(f, b))
    }

    fn from_i128(&self, n: i128) -> Self::Elem;

    /// Embed an exact machine-word rational. For a prime field the denominator
    /// must be invertible.
    fn from_ratio(&self, r: Ratio<i128>) -> Self::Elem;

    fn from_big_rational(&self, r: &BigRational) -> Self::Elem;

    /// Canonical exact rendering: `"n"` or `"n/d"`.
    fn exact_string(&self, a: &Self::Elem) -> String;

    /// `Some(p)` for a prime field, `None` in characteristic zero.
    fn characteristic(&self) -> Option<u64> {
        None
    }
}

/// The rational numbers with entries kept in lowest terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn from_i128(&self, n: i128) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(&self, r: Ratio<i128>) -> BigRational {
        BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
    }
    fn from_big_rational(&self, r: &BigRational) -> BigRational {
        r.clone()
    }
    fn exact_string(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

/// The prime field `F_p` for a prime `p < 2^63`, elements in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

/// Default modulus for hint-mode runs: a Mersenne prime that fits a machine word.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 2 || p >= (1 << 63) || !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn reduce_i128(&self, n: i128) -> u64 {
        let p = self.p as i128;
        (((n % p) + p) % p) as u64
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - *a
        }
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (*a as i128, self.p as i128);
        let (mut s0, mut s1) = (1i128, 0i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        self.reduce_i128(s0)
    }
    fn from_i128(&self, n: i128) -> u64 {
        self.reduce_i128(n)
    }
    fn from_ratio(&self, r: Ratio<i128>) -> u64 {
        let num = self.reduce_i128(*r.numer());
        let den = self.reduce_i128(*r.denom());
        assert!(den != 0, "denominator divisible by modulus {}", self.p);
        self.mul(&num, &self.inv(&den))
    }
    fn from_big_rational(&self, r: &BigRational) -> u64 {
        let p = BigInt::from(self.p);
        let modp = |x: &BigInt| -> u64 {
            let m = ((x % &p) + &p) % &p;
            let (_, digits) = m.to_u64_digits();
            digits.first().copied().unwrap_or(0)
        };
        let num = modp(r.numer());
        let den = modp(r.denom());
        assert!(den != 0, "denominator divisible by modulus {}", self.p);
        self.mul(&num, &self.inv(&den))
    }
    fn exact_string(&self, a: &u64) -> String {
        a.to_string()
    }
    fn characteristic(&self) -> Option<u64> {
        Some(self.p)
    }
}

/// Which field a computation runs over; the CLI-facing descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Rational,
    Prime(u64),
}

impl FieldKind {
    /// Parse `Q`, `Fp`, or `Fp:<prime>`. The bare `Fp` modulus comes from the
    /// `LIECOH_PRIME` environment variable when set, else [`DEFAULT_PRIME`].
    pub fn parse(s: &str) -> Result<FieldKind, FieldError> {
        if s == "Q" || s == "q" {
            return Ok(FieldKind::Rational);
        }
        if let Some(rest) = s.strip_prefix("Fp").or_else(|| s.strip_prefix("fp")) {
            let p = if rest.is_empty() {
                match std::env::var("LIECOH_PRIME") {
                    Ok(v) => v
                        .parse::<u64>()
                        .map_err(|_| FieldError::BadDescriptor(s.to_string()))?,
                    Err(_) => DEFAULT_PRIME,
                }
            } else if let Some(num) = rest.strip_prefix(':') {
                num.parse::<u64>()
                    .map_err(|_| FieldError::BadDescriptor(s.to_string()))?
            } else {
                return Err(FieldError::BadDescriptor(s.to_string()));
            };
            PrimeField::new(p)?;
            return Ok(FieldKind::Prime(p));
        }
        Err(FieldError::BadDescriptor(s.to_string()))
    }
}

impl std::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldKind::Rational => write!(f, "Q"),
            FieldKind::Prime(p) => write!(f, "Fp({p})"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not a prime in the supported range")]
    NotPrime(u64),
    #[error("unrecognized field descriptor `{0}` (expected Q, Fp, or Fp:<prime>)")]
    BadDescriptor(String),
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let pow_mod = |base: u64, mut exp: u64| -> u64 {
        let m = n as u128;
        let mut acc: u128 = 1;
        let mut b = base as u128 % m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % m;
            }
            b = b * b % m;
            exp >>= 1;
        }
        acc as u64
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Parse an exact rational string: optional sign, digits, optional `/digits`.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| format!("bad numerator in `{s}`"))?;
    let den: BigInt = den_str
        .parse()
        .map_err(|_| format!("bad denominator in `{s}`"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_canonical_form() {
        let f = Rationals;
        let x = f.from_ratio(Ratio::new(4, -6));
        assert_eq!(f.exact_string(&x), "-2/3");
        let y = f.from_ratio(Ratio::new(6, 3));
        assert_eq!(f.exact_string(&y), "2");
    }

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(DEFAULT_PRIME).unwrap();
        for a in [1u64, 2, 7, 12345, DEFAULT_PRIME - 1] {
            let inv = f.inv(&a);
            assert_eq!(f.mul(&a, &inv), 1);
        }
    }

    #[test]
    fn prime_field_reduce_negative() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.from_i128(-1), 6);
        assert_eq!(f.from_ratio(Ratio::new(1, 2)), 4); // 2*4 = 8 = 1 mod 7
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(PrimeField::new(91).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(2).is_ok());
    }

    #[test]
    fn primality_small_table() {
        let primes: Vec<u64> = (0..100u64).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]
        );
        assert!(is_prime_u64(DEFAULT_PRIME));
    }

    #[test]
    fn field_kind_parsing() {
        assert_eq!(FieldKind::parse("Q").unwrap(), FieldKind::Rational);
        assert_eq!(
            FieldKind::parse("Fp:65537").unwrap(),
            FieldKind::Prime(65537)
        );
        assert!(FieldKind::parse("Fp:65536").is_err());
        assert!(FieldKind::parse("R").is_err());
    }

    #[test]
    fn rational_string_parsing() {
        assert_eq!(parse_rational("-3/9").unwrap().to_string(), "-1/3");
        assert_eq!(parse_rational("5").unwrap().to_string(), "5");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
