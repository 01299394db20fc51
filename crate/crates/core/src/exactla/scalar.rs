use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rationals.
pub type Rational = BigRational;

/// Prime used when a prime field is requested without a modulus.
pub const DEFAULT_PRIME: u64 = 32003;

/// Largest supported modulus; keeps products of residues inside an `i64`.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

/// The coefficient field k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum FieldSpec {
    #[default]
    Rationals,
    PrimeField(u64),
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) && p <= MAX_PRIME {
            Ok(FieldSpec::PrimeField(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn check(&self) -> Result<()> {
        match *self {
            FieldSpec::Rationals => Ok(()),
            FieldSpec::PrimeField(p) => Self::prime(p).map(|_| ()),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "QQ"),
            FieldSpec::PrimeField(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `QQ`, `Fp` (default prime) and `Fp:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("qq") {
            return Ok(FieldSpec::Rationals);
        }
        if s.eq_ignore_ascii_case("fp") {
            return FieldSpec::prime(DEFAULT_PRIME);
        }
        match s.split_once(':') {
            Some((head, p)) if head.eq_ignore_ascii_case("fp") => {
                let p = p.trim().parse::<u64>().map_err(|e| Error::Parse(format!("bad prime {p:?}: {e}")))?;
                FieldSpec::prime(p)
            }
            _ => Err(Error::Parse(format!("unknown field {s:?}; expected QQ or Fp:<p>"))),
        }
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Prime {
            #[serde(rename = "Fp")]
            p: u64,
        }
        match self {
            FieldSpec::Rationals => s.serialize_str("QQ"),
            FieldSpec::PrimeField(p) => Prime { p: *p }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Name(String),
            Prime {
                #[serde(rename = "Fp")]
                p: u64,
            },
        }
        let field = match Raw::deserialize(d)? {
            Raw::Name(name) => name.parse::<FieldSpec>(),
            Raw::Prime { p } => FieldSpec::prime(p),
        };
        field.map_err(serde::de::Error::custom)
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= p {
        if p % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

/// An exact field element usable by every algorithm in this crate.
///
/// Arithmetic comes from `num-traits`; the field-specific hooks cover what
/// the traits cannot express: inverses, and embedding integers when the
/// field is only known at runtime.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn inverse(&self) -> Option<Self>;

    fn from_int(n: i64, field: &FieldSpec) -> Self;

    /// Parses `"n"` or `"p/q"` as an element of `field`.
    fn parse(text: &str, field: &FieldSpec) -> Result<Self>;

    /// Whether this scalar type can represent `field`.
    fn supports(field: &FieldSpec) -> bool;
}

fn split_fraction(text: &str) -> Result<(BigInt, BigInt)> {
    let text = text.trim();
    let parse = |s: &str| {
        s.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad coefficient {text:?}: {e}")))
    };
    match text.split_once('/') {
        Some((n, q)) => Ok((parse(n)?, parse(q)?)),
        None => Ok((parse(text)?, BigInt::one())),
    }
}

impl Scalar for Rational {
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_int(n: i64, _field: &FieldSpec) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn parse(text: &str, field: &FieldSpec) -> Result<Self> {
        if !Self::supports(field) {
            return Err(Error::FieldMismatch(format!("rational scalar cannot represent {field}")));
        }
        let (n, q) = split_fraction(text)?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        Ok(BigRational::new(n, q))
    }

    fn supports(field: &FieldSpec) -> bool {
        matches!(field, FieldSpec::Rationals)
    }
}

/// Element of a prime field whose modulus is chosen at runtime.
///
/// `Zero::zero()` and `One::one()` cannot see the modulus, so a value with
/// `modulus == 0` is a plain integer that is reduced the first time it meets
/// a bound element.
#[derive(Clone, Copy, Debug)]
pub struct Fp {
    value: i64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: i64, p: u64) -> Self {
        debug_assert!(p >= 2 && p <= MAX_PRIME);
        Fp { value: value.rem_euclid(p as i64), modulus: p }
    }

    /// Residue in `[0, p)`; unbound integers are returned as-is.
    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn modulus(&self) -> Option<u64> {
        (self.modulus != 0).then_some(self.modulus)
    }

    fn bind(self, p: u64) -> Self {
        if self.modulus == 0 {
            Fp::new(self.value, p)
        } else {
            debug_assert_eq!(self.modulus, p, "mixing prime fields");
            self
        }
    }

    fn common(a: Self, b: Self) -> (Self, Self, u64) {
        let p = if a.modulus != 0 { a.modulus } else { b.modulus };
        if p == 0 {
            (a, b, 0)
        } else {
            (a.bind(p), b.bind(p), p)
        }
    }
}

impl PartialEq for Fp {
    fn eq(&self, other: &Self) -> bool {
        let (a, b, _) = Fp::common(*self, *other);
        a.value == b.value
    }
}

impl Eq for Fp {}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        let (a, b, p) = Fp::common(self, rhs);
        if p == 0 {
            Fp { value: a.value.checked_add(b.value).expect("integer overflow"), modulus: 0 }
        } else {
            Fp::new(a.value + b.value, p)
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self + (-rhs)
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        let (a, b, p) = Fp::common(self, rhs);
        if p == 0 {
            Fp { value: a.value.checked_mul(b.value).expect("integer overflow"), modulus: 0 }
        } else {
            Fp::new(a.value * b.value, p)
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        if self.modulus == 0 {
            Fp { value: -self.value, modulus: 0 }
        } else {
            Fp::new(-self.value, self.modulus)
        }
    }
}

impl Zero for Fp {
    fn zero() -> Self {
        Fp { value: 0, modulus: 0 }
    }

    fn is_zero(&self) -> bool {
        self.value == 0
    }
}

impl One for Fp {
    fn one() -> Self {
        Fp { value: 1, modulus: 0 }
    }
}

impl Scalar for Fp {
    fn inverse(&self) -> Option<Self> {
        if self.modulus == 0 {
            // only the units of every prime field
            return match self.value {
                1 | -1 => Some(*self),
                _ => None,
            };
        }
        if self.value == 0 {
            return None;
        }
        let p = self.modulus as i64;
        let (mut r0, mut r1) = (p, self.value);
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        Some(Fp::new(s0, self.modulus))
    }

    fn from_int(n: i64, field: &FieldSpec) -> Self {
        match field {
            FieldSpec::PrimeField(p) => Fp::new(n, *p),
            FieldSpec::Rationals => panic!("Fp cannot represent the rationals"),
        }
    }

    fn parse(text: &str, field: &FieldSpec) -> Result<Self> {
        let FieldSpec::PrimeField(p) = *field else {
            return Err(Error::FieldMismatch("prime-field scalar cannot represent QQ".into()));
        };
        let (n, q) = split_fraction(text)?;
        let reduce = |x: &BigInt| -> i64 {
            let r = x % BigInt::from(p);
            let r = if r.is_negative() { r + BigInt::from(p) } else { r };
            i64::try_from(r).expect("residue fits")
        };
        let num = Fp::new(reduce(&n), p);
        let den = Fp::new(reduce(&q), p);
        let inv = den
            .inverse()
            .ok_or_else(|| Error::Parse(format!("denominator of {text:?} vanishes mod {p}")))?;
        Ok(num * inv)
    }

    fn supports(field: &FieldSpec) -> bool {
        matches!(field, FieldSpec::PrimeField(_))
    }
}
