use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::TensorError;

/// An exact dyadic rational `numerator / 2^exponent`.
///
/// Kept in canonical form: the numerator is odd or zero, and the exponent is
/// zero when the numerator is zero. Addition, subtraction and multiplication
/// are closed and exact; there is no rounding anywhere. Arithmetic uses
/// checked `i128` operations and panics on overflow rather than ever
/// producing a wrong value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: i128,
    exponent: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { numerator: 0, exponent: 0 };
    pub const ONE: Dyadic = Dyadic { numerator: 1, exponent: 0 };

    /// `numerator / 2^exponent`, reduced to canonical form.
    pub fn new(numerator: i128, exponent: u32) -> Self {
        let mut d = Dyadic { numerator, exponent };
        d.canonicalize();
        d
    }

    pub fn from_int(n: i128) -> Self {
        Dyadic::new(n, 0)
    }

    /// `1 / 2^exponent`.
    pub fn inv_pow2(exponent: u32) -> Self {
        Dyadic { numerator: 1, exponent }
    }

    pub fn numerator(&self) -> i128 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    pub fn is_one(&self) -> bool {
        self.numerator == 1 && self.exponent == 0
    }

    pub fn is_integer(&self) -> bool {
        self.exponent == 0
    }

    /// Integer value when the exponent is zero.
    pub fn as_integer(&self) -> Option<i128> {
        self.is_integer().then_some(self.numerator)
    }

    pub fn abs(&self) -> Self {
        Dyadic { numerator: self.numerator.abs(), exponent: self.exponent }
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / (self.exponent as f64).exp2()
    }

    /// Both values rewritten over the common denominator `2^max_exp`.
    fn aligned(self, other: Self) -> (i128, i128, u32) {
        let exp = self.exponent.max(other.exponent);
        let a = self
            .numerator
            .checked_shl(exp - self.exponent)
            .expect("dyadic alignment overflow");
        let b = other
            .numerator
            .checked_shl(exp - other.exponent)
            .expect("dyadic alignment overflow");
        (a, b, exp)
    }

    fn canonicalize(&mut self) {
        if self.numerator == 0 {
            self.exponent = 0;
            return;
        }
        let shift = (self.numerator.trailing_zeros()).min(self.exponent);
        self.numerator >>= shift;
        self.exponent -= shift;
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::ZERO
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(rhs);
        Dyadic::new(a.checked_add(b).expect("dyadic addition overflow"), exp)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(rhs);
        Dyadic::new(a.checked_sub(b).expect("dyadic subtraction overflow"), exp)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::new(
            self.numerator
                .checked_mul(rhs.numerator)
                .expect("dyadic multiplication overflow"),
            self.exponent + rhs.exponent,
        )
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { numerator: -self.numerator, exponent: self.exponent }
    }
}

impl AddAssign for Dyadic {
    fn add_assign(&mut self, rhs: Dyadic) {
        *self = *self + rhs;
    }
}

impl SubAssign for Dyadic {
    fn sub_assign(&mut self, rhs: Dyadic) {
        *self = *self - rhs;
    }
}

impl MulAssign for Dyadic {
    fn mul_assign(&mut self, rhs: Dyadic) {
        *self = *self * rhs;
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |acc, x| acc + x)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n as i128)
    }
}

/// Text form used by the matrix text format: `5`, `-3`, `1/2^4`.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.exponent)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = TensorError;

    /// Accepts `n`, `n/2^k`, and `n/d` with `d` a power of two.
    fn from_str(s: &str) -> Result<Self, TensorError> {
        let bad = |_| TensorError::Parse(format!("invalid dyadic rational {s:?}"));
        match s.split_once('/') {
            None => Ok(Dyadic::from_int(s.trim().parse::<i128>().map_err(bad)?)),
            Some((num, den)) => {
                let numerator = num.trim().parse::<i128>().map_err(bad)?;
                let den = den.trim();
                let exponent = if let Some(exp) = den.strip_prefix("2^") {
                    exp.parse::<u32>().map_err(bad)?
                } else {
                    let d = den.parse::<u128>().map_err(bad)?;
                    if !d.is_power_of_two() {
                        return Err(TensorError::Parse(format!(
                            "denominator of {s:?} is not a power of two"
                        )));
                    }
                    d.trailing_zeros()
                };
                Ok(Dyadic::new(numerator, exponent))
            }
        }
    }
}

/// Wire form `[numerator, denominator_exponent]`.
impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.numerator, self.exponent).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (numerator, exponent): (i128, u32) = Deserialize::deserialize(deserializer)?;
        if numerator != 0 && numerator % 2 == 0 && exponent > 0 {
            return Err(D::Error::custom(format!(
                "non-canonical dyadic [{numerator}, {exponent}]"
            )));
        }
        Ok(Dyadic::new(numerator, exponent))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        assert_eq!(Dyadic::new(4, 4), Dyadic::new(1, 2));
        assert_eq!(Dyadic::new(0, 7), Dyadic::ZERO);
        assert_eq!(Dyadic::new(-6, 1), Dyadic::from_int(-3));
        assert_eq!(Dyadic::new(3, 2).numerator(), 3);
        assert_eq!(Dyadic::new(3, 2).exponent(), 2);
    }

    #[test]
    fn exact_arithmetic() {
        let quarter = Dyadic::inv_pow2(2);
        assert_eq!(quarter + quarter + quarter + quarter, Dyadic::ONE);
        assert_eq!(quarter * Dyadic::from_int(4), Dyadic::ONE);
        assert_eq!(Dyadic::ONE - quarter, Dyadic::new(3, 2));
        assert_eq!(quarter * quarter, Dyadic::inv_pow2(4));
    }

    #[test]
    fn ordering() {
        assert!(Dyadic::new(3, 2) < Dyadic::ONE);
        assert!(Dyadic::new(-1, 4) < Dyadic::ZERO);
        assert!(Dyadic::new(7, 4) > Dyadic::new(3, 2)); // 7/16 vs 12/16
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "5", "-3", "1/2^2", "-7/2^5"] {
            let d: Dyadic = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert_eq!("3/4".parse::<Dyadic>().unwrap(), Dyadic::new(3, 2));
        assert!("1/3".parse::<Dyadic>().is_err());
        assert!("x/2^2".parse::<Dyadic>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = Dyadic::new(-7, 5);
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, "[-7,5]");
        assert_eq!(serde_json::from_str::<Dyadic>(&json).unwrap(), d);
        assert!(serde_json::from_str::<Dyadic>("[4,1]").is_err());
    }
}
