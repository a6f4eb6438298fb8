use std::cmp::Ordering;
use std::fmt::Debug;

use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};

use crate::{LpError, Rational};

/// Arithmetic the simplex needs from a number type.
///
/// Every operation is fallible so the exact backend can surface
/// coefficient growth as [`LpError::Overflow`] instead of wrapping.
pub trait Scalar: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Result<Self, LpError>;
    fn add(&self, rhs: &Self) -> Result<Self, LpError>;
    fn sub(&self, rhs: &Self) -> Result<Self, LpError>;
    fn mul(&self, rhs: &Self) -> Result<Self, LpError>;
    fn div(&self, rhs: &Self) -> Result<Self, LpError>;
    fn neg(&self) -> Self;
    /// Sign of the value; the float backend treats `|x| <= 1e-9` as zero.
    fn sign(&self) -> Ordering;
    fn to_f64(&self) -> f64;

    fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }
    fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }
    fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }
    /// Three-way comparison under the backend's tolerance.
    fn cmp_tol(&self, rhs: &Self) -> Result<Ordering, LpError> {
        Ok(self.sub(rhs)?.sign())
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_rational(r: &Rational) -> Result<Self, LpError> {
        Ok(*r)
    }
    fn add(&self, rhs: &Self) -> Result<Self, LpError> {
        self.checked_add(rhs).ok_or(LpError::Overflow)
    }
    fn sub(&self, rhs: &Self) -> Result<Self, LpError> {
        self.checked_sub(rhs).ok_or(LpError::Overflow)
    }
    fn mul(&self, rhs: &Self) -> Result<Self, LpError> {
        self.checked_mul(rhs).ok_or(LpError::Overflow)
    }
    fn div(&self, rhs: &Self) -> Result<Self, LpError> {
        self.checked_div(rhs).ok_or(LpError::Overflow)
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn sign(&self) -> Ordering {
        if Signed::is_positive(self) {
            Ordering::Greater
        } else if Signed::is_negative(self) {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Zero tolerance of the float backend.
pub const FLOAT_EPS: f64 = 1e-9;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &Rational) -> Result<Self, LpError> {
        ToPrimitive::to_f64(r).ok_or(LpError::Overflow)
    }
    fn add(&self, rhs: &Self) -> Result<Self, LpError> {
        Ok(self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Result<Self, LpError> {
        Ok(self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Result<Self, LpError> {
        Ok(self * rhs)
    }
    fn div(&self, rhs: &Self) -> Result<Self, LpError> {
        Ok(self / rhs)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sign(&self) -> Ordering {
        if *self > FLOAT_EPS {
            Ordering::Greater
        } else if *self < -FLOAT_EPS {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}
