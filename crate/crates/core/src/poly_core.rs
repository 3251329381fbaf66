//! Dense univariate polynomials with arbitrary-precision integer
//! coefficients, and their evaluation over exact rationals and over complex
//! floating-point numbers at two precisions.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, Signed, ToPrimitive, Zero};
use thiserror::Error;
use twofloat::TwoFloat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("evaluation overflowed at {precision} precision")]
    OverflowAtPrecision { precision: &'static str },
}

/// Working precision for floating-point evaluation and root finding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Precision {
    /// IEEE double, about 16 significant digits.
    #[default]
    Standard,
    /// Double-double, about 32 significant digits.
    Extended,
}

/// Floating-point scalar usable for polynomial evaluation and root finding.
pub trait Real: Float + Send + Sync + fmt::Debug + 'static {
    const NAME: &'static str;

    /// Nearest representable value to an integer.
    fn from_bigint(c: &BigInt) -> Self;

    fn from_f64(x: f64) -> Self;

    fn to_f64(self) -> f64;

    /// Unit roundoff of the format.
    fn unit_roundoff() -> f64;
}

/// Splits an integer into a leading double and the double nearest the
/// remainder, so `hi + lo` carries about 106 significant bits.
fn split_bigint(c: &BigInt) -> (f64, f64) {
    let hi = c.to_f64().unwrap_or(f64::INFINITY);
    if !hi.is_finite() {
        return (if c.is_negative() { -hi.abs() } else { hi }, 0.0);
    }
    let rem = c - BigInt::from_f64(hi).expect("finite double is an integer here");
    (hi, rem.to_f64().unwrap_or(0.0))
}

impl Real for f64 {
    const NAME: &'static str = "standard";

    fn from_bigint(c: &BigInt) -> Self {
        let (hi, lo) = split_bigint(c);
        hi + lo
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn unit_roundoff() -> f64 {
        f64::EPSILON / 2.0
    }
}

impl Real for TwoFloat {
    const NAME: &'static str = "extended";

    fn from_bigint(c: &BigInt) -> Self {
        let (hi, lo) = split_bigint(c);
        if hi.is_finite() {
            TwoFloat::new_add(hi, lo)
        } else {
            TwoFloat::from(hi)
        }
    }

    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }

    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }

    fn unit_roundoff() -> f64 {
        // 2^-104
        4.930380657631324e-32
    }
}

/// A polynomial `sum c_k x^k` with exact integer coefficients. The stored
/// vector never ends in a zero; the zero polynomial stores nothing.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactPolynomial {
    coeffs: Vec<BigInt>,
}

impl ExactPolynomial {
    pub fn zero() -> Self {
        ExactPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        ExactPolynomial::constant(BigInt::one())
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        ExactPolynomial::monomial(BigInt::one(), 1)
    }

    pub fn constant(c: BigInt) -> Self {
        ExactPolynomial::new(vec![c])
    }

    pub fn monomial(c: BigInt, degree: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        coeffs[degree] = c;
        ExactPolynomial::new(coeffs)
    }

    /// Coefficients in ascending degree; trailing zeros are dropped.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        ExactPolynomial { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        ExactPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Multiplicity of the root at the origin (index of the first nonzero
    /// coefficient). `None` for the zero polynomial.
    pub fn zero_root_multiplicity(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Divides out `x^m`. Panics if the low `m` coefficients are not zero.
    pub fn shift_down(&self, m: usize) -> Self {
        assert!(self.coeffs.iter().take(m).all(Zero::is_zero));
        ExactPolynomial::new(self.coeffs.iter().skip(m).cloned().collect())
    }

    /// Multiplies by `x^m`.
    pub fn shift_up(&self, m: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); m];
        coeffs.extend(self.coeffs.iter().cloned());
        ExactPolynomial { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c += s;
        }
        ExactPolynomial::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        ExactPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Schoolbook product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return ExactPolynomial::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ExactPolynomial::new(coeffs)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        ExactPolynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(ExactPolynomial::one(), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Self {
        ExactPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    /// Exact Horner evaluation.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    /// Exact value at an integer point.
    pub fn eval_integer(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Coefficients rounded to nearest in the working precision.
    pub fn to_real<T: Real>(&self) -> Vec<T> {
        self.coeffs.iter().map(T::from_bigint).collect()
    }

    /// Horner evaluation at a complex point. Coefficients are rounded to
    /// nearest in `T` first.
    pub fn eval_complex<T: Real>(&self, z: Complex<T>) -> Result<Complex<T>, PolyError> {
        let coeffs = self.to_real::<T>();
        eval_real_coeffs(&coeffs, z)
    }
}

/// Horner evaluation of a polynomial with real floating coefficients.
pub fn eval_real_coeffs<T: Real>(coeffs: &[T], z: Complex<T>) -> Result<Complex<T>, PolyError> {
    let overflow = PolyError::OverflowAtPrecision { precision: T::NAME };
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(overflow);
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for &c in coeffs.iter().rev() {
        acc = acc * z + Complex::new(c, T::zero());
    }
    if acc.re.is_finite() && acc.im.is_finite() {
        Ok(acc)
    } else {
        Err(overflow)
    }
}

impl Add for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn add(self, rhs: Self) -> ExactPolynomial {
        ExactPolynomial::add(self, rhs)
    }
}

impl Sub for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn sub(self, rhs: Self) -> ExactPolynomial {
        ExactPolynomial::sub(self, rhs)
    }
}

impl Mul for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn mul(self, rhs: Self) -> ExactPolynomial {
        ExactPolynomial::mul(self, rhs)
    }
}

impl Neg for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn neg(self) -> ExactPolynomial {
        ExactPolynomial::neg(self)
    }
}

impl<'a> Sum<&'a ExactPolynomial> for ExactPolynomial {
    fn sum<I: Iterator<Item = &'a ExactPolynomial>>(iter: I) -> Self {
        iter.fold(ExactPolynomial::zero(), |acc, p| acc.add(p))
    }
}

impl Sum for ExactPolynomial {
    fn sum<I: Iterator<Item = ExactPolynomial>>(iter: I) -> Self {
        iter.fold(ExactPolynomial::zero(), |acc, p| acc.add(&p))
    }
}

/// Ascending coefficient list, e.g. `[0, 4, 3, 3, 1]`. The zero polynomial
/// renders as `[0]`.
impl fmt::Display for ExactPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "[0]");
        }
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for ExactPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactPolynomial{self}")
    }
}
