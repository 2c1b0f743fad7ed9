//! Exact arithmetic in real quadratic fields `Q(sqrt(d))`.
//!
//! Every point, window endpoint and length handled by this crate is a
//! [`QuadElem`]: a pair of arbitrary precision rationals `(a, b)` standing for
//! `a + b*sqrt(d)`, where `sqrt(d)` is the positive real root. Signs, order and
//! floors are decided exactly; floating point is only used to shortcut a
//! decision when a rigorous error bound already settles it.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The field `Q(sqrt(d))` for a square-free `d >= 2`, embedded in the reals
/// with `sqrt(d) > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadField {
    d: i64,
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidField(format!("d = {d} must be at least 2")));
        }
        let (s, _) = squarefree_split(d as u64);
        if s != 1 {
            return Err(Error::InvalidField(format!("d = {d} is not square-free")));
        }
        Ok(Self { d })
    }

    /// The field containing `sqrt(n)` for a positive non-square `n`.
    pub fn containing_sqrt(n: u64) -> Result<Self> {
        let (_, core) = squarefree_split(n);
        Self::new(core as i64)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn sqrt(&self) -> QuadElem {
        QuadElem::from_parts(*self, BigRational::zero(), BigRational::one())
    }

    pub fn int(&self, n: i64) -> QuadElem {
        QuadElem::from_parts(*self, BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn rational(&self, num: i64, den: i64) -> QuadElem {
        QuadElem::from_parts(
            *self,
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
        )
    }

    /// `(a_num/a_den) + (b_num/b_den)*sqrt(d)`.
    pub fn elem(&self, a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> QuadElem {
        QuadElem::from_parts(
            *self,
            BigRational::new(a_num.into(), a_den.into()),
            BigRational::new(b_num.into(), b_den.into()),
        )
    }

    pub fn zero(&self) -> QuadElem {
        self.int(0)
    }

    pub fn one(&self) -> QuadElem {
        self.int(1)
    }

    pub fn sqrt_f64(&self) -> f64 {
        (self.d as f64).sqrt()
    }

    /// Parses the textual element format, e.g. `1/2 + 1/2*sqrt(5)`.
    pub fn parse(&self, text: &str) -> Result<QuadElem> {
        QuadElem::parse(text, Some(*self))
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}))", self.d)
    }
}

/// Writes `n = s^2 * core` with `core` square-free.
pub fn squarefree_split(mut n: u64) -> (u64, u64) {
    let mut square = 1u64;
    let mut core = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            square *= p;
        }
        if e % 2 == 1 {
            core *= p;
        }
        p += 1;
    }
    (square, core * n)
}

/// Arithmetic operation selector for [`QuadElem::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An exact element `a + b*sqrt(d)` of a real quadratic field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadElem {
    a: BigRational,
    b: BigRational,
    field: QuadField,
}

const ULP: f64 = f64::EPSILON;

impl QuadElem {
    pub fn from_parts(field: QuadField, a: BigRational, b: BigRational) -> Self {
        Self { a, b, field }
    }

    pub fn from_integer(field: QuadField, n: BigInt) -> Self {
        Self::from_parts(field, BigRational::from_integer(n), BigRational::zero())
    }

    pub fn from_rational(field: QuadField, q: BigRational) -> Self {
        Self::from_parts(field, q, BigRational::zero())
    }

    /// Rational part.
    pub fn a(&self) -> &BigRational {
        &self.a
    }

    /// Coefficient of `sqrt(d)`.
    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.b.is_zero() && self.a.is_integer()
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.d,
                right: other.field.d,
            });
        }
        Ok(())
    }

    /// Field operation with explicit error reporting.
    pub fn arith(&self, other: &Self, op: ArithOp) -> Result<Self> {
        self.check_field(other)?;
        match op {
            ArithOp::Add => Ok(self.add_unchecked(other)),
            ArithOp::Sub => Ok(self.sub_unchecked(other)),
            ArithOp::Mul => Ok(self.mul_unchecked(other)),
            ArithOp::Div => self.div_unchecked(other),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.arith(other, ArithOp::Add)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.arith(other, ArithOp::Sub)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.arith(other, ArithOp::Mul)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.arith(other, ArithOp::Div)
    }

    fn add_unchecked(&self, o: &Self) -> Self {
        Self::from_parts(self.field, &self.a + &o.a, &self.b + &o.b)
    }

    fn sub_unchecked(&self, o: &Self) -> Self {
        Self::from_parts(self.field, &self.a - &o.a, &self.b - &o.b)
    }

    fn mul_unchecked(&self, o: &Self) -> Self {
        let d = BigRational::from_integer(self.field.d.into());
        let a = &self.a * &o.a + &self.b * &o.b * d;
        let b = &self.a * &o.b + &self.b * &o.a;
        Self::from_parts(self.field, a, b)
    }

    fn div_unchecked(&self, o: &Self) -> Result<Self> {
        Ok(self.mul_unchecked(&o.inverse()?))
    }

    /// Multiplicative inverse `(a - b sqrt d) / (a^2 - d b^2)`.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_parts(self.field, &self.a / &n, -&self.b / &n))
    }

    /// Galois conjugate `a - b sqrt(d)`.
    pub fn conjugate(&self) -> Self {
        Self::from_parts(self.field, self.a.clone(), -self.b.clone())
    }

    /// Field norm `x * conj(x) = a^2 - d b^2`.
    pub fn norm(&self) -> BigRational {
        let d = BigRational::from_integer(self.field.d.into());
        &self.a * &self.a - &self.b * &self.b * d
    }

    /// Field trace `x + conj(x) = 2a`.
    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::from_parts(self.field, &self.a * q, &self.b * q)
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(n.into()))
    }

    pub fn add_rational(&self, q: &BigRational) -> Self {
        Self::from_parts(self.field, &self.a + q, self.b.clone())
    }

    pub fn pow(&self, exp: i32) -> Result<Self> {
        let base = if exp < 0 { self.inverse()? } else { self.clone() };
        let mut result = self.field.one();
        let mut sq = base;
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&sq);
            }
            sq = sq.mul_unchecked(&sq);
            e >>= 1;
        }
        Ok(result)
    }

    /// Exact sign, decided from the signs of `a`, `b` and a comparison of
    /// `a^2` against `d b^2`.
    pub fn signum(&self) -> Ordering {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        match (sa, sb) {
            (s, Ordering::Equal) => s,
            (Ordering::Equal, s) => s,
            (x, y) if x == y => x,
            (sa, sb) => {
                let d = BigRational::from_integer(self.field.d.into());
                let a2 = &self.a * &self.a;
                let b2d = &self.b * &self.b * d;
                match a2.cmp(&b2d) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    // a^2 = d b^2 forces a = b = 0 for square-free d.
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact comparison; errors only on a field mismatch.
    pub fn compare(&self, other: &Self) -> Result<Ordering> {
        self.check_field(other)?;
        Ok(self.sub_unchecked(other).signum())
    }

    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        Self::from_parts(self.field, &self.a - q, self.b.clone()).signum()
    }

    /// Float approximation together with a rigorous bound on its error.
    pub fn approx(&self) -> Approx {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let s = self.field.sqrt_f64();
        let value = a + b * s;
        // conversions, sqrt and two roundings each contribute at most one ulp
        // of their operand; eight ulps of the magnitudes is a safe cover.
        let err = 8.0 * ULP * (a.abs() + 2.0 * (b * s).abs()) + f64::MIN_POSITIVE;
        Approx { value, err }
    }

    pub fn to_f64(&self) -> f64 {
        self.approx().value
    }

    /// The unique integer `n` with `n <= x < n + 1`.
    pub fn floor(&self) -> BigInt {
        let ap = self.approx();
        if let Some(n) = ap.floor() {
            return BigInt::from(n);
        }
        self.floor_exact()
    }

    /// Floor through integer square roots only.
    pub fn floor_exact(&self) -> BigInt {
        // x = (P + Q sqrt d) / N with N > 0
        let n = self.a.denom() * self.b.denom();
        let p = self.a.numer() * self.b.denom();
        let q = self.b.numer() * self.a.denom();
        let d = BigInt::from(self.field.d);
        let q_sqrt_floor = if q.is_zero() {
            BigInt::zero()
        } else {
            let r: BigInt = Roots::sqrt(&(&q * &q * &d));
            if q.is_positive() {
                r
            } else {
                // q^2 d is never a perfect square here
                -(r + BigInt::one())
            }
        };
        (p + q_sqrt_floor).div_floor(&n)
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Decimal rendering rounded half away from zero to `digits` places.
    pub fn to_decimal(&self, digits: usize) -> String {
        let negative = self.is_negative();
        let magnitude = self.abs();
        let scale = BigInt::from(10u32).pow(digits as u32);
        let scaled = magnitude.scale(&BigRational::from_integer(scale.clone()));
        let half = BigRational::new(1.into(), 2.into());
        let rounded = scaled.add_rational(&half).floor();
        let (int_part, frac_part) = rounded.div_rem(&scale);
        let mut out = String::new();
        if negative && !rounded.is_zero() {
            out.push('-');
        }
        out.push_str(&int_part.to_string());
        if digits > 0 {
            let frac = frac_part.to_string();
            out.push('.');
            for _ in frac.len()..digits {
                out.push('0');
            }
            out.push_str(&frac);
        }
        out
    }

    /// Parses the textual format (`a/b + c/d*sqrt(D)`, decimals, parentheses).
    ///
    /// When `field` is `None` the field is taken from the radicands present;
    /// a purely rational text then needs an explicit field.
    pub fn parse(text: &str, field: Option<QuadField>) -> Result<Self> {
        parse::parse_elem(text, field)
    }
}

fn sign_of(q: &BigRational) -> Ordering {
    match q.numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

impl PartialOrd for QuadElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.compare(other).ok()
    }
}

/// Total order within one field; comparing across fields panics.
impl Ord for QuadElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other).expect("compared elements of different fields")
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let d = self.field.d;
        let b_abs = self.b.abs();
        let radical = if b_abs.is_one() {
            format!("sqrt({d})")
        } else {
            format!("{b_abs}*sqrt({d})")
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{radical}")
            } else {
                write!(f, "{radical}")
            }
        } else {
            let op = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{} {} {}", self.a, op, radical)
        }
    }
}

/// A float with a rigorous absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approx {
    pub value: f64,
    pub err: f64,
}

impl Approx {
    /// The floor, if the error bound keeps the value away from integers.
    pub fn floor(&self) -> Option<i64> {
        if !self.value.is_finite() || !self.err.is_finite() || self.value.abs() > 1e15 {
            return None;
        }
        let fl = self.value.floor();
        let frac = self.value - fl;
        if frac > self.err && frac < 1.0 - self.err {
            Some(fl as i64)
        } else {
            None
        }
    }

    /// Sign of `self - other`, if the error bounds separate them.
    pub fn cmp_certain(&self, other: &Approx) -> Option<Ordering> {
        let diff = self.value - other.value;
        let slack = self.err + other.err + ULP * (self.value.abs() + other.value.abs());
        if !diff.is_finite() {
            None
        } else if diff > slack {
            Some(Ordering::Greater)
        } else if diff < -slack {
            Some(Ordering::Less)
        } else {
            None
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&QuadElem> for &QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: &QuadElem) -> QuadElem {
                self.check_field(rhs).expect("field mismatch");
                self.$inner(rhs)
            }
        }
        impl $trait<QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: QuadElem) -> QuadElem {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: &QuadElem) -> QuadElem {
                (&self).$method(rhs)
            }
        }
        impl $trait<QuadElem> for &QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: QuadElem) -> QuadElem {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_unchecked);
forward_binop!(Sub, sub, sub_unchecked);
forward_binop!(Mul, mul, mul_unchecked);

impl Div<&QuadElem> for &QuadElem {
    type Output = QuadElem;
    fn div(self, rhs: &QuadElem) -> QuadElem {
        self.checked_div(rhs).expect("invalid division")
    }
}

impl Div<QuadElem> for QuadElem {
    type Output = QuadElem;
    fn div(self, rhs: QuadElem) -> QuadElem {
        &self / &rhs
    }
}

impl Div<&QuadElem> for QuadElem {
    type Output = QuadElem;
    fn div(self, rhs: &QuadElem) -> QuadElem {
        &self / rhs
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::from_parts(self.field, -self.a.clone(), -self.b.clone())
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        -&self
    }
}

/// Family of a quadratic Pisot unit by its minimal polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitFamily {
    /// `x^2 - p x - 1`, `p >= 1`
    MinusOne,
    /// `x^2 - p x + 1`, `p >= 3`
    PlusOne,
}

/// A quadratic Pisot unit `beta > 1` together with its conjugate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PisotUnit {
    family: UnitFamily,
    p: i64,
    beta: QuadElem,
    beta_conj: QuadElem,
}

impl PisotUnit {
    pub fn new(family: UnitFamily, p: i64) -> Result<Self> {
        let disc = match family {
            UnitFamily::MinusOne if p >= 1 => p * p + 4,
            UnitFamily::PlusOne if p >= 3 => p * p - 4,
            _ => {
                return Err(Error::InvalidField(format!(
                    "no quadratic Pisot unit for {family:?} with p = {p}"
                )))
            }
        };
        let (s, core) = squarefree_split(disc as u64);
        let field = QuadField::new(core as i64)?;
        let half = BigRational::new(1.into(), 2.into());
        let a = BigRational::from_integer(p.into()) * &half;
        let b = BigRational::from_integer((s as i64).into()) * &half;
        let beta = QuadElem::from_parts(field, a, b);
        let beta_conj = beta.conjugate();
        Ok(Self {
            family,
            p,
            beta,
            beta_conj,
        })
    }

    /// The golden ratio `(1 + sqrt 5)/2`.
    pub fn golden() -> Self {
        Self::new(UnitFamily::MinusOne, 1).expect("golden ratio")
    }

    pub fn family(&self) -> UnitFamily {
        self.family
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn beta(&self) -> &QuadElem {
        &self.beta
    }

    pub fn beta_conj(&self) -> &QuadElem {
        &self.beta_conj
    }

    pub fn field(&self) -> QuadField {
        self.beta.field
    }

    /// `beta * beta'`: `-1` or `+1`.
    pub fn norm(&self) -> i64 {
        match self.family {
            UnitFamily::MinusOne => -1,
            UnitFamily::PlusOne => 1,
        }
    }

    /// `floor(beta)`: `p` for `MinusOne`, `p - 1` for `PlusOne`.
    pub fn floor_beta(&self) -> i64 {
        match self.family {
            UnitFamily::MinusOne => self.p,
            UnitFamily::PlusOne => self.p - 1,
        }
    }
}

mod parse {
    use super::*;

    pub(super) fn parse_elem(text: &str, field: Option<QuadField>) -> Result<QuadElem> {
        let tokens = tokenize(text)?;
        let field = match (field, detect_field(&tokens)?) {
            (Some(f), Some(g)) if f != g => {
                return Err(Error::FieldMismatch {
                    left: f.d(),
                    right: g.d(),
                })
            }
            (Some(f), _) => f,
            (None, Some(g)) => g,
            (None, None) => {
                return Err(Error::Parse(format!(
                    "'{text}' has no radical, a field must be given"
                )))
            }
        };
        let mut p = Parser {
            tokens: &tokens,
            pos: 0,
            field,
        };
        let v = p.expr()?;
        if p.pos != tokens.len() {
            return Err(Error::Parse(format!("trailing input in '{text}'")));
        }
        Ok(v)
    }

    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Num(BigRational),
        Sqrt,
        Plus,
        Minus,
        Star,
        Slash,
        LParen,
        RParen,
    }

    fn tokenize(text: &str) -> Result<Vec<Tok>> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            match c {
                ' ' | '\t' => i += 1,
                '+' => {
                    out.push(Tok::Plus);
                    i += 1
                }
                '-' | '\u{2212}' => {
                    out.push(Tok::Minus);
                    i += 1
                }
                '*' => {
                    out.push(Tok::Star);
                    i += 1
                }
                '/' => {
                    out.push(Tok::Slash);
                    i += 1
                }
                '(' => {
                    out.push(Tok::LParen);
                    i += 1
                }
                ')' => {
                    out.push(Tok::RParen);
                    i += 1
                }
                c if c.is_ascii_digit() || c == '.' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    out.push(Tok::Num(decimal(&s)?));
                }
                _ if text[char_offset(&chars, i)..].starts_with("sqrt") => {
                    out.push(Tok::Sqrt);
                    i += 4;
                }
                _ => return Err(Error::Parse(format!("unexpected '{c}' in '{text}'"))),
            }
        }
        Ok(out)
    }

    fn char_offset(chars: &[char], i: usize) -> usize {
        chars[..i].iter().map(|c| c.len_utf8()).sum()
    }

    fn decimal(s: &str) -> Result<BigRational> {
        let bad = || Error::Parse(format!("bad number '{s}'"));
        let (int, frac) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int.is_empty() && frac.is_empty() || frac.contains('.') {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        Ok(BigRational::new(n, den))
    }

    fn detect_field(tokens: &[Tok]) -> Result<Option<QuadField>> {
        let mut found: Option<QuadField> = None;
        for w in tokens.windows(3) {
            if let [Tok::Sqrt, Tok::LParen, Tok::Num(n)] = w {
                let n = radicand(n)?;
                let (_, core) = squarefree_split(n);
                if core == 1 {
                    continue;
                }
                let f = QuadField::new(core as i64)?;
                match found {
                    Some(g) if g != f => {
                        return Err(Error::FieldMismatch {
                            left: g.d(),
                            right: f.d(),
                        })
                    }
                    _ => found = Some(f),
                }
            }
        }
        Ok(found)
    }

    fn radicand(n: &BigRational) -> Result<u64> {
        if !n.is_integer() || n.is_negative() {
            return Err(Error::Parse(format!("radicand {n} must be a natural number")));
        }
        n.to_integer()
            .to_u64()
            .ok_or_else(|| Error::Parse(format!("radicand {n} too large")))
    }

    struct Parser<'a> {
        tokens: &'a [Tok],
        pos: usize,
        field: QuadField,
    }

    impl Parser<'_> {
        fn peek(&self) -> Option<&Tok> {
            self.tokens.get(self.pos)
        }

        fn next(&mut self) -> Option<Tok> {
            let t = self.tokens.get(self.pos).cloned();
            self.pos += 1;
            t
        }

        fn expect(&mut self, t: Tok) -> Result<()> {
            match self.next() {
                Some(ref got) if *got == t => Ok(()),
                other => Err(Error::Parse(format!("expected {t:?}, found {other:?}"))),
            }
        }

        fn expr(&mut self) -> Result<QuadElem> {
            let mut acc = self.term()?;
            loop {
                match self.peek() {
                    Some(Tok::Plus) => {
                        self.pos += 1;
                        acc = &acc + &self.term()?;
                    }
                    Some(Tok::Minus) => {
                        self.pos += 1;
                        acc = &acc - &self.term()?;
                    }
                    _ => return Ok(acc),
                }
            }
        }

        fn term(&mut self) -> Result<QuadElem> {
            let mut acc = self.unary()?;
            loop {
                match self.peek() {
                    Some(Tok::Star) => {
                        self.pos += 1;
                        acc = &acc * &self.unary()?;
                    }
                    Some(Tok::Slash) => {
                        self.pos += 1;
                        acc = acc.checked_div(&self.unary()?)?;
                    }
                    _ => return Ok(acc),
                }
            }
        }

        fn unary(&mut self) -> Result<QuadElem> {
            match self.peek() {
                Some(Tok::Minus) => {
                    self.pos += 1;
                    Ok(-self.unary()?)
                }
                Some(Tok::Plus) => {
                    self.pos += 1;
                    self.unary()
                }
                _ => self.primary(),
            }
        }

        fn primary(&mut self) -> Result<QuadElem> {
            match self.next() {
                Some(Tok::Num(q)) => Ok(QuadElem::from_rational(self.field, q)),
                Some(Tok::LParen) => {
                    let v = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(v)
                }
                Some(Tok::Sqrt) => {
                    self.expect(Tok::LParen)?;
                    let n = match self.next() {
                        Some(Tok::Num(q)) => radicand(&q)?,
                        other => {
                            return Err(Error::Parse(format!(
                                "expected radicand, found {other:?}"
                            )))
                        }
                    };
                    self.expect(Tok::RParen)?;
                    let (s, core) = squarefree_split(n);
                    let s = BigRational::from_integer((s as i64).into());
                    if core == 1 {
                        Ok(QuadElem::from_rational(self.field, s))
                    } else {
                        Ok(QuadElem::from_parts(self.field, BigRational::zero(), s))
                    }
                }
                other => Err(Error::Parse(format!("unexpected token {other:?}"))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> QuadField {
        QuadField::new(5).unwrap()
    }

    fn tau() -> QuadElem {
        q5().elem(1, 2, 1, 2)
    }

    #[test]
    fn golden_ratio_squares_to_itself_plus_one() {
        let t = tau();
        assert_eq!(&t * &t, &t + &q5().one());
    }

    #[test]
    fn additive_identity() {
        let x = q5().elem(-3, 7, 5, 11);
        assert_eq!(&x + &q5().zero(), x);
    }

    #[test]
    fn silver_unit_has_norm_minus_one() {
        let f = QuadField::new(2).unwrap();
        let x = f.elem(1, 1, 1, 1);
        assert_eq!(&x * &x.conjugate(), f.int(-1));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(
            tau().checked_div(&q5().zero()),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let x = QuadField::new(2).unwrap().one();
        assert!(matches!(
            tau().checked_add(&x),
            Err(Error::FieldMismatch { left: 5, right: 2 })
        ));
    }

    #[test]
    fn comparisons() {
        assert_eq!(tau().compare(&q5().one()).unwrap(), Ordering::Greater);
        assert_eq!(tau().compare(&tau()).unwrap(), Ordering::Equal);
        assert_eq!(tau().conjugate().signum(), Ordering::Less);
    }

    #[test]
    fn floors() {
        let t = tau();
        assert_eq!((&t * &t).floor(), BigInt::from(2));
        assert_eq!((-&t).floor(), BigInt::from(-2));
        assert_eq!(q5().int(5).floor(), BigInt::from(5));
        assert_eq!(q5().int(-5).floor_exact(), BigInt::from(-5));
        assert_eq!((-&t).floor_exact(), BigInt::from(-2));
    }

    #[test]
    fn conjugation() {
        assert_eq!(tau().conjugate(), &q5().one() - &tau());
        let x = q5().elem(2, 3, -7, 5);
        assert_eq!(x.conjugate().conjugate(), x);
        assert_eq!(q5().int(3).conjugate(), q5().int(3));
    }

    #[test]
    fn field_validation() {
        assert!(QuadField::new(1).is_err());
        assert!(QuadField::new(8).is_err());
        assert!(QuadField::new(6).is_ok());
    }

    #[test]
    fn parse_and_display() {
        let x = QuadElem::parse("1/2 + 1/2*sqrt(5)", None).unwrap();
        assert_eq!(x, tau());
        assert_eq!(x.to_string(), "1/2 + 1/2*sqrt(5)");
        let y = QuadElem::parse("(1 - sqrt(20))/2", None).unwrap();
        assert_eq!(y, q5().elem(1, 2, -1, 1));
        assert_eq!(y.to_string(), "1/2 - sqrt(5)");
        assert_eq!(q5().parse("0.9").unwrap(), q5().rational(9, 10));
        assert!(QuadElem::parse("3", None).is_err());
        assert!(QuadElem::parse("sqrt(2)+sqrt(3)", None).is_err());
        assert!(QuadElem::parse("1 +", Some(q5())).is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(tau().to_decimal(10), "1.6180339887");
        assert_eq!(
            tau().conjugate().to_decimal(30),
            "-0.618033988749894848204586834366"
        );
        assert_eq!(q5().rational(-1, 3).to_decimal(2), "-0.33");
        assert_eq!(q5().zero().to_decimal(0), "0");
    }

    #[test]
    fn pisot_units() {
        for p in 1..8 {
            let u = PisotUnit::new(UnitFamily::MinusOne, p).unwrap();
            assert_eq!(u.beta() * u.beta_conj(), u.field().int(-1));
            assert_eq!(u.beta().floor(), BigInt::from(p));
            assert!(u.beta_conj().abs() < u.field().one());
        }
        for p in 3..8 {
            let u = PisotUnit::new(UnitFamily::PlusOne, p).unwrap();
            assert_eq!(u.beta() * u.beta_conj(), u.field().one());
            assert_eq!(u.beta().floor(), BigInt::from(p - 1));
            assert!(u.beta_conj().is_positive());
        }
        assert!(PisotUnit::new(UnitFamily::PlusOne, 2).is_err());
        assert_eq!(PisotUnit::golden().beta(), &tau());
    }
}
