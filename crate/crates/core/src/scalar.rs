//! Scalar regimes: complex floating point and exact Gaussian rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Rat = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Exact,
    Float,
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // huge numerator or denominator: scale down by bit length first
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            if d == 0.0 {
                if r.is_positive() {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                n / d
            }
        }
    }
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rat::from_integer(n))
    }
}

/// True when the string is an integer or `p/q`, i.e. exact-regime syntax.
pub fn is_exact_literal(s: &str) -> bool {
    parse_rat(s).is_ok()
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// computed from the exact binary value of `x` by continued fractions.
/// Nearest multiple of `1/q`.
pub fn round_to_grid(x: f64, q: u64) -> Rat {
    let q = Rat::from_integer(BigInt::from(q.max(1)));
    match Rat::from_float(x) {
        Some(exact) => (exact * &q).round() / q,
        None => Rat::zero(),
    }
}

pub fn rationalize(x: f64, max_den: u64) -> Rat {
    let Some(exact) = Rat::from_float(x) else {
        return Rat::zero();
    };
    let max_den = BigInt::from(max_den.max(1));
    let neg = exact.is_negative();
    let mut rem = exact.abs();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    loop {
        let a = rem.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > max_den {
            // semiconvergent with the largest admissible partial quotient
            let t = (&max_den - &k0) / &k1;
            let hs = &t * &h1 + &h0;
            let ks = &t * &k1 + &k0;
            let conv = Rat::new(h1.clone(), k1.clone());
            let best = if ks.is_zero() {
                conv
            } else {
                let semi = Rat::new(hs, ks);
                let target = exact.abs();
                if (&semi - &target).abs() < (&conv - &target).abs() {
                    semi
                } else {
                    conv
                }
            };
            return if neg { -best } else { best };
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = &rem - Rat::from_integer(a);
        if frac.is_zero() {
            let r = Rat::new(h1, k1);
            return if neg { -r } else { r };
        }
        rem = frac.recip();
    }
}

/// Gaussian rational `re + i im`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: Rat) -> Self {
        GaussRat { re, im: Rat::zero() }
    }

    pub fn int(n: i64) -> Self {
        GaussRat::real(rat_int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        GaussRat::real(rat(n, d))
    }

    pub fn complex(re: i64, im: i64) -> Self {
        GaussRat::new(rat_int(re), rat_int(im))
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -&self.im)
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(GaussRat::new(&self.re / &n, -&self.im / &n))
    }

    pub fn scale(&self, r: &Rat) -> Self {
        GaussRat::new(&self.re * r, &self.im * r)
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    pub fn from_c64_rounded(z: C64, max_den: u64) -> Self {
        GaussRat::new(rationalize(z.re, max_den), rationalize(z.im, max_den))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = <GaussRat as One>::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", fmt_rat(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", fmt_rat(&self.im))
        } else {
            write!(f, "({}+{}i)", fmt_rat(&self.re), fmt_rat(&self.im))
        }
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat::new(Rat::zero(), Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::int(1)
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::real(&self.re * &o.re);
        }
        GaussRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-&self.re, -&self.im)
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, o: GaussRat) -> GaussRat {
        &self + &o
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, o: GaussRat) -> GaussRat {
        &self - &o
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, o: GaussRat) -> GaussRat {
        &self * &o
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        -&self
    }
}

/// Arithmetic shared by both regimes.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    const REGIME: Regime;

    fn zero() -> Self;
    fn one() -> Self;
    fn i() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(n: i64, d: i64) -> Self;
    fn from_gauss(g: &GaussRat) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    /// `None` when dividing by zero.
    fn over(&self, o: &Self) -> Option<Self>;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> C64;
    /// Exact equality in the exact regime, closeness within `tol` otherwise.
    fn approx_eq(&self, o: &Self, tol: f64) -> bool;
    fn is_real_exact(&self) -> bool;
    fn to_strings(&self) -> (String, String);
    fn parse(re: &str, im: &str) -> Result<Self>;
}

impl Scalar for GaussRat {
    const REGIME: Regime = Regime::Exact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn i() -> Self {
        GaussRat::complex(0, 1)
    }
    fn from_int(n: i64) -> Self {
        GaussRat::int(n)
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        GaussRat::ratio(n, d)
    }
    fn from_gauss(g: &GaussRat) -> Self {
        g.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn over(&self, o: &Self) -> Option<Self> {
        o.inv().map(|inv| self * &inv)
    }
    fn conj(&self) -> Self {
        GaussRat::conj(self)
    }
    fn to_c64(&self) -> C64 {
        GaussRat::to_c64(self)
    }
    fn approx_eq(&self, o: &Self, _tol: f64) -> bool {
        self == o
    }
    fn is_real_exact(&self) -> bool {
        self.im.is_zero()
    }
    fn to_strings(&self) -> (String, String) {
        (fmt_rat(&self.re), fmt_rat(&self.im))
    }
    fn parse(re: &str, im: &str) -> Result<Self> {
        Ok(GaussRat::new(parse_rat(re)?, parse_rat(im)?))
    }
}

impl Scalar for C64 {
    const REGIME: Regime = Regime::Float;

    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn i() -> Self {
        C64::new(0.0, 1.0)
    }
    fn from_int(n: i64) -> Self {
        C64::new(n as f64, 0.0)
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        C64::new(n as f64 / d as f64, 0.0)
    }
    fn from_gauss(g: &GaussRat) -> Self {
        g.to_c64()
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn over(&self, o: &Self) -> Option<Self> {
        if Scalar::is_zero(o) {
            None
        } else {
            Some(self / o)
        }
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        (self - o).norm() <= tol
    }
    fn is_real_exact(&self) -> bool {
        self.im == 0.0
    }
    fn to_strings(&self) -> (String, String) {
        (fmt_f64(self.re), fmt_f64(self.im))
    }
    fn parse(re: &str, im: &str) -> Result<Self> {
        Ok(C64::new(parse_f64(re)?, parse_f64(im)?))
    }
}

/// Compares `|a|²` and `|b|²` exactly.
pub fn cmp_modulus(a: &GaussRat, b: &GaussRat) -> Ordering {
    a.norm_sqr().cmp(&b.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.5, 100), rat(1, 2));
        assert_eq!(rationalize(-4.5, 100), rat(-9, 2));
        assert_eq!(rationalize(1.0 / 3.0, 100), rat(1, 3));
        assert_eq!(rationalize(3.00002, 100), rat(3, 1));
        assert_eq!(rationalize(0.0, 10), rat(0, 1));
    }

    #[test]
    fn rationalize_respects_bound() {
        let r = rationalize(std::f64::consts::PI, 100);
        assert_eq!(r, rat(311, 99));
        let r = rationalize(std::f64::consts::PI, 1000);
        assert_eq!(r, rat(355, 113));
        assert!(rationalize(0.123456789, 10_000).denom() <= &BigInt::from(10_000));
    }

    #[test]
    fn gauss_arithmetic() {
        let a = GaussRat::complex(1, 2);
        let b = GaussRat::complex(3, -1);
        assert_eq!(&a * &b, GaussRat::complex(5, 5));
        assert_eq!(a.norm_sqr(), rat_int(5));
        let q = a.over(&b).unwrap();
        assert_eq!(&q * &b, a);
        assert!(<GaussRat as Zero>::zero().inv().is_none());
    }

    #[test]
    fn parse_and_format_round_trip() {
        let g = GaussRat::new(rat(-3, 7), rat(5, 1));
        let (re, im) = g.to_strings();
        assert_eq!(re, "-3/7");
        assert_eq!(im, "5");
        assert_eq!(<GaussRat as Scalar>::parse(&re, &im).unwrap(), g);
        assert!(is_exact_literal("12"));
        assert!(!is_exact_literal("1.0"));
        assert_eq!(fmt_f64(1.0), "1.0");
    }

    #[test]
    fn rat_to_f64_handles_huge_values() {
        let big = Rat::new(BigInt::from(10).pow(400), BigInt::from(10).pow(399));
        assert!((rat_to_f64(&big) - 10.0).abs() < 1e-9);
    }
}
