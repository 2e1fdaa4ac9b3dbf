//! Exact scalars in the ring generated over the Gaussian rationals by `√2` and `√π`.
//!
//! A scalar is a finite sum `Σ (q0 + i q1) · 2^{b/2} · π^{c/2}`. The exponent of
//! `√2` is kept in `{0, 1}` by folding even powers into the rational part, so two
//! scalars are equal exactly when their term lists are equal.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("divisor mixes powers of pi and has no inverse in the scalar ring")]
    NotInvertible,
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

/// One monomial `(re + i im) · 2^{b/2} · π^{c/2}` with `b ∈ {0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub b: u8,
    pub c: i32,
    pub re: BigRational,
    pub im: BigRational,
}

impl Term {
    fn key(&self) -> (u8, i32) {
        (self.b, self.c)
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, other: &Term) -> Term {
        let mut re = &self.re * &other.re - &self.im * &other.im;
        let mut im = &self.re * &other.im + &self.im * &other.re;
        let mut b = self.b + other.b;
        if b == 2 {
            b = 0;
            re *= BigRational::from_integer(2.into());
            im *= BigRational::from_integer(2.into());
        }
        Term {
            b,
            c: self.c + other.c,
            re,
            im,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    terms: Vec<Term>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn i() -> Self {
        Self::gaussian(BigRational::zero(), BigRational::one())
    }

    pub fn sqrt2() -> Self {
        Self::monomial(BigRational::one(), BigRational::zero(), 1, 0)
    }

    pub fn pi() -> Self {
        Self::pi_pow_half(2)
    }

    /// `π^{c/2}`.
    pub fn pi_pow_half(c: i32) -> Self {
        Self::monomial(BigRational::one(), BigRational::zero(), 0, c)
    }

    pub fn int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::rational(rat(n, d))
    }

    pub fn bigint(n: BigInt) -> Self {
        Self::rational(BigRational::from_integer(n))
    }

    pub fn rational(q: BigRational) -> Self {
        Self::gaussian(q, BigRational::zero())
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        Self::monomial(re, im, 0, 0)
    }

    /// `(re + i im) · 2^{b/2} · π^{c/2}` for any integer `b`.
    pub fn monomial(mut re: BigRational, mut im: BigRational, b: i32, c: i32) -> Self {
        let half = b.div_euclid(2);
        let b = b.rem_euclid(2) as u8;
        if half != 0 {
            let f = if half > 0 {
                BigRational::from_integer(BigInt::from(2).pow(half as u32))
            } else {
                BigRational::new(BigInt::one(), BigInt::from(2).pow((-half) as u32))
            };
            re *= &f;
            im *= &f;
        }
        let t = Term { b, c, re, im };
        if t.is_zero() {
            Self::zero()
        } else {
            ExactScalar { terms: vec![t] }
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The value as a rational number, if it is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [t] if t.b == 0 && t.c == 0 && t.im.is_zero() => Some(t.re.clone()),
            _ => None,
        }
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.im.is_zero())
    }

    /// True when the scalar is a real number greater than zero.
    pub fn is_positive_real(&self) -> bool {
        if !self.is_real() || self.is_zero() {
            return false;
        }
        if let [t] = self.terms.as_slice() {
            return t.re.is_positive();
        }
        self.to_complex().0 > 0.0
    }

    /// Floating-point value as `(re, im)`.
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for t in &self.terms {
            let f = 2f64.powf(t.b as f64 / 2.0) * std::f64::consts::PI.powf(t.c as f64 / 2.0);
            re += t.re.to_f64().unwrap_or(f64::NAN) * f;
            im += t.im.to_f64().unwrap_or(f64::NAN) * f;
        }
        (re, im)
    }

    pub fn abs_f64(&self) -> f64 {
        let (re, im) = self.to_complex();
        re.hypot(im)
    }

    pub fn conj(&self) -> Self {
        ExactScalar {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    im: -t.im.clone(),
                    ..t.clone()
                })
                .collect(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        ExactScalar {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    b: t.b,
                    c: t.c,
                    re: &t.re * q,
                    im: &t.im * q,
                })
                .collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(n.into()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::int(1),
            1 => Self::i(),
            2 => Self::int(-1),
            _ => -Self::i(),
        }
    }

    /// `(√2)^k` for any integer `k`.
    pub fn sqrt2_pow(k: i32) -> Self {
        Self::monomial(BigRational::one(), BigRational::zero(), k, 0)
    }

    /// `(-1)^k`.
    pub fn sign(k: i64) -> Self {
        Self::int(if k.rem_euclid(2) == 0 { 1 } else { -1 })
    }

    fn from_terms(mut terms: Vec<Term>) -> Self {
        terms.sort_by_key(|a| a.key());
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(last) if last.key() == t.key() => {
                    last.re += t.re;
                    last.im += t.im;
                }
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.is_zero());
        ExactScalar { terms: out }
    }

    /// Inverse. Works when every term carries the same power of `π`.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let c = self.terms[0].c;
        if self.terms.iter().any(|t| t.c != c) {
            return Err(ScalarError::NotInvertible);
        }
        // u = a + b√2 with a, b Gaussian rationals; 1/u = (a - b√2) / (a² - 2b²).
        let mut a = (BigRational::zero(), BigRational::zero());
        let mut b = (BigRational::zero(), BigRational::zero());
        for t in &self.terms {
            if t.b == 0 {
                a = (t.re.clone(), t.im.clone());
            } else {
                b = (t.re.clone(), t.im.clone());
            }
        }
        let two = BigRational::from_integer(2.into());
        let sq = |x: &(BigRational, BigRational)| {
            (
                &x.0 * &x.0 - &x.1 * &x.1,
                BigRational::from_integer(2.into()) * &x.0 * &x.1,
            )
        };
        let a2 = sq(&a);
        let b2 = sq(&b);
        let norm = (a2.0 - &two * b2.0, a2.1 - &two * b2.1);
        let nn = &norm.0 * &norm.0 + &norm.1 * &norm.1;
        if nn.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let ninv = ExactScalar::gaussian(&norm.0 / &nn, -(&norm.1 / &nn));
        let conj2 = ExactScalar::from_terms(vec![
            Term {
                b: 0,
                c: 0,
                re: a.0,
                im: a.1,
            },
            Term {
                b: 1,
                c: 0,
                re: -b.0,
                im: -b.1,
            },
        ]);
        Ok(&(&conj2 * &ninv) * &ExactScalar::pi_pow_half(-c))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(self * &other.inv()?)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar::int(n)
    }
}

impl From<BigRational> for ExactScalar {
    fn from(q: BigRational) -> Self {
        ExactScalar::rational(q)
    }
}

impl<'a> Add<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(mut self, rhs: ExactScalar) -> ExactScalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        if rhs.terms.is_empty() {
            return;
        }
        if self.terms.len() == 1
            && rhs.terms.len() == 1
            && self.terms[0].key() == rhs.terms[0].key()
        {
            let t = &mut self.terms[0];
            t.re += &rhs.terms[0].re;
            t.im += &rhs.terms[0].im;
            if t.is_zero() {
                self.terms.clear();
            }
            return;
        }
        let mut all = std::mem::take(&mut self.terms);
        all.extend(rhs.terms.iter().cloned());
        *self = ExactScalar::from_terms(all);
    }
}

impl AddAssign for ExactScalar {
    fn add_assign(&mut self, rhs: ExactScalar) {
        *self += &rhs;
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        *self += &(-rhs);
    }
}

impl<'a> Sub<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        self + &(-rhs)
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: ExactScalar) -> ExactScalar {
        &self - &rhs
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    b: t.b,
                    c: t.c,
                    re: -t.re.clone(),
                    im: -t.im.clone(),
                })
                .collect(),
        }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl<'a> Mul<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        if self.terms.is_empty() || rhs.terms.is_empty() {
            return ExactScalar::zero();
        }
        if self.terms.len() == 1 && rhs.terms.len() == 1 {
            let t = self.terms[0].mul(&rhs.terms[0]);
            return if t.is_zero() {
                ExactScalar::zero()
            } else {
                ExactScalar { terms: vec![t] }
            };
        }
        let mut all = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                all.push(a.mul(b));
            }
        }
        ExactScalar::from_terms(all)
    }
}

impl Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: ExactScalar) -> ExactScalar {
        &self * &rhs
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_scalar(self))
    }
}

// ---------------------------------------------------------------------------
// Special values

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient, zero when `k < 0` or `n < k`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < k || n < 0 {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// `Γ(k/2)` for `k ≥ 1`.
pub fn gamma_half(k: u32) -> ExactScalar {
    assert!(k >= 1, "gamma_half needs a positive argument");
    if k.is_multiple_of(2) {
        ExactScalar::bigint(factorial((k / 2 - 1) as u64))
    } else {
        // Γ(j + 1/2) = (2j)! / (4^j j!) · √π
        let j = ((k - 1) / 2) as u64;
        let q = BigRational::new(
            factorial(2 * j),
            BigInt::from(4).pow(j as u32) * factorial(j),
        );
        &ExactScalar::rational(q) * &ExactScalar::pi_pow_half(1)
    }
}

/// Volume `v_n` of the `n`-dimensional unit ball.
pub fn ball_volume(n: u32) -> ExactScalar {
    ExactScalar::pi_pow_half(n as i32)
        .try_div(&gamma_half(n + 2))
        .expect("gamma values are invertible")
}

/// Volume `s_n` of the `n`-dimensional unit sphere `S^n`, equal to `(n+1) v_{n+1}`.
pub fn sphere_area(n: u32) -> ExactScalar {
    ball_volume(n + 1).scale_int(n as i64 + 1)
}

/// `∫_0^{π/2} cos^a t sin^b t dt`.
pub fn trig_moment(a: u32, b: u32) -> ExactScalar {
    let den = &sphere_area(a) * &sphere_area(b);
    sphere_area(a + b + 1)
        .try_div(&den)
        .expect("sphere areas are invertible")
}

/// `∫_{S^{n-1}} Π ξ_i^{α_i}` where `n = alpha.len()`.
pub fn sphere_integral_monomial(alpha: &[u32]) -> ExactScalar {
    if alpha.iter().any(|a| a % 2 == 1) {
        return ExactScalar::zero();
    }
    let mut num = ExactScalar::int(2);
    for &a in alpha {
        num = &num * &gamma_half(a + 1);
    }
    let total: u32 = alpha.iter().map(|a| a + 1).sum();
    num.try_div(&gamma_half(total))
        .expect("gamma values are invertible")
}

// ---------------------------------------------------------------------------
// Text form

fn render_rational_factor(q: &BigRational, rest_empty: bool, out: &mut Vec<String>) {
    if !q.is_one() || rest_empty {
        out.push(q.to_string());
    }
}

fn pi_factor(c: i32) -> Option<String> {
    match c {
        0 => None,
        2 => Some("pi".into()),
        c if c % 2 == 0 && c > 0 => Some(format!("pi^{}", c / 2)),
        c if c % 2 == 0 => Some(format!("pi^({})", c / 2)),
        c => Some(format!("pi^({}/2)", c)),
    }
}

/// Canonical text form, e.g. `pi`, `-3/8*pi`, `i*2^(1/2)`, `1/2*i*pi^2`.
pub fn render_scalar(x: &ExactScalar) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for t in &x.terms {
        for (q, imag) in [(&t.re, false), (&t.im, true)] {
            if q.is_zero() {
                continue;
            }
            let mut factors = Vec::new();
            if imag {
                factors.push("i".to_string());
            }
            if t.b == 1 {
                factors.push("2^(1/2)".to_string());
            }
            if let Some(p) = pi_factor(t.c) {
                factors.push(p);
            }
            let mut parts = Vec::new();
            render_rational_factor(&q.abs(), factors.is_empty(), &mut parts);
            parts.extend(factors);
            let body = parts.join("*");
            let neg = q.is_negative();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
    }
    out
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

fn parse_factor(f: &str) -> Option<ExactScalar> {
    let f = f.trim();
    if f == "i" {
        return Some(ExactScalar::i());
    }
    if f == "2^(1/2)" {
        return Some(ExactScalar::sqrt2());
    }
    if f == "pi" {
        return Some(ExactScalar::pi());
    }
    if let Some(e) = f.strip_prefix("pi^") {
        let e = e
            .strip_prefix('(')
            .and_then(|e| e.strip_suffix(')'))
            .unwrap_or(e);
        let q = parse_rational(e)?;
        let twice = q * BigRational::from_integer(2.into());
        if !twice.is_integer() {
            return None;
        }
        return Some(ExactScalar::pi_pow_half(twice.to_integer().to_i32()?));
    }
    parse_rational(f).map(ExactScalar::rational)
}

/// Inverse of [`render_scalar`].
pub fn parse_scalar(s: &str) -> Result<ExactScalar, ScalarError> {
    let err = || ScalarError::Parse(s.to_string());
    let mut total = ExactScalar::zero();
    let mut depth = 0i32;
    let mut start = 0usize;
    let mut pieces: Vec<(bool, &str)> = Vec::new();
    let mut neg = false;
    let mut seen_sign = false;
    let bytes = s.as_bytes();
    for (idx, &ch) in bytes.iter().enumerate() {
        match ch {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                let prev = s[start..idx].trim();
                if prev.is_empty() {
                    if !pieces.is_empty() || seen_sign {
                        return Err(err());
                    }
                    seen_sign = true;
                } else {
                    pieces.push((neg, prev));
                }
                neg = ch == b'-';
                start = idx + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if last.is_empty() {
        return Err(err());
    }
    pieces.push((neg, last));
    for (neg, body) in pieces {
        let mut term = ExactScalar::one();
        for f in body.split('*') {
            term = &term * &parse_factor(f).ok_or_else(err)?;
        }
        if neg {
            term = -term;
        }
        total += &term;
    }
    Ok(total)
}
