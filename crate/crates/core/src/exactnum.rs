//! Exact scalars: big rationals and elements of cyclotomic fields.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Render as `n` or `n/d`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Coefficient rings used by polynomials and group algebras.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(r: Rational) -> Self;
    /// Complex conjugation (identity on rationals).
    fn conj(&self) -> Self;
    fn inv(&self) -> Result<Self>;
    /// The value as a rational, if it is one.
    fn to_rational(&self) -> Option<Rational>;
    fn to_cyclotomic(&self) -> Cyclotomic;
}

impl Scalar for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn to_cyclotomic(&self) -> Cyclotomic {
        Cyclotomic::from_rational_in(self.clone(), 1)
    }
}

static PHI_CACHE: Lazy<RwLock<HashMap<u64, Arc<Vec<BigInt>>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

/// The n-th cyclotomic polynomial, coefficients from the constant term up.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    phi_cached(n).as_ref().clone()
}

fn phi_cached(n: u64) -> Arc<Vec<BigInt>> {
    if let Some(p) = PHI_CACHE.read().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Phi_d with d a proper divisor
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let q = phi_cached(d);
        num = monic_div(&num, &q);
    }
    let p = Arc::new(num);
    PHI_CACHE.write().unwrap().insert(n, p.clone());
    p
}

fn monic_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    if r.len() <= db {
        return vec![BigInt::zero()];
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    debug_assert!(r.iter().all(|x| x.is_zero()), "inexact cyclotomic division");
    q
}

/// Element of Q(zeta_n), stored as a polynomial of degree < phi(n) in zeta_n.
#[derive(Clone)]
pub struct Cyclotomic {
    n: u64,
    c: Vec<Rational>,
}

fn reduce_mod_phi(mut p: Vec<Rational>, n: u64) -> Vec<Rational> {
    let phi = phi_cached(n);
    let d = phi.len() - 1;
    for i in (d..p.len()).rev() {
        let c = std::mem::replace(&mut p[i], Rational::zero());
        if c.is_zero() {
            continue;
        }
        // Phi is monic: x^d = -(lower terms)
        for j in 0..d {
            if !phi[j].is_zero() {
                p[i - d + j] -= &c * Rational::from_integer(phi[j].clone());
            }
        }
    }
    p.resize(d, Rational::zero());
    p
}

impl Cyclotomic {
    pub fn from_rational_in(r: Rational, n: u64) -> Self {
        let d = euler_phi(n) as usize;
        let mut c = vec![Rational::zero(); d];
        c[0] = r;
        Cyclotomic { n, c }
    }

    /// zeta_n^e.
    pub fn zeta(n: u64, e: i64) -> Self {
        assert!(n >= 1);
        let e = e.rem_euclid(n as i64) as usize;
        let mut p = vec![Rational::zero(); e + 1];
        p[e] = Rational::one();
        Cyclotomic { n, c: reduce_mod_phi(p, n) }
    }

    /// Build from coefficients of an arbitrary polynomial in zeta_n.
    pub fn from_poly(coeffs: Vec<Rational>, n: u64) -> Self {
        Cyclotomic { n, c: reduce_mod_phi(coeffs, n) }
    }

    pub fn conductor(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    /// Embed into Q(zeta_m) for a multiple m of the conductor.
    pub fn embed(&self, m: u64) -> Self {
        if m == self.n {
            return self.clone();
        }
        assert!(m % self.n == 0, "conductor {} does not divide {}", self.n, m);
        let s = (m / self.n) as usize;
        let mut p = vec![Rational::zero(); s * self.c.len().max(1)];
        for (i, c) in self.c.iter().enumerate() {
            if !c.is_zero() {
                p[i * s] = c.clone();
            }
        }
        Cyclotomic { n: m, c: reduce_mod_phi(p, m) }
    }

    fn align(a: &Self, b: &Self) -> (Self, Self) {
        if a.n == b.n {
            return (a.clone(), b.clone());
        }
        let m = a.n.lcm(&b.n);
        (a.embed(m), b.embed(m))
    }

    pub fn conjugate(&self) -> Self {
        let n = self.n as usize;
        let mut p = vec![Rational::zero(); n];
        for (i, c) in self.c.iter().enumerate() {
            if !c.is_zero() {
                p[(n - i) % n] += c;
            }
        }
        Cyclotomic::from_poly(p, self.n)
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let phi: Vec<Rational> = phi_cached(self.n)
            .iter()
            .map(|x| Rational::from_integer(x.clone()))
            .collect();
        let s = poly_inverse_mod(&self.c, &phi);
        Ok(Cyclotomic::from_poly(s, self.n))
    }

    /// Lower the conductor as far as possible; canonical for equality and printing.
    pub fn simplify(&self) -> Self {
        if let Some(r) = self.to_rational() {
            return Cyclotomic::from_rational_in(r, 1);
        }
        for d in divisors(self.n) {
            if d == self.n || d == 1 {
                continue;
            }
            if let Some(x) = self.restrict_to(d) {
                return x;
            }
        }
        self.clone()
    }

    /// The element as a member of Q(zeta_d), d | n, if it lies there.
    fn restrict_to(&self, d: u64) -> Option<Self> {
        let k = euler_phi(d) as usize;
        let rows = self.c.len();
        // columns: embedded basis zeta_d^j, last column: self
        let mut m: Vec<Vec<Rational>> = vec![Vec::with_capacity(k + 1); rows];
        for j in 0..k {
            let e = Cyclotomic::zeta(d, j as i64).embed(self.n);
            for (r, row) in m.iter_mut().enumerate() {
                row.push(e.c[r].clone());
            }
        }
        for (r, row) in m.iter_mut().enumerate() {
            row.push(self.c[r].clone());
        }
        let mut piv = Vec::new();
        let mut r0 = 0;
        for col in 0..k {
            let Some(p) = (r0..rows).find(|&r| !m[r][col].is_zero()) else { continue };
            m.swap(r0, p);
            let inv = m[r0][col].recip();
            for x in m[r0].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..rows {
                if r != r0 && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in 0..=k {
                        let v = &m[r0][c] * &f;
                        m[r][c] -= v;
                    }
                }
            }
            piv.push(col);
            r0 += 1;
        }
        if (r0..rows).any(|r| !m[r][k].is_zero()) {
            return None;
        }
        let mut a = vec![Rational::zero(); k];
        for (r, &col) in piv.iter().enumerate() {
            a[col] = m[r][k].clone();
        }
        Some(Cyclotomic { n: d, c: a })
    }
}

fn trim(p: &mut Vec<Rational>) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                r[i + j] += x * y;
            }
        }
    }
    r
}

fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let mut b = b.to_vec();
    trim(&mut b);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() <= db {
        return (vec![Rational::zero()], r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    r.truncate(db.max(1));
    trim(&mut r);
    (q, r)
}

fn is_zero_poly(p: &[Rational]) -> bool {
    p.iter().all(|c| c.is_zero())
}

/// s with s*a = 1 mod m, for a coprime to m.
fn poly_inverse_mod(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    let (mut s0, mut s1) = (vec![Rational::zero()], vec![Rational::one()]);
    trim(&mut r1);
    while !is_zero_poly(&r1) {
        let (q, r) = poly_divmod(&r0, &r1);
        let qs = poly_mul(&q, &s1);
        let mut s2 = s0.clone();
        if s2.len() < qs.len() {
            s2.resize(qs.len(), Rational::zero());
        }
        for (i, c) in qs.into_iter().enumerate() {
            s2[i] -= c;
        }
        trim(&mut s2);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    // r0 is a nonzero constant
    trim(&mut r0);
    let g = r0[0].clone();
    s0.into_iter().map(|c| c / &g).collect()
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclotomic {
    /// `3/2`, or `(1 + 2*z12^3)` in powers of zeta_n.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.simplify();
        if let Some(r) = s.to_rational() {
            return write!(f, "{}", fmt_rational(&r));
        }
        let mut parts = Vec::new();
        for (i, c) in s.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => format!("z{}", s.n),
                _ => format!("z{}^{}", s.n, i),
            };
            parts.push(if mon.is_empty() {
                fmt_rational(c)
            } else if c.is_one() {
                mon
            } else {
                format!("{}*{}", fmt_rational(c), mon)
            });
        }
        write!(f, "({})", parts.join(" + "))
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.n == other.n {
            return self.c == other.c;
        }
        let (a, b) = Cyclotomic::align(self, other);
        a.c == b.c
    }
}

impl Eq for Cyclotomic {}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic { n: 1, c: vec![Rational::zero()] }
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|c| c.is_zero())
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Cyclotomic { n: 1, c: vec![Rational::one()] }
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, o: Cyclotomic) -> Cyclotomic {
        &self + &o
    }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, o: &Cyclotomic) -> Cyclotomic {
        let (mut a, b) = Cyclotomic::align(self, o);
        for (x, y) in a.c.iter_mut().zip(b.c.iter()) {
            *x += y;
        }
        a
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, o: Cyclotomic) -> Cyclotomic {
        &self + &(-o)
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(mut self) -> Cyclotomic {
        for x in self.c.iter_mut() {
            *x = -x.clone();
        }
        self
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, o: Cyclotomic) -> Cyclotomic {
        &self * &o
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, o: &Cyclotomic) -> Cyclotomic {
        if self.n == 1 {
            let r = &self.c[0];
            let mut b = o.clone();
            for x in b.c.iter_mut() {
                *x *= r;
            }
            return b;
        }
        if o.n == 1 {
            return o * self;
        }
        let (a, b) = Cyclotomic::align(self, o);
        let n = a.n;
        Cyclotomic::from_poly(poly_mul(&a.c, &b.c), n)
    }
}

impl Scalar for Cyclotomic {
    fn from_rational(r: Rational) -> Self {
        Cyclotomic::from_rational_in(r, 1)
    }
    fn conj(&self) -> Self {
        self.conjugate()
    }
    fn inv(&self) -> Result<Self> {
        self.inverse()
    }
    fn to_rational(&self) -> Option<Rational> {
        if self.c.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }
    fn to_cyclotomic(&self) -> Cyclotomic {
        self.clone()
    }
}

/// Sign of a rational as -1, 0, 1.
pub fn sign(r: &Rational) -> i64 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}
