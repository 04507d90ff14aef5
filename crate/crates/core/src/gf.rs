//! Exact arithmetic in GF(p^e).
//!
//! Elements are stored as integers in `[0, q)` by base-`p` packing of their
//! polynomial coefficients, constant term least significant. This packing is
//! also the serialized form used in code files.
//!
//! A [`Field`] owns log/antilog tables built from its primitive element, so
//! multiplication, inversion and powering are table lookups. Addition is XOR
//! in characteristic 2, a modular add in prime fields, and a digit-wise add
//! (tabulated for small `q`) otherwise.

use std::fmt;
use std::sync::Arc;

use crate::arith;
use crate::error::{Error, Result};

/// Largest field size the library will build tables for.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

const ADD_TABLE_LIMIT: u32 = 256;

/// A finite field GF(p^e) with a fixed modulus and primitive element.
///
/// Cloning is cheap; all clones share the same tables.
#[derive(Clone)]
pub struct Field {
    inner: Arc<FieldInner>,
}

struct FieldInner {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    alpha: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add_table: Option<Vec<u32>>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.e == other.inner.e
                && self.inner.modulus == other.inner.modulus
                && self.inner.alpha == other.inner.alpha)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GF({}^{}; modulus={:?}, alpha={})",
            self.inner.p, self.inner.e, self.inner.modulus, self.inner.alpha
        )
    }
}

impl Field {
    /// Builds GF(p^e).
    ///
    /// Without an explicit modulus the default is the monic irreducible
    /// polynomial of degree `e` with the smallest packed integer encoding
    /// whose root `x` is primitive; `alpha` is then the class of `x`. For
    /// `e = 1` the modulus is `x` and `alpha` is the smallest primitive
    /// residue. With an explicit modulus, `alpha` is `x` when that is
    /// primitive and otherwise the smallest primitive element.
    pub fn new(p: u64, e: u32, modulus: Option<&[u32]>) -> Result<Field> {
        let (p, q) = Self::check_size(p, e)?;
        let modulus = match modulus {
            Some(m) => {
                check_modulus(p, e, m)?;
                m.to_vec()
            }
            None if e == 1 => vec![0, 1],
            None => default_modulus(p, e),
        };
        let alpha = if e > 1 && is_x_primitive(p, &modulus) {
            p
        } else {
            smallest_primitive(p, &modulus, q)
        };
        Self::build(p, e, q, modulus, alpha)
    }

    /// Builds GF(p^e) with an explicitly chosen primitive element.
    pub fn with_alpha(p: u64, e: u32, modulus: &[u32], alpha: u32) -> Result<Field> {
        let (p, q) = Self::check_size(p, e)?;
        check_modulus(p, e, modulus)?;
        if alpha == 0 || alpha >= q {
            return Err(Error::NonPrimitive(alpha));
        }
        Self::build(p, e, q, modulus.to_vec(), alpha)
    }

    /// GF(q) for a prime power `q`, default representation.
    pub fn of_order(q: u64) -> Result<Field> {
        let (p, e) = arith::prime_power(q).ok_or(Error::NotPrime(q))?;
        Field::new(p, e, None)
    }

    fn check_size(p: u64, e: u32) -> Result<(u32, u32)> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::ReducibleModulus(vec![]));
        }
        let q = arith::checked_pow(p, e).filter(|&q| q <= MAX_FIELD_SIZE);
        match q {
            Some(q) => Ok((p as u32, q as u32)),
            None => Err(Error::FieldTooLarge(p.saturating_pow(e))),
        }
    }

    fn build(p: u32, e: u32, q: u32, modulus: Vec<u32>, alpha: u32) -> Result<Field> {
        let order = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * order.max(1)];
        let mut log = vec![u32::MAX; q as usize];
        let mut x = 1u32;
        for i in 0..order {
            if log[x as usize] != u32::MAX {
                return Err(Error::NonPrimitive(alpha));
            }
            exp[i] = x;
            log[x as usize] = i as u32;
            x = slow_mul(p, e, &modulus, x, alpha);
        }
        if x != 1 {
            return Err(Error::NonPrimitive(alpha));
        }
        for i in order..exp.len() {
            exp[i] = exp[i - order];
        }
        log[0] = 0;

        let neg: Vec<u32> = (0..q)
            .map(|a| map_digits(p, e, a, |c| (p - c) % p))
            .collect();
        let add_table = (p != 2 && e > 1 && q <= ADD_TABLE_LIMIT).then(|| {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = digit_add(p, e, a, b);
                }
            }
            t
        });

        Ok(Field {
            inner: Arc::new(FieldInner {
                p,
                e,
                q,
                modulus,
                alpha,
                exp,
                log,
                neg,
                add_table,
            }),
        })
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn e(&self) -> u32 {
        self.inner.e
    }

    /// Number of elements.
    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Modulus coefficients, constant term first; monic of degree `e`.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn alpha(&self) -> u32 {
        self.inner.alpha
    }

    pub fn contains(&self, v: u64) -> bool {
        v < self.inner.q as u64
    }

    pub fn element(&self, v: u64) -> Result<Fe> {
        if !self.contains(v) {
            return Err(Error::NotAnElement {
                value: v,
                q: self.inner.q,
            });
        }
        Ok(Fe {
            field: self.clone(),
            value: v as u32,
        })
    }

    pub fn coeffs(&self, v: u32) -> Vec<u32> {
        unpack(self.inner.p, self.inner.e, v)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<u32> {
        if coeffs.len() != self.inner.e as usize || coeffs.iter().any(|&c| c >= self.inner.p) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients in [0,{})",
                self.inner.e, self.inner.p
            )));
        }
        Ok(pack(self.inner.p, coeffs))
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let f = &*self.inner;
        if f.p == 2 {
            a ^ b
        } else if f.e == 1 {
            let s = a + b;
            if s >= f.p {
                s - f.p
            } else {
                s
            }
        } else if let Some(t) = &f.add_table {
            t[(a * f.q + b) as usize]
        } else {
            digit_add(f.p, f.e, a, b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.inner.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let f = &*self.inner;
        f.exp[(f.log[a as usize] + f.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let f = &*self.inner;
        let order = f.q - 1;
        Ok(f.exp[((order - f.log[a as usize]) % order) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^n`; negative exponents require `a != 0`.
    pub fn pow(&self, a: u32, n: i64) -> Result<u32> {
        if a == 0 {
            return match n {
                0 => Ok(1),
                n if n > 0 => Ok(0),
                _ => Err(Error::DivisionByZero),
            };
        }
        let order = (self.inner.q - 1) as i64;
        let l = self.inner.log[a as usize] as i64;
        let idx = (l * n.rem_euclid(order)).rem_euclid(order);
        Ok(self.inner.exp[idx as usize])
    }

    /// `alpha^i` for any integer `i`.
    #[inline]
    pub fn alpha_pow(&self, i: i64) -> u32 {
        let order = (self.inner.q - 1) as i64;
        self.inner.exp[i.rem_euclid(order) as usize]
    }

    /// Discrete log base `alpha`; `None` for zero.
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.inner.log[a as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: u32) -> Result<u64> {
        let l = self.log(a).ok_or(Error::ZeroElement)? as u64;
        let order = (self.inner.q - 1) as u64;
        Ok(order / arith::gcd(l, order))
    }

    pub(crate) fn check(&self, v: u32) -> Result<u32> {
        if v < self.inner.q {
            Ok(v)
        } else {
            Err(Error::NotAnElement {
                value: v as u64,
                q: self.inner.q,
            })
        }
    }
}

/// A field element bound to its field.
///
/// This is the checked, self-describing view of an element; bulk code
/// (matrices, codes) works on raw `u32` values through [`Field`].
#[derive(Clone, PartialEq, Eq)]
pub struct Fe {
    field: Field,
    value: u32,
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({})", self.value)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Binary field operation on two elements of the same field.
pub fn arith(op: ArithOp, a: &Fe, b: &Fe) -> Result<Fe> {
    if a.field != b.field {
        return Err(Error::FieldMismatch);
    }
    let f = &a.field;
    let value = match op {
        ArithOp::Add => f.add(a.value, b.value),
        ArithOp::Sub => f.sub(a.value, b.value),
        ArithOp::Mul => f.mul(a.value, b.value),
        ArithOp::Div => f.div(a.value, b.value)?,
    };
    Ok(Fe {
        field: f.clone(),
        value,
    })
}

impl Fe {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn add(&self, other: &Fe) -> Result<Fe> {
        arith(ArithOp::Add, self, other)
    }

    pub fn sub(&self, other: &Fe) -> Result<Fe> {
        arith(ArithOp::Sub, self, other)
    }

    pub fn mul(&self, other: &Fe) -> Result<Fe> {
        arith(ArithOp::Mul, self, other)
    }

    pub fn div(&self, other: &Fe) -> Result<Fe> {
        arith(ArithOp::Div, self, other)
    }

    pub fn pow(&self, n: i64) -> Result<Fe> {
        Ok(Fe {
            field: self.field.clone(),
            value: self.field.pow(self.value, n)?,
        })
    }

    pub fn order(&self) -> Result<u64> {
        self.field.order(self.value)
    }
}

fn unpack(p: u32, e: u32, mut v: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    for _ in 0..e {
        out.push(v % p);
        v /= p;
    }
    out
}

fn pack(p: u32, coeffs: &[u32]) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn map_digits(p: u32, e: u32, v: u32, f: impl Fn(u32) -> u32) -> u32 {
    let digits: Vec<u32> = unpack(p, e, v).into_iter().map(f).collect();
    pack(p, &digits)
}

fn digit_add(p: u32, e: u32, a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    let mut scale = 1;
    for _ in 0..e {
        out += ((a % p + b % p) % p) * scale;
        a /= p;
        b /= p;
        scale *= p;
    }
    out
}

/// Product of packed elements by schoolbook multiplication and reduction.
fn slow_mul(p: u32, e: u32, modulus: &[u32], a: u32, b: u32) -> u32 {
    if e == 1 {
        return ((a as u64 * b as u64) % p as u64) as u32;
    }
    let prod = poly_mulmod(p, &unpack(p, e, a), &unpack(p, e, b), modulus);
    pack(p, &prod)
}

fn poly_mulmod(p: u32, a: &[u32], b: &[u32], modulus: &[u32]) -> Vec<u32> {
    let e = modulus.len() - 1;
    let p64 = p as u64;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    // modulus is monic: x^e = -(m_0 + ... + m_{e-1} x^{e-1})
    for deg in (e..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        prod[deg] = 0;
        for (i, &m) in modulus[..e].iter().enumerate() {
            let idx = deg - e + i;
            prod[idx] = (prod[idx] + (p64 - c) * m as u64) % p64;
        }
    }
    prod.truncate(e);
    prod.resize(e, 0);
    prod.into_iter().map(|c| c as u32).collect()
}

fn poly_powmod(p: u32, base: &[u32], mut n: u64, modulus: &[u32]) -> Vec<u32> {
    let e = modulus.len() - 1;
    let mut result = vec![0u32; e];
    result[0] = 1;
    let mut b = base.to_vec();
    while n > 0 {
        if n & 1 == 1 {
            result = poly_mulmod(p, &result, &b, modulus);
        }
        b = poly_mulmod(p, &b, &b, modulus);
        n >>= 1;
    }
    result
}

/// True iff `x` has multiplicative order `p^e - 1` modulo `modulus`; this
/// also implies the modulus is irreducible.
fn is_x_primitive(p: u32, modulus: &[u32]) -> bool {
    let e = modulus.len() - 1;
    if modulus[0] == 0 {
        return false;
    }
    let order = (p as u64).pow(e as u32) - 1;
    let mut x = vec![0u32; e];
    if e == 1 {
        // x reduces to -m_0
        x[0] = (p - modulus[0]) % p;
    } else {
        x[1] = 1;
    }
    let is_one = |v: &[u32]| v[0] == 1 && v[1..].iter().all(|&c| c == 0);
    if !is_one(&poly_powmod(p, &x, order, modulus)) {
        return false;
    }
    arith::factorize(order)
        .into_iter()
        .all(|(l, _)| !is_one(&poly_powmod(p, &x, order / l, modulus)))
}

fn default_modulus(p: u32, e: u32) -> Vec<u32> {
    let q = p.pow(e);
    (1..q)
        .map(|low| {
            let mut m = unpack(p, e, low);
            m.push(1);
            m
        })
        .find(|m| is_x_primitive(p, m))
        .expect("a primitive polynomial exists for every degree")
}

fn smallest_primitive(p: u32, modulus: &[u32], q: u32) -> u32 {
    let e = modulus.len() as u32 - 1;
    let order = (q - 1) as u64;
    let factors = arith::factorize(order);
    (1..q)
        .find(|&g| {
            let pw = |n: u64| {
                let digits = unpack(p, e, g);
                pack(p, &poly_powmod_any(p, &digits, n, modulus))
            };
            pw(order) == 1 && factors.iter().all(|&(l, _)| pw(order / l) != 1)
        })
        .unwrap_or(1)
}

fn poly_powmod_any(p: u32, base: &[u32], n: u64, modulus: &[u32]) -> Vec<u32> {
    if modulus.len() == 2 {
        // degree-1 modulus: elements are plain residues
        let mut acc = 1u64;
        let mut b = base[0] as u64;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * b % p as u64;
            }
            b = b * b % p as u64;
            n >>= 1;
        }
        return vec![acc as u32];
    }
    poly_powmod(p, base, n, modulus)
}

fn check_modulus(p: u32, e: u32, modulus: &[u32]) -> Result<()> {
    let bad = || Error::ReducibleModulus(modulus.to_vec());
    if modulus.len() != e as usize + 1
        || modulus[e as usize] != 1
        || modulus.iter().any(|&c| c >= p)
    {
        return Err(bad());
    }
    if e > 1 && !is_irreducible(p, modulus) {
        return Err(bad());
    }
    Ok(())
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(p: u32, f: &[u32]) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut g = unpack(p, d as u32, low);
            g.push(1);
            if poly_rem_is_zero(p, f, &g) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(p: u32, f: &[u32], g: &[u32]) -> bool {
    let dg = g.len() - 1;
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let p64 = p as u64;
    for deg in (dg..r.len()).rev() {
        let c = r[deg];
        if c == 0 {
            continue;
        }
        for (i, &gc) in g.iter().enumerate() {
            let idx = deg - dg + i;
            r[idx] = (r[idx] + (p64 - c) * gc as u64) % p64;
        }
    }
    r.iter().all(|&c| c == 0)
}
