//! Finite-field contexts and elements.
//!
//! A [`FieldCtx`] describes F_q with q = p^k, p an odd prime below 2^61.
//! Elements are coefficient vectors over F_p in the monomial basis of a
//! deterministically chosen modulus, so two independently created contexts
//! for the same (p, k) are interchangeable. Prime fields (k = 1) skip the
//! modulus entirely.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

/// Largest supported characteristic, exclusive. Keeps every u64 product of
/// two reduced residues inside u128 with headroom for sums.
pub const MAX_CHAR: u64 = 1 << 61;

const MAX_EXT_DEGREE: usize = 64;

#[inline]
fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b; // a, b < p < 2^61, no overflow
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin: the first twelve primes are known to witness
/// compositeness for every composite below 3.3 * 10^24, far above `MAX_CHAR`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &small in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == small {
            return true;
        }
        if n % small == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// ---------------------------------------------------------------------------
// Raw polynomial arithmetic over F_p (little-endian u64 coefficient vectors).
// Used for the modulus search and for extension-element arithmetic; the
// public polynomial type in `upoly` is independent and cross-checks this.
// ---------------------------------------------------------------------------

fn raw_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn raw_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = addmod(out[i + j], mulmod(ai, bj, p), p);
        }
    }
    raw_trim(&mut out);
    out
}

/// Remainder of `a` by a monic `f`.
fn raw_rem(mut a: Vec<u64>, f: &[u64], p: u64) -> Vec<u64> {
    debug_assert_eq!(*f.last().unwrap(), 1);
    let df = f.len() - 1;
    while a.len() > df {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - df;
        if lead != 0 {
            for i in 0..df {
                a[shift + i] = submod(a[shift + i], mulmod(lead, f[i], p), p);
            }
        }
        a.pop();
        raw_trim(&mut a);
        if a.len() <= df {
            break;
        }
    }
    raw_trim(&mut a);
    a
}

fn raw_mulrem(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    raw_rem(raw_mul(a, b, p), f, p)
}

fn raw_pow(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = raw_mulrem(&acc, &b, f, p);
        }
        b = raw_mulrem(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn raw_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    raw_trim(&mut a);
    raw_trim(&mut b);
    while !b.is_empty() {
        // Make b monic so raw_rem applies.
        let lc = *b.last().unwrap();
        if lc != 1 {
            let inv = powmod(lc, p - 2, p);
            for c in b.iter_mut() {
                *c = mulmod(*c, inv, p);
            }
        }
        let r = raw_rem(a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&lc) = a.last() {
        if lc != 1 {
            let inv = powmod(lc, p - 2, p);
            for c in a.iter_mut() {
                *c = mulmod(*c, inv, p);
            }
        }
    }
    a
}

/// Extended Euclid returning the inverse of `a` modulo monic `f`, or None if
/// gcd(a, f) != 1.
fn raw_inv_mod(a: &[u64], f: &[u64], p: u64) -> Option<Vec<u64>> {
    let mut r0 = f.to_vec();
    let mut r1 = raw_rem(a.to_vec(), f, p);
    let mut t0: Vec<u64> = Vec::new();
    let mut t1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        // Divide r0 by r1 (r1 need not be monic).
        let lc = *r1.last().unwrap();
        let lcinv = powmod(lc, p - 2, p);
        let mut q = vec![0u64; r0.len().saturating_sub(r1.len()) + 1];
        let mut rem = r0.clone();
        while rem.len() >= r1.len() && !rem.is_empty() {
            let shift = rem.len() - r1.len();
            let c = mulmod(*rem.last().unwrap(), lcinv, p);
            q[shift] = c;
            for (i, &ri) in r1.iter().enumerate() {
                rem[shift + i] = submod(rem[shift + i], mulmod(c, ri, p), p);
            }
            raw_trim(&mut rem);
        }
        raw_trim(&mut q);
        let t2_sub = raw_mul(&q, &t1, p);
        let mut t2 = t0.clone();
        t2.resize(t2.len().max(t2_sub.len()), 0);
        for (i, &s) in t2_sub.iter().enumerate() {
            t2[i] = submod(t2[i], s, p);
        }
        raw_trim(&mut t2);
        r0 = r1;
        r1 = rem;
        t0 = t1;
        t1 = t2;
    }
    if r0.len() != 1 {
        return None;
    }
    let inv = powmod(r0[0], p - 2, p);
    let mut out: Vec<u64> = t0.iter().map(|&c| mulmod(c, inv, p)).collect();
    raw_trim(&mut out);
    Some(raw_rem(out, f, p))
}

/// Irreducibility of a monic degree-n polynomial over F_p:
/// x^{p^n} == x mod f, and gcd(x^{p^{n/r}} - x, f) = 1 for each prime r | n.
fn raw_is_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // frob[j] = x^{p^j} mod f, computed by iterated p-th powers.
    let mut cur = x.clone();
    let mut frob = Vec::with_capacity(n + 1);
    frob.push(cur.clone()); // j = 0
    for _ in 1..=n {
        cur = raw_pow(&cur, p, f, p);
        frob.push(cur.clone());
    }
    if frob[n] != x {
        return false;
    }
    let mut m = n;
    let mut primes = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            primes.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for r in primes {
        let mut g = frob[n / r].clone();
        // g := x^{p^{n/r}} - x
        g.resize(g.len().max(2), 0);
        g[1] = submod(g[1], 1, p);
        raw_trim(&mut g);
        let gcd = raw_gcd(g, f.to_vec(), p);
        if gcd.len() != 1 {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Contexts
// ---------------------------------------------------------------------------

#[derive(Debug)]
struct CtxInner {
    p: u64,
    k: usize,
    /// Monic irreducible modulus, little-endian, length k+1. None for k = 1.
    modulus: Option<Vec<u64>>,
    q: BigUint,
}

/// Shared description of a finite field F_{p^k}.
#[derive(Clone, Debug)]
pub struct FieldCtx(Arc<CtxInner>);

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k)
    }
}
impl Eq for FieldCtx {}

/// Construct F_{p^k}. The modulus for k > 1 is the first monic irreducible
/// polynomial in ascending little-endian lexicographic coefficient order, so
/// repeated calls with the same (p, k) agree exactly.
pub fn make_field(p: u64, k: usize) -> Result<FieldCtx> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if p >= MAX_CHAR {
        return Err(Error::Unsupported(format!(
            "characteristic {p} is at or above the 2^61 limit"
        )));
    }
    if k == 0 || k > MAX_EXT_DEGREE {
        return Err(Error::Unsupported(format!(
            "extension degree {k} outside supported range 1..={MAX_EXT_DEGREE}"
        )));
    }
    let q = BigUint::from(p).pow(k as u32);
    let modulus = if k == 1 {
        None
    } else {
        Some(find_modulus(p, k))
    };
    Ok(FieldCtx(Arc::new(CtxInner { p, k, modulus, q })))
}

fn find_modulus(p: u64, k: usize) -> Vec<u64> {
    // Odometer over the k non-leading coefficients (c_0, ..., c_{k-1}),
    // lexicographic: the last coordinate varies fastest.
    let mut digits = vec![0u64; k];
    loop {
        let mut f = digits.clone();
        f.push(1);
        if raw_is_irreducible(&f, p) {
            return f;
        }
        let mut i = k;
        loop {
            debug_assert!(i > 0, "no irreducible polynomial found; impossible");
            i -= 1;
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
        }
    }
}

impl FieldCtx {
    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn k(&self) -> usize {
        self.0.k
    }

    /// Field size q = p^k.
    pub fn q(&self) -> &BigUint {
        &self.0.q
    }

    /// q as u64 when it fits; enumerative paths insist on this.
    pub fn q_u64(&self) -> Option<u64> {
        self.0.q.to_u64()
    }

    /// Little-endian coefficients of the modulus (length k+1), for k > 1.
    pub fn modulus_coeffs(&self) -> Option<&[u64]> {
        self.0.modulus.as_deref()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            ctx: self.clone(),
            rep: smallvec![0; self.0.k],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_u64(1)
    }

    /// The constant element congruent to v.
    pub fn from_u64(&self, v: u64) -> FieldElement {
        let mut rep: SmallVec<[u64; 2]> = smallvec![0; self.0.k];
        rep[0] = v % self.0.p;
        FieldElement {
            ctx: self.clone(),
            rep,
        }
    }

    /// The constant element congruent to a signed integer.
    pub fn from_int(&self, v: i64) -> FieldElement {
        let p = self.0.p as i128;
        let r = ((v as i128 % p) + p) % p;
        self.from_u64(r as u64)
    }

    /// Element with the given little-endian coefficients over F_p
    /// (short vectors are zero-padded; entries are reduced mod p).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.0.k {
            return Err(Error::Unsupported(format!(
                "{} coefficients exceed extension degree {}",
                coeffs.len(),
                self.0.k
            )));
        }
        let mut rep: SmallVec<[u64; 2]> = smallvec![0; self.0.k];
        for (i, &c) in coeffs.iter().enumerate() {
            rep[i] = c % self.0.p;
        }
        Ok(FieldElement {
            ctx: self.clone(),
            rep,
        })
    }

    /// The generator of the coefficient basis: the class of x for k > 1,
    /// and simply 1 for prime fields.
    pub fn basis_generator(&self) -> FieldElement {
        if self.0.k == 1 {
            self.one()
        } else {
            let mut rep: SmallVec<[u64; 2]> = smallvec![0; self.0.k];
            rep[1] = 1;
            FieldElement {
                ctx: self.clone(),
                rep,
            }
        }
    }

    /// Map an integer to an element through the canonical index: reduce
    /// mod q, then read base-p digits as basis coefficients.
    pub fn from_integer(&self, v: i128) -> FieldElement {
        let q = BigInt::from(self.0.q.clone());
        let mut r = BigInt::from(v) % &q;
        if r.is_negative() {
            r += &q;
        }
        let mut n = r.to_biguint().expect("non-negative after reduction");
        let p = BigUint::from(self.0.p);
        let mut rep: SmallVec<[u64; 2]> = smallvec![0; self.0.k];
        for slot in rep.iter_mut() {
            if n.is_zero() {
                break;
            }
            let (div, rem) = n.div_rem(&p);
            *slot = rem.to_u64().expect("digit below p");
            n = div;
        }
        FieldElement {
            ctx: self.clone(),
            rep,
        }
    }

    /// All q elements in canonical index order (0, 1, ..., q-1).
    pub fn elements(&self) -> ElementIter {
        ElementIter {
            ctx: self.clone(),
            digits: smallvec![0; self.0.k],
            done: false,
        }
    }
}

pub struct ElementIter {
    ctx: FieldCtx,
    digits: SmallVec<[u64; 2]>,
    done: bool,
}

impl Iterator for ElementIter {
    type Item = FieldElement;

    fn next(&mut self) -> Option<FieldElement> {
        if self.done {
            return None;
        }
        let out = FieldElement {
            ctx: self.ctx.clone(),
            rep: self.digits.clone(),
        };
        // Increment base-p, least-significant digit first.
        let p = self.ctx.0.p;
        let mut i = 0;
        loop {
            if i == self.digits.len() {
                self.done = true;
                break;
            }
            self.digits[i] += 1;
            if self.digits[i] < p {
                break;
            }
            self.digits[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// An element of F_{p^k}: little-endian coefficient vector of length k over
/// F_p in the basis 1, x, ..., x^{k-1} of the context's modulus.
#[derive(Clone)]
pub struct FieldElement {
    ctx: FieldCtx,
    rep: SmallVec<[u64; 2]>,
}

/// Binary field operation selector for the checked entry point [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked arithmetic: verifies the operands share a context and rejects
/// division by zero.
pub fn arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    if a.ctx != b.ctx {
        return Err(Error::ContextMismatch);
    }
    match op {
        ArithOp::Add => Ok(a.add(b)),
        ArithOp::Sub => Ok(a.sub(b)),
        ArithOp::Mul => Ok(a.mul(b)),
        ArithOp::Div => {
            if b.is_zero() {
                Err(Error::DivisionByZero)
            } else {
                Ok(a.mul(&b.inv_unchecked()))
            }
        }
    }
}

impl FieldElement {
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.rep.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.rep[0] == 1 && self.rep[1..].iter().all(|&c| c == 0)
    }

    /// Little-endian coefficients over F_p (length k).
    pub fn coeffs(&self) -> &[u64] {
        &self.rep
    }

    /// Canonical index: sum of coefficients times powers of p, in [0, q).
    pub fn canonical_index(&self) -> BigUint {
        let p = BigUint::from(self.ctx.0.p);
        let mut acc = BigUint::zero();
        for &c in self.rep.iter().rev() {
            acc = acc * &p + BigUint::from(c);
        }
        acc
    }

    pub fn canonical_index_u64(&self) -> Option<u64> {
        self.canonical_index().to_u64()
    }

    fn assert_ctx(&self, other: &FieldElement) {
        assert!(
            self.ctx == other.ctx,
            "field context mismatch in internal arithmetic"
        );
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.assert_ctx(other);
        let p = self.ctx.0.p;
        let rep = self
            .rep
            .iter()
            .zip(other.rep.iter())
            .map(|(&a, &b)| addmod(a, b, p))
            .collect();
        FieldElement {
            ctx: self.ctx.clone(),
            rep,
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.assert_ctx(other);
        let p = self.ctx.0.p;
        let rep = self
            .rep
            .iter()
            .zip(other.rep.iter())
            .map(|(&a, &b)| submod(a, b, p))
            .collect();
        FieldElement {
            ctx: self.ctx.clone(),
            rep,
        }
    }

    pub fn neg(&self) -> FieldElement {
        let p = self.ctx.0.p;
        let rep = self.rep.iter().map(|&a| submod(0, a, p)).collect();
        FieldElement {
            ctx: self.ctx.clone(),
            rep,
        }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.assert_ctx(other);
        let p = self.ctx.0.p;
        let k = self.ctx.0.k;
        if k == 1 {
            return FieldElement {
                ctx: self.ctx.clone(),
                rep: smallvec![mulmod(self.rep[0], other.rep[0], p)],
            };
        }
        let prod = raw_mul(&self.rep, &other.rep, p);
        let modulus = self.ctx.0.modulus.as_ref().expect("k > 1 has modulus");
        let red = raw_rem(prod, modulus, p);
        let mut rep: SmallVec<[u64; 2]> = smallvec![0; k];
        rep[..red.len()].copy_from_slice(&red);
        FieldElement {
            ctx: self.ctx.clone(),
            rep,
        }
    }

    pub fn square(&self) -> FieldElement {
        self.mul(self)
    }

    /// Multiplicative inverse; the zero element is rejected.
    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.inv_unchecked())
    }

    fn inv_unchecked(&self) -> FieldElement {
        let p = self.ctx.0.p;
        let k = self.ctx.0.k;
        if k == 1 {
            return FieldElement {
                ctx: self.ctx.clone(),
                rep: smallvec![powmod(self.rep[0], p - 2, p)],
            };
        }
        let modulus = self.ctx.0.modulus.as_ref().expect("k > 1 has modulus");
        let inv = raw_inv_mod(&self.rep, modulus, p)
            .expect("nonzero element of a field is invertible");
        let mut rep: SmallVec<[u64; 2]> = smallvec![0; k];
        rep[..inv.len()].copy_from_slice(&inv);
        FieldElement {
            ctx: self.ctx.clone(),
            rep,
        }
    }

    pub fn pow(&self, e: &BigUint) -> FieldElement {
        let mut acc = self.ctx.one();
        let mut base = self.clone();
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = acc.mul(&base);
            }
            if i + 1 < bits {
                base = base.square();
            }
        }
        acc
    }

    pub fn pow_u64(&self, e: u64) -> FieldElement {
        self.pow(&BigUint::from(e))
    }

    /// Quadratic character: 0 for zero, +1 for nonzero squares, -1 otherwise.
    pub fn quadratic_character(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let e = (self.ctx.0.q.clone() - 1u32) >> 1;
        let v = self.pow(&e);
        if v.is_one() {
            1
        } else {
            debug_assert!(v.add(&self.ctx.one()).is_zero(), "character must be ±1");
            -1
        }
    }

    /// Square root by Tonelli–Shanks. Deterministic: the nonresidue used is
    /// the first one in canonical element order, and of the two roots the one
    /// with lexicographically smaller coefficient vector is returned.
    pub fn sqrt(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        match self.quadratic_character() {
            -1 => return Err(Error::NoRoot),
            1 => {}
            _ => unreachable!("nonzero element has character ±1"),
        }
        let one = BigUint::one();
        let q1 = self.ctx.0.q.clone() - &one;
        let e = q1.trailing_zeros().expect("q - 1 > 0");
        let s = &q1 >> e;

        let z = self
            .ctx
            .elements()
            .find(|c| c.quadratic_character() == -1)
            .expect("odd q has a nonresidue");

        let mut m = e;
        let mut c = z.pow(&s);
        let mut t = self.pow(&s);
        let mut r = self.pow(&((&s + &one) >> 1));
        while !t.is_one() {
            let mut i = 0u64;
            let mut probe = t.clone();
            while !probe.is_one() {
                probe = probe.square();
                i += 1;
                debug_assert!(i < m, "order must divide 2^m");
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = b.square();
            }
            m = i;
            c = b.square();
            t = t.mul(&c);
            r = r.mul(&b);
        }
        debug_assert!(r.square() == *self);
        let neg = r.neg();
        Ok(if cmp_reps(&r, &neg) == std::cmp::Ordering::Greater {
            neg
        } else {
            r
        })
    }
}

/// Lexicographic comparison of coefficient vectors (first coefficient most
/// significant), used for deterministic tie-breaks.
pub(crate) fn cmp_reps(a: &FieldElement, b: &FieldElement) -> std::cmp::Ordering {
    a.rep.iter().cmp(b.rep.iter())
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.rep == other.rep
    }
}
impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.0.k == 1 {
            write!(f, "{}", self.rep[0])
        } else {
            write!(f, "{:?} (mod p={},k={})", self.rep, self.ctx.0.p, self.ctx.0.k)
        }
    }
}

impl fmt::Display for FieldElement {
    /// Canonical index in decimal; unambiguous across extension degrees.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_index())
    }
}

// ---------------------------------------------------------------------------
// Subfield embeddings
// ---------------------------------------------------------------------------

/// The canonical embedding F_{p^m} -> F_{p^{mj}}: the basis generator of the
/// source maps to the first root of the source modulus in the target, in
/// canonical element order.
pub struct Embedding {
    src: FieldCtx,
    dst: FieldCtx,
    powers: Vec<FieldElement>,
}

impl Embedding {
    pub fn new(src: &FieldCtx, dst: &FieldCtx) -> Result<Embedding> {
        if src.p() != dst.p() {
            return Err(Error::Unsupported(
                "embedding requires equal characteristics".into(),
            ));
        }
        if dst.k() % src.k() != 0 {
            return Err(Error::Unsupported(format!(
                "F_{{p^{}}} does not embed in F_{{p^{}}}",
                src.k(),
                dst.k()
            )));
        }
        let powers = if src.k() == 1 {
            vec![dst.one()]
        } else {
            let modulus = src.modulus_coeffs().expect("k > 1 has modulus").to_vec();
            let root = dst
                .elements()
                .find(|r| {
                    // Horner evaluation of the source modulus at r.
                    let mut acc = dst.zero();
                    for &c in modulus.iter().rev() {
                        acc = acc.mul(r).add(&dst.from_u64(c));
                    }
                    acc.is_zero()
                })
                .expect("subfield modulus splits in the extension");
            let mut powers = Vec::with_capacity(src.k());
            let mut cur = dst.one();
            for _ in 0..src.k() {
                powers.push(cur.clone());
                cur = cur.mul(&root);
            }
            powers
        };
        Ok(Embedding {
            src: src.clone(),
            dst: dst.clone(),
            powers,
        })
    }

    pub fn src(&self) -> &FieldCtx {
        &self.src
    }

    pub fn dst(&self) -> &FieldCtx {
        &self.dst
    }

    pub fn apply(&self, a: &FieldElement) -> FieldElement {
        assert!(a.ctx() == &self.src, "embedding applied to foreign element");
        let mut acc = self.dst.zero();
        for (i, &c) in a.coeffs().iter().enumerate() {
            if c == 0 {
                continue;
            }
            acc = acc.add(&self.powers[i].mul(&self.dst.from_u64(c)));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_characteristic() {
        assert!(matches!(make_field(4, 1), Err(Error::NotPrime(4))));
        assert!(matches!(make_field(1, 1), Err(Error::NotPrime(1))));
        assert!(matches!(make_field(91, 1), Err(Error::NotPrime(91))));
    }

    #[test]
    fn rejects_even_characteristic() {
        assert!(matches!(make_field(2, 1), Err(Error::EvenCharacteristic)));
        assert!(matches!(make_field(2, 4), Err(Error::EvenCharacteristic)));
    }

    #[test]
    fn rejects_huge_characteristic() {
        assert!(matches!(
            make_field((1 << 61) + 1, 1),
            Err(Error::Unsupported(_)) | Err(Error::NotPrime(_))
        ));
        // 2^61 - 1 is prime and is the largest admissible characteristic.
        assert!(make_field((1 << 61) - 1, 1).is_ok());
    }

    #[test]
    fn modulus_choice_is_the_first_lexicographic_irreducible() {
        let f9 = make_field(3, 2).unwrap();
        assert_eq!(f9.modulus_coeffs().unwrap(), &[1, 0, 1]); // x^2 + 1
        let f25 = make_field(5, 2).unwrap();
        assert_eq!(f25.modulus_coeffs().unwrap(), &[1, 1, 1]); // x^2 + x + 1
        let f27 = make_field(3, 3).unwrap();
        assert_eq!(f27.modulus_coeffs().unwrap(), &[1, 0, 2, 1]); // x^3 + 2x^2 + 1
    }

    #[test]
    fn generator_square_in_f9() {
        // With modulus x^2 + 1 over F_3, the generator squares to -1 = 2.
        let f9 = make_field(3, 2).unwrap();
        let t = f9.basis_generator();
        assert_eq!(t.mul(&t), f9.from_u64(2));
    }

    #[test]
    fn inverse_exhaustive_f25() {
        let f25 = make_field(5, 2).unwrap();
        let one = f25.one();
        for a in f25.elements() {
            if a.is_zero() {
                assert!(matches!(a.inverse(), Err(Error::DivisionByZero)));
            } else {
                assert_eq!(a.mul(&a.inverse().unwrap()), one);
            }
        }
    }

    #[test]
    fn frobenius_is_identity_on_prime_subfield() {
        let f49 = make_field(7, 2).unwrap();
        for v in 0..7u64 {
            let a = f49.from_u64(v);
            assert_eq!(a.pow_u64(7), a);
        }
        // and x -> x^q is the identity on the whole field
        for a in f49.elements() {
            assert_eq!(a.pow_u64(49), a);
        }
    }

    #[test]
    fn quadratic_character_frozen_values() {
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(f5.from_u64(2).quadratic_character(), -1);
        assert_eq!(f5.from_u64(4).quadratic_character(), 1);
        assert_eq!(f5.zero().quadratic_character(), 0);
    }

    #[test]
    fn character_is_multiplicative_f13() {
        let f = make_field(13, 1).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(
                    a.mul(&b).quadratic_character(),
                    a.quadratic_character() * b.quadratic_character()
                );
            }
        }
    }

    #[test]
    fn sqrt_frozen_values() {
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(f5.from_u64(4).sqrt().unwrap(), f5.from_u64(2));
        assert!(matches!(f5.from_u64(3).sqrt(), Err(Error::NoRoot)));
        assert_eq!(f5.zero().sqrt().unwrap(), f5.zero());
    }

    #[test]
    fn sqrt_returns_lex_smaller_root() {
        for (p, k) in [(5, 1), (7, 1), (3, 2), (5, 2)] {
            let f = make_field(p, k).unwrap();
            for a in f.elements() {
                if a.quadratic_character() >= 0 {
                    let r = a.sqrt().unwrap();
                    assert_eq!(r.square(), a);
                    assert_ne!(cmp_reps(&r, &r.neg()), std::cmp::Ordering::Greater);
                }
            }
        }
    }

    #[test]
    fn arith_checks_context_and_zero_division() {
        let f5a = make_field(5, 1).unwrap();
        let f7 = make_field(7, 1).unwrap();
        let a = f5a.from_u64(2);
        let b = f7.from_u64(2);
        assert!(matches!(
            arith(&a, &b, ArithOp::Add),
            Err(Error::ContextMismatch)
        ));
        assert!(matches!(
            arith(&a, &f5a.zero(), ArithOp::Div),
            Err(Error::DivisionByZero)
        ));
        // Two independently built contexts for the same field interoperate.
        let f5b = make_field(5, 1).unwrap();
        let c = f5b.from_u64(4);
        assert_eq!(arith(&a, &c, ArithOp::Add).unwrap(), f5a.from_u64(1));
        assert_eq!(
            arith(&a, &c, ArithOp::Div).unwrap(),
            f5a.from_u64(3) // 2 * 4^{-1} = 2 * 4 = 8 = 3
        );
    }

    #[test]
    fn from_integer_wraps_signed_values() {
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(f7.from_integer(-1), f7.from_u64(6));
        assert_eq!(f7.from_integer(-16), f7.from_u64(5));
        let f9 = make_field(3, 2).unwrap();
        // index 5 = 2 + 1*3 -> coefficients (2, 1)
        assert_eq!(f9.from_integer(5).coeffs(), &[2, 1]);
        assert_eq!(f9.from_integer(-1).coeffs(), &[2, 2]);
    }

    #[test]
    fn element_enumeration_matches_canonical_index() {
        let f9 = make_field(3, 2).unwrap();
        let all: Vec<_> = f9.elements().collect();
        assert_eq!(all.len(), 9);
        for (i, a) in all.iter().enumerate() {
            assert_eq!(a.canonical_index_u64().unwrap(), i as u64);
        }
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        let f5 = make_field(5, 1).unwrap();
        let f25 = make_field(5, 2).unwrap();
        let e = Embedding::new(&f5, &f25).unwrap();
        for a in f5.elements() {
            for b in f5.elements() {
                assert_eq!(e.apply(&a.add(&b)), e.apply(&a).add(&e.apply(&b)));
                assert_eq!(e.apply(&a.mul(&b)), e.apply(&a).mul(&e.apply(&b)));
            }
        }
        assert_eq!(e.apply(&f5.one()), f25.one());
    }

    #[test]
    fn embedding_extension_to_tower() {
        let f9 = make_field(3, 2).unwrap();
        let f81 = make_field(3, 4).unwrap();
        let e = Embedding::new(&f9, &f81).unwrap();
        let t = f9.basis_generator();
        // The image of the generator still squares to the constant -1.
        let img = e.apply(&t);
        assert_eq!(img.square(), f81.from_int(-1));
        // Spot-check additivity on a sample.
        let a = f9.from_integer(5);
        let b = f9.from_integer(7);
        assert_eq!(e.apply(&a.add(&b)), e.apply(&a).add(&e.apply(&b)));
        assert_eq!(e.apply(&a.mul(&b)), e.apply(&a).mul(&e.apply(&b)));
    }

    #[test]
    fn embedding_rejects_non_divisible_degrees() {
        let f9 = make_field(3, 2).unwrap();
        let f27 = make_field(3, 3).unwrap();
        assert!(Embedding::new(&f9, &f27).is_err());
    }
}
