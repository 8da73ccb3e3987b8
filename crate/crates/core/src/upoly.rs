//! Univariate polynomials over a finite field: division, gcd chains,
//! resultants and discriminants, quotient-ring arithmetic, and an
//! irreducibility test.
//!
//! Coefficients are stored little-endian with no trailing zeros, so the zero
//! polynomial is the empty vector and `degree()` is `None` for it.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FieldElement};

#[derive(Clone, PartialEq, Eq)]
pub struct UPoly {
    ctx: FieldCtx,
    coeffs: Vec<FieldElement>,
}

impl UPoly {
    pub fn zero(ctx: &FieldCtx) -> UPoly {
        UPoly {
            ctx: ctx.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(ctx: &FieldCtx) -> UPoly {
        UPoly::constant(ctx.one())
    }

    pub fn x(ctx: &FieldCtx) -> UPoly {
        UPoly {
            ctx: ctx.clone(),
            coeffs: vec![ctx.zero(), ctx.one()],
        }
    }

    pub fn constant(c: FieldElement) -> UPoly {
        let ctx = c.ctx().clone();
        let coeffs = if c.is_zero() { Vec::new() } else { vec![c] };
        UPoly { ctx, coeffs }
    }

    /// c * x^d.
    pub fn monomial(c: FieldElement, d: usize) -> UPoly {
        let ctx = c.ctx().clone();
        if c.is_zero() {
            return UPoly::zero(&ctx);
        }
        let mut coeffs = vec![ctx.zero(); d + 1];
        coeffs[d] = c;
        UPoly { ctx, coeffs }
    }

    /// Little-endian coefficients; trailing zeros are trimmed.
    pub fn from_coeffs(ctx: &FieldCtx, coeffs: Vec<FieldElement>) -> UPoly {
        let mut p = UPoly {
            ctx: ctx.clone(),
            coeffs,
        };
        p.normalize();
        p
    }

    /// Little-endian signed-integer coefficients, reduced into the field.
    pub fn from_ints(ctx: &FieldCtx, coeffs: &[i64]) -> UPoly {
        UPoly::from_coeffs(ctx, coeffs.iter().map(|&c| ctx.from_int(c)).collect())
    }

    fn normalize(&mut self) {
        while self.coeffs.last().map_or(false, FieldElement::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Leading coefficient; None for the zero polynomial.
    pub fn lc(&self) -> Option<&FieldElement> {
        self.coeffs.last()
    }

    /// Coefficient of x^i (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = self.ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i).add(&other.coeff(i)));
        }
        UPoly::from_coeffs(&self.ctx, coeffs)
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i).sub(&other.coeff(i)));
        }
        UPoly::from_coeffs(&self.ctx, coeffs)
    }

    pub fn neg(&self) -> UPoly {
        UPoly {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(FieldElement::neg).collect(),
        }
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero(&self.ctx);
        }
        let mut coeffs = vec![self.ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        UPoly::from_coeffs(&self.ctx, coeffs)
    }

    pub fn scale(&self, c: &FieldElement) -> UPoly {
        UPoly::from_coeffs(
            &self.ctx,
            self.coeffs.iter().map(|a| a.mul(c)).collect(),
        )
    }

    /// Quotient and remainder; the divisor need not be monic.
    pub fn divmod(&self, divisor: &UPoly) -> Result<(UPoly, UPoly)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dd = divisor.degree().unwrap();
        if self.coeffs.len() < divisor.coeffs.len() {
            return Ok((UPoly::zero(&self.ctx), self.clone()));
        }
        let lcinv = divisor.lc().unwrap().inverse()?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![self.ctx.zero(); self.coeffs.len() - dd];
        let mut top = rem.len();
        while top > dd {
            let lead = rem[top - 1].clone();
            if !lead.is_zero() {
                let c = lead.mul(&lcinv);
                let shift = top - 1 - dd;
                quot[shift] = c.clone();
                for (i, di) in divisor.coeffs.iter().enumerate() {
                    rem[shift + i] = rem[shift + i].sub(&c.mul(di));
                }
            }
            top -= 1;
        }
        rem.truncate(dd);
        Ok((
            UPoly::from_coeffs(&self.ctx, quot),
            UPoly::from_coeffs(&self.ctx, rem),
        ))
    }

    pub fn rem(&self, divisor: &UPoly) -> Result<UPoly> {
        Ok(self.divmod(divisor)?.1)
    }

    /// Exact division; errors with `Internal` if the remainder is nonzero,
    /// since callers use it only where exactness is guaranteed.
    pub fn div_exact(&self, divisor: &UPoly) -> Result<UPoly> {
        let (q, r) = self.divmod(divisor)?;
        if !r.is_zero() {
            return Err(Error::Internal(
                "inexact polynomial division where exactness was guaranteed".into(),
            ));
        }
        Ok(q)
    }

    /// Monic multiple (divide by the leading coefficient); zero stays zero.
    pub fn monic(&self) -> UPoly {
        match self.lc() {
            None => self.clone(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => self.scale(&lc.inverse().expect("leading coefficient nonzero")),
        }
    }

    pub fn derivative(&self) -> UPoly {
        if self.coeffs.len() <= 1 {
            return UPoly::zero(&self.ctx);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&self.ctx.from_u64(i as u64)))
            .collect();
        UPoly::from_coeffs(&self.ctx, coeffs)
    }

    /// Compose-with-shift helper: self(x) evaluated as a polynomial in
    /// another polynomial g.
    pub fn compose(&self, g: &UPoly) -> UPoly {
        let mut acc = UPoly::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&UPoly::constant(c.clone()));
        }
        acc
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c.is_one() => write!(f, "x")?,
                1 => write!(f, "{c}*x")?,
                _ if c.is_one() => write!(f, "x^{i}")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Monic greatest common divisor. `gcd(f, 0)` is the monic multiple of `f`;
/// `gcd(0, 0)` is zero (degenerate, callers never ask).
pub fn poly_gcd(f: &UPoly, g: &UPoly) -> UPoly {
    let mut a = f.clone();
    let mut b = g.clone();
    while !b.is_zero() {
        let r = a.rem(&b).expect("nonzero divisor");
        a = b;
        b = r;
    }
    a.monic()
}

/// Extended gcd: returns (d, s, t) with d monic (or zero) and s*f + t*g = d.
pub fn poly_ext_gcd(f: &UPoly, g: &UPoly) -> (UPoly, UPoly, UPoly) {
    let ctx = f.ctx();
    let mut r0 = f.clone();
    let mut r1 = g.clone();
    let mut s0 = UPoly::one(ctx);
    let mut s1 = UPoly::zero(ctx);
    let mut t0 = UPoly::zero(ctx);
    let mut t1 = UPoly::one(ctx);
    while !r1.is_zero() {
        let (q, r) = r0.divmod(&r1).expect("nonzero divisor");
        let s2 = s0.sub(&q.mul(&s1));
        let t2 = t0.sub(&q.mul(&t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    if let Some(lc) = r0.lc() {
        if !lc.is_one() {
            let inv = lc.inverse().expect("nonzero");
            return (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv));
        }
    }
    (r0, s0, t0)
}

/// Resultant of two nonzero polynomials via the Euclidean recursion
/// Res(f, g) = lc(g)^(deg f - deg r) * (-1)^(deg f * deg g) * Res(g, r)
/// with base case Res(f, c) = c^(deg f) for constants c, and value 0 as soon
/// as a zero remainder appears (shared factor).
pub fn resultant(f: &UPoly, g: &UPoly) -> Result<FieldElement> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(res_rec(f, g))
}

fn res_rec(f: &UPoly, g: &UPoly) -> FieldElement {
    let ctx = f.ctx();
    let df = f.degree().unwrap();
    let dg = g.degree().unwrap();
    if df < dg {
        let swapped = res_rec(g, f);
        return if df % 2 == 1 && dg % 2 == 1 {
            swapped.neg()
        } else {
            swapped
        };
    }
    if dg == 0 {
        return g.lc().unwrap().pow_u64(df as u64);
    }
    let r = f.rem(g).expect("nonzero divisor");
    if r.is_zero() {
        return ctx.zero();
    }
    let dr = r.degree().unwrap();
    let mut acc = g.lc().unwrap().pow_u64((df - dr) as u64);
    if df % 2 == 1 && dg % 2 == 1 {
        acc = acc.neg();
    }
    acc.mul(&res_rec(g, &r))
}

/// Discriminant: (-1)^(d(d-1)/2) * Res(f, f') / lc(f), requiring deg f >= 2.
/// A vanishing derivative (inseparable shape) yields discriminant zero.
pub fn discriminant(f: &UPoly) -> Result<FieldElement> {
    let d = match f.degree() {
        None => {
            return Err(Error::DegreeTooSmall { got: -1, need: 2 });
        }
        Some(d) if d < 2 => {
            return Err(Error::DegreeTooSmall {
                got: d as i64,
                need: 2,
            });
        }
        Some(d) => d,
    };
    let fp = f.derivative();
    if fp.is_zero() {
        return Ok(f.ctx().zero());
    }
    let res = resultant(f, &fp)?;
    let signed = if (d * (d - 1) / 2) % 2 == 1 {
        res.neg()
    } else {
        res
    };
    Ok(signed.mul(&f.lc().unwrap().inverse()?))
}

// ---------------------------------------------------------------------------
// Quotient ring F_q[x]/(m)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct QuotientRingElem {
    modulus: Arc<UPoly>,
    value: UPoly,
}

impl QuotientRingElem {
    /// Reduce `value` modulo `modulus` (which must have degree >= 1).
    pub fn new(modulus: Arc<UPoly>, value: UPoly) -> Result<QuotientRingElem> {
        match modulus.degree() {
            None => Err(Error::ZeroPolynomial),
            Some(0) => Err(Error::DegreeTooSmall { got: 0, need: 1 }),
            Some(_) => Ok(QuotientRingElem {
                value: value.rem(&modulus)?,
                modulus,
            }),
        }
    }

    pub fn modulus(&self) -> &Arc<UPoly> {
        &self.modulus
    }

    pub fn value(&self) -> &UPoly {
        &self.value
    }

    fn wrap(&self, value: UPoly) -> QuotientRingElem {
        QuotientRingElem {
            modulus: Arc::clone(&self.modulus),
            value,
        }
    }

    pub fn add(&self, other: &QuotientRingElem) -> QuotientRingElem {
        self.wrap(self.value.add(&other.value))
    }

    pub fn sub(&self, other: &QuotientRingElem) -> QuotientRingElem {
        self.wrap(self.value.sub(&other.value))
    }

    pub fn mul(&self, other: &QuotientRingElem) -> QuotientRingElem {
        self.wrap(
            self.value
                .mul(&other.value)
                .rem(&self.modulus)
                .expect("modulus nonzero"),
        )
    }

    pub fn pow(&self, e: &BigUint) -> QuotientRingElem {
        let one = QuotientRingElem {
            modulus: Arc::clone(&self.modulus),
            value: UPoly::one(self.value.ctx())
                .rem(&self.modulus)
                .expect("modulus nonzero"),
        };
        if e.is_zero() {
            return one;
        }
        let mut acc = one;
        let mut base = self.clone();
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = acc.mul(&base);
            }
            if i + 1 < bits {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl PartialEq for QuotientRingElem {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && *self.modulus == *other.modulus
    }
}

/// x^e modulo m, the workhorse for Frobenius powers.
pub fn qring_pow_x(m: &Arc<UPoly>, e: &BigUint) -> Result<UPoly> {
    let x = UPoly::x(m.ctx());
    Ok(QuotientRingElem::new(Arc::clone(m), x)?.pow(e).value().clone())
}

/// Irreducibility over the coefficient field F_q: f of degree n is
/// irreducible iff x^(q^n) = x mod f and gcd(x^(q^(n/r)) - x, f) = 1 for
/// every prime r dividing n. Scaling does not matter; zero is rejected.
pub fn is_irreducible(f: &UPoly) -> Result<bool> {
    let n = match f.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Ok(false),
        Some(1) => return Ok(true),
        Some(n) => n,
    };
    let m = Arc::new(f.monic());
    let q = f.ctx().q().clone();
    let x = UPoly::x(f.ctx());
    // frob[j] = x^(q^j) mod f by iterated q-th powers.
    let mut cur = QuotientRingElem::new(Arc::clone(&m), x.clone())?;
    let mut frob = vec![cur.value().clone()];
    for _ in 1..=n {
        cur = cur.pow(&q);
        frob.push(cur.value().clone());
    }
    if frob[n] != x {
        return Ok(false);
    }
    let mut rest = n;
    let mut primes = Vec::new();
    let mut d = 2;
    while d * d <= rest {
        if rest % d == 0 {
            primes.push(d);
            while rest % d == 0 {
                rest /= d;
            }
        }
        d += 1;
    }
    if rest > 1 {
        primes.push(rest);
    }
    for r in primes {
        let g = frob[n / r].sub(&x);
        if poly_gcd(&g, &m).degree() != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The context's extension modulus as a polynomial over the prime subfield,
/// for cross-checking against `is_irreducible`.
pub fn modulus_as_upoly(ctx: &FieldCtx) -> Option<UPoly> {
    let raw = ctx.modulus_coeffs()?;
    let prime = crate::ff::make_field(ctx.p(), 1).expect("characteristic already validated");
    Some(UPoly::from_coeffs(
        &prime,
        raw.iter().map(|&c| prime.from_u64(c)).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;

    fn f5() -> FieldCtx {
        make_field(5, 1).unwrap()
    }

    #[test]
    fn divmod_reconstructs() {
        let ctx = f5();
        let f = UPoly::from_ints(&ctx, &[1, 2, 0, 3, 4]); // 4x^4+3x^3+2x+1
        let g = UPoly::from_ints(&ctx, &[2, 3]); // 3x+2
        let (q, r) = f.divmod(&g).unwrap();
        assert_eq!(q.mul(&g).add(&r), f);
        assert!(r.degree() < g.degree());
        assert!(matches!(
            f.divmod(&UPoly::zero(&ctx)),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn gcd_of_disjoint_quadratics_is_one() {
        // x^2+1 = (x+2)(x+3) and x^2+x = x(x+1) share no roots mod 5.
        let ctx = f5();
        let f = UPoly::from_ints(&ctx, &[1, 0, 1]);
        let g = UPoly::from_ints(&ctx, &[0, 1, 1]);
        assert_eq!(poly_gcd(&f, &g), UPoly::one(&ctx));
        // and the factorization claim itself:
        let prod = UPoly::from_ints(&ctx, &[2, 1]).mul(&UPoly::from_ints(&ctx, &[3, 1]));
        assert_eq!(prod, f);
    }

    #[test]
    fn gcd_picks_up_shared_factors() {
        let ctx = f5();
        let a = UPoly::from_ints(&ctx, &[1, 1]); // x+1
        let f = a.mul(&UPoly::from_ints(&ctx, &[2, 1]));
        let g = a.mul(&UPoly::from_ints(&ctx, &[3, 1]));
        assert_eq!(poly_gcd(&f, &g), a);
        // gcd with zero returns the monic multiple
        let h = UPoly::from_ints(&ctx, &[0, 0, 2]);
        assert_eq!(poly_gcd(&h, &UPoly::zero(&ctx)), UPoly::from_ints(&ctx, &[0, 0, 1]));
    }

    #[test]
    fn ext_gcd_bezout_identity() {
        let ctx = f5();
        let f = UPoly::from_ints(&ctx, &[1, 0, 1]);
        let g = UPoly::from_ints(&ctx, &[0, 1, 1]);
        let (d, s, t) = poly_ext_gcd(&f, &g);
        assert_eq!(s.mul(&f).add(&t.mul(&g)), d);
        assert_eq!(d, UPoly::one(&ctx));
    }

    #[test]
    fn resultant_of_linear_factors() {
        let ctx = f5();
        for a in 0..5i64 {
            for b in 0..5i64 {
                let f = UPoly::from_ints(&ctx, &[-a, 1]);
                let g = UPoly::from_ints(&ctx, &[-b, 1]);
                assert_eq!(resultant(&f, &g).unwrap(), ctx.from_int(a - b));
            }
        }
    }

    #[test]
    fn resultant_swap_sign() {
        let ctx = f5();
        let f = UPoly::from_ints(&ctx, &[-2, 1]);
        let g = UPoly::from_ints(&ctx, &[-3, 1]);
        let fg = resultant(&f, &g).unwrap();
        let gf = resultant(&g, &f).unwrap();
        assert_eq!(fg, ctx.from_int(-1));
        assert_eq!(gf, fg.neg()); // both degrees odd
    }

    #[test]
    fn resultant_frozen_cubic() {
        let ctx = f5();
        let f = UPoly::from_ints(&ctx, &[0, 1, 0, 1]); // x^3 + x
        let fp = f.derivative();
        assert_eq!(fp, UPoly::from_ints(&ctx, &[1, 0, 3]));
        assert_eq!(resultant(&f, &fp).unwrap(), ctx.from_u64(4));
    }

    #[test]
    fn resultant_zero_iff_shared_root() {
        let ctx = f5();
        let f = UPoly::from_ints(&ctx, &[-1, 1]).mul(&UPoly::from_ints(&ctx, &[-2, 1]));
        let g = UPoly::from_ints(&ctx, &[-2, 1]).mul(&UPoly::from_ints(&ctx, &[-3, 1]));
        assert!(resultant(&f, &g).unwrap().is_zero());
        assert!(matches!(
            resultant(&f, &UPoly::zero(&ctx)),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn discriminant_frozen_cubics() {
        let ctx = f5();
        // disc(x^3 + ax + b) = -4a^3 - 27b^2
        let f1 = UPoly::from_ints(&ctx, &[1, 1, 0, 1]); // x^3+x+1
        assert_eq!(discriminant(&f1).unwrap(), ctx.from_u64(4));
        let f2 = UPoly::from_ints(&ctx, &[0, 1, 0, 1]); // x^3+x
        assert_eq!(discriminant(&f2).unwrap(), ctx.from_u64(1));
        let sq = UPoly::from_ints(&ctx, &[1, 1]);
        let f3 = sq.mul(&sq).mul(&UPoly::from_ints(&ctx, &[2, 1]));
        assert!(discriminant(&f3).unwrap().is_zero());
    }

    #[test]
    fn discriminant_degree_gate() {
        let ctx = f5();
        assert!(matches!(
            discriminant(&UPoly::from_ints(&ctx, &[1, 1])),
            Err(Error::DegreeTooSmall { got: 1, need: 2 })
        ));
        assert!(matches!(
            discriminant(&UPoly::zero(&ctx)),
            Err(Error::DegreeTooSmall { got: -1, need: 2 })
        ));
    }

    #[test]
    fn discriminant_scales_with_lc() {
        // disc(c*f) = c^(2d-2) disc(f); spot check against direct formula.
        let ctx = f5();
        let f = UPoly::from_ints(&ctx, &[1, 1, 0, 1]);
        let cf = f.scale(&ctx.from_u64(2));
        let expected = discriminant(&f).unwrap().mul(&ctx.from_u64(2).pow_u64(4));
        assert_eq!(discriminant(&cf).unwrap(), expected);
    }

    #[test]
    fn quotient_ring_frozen_powers() {
        let ctx = f5();
        let m = Arc::new(UPoly::from_ints(&ctx, &[1, 0, 1]));
        let x5 = qring_pow_x(&m, &BigUint::from(5u32)).unwrap();
        assert_eq!(x5, UPoly::x(&ctx));

        let ctx3 = make_field(3, 1).unwrap();
        let m3 = Arc::new(UPoly::from_ints(&ctx3, &[1, 0, 1]));
        let x3 = qring_pow_x(&m3, &BigUint::from(3u32)).unwrap();
        assert_eq!(x3, UPoly::from_ints(&ctx3, &[0, 2]));
    }

    #[test]
    fn quotient_ring_respects_modulus_reduction() {
        let ctx = f5();
        let m = Arc::new(UPoly::from_ints(&ctx, &[1, 0, 1]));
        let a = QuotientRingElem::new(Arc::clone(&m), UPoly::from_ints(&ctx, &[0, 0, 1])).unwrap();
        assert_eq!(a.value(), &UPoly::from_ints(&ctx, &[-1])); // x^2 = -1
        let b = QuotientRingElem::new(Arc::clone(&m), UPoly::x(&ctx)).unwrap();
        assert_eq!(b.mul(&b).value(), &UPoly::from_ints(&ctx, &[4]));
    }

    #[test]
    fn irreducibility_small_cases() {
        let ctx3 = make_field(3, 1).unwrap();
        assert!(is_irreducible(&UPoly::from_ints(&ctx3, &[1, 0, 1])).unwrap()); // x^2+1 over F_3
        assert!(is_irreducible(&UPoly::from_ints(&ctx3, &[1, 0, 2, 1])).unwrap()); // x^3+2x^2+1
        let ctx = f5();
        assert!(!is_irreducible(&UPoly::from_ints(&ctx, &[1, 0, 1])).unwrap()); // splits mod 5
        assert!(!is_irreducible(&UPoly::from_ints(&ctx, &[0, 1, 1])).unwrap());
        assert!(is_irreducible(&UPoly::from_ints(&ctx, &[2, 1])).unwrap());
        assert!(!is_irreducible(&UPoly::from_ints(&ctx, &[3])).unwrap());
        assert!(matches!(
            is_irreducible(&UPoly::zero(&ctx)),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn context_moduli_pass_the_public_irreducibility_test() {
        for (p, k) in [(3, 2), (5, 2), (3, 3), (7, 2)] {
            let ctx = make_field(p, k).unwrap();
            let m = modulus_as_upoly(&ctx).unwrap();
            assert_eq!(m.degree(), Some(k));
            assert!(is_irreducible(&m).unwrap());
        }
    }

    #[test]
    fn compose_expands_shifts() {
        let ctx = f5();
        let f = UPoly::from_ints(&ctx, &[0, 0, 1]); // x^2
        let g = UPoly::from_ints(&ctx, &[1, 1]); // x+1
        assert_eq!(f.compose(&g), UPoly::from_ints(&ctx, &[1, 2, 1]));
    }
}
