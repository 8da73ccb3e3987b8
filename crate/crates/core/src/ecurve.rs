//! Short Weierstrass curves y^2 = x^3 + Ax + B over F_q, char >= 5:
//! complete projective addition through a fixed family of biquadratic
//! charts, naive counting, division polynomials, and the modular-trace
//! point-counting algorithm (polynomial time in log q).
//!
//! The addition charts are degree-(2,2) forms in the coordinates of the two
//! input points. Each chart computes P1 + P2 wherever it does not vanish,
//! and its vanishing locus is exact and known:
//!
//! * `generic`  — vanishes iff P1 = P2;
//! * `doubling` — vanishes iff P1 - P2 has exact order 2;
//! * `identity-adapted` (the difference of the other two) — vanishes iff
//!   P1 - P2 is an affine point with y-coordinate 1.
//!
//! The three loci are pairwise disjoint, so on every input at least two
//! charts are nonzero, they agree projectively, and evaluation in the fixed
//! order above is total. This coverage claim is enforced exhaustively by the
//! test suite over several small prime fields.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ff::{is_prime, FieldCtx, FieldElement};
use crate::upoly::{poly_ext_gcd, poly_gcd, qring_pow_x, QuotientRingElem, UPoly};

// ---------------------------------------------------------------------------
// Static chart tables.
//
// Quadratic monomial basis, for either input point: XX=0, XY=1, XZ=2, YY=3,
// YZ=4, ZZ=5. A chart row is (monomial of P1, monomial of P2, coefficient),
// the coefficient being an integer polynomial in the curve parameters (A, B)
// encoded as (A-exponent, B-exponent, integer) terms.
// ---------------------------------------------------------------------------

type CoeffTerm = (u8, u8, i64);
type ChartRow = (usize, usize, &'static [CoeffTerm]);

const GENERIC_X: &[ChartRow] = &[
    (0, 5, &[(1, 0, 1)]),
    (1, 4, &[(0, 0, -2)]),
    (2, 3, &[(0, 0, -1)]),
    (2, 5, &[(0, 1, 3)]),
    (3, 2, &[(0, 0, 1)]),
    (4, 1, &[(0, 0, 2)]),
    (5, 0, &[(1, 0, -1)]),
    (5, 2, &[(0, 1, -3)]),
];

const GENERIC_Y: &[ChartRow] = &[
    (0, 1, &[(0, 0, 3)]),
    (1, 0, &[(0, 0, -3)]),
    (1, 5, &[(1, 0, -1)]),
    (2, 4, &[(1, 0, 2)]),
    (3, 4, &[(0, 0, 1)]),
    (4, 2, &[(1, 0, -2)]),
    (4, 3, &[(0, 0, -1)]),
    (4, 5, &[(0, 1, -3)]),
    (5, 1, &[(1, 0, 1)]),
    (5, 4, &[(0, 1, 3)]),
];

const GENERIC_Z: &[ChartRow] = &[
    (0, 2, &[(0, 0, -3)]),
    (2, 0, &[(0, 0, 3)]),
    (2, 5, &[(1, 0, -1)]),
    (3, 5, &[(0, 0, 1)]),
    (5, 2, &[(1, 0, 1)]),
    (5, 3, &[(0, 0, -1)]),
];

const DOUBLING_X: &[ChartRow] = &[
    (0, 4, &[(1, 0, 1)]),
    (1, 2, &[(1, 0, 2)]),
    (1, 3, &[(0, 0, -1)]),
    (1, 5, &[(0, 1, 3)]),
    (2, 1, &[(1, 0, 2)]),
    (2, 4, &[(0, 1, 6)]),
    (3, 1, &[(0, 0, -1)]),
    (4, 0, &[(1, 0, 1)]),
    (4, 2, &[(0, 1, 6)]),
    (4, 5, &[(2, 0, -1)]),
    (5, 1, &[(0, 1, 3)]),
    (5, 4, &[(2, 0, -1)]),
];

const DOUBLING_Y: &[ChartRow] = &[
    (0, 0, &[(1, 0, -3)]),
    (0, 2, &[(0, 1, -9)]),
    (0, 5, &[(2, 0, 1)]),
    (2, 0, &[(0, 1, -9)]),
    (2, 2, &[(2, 0, 4)]),
    (2, 5, &[(1, 1, 3)]),
    (3, 3, &[(0, 0, -1)]),
    (5, 0, &[(2, 0, 1)]),
    (5, 2, &[(1, 1, 3)]),
    (5, 5, &[(0, 2, 9), (3, 0, 1)]),
];

const DOUBLING_Z: &[ChartRow] = &[
    (0, 1, &[(0, 0, -3)]),
    (1, 0, &[(0, 0, -3)]),
    (1, 5, &[(1, 0, -1)]),
    (2, 4, &[(1, 0, -2)]),
    (3, 4, &[(0, 0, -1)]),
    (4, 2, &[(1, 0, -2)]),
    (4, 3, &[(0, 0, -1)]),
    (4, 5, &[(0, 1, -3)]),
    (5, 1, &[(1, 0, -1)]),
    (5, 4, &[(0, 1, -3)]),
];

/// One projective addition law: three biquadratic forms with coefficients
/// already specialized to a particular curve.
#[derive(Clone, Debug)]
pub struct AdditionChart {
    pub name: &'static str,
    /// Sparse rows per output coordinate: (monomial index of P1, monomial
    /// index of P2, coefficient).
    rows: [Vec<(usize, usize, FieldElement)>; 3],
}

fn eval_coeff(terms: &[CoeffTerm], a: &FieldElement, b: &FieldElement) -> FieldElement {
    let ctx = a.ctx();
    let mut acc = ctx.zero();
    for &(ea, eb, c) in terms {
        let mut t = ctx.from_int(c);
        if ea > 0 {
            t = t.mul(&a.pow_u64(ea as u64));
        }
        if eb > 0 {
            t = t.mul(&b.pow_u64(eb as u64));
        }
        acc = acc.add(&t);
    }
    acc
}

fn specialize_rows(
    table: &[ChartRow],
    a: &FieldElement,
    b: &FieldElement,
) -> Vec<(usize, usize, FieldElement)> {
    table
        .iter()
        .filter_map(|&(i, j, terms)| {
            let c = eval_coeff(terms, a, b);
            if c.is_zero() {
                None
            } else {
                Some((i, j, c))
            }
        })
        .collect()
}

/// Row difference left - right, combining shared (i, j) slots and dropping
/// zeros, so the third chart is derived from the other two rather than
/// transcribed separately.
fn rows_sub(
    left: &[(usize, usize, FieldElement)],
    right: &[(usize, usize, FieldElement)],
    ctx: &FieldCtx,
) -> Vec<(usize, usize, FieldElement)> {
    let mut dense: Vec<Option<FieldElement>> = vec![None; 36];
    for (i, j, c) in left {
        dense[i * 6 + j] = Some(match dense[i * 6 + j].take() {
            Some(prev) => prev.add(c),
            None => c.clone(),
        });
    }
    for (i, j, c) in right {
        let cur = dense[i * 6 + j].take().unwrap_or_else(|| ctx.zero());
        dense[i * 6 + j] = Some(cur.sub(c));
    }
    dense
        .into_iter()
        .enumerate()
        .filter_map(|(idx, c)| {
            let c = c?;
            if c.is_zero() {
                None
            } else {
                Some((idx / 6, idx % 6, c))
            }
        })
        .collect()
}

impl AdditionChart {
    /// Evaluate the three forms at a pair of projective points.
    pub fn eval(
        &self,
        p1: &ProjPoint,
        p2: &ProjPoint,
    ) -> (FieldElement, FieldElement, FieldElement) {
        let m1 = p1.quad_monomials();
        let m2 = p2.quad_monomials();
        let ctx = p1.x.ctx();
        let mut out = [ctx.zero(), ctx.zero(), ctx.zero()];
        for (slot, rows) in out.iter_mut().zip(self.rows.iter()) {
            for (i, j, c) in rows {
                let term = m1[*i].mul(&m2[*j]);
                if !term.is_zero() {
                    *slot = slot.add(&c.mul(&term));
                }
            }
        }
        let [x, y, z] = out;
        (x, y, z)
    }
}

// ---------------------------------------------------------------------------
// Points and curves
// ---------------------------------------------------------------------------

/// A projective point in canonical form: either z = 1, or the identity
/// (0 : 1 : 0). Constructed only through curve methods, so it always
/// satisfies the curve equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjPoint {
    x: FieldElement,
    y: FieldElement,
    z: FieldElement,
}

impl ProjPoint {
    pub fn x(&self) -> &FieldElement {
        &self.x
    }

    pub fn y(&self) -> &FieldElement {
        &self.y
    }

    pub fn z(&self) -> &FieldElement {
        &self.z
    }

    pub fn is_identity(&self) -> bool {
        self.z.is_zero()
    }

    /// (x, y) for affine points, None for the identity.
    pub fn affine(&self) -> Option<(FieldElement, FieldElement)> {
        if self.is_identity() {
            None
        } else {
            Some((self.x.clone(), self.y.clone()))
        }
    }

    /// The six quadratic monomials x^2, xy, xz, y^2, yz, z^2 in table order.
    fn quad_monomials(&self) -> [FieldElement; 6] {
        [
            self.x.square(),
            self.x.mul(&self.y),
            self.x.mul(&self.z),
            self.y.square(),
            self.y.mul(&self.z),
            self.z.square(),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct EllipticCurve {
    ctx: FieldCtx,
    a: FieldElement,
    b: FieldElement,
    disc: FieldElement,
    charts: Arc<[AdditionChart; 3]>,
}

impl EllipticCurve {
    /// Build y^2 = x^3 + Ax + B. Requires characteristic >= 5 and a nonzero
    /// discriminant -16(4A^3 + 27B^2).
    pub fn new(a: FieldElement, b: FieldElement) -> Result<EllipticCurve> {
        let ctx = a.ctx().clone();
        if *b.ctx() != ctx {
            return Err(Error::ContextMismatch);
        }
        if ctx.p() < 5 {
            return Err(Error::Unsupported(format!(
                "short Weierstrass arithmetic requires characteristic >= 5, got {}",
                ctx.p()
            )));
        }
        let disc = weierstrass_discriminant(&a, &b);
        if disc.is_zero() {
            return Err(Error::InvariantViolation(
                "curve is singular: 4A^3 + 27B^2 = 0".into(),
            ));
        }
        let generic = AdditionChart {
            name: "generic",
            rows: [
                specialize_rows(GENERIC_X, &a, &b),
                specialize_rows(GENERIC_Y, &a, &b),
                specialize_rows(GENERIC_Z, &a, &b),
            ],
        };
        let doubling = AdditionChart {
            name: "doubling",
            rows: [
                specialize_rows(DOUBLING_X, &a, &b),
                specialize_rows(DOUBLING_Y, &a, &b),
                specialize_rows(DOUBLING_Z, &a, &b),
            ],
        };
        let identity_adapted = AdditionChart {
            name: "identity-adapted",
            rows: [
                rows_sub(&doubling.rows[0], &generic.rows[0], &ctx),
                rows_sub(&doubling.rows[1], &generic.rows[1], &ctx),
                rows_sub(&doubling.rows[2], &generic.rows[2], &ctx),
            ],
        };
        let charts = Arc::new([generic, doubling, identity_adapted]);
        Ok(EllipticCurve {
            ctx,
            a,
            b,
            disc,
            charts,
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn a(&self) -> &FieldElement {
        &self.a
    }

    pub fn b(&self) -> &FieldElement {
        &self.b
    }

    pub fn discriminant(&self) -> &FieldElement {
        &self.disc
    }

    /// The three addition charts in evaluation order.
    pub fn charts(&self) -> &[AdditionChart; 3] {
        &self.charts
    }

    pub fn identity(&self) -> ProjPoint {
        ProjPoint {
            x: self.ctx.zero(),
            y: self.ctx.one(),
            z: self.ctx.zero(),
        }
    }

    /// Affine point constructor; rejects coordinates off the curve.
    pub fn point(&self, x: FieldElement, y: FieldElement) -> Result<ProjPoint> {
        if x.ctx() != &self.ctx || y.ctx() != &self.ctx {
            return Err(Error::ContextMismatch);
        }
        let rhs = self.rhs(&x);
        if y.square() != rhs {
            return Err(Error::InvariantViolation(format!(
                "({x}, {y}) does not satisfy the curve equation"
            )));
        }
        Ok(ProjPoint {
            x,
            y,
            z: self.ctx.one(),
        })
    }

    /// x^3 + Ax + B.
    pub fn rhs(&self, x: &FieldElement) -> FieldElement {
        x.square().add(&self.a).mul(x).add(&self.b)
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        p.is_identity() || p.y.square() == self.rhs(&p.x)
    }

    pub fn neg(&self, p: &ProjPoint) -> ProjPoint {
        if p.is_identity() {
            p.clone()
        } else {
            ProjPoint {
                x: p.x.clone(),
                y: p.y.neg(),
                z: p.z.clone(),
            }
        }
    }

    fn normalize(&self, x: FieldElement, y: FieldElement, z: FieldElement) -> ProjPoint {
        if z.is_zero() {
            debug_assert!(x.is_zero() && !y.is_zero(), "chart output off the curve");
            self.identity()
        } else {
            let zi = z.inverse().expect("nonzero");
            ProjPoint {
                x: x.mul(&zi),
                y: y.mul(&zi),
                z: self.ctx.one(),
            }
        }
    }

    /// Complete addition: evaluate the charts in their fixed order and take
    /// the first with a nonzero value. The chart coverage property makes the
    /// `NoChartApplies` branch unreachable on curve points; it is kept as a
    /// loud failure rather than an assert so callers can surface it.
    pub fn add(&self, p1: &ProjPoint, p2: &ProjPoint) -> Result<ProjPoint> {
        debug_assert!(self.contains(p1) && self.contains(p2));
        for chart in self.charts.iter() {
            let (x, y, z) = chart.eval(p1, p2);
            if !(x.is_zero() && y.is_zero() && z.is_zero()) {
                return Ok(self.normalize(x, y, z));
            }
        }
        Err(Error::NoChartApplies)
    }

    /// [n]P by double-and-add; negative n negates the point first.
    pub fn scalar_mul(&self, n: i128, p: &ProjPoint) -> Result<ProjPoint> {
        let (mut e, base) = if n < 0 {
            (n.unsigned_abs(), self.neg(p))
        } else {
            (n as u128, p.clone())
        };
        let mut acc = self.identity();
        let mut pow = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(&acc, &pow)?;
            }
            e >>= 1;
            if e > 0 {
                pow = self.add(&pow, &pow)?;
            }
        }
        Ok(acc)
    }

    /// #E(F_q) by direct enumeration: 1 + sum over x of (1 + chi(x^3+Ax+B)).
    pub fn count_naive(&self, cap: u64) -> Result<u64> {
        let q = self.ctx.q_u64().ok_or(Error::CapExceeded {
            needed: u64::MAX,
            cap,
        })?;
        if q > cap {
            return Err(Error::CapExceeded { needed: q, cap });
        }
        let mut n = 1u64; // the identity
        for x in self.ctx.elements() {
            n += (1 + self.rhs(&x).quadratic_character()) as u64;
        }
        Ok(n)
    }

    /// All rational points (identity first, then affine points in field
    /// order), for exhaustive tests.
    pub fn points_naive(&self, cap: u64) -> Result<Vec<ProjPoint>> {
        let q = self.ctx.q_u64().ok_or(Error::CapExceeded {
            needed: u64::MAX,
            cap,
        })?;
        if q > cap {
            return Err(Error::CapExceeded { needed: q, cap });
        }
        let mut pts = vec![self.identity()];
        for x in self.ctx.elements() {
            let rhs = self.rhs(&x);
            if rhs.is_zero() {
                pts.push(ProjPoint {
                    x,
                    y: self.ctx.zero(),
                    z: self.ctx.one(),
                });
            } else if rhs.quadratic_character() == 1 {
                let y = rhs.sqrt().expect("residue has a root");
                pts.push(ProjPoint {
                    x: x.clone(),
                    y: y.neg(),
                    z: self.ctx.one(),
                });
                pts.push(ProjPoint {
                    x,
                    y,
                    z: self.ctx.one(),
                });
            }
        }
        Ok(pts)
    }

    /// Division polynomials: entry i is the x-part of psi_i, for i in
    /// 0..=n_max. Odd-index entries are the full psi_i; even-index entries
    /// carry an implicit factor y.
    pub fn division_polynomials(&self, n_max: usize) -> Vec<UPoly> {
        let ctx = &self.ctx;
        let a = &self.a;
        let b = &self.b;
        let f = UPoly::from_coeffs(
            ctx,
            vec![b.clone(), a.clone(), ctx.zero(), ctx.one()],
        );
        let f2 = f.mul(&f);
        let half = ctx.from_u64(2).inverse().expect("char > 2");

        let mut psi: Vec<UPoly> = Vec::with_capacity(n_max + 1);
        psi.push(UPoly::zero(ctx)); // psi_0
        if n_max >= 1 {
            psi.push(UPoly::one(ctx));
        }
        if n_max >= 2 {
            psi.push(UPoly::constant(ctx.from_u64(2)));
        }
        if n_max >= 3 {
            // 3x^4 + 6Ax^2 + 12Bx - A^2
            let a2 = a.square();
            psi.push(UPoly::from_coeffs(
                ctx,
                vec![
                    a2.neg(),
                    b.mul(&ctx.from_u64(12)),
                    a.mul(&ctx.from_u64(6)),
                    ctx.zero(),
                    ctx.from_u64(3),
                ],
            ));
        }
        if n_max >= 4 {
            // 4(x^6 + 5Ax^4 + 20Bx^3 - 5A^2x^2 - 4ABx - 8B^2 - A^3)
            let a2 = a.square();
            let four = ctx.from_u64(4);
            let inner = UPoly::from_coeffs(
                ctx,
                vec![
                    b.square().mul(&ctx.from_u64(8)).add(&a2.mul(a)).neg(),
                    a.mul(b).mul(&four).neg(),
                    a2.mul(&ctx.from_u64(5)).neg(),
                    b.mul(&ctx.from_u64(20)),
                    a.mul(&ctx.from_u64(5)),
                    ctx.zero(),
                    ctx.one(),
                ],
            );
            psi.push(inner.scale(&four));
        }
        for n in 5..=n_max {
            let m = n / 2;
            let next = if n % 2 == 0 {
                // psi_2m = psi_m (psi_{m+2} psi_{m-1}^2 - psi_{m-2} psi_{m+1}^2) / 2
                let t1 = psi[m + 2].mul(&psi[m - 1].mul(&psi[m - 1]));
                let t2 = psi[m - 2].mul(&psi[m + 1].mul(&psi[m + 1]));
                psi[m].mul(&t1.sub(&t2)).scale(&half)
            } else {
                // psi_{2m+1}: the implicit y factors of the even-index
                // entries contribute f^2 on one side depending on parity.
                let m3 = psi[m].mul(&psi[m]).mul(&psi[m]);
                let p3 = psi[m + 1].mul(&psi[m + 1]).mul(&psi[m + 1]);
                if m % 2 == 0 {
                    f2.mul(&psi[m + 2]).mul(&m3).sub(&psi[m - 1].mul(&p3))
                } else {
                    psi[m + 2].mul(&m3).sub(&f2.mul(&psi[m - 1]).mul(&p3))
                }
            };
            psi.push(next);
        }
        psi.truncate(n_max + 1);
        psi
    }

    /// Frobenius trace modulo an odd prime ell different from the
    /// characteristic, via the action on the ell-torsion subscheme.
    pub fn trace_mod_ell(&self, ell: u64) -> Result<u64> {
        if ell < 3 || ell % 2 == 0 || !is_prime(ell) {
            return Err(Error::Unsupported(format!(
                "trace residue requires an odd prime modulus, got {ell}"
            )));
        }
        if ell == self.ctx.p() {
            return Err(Error::Unsupported(
                "trace modulus must differ from the characteristic".into(),
            ));
        }
        let f = UPoly::from_coeffs(
            &self.ctx,
            vec![
                self.b.clone(),
                self.a.clone(),
                self.ctx.zero(),
                self.ctx.one(),
            ],
        );
        let psi = self.division_polynomials(ell as usize);
        let mut h = psi[ell as usize].monic();
        debug_assert!(poly_gcd(&h, &f).is_one(), "torsion ideal meets y = 0");

        let q = self.ctx.q().clone();
        let q_mod_ell = (&q % ell).to_u64().expect("residue fits");
        debug_assert!(q_mod_ell != 0);

        'restart: loop {
            if h.degree().map_or(true, |d| d == 0) {
                return Err(Error::Internal(
                    "torsion modulus collapsed to a constant".into(),
                ));
            }
            let hm = Arc::new(h.clone());
            // Frobenius and its square as (x-part, y-cofactor) pairs:
            // (x^q, f^((q-1)/2) y) and the same with q^2.
            let frob = Endo::Affine {
                u: qring_pow_x(&hm, &q)?,
                v: poly_pow_mod(&f, &((&q - 1u32) >> 1), &hm)?,
            };
            let q2 = &q * &q;
            let frob2 = Endo::Affine {
                u: qring_pow_x(&hm, &q2)?,
                v: poly_pow_mod(&f, &((&q2 - 1u32) >> 1), &hm)?,
            };
            let base = Endo::Affine {
                u: UPoly::x(&self.ctx).rem(&h)?,
                v: UPoly::one(&self.ctx),
            };
            macro_rules! step {
                ($e:expr) => {
                    match $e {
                        Ok(v) => v,
                        Err(EndoFail::Factor(g)) => {
                            h = g;
                            continue 'restart;
                        }
                        Err(EndoFail::Inconsistent(msg)) => {
                            return Err(Error::Internal(msg));
                        }
                    }
                };
            }
            // [q mod ell] (x, y)
            let mut q_pt = Endo::Identity;
            {
                let mut e = q_mod_ell;
                let mut pow = base.clone();
                while e > 0 {
                    if e & 1 == 1 {
                        q_pt = step!(endo_add(&q_pt, &pow, &h, &f, &self.a));
                    }
                    e >>= 1;
                    if e > 0 {
                        pow = step!(endo_add(&pow, &pow, &h, &f, &self.a));
                    }
                }
            }
            let rhs = step!(endo_add(&frob2, &q_pt, &h, &f, &self.a));
            if rhs == Endo::Identity {
                return Ok(0);
            }
            let mut acc = frob.clone();
            for tau in 1..ell {
                if acc == rhs {
                    return Ok(tau);
                }
                acc = step!(endo_add(&acc, &frob, &h, &f, &self.a));
            }
            return Err(Error::Internal(
                "trace scan exhausted all residues".into(),
            ));
        }
    }

    /// Parity of the trace: t is even iff the 2-torsion is rationally
    /// visible, i.e. x^3 + Ax + B has a root in F_q.
    fn trace_parity(&self) -> Result<u64> {
        let f = UPoly::from_coeffs(
            &self.ctx,
            vec![
                self.b.clone(),
                self.a.clone(),
                self.ctx.zero(),
                self.ctx.one(),
            ],
        );
        let fm = Arc::new(f.clone());
        let xq = qring_pow_x(&fm, self.ctx.q())?;
        let g = poly_gcd(&xq.sub(&UPoly::x(&self.ctx)), &f);
        Ok(if g.degree() == Some(0) { 1 } else { 0 })
    }

    /// Full trace of Frobenius: accumulate residues modulo small primes
    /// until the modulus M exceeds 4*sqrt(q), then recover t by CRT centered
    /// into the Hasse interval. Before each new odd prime, if adding just
    /// the parity bit already suffices (2M > 4*sqrt(q)), the cheap parity
    /// computation is used instead. Residues are reported sorted by modulus.
    pub fn schoof_trace(&self) -> Result<SchoofTrace> {
        let q = self.ctx.q().clone();
        let sixteen_q = &q * 16u32;
        let mut m = BigUint::one();
        let mut residues: Vec<(u64, u64)> = Vec::new();
        let mut ell = 3u64;
        while &m * &m <= sixteen_q {
            let doubled = &m * 2u32;
            if &doubled * &doubled > sixteen_q {
                residues.push((2, self.trace_parity()?));
                m = doubled;
                break;
            }
            while !is_prime(ell) || ell == self.ctx.p() {
                ell += 2;
            }
            residues.push((ell, self.trace_mod_ell(ell)?));
            m *= ell;
            ell += 2;
        }
        // CRT over the accumulated residues.
        let mut t = BigInt::zero();
        let mut modulus = BigInt::one();
        for &(l, r) in &residues {
            let l_big = BigInt::from(l);
            let r_big = BigInt::from(r);
            if modulus.is_one() {
                t = r_big;
                modulus = l_big;
                continue;
            }
            let gcd = modulus.extended_gcd(&l_big);
            debug_assert!(gcd.gcd.is_one());
            // x = t + modulus * k with x = r (mod l):
            // k = (r - t) * modulus^{-1} (mod l)
            let inv = gcd.x.mod_floor(&l_big);
            let k = ((&r_big - &t) * inv).mod_floor(&l_big);
            t += &modulus * k;
            modulus *= &l_big;
            t = t.mod_floor(&modulus);
        }
        // Center into (-M/2, M/2]; uniqueness in the Hasse interval follows
        // from M > 4*sqrt(q).
        let m_big = BigInt::from(m.clone());
        if &t * 2 > m_big {
            t -= BigInt::from(m);
        }
        let q_big = BigInt::from(q.clone());
        if &t * &t > &q_big * 4 {
            return Err(Error::Internal(format!(
                "recovered trace {t} violates the Hasse bound"
            )));
        }
        residues.sort_unstable();
        Ok(SchoofTrace { t, residues, q })
    }
}

/// -16(4A^3 + 27B^2), exposed for gate reporting.
pub fn weierstrass_discriminant(a: &FieldElement, b: &FieldElement) -> FieldElement {
    let ctx = a.ctx();
    let four_a3 = a.square().mul(a).mul(&ctx.from_u64(4));
    let t27_b2 = b.square().mul(&ctx.from_u64(27));
    four_a3.add(&t27_b2).mul(&ctx.from_int(-16))
}

/// Result of the modular-trace computation.
#[derive(Clone, Debug)]
pub struct SchoofTrace {
    /// Frobenius trace, |t| <= 2*sqrt(q).
    pub t: BigInt,
    /// (modulus, t mod modulus) pairs actually used, sorted by modulus.
    pub residues: Vec<(u64, u64)>,
    pub q: BigUint,
}

impl SchoofTrace {
    /// #E(F_q) = q + 1 - t.
    pub fn n1(&self) -> BigUint {
        (BigInt::from(self.q.clone()) + BigInt::one() - &self.t)
            .to_biguint()
            .expect("Hasse bound keeps the count positive")
    }

    /// The genus-1 zeta numerator 1 - tT + qT^2.
    pub fn zeta(&self) -> crate::zeta::ZetaNumerator {
        crate::zeta::ZetaNumerator::from_frobenius_trace(&self.t, &self.q)
    }
}

// ---------------------------------------------------------------------------
// Torsion-scheme point arithmetic for the trace computation: points are
// (u(x), v(x) y) with u, v reduced modulo the current torsion modulus h.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Endo {
    Identity,
    Affine { u: UPoly, v: UPoly },
}

enum EndoFail {
    /// A proper factor of the torsion modulus surfaced; the caller restarts
    /// with it. Degree strictly decreases, so restarts terminate.
    Factor(UPoly),
    Inconsistent(String),
}

fn poly_pow_mod(base: &UPoly, e: &BigUint, m: &Arc<UPoly>) -> Result<UPoly> {
    Ok(QuotientRingElem::new(Arc::clone(m), base.clone())?
        .pow(e)
        .value()
        .clone())
}

/// Either gcd(d, h) = 1 and the inverse of d mod h is returned, or the
/// (proper) gcd is handed back for a restart.
fn invert_mod(d: &UPoly, h: &UPoly) -> std::result::Result<UPoly, EndoFail> {
    let (g, s, _) = poly_ext_gcd(d, h);
    if g.is_one() {
        return Ok(s.rem(h).expect("modulus nonzero"));
    }
    if g.degree() == h.degree() {
        return Err(EndoFail::Inconsistent(
            "vanishing quantity reached the inversion path".into(),
        ));
    }
    Err(EndoFail::Factor(g))
}

fn endo_add(
    p1: &Endo,
    p2: &Endo,
    h: &UPoly,
    f: &UPoly,
    a: &FieldElement,
) -> std::result::Result<Endo, EndoFail> {
    let (u1, v1, u2, v2) = match (p1, p2) {
        (Endo::Identity, _) => return Ok(p2.clone()),
        (_, Endo::Identity) => return Ok(p1.clone()),
        (Endo::Affine { u: u1, v: v1 }, Endo::Affine { u: u2, v: v2 }) => (u1, v1, u2, v2),
    };
    let ctx = h.ctx();
    let rem = |p: UPoly| p.rem(h).expect("modulus nonzero");

    if u1 == u2 {
        let vsum = rem(v1.add(v2));
        if v1 == v2 {
            if v1.is_zero() {
                // Doubling a point with y = 0.
                return Ok(Endo::Identity);
            }
            // Tangent slope as a y-multiple: w y with
            // w = (3u^2 + A) / (2 v f).
            let num = rem(u1
                .mul(u1)
                .scale(&ctx.from_u64(3))
                .add(&UPoly::constant(a.clone())));
            let den = rem(v1.scale(&ctx.from_u64(2)).mul(f));
            let w = rem(num.mul(&invert_mod(&den, h)?));
            let x3 = rem(w.mul(&w).mul(f).sub(&u1.scale(&ctx.from_u64(2))));
            let v3 = rem(w.mul(&u1.sub(&x3)).sub(v1));
            return Ok(Endo::Affine { u: x3, v: v3 });
        }
        if vsum.is_zero() {
            return Ok(Endo::Identity);
        }
        // Same x-part but y-cofactors neither equal nor opposite: the
        // components of the torsion scheme disagree; their separating gcd
        // is a proper factor.
        let g = poly_gcd(&v1.sub(v2), h);
        if g.degree() == Some(0) || g.degree() == h.degree() {
            return Err(EndoFail::Inconsistent(
                "mixed-component sum produced no proper factor".into(),
            ));
        }
        return Err(EndoFail::Factor(g));
    }

    // Chord: w = (v1 - v2) / (u1 - u2), slope is w y.
    let d = rem(u1.sub(u2));
    let w = rem(v1.sub(v2).mul(&invert_mod(&d, h)?));
    let x3 = rem(w.mul(&w).mul(f).sub(u1).sub(u2));
    let v3 = rem(w.mul(&u1.sub(&x3)).sub(v1));
    Ok(Endo::Affine { u: x3, v: v3 })
}
