//! Randomized algebraic invariants of univariate polynomial arithmetic:
//! division, Bézout identities, resultants, and discriminants.

use proptest::prelude::*;
use zetafam::ff::{make_field, FieldCtx};
use zetafam::upoly::{discriminant, poly_ext_gcd, poly_gcd, resultant, UPoly};

fn poly_over(ctx: &FieldCtx, max_len: usize) -> impl Strategy<Value = UPoly> {
    let ctx = ctx.clone();
    prop::collection::vec(0..ctx.p(), 0..=max_len).prop_map(move |cs| {
        let coeffs = cs.iter().map(|&c| ctx.from_u64(c)).collect();
        UPoly::from_coeffs(&ctx, coeffs)
    })
}

/// A polynomial with degree drawn from `min_deg..=max_deg` (the leading
/// coefficient is forced nonzero, so no sample is rejected).
fn poly_of_degree(ctx: &FieldCtx, min_deg: usize, max_deg: usize) -> impl Strategy<Value = UPoly> {
    let ctx = ctx.clone();
    (
        min_deg..=max_deg,
        prop::collection::vec(0..ctx.p(), max_deg),
        1..ctx.p(),
    )
        .prop_map(move |(d, lows, lc)| {
            let mut coeffs: Vec<_> = lows[..d].iter().map(|&c| ctx.from_u64(c)).collect();
            coeffs.push(ctx.from_u64(lc));
            UPoly::from_coeffs(&ctx, coeffs)
        })
}

fn f7() -> FieldCtx {
    make_field(7, 1).unwrap()
}

fn f9() -> FieldCtx {
    make_field(3, 2).unwrap()
}

proptest! {
    #[test]
    fn divmod_reconstructs_the_dividend(
        f in poly_over(&f7(), 9),
        d in poly_over(&f7(), 5),
    ) {
        prop_assume!(!d.is_zero());
        let (q, r) = f.divmod(&d).expect("nonzero divisor");
        prop_assert_eq!(q.mul(&d).add(&r), f);
        if let Some(rd) = r.degree() {
            prop_assert!(rd < d.degree().unwrap());
        }
    }

    #[test]
    fn extended_gcd_satisfies_bezout(
        f in poly_over(&f7(), 7),
        g in poly_over(&f7(), 7),
    ) {
        let (d, s, t) = poly_ext_gcd(&f, &g);
        prop_assert_eq!(s.mul(&f).add(&t.mul(&g)), d.clone());
        prop_assert_eq!(poly_gcd(&f, &g), d.clone());
        if !d.is_zero() {
            prop_assert!(d.lc().unwrap().is_one());
            prop_assert!(f.rem(&d).unwrap().is_zero());
            prop_assert!(g.rem(&d).unwrap().is_zero());
        } else {
            prop_assert!(f.is_zero() && g.is_zero());
        }
    }

    #[test]
    fn gcd_scales_with_common_factors(
        f in poly_over(&f7(), 4),
        g in poly_over(&f7(), 4),
        h in poly_over(&f7(), 3),
    ) {
        prop_assume!(!f.is_zero() && !g.is_zero() && !h.is_zero());
        let lhs = poly_gcd(&f.mul(&h), &g.mul(&h));
        let rhs = poly_gcd(&f, &g).mul(&h).monic();
        // gcd(fh, gh) = gcd(f, g) * h up to units; both sides are monic here.
        prop_assert!(lhs.rem(&rhs).unwrap().is_zero());
        prop_assert_eq!(lhs.degree(), rhs.degree());
    }

    #[test]
    fn resultant_vanishes_exactly_on_common_roots(
        f in poly_of_degree(&f7(), 1, 6),
        g in poly_of_degree(&f7(), 1, 6),
    ) {
        let r = resultant(&f, &g).expect("positive degrees");
        let d = poly_gcd(&f, &g);
        prop_assert_eq!(r.is_zero(), d.degree().unwrap() >= 1);
    }

    #[test]
    fn resultant_swaps_with_a_sign(
        f in poly_of_degree(&f7(), 1, 5),
        g in poly_of_degree(&f7(), 1, 5),
    ) {
        let m = f.degree().unwrap();
        let n = g.degree().unwrap();
        let fg = resultant(&f, &g).unwrap();
        let gf = resultant(&g, &f).unwrap();
        let expected = if (m * n) % 2 == 0 { gf.clone() } else { gf.neg() };
        prop_assert_eq!(fg, expected);
    }

    #[test]
    fn resultant_is_multiplicative_on_the_left(
        f in poly_of_degree(&f7(), 1, 4),
        g in poly_of_degree(&f7(), 1, 4),
        h in poly_of_degree(&f7(), 1, 4),
    ) {
        let lhs = resultant(&f.mul(&g), &h).unwrap();
        let rhs = resultant(&f, &h).unwrap().mul(&resultant(&g, &h).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn discriminant_detects_repeated_roots(
        f in poly_of_degree(&f7(), 2, 7),
    ) {
        let disc = discriminant(&f).expect("degree at least two");
        let repeated = poly_gcd(&f, &f.derivative()).degree().unwrap() >= 1;
        prop_assert_eq!(disc.is_zero(), repeated);
    }

    #[test]
    fn composition_commutes_with_evaluation(
        f in poly_over(&f9(), 5),
        g in poly_over(&f9(), 4),
    ) {
        let ctx = f9();
        let comp = f.compose(&g);
        for x in ctx.elements() {
            prop_assert_eq!(comp.eval(&x), f.eval(&g.eval(&x)));
        }
    }

    #[test]
    fn derivative_is_a_leibniz_map(
        f in poly_over(&f7(), 6),
        g in poly_over(&f7(), 6),
    ) {
        let lhs = f.mul(&g).derivative();
        let rhs = f.derivative().mul(&g).add(&f.mul(&g.derivative()));
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn division_by_zero_is_rejected() {
    let ctx = f7();
    let f = UPoly::from_ints(&ctx, &[1, 2, 3]);
    assert!(f.divmod(&UPoly::zero(&ctx)).is_err());
}
