//! Zeta-function numerators for curves over F_q.
//!
//! The numerator P(T) = sum c_i T^i has degree 2g, integer coefficients,
//! c_0 = 1, and reciprocal roots of absolute value sqrt(q). Point counts
//! over extensions determine it through the power sums
//! S_k = q^k + 1 - N_k, which satisfy the Newton identities
//! S_k + sum_{i=1}^{k-1} c_i S_{k-i} + k c_k = 0.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaNumerator {
    /// c_0 .. c_{2g}, little-endian in T.
    coeffs: Vec<BigInt>,
    q: BigUint,
    g: usize,
}

/// Itemized outcome of the Weil checks; `passed` requires all of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeilReport {
    pub constant_term_is_one: bool,
    pub leading_term_is_q_to_g: bool,
    pub functional_equation: bool,
    pub coefficient_bounds: bool,
    pub counts_nonnegative: bool,
}

impl WeilReport {
    pub fn passed(&self) -> bool {
        self.constant_term_is_one
            && self.leading_term_is_q_to_g
            && self.functional_equation
            && self.coefficient_bounds
            && self.counts_nonnegative
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl ZetaNumerator {
    /// Assemble from explicit coefficients; only the shape (odd length
    /// 2g + 1, matching genus) is validated, so that candidates can be
    /// inspected with `check_weil` even when they fail it.
    pub fn from_coeffs(coeffs: Vec<BigInt>, q: BigUint, g: usize) -> Result<ZetaNumerator> {
        if g == 0 || coeffs.len() != 2 * g + 1 {
            return Err(Error::InvariantViolation(format!(
                "numerator for genus {g} needs {} coefficients, got {}",
                2 * g + 1,
                coeffs.len()
            )));
        }
        Ok(ZetaNumerator { coeffs, q, g })
    }

    /// Genus-1 numerator 1 - tT + qT^2 from a Frobenius trace.
    pub fn from_frobenius_trace(t: &BigInt, q: &BigUint) -> ZetaNumerator {
        ZetaNumerator {
            coeffs: vec![BigInt::one(), -t.clone(), BigInt::from(q.clone())],
            q: q.clone(),
            g: 1,
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    /// P(1): for a Jacobian this is the group order.
    pub fn eval_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Power sums S_1..S_{k_max} via the Newton recurrence, treating c_i = 0
    /// beyond degree 2g.
    fn power_sums(&self, k_max: usize) -> Vec<BigInt> {
        let mut s: Vec<BigInt> = Vec::with_capacity(k_max);
        for k in 1..=k_max {
            let mut acc = if k <= 2 * self.g {
                BigInt::from(k as u64) * &self.coeffs[k]
            } else {
                BigInt::zero()
            };
            for i in 1..k.min(2 * self.g + 1) {
                acc += &self.coeffs[i] * &s[k - i - 1];
            }
            s.push(-acc);
        }
        s
    }

    /// Point counts N_1..N_{k_max} implied by the numerator:
    /// N_k = q^k + 1 - S_k. Values may be negative for non-Weil candidates.
    pub fn counts(&self, k_max: usize) -> Vec<BigInt> {
        let q = BigInt::from(self.q.clone());
        let mut qk = BigInt::one();
        self.power_sums(k_max)
            .into_iter()
            .map(|s| {
                qk *= &q;
                &qk + 1 - s
            })
            .collect()
    }

    /// All structural Weil constraints, each reported separately:
    /// c_0 = 1, c_{2g} = q^g, the functional equation
    /// c_{2g-i} = q^{g-i} c_i, the archimedean coefficient bounds
    /// c_i^2 <= C(2g,i)^2 q^i, and N_k >= 0 for k <= 2g.
    pub fn check_weil(&self) -> WeilReport {
        let q = BigInt::from(self.q.clone());
        let g = self.g;
        let constant_term_is_one = self.coeffs[0].is_one();
        let leading_term_is_q_to_g = self.coeffs[2 * g] == q.pow(g as u32);
        let functional_equation = (0..=g).all(|i| {
            self.coeffs[2 * g - i] == q.pow((g - i) as u32) * &self.coeffs[i]
        });
        let coefficient_bounds = (0..=2 * g).all(|i| {
            let b = binomial(2 * g, i);
            self.coeffs[i].pow(2) <= b.pow(2) * q.pow(i as u32)
        });
        let counts_nonnegative = self
            .counts(2 * g)
            .iter()
            .all(|n| !n.is_negative());
        WeilReport {
            constant_term_is_one,
            leading_term_is_q_to_g,
            functional_equation,
            coefficient_bounds,
            counts_nonnegative,
        }
    }
}

/// Build the numerator from exactly g point counts N_1..N_g over F_q,
/// F_{q^2}, ...: Newton determines c_1..c_g, the functional equation fills
/// c_{g+1}..c_{2g}. Non-integral Newton steps and Weil-bound violations are
/// rejected: such counts cannot come from a curve.
pub fn zeta_from_counts(counts: &[BigUint], q: &BigUint, g: usize) -> Result<ZetaNumerator> {
    if g == 0 || counts.len() != g {
        return Err(Error::InvariantViolation(format!(
            "genus {g} requires exactly {g} counts, got {}",
            counts.len()
        )));
    }
    let qi = BigInt::from(q.clone());
    let mut s: Vec<BigInt> = Vec::with_capacity(g);
    let mut qk = BigInt::one();
    for n in counts {
        qk *= &qi;
        s.push(&qk + 1 - BigInt::from(n.clone()));
    }
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    for k in 1..=g {
        let mut acc = s[k - 1].clone();
        for i in 1..k {
            acc += &c[i] * &s[k - i - 1];
        }
        let (quot, rem) = (-acc).div_rem(&BigInt::from(k as u64));
        if !rem.is_zero() {
            return Err(Error::NonIntegralCoefficient(format!(
                "Newton step {k} is not divisible by {k}"
            )));
        }
        c.push(quot);
    }
    for i in (0..g).rev() {
        let v = qi.pow((g - i) as u32) * &c[i];
        c.push(v);
    }
    // c was filled as c_0..c_g then c_{g+1} = q c_{g-1}, ..., c_{2g} = q^g c_0.
    let z = ZetaNumerator {
        coeffs: c,
        q: q.clone(),
        g,
    };
    let report = z.check_weil();
    if !report.coefficient_bounds {
        return Err(Error::WeilBoundViolated(
            "coefficient exceeds its archimedean bound".into(),
        ));
    }
    if !report.counts_nonnegative {
        return Err(Error::WeilBoundViolated(
            "implied extension count is negative".into(),
        ));
    }
    debug_assert!(report.passed());
    Ok(z)
}

// ---------------------------------------------------------------------------
// JSON shape: {"q": int, "genus": int, "coeffs": [int...]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ZetaJson {
    q: u64,
    genus: usize,
    coeffs: Vec<i128>,
}

impl Serialize for ZetaNumerator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let q = self
            .q
            .to_u64()
            .ok_or_else(|| S::Error::custom("field size exceeds JSON integer range"))?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.to_i128())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| S::Error::custom("coefficient exceeds JSON integer range"))?;
        ZetaJson {
            q,
            genus: self.g,
            coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ZetaNumerator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = ZetaJson::deserialize(deserializer)?;
        ZetaNumerator::from_coeffs(
            raw.coeffs.into_iter().map(BigInt::from).collect(),
            BigUint::from(raw.q),
            raw.genus,
        )
        .map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn genus_one_frozen_example() {
        // 4 points over F_5 -> trace 2 -> 1 - 2T + 5T^2.
        let z = zeta_from_counts(&[BigUint::from(4u32)], &BigUint::from(5u32), 1).unwrap();
        assert_eq!(z.coeffs(), &[big(1), big(-2), big(5)]);
        assert!(z.check_weil().passed());
        assert_eq!(z.counts(2), vec![big(4), big(32)]);
        assert_eq!(z.eval_one(), big(4));
    }

    #[test]
    fn genus_one_trace_zero() {
        let z = zeta_from_counts(&[BigUint::from(6u32)], &BigUint::from(5u32), 1).unwrap();
        assert_eq!(z.coeffs(), &[big(1), big(0), big(5)]);
        assert_eq!(
            z,
            ZetaNumerator::from_frobenius_trace(&big(0), &BigUint::from(5u32))
        );
    }

    #[test]
    fn genus_two_roundtrip() {
        // Valid genus-2 data over F_3 with a1 = -1, a2 = 1.
        let z = ZetaNumerator::from_coeffs(
            vec![big(1), big(-1), big(1), big(-3), big(9)],
            BigUint::from(3u32),
            2,
        )
        .unwrap();
        assert!(z.check_weil().passed());
        let counts = z.counts(2);
        let counts_u: Vec<BigUint> = counts.iter().map(|n| n.to_biguint().unwrap()).collect();
        let z2 = zeta_from_counts(&counts_u, &BigUint::from(3u32), 2).unwrap();
        assert_eq!(z, z2);
        // Extension counts keep satisfying N_k = q^k + 1 - S_k consistently.
        let n4 = z.counts(4);
        assert_eq!(n4[0], counts[0]);
        assert_eq!(n4[1], counts[1]);
        assert!(!n4[2].is_negative() && !n4[3].is_negative());
    }

    #[test]
    fn weil_bound_rejects_oversized_trace() {
        // N_1 = 12 over F_5 means |t| = 6 > 2*sqrt(5).
        assert!(matches!(
            zeta_from_counts(&[BigUint::from(12u32)], &BigUint::from(5u32), 1),
            Err(Error::WeilBoundViolated(_))
        ));
        assert!(matches!(
            zeta_from_counts(&[BigUint::from(0u32)], &BigUint::from(5u32), 1),
            Err(Error::WeilBoundViolated(_))
        ));
    }

    #[test]
    fn non_integral_newton_step_is_rejected() {
        // q = 3: S_1 = 1, S_2 = 0 forces c_2 = 1/2.
        assert!(matches!(
            zeta_from_counts(
                &[BigUint::from(3u32), BigUint::from(10u32)],
                &BigUint::from(3u32),
                2
            ),
            Err(Error::NonIntegralCoefficient(_))
        ));
    }

    #[test]
    fn check_weil_itemizes_failures() {
        let bad_bounds = ZetaNumerator::from_coeffs(
            vec![big(1), big(7), big(5)],
            BigUint::from(5u32),
            1,
        )
        .unwrap();
        let r = bad_bounds.check_weil();
        assert!(!r.coefficient_bounds);
        assert!(!r.passed());

        let bad_functional = ZetaNumerator::from_coeffs(
            vec![big(1), big(1), big(0), big(2), big(9)],
            BigUint::from(3u32),
            2,
        )
        .unwrap();
        let r = bad_functional.check_weil();
        assert!(!r.functional_equation);

        let bad_lead = ZetaNumerator::from_coeffs(
            vec![big(1), big(0), big(7)],
            BigUint::from(5u32),
            1,
        )
        .unwrap();
        assert!(!bad_lead.check_weil().leading_term_is_q_to_g);
    }

    #[test]
    fn counts_enforce_shape() {
        assert!(zeta_from_counts(&[], &BigUint::from(5u32), 1).is_err());
        assert!(zeta_from_counts(&[BigUint::from(4u32)], &BigUint::from(5u32), 2).is_err());
        assert!(ZetaNumerator::from_coeffs(vec![big(1)], BigUint::from(5u32), 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let z = ZetaNumerator::from_coeffs(
            vec![big(1), big(-2), big(5)],
            BigUint::from(5u32),
            1,
        )
        .unwrap();
        let text = serde_json::to_string(&z).unwrap();
        assert_eq!(text, r#"{"q":5,"genus":1,"coeffs":[1,-2,5]}"#);
        let back: ZetaNumerator = serde_json::from_str(&text).unwrap();
        assert_eq!(back, z);
    }
}
