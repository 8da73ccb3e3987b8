//! Parametrized families of curves and their specializations.
//!
//! A family fixes a curve shape — short Weierstrass cubic, hyperelliptic
//! y^2 = f(x), or a general plane form — together with named parameters. A
//! [`Specialization`] binds the parameters to values in a concrete field;
//! degeneracy *gates* then decide whether that member is admissible
//! (nonvanishing discriminant, or smoothness for plane families) before any
//! curve object is built.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ecurve::{weierstrass_discriminant, EllipticCurve};
use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FieldElement};
use crate::hyperell::HyperCurve;
use crate::planecurve::{analyze_form, parse_form_with, PlaneForm};
use crate::upoly::{discriminant, UPoly};

/// Outcome of a degeneracy gate: the quantities that were examined and, on
/// failure, why the family member was rejected.
#[derive(Clone, Debug)]
pub struct GateReport {
    pub passed: bool,
    /// Named quantities computed while gating (discriminants, leading
    /// coefficients), in evaluation order.
    pub values: Vec<(String, FieldElement)>,
    pub failure_reason: Option<String>,
}

impl GateReport {
    fn pass(values: Vec<(String, FieldElement)>) -> GateReport {
        GateReport {
            passed: true,
            values,
            failure_reason: None,
        }
    }

    fn fail(values: Vec<(String, FieldElement)>, reason: impl Into<String>) -> GateReport {
        GateReport {
            passed: false,
            values,
            failure_reason: Some(reason.into()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// y^2 = x^3 + a x + b with two parameters (a, b).
    EllipticWeierstrass,
    /// y^2 = f(x) with deg f + 1 coefficient parameters, leading first.
    Hyperelliptic,
    /// A homogeneous form in X, Y, Z with parameters appearing as symbols.
    PlaneProjective,
}

/// A declared family: shape, degree, expected genus, parameter names, and
/// (for plane families) the form source text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub degree: u32,
    pub genus: u32,
    pub params: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FamilySpec {
    /// Structural validation: parameter naming, degree/genus coherence, and
    /// (for plane families) syntactic checks of the form text.
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::InvariantViolation(msg));
        let mut seen = BTreeSet::new();
        for p in &self.params {
            if !is_identifier(p) {
                return err(format!("parameter name `{p}` is not an identifier"));
            }
            if matches!(p.as_str(), "X" | "Y" | "Z") {
                return err(format!("parameter name `{p}` collides with a variable"));
            }
            if !seen.insert(p.as_str()) {
                return err(format!("duplicate parameter `{p}`"));
            }
        }
        match self.kind {
            FamilyKind::EllipticWeierstrass => {
                if self.degree != 3 {
                    return err("elliptic families have degree 3".into());
                }
                if self.genus != 1 {
                    return err("elliptic families have genus 1".into());
                }
                if self.params.len() != 2 {
                    return err("elliptic families take exactly two parameters".into());
                }
                if self.form.is_some() {
                    return err("elliptic families do not carry a form".into());
                }
            }
            FamilyKind::Hyperelliptic => {
                if self.degree < 3 {
                    return err("hyperelliptic families need degree >= 3".into());
                }
                if self.genus != (self.degree - 1) / 2 {
                    return err(format!(
                        "degree {} forces genus {}, spec declares {}",
                        self.degree,
                        (self.degree - 1) / 2,
                        self.genus
                    ));
                }
                if self.params.len() != self.degree as usize + 1 {
                    return err(format!(
                        "degree {} needs {} coefficient parameters (leading first)",
                        self.degree,
                        self.degree + 1
                    ));
                }
                if self.form.is_some() {
                    return err("hyperelliptic families do not carry a form".into());
                }
            }
            FamilyKind::PlaneProjective => {
                let Some(src) = &self.form else {
                    return err("plane families must carry a form".into());
                };
                if self.degree == 0 || self.degree > 255 {
                    return err(format!("plane degree {} out of range", self.degree));
                }
                let shape = analyze_form(src)?;
                if let Some(bad) = shape
                    .term_degrees
                    .iter()
                    .find(|&&d| d != self.degree as u16)
                {
                    return err(format!(
                        "form has a term of degree {bad}, spec declares {}",
                        self.degree
                    ));
                }
                let declared: BTreeSet<&str> = self.params.iter().map(|s| s.as_str()).collect();
                for sym in &shape.symbols {
                    if !declared.contains(sym.as_str()) {
                        return err(format!("form uses undeclared symbol `{sym}`"));
                    }
                }
                for p in &declared {
                    if !shape.symbols.contains(*p) {
                        return err(format!("parameter `{p}` never appears in the form"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parse and validate a family specification from JSON.
pub fn parse_family(src: &str) -> Result<FamilySpec> {
    let spec: FamilySpec = serde_json::from_str(src)
        .map_err(|e| Error::ParseError(format!("family specification: {e}")))?;
    spec.validate()?;
    Ok(spec)
}

/// A family member: parameter values bound in a concrete field.
#[derive(Clone, Debug)]
pub struct Specialization {
    family: FamilySpec,
    ctx: FieldCtx,
    values: Vec<FieldElement>,
}

/// The curve object a specialization produces once its gate passes.
#[derive(Clone, Debug)]
pub enum SpecializedCurve {
    Elliptic(EllipticCurve),
    HyperGenus2(HyperCurve),
    Plane(PlaneForm),
}

impl Specialization {
    pub fn new(
        family: FamilySpec,
        ctx: FieldCtx,
        values: Vec<FieldElement>,
    ) -> Result<Specialization> {
        family.validate()?;
        if values.len() != family.params.len() {
            return Err(Error::InvariantViolation(format!(
                "family takes {} parameters, got {} values",
                family.params.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| v.ctx() != &ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(Specialization {
            family,
            ctx,
            values,
        })
    }

    pub fn family(&self) -> &FamilySpec {
        &self.family
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    pub fn value_of(&self, name: &str) -> Option<&FieldElement> {
        self.family
            .params
            .iter()
            .position(|p| p == name)
            .map(|i| &self.values[i])
    }

    /// y^2 = x^3 + a x + b coefficients, in declaration order.
    fn elliptic_ab(&self) -> (&FieldElement, &FieldElement) {
        (&self.values[0], &self.values[1])
    }

    /// The hyperelliptic f(x), built from leading-first coefficients.
    fn hyper_poly(&self) -> UPoly {
        UPoly::from_coeffs(&self.ctx, self.values.iter().rev().cloned().collect())
    }

    /// Degeneracy gate with the default singularity search (field degree 2,
    /// one million evaluations) for plane families.
    pub fn discriminant_gate(&self) -> Result<GateReport> {
        self.discriminant_gate_with_bound(2, 1_000_000)
    }

    /// Degeneracy gate. Elliptic: characteristic >= 5 and nonzero
    /// -16(4a^3 + 27b^2). Hyperelliptic: nonvanishing leading coefficient
    /// and squarefree f. Plane: no singular point over F_{q^s} for
    /// s <= max_field_degree.
    pub fn discriminant_gate_with_bound(
        &self,
        max_field_degree: u32,
        cap: u64,
    ) -> Result<GateReport> {
        match self.family.kind {
            FamilyKind::EllipticWeierstrass => {
                let (a, b) = self.elliptic_ab();
                if self.ctx.p() < 5 {
                    return Ok(GateReport::fail(
                        vec![],
                        format!(
                            "short Weierstrass model needs characteristic >= 5, field has {}",
                            self.ctx.p()
                        ),
                    ));
                }
                let disc = weierstrass_discriminant(a, b);
                let values = vec![("weierstrass_disc".to_string(), disc.clone())];
                if disc.is_zero() {
                    Ok(GateReport::fail(values, "discriminant vanishes"))
                } else {
                    Ok(GateReport::pass(values))
                }
            }
            FamilyKind::Hyperelliptic => {
                let a0 = self.values[0].clone();
                let mut values = vec![("a0".to_string(), a0.clone())];
                if a0.is_zero() {
                    return Ok(GateReport::fail(
                        values,
                        "leading coefficient vanishes: the member degenerates",
                    ));
                }
                let f = self.hyper_poly();
                let disc = discriminant(&f)?;
                values.push(("disc_f".to_string(), disc.clone()));
                if disc.is_zero() {
                    Ok(GateReport::fail(values, "f has a repeated root"))
                } else {
                    Ok(GateReport::pass(values))
                }
            }
            FamilyKind::PlaneProjective => {
                let form = match self.plane_form_of() {
                    Ok(f) => f,
                    Err(Error::InvariantViolation(msg)) => {
                        return Ok(GateReport::fail(
                            vec![],
                            format!("form degenerates at these values: {msg}"),
                        ));
                    }
                    Err(e) => return Err(e),
                };
                // Homogeneity means surviving monomials keep the declared
                // degree; a vanishing member was already caught above.
                debug_assert_eq!(form.degree(), self.family.degree as usize);
                match form.find_singular_points(max_field_degree, cap) {
                    Ok(sing) => {
                        if let Some(sp) = sing.first() {
                            Ok(GateReport::fail(
                                vec![],
                                format!(
                                    "singular point over extension degree {} ({} found in total)",
                                    sp.field_degree,
                                    sing.len()
                                ),
                            ))
                        } else {
                            Ok(GateReport::pass(vec![]))
                        }
                    }
                    // Unclassifiable singularities are still singularities.
                    Err(Error::UnsupportedSingularity(msg)) => {
                        Ok(GateReport::fail(vec![], format!("singular point: {msg}")))
                    }
                    Err(e) => Err(e),
                }
            }
        }
    }

    /// Divisor gate: accept the built-in divisor (None), reject the zero
    /// line, and for plane families require that the line does not divide
    /// the form.
    pub fn divisor_gate(
        &self,
        line: Option<(&FieldElement, &FieldElement, &FieldElement)>,
    ) -> Result<bool> {
        let Some((a, b, c)) = line else {
            return Ok(true);
        };
        if a.is_zero() && b.is_zero() && c.is_zero() {
            return Ok(false);
        }
        if self.family.kind != FamilyKind::PlaneProjective {
            return Err(Error::Unsupported(
                "line divisor checks apply to plane families".into(),
            ));
        }
        let form = self.plane_form_of()?;
        Ok(!form.line_divides((a, b, c))?)
    }

    /// The plane form at these parameter values, without gating — singular
    /// members can be analyzed deliberately.
    pub fn plane_form_of(&self) -> Result<PlaneForm> {
        if self.family.kind != FamilyKind::PlaneProjective {
            return Err(Error::Unsupported(
                "only plane families carry a form".into(),
            ));
        }
        let src = self.family.form.as_deref().expect("validated");
        parse_form_with(&self.ctx, src, &|name| self.value_of(name).cloned())
    }

    /// Gate, then build the curve object. A failed gate is reported as
    /// [`Error::GateFailed`] carrying the full report.
    pub fn specialize(&self) -> Result<SpecializedCurve> {
        let report = self.discriminant_gate()?;
        if !report.passed {
            return Err(Error::GateFailed(Box::new(report)));
        }
        match self.family.kind {
            FamilyKind::EllipticWeierstrass => {
                let (a, b) = self.elliptic_ab();
                Ok(SpecializedCurve::Elliptic(EllipticCurve::new(
                    a.clone(),
                    b.clone(),
                )?))
            }
            FamilyKind::Hyperelliptic => {
                if !matches!(self.family.degree, 5 | 6) {
                    return Err(Error::Unsupported(format!(
                        "hyperelliptic arithmetic is implemented for degrees 5 and 6, \
                         family has degree {}",
                        self.family.degree
                    )));
                }
                Ok(SpecializedCurve::HyperGenus2(HyperCurve::new(
                    self.hyper_poly(),
                )?))
            }
            FamilyKind::PlaneProjective => Ok(SpecializedCurve::Plane(self.plane_form_of()?)),
        }
    }
}
