//! Plane curves `F(x, y) = 0`, their affine rational points and the
//! restriction of `F` to a line.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bipoly::BiPoly;
use crate::error::{Error, Result};
use crate::field::{FElem, FieldCtx, FieldSpec};
use crate::lines::Line;
use crate::poly::UniPoly;

/// Default cap on `(x, y)` pairs examined by brute-force enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// `Norm(x) = Tr(y)` over `GF(q^r)`.
    NormTrace { q: u64, r: u32 },
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: FElem,
    pub y: FElem,
}

#[derive(Debug, Clone)]
pub struct PlaneCurve {
    field: Arc<FieldCtx>,
    equation: BiPoly,
    kind: CurveKind,
    total_degree: u64,
    second_degree: u64,
    genus: Option<u64>,
}

/// Serialized curve description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveSpec {
    NormTrace {
        q: u64,
        r: u32,
    },
    Custom {
        terms: Vec<TermSpec>,
        /// The field the equation lives in; may instead be supplied by the caller.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<FieldSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSpec {
    pub a: u64,
    pub b: u64,
    pub coeff: u32,
}

impl PlaneCurve {
    /// The norm-trace curve `x^((q^r-1)/(q-1)) = sum_{i<r} y^(q^i)` over the
    /// field's declared tower.
    pub fn norm_trace(field: Arc<FieldCtx>) -> Result<Self> {
        let q = field.subfield_size()? as u64;
        let r = field.ext_degree()?;
        if r < 2 {
            return Err(Error::InvalidExtensionDegree(r));
        }
        let f = &*field;
        let norm_exp = (q.pow(r) - 1) / (q - 1);
        let mut eq = BiPoly::zero();
        eq.add_term(norm_exp, 0, FElem::ONE, f);
        for i in 0..r {
            eq.add_term(0, q.pow(i), f.neg(FElem::ONE), f);
        }
        let genus = (norm_exp - 1) * (q.pow(r - 1) - 1) / 2;
        Ok(PlaneCurve {
            equation: eq,
            kind: CurveKind::NormTrace { q, r },
            total_degree: norm_exp,
            second_degree: q.pow(r - 1),
            genus: Some(genus),
            field,
        })
    }

    /// Convenience constructor building `GF(q^r)` first.
    pub fn norm_trace_qr(q: u64, r: u32) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidExtensionDegree(r));
        }
        Self::norm_trace(Arc::new(FieldCtx::tower(q, r)?))
    }

    /// Custom curve from `(a, b, coeff)` triples, coefficients as element
    /// integers.
    pub fn from_terms(field: Arc<FieldCtx>, terms: &[(u64, u64, u32)]) -> Result<Self> {
        let mut eq = BiPoly::zero();
        for &(a, b, c) in terms {
            let c = field.from_int(c)?;
            eq.add_term(a, b, c, &field);
        }
        Self::custom(field, eq)
    }

    pub fn custom(field: Arc<FieldCtx>, equation: BiPoly) -> Result<Self> {
        if equation.is_zero() {
            return Err(Error::InvalidSpec("curve equation is zero".into()));
        }
        equation.check(&field)?;
        let total = equation.total_degree() as u64;
        let second = equation
            .terms()
            .map(|((a, b), _)| a + b)
            .filter(|&d| d < total)
            .max()
            .unwrap_or(0);
        Ok(PlaneCurve {
            field,
            equation,
            kind: CurveKind::Custom,
            total_degree: total,
            second_degree: second,
            genus: None,
        })
    }

    pub fn from_spec(spec: &CurveSpec, field: Option<Arc<FieldCtx>>) -> Result<Self> {
        match spec {
            CurveSpec::NormTrace { q, r } => Self::norm_trace_qr(*q, *r),
            CurveSpec::Custom { terms, field: embedded } => {
                let field = match (embedded, field) {
                    (Some(fs), _) => Arc::new(FieldCtx::from_spec(fs)?),
                    (None, Some(f)) => f,
                    (None, None) => {
                        return Err(Error::InvalidSpec("custom curve needs a field".into()))
                    }
                };
                let mut eq = BiPoly::zero();
                for t in terms {
                    let c = field.from_int(t.coeff)?;
                    eq.add_term(t.a, t.b, c, &field);
                }
                Self::custom(field, eq)
            }
        }
    }

    pub fn spec(&self) -> CurveSpec {
        match self.kind {
            CurveKind::NormTrace { q, r } => CurveSpec::NormTrace { q, r },
            CurveKind::Custom => CurveSpec::Custom {
                terms: self
                    .equation
                    .terms()
                    .map(|((a, b), c)| TermSpec {
                        a,
                        b,
                        coeff: self.field.to_int(c),
                    })
                    .collect(),
                field: Some(self.field.spec()),
            },
        }
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn equation(&self) -> &BiPoly {
        &self.equation
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn is_norm_trace(&self) -> bool {
        matches!(self.kind, CurveKind::NormTrace { .. })
    }

    pub fn total_degree(&self) -> u64 {
        self.total_degree
    }

    /// Degree of the second-highest-degree term of `F`.
    pub fn second_degree(&self) -> u64 {
        self.second_degree
    }

    pub fn genus(&self) -> Option<u64> {
        self.genus
    }

    pub fn contains(&self, p: Point) -> bool {
        self.equation.eval(p.x, p.y, &self.field).is_zero()
    }

    /// Affine rational points in canonical order (x major, y minor).
    pub fn enumerate_points(&self, budget: u64) -> Result<Vec<Point>> {
        match self.kind {
            CurveKind::NormTrace { q, r } => {
                let n = q.pow(2 * r - 1);
                if n > budget {
                    return Err(Error::EnumerationBudgetExceeded { needed: n, budget });
                }
                self.enumerate_norm_trace()
            }
            CurveKind::Custom => self.enumerate_points_brute(budget),
        }
    }

    /// Exhaustive scan of all `Q^2` pairs.
    pub fn enumerate_points_brute(&self, budget: u64) -> Result<Vec<Point>> {
        let q = self.field.size() as u64;
        if q * q > budget {
            return Err(Error::EnumerationBudgetExceeded {
                needed: q * q,
                budget,
            });
        }
        let f = &*self.field;
        let mut pts = Vec::new();
        for x in f.elements() {
            for y in f.elements() {
                let p = Point { x, y };
                if self.contains(p) {
                    pts.push(p);
                }
            }
        }
        Ok(pts)
    }

    fn enumerate_norm_trace(&self) -> Result<Vec<Point>> {
        let f = &*self.field;
        let mut by_trace: HashMap<FElem, Vec<FElem>> = HashMap::new();
        for y in f.elements() {
            by_trace.entry(f.rel_trace(y)?).or_default().push(y);
        }
        let mut pts = Vec::new();
        for x in f.elements() {
            if let Some(ys) = by_trace.get(&f.rel_norm(x)?) {
                pts.extend(ys.iter().map(|&y| Point { x, y }));
            }
        }
        Ok(pts)
    }

    /// `F(x, alpha x + beta)`.
    pub fn restrict_to_line(&self, line: Line) -> UniPoly {
        match self.kind {
            CurveKind::NormTrace { q, r } => self.norm_trace_restriction(q, r, line),
            CurveKind::Custom => self.equation.substitute_line(line.alpha, line.beta, &self.field),
        }
    }

    /// Generic substitution path, available for every curve kind.
    pub fn restrict_to_line_generic(&self, line: Line) -> UniPoly {
        self.equation.substitute_line(line.alpha, line.beta, &self.field)
    }

    /// `x^D - Tr(beta) - sum_i alpha^(q^i) x^(q^i)`.
    fn norm_trace_restriction(&self, q: u64, r: u32, line: Line) -> UniPoly {
        let f = &*self.field;
        let d = ((q.pow(r) - 1) / (q - 1)) as usize;
        let mut v = vec![FElem::ZERO; d + 1];
        v[d] = FElem::ONE;
        let tr = f.rel_trace(line.beta).expect("norm-trace curve has a tower");
        v[0] = f.neg(tr);
        let mut qi = 1u64;
        for _ in 0..r {
            let c = f.pow(line.alpha, qi as u128);
            v[qi as usize] = f.sub(v[qi as usize], c);
            qi *= q;
        }
        UniPoly::from_coeffs(v)
    }

    pub fn check_point(&self, p: Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointNotOnCurve(self.field.to_int(p.x), self.field.to_int(p.y)))
        }
    }

    pub fn same_field(&self, other: &FieldCtx) -> Result<()> {
        if *self.field == *other {
            Ok(())
        } else {
            Err(Error::ContextMismatch("curve and argument use different fields".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_trace_metadata() {
        let c = PlaneCurve::norm_trace_qr(3, 3).unwrap();
        assert_eq!(c.genus(), Some(48));
        assert_eq!(c.total_degree(), 13);
        assert_eq!(c.second_degree(), 9);
        let c = PlaneCurve::norm_trace_qr(3, 4).unwrap();
        assert_eq!(c.genus(), Some(507));
        let c = PlaneCurve::norm_trace_qr(2, 3).unwrap();
        assert!(c.second_degree() < c.total_degree());
    }

    #[test]
    fn point_counts() {
        for (q, r, n) in [(2u64, 2u32, 8usize), (2, 3, 32), (3, 2, 27), (3, 3, 243), (4, 2, 64)] {
            let c = PlaneCurve::norm_trace_qr(q, r).unwrap();
            let fast = c.enumerate_points(DEFAULT_ENUMERATION_BUDGET).unwrap();
            assert_eq!(fast.len(), n);
            let brute = c.enumerate_points_brute(DEFAULT_ENUMERATION_BUDGET).unwrap();
            assert_eq!(fast, brute);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let c = PlaneCurve::norm_trace_qr(3, 3).unwrap();
        assert!(matches!(
            c.enumerate_points_brute(100),
            Err(Error::EnumerationBudgetExceeded { needed: 729, budget: 100 })
        ));
    }

    #[test]
    fn closed_form_restriction_matches_substitution() {
        let c = PlaneCurve::norm_trace_qr(3, 3).unwrap();
        let f = c.field().clone();
        for a in [1u32, 2, 5, 26] {
            for b in [0u32, 1, 4, 13, 25] {
                let line = Line::new(f.elem(a), f.elem(b)).unwrap();
                assert_eq!(c.restrict_to_line(line), c.restrict_to_line_generic(line));
            }
        }
    }

    #[test]
    fn x33_restriction_on_identity_line() {
        // F(x, x) = x^13 - x^9 - x^3 - x
        let c = PlaneCurve::norm_trace_qr(3, 3).unwrap();
        let f = c.field().clone();
        let m = c.restrict_to_line(Line::new(FElem::ONE, FElem::ZERO).unwrap());
        let minus = f.neg(FElem::ONE);
        let mut v = vec![FElem::ZERO; 14];
        v[13] = FElem::ONE;
        v[9] = minus;
        v[3] = minus;
        v[1] = minus;
        assert_eq!(m, UniPoly::from_coeffs(v));
    }

    #[test]
    fn x23_restriction_on_identity_line() {
        let c = PlaneCurve::norm_trace_qr(2, 3).unwrap();
        let f = c.field().clone();
        let m = c.restrict_to_line(Line::new(FElem::ONE, FElem::ZERO).unwrap());
        assert_eq!(m, UniPoly::from_ints(&f, &[0, 1, 1, 0, 1, 0, 0, 1]).unwrap());
    }

    #[test]
    fn restriction_depends_only_on_trace_class_of_beta() {
        let c = PlaneCurve::norm_trace_qr(2, 4).unwrap();
        let f = c.field().clone();
        let alpha = f.elem(3);
        let by_trace = |t: FElem| {
            f.elements()
                .filter(|&b| f.rel_trace(b).unwrap() == t)
                .map(|b| c.restrict_to_line(Line::new(alpha, b).unwrap()))
                .collect::<Vec<_>>()
        };
        for t in [FElem::ZERO, FElem::ONE] {
            let polys = by_trace(t);
            assert!(polys.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn custom_spec_round_trip() {
        let f = Arc::new(FieldCtx::new(2, 6, None).unwrap());
        let spec = CurveSpec::Custom {
            terms: vec![
                TermSpec { a: 0, b: 8, coeff: 1 },
                TermSpec { a: 0, b: 1, coeff: 1 },
                TermSpec { a: 3, b: 0, coeff: 1 },
            ],
            field: None,
        };
        let c = PlaneCurve::from_spec(&spec, Some(f)).unwrap();
        assert_eq!(c.total_degree(), 8);
        assert_eq!(c.second_degree(), 3);
        let again = PlaneCurve::from_spec(&c.spec(), None).unwrap();
        assert_eq!(again.equation(), c.equation());
        let json = serde_json::to_string(&CurveSpec::NormTrace { q: 3, r: 3 }).unwrap();
        assert_eq!(json, r#"{"kind":"norm-trace","q":3,"r":3}"#);
    }
}
