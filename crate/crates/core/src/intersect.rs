//! Line–curve intersection numbers: single lines, class tables, per-point
//! profiles, spectra, and validation of the closed-form lower bounds.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds;
use crate::curve::{CurveKind, PlaneCurve, Point};
use crate::error::{Error, Result};
use crate::field::FElem;
use crate::lines::{Line, LineFamily, ResolvedFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountMethod {
    /// `deg gcd(m, x^Q - x)` with `x^Q` reduced modulo `m`.
    #[default]
    Gcd,
    /// Evaluate `F(x, alpha x + beta)` at every `x`.
    Brute,
}

/// Number of distinct rational points on `line ∩ curve`.
pub fn intersection_count(curve: &PlaneCurve, line: Line, method: CountMethod) -> Result<usize> {
    let f = curve.field();
    f.check(line.alpha)?;
    f.check(line.beta)?;
    match method {
        CountMethod::Gcd => curve.restrict_to_line(line).count_field_roots(f),
        CountMethod::Brute => Ok(f
            .elements()
            .filter(|&x| curve.contains(Point { x, y: line.y_at(x, f) }))
            .count()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionRecord {
    pub norm_class: FElem,
    pub trace_class: FElem,
    pub count: usize,
    pub lines_in_class: usize,
}

/// Lines of a family grouped by `(Norm(alpha), Tr(beta))`.
struct ClassPartition {
    /// `(norm, trace)` -> member lines in canonical order.
    classes: BTreeMap<(u32, u32), Vec<Line>>,
}

fn partition_by_class(curve: &PlaneCurve, family: &ResolvedFamily) -> Result<ClassPartition> {
    let f = curve.field();
    let (norms, traces) = f.norm_trace_tables()?;
    let mut classes: BTreeMap<(u32, u32), Vec<Line>> = BTreeMap::new();
    for line in family.lines() {
        let n = norms[f.to_int(line.alpha) as usize];
        let t = traces[f.to_int(line.beta) as usize];
        classes.entry((f.to_int(n), f.to_int(t))).or_default().push(line);
    }
    Ok(ClassPartition { classes })
}

/// One intersection count per `(Norm(alpha), Tr(beta))` class, evaluated on
/// the canonically smallest member and spot-checked by brute force on
/// `spot_checks` random members.
pub fn intersection_table(
    curve: &PlaneCurve,
    family: &LineFamily,
    method: CountMethod,
    spot_checks: usize,
    seed: u64,
) -> Result<Vec<IntersectionRecord>> {
    let f = curve.field().clone();
    let resolved = family.resolve(f.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    if resolved.len() > 1 << 22 && !matches!(family, LineFamily::Explicit(_)) {
        return class_table_streaming(curve, family, method, spot_checks, &mut rng);
    }
    let part = partition_by_class(curve, &resolved)?;
    for ((n, t), lines) in part.classes {
        let rep = lines[0];
        let count = intersection_count(curve, rep, method)?;
        for &line in lines.choose_multiple(&mut rng, spot_checks) {
            let other = intersection_count(curve, line, CountMethod::Brute)?;
            if other != count {
                return Err(Error::ClassReductionUnsound {
                    alpha: f.to_int(line.alpha),
                    beta: f.to_int(line.beta),
                    found: other,
                    expected: count,
                });
            }
        }
        out.push(IntersectionRecord {
            norm_class: f.elem(n),
            trace_class: f.elem(t),
            count,
            lines_in_class: lines.len(),
        });
    }
    Ok(out)
}

/// Class table for the named families on large fields, without
/// materializing every line.
fn class_table_streaming(
    curve: &PlaneCurve,
    family: &LineFamily,
    method: CountMethod,
    spot_checks: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<IntersectionRecord>> {
    let f = curve.field().clone();
    let (norms, traces) = f.norm_trace_tables()?;
    let mut alphas: BTreeMap<u32, Vec<FElem>> = BTreeMap::new();
    for a in f.nonzero_elements() {
        alphas.entry(f.to_int(norms[f.to_int(a) as usize])).or_default().push(a);
    }
    let mut betas: BTreeMap<u32, Vec<FElem>> = BTreeMap::new();
    for b in f.elements() {
        let t = traces[f.to_int(b) as usize];
        let keep = match family {
            LineFamily::All => true,
            LineFamily::TraceZero => t.is_zero(),
            LineFamily::TraceNonzero => !t.is_zero(),
            LineFamily::Explicit(_) => unreachable!(),
        };
        if keep {
            betas.entry(f.to_int(t)).or_default().push(b);
        }
    }
    let mut out = Vec::new();
    for (&n, avec) in &alphas {
        for (&t, bvec) in &betas {
            let rep = Line::new(avec[0], bvec[0])?;
            let count = intersection_count(curve, rep, method)?;
            for _ in 0..spot_checks {
                let line = Line::new(*avec.choose(rng).unwrap(), *bvec.choose(rng).unwrap())?;
                let other = intersection_count(curve, line, CountMethod::Brute)?;
                if other != count {
                    return Err(Error::ClassReductionUnsound {
                        alpha: f.to_int(line.alpha),
                        beta: f.to_int(line.beta),
                        found: other,
                        expected: count,
                    });
                }
            }
            out.push(IntersectionRecord {
                norm_class: f.elem(n),
                trace_class: f.elem(t),
                count,
                lines_in_class: avec.len() * bvec.len(),
            });
        }
    }
    Ok(out)
}

/// Distinct intersection sizes appearing in a class table.
pub fn table_spectrum(table: &[IntersectionRecord]) -> BTreeSet<usize> {
    table.iter().map(|r| r.count).collect()
}

/// Answers `n(line)` for every line of the full family.
///
/// Norm-trace curves use the class table; other curves tally the enumerated
/// points (each point lies on exactly one line of every slope).
#[derive(Debug, Clone)]
pub struct LineCounter {
    inner: CounterKind,
    field_size: usize,
}

#[derive(Debug, Clone)]
enum CounterKind {
    Classes {
        norms: Vec<FElem>,
        traces: Vec<FElem>,
        table: HashMap<(FElem, FElem), usize>,
    },
    Dense(Vec<u32>),
}

impl LineCounter {
    pub fn new(curve: &PlaneCurve, points: &[Point], method: CountMethod) -> Result<Self> {
        let f = curve.field();
        let field_size = f.size() as usize;
        let inner = match curve.kind() {
            CurveKind::NormTrace { .. } => {
                let (norms, traces) = f.norm_trace_tables()?;
                let table = intersection_table(curve, &LineFamily::All, method, 3, 0)?
                    .into_iter()
                    .map(|r| ((r.norm_class, r.trace_class), r.count))
                    .collect();
                CounterKind::Classes { norms, traces, table }
            }
            CurveKind::Custom => Self::tally(curve, points),
        };
        Ok(LineCounter { inner, field_size })
    }

    /// Dense tally from the point set, for any curve.
    pub fn from_points(curve: &PlaneCurve, points: &[Point]) -> Self {
        LineCounter {
            inner: Self::tally(curve, points),
            field_size: curve.field().size() as usize,
        }
    }

    fn tally(curve: &PlaneCurve, points: &[Point]) -> CounterKind {
        let f = curve.field();
        let q = f.size() as usize;
        let mut counts = vec![0u32; q * q];
        for p in points {
            for a in f.nonzero_elements() {
                let beta = f.sub(p.y, f.mul(a, p.x));
                counts[f.to_int(a) as usize * q + f.to_int(beta) as usize] += 1;
            }
        }
        CounterKind::Dense(counts)
    }

    pub fn count(&self, line: &Line, curve: &PlaneCurve) -> usize {
        let f = curve.field();
        match &self.inner {
            CounterKind::Classes { norms, traces, table } => {
                let n = norms[f.to_int(line.alpha) as usize];
                let t = traces[f.to_int(line.beta) as usize];
                table[&(n, t)]
            }
            CounterKind::Dense(counts) => {
                counts[f.to_int(line.alpha) as usize * self.field_size + f.to_int(line.beta) as usize]
                    as usize
            }
        }
    }
}

/// Histogram `intersection size -> number of family lines through p`.
pub fn point_line_profile(
    curve: &PlaneCurve,
    p: Point,
    family: &ResolvedFamily,
    counter: &LineCounter,
) -> Result<BTreeMap<usize, usize>> {
    curve.check_point(p)?;
    let mut hist = BTreeMap::new();
    for line in family.lines_through(p) {
        *hist.entry(counter.count(&line, curve)).or_insert(0) += 1;
    }
    Ok(hist)
}

/// Histogram `intersection size -> number of family lines`.
pub fn line_spectrum(
    curve: &PlaneCurve,
    family: &ResolvedFamily,
    counter: &LineCounter,
) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for line in family.lines() {
        *hist.entry(counter.count(&line, curve)).or_insert(0) += 1;
    }
    hist
}

/// Groups points by identical profile: `profile -> number of points`.
pub fn profile_classes(
    curve: &PlaneCurve,
    points: &[Point],
    family: &ResolvedFamily,
    counter: &LineCounter,
) -> Result<BTreeMap<Vec<(usize, usize)>, usize>> {
    let mut out = BTreeMap::new();
    for &p in points {
        let prof: Vec<_> = point_line_profile(curve, p, family, counter)?.into_iter().collect();
        *out.entry(prof).or_insert(0) += 1;
    }
    Ok(out)
}

/// Lines whose intersection size lies in `sizes`.
pub fn lines_with_sizes(
    curve: &PlaneCurve,
    counter: &LineCounter,
    sizes: &[usize],
) -> Result<Vec<Line>> {
    let all = LineFamily::All.resolve(curve.field().clone())?;
    Ok(all
        .lines()
        .into_iter()
        .filter(|l| sizes.contains(&counter.count(l, curve)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchReport {
    pub trace_zero: bool,
    pub empirical_min: usize,
    pub bound: i64,
    pub slack: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundReport {
    pub q: u64,
    pub r: u32,
    pub branches: Vec<BranchReport>,
    /// Uniform bound over every line and the observed minimum.
    pub uniform_bound: i64,
    pub overall_min: usize,
    /// Improved trace-nonzero bound (absent when `r = gcd(r, q-1)`).
    pub trace_nonzero_uniform_bound: Option<i64>,
    pub family_size: u64,
    pub lines_per_point: u64,
}

/// Checks every class of the full family against the closed-form lower
/// bounds; a violation means the implementation is wrong.
pub fn verify_lower_bounds(
    curve: &PlaneCurve,
    table: &[IntersectionRecord],
) -> Result<LowerBoundReport> {
    let CurveKind::NormTrace { q, r } = curve.kind() else {
        return Err(Error::InvalidSpec("lower bounds apply to norm-trace curves".into()));
    };
    let f = curve.field();
    let nz_bound = bounds::trace_nonzero_bound(q, r)?;
    let z_bound = bounds::trace_zero_bound(q, r)?;
    let uniform = bounds::uniform_line_bound(q, r)?;
    let improved = bounds::uniform_trace_nonzero_bound(q, r)?;
    for rec in table {
        let tz = rec.trace_class.is_zero();
        let mut need = if tz { z_bound } else { nz_bound };
        need = need.max(uniform);
        if !tz {
            if let Some(b) = improved {
                need = need.max(b);
            }
        }
        if (rec.count as i64) < need {
            return Err(Error::BoundViolated {
                norm: f.to_int(rec.norm_class),
                trace: f.to_int(rec.trace_class),
                count: rec.count,
                bound: need,
            });
        }
    }
    let mut branches = Vec::new();
    for tz in [true, false] {
        if let Some(min) = table.iter().filter(|r| r.trace_class.is_zero() == tz).map(|r| r.count).min() {
            let bound = if tz { z_bound } else { nz_bound };
            branches.push(BranchReport {
                trace_zero: tz,
                empirical_min: min,
                bound,
                slack: min as i64 - bound,
            });
        }
    }
    Ok(LowerBoundReport {
        q,
        r,
        branches,
        uniform_bound: uniform,
        overall_min: table.iter().map(|r| r.count).min().unwrap_or(0),
        trace_nonzero_uniform_bound: improved,
        family_size: crate::lines::full_family_size(f.size() as u64),
        lines_per_point: bounds::lines_per_point(q, r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::DEFAULT_ENUMERATION_BUDGET;

    #[test]
    fn binary_counts_by_trace() {
        let c = PlaneCurve::norm_trace_qr(2, 3).unwrap();
        let f = c.field().clone();
        for a in f.nonzero_elements() {
            for b in f.elements() {
                let line = Line::new(a, b).unwrap();
                let want = if f.rel_trace(b).unwrap().is_zero() { 5 } else { 3 };
                assert_eq!(intersection_count(&c, line, CountMethod::Gcd).unwrap(), want);
                assert_eq!(intersection_count(&c, line, CountMethod::Brute).unwrap(), want);
            }
        }
    }

    #[test]
    fn x33_table() {
        let c = PlaneCurve::norm_trace_qr(3, 3).unwrap();
        let t = intersection_table(&c, &LineFamily::All, CountMethod::Gcd, 3, 1).unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(table_spectrum(&t), BTreeSet::from([7, 10, 13]));
        assert_eq!(t.iter().map(|r| r.lines_in_class).sum::<usize>(), 26 * 27);
        let rep = verify_lower_bounds(&c, &t).unwrap();
        assert_eq!(rep.overall_min, 7);
    }

    #[test]
    fn custom_curve_through_class_path_is_flagged() {
        // y^2 = x^3 + x over GF(9) with a declared tower; lines in one
        // (Norm, Tr) class need not meet it equally often.
        let f = std::sync::Arc::new(crate::field::FieldCtx::tower(3, 2).unwrap());
        let mut eq = crate::bipoly::BiPoly::zero();
        eq.add_term(0, 2, FElem::ONE, &f);
        eq.add_term(3, 0, f.neg(FElem::ONE), &f);
        eq.add_term(1, 0, f.neg(FElem::ONE), &f);
        let c = PlaneCurve::custom(f, eq).unwrap();
        let res = intersection_table(&c, &LineFamily::All, CountMethod::Gcd, 40, 0);
        assert!(matches!(res, Err(Error::ClassReductionUnsound { .. })), "{res:?}");
    }

    #[test]
    fn counter_agrees_with_direct_counts() {
        let c = PlaneCurve::norm_trace_qr(3, 2).unwrap();
        let pts = c.enumerate_points(DEFAULT_ENUMERATION_BUDGET).unwrap();
        let by_class = LineCounter::new(&c, &pts, CountMethod::Gcd).unwrap();
        let dense = LineCounter::from_points(&c, &pts);
        let all = LineFamily::All.resolve(c.field().clone()).unwrap();
        for l in all.lines() {
            let direct = intersection_count(&c, l, CountMethod::Brute).unwrap();
            assert_eq!(by_class.count(&l, &c), direct);
            assert_eq!(dense.count(&l, &c), direct);
        }
    }

    #[test]
    fn profile_rejects_off_curve_point() {
        let c = PlaneCurve::norm_trace_qr(2, 3).unwrap();
        let pts = c.enumerate_points(DEFAULT_ENUMERATION_BUDGET).unwrap();
        let counter = LineCounter::new(&c, &pts, CountMethod::Gcd).unwrap();
        let all = LineFamily::All.resolve(c.field().clone()).unwrap();
        let f = c.field();
        let off = f
            .elements()
            .map(|y| Point { x: FElem::ONE, y })
            .find(|&p| !c.contains(p))
            .unwrap();
        assert!(matches!(
            point_line_profile(&c, off, &all, &counter),
            Err(Error::PointNotOnCurve(..))
        ));
        let hist = point_line_profile(&c, pts[3], &all, &counter).unwrap();
        assert_eq!(hist.values().sum::<usize>(), 7);
    }
}
