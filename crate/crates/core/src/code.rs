//! Curve-lifted codes: good-monomial classification, generator matrices in
//! monomial and exact mode, parameter reports and the JSON artifact.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bipoly::BiPoly;
use crate::bounds;
use crate::curve::{CurveKind, CurveSpec, PlaneCurve, Point, DEFAULT_ENUMERATION_BUDGET};
use crate::error::{Error, Result};
use crate::field::{FElem, FieldCtx};
use crate::linalg::{Matrix, Rref};
use crate::lines::{FamilySpec, Line, LineFamily, ResolvedFamily};
use crate::poly::UniPoly;
use crate::repair::{availability_audit, RepairIndex};

/// `x^a y^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub a: u64,
    pub b: u64,
}

impl Monomial {
    pub fn new(a: u64, b: u64) -> Self {
        Monomial { a, b }
    }

    pub fn degree(&self) -> u64 {
        self.a + self.b
    }

    pub fn to_bipoly(&self) -> BiPoly {
        BiPoly::monomial(self.a, self.b)
    }

    pub fn eval(&self, p: Point, f: &FieldCtx) -> FElem {
        f.mul(f.pow(p.x, self.a as u128), f.pow(p.y, self.b as u128))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonomialStatus {
    Typical,
    Sporadic,
    NotGood,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialClass {
    pub monomial: Monomial,
    pub status: MonomialStatus,
    /// Largest `deg_{alpha,beta}` over the family; `-1` when every
    /// reduction vanishes.
    pub worst_line_degree: i64,
}

impl MonomialClass {
    pub fn is_good(&self) -> bool {
        self.status != MonomialStatus::NotGood
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeMode {
    #[default]
    Monomial,
    Exact,
}

#[derive(Debug, Clone)]
pub struct CodePlan {
    pub curve: PlaneCurve,
    pub family: LineFamily,
    pub b: i64,
    pub mode: CodeMode,
}

impl CodePlan {
    pub fn new(curve: PlaneCurve, family: LineFamily, b: i64, mode: CodeMode) -> Self {
        CodePlan { curve, family, b, mode }
    }

    fn check_nondegenerate(&self) -> Result<usize> {
        if self.b <= 2 {
            Err(Error::DegeneratePlan(self.b))
        } else {
            Ok(self.b as usize)
        }
    }
}

/// `f(x, alpha x + beta) mod m_{alpha,beta}`.
pub fn reduce_on_line(f: &BiPoly, curve: &PlaneCurve, line: Line) -> Result<UniPoly> {
    let field = curve.field();
    f.check(field)?;
    field.check(line.alpha)?;
    field.check(line.beta)?;
    let m = curve.restrict_to_line(line);
    f.substitute_line(line.alpha, line.beta, field).rem(&m, field)
}

/// Monomials of the representative range: `a < (q^r-1)/(q-1)`,
/// `b < q^(r-1)` for norm-trace curves, `a, b < Q` otherwise.
pub fn representative_box(curve: &PlaneCurve) -> Vec<Monomial> {
    let (amax, bmax) = match curve.kind() {
        CurveKind::NormTrace { q, r } => ((q.pow(r) - 1) / (q - 1), q.pow(r - 1)),
        CurveKind::Custom => {
            let s = curve.field().size() as u64;
            (s, s)
        }
    };
    (0..amax)
        .flat_map(|a| (0..bmax).map(move |b| Monomial::new(a, b)))
        .collect()
}

/// Multiplication by `x` and by `alpha x + beta` modulo a fixed `m`, on
/// dense vectors of length `deg m`.
struct LineReducer {
    d: usize,
    /// Nonzero `(i, c_i)` of the monic `m`, below the leading term.
    tail: Vec<(usize, FElem)>,
}

impl LineReducer {
    fn new(m: &UniPoly, f: &FieldCtx) -> Result<Self> {
        if m.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        let m = m.monic(f);
        let d = m.degree() as usize;
        let tail = m.coeffs()[..d]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (i, c))
            .collect();
        Ok(LineReducer { d, tail })
    }

    fn mul_x(&self, v: &mut [FElem], f: &FieldCtx) {
        if self.d == 0 {
            return;
        }
        let top = v[self.d - 1];
        v.copy_within(0..self.d - 1, 1);
        v[0] = FElem::ZERO;
        if !top.is_zero() {
            for &(i, c) in &self.tail {
                v[i] = f.sub_mul(v[i], top, c);
            }
        }
    }

    fn mul_linear(&self, v: &[FElem], alpha: FElem, beta: FElem, f: &FieldCtx) -> Vec<FElem> {
        let mut shifted = v.to_vec();
        self.mul_x(&mut shifted, f);
        shifted
            .iter()
            .zip(v)
            .map(|(&s, &w)| f.add(f.mul(alpha, s), f.mul(beta, w)))
            .collect()
    }

    fn unit(&self) -> Vec<FElem> {
        let mut v = vec![FElem::ZERO; self.d];
        if self.d > 0 {
            v[0] = FElem::ONE;
        }
        v
    }
}

fn dense_degree(v: &[FElem]) -> i64 {
    v.iter().rposition(|c| !c.is_zero()).map_or(-1, |i| i as i64)
}

/// Reductions of every box monomial on one line, in box order, passed to
/// `visit` as dense coefficient vectors of length `deg m`.
fn for_each_reduction(
    curve: &PlaneCurve,
    line: Line,
    box_: &[Monomial],
    mut visit: impl FnMut(usize, &[FElem]),
) -> Result<()> {
    let f = &**curve.field();
    let red = LineReducer::new(&curve.restrict_to_line(line), f)?;
    // box is a-major with contiguous b runs; precompute (alpha x+beta)^b
    let bmax = box_.iter().map(|m| m.b).max().unwrap_or(0) as usize;
    let mut pb = Vec::with_capacity(bmax + 1);
    pb.push(red.unit());
    for b in 1..=bmax {
        let next = red.mul_linear(&pb[b - 1], line.alpha, line.beta, f);
        pb.push(next);
    }
    // walk a upward per b
    let mut by_b: BTreeMap<u64, Vec<(u64, usize)>> = BTreeMap::new();
    for (idx, m) in box_.iter().enumerate() {
        by_b.entry(m.b).or_default().push((m.a, idx));
    }
    for (b, mut entries) in by_b {
        entries.sort_unstable();
        let mut cur = pb[b as usize].clone();
        let mut a_now = 0u64;
        for (a, idx) in entries {
            while a_now < a {
                red.mul_x(&mut cur, f);
                a_now += 1;
            }
            visit(idx, &cur);
        }
    }
    Ok(())
}

/// Classifies every box monomial by its worst reduction degree over all
/// family lines. Reductions are not constant on `(Norm, Tr)` classes, so
/// every line is visited.
pub fn classify_monomials(plan: &CodePlan) -> Result<Vec<MonomialClass>> {
    let b = plan.check_nondegenerate()?;
    let box_ = representative_box(&plan.curve);
    let family = plan.family.resolve(plan.curve.field().clone())?;
    let mut worst = vec![-1i64; box_.len()];
    for line in family.lines() {
        for_each_reduction(&plan.curve, line, &box_, |idx, v| {
            let d = dense_degree(v);
            if d > worst[idx] {
                worst[idx] = d;
            }
        })?;
    }
    let classes: Vec<MonomialClass> = box_
        .iter()
        .zip(worst)
        .map(|(&monomial, w)| MonomialClass {
            monomial,
            status: status_for(monomial, w, b),
            worst_line_degree: w,
        })
        .collect();
    spot_check_classes(plan, &family, &classes, 0.1, 0)?;
    Ok(classes)
}

fn status_for(m: Monomial, worst: i64, b: usize) -> MonomialStatus {
    let limit = b as i64 - 2;
    if worst > limit {
        MonomialStatus::NotGood
    } else if m.degree() as i64 <= limit {
        MonomialStatus::Typical
    } else {
        MonomialStatus::Sporadic
    }
}

/// Re-derives good monomials on a random fraction of family lines through
/// plain substitution and division.
pub fn spot_check_classes(
    plan: &CodePlan,
    family: &ResolvedFamily,
    classes: &[MonomialClass],
    fraction: f64,
    seed: u64,
) -> Result<()> {
    let limit = plan.b - 2;
    let lines = family.lines();
    let take = ((lines.len() as f64 * fraction).ceil() as usize).min(lines.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &line in lines.choose_multiple(&mut rng, take) {
        for c in classes.iter().filter(|c| c.is_good()) {
            let r = reduce_on_line(&c.monomial.to_bipoly(), &plan.curve, line)?;
            if r.degree() as i64 > limit {
                return Err(Error::InvalidSpec(format!(
                    "classification disagrees with direct reduction for x^{} y^{}",
                    c.monomial.a, c.monomial.b
                )));
            }
        }
    }
    Ok(())
}

/// Worst reduction degree of one monomial (inside or outside the box) over
/// the family.
pub fn worst_line_degree(plan: &CodePlan, m: Monomial) -> Result<i64> {
    let family = plan.family.resolve(plan.curve.field().clone())?;
    let mut worst = -1;
    for line in family.lines() {
        let mut w = -1;
        for_each_reduction(&plan.curve, line, &[m], |_, v| w = dense_degree(v))?;
        worst = worst.max(w);
    }
    Ok(worst)
}

/// Evaluation vector of a monomial at `points`.
pub fn evaluate(m: Monomial, points: &[Point], f: &FieldCtx) -> Vec<FElem> {
    points.iter().map(|&p| m.eval(p, f)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub monomial_k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_k: Option<usize>,
    pub locality: usize,
    pub availability: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_availability: Option<usize>,
    pub rate: f64,
}

#[derive(Debug, Clone)]
pub struct LiftedCode {
    pub plan: CodePlan,
    pub points: Vec<Point>,
    /// `k x n`, full row rank.
    pub generator: Matrix,
    pub good_monomials: Vec<MonomialClass>,
    pub params: CodeParams,
    rref: Rref,
}

impl LiftedCode {
    pub fn field(&self) -> &Arc<FieldCtx> {
        self.plan.curve.field()
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn k(&self) -> usize {
        self.generator.len()
    }

    pub fn locality(&self) -> usize {
        self.plan.b as usize - 1
    }

    pub fn row_space(&self) -> &Rref {
        &self.rref
    }

    /// Whether `word` is a codeword.
    pub fn contains(&self, word: &[FElem]) -> Result<bool> {
        membership_test(self, word)
    }
}

/// Builds the code: checks the locality condition on every family line
/// that meets the curve, classifies monomials, assembles the generator and
/// audits availability.
pub fn build_code(plan: CodePlan) -> Result<LiftedCode> {
    build_code_with_budget(plan, DEFAULT_ENUMERATION_BUDGET)
}

pub fn build_code_with_budget(plan: CodePlan, budget: u64) -> Result<LiftedCode> {
    let b = plan.check_nondegenerate()?;
    let f = plan.curve.field().clone();
    let points = plan.curve.enumerate_points(budget)?;
    let family = plan.family.resolve(f.clone())?;
    let index = RepairIndex::from_parts(&plan.curve, &points, &family, b)?;
    if let Some((line, count)) = index.smallest_line() {
        if count < b {
            return Err(Error::LocalityUnsatisfiable {
                alpha: f.to_int(line.alpha),
                beta: f.to_int(line.beta),
                count,
                b,
            });
        }
    }
    let classes = classify_monomials(&plan)?;
    let good: Vec<MonomialClass> = classes.into_iter().filter(|c| c.is_good()).collect();
    let n = points.len();

    let (mono_rows, mono_rank) = monomial_rows(&plan.curve, &good, &points)?;
    let (generator, exact_k) = match plan.mode {
        CodeMode::Monomial => (mono_rows, None),
        CodeMode::Exact => {
            let rows = exact_rows(&plan, &family, &points)?;
            let k = rows.len();
            (rows, Some(k))
        }
    };
    let rref = Rref::new(generator.clone(), n, &f)?;
    if rref.rank() != generator.len() {
        return Err(Error::RankDeficient { expected: generator.len(), got: rref.rank() });
    }
    let audit = availability_audit(&index);
    let k = generator.len();
    let params = CodeParams {
        n,
        k,
        monomial_k: mono_rank,
        exact_k,
        locality: b - 1,
        availability: audit.minimum,
        claimed_availability: claimed_availability(&plan),
        rate: if n == 0 { 0.0 } else { k as f64 / n as f64 },
    };
    Ok(LiftedCode {
        plan,
        points,
        generator,
        good_monomials: good,
        params,
        rref,
    })
}

/// Evaluations of the good monomials. For norm-trace curves these are
/// independent and a shortfall is an error; for other curves dependent
/// evaluations are dropped greedily in monomial order.
fn monomial_rows(
    curve: &PlaneCurve,
    good: &[MonomialClass],
    points: &[Point],
) -> Result<(Matrix, usize)> {
    let f = &**curve.field();
    let rows: Matrix = good.iter().map(|c| evaluate(c.monomial, points, f)).collect();
    if curve.is_norm_trace() {
        let rank = crate::linalg::rank(&rows, points.len(), f)?;
        if rank != rows.len() {
            return Err(Error::RankDeficient { expected: rows.len(), got: rank });
        }
        let k = rows.len();
        return Ok((rows, k));
    }
    let mut kept = Vec::new();
    let mut basis = Rref::new(Vec::new(), points.len(), f)?;
    for row in rows {
        if !basis.contains(&row, f)? {
            kept.push(row);
            basis = Rref::new(kept.clone(), points.len(), f)?;
            if kept.len() == points.len() {
                break;
            }
        }
    }
    let k = kept.len();
    Ok((kept, k))
}

/// Generator of the full curve-lifted code inside the span of the box: the
/// kernel of the constraints "coefficients `t^(B-1) .. t^(deg m - 1)` of the
/// reduction vanish" over every family line.
fn exact_rows(plan: &CodePlan, family: &ResolvedFamily, points: &[Point]) -> Result<Matrix> {
    let f = &**plan.curve.field();
    let b = plan.b as usize;
    let box_ = representative_box(&plan.curve);
    let ncols = box_.len();
    let mut echelon = Echelon::new(ncols);
    for line in family.lines() {
        if echelon.is_full() {
            break;
        }
        let mut reductions: Vec<Vec<FElem>> = vec![Vec::new(); ncols];
        for_each_reduction(&plan.curve, line, &box_, |idx, v| reductions[idx] = v.to_vec())?;
        let d = reductions.first().map_or(0, |v| v.len());
        for j in (b - 1)..d {
            let row: Vec<FElem> = reductions.iter().map(|v| v[j]).collect();
            echelon.insert(row, f);
        }
    }
    let rref = Rref::new(echelon.rows, ncols, f)?;
    let kernel = rref.kernel(f);
    let evals: Matrix = box_.iter().map(|&m| evaluate(m, points, f)).collect();
    let mut rows = Vec::with_capacity(kernel.len());
    for v in kernel {
        rows.push(crate::linalg::vec_mat(&v, &evals, points.len(), f)?);
    }
    // drop evaluation dependencies (possible only for custom curves)
    let r = Rref::new(rows.clone(), points.len(), f)?;
    if r.rank() == rows.len() {
        Ok(rows)
    } else {
        Ok(r.rows)
    }
}

/// Row-echelon accumulator that rejects dependent rows on insertion.
struct Echelon {
    rows: Matrix,
    pivots: Vec<usize>,
    ncols: usize,
}

impl Echelon {
    fn new(ncols: usize) -> Self {
        Echelon { rows: Vec::new(), pivots: Vec::new(), ncols }
    }

    fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    fn insert(&mut self, mut row: Vec<FElem>, f: &FieldCtx) -> bool {
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            let c = row[p];
            if !c.is_zero() {
                for (x, &y) in row.iter_mut().zip(r).skip(p) {
                    *x = f.sub_mul(*x, c, y);
                }
            }
        }
        let Some(p) = row.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = f.inv(row[p]).expect("nonzero pivot");
        for x in row.iter_mut() {
            *x = f.mul(*x, inv);
        }
        // keep pivots sorted so reduction order stays valid
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, row);
        true
    }
}

/// Availability stated in closed form, where one exists.
pub fn claimed_availability(plan: &CodePlan) -> Option<usize> {
    let CurveKind::NormTrace { q, r } = plan.curve.kind() else {
        return None;
    };
    match plan.family {
        LineFamily::All => Some(bounds::lines_per_point(q, r) as usize),
        LineFamily::TraceNonzero => Some((q.pow(r) - q.pow(r - 1) - 2) as usize),
        _ => None,
    }
}

/// Where a choice of `B` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BSource {
    /// Exact intersection numbers of binary norm-trace curves.
    BinaryExact,
    /// Closed-form lower bound for the family.
    LowerBound,
    /// Smallest intersection number measured over the family.
    Measured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AutoB {
    pub value: i64,
    pub source: BSource,
    pub degenerate: bool,
}

/// Picks `B` for a plan. Degenerate choices (`B <= 2`) are reported, not
/// rejected; building with one fails with `DegeneratePlan`.
pub fn auto_b(curve: &PlaneCurve, family: &LineFamily) -> Result<AutoB> {
    let (value, source) = match (curve.kind(), family) {
        (CurveKind::NormTrace { q: 2, r }, LineFamily::TraceZero) => {
            (2i64.pow(r - 1) + 1, BSource::BinaryExact)
        }
        (CurveKind::NormTrace { q: 2, r }, LineFamily::All | LineFamily::TraceNonzero) => {
            (2i64.pow(r - 1) - 1, BSource::BinaryExact)
        }
        (CurveKind::NormTrace { q, r }, LineFamily::All) => (bounds::bound_b(q, r, false)?, BSource::LowerBound),
        (CurveKind::NormTrace { q, r }, LineFamily::TraceNonzero) => {
            (bounds::bound_b(q, r, true)?, BSource::LowerBound)
        }
        (CurveKind::NormTrace { q, r }, LineFamily::TraceZero) => {
            (bounds::trace_zero_bound(q, r)?, BSource::LowerBound)
        }
        _ => (measured_min(curve, family)? as i64, BSource::Measured),
    };
    Ok(AutoB { value, source, degenerate: value <= 2 })
}

/// Smallest intersection number over family lines that meet the curve.
pub fn measured_min(curve: &PlaneCurve, family: &LineFamily) -> Result<usize> {
    let points = curve.enumerate_points(DEFAULT_ENUMERATION_BUDGET)?;
    let resolved = family.resolve(curve.field().clone())?;
    let index = RepairIndex::from_parts(curve, &points, &resolved, usize::MAX)?;
    Ok(index.smallest_line().map_or(0, |(_, c)| c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterReport {
    pub n: usize,
    pub k: usize,
    pub monomial_k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_k: Option<usize>,
    pub locality: usize,
    pub availability: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_availability: Option<usize>,
    pub rate: f64,
    pub typical: usize,
    pub sporadic: usize,
    /// `(B-1)B/2`, the number of monomials with `a + b <= B - 2`.
    pub typical_count_formula: usize,
    /// `M(M+1)/2` with `M = q^(r-1) - (r-1)(q-1) q^((r-2)/2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form_dimension: Option<f64>,
}

pub fn parameter_report(code: &LiftedCode) -> ParameterReport {
    let p = &code.params;
    let count = |s| code.good_monomials.iter().filter(|c| c.status == s).count();
    let b = code.plan.b as usize;
    let closed = match code.plan.curve.kind() {
        CurveKind::NormTrace { q, r } => {
            let (qf, rf) = (q as f64, r as f64);
            let m = qf.powf(rf - 1.0) - (rf - 1.0) * (qf - 1.0) * qf.powf((rf - 2.0) / 2.0);
            Some(m * (m + 1.0) / 2.0)
        }
        CurveKind::Custom => None,
    };
    ParameterReport {
        n: p.n,
        k: p.k,
        monomial_k: p.monomial_k,
        exact_k: p.exact_k,
        locality: p.locality,
        availability: p.availability,
        claimed_availability: p.claimed_availability,
        rate: p.rate,
        typical: count(MonomialStatus::Typical),
        sporadic: count(MonomialStatus::Sporadic),
        typical_count_formula: (b - 1) * b / 2,
        closed_form_dimension: closed,
    }
}

/// Whether `word` lies in the row space of the generator.
pub fn membership_test(code: &LiftedCode, word: &[FElem]) -> Result<bool> {
    if word.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), got: word.len() });
    }
    let f = code.field();
    for &w in word {
        f.check(w)?;
    }
    code.rref.contains(word, f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSpec {
    pub curve: CurveSpec,
    pub family: FamilySpec,
    #[serde(rename = "B")]
    pub b: i64,
    pub mode: CodeMode,
}

/// On-disk form of a built code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeArtifact {
    pub plan: PlanSpec,
    pub points: Vec<[u32; 2]>,
    pub good_monomials: Vec<(u64, u64, MonomialStatus)>,
    pub generator: Vec<Vec<u32>>,
    pub params: CodeParams,
}

impl CodeArtifact {
    pub fn from_code(code: &LiftedCode) -> Self {
        let f = code.field();
        CodeArtifact {
            plan: PlanSpec {
                curve: code.plan.curve.spec(),
                family: code.plan.family.spec(f),
                b: code.plan.b,
                mode: code.plan.mode,
            },
            points: code.points.iter().map(|p| [f.to_int(p.x), f.to_int(p.y)]).collect(),
            good_monomials: code
                .good_monomials
                .iter()
                .map(|c| (c.monomial.a, c.monomial.b, c.status))
                .collect(),
            generator: code
                .generator
                .iter()
                .map(|row| row.iter().map(|&v| f.to_int(v)).collect())
                .collect(),
            params: code.params.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("artifact serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    /// Rebuilds the code without reclassifying.
    pub fn into_code(self) -> Result<LiftedCode> {
        let curve = PlaneCurve::from_spec(&self.plan.curve, None)?;
        let f = curve.field().clone();
        let family = LineFamily::from_spec(&self.plan.family, &f)?;
        let points = self
            .points
            .iter()
            .map(|&[x, y]| {
                let p = Point { x: f.from_int(x)?, y: f.from_int(y)? };
                curve.check_point(p)?;
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        let generator = self
            .generator
            .iter()
            .map(|row| row.iter().map(|&v| f.from_int(v)).collect::<Result<Vec<_>>>())
            .collect::<Result<Matrix>>()?;
        let rref = Rref::new(generator.clone(), points.len(), &f)?;
        if rref.rank() != generator.len() {
            return Err(Error::RankDeficient { expected: generator.len(), got: rref.rank() });
        }
        let b = self.plan.b;
        let good_monomials = self
            .good_monomials
            .iter()
            .map(|&(a, bb, status)| MonomialClass {
                monomial: Monomial::new(a, bb),
                status,
                worst_line_degree: -1,
            })
            .collect();
        Ok(LiftedCode {
            plan: CodePlan::new(curve, family, b, self.plan.mode),
            points,
            generator,
            good_monomials,
            params: self.params,
            rref,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(q: u64, r: u32, family: LineFamily, b: i64) -> CodePlan {
        CodePlan::new(PlaneCurve::norm_trace_qr(q, r).unwrap(), family, b, CodeMode::Monomial)
    }

    #[test]
    fn reduce_constant_and_low_power() {
        let c = PlaneCurve::norm_trace_qr(2, 3).unwrap();
        let f = c.field().clone();
        let l10 = Line::new(FElem::ONE, FElem::ZERO).unwrap();
        let one = reduce_on_line(&BiPoly::constant(FElem::ONE), &c, l10).unwrap();
        assert_eq!(one.degree(), 0);
        let x2y = reduce_on_line(&BiPoly::monomial(2, 1), &c, l10).unwrap();
        assert_eq!(x2y.degree(), 3);
        let x7 = reduce_on_line(&BiPoly::monomial(7, 0), &c, l10).unwrap();
        assert_eq!(x7.to_ints(&f), vec![0, 1, 1, 0, 1]);
    }

    #[test]
    fn foreign_coefficients_rejected() {
        let c = PlaneCurve::norm_trace_qr(2, 2).unwrap();
        let big = FieldCtx::new(2, 5, None).unwrap();
        let mut p = BiPoly::zero();
        p.add_term(1, 0, big.elem(30), &big);
        let l = Line::new(FElem::ONE, FElem::ZERO).unwrap();
        assert!(matches!(reduce_on_line(&p, &c, l), Err(Error::ContextMismatch(_))));
    }

    #[test]
    fn incremental_reductions_match_direct() {
        let c = PlaneCurve::norm_trace_qr(3, 2).unwrap();
        let f = c.field().clone();
        let box_ = representative_box(&c);
        assert_eq!(box_.len(), 4 * 3);
        for a in f.nonzero_elements().step_by(3) {
            for beta in f.elements() {
                let line = Line::new(a, beta).unwrap();
                let mut got = vec![UniPoly::zero(); box_.len()];
                for_each_reduction(&c, line, &box_, |i, v| got[i] = UniPoly::from_coeffs(v.to_vec()))
                    .unwrap();
                for (m, g) in box_.iter().zip(&got) {
                    assert_eq!(&reduce_on_line(&m.to_bipoly(), &c, line).unwrap(), g);
                }
            }
        }
    }

    #[test]
    fn degenerate_plan_rejected() {
        let p = plan(3, 3, LineFamily::All, 1);
        assert_eq!(classify_monomials(&p).unwrap_err(), Error::DegeneratePlan(1));
        assert!(matches!(build_code(p), Err(Error::DegeneratePlan(1))));
    }

    #[test]
    fn too_large_b_is_unsatisfiable() {
        let p = plan(2, 3, LineFamily::All, 5);
        assert!(matches!(build_code(p), Err(Error::LocalityUnsatisfiable { count: 3, b: 5, .. })));
    }

    #[test]
    fn binary_r3_code() {
        let code = build_code(plan(2, 3, LineFamily::All, 3)).unwrap();
        assert_eq!(code.params.n, 32);
        assert_eq!(code.params.k, 3);
        assert_eq!(code.params.locality, 2);
        assert_eq!(code.params.availability, 7);
        let rep = parameter_report(&code);
        assert_eq!(rep.sporadic, 0);
        assert_eq!(rep.typical_count_formula, 3);
    }

    #[test]
    fn exact_mode_contains_monomial_mode() {
        let mono = build_code(plan(2, 3, LineFamily::TraceZero, 5)).unwrap();
        let mut p = plan(2, 3, LineFamily::TraceZero, 5);
        p.mode = CodeMode::Exact;
        let exact = build_code(p).unwrap();
        assert!(exact.k() >= mono.k());
        for row in &mono.generator {
            assert!(exact.contains(row).unwrap());
        }
    }

    #[test]
    fn membership_length_checked() {
        let code = build_code(plan(2, 3, LineFamily::All, 3)).unwrap();
        assert!(matches!(
            membership_test(&code, &[FElem::ZERO; 3]),
            Err(Error::LengthMismatch { expected: 32, got: 3 })
        ));
        assert!(membership_test(&code, &[FElem::ZERO; 32]).unwrap());
    }

    #[test]
    fn artifact_round_trip() {
        let code = build_code(plan(2, 3, LineFamily::All, 3)).unwrap();
        let art = CodeArtifact::from_code(&code);
        let json = art.to_json();
        let back = CodeArtifact::from_json(&json).unwrap();
        assert_eq!(back, art);
        let rebuilt = back.into_code().unwrap();
        assert_eq!(CodeArtifact::from_code(&rebuilt).to_json(), json);
    }

    #[test]
    fn auto_b_choices() {
        let c = PlaneCurve::norm_trace_qr(2, 4).unwrap();
        assert_eq!(auto_b(&c, &LineFamily::All).unwrap().value, 7);
        assert_eq!(auto_b(&c, &LineFamily::TraceZero).unwrap().value, 9);
        let c = PlaneCurve::norm_trace_qr(3, 3).unwrap();
        let a = auto_b(&c, &LineFamily::All).unwrap();
        assert_eq!((a.value, a.degenerate), (1, true));
        assert_eq!(measured_min(&c, &LineFamily::All).unwrap(), 7);
    }
}
