//! Encoding, erasures, and single-symbol repair by interpolation along the
//! family lines through an erased position.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::code::LiftedCode;
use crate::curve::{PlaneCurve, Point};
use crate::error::{Error, Result};
use crate::field::{FElem, FieldCtx};
use crate::linalg::vec_mat;
use crate::lines::{Line, ResolvedFamily};

/// A received word: `None` marks an erasure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub symbols: Vec<Option<FElem>>,
}

impl Codeword {
    pub fn from_symbols(symbols: &[FElem]) -> Self {
        Codeword { symbols: symbols.iter().map(|&s| Some(s)).collect() }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn erased(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.symbols[i].is_none()).collect()
    }

    /// The symbols, if none is erased.
    pub fn complete(&self) -> Option<Vec<FElem>> {
        self.symbols.iter().copied().collect()
    }

    /// Header `s0,..,s{n-1}` and one row; erasures are written as `?`.
    pub fn to_csv(&self, f: &FieldCtx) -> String {
        let header: Vec<String> = (0..self.len()).map(|i| format!("s{i}")).collect();
        let row: Vec<String> = self
            .symbols
            .iter()
            .map(|s| s.map_or("?".to_string(), |v| f.to_int(v).to_string()))
            .collect();
        format!("{}\n{}\n", header.join(","), row.join(","))
    }

    pub fn from_csv(s: &str, f: &FieldCtx) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::InvalidSpec("empty codeword file".into()))?;
        let row = lines.next().ok_or_else(|| Error::InvalidSpec("codeword file has no data row".into()))?;
        let symbols = row
            .split(',')
            .map(|tok| match tok.trim() {
                "?" => Ok(None),
                t => {
                    let v: u32 = t
                        .parse()
                        .map_err(|_| Error::InvalidSpec(format!("bad symbol '{t}'")))?;
                    Ok(Some(f.from_int(v)?))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let width = header.split(',').count();
        if width != symbols.len() {
            return Err(Error::LengthMismatch { expected: width, got: symbols.len() });
        }
        Ok(Codeword { symbols })
    }
}

/// `message * G`.
pub fn encode(code: &LiftedCode, message: &[FElem]) -> Result<Codeword> {
    let f = code.field();
    for &m in message {
        f.check(m)?;
    }
    let word = vec_mat(message, &code.generator, code.n(), f)?;
    Ok(Codeword::from_symbols(&word))
}

/// Marks `positions` erased.
pub fn erase(cw: &Codeword, positions: &[usize]) -> Result<Codeword> {
    let mut out = cw.clone();
    for &i in positions {
        if i >= cw.len() {
            return Err(Error::IndexOutOfRange { index: i, len: cw.len() });
        }
        out.symbols[i] = None;
    }
    Ok(out)
}

/// Erases `count` distinct positions chosen by a seeded generator.
pub fn erase_random(cw: &Codeword, count: usize, seed: u64) -> Result<Codeword> {
    if count > cw.len() {
        return Err(Error::IndexOutOfRange { index: count, len: cw.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = sample(&mut rng, cw.len(), count).into_vec();
    picked.sort_unstable();
    erase(cw, &picked)
}

/// Family lines that meet the curve, with the positions on each, and the
/// lines through each position.
#[derive(Debug, Clone)]
pub struct RepairIndex {
    field: std::sync::Arc<FieldCtx>,
    b: usize,
    points: Vec<Point>,
    /// Canonical `(alpha, beta)` order; positions sorted by x.
    lines: Vec<(Line, Vec<usize>)>,
    /// Per position, indices into `lines` in canonical line order.
    through: Vec<Vec<usize>>,
}

impl RepairIndex {
    pub fn new(code: &LiftedCode) -> Result<Self> {
        let family = code.plan.family.resolve(code.field().clone())?;
        Self::from_parts(&code.plan.curve, &code.points, &family, code.plan.b as usize)
    }

    pub fn from_parts(
        curve: &PlaneCurve,
        points: &[Point],
        family: &ResolvedFamily,
        b: usize,
    ) -> Result<Self> {
        let f = curve.field().clone();
        let mut buckets: HashMap<(u32, u32), (Line, Vec<usize>)> = HashMap::new();
        for (i, &p) in points.iter().enumerate() {
            curve.check_point(p)?;
            for line in family.lines_through(p) {
                buckets.entry(line.key(&f)).or_insert_with(|| (line, Vec::new())).1.push(i);
            }
        }
        let mut lines: Vec<((u32, u32), (Line, Vec<usize>))> = buckets.into_iter().collect();
        lines.sort_unstable_by_key(|(k, _)| *k);
        let mut through = vec![Vec::new(); points.len()];
        let lines: Vec<(Line, Vec<usize>)> = lines
            .into_iter()
            .enumerate()
            .map(|(li, (_, (line, mut pos)))| {
                pos.sort_unstable_by_key(|&i| f.to_int(points[i].x));
                for &i in &pos {
                    through[i].push(li);
                }
                (line, pos)
            })
            .collect();
        Ok(RepairIndex {
            field: f,
            b,
            points: points.to_vec(),
            lines,
            through,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The family line meeting the curve in the fewest (but at least one)
    /// points, smallest `(alpha, beta)` among ties.
    pub fn smallest_line(&self) -> Option<(Line, usize)> {
        self.lines
            .iter()
            .min_by_key(|(l, pos)| (pos.len(), l.key(&self.field)))
            .map(|(l, pos)| (*l, pos.len()))
    }

    /// Lines through position `i` with the curve positions on each.
    pub fn lines_through(&self, i: usize) -> impl Iterator<Item = (Line, &[usize])> + '_ {
        self.through[i].iter().map(move |&li| (self.lines[li].0, self.lines[li].1.as_slice()))
    }

    /// Recovery sets for `i` assuming nothing else is erased: the `B-1`
    /// smallest-x other points of every line carrying at least `B` points.
    pub fn plan(&self, i: usize) -> Result<RepairPlan> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.len() });
        }
        let need = self.b - 1;
        let candidate_sets = self
            .lines_through(i)
            .filter(|(_, pos)| pos.len() > need)
            .map(|(line, pos)| {
                let set: Vec<usize> = pos.iter().copied().filter(|&j| j != i).take(need).collect();
                let weights = lagrange_weights(&self.points, &set, self.points[i].x, &self.field);
                LineRepair { line, read: set, weights }
            })
            .collect();
        Ok(RepairPlan { position: i, candidate_sets })
    }
}

/// One recovery set together with its interpolation weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineRepair {
    pub line: Line,
    pub read: Vec<usize>,
    pub weights: Vec<FElem>,
}

impl LineRepair {
    /// Repaired value from the symbols at `read`.
    pub fn apply(&self, cw: &Codeword, f: &FieldCtx) -> Result<FElem> {
        let mut acc = FElem::ZERO;
        for (&j, &w) in self.read.iter().zip(&self.weights) {
            let s = cw.symbols[j].ok_or(Error::NoViableLine(j))?;
            acc = f.add(acc, f.mul(w, s));
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairPlan {
    pub position: usize,
    pub candidate_sets: Vec<LineRepair>,
}

/// Weights `w_j` with `g(x0) = sum w_j g(x_j)` for every `g` of degree
/// below `nodes.len()`.
fn lagrange_weights(points: &[Point], nodes: &[usize], x0: FElem, f: &FieldCtx) -> Vec<FElem> {
    nodes
        .iter()
        .map(|&j| {
            let xj = points[j].x;
            let mut num = FElem::ONE;
            let mut den = FElem::ONE;
            for &k in nodes {
                if k != j {
                    let xk = points[k].x;
                    num = f.mul(num, f.sub(x0, xk));
                    den = f.mul(den, f.sub(xj, xk));
                }
            }
            f.div(num, den).expect("distinct x on a non-vertical line")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairOutcome {
    pub value: FElem,
    pub line: Line,
    pub read: Vec<usize>,
    /// Family lines through the position that were inspected.
    pub lines_tried: usize,
}

/// Repairs erased position `i`: picks the line through it with the most
/// surviving points (smallest `(alpha, beta)` on ties) and interpolates
/// through the `B-1` survivors with smallest x.
pub fn repair_position(index: &RepairIndex, cw: &Codeword, i: usize) -> Result<RepairOutcome> {
    check_target(index, cw, i)?;
    let need = index.b - 1;
    let mut best: Option<(Line, Vec<usize>)> = None;
    let mut tried = 0;
    for (line, pos) in index.lines_through(i) {
        tried += 1;
        let survivors: Vec<usize> =
            pos.iter().copied().filter(|&j| j != i && cw.symbols[j].is_some()).collect();
        if best.as_ref().is_none_or(|(_, s)| survivors.len() > s.len()) {
            best = Some((line, survivors));
        }
    }
    match best {
        Some((line, survivors)) if survivors.len() >= need => {
            let read: Vec<usize> = survivors.into_iter().take(need).collect();
            let value = interpolate_at(index, cw, &read, i)?;
            Ok(RepairOutcome { value, line, read, lines_tried: tried })
        }
        _ => Err(Error::NoViableLine(i)),
    }
}

/// Repairs `i` through a specific line.
pub fn repair_via_line(index: &RepairIndex, cw: &Codeword, i: usize, line: Line) -> Result<FElem> {
    check_target(index, cw, i)?;
    let need = index.b - 1;
    let pos = index
        .lines_through(i)
        .find(|(l, _)| *l == line)
        .map(|(_, pos)| pos)
        .ok_or(Error::NoViableLine(i))?;
    let read: Vec<usize> = pos
        .iter()
        .copied()
        .filter(|&j| j != i && cw.symbols[j].is_some())
        .take(need)
        .collect();
    if read.len() < need {
        return Err(Error::NoViableLine(i));
    }
    interpolate_at(index, cw, &read, i)
}

fn check_target(index: &RepairIndex, cw: &Codeword, i: usize) -> Result<()> {
    if cw.len() != index.len() {
        return Err(Error::LengthMismatch { expected: index.len(), got: cw.len() });
    }
    if i >= cw.len() {
        return Err(Error::IndexOutOfRange { index: i, len: cw.len() });
    }
    if cw.symbols[i].is_some() {
        return Err(Error::NotErased(i));
    }
    Ok(())
}

fn interpolate_at(index: &RepairIndex, cw: &Codeword, read: &[usize], i: usize) -> Result<FElem> {
    let f = &*index.field;
    let w = lagrange_weights(&index.points, read, index.points[i].x, f);
    LineRepair { line: Line { alpha: FElem::ONE, beta: FElem::ZERO }, read: read.to_vec(), weights: w }
        .apply(cw, f)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    /// Disjoint recovery sets per position.
    pub per_position: Vec<usize>,
    pub minimum: usize,
}

/// Counts, for every position, the family lines through it carrying at
/// least `B-1` other curve points. Such lines meet only at the position, so
/// their recovery sets are pairwise disjoint.
pub fn availability_audit(index: &RepairIndex) -> AuditReport {
    let per_position: Vec<usize> = (0..index.len())
        .map(|i| index.lines_through(i).filter(|(_, pos)| pos.len() >= index.b).count())
        .collect();
    let minimum = per_position.iter().copied().min().unwrap_or(0);
    AuditReport { per_position, minimum }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrillReport {
    pub trials: usize,
    pub erasures: usize,
    pub successes: usize,
    pub mean_symbols_read: f64,
    pub mean_lines_tried: f64,
    pub seed: u64,
}

impl DrillReport {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

/// Random codewords with `erasures` random erasures each, repaired greedily
/// position by position; repaired symbols are written back at once so they
/// can unblock later positions. A trial succeeds when every erasure is
/// recovered correctly.
pub fn repair_drill(code: &LiftedCode, trials: usize, erasures: usize, seed: u64) -> Result<DrillReport> {
    let index = RepairIndex::new(code)?;
    let f = code.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut successes, mut repairs, mut read, mut tried) = (0usize, 0usize, 0usize, 0usize);
    let erasures_eff = erasures.min(code.n());
    for _ in 0..trials {
        let msg: Vec<FElem> = (0..code.k()).map(|_| f.random(&mut rng)).collect();
        let original = encode(code, &msg)?;
        let mut picked = sample(&mut rng, code.n(), erasures_eff).into_vec();
        picked.sort_unstable();
        let mut cw = erase(&original, &picked)?;
        loop {
            let mut progress = false;
            for i in cw.erased() {
                if let Ok(out) = repair_position(&index, &cw, i) {
                    cw.symbols[i] = Some(out.value);
                    repairs += 1;
                    read += out.read.len();
                    tried += out.lines_tried;
                    progress = true;
                }
            }
            if !progress || cw.erased().is_empty() {
                break;
            }
        }
        if cw == original {
            successes += 1;
        }
    }
    let mean = |x: usize| if repairs == 0 { 0.0 } else { x as f64 / repairs as f64 };
    Ok(DrillReport {
        trials,
        erasures: erasures_eff,
        successes,
        mean_symbols_read: mean(read),
        mean_lines_tried: mean(tried),
        seed,
    })
}
