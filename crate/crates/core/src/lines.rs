//! Non-horizontal, non-vertical lines `y = alpha x + beta` and named
//! families of them.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::Point;
use crate::error::{Error, Result};
use crate::field::{FElem, FieldCtx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Line {
    pub alpha: FElem,
    pub beta: FElem,
}

impl Line {
    pub fn new(alpha: FElem, beta: FElem) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::InvalidSpec("line slope alpha must be nonzero".into()));
        }
        Ok(Line { alpha, beta })
    }

    /// The unique family line through `p` with slope `alpha`.
    pub fn through(p: Point, alpha: FElem, f: &FieldCtx) -> Result<Self> {
        Self::new(alpha, f.sub(p.y, f.mul(alpha, p.x)))
    }

    pub fn contains(&self, p: Point, f: &FieldCtx) -> bool {
        f.add(f.mul(self.alpha, p.x), self.beta) == p.y
    }

    pub fn y_at(&self, x: FElem, f: &FieldCtx) -> FElem {
        f.add(f.mul(self.alpha, x), self.beta)
    }

    /// Canonical sort key `(alpha, beta)` as element integers.
    pub fn key(&self, f: &FieldCtx) -> (u32, u32) {
        (f.to_int(self.alpha), f.to_int(self.beta))
    }
}

/// Which lines participate in a construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineFamily {
    All,
    TraceNonzero,
    TraceZero,
    Explicit(Vec<Line>),
}

/// Serialized selector: `"all"`, `"trace-nonzero"`, `"trace-zero"`, or an
/// explicit list of `[alpha, beta]` element integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilySpec {
    Named(String),
    Explicit(Vec<[u32; 2]>),
}

impl LineFamily {
    pub fn spec(&self, f: &FieldCtx) -> FamilySpec {
        match self {
            LineFamily::All => FamilySpec::Named("all".into()),
            LineFamily::TraceNonzero => FamilySpec::Named("trace-nonzero".into()),
            LineFamily::TraceZero => FamilySpec::Named("trace-zero".into()),
            LineFamily::Explicit(lines) => {
                let mut keys: Vec<[u32; 2]> = lines
                    .iter()
                    .map(|l| {
                        let (a, b) = l.key(f);
                        [a, b]
                    })
                    .collect();
                keys.sort_unstable();
                keys.dedup();
                FamilySpec::Explicit(keys)
            }
        }
    }

    pub fn from_spec(spec: &FamilySpec, f: &FieldCtx) -> Result<Self> {
        match spec {
            FamilySpec::Named(name) => Self::from_name(name),
            FamilySpec::Explicit(keys) => {
                let lines = keys
                    .iter()
                    .map(|&[a, b]| Line::new(f.from_int(a)?, f.from_int(b)?))
                    .collect::<Result<Vec<_>>>()?;
                Ok(LineFamily::Explicit(lines))
            }
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "all" => Ok(LineFamily::All),
            "trace-nonzero" => Ok(LineFamily::TraceNonzero),
            "trace-zero" => Ok(LineFamily::TraceZero),
            other => Err(Error::InvalidSpec(format!("unknown line family '{other}'"))),
        }
    }

    pub fn resolve(&self, field: Arc<FieldCtx>) -> Result<ResolvedFamily> {
        let traces = match self {
            LineFamily::TraceNonzero | LineFamily::TraceZero => {
                let f = &*field;
                Some(f.elements().map(|b| f.rel_trace(b)).collect::<Result<Vec<_>>>()?)
            }
            _ => None,
        };
        let explicit = match self {
            LineFamily::Explicit(lines) => Some(lines.iter().copied().collect()),
            _ => None,
        };
        Ok(ResolvedFamily {
            family: self.clone(),
            field,
            traces,
            explicit,
        })
    }
}

/// A family bound to a field, answering membership queries in O(1).
#[derive(Debug, Clone)]
pub struct ResolvedFamily {
    family: LineFamily,
    field: Arc<FieldCtx>,
    traces: Option<Vec<FElem>>,
    explicit: Option<HashSet<Line>>,
}

impl ResolvedFamily {
    pub fn family(&self) -> &LineFamily {
        &self.family
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn contains(&self, line: &Line) -> bool {
        match &self.family {
            LineFamily::All => true,
            LineFamily::TraceZero => self.beta_trace(line).is_zero(),
            LineFamily::TraceNonzero => !self.beta_trace(line).is_zero(),
            LineFamily::Explicit(_) => self.explicit.as_ref().unwrap().contains(line),
        }
    }

    fn beta_trace(&self, line: &Line) -> FElem {
        let traces = self.traces.as_ref().unwrap();
        traces[self.field.to_int(line.beta) as usize]
    }

    /// Member lines in canonical `(alpha, beta)` order.
    pub fn lines(&self) -> Vec<Line> {
        let f = &*self.field;
        match &self.family {
            LineFamily::Explicit(lines) => {
                let mut v: Vec<Line> = lines.clone();
                v.sort_by_key(|l| l.key(f));
                v.dedup();
                v
            }
            _ => f
                .nonzero_elements()
                .flat_map(|a| f.elements().map(move |b| Line { alpha: a, beta: b }))
                .filter(|l| self.contains(l))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        match &self.family {
            LineFamily::All => {
                let q = self.field.size() as usize;
                (q - 1) * q
            }
            LineFamily::TraceZero | LineFamily::TraceNonzero => {
                let want_zero = self.family == LineFamily::TraceZero;
                let betas = self
                    .traces
                    .as_ref()
                    .unwrap()
                    .iter()
                    .filter(|t| t.is_zero() == want_zero)
                    .count();
                (self.field.size() as usize - 1) * betas
            }
            LineFamily::Explicit(_) => self.lines().len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Member lines through `p`, ordered by slope.
    pub fn lines_through(&self, p: Point) -> Vec<Line> {
        let f = &*self.field;
        f.nonzero_elements()
            .map(|a| Line {
                alpha: a,
                beta: f.sub(p.y, f.mul(a, p.x)),
            })
            .filter(|l| self.contains(l))
            .collect()
    }
}

/// Number of family lines through a fixed point in the full family.
pub fn lines_through_point_count(field_size: u64) -> u64 {
    field_size - 1
}

/// Size of the full family `{(alpha, beta): alpha != 0}`.
pub fn full_family_size(field_size: u64) -> u64 {
    (field_size - 1) * field_size
}
