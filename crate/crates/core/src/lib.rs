//! Curve-lifted locally recoverable codes over finite fields.
//!
//! Field arithmetic and polynomials live in [`field`], [`poly`] and
//! [`bipoly`]; plane curves, lines and intersection numbers in [`curve`],
//! [`lines`], [`intersect`] and [`bounds`]; code construction in [`code`]
//! and erasure repair in [`repair`].

pub mod bipoly;
pub mod bounds;
pub mod code;
pub mod curve;
pub mod error;
pub mod field;
pub mod intersect;
pub mod linalg;
pub mod lines;
pub mod poly;
pub mod repair;

pub use curve::{CurveKind, CurveSpec, PlaneCurve, Point};
pub use error::{Error, Result};
pub use field::{FElem, FieldCtx, FieldSpec};
pub use lines::{Line, LineFamily};
pub use poly::UniPoly;
pub use code::{build_code, CodeMode, CodePlan, LiftedCode};
