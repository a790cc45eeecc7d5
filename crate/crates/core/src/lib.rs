//! Gentle-algebra combinatorics on graded skew-gentle surfaces: data,
//! words, tagged arcs, arc dg modules and intersection counts.

pub mod algebra;
pub mod arc;
pub mod bush;
pub mod datum;
pub mod dg;
pub mod error;
pub mod intersect;
pub mod examples;
pub mod linalg;
pub mod words;

pub use algebra::{BlockIdx, Comb, Elt, Marker, Mat};
pub use bush::{build_r, hom_rep_dim, rep_of_arc, BushRep, LocalSystem};
pub use arc::{ArcFile, ArcPath, ArcShape, Crossing, SegKind, TaggedArc};
pub use datum::{Datum, Edge, Pm, RawDatum, Sign};
pub use dg::{build_arc_module, hom_dim, DgModule, HomComplex, Summand};
pub use error::{Error, Result};
pub use intersect::{count_parts, int_number, verify_pairs, verify_theorem, ArcData, BiQuiver, Parts};
pub use linalg::Field;
pub use words::{Letter, Word, WordClass};
