//! Built-in worked examples.

use crate::arc::TaggedArc;
use crate::datum::{Datum, Sign};
use crate::words::{parse_letters, Word};

pub const RUNNING_DATUM: &str = r#"{"polygons":[7,2,1],"pairs":[[[1,1],[2,2]],[[1,2],[1,6]],[[1,5],[3,1]],[[1,7],[2,1]]],"fixed":[[1,3],[1,4]],"gradings":[[0,-1,0,0,-1,0],[0],[]]}"#;

pub const D4_DATUM: &str = r#"{"polygons":[3,1,1],"pairs":[[[1,2],[2,1]],[[1,3],[3,1]]],"fixed":[[1,1]],"gradings":[[0,0],[],[]]}"#;

/// Symmetric finite word of the running example; tagged `-` it is `σ`.
pub const SIGMA_WORD: &str = "m(2,0>2,2@0) p(2,2@0) m(1,1@0>1,3@2) p(1,3+@2) m(1,3@2>1,4@3) p(1,4+@3) m(1,4@3>1,3@2) p(1,3-@2) m(1,3@2>1,1@0) p(1,1@0) m(2,2@0>2,0)";

/// Asymmetric finite word of the running example; it is `τ`.
pub const TAU_WORD: &str = "m(2,0>2,2@0) p(2,2@0) m(1,1@0>1,3@2) p(1,3+@2) m(1,3@2>1,4@3) p(1,4+@3) m(1,4@3>1,3@2) p(1,3+@2) m(1,3@2>1,4@3) p(1,4+@3) m(1,4@3>1,7@5) p(1,7@5) m(2,1@5>2,0)";

/// Asymmetric periodic word of the running example (one period).
pub const APW_WORD: &str = "m(1,2@0>1,6@3) p(1,6@3) m(1,2@3>1,1@2) p(1,1@2) m(2,2@2>2,1@1) p(2,1@1) m(1,7@1>1,6@0) p(1,6@0)";

/// Symmetric periodic word of the running example (one period).
pub const SPW_WORD: &str = "m(1,3@0>1,4@1) p(1,4+@1) m(1,4@1>1,3@0) p(1,3+@0)";

pub fn running_datum() -> Datum {
    Datum::from_json(RUNNING_DATUM).expect("built-in datum")
}

pub fn d4_datum() -> Datum {
    Datum::from_json(D4_DATUM).expect("built-in datum")
}

pub fn sigma(d: &Datum) -> TaggedArc {
    let w = Word::finite(parse_letters(SIGMA_WORD).expect("built-in word"));
    TaggedArc::encode(d, &w, &[Sign::Minus]).expect("built-in arc")
}

pub fn tau(d: &Datum) -> TaggedArc {
    let w = Word::finite(parse_letters(TAU_WORD).expect("built-in word"));
    TaggedArc::encode(d, &w, &[]).expect("built-in arc")
}
