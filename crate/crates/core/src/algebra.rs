//! Basis arithmetic for the skew-gentle algebra and its matrix cover, plus
//! the block morphisms between indecomposable projectives.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

use crate::datum::{ClassId, Datum, Edge, Pm, Sign};
use crate::error::{Error, Result};

/// A basis element of the cover `H` (matrix units `p(x1,x2)` with `j1 <= j2`)
/// or an idempotent of `Λ` attached to a merged class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Elt {
    Idem(ClassId),
    P(Pm, Pm),
}

impl Elt {
    /// `p(x1,x2)`; caller guarantees same polygon and `j1 <= j2`.
    pub fn p(x1: Pm, x2: Pm) -> Elt {
        debug_assert_eq!(x1.edge.i, x2.edge.i);
        debug_assert!(x1.edge.j <= x2.edge.j);
        Elt::P(x1, x2)
    }

    pub fn is_radical(&self) -> bool {
        matches!(self, Elt::P(a, b) if a.edge.j < b.edge.j)
    }

    pub fn degree(&self, d: &Datum) -> i64 {
        match *self {
            Elt::Idem(_) => 0,
            Elt::P(a, b) => d.grading_sum(a.edge.i, a.edge.j, b.edge.j),
        }
    }

    /// Left and right idempotent classes (`target`, `source` as a map of
    /// right projectives by left multiplication).
    pub fn ends(&self, d: &Datum) -> (ClassId, ClassId) {
        match *self {
            Elt::Idem(z) => (z, z),
            Elt::P(a, b) => (d.class_of(a), d.class_of(b)),
        }
    }

    pub fn label(&self, d: &Datum) -> String {
        match self {
            Elt::Idem(z) => format!("e{}", d.class_label(*z)),
            Elt::P(a, b) => format!("p[{},{}]", a, b),
        }
    }
}

/// Product of two basis elements, `None` for zero.
pub fn mul_basis(d: &Datum, a: Elt, b: Elt) -> Option<Elt> {
    match (a, b) {
        (Elt::Idem(z), Elt::Idem(w)) => (z == w).then_some(a),
        (Elt::Idem(z), Elt::P(x, _)) => (d.class_of(x) == z).then_some(b),
        (Elt::P(_, y), Elt::Idem(z)) => (d.class_of(y) == z).then_some(a),
        (Elt::P(x1, x2), Elt::P(y1, y2)) => (x2 == y1).then_some(Elt::P(x1, y2)),
    }
}

/// The basis of `Λ`: class idempotents followed by all radical elements.
pub fn lambda_basis(d: &Datum) -> Vec<Elt> {
    let mut out: Vec<Elt> = (0..d.num_classes()).map(Elt::Idem).collect();
    out.extend(h_basis(d).into_iter().filter(|e| e.is_radical()));
    out
}

/// The basis of the cover `H`: all `p(x1,x2)` with `j1 <= j2`.
pub fn h_basis(d: &Datum) -> Vec<Elt> {
    let pms = d.omega_pm();
    let mut out = Vec::new();
    for &a in pms {
        for &b in pms {
            if a.edge.i == b.edge.i && a.edge.j <= b.edge.j {
                out.push(Elt::P(a, b));
            }
        }
    }
    out
}

/// Basis of `e_target Λ e_source`, i.e. of maps from the projective at
/// `source` to the projective at `target`.
pub fn hom_basis(d: &Datum, target: ClassId, source: ClassId) -> Vec<Elt> {
    let mut out = Vec::new();
    if target == source {
        out.push(Elt::Idem(target));
    }
    for &a in d.class_members(target) {
        for &b in d.class_members(source) {
            if a.edge.i == b.edge.i && a.edge.j < b.edge.j {
                out.push(Elt::P(a, b));
            }
        }
    }
    out
}

/// A finite linear combination of basis elements with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Comb(Vec<(Elt, i64)>);

impl Comb {
    pub fn zero() -> Comb {
        Comb(Vec::new())
    }
    pub fn term(e: Elt, c: i64) -> Comb {
        if c == 0 {
            Comb::zero()
        } else {
            Comb(vec![(e, c)])
        }
    }
    pub fn from_terms(terms: impl IntoIterator<Item = (Elt, i64)>) -> Comb {
        let mut m: BTreeMap<Elt, i64> = BTreeMap::new();
        for (e, c) in terms {
            *m.entry(e).or_insert(0) += c;
        }
        Comb(m.into_iter().filter(|&(_, c)| c != 0).collect())
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn terms(&self) -> &[(Elt, i64)] {
        &self.0
    }
    pub fn add(&self, o: &Comb) -> Comb {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        Comb::from_terms(self.0.iter().chain(o.0.iter()).copied())
    }
    pub fn scale(&self, c: i64) -> Comb {
        if c == 0 {
            return Comb::zero();
        }
        Comb(self.0.iter().map(|&(e, k)| (e, k * c)).collect())
    }
    pub fn mul(&self, d: &Datum, o: &Comb) -> Comb {
        if self.is_zero() || o.is_zero() {
            return Comb::zero();
        }
        let mut terms = Vec::new();
        for &(a, x) in &self.0 {
            for &(b, y) in &o.0 {
                if let Some(p) = mul_basis(d, a, b) {
                    terms.push((p, x * y));
                }
            }
        }
        Comb::from_terms(terms)
    }
    pub fn label(&self, d: &Datum) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (e, c)) in self.0.iter().enumerate() {
            let sign = if *c < 0 { "-" } else if k > 0 { "+" } else { "" };
            let mag = c.abs();
            if mag == 1 {
                s.push_str(&format!("{}{}", sign, e.label(d)));
            } else {
                s.push_str(&format!("{}{}*{}", sign, mag, e.label(d)));
            }
        }
        s
    }
}

/// Dense matrix of algebra elements. Entry `(a, b)` maps the projective of
/// column `b` into the projective of row `a` by left multiplication.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Comb>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![Comb::zero(); rows * cols] }
    }
    pub fn get(&self, r: usize, c: usize) -> &Comb {
        &self.data[r * self.cols + c]
    }
    pub fn set(&mut self, r: usize, c: usize, v: Comb) {
        self.data[r * self.cols + c] = v;
    }
    pub fn add_at(&mut self, r: usize, c: usize, v: &Comb) {
        let k = r * self.cols + c;
        self.data[k] = self.data[k].add(v);
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Comb::is_zero)
    }
    pub fn mul(&self, d: &Datum, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows);
        let mut out = Mat::zeros(self.rows, o.cols);
        for a in 0..self.rows {
            for b in 0..self.cols {
                let x = self.get(a, b);
                if x.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let y = o.get(b, c);
                    if !y.is_zero() {
                        out.add_at(a, c, &x.mul(d, y));
                    }
                }
            }
        }
        out
    }
    pub fn add(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }
    pub fn scale(&self, c: i64) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.scale(c)).collect() }
    }
    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Comb)> {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(k, v)| (k / self.cols, k % self.cols, v))
    }
    pub fn labels(&self, d: &Datum) -> Vec<Vec<String>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self.get(r, c).label(d)).collect()).collect()
    }
}

/// Index for the block calculus: either a whole side `(i,j)` (both signs
/// at fixed points) or a single split element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BlockIdx {
    Side(Edge),
    One(Pm),
}

impl BlockIdx {
    pub fn edge(self) -> Edge {
        match self {
            BlockIdx::Side(e) => e,
            BlockIdx::One(x) => x.edge,
        }
    }
    /// Split elements in block order ("+" before "-").
    pub fn expand(self, d: &Datum) -> Vec<Pm> {
        match self {
            BlockIdx::Side(e) => d.split(e),
            BlockIdx::One(x) => vec![x],
        }
    }
    pub fn classes(self, d: &Datum) -> Vec<ClassId> {
        self.expand(d).into_iter().map(|x| d.class_of(x)).collect()
    }
    pub fn is_double(self, d: &Datum) -> bool {
        matches!(self, BlockIdx::Side(e) if d.is_fixed(e))
    }
}

/// Marker on a fixed-point block: `(+|-)` or `(-|+)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Marker {
    PlusMinus,
    MinusPlus,
}

impl Marker {
    /// The marker attached to a crossing with the given sign.
    pub fn of_sign(s: Sign) -> Marker {
        match s {
            Sign::Plus => Marker::PlusMinus,
            Sign::Minus => Marker::MinusPlus,
        }
    }
    /// Scalar matrix of `f^out`.
    pub fn out_matrix(self) -> [[i64; 2]; 2] {
        match self {
            Marker::PlusMinus => [[1, 0], [0, -1]],
            Marker::MinusPlus => [[0, 0], [0, 1]],
        }
    }
    /// Scalar matrix of `f^in`.
    pub fn in_matrix(self) -> [[i64; 2]; 2] {
        match self {
            Marker::PlusMinus => [[1, 0], [0, 0]],
            Marker::MinusPlus => [[1, 0], [0, 1]],
        }
    }
}

/// A scalar matrix on the projectives of a block, as a matrix of multiples
/// of idempotents.
pub fn scalar_block(d: &Datum, b: BlockIdx, m: [[i64; 2]; 2]) -> Mat {
    let cls = b.classes(d);
    let n = cls.len();
    let mut out = Mat::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            if r == c || cls[r] == cls[c] {
                out.set(r, c, Comb::term(Elt::Idem(cls[r]), m[r][c]));
            }
        }
    }
    out
}

pub fn identity_block(d: &Datum, b: BlockIdx) -> Mat {
    scalar_block(d, b, [[1, 0], [0, 1]])
}

/// `f_{y1,y2}`: the matrix of all `p(x1,x2)`, `x1` over `y1`, `x2` over `y2`.
/// Zero unless same polygon and `0 < j1 < j2`.
pub fn f_block(d: &Datum, y1: BlockIdx, y2: BlockIdx) -> Mat {
    let (r, c) = (y1.expand(d), y2.expand(d));
    let mut out = Mat::zeros(r.len(), c.len());
    let (e1, e2) = (y1.edge(), y2.edge());
    if e1.i == e2.i && e1.j >= 1 && e1.j < e2.j {
        for (a, &x1) in r.iter().enumerate() {
            for (b, &x2) in c.iter().enumerate() {
                out.set(a, b, Comb::term(Elt::p(x1, x2), 1));
            }
        }
    }
    out
}

/// `f^out` on a block: the marker matrix for double blocks, identity otherwise.
pub fn f_out(d: &Datum, b: BlockIdx, m: Option<Marker>) -> Result<Mat> {
    dress(d, b, m, Marker::out_matrix)
}

/// `f^in` on a block.
pub fn f_in(d: &Datum, b: BlockIdx, m: Option<Marker>) -> Result<Mat> {
    dress(d, b, m, Marker::in_matrix)
}

fn dress(d: &Datum, b: BlockIdx, m: Option<Marker>, pick: fn(Marker) -> [[i64; 2]; 2]) -> Result<Mat> {
    match (b.is_double(d), m) {
        (true, Some(m)) => Ok(scalar_block(d, b, pick(m))),
        (true, None) => Err(Error::InvalidMarker),
        (false, None) => Ok(identity_block(d, b)),
        (false, Some(_)) => Err(Error::InvalidMarker),
    }
}

/// `f^in_{m1} ∘ f_{y1,y2} ∘ f^out_{m2}`.
pub fn block_morphism(
    d: &Datum,
    y1: BlockIdx,
    y2: BlockIdx,
    m1: Option<Marker>,
    m2: Option<Marker>,
) -> Result<Mat> {
    let f = f_block(d, y1, y2);
    Ok(f_in(d, y1, m1)?.mul(d, &f).mul(d, &f_out(d, y2, m2)?))
}

impl fmt::Display for BlockIdx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockIdx::Side(e) => write!(f, "{}", e),
            BlockIdx::One(x) => write!(f, "{}", x),
        }
    }
}
