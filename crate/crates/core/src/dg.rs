//! Minimal strictly perfect dg modules, arc modules, Hom complexes and cones.

use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

use crate::algebra::{block_morphism, hom_basis, BlockIdx, Comb, Elt, Marker, Mat};
use crate::arc::{SegKind, TaggedArc};
use crate::datum::{ClassId, Datum};
use crate::error::{Error, Result};
use crate::linalg::Field;

/// A shifted indecomposable projective `e_z Λ [n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Summand {
    pub class: ClassId,
    pub n: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DgModule {
    pub summands: Vec<Summand>,
    /// Entry `(a, b)` maps summand `b` into summand `a`.
    pub diff: Mat,
}

/// Degree of `elt` viewed as a map from `src` to `tgt`.
pub fn hom_component_degree(d: &Datum, src: Summand, tgt: Summand, elt: Elt) -> Result<i64> {
    let (l, r) = elt.ends(d);
    if l != tgt.class || r != src.class {
        return Err(Error::TypeMismatch(format!("{} does not map {:?} to {:?}", elt.label(d), src, tgt)));
    }
    Ok(elt.degree(d) + src.n - tgt.n)
}

/// Summand ranges of an arc module: one entry per crossing class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArcLayout {
    /// For crossing `l` (1-based, index `l-1`): first summand index of its
    /// class and the class size in summands (1 or 2).
    pub block_of: Vec<(usize, usize)>,
    /// Crossing classes as 1-based inclusive ranges.
    pub classes: Vec<(usize, usize)>,
}

impl DgModule {
    pub fn zero() -> DgModule {
        DgModule { summands: vec![], diff: Mat::zeros(0, 0) }
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }
    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn shift(&self, rho: i64) -> DgModule {
        DgModule {
            summands: self.summands.iter().map(|s| Summand { class: s.class, n: s.n + rho }).collect(),
            diff: self.diff.clone(),
        }
    }

    /// Direct sum.
    pub fn sum(&self, o: &DgModule) -> DgModule {
        let (a, b) = (self.len(), o.len());
        let mut diff = Mat::zeros(a + b, a + b);
        for (r, c, v) in self.diff.entries() {
            diff.set(r, c, v.clone());
        }
        for (r, c, v) in o.diff.entries() {
            diff.set(a + r, a + c, v.clone());
        }
        let mut summands = self.summands.clone();
        summands.extend_from_slice(&o.summands);
        DgModule { summands, diff }
    }

    /// All structural violations: degree, radical entries, `d² = 0`,
    /// triangularizability.
    pub fn violations(&self, d: &Datum) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.len();
        for (a, b, v) in self.diff.entries() {
            for &(e, _) in v.terms() {
                if !e.is_radical() {
                    out.push(format!("entry ({a},{b}) has non-radical term {}", e.label(d)));
                }
                match hom_component_degree(d, self.summands[b], self.summands[a], e) {
                    Ok(1) => {}
                    Ok(k) => out.push(format!("entry ({a},{b}) term {} has degree {k}", e.label(d))),
                    Err(err) => out.push(format!("entry ({a},{b}): {err}")),
                }
            }
        }
        if !self.diff.mul(d, &self.diff).is_zero() {
            out.push("d^2 != 0".into());
        }
        // Upper-triangularizable iff the support graph is acyclic.
        let mut indeg = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for (a, b, _) in self.diff.entries() {
            succ[b].push(a);
            indeg[a] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        if seen != n {
            out.push("differential is not triangularizable".into());
        }
        out
    }

    pub fn validate(&self, d: &Datum) -> Result<()> {
        let v = self.violations(d);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::NotArcObject(v.join("; ")))
        }
    }

    pub fn identity(&self) -> Mat {
        let mut m = Mat::zeros(self.len(), self.len());
        for (k, s) in self.summands.iter().enumerate() {
            m.set(k, k, Comb::term(Elt::Idem(s.class), 1));
        }
        m
    }

    /// Mapping cone of a degree-0 cocycle `f: self -> tgt`: summands of
    /// `tgt` followed by `self[1]`, differential `[[d_tgt, f], [0, -d_self]]`.
    pub fn cone(&self, d: &Datum, tgt: &DgModule, f: &Mat) -> Result<DgModule> {
        if !is_cocycle(d, self, tgt, f, 0) {
            return Err(Error::NotACocycle);
        }
        let (a, b) = (tgt.len(), self.len());
        let mut diff = Mat::zeros(a + b, a + b);
        for (r, c, v) in tgt.diff.entries() {
            diff.set(r, c, v.clone());
        }
        for (r, c, v) in f.entries() {
            diff.set(r, a + c, v.clone());
        }
        for (r, c, v) in self.diff.entries() {
            diff.set(a + r, a + c, v.scale(-1));
        }
        let mut summands = tgt.summands.clone();
        summands.extend(self.summands.iter().map(|s| Summand { class: s.class, n: s.n + 1 }));
        Ok(DgModule { summands, diff })
    }

    /// Human-readable dump: summand labels and matrix entries.
    pub fn dump(&self, d: &Datum) -> DgDump {
        DgDump {
            summands: self
                .summands
                .iter()
                .map(|s| format!("{}[{}]", d.class_label(s.class), s.n))
                .collect(),
            entries: self.diff.entries().map(|(r, c, v)| (r, c, v.label(d))).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DgDump {
    pub summands: Vec<String>,
    pub entries: Vec<(usize, usize, String)>,
}

/// The dg module of a tagged arc together with its summand layout.
pub fn build_arc_module_with_layout(d: &Datum, arc: &TaggedArc) -> Result<(DgModule, ArcLayout)> {
    let path = arc.path(d);
    if path.is_empty() {
        return Err(Error::NotArcObject("arc crosses no arc of the system".into()));
    }
    let classes = path.ell_classes();
    let mut summands = Vec::new();
    let mut block_of = vec![(0, 0); path.len()];
    for &(s, e) in &classes {
        let x = path.x(s);
        let start = summands.len();
        if s != e {
            let edge = x.label.edge;
            for c in BlockIdx::Side(edge).classes(d) {
                summands.push(Summand { class: c, n: x.n });
            }
        } else {
            summands.push(Summand { class: x.class, n: x.n });
        }
        for l in s..=e {
            block_of[l - 1] = (start, summands.len() - start);
        }
    }
    let mut diff = Mat::zeros(summands.len(), summands.len());
    let double = |l: usize| block_of[l - 1].1 == 2;
    let marker = |l: usize| double(l).then(|| Marker::of_sign(path.x(l).sign().expect("fixed crossing")));
    let depart_block = |l: usize| {
        if double(l) {
            BlockIdx::Side(path.x(l).label.edge)
        } else {
            BlockIdx::One(path.x(l).depart)
        }
    };
    let arrive_block = |l: usize| {
        if double(l) {
            BlockIdx::Side(path.x(l).label.edge)
        } else {
            BlockIdx::One(path.x(l).arrive)
        }
    };
    for l in 1..path.len() {
        let SegKind::Unpunctured { from, to, .. } = path.seg(l) else { continue };
        let (a, b) = (depart_block(l), arrive_block(l + 1));
        let (rows, cols, m) = if from < to {
            (block_of[l - 1], block_of[l], block_morphism(d, a, b, marker(l), marker(l + 1))?)
        } else {
            (block_of[l], block_of[l - 1], block_morphism(d, b, a, marker(l + 1), marker(l))?)
        };
        for (r, c, v) in m.entries() {
            diff.add_at(rows.0 + r, cols.0 + c, v);
        }
    }
    Ok((DgModule { summands, diff }, ArcLayout { block_of, classes }))
}

pub fn build_arc_module(d: &Datum, arc: &TaggedArc) -> Result<DgModule> {
    build_arc_module_with_layout(d, arc).map(|x| x.0)
}

/// Basis element of the Hom complex: `elt` placed at entry
/// `(target summand, source summand)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HomBasis {
    pub tgt: usize,
    pub src: usize,
    pub elt: Elt,
}

/// The graded Hom complex between two dg modules.
pub struct HomComplex<'a> {
    d: &'a Datum,
    src: &'a DgModule,
    tgt: &'a DgModule,
    pub basis: BTreeMap<i64, Vec<HomBasis>>,
    index: HashMap<HomBasis, usize>,
}

impl<'a> HomComplex<'a> {
    pub fn new(d: &'a Datum, src: &'a DgModule, tgt: &'a DgModule) -> HomComplex<'a> {
        let mut basis: BTreeMap<i64, Vec<HomBasis>> = BTreeMap::new();
        for (a, &t) in tgt.summands.iter().enumerate() {
            for (b, &s) in src.summands.iter().enumerate() {
                for elt in hom_basis(d, t.class, s.class) {
                    let deg = elt.degree(d) + s.n - t.n;
                    basis.entry(deg).or_default().push(HomBasis { tgt: a, src: b, elt });
                }
            }
        }
        let mut index = HashMap::new();
        for v in basis.values() {
            for (k, h) in v.iter().enumerate() {
                index.insert(*h, k);
            }
        }
        HomComplex { d, src, tgt, basis, index }
    }

    pub fn dim(&self, deg: i64) -> usize {
        self.basis.get(&deg).map_or(0, Vec::len)
    }

    /// `d(f) = f ∘ d_src - (-1)^k d_tgt ∘ f` on a basis element of degree `k`,
    /// as coordinates in degree `k + 1`.
    fn image(&self, h: HomBasis, k: i64) -> Vec<(usize, i64)> {
        let d = self.d;
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        let e = Comb::term(h.elt, 1);
        for c in 0..self.src.len() {
            let x = self.src.diff.get(h.src, c);
            if x.is_zero() {
                continue;
            }
            for &(p, coef) in e.mul(d, x).terms() {
                let key = HomBasis { tgt: h.tgt, src: c, elt: p };
                *acc.entry(self.index[&key]).or_insert(0) += coef;
            }
        }
        let sign = if k.rem_euclid(2) == 0 { -1 } else { 1 };
        for a in 0..self.tgt.len() {
            let x = self.tgt.diff.get(a, h.tgt);
            if x.is_zero() {
                continue;
            }
            for &(p, coef) in x.mul(d, &e).terms() {
                let key = HomBasis { tgt: a, src: h.src, elt: p };
                *acc.entry(self.index[&key]).or_insert(0) += sign * coef;
            }
        }
        acc.into_iter().filter(|&(_, v)| v != 0).collect()
    }

    /// Matrix of `d` from degree `k` to `k + 1` as rows indexed by degree-`k`
    /// basis elements (i.e. the transpose), sparse.
    pub fn differential_rows(&self, k: i64) -> Vec<Vec<(usize, i64)>> {
        self.basis.get(&k).map_or(vec![], |b| b.iter().map(|&h| self.image(h, k)).collect())
    }

    pub fn rank_d(&self, k: i64, field: Field) -> usize {
        let rows = self.differential_rows(k);
        if rows.is_empty() || self.dim(k + 1) == 0 {
            return 0;
        }
        field.rank_sparse(&rows, self.dim(k + 1))
    }

    /// `dim H^k`.
    pub fn cohomology(&self, k: i64, field: Field) -> usize {
        let c = self.dim(k);
        if c == 0 {
            return 0;
        }
        c - self.rank_d(k, field) - self.rank_d(k - 1, field)
    }

    /// Cohomology dimensions in every degree with nonzero chains.
    pub fn cohomology_all(&self, field: Field) -> BTreeMap<i64, usize> {
        let degs: Vec<i64> = self.basis.keys().copied().collect();
        let ranks: BTreeMap<i64, usize> = degs.iter().map(|&k| (k, self.rank_d(k, field))).collect();
        degs.iter()
            .map(|&k| {
                let below = ranks.get(&(k - 1)).copied().unwrap_or(0);
                (k, self.dim(k) - ranks[&k] - below)
            })
            .collect()
    }

    /// Coordinates of a morphism in the degree-`k` basis; `None` if it is
    /// not homogeneous of that degree.
    pub fn coordinates(&self, f: &Mat, k: i64) -> Option<Vec<(usize, i64)>> {
        let mut out = Vec::new();
        for (a, b, v) in f.entries() {
            for &(e, c) in v.terms() {
                let key = HomBasis { tgt: a, src: b, elt: e };
                let idx = *self.index.get(&key)?;
                if self.basis[&k].get(idx) != Some(&key) {
                    return None;
                }
                out.push((idx, c));
            }
        }
        Some(out)
    }

    /// Whether the given degree-`k` cocycles are linearly independent
    /// modulo coboundaries.
    pub fn independent_in_cohomology(&self, fs: &[Mat], k: i64, field: Field) -> Option<bool> {
        let n = self.dim(k);
        // Rows: images of d from degree k-1 (coboundaries) then the fs.
        let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
        if let Some(b) = self.basis.get(&(k - 1)) {
            for &h in b {
                rows.push(self.image(h, k - 1));
            }
        }
        let base = field.rank_sparse(&rows, n);
        for f in fs {
            rows.push(self.coordinates(f, k)?);
        }
        Some(field.rank_sparse(&rows, n) == base + fs.len())
    }
}

/// `dim H^ρ Hom(m, n)`.
pub fn hom_dim(d: &Datum, m: &DgModule, n: &DgModule, rho: i64, field: Field) -> usize {
    HomComplex::new(d, m, n).cohomology(rho, field)
}

/// `f ∘ d_src - (-1)^k d_tgt ∘ f`.
pub fn hom_differential(d: &Datum, src: &DgModule, tgt: &DgModule, f: &Mat, k: i64) -> Mat {
    let a = f.mul(d, &src.diff);
    let b = tgt.diff.mul(d, f);
    let sign = if k.rem_euclid(2) == 0 { -1 } else { 1 };
    a.add(&b.scale(sign))
}

/// Whether `f` is homogeneous of degree `k` and closed.
pub fn is_cocycle(d: &Datum, src: &DgModule, tgt: &DgModule, f: &Mat, k: i64) -> bool {
    if f.rows != tgt.len() || f.cols != src.len() {
        return false;
    }
    for (a, b, v) in f.entries() {
        for &(e, _) in v.terms() {
            match hom_component_degree(d, src.summands[b], tgt.summands[a], e) {
                Ok(x) if x == k => {}
                _ => return false,
            }
        }
    }
    hom_differential(d, src, tgt, f, k).is_zero()
}
