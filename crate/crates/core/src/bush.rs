//! Representations of the bush: the representations attached to words with
//! local system, bijectivity, and Hom dimensions between representations.
//!
//! A representation is a list of objects of the additive category over the
//! bush classes, each with a multiplicity, together with a map from the
//! minus-side vectors to the plus-side vectors. Every object contributes
//! one basis vector per member of its class lying in a rod `((i,j),r)` with
//! `j >= 1`, tensored with `k^dim`.

use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

use crate::arc::{SegKind, TaggedArc};
use crate::datum::{Datum, Pm, Sign};
use crate::error::{Error, Result};
use crate::linalg::Field;
use crate::words::{rod_cmp, Letter, Rod, Word, WordClass};

/// Integer matrix, row-major.
pub type IMat = Vec<Vec<i64>>;

fn identity(n: usize) -> IMat {
    (0..n).map(|r| (0..n).map(|c| i64::from(r == c)).collect()).collect()
}

fn zeros(r: usize, c: usize) -> IMat {
    vec![vec![0; c]; r]
}

/// Upper shift matrix with ones on the superdiagonal.
fn nilpotent(n: usize) -> IMat {
    let mut m = zeros(n, n);
    for r in 0..n.saturating_sub(1) {
        m[r][r + 1] = 1;
    }
    m
}

/// `x^d - a_1 x^{d-1} - ... - a_d` as a companion matrix (`coeffs = a_1..a_d`).
pub fn companion(coeffs: &[i64]) -> IMat {
    let d = coeffs.len();
    let mut m = zeros(d, d);
    for r in 1..d {
        m[r][r - 1] = 1;
    }
    for r in 0..d {
        m[r][d - 1] = coeffs[d - 1 - r];
    }
    m
}

/// `[0; I_q]`, a `(q+1) x q` matrix.
fn low_identity(q: usize) -> IMat {
    let mut m = zeros(q + 1, q);
    for r in 0..q {
        m[r + 1][r] = 1;
    }
    m
}

/// `[I_q 0]`, a `q x (q+1)` matrix.
fn left_identity(q: usize) -> IMat {
    let mut m = zeros(q, q + 1);
    for r in 0..q {
        m[r][r] = 1;
    }
    m
}

/// One of the nine block families parameterising indecomposable modules
/// over `k<x,y>/(x^2-x, y^2-y)`. Families are numbered 1 to 9 in the order
/// they are usually listed; family 9 takes the companion coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockFamily {
    pub family: u8,
    pub q: usize,
    /// `a_1 ..= a_{q+1}`, family 9 only.
    pub poly: Vec<i64>,
}

impl BlockFamily {
    /// Block sizes `(c, c', d, d')`: rows of `A` and `C`, columns of `A`
    /// and `B`.
    pub fn sizes(&self) -> (usize, usize, usize, usize) {
        let q = self.q;
        match self.family {
            1 => (q + 1, q, q, q + 1),
            2 => (q, q + 1, q + 1, q),
            5 => (q + 1, q, q + 1, q),
            6 => (q, q + 1, q, q + 1),
            _ => (q + 1, q + 1, q + 1, q + 1),
        }
    }

    /// The blocks `A, B, C, D`.
    pub fn blocks(&self) -> Result<[IMat; 4]> {
        let q = self.q;
        let (i0, i1, j1) = (identity(q), identity(q + 1), nilpotent(q + 1));
        Ok(match self.family {
            1 => [low_identity(q), i1, i0, left_identity(q)],
            2 => [left_identity(q), i0, i1, low_identity(q)],
            3 => [i1.clone(), i1.clone(), i1, j1],
            4 => [j1, i1.clone(), i1.clone(), i1],
            5 => [i1, low_identity(q), left_identity(q), i0],
            6 => [i0, left_identity(q), low_identity(q), i1],
            7 => [i1.clone(), i1.clone(), j1, i1],
            8 => [i1.clone(), j1, i1.clone(), i1],
            9 => {
                if self.poly.len() != q + 1 {
                    return Err(Error::IncompatibleLocalSystem);
                }
                [companion(&self.poly), i1.clone(), i1.clone(), i1]
            }
            _ => return Err(Error::IncompatibleLocalSystem),
        })
    }
}

/// Local system attached to a word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LocalSystem {
    None,
    Sign(Sign),
    SignPair(Sign, Sign),
    /// Companion coefficients `a_1..a_d` of the band matrix.
    Band(Vec<i64>),
    Block(BlockFamily),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BushObj {
    /// Class representative: the least member of the class.
    pub key: Letter,
    pub dim: usize,
}

/// One basis vector: a member `letter` of object `obj`, copy `copy`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BushVec {
    pub obj: usize,
    pub letter: Letter,
    pub copy: usize,
}

impl BushVec {
    pub fn rod(&self) -> Rod {
        self.letter.rod()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BushRep {
    pub objects: Vec<BushObj>,
    pub minus: Vec<BushVec>,
    pub plus: Vec<BushVec>,
    /// Nonzero entries of `f`, keyed by `(plus index, minus index)`.
    pub f: BTreeMap<(usize, usize), i64>,
}

fn class_key(d: &Datum, l: Letter) -> Letter {
    match l {
        Letter::Plus { edge, .. } if d.is_fixed(edge) => l,
        _ => l.min(l.tilde(d)),
    }
}

/// Members of an object's class that give basis vectors.
fn members(d: &Datum, key: Letter) -> Vec<Letter> {
    let mut out = vec![key];
    let t = key.tilde(d);
    if t != key {
        out.push(t);
    }
    out.retain(|l| !l.rod().edge.is_boundary());
    out
}

impl BushRep {
    fn add_object(&mut self, d: &Datum, l: Letter, dim: usize) -> usize {
        let key = class_key(d, l);
        let obj = self.objects.len();
        self.objects.push(BushObj { key, dim });
        for letter in members(d, key) {
            for copy in 0..dim {
                let v = BushVec { obj, letter, copy };
                if letter.is_plus() {
                    self.plus.push(v);
                } else {
                    self.minus.push(v);
                }
            }
        }
        obj
    }

    fn find(list: &[BushVec], obj: usize, letter: Letter) -> Option<usize> {
        list.iter().position(|v| v.obj == obj && v.letter == letter)
    }

    /// Adds `m` (rows: copies of the plus vector, cols: copies of the minus
    /// vector) to `f`.
    fn map(&mut self, minus: (usize, Letter), plus: (usize, Letter), m: &IMat) {
        let (Some(mi), Some(pi)) = (Self::find(&self.minus, minus.0, minus.1), Self::find(&self.plus, plus.0, plus.1))
        else {
            return;
        };
        for (r, row) in m.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                if x != 0 {
                    *self.f.entry((pi + r, mi + c)).or_insert(0) += x;
                }
            }
        }
        self.f.retain(|_, v| *v != 0);
    }

    /// Direct sum.
    pub fn sum(&self, o: &BushRep) -> BushRep {
        let mut out = self.clone();
        let (no, nm, np) = (self.objects.len(), self.minus.len(), self.plus.len());
        out.objects.extend(o.objects.iter().cloned());
        out.minus.extend(o.minus.iter().map(|v| BushVec { obj: v.obj + no, ..*v }));
        out.plus.extend(o.plus.iter().map(|v| BushVec { obj: v.obj + no, ..*v }));
        for (&(p, m), &x) in &o.f {
            out.f.insert((p + np, m + nm), x);
        }
        out
    }

    /// Vectors grouped by rod.
    fn by_rod(list: &[BushVec]) -> BTreeMap<Rod, Vec<usize>> {
        let mut out: BTreeMap<Rod, Vec<usize>> = BTreeMap::new();
        for (k, v) in list.iter().enumerate() {
            out.entry(v.rod()).or_default().push(k);
        }
        out
    }

    /// `f` only connects vectors in the same rod.
    pub fn is_diagonal(&self) -> bool {
        self.f.keys().all(|&(p, m)| self.plus[p].rod() == self.minus[m].rod())
    }

    /// Whether `f` is a bijection, checked rod by rod.
    pub fn is_bijective(&self) -> bool {
        if !self.is_diagonal() {
            return false;
        }
        let (mr, pr) = (Self::by_rod(&self.minus), Self::by_rod(&self.plus));
        if mr.keys().ne(pr.keys()) {
            return false;
        }
        mr.iter().all(|(rod, ms)| {
            let ps = &pr[rod];
            if ms.len() != ps.len() {
                return false;
            }
            let m: IMat =
                ps.iter().map(|&p| ms.iter().map(|&c| self.f.get(&(p, c)).copied().unwrap_or(0)).collect()).collect();
            Field::Rational.rank(&m) == ms.len()
        })
    }

    /// Structural equality up to a permutation of objects.
    pub fn same_up_to_permutation(&self, o: &BushRep) -> bool {
        if self.objects.len() != o.objects.len()
            || self.minus.len() != o.minus.len()
            || self.plus.len() != o.plus.len()
            || self.f.len() != o.f.len()
        {
            return false;
        }
        let mut perm = vec![usize::MAX; self.objects.len()];
        let mut used = vec![false; o.objects.len()];
        self.match_objects(o, 0, &mut perm, &mut used)
    }

    fn match_objects(&self, o: &BushRep, k: usize, perm: &mut [usize], used: &mut [bool]) -> bool {
        if k == self.objects.len() {
            return true;
        }
        for c in 0..o.objects.len() {
            if used[c] || o.objects[c] != self.objects[k] {
                continue;
            }
            perm[k] = c;
            used[c] = true;
            if self.consistent(o, k, perm) && self.match_objects(o, k + 1, perm, used) {
                return true;
            }
            used[c] = false;
        }
        perm[k] = usize::MAX;
        false
    }

    /// Entries of `f` among objects `0..=k` agree under `perm`.
    fn consistent(&self, o: &BushRep, k: usize, perm: &[usize]) -> bool {
        let image = |list: &[BushVec], olist: &[BushVec], x: usize| {
            let v = list[x];
            olist.iter().position(|w| w.obj == perm[v.obj] && w.letter == v.letter && w.copy == v.copy)
        };
        let mut mine = 0;
        for (&(p, m), &x) in &self.f {
            let (op, om) = (self.plus[p].obj, self.minus[m].obj);
            if op > k || om > k {
                continue;
            }
            mine += 1;
            match (image(&self.plus, &o.plus, p), image(&self.minus, &o.minus, m)) {
                (Some(q), Some(n)) if o.f.get(&(q, n)) == Some(&x) => {}
                _ => return false,
            }
        }
        let inv: HashMap<usize, usize> = perm.iter().enumerate().filter(|(_, &c)| c != usize::MAX).map(|(a, &c)| (c, a)).collect();
        let theirs = o
            .f
            .keys()
            .filter(|&&(p, m)| inv.contains_key(&o.plus[p].obj) && inv.contains_key(&o.minus[m].obj))
            .count();
        mine == theirs
    }
}

/// Targets of `f` on the vector entering a segment right after plus
/// letter `p`.
fn after(d: &Datum, p: Letter) -> Vec<Letter> {
    let s = p.star(d);
    if s.kappa() == Some(Sign::Minus) {
        vec![s, p]
    } else {
        vec![s]
    }
}

/// Targets of `f` on the vector leaving a segment right before plus letter
/// `p` (read backwards).
fn before(d: &Datum, p: Letter) -> Vec<Letter> {
    if p.kappa() == Some(Sign::Minus) {
        vec![p, p.star(d)]
    } else {
        vec![p]
    }
}

/// Letters of a word laid out along a chain, with per-position objects.
struct Chain<'a> {
    d: &'a Datum,
    letters: Vec<Letter>,
    objs: Vec<Vec<usize>>,
    rep: BushRep,
}

impl<'a> Chain<'a> {
    fn new(d: &'a Datum, letters: Vec<Letter>) -> Chain<'a> {
        Chain { d, objs: vec![Vec::new(); letters.len()], letters, rep: BushRep::default() }
    }

    /// Objects of the hat of position `k` (both signs at fixed points).
    fn hat(&mut self, k: usize, dim: usize) {
        let l = self.letters[k];
        self.objs[k].push(self.rep.add_object(self.d, l, dim));
        if l.kappa().is_some() {
            self.objs[k].push(self.rep.add_object(self.d, l.hat(), dim));
        }
    }

    /// A single sign object at a fixed position.
    fn single(&mut self, k: usize, l: Letter, dim: usize) {
        self.objs[k].push(self.rep.add_object(self.d, l, dim));
    }

    fn dim_at(&self, k: usize, l: Letter) -> Option<(usize, usize)> {
        let key = class_key(self.d, l);
        self.objs[k].iter().map(|&o| (o, self.rep.objects[o].dim)).find(|&(o, _)| self.rep.objects[o].key == key)
    }

    /// `f(x) += target ⊗ m` for the vector `x` of minus position `k`.
    fn map(&mut self, k: usize, x: Letter, j: usize, target: Letter, m: &IMat) {
        let (Some((mo, _)), Some((po, _))) = (self.dim_at(k, x), self.dim_at(j, target)) else { return };
        self.rep.map((mo, x), (po, target), m);
    }

    fn map_all(&mut self, k: usize, x: Letter, j: usize, targets: Vec<Letter>, m: &IMat) {
        for t in targets {
            self.map(k, x, j, t, m);
        }
    }
}

fn check_class(d: &Datum, w: &Word, ok: &[WordClass]) -> Result<WordClass> {
    w.validate(d)?;
    let c = w.classify(d);
    if ok.contains(&c) {
        Ok(c)
    } else {
        Err(Error::IncompatibleLocalSystem)
    }
}

/// The representation of a word with local system.
pub fn build_r(d: &Datum, w: &Word, local: &LocalSystem) -> Result<BushRep> {
    match local {
        LocalSystem::None => {
            if w.periodic {
                return Err(Error::IncompatibleLocalSystem);
            }
            w.validate(d)?;
            Ok(finite_rep(d, &w.letters))
        }
        LocalSystem::Sign(s) => {
            check_class(d, w, &[WordClass::Sfw])?;
            let m = w.len() / 2;
            let mut letters = w.letters[..=m].to_vec();
            letters[m] = letters[m].with_kappa(*s);
            Ok(tagged_rep(d, &letters))
        }
        LocalSystem::SignPair(s1, s2) => {
            check_class(d, w, &[WordClass::Spw])?;
            let c = w.spw_centres(d);
            let h = w.len() / 2;
            let r = w.rotate(c[0] as i64)?;
            let mut letters = r.letters[..=h].to_vec();
            letters[0] = letters[0].with_kappa(*s1);
            letters[h] = letters[h].with_kappa(*s2);
            Ok(tagged_rep(d, &letters))
        }
        LocalSystem::Band(coeffs) => {
            check_class(d, w, &[WordClass::Apw])?;
            if coeffs.is_empty() || coeffs[coeffs.len() - 1] == 0 {
                return Err(Error::IncompatibleLocalSystem);
            }
            Ok(band_rep(d, w, &companion(coeffs)))
        }
        LocalSystem::Block(fam) => {
            check_class(d, w, &[WordClass::Spw])?;
            block_rep(d, w, &fam.blocks()?, fam.sizes())
        }
    }
}

fn finite_rep(d: &Datum, letters: &[Letter]) -> BushRep {
    let n = letters.len();
    let mut ch = Chain::new(d, letters.to_vec());
    for k in 0..n {
        ch.hat(k, 1);
    }
    let id = identity(1);
    for k in 0..n {
        let l = letters[k];
        if l.is_plus() {
            continue;
        }
        if k > 0 {
            ch.map_all(k, l, k - 1, after(d, letters[k - 1]), &id);
        }
        if k + 1 < n {
            ch.map_all(k, l.star(d), k + 1, before(d, letters[k + 1]), &id);
        }
    }
    ch.rep
}

/// Chain whose plus ends (if any) are fixed-point letters carrying a tag:
/// only the tagged object is present there and the adjacent segment maps
/// onto it.
fn tagged_rep(d: &Datum, letters: &[Letter]) -> BushRep {
    let n = letters.len();
    let mut ch = Chain::new(d, letters.to_vec());
    let is_end = |k: usize| letters[k].is_plus() && (k == 0 || k == n - 1);
    for k in 0..n {
        if is_end(k) {
            ch.single(k, letters[k], 1);
        } else {
            ch.hat(k, 1);
        }
    }
    let id = identity(1);
    for k in 0..n {
        let l = letters[k];
        if l.is_plus() {
            continue;
        }
        if k > 0 {
            let t = if is_end(k - 1) { vec![letters[k - 1]] } else { after(d, letters[k - 1]) };
            ch.map_all(k, l, k - 1, t, &id);
        }
        if k + 1 < n {
            let t = if is_end(k + 1) { vec![letters[k + 1]] } else { before(d, letters[k + 1]) };
            ch.map_all(k, l.star(d), k + 1, t, &id);
        }
    }
    ch.rep
}

/// Rotation of an asymmetric periodic word starting with a plus letter;
/// the twist sits on the last letter of the period.
fn band_rep(d: &Datum, w: &Word, p: &IMat) -> BushRep {
    let w = if w.letters[0].is_plus() { w.clone() } else { w.rotate(1).expect("periodic") };
    let letters = w.letters;
    let n = letters.len();
    let dim = p.len();
    let mut ch = Chain::new(d, letters.clone());
    for k in 0..n {
        ch.hat(k, dim);
    }
    let id = identity(dim);
    for k in 0..n {
        let l = letters[k];
        if l.is_plus() {
            continue;
        }
        let (prev, next) = ((k + n - 1) % n, (k + 1) % n);
        ch.map_all(k, l, prev, after(d, letters[prev]), &id);
        let m = if k == n - 1 { p } else { &id };
        ch.map_all(k, l.star(d), next, before(d, letters[next]), m);
    }
    ch.rep
}

fn block_rep(d: &Datum, w: &Word, [a, b, c, dd]: &[IMat; 4], sizes: (usize, usize, usize, usize)) -> Result<BushRep> {
    let (c_, c2, d_, d2) = sizes;
    let shape = |m: &IMat, r: usize, k: usize| m.len() == r && m.iter().all(|row| row.len() == k);
    if !(shape(a, c_, d_) && shape(b, c_, d2) && shape(c, c2, d_) && shape(dd, c2, d2)) || c_ + c2 != d_ + d2 {
        return Err(Error::IncompatibleLocalSystem);
    }
    let centres = w.spw_centres(d);
    let n = w.len();
    let h = n / 2;
    // 0-based layout: position n-1 and h-1 are the centres.
    let r = w.rotate(centres[0] as i64 + 1)?;
    let mut letters = r.letters;
    letters[n - 1] = letters[n - 1].with_kappa(Sign::Plus);
    letters[h - 1] = letters[h - 1].with_kappa(Sign::Plus);
    let mut ch = Chain::new(d, letters.clone());
    for k in 0..n {
        if k == h - 1 {
            ch.single(k, letters[k], d_);
            ch.single(k, letters[k].hat(), d2);
        } else if k == n - 1 {
            ch.single(k, letters[k], c2);
            ch.single(k, letters[k].hat(), c_);
        } else {
            ch.hat(k, if k < h - 1 { d_ } else { d2 });
        }
    }
    let (ipd, ipd2) = (identity(d_), identity(d2));
    for k in 0..n {
        let l = letters[k];
        if l.is_plus() {
            continue;
        }
        let id = if k < h - 1 { &ipd } else { &ipd2 };
        // Forward vector: predecessor is position k-1 (or the centre n-1).
        if k == 0 {
            let z = letters[n - 1];
            ch.map(k, l, n - 1, z.hat(), a);
            ch.map(k, l, n - 1, z, c);
        } else if k == h {
            ch.map(k, l, h - 1, letters[h - 1].hat(), id);
        } else {
            ch.map_all(k, l, k - 1, after(d, letters[k - 1]), id);
        }
        // Backward vector: successor is position k+1.
        let s = l.star(d);
        if k + 1 == h - 1 {
            ch.map(k, s, h - 1, letters[h - 1], id);
        } else if k + 1 == n - 1 {
            let z = letters[n - 1];
            ch.map(k, s, n - 1, z.hat(), b);
            ch.map(k, s, n - 1, z, dd);
        } else {
            ch.map_all(k, s, k + 1, before(d, letters[k + 1]), id);
        }
    }
    Ok(ch.rep)
}

/// The representation of a tagged arc, read off its crossing sequence.
pub fn rep_of_arc(d: &Datum, a: &TaggedArc) -> BushRep {
    let path = a.path(d);
    let p = path.len();
    let mut rep = BushRep::default();
    let plus_letter = |pm: Pm, n: i64| Letter::Plus { edge: pm.edge, kappa: pm.kappa, r: n };
    // Crossing objects first, then segment objects.
    let mut cross_obj = Vec::with_capacity(p);
    for l in 1..=p {
        let x = path.x(l);
        cross_obj.push(rep.add_object(d, plus_letter(x.label, x.n), 1));
    }
    let positive_punctured = |s: usize, from: usize| -> bool {
        matches!(path.seg(s), SegKind::PuncturedInterior { .. }) && path.x(from).sign() == Some(Sign::Plus)
    };
    let id = identity(1);
    for s in 0..=p {
        let SegKind::Unpunctured { i, from, to } = path.seg(s) else { continue };
        let r_from = (s >= 1).then(|| path.x(s).n);
        let r_to = (s < p).then(|| path.x(s + 1).n);
        let seg = Letter::minus(i, from, to, r_from, r_to);
        let obj = rep.add_object(d, seg, 1);
        if s >= 1 {
            let x = path.x(s);
            rep.map((obj, seg), (cross_obj[s - 1], plus_letter(x.depart, x.n)), &id);
            if s >= 2 && positive_punctured(s - 1, s - 1) {
                let y = path.x(s - 1);
                rep.map((obj, seg), (cross_obj[s - 2], plus_letter(y.arrive, y.n)), &id);
            }
        }
        if s < p {
            let back = seg.tilde(d);
            let x = path.x(s + 1);
            rep.map((obj, back), (cross_obj[s], plus_letter(x.arrive, x.n)), &id);
            if s + 2 <= p && positive_punctured(s + 1, s + 2) {
                let y = path.x(s + 2);
                rep.map((obj, back), (cross_obj[s + 1], plus_letter(y.depart, y.n)), &id);
            }
        }
    }
    rep
}

/// The representation of a tagged arc via its word and local system.
pub fn rep_of_word(d: &Datum, a: &TaggedArc) -> Result<BushRep> {
    let (w, tags) = a.decode(d);
    let local = match tags.as_slice() {
        [] => LocalSystem::None,
        [s] => LocalSystem::Sign(*s),
        [s, t] => LocalSystem::SignPair(*s, *t),
        _ => return Err(Error::IncompatibleLocalSystem),
    };
    build_r(d, &w, &local)
}

/// Generators of morphisms between two objects, as `(source member, target
/// member)` pairs acting by `source -> target` on vectors.
fn generators(d: &Datum, a: &BushObj, b: &BushObj) -> Vec<Vec<(Letter, Letter)>> {
    let mut out = Vec::new();
    if a.key == b.key {
        out.push(members(d, a.key).into_iter().map(|l| (l, l)).collect());
    }
    if a.key.is_minus() && b.key.is_minus() {
        for s1 in members(d, a.key) {
            for s2 in members(d, b.key) {
                if rod_cmp(d, &s1, &s2) == Some(std::cmp::Ordering::Less) {
                    out.push(vec![(s1, s2)]);
                }
            }
        }
    }
    out
}

/// Dimension of the space of morphisms of representations `r1 -> r2`.
pub fn hom_rep_dim(d: &Datum, r1: &BushRep, r2: &BushRep, field: Field) -> usize {
    // Unknowns: one scalar per (generator, source copy, target copy).
    // Action map: (side, rod) -> list of (unknown, source vector, target vector).
    let mut n_unknowns = 0usize;
    let mut action_minus: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut action_plus: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let index = |list: &[BushVec]| -> HashMap<(usize, Letter, usize), usize> {
        list.iter().enumerate().map(|(k, v)| ((v.obj, v.letter, v.copy), k)).collect()
    };
    let (m1, m2, p1, p2) = (index(&r1.minus), index(&r2.minus), index(&r1.plus), index(&r2.plus));
    for (ia, a) in r1.objects.iter().enumerate() {
        for (ib, b) in r2.objects.iter().enumerate() {
            for g in generators(d, a, b) {
                for ta in 0..a.dim {
                    for tb in 0..b.dim {
                        let u = n_unknowns;
                        n_unknowns += 1;
                        for &(s1, s2) in &g {
                            let (src, tgt, act) = if s1.is_minus() {
                                (&m1, &m2, &mut action_minus)
                            } else {
                                (&p1, &p2, &mut action_plus)
                            };
                            if let (Some(&x), Some(&y)) = (src.get(&(ia, s1, ta)), tgt.get(&(ib, s2, tb))) {
                                act.entry((x, y)).or_default().push(u);
                            }
                        }
                    }
                }
            }
        }
    }
    // f as adjacency lists.
    let mut f1_by_minus: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
    for (&(p, m), &x) in &r1.f {
        f1_by_minus.entry(m).or_default().push((p, x));
    }
    let mut f2_by_plus: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
    for (&(p, m), &x) in &r2.f {
        f2_by_plus.entry(p).or_default().push((m, x));
    }
    let mut alpha_plus_from: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (&(x, y), us) in &action_plus {
        for &u in us {
            alpha_plus_from.entry(y).or_default().push((x, u));
        }
    }
    let mut alpha_minus_to: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (&(x, y), us) in &action_minus {
        for &u in us {
            alpha_minus_to.entry(x).or_default().push((y, u));
        }
    }
    // Equation for (target plus vector q of r2, source minus vector m of r1):
    // sum_p alpha+(q<-p) f1(p<-m) - sum_m' f2(q<-m') alpha-(m'<-m) = 0.
    let mut rows = Vec::new();
    for (q, qv) in r2.plus.iter().enumerate() {
        for (m, mv) in r1.minus.iter().enumerate() {
            if qv.rod() != mv.rod() {
                continue;
            }
            let mut row: BTreeMap<usize, i64> = BTreeMap::new();
            for &(p, x) in f1_by_minus.get(&m).into_iter().flatten() {
                for &(src, u) in alpha_plus_from.get(&q).into_iter().flatten() {
                    if src == p {
                        *row.entry(u).or_insert(0) += x;
                    }
                }
            }
            for &(m2, x) in f2_by_plus.get(&q).into_iter().flatten() {
                for &(tgt, u) in alpha_minus_to.get(&m).into_iter().flatten() {
                    if tgt == m2 {
                        *row.entry(u).or_insert(0) -= x;
                    }
                }
            }
            row.retain(|_, v| *v != 0);
            if !row.is_empty() {
                rows.push(row.into_iter().collect::<Vec<_>>());
            }
        }
    }
    n_unknowns - component_rank(&rows, n_unknowns, field)
}

/// Rank of a sparse system, computed per connected block of unknowns.
fn component_rank(rows: &[Vec<(usize, i64)>], cols: usize, field: Field) -> usize {
    let mut parent: Vec<usize> = (0..cols).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for row in rows {
        for w in row.windows(2) {
            let (a, b) = (find(&mut parent, w[0].0), find(&mut parent, w[1].0));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut groups: HashMap<usize, Vec<&Vec<(usize, i64)>>> = HashMap::new();
    for row in rows {
        let r = find(&mut parent, row[0].0);
        groups.entry(r).or_default().push(row);
    }
    groups
        .into_values()
        .map(|g| {
            let mut cols_of: BTreeMap<usize, usize> = BTreeMap::new();
            for row in &g {
                for &(c, _) in row.iter() {
                    let n = cols_of.len();
                    cols_of.entry(c).or_insert(n);
                }
            }
            let local: Vec<Vec<(usize, i64)>> =
                g.iter().map(|row| row.iter().map(|&(c, x)| (cols_of[&c], x)).collect()).collect();
            field.rank_sparse(&local, cols_of.len())
        })
        .sum()
}
