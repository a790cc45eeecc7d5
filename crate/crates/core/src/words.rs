//! The bush of a datum and the word calculus on it.
//!
//! A plus letter `((i,j^κ), r)` lives in the rod `S^+_{(i,j),r}`; a minus
//! letter is an oriented graded segment `(i,j)^r -> (i,j')` in the rod
//! `S^-_{(i,j),r}`. Boundary ends (`j = 0`) carry no index.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use crate::datum::{Datum, Edge, Pm, Sign};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    Plus { edge: Edge, kappa: Option<Sign>, r: i64 },
    Minus { i: u16, from: u16, to: u16, r_from: Option<i64>, r_to: Option<i64> },
}

/// Rod index `((i,j), r)`; `r` is `None` on boundary sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rod {
    pub edge: Edge,
    pub r: Option<i64>,
}

impl Letter {
    pub fn plus(edge: Edge, kappa: Option<Sign>, r: i64) -> Letter {
        Letter::Plus { edge, kappa, r }
    }

    /// Minus letter from `(i,from)` to `(i,to)`; indices are dropped at
    /// boundary ends.
    pub fn minus(i: u16, from: u16, to: u16, r_from: Option<i64>, r_to: Option<i64>) -> Letter {
        Letter::Minus {
            i,
            from,
            to,
            r_from: if from == 0 { None } else { r_from },
            r_to: if to == 0 { None } else { r_to },
        }
    }

    /// Interior-or-boundary minus letter with the far index derived from
    /// the grading rule. `r` is the index at `from` (or at `to` when `from`
    /// is the boundary).
    pub fn segment(d: &Datum, i: u16, from: u16, to: u16, r: i64) -> Letter {
        if from == 0 {
            Letter::minus(i, 0, to, None, Some(r))
        } else if to == 0 {
            Letter::minus(i, from, 0, Some(r), None)
        } else {
            Letter::minus(i, from, to, Some(r), Some(d.far_index(i, from, r, to)))
        }
    }

    pub fn is_plus(&self) -> bool {
        matches!(self, Letter::Plus { .. })
    }
    pub fn is_minus(&self) -> bool {
        !self.is_plus()
    }

    pub fn rod(&self) -> Rod {
        match *self {
            Letter::Plus { edge, r, .. } => Rod { edge, r: Some(r) },
            Letter::Minus { i, from, r_from, .. } => Rod { edge: Edge::new(i, from), r: r_from },
        }
    }

    /// `~`: partner for non-fixed plus letters, reversal for minus letters.
    pub fn tilde(&self, d: &Datum) -> Letter {
        match *self {
            Letter::Plus { edge, kappa, r } => {
                if d.is_fixed(edge) {
                    *self
                } else {
                    Letter::Plus { edge: d.partner(edge), kappa, r }
                }
            }
            Letter::Minus { i, from, to, r_from, r_to } => {
                Letter::Minus { i, from: to, to: from, r_from: r_to, r_to: r_from }
            }
        }
    }

    /// `∧`: swaps the sign of fixed-point plus letters.
    pub fn hat(&self) -> Letter {
        match *self {
            Letter::Plus { edge, kappa: Some(s), r } => Letter::Plus { edge, kappa: Some(s.flip()), r },
            _ => *self,
        }
    }

    /// `* = (~)∧`.
    pub fn star(&self, d: &Datum) -> Letter {
        self.tilde(d).hat()
    }

    /// The letter with its sign forgotten (class up to `∧`).
    pub fn strip(&self) -> Letter {
        match *self {
            Letter::Plus { edge, kappa: Some(_), r } => Letter::Plus { edge, kappa: Some(Sign::Plus), r },
            _ => *self,
        }
    }

    pub fn with_kappa(&self, s: Sign) -> Letter {
        match *self {
            Letter::Plus { edge, kappa: Some(_), r } => Letter::Plus { edge, kappa: Some(s), r },
            _ => *self,
        }
    }

    pub fn kappa(&self) -> Option<Sign> {
        match *self {
            Letter::Plus { kappa, .. } => kappa,
            _ => None,
        }
    }

    pub fn shift(&self, rho: i64) -> Letter {
        match *self {
            Letter::Plus { edge, kappa, r } => Letter::Plus { edge, kappa, r: r + rho },
            Letter::Minus { i, from, to, r_from, r_to } => Letter::Minus {
                i,
                from,
                to,
                r_from: r_from.map(|x| x + rho),
                r_to: r_to.map(|x| x + rho),
            },
        }
    }

    /// Split element of a plus letter.
    pub fn pm(&self) -> Option<Pm> {
        match *self {
            Letter::Plus { edge, kappa, .. } => Some(Pm { edge, kappa }),
            _ => None,
        }
    }

    /// Checks the letter against the datum (ranges, signs at fixed points,
    /// grading identity for interior segments).
    pub fn check(&self, d: &Datum) -> Result<()> {
        match *self {
            Letter::Plus { edge, kappa, .. } => {
                if edge.j == 0 || !d.contains(edge) {
                    return Err(Error::IndexOutOfPolygon { i: edge.i as i64, j: edge.j as i64 });
                }
                if d.is_fixed(edge) != kappa.is_some() {
                    return Err(Error::BadLetter(format!("sign mismatch at {}", self)));
                }
                Ok(())
            }
            Letter::Minus { i, from, to, r_from, r_to } => {
                for j in [from, to] {
                    if !d.contains(Edge::new(i, j)) {
                        return Err(Error::IndexOutOfPolygon { i: i as i64, j: j as i64 });
                    }
                }
                if from == to {
                    return Err(Error::BadLetter(format!("degenerate segment {}", self)));
                }
                if (from == 0) != r_from.is_none() || (to == 0) != r_to.is_none() {
                    return Err(Error::BadLetter(format!("index placement in {}", self)));
                }
                if let Some(v) = segment_grading_violation(d, self) {
                    return Err(Error::BadLetter(v));
                }
                Ok(())
            }
        }
    }
}

/// Checks `r1 - r2 = Σ χ - 1` for interior segments. Returns a report on
/// violation, `None` when fine or not applicable.
pub fn segment_grading_violation(d: &Datum, l: &Letter) -> Option<String> {
    if let Letter::Minus { i, from, to, r_from: Some(a), r_to: Some(b) } = *l {
        let (j1, r1, j2, r2) = if from < to { (from, a, to, b) } else { (to, b, from, a) };
        let want = d.grading_sum(i, j1, j2) - 1;
        if r1 - r2 != want {
            return Some(format!("segment {}: r1-r2 = {} but grading gives {}", l, r1 - r2, want));
        }
    }
    None
}

/// Position of `(i,j) -> (i,j')` in the rod order of `S^-_{(i,j),r}`:
/// `j-1, j-2, ..., 0, m, ..., j+1`.
pub fn rod_position(m: u16, j: u16, target: u16) -> u16 {
    ((j as i32 - target as i32).rem_euclid(m as i32 + 1)) as u16
}

/// Order of two minus letters in a common rod.
pub fn rod_cmp(d: &Datum, a: &Letter, b: &Letter) -> Option<Ordering> {
    match (*a, *b) {
        (Letter::Minus { i, from, to: t1, .. }, Letter::Minus { to: t2, .. }) if a.rod() == b.rod() => {
            let m = d.size(i);
            Some(rod_position(m, from, t1).cmp(&rod_position(m, from, t2)))
        }
        _ => None,
    }
}

/// `a* | b`: the two letters meet in one rod from opposite sides.
pub fn adjacent(d: &Datum, a: &Letter, b: &Letter) -> bool {
    let s = a.star(d);
    s.is_plus() != b.is_plus() && s.rod() == b.rod() && s.rod().r.is_some()
}

/// Order on classes of letter sequences (up to `∧`). `None` when the
/// first letters do not share a rod.
pub fn cmp_classes<I, J>(d: &Datum, v: I, w: J) -> Option<Ordering>
where
    I: IntoIterator<Item = Letter>,
    J: IntoIterator<Item = Letter>,
{
    let mut v = v.into_iter();
    let mut w = w.into_iter();
    let mut first = true;
    loop {
        match (v.next(), w.next()) {
            (None, None) => return Some(Ordering::Equal),
            (None, Some(y)) => return Some(if y.is_minus() { Ordering::Less } else { Ordering::Greater }),
            (Some(x), None) => return Some(if x.is_plus() { Ordering::Less } else { Ordering::Greater }),
            (Some(x), Some(y)) => {
                if first && (x.rod() != y.rod() || x.is_plus() != y.is_plus()) {
                    return None;
                }
                first = false;
                if x.strip() == y.strip() {
                    continue;
                }
                // Letters of one plus rod agree up to ∧, so a difference
                // after an equal prefix sits in a minus rod.
                return rod_cmp(d, &x, &y);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordKind {
    Finite,
    Periodic,
}

/// A finite word, or one period of a periodic word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word {
    pub letters: Vec<Letter>,
    pub periodic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WordClass {
    /// Asymmetric inextensible finite word.
    Afw,
    /// Symmetric inextensible finite word.
    Sfw,
    /// Asymmetric periodic word.
    Apw,
    /// Symmetric periodic word.
    Spw,
    /// Finite word that is not inextensible.
    Extensible,
}

impl Word {
    pub fn finite(letters: Vec<Letter>) -> Word {
        Word { letters, periodic: false }
    }
    pub fn periodic(letters: Vec<Letter>) -> Word {
        Word { letters, periodic: true }
    }
    pub fn len(&self) -> usize {
        self.letters.len()
    }
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Checks letters and adjacency (and minimal period for periodic words).
    pub fn validate(&self, d: &Datum) -> Result<()> {
        if self.letters.is_empty() {
            return Err(Error::NotArcObject("empty word".into()));
        }
        for l in &self.letters {
            l.check(d)?;
        }
        let n = self.letters.len();
        for k in 0..n - 1 {
            if !adjacent(d, &self.letters[k], &self.letters[k + 1]) {
                return Err(Error::BrokenAdjacency(k + 1));
            }
        }
        if self.periodic {
            if !adjacent(d, &self.letters[n - 1], &self.letters[0]) {
                return Err(Error::BrokenAdjacency(n));
            }
            let s: Vec<Letter> = self.letters.iter().map(Letter::strip).collect();
            for p in 1..n {
                if n % p == 0 && (0..n).all(|k| s[k] == s[(k + p) % n]) {
                    return Err(Error::NonMinimalPeriod);
                }
            }
        }
        Ok(())
    }

    /// `w^* = w_m^* ... w_1^*`.
    pub fn invert(&self, d: &Datum) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.star(d)).collect(), periodic: self.periodic }
    }

    pub fn shift(&self, rho: i64) -> Word {
        Word { letters: self.letters.iter().map(|l| l.shift(rho)).collect(), periodic: self.periodic }
    }

    /// `w{p}`: the periodic word starting at position `p`.
    pub fn rotate(&self, p: i64) -> Result<Word> {
        if !self.periodic {
            return Err(Error::RotateOnFinite);
        }
        let n = self.letters.len() as i64;
        let p = p.rem_euclid(n) as usize;
        let mut letters = self.letters[p..].to_vec();
        letters.extend_from_slice(&self.letters[..p]);
        Ok(Word { letters, periodic: true })
    }

    fn stripped(&self) -> Vec<Letter> {
        self.letters.iter().map(Letter::strip).collect()
    }

    pub fn classify(&self, d: &Datum) -> WordClass {
        let inv = self.invert(d).stripped();
        if self.periodic {
            let s = self.stripped();
            let n = s.len();
            let sym = (0..n).any(|p| (0..n).all(|k| inv[k] == s[(k + p) % n]));
            if sym {
                WordClass::Spw
            } else {
                WordClass::Apw
            }
        } else {
            let first = self.letters[0];
            let last_star = self.letters[self.len() - 1].star(d);
            let bd = |l: Letter| l.is_minus() && l.rod().edge.is_boundary();
            if !(bd(first) && bd(last_star)) {
                WordClass::Extensible
            } else if inv == self.stripped() {
                WordClass::Sfw
            } else {
                WordClass::Afw
            }
        }
    }

    /// Sign choice at position `k` (a fixed-point plus letter): `+` iff the
    /// forward tail is at least the reversed head.
    pub fn preferred_sign(&self, d: &Datum, k: usize) -> Sign {
        let n = self.letters.len();
        let o = if self.periodic {
            let tail = (1..=n).map(|t| self.letters[(k + t) % n]);
            let head = (1..=n).map(|t| self.letters[(k + n * n - t) % n].star(d));
            cmp_classes(d, tail, head)
        } else {
            let tail = self.letters[k + 1..].iter().copied();
            let head = self.letters[..k].iter().rev().map(|l| l.star(d));
            cmp_classes(d, tail, head)
        };
        match o {
            Some(Ordering::Less) => Sign::Minus,
            _ => Sign::Plus,
        }
    }

    /// Applies the sign rule at every fixed-point plus letter.
    pub fn normalize_signs(&self, d: &Datum) -> Word {
        let mut out = self.clone();
        for k in 0..self.letters.len() {
            if self.letters[k].kappa().is_some() {
                out.letters[k] = self.letters[k].with_kappa(self.preferred_sign(d, k));
            }
        }
        out
    }

    /// Canonical representative of `[w] ∪ [w^*]` (and rotations).
    pub fn canonicalize(&self, d: &Datum) -> Word {
        let a = self.normalize_signs(d);
        let b = self.invert(d).normalize_signs(d);
        if !self.periodic {
            return a.min(b);
        }
        if self.classify(d) == WordClass::Spw {
            return a.spw_rotation(d);
        }
        let n = self.letters.len() as i64;
        (0..n)
            .flat_map(|p| [a.rotate(p).unwrap(), b.rotate(p).unwrap()])
            .min()
            .expect("non-empty")
    }

    /// Positions of the two symmetry centres of a symmetric periodic word.
    pub fn spw_centres(&self, d: &Datum) -> Vec<usize> {
        let n = self.letters.len();
        let s = self.stripped();
        (0..n)
            .filter(|&k| {
                s[k].kappa().is_some() && (1..n).all(|t| s[(k + t) % n] == s[(k + n - t) % n].star(d).strip())
            })
            .collect()
    }

    /// Rotation of a symmetric periodic word starting at a centre, least
    /// in the letter order.
    fn spw_rotation(&self, d: &Datum) -> Word {
        self.spw_centres(d)
            .into_iter()
            .map(|c| self.rotate(c as i64).unwrap())
            .min()
            .expect("symmetric periodic words have centres")
    }

    pub fn compact(&self) -> String {
        let s: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        s.join(" ")
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Letter::Plus { edge, kappa, r } => {
                let k = kappa.map(|s| s.as_char().to_string()).unwrap_or_default();
                write!(f, "p({},{}{}@{})", edge.i, edge.j, k, r)
            }
            Letter::Minus { i, from, to, r_from, r_to } => {
                let a = r_from.map(|r| format!("@{r}")).unwrap_or_default();
                let b = r_to.map(|r| format!("@{r}")).unwrap_or_default();
                write!(f, "m({},{}{}>{},{}{})", i, from, a, i, to, b)
            }
        }
    }
}

/// Parses one compact token: `p(1,3+@2)` or `m(1,1@0>1,3@2)`.
pub fn parse_letter(tok: &str) -> Result<Letter> {
    let bad = || Error::BadLetter(tok.to_string());
    let tok = tok.trim();
    let (kind, rest) = tok.split_at(1);
    let body = rest.strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
    let end = |s: &str| -> Result<(u16, u16, Option<Sign>, Option<i64>)> {
        let (ij, r) = match s.split_once('@') {
            Some((a, b)) => (a, Some(b.trim().parse::<i64>().map_err(|_| bad())?)),
            None => (s, None),
        };
        let (i, j) = ij.split_once(',').ok_or_else(bad)?;
        let j = j.trim();
        let (j, kappa) = if let Some(x) = j.strip_suffix('+') {
            (x, Some(Sign::Plus))
        } else if let Some(x) = j.strip_suffix('-') {
            (x, Some(Sign::Minus))
        } else {
            (j, None)
        };
        Ok((i.trim().parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?, kappa, r))
    };
    match kind {
        "p" => {
            let (i, j, kappa, r) = end(body)?;
            Ok(Letter::Plus { edge: Edge::new(i, j), kappa, r: r.ok_or_else(bad)? })
        }
        "m" => {
            let (a, b) = body.split_once('>').ok_or_else(bad)?;
            let (i1, j1, k1, r1) = end(a)?;
            let (i2, j2, k2, r2) = end(b)?;
            if i1 != i2 || k1.is_some() || k2.is_some() {
                return Err(bad());
            }
            Ok(Letter::Minus { i: i1, from: j1, to: j2, r_from: r1, r_to: r2 })
        }
        _ => Err(bad()),
    }
}

pub fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    s.split_whitespace().map(parse_letter).collect()
}

/// A random finite word (not necessarily inextensible) of at most
/// `max_len` letters, built by a walk through the bush.
pub fn random_word<R: rand::Rng>(d: &Datum, rng: &mut R, max_len: usize) -> Word {
    let r0 = rng.gen_range(-2..=2i64);
    let i = rng.gen_range(1..=d.num_polygons() as u16);
    let m = d.size(i);
    let sign = |rng: &mut R, e: Edge| d.is_fixed(e).then(|| if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus });
    let pick = |rng: &mut R, i: u16, j: u16| loop {
        let t = rng.gen_range(0..=d.size(i));
        if t != j {
            break t;
        }
    };
    let mut letters = Vec::new();
    let j = rng.gen_range(0..=m);
    if j != 0 && rng.gen_bool(0.3) {
        let e = Edge::new(i, j);
        letters.push(Letter::plus(e, sign(rng, e), r0));
    } else {
        let to = pick(rng, i, j);
        letters.push(Letter::segment(d, i, j, to, r0));
    }
    let target = rng.gen_range(1..=max_len.max(1));
    while letters.len() < target {
        match *letters.last().unwrap() {
            Letter::Minus { i, to, r_to, .. } => {
                if to == 0 {
                    break;
                }
                let e = Edge::new(i, to);
                letters.push(Letter::plus(e, sign(rng, e), r_to.unwrap()));
            }
            p @ Letter::Plus { r, .. } => {
                let s = p.star(d).rod().edge;
                let to = pick(rng, s.i, s.j);
                letters.push(Letter::segment(d, s.i, s.j, to, r));
            }
        }
    }
    Word::finite(letters)
}
