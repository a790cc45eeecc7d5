//! Graded skew-gentle datums and their derived index sets.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// An edge label `(i, j)`: polygon `i` (1-based), side `j`.
/// Side `0` is the boundary segment of the polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub i: u16,
    pub j: u16,
}

impl Edge {
    pub const fn new(i: u16, j: u16) -> Self {
        Edge { i, j }
    }
    pub fn is_boundary(self) -> bool {
        self.j == 0
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
    pub fn parse(s: &str) -> Option<Sign> {
        match s {
            "+" => Some(Sign::Plus),
            "-" => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// An element of the split index set: `(i, j)` for non-fixed sides,
/// `(i, j^+)` / `(i, j^-)` at fixed points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pm {
    pub edge: Edge,
    pub kappa: Option<Sign>,
}

impl Pm {
    pub const fn plain(edge: Edge) -> Self {
        Pm { edge, kappa: None }
    }
    pub const fn signed(edge: Edge, s: Sign) -> Self {
        Pm { edge, kappa: Some(s) }
    }
}

impl fmt::Display for Pm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kappa {
            None => write!(f, "({},{})", self.edge.i, self.edge.j),
            Some(s) => write!(f, "({},{}{})", self.edge.i, self.edge.j, s.as_char()),
        }
    }
}

/// Index of an element of the merged class set (non-fixed pairs merged,
/// fixed points split into `+` and `-`).
pub type ClassId = usize;
/// Index of an unsplit class (one per pair or fixed point).
pub type HatId = usize;

/// Raw datum description as read from JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDatum {
    pub polygons: Vec<i64>,
    #[serde(default)]
    pub pairs: Vec<[[i64; 2]; 2]>,
    #[serde(default)]
    pub fixed: Vec<[i64; 2]>,
    #[serde(default)]
    pub gradings: Vec<Vec<i64>>,
}

/// A validated graded skew-gentle datum with its derived index sets.
#[derive(Clone, Debug)]
pub struct Datum {
    raw: RawDatum,
    sizes: Vec<u16>,
    gradings: Vec<Vec<i64>>,
    partner: BTreeMap<Edge, Edge>,
    /// prefix[i-1][j] = sum of the first j gradings of polygon i
    prefix: Vec<Vec<i64>>,
    pms: Vec<Pm>,
    classes: Vec<Vec<Pm>>,
    class_of: BTreeMap<Pm, ClassId>,
    hats: Vec<Vec<Edge>>,
    hat_of: BTreeMap<Edge, HatId>,
}

impl Datum {
    pub fn from_json(text: &str) -> Result<Datum> {
        let raw: RawDatum = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Datum::validate(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.raw).expect("datum serializes")
    }

    pub fn raw(&self) -> &RawDatum {
        &self.raw
    }

    pub fn validate(raw: RawDatum) -> Result<Datum> {
        let mut sizes = Vec::new();
        for (k, &m) in raw.polygons.iter().enumerate() {
            if m <= 0 || m > u16::MAX as i64 {
                return Err(Error::NonPositiveSize { polygon: k + 1, size: m });
            }
            sizes.push(m as u16);
        }
        if raw.gradings.len() != sizes.len() {
            return Err(Error::GradingLengthMismatch {
                polygon: raw.gradings.len().min(sizes.len()) + 1,
                expected: sizes.get(raw.gradings.len()).map(|&m| m as usize - 1).unwrap_or(0),
                found: 0,
            });
        }
        for (k, g) in raw.gradings.iter().enumerate() {
            if g.len() + 1 != sizes[k] as usize {
                return Err(Error::GradingLengthMismatch {
                    polygon: k + 1,
                    expected: sizes[k] as usize - 1,
                    found: g.len(),
                });
            }
        }
        let edge = |p: [i64; 2]| -> Result<Edge> {
            let (i, j) = (p[0], p[1]);
            if i < 1 || i as usize > sizes.len() || j < 1 || j > sizes[i as usize - 1] as i64 {
                return Err(Error::IndexOutOfPolygon { i, j });
            }
            Ok(Edge::new(i as u16, j as u16))
        };
        let mut partner: BTreeMap<Edge, Edge> = BTreeMap::new();
        let bind = |a: Edge, b: Edge, partner: &mut BTreeMap<Edge, Edge>| -> Result<()> {
            for x in [a, b] {
                if partner.contains_key(&x) {
                    return Err(Error::DuplicatePartner(x));
                }
            }
            partner.insert(a, b);
            partner.insert(b, a);
            Ok(())
        };
        for pr in &raw.pairs {
            let (a, b) = (edge(pr[0])?, edge(pr[1])?);
            if a == b {
                bind(a, a, &mut partner).map_err(|_| Error::DuplicatePartner(a))?;
            } else {
                bind(a, b, &mut partner)?;
            }
        }
        for f in &raw.fixed {
            let a = edge(*f)?;
            if partner.contains_key(&a) {
                return Err(Error::DuplicatePartner(a));
            }
            partner.insert(a, a);
        }
        for (k, &m) in sizes.iter().enumerate() {
            for j in 1..=m {
                let e = Edge::new(k as u16 + 1, j);
                if !partner.contains_key(&e) {
                    return Err(Error::MissingPartner(e));
                }
            }
        }
        let prefix = raw
            .gradings
            .iter()
            .map(|g| {
                let mut acc = vec![0i64];
                for &x in g {
                    acc.push(acc.last().unwrap() + x);
                }
                acc
            })
            .collect();

        let mut pms = Vec::new();
        let mut hats: Vec<Vec<Edge>> = Vec::new();
        let mut hat_of = BTreeMap::new();
        for (&e, &p) in &partner {
            if e == p {
                pms.push(Pm::signed(e, Sign::Plus));
                pms.push(Pm::signed(e, Sign::Minus));
            } else {
                pms.push(Pm::plain(e));
            }
            if !hat_of.contains_key(&e) {
                let id = hats.len();
                let mut members = vec![e];
                hat_of.insert(e, id);
                if p != e {
                    members.push(p);
                    hat_of.insert(p, id);
                }
                hats.push(members);
            }
        }
        // Class order: lexicographic in (i, j, kappa) of the least member.
        let mut classes: Vec<Vec<Pm>> = Vec::new();
        for h in &hats {
            let e = h[0];
            if h.len() == 1 {
                classes.push(vec![Pm::signed(e, Sign::Plus)]);
                classes.push(vec![Pm::signed(e, Sign::Minus)]);
            } else {
                classes.push(h.iter().map(|&x| Pm::plain(x)).collect());
            }
        }
        classes.sort();
        let mut class_of = BTreeMap::new();
        for (c, members) in classes.iter().enumerate() {
            for &x in members {
                class_of.insert(x, c);
            }
        }
        Ok(Datum {
            gradings: raw.gradings.clone(),
            raw,
            sizes,
            partner,
            prefix,
            pms,
            classes,
            class_of,
            hats,
            hat_of,
        })
    }

    pub fn num_polygons(&self) -> usize {
        self.sizes.len()
    }
    pub fn size(&self, i: u16) -> u16 {
        self.sizes[i as usize - 1]
    }
    pub fn sizes(&self) -> &[u16] {
        &self.sizes
    }
    pub fn gradings(&self, i: u16) -> &[i64] {
        &self.gradings[i as usize - 1]
    }
    /// All sides `(i, j)` with `j >= 1`.
    pub fn omega(&self) -> impl Iterator<Item = Edge> + '_ {
        self.partner.keys().copied()
    }
    pub fn partner(&self, e: Edge) -> Edge {
        self.partner[&e]
    }
    pub fn is_fixed(&self, e: Edge) -> bool {
        !e.is_boundary() && self.partner.get(&e) == Some(&e)
    }
    pub fn fixed_points(&self) -> Vec<Edge> {
        self.omega().filter(|&e| self.is_fixed(e)).collect()
    }
    pub fn contains(&self, e: Edge) -> bool {
        e.i >= 1 && (e.i as usize) <= self.sizes.len() && e.j <= self.size(e.i)
    }
    /// The split index set, sorted.
    pub fn omega_pm(&self) -> &[Pm] {
        &self.pms
    }
    /// `Ω±(i,j)`: one element for non-fixed sides, two at fixed points.
    pub fn split(&self, e: Edge) -> Vec<Pm> {
        if self.is_fixed(e) {
            vec![Pm::signed(e, Sign::Plus), Pm::signed(e, Sign::Minus)]
        } else {
            vec![Pm::plain(e)]
        }
    }
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }
    pub fn class_members(&self, c: ClassId) -> &[Pm] {
        &self.classes[c]
    }
    pub fn class_of(&self, x: Pm) -> ClassId {
        self.class_of[&x]
    }
    pub fn class_label(&self, c: ClassId) -> String {
        let m = &self.classes[c];
        if m.len() == 1 {
            m[0].to_string()
        } else {
            let parts: Vec<String> = m.iter().map(|x| x.to_string()).collect();
            format!("{{{}}}", parts.join(","))
        }
    }
    pub fn num_hats(&self) -> usize {
        self.hats.len()
    }
    pub fn hat_of(&self, e: Edge) -> HatId {
        self.hat_of[&e]
    }
    pub fn hat_members(&self, h: HatId) -> &[Edge] {
        &self.hats[h]
    }
    pub fn hat_is_fixed(&self, h: HatId) -> bool {
        self.hats[h].len() == 1
    }

    /// Sum of the gradings from side `j1` to side `j2` (`j1 <= j2`), i.e. the
    /// degree of the radical element between those sides.
    pub fn grading_sum(&self, i: u16, j1: u16, j2: u16) -> i64 {
        let p = &self.prefix[i as usize - 1];
        p[j2 as usize - 1] - p[j1 as usize - 1]
    }

    /// Index at the far end of an interior segment `(i,j1)^r1 - (i,j2)`.
    /// Both `j1, j2 >= 1` and distinct.
    pub fn far_index(&self, i: u16, j1: u16, r1: i64, j2: u16) -> i64 {
        if j1 < j2 {
            r1 - self.grading_sum(i, j1, j2) + 1
        } else {
            r1 + self.grading_sum(i, j2, j1) - 1
        }
    }
}

/// Graded quiver with special vertices and relations.
#[derive(Clone, Debug, Serialize)]
pub struct QuiverTriple {
    /// Vertex labels (one per unsplit class).
    pub vertices: Vec<String>,
    /// `(label, source, target, degree)`.
    pub arrows: Vec<(String, usize, usize, i64)>,
    pub special: Vec<usize>,
    /// Forbidden length-two paths, as pairs of arrow indices (first, second).
    pub relations: Vec<(usize, usize)>,
}

impl Datum {
    pub fn quiver_triple(&self) -> QuiverTriple {
        let vertices = self
            .hats
            .iter()
            .map(|h| h.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("~"))
            .collect();
        let mut arrows = Vec::new();
        let mut arrow_of = BTreeMap::new();
        for e in self.omega() {
            if e.j >= 2 {
                let prev = Edge::new(e.i, e.j - 1);
                arrow_of.insert(e, arrows.len());
                arrows.push((
                    format!("a{}", e),
                    self.hat_of(prev),
                    self.hat_of(e),
                    self.gradings(e.i)[e.j as usize - 2],
                ));
            }
        }
        let special = (0..self.hats.len()).filter(|&h| self.hat_is_fixed(h)).collect();
        let mut relations = Vec::new();
        for e1 in self.omega() {
            let e2 = self.partner(e1);
            let next = Edge::new(e2.i, e2.j + 1);
            if let (Some(&a), Some(&b)) = (arrow_of.get(&e1), arrow_of.get(&next)) {
                relations.push((a, b));
            }
        }
        QuiverTriple { vertices, arrows, special, relations }
    }
}
