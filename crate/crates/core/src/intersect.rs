//! Bi-quivers of two arcs, their lines and extensions, the morphisms these
//! define between arc modules, and oriented intersection numbers.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::algebra::{block_morphism, f_in, f_out, BlockIdx, Comb, Elt, Marker, Mat};
use crate::arc::{ArcPath, SegKind, TaggedArc};
use crate::datum::{Datum, Edge, Pm, Sign};
use crate::dg::{build_arc_module_with_layout, hom_dim, ArcLayout, DgModule};
use crate::error::{Error, Result};
use crate::linalg::Field;
use crate::words::rod_position;

/// An arc with its crossing sequence and dg module.
#[derive(Clone, Debug)]
pub struct ArcData {
    pub arc: TaggedArc,
    pub path: ArcPath,
    pub module: DgModule,
    pub layout: ArcLayout,
}

/// Where a segment goes, seen from one of its crossings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Dir {
    /// Unpunctured: towards side `j` of the polygon (`0` is the boundary).
    To(u16),
    /// Into the puncture.
    Puncture,
    /// Around the puncture, leaving from the `+` crossing.
    Fwd,
    /// Around the puncture, leaving from the `-` crossing.
    Back,
}

impl Dir {
    fn punctured_rank(self) -> u8 {
        match self {
            Dir::Fwd => 2,
            Dir::Puncture => 1,
            Dir::Back => 0,
            Dir::To(_) => unreachable!(),
        }
    }
}

/// Which side of a crossed arc a segment lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SideKey {
    /// In the polygon of this side.
    Edge(Edge),
    /// In the punctured monogon of this fixed side.
    Punct(Edge),
}

impl ArcData {
    pub fn new(d: &Datum, arc: &TaggedArc) -> Result<ArcData> {
        let path = arc.path(d);
        let (module, layout) = build_arc_module_with_layout(d, arc)?;
        Ok(ArcData { arc: arc.clone(), path, module, layout })
    }

    /// Number of crossings.
    pub fn p(&self) -> usize {
        self.path.len()
    }

    /// Direction of segment `s` leaving crossing `x` (`x` is `s` or `s+1`).
    pub fn dir(&self, s: usize, x: usize) -> Dir {
        match self.path.seg(s) {
            SegKind::Unpunctured { from, to, .. } => {
                if s == x {
                    Dir::To(to)
                } else {
                    Dir::To(from)
                }
            }
            SegKind::PuncturedInterior { .. } => match self.path.x(x).sign() {
                Some(Sign::Plus) => Dir::Fwd,
                _ => Dir::Back,
            },
            SegKind::PuncturedEnd { .. } => Dir::Puncture,
        }
    }

    /// The side of crossing `x` that segment `s` lies on, and the edge it
    /// leaves from.
    pub fn key(&self, s: usize, x: usize) -> SideKey {
        let c = self.path.x(x);
        match self.path.seg(s) {
            SegKind::Unpunctured { .. } => SideKey::Edge(if s == x { c.depart.edge } else { c.arrive.edge }),
            SegKind::PuncturedInterior { edge } | SegKind::PuncturedEnd { edge, .. } => SideKey::Punct(edge),
        }
    }

    fn is_double(&self, x: usize) -> bool {
        self.layout.block_of[x - 1].1 == 2
    }

    fn marker(&self, x: usize) -> Option<Marker> {
        self.is_double(x).then(|| Marker::of_sign(self.path.x(x).sign().expect("fixed crossing")))
    }

    /// Block of the summand class of crossing `x`, for identity-type maps.
    fn vertex_block(&self, x: usize) -> BlockIdx {
        let c = self.path.x(x);
        if self.is_double(x) {
            BlockIdx::Side(c.label.edge)
        } else {
            BlockIdx::One(c.label)
        }
    }

    /// Block of crossing `x` as an end of segment `s`.
    fn seg_block(&self, s: usize, x: usize) -> BlockIdx {
        let c = self.path.x(x);
        if self.is_double(x) {
            BlockIdx::Side(c.label.edge)
        } else if s == x {
            BlockIdx::One(c.depart)
        } else {
            BlockIdx::One(c.arrive)
        }
    }

    /// Crossing at the far end of segment `s` from crossing `x`, if any.
    fn other_end(&self, s: usize, x: usize) -> Option<usize> {
        let y = if s == x { s + 1 } else { s };
        (y >= 1 && y <= self.p()).then_some(y)
    }

    /// The crossing an end segment (`0` or `p`) is attached to.
    fn end_crossing(&self, s: usize) -> usize {
        if s == 0 {
            1
        } else {
            self.p()
        }
    }

    fn is_interior(&self, s: usize) -> bool {
        s >= 1 && s < self.p()
    }

    /// Start and terminal crossings of an interior segment in its positive
    /// orientation.
    fn positive_ends(&self, s: usize) -> (usize, usize) {
        let forward = match self.path.seg(s) {
            SegKind::Unpunctured { from, to, .. } => from < to,
            SegKind::PuncturedInterior { .. } => self.path.x(s).sign() == Some(Sign::Plus),
            SegKind::PuncturedEnd { .. } => unreachable!("end segment"),
        };
        if forward {
            (s, s + 1)
        } else {
            (s + 1, s)
        }
    }

    fn tag(&self, s: usize) -> Option<Sign> {
        match self.path.seg(s) {
            SegKind::PuncturedEnd { tag, .. } => Some(tag),
            _ => None,
        }
    }

    pub fn shift(&self, rho: i64) -> ArcData {
        let mut path = self.path.clone();
        for c in &mut path.crossings {
            c.n += rho;
        }
        ArcData { arc: self.arc.shift(rho), path, module: self.module.shift(rho), layout: self.layout.clone() }
    }
}

/// One side of a vertex: a segment of each arc on the same side of the
/// common crossed arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Side {
    pub sigma_seg: usize,
    pub tau_seg: usize,
    pub key: SideKey,
    pub sigma_dir: Dir,
    pub tau_dir: Dir,
    pub punctured: bool,
    pub splitting: bool,
    pub ending: bool,
    /// For splitting sides: the first arc turns to the right of the second.
    pub sigma_right: bool,
    pub zero_side: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub u: usize,
    pub v: usize,
    pub sides: [Side; 2],
}

impl Vertex {
    pub fn is_zero_point(&self) -> bool {
        self.sides.iter().any(|s| s.zero_side)
    }
    pub fn is_outlet(&self) -> bool {
        self.sides.iter().any(|s| s.splitting)
    }
    fn side_with(&self, a: usize, b: usize) -> Option<usize> {
        self.sides.iter().position(|s| s.sigma_seg == a && s.tau_seg == b)
    }
}

/// A solid arrow; loops have `from == to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Solid {
    pub from: usize,
    pub to: usize,
    pub sigma_seg: usize,
    pub tau_seg: usize,
}

impl Solid {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum DashedKind {
    TwinPlus,
    TwinMinus,
    /// First arc ends at the puncture, second passes around it.
    Ominus,
    /// First arc passes around the puncture, second ends at it.
    Oplus,
}

impl DashedKind {
    pub fn is_twin(self) -> bool {
        matches!(self, DashedKind::TwinPlus | DashedKind::TwinMinus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Dashed {
    pub kind: DashedKind,
    pub from: usize,
    pub to: usize,
    pub sigma_seg: usize,
    pub tau_seg: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BiQuiver {
    pub vertices: Vec<Vertex>,
    pub solid: Vec<Solid>,
    pub dashed: Vec<Dashed>,
    #[serde(skip)]
    index: HashMap<(usize, usize), usize>,
}

impl BiQuiver {
    pub fn build(d: &Datum, a: &ArcData, b: &ArcData) -> BiQuiver {
        let (pa, pb) = (a.p(), b.p());
        let mut vertices = Vec::new();
        let mut index = HashMap::new();
        for u in 1..=pa {
            for v in 1..=pb {
                let (x, y) = (a.path.x(u), b.path.x(v));
                if x.hat != y.hat || x.n != y.n {
                    continue;
                }
                let sides = vertex_sides(d, a, b, u, v);
                index.insert((u, v), vertices.len());
                vertices.push(Vertex { u, v, sides });
            }
        }
        let mut q = BiQuiver { vertices, solid: Vec::new(), dashed: Vec::new(), index };
        q.add_solid(a, b);
        q.add_dashed(a, b);
        q
    }

    pub fn vertex(&self, u: usize, v: usize) -> Option<usize> {
        self.index.get(&(u, v)).copied()
    }

    fn add_solid(&mut self, a: &ArcData, b: &ArcData) {
        for s in 0..=a.p() {
            for t in 0..=b.p() {
                let (ka, kb) = (a.path.seg(s), b.path.seg(t));
                let arrow = match (ka, kb) {
                    (SegKind::Unpunctured { i, from, to }, SegKind::Unpunctured { i: i2, from: f2, to: t2 })
                        if a.is_interior(s) && b.is_interior(t) =>
                    {
                        if i != i2 || from.min(to) != f2.min(t2) || from.max(to) != f2.max(t2) {
                            continue;
                        }
                        let (sa, ta) = a.positive_ends(s);
                        let (sb, tb) = b.positive_ends(t);
                        Some((sa, sb, ta, tb))
                    }
                    (SegKind::PuncturedInterior { edge }, SegKind::PuncturedInterior { edge: e2 }) if edge == e2 => {
                        let (sa, ta) = a.positive_ends(s);
                        let (sb, tb) = b.positive_ends(t);
                        Some((sa, sb, ta, tb))
                    }
                    (SegKind::PuncturedEnd { edge, .. }, SegKind::PuncturedEnd { edge: e2, .. }) if edge == e2 => {
                        let (x, y) = (a.end_crossing(s), b.end_crossing(t));
                        Some((x, y, x, y))
                    }
                    _ => None,
                };
                let Some((u0, v0, u1, v1)) = arrow else { continue };
                if let (Some(from), Some(to)) = (self.vertex(u0, v0), self.vertex(u1, v1)) {
                    self.solid.push(Solid { from, to, sigma_seg: s, tau_seg: t });
                }
            }
        }
    }

    fn add_dashed(&mut self, a: &ArcData, b: &ArcData) {
        for s in 0..=a.p() {
            for t in 0..=b.p() {
                let (ka, kb) = (a.path.seg(s), b.path.seg(t));
                let push = |q: &mut BiQuiver, kind, (u0, v0): (usize, usize), (u1, v1): (usize, usize)| {
                    if let (Some(from), Some(to)) = (q.vertex(u0, v0), q.vertex(u1, v1)) {
                        q.dashed.push(Dashed { kind, from, to, sigma_seg: s, tau_seg: t });
                    }
                };
                match (ka, kb) {
                    (SegKind::PuncturedInterior { edge }, SegKind::PuncturedInterior { edge: e2 }) if edge == e2 => {
                        let (sa, ta) = a.positive_ends(s);
                        let (sb, tb) = b.positive_ends(t);
                        push(self, DashedKind::TwinPlus, (ta, sb), (sa, sb));
                        push(self, DashedKind::TwinMinus, (ta, sb), (ta, tb));
                    }
                    (SegKind::PuncturedEnd { edge, .. }, SegKind::PuncturedInterior { edge: e2 }) if edge == e2 => {
                        let e = a.end_crossing(s);
                        let (sb, tb) = b.positive_ends(t);
                        push(self, DashedKind::Ominus, (e, sb), (e, tb));
                    }
                    (SegKind::PuncturedInterior { edge }, SegKind::PuncturedEnd { edge: e2, .. }) if edge == e2 => {
                        let (sa, ta) = a.positive_ends(s);
                        let e = b.end_crossing(t);
                        push(self, DashedKind::Oplus, (ta, e), (sa, e));
                    }
                    _ => {}
                }
            }
        }
    }

    /// Vertices that are terminals of arrows of the `⊖`/`⊕` kind.
    fn q2o_terminals(&self) -> BTreeSet<usize> {
        self.dashed.iter().filter(|a| !a.kind.is_twin()).map(|a| a.to).collect()
    }

    /// Components of the vertex set under the given arrows.
    fn components(&self, with_q2o: bool, with_twins: bool) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        let join = |p: &mut Vec<usize>, x: usize, y: usize| {
            let (a, b) = (find(p, x), find(p, y));
            if a != b {
                p[a.max(b)] = a.min(b);
            }
        };
        for s in &self.solid {
            join(&mut parent, s.from, s.to);
        }
        for a in &self.dashed {
            if (a.kind.is_twin() && with_twins) || (!a.kind.is_twin() && with_q2o) {
                join(&mut parent, a.from, a.to);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..n {
            let r = find(&mut parent, x);
            groups.entry(r).or_default().push(x);
        }
        groups.into_values().collect()
    }

    /// The lines with their classification.
    pub fn lines(&self, a: &ArcData, b: &ArcData) -> Vec<Line> {
        let terminals = self.q2o_terminals();
        let zero_points: BTreeSet<usize> =
            (0..self.vertices.len()).filter(|&x| self.vertices[x].is_zero_point()).collect();
        let mut big_of = vec![0usize; self.vertices.len()];
        let big = self.components(true, false);
        let big_has_zero: Vec<bool> = big.iter().map(|c| c.iter().any(|x| zero_points.contains(x))).collect();
        for (k, c) in big.iter().enumerate() {
            for &x in c {
                big_of[x] = k;
            }
        }
        self.components(false, false)
            .into_iter()
            .map(|comp| {
                let loops: Vec<usize> = (0..self.solid.len())
                    .filter(|&k| self.solid[k].is_loop() && comp.contains(&self.solid[k].from))
                    .collect();
                let kind = match loops.len() {
                    0 => LineType::A,
                    1 => LineType::D,
                    _ => LineType::DTilde,
                };
                let vertices = self.order_line(&comp);
                let real_h = vertices.iter().all(|x| !zero_points.contains(x) && !terminals.contains(x));
                let loops_tags: Vec<(Sign, Sign)> = loops
                    .iter()
                    .map(|&k| {
                        let s = self.solid[k];
                        (a.tag(s.sigma_seg).unwrap(), b.tag(s.tau_seg).unwrap())
                    })
                    .collect();
                let tagged_h = real_h && loops_tags.iter().all(|(x, y)| x == y);
                let sides = || vertices.iter().flat_map(|&x| self.vertices[x].sides.iter());
                let r_line = sides().all(|s| !s.splitting || s.sigma_right);
                let tagged_r = r_line
                    && sides().filter(|s| s.ending && !s.splitting).all(|s| {
                        match (a.tag(s.sigma_seg), b.tag(s.tau_seg)) {
                            (Some(x), Some(y)) => {
                                matches!(s.sigma_dir, Dir::Puncture) && matches!(s.tau_dir, Dir::Puncture) && x != y
                            }
                            _ => false,
                        }
                    });
                Line {
                    h_line: !big_has_zero[big_of[vertices[0]]],
                    vertices,
                    kind,
                    loops,
                    real_h,
                    tagged_h,
                    r_line,
                    tagged_r,
                }
            })
            .collect()
    }

    /// Vertices of a component in path order (starting from an end).
    fn order_line(&self, comp: &[usize]) -> Vec<usize> {
        if comp.len() == 1 {
            return comp.to_vec();
        }
        let mut nbrs: BTreeMap<usize, Vec<usize>> = comp.iter().map(|&x| (x, Vec::new())).collect();
        for s in &self.solid {
            if !s.is_loop() && nbrs.contains_key(&s.from) {
                nbrs.get_mut(&s.from).unwrap().push(s.to);
                nbrs.get_mut(&s.to).unwrap().push(s.from);
            }
        }
        let start = comp.iter().copied().find(|x| nbrs[x].len() <= 1).unwrap_or(comp[0]);
        let mut out = vec![start];
        let mut seen: BTreeSet<usize> = [start].into();
        let mut cur = start;
        while let Some(&next) = nbrs[&cur].iter().find(|y| !seen.contains(y)) {
            out.push(next);
            seen.insert(next);
            cur = next;
        }
        debug_assert_eq!(out.len(), comp.len(), "line is not a path");
        out
    }

    /// The relation "some dashed arrow runs from a vertex of line `x` into
    /// line `y`", as a list of line index pairs.
    pub fn line_order_edges(&self, lines: &[Line]) -> BTreeSet<(usize, usize)> {
        let mut of = vec![0usize; self.vertices.len()];
        for (k, l) in lines.iter().enumerate() {
            for &x in &l.vertices {
                of[x] = k;
            }
        }
        self.dashed.iter().map(|a| (of[a.from], of[a.to])).collect()
    }
}

fn vertex_sides(d: &Datum, a: &ArcData, b: &ArcData, u: usize, v: usize) -> [Side; 2] {
    let mut out = Vec::with_capacity(2);
    for s in [u - 1, u] {
        for t in [v - 1, v] {
            let key = a.key(s, u);
            if key != b.key(t, v) {
                continue;
            }
            let (da, db) = (a.dir(s, u), b.dir(t, v));
            let punctured = matches!(key, SideKey::Punct(_));
            let equal = da == db;
            let splitting = !equal;
            let ending = splitting || matches!(da, Dir::To(0) | Dir::Puncture);
            let sigma_right = splitting
                && match (key, da, db) {
                    (SideKey::Edge(e), Dir::To(x), Dir::To(y)) => {
                        let m = d.size(e.i);
                        rod_position(m, e.j, x) > rod_position(m, e.j, y)
                    }
                    _ => da.punctured_rank() > db.punctured_rank(),
                };
            let zero_side = splitting && sigma_right && da != Dir::Puncture && db != Dir::Puncture;
            out.push(Side {
                sigma_seg: s,
                tau_seg: t,
                key,
                sigma_dir: da,
                tau_dir: db,
                punctured,
                splitting,
                ending,
                sigma_right,
                zero_side,
            });
        }
    }
    assert_eq!(out.len(), 2, "vertex ({u},{v}) must have two sides");
    [out[0], out[1]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LineType {
    A,
    D,
    DTilde,
}

#[derive(Clone, Debug, Serialize)]
pub struct Line {
    /// Vertex indices in path order.
    pub vertices: Vec<usize>,
    pub kind: LineType,
    /// Indices of loop arrows.
    pub loops: Vec<usize>,
    pub h_line: bool,
    pub real_h: bool,
    pub tagged_h: bool,
    pub r_line: bool,
    pub tagged_r: bool,
}

impl Line {
    pub fn contains(&self, x: usize) -> bool {
        self.vertices.contains(&x)
    }
}

/// An arrow taken by an extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Step {
    Solid(usize),
    Dashed(usize),
}

/// An extension of a line from one splitting side of one of its outlets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extension {
    /// Vertex path, starting at the outlet.
    pub vertices: Vec<usize>,
    pub steps: Vec<Step>,
    /// `c_1 ..= c_{s+1}`.
    pub coeffs: Vec<i64>,
    /// Side index (into the last vertex's sides) of the final splitting
    /// unpunctured side.
    pub terminal_side: usize,
}

impl BiQuiver {
    /// All extensions of `line` from side `side` of outlet `outlet`, in
    /// lexicographic order of their vertex paths.
    pub fn extensions_from(
        &self,
        a: &ArcData,
        b: &ArcData,
        line: &Line,
        outlet: usize,
        side: usize,
    ) -> Vec<Extension> {
        let mut out = Vec::new();
        let mut path = vec![outlet];
        let mut steps = Vec::new();
        self.walk(line, outlet, side, &mut path, &mut steps, &mut out);
        for e in &mut out {
            e.coeffs = self.coefficients(a, b, &e.steps);
        }
        out.sort_by(|x, y| x.vertices.cmp(&y.vertices));
        out
    }

    fn walk(
        &self,
        line: &Line,
        w: usize,
        leave: usize,
        path: &mut Vec<usize>,
        steps: &mut Vec<Step>,
        out: &mut Vec<Extension>,
    ) {
        let side = self.vertices[w].sides[leave];
        let (sa, sb) = (side.sigma_seg, side.tau_seg);
        let ok = |x: usize, path: &[usize]| !line.contains(x) && !path.contains(&x);
        if side.splitting && !side.punctured {
            if self.twins_excluded(steps, path) {
                out.push(Extension {
                    vertices: path.clone(),
                    steps: steps.clone(),
                    coeffs: vec![],
                    terminal_side: leave,
                });
            }
            return;
        }
        if side.splitting {
            let mut arrows: Vec<usize> = (0..self.dashed.len())
                .filter(|&k| {
                    let a = self.dashed[k];
                    a.from == w && a.sigma_seg == sa && a.tau_seg == sb
                })
                .collect();
            arrows.sort_by_key(|&k| self.dashed[k].to);
            for k in arrows {
                let t = self.dashed[k].to;
                if !ok(t, path) {
                    continue;
                }
                let entered = self.vertices[t].side_with(sa, sb).expect("dashed arrow side");
                path.push(t);
                steps.push(Step::Dashed(k));
                self.walk(line, t, 1 - entered, path, steps, out);
                path.pop();
                steps.pop();
            }
            return;
        }
        let Some(k) = self.solid.iter().position(|s| s.sigma_seg == sa && s.tau_seg == sb) else { return };
        let s = self.solid[k];
        if s.is_loop() {
            return;
        }
        let t = if s.from == w { s.to } else { s.from };
        if !ok(t, path) {
            return;
        }
        let entered = self.vertices[t].side_with(sa, sb).expect("solid arrow side");
        path.push(t);
        steps.push(Step::Solid(k));
        self.walk(line, t, 1 - entered, path, steps, out);
        path.pop();
        steps.pop();
    }

    /// No twin arrow used has its twin's terminal on the path.
    fn twins_excluded(&self, steps: &[Step], path: &[usize]) -> bool {
        steps.iter().all(|st| match *st {
            Step::Dashed(k) if self.dashed[k].kind.is_twin() => {
                let a = self.dashed[k];
                self.dashed
                    .iter()
                    .filter(|t| t.kind.is_twin() && t.kind != a.kind && t.from == a.from)
                    .filter(|t| t.sigma_seg == a.sigma_seg && t.tau_seg == a.tau_seg)
                    .all(|t| !path.contains(&t.to))
            }
            _ => true,
        })
    }

    fn coefficients(&self, a: &ArcData, b: &ArcData, steps: &[Step]) -> Vec<i64> {
        let mut c = 1i64;
        let mut out = Vec::with_capacity(steps.len() + 1);
        for st in steps {
            c = match *st {
                Step::Solid(_) => c,
                Step::Dashed(k) => {
                    let x = self.dashed[k];
                    match x.kind {
                        DashedKind::TwinPlus => c,
                        DashedKind::TwinMinus => -c,
                        DashedKind::Ominus => match a.tag(x.sigma_seg) {
                            Some(Sign::Plus) => 0,
                            _ => -c,
                        },
                        DashedKind::Oplus => match b.tag(x.tau_seg) {
                            Some(Sign::Plus) => c,
                            _ => 0,
                        },
                    }
                }
            };
            out.push(c);
        }
        out.push(c);
        out
    }

    /// Outlets of a line with their splitting sides.
    pub fn outlet_sides(&self, line: &Line) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &x in &line.vertices {
            for (k, s) in self.vertices[x].sides.iter().enumerate() {
                if s.splitting {
                    out.push((x, k));
                }
            }
        }
        out
    }

    /// One extension per outlet side, each the first in lexicographic order.
    pub fn default_extension(&self, a: &ArcData, b: &ArcData, line: &Line) -> Result<Vec<Extension>> {
        self.outlet_sides(line)
            .into_iter()
            .map(|(x, k)| {
                self.extensions_from(a, b, line, x, k).into_iter().next().ok_or_else(|| {
                    Error::CaseMismatch
                })
            })
            .collect()
    }

    /// The morphism of a line together with its extensions.
    pub fn f_line(&self, d: &Datum, a: &ArcData, b: &ArcData, line: &Line, exts: &[Extension]) -> Result<Mat> {
        let mut f = Mat::zeros(b.module.len(), a.module.len());
        for &x in &line.vertices {
            add_identity_term(d, a, b, &self.vertices[x], 1, &mut f)?;
        }
        for e in exts {
            let s = e.steps.len();
            for l in 1..=s {
                add_identity_term(d, a, b, &self.vertices[e.vertices[l]], e.coeffs[l - 1], &mut f)?;
            }
            let c = e.coeffs[s];
            let last = &self.vertices[e.vertices[s]];
            let side = last.sides[e.terminal_side];
            let (Dir::To(js), Dir::To(jt)) = (side.sigma_dir, side.tau_dir) else {
                return Err(Error::CaseMismatch);
            };
            if c != 0 && jt != 0 && jt < js {
                let u2 = a.other_end(side.sigma_seg, last.u).expect("interior end");
                let v2 = b.other_end(side.tau_seg, last.v).expect("interior end");
                let m = block_morphism(
                    d,
                    b.seg_block(side.tau_seg, v2),
                    a.seg_block(side.sigma_seg, u2),
                    b.marker(v2),
                    a.marker(u2),
                )?;
                place(&mut f, b.layout.block_of[v2 - 1].0, a.layout.block_of[u2 - 1].0, &m.scale(c));
            }
        }
        Ok(f)
    }
}

fn place(f: &mut Mat, r0: usize, c0: usize, m: &Mat) {
    for (r, c, v) in m.entries() {
        f.add_at(r0 + r, c0 + c, v);
    }
}

/// `c · f^in ∘ ι ∘ f^out` between the summand blocks of a vertex.
fn add_identity_term(d: &Datum, a: &ArcData, b: &ArcData, x: &Vertex, c: i64, f: &mut Mat) -> Result<()> {
    if c == 0 {
        return Ok(());
    }
    let (ya, yb) = (a.vertex_block(x.u), b.vertex_block(x.v));
    let (ca, cb) = (ya.classes(d), yb.classes(d));
    let mut iota = Mat::zeros(cb.len(), ca.len());
    for (r, &zb) in cb.iter().enumerate() {
        for (k, &za) in ca.iter().enumerate() {
            if za == zb {
                iota.set(r, k, Comb::term(Elt::Idem(za), 1));
            }
        }
    }
    let m = f_in(d, yb, b.marker(x.v))?.mul(d, &iota).mul(d, &f_out(d, ya, a.marker(x.u))?);
    place(f, b.layout.block_of[x.v - 1].0, a.layout.block_of[x.u - 1].0, &m.scale(c));
    Ok(())
}

/// How two unpunctured segments in one polygon sit relative to each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairKind {
    /// Crossing in their interiors.
    Cross,
    /// Starting at the boundary marked point and then diverging.
    Wedge,
    /// Sharing a side of the polygon.
    SharedEdge,
    Parallel,
}

/// An unpunctured segment as the pair of its ends `(edge, crossing)`, the
/// crossing being `None` at the boundary.
fn seg_ends(x: &ArcData, s: usize) -> Option<(u16, [(u16, Option<usize>); 2])> {
    let SegKind::Unpunctured { i, from, to } = x.path.seg(s) else { return None };
    let at_from = (s >= 1).then_some(s);
    let at_to = (s < x.p()).then_some(s + 1);
    Some((i, [(from, at_from), (to, at_to)]))
}

pub fn pair_kind(a: &ArcData, s: usize, b: &ArcData, t: usize) -> Option<PairKind> {
    let (i, ea) = seg_ends(a, s)?;
    let (i2, eb) = seg_ends(b, t)?;
    if i != i2 {
        return None;
    }
    let ja = [ea[0].0, ea[1].0];
    let jb = [eb[0].0, eb[1].0];
    if ja.iter().any(|&x| x != 0 && jb.contains(&x)) {
        return Some(PairKind::SharedEdge);
    }
    if ja.contains(&0) && jb.contains(&0) {
        return Some(PairKind::Wedge);
    }
    let (j1, j2) = (ja[0].min(ja[1]), ja[0].max(ja[1]));
    let (j3, j4) = (jb[0].min(jb[1]), jb[0].max(jb[1]));
    if (j1 < j3 && j3 < j2 && j2 < j4) || (j3 < j1 && j1 < j4 && j4 < j2) {
        Some(PairKind::Cross)
    } else {
        Some(PairKind::Parallel)
    }
}

/// One term `f^in ∘ f_{y1,y2} ∘ f^out` from the `b` crossing at `(t, v)`
/// to the `a` crossing at `(s, u)`.
fn psi_term(d: &Datum, a: &ArcData, s: usize, u: usize, b: &ArcData, t: usize, v: usize) -> Result<(Mat, usize, usize)> {
    let m = block_morphism(d, b.seg_block(t, v), a.seg_block(s, u), b.marker(v), a.marker(u))?;
    Ok((m, b.layout.block_of[v - 1].0, a.layout.block_of[u - 1].0))
}

fn end_at(ends: &[(u16, Option<usize>); 2], j: u16) -> Option<usize> {
    ends.iter().find(|e| e.0 == j).and_then(|e| e.1)
}

/// The radical morphism attached to a pair of unpunctured segments, with
/// the degree it has in the Hom complex. Shared-edge pairs use the two-term
/// form; `Ok(None)` when the construction does not apply.
pub fn psi(d: &Datum, a: &ArcData, s: usize, b: &ArcData, t: usize) -> Result<Option<(Mat, i64)>> {
    let Some(kind) = pair_kind(a, s, b, t) else {
        return Err(Error::CaseMismatch);
    };
    let (poly, ea) = seg_ends(a, s).unwrap();
    let (_, eb) = seg_ends(b, t).unwrap();
    let (j1, j2) = (ea[0].0.min(ea[1].0), ea[0].0.max(ea[1].0));
    let (j3, j4) = (eb[0].0.min(eb[1].0), eb[0].0.max(eb[1].0));
    let x = |j| end_at(&ea, j).expect("crossing end");
    let y = |j| end_at(&eb, j).expect("crossing end");
    let mut terms: Vec<(usize, usize)> = Vec::new();
    match kind {
        PairKind::Cross => {
            if j1 < j3 {
                terms.push((y(j3), x(j2)));
            } else {
                terms.push((y(j4), x(j2)));
                if j3 > 0 {
                    terms.push((y(j3), x(j1)));
                }
            }
        }
        PairKind::Wedge => {
            if j4 >= j2 {
                return Ok(None);
            }
            terms.push((y(j4), x(j2)));
        }
        PairKind::SharedEdge => {
            // Common edge `j`, first arc then heads to `js`, second to `jt`.
            let j = if ea.iter().any(|e| e.0 == eb[0].0 && e.0 != 0) { eb[0].0 } else { eb[1].0 };
            let js = if ea[0].0 == j { ea[1].0 } else { ea[0].0 };
            let jt = if eb[0].0 == j { eb[1].0 } else { eb[0].0 };
            if jt != 0 && jt < j {
                terms.push((y(jt), x(j)));
            }
            if js != 0 && j < js {
                terms.push((y(j), x(js)));
            }
            if terms.is_empty() {
                return Ok(Some((Mat::zeros(b.module.len(), a.module.len()), 0)));
            }
        }
        PairKind::Parallel => return Ok(None),
    }
    let mut f = Mat::zeros(b.module.len(), a.module.len());
    let mut deg = None;
    for (v, u) in terms {
        let (m, r0, c0) = psi_term(d, a, s, u, b, t, v)?;
        let ja = ea.iter().find(|e| e.1 == Some(u)).unwrap().0;
        let jb = eb.iter().find(|e| e.1 == Some(v)).unwrap().0;
        let k = d.grading_sum(poly, jb, ja) + a.path.x(u).n - b.path.x(v).n;
        debug_assert!(deg.is_none() || deg == Some(k), "terms of different degree");
        deg.get_or_insert(k);
        place(&mut f, r0, c0, &m);
    }
    Ok(Some((f, deg.unwrap())))
}

/// The shift `ρ` at which two crossing segments meet with index zero,
/// i.e. the Hom degree of their radical morphism; `None` unless they cross.
pub fn crossing_index(d: &Datum, a: &ArcData, s: usize, b: &ArcData, t: usize) -> Option<i64> {
    if pair_kind(a, s, b, t)? != PairKind::Cross {
        return None;
    }
    psi(d, a, s, b, t).ok().flatten().map(|(_, k)| k)
}

/// The three contributions to the intersection number at shift 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Parts {
    pub hlines: usize,
    pub w2_cross: usize,
    pub w2_wedge: usize,
    pub w1: usize,
}

impl Parts {
    pub fn total(&self) -> usize {
        self.hlines + self.w2_cross + self.w2_wedge + self.w1
    }
    pub fn w2(&self) -> usize {
        self.w2_cross + self.w2_wedge
    }
}

/// Counts at shift 0 from precomputed arc data.
pub fn count_parts_data(d: &Datum, a: &ArcData, b: &ArcData) -> Parts {
    let q = BiQuiver::build(d, a, b);
    let hlines = q.lines(a, b).iter().filter(|l| l.tagged_h).count();
    let (mut w2_cross, mut w2_wedge) = (0, 0);
    for s in 0..=a.p() {
        for t in 0..=b.p() {
            match pair_kind(a, s, b, t) {
                Some(PairKind::Cross) => {
                    if let Ok(Some((_, 0))) = psi(d, a, s, b, t) {
                        w2_cross += 1;
                    }
                }
                Some(PairKind::Wedge) => {
                    if let Ok(Some((_, 0))) = psi(d, a, s, b, t) {
                        w2_wedge += 1;
                    }
                }
                _ => {}
            }
        }
    }
    let b1 = b.shift(-1);
    let q1 = BiQuiver::build(d, a, &b1);
    let w1 = q1.lines(a, &b1).iter().filter(|l| l.tagged_r).count();
    Parts { hlines, w2_cross, w2_wedge, w1 }
}

pub fn count_parts(d: &Datum, a: &TaggedArc, b: &TaggedArc) -> Result<Parts> {
    Ok(count_parts_data(d, &ArcData::new(d, a)?, &ArcData::new(d, b)?))
}

/// Oriented intersection number of index `rho`.
pub fn int_number(d: &Datum, a: &TaggedArc, b: &TaggedArc, rho: i64) -> Result<usize> {
    Ok(count_parts(d, a, &b.shift(rho))?.total())
}

/// One row of a theorem check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    #[serde(rename = "arcA")]
    pub arc_a: String,
    #[serde(rename = "arcB")]
    pub arc_b: String,
    pub rho: i64,
    pub int: usize,
    pub homdim: usize,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Compares intersection numbers with Hom dimensions over a window of shifts.
pub fn verify_theorem(
    d: &Datum,
    a: &TaggedArc,
    b: &TaggedArc,
    window: std::ops::RangeInclusive<i64>,
    field: Field,
) -> Result<Vec<ReportRow>> {
    let da = ArcData::new(d, a)?;
    let db = ArcData::new(d, b)?;
    let mut rows = Vec::new();
    for rho in window {
        let int = count_parts_data(d, &da, &db.shift(rho)).total();
        let homdim = hom_dim(d, &da.module, &db.module, rho, field);
        rows.push(ReportRow {
            arc_a: a.compact(),
            arc_b: b.compact(),
            rho,
            int,
            homdim,
            matches: int == homdim,
        });
    }
    Ok(rows)
}

/// `verify_theorem` over many pairs in parallel; rows come back in input
/// order.
pub fn verify_pairs(
    d: &Datum,
    pairs: &[(TaggedArc, TaggedArc)],
    window: std::ops::RangeInclusive<i64>,
    field: Field,
) -> Result<Vec<ReportRow>> {
    use rayon::prelude::*;
    let chunks: Vec<Result<Vec<ReportRow>>> =
        pairs.par_iter().map(|(a, b)| verify_theorem(d, a, b, window.clone(), field)).collect();
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Label of a vertex's crossings, for display.
pub fn crossing_label(x: &ArcData, l: usize) -> Pm {
    x.path.x(l).label
}
