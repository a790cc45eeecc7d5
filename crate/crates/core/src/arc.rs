//! Tagged arcs: canonical arc words with end taggings, their crossing
//! sequences, file formats and generators.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::datum::{ClassId, Datum, Edge, HatId, Pm, Sign};
use crate::error::{Error, Result};
use crate::words::{parse_letters, Letter, Word, WordClass};

/// A tagged arc, stored as its own letter sequence from one end to the
/// other. A punctured end is a plus letter at a fixed point whose sign is
/// the tagging there; interior signs follow the canonical sign rule.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaggedArc {
    pub letters: Vec<Letter>,
}

/// Which kind of ends an arc has.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ArcShape {
    /// Both ends on the boundary.
    Boundary,
    /// Starts on the boundary, ends at a puncture.
    OnePuncture,
    /// Both ends at punctures.
    TwoPunctures,
}

impl TaggedArc {
    pub fn starts_at_puncture(&self) -> bool {
        self.letters[0].is_plus()
    }
    pub fn ends_at_puncture(&self) -> bool {
        self.letters[self.letters.len() - 1].is_plus()
    }
    pub fn shape(&self) -> ArcShape {
        match (self.starts_at_puncture(), self.ends_at_puncture()) {
            (false, false) => ArcShape::Boundary,
            (true, true) => ArcShape::TwoPunctures,
            _ => ArcShape::OnePuncture,
        }
    }

    /// Tags in the order of the arc's ends.
    pub fn tags(&self) -> Vec<Sign> {
        let mut t = Vec::new();
        if self.starts_at_puncture() {
            t.push(self.letters[0].kappa().unwrap());
        }
        if self.ends_at_puncture() && self.letters.len() > 1 {
            t.push(self.letters[self.letters.len() - 1].kappa().unwrap());
        }
        t
    }

    pub fn shift(&self, rho: i64) -> TaggedArc {
        TaggedArc { letters: self.letters.iter().map(|l| l.shift(rho)).collect() }
    }

    /// The same arc traversed backwards (tags stay with their ends).
    pub fn reversed(&self, d: &Datum) -> TaggedArc {
        let n = self.letters.len();
        let letters = (0..n)
            .rev()
            .map(|k| {
                let l = self.letters[k];
                let end = (k == 0 || k == n - 1) && l.is_plus();
                if end {
                    l
                } else {
                    l.star(d)
                }
            })
            .collect();
        TaggedArc { letters }
    }

    /// Chooses the stored orientation: boundary ends first, otherwise the
    /// least letter sequence.
    fn orient(self, d: &Datum) -> TaggedArc {
        let r = self.reversed(d);
        match (self.starts_at_puncture(), self.ends_at_puncture()) {
            (true, false) => r,
            (false, true) => self,
            _ => self.min(r),
        }
    }

    /// The word attached to the arc and the tags in the order of the
    /// word's designated end letters.
    pub fn decode(&self, d: &Datum) -> (Word, Vec<Sign>) {
        let n = self.letters.len();
        match self.shape() {
            ArcShape::Boundary => (Word::finite(self.letters.clone()), vec![]),
            ArcShape::OnePuncture => {
                let a = self.clone().orient(d);
                let mut letters = a.letters[..n - 1].to_vec();
                let c = a.letters[n - 1];
                letters.push(c.with_kappa(Sign::Plus));
                letters.extend(a.letters[..n - 1].iter().rev().map(|l| l.star(d)));
                (Word::finite(letters), vec![c.kappa().unwrap()])
            }
            ArcShape::TwoPunctures => {
                let full = spw_from_half(d, &self.letters);
                let norm = full.normalize_signs(d);
                let p0 = norm.clone();
                let pn = norm.rotate((n - 1) as i64).unwrap();
                let (k0, kn) = (self.letters[0].kappa().unwrap(), self.letters[n - 1].kappa().unwrap());
                if pn < p0 {
                    (pn, vec![kn, k0])
                } else {
                    (p0, vec![k0, kn])
                }
            }
        }
    }

    /// Builds the arc from an arc word and its taggings.
    pub fn encode(d: &Datum, w: &Word, tags: &[Sign]) -> Result<TaggedArc> {
        w.validate(d)?;
        let class = w.classify(d);
        let need = match class {
            WordClass::Afw => 0,
            WordClass::Sfw => 1,
            WordClass::Spw => 2,
            WordClass::Apw => return Err(Error::BandNotArc),
            WordClass::Extensible => return Err(Error::NotArcObject("word is extensible".into())),
        };
        if tags.len() != need {
            return Err(Error::TagCountMismatch { expected: need, found: tags.len() });
        }
        let c = w.canonicalize(d);
        let arc = match class {
            WordClass::Afw => TaggedArc { letters: c.letters },
            WordClass::Sfw => {
                let m = c.len() / 2;
                let mut letters = c.letters[..=m].to_vec();
                letters[m] = letters[m].with_kappa(tags[0]);
                TaggedArc { letters }
            }
            WordClass::Spw => {
                let h = c.len() / 2;
                let mut letters = c.letters[..=h].to_vec();
                letters[0] = letters[0].with_kappa(tags[0]);
                letters[h] = letters[h].with_kappa(tags[1]);
                TaggedArc { letters }.orient(d)
            }
            _ => unreachable!(),
        };
        Ok(arc)
    }

    /// Checks the stored letters form a canonical arc.
    pub fn validate(&self, d: &Datum) -> Result<()> {
        let (w, tags) = self.decode(d);
        let again = TaggedArc::encode(d, &w, &tags)?;
        if &again != self {
            return Err(Error::NotArcObject(format!("not in canonical form: {}", self.compact())));
        }
        Ok(())
    }

    /// Canonical arc from an arbitrary half-word (any signs, any orientation).
    pub fn from_half(d: &Datum, letters: Vec<Letter>) -> Result<TaggedArc> {
        let a = TaggedArc { letters };
        let n = a.letters.len();
        if n == 0 {
            return Err(Error::NotArcObject("empty".into()));
        }
        let tags = a.tags();
        let (w, tags) = match a.shape() {
            ArcShape::Boundary => (Word::finite(a.letters.clone()), vec![]),
            ArcShape::OnePuncture => {
                let a = if a.starts_at_puncture() { a.reversed(d) } else { a };
                let mut letters = a.letters[..n - 1].to_vec();
                letters.push(a.letters[n - 1]);
                letters.extend(a.letters[..n - 1].iter().rev().map(|l| l.star(d)));
                (Word::finite(letters), tags)
            }
            ArcShape::TwoPunctures => {
                if n < 2 {
                    return Err(Error::NotArcObject("puncture arc needs two ends".into()));
                }
                let full = spw_from_half(d, &a.letters);
                full.validate(d)?;
                // Encode against the rotation starting at this arc's first end.
                let norm = full.normalize_signs(d);
                let canon = norm.clone().min(norm.rotate((n - 1) as i64).unwrap());
                let tags = if canon == norm { tags } else { vec![tags[1], tags[0]] };
                (full, tags)
            }
        };
        TaggedArc::encode(d, &w, &tags)
    }

    /// Number of crossings with the arc system.
    pub fn crossings(&self, d: &Datum) -> usize {
        self.path(d).crossings.len()
    }

    pub fn compact(&self) -> String {
        let s: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        s.join(" ")
    }

    /// Shift normal form: the arc shifted so its first crossing has index 0,
    /// together with the shift applied.
    pub fn shift_normal_form(&self) -> (TaggedArc, i64) {
        let r0 = self
            .letters
            .iter()
            .find_map(|l| match *l {
                Letter::Plus { r, .. } => Some(r),
                _ => None,
            })
            .unwrap_or(0);
        (self.shift(-r0), -r0)
    }
}

/// The periodic word of a puncture-to-puncture half word.
fn spw_from_half(d: &Datum, h: &[Letter]) -> Word {
    let n = h.len();
    let mut letters = h.to_vec();
    letters.extend(h[1..n - 1].iter().rev().map(|l| l.star(d)));
    Word::periodic(letters)
}

/// One crossing of an arc with the arc system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Crossing {
    /// Split label of the crossed arc (its sign at fixed points).
    pub label: Pm,
    /// Side the arc arrives from, and the side it departs into.
    pub arrive: Pm,
    pub depart: Pm,
    pub class: ClassId,
    pub hat: HatId,
    pub n: i64,
}

impl Crossing {
    pub fn sign(&self) -> Option<Sign> {
        self.label.kappa
    }
}

/// Segment of an arc between consecutive crossings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SegKind {
    /// Inside polygon `i` from side `from` to side `to` (`0` is the
    /// boundary marked point).
    Unpunctured { i: u16, from: u16, to: u16 },
    /// Inside the once-punctured monogon at a fixed side, between two
    /// crossings of it.
    PuncturedInterior { edge: Edge },
    /// From or to the puncture at a fixed side.
    PuncturedEnd { edge: Edge, tag: Sign },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArcPath {
    /// Crossings `1..=p` stored at indices `0..p`.
    pub crossings: Vec<Crossing>,
    /// Segments `0..=p`; segment `l` runs from crossing `l` to `l+1`.
    pub segments: Vec<SegKind>,
}

impl ArcPath {
    pub fn len(&self) -> usize {
        self.crossings.len()
    }
    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }
    /// Crossing `l` (1-based).
    pub fn x(&self, l: usize) -> &Crossing {
        &self.crossings[l - 1]
    }
    /// Segment between crossings `l` and `l+1`.
    pub fn seg(&self, l: usize) -> SegKind {
        self.segments[l]
    }
    /// Whether segment `l` is an interior punctured one oriented from its
    /// `+` crossing to its `-` crossing.
    pub fn punctured_positive(&self, l: usize) -> bool {
        matches!(self.segments[l], SegKind::PuncturedInterior { .. })
            && self.x(l).sign() == Some(Sign::Plus)
    }
    /// Crossing classes: maximal runs joined by interior punctured segments,
    /// as 1-based inclusive ranges.
    pub fn ell_classes(&self) -> Vec<(usize, usize)> {
        let p = self.len();
        let mut out = Vec::new();
        let mut l = 1;
        while l <= p {
            if l < p && matches!(self.segments[l], SegKind::PuncturedInterior { .. }) {
                out.push((l, l + 1));
                l += 2;
            } else {
                out.push((l, l));
                l += 1;
            }
        }
        out
    }
}

impl TaggedArc {
    /// Crossing sequence and segments.
    pub fn path(&self, d: &Datum) -> ArcPath {
        let mut crossings = Vec::new();
        let mut segments = Vec::new();
        let n = self.letters.len();
        let mk = |label: Pm, arrive: Pm, depart: Pm, r: i64| Crossing {
            label,
            arrive,
            depart,
            class: d.class_of(label),
            hat: d.hat_of(label.edge),
            n: r,
        };
        for (k, l) in self.letters.iter().enumerate() {
            match *l {
                Letter::Minus { i, from, to, .. } => segments.push(SegKind::Unpunctured { i, from, to }),
                Letter::Plus { edge, kappa, r } => {
                    let end = k == 0 || k == n - 1;
                    match kappa {
                        None => {
                            let (a, b) = (Pm::plain(edge), Pm::plain(d.partner(edge)));
                            crossings.push(mk(a, a, b, r));
                        }
                        Some(s) if end => {
                            let x = Pm::signed(edge, s);
                            if k == 0 {
                                segments.push(SegKind::PuncturedEnd { edge, tag: s });
                            }
                            crossings.push(mk(x, x, x, r));
                            if k == n - 1 {
                                segments.push(SegKind::PuncturedEnd { edge, tag: s });
                            }
                        }
                        Some(s) => {
                            let (x, y) = (Pm::signed(edge, s), Pm::signed(edge, s.flip()));
                            crossings.push(mk(x, x, x, r));
                            segments.push(SegKind::PuncturedInterior { edge });
                            crossings.push(mk(y, y, y, r));
                        }
                    }
                }
            }
        }
        ArcPath { crossings, segments }
    }
}

/// JSON letter as in arc files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonLetter {
    Seg { seg: [u16; 3], r: Option<i64>, r2: Option<i64> },
    Plus { plus: [u16; 2], kappa: String, r: i64 },
}

impl JsonLetter {
    pub fn to_letter(&self) -> Result<Letter> {
        Ok(match self {
            JsonLetter::Seg { seg, r, r2 } => Letter::Minus { i: seg[0], from: seg[1], to: seg[2], r_from: *r, r_to: *r2 },
            JsonLetter::Plus { plus, kappa, r } => {
                let kappa = match kappa.as_str() {
                    "" => None,
                    k => Some(Sign::parse(k).ok_or_else(|| Error::BadLetter(format!("kappa `{k}`")))?),
                };
                Letter::Plus { edge: Edge::new(plus[0], plus[1]), kappa, r: *r }
            }
        })
    }
    pub fn from_letter(l: &Letter) -> JsonLetter {
        match *l {
            Letter::Minus { i, from, to, r_from, r_to } => JsonLetter::Seg { seg: [i, from, to], r: r_from, r2: r_to },
            Letter::Plus { edge, kappa, r } => JsonLetter::Plus {
                plus: [edge.i, edge.j],
                kappa: kappa.map(|s| s.as_char().to_string()).unwrap_or_default(),
                r,
            },
        }
    }
}

/// Arc file: a word (full letters or compact tokens) plus taggings.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ArcFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub letters: Option<Vec<JsonLetter>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compact: Option<String>,
    #[serde(default)]
    pub periodic: bool,
    #[serde(default)]
    pub tags: Vec<String>,
}

impl ArcFile {
    pub fn parse(text: &str) -> Result<ArcFile> {
        let t = text.trim();
        if t.starts_with('{') {
            serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()))
        } else {
            Ok(ArcFile { compact: Some(t.to_string()), ..Default::default() })
        }
    }

    pub fn word(&self) -> Result<Word> {
        let letters = match (&self.letters, &self.compact) {
            (Some(ls), _) => ls.iter().map(JsonLetter::to_letter).collect::<Result<Vec<_>>>()?,
            (None, Some(c)) => parse_letters(c)?,
            (None, None) => return Err(Error::Parse("arc file has no letters".into())),
        };
        Ok(Word { letters, periodic: self.periodic })
    }

    pub fn tags(&self) -> Result<Vec<Sign>> {
        self.tags.iter().map(|t| Sign::parse(t).ok_or_else(|| Error::Parse(format!("tag `{t}`")))).collect()
    }

    pub fn to_arc(&self, d: &Datum) -> Result<TaggedArc> {
        TaggedArc::encode(d, &self.word()?, &self.tags()?)
    }

    pub fn from_arc(d: &Datum, a: &TaggedArc) -> ArcFile {
        let (w, tags) = a.decode(d);
        ArcFile {
            letters: Some(w.letters.iter().map(JsonLetter::from_letter).collect()),
            compact: None,
            periodic: w.periodic,
            tags: tags.iter().map(|s| s.as_char().to_string()).collect(),
        }
    }
}

/// Bounds for arc generation.
#[derive(Clone, Copy, Debug)]
pub struct GenBounds {
    /// Maximum number of crossings.
    pub max_crossings: usize,
    /// Indices of the first crossing are drawn from `-max_r..=max_r`.
    pub max_r: i64,
}

impl Default for GenBounds {
    fn default() -> Self {
        GenBounds { max_crossings: 6, max_r: 2 }
    }
}

/// Draws a random arc by a random walk through the polygons.
pub fn random_arc<R: Rng>(d: &Datum, rng: &mut R, b: GenBounds) -> TaggedArc {
    let fixed = d.fixed_points();
    loop {
        if let Some(a) = try_random_arc(d, rng, b, &fixed) {
            return a;
        }
    }
}

fn try_random_arc<R: Rng>(d: &Datum, rng: &mut R, b: GenBounds, fixed: &[Edge]) -> Option<TaggedArc> {
    let r0 = rng.gen_range(-b.max_r..=b.max_r);
    let mut letters = Vec::new();
    let sign = |rng: &mut R| if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
    // Current side and index the next plus letter sits on.
    let mut at: Edge;
    let mut r: i64;
    let mut count = 0usize;
    if !fixed.is_empty() && rng.gen_bool(0.25) {
        let e = *fixed.choose(rng)?;
        letters.push(Letter::plus(e, Some(sign(rng)), r0));
        count += 1;
        at = e;
        r = r0;
        let (to, rr) = step(d, rng, at, r, count >= b.max_crossings);
        letters.push(Letter::segment(d, at.i, at.j, to, r));
        if to == 0 {
            return TaggedArc::from_half(d, letters).ok();
        }
        at = Edge::new(at.i, to);
        r = rr;
    } else {
        let i = rng.gen_range(1..=d.num_polygons() as u16);
        let j = rng.gen_range(1..=d.size(i));
        letters.push(Letter::segment(d, i, 0, j, r0));
        at = Edge::new(i, j);
        r = r0;
    }
    loop {
        let fixed_here = d.is_fixed(at);
        let budget = count + if fixed_here { 2 } else { 1 };
        if fixed_here && (budget > b.max_crossings || rng.gen_bool(0.3)) {
            if count + 1 > b.max_crossings {
                return None;
            }
            letters.push(Letter::plus(at, Some(sign(rng)), r));
            return TaggedArc::from_half(d, letters).ok();
        }
        if budget > b.max_crossings {
            return None;
        }
        count = budget;
        let next = if fixed_here {
            letters.push(Letter::plus(at, Some(Sign::Plus), r));
            at
        } else {
            letters.push(Letter::plus(at, None, r));
            d.partner(at)
        };
        let (to, rr) = step(d, rng, next, r, count >= b.max_crossings);
        letters.push(Letter::segment(d, next.i, next.j, to, r));
        if to == 0 {
            return TaggedArc::from_half(d, letters).ok();
        }
        at = Edge::new(next.i, to);
        r = rr;
    }
}

/// Picks the next side inside the polygon of `from`; forced to the
/// boundary when `stop` is set.
fn step<R: Rng>(d: &Datum, rng: &mut R, from: Edge, r: i64, stop: bool) -> (u16, i64) {
    let m = d.size(from.i);
    let to = if stop {
        0
    } else {
        let choices: Vec<u16> = (0..=m).filter(|&j| j != from.j).collect();
        *choices.choose(rng).unwrap()
    };
    let rr = if to == 0 { 0 } else { d.far_index(from.i, from.j, r, to) };
    (to, rr)
}

/// All canonical arcs with at most `max_crossings` crossings whose first
/// crossing index lies in `-max_r..=max_r`, deduplicated and sorted by
/// (number of crossings, letters).
pub fn enumerate_arcs(d: &Datum, max_crossings: usize, max_r: i64) -> Vec<TaggedArc> {
    let mut found: BTreeSet<(usize, TaggedArc)> = BTreeSet::new();
    let fixed = d.fixed_points();
    for r0 in -max_r..=max_r {
        // Boundary starts.
        for i in 1..=d.num_polygons() as u16 {
            for j in 1..=d.size(i) {
                let start = vec![Letter::segment(d, i, 0, j, r0)];
                grow(d, start, Edge::new(i, j), r0, 0, max_crossings, &mut found);
            }
        }
        // Puncture starts.
        for &e in &fixed {
            for s in [Sign::Plus, Sign::Minus] {
                let first = Letter::plus(e, Some(s), r0);
                for to in 0..=d.size(e.i) {
                    if to == e.j || max_crossings < 1 {
                        continue;
                    }
                    let mut letters = vec![first, Letter::segment(d, e.i, e.j, to, r0)];
                    if to == 0 {
                        finish(d, std::mem::take(&mut letters), 1, &mut found);
                        continue;
                    }
                    let rr = d.far_index(e.i, e.j, r0, to);
                    grow(d, letters, Edge::new(e.i, to), rr, 1, max_crossings, &mut found);
                }
            }
        }
    }
    let mut out: Vec<(usize, TaggedArc)> = found.into_iter().collect();
    out.sort();
    out.into_iter().map(|(_, a)| a).collect()
}

fn grow(
    d: &Datum,
    letters: Vec<Letter>,
    at: Edge,
    r: i64,
    count: usize,
    cap: usize,
    out: &mut BTreeSet<(usize, TaggedArc)>,
) {
    if d.is_fixed(at) {
        if count < cap {
            for s in [Sign::Plus, Sign::Minus] {
                let mut l = letters.clone();
                l.push(Letter::plus(at, Some(s), r));
                finish(d, l, count + 1, out);
            }
        }
        if count + 2 > cap {
            return;
        }
        let mut base = letters;
        base.push(Letter::plus(at, Some(Sign::Plus), r));
        branch(d, base, at, r, count + 2, cap, out);
    } else {
        if count + 1 > cap {
            return;
        }
        let mut base = letters;
        base.push(Letter::plus(at, None, r));
        branch(d, base, d.partner(at), r, count + 1, cap, out);
    }
}

fn branch(
    d: &Datum,
    base: Vec<Letter>,
    from: Edge,
    r: i64,
    count: usize,
    cap: usize,
    out: &mut BTreeSet<(usize, TaggedArc)>,
) {
    for to in 0..=d.size(from.i) {
        if to == from.j {
            continue;
        }
        let mut l = base.clone();
        l.push(Letter::segment(d, from.i, from.j, to, r));
        if to == 0 {
            finish(d, l, count, out);
        } else {
            let rr = d.far_index(from.i, from.j, r, to);
            grow(d, l, Edge::new(from.i, to), rr, count, cap, out);
        }
    }
}

fn finish(d: &Datum, letters: Vec<Letter>, count: usize, out: &mut BTreeSet<(usize, TaggedArc)>) {
    if let Ok(a) = TaggedArc::from_half(d, letters) {
        out.insert((count, a));
    }
}
