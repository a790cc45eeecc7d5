#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use strandkit_core::arc::{random_arc, GenBounds};
use strandkit_core::words::parse_letters;
use strandkit_core::algebra::{f_block, f_in, f_out};
use strandkit_core::dg::is_cocycle;
use strandkit_core::intersect::psi;
use strandkit_core::{
    build_arc_module, examples, hom_dim, ArcData, BiQuiver, BlockIdx, Datum, DgModule, Field, Letter, Marker, TaggedArc,
};

pub const GENTLE: &str = r#"{"polygons":[4,2],"pairs":[[[1,1],[2,1]],[[1,3],[2,2]],[[1,2],[1,4]]],"fixed":[],"gradings":[[1,0,-1],[2]]}"#;
pub const TWO_FIXED: &str = r#"{"polygons":[3,2,1],"pairs":[[[1,2],[2,1]],[[1,3],[3,1]]],"fixed":[[1,1],[2,2]],"gradings":[[1,-1],[1],[]]}"#;

/// The four datums used across the suites.
pub fn datums() -> Vec<(&'static str, Datum)> {
    vec![
        ("running", examples::running_datum()),
        ("d4", examples::d4_datum()),
        ("gentle", Datum::from_json(GENTLE).unwrap()),
        ("two-fixed", Datum::from_json(TWO_FIXED).unwrap()),
    ]
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_arcs(d: &Datum, seed: u64, n: usize) -> Vec<TaggedArc> {
    let mut r = rng(seed);
    (0..n).map(|_| random_arc(d, &mut r, GenBounds::default())).collect()
}

pub fn arc(d: &Datum, s: &str) -> TaggedArc {
    TaggedArc::from_half(d, parse_letters(s).unwrap()).unwrap()
}

/// `dim Hom` in both directions against every probe, for each shift.
pub fn profile(d: &Datum, m: &DgModule, probes: &[DgModule], window: std::ops::RangeInclusive<i64>) -> Vec<usize> {
    let mut out = Vec::new();
    for y in probes {
        for r in window.clone() {
            out.push(hom_dim(d, m, y, r, Field::Rational));
            out.push(hom_dim(d, y, m, r, Field::Rational));
        }
    }
    out
}

pub fn probes(d: &Datum, arcs: &[TaggedArc]) -> Vec<DgModule> {
    arcs.iter().map(|a| build_arc_module(d, a).unwrap()).collect()
}

/// The arc, or its reverse, that starts with a segment from the boundary.
pub fn boundary_start(d: &Datum, a: &TaggedArc) -> Option<TaggedArc> {
    let starts = |x: &TaggedArc| matches!(x.letters[0], Letter::Minus { from: 0, .. });
    if starts(a) {
        return Some(a.clone());
    }
    let r = a.reversed(d);
    starts(&r).then_some(r)
}

/// Joins `tgt` and `src` at a common boundary start: follow `tgt`
/// backwards, cross the polygon from its first edge to `src`'s first
/// edge, then follow `src`. Returns the join and `src` shifted to fit it.
pub fn join_at_start(d: &Datum, src: &TaggedArc, tgt: &TaggedArc) -> Option<(TaggedArc, TaggedArc)> {
    let (Letter::Minus { i, to: ja, r_to: Some(ra), .. }, Letter::Minus { i: ib, to: jb, r_to: Some(rb), .. }) =
        (src.letters[0], tgt.letters[0])
    else {
        return None;
    };
    if i != ib || ja == jb {
        return None;
    }
    let seg = Letter::segment(d, i, jb, ja, rb);
    let Letter::Minus { r_to: Some(r2), .. } = seg else { return None };
    let src = src.shift(r2 - ra);
    let rev = tgt.reversed(d);
    let mut letters = rev.letters[..rev.letters.len() - 1].to_vec();
    letters.push(seg);
    letters.extend_from_slice(&src.letters[1..]);
    TaggedArc::from_half(d, letters).ok().map(|e| (e, src))
}

pub const GOLDEN: &str = include_str!("../../../../data/golden_dg.json");

/// Canonical `τ` summand index to its position in the golden listing.
pub const TAU_PERMUTATION: [usize; 10] = [9, 7, 8, 5, 6, 3, 4, 1, 2, 0];

pub fn golden(name: &str) -> strandkit_core::dg::DgDump {
    let v: serde_json::Value = serde_json::from_str(GOLDEN).unwrap();
    let g = &v[name];
    let summands = g["summands"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect();
    let mut entries: Vec<(usize, usize, String)> = g["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e[0].as_u64().unwrap() as usize, e[1].as_u64().unwrap() as usize, e[2].as_str().unwrap().to_string()))
        .collect();
    entries.sort();
    strandkit_core::dg::DgDump { summands, entries }
}

pub fn sorted(mut x: strandkit_core::dg::DgDump) -> strandkit_core::dg::DgDump {
    x.entries.sort();
    x
}

/// The canonical `τ` dump relabelled into golden order.
pub fn permuted_tau(d: &Datum) -> strandkit_core::dg::DgDump {
    let canon = build_arc_module(d, &examples::tau(d)).unwrap().dump(d);
    let mut summands = vec![String::new(); canon.summands.len()];
    for (k, s) in canon.summands.into_iter().enumerate() {
        summands[TAU_PERMUTATION[k]] = s;
    }
    let entries = canon.entries.into_iter().map(|(r, c, v)| (TAU_PERMUTATION[r], TAU_PERMUTATION[c], v)).collect();
    sorted(strandkit_core::dg::DgDump { summands, entries })
}

/// Every line morphism (default extensions) and every `ψ` is a degree-0
/// cocycle once the target is shifted to match.
pub fn check_cocycles(d: &Datum, a: &ArcData, b: &ArcData) -> Result<(), String> {
    let q = BiQuiver::build(d, a, b);
    for l in q.lines(a, b).iter().filter(|l| l.tagged_h) {
        if let Ok(ex) = q.default_extension(a, b, l) {
            let f = q.f_line(d, a, b, l, &ex).map_err(|e| e.to_string())?;
            if !is_cocycle(d, &a.module, &b.module, &f, 0) {
                return Err(format!("line {:?}", l.vertices));
            }
        }
    }
    for s in 0..=a.p() {
        for t in 0..=b.p() {
            // move the target so that the morphism sits in degree 0
            if let Ok(Some((_, k))) = psi(d, a, s, b, t) {
                let bk = b.shift(k);
                let Ok(Some((f, 0))) = psi(d, a, s, &bk, t) else {
                    return Err(format!("psi {s} {t} does not shift to degree 0"));
                };
                if !is_cocycle(d, &a.module, &bk.module, &f, 0) {
                    return Err(format!("psi {s} {t} at shift {k}"));
                }
            }
        }
    }
    Ok(())
}

/// Checks `f(y1,y2) f_out(y2,m') f_in(y2,m) f(y2,y3)` against `f(y1,y3)`
/// (equal markers) or zero, over all `j1 < j2 < j3` in one polygon.
/// Returns the number of cases and the failures.
pub fn marker_identity(d: &Datum) -> (usize, Vec<String>) {
    let mut ys = Vec::new();
    for e in d.omega() {
        if d.is_fixed(e) {
            ys.push(BlockIdx::Side(e));
        }
        ys.extend(d.split(e).into_iter().map(BlockIdx::One));
    }
    let markers = |y: BlockIdx| -> Vec<Option<Marker>> {
        if y.is_double(d) {
            vec![Some(Marker::PlusMinus), Some(Marker::MinusPlus)]
        } else {
            vec![None]
        }
    };
    let (mut n, mut bad) = (0, Vec::new());
    for &y1 in &ys {
        for &y2 in &ys {
            for &y3 in &ys {
                let (e1, e2, e3) = (y1.edge(), y2.edge(), y3.edge());
                if !(e1.i == e2.i && e2.i == e3.i && e1.j < e2.j && e2.j < e3.j) {
                    continue;
                }
                let want = f_block(d, y1, y3);
                for &m in &markers(y2) {
                    for &m2 in &markers(y2) {
                        let got = f_block(d, y1, y2)
                            .mul(d, &f_out(d, y2, m2).unwrap())
                            .mul(d, &f_in(d, y2, m).unwrap())
                            .mul(d, &f_block(d, y2, y3));
                        let ok = if m == m2 { got == want } else { got.is_zero() };
                        if !ok {
                            bad.push(format!("{y1} {y2} {y3} {m:?} {m2:?}"));
                        }
                        n += 1;
                    }
                }
            }
        }
    }
    (n, bad)
}
