mod common;

use strandkit_core::algebra::{block_morphism, f_block, h_basis, lambda_basis, mul_basis};
use strandkit_core::{examples, BlockIdx, Comb, Datum, Edge, Elt, Error, Marker, Mat, Pm, Sign};

fn plain(i: u16, j: u16) -> Pm {
    Pm::plain(Edge::new(i, j))
}

fn split(i: u16, j: u16, s: Sign) -> Pm {
    Pm::signed(Edge::new(i, j), s)
}

/// Per-side multiplicities read straight from the raw datum: 2 at fixed sides.
fn multiplicities(d: &Datum) -> Vec<Vec<usize>> {
    let raw = d.raw();
    raw.polygons
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            (1..=m)
                .map(|j| if raw.fixed.contains(&[i as i64 + 1, j]) { 2 } else { 1 })
                .collect()
        })
        .collect()
}

#[test]
fn running_datum_counts() {
    let d = examples::running_datum();
    assert_eq!(d.omega().count(), 10);
    assert_eq!(d.omega_pm().len(), 12);
    assert_eq!(d.num_classes(), 8);
}

#[test]
fn duplicate_partner_rejected() {
    let e = Datum::from_json(r#"{"polygons":[5,2],"pairs":[[[1,1],[2,2]],[[1,1],[1,5]]],"fixed":[],"gradings":[[0,0,0,0],[0]]}"#)
        .unwrap_err();
    assert!(matches!(e, Error::DuplicatePartner(_)), "{e:?}");
}

#[test]
fn smallest_fixed_datum() {
    let d = Datum::from_json(r#"{"polygons":[1],"fixed":[[1,1]],"gradings":[[]]}"#).unwrap();
    assert_eq!(d.omega_pm(), &[split(1, 1, Sign::Plus), split(1, 1, Sign::Minus)]);
    let q = d.quiver_triple();
    assert_eq!(q.vertices.len(), 1);
    assert!(q.arrows.is_empty());
    assert_eq!(q.special, vec![0]);
    assert!(q.relations.is_empty());
}

#[test]
fn running_quiver() {
    let q = examples::running_datum().quiver_triple();
    assert_eq!(q.vertices.len(), 6);
    assert_eq!(q.arrows.len(), 7);
    let mut degs: Vec<i64> = q.arrows.iter().map(|a| a.3).collect();
    degs.sort();
    assert_eq!(degs, vec![-1, -1, 0, 0, 0, 0, 0]);
    assert_eq!(q.special.len(), 2);
    assert_eq!(q.relations.len(), 6);
}

#[test]
fn two_gon_quiver_has_one_loop() {
    // one arrow per side beyond the first; the pairing forbids its square
    let d = Datum::from_json(r#"{"polygons":[2],"pairs":[[[1,1],[1,2]]],"gradings":[[5]]}"#).unwrap();
    let q = d.quiver_triple();
    assert_eq!(q.vertices.len(), 1);
    assert_eq!(q.arrows.len(), 1);
    assert_eq!((q.arrows[0].1, q.arrows[0].2, q.arrows[0].3), (0, 0, 5));
    assert_eq!(q.relations, vec![(0, 0)]);
}

#[test]
fn multiplication_examples() {
    let d = examples::running_datum();
    let a = Elt::p(plain(1, 1), split(1, 3, Sign::Plus));
    let b = Elt::p(split(1, 3, Sign::Plus), plain(1, 5));
    let c = Elt::p(split(1, 3, Sign::Minus), plain(1, 5));
    assert_eq!(mul_basis(&d, a, b), Some(Elt::p(plain(1, 1), plain(1, 5))));
    assert_eq!(mul_basis(&d, a, c), None);
    let e = Elt::Idem(d.class_of(split(1, 3, Sign::Plus)));
    assert_eq!(mul_basis(&d, e, b), Some(b));
}

#[test]
fn basis_dimensions() {
    for (_, d) in common::datums() {
        let m = multiplicities(&d);
        let radical: usize = m
            .iter()
            .map(|p| (0..p.len()).flat_map(|a| (a + 1..p.len()).map(move |b| (a, b))).map(|(a, b)| p[a] * p[b]).sum::<usize>())
            .sum();
        let diagonal: usize = m.iter().flatten().map(|k| k * k).sum();
        let lam = lambda_basis(&d);
        assert_eq!(lam.len(), d.num_classes() + radical);
        assert_eq!(h_basis(&d).len(), radical + diagonal);
    }
    let d = examples::running_datum();
    assert_eq!(lambda_basis(&d).len(), 43);
    assert_eq!(h_basis(&d).len(), 51);
    let tiny = Datum::from_json(r#"{"polygons":[1,1],"pairs":[[[1,1],[2,1]]],"gradings":[[],[]]}"#).unwrap();
    assert_eq!(lambda_basis(&tiny).len(), 1);
}

#[test]
fn associative_and_graded() {
    for (_, d) in common::datums() {
        let basis = lambda_basis(&d);
        for &a in &basis {
            for &b in &basis {
                let ab = mul_basis(&d, a, b);
                if let Some(ab) = ab {
                    assert_eq!(ab.degree(&d), a.degree(&d) + b.degree(&d));
                }
                for &c in &basis {
                    let left = ab.and_then(|x| mul_basis(&d, x, c));
                    let right = mul_basis(&d, b, c).and_then(|x| mul_basis(&d, a, x));
                    assert_eq!(left, right, "{a:?} {b:?} {c:?}");
                }
            }
        }
    }
}

fn entry(e: Option<Elt>, c: i64) -> Comb {
    e.map_or(Comb::zero(), |e| Comb::term(e, c))
}

fn two_by_two(v: [[Comb; 2]; 2]) -> Mat {
    let mut m = Mat::zeros(2, 2);
    for (r, row) in v.into_iter().enumerate() {
        for (c, x) in row.into_iter().enumerate() {
            m.set(r, c, x);
        }
    }
    m
}

#[test]
fn fixed_block_morphisms() {
    let d = examples::running_datum();
    let (y1, y2) = (BlockIdx::Side(Edge::new(1, 3)), BlockIdx::Side(Edge::new(1, 4)));
    let p = |a: Sign, b: Sign| Some(Elt::p(split(1, 3, a), split(1, 4, b)));
    use Sign::{Minus as M, Plus as P};
    let z = || Comb::zero();
    let cases = [
        (Marker::PlusMinus, Marker::PlusMinus, [[entry(p(P, P), 1), entry(p(P, M), -1)], [z(), z()]]),
        (Marker::PlusMinus, Marker::MinusPlus, [[z(), entry(p(P, M), 1)], [z(), z()]]),
        (
            Marker::MinusPlus,
            Marker::PlusMinus,
            [[entry(p(P, P), 1), entry(p(P, M), -1)], [entry(p(M, P), 1), entry(p(M, M), -1)]],
        ),
        (Marker::MinusPlus, Marker::MinusPlus, [[z(), entry(p(P, M), 1)], [z(), entry(p(M, M), 1)]]),
    ];
    for (m1, m2, want) in cases {
        let got = block_morphism(&d, y1, y2, Some(m1), Some(m2)).unwrap();
        assert_eq!(got, two_by_two(want), "{m1:?} {m2:?}");
    }
    let (a, b) = (BlockIdx::One(plain(1, 1)), BlockIdx::One(plain(1, 2)));
    let got = block_morphism(&d, a, b, None, None).unwrap();
    assert_eq!(got, f_block(&d, a, b));
    assert_eq!((got.rows, got.cols), (1, 1));
    assert_eq!(block_morphism(&d, a, y2, None, None), Err(Error::InvalidMarker));
}

#[test]
fn marker_composition_identity() {
    let (n, bad) = common::marker_identity(&examples::running_datum());
    assert!(n > 100, "{n}");
    assert!(bad.is_empty(), "{bad:?}");
}
