mod common;

use strandkit_core::dg::hom_component_degree;
use strandkit_core::{build_arc_module, int_number, examples, hom_dim, Comb, DgModule, Edge, Elt, Field, Mat, Pm, Sign, Summand};

use common::{golden, permuted_tau, sorted};

#[test]
fn sigma_matches_golden() {
    let d = examples::running_datum();
    let m = build_arc_module(&d, &examples::sigma(&d)).unwrap();
    assert_eq!(sorted(m.dump(&d)), golden("sigma"));
}

#[test]
fn tau_matches_golden() {
    let d = examples::running_datum();
    let want = golden("tau");
    let m = build_arc_module(&d, &examples::tau(&d).reversed(&d)).unwrap();
    assert_eq!(sorted(m.dump(&d)), want);

    assert_eq!(permuted_tau(&d), want);
}

#[test]
fn flipped_sign_breaks_square_zero() {
    let d = examples::running_datum();
    let m = build_arc_module(&d, &examples::tau(&d)).unwrap();
    assert!(m.violations(&d).is_empty());
    let (r, c, v) = m.diff.entries().next().map(|(r, c, v)| (r, c, v.clone())).unwrap();
    let mut bad = m.clone();
    bad.diff.set(r, c, v.scale(-1));
    assert!(!bad.violations(&d).is_empty());
}

#[test]
fn zero_differential_is_valid() {
    let d = examples::running_datum();
    let summands = (0..d.num_classes()).map(|class| Summand { class, n: class as i64 }).collect::<Vec<_>>();
    let m = DgModule { diff: Mat::zeros(summands.len(), summands.len()), summands };
    assert!(m.violations(&d).is_empty());
}

#[test]
fn shifts() {
    let d = examples::running_datum();
    let s = examples::sigma(&d);
    let m = build_arc_module(&d, &s).unwrap();
    assert_eq!(m.shift(0), m);
    let ns: Vec<i64> = m.shift(-5).summands.iter().map(|x| x.n).collect();
    assert_eq!(ns, vec![-5, -3, -3, -2]);
    assert_eq!(build_arc_module(&d, &s.shift(1)).unwrap(), m.shift(1));
}

#[test]
fn component_degrees() {
    let d = examples::running_datum();
    let p11 = Pm::plain(Edge::new(1, 1));
    let p3 = Pm::signed(Edge::new(1, 3), Sign::Plus);
    let p4 = Pm::signed(Edge::new(1, 4), Sign::Minus);
    let at = |x: Pm, n| Summand { class: d.class_of(x), n };
    assert_eq!(hom_component_degree(&d, at(p3, 2), at(p11, 0), Elt::p(p11, p3)).unwrap(), 1);
    assert_eq!(hom_component_degree(&d, at(p4, 3), at(p3, 2), Elt::p(p3, p4)).unwrap(), 1);
    let id = Elt::Idem(d.class_of(p3));
    assert_eq!(hom_component_degree(&d, at(p3, 2), at(p3, 2), id).unwrap(), 0);
    assert!(hom_component_degree(&d, at(p11, 2), at(p3, 2), id).is_err());
}

#[test]
fn single_crossing_arc() {
    let d = examples::running_datum();
    let a = common::arc(&d, "m(1,0>1,2@0) p(1,2@0) m(1,6@0>1,0)");
    let m = build_arc_module(&d, &a).unwrap();
    assert_eq!(m.len(), 1);
    assert!(m.diff.is_zero());
}

#[test]
fn square_zero_everywhere() {
    for (k, (name, d)) in common::datums().into_iter().enumerate() {
        let mut arcs = common::random_arcs(&d, 100 + k as u64, 250);
        arcs.extend(strandkit_core::arc::enumerate_arcs(&d, 3, 1));
        for a in &arcs {
            let m = build_arc_module(&d, a).unwrap();
            let v = m.violations(&d);
            assert!(v.is_empty(), "{name} {}: {v:?}", a.compact());
        }
    }
}

#[test]
fn endomorphisms_count_self_intersections() {
    // identity plus one class per index-0 self-intersection
    for (k, (_, d)) in common::datums().into_iter().enumerate() {
        for a in common::random_arcs(&d, 200 + k as u64, 25) {
            let m = build_arc_module(&d, &a).unwrap();
            let end = hom_dim(&d, &m, &m, 0, Field::Rational);
            assert!(end >= 1);
            assert_eq!(end, int_number(&d, &a, &a, 0).unwrap(), "{}", a.compact());
            assert_eq!(hom_dim(&d, &m, &DgModule::zero(), 0, Field::Rational), 0);
        }
    }
}

#[test]
fn running_hom_table() {
    let d = examples::running_datum();
    let s = build_arc_module(&d, &examples::sigma(&d)).unwrap();
    let t = build_arc_module(&d, &examples::tau(&d)).unwrap();
    for rho in -8..=8 {
        let want = match rho {
            0 => 2,
            -5 => 1,
            _ => 0,
        };
        assert_eq!(hom_dim(&d, &s, &t, rho, Field::Rational), want, "rho={rho}");
        assert_eq!(hom_dim(&d, &s, &t, rho, Field::prime(7).unwrap()), want, "rho={rho} mod 7");
    }
}

#[test]
fn cone_of_identity_is_trivial() {
    for (k, (_, d)) in common::datums().into_iter().enumerate() {
        let arcs = common::random_arcs(&d, 300 + k as u64, 6);
        let probes = common::probes(&d, &arcs);
        let m = &probes[0];
        let c = m.cone(&d, m, &m.identity()).unwrap();
        // not minimal (identity entries), but still a dg module
        assert!(c.diff.mul(&d, &c.diff).is_zero());
        assert!(common::profile(&d, &c, &probes, -3..=3).iter().all(|&x| x == 0));
    }
}

#[test]
fn cone_rejects_non_cocycles() {
    let d = examples::running_datum();
    let m = build_arc_module(&d, &examples::tau(&d)).unwrap();
    let mut f = Mat::zeros(m.len(), m.len());
    f.set(0, 0, Comb::term(Elt::Idem(m.summands[0].class), 1));
    assert!(m.cone(&d, &m, &f).is_err());
}
