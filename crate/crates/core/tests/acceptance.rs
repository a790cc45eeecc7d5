//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::time::Instant;

use strandkit_core::arc::enumerate_arcs;
use strandkit_core::words::{random_word, segment_grading_violation};
use strandkit_core::intersect::{psi, Extension};
use strandkit_core::{
    build_arc_module, build_r, count_parts, examples, hom_dim, hom_rep_dim, int_number, rep_of_arc, verify_pairs,
    ArcData, BiQuiver, Datum, DgModule, Field, LocalSystem, Sign, TaggedArc, Word, WordClass,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn running_theorem() -> Outcome {
    let start = Instant::now();
    let d = examples::running_datum();
    let (s, t) = (examples::sigma(&d), examples::tau(&d));
    let (ms, mt) = (build_arc_module(&d, &s).unwrap(), build_arc_module(&d, &t).unwrap());
    for rho in -8..=8 {
        let want = match rho {
            0 => 2,
            -5 => 1,
            _ => 0,
        };
        let int = int_number(&d, &s, &t, rho).map_err(|e| e.to_string())?;
        let hom = hom_dim(&d, &ms, &mt, rho, Field::Rational);
        ensure(int == want && hom == want, || format!("rho={rho}: int={int} hom={hom}, expected {want}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.2}s"))?;
    Ok(format!("17 shifts exact in {secs:.3}s"))
}

fn golden_modules() -> Outcome {
    let d = examples::running_datum();
    let sigma = common::sorted(build_arc_module(&d, &examples::sigma(&d)).unwrap().dump(&d));
    ensure(sigma == common::golden("sigma"), || format!("sigma differs: {sigma:?}"))?;
    let tau = common::permuted_tau(&d);
    ensure(tau == common::golden("tau"), || format!("tau differs: {tau:?}"))?;
    Ok("4x4 and 10x10 differentials exact".into())
}

fn quiver() -> Outcome {
    let q = examples::running_datum().quiver_triple();
    let mut degs: Vec<i64> = q.arrows.iter().map(|a| a.3).collect();
    degs.sort();
    let got = (q.vertices.len(), q.arrows.len(), degs.clone(), q.special.len(), q.relations.len());
    ensure(got == (6, 7, vec![-1, -1, 0, 0, 0, 0, 0], 2, 6), || format!("{got:?}"))?;
    Ok(format!("{} vertices, {} arrows, degrees {:?}", got.0, got.1, degs))
}

fn line_goldens() -> Outcome {
    let d = examples::running_datum();
    let tau = examples::tau(&d).reversed(&d);
    let build = |tag: Sign| {
        let w = Word::finite(strandkit_core::words::parse_letters(examples::SIGMA_WORD).unwrap());
        let a = ArcData::new(&d, &TaggedArc::encode(&d, &w, &[tag]).unwrap()).unwrap();
        let b = ArcData::new(&d, &tau).unwrap();
        let q = BiQuiver::build(&d, &a, &b);
        (a, b, q)
    };
    let (a, b, q) = build(Sign::Minus);
    let lines = q.lines(&a, &b);
    let label = |x: usize| (q.vertices[x].u, q.vertices[x].v);
    let mut zero: Vec<_> = (0..q.vertices.len()).filter(|&x| q.vertices[x].is_zero_point()).map(label).collect();
    zero.sort();
    let all_a = lines.iter().all(|l| l.kind == strandkit_core::intersect::LineType::A);
    let real = lines.iter().filter(|l| l.real_h).count();
    ensure(q.vertices.len() == 13 && lines.len() == 7 && all_a && real == 2, || {
        format!("{} vertices, {} lines, all A {all_a}, {real} real h-lines", q.vertices.len(), lines.len())
    })?;
    ensure(zero == vec![(2, 3), (2, 7), (3, 2)], || format!("zero points {zero:?}"))?;

    let through = |q: &BiQuiver, lines: &[strandkit_core::intersect::Line], u, v| {
        let x = q.vertex(u, v).unwrap();
        lines.iter().find(|l| l.contains(x)).unwrap().clone()
    };
    let exts = |a: &ArcData, b: &ArcData, q: &BiQuiver, l| -> Vec<Extension> {
        q.outlet_sides(l).into_iter().flat_map(|(x, k)| q.extensions_from(a, b, l, x, k)).collect()
    };
    let l1 = through(&q, &lines, 1, 1);
    let e = exts(&a, &b, &q, &l1);
    let coeffs: Vec<Vec<i64>> = e.iter().map(|x| x.coeffs.clone()).collect();
    ensure(coeffs == vec![vec![-1, -1, -1, -1], vec![-1, -1, 1, 1, -1, -1]], || format!("coefficients {coeffs:?}"))?;

    let (fa, fb, fq) = build(Sign::Plus);
    let fl = fq.lines(&fa, &fb);
    let fe = exts(&fa, &fb, &fq, &through(&fq, &fl, 1, 1));
    ensure(fe[0].coeffs.iter().all(|&c| c == 0), || format!("flipped coefficients {:?}", fe[0].coeffs))?;

    let f1 = q.f_line(&d, &a, &b, &l1, &e[..1]).unwrap();
    let f2 = q.f_line(&d, &a, &b, &l1, &e[1..]).unwrap();
    let l3 = through(&q, &lines, 2, 6);
    let f3 = q.f_line(&d, &a, &b, &l3, &q.default_extension(&a, &b, &l3).unwrap()).unwrap();
    ensure(f2.add(&f1.scale(-1)) == f3, || "line morphism relation fails".into())?;
    Ok("13 vertices, 7 type-A lines, 3 zero-points, 2 real h-lines, coefficients and relation exact".into())
}

fn random_sweep() -> Outcome {
    let start = Instant::now();
    let (mut pairs, mut rows, mut nonzero, mut bad) = (0, 0, 0, Vec::new());
    for (k, (name, d)) in common::datums().into_iter().enumerate() {
        let arcs = common::random_arcs(&d, 500 + k as u64, 260);
        let list: Vec<(TaggedArc, TaggedArc)> = arcs.chunks(2).map(|p| (p[0].clone(), p[1].clone())).collect();
        pairs += list.len();
        for r in verify_pairs(&d, &list, -6..=6, Field::Rational).map_err(|e| e.to_string())? {
            rows += 1;
            nonzero += usize::from(r.int > 0);
            if !r.matches {
                bad.push(format!("{name}: {} | {} rho={} int={} hom={}", r.arc_a, r.arc_b, r.rho, r.int, r.homdim));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(bad.is_empty(), || format!("{} mismatches, first {}", bad.len(), bad[0]))?;
    ensure(pairs >= 500, || format!("only {pairs} pairs"))?;
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{pairs} pairs over 4 datums, {rows} rows ({nonzero} nonzero), 0 mismatches in {secs:.2}s"))
}

fn structure() -> Outcome {
    let (mut modules, mut pairs, mut words, mut segments) = (0, 0, 0, 0);
    for (k, (name, d)) in common::datums().into_iter().enumerate() {
        let mut arcs = common::random_arcs(&d, 600 + k as u64, 150);
        arcs.extend(enumerate_arcs(&d, 3, 1));
        for a in &arcs {
            let m = build_arc_module(&d, a).map_err(|e| e.to_string())?;
            let v = m.violations(&d);
            ensure(v.is_empty(), || format!("{name} {}: {v:?}", a.compact()))?;
            modules += 1;
            for l in &a.decode(&d).0.letters {
                ensure(segment_grading_violation(&d, l).is_none(), || format!("{name} segment {l}"))?;
                segments += usize::from(l.is_minus());
            }
        }
        let data: Vec<ArcData> = arcs.iter().take(40).map(|a| ArcData::new(&d, a).unwrap()).collect();
        for (x, y) in data.iter().zip(data.iter().skip(1)) {
            for rho in -2..=2 {
                common::check_cocycles(&d, x, &y.shift(rho)).map_err(|e| format!("{name}: {} | {} rho={rho}: {e}", x.arc.compact(), y.arc.compact()))?;
                pairs += 1;
            }
        }
        let mut rng = common::rng(700 + k as u64);
        for _ in 0..300 {
            let w = random_word(&d, &mut rng, 12);
            let r = build_r(&d, &w, &LocalSystem::None).map_err(|e| e.to_string())?;
            let inext = w.classify(&d) != WordClass::Extensible;
            ensure(r.is_bijective() == inext, || format!("{name} word {}", w.compact()))?;
            words += 1;
        }
    }
    let (n, bad) = common::marker_identity(&examples::running_datum());
    ensure(bad.is_empty(), || format!("marker identity: {bad:?}"))?;
    ensure(words >= 1000, || format!("only {words} words"))?;
    Ok(format!(
        "{modules} modules square-zero, {pairs} pair checks cocycle, {n} marker cases, {words} words, {segments} segments"
    ))
}

fn basis_count() -> Outcome {
    let mut pairs = 0;
    for (k, (name, d)) in common::datums().into_iter().enumerate() {
        let arcs = common::random_arcs(&d, 800 + k as u64, 120);
        for p in arcs.chunks(2) {
            for rho in -1..=1 {
                let b = p[1].shift(rho);
                let dim = hom_rep_dim(&d, &rep_of_arc(&d, &p[0]), &rep_of_arc(&d, &b), Field::Rational);
                let lines = count_parts(&d, &p[0], &b).map_err(|e| e.to_string())?.hlines;
                ensure(dim == lines, || format!("{name}: {} | {} hom={dim} lines={lines}", p[0].compact(), b.compact()))?;
            }
            pairs += 1;
        }
    }
    ensure(pairs >= 200, || format!("only {pairs} pairs"))?;
    Ok(format!("{pairs} pairs, 3 shifts each, 0 mismatches"))
}

fn same_profile(d: &Datum, x: &DgModule, y: &DgModule, probes: &[DgModule]) -> bool {
    common::profile(d, x, probes, -5..=5) == common::profile(d, y, probes, -5..=5)
}

fn cones() -> Outcome {
    // identity
    let mut ids = 0;
    for (k, (name, d)) in common::datums().into_iter().enumerate() {
        let probes = common::probes(&d, &common::random_arcs(&d, 900 + k as u64, 8));
        for m in &probes[..3] {
            let c = m.cone(&d, m, &m.identity()).map_err(|e| e.to_string())?;
            ensure(common::profile(&d, &c, &probes, -5..=5).iter().all(|&x| x == 0), || {
                format!("{name}: cone of identity is visible")
            })?;
            ids += 1;
        }
    }

    // index-one wedges at a shared boundary start
    let mut wedges = 0;
    for (name, d) in common::datums() {
        let arcs = enumerate_arcs(&d, 3, 2);
        let probes: Vec<DgModule> = common::probes(&d, &arcs.iter().step_by(arcs.len() / 12 + 1).cloned().collect::<Vec<_>>());
        let starts: Vec<TaggedArc> = arcs.iter().filter_map(|a| common::boundary_start(&d, a)).collect();
        let mut done = 0;
        'outer: for (x, src) in starts.iter().enumerate() {
            for tgt in starts.iter().skip(x % 7).step_by(7) {
                let Some((e, src)) = common::join_at_start(&d, src, tgt) else { continue };
                let a = ArcData::new(&d, &src).unwrap();
                let b = ArcData::new(&d, tgt).unwrap();
                if a.layout.block_of[0].1 == 2 || b.layout.block_of[0].1 == 2 {
                    continue;
                }
                let Ok(Some((f, 1))) = psi(&d, &a, 0, &b, 0) else { continue };
                let c = a.module.cone(&d, &b.module.shift(1), &f).map_err(|e| e.to_string())?;
                let em = build_arc_module(&d, &e).unwrap().shift(1);
                ensure(same_profile(&d, &c, &em, &probes), || {
                    format!("{name}: {} -> {} vs {}", src.compact(), tgt.compact(), e.compact())
                })?;
                done += 1;
                if done == 25 {
                    break 'outer;
                }
            }
        }
        wedges += done;
    }

    // two extensions of one line
    let d = examples::running_datum();
    let s = common::arc(&d, "m(1,0>1,3@-2) p(1,3-@-2) m(1,3@-2>1,1@-4) p(1,1@-4) m(2,2@-4>2,0)");
    let t = common::arc(&d, "m(1,0>1,2@-1) p(1,2@-1) m(1,6@-1>1,3@-3) p(1,3-@-3) m(1,3@-3>1,0)").shift(1);
    let (a, b) = (ArcData::new(&d, &s).unwrap(), ArcData::new(&d, &t).unwrap());
    let q = BiQuiver::build(&d, &a, &b);
    let many = |l: &strandkit_core::intersect::Line, x: usize, k: usize| q.extensions_from(&a, &b, l, x, k).len() >= 2;
    let l = q
        .lines(&a, &b)
        .into_iter()
        .find(|l| l.tagged_h && q.outlet_sides(l).iter().any(|&(x, k)| many(l, x, k)))
        .ok_or("no line with two extensions")?;
    let sides = q.outlet_sides(&l);
    let (x, k) = *sides.iter().find(|&&(x, k)| many(&l, x, k)).unwrap();
    let choices = q.extensions_from(&a, &b, &l, x, k);
    let others: Vec<Extension> =
        sides.iter().filter(|&&o| o != (x, k)).map(|&(y, j)| q.extensions_from(&a, &b, &l, y, j)[0].clone()).collect();
    let f_with = |e: &Extension| {
        let mut v = others.clone();
        v.push(e.clone());
        q.f_line(&d, &a, &b, &l, &v).unwrap()
    };
    let (f1, f2) = (f_with(&choices[0]), f_with(&choices[1]));
    let admissible = TaggedArc::from_half(&d, {
        let mut v = strandkit_core::words::parse_letters("m(1,0>1,2@0) p(1,2@0)").unwrap();
        let seg = strandkit_core::Letter::segment(&d, 1, 6, 1, 0);
        let strandkit_core::Letter::Minus { r_to: Some(r), .. } = seg else { unreachable!() };
        v.push(seg);
        v.extend(strandkit_core::words::parse_letters(&format!("p(1,1@{r}) m(2,2@{r}>2,0)")).unwrap());
        v
    })
    .map_err(|e| e.to_string())?;
    let em = build_arc_module(&d, &admissible).unwrap();
    let probes = common::probes(&d, &enumerate_arcs(&d, 3, 4).into_iter().step_by(3).collect::<Vec<_>>());
    for (l1, l2) in [(1, 1), (1, 2), (2, 1), (3, -1)] {
        let c = a.module.cone(&d, &b.module, &f1.scale(l1).add(&f2.scale(l2))).map_err(|e| e.to_string())?;
        ensure(same_profile(&d, &c, &em, &probes), || format!("combination ({l1},{l2}) differs from {}", admissible.compact()))?;
    }
    for (l1, l2) in [(1, 0), (0, 1), (1, -1)] {
        let c = a.module.cone(&d, &b.module, &f1.scale(l1).add(&f2.scale(l2))).map_err(|e| e.to_string())?;
        let end = hom_dim(&d, &c, &c, 0, Field::Rational);
        ensure(end == 2, || format!("combination ({l1},{l2}) has End of dimension {end}"))?;
    }
    Ok(format!("{ids} identity cones, {wedges} wedge cones, 4 generic two-extension cones match {}", admissible.compact()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("running-example theorem", running_theorem),
        ("golden dg modules", golden_modules),
        ("datum to quiver", quiver),
        ("line calculus goldens", line_goldens),
        ("randomized theorem sweep", random_sweep),
        ("cocycle and structure properties", structure),
        ("cross-oracle basis count", basis_count),
        ("cone checks", cones),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {} {name}: {msg} [{secs:.1}s]", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg} [{secs:.1}s]", k + 1)
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
