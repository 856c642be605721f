use operadkit::classic_models::points::Side;
use operadkit::classic_models::DEFAULT_SEED;
use operadkit::rational::{one, q, zero, Q};
use operadkit::tilde_models::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

// --------------------------------------------------------------------
// Oracles
// --------------------------------------------------------------------

/// All terminal forms reachable by some order of local rules.
fn terminals<T: Clone + Ord>(x: &T, moves: &dyn Fn(&T) -> Vec<T>, out: &mut BTreeSet<T>, seen: &mut BTreeSet<T>) {
    if !seen.insert(x.clone()) {
        return;
    }
    let next = moves(x);
    if next.is_empty() {
        out.insert(x.clone());
    }
    for y in next {
        terminals(&y, moves, out, seen);
    }
}

fn all_terminals<T: Clone + Ord>(x: &T, moves: &dyn Fn(&T) -> Vec<T>) -> BTreeSet<T> {
    let mut out = BTreeSet::new();
    terminals(x, moves, &mut out, &mut BTreeSet::new());
    out
}

fn random_terminal<T: Clone>(x: &T, moves: &dyn Fn(&T) -> Vec<T>, rng: &mut ChaCha8Rng) -> T {
    let mut x = x.clone();
    loop {
        let next = moves(&x);
        if next.is_empty() {
            return x;
        }
        let i = rng.gen_range(0..next.len());
        x = next[i].clone();
    }
}

/// Normal form of △̃ read off geometrically: at each interior position
/// free of labeled points, the longest hair if it has positive length.
fn triangle_oracle(c: &HairyConfig) -> HairyConfig {
    let mut best: BTreeMap<Q, Q> = BTreeMap::new();
    for (p, l) in &c.hairs {
        if *p == zero() || *p == one() || c.points.contains(p) || *l == zero() {
            continue;
        }
        let e = best.entry(p.clone()).or_insert_with(zero);
        if l > e {
            *e = l.clone();
        }
    }
    let mut points = c.points.clone();
    points.sort();
    HairyConfig::new(points, best.into_iter().collect())
}

fn tri_moves(c: &HairyConfig) -> Vec<HairyConfig> {
    c.local_moves().into_iter().map(canonical_order).collect()
}

fn canonical_order(mut c: HairyConfig) -> HairyConfig {
    c.points.sort();
    c.hairs.sort();
    c
}

fn raw_triangle(rng: &mut ChaCha8Rng, sites: usize) -> HairyConfig {
    let den = 4;
    let points_n = rng.gen_range(0..=sites);
    let points = (0..points_n).map(|_| q(rng.gen_range(0..=den), den)).collect();
    let hairs = (points_n..sites).map(|_| (q(rng.gen_range(0..=den), den), q(rng.gen_range(0..=2), 2))).collect();
    HairyConfig::new(points, hairs)
}

fn raw_line(rng: &mut ChaCha8Rng, sites: usize) -> HairyLine {
    let s = (0..sites)
        .map(|_| if rng.gen_bool(0.4) { Site::Point } else { Site::Hair(q(rng.gen_range(0..=2), 2)) })
        .collect::<Vec<_>>();
    let gaps = (1..sites).map(|_| q(rng.gen_range(0..=2), 2)).collect();
    HairyLine::new(s, gaps).unwrap()
}

fn all_raw_lines(max_sites: usize) -> Vec<HairyLine> {
    let kinds = [Site::Point, Site::Hair(zero()), Site::Hair(q(1, 2)), Site::Hair(one())];
    let gaps = [zero(), q(1, 2), one()];
    let mut out = vec![HairyLine::unit()];
    let mut layer: Vec<HairyLine> = kinds.iter().map(|k| HairyLine::new(vec![k.clone()], vec![]).unwrap()).collect();
    for _ in 1..max_sites {
        out.extend(layer.iter().cloned());
        let mut next = Vec::new();
        for c in &layer {
            for k in &kinds {
                for g in &gaps {
                    let mut d = c.clone();
                    d.sites.push(k.clone());
                    d.gaps.push(g.clone());
                    next.push(d);
                }
            }
        }
        layer = next;
    }
    out.extend(layer);
    out
}

fn all_raw_triangles(max_sites: usize) -> Vec<HairyConfig> {
    let pos = [zero(), q(1, 2), one()];
    let lens = [zero(), q(1, 2), one()];
    let mut out = Vec::new();
    for sites in 0..=max_sites {
        for points_n in 0..=sites {
            let mut configs = vec![HairyConfig::new(vec![], vec![])];
            for _ in 0..points_n {
                configs = configs
                    .into_iter()
                    .flat_map(|c| {
                        pos.iter().map(move |p| {
                            let mut d = c.clone();
                            d.points.push(p.clone());
                            d
                        })
                    })
                    .collect();
            }
            for _ in points_n..sites {
                configs = configs
                    .into_iter()
                    .flat_map(|c| {
                        let mut v = Vec::new();
                        for p in &pos {
                            for l in &lens {
                                let mut d = c.clone();
                                d.hairs.push((p.clone(), l.clone()));
                                v.push(d);
                            }
                        }
                        v
                    })
                    .collect();
            }
            out.extend(configs);
        }
    }
    out
}

fn leaf() -> MEdge {
    MEdge::Leaf
}

fn v(len: Q, children: Vec<MEdge>) -> MEdge {
    MEdge::Vertex(MVertex::new(len, children))
}

fn all_raw_trees(max_vertices: usize) -> Vec<MetricTree> {
    let lens = [zero(), q(1, 2), one()];
    fn edges(budget: usize, lens: &[Q]) -> Vec<(MEdge, usize)> {
        let mut out = vec![(MEdge::Leaf, 0)];
        if budget == 0 {
            return out;
        }
        for l in lens {
            for (children, used) in lists(budget - 1, lens, 2) {
                out.push((MEdge::Vertex(MVertex::new(l.clone(), children)), used + 1));
            }
        }
        out
    }
    fn lists(budget: usize, lens: &[Q], max_len: usize) -> Vec<(Vec<MEdge>, usize)> {
        let mut out = vec![(Vec::new(), 0)];
        let mut layer = out.clone();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (l, used) in &layer {
                for (e, u) in edges(budget - used, lens) {
                    let mut l = l.clone();
                    l.push(e);
                    next.push((l, used + u));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
    lists(max_vertices - 1, &lens, 3).into_iter().map(|(ch, _)| MetricTree::raw(MVertex::new(zero(), ch))).collect()
}

// --------------------------------------------------------------------
// △̃
// --------------------------------------------------------------------

#[test]
fn triangle_normalization_examples() {
    let c = normalize_hairy(HairyConfig::new(vec![], vec![(q(1, 2), q(1, 3)), (q(1, 2), q(2, 3))])).unwrap();
    assert_eq!(c.hairs, vec![(q(1, 2), q(2, 3))]);
    let c = normalize_hairy(HairyConfig::new(vec![q(1, 4)], vec![(q(1, 2), zero())])).unwrap();
    assert!(c.hairs.is_empty());
    let clean = HairyConfig::new(vec![zero(), q(1, 3)], vec![(q(1, 2), q(1, 4)), (q(3, 4), one())]);
    assert_eq!(normalize_hairy(clean.clone()).unwrap(), clean);
    let c = normalize_hairy(HairyConfig::new(vec![q(1, 2)], vec![(q(1, 2), one()), (zero(), one())])).unwrap();
    assert!(c.hairs.is_empty());
    assert!(normalize_hairy(HairyConfig::new(vec![q(3, 2)], vec![])).is_err());
    assert!(normalize_hairy(HairyConfig::new(vec![], vec![(q(1, 2), q(2, 1))])).is_err());
}

#[test]
fn triangle_degeneracy_examples() {
    let x = HairyConfig::new(vec![q(1, 2)], vec![]);
    assert_eq!(x.right(1, 0).unwrap(), HairyConfig::new(vec![], vec![(q(1, 2), one())]));
    let x = HairyConfig::new(vec![zero(), q(1, 2)], vec![]);
    assert_eq!(x.right(1, 0).unwrap(), HairyConfig::new(vec![q(1, 2)], vec![]));
    let x = HairyConfig::new(vec![q(1, 2), q(1, 2)], vec![]);
    assert_eq!(x.right(2, 0).unwrap(), HairyConfig::new(vec![q(1, 2)], vec![]));
    let x = HairyConfig::new(vec![q(1, 3)], vec![(q(2, 3), q(1, 2))]);
    let y = act_tilde(Side::Left, 3, 2, &TildePoint::Triangle(x)).unwrap();
    assert_eq!(y, TildePoint::Triangle(HairyConfig::new(vec![zero(), q(1, 3), one()], vec![(q(2, 3), q(1, 2))])));
    assert!(act_tilde(Side::Right, 0, 2, &TildePoint::Triangle(HairyConfig::new(vec![q(1, 3)], vec![]))).is_err());
}

#[test]
fn triangle_normalization_is_confluent_on_small_configurations() {
    for c in all_raw_triangles(3) {
        let t = all_terminals(&canonical_order(c.clone()), &tri_moves);
        assert_eq!(t.len(), 1, "{c}");
        let n = normalize_hairy(c.clone()).unwrap();
        assert_eq!(t.into_iter().next().unwrap(), n);
        assert_eq!(n, triangle_oracle(&c));
    }
}

#[test]
fn triangle_normalization_is_confluent_on_random_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for _ in 0..500 {
        let sites = rng.gen_range(0..=6);
        let c = raw_triangle(&mut rng, sites);
        let n = normalize_hairy(c.clone()).unwrap();
        assert_eq!(n, triangle_oracle(&c));
        assert_eq!(canonical_order(random_terminal(&c, &tri_moves, &mut rng)), n);
        assert_eq!(normalize_hairy(n.clone()).unwrap(), n);
    }
}

#[test]
fn triangle_tilde_axioms_hold() {
    let start = Instant::now();
    let r = check_triangle_tilde(5, TILDE_SAMPLES, DEFAULT_SEED);
    assert!(r.passed(), "{:?}", r.results.iter().filter(|a| a.failures > 0).collect::<Vec<_>>());
    let axioms: BTreeSet<&str> = r.results.iter().map(|a| a.axiom.as_str()).collect();
    assert_eq!(axioms.len(), 6);
    assert!(r.results.iter().all(|a| a.instances > 0));
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn triangle_stage_counts_distinct_interior_sites() {
    let c = HairyConfig::new(vec![zero(), q(1, 3), q(1, 3), one()], vec![(q(1, 2), one())]);
    assert_eq!(c.stage(), 2);
    assert_eq!(HairyConfig::new(vec![zero(), one()], vec![]).stage(), 0);
}

// --------------------------------------------------------------------
// □̃
// --------------------------------------------------------------------

#[test]
fn square_degeneracy_takes_the_larger_gap() {
    let x = HairyLine::new(vec![Site::Point, Site::Point, Site::Point], vec![q(1, 4), q(3, 4)]).unwrap();
    let y = x.right(2, 0).unwrap();
    assert_eq!(y, HairyLine::new(vec![Site::Point, Site::Hair(one()), Site::Point], vec![q(1, 4), q(3, 4)]).unwrap());
    let z = HairyLine::new(vec![Site::Point, Site::Point, Site::Point], vec![zero(), q(3, 4)]).unwrap();
    assert_eq!(z.right(1, 0).unwrap(), HairyLine::new(vec![Site::Point, Site::Point], vec![q(3, 4)]).unwrap());
    let w = HairyLine::new(vec![Site::Point, Site::Point, Site::Point], vec![q(1, 4), zero()]).unwrap();
    assert_eq!(w.right(2, 0).unwrap(), HairyLine::new(vec![Site::Point, Site::Point], vec![q(1, 4)]).unwrap());
    let h = HairyLine::new(vec![Site::Point, Site::Hair(zero()), Site::Point], vec![q(1, 4), q(3, 4)]).unwrap();
    assert_eq!(h.normalized(), HairyLine::new(vec![Site::Point, Site::Point], vec![q(3, 4)]).unwrap());
}

#[test]
fn square_left_action_concatenates_at_distance_one() {
    let a = HairyLine::new(vec![Site::Point, Site::Hair(q(1, 2))], vec![q(1, 3)]).unwrap();
    let b = HairyLine::new(vec![Site::Point], vec![]).unwrap();
    let c = HairyLine::concat(&[a.clone(), HairyLine::unit(), b]);
    assert_eq!(c.gaps, vec![q(1, 3), one()]);
    assert_eq!(HairyLine::concat(&[]), HairyLine::unit());
    let y = act_tilde(Side::Left, 2, 1, &TildePoint::Square(a.clone())).unwrap();
    assert_eq!(y, TildePoint::Square(a));
}

#[test]
fn square_normalization_is_confluent_on_small_configurations() {
    let moves = |c: &HairyLine| c.local_moves();
    for c in all_raw_lines(3) {
        let t = all_terminals(&c, &moves);
        assert_eq!(t.len(), 1, "{c}");
        assert_eq!(t.into_iter().next().unwrap(), c.clone().normalized());
    }
}

#[test]
fn square_normalization_is_confluent_on_random_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let moves = |c: &HairyLine| c.local_moves();
    for _ in 0..500 {
        let sites = rng.gen_range(0..=6);
        let c = raw_line(&mut rng, sites);
        let n = c.clone().normalized();
        assert_eq!(random_terminal(&c, &moves, &mut rng), n, "{c}");
        assert_eq!(n.clone().normalized(), n);
        assert!(n.removable_sites().is_empty());
    }
}

#[test]
fn square_tilde_axioms_hold() {
    let start = Instant::now();
    let r = check_square_tilde(5, TILDE_SAMPLES, DEFAULT_SEED);
    assert!(r.passed(), "{:?}", r.results.iter().filter(|a| a.failures > 0).collect::<Vec<_>>());
    assert!(r.results.iter().any(|a| a.axiom == "unit-bimodule" && a.instances > 0));
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn hairy_json_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let n = rng.gen_range(0..5);
        let c = HairyConfig::random(&mut rng, n, 3, 6);
        assert_eq!(HairyConfig::from_json(&c.to_json()).unwrap(), c);
        let l = HairyLine::random(&mut rng, n, 3, 4);
        assert_eq!(HairyLine::from_json(&l.to_json()).unwrap(), l);
    }
    let v: serde_json::Value = serde_json::from_str(r#"{"points":["1/4"],"hairs":[["1/2","1/3"],["1/2","2/3"]]}"#).unwrap();
    let c = HairyConfig::from_json(&v).unwrap();
    assert_eq!(c.hairs, vec![(q(1, 2), q(2, 3))]);
    let bad: serde_json::Value = serde_json::from_str(r#"{"points":["5/4"],"hairs":[]}"#).unwrap();
    assert!(HairyConfig::from_json(&bad).is_err());
}

// --------------------------------------------------------------------
// ⟊̃
// --------------------------------------------------------------------

#[test]
fn metric_normalization_is_confluent_on_small_trees() {
    let moves = |t: &MetricTree| t.local_moves();
    let trees = all_raw_trees(3);
    assert!(trees.len() > 100);
    for t in trees {
        let ts = all_terminals(&t, &moves);
        assert_eq!(ts.len(), 1, "{t}");
        assert_eq!(ts.into_iter().next().unwrap(), t.normalize(), "{t}");
    }
}

#[test]
fn metric_normalization_examples() {
    let t = MetricTree::raw(MVertex::new(zero(), vec![v(q(1, 3), vec![v(q(1, 2), vec![leaf(), leaf()])]), leaf()]));
    assert_eq!(t.normalize(), MetricTree::raw(MVertex::new(zero(), vec![v(q(1, 2), vec![leaf(), leaf()]), leaf()])));
    let t = MetricTree::raw(MVertex::new(zero(), vec![v(zero(), vec![leaf(), leaf()]), leaf()]));
    assert_eq!(t.normalize(), MetricTree::corolla(3));
    let t = MetricTree::raw(MVertex::new(zero(), vec![v(q(1, 2), vec![leaf()])]));
    assert_eq!(t.normalize(), MetricTree::identity());
}

#[test]
fn composition_grafts_with_length_one() {
    let c2 = MetricTree::corolla(2);
    let x = c2.compose(1, &c2).unwrap();
    assert_eq!(x, MetricTree::raw(MVertex::new(zero(), vec![v(one(), vec![leaf(), leaf()]), leaf()])));
    let d = x.prime_decompose().unwrap();
    assert_eq!(d.components().len(), 2);
    assert_eq!(d.recompose(), x);
    assert_eq!(MetricTree::identity().compose(1, &x).unwrap(), x);
    assert!(c2.compose(3, &c2).is_err());
    assert!(MetricTree::identity().prime_decompose().is_err());
    assert_eq!(c2.prime_decompose().unwrap().components(), vec![c2.clone()]);
}

#[test]
fn filtration_index_counts_leaves_and_univalent_vertices() {
    assert_eq!(MetricTree::cork().filtration_index(), 1);
    assert_eq!(MetricTree::corolla(3).filtration_index(), 3);
    assert_eq!(MetricTree::identity().filtration_index(), 0);
    let t = MetricTree::corolla(2).cork_entry(1, &q(1, 2)).unwrap();
    assert_eq!(t.filtration_index(), 2);
    let t = MetricTree::corolla(2).compose(1, &MetricTree::corolla(3)).unwrap();
    assert_eq!(t.filtration_index(), 3);
    let t = MetricTree::corolla(2).cork_entry(1, &one()).unwrap();
    assert_eq!(t.filtration_index(), 2);
    assert!(t.is_quasi_prime() && !t.is_prime());
}

#[test]
fn prime_decomposition_round_trips_on_random_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let moves = |t: &MetricTree| t.local_moves();
    for _ in 0..1000 {
        let raw = MetricTree::random_raw(&mut rng, 6, 2, 4);
        let t = raw.normalize();
        assert_eq!(t.normalize(), t);
        assert_eq!(random_terminal(&raw, &moves, &mut rng), t);
        if t.is_identity() {
            continue;
        }
        let d = t.prime_decompose().unwrap();
        assert!(d.components().iter().all(MetricTree::is_prime));
        assert_eq!(d.recompose(), t);
    }
}

#[test]
fn pentagon_tilde_axioms_hold() {
    let start = Instant::now();
    let r = check_pentagon_tilde(5, TILDE_SAMPLES, DEFAULT_SEED);
    assert!(r.passed(), "{:?}", r.results.iter().filter(|a| a.failures > 0).collect::<Vec<_>>());
    assert!(r.results.iter().all(|a| a.instances > 0));
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn metric_json_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for t in random_metric_trees(&mut rng, 100, 5) {
        assert_eq!(MetricTree::from_json(&t.to_json()).unwrap(), t);
    }
    let s = r#"{"kind":"Inner","children":[{"kind":"Inner","len":"3/2","children":[]}]}"#;
    assert!(MetricTree::from_json(&serde_json::from_str(s).unwrap()).is_err());
}

// --------------------------------------------------------------------
// Corking
// --------------------------------------------------------------------

fn binary3(s: Q) -> MetricTree {
    MetricTree::raw(MVertex::new(zero(), vec![v(s, vec![leaf(), leaf()]), leaf()]))
}

#[test]
fn corking_with_length_one_is_composition_with_the_cork() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in random_metric_trees(&mut rng, 200, 5) {
        if t.univalent_count() > 0 || t.arity() < 2 {
            continue;
        }
        let alpha: Vec<usize> = (1..=t.arity()).filter(|_| rng.gen_bool(0.5)).collect();
        let taus = vec![one(); alpha.len()];
        let mut expected = t.clone();
        for &a in alpha.iter().rev() {
            expected = expected.compose(a, &MetricTree::cork()).unwrap();
        }
        assert_eq!(sigma_cork_pentagon(&t, &alpha, &taus).unwrap(), expected);
    }
}

#[test]
fn corking_the_inner_pair_leaves_a_univalent_vertex() {
    let t = binary3(q(1, 2));
    let y = sigma_cork_pentagon(&t, &[1, 2], &[zero(), zero()]).unwrap();
    assert_eq!(y.arity(), 1);
    assert_eq!(y.univalent_count(), 1);
    assert_eq!(y, MetricTree::raw(MVertex::new(zero(), vec![v(q(1, 2), vec![]), leaf()])));
    let z = sigma_cork_pentagon(&t, &[3], &[zero()]).unwrap();
    assert_eq!(z, MetricTree::corolla(2));
    assert!(sigma_cork_pentagon(&t, &[4], &[zero()]).is_err());
    assert!(sigma_cork_pentagon(&t, &[1], &[q(2, 1)]).is_err());
}

#[test]
fn b_corking_boundary_case_agrees_with_the_cut_branch() {
    let t = q(1, 2);
    let x = BPoint::bead(BBead::new(t.clone(), binary3(q(1, 3)), vec![BChild::Leaf; 3]));
    let bead_branch = sigma_cork_b(&x, &[2], &[t.clone()]).unwrap();
    let cut = BPoint::bead(BBead::new(t.clone(), binary3(q(1, 3)).cork_entry(2, &one()).unwrap(), vec![BChild::Leaf; 2]));
    assert_eq!(bead_branch, cut.canonical());
    let below = sigma_cork_b(&x, &[2], &[q(1, 4)]).unwrap();
    let expected = BPoint::bead(BBead::new(t.clone(), binary3(q(1, 3)).cork_entry(2, &q(1, 2)).unwrap(), vec![BChild::Leaf; 2]));
    assert_eq!(below, expected.canonical());
    let above = sigma_cork_b(&x, &[1], &[q(3, 4)]).unwrap();
    match &above.root {
        BChild::Bead(b) => assert!(matches!(&b.children[0], BChild::Bead(c) if c.t == q(3, 4) && c.children.is_empty())),
        _ => panic!("{above}"),
    }
}

#[test]
fn b_corking_at_time_zero_always_makes_beads() {
    let x = BPoint::bead(BBead::new(zero(), MetricTree::corolla(2), vec![BChild::Leaf; 2]));
    let y = sigma_cork_b(&x, &[1], &[zero()]).unwrap();
    assert_eq!(y.arity(), 1);
    let BChild::Bead(b) = &y.root else { panic!("{y}") };
    assert!(b.x.is_none() && b.t == zero() && b.children.len() == 2);
    let id = sigma_cork_b(&BPoint::identity(), &[1], &[q(1, 2)]).unwrap();
    assert_eq!(id.arity(), 0);
}

#[test]
fn canonical_points_fuse_end_regions() {
    let inner = BBead::new(zero(), MetricTree::corolla(2), vec![BChild::Leaf; 2]);
    let x = BPoint::bead(BBead::new(zero(), MetricTree::corolla(2), vec![BChild::Bead(inner), BChild::Leaf]));
    let y = x.canonical();
    let BChild::Bead(b) = &y.root else { panic!() };
    assert_eq!(b.children.len(), 3);
    let comp = MetricTree::corolla(2).compose(1, &MetricTree::corolla(2)).unwrap();
    let p = BPoint::bead(BBead::new(q(1, 2), comp, vec![BChild::Leaf; 3])).canonical();
    let BChild::Bead(b) = &p.root else { panic!() };
    assert!(matches!(&b.children[0], BChild::Bead(c) if c.t == q(1, 2)));
    let idb = BPoint::bead(BBead::new(q(1, 2), MetricTree::identity(), vec![BChild::Leaf]));
    assert_eq!(idb.canonical(), BPoint::identity());
}

// --------------------------------------------------------------------
// Generating cells
// --------------------------------------------------------------------

/// Generic point of a generating cell, with its count of free parameters.
fn generic_hairy(key: &GeneratingCellKey, rng: &mut ChaCha8Rng) -> (usize, usize, usize) {
    let total = key.n + key.m;
    let den = 1000;
    let mut pos: BTreeSet<i64> = BTreeSet::new();
    while pos.len() < total {
        pos.insert(rng.gen_range(1..den));
    }
    let pos: Vec<Q> = pos.into_iter().map(|p| q(p, den)).collect();
    match key.base {
        BaseModel::Triangle => {
            let mut points = Vec::new();
            let mut hairs = Vec::new();
            for (i, p) in pos.iter().enumerate() {
                if key.alpha.contains(&(i + 1)) {
                    hairs.push((p.clone(), q(rng.gen_range(1..den), den)));
                } else {
                    points.push(p.clone());
                }
            }
            let c = normalize_hairy(HairyConfig::new(points, hairs)).unwrap();
            (c.stage(), c.arity(), pos.len() + c.hairs.len())
        }
        BaseModel::Square => {
            let sites = (1..=total)
                .map(|i| if key.alpha.contains(&i) { Site::Hair(q(rng.gen_range(1..den), den)) } else { Site::Point })
                .collect();
            let gaps = (1..total).map(|_| q(rng.gen_range(1..den), den)).collect();
            let c = HairyLine::new(sites, gaps).unwrap().normalized();
            (c.stage(), c.arity(), c.gaps.len() + c.hair_count())
        }
        BaseModel::Pentagon => {
            if total < 2 {
                let y = sigma_cork_pentagon(&MetricTree::identity(), &key.alpha, &[q(1, 2)]).unwrap();
                return (y.filtration_index(), y.arity(), 0);
            }
            let mut t = MetricTree::corolla(2);
            for _ in 2..total {
                t = t.compose(1, &MetricTree::corolla(2)).unwrap();
            }
            let lens: Vec<Q> = t.lengths().iter().map(|_| q(rng.gen_range(1..den), den)).collect();
            let t = MetricTree::from_shape(&t.shape().unwrap(), &lens).normalize();
            let taus: Vec<Q> = key.alpha.iter().map(|_| q(rng.gen_range(1..den), den)).collect();
            let y = sigma_cork_pentagon(&t, &key.alpha, &taus).unwrap();
            (y.filtration_index(), y.arity(), y.lengths().len())
        }
        _ => unreachable!(),
    }
}

#[test]
fn generating_cells_match_generic_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for base in [BaseModel::Triangle, BaseModel::Square, BaseModel::Pentagon] {
        for stage in 0..=6 {
            let keys = generating_cells(base, stage);
            for k in &keys {
                let (s, deg, params) = generic_hairy(k, &mut rng);
                assert_eq!((s, deg, params), (stage, k.n, k.dim()), "{k}");
            }
            let expected = match (base, stage) {
                (BaseModel::Square, 0) => 0,
                (BaseModel::Pentagon, 0) => 0,
                (BaseModel::Pentagon, 1) => 1,
                _ => 1 << stage,
            };
            assert_eq!(keys.len(), expected, "{base:?} {stage}");
        }
    }
}

#[test]
fn schedules_match_the_examples() {
    let s = tilde_schedule(TildeModel::Triangle, 2);
    let st2: Vec<(usize, usize, usize)> = s.at_stage(2).iter().map(|r| (r.degree, r.dim, r.count)).collect();
    assert_eq!(st2, vec![(2, 2, 1), (1, 3, 2), (0, 4, 1)]);
    let s = tilde_schedule(TildeModel::Pentagon, 2);
    let st2: Vec<(usize, usize, usize)> = s.at_stage(2).iter().map(|r| (r.degree, r.dim, r.count)).collect();
    assert_eq!(st2, vec![(2, 0, 1), (1, 1, 2), (0, 2, 1)]);
    let st1: Vec<(usize, usize, usize)> = s.at_stage(1).iter().map(|r| (r.degree, r.dim, r.count)).collect();
    assert_eq!(st1, vec![(0, 0, 1)]);
    assert_eq!(tilde_schedule(TildeModel::WbSquare, 5), tilde_schedule(TildeModel::Triangle, 5));
    assert_eq!(tilde_schedule(TildeModel::BPentagon, 5), tilde_schedule(TildeModel::Square, 5));
    assert!(tilde_schedule(TildeModel::Square, 0).records.is_empty());
}

#[test]
fn ladder_dimensions_drop_by_one() {
    for stage in 2..=6 {
        let t = generating_cells(BaseModel::Triangle, stage);
        let s = generating_cells(BaseModel::Square, stage);
        let p = generating_cells(BaseModel::Pentagon, stage);
        for ((a, b), c) in t.iter().zip(&s).zip(&p) {
            assert_eq!((a.n, a.m), (c.n, c.m));
            assert_eq!(a.dim(), b.dim() + 1);
            assert_eq!(b.dim(), c.dim() + 1);
        }
    }
}

// --------------------------------------------------------------------
// Wb□̃
// --------------------------------------------------------------------

#[test]
fn wb_tilde_descriptions_agree() {
    for n in 0..=3 {
        let r = wb_tilde_identify(n, 4);
        assert!(r.passed(), "{r:?}");
        assert!(r.cork_cells > 0);
        assert_eq!(r.cork_raw, r.cork_cells + r.cork_absorbed);
    }
    let r = wb_tilde_identify(0, 1);
    assert_eq!(r.generating_cells, 2);
    assert!(r.passed(), "{r:?}");
}

#[test]
fn unit_deletion_removes_exactly_the_unit_beads() {
    use operadkit::wb_construction::WbCell;
    for c in WbCell::all(3) {
        let cell = WbTildeCell { base: c.clone(), corks: vec![] };
        let co = coend_cells_of(&cell);
        assert_eq!(co.to_cork_cell(), cell);
        for u in co.unit_insertions() {
            assert!(u.contains_unit());
            assert_eq!(u.to_cork_cell(), cell, "{c}");
        }
    }
}

proptest! {
    #[test]
    fn triangle_actions_preserve_normal_form(seed in 0u64..500, k in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..5);
        let c = HairyConfig::random(&mut rng, n, 3, 6);
        let i = rng.gen_range(1..=n);
        let y = c.right(i, k).unwrap();
        prop_assert_eq!(normalize_hairy(y.clone()).unwrap(), y.clone());
        prop_assert_eq!(y.arity(), n + k - 1);
    }

    #[test]
    fn composing_primes_gives_two_components(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = MetricTree::random(&mut rng, 4, 1, 4);
        let b = MetricTree::random(&mut rng, 4, 1, 4);
        prop_assume!(a.is_prime() && b.is_prime() && a.arity() > 0);
        let i = rng.gen_range(1..=a.arity());
        let c = a.compose(i, &b).unwrap();
        prop_assert_eq!(c.prime_decompose().unwrap().components().len(), 2);
    }
}
