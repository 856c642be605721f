use operadkit::classic_models::{axioms, build_complex, Model, TriangleCells, WeakAssocBimodule};
use operadkit::complexes::{check_refinement, ComplexBuilder};
use operadkit::rational::{q, Q};
use operadkit::wb_construction::*;
use std::collections::{BTreeSet, HashSet};

/// Cell of a point given by leaf times and consecutive distances.
fn cell_of_point(times: &[Q], dists: &[Q]) -> WbBarCell {
    let zero = q(0, 1);
    let one = q(1, 1);
    let gaps = (0..dists.len())
        .map(|j| {
            if times[j] < times[j + 1] {
                GapState::Jump
            } else if dists[j] == zero {
                GapState::Zero
            } else if dists[j] == one {
                GapState::One
            } else {
                GapState::Free
            }
        })
        .collect();
    WbBarCell { gaps, label0: times[0] == zero, label1: *times.last().unwrap() == one }
}

fn grid_points(n: usize) -> Vec<(Vec<Q>, Vec<Q>)> {
    let tvals: Vec<Q> = (0..=n as i64 + 1).map(|k| q(k, n as i64 + 1)).collect();
    let dvals = [q(0, 1), q(1, 2), q(1, 1)];
    let mut out = Vec::new();
    let total_t = tvals.len().pow(n as u32);
    let total_d = dvals.len().pow(n as u32 - 1);
    for a in 0..total_t {
        let times: Vec<Q> = (0..n).map(|i| tvals[a / tvals.len().pow(i as u32) % tvals.len()].clone()).collect();
        if times.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        for b in 0..total_d {
            let dists: Vec<Q> =
                (0..n - 1).map(|i| dvals[b / dvals.len().pow(i as u32) % dvals.len()].clone()).collect();
            if (0..n - 1).any(|j| times[j] < times[j + 1] && dists[j] != q(1, 1)) {
                continue;
            }
            out.push((times.clone(), dists));
        }
    }
    out
}

#[test]
fn cells_are_exactly_the_strata_of_points() {
    for n in 1..=4 {
        let complex = assemble_wb_bar(n, 8).unwrap();
        let labels: BTreeSet<String> = complex.cells().iter().map(|c| c.label.clone()).collect();
        let hit: BTreeSet<String> = grid_points(n).iter().map(|(t, d)| cell_of_point(t, d).label()).collect();
        assert_eq!(hit, labels, "n = {n}");
    }
}

#[test]
fn xi_category_is_a_cube() {
    for n in 1..=6 {
        let xi = xi_category(n).unwrap();
        assert_eq!(xi.objects.len(), 1 << (n - 1));
        assert_eq!(xi.covers.len(), (n - 1) * (1 << (n - 1)) / 2);
        for i in 0..xi.objects.len() {
            let t = xi.tree(i);
            assert!(t.vertices_of(operadkit::tree_core::VertexKind::Inner).len() <= 1);
        }
    }
    assert_eq!(xi_category(3).unwrap().objects.len(), 4);
    assert!(xi_category(0).is_err());
}

#[test]
fn prisms_have_full_dimension_and_count() {
    for n in 1..=6 {
        let xi = xi_category(n).unwrap();
        for beads in &xi.objects {
            let top: usize = beads.iter().map(|m| m - 1).sum::<usize>() + beads.len();
            assert_eq!(top, n);
        }
        let c = assemble_wb_bar(n, 8).unwrap();
        assert_eq!(c.cells_of_dim(n).len(), 1 << (n - 1));
        assert_eq!(c.top_dim(), Some(n));
    }
}

#[test]
fn global_facet_rule_matches_prism_gluing() {
    for n in 1..=5 {
        let glued = assemble_wb_bar(n, 8).unwrap();
        let mut b = ComplexBuilder::new();
        for c in WbBarCell::all(n) {
            b.add(c.label(), c.dim(), n, c.facets().iter().map(|f| (f.label(), 1)).collect());
        }
        let direct = b.build().unwrap();
        assert_eq!(direct.len(), glued.len());
        for i in 0..glued.len() {
            let j = direct.index_of(&glued.cell(i).label).unwrap();
            let a: HashSet<&str> = glued.boundary(i).iter().map(|&(k, _)| glued.cell(k).label.as_str()).collect();
            let b: HashSet<&str> = direct.boundary(j).iter().map(|&(k, _)| direct.cell(k).label.as_str()).collect();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn bar_and_quotient_are_discs() {
    for n in 0..=5 {
        for c in [assemble_wb_bar(n, 8).unwrap(), quotient_wb(n, 8).unwrap()] {
            let mut disc = vec![0; n + 1];
            disc[0] = 1;
            assert_eq!(c.homology_mod2(), disc);
            assert_eq!(c.euler_characteristic(), 1);
        }
    }
    assert_eq!(quotient_wb(0, 8).unwrap().len(), 1);
    assert_eq!(quotient_wb(2, 8).unwrap().f_vector().0, vec![3, 4, 2]);
    assert_eq!(assemble_wb_bar(1, 8).unwrap().f_vector().0, vec![2, 1]);
}

#[test]
fn quotient_only_touches_the_boundary() {
    for n in 1..=5 {
        let bar = assemble_wb_bar(n, 8).unwrap();
        let mut images = HashSet::new();
        for c in WbBarCell::all(n) {
            if c.free_classes() == c.classes() {
                assert!(images.insert(WbCell::from_bar(&c)), "interior cells identified");
                assert_eq!(WbCell::from_bar(&c).dim(), c.dim());
            }
        }
        assert!(bar.cells_of_dim(n).len() == quotient_wb(n, 8).unwrap().cells_of_dim(n).len());
    }
}

#[test]
fn quotient_vertices_are_the_simplex_vertices() {
    for n in 1..=5 {
        let wb = quotient_wb(n, 8).unwrap();
        let cells = wb_cells(n);
        let mut v: Vec<(usize, usize)> =
            wb.cells_of_dim(0).iter().map(|&i| &cells[&wb.cell(i).label]).map(|c| (c.left, c.right)).collect();
        v.sort();
        assert_eq!(v, (0..=n).map(|l| (l, n - l)).collect::<Vec<_>>());
    }
}

#[test]
fn wb_refines_the_simplex() {
    for n in 0..=4 {
        let wb = quotient_wb(n, 8).unwrap();
        let s = build_complex(Model::Triangle, n, 8).unwrap();
        let cells = wb_cells(n);
        let w = check_refinement(&wb, &s, |c| Some(cells[&c.label].simplex_face().to_string())).unwrap();
        let top = s.index_of(&operadkit::classic_models::SimplexFace::top(n).to_string()).unwrap();
        assert_eq!(w.preimage_profile(&wb, top).last(), Some(&(1usize << n.saturating_sub(1))));
    }
}

#[test]
fn wb_cells_form_a_weak_bimodule_compatible_with_the_simplex() {
    for degeneracy in [false, true] {
        let cells: Vec<WbCell> = (0..=4).flat_map(WbCell::all).collect();
        let t = axioms::check_weak_bimodule(&WbCells { degeneracy }, &cells, 4);
        let mut r = axioms::AxiomReport::new("wb", 0);
        r.extend("cell", t);
        assert!(r.passed(), "{:?}", r.results.iter().find(|x| x.failures > 0));
        let tri = TriangleCells { degeneracy };
        let wb = WbCells { degeneracy };
        for c in &cells {
            let f = c.simplex_face().to_tree();
            for k in 1..=3 {
                for i in 1..=k {
                    assert_eq!(wb.left(k, i, c).unwrap().simplex_face().to_tree(), tri.left(k, i, &f).unwrap());
                }
            }
            for i in 1..=c.arity() {
                for k in usize::from(!degeneracy)..=3 {
                    assert_eq!(wb.right(c, i, k).unwrap().simplex_face().to_tree(), tri.right(&f, i, k).unwrap());
                }
            }
        }
    }
}

#[test]
fn filtrations() {
    for big_n in 1..=4 {
        for n in 0..=big_n + 1 {
            let stage = wb_stage_complex(WbStage::Stage, big_n, n, 8).unwrap();
            let of = wb_of_stage(big_n, n, 8).unwrap();
            assert!(stage.cells().iter().all(|c| of.index_of(&c.label).is_some()));
            if n == big_n + 1 {
                assert!(stage.len() < of.len());
            }
            let half = wb_half_stage(big_n, n, 8).unwrap();
            assert!(half.cells().iter().all(|c| stage.index_of(&c.label).is_some()));
        }
        let full = quotient_wb(big_n, 8).unwrap();
        let half = wb_half_stage(big_n, big_n, 8).unwrap();
        assert_eq!(half.len(), full.len() - 1);
        // a disc with an open interior cell removed
        let mut sphere = vec![0; big_n + 1];
        sphere[0] = 1;
        sphere[big_n - 1] += 1;
        sphere.truncate(half.top_dim().unwrap() + 1);
        assert_eq!(half.homology_mod2(), sphere);
        let below = wb_stage_complex(WbStage::Stage, big_n - 1, big_n, 8).unwrap();
        assert_eq!(half.len() - below.len(), 3usize.pow(big_n as u32 - 1) - 1);
    }
    for n in 0..=1 {
        let a = wb_stage_complex(WbStage::Stage, 1, n, 8).unwrap().len();
        assert_eq!(a, wb_of_stage(1, n, 8).unwrap().len());
        assert_eq!(a, quotient_wb(n, 8).unwrap().len());
    }
}

#[test]
fn bead_arity_report() {
    let c = WbCell { left: 1, mid: 0, gaps: vec![], right: 1 };
    assert_eq!(c.bead_arities(), vec![0]);
    let c = WbCell { left: 0, mid: 3, gaps: vec![GapState::Free, GapState::Jump], right: 0 };
    assert_eq!(c.bead_arities(), vec![2, 1]);
    let e = WbBarCell { gaps: vec![GapState::One], label0: true, label1: false }.encircled();
    assert_eq!(e.to_json(), r#"{"children":[{"children":[{"children":[],"kind":"leaf"}],"kind":"bead"},{"children":[{"children":[],"kind":"leaf"}],"kind":"bead"}],"groups":[[0,1]],"kind":"inner","label0":true,"label1":false}"#);
}
