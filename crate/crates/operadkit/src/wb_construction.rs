//! The Wb-construction on the cube model: the categories Ξₙ, the prisms
//! λ□(T) × χ▲(T), their assembly W̄b□(n), the quotient Wb□(n) and the
//! filtrations Wb(□_N), Wb□_N and Wb□_{N−1/2}.
//!
//! A cell of W̄b□(n) is recorded globally. Leaves carry times
//! `s₁ ≤ … ≤ sₙ` in [0,1] and consecutive leaves carry a distance `d` in
//! [0,1]; leaves at different times are at distance 1. For each pair of
//! consecutive leaves the state is one of: same time and `d = 0`, same time
//! and `d` free, same time and `d = 1`, or a time jump. Runs of leaves
//! between jumps form time classes; the first may be pinned to 0 and the
//! last to 1.

use crate::classic_models::{CubeFace, Gap, SimplexFace};
use crate::complexes::{quotient, CellComplex, ComplexBuilder, QuotientError};
use crate::tree_core::{compositions, Node, PlanarTree};
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GapState {
    Zero,
    Free,
    One,
    Jump,
}

impl GapState {
    /// The state left behind when the leaf between two gaps is forgotten.
    pub fn merge(self, other: GapState) -> GapState {
        self.max(other)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WbError {
    #[error("degree {n} exceeds the configured bound {bound}")]
    BoundExceeded { n: usize, bound: usize },
    #[error("Ξ_0 is undefined")]
    EmptyXi,
    #[error("prisms disagree on the boundary of {0}")]
    Gluing(String),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error("{0}")]
    Complex(String),
}

// ====================================================================
// Ξₙ and prisms
// ====================================================================

/// Ξₙ: cube-face trees without inner vertices above beads, ordered by
/// bead compositions, with covering moves that merge two adjacent beads.
#[derive(Clone, Debug)]
pub struct XiCategory {
    pub objects: Vec<Vec<usize>>,
    pub covers: Vec<(usize, usize)>,
}

impl XiCategory {
    pub fn tree(&self, i: usize) -> PlanarTree {
        xi_tree(&self.objects[i])
    }
}

pub fn xi_tree(beads: &[usize]) -> PlanarTree {
    let nodes: Vec<Node> = beads.iter().map(|&m| Node::bead(Node::leaves(m))).collect();
    if nodes.len() == 1 {
        PlanarTree::from_node(&nodes[0])
    } else {
        PlanarTree::from_node(&Node::inner(nodes))
    }
}

pub fn xi_category(n: usize) -> Result<XiCategory, WbError> {
    if n == 0 {
        return Err(WbError::EmptyXi);
    }
    let mut objects = compositions(n);
    objects.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let index: HashMap<Vec<usize>, usize> = objects.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
    let mut covers = Vec::new();
    for (i, o) in objects.iter().enumerate() {
        for s in 0..o.len().saturating_sub(1) {
            let mut m = o.clone();
            let b = m.remove(s + 1);
            m[s] += b;
            covers.push((i, index[&m]));
        }
    }
    Ok(XiCategory { objects, covers })
}

/// A face of λ□(T) × χ▲(T): one cube face per bead of `T` and a face of
/// the simplex of monotone bead times.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrismCell {
    pub cubes: Vec<CubeFace>,
    pub times: SimplexFace,
}

impl PrismCell {
    pub fn dim(&self) -> usize {
        self.cubes.iter().map(CubeFace::dim).sum::<usize>() + self.times.dim()
    }

    pub fn all(beads: &[usize]) -> Vec<PrismCell> {
        let mut cube_choices: Vec<Vec<CubeFace>> = vec![Vec::new()];
        for &m in beads {
            let faces = CubeFace::all(m);
            cube_choices = cube_choices
                .into_iter()
                .flat_map(|pre| {
                    faces.iter().map(move |f| {
                        let mut p = pre.clone();
                        p.push(f.clone());
                        p
                    })
                })
                .collect();
        }
        let mut out = Vec::new();
        for cubes in cube_choices {
            for times in SimplexFace::all(beads.len()) {
                out.push(PrismCell { cubes: cubes.clone(), times });
            }
        }
        out
    }

    pub fn facets(&self) -> Vec<PrismCell> {
        let mut out = Vec::new();
        for (b, c) in self.cubes.iter().enumerate() {
            for f in c.facets() {
                let mut p = self.clone();
                p.cubes[b] = f;
                out.push(p);
            }
        }
        for t in self.times.facets() {
            out.push(PrismCell { cubes: self.cubes.clone(), times: t });
        }
        out
    }

    /// The cell of W̄b□(n) this prism face is identified with.
    pub fn global(&self) -> WbBarCell {
        let mut class_of_bead = Vec::new();
        let t = &self.times;
        let mut classes = 0;
        if t.left > 0 {
            class_of_bead.extend(std::iter::repeat(0).take(t.left));
            classes = 1;
        }
        for &g in &t.groups {
            class_of_bead.extend(std::iter::repeat(classes).take(g));
            classes += 1;
        }
        if t.right > 0 {
            class_of_bead.extend(std::iter::repeat(classes).take(t.right));
        }
        let mut gaps = Vec::new();
        for (b, c) in self.cubes.iter().enumerate() {
            if b > 0 {
                gaps.push(if class_of_bead[b] == class_of_bead[b - 1] { GapState::One } else { GapState::Jump });
            }
            gaps.extend(c.gaps.iter().map(|g| match g {
                Gap::Zero => GapState::Zero,
                Gap::Free => GapState::Free,
                Gap::One => GapState::One,
            }));
        }
        WbBarCell { gaps, label0: t.left > 0, label1: t.right > 0 }
    }
}

// ====================================================================
// Cells of W̄b□(n)
// ====================================================================

/// Global description of a cell of W̄b□(n), n ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WbBarCell {
    pub gaps: Vec<GapState>,
    pub label0: bool,
    pub label1: bool,
}

impl WbBarCell {
    pub fn arity(&self) -> usize {
        self.gaps.len() + 1
    }

    pub fn classes(&self) -> usize {
        1 + self.gaps.iter().filter(|g| **g == GapState::Jump).count()
    }

    pub fn free_classes(&self) -> usize {
        self.classes() - usize::from(self.label0) - usize::from(self.label1)
    }

    pub fn dim(&self) -> usize {
        self.gaps.iter().filter(|g| **g == GapState::Free).count() + self.free_classes()
    }

    pub fn all(n: usize) -> Vec<WbBarCell> {
        let mut gapss: Vec<Vec<GapState>> = vec![Vec::new()];
        for _ in 1..n {
            gapss = gapss
                .into_iter()
                .flat_map(|g| {
                    [GapState::Zero, GapState::Free, GapState::One, GapState::Jump].into_iter().map(move |s| {
                        let mut h = g.clone();
                        h.push(s);
                        h
                    })
                })
                .collect();
        }
        let mut out = Vec::new();
        for gaps in gapss {
            for (label0, label1) in [(false, false), (true, false), (false, true), (true, true)] {
                let c = WbBarCell { gaps: gaps.clone(), label0, label1 };
                if c.classes() >= usize::from(label0) + usize::from(label1) {
                    out.push(c);
                }
            }
        }
        out
    }

    /// Leaf ranges `[start, end)` of the time classes.
    pub fn class_ranges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for (j, g) in self.gaps.iter().enumerate() {
            if *g == GapState::Jump {
                out.push((start, j + 1));
                start = j + 1;
            }
        }
        out.push((start, self.arity()));
        out
    }

    pub fn facets(&self) -> Vec<WbBarCell> {
        let mut out = Vec::new();
        for (j, g) in self.gaps.iter().enumerate() {
            if *g == GapState::Free {
                for s in [GapState::Zero, GapState::One] {
                    let mut c = self.clone();
                    c.gaps[j] = s;
                    out.push(c);
                }
            }
        }
        let jumps: Vec<usize> =
            self.gaps.iter().enumerate().filter(|(_, g)| **g == GapState::Jump).map(|(j, _)| j).collect();
        // a jump may collapse unless it separates the 0-class from the 1-class
        for &j in &jumps {
            let zero_one = self.label0 && self.label1 && jumps.len() == 1;
            if !zero_one {
                let mut c = self.clone();
                c.gaps[j] = GapState::One;
                out.push(c);
            }
        }
        let first_free = !self.label0 && (self.classes() > 1 || !self.label1);
        let last_free = !self.label1 && (self.classes() > 1 || !self.label0);
        if first_free {
            out.push(WbBarCell { label0: true, ..self.clone() });
        }
        if last_free {
            out.push(WbBarCell { label1: true, ..self.clone() });
        }
        out
    }

    /// The cube-face tree in which jumps are bead separations.
    pub fn base(&self) -> CubeFace {
        CubeFace {
            arity: self.arity(),
            gaps: self
                .gaps
                .iter()
                .map(|g| match g {
                    GapState::Zero => Gap::Zero,
                    GapState::Free => Gap::Free,
                    _ => Gap::One,
                })
                .collect(),
        }
    }

    pub fn encircled(&self) -> EncircledTree {
        let mut groups: Vec<Vec<usize>> = vec![vec![0]];
        let mut bead = 0;
        for g in &self.gaps {
            match g {
                GapState::One => {
                    bead += 1;
                    groups.last_mut().unwrap().push(bead);
                }
                GapState::Jump => {
                    bead += 1;
                    groups.push(vec![bead]);
                }
                _ => {}
            }
        }
        EncircledTree {
            tree: self.base().to_tree().expect("positive arity"),
            groups,
            label0: self.label0,
            label1: self.label1,
        }
    }

    pub fn label(&self) -> String {
        self.encircled().to_string()
    }
}

/// A planar tree whose beads are partitioned into encircled groups; the
/// leftmost group may carry the label 0 and the rightmost the label 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EncircledTree {
    #[serde(skip)]
    pub tree: PlanarTree,
    pub groups: Vec<Vec<usize>>,
    pub label0: bool,
    pub label1: bool,
}

impl EncircledTree {
    pub fn to_json(&self) -> String {
        let mut v: serde_json::Value = serde_json::from_str(&self.tree.to_json()).expect("tree json");
        let obj = v.as_object_mut().expect("object");
        obj.insert("groups".into(), serde_json::json!(self.groups));
        obj.insert("label0".into(), serde_json::json!(self.label0));
        obj.insert("label1".into(), serde_json::json!(self.label1));
        v.to_string()
    }
}

impl fmt::Display for EncircledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tree)?;
        let last = self.groups.len() - 1;
        for (i, g) in self.groups.iter().enumerate() {
            let mark = if i == 0 && self.label0 {
                "0"
            } else if i == last && self.label1 {
                "1"
            } else {
                ""
            };
            let ids: Vec<String> = g.iter().map(usize::to_string).collect();
            write!(f, " {mark}{{{}}}", ids.join(","))?;
        }
        Ok(())
    }
}

pub const POINT_LABEL: &str = "pt";

/// W̄b□(n), glued from the prisms of Ξₙ; W̄b□(0) is a point.
pub fn assemble_wb_bar(n: usize, bound: usize) -> Result<CellComplex, WbError> {
    if n > bound {
        return Err(WbError::BoundExceeded { n, bound });
    }
    let mut b = ComplexBuilder::new();
    if n == 0 {
        b.add(POINT_LABEL, 0, 0, Vec::new());
        return b.build().map_err(|e| WbError::Complex(e.to_string()));
    }
    let xi = xi_category(n)?;
    let mut cells: HashMap<WbBarCell, Vec<WbBarCell>> = HashMap::new();
    for beads in &xi.objects {
        for p in PrismCell::all(beads) {
            let g = p.global();
            let mut faces: Vec<WbBarCell> = p.facets().iter().map(PrismCell::global).collect();
            faces.sort();
            match cells.get(&g) {
                Some(prev) if *prev != faces => return Err(WbError::Gluing(g.label())),
                Some(_) => {}
                None => {
                    cells.insert(g, faces);
                }
            }
        }
    }
    let mut list: Vec<(WbBarCell, Vec<WbBarCell>)> = cells.into_iter().collect();
    list.sort_by(|x, y| (x.0.dim(), &x.0).cmp(&(y.0.dim(), &y.0)));
    for (c, faces) in list {
        b.add(c.label(), c.dim(), n, faces.iter().map(|f| (f.label(), 1)).collect());
    }
    b.build().map_err(|e| WbError::Complex(e.to_string()))
}

// ====================================================================
// The quotient Wb□(n)
// ====================================================================

/// Cell of Wb□(n): `left` leaves at 0, `right` leaves at 1, and between
/// them `mid` leaves whose consecutive gap states are `gaps`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WbCell {
    pub left: usize,
    pub mid: usize,
    pub gaps: Vec<GapState>,
    pub right: usize,
}

impl WbCell {
    pub fn point() -> WbCell {
        WbCell { left: 0, mid: 0, gaps: Vec::new(), right: 0 }
    }

    pub fn arity(&self) -> usize {
        self.left + self.mid + self.right
    }

    pub fn from_bar(c: &WbBarCell) -> WbCell {
        let ranges = c.class_ranges();
        let left = if c.label0 { ranges[0].1 } else { 0 };
        let right = if c.label1 { c.arity() - ranges.last().unwrap().0 } else { 0 };
        let mid = c.arity() - left - right;
        let gaps = if mid == 0 { Vec::new() } else { c.gaps[left..left + mid - 1].to_vec() };
        WbCell { left, mid, gaps, right }
    }

    pub fn dim(&self) -> usize {
        if self.mid == 0 {
            return 0;
        }
        1 + self.gaps.iter().filter(|g| matches!(g, GapState::Free | GapState::Jump)).count()
    }

    /// Arity of each bead after relabeling; the two-sided empty middle
    /// keeps a bead without outgoing edges.
    pub fn bead_arities(&self) -> Vec<usize> {
        if self.mid == 0 {
            return if self.left > 0 && self.right > 0 { vec![0] } else { Vec::new() };
        }
        let mut out = vec![1];
        for g in &self.gaps {
            match g {
                GapState::Free => *out.last_mut().unwrap() += 1,
                GapState::One | GapState::Jump => out.push(1),
                GapState::Zero => {}
            }
        }
        out
    }

    pub fn label(&self) -> String {
        if self.arity() == 0 {
            return POINT_LABEL.to_string();
        }
        let middle = if self.mid == 0 {
            if self.left > 0 && self.right > 0 {
                "B()".to_string()
            } else {
                "-".to_string()
            }
        } else {
            WbBarCell { gaps: self.gaps.clone(), label0: false, label1: false }.label()
        };
        format!("{}|{}|{}", self.left, middle, self.right)
    }

    /// The face of △(n) whose interior contains this cell.
    pub fn simplex_face(&self) -> SimplexFace {
        let mut groups = Vec::new();
        if self.mid > 0 {
            groups.push(1);
            for g in &self.gaps {
                if *g == GapState::Zero {
                    *groups.last_mut().unwrap() += 1;
                } else {
                    groups.push(1);
                }
            }
        }
        SimplexFace { left: self.left, groups, right: self.right }
    }

    /// `a_k ∘_i x`
    pub fn left_action(&self, k: usize, i: usize) -> WbCell {
        WbCell { left: self.left + i - 1, right: self.right + k - i, ..self.clone() }
    }

    /// `x ∘_i a_k`; `k = 0` forgets leaf `i`.
    pub fn right_action(&self, i: usize, k: usize) -> WbCell {
        let mut c = self.clone();
        if i <= c.left {
            c.left = c.left + k - 1;
        } else if i > c.left + c.mid {
            c.right = c.right + k - 1;
        } else {
            let p = i - c.left - 1;
            if k == 0 {
                c.mid -= 1;
                if c.mid > 0 {
                    if p == 0 {
                        c.gaps.remove(0);
                    } else if p == c.gaps.len() {
                        c.gaps.pop();
                    } else {
                        let b = c.gaps.remove(p);
                        c.gaps[p - 1] = c.gaps[p - 1].merge(b);
                    }
                }
            } else {
                for _ in 1..k {
                    c.gaps.insert(p, GapState::Zero);
                }
                c.mid += k - 1;
            }
        }
        c
    }

    pub fn all(n: usize) -> Vec<WbCell> {
        if n == 0 {
            return vec![WbCell::point()];
        }
        let mut set: Vec<WbCell> = WbBarCell::all(n).iter().map(WbCell::from_bar).collect();
        set.sort();
        set.dedup();
        set
    }
}

impl fmt::Display for WbCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn wb_key_of_label(n: usize) -> HashMap<String, WbCell> {
    WbBarCell::all(n).into_iter().map(|c| (c.label(), WbCell::from_bar(&c))).collect()
}

/// Wb□(n): the prism complex with beads at times 0 or 1 relabeled as
/// inner vertices.
pub fn quotient_wb(n: usize, bound: usize) -> Result<CellComplex, WbError> {
    let bar = assemble_wb_bar(n, bound)?;
    if n == 0 {
        return Ok(bar);
    }
    let keys = wb_key_of_label(n);
    Ok(quotient(&bar, |c| {
        let k = &keys[&c.label];
        (k.label(), k.dim())
    })?)
}

/// Cells of Wb□(n) indexed by label.
pub fn wb_cells(n: usize) -> HashMap<String, WbCell> {
    WbCell::all(n).into_iter().map(|c| (c.label(), c)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WbStage {
    /// Wb(□_N): every bead has at most N outgoing edges.
    OfStage,
    /// Wb□_N: the beads have at most N outgoing edges in total.
    Stage,
    /// Wb□_{N−1/2} = Wb□_N ∩ Wb(□_{N−1}).
    Half,
}

pub fn in_stage(c: &WbCell, which: WbStage, big_n: usize) -> bool {
    let a = c.bead_arities();
    let max = a.iter().copied().max().unwrap_or(0);
    let total: usize = a.iter().sum();
    match which {
        WbStage::OfStage => max <= big_n,
        WbStage::Stage => total <= big_n,
        WbStage::Half => total <= big_n && max < big_n,
    }
}

/// The filtration term `which` at level `N`, in degree `n`.
pub fn wb_stage_complex(which: WbStage, big_n: usize, n: usize, bound: usize) -> Result<CellComplex, WbError> {
    let full = quotient_wb(n, bound)?;
    let cells = wb_cells(n);
    full.subcomplex(|c| in_stage(&cells[&c.label], which, big_n)).map_err(|e| WbError::Complex(e.to_string()))
}

pub fn wb_of_stage(big_n: usize, n: usize, bound: usize) -> Result<CellComplex, WbError> {
    wb_stage_complex(WbStage::OfStage, big_n, n, bound)
}

pub fn wb_half_stage(big_n: usize, n: usize, bound: usize) -> Result<CellComplex, WbError> {
    wb_stage_complex(WbStage::Half, big_n, n, bound)
}

/// The weak bimodule structure of Wb□ on cells.
pub struct WbCells {
    pub degeneracy: bool,
}

impl crate::classic_models::WeakAssocBimodule for WbCells {
    type Elem = WbCell;
    fn arity(&self, x: &WbCell) -> usize {
        x.arity()
    }
    fn left(&self, k: usize, i: usize, x: &WbCell) -> Result<WbCell, crate::classic_models::ActionError> {
        crate::classic_models::points::check_slot(i, k)?;
        Ok(x.left_action(k, i))
    }
    fn right(&self, x: &WbCell, i: usize, k: usize) -> Result<WbCell, crate::classic_models::ActionError> {
        crate::classic_models::points::check_slot(i, x.arity())?;
        if k == 0 && !self.degeneracy {
            return Err(crate::classic_models::ActionError::Degeneracy);
        }
        Ok(x.right_action(i, k))
    }
    fn degeneracy(&self) -> bool {
        self.degeneracy
    }
}
