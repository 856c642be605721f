//! The B-construction on the Stasheff operad: the face lattice Ψₙ, order
//! polytopes of bead posets, the assembly B̄⟊(n) = λ⟊ ⊗_Ψₙ χ▲, its ⟊-actions,
//! the quotient B⟊(n) and the filtrations B⟊_N, B(⟊_N), B⟊_{N−1/2}.
//!
//! A face tree of the associahedron is stored as the set of leaf intervals
//! spanned by its non-root beads. A cell of B̄⟊(n) is a face tree together
//! with a partition of its beads: a 0-block (a downset containing the root,
//! possibly empty), a 1-block (an upset, possibly empty) and middle blocks,
//! each a connected subtree whose beads share one free time.

use crate::classic_models::{assoc_faces, CubeFace, Gap};
use crate::complexes::{quotient, CellComplex, ComplexBuilder, QuotientError};
use crate::tree_core::{Node, PlanarTree, VertexKind};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use thiserror::Error;

/// Half-open interval of leaf positions.
pub type Interval = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BError {
    #[error("degree {n} exceeds the configured bound {bound}")]
    BoundExceeded { n: usize, bound: usize },
    #[error("pieces disagree on the boundary of {0}")]
    Gluing(String),
    #[error("filtration inclusion fails at {0}")]
    Inclusion(String),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error("{0}")]
    Complex(String),
}

// ====================================================================
// Ψₙ
// ====================================================================

/// Face of ⟊(n), recorded by the leaf spans of its non-root beads.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PsiObject {
    pub n: usize,
    pub edges: BTreeSet<Interval>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Child {
    Leaf(usize),
    Bead(Interval),
}

fn nested_or_disjoint(a: Interval, b: Interval) -> bool {
    a.1 <= b.0 || b.1 <= a.0 || (a.0 <= b.0 && b.1 <= a.1) || (b.0 <= a.0 && a.1 <= b.1)
}

impl PsiObject {
    pub fn corolla(n: usize) -> PsiObject {
        PsiObject { n, edges: BTreeSet::new() }
    }

    pub fn root(&self) -> Interval {
        (0, self.n)
    }

    /// Beads in preorder; empty for the identity tree.
    pub fn beads(&self) -> Vec<Interval> {
        if self.n < 2 {
            return Vec::new();
        }
        let mut v: Vec<Interval> = std::iter::once(self.root()).chain(self.edges.iter().copied()).collect();
        v.sort_by_key(|&(a, b)| (a, std::cmp::Reverse(b)));
        v
    }

    pub fn children(&self, bead: Interval) -> Vec<Child> {
        let mut out = Vec::new();
        let mut p = bead.0;
        while p < bead.1 {
            let next = self.edges.range((p, p)..(p, bead.1 + 1)).filter(|&&j| j != bead).map(|j| j.1).max();
            match next {
                Some(e) => {
                    out.push(Child::Bead((p, e)));
                    p = e;
                }
                None => {
                    out.push(Child::Leaf(p));
                    p += 1;
                }
            }
        }
        out
    }

    pub fn out_degree(&self, bead: Interval) -> usize {
        self.children(bead).len()
    }

    pub fn dim(&self) -> usize {
        self.beads().iter().map(|&b| self.out_degree(b) - 2).sum()
    }

    /// Whether `self` is a face of `other`.
    pub fn leq(&self, other: &PsiObject) -> bool {
        self.n == other.n && other.edges.is_subset(&self.edges)
    }

    /// Smallest face containing both.
    pub fn join(&self, other: &PsiObject) -> PsiObject {
        PsiObject { n: self.n, edges: self.edges.intersection(&other.edges).copied().collect() }
    }

    /// Intersection face, if the two faces meet.
    pub fn meet(&self, other: &PsiObject) -> Option<PsiObject> {
        let edges: BTreeSet<Interval> = self.edges.union(&other.edges).copied().collect();
        let v: Vec<Interval> = edges.iter().copied().collect();
        for (i, &a) in v.iter().enumerate() {
            if v[i + 1..].iter().any(|&b| !nested_or_disjoint(a, b)) {
                return None;
            }
        }
        Some(PsiObject { n: self.n, edges })
    }

    /// Splits children `start..start+len` of `bead` off into a new bead.
    pub fn expand(&self, bead: Interval, start: usize, len: usize) -> PsiObject {
        let ch = self.children(bead);
        let span = |c: &Child| match *c {
            Child::Leaf(p) => (p, p + 1),
            Child::Bead(j) => j,
        };
        let mut t = self.clone();
        t.edges.insert((span(&ch[start]).0, span(&ch[start + len - 1]).1));
        t
    }

    /// All one-step expansions, with the bead they split.
    pub fn expansions(&self) -> Vec<(Interval, PsiObject)> {
        let mut out = Vec::new();
        for b in self.beads() {
            let k = self.out_degree(b);
            for len in 2..k {
                for start in 0..=k - len {
                    out.push((b, self.expand(b, start, len)));
                }
            }
        }
        out
    }

    pub fn to_tree(&self) -> PlanarTree {
        fn go(t: &PsiObject, c: Child) -> Node {
            match c {
                Child::Leaf(_) => Node::leaf(),
                Child::Bead(b) => Node::bead(t.children(b).into_iter().map(|c| go(t, c)).collect()),
            }
        }
        if self.n < 2 {
            return PlanarTree::from_node(&Node::leaf());
        }
        PlanarTree::from_node(&go(self, Child::Bead(self.root())))
    }

    pub fn from_tree(t: &PlanarTree) -> PsiObject {
        fn span(t: &PlanarTree, v: usize, next: &mut usize, out: &mut BTreeSet<Interval>) {
            let start = *next;
            if t.kind(v) == VertexKind::Leaf {
                *next += 1;
                return;
            }
            for &c in t.children(v) {
                span(t, c, next, out);
            }
            out.insert((start, *next));
        }
        let mut edges = BTreeSet::new();
        let mut next = 0;
        span(t, t.children(0)[0], &mut next, &mut edges);
        edges.remove(&(0, next));
        PsiObject { n: next, edges }
    }

    /// ⟊ composition: substitutes `inner[i]` at leaf `i`. Returns the
    /// composite and the leaf offset of each input.
    pub fn substitute(&self, inner: &[PsiObject]) -> (PsiObject, Vec<usize>) {
        assert_eq!(inner.len(), self.n, "one input per leaf");
        let mut offsets = Vec::with_capacity(inner.len() + 1);
        let mut acc = 0;
        for t in inner {
            offsets.push(acc);
            acc += t.n;
        }
        offsets.push(acc);
        let mut edges = BTreeSet::new();
        for &(a, b) in &self.edges {
            edges.insert((offsets[a], offsets[b]));
        }
        for (i, t) in inner.iter().enumerate() {
            if t.n >= 2 && t.n < acc {
                edges.insert((offsets[i], offsets[i] + t.n));
            }
            for &(a, b) in &t.edges {
                edges.insert((offsets[i] + a, offsets[i] + b));
            }
        }
        offsets.pop();
        (PsiObject { n: acc, edges }, offsets)
    }

    /// Objects of Ψₙ, sorted by dimension and then by tree.
    pub fn all(n: usize) -> Vec<PsiObject> {
        if n == 1 {
            return vec![PsiObject::corolla(1)];
        }
        let mut v: Vec<PsiObject> = assoc_faces(n).iter().map(PsiObject::from_tree).collect();
        v.sort_by_key(|t| (t.dim(), t.to_tree()));
        v
    }
}

impl fmt::Display for PsiObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_tree())
    }
}

/// Ψₙ with its join and meet tables.
#[derive(Clone, Debug)]
pub struct PsiLattice {
    pub objects: Vec<PsiObject>,
    pub join: Vec<Vec<usize>>,
    pub meet: Vec<Vec<Option<usize>>>,
}

impl PsiLattice {
    pub fn index_of(&self, t: &PsiObject) -> Option<usize> {
        self.objects.iter().position(|o| o == t)
    }
}

pub fn psi_lattice(n: usize) -> PsiLattice {
    let objects = PsiObject::all(n);
    let idx: HashMap<&PsiObject, usize> = objects.iter().enumerate().map(|(i, o)| (o, i)).collect();
    let join = objects.iter().map(|a| objects.iter().map(|b| idx[&a.join(b)]).collect()).collect();
    let meet = objects
        .iter()
        .map(|a| objects.iter().map(|b| a.meet(b).map(|m| idx[&m])).collect())
        .collect();
    PsiLattice { objects, join, meet }
}

// ====================================================================
// Bead posets and their order polytopes
// ====================================================================

/// Beads of a face tree in preorder; a bead is below the beads above it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BeadPoset {
    pub beads: Vec<Interval>,
    pub parent: Vec<Option<usize>>,
}

impl BeadPoset {
    pub fn of(t: &PsiObject) -> BeadPoset {
        let beads = t.beads();
        let parent = beads
            .iter()
            .map(|&(a, b)| {
                beads
                    .iter()
                    .enumerate()
                    .filter(|(_, &(c, d))| c <= a && b <= d && (c, d) != (a, b))
                    .min_by_key(|(_, &(c, d))| d - c)
                    .map(|(i, _)| i)
            })
            .collect();
        BeadPoset { beads, parent }
    }

    pub fn len(&self) -> usize {
        self.beads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beads.is_empty()
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.parent[j] == Some(i)).collect()
    }

    /// `i ≤ j`: bead `j` lies above bead `i`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        let mut k = Some(j);
        while let Some(x) = k {
            if x == i {
                return true;
            }
            k = self.parent[x];
        }
        false
    }
}

/// Block of a bead: pinned to time 0, pinned to time 1, or in a free group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Block {
    Zero,
    Mid(usize),
    One,
}

/// Renumbers middle blocks by first appearance.
pub fn canonical_blocks(blocks: &[Block]) -> Vec<Block> {
    let mut seen: Vec<usize> = Vec::new();
    blocks
        .iter()
        .map(|b| match *b {
            Block::Mid(m) => {
                let i = seen.iter().position(|&x| x == m).unwrap_or_else(|| {
                    seen.push(m);
                    seen.len() - 1
                });
                Block::Mid(i)
            }
            other => other,
        })
        .collect()
}

fn mid_count(blocks: &[Block]) -> usize {
    blocks.iter().filter_map(|b| if let Block::Mid(m) = b { Some(*m + 1) } else { None }).max().unwrap_or(0)
}

/// Faces of χ▲(T): the 0-block is a downset, the 1-block an upset, and the
/// middle blocks are the components of the remaining forest after cutting
/// any set of its edges.
pub fn order_polytope_faces(p: &BeadPoset) -> Vec<Vec<Block>> {
    let k = p.len();
    let mut out = Vec::new();
    for code in 0..3usize.pow(k as u32) {
        let mut kind = vec![0u8; k];
        let mut c = code;
        for x in kind.iter_mut() {
            *x = (c % 3) as u8;
            c /= 3;
        }
        // 0: pinned to 0, 1: free, 2: pinned to 1
        let ok = (0..k).all(|j| match p.parent[j] {
            Some(i) => !(kind[j] == 0 && kind[i] != 0) && !(kind[i] == 2 && kind[j] != 2),
            None => true,
        });
        if !ok {
            continue;
        }
        let free_edges: Vec<usize> =
            (0..k).filter(|&j| kind[j] == 1 && p.parent[j].is_some_and(|i| kind[i] == 1)).collect();
        for cut in 0..1usize << free_edges.len() {
            let mut rep: Vec<usize> = (0..k).collect();
            for (e, &j) in free_edges.iter().enumerate() {
                if cut >> e & 1 == 0 {
                    rep[j] = rep[p.parent[j].unwrap()];
                }
            }
            let blocks: Vec<Block> = (0..k)
                .map(|j| match kind[j] {
                    0 => Block::Zero,
                    2 => Block::One,
                    _ => Block::Mid(rep[j]),
                })
                .collect();
            out.push(canonical_blocks(&blocks));
        }
    }
    out.sort();
    out
}

/// Facets of a face of χ▲(T): merge two blocks along a cover relation of
/// the collapsed poset.
pub fn order_polytope_facets(p: &BeadPoset, blocks: &[Block]) -> Vec<Vec<Block>> {
    let mut out = BTreeSet::new();
    let has_zero = blocks.contains(&Block::Zero);
    let relabel = |from: Block, to: Block| -> Vec<Block> {
        canonical_blocks(&blocks.iter().map(|&b| if b == from { to } else { b }).collect::<Vec<_>>())
    };
    for m in 0..mid_count(blocks) {
        let me = Block::Mid(m);
        let members: Vec<usize> = (0..p.len()).filter(|&j| blocks[j] == me).collect();
        let bottom = members.iter().copied().find(|&j| p.parent[j].is_none_or(|i| blocks[i] != me)).unwrap();
        let to_zero = match p.parent[bottom] {
            Some(i) => blocks[i] == Block::Zero,
            None => !has_zero,
        };
        if to_zero {
            out.insert(relabel(me, Block::Zero));
        }
        let above_all_one = members
            .iter()
            .flat_map(|&j| p.children(j))
            .all(|c| blocks[c] == me || blocks[c] == Block::One);
        if above_all_one {
            out.insert(relabel(me, Block::One));
        }
    }
    for j in 0..p.len() {
        if let Some(i) = p.parent[j] {
            if let (Block::Mid(_), Block::Mid(_)) = (blocks[i], blocks[j]) {
                if blocks[i] != blocks[j] {
                    out.insert(relabel(blocks[j], blocks[i]));
                }
            }
        }
    }
    out.into_iter().collect()
}

// ====================================================================
// B̄⟊(n)
// ====================================================================

/// Cell of B̄⟊(n): a face tree with a block for each bead, in preorder.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BBarCell {
    pub tree: PsiObject,
    pub blocks: Vec<Block>,
}

impl BBarCell {
    pub fn new(tree: PsiObject, blocks: &[Block]) -> BBarCell {
        BBarCell { tree, blocks: canonical_blocks(blocks) }
    }

    fn from_map(tree: PsiObject, map: &HashMap<Interval, Block>) -> BBarCell {
        let blocks: Vec<Block> = tree.beads().iter().map(|b| map[b]).collect();
        BBarCell::new(tree, &blocks)
    }

    fn block_map(&self) -> HashMap<Interval, Block> {
        self.tree.beads().into_iter().zip(self.blocks.iter().copied()).collect()
    }

    pub fn arity(&self) -> usize {
        self.tree.n
    }

    pub fn dim(&self) -> usize {
        self.tree.dim() + mid_count(&self.blocks)
    }

    pub fn block_of(&self, bead: Interval) -> Block {
        self.block_map()[&bead]
    }

    pub fn facets(&self) -> Vec<BBarCell> {
        let map = self.block_map();
        let mut out: Vec<BBarCell> = self
            .tree
            .expansions()
            .into_iter()
            .map(|(b, t)| {
                let added = t.edges.difference(&self.tree.edges).next().copied().unwrap();
                let mut m = map.clone();
                m.insert(added, map[&b]);
                BBarCell::from_map(t, &m)
            })
            .collect();
        let p = BeadPoset::of(&self.tree);
        out.extend(order_polytope_facets(&p, &self.blocks).into_iter().map(|bl| BBarCell::new(self.tree.clone(), &bl)));
        out.sort();
        out.dedup();
        out
    }

    /// Bracket notation with `0`, `1` or a letter naming each bead's block.
    pub fn label(&self) -> String {
        if self.tree.n < 2 {
            return "o".to_string();
        }
        let map = self.block_map();
        fn go(c: &BBarCell, map: &HashMap<Interval, Block>, ch: Child, out: &mut String) {
            match ch {
                Child::Leaf(_) => out.push('o'),
                Child::Bead(b) => {
                    out.push_str(&block_name(map[&b]));
                    out.push('(');
                    for (i, x) in c.tree.children(b).into_iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        go(c, map, x, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        go(self, &map, Child::Bead(self.tree.root()), &mut s);
        s
    }

    pub fn to_json(&self) -> String {
        let mut v: serde_json::Value = serde_json::from_str(&self.tree.to_tree().to_json()).expect("tree json");
        v["blocks"] = serde_json::Value::Array(self.blocks.iter().map(|b| block_name(*b).into()).collect());
        v.to_string()
    }

    /// Left action of a face `s` of ⟊(k): graft `xs` onto the leaves of
    /// `s`; the beads of `s` sit at time 0.
    pub fn left_action(s: &PsiObject, xs: &[BBarCell]) -> BBarCell {
        if s.n == 1 {
            return xs[0].clone();
        }
        let trees: Vec<PsiObject> = xs.iter().map(|x| x.tree.clone()).collect();
        let (t, offsets) = s.substitute(&trees);
        let mut map = HashMap::new();
        for &(a, b) in std::iter::once(&s.root()).chain(s.edges.iter()) {
            let hi = if b < s.n { offsets[b] } else { t.n };
            map.insert((offsets[a], hi), Block::Zero);
        }
        shift_blocks(xs, &offsets, &mut map);
        BBarCell::from_map(t, &map)
    }

    /// Right action: graft `ss[i]` onto leaf `i`; the new beads sit at time 1.
    pub fn right_action(&self, ss: &[PsiObject]) -> BBarCell {
        let (t, offsets) = self.tree.substitute(ss);
        let mut map = HashMap::new();
        for (&(a, b), &bl) in self.tree.beads().iter().zip(&self.blocks) {
            let hi = if b < self.tree.n { offsets[b] } else { t.n };
            map.insert((offsets[a], hi), bl);
        }
        for (i, s) in ss.iter().enumerate() {
            for &(a, b) in std::iter::once(&s.root()).chain(s.edges.iter()) {
                if s.n >= 2 {
                    map.insert((offsets[i] + a, offsets[i] + b), Block::One);
                }
            }
        }
        BBarCell::from_map(t, &map)
    }

    /// Label of the image cell in B⟊(n) and its dimension.
    pub fn quotient_key(&self) -> (String, usize) {
        let q = BCell::of(self);
        (q.label, q.dim)
    }
}

fn shift_blocks(xs: &[BBarCell], offsets: &[usize], map: &mut HashMap<Interval, Block>) {
    let mut base = 0;
    for (x, &o) in xs.iter().zip(offsets) {
        for (&(a, b), &bl) in x.tree.beads().iter().zip(&x.blocks) {
            let bl = match bl {
                Block::Mid(m) => Block::Mid(base + m),
                other => other,
            };
            map.insert((o + a, o + b), bl);
        }
        base += mid_count(&x.blocks);
    }
}

fn block_name(b: Block) -> String {
    match b {
        Block::Zero => "0".to_string(),
        Block::One => "1".to_string(),
        Block::Mid(m) if m < 26 => ((b'a' + m as u8) as char).to_string(),
        Block::Mid(m) => format!("m{m}"),
    }
}

impl fmt::Display for BBarCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// All cells of B̄⟊(n).
pub fn b_bar_cells(n: usize) -> Vec<BBarCell> {
    if n == 0 {
        return Vec::new();
    }
    let mut out: Vec<BBarCell> = PsiObject::all(n)
        .into_iter()
        .flat_map(|t| {
            let p = BeadPoset::of(&t);
            order_polytope_faces(&p).into_iter().map(move |bl| BBarCell::new(t.clone(), &bl))
        })
        .collect();
    out.sort_by(|x, y| (x.dim(), x).cmp(&(y.dim(), y)));
    out
}

/// For each bead of `fine`, the bead of `coarse` it contracts into.
pub fn fibre_map(fine: &PsiObject, coarse: &PsiObject) -> Vec<Interval> {
    let cb = coarse.beads();
    fine.beads()
        .iter()
        .map(|&(a, b)| *cb.iter().filter(|&&(c, d)| c <= a && b <= d).min_by_key(|&&(c, d)| d - c).unwrap())
        .collect()
}

/// Cells of λ⟊(lam) × χ▲(chi), for `lam ≤ chi`.
pub fn product_cells(lam: &PsiObject, chi: &PsiObject) -> Vec<BBarCell> {
    let p = BeadPoset::of(chi);
    let faces = order_polytope_faces(&p);
    let mut out = Vec::new();
    for t in PsiObject::all(lam.n).into_iter().filter(|t| t.leq(lam)) {
        let fib = fibre_map(&t, chi);
        for f in &faces {
            let m: HashMap<Interval, Block> = p.beads.iter().copied().zip(f.iter().copied()).collect();
            let blocks: Vec<Block> = fib.iter().map(|b| m[b]).collect();
            out.push(BBarCell::new(t.clone(), &blocks));
        }
    }
    out.sort();
    out
}

/// Labels of the piece B̄⟊(T).
pub fn piece_labels(t: &PsiObject) -> BTreeSet<String> {
    product_cells(t, t).iter().map(BBarCell::label).collect()
}

/// Checks B̄⟊(T₁) ∩ B̄⟊(T₂) = λ⟊(T₁∧T₂) × χ▲(T₁∨T₂) for every pair;
/// returns the first failing pair.
pub fn verify_intersection_identity(lat: &PsiLattice) -> Result<(), (usize, usize)> {
    let pieces: Vec<BTreeSet<String>> = lat.objects.iter().map(piece_labels).collect();
    for i in 0..lat.objects.len() {
        for j in i..lat.objects.len() {
            let lhs: BTreeSet<String> = pieces[i].intersection(&pieces[j]).cloned().collect();
            let rhs: BTreeSet<String> = match lat.meet[i][j] {
                None => BTreeSet::new(),
                Some(m) => product_cells(&lat.objects[m], &lat.objects[lat.join[i][j]])
                    .iter()
                    .map(BBarCell::label)
                    .collect(),
            };
            if lhs != rhs {
                return Err((i, j));
            }
        }
    }
    Ok(())
}

/// Assembles B̄⟊(n) from its pieces, checking that pieces sharing a cell
/// agree on its boundary.
pub fn assemble_b_bar(n: usize, bound: usize) -> Result<CellComplex, BError> {
    if n > bound {
        return Err(BError::BoundExceeded { n, bound });
    }
    let mut b = ComplexBuilder::new();
    if n == 1 {
        b.add("o", 0, 1, Vec::new());
    }
    if n <= 1 {
        return b.build().map_err(|e| BError::Complex(e.to_string()));
    }
    let all = PsiObject::all(n);
    let mut cells: HashMap<BBarCell, Vec<BBarCell>> = HashMap::new();
    for piece in &all {
        let p = BeadPoset::of(piece);
        for t in all.iter().filter(|t| t.leq(piece)) {
            let fib = fibre_map(t, piece);
            let pull = |f: &[Block]| -> BBarCell {
                let m: HashMap<Interval, Block> = p.beads.iter().copied().zip(f.iter().copied()).collect();
                BBarCell::new(t.clone(), &fib.iter().map(|b| m[b]).collect::<Vec<_>>())
            };
            for f in order_polytope_faces(&p) {
                let c = pull(&f);
                let mut faces: Vec<BBarCell> = order_polytope_facets(&p, &f).iter().map(|g| pull(g)).collect();
                let map = c.block_map();
                for (bead, e) in t.expansions() {
                    let added = e.edges.difference(&t.edges).next().copied().unwrap();
                    let mut m = map.clone();
                    m.insert(added, map[&bead]);
                    faces.push(BBarCell::from_map(e, &m));
                }
                faces.sort();
                faces.dedup();
                match cells.get(&c) {
                    Some(prev) if *prev != faces => return Err(BError::Gluing(c.label())),
                    Some(_) => {}
                    None => {
                        cells.insert(c, faces);
                    }
                }
            }
        }
    }
    let mut list: Vec<(BBarCell, Vec<BBarCell>)> = cells.into_iter().collect();
    list.sort_by(|x, y| (x.0.dim(), &x.0).cmp(&(y.0.dim(), &y.0)));
    for (c, faces) in list {
        b.add(c.label(), c.dim(), n, faces.iter().map(|f| (f.label(), 1)).collect());
    }
    b.build().map_err(|e| BError::Complex(e.to_string()))
}

// ====================================================================
// The quotient B⟊(n)
// ====================================================================

/// Cell of B⟊(n), with the data the filtrations and the map to □(n) need.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BCell {
    pub label: String,
    pub dim: usize,
    /// Gap states read off the lowest common bead of consecutive leaves.
    pub gaps: Vec<Gap>,
    /// Out-degrees of the free beads.
    pub bead_outs: Vec<usize>,
    /// Arities of the factors between the 0-vertex and the 1-vertices.
    pub factor_arities: Vec<usize>,
}

impl BCell {
    /// Relabels a cell of B̄⟊(n): the 0-block and each component of the
    /// 1-block become inner vertices `Z` and `O`, and a unit bead `u` is put
    /// on every edge from `Z` to a leaf or to an `O`, and below a root `O`.
    pub fn of(c: &BBarCell) -> BCell {
        let t = &c.tree;
        if t.n < 2 {
            return BCell { label: "o".into(), dim: 0, gaps: Vec::new(), bead_outs: Vec::new(), factor_arities: vec![1] };
        }
        let map = c.block_map();
        let mut label = String::new();
        let mut factors = Vec::new();
        fn mid(t: &PsiObject, map: &HashMap<Interval, Block>, b: Interval, s: &mut String) -> usize {
            s.push_str(&block_name(map[&b]));
            s.push('(');
            let mut arity = 0;
            for (i, ch) in t.children(b).into_iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                arity += match ch {
                    Child::Leaf(_) => {
                        s.push('o');
                        1
                    }
                    Child::Bead(x) if map[&x] == Block::One => {
                        one(x, s);
                        1
                    }
                    Child::Bead(x) => mid(t, map, x, s),
                };
            }
            s.push(')');
            arity
        }
        fn one(b: Interval, s: &mut String) {
            s.push_str("O(");
            s.push_str(&vec!["o"; b.1 - b.0].join(","));
            s.push(')');
        }
        fn frontier(t: &PsiObject, map: &HashMap<Interval, Block>, b: Interval, out: &mut Vec<Child>) {
            for ch in t.children(b) {
                match ch {
                    Child::Bead(x) if map[&x] == Block::Zero => frontier(t, map, x, out),
                    other => out.push(other),
                }
            }
        }
        let root = t.root();
        match map[&root] {
            Block::One => {
                label.push_str("u(");
                one(root, &mut label);
                label.push(')');
                factors.push(1);
            }
            Block::Mid(_) => factors.push(mid(t, &map, root, &mut label)),
            Block::Zero => {
                let mut front = Vec::new();
                frontier(t, &map, root, &mut front);
                label.push_str("Z(");
                for (i, ch) in front.into_iter().enumerate() {
                    if i > 0 {
                        label.push(',');
                    }
                    match ch {
                        Child::Leaf(_) => label.push_str("u(o)"),
                        Child::Bead(x) if map[&x] == Block::One => {
                            label.push_str("u(");
                            one(x, &mut label);
                            label.push(')');
                            factors.push(1);
                            continue;
                        }
                        Child::Bead(x) => {
                            factors.push(mid(t, &map, x, &mut label));
                            continue;
                        }
                    }
                    factors.push(1);
                }
                label.push(')');
            }
        }
        let beads = t.beads();
        let bead_outs: Vec<usize> = beads
            .iter()
            .filter(|b| matches!(map[b], Block::Mid(_)))
            .map(|&b| t.out_degree(b))
            .collect();
        let dim = bead_outs.iter().map(|k| k - 2).sum::<usize>() + mid_count(&c.blocks);
        let gaps = (1..t.n)
            .map(|p| {
                let lca = beads.iter().filter(|&&(a, b)| a < p && p < b).min_by_key(|&&(a, b)| b - a).unwrap();
                match map[lca] {
                    Block::Zero => Gap::One,
                    Block::One => Gap::Zero,
                    Block::Mid(_) => Gap::Free,
                }
            })
            .collect();
        BCell { label, dim, gaps, bead_outs, factor_arities: factors }
    }

    pub fn arity(&self) -> usize {
        self.gaps.len() + 1
    }

    /// The face of □(n) whose interior contains this cell.
    pub fn cube_face(&self) -> CubeFace {
        CubeFace { arity: self.arity(), gaps: self.gaps.clone() }
    }

    /// Generating cells have neither a 0-vertex nor a 1-vertex.
    pub fn is_generator(&self) -> bool {
        self.factor_arities.len() == 1 && self.factor_arities[0] == self.arity()
    }
}

impl fmt::Display for BCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Cells of B⟊(n) indexed by label.
pub fn b_cells(n: usize) -> HashMap<String, BCell> {
    if n == 1 {
        let c = BCell::of(&BBarCell::new(PsiObject::corolla(1), &[]));
        return HashMap::from([(c.label.clone(), c)]);
    }
    b_bar_cells(n).iter().map(|c| BCell::of(c)).map(|c| (c.label.clone(), c)).collect()
}

pub fn quotient_b(n: usize, bound: usize) -> Result<CellComplex, BError> {
    let bar = assemble_b_bar(n, bound)?;
    if n <= 1 {
        return Ok(bar);
    }
    let keys: HashMap<String, (String, usize)> =
        b_bar_cells(n).iter().map(|c| (c.label(), c.quotient_key())).collect();
    Ok(quotient(&bar, |c| keys[&c.label].clone())?)
}

/// Label map B⟊(n) → □(n) naming the carrier of each cell.
pub fn cube_carriers(n: usize) -> HashMap<String, String> {
    b_cells(n).into_iter().map(|(l, c)| (l, c.cube_face().label())).collect()
}

// ====================================================================
// Filtrations
// ====================================================================

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BStage {
    /// B⟊_N: generated by B⟊(1), …, B⟊(N); every factor has arity ≤ N.
    Stage,
    /// B(⟊_N): every free bead has at most N outgoing edges.
    OfStage,
    /// B⟊_{N−1/2} = B⟊_N ∩ B(⟊_{N−1}).
    Half,
}

pub fn in_b_stage(c: &BCell, which: BStage, big_n: usize) -> bool {
    let arity_ok = |m: usize| c.factor_arities.iter().all(|&a| a <= m);
    let outs_ok = |m: usize| c.bead_outs.iter().all(|&k| k <= m);
    match which {
        BStage::Stage => arity_ok(big_n),
        BStage::OfStage => outs_ok(big_n),
        BStage::Half => arity_ok(big_n) && outs_ok(big_n.saturating_sub(1)),
    }
}

pub fn b_stage_complex(which: BStage, big_n: usize, n: usize, bound: usize) -> Result<CellComplex, BError> {
    let full = quotient_b(n, bound)?;
    let cells = b_cells(n);
    full.subcomplex(|c| in_b_stage(&cells[&c.label], which, big_n)).map_err(|e| BError::Complex(e.to_string()))
}

/// The three filtration terms at level `N` in degree `n`.
#[derive(Clone, Debug)]
pub struct BFiltration {
    pub stage: CellComplex,
    pub of_stage: CellComplex,
    pub half: CellComplex,
}

/// Builds B⟊_N, B(⟊_N) and B⟊_{N−1/2} in degree `n` and checks
/// B⟊_{N−1/2} ⊆ B⟊_N ⊆ B(⟊_N).
pub fn b_filtrations(big_n: usize, n: usize, bound: usize) -> Result<BFiltration, BError> {
    let stage = b_stage_complex(BStage::Stage, big_n, n, bound)?;
    let of_stage = b_stage_complex(BStage::OfStage, big_n, n, bound)?;
    let half = b_stage_complex(BStage::Half, big_n, n, bound)?;
    let labels = |c: &CellComplex| -> HashSet<String> { c.cells().iter().map(|x| x.label.clone()).collect() };
    let (s, o, h) = (labels(&stage), labels(&of_stage), labels(&half));
    if let Some(x) = h.difference(&s).next() {
        return Err(BError::Inclusion(x.clone()));
    }
    if let Some(x) = s.difference(&o).next() {
        return Err(BError::Inclusion(x.clone()));
    }
    Ok(BFiltration { stage, of_stage, half })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn children_of_nested_tree() {
        let t = PsiObject { n: 4, edges: [(1, 3)].into_iter().collect() };
        assert_eq!(t.children((0, 4)), vec![Child::Leaf(0), Child::Bead((1, 3)), Child::Leaf(3)]);
        assert_eq!(t.to_tree().to_string(), "B(o,B(o,o),o)");
        assert_eq!(PsiObject::from_tree(&t.to_tree()), t);
    }

    #[test]
    fn quotient_labels_of_extreme_cells() {
        let t = PsiObject::corolla(3);
        assert_eq!(BCell::of(&BBarCell::new(t.clone(), &[Block::Zero])).label, "Z(u(o),u(o),u(o))");
        assert_eq!(BCell::of(&BBarCell::new(t.clone(), &[Block::One])).label, "u(O(o,o,o))");
        assert_eq!(BCell::of(&BBarCell::new(t, &[Block::Mid(0)])).label, "a(o,o,o)");
    }
}
