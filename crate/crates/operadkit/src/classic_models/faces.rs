//! Face keys of the simplex, cube and associahedron and their complexes.

use crate::complexes::{CellComplex, ComplexBuilder, ComplexError};
use crate::tree_core::{compositions, dimension, FamilyTag, Node, PlanarTree, VertexKind};
use serde::Serialize;
use std::fmt;

/// Face of △(n): `left` points at 0, `groups` of coinciding interior
/// points in increasing order, `right` points at 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SimplexFace {
    pub left: usize,
    pub groups: Vec<usize>,
    pub right: usize,
}

impl SimplexFace {
    pub fn top(n: usize) -> SimplexFace {
        SimplexFace { left: 0, groups: vec![1; n], right: 0 }
    }

    pub fn arity(&self) -> usize {
        self.left + self.right + self.groups.iter().sum::<usize>()
    }

    pub fn dim(&self) -> usize {
        self.groups.len()
    }

    pub fn all(n: usize) -> Vec<SimplexFace> {
        let mut out = Vec::new();
        for left in 0..=n {
            for right in 0..=n - left {
                for groups in compositions(n - left - right) {
                    out.push(SimplexFace { left, groups, right });
                }
            }
        }
        out
    }

    pub fn facets(&self) -> Vec<SimplexFace> {
        let g = &self.groups;
        let mut out = Vec::new();
        if let Some(&first) = g.first() {
            out.push(SimplexFace { left: self.left + first, groups: g[1..].to_vec(), right: self.right });
            let last = *g.last().unwrap();
            out.push(SimplexFace { left: self.left, groups: g[..g.len() - 1].to_vec(), right: self.right + last });
        }
        for s in 0..g.len().saturating_sub(1) {
            let mut merged = g.clone();
            let b = merged.remove(s + 1);
            merged[s] += b;
            out.push(SimplexFace { left: self.left, groups: merged, right: self.right });
        }
        out
    }

    pub fn to_tree(&self) -> PlanarTree {
        let bead = Node::bead(self.groups.iter().map(|&g| group_node(g)).collect());
        if self.left + self.right == 0 {
            return PlanarTree::from_node(&bead);
        }
        let mut ch = Node::leaves(self.left);
        ch.push(bead);
        ch.extend(Node::leaves(self.right));
        PlanarTree::from_node(&Node::inner(ch))
    }

    /// Inverse of [`to_tree`](Self::to_tree) on valid simplex-face trees.
    pub fn from_tree(t: &PlanarTree) -> Option<SimplexFace> {
        let top = t.top();
        let (left, bead, right) = match top.kind {
            VertexKind::Bead => (0, &top, 0),
            VertexKind::Inner => {
                let pos = top.children.iter().position(|c| c.kind == VertexKind::Bead)?;
                if top.children.iter().any(|c| c.kind != VertexKind::Leaf && c.kind != VertexKind::Bead) {
                    return None;
                }
                (pos, &top.children[pos], top.children.len() - 1 - pos)
            }
            _ => return None,
        };
        let groups = bead.children.iter().map(group_size).collect::<Option<Vec<_>>>()?;
        Some(SimplexFace { left, groups, right })
    }

    /// Cell of the image of this face's interior when point `i` (1-based) is forgotten.
    pub fn forget(&self, i: usize) -> SimplexFace {
        let mut f = self.clone();
        if i <= f.left {
            f.left -= 1;
            return f;
        }
        let mut pos = f.left;
        for s in 0..f.groups.len() {
            pos += f.groups[s];
            if i <= pos {
                f.groups[s] -= 1;
                if f.groups[s] == 0 {
                    f.groups.remove(s);
                }
                return f;
            }
        }
        f.right -= 1;
        f
    }
}

/// State of the gap between consecutive points of a cube face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Gap {
    Zero,
    Free,
    One,
}

/// Face of □(n) = [0,1]^{n−1}; `None` is the unit cell **1** of □(0).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CubeFace {
    pub arity: usize,
    pub gaps: Vec<Gap>,
}

impl CubeFace {
    pub fn unit() -> CubeFace {
        CubeFace { arity: 0, gaps: Vec::new() }
    }

    pub fn top(n: usize) -> CubeFace {
        CubeFace { arity: n, gaps: vec![Gap::Free; n.saturating_sub(1)] }
    }

    pub fn is_unit(&self) -> bool {
        self.arity == 0
    }

    pub fn dim(&self) -> usize {
        self.gaps.iter().filter(|g| **g == Gap::Free).count()
    }

    pub fn all(n: usize) -> Vec<CubeFace> {
        if n == 0 {
            return Vec::new();
        }
        let mut out = vec![CubeFace { arity: n, gaps: Vec::new() }];
        for _ in 1..n {
            out = out
                .into_iter()
                .flat_map(|f| {
                    [Gap::Zero, Gap::Free, Gap::One].into_iter().map(move |g| {
                        let mut h = f.clone();
                        h.gaps.push(g);
                        h
                    })
                })
                .collect();
        }
        out
    }

    pub fn facets(&self) -> Vec<CubeFace> {
        let mut out = Vec::new();
        for (j, g) in self.gaps.iter().enumerate() {
            if *g == Gap::Free {
                for v in [Gap::Zero, Gap::One] {
                    let mut h = self.clone();
                    h.gaps[j] = v;
                    out.push(h);
                }
            }
        }
        out
    }

    /// Beads in clockwise order, each a list of inner-child sizes.
    pub fn beads(&self) -> Vec<Vec<usize>> {
        let mut beads = vec![vec![1]];
        for g in &self.gaps {
            match g {
                Gap::Zero => *beads.last_mut().unwrap().last_mut().unwrap() += 1,
                Gap::Free => beads.last_mut().unwrap().push(1),
                Gap::One => beads.push(vec![1]),
            }
        }
        beads
    }

    pub fn to_tree(&self) -> Option<PlanarTree> {
        if self.is_unit() {
            return None;
        }
        let beads: Vec<Node> =
            self.beads().iter().map(|gs| Node::bead(gs.iter().map(|&g| group_node(g)).collect())).collect();
        Some(if beads.len() == 1 {
            PlanarTree::from_node(&beads[0])
        } else {
            PlanarTree::from_node(&Node::inner(beads))
        })
    }

    pub fn from_tree(t: &PlanarTree) -> Option<CubeFace> {
        let top = t.top();
        let beads: Vec<&Node> = match top.kind {
            VertexKind::Bead => vec![&top],
            VertexKind::Inner => top.children.iter().collect(),
            _ => return None,
        };
        let mut gaps = Vec::new();
        for (b, bead) in beads.iter().enumerate() {
            if bead.kind != VertexKind::Bead {
                return None;
            }
            if b > 0 {
                gaps.push(Gap::One);
            }
            for (c, child) in bead.children.iter().enumerate() {
                if c > 0 {
                    gaps.push(Gap::Free);
                }
                let size = group_size(child)?;
                gaps.extend(std::iter::repeat(Gap::Zero).take(size - 1));
            }
        }
        Some(CubeFace { arity: gaps.len() + 1, gaps })
    }

    pub fn label(&self) -> String {
        match self.to_tree() {
            None => "1".to_string(),
            Some(t) => t.to_string(),
        }
    }

    /// Maximal out-degree of a bead.
    pub fn max_bead_out(&self) -> usize {
        self.beads().iter().map(Vec::len).max().unwrap_or(0)
    }
}

impl fmt::Display for CubeFace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl fmt::Display for SimplexFace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_tree())
    }
}

fn group_node(size: usize) -> Node {
    if size == 1 {
        Node::leaf()
    } else {
        Node::inner(Node::leaves(size))
    }
}

fn group_size(n: &Node) -> Option<usize> {
    match n.kind {
        VertexKind::Leaf => Some(1),
        VertexKind::Inner if n.children.len() >= 2 && n.children.iter().all(|c| c.kind == VertexKind::Leaf) => {
            Some(n.children.len())
        }
        _ => None,
    }
}

/// Facets of an associahedron face: split one bead along a contiguous
/// interval of its children.
pub fn assoc_facets(t: &PlanarTree) -> Vec<PlanarTree> {
    let mut out = Vec::new();
    for b in t.beads() {
        let k = t.out_degree(b);
        for len in 2..k {
            for start in 0..=k - len {
                out.push(split_bead(t, b, start, len));
            }
        }
    }
    out
}

/// Replaces children `start..start+len` of bead `b` by one new bead above them.
pub fn split_bead(t: &PlanarTree, b: usize, start: usize, len: usize) -> PlanarTree {
    fn go(t: &PlanarTree, v: usize, b: usize, start: usize, len: usize) -> Node {
        let ch: Vec<Node> = t.children(v).iter().map(|&c| go(t, c, b, start, len)).collect();
        if v != b {
            return Node { kind: t.kind(v), children: ch };
        }
        let mut out: Vec<Node> = ch[..start].to_vec();
        out.push(Node::bead(ch[start..start + len].to_vec()));
        out.extend_from_slice(&ch[start + len..]);
        Node::bead(out)
    }
    PlanarTree::from_node(&go(t, t.children(0)[0], b, start, len))
}

pub fn assoc_faces(n: usize) -> Vec<PlanarTree> {
    crate::tree_core::enumerate_trees(crate::tree_core::CellFamily::associahedron(n), None, usize::MAX)
        .expect("unbounded enumeration")
}

pub fn simplex_complex(n: usize) -> Result<CellComplex, ComplexError> {
    let mut b = ComplexBuilder::new();
    let mut faces = SimplexFace::all(n);
    faces.sort_by_key(|f| (f.dim(), f.clone()));
    for f in faces {
        let facets = f.facets().iter().map(|g| (g.to_string(), 1)).collect();
        b.add(f.to_string(), f.dim(), n, facets);
    }
    b.build()
}

pub fn cube_complex(n: usize, with_unit: bool) -> Result<CellComplex, ComplexError> {
    let mut b = ComplexBuilder::new();
    if n == 0 {
        if with_unit {
            b.add(CubeFace::unit().label(), 0, 0, Vec::new());
        }
        return b.build();
    }
    let mut faces = CubeFace::all(n);
    faces.sort_by_key(|f| (f.dim(), f.clone()));
    for f in faces {
        let facets = f.facets().iter().map(|g| (g.label(), 1)).collect();
        b.add(f.label(), f.dim(), n, facets);
    }
    b.build()
}

pub fn assoc_complex(n: usize) -> Result<CellComplex, ComplexError> {
    let mut b = ComplexBuilder::new();
    for t in assoc_faces(n) {
        let facets = assoc_facets(&t).iter().map(|g| (g.to_string(), 1)).collect();
        b.add(t.to_string(), dimension(&t, FamilyTag::AssociahedronFace), n, facets);
    }
    b.build()
}
