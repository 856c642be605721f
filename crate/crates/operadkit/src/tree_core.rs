//! Planar rooted trees with typed vertices, the grammars of the three face
//! families, grafting, edge contraction and exhaustive enumeration.
//!
//! A [`PlanarTree`] is stored in canonical form: vertices are numbered in
//! depth-first, left-to-right preorder starting from the root, so structural
//! equality of two values is equality of the trees they encode. Leaves are
//! numbered `1..=n` in the same order and are never labeled explicitly.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Root,
    Leaf,
    Bead,
    Inner,
}

/// Nested description of the subtree hanging off a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Node {
    pub kind: VertexKind,
    pub children: Vec<Node>,
}

impl Node {
    pub fn leaf() -> Node {
        Node { kind: VertexKind::Leaf, children: Vec::new() }
    }

    pub fn bead(children: Vec<Node>) -> Node {
        Node { kind: VertexKind::Bead, children }
    }

    pub fn inner(children: Vec<Node>) -> Node {
        Node { kind: VertexKind::Inner, children }
    }

    pub fn leaves(k: usize) -> Vec<Node> {
        vec![Node::leaf(); k]
    }

    pub fn leaf_count(&self) -> usize {
        match self.kind {
            VertexKind::Leaf => 1,
            _ => self.children.iter().map(Node::leaf_count).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error("leaf {slot} out of range for a tree with {leaves} leaves")]
    SlotOutOfRange { slot: usize, leaves: usize },
    #[error("vertex {0} does not exist")]
    NoSuchVertex(usize),
    #[error("edge above vertex {0} is a leaf or root edge")]
    NotInternal(usize),
    #[error("bead-bead contraction is not a face relation of {0:?}")]
    BeadBeadForbidden(FamilyTag),
    #[error("arity {arity} exceeds the configured bound {bound}")]
    BoundExceeded { arity: usize, bound: usize },
    #[error("invalid json tree: {0}")]
    Json(String),
}

/// Ordered rooted tree; vertex 0 is the root and numbering is preorder.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanarTree {
    kinds: Vec<VertexKind>,
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
}

impl PlanarTree {
    /// Builds a tree from arbitrary vertex arrays, checking the structure
    /// and renumbering into canonical preorder.
    pub fn from_parts(
        kinds: &[VertexKind],
        children: &[Vec<usize>],
        root: usize,
    ) -> Result<PlanarTree, TreeError> {
        let n = kinds.len();
        if children.len() != n {
            return Err(TreeError::Malformed("children table length mismatch".into()));
        }
        if root >= n || kinds[root] != VertexKind::Root {
            return Err(TreeError::Malformed("root index does not name a root vertex".into()));
        }
        let roots = kinds.iter().filter(|k| **k == VertexKind::Root).count();
        if roots != 1 {
            return Err(TreeError::Malformed(format!("{roots} root vertices")));
        }
        let mut seen_parent = vec![false; n];
        for (v, ch) in children.iter().enumerate() {
            for &c in ch {
                if c >= n {
                    return Err(TreeError::Malformed(format!("child index {c} out of range")));
                }
                if seen_parent[c] || c == root {
                    return Err(TreeError::Malformed(format!("vertex {c} has two parents or is a cycle")));
                }
                seen_parent[c] = true;
                if kinds[v] == VertexKind::Leaf {
                    return Err(TreeError::Malformed(format!("leaf {v} has children")));
                }
            }
        }
        if children[root].len() != 1 {
            return Err(TreeError::Malformed("root must have valence 1".into()));
        }
        fn build(
            v: usize,
            kinds: &[VertexKind],
            children: &[Vec<usize>],
            depth: usize,
        ) -> Result<Node, TreeError> {
            if depth > kinds.len() {
                return Err(TreeError::Malformed("cycle detected".into()));
            }
            let ch = children[v]
                .iter()
                .map(|&c| build(c, kinds, children, depth + 1))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Node { kind: kinds[v], children: ch })
        }
        let top = build(children[root][0], kinds, children, 0)?;
        if top.kind == VertexKind::Root {
            return Err(TreeError::Malformed("nested root".into()));
        }
        let tree = PlanarTree::from_node(&top);
        if tree.vertex_count() != n {
            return Err(TreeError::Malformed("unreachable vertices".into()));
        }
        Ok(tree)
    }

    /// The tree whose root edge leads to `top`.
    pub fn from_node(top: &Node) -> PlanarTree {
        let mut t = PlanarTree { kinds: vec![VertexKind::Root], children: vec![Vec::new()], parent: vec![None] };
        fn push(t: &mut PlanarTree, node: &Node, parent: usize) {
            let id = t.kinds.len();
            t.kinds.push(node.kind);
            t.children.push(Vec::new());
            t.parent.push(Some(parent));
            t.children[parent].push(id);
            for c in &node.children {
                push(t, c, id);
            }
        }
        push(&mut t, top, 0);
        t
    }

    /// The subtree above the root edge.
    pub fn top(&self) -> Node {
        self.node_at(self.children[0][0])
    }

    pub fn node_at(&self, v: usize) -> Node {
        Node {
            kind: self.kinds[v],
            children: self.children[v].iter().map(|&c| self.node_at(c)).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        self.kinds[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.children[v].len()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    pub fn vertices_of(&self, kind: VertexKind) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.kinds[v] == kind).collect()
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.vertices_of(VertexKind::Leaf)
    }

    pub fn beads(&self) -> Vec<usize> {
        self.vertices_of(VertexKind::Bead)
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }

    pub fn is_identity(&self) -> bool {
        self.vertex_count() == 2 && self.kinds[1] == VertexKind::Leaf
    }

    /// Internal edges, each named by the vertex at its upper end.
    pub fn internal_edges(&self) -> Vec<usize> {
        (1..self.vertex_count())
            .filter(|&v| self.kinds[v] != VertexKind::Leaf && self.parent[v] != Some(0))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.top()).expect("tree serialization")
    }

    pub fn from_json(s: &str) -> Result<PlanarTree, TreeError> {
        let node: Node = serde_json::from_str(s).map_err(|e| TreeError::Json(e.to_string()))?;
        fn check(n: &Node) -> Result<(), TreeError> {
            match n.kind {
                VertexKind::Root => Err(TreeError::Json("root kind is implicit".into())),
                VertexKind::Leaf if !n.children.is_empty() => {
                    Err(TreeError::Json("leaf with children".into()))
                }
                _ => n.children.iter().try_for_each(check),
            }
        }
        check(&node)?;
        Ok(PlanarTree::from_node(&node))
    }
}

impl fmt::Debug for PlanarTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Compact bracket notation: `o` leaf, `B(..)` bead, `I(..)` inner vertex.
impl fmt::Display for PlanarTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(n: &Node, out: &mut String) {
            match n.kind {
                VertexKind::Leaf => out.push('o'),
                k => {
                    out.push(if k == VertexKind::Bead { 'B' } else { 'I' });
                    out.push('(');
                    for (i, c) in n.children.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        go(c, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        go(&self.top(), &mut s);
        f.write_str(&s)
    }
}

// ====================================================================
// Corollas and grafting
// ====================================================================

/// The unique element `a_k` of the associative operad in arity `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Corolla {
    pub arity: usize,
}

impl Corolla {
    pub fn new(arity: usize) -> Corolla {
        Corolla { arity }
    }

    /// `a_1` is the identity tree; otherwise one inner vertex with `k` leaves.
    pub fn tree(&self) -> PlanarTree {
        if self.arity == 1 {
            PlanarTree::from_node(&Node::leaf())
        } else {
            PlanarTree::from_node(&Node::inner(Node::leaves(self.arity)))
        }
    }

    /// The corolla with a bead at its vertex, the top cell of the model.
    pub fn bead_tree(&self) -> PlanarTree {
        PlanarTree::from_node(&Node::bead(Node::leaves(self.arity)))
    }
}

/// Contracts every edge joining two inner vertices.
pub fn normalize(tree: &PlanarTree) -> PlanarTree {
    fn go(n: &Node) -> Node {
        let mut children = Vec::new();
        for c in &n.children {
            let c = go(c);
            if n.kind == VertexKind::Inner && c.kind == VertexKind::Inner {
                children.extend(c.children);
            } else {
                children.push(c);
            }
        }
        Node { kind: n.kind, children }
    }
    PlanarTree::from_node(&go(&tree.top()))
}

/// `host ∘_slot guest`: the root edge of `guest` is glued to leaf `slot`
/// (1-based) of `host`, then inner–inner edges are contracted.
pub fn graft(host: &PlanarTree, slot: usize, guest: &PlanarTree) -> Result<PlanarTree, TreeError> {
    let leaves = host.leaf_count();
    if slot == 0 || slot > leaves {
        return Err(TreeError::SlotOutOfRange { slot, leaves });
    }
    fn go(n: &Node, counter: &mut usize, slot: usize, guest: &Node) -> Node {
        if n.kind == VertexKind::Leaf {
            *counter += 1;
            return if *counter == slot { guest.clone() } else { n.clone() };
        }
        Node {
            kind: n.kind,
            children: n.children.iter().map(|c| go(c, counter, slot, guest)).collect(),
        }
    }
    let mut counter = 0;
    let top = go(&host.top(), &mut counter, slot, &guest.top());
    Ok(normalize(&PlanarTree::from_node(&top)))
}

// ====================================================================
// Families and validation
// ====================================================================

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyTag {
    SimplexFace,
    CubeFace,
    AssociahedronFace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CellFamily {
    pub tag: FamilyTag,
    pub arity: usize,
}

impl CellFamily {
    pub fn simplex(n: usize) -> CellFamily {
        CellFamily { tag: FamilyTag::SimplexFace, arity: n }
    }
    pub fn cube(n: usize) -> CellFamily {
        CellFamily { tag: FamilyTag::CubeFace, arity: n }
    }
    pub fn associahedron(n: usize) -> CellFamily {
        CellFamily { tag: FamilyTag::AssociahedronFace, arity: n }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    Arity,
    BeadCount,
    BeadValence,
    InnerValence,
    InnerInnerEdge,
    PathBeads,
    NonBeadVertex,
}

impl Rule {
    pub fn describe(&self) -> &'static str {
        match self {
            Rule::Arity => "leaf count differs from the family arity",
            Rule::BeadCount => "wrong number of beads",
            Rule::BeadValence => "bead valence too small",
            Rule::InnerValence => "inner vertex valence below 3",
            Rule::InnerInnerEdge => "inner–inner edge",
            Rule::PathBeads => "root-to-leaf path meets a number of beads other than one",
            Rule::NonBeadVertex => "internal vertex is not a bead",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    /// Offending vertex; for edge rules the upper endpoint, for path rules the leaf.
    pub vertex: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

pub fn validate(tree: &PlanarTree, family: CellFamily) -> ValidationReport {
    use VertexKind::*;
    let mut out = Vec::new();
    let mut push = |rule, vertex| out.push(Violation { rule, vertex });
    if tree.leaf_count() != family.arity {
        push(Rule::Arity, 0);
    }
    let beads = tree.beads();
    for v in 1..tree.vertex_count() {
        let k = tree.kind(v);
        let parent_kind = tree.kind(tree.parent(v).unwrap());
        match family.tag {
            FamilyTag::AssociahedronFace => {
                if k == Inner {
                    push(Rule::NonBeadVertex, v);
                } else if k == Bead && tree.valence(v) < 3 {
                    push(Rule::BeadValence, v);
                }
            }
            FamilyTag::SimplexFace | FamilyTag::CubeFace => {
                if k == Inner && tree.valence(v) < 3 {
                    push(Rule::InnerValence, v);
                }
                if k == Inner && parent_kind == Inner {
                    push(Rule::InnerInnerEdge, v);
                }
                if family.tag == FamilyTag::CubeFace && k == Bead && tree.valence(v) < 2 {
                    push(Rule::BeadValence, v);
                }
            }
        }
    }
    match family.tag {
        FamilyTag::SimplexFace if beads.len() != 1 => push(Rule::BeadCount, 0),
        FamilyTag::CubeFace => {
            if beads.is_empty() {
                push(Rule::BeadCount, 0);
            }
            for leaf in tree.leaves() {
                let mut count = 0;
                let mut v = leaf;
                while let Some(p) = tree.parent(v) {
                    if tree.kind(p) == Bead {
                        count += 1;
                    }
                    v = p;
                }
                if count != 1 {
                    push(Rule::PathBeads, leaf);
                }
            }
        }
        _ => {}
    }
    ValidationReport { violations: out }
}

/// Dimension of the face encoded by `tree` in its family.
pub fn dimension(tree: &PlanarTree, tag: FamilyTag) -> usize {
    let beads = tree.beads();
    match tag {
        FamilyTag::SimplexFace => beads.iter().map(|&b| tree.out_degree(b)).sum(),
        FamilyTag::CubeFace => beads.iter().map(|&b| tree.out_degree(b).saturating_sub(1)).sum(),
        FamilyTag::AssociahedronFace => {
            beads.iter().map(|&b| tree.out_degree(b).saturating_sub(2)).sum()
        }
    }
}

// ====================================================================
// Edge contraction
// ====================================================================

/// Contracts the internal edge above `v`.
///
/// Inner–inner merges stay inner, a bead absorbs an adjacent inner vertex,
/// and bead–bead merges are allowed only for associahedron faces. For cube
/// faces an inner vertex below beads is contracted together with all of its
/// bead children into one bead (the splitting-contraction move).
pub fn contract_edge(tree: &PlanarTree, v: usize, tag: FamilyTag) -> Result<PlanarTree, TreeError> {
    use VertexKind::*;
    if v == 0 || v >= tree.vertex_count() {
        return Err(TreeError::NoSuchVertex(v));
    }
    let p = tree.parent(v).unwrap();
    if tree.kind(v) == Leaf || p == 0 {
        return Err(TreeError::NotInternal(v));
    }
    let (pk, ck) = (tree.kind(p), tree.kind(v));
    let merged_kind = match (pk, ck) {
        (Inner, Inner) => Inner,
        (Bead, Bead) if tag != FamilyTag::AssociahedronFace => {
            return Err(TreeError::BeadBeadForbidden(tag))
        }
        _ => Bead,
    };
    let cube_split = tag == FamilyTag::CubeFace && pk == Inner && ck == Bead;
    fn go(t: &PlanarTree, u: usize, p: usize, v: usize, kind: VertexKind, cube_split: bool) -> Node {
        if u == p {
            let mut children = Vec::new();
            for &c in t.children(u) {
                let absorb = c == v || (cube_split && t.kind(c) == VertexKind::Bead);
                if absorb {
                    for &g in t.children(c) {
                        children.push(go(t, g, p, v, kind, cube_split));
                    }
                } else {
                    children.push(go(t, c, p, v, kind, cube_split));
                }
            }
            return Node { kind, children };
        }
        Node {
            kind: t.kind(u),
            children: t.children(u).iter().map(|&c| go(t, c, p, v, kind, cube_split)).collect(),
        }
    }
    let top = go(tree, tree.children(0)[0], p, v, merged_kind, cube_split);
    Ok(PlanarTree::from_node(&top))
}

// ====================================================================
// Enumeration
// ====================================================================

pub const DEFAULT_ENUMERATION_BOUND: usize = 8;

/// Every tree of `family`, one per face, sorted by dimension and then by the
/// derived order on [`Node`] (kind order leaf < bead < inner, children
/// compared lexicographically).
pub fn enumerate_trees(
    family: CellFamily,
    dim: Option<usize>,
    bound: usize,
) -> Result<Vec<PlanarTree>, TreeError> {
    let n = family.arity;
    if n > bound {
        return Err(TreeError::BoundExceeded { arity: n, bound });
    }
    let nodes = match family.tag {
        FamilyTag::SimplexFace => simplex_nodes(n),
        FamilyTag::CubeFace => cube_nodes(n),
        FamilyTag::AssociahedronFace => {
            let mut memo = HashMap::new();
            if n == 0 {
                Vec::new()
            } else {
                assoc_nodes(n, &mut memo)
            }
        }
    };
    let mut trees: Vec<(usize, Node, PlanarTree)> = nodes
        .into_iter()
        .map(|nd| {
            let t = PlanarTree::from_node(&nd);
            (dimension(&t, family.tag), nd, t)
        })
        .filter(|(d, _, _)| dim.map_or(true, |want| *d == want))
        .collect();
    trees.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(trees.into_iter().map(|x| x.2).collect())
}

/// Compositions of `n` into positive parts.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn group_node(size: usize) -> Node {
    if size == 1 {
        Node::leaf()
    } else {
        Node::inner(Node::leaves(size))
    }
}

fn simplex_nodes(n: usize) -> Vec<Node> {
    let mut out = Vec::new();
    for left in 0..=n {
        for right in 0..=(n - left) {
            for groups in compositions(n - left - right) {
                let bead = Node::bead(groups.iter().map(|&g| group_node(g)).collect());
                if left + right == 0 {
                    out.push(bead);
                } else {
                    let mut ch = Node::leaves(left);
                    ch.push(bead);
                    ch.extend(Node::leaves(right));
                    out.push(Node::inner(ch));
                }
            }
        }
    }
    out
}

fn cube_nodes(n: usize) -> Vec<Node> {
    if n == 0 {
        return Vec::new();
    }
    // 0: same inner child, 1: free gap within a bead, 2: different beads
    let total = 3usize.pow((n - 1) as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut gaps = Vec::with_capacity(n - 1);
        let mut c = code;
        for _ in 0..n - 1 {
            gaps.push(c % 3);
            c /= 3;
        }
        let mut beads: Vec<Vec<usize>> = vec![vec![1]];
        for &g in &gaps {
            match g {
                0 => *beads.last_mut().unwrap().last_mut().unwrap() += 1,
                1 => beads.last_mut().unwrap().push(1),
                _ => beads.push(vec![1]),
            }
        }
        let bead_nodes: Vec<Node> = beads
            .iter()
            .map(|groups| Node::bead(groups.iter().map(|&g| group_node(g)).collect()))
            .collect();
        if bead_nodes.len() == 1 {
            out.push(bead_nodes.into_iter().next().unwrap());
        } else {
            out.push(Node::inner(bead_nodes));
        }
    }
    out
}

/// All ways of picking one element from each list, in lexicographic order.
pub fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for x in list {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Subtrees with `n >= 1` leaves whose internal vertices are beads with at
/// least two children.
pub fn assoc_nodes(n: usize, memo: &mut HashMap<usize, Vec<Node>>) -> Vec<Node> {
    if n == 1 {
        return vec![Node::leaf()];
    }
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let mut out = Vec::new();
    for parts in compositions(n) {
        if parts.len() < 2 {
            continue;
        }
        let options: Vec<Vec<Node>> = parts.iter().map(|&p| assoc_nodes(p, memo)).collect();
        for pick in cartesian(&options) {
            out.push(Node::bead(pick));
        }
    }
    memo.insert(n, out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_parts_rejects_two_roots() {
        use VertexKind::*;
        let err = PlanarTree::from_parts(&[Root, Root, Leaf], &[vec![2], vec![], vec![]], 0);
        assert!(matches!(err, Err(TreeError::Malformed(_))));
    }

    #[test]
    fn from_parts_renumbers() {
        use VertexKind::*;
        let t = PlanarTree::from_parts(&[Leaf, Bead, Root, Leaf], &[vec![], vec![3, 0], vec![1], vec![]], 2)
            .unwrap();
        assert_eq!(t, Corolla::new(2).bead_tree());
    }

    #[test]
    fn display_is_compact() {
        let t = PlanarTree::from_node(&Node::inner(vec![Node::leaf(), Node::bead(vec![Node::leaf()])]));
        assert_eq!(t.to_string(), "I(o,B(o))");
    }
}
