//! Planar metric trees: the operad ⟊̃.

use super::TildeError;
use crate::classic_models::axioms::NonSigmaOperad;
use crate::classic_models::points::{check_slot, ActionError};
use crate::rational::{fmt_q, in_unit, one, parse_q, random_unit, zero, Q};
use crate::tree_core::{PlanarTree, VertexKind};
use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MEdge {
    Leaf,
    Vertex(MVertex),
}

/// Inner vertex together with the length of the edge below it; the top
/// vertex sits on the root edge, whose length is ignored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MVertex {
    pub len: Q,
    pub children: Vec<MEdge>,
}

impl MVertex {
    pub fn new(len: Q, children: Vec<MEdge>) -> MVertex {
        MVertex { len, children }
    }

    fn leaves(&self) -> usize {
        self.children.iter().map(MEdge::leaves).sum()
    }

    fn univalent(&self) -> usize {
        usize::from(self.children.is_empty())
            + self.children.iter().map(|c| if let MEdge::Vertex(v) = c { v.univalent() } else { 0 }).sum::<usize>()
    }
}

impl MEdge {
    fn leaves(&self) -> usize {
        match self {
            MEdge::Leaf => 1,
            MEdge::Vertex(v) => v.leaves(),
        }
    }
}

/// A planar metric tree; `None` is the identity (a single leaf).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MetricTree {
    pub top: Option<MVertex>,
}

impl MetricTree {
    pub fn identity() -> MetricTree {
        MetricTree { top: None }
    }

    /// The tree with one univalent vertex and no leaves.
    pub fn cork() -> MetricTree {
        MetricTree { top: Some(MVertex::new(zero(), Vec::new())) }
    }

    pub fn corolla(n: usize) -> MetricTree {
        if n == 1 {
            return MetricTree::identity();
        }
        MetricTree { top: Some(MVertex::new(zero(), vec![MEdge::Leaf; n])) }
    }

    /// Raw tree; call [`normalize`](Self::normalize) to reach normal form.
    pub fn raw(top: MVertex) -> MetricTree {
        MetricTree { top: Some(top) }
    }

    pub fn is_identity(&self) -> bool {
        self.top.is_none()
    }

    pub fn arity(&self) -> usize {
        self.top.as_ref().map_or(1, MVertex::leaves)
    }

    pub fn univalent_count(&self) -> usize {
        self.top.as_ref().map_or(0, MVertex::univalent)
    }

    /// Lengths of internal edges in preorder.
    pub fn lengths(&self) -> Vec<Q> {
        fn go(v: &MVertex, out: &mut Vec<Q>) {
            for c in &v.children {
                if let MEdge::Vertex(w) = c {
                    out.push(w.len.clone());
                    go(w, out);
                }
            }
        }
        let mut out = Vec::new();
        if let Some(t) = &self.top {
            go(t, &mut out);
        }
        out
    }

    pub fn validate(&self) -> Result<(), TildeError> {
        match self.lengths().into_iter().find(|l| !in_unit(l)) {
            Some(l) => Err(TildeError::Domain(format!("edge length {} outside [0,1]", fmt_q(&l)))),
            None => Ok(()),
        }
    }

    /// Contracts length-0 edges and removes valence-2 vertices, giving the
    /// merged edge the larger of the two lengths.
    pub fn normalize(&self) -> MetricTree {
        fn go(v: &MVertex, top: bool) -> Vec<MEdge> {
            let mut children = Vec::new();
            for c in &v.children {
                match c {
                    MEdge::Leaf => children.push(MEdge::Leaf),
                    MEdge::Vertex(w) => children.extend(go(w, false)),
                }
            }
            if top {
                return children;
            }
            if v.len.is_zero() {
                return children;
            }
            if children.len() == 1 {
                return vec![match children.pop().unwrap() {
                    MEdge::Leaf => MEdge::Leaf,
                    MEdge::Vertex(mut w) => {
                        if v.len > w.len {
                            w.len = v.len.clone();
                        }
                        MEdge::Vertex(w)
                    }
                }];
            }
            vec![MEdge::Vertex(MVertex::new(v.len.clone(), children))]
        }
        let Some(t) = &self.top else { return MetricTree::identity() };
        let mut children = go(t, true);
        if children.len() == 1 {
            return match children.pop().unwrap() {
                MEdge::Leaf => MetricTree::identity(),
                MEdge::Vertex(mut w) => {
                    w.len = zero();
                    MetricTree::raw(w)
                }
            };
        }
        MetricTree::raw(MVertex::new(zero(), children))
    }

    /// All trees reachable by one contraction or one valence-2 removal.
    pub fn local_moves(&self) -> Vec<MetricTree> {
        fn edge_moves(v: &MVertex) -> Vec<Vec<MEdge>> {
            let mut out = Vec::new();
            if v.len.is_zero() {
                out.push(v.children.clone());
            }
            if v.children.len() == 1 {
                out.push(vec![match &v.children[0] {
                    MEdge::Leaf => MEdge::Leaf,
                    MEdge::Vertex(w) => {
                        let mut w = w.clone();
                        if v.len > w.len {
                            w.len = v.len.clone();
                        }
                        MEdge::Vertex(w)
                    }
                }]);
            }
            for w in inner_moves(v) {
                out.push(vec![MEdge::Vertex(w)]);
            }
            out
        }
        fn inner_moves(v: &MVertex) -> Vec<MVertex> {
            let mut out = Vec::new();
            for (j, c) in v.children.iter().enumerate() {
                if let MEdge::Vertex(w) = c {
                    for r in edge_moves(w) {
                        let mut children = v.children[..j].to_vec();
                        children.extend(r);
                        children.extend_from_slice(&v.children[j + 1..]);
                        out.push(MVertex::new(v.len.clone(), children));
                    }
                }
            }
            out
        }
        let Some(t) = &self.top else { return Vec::new() };
        let mut out = Vec::new();
        if t.children.len() == 1 {
            out.push(match &t.children[0] {
                MEdge::Leaf => MetricTree::identity(),
                MEdge::Vertex(w) => MetricTree::raw(MVertex::new(zero(), w.children.clone())),
            });
        }
        out.extend(inner_moves(t).into_iter().map(MetricTree::raw));
        out
    }

    /// Replaces leaf `i` (1-based) by `e`.
    fn graft(&self, i: usize, e: MEdge) -> MetricTree {
        fn go(v: &mut MVertex, i: &mut usize, e: &mut Option<MEdge>) {
            for c in v.children.iter_mut() {
                if e.is_none() {
                    return;
                }
                match c {
                    MEdge::Leaf => {
                        *i -= 1;
                        if *i == 0 {
                            *c = e.take().unwrap();
                        }
                    }
                    MEdge::Vertex(w) => go(w, i, e),
                }
            }
        }
        let mut t = self.top.clone().expect("graft into a non-identity tree");
        let mut i = i;
        go(&mut t, &mut i, &mut Some(e));
        MetricTree::raw(t)
    }

    /// `x ∘_i y` with connecting edge of length 1.
    pub fn compose(&self, i: usize, y: &MetricTree) -> Result<MetricTree, ActionError> {
        check_slot(i, self.arity())?;
        let (Some(_), Some(yt)) = (&self.top, &y.top) else {
            return Ok(if self.is_identity() { y.clone() } else { self.clone() });
        };
        let mut yt = yt.clone();
        yt.len = one();
        Ok(self.graft(i, MEdge::Vertex(yt)).normalize())
    }

    /// Corks entry `i` with a segment of length `tau`.
    pub fn cork_entry(&self, i: usize, tau: &Q) -> Result<MetricTree, TildeError> {
        check_slot(i, self.arity()).map_err(|e| TildeError::Slot(e.to_string()))?;
        if !in_unit(tau) {
            return Err(TildeError::Domain(format!("cork length {} outside [0,1]", fmt_q(tau))));
        }
        if self.is_identity() {
            return Ok(MetricTree::cork());
        }
        Ok(self.graft(i, MEdge::Vertex(MVertex::new(tau.clone(), Vec::new()))).normalize())
    }

    /// Corks the entries `slots` (increasing) at once, then normalizes.
    pub fn cork_entries(&self, slots: &[usize], taus: &[Q]) -> Result<MetricTree, TildeError> {
        for (i, tau) in slots.iter().zip(taus) {
            check_slot(*i, self.arity()).map_err(|e| TildeError::Slot(e.to_string()))?;
            if !in_unit(tau) {
                return Err(TildeError::Domain(format!("cork length {} outside [0,1]", fmt_q(tau))));
            }
        }
        if slots.is_empty() {
            return Ok(self.clone());
        }
        if self.is_identity() {
            return Ok(MetricTree::cork());
        }
        let mut t = self.clone();
        for (i, tau) in slots.iter().zip(taus).rev() {
            t = t.graft(*i, MEdge::Vertex(MVertex::new(tau.clone(), Vec::new())));
        }
        Ok(t.normalize())
    }

    pub fn is_prime(&self) -> bool {
        !self.is_identity() && self.lengths().iter().all(|l| !l.is_one())
    }

    /// Each length-1 edge sits below a univalent vertex, and the tree is
    /// not the single cork.
    pub fn is_quasi_prime(&self) -> bool {
        fn ok(v: &MVertex) -> bool {
            v.children.iter().all(|c| match c {
                MEdge::Leaf => true,
                MEdge::Vertex(w) => (!w.len.is_one() || w.children.is_empty()) && ok(w),
            })
        }
        match &self.top {
            None => true,
            Some(t) => *self != MetricTree::cork() && ok(t),
        }
    }

    /// Cuts at every length-1 edge.
    pub fn prime_decompose(&self) -> Result<PrimeDecomposition, TildeError> {
        fn go(v: &MVertex) -> PrimeDecomposition {
            let mut grafts = Vec::new();
            let mut leaf = 0;
            fn cut(v: &MVertex, leaf: &mut usize, grafts: &mut Vec<(usize, PrimeDecomposition)>) -> MVertex {
                let mut children = Vec::new();
                for c in &v.children {
                    match c {
                        MEdge::Leaf => {
                            *leaf += 1;
                            children.push(MEdge::Leaf);
                        }
                        MEdge::Vertex(w) if w.len.is_one() => {
                            *leaf += 1;
                            grafts.push((*leaf, go(w)));
                            children.push(MEdge::Leaf);
                        }
                        MEdge::Vertex(w) => children.push(MEdge::Vertex(cut(w, leaf, grafts))),
                    }
                }
                MVertex::new(v.len.clone(), children)
            }
            let mut top = cut(v, &mut leaf, &mut grafts);
            top.len = zero();
            PrimeDecomposition { prime: MetricTree::raw(top), grafts }
        }
        match &self.top {
            None => Err(TildeError::Identity),
            Some(t) => Ok(go(t)),
        }
    }

    /// Largest leaves-plus-univalent count over the prime components.
    pub fn filtration_index(&self) -> usize {
        match self.prime_decompose() {
            Err(_) => 0,
            Ok(d) => d.components().iter().map(|p| p.arity() + p.univalent_count()).max().unwrap_or(0),
        }
    }

    /// The underlying planar tree with inner vertices, forgetting lengths.
    pub fn shape(&self) -> Option<PlanarTree> {
        use crate::tree_core::Node;
        fn go(v: &MVertex) -> Node {
            Node::inner(
                v.children
                    .iter()
                    .map(|c| match c {
                        MEdge::Leaf => Node::leaf(),
                        MEdge::Vertex(w) => go(w),
                    })
                    .collect(),
            )
        }
        self.top.as_ref().map(|t| PlanarTree::from_node(&go(t)))
    }

    /// Valence ≥ 3 tree with all lengths read from `lengths` in preorder.
    pub fn from_shape(t: &PlanarTree, lengths: &[Q]) -> MetricTree {
        fn go(t: &PlanarTree, v: usize, lengths: &mut std::slice::Iter<'_, Q>, len: Q) -> MVertex {
            let children = t
                .children(v)
                .iter()
                .map(|&c| {
                    if t.kind(c) == VertexKind::Leaf {
                        MEdge::Leaf
                    } else {
                        let l = lengths.next().cloned().unwrap_or_else(one);
                        MEdge::Vertex(go(t, c, lengths, l))
                    }
                })
                .collect();
            MVertex::new(len, children)
        }
        let top = t.children(0)[0];
        if t.kind(top) == VertexKind::Leaf {
            return MetricTree::identity();
        }
        MetricTree::raw(go(t, top, &mut lengths.iter(), zero()))
    }

    pub fn to_json(&self) -> Value {
        fn edge(e: &MEdge) -> Value {
            match e {
                MEdge::Leaf => json!({"kind": "Leaf", "children": []}),
                MEdge::Vertex(v) => vertex(v, true),
            }
        }
        fn vertex(v: &MVertex, with_len: bool) -> Value {
            let children: Vec<Value> = v.children.iter().map(edge).collect();
            if with_len {
                json!({"kind": "Inner", "len": fmt_q(&v.len), "children": children})
            } else {
                json!({"kind": "Inner", "children": children})
            }
        }
        match &self.top {
            None => json!({"kind": "Leaf", "children": []}),
            Some(t) => vertex(t, false),
        }
    }

    /// Parses and normalizes.
    pub fn from_json(v: &Value) -> Result<MetricTree, TildeError> {
        fn err(m: &str) -> TildeError {
            TildeError::Json(m.to_string())
        }
        fn parse(v: &Value, top: bool) -> Result<MEdge, TildeError> {
            let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| err("missing kind"))?;
            let children = v.get("children").and_then(Value::as_array).ok_or_else(|| err("missing children"))?;
            match kind {
                "Leaf" if children.is_empty() => Ok(MEdge::Leaf),
                "Inner" => {
                    let len = match (top, v.get("len")) {
                        (true, _) => zero(),
                        (false, Some(Value::String(s))) => parse_q(s).map_err(|e| err(&e.to_string()))?,
                        (false, _) => return Err(err("internal edge without len")),
                    };
                    let children = children.iter().map(|c| parse(c, false)).collect::<Result<_, _>>()?;
                    Ok(MEdge::Vertex(MVertex::new(len, children)))
                }
                _ => Err(err("bad node")),
            }
        }
        let t = match parse(v, true)? {
            MEdge::Leaf => MetricTree::identity(),
            MEdge::Vertex(t) => MetricTree::raw(t),
        };
        t.validate()?;
        Ok(t.normalize())
    }

    /// Random normal-form tree with at most `max_leaves` leaves and
    /// `max_corks` univalent vertices, lengths with denominator `den`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_leaves: usize, max_corks: usize, den: i64) -> MetricTree {
        MetricTree::random_raw(rng, max_leaves, max_corks, den).normalize()
    }

    pub fn random_raw<R: Rng + ?Sized>(rng: &mut R, max_leaves: usize, max_corks: usize, den: i64) -> MetricTree {
        let leaves = rng.gen_range(0..=max_leaves);
        let corks = rng.gen_range(0..=max_corks);
        let mut items: Vec<MEdge> = vec![MEdge::Leaf; leaves];
        for _ in 0..corks {
            let at = rng.gen_range(0..=items.len());
            items.insert(at, MEdge::Vertex(MVertex::new(random_unit(rng, den), Vec::new())));
        }
        if items.is_empty() {
            return MetricTree::cork();
        }
        while items.len() > 1 && rng.gen_bool(0.8) {
            let len = rng.gen_range(2..=items.len().min(3));
            let start = rng.gen_range(0..=items.len() - len);
            let group: Vec<MEdge> = items.drain(start..start + len).collect();
            items.insert(start, MEdge::Vertex(MVertex::new(random_unit(rng, den), group)));
        }
        if items.len() == 1 {
            if let MEdge::Vertex(v) = &items[0] {
                if !v.children.is_empty() {
                    return MetricTree::raw(MVertex::new(zero(), v.children.clone()));
                }
            }
        }
        MetricTree::raw(MVertex::new(zero(), items))
    }
}

impl fmt::Display for MetricTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(v: &MVertex, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "(")?;
            for (i, c) in v.children.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                match c {
                    MEdge::Leaf => write!(f, "o")?,
                    MEdge::Vertex(w) => {
                        go(w, f)?;
                        write!(f, ":{}", fmt_q(&w.len))?;
                    }
                }
            }
            write!(f, ")")
        }
        match &self.top {
            None => write!(f, "|"),
            Some(t) => go(t, f),
        }
    }
}

/// A prime tree with the decompositions grafted at its leaves, in
/// increasing leaf order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeDecomposition {
    pub prime: MetricTree,
    pub grafts: Vec<(usize, PrimeDecomposition)>,
}

impl PrimeDecomposition {
    pub fn recompose(&self) -> MetricTree {
        let mut x = self.prime.clone();
        for (slot, d) in self.grafts.iter().rev() {
            x = x.compose(*slot, &d.recompose()).expect("slot within the prime component");
        }
        x
    }

    /// Prime components in preorder.
    pub fn components(&self) -> Vec<MetricTree> {
        let mut out = vec![self.prime.clone()];
        for (_, d) in &self.grafts {
            out.extend(d.components());
        }
        out
    }
}

/// The operad ⟊̃.
pub struct PentagonTilde;

impl NonSigmaOperad for PentagonTilde {
    type Elem = MetricTree;

    fn arity(&self, x: &MetricTree) -> usize {
        x.arity()
    }

    fn compose(&self, x: &MetricTree, i: usize, y: &MetricTree) -> Result<MetricTree, ActionError> {
        x.compose(i, y)
    }

    fn identity(&self) -> MetricTree {
        MetricTree::identity()
    }
}
