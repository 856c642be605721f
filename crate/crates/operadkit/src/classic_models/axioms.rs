//! Generic law checkers for weak bimodules and bimodules over the
//! associative operad, and for non-symmetric operads.
//!
//! An element `a_k` of the associative operad is represented by its arity
//! `k`, with `a_i ∘_p a_j = a_{i+j−1}`.

use super::points::ActionError;
use serde::Serialize;
use std::fmt::Display;

pub trait WeakAssocBimodule {
    type Elem: Clone + PartialEq + Display;
    fn arity(&self, x: &Self::Elem) -> usize;
    /// `a_k ∘_i x`
    fn left(&self, k: usize, i: usize, x: &Self::Elem) -> Result<Self::Elem, ActionError>;
    /// `x ∘_i a_k`
    fn right(&self, x: &Self::Elem, i: usize, k: usize) -> Result<Self::Elem, ActionError>;
    /// Whether `a₀` acts on the right.
    fn degeneracy(&self) -> bool;
}

pub trait AssocBimodule {
    type Elem: Clone + PartialEq + Display;
    fn arity(&self, x: &Self::Elem) -> usize;
    /// `a_k(x₁,…,x_k)`
    fn left(&self, xs: &[Self::Elem]) -> Result<Self::Elem, ActionError>;
    fn right(&self, x: &Self::Elem, i: usize, k: usize) -> Result<Self::Elem, ActionError>;
    fn unit(&self) -> Option<Self::Elem>;
    fn degeneracy(&self) -> bool;
}

pub trait NonSigmaOperad {
    type Elem: Clone + PartialEq + Display;
    fn arity(&self, x: &Self::Elem) -> usize;
    fn compose(&self, x: &Self::Elem, i: usize, y: &Self::Elem) -> Result<Self::Elem, ActionError>;
    fn identity(&self) -> Self::Elem;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub axiom: String,
    pub level: String,
    pub instances: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub model: String,
    pub seed: u64,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn new(model: impl Into<String>, seed: u64) -> Self {
        AxiomReport { model: model.into(), seed, results: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.failures == 0)
    }

    pub fn failing_axioms(&self) -> Vec<String> {
        let mut v: Vec<String> =
            self.results.iter().filter(|r| r.failures > 0).map(|r| r.axiom.clone()).collect();
        v.dedup();
        v
    }

    pub fn total_instances(&self) -> usize {
        self.results.iter().map(|r| r.instances).sum()
    }

    pub fn extend(&mut self, level: &str, tally: Tally) {
        for (axiom, t) in tally.entries {
            self.results.push(AxiomResult {
                axiom,
                level: level.to_string(),
                instances: t.0,
                failures: t.1,
                counterexample: t.2,
            });
        }
    }
}

/// Per-axiom counters collected by the checkers.
#[derive(Default)]
pub struct Tally {
    entries: Vec<(String, (usize, usize, Option<String>))>,
}

impl Tally {
    pub fn record<E: PartialEq + Display>(
        &mut self,
        axiom: &str,
        context: impl FnOnce() -> String,
        lhs: Result<E, ActionError>,
        rhs: Result<E, ActionError>,
    ) {
        let pos = match self.entries.iter().position(|(a, _)| a == axiom) {
            Some(p) => p,
            None => {
                self.entries.push((axiom.to_string(), (0, 0, None)));
                self.entries.len() - 1
            }
        };
        let e = &mut self.entries[pos].1;
        e.0 += 1;
        let ok = matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a == b);
        if !ok {
            e.1 += 1;
            if e.2.is_none() {
                let show = |r: &Result<E, ActionError>| match r {
                    Ok(x) => x.to_string(),
                    Err(err) => format!("error: {err}"),
                };
                e.2 = Some(format!("{}: lhs = {}, rhs = {}", context(), show(&lhs), show(&rhs)));
            }
        }
    }

    /// Makes sure an axiom appears in the report even with no instances.
    pub fn touch(&mut self, axiom: &str) {
        if !self.entries.iter().any(|(a, _)| a == axiom) {
            self.entries.push((axiom.to_string(), (0, 0, None)));
        }
    }
}

/// Axioms (1)–(6) on every element of `elems` and every pair of
/// associative operations such that the composite has arity ≤ `bound`.
pub fn check_weak_bimodule<M: WeakAssocBimodule>(m: &M, elems: &[M::Elem], bound: usize) -> Tally {
    let mut t = Tally::default();
    for a in ["1", "2", "3", "4", "5", "6"] {
        t.touch(a);
    }
    let rmin = usize::from(!m.degeneracy());
    let fits = |k: usize, i: usize, j: usize| k + i + j <= bound + 2;
    for x in elems {
        let k = m.arity(x);
        t.record("1", || format!("id ∘1 {x}"), m.left(1, 1, x), Ok(x.clone()));
        for p in 1..=k {
            t.record("1", || format!("{x} ∘{p} id"), m.right(x, p, 1), Ok(x.clone()));
        }
        for i in 0..=bound {
            for j in 0..=bound {
                if !fits(k, i, j) {
                    continue;
                }
                let ctx = |p: usize, q: usize| move || format!("m = {x}, i = {i}, j = {j}, p = {p}, q = {q}");
                if i >= 1 && j >= 1 {
                    for p in 1..=i {
                        for q in 1..=j {
                            let lhs = m.left(i + j - 1, p + q - 1, x);
                            let rhs = m.left(j, q, x).and_then(|y| m.left(i, p, &y));
                            t.record("2", ctx(p, q), lhs, rhs);
                        }
                    }
                }
                if i >= 1 && j >= rmin && i + j > rmin {
                    for p in 1..=k {
                        for q in 1..=i {
                            let lhs = m.right(x, p, i).and_then(|y| m.right(&y, p + q - 1, j));
                            let rhs = m.right(x, p, i + j - 1);
                            t.record("3", ctx(p, q), lhs, rhs);
                        }
                    }
                }
                if i >= rmin && j >= rmin {
                    for p in 1..=k {
                        for q in p + 1..=k {
                            let lhs = m.right(x, p, i).and_then(|y| m.right(&y, q + i - 1, j));
                            let rhs = m.right(x, q, j).and_then(|y| m.right(&y, p, i));
                            t.record("4", ctx(p, q), lhs, rhs);
                        }
                    }
                }
                if i >= 1 && j >= rmin {
                    for p in 1..=i {
                        for q in 1..=k {
                            let lhs = m.left(i, p, x).and_then(|y| m.right(&y, p + q - 1, j));
                            let rhs = m.right(x, q, j).and_then(|y| m.left(i, p, &y));
                            t.record("5", ctx(p, q), lhs, rhs);
                        }
                    }
                    for p in 1..=i {
                        for q in 1..=i {
                            if q == p || i + j < 2 {
                                continue;
                            }
                            let (lhs, rhs) = if q < p {
                                (
                                    m.left(i, p, x).and_then(|y| m.right(&y, q, j)),
                                    m.left(i + j - 1, p + j - 1, x),
                                )
                            } else {
                                (
                                    m.left(i, p, x).and_then(|y| m.right(&y, q + k - 1, j)),
                                    m.left(i + j - 1, p, x),
                                )
                            };
                            t.record("6", ctx(p, q), lhs, rhs);
                        }
                    }
                }
            }
        }
    }
    t
}

/// Bimodule laws on elements and pairs/triples drawn from `elems`; the
/// composite arity stays within `bound`.
pub fn check_bimodule<M: AssocBimodule>(m: &M, elems: &[M::Elem], bound: usize) -> Tally {
    let mut t = Tally::default();
    for a in ["unit", "left-assoc", "right-assoc", "right-commute", "compatibility"] {
        t.touch(a);
    }
    let rmin = usize::from(!m.degeneracy());
    for x in elems {
        let k = m.arity(x);
        t.record("unit", || format!("a1({x})"), m.left(std::slice::from_ref(x)), Ok(x.clone()));
        for p in 1..=k {
            t.record("unit", || format!("{x} ∘{p} id"), m.right(x, p, 1), Ok(x.clone()));
        }
        for i in 0..=bound {
            for j in 0..=bound {
                if k + i + j > bound + 2 {
                    continue;
                }
                let ctx = |p: usize, q: usize| move || format!("m = {x}, i = {i}, j = {j}, p = {p}, q = {q}");
                if i >= 1 && j >= rmin && i + j > rmin {
                    for p in 1..=k {
                        for q in 1..=i {
                            let lhs = m.right(x, p, i).and_then(|y| m.right(&y, p + q - 1, j));
                            let rhs = m.right(x, p, i + j - 1);
                            t.record("right-assoc", ctx(p, q), lhs, rhs);
                        }
                    }
                }
                if i >= rmin && j >= rmin {
                    for p in 1..=k {
                        for q in p + 1..=k {
                            let lhs = m.right(x, p, i).and_then(|y| m.right(&y, q + i - 1, j));
                            let rhs = m.right(x, q, j).and_then(|y| m.right(&y, p, i));
                            t.record("right-commute", ctx(p, q), lhs, rhs);
                        }
                    }
                }
            }
        }
    }
    if let Some(u) = m.unit() {
        t.record("left-assoc", || "a0()".to_string(), m.left(&[]), Ok(u));
    }
    for a in 0..elems.len() {
        let x = &elems[a];
        for b in partners(elems.len(), a) {
            let y = &elems[b];
            let (kx, ky) = (m.arity(x), m.arity(y));
            if kx + ky > bound {
                continue;
            }
            let pair = [x.clone(), y.clone()];
            for j in rmin..=bound.saturating_sub(kx + ky) + 1 {
                for p in 1..=kx + ky {
                    let lhs = m.left(&pair).and_then(|z| m.right(&z, p, j));
                    let rhs = if p <= kx {
                        m.right(x, p, j).and_then(|x2| m.left(&[x2, y.clone()]))
                    } else {
                        m.right(y, p - kx, j).and_then(|y2| m.left(&[x.clone(), y2]))
                    };
                    t.record("compatibility", || format!("a2({x}, {y}) ∘{p} a{j}"), lhs, rhs);
                }
            }
            for c in partners(elems.len(), b) {
                let z = &elems[c];
                if kx + ky + m.arity(z) > bound {
                    continue;
                }
                let all = m.left(&[x.clone(), y.clone(), z.clone()]);
                let l = m.left(&pair).and_then(|xy| m.left(&[xy, z.clone()]));
                let r = m.left(&[y.clone(), z.clone()]).and_then(|yz| m.left(&[x.clone(), yz]));
                t.record("left-assoc", || format!("a2(a2({x}, {y}), {z})"), l, all.clone());
                t.record("left-assoc", || format!("a2({x}, a2({y}, {z}))"), r, all);
            }
        }
    }
    t
}

/// Indices paired with `a` in multi-input laws: everything for small
/// samples, otherwise a window of the following elements.
fn partners(len: usize, a: usize) -> Vec<usize> {
    const EXHAUSTIVE: usize = 64;
    const WINDOW: usize = 16;
    if len <= EXHAUSTIVE {
        (0..len).collect()
    } else {
        (0..WINDOW).map(|d| (a + d) % len).collect()
    }
}

/// Unit law `a₂(1, x) = x = a₂(x, 1)`.
pub fn check_unit_law<M: AssocBimodule>(m: &M, elems: &[M::Elem]) -> Tally {
    let mut t = Tally::default();
    t.touch("unit-bimodule");
    let Some(u) = m.unit() else {
        t.record::<String>("unit-bimodule", || "unit".into(), Err(ActionError::NoUnit), Ok(String::new()));
        return t;
    };
    for x in elems {
        t.record("unit-bimodule", || format!("a2(1, {x})"), m.left(&[u.clone(), x.clone()]), Ok(x.clone()));
        t.record("unit-bimodule", || format!("a2({x}, 1)"), m.left(&[x.clone(), u.clone()]), Ok(x.clone()));
    }
    t
}

/// Unit and the two associativity laws on triples whose composite has
/// arity ≤ `bound`.
pub fn check_operad<O: NonSigmaOperad>(o: &O, elems: &[O::Elem], bound: usize) -> Tally {
    let mut t = Tally::default();
    for a in ["unit", "sequential", "parallel"] {
        t.touch(a);
    }
    let id = o.identity();
    for x in elems {
        t.record("unit", || format!("id ∘1 {x}"), o.compose(&id, 1, x), Ok(x.clone()));
        for i in 1..=o.arity(x) {
            t.record("unit", || format!("{x} ∘{i} id"), o.compose(x, i, &id), Ok(x.clone()));
        }
    }
    for x in elems {
        let a = o.arity(x);
        for y in elems {
            let b = o.arity(y);
            for z in elems {
                let c = o.arity(z);
                if a + b + c > bound + 2 || a == 0 {
                    continue;
                }
                for i in 1..=a {
                    for j in 1..=b {
                        let lhs = o.compose(x, i, y).and_then(|w| o.compose(&w, i + j - 1, z));
                        let rhs = o.compose(y, j, z).and_then(|w| o.compose(x, i, &w));
                        t.record("sequential", || format!("({x} ∘{i} {y}) ∘{} {z}", i + j - 1), lhs, rhs);
                    }
                    for k in i + 1..=a {
                        let lhs = o.compose(x, i, y).and_then(|w| o.compose(&w, k + b - 1, z));
                        let rhs = o.compose(x, k, z).and_then(|w| o.compose(&w, i, y));
                        t.record("parallel", || format!("({x} ∘{i} {y}) ∘{} {z}", k + b - 1), lhs, rhs);
                    }
                }
            }
        }
    }
    t
}
