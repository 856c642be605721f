//! Degeneracy-aware models: hairy configurations △̃ and □̃, metric trees
//! ⟊̃, corking maps, generating-cell presentations and the identification
//! of the two descriptions of Wb□̃.

pub mod hairy;
pub mod metric;

pub use hairy::{normalize_hairy, HairyConfig, HairyLine, Site, SquareTilde, TriangleTilde};
pub use metric::{MEdge, MVertex, MetricTree, PentagonTilde, PrimeDecomposition};

use crate::classic_models::axioms::{self, AxiomReport};
use crate::classic_models::points::{ActionError, Side};
use crate::classic_models::DEFAULT_SEED;
use crate::rational::{fmt_q, in_unit, Q};
use crate::towers::{AttachmentRecord, AttachmentSchedule};
use crate::wb_construction::{GapState, WbCell};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TildeError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Slot(String),
    #[error("{0}")]
    Json(String),
    #[error("the identity has no prime decomposition")]
    Identity,
    #[error(transparent)]
    Action(#[from] ActionError),
}

// ====================================================================
// Actions
// ====================================================================

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TildePoint {
    Triangle(HairyConfig),
    Square(HairyLine),
}

impl fmt::Display for TildePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TildePoint::Triangle(c) => c.fmt(f),
            TildePoint::Square(c) => c.fmt(f),
        }
    }
}

/// Acts by the corolla `a_k`. On the left, △̃ takes `a_k ∘_slot c` while
/// □̃ takes `a_k(𝟏,…,c,…,𝟏)` with `c` in `slot`; on the right both take
/// `c ∘_slot a_k`.
pub fn act_tilde(side: Side, k: usize, slot: usize, c: &TildePoint) -> Result<TildePoint, ActionError> {
    Ok(match (side, c) {
        (Side::Left, TildePoint::Triangle(x)) => TildePoint::Triangle(x.left(k, slot)?),
        (Side::Right, TildePoint::Triangle(x)) => TildePoint::Triangle(x.right(slot, k)?),
        (Side::Left, TildePoint::Square(x)) => {
            crate::classic_models::points::check_slot(slot, k)?;
            let mut xs = vec![HairyLine::unit(); k];
            xs[slot - 1] = x.clone();
            TildePoint::Square(HairyLine::concat(&xs))
        }
        (Side::Right, TildePoint::Square(x)) => TildePoint::Square(x.right(slot, k)?),
    })
}

// ====================================================================
// Generating cells and schedules
// ====================================================================

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BaseModel {
    Triangle,
    Square,
    Pentagon,
    WbSquare,
    BPentagon,
}

/// Interior of `base(n+m) × [0,1]^{α(m̲)}`: a generating cell in degree `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GeneratingCellKey {
    pub base: BaseModel,
    pub n: usize,
    pub m: usize,
    pub alpha: Vec<usize>,
}

impl GeneratingCellKey {
    pub fn new(base: BaseModel, n: usize, alpha: Vec<usize>) -> GeneratingCellKey {
        GeneratingCellKey { base, n, m: alpha.len(), alpha }
    }

    pub fn stage(&self) -> usize {
        self.n + self.m
    }

    /// The single exception to `n+m ≥ 2` for ⟊̃ is the cork `(0,1)`.
    pub fn is_valid(&self) -> bool {
        let total = self.n + self.m;
        let shape_ok = match self.base {
            BaseModel::Triangle | BaseModel::WbSquare => true,
            BaseModel::Square | BaseModel::BPentagon => total > 0,
            BaseModel::Pentagon => total > 1 || (self.n, self.m) == (0, 1),
        };
        shape_ok && self.alpha.windows(2).all(|w| w[0] < w[1]) && self.alpha.iter().all(|&a| (1..=total).contains(&a))
    }

    pub fn dim(&self) -> usize {
        let d = self.n + 2 * self.m;
        match self.base {
            BaseModel::Triangle | BaseModel::WbSquare => d,
            BaseModel::Square | BaseModel::BPentagon => d - 1,
            BaseModel::Pentagon => d.saturating_sub(2),
        }
    }
}

impl fmt::Display for GeneratingCellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.alpha.iter().map(usize::to_string).collect();
        write!(f, "{:?}({},{};{{{}}})", self.base, self.n, self.m, a.join(","))
    }
}

/// All subsets of `1..=total` of size `m`, in lexicographic order.
pub fn inclusions(m: usize, total: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, total: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for a in start..=total {
            if total - a + 1 < m - cur.len() {
                break;
            }
            cur.push(a);
            go(a + 1, m, total, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, m, total, &mut Vec::new(), &mut out);
    out
}

/// Generating cells attached at stage `big_n`, by increasing number of corks.
pub fn generating_cells(base: BaseModel, big_n: usize) -> Vec<GeneratingCellKey> {
    let mut out = Vec::new();
    for m in 0..=big_n {
        for alpha in inclusions(m, big_n) {
            let k = GeneratingCellKey::new(base, big_n - m, alpha);
            if k.is_valid() {
                out.push(k);
            }
        }
    }
    out
}

/// Tilde model whose schedule is read from a generating-cell presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TildeModel {
    Triangle,
    Square,
    Pentagon,
    WbSquare,
    BPentagon,
}

impl TildeModel {
    pub fn base(self) -> BaseModel {
        match self {
            TildeModel::Triangle => BaseModel::Triangle,
            TildeModel::Square => BaseModel::Square,
            TildeModel::Pentagon => BaseModel::Pentagon,
            TildeModel::WbSquare => BaseModel::WbSquare,
            TildeModel::BPentagon => BaseModel::BPentagon,
        }
    }
}

/// Attachments from stage 0 through `big_n`, one record per sub-stage.
pub fn tilde_schedule(model: TildeModel, big_n: usize) -> AttachmentSchedule {
    let mut records = Vec::new();
    for stage in 0..=big_n {
        let cells = generating_cells(model.base(), stage);
        for i in 0..=stage {
            let sub: Vec<&GeneratingCellKey> = cells.iter().filter(|k| k.m == i).collect();
            if let Some(k) = sub.first() {
                records.push(AttachmentRecord { stage, sub_stage: i, degree: k.n, dim: k.dim(), count: sub.len() });
            }
        }
    }
    AttachmentSchedule { records }
}

// ====================================================================
// Axiom suites
// ====================================================================

pub const TILDE_SAMPLES: usize = 200;
const TILDE_DENOMINATOR: i64 = 6;

pub fn random_hairy_configs(rng: &mut ChaCha8Rng, count: usize, max_arity: usize) -> Vec<HairyConfig> {
    use rand::Rng;
    (0..count)
        .map(|_| {
            let n = rng.gen_range(0..=max_arity);
            HairyConfig::random(rng, n, 2, TILDE_DENOMINATOR)
        })
        .collect()
}

pub fn random_hairy_lines(rng: &mut ChaCha8Rng, count: usize, max_arity: usize) -> Vec<HairyLine> {
    use rand::Rng;
    (0..count)
        .map(|_| {
            let n = rng.gen_range(0..=max_arity);
            HairyLine::random(rng, n, 2, 4)
        })
        .collect()
}

pub fn random_metric_trees(rng: &mut ChaCha8Rng, count: usize, max_leaves: usize) -> Vec<MetricTree> {
    (0..count).map(|_| MetricTree::random(rng, max_leaves, 2, 4)).collect()
}

/// Small exhaustive generators: configurations built from the corners
/// of the parameter space in every degree ≤ `bound`.
pub fn corner_hairy_configs(bound: usize) -> Vec<HairyConfig> {
    let half = crate::rational::q(1, 2);
    let vals = [Q::zero(), half.clone(), Q::one()];
    let mut out = Vec::new();
    for n in 0..=bound {
        let mut pts: Vec<Vec<Q>> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for p in &pts {
                for v in vals.iter().filter(|v| p.last().map_or(true, |l| *v >= l)) {
                    let mut p = p.clone();
                    p.push(v.clone());
                    next.push(p);
                }
            }
            pts = next;
        }
        for p in pts {
            out.push(HairyConfig::new(p.clone(), Vec::new()));
            if n < bound {
                let c = normalize_hairy(HairyConfig::new(p, vec![(crate::rational::q(1, 4), half.clone())]));
                out.push(c.expect("corner configuration"));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

pub fn corner_hairy_lines(bound: usize) -> Vec<HairyLine> {
    let mut out = vec![HairyLine::unit()];
    for n in 1..=bound {
        for gaps in crate::classic_models::faces::CubeFace::all(n) {
            let gaps: Vec<Q> = gaps
                .gaps
                .iter()
                .map(|g| match g {
                    crate::classic_models::faces::Gap::Zero => Q::zero(),
                    crate::classic_models::faces::Gap::Free => crate::rational::q(1, 2),
                    crate::classic_models::faces::Gap::One => Q::one(),
                })
                .collect();
            out.push(HairyLine { sites: vec![Site::Point; n], gaps });
        }
    }
    out.push(HairyLine { sites: vec![Site::Hair(crate::rational::q(1, 2))], gaps: Vec::new() });
    out
}

fn chunks<T: Clone>(xs: &[T], size: usize) -> Vec<Vec<T>> {
    xs.chunks(size).map(<[T]>::to_vec).collect()
}

/// Weak-bimodule axioms of △̃ on corner configurations of degree ≤ `bound`
/// and `samples` seeded random points.
pub fn check_triangle_tilde(bound: usize, samples: usize, seed: u64) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport::new("triangle-tilde", seed);
    report.extend("corner", axioms::check_weak_bimodule(&TriangleTilde, &corner_hairy_configs(bound), bound));
    let pts = random_hairy_configs(&mut rng, samples, bound);
    report.extend("point", axioms::check_weak_bimodule(&TriangleTilde, &pts, bound));
    report
}

/// Bimodule and unit laws of □̃.
pub fn check_square_tilde(bound: usize, samples: usize, seed: u64) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport::new("square-tilde", seed);
    let corners = corner_hairy_lines(bound);
    report.extend("corner", axioms::check_bimodule(&SquareTilde, &corners, bound));
    report.extend("corner", axioms::check_unit_law(&SquareTilde, &corners));
    let pts = random_hairy_lines(&mut rng, samples, bound);
    for part in chunks(&pts, 50) {
        report.extend("point", axioms::check_bimodule(&SquareTilde, &part, bound));
    }
    report.extend("point", axioms::check_unit_law(&SquareTilde, &pts));
    report
}

/// Operad laws of ⟊̃; triples are drawn within blocks of 20 samples.
pub fn check_pentagon_tilde(bound: usize, samples: usize, seed: u64) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport::new("pentagon-tilde", seed);
    let mut corners: Vec<MetricTree> = (0..=bound.min(4)).map(MetricTree::corolla).collect();
    corners.push(MetricTree::cork());
    report.extend("corner", axioms::check_operad(&PentagonTilde, &corners, bound));
    let pts = random_metric_trees(&mut rng, samples, bound);
    for part in chunks(&pts, 20) {
        report.extend("point", axioms::check_operad(&PentagonTilde, &part, bound));
    }
    report
}

pub fn check_tilde_axioms(model: TildeModel, bound: usize, samples: usize, seed: Option<u64>) -> Option<AxiomReport> {
    let seed = seed.unwrap_or(DEFAULT_SEED);
    match model {
        TildeModel::Triangle => Some(check_triangle_tilde(bound, samples, seed)),
        TildeModel::Square => Some(check_square_tilde(bound, samples, seed)),
        TildeModel::Pentagon => Some(check_pentagon_tilde(bound, samples, seed)),
        _ => None,
    }
}

// ====================================================================
// Corking
// ====================================================================

fn check_corks(alpha: &[usize], taus: &[Q], arity: usize) -> Result<(), TildeError> {
    if alpha.len() != taus.len() {
        return Err(TildeError::Domain(format!("{} entries but {} cork lengths", alpha.len(), taus.len())));
    }
    if !alpha.windows(2).all(|w| w[0] < w[1]) {
        return Err(TildeError::Domain("cork entries must increase".into()));
    }
    if let Some(&a) = alpha.iter().find(|&&a| a == 0 || a > arity) {
        return Err(TildeError::Slot(format!("cork entry {a} out of range 1..={arity}")));
    }
    if let Some(t) = taus.iter().find(|t| !in_unit(t)) {
        return Err(TildeError::Domain(format!("cork length {} outside [0,1]", fmt_q(t))));
    }
    Ok(())
}

/// σ for ⟊̃: corks entries `alpha` of `x` with segments of lengths `taus`.
pub fn sigma_cork_pentagon(x: &MetricTree, alpha: &[usize], taus: &[Q]) -> Result<MetricTree, TildeError> {
    check_corks(alpha, taus, x.arity())?;
    x.validate()?;
    x.normalize().cork_entries(alpha, taus)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BChild {
    Leaf,
    Bead(BBead),
}

/// Bead with its time and its point of ⟊̃; the point is forgotten at
/// times 0 and 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BBead {
    pub t: Q,
    pub x: Option<MetricTree>,
    pub children: Vec<BChild>,
}

/// Point of B⟊(n) or B⟊̃(n) as a tree of timed beads.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BPoint {
    pub root: BChild,
}

impl BChild {
    fn leaves(&self) -> usize {
        match self {
            BChild::Leaf => 1,
            BChild::Bead(b) => b.children.iter().map(BChild::leaves).sum(),
        }
    }
}

impl BBead {
    pub fn new(t: Q, x: MetricTree, children: Vec<BChild>) -> BBead {
        BBead { t, x: Some(x), children }
    }

    fn validate(&self, floor: &Q) -> Result<(), TildeError> {
        if !in_unit(&self.t) || self.t < *floor {
            return Err(TildeError::Domain(format!("bead time {} breaks the order", fmt_q(&self.t))));
        }
        if let Some(x) = &self.x {
            x.validate()?;
            if x.arity() != self.children.len() {
                return Err(TildeError::Domain(format!("bead point {x} has the wrong arity")));
            }
        }
        for c in &self.children {
            if let BChild::Bead(b) = c {
                b.validate(&self.t)?;
            }
        }
        Ok(())
    }

    fn is_end(&self) -> bool {
        self.t.is_zero() || self.t.is_one()
    }
}

fn canonical_child(c: &BChild) -> BChild {
    let BChild::Bead(b) = c else { return BChild::Leaf };
    let mut children = Vec::new();
    for ch in &b.children {
        match canonical_child(ch) {
            BChild::Bead(d) if b.is_end() && d.t == b.t && !d.children.is_empty() => children.extend(d.children),
            other => children.push(other),
        }
    }
    if b.is_end() {
        if children.len() == 1 {
            return children.pop().unwrap();
        }
        return BChild::Bead(BBead { t: b.t.clone(), x: None, children });
    }
    let x = b.x.as_ref().expect("interior bead carries a point").normalize();
    match x.prime_decompose() {
        Err(_) => children.pop().expect("identity bead has one child"),
        Ok(d) => {
            fn build(d: &PrimeDecomposition, t: &Q, rest: &mut std::vec::IntoIter<BChild>) -> BChild {
                let mut grafts = d.grafts.iter().peekable();
                let mut children = Vec::new();
                for leaf in 1..=d.prime.arity() {
                    match grafts.peek() {
                        Some((slot, g)) if *slot == leaf => {
                            children.push(build(g, t, rest));
                            grafts.next();
                        }
                        _ => children.push(rest.next().expect("leaf count matches")),
                    }
                }
                BChild::Bead(BBead { t: t.clone(), x: Some(d.prime.clone()), children })
            }
            build(&d, &b.t, &mut children.into_iter())
        }
    }
}

impl BPoint {
    pub fn identity() -> BPoint {
        BPoint { root: BChild::Leaf }
    }

    pub fn bead(b: BBead) -> BPoint {
        BPoint { root: BChild::Bead(b) }
    }

    pub fn arity(&self) -> usize {
        self.root.leaves()
    }

    pub fn validate(&self) -> Result<(), TildeError> {
        match &self.root {
            BChild::Leaf => Ok(()),
            BChild::Bead(b) => b.validate(&Q::zero()),
        }
    }

    /// Canonical representative: points forgotten and regions fused at
    /// times 0 and 1, identity beads removed, interior beads split into
    /// prime components sharing the bead's time.
    pub fn canonical(&self) -> BPoint {
        BPoint { root: canonical_child(&self.root) }
    }
}

impl fmt::Display for BPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(c: &BChild, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match c {
                BChild::Leaf => write!(f, "o"),
                BChild::Bead(b) => {
                    write!(f, "[{}", fmt_q(&b.t))?;
                    if let Some(x) = &b.x {
                        write!(f, " {x}")?;
                    }
                    write!(f, "](")?;
                    for (i, ch) in b.children.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        go(ch, f)?;
                    }
                    write!(f, ")")
                }
            }
        }
        go(&self.root, f)
    }
}

/// σ for B⟊̃. A corked leaf `s` whose bead has time `t` is cut off the
/// bead's point with cork length `τ_s/t` when `τ_s < t`; otherwise it
/// becomes a univalent bead at time `τ_s`.
pub fn sigma_cork_b(x: &BPoint, alpha: &[usize], taus: &[Q]) -> Result<BPoint, TildeError> {
    check_corks(alpha, taus, x.arity())?;
    x.validate()?;
    let corks: std::collections::BTreeMap<usize, Q> = alpha.iter().copied().zip(taus.iter().cloned()).collect();
    fn bead_leaf(tau: &Q) -> BChild {
        BChild::Bead(BBead::new(tau.clone(), MetricTree::cork(), Vec::new()))
    }
    fn go(c: &BChild, next: &mut usize, corks: &std::collections::BTreeMap<usize, Q>) -> Result<BChild, TildeError> {
        let BChild::Bead(b) = c else {
            *next += 1;
            return Ok(match corks.get(next) {
                Some(tau) => bead_leaf(tau),
                None => BChild::Leaf,
            });
        };
        let mut children = Vec::new();
        let mut cut = Vec::new();
        for (j, ch) in b.children.iter().enumerate() {
            if let BChild::Leaf = ch {
                *next += 1;
                if let Some(tau) = corks.get(next) {
                    if *tau < b.t {
                        cut.push((j + 1, tau / &b.t));
                    } else {
                        children.push(bead_leaf(tau));
                    }
                    continue;
                }
                children.push(BChild::Leaf);
            } else {
                children.push(go(ch, next, corks)?);
            }
        }
        let mut x = b.x.clone();
        if let Some(p) = &mut x {
            let (slots, lens): (Vec<usize>, Vec<Q>) = cut.into_iter().unzip();
            *p = p.cork_entries(&slots, &lens)?;
        }
        Ok(BChild::Bead(BBead { t: b.t.clone(), x, children }))
    }
    let mut next = 0;
    Ok(BPoint { root: go(&x.root, &mut next, &corks)? }.canonical())
}

// ====================================================================
// The two descriptions of Wb□̃
// ====================================================================

/// Cell `(c, α)`: a cell of Wb□(N) with corks on the middle leaves `α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WbTildeCell {
    pub base: WbCell,
    pub corks: Vec<usize>,
}

impl WbTildeCell {
    pub fn degree(&self) -> usize {
        self.base.arity() - self.corks.len()
    }

    pub fn dim(&self) -> usize {
        self.base.dim() + self.corks.len()
    }
}

/// Bead of a coend cell: an element of □(k) with its cork pattern, or 𝟏.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoendBead {
    pub gaps: Vec<GapState>,
    pub corks: Vec<usize>,
    pub unit: bool,
}

/// Cell of the coend description: beads in order with the gap states
/// between consecutive beads, plus the leaves at times 0 and 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoendCell {
    pub left: usize,
    pub beads: Vec<CoendBead>,
    pub joins: Vec<GapState>,
    pub right: usize,
}

impl CoendCell {
    /// One time per run of beads joined by `One`, plus the free gaps and
    /// the cork lengths inside each bead.
    pub fn dim(&self) -> usize {
        if self.beads.is_empty() {
            return 0;
        }
        let times = 1 + self.joins.iter().filter(|g| **g == GapState::Jump).count();
        times
            + self
                .beads
                .iter()
                .map(|b| b.gaps.iter().filter(|g| **g == GapState::Free).count() + b.corks.len())
                .sum::<usize>()
    }

    pub fn contains_unit(&self) -> bool {
        self.beads.iter().any(|b| b.unit)
    }

    /// Deletes the 𝟏 beads with their times and concatenates the rest;
    /// the join across deleted beads is the largest one crossed.
    pub fn to_cork_cell(&self) -> WbTildeCell {
        let mut gaps = Vec::new();
        let mut corks = Vec::new();
        let mut mid = 0;
        let mut last: Option<usize> = None;
        for (i, b) in self.beads.iter().enumerate() {
            if b.unit {
                continue;
            }
            if let Some(l) = last {
                gaps.push(*self.joins[l..i].iter().max().expect("join between beads"));
            }
            last = Some(i);
            corks.extend(b.corks.iter().map(|c| self.left + mid + c));
            gaps.extend(b.gaps.iter().copied());
            mid += b.gaps.len() + 1;
        }
        WbTildeCell { base: WbCell { left: self.left, mid, gaps, right: self.right }, corks }
    }

    /// Every way to insert one 𝟏 bead without changing the other times.
    pub fn unit_insertions(&self) -> Vec<CoendCell> {
        let unit = CoendBead { gaps: Vec::new(), corks: Vec::new(), unit: true };
        let k = self.beads.len();
        let mut out = Vec::new();
        for pos in 0..=k {
            let splits: Vec<(Option<GapState>, Option<GapState>)> = if k == 0 {
                vec![(None, None)]
            } else if pos == 0 {
                vec![(None, Some(GapState::One)), (None, Some(GapState::Jump))]
            } else if pos == k {
                vec![(Some(GapState::One), None), (Some(GapState::Jump), None)]
            } else if self.joins[pos - 1] == GapState::One {
                vec![(Some(GapState::One), Some(GapState::One))]
            } else {
                use GapState::{Jump, One};
                vec![(Some(Jump), Some(One)), (Some(One), Some(Jump)), (Some(Jump), Some(Jump))]
            };
            for (before, after) in splits {
                let mut c = self.clone();
                c.beads.insert(pos, unit.clone());
                c.joins = match (before, after) {
                    (None, None) => Vec::new(),
                    (None, Some(j)) => std::iter::once(j).chain(self.joins.iter().copied()).collect(),
                    (Some(j), None) => self.joins.iter().copied().chain(std::iter::once(j)).collect(),
                    (Some(x), Some(y)) => {
                        let mut v = self.joins[..pos - 1].to_vec();
                        v.extend([x, y]);
                        v.extend_from_slice(&self.joins[pos..]);
                        v
                    }
                };
                out.push(c);
            }
        }
        out
    }
}

/// Splits the middle of a Wb□ cell into beads at `One` and `Jump` gaps.
pub fn coend_cells_of(c: &WbTildeCell) -> CoendCell {
    let b = &c.base;
    let mut beads = Vec::new();
    let mut joins = Vec::new();
    let mut cur = CoendBead { gaps: Vec::new(), corks: Vec::new(), unit: false };
    let mut size = 0;
    let cork_set: BTreeSet<usize> = c.corks.iter().copied().collect();
    for leaf in 1..=b.mid {
        if leaf > 1 {
            let g = b.gaps[leaf - 2];
            if matches!(g, GapState::One | GapState::Jump) {
                beads.push(std::mem::replace(&mut cur, CoendBead { gaps: Vec::new(), corks: Vec::new(), unit: false }));
                joins.push(g);
                size = 0;
            } else {
                cur.gaps.push(g);
            }
        }
        size += 1;
        if cork_set.contains(&(b.left + leaf)) {
            cur.corks.push(size);
        }
    }
    if b.mid > 0 {
        beads.push(cur);
    }
    CoendCell { left: b.left, beads, joins, right: b.right }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WbTildeReport {
    pub n: usize,
    pub bound: usize,
    /// Cork-of-Wb□ cells before reduction, and those whose corks at
    /// times 0 and 1 are absorbed.
    pub cork_raw: usize,
    pub cork_absorbed: usize,
    pub cork_cells: usize,
    /// Coend cells with at most one 𝟏 bead, and those deleted to a cell
    /// without 𝟏.
    pub coend_raw: usize,
    pub unit_collapsed: usize,
    pub coend_cells: usize,
    pub matched: usize,
    pub dims_agree: bool,
    pub reductions_land_inside: bool,
    pub generating_cells: usize,
    pub generating_matched: usize,
    pub bijective: bool,
}

impl WbTildeReport {
    pub fn passed(&self) -> bool {
        self.bijective
            && self.dims_agree
            && self.reductions_land_inside
            && self.generating_matched == self.generating_cells
            && self.unit_collapsed + self.coend_cells == self.coend_raw
    }
}

/// Compares the cork-of-Wb□ and coend-of-□̃ descriptions in degree `n`
/// over base arities `n..=bound`.
pub fn wb_tilde_identify(n: usize, bound: usize) -> WbTildeReport {
    let mut r = WbTildeReport {
        n,
        bound,
        cork_raw: 0,
        cork_absorbed: 0,
        cork_cells: 0,
        coend_raw: 0,
        unit_collapsed: 0,
        coend_cells: 0,
        matched: 0,
        dims_agree: true,
        reductions_land_inside: true,
        generating_cells: 0,
        generating_matched: 0,
        bijective: false,
    };
    let mut cork: BTreeSet<WbTildeCell> = BTreeSet::new();
    let mut absorbed = Vec::new();
    let mut coend_raw = Vec::new();
    for big_n in n..=bound {
        let m = big_n - n;
        for c in WbCell::all(big_n) {
            for alpha in inclusions(m, big_n) {
                r.cork_raw += 1;
                let is_mid = |a: usize| a > c.left && a <= c.left + c.mid;
                if alpha.iter().all(|&a| is_mid(a)) {
                    let cell = WbTildeCell { base: c.clone(), corks: alpha.clone() };
                    if c.left == 0 && c.right == 0 && c.dim() == big_n {
                        let key = GeneratingCellKey::new(BaseModel::WbSquare, n, alpha.clone());
                        r.generating_cells += 1;
                        if key.dim() == cell.dim() {
                            r.generating_matched += 1;
                        }
                    }
                    cork.insert(cell);
                } else {
                    r.cork_absorbed += 1;
                    let mut base = c.clone();
                    let mut kept = Vec::new();
                    let mut shift = 0;
                    for &a in alpha.iter().rev() {
                        if is_mid(a) {
                            kept.push(a);
                        } else {
                            base = base.right_action(a, 0);
                            if a <= c.left {
                                shift += 1;
                            }
                        }
                    }
                    let corks = kept.into_iter().rev().map(|a| a - shift).collect();
                    absorbed.push(WbTildeCell { base, corks });
                }
            }
        }
    }
    for cell in &cork {
        let co = coend_cells_of(cell);
        if co.dim() != cell.dim() {
            r.dims_agree = false;
        }
        coend_raw.extend(co.unit_insertions());
        coend_raw.push(co);
    }
    let mut coend: BTreeSet<WbTildeCell> = BTreeSet::new();
    for co in &coend_raw {
        r.coend_raw += 1;
        let image = co.to_cork_cell();
        if co.contains_unit() {
            r.unit_collapsed += 1;
            if !cork.contains(&image) {
                r.reductions_land_inside = false;
            }
        } else {
            coend.insert(image);
        }
    }
    if absorbed.iter().any(|c| !cork.contains(c)) {
        r.reductions_land_inside = false;
    }
    r.cork_cells = cork.len();
    r.coend_cells = coend.len();
    r.matched = cork.intersection(&coend).count();
    r.bijective = r.matched == cork.len() && r.matched == coend.len();
    r
}
