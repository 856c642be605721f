//! Attachment schedules of the filtered models, the delooping ladders and
//! symbolic fibres of the associated towers.

use crate::b_construction::{b_cells, b_stage_complex, BStage};
use crate::classic_models::{filtration_stage, Model};
use crate::complexes::CellComplex;
use crate::tilde_models::{generating_cells, tilde_schedule, BaseModel, TildeModel};
use crate::wb_construction::{wb_stage_complex, WbStage};
use serde::Serialize;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AttachmentRecord {
    pub stage: usize,
    pub sub_stage: usize,
    pub degree: usize,
    pub dim: usize,
    pub count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AttachmentSchedule {
    pub records: Vec<AttachmentRecord>,
}

impl AttachmentSchedule {
    pub fn stage_total(&self, stage: usize) -> usize {
        self.records.iter().filter(|r| r.stage == stage).map(|r| r.count).sum()
    }

    pub fn at_stage(&self, stage: usize) -> Vec<&AttachmentRecord> {
        self.records.iter().filter(|r| r.stage == stage).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.records.windows(2).all(|w| (w[0].stage, w[0].sub_stage) < (w[1].stage, w[1].sub_stage))
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:>5} {:>9} {:>6} {:>4} {:>6}\n", "stage", "sub-stage", "degree", "dim", "count");
        for r in &self.records {
            out.push_str(&format!("{:>5} {:>9} {:>6} {:>4} {:>6}\n", r.stage, r.sub_stage, r.degree, r.dim, r.count));
        }
        out
    }

    /// Records present in exactly one of the two schedules.
    pub fn diff(&self, other: &AttachmentSchedule) -> Vec<String> {
        let a: HashSet<&AttachmentRecord> = self.records.iter().collect();
        let b: HashSet<&AttachmentRecord> = other.records.iter().collect();
        let mut out: Vec<String> = a.difference(&b).map(|r| format!("- {r:?}")).collect();
        out.extend(b.difference(&a).map(|r| format!("+ {r:?}")));
        out.sort();
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TowerModel {
    Triangle,
    Square,
    Pentagon,
    WbSquare,
    BPentagon,
    TriangleTilde,
    SquareTilde,
    PentagonTilde,
    WbSquareTilde,
    BPentagonTilde,
}

impl TowerModel {
    pub const ALL: [TowerModel; 10] = [
        TowerModel::Triangle,
        TowerModel::Square,
        TowerModel::Pentagon,
        TowerModel::WbSquare,
        TowerModel::BPentagon,
        TowerModel::TriangleTilde,
        TowerModel::SquareTilde,
        TowerModel::PentagonTilde,
        TowerModel::WbSquareTilde,
        TowerModel::BPentagonTilde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TowerModel::Triangle => "triangle",
            TowerModel::Square => "square",
            TowerModel::Pentagon => "pentagon",
            TowerModel::WbSquare => "wb-square",
            TowerModel::BPentagon => "b-pentagon",
            TowerModel::TriangleTilde => "triangle-tilde",
            TowerModel::SquareTilde => "square-tilde",
            TowerModel::PentagonTilde => "pentagon-tilde",
            TowerModel::WbSquareTilde => "wb-square-tilde",
            TowerModel::BPentagonTilde => "b-pentagon-tilde",
        }
    }

    pub fn from_name(s: &str) -> Option<TowerModel> {
        TowerModel::ALL.into_iter().find(|m| m.name() == s)
    }

    pub fn tilde(self) -> Option<TildeModel> {
        match self {
            TowerModel::TriangleTilde => Some(TildeModel::Triangle),
            TowerModel::SquareTilde => Some(TildeModel::Square),
            TowerModel::PentagonTilde => Some(TildeModel::Pentagon),
            TowerModel::WbSquareTilde => Some(TildeModel::WbSquare),
            TowerModel::BPentagonTilde => Some(TildeModel::BPentagon),
            _ => None,
        }
    }
}

impl fmt::Display for TowerModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("schedule of {model} disagrees with its census: {diff:?}")]
    Mismatch { model: TowerModel, diff: Vec<String> },
    #[error("{0}")]
    Build(String),
    #[error("no fibre statement for {0}")]
    NoFiber(TowerModel),
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Schedule given by the binomial rules, stages `0..=big_n`.
pub fn closed_form_schedule(model: TowerModel, big_n: usize) -> AttachmentSchedule {
    let mut records = Vec::new();
    let one = |stage: usize, dim: usize| AttachmentRecord { stage, sub_stage: 0, degree: stage, dim, count: 1 };
    for n in 0..=big_n {
        match model {
            TowerModel::Triangle | TowerModel::WbSquare => records.push(one(n, n)),
            TowerModel::Square | TowerModel::BPentagon if n >= 1 => records.push(one(n, n - 1)),
            TowerModel::Pentagon if n >= 2 => records.push(one(n, n - 2)),
            TowerModel::PentagonTilde if n == 1 => {
                records.push(AttachmentRecord { stage: 1, sub_stage: 1, degree: 0, dim: 0, count: 1 })
            }
            TowerModel::TriangleTilde | TowerModel::WbSquareTilde => {
                for i in 0..=n {
                    records.push(AttachmentRecord { stage: n, sub_stage: i, degree: n - i, dim: n + i, count: binom(n, i) });
                }
            }
            TowerModel::SquareTilde | TowerModel::BPentagonTilde if n >= 1 => {
                for i in 0..=n {
                    records.push(AttachmentRecord {
                        stage: n,
                        sub_stage: i,
                        degree: n - i,
                        dim: n + i - 1,
                        count: binom(n, i),
                    });
                }
            }
            TowerModel::PentagonTilde if n >= 2 => {
                for i in 0..=n {
                    records.push(AttachmentRecord {
                        stage: n,
                        sub_stage: i,
                        degree: n - i,
                        dim: n + i - 2,
                        count: binom(n, i),
                    });
                }
            }
            _ => {}
        }
    }
    AttachmentSchedule { records }
}

/// New cells of `fine` outside `coarse`, summarized as one record: the
/// top dimension and the signed count `(−1)^dim · Σ (−1)^dim(c)`.
fn new_cells_record(stage: usize, fine: &CellComplex, coarse: Option<&CellComplex>) -> Option<AttachmentRecord> {
    let old: HashSet<&str> = coarse.map_or_else(HashSet::new, |c| c.cells().iter().map(|c| c.label.as_str()).collect());
    let new: Vec<usize> = fine.cells().iter().filter(|c| !old.contains(c.label.as_str())).map(|c| c.dim).collect();
    let dim = *new.iter().max()?;
    let chi: i64 = new.iter().map(|&d| if d % 2 == 0 { 1 } else { -1 }).sum();
    let signed = if dim % 2 == 0 { chi } else { -chi };
    Some(AttachmentRecord { stage, sub_stage: 0, degree: stage, dim, count: signed.max(0) as usize })
}

fn classic_census(model: Model, big_n: usize, bound: usize) -> Result<AttachmentSchedule, TowerError> {
    let err = |e: crate::classic_models::ModelError| TowerError::Build(e.to_string());
    let mut records = Vec::new();
    for n in 0..=big_n {
        let fine = filtration_stage(model, n, n, bound).map_err(err)?;
        let coarse = if n == 0 { None } else { Some(filtration_stage(model, n - 1, n, bound).map_err(err)?) };
        records.extend(new_cells_record(n, &fine, coarse.as_ref()));
    }
    Ok(AttachmentSchedule { records })
}

fn wb_census(big_n: usize, bound: usize) -> Result<AttachmentSchedule, TowerError> {
    let err = |e: crate::wb_construction::WbError| TowerError::Build(e.to_string());
    let mut records = Vec::new();
    for n in 0..=big_n {
        let fine = wb_stage_complex(WbStage::Stage, n, n, bound).map_err(err)?;
        let coarse = if n == 0 { None } else { Some(wb_stage_complex(WbStage::Stage, n - 1, n, bound).map_err(err)?) };
        records.extend(new_cells_record(n, &fine, coarse.as_ref()));
    }
    Ok(AttachmentSchedule { records })
}

fn b_census(big_n: usize, bound: usize) -> Result<AttachmentSchedule, TowerError> {
    let err = |e: crate::b_construction::BError| TowerError::Build(e.to_string());
    let mut records = Vec::new();
    for n in 1..=big_n {
        let fine = b_stage_complex(BStage::Stage, n, n, bound).map_err(err)?;
        let coarse = b_stage_complex(BStage::Stage, n - 1, n, bound).map_err(err)?;
        let generators = b_cells(n).values().filter(|c| c.is_generator()).count();
        let rec = new_cells_record(n, &fine, Some(&coarse));
        if let Some(r) = &rec {
            let new = fine.len() - coarse.len();
            if new != generators {
                return Err(TowerError::Build(format!("B⟊({n}): {new} new cells but {generators} generators")));
            }
            records.push(r.clone());
        }
    }
    Ok(AttachmentSchedule { records })
}

/// Schedule enumerated from the model modules: new cells of each
/// filtration stage for the classic models, generating-cell keys for the
/// tilde models.
pub fn census_schedule(model: TowerModel, big_n: usize, bound: usize) -> Result<AttachmentSchedule, TowerError> {
    match model {
        TowerModel::Triangle => classic_census(Model::Triangle, big_n, bound),
        TowerModel::Square => classic_census(Model::Square, big_n, bound),
        TowerModel::Pentagon => classic_census(Model::Pentagon, big_n, bound),
        TowerModel::WbSquare => wb_census(big_n, bound),
        TowerModel::BPentagon => b_census(big_n, bound),
        _ => Ok(tilde_schedule(model.tilde().expect("tilde model"), big_n)),
    }
}

/// The closed-form schedule, checked against the census.
pub fn schedule(model: TowerModel, big_n: usize, bound: usize) -> Result<AttachmentSchedule, TowerError> {
    let closed = closed_form_schedule(model, big_n);
    let census = census_schedule(model, big_n, bound)?;
    if closed != census {
        return Err(TowerError::Mismatch { model, diff: closed.diff(&census) });
    }
    Ok(closed)
}

// ====================================================================
// Ladder
// ====================================================================

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LadderStep {
    pub from: TowerModel,
    pub to: TowerModel,
    /// Cells `(n, m)` with dimensions on both sides.
    pub matched: Vec<((usize, usize), usize, usize)>,
    pub unmatched: Vec<(TowerModel, (usize, usize))>,
}

impl LadderStep {
    pub fn drops_by_one(&self) -> bool {
        self.matched.iter().all(|(_, a, b)| *a == b + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LadderReport {
    pub max_stage: usize,
    pub steps: Vec<LadderStep>,
}

impl LadderReport {
    pub fn drops_by_one(&self) -> bool {
        self.steps.iter().all(LadderStep::drops_by_one)
    }

    pub fn unmatched(&self) -> Vec<(TowerModel, (usize, usize))> {
        let mut v: Vec<_> = self.steps.iter().flat_map(|s| s.unmatched.iter().copied()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&format!("{} -> {}\n", s.from, s.to));
            for ((n, m), a, b) in &s.matched {
                out.push_str(&format!("  ({n},{m}) {a} -> {b}\n"));
            }
            for (model, (n, m)) in &s.unmatched {
                out.push_str(&format!("  ({n},{m}) only in {model}\n"));
            }
        }
        out
    }
}

/// Cells with no partner one level down: the lower model attaches
/// nothing in degree 0, and ⟊ and ⟊̃ attach nothing in degree 1 without
/// corks.
pub const EXCEPTIONAL_CELLS: [(TowerModel, (usize, usize)); 5] = [
    (TowerModel::Triangle, (0, 0)),
    (TowerModel::Square, (1, 0)),
    (TowerModel::TriangleTilde, (0, 0)),
    (TowerModel::SquareTilde, (1, 0)),
    (TowerModel::WbSquareTilde, (0, 0)),
];

fn cells_by_key(model: TowerModel, max_stage: usize) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    if let Some(t) = model.tilde() {
        for stage in 0..=max_stage {
            for k in generating_cells(t.base(), stage) {
                out.insert((k.n, k.m), k.dim());
            }
        }
    } else {
        for r in closed_form_schedule(model, max_stage).records {
            out.insert((r.degree, 0), r.dim);
        }
    }
    out
}

fn step(from: TowerModel, to: TowerModel, max_stage: usize) -> LadderStep {
    let a = cells_by_key(from, max_stage);
    let b = cells_by_key(to, max_stage);
    let mut matched = Vec::new();
    let mut unmatched = Vec::new();
    for (k, da) in &a {
        match b.get(k) {
            Some(db) => matched.push((*k, *da, *db)),
            None => unmatched.push((from, *k)),
        }
    }
    unmatched.extend(b.keys().filter(|k| !a.contains_key(k)).map(|k| (to, *k)));
    LadderStep { from, to, matched, unmatched }
}

/// Pairs the schedules of (△,□,⟊), (△̃,□̃,⟊̃) and (Wb□̃,B⟊̃) cell by cell.
pub fn delooping_ladder(max_stage: usize) -> LadderReport {
    use TowerModel::*;
    let steps = vec![
        step(Triangle, Square, max_stage),
        step(Square, Pentagon, max_stage),
        step(TriangleTilde, SquareTilde, max_stage),
        step(SquareTilde, PentagonTilde, max_stage),
        step(WbSquareTilde, BPentagonTilde, max_stage),
    ];
    LadderReport { max_stage, steps }
}

// ====================================================================
// Fibres
// ====================================================================

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub tower: TowerModel,
    pub stage: usize,
    pub expression: String,
}

fn superscript(k: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    k.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect()
}

fn loops(k: usize) -> String {
    match k {
        0 => String::new(),
        1 => "Ω ".to_string(),
        _ => format!("Ω{} ", superscript(k)),
    }
}

fn underlined(n: usize) -> String {
    n.to_string().chars().flat_map(|c| [c, '\u{0332}']).collect()
}

fn tfiber(n: usize) -> String {
    format!("tfiber(𝒪({}∖•))", underlined(n))
}

/// Fibre of `T_N → T_{N−1}` for the six primary towers.
pub fn fiber_report(tower: TowerModel, stage: usize) -> Result<FiberReport, TowerError> {
    let n = stage;
    let expression = match tower {
        TowerModel::Triangle => format!("empty or {}𝒪({n})", loops(n)),
        TowerModel::Square if n == 0 => "*".to_string(),
        TowerModel::Square => format!("empty or {}𝒪({n})", loops(n - 1)),
        TowerModel::Pentagon if n < 2 => "*".to_string(),
        TowerModel::Pentagon => format!("empty or {}𝒪({n})", loops(n - 2)),
        TowerModel::TriangleTilde => format!("empty or {}{}", loops(n), tfiber(n)),
        TowerModel::SquareTilde if n == 0 => "*".to_string(),
        TowerModel::SquareTilde if n == 1 => "hofiber(𝒪(1) → 𝒪(0))".to_string(),
        TowerModel::SquareTilde => format!("empty or {}{}", loops(n - 1), tfiber(n)),
        TowerModel::PentagonTilde if n == 0 => "*".to_string(),
        TowerModel::PentagonTilde if n == 1 => "𝒪(0)".to_string(),
        TowerModel::PentagonTilde if n == 2 => tfiber(2),
        TowerModel::PentagonTilde => format!("empty or {}{}", loops(n - 2), tfiber(n)),
        other => return Err(TowerError::NoFiber(other)),
    };
    Ok(FiberReport { tower, stage, expression })
}

impl BaseModel {
    pub fn tower(self) -> TowerModel {
        match self {
            BaseModel::Triangle => TowerModel::TriangleTilde,
            BaseModel::Square => TowerModel::SquareTilde,
            BaseModel::Pentagon => TowerModel::PentagonTilde,
            BaseModel::WbSquare => TowerModel::WbSquareTilde,
            BaseModel::BPentagon => TowerModel::BPentagonTilde,
        }
    }
}
