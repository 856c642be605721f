//! Finite cell complexes with boundary incidences, f-vectors, Euler
//! characteristics, mod-2 cellular homology and refinement witnesses.

use serde::Serialize;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Cell {
    pub label: String,
    pub dim: usize,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("duplicate cell label {0}")]
    DuplicateLabel(String),
    #[error("cell {cell} lists unknown face {face}")]
    UnknownFace { cell: String, face: String },
    #[error("face {face} of {cell} has the wrong dimension")]
    FaceDimension { cell: String, face: String },
    #[error("boundary of the boundary of {0} is nonzero mod 2")]
    BoundarySquared(String),
    #[error("malformed complex JSON: {0}")]
    Parse(String),
    #[error("subcomplex is not closed: {cell} kept but its face {face} dropped")]
    NotClosed { cell: String, face: String },
}

/// Incidence list of a cell: `(face label, multiplicity)`.
pub type FaceList = Vec<(String, u32)>;

/// Accumulates cells by label and resolves boundaries on [`build`](Self::build).
#[derive(Default)]
pub struct ComplexBuilder {
    cells: Vec<Cell>,
    faces: Vec<FaceList>,
}

impl ComplexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, label: impl Into<String>, dim: usize, degree: usize, faces: FaceList) {
        self.cells.push(Cell { label: label.into(), dim, degree });
        self.faces.push(faces);
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn build(self) -> Result<CellComplex, ComplexError> {
        let mut index = HashMap::with_capacity(self.cells.len());
        for (i, c) in self.cells.iter().enumerate() {
            if index.insert(c.label.clone(), i).is_some() {
                return Err(ComplexError::DuplicateLabel(c.label.clone()));
            }
        }
        let mut boundary = Vec::with_capacity(self.cells.len());
        for (i, faces) in self.faces.into_iter().enumerate() {
            let mut acc: HashMap<usize, u32> = HashMap::new();
            for (label, m) in faces {
                let j = *index.get(&label).ok_or_else(|| ComplexError::UnknownFace {
                    cell: self.cells[i].label.clone(),
                    face: label.clone(),
                })?;
                *acc.entry(j).or_default() += m;
            }
            let mut list: Vec<(usize, u32)> = acc.into_iter().filter(|(_, m)| *m > 0).collect();
            list.sort_unstable();
            boundary.push(list);
        }
        CellComplex::new(self.cells, boundary)
    }
}

/// Graded cells with integer incidence multiplicities.
#[derive(Clone, Debug)]
pub struct CellComplex {
    cells: Vec<Cell>,
    boundary: Vec<Vec<(usize, u32)>>,
    index: HashMap<String, usize>,
}

impl CellComplex {
    pub fn new(cells: Vec<Cell>, boundary: Vec<Vec<(usize, u32)>>) -> Result<Self, ComplexError> {
        let mut index = HashMap::with_capacity(cells.len());
        for (i, c) in cells.iter().enumerate() {
            if index.insert(c.label.clone(), i).is_some() {
                return Err(ComplexError::DuplicateLabel(c.label.clone()));
            }
        }
        let cx = CellComplex { cells, boundary, index };
        for i in 0..cx.len() {
            for &(j, _) in &cx.boundary[i] {
                if j >= cx.len() {
                    return Err(ComplexError::UnknownFace {
                        cell: cx.cells[i].label.clone(),
                        face: format!("#{j}"),
                    });
                }
                if cx.cells[j].dim + 1 != cx.cells[i].dim {
                    return Err(ComplexError::FaceDimension {
                        cell: cx.cells[i].label.clone(),
                        face: cx.cells[j].label.clone(),
                    });
                }
            }
        }
        for i in 0..cx.len() {
            let mut parity: HashMap<usize, u32> = HashMap::new();
            for &(j, m) in &cx.boundary[i] {
                for &(k, m2) in &cx.boundary[j] {
                    *parity.entry(k).or_default() += m * m2;
                }
            }
            if parity.values().any(|v| v % 2 == 1) {
                return Err(ComplexError::BoundarySquared(cx.cells[i].label.clone()));
            }
        }
        Ok(cx)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn boundary(&self, i: usize) -> &[(usize, u32)] {
        &self.boundary[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn top_dim(&self) -> Option<usize> {
        self.cells.iter().map(|c| c.dim).max()
    }

    pub fn cells_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.cells[i].dim == d).collect()
    }

    /// Indices of all faces of cell `i`, including `i`.
    pub fn closure(&self, i: usize) -> HashSet<usize> {
        let mut seen = HashSet::new();
        let mut stack = vec![i];
        while let Some(c) = stack.pop() {
            if seen.insert(c) {
                stack.extend(self.boundary[c].iter().filter(|(_, m)| *m > 0).map(|(j, _)| *j));
            }
        }
        seen
    }

    pub fn f_vector(&self) -> FVector {
        let mut counts = vec![0; self.top_dim().map_or(0, |d| d + 1)];
        for c in &self.cells {
            counts[c.dim] += 1;
        }
        FVector(counts)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().euler()
    }

    /// Betti numbers of the mod-2 cellular chain complex, indexed 0..=top.
    pub fn homology_mod2(&self) -> Vec<usize> {
        let Some(top) = self.top_dim() else { return Vec::new() };
        let mut pos = vec![0usize; self.len()];
        let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
        for (i, c) in self.cells.iter().enumerate() {
            pos[i] = by_dim[c.dim].len();
            by_dim[c.dim].push(i);
        }
        // rank[d] = rank of the boundary map C_d -> C_{d-1}
        let mut rank = vec![0usize; top + 2];
        for d in 1..=top {
            let rows: Vec<Vec<usize>> = by_dim[d]
                .iter()
                .map(|&i| {
                    self.boundary[i].iter().filter(|(_, m)| m % 2 == 1).map(|(j, _)| pos[*j]).collect()
                })
                .collect();
            rank[d] = gf2_rank(&rows, by_dim[d - 1].len());
        }
        (0..=top).map(|d| by_dim[d].len() - rank[d] - rank[d + 1]).collect()
    }

    /// The cells satisfying `keep`, which must form a closed subset.
    pub fn subcomplex(&self, keep: impl Fn(&Cell) -> bool) -> Result<CellComplex, ComplexError> {
        let kept: Vec<bool> = self.cells.iter().map(&keep).collect();
        let mut remap = vec![usize::MAX; self.len()];
        let mut cells = Vec::new();
        for i in 0..self.len() {
            if kept[i] {
                remap[i] = cells.len();
                cells.push(self.cells[i].clone());
            }
        }
        let mut boundary = Vec::with_capacity(cells.len());
        for i in 0..self.len() {
            if !kept[i] {
                continue;
            }
            let mut b = Vec::new();
            for &(j, m) in &self.boundary[i] {
                if !kept[j] {
                    return Err(ComplexError::NotClosed {
                        cell: self.cells[i].label.clone(),
                        face: self.cells[j].label.clone(),
                    });
                }
                b.push((remap[j], m));
            }
            boundary.push(b);
        }
        CellComplex::new(cells, boundary)
    }

    pub fn skeleton(&self, k: usize) -> CellComplex {
        self.subcomplex(|c| c.dim <= k).expect("skeleta are closed")
    }

    /// Face poset in DOT: one node per cell ranked by dimension, an edge per
    /// covering relation.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{}\" {{", escape(name));
        s.push_str("  rankdir=BT;\n");
        for d in 0..=self.top_dim().unwrap_or(0) {
            let ids = self.cells_of_dim(d);
            if ids.is_empty() {
                continue;
            }
            s.push_str("  { rank=same;");
            for i in ids {
                let _ = write!(s, " c{i};");
            }
            s.push_str(" }\n");
        }
        for (i, c) in self.cells.iter().enumerate() {
            let _ = writeln!(s, "  c{i} [label=\"{}\", dim={}];", escape(&c.label), c.dim);
        }
        for i in 0..self.len() {
            for &(j, m) in &self.boundary[i] {
                if m == 1 {
                    let _ = writeln!(s, "  c{j} -> c{i};");
                } else {
                    let _ = writeln!(s, "  c{j} -> c{i} [label=\"{m}\"];");
                }
            }
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct JsonCell<'a> {
            label: &'a str,
            dim: usize,
            degree: usize,
            boundary: Vec<(&'a str, u32)>,
        }
        let cells: Vec<JsonCell> = self
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| JsonCell {
                label: &c.label,
                dim: c.dim,
                degree: c.degree,
                boundary: self.boundary[i].iter().map(|&(j, m)| (self.cells[j].label.as_str(), m)).collect(),
            })
            .collect();
        serde_json::to_string(&serde_json::json!({ "cells": cells })).expect("complex serialization")
    }
    /// Inverse of [`to_json`](Self::to_json).
    pub fn from_json(s: &str) -> Result<CellComplex, ComplexError> {
        #[derive(serde::Deserialize)]
        struct JsonCell {
            label: String,
            dim: usize,
            degree: usize,
            boundary: Vec<(String, u32)>,
        }
        #[derive(serde::Deserialize)]
        struct JsonComplex {
            cells: Vec<JsonCell>,
        }
        let parsed: JsonComplex =
            serde_json::from_str(s).map_err(|e| ComplexError::Parse(e.to_string()))?;
        let index: HashMap<&str, usize> =
            parsed.cells.iter().enumerate().map(|(i, c)| (c.label.as_str(), i)).collect();
        let mut boundary = Vec::with_capacity(parsed.cells.len());
        for c in &parsed.cells {
            let mut faces = Vec::with_capacity(c.boundary.len());
            for (f, m) in &c.boundary {
                let j = *index
                    .get(f.as_str())
                    .ok_or_else(|| ComplexError::UnknownFace { cell: c.label.clone(), face: f.clone() })?;
                faces.push((j, *m));
            }
            boundary.push(faces);
        }
        let cells = parsed.cells.into_iter().map(|c| Cell { label: c.label, dim: c.dim, degree: c.degree }).collect();
        CellComplex::new(cells, boundary)
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Rank over GF(2) of the matrix whose rows list their nonzero columns.
pub fn gf2_rank(rows: &[Vec<usize>], ncols: usize) -> usize {
    let words = ncols.div_ceil(64);
    let mut pivots: HashMap<usize, Vec<u64>> = HashMap::new();
    for row in rows {
        let mut bits = vec![0u64; words];
        for &c in row {
            bits[c / 64] ^= 1 << (c % 64);
        }
        loop {
            let Some(lead) = leading_bit(&bits) else { break };
            match pivots.get(&lead) {
                Some(p) => {
                    for (b, q) in bits.iter_mut().zip(p) {
                        *b ^= q;
                    }
                }
                None => {
                    pivots.insert(lead, bits);
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn leading_bit(bits: &[u64]) -> Option<usize> {
    bits.iter()
        .enumerate()
        .rev()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FVector(pub Vec<usize>);

impl FVector {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn euler(&self) -> i64 {
        self.0.iter().enumerate().map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }
}

// ====================================================================
// Refinement
// ====================================================================

#[derive(Clone, Debug, Serialize)]
pub struct RefinementWitness {
    /// Coarse cell index for each fine cell.
    pub map: Vec<usize>,
    /// Fine cells mapping into each coarse cell.
    pub preimages: Vec<Vec<usize>>,
}

impl RefinementWitness {
    /// Number of fine cells of each dimension over each coarse cell.
    pub fn preimage_profile(&self, fine: &CellComplex, coarse_cell: usize) -> Vec<usize> {
        let mut prof = Vec::new();
        for &f in &self.preimages[coarse_cell] {
            let d = fine.cell(f).dim;
            if prof.len() <= d {
                prof.resize(d + 1, 0);
            }
            prof[d] += 1;
        }
        prof
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum RefinementFailure {
    #[error("no image given for fine cell {0}")]
    UndefinedLabel(String),
    #[error("fine cell {fine} maps to unknown coarse label {target}")]
    UnknownTarget { fine: String, target: String },
    #[error("fine cell {fine} of dimension {fine_dim} is sent into the lower-dimensional cell {target}")]
    DimensionRaised { fine: String, fine_dim: usize, target: String },
    #[error("subdividing {0} does not commute with the boundary")]
    ChainMap(String),
    #[error("face {face} of {fine} lands outside the closure of the image cell")]
    NotMonotone { fine: String, face: String },
    #[error("coarse cell {0} has no preimage")]
    NotSurjective(String),
    #[error("preimage of {coarse} has open Euler sum {open} and closed Euler characteristic {closed}")]
    PreimageEuler { coarse: String, open: i64, closed: i64 },
}

/// Checks that `map` presents `fine` as a subdivision of `coarse`.
///
/// Each fine cell names the coarse cell whose interior contains it. The
/// checks: the carrier has dimension at least that of the fine cell, faces
/// land in faces, subdivision commutes with the mod-2 boundary, and
/// over every coarse cell the open preimage has the Euler sum of an open
/// cell while the closed preimage has Euler characteristic 1.
pub fn check_refinement(
    fine: &CellComplex,
    coarse: &CellComplex,
    map: impl Fn(&Cell) -> Option<String>,
) -> Result<RefinementWitness, RefinementFailure> {
    let mut img = Vec::with_capacity(fine.len());
    for c in fine.cells() {
        let target = map(c).ok_or_else(|| RefinementFailure::UndefinedLabel(c.label.clone()))?;
        let j = coarse.index_of(&target).ok_or_else(|| RefinementFailure::UnknownTarget {
            fine: c.label.clone(),
            target: target.clone(),
        })?;
        if coarse.cell(j).dim < c.dim {
            return Err(RefinementFailure::DimensionRaised { fine: c.label.clone(), fine_dim: c.dim, target });
        }
        img.push(j);
    }
    let closures: Vec<HashSet<usize>> = (0..coarse.len()).map(|j| coarse.closure(j)).collect();
    for i in 0..fine.len() {
        for &(g, _) in fine.boundary(i) {
            if !closures[img[i]].contains(&img[g]) {
                return Err(RefinementFailure::NotMonotone {
                    fine: fine.cell(i).label.clone(),
                    face: fine.cell(g).label.clone(),
                });
            }
        }
    }
    let mut preimages = vec![Vec::new(); coarse.len()];
    for (i, &j) in img.iter().enumerate() {
        preimages[j].push(i);
    }
    // subdivision operator: a coarse cell goes to the sum of the fine cells
    // of its own dimension inside it
    let subdivide = |j: usize| -> Vec<usize> {
        preimages[j].iter().copied().filter(|&i| fine.cell(i).dim == coarse.cell(j).dim).collect()
    };
    for j in 0..coarse.len() {
        let mut lhs: HashMap<usize, u32> = HashMap::new();
        for i in subdivide(j) {
            for &(g, m) in fine.boundary(i) {
                *lhs.entry(g).or_default() += m;
            }
        }
        let mut rhs: HashMap<usize, u32> = HashMap::new();
        for &(g, m) in coarse.boundary(j) {
            if m % 2 == 1 {
                for i in subdivide(g) {
                    *rhs.entry(i).or_default() += 1;
                }
            }
        }
        let odd = |h: &HashMap<usize, u32>| -> HashSet<usize> {
            h.iter().filter(|(_, m)| *m % 2 == 1).map(|(k, _)| *k).collect()
        };
        if odd(&lhs) != odd(&rhs) {
            return Err(RefinementFailure::ChainMap(coarse.cell(j).label.clone()));
        }
    }
    let sign = |d: usize| if d % 2 == 0 { 1i64 } else { -1 };
    for j in 0..coarse.len() {
        if preimages[j].is_empty() {
            return Err(RefinementFailure::NotSurjective(coarse.cell(j).label.clone()));
        }
        let open: i64 = preimages[j].iter().map(|&i| sign(fine.cell(i).dim)).sum();
        let closed: i64 = closures[j]
            .iter()
            .flat_map(|&k| preimages[k].iter())
            .map(|&i| sign(fine.cell(i).dim))
            .sum();
        if open != sign(coarse.cell(j).dim) || closed != 1 {
            return Err(RefinementFailure::PreimageEuler { coarse: coarse.cell(j).label.clone(), open, closed });
        }
    }
    Ok(RefinementWitness { map: img, preimages })
}

// ====================================================================
// Quotients
// ====================================================================

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum QuotientError {
    #[error("quotient cell {0} has no preimage of its own dimension")]
    NoTopPreimage(String),
    #[error("cell {cell} of dimension {dim} maps onto the higher-dimensional cell {target}")]
    DimensionRaised { cell: String, dim: usize, target: String },
    #[error("preimages {first} and {second} of {target} induce different boundaries")]
    Inconsistent { target: String, first: String, second: String },
    #[error("{0}")]
    Complex(String),
}

/// Collapses `fine` along `key`, which names the target cell and its
/// dimension. The boundary of a target cell counts the facets of one
/// same-dimensional preimage by their images, keeping images of one lower
/// dimension; every same-dimensional preimage must agree mod 2.
pub fn quotient(
    fine: &CellComplex,
    key: impl Fn(&Cell) -> (String, usize),
) -> Result<CellComplex, QuotientError> {
    let keys: Vec<(String, usize)> = fine.cells().iter().map(&key).collect();
    let mut order: Vec<String> = Vec::new();
    let mut info: HashMap<String, (usize, usize, Vec<usize>)> = HashMap::new();
    for (i, (label, dim)) in keys.iter().enumerate() {
        if *dim > fine.cell(i).dim {
            return Err(QuotientError::DimensionRaised {
                cell: fine.cell(i).label.clone(),
                dim: fine.cell(i).dim,
                target: label.clone(),
            });
        }
        let e = info.entry(label.clone()).or_insert_with(|| {
            order.push(label.clone());
            (*dim, fine.cell(i).degree, Vec::new())
        });
        if fine.cell(i).dim == *dim {
            e.2.push(i);
        }
    }
    let induced = |i: usize, d: usize| -> Vec<(String, u32)> {
        let mut acc: HashMap<&str, u32> = HashMap::new();
        for &(g, m) in fine.boundary(i) {
            if keys[g].1 + 1 == d {
                *acc.entry(keys[g].0.as_str()).or_default() += m;
            }
        }
        let mut v: Vec<(String, u32)> = acc.into_iter().map(|(k, m)| (k.to_string(), m)).collect();
        v.sort();
        v
    };
    let parity = |v: &[(String, u32)]| -> Vec<String> {
        v.iter().filter(|(_, m)| m % 2 == 1).map(|(k, _)| k.clone()).collect()
    };
    let mut b = ComplexBuilder::new();
    order.sort_by(|x, y| (info[x].0, x).cmp(&(info[y].0, y)));
    for label in order {
        let (dim, degree, pre) = &info[&label];
        let Some(&first) = pre.first() else { return Err(QuotientError::NoTopPreimage(label)) };
        let faces = induced(first, *dim);
        let want = parity(&faces);
        for &other in &pre[1..] {
            if parity(&induced(other, *dim)) != want {
                return Err(QuotientError::Inconsistent {
                    target: label.clone(),
                    first: fine.cell(first).label.clone(),
                    second: fine.cell(other).label.clone(),
                });
            }
        }
        b.add(label, *dim, *degree, faces);
    }
    b.build().map_err(|e| QuotientError::Complex(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> CellComplex {
        let mut b = ComplexBuilder::new();
        b.add("a", 0, 0, vec![]);
        b.add("b", 0, 0, vec![]);
        b.add("ab", 1, 0, vec![("a".into(), 1), ("b".into(), 1)]);
        b.build().unwrap()
    }

    #[test]
    fn interval_is_contractible() {
        let c = interval();
        assert_eq!(c.f_vector(), FVector(vec![2, 1]));
        assert_eq!(c.homology_mod2(), vec![1, 0]);
    }

    #[test]
    fn open_subset_is_rejected() {
        let c = interval();
        assert!(matches!(c.subcomplex(|c| c.label != "a"), Err(ComplexError::NotClosed { .. })));
    }

    #[test]
    fn broken_boundary_is_rejected() {
        let mut b = ComplexBuilder::new();
        b.add("a", 0, 0, vec![]);
        b.add("b", 0, 0, vec![]);
        b.add("e", 1, 0, vec![("a".into(), 1)]);
        b.add("f", 2, 0, vec![("e".into(), 1)]);
        assert!(matches!(b.build(), Err(ComplexError::BoundarySquared(_))));
    }

    #[test]
    fn gf2_rank_small() {
        assert_eq!(gf2_rank(&[vec![0, 1], vec![1, 2], vec![0, 2]], 3), 2);
        assert_eq!(gf2_rank(&[vec![70], vec![3, 70]], 80), 2);
    }
}
