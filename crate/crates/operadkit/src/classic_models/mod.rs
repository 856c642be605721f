//! The simplex, cube and associahedron models with tree-labeled cells,
//! coordinate actions, filtrations and law checks.

pub mod axioms;
pub mod faces;
pub mod points;

pub use axioms::{AxiomReport, AxiomResult, AssocBimodule, NonSigmaOperad, Tally, WeakAssocBimodule};
pub use faces::{assoc_complex, assoc_facets, assoc_faces, cube_complex, simplex_complex, CubeFace, Gap, SimplexFace};
pub use points::{
    act_simplex, cube_left, cube_right, simplex_left, simplex_right, ActionError, CubePoint, CubeVariant, Side,
    SimplexPoint,
};

use crate::complexes::{CellComplex, ComplexError};
use crate::rational::random_monotone;
use crate::tree_core::{graft, Corolla, PlanarTree};
use std::collections::HashSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const SAMPLE_DENOMINATOR: i64 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Model {
    Triangle,
    Square,
    SquareWithUnit,
    Pentagon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Structure {
    /// Weak bimodule over Assoc₍>0₎.
    WeakBimodulePositive,
    /// Weak bimodule over Assoc.
    WeakBimodule,
    /// Bimodule over Assoc₍>0₎ on both sides.
    BimodulePositive,
    /// Bimodule with left Assoc action and right Assoc₍>0₎ action.
    Bimodule,
    /// Bimodule over Assoc on both sides.
    BimoduleFull,
    Operad,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModelId {
    pub model: Model,
    pub structure: Structure,
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{0:?} does not carry the structure {1:?}")]
    Inadmissible(Model, Structure),
    #[error("degree {n} exceeds the configured bound {bound}")]
    BoundExceeded { n: usize, bound: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

impl ModelId {
    pub fn new(model: Model, structure: Structure) -> Result<ModelId, ModelError> {
        use Model::*;
        use Structure::*;
        let ok = matches!(
            (model, structure),
            (Triangle, WeakBimodulePositive | WeakBimodule)
                | (Square, BimodulePositive)
                | (SquareWithUnit, Bimodule | BimoduleFull)
                | (Pentagon, Operad)
        );
        if ok {
            Ok(ModelId { model, structure, truncation: None })
        } else {
            Err(ModelError::Inadmissible(model, structure))
        }
    }

    pub fn default_for(model: Model) -> ModelId {
        let structure = match model {
            Model::Triangle => Structure::WeakBimodulePositive,
            Model::Square => Structure::BimodulePositive,
            Model::SquareWithUnit => Structure::Bimodule,
            Model::Pentagon => Structure::Operad,
        };
        ModelId { model, structure, truncation: None }
    }

    pub fn truncated(mut self, n: usize) -> ModelId {
        self.truncation = Some(n);
        self
    }

    pub fn cube_variant(&self) -> CubeVariant {
        match self.structure {
            Structure::BimodulePositive => CubeVariant::Positive,
            Structure::BimoduleFull => CubeVariant::Full,
            _ => CubeVariant::WithUnit,
        }
    }

    /// Dimension of the top cell in degree `n`.
    pub fn top_dim(&self, n: usize) -> Option<usize> {
        match self.model {
            Model::Triangle => Some(n),
            Model::Square | Model::SquareWithUnit => n.checked_sub(1).or((self.model == Model::SquareWithUnit).then_some(0)),
            Model::Pentagon => n.checked_sub(2).or((n == 1).then_some(0)),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Triangle => "triangle",
            Model::Square => "square",
            Model::SquareWithUnit => "square-unit",
            Model::Pentagon => "pentagon",
        })
    }
}

pub fn build_complex(model: Model, n: usize, bound: usize) -> Result<CellComplex, ModelError> {
    if n > bound {
        return Err(ModelError::BoundExceeded { n, bound });
    }
    Ok(match model {
        Model::Triangle => simplex_complex(n)?,
        Model::Square => cube_complex(n, false)?,
        Model::SquareWithUnit => cube_complex(n, true)?,
        Model::Pentagon => assoc_complex(n)?,
    })
}

/// Largest bead out-degree of a face tree.
pub fn max_bead_out(t: &PlanarTree) -> usize {
    t.beads().iter().map(|&b| t.out_degree(b)).max().unwrap_or(0)
}

/// Stage `N` of the model's filtration in degree `n`: △_N holds the faces
/// of dimension ≤ N, while □_N and ⟊_N hold the faces all of whose beads
/// have at most `N` outgoing edges.
pub fn filtration_stage(model: Model, big_n: usize, n: usize, bound: usize) -> Result<CellComplex, ModelError> {
    let full = build_complex(model, n, bound)?;
    let kept: HashSet<String> = match model {
        Model::Triangle => return Ok(full.subcomplex(|c| c.dim <= big_n)?),
        Model::Square | Model::SquareWithUnit => CubeFace::all(n)
            .into_iter()
            .filter(|f| f.max_bead_out() <= big_n)
            .map(|f| f.label())
            .chain(std::iter::once(CubeFace::unit().label()))
            .collect(),
        Model::Pentagon => {
            assoc_faces(n).into_iter().filter(|t| max_bead_out(t) <= big_n).map(|t| t.to_string()).collect()
        }
    };
    Ok(full.subcomplex(|c| kept.contains(&c.label))?)
}

/// The model restricted to degrees `0..=N`.
pub fn truncate(model: Model, big_n: usize, bound: usize) -> Result<Vec<CellComplex>, ModelError> {
    (0..=big_n).map(|n| build_complex(model, n, bound)).collect()
}

// ====================================================================
// Structures on cells and points
// ====================================================================

pub struct TriangleCells {
    pub degeneracy: bool,
}

impl WeakAssocBimodule for TriangleCells {
    type Elem = PlanarTree;
    fn arity(&self, x: &PlanarTree) -> usize {
        x.leaf_count()
    }
    fn left(&self, k: usize, i: usize, x: &PlanarTree) -> Result<PlanarTree, ActionError> {
        points::check_slot(i, k)?;
        graft(&Corolla::new(k).tree(), i, x).map_err(|_| ActionError::Slot { slot: i, arity: k })
    }
    fn right(&self, x: &PlanarTree, i: usize, k: usize) -> Result<PlanarTree, ActionError> {
        points::check_slot(i, x.leaf_count())?;
        if k == 0 {
            if !self.degeneracy {
                return Err(ActionError::Degeneracy);
            }
            let f = SimplexFace::from_tree(x).ok_or(ActionError::Inputs { expected: 0, got: 0 })?;
            return Ok(f.forget(i).to_tree());
        }
        graft(x, i, &Corolla::new(k).tree()).map_err(|_| ActionError::Slot { slot: i, arity: x.leaf_count() })
    }
    fn degeneracy(&self) -> bool {
        self.degeneracy
    }
}

pub struct TrianglePoints {
    pub degeneracy: bool,
}

impl WeakAssocBimodule for TrianglePoints {
    type Elem = SimplexPoint;
    fn arity(&self, x: &SimplexPoint) -> usize {
        x.arity()
    }
    fn left(&self, k: usize, i: usize, x: &SimplexPoint) -> Result<SimplexPoint, ActionError> {
        simplex_left(k, i, x)
    }
    fn right(&self, x: &SimplexPoint, i: usize, k: usize) -> Result<SimplexPoint, ActionError> {
        simplex_right(x, i, k, self.degeneracy)
    }
    fn degeneracy(&self) -> bool {
        self.degeneracy
    }
}

/// Test fixture: a simplex point carrying a weight that the right action
/// bumps whenever it multiplies an interior point by `a_k`, `k ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedPoint {
    pub point: SimplexPoint,
    pub weight: u32,
}

impl fmt::Display for WeightedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.point, self.weight)
    }
}

pub struct CorruptedTriangle;

impl WeakAssocBimodule for CorruptedTriangle {
    type Elem = WeightedPoint;
    fn arity(&self, x: &WeightedPoint) -> usize {
        x.point.arity()
    }
    fn left(&self, k: usize, i: usize, x: &WeightedPoint) -> Result<WeightedPoint, ActionError> {
        Ok(WeightedPoint { point: simplex_left(k, i, &x.point)?, weight: x.weight })
    }
    fn right(&self, x: &WeightedPoint, i: usize, k: usize) -> Result<WeightedPoint, ActionError> {
        let point = simplex_right(&x.point, i, k, false)?;
        let t = &x.point.0[i - 1];
        let interior = crate::rational::in_unit(t) && *t != crate::rational::zero() && *t != crate::rational::one();
        let weight = x.weight + u32::from(interior && k >= 2);
        Ok(WeightedPoint { point, weight })
    }
    fn degeneracy(&self) -> bool {
        false
    }
}

/// Element of the cube model at the cell level: a face tree or **1**.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CubeCell {
    Unit,
    Tree(PlanarTree),
}

impl fmt::Display for CubeCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CubeCell::Unit => f.write_str("1"),
            CubeCell::Tree(t) => write!(f, "{t}"),
        }
    }
}

impl CubeCell {
    pub fn from_face(face: &CubeFace) -> CubeCell {
        match face.to_tree() {
            None => CubeCell::Unit,
            Some(t) => CubeCell::Tree(t),
        }
    }
}

pub struct SquareCells {
    pub variant: CubeVariant,
}

impl AssocBimodule for SquareCells {
    type Elem = CubeCell;
    fn arity(&self, x: &CubeCell) -> usize {
        match x {
            CubeCell::Unit => 0,
            CubeCell::Tree(t) => t.leaf_count(),
        }
    }
    fn left(&self, xs: &[CubeCell]) -> Result<CubeCell, ActionError> {
        if (xs.is_empty() || xs.contains(&CubeCell::Unit)) && !self.variant.has_unit() {
            return Err(ActionError::NoUnit);
        }
        let trees: Vec<&PlanarTree> = xs
            .iter()
            .filter_map(|x| match x {
                CubeCell::Tree(t) => Some(t),
                CubeCell::Unit => None,
            })
            .collect();
        match trees.len() {
            0 => Ok(CubeCell::Unit),
            1 => Ok(CubeCell::Tree(trees[0].clone())),
            m => {
                let mut host = Corolla::new(m).tree();
                for s in (1..=m).rev() {
                    host = graft(&host, s, trees[s - 1]).expect("slot within corolla");
                }
                Ok(CubeCell::Tree(host))
            }
        }
    }
    fn right(&self, x: &CubeCell, i: usize, k: usize) -> Result<CubeCell, ActionError> {
        let CubeCell::Tree(t) = x else { return Err(ActionError::Slot { slot: i, arity: 0 }) };
        points::check_slot(i, t.leaf_count())?;
        if k == 0 {
            if self.variant != CubeVariant::Full {
                return Err(ActionError::Degeneracy);
            }
            let face = CubeFace::from_tree(t).ok_or(ActionError::Inputs { expected: 0, got: 0 })?;
            return Ok(CubeCell::from_face(&cube_face_forget(&face, i)));
        }
        Ok(CubeCell::Tree(graft(t, i, &Corolla::new(k).tree()).expect("slot checked")))
    }
    fn unit(&self) -> Option<CubeCell> {
        self.variant.has_unit().then_some(CubeCell::Unit)
    }
    fn degeneracy(&self) -> bool {
        self.variant == CubeVariant::Full
    }
}

/// Cell containing the image of a face's interior when point `i` is
/// forgotten: the two adjacent gap states merge by `max` (0 < free < 1).
pub fn cube_face_forget(face: &CubeFace, i: usize) -> CubeFace {
    let n = face.arity;
    let mut gaps = face.gaps.clone();
    if n == 1 {
    } else if i == 1 {
        gaps.remove(0);
    } else if i == n {
        gaps.pop();
    } else {
        let b = gaps.remove(i - 1);
        gaps[i - 2] = gaps[i - 2].max(b);
    }
    CubeFace { arity: n - 1, gaps }
}

pub struct SquarePoints {
    pub variant: CubeVariant,
}

impl AssocBimodule for SquarePoints {
    type Elem = CubePoint;
    fn arity(&self, x: &CubePoint) -> usize {
        x.arity
    }
    fn left(&self, xs: &[CubePoint]) -> Result<CubePoint, ActionError> {
        cube_left(xs, self.variant)
    }
    fn right(&self, x: &CubePoint, i: usize, k: usize) -> Result<CubePoint, ActionError> {
        cube_right(x, i, k, self.variant)
    }
    fn unit(&self) -> Option<CubePoint> {
        self.variant.has_unit().then(CubePoint::unit)
    }
    fn degeneracy(&self) -> bool {
        self.variant == CubeVariant::Full
    }
}

pub struct PentagonTrees;

impl NonSigmaOperad for PentagonTrees {
    type Elem = PlanarTree;
    fn arity(&self, x: &PlanarTree) -> usize {
        x.leaf_count()
    }
    fn compose(&self, x: &PlanarTree, i: usize, y: &PlanarTree) -> Result<PlanarTree, ActionError> {
        graft(x, i, y).map_err(|_| ActionError::Slot { slot: i, arity: x.leaf_count() })
    }
    fn identity(&self) -> PlanarTree {
        Corolla::new(1).tree()
    }
}

// ====================================================================
// Reports
// ====================================================================

pub fn random_simplex_points(rng: &mut ChaCha8Rng, count: usize, max_arity: usize) -> Vec<SimplexPoint> {
    (0..count)
        .map(|_| {
            let n = rng.gen_range(0..=max_arity);
            SimplexPoint(random_monotone(rng, n, SAMPLE_DENOMINATOR))
        })
        .collect()
}

pub fn random_cube_points(rng: &mut ChaCha8Rng, count: usize, max_arity: usize, unit: bool) -> Vec<CubePoint> {
    (0..count)
        .map(|_| {
            let n = rng.gen_range(if unit { 0 } else { 1 }..=max_arity);
            if n == 0 {
                CubePoint::unit()
            } else {
                CubePoint::new(
                    (0..n - 1).map(|_| crate::rational::random_unit(rng, SAMPLE_DENOMINATOR)).collect(),
                )
            }
        })
        .collect()
}

fn cube_cells(upto: usize, unit: bool) -> Vec<CubeCell> {
    let mut v: Vec<CubeCell> = (1..=upto).flat_map(CubeFace::all).map(|f| CubeCell::from_face(&f)).collect();
    if unit {
        v.insert(0, CubeCell::Unit);
    }
    v
}

/// Instantiates the laws of `model` on every face tree of degree ≤ `bound`
/// and on `samples` seeded random points.
pub fn check_axioms(model: ModelId, bound: usize, samples: usize, seed: u64) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let name = format!("{}:{:?}", model.model, model.structure);
    let mut report = AxiomReport::new(name, seed);
    match model.model {
        Model::Triangle => {
            let degeneracy = model.structure == Structure::WeakBimodule;
            let cells: Vec<PlanarTree> = (0..=bound).flat_map(SimplexFace::all).map(|f| f.to_tree()).collect();
            report.extend("cell", axioms::check_weak_bimodule(&TriangleCells { degeneracy }, &cells, bound));
            let pts = random_simplex_points(&mut rng, samples, bound);
            report.extend("point", axioms::check_weak_bimodule(&TrianglePoints { degeneracy }, &pts, bound));
        }
        Model::Square | Model::SquareWithUnit => {
            let variant = model.cube_variant();
            let unit = variant.has_unit();
            let cells = cube_cells(bound, unit);
            report.extend("cell", axioms::check_bimodule(&SquareCells { variant }, &cells, bound));
            let pts = random_cube_points(&mut rng, samples, bound, unit);
            report.extend("point", axioms::check_bimodule(&SquarePoints { variant }, &pts, bound));
            if unit {
                report.extend("cell", axioms::check_unit_law(&SquareCells { variant }, &cells));
                report.extend("point", axioms::check_unit_law(&SquarePoints { variant }, &pts));
            }
        }
        Model::Pentagon => {
            let cells: Vec<PlanarTree> = (1..=bound).flat_map(assoc_faces).collect();
            report.extend("cell", axioms::check_operad(&PentagonTrees, &cells, bound));
        }
    }
    report
}

/// The unit law of the cube model with **1** on all cells of degree ≤ 5
/// and 100 random points per degree.
pub fn unit_check(variant: CubeVariant, seed: u64) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport::new(format!("square:{variant:?}"), seed);
    let cells = cube_cells(5, variant.has_unit());
    report.extend("cell", axioms::check_unit_law(&SquareCells { variant }, &cells));
    let mut pts = Vec::new();
    for n in 0..=5usize {
        for _ in 0..100 {
            pts.push(if n == 0 {
                CubePoint::unit()
            } else {
                CubePoint::new((0..n - 1).map(|_| crate::rational::random_unit(&mut rng, SAMPLE_DENOMINATOR)).collect())
            });
        }
    }
    report.extend("point", axioms::check_unit_law(&SquarePoints { variant }, &pts));
    report
}

/// The corrupted right action used as a negative control.
pub fn check_corrupted_triangle(bound: usize, samples: usize, seed: u64) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<WeightedPoint> = random_simplex_points(&mut rng, samples, bound)
        .into_iter()
        .map(|point| WeightedPoint { point, weight: 0 })
        .collect();
    let mut report = AxiomReport::new("corrupted-triangle", seed);
    report.extend("point", axioms::check_weak_bimodule(&CorruptedTriangle, &pts, bound));
    report
}
