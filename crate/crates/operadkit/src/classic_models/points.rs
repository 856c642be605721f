//! Coordinates of the simplex and cube models and their actions.

use super::faces::{CubeFace, Gap, SimplexFace};
use crate::rational::{fmt_q, in_unit, one, random_open_unit, zero, Q};
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("slot {slot} out of range 1..={arity}")]
    Slot { slot: usize, arity: usize },
    #[error("the zero-ary operation does not act on this variant")]
    Degeneracy,
    #[error("wrong number of inputs: expected {expected}, got {got}")]
    Inputs { expected: usize, got: usize },
    #[error("unit element is not available in this variant")]
    NoUnit,
}

pub fn check_slot(slot: usize, arity: usize) -> Result<(), ActionError> {
    if slot == 0 || slot > arity {
        Err(ActionError::Slot { slot, arity })
    } else {
        Ok(())
    }
}

/// Monotone configuration `0 ≤ t₁ ≤ … ≤ tₙ ≤ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SimplexPoint(#[serde(with = "crate::rational::serde_q_vec")] pub Vec<Q>);

impl SimplexPoint {
    pub fn is_valid(&self) -> bool {
        self.0.iter().all(in_unit) && self.0.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn face(&self) -> SimplexFace {
        let left = self.0.iter().take_while(|t| t.is_zero()).count();
        let right = self.0.iter().rev().take_while(|t| t.is_one()).count();
        let mut groups: Vec<usize> = Vec::new();
        let mut prev: Option<&Q> = None;
        for t in &self.0[left..self.0.len() - right] {
            if prev == Some(t) {
                *groups.last_mut().unwrap() += 1;
            } else {
                groups.push(1);
            }
            prev = Some(t);
        }
        SimplexFace { left, groups, right }
    }

    pub fn random_in<R: Rng + ?Sized>(face: &SimplexFace, rng: &mut R, den: i64) -> SimplexPoint {
        let mut vals: Vec<Q> = Vec::new();
        while vals.len() < face.groups.len() {
            let v = random_open_unit(rng, den);
            if !vals.contains(&v) {
                vals.push(v);
            }
        }
        vals.sort();
        let mut t = vec![zero(); face.left];
        for (v, &g) in vals.iter().zip(&face.groups) {
            t.extend(std::iter::repeat(v.clone()).take(g));
        }
        t.extend(std::iter::repeat(one()).take(face.right));
        SimplexPoint(t)
    }
}

impl fmt::Display for SimplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", crate::rational::Coords(&self.0))
    }
}

/// `a_k ∘_i x`: pads with `i−1` zeros on the left and `k−i` ones on the right.
pub fn simplex_left(k: usize, i: usize, x: &SimplexPoint) -> Result<SimplexPoint, ActionError> {
    check_slot(i, k)?;
    let mut t = vec![zero(); i - 1];
    t.extend(x.0.iter().cloned());
    t.extend(std::iter::repeat(one()).take(k - i));
    Ok(SimplexPoint(t))
}

/// `x ∘_i a_k`: repeats `t_i` k times; `k = 0` forgets `t_i`.
pub fn simplex_right(x: &SimplexPoint, i: usize, k: usize, degeneracy: bool) -> Result<SimplexPoint, ActionError> {
    check_slot(i, x.arity())?;
    if k == 0 && !degeneracy {
        return Err(ActionError::Degeneracy);
    }
    let mut t = x.0[..i - 1].to_vec();
    t.extend(std::iter::repeat(x.0[i - 1].clone()).take(k));
    t.extend_from_slice(&x.0[i..]);
    Ok(SimplexPoint(t))
}

pub fn act_simplex(
    side: Side,
    op: crate::tree_core::Corolla,
    slot: usize,
    x: &SimplexPoint,
    degeneracy: bool,
) -> Result<SimplexPoint, ActionError> {
    match side {
        Side::Left => simplex_left(op.arity, slot, x),
        Side::Right => simplex_right(x, slot, op.arity, degeneracy),
    }
}

/// Which cube bimodule: over Assoc₍>0₎ on both sides, with the unit **1**
/// in degree 0, or additionally with the right degeneracy `∘ᵢ a₀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CubeVariant {
    Positive,
    WithUnit,
    Full,
}

impl CubeVariant {
    pub fn has_unit(self) -> bool {
        self != CubeVariant::Positive
    }
}

/// Point of □(n): the `n−1` distances between consecutive points. Arity 0 is **1**.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CubePoint {
    pub arity: usize,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub gaps: Vec<Q>,
}

impl CubePoint {
    pub fn unit() -> CubePoint {
        CubePoint { arity: 0, gaps: Vec::new() }
    }

    pub fn new(gaps: Vec<Q>) -> CubePoint {
        CubePoint { arity: gaps.len() + 1, gaps }
    }

    pub fn is_valid(&self) -> bool {
        self.gaps.iter().all(in_unit) && self.gaps.len() + 1 == self.arity.max(1) && (self.arity > 0 || self.gaps.is_empty())
    }

    pub fn face(&self) -> CubeFace {
        let gaps = self
            .gaps
            .iter()
            .map(|d| {
                if d.is_zero() {
                    Gap::Zero
                } else if d.is_one() {
                    Gap::One
                } else {
                    Gap::Free
                }
            })
            .collect();
        CubeFace { arity: self.arity, gaps }
    }

    pub fn random_in<R: Rng + ?Sized>(face: &CubeFace, rng: &mut R, den: i64) -> CubePoint {
        let gaps = face
            .gaps
            .iter()
            .map(|g| match g {
                Gap::Zero => zero(),
                Gap::One => one(),
                Gap::Free => random_open_unit(rng, den),
            })
            .collect();
        CubePoint { arity: face.arity, gaps }
    }
}

impl fmt::Display for CubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arity == 0 {
            f.write_str("1")
        } else {
            write!(f, "[{}]", self.gaps.iter().map(fmt_q).collect::<Vec<_>>().join(", "))
        }
    }
}

/// `a_k(x₁,…,x_k)`: concatenation at distance 1; units disappear.
pub fn cube_left(xs: &[CubePoint], variant: CubeVariant) -> Result<CubePoint, ActionError> {
    if xs.is_empty() || xs.iter().any(|x| x.arity == 0) {
        if !variant.has_unit() {
            return Err(ActionError::NoUnit);
        }
    }
    let mut arity = 0;
    let mut gaps = Vec::new();
    for x in xs.iter().filter(|x| x.arity > 0) {
        if arity > 0 {
            gaps.push(one());
        }
        gaps.extend(x.gaps.iter().cloned());
        arity += x.arity;
    }
    Ok(CubePoint { arity, gaps })
}

/// `x ∘_i a_k`: doubling inserts `k−1` zero gaps; `k = 0` forgets point `i`,
/// merging its two gaps by `max`.
pub fn cube_right(x: &CubePoint, i: usize, k: usize, variant: CubeVariant) -> Result<CubePoint, ActionError> {
    check_slot(i, x.arity)?;
    if k == 0 {
        if variant != CubeVariant::Full {
            return Err(ActionError::Degeneracy);
        }
        let n = x.arity;
        let mut gaps = x.gaps.clone();
        if n == 1 {
        } else if i == 1 {
            gaps.remove(0);
        } else if i == n {
            gaps.pop();
        } else {
            let b = gaps.remove(i - 1);
            if b > gaps[i - 2] {
                gaps[i - 2] = b;
            }
        }
        return Ok(CubePoint { arity: n - 1, gaps });
    }
    let mut gaps = x.gaps[..i - 1].to_vec();
    gaps.extend(std::iter::repeat(zero()).take(k - 1));
    gaps.extend_from_slice(&x.gaps[i - 1..]);
    Ok(CubePoint { arity: x.arity + k - 1, gaps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn simplex_examples() {
        let x = SimplexPoint(vec![q(1, 2)]);
        assert_eq!(simplex_left(3, 2, &x).unwrap().0, vec![zero(), q(1, 2), one()]);
        let y = SimplexPoint(vec![q(1, 3), q(2, 3)]);
        assert_eq!(simplex_right(&y, 1, 2, false).unwrap().0, vec![q(1, 3), q(1, 3), q(2, 3)]);
        assert_eq!(simplex_right(&x, 1, 1, false).unwrap(), x);
    }

    #[test]
    fn cube_examples() {
        let a = CubePoint::new(vec![q(1, 5)]);
        let b = CubePoint::new(vec![q(2, 5)]);
        assert_eq!(cube_left(&[a, b], CubeVariant::Positive).unwrap().gaps, vec![q(1, 5), one(), q(2, 5)]);
        let c = CubePoint::new(vec![q(1, 4), q(3, 4)]);
        assert_eq!(cube_right(&c, 2, 0, CubeVariant::Full).unwrap().gaps, vec![q(3, 4)]);
        assert_eq!(cube_right(&c, 1, 0, CubeVariant::Full).unwrap().gaps, vec![q(3, 4)]);
        assert_eq!(cube_right(&c, 2, 0, CubeVariant::WithUnit), Err(ActionError::Degeneracy));
    }
}
