//! Hairy configurations: labeled points together with hairs of length in
//! (0,1], on the unit interval (△̃) and on the line modulo translation (□̃).

use super::TildeError;
use crate::classic_models::axioms::{AssocBimodule, WeakAssocBimodule};
use crate::classic_models::points::{check_slot, ActionError};
use crate::rational::{fmt_q, in_unit, one, parse_q, random_open_unit, random_unit, zero, Q};
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt;

#[derive(Serialize, Deserialize)]
struct ConfigJson {
    points: Vec<String>,
    hairs: Vec<(String, String)>,
}

fn parse_all(xs: &[String]) -> Result<Vec<Q>, TildeError> {
    xs.iter().map(|s| parse_q(s).map_err(|e| TildeError::Json(e.to_string()))).collect()
}

// ====================================================================
// △̃
// ====================================================================

/// Point of △̃(n): `n` labeled points in [0,1] and hairs `(position, length)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HairyConfig {
    pub points: Vec<Q>,
    pub hairs: Vec<(Q, Q)>,
}

impl HairyConfig {
    pub fn new(points: Vec<Q>, hairs: Vec<(Q, Q)>) -> HairyConfig {
        HairyConfig { points, hairs }
    }

    pub fn arity(&self) -> usize {
        self.points.len()
    }

    fn validate(&self) -> Result<(), TildeError> {
        for p in &self.points {
            if !in_unit(p) {
                return Err(TildeError::Domain(format!("labeled point {} outside [0,1]", fmt_q(p))));
            }
        }
        for (p, l) in &self.hairs {
            if !in_unit(p) {
                return Err(TildeError::Domain(format!("hair at {} outside [0,1]", fmt_q(p))));
            }
            if !in_unit(l) {
                return Err(TildeError::Domain(format!("hair length {} outside [0,1]", fmt_q(l))));
            }
        }
        Ok(())
    }

    /// Indices of hairs that a single local rule may remove.
    pub fn removable_hairs(&self) -> Vec<usize> {
        let h = &self.hairs;
        (0..h.len())
            .filter(|&i| {
                let (p, l) = &h[i];
                l.is_zero()
                    || p.is_zero()
                    || p.is_one()
                    || self.points.contains(p)
                    || (0..h.len()).any(|j| j != i && h[j].0 == *p && (h[j].1 > *l || (h[j].1 == *l && j < i)))
            })
            .collect()
    }

    /// All configurations reachable by one local rule.
    pub fn local_moves(&self) -> Vec<HairyConfig> {
        self.removable_hairs()
            .into_iter()
            .map(|i| {
                let mut c = self.clone();
                c.hairs.remove(i);
                c
            })
            .collect()
    }

    fn canonical(mut self) -> HairyConfig {
        self.points.sort();
        self.hairs.sort();
        self
    }

    fn normalized(self) -> HairyConfig {
        let mut c = self;
        while let Some(&i) = c.removable_hairs().first() {
            c.hairs.remove(i);
        }
        c.canonical()
    }

    /// Number of geometrically distinct interior sites.
    pub fn stage(&self) -> usize {
        let mut sites: Vec<&Q> = self.points.iter().filter(|p| !p.is_zero() && !p.is_one()).collect();
        sites.extend(self.hairs.iter().map(|(p, _)| p));
        sites.sort();
        sites.dedup();
        sites.len()
    }

    /// `a_k ∘_i x`
    pub fn left(&self, k: usize, i: usize) -> Result<HairyConfig, ActionError> {
        check_slot(i, k)?;
        let mut points = vec![zero(); i - 1];
        points.extend(self.points.iter().cloned());
        points.extend(std::iter::repeat(one()).take(k - i));
        Ok(HairyConfig { points, hairs: self.hairs.clone() })
    }

    /// `x ∘_i a_k`; `a₀` turns an isolated interior point into a hair of
    /// length 1 and forgets any other point.
    pub fn right(&self, i: usize, k: usize) -> Result<HairyConfig, ActionError> {
        check_slot(i, self.arity())?;
        let mut c = self.clone();
        let p = c.points.remove(i - 1);
        if k == 0 {
            if !p.is_zero() && !p.is_one() && !c.points.contains(&p) {
                c.hairs.push((p, one()));
            }
        } else {
            for _ in 0..k {
                c.points.insert(i - 1, p.clone());
            }
        }
        Ok(c.normalized())
    }

    pub fn to_json(&self) -> Value {
        let j = ConfigJson {
            points: self.points.iter().map(fmt_q).collect(),
            hairs: self.hairs.iter().map(|(p, l)| (fmt_q(p), fmt_q(l))).collect(),
        };
        serde_json::to_value(j).expect("config serialization")
    }

    /// Parses and normalizes.
    pub fn from_json(v: &Value) -> Result<HairyConfig, TildeError> {
        let j: ConfigJson = serde_json::from_value(v.clone()).map_err(|e| TildeError::Json(e.to_string()))?;
        let points = parse_all(&j.points)?;
        let mut hairs = Vec::new();
        for (p, l) in &j.hairs {
            hairs.push((parse_all(std::slice::from_ref(p))?.remove(0), parse_all(std::slice::from_ref(l))?.remove(0)));
        }
        normalize_hairy(HairyConfig { points, hairs })
    }

    /// Random normalized configuration with `n` points.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, max_hairs: usize, den: i64) -> HairyConfig {
        let mut points: Vec<Q> = (0..n).map(|_| random_unit(rng, den)).collect();
        points.sort();
        let hairs = (0..rng.gen_range(0..=max_hairs))
            .map(|_| (random_open_unit(rng, den), random_unit(rng, den)))
            .collect();
        HairyConfig { points, hairs }.normalized()
    }
}

/// Removes length-0 hairs, hairs at an endpoint or a labeled point, and
/// all but the longest of coinciding hairs.
pub fn normalize_hairy(c: HairyConfig) -> Result<HairyConfig, TildeError> {
    c.validate()?;
    Ok(c.normalized())
}

impl fmt::Display for HairyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_q(p))?;
        }
        write!(f, " |")?;
        for (p, l) in &self.hairs {
            write!(f, " {}^{}", fmt_q(p), fmt_q(l))?;
        }
        write!(f, "]")
    }
}

/// The weak bimodule △̃ over Assoc.
pub struct TriangleTilde;

impl WeakAssocBimodule for TriangleTilde {
    type Elem = HairyConfig;

    fn arity(&self, x: &HairyConfig) -> usize {
        x.arity()
    }

    fn left(&self, k: usize, i: usize, x: &HairyConfig) -> Result<HairyConfig, ActionError> {
        x.left(k, i)
    }

    fn right(&self, x: &HairyConfig, i: usize, k: usize) -> Result<HairyConfig, ActionError> {
        x.right(i, k)
    }

    fn degeneracy(&self) -> bool {
        true
    }
}

// ====================================================================
// □̃
// ====================================================================

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    Point,
    Hair(Q),
}

/// Point of □̃(n): sites in order along the line with the gaps between
/// consecutive ones; the empty configuration is the unit **1**.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HairyLine {
    pub sites: Vec<Site>,
    pub gaps: Vec<Q>,
}

impl HairyLine {
    pub fn unit() -> HairyLine {
        HairyLine { sites: Vec::new(), gaps: Vec::new() }
    }

    pub fn new(sites: Vec<Site>, gaps: Vec<Q>) -> Result<HairyLine, TildeError> {
        if gaps.len() + 1 != sites.len().max(1) {
            return Err(TildeError::Domain(format!("{} sites need {} gaps", sites.len(), sites.len().saturating_sub(1))));
        }
        for g in &gaps {
            if !in_unit(g) {
                return Err(TildeError::Domain(format!("gap {} outside [0,1]", fmt_q(g))));
            }
        }
        for s in &sites {
            if let Site::Hair(l) = s {
                if !in_unit(l) {
                    return Err(TildeError::Domain(format!("hair length {} outside [0,1]", fmt_q(l))));
                }
            }
        }
        Ok(HairyLine { sites, gaps })
    }

    pub fn arity(&self) -> usize {
        self.sites.iter().filter(|s| **s == Site::Point).count()
    }

    pub fn hair_count(&self) -> usize {
        self.sites.len() - self.arity()
    }

    fn site_index_of_point(&self, i: usize) -> usize {
        self.sites.iter().enumerate().filter(|(_, s)| **s == Site::Point).nth(i - 1).map(|(j, _)| j).unwrap()
    }

    fn hair_dominated(&self, s: usize, nb: usize) -> bool {
        let Site::Hair(l) = &self.sites[s] else { return false };
        match &self.sites[nb] {
            Site::Point => true,
            Site::Hair(m) => m > l || (m == l && nb < s),
        }
    }

    /// Sites that a single local rule may remove.
    pub fn removable_sites(&self) -> Vec<usize> {
        (0..self.sites.len())
            .filter(|&s| match &self.sites[s] {
                Site::Point => false,
                Site::Hair(l) => {
                    l.is_zero()
                        || (s > 0 && self.gaps[s - 1].is_zero() && self.hair_dominated(s, s - 1))
                        || (s + 1 < self.sites.len() && self.gaps[s].is_zero() && self.hair_dominated(s, s + 1))
                }
            })
            .collect()
    }

    /// Deletes site `s`; its two gaps merge into their maximum.
    pub fn remove_site(&mut self, s: usize) {
        self.sites.remove(s);
        if self.gaps.is_empty() {
            return;
        }
        if s == 0 {
            self.gaps.remove(0);
        } else if s == self.gaps.len() {
            self.gaps.pop();
        } else {
            let b = self.gaps.remove(s);
            if b > self.gaps[s - 1] {
                self.gaps[s - 1] = b;
            }
        }
    }

    pub fn local_moves(&self) -> Vec<HairyLine> {
        self.removable_sites()
            .into_iter()
            .map(|s| {
                let mut c = self.clone();
                c.remove_site(s);
                c
            })
            .collect()
    }

    pub fn normalized(mut self) -> HairyLine {
        while let Some(&s) = self.removable_sites().first() {
            self.remove_site(s);
        }
        self
    }

    /// Number of geometrically distinct sites.
    pub fn stage(&self) -> usize {
        if self.sites.is_empty() {
            return 0;
        }
        1 + self.gaps.iter().filter(|g| !g.is_zero()).count()
    }

    /// `a_k(x₁,…,x_k)`: concatenation at distance 1.
    pub fn concat(xs: &[HairyLine]) -> HairyLine {
        let mut out = HairyLine::unit();
        for x in xs.iter().filter(|x| !x.sites.is_empty()) {
            if !out.sites.is_empty() {
                out.gaps.push(one());
            }
            out.sites.extend(x.sites.iter().cloned());
            out.gaps.extend(x.gaps.iter().cloned());
        }
        out
    }

    /// `x ∘_i a_k`; `a₀` turns the point into a hair of length 1.
    pub fn right(&self, i: usize, k: usize) -> Result<HairyLine, ActionError> {
        check_slot(i, self.arity())?;
        let s = self.site_index_of_point(i);
        let mut c = self.clone();
        if k == 0 {
            c.sites[s] = Site::Hair(one());
        } else {
            for _ in 1..k {
                c.sites.insert(s, Site::Point);
                c.gaps.insert(s, zero());
            }
        }
        Ok(c.normalized())
    }

    /// Absolute positions with the first site at 0.
    pub fn positions(&self) -> Vec<Q> {
        let mut out = Vec::with_capacity(self.sites.len());
        let mut x = zero();
        for (s, _) in self.sites.iter().enumerate() {
            if s > 0 {
                x += &self.gaps[s - 1];
            }
            out.push(x.clone());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let pos = self.positions();
        let mut points = Vec::new();
        let mut hairs = Vec::new();
        for (s, site) in self.sites.iter().enumerate() {
            match site {
                Site::Point => points.push(fmt_q(&pos[s])),
                Site::Hair(l) => hairs.push((fmt_q(&pos[s]), fmt_q(l))),
            }
        }
        serde_json::to_value(ConfigJson { points, hairs }).expect("config serialization")
    }

    /// Parses absolute positions (any translate), sorts sites with points
    /// before hairs at equal positions, and normalizes.
    pub fn from_json(v: &Value) -> Result<HairyLine, TildeError> {
        let j: ConfigJson = serde_json::from_value(v.clone()).map_err(|e| TildeError::Json(e.to_string()))?;
        let mut all: Vec<(Q, Site)> = parse_all(&j.points)?.into_iter().map(|p| (p, Site::Point)).collect();
        for (p, l) in &j.hairs {
            let p = parse_q(p).map_err(|e| TildeError::Json(e.to_string()))?;
            let l = parse_q(l).map_err(|e| TildeError::Json(e.to_string()))?;
            all.push((p, Site::Hair(l)));
        }
        all.sort();
        let gaps = all.windows(2).map(|w| &w[1].0 - &w[0].0).collect();
        let sites = all.into_iter().map(|(_, s)| s).collect();
        Ok(HairyLine::new(sites, gaps)?.normalized())
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, max_hairs: usize, den: i64) -> HairyLine {
        let mut sites = vec![Site::Point; n];
        for _ in 0..rng.gen_range(0..=max_hairs) {
            let at = rng.gen_range(0..=sites.len());
            sites.insert(at, Site::Hair(random_unit(rng, den)));
        }
        let gaps = (1..sites.len()).map(|_| random_unit(rng, den)).collect();
        HairyLine { sites, gaps }.normalized()
    }
}

impl fmt::Display for HairyLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sites.is_empty() {
            return write!(f, "1");
        }
        for (s, site) in self.sites.iter().enumerate() {
            if s > 0 {
                write!(f, " -{}- ", fmt_q(&self.gaps[s - 1]))?;
            }
            match site {
                Site::Point => write!(f, "*")?,
                Site::Hair(l) => write!(f, "h{}", fmt_q(l))?,
            }
        }
        Ok(())
    }
}

/// The bimodule □̃ over Assoc with unit **1**.
pub struct SquareTilde;

impl AssocBimodule for SquareTilde {
    type Elem = HairyLine;

    fn arity(&self, x: &HairyLine) -> usize {
        x.arity()
    }

    fn left(&self, xs: &[HairyLine]) -> Result<HairyLine, ActionError> {
        Ok(HairyLine::concat(xs))
    }

    fn right(&self, x: &HairyLine, i: usize, k: usize) -> Result<HairyLine, ActionError> {
        x.right(i, k)
    }

    fn unit(&self) -> Option<HairyLine> {
        Some(HairyLine::unit())
    }

    fn degeneracy(&self) -> bool {
        true
    }
}
