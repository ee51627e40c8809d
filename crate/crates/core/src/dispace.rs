//! Box-complement models: a box on the integer grid minus open boxes.
//!
//! A hole is open relative to its reference box: a hole face lying on a
//! face of the reference box removes that face as well. This lets models
//! built from several glued rectangles be written as one box with holes.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DispaceError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("hole {0} is empty or lies outside the bounds")]
    HoleOutsideBounds(usize),
    #[error("subspace not contained in the parent: {0}")]
    SubspaceNotContained(String),
    #[error("point {0:?} is not an allowed grid vertex")]
    BadPoint(String),
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
}

/// Open axis-aligned box with integer corners.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hole {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

/// Allowed region: a closed box minus holes, each hole open relative to
/// its own reference box. All coordinates are grid units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    holes: Vec<(Hole, Vec<i64>, Vec<i64>)>,
}

impl Region {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Whether the point `p2 / 2` is allowed.
    pub fn allowed_doubled(&self, p2: &[i64]) -> bool {
        for i in 0..self.dim() {
            if p2[i] < 2 * self.lo[i] || p2[i] > 2 * self.hi[i] {
                return false;
            }
        }
        !self.holes.iter().any(|(h, rlo, rhi)| {
            (0..p2.len()).all(|i| {
                let (a, b) = (2 * h.lo[i], 2 * h.hi[i]);
                let above = if h.lo[i] == rlo[i] {
                    p2[i] >= a
                } else {
                    p2[i] > a
                };
                let below = if h.hi[i] == rhi[i] {
                    p2[i] <= b
                } else {
                    p2[i] < b
                };
                above && below
            })
        })
    }

    pub fn vertex_allowed(&self, v: &[i64]) -> bool {
        let p2: Vec<i64> = v.iter().map(|&c| 2 * c).collect();
        self.allowed_doubled(&p2)
    }

    /// The closed unit cube at `v` spanned by `axes` is allowed iff its
    /// centre is: holes have grid corners, so a face meets a hole only if
    /// the centre does.
    pub fn cell_allowed(&self, v: &[i64], axes: &[usize]) -> bool {
        let mut p2: Vec<i64> = v.iter().map(|&c| 2 * c).collect();
        for &a in axes {
            p2[a] += 1;
        }
        self.allowed_doubled(&p2)
    }

    /// All allowed vertices in lexicographic order.
    pub fn vertices(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut v = self.lo.clone();
        if self.lo.iter().zip(&self.hi).any(|(a, b)| a > b) {
            return out;
        }
        loop {
            if self.vertex_allowed(&v) {
                out.push(v.clone());
            }
            let mut k = self.dim();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if v[k] < self.hi[k] {
                    v[k] += 1;
                    v[k + 1..].copy_from_slice(&self.lo[k + 1..]);
                    break;
                }
            }
        }
    }

    /// Whether any unit edge is allowed.
    pub fn has_edge(&self) -> bool {
        self.vertices()
            .iter()
            .any(|v| (0..self.dim()).any(|i| v[i] < self.hi[i] && self.cell_allowed(v, &[i])))
    }
}

/// `[0, bounds]` minus open holes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoxComplement {
    bounds: Vec<i64>,
    holes: Vec<Hole>,
}

impl BoxComplement {
    /// Holes are kept sorted, so equal hole sets give equal values.
    pub fn new(bounds: Vec<i64>, mut holes: Vec<Hole>) -> Result<Self, DispaceError> {
        if bounds.is_empty() {
            return Err(DispaceError::Dimension(
                "dimension must be at least 1".into(),
            ));
        }
        if bounds.iter().any(|&b| b < 0) {
            return Err(DispaceError::Malformed("negative extent".into()));
        }
        for (k, h) in holes.iter().enumerate() {
            if h.lo.len() != bounds.len() || h.hi.len() != bounds.len() {
                return Err(DispaceError::Dimension(format!(
                    "hole {k} has wrong dimension"
                )));
            }
            let inside = (0..bounds.len())
                .all(|i| 0 <= h.lo[i] && h.lo[i] < h.hi[i] && h.hi[i] <= bounds[i]);
            if !inside {
                return Err(DispaceError::HoleOutsideBounds(k));
            }
        }
        holes.sort();
        holes.dedup();
        Ok(Self { bounds, holes })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[i64] {
        &self.bounds
    }

    pub fn holes(&self) -> &[Hole] {
        &self.holes
    }

    pub fn region(&self) -> Region {
        let lo = vec![0; self.dim()];
        Region {
            lo: lo.clone(),
            hi: self.bounds.clone(),
            holes: self
                .holes
                .iter()
                .map(|h| (h.clone(), lo.clone(), self.bounds.clone()))
                .collect(),
        }
    }

    /// Point reflection through the centre of the bounds.
    pub fn reverse(&self) -> BoxComplement {
        let holes = self
            .holes
            .iter()
            .map(|h| Hole {
                lo: (0..self.dim()).map(|i| self.bounds[i] - h.hi[i]).collect(),
                hi: (0..self.dim()).map(|i| self.bounds[i] - h.lo[i]).collect(),
            })
            .collect();
        BoxComplement::new(self.bounds.clone(), holes).expect("reflected holes stay inside")
    }

    pub fn reverse_vertex(&self, v: &[i64]) -> Vec<i64> {
        v.iter().zip(&self.bounds).map(|(&c, &b)| b - c).collect()
    }

    /// Scales every coordinate by `factor`.
    pub fn refine(&self, factor: i64) -> BoxComplement {
        let scale = |v: &Vec<i64>| v.iter().map(|&c| c * factor).collect();
        let holes = self
            .holes
            .iter()
            .map(|h| Hole {
                lo: scale(&h.lo),
                hi: scale(&h.hi),
            })
            .collect();
        BoxComplement::new(scale(&self.bounds), holes).expect("scaling keeps validity")
    }

    /// Same allowed set of points (compared on the half-integer lattice).
    pub fn same_region(&self, other: &BoxComplement) -> bool {
        self.bounds == other.bounds
            && self
                .differs_under(other, &(0..self.dim()).collect::<Vec<_>>())
                .is_none()
    }

    /// First half-integer point where `self` and `other` permuted by `perm`
    /// disagree, with `other`'s axis `i` read as `self`'s axis `perm[i]`.
    fn differs_under(&self, other: &BoxComplement, perm: &[usize]) -> Option<Vec<i64>> {
        let (a, b) = (self.region(), other.region());
        let ext: Vec<i64> = self.bounds.iter().map(|&x| 2 * x).collect();
        let mut p = vec![0i64; self.dim()];
        loop {
            let q: Vec<i64> = perm.iter().map(|&j| p[j]).collect();
            if a.allowed_doubled(&p) != b.allowed_doubled(&q) {
                return Some(p);
            }
            let mut k = self.dim();
            loop {
                if k == 0 {
                    return None;
                }
                k -= 1;
                if p[k] < ext[k] {
                    p[k] += 1;
                    for c in p.iter_mut().skip(k + 1) {
                        *c = 0;
                    }
                    break;
                }
            }
        }
    }

    /// An axis permutation carrying the model onto its reversal, if any.
    pub fn time_symmetry(&self) -> Option<Vec<usize>> {
        let rev = self.reverse();
        let mut perm: Vec<usize> = (0..self.dim()).collect();
        let mut found = None;
        permutations(&mut perm, 0, &mut |p| {
            let bounds_match = (0..p.len()).all(|i| rev.bounds[i] == self.bounds[p[i]]);
            if bounds_match && self.differs_under(&rev, p).is_none() {
                found = Some(p.to_vec());
                true
            } else {
                false
            }
        });
        found
    }

    /// Isomorphic to its reversal by a direction-preserving grid map.
    pub fn is_time_symmetric(&self) -> bool {
        self.time_symmetry().is_some()
    }

    /// No non-constant dipath exists, so the model equals its reversal as a
    /// set of directed paths.
    pub fn is_time_contractible(&self) -> bool {
        !self.region().has_edge()
    }
}

fn permutations(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return visit(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permutations(p, k + 1, visit) {
            p.swap(k, i);
            return true;
        }
        p.swap(k, i);
    }
    false
}

/// A sub-box of a parent model with additional holes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedSubspace {
    parent: BoxComplement,
    sub_lo: Vec<i64>,
    sub_hi: Vec<i64>,
    sub_holes: Vec<Hole>,
}

impl DirectedSubspace {
    pub fn new(
        parent: BoxComplement,
        sub_lo: Vec<i64>,
        sub_hi: Vec<i64>,
        sub_holes: Vec<Hole>,
    ) -> Result<Self, DispaceError> {
        let n = parent.dim();
        if sub_lo.len() != n || sub_hi.len() != n {
            return Err(DispaceError::Dimension("subspace bounds".into()));
        }
        for i in 0..n {
            if sub_lo[i] < 0 || sub_hi[i] > parent.bounds[i] || sub_lo[i] > sub_hi[i] {
                return Err(DispaceError::SubspaceNotContained(format!(
                    "axis {i}: [{}, {}] not inside [0, {}]",
                    sub_lo[i], sub_hi[i], parent.bounds[i]
                )));
            }
        }
        for (k, h) in sub_holes.iter().enumerate() {
            let ok = h.lo.len() == n
                && h.hi.len() == n
                && (0..n)
                    .all(|i| sub_lo[i] <= h.lo[i] && h.lo[i] < h.hi[i] && h.hi[i] <= sub_hi[i]);
            if !ok {
                return Err(DispaceError::SubspaceNotContained(format!(
                    "hole {k} outside the subspace bounds"
                )));
            }
        }
        Ok(Self {
            parent,
            sub_lo,
            sub_hi,
            sub_holes,
        })
    }

    /// The whole parent as a subspace.
    pub fn full(parent: &BoxComplement) -> Self {
        Self::new(
            parent.clone(),
            vec![0; parent.dim()],
            parent.bounds.clone(),
            vec![],
        )
        .expect("whole box")
    }

    pub fn parent(&self) -> &BoxComplement {
        &self.parent
    }

    pub fn sub_bounds(&self) -> (&[i64], &[i64]) {
        (&self.sub_lo, &self.sub_hi)
    }

    pub fn sub_holes(&self) -> &[Hole] {
        &self.sub_holes
    }

    pub fn region(&self) -> Region {
        let mut holes = self.parent.region().holes;
        for h in &self.sub_holes {
            holes.push((h.clone(), self.sub_lo.clone(), self.sub_hi.clone()));
        }
        Region {
            lo: self.sub_lo.clone(),
            hi: self.sub_hi.clone(),
            holes,
        }
    }

    pub fn refine(&self, factor: i64) -> DirectedSubspace {
        let scale = |v: &Vec<i64>| v.iter().map(|&c| c * factor).collect::<Vec<_>>();
        let holes = self
            .sub_holes
            .iter()
            .map(|h| Hole {
                lo: scale(&h.lo),
                hi: scale(&h.hi),
            })
            .collect();
        DirectedSubspace::new(
            self.parent.refine(factor),
            scale(&self.sub_lo),
            scale(&self.sub_hi),
            holes,
        )
        .expect("scaling keeps containment")
    }
}

/// A coordinate in a model document: integer, decimal, or `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Coord {
    pub fn to_rational(&self) -> Result<Rational64, DispaceError> {
        match self {
            Coord::Int(i) => Ok(Rational64::from_integer(*i)),
            Coord::Float(f) => parse_decimal(&f.to_string()),
            Coord::Text(s) => {
                let s = s.trim();
                if s.contains('/') {
                    Rational64::from_str(s)
                        .map_err(|e| DispaceError::Malformed(format!("{s:?}: {e}")))
                } else {
                    parse_decimal(s)
                }
            }
        }
    }
}

fn parse_decimal(s: &str) -> Result<Rational64, DispaceError> {
    let bad = || DispaceError::Malformed(format!("cannot read coordinate {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 12 {
        return Err(bad());
    }
    let digits: i64 = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let r = Rational64::new(digits, 10i64.pow(frac.len() as u32));
    Ok(if neg { -r } else { r })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDoc {
    pub lo: Vec<Coord>,
    pub hi: Vec<Coord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceDoc {
    pub bounds: Vec<[Coord; 2]>,
    #[serde(default)]
    pub holes: Vec<BoxDoc>,
}

/// Input document; see `docs/FORMATS.md`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    #[serde(default)]
    pub name: Option<String>,
    pub dim: usize,
    pub bounds: Vec<[Coord; 2]>,
    #[serde(default)]
    pub holes: Vec<BoxDoc>,
    #[serde(default)]
    pub subspace: Option<SubspaceDoc>,
    #[serde(default)]
    pub points: BTreeMap<String, Vec<Coord>>,
    #[serde(default)]
    pub pairs: Vec<[String; 2]>,
    #[serde(default)]
    pub refine: Option<u32>,
}

/// A parsed model on the normalised integer grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub name: String,
    pub space: BoxComplement,
    pub subspace: Option<DirectedSubspace>,
    pub points: BTreeMap<String, Vec<i64>>,
    pub pairs: Vec<(String, String)>,
    /// Grid units per document unit.
    pub scale: Rational64,
}

impl Model {
    /// Parses a JSON document. `refine` overrides the document's factor.
    pub fn parse(text: &str, refine: Option<u32>) -> Result<Model, DispaceError> {
        let doc: ModelDoc =
            serde_json::from_str(text).map_err(|e| DispaceError::Malformed(e.to_string()))?;
        Self::from_doc(&doc, refine)
    }

    pub fn from_doc(doc: &ModelDoc, refine: Option<u32>) -> Result<Model, DispaceError> {
        let n = doc.dim;
        if n == 0 {
            return Err(DispaceError::Dimension(
                "dimension must be at least 1".into(),
            ));
        }
        let refine = refine.or(doc.refine).unwrap_or(1);
        if refine == 0 {
            return Err(DispaceError::Malformed(
                "refinement factor must be at least 1".into(),
            ));
        }
        let vec_of = |cs: &[Coord], what: &str| -> Result<Vec<Rational64>, DispaceError> {
            if cs.len() != n {
                return Err(DispaceError::Dimension(format!(
                    "{what} has {} coordinates, expected {n}",
                    cs.len()
                )));
            }
            cs.iter().map(Coord::to_rational).collect()
        };
        let pairs_of = |bs: &[[Coord; 2]],
                        what: &str|
         -> Result<(Vec<Rational64>, Vec<Rational64>), DispaceError> {
            if bs.len() != n {
                return Err(DispaceError::Dimension(format!(
                    "{what} has {} axes, expected {n}",
                    bs.len()
                )));
            }
            let lo = bs
                .iter()
                .map(|b| b[0].to_rational())
                .collect::<Result<Vec<_>, _>>()?;
            let hi = bs
                .iter()
                .map(|b| b[1].to_rational())
                .collect::<Result<Vec<_>, _>>()?;
            Ok((lo, hi))
        };
        let (lo, hi) = pairs_of(&doc.bounds, "bounds")?;
        let holes = doc
            .holes
            .iter()
            .map(|h| Ok((vec_of(&h.lo, "hole")?, vec_of(&h.hi, "hole")?)))
            .collect::<Result<Vec<_>, DispaceError>>()?;
        let sub = match &doc.subspace {
            None => None,
            Some(s) => {
                let (slo, shi) = pairs_of(&s.bounds, "subspace bounds")?;
                let sholes = s
                    .holes
                    .iter()
                    .map(|h| Ok((vec_of(&h.lo, "hole")?, vec_of(&h.hi, "hole")?)))
                    .collect::<Result<Vec<_>, DispaceError>>()?;
                Some((slo, shi, sholes))
            }
        };
        let points = doc
            .points
            .iter()
            .map(|(k, v)| Ok((k.clone(), vec_of(v, "point")?)))
            .collect::<Result<BTreeMap<_, _>, DispaceError>>()?;

        let mut denom: i64 = 1;
        let mut all: Vec<&Rational64> = lo.iter().chain(&hi).collect();
        for (a, b) in &holes {
            all.extend(a.iter().chain(b));
        }
        if let Some((a, b, hs)) = &sub {
            all.extend(a.iter().chain(b));
            for (c, d) in hs {
                all.extend(c.iter().chain(d));
            }
        }
        for v in points.values() {
            all.extend(v);
        }
        for r in all {
            denom = denom.lcm(r.denom());
        }
        let scale = Rational64::from_integer(denom * refine as i64);
        let grid = |v: &[Rational64]| -> Vec<i64> {
            v.iter()
                .zip(&lo)
                .map(|(c, o)| ((c - o) * scale).to_integer())
                .collect()
        };
        let bounds = grid(&hi);
        if (0..n).any(|i| hi[i] < lo[i]) {
            return Err(DispaceError::Malformed("bounds have lo > hi".into()));
        }
        let space = BoxComplement::new(
            bounds,
            holes
                .iter()
                .map(|(a, b)| Hole {
                    lo: grid(a),
                    hi: grid(b),
                })
                .collect(),
        )?;
        let subspace = match sub {
            None => None,
            Some((a, b, hs)) => Some(DirectedSubspace::new(
                space.clone(),
                grid(&a),
                grid(&b),
                hs.iter()
                    .map(|(c, d)| Hole {
                        lo: grid(c),
                        hi: grid(d),
                    })
                    .collect(),
            )?),
        };
        let region = space.region();
        let mut pts = BTreeMap::new();
        for (k, v) in &points {
            let g = grid(v);
            let exact = v
                .iter()
                .zip(&lo)
                .all(|(c, o)| ((c - o) * scale).is_integer());
            if !exact || !region.vertex_allowed(&g) {
                return Err(DispaceError::BadPoint(k.clone()));
            }
            pts.insert(k.clone(), g);
        }
        let mut pairs = Vec::new();
        for [a, b] in &doc.pairs {
            for p in [a, b] {
                if !pts.contains_key(p) {
                    return Err(DispaceError::UnknownPoint(p.clone()));
                }
            }
            pairs.push((a.clone(), b.clone()));
        }
        Ok(Model {
            name: doc.name.clone().unwrap_or_else(|| "model".into()),
            space,
            subspace,
            points: pts,
            pairs,
            scale,
        })
    }

    /// The time-reversed model: reflected space, points keep their names at
    /// reflected positions, and pairs swap ends.
    pub fn reverse(&self) -> Model {
        let space = self.space.reverse();
        let subspace = self.subspace.as_ref().map(|s| {
            let b = self.space.bounds();
            let flip = |lo: &[i64], hi: &[i64]| -> (Vec<i64>, Vec<i64>) {
                (
                    (0..b.len()).map(|i| b[i] - hi[i]).collect(),
                    (0..b.len()).map(|i| b[i] - lo[i]).collect(),
                )
            };
            let (slo, shi) = flip(&s.sub_lo, &s.sub_hi);
            let holes = s
                .sub_holes
                .iter()
                .map(|h| {
                    let (lo, hi) = flip(&h.lo, &h.hi);
                    Hole { lo, hi }
                })
                .collect();
            DirectedSubspace::new(space.clone(), slo, shi, holes)
                .expect("reflection keeps containment")
        });
        Model {
            name: format!("{}-reversed", self.name),
            points: self
                .points
                .iter()
                .map(|(k, v)| (k.clone(), self.space.reverse_vertex(v)))
                .collect(),
            pairs: self
                .pairs
                .iter()
                .map(|(a, b)| (b.clone(), a.clone()))
                .collect(),
            space,
            subspace,
            scale: self.scale,
        }
    }

    /// Multiplies the grid resolution by `factor`.
    pub fn refine(&self, factor: i64) -> Model {
        Model {
            name: self.name.clone(),
            space: self.space.refine(factor),
            subspace: self.subspace.as_ref().map(|s| s.refine(factor)),
            points: self
                .points
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|c| c * factor).collect()))
                .collect(),
            pairs: self.pairs.clone(),
            scale: self.scale * factor,
        }
    }

    pub fn point(&self, name: &str) -> Result<&[i64], DispaceError> {
        self.points
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| DispaceError::UnknownPoint(name.into()))
    }
}
