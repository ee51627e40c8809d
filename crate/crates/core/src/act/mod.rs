//! Right group actions on finite pointed sets, with kernels, cokernels and
//! exactness.

mod abelian;
mod group;

use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use abelian::{AbMap, AbSequence, FgAbelian};
pub use group::{is_homomorphism, FinGroup};

use crate::report::Report;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ActError {
    #[error("invalid action: {0}")]
    InvalidObject(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("invalid abelian group: {0}")]
    InvalidAbelian(String),
    #[error("invalid homomorphism: {0}")]
    InvalidMap(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("position {0} has no incoming and outgoing map")]
    Position(usize),
    #[error("sequence objects do not match at map {0}")]
    Mismatch(usize),
    #[error("linear algebra: {0}")]
    Linalg(String),
}

/// A finite pointed set `{0, .., size-1}` with base point `base`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointedSet {
    pub size: usize,
    pub base: usize,
}

/// A right action of `group` on the pointed carrier `0..size`.
/// The base point need not be fixed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActObject {
    size: usize,
    base: usize,
    group: FinGroup,
    action: Vec<usize>,
    labels: Vec<String>,
}

impl ActObject {
    /// `action[x * |G| + g]` is `x . g`.
    pub fn new(
        size: usize,
        base: usize,
        group: FinGroup,
        action: Vec<usize>,
    ) -> Result<Self, ActError> {
        let labels = (0..size).map(|i| i.to_string()).collect();
        Self::with_labels(size, base, group, action, labels)
    }

    pub fn with_labels(
        size: usize,
        base: usize,
        group: FinGroup,
        action: Vec<usize>,
        labels: Vec<String>,
    ) -> Result<Self, ActError> {
        let o = Self {
            size,
            base,
            group,
            action,
            labels,
        };
        let r = o.check();
        if !r.is_clean() {
            return Err(ActError::InvalidObject(r.to_string()));
        }
        Ok(o)
    }

    /// Action of `group` on `0..size` given by a function.
    pub fn from_fn(
        size: usize,
        base: usize,
        group: FinGroup,
        act: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, ActError> {
        let n = group.order();
        let action = (0..size * n).map(|k| act(k / n, k % n)).collect();
        Self::new(size, base, group, action)
    }

    /// The one-point object with a trivial group.
    pub fn zero() -> Self {
        Self::new(1, 0, FinGroup::trivial(), vec![0]).expect("zero object")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn group(&self) -> &FinGroup {
        &self.group
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn act(&self, x: usize, g: usize) -> usize {
        self.action[x * self.group.order() + g]
    }

    /// Stabiliser of the base point.
    pub fn base_stabilizer(&self) -> BTreeSet<usize> {
        self.group
            .elements()
            .filter(|&g| self.act(self.base, g) == self.base)
            .collect()
    }

    pub fn check(&self) -> Report {
        let mut r = Report::new();
        let n = self.group.order();
        if self.base >= self.size {
            r.push(
                "base point",
                format!("{} outside carrier of size {}", self.base, self.size),
            );
        }
        if self.labels.len() != self.size {
            r.push("labels", "one label per carrier element");
        }
        if self.action.len() != self.size * n || self.action.iter().any(|&y| y >= self.size) {
            r.push("action table", "wrong size or values outside the carrier");
            return r;
        }
        for x in 0..self.size {
            if self.act(x, self.group.unit()) != x {
                r.push("unit acts trivially", format!("x = {x}"));
            }
            for g in self.group.elements() {
                for h in self.group.elements() {
                    if self.act(self.act(x, g), h) != self.act(x, self.group.mul(g, h)) {
                        r.push("action composes", format!("x = {x}, g = {g}, h = {h}"));
                    }
                }
            }
        }
        r
    }

    /// Orbit index of each carrier element, numbered by least member.
    pub fn orbits(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.size];
        let mut count = 0;
        for x in 0..self.size {
            if label[x] == usize::MAX {
                for g in self.group.elements() {
                    label[self.act(x, g)] = count;
                }
                count += 1;
            }
        }
        label
    }

    /// Restriction to a carrier subset closed under a subgroup.
    pub fn restrict(
        &self,
        carrier: &BTreeSet<usize>,
        subgroup: &BTreeSet<usize>,
    ) -> Result<(ActObject, ActMorphism), ActError> {
        if !carrier.contains(&self.base) {
            return Err(ActError::InvalidObject(
                "restriction must contain the base point".into(),
            ));
        }
        let (g, gembed) = self.group.subgroup(subgroup);
        let cembed: Vec<usize> = carrier.iter().copied().collect();
        let pos: BTreeMap<usize, usize> = cembed.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut action = Vec::with_capacity(cembed.len() * g.order());
        for &x in &cembed {
            for &h in &gembed {
                let y = self.act(x, h);
                action.push(*pos.get(&y).ok_or_else(|| {
                    ActError::InvalidObject(format!("carrier not closed: {x} . {h} = {y}"))
                })?);
            }
        }
        let labels = cembed.iter().map(|&x| self.labels[x].clone()).collect();
        let sub = ActObject::with_labels(cembed.len(), pos[&self.base], g, action, labels)?;
        let inc = ActMorphism::new(sub.clone(), self.clone(), cembed, gembed)?;
        Ok((sub, inc))
    }
}

/// An equivariant pointed map with a group homomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActMorphism {
    source: ActObject,
    target: ActObject,
    f_set: Vec<usize>,
    f_grp: Vec<usize>,
}

impl ActMorphism {
    pub fn new(
        source: ActObject,
        target: ActObject,
        f_set: Vec<usize>,
        f_grp: Vec<usize>,
    ) -> Result<Self, ActError> {
        let m = Self {
            source,
            target,
            f_set,
            f_grp,
        };
        let r = m.check();
        if !r.is_clean() {
            return Err(ActError::InvalidMorphism(r.to_string()));
        }
        Ok(m)
    }

    pub fn identity(a: &ActObject) -> Self {
        Self {
            source: a.clone(),
            target: a.clone(),
            f_set: (0..a.size).collect(),
            f_grp: a.group.elements().collect(),
        }
    }

    /// The map to the zero object.
    pub fn to_zero(a: &ActObject) -> Self {
        Self {
            source: a.clone(),
            target: ActObject::zero(),
            f_set: vec![0; a.size],
            f_grp: vec![0; a.group.order()],
        }
    }

    /// The map from the zero object.
    pub fn from_zero(a: &ActObject) -> Self {
        Self {
            source: ActObject::zero(),
            target: a.clone(),
            f_set: vec![a.base],
            f_grp: vec![a.group.unit()],
        }
    }

    pub fn source(&self) -> &ActObject {
        &self.source
    }

    pub fn target(&self) -> &ActObject {
        &self.target
    }

    pub fn f_set(&self) -> &[usize] {
        &self.f_set
    }

    pub fn f_grp(&self) -> &[usize] {
        &self.f_grp
    }

    pub fn check(&self) -> Report {
        let mut r = Report::new();
        let (s, t) = (&self.source, &self.target);
        if self.f_set.len() != s.size || self.f_set.iter().any(|&y| y >= t.size) {
            r.push("set map", "wrong size or values outside the target");
            return r;
        }
        if !is_homomorphism(&s.group, &t.group, &self.f_grp) {
            r.push("group homomorphism", "f_grp does not preserve products");
            return r;
        }
        if self.f_set[s.base] != t.base {
            r.push(
                "pointed",
                format!("base {} goes to {}", s.base, self.f_set[s.base]),
            );
        }
        for x in 0..s.size {
            for g in s.group.elements() {
                if self.f_set[s.act(x, g)] != t.act(self.f_set[x], self.f_grp[g]) {
                    r.push("equivariance", format!("x = {}, g = {g}", s.labels[x]));
                }
            }
        }
        r
    }

    /// `self` then `next`.
    pub fn then(&self, next: &ActMorphism) -> Result<ActMorphism, ActError> {
        if self.target != next.source {
            return Err(ActError::InvalidMorphism("not composable".into()));
        }
        Ok(Self {
            source: self.source.clone(),
            target: next.target.clone(),
            f_set: self.f_set.iter().map(|&x| next.f_set[x]).collect(),
            f_grp: self.f_grp.iter().map(|&g| next.f_grp[g]).collect(),
        })
    }

    /// Constant at the base point on carriers.
    pub fn is_null(&self) -> bool {
        self.f_set.iter().all(|&y| y == self.target.base)
    }
}

/// A subaction of a fixed object: carrier subset and subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subobject {
    pub carrier: BTreeSet<usize>,
    pub group: BTreeSet<usize>,
}

/// Kernel of `m` as a subaction of its source: the fibre over the target
/// base point, acted on by the preimage of the target base stabiliser.
pub fn kernel_subobject(m: &ActMorphism) -> Subobject {
    let t = &m.target;
    let stab = t.base_stabilizer();
    Subobject {
        carrier: (0..m.source.size)
            .filter(|&x| m.f_set[x] == t.base)
            .collect(),
        group: m
            .source
            .group
            .elements()
            .filter(|&g| stab.contains(&m.f_grp[g]))
            .collect(),
    }
}

pub fn kernel(m: &ActMorphism) -> (ActObject, ActMorphism) {
    let k = kernel_subobject(m);
    m.source
        .restrict(&k.carrier, &k.group)
        .expect("kernel is a subaction")
}

/// Class of each target element in the cokernel: the congruence generated
/// by `f(x) . h ~ base . h`.
pub fn cokernel_classes(m: &ActMorphism) -> Vec<usize> {
    let t = &m.target;
    let mut uf = UnionFind::<usize>::new(t.size);
    let image: BTreeSet<usize> = m.f_set.iter().copied().collect();
    for &y in &image {
        for h in t.group.elements() {
            uf.union(t.act(y, h), t.act(t.base, h));
        }
    }
    let mut class = vec![usize::MAX; t.size];
    let mut roots = BTreeMap::new();
    for y in 0..t.size {
        let r = uf.find(y);
        let next = roots.len();
        class[y] = *roots.entry(r).or_insert(next);
    }
    class
}

/// The quotient of the target by [`cokernel_classes`], with the same group.
pub fn cokernel(m: &ActMorphism) -> (ActObject, ActMorphism) {
    let t = &m.target;
    let class = cokernel_classes(m);
    let n = class.iter().max().map_or(0, |&c| c + 1);
    let mut reps = vec![usize::MAX; n];
    for (y, &c) in class.iter().enumerate() {
        if reps[c] == usize::MAX {
            reps[c] = y;
        }
    }
    let ord = t.group.order();
    let action = (0..n * ord)
        .map(|k| class[t.act(reps[k / ord], k % ord)])
        .collect();
    let labels = (0..n)
        .map(|c| {
            let members: Vec<&str> = (0..t.size)
                .filter(|&y| class[y] == c)
                .map(|y| t.labels[y].as_str())
                .collect();
            if members.len() == 1 {
                members[0].to_string()
            } else {
                format!("[{}]", members.join(","))
            }
        })
        .collect();
    let q = ActObject::with_labels(n, class[t.base], t.group.clone(), action, labels)
        .expect("congruence quotient");
    let proj = ActMorphism::new(t.clone(), q.clone(), class, t.group.elements().collect())
        .expect("projection");
    (q, proj)
}

/// Kernel of the cokernel projection, as a subaction of the target.
pub fn normal_image_subobject(m: &ActMorphism) -> Subobject {
    let (_, proj) = cokernel(m);
    kernel_subobject(&proj)
}

pub fn normal_image(m: &ActMorphism) -> (ActObject, ActMorphism) {
    let (_, proj) = cokernel(m);
    kernel(&proj)
}

/// Objects `objects[i]` joined by `maps[i]: objects[i] -> objects[i+1]`.
#[derive(Debug, Clone)]
pub struct ActSequence {
    pub objects: Vec<ActObject>,
    pub maps: Vec<ActMorphism>,
}

impl ActSequence {
    pub fn new(maps: Vec<ActMorphism>) -> Result<Self, ActError> {
        let Some(first) = maps.first() else {
            return Err(ActError::Dimension(
                "a sequence needs at least one map".into(),
            ));
        };
        let mut objects = vec![first.source.clone()];
        for (i, m) in maps.iter().enumerate() {
            if objects[i] != m.source {
                return Err(ActError::Mismatch(i));
            }
            objects.push(m.target.clone());
        }
        Ok(Self { objects, maps })
    }

    /// Exactness at `objects[pos]`: the normal image of the incoming map
    /// equals the kernel of the outgoing one. The report names the first
    /// element or group element in the symmetric difference.
    pub fn is_exact_at(&self, pos: usize) -> Result<(bool, Report), ActError> {
        if pos == 0 || pos >= self.maps.len() {
            return Err(ActError::Position(pos));
        }
        let im = normal_image_subobject(&self.maps[pos - 1]);
        let ker = kernel_subobject(&self.maps[pos]);
        let obj = &self.objects[pos];
        let mut r = Report::new();
        for x in im.carrier.symmetric_difference(&ker.carrier) {
            let side = if im.carrier.contains(x) {
                "image only"
            } else {
                "kernel only"
            };
            r.push(
                "carrier",
                format!("position {pos}: element {} in {side}", obj.labels[*x]),
            );
        }
        for g in im.group.symmetric_difference(&ker.group) {
            let side = if im.group.contains(g) {
                "image only"
            } else {
                "kernel only"
            };
            r.push(
                "group",
                format!("position {pos}: group element {g} in {side}"),
            );
        }
        Ok((r.is_clean(), r))
    }

    /// Checks every interior position.
    pub fn check_exact(&self) -> Report {
        let mut r = Report::new();
        for pos in 1..self.maps.len() {
            let (_, rep) = self.is_exact_at(pos).expect("interior position");
            r.extend(rep);
        }
        r
    }
}

/// `J(X) = (X, 1)`.
pub fn embed_pointed_set(x: &PointedSet) -> ActObject {
    ActObject::new(x.size, x.base, FinGroup::trivial(), (0..x.size).collect())
        .expect("trivial action")
}

/// `V(X, G) = X / G`, with the orbit map.
pub fn quotient_v(a: &ActObject) -> (PointedSet, Vec<usize>) {
    let orbits = a.orbits();
    let size = orbits.iter().max().map_or(0, |&o| o + 1);
    (
        PointedSet {
            size,
            base: orbits[a.base],
        },
        orbits,
    )
}

/// `K(G)`: the right regular action, pointed at the unit.
pub fn embed_group(g: &FinGroup) -> ActObject {
    ActObject::from_fn(g.order(), g.unit(), g.clone(), |x, h| g.mul(x, h)).expect("regular action")
}

/// `R(X, G) = G / N` where `N` is the normal closure of the base stabiliser.
pub fn retract_r(a: &ActObject) -> (FinGroup, Vec<usize>) {
    let n = a.group.normal_closure(a.base_stabilizer());
    a.group.quotient(&n)
}
