//! Finite categories given by explicit tables.
//!
//! Composition is diagrammatic: `compose(f, g)` is "f then g" and needs
//! `tgt(f) == src(g)`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::Report;

pub type ObjId = usize;
pub type MorId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CategoryError {
    #[error("morphism {0} refers to unknown object {1}")]
    UnknownObject(String, ObjId),
    #[error("unknown morphism id {0}")]
    UnknownMorphism(MorId),
    #[error("expected {expected} identities, got {got}")]
    IdentityCount { expected: usize, got: usize },
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("conflicting composite for ({0}, {1})")]
    ConflictingComposite(String, String),
    #[error("unknown name {0:?} in document")]
    UnknownName(String),
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("isomorphism search is limited to {limit} morphisms, got {got}")]
    TooLargeForSearch { limit: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Morphism {
    pub name: String,
    pub src: ObjId,
    pub tgt: ObjId,
}

/// A finite category stored as tables.
///
/// Construction only checks that indices are in range and names are unique;
/// the category axioms are checked by [`FinCategory::check_category`].
#[derive(Debug, Clone)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<MorId>,
    compose: HashMap<(MorId, MorId), MorId>,
    hom: HashMap<(ObjId, ObjId), Vec<MorId>>,
    outgoing: Vec<Vec<MorId>>,
    incoming: Vec<Vec<MorId>>,
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identities == other.identities
            && self.compose == other.compose
    }
}

impl Eq for FinCategory {}

impl FinCategory {
    pub fn from_parts(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<MorId>,
        compose: impl IntoIterator<Item = (MorId, MorId, MorId)>,
    ) -> Result<Self, CategoryError> {
        let mut seen = HashSet::new();
        for o in &objects {
            if !seen.insert(o.as_str()) {
                return Err(CategoryError::DuplicateName(o.clone()));
            }
        }
        let mut seen = HashSet::new();
        for m in &morphisms {
            if !seen.insert(m.name.as_str()) {
                return Err(CategoryError::DuplicateName(m.name.clone()));
            }
            for end in [m.src, m.tgt] {
                if end >= objects.len() {
                    return Err(CategoryError::UnknownObject(m.name.clone(), end));
                }
            }
        }
        if identities.len() != objects.len() {
            return Err(CategoryError::IdentityCount {
                expected: objects.len(),
                got: identities.len(),
            });
        }
        let n = morphisms.len();
        for &i in &identities {
            if i >= n {
                return Err(CategoryError::UnknownMorphism(i));
            }
        }
        let mut table = HashMap::new();
        for (f, g, h) in compose {
            for m in [f, g, h] {
                if m >= n {
                    return Err(CategoryError::UnknownMorphism(m));
                }
            }
            if let Some(&old) = table.get(&(f, g)) {
                if old != h {
                    return Err(CategoryError::ConflictingComposite(
                        morphisms[f].name.clone(),
                        morphisms[g].name.clone(),
                    ));
                }
            }
            table.insert((f, g), h);
        }
        let mut hom: HashMap<(ObjId, ObjId), Vec<MorId>> = HashMap::new();
        let mut outgoing = vec![Vec::new(); objects.len()];
        let mut incoming = vec![Vec::new(); objects.len()];
        for (id, m) in morphisms.iter().enumerate() {
            hom.entry((m.src, m.tgt)).or_default().push(id);
            outgoing[m.src].push(id);
            incoming[m.tgt].push(id);
        }
        Ok(Self {
            objects,
            morphisms,
            identities,
            compose: table,
            hom,
            outgoing,
            incoming,
        })
    }

    pub fn builder() -> CategoryBuilder {
        CategoryBuilder::default()
    }

    /// The category with one object and only its identity.
    pub fn terminal() -> Self {
        let mut b = Self::builder();
        b.object("*");
        b.build().expect("terminal category")
    }

    /// The free category on a single arrow `a: x -> y`.
    pub fn arrow() -> Self {
        let mut b = Self::builder();
        let x = b.object("x");
        let y = b.object("y");
        b.morphism("a", x, y);
        b.build().expect("arrow category")
    }

    /// The poset `0 < 1 < ... < n`, with the arrow `i -> j` named `i<j`.
    pub fn chain(n: usize) -> Self {
        let mut b = Self::builder();
        let objs: Vec<_> = (0..=n).map(|i| b.object(&i.to_string())).collect();
        let mut arrow = HashMap::new();
        for i in 0..=n {
            arrow.insert((i, i), b.identity(objs[i]));
            for j in i + 1..=n {
                arrow.insert((i, j), b.morphism(&format!("{i}<{j}"), objs[i], objs[j]));
            }
        }
        for i in 0..=n {
            for j in i..=n {
                for k in j..=n {
                    b.set_compose(arrow[&(i, j)], arrow[&(j, k)], arrow[&(i, k)]);
                }
            }
        }
        b.build().expect("chain category")
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn object_name(&self, x: ObjId) -> &str {
        &self.objects[x]
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn object_by_name(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphism(&self, f: MorId) -> &Morphism {
        &self.morphisms[f]
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn morphism_by_name(&self, name: &str) -> Option<MorId> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn src(&self, f: MorId) -> ObjId {
        self.morphisms[f].src
    }

    pub fn tgt(&self, f: MorId) -> ObjId {
        self.morphisms[f].tgt
    }

    pub fn identity(&self, x: ObjId) -> MorId {
        self.identities[x]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        let m = &self.morphisms[f];
        m.src == m.tgt && self.identities[m.src] == f
    }

    /// `f` then `g`, if both are composable and the table has an entry.
    pub fn compose(&self, f: MorId, g: MorId) -> Option<MorId> {
        if self.tgt(f) != self.src(g) {
            return None;
        }
        self.compose.get(&(f, g)).copied()
    }

    pub fn compose_entries(&self) -> impl Iterator<Item = (MorId, MorId, MorId)> + '_ {
        self.compose.iter().map(|(&(f, g), &h)| (f, g, h))
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> &[MorId] {
        self.hom.get(&(x, y)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn outgoing(&self, x: ObjId) -> &[MorId] {
        &self.outgoing[x]
    }

    pub fn incoming(&self, y: ObjId) -> &[MorId] {
        &self.incoming[y]
    }

    /// Composable pairs `(f, g)` with `tgt(f) == src(g)`.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (MorId, MorId)> + '_ {
        (0..self.morphisms.len())
            .flat_map(move |f| self.outgoing[self.tgt(f)].iter().map(move |&g| (f, g)))
    }

    /// Every violated category axiom, with the offending morphisms.
    pub fn check_category(&self) -> Report {
        let mut r = Report::new();
        let name = |f: MorId| self.morphisms[f].name.as_str();
        for (x, &i) in self.identities.iter().enumerate() {
            if self.src(i) != x || self.tgt(i) != x {
                r.push(
                    "identity endpoints",
                    format!(
                        "identity {} of {} is not an endomorphism of it",
                        name(i),
                        self.objects[x]
                    ),
                );
            }
        }
        for (&(f, g), &h) in &self.compose {
            if self.tgt(f) != self.src(g) {
                r.push(
                    "compose defined on non-composable pair",
                    format!("({}, {})", name(f), name(g)),
                );
            } else if self.src(h) != self.src(f) || self.tgt(h) != self.tgt(g) {
                r.push(
                    "composite endpoints",
                    format!("({}, {}) -> {}", name(f), name(g), name(h)),
                );
            }
        }
        let mut missing = false;
        for (f, g) in self.composable_pairs() {
            if !self.compose.contains_key(&(f, g)) {
                r.push(
                    "compose not total on composable pairs",
                    format!("({}, {})", name(f), name(g)),
                );
                missing = true;
            }
        }
        if missing || !r.is_clean() {
            return r;
        }
        for f in 0..self.morphisms.len() {
            let (x, y) = (self.src(f), self.tgt(f));
            if self.compose(self.identities[x], f) != Some(f) {
                r.push(
                    "left identity",
                    format!("1_{} then {}", self.objects[x], name(f)),
                );
            }
            if self.compose(f, self.identities[y]) != Some(f) {
                r.push(
                    "right identity",
                    format!("{} then 1_{}", name(f), self.objects[y]),
                );
            }
        }
        for (f, g) in self.composable_pairs() {
            let fg = self.compose[&(f, g)];
            for &h in &self.outgoing[self.tgt(g)] {
                let left = self.compose[&(fg, h)];
                let gh = self.compose[&(g, h)];
                let right = self.compose[&(f, gh)];
                if left != right {
                    r.push(
                        "associativity",
                        format!(
                            "({}, {}, {}): {} vs {}",
                            name(f),
                            name(g),
                            name(h),
                            name(left),
                            name(right)
                        ),
                    );
                }
            }
        }
        r
    }

    /// Same ids and names, endpoints swapped, composition read backwards.
    pub fn opposite(&self) -> FinCategory {
        let morphisms = self
            .morphisms
            .iter()
            .map(|m| Morphism {
                name: m.name.clone(),
                src: m.tgt,
                tgt: m.src,
            })
            .collect();
        let compose = self.compose.iter().map(|(&(f, g), &h)| (g, f, h));
        FinCategory::from_parts(
            self.objects.clone(),
            morphisms,
            self.identities.clone(),
            compose,
        )
        .expect("opposite of a well-formed table")
    }

    /// Target of the factorization-category morphism `m`, i.e. `pre . mid . post`.
    pub fn fact_target(&self, m: FactMorphism) -> Option<MorId> {
        let left = self.compose(m.pre, m.mid)?;
        self.compose(left, m.post)
    }

    pub fn fact_identity(&self, f: MorId) -> FactMorphism {
        FactMorphism {
            pre: self.identities[self.src(f)],
            mid: f,
            post: self.identities[self.tgt(f)],
        }
    }

    /// `first` then `second` in the factorization category:
    /// `(u, v)` then `(u', v')` is `(u' u, v v')`.
    pub fn fact_compose(&self, first: FactMorphism, second: FactMorphism) -> Option<FactMorphism> {
        if self.fact_target(first)? != second.mid {
            return None;
        }
        Some(FactMorphism {
            pre: self.compose(second.pre, first.pre)?,
            mid: first.mid,
            post: self.compose(first.post, second.post)?,
        })
    }

    /// All factorization-category morphisms out of `f`.
    pub fn fact_morphisms_from(&self, f: MorId) -> impl Iterator<Item = FactMorphism> + '_ {
        let (x, y) = (self.src(f), self.tgt(f));
        self.incoming[x].iter().flat_map(move |&pre| {
            self.outgoing[y]
                .iter()
                .map(move |&post| FactMorphism { pre, mid: f, post })
        })
    }

    pub fn fact_morphisms(&self) -> impl Iterator<Item = FactMorphism> + '_ {
        (0..self.morphisms.len()).flat_map(move |f| self.fact_morphisms_from(f))
    }

    pub fn fact_morphism_count(&self) -> usize {
        (0..self.morphisms.len())
            .map(|f| self.incoming[self.src(f)].len() * self.outgoing[self.tgt(f)].len())
            .sum()
    }

    /// The factorization category as an explicit table.
    ///
    /// Object `f` carries the name of morphism `f`; the morphism `(u, v)` out
    /// of `f` is named `(u,v)@f`. Returns the table and the index of every
    /// materialised morphism.
    pub fn factorization_category(
        &self,
    ) -> Result<(FinCategory, Vec<FactMorphism>), CategoryError> {
        let objects: Vec<String> = self.morphisms.iter().map(|m| m.name.clone()).collect();
        let mut index: HashMap<FactMorphism, MorId> = HashMap::new();
        let mut list = Vec::new();
        let mut morphisms = Vec::new();
        for m in self.fact_morphisms() {
            let tgt = self
                .fact_target(m)
                .ok_or_else(|| CategoryError::Malformed("composition table is not total".into()))?;
            index.insert(m, list.len());
            morphisms.push(Morphism {
                name: format!(
                    "({},{})@{}",
                    self.morphisms[m.pre].name,
                    self.morphisms[m.post].name,
                    self.morphisms[m.mid].name
                ),
                src: m.mid,
                tgt,
            });
            list.push(m);
        }
        let identities = (0..self.morphisms.len())
            .map(|f| index[&self.fact_identity(f)])
            .collect();
        let mut compose = Vec::new();
        for &a in &list {
            let t = self.fact_target(a).expect("checked above");
            for b in self.fact_morphisms_from(t) {
                let c = self.fact_compose(a, b).ok_or_else(|| {
                    CategoryError::Malformed("composition table is not total".into())
                })?;
                compose.push((index[&a], index[&b], index[&c]));
            }
        }
        let cat = FinCategory::from_parts(objects, morphisms, identities, compose)?;
        Ok((cat, list))
    }

    pub fn to_doc(&self) -> CategoryDoc {
        let mut compose: Vec<[String; 3]> = self
            .compose
            .iter()
            .map(|(&(f, g), &h)| {
                [
                    self.morphisms[f].name.clone(),
                    self.morphisms[g].name.clone(),
                    self.morphisms[h].name.clone(),
                ]
            })
            .collect();
        compose.sort();
        CategoryDoc {
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| MorphismDoc {
                    name: m.name.clone(),
                    src: self.objects[m.src].clone(),
                    tgt: self.objects[m.tgt].clone(),
                })
                .collect(),
            identities: self
                .identities
                .iter()
                .enumerate()
                .map(|(x, &i)| (self.objects[x].clone(), self.morphisms[i].name.clone()))
                .collect(),
            compose,
        }
    }

    pub fn from_doc(doc: &CategoryDoc) -> Result<Self, CategoryError> {
        let obj: HashMap<&str, ObjId> = doc
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.as_str(), i))
            .collect();
        let find_obj = |n: &str| {
            obj.get(n)
                .copied()
                .ok_or_else(|| CategoryError::UnknownName(n.into()))
        };
        let mut morphisms = Vec::new();
        for m in &doc.morphisms {
            morphisms.push(Morphism {
                name: m.name.clone(),
                src: find_obj(&m.src)?,
                tgt: find_obj(&m.tgt)?,
            });
        }
        let mor: HashMap<&str, MorId> = doc
            .morphisms
            .iter()
            .enumerate()
            .map(|(i, m)| (m.name.as_str(), i))
            .collect();
        let find_mor = |n: &str| {
            mor.get(n)
                .copied()
                .ok_or_else(|| CategoryError::UnknownName(n.into()))
        };
        let mut identities = vec![usize::MAX; doc.objects.len()];
        for (o, i) in &doc.identities {
            identities[find_obj(o)?] = find_mor(i)?;
        }
        if let Some(x) = identities.iter().position(|&i| i == usize::MAX) {
            return Err(CategoryError::Malformed(format!(
                "no identity for object {}",
                doc.objects[x]
            )));
        }
        let mut compose = Vec::new();
        for [f, g, h] in &doc.compose {
            compose.push((find_mor(f)?, find_mor(g)?, find_mor(h)?));
        }
        Self::from_parts(doc.objects.clone(), morphisms, identities, compose)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("category document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CategoryError> {
        let doc: CategoryDoc =
            serde_json::from_str(text).map_err(|e| CategoryError::Malformed(e.to_string()))?;
        Self::from_doc(&doc)
    }
}

/// A morphism `(pre, post)` of the factorization category out of the object `mid`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FactMorphism {
    pub pre: MorId,
    pub mid: MorId,
    pub post: MorId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDoc {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

/// Serialized form of a [`FinCategory`]; see `docs/FORMATS.md`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryDoc {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDoc>,
    pub identities: BTreeMap<String, String>,
    pub compose: Vec<[String; 3]>,
}

/// Incremental construction of small categories. Identities are created
/// with their objects, and composites with identities are filled in by
/// [`CategoryBuilder::build`] unless set explicitly.
#[derive(Debug, Default)]
pub struct CategoryBuilder {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<MorId>,
    compose: Vec<(MorId, MorId, MorId)>,
}

impl CategoryBuilder {
    pub fn object(&mut self, name: &str) -> ObjId {
        let x = self.objects.len();
        self.objects.push(name.to_string());
        self.identities.push(self.morphisms.len());
        self.morphisms.push(Morphism {
            name: format!("1_{name}"),
            src: x,
            tgt: x,
        });
        x
    }

    pub fn identity(&self, x: ObjId) -> MorId {
        self.identities[x]
    }

    pub fn morphism(&mut self, name: &str, src: ObjId, tgt: ObjId) -> MorId {
        self.morphisms.push(Morphism {
            name: name.to_string(),
            src,
            tgt,
        });
        self.morphisms.len() - 1
    }

    pub fn set_compose(&mut self, f: MorId, g: MorId, h: MorId) -> &mut Self {
        self.compose.push((f, g, h));
        self
    }

    pub fn build(mut self) -> Result<FinCategory, CategoryError> {
        let explicit: HashSet<(MorId, MorId)> =
            self.compose.iter().map(|&(f, g, _)| (f, g)).collect();
        for f in 0..self.morphisms.len() {
            let (x, y) = (self.morphisms[f].src, self.morphisms[f].tgt);
            if x >= self.objects.len() || y >= self.objects.len() {
                continue;
            }
            for (a, b) in [(self.identities[x], f), (f, self.identities[y])] {
                if !explicit.contains(&(a, b)) {
                    self.compose.push((a, b, f));
                }
            }
        }
        FinCategory::from_parts(self.objects, self.morphisms, self.identities, self.compose)
    }
}

/// A functor between finite categories, stored as two maps.
#[derive(Debug, Clone)]
pub struct FinFunctor {
    source: Arc<FinCategory>,
    target: Arc<FinCategory>,
    pub object_map: Vec<ObjId>,
    pub morphism_map: Vec<MorId>,
}

impl FinFunctor {
    pub fn new(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        object_map: Vec<ObjId>,
        morphism_map: Vec<MorId>,
    ) -> Self {
        Self {
            source,
            target,
            object_map,
            morphism_map,
        }
    }

    pub fn identity(c: Arc<FinCategory>) -> Self {
        let object_map = (0..c.num_objects()).collect();
        let morphism_map = (0..c.num_morphisms()).collect();
        Self::new(c.clone(), c, object_map, morphism_map)
    }

    pub fn source(&self) -> &Arc<FinCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinCategory> {
        &self.target
    }

    pub fn on_object(&self, x: ObjId) -> ObjId {
        self.object_map[x]
    }

    pub fn on_morphism(&self, f: MorId) -> MorId {
        self.morphism_map[f]
    }

    /// `self` then `next`.
    pub fn then(&self, next: &FinFunctor) -> FinFunctor {
        FinFunctor::new(
            self.source.clone(),
            next.target.clone(),
            self.object_map
                .iter()
                .map(|&x| next.object_map[x])
                .collect(),
            self.morphism_map
                .iter()
                .map(|&f| next.morphism_map[f])
                .collect(),
        )
    }

    /// The same maps viewed between the opposite categories.
    pub fn opposite(&self) -> FinFunctor {
        FinFunctor::new(
            Arc::new(self.source.opposite()),
            Arc::new(self.target.opposite()),
            self.object_map.clone(),
            self.morphism_map.clone(),
        )
    }

    pub fn is_identity_on_objects(&self) -> bool {
        self.source.num_objects() == self.target.num_objects()
            && self.object_map.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Exhaustive check of the functor laws.
    pub fn check(&self) -> Report {
        let mut r = Report::new();
        let (s, t) = (&*self.source, &*self.target);
        if self.object_map.len() != s.num_objects() || self.morphism_map.len() != s.num_morphisms()
        {
            r.push(
                "map sizes",
                "object or morphism map does not cover the source",
            );
            return r;
        }
        if let Some(&x) = self.object_map.iter().find(|&&x| x >= t.num_objects()) {
            r.push("object map range", format!("object {x} not in target"));
            return r;
        }
        if let Some(&f) = self.morphism_map.iter().find(|&&f| f >= t.num_morphisms()) {
            r.push("morphism map range", format!("morphism {f} not in target"));
            return r;
        }
        for f in 0..s.num_morphisms() {
            let g = self.morphism_map[f];
            if t.src(g) != self.object_map[s.src(f)] || t.tgt(g) != self.object_map[s.tgt(f)] {
                r.push(
                    "preserves endpoints",
                    format!("{} -> {}", s.morphism(f).name, t.morphism(g).name),
                );
            }
        }
        for x in 0..s.num_objects() {
            if self.morphism_map[s.identity(x)] != t.identity(self.object_map[x]) {
                r.push(
                    "preserves identities",
                    format!("object {}", s.object_name(x)),
                );
            }
        }
        for (f, g, h) in s.compose_entries() {
            let image = t.compose(self.morphism_map[f], self.morphism_map[g]);
            if image != Some(self.morphism_map[h]) {
                r.push(
                    "preserves composition",
                    format!("({}, {})", s.morphism(f).name, s.morphism(g).name),
                );
            }
        }
        r
    }

    /// Bijective on objects and morphisms, and a functor.
    pub fn is_isomorphism(&self) -> bool {
        let bij = |map: &[usize], n: usize| {
            map.len() == n && map.iter().collect::<HashSet<_>>().len() == n
        };
        bij(&self.object_map, self.target.num_objects())
            && bij(&self.morphism_map, self.target.num_morphisms())
            && self.check().is_clean()
    }
}

/// Object and morphism assignments of an isomorphism.
pub type IsoMaps = (Vec<ObjId>, Vec<MorId>);

/// Searches for an isomorphism `a -> b` by backtracking over morphism
/// assignments. Intended for tests on tiny categories only.
pub fn search_isomorphism(
    a: &FinCategory,
    b: &FinCategory,
) -> Result<Option<IsoMaps>, CategoryError> {
    const LIMIT: usize = 12;
    if a.num_morphisms() > LIMIT {
        return Err(CategoryError::TooLargeForSearch {
            limit: LIMIT,
            got: a.num_morphisms(),
        });
    }
    if a.num_objects() != b.num_objects() || a.num_morphisms() != b.num_morphisms() {
        return Ok(None);
    }
    let n = a.num_objects();
    let mut perm: Vec<ObjId> = (0..n).collect();
    let mut result = None;
    permute(&mut perm, 0, &mut |objs| {
        let ok = (0..n).all(|x| (0..n).all(|y| a.hom(x, y).len() == b.hom(objs[x], objs[y]).len()));
        if !ok {
            return false;
        }
        let mut mors = vec![usize::MAX; a.num_morphisms()];
        let mut used = vec![false; b.num_morphisms()];
        if assign(a, b, objs, 0, &mut mors, &mut used) {
            result = Some((objs.to_vec(), mors));
            return true;
        }
        false
    });
    Ok(result)
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return visit(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permute(p, k + 1, visit) {
            return true;
        }
        p.swap(k, i);
    }
    false
}

fn assign(
    a: &FinCategory,
    b: &FinCategory,
    objs: &[ObjId],
    f: MorId,
    mors: &mut [MorId],
    used: &mut [bool],
) -> bool {
    if f == a.num_morphisms() {
        return a
            .compose_entries()
            .all(|(x, y, z)| b.compose(mors[x], mors[y]) == Some(mors[z]));
    }
    let (s, t) = (objs[a.src(f)], objs[a.tgt(f)]);
    let candidates: Vec<MorId> = if a.is_identity(f) {
        vec![b.identity(s)]
    } else {
        b.hom(s, t).to_vec()
    };
    for g in candidates {
        if used[g] {
            continue;
        }
        used[g] = true;
        mors[f] = g;
        if assign(a, b, objs, f + 1, mors, used) {
            return true;
        }
        used[g] = false;
    }
    false
}

/// A category over a base with the same objects, via a projection that is
/// the identity on objects.
#[derive(Debug, Clone)]
pub struct OverCategoryObject {
    projection: FinFunctor,
    fibres: Vec<Vec<MorId>>,
}

impl OverCategoryObject {
    pub fn new(projection: FinFunctor) -> Self {
        let mut fibres = vec![Vec::new(); projection.target().num_morphisms()];
        for (c, &f) in projection.morphism_map.iter().enumerate() {
            if f < fibres.len() {
                fibres[f].push(c);
            }
        }
        Self { projection, fibres }
    }

    pub fn total(&self) -> &Arc<FinCategory> {
        self.projection.source()
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        self.projection.target()
    }

    pub fn projection(&self) -> &FinFunctor {
        &self.projection
    }

    /// Morphisms of the total category lying over `f`.
    pub fn fibre(&self, f: MorId) -> &[MorId] {
        &self.fibres[f]
    }

    pub fn check(&self) -> Report {
        let mut r = self.projection.check();
        if !self.projection.is_identity_on_objects() {
            r.push("projection fixes objects", "object map is not the identity");
        }
        r
    }

    /// `|C(x, y)| == sum of |fibre(f)|` over base arrows `f: x -> y`.
    pub fn check_fibre_decomposition(&self) -> Report {
        let mut r = Report::new();
        let (total, base) = (self.total(), self.base());
        for x in 0..base.num_objects() {
            for y in 0..base.num_objects() {
                let sum: usize = base.hom(x, y).iter().map(|&f| self.fibres[f].len()).sum();
                if sum != total.hom(x, y).len() {
                    r.push(
                        "fibre decomposition",
                        format!(
                            "({}, {}): fibres sum to {sum}, hom-set has {}",
                            base.object_name(x),
                            base.object_name(y),
                            total.hom(x, y).len()
                        ),
                    );
                }
            }
        }
        r
    }

    /// The pullback `C x_B C` with morphisms the pairs of equal projection.
    /// Returns the over-object and the pair behind each new morphism.
    pub fn pullback_over_base(&self) -> (OverCategoryObject, Vec<(MorId, MorId)>) {
        let total = self.total();
        let base = self.base().clone();
        let mut pairs = Vec::new();
        let mut index = HashMap::new();
        for fibre in &self.fibres {
            for &c in fibre {
                for &d in fibre {
                    index.insert((c, d), pairs.len());
                    pairs.push((c, d));
                }
            }
        }
        let morphisms = pairs
            .iter()
            .map(|&(c, d)| Morphism {
                name: format!("({},{})", total.morphism(c).name, total.morphism(d).name),
                src: total.src(c),
                tgt: total.tgt(c),
            })
            .collect();
        let identities = (0..total.num_objects())
            .map(|x| {
                let i = total.identity(x);
                index[&(i, i)]
            })
            .collect();
        let mut compose = Vec::new();
        for (p, &(c, d)) in pairs.iter().enumerate() {
            for &c2 in total.outgoing(total.tgt(c)) {
                for &d2 in total.outgoing(total.tgt(d)) {
                    if let Some(&q) = index.get(&(c2, d2)) {
                        if let (Some(cc), Some(dd)) = (total.compose(c, c2), total.compose(d, d2)) {
                            if let Some(&res) = index.get(&(cc, dd)) {
                                compose.push((p, q, res));
                            }
                        }
                    }
                }
            }
        }
        let cat = Arc::new(
            FinCategory::from_parts(
                total.object_names().to_vec(),
                morphisms,
                identities,
                compose,
            )
            .expect("pullback of a well-formed over-object"),
        );
        let object_map = (0..cat.num_objects()).collect();
        let morphism_map = pairs
            .iter()
            .map(|&(c, _)| self.projection.on_morphism(c))
            .collect();
        (
            OverCategoryObject::new(FinFunctor::new(cat, base, object_map, morphism_map)),
            pairs,
        )
    }

    /// True if `rename` maps the morphisms of `self.total()` onto those of
    /// `other.total()` preserving names of objects, endpoints, composition
    /// and the projection.
    pub fn equals_under(&self, other: &OverCategoryObject, rename: &[MorId]) -> bool {
        let (a, b) = (self.total(), other.total());
        if a.object_names() != b.object_names()
            || a.num_morphisms() != b.num_morphisms()
            || rename.len() != a.num_morphisms()
            || rename.iter().collect::<HashSet<_>>().len() != b.num_morphisms()
        {
            return false;
        }
        let f = FinFunctor::new(
            a.clone(),
            b.clone(),
            (0..a.num_objects()).collect(),
            rename.to_vec(),
        );
        f.check().is_clean()
            && (0..a.num_morphisms())
                .all(|c| self.projection.on_morphism(c) == other.projection.on_morphism(rename[c]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_chain() -> FinCategory {
        FinCategory::chain(2)
    }

    #[test]
    fn terminal_and_arrow_are_valid() {
        assert!(FinCategory::terminal().check_category().is_clean());
        assert!(FinCategory::arrow().check_category().is_clean());
        assert!(two_chain().check_category().is_clean());
    }

    #[test]
    fn missing_composite_is_reported() {
        let objects = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        let m = |n: &str, s, t| Morphism {
            name: n.into(),
            src: s,
            tgt: t,
        };
        let morphisms = vec![
            m("1x", 0, 0),
            m("1y", 1, 1),
            m("1z", 2, 2),
            m("a", 0, 1),
            m("b", 1, 2),
            m("ab", 0, 2),
        ];
        let mut compose = vec![];
        for f in 0..6 {
            let (s, t) = (morphisms[f].src, morphisms[f].tgt);
            compose.push((s, f, f));
            compose.push((f, t, f));
        }
        let c = FinCategory::from_parts(objects, morphisms, vec![0, 1, 2], compose).unwrap();
        let r = c.check_category();
        assert!(r.has_rule("compose not total on composable pairs"));
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn broken_associativity_is_reported() {
        // Two loops on one object with e.e = e but e.f inconsistent.
        let mut b = FinCategory::builder();
        let x = b.object("x");
        let e = b.morphism("e", x, x);
        let f = b.morphism("f", x, x);
        b.set_compose(e, e, e)
            .set_compose(f, f, f)
            .set_compose(e, f, e)
            .set_compose(f, e, f);
        assert!(b.build().unwrap().check_category().is_clean());

        let mut b = FinCategory::builder();
        let x = b.object("x");
        let e = b.morphism("e", x, x);
        let f = b.morphism("f", x, x);
        b.set_compose(e, e, f)
            .set_compose(f, f, f)
            .set_compose(e, f, f)
            .set_compose(f, e, e);
        let r = b.build().unwrap().check_category();
        assert!(r.has_rule("associativity"), "{r}");
    }

    #[test]
    fn rejects_bad_indices_and_duplicates() {
        let m = Morphism {
            name: "a".into(),
            src: 0,
            tgt: 3,
        };
        assert!(matches!(
            FinCategory::from_parts(vec!["x".into()], vec![m], vec![0], vec![]),
            Err(CategoryError::UnknownObject(_, 3))
        ));
        let m = |n: &str| Morphism {
            name: n.into(),
            src: 0,
            tgt: 0,
        };
        assert!(matches!(
            FinCategory::from_parts(vec!["x".into()], vec![m("a"), m("a")], vec![0], vec![]),
            Err(CategoryError::DuplicateName(_))
        ));
    }

    #[test]
    fn opposite_of_terminal_and_arrow() {
        let t = FinCategory::terminal();
        assert_eq!(t.opposite(), t);
        let a = FinCategory::arrow();
        let op = a.opposite();
        let arr = op.morphism_by_name("a").unwrap();
        assert_eq!(op.src(arr), op.object_by_name("y").unwrap());
        assert_eq!(op.tgt(arr), op.object_by_name("x").unwrap());
        assert!(op.check_category().is_clean());
    }

    #[test]
    fn opposite_of_chain_reverses_composition() {
        let c = two_chain();
        let op = c.opposite();
        assert!(op.check_category().is_clean());
        let a = op.morphism_by_name("0<1").unwrap();
        let b = op.morphism_by_name("1<2").unwrap();
        let ab = op.morphism_by_name("0<2").unwrap();
        assert_eq!(op.compose(b, a), Some(ab));
        assert_eq!(op.compose(a, b), None);
        assert_eq!(op.opposite(), c);
    }

    #[test]
    fn factorization_of_terminal_is_terminal() {
        let (f, _) = FinCategory::terminal().factorization_category().unwrap();
        assert_eq!(f.num_objects(), 1);
        assert_eq!(f.num_morphisms(), 1);
        assert!(f.check_category().is_clean());
    }

    #[test]
    fn factorization_of_arrow() {
        let c = FinCategory::arrow();
        let (f, list) = c.factorization_category().unwrap();
        assert!(f.check_category().is_clean());
        assert_eq!(f.num_objects(), 3);
        // three identities plus (1,a): 1_x -> a and (a,1): 1_y -> a
        assert_eq!(f.num_morphisms(), 5);
        let a = c.morphism_by_name("a").unwrap();
        let (x, y) = (
            c.object_by_name("x").unwrap(),
            c.object_by_name("y").unwrap(),
        );
        let one_a = FactMorphism {
            pre: c.identity(x),
            mid: c.identity(x),
            post: a,
        };
        let a_one = FactMorphism {
            pre: a,
            mid: c.identity(y),
            post: c.identity(y),
        };
        assert!(list.contains(&one_a) && list.contains(&a_one));
        assert_eq!(c.fact_target(one_a), Some(a));
        assert_eq!(c.fact_target(a_one), Some(a));
    }

    #[test]
    fn factorization_of_two_chain() {
        let c = two_chain();
        let (f, list) = c.factorization_category().unwrap();
        assert!(f.check_category().is_clean());
        assert_eq!(f.num_objects(), 6);
        let a = c.morphism_by_name("0<1").unwrap();
        let b = c.morphism_by_name("1<2").unwrap();
        let ab = c.morphism_by_name("0<2").unwrap();
        let one2 = c.identity(2);
        let one0 = c.identity(0);
        let m = FactMorphism {
            pre: a,
            mid: b,
            post: one2,
        };
        assert!(list.contains(&m));
        assert_eq!(c.fact_target(m), Some(ab));
        let m = FactMorphism {
            pre: one0,
            mid: a,
            post: b,
        };
        assert!(list.contains(&m));
        assert_eq!(c.fact_target(m), Some(ab));
    }

    #[test]
    fn fact_composition_order() {
        let c = FinCategory::chain(3);
        let m = |n: &str| c.morphism_by_name(n).unwrap();
        let first = FactMorphism {
            pre: m("0<1"),
            mid: m("1<2"),
            post: c.identity(2),
        };
        let second = FactMorphism {
            pre: c.identity(0),
            mid: m("0<2"),
            post: m("2<3"),
        };
        let comp = c.fact_compose(first, second).unwrap();
        assert_eq!(
            comp,
            FactMorphism {
                pre: m("0<1"),
                mid: m("1<2"),
                post: m("2<3")
            }
        );
        assert_eq!(c.fact_target(comp), Some(m("0<3")));
    }

    #[test]
    fn json_round_trip() {
        let c = two_chain();
        let back = FinCategory::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(matches!(
            FinCategory::from_json("{"),
            Err(CategoryError::Malformed(_))
        ));
    }

    fn parallel_over_arrow() -> OverCategoryObject {
        let base = Arc::new(FinCategory::arrow());
        let mut b = FinCategory::builder();
        let x = b.object("x");
        let y = b.object("y");
        b.morphism("a1", x, y);
        b.morphism("a2", x, y);
        let total = Arc::new(b.build().unwrap());
        let a = base.morphism_by_name("a").unwrap();
        let mm = (0..total.num_morphisms())
            .map(|c| {
                if total.is_identity(c) {
                    base.identity(total.src(c))
                } else {
                    a
                }
            })
            .collect();
        OverCategoryObject::new(FinFunctor::new(total, base, vec![0, 1], mm))
    }

    #[test]
    fn fibres_and_pullback() {
        let o = parallel_over_arrow();
        assert!(o.check().is_clean());
        let a = o.base().morphism_by_name("a").unwrap();
        assert_eq!(o.fibre(a).len(), 2);
        assert!(o.check_fibre_decomposition().is_clean());
        let (p, pairs) = o.pullback_over_base();
        assert!(p.total().check_category().is_clean());
        assert!(p.check().is_clean());
        assert_eq!(p.fibre(a).len(), 4);
        assert_eq!(pairs.len(), 6);
        assert!(p.check_fibre_decomposition().is_clean());
    }

    #[test]
    fn pullback_along_identity_is_diagonal() {
        let c = Arc::new(two_chain());
        let o = OverCategoryObject::new(FinFunctor::identity(c.clone()));
        for f in 0..c.num_morphisms() {
            assert_eq!(o.fibre(f), &[f]);
        }
        let (p, pairs) = o.pullback_over_base();
        assert!(pairs.iter().all(|&(c, d)| c == d));
        assert_eq!(p.total().num_morphisms(), c.num_morphisms());
        assert!(o.equals_under(&p, &(0..c.num_morphisms()).collect::<Vec<_>>()));
    }

    #[test]
    fn empty_fibre_gives_empty_pair_fibre() {
        // Base has two parallel arrows; total only covers one of them.
        let mut b = FinCategory::builder();
        let x = b.object("x");
        let y = b.object("y");
        b.morphism("a", x, y);
        b.morphism("b", x, y);
        let base = Arc::new(b.build().unwrap());
        let total = Arc::new(FinCategory::arrow());
        let o = OverCategoryObject::new(FinFunctor::new(
            total,
            base.clone(),
            vec![0, 1],
            vec![0, 1, 2],
        ));
        assert!(o.check().is_clean());
        let bb = base.morphism_by_name("b").unwrap();
        assert!(o.fibre(bb).is_empty());
        let (p, _) = o.pullback_over_base();
        assert!(p.fibre(bb).is_empty());
    }

    #[test]
    fn functor_checks() {
        let c = Arc::new(two_chain());
        assert!(FinFunctor::identity(c.clone()).check().is_clean());
        assert!(FinFunctor::identity(c.clone()).is_isomorphism());
        let t = Arc::new(FinCategory::terminal());
        let collapse = FinFunctor::new(c.clone(), t, vec![0; 3], vec![0; 6]);
        assert!(collapse.check().is_clean());
        let mut bad = FinFunctor::identity(c.clone());
        bad.morphism_map.swap(3, 4);
        assert!(!bad.check().is_clean());
    }

    #[test]
    fn isomorphism_search_small() {
        let c = two_chain();
        let op = c.opposite();
        let found = search_isomorphism(&c, &op).unwrap();
        let (objs, _) = found.expect("a chain is isomorphic to its opposite");
        assert_eq!(objs, vec![2, 1, 0]);
        assert!(search_isomorphism(&c, &FinCategory::arrow())
            .unwrap()
            .is_none());
        let big = FinCategory::chain(5);
        assert!(search_isomorphism(&big, &big).is_err());
    }
}
