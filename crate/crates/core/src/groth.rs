//! The total category of a natural system with composition pairing, split
//! objects and internal groups over a base, opposites and the reversal
//! duality functor.
//!
//! A morphism `x -> y` of the total category is a pair `(c, f)` with
//! `f: x -> y` in the base and `c` in `D_f`; composition is
//! `(c, f)(d, g) = (nu_{f,g}(c, d), fg)`. Finite values can be materialized
//! as a [`FinCategory`]; abelian values with free part stay symbolic and are
//! checked on a bounded sample of elements.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use thiserror::Error;

use crate::act::{FgAbelian, FinGroup, PointedSet};
use crate::fincat::{FactMorphism, FinCategory, FinFunctor, MorId, Morphism, OverCategoryObject};
use crate::linalg::IntMatrix;
use crate::natsys::{
    check_pairing, normalize_matrix, Abelian, CompositionPairing, Groups, NaturalSystem,
    PointedSets, ValueCategory,
};
use crate::report::Report;

#[derive(Debug, Error)]
pub enum GrothError {
    #[error("pairing invalid:\n{0}")]
    PairingInvalid(Report),
    #[error("value over {0} is infinite")]
    Infinite(String),
}

/// Value categories whose objects have elements we can compute with.
pub trait Elements: ValueCategory {
    type Element: Clone + Eq + Hash + Debug;

    /// Every element in a fixed order, or `None` for an infinite object.
    fn elements(x: &Self::Object) -> Option<Vec<Self::Element>>;

    /// All elements of a finite object; otherwise a bounded generating sample.
    fn sample(x: &Self::Object) -> Vec<Self::Element>;

    fn apply(m: &Self::Morphism, tgt: &Self::Object, e: &Self::Element) -> Self::Element;

    fn pair(
        p: &Self::Pairing,
        l: &Self::Object,
        r: &Self::Object,
        t: &Self::Object,
        a: &Self::Element,
        b: &Self::Element,
    ) -> Self::Element;

    /// The element picked out by the unit (base point or group unit).
    fn distinguished(x: &Self::Object) -> Self::Element;

    /// The map determined by `f`, read off on elements or generators.
    fn tabulate(
        src: &Self::Object,
        tgt: &Self::Object,
        f: impl Fn(&Self::Element) -> Self::Element,
    ) -> Self::Morphism;
}

/// Element-level group operations.
pub trait GroupValues: Elements {
    fn mul(x: &Self::Object, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn inv(x: &Self::Object, a: &Self::Element) -> Self::Element;
}

impl Elements for PointedSets {
    type Element = usize;

    fn elements(x: &PointedSet) -> Option<Vec<usize>> {
        Some((0..x.size).collect())
    }

    fn sample(x: &PointedSet) -> Vec<usize> {
        (0..x.size).collect()
    }

    fn apply(m: &Vec<usize>, _: &PointedSet, e: &usize) -> usize {
        m[*e]
    }

    fn pair(
        p: &Vec<usize>,
        _: &PointedSet,
        r: &PointedSet,
        _: &PointedSet,
        a: &usize,
        b: &usize,
    ) -> usize {
        p[a * r.size + b]
    }

    fn distinguished(x: &PointedSet) -> usize {
        x.base
    }

    fn tabulate(src: &PointedSet, _: &PointedSet, f: impl Fn(&usize) -> usize) -> Vec<usize> {
        (0..src.size).map(|e| f(&e)).collect()
    }
}

impl Elements for Groups {
    type Element = usize;

    fn elements(x: &FinGroup) -> Option<Vec<usize>> {
        Some(x.elements().collect())
    }

    fn sample(x: &FinGroup) -> Vec<usize> {
        x.elements().collect()
    }

    fn apply(m: &Vec<usize>, _: &FinGroup, e: &usize) -> usize {
        m[*e]
    }

    fn pair(
        p: &Vec<usize>,
        _: &FinGroup,
        r: &FinGroup,
        _: &FinGroup,
        a: &usize,
        b: &usize,
    ) -> usize {
        p[a * r.order() + b]
    }

    fn distinguished(x: &FinGroup) -> usize {
        x.unit()
    }

    fn tabulate(src: &FinGroup, _: &FinGroup, f: impl Fn(&usize) -> usize) -> Vec<usize> {
        src.elements().map(|e| f(&e)).collect()
    }
}

impl GroupValues for Groups {
    fn mul(x: &FinGroup, a: &usize, b: &usize) -> usize {
        x.mul(*a, *b)
    }

    fn inv(x: &FinGroup, a: &usize) -> usize {
        x.inv(*a)
    }
}

fn unit_vector(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Largest finite abelian group we enumerate.
const ENUMERATION_LIMIT: i64 = 4096;

impl Elements for Abelian {
    type Element = Vec<i64>;

    fn elements(x: &FgAbelian) -> Option<Vec<Vec<i64>>> {
        if x.rank > 0 || x.torsion.iter().product::<i64>() > ENUMERATION_LIMIT {
            return None;
        }
        let mut out = vec![vec![]];
        for &d in &x.torsion {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..d).map(move |k| {
                        let mut w = v.clone();
                        w.push(k);
                        w
                    })
                })
                .collect();
        }
        Some(out)
    }

    fn sample(x: &FgAbelian) -> Vec<Vec<i64>> {
        if let Some(all) = Self::elements(x) {
            return all;
        }
        let n = x.num_generators();
        let mut out = vec![vec![0; n]];
        for i in 0..n {
            out.push(unit_vector(n, i));
            let mut neg = unit_vector(n, i);
            neg[i] = -1;
            x.normalize(&mut neg);
            out.push(neg);
            for j in i + 1..n {
                let mut s = unit_vector(n, i);
                s[j] = 1;
                out.push(s);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn apply(m: &IntMatrix, tgt: &FgAbelian, e: &Vec<i64>) -> Vec<i64> {
        let mut v = m.mul_vec(e).expect("element within range");
        tgt.normalize(&mut v);
        v
    }

    fn pair(
        p: &IntMatrix,
        _: &FgAbelian,
        _: &FgAbelian,
        t: &FgAbelian,
        a: &Vec<i64>,
        b: &Vec<i64>,
    ) -> Vec<i64> {
        let ab: Vec<i64> = a.iter().chain(b).copied().collect();
        let mut v = p.mul_vec(&ab).expect("element within range");
        t.normalize(&mut v);
        v
    }

    fn distinguished(x: &FgAbelian) -> Vec<i64> {
        vec![0; x.num_generators()]
    }

    fn tabulate(src: &FgAbelian, tgt: &FgAbelian, f: impl Fn(&Vec<i64>) -> Vec<i64>) -> IntMatrix {
        let n = src.num_generators();
        let rows = tgt.num_generators();
        let mut m = IntMatrix::zeros(rows, n);
        for j in 0..n {
            let col = f(&unit_vector(n, j));
            for (i, v) in col.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        normalize_matrix(m, tgt)
    }
}

impl GroupValues for Abelian {
    fn mul(x: &FgAbelian, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        let mut v: Vec<i64> = a.iter().zip(b).map(|(p, q)| p + q).collect();
        x.normalize(&mut v);
        v
    }

    fn inv(x: &FgAbelian, a: &Vec<i64>) -> Vec<i64> {
        let mut v: Vec<i64> = a.iter().map(|p| -p).collect();
        x.normalize(&mut v);
        v
    }
}

/// A morphism `(element, base)` of a total category.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TotalArrow<E> {
    pub element: E,
    pub base: MorId,
}

/// The total category of `(D, nu)`, computed on demand.
#[derive(Debug, Clone)]
pub struct TotalCategory<V: Elements> {
    system: NaturalSystem<V>,
    pairing: CompositionPairing<V>,
}

/// Checks the pairing and wraps the pair as a total category.
pub fn build_total_category<V: Elements>(
    d: NaturalSystem<V>,
    nu: CompositionPairing<V>,
) -> Result<TotalCategory<V>, GrothError> {
    let r = check_pairing(&d, &nu);
    if !r.is_clean() {
        return Err(GrothError::PairingInvalid(r));
    }
    Ok(TotalCategory {
        system: d,
        pairing: nu,
    })
}

impl<V: Elements> TotalCategory<V> {
    pub fn base(&self) -> &Arc<FinCategory> {
        self.system.base()
    }

    pub fn system(&self) -> &NaturalSystem<V> {
        &self.system
    }

    pub fn pairing(&self) -> &CompositionPairing<V> {
        &self.pairing
    }

    /// `a` then `b`, if their base arrows compose.
    pub fn compose(
        &self,
        a: &TotalArrow<V::Element>,
        b: &TotalArrow<V::Element>,
    ) -> Option<TotalArrow<V::Element>> {
        let c = self.base();
        let fg = c.compose(a.base, b.base)?;
        let vals = self.system.values();
        let p = self.pairing.get(a.base, b.base)?;
        Some(TotalArrow {
            element: V::pair(
                p,
                &vals[a.base],
                &vals[b.base],
                &vals[fg],
                &a.element,
                &b.element,
            ),
            base: fg,
        })
    }

    /// The section (unit) at `f`.
    pub fn section(&self, f: MorId) -> TotalArrow<V::Element> {
        TotalArrow {
            element: V::distinguished(self.system.value(f)),
            base: f,
        }
    }

    pub fn identity(&self, x: usize) -> TotalArrow<V::Element> {
        self.section(self.base().identity(x))
    }

    /// The total category of the flat system over the opposite base.
    pub fn opposite(&self) -> TotalCategory<V> {
        TotalCategory {
            system: self.system.flat(),
            pairing: self.pairing.flat(&self.system),
        }
    }

    /// Lays the category out as finite tables. Fails on infinite values.
    pub fn materialize(&self) -> Result<SplitObject, GrothError> {
        let c = self.base();
        let mut offsets = Vec::with_capacity(c.num_morphisms() + 1);
        let mut elements = Vec::with_capacity(c.num_morphisms());
        let mut morphisms = Vec::new();
        let mut element_of = Vec::new();
        for f in 0..c.num_morphisms() {
            let es = V::elements(self.system.value(f))
                .ok_or_else(|| GrothError::Infinite(c.morphism(f).name.clone()))?;
            offsets.push(morphisms.len());
            let m = c.morphism(f);
            for i in 0..es.len() {
                morphisms.push(Morphism {
                    name: format!("{i}@{}", m.name),
                    src: m.src,
                    tgt: m.tgt,
                });
                element_of.push(i);
            }
            elements.push(es);
        }
        offsets.push(morphisms.len());
        let index: Vec<HashMap<&V::Element, usize>> = elements
            .iter()
            .map(|es| es.iter().enumerate().map(|(i, e)| (e, i)).collect())
            .collect();
        let locate = |a: &TotalArrow<V::Element>| offsets[a.base] + index[a.base][&a.element];
        let identities: Vec<MorId> = (0..c.num_objects())
            .map(|x| locate(&self.identity(x)))
            .collect();
        let mut compose = Vec::new();
        for (f, g) in c.composable_pairs() {
            for (i, a) in elements[f].iter().enumerate() {
                for (j, b) in elements[g].iter().enumerate() {
                    let ab = self
                        .compose(
                            &TotalArrow {
                                element: a.clone(),
                                base: f,
                            },
                            &TotalArrow {
                                element: b.clone(),
                                base: g,
                            },
                        )
                        .expect("composable");
                    compose.push((offsets[f] + i, offsets[g] + j, locate(&ab)));
                }
            }
        }
        let total = Arc::new(
            FinCategory::from_parts(c.object_names().to_vec(), morphisms, identities, compose)
                .expect("total category tables are consistent"),
        );
        let projection: Vec<MorId> = (0..c.num_morphisms())
            .flat_map(|f| std::iter::repeat_n(f, offsets[f + 1] - offsets[f]))
            .collect();
        let ids: Vec<usize> = (0..c.num_objects()).collect();
        let over = OverCategoryObject::new(FinFunctor::new(
            total.clone(),
            c.clone(),
            ids.clone(),
            projection,
        ));
        let section = (0..c.num_morphisms())
            .map(|f| locate(&self.section(f)))
            .collect();
        Ok(SplitObject {
            over,
            section: FinFunctor::new(c.clone(), total, ids, section),
            element: element_of,
            offsets,
        })
    }

    /// The natural system read back from the total category: `D(u, v)` is
    /// whiskering by the sections of `u` and `v`.
    pub fn extract_system(&self) -> NaturalSystem<V> {
        let c = self.base().clone();
        let vals = self.system.values().to_vec();
        NaturalSystem::from_fn(c.clone(), vals.clone(), |m| {
            let t = c.fact_target(m).expect("base is a category");
            V::tabulate(&vals[m.mid], &vals[t], |e| {
                let core = TotalArrow {
                    element: e.clone(),
                    base: m.mid,
                };
                let left = self
                    .compose(&self.section(m.pre), &core)
                    .expect("composable");
                self.compose(&left, &self.section(m.post))
                    .expect("composable")
                    .element
            })
        })
    }
}

impl<V: GroupValues> TotalCategory<V> {
    /// Group laws in every fibre, interchange of the fibre product with
    /// composition, and unit sections composing, all on sampled elements.
    pub fn verify_group_structure(&self) -> Report {
        let mut r = Report::new();
        let c = self.base();
        let vals = self.system.values();
        let samples: Vec<Vec<V::Element>> = vals.iter().map(V::sample).collect();
        let name = |f: MorId| c.morphism(f).name.as_str();
        for f in 0..c.num_morphisms() {
            let x = &vals[f];
            let e = V::distinguished(x);
            let s = &samples[f];
            if s.is_empty() {
                r.push("nonempty fibre", name(f));
                continue;
            }
            for a in s {
                if V::mul(x, &e, a) != *a || V::mul(x, a, &e) != *a {
                    r.push("fibre unit", format!("{}: {:?}", name(f), a));
                }
                if V::mul(x, a, &V::inv(x, a)) != e {
                    r.push("fibre inverse", format!("{}: {:?}", name(f), a));
                }
                for b in s {
                    for cc in s {
                        let l = V::mul(x, &V::mul(x, a, b), cc);
                        let rr = V::mul(x, a, &V::mul(x, b, cc));
                        if l != rr {
                            r.push(
                                "fibre associativity",
                                format!("{}: {:?} {:?} {:?}", name(f), a, b, cc),
                            );
                        }
                    }
                }
            }
        }
        for (f, g) in c.composable_pairs() {
            let fg = c.compose(f, g).expect("composable");
            let t = &vals[fg];
            let arrow = |e: &V::Element, b: MorId| TotalArrow {
                element: e.clone(),
                base: b,
            };
            if self.compose(&self.section(f), &self.section(g)) != Some(self.section(fg)) {
                r.push(
                    "unit section is a functor",
                    format!("({}, {})", name(f), name(g)),
                );
            }
            for a in &samples[f] {
                for a2 in &samples[f] {
                    let prod_f = V::mul(&vals[f], a, a2);
                    for b in &samples[g] {
                        for b2 in &samples[g] {
                            let prod_g = V::mul(&vals[g], b, b2);
                            let left = self
                                .compose(&arrow(&prod_f, f), &arrow(&prod_g, g))
                                .expect("composable")
                                .element;
                            let x = self
                                .compose(&arrow(a, f), &arrow(b, g))
                                .expect("composable")
                                .element;
                            let y = self
                                .compose(&arrow(a2, f), &arrow(b2, g))
                                .expect("composable")
                                .element;
                            if left != V::mul(t, &x, &y) {
                                r.push(
                                    "multiplication is a functor on the pullback",
                                    format!(
                                        "({}, {}): {:?} {:?} {:?} {:?}",
                                        name(f),
                                        name(g),
                                        a,
                                        a2,
                                        b,
                                        b2
                                    ),
                                );
                            }
                        }
                    }
                }
            }
        }
        r
    }
}

/// A category over the base with a section of the projection, laid out as
/// tables. The morphisms over `f` are contiguous and numbered by element.
#[derive(Debug, Clone)]
pub struct SplitObject {
    pub over: OverCategoryObject,
    pub section: FinFunctor,
    element: Vec<usize>,
    offsets: Vec<usize>,
}

impl SplitObject {
    /// The base over itself, which is what a trivial value system builds.
    pub fn identity(base: Arc<FinCategory>) -> Self {
        let n = base.num_morphisms();
        Self {
            over: OverCategoryObject::new(FinFunctor::identity(base.clone())),
            section: FinFunctor::identity(base),
            element: vec![0; n],
            offsets: (0..=n).collect(),
        }
    }

    pub fn total(&self) -> &Arc<FinCategory> {
        self.over.total()
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        self.over.base()
    }

    /// Index of the element carried by a total morphism.
    pub fn element(&self, m: MorId) -> usize {
        self.element[m]
    }

    pub fn fibre_size(&self, f: MorId) -> usize {
        self.offsets[f + 1] - self.offsets[f]
    }

    /// The total morphism `(i, f)`.
    pub fn morphism_of(&self, f: MorId, i: usize) -> MorId {
        debug_assert!(i < self.fibre_size(f));
        self.offsets[f] + i
    }

    /// Category axioms, projection, fibre decomposition, the section being a
    /// functor with `p . e = id`, and nonempty fibres.
    pub fn verify(&self) -> Report {
        let mut r = Report::new();
        r.extend_with_context("total", self.total().check_category());
        r.extend_with_context("projection", self.over.check());
        r.extend(self.over.check_fibre_decomposition());
        r.extend_with_context("section", self.section.check());
        let base = self.base();
        for f in 0..base.num_morphisms() {
            if self.fibre_size(f) == 0 {
                r.push("nonempty fibre", base.morphism(f).name.clone());
            } else if self
                .over
                .projection()
                .on_morphism(self.section.on_morphism(f))
                != f
            {
                r.push("section law", base.morphism(f).name.clone());
            }
        }
        r
    }

    /// The opposite over-object with the same morphism numbering.
    pub fn opposite(&self) -> SplitObject {
        SplitObject {
            over: OverCategoryObject::new(self.over.projection().opposite()),
            section: self.section.opposite(),
            element: self.element.clone(),
            offsets: self.offsets.clone(),
        }
    }

    /// Whiskers `(c, f)` by the sections of `u` and `v`.
    fn whisker(&self, m: FactMorphism, i: usize) -> usize {
        let total = self.total();
        let core = self.morphism_of(m.mid, i);
        let left = total
            .compose(self.section.on_morphism(m.pre), core)
            .expect("composable");
        let w = total
            .compose(left, self.section.on_morphism(m.post))
            .expect("composable");
        self.element[w]
    }

    /// The pointed-set system of fibres, based at the section, with maps
    /// given by whiskering.
    pub fn extract_pointed(&self) -> NaturalSystem<PointedSets> {
        let base = self.base().clone();
        let values: Vec<PointedSet> = (0..base.num_morphisms())
            .map(|f| PointedSet {
                size: self.fibre_size(f),
                base: self.element[self.section.on_morphism(f)],
            })
            .collect();
        NaturalSystem::from_fn(base, values.clone(), |m| {
            (0..values[m.mid].size)
                .map(|i| self.whisker(m, i))
                .collect()
        })
    }
}

/// A split object whose fibres carry group tables.
#[derive(Debug, Clone)]
pub struct InternalGroup {
    pub split: SplitObject,
    /// Per base arrow, `mult[f][i * n + j]` with `n` the fibre size.
    pub mult: Vec<Vec<usize>>,
    pub inverse: Vec<Vec<usize>>,
}

impl InternalGroup {
    /// Materializes a finite group-valued total category.
    pub fn from_total<V: GroupValues>(t: &TotalCategory<V>) -> Result<Self, GrothError> {
        let split = t.materialize()?;
        let vals = t.system().values();
        let mut mult = Vec::with_capacity(vals.len());
        let mut inverse = Vec::with_capacity(vals.len());
        for (f, x) in vals.iter().enumerate() {
            let es = V::elements(x)
                .ok_or_else(|| GrothError::Infinite(t.base().morphism(f).name.clone()))?;
            let index: HashMap<&V::Element, usize> =
                es.iter().enumerate().map(|(i, e)| (e, i)).collect();
            mult.push(
                es.iter()
                    .flat_map(|a| {
                        es.iter()
                            .map(|b| index[&V::mul(x, a, b)])
                            .collect::<Vec<_>>()
                    })
                    .collect(),
            );
            inverse.push(es.iter().map(|a| index[&V::inv(x, a)]).collect());
        }
        Ok(Self {
            split,
            mult,
            inverse,
        })
    }

    /// The opposite internal group: opposite total and base, same fibre tables.
    pub fn opposite(&self) -> InternalGroup {
        InternalGroup {
            split: self.split.opposite(),
            mult: self.mult.clone(),
            inverse: self.inverse.clone(),
        }
    }

    /// The group on the fibre over `f`.
    pub fn fibre_group(&self, f: MorId) -> Option<FinGroup> {
        FinGroup::from_table(self.split.fibre_size(f), self.mult[f].clone())
    }

    /// The group-valued system of fibres with maps by whiskering.
    pub fn extract_groups(&self) -> Option<NaturalSystem<Groups>> {
        let base = self.split.base().clone();
        let values: Option<Vec<FinGroup>> = (0..base.num_morphisms())
            .map(|f| self.fibre_group(f))
            .collect();
        let values = values?;
        let sizes: Vec<usize> = values.iter().map(FinGroup::order).collect();
        Some(NaturalSystem::from_fn(base, values, |m| {
            (0..sizes[m.mid])
                .map(|i| self.split.whisker(m, i))
                .collect()
        }))
    }
}

/// Split-object checks plus group laws per fibre, unit at the section,
/// multiplication functorial on the pullback.
pub fn verify_internal_group(g: &InternalGroup) -> Report {
    let mut r = g.split.verify();
    let base = g.split.base();
    let total = g.split.total();
    let name = |f: MorId| base.morphism(f).name.as_str();
    let n_of = |f: MorId| g.split.fibre_size(f);
    for f in 0..base.num_morphisms() {
        let n = n_of(f);
        let (m, inv) = (&g.mult[f], &g.inverse[f]);
        if m.len() != n * n || inv.len() != n || m.iter().chain(inv).any(|&x| x >= n) {
            r.push("fibre table shape", name(f));
            continue;
        }
        let e = g.split.element(g.split.section.on_morphism(f));
        for a in 0..n {
            if m[e * n + a] != a || m[a * n + e] != a {
                r.push("fibre unit", format!("{}: element {a}", name(f)));
            }
            if m[a * n + inv[a]] != e || m[inv[a] * n + a] != e {
                r.push("fibre inverse", format!("{}: element {a}", name(f)));
            }
            for b in 0..n {
                for c in 0..n {
                    if m[m[a * n + b] * n + c] != m[a * n + m[b * n + c]] {
                        r.push(
                            "fibre associativity",
                            format!("{}: ({a}, {b}, {c})", name(f)),
                        );
                    }
                }
            }
        }
    }
    if !r.is_clean() {
        return r;
    }
    for (f, h) in base.composable_pairs() {
        let fh = base.compose(f, h).expect("composable");
        let (nf, nh, nfh) = (n_of(f), n_of(h), n_of(fh));
        let comp = |i: usize, j: usize| {
            let m = total
                .compose(g.split.morphism_of(f, i), g.split.morphism_of(h, j))
                .expect("composable");
            g.split.element(m)
        };
        for a in 0..nf {
            for a2 in 0..nf {
                for b in 0..nh {
                    for b2 in 0..nh {
                        let left = comp(g.mult[f][a * nf + a2], g.mult[h][b * nh + b2]);
                        let right = g.mult[fh][comp(a, b) * nfh + comp(a2, b2)];
                        if left != right {
                            r.push(
                                "multiplication is a functor on the pullback",
                                format!("({}, {}): ({a},{a2}) ({b},{b2})", name(f), name(h)),
                            );
                        }
                    }
                }
            }
        }
    }
    r
}

/// The total category of the flat system is the opposite of the total
/// category, table for table, with `(i, f)` matched to `(i, f)`.
pub fn check_flat_square<V: Elements>(t: &TotalCategory<V>) -> Result<Report, GrothError> {
    let mut r = Report::new();
    let direct = t.materialize()?.opposite();
    let flat = t.opposite().materialize()?;
    let (a, b) = (direct.total(), flat.total());
    if a.num_morphisms() != b.num_morphisms() || a.object_names() != b.object_names() {
        r.push("flat square", "totals differ in size or objects");
        return Ok(r);
    }
    for m in 0..a.num_morphisms() {
        if a.morphism(m) != b.morphism(m) {
            r.push(
                "flat square",
                format!("morphism {} differs", a.morphism(m).name),
            );
        }
    }
    for (f, g, h) in a.compose_entries() {
        if b.compose(f, g) != Some(h) {
            r.push(
                "flat square",
                format!(
                    "composite of {} and {}",
                    a.morphism(f).name,
                    a.morphism(g).name
                ),
            );
        }
    }
    if a.compose_entries().count() != b.compose_entries().count() {
        r.push("flat square", "composition tables have different sizes");
    }
    if direct.section.morphism_map != flat.section.morphism_map {
        r.push("flat square", "sections differ");
    }
    if direct.over.projection().morphism_map != flat.over.projection().morphism_map {
        r.push("flat square", "projections differ");
    }
    Ok(r)
}

/// The functor `rev.total -> fwd.total^op` sending `(c, f)` to
/// `(element_map(f, c), base_iso(f))`, with a report on bijectivity per
/// hom-set, functoriality and the projection triangle.
///
/// `base_iso` goes from `rev.base()` to the opposite of `fwd.base()`.
pub fn duality_iso(
    fwd: &SplitObject,
    rev: &SplitObject,
    base_iso: &FinFunctor,
    element_map: impl Fn(MorId, usize) -> usize,
) -> (FinFunctor, Report) {
    let mut r = Report::new();
    r.extend_with_context("base functor", base_iso.check());
    let target = fwd.opposite();
    let (src, tgt) = (rev.total(), target.total());
    let mut morphism_map = Vec::with_capacity(src.num_morphisms());
    for m in 0..src.num_morphisms() {
        let f = rev.over.projection().on_morphism(m);
        let f2 = base_iso.on_morphism(f);
        let i = element_map(f, rev.element(m));
        if i >= fwd.fibre_size(f2) {
            r.push(
                "element map range",
                format!("{} has no image", src.morphism(m).name),
            );
            morphism_map.push(0);
        } else {
            morphism_map.push(fwd.morphism_of(f2, i));
        }
    }
    let functor = FinFunctor::new(
        src.clone(),
        tgt.clone(),
        base_iso.object_map.clone(),
        morphism_map,
    );
    if !r.is_clean() {
        return (functor, r);
    }
    for x in 0..src.num_objects() {
        for y in 0..src.num_objects() {
            let hom = src.hom(x, y);
            let (fx, fy) = (functor.on_object(x), functor.on_object(y));
            let mut image: Vec<MorId> = hom.iter().map(|&m| functor.on_morphism(m)).collect();
            image.sort_unstable();
            image.dedup();
            if image.len() != hom.len() || image.len() != tgt.hom(fx, fy).len() {
                r.push(
                    "hom-set bijection",
                    format!(
                        "({}, {}): {} arrows, {} distinct images, target has {}",
                        src.object_name(x),
                        src.object_name(y),
                        hom.len(),
                        image.len(),
                        tgt.hom(fx, fy).len()
                    ),
                );
            }
        }
    }
    r.extend_with_context("functor", functor.check());
    for m in 0..src.num_morphisms() {
        let down = target.over.projection().on_morphism(functor.on_morphism(m));
        let across = base_iso.on_morphism(rev.over.projection().on_morphism(m));
        if down != across {
            r.push("projection triangle", src.morphism(m).name.clone());
        }
    }
    (functor, r)
}
