use std::collections::BTreeMap;
use std::sync::Arc;

use crate::act::{
    cokernel_classes, embed_pointed_set, ActMorphism, ActSequence, FgAbelian, PointedSet,
};
use crate::fincat::{FinCategory, FinFunctor, MorId};
use crate::linalg::IntMatrix;
use crate::natsys::{
    abelian_pairing, Abelian, CompositionPairing, NatSysMorphism, NaturalSystem, PointedSets,
};
use crate::report::Report;

use super::complex::{swap_complex, Homology, SwapComplex};
use super::{FundCategory, Grid, TraceError};

/// Class of `u . f . v` in the fundamental category.
fn whisker(c: &FinCategory, u: MorId, f: MorId, v: MorId) -> MorId {
    let uf = c.compose(u, f).expect("composable");
    c.compose(uf, v).expect("composable")
}

/// Natural homotopy in degree one: at a class `f: x -> y`, the classes
/// `x -> y` pointed at `f`; maps whisker by `u` and `v`; the pairing is
/// concatenation.
pub fn natural_p1(
    fc: &FundCategory,
) -> (NaturalSystem<PointedSets>, CompositionPairing<PointedSets>) {
    let c = fc.category().clone();
    let values: Vec<PointedSet> = (0..c.num_morphisms())
        .map(|f| {
            let (x, y, k) = fc.triple(f);
            PointedSet {
                size: fc.table().count(x, y),
                base: k,
            }
        })
        .collect();
    let d = NaturalSystem::from_fn(c.clone(), values, |m| {
        let (x, y, _) = fc.triple(m.mid);
        (0..fc.table().count(x, y))
            .map(|e| {
                fc.triple(whisker(&c, m.pre, fc.morphism(x, y, e), m.post))
                    .2
            })
            .collect()
    });
    let nu = CompositionPairing::from_fn(&c, |f, g| {
        let (x, y, _) = fc.triple(f);
        let (_, z, _) = fc.triple(g);
        let t = fc.table();
        let mut table = Vec::with_capacity(t.count(x, y) * t.count(y, z));
        for a in 0..t.count(x, y) {
            for b in 0..t.count(y, z) {
                table.push(t.concat(x, y, a, z, b));
            }
        }
        table
    });
    (d, nu)
}

/// Natural homology `H_n`, valued in `H_{n-1}` of the trace space of the
/// endpoints, with the canonical abelian pairing.
#[derive(Debug, Clone)]
pub struct HSystem {
    pub n: usize,
    pub system: NaturalSystem<Abelian>,
    pub pairing: CompositionPairing<Abelian>,
    /// Swap complexes and homology per vertex pair (`n = 2` only).
    pub complexes: BTreeMap<(usize, usize), (SwapComplex, Homology)>,
}

pub fn natural_h(fc: &FundCategory, n: usize) -> Result<HSystem, TraceError> {
    let c = fc.category().clone();
    let t = fc.table();
    match n {
        1 => {
            let values = (0..c.num_morphisms())
                .map(|f| {
                    let (x, y, _) = fc.triple(f);
                    FgAbelian::free(t.count(x, y))
                })
                .collect();
            let system = NaturalSystem::from_fn(c.clone(), values, |m| {
                let (x, y, _) = fc.triple(m.mid);
                let tgt = c.fact_target(m).expect("composable");
                let (x2, y2, _) = fc.triple(tgt);
                let mut mat = IntMatrix::zeros(t.count(x2, y2), t.count(x, y));
                for e in 0..t.count(x, y) {
                    let image = fc
                        .triple(whisker(&c, m.pre, fc.morphism(x, y, e), m.post))
                        .2;
                    mat.set(image, e, 1);
                }
                mat
            });
            let pairing = abelian_pairing(&system);
            Ok(HSystem {
                n,
                system,
                pairing,
                complexes: BTreeMap::new(),
            })
        }
        2 => {
            let grid = fc.grid();
            let mut complexes = BTreeMap::new();
            for (x, y) in t.pairs() {
                let sc = swap_complex(grid, x, y);
                let h = Homology::new(&sc)?;
                complexes.insert((x, y), (sc, h));
            }
            let values = (0..c.num_morphisms())
                .map(|f| {
                    let (x, y, _) = fc.triple(f);
                    complexes[&(x, y)].1.h1.clone()
                })
                .collect();
            let mut failure = None;
            let system = NaturalSystem::from_fn(c.clone(), values, |m| {
                let (x, y, _) = fc.triple(m.mid);
                let tgt = c.fact_target(m).expect("composable");
                let (x2, y2, _) = fc.triple(tgt);
                let (src_sc, src_h) = &complexes[&(x, y)];
                let (dst_sc, dst_h) = &complexes[&(x2, y2)];
                let cols = src_h.h1.num_generators();
                let mut mat = IntMatrix::zeros(dst_h.h1.num_generators(), cols);
                if cols == 0 || mat.rows() == 0 {
                    return mat;
                }
                let (u, v) = (fc.rep(m.pre), fc.rep(m.post));
                for k in 0..cols {
                    let image: Vec<(usize, i64)> = src_h
                        .h1_generator(k)
                        .iter()
                        .map(|&(e, s)| {
                            let (w, p) = src_sc.edges[e];
                            let word: Vec<u8> =
                                u.iter().chain(&src_sc.words[w]).chain(v).copied().collect();
                            let wi = dst_sc
                                .word_index(&word)
                                .expect("whiskered word is a dipath");
                            let e2 = dst_sc
                                .edge_index(wi, p + u.len())
                                .expect("whiskered swap is allowed");
                            (e2, s)
                        })
                        .collect();
                    match dst_h.h1_coordinates(&image) {
                        Ok(coords) => {
                            for (i, val) in coords.into_iter().enumerate() {
                                mat.set(i, k, val);
                            }
                        }
                        Err(e) => failure = Some(e),
                    }
                }
                mat
            });
            if let Some(e) = failure {
                return Err(e);
            }
            let pairing = abelian_pairing(&system);
            Ok(HSystem {
                n,
                system,
                pairing,
                complexes,
            })
        }
        _ => Err(TraceError::Index(n)),
    }
}

/// Compares the homology of the pair's swap complex with the direct sum of
/// the homology of its components, in degrees 0 and 1.
pub fn check_h_decomposition(grid: &Grid, x: usize, y: usize) -> Result<Report, TraceError> {
    let mut r = Report::new();
    let sc = swap_complex(grid, x, y);
    let whole = Homology::new(&sc)?;
    let count = whole.h0.rank;
    let (mut h0, mut h1) = (FgAbelian::zero(), FgAbelian::zero());
    for k in 0..count {
        let part = Homology::new(&sc.component(grid, k))?;
        h0 = h0.direct_sum(&part.h0);
        h1 = h1.direct_sum(&part.h1);
    }
    let pair = format!("({}, {})", grid.name(x), grid.name(y));
    if h0 != whole.h0 {
        r.push(
            "decomposition",
            format!("{pair}: H0 {} vs sum {}", whole.h0, h0),
        );
    }
    if h1 != whole.h1 {
        r.push(
            "decomposition",
            format!("{pair}: H1 {} vs sum {}", whole.h1, h1),
        );
    }
    Ok(r)
}

/// The reversal functor `Pi(X#) -> Pi(X)^op` sending a class to the class
/// of its reversed word.
#[derive(Debug, Clone)]
pub struct Reversal {
    pub functor: FinFunctor,
}

impl Reversal {
    /// Index, within its pair in `X`, of the reverse of class `i` of the
    /// pair underlying `f` in `X#`.
    pub fn element(&self, rev: &FundCategory, fwd: &FundCategory, f: MorId, i: usize) -> usize {
        let (x, y, _) = rev.triple(f);
        fwd.triple(self.functor.on_morphism(rev.morphism(x, y, i)))
            .2
    }

    /// A report naming every pair whose classes are not matched one to one.
    pub fn check_bijections(&self, rev: &FundCategory, fwd: &FundCategory) -> Report {
        let mut r = Report::new();
        for (x, y) in rev.table().pairs() {
            let (fx, fy) = (self.functor.on_object(x), self.functor.on_object(y));
            let n = rev.table().count(x, y);
            let mut seen = vec![false; fwd.table().count(fy, fx)];
            for i in 0..n {
                let (a, b, k) = fwd.triple(self.functor.on_morphism(rev.morphism(x, y, i)));
                if (a, b) != (fy, fx) || seen[k] {
                    r.push(
                        "class bijection",
                        format!("({}, {}) class {i}", rev.grid().name(x), rev.grid().name(y)),
                    );
                } else {
                    seen[k] = true;
                }
            }
            if seen.len() != n {
                r.push(
                    "class bijection",
                    format!(
                        "({}, {}): {n} classes against {}",
                        rev.grid().name(x),
                        rev.grid().name(y),
                        seen.len()
                    ),
                );
            }
        }
        r
    }
}

/// Builds the reversal functor. `bounds` are those of the ambient box, so a
/// vertex `v` of `X#` corresponds to `bounds - v` in `X`.
pub fn reversal_bijections(
    fwd: &FundCategory,
    rev: &FundCategory,
    bounds: &[i64],
) -> Result<Reversal, TraceError> {
    let (gf, gr) = (fwd.grid(), rev.grid());
    let object_map: Vec<usize> = (0..gr.num_vertices())
        .map(|v| {
            let p: Vec<i64> = gr
                .vertex(v)
                .iter()
                .zip(bounds)
                .map(|(&c, &b)| b - c)
                .collect();
            gf.index_of(&p)
        })
        .collect::<Result<_, _>>()?;
    let mut morphism_map = Vec::with_capacity(rev.category().num_morphisms());
    for f in 0..rev.category().num_morphisms() {
        let (_, y, _) = rev.triple(f);
        let word: Vec<u8> = rev.rep(f).iter().rev().copied().collect();
        let image = fwd
            .class_of_word(object_map[y], &word)
            .ok_or_else(|| TraceError::UnknownVertex(gr.vertex(y).to_vec()))?;
        morphism_map.push(image);
    }
    let target = Arc::new(fwd.category().opposite());
    Ok(Reversal {
        functor: FinFunctor::new(rev.category().clone(), target, object_map, morphism_map),
    })
}

/// Relative natural homotopy of a subspace `A` of `X`, indexed over the
/// fundamental category of `A`.
#[derive(Debug, Clone)]
pub struct RelativeP1 {
    /// `Pi(A) -> Pi(X)`.
    pub inclusion: FinFunctor,
    pub p1_a: NaturalSystem<PointedSets>,
    /// `P1(X)` restricted along the inclusion.
    pub p1_x: NaturalSystem<PointedSets>,
    /// Per class: the cokernel of `P1(A) -> P1(X)`.
    pub p1_rel: NaturalSystem<PointedSets>,
    pub to_x: NatSysMorphism<PointedSets>,
    pub to_rel: NatSysMorphism<PointedSets>,
}

pub fn relative_p1(x: &FundCategory, a: &FundCategory) -> Result<RelativeP1, TraceError> {
    let (gx, ga) = (x.grid(), a.grid());
    let object_map: Vec<usize> = (0..ga.num_vertices())
        .map(|v| {
            gx.index_of(ga.vertex(v))
                .map_err(|_| TraceError::Containment(format!("vertex {}", ga.name(v))))
        })
        .collect::<Result<_, _>>()?;
    let ca = a.category().clone();
    let mut morphism_map = Vec::with_capacity(ca.num_morphisms());
    for f in 0..ca.num_morphisms() {
        let (s, _, _) = a.triple(f);
        let image = x.class_of_word(object_map[s], a.rep(f)).ok_or_else(|| {
            TraceError::Containment(format!("dipath {} of A", ca.morphism(f).name))
        })?;
        morphism_map.push(image);
    }
    let inclusion = FinFunctor::new(ca.clone(), x.category().clone(), object_map, morphism_map);

    let (p1_a, _) = natural_p1(a);
    let (p1_full, _) = natural_p1(x);
    let p1_x = p1_full.reindex(&inclusion);

    let mut to_x = Vec::with_capacity(ca.num_morphisms());
    let mut to_rel = Vec::with_capacity(ca.num_morphisms());
    let mut rel_values = Vec::with_capacity(ca.num_morphisms());
    for f in 0..ca.num_morphisms() {
        let (s, t, _) = a.triple(f);
        let h: Vec<usize> = (0..a.table().count(s, t))
            .map(|i| x.triple(inclusion.on_morphism(a.morphism(s, t, i))).2)
            .collect();
        let m = act_map(p1_a.value(f), p1_x.value(f), &h);
        let classes = cokernel_classes(&m);
        let size = classes.iter().max().map_or(0, |&k| k + 1);
        rel_values.push(PointedSet {
            size,
            base: classes[p1_x.value(f).base],
        });
        to_x.push(h);
        to_rel.push(classes);
    }
    // induced maps: push a representative through and project
    let p1_rel = NaturalSystem::from_fn(ca.clone(), rel_values.clone(), |m| {
        let tgt = ca.fact_target(m).expect("composable");
        let map = p1_x.map(m).expect("total");
        let mut out = vec![usize::MAX; rel_values[m.mid].size];
        for (e, &k) in to_rel[m.mid].iter().enumerate() {
            if out[k] == usize::MAX {
                out[k] = to_rel[tgt][map[e]];
            }
        }
        out
    });
    Ok(RelativeP1 {
        inclusion,
        p1_a,
        p1_x,
        p1_rel,
        to_x: NatSysMorphism { components: to_x },
        to_rel: NatSysMorphism { components: to_rel },
    })
}

fn act_map(src: &PointedSet, tgt: &PointedSet, f: &[usize]) -> ActMorphism {
    ActMorphism::new(
        embed_pointed_set(src),
        embed_pointed_set(tgt),
        f.to_vec(),
        vec![0],
    )
    .expect("pointed map")
}

impl RelativeP1 {
    /// `Rel_f -> P1(A)_f -> P1(X)_f -> P1(X, A)_f -> 0`, where `Rel_f` is
    /// the set of classes of `A` that become equal to `f` in `X`.
    pub fn tail(&self, f: MorId) -> ActSequence {
        let h = &self.to_x.components[f];
        let a = self.p1_a.value(f);
        let target = h[a.base];
        let fibre: Vec<usize> = (0..a.size).filter(|&i| h[i] == target).collect();
        let base = fibre
            .iter()
            .position(|&i| i == a.base)
            .expect("f lies over its own image");
        let rel = PointedSet {
            size: fibre.len(),
            base,
        };
        let rel_value = self.p1_rel.value(f);
        let to_zero = ActMorphism::to_zero(&embed_pointed_set(rel_value));
        ActSequence::new(vec![
            act_map(&rel, a, &fibre),
            act_map(a, self.p1_x.value(f), h),
            act_map(self.p1_x.value(f), rel_value, &self.to_rel.components[f]),
            to_zero,
        ])
        .expect("consecutive maps match")
    }

    /// Exactness of every tail, and naturality of both maps.
    pub fn check(&self) -> Report {
        let mut r = Report::new();
        r.extend_with_context(
            "P1(A) -> P1(X)",
            self.to_x.check_naturality(&self.p1_a, &self.p1_x),
        );
        r.extend_with_context(
            "P1(X) -> P1(X,A)",
            self.to_rel.check_naturality(&self.p1_x, &self.p1_rel),
        );
        let base = self.inclusion.source();
        for f in 0..base.num_morphisms() {
            r.extend_with_context(&base.morphism(f).name, self.tail(f).check_exact());
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispace::{BoxComplement, DirectedSubspace, Hole};
    use crate::natsys::check_pairing;

    fn space(bounds: &[i64], holes: &[(&[i64], &[i64])]) -> BoxComplement {
        let holes = holes
            .iter()
            .map(|(lo, hi)| Hole {
                lo: lo.to_vec(),
                hi: hi.to_vec(),
            })
            .collect();
        BoxComplement::new(bounds.to_vec(), holes).unwrap()
    }

    fn fund(b: &BoxComplement) -> FundCategory {
        FundCategory::new(Arc::new(Grid::new(b.region())))
    }

    #[test]
    fn p1_of_swiss_flag() {
        let x = space(&[4, 4], &[(&[1, 1], &[3, 3])]);
        let fc = fund(&x);
        let (d, nu) = natural_p1(&fc);
        assert!(d.check_functoriality().is_clean());
        let r = check_pairing(&d, &nu);
        assert!(r.is_clean(), "{r}");
        let g = fc.grid();
        let corner = fc.morphism(
            g.index_of(&[0, 0]).unwrap(),
            g.index_of(&[4, 4]).unwrap(),
            0,
        );
        assert_eq!(d.value(corner).size, 2);
    }

    #[test]
    fn p1_of_empty_square_is_singletons() {
        let fc = fund(&space(&[2, 2], &[]));
        let (d, _) = natural_p1(&fc);
        assert!(d.values().iter().all(|v| v.size == 1));
    }

    #[test]
    fn h_systems_of_hollow_cube() {
        let x = space(&[3, 3, 3], &[(&[1, 1, 1], &[2, 2, 2])]);
        let fc = fund(&x);
        let corner = fc.morphism(0, fc.grid().num_vertices() - 1, 0);
        let h1 = natural_h(&fc, 1).unwrap();
        assert_eq!(h1.system.value(corner), &FgAbelian::free(1));
        let h2 = natural_h(&fc, 2).unwrap();
        assert_eq!(h2.system.value(corner), &FgAbelian::free(1));
        let r = h2.system.check_functoriality();
        assert!(r.is_clean(), "{r}");
        let r = check_pairing(&h2.system, &h2.pairing);
        assert!(r.is_clean(), "{r}");
        assert!(matches!(natural_h(&fc, 3), Err(TraceError::Index(3))));
        // whiskering the inner square's circle out to the corners is an iso
        let g = fc.grid();
        let inner = fc.morphism(
            g.index_of(&[1, 1, 1]).unwrap(),
            g.index_of(&[2, 2, 2]).unwrap(),
            0,
        );
        let u = fc.morphism(0, g.index_of(&[1, 1, 1]).unwrap(), 0);
        let v = fc.morphism(g.index_of(&[2, 2, 2]).unwrap(), g.num_vertices() - 1, 0);
        let m = h2
            .system
            .map(crate::fincat::FactMorphism {
                pre: u,
                mid: inner,
                post: v,
            })
            .unwrap();
        assert_eq!(m.get(0, 0).abs(), 1);
    }

    #[test]
    fn decomposition_on_swiss_flag() {
        let x = space(&[4, 4], &[(&[1, 1], &[3, 3])]);
        let g = Grid::new(x.region());
        assert!(check_h_decomposition(&g, 0, g.num_vertices() - 1)
            .unwrap()
            .is_clean());
    }

    #[test]
    fn reversal_is_an_isomorphism() {
        let x = space(&[4, 3], &[(&[1, 1], &[2, 2]), (&[3, 0], &[4, 2])]);
        let (f, r) = (fund(&x), fund(&x.reverse()));
        let rev = reversal_bijections(&f, &r, x.bounds()).unwrap();
        assert!(rev.functor.is_isomorphism());
        assert!(rev.check_bijections(&r, &f).is_clean());
    }

    #[test]
    fn relative_tail_is_exact() {
        let x = space(&[4, 4], &[(&[1, 1], &[2, 2]), (&[2, 2], &[3, 3])]);
        let a = DirectedSubspace::new(x.clone(), vec![0, 0], vec![3, 3], vec![]).unwrap();
        let fx = fund(&x);
        let fa = FundCategory::new(Arc::new(Grid::new(a.region())));
        let rel = relative_p1(&fx, &fa).unwrap();
        assert!(rel.inclusion.check().is_clean());
        assert!(rel.p1_rel.check_functoriality().is_clean());
        let r = rel.check();
        assert!(r.is_clean(), "{r}");
        assert_eq!(rel.tail(0).maps.len(), 4);

        let whole = relative_p1(&fx, &fx).unwrap();
        assert!(whole.p1_rel.values().iter().all(|v| v.size == 1));
    }
}
