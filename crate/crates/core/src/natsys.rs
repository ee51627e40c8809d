//! Natural systems on finite categories, composition pairings and their
//! coherence checks.
//!
//! A natural system assigns a value `D_f` to every morphism `f` of the base
//! and a map `D(u,v): D_f -> D_{ufv}` to every factorization-category
//! morphism. A composition pairing is a family `nu_{f,g}: D_f x D_g -> D_{fg}`.
//! Unit maps `T -> D_{1_x}` are not stored: in every value category here
//! they pick out the distinguished element, so they are determined.

use std::collections::HashMap;
use std::fmt::Debug;
use std::sync::Arc;

use serde::Serialize;

use crate::act::{is_homomorphism, ActObject, FgAbelian, FinGroup, PointedSet};
use crate::fincat::{CategoryDoc, FactMorphism, FinCategory, FinFunctor, MorId};
use crate::linalg::IntMatrix;
use crate::report::Report;

/// A cartesian value category with finite descriptions of objects, maps and
/// binary maps out of products.
pub trait ValueCategory: 'static {
    type Object: Clone + PartialEq + Debug + Serialize;
    type Morphism: Clone + PartialEq + Debug + Serialize;
    type Pairing: Clone + PartialEq + Debug + Serialize;

    const NAME: &'static str;

    fn identity(x: &Self::Object) -> Self::Morphism;

    /// `first` then `second`, with `target` the codomain of `second`.
    fn compose(
        first: &Self::Morphism,
        second: &Self::Morphism,
        target: &Self::Object,
    ) -> Self::Morphism;

    fn validate(m: &Self::Morphism, src: &Self::Object, tgt: &Self::Object) -> Result<(), String>;

    /// A witness that the two parallel maps differ.
    fn differ(
        a: &Self::Morphism,
        b: &Self::Morphism,
        src: &Self::Object,
        tgt: &Self::Object,
    ) -> Option<String>;

    fn validate_pairing(
        p: &Self::Pairing,
        l: &Self::Object,
        r: &Self::Object,
        t: &Self::Object,
    ) -> Result<(), String>;

    /// `p` then `m`.
    fn pairing_then(
        p: &Self::Pairing,
        m: &Self::Morphism,
        l: &Self::Object,
        r: &Self::Object,
        t2: &Self::Object,
    ) -> Self::Pairing;

    /// `a x b` then `p`, where `a: la -> l` and `b: rb -> r`.
    #[allow(clippy::too_many_arguments)]
    fn pairing_after(
        p: &Self::Pairing,
        a: &Self::Morphism,
        b: &Self::Morphism,
        la: &Self::Object,
        rb: &Self::Object,
        l: &Self::Object,
        r: &Self::Object,
        t: &Self::Object,
    ) -> Self::Pairing;

    fn pairings_differ(
        p: &Self::Pairing,
        q: &Self::Pairing,
        l: &Self::Object,
        r: &Self::Object,
        t: &Self::Object,
    ) -> Option<String>;

    /// Precomposes with the symmetry `r x l -> l x r`.
    fn swap_pairing(p: &Self::Pairing, l: &Self::Object, r: &Self::Object) -> Self::Pairing;

    /// Compares `nu_{fg,h} (nu_{f,g} x 1)` with `nu_{f,gh} (1 x nu_{g,h})`.
    fn cocycle_defect(nu: CocycleData<'_, Self>) -> Option<String>;

    /// `nu_{f,1}(d, e) = d` for the distinguished `e` of `D_1`.
    fn right_unit_defect(p: &Self::Pairing, df: &Self::Object, d1: &Self::Object)
        -> Option<String>;

    /// `nu_{1,f}(e, d) = d` for the distinguished `e` of `D_1`.
    fn left_unit_defect(p: &Self::Pairing, d1: &Self::Object, df: &Self::Object) -> Option<String>;
}

/// The four pairings and six values entering the cocycle square for `(f, g, h)`.
pub struct CocycleData<'a, V: ValueCategory + ?Sized> {
    pub fg: &'a V::Pairing,
    pub fg_h: &'a V::Pairing,
    pub gh: &'a V::Pairing,
    pub f_gh: &'a V::Pairing,
    pub df: &'a V::Object,
    pub dg: &'a V::Object,
    pub dh: &'a V::Object,
    pub dgh: &'a V::Object,
    pub dfgh: &'a V::Object,
}

/// Finite pointed sets; maps are tables, pairings are tables on `l x r`.
#[derive(Debug, Clone, Copy)]
pub struct PointedSets;

/// Finite groups; maps are homomorphism tables.
#[derive(Debug, Clone, Copy)]
pub struct Groups;

/// Finitely generated abelian groups in Smith coordinates; maps are matrices
/// and a pairing `[A | B]` sends `(a, b)` to `A a + B b`.
#[derive(Debug, Clone, Copy)]
pub struct Abelian;

/// Right actions on pointed sets; maps are (set table, group table).
#[derive(Debug, Clone, Copy)]
pub struct Actions;

fn table_differ(a: &[usize], b: &[usize], what: &str) -> Option<String> {
    if a.len() != b.len() {
        return Some(format!(
            "{what} tables have sizes {} and {}",
            a.len(),
            b.len()
        ));
    }
    a.iter()
        .zip(b)
        .position(|(x, y)| x != y)
        .map(|i| format!("{what} element {i}: {} vs {}", a[i], b[i]))
}

fn pair_table_differ(p: &[usize], q: &[usize], r: usize, what: &str) -> Option<String> {
    if p.len() != q.len() {
        return Some(format!(
            "{what} tables have sizes {} and {}",
            p.len(),
            q.len()
        ));
    }
    p.iter().zip(q).position(|(x, y)| x != y).map(|i| {
        format!(
            "{what} at ({}, {}): {} vs {}",
            i / r.max(1),
            i % r.max(1),
            p[i],
            q[i]
        )
    })
}

fn swap_table(p: &[usize], l: usize, r: usize) -> Vec<usize> {
    let mut out = vec![0; l * r];
    for e in 0..r {
        for d in 0..l {
            out[e * l + d] = p[d * r + e];
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn table_cocycle(
    fg: &[usize],
    fg_h: &[usize],
    gh: &[usize],
    f_gh: &[usize],
    nf: usize,
    ng: usize,
    nh: usize,
    ngh: usize,
) -> Option<String> {
    for d in 0..nf {
        for e in 0..ng {
            for k in 0..nh {
                let left = fg_h[fg[d * ng + e] * nh + k];
                let right = f_gh[d * ngh + gh[e * nh + k]];
                if left != right {
                    return Some(format!("({d}, {e}, {k}): {left} vs {right}"));
                }
            }
        }
    }
    None
}

impl ValueCategory for PointedSets {
    type Object = PointedSet;
    type Morphism = Vec<usize>;
    type Pairing = Vec<usize>;

    const NAME: &'static str = "pointed sets";

    fn identity(x: &PointedSet) -> Vec<usize> {
        (0..x.size).collect()
    }

    fn compose(first: &Vec<usize>, second: &Vec<usize>, _: &PointedSet) -> Vec<usize> {
        first.iter().map(|&x| second[x]).collect()
    }

    fn validate(m: &Vec<usize>, src: &PointedSet, tgt: &PointedSet) -> Result<(), String> {
        if m.len() != src.size || m.iter().any(|&y| y >= tgt.size) {
            return Err("table size or range".into());
        }
        if m[src.base] != tgt.base {
            return Err(format!("base point goes to {}", m[src.base]));
        }
        Ok(())
    }

    fn differ(a: &Vec<usize>, b: &Vec<usize>, _: &PointedSet, _: &PointedSet) -> Option<String> {
        table_differ(a, b, "set")
    }

    fn validate_pairing(
        p: &Vec<usize>,
        l: &PointedSet,
        r: &PointedSet,
        t: &PointedSet,
    ) -> Result<(), String> {
        if p.len() != l.size * r.size || p.iter().any(|&y| y >= t.size) {
            return Err("pairing table size or range".into());
        }
        if p[l.base * r.size + r.base] != t.base {
            return Err("pairing does not preserve base points".into());
        }
        Ok(())
    }

    fn pairing_then(
        p: &Vec<usize>,
        m: &Vec<usize>,
        _: &PointedSet,
        _: &PointedSet,
        _: &PointedSet,
    ) -> Vec<usize> {
        p.iter().map(|&x| m[x]).collect()
    }

    fn pairing_after(
        p: &Vec<usize>,
        a: &Vec<usize>,
        b: &Vec<usize>,
        la: &PointedSet,
        rb: &PointedSet,
        _: &PointedSet,
        r: &PointedSet,
        _: &PointedSet,
    ) -> Vec<usize> {
        let mut out = Vec::with_capacity(la.size * rb.size);
        for d in 0..la.size {
            for e in 0..rb.size {
                out.push(p[a[d] * r.size + b[e]]);
            }
        }
        out
    }

    fn pairings_differ(
        p: &Vec<usize>,
        q: &Vec<usize>,
        _: &PointedSet,
        r: &PointedSet,
        _: &PointedSet,
    ) -> Option<String> {
        pair_table_differ(p, q, r.size, "pair")
    }

    fn swap_pairing(p: &Vec<usize>, l: &PointedSet, r: &PointedSet) -> Vec<usize> {
        swap_table(p, l.size, r.size)
    }

    fn cocycle_defect(nu: CocycleData<'_, Self>) -> Option<String> {
        table_cocycle(
            nu.fg,
            nu.fg_h,
            nu.gh,
            nu.f_gh,
            nu.df.size,
            nu.dg.size,
            nu.dh.size,
            nu.dgh.size,
        )
    }

    fn right_unit_defect(p: &Vec<usize>, df: &PointedSet, d1: &PointedSet) -> Option<String> {
        (0..df.size)
            .find(|&d| p[d * d1.size + d1.base] != d)
            .map(|d| format!("element {d} goes to {}", p[d * d1.size + d1.base]))
    }

    fn left_unit_defect(p: &Vec<usize>, d1: &PointedSet, df: &PointedSet) -> Option<String> {
        (0..df.size)
            .find(|&d| p[d1.base * df.size + d] != d)
            .map(|d| format!("element {d} goes to {}", p[d1.base * df.size + d]))
    }
}

impl ValueCategory for Groups {
    type Object = FinGroup;
    type Morphism = Vec<usize>;
    type Pairing = Vec<usize>;

    const NAME: &'static str = "groups";

    fn identity(x: &FinGroup) -> Vec<usize> {
        x.elements().collect()
    }

    fn compose(first: &Vec<usize>, second: &Vec<usize>, _: &FinGroup) -> Vec<usize> {
        first.iter().map(|&x| second[x]).collect()
    }

    fn validate(m: &Vec<usize>, src: &FinGroup, tgt: &FinGroup) -> Result<(), String> {
        if is_homomorphism(src, tgt, m) {
            Ok(())
        } else {
            Err("not a homomorphism".into())
        }
    }

    fn differ(a: &Vec<usize>, b: &Vec<usize>, _: &FinGroup, _: &FinGroup) -> Option<String> {
        table_differ(a, b, "group")
    }

    fn validate_pairing(
        p: &Vec<usize>,
        l: &FinGroup,
        r: &FinGroup,
        t: &FinGroup,
    ) -> Result<(), String> {
        let (nl, nr) = (l.order(), r.order());
        if p.len() != nl * nr || p.iter().any(|&y| y >= t.order()) {
            return Err("pairing table size or range".into());
        }
        for a in 0..nl {
            for b in 0..nr {
                for a2 in 0..nl {
                    for b2 in 0..nr {
                        let lhs = p[l.mul(a, a2) * nr + r.mul(b, b2)];
                        let rhs = t.mul(p[a * nr + b], p[a2 * nr + b2]);
                        if lhs != rhs {
                            return Err(format!(
                                "not a homomorphism on the product at ({a},{b}),({a2},{b2})"
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn pairing_then(
        p: &Vec<usize>,
        m: &Vec<usize>,
        _: &FinGroup,
        _: &FinGroup,
        _: &FinGroup,
    ) -> Vec<usize> {
        p.iter().map(|&x| m[x]).collect()
    }

    fn pairing_after(
        p: &Vec<usize>,
        a: &Vec<usize>,
        b: &Vec<usize>,
        la: &FinGroup,
        rb: &FinGroup,
        _: &FinGroup,
        r: &FinGroup,
        _: &FinGroup,
    ) -> Vec<usize> {
        let mut out = Vec::with_capacity(la.order() * rb.order());
        for d in la.elements() {
            for e in rb.elements() {
                out.push(p[a[d] * r.order() + b[e]]);
            }
        }
        out
    }

    fn pairings_differ(
        p: &Vec<usize>,
        q: &Vec<usize>,
        _: &FinGroup,
        r: &FinGroup,
        _: &FinGroup,
    ) -> Option<String> {
        pair_table_differ(p, q, r.order(), "pair")
    }

    fn swap_pairing(p: &Vec<usize>, l: &FinGroup, r: &FinGroup) -> Vec<usize> {
        swap_table(p, l.order(), r.order())
    }

    fn cocycle_defect(nu: CocycleData<'_, Self>) -> Option<String> {
        table_cocycle(
            nu.fg,
            nu.fg_h,
            nu.gh,
            nu.f_gh,
            nu.df.order(),
            nu.dg.order(),
            nu.dh.order(),
            nu.dgh.order(),
        )
    }

    fn right_unit_defect(p: &Vec<usize>, df: &FinGroup, d1: &FinGroup) -> Option<String> {
        df.elements()
            .find(|&d| p[d * d1.order() + d1.unit()] != d)
            .map(|d| format!("element {d} goes to {}", p[d * d1.order() + d1.unit()]))
    }

    fn left_unit_defect(p: &Vec<usize>, d1: &FinGroup, df: &FinGroup) -> Option<String> {
        df.elements()
            .find(|&d| p[d1.unit() * df.order() + d] != d)
            .map(|d| format!("element {d} goes to {}", p[d1.unit() * df.order() + d]))
    }
}

/// Reduces torsion rows modulo their order.
pub fn normalize_matrix(mut m: IntMatrix, target: &FgAbelian) -> IntMatrix {
    for (i, &d) in target.torsion.iter().enumerate() {
        for j in 0..m.cols() {
            m.set(i, j, m.get(i, j).rem_euclid(d));
        }
    }
    m
}

fn well_defined(m: &IntMatrix, src_moduli: &[i64], tgt: &FgAbelian) -> Result<(), String> {
    if m.rows() != tgt.num_generators() || m.cols() != src_moduli.len() {
        return Err(format!(
            "matrix is {}x{}, expected {}x{}",
            m.rows(),
            m.cols(),
            tgt.num_generators(),
            src_moduli.len()
        ));
    }
    for (j, &d) in src_moduli.iter().enumerate() {
        if d == 0 {
            continue;
        }
        for i in 0..m.rows() {
            let v = m.get(i, j) as i128 * d as i128;
            let t = tgt.modulus(i) as i128;
            if (t == 0 && v != 0) || (t != 0 && v % t != 0) {
                return Err(format!(
                    "generator {j} of order {d} is not killed in coordinate {i}"
                ));
            }
        }
    }
    Ok(())
}

fn moduli(g: &FgAbelian) -> Vec<i64> {
    (0..g.num_generators()).map(|i| g.modulus(i)).collect()
}

fn matrix_differ(a: &IntMatrix, b: &IntMatrix, t: &FgAbelian) -> Option<String> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Some("matrix shapes differ".into());
    }
    let (a, b) = (
        normalize_matrix(a.clone(), t),
        normalize_matrix(b.clone(), t),
    );
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if a.get(i, j) != b.get(i, j) {
                return Some(format!(
                    "entry ({i}, {j}): {} vs {}",
                    a.get(i, j),
                    b.get(i, j)
                ));
            }
        }
    }
    None
}

fn split_pairing(p: &IntMatrix, nl: usize) -> (IntMatrix, IntMatrix) {
    let rows = p.rows();
    let mut a = IntMatrix::zeros(rows, nl);
    let mut b = IntMatrix::zeros(rows, p.cols() - nl);
    for i in 0..rows {
        for j in 0..p.cols() {
            if j < nl {
                a.set(i, j, p.get(i, j));
            } else {
                b.set(i, j - nl, p.get(i, j));
            }
        }
    }
    (a, b)
}

fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a.mul(b).expect("matrix product within range")
}

impl ValueCategory for Abelian {
    type Object = FgAbelian;
    type Morphism = IntMatrix;
    type Pairing = IntMatrix;

    const NAME: &'static str = "abelian groups";

    fn identity(x: &FgAbelian) -> IntMatrix {
        IntMatrix::identity(x.num_generators())
    }

    fn compose(first: &IntMatrix, second: &IntMatrix, target: &FgAbelian) -> IntMatrix {
        normalize_matrix(mul(second, first), target)
    }

    fn validate(m: &IntMatrix, src: &FgAbelian, tgt: &FgAbelian) -> Result<(), String> {
        well_defined(m, &moduli(src), tgt)
    }

    fn differ(a: &IntMatrix, b: &IntMatrix, _: &FgAbelian, tgt: &FgAbelian) -> Option<String> {
        matrix_differ(a, b, tgt)
    }

    fn validate_pairing(
        p: &IntMatrix,
        l: &FgAbelian,
        r: &FgAbelian,
        t: &FgAbelian,
    ) -> Result<(), String> {
        let mut m = moduli(l);
        m.extend(moduli(r));
        well_defined(p, &m, t)
    }

    fn pairing_then(
        p: &IntMatrix,
        m: &IntMatrix,
        _: &FgAbelian,
        _: &FgAbelian,
        t2: &FgAbelian,
    ) -> IntMatrix {
        normalize_matrix(mul(m, p), t2)
    }

    fn pairing_after(
        p: &IntMatrix,
        a: &IntMatrix,
        b: &IntMatrix,
        _: &FgAbelian,
        _: &FgAbelian,
        l: &FgAbelian,
        _: &FgAbelian,
        t: &FgAbelian,
    ) -> IntMatrix {
        let (pa, pb) = split_pairing(p, l.num_generators());
        let left = mul(&pa, a);
        let right = mul(&pb, b);
        normalize_matrix(left.hconcat(&right).expect("same rows"), t)
    }

    fn pairings_differ(
        p: &IntMatrix,
        q: &IntMatrix,
        _: &FgAbelian,
        _: &FgAbelian,
        t: &FgAbelian,
    ) -> Option<String> {
        matrix_differ(p, q, t)
    }

    fn swap_pairing(p: &IntMatrix, l: &FgAbelian, _: &FgAbelian) -> IntMatrix {
        let (a, b) = split_pairing(p, l.num_generators());
        b.hconcat(&a).expect("same rows")
    }

    fn cocycle_defect(nu: CocycleData<'_, Self>) -> Option<String> {
        let (nf, ng) = (nu.df.num_generators(), nu.dg.num_generators());
        let (a_fg, b_fg) = split_pairing(nu.fg, nf);
        let (c, d) = split_pairing(nu.fg_h, nu.fg.rows());
        let (a_gh, b_gh) = split_pairing(nu.gh, ng);
        let (e, f) = split_pairing(nu.f_gh, nf);
        let left = mul(&c, &a_fg)
            .hconcat(&mul(&c, &b_fg))
            .and_then(|m| m.hconcat(&d))
            .expect("rows");
        let right = e
            .hconcat(&mul(&f, &a_gh))
            .and_then(|m| m.hconcat(&mul(&f, &b_gh)))
            .expect("rows");
        matrix_differ(&left, &right, nu.dfgh)
    }

    fn right_unit_defect(p: &IntMatrix, df: &FgAbelian, _: &FgAbelian) -> Option<String> {
        let (a, _) = split_pairing(p, df.num_generators());
        matrix_differ(&a, &IntMatrix::identity(df.num_generators()), df)
    }

    fn left_unit_defect(p: &IntMatrix, d1: &FgAbelian, df: &FgAbelian) -> Option<String> {
        let (_, b) = split_pairing(p, d1.num_generators());
        matrix_differ(&b, &IntMatrix::identity(df.num_generators()), df)
    }
}

impl ValueCategory for Actions {
    type Object = ActObject;
    type Morphism = (Vec<usize>, Vec<usize>);
    type Pairing = (Vec<usize>, Vec<usize>);

    const NAME: &'static str = "actions";

    fn identity(x: &ActObject) -> Self::Morphism {
        ((0..x.size()).collect(), x.group().elements().collect())
    }

    fn compose(first: &Self::Morphism, second: &Self::Morphism, _: &ActObject) -> Self::Morphism {
        (
            first.0.iter().map(|&x| second.0[x]).collect(),
            first.1.iter().map(|&g| second.1[g]).collect(),
        )
    }

    fn validate(m: &Self::Morphism, src: &ActObject, tgt: &ActObject) -> Result<(), String> {
        crate::act::ActMorphism::new(src.clone(), tgt.clone(), m.0.clone(), m.1.clone())
            .map(|_| ())
            .map_err(|e| e.to_string())
    }

    fn differ(
        a: &Self::Morphism,
        b: &Self::Morphism,
        _: &ActObject,
        _: &ActObject,
    ) -> Option<String> {
        table_differ(&a.0, &b.0, "set").or_else(|| table_differ(&a.1, &b.1, "group"))
    }

    fn validate_pairing(
        p: &Self::Pairing,
        l: &ActObject,
        r: &ActObject,
        t: &ActObject,
    ) -> Result<(), String> {
        let product = product_action(l, r).map_err(|e| e.to_string())?;
        crate::act::ActMorphism::new(product, t.clone(), p.0.clone(), p.1.clone())
            .map(|_| ())
            .map_err(|e| e.to_string())
    }

    fn pairing_then(
        p: &Self::Pairing,
        m: &Self::Morphism,
        _: &ActObject,
        _: &ActObject,
        _: &ActObject,
    ) -> Self::Pairing {
        (
            p.0.iter().map(|&x| m.0[x]).collect(),
            p.1.iter().map(|&g| m.1[g]).collect(),
        )
    }

    fn pairing_after(
        p: &Self::Pairing,
        a: &Self::Morphism,
        b: &Self::Morphism,
        la: &ActObject,
        rb: &ActObject,
        _: &ActObject,
        r: &ActObject,
        _: &ActObject,
    ) -> Self::Pairing {
        let mut set = Vec::with_capacity(la.size() * rb.size());
        for d in 0..la.size() {
            for e in 0..rb.size() {
                set.push(p.0[a.0[d] * r.size() + b.0[e]]);
            }
        }
        let mut grp = Vec::with_capacity(la.group().order() * rb.group().order());
        for g in la.group().elements() {
            for h in rb.group().elements() {
                grp.push(p.1[a.1[g] * r.group().order() + b.1[h]]);
            }
        }
        (set, grp)
    }

    fn pairings_differ(
        p: &Self::Pairing,
        q: &Self::Pairing,
        _: &ActObject,
        r: &ActObject,
        _: &ActObject,
    ) -> Option<String> {
        pair_table_differ(&p.0, &q.0, r.size(), "set pair")
            .or_else(|| pair_table_differ(&p.1, &q.1, r.group().order(), "group pair"))
    }

    fn swap_pairing(p: &Self::Pairing, l: &ActObject, r: &ActObject) -> Self::Pairing {
        (
            swap_table(&p.0, l.size(), r.size()),
            swap_table(&p.1, l.group().order(), r.group().order()),
        )
    }

    fn cocycle_defect(nu: CocycleData<'_, Self>) -> Option<String> {
        table_cocycle(
            &nu.fg.0,
            &nu.fg_h.0,
            &nu.gh.0,
            &nu.f_gh.0,
            nu.df.size(),
            nu.dg.size(),
            nu.dh.size(),
            nu.dgh.size(),
        )
        .or_else(|| {
            table_cocycle(
                &nu.fg.1,
                &nu.fg_h.1,
                &nu.gh.1,
                &nu.f_gh.1,
                nu.df.group().order(),
                nu.dg.group().order(),
                nu.dh.group().order(),
                nu.dgh.group().order(),
            )
        })
    }

    fn right_unit_defect(p: &Self::Pairing, df: &ActObject, d1: &ActObject) -> Option<String> {
        let (n1, g1) = (d1.size(), d1.group().order());
        (0..df.size())
            .find(|&d| p.0[d * n1 + d1.base()] != d)
            .map(|d| format!("element {d}"))
            .or_else(|| {
                df.group()
                    .elements()
                    .find(|&g| p.1[g * g1 + d1.group().unit()] != g)
                    .map(|g| format!("group element {g}"))
            })
    }

    fn left_unit_defect(p: &Self::Pairing, d1: &ActObject, df: &ActObject) -> Option<String> {
        let (nf, gf) = (df.size(), df.group().order());
        (0..nf)
            .find(|&d| p.0[d1.base() * nf + d] != d)
            .map(|d| format!("element {d}"))
            .or_else(|| {
                df.group()
                    .elements()
                    .find(|&g| p.1[d1.group().unit() * gf + g] != g)
                    .map(|g| format!("group element {g}"))
            })
    }
}

/// Product action `(x, y) . (g, h) = (x . g, y . h)`.
pub fn product_action(l: &ActObject, r: &ActObject) -> Result<ActObject, crate::act::ActError> {
    let group = l.group().product(r.group());
    let (nr, gr) = (r.size(), r.group().order());
    ActObject::from_fn(l.size() * nr, l.base() * nr + r.base(), group, |x, g| {
        l.act(x / nr, g / gr) * nr + r.act(x % nr, g % gr)
    })
}

/// A functor `Fact(base) -> V` stored as explicit tables.
#[derive(Debug, Clone)]
pub struct NaturalSystem<V: ValueCategory> {
    base: Arc<FinCategory>,
    values: Vec<V::Object>,
    maps: HashMap<FactMorphism, V::Morphism>,
}

impl<V: ValueCategory> NaturalSystem<V> {
    /// Tabulates `map` on every factorization-category morphism.
    pub fn from_fn(
        base: Arc<FinCategory>,
        values: Vec<V::Object>,
        mut map: impl FnMut(FactMorphism) -> V::Morphism,
    ) -> Self {
        let maps = base.fact_morphisms().map(|m| (m, map(m))).collect();
        Self { base, values, maps }
    }

    pub fn from_tables(
        base: Arc<FinCategory>,
        values: Vec<V::Object>,
        maps: HashMap<FactMorphism, V::Morphism>,
    ) -> Self {
        Self { base, values, maps }
    }

    /// The same value everywhere, with identity maps.
    pub fn constant(base: Arc<FinCategory>, value: V::Object) -> Self {
        let values = vec![value.clone(); base.num_morphisms()];
        let id = V::identity(&value);
        Self::from_fn(base, values, |_| id.clone())
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn value(&self, f: MorId) -> &V::Object {
        &self.values[f]
    }

    pub fn values(&self) -> &[V::Object] {
        &self.values
    }

    pub fn map(&self, m: FactMorphism) -> Option<&V::Morphism> {
        self.maps.get(&m)
    }

    pub fn maps(&self) -> &HashMap<FactMorphism, V::Morphism> {
        &self.maps
    }

    /// `D(u, 1)` as a map `D_f -> D_{uf}`.
    pub fn pre(&self, u: MorId, f: MorId) -> Option<&V::Morphism> {
        let one = self.base.identity(self.base.tgt(f));
        self.maps.get(&FactMorphism {
            pre: u,
            mid: f,
            post: one,
        })
    }

    /// `D(1, v)` as a map `D_f -> D_{fv}`.
    pub fn post(&self, f: MorId, v: MorId) -> Option<&V::Morphism> {
        let one = self.base.identity(self.base.src(f));
        self.maps.get(&FactMorphism {
            pre: one,
            mid: f,
            post: v,
        })
    }

    /// Functor laws on every composable pair of factorization-category
    /// morphisms, plus totality and validity of every map.
    pub fn check_functoriality(&self) -> Report {
        let mut r = Report::new();
        let c = &*self.base;
        if self.values.len() != c.num_morphisms() {
            r.push(
                "values",
                format!(
                    "{} values for {} morphisms",
                    self.values.len(),
                    c.num_morphisms()
                ),
            );
            return r;
        }
        let name = |m: FactMorphism| {
            format!(
                "({}, {})@{}",
                c.morphism(m.pre).name,
                c.morphism(m.post).name,
                c.morphism(m.mid).name
            )
        };
        for m in c.fact_morphisms() {
            let Some(map) = self.maps.get(&m) else {
                r.push("map missing", name(m));
                continue;
            };
            let Some(t) = c.fact_target(m) else {
                r.push("base composition", name(m));
                continue;
            };
            if let Err(e) = V::validate(map, &self.values[m.mid], &self.values[t]) {
                r.push("map invalid", format!("{}: {e}", name(m)));
            }
        }
        if !r.is_clean() {
            return r;
        }
        for f in 0..c.num_morphisms() {
            let id = c.fact_identity(f);
            if let Some(w) = V::differ(
                &self.maps[&id],
                &V::identity(&self.values[f]),
                &self.values[f],
                &self.values[f],
            ) {
                r.push("preserves identities", format!("{}: {w}", name(id)));
            }
        }
        for a in c.fact_morphisms() {
            let t = c.fact_target(a).expect("checked");
            for b in c.fact_morphisms_from(t) {
                let ab = c.fact_compose(a, b).expect("base is a category");
                let end = c.fact_target(b).expect("checked");
                let via = V::compose(&self.maps[&a], &self.maps[&b], &self.values[end]);
                if let Some(w) = V::differ(
                    &self.maps[&ab],
                    &via,
                    &self.values[a.mid],
                    &self.values[end],
                ) {
                    r.push(
                        "preserves composition",
                        format!("{} then {}: {w}", name(a), name(b)),
                    );
                }
            }
        }
        r
    }

    /// `phi^* D`, with `phi: C -> base`.
    pub fn reindex(&self, phi: &FinFunctor) -> NaturalSystem<V> {
        let values = phi
            .morphism_map
            .iter()
            .map(|&g| self.values[g].clone())
            .collect();
        let c = phi.source().clone();
        Self::from_fn(c, values, |m| {
            let image = FactMorphism {
                pre: phi.on_morphism(m.pre),
                mid: phi.on_morphism(m.mid),
                post: phi.on_morphism(m.post),
            };
            self.maps[&image].clone()
        })
    }

    /// The system on the opposite base: `D'_f = D_f` and
    /// `D'(p, f, q) = D(q, f, p)`.
    pub fn flat(&self) -> NaturalSystem<V> {
        let op = Arc::new(self.base.opposite());
        let maps = self
            .maps
            .iter()
            .map(|(m, v)| {
                (
                    FactMorphism {
                        pre: m.post,
                        mid: m.mid,
                        post: m.pre,
                    },
                    v.clone(),
                )
            })
            .collect();
        NaturalSystem {
            base: op,
            values: self.values.clone(),
            maps,
        }
    }

    /// Value and map tables agree, given a renaming of base morphisms
    /// `rename[f]` of this base onto `other`'s.
    pub fn equals_under(&self, other: &NaturalSystem<V>, rename: &[MorId]) -> Report {
        let mut r = Report::new();
        for f in 0..self.values.len() {
            if self.values[f] != other.values[rename[f]] {
                r.push("value", format!("morphism {}", self.base.morphism(f).name));
            }
        }
        if !r.is_clean() {
            return r;
        }
        for (m, map) in &self.maps {
            let n = FactMorphism {
                pre: rename[m.pre],
                mid: rename[m.mid],
                post: rename[m.post],
            };
            let t = self.base.fact_target(*m).expect("base is a category");
            match other.maps.get(&n) {
                None => r.push("map", format!("no map at renamed {:?}", n)),
                Some(o) => {
                    if let Some(w) = V::differ(map, o, &self.values[m.mid], &self.values[t]) {
                        r.push("map", format!("{:?}: {w}", m));
                    }
                }
            }
        }
        r
    }

    pub fn to_doc(&self) -> NaturalSystemDoc<V> {
        let c = &*self.base;
        let mut maps: Vec<_> = self
            .maps
            .iter()
            .map(|(m, v)| FactMapDoc {
                pre: c.morphism(m.pre).name.clone(),
                mid: c.morphism(m.mid).name.clone(),
                post: c.morphism(m.post).name.clone(),
                map: v.clone(),
            })
            .collect();
        maps.sort_by(|a, b| (&a.mid, &a.pre, &a.post).cmp(&(&b.mid, &b.pre, &b.post)));
        NaturalSystemDoc {
            kind: V::NAME.to_string(),
            base: c.to_doc(),
            values: c
                .morphisms()
                .iter()
                .zip(&self.values)
                .map(|(m, v)| (m.name.clone(), v.clone()))
                .collect(),
            maps,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FactMapDoc<M> {
    pub pre: String,
    pub mid: String,
    pub post: String,
    pub map: M,
}

/// Serialized natural system; see `docs/FORMATS.md`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct NaturalSystemDoc<V: ValueCategory> {
    pub kind: String,
    pub base: CategoryDoc,
    pub values: Vec<(String, V::Object)>,
    pub maps: Vec<FactMapDoc<V::Morphism>>,
}

/// `nu_{f,g}` for every composable pair.
#[derive(Debug, Clone)]
pub struct CompositionPairing<V: ValueCategory> {
    pub pairs: HashMap<(MorId, MorId), V::Pairing>,
}

impl<V: ValueCategory> CompositionPairing<V> {
    pub fn from_fn(base: &FinCategory, mut nu: impl FnMut(MorId, MorId) -> V::Pairing) -> Self {
        Self {
            pairs: base
                .composable_pairs()
                .map(|(f, g)| ((f, g), nu(f, g)))
                .collect(),
        }
    }

    pub fn get(&self, f: MorId, g: MorId) -> Option<&V::Pairing> {
        self.pairs.get(&(f, g))
    }

    /// `nu_phi(f, g) = nu(phi f, phi g)`.
    pub fn reindex(&self, phi: &FinFunctor) -> Self {
        Self::from_fn(phi.source(), |f, g| {
            self.pairs[&(phi.on_morphism(f), phi.on_morphism(g))].clone()
        })
    }

    /// Pairing for [`NaturalSystem::flat`]: `nu'_{f,g}(c, d) = nu_{g,f}(d, c)`,
    /// where `(f, g)` is composable in the opposite base.
    pub fn flat(&self, d: &NaturalSystem<V>) -> Self {
        let pairs = self
            .pairs
            .iter()
            .map(|(&(g, f), p)| ((f, g), V::swap_pairing(p, &d.values[g], &d.values[f])))
            .collect();
        Self { pairs }
    }
}

/// Every violated pairing condition: validity, naturality, cocycle and units.
pub fn check_pairing<V: ValueCategory>(d: &NaturalSystem<V>, nu: &CompositionPairing<V>) -> Report {
    let mut r = Report::new();
    let c = &*d.base;
    let vals = &d.values;
    let name = |f: MorId| c.morphism(f).name.as_str();
    for (f, g) in c.composable_pairs() {
        let fg = c.compose(f, g).expect("base is a category");
        match nu.pairs.get(&(f, g)) {
            None => r.push("pairing missing", format!("({}, {})", name(f), name(g))),
            Some(p) => {
                if let Err(e) = V::validate_pairing(p, &vals[f], &vals[g], &vals[fg]) {
                    r.push(
                        "pairing invalid",
                        format!("({}, {}): {e}", name(f), name(g)),
                    );
                }
            }
        }
    }
    if !r.is_clean() {
        return r;
    }
    // naturality: D(u,v) nu_{f,g} = nu_{uf,gv} (D(u,1) x D(1,v))
    for (f, g) in c.composable_pairs() {
        let fg = c.compose(f, g).expect("composable");
        let p = &nu.pairs[&(f, g)];
        for &u in c.incoming(c.src(f)) {
            let uf = c.compose(u, f).expect("composable");
            let du = d.pre(u, f).expect("total");
            for &v in c.outgoing(c.tgt(g)) {
                let gv = c.compose(g, v).expect("composable");
                let dv = d.post(g, v).expect("total");
                let m = FactMorphism {
                    pre: u,
                    mid: fg,
                    post: v,
                };
                let t = c.fact_target(m).expect("composable");
                let left = V::pairing_then(p, &d.maps[&m], &vals[f], &vals[g], &vals[t]);
                let right = V::pairing_after(
                    &nu.pairs[&(uf, gv)],
                    du,
                    dv,
                    &vals[f],
                    &vals[g],
                    &vals[uf],
                    &vals[gv],
                    &vals[t],
                );
                if let Some(w) = V::pairings_differ(&left, &right, &vals[f], &vals[g], &vals[t]) {
                    r.push(
                        "naturality",
                        format!(
                            "f={}, g={}, u={}, v={}: {w}",
                            name(f),
                            name(g),
                            name(u),
                            name(v)
                        ),
                    );
                }
            }
        }
    }
    // cocycle
    for (f, g) in c.composable_pairs() {
        let fg = c.compose(f, g).expect("composable");
        for &h in c.outgoing(c.tgt(g)) {
            let gh = c.compose(g, h).expect("composable");
            let fgh = c.compose(fg, h).expect("composable");
            let data = CocycleData::<V> {
                fg: &nu.pairs[&(f, g)],
                fg_h: &nu.pairs[&(fg, h)],
                gh: &nu.pairs[&(g, h)],
                f_gh: &nu.pairs[&(f, gh)],
                df: &vals[f],
                dg: &vals[g],
                dh: &vals[h],
                dgh: &vals[gh],
                dfgh: &vals[fgh],
            };
            if let Some(w) = V::cocycle_defect(data) {
                r.push(
                    "cocycle",
                    format!("({}, {}, {}): {w}", name(f), name(g), name(h)),
                );
            }
        }
    }
    // units
    for f in 0..c.num_morphisms() {
        let (x, y) = (c.src(f), c.tgt(f));
        let (ix, iy) = (c.identity(x), c.identity(y));
        if let Some(w) = V::right_unit_defect(&nu.pairs[&(f, iy)], &vals[f], &vals[iy]) {
            r.push("right unit", format!("{}: {w}", name(f)));
        }
        if let Some(w) = V::left_unit_defect(&nu.pairs[&(ix, f)], &vals[ix], &vals[f]) {
            r.push("left unit", format!("{}: {w}", name(f)));
        }
    }
    r
}

/// Group-valued systems: if every `[D(f,1) d', D(1,g) d]` is trivial,
/// returns the pairing `nu(d, d') = D(f,1)(d') D(1,g)(d)`; otherwise the
/// first nontrivial commutator.
pub fn commutator_condition(
    d: &NaturalSystem<Groups>,
) -> Result<CompositionPairing<Groups>, String> {
    let c = &*d.base;
    let mut pairs = HashMap::new();
    for (f, g) in c.composable_pairs() {
        let fg = c.compose(f, g).expect("base is a category");
        let t = &d.values[fg];
        let along_f = d.pre(f, g).expect("total"); // D_g -> D_fg
        let along_g = d.post(f, g).expect("total"); // D_f -> D_fg
        let (nf, ng) = (d.values[f].order(), d.values[g].order());
        let mut table = Vec::with_capacity(nf * ng);
        for a in 0..nf {
            for b in 0..ng {
                let x = along_f[b];
                let y = along_g[a];
                if t.commutator(x, y) != t.unit() {
                    return Err(format!(
                        "({}, {}): D(f,1)({b}) = {x} and D(1,g)({a}) = {y} do not commute",
                        c.morphism(f).name,
                        c.morphism(g).name
                    ));
                }
                debug_assert_eq!(t.mul(x, y), t.mul(y, x));
                table.push(t.mul(x, y));
            }
        }
        pairs.insert((f, g), table);
    }
    Ok(CompositionPairing { pairs })
}

/// The pairing `nu(a, b) = D(1,g) a + D(f,1) b`, which every abelian-valued
/// system admits.
pub fn abelian_pairing(d: &NaturalSystem<Abelian>) -> CompositionPairing<Abelian> {
    let c = &*d.base;
    CompositionPairing::from_fn(c, |f, g| {
        let a = d.post(f, g).expect("total");
        let b = d.pre(f, g).expect("total");
        a.hconcat(b).expect("same target")
    })
}

/// The system `D (x) Z/m` with finite group values, or `None` if some value
/// would have more than `max_order` elements. Coordinates are mixed radix,
/// first generator most significant.
pub fn reduce_mod(
    d: &NaturalSystem<Abelian>,
    m: i64,
    max_order: usize,
) -> Option<NaturalSystem<Groups>> {
    assert!(m >= 1, "modulus must be positive");
    let radices = |a: &FgAbelian| -> Vec<i64> {
        (0..a.num_generators())
            .map(|i| match a.modulus(i) {
                0 => m,
                t => num_integer::gcd(t, m),
            })
            .collect()
    };
    let mut groups: HashMap<FgAbelian, (FinGroup, Vec<i64>)> = HashMap::new();
    for a in &d.values {
        if groups.contains_key(a) {
            continue;
        }
        let r = radices(a);
        let order = r.iter().try_fold(1usize, |acc, &g| {
            acc.checked_mul(g as usize).filter(|&o| o <= max_order)
        })?;
        debug_assert!(order <= max_order);
        let g = r.iter().fold(FinGroup::trivial(), |acc, &g| {
            acc.product(&FinGroup::cyclic(g as usize))
        });
        groups.insert(a.clone(), (g, r));
    }
    let decode = |mut x: usize, r: &[i64]| -> Vec<i64> {
        let mut v = vec![0; r.len()];
        for i in (0..r.len()).rev() {
            v[i] = (x % r[i] as usize) as i64;
            x /= r[i] as usize;
        }
        v
    };
    let encode = |v: &[i64], r: &[i64]| -> usize {
        v.iter().zip(r).fold(0, |acc, (&c, &g)| {
            acc * g as usize + c.rem_euclid(g) as usize
        })
    };
    let values = d.values.iter().map(|a| groups[a].0.clone()).collect();
    let c = d.base.clone();
    Some(NaturalSystem::from_fn(c.clone(), values, |fm| {
        let (src, tgt) = (
            &d.values[fm.mid],
            &d.values[c.fact_target(fm).expect("composable")],
        );
        let (rs, rt) = (&groups[src].1, &groups[tgt].1);
        let mat = &d.maps[&fm];
        (0..groups[src].0.order())
            .map(|x| encode(&mat.mul_vec(&decode(x, rs)).expect("shape"), rt))
            .collect()
    }))
}

/// Components `alpha_f: D_f -> D'_f` over a common base.
#[derive(Debug, Clone)]
pub struct NatSysMorphism<V: ValueCategory> {
    pub components: Vec<V::Morphism>,
}

impl<V: ValueCategory> NatSysMorphism<V> {
    pub fn identity(d: &NaturalSystem<V>) -> Self {
        Self {
            components: d.values.iter().map(V::identity).collect(),
        }
    }

    /// `alpha_{ufv} D(u,v) = D'(u,v) alpha_f` for every factorization morphism.
    pub fn check_naturality(&self, d: &NaturalSystem<V>, e: &NaturalSystem<V>) -> Report {
        let mut r = Report::new();
        let c = &*d.base;
        for (f, a) in self.components.iter().enumerate() {
            if let Err(w) = V::validate(a, &d.values[f], &e.values[f]) {
                r.push("component invalid", format!("{}: {w}", c.morphism(f).name));
            }
        }
        if !r.is_clean() {
            return r;
        }
        for m in c.fact_morphisms() {
            let t = c.fact_target(m).expect("base is a category");
            let left = V::compose(&d.maps[&m], &self.components[t], &e.values[t]);
            let right = V::compose(&self.components[m.mid], &e.maps[&m], &e.values[t]);
            if let Some(w) = V::differ(&left, &right, &d.values[m.mid], &e.values[t]) {
                r.push("naturality square", format!("{:?}: {w}", m));
            }
        }
        r
    }

    /// `alpha_{fg} nu_{f,g} = nu'_{f,g} (alpha_f x alpha_g)`.
    pub fn check_compatibility(
        &self,
        d: &NaturalSystem<V>,
        nu: &CompositionPairing<V>,
        e: &NaturalSystem<V>,
        nu2: &CompositionPairing<V>,
    ) -> Report {
        let mut r = Report::new();
        let c = &*d.base;
        for (f, g) in c.composable_pairs() {
            let fg = c.compose(f, g).expect("base is a category");
            let left = V::pairing_then(
                &nu.pairs[&(f, g)],
                &self.components[fg],
                &d.values[f],
                &d.values[g],
                &e.values[fg],
            );
            let right = V::pairing_after(
                &nu2.pairs[&(f, g)],
                &self.components[f],
                &self.components[g],
                &d.values[f],
                &d.values[g],
                &e.values[f],
                &e.values[g],
                &e.values[fg],
            );
            if let Some(w) =
                V::pairings_differ(&left, &right, &d.values[f], &d.values[g], &e.values[fg])
            {
                r.push(
                    "compatibility",
                    format!("({}, {}): {w}", c.morphism(f).name, c.morphism(g).name),
                );
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pointed(n: usize) -> PointedSet {
        PointedSet { size: n, base: 0 }
    }

    fn id_system(c: &Arc<FinCategory>, n: usize) -> NaturalSystem<PointedSets> {
        NaturalSystem::constant(c.clone(), pointed(n))
    }

    #[test]
    fn constant_or_pairing_is_coherent() {
        let c = Arc::new(FinCategory::chain(2));
        let d = id_system(&c, 2);
        assert!(d.check_functoriality().is_clean());
        let nu = CompositionPairing::<PointedSets>::from_fn(&c, |_, _| vec![0, 1, 1, 1]);
        let r = check_pairing(&d, &nu);
        assert!(r.is_clean(), "{r}");
    }

    #[test]
    fn broken_composite_is_reported() {
        let c = Arc::new(FinCategory::chain(2));
        let mut maps = id_system(&c, 2).maps().clone();
        let m = FactMorphism {
            pre: c.morphism_by_name("0<1").unwrap(),
            mid: c.identity(c.object_by_name("1").unwrap()),
            post: c.morphism_by_name("1<2").unwrap(),
        };
        maps.insert(m, vec![0, 0]);
        let d = NaturalSystem::<PointedSets>::from_tables(
            c.clone(),
            vec![pointed(2); c.num_morphisms()],
            maps,
        );
        let r = d.check_functoriality();
        assert!(r.has_rule("preserves composition"), "{r}");
        assert!(!r.has_rule("preserves identities"));
    }

    #[test]
    fn broken_identity_is_reported() {
        let c = Arc::new(FinCategory::arrow());
        let a = c.morphism_by_name("a").unwrap();
        let mut maps = id_system(&c, 3).maps().clone();
        maps.insert(c.fact_identity(a), vec![0, 2, 1]);
        let d = NaturalSystem::<PointedSets>::from_tables(c.clone(), vec![pointed(3); 3], maps);
        let r = d.check_functoriality();
        assert!(r.has_rule("preserves identities"), "{r}");
    }

    #[test]
    fn invalid_map_is_reported() {
        let c = Arc::new(FinCategory::arrow());
        let a = c.morphism_by_name("a").unwrap();
        let mut maps = id_system(&c, 3).maps().clone();
        maps.insert(c.fact_identity(a), vec![1, 1, 2]);
        let d = NaturalSystem::<PointedSets>::from_tables(c.clone(), vec![pointed(3); 3], maps);
        assert!(d.check_functoriality().has_rule("map invalid"));
    }

    #[test]
    fn permuted_pairing_breaks_cocycle() {
        let c = Arc::new(FinCategory::terminal());
        let d = id_system(&c, 3);
        // addition mod 3
        let good = vec![0, 1, 2, 1, 2, 0, 2, 0, 1];
        let nu = CompositionPairing::<PointedSets>::from_fn(&c, |_, _| good.clone());
        assert!(check_pairing(&d, &nu).is_clean());
        let mut bad = good.clone();
        bad.swap(4, 8);
        let nu = CompositionPairing::<PointedSets>::from_fn(&c, |_, _| bad.clone());
        let r = check_pairing(&d, &nu);
        assert!(r.has_rule("cocycle"), "{r}");
        assert!(!r.has_rule("left unit") && !r.has_rule("right unit"));
    }

    #[test]
    fn unit_violation_is_reported() {
        let c = Arc::new(FinCategory::terminal());
        let d = id_system(&c, 2);
        let nu = CompositionPairing::<PointedSets>::from_fn(&c, |_, _| vec![0, 0, 1, 1]);
        let r = check_pairing(&d, &nu);
        assert!(r.has_rule("left unit"), "{r}");
        assert!(!r.has_rule("right unit"));
    }

    /// Z/2 on the source identity, Z/3 on the target identity and Z/6 on
    /// the arrow, with the two inclusions as the only nonidentity maps.
    fn mixed_group_system() -> NaturalSystem<Groups> {
        let c = Arc::new(FinCategory::chain(1));
        let (z2, z3) = (FinGroup::cyclic(2), FinGroup::cyclic(3));
        let z6 = z2.product(&z3);
        let arrow = c.morphism_by_name("0<1").unwrap();
        let (i0, i1) = (c.identity(0), c.identity(1));
        let mut values = vec![FinGroup::trivial(); 3];
        values[i0] = z2.clone();
        values[i1] = z3.clone();
        values[arrow] = z6.clone();
        let vals = values.clone();
        let cc = c.clone();
        NaturalSystem::from_fn(c, values, move |m| {
            let t = cc.fact_target(m).unwrap();
            if m.mid == t {
                Groups::identity(&vals[t])
            } else if m.mid == i0 {
                (0..2).map(|d| d * 3).collect()
            } else {
                (0..3).collect()
            }
        })
    }

    #[test]
    fn commutator_pairing_on_abelian_values() {
        let d = mixed_group_system();
        assert!(d.check_functoriality().is_clean());
        let nu = commutator_condition(&d).unwrap();
        let r = check_pairing(&d, &nu);
        assert!(r.is_clean(), "{r}");
        let c = d.base();
        let arrow = c.morphism_by_name("0<1").unwrap();
        // nu_{1_0, a}(1, 0) lands on the Z/2 generator of Z/6
        assert_eq!(nu.get(c.identity(0), arrow).unwrap()[6], 3);

        let flat = d.flat();
        assert!(flat.check_functoriality().is_clean());
        let r = check_pairing(&flat, &nu.flat(&d));
        assert!(r.is_clean(), "{r}");
        assert!(flat.flat().equals_under(&d, &[0, 1, 2]).is_clean());
    }

    #[test]
    fn commutator_failure_names_a_pair() {
        let c = Arc::new(FinCategory::terminal());
        let d = NaturalSystem::<Groups>::constant(c, FinGroup::symmetric3());
        let err = commutator_condition(&d).unwrap_err();
        assert!(err.contains("do not commute"));
    }

    #[test]
    fn abelian_canonical_pairing() {
        let c = Arc::new(FinCategory::chain(2));
        let z = FgAbelian::free(1);
        let z2 = FgAbelian::cyclic(2);
        let d = NaturalSystem::<Abelian>::from_fn(
            c.clone(),
            vec![z.clone(); c.num_morphisms()],
            |_| IntMatrix::identity(1),
        );
        assert!(d.check_functoriality().is_clean());
        let nu = abelian_pairing(&d);
        assert!(check_pairing(&d, &nu).is_clean());

        // mod 2 reduction as a morphism of constant systems
        let e = NaturalSystem::<Abelian>::from_fn(
            c.clone(),
            vec![z2.clone(); c.num_morphisms()],
            |_| IntMatrix::identity(1),
        );
        let alpha = NatSysMorphism::<Abelian> {
            components: vec![IntMatrix::identity(1); c.num_morphisms()],
        };
        assert!(alpha.check_naturality(&d, &e).is_clean());
        assert!(alpha
            .check_compatibility(&d, &nu, &e, &abelian_pairing(&e))
            .is_clean());

        // doubling the pairing is not unital
        let doubled = CompositionPairing::<Abelian> {
            pairs: nu
                .pairs
                .iter()
                .map(|(k, p)| {
                    (
                        *k,
                        IntMatrix::from_rows(1, 2, &[vec![2 * p.get(0, 0), p.get(0, 1)]]).unwrap(),
                    )
                })
                .collect(),
        };
        let r = check_pairing(&d, &doubled);
        assert!(r.has_rule("right unit"), "{r}");
        // but modulo 2 it is also not unital, while 3x is
        let tripled = CompositionPairing::<Abelian> {
            pairs: abelian_pairing(&e)
                .pairs
                .iter()
                .map(|(k, p)| {
                    (
                        *k,
                        IntMatrix::from_rows(1, 2, &[vec![3 * p.get(0, 0), 3 * p.get(0, 1)]])
                            .unwrap(),
                    )
                })
                .collect(),
        };
        assert!(check_pairing(&e, &tripled).is_clean());
    }

    #[test]
    fn torsion_into_free_is_rejected() {
        let c = Arc::new(FinCategory::terminal());
        let d = NaturalSystem::<Abelian>::from_fn(c, vec![FgAbelian::cyclic(2)], |_| {
            IntMatrix::identity(1)
        });
        assert!(Abelian::validate(
            &IntMatrix::identity(1),
            &FgAbelian::cyclic(2),
            &FgAbelian::free(1)
        )
        .is_err());
        assert!(d.check_functoriality().is_clean());
    }

    #[test]
    fn action_values() {
        let c = Arc::new(FinCategory::terminal());
        let g = FinGroup::cyclic(2);
        // base point plus a free orbit
        let x = ActObject::from_fn(
            3,
            0,
            g.clone(),
            |x, h| if x == 0 || h == 0 { x } else { 3 - x },
        )
        .unwrap();
        let d = NaturalSystem::<Actions>::constant(c.clone(), x.clone());
        assert!(d.check_functoriality().is_clean());
        let t = ActObject::from_fn(1, 0, g.clone(), |_, _| 0).unwrap();
        let collapse = NaturalSystem::<Actions>::constant(c.clone(), t.clone());
        let alpha = NatSysMorphism::<Actions> {
            components: vec![(vec![0, 0, 0], vec![0, 1])],
        };
        assert!(alpha.check_naturality(&d, &collapse).is_clean());
        let bad = NatSysMorphism::<Actions> {
            components: vec![(vec![0, 0, 0], vec![1, 0])],
        };
        assert!(bad
            .check_naturality(&d, &collapse)
            .has_rule("component invalid"));
        let p = product_action(&x, &x).unwrap();
        assert_eq!(p.size(), 9);
        assert_eq!(p.group().order(), 4);
    }

    #[test]
    fn reindex_along_identity_is_identity() {
        let d = mixed_group_system();
        let phi = FinFunctor::identity(d.base().clone());
        assert!(d.reindex(&phi).equals_under(&d, &[0, 1, 2]).is_clean());
    }

    #[test]
    fn doc_lists_every_map() {
        let d = mixed_group_system();
        let doc = d.to_doc();
        assert_eq!(doc.maps.len(), d.base().fact_morphism_count());
        let json = serde_json::to_value(&doc).unwrap();
        assert_eq!(json["kind"], "groups");
    }

    #[test]
    fn reduction_mod_m_is_a_group_system() {
        let c = Arc::new(FinCategory::chain(2));
        let d = NaturalSystem::<Abelian>::constant(c.clone(), FgAbelian::free(2));
        let g = reduce_mod(&d, 4, 1 << 12).unwrap();
        assert!(g.values().iter().all(|v| v.order() == 16));
        assert!(g.check_functoriality().is_clean());
        assert!(commutator_condition(&g).is_ok());
        assert!(reduce_mod(&d, 4, 15).is_none());

        let t = NaturalSystem::<Abelian>::constant(
            Arc::new(FinCategory::terminal()),
            FgAbelian::cyclic(6),
        );
        let g = reduce_mod(&t, 4, 16).unwrap();
        assert_eq!(g.value(0).order(), 2);
        assert!(g.check_functoriality().is_clean());
    }
}
