//! Finite groups given by multiplication tables.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::report::Report;

/// Elements are `0..order`; `mult[a * order + b]` is `a * b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinGroup {
    order: usize,
    mult: Vec<usize>,
    unit: usize,
    inv: Vec<usize>,
}

impl FinGroup {
    /// Builds a group from a table, deriving the unit and inverses.
    /// Returns `None` if the table is not a group.
    pub fn from_table(order: usize, mult: Vec<usize>) -> Option<Self> {
        if order == 0 || mult.len() != order * order || mult.iter().any(|&x| x >= order) {
            return None;
        }
        let unit = (0..order)
            .find(|&e| (0..order).all(|a| mult[e * order + a] == a && mult[a * order + e] == a))?;
        let inv = (0..order)
            .map(|a| (0..order).find(|&b| mult[a * order + b] == unit))
            .collect::<Option<Vec<_>>>()?;
        let g = Self {
            order,
            mult,
            unit,
            inv,
        };
        g.check().is_clean().then_some(g)
    }

    pub fn trivial() -> Self {
        Self {
            order: 1,
            mult: vec![0],
            unit: 0,
            inv: vec![0],
        }
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group needs positive order");
        let mult = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        let inv = (0..n).map(|a| (n - a) % n).collect();
        Self {
            order: n,
            mult,
            unit: 0,
            inv,
        }
    }

    /// Direct product; element `(a, b)` is `a * other.order + b`.
    pub fn product(&self, other: &FinGroup) -> Self {
        let (n, m) = (self.order, other.order);
        let order = n * m;
        let mut mult = vec![0; order * order];
        for x in 0..order {
            for y in 0..order {
                let a = self.mul(x / m, y / m);
                let b = other.mul(x % m, y % m);
                mult[x * order + y] = a * m + b;
            }
        }
        let inv = (0..order)
            .map(|x| self.inv(x / m) * m + other.inv(x % m))
            .collect();
        Self {
            order,
            mult,
            unit: self.unit * m + other.unit,
            inv,
        }
    }

    /// The permutation group generated by `gens`, acting on the right:
    /// the product `p * q` applies `p` first. Also returns the elements.
    pub fn from_permutations(gens: &[Vec<usize>]) -> (Self, Vec<Vec<usize>>) {
        let degree = gens.first().map_or(0, Vec::len);
        let id: Vec<usize> = (0..degree).collect();
        let compose = |p: &[usize], q: &[usize]| p.iter().map(|&i| q[i]).collect::<Vec<_>>();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let p = compose(&elems[i], g);
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(p);
                }
            }
        }
        let order = elems.len();
        let mut mult = vec![0; order * order];
        for a in 0..order {
            for b in 0..order {
                mult[a * order + b] = index[&compose(&elems[a], &elems[b])];
            }
        }
        let g = Self::from_table(order, mult).expect("permutations form a group");
        (g, elems)
    }

    pub fn symmetric3() -> Self {
        Self::from_permutations(&[vec![1, 0, 2], vec![1, 2, 0]]).0
    }

    /// Symmetries of a square, order 8.
    pub fn dihedral4() -> Self {
        Self::from_permutations(&[vec![1, 2, 3, 0], vec![3, 2, 1, 0]]).0
    }

    /// Quaternion group on the units +-1, +-i, +-j, +-k.
    pub fn quaternion() -> Self {
        // units 1, i, j, k times sign; index = 4*sign + unit
        let unit_mul = |a: usize, b: usize| -> (usize, bool) {
            // returns (unit, negated)
            match (a, b) {
                (0, x) | (x, 0) => (x, false),
                (x, y) if x == y => (0, true),
                (1, 2) => (3, false),
                (2, 1) => (3, true),
                (2, 3) => (1, false),
                (3, 2) => (1, true),
                (3, 1) => (2, false),
                (1, 3) => (2, true),
                _ => unreachable!(),
            }
        };
        let mut mult = vec![0; 64];
        for a in 0..8 {
            for b in 0..8 {
                let (u, neg) = unit_mul(a % 4, b % 4);
                let sign = (a / 4 + b / 4 + neg as usize) % 2;
                mult[a * 8 + b] = sign * 4 + u;
            }
        }
        Self::from_table(8, mult).expect("quaternion table")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    /// Group axioms, checked exhaustively.
    pub fn check(&self) -> Report {
        let mut r = Report::new();
        for a in self.elements() {
            if self.mul(self.unit, a) != a || self.mul(a, self.unit) != a {
                r.push("unit", format!("element {a}"));
            }
            if self.mul(a, self.inv(a)) != self.unit || self.mul(self.inv(a), a) != self.unit {
                r.push("inverse", format!("element {a}"));
            }
            for b in self.elements() {
                for c in self.elements() {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        r.push("associativity", format!("({a}, {b}, {c})"));
                    }
                }
            }
        }
        r
    }

    /// Subgroup generated by `gens`.
    pub fn closure(&self, gens: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let gens: Vec<usize> = gens.into_iter().collect();
        let mut set = BTreeSet::from([self.unit]);
        let mut queue = VecDeque::from([self.unit]);
        while let Some(a) = queue.pop_front() {
            for &g in &gens {
                let b = self.mul(a, g);
                if set.insert(b) {
                    queue.push_back(b);
                }
            }
        }
        set
    }

    /// Smallest normal subgroup containing `gens`.
    pub fn normal_closure(&self, gens: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let conj: BTreeSet<usize> = gens
            .into_iter()
            .flat_map(|h| self.elements().map(move |g| (g, h)))
            .map(|(g, h)| self.mul(self.mul(self.inv(g), h), g))
            .collect();
        self.closure(conj)
    }

    pub fn is_subgroup(&self, set: &BTreeSet<usize>) -> bool {
        set.contains(&self.unit)
            && set
                .iter()
                .all(|&a| set.iter().all(|&b| set.contains(&self.mul(a, self.inv(b)))))
    }

    pub fn is_normal(&self, set: &BTreeSet<usize>) -> bool {
        self.is_subgroup(set)
            && set.iter().all(|&h| {
                self.elements()
                    .all(|g| set.contains(&self.mul(self.mul(self.inv(g), h), g)))
            })
    }

    /// The subgroup on `set` as a group, with its embedding.
    pub fn subgroup(&self, set: &BTreeSet<usize>) -> (FinGroup, Vec<usize>) {
        let embed: Vec<usize> = set.iter().copied().collect();
        let pos: HashMap<usize, usize> = embed.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let n = embed.len();
        let mut mult = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                mult[i * n + j] = pos[&self.mul(embed[i], embed[j])];
            }
        }
        let g = FinGroup::from_table(n, mult).expect("subset closed under products");
        (g, embed)
    }

    /// Quotient by a normal subgroup, with the projection map.
    pub fn quotient(&self, normal: &BTreeSet<usize>) -> (FinGroup, Vec<usize>) {
        let mut class = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        for a in self.elements() {
            if class[a] == usize::MAX {
                for &h in normal {
                    class[self.mul(a, h)] = reps.len();
                }
                reps.push(a);
            }
        }
        let n = reps.len();
        let mut mult = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                mult[i * n + j] = class[self.mul(reps[i], reps[j])];
            }
        }
        let q = FinGroup::from_table(n, mult).expect("quotient by a normal subgroup");
        (q, class)
    }

    /// A small generating set, chosen greedily.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = BTreeSet::from([self.unit]);
        while span.len() < self.order {
            // prefer an element of largest order among the missing ones
            let best = self
                .elements()
                .filter(|x| !span.contains(x))
                .max_by_key(|&x| (self.element_order(x), std::cmp::Reverse(x)))
                .expect("span is a proper subgroup");
            gens.push(best);
            span = self.closure(gens.iter().copied());
        }
        gens
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.unit {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Extends `gens -> images` to a homomorphism into `target`, if one exists.
    pub fn extend_homomorphism(
        &self,
        target: &FinGroup,
        gens: &[usize],
        images: &[usize],
    ) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; self.order];
        map[self.unit] = target.unit;
        let mut queue = VecDeque::from([self.unit]);
        while let Some(a) = queue.pop_front() {
            for (&g, &img) in gens.iter().zip(images) {
                let b = self.mul(a, g);
                let v = target.mul(map[a], img);
                if map[b] == usize::MAX {
                    map[b] = v;
                    queue.push_back(b);
                } else if map[b] != v {
                    return None;
                }
            }
        }
        if map.contains(&usize::MAX) {
            return None;
        }
        is_homomorphism(self, target, &map).then_some(map)
    }

    /// Every homomorphism into `target`.
    pub fn homomorphisms(&self, target: &FinGroup) -> Vec<Vec<usize>> {
        let gens = self.generators();
        let mut out = Vec::new();
        let mut images = vec![0; gens.len()];
        loop {
            if let Some(h) = self.extend_homomorphism(target, &gens, &images) {
                out.push(h);
            }
            let mut k = 0;
            loop {
                if k == images.len() {
                    return out;
                }
                images[k] += 1;
                if images[k] < target.order {
                    break;
                }
                images[k] = 0;
                k += 1;
            }
        }
    }
}

pub fn is_homomorphism(source: &FinGroup, target: &FinGroup, map: &[usize]) -> bool {
    map.len() == source.order()
        && map.iter().all(|&x| x < target.order())
        && source.elements().all(|a| {
            source
                .elements()
                .all(|b| map[source.mul(a, b)] == target.mul(map[a], map[b]))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_groups_are_groups() {
        for (g, n, ab) in [
            (FinGroup::trivial(), 1, true),
            (FinGroup::cyclic(6), 6, true),
            (FinGroup::cyclic(2).product(&FinGroup::cyclic(4)), 8, true),
            (FinGroup::symmetric3(), 6, false),
            (FinGroup::dihedral4(), 8, false),
            (FinGroup::quaternion(), 8, false),
        ] {
            assert!(g.check().is_clean());
            assert_eq!(g.order(), n);
            assert_eq!(g.is_abelian(), ab);
            assert_eq!(g.closure(g.generators()).len(), n);
        }
    }

    #[test]
    fn quaternion_has_one_involution() {
        let q = FinGroup::quaternion();
        let involutions = q.elements().filter(|&a| q.element_order(a) == 2).count();
        assert_eq!(involutions, 1);
    }

    #[test]
    fn normal_closure_and_quotient() {
        let s3 = FinGroup::symmetric3();
        let t = s3.elements().find(|&a| s3.element_order(a) == 2).unwrap();
        let n = s3.normal_closure([t]);
        assert_eq!(n.len(), 6);
        let r = s3.elements().find(|&a| s3.element_order(a) == 3).unwrap();
        let a3 = s3.normal_closure([r]);
        assert_eq!(a3.len(), 3);
        assert!(s3.is_normal(&a3));
        let (q, proj) = s3.quotient(&a3);
        assert_eq!(q.order(), 2);
        assert!(is_homomorphism(&s3, &q, &proj));
    }

    #[test]
    fn homomorphism_counts() {
        // Hom(Z/4, Z/2) has 2 elements, Hom(S3, Z/2) has 2, Hom(Z/2, S3) has 4.
        assert_eq!(
            FinGroup::cyclic(4)
                .homomorphisms(&FinGroup::cyclic(2))
                .len(),
            2
        );
        assert_eq!(
            FinGroup::symmetric3()
                .homomorphisms(&FinGroup::cyclic(2))
                .len(),
            2
        );
        assert_eq!(
            FinGroup::cyclic(2)
                .homomorphisms(&FinGroup::symmetric3())
                .len(),
            4
        );
    }

    #[test]
    fn from_table_rejects_non_groups() {
        assert!(FinGroup::from_table(2, vec![0, 0, 0, 0]).is_none());
        assert!(FinGroup::from_table(2, vec![0, 1, 1, 0]).is_some());
    }
}
