//! Independent brute-force oracles shared by the acceptance criteria.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use dihom_core::act::{cokernel_classes, kernel_subobject, ActMorphism, ActObject, FinGroup};
use dihom_core::dispace::Hole;
use dihom_core::fincat::FinCategory;
use dihom_core::groth::{build_total_category, verify_internal_group, InternalGroup};
use dihom_core::natsys::{check_pairing, commutator_condition, Groups, NaturalSystem};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PRIMES: [i64; 3] = [2, 3, 1_000_003];

/// The swap complex of one vertex pair, rebuilt from the geometry: words are
/// all letter arrangements whose vertices and edges avoid the open hole.
pub struct BruteComplex {
    pub words: Vec<Vec<u8>>,
    pub edges: Vec<(usize, usize)>,
    pub cells: usize,
    d1: Vec<Vec<(usize, i64)>>,
    d2: Vec<Vec<(usize, i64)>>,
}

impl BruteComplex {
    pub fn new(bounds: &[i64], hole: &Hole, x: &[i64], y: &[i64]) -> Self {
        let dim = bounds.len();
        // a unit cell at `v` spanned by `axes` is forbidden iff its centre
        // lies strictly inside the hole (doubled coordinates)
        let allowed = |v: &[i64], axes: &[usize]| {
            let centre: Vec<i64> = (0..dim)
                .map(|i| 2 * v[i] + i64::from(axes.contains(&i)))
                .collect();
            !(0..dim).all(|i| 2 * hole.lo[i] < centre[i] && centre[i] < 2 * hole.hi[i])
        };
        let counts: Vec<usize> = (0..dim).map(|i| (y[i] - x[i]) as usize).collect();
        let mut words = Vec::new();
        arrangements(&mut counts.clone(), &mut Vec::new(), &mut words);
        let prefix = |w: &[u8], p: usize| -> Vec<i64> {
            let mut v = x.to_vec();
            for &a in &w[..p] {
                v[a as usize] += 1;
            }
            v
        };
        words.retain(|w| {
            (0..w.len())
                .all(|p| allowed(&prefix(w, p), &[]) && allowed(&prefix(w, p), &[w[p] as usize]))
        });
        let index: HashMap<Vec<u8>, usize> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let swap = |w: &[u8], p: usize| {
            let mut s = w.to_vec();
            s.swap(p, p + 1);
            s
        };
        let mut edges = Vec::new();
        let mut edge_of = HashMap::new();
        for (i, w) in words.iter().enumerate() {
            for p in 0..w.len().saturating_sub(1) {
                if w[p] < w[p + 1] && allowed(&prefix(w, p), &[w[p] as usize, w[p + 1] as usize]) {
                    edge_of.insert((i, p), edges.len());
                    edges.push((i, index[&swap(w, p)]));
                }
            }
        }
        // boundary of a closed walk through swaps at the given positions
        let walk = |start: &[u8], seq: &[usize]| -> Option<Vec<(usize, i64)>> {
            let mut cur = start.to_vec();
            let mut out = Vec::new();
            for &s in seq {
                let next = swap(&cur, s);
                let (lower, sign) = if cur[s] < cur[s + 1] {
                    (&cur, 1)
                } else {
                    (&next, -1)
                };
                out.push((*edge_of.get(&(*index.get(lower)?, s))?, sign));
                cur = next;
            }
            assert_eq!(cur, start, "2-cell boundary closes");
            Some(out)
        };
        let mut d2 = Vec::new();
        for (i, w) in words.iter().enumerate() {
            for p in 0..w.len().saturating_sub(1) {
                if !edge_of.contains_key(&(i, p)) {
                    continue;
                }
                for q in p + 2..w.len().saturating_sub(1) {
                    if edge_of.contains_key(&(i, q)) {
                        d2.extend(walk(w, &[p, q, p, q]));
                    }
                }
                if p + 2 < w.len()
                    && w[p + 1] < w[p + 2]
                    && allowed(
                        &prefix(w, p),
                        &[w[p] as usize, w[p + 1] as usize, w[p + 2] as usize],
                    )
                {
                    d2.extend(walk(w, &[p, p + 1, p, p + 1, p, p + 1]));
                }
            }
        }
        let d1 = edges.iter().map(|&(a, b)| vec![(a, -1), (b, 1)]).collect();
        Self {
            cells: d2.len(),
            words,
            edges,
            d1,
            d2,
        }
    }

    /// Betti numbers `(b0, b1)` over `GF(p)`, after checking `d1 d2 = 0`.
    pub fn betti(&self, p: i64) -> (usize, usize) {
        for col in &self.d2 {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(e, s) in col {
                for &(v, t) in &self.d1[e] {
                    *acc.entry(v).or_insert(0) += s * t;
                }
            }
            assert!(
                acc.values().all(|c| c.rem_euclid(p) == 0),
                "boundary of a boundary"
            );
        }
        let r1 = rank_mod(&self.d1, p);
        let r2 = rank_mod(&self.d2, p);
        (self.words.len() - r1, self.edges.len() - r1 - r2)
    }
}

fn arrangements(counts: &mut [usize], word: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if counts.iter().all(|&c| c == 0) {
        out.push(word.clone());
        return;
    }
    for a in 0..counts.len() {
        if counts[a] > 0 {
            counts[a] -= 1;
            word.push(a as u8);
            arrangements(counts, word, out);
            word.pop();
            counts[a] += 1;
        }
    }
}

fn inverse_mod(a: i64, p: i64) -> i64 {
    let (mut result, mut base, mut exp) = (1i64, a.rem_euclid(p), p - 2);
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

/// Rank of a sparse matrix given by columns, over `GF(p)`.
fn rank_mod(cols: &[Vec<(usize, i64)>], p: i64) -> usize {
    let mut pivots: HashMap<usize, BTreeMap<usize, i64>> = HashMap::new();
    for col in cols {
        let mut v: BTreeMap<usize, i64> = BTreeMap::new();
        for &(r, c) in col {
            *v.entry(r).or_insert(0) += c;
        }
        v.retain(|_, c| {
            *c = c.rem_euclid(p);
            *c != 0
        });
        while let Some((&low, &c)) = v.iter().next_back() {
            match pivots.get(&low) {
                Some(pc) => {
                    for (&r, &x) in pc {
                        let e = v.entry(r).or_insert(0);
                        *e = (*e - c * x).rem_euclid(p);
                        if *e == 0 {
                            v.remove(&r);
                        }
                    }
                }
                None => {
                    let inv = inverse_mod(c, p);
                    v.values_mut().for_each(|x| *x = *x * inv % p);
                    pivots.insert(low, v);
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn groups() -> Vec<FinGroup> {
    let z2 = FinGroup::cyclic(2);
    vec![
        FinGroup::trivial(),
        z2.clone(),
        FinGroup::cyclic(3),
        FinGroup::cyclic(4),
        z2.product(&z2),
        FinGroup::symmetric3(),
        FinGroup::cyclic(6),
        FinGroup::cyclic(8),
        FinGroup::dihedral4(),
        FinGroup::quaternion(),
        z2.product(&z2).product(&z2),
    ]
}

/// Subsets of the group closed under multiplication, as sets.
fn subgroups(g: &FinGroup) -> Vec<BTreeSet<usize>> {
    let n = g.order();
    (0u32..1 << n)
        .map(|mask| {
            (0..n)
                .filter(|&i| mask >> i & 1 == 1)
                .collect::<BTreeSet<usize>>()
        })
        .filter(|s| {
            s.contains(&g.unit())
                && s.iter()
                    .all(|&a| s.iter().all(|&b| s.contains(&g.mul(a, b))))
        })
        .collect()
}

/// Set partitions of `0..n` as class labels (restricted growth strings).
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=max {
            cur.push(c);
            go(i + 1, n, cur, max.max(c + 1), out);
            cur.pop();
        }
    }
    go(0, n, &mut Vec::new(), 0, &mut out);
    out
}

type PermsAndHoms = (Vec<Vec<usize>>, Vec<Vec<usize>>);

struct ActFactory {
    groups: Vec<FinGroup>,
    subgroups: Vec<Vec<BTreeSet<usize>>>,
    /// Per (group, degree): the symmetric group's permutations and every
    /// homomorphism into it.
    actions: HashMap<(usize, usize), PermsAndHoms>,
    homs: HashMap<(usize, usize), Vec<Vec<usize>>>,
}

impl ActFactory {
    fn new() -> Self {
        let groups = groups();
        let subgroups = groups.iter().map(subgroups).collect();
        Self {
            groups,
            subgroups,
            actions: HashMap::new(),
            homs: HashMap::new(),
        }
    }

    fn object(&mut self, rng: &mut ChaCha8Rng) -> (usize, ActObject) {
        let gi = rng.gen_range(0..self.groups.len());
        let n = rng.gen_range(1..=5);
        let g = self.groups[gi].clone();
        let (perms, homs) = self.actions.entry((gi, n)).or_insert_with(|| {
            let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
            let mut transposition: Vec<usize> = (0..n).collect();
            if n > 1 {
                transposition.swap(0, 1);
            }
            let (sym, perms) = FinGroup::from_permutations(&[cycle, transposition]);
            (perms, g.homomorphisms(&sym))
        });
        let h = homs
            .choose(rng)
            .expect("the trivial homomorphism exists")
            .clone();
        let base = rng.gen_range(0..n);
        let action = (0..n * g.order())
            .map(|k| perms[h[k % g.order()]][k / g.order()])
            .collect();
        (
            gi,
            ActObject::new(n, base, g, action).expect("permutation action"),
        )
    }

    fn morphism(&mut self, rng: &mut ChaCha8Rng) -> ActMorphism {
        loop {
            let (gi, a) = self.object(rng);
            let (hi, b) = self.object(rng);
            let (ga, gb) = (self.groups[gi].clone(), self.groups[hi].clone());
            let homs = self
                .homs
                .entry((gi, hi))
                .or_insert_with(|| ga.homomorphisms(&gb));
            let phi = homs.choose(rng).expect("trivial homomorphism").clone();
            let mut maps = Vec::new();
            let total = b.size().pow(a.size() as u32);
            for code in 0..total {
                let f: Vec<usize> = (0..a.size())
                    .map(|i| code / b.size().pow(i as u32) % b.size())
                    .collect();
                if f[a.base()] != b.base() {
                    continue;
                }
                let equivariant = (0..a.size())
                    .all(|x| ga.elements().all(|g| f[a.act(x, g)] == b.act(f[x], phi[g])));
                if equivariant {
                    maps.push(f);
                }
            }
            if let Some(f) = maps.choose(rng) {
                return ActMorphism::new(a, b, f.clone(), phi).expect("equivariant pointed map");
            }
        }
    }

    fn group_index(&self, g: &FinGroup) -> usize {
        self.groups
            .iter()
            .position(|h| h == g)
            .expect("generated group")
    }

    /// The largest subaction of the source on which `m` is null.
    fn brute_kernel(&self, m: &ActMorphism) -> Option<(BTreeSet<usize>, BTreeSet<usize>)> {
        let (a, b) = (m.source(), m.target());
        let subs = &self.subgroups[self.group_index(a.group())];
        let mut valid = Vec::new();
        for mask in 0u32..1 << a.size() {
            let s: BTreeSet<usize> = (0..a.size()).filter(|&i| mask >> i & 1 == 1).collect();
            if !s.contains(&a.base()) || s.iter().any(|&x| m.f_set()[x] != b.base()) {
                continue;
            }
            for k in subs {
                if s.iter()
                    .all(|&x| k.iter().all(|&g| s.contains(&a.act(x, g))))
                {
                    valid.push((s.clone(), k.clone()));
                }
            }
        }
        valid
            .iter()
            .find(|(s, k)| valid.iter().all(|(t, l)| t.is_subset(s) && l.is_subset(k)))
            .cloned()
    }

    /// The finest congruence on the target through which `m` becomes null.
    fn brute_cokernel(&self, m: &ActMorphism) -> Option<Vec<usize>> {
        let b = m.target();
        let image: BTreeSet<usize> = m.f_set().iter().copied().collect();
        let valid: Vec<Vec<usize>> = partitions(b.size())
            .into_iter()
            .filter(|p| {
                image.iter().all(|&y| p[y] == p[b.base()])
                    && (0..b.size()).all(|y| {
                        (0..b.size()).all(|z| {
                            p[y] != p[z]
                                || b.group()
                                    .elements()
                                    .all(|h| p[b.act(y, h)] == p[b.act(z, h)])
                        })
                    })
            })
            .collect();
        let refines = |p: &[usize], q: &[usize]| {
            (0..p.len()).all(|y| (0..p.len()).all(|z| p[y] != p[z] || q[y] == q[z]))
        };
        valid
            .iter()
            .find(|p| valid.iter().all(|q| refines(p, q)))
            .cloned()
    }
}

/// Compares kernels and cokernels with the brute-force universal solutions
/// on `n` random morphisms. Returns the count and any disagreements.
pub fn act_fuzz(n: usize, seed: u64) -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factory = ActFactory::new();
    let mut failures = Vec::new();
    for trial in 0..n {
        let m = factory.morphism(&mut rng);
        let k = kernel_subobject(&m);
        match factory.brute_kernel(&m) {
            Some((s, g)) if s == k.carrier && g == k.group => {}
            other => failures.push(format!("trial {trial}: kernel {k:?} vs {other:?}")),
        }
        let classes = cokernel_classes(&m);
        match factory.brute_cokernel(&m) {
            Some(p) if same_partition(&p, &classes) => {}
            other => failures.push(format!("trial {trial}: cokernel {classes:?} vs {other:?}")),
        }
    }
    (n, failures)
}

fn same_partition(p: &[usize], q: &[usize]) -> bool {
    p.len() == q.len()
        && (0..p.len()).all(|y| (0..p.len()).all(|z| (p[y] == p[z]) == (q[y] == q[z])))
}

pub struct GroupFuzz {
    pub mismatches: Vec<String>,
    pub commuting: usize,
    pub internal_failures: Vec<String>,
}

/// Random group-valued systems on chains of length at most 3. The value
/// over an arrow of length `a` is `G_a`, and a factorization adding length
/// goes along the chosen homomorphisms `G_a -> G_{a+1}`. The oracle decides
/// the commutator condition from the groups alone: for every `a + b <= n`,
/// the images of `G_a` and `G_b` in `G_{a+b}` must commute.
pub fn group_system_fuzz(n: usize, seed: u64) -> GroupFuzz {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = groups();
    let mut out = GroupFuzz {
        mismatches: Vec::new(),
        commuting: 0,
        internal_failures: Vec::new(),
    };
    for trial in 0..n {
        let len = rng.gen_range(1..=3);
        let gs: Vec<FinGroup> = (0..=len)
            .map(|_| pool.choose(&mut rng).expect("nonempty").clone())
            .collect();
        let steps: Vec<Vec<usize>> = (0..len)
            .map(|a| {
                gs[a]
                    .homomorphisms(&gs[a + 1])
                    .choose(&mut rng)
                    .expect("trivial homomorphism")
                    .clone()
            })
            .collect();
        // along[a][c]: G_a -> G_c for a <= c
        let along = |a: usize, c: usize| -> Vec<usize> {
            (0..gs[a].order())
                .map(|x| steps[a..c].iter().fold(x, |y, s| s[y]))
                .collect()
        };
        let mut expected = true;
        for a in 0..=len {
            for b in 0..=len - a {
                let (ia, ib) = (along(a, a + b), along(b, a + b));
                let t = &gs[a + b];
                if ia
                    .iter()
                    .any(|&x| ib.iter().any(|&y| t.mul(x, y) != t.mul(y, x)))
                {
                    expected = false;
                }
            }
        }

        let c = Arc::new(FinCategory::chain(len));
        let length = |f: usize| c.morphism(f).tgt - c.morphism(f).src;
        let values = (0..c.num_morphisms())
            .map(|f| gs[length(f)].clone())
            .collect();
        let d = NaturalSystem::<Groups>::from_fn(c.clone(), values, |m| {
            along(length(m.mid), length(c.fact_target(m).expect("composable")))
        });
        let functorial = d.check_functoriality();
        if !functorial.is_clean() {
            out.mismatches.push(format!(
                "trial {trial}: generated system is not functorial: {functorial}"
            ));
            continue;
        }
        match (commutator_condition(&d), expected) {
            (Ok(nu), true) => {
                out.commuting += 1;
                let r = check_pairing(&d, &nu);
                if !r.is_clean() {
                    out.internal_failures
                        .push(format!("trial {trial}: pairing {r}"));
                    continue;
                }
                let verified = build_total_category(d, nu)
                    .map_err(|e| e.to_string())
                    .and_then(|t| InternalGroup::from_total(&t).map_err(|e| e.to_string()))
                    .map(|g| verify_internal_group(&g));
                match verified {
                    Ok(r) if r.is_clean() => {}
                    Ok(r) => out.internal_failures.push(format!("trial {trial}: {r}")),
                    Err(e) => out.internal_failures.push(format!("trial {trial}: {e}")),
                }
            }
            (Err(_), false) => {}
            (got, _) => out.mismatches.push(format!(
                "trial {trial}: library says {}, oracle says {expected}",
                got.is_ok()
            )),
        }
    }
    out
}
