use std::sync::Arc;

use crate::fincat::{FinCategory, MorId, Morphism};

use super::Grid;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Default)]
struct PairClasses {
    reps: Vec<Vec<u8>>,
    /// `next[c * dim + a]`: class of `rep(c) . a` at the next vertex.
    next: Vec<u32>,
}

/// Dihomotopy classes of every vertex pair, computed by dynamic programming
/// over targets in order of coordinate sum.
///
/// The classes at `y` are the pairs (last letter `a`, class at `y - e_a`)
/// modulo `[r.b].a ~ [r.a].b` for classes `r` at `y - e_a - e_b` whose
/// square is allowed. This matches the swap closure because a swap either
/// happens inside the prefix or at the last two letters.
#[derive(Debug, Clone)]
pub struct ClassTable {
    grid: Arc<Grid>,
    pairs: Vec<PairClasses>,
}

impl ClassTable {
    pub fn new(grid: Arc<Grid>) -> Self {
        let n = grid.num_vertices();
        let dim = grid.dim();
        let mut back = vec![vec![None; dim]; n];
        for v in 0..n {
            for a in 0..dim {
                if let Some(w) = grid.step(v, a) {
                    back[w][a] = Some(v);
                }
            }
        }
        let mut pairs = vec![PairClasses::default(); n * n];
        for x in 0..n {
            let mut order: Vec<usize> = (0..n).filter(|&y| grid.below(x, y)).collect();
            order.sort_by_key(|&y| (grid.vertex(y).iter().sum::<i64>(), y));
            pairs[x * n + x] = PairClasses {
                reps: vec![Vec::new()],
                next: vec![NONE; dim],
            };
            for &y in &order[1..] {
                Self::fill(&grid, &back, &mut pairs, x, y);
            }
        }
        Self { grid, pairs }
    }

    fn fill(
        grid: &Grid,
        back: &[Vec<Option<usize>>],
        pairs: &mut [PairClasses],
        x: usize,
        y: usize,
    ) {
        let n = grid.num_vertices();
        let dim = grid.dim();
        let count = |pairs: &[PairClasses], v: usize| pairs[x * n + v].reps.len();
        let mut members: Vec<(usize, usize)> = Vec::new();
        let mut start = vec![0; dim + 1];
        for a in 0..dim {
            start[a] = members.len();
            if let Some(p) = back[y][a] {
                members.extend((0..count(pairs, p)).map(|c| (a, c)));
            }
        }
        start[dim] = members.len();
        if members.is_empty() {
            return;
        }
        let idx = |a: usize, c: usize| start[a] + c;
        let mut parent: Vec<usize> = (0..members.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for a in 0..dim {
            for b in a + 1..dim {
                let (Some(pa), Some(_)) = (back[y][a], back[y][b]) else {
                    continue;
                };
                let Some(q) = back[pa][b] else { continue };
                if count(pairs, q) == 0 || !grid.cell(q, &[a, b]) {
                    continue;
                }
                let next = &pairs[x * n + q].next;
                for r in 0..count(pairs, q) {
                    let via_b = next[r * dim + b];
                    let via_a = next[r * dim + a];
                    debug_assert!(via_a != NONE && via_b != NONE);
                    let i = find(&mut parent, idx(a, via_b as usize));
                    let j = find(&mut parent, idx(b, via_a as usize));
                    parent[i] = j;
                }
            }
        }
        // representative of a class: least `rep(c) . a` over its members
        let mut best: Vec<Option<Vec<u8>>> = vec![None; members.len()];
        for (k, &(a, c)) in members.iter().enumerate() {
            let p = back[y][a].expect("member has a predecessor");
            let mut w = pairs[x * n + p].reps[c].clone();
            w.push(a as u8);
            let root = find(&mut parent, k);
            if best[root].as_ref().is_none_or(|b| w < *b) {
                best[root] = Some(w);
            }
        }
        let mut roots: Vec<(Vec<u8>, usize)> = best
            .into_iter()
            .enumerate()
            .filter_map(|(k, w)| w.map(|w| (w, k)))
            .collect();
        roots.sort();
        let mut label = vec![0u32; members.len()];
        for (l, &(_, k)) in roots.iter().enumerate() {
            label[k] = l as u32;
        }
        for (k, &(a, c)) in members.iter().enumerate() {
            let p = back[y][a].expect("member has a predecessor");
            let root = find(&mut parent, k);
            pairs[x * n + p].next[c * dim + a] = label[root];
        }
        let classes = roots.len();
        pairs[x * n + y] = PairClasses {
            reps: roots.into_iter().map(|(w, _)| w).collect(),
            next: vec![NONE; classes * dim],
        };
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn pair(&self, x: usize, y: usize) -> &PairClasses {
        &self.pairs[x * self.grid.num_vertices() + y]
    }

    /// Number of dihomotopy classes from `x` to `y`.
    pub fn count(&self, x: usize, y: usize) -> usize {
        self.pair(x, y).reps.len()
    }

    /// The lexicographically least word of class `c`.
    pub fn rep(&self, x: usize, y: usize, c: usize) -> &[u8] {
        &self.pair(x, y).reps[c]
    }

    /// Class of `rep(c) . axis`, if that step is allowed.
    pub fn extend(&self, x: usize, y: usize, c: usize, axis: usize) -> Option<usize> {
        let v = self.pair(x, y).next[c * self.grid.dim() + axis];
        (v != NONE).then_some(v as usize)
    }

    /// Target and class of `word` read from `x`.
    pub fn class_of_word(&self, x: usize, word: &[u8]) -> Option<(usize, usize)> {
        self.extend_by(x, x, 0, word)
    }

    /// Target and class of `rep(c) . word`.
    pub fn extend_by(&self, x: usize, y: usize, c: usize, word: &[u8]) -> Option<(usize, usize)> {
        let mut state = (y, c);
        for &a in word {
            let cls = self.extend(x, state.0, state.1, a as usize)?;
            state = (self.grid.step(state.0, a as usize)?, cls);
        }
        Some(state)
    }

    /// Class of the concatenation of class `c: x -> y` and class `d: y -> z`.
    pub fn concat(&self, x: usize, y: usize, c: usize, z: usize, d: usize) -> usize {
        let (end, cls) = self
            .extend_by(x, y, c, self.rep(y, z, d))
            .expect("composable classes");
        debug_assert_eq!(end, z);
        cls
    }

    /// Vertex pairs with at least one dipath, in vertex order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.grid.num_vertices();
        (0..n * n)
            .filter(move |&k| !self.pairs[k].reps.is_empty())
            .map(move |k| (k / n, k % n))
    }

    /// Total number of classes over all pairs.
    pub fn total(&self) -> usize {
        self.pairs.iter().map(|p| p.reps.len()).sum()
    }
}

/// The fundamental category: grid vertices, dihomotopy classes, and
/// composition by concatenation. Morphisms are numbered by (source, target,
/// class).
#[derive(Debug, Clone)]
pub struct FundCategory {
    table: ClassTable,
    category: Arc<FinCategory>,
    offsets: Vec<usize>,
    triples: Vec<(usize, usize, usize)>,
}

impl FundCategory {
    pub fn new(grid: Arc<Grid>) -> Self {
        Self::from_table(ClassTable::new(grid))
    }

    pub fn from_table(table: ClassTable) -> Self {
        let grid = table.grid().clone();
        let n = grid.num_vertices();
        let mut offsets = vec![0; n * n + 1];
        let mut triples = Vec::with_capacity(table.total());
        let mut morphisms = Vec::with_capacity(table.total());
        for x in 0..n {
            for y in 0..n {
                offsets[x * n + y] = triples.len();
                let (sx, sy) = (grid.name(x), grid.name(y));
                for c in 0..table.count(x, y) {
                    triples.push((x, y, c));
                    morphisms.push(Morphism {
                        name: format!("{sx}->{sy}#{c}"),
                        src: x,
                        tgt: y,
                    });
                }
            }
        }
        offsets[n * n] = triples.len();
        let identities: Vec<MorId> = (0..n).map(|x| offsets[x * n + x]).collect();
        let mut compose = Vec::new();
        for (f, &(x, y, c)) in triples.iter().enumerate() {
            for z in 0..n {
                for d in 0..table.count(y, z) {
                    let g = offsets[y * n + z] + d;
                    let h = offsets[x * n + z] + table.concat(x, y, c, z, d);
                    compose.push((f, g, h));
                }
            }
        }
        let names = (0..n).map(|v| grid.name(v)).collect();
        let category = Arc::new(
            FinCategory::from_parts(names, morphisms, identities, compose)
                .expect("class composition is a category table"),
        );
        Self {
            table,
            category,
            offsets,
            triples,
        }
    }

    pub fn table(&self) -> &ClassTable {
        &self.table
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.table.grid()
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.category
    }

    /// The morphism for class `c` from `x` to `y`.
    pub fn morphism(&self, x: usize, y: usize, c: usize) -> MorId {
        debug_assert!(c < self.table.count(x, y));
        self.offsets[x * self.grid().num_vertices() + y] + c
    }

    /// `(source, target, class)` of a morphism.
    pub fn triple(&self, f: MorId) -> (usize, usize, usize) {
        self.triples[f]
    }

    pub fn rep(&self, f: MorId) -> &[u8] {
        let (x, y, c) = self.triples[f];
        self.table.rep(x, y, c)
    }

    /// The morphism represented by `word` read from `x`.
    pub fn class_of_word(&self, x: usize, word: &[u8]) -> Option<MorId> {
        let (y, c) = self.table.class_of_word(x, word)?;
        Some(self.morphism(x, y, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispace::{BoxComplement, Hole};
    use crate::trace::dihomotopy_classes;

    fn grid(bounds: &[i64], holes: &[(&[i64], &[i64])]) -> Arc<Grid> {
        let holes = holes
            .iter()
            .map(|(lo, hi)| Hole {
                lo: lo.to_vec(),
                hi: hi.to_vec(),
            })
            .collect();
        Arc::new(Grid::new(
            BoxComplement::new(bounds.to_vec(), holes).unwrap().region(),
        ))
    }

    fn agrees_with_closure(g: &Arc<Grid>) {
        let t = ClassTable::new(g.clone());
        for x in 0..g.num_vertices() {
            for y in 0..g.num_vertices() {
                let c = dihomotopy_classes(g, x, y);
                assert_eq!(t.count(x, y), c.count(), "pair {} {}", g.name(x), g.name(y));
                for (k, &r) in c.reps.iter().enumerate() {
                    assert_eq!(t.rep(x, y, k), c.words[r].as_slice());
                }
                for (w, &k) in c.words.iter().zip(&c.class_of) {
                    assert_eq!(t.class_of_word(x, w), Some((y, k)));
                }
            }
        }
    }

    #[test]
    fn table_matches_swap_closure() {
        agrees_with_closure(&grid(&[4, 4], &[(&[1, 1], &[3, 3])]));
        agrees_with_closure(&grid(&[3, 3, 3], &[(&[1, 1, 1], &[2, 2, 2])]));
        agrees_with_closure(&grid(
            &[3, 2, 2],
            &[(&[1, 0, 0], &[2, 1, 2]), (&[0, 1, 1], &[3, 2, 2])],
        ));
    }

    #[test]
    fn empty_square_is_the_grid_poset() {
        let g = grid(&[2, 2], &[]);
        let f = FundCategory::new(g.clone());
        let c = f.category();
        assert!(c.check_category().is_clean());
        for x in 0..9 {
            for y in 0..9 {
                assert_eq!(c.hom(x, y).len(), usize::from(g.below(x, y)));
            }
        }
    }

    #[test]
    fn swiss_flag_category() {
        let g = grid(&[4, 4], &[(&[1, 1], &[3, 3])]);
        let f = FundCategory::new(g.clone());
        assert!(f.category().check_category().is_clean());
        let (x, y) = (g.index_of(&[0, 0]).unwrap(), g.index_of(&[4, 4]).unwrap());
        assert_eq!(f.category().hom(x, y).len(), 2);
        let m = f.morphism(x, y, 1);
        assert_eq!(f.category().morphism(m).name, "(0,0)->(4,4)#1");
        assert_eq!(f.class_of_word(x, f.rep(m)), Some(m));
    }
}
