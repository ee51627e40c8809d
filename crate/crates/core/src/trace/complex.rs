use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::act::FgAbelian;
use crate::linalg::{reduce_presentation, smith, IntMatrix, PresentationReduction};

use super::{enumerate_dipaths, swap_allowed, Grid, TraceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    /// Two disjoint swaps.
    Square,
    /// Three distinct letters cycled through all six orders; present only
    /// when the unit 3-cube they span is allowed.
    Hexagon,
}

/// A 2-cell with its boundary as signed edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub kind: CellKind,
    pub word: usize,
    pub positions: (usize, usize),
    pub boundary: Vec<(usize, i64)>,
}

/// Words of a vertex pair, elementary swaps between them, and 2-cells.
///
/// An edge `(w, p)` joins `w` to `w` with positions `p, p + 1` swapped and
/// is stored at the word whose letters there ascend.
#[derive(Debug, Clone)]
pub struct SwapComplex {
    pub source: usize,
    pub target: usize,
    pub words: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    pub edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    pub cells: Vec<Cell>,
}

fn swapped(w: &[u8], p: usize) -> Vec<u8> {
    let mut s = w.to_vec();
    s.swap(p, p + 1);
    s
}

impl SwapComplex {
    fn from_words(grid: &Grid, source: usize, target: usize, words: Vec<Vec<u8>>) -> Self {
        let index: HashMap<Vec<u8>, usize> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let mut sc = SwapComplex {
            source,
            target,
            words,
            index,
            edges: Vec::new(),
            edge_index: HashMap::new(),
            cells: Vec::new(),
        };
        let prefixes: Vec<Vec<usize>> = sc
            .words
            .iter()
            .map(|w| grid.prefix_vertices(source, w))
            .collect();
        for (i, w) in sc.words.iter().enumerate() {
            for p in 0..w.len().saturating_sub(1) {
                if w[p] < w[p + 1]
                    && swap_allowed(grid, prefixes[i][p], w, p)
                    && sc.index.contains_key(&swapped(w, p))
                {
                    sc.edge_index.insert((i, p), sc.edges.len());
                    sc.edges.push((i, p));
                }
            }
        }
        let mut cells = Vec::new();
        for (i, w) in sc.words.iter().enumerate() {
            let len = w.len();
            for p in 0..len.saturating_sub(1) {
                if !sc.edge_index.contains_key(&(i, p)) {
                    continue;
                }
                for q in p + 2..len - 1 {
                    if sc.edge_index.contains_key(&(i, q)) {
                        if let Some(boundary) = sc.cycle(w, &[p, q, p, q]) {
                            cells.push(Cell {
                                kind: CellKind::Square,
                                word: i,
                                positions: (p, q),
                                boundary,
                            });
                        }
                    }
                }
                if p + 2 < len && w[p + 1] < w[p + 2] {
                    let axes = [w[p] as usize, w[p + 1] as usize, w[p + 2] as usize];
                    if grid.cell(prefixes[i][p], &axes) {
                        if let Some(boundary) = sc.cycle(w, &[p, p + 1, p, p + 1, p, p + 1]) {
                            cells.push(Cell {
                                kind: CellKind::Hexagon,
                                word: i,
                                positions: (p, p + 1),
                                boundary,
                            });
                        }
                    }
                }
            }
        }
        sc.cells = cells;
        sc
    }

    /// Signed edges along the swaps `seq` from `start`, which must return
    /// to `start`. `None` if some edge is missing.
    fn cycle(&self, start: &[u8], seq: &[usize]) -> Option<Vec<(usize, i64)>> {
        let mut cur = start.to_vec();
        let mut out = Vec::with_capacity(seq.len());
        for &s in seq {
            let next = swapped(&cur, s);
            let (lower, sign) = if cur[s] < cur[s + 1] {
                (&cur, 1)
            } else {
                (&next, -1)
            };
            let e = *self.edge_index.get(&(*self.index.get(lower)?, s))?;
            out.push((e, sign));
            cur = next;
        }
        debug_assert_eq!(cur, start);
        Some(out)
    }

    pub fn word_index(&self, w: &[u8]) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn edge_index(&self, word: usize, position: usize) -> Option<usize> {
        self.edge_index.get(&(word, position)).copied()
    }

    /// `(from, to)` word indices of an edge.
    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let (w, p) = self.edges[e];
        (w, self.index[&swapped(&self.words[w], p)])
    }

    /// Connected component of each word, numbered by least word.
    pub fn components(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut comp = vec![usize::MAX; self.words.len()];
        let mut next = 0;
        for s in 0..self.words.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(v, _, _) in &adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Per word: (neighbour, edge, +1 if the edge leaves this word).
    fn adjacency(&self) -> Vec<Vec<(usize, usize, i64)>> {
        let mut adj = vec![Vec::new(); self.words.len()];
        for e in 0..self.edges.len() {
            let (u, v) = self.edge_endpoints(e);
            adj[u].push((v, e, 1));
            adj[v].push((u, e, -1));
        }
        adj
    }

    /// The subcomplex on the words of one component.
    pub fn component(&self, grid: &Grid, label: usize) -> SwapComplex {
        let comp = self.components();
        let words = self
            .words
            .iter()
            .zip(&comp)
            .filter(|&(_, &c)| c == label)
            .map(|(w, _)| w.clone())
            .collect();
        SwapComplex::from_words(grid, self.source, self.target, words)
    }
}

/// The swap complex of all dipath words from `x` to `y`.
pub fn swap_complex(grid: &Grid, x: usize, y: usize) -> SwapComplex {
    SwapComplex::from_words(grid, x, y, enumerate_dipaths(grid, x, y))
}

/// Integral homology of a swap complex in degrees 0, 1 and 2, with
/// coordinates for 1-cycles.
///
/// `H_1` is computed from a spanning forest: cycles are determined by their
/// coefficients on non-forest edges, so `H_1` is presented by those
/// generators and the boundaries of 2-cells restricted to them.
#[derive(Debug, Clone)]
pub struct Homology {
    pub h0: FgAbelian,
    pub h1: FgAbelian,
    pub h2: FgAbelian,
    pub components: Vec<usize>,
    nontree: Vec<Option<usize>>,
    reduction: PresentationReduction,
    u: IntMatrix,
    /// `(row of U, modulus)` per generator of `h1`, torsion first.
    kept: Vec<(usize, i64)>,
    generators: Vec<Vec<(usize, i64)>>,
}

impl Homology {
    pub fn new(sc: &SwapComplex) -> Result<Self, TraceError> {
        let adj = sc.adjacency();
        let n = sc.words.len();
        let components = sc.components();
        let num_components = components.iter().max().map_or(0, |&c| c + 1);
        // BFS forest from the least word of each component
        let mut parent: Vec<Option<(usize, usize, i64)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut tree = vec![false; sc.edges.len()];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(v, e, dir) in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        tree[e] = true;
                        // stepping from v to its parent u runs against dir
                        parent[v] = Some((u, e, -dir));
                        queue.push_back(v);
                    }
                }
            }
        }
        let mut nontree = vec![None; sc.edges.len()];
        let mut nontree_edges = Vec::new();
        for e in 0..sc.edges.len() {
            if !tree[e] {
                nontree[e] = Some(nontree_edges.len());
                nontree_edges.push(e);
            }
        }
        let relations: Vec<BTreeMap<usize, i64>> = sc
            .cells
            .iter()
            .map(|c| {
                let mut col = BTreeMap::new();
                for &(e, s) in &c.boundary {
                    if let Some(k) = nontree[e] {
                        *col.entry(k).or_insert(0) += s;
                    }
                }
                col
            })
            .collect();
        let reduction = reduce_presentation(nontree_edges.len(), relations)?;
        let m = reduction.survivors.len();
        let s = smith(&reduction.remainder)?;
        let diag = s.diagonal();
        let mut kept: Vec<(usize, i64)> = diag
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d > 1)
            .map(|(i, &d)| (i, d))
            .collect();
        kept.extend((s.rank..m).map(|i| (i, 0)));
        let h1 = FgAbelian::from_smith_diagonal(m, &diag);
        let h2 = FgAbelian::free(sc.cells.len() - reduction.substitutions.len() - s.rank);

        let path_to_root = |mut w: usize| {
            let mut chain: Vec<(usize, i64)> = Vec::new();
            while let Some((p, e, sign)) = parent[w] {
                chain.push((e, sign));
                w = p;
            }
            chain
        };
        let fundamental = |k: usize| {
            let e = nontree_edges[k];
            let (u, v) = sc.edge_endpoints(e);
            let mut chain = vec![(e, 1)];
            chain.extend(path_to_root(v));
            chain.extend(path_to_root(u).into_iter().map(|(f, s)| (f, -s)));
            chain
        };
        let mut generators = Vec::with_capacity(kept.len());
        for &(i, _) in &kept {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for (j, &g) in reduction.survivors.iter().enumerate() {
                let coef = s.u_inv.get(j, i);
                if coef != 0 {
                    for (e, sign) in fundamental(g) {
                        *acc.entry(e).or_insert(0) += coef * sign;
                    }
                }
            }
            generators.push(acc.into_iter().filter(|&(_, c)| c != 0).collect());
        }
        Ok(Self {
            h0: FgAbelian::free(num_components),
            h1,
            h2,
            components,
            nontree,
            reduction,
            u: s.u,
            kept,
            generators,
        })
    }

    /// Coordinates in `h1` of a 1-cycle given as signed edges.
    pub fn h1_coordinates(&self, cycle: &[(usize, i64)]) -> Result<Vec<i64>, TraceError> {
        let mut v = vec![0; self.reduction.num_generators];
        for &(e, c) in cycle {
            if let Some(k) = self.nontree[e] {
                v[k] += c;
            }
        }
        let reduced = self.reduction.reduce_vector(&v)?;
        let y = self.u.mul_vec(&reduced)?;
        Ok(self
            .kept
            .iter()
            .map(|&(i, d)| if d > 1 { y[i].rem_euclid(d) } else { y[i] })
            .collect())
    }

    /// A 1-cycle representing generator `k` of `h1`.
    pub fn h1_generator(&self, k: usize) -> &[(usize, i64)] {
        &self.generators[k]
    }
}

/// `H_degree` of the swap complex; degrees above 2 are not modeled.
pub fn homology(sc: &SwapComplex, degree: usize) -> Result<FgAbelian, TraceError> {
    if degree > 2 {
        return Err(TraceError::Degree(degree));
    }
    let h = Homology::new(sc)?;
    Ok(match degree {
        0 => h.h0,
        1 => h.h1,
        _ => h.h2,
    })
}
