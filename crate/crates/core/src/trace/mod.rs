//! Combinatorial trace spaces on grids: dipaths as axis words, dihomotopy
//! classes, the fundamental category, swap complexes with their homology,
//! and the natural systems built from them.
//!
//! A word is a sequence of axis letters; reading it from a source vertex
//! steps `+e_i` per letter. Two words are elementarily dihomotopic when they
//! differ by transposing two adjacent distinct letters across an allowed
//! unit square.

mod complex;
mod systems;
mod table;

use std::collections::{HashMap, VecDeque};

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::dispace::Region;

pub use complex::{homology, swap_complex, Cell, CellKind, Homology, SwapComplex};
pub use systems::{
    check_h_decomposition, natural_h, natural_p1, relative_p1, reversal_bijections, HSystem,
    RelativeP1, Reversal,
};
pub use table::{ClassTable, FundCategory};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("vertex {0:?} is not an allowed grid vertex")]
    UnknownVertex(Vec<i64>),
    #[error("homology in degree {0} is not modeled (cells up to dimension 2 only)")]
    Degree(usize),
    #[error("natural homology index {0} not supported (use 1 or 2)")]
    Index(usize),
    #[error("subspace is not contained in the space: {0}")]
    Containment(String),
    #[error("arithmetic: {0}")]
    Linalg(#[from] crate::linalg::LinalgError),
}

/// Allowed vertices of a region with their allowed unit edges.
#[derive(Debug, Clone)]
pub struct Grid {
    region: Region,
    vertices: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    steps: Vec<Vec<Option<usize>>>,
}

impl Grid {
    pub fn new(region: Region) -> Self {
        let vertices = region.vertices();
        let index: HashMap<Vec<i64>, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let dim = region.dim();
        let steps = vertices
            .iter()
            .map(|v| {
                (0..dim)
                    .map(|a| {
                        if !region.cell_allowed(v, &[a]) {
                            return None;
                        }
                        let mut w = v.clone();
                        w[a] += 1;
                        index.get(&w).copied()
                    })
                    .collect()
            })
            .collect();
        Self {
            region,
            vertices,
            index,
            steps,
        }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, v: usize) -> &[i64] {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn index_of(&self, v: &[i64]) -> Result<usize, TraceError> {
        self.index
            .get(v)
            .copied()
            .ok_or_else(|| TraceError::UnknownVertex(v.to_vec()))
    }

    /// Vertex name such as `(3,4)`.
    pub fn name(&self, v: usize) -> String {
        let coords: Vec<String> = self.vertices[v].iter().map(i64::to_string).collect();
        format!("({})", coords.join(","))
    }

    /// The vertex one step along `axis`, if that edge is allowed.
    pub fn step(&self, v: usize, axis: usize) -> Option<usize> {
        self.steps[v][axis]
    }

    /// Whether the closed unit cell at `v` spanned by `axes` is allowed.
    pub fn cell(&self, v: usize, axes: &[usize]) -> bool {
        self.region.cell_allowed(&self.vertices[v], axes)
    }

    /// Whether `x <= y` coordinatewise.
    pub fn below(&self, x: usize, y: usize) -> bool {
        self.vertices[x]
            .iter()
            .zip(&self.vertices[y])
            .all(|(a, b)| a <= b)
    }

    /// Reads `word` from `x`; `None` if it leaves the allowed edges.
    pub fn walk(&self, x: usize, word: &[u8]) -> Option<usize> {
        word.iter().try_fold(x, |v, &a| self.step(v, a as usize))
    }

    /// Vertices after each prefix of `word`, including the empty one.
    pub fn prefix_vertices(&self, x: usize, word: &[u8]) -> Vec<usize> {
        let mut out = Vec::with_capacity(word.len() + 1);
        out.push(x);
        let mut v = x;
        for &a in word {
            v = self
                .step(v, a as usize)
                .expect("word stays on allowed edges");
            out.push(v);
        }
        out
    }

    /// Vertices from which `y` is reachable by allowed steps.
    pub fn reaching(&self, y: usize) -> Vec<bool> {
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); self.num_vertices()];
        for v in 0..self.num_vertices() {
            for a in 0..self.dim() {
                if let Some(w) = self.step(v, a) {
                    preds[w].push(v);
                }
            }
        }
        let mut seen = vec![false; self.num_vertices()];
        seen[y] = true;
        let mut queue = VecDeque::from([y]);
        while let Some(w) = queue.pop_front() {
            for &v in &preds[w] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}

/// All dipath words from `x` to `y` in lexicographic order.
pub fn enumerate_dipaths(grid: &Grid, x: usize, y: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if !grid.below(x, y) {
        return out;
    }
    let reach = grid.reaching(y);
    if !reach[x] {
        return out;
    }
    let mut word = Vec::new();
    fn dfs(
        grid: &Grid,
        v: usize,
        y: usize,
        reach: &[bool],
        word: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) {
        if v == y {
            out.push(word.clone());
            return;
        }
        for a in 0..grid.dim() {
            if let Some(w) = grid.step(v, a) {
                if reach[w] {
                    word.push(a as u8);
                    dfs(grid, w, y, reach, word, out);
                    word.pop();
                }
            }
        }
    }
    dfs(grid, x, y, &reach, &mut word, &mut out);
    out
}

/// Whether the letters at `p` and `p + 1` of `word` may be transposed,
/// where `at` is the vertex reached after the first `p` letters.
pub fn swap_allowed(grid: &Grid, at: usize, word: &[u8], p: usize) -> bool {
    let (a, b) = (word[p] as usize, word[p + 1] as usize);
    a != b && grid.cell(at, &[a.min(b), a.max(b)])
}

/// Words of a vertex pair partitioned into dihomotopy classes. Classes are
/// numbered by their lexicographically least word.
#[derive(Debug, Clone)]
pub struct Classes {
    pub words: Vec<Vec<u8>>,
    pub class_of: Vec<usize>,
    /// Index into `words` of each class representative.
    pub reps: Vec<usize>,
}

impl Classes {
    pub fn count(&self) -> usize {
        self.reps.len()
    }
}

/// Union-find closure of the words under allowed swaps.
pub fn dihomotopy_classes(grid: &Grid, x: usize, y: usize) -> Classes {
    let words = enumerate_dipaths(grid, x, y);
    let index: HashMap<&[u8], usize> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_slice(), i))
        .collect();
    let mut uf = UnionFind::<usize>::new(words.len());
    for (i, w) in words.iter().enumerate() {
        let verts = grid.prefix_vertices(x, w);
        for p in 0..w.len().saturating_sub(1) {
            if w[p] < w[p + 1] && swap_allowed(grid, verts[p], w, p) {
                let mut s = w.clone();
                s.swap(p, p + 1);
                uf.union(i, index[s.as_slice()]);
            }
        }
    }
    let mut class_of = vec![0; words.len()];
    let mut reps = Vec::new();
    let mut label = HashMap::new();
    for i in 0..words.len() {
        let r = uf.find(i);
        let c = *label.entry(r).or_insert_with(|| {
            reps.push(i);
            reps.len() - 1
        });
        class_of[i] = c;
    }
    Classes {
        words,
        class_of,
        reps,
    }
}
