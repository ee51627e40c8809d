use std::collections::BTreeMap;
use std::fmt::Write;

use dihom_core::report::Violation;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ModelSummary {
    pub name: String,
    pub dim: usize,
    pub bounds: Vec<i64>,
    pub holes: usize,
    /// Grid units per document unit.
    pub scale: String,
    pub vertices: usize,
    pub morphisms: usize,
}

impl ModelSummary {
    fn header(&self) -> String {
        format!(
            "model {} (dim {}, bounds {:?}, {} holes, scale {})\n  {} vertices, {} dihomotopy classes\n",
            self.name, self.dim, self.bounds, self.holes, self.scale, self.vertices, self.morphisms
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub source: String,
    pub target: String,
    pub source_vertex: Vec<i64>,
    pub target_vertex: Vec<i64>,
    pub classes: usize,
    /// Lexicographically least word per class, axis letters as digits.
    pub representatives: Vec<String>,
    /// Keyed `H_1`, `H_2`.
    pub homology: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub model: ModelSummary,
    pub pairs: Vec<PairReport>,
    pub violations: usize,
}

impl AnalyzeReport {
    pub fn to_text(&self) -> String {
        let mut s = self.model.header();
        for p in &self.pairs {
            let _ = writeln!(
                s,
                "({}, {}) {:?} -> {:?}: {} classes",
                p.source, p.target, p.source_vertex, p.target_vertex, p.classes
            );
            for (i, w) in p.representatives.iter().enumerate() {
                let _ = writeln!(s, "  #{i} {w}");
            }
            for (k, v) in &p.homology {
                let _ = writeln!(s, "  {k} = {v}");
            }
        }
        let _ = writeln!(s, "checks: {} violations", self.violations);
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReverseReport {
    pub model: ModelSummary,
    pub holes: Vec<(Vec<i64>, Vec<i64>)>,
    pub points: BTreeMap<String, Vec<i64>>,
    /// Axis permutation carrying the space onto its reversal, if any.
    pub time_symmetry: Option<Vec<usize>>,
    pub time_contractible: bool,
    /// `(source, target, classes)` in the reversed model.
    pub reversed_pairs: Vec<(String, String, usize)>,
}

impl ReverseReport {
    pub fn to_text(&self) -> String {
        let mut s = self.model.header();
        for (lo, hi) in &self.holes {
            let _ = writeln!(s, "hole {lo:?} .. {hi:?}");
        }
        for (name, v) in &self.points {
            let _ = writeln!(s, "point {name}# = {v:?}");
        }
        match &self.time_symmetry {
            Some(p) => {
                let _ = writeln!(s, "time symmetric: yes (axes {p:?})");
            }
            None => s.push_str("time symmetric: no\n"),
        }
        let _ = writeln!(
            s,
            "time contractible: {}",
            if self.time_contractible { "yes" } else { "no" }
        );
        for (a, b, n) in &self.reversed_pairs {
            let _ = writeln!(s, "({a}, {b}): {n} classes");
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DualReport {
    pub model: ModelSummary,
    pub arrows: usize,
    pub composites: usize,
    /// Number of nonempty hom-sets of each size in the reversed total category.
    pub hom_set_sizes: BTreeMap<usize, usize>,
    pub verified: bool,
}

impl DualReport {
    pub fn to_text(&self) -> String {
        let mut s = self.model.header();
        let _ = writeln!(
            s,
            "total category: {} arrows, {} composites",
            self.arrows, self.composites
        );
        for (size, n) in &self.hom_set_sizes {
            let _ = writeln!(s, "  {n} hom-sets of size {size}");
        }
        s.push_str(if self.verified {
            "I₁ isomorphism verified\n"
        } else {
            "I₁ isomorphism FAILED\n"
        });
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LesReport {
    pub model: ModelSummary,
    pub subspace_vertices: usize,
    pub classes: usize,
    pub positions: usize,
    /// Classes of the subspace whose relative value is smaller than in X.
    pub collapsed: usize,
    pub exact: bool,
}

impl LesReport {
    pub fn to_text(&self) -> String {
        let mut s = self.model.header();
        let _ = writeln!(
            s,
            "subspace: {} vertices, {} classes, {} collapse in P_1(X, A)",
            self.subspace_vertices, self.classes, self.collapsed
        );
        if self.exact {
            let _ = writeln!(s, "tail exact at {} positions", self.positions);
        } else {
            s.push_str("tail NOT exact\n");
        }
        s
    }
}

/// Printed after the report when a check fails.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub command: String,
    pub model: String,
    pub violations: Vec<Violation>,
}
