//! Graphviz exports. Node ids are indices, so output is stable for a given
//! input.

use std::fmt::Write;

use crate::fincat::FinCategory;
use crate::trace::{FundCategory, Grid, SwapComplex};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn word_label(w: &[u8]) -> String {
    if w.is_empty() {
        return "()".into();
    }
    w.iter().map(|a| a.to_string()).collect()
}

/// Every lattice point of the bounding box; forbidden points are shaded.
/// Edges are the allowed unit steps.
pub fn grid_dot(grid: &Grid, name: &str) -> String {
    let region = grid.region();
    let mut out = format!("digraph \"{}\" {{\n", escape(name));
    let mut points = vec![region.lo.clone()];
    for axis in 0..region.dim() {
        points = points
            .into_iter()
            .flat_map(|p| {
                (region.lo[axis]..=region.hi[axis]).map(move |c| {
                    let mut q = p.clone();
                    q[axis] = c;
                    q
                })
            })
            .collect();
    }
    points.sort();
    for p in &points {
        let label: Vec<String> = p.iter().map(i64::to_string).collect();
        let id = label.join("_");
        match grid.index_of(p) {
            Ok(_) => writeln!(out, "  p{id} [label=\"({})\"];", label.join(",")),
            Err(_) => writeln!(
                out,
                "  p{id} [label=\"({})\", style=filled, fillcolor=gray];",
                label.join(",")
            ),
        }
        .expect("write to string");
    }
    for v in 0..grid.num_vertices() {
        for a in 0..grid.dim() {
            if let Some(w) = grid.step(v, a) {
                let id = |u: usize| {
                    grid.vertex(u)
                        .iter()
                        .map(i64::to_string)
                        .collect::<Vec<_>>()
                        .join("_")
                };
                writeln!(out, "  p{} -> p{} [label=\"{a}\"];", id(v), id(w))
                    .expect("write to string");
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Objects and non-identity morphisms of a finite category.
pub fn category_dot(c: &FinCategory, name: &str) -> String {
    let mut out = format!("digraph \"{}\" {{\n", escape(name));
    for x in 0..c.num_objects() {
        writeln!(out, "  o{x} [label=\"{}\"];", escape(c.object_name(x))).expect("write to string");
    }
    for f in 0..c.num_morphisms() {
        if c.is_identity(f) {
            continue;
        }
        let m = c.morphism(f);
        writeln!(
            out,
            "  o{} -> o{} [label=\"{}\"];",
            m.src,
            m.tgt,
            escape(&m.name)
        )
        .expect("write to string");
    }
    out.push_str("}\n");
    out
}

/// The fundamental category with vertices named by coordinates and edges
/// labelled by class representative.
pub fn fundamental_dot(fc: &FundCategory, name: &str) -> String {
    let c = fc.category();
    let mut out = format!("digraph \"{}\" {{\n", escape(name));
    for x in 0..c.num_objects() {
        writeln!(out, "  o{x} [label=\"{}\"];", fc.grid().name(x)).expect("write to string");
    }
    for f in 0..c.num_morphisms() {
        if c.is_identity(f) {
            continue;
        }
        let (x, y, k) = fc.triple(f);
        writeln!(
            out,
            "  o{x} -> o{y} [label=\"#{k} {}\"];",
            word_label(fc.rep(f))
        )
        .expect("write to string");
    }
    out.push_str("}\n");
    out
}

/// The 1-skeleton of a swap complex, one cluster per connected component.
/// The number of 2-cells is recorded as a graph attribute.
pub fn swap_complex_dot(sc: &SwapComplex, name: &str) -> String {
    let mut out = format!("graph \"{}\" {{\n", escape(name));
    if sc.words.is_empty() {
        out.push_str("}\n");
        return out;
    }
    writeln!(out, "  comment=\"{} cells\";", sc.cells.len()).expect("write to string");
    let labels = sc.components();
    let count = labels.iter().max().map_or(0, |&k| k + 1);
    for k in 0..count {
        writeln!(out, "  subgraph cluster_{k} {{").expect("write to string");
        for (i, w) in sc.words.iter().enumerate() {
            if labels[i] == k {
                writeln!(out, "    w{i} [label=\"{}\"];", word_label(w)).expect("write to string");
            }
        }
        out.push_str("  }\n");
    }
    for e in 0..sc.edges.len() {
        let (a, b) = sc.edge_endpoints(e);
        writeln!(out, "  w{a} -- w{b};").expect("write to string");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dispace::{BoxComplement, Hole};
    use crate::trace::swap_complex;

    fn swiss() -> Grid {
        Grid::new(
            BoxComplement::new(
                vec![4, 4],
                vec![Hole {
                    lo: vec![1, 1],
                    hi: vec![3, 3],
                }],
            )
            .unwrap()
            .region(),
        )
    }

    #[test]
    fn swiss_flag_has_two_parallel_corner_edges() {
        let fc = FundCategory::new(Arc::new(swiss()));
        let dot = fundamental_dot(&fc, "SWISS1");
        let (x, y) = (
            fc.grid().index_of(&[0, 0]).unwrap(),
            fc.grid().index_of(&[4, 4]).unwrap(),
        );
        assert_eq!(dot.matches(&format!("o{x} -> o{y} ")).count(), 2);
        assert_eq!(dot, fundamental_dot(&fc, "SWISS1"));
    }

    #[test]
    fn grid_shades_the_hole_interior() {
        let dot = grid_dot(&swiss(), "g");
        assert!(dot.contains("p2_2 [label=\"(2,2)\", style=filled"));
        assert_eq!(dot.matches("fillcolor").count(), 1);
    }

    #[test]
    fn empty_inputs_give_a_header_only_graph() {
        let g = swiss();
        let sc = swap_complex(&g, g.num_vertices() - 1, 0);
        assert_eq!(swap_complex_dot(&sc, "empty"), "graph \"empty\" {\n}\n");
        let c = FinCategory::from_parts(vec![], vec![], vec![], std::iter::empty()).unwrap();
        assert_eq!(category_dot(&c, "empty"), "digraph \"empty\" {\n}\n");
    }
}
