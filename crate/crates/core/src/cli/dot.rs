//! Graphviz export of a complex's 1-skeleton, vertices placed on a circle.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt::Write;

use crate::complex::SimplicialComplex;
use crate::partitions::Block;

const RADIUS: f64 = 2.0;

pub fn block_label(b: Block, labels: &[String]) -> String {
    b.members().map(|p| labels[p].as_str()).collect::<Vec<_>>().join(",")
}

pub fn skeleton_dot(k: &SimplicialComplex, labels: &[String], title: &str) -> String {
    let vertices = k.vertices();
    let mut edges = BTreeSet::new();
    for s in k.maximal_simplices() {
        let vs = s.vertices();
        for (i, a) in vs.iter().enumerate() {
            for b in &vs[i + 1..] {
                let ia = vertices.binary_search(a).expect("simplex vertex");
                let ib = vertices.binary_search(b).expect("simplex vertex");
                edges.insert((ia.min(ib), ia.max(ib)));
            }
        }
    }

    let mut out = String::new();
    writeln!(out, "graph \"{title}\" {{").unwrap();
    writeln!(out, "  layout=neato;").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    let count = vertices.len();
    for (i, v) in vertices.iter().enumerate() {
        let (x, y) = if count == 1 {
            (0.0, 0.0)
        } else {
            let angle = TAU * i as f64 / count as f64;
            (RADIUS * angle.cos(), RADIUS * angle.sin())
        };
        // Avoid printing "-0.000".
        let (x, y) = (x + 0.0, y + 0.0);
        writeln!(
            out,
            "  v{i} [label=\"{}\", pos=\"{x:.3},{y:.3}!\"];",
            block_label(*v, labels)
        )
        .unwrap();
    }
    for (a, b) in edges {
        writeln!(out, "  v{a} -- v{b};").unwrap();
    }
    out.push_str("}\n");
    out
}
