//! DOT rendering of built state-class graphs.

use std::fmt::Write;

use crate::graph::{ClassNode, StateClassGraph};
use crate::net::Net;
use crate::poly::Var;
use crate::scalar::Scalar;

/// How much class data goes into node labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DotVerbosity {
    /// Node id and marking only.
    #[default]
    Compact,
    /// Also the class matrices / constraint systems.
    Full,
}

impl std::str::FromStr for DotVerbosity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "compact" => Ok(DotVerbosity::Compact),
            "full" => Ok(DotVerbosity::Full),
            other => Err(format!("unknown verbosity `{other}`")),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn class_details<S: Scalar>(net: &Net<S>, node: &ClassNode<S>) -> String {
    let mut out = String::new();
    match node {
        ClassNode::Dbm(c) => {
            let names: Vec<&str> = std::iter::once(".")
                .chain(c.matrix.transitions().iter().map(|&t| net.transition_name(t)))
                .collect();
            for (x, name) in names.iter().enumerate() {
                let row: Vec<String> = (0..c.matrix.dim())
                    .map(|y| c.matrix.get_pos(x, y).to_string())
                    .collect();
                let _ = writeln!(out, "{}: {}", name, row.join(", "));
            }
        }
        ClassNode::Tdis(c) => {
            for &t in c.dc.transitions() {
                let row: Vec<String> = c
                    .dc
                    .transitions()
                    .iter()
                    .map(|&u| c.dc.get(t, u).to_string())
                    .collect();
                let _ = writeln!(out, "{}: {}", net.transition_name(t), row.join(", "));
            }
            for &t in c.dc.transitions() {
                let _ = writeln!(
                    out,
                    "{} in [{}, {}]",
                    net.transition_name(t),
                    -c.lower(t).expect_finite().clone(),
                    c.upper(t)
                );
            }
        }
        ClassNode::Exact(c) => {
            for row in c.system.rows() {
                let mut terms = String::new();
                for (v, coeff) in c.system.vars().iter().zip(&row.coeffs) {
                    if coeff.is_zero() {
                        continue;
                    }
                    let name = match v {
                        Var::Clock(t) => net.transition_name(*t).to_string(),
                        other => format!("{other:?}"),
                    };
                    if terms.is_empty() {
                        let _ = write!(terms, "{coeff}*{name}");
                    } else {
                        let _ = write!(terms, " + {coeff}*{name}");
                    }
                }
                let _ = writeln!(out, "{} <= {}", terms, row.bound);
            }
        }
    }
    out
}

/// Renders a graph as DOT text: one node per class labeled with its id and
/// marking, one edge per firing, in stable order.
pub fn export_dot<S: Scalar>(
    net: &Net<S>,
    graph: &StateClassGraph<S>,
    verbosity: DotVerbosity,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph classes {{");
    let _ = writeln!(out, "  rankdir=TB;");
    let _ = writeln!(out, "  node [shape=box];");
    for (i, node) in graph.nodes.iter().enumerate() {
        let mut label = format!("n{}\\n{}", i, net.display_marking(node.marking()));
        if verbosity == DotVerbosity::Full {
            let details = class_details(net, node);
            for line in details.lines() {
                label.push_str("\\n");
                label.push_str(&escape(line));
            }
        }
        let _ = writeln!(out, "  \"n{i}\" [label=\"{label}\"];");
    }
    for e in &graph.edges {
        let _ = writeln!(
            out,
            "  \"n{}\" -> \"n{}\" [label=\"{}\"];",
            e.src,
            e.dst,
            escape(net.transition_name(e.trans))
        );
    }
    let _ = writeln!(out, "}}");
    out
}
