//! The digraphs of thin edges, their strongly connected components and maximal elements.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::thin::{ThinEdges, ThinKind};

/// Which thin edges a path may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    /// Semilattice edges only.
    S,
    /// Semilattice and affine edges.
    As,
    /// All thin edges.
    Asm,
    /// Semilattice, affine and special majority edges.
    Special,
}

impl PathKind {
    fn allows(self, kind: ThinKind, special: bool) -> bool {
        match self {
            PathKind::S => kind == ThinKind::Semilattice,
            PathKind::As => kind != ThinKind::Majority,
            PathKind::Asm => true,
            PathKind::Special => kind != ThinKind::Majority || special,
        }
    }
}

/// Strongly connected components of one digraph on `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Components {
    /// Component id per element; ids are numbered by least element.
    pub component: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    /// Condensation edges between distinct components, sorted.
    pub order: Vec<(usize, usize)>,
    /// Components with no edge leaving them.
    pub maximal: Vec<usize>,
}

impl Components {
    pub fn maximal_elements(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.maximal.iter().flat_map(|&c| self.members[c].iter().copied()).collect();
        out.sort_unstable();
        out
    }

    pub fn component_of(&self, x: usize) -> &[usize] {
        &self.members[self.component[x]]
    }

    pub fn is_maximal(&self, x: usize) -> bool {
        self.maximal.contains(&self.component[x])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphAnalysis {
    pub size: usize,
    pub thin: ThinEdges,
    pub s: Components,
    pub r#as: Components,
    /// Absent when thin majority edges were not computed.
    pub asm: Option<Components>,
    pub max_elements: Vec<usize>,
    pub amax_elements: Vec<usize>,
    pub umax_elements: Option<Vec<usize>>,
}

fn adjacency(thin: &ThinEdges, kind: PathKind) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); thin.size];
    for e in &thin.edges {
        if kind.allows(e.kind, e.special) && !adj[e.tail].contains(&e.head) {
            adj[e.tail].push(e.head);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

fn components(adj: &[Vec<usize>]) -> Components {
    let n = adj.len();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (x, list) in adj.iter().enumerate() {
        for &y in list {
            g.add_edge(nodes[x], nodes[y], ());
        }
    }
    let mut sccs: Vec<Vec<usize>> = tarjan_scc(&g).into_iter().map(|c| {
        let mut v: Vec<usize> = c.into_iter().map(|i| i.index()).collect();
        v.sort_unstable();
        v
    }).collect();
    sccs.sort();
    let mut component = vec![0; n];
    for (ci, c) in sccs.iter().enumerate() {
        for &x in c {
            component[x] = ci;
        }
    }
    let mut order: Vec<(usize, usize)> = Vec::new();
    for (x, list) in adj.iter().enumerate() {
        for &y in list {
            let (cx, cy) = (component[x], component[y]);
            if cx != cy {
                order.push((cx, cy));
            }
        }
    }
    order.sort_unstable();
    order.dedup();
    let maximal = (0..sccs.len()).filter(|&c| !order.iter().any(|&(from, _)| from == c)).collect();
    Components { component, members: sccs, order, maximal }
}

impl GraphAnalysis {
    pub fn new(thin: ThinEdges) -> GraphAnalysis {
        let s = components(&adjacency(&thin, PathKind::S));
        let r#as = components(&adjacency(&thin, PathKind::As));
        let asm = thin.has_majority.then(|| components(&adjacency(&thin, PathKind::Asm)));
        GraphAnalysis {
            size: thin.size,
            max_elements: s.maximal_elements(),
            amax_elements: r#as.maximal_elements(),
            umax_elements: asm.as_ref().map(|c| c.maximal_elements()),
            s,
            r#as,
            asm,
            thin,
        }
    }

    pub fn components(&self, kind: PathKind) -> Option<&Components> {
        match kind {
            PathKind::S => Some(&self.s),
            PathKind::As => Some(&self.r#as),
            PathKind::Asm => self.asm.as_ref(),
            PathKind::Special => None,
        }
    }

    /// Elements reachable from `from` along paths of the given kind (including `from`).
    pub fn reachable(&self, from: usize, kind: PathKind) -> Vec<usize> {
        let adj = adjacency(&self.thin, kind);
        let mut seen = vec![false; self.size];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.size).filter(|&x| seen[x]).collect()
    }

    /// A shortest path of the given kind, if any.
    pub fn path(&self, from: usize, to: usize, kind: PathKind) -> Option<Vec<usize>> {
        let adj = adjacency(&self.thin, kind);
        let mut prev = vec![usize::MAX; self.size];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &y in &adj[x] {
                if prev[y] == usize::MAX {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// `Ft` sets: everything reachable from some element of `from`.
    pub fn ft(&self, from: &[usize], kind: PathKind) -> Vec<usize> {
        let mut out: Vec<usize> = from.iter().flat_map(|&x| self.reachable(x, kind)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Whether the thin edges, ignoring direction, connect all elements.
    pub fn weakly_connected(&self) -> bool {
        if self.size == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.size];
        for e in &self.thin.edges {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        let mut seen = vec![false; self.size];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Graphviz rendering; `labels` name the vertices.
    pub fn to_dot(&self, name: &str, labels: &[String]) -> String {
        let mut out = String::new();
        out.push_str(&format!("digraph \"{}\" {{\n", name.replace('"', "'")));
        out.push_str("  node [shape=circle];\n");
        let comps = self.asm.as_ref().unwrap_or(&self.r#as);
        for (ci, members) in comps.members.iter().enumerate() {
            let style = if comps.maximal.contains(&ci) { "bold" } else { "dashed" };
            out.push_str(&format!("  subgraph cluster_{} {{\n    style={};\n", ci, style));
            for &x in members {
                let label = labels.get(x).cloned().unwrap_or_else(|| x.to_string());
                let shape = if self.max_elements.contains(&x) { ", shape=doublecircle" } else { "" };
                out.push_str(&format!("    n{} [label=\"{}\"{}];\n", x, label.replace('"', "'"), shape));
            }
            out.push_str("  }\n");
        }
        for e in &self.thin.edges {
            let attrs = match e.kind {
                ThinKind::Semilattice => "style=solid".to_string(),
                ThinKind::Affine => "style=dashed".to_string(),
                ThinKind::Majority if e.special => "style=dotted, label=\"special\"".to_string(),
                ThinKind::Majority => "style=dotted".to_string(),
            };
            out.push_str(&format!("  n{} -> n{} [{}];\n", e.tail, e.head, attrs));
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::context::{ClassContext, Mode};
    use crate::corpus;
    use crate::thin::{thin_edges, Kinds};
    use crate::FiniteAlgebra;

    fn analysis(alg: &FiniteAlgebra) -> GraphAnalysis {
        let ctx = ClassContext::for_algebra(alg, Caps::default(), Mode::Exact).unwrap();
        GraphAnalysis::new(thin_edges(&ctx, &ctx.base_structure(0), Kinds::ALL).unwrap())
    }

    #[test]
    fn s2_components() {
        let g = analysis(&corpus::semilattice2());
        assert_eq!(g.max_elements, vec![1]);
        assert_eq!(g.amax_elements, vec![1]);
        assert_eq!(g.umax_elements, Some(vec![1]));
        assert_eq!(g.reachable(0, PathKind::S), vec![0, 1]);
        assert_eq!(g.path(0, 1, PathKind::S), Some(vec![0, 1]));
        assert_eq!(g.path(1, 0, PathKind::Asm), None);
    }

    #[test]
    fn z2_components() {
        let g = analysis(&corpus::affine2());
        assert_eq!(g.amax_elements, vec![0, 1]);
        assert_eq!(g.r#as.maximal.len(), 1);
        assert_eq!(g.max_elements, vec![0, 1]);
        assert_eq!(g.s.maximal.len(), 2);
    }

    #[test]
    fn m2_components() {
        let g = analysis(&corpus::majority2());
        assert_eq!(g.umax_elements, Some(vec![0, 1]));
        assert_eq!(g.asm.as_ref().unwrap().maximal.len(), 1);
        assert_eq!(g.r#as.maximal.len(), 2);
        assert!(g.weakly_connected());
    }

    #[test]
    fn dot_mentions_edge_styles() {
        let g = analysis(&corpus::majority2());
        let dot = g.to_dot("m2", &["0".into(), "1".into()]);
        assert!(dot.contains("style=dotted, label=\"special\""));
        assert!(dot.starts_with("digraph"));
    }
}
