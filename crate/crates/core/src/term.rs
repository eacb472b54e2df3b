//! Terms as shared DAGs over a fixed signature.

use std::fmt;

use crate::algebra::{FiniteAlgebra, OpTable};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermNode {
    Var(usize),
    App { op: usize, args: Vec<usize> },
}

/// A `arity`-ary term; nodes are topologically ordered (children first).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    arity: usize,
    op_names: Vec<String>,
    nodes: Vec<TermNode>,
    root: usize,
}

pub(crate) struct TermBuilder {
    arity: usize,
    op_names: Vec<String>,
    nodes: Vec<TermNode>,
    vars: Vec<Option<usize>>,
}

impl TermBuilder {
    pub fn var(&mut self, i: usize) -> usize {
        if let Some(id) = self.vars[i] {
            return id;
        }
        self.nodes.push(TermNode::Var(i));
        let id = self.nodes.len() - 1;
        self.vars[i] = Some(id);
        id
    }

    pub fn app(&mut self, op: usize, args: Vec<usize>) -> usize {
        self.nodes.push(TermNode::App { op, args });
        self.nodes.len() - 1
    }

    pub fn finish(self, root: usize) -> Term {
        Term { arity: self.arity, op_names: self.op_names, nodes: self.nodes, root }
    }
}

impl Term {
    pub(crate) fn builder(arity: usize, signature: &FiniteAlgebra) -> TermBuilder {
        TermBuilder {
            arity,
            op_names: signature.operations.iter().map(|o| o.name.clone()).collect(),
            nodes: Vec::new(),
            vars: vec![None; arity],
        }
    }

    pub fn projection(arity: usize, i: usize, signature: &FiniteAlgebra) -> Term {
        let mut b = Term::builder(arity, signature);
        let v = b.var(i);
        b.finish(v)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn eval(&self, alg: &FiniteAlgebra, args: &[usize]) -> usize {
        let mut values = vec![0usize; self.nodes.len()];
        let mut buf = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            values[i] = match node {
                TermNode::Var(v) => args[*v],
                TermNode::App { op, args: children } => {
                    buf.clear();
                    buf.extend(children.iter().map(|&c| values[c]));
                    alg.apply(*op, &buf)
                }
            };
        }
        values[self.root]
    }

    /// The term operation induced on `alg`.
    pub fn table(&self, alg: &FiniteAlgebra, name: impl Into<String>) -> OpTable {
        OpTable::from_fn(name, self.arity, alg.size, |args| self.eval(alg, args))
    }

    /// `self(inner_0, ..., inner_{k-1})`; every inner term must share one arity.
    pub fn substitute(&self, inner: &[Term]) -> Term {
        assert_eq!(inner.len(), self.arity, "substitution needs one term per variable");
        let arity = inner.first().map(|t| t.arity).unwrap_or(0);
        let mut nodes: Vec<TermNode> = Vec::new();
        let mut var_nodes = vec![None; arity];
        let mut roots = Vec::with_capacity(inner.len());
        for t in inner {
            let mut map = vec![0usize; t.nodes.len()];
            for (i, node) in t.nodes.iter().enumerate() {
                map[i] = match node {
                    TermNode::Var(v) => *var_nodes[*v].get_or_insert_with(|| {
                        nodes.push(TermNode::Var(*v));
                        nodes.len() - 1
                    }),
                    TermNode::App { op, args } => {
                        nodes.push(TermNode::App { op: *op, args: args.iter().map(|&a| map[a]).collect() });
                        nodes.len() - 1
                    }
                };
            }
            roots.push(map[t.root]);
        }
        let mut map = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            map[i] = match node {
                TermNode::Var(v) => roots[*v],
                TermNode::App { op, args } => {
                    nodes.push(TermNode::App { op: *op, args: args.iter().map(|&a| map[a]).collect() });
                    nodes.len() - 1
                }
            };
        }
        Term { arity, op_names: self.op_names.clone(), nodes, root: map[self.root] }
    }

    fn render(&self, node: usize, out: &mut String, budget: &mut usize) {
        if *budget == 0 {
            return;
        }
        match &self.nodes[node] {
            TermNode::Var(v) => out.push_str(&var_name(*v, self.arity)),
            TermNode::App { op, args } => {
                out.push_str(&self.op_names[*op]);
                out.push('(');
                for (i, &a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    self.render(a, out, budget);
                    if *budget == 0 {
                        return;
                    }
                }
                out.push(')');
            }
        }
        *budget = budget.saturating_sub(1);
    }
}

fn var_name(v: usize, arity: usize) -> String {
    if arity <= 3 {
        ["x", "y", "z"][v].to_string()
    } else {
        format!("x{}", v)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let mut budget = 400;
        self.render(self.root, &mut out, &mut budget);
        if budget == 0 {
            out.push_str("...");
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn substitute_composes() {
        let s2 = corpus::semilattice2();
        let mut b = Term::builder(2, &s2);
        let (x, y) = (b.var(0), b.var(1));
        let join = b.app(0, vec![x, y]);
        let join = b.finish(join);
        // join(x, join(y, z))
        let t = join.substitute(&[Term::projection(3, 0, &s2), join_yz(&s2)]);
        assert_eq!(t.arity(), 3);
        assert_eq!(t.to_string(), "join(x, join(y, z))");
        assert_eq!(t.eval(&s2, &[0, 0, 1]), 1);
        assert_eq!(t.eval(&s2, &[0, 0, 0]), 0);
    }

    fn join_yz(s2: &FiniteAlgebra) -> Term {
        let mut b = Term::builder(3, s2);
        let (y, z) = (b.var(1), b.var(2));
        let r = b.app(0, vec![y, z]);
        b.finish(r)
    }
}
