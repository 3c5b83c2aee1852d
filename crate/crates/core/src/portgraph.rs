//! Interface-anchored port graphs.
//!
//! A [`PortGraph`] is the string diagram of a term: boxes with ordered ports,
//! wires given as a bijection between sources (boundary inputs and box
//! outputs) and sinks (box inputs and boundary outputs). Identities and
//! symmetries leave no trace other than wiring, so two terms are equal modulo
//! the symmetric monoidal axioms exactly when their graphs are isomorphic by
//! an isomorphism fixing the boundary. [`PortGraph::canonical`] computes a key
//! that decides this.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{ids, permutation, Node, Term};

/// Where a wire starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Input(usize),
    Port { node: usize, port: usize },
}

/// Where a wire ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sink {
    Output(usize),
    Port { node: usize, port: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxNode {
    pub label: Arc<str>,
    /// Source feeding each input port.
    pub inputs: Vec<Source>,
    /// Sink fed by each output port.
    pub outputs: Vec<Sink>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortGraph {
    arity: usize,
    coarity: usize,
    boxes: Vec<BoxNode>,
    input_sinks: Vec<Sink>,
    output_sources: Vec<Source>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("boundary types differ: {0:?} vs {1:?}")]
    TypeMismatch((usize, usize), (usize, usize)),
    #[error("rewrite would introduce a directed cycle")]
    CycleIntroduced,
}

/// Canonical labelling of a graph: the key plus the box order it induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub key: CanonicalKey,
    /// `order[i]` is the box with canonical index `i`.
    pub order: Vec<usize>,
    /// `rank[b]` is the canonical index of box `b`.
    pub rank: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(pub String);

/// An occurrence of a pattern inside a host graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    /// Host box for each pattern box.
    pub boxes: Vec<usize>,
    /// Host source plugged into each pattern input.
    pub inputs: Vec<Source>,
    /// Host sink fed by each pattern output.
    pub outputs: Vec<Sink>,
}

impl PortGraph {
    pub fn from_term(term: &Term) -> PortGraph {
        let mut raw: Vec<(Arc<str>, Vec<Source>, usize)> = Vec::new();
        let inputs: Vec<Source> = (0..term.arity()).map(Source::Input).collect();
        let outputs = build(term, inputs, &mut raw);
        PortGraph::assemble(term.arity(), term.coarity(), raw, outputs)
    }

    /// Builds a graph from boxes given by (label, input sources, output count)
    /// and the sources of the boundary outputs.
    fn assemble(
        arity: usize,
        coarity: usize,
        raw: Vec<(Arc<str>, Vec<Source>, usize)>,
        output_sources: Vec<Source>,
    ) -> PortGraph {
        let mut boxes: Vec<BoxNode> = raw
            .into_iter()
            .map(|(label, inputs, n_out)| BoxNode {
                label,
                inputs,
                outputs: vec![Sink::Output(usize::MAX); n_out],
            })
            .collect();
        let mut input_sinks = vec![Sink::Output(usize::MAX); arity];
        let mut attach = |src: Source, sink: Sink, boxes: &mut Vec<BoxNode>| match src {
            Source::Input(i) => input_sinks[i] = sink,
            Source::Port { node, port } => boxes[node].outputs[port] = sink,
        };
        for b in 0..boxes.len() {
            for p in 0..boxes[b].inputs.len() {
                let src = boxes[b].inputs[p];
                attach(src, Sink::Port { node: b, port: p }, &mut boxes);
            }
        }
        for (j, &src) in output_sources.iter().enumerate() {
            attach(src, Sink::Output(j), &mut boxes);
        }
        PortGraph {
            arity,
            coarity,
            boxes,
            input_sinks,
            output_sources,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn coarity(&self) -> usize {
        self.coarity
    }

    pub fn ty(&self) -> (usize, usize) {
        (self.arity, self.coarity)
    }

    pub fn boxes(&self) -> &[BoxNode] {
        &self.boxes
    }

    pub fn input_sinks(&self) -> &[Sink] {
        &self.input_sinks
    }

    pub fn output_sources(&self) -> &[Source] {
        &self.output_sources
    }

    /// All wires as (source, sink) pairs.
    pub fn wires(&self) -> Vec<(Source, Sink)> {
        let mut out: Vec<(Source, Sink)> = self
            .input_sinks
            .iter()
            .enumerate()
            .map(|(i, &s)| (Source::Input(i), s))
            .collect();
        for (b, bx) in self.boxes.iter().enumerate() {
            for (q, &s) in bx.outputs.iter().enumerate() {
                out.push((Source::Port { node: b, port: q }, s));
            }
        }
        out
    }

    /// A topological order of the boxes, or `None` if there is a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.boxes.len();
        let mut indegree: Vec<usize> = self
            .boxes
            .iter()
            .map(|b| {
                b.inputs
                    .iter()
                    .filter(|s| matches!(s, Source::Port { .. }))
                    .count()
            })
            .collect();
        let mut ready: VecDeque<usize> = (0..n).filter(|&b| indegree[b] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(b) = ready.pop_front() {
            order.push(b);
            for s in &self.boxes[b].outputs {
                if let Sink::Port { node, .. } = *s {
                    indegree[node] -= 1;
                    if indegree[node] == 0 {
                        ready.push_back(node);
                    }
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Canonical labelling. Boxes reachable from the boundary are numbered by
    /// a deterministic traversal anchored at the ordered interface; because
    /// ports are ordered this numbering is forced. Closed components are
    /// numbered from every possible root and the least encoding is kept; the
    /// component encodings are then sorted, so closed parts behave as a
    /// multiset.
    pub fn canonical(&self) -> Canonical {
        let n = self.boxes.len();
        let mut rank: Vec<Option<usize>> = vec![None; n];
        let mut seeds = Vec::new();
        for s in &self.input_sinks {
            if let Sink::Port { node, .. } = *s {
                seeds.push(node);
            }
        }
        for s in &self.output_sources {
            if let Source::Port { node, .. } = *s {
                seeds.push(node);
            }
        }
        let anchored = self.traverse(&seeds, &mut rank, 0);
        let mut key = String::new();
        write!(key, "{}>{}|", self.arity, self.coarity).unwrap();
        for s in &self.input_sinks {
            push_sink(&mut key, *s, &rank, 0);
        }
        key.push('|');
        for s in &self.output_sources {
            push_source(&mut key, *s, &rank, 0);
        }
        key.push('|');
        for &b in &anchored {
            self.push_box(&mut key, b, &rank, 0);
        }

        // Closed components, each canonicalised on its own.
        let mut components: Vec<(String, Vec<usize>)> = Vec::new();
        let mut seen: Vec<bool> = rank.iter().map(|r| r.is_some()).collect();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let members = self.component(start);
            for &m in &members {
                seen[m] = true;
            }
            let mut best: Option<(String, Vec<usize>)> = None;
            let min_label = members
                .iter()
                .map(|&m| self.box_signature(m))
                .min()
                .unwrap();
            for &root in &members {
                if self.box_signature(root) != min_label {
                    continue;
                }
                let mut local: Vec<Option<usize>> = vec![None; n];
                let order = self.traverse(&[root], &mut local, 0);
                let mut enc = String::new();
                for &b in &order {
                    self.push_box(&mut enc, b, &local, 0);
                }
                if best.as_ref().is_none_or(|(e, _)| enc < *e) {
                    best = Some((enc, order));
                }
            }
            components.push(best.unwrap());
        }
        components.sort();
        let mut order = anchored;
        for (enc, members) in &components {
            key.push('#');
            key.push_str(enc);
            order.extend(members.iter().copied());
        }
        let mut ranks = vec![0; n];
        for (i, &b) in order.iter().enumerate() {
            ranks[b] = i;
        }
        Canonical {
            key: CanonicalKey(key),
            order,
            rank: ranks,
        }
    }

    pub fn key(&self) -> CanonicalKey {
        self.canonical().key
    }

    fn box_signature(&self, b: usize) -> (Arc<str>, usize, usize) {
        let bx = &self.boxes[b];
        (bx.label.clone(), bx.inputs.len(), bx.outputs.len())
    }

    /// Numbers unnumbered boxes reachable from `seeds`, in discovery order.
    fn traverse(&self, seeds: &[usize], rank: &mut [Option<usize>], start: usize) -> Vec<usize> {
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        let mut next = start;
        let mut visit = |b: usize, rank: &mut [Option<usize>], order: &mut Vec<usize>, queue: &mut VecDeque<usize>| {
            if rank[b].is_none() {
                rank[b] = Some(next);
                next += 1;
                order.push(b);
                queue.push_back(b);
            }
        };
        for &s in seeds {
            visit(s, rank, &mut order, &mut queue);
        }
        while let Some(b) = queue.pop_front() {
            for &src in &self.boxes[b].inputs {
                if let Source::Port { node, .. } = src {
                    visit(node, rank, &mut order, &mut queue);
                }
            }
            for &sink in &self.boxes[b].outputs {
                if let Sink::Port { node, .. } = sink {
                    visit(node, rank, &mut order, &mut queue);
                }
            }
        }
        order
    }

    /// Boxes connected to `start` through wires, in index order.
    fn component(&self, start: usize) -> Vec<usize> {
        let mut rank = vec![None; self.boxes.len()];
        let mut members = self.traverse(&[start], &mut rank, 0);
        members.sort_unstable();
        members
    }

    fn push_box(&self, out: &mut String, b: usize, rank: &[Option<usize>], offset: usize) {
        let bx = &self.boxes[b];
        write!(out, "{}:{}:{}/{}[", bx.label.len(), bx.label, bx.inputs.len(), bx.outputs.len()).unwrap();
        for s in &bx.inputs {
            push_source(out, *s, rank, offset);
        }
        out.push(']');
    }

    /// Convex occurrences of `pattern` in `self`, ordered lexicographically by
    /// the canonical indices of the host boxes used.
    pub fn find_matches(&self, pattern: &PortGraph) -> Vec<Match> {
        let host_rank = self.canonical().rank;
        let plan = MatchPlan::new(pattern);
        let mut by_label: Vec<Vec<usize>> = Vec::new();
        for pb in &pattern.boxes {
            let mut cands: Vec<usize> = (0..self.boxes.len())
                .filter(|&h| {
                    let hb = &self.boxes[h];
                    hb.label == pb.label
                        && hb.inputs.len() == pb.inputs.len()
                        && hb.outputs.len() == pb.outputs.len()
                })
                .collect();
            cands.sort_by_key(|&h| host_rank[h]);
            by_label.push(cands);
        }
        let mut found: Vec<(Vec<usize>, Match)> = Vec::new();
        let mut assignment = vec![usize::MAX; pattern.boxes.len()];
        let mut used = vec![false; self.boxes.len()];
        self.extend_match(pattern, &plan, &by_label, 0, &mut assignment, &mut used, &host_rank, &mut found);
        found.sort_by(|a, b| a.0.cmp(&b.0));
        found.into_iter().map(|(_, m)| m).collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_match(
        &self,
        pattern: &PortGraph,
        plan: &MatchPlan,
        candidates: &[Vec<usize>],
        depth: usize,
        assignment: &mut Vec<usize>,
        used: &mut Vec<bool>,
        host_rank: &[usize],
        found: &mut Vec<(Vec<usize>, Match)>,
    ) {
        if depth == plan.order.len() {
            self.complete_match(pattern, assignment, host_rank, found);
            return;
        }
        let pb = plan.order[depth];
        let forced: Option<usize> = match plan.links[depth] {
            Link::Root => None,
            Link::FromOutput { parent, out_port, in_port } => {
                match self.boxes[assignment[parent]].outputs[out_port] {
                    Sink::Port { node, port } if port == in_port => Some(node),
                    _ => return,
                }
            }
            Link::FromInput { parent, in_port, out_port } => {
                match self.boxes[assignment[parent]].inputs[in_port] {
                    Source::Port { node, port } if port == out_port => Some(node),
                    _ => return,
                }
            }
        };
        let options: Vec<usize> = match forced {
            Some(h) => {
                if candidates[pb].contains(&h) {
                    vec![h]
                } else {
                    return;
                }
            }
            None => candidates[pb].clone(),
        };
        for h in options {
            if used[h] {
                continue;
            }
            used[h] = true;
            assignment[pb] = h;
            self.extend_match(pattern, plan, candidates, depth + 1, assignment, used, host_rank, found);
            used[h] = false;
            assignment[pb] = usize::MAX;
        }
    }

    fn complete_match(
        &self,
        pattern: &PortGraph,
        assignment: &[usize],
        host_rank: &[usize],
        found: &mut Vec<(Vec<usize>, Match)>,
    ) {
        // Every internal pattern wire must be a host wire.
        for (c, pb) in pattern.boxes.iter().enumerate() {
            for (p, src) in pb.inputs.iter().enumerate() {
                if let Source::Port { node, port } = *src {
                    let expect = Source::Port {
                        node: assignment[node],
                        port,
                    };
                    if self.boxes[assignment[c]].inputs[p] != expect {
                        return;
                    }
                }
            }
        }
        let in_image: Vec<bool> = {
            let mut v = vec![false; self.boxes.len()];
            for &h in assignment {
                v[h] = true;
            }
            v
        };
        let mut inputs: Vec<Option<Source>> = vec![None; pattern.arity];
        let mut outputs: Vec<Option<Sink>> = vec![None; pattern.coarity];
        let mut passes: Vec<(usize, usize)> = Vec::new();
        for (i, sink) in pattern.input_sinks.iter().enumerate() {
            match *sink {
                Sink::Port { node, port } => {
                    inputs[i] = Some(self.boxes[assignment[node]].inputs[port]);
                }
                Sink::Output(j) => passes.push((i, j)),
            }
        }
        for (j, src) in pattern.output_sources.iter().enumerate() {
            if let Source::Port { node, port } = *src {
                outputs[j] = Some(self.boxes[assignment[node]].outputs[port]);
            }
        }
        // Candidate host wires for pass-through pattern wires: those touching
        // no image box, identified by their sink.
        let free_wires: Vec<(Source, Sink)> = self
            .wires()
            .into_iter()
            .filter(|(s, t)| {
                let s_ok = !matches!(*s, Source::Port { node, .. } if in_image[node]);
                let t_ok = !matches!(*t, Sink::Port { node, .. } if in_image[node]);
                s_ok && t_ok
            })
            .collect();
        let base_key: Vec<usize> = assignment.iter().map(|&h| host_rank[h]).collect();
        let sink_key = |t: Sink| -> usize {
            match t {
                Sink::Port { node, port } => host_rank[node] * 64 + port,
                Sink::Output(j) => usize::MAX / 2 + j,
            }
        };
        let mut chosen: Vec<usize> = Vec::new();
        self.assign_passes(
            &passes,
            &free_wires,
            &mut chosen,
            &mut |chosen: &[usize]| {
                let mut ins = inputs.clone();
                let mut outs = outputs.clone();
                let mut key = base_key.clone();
                for (&(i, j), &w) in passes.iter().zip(chosen) {
                    ins[i] = Some(free_wires[w].0);
                    outs[j] = Some(free_wires[w].1);
                    key.push(sink_key(free_wires[w].1));
                }
                let m = Match {
                    boxes: assignment.to_vec(),
                    inputs: ins.into_iter().map(Option::unwrap).collect(),
                    outputs: outs.into_iter().map(Option::unwrap).collect(),
                };
                if self.is_convex(&m, &in_image) {
                    found.push((key, m));
                }
            },
        );
    }

    fn assign_passes(
        &self,
        passes: &[(usize, usize)],
        free: &[(Source, Sink)],
        chosen: &mut Vec<usize>,
        emit: &mut dyn FnMut(&[usize]),
    ) {
        if chosen.len() == passes.len() {
            emit(chosen);
            return;
        }
        for w in 0..free.len() {
            if chosen.contains(&w) {
                continue;
            }
            chosen.push(w);
            self.assign_passes(passes, free, chosen, emit);
            chosen.pop();
        }
    }

    /// No host path may leave the hole through an output and come back in
    /// through an input.
    fn is_convex(&self, m: &Match, in_image: &[bool]) -> bool {
        let mut reached = vec![false; self.boxes.len()];
        let mut stack: Vec<Sink> = m.outputs.clone();
        while let Some(t) = stack.pop() {
            if let Sink::Port { node, .. } = t {
                if in_image[node] || reached[node] {
                    continue;
                }
                reached[node] = true;
                stack.extend(self.boxes[node].outputs.iter().copied());
            }
        }
        m.inputs.iter().all(|s| match *s {
            Source::Input(_) => true,
            Source::Port { node, .. } => !in_image[node] && !reached[node],
        })
    }

    /// Replaces the occurrence `m` by `rhs`, which must have the pattern's type.
    pub fn rewrite(&self, m: &Match, rhs: &PortGraph) -> Result<PortGraph, GraphError> {
        if (m.inputs.len(), m.outputs.len()) != rhs.ty() {
            return Err(GraphError::TypeMismatch(
                (m.inputs.len(), m.outputs.len()),
                rhs.ty(),
            ));
        }
        let mut new_id = vec![None; self.boxes.len()];
        let mut kept = 0;
        let removed: BTreeSet<usize> = m.boxes.iter().copied().collect();
        for (b, slot) in new_id.iter_mut().enumerate() {
            if !removed.contains(&b) {
                *slot = Some(kept);
                kept += 1;
            }
        }
        let host_src = |s: Source| -> Source {
            match s {
                Source::Input(i) => Source::Input(i),
                Source::Port { node, port } => Source::Port {
                    node: new_id[node].expect("hole inputs never come from the image"),
                    port,
                },
            }
        };
        let rhs_src = |s: Source| -> Source {
            match s {
                Source::Input(i) => host_src(m.inputs[i]),
                Source::Port { node, port } => Source::Port {
                    node: kept + node,
                    port,
                },
            }
        };
        let hole_out = |t: Sink| m.outputs.iter().position(|&o| o == t);
        let mut raw: Vec<(Arc<str>, Vec<Source>, usize)> = Vec::new();
        for (b, bx) in self.boxes.iter().enumerate() {
            if new_id[b].is_none() {
                continue;
            }
            let inputs = (0..bx.inputs.len())
                .map(|p| match hole_out(Sink::Port { node: b, port: p }) {
                    Some(j) => rhs_src(rhs.output_sources[j]),
                    None => host_src(bx.inputs[p]),
                })
                .collect();
            raw.push((bx.label.clone(), inputs, bx.outputs.len()));
        }
        for bx in &rhs.boxes {
            let inputs = bx.inputs.iter().map(|&s| rhs_src(s)).collect();
            raw.push((bx.label.clone(), inputs, bx.outputs.len()));
        }
        let outputs = (0..self.coarity)
            .map(|j| match hole_out(Sink::Output(j)) {
                Some(k) => rhs_src(rhs.output_sources[k]),
                None => host_src(self.output_sources[j]),
            })
            .collect();
        let g = PortGraph::assemble(self.arity, self.coarity, raw, outputs);
        if g.is_acyclic() {
            Ok(g)
        } else {
            Err(GraphError::CycleIntroduced)
        }
    }

    /// Reads the graph back as a term, layer by layer.
    pub fn to_term(&self) -> Term {
        let order = self
            .topological_order()
            .expect("port graphs built from terms are acyclic");
        let mut depth = vec![0usize; self.boxes.len()];
        for &b in &order {
            for s in &self.boxes[b].inputs {
                if let Source::Port { node, .. } = *s {
                    depth[b] = depth[b].max(depth[node] + 1);
                }
            }
        }
        let max_depth = depth.iter().copied().max().map_or(0, |d| d + 1);
        let mut wires: Vec<Source> = (0..self.arity).map(Source::Input).collect();
        let mut parts: Vec<Term> = Vec::new();
        for level in 0..max_depth {
            let layer: Vec<usize> = order.iter().copied().filter(|&b| depth[b] == level).collect();
            let mut arrangement: Vec<usize> = Vec::new();
            for &b in &layer {
                for s in &self.boxes[b].inputs {
                    arrangement.push(wires.iter().position(|w| w == s).unwrap());
                }
            }
            let rest: Vec<usize> = (0..wires.len()).filter(|i| !arrangement.contains(i)).collect();
            arrangement.extend(rest.iter().copied());
            parts.push(permutation(&arrangement));
            let mut boxes_term: Vec<Term> = Vec::new();
            let mut next_wires: Vec<Source> = Vec::new();
            for &b in &layer {
                let bx = &self.boxes[b];
                boxes_term.push(Term::generator(&bx.label, bx.inputs.len(), bx.outputs.len()));
                for q in 0..bx.outputs.len() {
                    next_wires.push(Source::Port { node: b, port: q });
                }
            }
            boxes_term.push(ids(rest.len()));
            for &i in &rest {
                next_wires.push(wires[i]);
            }
            parts.push(Term::par_all(boxes_term));
            wires = next_wires;
        }
        let finish: Vec<usize> = self
            .output_sources
            .iter()
            .map(|s| wires.iter().position(|w| w == s).unwrap())
            .collect();
        parts.push(permutation(&finish));
        simplify(
            Term::seq_all(parts)
                .expect("layers compose")
                .unwrap_or_else(|| ids(self.arity)),
        )
    }

    /// Graphviz rendering with node identifiers taken from the canonical
    /// labelling, so that smc-equal graphs print identically.
    pub fn to_dot(&self) -> String {
        let canon = self.canonical();
        let rank = &canon.rank;
        let mut out = String::new();
        out.push_str("digraph diagram {\n  rankdir=LR;\n  node [fontname=\"Helvetica\"];\n");
        out.push_str("  subgraph inputs {\n    rank=source;\n");
        for i in 0..self.arity {
            writeln!(out, "    in{i} [shape=point, xlabel=\"{i}\"];").unwrap();
        }
        out.push_str("  }\n  subgraph outputs {\n    rank=sink;\n");
        for j in 0..self.coarity {
            writeln!(out, "    out{j} [shape=point, xlabel=\"{j}\"];").unwrap();
        }
        out.push_str("  }\n");
        for &b in &canon.order {
            let bx = &self.boxes[b];
            let ins: Vec<String> = (0..bx.inputs.len()).map(|p| format!("<i{p}>")).collect();
            let outs: Vec<String> = (0..bx.outputs.len()).map(|q| format!("<o{q}>")).collect();
            writeln!(
                out,
                "  n{} [shape=record, label=\"{{{}}}|{}|{{{}}}\"];",
                rank[b],
                ins.join("|"),
                escape(&bx.label),
                outs.join("|")
            )
            .unwrap();
        }
        let mut edges: Vec<(String, String)> = self
            .wires()
            .into_iter()
            .map(|(s, t)| {
                let from = match s {
                    Source::Input(i) => format!("in{i}"),
                    Source::Port { node, port } => format!("n{}:o{port}", rank[node]),
                };
                let to = match t {
                    Sink::Output(j) => format!("out{j}"),
                    Sink::Port { node, port } => format!("n{}:i{port}", rank[node]),
                };
                (from, to)
            })
            .collect();
        edges.sort();
        for (from, to) in edges {
            writeln!(out, "  {from} -> {to};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

fn escape(label: &str) -> String {
    label
        .chars()
        .flat_map(|c| match c {
            '{' | '}' | '|' | '<' | '>' | '"' | '\\' => vec!['\\', c],
            _ => vec![c],
        })
        .collect()
}

fn push_source(out: &mut String, s: Source, rank: &[Option<usize>], offset: usize) {
    match s {
        Source::Input(i) => write!(out, "i{i},").unwrap(),
        Source::Port { node, port } => {
            write!(out, "b{}.{port},", rank[node].expect("numbered") - offset).unwrap()
        }
    }
}

fn push_sink(out: &mut String, s: Sink, rank: &[Option<usize>], offset: usize) {
    match s {
        Sink::Output(j) => write!(out, "o{j},").unwrap(),
        Sink::Port { node, port } => {
            write!(out, "b{}.{port},", rank[node].expect("numbered") - offset).unwrap()
        }
    }
}

fn build(term: &Term, ins: Vec<Source>, raw: &mut Vec<(Arc<str>, Vec<Source>, usize)>) -> Vec<Source> {
    match term.node() {
        Node::Gen(name) => {
            let node = raw.len();
            raw.push((name.clone(), ins, term.coarity()));
            (0..term.coarity())
                .map(|port| Source::Port { node, port })
                .collect()
        }
        Node::Def(_, body) => build(body, ins, raw),
        Node::Id1 | Node::Id0 => ins,
        Node::Sym => vec![ins[1], ins[0]],
        Node::Seq(a, b) => {
            let mid = build(a, ins, raw);
            build(b, mid, raw)
        }
        Node::Par(a, b) => {
            let mut left = ins;
            let right = left.split_off(a.arity());
            let mut out = build(a, left, raw);
            out.extend(build(b, right, raw));
            out
        }
    }
}

/// Drops identity layers produced by the layered read-back.
fn simplify(t: Term) -> Term {
    match t.node() {
        Node::Seq(a, b) => {
            let (a, b) = (simplify(a.clone()), simplify(b.clone()));
            if is_identity(&a) {
                b
            } else if is_identity(&b) {
                a
            } else {
                a.seq(b).expect("simplification preserves types")
            }
        }
        Node::Par(a, b) => {
            let (a, b) = (simplify(a.clone()), simplify(b.clone()));
            if matches!(a.node(), Node::Id0) {
                b
            } else if matches!(b.node(), Node::Id0) {
                a
            } else {
                a.par(b)
            }
        }
        _ => t,
    }
}

fn is_identity(t: &Term) -> bool {
    match t.node() {
        Node::Id1 | Node::Id0 => true,
        Node::Par(a, b) => is_identity(a) && is_identity(b),
        _ => false,
    }
}

/// Pattern boxes in a connected-first order, with the wire that pins down
/// each non-root box once its parent is placed.
struct MatchPlan {
    order: Vec<usize>,
    links: Vec<Link>,
}

#[derive(Clone, Copy)]
enum Link {
    Root,
    /// `parent.out[out_port]` feeds `child.in[in_port]`.
    FromOutput { parent: usize, out_port: usize, in_port: usize },
    /// `parent.in[in_port]` is fed by `child.out[out_port]`.
    FromInput { parent: usize, in_port: usize, out_port: usize },
}

impl MatchPlan {
    fn new(pattern: &PortGraph) -> MatchPlan {
        let n = pattern.boxes.len();
        let mut placed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut links = Vec::with_capacity(n);
        for root in 0..n {
            if placed[root] {
                continue;
            }
            placed[root] = true;
            order.push(root);
            links.push(Link::Root);
            let mut queue = VecDeque::from([root]);
            while let Some(b) = queue.pop_front() {
                for (p, src) in pattern.boxes[b].inputs.iter().enumerate() {
                    if let Source::Port { node, port } = *src {
                        if !placed[node] {
                            placed[node] = true;
                            order.push(node);
                            links.push(Link::FromInput {
                                parent: b,
                                in_port: p,
                                out_port: port,
                            });
                            queue.push_back(node);
                        }
                    }
                }
                for (q, sink) in pattern.boxes[b].outputs.iter().enumerate() {
                    if let Sink::Port { node, port } = *sink {
                        if !placed[node] {
                            placed[node] = true;
                            order.push(node);
                            links.push(Link::FromOutput {
                                parent: b,
                                out_port: q,
                                in_port: port,
                            });
                            queue.push_back(node);
                        }
                    }
                }
            }
        }
        MatchPlan { order, links }
    }
}

/// Equality modulo the symmetric monoidal axioms.
pub fn smc_equal(a: &PortGraph, b: &PortGraph) -> Result<bool, GraphError> {
    if a.ty() != b.ty() {
        return Err(GraphError::TypeMismatch(a.ty(), b.ty()));
    }
    Ok(a.boxes.len() == b.boxes.len() && a.key() == b.key())
}

/// Convenience wrapper comparing two terms.
pub fn terms_equal(a: &Term, b: &Term) -> bool {
    a.ty() == b.ty()
        && smc_equal(&PortGraph::from_term(a), &PortGraph::from_term(b)).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::symmetry;

    fn g(name: &str, a: usize, c: usize) -> Term {
        Term::generator(name, a, c)
    }

    fn graph(t: &Term) -> PortGraph {
        PortGraph::from_term(t)
    }

    #[test]
    fn identity_is_a_single_wire() {
        let p = graph(&Term::id());
        assert!(p.boxes().is_empty());
        assert_eq!(p.wires(), vec![(Source::Input(0), Sink::Output(0))]);
    }

    #[test]
    fn double_symmetry_is_the_identity() {
        let ss = Term::sym().seq(Term::sym()).unwrap();
        assert!(smc_equal(&graph(&ss), &graph(&ids(2))).unwrap());
        assert!(!smc_equal(&graph(&Term::sym()), &graph(&ids(2))).unwrap());
    }

    #[test]
    fn commutativity_is_not_structural() {
        let mul = g("mul", 2, 1);
        let swapped = Term::sym().seq(mul.clone()).unwrap();
        assert!(!smc_equal(&graph(&mul), &graph(&swapped)).unwrap());
    }

    #[test]
    fn empty_diagram_is_a_unit_for_par() {
        let t = g("f", 2, 1).seq(g("h", 1, 3)).unwrap();
        assert!(smc_equal(&graph(&Term::id0().par(t.clone())), &graph(&t)).unwrap());
    }

    #[test]
    fn interchange_law() {
        let (t1, t2, t3, t4) = (g("a", 1, 2), g("b", 2, 1), g("c", 2, 2), g("d", 1, 1));
        let lhs = t1.clone().seq(t3.clone()).unwrap().par(t2.clone().seq(t4.clone()).unwrap());
        let rhs = t1.par(t2).seq(t3.par(t4)).unwrap();
        assert!(smc_equal(&graph(&lhs), &graph(&rhs)).unwrap());
    }

    #[test]
    fn symmetry_naturality() {
        let f = g("f", 2, 1);
        let h = g("h", 1, 2);
        let lhs = f.clone().par(h.clone()).seq(symmetry(1, 2)).unwrap();
        let rhs = symmetry(2, 1).seq(h.par(f)).unwrap();
        assert!(smc_equal(&graph(&lhs), &graph(&rhs)).unwrap());
    }

    #[test]
    fn closed_components_form_a_multiset() {
        let a = g("u", 0, 1).seq(g("e", 1, 0)).unwrap();
        let b = g("v", 0, 2).seq(g("w", 2, 0)).unwrap();
        let ab = a.clone().par(b.clone()).par(Term::id());
        let ba = b.par(Term::id()).par(a);
        assert!(smc_equal(&graph(&ab), &graph(&ba)).unwrap());
    }

    #[test]
    fn two_matches_of_mul_in_a_tree() {
        let mul = g("mul", 2, 1);
        let host = mul.clone().par(Term::id()).seq(mul.clone()).unwrap();
        let ms = graph(&host).find_matches(&graph(&mul));
        assert_eq!(ms.len(), 2);
    }

    #[test]
    fn pattern_matches_itself() {
        let t = g("a", 1, 2).seq(g("b", 1, 1).par(Term::id())).unwrap();
        let p = graph(&t);
        let ms = p.find_matches(&p);
        assert!(!ms.is_empty());
        let back = p.rewrite(&ms[0], &p).unwrap();
        assert!(smc_equal(&back, &p).unwrap());
    }

    #[test]
    fn re_entrant_occurrence_is_not_convex() {
        // copy ; (f + id) ; cocopy, pattern f + id: the identity wire of the
        // pattern may not be matched to the wire that bypasses f, because the
        // hole would then feed itself through the outer copy and cocopy.
        let f = g("f", 1, 1);
        let host = g("copy", 1, 2)
            .seq(g("f", 1, 1).par(Term::id()))
            .unwrap()
            .seq(g("cocopy", 2, 1))
            .unwrap();
        let pat = f.par(Term::id());
        let hg = graph(&host);
        for m in hg.find_matches(&graph(&pat)) {
            let r = hg.rewrite(&m, &graph(&pat)).unwrap();
            assert!(r.is_acyclic());
        }
        // The pattern f ; h with h placed after cocopy is not convex.
        let host2 = g("copy", 1, 2)
            .seq(g("f", 1, 1).par(Term::id()))
            .unwrap()
            .seq(g("cocopy", 2, 1))
            .unwrap()
            .seq(g("h", 1, 1))
            .unwrap();
        let pat2 = g("f", 1, 1).par(g("h", 1, 1));
        assert!(graph(&host2).find_matches(&graph(&pat2)).is_empty());
    }

    #[test]
    fn unit_law_rewrite() {
        let copy = g("copy", 1, 2);
        let discard = g("discard", 1, 0);
        let redex = copy.seq(discard.par(Term::id())).unwrap();
        let host = g("a", 1, 1).seq(redex.clone()).unwrap().seq(g("b", 1, 1)).unwrap();
        let hg = graph(&host);
        let ms = hg.find_matches(&graph(&redex));
        assert_eq!(ms.len(), 1);
        let r = hg.rewrite(&ms[0], &graph(&Term::id())).unwrap();
        let expect = g("a", 1, 1).seq(g("b", 1, 1)).unwrap();
        assert!(smc_equal(&r, &graph(&expect)).unwrap());
    }

    #[test]
    fn commutativity_twice_is_neutral() {
        let mul = g("mul", 2, 1);
        let swapped = Term::sym().seq(mul.clone()).unwrap();
        let host = graph(&g("a", 1, 2).seq(mul.clone()).unwrap());
        let m = host.find_matches(&graph(&mul)).remove(0);
        let once = host.rewrite(&m, &graph(&swapped)).unwrap();
        assert!(!smc_equal(&once, &host).unwrap());
        let m2 = once.find_matches(&graph(&mul)).remove(0);
        let twice = once.rewrite(&m2, &graph(&swapped)).unwrap();
        assert!(smc_equal(&twice, &host).unwrap());
    }

    #[test]
    fn identity_pattern_matches_every_wire() {
        let host = graph(&g("mul", 2, 1));
        assert_eq!(host.find_matches(&graph(&Term::id())).len(), 3);
        assert_eq!(host.find_matches(&graph(&Term::id0())).len(), 1);
    }

    #[test]
    fn read_back_round_trips() {
        let t = g("copy", 1, 2)
            .seq(g("f", 1, 1).par(g("u", 0, 1)).par(Term::id()))
            .unwrap()
            .seq(symmetry(1, 2))
            .unwrap()
            .par(g("e", 0, 0));
        let p = graph(&t);
        let back = p.to_term();
        assert_eq!(back.ty(), t.ty());
        assert!(smc_equal(&graph(&back), &p).unwrap());
    }

    #[test]
    fn dot_is_stable_under_smc_equality() {
        let (t1, t2, t3, t4) = (g("a", 1, 2), g("b", 2, 1), g("c", 2, 2), g("d", 1, 1));
        let lhs = t1.clone().seq(t3.clone()).unwrap().par(t2.clone().seq(t4.clone()).unwrap());
        let rhs = t1.par(t2).seq(t3.par(t4)).unwrap();
        assert_eq!(graph(&lhs).to_dot(), graph(&rhs).to_dot());
    }
}
