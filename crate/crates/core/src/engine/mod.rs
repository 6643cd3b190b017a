//! Rewriting semantics: bounded exploration of the one-step relation,
//! components, distances and (quasi-)normal forms.

pub mod path;

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polygraph::{Polygraph, Word};

pub use path::{canonical, commute, enumerate_steps, equivalent, support, Path, Step, SupportMultiset, ZigzagPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExplorationBudget {
    pub max_word_len: usize,
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for ExplorationBudget {
    fn default() -> Self {
        ExplorationBudget { max_word_len: 12, max_states: 200_000, max_depth: 64 }
    }
}

/// One out-edge: the rule applied at `pos` of the source vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub rule: usize,
    pub pos: usize,
    pub target: usize,
}

/// Explored part of the rewrite relation. Vertex ids follow discovery order.
#[derive(Debug, Clone)]
pub struct ReductionGraph {
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    out: Vec<Vec<Edge>>,
    complete: Vec<bool>,
    scc: Vec<usize>,
    scc_sink: Vec<bool>,
    scc_size: Vec<usize>,
    pub truncated: bool,
    pub budget: ExplorationBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Terminating,
    QuasiTerminatingNotTerminating,
    NotQuasiTerminating,
    Inconclusive,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Terminating => "terminating",
            Termination::QuasiTerminatingNotTerminating => "quasi_terminating_not_terminating",
            Termination::NotQuasiTerminating => "not_quasi_terminating",
            Termination::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TerminationReport {
    pub class: Termination,
    /// Scope of the verdict, e.g. `acyclic-on-explored`.
    pub note: String,
}

/// Breadth-first closure of `seeds`. A vertex is expanded unless it is
/// longer than `max_word_len` or at depth `max_depth`; new vertices beyond
/// `max_states` are dropped. Any suppressed edge marks the graph truncated.
pub fn explore(p: &Polygraph, seeds: &[Word], budget: ExplorationBudget) -> ReductionGraph {
    let mut g = ReductionGraph {
        words: Vec::new(),
        index: HashMap::new(),
        out: Vec::new(),
        complete: Vec::new(),
        scc: Vec::new(),
        scc_sink: Vec::new(),
        scc_size: Vec::new(),
        truncated: false,
        budget,
    };
    let mut depth = Vec::new();
    let mut queue = VecDeque::new();
    for s in seeds {
        if !g.index.contains_key(s) {
            let id = g.push(s.clone());
            depth.push(0usize);
            queue.push_back(id);
        }
    }
    while let Some(v) = queue.pop_front() {
        let w = g.words[v].clone();
        let steps = enumerate_steps(p, &w);
        if steps.is_empty() {
            g.complete[v] = true;
            continue;
        }
        if w.len() > budget.max_word_len || depth[v] >= budget.max_depth {
            g.truncated = true;
            continue;
        }
        let mut complete = true;
        for s in steps {
            let t = s.target(p);
            let tid = match g.index.get(&t) {
                Some(&id) => id,
                None if g.words.len() < budget.max_states => {
                    let id = g.push(t);
                    depth.push(depth[v] + 1);
                    queue.push_back(id);
                    id
                }
                None => {
                    complete = false;
                    continue;
                }
            };
            g.out[v].push(Edge { rule: s.rule, pos: s.pos(), target: tid });
        }
        g.complete[v] = complete;
        if !complete {
            g.truncated = true;
        }
    }
    g.condense();
    g
}

impl ReductionGraph {
    fn push(&mut self, w: Word) -> usize {
        let id = self.words.len();
        self.index.insert(w.clone(), id);
        self.words.push(w);
        self.out.push(Vec::new());
        self.complete.push(false);
        id
    }

    /// Tarjan's algorithm, iterative; component ids in completion order.
    fn condense(&mut self) {
        let n = self.words.len();
        const UNSET: usize = usize::MAX;
        let mut index = vec![UNSET; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comp = vec![UNSET; n];
        let mut ncomp = 0;
        let mut counter = 0;
        for root in 0..n {
            if index[root] != UNSET {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut i)) = call.last_mut() {
                if *i < self.out[v].len() {
                    let w = self.out[v][*i].target;
                    *i += 1;
                    if index[w] == UNSET {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp[w] = ncomp;
                            if w == v {
                                break;
                            }
                        }
                        ncomp += 1;
                    }
                }
            }
        }
        let mut sink = vec![true; ncomp];
        let mut size = vec![0; ncomp];
        for v in 0..n {
            size[comp[v]] += 1;
            if !self.complete[v] || self.out[v].iter().any(|e| comp[e.target] != comp[v]) {
                sink[comp[v]] = false;
            }
        }
        self.scc = comp;
        self.scc_sink = sink;
        self.scc_size = size;
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn vertex(&self, w: &[u16]) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn word(&self, id: usize) -> &Word {
        &self.words[id]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn edges(&self, id: usize) -> &[Edge] {
        &self.out[id]
    }

    pub fn num_edges(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn is_complete(&self, id: usize) -> bool {
        self.complete[id]
    }

    pub fn scc_of(&self, id: usize) -> usize {
        self.scc[id]
    }

    pub fn scc_count(&self) -> usize {
        self.scc_sink.len()
    }

    pub fn is_sink_scc(&self, c: usize) -> bool {
        self.scc_sink[c]
    }

    pub fn scc_size(&self, c: usize) -> usize {
        self.scc_size[c]
    }

    /// The step carried by an edge out of `from`.
    pub fn step(&self, p: &Polygraph, from: usize, e: &Edge) -> Step {
        let w = &self.words[from];
        let n = p.rule(e.rule).lhs.len();
        Step::forward(w[..e.pos].to_vec(), e.rule, w[e.pos + n..].to_vec())
    }

    pub fn id(&self, p: &Polygraph, w: &[u16]) -> Result<usize> {
        self.vertex(w).ok_or_else(|| Error::NotExplored(p.show(w)))
    }

    /// Vertices reachable from `from`, in breadth-first order.
    pub fn reachable(&self, from: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = vec![from];
        seen[from] = true;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for e in &self.out[v] {
                if !seen[e.target] {
                    seen[e.target] = true;
                    order.push(e.target);
                }
            }
        }
        order
    }

    /// Reachable set, failing if it leaves the completely explored region.
    pub fn closed_reachable(&self, p: &Polygraph, from: usize) -> Result<Vec<usize>> {
        let r = self.reachable(from);
        if r.iter().any(|&v| !self.complete[v]) {
            return Err(Error::TruncatedRegion(p.show(&self.words[from])));
        }
        Ok(r)
    }

    /// Breadth-first distances from `from`; unreachable vertices get `None`.
    pub fn distances_from(&self, from: usize) -> Vec<Option<usize>> {
        let mut d = vec![None; self.len()];
        d[from] = Some(0);
        let mut q = VecDeque::from([from]);
        while let Some(v) = q.pop_front() {
            let dv = d[v].unwrap();
            for e in &self.out[v] {
                if d[e.target].is_none() {
                    d[e.target] = Some(dv + 1);
                    q.push_back(e.target);
                }
            }
        }
        d
    }

    /// Reverse adjacency, built on demand.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for v in 0..self.len() {
            for e in &self.out[v] {
                pred[e.target].push(v);
            }
        }
        pred
    }

    /// Shortest path (first in step order among shortest) from `from` to `to`
    /// using only edges accepted by `allow`.
    pub fn shortest_path(
        &self,
        p: &Polygraph,
        from: usize,
        to: usize,
        mut allow: impl FnMut(usize, &Edge) -> bool,
    ) -> Option<Path> {
        let tree = self.bfs_tree(from, &mut allow);
        self.path_in_tree(p, &tree, from, to)
    }

    /// Breadth-first predecessor tree under an edge filter.
    pub(crate) fn bfs_tree(
        &self,
        from: usize,
        allow: &mut impl FnMut(usize, &Edge) -> bool,
    ) -> HashMap<usize, Option<(usize, Edge)>> {
        let mut pred: HashMap<usize, Option<(usize, Edge)>> = HashMap::new();
        pred.insert(from, None);
        let mut q = VecDeque::from([from]);
        while let Some(v) = q.pop_front() {
            for e in &self.out[v] {
                if !pred.contains_key(&e.target) && allow(v, e) {
                    pred.insert(e.target, Some((v, *e)));
                    q.push_back(e.target);
                }
            }
        }
        pred
    }

    pub(crate) fn path_in_tree(
        &self,
        p: &Polygraph,
        tree: &HashMap<usize, Option<(usize, Edge)>>,
        from: usize,
        to: usize,
    ) -> Option<Path> {
        let mut steps = Vec::new();
        let mut cur = to;
        loop {
            match tree.get(&cur)? {
                None => break,
                Some((v, e)) => {
                    steps.push(self.step(p, *v, e));
                    cur = *v;
                }
            }
        }
        steps.reverse();
        Some(Path { source: self.words[from].clone(), steps })
    }

    /// `SRC -> TGT via RULE @ POS` lines followed by a component summary.
    pub fn dump(&self, p: &Polygraph) -> String {
        let mut s = String::new();
        for v in 0..self.len() {
            for e in &self.out[v] {
                s.push_str(&format!(
                    "{} -> {} via {} @ {}\n",
                    p.show(&self.words[v]),
                    p.show(&self.words[e.target]),
                    p.rule(e.rule).name,
                    e.pos
                ));
            }
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); self.scc_count()];
        for v in 0..self.len() {
            members[self.scc[v]].push(v);
        }
        s.push_str(&format!(
            "# {} vertices, {} edges, {} components{}\n",
            self.len(),
            self.num_edges(),
            self.scc_count(),
            if self.truncated { ", truncated" } else { "" }
        ));
        for (c, m) in members.iter().enumerate() {
            let words: Vec<String> = m.iter().map(|&v| p.show(&self.words[v])).collect();
            s.push_str(&format!(
                "# SCC {} {}: {}\n",
                c,
                if self.scc_sink[c] { "sink" } else { "inner" },
                words.join(" ")
            ));
        }
        s
    }

    fn has_cycle(&self) -> bool {
        (0..self.len()).any(|v| {
            self.scc_size[self.scc[v]] > 1 || self.out[v].iter().any(|e| e.target == v)
        })
    }
}

/// Verdict on the explored region only. Non-quasi-termination is never
/// certified from a finite exploration: budget exhaustion is reported as
/// inconclusive.
pub fn classify_termination(g: &ReductionGraph) -> TerminationReport {
    let cyclic = g.has_cycle();
    let (class, note) = match (g.truncated, cyclic) {
        (false, false) => (Termination::Terminating, "acyclic-on-explored"),
        (false, true) => (Termination::QuasiTerminatingNotTerminating, "cyclic, explored region closed"),
        (true, true) => (Termination::Inconclusive, "cycle found (not terminating); budget exhausted before closure"),
        (true, false) => (Termination::Inconclusive, "budget exhausted"),
    };
    TerminationReport { class, note: note.to_string() }
}

fn len_lex(a: &Word, b: &Word) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Members of terminal components reachable from `u`, in length-lexicographic order.
pub fn quasi_normal_forms(p: &Polygraph, g: &ReductionGraph, u: &[u16]) -> Result<Vec<Word>> {
    let id = g.id(p, u)?;
    let r = g.closed_reachable(p, id)?;
    let mut out: Vec<Word> = r.into_iter().filter(|&v| g.scc_sink[g.scc[v]]).map(|v| g.words[v].clone()).collect();
    out.sort_by(len_lex);
    Ok(out)
}

/// Length of a shortest rewriting sequence from `u` to `v`.
pub fn distance(p: &Polygraph, g: &ReductionGraph, u: &[u16], v: &[u16]) -> Result<usize> {
    let a = g.id(p, u)?;
    let b = g.id(p, v)?;
    g.distances_from(a)[b].ok_or_else(|| Error::Unreachable { from: p.show(u), to: p.show(v) })
}

/// Reachable irreducible words, in length-lexicographic order.
pub fn normal_forms(p: &Polygraph, g: &ReductionGraph, u: &[u16]) -> Result<Vec<Word>> {
    let id = g.id(p, u)?;
    let r = g.closed_reachable(p, id)?;
    let mut out: Vec<Word> = r.into_iter().filter(|&v| g.out[v].is_empty()).map(|v| g.words[v].clone()).collect();
    out.sort_by(len_lex);
    Ok(out)
}

/// Length-lexicographic least member of the unique terminal component reachable from `u`.
pub fn canonical_qnf_choice(p: &Polygraph, g: &ReductionGraph, u: &[u16]) -> Result<Word> {
    let id = g.id(p, u)?;
    let r = g.closed_reachable(p, id)?;
    let mut sinks: Vec<usize> = r.iter().map(|&v| g.scc[v]).filter(|&c| g.scc_sink[c]).collect();
    sinks.sort_unstable();
    sinks.dedup();
    if sinks.len() != 1 {
        return Err(Error::AmbiguousQnf(p.show(u)));
    }
    let mut best: Option<&Word> = None;
    for &v in &r {
        if g.scc[v] == sinks[0] && best.is_none_or(|b| len_lex(&g.words[v], b).is_lt()) {
            best = Some(&g.words[v]);
        }
    }
    Ok(best.unwrap().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygraph::all_words;

    fn toy() -> Polygraph {
        Polygraph::from_rules(
            "TOY",
            "a b c d",
            &[("r1", "c", "d"), ("r2", "d", "c"), ("r3", "d", "b"), ("r4", "b", "a"), ("r5", "a", "b"), ("r6", "c", "a")],
        )
        .unwrap()
    }

    fn b3() -> Polygraph {
        Polygraph::from_rules("B3", "s t", &[("alpha", "s t s", "t s t"), ("beta", "t s t", "s t s")]).unwrap()
    }

    fn upsilon() -> Polygraph {
        Polygraph::from_rules(
            "Upsilon",
            "s t a",
            &[("r1", "s t s", "a"), ("r2", "t s t", "a"), ("r3", "s a", "a t"), ("r4", "t a", "a s")],
        )
        .unwrap()
    }

    fn w(p: &Polygraph, s: &str) -> Word {
        p.parse_word(s).unwrap()
    }

    #[test]
    fn toy_components() {
        let p = toy();
        let g = explore(&p, &[w(&p, "c")], ExplorationBudget::default());
        assert_eq!(g.len(), 4);
        assert!(!g.truncated);
        let a = g.vertex(&w(&p, "a")).unwrap();
        let b = g.vertex(&w(&p, "b")).unwrap();
        let c = g.vertex(&w(&p, "c")).unwrap();
        let d = g.vertex(&w(&p, "d")).unwrap();
        assert_eq!(g.scc_of(a), g.scc_of(b));
        assert_eq!(g.scc_of(c), g.scc_of(d));
        assert!(g.is_sink_scc(g.scc_of(a)));
        assert!(!g.is_sink_scc(g.scc_of(c)));
        let names = |v: Vec<Word>| v.iter().map(|x| p.show(x)).collect::<Vec<_>>();
        assert_eq!(names(quasi_normal_forms(&p, &g, &w(&p, "d")).unwrap()), vec!["a", "b"]);
        assert_eq!(names(quasi_normal_forms(&p, &g, &w(&p, "c")).unwrap()), vec!["a", "b"]);
        assert_eq!(distance(&p, &g, &w(&p, "c"), &w(&p, "a")).unwrap(), 1);
    }

    #[test]
    fn b3_single_sink() {
        let p = b3();
        let g = explore(&p, &[w(&p, "sts")], ExplorationBudget::default());
        assert_eq!(g.len(), 2);
        assert_eq!(g.scc_count(), 1);
        assert!(g.is_sink_scc(0));
        assert_eq!(quasi_normal_forms(&p, &g, &w(&p, "sts")).unwrap().len(), 2);
        assert!(normal_forms(&p, &g, &w(&p, "sts")).unwrap().is_empty());
    }

    #[test]
    fn b3_classification_and_distance() {
        let p = b3();
        let g = explore(&p, &all_words(&p, 5), ExplorationBudget::default());
        assert_eq!(classify_termination(&g).class, Termination::QuasiTerminatingNotTerminating);
        assert_eq!(distance(&p, &g, &w(&p, "tstt"), &w(&p, "stst")).unwrap(), 1);
        assert_eq!(distance(&p, &g, &w(&p, "stst"), &w(&p, "stst")).unwrap(), 0);
    }

    #[test]
    fn upsilon_terminates_on_explored() {
        let p = upsilon();
        let g = explore(&p, &all_words(&p, 6), ExplorationBudget::default());
        let r = classify_termination(&g);
        assert_eq!(r.class, Termination::Terminating);
        assert_eq!(r.note, "acyclic-on-explored");
        assert_eq!(normal_forms(&p, &g, &w(&p, "stst")).unwrap(), vec![w(&p, "a t")]);
    }

    #[test]
    fn growth_is_inconclusive() {
        let p = Polygraph::from_rules("G", "a", &[("r", "a", "a a")]).unwrap();
        let g = explore(&p, &[w(&p, "a")], ExplorationBudget { max_word_len: 6, max_states: 100, max_depth: 100 });
        assert!(g.truncated);
        assert_eq!(classify_termination(&g).class, Termination::Inconclusive);
        assert!(matches!(quasi_normal_forms(&p, &g, &w(&p, "a")), Err(Error::TruncatedRegion(_))));
    }

    #[test]
    fn one_state_budget() {
        let p = b3();
        let g = explore(&p, &[w(&p, "sts")], ExplorationBudget { max_states: 1, ..Default::default() });
        assert_eq!(g.len(), 1);
        assert!(g.truncated);
    }

    #[test]
    fn rule_free_normal_form() {
        let p = Polygraph::from_rules("F", "a", &[]).unwrap();
        let g = explore(&p, &[w(&p, "a a")], ExplorationBudget::default());
        assert_eq!(normal_forms(&p, &g, &w(&p, "a a")).unwrap(), vec![w(&p, "a a")]);
    }

    #[test]
    fn dump_format() {
        let p = b3();
        let g = explore(&p, &[w(&p, "sts")], ExplorationBudget::default());
        let d = g.dump(&p);
        assert!(d.starts_with("sts -> tst via alpha @ 0\ntst -> sts via beta @ 0\n"));
    }
}
