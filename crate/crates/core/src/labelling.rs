//! Well-founded labellings of rewriting steps, the lexicographic maximum
//! measure, and the multiset extension of a label order.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::branchings::Branching;
use crate::engine::{canonical_qnf_choice, Path, ReductionGraph, Step};
use crate::error::{Error, Result};
use crate::polygraph::{tokenize, ParseError, ParseErrorKind, Polygraph, Word};

/// Labels are naturals, vertex ids (normal-form labelling) or poset element ids.
pub type Label = u64;

#[derive(Debug, Clone)]
pub enum LabelOrder {
    Naturals,
    /// Strict order given by its transitive closure.
    FinitePoset { names: Vec<String>, less: Vec<Vec<bool>> },
    /// `a ≺ b` iff the word of vertex `b` rewrites to the word of vertex `a` in at least one step.
    Reachability { out: Vec<Vec<usize>>, cache: RefCell<HashMap<usize, HashSet<usize>>> },
}

impl LabelOrder {
    pub fn naturals() -> Self {
        LabelOrder::Naturals
    }

    /// Closes `pairs` transitively; fails on a cycle.
    pub fn finite_poset(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut less = vec![vec![false; n]; n];
        for &(a, b) in pairs {
            less[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if less[i][k] {
                    let via = less[k].clone();
                    for (x, y) in less[i].iter_mut().zip(via) {
                        *x |= y;
                    }
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| less[i][i]) {
            return Err(Error::IllFoundedOrder(format!("`{}` lies on a cycle", names[i])));
        }
        Ok(LabelOrder::FinitePoset { names, less })
    }

    /// Rewrite order on the vertices of an acyclic explored graph.
    pub fn reachability(p: &Polygraph, g: &ReductionGraph) -> Result<Self> {
        let cyclic = (0..g.len()).find(|&v| g.scc_size(g.scc_of(v)) > 1 || g.edges(v).iter().any(|e| e.target == v));
        if let Some(v) = cyclic {
            return Err(Error::IllFoundedOrder(format!("{} lies on a rewriting cycle", p.show(g.word(v)))));
        }
        let out = (0..g.len()).map(|v| g.edges(v).iter().map(|e| e.target).collect()).collect();
        Ok(LabelOrder::Reachability { out, cache: RefCell::new(HashMap::new()) })
    }

    pub fn less(&self, a: Label, b: Label) -> bool {
        match self {
            LabelOrder::Naturals => a < b,
            LabelOrder::FinitePoset { less, .. } => less[a as usize][b as usize],
            LabelOrder::Reachability { out, cache } => {
                let (a, b) = (a as usize, b as usize);
                if a == b {
                    return false;
                }
                let mut cache = cache.borrow_mut();
                let desc = cache.entry(b).or_insert_with(|| {
                    let mut seen = HashSet::new();
                    let mut stack = vec![b];
                    while let Some(v) = stack.pop() {
                        for &w in &out[v] {
                            if seen.insert(w) {
                                stack.push(w);
                            }
                        }
                    }
                    seen
                });
                desc.contains(&a)
            }
        }
    }
}

/// How a quasi-normal form is chosen for each word.
#[derive(Debug, Clone)]
pub enum QnfChoice {
    /// Length-lexicographic least member of the unique reachable terminal component.
    Builtin,
    Map(HashMap<Word, Word>),
}

#[derive(Debug, Clone)]
pub enum LabelKind {
    Qnf(QnfChoice),
    Nf,
    Singleton,
    Table(HashMap<Step, Label>),
}

#[derive(Debug, Clone)]
pub struct Labelling {
    pub kind: LabelKind,
    pub order: LabelOrder,
    cache: RefCell<HashMap<usize, Label>>,
}

impl Labelling {
    fn with(kind: LabelKind, order: LabelOrder) -> Self {
        Labelling { kind, order, cache: RefCell::new(HashMap::new()) }
    }

    pub fn qnf(choice: QnfChoice) -> Self {
        Self::with(LabelKind::Qnf(choice), LabelOrder::Naturals)
    }

    pub fn nf(p: &Polygraph, g: &ReductionGraph) -> Result<Self> {
        Ok(Self::with(LabelKind::Nf, LabelOrder::reachability(p, g)?))
    }

    pub fn singleton() -> Self {
        Self::with(LabelKind::Singleton, LabelOrder::Naturals)
    }

    pub fn table(entries: HashMap<Step, Label>, order: LabelOrder) -> Self {
        Self::with(LabelKind::Table(entries), order)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            LabelKind::Qnf(_) => "qnf",
            LabelKind::Nf => "nf",
            LabelKind::Singleton => "singleton",
            LabelKind::Table(_) => "table",
        }
    }

    pub fn less(&self, a: Label, b: Label) -> bool {
        self.order.less(a, b)
    }

    /// The chosen quasi-normal form of `u`, checked against the explored graph.
    pub fn qnf_of(&self, p: &Polygraph, g: &ReductionGraph, u: &[u16]) -> Result<Word> {
        let choice = match &self.kind {
            LabelKind::Qnf(c) => c,
            _ => return Err(Error::Invariant("not a quasi-normal-form labelling".into())),
        };
        match choice {
            QnfChoice::Builtin => canonical_qnf_choice(p, g, u),
            QnfChoice::Map(m) => {
                let q = m.get(u).ok_or_else(|| Error::MissingQnfEntry(p.show(u)))?;
                let id = g.id(p, u)?;
                let reach = g.closed_reachable(p, id)?;
                let ok = g.vertex(q).is_some_and(|qid| reach.contains(&qid) && g.is_sink_scc(g.scc_of(qid)));
                if !ok {
                    return Err(Error::NotQuasiNormalForm { word: p.show(u), qnf: p.show(q) });
                }
                Ok(q.clone())
            }
        }
    }

    pub fn label_step(&self, p: &Polygraph, g: &ReductionGraph, f: &Step) -> Result<Label> {
        match &self.kind {
            LabelKind::Singleton => Ok(0),
            LabelKind::Table(t) => {
                let key = Step { inverse: false, ..f.clone() };
                t.get(&key).copied().ok_or_else(|| Error::MissingTableEntry(f.show(p)))
            }
            LabelKind::Nf => Ok(g.id(p, &f.target(p))? as Label),
            LabelKind::Qnf(_) => {
                let t = f.target(p);
                let tid = g.id(p, &t)?;
                if let Some(&l) = self.cache.borrow().get(&tid) {
                    return Ok(l);
                }
                let q = self.qnf_of(p, g, &t)?;
                let qid = g.id(p, &q)?;
                let d = g.distances_from(tid)[qid]
                    .ok_or_else(|| Error::Unreachable { from: p.show(&t), to: p.show(&q) })? as Label;
                self.cache.borrow_mut().insert(tid, d);
                Ok(d)
            }
        }
    }

    pub fn labels(&self, p: &Polygraph, g: &ReductionGraph, f: &Path) -> Result<Vec<Label>> {
        f.steps.iter().map(|s| self.label_step(p, g, s)).collect()
    }

    pub fn show_label(&self, p: &Polygraph, g: &ReductionGraph, l: Label) -> String {
        match (&self.kind, &self.order) {
            (LabelKind::Nf, _) => p.show(g.word(l as usize)),
            (_, LabelOrder::FinitePoset { names, .. }) => names[l as usize].clone(),
            _ => l.to_string(),
        }
    }

    /// Checks that map values are quasi-normal forms and constant along edges
    /// of the explored region. Returns the number of checked entries.
    pub fn validate_qnf_map(&self, p: &Polygraph, g: &ReductionGraph) -> Result<usize> {
        let LabelKind::Qnf(QnfChoice::Map(m)) = &self.kind else {
            return Ok(0);
        };
        let mut checked = 0;
        for v in 0..g.len() {
            let w = g.word(v);
            if !m.contains_key(w) || !g.is_complete(v) {
                continue;
            }
            let q = self.qnf_of(p, g, w)?;
            for e in g.edges(v) {
                if let Some(q2) = m.get(g.word(e.target)) {
                    if *q2 != q {
                        return Err(Error::NotQuasiNormalForm { word: p.show(g.word(e.target)), qnf: p.show(q2) });
                    }
                }
            }
            checked += 1;
        }
        Ok(checked)
    }
}

/// Finitely supported multiset of labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize)]
pub struct LabelMultiset {
    pub counts: BTreeMap<Label, usize>,
}

impl LabelMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_labels(ls: impl IntoIterator<Item = Label>) -> Self {
        let mut m = Self::new();
        for l in ls {
            m.insert(l);
        }
        m
    }

    pub fn insert(&mut self, l: Label) {
        *self.counts.entry(l).or_insert(0) += 1;
    }

    pub fn union(&self, other: &LabelMultiset) -> LabelMultiset {
        let mut m = self.clone();
        for (&l, &n) in &other.counts {
            *m.counts.entry(l).or_insert(0) += n;
        }
        m
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.counts.values().sum()
    }

    /// Elements with repetition, ascending.
    pub fn elements(&self) -> Vec<Label> {
        self.counts.iter().flat_map(|(&l, &n)| std::iter::repeat_n(l, n)).collect()
    }

    pub fn show_with(&self, show: impl Fn(Label) -> String) -> String {
        let items: Vec<String> = self.elements().into_iter().map(show).collect();
        format!("{{{}}}", items.join(","))
    }
}

/// `w^(w')`: drops each letter of `w` that lies below some letter of `w'`.
pub fn filter_word(w: &[Label], w_prime: &[Label], ord: &LabelOrder) -> Vec<Label> {
    w.iter().copied().filter(|&k| !w_prime.iter().any(|&j| ord.less(k, j))).collect()
}

/// `|i w| = {i} ∪ |w^(i)|`, `|ε| = ∅`.
pub fn measure_word(w: &[Label], ord: &LabelOrder) -> LabelMultiset {
    let mut m = LabelMultiset::new();
    let mut rest = w.to_vec();
    while let Some((&i, tail)) = rest.split_first() {
        m.insert(i);
        rest = filter_word(tail, &[i], ord);
    }
    m
}

pub fn measure_path(lab: &Labelling, p: &Polygraph, g: &ReductionGraph, f: &Path) -> Result<LabelMultiset> {
    Ok(measure_word(&lab.labels(p, g, f)?, &lab.order))
}

pub fn measure_branching(lab: &Labelling, p: &Polygraph, g: &ReductionGraph, b: &Branching) -> Result<LabelMultiset> {
    Ok(measure_path(lab, p, g, &b.left)?.union(&measure_path(lab, p, g, &b.right)?))
}

/// Measure of a pair of paths with a common source.
pub fn measure_pair(lab: &Labelling, p: &Polygraph, g: &ReductionGraph, f: &Path, h: &Path) -> Result<LabelMultiset> {
    Ok(measure_path(lab, p, g, f)?.union(&measure_path(lab, p, g, h)?))
}

/// Dershowitz–Manna: after cancelling the common part, the right residue is
/// nonempty and dominates every element of the left residue.
pub fn multiset_less(m: &LabelMultiset, n: &LabelMultiset, ord: &LabelOrder) -> bool {
    let mut x = Vec::new();
    let mut y = Vec::new();
    let keys: std::collections::BTreeSet<Label> = m.counts.keys().chain(n.counts.keys()).copied().collect();
    for k in keys {
        let a = m.counts.get(&k).copied().unwrap_or(0);
        let b = n.counts.get(&k).copied().unwrap_or(0);
        if a > b {
            x.push(k);
        } else if b > a {
            y.push(k);
        }
    }
    !y.is_empty() && x.iter().all(|&i| y.iter().any(|&j| ord.less(i, j)))
}

/// Reads `WORD -> WORD` lines.
pub fn parse_qnf_map(p: &Polygraph, text: &str) -> Result<HashMap<Word, Word>, ParseError> {
    let mut m = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let col = line.len() - line.trim_start().len() + 1;
        let (a, b) = body
            .split_once("->")
            .ok_or_else(|| ParseError::new(i + 1, col, ParseErrorKind::Expected("`WORD -> WORD`")))?;
        let u = p.parse_word(a).map_err(|k| ParseError::new(i + 1, col, k))?;
        let v = p.parse_word(b).map_err(|k| ParseError::new(i + 1, col, k))?;
        m.insert(u, v);
    }
    Ok(m)
}

/// Reads `step: LCTX | RULE | RCTX = LABEL` and `order: a < b` lines. Labels
/// are poset elements in order of first appearance.
pub fn parse_label_table(p: &Polygraph, text: &str) -> Result<Labelling> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut intern = |s: &str, names: &mut Vec<String>| -> usize {
        *index.entry(s.to_string()).or_insert_with(|| {
            names.push(s.to_string());
            names.len() - 1
        })
    };
    let mut entries = HashMap::new();
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let toks = tokenize(line);
        let Some(first) = toks.first() else { continue };
        let err = |k| Error::Parse(ParseError::new(i + 1, first.column, k));
        let body = line.split('#').next().unwrap_or("").trim();
        if let Some(rest) = body.strip_prefix("step:") {
            let (step, label) = rest.rsplit_once('=').ok_or_else(|| err(ParseErrorKind::Expected("`= LABEL`")))?;
            let s = Step::parse(p, step).map_err(err)?;
            let label = label.trim();
            if label.is_empty() {
                return Err(err(ParseErrorKind::Expected("label")));
            }
            let id = intern(label, &mut names);
            entries.insert(s, id as Label);
        } else if let Some(rest) = body.strip_prefix("order:") {
            let (a, b) = rest.split_once('<').ok_or_else(|| err(ParseErrorKind::Expected("`a < b`")))?;
            let (a, b) = (a.trim(), b.trim());
            if a.is_empty() || b.is_empty() {
                return Err(err(ParseErrorKind::Expected("`a < b`")));
            }
            let ia = intern(a, &mut names);
            let ib = intern(b, &mut names);
            pairs.push((ia, ib));
        } else {
            return Err(err(ParseErrorKind::Unexpected(first.text.to_string())));
        }
    }
    Ok(Labelling::table(entries, LabelOrder::finite_poset(names, &pairs)?))
}
