//! Local branchings, their classification, and critical branchings from overlaps.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::engine::{enumerate_steps, Path, Step};
use crate::polygraph::{Polygraph, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchingKind {
    Aspherical,
    Peiffer,
    Overlapping,
    Critical,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalBranching {
    pub source: Word,
    pub first: Step,
    pub second: Step,
    pub kind: BranchingKind,
}

/// A pair of rewriting sequences with a common source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branching {
    pub source: Word,
    pub left: Path,
    pub right: Path,
}

/// A pair of rewriting sequences with a common target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Confluence {
    pub left: Path,
    pub right: Path,
    pub target: Word,
}

fn span(p: &Polygraph, s: &Step) -> (usize, usize) {
    (s.pos(), s.pos() + s.input(p).len())
}

/// Kind of the pair `(f, g)` of forward steps on a common source.
pub fn classify(p: &Polygraph, f: &Step, g: &Step) -> BranchingKind {
    if f == g {
        return BranchingKind::Aspherical;
    }
    let (a0, a1) = span(p, f);
    let (b0, b1) = span(p, g);
    if a1 <= b0 || b1 <= a0 {
        return BranchingKind::Peiffer;
    }
    let len = f.left.len() + f.input(p).len() + f.right.len();
    if a0.min(b0) == 0 && a1.max(b1) == len {
        BranchingKind::Critical
    } else {
        BranchingKind::Overlapping
    }
}

impl LocalBranching {
    pub fn new(p: &Polygraph, first: Step, second: Step) -> Self {
        let kind = classify(p, &first, &second);
        LocalBranching { source: first.source(p), first, second, kind }
    }

    /// Overlapping or critical.
    pub fn is_overlapping(&self) -> bool {
        matches!(self.kind, BranchingKind::Overlapping | BranchingKind::Critical)
    }

    pub fn swapped(&self) -> Self {
        LocalBranching { source: self.source.clone(), first: self.second.clone(), second: self.first.clone(), kind: self.kind }
    }

    pub fn whiskered(&self, p: &Polygraph, u: &[u16], v: &[u16]) -> Self {
        LocalBranching::new(p, self.first.whiskered(u, v), self.second.whiskered(u, v))
    }

    pub fn as_branching(&self, p: &Polygraph) -> Branching {
        Branching {
            source: self.source.clone(),
            left: Path::single(p, self.first.clone()),
            right: Path::single(p, self.second.clone()),
        }
    }

    /// `(alpha @ 0, beta @ 1) on stst`
    pub fn show(&self, p: &Polygraph) -> String {
        format!(
            "({} @ {}, {} @ {}) on {}",
            p.rule(self.first.rule).name,
            self.first.pos(),
            p.rule(self.second.rule).name,
            self.second.pos(),
            p.show(&self.source)
        )
    }

    /// `(αt, sβ)`-style rendering.
    pub fn short(&self, p: &Polygraph) -> String {
        format!("({}, {})", self.first.short(p), self.second.short(p))
    }
}

/// Canonical order on two steps of the same source: leftmost first, then rule order.
fn ordered(a: Step, b: Step) -> (Step, Step) {
    if (a.pos(), a.rule) <= (b.pos(), b.rule) { (a, b) } else { (b, a) }
}

/// Pairs of steps on `u` in canonical order. Diagonal pairs `(f, f)` are
/// included only when `include_aspherical` is set.
pub fn local_branchings(p: &Polygraph, u: &[u16], include_aspherical: bool) -> Vec<LocalBranching> {
    let steps = enumerate_steps(p, u);
    let mut out = Vec::new();
    for i in 0..steps.len() {
        let start = if include_aspherical { i } else { i + 1 };
        for j in start..steps.len() {
            out.push(LocalBranching::new(p, steps[i].clone(), steps[j].clone()));
        }
    }
    out
}

/// Critical branchings: proper overlaps and non-aspherical inclusions of
/// every ordered rule pair, self-pairs included. Ordered by source length,
/// then rule pair, then positions.
pub fn critical_branchings(p: &Polygraph) -> Vec<LocalBranching> {
    let mut found: BTreeSet<(usize, usize, usize, usize, usize, Word)> = BTreeSet::new();
    let step = |source: &Word, rule: usize, pos: usize| {
        let n = p.rule(rule).lhs.len();
        Step::forward(source[..pos].to_vec(), rule, source[pos + n..].to_vec())
    };
    let mut add = |source: Word, a: (usize, usize), b: (usize, usize)| {
        let (f, g) = ordered(step(&source, a.0, a.1), step(&source, b.0, b.1));
        found.insert((source.len(), f.rule, g.rule, f.pos(), g.pos(), source));
    };
    for (ia, ra) in p.rules.iter().enumerate() {
        for (ib, rb) in p.rules.iter().enumerate() {
            let (u1, u2) = (&ra.lhs, &rb.lhs);
            // proper overlap: suffix of u1 = prefix of u2
            for k in 1..u1.len().min(u2.len()) {
                if u1[u1.len() - k..] == u2[..k] {
                    let mut src = u1.clone();
                    src.extend_from_slice(&u2[k..]);
                    add(src, (ia, 0), (ib, u1.len() - k));
                }
            }
            // inclusion of u2 in u1
            if u2.len() <= u1.len() {
                for pos in 0..=u1.len() - u2.len() {
                    if u1[pos..pos + u2.len()] == u2[..] && !(ia == ib && pos == 0) {
                        add(u1.clone(), (ia, 0), (ib, pos));
                    }
                }
            }
        }
    }
    found
        .into_iter()
        .map(|(_, r1, r2, p1, p2, source)| LocalBranching::new(p, step(&source, r1, p1), step(&source, r2, p2)))
        .collect()
}

/// Writes an overlapping local branching as `u · c · v` with `c` critical.
/// The flag is set when the branching lists the critical pair in reverse order.
pub fn decompose(p: &Polygraph, b: &LocalBranching) -> Option<(Word, LocalBranching, Word, bool)> {
    if !b.is_overlapping() {
        return None;
    }
    let (a0, a1) = span(p, &b.first);
    let (b0, b1) = span(p, &b.second);
    let (l, r) = (a0.min(b0), a1.max(b1));
    let u = b.source[..l].to_vec();
    let v = b.source[r..].to_vec();
    let trim = |s: &Step| Step::forward(s.left[l..].to_vec(), s.rule, s.right[..s.right.len() - (b.source.len() - r)].to_vec());
    let (f, g) = (trim(&b.first), trim(&b.second));
    let (cf, cg) = ordered(f.clone(), g);
    let swapped = cf != f;
    Some((u, LocalBranching::new(p, cf, cg), v, swapped))
}

/// `CB k: (ruleA @ i, ruleB @ j) on WORD` lines, numbered from 1.
pub fn report_lines(p: &Polygraph, cbs: &[LocalBranching]) -> Vec<String> {
    cbs.iter().enumerate().map(|(k, c)| format!("CB {}: {}", k + 1, c.show(p))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygraph::all_words;

    fn b3() -> Polygraph {
        Polygraph::from_rules("B3", "s t", &[("alpha", "s t s", "t s t"), ("beta", "t s t", "s t s")]).unwrap()
    }

    #[test]
    fn b3_critical_branchings() {
        let p = b3();
        let cbs = critical_branchings(&p);
        let lines = report_lines(&p, &cbs);
        assert_eq!(
            lines,
            vec![
                "CB 1: (alpha @ 0, beta @ 1) on stst",
                "CB 2: (beta @ 0, alpha @ 1) on tsts",
                "CB 3: (alpha @ 0, alpha @ 2) on ststs",
                "CB 4: (beta @ 0, beta @ 2) on tstst",
            ]
        );
        assert!(cbs.iter().all(|c| c.kind == BranchingKind::Critical));
        assert_eq!(cbs[2].short(&p), "(alphats, stalpha)");
    }

    #[test]
    fn local_branchings_on_stst_and_aa() {
        let p = b3();
        let lb = local_branchings(&p, &p.parse_word("stst").unwrap(), false);
        assert_eq!(lb.len(), 1);
        assert_eq!(lb[0].short(&p), "(alphat, sbeta)");
        assert_eq!(lb[0].kind, BranchingKind::Critical);
        let ab = Polygraph::from_rules("AB", "a b", &[("alpha", "a", "b"), ("beta", "b", "a")]).unwrap();
        let lb = local_branchings(&ab, &ab.parse_word("aa").unwrap(), false);
        assert_eq!(lb.len(), 1);
        assert_eq!(lb[0].kind, BranchingKind::Peiffer);
        let single = local_branchings(&p, &p.parse_word("sts").unwrap(), true);
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].kind, BranchingKind::Aspherical);
    }

    #[test]
    fn self_overlap() {
        let p = Polygraph::from_rules("X", "a b", &[("r", "a a", "b")]).unwrap();
        let cbs = critical_branchings(&p);
        assert_eq!(report_lines(&p, &cbs), vec!["CB 1: (r @ 0, r @ 1) on aaa"]);
    }

    #[test]
    fn inclusion_with_equal_sides() {
        let p = Polygraph::from_rules("X", "a b c", &[("r", "a b", "c"), ("q", "a b", "a"), ("z", "b", "c")]).unwrap();
        let lines = report_lines(&p, &critical_branchings(&p));
        assert_eq!(lines, vec!["CB 1: (r @ 0, q @ 0) on ab", "CB 2: (r @ 0, z @ 1) on ab", "CB 3: (q @ 0, z @ 1) on ab"]);
    }

    /// Brute force: every overlapping local branching on short words is a
    /// whiskered critical branching, in exactly one way.
    fn check_completeness(p: &Polygraph, max_len: usize) {
        let cbs = critical_branchings(p);
        for w in all_words(p, max_len) {
            for b in local_branchings(p, &w, false) {
                if !b.is_overlapping() {
                    continue;
                }
                let mut hits = 0;
                for c in &cbs {
                    for l in 0..=w.len().saturating_sub(c.source.len()) {
                        if w.len() < c.source.len() || w[l..l + c.source.len()] != c.source[..] {
                            continue;
                        }
                        let r = w[l + c.source.len()..].to_vec();
                        let u = w[..l].to_vec();
                        let cw = c.whiskered(p, &u, &r);
                        if (cw.first == b.first && cw.second == b.second) || (cw.first == b.second && cw.second == b.first) {
                            hits += 1;
                        }
                    }
                }
                assert_eq!(hits, 1, "{} on {}", b.short(p), p.show(&w));
                let (u, c, v, _) = decompose(p, &b).unwrap();
                assert!(cbs.contains(&c));
                assert_eq!([u.as_slice(), &c.source, v.as_slice()].concat(), w);
            }
        }
    }

    #[test]
    fn completeness_b3_and_laf() {
        check_completeness(&b3(), 7);
        let laf = Polygraph::from_rules(
            "LAF",
            "a b c d d'",
            &[("r1", "a b", "a"), ("r2", "a c", "d a"), ("r3", "d a", "d' a"), ("r4", "d' a", "a c")],
        )
        .unwrap();
        check_completeness(&laf, 4);
        let x = Polygraph::from_rules("X", "a b", &[("r", "a a b", "b"), ("q", "a b a", "a"), ("z", "a", "1")]).unwrap();
        check_completeness(&x, 6);
    }
}
