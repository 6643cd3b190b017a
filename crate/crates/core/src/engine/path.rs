//! Whiskered rule applications, their composites, and equality of 2-cells
//! modulo exchange and inverse cancellation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polygraph::{Letter, ParseErrorKind, Polygraph, Word, EMPTY_WORD};

/// `left · rule · right`, or its formal inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub left: Word,
    pub rule: usize,
    pub right: Word,
    pub inverse: bool,
}

impl Step {
    pub fn forward(left: Word, rule: usize, right: Word) -> Self {
        Step { left, rule, right, inverse: false }
    }

    pub fn pos(&self) -> usize {
        self.left.len()
    }

    /// The side of the rule consumed by this step.
    pub fn input<'a>(&self, p: &'a Polygraph) -> &'a Word {
        let r = p.rule(self.rule);
        if self.inverse { &r.rhs } else { &r.lhs }
    }

    /// The side of the rule produced by this step.
    pub fn output<'a>(&self, p: &'a Polygraph) -> &'a Word {
        let r = p.rule(self.rule);
        if self.inverse { &r.lhs } else { &r.rhs }
    }

    fn around(&self, mid: &[Letter]) -> Word {
        let mut w = Vec::with_capacity(self.left.len() + mid.len() + self.right.len());
        w.extend_from_slice(&self.left);
        w.extend_from_slice(mid);
        w.extend_from_slice(&self.right);
        w
    }

    pub fn source(&self, p: &Polygraph) -> Word {
        self.around(self.input(p))
    }

    pub fn target(&self, p: &Polygraph) -> Word {
        self.around(self.output(p))
    }

    pub fn inverted(&self) -> Step {
        Step { inverse: !self.inverse, ..self.clone() }
    }

    pub fn whiskered(&self, u: &[Letter], v: &[Letter]) -> Step {
        let mut left = u.to_vec();
        left.extend_from_slice(&self.left);
        let mut right = self.right.clone();
        right.extend_from_slice(v);
        Step { left, rule: self.rule, right, inverse: self.inverse }
    }

    /// `LCTX|RULE|RCTX`, with a trailing `-` for inverses.
    pub fn show(&self, p: &Polygraph) -> String {
        format!(
            "{}|{}|{}{}",
            p.show(&self.left),
            p.rule(self.rule).name,
            p.show(&self.right),
            if self.inverse { "-" } else { "" }
        )
    }

    /// Short rendering: contexts juxtaposed around the rule name.
    pub fn short(&self, p: &Polygraph) -> String {
        let side = |w: &Word| if w.is_empty() { String::new() } else { p.show(w) };
        format!(
            "{}{}{}{}",
            side(&self.left),
            p.rule(self.rule).name,
            side(&self.right),
            if self.inverse { "⁻" } else { "" }
        )
    }

    pub fn parse(p: &Polygraph, text: &str) -> Result<Step, ParseErrorKind> {
        let text = text.trim();
        let (body, inverse) = match text.strip_suffix('-') {
            Some(b) => (b, true),
            None => (text, false),
        };
        let parts: Vec<&str> = body.split('|').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(ParseErrorKind::Expected("step `LCTX|RULE|RCTX`"));
        }
        let rule = p.rule_id(parts[1]).ok_or_else(|| ParseErrorKind::UnknownRule(parts[1].to_string()))?;
        Ok(Step { left: p.parse_word(parts[0])?, rule, right: p.parse_word(parts[2])?, inverse })
    }
}

/// All forward steps with source `u`, ordered by position then rule declaration order.
pub fn enumerate_steps(p: &Polygraph, u: &[Letter]) -> Vec<Step> {
    let mut out = Vec::new();
    for pos in 0..u.len() {
        for (id, r) in p.rules.iter().enumerate() {
            if u[pos..].starts_with(&r.lhs) {
                out.push(Step::forward(u[..pos].to_vec(), id, u[pos + r.lhs.len()..].to_vec()));
            }
        }
    }
    out
}

/// A composite of steps. Forward-only paths are rewriting sequences; mixed
/// orientations give zigzags of the groupoid completion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub source: Word,
    pub steps: Vec<Step>,
}

/// Zigzags share the representation; the name marks intent in signatures.
pub type ZigzagPath = Path;

impl Path {
    pub fn identity(w: Word) -> Self {
        Path { source: w, steps: Vec::new() }
    }

    pub fn single(p: &Polygraph, s: Step) -> Self {
        Path { source: s.source(p), steps: vec![s] }
    }

    /// Builds a path from steps, checking that they compose.
    pub fn from_steps(p: &Polygraph, source: Word, steps: Vec<Step>) -> Result<Self> {
        let path = Path { source, steps };
        path.check(p)?;
        Ok(path)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_forward(&self) -> bool {
        self.steps.iter().all(|s| !s.inverse)
    }

    pub fn target(&self, p: &Polygraph) -> Word {
        match self.steps.last() {
            Some(s) => s.target(p),
            None => self.source.clone(),
        }
    }

    pub fn check(&self, p: &Polygraph) -> Result<()> {
        let mut cur = self.source.clone();
        for (i, s) in self.steps.iter().enumerate() {
            if s.source(p) != cur {
                return Err(Error::IllComposed(format!(
                    "step {} ({}) does not start at {}",
                    i,
                    s.show(p),
                    p.show(&cur)
                )));
            }
            cur = s.target(p);
        }
        Ok(())
    }

    /// Sequence of words visited, endpoints included.
    pub fn words(&self, p: &Polygraph) -> Vec<Word> {
        let mut out = vec![self.source.clone()];
        for s in &self.steps {
            out.push(s.target(p));
        }
        out
    }

    /// `self ⋆ other`; the caller guarantees `other` starts where `self` ends.
    pub fn then(&self, other: &Path) -> Path {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Path { source: self.source.clone(), steps }
    }

    pub fn inverse(&self, p: &Polygraph) -> Path {
        Path {
            source: self.target(p),
            steps: self.steps.iter().rev().map(Step::inverted).collect(),
        }
    }

    pub fn whiskered(&self, u: &[Letter], v: &[Letter]) -> Path {
        let mut source = u.to_vec();
        source.extend_from_slice(&self.source);
        source.extend_from_slice(v);
        Path { source, steps: self.steps.iter().map(|s| s.whiskered(u, v)).collect() }
    }

    pub fn prefix(&self, n: usize) -> Path {
        Path { source: self.source.clone(), steps: self.steps[..n].to_vec() }
    }

    pub fn suffix(&self, p: &Polygraph, n: usize) -> Path {
        let source = if n == 0 { self.source.clone() } else { self.steps[n - 1].target(p) };
        Path { source, steps: self.steps[n..].to_vec() }
    }

    /// `s1;s2;…`, or `id(WORD)` for an identity.
    pub fn show(&self, p: &Polygraph) -> String {
        if self.steps.is_empty() {
            format!("id({})", p.show_spaced(&self.source))
        } else {
            self.steps.iter().map(|s| s.show(p)).collect::<Vec<_>>().join(";")
        }
    }

    /// `αt·βt`-style rendering.
    pub fn short(&self, p: &Polygraph) -> String {
        if self.steps.is_empty() {
            format!("1_{}", p.show(&self.source))
        } else {
            self.steps.iter().map(|s| s.short(p)).collect::<Vec<_>>().join("·")
        }
    }

    /// Inverse of [`Path::show`].
    pub fn parse(p: &Polygraph, text: &str) -> Result<Path, ParseErrorKind> {
        let text = text.trim();
        if let Some(inner) = text.strip_prefix("id(").and_then(|t| t.strip_suffix(')')) {
            return Ok(Path::identity(p.parse_word(inner)?));
        }
        if text.is_empty() || text == EMPTY_WORD {
            return Err(ParseErrorKind::Expected("zigzag (use `id(WORD)` for an identity)"));
        }
        let steps = text.split(';').map(|t| Step::parse(p, t)).collect::<Result<Vec<_>, _>>()?;
        let source = steps[0].source(p);
        let path = Path { source, steps };
        path.check(p).map_err(|e| ParseErrorKind::Other(e.to_string()))?;
        Ok(path)
    }
}

/// Multiset of rule occurrences of a forward path.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SupportMultiset {
    pub counts: BTreeMap<usize, usize>,
}

impl SupportMultiset {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Sub-multiset that differs from `other`.
    pub fn is_strict_subset(&self, other: &SupportMultiset) -> bool {
        self.counts.iter().all(|(k, &n)| other.counts.get(k).copied().unwrap_or(0) >= n) && self != other
    }

    pub fn show(&self, p: &Polygraph) -> String {
        let items: Vec<String> = self.counts.iter().map(|(&r, n)| format!("{}:{}", p.rule(r).name, n)).collect();
        format!("{{{}}}", items.join(", "))
    }
}

pub fn support(f: &Path) -> SupportMultiset {
    let mut counts = BTreeMap::new();
    for s in &f.steps {
        *counts.entry(s.rule).or_insert(0) += 1;
    }
    SupportMultiset { counts }
}

fn build(p: &Polygraph, word: &[Letter], pos: usize, rule: usize, inverse: bool) -> Step {
    let probe = Step { left: Vec::new(), rule, right: Vec::new(), inverse };
    let n = probe.input(p).len();
    Step { left: word[..pos].to_vec(), rule, right: word[pos + n..].to_vec(), inverse }
}

/// Exchange law: given `x` followed by `y`, returns `(y', x')` with `y'`
/// acting first, when the redex of `y` avoids the output of `x`.
pub fn commute(p: &Polygraph, x: &Step, y: &Step) -> Option<(Step, Step)> {
    let (px, a, b) = (x.pos(), x.input(p).len(), x.output(p).len());
    let (qy, c, d) = (y.pos(), y.input(p).len(), y.output(p).len());
    let src = x.source(p);
    let (qy2, px2) = if qy + c <= px {
        (qy, px + d - c)
    } else if qy >= px + b {
        (qy + a - b, px)
    } else {
        return None;
    };
    let y2 = build(p, &src, qy2, y.rule, y.inverse);
    debug_assert_eq!(y2.source(p), src);
    let mid = y2.target(p);
    let x2 = build(p, &mid, px2, x.rule, x.inverse);
    debug_assert_eq!(x2.target(p), y.target(p));
    Some((y2, x2))
}

type SortKey = (usize, usize, bool);

/// Canonical representative of a 2-cell of the free (2,1)-category: inverse
/// pairs are cancelled through commuting steps, then the steps are ordered
/// by the least available (position, rule, orientation) at each stage.
pub fn canonical(p: &Polygraph, f: &Path) -> Path {
    let mut s = f.steps.clone();
    'outer: loop {
        for i in 0..s.len() {
            let mut cur = s[i].clone();
            let mut moved = Vec::new();
            for j in i + 1..s.len() {
                if s[j] == cur.inverted() {
                    let mut next = s[..i].to_vec();
                    next.extend(moved);
                    next.extend_from_slice(&s[j + 1..]);
                    s = next;
                    continue 'outer;
                }
                match commute(p, &cur, &s[j]) {
                    Some((y, x)) => {
                        moved.push(y);
                        cur = x;
                    }
                    None => break,
                }
            }
        }
        break;
    }
    let mut rest = s;
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<(SortKey, Step, Vec<Step>)> = None;
        for k in 0..rest.len() {
            let mut y = rest[k].clone();
            let mut shifted = Vec::with_capacity(k);
            let mut ok = true;
            for m in (0..k).rev() {
                match commute(p, &rest[m], &y) {
                    Some((y2, x2)) => {
                        y = y2;
                        shifted.push(x2);
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let key = (y.pos(), y.rule, y.inverse);
            if best.as_ref().is_none_or(|(bk, _, _)| key < *bk) {
                shifted.reverse();
                shifted.extend_from_slice(&rest[k + 1..]);
                best = Some((key, y, shifted));
            }
        }
        let (_, front, remainder) = best.expect("the first step is always available");
        out.push(front);
        rest = remainder;
    }
    Path { source: f.source.clone(), steps: out }
}

/// Equality of 2-cells in the free (2,1)-category.
pub fn equivalent(p: &Polygraph, f: &Path, g: &Path) -> bool {
    f.source == g.source && f.target(p) == g.target(p) && canonical(p, f) == canonical(p, g)
}
