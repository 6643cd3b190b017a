//! Reduction cycles: enumeration of elementary loops, rotation classes, and
//! contraction of arbitrary loops by loop 3-cells.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use crate::completion::{CellKind, ThreeCell, ThreeCellExpression};
use crate::engine::{commute, support, Path, ReductionGraph, Step};
use crate::error::{Error, Result};
use crate::polygraph::{Polygraph, Word};

/// Rotation class of an elementary loop, keyed by its least serialized rotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopClass {
    pub representative: Path,
    pub canonical: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopEnumeration {
    pub classes: Vec<LoopClass>,
    /// Simple cycles examined.
    pub cycles: usize,
    /// The cycle cap was reached; `classes` may be incomplete.
    pub truncated: bool,
}

/// `WORD =rule@pos=> WORD … => WORD`
pub fn serialize_loop(p: &Polygraph, f: &Path) -> String {
    let mut s = p.show(&f.source);
    for st in &f.steps {
        s.push_str(&format!(" ={}@{}=> {}", p.rule(st.rule).name, st.pos(), p.show(&st.target(p))));
    }
    s
}

/// Rotation of a loop starting at its `i`-th step.
pub fn rotation(p: &Polygraph, f: &Path, i: usize) -> Path {
    let mut steps = f.steps[i..].to_vec();
    steps.extend_from_slice(&f.steps[..i]);
    let source = if i == 0 { f.source.clone() } else { f.steps[i - 1].target(p) };
    Path { source, steps }
}

pub fn canonical_rotation(p: &Polygraph, f: &Path) -> Path {
    (0..f.len().max(1))
        .map(|i| if f.is_empty() { f.clone() } else { rotation(p, f, i) })
        .min_by_key(|r| serialize_loop(p, r))
        .expect("at least one rotation")
}

/// Revisits a word before returning to the start.
pub fn first_repeat(p: &Polygraph, f: &Path) -> Option<(usize, usize)> {
    let words = f.words(p);
    let n = words.len() - 1;
    for j in 1..=n {
        for i in 0..j {
            if words[i] == words[j] && !(i == 0 && j == n) {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn is_simple(p: &Polygraph, f: &Path) -> bool {
    first_repeat(p, f).is_none()
}

/// Longest common left context and right context of all steps.
pub fn common_whiskers(f: &Path) -> (Word, Word) {
    let Some(first) = f.steps.first() else {
        return (Vec::new(), Vec::new());
    };
    let mut l = first.left.len();
    let mut r = first.right.len();
    for s in &f.steps[1..] {
        l = l.min(first.left.iter().zip(&s.left).take_while(|(a, b)| a == b).count());
        r = r.min(first.right.iter().rev().zip(s.right.iter().rev()).take_while(|(a, b)| a == b).count());
    }
    (first.left[..l].to_vec(), first.right[first.right.len() - r..].to_vec())
}

fn unwhiskered(f: &Path, u: usize, v: usize) -> Path {
    let strip = |s: &Step| Step { left: s.left[u..].to_vec(), rule: s.rule, right: s.right[..s.right.len() - v].to_vec(), inverse: s.inverse };
    Path { source: f.source[u..f.source.len() - v].to_vec(), steps: f.steps.iter().map(strip).collect() }
}

const LINEARIZATION_CAP: usize = 4096;

/// A rearrangement of `f` by exchanges of independent steps that revisits
/// a word, if one exists within a search cap.
pub fn decomposable_rearrangement(p: &Polygraph, f: &Path) -> Option<Path> {
    let mut seen: HashSet<Vec<Step>> = HashSet::from([f.steps.clone()]);
    let mut q = VecDeque::from([f.steps.clone()]);
    while let Some(s) = q.pop_front() {
        let path = Path { source: f.source.clone(), steps: s.clone() };
        if !is_simple(p, &path) {
            return Some(path);
        }
        for i in 0..s.len().saturating_sub(1) {
            if let Some((y, x)) = commute(p, &s[i], &s[i + 1]) {
                let mut t = s.clone();
                t[i] = y;
                t[i + 1] = x;
                if seen.len() < LINEARIZATION_CAP && seen.insert(t.clone()) {
                    q.push_back(t);
                }
            }
        }
    }
    None
}

/// Minimal for composition (no rearrangement revisits a word) and for
/// context (no common whisker on either side).
pub fn is_elementary(p: &Polygraph, f: &Path) -> bool {
    if f.is_empty() || !is_simple(p, f) {
        return false;
    }
    let (u, v) = common_whiskers(f);
    if !u.is_empty() || !v.is_empty() {
        return false;
    }
    (0..f.len()).all(|i| decomposable_rearrangement(p, &rotation(p, f, i)).is_none())
}

/// Simple cycles of the explored graph (Johnson's algorithm on the
/// underlying simple digraph, parallel edges expanded), up to `cap`.
pub fn enumerate_elementary_loops(p: &Polygraph, g: &ReductionGraph, cap: usize) -> Result<LoopEnumeration> {
    let n = g.len();
    let mut classes: BTreeMap<String, Path> = BTreeMap::new();
    let mut cycles = 0usize;
    let mut truncated = false;
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|v| g.edges(v).iter().map(|e| e.target).collect::<BTreeSet<_>>().into_iter().collect())
        .collect();

    let mut on_cycle = |vs: &[usize], classes: &mut BTreeMap<String, Path>| -> Result<bool> {
        if vs.iter().any(|&v| !g.is_complete(v)) {
            return Err(Error::TruncatedRegion(p.show(g.word(vs[0]))));
        }
        // expand parallel edges
        let mut partial: Vec<Vec<Step>> = vec![Vec::new()];
        for (k, &v) in vs.iter().enumerate() {
            let w = vs[(k + 1) % vs.len()];
            let options: Vec<Step> = g.edges(v).iter().filter(|e| e.target == w).map(|e| g.step(p, v, e)).collect();
            partial = partial
                .into_iter()
                .flat_map(|pre| {
                    options.iter().map(move |s| {
                        let mut x = pre.clone();
                        x.push(s.clone());
                        x
                    })
                })
                .collect();
        }
        for steps in partial {
            cycles += 1;
            if cycles > cap {
                return Ok(false);
            }
            let f = Path { source: g.word(vs[0]).clone(), steps };
            if is_elementary(p, &f) {
                let c = canonical_rotation(p, &f);
                classes.entry(serialize_loop(p, &c)).or_insert(c);
            }
        }
        Ok(true)
    };

    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        members.entry(g.scc_of(v)).or_default().push(v);
    }
    let split: HashSet<usize> = members.iter().filter(|(_, vs)| splits(p, g, vs)).map(|(&c, _)| c).collect();

    'outer: for s in 0..n {
        if (g.scc_size(g.scc_of(s)) == 1 && !adj[s].contains(&s)) || split.contains(&g.scc_of(s)) {
            continue;
        }
        // component of s in the subgraph induced by vertices ≥ s
        let within = |v: usize| v >= s && g.scc_of(v) == g.scc_of(s);
        let fwd = reach(&adj, s, &within, false);
        let comp: HashSet<usize> = {
            let radj = reverse(&adj, &within);
            let back = reach(&radj, s, &within, true);
            fwd.intersection(&back).copied().collect()
        };
        let local: BTreeMap<usize, Vec<usize>> =
            comp.iter().map(|&v| (v, adj[v].iter().copied().filter(|w| comp.contains(w)).collect())).collect();

        let mut blocked: HashSet<usize> = HashSet::new();
        let mut bmap: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        let mut path = vec![s];
        blocked.insert(s);
        let mut frames: Vec<(usize, usize, bool)> = vec![(s, 0, false)];
        while let Some(&mut (v, ref mut i, ref mut found)) = frames.last_mut() {
            let nbrs = &local[&v];
            if *i < nbrs.len() {
                let w = nbrs[*i];
                *i += 1;
                if w == s {
                    *found = true;
                    if !on_cycle(&path, &mut classes)? {
                        truncated = true;
                        break 'outer;
                    }
                } else if !blocked.contains(&w) {
                    path.push(w);
                    blocked.insert(w);
                    frames.push((w, 0, false));
                }
            } else {
                let f = *found;
                if f {
                    let mut stack = vec![v];
                    while let Some(x) = stack.pop() {
                        if blocked.remove(&x) {
                            if let Some(bs) = bmap.remove(&x) {
                                stack.extend(bs);
                            }
                        }
                    }
                } else {
                    for &w in nbrs {
                        bmap.entry(w).or_default().insert(v);
                    }
                }
                frames.pop();
                path.pop();
                if let Some(parent) = frames.last_mut() {
                    parent.2 |= f;
                }
            }
        }
    }
    let mut classes: Vec<LoopClass> =
        classes.into_iter().map(|(canonical, representative)| LoopClass { representative, canonical }).collect();
    classes.sort_by(|a, b| {
        (a.representative.source.len(), a.representative.len(), &a.canonical).cmp(&(
            b.representative.source.len(),
            b.representative.len(),
            &b.canonical,
        ))
    });
    Ok(LoopEnumeration { classes, cycles: cycles.min(cap), truncated })
}

/// A component of equal-length words with a cut that none of its steps
/// crosses. Its cycles touching one side are whiskered by the other side and
/// those touching both rearrange to close on the first side alone.
fn splits(p: &Polygraph, g: &ReductionGraph, vs: &[usize]) -> bool {
    let n = g.word(vs[0]).len();
    if n < 2 || vs.iter().any(|&v| g.word(v).len() != n) {
        return false;
    }
    let inside: HashSet<usize> = vs.iter().copied().collect();
    let mut crossed = vec![false; n];
    for &v in vs {
        for e in g.edges(v).iter().filter(|e| inside.contains(&e.target)) {
            let st = g.step(p, v, e);
            let (a, b) = (st.pos(), st.pos() + st.input(p).len());
            for c in crossed.iter_mut().take(b).skip(a + 1) {
                *c = true;
            }
        }
    }
    crossed[1..].iter().any(|c| !c)
}

fn reach(adj: &[Vec<usize>], s: usize, within: &impl Fn(usize) -> bool, _rev: bool) -> HashSet<usize> {
    let mut seen = HashSet::from([s]);
    let mut stack = vec![s];
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if within(w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

fn reverse(adj: &[Vec<usize>], within: &impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let mut r = vec![Vec::new(); adj.len()];
    for (v, ws) in adj.iter().enumerate() {
        if !within(v) {
            continue;
        }
        for &w in ws {
            if within(w) {
                r[w].push(v);
            }
        }
    }
    r
}

/// `LOOP k: WORD =rule@pos=> … (elementary)` lines, numbered from 1.
pub fn report_lines(classes: &[LoopClass]) -> Vec<String> {
    classes.iter().enumerate().map(|(k, c)| format!("LOOP {}: {} (elementary)", k + 1, c.canonical)).collect()
}

/// For a rotation `g` of the loop `f`, returns `(h, k)` with
/// `f ≡ h ⋆ g ⋆ k`: `h` is the prefix of `f` up to the start of `g` and
/// `k = h⁻`.
pub fn rotate_conjugators(p: &Polygraph, f: &Path, g: &Path) -> Result<(Path, Path)> {
    if f.len() != g.len() || f.source != f.target(p) || g.source != g.target(p) {
        return Err(Error::NotEquivalent);
    }
    if f.is_empty() {
        return if f.source == g.source { Ok((f.clone(), f.clone())) } else { Err(Error::NotEquivalent) };
    }
    for i in 0..f.len() {
        let r = rotation(p, f, i);
        if r == *g {
            let h = f.prefix(i);
            let k = h.inverse(p);
            debug_assert!(crate::engine::equivalent(p, f, &h.then(g).then(&k)));
            return Ok((h, k));
        }
    }
    Err(Error::NotEquivalent)
}

const MAX_CONTRACT_NESTING: usize = 512;

/// A 3-cell expression from the loop `f` to the identity on its source,
/// built from the loop cells of `cells`.
pub fn contract_loop(p: &Polygraph, cells: &[ThreeCell], f: &Path) -> Result<ThreeCellExpression> {
    if f.source != f.target(p) || !f.is_forward() {
        return Err(Error::Invariant(format!("{} is not a reduction loop", f.short(p))));
    }
    contract(p, cells, f, 0)
}

fn contract(p: &Polygraph, cells: &[ThreeCell], f: &Path, nesting: usize) -> Result<ThreeCellExpression> {
    let id = Path::identity(f.source.clone());
    if f.is_empty() {
        return Ok(ThreeCellExpression::identity(f.clone()));
    }
    if nesting > MAX_CONTRACT_NESTING {
        return Err(Error::Budget(format!("loop contraction nested deeper than {MAX_CONTRACT_NESTING}")));
    }
    if let Some((i, j)) = first_repeat(p, f) {
        let (f1, inner, f2) = (f.prefix(i), Path { source: f.steps[i].source(p), steps: f.steps[i..j].to_vec() }, f.suffix(p, j));
        let rest = f1.then(&f2);
        let whole = support(f);
        if !support(&inner).is_strict_subset(&whole) || !support(&rest).is_strict_subset(&whole) {
            return Err(Error::Invariant("loop splitting did not shrink the support".into()));
        }
        let a = contract(p, cells, &inner, nesting + 1)?.conjugated(&f1, &f2).with_boundary(f.clone(), rest.clone());
        let b = contract(p, cells, &rest, nesting + 1)?;
        return Ok(a.then(b).with_boundary(f.clone(), id));
    }
    let (u, v) = common_whiskers(f);
    if !u.is_empty() || !v.is_empty() {
        let inner = unwhiskered(f, u.len(), v.len());
        return Ok(contract(p, cells, &inner, nesting + 1)?.whiskered(&u, &v).with_boundary(f.clone(), id));
    }
    for (idx, c) in cells.iter().enumerate() {
        if c.kind != CellKind::Loop {
            continue;
        }
        if let Ok((h, k)) = rotate_conjugators(p, f, &c.source) {
            let e = ThreeCellExpression::cell(p, cells, idx, false).conjugated(&h, &k);
            return Ok(e.with_boundary(f.clone(), id));
        }
    }
    for i in 0..f.len() {
        let r = rotation(p, f, i);
        if let Some(g) = decomposable_rearrangement(p, &r) {
            // f ≡ h ⋆ g ⋆ h⁻ with g non-simple
            let h = f.prefix(i);
            let e = contract(p, cells, &g, nesting + 1)?.conjugated(&h, &h.inverse(p));
            return Ok(e.with_boundary(f.clone(), id));
        }
    }
    Err(Error::MissingLoopClass(serialize_loop(p, &canonical_rotation(p, f))))
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopReport {
    pub classes: Vec<String>,
    pub cycles: usize,
    pub truncated: bool,
}

impl From<&LoopEnumeration> for LoopReport {
    fn from(e: &LoopEnumeration) -> Self {
        LoopReport { classes: report_lines(&e.classes), cycles: e.cycles, truncated: e.truncated }
    }
}
