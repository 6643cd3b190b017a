//! Decreasing confluence diagrams: checking, searching, and the audits a
//! decreasing completion relies on.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::branchings::{local_branchings, Branching, BranchingKind, LocalBranching};
use crate::engine::{Edge, Path, ReductionGraph, Step};
use crate::error::{Error, Result};
use crate::labelling::{measure_branching, measure_pair, multiset_less, Label, Labelling};
use crate::polygraph::{all_words, Polygraph, Word};

/// Confluence diagram of a local branching `(f, g)`: the left side is
/// `f·f′·g″·h₁`, the right side `g·g′·f″·h₂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecreasingDiagram {
    pub branching: LocalBranching,
    pub f_prime: Path,
    pub g_dblprime: Path,
    pub h1: Path,
    pub g_prime: Path,
    pub f_dblprime: Path,
    pub h2: Path,
}

/// Confluence `(f·f′, g·g′)` of an arbitrary branching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictDiagram {
    pub branching: Branching,
    pub f_prime: Path,
    pub g_prime: Path,
}

impl DecreasingDiagram {
    /// Two-part diagram `(f·f′, g·g′)`.
    pub fn strict(p: &Polygraph, branching: LocalBranching, f_prime: Path, g_prime: Path) -> Self {
        let lt = f_prime.target(p);
        let rt = g_prime.target(p);
        DecreasingDiagram {
            branching,
            g_dblprime: Path::identity(lt.clone()),
            h1: Path::identity(lt),
            f_dblprime: Path::identity(rt.clone()),
            h2: Path::identity(rt),
            f_prime,
            g_prime,
        }
    }

    /// Completion on the side of `f` (`f′·g″·h₁`).
    pub fn left_completion(&self) -> Path {
        self.f_prime.then(&self.g_dblprime).then(&self.h1)
    }

    pub fn right_completion(&self) -> Path {
        self.g_prime.then(&self.f_dblprime).then(&self.h2)
    }

    pub fn left(&self, p: &Polygraph) -> Path {
        Path::single(p, self.branching.first.clone()).then(&self.left_completion())
    }

    pub fn right(&self, p: &Polygraph) -> Path {
        Path::single(p, self.branching.second.clone()).then(&self.right_completion())
    }

    pub fn target(&self, p: &Polygraph) -> Word {
        self.h1.target(p)
    }

    pub fn is_two_part(&self) -> bool {
        self.g_dblprime.is_empty() && self.h1.is_empty() && self.f_dblprime.is_empty() && self.h2.is_empty()
    }

    pub fn whiskered(&self, p: &Polygraph, u: &[u16], v: &[u16]) -> Self {
        DecreasingDiagram {
            branching: self.branching.whiskered(p, u, v),
            f_prime: self.f_prime.whiskered(u, v),
            g_dblprime: self.g_dblprime.whiskered(u, v),
            h1: self.h1.whiskered(u, v),
            g_prime: self.g_prime.whiskered(u, v),
            f_dblprime: self.f_dblprime.whiskered(u, v),
            h2: self.h2.whiskered(u, v),
        }
    }

    /// Branching with its sides exchanged.
    pub fn swapped(&self) -> Self {
        DecreasingDiagram {
            branching: self.branching.swapped(),
            f_prime: self.g_prime.clone(),
            g_dblprime: self.f_dblprime.clone(),
            h1: self.h2.clone(),
            g_prime: self.f_prime.clone(),
            f_dblprime: self.g_dblprime.clone(),
            h2: self.h1.clone(),
        }
    }

    /// `(αt·βt, sβ·sα)`
    pub fn short(&self, p: &Polygraph) -> String {
        format!("({}, {})", self.left(p).short(p), self.right(p).short(p))
    }
}

impl StrictDiagram {
    pub fn left(&self) -> Path {
        self.branching.left.then(&self.f_prime)
    }

    pub fn right(&self) -> Path {
        self.branching.right.then(&self.g_prime)
    }

    pub fn short(&self, p: &Polygraph) -> String {
        format!("({}, {})", self.left().short(p), self.right().short(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
    #[serde(rename = "iv")]
    IV,
    #[serde(rename = "v")]
    V,
    /// A part that must be empty in a two-part diagram is not.
    #[serde(rename = "strict")]
    Strict,
    /// The sides do not compose or do not meet.
    #[serde(rename = "shape")]
    Shape,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::I => "i",
            Condition::II => "ii",
            Condition::III => "iii",
            Condition::IV => "iv",
            Condition::V => "v",
            Condition::Strict => "strict",
            Condition::Shape => "shape",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub branching: String,
    pub condition: Condition,
    /// Offending label, if any.
    pub label: Option<String>,
    /// Labels it should have been below (or equal to, for iii/iv).
    pub against: Vec<String>,
    /// Whiskering context `(u₁, u₂)`, when found by a context audit.
    pub context: Option<(String, String)>,
}

impl Violation {
    pub fn describe(&self) -> String {
        let mut s = format!("{}: condition {}", self.branching, self.condition.as_str());
        if let Some(l) = &self.label {
            s.push_str(&format!(", label {} vs {{{}}}", l, self.against.join(",")));
        }
        if let Some((a, b)) = &self.context {
            s.push_str(&format!(", context ({a}, {b})"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramCheck {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Checks conditions i)–v) on `d`; `strict` also requires the two-part shape.
pub fn check_decreasing(
    lab: &Labelling,
    p: &Polygraph,
    g: &ReductionGraph,
    d: &DecreasingDiagram,
    strict: bool,
) -> Result<DiagramCheck> {
    let name = d.branching.short(p);
    let show = |l: Label| lab.show_label(p, g, l);
    let mut out = Vec::new();
    let mut push = |condition, label: Option<Label>, against: &[Label]| {
        out.push(Violation {
            branching: name.clone(),
            condition,
            label: label.map(show),
            against: against.iter().map(|&l| show(l)).collect(),
            context: None,
        })
    };

    let (left, right) = (d.left(p), d.right(p));
    let shape_ok = left.check(p).is_ok()
        && right.check(p).is_ok()
        && left.is_forward()
        && right.is_forward()
        && left.target(p) == right.target(p)
        && d.g_dblprime.len() <= 1
        && d.f_dblprime.len() <= 1;
    if !shape_ok {
        push(Condition::Shape, None, &[]);
        return Ok(DiagramCheck { ok: false, violations: out });
    }

    let lf = lab.label_step(p, g, &d.branching.first)?;
    let lg = lab.label_step(p, g, &d.branching.second)?;
    for k in lab.labels(p, g, &d.f_prime)? {
        if !lab.less(k, lf) {
            push(Condition::I, Some(k), &[lf]);
        }
    }
    for k in lab.labels(p, g, &d.g_prime)? {
        if !lab.less(k, lg) {
            push(Condition::II, Some(k), &[lg]);
        }
    }
    for k in lab.labels(p, g, &d.f_dblprime)? {
        if k != lf {
            push(Condition::III, Some(k), &[lf]);
        }
    }
    for k in lab.labels(p, g, &d.g_dblprime)? {
        if k != lg {
            push(Condition::IV, Some(k), &[lg]);
        }
    }
    for k in lab.labels(p, g, &d.h1)?.into_iter().chain(lab.labels(p, g, &d.h2)?) {
        if !lab.less(k, lf) && !lab.less(k, lg) {
            push(Condition::V, Some(k), &[lf, lg]);
        }
    }
    if strict && !d.is_two_part() {
        push(Condition::Strict, None, &[]);
    }
    Ok(DiagramCheck { ok: out.is_empty(), violations: out })
}

/// Best split of given completions into a diagram passing the check, if any.
pub fn fit_diagram(
    lab: &Labelling,
    p: &Polygraph,
    g: &ReductionGraph,
    b: &LocalBranching,
    left: &Path,
    right: &Path,
    strict: bool,
) -> Result<Option<DecreasingDiagram>> {
    let splits = |c: &Path| -> Vec<(Path, Path, Path)> {
        let n = c.len();
        let mut v = Vec::new();
        for i in (0..=n).rev() {
            for j in [i, i + 1] {
                if j > n || (strict && (i != n || j != n)) {
                    continue;
                }
                let a = c.prefix(i);
                let rest = c.suffix(p, i);
                v.push((a, rest.prefix(j - i), rest.suffix(p, j - i)));
            }
        }
        v
    };
    for (fp, gpp, h1) in splits(left) {
        for (gp, fpp, h2) in splits(right) {
            let d = DecreasingDiagram {
                branching: b.clone(),
                f_prime: fp.clone(),
                g_dblprime: gpp.clone(),
                h1: h1.clone(),
                g_prime: gp,
                f_dblprime: fpp,
                h2,
            };
            if check_decreasing(lab, p, g, &d, strict)?.ok {
                return Ok(Some(d));
            }
        }
    }
    Ok(None)
}

/// Predecessor edge of each reached vertex.
type SearchTree = HashMap<usize, Option<(usize, Edge)>>;

/// Breadth-first tree from `start` over edges whose label passes `allow`,
/// up to `depth` steps. Also reports whether an incomplete vertex was met.
fn restricted_tree(
    lab: &Labelling,
    p: &Polygraph,
    g: &ReductionGraph,
    start: usize,
    depth: usize,
    allow: impl Fn(Label) -> bool,
) -> Result<(SearchTree, HashMap<usize, usize>, bool)> {
    let mut tree = HashMap::from([(start, None)]);
    let mut dist = HashMap::from([(start, 0usize)]);
    let mut truncated = false;
    let mut q = VecDeque::from([start]);
    while let Some(v) = q.pop_front() {
        let dv = dist[&v];
        if dv >= depth {
            continue;
        }
        if !g.is_complete(v) {
            truncated = true;
        }
        for e in g.edges(v) {
            if tree.contains_key(&e.target) {
                continue;
            }
            if allow(lab.label_step(p, g, &g.step(p, v, e))?) {
                tree.insert(e.target, Some((v, *e)));
                dist.insert(e.target, dv + 1);
                q.push_back(e.target);
            }
        }
    }
    Ok((tree, dist, truncated))
}

fn step_key(f: &Path) -> Vec<(usize, usize)> {
    f.steps.iter().map(|s| (s.pos(), s.rule)).collect()
}

/// Meets two restricted trees at the vertex minimising total length, then
/// lexicographic step order.
#[allow(clippy::type_complexity)]
fn meet(
    p: &Polygraph,
    g: &ReductionGraph,
    a: (usize, &HashMap<usize, Option<(usize, Edge)>>, &HashMap<usize, usize>),
    b: (usize, &HashMap<usize, Option<(usize, Edge)>>, &HashMap<usize, usize>),
) -> Option<(Path, Path)> {
    let best = a
        .2
        .iter()
        .filter_map(|(&v, &da)| b.2.get(&v).map(|&db| (da + db, v)))
        .map(|(total, v)| {
            let fp = g.path_in_tree(p, a.1, a.0, v).expect("vertex in tree");
            let gp = g.path_in_tree(p, b.1, b.0, v).expect("vertex in tree");
            ((total, step_key(&fp), step_key(&gp)), fp, gp)
        })
        .min_by(|x, y| x.0.cmp(&y.0))?;
    Some((best.1, best.2))
}

fn frontier_note(p: &Polygraph, b: &LocalBranching, sizes: (usize, usize), truncated: bool) -> String {
    format!(
        "{} on {}: explored {} and {} vertices{}",
        b.short(p),
        p.show(&b.source),
        sizes.0,
        sizes.1,
        if truncated { ", frontier reaches incompletely explored words" } else { "" }
    )
}

/// Searches a confluence diagram for a local branching. The two-part strict
/// shape is tried first: each side descends only through labels below its
/// branching label. Unless `strict`, the seven-part shape is tried next.
pub fn find_decreasing(
    lab: &Labelling,
    p: &Polygraph,
    g: &ReductionGraph,
    b: &LocalBranching,
    depth: usize,
    strict: bool,
) -> Result<DecreasingDiagram> {
    let lf = lab.label_step(p, g, &b.first)?;
    let lg = lab.label_step(p, g, &b.second)?;
    let vf = g.id(p, &b.first.target(p))?;
    let vg = g.id(p, &b.second.target(p))?;
    let (tf, df, trf) = restricted_tree(lab, p, g, vf, depth, |k| lab.less(k, lf))?;
    let (tg, dg, trg) = restricted_tree(lab, p, g, vg, depth, |k| lab.less(k, lg))?;
    if let Some((fp, gp)) = meet(p, g, (vf, &tf, &df), (vg, &tg, &dg)) {
        return Ok(DecreasingDiagram::strict(p, b.clone(), fp, gp));
    }
    if strict {
        let note = frontier_note(p, b, (tf.len(), tg.len()), trf || trg);
        return Err(if trf || trg { Error::TruncatedRegion(note) } else { Error::NotFound(note) });
    }
    let (sf, truncf) = phased_search(lab, p, g, vf, depth, lf, lg)?;
    let (sg, truncg) = phased_search(lab, p, g, vg, depth, lg, lf)?;
    let best = sf
        .dist
        .iter()
        .filter(|(&(_, ph), _)| ph == 2)
        .filter_map(|(&(v, _), &da)| sg.dist.get(&(v, 2)).map(|&db| (da + db, v)))
        .map(|(total, v)| {
            let (fp, gpp, h1) = sf.parts(p, g, v);
            let (gp, fpp, h2) = sg.parts(p, g, v);
            let d = DecreasingDiagram { branching: b.clone(), f_prime: fp, g_dblprime: gpp, h1, g_prime: gp, f_dblprime: fpp, h2 };
            ((total, step_key(&d.left_completion()), step_key(&d.right_completion())), d)
        })
        .min_by(|x, y| x.0.cmp(&y.0));
    match best {
        Some((_, d)) => Ok(d),
        None => {
            let note = frontier_note(p, b, (sf.dist.len(), sg.dist.len()), truncf || truncg);
            Err(if truncf || truncg { Error::TruncatedRegion(note) } else { Error::NotFound(note) })
        }
    }
}

type Phase = (usize, u8);

/// State space of one side of a seven-part diagram: phase 0 walks `f′`,
/// phase 1 may take the single step `g″`, phase 2 walks `h₁`.
struct Phased {
    start: usize,
    dist: HashMap<Phase, usize>,
    parent: HashMap<Phase, (Phase, Option<Edge>)>,
}

impl Phased {
    fn parts(&self, p: &Polygraph, g: &ReductionGraph, end: usize) -> (Path, Path, Path) {
        let mut parts: [Vec<Step>; 3] = Default::default();
        let mut cur = (end, 2u8);
        while let Some(&(prev, e)) = self.parent.get(&cur) {
            if let Some(e) = e {
                // the phase of a step is the phase it lands in, except g″ (1 → 2)
                let slot = if prev.1 == 1 && cur.1 == 2 { 1 } else { cur.1 as usize };
                parts[slot].push(g.step(p, prev.0, &e));
            }
            cur = prev;
        }
        let mut src = g.word(self.start).clone();
        let mut out = Vec::new();
        for mut steps in parts {
            steps.reverse();
            let path = Path { source: src.clone(), steps };
            src = path.target(p);
            out.push(path);
        }
        let h = out.pop().unwrap();
        let m = out.pop().unwrap();
        let f = out.pop().unwrap();
        (f, m, h)
    }
}

fn phased_search(
    lab: &Labelling,
    p: &Polygraph,
    g: &ReductionGraph,
    start: usize,
    depth: usize,
    own: Label,
    other: Label,
) -> Result<(Phased, bool)> {
    let mut s = Phased { start, dist: HashMap::new(), parent: HashMap::new() };
    let mut truncated = false;
    let mut dq = VecDeque::new();
    s.dist.insert((start, 0), 0);
    dq.push_back((start, 0u8));
    let relax = |s: &mut Phased, dq: &mut VecDeque<(usize, u8)>, from, to, d, e: Option<Edge>| {
        if s.dist.get(&to).is_none_or(|&old| d < old) {
            s.dist.insert(to, d);
            s.parent.insert(to, (from, e));
            if e.is_none() {
                dq.push_front(to);
            } else {
                dq.push_back(to);
            }
        }
    };
    let mut done = std::collections::HashSet::new();
    while let Some(st) = dq.pop_front() {
        if !done.insert(st) {
            continue;
        }
        let (v, ph) = st;
        let d = s.dist[&st];
        if ph < 2 {
            relax(&mut s, &mut dq, st, (v, ph + 1), d, None);
        }
        if d >= depth {
            continue;
        }
        if !g.is_complete(v) {
            truncated = true;
        }
        for e in g.edges(v) {
            let k = lab.label_step(p, g, &g.step(p, v, e))?;
            let next = match ph {
                0 if lab.less(k, own) => Some(0),
                1 if k == other => Some(2),
                2 if lab.less(k, own) || lab.less(k, other) => Some(2),
                _ => None,
            };
            if let Some(nph) = next {
                relax(&mut s, &mut dq, st, (e.target, nph), d + 1, Some(*e));
            }
        }
    }
    Ok((s, truncated))
}

// ---------------------------------------------------------------------------
// Peiffer branchings

/// Which confluence of a Peiffer branching `(fv, ug)` on `uv` is used. `f̄`
/// and `ḡ` are one-step reverses of `f` and `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PeifferVariant {
    /// `(u′g, fv′)`
    Peiffer,
    /// `(f̄v, uḡ)`
    BothBack,
    /// `(u′g·f̄v′, 1)`
    LeftAcrossTop,
    /// `(f̄v·ug, 1)`
    LeftAcrossBottom,
    /// `(1, fv′·u′ḡ)`
    RightAcrossTop,
    /// `(1, uḡ·fv)`
    RightAcrossBottom,
}

impl PeifferVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            PeifferVariant::Peiffer => "peiffer",
            PeifferVariant::BothBack => "both_back",
            PeifferVariant::LeftAcrossTop => "left_across_top",
            PeifferVariant::LeftAcrossBottom => "left_across_bottom",
            PeifferVariant::RightAcrossTop => "right_across_top",
            PeifferVariant::RightAcrossBottom => "right_across_bottom",
        }
    }
}

/// A candidate confluence for a Peiffer branching, with the pieces needed
/// to witness its equivalence with the Peiffer confluence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeifferCandidate {
    pub variant: PeifferVariant,
    pub branching: LocalBranching,
    /// Split point: `u = source[..split]`, `v = source[split..]`.
    pub split: usize,
    /// Reverse of the left step, as a step on `u′` (unwhiskered).
    pub f_back: Option<Step>,
    /// Reverse of the right step, as a step on `v′` (unwhiskered).
    pub g_back: Option<Step>,
    pub left: Path,
    pub right: Path,
}

fn unwhisker(s: &Step, left: usize, right: usize) -> Step {
    Step { left: s.left[left..].to_vec(), rule: s.rule, right: s.right[..s.right.len() - right].to_vec(), inverse: s.inverse }
}

/// Local parts of a Peiffer branching `(fv, ug)`: `(u, f, v, g)` with `f`
/// and `g` as steps on `u` and `v`.
pub fn peiffer_parts(p: &Polygraph, b: &LocalBranching) -> (Word, Step, Word, Step) {
    let split = b.first.pos() + b.first.input(p).len();
    let u = b.source[..split].to_vec();
    let v = b.source[split..].to_vec();
    let f = unwhisker(&b.first, 0, v.len());
    let g = unwhisker(&b.second, split, 0);
    (u, f, v, g)
}

/// All candidate confluences of a Peiffer branching available in `g`.
pub fn peiffer_candidates(p: &Polygraph, gr: &ReductionGraph, b: &LocalBranching) -> Result<Vec<PeifferCandidate>> {
    let (u, f, v, g) = peiffer_parts(p, b);
    let (u2, v2) = (f.target(p), g.target(p));
    let w = |a: &[u16], c: &[u16]| [a, c].concat();
    let step = |s: &Step, l: &[u16], r: &[u16]| s.whiskered(l, r);
    let path = |src: Word, steps: Vec<Step>| Path { source: src, steps };

    // reverse steps found as edges of the explored graph
    let backs = |from: &Word, to: &Word| -> Result<Vec<Step>> {
        let id = gr.id(p, from)?;
        Ok(enumerate_local(p, gr, id).into_iter().filter(|s| s.target(p) == *to).collect())
    };
    let f_backs = backs(&u2, &u)?;
    let g_backs = backs(&v2, &v)?;

    let mut out = Vec::new();
    let mk = |variant, fb: Option<&Step>, gb: Option<&Step>, left: Path, right: Path| PeifferCandidate {
        variant,
        branching: b.clone(),
        split: u.len(),
        f_back: fb.cloned(),
        g_back: gb.cloned(),
        left,
        right,
    };
    out.push(mk(
        PeifferVariant::Peiffer,
        None,
        None,
        path(w(&u2, &v), vec![step(&g, &u2, &[])]),
        path(w(&u, &v2), vec![step(&f, &[], &v2)]),
    ));
    for fb in &f_backs {
        for gb in &g_backs {
            out.push(mk(
                PeifferVariant::BothBack,
                Some(fb),
                Some(gb),
                path(w(&u2, &v), vec![step(fb, &[], &v)]),
                path(w(&u, &v2), vec![step(gb, &u, &[])]),
            ));
        }
    }
    for fb in &f_backs {
        out.push(mk(
            PeifferVariant::LeftAcrossTop,
            Some(fb),
            None,
            path(w(&u2, &v), vec![step(&g, &u2, &[]), step(fb, &[], &v2)]),
            Path::identity(w(&u, &v2)),
        ));
        out.push(mk(
            PeifferVariant::LeftAcrossBottom,
            Some(fb),
            None,
            path(w(&u2, &v), vec![step(fb, &[], &v), step(&g, &u, &[])]),
            Path::identity(w(&u, &v2)),
        ));
    }
    for gb in &g_backs {
        out.push(mk(
            PeifferVariant::RightAcrossTop,
            None,
            Some(gb),
            Path::identity(w(&u2, &v)),
            path(w(&u, &v2), vec![step(&f, &[], &v2), step(gb, &u2, &[])]),
        ));
        out.push(mk(
            PeifferVariant::RightAcrossBottom,
            None,
            Some(gb),
            Path::identity(w(&u2, &v)),
            path(w(&u, &v2), vec![step(gb, &u, &[]), step(&f, &[], &v)]),
        ));
    }
    Ok(out)
}

/// Steps out of `u` (local, unwhiskered word) read off the explored graph.
fn enumerate_local(p: &Polygraph, g: &ReductionGraph, id: usize) -> Vec<Step> {
    g.edges(id).iter().map(|e| g.step(p, id, e)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PeifferStatus {
    Pass,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeifferEntry {
    pub branching: String,
    pub source: String,
    pub status: PeifferStatus,
    pub variant: Option<PeifferVariant>,
    pub diagram: Option<String>,
    /// Equivalence witness with the Peiffer confluence, as a 3-cell expression.
    pub witness: Option<String>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeifferReport {
    pub len_bound: usize,
    pub entries: Vec<PeifferEntry>,
    pub all_pass: bool,
    /// Witnesses were checked against an extension built before this audit.
    pub witnessed_against_partial_extension: bool,
}

/// Produces a certificate that a Peiffer candidate closes, or fails.
pub type PeifferWitness<'a> = &'a dyn Fn(&PeifferCandidate) -> Result<String>;

/// Checks every Peiffer branching on words up to `len_bound`. A branching
/// passes when one candidate confluence is decreasing and, for rotated
/// candidates, `witness` produces an equivalence witness. Without a witness
/// function only the Peiffer confluence itself can pass.
pub fn check_peiffer_decreasing(
    lab: &Labelling,
    p: &Polygraph,
    g: &ReductionGraph,
    len_bound: usize,
    witness: Option<PeifferWitness<'_>>,
) -> Result<PeifferReport> {
    let mut entries = Vec::new();
    for w in all_words(p, len_bound) {
        for b in local_branchings(p, &w, false) {
            if b.kind != BranchingKind::Peiffer {
                continue;
            }
            entries.push(peiffer_entry(lab, p, g, &b, witness)?);
        }
    }
    let all_pass = entries.iter().all(|e| e.status == PeifferStatus::Pass);
    Ok(PeifferReport { len_bound, entries, all_pass, witnessed_against_partial_extension: witness.is_some() })
}

pub fn peiffer_entry(
    lab: &Labelling,
    p: &Polygraph,
    g: &ReductionGraph,
    b: &LocalBranching,
    witness: Option<PeifferWitness<'_>>,
) -> Result<PeifferEntry> {
    let mut notes = Vec::new();
    let cands = peiffer_candidates(p, g, b)?;
    for c in &cands {
        let Some(d) = fit_diagram(lab, p, g, b, &c.left, &c.right, false)? else {
            continue;
        };
        let wit = match (c.variant, witness) {
            (PeifferVariant::Peiffer, _) => Some("identity (exchange law)".to_string()),
            (_, Some(wf)) => match wf(c) {
                Ok(s) => Some(s),
                Err(e) => {
                    notes.push(format!("{}: no witness ({e})", c.variant.as_str()));
                    None
                }
            },
            (_, None) => {
                notes.push(format!("{}: decreasing, witness not checked", c.variant.as_str()));
                None
            }
        };
        if let Some(wit) = wit {
            return Ok(PeifferEntry {
                branching: b.short(p),
                source: p.show(&b.source),
                status: PeifferStatus::Pass,
                variant: Some(c.variant),
                diagram: Some(d.short(p)),
                witness: Some(wit),
                note: notes.join("; "),
            });
        }
    }
    if cands.len() == 1 {
        notes.push("no reverse steps explored".into());
    }
    notes.push(format!("{} candidate(s), none decreasing with a witness", cands.len()));
    Ok(PeifferEntry {
        branching: b.short(p),
        source: p.show(&b.source),
        status: PeifferStatus::Undecided,
        variant: None,
        diagram: None,
        witness: None,
        note: notes.join("; "),
    })
}

// ---------------------------------------------------------------------------
// Context audits

/// Pairs `(u₁, u₂)` with `|u₁| + |u₂| ≤ bound`, shortest first.
pub fn contexts(p: &Polygraph, bound: usize) -> Vec<(Word, Word)> {
    let words = all_words(p, bound);
    let mut out = Vec::new();
    for total in 0..=bound {
        for a in &words {
            for b in &words {
                if a.len() + b.len() == total {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContextReport {
    pub bound: usize,
    pub strict: bool,
    pub diagrams: usize,
    pub checked: usize,
    pub violations: Vec<Violation>,
    pub verified: bool,
    /// ⋆₀-compatibility held on the sample and all diagrams are strict, so
    /// the bounded check is backed by the structural argument.
    pub structurally_justified: bool,
}

/// Re-checks each diagram under every context up to `ctx_bound`.
pub fn check_context_compatibility(
    lab: &Labelling,
    p: &Polygraph,
    g: &ReductionGraph,
    diagrams: &[DecreasingDiagram],
    ctx_bound: usize,
    strict: bool,
) -> Result<ContextReport> {
    let mut checked = 0;
    let mut violations = Vec::new();
    for d in diagrams {
        for (u1, u2) in contexts(p, ctx_bound) {
            let dw = d.whiskered(p, &u1, &u2);
            let r = check_decreasing(lab, p, g, &dw, strict)?;
            checked += 1;
            if r.ok
                || (!strict
                    && fit_diagram(lab, p, g, &dw.branching, &dw.left_completion(), &dw.right_completion(), false)?
                        .is_some())
            {
                continue;
            }
            for mut v in r.violations {
                v.branching = d.branching.short(p);
                v.context = Some((p.show(&u1), p.show(&u2)));
                violations.push(v);
            }
        }
    }
    let verified = violations.is_empty();
    Ok(ContextReport { bound: ctx_bound, strict, diagrams: diagrams.len(), checked, violations, verified, structurally_justified: false })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Star0Report {
    pub bound: usize,
    pub sampled_pairs: usize,
    pub strict_pairs: usize,
    pub checked: usize,
    pub violations: Vec<String>,
    pub passed: bool,
    pub note: String,
}

/// For each sampled pair with `ψ(f) ≺ ψ(g)` and each context up to `ctx_bound`,
/// checks `ψ(u₁fu₂) ≺ ψ(u₁gu₂)`.
pub fn check_star0_compatibility(
    lab: &Labelling,
    p: &Polygraph,
    g: &ReductionGraph,
    ctx_bound: usize,
    sample: &[(Step, Step)],
) -> Result<Star0Report> {
    let ctxs = contexts(p, ctx_bound);
    let mut strict_pairs = 0;
    let mut checked = 0;
    let mut violations = Vec::new();
    for (f, h) in sample {
        let (lf, lh) = (lab.label_step(p, g, f)?, lab.label_step(p, g, h)?);
        if !lab.less(lf, lh) {
            continue;
        }
        strict_pairs += 1;
        for (u1, u2) in &ctxs {
            let (fw, hw) = (f.whiskered(u1, u2), h.whiskered(u1, u2));
            let (a, b) = (lab.label_step(p, g, &fw)?, lab.label_step(p, g, &hw)?);
            checked += 1;
            if !lab.less(a, b) {
                violations.push(format!(
                    "{} ({}) vs {} ({})",
                    fw.short(p),
                    lab.show_label(p, g, a),
                    hw.short(p),
                    lab.show_label(p, g, b)
                ));
            }
        }
    }
    let passed = violations.is_empty();
    let note = if passed {
        "a ⋆₀-compatible labelling on a strictly decreasing polygraph is compatible with contexts".to_string()
    } else {
        String::new()
    };
    Ok(Star0Report { bound: ctx_bound, sampled_pairs: sample.len(), strict_pairs, checked, violations, passed, note })
}

/// Step pairs `(k, f)` with `k` in a completion of a diagram and `f` its
/// branching step on that side.
pub fn diagram_pairs(diagrams: &[DecreasingDiagram]) -> Vec<(Step, Step)> {
    let mut out = Vec::new();
    for d in diagrams {
        for k in d.left_completion().steps {
            out.push((k, d.branching.first.clone()));
        }
        for k in d.right_completion().steps {
            out.push((k, d.branching.second.clone()));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Strict completion of arbitrary branchings

/// Each completion label lies below some label of its own side, so the
/// lexicographic measure of the side is unchanged. An empty side constrains
/// nothing.
pub fn is_strict_completion(lab: &Labelling, p: &Polygraph, g: &ReductionGraph, d: &StrictDiagram) -> Result<bool> {
    let side = |path: &Path, comp: &Path| -> Result<bool> {
        let own = lab.labels(p, g, path)?;
        Ok(own.is_empty() || lab.labels(p, g, comp)?.iter().all(|&k| own.iter().any(|&j| lab.less(k, j))))
    };
    Ok(d.left().target(p) == d.right().target(p)
        && side(&d.branching.left, &d.f_prime)?
        && side(&d.branching.right, &d.g_prime)?)
}

/// Closes `(f, g)` by the inductive construction: close the head local
/// branching strictly, then the two residual branchings. Each recursive
/// call is checked to lower the measure. If the pasted result is not strict
/// side by side, a direct search along labels below each side is used.
pub fn complete_branching_strictly(
    lab: &Labelling,
    p: &Polygraph,
    g: &ReductionGraph,
    b: &Branching,
    depth: usize,
) -> Result<StrictDiagram> {
    let (fp, gp) = close(lab, p, g, &b.left, &b.right, depth, 0)?;
    let d = StrictDiagram { branching: b.clone(), f_prime: fp, g_prime: gp };
    if is_strict_completion(lab, p, g, &d)? {
        return Ok(d);
    }
    direct_strict(lab, p, g, b, depth)
}

const MAX_NESTING: usize = 256;

fn close(
    lab: &Labelling,
    p: &Polygraph,
    g: &ReductionGraph,
    f: &Path,
    h: &Path,
    depth: usize,
    nesting: usize,
) -> Result<(Path, Path)> {
    if f.is_empty() {
        return Ok((h.clone(), Path::identity(h.target(p))));
    }
    if h.is_empty() {
        return Ok((Path::identity(f.target(p)), f.clone()));
    }
    if nesting > MAX_NESTING {
        return Err(Error::Budget(format!("strict completion nested deeper than {MAX_NESTING}")));
    }
    let whole = measure_pair(lab, p, g, f, h)?;
    let local = LocalBranching::new(p, f.steps[0].clone(), h.steps[0].clone());
    let d = find_decreasing(lab, p, g, &local, depth, true)?;
    let (f_rest, h_rest) = (f.suffix(p, 1), h.suffix(p, 1));
    let (f2, h2) = (d.f_prime.clone(), d.g_prime.clone());

    let first = measure_pair(lab, p, g, &f_rest, &f2)?;
    if !multiset_less(&first, &whole, &lab.order) {
        return Err(Error::MeasureNotDecreasing(format!("{} vs {}", f_rest.short(p), f2.short(p))));
    }
    let (k1, k2) = close(lab, p, g, &f_rest, &f2, depth, nesting + 1)?;

    let h2k2 = h2.then(&k2);
    let second = measure_pair(lab, p, g, &h_rest, &h2k2)?;
    if !multiset_less(&second, &whole, &lab.order) {
        return Err(Error::MeasureNotDecreasing(format!("{} vs {}", h_rest.short(p), h2k2.short(p))));
    }
    let (l2, l1) = close(lab, p, g, &h_rest, &h2k2, depth, nesting + 1)?;
    Ok((k1.then(&l1), l2))
}

fn direct_strict(lab: &Labelling, p: &Polygraph, g: &ReductionGraph, b: &Branching, depth: usize) -> Result<StrictDiagram> {
    let lf = lab.labels(p, g, &b.left)?;
    let lg = lab.labels(p, g, &b.right)?;
    let vf = g.id(p, &b.left.target(p))?;
    let vg = g.id(p, &b.right.target(p))?;
    let below = |side: &[Label], k: Label| side.is_empty() || side.iter().any(|&j| lab.less(k, j));
    let (tf, df, trf) = restricted_tree(lab, p, g, vf, depth, |k| below(&lf, k))?;
    let (tg, dg, trg) = restricted_tree(lab, p, g, vg, depth, |k| below(&lg, k))?;
    match meet(p, g, (vf, &tf, &df), (vg, &tg, &dg)) {
        Some((fp, gp)) => Ok(StrictDiagram { branching: b.clone(), f_prime: fp, g_prime: gp }),
        None => {
            let note = format!("({}, {}): no strict completion found", b.left.short(p), b.right.short(p));
            Err(if trf || trg { Error::TruncatedRegion(note) } else { Error::NotFound(note) })
        }
    }
}

/// Measure-decrease check used by the sphere filler and by tests:
/// `|(f′₁, f₂)| ≺ |(g₁, f₁·f₂)|`.
pub fn measure_decreases(
    lab: &Labelling,
    p: &Polygraph,
    g: &ReductionGraph,
    f1_prime: &Path,
    f2: &Path,
    g1: &Path,
    f1f2: &Path,
) -> Result<bool> {
    let a = measure_branching(
        lab,
        p,
        g,
        &Branching { source: f1_prime.source.clone(), left: f1_prime.clone(), right: f2.clone() },
    )?;
    let b = measure_branching(lab, p, g, &Branching { source: g1.source.clone(), left: g1.clone(), right: f1f2.clone() })?;
    Ok(multiset_less(&a, &b, &lab.order))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::branchings::critical_branchings;
    use crate::engine::{explore, ExplorationBudget};
    use crate::labelling::QnfChoice;

    fn b3() -> Polygraph {
        Polygraph::from_rules("B3", "s t", &[("alpha", "s t s", "t s t"), ("beta", "t s t", "s t s")]).unwrap()
    }

    fn ab() -> Polygraph {
        Polygraph::from_rules("AB", "a b", &[("alpha", "a", "b"), ("beta", "b", "a")]).unwrap()
    }

    /// `(sts)^N v` with `N` maximal, over all words up to `n`.
    pub(crate) fn b3_qnf(p: &Polygraph, g: &ReductionGraph) -> HashMap<Word, Word> {
        // independent oracle: pick, within each component, the member with
        // the longest `sts` prefix power, then the least remainder
        let sts = p.parse_word("sts").unwrap();
        let score = |w: &Word| {
            let mut n = 0;
            while w.len() >= 3 * (n + 1) && w[3 * n..3 * n + 3] == sts[..] {
                n += 1;
            }
            (std::cmp::Reverse(n), w.clone())
        };
        let mut m = HashMap::new();
        for v in 0..g.len() {
            let reach: Vec<Word> = g.reachable(v).into_iter().map(|x| g.word(x).clone()).collect();
            let best = reach.iter().min_by_key(|w| score(w)).unwrap().clone();
            m.insert(g.word(v).clone(), best);
        }
        m
    }

    fn b3_setup(n: usize) -> (Polygraph, ReductionGraph, Labelling) {
        let p = b3();
        let g = explore(&p, &all_words(&p, n), ExplorationBudget::default());
        let m = b3_qnf(&p, &g);
        (p, g, Labelling::qnf(QnfChoice::Map(m)))
    }

    fn ab_setup(n: usize, alt: bool) -> (Polygraph, ReductionGraph, Labelling) {
        let p = ab();
        let g = explore(&p, &all_words(&p, n), ExplorationBudget::default());
        let m = all_words(&p, n)
            .into_iter()
            .map(|w| {
                let c = if alt && w.len() == 3 { "b" } else { "a" };
                let q = p.parse_word(&c.repeat(w.len())).unwrap();
                (w, q)
            })
            .collect();
        (p, g, Labelling::qnf(QnfChoice::Map(m)))
    }

    fn path(p: &Polygraph, s: &str) -> Path {
        Path::parse(p, s).unwrap()
    }

    fn lb(p: &Polygraph, a: &str, b: &str) -> LocalBranching {
        LocalBranching::new(p, Step::parse(p, a).unwrap(), Step::parse(p, b).unwrap())
    }

    #[test]
    fn b3_qnf_labels() {
        let (p, g, lab) = b3_setup(8);
        let l = |s: &str| lab.label_step(&p, &g, &Step::parse(&p, s).unwrap()).unwrap();
        assert_eq!([l("|alpha|t"), l("s|beta|"), l("|beta|t"), l("s|alpha|")], [1, 1, 0, 0]);
        assert_eq!([l("|beta|s"), l("t|alpha|"), l("t|beta|")], [0, 2, 1]);
        assert_eq!([l("|alpha|ts"), l("st|alpha|"), l("|beta|ts"), l("st|beta|")], [1, 1, 0, 0]);
        assert_eq!([l("|beta|st"), l("ts|beta|"), l("ts|alpha|")], [0, 2, 1]);
    }

    #[test]
    fn b3_diagram_is_strictly_decreasing() {
        let (p, g, lab) = b3_setup(6);
        let b = lb(&p, "|alpha|t", "s|beta|");
        let d = DecreasingDiagram::strict(&p, b, path(&p, "|beta|t"), path(&p, "s|alpha|"));
        assert!(check_decreasing(&lab, &p, &g, &d, true).unwrap().ok);
    }

    #[test]
    fn ab_peiffer_square_is_not_decreasing() {
        let (p, g, lab) = ab_setup(4, false);
        let b = lb(&p, "|alpha|a", "a|alpha|");
        let d = DecreasingDiagram::strict(&p, b.clone(), path(&p, "b|alpha|"), path(&p, "|alpha|b"));
        let r = check_decreasing(&lab, &p, &g, &d, false).unwrap();
        assert!(!r.ok);
        assert_eq!(r.violations[0].label.as_deref(), Some("2"));
        assert_eq!(r.violations[0].against, vec!["1".to_string()]);
        let d = DecreasingDiagram::strict(&p, b, path(&p, "|beta|a"), path(&p, "a|beta|"));
        assert!(check_decreasing(&lab, &p, &g, &d, true).unwrap().ok);
    }

    #[test]
    fn find_b3_diagrams() {
        let (p, g, lab) = b3_setup(8);
        let found: Vec<String> = critical_branchings(&p)
            .iter()
            .map(|b| find_decreasing(&lab, &p, &g, b, 8, true).unwrap().short(&p))
            .collect();
        assert_eq!(
            found,
            vec![
                "(alphat·betat, sbeta·salpha)",
                "(betas, talpha·tbeta·betas)",
                "(alphats·betats, stalpha·stbeta)",
                "(betast, tsbeta·tsalpha·betast)",
            ]
        );
    }

    #[test]
    fn aspherical_and_ab_peiffer_search() {
        let (p, g, lab) = b3_setup(5);
        let b = lb(&p, "|alpha|", "|alpha|");
        let d = find_decreasing(&lab, &p, &g, &b, 4, true).unwrap();
        assert!(d.f_prime.is_empty() && d.g_prime.is_empty());
        let (p, g, lab) = ab_setup(4, false);
        let d = find_decreasing(&lab, &p, &g, &lb(&p, "|alpha|a", "a|alpha|"), 4, true).unwrap();
        assert_eq!(d.short(&p), "(alphaa·betaa, aalpha·abeta)");
    }

    #[test]
    fn seven_part_search_with_constant_labels() {
        let (p, g, _) = ab_setup(3, false);
        let lab = Labelling::singleton();
        let b = lb(&p, "|alpha|a", "a|alpha|");
        assert!(find_decreasing(&lab, &p, &g, &b, 4, true).is_err());
        let d = find_decreasing(&lab, &p, &g, &b, 4, false).unwrap();
        assert!(check_decreasing(&lab, &p, &g, &d, false).unwrap().ok);
        assert_eq!(d.short(&p), "(alphaa·betaa, aalpha·abeta)");
        assert_eq!((d.g_dblprime.len(), d.f_dblprime.len()), (1, 1));
    }

    #[test]
    fn ab_peiffer_audit() {
        let (p, g, lab) = ab_setup(4, false);
        let ok = |_: &PeifferCandidate| -> Result<String> { Ok("w".into()) };
        let r = check_peiffer_decreasing(&lab, &p, &g, 2, Some(&ok)).unwrap();
        assert!(r.all_pass);
        assert_eq!(r.entries[0].variant, Some(PeifferVariant::BothBack));
        let r = check_peiffer_decreasing(&lab, &p, &g, 2, None).unwrap();
        assert!(!r.all_pass);
    }

    #[test]
    fn constant_labels_pass_with_peiffer_confluence() {
        let (p, g, _) = ab_setup(4, false);
        let lab = Labelling::singleton();
        let r = check_peiffer_decreasing(&lab, &p, &g, 3, None).unwrap();
        assert!(r.all_pass);
        assert!(r.entries.iter().all(|e| e.variant == Some(PeifferVariant::Peiffer)));
    }

    #[test]
    fn b3_peiffer_audit() {
        let (p, g, lab) = b3_setup(8);
        let ok = |_: &PeifferCandidate| -> Result<String> { Ok("w".into()) };
        let r = check_peiffer_decreasing(&lab, &p, &g, 6, Some(&ok)).unwrap();
        assert!(!r.entries.is_empty());
        assert!(r.all_pass, "{:?}", r.entries.iter().filter(|e| e.status != PeifferStatus::Pass).collect::<Vec<_>>());
    }

    #[test]
    fn ab_context_audit() {
        let (p, g, lab) = ab_setup(6, false);
        let b = lb(&p, "|alpha|a", "a|alpha|");
        let d = find_decreasing(&lab, &p, &g, &b, 4, true).unwrap();
        let r = check_context_compatibility(&lab, &p, &g, std::slice::from_ref(&d), 3, true).unwrap();
        assert!(r.verified, "{:?}", r.violations);
        let (p, g, lab) = ab_setup(6, true);
        let r = check_context_compatibility(&lab, &p, &g, &[d], 1, true).unwrap();
        assert!(!r.verified);
        let ctx: Vec<_> = r.violations.iter().filter_map(|v| v.context.clone()).collect();
        assert!(ctx.contains(&("b".to_string(), "1".to_string())));
        assert!(!ctx.contains(&("1".to_string(), "1".to_string())));
    }

    #[test]
    fn star0_audits() {
        let (p, g, lab) = b3_setup(9);
        let diagrams: Vec<_> =
            critical_branchings(&p).iter().map(|b| find_decreasing(&lab, &p, &g, b, 8, true).unwrap()).collect();
        // whiskering by s swaps the labels of the first diagram's left side
        let r = check_star0_compatibility(&lab, &p, &g, 3, &diagram_pairs(&diagrams)).unwrap();
        assert!(!r.passed);
        assert!(r.strict_pairs > 0);
        assert!(r.violations.contains(&"sbetat (1) vs salphat (0)".to_string()));

        // under contexts up to length 2 only the fourth diagram stops being
        // decreasing: stsβ lands on the quasi-normal form (sts)²
        let c = check_context_compatibility(&lab, &p, &g, &diagrams, 2, false).unwrap();
        assert!(!c.verified);
        assert!(c.violations.iter().all(|v| v.branching == "(betast, tsbeta)"), "{:?}", c.violations);
        let c = check_context_compatibility(&lab, &p, &g, &diagrams[..3], 2, false).unwrap();
        assert!(c.verified, "{:?}", c.violations);
        let c = check_context_compatibility(&lab, &p, &g, &diagrams, 1, true).unwrap();
        assert!(c.violations.iter().any(|v| v.context == Some(("s".into(), "1".into()))));

        let single = Labelling::singleton();
        let r = check_star0_compatibility(&single, &p, &g, 3, &diagram_pairs(&diagrams)).unwrap();
        assert!(r.passed && r.strict_pairs == 0);

        // exhaustive scan on short words for the alternate a/b map
        let (p, g, lab) = ab_setup(4, true);
        let mut sample = Vec::new();
        for w in all_words(&p, 2) {
            let steps = crate::engine::enumerate_steps(&p, &w);
            for f in &steps {
                for h in &steps {
                    sample.push((f.clone(), h.clone()));
                }
            }
        }
        let r = check_star0_compatibility(&lab, &p, &g, 2, &sample).unwrap();
        assert!(!r.passed);
        assert!(r.violations.iter().any(|v| v.starts_with('b')), "{:?}", r.violations);
    }

    #[test]
    fn strict_completion_examples() {
        let (p, g, lab) = b3_setup(8);
        let b = Branching {
            source: p.parse_word("stst").unwrap(),
            left: path(&p, "|alpha|t;|beta|t"),
            right: path(&p, "s|beta|;s|alpha|"),
        };
        let d = complete_branching_strictly(&lab, &p, &g, &b, 8).unwrap();
        assert!(d.f_prime.is_empty() && d.g_prime.is_empty());
        let b = Branching { source: b.source.clone(), left: path(&p, "|alpha|t"), right: path(&p, "s|beta|;s|alpha|") };
        let d = complete_branching_strictly(&lab, &p, &g, &b, 8).unwrap();
        assert_eq!(d.f_prime.short(&p), "betat");
        assert!(d.g_prime.is_empty());
        let b = Branching { source: b.source.clone(), left: Path::identity(b.source.clone()), right: path(&p, "s|beta|") };
        let d = complete_branching_strictly(&lab, &p, &g, &b, 8).unwrap();
        assert_eq!(d.f_prime.short(&p), "sbeta");
        assert!(d.g_prime.is_empty());
    }

    #[test]
    fn strict_completion_on_random_b3_branchings() {
        use rand::{Rng, SeedableRng};
        let (p, g, lab) = b3_setup(7);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let words = all_words(&p, 7);
        for _ in 0..60 {
            let w = words[rng.gen_range(0..words.len())].clone();
            let walk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut path = Path::identity(w.clone());
                for _ in 0..rng.gen_range(0..4) {
                    let v = g.vertex(&path.target(&p)).unwrap();
                    let es = g.edges(v);
                    if es.is_empty() {
                        break;
                    }
                    let e = es[rng.gen_range(0..es.len())];
                    path.steps.push(g.step(&p, v, &e));
                }
                path
            };
            let b = Branching { source: w.clone(), left: walk(&mut rng), right: walk(&mut rng) };
            let d = complete_branching_strictly(&lab, &p, &g, &b, 10).unwrap();
            assert!(is_strict_completion(&lab, &p, &g, &d).unwrap());
        }
    }
}
