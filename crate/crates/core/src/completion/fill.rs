//! Filling 2-spheres by 3-cell expressions: parallel rewriting sequences by
//! induction on the pair, zigzags by reduction to a common quasi-normal form.

use serde::Serialize;

use crate::branchings::{decompose, BranchingKind, LocalBranching};
use crate::decreasing::check_decreasing;
use crate::engine::{canonical_qnf_choice, equivalent, Path, ReductionGraph, Step};
use crate::error::{Error, Result};
use crate::labelling::{measure_pair, multiset_less, LabelKind, Labelling};
use crate::loops::contract_loop;
use crate::polygraph::{Polygraph, Word};

use super::{Provenance, ThreeCell, ThreeCellExpression};

/// Hard cap on recursive calls per fill, independent of the depth budget.
const MAX_CALLS: usize = 200_000;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FillStats {
    pub calls: usize,
    pub max_nesting: usize,
    /// Recursive spheres whose measure did not decrease.
    pub measure_violations: usize,
    /// Whiskered confluence cells re-checked for decreasingness, and failures.
    pub whiskered_checked: usize,
    pub whiskered_not_decreasing: usize,
}

pub struct Filler<'a> {
    p: &'a Polygraph,
    lab: &'a Labelling,
    g: &'a ReductionGraph,
    cells: &'a [ThreeCell],
    provenance: &'a [Provenance],
    depth: usize,
    /// Fail instead of counting when a recursive sphere does not decrease.
    pub strict_measure: bool,
    pub stats: FillStats,
}

impl<'a> Filler<'a> {
    pub fn new(
        p: &'a Polygraph,
        lab: &'a Labelling,
        g: &'a ReductionGraph,
        cells: &'a [ThreeCell],
        provenance: &'a [Provenance],
        depth: usize,
    ) -> Self {
        Filler { p, lab, g, cells, provenance, depth, strict_measure: false, stats: FillStats::default() }
    }

    fn qnf(&self, w: &[u16]) -> Result<Word> {
        match self.lab.kind {
            LabelKind::Qnf(_) => self.lab.qnf_of(self.p, self.g, w),
            _ => canonical_qnf_choice(self.p, self.g, w),
        }
    }

    /// Shortest rewriting sequence from `w` to `target`.
    fn path_to(&self, w: &[u16], target: &[u16]) -> Result<Path> {
        let from = self.g.id(self.p, w)?;
        let to = self.g.id(self.p, target)?;
        self.g
            .shortest_path(self.p, from, to, |_, _| true)
            .ok_or_else(|| Error::NotFound(format!("{} does not reduce to {}", self.p.show(w), self.p.show(target))))
    }

    /// A 3-cell expression from `f` to `h`, two parallel rewriting sequences.
    pub fn parallel(&mut self, f: &Path, h: &Path) -> Result<ThreeCellExpression> {
        let p = self.p;
        parallel_check(p, f, h)?;
        if !f.is_forward() || !h.is_forward() {
            return Err(Error::Invariant("fill_parallel_sphere expects rewriting sequences".into()));
        }
        let t = f.target(p);
        let k = self.path_to(&t, &self.qnf(&t)?)?;
        let x = self.fill_q(&f.then(&k), &h.then(&k), 0)?;
        Ok(x.conjugated(&Path::identity(f.source.clone()), &k.inverse(p)).with_boundary(f.clone(), h.clone()))
    }

    /// A 3-cell expression from `f` to `h`, two parallel zigzags.
    pub fn zigzag(&mut self, f: &Path, h: &Path) -> Result<ThreeCellExpression> {
        parallel_check(self.p, f, h)?;
        if equivalent(self.p, f, h) {
            return Ok(ThreeCellExpression::identity(f.clone()).with_boundary(f.clone(), h.clone()));
        }
        let yf = self.spine(f)?;
        let yh = self.spine(h)?;
        Ok(yf.then(yh.inverse()).with_boundary(f.clone(), h.clone()))
    }

    /// `f ⇛ k₀ ⋆ kₙ⁻` where `kᵢ` reduces the i-th word of `f` to the common
    /// quasi-normal form.
    fn spine(&mut self, f: &Path) -> Result<ThreeCellExpression> {
        let p = self.p;
        let words = f.words(p);
        let target = self.qnf(&words[0])?;
        let ks = words.iter().map(|w| self.path_to(w, &target)).collect::<Result<Vec<_>>>()?;
        let mut acc = ThreeCellExpression::identity(f.clone());
        for (i, s) in f.steps.iter().enumerate() {
            let (k_prev, k_next) = (&ks[i], &ks[i + 1]);
            // s ⋆ k_next ⇛ k_prev
            let x = if !s.inverse {
                self.fill_q(&Path::single(p, s.clone()).then(k_next), k_prev, 0)?
            } else {
                let r = Path::single(p, s.inverted());
                let x0 = self.fill_q(&r.then(k_prev), k_next, 0)?;
                x0.inverse()
                    .conjugated(&r.inverse(p), &Path::identity(target.clone()))
                    .with_boundary(r.inverse(p).then(k_next), k_prev.clone())
            };
            let pre = ks[0].then(&k_prev.inverse(p));
            let rest = f.suffix(p, i + 1);
            let before = pre.then(&f.suffix(p, i));
            let after = ks[0].then(&k_next.inverse(p)).then(&rest);
            let z = x.conjugated(&pre, &k_next.inverse(p).then(&rest)).with_boundary(before, after);
            acc = acc.then(z);
        }
        let spine = ks[0].then(&ks[ks.len() - 1].inverse(p));
        Ok(acc.with_boundary(f.clone(), spine))
    }

    /// Both sides end on a quasi-normal form.
    fn fill_q(&mut self, f: &Path, h: &Path, nesting: usize) -> Result<ThreeCellExpression> {
        let p = self.p;
        self.stats.calls += 1;
        self.stats.max_nesting = self.stats.max_nesting.max(nesting);
        if self.stats.calls > MAX_CALLS {
            return Err(Error::Budget(format!("sphere filling exceeded {MAX_CALLS} steps")));
        }
        if nesting > self.depth {
            return Err(Error::Budget(format!("sphere filling nested deeper than {}", self.depth)));
        }
        if equivalent(p, f, h) {
            return Ok(ThreeCellExpression::identity(f.clone()).with_boundary(f.clone(), h.clone()));
        }
        if f.is_empty() {
            return Ok(contract_loop(p, self.cells, h)?.inverse().with_boundary(f.clone(), h.clone()));
        }
        if h.is_empty() {
            return Ok(contract_loop(p, self.cells, f)?.with_boundary(f.clone(), h.clone()));
        }
        let t = f.target(p);
        let (f1, h1) = (&f.steps[0], &h.steps[0]);
        let (fr, hr) = (f.suffix(p, 1), h.suffix(p, 1));
        let (head_f, head_h) = (f.prefix(1), h.prefix(1));
        let end = Path::identity(t.clone());
        if f1 == h1 {
            let x = self.fill_q(&fr, &hr, nesting + 1)?;
            return Ok(x.conjugated(&head_f, &end).with_boundary(f.clone(), h.clone()));
        }
        let (cf, ch, gamma) = self.local_confluence(f1, h1)?;
        let k = self.path_to(&cf.target(p), &t)?;
        let (left, right) = (cf.then(&k), ch.then(&k));
        let parent = measure_pair(self.lab, p, self.g, f, h)?;
        for (a, b) in [(&fr, &left), (&right, &hr)] {
            let m = measure_pair(self.lab, p, self.g, a, b)?;
            if !multiset_less(&m, &parent, &self.lab.order) {
                if self.strict_measure {
                    return Err(Error::MeasureNotDecreasing(format!(
                        "({}, {}) from ({}, {})",
                        a.short(p),
                        b.short(p),
                        f.short(p),
                        h.short(p)
                    )));
                }
                self.stats.measure_violations += 1;
            }
        }
        let b = self.fill_q(&fr, &left, nesting + 1)?.conjugated(&head_f, &end);
        let g = gamma.conjugated(&Path::identity(f.source.clone()), &k);
        let c = self.fill_q(&right, &hr, nesting + 1)?.conjugated(&head_h, &end);
        Ok(b.then(g).then(c).with_boundary(f.clone(), h.clone()))
    }

    /// Completions `(F, H)` of the local branching `(f, h)` and a 3-cell
    /// expression `f ⋆ F ⇛ h ⋆ H`.
    fn local_confluence(&mut self, f: &Step, h: &Step) -> Result<(Path, Path, ThreeCellExpression)> {
        let p = self.p;
        let b = LocalBranching::new(p, f.clone(), h.clone());
        if b.kind == BranchingKind::Peiffer {
            let cf = Path::single(p, residual(p, f, h));
            let ch = Path::single(p, residual(p, h, f));
            let (l, r) = (Path::single(p, f.clone()).then(&cf), Path::single(p, h.clone()).then(&ch));
            return Ok((cf, ch, ThreeCellExpression::identity(l.clone()).with_boundary(l, r)));
        }
        let (u, cb, v, swapped) = decompose(p, &b).ok_or_else(|| Error::Invariant("aspherical branching".into()))?;
        let idx = self
            .provenance
            .iter()
            .position(|pr| matches!(pr, Provenance::Confluence { branching, .. } if *branching == cb))
            .ok_or_else(|| Error::MissingCell(format!("confluence of {}", cb.short(p))))?;
        if let Provenance::Confluence { diagram: Some(d), .. } = &self.provenance[idx] {
            if !u.is_empty() || !v.is_empty() {
                self.stats.whiskered_checked += 1;
                if !check_decreasing(self.lab, p, self.g, &d.whiskered(p, &u, &v), false)?.ok {
                    self.stats.whiskered_not_decreasing += 1;
                }
            }
        }
        let gamma = ThreeCellExpression::cell(p, self.cells, idx, swapped).whiskered(&u, &v);
        let cf = gamma.source.suffix(p, 1);
        let ch = gamma.target.suffix(p, 1);
        Ok((cf, ch, gamma))
    }
}

fn parallel_check(p: &Polygraph, f: &Path, h: &Path) -> Result<()> {
    f.check(p)?;
    h.check(p)?;
    if f.source != h.source || f.target(p) != h.target(p) {
        return Err(Error::IllComposed(format!("{} and {} are not parallel", f.short(p), h.short(p))));
    }
    Ok(())
}

/// `y` transported along the disjoint step `x` from the same source.
pub fn residual(p: &Polygraph, x: &Step, y: &Step) -> Step {
    let target = x.target(p);
    let pos = if y.pos() < x.pos() { y.pos() } else { y.pos() + x.output(p).len() - x.input(p).len() };
    let n = y.input(p).len();
    debug_assert_eq!(&target[pos..pos + n], &y.input(p)[..]);
    Step::forward(target[..pos].to_vec(), y.rule, target[pos + n..].to_vec())
}
