//! Coherent completions: confluence cells from decreasing diagrams, loop
//! cells from elementary loops, and filling of 2-spheres.

pub mod expr;
pub mod fill;
pub mod io;

use serde::Serialize;

use crate::branchings::{critical_branchings, LocalBranching};
use crate::decreasing::{
    check_context_compatibility, check_decreasing, check_peiffer_decreasing, find_decreasing, ContextReport,
    DecreasingDiagram, PeifferCandidate, PeifferReport,
};
use crate::engine::{Path, ReductionGraph};
use crate::error::Result;
use crate::labelling::Labelling;
use crate::loops::{enumerate_elementary_loops, LoopEnumeration, LoopReport};
use crate::polygraph::Polygraph;

pub use expr::{check_boundary, Term, ThreeCellExpression};
pub use fill::{FillStats, Filler};
pub use io::{parse_extension, parse_sphere, serialize_extension};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Confluence,
    Loop,
}

/// A generating 3-cell `source ⇛ target` between parallel zigzags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeCell {
    pub name: String,
    pub source: Path,
    pub target: Path,
    pub kind: CellKind,
}

impl ThreeCell {
    pub fn is_globular(&self, p: &Polygraph) -> bool {
        self.source.source == self.target.source && self.source.target(p) == self.target.target(p)
    }
}

/// Where a cell comes from. Cells read back from a file carry no diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Provenance {
    Confluence { branching: LocalBranching, diagram: Option<DecreasingDiagram> },
    Loop { class: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CompletionConfig {
    /// Search depth for confluence diagrams.
    pub depth: usize,
    pub strict: bool,
    pub ctx_bound: usize,
    pub peiffer_len_bound: usize,
    pub loop_cap: usize,
    /// Nesting budget of the sphere filler used for Peiffer witnesses.
    pub fill_depth: usize,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        CompletionConfig { depth: 64, strict: false, ctx_bound: 2, peiffer_len_bound: 6, loop_cap: 10_000, fill_depth: 64 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StrictAudit {
    pub ok: bool,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Audits {
    pub strict: StrictAudit,
    pub context: ContextReport,
    pub peiffer: PeifferReport,
    pub loops: LoopReport,
    pub exploration_truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "failures", rename_all = "UPPERCASE")]
pub enum Verdict {
    Certified,
    Partial(Vec<String>),
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        *self == Verdict::Certified
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Certified => "CERTIFIED",
            Verdict::Partial(_) => "PARTIAL",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoherentPresentation {
    pub base: Polygraph,
    pub cells: Vec<ThreeCell>,
    pub provenance: Vec<Provenance>,
    pub loops: LoopEnumeration,
    pub audits: Audits,
    pub verdict: Verdict,
}

impl CoherentPresentation {
    pub fn count(&self, kind: CellKind) -> usize {
        self.cells.iter().filter(|c| c.kind == kind).count()
    }

    pub fn diagrams(&self) -> Vec<&DecreasingDiagram> {
        self.provenance
            .iter()
            .filter_map(|pr| match pr {
                Provenance::Confluence { diagram: Some(d), .. } => Some(d),
                _ => None,
            })
            .collect()
    }

    pub fn filler<'a>(&'a self, lab: &'a Labelling, g: &'a ReductionGraph, depth: usize) -> Filler<'a> {
        Filler::new(&self.base, lab, g, &self.cells, &self.provenance, depth)
    }
}

/// One confluence cell `D_k` per critical branching, one loop cell `E_k`
/// per class of elementary loops, and the audits deciding the verdict.
pub fn build_completion(
    p: &Polygraph,
    lab: &Labelling,
    g: &ReductionGraph,
    cfg: &CompletionConfig,
) -> Result<CoherentPresentation> {
    let mut cells = Vec::new();
    let mut provenance = Vec::new();
    let mut diagrams = Vec::new();
    for (i, b) in critical_branchings(p).into_iter().enumerate() {
        let d = find_decreasing(lab, p, g, &b, cfg.depth, cfg.strict)?;
        cells.push(ThreeCell { name: format!("D{}", i + 1), source: d.left(p), target: d.right(p), kind: CellKind::Confluence });
        provenance.push(Provenance::Confluence { branching: b, diagram: Some(d.clone()) });
        diagrams.push(d);
    }
    let loops = enumerate_elementary_loops(p, g, cfg.loop_cap)?;
    for (i, c) in loops.classes.iter().enumerate() {
        cells.push(ThreeCell {
            name: format!("E{}", i + 1),
            source: c.representative.clone(),
            target: Path::identity(c.representative.source.clone()),
            kind: CellKind::Loop,
        });
        provenance.push(Provenance::Loop { class: c.canonical.clone() });
    }

    let mut strict_violations = Vec::new();
    for d in &diagrams {
        for v in check_decreasing(lab, p, g, d, true)?.violations {
            strict_violations.push(v.describe());
        }
    }
    let strict = StrictAudit { ok: strict_violations.is_empty(), violations: strict_violations };
    let context = check_context_compatibility(lab, p, g, &diagrams, cfg.ctx_bound, false)?;
    let witness = |c: &PeifferCandidate| -> Result<String> {
        let mut filler = Filler::new(p, lab, g, &cells, &provenance, cfg.fill_depth);
        let left = Path::single(p, c.branching.first.clone()).then(&c.left);
        let right = Path::single(p, c.branching.second.clone()).then(&c.right);
        let e = filler.zigzag(&left, &right)?;
        check_boundary(p, &cells, &e)?;
        Ok(e.show(p, &cells))
    };
    let peiffer = check_peiffer_decreasing(lab, p, g, cfg.peiffer_len_bound, Some(&witness))?;

    let mut failures = Vec::new();
    if !strict.ok {
        failures.push(format!("strict decreasingness: {} violation(s)", strict.violations.len()));
    }
    if !context.verified {
        failures.push(format!(
            "context compatibility up to {}: {} violation(s), first {}",
            cfg.ctx_bound,
            context.violations.len(),
            context.violations[0].describe()
        ));
    }
    if !peiffer.all_pass {
        let undecided = peiffer.entries.iter().filter(|e| e.status != crate::decreasing::PeifferStatus::Pass).count();
        failures.push(format!("Peiffer decreasingness up to {}: {undecided} undecided", cfg.peiffer_len_bound));
    }
    if loops.truncated {
        failures.push(format!("loop enumeration stopped at the cap of {} cycles", cfg.loop_cap));
    }
    if g.truncated {
        failures.push("exploration truncated: loop classes are complete only on the explored region".into());
    }
    let audits = Audits { strict, context, peiffer, loops: LoopReport::from(&loops), exploration_truncated: g.truncated };
    let verdict = if failures.is_empty() { Verdict::Certified } else { Verdict::Partial(failures) };
    Ok(CoherentPresentation { base: p.clone(), cells, provenance, loops, audits, verdict })
}

/// See [`Filler::parallel`].
pub fn fill_parallel_sphere(
    c: &CoherentPresentation,
    lab: &Labelling,
    g: &ReductionGraph,
    f: &Path,
    h: &Path,
    depth: usize,
) -> Result<ThreeCellExpression> {
    c.filler(lab, g, depth).parallel(f, h)
}

/// See [`Filler::zigzag`].
pub fn fill_zigzag_sphere(
    c: &CoherentPresentation,
    lab: &Labelling,
    g: &ReductionGraph,
    f: &Path,
    h: &Path,
    depth: usize,
) -> Result<ThreeCellExpression> {
    c.filler(lab, g, depth).zigzag(f, h)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::decreasing::tests::b3_qnf;
    use crate::engine::{explore, ExplorationBudget, Step};
    use crate::labelling::QnfChoice;
    use crate::polygraph::{all_words, Word};

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

    fn b3_setup(n: usize) -> (Polygraph, ReductionGraph, Labelling) {
        let p = b3();
        let g = explore(&p, &all_words(&p, n), ExplorationBudget::default());
        let lab = Labelling::qnf(QnfChoice::Map(b3_qnf(&p, &g)));
        (p, g, lab)
    }

    fn path(p: &Polygraph, s: &str) -> Path {
        Path::parse(p, s).unwrap()
    }

    fn b3_completion() -> (Polygraph, ReductionGraph, Labelling, CoherentPresentation) {
        let (p, g, lab) = b3_setup(7);
        let c = build_completion(&p, &lab, &g, &CompletionConfig::default()).unwrap();
        (p, g, lab, c)
    }

    #[test]
    fn b3_cells() {
        let (p, _, _, c) = b3_completion();
        let shown: Vec<String> =
            c.cells.iter().map(|x| format!("{}: {} => {}", x.name, x.source.short(&p), x.target.short(&p))).collect();
        assert_eq!(
            shown,
            vec![
                "D1: alphat·betat => sbeta·salpha",
                "D2: betas => talpha·tbeta·betas",
                "D3: alphats·betats => stalpha·stbeta",
                "D4: betast => tsbeta·tsalpha·betast",
                "E1: alpha·beta => 1_sts",
            ]
        );
        assert!(c.cells.iter().all(|x| x.is_globular(&p)));
        assert_eq!((c.count(CellKind::Confluence), c.count(CellKind::Loop)), (4, 1));
        assert!(c.audits.strict.ok);
        assert!(c.audits.peiffer.all_pass, "{:?}", c.audits.peiffer.entries.iter().find(|e| e.status != crate::decreasing::PeifferStatus::Pass));
        // the whiskered fourth diagram is not decreasing
        assert!(!c.audits.context.verified);
        assert_eq!(c.verdict.as_str(), "PARTIAL");
    }

    #[test]
    fn boundaries() {
        let (p, _, _, c) = b3_completion();
        let d1 = ThreeCellExpression::cell(&p, &c.cells, 0, false);
        let (s, t) = check_boundary(&p, &c.cells, &d1).unwrap();
        assert_eq!((s.short(&p), t.short(&p)), ("alphat·betat".into(), "sbeta·salpha".into()));
        let u = p.parse_word("st").unwrap();
        let (s, t) = check_boundary(&p, &c.cells, &ThreeCellExpression::identity(Path::identity(u.clone()))).unwrap();
        assert!(s.is_empty() && t.is_empty() && s.source == u);
        let e = ThreeCellExpression::cell(&p, &c.cells, 4, false).whiskered(&[], &p.parse_word("t").unwrap());
        let (s, t) = check_boundary(&p, &c.cells, &e).unwrap();
        assert_eq!((s.short(&p), t.short(&p)), ("alphat·betat".into(), "1_stst".into()));
        let bad = e.clone().with_boundary(path(&p, "|alpha|t"), path(&p, "|alpha|t"));
        assert!(matches!(check_boundary(&p, &c.cells, &bad), Err(crate::Error::IllComposed(_))));
    }

    #[test]
    fn fills() {
        let (p, g, lab, c) = b3_completion();
        let f = path(&p, "|alpha|t;|beta|t");
        let h = path(&p, "s|beta|;s|alpha|");
        let e = fill_parallel_sphere(&c, &lab, &g, &f, &h, 64).unwrap();
        assert_eq!(e.cells_used(&c.cells), vec!["D1"]);
        assert_eq!(check_boundary(&p, &c.cells, &e).unwrap(), (f.clone(), h));
        assert!(fill_parallel_sphere(&c, &lab, &g, &f, &f, 64).unwrap().is_identity());
        let l = path(&p, "|alpha|;|beta|");
        let e = fill_parallel_sphere(&c, &lab, &g, &l, &Path::identity(l.source.clone()), 64).unwrap();
        assert_eq!(e.cells_used(&c.cells), vec!["E1"]);
        let a = path(&p, "|alpha|");
        let b = path(&p, "|beta|-");
        let e = fill_zigzag_sphere(&c, &lab, &g, &a, &b, 64).unwrap();
        assert_eq!(check_boundary(&p, &c.cells, &e).unwrap(), (a.clone(), b));
        assert!(e.cells_used(&c.cells).contains(&"E1"));
        assert!(fill_zigzag_sphere(&c, &lab, &g, &a, &a, 64).unwrap().is_identity());
    }

    fn random_path(p: &Polygraph, g: &ReductionGraph, rng: &mut ChaCha8Rng, from: &Word, len: usize, zig: bool) -> Path {
        let mut f = Path::identity(from.clone());
        for _ in 0..len {
            let v = g.vertex(&f.target(p)).unwrap();
            let mut opts: Vec<Step> = g.edges(v).iter().map(|e| g.step(p, v, e)).collect();
            if zig {
                for (u, es) in (0..g.len()).map(|u| (u, g.edges(u))) {
                    for e in es.iter().filter(|e| e.target == v) {
                        opts.push(g.step(p, u, e).inverted());
                    }
                }
            }
            if opts.is_empty() {
                break;
            }
            f.steps.push(opts[rng.gen_range(0..opts.len())].clone());
        }
        f
    }

    #[test]
    fn random_spheres() {
        let (p, g, lab, c) = b3_completion();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let words: Vec<Word> = all_words(&p, 6).into_iter().filter(|w| w.len() >= 3).collect();
        let mut by_end: HashMap<(Word, Word), Vec<Path>> = HashMap::new();
        for _ in 0..3000 {
            let w = &words[rng.gen_range(0..words.len())];
            let len = rng.gen_range(0..6);
            let f = random_path(&p, &g, &mut rng, w, len, false);
            by_end.entry((f.source.clone(), f.target(&p))).or_default().push(f);
        }
        let mut n = 0;
        let mut stats = FillStats::default();
        for fs in by_end.values().filter(|v| v.len() > 1) {
            let (f, h) = (&fs[0], &fs[1]);
            let mut filler = c.filler(&lab, &g, 64);
            let e = filler.parallel(f, h).unwrap_or_else(|err| panic!("{} / {}: {err}", f.short(&p), h.short(&p)));
            assert_eq!(check_boundary(&p, &c.cells, &e).unwrap(), (f.clone(), h.clone()));
            stats.measure_violations += filler.stats.measure_violations;
            stats.calls += filler.stats.calls;
            n += 1;
        }
        assert!(n > 50);
        for _ in 0..100 {
            let w = &words[rng.gen_range(0..words.len())];
            let f = random_path(&p, &g, &mut rng, w, 3, true);
            let h = random_path(&p, &g, &mut rng, w, 3, true);
            let t = f.target(&p);
            let Some(k) = g.shortest_path(&p, g.vertex(&h.target(&p)).unwrap(), g.vertex(&t).unwrap(), |_, _| true)
            else { continue };
            let h = h.then(&k);
            let e = c.filler(&lab, &g, 64).zigzag(&f, &h).unwrap();
            assert_eq!(check_boundary(&p, &c.cells, &e).unwrap(), (f, h));
        }
        eprintln!("{n} spheres, {stats:?}");
    }

    #[test]
    fn rule_free() {
        let p = Polygraph::from_rules("free1", "x", &[]).unwrap();
        let g = explore(&p, &all_words(&p, 3), ExplorationBudget::default());
        let c = build_completion(&p, &Labelling::singleton(), &g, &CompletionConfig::default()).unwrap();
        assert!(c.cells.is_empty());
        assert!(c.verdict.is_certified());
    }

    #[test]
    fn upsilon_nf() {
        let p = upsilon();
        let g = explore(&p, &all_words(&p, 6), ExplorationBudget::default());
        let lab = Labelling::nf(&p, &g).unwrap();
        let c = build_completion(&p, &lab, &g, &CompletionConfig::default()).unwrap();
        assert_eq!(c.count(CellKind::Loop), 0);
        assert!(c.verdict.is_certified(), "{:?}", c.verdict);
    }

    #[test]
    fn extension_round_trip() {
        let (p, _, _, c) = b3_completion();
        let text = serialize_extension(&p, &c.cells);
        assert!(text.starts_with("cell D1 : 1|alpha|t;1|beta|t => s|beta|1;s|alpha|1\n"), "{text}");
        let (cells, prov) = parse_extension(&p, &text).unwrap();
        assert_eq!(cells, c.cells);
        assert!(matches!(&prov[4], Provenance::Loop { .. }));
        assert!(parse_extension(&p, "cell X : |alpha| => |alpha|t").is_err());
        let (a, b) = parse_sphere(&p, "# query\nsphere : |alpha| => |beta|-\n").unwrap();
        assert_eq!((a.len(), b.steps[0].inverse), (1, true));
    }
}
