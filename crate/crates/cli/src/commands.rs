use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path as FsPath;

use polycoh::completion::{parse_extension, parse_sphere, serialize_extension, FillStats, Filler, Provenance};
use polycoh::decreasing::{
    check_context_compatibility, check_star0_compatibility, diagram_pairs, PeifferStatus,
};
use polycoh::homology::Matrix;
use polycoh::loops::LoopReport;
use polycoh::{
    abelianize, build_completion, check_boundary, check_decreasing as check_diagram, classify_termination,
    critical_branchings, enumerate_elementary_loops, find_decreasing, finiteness_report, homology as compute_homology,
    local_branchings, BranchingKind, CompletionConfig, Error, FinitenessReport, HomologyResult, Labelling, Path,
    Termination, ThreeCell, Verdict, Word,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::setup::{labelling, parse_with, session, Budgets, CliError, CliResult, Session};
use crate::{Common, Format};

fn emit<T: Serialize>(format: Format, report: &T, text: impl FnOnce(&T) -> String) {
    let out = match format {
        Format::Json => serde_json::to_string_pretty(report).expect("reports serialize") + "\n",
        Format::Text => text(report),
    };
    // a closed pipe downstream is not an error of ours
    let _ = std::io::Write::write_all(&mut std::io::stdout().lock(), out.as_bytes());
}

fn budget_line(b: &Budgets) -> String {
    format!(
        "budgets: max-word-len {} max-states {} max-depth {} ctx-bound {} peiffer-len-bound {} loop-cap {} seeds {}{}\n",
        b.max_word_len,
        b.max_states,
        b.max_depth,
        b.ctx_bound,
        b.peiffer_len_bound,
        b.loop_cap,
        b.seeds,
        b.seed_len.map(|l| format!(" (all words up to length {l})")).unwrap_or_default()
    )
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct AnalyzeReport {
    polygraph: String,
    budgets: Budgets,
    vertices: usize,
    edges: usize,
    truncated: bool,
    termination: String,
    termination_note: String,
    critical_branchings: Vec<String>,
    peiffer_branchings: usize,
    overlapping_branchings: usize,
    loops: LoopReport,
    summary: String,
}

fn termination_label(t: Termination, note: &str, rules: usize) -> String {
    match t {
        Termination::Terminating if rules == 0 => "terminating".into(),
        Termination::Terminating => note.to_string(),
        Termination::QuasiTerminatingNotTerminating => "quasi-terminating".into(),
        Termination::NotQuasiTerminating => "not quasi-terminating".into(),
        Termination::Inconclusive => "inconclusive".into(),
    }
}

pub fn analyze(c: &Common) -> CliResult<u8> {
    let s = session(c)?;
    let (p, g) = (&s.p, &s.g);
    let term = classify_termination(g);
    let cbs = critical_branchings(p);
    let (mut peiffer, mut overlapping) = (0, 0);
    for w in g.words() {
        for b in local_branchings(p, w, false) {
            match b.kind {
                BranchingKind::Peiffer => peiffer += 1,
                BranchingKind::Overlapping | BranchingKind::Critical => overlapping += 1,
                BranchingKind::Aspherical => {}
            }
        }
    }
    let loops = enumerate_elementary_loops(p, g, c.loop_cap)?;
    let label = termination_label(term.class, &term.note, p.rules.len());
    let n = loops.classes.len();
    let summary = format!(
        "{label}, {} critical branching{}, {n} elementary loop class{}",
        cbs.len(),
        if cbs.len() == 1 { "" } else { "s" },
        if n == 1 { "" } else { "es" }
    );
    let report = AnalyzeReport {
        polygraph: p.name.clone(),
        budgets: s.budgets.clone(),
        vertices: g.len(),
        edges: g.num_edges(),
        truncated: g.truncated,
        termination: label,
        termination_note: term.note.clone(),
        critical_branchings: polycoh::branchings::report_lines(p, &cbs),
        peiffer_branchings: peiffer,
        overlapping_branchings: overlapping,
        loops: LoopReport::from(&loops),
        summary,
    };
    emit(c.format, &report, |r| {
        let mut t = format!("polygraph {}\n", r.polygraph);
        t += &budget_line(&r.budgets);
        let _ = writeln!(t, "explored: {} words, {} steps{}", r.vertices, r.edges, if r.truncated { ", truncated" } else { "" });
        let _ = writeln!(t, "termination: {} ({})", r.termination, r.termination_note);
        for l in &r.critical_branchings {
            let _ = writeln!(t, "{l}");
        }
        let _ = writeln!(t, "local branchings on explored words: {} Peiffer, {} overlapping", r.peiffer_branchings, r.overlapping_branchings);
        for l in &r.loops.classes {
            let _ = writeln!(t, "{l}");
        }
        let _ = writeln!(t, "loop enumeration: {} cycles{}", r.loops.cycles, if r.loops.truncated { ", stopped at the cap" } else { "" });
        let _ = writeln!(t, "{}", r.summary);
        t
    });
    Ok(if term.class == Termination::Inconclusive || loops.truncated { 3 } else { 0 })
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CellLine {
    name: String,
    kind: polycoh::CellKind,
    source: String,
    target: String,
    origin: String,
}

#[derive(Serialize)]
struct AuditSummary {
    strict_ok: bool,
    strict_violations: Vec<String>,
    context_bound: usize,
    context_checked: usize,
    context_violations: Vec<String>,
    peiffer_len_bound: usize,
    peiffer_checked: usize,
    peiffer_passed: usize,
    peiffer_undecided: Vec<String>,
    loops: LoopReport,
    exploration_truncated: bool,
}

#[derive(Serialize)]
struct CompleteReport {
    polygraph: String,
    label: String,
    budgets: Budgets,
    cells: Vec<CellLine>,
    extension: String,
    audits: AuditSummary,
    verdict: Verdict,
    finiteness: FinitenessReport,
    summary: String,
}

fn config(c: &Common, strict: bool) -> CompletionConfig {
    CompletionConfig {
        depth: c.max_depth,
        strict,
        ctx_bound: c.ctx_bound,
        peiffer_len_bound: c.peiffer_len_bound,
        loop_cap: c.loop_cap,
        fill_depth: c.max_depth,
    }
}

fn origin(p: &polycoh::Polygraph, pr: &Provenance) -> String {
    match pr {
        Provenance::Confluence { branching, diagram } => match diagram {
            Some(d) => format!("critical branching {} via {}", branching.short(p), d.short(p)),
            None => format!("critical branching {}", branching.short(p)),
        },
        Provenance::Loop { class } => format!("loop class {class}"),
    }
}

pub fn complete(c: &Common, strict: bool, out: Option<&FsPath>) -> CliResult<u8> {
    let s = session(c)?;
    let lab = labelling(c, &s)?;
    let (p, g) = (&s.p, &s.g);
    let comp = build_completion(p, &lab, g, &config(c, strict))?;
    let extension = serialize_extension(p, &comp.cells);
    if let Some(path) = out {
        fs::write(path, &extension).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    let a = &comp.audits;
    let audits = AuditSummary {
        strict_ok: a.strict.ok,
        strict_violations: a.strict.violations.clone(),
        context_bound: a.context.bound,
        context_checked: a.context.checked,
        context_violations: a.context.violations.iter().map(|v| v.describe()).collect(),
        peiffer_len_bound: a.peiffer.len_bound,
        peiffer_checked: a.peiffer.entries.len(),
        peiffer_passed: a.peiffer.entries.iter().filter(|e| e.status == PeifferStatus::Pass).count(),
        peiffer_undecided: a
            .peiffer
            .entries
            .iter()
            .filter(|e| e.status != PeifferStatus::Pass)
            .map(|e| format!("{} on {}: {}", e.branching, e.source, e.note))
            .collect(),
        loops: a.loops.clone(),
        exploration_truncated: a.exploration_truncated,
    };
    let cbs = comp.count(polycoh::CellKind::Confluence);
    let finiteness = finiteness_report(p, &comp.loops, g.truncated, cbs, &comp.verdict);
    let summary = format!(
        "{} cells ({} confluence, {} loop), {}",
        comp.cells.len(),
        cbs,
        comp.count(polycoh::CellKind::Loop),
        comp.verdict.as_str()
    );
    let report = CompleteReport {
        polygraph: p.name.clone(),
        label: lab.name().to_string(),
        budgets: s.budgets.clone(),
        cells: comp
            .cells
            .iter()
            .zip(&comp.provenance)
            .map(|(cell, pr)| CellLine {
                name: cell.name.clone(),
                kind: cell.kind,
                source: cell.source.short(p),
                target: cell.target.short(p),
                origin: origin(p, pr),
            })
            .collect(),
        extension,
        audits,
        verdict: comp.verdict.clone(),
        finiteness,
        summary,
    };
    emit(c.format, &report, |r| {
        let mut t = format!("polygraph {} (labelling {})\n", r.polygraph, r.label);
        t += &budget_line(&r.budgets);
        for cell in &r.cells {
            let _ = writeln!(t, "{} : {} => {}    [{}]", cell.name, cell.source, cell.target, cell.origin);
        }
        let a = &r.audits;
        let _ = writeln!(t, "strict decreasingness: {}", if a.strict_ok { "ok".to_string() } else { format!("{} violation(s)", a.strict_violations.len()) });
        for v in &a.strict_violations {
            let _ = writeln!(t, "  {v}");
        }
        let _ = writeln!(
            t,
            "context compatibility up to {}: {} whiskered diagrams, {}",
            a.context_bound,
            a.context_checked,
            if a.context_violations.is_empty() { "ok".to_string() } else { format!("{} violation(s)", a.context_violations.len()) }
        );
        for v in a.context_violations.iter().take(10) {
            let _ = writeln!(t, "  {v}");
        }
        let _ = writeln!(t, "Peiffer decreasingness up to {}: {}/{} pass", a.peiffer_len_bound, a.peiffer_passed, a.peiffer_checked);
        for v in a.peiffer_undecided.iter().take(10) {
            let _ = writeln!(t, "  undecided {v}");
        }
        for l in &a.loops.classes {
            let _ = writeln!(t, "{l}");
        }
        if let Verdict::Partial(fs) = &r.verdict {
            for f in fs {
                let _ = writeln!(t, "failure: {f}");
            }
        }
        let _ = writeln!(t, "finiteness: {}", r.finiteness.note);
        let _ = writeln!(t, "{}", r.summary);
        t
    });
    Ok(if comp.verdict.is_certified() { 0 } else { 1 })
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct DiagramLine {
    branching: String,
    source: String,
    diagram: Option<String>,
    left_labels: Vec<String>,
    right_labels: Vec<String>,
    decreasing: bool,
    strict: bool,
    violations: Vec<String>,
    error: Option<String>,
}

#[derive(Serialize)]
struct CheckReport {
    polygraph: String,
    label: String,
    budgets: Budgets,
    diagrams: Vec<DiagramLine>,
    context_bound: usize,
    context_violations: Vec<String>,
    star0_passed: bool,
    star0_violations: Vec<String>,
    star0_note: String,
    all_decreasing: bool,
}

pub fn check_decreasing(c: &Common, strict: bool) -> CliResult<u8> {
    let s = session(c)?;
    let lab = labelling(c, &s)?;
    let (p, g) = (&s.p, &s.g);
    let show = |lab: &Labelling, f: &Path| -> CliResult<Vec<String>> {
        Ok(lab.labels(p, g, f)?.into_iter().map(|l| lab.show_label(p, g, l)).collect())
    };
    let mut lines = Vec::new();
    let mut diagrams = Vec::new();
    let mut search_failed = false;
    for b in critical_branchings(p) {
        match find_decreasing(&lab, p, g, &b, c.max_depth, strict) {
            Ok(d) => {
                let non_strict = check_diagram(&lab, p, g, &d, false)?;
                let strict_check = check_diagram(&lab, p, g, &d, true)?;
                lines.push(DiagramLine {
                    branching: b.short(p),
                    source: p.show(&b.source),
                    diagram: Some(d.short(p)),
                    left_labels: show(&lab, &d.left(p))?,
                    right_labels: show(&lab, &d.right(p))?,
                    decreasing: non_strict.ok,
                    strict: strict_check.ok,
                    violations: strict_check.violations.iter().map(|v| v.describe()).collect(),
                    error: None,
                });
                diagrams.push(d);
            }
            Err(e @ (Error::NotFound(_) | Error::TruncatedRegion(_))) => {
                search_failed = true;
                lines.push(DiagramLine {
                    branching: b.short(p),
                    source: p.show(&b.source),
                    diagram: None,
                    left_labels: Vec::new(),
                    right_labels: Vec::new(),
                    decreasing: false,
                    strict: false,
                    violations: Vec::new(),
                    error: Some(e.to_string()),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    let ctx = check_context_compatibility(&lab, p, g, &diagrams, c.ctx_bound, strict)?;
    let star0 = check_star0_compatibility(&lab, p, g, c.ctx_bound, &diagram_pairs(&diagrams))?;
    let all_decreasing = !search_failed && lines.iter().all(|l| if strict { l.strict } else { l.decreasing });
    let report = CheckReport {
        polygraph: p.name.clone(),
        label: lab.name().to_string(),
        budgets: s.budgets.clone(),
        diagrams: lines,
        context_bound: c.ctx_bound,
        context_violations: ctx.violations.iter().map(|v| v.describe()).collect(),
        star0_passed: star0.passed,
        star0_violations: star0.violations.clone(),
        star0_note: star0.note.clone(),
        all_decreasing,
    };
    emit(c.format, &report, |r| {
        let mut t = format!("polygraph {} (labelling {})\n", r.polygraph, r.label);
        t += &budget_line(&r.budgets);
        for d in &r.diagrams {
            match &d.diagram {
                Some(shape) => {
                    let _ = writeln!(
                        t,
                        "{} on {}: {}  labels [{}] / [{}]  {}{}",
                        d.branching,
                        d.source,
                        shape,
                        d.left_labels.join(" "),
                        d.right_labels.join(" "),
                        if d.decreasing { "decreasing" } else { "NOT decreasing" },
                        if d.strict { ", strict" } else { "" }
                    );
                    for v in &d.violations {
                        let _ = writeln!(t, "  {v}");
                    }
                }
                None => {
                    let _ = writeln!(t, "{} on {}: {}", d.branching, d.source, d.error.as_deref().unwrap_or(""));
                }
            }
        }
        let _ = writeln!(
            t,
            "context compatibility up to {}: {}",
            r.context_bound,
            if r.context_violations.is_empty() { "ok".to_string() } else { format!("{} violation(s)", r.context_violations.len()) }
        );
        for v in r.context_violations.iter().take(10) {
            let _ = writeln!(t, "  {v}");
        }
        let _ = writeln!(t, "star0 compatibility: {} ({})", if r.star0_passed { "ok" } else { "violated" }, r.star0_note);
        for v in r.star0_violations.iter().take(10) {
            let _ = writeln!(t, "  {v}");
        }
        let _ = writeln!(t, "{}", if r.all_decreasing { "all critical branchings decreasing" } else { "not all critical branchings decreasing" });
        t
    });
    Ok(if search_failed {
        4
    } else if all_decreasing {
        0
    } else {
        1
    })
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FillReport {
    polygraph: String,
    budgets: Budgets,
    cells_from: String,
    spheres: Vec<FillLine>,
    filled: usize,
    sound: usize,
    seed: Option<u64>,
    stats: FillStats,
}

#[derive(Serialize)]
struct FillLine {
    source: String,
    target: String,
    expression: String,
    cells_used: Vec<String>,
    boundary_ok: bool,
}

fn random_forward(s: &Session, rng: &mut ChaCha8Rng, from: &Word, len: usize) -> Path {
    let (p, g) = (&s.p, &s.g);
    let mut f = Path::identity(from.clone());
    for _ in 0..len {
        let Some(v) = g.vertex(&f.target(p)) else { break };
        let es = g.edges(v);
        if es.is_empty() {
            break;
        }
        f.steps.push(g.step(p, v, &es[rng.gen_range(0..es.len())]));
    }
    f
}

pub fn fill_sphere(c: &Common, sphere: Option<&FsPath>, random: Option<usize>) -> CliResult<u8> {
    let s = session(c)?;
    let lab = labelling(c, &s)?;
    let (p, g) = (&s.p, &s.g);
    let (cells, provenance, cells_from): (Vec<ThreeCell>, Vec<Provenance>, String) = match &c.cells {
        Some(path) => {
            let (cells, prov) = parse_with(path, |t| parse_extension(p, t))?;
            (cells, prov, path.display().to_string())
        }
        None => {
            let comp = build_completion(p, &lab, g, &config(c, false))?;
            (comp.cells, comp.provenance, "completion built from the labelling".into())
        }
    };
    let pairs: Vec<(Path, Path)> = match (sphere, random) {
        (Some(path), None) => vec![parse_with(path, |t| parse_sphere(p, t))?],
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            let words: Vec<Word> = g.words().iter().filter(|w| g.vertex(w).is_some_and(|v| g.is_complete(v))).cloned().collect();
            let mut by_end: HashMap<(Word, Word), Path> = HashMap::new();
            let mut out = Vec::new();
            let mut attempts = 0;
            while out.len() < n && attempts < 200 * n.max(1) && !words.is_empty() {
                attempts += 1;
                let w = &words[rng.gen_range(0..words.len())];
                let len = rng.gen_range(0..=6);
                let f = random_forward(&s, &mut rng, w, len);
                let key = (f.source.clone(), f.target(p));
                match by_end.get(&key) {
                    Some(h) if *h != f => out.push((f, h.clone())),
                    Some(_) => {}
                    None => {
                        by_end.insert(key, f);
                    }
                }
            }
            out
        }
        _ => return Err(CliError::Usage("give either a sphere file or --random N".into())),
    };
    let mut lines = Vec::new();
    let mut stats = FillStats::default();
    for (f, h) in &pairs {
        let mut filler = Filler::new(p, &lab, g, &cells, &provenance, c.max_depth);
        let e = if f.is_forward() && h.is_forward() { filler.parallel(f, h)? } else { filler.zigzag(f, h)? };
        let boundary_ok = check_boundary(p, &cells, &e).map(|(a, b)| a == *f && b == *h).unwrap_or(false);
        stats.calls += filler.stats.calls;
        stats.max_nesting = stats.max_nesting.max(filler.stats.max_nesting);
        stats.measure_violations += filler.stats.measure_violations;
        stats.whiskered_checked += filler.stats.whiskered_checked;
        stats.whiskered_not_decreasing += filler.stats.whiskered_not_decreasing;
        lines.push(FillLine {
            source: f.short(p),
            target: h.short(p),
            expression: e.show(p, &cells),
            cells_used: e.cells_used(&cells).into_iter().map(str::to_string).collect(),
            boundary_ok,
        });
    }
    let sound = lines.iter().filter(|l| l.boundary_ok).count();
    let report = FillReport {
        polygraph: p.name.clone(),
        budgets: s.budgets.clone(),
        cells_from,
        filled: lines.len(),
        sound,
        spheres: lines,
        seed: random.map(|_| c.seed),
        stats,
    };
    emit(c.format, &report, |r| {
        let mut t = format!("polygraph {} (cells: {})\n", r.polygraph, r.cells_from);
        for l in &r.spheres {
            let _ = writeln!(t, "sphere {} => {}", l.source, l.target);
            let _ = writeln!(t, "  {}", l.expression);
            let _ = writeln!(t, "  boundary {}", if l.boundary_ok { "verified" } else { "MISMATCH" });
        }
        let _ = writeln!(t, "{} sphere(s) filled, {} verified", r.filled, r.sound);
        t
    });
    Ok(if sound == report.filled { 0 } else { 4 })
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct HomologyReport {
    polygraph: String,
    generators: Vec<String>,
    rules: Vec<String>,
    cells: Vec<String>,
    delta2: Vec<Vec<String>>,
    delta3: Vec<Vec<String>>,
    homology: HomologyResult,
    groups: Vec<String>,
}

pub fn homology(c: &Common) -> CliResult<u8> {
    let p = parse_with(&c.input, polycoh::parse_polygraph)?;
    let cells = match &c.cells {
        Some(path) => parse_with(path, |t| parse_extension(&p, t))?.0,
        None => Vec::new(),
    };
    let cx = abelianize(&p, &cells);
    let h = compute_homology(&cx)?;
    let report = HomologyReport {
        polygraph: p.name.clone(),
        generators: cx.generators.clone(),
        rules: cx.rules.clone(),
        cells: cx.cells.clone(),
        delta2: entries(&cx.delta2),
        delta3: entries(&cx.delta3),
        groups: h.lines(),
        homology: h,
    };
    emit(c.format, &report, |r| {
        let mut t = format!("polygraph {}: {} generators, {} rules, {} cells\n", r.polygraph, r.generators.len(), r.rules.len(), r.cells.len());
        dump(&mut t, "delta2 (generators x rules)", &r.delta2, r.rules.len());
        dump(&mut t, "delta3 (rules x cells)", &r.delta3, r.cells.len());
        for l in &r.groups {
            let _ = writeln!(t, "{l}");
        }
        t
    });
    Ok(0)
}

fn entries(m: &Matrix) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

fn dump(t: &mut String, title: &str, m: &[Vec<String>], cols: usize) {
    let _ = writeln!(t, "{title}, {}x{cols}:", m.len());
    if cols == 0 {
        return;
    }
    let width = m.iter().flatten().map(String::len).max().unwrap_or(1);
    for row in m {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
        let _ = writeln!(t, "  {}", cells.join(" "));
    }
}
