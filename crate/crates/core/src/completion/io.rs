//! Extension files (`cell NAME : ZIGZAG => ZIGZAG`) and sphere queries
//! (`ZIGZAG => ZIGZAG`).

use crate::branchings::LocalBranching;
use crate::engine::Path;
use crate::loops::{canonical_rotation, serialize_loop};
use crate::polygraph::{ParseError, ParseErrorKind, Polygraph};

use super::{CellKind, Provenance, ThreeCell};

pub fn serialize_extension(p: &Polygraph, cells: &[ThreeCell]) -> String {
    cells.iter().map(|c| format!("cell {} : {} => {}\n", c.name, c.source.show(p), c.target.show(p))).collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn zigzag_pair(p: &Polygraph, ln: usize, body: &str) -> Result<(Path, Path), ParseError> {
    let (a, b) = body
        .split_once("=>")
        .ok_or_else(|| ParseError::new(ln, 1, ParseErrorKind::Expected("`ZIGZAG => ZIGZAG`")))?;
    let col_b = body.find("=>").unwrap_or(0) + 3;
    let s = Path::parse(p, a).map_err(|k| ParseError::new(ln, 1, k))?;
    let t = Path::parse(p, b).map_err(|k| ParseError::new(ln, col_b, k))?;
    if s.source != t.source || s.target(p) != t.target(p) {
        return Err(ParseError::new(ln, 1, ParseErrorKind::Other("source and target are not parallel".into())));
    }
    Ok((s, t))
}

/// Cells of an extension file. A forward loop contracted to an identity is
/// a loop cell; anything else is a confluence cell, attributed to the
/// branching formed by its two first steps when that makes sense.
pub fn parse_extension(p: &Polygraph, text: &str) -> Result<(Vec<ThreeCell>, Vec<Provenance>), ParseError> {
    let mut cells: Vec<ThreeCell> = Vec::new();
    let mut provenance = Vec::new();
    for (ln, line) in content_lines(text) {
        let rest = line
            .strip_prefix("cell ")
            .ok_or_else(|| ParseError::new(ln, 1, ParseErrorKind::Expected("`cell NAME : ZIGZAG => ZIGZAG`")))?;
        let (name, body) =
            rest.split_once(':').ok_or_else(|| ParseError::new(ln, 6, ParseErrorKind::Expected("`:`")))?;
        let name = name.trim().to_string();
        if name.is_empty() || cells.iter().any(|c| c.name == name) {
            return Err(ParseError::new(ln, 6, ParseErrorKind::Other(format!("bad or duplicate cell name `{name}`"))));
        }
        let (source, target) = zigzag_pair(p, ln, body)?;
        let is_loop = target.is_empty() && source.is_forward() && !source.is_empty();
        let (kind, prov) = if is_loop {
            (CellKind::Loop, Provenance::Loop { class: serialize_loop(p, &canonical_rotation(p, &source)) })
        } else {
            let branching = match (source.steps.first(), target.steps.first()) {
                (Some(a), Some(b)) if !a.inverse && !b.inverse && a != b => LocalBranching::new(p, a.clone(), b.clone()),
                _ => {
                    return Err(ParseError::new(
                        ln,
                        1,
                        ParseErrorKind::Other("a cell must be a loop contraction or start with two distinct steps".into()),
                    ))
                }
            };
            (CellKind::Confluence, Provenance::Confluence { branching, diagram: None })
        };
        cells.push(ThreeCell { name, source, target, kind });
        provenance.push(prov);
    }
    Ok((cells, provenance))
}

/// The first non-comment line, optionally prefixed by `sphere :`.
pub fn parse_sphere(p: &Polygraph, text: &str) -> Result<(Path, Path), ParseError> {
    let (ln, line) = content_lines(text)
        .next()
        .ok_or_else(|| ParseError::new(1, 1, ParseErrorKind::Expected("`ZIGZAG => ZIGZAG`")))?;
    let body = line.strip_prefix("sphere").map(|r| r.trim_start().trim_start_matches(':')).unwrap_or(line);
    zigzag_pair(p, ln, body)
}
