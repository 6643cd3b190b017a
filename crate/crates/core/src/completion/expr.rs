//! Expressions of the free (3,1)-category on a set of 3-cells, and their
//! evaluation.

use std::fmt::Write as _;

use crate::engine::{equivalent, Path};
use crate::error::{Error, Result};
use crate::polygraph::{Polygraph, Word};

use super::ThreeCell;

/// One generating 3-cell (or its inverse) in context:
/// `pre ⋆ left·C·right ⋆ post`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub pre: Path,
    pub left: Word,
    pub cell: usize,
    pub inverse: bool,
    pub right: Word,
    pub post: Path,
}

impl Term {
    fn side(&self, cells: &[ThreeCell], target: bool) -> Result<Path> {
        let c = cells.get(self.cell).ok_or_else(|| Error::MissingCell(format!("#{}", self.cell)))?;
        let core = if target != self.inverse { &c.target } else { &c.source };
        Ok(self.pre.then(&core.whiskered(&self.left, &self.right)).then(&self.post))
    }

    pub fn source(&self, cells: &[ThreeCell]) -> Result<Path> {
        self.side(cells, false)
    }

    pub fn target(&self, cells: &[ThreeCell]) -> Result<Path> {
        self.side(cells, true)
    }
}

/// A composite of whiskered, conjugated generating 3-cells, read as a chain
/// of rewrites of 2-cells from `source` to `target`. Junctions are compared
/// up to equality in the free (2,1)-category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeCellExpression {
    pub source: Path,
    pub target: Path,
    pub terms: Vec<Term>,
}

impl ThreeCellExpression {
    pub fn identity(f: Path) -> Self {
        ThreeCellExpression { source: f.clone(), target: f, terms: Vec::new() }
    }

    pub fn cell(p: &Polygraph, cells: &[ThreeCell], index: usize, inverse: bool) -> Self {
        let c = &cells[index];
        let (s, t) = if inverse { (&c.target, &c.source) } else { (&c.source, &c.target) };
        ThreeCellExpression {
            source: s.clone(),
            target: t.clone(),
            terms: vec![Term {
                pre: Path::identity(s.source.clone()),
                left: Vec::new(),
                cell: index,
                inverse,
                right: Vec::new(),
                post: Path::identity(t.target(p)),
            }],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Relabels the endpoints with equivalent 2-cells.
    pub fn with_boundary(mut self, source: Path, target: Path) -> Self {
        self.source = source;
        self.target = target;
        self
    }

    /// `self` then `other`; `other.source` must be equivalent to `self.target`.
    pub fn then(mut self, other: ThreeCellExpression) -> Self {
        self.terms.extend(other.terms);
        self.target = other.target;
        self
    }

    pub fn inverse(&self) -> Self {
        let terms = self.terms.iter().rev().map(|t| Term { inverse: !t.inverse, ..t.clone() }).collect();
        ThreeCellExpression { source: self.target.clone(), target: self.source.clone(), terms }
    }

    /// `u·self·v`.
    pub fn whiskered(&self, u: &[u16], v: &[u16]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                pre: t.pre.whiskered(u, v),
                left: [u, t.left.as_slice()].concat(),
                cell: t.cell,
                inverse: t.inverse,
                right: [t.right.as_slice(), v].concat(),
                post: t.post.whiskered(u, v),
            })
            .collect();
        ThreeCellExpression { source: self.source.whiskered(u, v), target: self.target.whiskered(u, v), terms }
    }

    /// `a ⋆ self ⋆ b`.
    pub fn conjugated(&self, a: &Path, b: &Path) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { pre: a.then(&t.pre), post: t.post.then(b), ..t.clone() })
            .collect();
        ThreeCellExpression { source: a.then(&self.source).then(b), target: a.then(&self.target).then(b), terms }
    }

    /// From `P⁻` to `Q⁻`, given `self : P ⇛ Q`.
    pub fn reversed_sides(&self, p: &Polygraph) -> Self {
        let (pi, qi) = (self.source.inverse(p), self.target.inverse(p));
        // P⁻ ≡ P⁻⋆Q⋆Q⁻ ⇛ P⁻⋆P⋆Q⁻ ≡ Q⁻
        self.inverse().conjugated(&pi, &qi).with_boundary(pi, qi)
    }

    /// `name` terms: `pre ⋆ u·D1⁻·v ⋆ post`, identity parts omitted.
    pub fn show(&self, p: &Polygraph, cells: &[ThreeCell]) -> String {
        if self.terms.is_empty() {
            return format!("1_({})", self.source.short(p));
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let mut s = String::new();
                if !t.pre.is_empty() {
                    let _ = write!(s, "{} ⋆ ", t.pre.short(p));
                }
                if !t.left.is_empty() {
                    let _ = write!(s, "{}·", p.show(&t.left));
                }
                s.push_str(cells.get(t.cell).map_or("?", |c| c.name.as_str()));
                if t.inverse {
                    s.push('⁻');
                }
                if !t.right.is_empty() {
                    let _ = write!(s, "·{}", p.show(&t.right));
                }
                if !t.post.is_empty() {
                    let _ = write!(s, " ⋆ {}", t.post.short(p));
                }
                s
            })
            .collect();
        parts.join(" ; ")
    }

    /// Names of the generating cells used, with multiplicity, in order.
    pub fn cells_used<'a>(&self, cells: &'a [ThreeCell]) -> Vec<&'a str> {
        self.terms.iter().map(|t| cells[t.cell].name.as_str()).collect()
    }
}

/// Evaluates the expression: every term must start where the previous one
/// ended (up to equality of 2-cells), and the last must end at `target`.
/// Returns the 2-source and 2-target.
pub fn check_boundary(p: &Polygraph, cells: &[ThreeCell], e: &ThreeCellExpression) -> Result<(Path, Path)> {
    e.source.check(p)?;
    e.target.check(p)?;
    if e.source.source != e.target.source || e.source.target(p) != e.target.target(p) {
        return Err(Error::IllComposed("source and target are not parallel".into()));
    }
    let mut cur = e.source.clone();
    for (i, t) in e.terms.iter().enumerate() {
        let s = t.source(cells)?;
        s.check(p).map_err(|err| Error::IllComposed(format!("term {i}: {err}")))?;
        if !equivalent(p, &cur, &s) {
            return Err(Error::IllComposed(format!(
                "junction {i}: {} does not match {}",
                cur.short(p),
                s.short(p)
            )));
        }
        cur = t.target(cells)?;
    }
    if !equivalent(p, &cur, &e.target) {
        return Err(Error::IllComposed(format!(
            "end: {} does not match {}",
            cur.short(p),
            e.target.short(p)
        )));
    }
    Ok((e.source.clone(), e.target.clone()))
}
