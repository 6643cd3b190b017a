//! Presentations of monoids by generators and oriented rules, and their text format.
//!
//! ```text
//! polygraph B3
//! gens s t
//! rule alpha : s t s => t s t
//! rule beta : t s t => s t s
//! ```

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of a generator in its polygraph.
pub type Letter = u16;

/// A word of the free monoid, as generator indices.
pub type Word = Vec<Letter>;

/// Token reserved for the empty word.
pub const EMPTY_WORD: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub lhs: Word,
    pub rhs: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polygraph {
    pub name: String,
    pub generators: Vec<String>,
    pub rules: Vec<Rule>,
    gen_index: HashMap<String, Letter>,
    rule_index: HashMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("duplicate rule `{0}`")]
    DuplicateRule(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("rule `{0}` has an empty left-hand side")]
    EmptyLhs(String),
    #[error("invalid generator name `{0}`")]
    InvalidGenerator(String),
    #[error("unexpected token `{0}`")]
    Unexpected(String),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, column, kind }
    }
}

/// A whitespace-separated token with its 1-based column.
#[derive(Debug, Clone, Copy)]
pub struct Tok<'a> {
    pub text: &'a str,
    pub column: usize,
}

/// Splits a line into tokens, dropping anything after `#`.
pub fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let line = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok { text: &line[s..i], column: line[..s].chars().count() + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok { text: &line[s..], column: line[..s].chars().count() + 1 });
    }
    out
}

impl Polygraph {
    /// Builds a polygraph, checking name uniqueness and rule well-formedness.
    pub fn new(
        name: impl Into<String>,
        generators: Vec<String>,
        rules: Vec<Rule>,
    ) -> Result<Self, ParseErrorKind> {
        let mut p = Polygraph {
            name: name.into(),
            generators: Vec::new(),
            rules: Vec::new(),
            gen_index: HashMap::new(),
            rule_index: HashMap::new(),
        };
        for g in generators {
            p.add_generator(g)?;
        }
        for r in rules {
            p.add_rule(r)?;
        }
        Ok(p)
    }

    /// Shorthand for tests and fixtures: `Polygraph::from_rules("B3", "s t", &[("alpha", "s t s", "t s t")])`.
    pub fn from_rules(name: &str, gens: &str, rules: &[(&str, &str, &str)]) -> Result<Self, ParseErrorKind> {
        let mut p = Polygraph::new(name, gens.split_whitespace().map(String::from).collect(), vec![])?;
        for (rn, l, r) in rules {
            let lhs = p.parse_word(l)?;
            let rhs = p.parse_word(r)?;
            p.add_rule(Rule { name: rn.to_string(), lhs, rhs })?;
        }
        Ok(p)
    }

    fn add_generator(&mut self, g: String) -> Result<(), ParseErrorKind> {
        if g.is_empty() || g == EMPTY_WORD || g.chars().any(|c| c.is_whitespace() || "|;#".contains(c)) {
            return Err(ParseErrorKind::InvalidGenerator(g));
        }
        if self.gen_index.contains_key(&g) {
            return Err(ParseErrorKind::DuplicateGenerator(g));
        }
        self.gen_index.insert(g.clone(), self.generators.len() as Letter);
        self.generators.push(g);
        Ok(())
    }

    fn add_rule(&mut self, r: Rule) -> Result<(), ParseErrorKind> {
        if self.rule_index.contains_key(&r.name) {
            return Err(ParseErrorKind::DuplicateRule(r.name));
        }
        if r.lhs.is_empty() {
            return Err(ParseErrorKind::EmptyLhs(r.name));
        }
        let n = self.generators.len() as Letter;
        if let Some(&x) = r.lhs.iter().chain(r.rhs.iter()).find(|&&x| x >= n) {
            return Err(ParseErrorKind::UnknownGenerator(format!("#{x}")));
        }
        self.rule_index.insert(r.name.clone(), self.rules.len());
        self.rules.push(r);
        Ok(())
    }

    pub fn generator(&self, name: &str) -> Option<Letter> {
        self.gen_index.get(name).copied()
    }

    pub fn rule_id(&self, name: &str) -> Option<usize> {
        self.rule_index.get(name).copied()
    }

    pub fn rule(&self, id: usize) -> &Rule {
        &self.rules[id]
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Reads one token as a word: a generator, `1`, or a juxtaposition of
    /// generators resolved by longest match.
    fn parse_token(&self, tok: &str, out: &mut Word) -> Result<(), ParseErrorKind> {
        if tok == EMPTY_WORD {
            return Ok(());
        }
        if let Some(g) = self.generator(tok) {
            out.push(g);
            return Ok(());
        }
        let mut rest = tok;
        let mut buf = Vec::new();
        while !rest.is_empty() {
            let best = self
                .generators
                .iter()
                .enumerate()
                .filter(|(_, g)| rest.starts_with(g.as_str()))
                .max_by_key(|(_, g)| g.len());
            match best {
                Some((i, g)) => {
                    buf.push(i as Letter);
                    rest = &rest[g.len()..];
                }
                None => return Err(ParseErrorKind::UnknownGenerator(tok.to_string())),
            }
        }
        out.extend(buf);
        Ok(())
    }

    /// Parses a whitespace-separated word; `1` or the empty string is the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, ParseErrorKind> {
        let mut w = Word::new();
        for tok in text.split_whitespace() {
            self.parse_token(tok, &mut w)?;
        }
        Ok(w)
    }

    /// Spelled-out word: letters are juxtaposed when that reads back
    /// unambiguously, otherwise separated by spaces. The empty word is `1`.
    pub fn show(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return EMPTY_WORD.to_string();
        }
        let joined: String = w.iter().map(|&x| self.generators[x as usize].as_str()).collect();
        let mut back = Word::new();
        if self.parse_token(&joined, &mut back).is_ok() && back == w {
            joined
        } else {
            self.show_spaced(w)
        }
    }

    /// Letters separated by spaces, as in the presentation grammar.
    pub fn show_spaced(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return EMPTY_WORD.to_string();
        }
        w.iter().map(|&x| self.generators[x as usize].as_str()).collect::<Vec<_>>().join(" ")
    }
}

/// Parses the presentation grammar.
pub fn parse_polygraph(text: &str) -> Result<Polygraph, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, tokenize(l))).filter(|(_, t)| !t.is_empty());
    let last_line = text.lines().count().max(1);

    let (ln, toks) = lines
        .next()
        .ok_or_else(|| ParseError::new(last_line, 1, ParseErrorKind::Expected("`polygraph NAME`")))?;
    if toks[0].text != "polygraph" || toks.len() != 2 {
        return Err(ParseError::new(ln, toks[0].column, ParseErrorKind::Expected("`polygraph NAME`")));
    }
    let name = toks[1].text.to_string();

    let (ln, toks) = lines
        .next()
        .ok_or_else(|| ParseError::new(last_line, 1, ParseErrorKind::Expected("`gens GEN+`")))?;
    if toks[0].text != "gens" || toks.len() < 2 {
        return Err(ParseError::new(ln, toks[0].column, ParseErrorKind::Expected("`gens GEN+`")));
    }
    let mut p = Polygraph::new(name, vec![], vec![]).expect("empty polygraph");
    for t in &toks[1..] {
        p.add_generator(t.text.to_string()).map_err(|k| ParseError::new(ln, t.column, k))?;
    }

    for (ln, toks) in lines {
        let at = |t: &Tok, k| ParseError::new(ln, t.column, k);
        if toks[0].text != "rule" {
            return Err(at(&toks[0], ParseErrorKind::Expected("`rule NAME : WORD => WORD`")));
        }
        let name_tok = toks
            .get(1)
            .ok_or_else(|| at(&toks[0], ParseErrorKind::Expected("rule name")))?;
        let mut i = 2;
        let rule_name = if let Some(stripped) = name_tok.text.strip_suffix(':') {
            stripped.to_string()
        } else {
            match toks.get(2) {
                Some(t) if t.text == ":" => {
                    i = 3;
                    name_tok.text.to_string()
                }
                Some(t) => return Err(at(t, ParseErrorKind::Expected("`:`"))),
                None => return Err(at(name_tok, ParseErrorKind::Expected("`:`"))),
            }
        };
        if rule_name.is_empty() {
            return Err(at(name_tok, ParseErrorKind::Expected("rule name")));
        }
        let arrow = toks[i..]
            .iter()
            .position(|t| t.text == "=>")
            .map(|k| k + i)
            .ok_or_else(|| at(toks.last().unwrap(), ParseErrorKind::Expected("`=>`")))?;
        let side = |range: &[Tok], anchor: &Tok| -> Result<Word, ParseError> {
            if range.is_empty() {
                return Err(at(anchor, ParseErrorKind::Expected("a word (use `1` for the empty word)")));
            }
            let mut w = Word::new();
            for t in range {
                p.parse_token(t.text, &mut w).map_err(|k| at(t, k))?;
            }
            Ok(w)
        };
        let lhs = side(&toks[i..arrow], &toks[arrow])?;
        let rhs = side(&toks[arrow + 1..], &toks[arrow])?;
        p.add_rule(Rule { name: rule_name, lhs, rhs }).map_err(|k| at(name_tok, k))?;
    }
    Ok(p)
}

/// Canonical text form; rules in declaration order.
pub fn serialize_polygraph(p: &Polygraph) -> String {
    let mut s = format!("polygraph {}\ngens {}\n", p.name, p.generators.join(" "));
    for r in &p.rules {
        s.push_str(&format!("rule {} : {} => {}\n", r.name, p.show_spaced(&r.lhs), p.show_spaced(&r.rhs)));
    }
    s
}

impl fmt::Display for Polygraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_polygraph(self))
    }
}

/// All words of length at most `max_len`, shortest first, then lexicographic in generator order.
pub fn all_words(p: &Polygraph, max_len: usize) -> Vec<Word> {
    let n = p.num_generators() as Letter;
    let mut out = vec![Word::new()];
    let mut layer = vec![Word::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * n as usize);
        for w in &layer {
            for x in 0..n {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const B3: &str = "polygraph B3\ngens s t\nrule alpha: s t s => t s t\nrule beta: t s t => s t s\n";

    #[test]
    fn parses_b3() {
        let p = parse_polygraph(B3).unwrap();
        assert_eq!(p.generators, vec!["s", "t"]);
        assert_eq!(p.rules.len(), 2);
        assert_eq!(p.rules[0].lhs, vec![0, 1, 0]);
        assert_eq!(p.show(&p.rules[1].lhs), "tst");
    }

    #[test]
    fn rule_free_and_comments() {
        let p = parse_polygraph("# free monoid\npolygraph E\ngens a # one letter\n").unwrap();
        assert!(p.rules.is_empty());
        assert_eq!(serialize_polygraph(&p), "polygraph E\ngens a\n");
    }

    #[test]
    fn unknown_generator_reports_position() {
        let e = parse_polygraph("polygraph X\ngens a\nrule r: a => b\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(e.column, 14);
        assert_eq!(e.kind, ParseErrorKind::UnknownGenerator("b".into()));
    }

    #[test]
    fn rejects_duplicates_and_empty_lhs() {
        let e = parse_polygraph("polygraph X\ngens a a\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateGenerator("a".into()));
        let e = parse_polygraph("polygraph X\ngens a\nrule r : a => 1\nrule r : a => a\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateRule("r".into()));
        let e = parse_polygraph("polygraph X\ngens a\nrule r : 1 => a\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EmptyLhs("r".into()));
    }

    #[test]
    fn empty_rhs_and_separate_colon() {
        let p = parse_polygraph("polygraph X\ngens a\nrule r : a a => 1\n").unwrap();
        assert!(p.rules[0].rhs.is_empty());
        assert_eq!(serialize_polygraph(&p), "polygraph X\ngens a\nrule r : a a => 1\n");
    }

    #[test]
    fn multi_letter_generators() {
        let p = parse_polygraph("polygraph LAF\ngens a b c d d'\nrule r : d' a => a c\n").unwrap();
        assert_eq!(p.rules[0].lhs, vec![4, 0]);
        assert_eq!(p.show(&p.rules[0].lhs), "d'a");
        assert_eq!(p.parse_word("dd'a").unwrap(), vec![3, 4, 0]);
    }

    #[test]
    fn ambiguous_juxtaposition_falls_back_to_spaces() {
        let p = Polygraph::from_rules("X", "a ab bc c", &[]).unwrap();
        let w = p.parse_word("a bc").unwrap();
        assert_eq!(p.show(&w), "a bc");
    }

    #[test]
    fn round_trip_ab() {
        let p = parse_polygraph("polygraph AB\ngens a b\nrule alpha : a => b\nrule beta : b => a\n").unwrap();
        assert_eq!(parse_polygraph(&serialize_polygraph(&p)).unwrap(), p);
    }
}
