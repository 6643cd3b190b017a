use std::fs;
use std::path::Path as FsPath;

use polycoh::labelling::{parse_label_table, parse_qnf_map};
use polycoh::polygraph::all_words;
use polycoh::{
    critical_branchings, explore, parse_polygraph, Error, ExplorationBudget, Labelling, Polygraph, QnfChoice,
    ReductionGraph, Word,
};
use serde::Serialize;

use crate::{Common, LabelArg};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: String, source: polycoh::ParseError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// 2 input error, 3 inconclusive by budget, 4 search failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::Parse(_)
                | Error::MissingQnfEntry(_)
                | Error::AmbiguousQnf(_)
                | Error::MissingTableEntry(_)
                | Error::IllFoundedOrder(_)
                | Error::NotQuasiNormalForm { .. }
                | Error::IllComposed(_) => 2,
                Error::NotExplored(_) | Error::TruncatedRegion(_) | Error::Budget(_) => 3,
                Error::NotFound(_)
                | Error::Unreachable { .. }
                | Error::NotEquivalent
                | Error::MissingLoopClass(_)
                | Error::MissingCell(_)
                | Error::MeasureNotDecreasing(_)
                | Error::Invariant(_) => 4,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read(path: &FsPath) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn parse_with<T>(
    path: &FsPath,
    f: impl FnOnce(&str) -> Result<T, polycoh::ParseError>,
) -> CliResult<T> {
    let text = read(path)?;
    f(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
}

/// Budget values echoed in every report.
#[derive(Debug, Clone, Serialize)]
pub struct Budgets {
    pub max_word_len: usize,
    pub max_states: usize,
    pub max_depth: usize,
    pub ctx_bound: usize,
    pub peiffer_len_bound: usize,
    pub loop_cap: usize,
    pub seed_len: Option<usize>,
    pub seeds: usize,
}

pub struct Session {
    pub p: Polygraph,
    pub g: ReductionGraph,
    pub budgets: Budgets,
}

fn word_count(p: &Polygraph, len: usize) -> usize {
    let k = p.num_generators().max(1);
    (0..=len).map(|i| k.saturating_pow(i as u32)).fold(0usize, usize::saturating_add)
}

/// Explores from the chosen seeds. The default seed length covers the
/// critical sources whiskered up to the context bound and the Peiffer
/// audit's words, shrunk until the seed count fits the state budget.
pub fn session(c: &Common) -> CliResult<Session> {
    let p = parse_with(&c.input, parse_polygraph)?;
    if [c.max_word_len, c.max_states, c.max_depth, c.loop_cap].contains(&0) {
        return Err(CliError::Usage("budgets must be positive".into()));
    }
    let (seeds, seed_len): (Vec<Word>, Option<usize>) = match &c.seeds {
        Some(ws) => {
            let seeds = ws
                .iter()
                .map(|w| p.parse_word(w).map_err(|k| CliError::Usage(format!("seed `{w}`: {k}"))))
                .collect::<CliResult<_>>()?;
            (seeds, None)
        }
        None => {
            let mut len = c.seed_len.unwrap_or_else(|| {
                let cb = critical_branchings(&p).iter().map(|b| b.source.len()).max().unwrap_or(0);
                (cb + c.ctx_bound).max(c.peiffer_len_bound)
            });
            if c.seed_len.is_none() {
                while len > 1 && word_count(&p, len) > c.max_states {
                    len -= 1;
                }
            }
            (all_words(&p, len), Some(len))
        }
    };
    let budget = ExplorationBudget { max_word_len: c.max_word_len, max_states: c.max_states, max_depth: c.max_depth };
    let g = explore(&p, &seeds, budget);
    let budgets = Budgets {
        max_word_len: c.max_word_len,
        max_states: c.max_states,
        max_depth: c.max_depth,
        ctx_bound: c.ctx_bound,
        peiffer_len_bound: c.peiffer_len_bound,
        loop_cap: c.loop_cap,
        seed_len,
        seeds: seeds.len(),
    };
    Ok(Session { p, g, budgets })
}

pub fn labelling(c: &Common, s: &Session) -> CliResult<Labelling> {
    Ok(match c.label {
        LabelArg::Qnf => match &c.qnf_map {
            Some(path) => {
                let m = parse_with(path, |t| parse_qnf_map(&s.p, t))?;
                Labelling::qnf(QnfChoice::Map(m))
            }
            None => Labelling::qnf(QnfChoice::Builtin),
        },
        LabelArg::Nf => Labelling::nf(&s.p, &s.g)?,
        LabelArg::Singleton => Labelling::singleton(),
        LabelArg::Table => {
            let path = c.label_table.as_ref().ok_or_else(|| CliError::Usage("--label table needs --label-table".into()))?;
            parse_label_table(&s.p, &read(path)?)?
        }
    })
}
