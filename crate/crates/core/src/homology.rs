//! Abelianized boundary maps of a presentation with 3-cells, integral
//! homology in degrees 0 to 2 via Smith normal form, and finiteness
//! reporting.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::completion::{ThreeCell, Verdict};
use crate::engine::Path;
use crate::error::{Error, Result};
use crate::loops::LoopEnumeration;
use crate::polygraph::{Polygraph, Word};

pub type Matrix = Vec<Vec<BigInt>>;

fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![BigInt::zero(); cols]; rows]
}

pub fn identity_matrix(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

pub fn matmul(a: &Matrix, b: &Matrix, inner: usize, cols: usize) -> Matrix {
    let mut c = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for k in 0..inner {
            if row[k].is_zero() {
                continue;
            }
            for j in 0..cols {
                c[i][j] += &row[k] * &b[k][j];
            }
        }
    }
    c
}

/// Rows separated by newlines, entries by spaces.
pub fn matrix_dump(m: &Matrix) -> String {
    m.iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ") + "\n").collect()
}

/// `delta1 = 0`, `delta2` (generators × rules), `delta3` (rules × cells).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplexZ {
    pub generators: Vec<String>,
    pub rules: Vec<String>,
    pub cells: Vec<String>,
    pub delta2: Matrix,
    pub delta3: Matrix,
}

impl ChainComplexZ {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.generators.len(), self.rules.len(), self.cells.len())
    }
}

fn letter_counts(p: &Polygraph, w: &Word) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); p.num_generators()];
    for &x in w {
        v[x as usize] += 1;
    }
    v
}

/// Signed rule occurrences of a zigzag: forward steps count `+1`, inverse `−1`.
pub fn signed_support(p: &Polygraph, f: &Path) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); p.rules.len()];
    for s in &f.steps {
        if s.inverse {
            v[s.rule] -= 1;
        } else {
            v[s.rule] += 1;
        }
    }
    v
}

pub fn abelianize(p: &Polygraph, cells: &[ThreeCell]) -> ChainComplexZ {
    let (n1, n2, n3) = (p.num_generators(), p.rules.len(), cells.len());
    let mut delta2 = zeros(n1, n2);
    for (j, r) in p.rules.iter().enumerate() {
        let (l, rr) = (letter_counts(p, &r.lhs), letter_counts(p, &r.rhs));
        for i in 0..n1 {
            delta2[i][j] = &l[i] - &rr[i];
        }
    }
    let mut delta3 = zeros(n2, n3);
    for (j, c) in cells.iter().enumerate() {
        let (s, t) = (signed_support(p, &c.source), signed_support(p, &c.target));
        for i in 0..n2 {
            delta3[i][j] = &s[i] - &t[i];
        }
    }
    ChainComplexZ {
        generators: p.generators.clone(),
        rules: p.rules.iter().map(|r| r.name.clone()).collect(),
        cells: cells.iter().map(|c| c.name.clone()).collect(),
        delta2,
        delta3,
    }
}

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal, each diagonal
/// entry dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub u: Matrix,
    pub d: Matrix,
    pub v: Matrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.len().min(self.d.first().map_or(0, Vec::len)))
            .map(|i| self.d[i][i].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().len()
    }
}

pub fn smith_normal_form(a: &Matrix, cols: usize) -> Snf {
    let m = a.len();
    let n = cols;
    let mut d = a.clone();
    let mut u = identity_matrix(m);
    let mut v = identity_matrix(n);
    let mut t = 0;
    while t < m.min(n) {
        // least nonzero entry of the remaining block as pivot
        let Some((pi, pj)) = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !d[i][j].is_zero())
            .min_by(|&(a, b), &(c, e)| d[a][b].abs().cmp(&d[c][e].abs()))
        else {
            break;
        };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut clean = false;
            while !clean {
                clean = true;
                for i in t + 1..m {
                    if d[i][t].is_zero() {
                        continue;
                    }
                    let q = &d[i][t] / &d[t][t];
                    add_row(&mut d, i, t, &-&q);
                    add_row(&mut u, i, t, &-&q);
                    if !d[i][t].is_zero() {
                        d.swap(t, i);
                        u.swap(t, i);
                        clean = false;
                    }
                }
                for j in t + 1..n {
                    if d[t][j].is_zero() {
                        continue;
                    }
                    let q = &d[t][j] / &d[t][t];
                    add_col(&mut d, j, t, &-&q);
                    add_col(&mut v, j, t, &-&q);
                    if !d[t][j].is_zero() {
                        swap_cols(&mut d, t, j);
                        swap_cols(&mut v, t, j);
                        clean = false;
                    }
                }
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&d[i][j] % &d[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    add_row(&mut d, t, i, &BigInt::one());
                    add_row(&mut u, t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut().chain(u[t].iter_mut()) {
                *x = -&*x;
            }
        }
        t += 1;
    }
    Snf { u, d, v }
}

fn swap_cols(m: &mut Matrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// `row[dst] += k · row[src]`
fn add_row(m: &mut Matrix, dst: usize, src: usize, k: &BigInt) {
    let src_row = m[src].clone();
    for (x, y) in m[dst].iter_mut().zip(src_row) {
        *x += k * y;
    }
}

fn add_col(m: &mut Matrix, dst: usize, src: usize, k: &BigInt) {
    for row in m.iter_mut() {
        let y = row[src].clone();
        row[dst] += k * y;
    }
}

/// Fraction-free Gaussian elimination.
pub fn determinant(a: &Matrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// A finitely generated abelian group `Z^rank ⊕ Z/t₁ ⊕ …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    pub rank: usize,
    #[serde(serialize_with = "as_strings")]
    pub torsion: Vec<BigInt>,
}

fn as_strings<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyResult {
    pub h0: AbelianGroup,
    pub h1: AbelianGroup,
    pub h2: AbelianGroup,
}

impl HomologyResult {
    /// `H_k = …` lines.
    pub fn lines(&self) -> Vec<String> {
        [&self.h0, &self.h1, &self.h2].iter().enumerate().map(|(k, h)| format!("H_{k} = {h}")).collect()
    }
}

fn torsion(s: &Snf) -> Vec<BigInt> {
    s.diagonal().into_iter().filter(|x| !x.is_one()).collect()
}

pub fn homology(c: &ChainComplexZ) -> Result<HomologyResult> {
    let (n1, n2, n3) = c.dims();
    let prod = matmul(&c.delta2, &c.delta3, n2, n3);
    if prod.iter().flatten().any(|x| !x.is_zero()) {
        return Err(Error::Invariant("delta2 · delta3 is not zero".into()));
    }
    let s2 = smith_normal_form(&c.delta2, n2);
    let s3 = smith_normal_form(&c.delta3, n3);
    let (r2, r3) = (s2.rank(), s3.rank());
    Ok(HomologyResult {
        h0: AbelianGroup { rank: 1, torsion: Vec::new() },
        h1: AbelianGroup { rank: n1 - r2, torsion: torsion(&s2) },
        h2: AbelianGroup { rank: n2 - r2 - r3, torsion: torsion(&s3) },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinitenessReport {
    pub rules_finite: bool,
    pub rules: usize,
    pub loop_classes_found: usize,
    pub loop_enumeration_complete: bool,
    pub critical_branchings: usize,
    /// Finite derivation type and FP₃ follow.
    pub conclusion: bool,
    pub note: String,
}

/// The finiteness conclusion needs a certified completion and a complete
/// loop enumeration.
pub fn finiteness_report(
    p: &Polygraph,
    loops: &LoopEnumeration,
    exploration_truncated: bool,
    critical_branchings: usize,
    verdict: &Verdict,
) -> FinitenessReport {
    let complete = !loops.truncated && !exploration_truncated;
    let conclusion = complete && verdict.is_certified();
    let note = if conclusion {
        "finitely many rules, critical branchings and elementary loop classes on a certified completion: finite derivation type and FP3".to_string()
    } else if !verdict.is_certified() {
        "completion not certified: no finiteness conclusion".to_string()
    } else {
        "loop enumeration incomplete: no finiteness conclusion".to_string()
    };
    FinitenessReport {
        rules_finite: true,
        rules: p.rules.len(),
        loop_classes_found: loops.classes.len(),
        loop_enumeration_complete: complete,
        critical_branchings,
        conclusion,
        note,
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::completion::CellKind;

    fn mat(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn b3() -> Polygraph {
        Polygraph::from_rules("B3", "s t", &[("alpha", "s t s", "t s t"), ("beta", "t s t", "s t s")]).unwrap()
    }

    #[test]
    fn b3_reduced() {
        let p = b3();
        let c = abelianize(&p, &[]);
        assert_eq!(c.delta2, mat(&[&[1, -1], &[-1, 1]]));
        let h = homology(&c).unwrap();
        assert_eq!(h.lines(), vec!["H_0 = Z", "H_1 = Z", "H_2 = Z"]);
    }

    #[test]
    fn loop_cell_column() {
        let p = b3();
        let e = ThreeCell {
            name: "E1".into(),
            source: Path::parse(&p, "|alpha|;|beta|").unwrap(),
            target: Path::identity(p.parse_word("sts").unwrap()),
            kind: CellKind::Loop,
        };
        let c = abelianize(&p, &[e]);
        assert_eq!(c.delta3, mat(&[&[1], &[1]]));
        assert_eq!(homology(&c).unwrap().h2.to_string(), "0");
    }

    #[test]
    fn small_cases() {
        let free = Polygraph::from_rules("free1", "x", &[]).unwrap();
        assert_eq!(homology(&abelianize(&free, &[])).unwrap().lines(), vec!["H_0 = Z", "H_1 = Z", "H_2 = 0"]);
        let idem = Polygraph::from_rules("idem", "a", &[("r", "a a", "a")]).unwrap();
        let h = homology(&abelianize(&idem, &[])).unwrap();
        assert_eq!((h.h1.rank, h.h1.torsion.len(), h.h2.rank), (0, 0, 0));
        let z2 = Polygraph::from_rules("z2", "a", &[("r", "a a", "1")]).unwrap();
        assert_eq!(homology(&abelianize(&z2, &[])).unwrap().h1.to_string(), "Z/2");
    }

    #[test]
    fn snf_known() {
        let a = mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&a, 3);
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        assert_eq!(matmul(&matmul(&s.u, &a, 3, 3), &s.v, 3, 3), s.d);
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&mat(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(determinant(&mat(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]])), BigInt::from(6));
        assert_eq!(determinant(&mat(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]])), BigInt::from(-1));
        assert_eq!(determinant(&mat(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    #[test]
    fn snf_random_and_permutation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
            let a: Matrix = (0..m).map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect()).collect();
            let s = smith_normal_form(&a, n);
            assert_eq!(matmul(&matmul(&s.u, &a, m, n), &s.v, n, n), s.d);
            assert!(determinant(&s.u).abs().is_one() && determinant(&s.v).abs().is_one());
            let diag = s.diagonal();
            assert!(diag.windows(2).all(|w| (&w[1] % &w[0]).is_zero()) && diag.iter().all(|x| x.is_positive()));
            for i in 0..m {
                for j in 0..n {
                    assert!(i == j || s.d[i][j].is_zero());
                }
            }
            let mut b = a.clone();
            for row in b.iter_mut() {
                row.reverse();
            }
            assert_eq!(smith_normal_form(&b, n).diagonal(), diag);
        }
    }
}
