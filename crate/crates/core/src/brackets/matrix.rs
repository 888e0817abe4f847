use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::{poisson_bracket, BracketError, PhaseSpace, RewriteRules};
use crate::expr::{Point, RationalExpr};

/// Dense square matrix of rational expressions, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<RationalExpr>,
}

impl RationalMatrix {
    pub fn from_rows(rows: Vec<Vec<RationalExpr>>) -> Result<Self, BracketError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(BracketError::NotSquare);
        }
        Ok(RationalMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut entries = vec![RationalExpr::zero(nvars); n * n];
        for i in 0..n {
            entries[i * n + i] = RationalExpr::one(nvars);
        }
        RationalMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalExpr {
        &self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[RationalExpr] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[RationalExpr]> {
        self.entries.chunks(self.n)
    }

    pub fn map<F: FnMut(&RationalExpr) -> RationalExpr>(&self, f: F) -> Self {
        RationalMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map<E, F>(&self, f: F) -> Result<Self, E>
    where
        F: FnMut(&RationalExpr) -> Result<RationalExpr, E>,
    {
        Ok(RationalMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect::<Result<_, E>>()?,
        })
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, BracketError> {
        if self.n != other.n {
            return Err(BracketError::NotSquare);
        }
        let n = self.n;
        let nvars = self.entries[0].nvars();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = RationalExpr::zero(nvars);
                for k in 0..n {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                entries.push(acc);
            }
        }
        Ok(RationalMatrix { n, entries })
    }

    pub fn reduce(&self, rules: &RewriteRules) -> Result<RationalMatrix, BracketError> {
        self.try_map(|e| rules.reduce(e))
    }

    /// Indices of rows that vanish modulo the rules.
    pub fn zero_rows(&self, rules: &RewriteRules) -> Result<Vec<usize>, BracketError> {
        let mut out = Vec::new();
        for i in 0..self.n {
            let mut zero = true;
            for e in self.row(i) {
                if !rules.is_zero_mod(e)? {
                    zero = false;
                    break;
                }
            }
            if zero {
                out.push(i);
            }
        }
        Ok(out)
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| *self.get(i, j) == -self.get(j, i)))
    }

    pub fn evaluate(&self, point: &Point) -> Result<Vec<Vec<BigRational>>, BracketError> {
        self.rows()
            .map(|r| {
                r.iter()
                    .map(|e| e.evaluate(point).map_err(BracketError::from))
                    .collect()
            })
            .collect()
    }
}

/// `M_ij = {phi_i, phi_j}`.
pub fn bracket_matrix(
    space: &PhaseSpace,
    constraints: &[RationalExpr],
) -> Result<RationalMatrix, BracketError> {
    let n = constraints.len();
    if n == 0 {
        return Err(BracketError::NotSquare);
    }
    let mut rows = vec![vec![RationalExpr::zero(space.nvars()); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let b = poisson_bracket(space, &constraints[i], &constraints[j]);
            rows[j][i] = -&b;
            rows[i][j] = b;
        }
    }
    RationalMatrix::from_rows(rows)
}

/// Gauss-Jordan elimination on `[M | I]`, reducing every entry modulo `rules`
/// after each pivot step. The result satisfies `M G = I` modulo the rules; this
/// is checked before returning.
pub fn invert_matrix(
    m: &RationalMatrix,
    rules: &RewriteRules,
) -> Result<RationalMatrix, BracketError> {
    let n = m.dim();
    let nvars = m.entries[0].nvars();
    let w = 2 * n;
    let mut a: Vec<Vec<RationalExpr>> = (0..n)
        .map(|i| {
            let mut row: Vec<RationalExpr> = m
                .row(i)
                .iter()
                .map(|e| rules.reduce(e))
                .collect::<Result<_, _>>()?;
            row.extend((0..n).map(|j| {
                if i == j {
                    RationalExpr::one(nvars)
                } else {
                    RationalExpr::zero(nvars)
                }
            }));
            Ok(row)
        })
        .collect::<Result<_, BracketError>>()?;

    for col in 0..n {
        let mut pivot: Option<(usize, usize)> = None;
        for (r, row) in a.iter().enumerate().skip(col) {
            if rules.is_zero_mod(&row[col])? {
                continue;
            }
            let size = row[col].size();
            if pivot.map_or(true, |(_, s)| size < s) {
                pivot = Some((r, size));
            }
        }
        let (pr, _) = pivot.ok_or(BracketError::Singular { column: col })?;
        a.swap(col, pr);
        let inv = a[col][col].recip()?;
        let prow: Vec<RationalExpr> = a[col]
            .iter()
            .map(|e| rules.reduce(&(e * &inv)))
            .collect::<Result<_, _>>()?;
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for k in 0..w {
                if !prow[k].is_zero() {
                    row[k] = rules.reduce(&(&row[k] - &(&f * &prow[k])))?;
                }
            }
        }
        a[col] = prow;
    }

    let g = RationalMatrix::from_rows(a.into_iter().map(|r| r[n..].to_vec()).collect())?;
    let check = m.mul(&g)?;
    let id = RationalMatrix::identity(n, nvars);
    for (x, y) in check.entries.iter().zip(&id.entries) {
        if !rules.equivalent(x, y)? {
            return Err(BracketError::InverseCheckFailed);
        }
    }
    Ok(g)
}

/// Exact rank of `m` at each sample point. Every point must satisfy all
/// `constraints`.
pub fn rank_at_points(
    m: &RationalMatrix,
    constraints: &[RationalExpr],
    points: &[Point],
) -> Result<Vec<usize>, BracketError> {
    points
        .par_iter()
        .enumerate()
        .map(|(pi, pt)| {
            for (ci, c) in constraints.iter().enumerate() {
                let v = c
                    .evaluate(pt)
                    .map_err(|_| BracketError::UndefinedAtPoint { point: pi })?;
                if !v.is_zero() {
                    return Err(BracketError::OffSurface {
                        point: pi,
                        constraint: ci,
                    });
                }
            }
            let vals = m
                .evaluate(pt)
                .map_err(|_| BracketError::UndefinedAtPoint { point: pi })?;
            Ok(exact_rank(vals))
        })
        .collect()
}

fn exact_rank(mut a: Vec<Vec<BigRational>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][c].clone();
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &pivot;
                for k in c..cols {
                    let d = &f * &a[rank][k];
                    a[r][k] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}
