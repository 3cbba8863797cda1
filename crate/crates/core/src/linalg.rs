//! Row reduction over F_q.

use crate::field::{FieldCtx, Fq};

/// A subspace of F_q^n held as a reduced row echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    n: usize,
    rows: Vec<Vec<Fq>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace {
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Row space of `rows`, each of length `n`.
    pub fn span(ctx: &FieldCtx, n: usize, rows: impl IntoIterator<Item = Vec<Fq>>) -> Self {
        let mut s = Subspace::zero(n);
        for r in rows {
            s.insert(ctx, r);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Fq>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical representative of `v` modulo the subspace: the pivot
    /// coordinates are cleared.
    pub fn reduce(&self, ctx: &FieldCtx, v: &[Fq]) -> Vec<Fq> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = v[p];
            if f != 0 {
                for (a, &b) in v.iter_mut().zip(row) {
                    if b != 0 {
                        *a = ctx.sub(*a, ctx.mul(f, b));
                    }
                }
            }
        }
        v
    }

    pub fn contains(&self, ctx: &FieldCtx, v: &[Fq]) -> bool {
        self.reduce(ctx, v).iter().all(|&c| c == 0)
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, ctx: &FieldCtx, v: Vec<Fq>) -> bool {
        assert_eq!(v.len(), self.n);
        let mut v = self.reduce(ctx, &v);
        let Some(p) = v.iter().position(|&c| c != 0) else {
            return false;
        };
        let inv = ctx.inv(v[p]);
        for a in v.iter_mut() {
            *a = ctx.mul(*a, inv);
        }
        for row in &mut self.rows {
            let f = row[p];
            if f != 0 {
                for (a, &b) in row.iter_mut().zip(&v) {
                    if b != 0 {
                        *a = ctx.sub(*a, ctx.mul(f, b));
                    }
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }

    /// Basis of `{x : r . x = 0 for every row r}`.
    pub fn null_space(&self, ctx: &FieldCtx) -> Vec<Vec<Fq>> {
        let free: Vec<usize> = (0..self.n).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0; self.n];
                v[f] = 1;
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = ctx.neg(row[f]);
                }
                v
            })
            .collect()
    }
}

pub fn dot(ctx: &FieldCtx, a: &[Fq], b: &[Fq]) -> Fq {
    a.iter()
        .zip(b)
        .filter(|(x, y)| **x != 0 && **y != 0)
        .fold(0, |acc, (&x, &y)| ctx.add(acc, ctx.mul(x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_is_orthogonal() {
        let ctx = FieldCtx::of_order(5).unwrap();
        let rows = vec![vec![1, 2, 0, 4], vec![2, 4, 1, 3], vec![3, 1, 1, 2]];
        let s = Subspace::span(&ctx, 4, rows.clone());
        let ns = s.null_space(&ctx);
        assert_eq!(s.dim() + ns.len(), 4);
        for v in &ns {
            for r in &rows {
                assert_eq!(dot(&ctx, r, v), 0);
            }
        }
    }

    #[test]
    fn reduce_is_canonical() {
        let ctx = FieldCtx::of_order(3).unwrap();
        let s = Subspace::span(&ctx, 3, [vec![1, 1, 0]]);
        let a = s.reduce(&ctx, &[2, 0, 1]);
        let b = s.reduce(&ctx, &[0, 1, 1]);
        assert_eq!(a, b);
        assert!(s.contains(&ctx, &[2, 2, 0]));
        assert!(!s.contains(&ctx, &[1, 0, 0]));
    }
}
