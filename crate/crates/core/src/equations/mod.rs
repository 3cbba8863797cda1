//! Translation-invariant equations `c_1 x_1 + ... + c_s x_s = 0` over F_q[t]:
//! genus, triviality of solutions, counting, extremal search and the
//! record store.

pub mod count;
pub mod search;
pub mod store;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::poly::GPoly;

pub use count::{count_solutions, is_solution_free, SolutionCount, Solver};
pub use search::{max_solution_free_exhaustive, max_solution_free_heuristic, SearchMethod, SearchRecord};

/// Which solutions count as trivial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Triviality {
    /// Constant on the parts of some zero-sum partition.
    Lenient,
    /// Constant on the parts of some zero-sum partition with `genus` parts.
    Strict,
}

#[derive(Debug, Clone)]
pub struct EquationSpec {
    ctx: Arc<FieldCtx>,
    c: Vec<GPoly>,
    ell: usize,
    genus: usize,
    /// `best[mask]`: most zero-sum parts partitioning `mask`, `None` if none.
    best: Vec<Option<u8>>,
}

/// Largest number of variables handled by the partition tables.
pub const MAX_VARIABLES: usize = 16;

impl EquationSpec {
    pub fn new(ctx: Arc<FieldCtx>, c: Vec<GPoly>) -> Result<Self> {
        let s = c.len();
        if s < 3 || s > MAX_VARIABLES {
            return Err(Error::InvalidArgument(format!(
                "need 3 <= s <= {MAX_VARIABLES} coefficients, got {s}"
            )));
        }
        if c.iter().any(|x| x.is_zero()) {
            return Err(Error::InvalidArgument("coefficients must be nonzero".into()));
        }
        let amb = c.iter().map(|x| x.ambient()).max().unwrap_or(1);
        let c: Vec<GPoly> = c.iter().map(|x| x.with_ambient(amb).expect("fits")).collect();
        let total = c.iter().fold(GPoly::zero(amb), |acc, x| acc.add(&ctx, x));
        if !total.is_zero() {
            return Err(Error::NotTranslationInvariant);
        }
        let ell = c.iter().filter_map(|x| x.degree()).max().unwrap_or(0);
        let best = partition_table(&ctx, &c);
        let genus = best[(1usize << s) - 1].expect("the full set sums to zero") as usize;
        Ok(EquationSpec {
            ctx,
            c,
            ell,
            genus,
            best,
        })
    }

    /// Coefficients given as integers, embedded through F_p.
    pub fn from_ints(ctx: Arc<FieldCtx>, c: &[i64]) -> Result<Self> {
        let polys = c.iter().map(|&v| GPoly::constant(ctx.from_int(v), 1)).collect();
        Self::new(ctx, polys)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn ctx_arc(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn s(&self) -> usize {
        self.c.len()
    }

    pub fn coeffs(&self) -> &[GPoly] {
        &self.c
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Is a solution tuple trivial.
    pub fn is_trivial<T: PartialEq>(&self, tuple: &[T], mode: Triviality) -> bool {
        let s = self.s();
        let mut seen = 0usize;
        let mut parts = 0usize;
        for i in 0..s {
            if seen >> i & 1 == 1 {
                continue;
            }
            let mut class = 0usize;
            for j in i..s {
                if tuple[j] == tuple[i] {
                    class |= 1 << j;
                }
            }
            seen |= class;
            match self.best[class] {
                Some(b) => parts += b as usize,
                None => return false,
            }
        }
        match mode {
            Triviality::Lenient => true,
            Triviality::Strict => parts == self.genus,
        }
    }
}

fn partition_table(ctx: &FieldCtx, c: &[GPoly]) -> Vec<Option<u8>> {
    let s = c.len();
    let full = 1usize << s;
    let amb = c[0].ambient();
    let mut zero_sum = vec![false; full];
    for mask in 1..full {
        let mut acc = GPoly::zero(amb);
        for (i, ci) in c.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = acc.add(ctx, ci);
            }
        }
        zero_sum[mask] = acc.is_zero();
    }
    let mut best: Vec<Option<u8>> = vec![None; full];
    best[0] = Some(0);
    for mask in 1..full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // Submasks of `rest`, each joined with the lowest element.
        let mut sub = rest;
        loop {
            let part = sub | low;
            if zero_sum[part] {
                if let Some(b) = best[mask ^ part] {
                    let cand = b + 1;
                    if best[mask].map_or(true, |x| cand > x) {
                        best[mask] = Some(cand);
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    best
}

/// `C q^N ((ln N)^4 / N)^{s-2}`.
pub fn bound_evaluate(n: usize, s: usize, _ell: usize, q: u32, c: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("bound needs N >= 3, got {n}")));
    }
    if s < 3 {
        return Err(Error::InvalidArgument(format!("bound needs s >= 3, got {s}")));
    }
    let nf = n as f64;
    Ok(c * (q as f64).powf(nf) * (nf.ln().powi(4) / nf).powi(s as i32 - 2))
}
