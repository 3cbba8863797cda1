//! Counting and enumerating solutions in a set `A ⊆ G_N`.

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use super::{EquationSpec, Triviality};
use crate::error::{Error, Result};
use crate::fourier::{FourierPlan, GroupFn};
use crate::group::{GroupN, PointSet};

/// Largest ambient group `G_{N+l}` the solver will tabulate.
pub const AMBIENT_LIMIT: usize = 1 << 22;

/// Tables for solving `c_1 x_1 + ... + c_s x_s = 0` with `x_i in G_N`.
/// Products `c_i x` live in the ambient group `G_{N+l}`.
#[derive(Debug, Clone)]
pub struct Solver {
    eq: EquationSpec,
    group: GroupN,
    ambient: GroupN,
    /// `prods[i][x]` = index of `c_i x` in the ambient group.
    prods: Vec<Vec<usize>>,
    /// `last[y] = x` when `c_s x = y`, else `usize::MAX`.
    last: Vec<usize>,
}

impl Solver {
    pub fn new(eq: &EquationSpec, n: usize) -> Result<Self> {
        let ctx = eq.ctx_arc().clone();
        let group = GroupN::new(ctx.clone(), n)?;
        let m = n + eq.ell();
        let amb_size = (ctx.q() as u128).saturating_pow(m as u32);
        if amb_size > AMBIENT_LIMIT as u128 {
            return Err(Error::AmbientOverflow(amb_size));
        }
        let ambient = GroupN::new(ctx.clone(), m)?;
        let prods: Vec<Vec<usize>> = eq
            .coeffs()
            .iter()
            .map(|c| {
                (0..group.size())
                    .map(|x| ambient.index(&c.mul(&ctx, &group.elem(x))).expect("degree < N + l"))
                    .collect()
            })
            .collect();
        let mut last = vec![usize::MAX; ambient.size()];
        for (x, &y) in prods[eq.s() - 1].iter().enumerate() {
            last[y] = x;
        }
        Ok(Solver {
            eq: eq.clone(),
            group,
            ambient,
            prods,
            last,
        })
    }

    pub fn group(&self) -> &GroupN {
        &self.group
    }

    pub fn ambient(&self) -> &GroupN {
        &self.ambient
    }

    pub fn equation(&self) -> &EquationSpec {
        &self.eq
    }

    /// Visits every solution in `pools[0] x ... x pools[s-2] x last_pool`;
    /// the visitor returns `false` to stop.
    fn walk(
        &self,
        pools: &[&[usize]],
        last_pool: &PointSet,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) {
        let s = self.eq.s();
        let mut tuple = vec![0usize; s];
        fn rec(
            sv: &Solver,
            depth: usize,
            acc: usize,
            pools: &[&[usize]],
            last_pool: &PointSet,
            tuple: &mut Vec<usize>,
            visit: &mut dyn FnMut(&[usize]) -> bool,
        ) -> bool {
            let s = tuple.len();
            if depth == s - 1 {
                let x = sv.last[sv.ambient.neg(acc)];
                if x != usize::MAX && last_pool.contains(x) {
                    tuple[s - 1] = x;
                    return visit(tuple);
                }
                return true;
            }
            for &x in pools[depth] {
                tuple[depth] = x;
                let next = sv.ambient.add(acc, sv.prods[depth][x]);
                if !rec(sv, depth + 1, next, pools, last_pool, tuple, visit) {
                    return false;
                }
            }
            true
        }
        rec(self, 0, 0, pools, last_pool, &mut tuple, visit);
    }

    /// Number of solutions with every `x_i in A`.
    pub fn count(&self, a: &PointSet) -> u128 {
        let pools: Vec<&[usize]> = vec![a.members(); self.eq.s() - 1];
        let mut n = 0u128;
        self.walk(&pools, a, &mut |_| {
            n += 1;
            true
        });
        n
    }

    /// Number of solutions with `x_i in A_i`.
    pub fn count_in(&self, sets: &[&PointSet]) -> u128 {
        let pools: Vec<&[usize]> = sets[..sets.len() - 1].iter().map(|s| s.members()).collect();
        let mut n = 0u128;
        self.walk(&pools, sets[sets.len() - 1], &mut |_| {
            n += 1;
            true
        });
        n
    }

    /// First non-trivial solution in `A`, if any.
    pub fn nontrivial(&self, a: &PointSet, mode: Triviality) -> Option<Vec<usize>> {
        let pools: Vec<&[usize]> = vec![a.members(); self.eq.s() - 1];
        let mut found = None;
        self.walk(&pools, a, &mut |t| {
            if self.eq.is_trivial(t, mode) {
                true
            } else {
                found = Some(t.to_vec());
                false
            }
        });
        found
    }

    /// Does `A ∪ {x}` contain a non-trivial solution using `x`, given that
    /// `A` itself has none.
    pub fn creates_solution(&self, a: &PointSet, x: usize, mode: Triviality) -> bool {
        let mut mask = a.mask().to_vec();
        mask[x] = true;
        let with = PointSet::from_mask(mask);
        let pools: Vec<&[usize]> = vec![with.members(); self.eq.s() - 1];
        let mut hit = false;
        self.walk(&pools, &with, &mut |t| {
            if t.contains(&x) && !self.eq.is_trivial(t, mode) {
                hit = true;
                false
            } else {
                true
            }
        });
        hit
    }

    /// `q^{-M} sum_xi prod_i (sum_{x in A} e(xi c_i x))` over the ambient group.
    pub fn fourier_count(&self, a: &PointSet) -> Complex64 {
        let amb = &self.ambient;
        let plan = FourierPlan::new(amb);
        let size = amb.size() as f64;
        let mut prod = vec![Complex64::new(1.0, 0.0); amb.size()];
        for p in &self.prods {
            let img = PointSet::from_members(amb.size(), a.members().iter().map(|&x| p[x]));
            let hat = plan.forward(&GroupFn::indicator(amb, &img));
            for (acc, v) in prod.iter_mut().zip(hat.values()) {
                *acc *= v * size;
            }
        }
        prod.iter().sum::<Complex64>() / size
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionCount {
    pub raw: u128,
    /// `Lambda = raw / |G|^{s-1}` in lowest terms.
    pub lambda_num: u128,
    pub lambda_den: u128,
    pub lambda: f64,
    /// `|A|^m`.
    pub trivial_lower: u128,
    pub fourier_raw: f64,
    pub fourier_residual: f64,
    pub fourier_agrees: bool,
}

pub fn count_solutions(a: &PointSet, eq: &EquationSpec, n: usize) -> Result<SolutionCount> {
    let solver = Solver::new(eq, n)?;
    count_with(&solver, a)
}

pub fn count_with(solver: &Solver, a: &PointSet) -> Result<SolutionCount> {
    let eq = solver.equation();
    let raw = solver.count(a);
    let f = solver.fourier_count(a);
    let rounded = f.re.round();
    let residual = (f - Complex64::new(rounded, 0.0)).norm();
    let den = (solver.group().size() as u128).pow(eq.s() as u32 - 1);
    let gcd = raw.gcd(&den).max(1);
    Ok(SolutionCount {
        raw,
        lambda_num: raw / gcd,
        lambda_den: den / gcd,
        lambda: raw as f64 / den as f64,
        trivial_lower: (a.len() as u128).pow(eq.genus() as u32),
        fourier_raw: f.re,
        fourier_residual: residual,
        fourier_agrees: residual < 1e-6 && rounded == raw as f64,
    })
}

/// `(true, None)` when every solution in `A` is trivial, else a witness.
pub fn is_solution_free(
    a: &PointSet,
    eq: &EquationSpec,
    n: usize,
    mode: Triviality,
) -> Result<(bool, Option<Vec<usize>>)> {
    let solver = Solver::new(eq, n)?;
    let w = solver.nontrivial(a, mode);
    Ok((w.is_none(), w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use std::sync::Arc;

    fn spec(q: u32, c: &[i64]) -> EquationSpec {
        EquationSpec::from_ints(Arc::new(FieldCtx::of_order(q).unwrap()), c).unwrap()
    }

    #[test]
    fn count_examples() {
        let e = spec(3, &[1, 1, 1]);
        let c = count_solutions(&PointSet::from_members(3, [0, 1]), &e, 1).unwrap();
        assert_eq!(c.raw, 2);
        assert_eq!((c.lambda_num, c.lambda_den), (2, 9));
        assert!(c.fourier_agrees);
        let c = count_solutions(&PointSet::full(3), &e, 1).unwrap();
        assert_eq!(c.raw, 9);
        assert_eq!((c.lambda_num, c.lambda_den), (1, 1));
        let e = spec(2, &[1, 1, 1, 1]);
        let c = count_solutions(&PointSet::full(8), &e, 3).unwrap();
        assert_eq!(c.raw, 512);
        assert!(c.fourier_agrees);
    }

    #[test]
    fn solution_free_examples() {
        let e = spec(3, &[1, 1, 1]);
        assert_eq!(
            is_solution_free(&PointSet::from_members(3, [2]), &e, 1, Triviality::Lenient).unwrap(),
            (true, None)
        );
        let (free, w) = is_solution_free(&PointSet::full(3), &e, 1, Triviality::Lenient).unwrap();
        assert!(!free);
        assert_eq!(w, Some(vec![0, 1, 2]));
        let e = spec(2, &[1, 1, 1, 1]);
        assert!(is_solution_free(&PointSet::full(2), &e, 1, Triviality::Lenient).unwrap().0);
    }

    #[test]
    fn polynomial_coefficients() {
        // c = (t, t, 1, 1) over F_2 has l = 1.
        let ctx = Arc::new(FieldCtx::of_order(2).unwrap());
        let t = crate::poly::GPoly::monomial(1, 2);
        let one = crate::poly::GPoly::constant(1, 2);
        let e = EquationSpec::new(ctx, vec![t.clone(), t, one.clone(), one]).unwrap();
        assert_eq!(e.ell(), 1);
        let a = PointSet::from_members(8, [0, 1, 3, 6]);
        let c = count_solutions(&a, &e, 3).unwrap();
        assert!(c.fourier_agrees);
        assert!(c.raw >= c.trivial_lower);
    }
}
