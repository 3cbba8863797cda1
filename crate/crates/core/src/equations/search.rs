//! Largest solution-free subsets of G_N.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::count::Solver;
use super::{EquationSpec, Triviality};
use crate::error::{Error, Result};
use crate::group::PointSet;
use crate::poly::GPoly;

/// Default largest `q^N` for exhaustive search.
pub const EXHAUSTIVE_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    Exhaustive,
    Greedy,
    RandomRestart,
}

impl SearchMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMethod::Exhaustive => "exhaustive",
            SearchMethod::Greedy => "greedy",
            SearchMethod::RandomRestart => "random-restart",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exhaustive" => Some(SearchMethod::Exhaustive),
            "greedy" => Some(SearchMethod::Greedy),
            "random-restart" => Some(SearchMethod::RandomRestart),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchRecord {
    pub q: u32,
    pub n: usize,
    pub c: Vec<GPoly>,
    /// Member indices in G_N.
    pub best_set: Vec<usize>,
    pub best_size: usize,
    pub method: SearchMethod,
    pub certified: bool,
}

impl SearchRecord {
    pub fn members_poly(&self) -> Vec<GPoly> {
        self.best_set
            .iter()
            .map(|&x| GPoly::from_index(x, self.q, self.n))
            .collect()
    }
}

fn record(eq: &EquationSpec, n: usize, set: &PointSet, method: SearchMethod) -> SearchRecord {
    SearchRecord {
        q: eq.ctx().q(),
        n,
        c: eq.coeffs().to_vec(),
        best_set: set.members().to_vec(),
        best_size: set.len(),
        method,
        certified: method == SearchMethod::Exhaustive,
    }
}

pub fn max_solution_free_exhaustive(n: usize, eq: &EquationSpec) -> Result<SearchRecord> {
    max_solution_free_exhaustive_with_limit(n, eq, EXHAUSTIVE_LIMIT)
}

/// Exhaustive search. Every nonempty solution-free set has a translate
/// containing 0, so only sets through 0 are enumerated.
pub fn max_solution_free_exhaustive_with_limit(
    n: usize,
    eq: &EquationSpec,
    limit: usize,
) -> Result<SearchRecord> {
    let size = (eq.ctx().q() as u128).saturating_pow(n as u32);
    if size > limit as u128 {
        return Err(Error::TooLarge {
            what: "exhaustive search domain",
            size,
            limit: limit as u128,
        });
    }
    let solver = Solver::new(eq, n)?;
    let size = size as usize;
    let mode = Triviality::Lenient;
    let root = PointSet::from_members(size, [0]);
    if solver.nontrivial(&root, mode).is_some() {
        // No nonempty set is solution-free.
        return Ok(record(eq, n, &PointSet::empty(size), SearchMethod::Exhaustive));
    }
    let global = AtomicUsize::new(1);
    let branches: Vec<PointSet> = (1..size)
        .into_par_iter()
        .filter_map(|second| {
            if solver.creates_solution(&root, second, mode) {
                return None;
            }
            let mut start = root.clone();
            start = start.union(&PointSet::from_members(size, [second]));
            let mut best = start.clone();
            dfs(&solver, &start, second + 1, mode, &mut best, &global);
            Some(best)
        })
        .collect();
    let best = branches
        .into_iter()
        .fold(root, |acc, b| if b.len() > acc.len() { b } else { acc });
    Ok(record(eq, n, &best, SearchMethod::Exhaustive))
}

fn dfs(
    solver: &Solver,
    cur: &PointSet,
    next: usize,
    mode: Triviality,
    best: &mut PointSet,
    global: &AtomicUsize,
) {
    if cur.len() > best.len() {
        *best = cur.clone();
        global.fetch_max(cur.len(), Ordering::Relaxed);
    }
    let size = cur.universe();
    for x in next..size {
        // Strict comparison keeps every maximum reachable in every branch.
        if cur.len() + (size - x) < global.load(Ordering::Relaxed).max(best.len()) {
            return;
        }
        if solver.creates_solution(cur, x, mode) {
            continue;
        }
        let mut mask = cur.mask().to_vec();
        mask[x] = true;
        dfs(solver, &PointSet::from_mask(mask), x + 1, mode, best, global);
    }
}

/// Greedy insertion in the given order.
fn greedy(solver: &Solver, start: PointSet, order: &[usize], mode: Triviality) -> PointSet {
    let mut mask = start.mask().to_vec();
    let mut cur = start;
    for &x in order {
        if !cur.contains(x) && !solver.creates_solution(&cur, x, mode) {
            mask[x] = true;
            cur = PointSet::from_mask(mask.clone());
        }
    }
    cur
}

/// Drop one element and refill greedily; keep any strict improvement.
fn local_search(solver: &Solver, mut cur: PointSet, order: &[usize], mode: Triviality) -> PointSet {
    loop {
        let mut improved = false;
        for &a in cur.members().to_vec().iter() {
            let mut mask = cur.mask().to_vec();
            mask[a] = false;
            let cand = greedy(
                solver,
                PointSet::from_mask(mask),
                &order.iter().copied().filter(|&x| x != a).collect::<Vec<_>>(),
                mode,
            );
            if cand.len() > cur.len() {
                cur = cand;
                improved = true;
                break;
            }
        }
        if !improved {
            return cur;
        }
    }
}

/// Greedy pass in index order, then `budget - 1` restarts in random orders,
/// each followed by local search.
pub fn max_solution_free_heuristic(
    n: usize,
    eq: &EquationSpec,
    budget: usize,
    seed: u64,
) -> Result<SearchRecord> {
    if budget == 0 {
        return Err(Error::InvalidArgument("search budget must be positive".into()));
    }
    let solver = Solver::new(eq, n)?;
    let size = solver.group().size();
    let mode = Triviality::Lenient;
    let mut order: Vec<usize> = (0..size).collect();
    let mut best = greedy(&solver, PointSet::empty(size), &order, mode);
    let mut method = SearchMethod::Greedy;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 1..budget {
        order.shuffle(&mut rng);
        let cand = greedy(&solver, PointSet::empty(size), &order, mode);
        let cand = local_search(&solver, cand, &order, mode);
        if cand.len() > best.len() {
            best = cand;
            method = SearchMethod::RandomRestart;
        }
    }
    if let Some(w) = solver.nontrivial(&best, mode) {
        return Err(Error::PreconditionViolation(format!(
            "heuristic result has non-trivial solution {w:?}"
        )));
    }
    Ok(record(eq, n, &best, method))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use std::sync::Arc;

    fn spec(q: u32, c: &[i64]) -> EquationSpec {
        EquationSpec::from_ints(Arc::new(FieldCtx::of_order(q).unwrap()), c).unwrap()
    }

    /// Plain subset enumeration.
    fn brute_r(eq: &EquationSpec, n: usize) -> usize {
        let solver = Solver::new(eq, n).unwrap();
        let size = solver.group().size();
        (0u32..1 << size)
            .filter_map(|bits| {
                let set = PointSet::from_members(size, (0..size).filter(|i| bits >> i & 1 == 1));
                solver.nontrivial(&set, Triviality::Lenient).is_none().then_some(set.len())
            })
            .max()
            .unwrap()
    }

    #[test]
    fn exhaustive_matches_enumeration() {
        let e = spec(3, &[1, 1, 1]);
        let r = max_solution_free_exhaustive(1, &e).unwrap();
        assert_eq!(r.best_size, 2);
        assert_eq!(r.best_set, vec![0, 1]);
        assert!(r.certified);
        assert_eq!(max_solution_free_exhaustive(2, &e).unwrap().best_size, brute_r(&e, 2));
        let e = spec(2, &[1, 1, 1, 1]);
        for n in 1..=3 {
            assert_eq!(max_solution_free_exhaustive(n, &e).unwrap().best_size, brute_r(&e, n));
        }
        assert!(matches!(
            max_solution_free_exhaustive(3, &spec(3, &[1, 1, 1])),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn heuristic_is_maximal_and_valid() {
        let e = spec(3, &[1, 1, 1]);
        let r = max_solution_free_heuristic(2, &e, 1, 0).unwrap();
        assert_eq!(r.method, SearchMethod::Greedy);
        let solver = Solver::new(&e, 2).unwrap();
        let set = PointSet::from_members(9, r.best_set.iter().copied());
        for x in 0..9 {
            if !set.contains(x) {
                assert!(solver.creates_solution(&set, x, Triviality::Lenient));
            }
        }
        assert!(max_solution_free_heuristic(2, &e, 0, 0).is_err());
    }
}
