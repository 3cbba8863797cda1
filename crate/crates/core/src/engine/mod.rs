//! The density increment machinery: Katz–Koester transformation, Croot–Sisask
//! almost periodicity, the combined dichotomy and the iteration driver.
//!
//! Sets are subsets of G_N given as [`PointSet`]s inside a Bohr set `B`.
//! Set convolutions are normalised by `B` and evaluated from exact integer
//! counts, so pointwise inequalities between them are decided exactly.

pub mod cs;
pub mod driver;
pub mod kk;
pub mod tuning;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{GroupN, PointSet};

pub use cs::{cs_increment, cs_sample, cs_translates, CsOutcome, CsTranslates};
pub use driver::{density_dichotomy, run_density_iteration, Dichotomy, Terminal, Trajectory};
pub use kk::{kk_step, kk_transform, KkOutcome, KkStepOutcome};
pub use tuning::TuningConstants;

/// `counts[x] = #{(y_1, ..., y_m) in S_1 x ... x S_m : y_1 + ... + y_m = x}`.
pub fn fold_counts(g: &GroupN, sets: &[&PointSet]) -> Vec<u128> {
    let mut cnt: Vec<u128> = match sets.first() {
        Some(s) => s.mask().iter().map(|&b| b as u128).collect(),
        None => {
            let mut v = vec![0; g.size()];
            v[0] = 1;
            v
        }
    };
    for s in sets.iter().skip(1) {
        cnt = (0..g.size())
            .into_par_iter()
            .map(|x| s.members().iter().map(|&y| cnt[g.sub(x, y)]).sum())
            .collect();
    }
    cnt
}

/// `<S_1 * ... * S_m, A>_beta` for B-normalised convolution, i.e.
/// `#{tuples with sum in A} / |B|^m`.
pub fn inner_beta(g: &GroupN, sets: &[&PointSet], a: &PointSet, b_size: usize) -> f64 {
    let cnt = fold_counts(g, sets);
    let hits: u128 = a.members().iter().map(|&x| cnt[x]).sum();
    hits as f64 / (b_size as f64).powi(sets.len() as i32)
}

pub(crate) fn ensure_within(set: &PointSet, b: &PointSet) -> Result<()> {
    match set.members().iter().find(|&&x| !b.contains(x)) {
        Some(&x) => Err(Error::SupportViolation(x)),
        None => Ok(()),
    }
}

pub(crate) fn ensure_nonempty(sets: &[&PointSet]) -> Result<()> {
    if sets.iter().any(|s| s.is_empty()) {
        Err(Error::DegenerateDensity)
    } else {
        Ok(())
    }
}

/// `|X ∩ B'| / |B'|` for the translate `X = A + t`.
pub(crate) fn translate_density(g: &GroupN, a: &PointSet, t: usize, bprime: &PointSet) -> f64 {
    let hits = a.members().iter().filter(|&&y| bprime.contains(g.add(y, t))).count();
    hits as f64 / bprime.len() as f64
}
