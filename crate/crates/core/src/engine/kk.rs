//! The Katz–Koester step and its iteration.

use serde::Serialize;

use super::{ensure_nonempty, ensure_within, fold_counts, translate_density};
use crate::bohr::BohrSet;
use crate::error::Result;
use crate::group::{GroupN, PointSet};
use crate::spectral::{increment_from_spectrum, symmetry_set, ChangOptions, IncrementOutcome};

#[derive(Debug, Clone, Serialize)]
pub enum KkStepOutcome {
    /// `L' = L ∪ (K + x)`, `S' = S ∩ (T - x)`.
    Transformed {
        l: PointSet,
        s: PointSet,
        x: usize,
    },
    /// A Bohr set `B' ⊆ B` and translate with `beta'(K + translate) = density`.
    Increment {
        #[serde(skip)]
        bprime: BohrSet,
        translate: usize,
        density: f64,
        /// `lambda >= 1/4`: the conclusion holds with `B' = B`.
        trivial: bool,
    },
    /// The spectral hypothesis failed numerically; no conclusion drawn.
    Stalled { sum: f64, target: f64 },
}

pub fn kk_step(
    k: &PointSet,
    t: &PointSet,
    l: &PointSet,
    s: &PointSet,
    b: &BohrSet,
    opts: ChangOptions,
) -> Result<KkStepOutcome> {
    let g = b.group();
    let bset = b.point_set()?;
    for set in [k, t, l, s] {
        ensure_within(set, &bset)?;
    }
    ensure_nonempty(&[k, t, l, s])?;
    let n = bset.len() as f64;
    let (kappa, tau, lambda, sigma) = (
        k.len() as f64 / n,
        t.len() as f64 / n,
        l.len() as f64 / n,
        s.len() as f64 / n,
    );
    let good = symmetry_set(g, &s.negate(g), t, tau * sigma / 2.0, &bset)?;
    let bad = symmetry_set(g, l, &k.negate(g), kappa / 2.0, &bset)?;
    if let Some(&x) = good.members().iter().find(|&&x| !bad.contains(x)) {
        let l2 = l.union(&k.translate(g, x));
        let s2 = s.intersection(&t.translate(g, g.neg(x)));
        return Ok(KkStepOutcome::Transformed { l: l2, s: s2, x });
    }
    if lambda >= 0.25 {
        return Ok(KkStepOutcome::Increment {
            bprime: b.clone(),
            translate: 0,
            density: kappa,
            trivial: true,
        });
    }
    let d = symmetry_set(g, &l.negate(g), k, kappa / 2.0, &bset)?;
    let eta = (kappa / (32.0 * lambda)).sqrt().min(1.0);
    let nu = 1.0 / (32.0 * lambda);
    match increment_from_spectrum(k, &d, b, eta, nu, opts)? {
        IncrementOutcome::HypothesisNotMet { sum, target } => {
            Ok(KkStepOutcome::Stalled { sum, target })
        }
        IncrementOutcome::Increment {
            bprime, x, density, ..
        } => Ok(KkStepOutcome::Increment {
            bprime,
            translate: g.neg(x),
            density,
            trivial: false,
        }),
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum KkOutcome {
    /// `beta'(A_1 + translate) = density`, claimed `>= 2 alpha_1`.
    Increment {
        #[serde(skip)]
        bprime: BohrSet,
        translate: usize,
        density: f64,
        doubled: bool,
        level: usize,
    },
    /// Sets with `L * S_1 * ... * S_k <= alpha_1^{-2} A_1 * ... * A_{k+1}`.
    Transformed {
        l: PointSet,
        s: Vec<PointSet>,
        lambda: f64,
        sigmas: Vec<f64>,
        certified_pointwise: bool,
        /// Level at which the procedure ended early, if it did.
        early_level: Option<usize>,
    },
    Stalled {
        level: usize,
        sum: f64,
        target: f64,
    },
}

/// `a * L <= b * R` at every point, for fold counts `L`, `R`.
fn dominated(lhs: &[u128], a: u128, rhs: &[u128], b: u128) -> bool {
    lhs.iter().zip(rhs).all(|(&l, &r)| a * l <= b * r)
}

/// The iterated transformation with `k = rest.len()` levels.
pub fn kk_transform(
    a1: &PointSet,
    rest: &[PointSet],
    b: &BohrSet,
    opts: ChangOptions,
) -> Result<KkOutcome> {
    let g = b.group();
    let bset = b.point_set()?;
    let k = rest.len();
    ensure_within(a1, &bset)?;
    for r in rest {
        ensure_within(r, &bset)?;
    }
    let mut all: Vec<&PointSet> = vec![a1];
    all.extend(rest.iter());
    ensure_nonempty(&all)?;
    let n = bset.len() as f64;
    let alpha1 = a1.len() as f64 / n;
    let inner_steps = alpha1.powf(-1.0 / k as f64).ceil().max(1.0) as usize;

    let mut l_prev = a1.clone();
    let mut s_done: Vec<PointSet> = Vec::new();
    let mut xs: Vec<Vec<usize>> = Vec::new();
    let mut early = None;

    'levels: for j in 1..=k {
        let tj = &rest[j - 1];
        let mut lj = l_prev.clone();
        let mut sj = tj.clone();
        let mut xj = vec![0usize];
        for _ in 1..inner_steps {
            match kk_step(&l_prev, tj, &lj, &sj, b, opts)? {
                KkStepOutcome::Transformed { l, s, x } => {
                    lj = l;
                    sj = s;
                    if !xj.contains(&x) {
                        xj.push(x);
                    }
                }
                KkStepOutcome::Stalled { sum, target } => {
                    return Ok(KkOutcome::Stalled { level: j, sum, target });
                }
                KkStepOutcome::Increment {
                    bprime,
                    translate,
                    trivial,
                    ..
                } => {
                    let lambda = lj.len() as f64 / n;
                    if trivial || lambda > 2f64.powi(-(j as i32) - 6) {
                        s_done.push(sj);
                        l_prev = lj;
                        early = Some(j);
                        break 'levels;
                    }
                    // Pigeonhole over A_1 + x_1 + ... + x_{j-1} + translate.
                    let bp = bprime.point_set()?;
                    let mut shifts = vec![translate];
                    for x in &xs {
                        shifts = shifts
                            .iter()
                            .flat_map(|&s0| x.iter().map(move |&d| g.add(s0, d)))
                            .collect();
                    }
                    let (best_t, best_d) = shifts
                        .iter()
                        .map(|&t| (t, translate_density(g, a1, t, &bp)))
                        .fold((translate, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
                    return Ok(KkOutcome::Increment {
                        bprime,
                        translate: best_t,
                        density: best_d,
                        doubled: best_d >= 2.0 * alpha1 - 1e-12,
                        level: j,
                    });
                }
            }
        }
        s_done.push(sj);
        xs.push(xj);
        l_prev = lj;
    }
    // Levels skipped by an early exit keep their original sets.
    let mut s_all = s_done;
    while s_all.len() < k {
        s_all.push(rest[s_all.len()].clone());
    }
    let lhs: Vec<&PointSet> = std::iter::once(&l_prev).chain(s_all.iter()).collect();
    let cl = fold_counts(g, &lhs);
    let ca = fold_counts(g, &all);
    let a = a1.len() as u128;
    let bb = bset.len() as u128;
    let certified = dominated(&cl, a * a, &ca, bb * bb);
    Ok(KkOutcome::Transformed {
        lambda: l_prev.len() as f64 / n,
        sigmas: s_all.iter().map(|s| s.len() as f64 / n).collect(),
        l: l_prev,
        s: s_all,
        certified_pointwise: certified,
        early_level: early,
    })
}

/// Exact check of `L' * S' <= L * S + K * T` at every point.
pub fn kk_step_pointwise(
    g: &GroupN,
    k: &PointSet,
    t: &PointSet,
    l: &PointSet,
    s: &PointSet,
    l2: &PointSet,
    s2: &PointSet,
) -> bool {
    let new = fold_counts(g, &[l2, s2]);
    let ls = fold_counts(g, &[l, s]);
    let kt = fold_counts(g, &[k, t]);
    (0..g.size()).all(|x| new[x] <= ls[x] + kt[x])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use std::sync::Arc;

    fn group(q: u32, n: usize) -> GroupN {
        GroupN::new(Arc::new(FieldCtx::of_order(q).unwrap()), n).unwrap()
    }

    #[test]
    fn step_on_whole_sets() {
        // Every x lies in Sym_{1/2}(B, -B), and lambda = 1 >= 1/4.
        let g = group(3, 2);
        let b = BohrSet::whole(&g);
        let full = PointSet::full(9);
        match kk_step(&full, &full, &full, &full, &b, ChangOptions::default()).unwrap() {
            KkStepOutcome::Increment {
                translate,
                density,
                trivial,
                ..
            } => {
                assert_eq!(translate, 0);
                assert_eq!(density, 1.0);
                assert!(trivial);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn step_transforms_sparse_l() {
        // L = {0}, K = S = T = B: L * (-K) = 1/9 everywhere, so
        // Sym_{1/2}(L, -K) is empty and x = 0 is the first candidate.
        let g = group(3, 2);
        let b = BohrSet::whole(&g);
        let full = PointSet::full(9);
        let l = PointSet::from_members(9, [0]);
        match kk_step(&full, &full, &l, &full, &b, ChangOptions::default()).unwrap() {
            KkStepOutcome::Transformed { l: l2, s: s2, x } => {
                assert_eq!(x, 0);
                assert_eq!(l2, full);
                assert_eq!(s2, full);
                assert!(kk_step_pointwise(&g, &full, &full, &l, &full, &l2, &s2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn transform_on_whole_sets() {
        let g = group(3, 2);
        let b = BohrSet::whole(&g);
        let full = PointSet::full(9);
        match kk_transform(&full, &[full.clone()], &b, ChangOptions::default()).unwrap() {
            KkOutcome::Transformed {
                l,
                s,
                certified_pointwise,
                ..
            } => {
                assert_eq!(l, full);
                assert_eq!(s, vec![full]);
                assert!(certified_pointwise);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_degenerate() {
        let g = group(2, 3);
        let b = BohrSet::whole(&g);
        let full = PointSet::full(8);
        let e = PointSet::empty(8);
        assert_eq!(
            kk_step(&e, &full, &full, &full, &b, ChangOptions::default()).unwrap_err(),
            crate::Error::DegenerateDensity
        );
    }
}
