//! The combined dichotomy and the density increment iteration.

use serde::Serialize;

use super::cs::{cs_increment, CsOutcome};
use super::kk::{kk_transform, KkOutcome};
use super::{ensure_nonempty, ensure_within, inner_beta, TuningConstants};
use crate::bohr::BohrSet;
use crate::equations::EquationSpec;
use crate::error::{Error, Result};
use crate::group::{sum_counts, GroupN, PointSet};
use crate::linalg::Subspace;
use crate::poly::GPoly;

#[derive(Debug, Clone, Serialize)]
pub enum Dichotomy {
    /// `value = <A_1 * ... * A_{s-1}, A_s>_beta`, evaluated exactly.
    InnerProductLarge { value: f64, threshold: f64 },
    /// `beta'(A_index + translate) = density`, with `index` 1-based.
    Increment {
        #[serde(skip)]
        bprime: BohrSet,
        translate: usize,
        density: f64,
        index: usize,
        alpha: f64,
    },
    /// A spectral or almost-periodicity hypothesis failed numerically.
    Stalled {
        stage: &'static str,
        value: f64,
        target: f64,
    },
}

/// `l = max(1, ceil(ln(1/alpha)))`.
fn fold_length(alpha: f64) -> usize {
    ((1.0 / alpha).ln().ceil() as usize).max(1)
}

pub fn density_dichotomy(
    sets: &[PointSet],
    b: &BohrSet,
    tuning: &TuningConstants,
) -> Result<Dichotomy> {
    let s = sets.len();
    if s < 3 {
        return Err(Error::InvalidArgument(format!("need s >= 3 sets, got {s}")));
    }
    let g = b.group();
    let bset = b.point_set()?;
    for a in sets {
        ensure_within(a, &bset)?;
    }
    ensure_nonempty(&sets.iter().collect::<Vec<_>>())?;
    let n = bset.len() as f64;
    let alpha = sets.iter().map(|a| a.len() as f64 / n).fold(1.0, f64::min);
    let (a1, middle, a_s) = (&sets[0], &sets[1..s - 1], &sets[s - 1]);
    match kk_transform(a1, middle, b, tuning.chang())? {
        KkOutcome::Increment {
            bprime,
            translate,
            density,
            ..
        } => Ok(Dichotomy::Increment {
            bprime,
            translate,
            density,
            index: 1,
            alpha: a1.len() as f64 / n,
        }),
        KkOutcome::Stalled { sum, target, .. } => Ok(Dichotomy::Stalled {
            stage: "katz-koester",
            value: sum,
            target,
        }),
        KkOutcome::Transformed { l, s: s_sets, .. } => {
            match cs_increment(a_s, &l, &s_sets, b, fold_length(alpha), tuning)? {
                CsOutcome::InnerProductLarge { threshold, .. } => {
                    let refs: Vec<&PointSet> = sets[..s - 1].iter().collect();
                    let value = inner_beta(g, &refs, a_s, bset.len());
                    Ok(Dichotomy::InnerProductLarge { value, threshold })
                }
                CsOutcome::Increment {
                    bprime,
                    translate,
                    density,
                    alpha,
                    ..
                } => Ok(Dichotomy::Increment {
                    bprime,
                    translate,
                    density,
                    index: s,
                    alpha,
                }),
                CsOutcome::Stalled {
                    value, threshold, ..
                } => Ok(Dichotomy::Stalled {
                    stage: "croot-sisask",
                    value,
                    target: threshold,
                }),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Dilation,
    IncrementKk,
    IncrementCs,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub i: usize,
    pub rank: usize,
    pub bohr_size: u128,
    pub density: f64,
    pub branch: Branch,
    pub translate: usize,
    /// The `j` of `B_j` on a dilation step, or the set index on an increment.
    pub dilation: Option<usize>,
    pub new_density: f64,
    pub growth: f64,
}

#[derive(Debug, Clone, Serialize)]
pub enum Terminal {
    /// `Lambda(A) >= measure^{s-1} * value`.
    Certificate {
        lambda_lower: f64,
        value: f64,
        measure: f64,
    },
    /// An increment came back below the guaranteed growth factor.
    BranchInfeasible {
        density: f64,
        required: f64,
        index: usize,
    },
    /// The dichotomy could not decide at this scale.
    Stalled { stage: String, value: f64, target: f64 },
    /// Some dilated piece `A_j` is empty, so no solutions are certified.
    Degenerate,
    /// The Bohr sets left the range where they can be built.
    ScaleExhausted { reason: String },
    /// The step budget `C ln(1/alpha) + 1` ran out.
    StepLimit { steps: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub alpha: f64,
    pub initial_density: f64,
    pub c_prime: f64,
    pub step_limit: usize,
    pub steps: Vec<IterationRecord>,
    pub terminal: Terminal,
    /// Some recorded density exceeded 1; must never happen.
    pub invariant_violation: bool,
}

/// Smallest-label coset `v + B` maximising `|A ∩ (v + B)|`, labelled by
/// reduction modulo the span of `B`.
fn densest_translate(g: &GroupN, a: &PointSet, b: &BohrSet) -> usize {
    let ctx = g.ctx();
    let sub = Subspace::span(ctx, g.n(), b.basis().iter().cloned());
    let mut counts = std::collections::BTreeMap::new();
    for &y in a.members() {
        let label = GPoly::from_coeffs(sub.reduce(ctx, g.elem(y).coeffs())).index(g.q());
        *counts.entry(label).or_insert(0usize) += 1;
    }
    counts
        .iter()
        .fold((0usize, 0usize), |acc, (&l, &c)| if c > acc.1 { (l, c) } else { acc })
        .0
}

fn product(g: &GroupN, polys: &[&GPoly]) -> GPoly {
    let ctx = g.ctx();
    polys
        .iter()
        .fold(GPoly::constant(1, 1), |acc, c| acc.mul(ctx, c))
}

fn scale_error(e: Error) -> Result<String> {
    match e {
        Error::DomainViolation { .. } | Error::TooLarge { .. } | Error::PrecisionTooLow { .. } => {
            Ok(e.to_string())
        }
        other => Err(other),
    }
}

macro_rules! or_exhausted {
    ($e:expr, $traj:ident) => {
        match $e {
            Ok(v) => v,
            Err(err) => {
                let reason = scale_error(err)?;
                $traj.terminal = Terminal::ScaleExhausted { reason };
                return Ok($traj);
            }
        }
    };
}

pub fn run_density_iteration(
    a: &PointSet,
    g: &GroupN,
    eq: &EquationSpec,
    tuning: &TuningConstants,
) -> Result<Trajectory> {
    let s = eq.s();
    let sl = s * eq.ell();
    if g.n() <= sl {
        return Err(Error::ScaleTooSmall { n: g.n(), sl });
    }
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let c = eq.coeffs();
    let c_inc = tuning.c_increment;
    let c_prime = tuning.c_prime(s);
    let dilation_factor = 1.0 + c_inc / (2.0 * (s as f64 - 1.0));
    let alpha = a.len() as f64 / g.size() as f64;
    let step_limit = (tuning.step_constant(s) * (1.0 / alpha).ln()).floor() as usize + 1;

    let b1 = BohrSet::low_degree(g, sl)?;
    let b1_set = b1.point_set()?;
    let v = densest_translate(g, a, &b1);
    let mut cur_a = a.translate(g, g.neg(v)).intersection(&b1_set);
    let mut cur_b = b1;
    let mut cur_alpha = cur_a.len() as f64 / b1_set.len() as f64;
    let mut traj = Trajectory {
        alpha,
        initial_density: cur_alpha,
        c_prime,
        step_limit,
        steps: Vec::new(),
        terminal: Terminal::StepLimit { steps: step_limit },
        invariant_violation: cur_alpha > 1.0,
    };

    for i in 1..=step_limit {
        let b_sl = or_exhausted!(cur_b.narrow(sl), traj);
        let mut b_j = Vec::with_capacity(s);
        for j in 0..s {
            let others: Vec<&GPoly> = (0..s).filter(|&k| k != j).map(|k| &c[k]).collect();
            b_j.push(or_exhausted!(b_sl.dilate(&product(g, &others)), traj));
        }
        let b_j_sets: Vec<PointSet> = b_j
            .iter()
            .map(|b| b.point_set())
            .collect::<Result<_>>()?;
        let b_sets = cur_b.point_set()?;

        // |A ∩ (x + B_j)| = #{(a, y) : a - y = x, y in B_j}.
        let per_j: Vec<Vec<u64>> = b_j_sets
            .iter()
            .map(|bj| sum_counts(g, &cur_a, &bj.negate(g)))
            .collect();
        let score = |x: usize| -> f64 {
            per_j
                .iter()
                .zip(&b_j_sets)
                .map(|(cnt, bj)| cnt[x] as f64 / bj.len() as f64)
                .sum()
        };
        let x = b_sets
            .members()
            .iter()
            .copied()
            .fold((0usize, f64::NEG_INFINITY), |acc, x| {
                let v = score(x);
                if v > acc.1 {
                    (x, v)
                } else {
                    acc
                }
            })
            .0;
        let dens: Vec<f64> = per_j
            .iter()
            .zip(&b_j_sets)
            .map(|(cnt, bj)| cnt[x] as f64 / bj.len() as f64)
            .collect();

        let rank = cur_b.rank();
        let bohr_size = cur_b.size();
        let shifted = cur_a.translate(g, g.neg(x));

        if let Some(j) = (0..s).find(|&j| dens[j] >= cur_alpha * dilation_factor) {
            let new_a = shifted.intersection(&b_j_sets[j]);
            let new_alpha = new_a.len() as f64 / b_j_sets[j].len() as f64;
            traj.invariant_violation |= new_alpha > 1.0;
            traj.steps.push(IterationRecord {
                i,
                rank,
                bohr_size,
                density: cur_alpha,
                branch: Branch::Dilation,
                translate: x,
                dilation: Some(j + 1),
                new_density: new_alpha,
                growth: new_alpha / cur_alpha,
            });
            cur_a = new_a;
            cur_b = b_j.swap_remove(j);
            cur_alpha = new_alpha;
            continue;
        }

        let bprime = or_exhausted!(b_sl.dilate(&product(g, &c.iter().collect::<Vec<_>>())), traj);
        let mut pieces = Vec::with_capacity(s);
        for j in 0..s {
            let part = shifted.intersection(&b_j_sets[j]);
            let cj = if j == s - 1 {
                c[j].neg(g.ctx())
            } else {
                c[j].clone()
            };
            pieces.push(or_exhausted!(part.dilate(g, &cj), traj));
        }
        if pieces.iter().any(|p| p.is_empty()) {
            traj.terminal = Terminal::Degenerate;
            return Ok(traj);
        }
        match or_exhausted!(density_dichotomy(&pieces, &bprime, tuning), traj) {
            Dichotomy::InnerProductLarge { value, .. } => {
                let measure = bprime.measure();
                traj.terminal = Terminal::Certificate {
                    lambda_lower: measure.powi(s as i32 - 1) * value,
                    value,
                    measure,
                };
                return Ok(traj);
            }
            Dichotomy::Stalled {
                stage,
                value,
                target,
            } => {
                traj.terminal = Terminal::Stalled {
                    stage: stage.to_string(),
                    value,
                    target,
                };
                return Ok(traj);
            }
            Dichotomy::Increment {
                bprime: b2,
                translate,
                index,
                ..
            } => {
                let b2_set = b2.point_set()?;
                let new_a = pieces[index - 1].translate(g, translate).intersection(&b2_set);
                let new_alpha = new_a.len() as f64 / b2_set.len() as f64;
                traj.invariant_violation |= new_alpha > 1.0;
                let required = cur_alpha * (1.0 + c_prime);
                if new_alpha < required {
                    traj.terminal = Terminal::BranchInfeasible {
                        density: new_alpha,
                        required,
                        index,
                    };
                    return Ok(traj);
                }
                traj.steps.push(IterationRecord {
                    i,
                    rank,
                    bohr_size,
                    density: cur_alpha,
                    branch: if index == 1 {
                        Branch::IncrementKk
                    } else {
                        Branch::IncrementCs
                    },
                    translate: x,
                    dilation: Some(index),
                    new_density: new_alpha,
                    growth: new_alpha / cur_alpha,
                });
                cur_a = new_a;
                cur_b = b2;
                cur_alpha = new_alpha;
            }
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use std::sync::Arc;

    #[test]
    fn whole_sets_give_inner_product() {
        let g = GroupN::new(Arc::new(FieldCtx::of_order(3).unwrap()), 2).unwrap();
        let b = BohrSet::whole(&g);
        let full = PointSet::full(9);
        let sets = vec![full.clone(), full.clone(), full];
        match density_dichotomy(&sets, &b, &TuningConstants::default()).unwrap() {
            Dichotomy::InnerProductLarge { value, .. } => assert!((value - 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        let e = PointSet::empty(9);
        let sets = vec![e, PointSet::full(9), PointSet::full(9)];
        assert_eq!(
            density_dichotomy(&sets, &b, &TuningConstants::default()).unwrap_err(),
            Error::DegenerateDensity
        );
    }

    #[test]
    fn whole_group_certificate_matches_count() {
        let ctx = Arc::new(FieldCtx::of_order(3).unwrap());
        let g = GroupN::new(ctx.clone(), 2).unwrap();
        let eq = EquationSpec::from_ints(ctx, &[1, 1, 1]).unwrap();
        let t = run_density_iteration(&PointSet::full(9), &g, &eq, &TuningConstants::default())
            .unwrap();
        assert!(t.steps.is_empty());
        match t.terminal {
            Terminal::Certificate { lambda_lower, .. } => {
                assert!((lambda_lower - 1.0).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scale_too_small() {
        let ctx = Arc::new(FieldCtx::of_order(2).unwrap());
        let g = GroupN::new(ctx.clone(), 3).unwrap();
        let t = GPoly::monomial(1, 2);
        let one = GPoly::constant(1, 2);
        let eq = EquationSpec::new(ctx, vec![t.clone(), t, one.clone(), one]).unwrap();
        assert_eq!(
            run_density_iteration(&PointSet::full(8), &g, &eq, &TuningConstants::default())
                .unwrap_err(),
            Error::ScaleTooSmall { n: 3, sl: 4 }
        );
    }
}
