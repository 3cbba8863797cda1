//! Spectra, symmetry sets, Chang dissection and the spectrum-to-increment step.

use rayon::prelude::*;
use serde::Serialize;

use crate::bohr::BohrSet;
use crate::error::{Error, Result};
use crate::fourier::{DualFreq, FourierPlan, GroupFn};
use crate::group::{sum_counts, GroupN, PointSet};
use crate::linalg::Subspace;
use crate::poly::GPoly;

/// Relative slack admitted at the spectrum threshold.
const TIE_SLACK: f64 = 1e-9;

/// `Delta_eta(f) = {xi : |f^(xi)| >= eta ||f||_1}` by dual index.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub eta: f64,
    pub l1: f64,
    /// `(dual index, |f^(xi)|)`, sorted by decreasing magnitude then index.
    pub entries: Vec<(usize, f64)>,
}

impl Spectrum {
    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn freqs(&self, g: &GroupN) -> Vec<DualFreq> {
        self.entries
            .iter()
            .map(|&(i, _)| DualFreq::from_dual_index(i, g.q(), g.n()))
            .collect()
    }
}

pub fn spectrum(f: &GroupFn, eta: f64) -> Result<Spectrum> {
    let fhat = FourierPlan::new(f.group()).forward(f);
    spectrum_from_hat(&fhat, f.l1_norm(), eta)
}

/// Threshold scan of a precomputed transform against the norm `l1`.
pub fn spectrum_from_hat(fhat: &GroupFn, l1: f64, eta: f64) -> Result<Spectrum> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidArgument(format!("eta = {eta} outside (0, 1]")));
    }
    if l1 == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let cut = eta * l1 - TIE_SLACK * l1;
    let mut entries: Vec<(usize, f64)> = fhat
        .values()
        .par_iter()
        .enumerate()
        .filter_map(|(i, v)| {
            let m = v.norm();
            (m >= cut).then_some((i, m))
        })
        .collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(Spectrum { eta, l1, entries })
}

/// `Sym_eta(L, K) = {x in B : L * K (x) >= eta}` with B-normalised convolution.
pub fn symmetry_set(
    g: &GroupN,
    l: &PointSet,
    k: &PointSet,
    eta: f64,
    b: &PointSet,
) -> Result<PointSet> {
    for s in [l, k] {
        if let Some(&x) = s.members().iter().find(|&&x| !b.contains(x)) {
            return Err(Error::SupportViolation(x));
        }
    }
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    let counts = sum_counts(g, l, k);
    let cut = eta * b.len() as f64 - TIE_SLACK;
    Ok(PointSet::from_members(
        g.size(),
        b.members().iter().copied().filter(|&x| counts[x] as f64 >= cut),
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct ChangOptions {
    /// Constant in the size diagnostic `C eta^{-2} max(1, ln(1/delta))`.
    pub c_chang: f64,
    /// Re-check dissociation and the cover property by span enumeration.
    pub verify: bool,
}

impl Default for ChangOptions {
    fn default() -> Self {
        ChangOptions {
            c_chang: 8.0,
            verify: false,
        }
    }
}

/// Largest dissociated set that can be verified by span enumeration.
pub const SPAN_CHECK_LIMIT: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct ChangResult {
    /// Dual indices of the dissociated set, in the order chosen.
    pub tilde: Vec<usize>,
    /// `C eta^{-2} max(1, ln(1/delta))`.
    pub size_bound: f64,
    pub within_bound: bool,
    /// `Some(true)` when verification ran and passed.
    pub verified: Option<bool>,
}

/// Greedy dissection of a frequency list in `G^ / W`, where every frequency
/// is given by its canonical representative modulo `W` (pivot coordinates of
/// `W` cleared). Canonical representatives form a subgroup, so index
/// arithmetic on them stays canonical.
fn dissect_canonical(
    g: &GroupN,
    freqs: &[usize],
    delta: f64,
    eta: f64,
    opts: ChangOptions,
) -> Result<ChangResult> {
    let mut span = vec![false; g.size()];
    let mut span_list = vec![0usize];
    span[0] = true;
    let mut tilde = Vec::new();
    for &gamma in freqs {
        if span[gamma] {
            continue;
        }
        tilde.push(gamma);
        let base = span_list.clone();
        for m in base {
            for v in [g.add(m, gamma), g.sub(m, gamma)] {
                if !span[v] {
                    span[v] = true;
                    span_list.push(v);
                }
            }
        }
    }
    let size_bound = opts.c_chang / (eta * eta) * (1.0f64).max((1.0 / delta).ln());
    let verified = if opts.verify {
        if tilde.len() > SPAN_CHECK_LIMIT {
            return Err(Error::SpanCheckOverflow(tilde.len()));
        }
        Some(is_dissociated(g, &tilde) && covers(g, &tilde, freqs))
    } else {
        None
    };
    Ok(ChangResult {
        within_bound: tilde.len() as f64 <= size_bound,
        tilde,
        size_bound,
        verified,
    })
}

/// Every `sum eps_i gamma_i` with `eps in {-1,0,1}^k`, counted with multiplicity
/// through the callback.
fn for_each_combination(g: &GroupN, gens: &[usize], mut visit: impl FnMut(&[i8], usize)) {
    let k = gens.len();
    let mut eps = vec![0i8; k];
    let total = 3usize.pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let mut acc = 0;
        for i in 0..k {
            eps[i] = (c % 3) as i8 - 1;
            c /= 3;
            acc = match eps[i] {
                1 => g.add(acc, gens[i]),
                -1 => g.sub(acc, gens[i]),
                _ => acc,
            };
        }
        visit(&eps, acc);
    }
}

/// No nonzero `{-1,0,1}`-combination of `gens` vanishes.
pub fn is_dissociated(g: &GroupN, gens: &[usize]) -> bool {
    let mut ok = true;
    for_each_combination(g, gens, |eps, v| {
        if v == 0 && eps.iter().any(|&e| e != 0) {
            ok = false;
        }
    });
    ok
}

/// Every frequency in `targets` lies in the `{-1,0,1}`-span of `gens`.
pub fn covers(g: &GroupN, gens: &[usize], targets: &[usize]) -> bool {
    let mut span = vec![false; g.size()];
    for_each_combination(g, gens, |_, v| span[v] = true);
    targets.iter().all(|&t| span[t])
}

/// Chang dissection of `Delta_eta(D)` in the full dual group.
pub fn chang_dissect(
    g: &GroupN,
    d: &PointSet,
    eta: f64,
    opts: ChangOptions,
) -> Result<(Spectrum, ChangResult)> {
    if d.is_empty() {
        return Err(Error::EmptySet);
    }
    let spec = spectrum(&GroupFn::indicator(g, d), eta)?;
    let delta = d.len() as f64 / g.size() as f64;
    let res = dissect_canonical(g, &spec.indices(), delta, eta, opts)?;
    Ok((spec, res))
}

/// The annihilator `B^perp = {xi : sum_i a_i b_{i+1} = 0 for all x in B}`.
pub fn annihilator(b: &BohrSet) -> Subspace {
    let ctx = b.ctx();
    let n = b.group().n();
    let rows = Subspace::span(ctx, n, b.basis().iter().cloned());
    Subspace::span(ctx, n, rows.null_space(ctx))
}

/// Canonical representative of a dual index modulo `w`.
pub fn canonical_dual(g: &GroupN, w: &Subspace, xi: usize) -> usize {
    let v = g.elem(xi);
    GPoly::from_coeffs(w.reduce(g.ctx(), v.coeffs())).index(g.q())
}

#[derive(Debug, Clone, Serialize)]
pub enum IncrementOutcome {
    HypothesisNotMet {
        sum: f64,
        target: f64,
    },
    Increment {
        #[serde(skip)]
        bprime: BohrSet,
        /// Centre `x in B` of the densest coset `x + B'`.
        x: usize,
        /// `(A * beta')(x) = |A ∩ (x + B')| / |B'|`.
        density: f64,
        alpha: f64,
        sum: f64,
        target: f64,
        tilde: Vec<usize>,
        spectrum_size: usize,
    },
}

/// `max_x |A ∩ (x + B')| / |B'|` over `x in B`, with the smallest maximising index.
pub fn densest_coset(g: &GroupN, a: &PointSet, b: &PointSet, bprime: &BohrSet) -> (usize, f64) {
    let ctx = g.ctx();
    let n = g.n();
    let sub = Subspace::span(ctx, n, bprime.basis().iter().cloned());
    let label = |x: usize| GPoly::from_coeffs(sub.reduce(ctx, g.elem(x).coeffs())).index(g.q());
    let mut counts = std::collections::HashMap::new();
    for &y in a.members() {
        *counts.entry(label(y)).or_insert(0u64) += 1;
    }
    let size = bprime.size() as f64;
    let mut best = (0usize, -1.0f64);
    for &x in b.members() {
        let c = counts.get(&label(x)).copied().unwrap_or(0) as f64 / size;
        if c > best.1 {
            best = (x, c);
        }
    }
    best
}

/// The spectrum-to-increment step for `A, D ⊆ B`.
pub fn increment_from_spectrum(
    a: &PointSet,
    d: &PointSet,
    b: &BohrSet,
    eta: f64,
    nu: f64,
    opts: ChangOptions,
) -> Result<IncrementOutcome> {
    let g = b.group();
    let bset = b.point_set()?;
    for s in [a, d] {
        if let Some(&x) = s.members().iter().find(|&&x| !bset.contains(x)) {
            return Err(Error::SupportViolation(x));
        }
    }
    if a.is_empty() || d.is_empty() {
        return Err(Error::DegenerateDensity);
    }
    let plan = FourierPlan::new(g);
    let alpha = a.len() as f64 / bset.len() as f64;
    let ahat = plan.forward(&GroupFn::balanced(g, a, &bset));
    let dfn = GroupFn::indicator(g, d);
    let spec = spectrum_from_hat(&plan.forward(&dfn), dfn.l1_norm(), eta)?;
    let sum: f64 = spec.entries.iter().map(|&(i, _)| ahat.get(i).norm_sqr()).sum();
    let target = nu * alpha * alpha * b.measure();
    if sum < target {
        return Ok(IncrementOutcome::HypothesisNotMet { sum, target });
    }
    let w = annihilator(b);
    let mut reps = Vec::new();
    let mut seen = vec![false; g.size()];
    for &(i, _) in &spec.entries {
        let r = canonical_dual(g, &w, i);
        if !seen[r] {
            seen[r] = true;
            reps.push(r);
        }
    }
    let delta = d.len() as f64 / bset.len() as f64;
    let chang = dissect_canonical(g, &reps, delta, eta, opts)?;
    let extra: Vec<DualFreq> = chang
        .tilde
        .iter()
        .map(|&i| DualFreq::from_dual_index(i, g.q(), g.n()))
        .collect();
    let bprime = b.refine(&extra, 1)?;
    let (x, density) = densest_coset(g, a, &bset, &bprime);
    Ok(IncrementOutcome::Increment {
        bprime,
        x,
        density,
        alpha,
        sum,
        target,
        tilde: chang.tilde,
        spectrum_size: spec.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn group(q: u32, n: usize) -> GroupN {
        GroupN::new(Arc::new(FieldCtx::of_order(q).unwrap()), n).unwrap()
    }

    #[test]
    fn spectrum_examples() {
        let g = group(3, 2);
        let one = GroupFn::constant(&g, 1.0);
        for eta in [0.1, 0.5, 1.0] {
            assert_eq!(spectrum(&one, eta).unwrap().indices(), vec![0]);
        }
        let delta = GroupFn::indicator(&g, &PointSet::from_members(9, [0]));
        assert_eq!(spectrum(&delta, 1.0).unwrap().len(), 9);
        // H = {a_0 = 0}: annihilator is {b : b_2 = 0}, the duals 0, 1, 2.
        let h = PointSet::from_members(9, [0, 3, 6]);
        let s = spectrum(&GroupFn::indicator(&g, &h), 1.0).unwrap();
        let mut idx = s.indices();
        idx.sort();
        assert_eq!(idx, vec![0, 1, 2]);
        assert_eq!(
            spectrum(&GroupFn::zero(&g), 0.5).unwrap_err(),
            Error::ZeroFunction
        );
    }

    #[test]
    fn symmetry_examples() {
        let g = group(3, 2);
        let b = PointSet::full(9);
        assert_eq!(symmetry_set(&g, &b, &b, 1.0, &b).unwrap(), b);
        let h = PointSet::from_members(9, [0, 3, 6]);
        assert_eq!(symmetry_set(&g, &h, &h, 1.0 / 3.0, &b).unwrap(), h);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let l = PointSet::from_members(9, (0..9).filter(|_| rng.gen_bool(0.5)));
            let k = PointSet::from_members(9, (0..9).filter(|_| rng.gen_bool(0.5)));
            let lhs = symmetry_set(&g, &l, &k.negate(&g), 0.2, &b).unwrap();
            let rhs = symmetry_set(&g, &l.negate(&g), &k, 0.2, &b).unwrap().negate(&g);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn chang_examples() {
        let g = group(3, 2);
        let (_, res) = chang_dissect(&g, &PointSet::full(9), 0.5, ChangOptions::default()).unwrap();
        assert!(res.tilde.is_empty());
        // gamma and 2 gamma: one generator suffices.
        let gamma = 1;
        let two = g.scale(2, gamma);
        let r = dissect_canonical(&g, &[gamma, two], 0.5, 0.5, ChangOptions { verify: true, ..Default::default() }).unwrap();
        assert_eq!(r.tilde, vec![gamma]);
        assert_eq!(r.verified, Some(true));
        let r = dissect_canonical(&g, &[1, 3], 0.5, 0.5, ChangOptions::default()).unwrap();
        assert_eq!(r.tilde, vec![1, 3]);
    }

    #[test]
    fn increment_trivial_and_subspace() {
        let g = group(3, 2);
        let b = BohrSet::whole(&g);
        let full = PointSet::full(9);
        let out = increment_from_spectrum(&full, &full, &b, 0.5, 0.1, ChangOptions::default()).unwrap();
        assert!(matches!(out, IncrementOutcome::HypothesisNotMet { .. }));
        let h = PointSet::from_members(9, [0, 3, 6]);
        let out = increment_from_spectrum(&h, &h, &b, 1.0 / 6.0, 2.0 - 1e-3, ChangOptions::default())
            .unwrap();
        match out {
            IncrementOutcome::Increment { density, .. } => assert!((density - 1.0).abs() < 1e-12),
            other => panic!("expected increment, got {other:?}"),
        }
    }
}
