//! Characters, the Fourier transform, and convolutions on G_N.
//!
//! A frequency `xi = sum_{k>=1} b_k t^{-k}` acts on `x in G_N` through
//! `e(xi x) = exp(2 pi i Tr(a_{-1}) / p)`, where `a_{-1}` is the `t^{-1}`
//! coefficient of `xi x`. On G_N only `b_1..b_N` matter, so the dual group is
//! indexed like G_N itself: dual index `sum_k b_{k+1} q^k`.
//!
//! The pairing `(x, xi) -> Tr(sum_i a_i b_{i+1})` splits over the `eN`
//! F_p-coordinates of `x`, so the transform runs as `eN` stages of p-point
//! DFTs followed by a fixed relabelling of the output index.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bohr::BohrSet;
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::group::{GroupN, PointSet};
use crate::poly::{laurent_divide, GPoly, LaurentTail};

/// An element of the dual group, kept either exactly as the fractional part
/// of a rational function or as a tail supplied with finite precision.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DualFreq {
    /// `{num / den}`; every coefficient is available.
    Rational { num: GPoly, den: GPoly },
    /// Known coefficients of `t^{-1} .. t^{-D}` only.
    Truncated(LaurentTail),
}

impl DualFreq {
    pub fn zero() -> Self {
        DualFreq::Truncated(LaurentTail::zero(0)).exactify()
    }

    fn exactify(self) -> Self {
        match self {
            DualFreq::Truncated(t) if t.is_zero() => DualFreq::Rational {
                num: GPoly::zero(1),
                den: GPoly::constant(1, 1),
            },
            other => other,
        }
    }

    /// `t^{-k}`, exact.
    pub fn monomial(k: usize) -> Self {
        assert!(k >= 1);
        DualFreq::Rational {
            num: GPoly::constant(1, 1),
            den: GPoly::monomial(k, k + 1),
        }
    }

    /// Exact frequency `sum_{k=1}^{n} b_k t^{-k}` from its coefficients.
    pub fn from_coeffs(coeffs: &[u32]) -> Self {
        let n = coeffs.len();
        if n == 0 {
            return DualFreq::zero();
        }
        // sum b_k t^{-k} = (sum b_k t^{n-k}) / t^n
        let mut num = vec![0; n];
        for (k, &b) in coeffs.iter().enumerate() {
            num[n - 1 - k] = b;
        }
        DualFreq::Rational {
            num: GPoly::from_coeffs(num),
            den: GPoly::monomial(n, n + 1),
        }
    }

    /// Exact frequency with the given dual index in the dual of G_n.
    pub fn from_dual_index(idx: usize, q: u32, n: usize) -> Self {
        DualFreq::from_coeffs(GPoly::from_index(idx, q, n).coeffs())
    }

    pub fn truncated(tail: LaurentTail) -> Self {
        DualFreq::Truncated(tail)
    }

    /// `{num / den}`.
    pub fn rational(num: GPoly, den: GPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        Ok(DualFreq::Rational { num, den })
    }

    /// Number of reliable tail coefficients, `None` when unbounded.
    pub fn precision(&self) -> Option<usize> {
        match self {
            DualFreq::Rational { .. } => None,
            DualFreq::Truncated(t) => Some(t.precision()),
        }
    }

    /// Tail coefficients of `t^{-1} .. t^{-precision}`.
    pub fn tail(&self, ctx: &FieldCtx, precision: usize) -> Result<LaurentTail> {
        match self {
            DualFreq::Rational { num, den } => {
                Ok(laurent_divide(ctx, num, den, precision)?.tail)
            }
            DualFreq::Truncated(t) => {
                if t.precision() < precision {
                    Err(Error::PrecisionTooLow {
                        have: t.precision(),
                        need: precision,
                    })
                } else {
                    Ok(t.truncate(precision))
                }
            }
        }
    }

    /// Index of the character this frequency induces on G_n.
    pub fn dual_index(&self, ctx: &FieldCtx, n: usize) -> Result<usize> {
        let tail = self.tail(ctx, n)?;
        Ok(GPoly::from_coeffs(tail.coeffs().to_vec()).index(ctx.q()))
    }

    /// `{c^{-1} * self}`.
    pub fn divide_by(&self, ctx: &FieldCtx, c: &GPoly) -> Result<Self> {
        let d = c.degree().ok_or(Error::ZeroDilate)?;
        match self {
            DualFreq::Rational { num, den } => Ok(DualFreq::Rational {
                num: num.clone(),
                den: den.mul(ctx, c),
            }),
            DualFreq::Truncated(t) => {
                // The t^{-j} coefficient of c^{-1} * xi needs xi down to t^{-(j-d)}.
                let out_prec = t.precision() + d;
                let inv = laurent_divide(ctx, &GPoly::constant(1, 1), c, out_prec)?;
                let mut coeffs = vec![0; out_prec];
                for (j, slot) in coeffs.iter_mut().enumerate() {
                    let j = j + 1;
                    let mut acc = 0;
                    for m in 1..j {
                        let a = inv.coeff(-(m as i64));
                        if a != 0 {
                            acc = ctx.add(acc, ctx.mul(a, t.coeff(j - m)));
                        }
                    }
                    // Integer part of c^{-1} (only when deg c = 0) times xi.
                    let a0 = inv.coeff(0);
                    if a0 != 0 {
                        acc = ctx.add(acc, ctx.mul(a0, t.coeff(j)));
                    }
                    *slot = acc;
                }
                Ok(DualFreq::Truncated(LaurentTail::from_coeffs(coeffs)))
            }
        }
    }
}

/// Complex-valued function on G_N (or on its dual, indexed the same way).
#[derive(Debug, Clone)]
pub struct GroupFn {
    group: GroupN,
    values: Vec<Complex64>,
}

impl GroupFn {
    pub fn new(group: &GroupN, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), group.size(), "table length must be q^N");
        GroupFn {
            group: group.clone(),
            values,
        }
    }

    pub fn zero(group: &GroupN) -> Self {
        Self::new(group, vec![Complex64::new(0.0, 0.0); group.size()])
    }

    pub fn constant(group: &GroupN, c: f64) -> Self {
        Self::new(group, vec![Complex64::new(c, 0.0); group.size()])
    }

    pub fn from_real(group: &GroupN, values: &[f64]) -> Self {
        Self::new(group, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn indicator(group: &GroupN, set: &PointSet) -> Self {
        Self::from_real(
            group,
            &set.mask().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect::<Vec<_>>(),
        )
    }

    /// Balanced function `A - alpha B` of `A ⊆ B`.
    pub fn balanced(group: &GroupN, a: &PointSet, b: &PointSet) -> Self {
        let alpha = a.density_in(b);
        let vals: Vec<f64> = (0..group.size())
            .map(|x| match (a.contains(x), b.contains(x)) {
                (true, _) => 1.0 - alpha,
                (false, true) => -alpha,
                _ => 0.0,
            })
            .collect();
        Self::from_real(group, &vals)
    }

    /// The measure `mu_C = |G|/|C| * 1_C`.
    pub fn measure(group: &GroupN, set: &PointSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        let w = group.size() as f64 / set.len() as f64;
        Ok(Self::indicator(group, set).scaled(w))
    }

    pub fn group(&self) -> &GroupN {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for v in &mut self.values {
            *v *= s;
        }
        self
    }

    pub fn pointwise_mul(&self, other: &GroupFn) -> GroupFn {
        GroupFn {
            group: self.group.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn sub(&self, other: &GroupFn) -> GroupFn {
        GroupFn {
            group: self.group.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    /// `E_{x in G} f(x)`.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// `<f, g> = E_{x in G} f(x) conj(g(x))`.
    pub fn inner(&self, other: &GroupFn) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            / self.values.len() as f64
    }

    /// `E_{x in G} |f(x)|`.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() / self.values.len() as f64
    }

    /// `(E_{x in X} |f(x)|^p)^{1/p}` over the points of `X`.
    pub fn lp_norm_over(&self, p: f64, over: &PointSet) -> f64 {
        if over.is_empty() {
            return 0.0;
        }
        let s: f64 = over.members().iter().map(|&x| self.values[x].norm().powf(p)).sum();
        (s / over.len() as f64).powf(1.0 / p)
    }

    /// `tau_t f (x) = f(x - t)`.
    pub fn translate(&self, t: usize) -> GroupFn {
        let g = &self.group;
        let values = (0..g.size()).map(|x| self.values[g.sub(x, t)]).collect();
        GroupFn {
            group: g.clone(),
            values,
        }
    }

    pub fn max_abs_diff(&self, other: &GroupFn) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// First index where `f` is nonzero outside `support`.
    pub fn support_violation(&self, support: &PointSet) -> Option<usize> {
        (0..self.values.len()).find(|&x| !support.contains(x) && self.values[x].norm() > 0.0)
    }
}

/// `p`-th roots of unity, `roots[k] = exp(2 pi i k / p)`.
fn roots_of_unity(p: u32) -> Vec<Complex64> {
    (0..p)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / p as f64))
        .collect()
}

/// `e(xi x)` for `x in G_N`.
pub fn char_eval(group: &GroupN, xi: &DualFreq, x: &GPoly) -> Result<Complex64> {
    let ctx = group.ctx();
    let tail = xi.tail(ctx, group.n().max(1))?;
    let a = tail.product_coeff(ctx, x, 1);
    let k = ctx.trace(a);
    Ok(roots_of_unity(ctx.p())[k as usize])
}

/// Trace exponent of the pairing between `x` and the dual index `xi`.
pub fn pairing_exponent(group: &GroupN, x: usize, xi: usize) -> u32 {
    let ctx = group.ctx();
    let mut acc = 0;
    for i in 0..group.n() {
        let a = group.digit(x, i);
        let b = group.digit(xi, i);
        if a != 0 && b != 0 {
            acc = (acc + ctx.trace(ctx.mul(a, b))) % ctx.p();
        }
    }
    acc
}

/// Precomputed relabelling and roots for the factored transform on one G_N.
#[derive(Debug, Clone)]
pub struct FourierPlan {
    group: GroupN,
    /// Standard dual index -> output position of the staged DFT.
    perm: Vec<usize>,
    roots: Vec<Complex64>,
}

impl FourierPlan {
    pub fn new(group: &GroupN) -> Self {
        let ctx = group.ctx();
        let (p, e, q) = (ctx.p() as usize, ctx.e(), ctx.q() as usize);
        // F_p-coordinates of b against the basis elements w^j (value p^j):
        // Tr(w^j b), packed base p.
        let coord: Vec<usize> = (0..q as u32)
            .map(|b| {
                (0..e)
                    .map(|j| ctx.trace(ctx.mul((p as u32).pow(j), b)) as usize * p.pow(j))
                    .sum()
            })
            .collect();
        let perm = (0..group.size())
            .map(|xi| {
                let mut rest = xi;
                let mut out = 0;
                let mut place = 1;
                for _ in 0..group.n() {
                    out += coord[rest % q] * place;
                    rest /= q;
                    place *= q;
                }
                out
            })
            .collect();
        FourierPlan {
            group: group.clone(),
            perm,
            roots: roots_of_unity(ctx.p()),
        }
    }

    pub fn group(&self) -> &GroupN {
        &self.group
    }

    fn stages(&self, data: &mut [Complex64], inverse: bool) {
        let p = self.group.ctx().p() as usize;
        let digits = self.group.ctx().e() as usize * self.group.n();
        let roots: Vec<Complex64> = if inverse {
            self.roots.iter().map(|r| r.conj()).collect()
        } else {
            self.roots.clone()
        };
        let mut stride = 1;
        for _ in 0..digits {
            let block = stride * p;
            let run = |chunk: &mut [Complex64]| {
                let mut buf = vec![Complex64::new(0.0, 0.0); p];
                for off in 0..stride {
                    if p == 2 {
                        let a = chunk[off];
                        let b = chunk[off + stride];
                        chunk[off] = a + b;
                        chunk[off + stride] = a - b;
                        continue;
                    }
                    for (k, slot) in buf.iter_mut().enumerate() {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for a in 0..p {
                            acc += chunk[off + a * stride] * roots[(a * k) % p];
                        }
                        *slot = acc;
                    }
                    for (k, v) in buf.iter().enumerate() {
                        chunk[off + k * stride] = *v;
                    }
                }
            };
            if data.len() / block >= 8 && data.len() >= 1 << 12 {
                data.par_chunks_mut(block).for_each(run);
            } else {
                data.chunks_mut(block).for_each(run);
            }
            stride = block;
        }
    }

    /// `f^(xi) = E_{x in G} f(x) e(xi x)` for every dual index.
    pub fn forward(&self, f: &GroupFn) -> GroupFn {
        assert!(f.group == self.group, "plan and function live on different groups");
        let mut data = f.values.clone();
        self.stages(&mut data, false);
        let scale = 1.0 / self.group.size() as f64;
        let values = self.perm.iter().map(|&j| data[j] * scale).collect();
        GroupFn {
            group: self.group.clone(),
            values,
        }
    }

    /// `f(x) = sum_xi f^(xi) conj(e(xi x))`.
    pub fn inverse(&self, fhat: &GroupFn) -> GroupFn {
        assert!(fhat.group == self.group, "plan and function live on different groups");
        let mut data = vec![Complex64::new(0.0, 0.0); self.group.size()];
        for (xi, &j) in self.perm.iter().enumerate() {
            data[j] = fhat.values[xi];
        }
        self.stages(&mut data, true);
        GroupFn {
            group: self.group.clone(),
            values: data,
        }
    }
}

pub fn fourier_forward(f: &GroupFn) -> GroupFn {
    FourierPlan::new(&f.group).forward(f)
}

pub fn fourier_inverse(fhat: &GroupFn) -> GroupFn {
    FourierPlan::new(&fhat.group).inverse(fhat)
}

/// `(f * g)(x) = E_{y in support} f(y) g(x - y)`, with `f` supported on `support`.
pub fn convolve_over(f: &GroupFn, g: &GroupFn, support: &PointSet) -> Result<GroupFn> {
    if let Some(x) = f.support_violation(support) {
        return Err(Error::SupportViolation(x));
    }
    if support.is_empty() {
        return Err(Error::EmptySet);
    }
    let grp = &f.group;
    let ys: Vec<usize> = support
        .members()
        .iter()
        .copied()
        .filter(|&y| f.values[y].norm() > 0.0)
        .collect();
    let inv = 1.0 / support.len() as f64;
    let values = (0..grp.size())
        .into_par_iter()
        .map(|x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &y in &ys {
                acc += f.values[y] * g.values[grp.sub(x, y)];
            }
            acc * inv
        })
        .collect();
    Ok(GroupFn {
        group: grp.clone(),
        values,
    })
}

/// Convolution normalised by the Bohr set `b`.
pub fn convolve_local(f: &GroupFn, g: &GroupFn, b: &BohrSet) -> Result<GroupFn> {
    let support = b.point_set()?;
    convolve_over(f, g, &support)
}

/// `(f * mu_C)(x) = E_{y in C} f(x - y)`, a global convolution.
pub fn convolve_with_measure(f: &GroupFn, c: &PointSet) -> Result<GroupFn> {
    if c.is_empty() {
        return Err(Error::EmptySet);
    }
    let grp = &f.group;
    let inv = 1.0 / c.len() as f64;
    let values = (0..grp.size())
        .into_par_iter()
        .map(|x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &y in c.members() {
                acc += f.values[grp.sub(x, y)];
            }
            acc * inv
        })
        .collect();
    Ok(GroupFn {
        group: grp.clone(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn group(q: u32, n: usize) -> GroupN {
        GroupN::new(Arc::new(FieldCtx::of_order(q).unwrap()), n).unwrap()
    }

    fn naive_forward(f: &GroupFn) -> GroupFn {
        let g = f.group();
        let roots = roots_of_unity(g.ctx().p());
        let vals = (0..g.size())
            .map(|xi| {
                (0..g.size())
                    .map(|x| f.get(x) * roots[pairing_exponent(g, x, xi) as usize])
                    .sum::<Complex64>()
                    / g.size() as f64
            })
            .collect();
        GroupFn::new(g, vals)
    }

    fn random_fn(g: &GroupN, rng: &mut ChaCha8Rng) -> GroupFn {
        let vals = (0..g.size())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        GroupFn::new(g, vals)
    }

    #[test]
    fn characters_small() {
        let g2 = group(2, 2);
        let xi = DualFreq::monomial(1);
        let one = Complex64::new(1.0, 0.0);
        assert!((char_eval(&g2, &xi, &GPoly::monomial(1, 2)).unwrap() - one).norm() < 1e-15);
        assert!((char_eval(&g2, &xi, &GPoly::constant(1, 2)).unwrap() + one).norm() < 1e-15);
        let g3 = group(3, 2);
        let v = char_eval(&g3, &xi, &GPoly::constant(2, 2)).unwrap();
        assert!((v - Complex64::from_polar(1.0, 4.0 * PI / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn delta_and_constant() {
        let g = group(2, 2);
        let delta = GroupFn::indicator(&g, &PointSet::from_members(4, [0]));
        let dh = fourier_forward(&delta);
        assert!(dh.values().iter().all(|v| (v - Complex64::new(0.25, 0.0)).norm() < 1e-15));
        let one = GroupFn::constant(&g, 1.0);
        let oh = fourier_forward(&one);
        assert!((oh.get(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(oh.values()[1..].iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn fast_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (q, n) in [(2, 5), (3, 4), (4, 3), (5, 2), (8, 2), (9, 2)] {
            let g = group(q, n);
            let f = random_fn(&g, &mut rng);
            let err = fourier_forward(&f).max_abs_diff(&naive_forward(&f));
            assert!(err < 1e-12, "q={q} n={n} err={err}");
        }
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = group(2, 8);
        let f = random_fn(&g, &mut rng);
        assert!(fourier_inverse(&fourier_forward(&f)).max_abs_diff(&f) < 1e-10);
        let z = GroupFn::zero(&g);
        assert!(fourier_inverse(&fourier_forward(&z)).max_abs_diff(&z) == 0.0);
        let d = GroupFn::indicator(&g, &PointSet::from_members(256, [0]));
        assert!(fourier_inverse(&fourier_forward(&d)).max_abs_diff(&d) < 1e-12);
    }

    #[test]
    fn character_multiplicative() {
        let g = group(9, 2);
        let ctx = g.ctx();
        let xi = DualFreq::from_coeffs(&[4, 7, 2]);
        for a in (0..g.size()).step_by(5) {
            for b in (0..g.size()).step_by(3) {
                let (x, y) = (g.elem(a), g.elem(b));
                let lhs = char_eval(&g, &xi, &x.add(ctx, &y)).unwrap();
                let rhs = char_eval(&g, &xi, &x).unwrap() * char_eval(&g, &xi, &y).unwrap();
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn measure_convolutions() {
        let g = group(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_fn(&g, &mut rng);
        let same = convolve_with_measure(&f, &PointSet::from_members(9, [0])).unwrap();
        assert!(same.max_abs_diff(&f) < 1e-15);
        // H = span{1}: delta_0 * mu_H = 1_H / |H|
        let h = PointSet::from_members(9, [0, 1, 2]);
        let d = GroupFn::indicator(&g, &PointSet::from_members(9, [0]));
        let conv = convolve_with_measure(&d, &h).unwrap();
        let want = GroupFn::indicator(&g, &h).scaled(1.0 / 3.0);
        assert!(conv.max_abs_diff(&want) < 1e-15);
        assert!((convolve_with_measure(&f, &h).unwrap().mean() - f.mean()).norm() < 1e-12);
        assert_eq!(
            convolve_with_measure(&f, &PointSet::empty(9)).unwrap_err(),
            Error::EmptySet
        );
    }

    #[test]
    fn truncated_division_matches_rational() {
        let ctx = FieldCtx::of_order(3).unwrap();
        let xi = DualFreq::from_coeffs(&[1, 2, 0, 1]);
        let c = GPoly::from_coeffs(vec![1, 2, 1]);
        let exact = xi.divide_by(&ctx, &c).unwrap().tail(&ctx, 6).unwrap();
        let trunc = DualFreq::truncated(xi.tail(&ctx, 6).unwrap());
        let approx = trunc.divide_by(&ctx, &c).unwrap().tail(&ctx, 6).unwrap();
        assert_eq!(exact, approx);
        assert!(matches!(
            DualFreq::truncated(LaurentTail::zero(2)).tail(&ctx, 3),
            Err(Error::PrecisionTooLow { have: 2, need: 3 })
        ));
    }
}
