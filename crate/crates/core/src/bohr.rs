//! Bohr sets `B_kappa(Gamma) = {x in G_N : deg{x xi} < -kappa(xi) for xi in Gamma}`.
//!
//! Each condition `deg{x xi} < -kappa` is the vanishing of the coefficients of
//! `t^{-1}, ..., t^{-kappa}` in `x xi`, all F_q-linear in `x`. A Bohr set is
//! therefore a subspace and is stored through its condition rows and a basis.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq};
use crate::fourier::DualFreq;
use crate::group::{GroupN, PointSet};
use crate::linalg::{dot, Subspace};
use crate::poly::GPoly;

/// Largest Bohr set that [`BohrSet::enumerate`] will list.
pub const DEFAULT_ENUM_LIMIT: u128 = 1 << 24;

#[derive(Debug, Clone)]
pub struct BohrSet {
    group: GroupN,
    gamma: Vec<DualFreq>,
    widths: Vec<usize>,
    /// Row space of all linear conditions, reduced.
    conditions: Subspace,
    /// Basis of the solution space, one coefficient vector per element.
    basis: Subspace,
}

/// Coefficient of `t^{-j}` in `x xi` as a linear form in the coefficients of x.
fn condition_row(tail: &crate::poly::LaurentTail, n: usize, j: usize) -> Vec<Fq> {
    (0..n).map(|i| tail.coeff(i + j)).collect()
}

impl BohrSet {
    /// The whole group, `Gamma` empty.
    pub fn whole(group: &GroupN) -> Self {
        Self::build(group, Vec::new(), Vec::new()).expect("empty frequency set")
    }

    pub fn build(group: &GroupN, gamma: Vec<DualFreq>, widths: Vec<usize>) -> Result<Self> {
        if gamma.len() != widths.len() {
            return Err(Error::InvalidArgument(format!(
                "{} frequencies but {} widths",
                gamma.len(),
                widths.len()
            )));
        }
        if widths.contains(&0) {
            return Err(Error::InvalidArgument("widths must be at least 1".into()));
        }
        let ctx = group.ctx();
        let n = group.n();
        let mut conditions = Subspace::zero(n);
        for (xi, &k) in gamma.iter().zip(&widths) {
            let tail = xi.tail(ctx, (n + k).saturating_sub(1))?;
            for j in 1..=k {
                conditions.insert(ctx, condition_row(&tail, n, j));
            }
        }
        let basis = Subspace::span(ctx, n, conditions.null_space(ctx));
        Ok(BohrSet {
            group: group.clone(),
            gamma,
            widths,
            conditions,
            basis,
        })
    }

    /// Same frequency set with a uniform width.
    pub fn uniform(group: &GroupN, gamma: Vec<DualFreq>, width: usize) -> Result<Self> {
        let widths = vec![width; gamma.len()];
        Self::build(group, gamma, widths)
    }

    /// `G_{N - m}` as the Bohr set `B_m({t^{-N}})` (the whole group when `m = 0`).
    pub fn low_degree(group: &GroupN, m: usize) -> Result<Self> {
        if m == 0 {
            return Ok(Self::whole(group));
        }
        if m > group.n() {
            return Err(Error::InvalidArgument(format!(
                "cannot cut {m} degrees from G_{}",
                group.n()
            )));
        }
        Self::build(group, vec![DualFreq::monomial(group.n())], vec![m])
    }

    pub fn group(&self) -> &GroupN {
        &self.group
    }

    pub fn gamma(&self) -> &[DualFreq] {
        &self.gamma
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn rank(&self) -> usize {
        self.gamma.len()
    }

    pub fn width(&self) -> usize {
        self.widths.iter().copied().max().unwrap_or(0)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn size(&self) -> u128 {
        (self.group.q() as u128).pow(self.dim() as u32)
    }

    /// `mu_G(B) = |B| / |G|`.
    pub fn measure(&self) -> f64 {
        (self.group.q() as f64).powi(self.dim() as i32 - self.group.n() as i32)
    }

    pub fn basis(&self) -> &[Vec<Fq>] {
        self.basis.rows()
    }

    pub fn conditions(&self) -> &Subspace {
        &self.conditions
    }

    /// Membership by the reduced condition rows.
    pub fn member(&self, x: &GPoly) -> bool {
        if x.degree().map_or(false, |d| d >= self.group.n()) {
            return false;
        }
        let v = x.with_ambient(self.group.n()).expect("degree checked");
        self.member_coeffs(v.coeffs())
    }

    fn member_coeffs(&self, v: &[Fq]) -> bool {
        let ctx = self.group.ctx();
        self.conditions.rows().iter().all(|r| dot(ctx, r, v) == 0)
    }

    pub fn contains_index(&self, idx: usize) -> bool {
        self.member_coeffs(self.group.elem(idx).coeffs())
    }

    /// Membership by the basis: is `x` in its row space.
    pub fn member_by_basis(&self, x: &GPoly) -> bool {
        match x.with_ambient(self.group.n()) {
            Ok(v) => self.basis.contains(self.group.ctx(), v.coeffs()),
            Err(_) => false,
        }
    }

    /// Membership by evaluating every `deg{x xi} < -kappa(xi)` directly.
    pub fn member_direct(&self, x: &GPoly) -> Result<bool> {
        let ctx = self.group.ctx();
        for (xi, &k) in self.gamma.iter().zip(&self.widths) {
            let tail = xi.tail(ctx, x.ambient() + k)?;
            if (1..=k).any(|j| tail.product_coeff(ctx, x, j) != 0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `B_{kappa + k}(Gamma)`.
    pub fn narrow(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        let widths = self.widths.iter().map(|w| w + k).collect();
        Self::build(&self.group, self.gamma.clone(), widths)
    }

    /// Adds frequencies with the given width.
    pub fn refine(&self, extra: &[DualFreq], width: usize) -> Result<Self> {
        let mut gamma = self.gamma.clone();
        let mut widths = self.widths.clone();
        gamma.extend_from_slice(extra);
        widths.extend(std::iter::repeat(width).take(extra.len()));
        Self::build(&self.group, gamma, widths)
    }

    /// Largest degree among the basis elements, `None` for the zero subspace.
    pub fn max_degree(&self) -> Option<usize> {
        self.basis
            .rows()
            .iter()
            .filter_map(|r| r.iter().rposition(|&c| c != 0))
            .max()
    }

    /// `c * B` as the Bohr set `B_{kappa'}(Gamma~)` with
    /// `Gamma~ = {c^{-1} gamma} ∪ {c^{-1} l : deg l < deg c}`.
    pub fn dilate(&self, c: &GPoly) -> Result<Self> {
        let d = c.degree().ok_or(Error::ZeroDilate)?;
        let n = self.group.n();
        if self.max_degree().map_or(false, |m| m + d >= n) {
            return Err(Error::DomainViolation {
                bound: n.saturating_sub(d),
            });
        }
        let ctx = self.group.ctx();
        let mut gamma = Vec::with_capacity(self.gamma.len() + ctx.q().pow(d as u32) as usize);
        let mut widths = Vec::with_capacity(gamma.capacity());
        for (xi, &k) in self.gamma.iter().zip(&self.widths) {
            gamma.push(xi.divide_by(ctx, c)?);
            widths.push(k);
        }
        let c_amb = c.with_ambient(d + 1)?;
        for l in 0..(ctx.q() as usize).pow(d as u32) {
            let lp = GPoly::from_index(l, ctx.q(), d.max(1));
            gamma.push(DualFreq::rational(lp, c_amb.clone())?);
            widths.push(1);
        }
        Self::build(&self.group, gamma, widths)
    }

    /// All members, sorted by index.
    pub fn enumerate(&self) -> Result<Vec<GPoly>> {
        Ok(self
            .point_set()?
            .members()
            .iter()
            .map(|&i| self.group.elem(i))
            .collect())
    }

    pub fn point_set(&self) -> Result<PointSet> {
        self.point_set_with_limit(DEFAULT_ENUM_LIMIT)
    }

    pub fn point_set_with_limit(&self, limit: u128) -> Result<PointSet> {
        let size = self.size();
        if size > limit {
            return Err(Error::TooLarge {
                what: "Bohr set",
                size,
                limit,
            });
        }
        let g = &self.group;
        let q = g.q();
        let mut members = vec![0usize];
        for row in self.basis.rows() {
            let b = GPoly::from_coeffs(row.clone()).index(q);
            let multiples: Vec<usize> = (1..q).map(|lam| g.scale(lam, b)).collect();
            let base_len = members.len();
            for &m in &multiples {
                for i in 0..base_len {
                    let v = g.add(members[i], m);
                    members.push(v);
                }
            }
        }
        Ok(PointSet::from_members(g.size(), members))
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.group.ctx()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn group(q: u32, n: usize) -> GroupN {
        GroupN::new(Arc::new(FieldCtx::of_order(q).unwrap()), n).unwrap()
    }

    fn indices(b: &BohrSet) -> Vec<usize> {
        b.point_set().unwrap().members().to_vec()
    }

    #[test]
    fn build_examples() {
        let g = group(2, 3);
        assert_eq!(BohrSet::whole(&g).size(), 8);
        let b = BohrSet::uniform(&g, vec![DualFreq::monomial(1)], 1).unwrap();
        assert_eq!(indices(&b), vec![0, 2, 4, 6]);
        let b2 = BohrSet::uniform(&g, vec![DualFreq::monomial(2)], 2).unwrap();
        assert_eq!(indices(&b2), vec![0, 4]);
        assert!(b.member(&GPoly::monomial(1, 3)));
        assert!(!b.member(&GPoly::constant(1, 3)));
        assert!(b.member(&GPoly::zero(3)));
    }

    #[test]
    fn narrow_matches_build() {
        let g = group(2, 3);
        let b = BohrSet::uniform(&g, vec![DualFreq::monomial(2)], 1).unwrap();
        let n = b.narrow(1).unwrap();
        let direct = BohrSet::uniform(&g, vec![DualFreq::monomial(2)], 2).unwrap();
        assert_eq!(indices(&n), indices(&direct));
        assert_eq!(n.size(), 2);
        assert_eq!(indices(&b.narrow(0).unwrap()), indices(&b));
    }

    #[test]
    fn dilate_examples() {
        let g = group(2, 3);
        let b = BohrSet::uniform(&g, vec![DualFreq::monomial(1), DualFreq::monomial(3)], 1)
            .unwrap();
        assert_eq!(indices(&b), vec![0, 2]);
        let t = GPoly::monomial(1, 2);
        let d = b.dilate(&t).unwrap();
        assert_eq!(indices(&d), vec![0, 4]);
        assert!(d.rank() <= b.rank() + 2);
        let one = GPoly::constant(1, 1);
        assert_eq!(indices(&b.dilate(&one).unwrap()), indices(&b));
        assert_eq!(b.dilate(&GPoly::zero(1)).unwrap_err(), Error::ZeroDilate);
        let whole = BohrSet::whole(&g);
        assert!(matches!(whole.dilate(&t), Err(Error::DomainViolation { .. })));
        // c * {0} = {0} even when deg c >= N.
        let g1 = group(3, 1);
        let zero = BohrSet::uniform(&g1, vec![DualFreq::monomial(1)], 1).unwrap();
        assert_eq!(indices(&zero.dilate(&GPoly::monomial(2, 3)).unwrap()), vec![0]);
    }

    #[test]
    fn enumerate_small() {
        let g = group(3, 1);
        let all: Vec<usize> = BohrSet::whole(&g)
            .enumerate()
            .unwrap()
            .iter()
            .map(|x| x.index(3))
            .collect();
        assert_eq!(all, vec![0, 1, 2]);
        let g2 = group(2, 2);
        let b = BohrSet::uniform(&g2, vec![DualFreq::monomial(1)], 1).unwrap();
        assert_eq!(indices(&b), vec![0, 2]);
        let zero = BohrSet::low_degree(&g2, 2).unwrap();
        assert_eq!(indices(&zero), vec![0]);
    }

    #[test]
    fn low_degree_is_g_n_minus_m() {
        let g = group(3, 4);
        for m in 0..=4 {
            let b = BohrSet::low_degree(&g, m).unwrap();
            assert_eq!(b.size(), 3u128.pow(4 - m as u32));
            assert!(b.max_degree().map_or(true, |d| d < 4 - m));
        }
    }

    #[test]
    fn membership_views_agree() {
        let g = group(3, 4);
        let b = BohrSet::build(
            &g,
            vec![DualFreq::from_coeffs(&[1, 2, 0, 1, 1]), DualFreq::from_coeffs(&[0, 1, 1])],
            vec![2, 1],
        )
        .unwrap();
        let set = b.point_set().unwrap();
        for x in 0..g.size() {
            let p = g.elem(x);
            let direct = b.member_direct(&p).unwrap();
            assert_eq!(direct, b.member(&p));
            assert_eq!(direct, b.member_by_basis(&p));
            assert_eq!(direct, set.contains(x));
        }
    }

    #[test]
    fn precision_checked() {
        use crate::poly::LaurentTail;
        let g = group(2, 3);
        let xi = DualFreq::truncated(LaurentTail::from_coeffs(vec![1, 0, 1]));
        assert!(BohrSet::uniform(&g, vec![xi.clone()], 1).is_ok());
        assert!(matches!(
            BohrSet::uniform(&g, vec![xi], 2),
            Err(Error::PrecisionTooLow { have: 3, need: 4 })
        ));
    }
}
