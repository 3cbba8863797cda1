//! The additive group G_N with elements addressed by their little-endian
//! base-q index, and subsets of it.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq};
use crate::poly::GPoly;

/// Largest group that may be materialised as a dense table.
pub const DEFAULT_GROUP_LIMIT: usize = 1 << 24;

#[derive(Debug, Clone)]
pub struct GroupN {
    ctx: Arc<FieldCtx>,
    n: usize,
    size: usize,
}

impl PartialEq for GroupN {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && *self.ctx == *other.ctx
    }
}

impl GroupN {
    pub fn new(ctx: Arc<FieldCtx>, n: usize) -> Result<Self> {
        Self::with_limit(ctx, n, DEFAULT_GROUP_LIMIT)
    }

    pub fn with_limit(ctx: Arc<FieldCtx>, n: usize, limit: usize) -> Result<Self> {
        let size = (ctx.q() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if size > limit as u128 {
            return Err(Error::TooLarge {
                what: "group G_N",
                size,
                limit: limit as u128,
            });
        }
        Ok(GroupN {
            ctx,
            n,
            size: size as usize,
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn ctx_arc(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.ctx.q()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elem(&self, idx: usize) -> GPoly {
        GPoly::from_index(idx, self.q(), self.n)
    }

    pub fn index(&self, x: &GPoly) -> Result<usize> {
        if x.degree().map_or(false, |d| d >= self.n) {
            return Err(Error::DomainViolation { bound: self.n });
        }
        Ok(x.index(self.q()))
    }

    /// Coefficient `i` of the element with index `idx`.
    #[inline]
    pub fn digit(&self, idx: usize, i: usize) -> Fq {
        let q = self.q() as usize;
        ((idx / q.pow(i as u32)) % q) as Fq
    }

    #[inline]
    fn digitwise(&self, a: usize, b: usize, op: impl Fn(Fq, Fq) -> Fq) -> usize {
        let q = self.q() as usize;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n {
            out += op((a % q) as Fq, (b % q) as Fq) as usize * place;
            a /= q;
            b /= q;
            place *= q;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        if self.ctx.p() == 2 {
            return a ^ b;
        }
        self.digitwise(a, b, |x, y| self.ctx.add(x, y))
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        if self.ctx.p() == 2 {
            return a ^ b;
        }
        self.digitwise(a, b, |x, y| self.ctx.sub(x, y))
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        if self.ctx.p() == 2 {
            return a;
        }
        self.digitwise(a, 0, |x, _| self.ctx.neg(x))
    }

    pub fn scale(&self, lambda: Fq, a: usize) -> usize {
        self.digitwise(a, 0, |x, _| self.ctx.mul(lambda, x))
    }

    /// Index of `c * x`, failing when the product leaves G_N.
    pub fn dilate(&self, c: &GPoly, a: usize) -> Result<usize> {
        let prod = c.mul(&self.ctx, &self.elem(a));
        self.index(&prod)
    }
}

/// A subset of G_N, kept both as a membership mask and a sorted index list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    mask: Vec<bool>,
    members: Vec<usize>,
}

impl PointSet {
    pub fn empty(size: usize) -> Self {
        PointSet {
            mask: vec![false; size],
            members: Vec::new(),
        }
    }

    pub fn full(size: usize) -> Self {
        PointSet {
            mask: vec![true; size],
            members: (0..size).collect(),
        }
    }

    pub fn from_members(size: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = vec![false; size];
        for m in members {
            assert!(m < size, "member {m} outside group of size {size}");
            mask[m] = true;
        }
        Self::from_mask(mask)
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        let members = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect();
        PointSet { mask, members }
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect())
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect())
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        PointSet::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a && !*b).collect())
    }

    /// `self + t`.
    pub fn translate(&self, g: &GroupN, t: usize) -> PointSet {
        PointSet::from_members(self.universe(), self.members.iter().map(|&m| g.add(m, t)))
    }

    /// `-self`.
    pub fn negate(&self, g: &GroupN) -> PointSet {
        PointSet::from_members(self.universe(), self.members.iter().map(|&m| g.neg(m)))
    }

    /// `c * self`, which must stay inside G_N.
    pub fn dilate(&self, g: &GroupN, c: &GPoly) -> Result<PointSet> {
        if c.is_zero() {
            return Err(Error::ZeroDilate);
        }
        let mut out = Vec::with_capacity(self.len());
        for &m in &self.members {
            out.push(g.dilate(c, m)?);
        }
        Ok(PointSet::from_members(self.universe(), out))
    }

    /// Density `|self ∩ other| / |other|`.
    pub fn density_in(&self, other: &PointSet) -> f64 {
        if other.is_empty() {
            return 0.0;
        }
        let hits = other.members.iter().filter(|&&m| self.contains(m)).count();
        hits as f64 / other.len() as f64
    }
}

impl serde::Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(ser)
    }
}

/// `counts[x] = #{(a, b) in A x B : a + b = x}`.
pub fn sum_counts(g: &GroupN, a: &PointSet, b: &PointSet) -> Vec<u64> {
    let mut counts = vec![0u64; g.size()];
    for &x in a.members() {
        for &y in b.members() {
            counts[g.add(x, y)] += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_matches_polynomials() {
        for q in [2u32, 3, 4, 5] {
            let ctx = Arc::new(FieldCtx::of_order(q).unwrap());
            let g = GroupN::new(ctx.clone(), 3).unwrap();
            for a in 0..g.size() {
                for b in (0..g.size()).step_by(7) {
                    let (pa, pb) = (g.elem(a), g.elem(b));
                    assert_eq!(g.add(a, b), pa.add(&ctx, &pb).index(q));
                    assert_eq!(g.sub(a, b), pa.sub(&ctx, &pb).index(q));
                }
                assert_eq!(g.add(a, g.neg(a)), 0);
            }
        }
    }

    #[test]
    fn set_operations() {
        let ctx = Arc::new(FieldCtx::of_order(3).unwrap());
        let g = GroupN::new(ctx, 2).unwrap();
        let a = PointSet::from_members(9, [0, 1, 4]);
        let b = a.translate(&g, 1);
        assert_eq!(b.members(), &[1, 2, 5]);
        assert_eq!(a.negate(&g).members(), &[0, 2, 8]);
        assert_eq!(a.intersection(&b).members(), &[1]);
        assert_eq!(a.union(&b).len(), 5);
        // t * {0, 1} = {0, t}
        let t = GPoly::monomial(1, 2);
        assert_eq!(PointSet::from_members(9, [0, 1]).dilate(&g, &t).unwrap().members(), &[0, 3]);
        assert!(PointSet::from_members(9, [3]).dilate(&g, &t).is_err());
    }
}
