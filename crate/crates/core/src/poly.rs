//! Polynomials in F_q[t] of bounded degree and truncated Laurent series in
//! F_q((1/t)).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq};

/// An element of G_N: a polynomial of degree `< N` stored as its `N`
/// coefficients (index `i` holds the coefficient of `t^i`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GPoly {
    coeffs: Vec<Fq>,
}

impl GPoly {
    pub fn zero(ambient: usize) -> Self {
        GPoly {
            coeffs: vec![0; ambient],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Fq>) -> Self {
        GPoly { coeffs }
    }

    /// `t^k` inside G_ambient.
    pub fn monomial(k: usize, ambient: usize) -> Self {
        assert!(k < ambient, "monomial degree must be below the ambient bound");
        let mut p = GPoly::zero(ambient);
        p.coeffs[k] = 1;
        p
    }

    /// The constant `a` inside G_ambient.
    pub fn constant(a: Fq, ambient: usize) -> Self {
        assert!(ambient >= 1);
        let mut p = GPoly::zero(ambient);
        p.coeffs[0] = a;
        p
    }

    pub fn ambient(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Moves the polynomial into G_ambient. Fails if the degree does not fit.
    pub fn with_ambient(&self, ambient: usize) -> Result<Self> {
        if let Some(d) = self.degree() {
            if d >= ambient {
                return Err(Error::DomainViolation { bound: ambient });
            }
        }
        let mut c = self.coeffs.clone();
        c.resize(ambient, 0);
        Ok(GPoly { coeffs: c })
    }

    /// Little-endian base-q index of the coefficient vector.
    pub fn index(&self, q: u32) -> usize {
        self.coeffs
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * q as usize + c as usize)
    }

    pub fn from_index(mut idx: usize, q: u32, ambient: usize) -> Self {
        let mut coeffs = Vec::with_capacity(ambient);
        for _ in 0..ambient {
            coeffs.push((idx % q as usize) as Fq);
            idx /= q as usize;
        }
        GPoly { coeffs }
    }

    pub fn add(&self, ctx: &FieldCtx, other: &GPoly) -> GPoly {
        let n = self.ambient().max(other.ambient());
        GPoly {
            coeffs: (0..n)
                .map(|i| ctx.add(self.coeff(i), other.coeff(i)))
                .collect(),
        }
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &GPoly) -> GPoly {
        let n = self.ambient().max(other.ambient());
        GPoly {
            coeffs: (0..n)
                .map(|i| ctx.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        }
    }

    pub fn neg(&self, ctx: &FieldCtx) -> GPoly {
        GPoly {
            coeffs: self.coeffs.iter().map(|&c| ctx.neg(c)).collect(),
        }
    }

    pub fn scale(&self, ctx: &FieldCtx, a: Fq) -> GPoly {
        GPoly {
            coeffs: self.coeffs.iter().map(|&c| ctx.mul(a, c)).collect(),
        }
    }

    /// Schoolbook product. The result lives in G_{N_a + N_b - 1}, which bounds
    /// `deg a + deg b + 1` for every pair of operands of these ambients.
    pub fn mul(&self, ctx: &FieldCtx, other: &GPoly) -> GPoly {
        let n = (self.ambient() + other.ambient()).saturating_sub(1).max(1);
        let mut out = vec![0; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b != 0 {
                    out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
                }
            }
        }
        GPoly { coeffs: out }
    }

    /// Euclidean division. Quotient and remainder share the ambient of `self`.
    pub fn div_rem(&self, ctx: &FieldCtx, divisor: &GPoly) -> Result<(GPoly, GPoly)> {
        let d = divisor.degree().ok_or(Error::ZeroDivisor)?;
        let lead_inv = ctx.inv(divisor.coeffs[d]);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0; self.ambient().max(1)];
        let top = match self.degree() {
            Some(t) => t,
            None => return Ok((GPoly { coeffs: quot }, GPoly { coeffs: rem })),
        };
        if top >= d {
            for k in (0..=top - d).rev() {
                let f = ctx.mul(rem[k + d], lead_inv);
                if f == 0 {
                    continue;
                }
                quot[k] = f;
                for j in 0..=d {
                    rem[k + j] = ctx.sub(rem[k + j], ctx.mul(f, divisor.coeffs[j]));
                }
            }
        }
        Ok((GPoly { coeffs: quot }, GPoly { coeffs: rem }))
    }

    pub fn eval(&self, ctx: &FieldCtx, x: Fq) -> Fq {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| ctx.add(ctx.mul(acc, x), c))
    }
}

/// Strictly negative-degree part of a Laurent series, truncated to `D`
/// coefficients: `coeffs[j - 1]` is the coefficient of `t^{-j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LaurentTail {
    coeffs: Vec<Fq>,
}

impl LaurentTail {
    pub fn zero(precision: usize) -> Self {
        LaurentTail {
            coeffs: vec![0; precision],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Fq>) -> Self {
        LaurentTail { coeffs }
    }

    /// `t^{-k}` with `precision` retained terms (`k >= 1`).
    pub fn monomial(k: usize, precision: usize) -> Self {
        assert!(k >= 1 && k <= precision);
        let mut t = LaurentTail::zero(precision);
        t.coeffs[k - 1] = 1;
        t
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    /// Coefficient of `t^{-j}`, `j >= 1`.
    pub fn coeff(&self, j: usize) -> Fq {
        debug_assert!(j >= 1);
        self.coeffs.get(j - 1).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Degree of the tail (a negative integer), `None` if zero.
    pub fn degree(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|&c| c != 0)
            .map(|i| -(i as i64) - 1)
    }

    pub fn truncate(&self, precision: usize) -> LaurentTail {
        let mut c = self.coeffs.clone();
        c.resize(precision, 0);
        LaurentTail { coeffs: c }
    }

    /// Coefficient of `t^{-j}` in `x * self`. Exact as long as the tail holds
    /// at least `deg x + j` coefficients.
    pub fn product_coeff(&self, ctx: &FieldCtx, x: &GPoly, j: usize) -> Fq {
        let mut acc = 0;
        for (i, &a) in x.coeffs().iter().enumerate() {
            if a != 0 {
                acc = ctx.add(acc, ctx.mul(a, self.coeff(i + j)));
            }
        }
        acc
    }
}

/// A Laurent series with finitely many nonnegative-degree terms and a tail
/// truncated at `t^{-D}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Laurent {
    /// Coefficients of `t^0, t^1, ...`.
    pub integer: Vec<Fq>,
    pub tail: LaurentTail,
}

impl Laurent {
    pub fn from_poly(x: &GPoly, precision: usize) -> Laurent {
        Laurent {
            integer: x.coeffs().to_vec(),
            tail: LaurentTail::zero(precision),
        }
    }

    /// Degree of the series, `None` if every retained coefficient is zero.
    pub fn degree(&self) -> Option<i64> {
        match self.integer.iter().rposition(|&c| c != 0) {
            Some(d) => Some(d as i64),
            None => self.tail.degree(),
        }
    }

    /// Coefficient of `t^k` for any integer `k >= -D`.
    pub fn coeff(&self, k: i64) -> Fq {
        if k >= 0 {
            self.integer.get(k as usize).copied().unwrap_or(0)
        } else {
            self.tail.coeff((-k) as usize)
        }
    }
}

/// `num / den` expanded in powers of `1/t` down to `t^{-precision}`.
pub fn laurent_divide(
    ctx: &FieldCtx,
    num: &GPoly,
    den: &GPoly,
    precision: usize,
) -> Result<Laurent> {
    let d = den.degree().ok_or(Error::ZeroDivisor)?;
    let lead_inv = ctx.inv(den.coeff(d));
    let top = num.degree().map(|t| t as i64).unwrap_or(-1);
    let low = -(precision as i64);
    // Remainder indexed by degree, offset so that degree `low` sits at 0.
    let hi = top.max(d as i64);
    let mut rem: Vec<Fq> = vec![0; (hi - low + 1) as usize];
    for (i, &c) in num.coeffs().iter().enumerate() {
        rem[(i as i64 - low) as usize] = c;
    }
    let int_len = if top >= d as i64 {
        (top - d as i64 + 1) as usize
    } else {
        0
    };
    let mut out = Laurent {
        integer: vec![0; int_len],
        tail: LaurentTail::zero(precision),
    };
    let mut k = top - d as i64;
    while k >= low {
        let f = ctx.mul(rem[(k + d as i64 - low) as usize], lead_inv);
        if f != 0 {
            if k >= 0 {
                out.integer[k as usize] = f;
            } else {
                out.tail.coeffs[(-k - 1) as usize] = f;
            }
            for j in 0..=d {
                let pos = k + j as i64 - low;
                if pos >= 0 {
                    let slot = &mut rem[pos as usize];
                    *slot = ctx.sub(*slot, ctx.mul(f, den.coeff(j)));
                }
            }
        }
        k -= 1;
    }
    Ok(out)
}

/// `c^{-1}` in F_q((1/t)), with `precision` negative-degree coefficients.
pub fn laurent_inverse(ctx: &FieldCtx, c: &GPoly, precision: usize) -> Result<Laurent> {
    laurent_divide(ctx, &GPoly::constant(1, 1), c, precision)
}

/// The fractional part `{x}`: drops every coefficient of `t^i`, `i >= 0`.
pub fn frac_part(x: &Laurent, precision: usize) -> LaurentTail {
    x.tail.truncate(precision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(q: u32) -> FieldCtx {
        FieldCtx::of_order(q).unwrap()
    }

    fn poly(c: &[u32]) -> GPoly {
        GPoly::from_coeffs(c.to_vec())
    }

    #[test]
    fn products_small() {
        let f2 = f(2);
        let p = poly(&[1, 1]).mul(&f2, &poly(&[1, 1]));
        assert_eq!(p.coeffs(), &[1, 0, 1]);
        let f3 = f(3);
        let p = poly(&[1, 1]).mul(&f3, &poly(&[2, 1]));
        assert_eq!(p.coeffs(), &[2, 0, 1]);
        assert!(poly(&[1, 2, 1]).mul(&f3, &GPoly::zero(3)).is_zero());
    }

    #[test]
    fn inverse_examples() {
        let f2 = f(2);
        let y = laurent_inverse(&f2, &poly(&[0, 1]), 3).unwrap();
        assert!(y.integer.iter().all(|&c| c == 0));
        assert_eq!(y.tail.coeffs(), &[1, 0, 0]);

        let y = laurent_inverse(&f2, &poly(&[1, 1]), 3).unwrap();
        assert_eq!(y.tail.coeffs(), &[1, 1, 1]);
        assert_eq!(y.degree(), Some(-1));

        let y = laurent_inverse(&f2, &poly(&[1]), 3).unwrap();
        assert_eq!(y.integer, vec![1]);
        assert!(y.tail.is_zero());

        assert_eq!(
            laurent_inverse(&f2, &GPoly::zero(2), 3),
            Err(Error::ZeroDivisor)
        );
    }

    #[test]
    fn fractional_parts() {
        let x = Laurent {
            integer: vec![0, 0, 1],
            tail: LaurentTail::from_coeffs(vec![1, 0]),
        };
        assert_eq!(frac_part(&x, 2).coeffs(), &[1, 0]);
        let x = Laurent::from_poly(&poly(&[0, 0, 0, 1]), 2);
        assert!(frac_part(&x, 2).is_zero());
        let y = laurent_inverse(&f(2), &poly(&[1, 1]), 5).unwrap();
        assert_eq!(frac_part(&y, 2).coeffs(), &[1, 1]);
    }

    #[test]
    fn division_exact_and_rem() {
        let f3 = f(3);
        let a = poly(&[2, 0, 1, 0]); // t^2 + 2 = (t+1)(t+2)
        let (qt, r) = a.div_rem(&f3, &poly(&[1, 1])).unwrap();
        assert!(r.is_zero());
        assert_eq!(qt.degree(), Some(1));
        assert_eq!(&qt.coeffs()[..2], &[2, 1]);
    }

    // Product of c with its truncated inverse, checked coefficientwise.
    fn inverse_residual_ok(ctx: &FieldCtx, c: &GPoly, precision: usize) -> bool {
        let y = laurent_inverse(ctx, c, precision).unwrap();
        let dc = c.degree().unwrap() as i64;
        // Degrees >= -precision + deg c are fully determined by the retained terms.
        let lo = -(precision as i64) + dc;
        for k in lo..=dc + y.integer.len() as i64 {
            let mut acc = 0;
            for (i, &ci) in c.coeffs().iter().enumerate() {
                let m = k - i as i64;
                if m >= -(precision as i64) {
                    acc = ctx.add(acc, ctx.mul(ci, y.coeff(m)));
                }
            }
            let want = if k == 0 { 1 } else { 0 };
            if k >= -(precision as i64) + dc && acc != want {
                return false;
            }
        }
        true
    }

    proptest! {
        #[test]
        fn inverse_residual(q in prop::sample::select(vec![2u32, 3, 4, 5]),
                            raw in prop::collection::vec(0u32..64, 1..5),
                            precision in 1usize..12) {
            let ctx = f(q);
            let c = GPoly::from_coeffs(raw.iter().map(|r| r % q).collect());
            prop_assume!(!c.is_zero());
            prop_assert!(inverse_residual_ok(&ctx, &c, precision));
        }

        #[test]
        fn mul_matches_evaluation(q in prop::sample::select(vec![2u32, 3, 4, 5, 7]),
                                  a in prop::collection::vec(0u32..64, 1..4),
                                  b in prop::collection::vec(0u32..64, 1..4)) {
            let ctx = f(q);
            let a = GPoly::from_coeffs(a.iter().map(|r| r % q).collect());
            let b = GPoly::from_coeffs(b.iter().map(|r| r % q).collect());
            let ab = a.mul(&ctx, &b);
            for x in ctx.elements() {
                prop_assert_eq!(ab.eval(&ctx, x), ctx.mul(a.eval(&ctx, x), b.eval(&ctx, x)));
            }
        }
    }

    #[test]
    fn index_round_trip() {
        for idx in 0..81 {
            let p = GPoly::from_index(idx, 3, 4);
            assert_eq!(p.index(3), idx);
        }
    }
}
