//! Finite fields F_q, q = p^e, as lookup tables.
//!
//! Elements are `u32` values in `0..q`. The value `v = sum d_j p^j` stands for
//! the residue class `sum d_j w^j`, where `w` is a root of the defining
//! modulus. For `e = 1` elements are plain residues mod p.

use crate::error::{Error, Result};

/// Field element, an integer in `0..q`.
pub type Fq = u32;

/// Default bound on `q`.
pub const DEFAULT_TABLE_LIMIT: u32 = 1 << 16;

/// Above this size the addition table is replaced by digit-wise addition.
const ADD_TABLE_LIMIT: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus over F_p, little-endian, length `e + 1`.
    modulus: Vec<u32>,
    add: Option<Vec<Fq>>,
    neg: Vec<Fq>,
    inv: Vec<Fq>,
    exp: Vec<Fq>,
    log: Vec<u32>,
    trace: Vec<u32>,
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power into `(p, e)`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

// Dense polynomials over F_p, little-endian, used only while building tables.

fn fp_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = fp_inv(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let f = (r[top] as u64 * lead_inv as u64 % p as u64) as u32;
        let shift = top - dm;
        for (i, &mi) in m.iter().enumerate() {
            let sub = (f as u64 * mi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_inv(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    result as u32
}

fn digits(v: u32, p: u32, e: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    let mut v = v;
    for _ in 0..e {
        out.push(v % p);
        v /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

fn monic_from_index(idx: u32, p: u32, deg: u32) -> Vec<u32> {
    let mut v = digits(idx, p, deg);
    v.push(1);
    v
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = (f.len() - 1) as u32;
    for d in 1..=deg / 2 {
        for idx in 0..p.pow(d) {
            let g = monic_from_index(idx, p, d);
            if fp_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FieldCtx {
    pub fn new(p: u32, e: u32) -> Result<Self> {
        Self::with_limit(p, e, DEFAULT_TABLE_LIMIT)
    }

    /// Builds F_{p^e} using the lexicographically least monic irreducible
    /// modulus (lower coefficients read as a little-endian base-p integer).
    pub fn with_limit(p: u32, e: u32, limit: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::InvalidArgument("extension degree must be >= 1".into()));
        }
        let q = (p as u128).checked_pow(e).unwrap_or(u128::MAX);
        if q > limit as u128 {
            return Err(Error::TooLarge {
                what: "field",
                size: q,
                limit: limit as u128,
            });
        }
        let q = q as u32;

        let modulus = (0..q)
            .map(|idx| monic_from_index(idx, p, e))
            .find(|f| is_irreducible(f, p))
            .expect("an irreducible polynomial of every degree exists");

        let mul_raw = |a: u32, b: u32| -> u32 {
            let da = digits(a, p, e);
            let db = digits(b, p, e);
            let mut prod = vec![0u32; 2 * e as usize];
            for (i, &x) in da.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
                }
            }
            let mut r = fp_rem(&prod, &modulus, p);
            r.resize(e as usize, 0);
            undigits(&r, p)
        };

        // Multiplicative generator by brute force.
        let mut exp = Vec::new();
        if q == 2 {
            exp = vec![1];
        } else {
            for g in 2..q {
                let mut powers = Vec::with_capacity(q as usize - 1);
                let mut x = 1u32;
                let mut ok = true;
                for k in 0..q - 1 {
                    if k > 0 && x == 1 {
                        ok = false;
                        break;
                    }
                    powers.push(x);
                    x = mul_raw(x, g);
                }
                if ok && x == 1 {
                    exp = powers;
                    break;
                }
            }
        }
        assert_eq!(exp.len(), q as usize - 1, "no generator found");
        let mut log = vec![0u32; q as usize];
        for (k, &x) in exp.iter().enumerate() {
            log[x as usize] = k as u32;
        }

        let digit_add = |a: u32, b: u32| -> u32 {
            let da = digits(a, p, e);
            let db = digits(b, p, e);
            let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            undigits(&s, p)
        };
        let neg: Vec<Fq> = (0..q)
            .map(|a| {
                let d: Vec<u32> = digits(a, p, e).iter().map(|&x| (p - x) % p).collect();
                undigits(&d, p)
            })
            .collect();
        let add = (q <= ADD_TABLE_LIMIT).then(|| {
            let mut t = vec![0; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = digit_add(a, b);
                }
            }
            t
        });

        let mut ctx = FieldCtx {
            p,
            e,
            q,
            modulus,
            add,
            neg,
            inv: vec![0; q as usize],
            exp,
            log,
            trace: vec![0; q as usize],
        };
        for a in 1..q {
            ctx.inv[a as usize] = ctx.pow(a, q - 2);
        }
        for a in 0..q {
            let mut acc = 0;
            let mut x = a;
            for _ in 0..e {
                acc = ctx.add(acc, x);
                x = ctx.pow(x, p);
            }
            assert!(acc < p, "trace must land in the prime field");
            ctx.trace[a as usize] = acc;
        }
        Ok(ctx)
    }

    /// Field of order `q`, which must be a prime power.
    pub fn of_order(q: u32) -> Result<Self> {
        match prime_power(q) {
            Some((p, e)) => Self::new(p, e),
            None => Err(Error::NotPrime(q)),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        match &self.add {
            Some(t) => t[(a * self.q + b) as usize],
            None if self.p == 2 => a ^ b,
            None => {
                let (mut a, mut b) = (a, b);
                let mut out = 0;
                let mut place = 1;
                for _ in 0..self.e {
                    out += ((a % self.p + b % self.p) % self.p) * place;
                    a /= self.p;
                    b /= self.p;
                    place *= self.p;
                }
                out
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = (self.log[a as usize] + self.log[b as usize]) % (self.q - 1);
        self.exp[k as usize]
    }

    /// Multiplicative inverse; `inv(0)` is defined as 0.
    #[inline]
    pub fn inv(&self, a: Fq) -> Fq {
        self.inv[a as usize]
    }

    pub fn pow(&self, a: Fq, k: u32) -> Fq {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = (self.log[a as usize] as u64 * k as u64) % (self.q as u64 - 1);
        self.exp[l as usize]
    }

    /// Absolute trace to F_p, returned as a residue in `0..p`.
    #[inline]
    pub fn trace(&self, a: Fq) -> u32 {
        self.trace[a as usize]
    }

    /// Image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, n: i64) -> Fq {
        n.rem_euclid(self.p as i64) as Fq
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        0..self.q
    }

    /// Nonzero elements of F_q.
    pub fn units(&self) -> impl Iterator<Item = Fq> {
        1..self.q
    }
}
