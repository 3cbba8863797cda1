//! Bohr sets in Z/NZ, their regularity, regular widths and the approximate
//! identity `B * beta'`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::PointSet;

/// How a frequency constrains a residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `|e(gamma x / N) - 1| < rho`.
    Chordal,
    /// `||gamma x / N|| < rho`, distance to the nearest integer.
    Distance,
}

impl Convention {
    fn value(self, n: u64, r: u64) -> f64 {
        match self {
            Convention::Chordal => 2.0 * (std::f64::consts::PI * r as f64 / n as f64).sin().abs(),
            Convention::Distance => r.min(n - r) as f64 / n as f64,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZBohrSet {
    pub n: u64,
    pub gamma: Vec<u64>,
    pub rho: f64,
    pub convention: Convention,
    members: PointSet,
}

/// `m(x) = max_gamma value(gamma x)`, so that `x in B_rho` iff `m(x) < rho`.
fn radii(n: u64, gamma: &[u64], conv: Convention) -> Vec<f64> {
    (0..n)
        .map(|x| {
            gamma
                .iter()
                .map(|&g| conv.value(n, (g % n) * x % n))
                .fold(0.0, f64::max)
        })
        .collect()
}

impl ZBohrSet {
    pub fn build(n: u64, gamma: Vec<u64>, rho: f64) -> Result<Self> {
        Self::build_with(n, gamma, rho, Convention::Chordal)
    }

    pub fn build_with(n: u64, gamma: Vec<u64>, rho: f64, convention: Convention) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        if !(rho > 0.0 && rho < 2.0) {
            return Err(Error::InvalidArgument(format!("width {rho} outside (0, 2)")));
        }
        let r = radii(n, &gamma, convention);
        let members = PointSet::from_mask(r.iter().map(|&m| m < rho).collect());
        Ok(ZBohrSet {
            n,
            gamma,
            rho,
            convention,
            members,
        })
    }

    /// The same frequencies at width `factor * rho`.
    pub fn rescale(&self, factor: f64) -> Result<Self> {
        Self::build_with(self.n, self.gamma.clone(), factor * self.rho, self.convention)
    }

    pub fn rank(&self) -> usize {
        self.gamma.len()
    }

    pub fn members(&self) -> &PointSet {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.members.contains((x % self.n) as usize)
    }

    /// Per-element re-evaluation of the defining inequality.
    pub fn member_direct(&self, x: u64) -> bool {
        let x = x % self.n;
        self.gamma
            .iter()
            .all(|&g| self.convention.value(self.n, (g % self.n) * x % self.n) < self.rho)
    }

    pub fn measure(&self) -> f64 {
        self.len() as f64 / self.n as f64
    }

    /// `(|B|, rho^k N)`; logged, not asserted.
    pub fn size_floor_diagnostic(&self) -> (usize, f64) {
        (self.len(), self.rho.powi(self.rank() as i32) * self.n as f64)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub regular: bool,
    /// The `eta` with the largest violation ratio, if any.
    pub worst_eta: Option<f64>,
    /// Largest of `|B_{(1+eta)rho}| / ((1 + 100k|eta|)|B|)` and
    /// `|B| / ((1 + 100k|eta|)|B_{(1+eta)rho}|)` over the checked `eta`.
    pub worst_ratio: f64,
    pub points_checked: usize,
}

/// `|B|/(1+100k|eta|) <= |B_{(1+eta)rho}| <= (1+100k|eta|)|B|` for all
/// `|eta| <= 1/(100k)`. The size is a step function of `eta`, so besides a
/// grid of step `1/(1000k)` every jump point is checked at its worst side.
pub fn is_regular(b: &ZBohrSet) -> RegularityReport {
    let k = b.rank();
    if k == 0 {
        return RegularityReport {
            regular: true,
            worst_eta: None,
            worst_ratio: 1.0,
            points_checked: 0,
        };
    }
    let kf = k as f64;
    let bound = 1.0 / (100.0 * kf);
    let size = b.len() as f64;
    let mut r = radii(b.n, &b.gamma, b.convention);
    r.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let below = |v: f64| r.partition_point(|&m| m < v) as f64;
    let at_most = |v: f64| r.partition_point(|&m| m <= v) as f64;

    let mut worst: (f64, Option<f64>) = (0.0, None);
    let mut checked = 0usize;
    let mut consider = |eta: f64, count: f64| {
        let allow = 1.0 + 100.0 * kf * eta.abs();
        let ratio = if eta >= 0.0 {
            count / (allow * size)
        } else {
            size / (allow * count.max(f64::MIN_POSITIVE))
        };
        checked += 1;
        if ratio > worst.0 {
            worst = (ratio, Some(eta));
        }
    };
    let steps = 10i64;
    for i in -steps..=steps {
        let eta = i as f64 * bound / steps as f64;
        consider(eta, below((1.0 + eta) * b.rho));
    }
    let mut last = f64::NAN;
    for &m in &r {
        if m == last {
            continue;
        }
        last = m;
        let eta = m / b.rho - 1.0;
        if eta.abs() > bound {
            continue;
        }
        if eta >= 0.0 {
            // Just above the jump the element is counted.
            consider(eta, at_most(m));
        } else {
            consider(eta, below(m));
        }
    }
    // Ratios are computed in floating point; allow rounding noise only.
    let regular = worst.0 <= 1.0 + 1e-12;
    RegularityReport {
        regular,
        worst_eta: if regular { None } else { worst.1 },
        worst_ratio: worst.0,
        points_checked: checked,
    }
}

/// Grid of `[1/2, 1)` with this step first; refined by halving up to
/// `MAX_REFINEMENTS` times.
pub const DEFAULT_WIDTH_STEP: f64 = 1.0 / 512.0;
pub const MAX_REFINEMENTS: u32 = 4;

/// First `eps` on the grid whose `B_{eps rho}(Gamma)` is regular.
pub fn find_regular_width(
    n: u64,
    gamma: &[u64],
    rho: f64,
    convention: Convention,
) -> Result<(f64, ZBohrSet)> {
    let mut step = DEFAULT_WIDTH_STEP;
    for _ in 0..=MAX_REFINEMENTS {
        let count = (0.5 / step).round() as usize;
        for i in 0..count {
            let eps = 0.5 + i as f64 * step;
            let b = ZBohrSet::build_with(n, gamma.to_vec(), eps * rho, convention)?;
            if is_regular(&b).regular {
                return Ok((eps, b));
            }
        }
        step /= 2.0;
    }
    Err(Error::NotFoundAtResolution(step * 2.0))
}

/// `(B * beta')(x) = |B ∩ (x - B')| / |B'|` for every residue `x`.
pub fn conv_with_measure(b: &ZBohrSet, bprime: &ZBohrSet) -> Vec<f64> {
    let n = b.n;
    let bp = bprime.members().members();
    (0..n)
        .map(|x| {
            let hits = bp.iter().filter(|&&y| b.contains((x + n - y as u64) % n)).count();
            hits as f64 / bp.len() as f64
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ApproxIdentityReport {
    /// `<f, B * beta'> / mu(B)`.
    pub lhs: f64,
    /// `E_{x in B} f(x)`.
    pub mean_on_b: f64,
    pub error: f64,
    /// `error / (eps k)`; absent when `eps k = 0`.
    pub ratio: Option<f64>,
}

pub fn approx_identity_check(
    f: &[f64],
    b: &ZBohrSet,
    bprime: &ZBohrSet,
    eps: f64,
) -> Result<ApproxIdentityReport> {
    let n = b.n as usize;
    if f.len() != n || bprime.n != b.n {
        return Err(Error::PreconditionViolation("sizes disagree".into()));
    }
    if f.iter().any(|v| v.abs() > 1.0) {
        return Err(Error::PreconditionViolation("need |f| <= 1".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::PreconditionViolation("need eps > 0".into()));
    }
    if !is_regular(b).regular {
        return Err(Error::PreconditionViolation("B is not regular".into()));
    }
    let narrow = ZBohrSet::build_with(b.n, b.gamma.clone(), eps * b.rho, b.convention)?;
    if !bprime.members().is_subset(narrow.members()) {
        return Err(Error::PreconditionViolation("B' is not inside B_{eps rho}".into()));
    }
    if bprime.is_empty() || b.is_empty() {
        return Err(Error::PreconditionViolation("empty Bohr set".into()));
    }
    let conv = conv_with_measure(b, bprime);
    let inner: f64 = f.iter().zip(&conv).map(|(a, c)| a * c).sum::<f64>() / n as f64;
    let lhs = inner / b.measure();
    let mean_on_b =
        b.members().members().iter().map(|&x| f[x]).sum::<f64>() / b.len() as f64;
    let error = (lhs - mean_on_b).abs();
    let ek = eps * b.rank() as f64;
    Ok(ApproxIdentityReport {
        lhs,
        mean_on_b,
        error,
        ratio: (ek > 0.0).then(|| error / ek),
    })
}
