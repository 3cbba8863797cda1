use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use fqt_core::bohr::BohrSet;
use fqt_core::engine::{run_density_iteration, Terminal};
use fqt_core::equations::search::{max_solution_free_exhaustive, max_solution_free_heuristic};
use fqt_core::equations::store::{self, decode_poly, encode_poly};
use fqt_core::equations::{count_solutions, is_solution_free, EquationSpec, SearchRecord, Triviality};
use fqt_core::field::FieldCtx;
use fqt_core::fourier::{convolve_local, pairing_exponent, DualFreq, FourierPlan, GroupFn};
use fqt_core::group::{GroupN, PointSet};
use fqt_core::poly::GPoly;
use fqt_core::spectral::spectrum;
use fqt_core::znz::{approx_identity_check, find_regular_width, is_regular, Convention};

use crate::config::ExperimentConfig;
use crate::output::Emitter;
use crate::CliError;

type Res<T> = Result<T, CliError>;

fn need<T: Clone>(v: &Option<T>, key: &str) -> Res<T> {
    v.clone()
        .ok_or_else(|| CliError::Usage(format!("missing --{key}")))
}

fn group(cfg: &ExperimentConfig) -> Res<GroupN> {
    let ctx = Arc::new(FieldCtx::of_order(need(&cfg.q, "q")?)?);
    Ok(GroupN::new(ctx, need(&cfg.n, "N")?)?)
}

fn parse_set(s: &str, g: &GroupN) -> Res<PointSet> {
    let mut members = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        members.push(g.index(&decode_poly(part, g.q())?)?);
    }
    Ok(PointSet::from_members(g.size(), members))
}

fn encode_members(g: &GroupN, members: &[usize]) -> Vec<String> {
    members.iter().map(|&x| encode_poly(&g.elem(x), g.q())).collect()
}

/// The coefficient string `b_1 b_2 ... b_N` of a dual index.
fn encode_dual(g: &GroupN, xi: usize) -> String {
    encode_poly(&GPoly::from_index(xi, g.q(), g.n().max(1)), g.q())
}

fn default_eq(ctx: &FieldCtx) -> String {
    if ctx.p() == 2 {
        "1,1,1,1".into()
    } else {
        format!("1,1,{}", ctx.p() - 2)
    }
}

fn equation(cfg: &ExperimentConfig, g: &GroupN) -> Res<EquationSpec> {
    let text = match &cfg.eq {
        Some(e) => e.clone(),
        None => default_eq(g.ctx()),
    };
    let c = text
        .split(',')
        .map(|s| decode_poly(s.trim(), g.q()))
        .collect::<fqt_core::Result<Vec<_>>>()?;
    Ok(EquationSpec::new(g.ctx_arc().clone(), c)?)
}

fn random_real(g: &GroupN, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..g.size()).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_subset(size: usize, density: f64, rng: &mut ChaCha8Rng) -> PointSet {
    PointSet::from_mask((0..size).map(|_| rng.gen_bool(density)).collect())
}

/// `sum_xi |f^(xi)|^2` against `E_x |f(x)|^2`, relative.
fn parseval_error(f: &GroupFn, fhat: &GroupFn) -> f64 {
    let lhs: f64 = fhat.values().iter().map(|v| v.norm_sqr()).sum();
    let rhs: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / f.values().len() as f64;
    (lhs - rhs).abs() / rhs.max(f64::MIN_POSITIVE)
}

/// Direct `O(|G|^2)` evaluation of the transform, compared with `fhat`.
fn naive_error(f: &GroupFn, fhat: &GroupFn) -> f64 {
    let g = f.group();
    let p = g.ctx().p() as f64;
    let mut worst = 0.0f64;
    for xi in 0..g.size() {
        let (mut re, mut im) = (0.0, 0.0);
        for x in 0..g.size() {
            let th = 2.0 * std::f64::consts::PI * pairing_exponent(g, x, xi) as f64 / p;
            let v = f.get(x);
            re += v.re * th.cos() - v.im * th.sin();
            im += v.re * th.sin() + v.im * th.cos();
        }
        let n = g.size() as f64;
        let h = fhat.get(xi);
        worst = worst.max(((re / n - h.re).powi(2) + (im / n - h.im).powi(2)).sqrt());
    }
    worst
}

pub fn execute(cfg: &ExperimentConfig) -> Res<()> {
    let mut em = Emitter::open(cfg)?;
    em.header(cfg)?;
    let result = match cfg.subcommand.as_str() {
        "transform" => transform(cfg, &mut em),
        "bohr" => bohr(cfg, &mut em),
        "count" => count(cfg, &mut em),
        "search" => search(cfg, &mut em),
        "increment" => increment(cfg, &mut em),
        "znz" => znz(cfg, &mut em),
        "verify" => verify(cfg, &mut em),
        other => Err(CliError::Usage(format!("unknown subcommand {other:?}"))),
    };
    em.finish()?;
    result
}

#[derive(Serialize)]
struct SpectrumEntry {
    xi: String,
    magnitude: f64,
}

fn transform(cfg: &ExperimentConfig, em: &mut Emitter) -> Res<()> {
    let g = group(cfg)?;
    let f = match &cfg.set {
        Some(s) => GroupFn::indicator(&g, &parse_set(s, &g)?),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
            GroupFn::from_real(&g, &random_real(&g, &mut rng))
        }
    };
    let fhat = FourierPlan::new(&g).forward(&f);
    let eta = cfg.eta.unwrap_or(0.5);
    let l1 = f.l1_norm();
    let spec = if l1 > 0.0 {
        spectrum(&f, eta)?
            .entries
            .iter()
            .map(|&(xi, m)| SpectrumEntry {
                xi: encode_dual(&g, xi),
                magnitude: m,
            })
            .collect()
    } else {
        Vec::new()
    };
    let naive = (cfg.verification.as_deref() == Some("oracle")).then(|| naive_error(&f, &fhat));
    em.record(
        "transform",
        &serde_json::json!({
            "q": g.q(),
            "N": g.n(),
            "size": g.size(),
            "l1": l1,
            "parseval_relative_error": parseval_error(&f, &fhat),
            "naive_max_error": naive,
            "eta": eta,
            "spectrum": spec,
        }),
    )?;
    Ok(())
}

fn bohr(cfg: &ExperimentConfig, em: &mut Emitter) -> Res<()> {
    let g = group(cfg)?;
    let gamma: Vec<DualFreq> = match &cfg.gamma {
        Some(s) => s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| decode_poly(p, g.q()).map(|x| DualFreq::from_coeffs(x.coeffs())))
            .collect::<fqt_core::Result<_>>()?,
        None => Vec::new(),
    };
    let widths: Vec<usize> = match &cfg.widths {
        Some(s) => s
            .split(',')
            .map(|w| w.trim().parse().map_err(|_| CliError::Usage(format!("bad width {w:?}"))))
            .collect::<Res<_>>()?,
        None => vec![1],
    };
    let widths = match widths.len() {
        1 => vec![widths[0]; gamma.len()],
        n if n == gamma.len() => widths,
        _ => return Err(CliError::Usage("--widths must have one entry or one per frequency".into())),
    };
    let kappa_sum: usize = widths.iter().sum();
    let b = BohrSet::build(&g, gamma, widths)?;
    let members = b.point_set()?;
    let floor_exp = g.n().saturating_sub(kappa_sum);
    let floor = (g.q() as u128).pow(floor_exp as u32);
    let show = members.len() <= 4096;
    em.record(
        "bohr",
        &serde_json::json!({
            "rank": b.rank(),
            "width": b.width(),
            "dim": b.dim(),
            "size": b.size(),
            "measure": b.measure(),
            "size_floor": floor,
            "meets_floor": b.size() >= floor,
            "members": show.then(|| encode_members(&g, members.members())),
        }),
    )?;
    if let Some(c) = &cfg.dilate {
        let c = decode_poly(c, g.q())?;
        let d = b.dilate(&c)?;
        let image = members
            .members()
            .iter()
            .map(|&x| g.dilate(&c, x))
            .collect::<fqt_core::Result<Vec<_>>>()?;
        let image = PointSet::from_members(g.size(), image);
        let built = d.point_set()?;
        let deg = c.degree().unwrap_or(0) as u32;
        em.record(
            "bohr_dilate",
            &serde_json::json!({
                "c": encode_poly(&c, g.q()),
                "rank": d.rank(),
                "rank_bound": b.rank() + (g.q() as usize).pow(deg),
                "size": d.size(),
                "matches_enumeration": image == built,
                "members": show.then(|| encode_members(&g, built.members())),
            }),
        )?;
    }
    Ok(())
}

fn count(cfg: &ExperimentConfig, em: &mut Emitter) -> Res<()> {
    let g = group(cfg)?;
    let eq = equation(cfg, &g)?;
    let a = parse_set(&need(&cfg.set, "set")?, &g)?;
    let c = count_solutions(&a, &eq, g.n())?;
    let (free, witness) = is_solution_free(&a, &eq, g.n(), Triviality::Lenient)?;
    let (strict_free, _) = is_solution_free(&a, &eq, g.n(), Triviality::Strict)?;
    em.record(
        "count",
        &serde_json::json!({
            "s": eq.s(),
            "ell": eq.ell(),
            "genus": eq.genus(),
            "set_size": a.len(),
            "raw": c.raw,
            "lambda": format!("{}/{}", c.lambda_num, c.lambda_den),
            "lambda_value": c.lambda,
            "trivial_lower": c.trivial_lower,
            "fourier_raw": c.fourier_raw,
            "fourier_residual": c.fourier_residual,
            "fourier_agrees": c.fourier_agrees,
            "solution_free": free,
            "solution_free_strict": strict_free,
            "witness": witness.map(|w| encode_members(&g, &w)),
        }),
    )?;
    if !c.fourier_agrees {
        return Err(CliError::Failure("Fourier count disagrees with brute force".into()));
    }
    Ok(())
}

fn search_record_json(g: &GroupN, r: &SearchRecord) -> serde_json::Value {
    serde_json::json!({
        "q": r.q,
        "N": r.n,
        "c": r.c.iter().map(|x| encode_poly(x, r.q)).collect::<Vec<_>>(),
        "best_size": r.best_size,
        "best_set": encode_members(g, &r.best_set),
        "method": r.method,
        "certified": r.certified,
    })
}

fn search(cfg: &ExperimentConfig, em: &mut Emitter) -> Res<()> {
    let g = group(cfg)?;
    let eq = equation(cfg, &g)?;
    let method = match &cfg.method {
        Some(m) => m.clone(),
        None if g.size() <= fqt_core::equations::search::EXHAUSTIVE_LIMIT => "exhaustive".into(),
        None => "heuristic".into(),
    };
    let r = match method.as_str() {
        "exhaustive" => max_solution_free_exhaustive(g.n(), &eq)?,
        "heuristic" => {
            max_solution_free_heuristic(g.n(), &eq, cfg.budget.unwrap_or(32), cfg.seed.unwrap_or(0))?
        }
        other => return Err(CliError::Usage(format!("unknown method {other:?}"))),
    };
    if let Some(path) = &cfg.store {
        store::append(Path::new(path), &r)?;
    }
    em.record("search", &search_record_json(&g, &r))?;
    Ok(())
}

fn increment(cfg: &ExperimentConfig, em: &mut Emitter) -> Res<()> {
    let g = group(cfg)?;
    let eq = equation(cfg, &g)?;
    let (a, source) = match &cfg.set {
        Some(s) => (parse_set(s, &g)?, "given"),
        None => {
            let r =
                max_solution_free_heuristic(g.n(), &eq, cfg.budget.unwrap_or(16), cfg.seed.unwrap_or(0))?;
            (PointSet::from_members(g.size(), r.best_set), "heuristic-search")
        }
    };
    em.record(
        "input",
        &serde_json::json!({
            "source": source,
            "set_size": a.len(),
            "density": a.len() as f64 / g.size() as f64,
            "set": encode_members(&g, a.members()),
        }),
    )?;
    let traj = run_density_iteration(&a, &g, &eq, &cfg.tuning())?;
    for step in &traj.steps {
        em.record("iteration", step)?;
    }
    let exact = count_solutions(&a, &eq, g.n()).ok().map(|c| c.lambda);
    let certified = match &traj.terminal {
        Terminal::Certificate { lambda_lower, .. } => Some(*lambda_lower),
        _ => None,
    };
    let below_exact = match (certified, exact) {
        (Some(l), Some(e)) => Some(l <= e * (1.0 + 1e-9)),
        _ => None,
    };
    em.record(
        "terminal",
        &serde_json::json!({
            "terminal": traj.terminal,
            "steps": traj.steps.len(),
            "step_limit": traj.step_limit,
            "alpha": traj.alpha,
            "initial_density": traj.initial_density,
            "c_prime": traj.c_prime,
            "invariant_violation": traj.invariant_violation,
            "exact_lambda": exact,
            "certificate_below_exact": below_exact,
        }),
    )?;
    if traj.invariant_violation || below_exact == Some(false) {
        return Err(CliError::Failure("trajectory invariant violated".into()));
    }
    Ok(())
}

fn znz(cfg: &ExperimentConfig, em: &mut Emitter) -> Res<()> {
    let n = need(&cfg.modulus, "modulus")?;
    let gamma: Vec<u64> = match &cfg.gamma {
        Some(s) => s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse().map_err(|_| CliError::Usage(format!("bad residue {p:?}"))))
            .collect::<Res<_>>()?,
        None => Vec::new(),
    };
    let rho = need(&cfg.rho, "rho")?;
    let (eps_reg, b) = find_regular_width(n, &gamma, rho, Convention::Chordal)?;
    let report = is_regular(&b);
    let (size, floor) = b.size_floor_diagnostic();
    em.record(
        "znz_width",
        &serde_json::json!({
            "eps": eps_reg,
            "width": b.rho,
            "size": size,
            "rank": b.rank(),
            "regularity": report,
            "size_floor_diagnostic": floor,
        }),
    )?;
    let k = b.rank().max(1) as f64;
    let eps = cfg.eps.unwrap_or(1.0 / (200.0 * k));
    let bprime = b.rescale(eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    for trial in 0..cfg.trials.unwrap_or(1) {
        let f: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        let rep = approx_identity_check(&f, &b, &bprime, eps)?;
        em.record(
            "znz_identity",
            &serde_json::json!({ "trial": trial, "eps": eps, "report": rep }),
        )?;
    }
    Ok(())
}

fn verify(cfg: &ExperimentConfig, em: &mut Emitter) -> Res<()> {
    let suite = need(&cfg.suite, "suite")?;
    let trials = cfg.trials.unwrap_or(10);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    let oracle = cfg.verification.as_deref() == Some("oracle");
    let (max_error, tolerance, passed) = match suite.as_str() {
        "parseval" => {
            let g = group(cfg)?;
            let plan = FourierPlan::new(&g);
            let mut worst = 0.0f64;
            let mut naive_ok = true;
            for _ in 0..trials {
                let f = GroupFn::from_real(&g, &random_real(&g, &mut rng));
                let fhat = plan.forward(&f);
                worst = worst.max(parseval_error(&f, &fhat));
                if oracle {
                    naive_ok &= naive_error(&f, &fhat) <= 1e-12;
                }
            }
            (worst, 1e-9, worst <= 1e-9 && naive_ok)
        }
        "convolution" => {
            let g = group(cfg)?;
            let plan = FourierPlan::new(&g);
            let b = BohrSet::low_degree(&g, g.n() / 2)?;
            let bset = b.point_set()?;
            let mut worst = 0.0f64;
            for _ in 0..trials {
                let fv: Vec<f64> = (0..g.size())
                    .map(|x| if bset.contains(x) { rng.gen_range(-1.0..1.0) } else { 0.0 })
                    .collect();
                let f = GroupFn::from_real(&g, &fv);
                let h = GroupFn::from_real(&g, &random_real(&g, &mut rng));
                let conv = plan.forward(&convolve_local(&f, &h, &b)?);
                let prod = plan.forward(&f).pointwise_mul(&plan.forward(&h));
                worst = worst.max(conv.scaled(b.measure()).max_abs_diff(&prod));
            }
            (worst, 1e-9, worst <= 1e-9)
        }
        "counting" => {
            let g = group(cfg)?;
            let eq = equation(cfg, &g)?;
            let mut worst = 0.0f64;
            let mut ok = true;
            for _ in 0..trials {
                let a = random_subset(g.size(), 0.5, &mut rng);
                let c = count_solutions(&a, &eq, g.n())?;
                worst = worst.max(c.fourier_residual);
                ok &= c.fourier_agrees && c.raw >= c.trivial_lower;
            }
            (worst, 1e-6, ok)
        }
        "store" => {
            let path = need(&cfg.store, "store")?;
            let (count, ok) = match store::load(Path::new(&path)) {
                Ok(records) => (records.len(), true),
                Err(e) => {
                    eprintln!("{e}");
                    (0, false)
                }
            };
            em.record("store", &serde_json::json!({ "records": count }))?;
            (0.0, 0.0, ok)
        }
        other => return Err(CliError::Usage(format!("unknown suite {other:?}"))),
    };
    em.record(
        "verify",
        &serde_json::json!({
            "suite": suite,
            "trials": trials,
            "max_error": max_error,
            "tolerance": tolerance,
            "passed": passed,
        }),
    )?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Failure(format!("suite {suite}")))
    }
}
