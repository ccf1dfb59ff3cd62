//! Independent checks: recovery sequences for the relaxed similarity,
//! exhaustive path enumeration for the matching DP, the closed-form optimum
//! of the discrete measure problem, and strict-convergence diagnostics.

use serde::Serialize;

use crate::curve::{AcCurve, SbvCurve, Side};
use crate::error::{Error, Result};
use crate::matching::{build_grid, MoveTable};
use crate::relax::s_hat;
use crate::srvt::s_functional;
use crate::vecmath::{dist, dot, lerp, merge_sorted, sub};

/// Paths beyond this many are not enumerated by [`brute_force_match`].
pub const BRUTE_FORCE_PATH_LIMIT: f64 = 1e7;

/// Largest overshoot `S - Ŝ` tolerated by [`verify_relaxation`].
pub const OVERSHOOT_TOL: f64 = 1e-8;

/// Largest admissible `ε` for [`recovery_pair`]: half the smallest gap
/// between consecutive node parameters of either curve.
pub fn recovery_eps_max(c1: &SbvCurve, c2: &SbvCurve) -> f64 {
    let ps = merge_sorted(&c1.params(), &c2.params());
    ps.windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
        / 2.0
}

/// Continuous curves converging strictly to `c1`, `c2` as `ε → 0` whose
/// similarity equals `Ŝ(c1, c2)`.
///
/// Time is compressed by `1 - mε` (with `m` jumps in the union of both jump
/// sets) to free a window of width `ε` after every jump parameter, where each
/// curve that jumps there follows a linear ramp and the other one waits.
/// Wherever the two velocities then pair negatively, including antiparallel
/// co-located ramps, the interval is cut into cells of width at most `ε` and
/// within each cell `c1` moves during the first half, `c2` during the second.
pub fn recovery_pair(c1: &SbvCurve, c2: &SbvCurve, eps: f64) -> Result<(AcCurve, AcCurve)> {
    c1.check_same_dim(c2)?;
    let max = recovery_eps_max(c1, c2);
    if !(eps > 0.0 && eps < max) {
        return Err(Error::EpsilonTooLarge { eps, max });
    }
    let params = merge_sorted(&c1.params(), &c2.params());
    let jumps: Vec<bool> = params
        .iter()
        .map(|&x| is_jump_at(c1, x) || is_jump_at(c2, x))
        .collect();
    let m = jumps.iter().filter(|&&j| j).count() as f64;

    // knots (y, c1 value, c2 value) of the time-compressed pair
    let mut knots: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::with_capacity(2 * params.len());
    let mut before = 0.0;
    for (&x, &jump) in params.iter().zip(&jumps) {
        let y = (1.0 - m * eps) * x + eps * before;
        knots.push((y, c1.eval(x, Side::Left)?, c2.eval(x, Side::Left)?));
        if jump {
            before += 1.0;
            knots.push((y + eps, c1.eval(x, Side::Right)?, c2.eval(x, Side::Right)?));
        }
    }
    knots[0].0 = 0.0;
    knots.last_mut().unwrap().0 = 1.0;

    let mut ts = vec![0.0];
    let mut p1 = vec![knots[0].1.clone()];
    let mut p2 = vec![knots[0].2.clone()];
    for w in knots.windows(2) {
        let (y0, a0, b0) = &w[0];
        let (y1, a1, b1) = &w[1];
        let da = sub(a1, a0);
        let db = sub(b1, b0);
        if dot(&da, &db) < 0.0 {
            // the relative slack keeps a window of width ε in one cell
            let cells = ((y1 - y0) / eps * (1.0 - 1e-9)).ceil().max(1.0) as usize;
            for k in 0..cells {
                let lo = k as f64 / cells as f64;
                let hi = (k + 1) as f64 / cells as f64;
                let last = k + 1 == cells;
                // endpoints are copied, not interpolated: an ulp of motion on
                // the waiting curve would pair with the moving one
                let a_hi = if last { a1.clone() } else { lerp(a0, a1, hi) };
                ts.push(y0 + (lo + 0.5 / cells as f64) * (y1 - y0));
                p1.push(a_hi.clone());
                p2.push(p2.last().unwrap().clone());
                ts.push(if last { *y1 } else { y0 + hi * (y1 - y0) });
                p1.push(a_hi);
                p2.push(if last { b1.clone() } else { lerp(b0, b1, hi) });
            }
        } else {
            ts.push(*y1);
            p1.push(a1.clone());
            p2.push(b1.clone());
        }
    }
    Ok((AcCurve::polyline(&ts, &p1)?, AcCurve::polyline(&ts, &p2)?))
}

fn is_jump_at(c: &SbvCurve, x: f64) -> bool {
    c.node_at(x).map_or(false, |i| c.nodes()[i].is_jump())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxReport {
    pub epsilons: Vec<f64>,
    /// `S(c₁^ε, c₂^ε)` for each `ε`.
    pub s_values: Vec<f64>,
    pub s_hat_target: f64,
    /// `max(S - Ŝ)` over the schedule.
    pub max_overshoot: f64,
    /// `|S(ε_min) - Ŝ|`.
    pub final_gap: f64,
    /// Lengths of the recovery curves at `ε_min`.
    pub lengths: (f64, f64),
    pub passed: bool,
}

/// Evaluates the recovery sequence on a strictly decreasing `ε` schedule
/// against `Ŝ` from [`s_hat`].
pub fn verify_relaxation(c1: &SbvCurve, c2: &SbvCurve, epsilons: &[f64]) -> Result<ApproxReport> {
    if epsilons.is_empty() || epsilons.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidInput(
            "ε schedule must be non-empty and strictly decreasing".into(),
        ));
    }
    let target = s_hat(c1, c2)?;
    let mut s_values = Vec::with_capacity(epsilons.len());
    let mut lengths = (0.0, 0.0);
    for &eps in epsilons {
        let (a, b) = recovery_pair(c1, c2, eps)?;
        s_values.push(s_functional(&a, &b)?);
        lengths = (a.length(), b.length());
    }
    let max_overshoot = s_values
        .iter()
        .map(|s| s - target)
        .fold(f64::NEG_INFINITY, f64::max);
    let final_gap = (s_values.last().unwrap() - target).abs();
    Ok(ApproxReport {
        epsilons: epsilons.to_vec(),
        s_values,
        s_hat_target: target,
        max_overshoot,
        final_gap,
        lengths,
        passed: max_overshoot <= OVERSHOOT_TOL,
    })
}

/// Exhaustive maximum of the matching objective over all admissible monotone
/// paths on explicit grids, with no limit on the move span beyond the rule
/// that a move stays within one linear piece of each curve.
pub fn brute_force_on_grids(a: &AcCurve, b: &AcCurve, grid_a: &[f64], grid_b: &[f64]) -> Result<f64> {
    let table = MoveTable::new(a, b, grid_a, grid_b, f64::INFINITY, f64::INFINITY)?;
    let paths = table.path_count();
    if paths > BRUTE_FORCE_PATH_LIMIT {
        return Err(Error::InstanceTooLarge { paths });
    }
    let target = (table.a.len() - 1, table.b.len() - 1);
    let mut best = f64::NEG_INFINITY;
    walk(&table, (0, 0), 0.0, target, &mut best);
    Ok(best)
}

fn walk(t: &MoveTable, at: (usize, usize), acc: f64, target: (usize, usize), best: &mut f64) {
    if at == target {
        if acc > *best {
            *best = acc;
        }
        return;
    }
    // `lo` is non-decreasing, so the first inadmissible index ends the scan
    for i in at.0..=target.0 {
        if t.a.lo[i] > at.0 {
            break;
        }
        for j in at.1..=target.1 {
            if t.b.lo[j] > at.1 {
                break;
            }
            if (i, j) != at {
                let g = t.gain(i, i - at.0, j, j - at.1);
                walk(t, (i, j), acc + g, target, best);
            }
        }
    }
}

/// [`brute_force_on_grids`] on the grids `match_dp` builds for `n1 × n2`.
pub fn brute_force_match(a: &AcCurve, b: &AcCurve, n1: usize, n2: usize) -> Result<f64> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::InvalidConfig("grid sizes must be at least 2".into()));
    }
    let ga = build_grid(n1, &a.params());
    let gb = build_grid(n2, &b.params());
    brute_force_on_grids(a, b, &ga, &gb)
}

/// `F(μ) = Σ gᵢ √(μᵢ νᵢ)` for measures on finitely many points.
pub fn mu_functional(mu: &[f64], nu: &[f64], g: &[f64]) -> f64 {
    mu.iter()
        .zip(nu)
        .zip(g)
        .map(|((m, n), g)| g * (m * n).sqrt())
        .sum()
}

/// Maximiser of [`mu_functional`] over probability vectors: `μ*ᵢ ∝ gᵢ² νᵢ`
/// with value `√(Σ gᵢ² νᵢ)`. When every `μ` scores zero, returns the
/// uniform vector on the support of `ν` and `0`.
pub fn lemma_mu_opt(nu: &[f64], g: &[f64]) -> Result<(Vec<f64>, f64)> {
    if nu.len() != g.len() || nu.is_empty() {
        return Err(Error::InvalidInput("ν and g need the same non-zero length".into()));
    }
    if nu.iter().chain(g).any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidInput("weights must be finite and non-negative".into()));
    }
    if !(nu.iter().sum::<f64>() > 0.0) {
        return Err(Error::InvalidInput("ν must have positive mass".into()));
    }
    let w: Vec<f64> = nu.iter().zip(g).map(|(n, g)| g * g * n).collect();
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        let support = nu.iter().filter(|&&n| n > 0.0).count() as f64;
        let mu = nu.iter().map(|&n| if n > 0.0 { 1.0 / support } else { 0.0 }).collect();
        return Ok((mu, 0.0));
    }
    Ok((w.iter().map(|x| x / total).collect(), total.sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictLimitReport {
    /// Per element, largest `|cₖ(t) - c(t)|` over the samples.
    pub point_deviation: Vec<f64>,
    /// Per element, `|len(cₖ) - len(c)|`.
    pub length_deviation: Vec<f64>,
    /// The last element is within tolerance pointwise.
    pub points_ok: bool,
    /// The last element is within tolerance in length.
    pub lengths_ok: bool,
}

impl StrictLimitReport {
    pub fn passed(&self) -> bool {
        self.points_ok && self.lengths_ok
    }
}

/// Pointwise and length deviations of a sequence from its claimed strict
/// limit. Sample parameters must avoid the jump set of `limit`.
pub fn strict_limit_check(
    sequence: &[SbvCurve],
    limit: &SbvCurve,
    sample_ts: &[f64],
    tol: f64,
) -> Result<StrictLimitReport> {
    if sequence.is_empty() {
        return Err(Error::InvalidInput("empty sequence".into()));
    }
    if let Some(&t) = sample_ts.iter().find(|&&t| is_jump_at(limit, t)) {
        return Err(Error::InvalidInput(format!("sample {t} is a jump parameter of the limit")));
    }
    let target: Vec<Vec<f64>> = sample_ts
        .iter()
        .map(|&t| limit.eval(t, Side::Right))
        .collect::<Result<_>>()?;
    let len = limit.length();
    let mut point_deviation = Vec::with_capacity(sequence.len());
    let mut length_deviation = Vec::with_capacity(sequence.len());
    for c in sequence {
        c.check_same_dim(limit)?;
        let mut worst: f64 = 0.0;
        for (&t, p) in sample_ts.iter().zip(&target) {
            let l = dist(&c.eval(t, Side::Left)?, p);
            let r = dist(&c.eval(t, Side::Right)?, p);
            worst = worst.max(l).max(r);
        }
        point_deviation.push(worst);
        length_deviation.push((c.length() - len).abs());
    }
    Ok(StrictLimitReport {
        points_ok: *point_deviation.last().unwrap() <= tol,
        lengths_ok: *length_deviation.last().unwrap() <= tol,
        point_deviation,
        length_deviation,
    })
}
