//! Optimal reparametrisation pairs by dynamic programming over monotone
//! lattice paths, and the shape distance for curves with jumps.
//!
//! Both curves are sampled on parameter grids that contain all of their node
//! parameters. A path visits grid points `(s_i, t_j)` with both indices
//! non-decreasing; one move from `(i', j')` to `(i, j)` earns
//!
//! ```text
//! ⟨Δa/|Δa|, Δb/|Δb|⟩⁺ √(|Δa||Δb|),   Δa = a(s_i) - a(s_i'),  Δb = b(t_j) - b(t_j')
//! ```
//!
//! A move may not cross a node parameter of either curve, so the chord
//! increments are the exact increments of one linear piece and the path value
//! equals the relaxed similarity of the reparametrised curves. Moves with zero
//! span on one axis are plateaus of one reparametrisation.
//!
//! Shape distances are computed on `G(c)`, which has no jumps, after passing to
//! the constant-speed parametrisation.

use crate::curve::{AcCurve, SbvCurve, Side};
use crate::error::{Error, Result};
use crate::gtransform::{compose_ac, jump_embedding, JumpEmbedding, Reparam};
use crate::relax::s_hat;
use crate::vecmath::{dot, merge_sorted, norm, scale, sub};

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    /// Uniform grid points per axis (node parameters are always added).
    pub n1: usize,
    pub n2: usize,
    /// Longest move, in units of the base uniform spacing `1/(n - 1)`.
    pub window: usize,
    pub refine_rounds: usize,
    pub refine_factor: usize,
    pub convergence_tol: f64,
    /// Match constant-speed parametrisations (collapses zero-speed pieces).
    pub constant_speed: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n1: 33,
            n2: 33,
            window: 8,
            refine_rounds: 3,
            refine_factor: 2,
            convergence_tol: 1e-9,
            constant_speed: true,
        }
    }
}

impl GridConfig {
    pub fn with_grid(n: usize) -> Self {
        GridConfig {
            n1: n,
            n2: n,
            ..Default::default()
        }
    }

    /// Window wide enough that only the one-piece rule limits moves.
    pub fn full_window(n1: usize, n2: usize) -> Self {
        GridConfig {
            n1,
            n2,
            window: n1.max(n2),
            refine_rounds: 1,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.n1 < 2 || self.n2 < 2 {
            return bad("grid sizes must be at least 2");
        }
        if self.window < 1 {
            return bad("window must be at least 1");
        }
        if self.refine_rounds < 1 {
            return bad("at least one refinement round");
        }
        if self.refine_factor < 1 {
            return bad("refine factor must be at least 1");
        }
        if !(self.convergence_tol > 0.0) {
            return bad("convergence tolerance must be positive");
        }
        Ok(())
    }

    fn param_windows(&self) -> (f64, f64) {
        (
            self.window as f64 / (self.n1 - 1) as f64,
            self.window as f64 / (self.n2 - 1) as f64,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundInfo {
    pub n1: usize,
    pub n2: usize,
    /// Sizes of the grids actually searched.
    pub grid1: usize,
    pub grid2: usize,
    pub s_star: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub s_star: f64,
    /// `len₁ + len₂ - 2 s_star`.
    pub d_shape: f64,
    pub len1: f64,
    pub len2: f64,
    /// Reparametrisations of [`MatchResult::curve1`] and [`MatchResult::curve2`].
    pub psi1: Reparam,
    pub psi2: Reparam,
    /// `ζᵢ ∘ ψᵢ`, reparametrisations of the original curves (shape matching only).
    pub phi1: Option<Reparam>,
    pub phi2: Option<Reparam>,
    /// The continuous curves that were matched (`G(cᵢ)` for shape matching).
    pub curve1: AcCurve,
    pub curve2: AcCurve,
    /// `Ŝ(curve1 ∘ ψ₁, curve2 ∘ ψ₂)`, recomputed from the decoded path.
    pub s_realized: f64,
    pub rounds: Vec<RoundInfo>,
    /// Set when an input has zero-speed pieces; the value is then the
    /// distance between constant-speed representatives only.
    pub zero_speed_input: bool,
}

impl MatchResult {
    /// Rooted shape distance, with round-off below zero clamped away.
    pub fn d_shape_rooted(&self) -> f64 {
        self.d_shape.max(0.0).sqrt()
    }
}

/// Uniform grid of `n` points merged with `nodes`.
pub fn build_grid(n: usize, nodes: &[f64]) -> Vec<f64> {
    let uniform: Vec<f64> = (0..n)
        .map(|i| if i + 1 == n { 1.0 } else { i as f64 / (n - 1) as f64 })
        .collect();
    merge_sorted(&uniform, nodes)
}

/// Precomputed unit increment and root length for every admissible move on
/// one axis.
pub(crate) struct AxisMoves {
    /// Smallest admissible predecessor index for each grid index.
    pub(crate) lo: Vec<usize>,
    /// `dirs[i][i - i']` and `roots[i][i - i']` for `i' ∈ lo[i]..=i`.
    dirs: Vec<Vec<Vec<f64>>>,
    roots: Vec<Vec<f64>>,
}

impl AxisMoves {
    fn new(curve: &AcCurve, grid: &[f64], window: f64) -> Result<Self> {
        check_grid(curve, grid)?;
        let values: Vec<Vec<f64>> = grid
            .iter()
            .map(|&t| curve.eval(t, Side::Right))
            .collect::<Result<_>>()?;
        let nodes = curve.params();
        let is_node: Vec<bool> = grid
            .iter()
            .map(|t| nodes.binary_search_by(|n| n.total_cmp(t)).is_ok())
            .collect();
        let slack = 1e-12;
        let mut lo = Vec::with_capacity(grid.len());
        let mut last_node = 0;
        let mut w = 0;
        for i in 0..grid.len() {
            while grid[i] - grid[w] > window + slack {
                w += 1;
            }
            lo.push(w.max(last_node).min(i));
            if is_node[i] {
                last_node = i;
            }
        }
        let mut dirs = Vec::with_capacity(grid.len());
        let mut roots = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let mut d = Vec::with_capacity(i - lo[i] + 1);
            let mut r = Vec::with_capacity(i - lo[i] + 1);
            for back in 0..=(i - lo[i]) {
                let delta = sub(&values[i], &values[i - back]);
                let len = norm(&delta);
                if len == 0.0 {
                    d.push(vec![0.0; delta.len()]);
                    r.push(0.0);
                } else {
                    d.push(scale(&delta, 1.0 / len));
                    r.push(len.sqrt());
                }
            }
            dirs.push(d);
            roots.push(r);
        }
        Ok(AxisMoves { lo, dirs, roots })
    }

    pub(crate) fn len(&self) -> usize {
        self.lo.len()
    }
}

fn check_grid(curve: &AcCurve, grid: &[f64]) -> Result<()> {
    if grid.len() < 2
        || grid[0] != 0.0
        || *grid.last().unwrap() != 1.0
        || grid.windows(2).any(|w| !(w[1] > w[0]))
    {
        return Err(Error::InvalidConfig(
            "grid must increase strictly from 0 to 1".into(),
        ));
    }
    for t in curve.params() {
        if grid.binary_search_by(|g| g.total_cmp(&t)).is_err() {
            return Err(Error::GridMissingNode(t));
        }
    }
    Ok(())
}

/// The matching objective on a fixed pair of grids.
pub(crate) struct MoveTable {
    pub(crate) a: AxisMoves,
    pub(crate) b: AxisMoves,
}

impl MoveTable {
    pub(crate) fn new(
        a: &AcCurve,
        b: &AcCurve,
        grid_a: &[f64],
        grid_b: &[f64],
        window_a: f64,
        window_b: f64,
    ) -> Result<Self> {
        a.check_same_dim(b)?;
        Ok(MoveTable {
            a: AxisMoves::new(a, grid_a, window_a)?,
            b: AxisMoves::new(b, grid_b, window_b)?,
        })
    }

    /// Gain of the move `(i - di, j - dj) → (i, j)`.
    #[inline]
    pub(crate) fn gain(&self, i: usize, di: usize, j: usize, dj: usize) -> f64 {
        let c = dot(&self.a.dirs[i][di], &self.b.dirs[j][dj]);
        if c > 0.0 {
            c * (self.a.roots[i][di] * self.b.roots[j][dj])
        } else {
            0.0
        }
    }

    /// Number of admissible monotone paths from the first to the last corner.
    pub(crate) fn path_count(&self) -> f64 {
        let (na, nb) = (self.a.len(), self.b.len());
        let mut count = vec![0.0f64; na * nb];
        count[0] = 1.0;
        for i in 0..na {
            for j in 0..nb {
                if i == 0 && j == 0 {
                    continue;
                }
                let mut c = 0.0;
                for pi in self.a.lo[i]..=i {
                    for pj in self.b.lo[j]..=j {
                        if pi != i || pj != j {
                            c += count[pi * nb + pj];
                        }
                    }
                }
                count[i * nb + j] = c;
            }
        }
        count[na * nb - 1]
    }
}

/// Raw outcome of one dynamic-programming run.
#[derive(Debug, Clone, PartialEq)]
pub struct DpOutcome {
    pub s_star: f64,
    /// Grid index pairs visited by the optimal path.
    pub path: Vec<(usize, usize)>,
    pub psi1: Reparam,
    pub psi2: Reparam,
}

fn run_dp(table: &MoveTable, grid_a: &[f64], grid_b: &[f64]) -> DpOutcome {
    let (na, nb) = (table.a.len(), table.b.len());
    let mut value = vec![f64::NEG_INFINITY; na * nb];
    let mut pred = vec![(0usize, 0usize); na * nb];
    value[0] = 0.0;
    for i in 0..na {
        for j in 0..nb {
            if i == 0 && j == 0 {
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            let mut best_pred = (0, 0);
            let mut best_skew = usize::MAX;
            for pi in table.a.lo[i]..=i {
                let di = i - pi;
                for pj in table.b.lo[j]..=j {
                    let dj = j - pj;
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let v = value[pi * nb + pj] + table.gain(i, di, j, dj);
                    let skew = di.abs_diff(dj);
                    // candidates arrive in increasing (pi, pj), so a strict
                    // comparison on skew keeps the smallest index among ties
                    if v > best || (v == best && skew < best_skew) {
                        best = v;
                        best_pred = (pi, pj);
                        best_skew = skew;
                    }
                }
            }
            value[i * nb + j] = best;
            pred[i * nb + j] = best_pred;
        }
    }

    let mut path = vec![(na - 1, nb - 1)];
    while *path.last().unwrap() != (0, 0) {
        let (i, j) = *path.last().unwrap();
        path.push(pred[i * nb + j]);
    }
    path.reverse();
    let (psi1, psi2) = decode_path(&path, grid_a, grid_b);
    DpOutcome {
        s_star: value[na * nb - 1],
        path,
        psi1,
        psi2,
    }
}

/// Turns a grid path into reparametrisations with `ψ₁' + ψ₂' = 2`.
fn decode_path(path: &[(usize, usize)], grid_a: &[f64], grid_b: &[f64]) -> (Reparam, Reparam) {
    let mut k1 = Vec::with_capacity(path.len());
    let mut k2 = Vec::with_capacity(path.len());
    let mut u = 0.0;
    k1.push((0.0, 0.0));
    k2.push((0.0, 0.0));
    for w in path.windows(2) {
        let ds = grid_a[w[1].0] - grid_a[w[0].0];
        let dt = grid_b[w[1].1] - grid_b[w[0].1];
        u += 0.5 * (ds + dt);
        k1.push((u, grid_a[w[1].0]));
        k2.push((u, grid_b[w[1].1]));
    }
    let last = k1.len() - 1;
    k1[last] = (1.0, 1.0);
    k2[last] = (1.0, 1.0);
    // drop knots that round-off squeezed onto their predecessor
    let keep: Vec<bool> = (0..k1.len())
        .map(|k| k == 0 || k == last || (k1[k].0 > k1[k - 1].0 && k1[k].0 < 1.0))
        .collect();
    let filter = |v: Vec<(f64, f64)>| -> Vec<(f64, f64)> {
        v.into_iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(x, _)| x)
            .collect()
    };
    (
        Reparam::new(filter(k1)).expect("decoded path is monotone"),
        Reparam::new(filter(k2)).expect("decoded path is monotone"),
    )
}

/// Dynamic programme on explicit grids. Each grid must contain every node
/// parameter of its curve; `window_*` bound the parameter span of one move.
pub fn match_dp_on_grids(
    a: &AcCurve,
    b: &AcCurve,
    grid_a: &[f64],
    grid_b: &[f64],
    window_a: f64,
    window_b: f64,
) -> Result<DpOutcome> {
    let table = MoveTable::new(a, b, grid_a, grid_b, window_a, window_b)?;
    Ok(run_dp(&table, grid_a, grid_b))
}

/// Optimal matching of two continuous curves on grids of `cfg.n1 × cfg.n2`
/// uniform points plus node parameters, in the curves' own parametrisation.
pub fn match_dp(a: &AcCurve, b: &AcCurve, cfg: &GridConfig) -> Result<MatchResult> {
    cfg.validate()?;
    a.check_same_dim(b)?;
    let ga = build_grid(cfg.n1, &a.params());
    let gb = build_grid(cfg.n2, &b.params());
    let (wa, wb) = cfg.param_windows();
    let out = match_dp_on_grids(a, b, &ga, &gb, wa, wb)?;
    let s_realized = realized(a, &out.psi1, b, &out.psi2)?;
    let (len1, len2) = (a.length(), b.length());
    Ok(MatchResult {
        s_star: out.s_star,
        d_shape: len1 + len2 - 2.0 * out.s_star,
        len1,
        len2,
        psi1: out.psi1,
        psi2: out.psi2,
        phi1: None,
        phi2: None,
        curve1: a.clone(),
        curve2: b.clone(),
        s_realized,
        rounds: vec![RoundInfo {
            n1: cfg.n1,
            n2: cfg.n2,
            grid1: ga.len(),
            grid2: gb.len(),
            s_star: out.s_star,
        }],
        zero_speed_input: a.has_zero_speed_segment() || b.has_zero_speed_segment(),
    })
}

fn realized(a: &AcCurve, psi1: &Reparam, b: &AcCurve, psi2: &Reparam) -> Result<f64> {
    s_hat(compose_ac(a, psi1).as_sbv(), compose_ac(b, psi2).as_sbv())
}

/// Everything about one input curve that does not depend on the grid.
struct Prepared {
    embedding: JumpEmbedding,
    /// Curve handed to the DP (constant-speed `G(c)` or `G(c)` itself).
    matched: AcCurve,
    /// `σ`: parameter of `G(c)` → parameter of `matched`.
    sigma: Reparam,
    /// A right inverse of `σ`, so that `G(c) ∘ σ⁻¹ = matched`.
    sigma_inv: Reparam,
}

impl Prepared {
    fn new(c: &SbvCurve, constant_speed: bool) -> Result<Self> {
        let embedding = jump_embedding(c)?;
        if !constant_speed {
            return Ok(Prepared {
                matched: embedding.g.clone(),
                sigma: Reparam::identity(),
                sigma_inv: Reparam::identity(),
                embedding,
            });
        }
        let g = &embedding.g;
        let matched = g.constant_speed(0.0)?;
        let fractions = g.arclength_fractions();
        let sigma = Reparam::new(fractions.clone())?;
        let mut inv: Vec<(f64, f64)> = Vec::with_capacity(fractions.len());
        for &(t, s) in &fractions {
            if inv.last().map_or(true, |k| s > k.0) {
                inv.push((s, t));
            }
        }
        inv.last_mut().unwrap().1 = 1.0;
        Ok(Prepared {
            matched,
            sigma,
            sigma_inv: Reparam::new(inv)?,
            embedding,
        })
    }

    /// Parameter of `matched` corresponding to `x` on the original curve.
    fn anchor(&self, x: f64, side: Side) -> f64 {
        let xi = self.embedding.xi.eval(x, side).expect("x in [0, 1]")[0];
        self.sigma.eval(xi)
    }
}

/// Points `(a_k, b_k)` along which the identity reparametrisation of the
/// original curves runs in the matched parametrisations.
fn identity_anchors(p1: &Prepared, p2: &Prepared, c1: &SbvCurve, c2: &SbvCurve) -> Vec<(f64, f64)> {
    let xs = merge_sorted(&c1.params(), &c2.params());
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(2 * xs.len());
    for x in xs {
        for side in [Side::Left, Side::Right] {
            let mut a = p1.anchor(x, side);
            let mut b = p2.anchor(x, side);
            if let Some(&(pa, pb)) = out.last() {
                a = a.max(pa);
                b = b.max(pb);
                if (a, b) == (pa, pb) {
                    continue;
                }
            }
            out.push((a, b));
        }
    }
    out
}

/// Image of `u` on the other axis along a monotone anchor chain; `None` on a
/// plateau of the chain.
fn along_anchors(anchors: &[(f64, f64)], u: f64) -> Option<f64> {
    let k = anchors.partition_point(|p| p.0 < u);
    if k < anchors.len() && anchors[k].0 == u {
        return Some(anchors[k].1);
    }
    if k == 0 || k == anchors.len() {
        return None;
    }
    let (a0, b0) = anchors[k - 1];
    let (a1, b1) = anchors[k];
    if a1 == a0 {
        return None;
    }
    Some((b0 + (u - a0) / (a1 - a0) * (b1 - b0)).clamp(b0, b1))
}

fn sorted_dedup(mut v: Vec<f64>) -> Vec<f64> {
    v.retain(|x| (0.0..=1.0).contains(x));
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

struct ShapeProblem<'a> {
    c1: &'a SbvCurve,
    c2: &'a SbvCurve,
    p1: Prepared,
    p2: Prepared,
    anchors: Vec<(f64, f64)>,
}

impl<'a> ShapeProblem<'a> {
    fn new(c1: &'a SbvCurve, c2: &'a SbvCurve, cfg: &GridConfig) -> Result<Self> {
        let p1 = Prepared::new(c1, cfg.constant_speed)?;
        let p2 = Prepared::new(c2, cfg.constant_speed)?;
        let anchors = identity_anchors(&p1, &p2, c1, c2);
        Ok(ShapeProblem {
            c1,
            c2,
            p1,
            p2,
            anchors,
        })
    }

    fn grids(&self, n1: usize, n2: usize) -> (Vec<f64>, Vec<f64>) {
        let u1 = build_grid(n1, &self.p1.matched.params());
        let u2 = build_grid(n2, &self.p2.matched.params());
        let swapped: Vec<(f64, f64)> = self.anchors.iter().map(|&(a, b)| (b, a)).collect();
        let mut g1 = u1.clone();
        g1.extend(self.anchors.iter().map(|p| p.0));
        g1.extend(u2.iter().filter_map(|&u| along_anchors(&swapped, u)));
        let mut g2 = u2.clone();
        g2.extend(self.anchors.iter().map(|p| p.1));
        g2.extend(u1.iter().filter_map(|&u| along_anchors(&self.anchors, u)));
        (sorted_dedup(g1), sorted_dedup(g2))
    }

    fn round(&self, n1: usize, n2: usize, windows: (f64, f64)) -> Result<(DpOutcome, RoundInfo)> {
        let (g1, g2) = self.grids(n1, n2);
        let out = match_dp_on_grids(&self.p1.matched, &self.p2.matched, &g1, &g2, windows.0, windows.1)?;
        let info = RoundInfo {
            n1,
            n2,
            grid1: g1.len(),
            grid2: g2.len(),
            s_star: out.s_star,
        };
        Ok((out, info))
    }

    fn finish(&self, out: DpOutcome, rounds: Vec<RoundInfo>) -> Result<MatchResult> {
        let psi1 = self.p1.sigma_inv.compose(&out.psi1);
        let psi2 = self.p2.sigma_inv.compose(&out.psi2);
        let phi1 = self.p1.embedding.zeta.compose(&psi1);
        let phi2 = self.p2.embedding.zeta.compose(&psi2);
        let g1 = self.p1.embedding.g.clone();
        let g2 = self.p2.embedding.g.clone();
        let s_realized = realized(&g1, &psi1, &g2, &psi2)?;
        let (len1, len2) = (self.c1.length(), self.c2.length());
        Ok(MatchResult {
            s_star: out.s_star,
            d_shape: len1 + len2 - 2.0 * out.s_star,
            len1,
            len2,
            psi1,
            psi2,
            phi1: Some(phi1),
            phi2: Some(phi2),
            curve1: g1,
            curve2: g2,
            s_realized,
            rounds,
            zero_speed_input: self.c1.has_zero_speed_segment()
                || self.c2.has_zero_speed_segment(),
        })
    }
}

/// Matching against a zero-length curve: `Ŝ(0, ·) = 0`.
fn degenerate(c1: &SbvCurve, c2: &SbvCurve) -> Result<MatchResult> {
    let as_ac = |c: &SbvCurve| -> Result<AcCurve> {
        if c.length() == 0.0 {
            AcCurve::try_from(c.clone())
        } else {
            jump_embedding(c).map(|e| e.g)
        }
    };
    let (len1, len2) = (c1.length(), c2.length());
    Ok(MatchResult {
        s_star: 0.0,
        d_shape: len1 + len2,
        len1,
        len2,
        psi1: Reparam::identity(),
        psi2: Reparam::identity(),
        phi1: Some(Reparam::identity()),
        phi2: Some(Reparam::identity()),
        curve1: as_ac(c1)?,
        curve2: as_ac(c2)?,
        s_realized: 0.0,
        rounds: Vec::new(),
        zero_speed_input: false,
    })
}

/// Shape distance `d̂^S([c₁], [c₂])` from one DP round at the configured grid.
pub fn shape_distance(c1: &SbvCurve, c2: &SbvCurve, cfg: &GridConfig) -> Result<MatchResult> {
    refine(
        c1,
        c2,
        &GridConfig {
            refine_rounds: 1,
            ..cfg.clone()
        },
    )
}

/// Shape distance with successive grid refinement.
///
/// Round `r` uses `(n - 1) · factor^r + 1` uniform points per axis, so the
/// grids are nested and the move window (fixed in parameter units) admits
/// every earlier path: `s_star` cannot decrease from one round to the next.
/// Stops once `s_star` changes by less than the tolerance or reaches the
/// upper bound `√(len₁ len₂)`.
pub fn refine(c1: &SbvCurve, c2: &SbvCurve, cfg: &GridConfig) -> Result<MatchResult> {
    cfg.validate()?;
    c1.check_same_dim(c2)?;
    if c1.length() == 0.0 || c2.length() == 0.0 {
        return degenerate(c1, c2);
    }
    let problem = ShapeProblem::new(c1, c2, cfg)?;
    let windows = cfg.param_windows();
    let bound = (c1.length() * c2.length()).sqrt();
    let mut rounds = Vec::new();
    let mut best: Option<DpOutcome> = None;
    let (mut n1, mut n2) = (cfg.n1, cfg.n2);
    for r in 0..cfg.refine_rounds {
        if r > 0 {
            n1 = (n1 - 1) * cfg.refine_factor + 1;
            n2 = (n2 - 1) * cfg.refine_factor + 1;
        }
        let (out, info) = problem.round(n1, n2, windows)?;
        rounds.push(info);
        let prev = best.as_ref().map(|b| b.s_star);
        let s = out.s_star;
        best = Some(out);
        if s >= bound - cfg.convergence_tol {
            break;
        }
        if let Some(p) = prev {
            if (s - p).abs() < cfg.convergence_tol {
                break;
            }
        }
    }
    problem.finish(best.expect("at least one round"), rounds)
}

/// `k` matched point pairs `(curve1(ψ₁(u)), curve2(ψ₂(u)))` at equally
/// spaced `u` (just `u = 0` when `k = 1`).
pub fn correspondences(m: &MatchResult, k: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    (0..k)
        .map(|i| {
            let u = if k <= 1 { 0.0 } else { i as f64 / (k - 1) as f64 };
            let p = m.curve1.at(m.psi1.eval(u)).expect("ψ maps into [0, 1]");
            let q = m.curve2.at(m.psi2.eval(u)).expect("ψ maps into [0, 1]");
            (p, q)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Node;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Vec<f64> {
        vec![x, y]
    }

    fn seg(to: [f64; 2]) -> AcCurve {
        AcCurve::uniform(&[p(0.0, 0.0), to.to_vec()]).unwrap()
    }

    fn l_shape() -> AcCurve {
        AcCurve::uniform(&[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)]).unwrap()
    }

    fn step(at: f64, to: Vec<f64>) -> SbvCurve {
        SbvCurve::new(
            2,
            vec![
                Node::point(0.0, p(0.0, 0.0)),
                Node::jump(at, p(0.0, 0.0), to.clone()),
                Node::point(1.0, to),
            ],
        )
        .unwrap()
    }

    #[test]
    fn self_match_of_segment() {
        let e = seg([1.0, 0.0]);
        let m = match_dp(&e, &e, &GridConfig::with_grid(9)).unwrap();
        assert!((m.s_star - 1.0).abs() < 1e-15);
        assert_eq!(m.psi1, m.psi2);
        let pairs = correspondences(&m, 3);
        assert_eq!(pairs.len(), 3);
        for (k, (a, b)) in pairs.iter().enumerate() {
            assert_eq!(a, b);
            assert!((a[0] - 0.5 * k as f64).abs() < 1e-15);
        }
        let single = correspondences(&m, 1);
        assert_eq!(single, vec![(p(0.0, 0.0), p(0.0, 0.0))]);
    }

    #[test]
    fn antiparallel_scores_zero() {
        let m = match_dp(&seg([1.0, 0.0]), &seg([-1.0, 0.0]), &GridConfig::with_grid(9)).unwrap();
        assert_eq!(m.s_star, 0.0);
        assert_eq!(m.d_shape, 2.0);
        // every pair starts or ends on a plateau; the endpoints still match up
        let pairs = correspondences(&m, 2);
        assert_eq!(pairs[0], (p(0.0, 0.0), p(0.0, 0.0)));
        assert_eq!(pairs[1], (p(1.0, 0.0), p(-1.0, 0.0)));
    }

    #[test]
    fn l_shape_against_segment() {
        let cfg = GridConfig {
            window: 8,
            ..GridConfig::with_grid(9)
        };
        let m = match_dp(&l_shape(), &seg([1.0, 0.0]), &cfg).unwrap();
        assert!((m.s_star - 1.0).abs() < 1e-15);
        assert!((m.s_realized - m.s_star).abs() < 1e-12);
        // segment is consumed by the first arm; the second arm is a plateau of ψ₂
        let corr = correspondences(&m, 101);
        assert!(corr.iter().all(|(a, b)| a[1] > 0.0 || (a[0] - b[0]).abs() < 1e-12));
    }

    #[test]
    fn grid_must_contain_nodes() {
        let l = l_shape();
        let e = seg([1.0, 0.0]);
        let bad = [0.0, 0.4, 1.0];
        assert_eq!(
            match_dp_on_grids(&l, &e, &bad, &bad, 1.0, 1.0).unwrap_err(),
            Error::GridMissingNode(0.5)
        );
    }

    #[test]
    fn moves_never_cross_nodes() {
        // a 45° zigzag against a straight segment: the chord over both pieces
        // would score 2^(1/4), but the true optimum is 1
        let zig = AcCurve::uniform(&[p(0.0, 0.0), p(0.5, 0.5), p(1.0, 0.0)]).unwrap();
        let straight = seg([2f64.sqrt(), 0.0]);
        let m = match_dp(&zig, &straight, &GridConfig::full_window(5, 5)).unwrap();
        assert!(m.s_star <= 1.0 + 1e-12, "{}", m.s_star);
        assert!((m.s_realized - m.s_star).abs() < 1e-12);
    }

    #[test]
    fn shape_examples() {
        let cfg = GridConfig::default();
        let a = step(0.3, p(1.0, 0.0));
        let b = step(0.7, p(1.0, 0.0));
        let m = refine(&a, &b, &cfg).unwrap();
        assert!(m.d_shape.abs() < 1e-6);
        assert_eq!(m.rounds.len(), 1);

        let m = refine(&a, seg([1.0, 0.0]).as_sbv(), &cfg).unwrap();
        assert!(m.d_shape.abs() < 1e-6);

        let m = refine(&a, &step(0.5, p(-1.0, 0.0)), &cfg).unwrap();
        assert_eq!(m.d_shape, 2.0);
        assert_eq!(m.s_star, 0.0);
    }

    #[test]
    fn zero_length_curves() {
        let zero = AcCurve::uniform(&[p(1.0, 1.0), p(1.0, 1.0)]).unwrap();
        let s = step(0.5, p(3.0, 4.0));
        let m = refine(zero.as_sbv(), &s, &GridConfig::default()).unwrap();
        assert_eq!(m.d_shape, 5.0);
        assert_eq!(m.s_star, 0.0);
    }

    fn arb_ac(max_pieces: usize) -> impl Strategy<Value = AcCurve> {
        (
            prop::collection::vec((-2i32..=2, -2i32..=2), 1..=max_pieces),
            prop::collection::vec(1u32..4, max_pieces),
        )
            .prop_map(|(steps, gaps)| {
                let n = steps.len();
                let total: u32 = gaps[..n].iter().sum();
                let mut acc = 0;
                let mut ts = vec![0.0];
                let mut pts = vec![p(0.0, 0.0)];
                for k in 0..n {
                    acc += gaps[k];
                    ts.push(if k + 1 == n { 1.0 } else { acc as f64 / total as f64 });
                    let last = pts.last().unwrap().clone();
                    pts.push(p(last[0] + steps[k].0 as f64 * 0.5, last[1] + steps[k].1 as f64 * 0.5));
                }
                AcCurve::polyline(&ts, &pts).unwrap()
            })
    }

    fn arb_sbv() -> impl Strategy<Value = SbvCurve> {
        (
            arb_ac(4),
            prop::collection::vec(prop::option::of((-2i32..=2, -2i32..=2)), 3),
        )
            .prop_map(|(c, jumps)| {
                let mut nodes = c.as_sbv().nodes().to_vec();
                let n = nodes.len();
                let mut shift = p(0.0, 0.0);
                for k in 1..n {
                    nodes[k].left = vec![nodes[k].left[0] + shift[0], nodes[k].left[1] + shift[1]];
                    if k + 1 < n {
                        if let Some((x, y)) = jumps[k - 1] {
                            shift = p(shift[0] + x as f64 * 0.5, shift[1] + y as f64 * 0.5);
                        }
                    }
                    nodes[k].right = vec![nodes[k].right[0] + shift[0], nodes[k].right[1] + shift[1]];
                }
                SbvCurve::new(2, nodes).unwrap()
            })
    }

    fn arb_strict() -> impl Strategy<Value = Reparam> {
        prop::collection::vec(0.2f64..1.0, 2..5).prop_map(|w| {
            let sum: f64 = w.iter().sum();
            let mut acc = 0.0;
            let mut knots = vec![(0.0, 0.0)];
            for (k, x) in w.iter().enumerate() {
                acc += x / sum;
                let xk = (k + 1) as f64 / w.len() as f64;
                knots.push(if k + 1 == w.len() { (1.0, 1.0) } else { (xk, acc) });
            }
            Reparam::new(knots).unwrap()
        })
    }

    #[test]
    fn nested_refinement_is_monotone() {
        let cfg = GridConfig {
            n1: 9,
            n2: 9,
            refine_rounds: 3,
            convergence_tol: 1e-300,
            ..Default::default()
        };
        let bent = AcCurve::uniform(&[p(0.0, 0.0), p(0.6, 0.1), p(1.0, 0.9)]).unwrap();
        let m = refine(bent.as_sbv(), l_shape().as_sbv(), &cfg).unwrap();
        let s: Vec<f64> = m.rounds.iter().map(|r| r.s_star).collect();
        assert_eq!(m.rounds.iter().map(|r| r.n1).collect::<Vec<_>>(), vec![9, 17, 33]);
        assert!(s.windows(2).all(|w| w[1] >= w[0]), "{s:?}");
    }

    #[test]
    fn identical_curves_stop_after_one_round() {
        let l = l_shape();
        let m = refine(l.as_sbv(), l.as_sbv(), &GridConfig::default()).unwrap();
        assert_eq!(m.rounds.len(), 1);
        assert!(m.d_shape.abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn dp_equals_brute_force(a in arb_ac(4), b in arb_ac(4), n in 2usize..5) {
            let ga = build_grid(n, &a.params());
            let gb = build_grid(n, &b.params());
            prop_assume!(ga.len() <= 8 && gb.len() <= 8);
            let dp = match_dp_on_grids(&a, &b, &ga, &gb, f64::INFINITY, f64::INFINITY).unwrap();
            let bf = crate::oracle::brute_force_on_grids(&a, &b, &ga, &gb).unwrap();
            prop_assert_eq!(dp.s_star, bf);
        }

        #[test]
        fn dp_value_is_realised(a in arb_ac(4), b in arb_ac(4)) {
            let m = match_dp(&a, &b, &GridConfig::with_grid(9)).unwrap();
            prop_assert!((m.s_realized - m.s_star).abs() < 1e-12);
            prop_assert!(m.psi1.knots().len() <= m.rounds[0].grid1 + m.rounds[0].grid2);
            prop_assert!((m.d_shape - (m.len1 + m.len2 - 2.0 * m.s_star)).abs() < 1e-12);
        }

        #[test]
        fn bounds_and_symmetry(a in arb_sbv(), b in arb_sbv()) {
            let cfg = GridConfig { refine_rounds: 1, ..GridConfig::with_grid(17) };
            let m = refine(&a, &b, &cfg).unwrap();
            let w = refine(&b, &a, &cfg).unwrap();
            prop_assert_eq!(m.s_star, w.s_star);
            let s_id = crate::srvt::s_functional(&m.curve1, &m.curve2).unwrap();
            prop_assert!(s_id <= m.s_star + 1e-12);
            prop_assert!(m.s_star <= (m.len1 * m.len2).sqrt() + 1e-12);
            let d_hat = crate::relax::d_hat(&a, &b).unwrap();
            prop_assert!(m.d_shape <= d_hat + 1e-9, "{} > {}", m.d_shape, d_hat);
            if !m.zero_speed_input {
                prop_assert!((m.s_realized - m.s_star).abs() < 1e-9);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn reparametrisation_invariance(a in arb_sbv(), b in arb_sbv(), eta in arb_strict()) {
            let cfg = GridConfig::default();
            let moved = crate::gtransform::bracket_representative(&a, &eta);
            let base = refine(&a, &b, &cfg).unwrap();
            let other = refine(&moved, &b, &cfg).unwrap();
            prop_assert!((base.d_shape - other.d_shape).abs() < 5e-3);
            let zero = refine(&a, &moved, &cfg).unwrap();
            prop_assert!(zero.d_shape < 5e-3, "{}", zero.d_shape);
        }
    }
}
