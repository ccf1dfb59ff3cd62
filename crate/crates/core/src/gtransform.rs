//! Generalised reparametrisations and the jump-opening transform.
//!
//! A [`Reparam`] is a piecewise-linear, non-decreasing surjection of `[0, 1]`.
//! Composing a curve with jumps with a reparametrisation that is constant on an
//! interval where the curve jumps does not give a well-defined function; the
//! bracket `[c, φ]` collects every length-preserving way to traverse the jump
//! segment on that interval, and [`bracket_representative`] returns the one
//! that crosses it at constant speed.
//!
//! [`g_transform`] opens every jump of a curve into a linear ramp, using the
//! time-stretch `ξ` and its left inverse `ζ`.

use crate::curve::{AcCurve, Node, SbvCurve, Side};
use crate::error::{Error, Result};
use crate::vecmath::{dist, dist_to_segment, lerp};

/// Piecewise-linear non-decreasing map `[0, 1] → [0, 1]` fixing the endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Reparam {
    knots: Vec<(f64, f64)>,
}

impl Reparam {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidReparam(m.to_string()));
        if knots.len() < 2 {
            return bad("needs at least two knots");
        }
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return bad("non-finite knot");
        }
        if knots[0] != (0.0, 0.0) || *knots.last().unwrap() != (1.0, 1.0) {
            return bad("must map 0 to 0 and 1 to 1");
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return bad("knot abscissae must increase strictly");
            }
            if w[1].1 < w[0].1 {
                return bad("values must be non-decreasing");
            }
        }
        Ok(Reparam { knots })
    }

    pub fn identity() -> Self {
        Reparam {
            knots: vec![(0.0, 0.0), (1.0, 1.0)],
        }
    }

    /// Interpolates `values` at equally spaced abscissae.
    pub fn from_uniform_values(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::InvalidReparam("needs at least two knots".into()));
        }
        let knots = values
            .iter()
            .enumerate()
            .map(|(i, &y)| {
                let x = if i + 1 == n { 1.0 } else { i as f64 / (n - 1) as f64 };
                (x, y)
            })
            .collect();
        Self::new(knots)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Member of the strictly increasing class.
    pub fn is_strict(&self) -> bool {
        self.knots.windows(2).all(|w| w[1].1 > w[0].1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let i = k.partition_point(|p| p.0 < x);
        if k[i].0 == x {
            return k[i].1;
        }
        let (x0, y0) = k[i - 1];
        let (x1, y1) = k[i];
        if y0 == y1 {
            return y0;
        }
        y0 + (x - x0) / (x1 - x0) * (y1 - y0)
    }

    pub fn max_slope(&self) -> f64 {
        self.knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .fold(0.0, f64::max)
    }

    /// Knots plus, for every target value lying strictly inside the range of
    /// an increasing segment, the abscissa mapped to it. Inserted points carry
    /// the target value verbatim so exact comparisons against it still work.
    pub(crate) fn sample_points(&self, targets: &[f64]) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.knots.len() + targets.len());
        out.push(self.knots[0]);
        let mut ti = 0;
        for w in self.knots.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            while ti < targets.len() && targets[ti] <= y0 {
                ti += 1;
            }
            if y1 > y0 {
                while ti < targets.len() && targets[ti] < y1 {
                    let tau = targets[ti];
                    let x = x0 + (tau - y0) / (y1 - y0) * (x1 - x0);
                    if x > out.last().unwrap().0 && x < x1 {
                        out.push((x, tau));
                    }
                    ti += 1;
                }
            }
            out.push((x1, y1));
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Reparam) -> Reparam {
        let targets: Vec<f64> = self.knots.iter().map(|k| k.0).collect();
        let mut prev = 0.0_f64;
        let knots = inner
            .sample_points(&dedup(&targets))
            .into_iter()
            .map(|(x, y)| {
                // PL evaluation can wobble by an ulp; keep the knots monotone
                let v = self.eval(y).clamp(prev, 1.0);
                prev = v;
                (x, v)
            })
            .collect::<Vec<_>>();
        let mut knots = knots;
        *knots.last_mut().unwrap() = (1.0, 1.0);
        Reparam { knots }
    }
}

fn dedup(sorted: &[f64]) -> Vec<f64> {
    let mut v = sorted.to_vec();
    v.dedup();
    v
}

/// The canonical element of `[c, φ]`: `c ∘ φ` wherever that is defined, and a
/// constant-speed traversal of `[c^l(x₀), c^r(x₀)]` on each maximal interval
/// where `φ ≡ x₀` at a jump of `c`.
pub fn bracket_representative(c: &SbvCurve, phi: &Reparam) -> SbvCurve {
    let pts = phi.sample_points(&c.params());
    let n = pts.len();
    // maximal plateau run containing each point: (start index, end index)
    let mut run_of = vec![(0usize, 0usize); n];
    let mut start = 0;
    for k in 1..=n {
        if k == n || pts[k].1 != pts[start].1 {
            for r in run_of.iter_mut().take(k).skip(start) {
                *r = (start, k - 1);
            }
            start = k;
        }
    }
    let eval = |tau: f64, side: Side| c.eval(tau, side).expect("reparam values lie in [0, 1]");
    let on_plateau = |k: usize| -> Vec<f64> {
        let (a, b) = run_of[k];
        let tau = pts[k].1;
        let l = eval(tau, Side::Left);
        let r = eval(tau, Side::Right);
        if k == b {
            r
        } else if k == a {
            l
        } else {
            let s = (pts[k].0 - pts[a].0) / (pts[b].0 - pts[a].0);
            lerp(&l, &r, s)
        }
    };
    let nodes = (0..n)
        .map(|k| {
            let (a, b) = run_of[k];
            let tau = pts[k].1;
            let left = if k > a { on_plateau(k) } else { eval(tau, Side::Left) };
            let right = if k < b { on_plateau(k) } else { eval(tau, Side::Right) };
            Node {
                t: pts[k].0,
                left,
                right,
            }
        })
        .collect();
    SbvCurve::from_raw(c.dimension(), nodes)
}

/// `c ∘ φ` for a continuous curve.
pub fn compose_ac(c: &AcCurve, phi: &Reparam) -> AcCurve {
    AcCurve::from_sbv_unchecked(bracket_representative(c.as_sbv(), phi))
}

/// Result of opening the jumps of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpEmbedding {
    /// Strictly increasing time-stretch `ξ`, a one-dimensional SBV function
    /// that jumps exactly where the curve does.
    pub xi: SbvCurve,
    /// Non-decreasing left inverse of `ξ`.
    pub zeta: Reparam,
    /// `|D^s c|(I) / (2 len(c))`, in `[0, 1/2]`.
    pub alpha: f64,
    /// `G(c)`.
    pub g: AcCurve,
}

/// `ξ(x) = |D^s c|(0, x) / (2 len(c)) + (1 - α) x` and `α`.
pub fn xi(c: &SbvCurve) -> Result<(SbvCurve, f64)> {
    let len = c.length();
    if len <= 0.0 {
        return Err(Error::ZeroLength);
    }
    let alpha = c.jump_mass() / (2.0 * len);
    let nodes = c.nodes();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(nodes.len());
    for (i, n) in nodes.iter().enumerate() {
        let base = (1.0 - alpha) * n.t;
        let left = acc / (2.0 * len) + base;
        if n.is_jump() {
            acc += dist(&n.right, &n.left);
        }
        let mut right = acc / (2.0 * len) + base;
        let mut left = left;
        if i + 1 == nodes.len() {
            right = 1.0;
            if !n.is_jump() {
                left = 1.0;
            }
        }
        out.push(Node::jump(n.t, vec![left], vec![right]));
    }
    Ok((SbvCurve::from_raw(1, out), alpha))
}

fn zeta_from_xi(xi: &SbvCurve) -> Reparam {
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(2 * xi.nodes().len());
    for n in xi.nodes() {
        for x in [n.left[0], n.right[0]] {
            if knots.last().map_or(true, |k| x > k.0) {
                knots.push((x, n.t));
            }
        }
    }
    Reparam { knots }
}

/// `ζ`, the non-decreasing left inverse of `ξ`.
pub fn zeta(c: &SbvCurve) -> Result<Reparam> {
    let (x, _) = xi(c)?;
    Ok(zeta_from_xi(&x))
}

pub fn jump_embedding(c: &SbvCurve) -> Result<JumpEmbedding> {
    let (xi, alpha) = xi(c)?;
    let zeta = zeta_from_xi(&xi);
    let g = bracket_representative(c, &zeta);
    let g = AcCurve::try_from(g)
        .map_err(|e| Error::Internal(format!("G(c) is not a continuous curve: {e}")))?;
    Ok(JumpEmbedding {
        xi,
        zeta,
        alpha,
        g,
    })
}

/// `G(c)`: the curve with every jump replaced by a linear ramp.
pub fn g_transform(c: &SbvCurve) -> Result<AcCurve> {
    Ok(jump_embedding(c)?.g)
}

/// Checks `g ∈ [c, φ]` up to `tol`: equal lengths, and both one-sided values
/// of `g` on the segment `[c^l(φ(x)), c^r(φ(x))]` at every node of `g`, every
/// knot of `φ` and 1001 equally spaced parameters.
pub fn is_in_bracket(g: &SbvCurve, c: &SbvCurve, phi: &Reparam, tol: f64) -> bool {
    if g.dimension() != c.dimension() {
        return false;
    }
    if (g.length() - c.length()).abs() > tol {
        return false;
    }
    let mut xs: Vec<f64> = g.params();
    xs.extend(phi.knots().iter().map(|k| k.0));
    xs.extend((0..=1000).map(|i| i as f64 / 1000.0));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let c_nodes = c.nodes();
    for x in xs {
        let tau = phi.eval(x);
        let Ok(l) = c.eval(tau, Side::Left) else {
            return false;
        };
        let Ok(r) = c.eval(tau, Side::Right) else {
            return false;
        };
        // nodes whose parameter was reached only up to rounding
        let lo = c_nodes.partition_point(|n| n.t < tau - 1e-12);
        let near: Vec<&Node> = c_nodes[lo..]
            .iter()
            .take_while(|n| n.t <= tau + 1e-12)
            .collect();
        for side in [Side::Left, Side::Right] {
            let p = g.eval(x, side).expect("x in [0, 1]");
            let ok = dist_to_segment(&p, &l, &r) <= tol
                || near
                    .iter()
                    .any(|n| dist_to_segment(&p, &n.left, &n.right) <= tol);
            if !ok {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Vec<f64> {
        vec![x, y]
    }

    fn step(at: f64, to: Vec<f64>) -> SbvCurve {
        SbvCurve::new(
            to.len(),
            vec![
                Node::point(0.0, vec![0.0; to.len()]),
                Node::jump(at, vec![0.0; to.len()], to.clone()),
                Node::point(1.0, to),
            ],
        )
        .unwrap()
    }

    fn ramp_plus_step() -> SbvCurve {
        SbvCurve::new(
            2,
            vec![
                Node::point(0.0, p(0.0, 0.0)),
                Node::jump(0.5, p(0.5, 0.0), p(0.5, 1.0)),
                Node::point(1.0, p(1.0, 1.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn reparam_validation() {
        assert!(Reparam::new(vec![(0.0, 0.0), (0.5, 0.6), (1.0, 1.0)]).is_ok());
        assert!(Reparam::new(vec![(0.0, 0.0), (0.5, 0.6), (0.5, 0.7), (1.0, 1.0)]).is_err());
        assert!(Reparam::new(vec![(0.0, 0.0), (0.5, 0.6), (0.7, 0.5), (1.0, 1.0)]).is_err());
        assert!(Reparam::new(vec![(0.0, 0.1), (1.0, 1.0)]).is_err());
        let plateau = Reparam::new(vec![(0.0, 0.0), (0.25, 0.5), (0.75, 0.5), (1.0, 1.0)]).unwrap();
        assert!(!plateau.is_strict());
        assert!(Reparam::identity().is_strict());
        assert_eq!(plateau.eval(0.6), 0.5);
    }

    #[test]
    fn compose_reparams() {
        let a = Reparam::new(vec![(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)]).unwrap();
        let b = Reparam::new(vec![(0.0, 0.0), (0.5, 0.75), (1.0, 1.0)]).unwrap();
        let ab = a.compose(&b);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert!((ab.eval(x) - a.eval(b.eval(x))).abs() < 1e-15);
            assert!(ab.knots().len() <= 4);
        }
        assert_eq!(a.compose(&Reparam::identity()), a);
    }

    #[test]
    fn compose_ac_examples() {
        let l = AcCurve::uniform(&[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)]).unwrap();
        assert_eq!(compose_ac(&l, &Reparam::identity()), l);

        let plateau = Reparam::new(vec![(0.0, 0.0), (0.25, 0.3), (0.75, 0.3), (1.0, 1.0)]).unwrap();
        let g = compose_ac(&l, &plateau);
        let c03 = l.at(0.3).unwrap();
        for i in 25..=75 {
            assert_eq!(g.at(i as f64 / 100.0).unwrap(), c03);
        }

        let unit = AcCurve::uniform(&[p(0.0, 0.0), p(1.0, 0.0)]).unwrap();
        let squares: Vec<f64> = (0..64).map(|i| (i as f64 / 63.0).powi(2)).collect();
        let sq = Reparam::from_uniform_values(&squares).unwrap();
        let g = compose_ac(&unit, &sq);
        assert!((g.length() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn xi_examples() {
        let unit = AcCurve::uniform(&[p(0.0, 0.0), p(1.0, 0.0)]).unwrap();
        let (x, alpha) = xi(&unit).unwrap();
        assert_eq!(alpha, 0.0);
        assert_eq!(x.eval(0.3, Side::Right).unwrap(), vec![0.3]);

        let s = step(0.5, p(1.0, 0.0));
        let (x, alpha) = xi(&s).unwrap();
        assert_eq!(alpha, 0.5);
        assert_eq!(x.eval(0.25, Side::Right).unwrap(), vec![0.125]);
        assert_eq!(x.eval(0.5, Side::Left).unwrap(), vec![0.25]);
        assert_eq!(x.eval(0.5, Side::Right).unwrap(), vec![0.75]);
        assert_eq!(x.eval(0.75, Side::Right).unwrap(), vec![0.875]);

        let (x, alpha) = xi(&ramp_plus_step()).unwrap();
        assert_eq!(alpha, 0.25);
        let jumps = x.jump_set();
        assert_eq!(jumps.len(), 1);
        assert_eq!(jumps[0].0, 0.5);
        assert!((jumps[0].1[0] - 0.25).abs() < 1e-15);

        let zero = AcCurve::uniform(&[p(1.0, 1.0), p(1.0, 1.0)]).unwrap();
        assert_eq!(xi(&zero).unwrap_err(), Error::ZeroLength);
    }

    #[test]
    fn zeta_examples() {
        let unit = AcCurve::uniform(&[p(0.0, 0.0), p(1.0, 0.0)]).unwrap();
        assert_eq!(zeta(&unit).unwrap(), Reparam::identity());

        let z = zeta(&step(0.5, p(1.0, 0.0))).unwrap();
        assert_eq!(
            z.knots(),
            &[(0.0, 0.0), (0.25, 0.5), (0.75, 0.5), (1.0, 1.0)]
        );
        assert_eq!(z.eval(0.125), 0.25);
        assert_eq!(z.eval(0.5), 0.5);
        assert_eq!(z.eval(0.875), 0.75);
        assert!(z.max_slope() <= 2.0);
    }

    #[test]
    fn g_transform_examples() {
        let s = step(0.5, p(1.0, 0.0));
        let g = g_transform(&s).unwrap();
        assert_eq!(g.params(), vec![0.0, 0.25, 0.75, 1.0]);
        assert_eq!(g.value(0), &[0.0, 0.0]);
        assert_eq!(g.value(1), &[0.0, 0.0]);
        assert_eq!(g.value(2), &[1.0, 0.0]);
        assert_eq!(g.value(3), &[1.0, 0.0]);
        assert_eq!(g.at(0.5).unwrap(), p(0.5, 0.0));
        assert_eq!(g.length(), 1.0);

        let unit = AcCurve::uniform(&[p(0.0, 0.0), p(1.0, 0.0), p(2.0, 1.0)]).unwrap();
        assert_eq!(g_transform(&unit).unwrap(), unit);

        let c = ramp_plus_step();
        let e = jump_embedding(&c).unwrap();
        assert_eq!(e.g.length(), 2.0);
        // the plateau of ζ spans exactly [ξ^l(1/2), ξ^r(1/2)] = [3/8, 5/8]
        assert_eq!(e.zeta.knots()[1], (0.375, 0.5));
        assert_eq!(e.zeta.knots()[2], (0.625, 0.5));
        assert_eq!(e.g.at(0.375).unwrap(), p(0.5, 0.0));
        assert_eq!(e.g.at(0.625).unwrap(), p(0.5, 1.0));
        assert!(is_in_bracket(e.g.as_sbv(), &c, &e.zeta, 1e-12));
    }

    #[test]
    fn bracket_representative_examples() {
        let s = step(0.5, p(1.0, 0.0));
        // injective φ keeps the jump
        let phi = Reparam::new(vec![(0.0, 0.0), (0.6, 0.5), (1.0, 1.0)]).unwrap();
        let g = bracket_representative(&s, &phi);
        assert_eq!(g.jump_set(), vec![(0.6, p(1.0, 0.0))]);
        assert!(is_in_bracket(&g, &s, &phi, 1e-12));

        let plateau = Reparam::new(vec![(0.0, 0.0), (0.25, 0.5), (0.75, 0.5), (1.0, 1.0)]).unwrap();
        let g = bracket_representative(&s, &plateau);
        assert_eq!(&g, g_transform(&s).unwrap().as_sbv());
        assert!(is_in_bracket(&g, &s, &plateau, 1e-12));

        // skipping the jump loses length
        let skipped = AcCurve::uniform(&[p(0.0, 0.0), p(0.0, 0.0)]).unwrap();
        assert!(!is_in_bracket(skipped.as_sbv(), &s, &plateau, 1e-9));

        let unit = AcCurve::uniform(&[p(0.0, 0.0), p(1.0, 0.0)]).unwrap();
        let g = bracket_representative(unit.as_sbv(), &plateau);
        assert_eq!(g, compose_ac(&unit, &plateau).into_sbv());
    }
}
