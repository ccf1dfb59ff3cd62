//! The relaxed similarity `Ŝ` and distance `d̂` for curves with jumps.
//!
//! For piecewise-linear SBV curves
//!
//! ```text
//! Ŝ(c₁, c₂) = ∫ ⟨ċ₁/|ċ₁|, ċ₂/|ċ₂|⟩⁺ √(|ċ₁||ċ₂|) dx
//!           + Σ_{x ∈ Σ(c₁) ∩ Σ(c₂)} ⟨[c₁]/|[c₁]|, [c₂]/|[c₂]|⟩⁺ √(|[c₁]||[c₂]|)
//! ```
//!
//! This module evaluates the formula directly from curve increments; the
//! measure-level route lives in [`crate::measure::s_hat_measure`].

use crate::curve::{SbvCurve, Side};
use crate::error::Result;
use crate::gtransform::{bracket_representative, Reparam};
use crate::vecmath::{merge_sorted, positive_pairing, sub};

pub fn s_hat(c1: &SbvCurve, c2: &SbvCurve) -> Result<f64> {
    c1.check_same_dim(c2)?;
    let grid = merge_sorted(&c1.params(), &c2.params());
    let mut total = 0.0;
    for w in grid.windows(2) {
        let d1 = sub(&c1.eval(w[1], Side::Left)?, &c1.eval(w[0], Side::Right)?);
        let d2 = sub(&c2.eval(w[1], Side::Left)?, &c2.eval(w[0], Side::Right)?);
        total += positive_pairing(&d1, &d2);
    }
    let j1 = c1.jump_set();
    let j2 = c2.jump_set();
    let mut k = 0;
    for (t, v1) in &j1 {
        while k < j2.len() && j2[k].0 < *t {
            k += 1;
        }
        if k < j2.len() && j2[k].0 == *t {
            total += positive_pairing(v1, &j2[k].1);
        }
    }
    Ok(total)
}

/// `d̂(c₁, c₂) = len(c₁) + len(c₂) - 2 Ŝ(c₁, c₂)` (not square-rooted).
pub fn d_hat(c1: &SbvCurve, c2: &SbvCurve) -> Result<f64> {
    Ok(c1.length() + c2.length() - 2.0 * s_hat(c1, c2)?)
}

/// `√d̂`, with round-off below zero clamped away.
pub fn d_hat_rooted(c1: &SbvCurve, c2: &SbvCurve) -> Result<f64> {
    Ok(d_hat(c1, c2)?.max(0.0).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketDistance {
    pub value: f64,
    pub g1: SbvCurve,
    pub g2: SbvCurve,
}

/// `d̂([c₁, φ₁], [c₂, φ₂])` evaluated on the constant-speed bracket
/// representatives.
pub fn d_hat_bracket(
    c1: &SbvCurve,
    phi1: &Reparam,
    c2: &SbvCurve,
    phi2: &Reparam,
) -> Result<BracketDistance> {
    c1.check_same_dim(c2)?;
    let g1 = bracket_representative(c1, phi1);
    let g2 = bracket_representative(c2, phi2);
    let value = c1.length() + c2.length() - 2.0 * s_hat(&g1, &g2)?;
    Ok(BracketDistance { value, g1, g2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{AcCurve, Node};
    use crate::error::Error;
    use crate::measure::{s_hat_measure, PiecewiseMeasure};

    fn p(x: f64, y: f64) -> Vec<f64> {
        vec![x, y]
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

    fn seg(to: [f64; 2]) -> SbvCurve {
        AcCurve::uniform(&[p(0.0, 0.0), to.to_vec()]).unwrap().into_sbv()
    }

    #[test]
    fn s_hat_examples() {
        let s = step(0.5, p(1.0, 0.0));
        assert_eq!(s_hat(&s, &s).unwrap(), 1.0);
        assert_eq!(s_hat(&s, &step(0.25, p(1.0, 0.0))).unwrap(), 0.0);
        assert_eq!(s_hat(&seg([1.0, 0.0]), &s).unwrap(), 0.0);
        assert_eq!(s_hat(&seg([1.0, 0.0]), &seg([-1.0, 0.0])).unwrap(), 0.0);
        let one_d = AcCurve::uniform(&[vec![0.0], vec![1.0]]).unwrap().into_sbv();
        assert!(matches!(s_hat(&s, &one_d), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn d_hat_examples() {
        let s = step(0.5, p(1.0, 0.0));
        assert_eq!(d_hat(&s, &s).unwrap(), 0.0);
        assert_eq!(d_hat(&s, &step(0.5, p(-1.0, 0.0))).unwrap(), 2.0);
        assert_eq!(d_hat(&seg([1.0, 0.0]), &s).unwrap(), 2.0);
        assert_eq!(d_hat_rooted(&seg([1.0, 0.0]), &s).unwrap(), 2f64.sqrt());
    }

    #[test]
    fn agrees_with_measure_route() {
        let c1 = SbvCurve::new(
            2,
            vec![
                Node::point(0.0, p(0.0, 0.0)),
                Node::jump(0.3, p(0.6, 0.2), p(0.1, 1.0)),
                Node::point(0.7, p(-0.3, 1.4)),
                Node::point(1.0, p(0.5, 0.5)),
            ],
        )
        .unwrap();
        let c2 = SbvCurve::new(
            2,
            vec![
                Node::point(0.0, p(1.0, 0.0)),
                Node::jump(0.3, p(1.2, 0.4), p(0.9, 0.9)),
                Node::point(1.0, p(2.0, 1.0)),
            ],
        )
        .unwrap();
        let direct = s_hat(&c1, &c2).unwrap();
        let via_measure = s_hat_measure(
            &PiecewiseMeasure::derivative(&c1),
            &PiecewiseMeasure::derivative(&c2),
        )
        .unwrap();
        assert!((direct - via_measure).abs() < 1e-12);
    }

    #[test]
    fn bracket_examples() {
        let c1 = step(0.5, p(1.0, 0.0));
        let c2 = seg([0.0, 1.0]);
        let id = Reparam::identity();
        let b = d_hat_bracket(&c1, &id, &c2, &id).unwrap();
        assert_eq!(b.value, d_hat(&c1, &c2).unwrap());

        // continuous curves: the bracket is the plain composition
        let l = AcCurve::uniform(&[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)]).unwrap();
        let phi = Reparam::new(vec![(0.0, 0.0), (0.3, 0.5), (0.6, 0.5), (1.0, 1.0)]).unwrap();
        let b = d_hat_bracket(l.as_sbv(), &phi, &c2, &id).unwrap();
        let composed = crate::gtransform::compose_ac(&l, &phi);
        assert_eq!(b.value, d_hat(composed.as_sbv(), &c2).unwrap());

        // both jumps spread over the same interval give the same ramp
        let spread = Reparam::new(vec![(0.0, 0.0), (0.25, 0.5), (0.75, 0.5), (1.0, 1.0)]).unwrap();
        let b = d_hat_bracket(&c1, &spread, &c1, &spread).unwrap();
        assert_eq!(b.g1, b.g2);
        assert!(b.value.abs() < 1e-15);
        assert!((s_hat(&b.g1, &b.g2).unwrap() - 1.0).abs() < 1e-15);
    }
}
