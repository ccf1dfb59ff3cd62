//! The square-root-velocity transform for absolutely continuous
//! piecewise-linear curves, and the similarity and distances built on it.
//!
//! All integrals are evaluated exactly on the common refinement of the node
//! grids; the transform of a piecewise-linear curve is a step function.

use crate::curve::{AcCurve, Node, SbvCurve};
use crate::error::{Error, Result};
use crate::vecmath::{add, dot, merge_sorted, norm, scale, sub};

/// Piecewise-constant `L²` function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.len() < 2
            || breakpoints[0] != 0.0
            || *breakpoints.last().unwrap() != 1.0
            || breakpoints.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(Error::InvalidInput(
                "step function breakpoints must increase strictly from 0 to 1".into(),
            ));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidInput(
                "step function needs one value per interval".into(),
            ));
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidInput("inconsistent value dimension".into()));
        }
        Ok(StepFunction { breakpoints, values })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.values[0].len()
    }

    pub fn norm_squared(&self) -> f64 {
        self.values
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(v, w)| dot(v, v) * (w[1] - w[0]))
            .sum()
    }

    /// `L²` inner product, computed on the merged breakpoints.
    pub fn inner(&self, other: &StepFunction) -> Result<f64> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch {
                left: self.dimension(),
                right: other.dimension(),
            });
        }
        let grid = merge_sorted(&self.breakpoints, &other.breakpoints);
        let (mut i, mut j) = (0, 0);
        let mut total = 0.0;
        for w in grid.windows(2) {
            while self.breakpoints[i + 1] <= w[0] {
                i += 1;
            }
            while other.breakpoints[j + 1] <= w[0] {
                j += 1;
            }
            total += dot(&self.values[i], &other.values[j]) * (w[1] - w[0]);
        }
        Ok(total)
    }
}

/// `R(c) = ċ / √|ċ|`, zero where `ċ = 0`.
pub fn srvt(c: &AcCurve) -> StepFunction {
    let nodes = c.nodes();
    let values = nodes
        .windows(2)
        .map(|w| {
            let slope = scale(&sub(&w[1].left, &w[0].right), 1.0 / (w[1].t - w[0].t));
            let speed = norm(&slope);
            if speed == 0.0 {
                vec![0.0; slope.len()]
            } else {
                scale(&slope, 1.0 / speed.sqrt())
            }
        })
        .collect();
    StepFunction {
        breakpoints: c.params(),
        values,
    }
}

/// `R⁻¹(q)(x) = ∫₀ˣ q|q| dy`, a polyline starting at the origin.
pub fn srvt_inverse(q: &StepFunction) -> AcCurve {
    let dim = q.dimension();
    let mut value = vec![0.0; dim];
    let mut nodes = Vec::with_capacity(q.breakpoints.len());
    nodes.push(Node::point(0.0, value.clone()));
    for (v, w) in q.values.iter().zip(q.breakpoints.windows(2)) {
        let slope = scale(v, norm(v));
        value = add(&value, &scale(&slope, w[1] - w[0]));
        nodes.push(Node::point(w[1], value.clone()));
    }
    AcCurve::from_sbv_unchecked(SbvCurve::from_raw(dim, nodes))
}

/// `S(c₁, c₂) = ⟨R(c₁), R(c₂)⟩_{L²}` (signed).
pub fn s_functional(c1: &AcCurve, c2: &AcCurve) -> Result<f64> {
    c1.check_same_dim(c2)?;
    srvt(c1).inner(&srvt(c2))
}

fn clamp_radicand(r: f64, scale: f64) -> Result<f64> {
    if r >= 0.0 {
        Ok(r)
    } else if r >= -1e-12 * (1.0 + scale) {
        Ok(0.0)
    } else {
        Err(Error::Internal(format!("negative squared distance {r}")))
    }
}

/// Squared SRV distance `len(c₁) + len(c₂) - 2 S(c₁, c₂)`.
pub fn distance_squared(c1: &AcCurve, c2: &AcCurve) -> Result<f64> {
    let s = s_functional(c1, c2)?;
    Ok(c1.length() + c2.length() - 2.0 * s)
}

/// SRV distance `d(c₁, c₂)`.
pub fn distance(c1: &AcCurve, c2: &AcCurve) -> Result<f64> {
    let l = c1.length() + c2.length();
    let r = distance_squared(c1, c2)?;
    Ok(clamp_radicand(r, l)?.sqrt())
}

/// Spherical distance between the length-normalised transforms,
/// `arccos S(c₁/len(c₁), c₂/len(c₂))`.
pub fn scale_invariant_distance(c1: &AcCurve, c2: &AcCurve) -> Result<f64> {
    let (l1, l2) = (c1.length(), c2.length());
    if l1 <= 0.0 || l2 <= 0.0 {
        return Err(Error::ZeroLength);
    }
    let c1n = AcCurve::from_sbv_unchecked(c1.scaled(1.0 / l1));
    let c2n = AcCurve::from_sbv_unchecked(c2.scaled(1.0 / l2));
    let cos = s_functional(&c1n, &c2n)?;
    clamped_arccos(cos)
}

pub(crate) fn clamped_arccos(cos: f64) -> Result<f64> {
    if !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&cos) {
        return Err(Error::Internal(format!("cosine {cos} outside [-1, 1]")));
    }
    Ok(cos.clamp(-1.0, 1.0).acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn seg(to: [f64; 2]) -> AcCurve {
        AcCurve::uniform(&[vec![0.0, 0.0], to.to_vec()]).unwrap()
    }

    #[test]
    fn transform_examples() {
        assert_eq!(srvt(&seg([1.0, 0.0])).values(), &[vec![1.0, 0.0]]);
        let q = srvt(&seg([2.0, 0.0]));
        assert!((q.values()[0][0] - SQRT_2).abs() < 1e-15 && q.values()[0][1] == 0.0);
        let constant = AcCurve::uniform(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(srvt(&constant).values(), &[vec![0.0, 0.0]]);
    }

    #[test]
    fn inverse_examples() {
        let q = StepFunction::new(vec![0.0, 1.0], vec![vec![1.0, 0.0]]).unwrap();
        assert_eq!(srvt_inverse(&q), seg([1.0, 0.0]));
        let q = StepFunction::new(vec![0.0, 1.0], vec![vec![SQRT_2, 0.0]]).unwrap();
        let c = srvt_inverse(&q);
        assert!((c.end()[0] - 2.0).abs() < 1e-15);
        let q = StepFunction::new(vec![0.0, 1.0], vec![vec![0.0, 0.0]]).unwrap();
        assert_eq!(srvt_inverse(&q).length(), 0.0);
    }

    #[test]
    fn s_examples() {
        let e1 = seg([1.0, 0.0]);
        assert_eq!(s_functional(&e1, &e1).unwrap(), 1.0);
        assert_eq!(s_functional(&e1, &seg([0.0, 1.0])).unwrap(), 0.0);
        assert!((s_functional(&e1, &seg([2.0, 0.0])).unwrap() - SQRT_2).abs() < 1e-15);
        assert_eq!(s_functional(&e1, &seg([-1.0, 0.0])).unwrap(), -1.0);
        let one_d = AcCurve::uniform(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(
            s_functional(&e1, &one_d),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distance_examples() {
        let e1 = seg([1.0, 0.0]);
        assert_eq!(distance(&e1, &e1).unwrap(), 0.0);
        assert!((distance(&e1, &seg([2.0, 0.0])).unwrap() - (SQRT_2 - 1.0)).abs() < 1e-12);
        assert!((distance(&e1, &seg([0.0, 1.0])).unwrap() - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn scale_invariant_examples() {
        let e1 = seg([1.0, 0.0]);
        let l = AcCurve::uniform(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 3.0]]).unwrap();
        assert_eq!(scale_invariant_distance(&l, &l).unwrap(), 0.0);
        assert!((scale_invariant_distance(&e1, &seg([0.0, 1.0])).unwrap() - FRAC_PI_2).abs() < 1e-12);
        let l5 = AcCurve::try_from(l.scaled(5.0)).unwrap();
        assert!(scale_invariant_distance(&l, &l5).unwrap() < 1e-7);
        let zero = AcCurve::uniform(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(scale_invariant_distance(&e1, &zero), Err(Error::ZeroLength));
    }
}
