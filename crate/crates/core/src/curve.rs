//! Piecewise-linear curves of bounded variation on `[0, 1]`.
//!
//! A curve is stored as an ordered list of [`Node`]s. Each node carries the
//! one-sided limits `c^l(t)` and `c^r(t)`; a node is a jump node exactly when
//! the two stored values differ. Between consecutive nodes the curve is the
//! straight segment from the previous node's right value to the next node's
//! left value, so the derivative has an absolutely continuous part (segment
//! slopes) and a jump part (node jumps) and nothing else.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecmath::{add, dist, lerp, sub};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub t: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl Node {
    /// A continuity node (`left == right`).
    pub fn point(t: f64, value: Vec<f64>) -> Self {
        Node {
            t,
            left: value.clone(),
            right: value,
        }
    }

    pub fn jump(t: f64, left: Vec<f64>, right: Vec<f64>) -> Self {
        Node { t, left, right }
    }

    /// Exact comparison of the stored coordinates.
    pub fn is_jump(&self) -> bool {
        self.left != self.right
    }

    /// `[c](t) = c^r(t) - c^l(t)`.
    pub fn jump_vector(&self) -> Vec<f64> {
        sub(&self.right, &self.left)
    }
}

/// Which value to report at a parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Side {
    Left,
    Right,
    /// `(1 - θ) c^l(t) + θ c^r(t)` for `θ ∈ [0, 1]`.
    Interior(f64),
}

/// A broken structural rule, with the offending node index where there is one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    ZeroDimension,
    TooFewNodes { count: usize },
    WrongDimension { index: usize, expected: usize, found: usize },
    NonFinite { index: usize },
    ParameterOutOfRange { index: usize, t: f64 },
    NotIncreasing { index: usize },
    FirstParameterNotZero { t: f64 },
    LastParameterNotOne { t: f64 },
    FirstNodeJump,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroDimension => write!(f, "dimension must be at least 1"),
            Violation::TooFewNodes { count } => {
                write!(f, "curve needs at least 2 nodes, found {count}")
            }
            Violation::WrongDimension {
                index,
                expected,
                found,
            } => write!(
                f,
                "node {index}: value has dimension {found}, expected {expected}"
            ),
            Violation::NonFinite { index } => write!(f, "node {index}: non-finite coordinate"),
            Violation::ParameterOutOfRange { index, t } => {
                write!(f, "node {index}: parameter {t} outside [0, 1]")
            }
            Violation::NotIncreasing { index } => write!(
                f,
                "node {index}: parameter not strictly greater than previous (monotonicity)"
            ),
            Violation::FirstParameterNotZero { t } => {
                write!(f, "node 0: first parameter must be 0, found {t}")
            }
            Violation::LastParameterNotOne { t } => {
                write!(f, "last node: parameter must be 1, found {t}")
            }
            Violation::FirstNodeJump => write!(f, "node 0: first node must not be a jump"),
        }
    }
}

/// Piecewise-linear SBV curve on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SbvCurve {
    dim: usize,
    nodes: Vec<Node>,
}

impl SbvCurve {
    /// Builds a curve and checks every structural invariant.
    pub fn new(dim: usize, nodes: Vec<Node>) -> Result<Self> {
        let curve = Self::from_raw(dim, nodes);
        let violations = curve.validate();
        if violations.is_empty() {
            Ok(curve)
        } else {
            Err(Error::InvalidCurve(violations))
        }
    }

    /// Builds a curve without checking it. Use [`SbvCurve::validate`] to
    /// inspect the result.
    pub fn from_raw(dim: usize, nodes: Vec<Node>) -> Self {
        SbvCurve { dim, nodes }
    }

    /// Continuous polyline through `points` at parameters `ts`.
    pub fn polyline(ts: &[f64], points: &[Vec<f64>]) -> Result<Self> {
        if ts.len() != points.len() {
            return Err(Error::InvalidInput(format!(
                "{} parameters for {} points",
                ts.len(),
                points.len()
            )));
        }
        let dim = points.first().map_or(0, Vec::len);
        let nodes = ts
            .iter()
            .zip(points)
            .map(|(&t, p)| Node::point(t, p.clone()))
            .collect();
        Self::new(dim, nodes)
    }

    /// Every structural rule that fails, in node order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.dim == 0 {
            out.push(Violation::ZeroDimension);
        }
        if self.nodes.len() < 2 {
            out.push(Violation::TooFewNodes {
                count: self.nodes.len(),
            });
        }
        for (index, node) in self.nodes.iter().enumerate() {
            for v in [&node.left, &node.right] {
                if v.len() != self.dim {
                    out.push(Violation::WrongDimension {
                        index,
                        expected: self.dim,
                        found: v.len(),
                    });
                    break;
                }
            }
            if !node.t.is_finite()
                || node.left.iter().chain(&node.right).any(|x| !x.is_finite())
            {
                out.push(Violation::NonFinite { index });
            }
            if !(0.0..=1.0).contains(&node.t) {
                out.push(Violation::ParameterOutOfRange { index, t: node.t });
            }
            if index > 0 && node.t.partial_cmp(&self.nodes[index - 1].t) != Some(std::cmp::Ordering::Greater) {
                out.push(Violation::NotIncreasing { index });
            }
        }
        if let Some(first) = self.nodes.first() {
            if first.t != 0.0 {
                out.push(Violation::FirstParameterNotZero { t: first.t });
            }
            if first.is_jump() {
                out.push(Violation::FirstNodeJump);
            }
        }
        if self.nodes.len() >= 2 {
            let last = self.nodes.last().unwrap();
            if last.t != 1.0 {
                out.push(Violation::LastParameterNotOne { t: last.t });
            }
        }
        out
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn into_nodes(self) -> Vec<Node> {
        self.nodes
    }

    pub fn params(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.t).collect()
    }

    pub fn start(&self) -> &[f64] {
        &self.nodes[0].right
    }

    pub fn end(&self) -> &[f64] {
        &self.nodes[self.nodes.len() - 1].right
    }

    pub fn has_jumps(&self) -> bool {
        self.nodes.iter().any(Node::is_jump)
    }

    pub(crate) fn check_same_dim(&self, other: &SbvCurve) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    /// Index of the node at exactly `t`, if any.
    pub fn node_at(&self, t: f64) -> Option<usize> {
        let i = self.nodes.partition_point(|n| n.t < t);
        (i < self.nodes.len() && self.nodes[i].t == t).then_some(i)
    }

    /// Evaluates a good representative at `t`.
    pub fn eval(&self, t: f64, side: Side) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::ParameterOutOfRange(t));
        }
        let i = self.nodes.partition_point(|n| n.t < t);
        if i < self.nodes.len() && self.nodes[i].t == t {
            let n = &self.nodes[i];
            return Ok(match side {
                Side::Left => n.left.clone(),
                Side::Right => n.right.clone(),
                Side::Interior(theta) => {
                    if !(0.0..=1.0).contains(&theta) {
                        return Err(Error::ParameterOutOfRange(theta));
                    }
                    lerp(&n.left, &n.right, theta)
                }
            });
        }
        if let Side::Interior(theta) = side {
            if !(0.0..=1.0).contains(&theta) {
                return Err(Error::ParameterOutOfRange(theta));
            }
        }
        // `t` lies strictly inside a segment since the first node sits at 0.
        let a = &self.nodes[i - 1];
        let b = &self.nodes[i];
        let s = (t - a.t) / (b.t - a.t);
        Ok(lerp(&a.right, &b.left, s))
    }

    /// Total variation `|Dc|(I)`: segment lengths plus jump magnitudes.
    pub fn length(&self) -> f64 {
        let mut total = 0.0;
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                total += dist(&n.left, &self.nodes[i - 1].right);
            }
            if n.is_jump() {
                total += dist(&n.right, &n.left);
            }
        }
        total
    }

    /// Total jump magnitude `|D^s c|(I)`.
    pub fn jump_mass(&self) -> f64 {
        self.nodes
            .iter()
            .filter(|n| n.is_jump())
            .map(|n| dist(&n.right, &n.left))
            .sum()
    }

    /// Jump set with jump vectors, in increasing parameter order.
    pub fn jump_set(&self) -> Vec<(f64, Vec<f64>)> {
        self.nodes
            .iter()
            .filter(|n| n.is_jump())
            .map(|n| (n.t, n.jump_vector()))
            .collect()
    }

    /// Splits the curve into its absolutely continuous part (which keeps the
    /// starting point) and its pure-jump part (which starts at the origin).
    pub fn decompose(&self) -> (AcCurve, SbvCurve) {
        let zero = vec![0.0; self.dim];
        let mut ac_value = self.nodes[0].right.clone();
        let mut jump_value = zero;
        let mut ac_nodes = Vec::with_capacity(self.nodes.len());
        let mut jump_nodes = Vec::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                let seg = sub(&n.left, &self.nodes[i - 1].right);
                ac_value = add(&ac_value, &seg);
            }
            let jump_left = jump_value.clone();
            if n.is_jump() {
                jump_value = add(&jump_value, &n.jump_vector());
            }
            ac_nodes.push(Node::point(n.t, ac_value.clone()));
            jump_nodes.push(Node::jump(n.t, jump_left, jump_value.clone()));
        }
        (
            AcCurve(SbvCurve::from_raw(self.dim, ac_nodes)),
            SbvCurve::from_raw(self.dim, jump_nodes),
        )
    }

    /// Translates the curve so that `c^r(0) = 0`.
    pub fn normalize_bv0(&self) -> SbvCurve {
        let origin = self.nodes[0].right.clone();
        self.map_values(|v| sub(v, &origin))
    }

    pub fn translate(&self, offset: &[f64]) -> SbvCurve {
        self.map_values(|v| add(v, offset))
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: f64) -> SbvCurve {
        self.map_values(|v| v.iter().map(|x| x * factor).collect())
    }

    fn map_values(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> SbvCurve {
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node {
                t: n.t,
                left: f(&n.left),
                right: f(&n.right),
            })
            .collect();
        SbvCurve::from_raw(self.dim, nodes)
    }

    /// True if some segment of positive duration has zero length.
    pub fn has_zero_speed_segment(&self) -> bool {
        self.nodes
            .windows(2)
            .any(|w| w[1].t > w[0].t && w[1].left == w[0].right)
    }
}

/// A piecewise-linear curve without jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct AcCurve(SbvCurve);

impl AcCurve {
    pub fn new(dim: usize, nodes: Vec<Node>) -> Result<Self> {
        SbvCurve::new(dim, nodes)?.try_into()
    }

    pub fn polyline(ts: &[f64], points: &[Vec<f64>]) -> Result<Self> {
        SbvCurve::polyline(ts, points)?.try_into()
    }

    /// Polyline through `points` at equally spaced parameters.
    pub fn uniform(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::InvalidCurve(vec![Violation::TooFewNodes { count: n }]));
        }
        let ts: Vec<f64> = (0..n)
            .map(|i| if i + 1 == n { 1.0 } else { i as f64 / (n - 1) as f64 })
            .collect();
        Self::polyline(&ts, points)
    }

    /// Wraps a curve already known to be valid and jump-free.
    pub(crate) fn from_sbv_unchecked(c: SbvCurve) -> Self {
        debug_assert!(!c.has_jumps());
        AcCurve(c)
    }

    pub fn as_sbv(&self) -> &SbvCurve {
        &self.0
    }

    pub fn into_sbv(self) -> SbvCurve {
        self.0
    }

    /// Value at a node index.
    pub fn value(&self, i: usize) -> &[f64] {
        &self.0.nodes[i].right
    }

    pub fn at(&self, t: f64) -> Result<Vec<f64>> {
        self.0.eval(t, Side::Right)
    }

    /// Segment increments `c(t_{i+1}) - c(t_i)`.
    pub fn increments(&self) -> Vec<Vec<f64>> {
        self.0
            .nodes
            .windows(2)
            .map(|w| sub(&w[1].left, &w[0].right))
            .collect()
    }

    /// Arclength reparametrisation with constant speed `length(c)`.
    ///
    /// Segments no longer than `tol` are collapsed, so zero-speed intervals
    /// disappear and node parameters become cumulative arclength fractions.
    pub fn constant_speed(&self, tol: f64) -> Result<AcCurve> {
        let total = self.length();
        if total <= 0.0 {
            return Err(Error::ZeroLength);
        }
        let nodes = &self.0.nodes;
        let mut kept: Vec<(f64, &[f64])> = vec![(0.0, nodes[0].right.as_slice())];
        let mut acc = 0.0;
        for n in &nodes[1..] {
            let prev = kept.last().unwrap().1;
            let seg = dist(&n.left, prev);
            if seg > tol {
                acc += seg;
                kept.push((acc, n.left.as_slice()));
            }
        }
        if kept.len() < 2 {
            return Err(Error::ZeroLength);
        }
        let last = kept.len() - 1;
        let out = kept
            .iter()
            .enumerate()
            .map(|(i, (s, v))| {
                let t = if i == last { 1.0 } else { s / acc };
                Node::point(t, v.to_vec())
            })
            .collect();
        Ok(AcCurve(SbvCurve::from_raw(self.0.dim, out)))
    }

    /// Arclength-fraction map `σ` with `self = constant_speed(self) ∘ σ`,
    /// returned as knots `(t_i, σ(t_i))` at every node of `self`.
    pub(crate) fn arclength_fractions(&self) -> Vec<(f64, f64)> {
        let total = self.length();
        let nodes = &self.0.nodes;
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(nodes.len());
        out.push((0.0, 0.0));
        for w in nodes.windows(2) {
            acc += dist(&w[1].left, &w[0].right);
            out.push((w[1].t, if total > 0.0 { acc / total } else { 0.0 }));
        }
        if total > 0.0 {
            out.last_mut().unwrap().1 = 1.0;
        }
        out
    }
}

impl Deref for AcCurve {
    type Target = SbvCurve;

    fn deref(&self) -> &SbvCurve {
        &self.0
    }
}

impl TryFrom<SbvCurve> for AcCurve {
    type Error = Error;

    fn try_from(c: SbvCurve) -> Result<Self> {
        let violations = c.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidCurve(violations));
        }
        if c.has_jumps() {
            return Err(Error::NotAbsolutelyContinuous);
        }
        Ok(AcCurve(c))
    }
}

impl From<AcCurve> for SbvCurve {
    fn from(c: AcCurve) -> SbvCurve {
        c.0
    }
}
