//! Derivative measures of piecewise-linear SBV curves.
//!
//! A [`PiecewiseMeasure`] is a vector measure on `[0, 1]` made of a
//! piecewise-constant density with respect to Lebesgue measure plus finitely
//! many atoms. On a common refinement of two such measures every
//! Radon–Nikodym quotient appearing in the relaxed similarity is constant on
//! each interval, so the relaxed functional can be evaluated in closed form.

use crate::curve::SbvCurve;
use crate::error::{Error, Result};
use crate::vecmath::{dot, merge_sorted, norm, scale, sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseMeasure {
    dim: usize,
    breakpoints: Vec<f64>,
    densities: Vec<Vec<f64>>,
    atoms: Vec<Atom>,
}

/// Two measures expressed on the union of their breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub breakpoints: Vec<f64>,
    /// `(density of m1, density of m2)` on each refined interval.
    pub densities: Vec<(Vec<f64>, Vec<f64>)>,
    /// `(location, weight in m1 or 0, weight in m2 or 0)`, sorted by location.
    pub atoms: Vec<(f64, Vec<f64>, Vec<f64>)>,
}

impl PiecewiseMeasure {
    pub fn new(
        dim: usize,
        breakpoints: Vec<f64>,
        densities: Vec<Vec<f64>>,
        mut atoms: Vec<Atom>,
    ) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidInput(format!("measure: {msg}")));
        if dim == 0 {
            return bad("dimension must be positive");
        }
        if breakpoints.len() < 2
            || breakpoints[0] != 0.0
            || *breakpoints.last().unwrap() != 1.0
            || breakpoints.windows(2).any(|w| !(w[1] > w[0]))
        {
            return bad("breakpoints must increase strictly from 0 to 1");
        }
        if densities.len() + 1 != breakpoints.len() {
            return bad("one density per breakpoint interval");
        }
        if densities.iter().any(|d| d.len() != dim) {
            return bad("density dimension");
        }
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        for a in &atoms {
            if a.weight.len() != dim {
                return bad("atom dimension");
            }
            if !(0.0..=1.0).contains(&a.location) {
                return bad("atom outside [0, 1]");
            }
            if a.weight.iter().all(|&x| x == 0.0) {
                return bad("zero atom weight");
            }
        }
        if atoms.windows(2).any(|w| w[0].location == w[1].location) {
            return bad("atom locations must be distinct");
        }
        Ok(PiecewiseMeasure {
            dim,
            breakpoints,
            densities,
            atoms,
        })
    }

    /// `Dc = ċ L¹ + Σ [c](x) δ_x` for a piecewise-linear curve.
    pub fn derivative(curve: &SbvCurve) -> PiecewiseMeasure {
        let nodes = curve.nodes();
        let breakpoints = curve.params();
        let densities = nodes
            .windows(2)
            .map(|w| scale(&sub(&w[1].left, &w[0].right), 1.0 / (w[1].t - w[0].t)))
            .collect();
        let atoms = nodes
            .iter()
            .filter(|n| n.is_jump())
            .map(|n| Atom {
                location: n.t,
                weight: n.jump_vector(),
            })
            .collect();
        PiecewiseMeasure {
            dim: curve.dimension(),
            breakpoints,
            densities,
            atoms,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn densities(&self) -> &[Vec<f64>] {
        &self.densities
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `|m|(I)`.
    pub fn total_variation(&self) -> f64 {
        let ac: f64 = self
            .densities
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(d, w)| norm(d) * (w[1] - w[0]))
            .sum();
        ac + self.atoms.iter().map(|a| norm(&a.weight)).sum::<f64>()
    }

    /// `λ m` for `λ > 0`.
    pub fn scaled(&self, factor: f64) -> PiecewiseMeasure {
        PiecewiseMeasure {
            dim: self.dim,
            breakpoints: self.breakpoints.clone(),
            densities: self.densities.iter().map(|d| scale(d, factor)).collect(),
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    location: a.location,
                    weight: scale(&a.weight, factor),
                })
                .collect(),
        }
    }
}

pub fn common_refinement(m1: &PiecewiseMeasure, m2: &PiecewiseMeasure) -> Result<Refinement> {
    if m1.dim != m2.dim {
        return Err(Error::DimensionMismatch {
            left: m1.dim,
            right: m2.dim,
        });
    }
    let breakpoints = merge_sorted(&m1.breakpoints, &m2.breakpoints);
    let mut densities = Vec::with_capacity(breakpoints.len() - 1);
    let (mut i, mut j) = (0, 0);
    for w in breakpoints.windows(2) {
        // advance each cursor to the source interval containing [w0, w1]
        while m1.breakpoints[i + 1] <= w[0] {
            i += 1;
        }
        while m2.breakpoints[j + 1] <= w[0] {
            j += 1;
        }
        densities.push((m1.densities[i].clone(), m2.densities[j].clone()));
    }

    let zero = vec![0.0; m1.dim];
    let mut atoms = Vec::with_capacity(m1.atoms.len() + m2.atoms.len());
    let (mut a, mut b) = (0, 0);
    while a < m1.atoms.len() || b < m2.atoms.len() {
        let la = m1.atoms.get(a).map(|x| x.location);
        let lb = m2.atoms.get(b).map(|x| x.location);
        match (la, lb) {
            (Some(x), Some(y)) if x == y => {
                atoms.push((x, m1.atoms[a].weight.clone(), m2.atoms[b].weight.clone()));
                a += 1;
                b += 1;
            }
            (Some(x), Some(y)) if x < y => {
                atoms.push((x, m1.atoms[a].weight.clone(), zero.clone()));
                a += 1;
            }
            (Some(x), None) => {
                atoms.push((x, m1.atoms[a].weight.clone(), zero.clone()));
                a += 1;
            }
            (_, Some(y)) => {
                atoms.push((y, zero.clone(), m2.atoms[b].weight.clone()));
                b += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    Ok(Refinement {
        breakpoints,
        densities,
        atoms,
    })
}

/// `⟨u/|u|, v/|v|⟩⁺ √(|u||v|)`, zero when either side vanishes.
fn relaxed_density(u: &[f64], v: &[f64]) -> f64 {
    let nu = norm(u);
    let nv = norm(v);
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    let cos = dot(u, v) / (nu * nv);
    if cos > 0.0 {
        cos * (nu * nv).sqrt()
    } else {
        0.0
    }
}

/// The relaxed similarity `Ŝ` evaluated on two derivative measures.
///
/// Parts of either measure that are singular with respect to the other
/// contribute nothing, and negative direction products are cut off.
pub fn s_hat_measure(m1: &PiecewiseMeasure, m2: &PiecewiseMeasure) -> Result<f64> {
    let r = common_refinement(m1, m2)?;
    let mut total = 0.0;
    for ((u, v), w) in r.densities.iter().zip(r.breakpoints.windows(2)) {
        total += relaxed_density(u, v) * (w[1] - w[0]);
    }
    for (_, w1, w2) in &r.atoms {
        total += relaxed_density(w1, w2);
    }
    Ok(total)
}

fn check_unit(v: &[f64]) -> Result<()> {
    let n = norm(v);
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitVector(n));
    }
    Ok(())
}

/// The unrelaxed integrand `f(t, ξ, ζ) = -⟨ξ, ζ⟩ √(t(1-t))`.
pub fn f_integrand(t: f64, xi: &[f64], zeta: &[f64]) -> Result<f64> {
    check_simplex_args(t, xi, zeta)?;
    Ok(-dot(xi, zeta) * (t * (1.0 - t)).sqrt())
}

/// Convex hull in `t` of [`f_integrand`]: `-⟨ξ, ζ⟩⁺ √(t(1-t))`.
pub fn f_c(t: f64, xi: &[f64], zeta: &[f64]) -> Result<f64> {
    check_simplex_args(t, xi, zeta)?;
    Ok(-dot(xi, zeta).max(0.0) * (t * (1.0 - t)).sqrt())
}

fn check_simplex_args(t: f64, xi: &[f64], zeta: &[f64]) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ParameterOutOfRange(t));
    }
    if xi.len() != zeta.len() {
        return Err(Error::DimensionMismatch {
            left: xi.len(),
            right: zeta.len(),
        });
    }
    check_unit(xi)?;
    check_unit(zeta)
}
