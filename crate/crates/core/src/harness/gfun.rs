//! Test functions `G: R^k -> R` with derivative bounds known in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest derivative order tracked, matching the five derivatives the
/// four-moment comparison controls.
pub const MAX_DERIVATIVE: usize = 5;

/// `sup_t |d^j/dt^j exp(−t²)|` for `j = 0..=5`, from the extrema of
/// `H_j(t) exp(−t²)` (Hermite polynomials).
const GAUSSIAN_BUMP_SUP: [f64; MAX_DERIVATIVE + 1] = [
    1.0,
    0.857_763_884_960_706_8,
    2.0,
    3.903_566_145_539_902,
    12.0,
    32.713_910_315_354_106,
];

/// A test function over the selected eigenvalues `x = (λ_{i_1}(A_n), …)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GSpec {
    /// `x_index`.
    Coordinate { index: usize },
    /// `(x_index − 2n) / n^{1/3}`: the top-edge rescaling on the `A` scale.
    EdgeCoordinate { index: usize },
    /// `exp(−((y − center)/width)²)` where `y` is the edge-rescaled
    /// coordinate when `edge` is set and the raw coordinate otherwise.
    Bump {
        index: usize,
        center: f64,
        width: f64,
        #[serde(default)]
        edge: bool,
    },
    /// Product of the factors.
    Product { factors: Vec<GSpec> },
}

impl GSpec {
    pub fn validate(&self, k: usize) -> Result<()> {
        match self {
            GSpec::Coordinate { index } | GSpec::EdgeCoordinate { index } => {
                if *index >= k {
                    return Err(Error::Config(format!("G coordinate {index} but only {k} indices")));
                }
            }
            GSpec::Bump { index, width, .. } => {
                if *index >= k {
                    return Err(Error::Config(format!("G coordinate {index} but only {k} indices")));
                }
                if !(*width > 0.0) {
                    return Err(Error::Config("bump width must be positive".into()));
                }
            }
            GSpec::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::Config("empty product".into()));
                }
                for f in factors {
                    f.validate(k)?;
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], n: usize) -> f64 {
        let nf = n as f64;
        let edge = |v: f64| (v - 2.0 * nf) / nf.cbrt();
        match self {
            GSpec::Coordinate { index } => x[*index],
            GSpec::EdgeCoordinate { index } => edge(x[*index]),
            GSpec::Bump {
                index,
                center,
                width,
                edge: on_edge,
            } => {
                let y = if *on_edge { edge(x[*index]) } else { x[*index] };
                let t = (y - center) / width;
                (-t * t).exp()
            }
            GSpec::Product { factors } => factors.iter().map(|f| f.eval(x, n)).product(),
        }
    }

    /// Upper bounds on `sup |∇^j G|` (operator norm of the `j`-th derivative
    /// tensor) over the box `|x_i| <= radius`, for `j = 0..=5`.
    pub fn derivative_bounds(&self, n: usize, radius: f64) -> [f64; MAX_DERIVATIVE + 1] {
        let nf = n as f64;
        let mut b = [0.0; MAX_DERIVATIVE + 1];
        match self {
            GSpec::Coordinate { .. } => {
                b[0] = radius;
                b[1] = 1.0;
            }
            GSpec::EdgeCoordinate { .. } => {
                b[0] = (radius + 2.0 * nf) / nf.cbrt();
                b[1] = 1.0 / nf.cbrt();
            }
            GSpec::Bump { width, edge, .. } => {
                let chain = if *edge { 1.0 / (width * nf.cbrt()) } else { 1.0 / width };
                for (j, bj) in b.iter_mut().enumerate() {
                    *bj = GAUSSIAN_BUMP_SUP[j] * chain.powi(j as i32);
                }
            }
            GSpec::Product { factors } => {
                // Leibniz rule, factor by factor.
                let mut acc = [0.0; MAX_DERIVATIVE + 1];
                acc[0] = 1.0;
                for f in factors {
                    let fb = f.derivative_bounds(n, radius);
                    let mut next = [0.0; MAX_DERIVATIVE + 1];
                    for (j, nj) in next.iter_mut().enumerate() {
                        *nj = (0..=j)
                            .map(|i| binomial(j, i) * acc[i] * fb[j - i])
                            .sum();
                    }
                    acc = next;
                }
                b = acc;
            }
        }
        b
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
