//! The continuous objective `F(x) = I(x) / |x|_inf` and the pieces of
//! geometry built on it: p-norms, level sets and coordinate flips.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_TIE_TOL: f64 = 1e-9;

/// The norm parameter `p` of the inner subproblem's constraint sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NormParam {
    One,
    /// A finite exponent strictly between 1 and infinity.
    Finite(f64),
    Infinity,
}

impl NormParam {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Self::Infinity)
        } else if p == 1.0 {
            Ok(Self::One)
        } else if p.is_finite() && p > 1.0 {
            Ok(Self::Finite(p))
        } else {
            Err(Error::Argument(format!("norm parameter must lie in [1, inf], got {p}")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Self::One => 1.0,
            Self::Finite(p) => p,
            Self::Infinity => f64::INFINITY,
        }
    }

    pub fn norm(self, x: &[f64]) -> f64 {
        match self {
            Self::One => x.iter().map(|v| v.abs()).sum(),
            Self::Finite(p) => {
                // scale first so large exponents don't overflow
                let m = inf_norm(x);
                if m == 0.0 {
                    return 0.0;
                }
                m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
            }
            Self::Infinity => inf_norm(x),
        }
    }
}

impl fmt::Display for NormParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::One => write!(f, "1"),
            Self::Finite(p) => write!(f, "{p}"),
            Self::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for NormParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::Argument(format!("cannot parse norm parameter `{s}`")))?;
                Self::new(p)
            }
        }
    }
}

impl TryFrom<String> for NormParam {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<NormParam> for String {
    fn from(p: NormParam) -> String {
        p.to_string()
    }
}

pub fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `sign(t)` with `sign(0) = 1`.
#[inline]
pub fn sign(t: f64) -> f64 {
    if t >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// A nonzero point of the relaxation together with its cached inf-norm.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    x: Vec<f64>,
    inf_norm: f64,
}

impl StateVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("coordinate {} is not finite", i + 1)));
        }
        let inf_norm = inf_norm(&x);
        if inf_norm == 0.0 {
            return Err(Error::Domain("the zero vector has no ratio value".into()));
        }
        Ok(Self { x, inf_norm })
    }

    pub fn from_signs(side: &[i8]) -> Result<Self> {
        Self::new(side.iter().map(|&s| f64::from(s)).collect())
    }

    /// Rescales to `|x|_inf = 1` and snaps coordinates within
    /// `tie_tol` of `+-1` onto `+-1` exactly.
    pub fn normalized(&self, tie_tol: f64) -> Self {
        let x = self
            .x
            .iter()
            .map(|&v| {
                let y = v / self.inf_norm;
                if (y - 1.0).abs() <= tie_tol {
                    1.0
                } else if (y + 1.0).abs() <= tie_tol {
                    -1.0
                } else {
                    y
                }
            })
            .collect();
        Self { x, inf_norm: 1.0 }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.x
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn inf_norm(&self) -> f64 {
        self.inf_norm
    }

    pub fn p_norm(&self, p: NormParam) -> f64 {
        p.norm(&self.x)
    }

    /// True when every coordinate sits on `+-|x|_inf`, i.e. `S< = {}`.
    pub fn is_binary(&self) -> bool {
        self.x.iter().all(|v| v.abs() == self.inf_norm)
    }

    /// Threshold at zero with `sign(0) = +1`.
    pub fn sign_pattern(&self) -> Vec<i8> {
        self.x.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }).collect()
    }
}

/// The partition `S+`, `S-`, `S<` of the vertex set induced by a point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LevelSets {
    pub s_plus: Vec<usize>,
    pub s_minus: Vec<usize>,
    pub s_less: Vec<usize>,
}

fn check_len(g: &Graph, x: &StateVector) -> Result<()> {
    if x.len() != g.n() {
        return Err(Error::Argument(format!(
            "state has length {}, graph has {} vertices",
            x.len(),
            g.n()
        )));
    }
    Ok(())
}

/// Weighted total variation `sum w_ij |x_i - x_j|`.
pub fn eval_i(g: &Graph, x: &StateVector) -> Result<f64> {
    check_len(g, x)?;
    Ok(total_variation(g, x.as_slice()))
}

pub(crate) fn total_variation(g: &Graph, x: &[f64]) -> f64 {
    g.edges().iter().map(|e| e.w * (x[e.u] - x[e.v]).abs()).sum()
}

pub fn eval_f(g: &Graph, x: &StateVector) -> Result<f64> {
    Ok(eval_i(g, x)? / x.inf_norm())
}

/// Level sets with equality tested as `|x_i -+ |x|_inf| <= tie_tol * |x|_inf`.
pub fn level_sets(x: &StateVector, tie_tol: f64) -> LevelSets {
    let m = x.inf_norm();
    let mut sets = LevelSets::default();
    for (i, &v) in x.as_slice().iter().enumerate() {
        if (v - m).abs() <= tie_tol * m {
            sets.s_plus.push(i);
        } else if (v + m).abs() <= tie_tol * m {
            sets.s_minus.push(i);
        } else {
            sets.s_less.push(i);
        }
    }
    sets
}

/// The coordinate flip `T_i`.
pub fn flip(x: &StateVector, i: usize) -> Result<StateVector> {
    if i >= x.len() {
        return Err(Error::Argument(format!(
            "flip index {} out of range 1..={}",
            i + 1,
            x.len()
        )));
    }
    let mut y = x.clone();
    y.x[i] = -y.x[i];
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_triples(3, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn sv(x: &[f64]) -> StateVector {
        StateVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn objective_examples() {
        let g = triangle();
        assert_eq!(eval_i(&g, &sv(&[1.0, 1.0, -1.0])).unwrap(), 4.0);
        assert_eq!(eval_i(&g, &sv(&[0.3, 0.3, 0.3])).unwrap(), 0.0);
        let e = Graph::from_triples(2, &[(0, 1, 3.0)]).unwrap();
        assert_eq!(eval_i(&e, &sv(&[0.5, -0.5])).unwrap(), 3.0);

        assert_eq!(eval_f(&g, &sv(&[1.0, 1.0, -1.0])).unwrap(), 4.0);
        assert_eq!(
            eval_f(&g, &sv(&[2.0, 2.0, -2.0])).unwrap(),
            eval_f(&g, &sv(&[1.0, 1.0, -1.0])).unwrap()
        );
        assert!(eval_i(&g, &sv(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn zero_vector_is_a_domain_error() {
        assert!(matches!(StateVector::new(vec![0.0; 3]), Err(Error::Domain(_))));
    }

    #[test]
    fn level_set_examples() {
        let ls = level_sets(&sv(&[1.0, 1.0, -1.0]), 1e-9);
        assert_eq!(ls.s_plus, vec![0, 1]);
        assert_eq!(ls.s_minus, vec![2]);
        assert!(ls.s_less.is_empty());

        let ls = level_sets(&sv(&[1.0, 0.5, -1.0]), 1e-9);
        assert_eq!(ls.s_less, vec![1]);

        let ls = level_sets(&sv(&[1.0, 1.0 - 1e-15, -1.0]), 1e-12);
        assert_eq!(ls.s_plus, vec![0, 1]);
    }

    #[test]
    fn flip_examples() {
        let g = triangle();
        let x = sv(&[1.0, 1.0, -1.0]);
        assert_eq!(flip(&x, 2).unwrap().as_slice(), &[1.0, 1.0, 1.0]);
        assert_eq!(flip(&flip(&x, 1).unwrap(), 1).unwrap(), x);
        assert_eq!(eval_f(&g, &flip(&x, 0).unwrap()).unwrap(), 4.0);
        assert!(flip(&x, 3).is_err());
    }

    #[test]
    fn norm_param_parsing() {
        assert_eq!("inf".parse::<NormParam>().unwrap(), NormParam::Infinity);
        assert_eq!("1".parse::<NormParam>().unwrap(), NormParam::One);
        assert_eq!("2".parse::<NormParam>().unwrap(), NormParam::Finite(2.0));
        assert!("0.5".parse::<NormParam>().is_err());
        assert!("abc".parse::<NormParam>().is_err());
        let p = NormParam::Finite(2.0);
        assert!((p.norm(&[3.0, 4.0]) - 5.0).abs() < 1e-12);
        assert_eq!(NormParam::Infinity.to_string(), "inf");
    }

    #[test]
    fn normalization_snaps_near_extremes() {
        let x = sv(&[2.0, 2.0 - 1e-12, -2.0, 1.0]).normalized(1e-9);
        assert_eq!(x.as_slice(), &[1.0, 1.0, -1.0, 0.5]);
        assert_eq!(x.inf_norm(), 1.0);
    }
}
