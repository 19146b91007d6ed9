//! Metric charts, compiled derivative trees and metric jets.

use serde::{Deserialize, Serialize};

use super::expr::{Expr, Params, Wrt};
use super::parse::{parse_with, Symbols};
use crate::error::{Error, Result};
use crate::taylor::{Taylor, MAX_ORDER, NCOEF, TABLES};

/// Storage order of the six independent components `g_ij`, `i ≤ j`.
pub const COMPONENTS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

pub fn component_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    COMPONENTS.iter().position(|&c| c == (i, j)).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "yes")]
    pub lo_open: bool,
    #[serde(default = "yes")]
    pub hi_open: bool,
}

fn yes() -> bool {
    true
}

impl Interval {
    pub fn open(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn real_line() -> Self {
        Interval::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    /// Whether `[lo, hi]` lies in the closure of the interval.
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        lo >= self.lo && hi <= self.hi && lo <= hi
    }
}

/// Axis-aligned chart domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub axes: [Interval; 3],
}

impl Domain {
    pub fn everywhere() -> Self {
        Domain {
            axes: [Interval::real_line(); 3],
        }
    }

    pub fn contains(&self, p: &[f64; 3]) -> bool {
        self.axes.iter().zip(p).all(|(iv, &x)| iv.contains(x))
    }
}

/// A chart: six metric component expressions over a domain box.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub name: String,
    pub coords: [String; 3],
    /// `g_ij` for `i ≤ j`, in [`COMPONENTS`] order.
    pub components: [Expr; 6],
    pub domain: Domain,
    pub params: Params,
}

impl MetricSpec {
    /// Parse component sources given in [`COMPONENTS`] order.
    pub fn parse(name: &str, coords: [&str; 3], sources: [&str; 6], domain: Domain, params: Params) -> Result<Self> {
        let coords = coords.map(str::to_string);
        let symbols = Symbols::new(Some(coords.clone()), params.keys().cloned());
        let mut comps = Vec::with_capacity(6);
        for src in sources {
            comps.push(parse_with(src, &symbols)?);
        }
        Ok(MetricSpec {
            name: name.to_string(),
            coords,
            components: comps.try_into().unwrap(),
            domain,
            params,
        })
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[component_index(i, j)]
    }

    /// Symbols for parsing auxiliary expressions (potentials) on this chart.
    pub fn symbols(&self) -> Symbols {
        Symbols::new(Some(self.coords.clone()), self.params.keys().cloned())
    }

    /// Leading-minor positive-definiteness test at each point.
    pub fn check_positive_definite(&self, points: &[[f64; 3]]) -> Result<()> {
        for p in points {
            let mut g = [[0.0; 3]; 3];
            for (k, &(i, j)) in COMPONENTS.iter().enumerate() {
                let v = self.components[k].eval(p, &self.params)?;
                g[i][j] = v;
                g[j][i] = v;
            }
            if !leading_minors_positive(&g) {
                return Err(Error::NotPositiveDefinite(*p));
            }
        }
        Ok(())
    }
}

pub(crate) fn leading_minors_positive(g: &[[f64; 3]; 3]) -> bool {
    let m1 = g[0][0];
    let m2 = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let m3 = crate::linalg::det3(g);
    m1 > 0.0 && m2 > 0.0 && m3 > 0.0
}

/// An expression with all partial derivatives up to a fixed order precomputed symbolically.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    order: usize,
    /// Indexed by monomial (graded order), see `taylor::TABLES`.
    derivs: Vec<Expr>,
}

impl CompiledExpr {
    pub fn new(expr: &Expr, params: &Params, order: usize) -> Self {
        assert!(order <= MAX_ORDER);
        let t = &*TABLES;
        let n = t.offsets[order + 1];
        let mut derivs: Vec<Expr> = Vec::with_capacity(n);
        derivs.push(expr.substitute_params(params));
        for k in 1..n {
            let m = t.monomials[k];
            let axis = (0..3).find(|&a| m[a] > 0).unwrap();
            let mut parent = m;
            parent[axis] -= 1;
            let pk = crate::taylor::monomial_index(parent);
            let d = derivs[pk].differentiate(Wrt::Axis(axis));
            derivs.push(d);
        }
        CompiledExpr { order, derivs }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The symbolic derivative `∂^α` for a list of axes.
    pub fn derivative(&self, axes: &[usize]) -> &Expr {
        &self.derivs[crate::taylor::multi_index(axes)]
    }

    pub(crate) fn taylor(&self, point: &[f64; 3], order: usize) -> Result<Taylor> {
        if order > self.order {
            return Err(Error::JetOrder {
                needed: order,
                have: self.order,
            });
        }
        let t = &*TABLES;
        let empty = Params::new();
        let mut out = Taylor::zero(order);
        for k in 0..t.offsets[order + 1] {
            out.c[k] = self.derivs[k].eval(point, &empty)? / t.factorial[k];
        }
        Ok(out)
    }
}

/// Values and coordinate partials of a metric up to some order at one point.
///
/// Derivative slots are symmetric in the component pair and in the derivative
/// indices by construction (one coefficient per multi-index). Slots above
/// `order` are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    pub point: [f64; 3],
    pub order: usize,
    pub(crate) coeffs: [[f64; NCOEF]; 6],
}

pub type Mat3 = [[f64; 3]; 3];
pub type Tensor3 = [[[f64; 3]; 3]; 3];
pub type Tensor4 = [[[[f64; 3]; 3]; 3]; 3];
pub type Tensor5 = [[[[[f64; 3]; 3]; 3]; 3]; 3];

impl MetricJet {
    pub(crate) fn from_taylor(point: [f64; 3], order: usize, comps: &[Taylor; 6]) -> Self {
        MetricJet {
            point,
            order,
            coeffs: std::array::from_fn(|k| comps[k].c),
        }
    }

    /// `∂_{axes} g_ij`; zero above the jet order.
    pub fn partial(&self, i: usize, j: usize, axes: &[usize]) -> f64 {
        if axes.len() > self.order {
            return 0.0;
        }
        let k = crate::taylor::multi_index(axes);
        self.coeffs[component_index(i, j)][k] * TABLES.factorial[k]
    }

    pub fn g(&self) -> Mat3 {
        std::array::from_fn(|i| std::array::from_fn(|j| self.partial(i, j, &[])))
    }

    /// `dg[i][j][k] = ∂_k g_ij`
    pub fn dg(&self) -> Tensor3 {
        std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| self.partial(i, j, &[k]))))
    }

    /// `d2g[i][j][k][l] = ∂_k ∂_l g_ij`
    pub fn d2g(&self) -> Tensor4 {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| std::array::from_fn(|k| std::array::from_fn(|l| self.partial(i, j, &[k, l]))))
        })
    }

    /// `d3g[i][j][k][l][m] = ∂_k ∂_l ∂_m g_ij`
    pub fn d3g(&self) -> Box<Tensor5> {
        Box::new(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                std::array::from_fn(|k| {
                    std::array::from_fn(|l| std::array::from_fn(|m| self.partial(i, j, &[k, l, m])))
                })
            })
        }))
    }

    pub(crate) fn taylor(&self, i: usize, j: usize) -> Taylor {
        Taylor {
            order: self.order as u8,
            c: self.coeffs[component_index(i, j)],
        }
    }
}

/// A metric chart with symbolic derivatives of every component precomputed.
#[derive(Debug, Clone)]
pub struct CompiledMetric {
    spec: MetricSpec,
    comps: Vec<CompiledExpr>,
}

impl CompiledMetric {
    pub fn new(spec: MetricSpec, order: usize) -> Self {
        let comps = spec
            .components
            .iter()
            .map(|c| CompiledExpr::new(c, &spec.params, order))
            .collect();
        CompiledMetric { spec, comps }
    }

    pub fn spec(&self) -> &MetricSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.comps[0].order()
    }

    pub fn component(&self, i: usize, j: usize) -> &CompiledExpr {
        &self.comps[component_index(i, j)]
    }

    /// Evaluate the metric jet at an interior point.
    pub fn jet(&self, point: [f64; 3], order: usize) -> Result<MetricJet> {
        if !self.spec.domain.contains(&point) {
            return Err(Error::OutsideDomain(point));
        }
        let mut comps = [Taylor::zero(order); 6];
        for (k, c) in self.comps.iter().enumerate() {
            comps[k] = c.taylor(&point, order)?;
        }
        let jet = MetricJet::from_taylor(point, order, &comps);
        if !leading_minors_positive(&jet.g()) {
            return Err(Error::NotPositiveDefinite(point));
        }
        Ok(jet)
    }
}

/// One-shot jet evaluation; compiles the derivative trees on every call.
pub fn metric_jet(spec: &MetricSpec, point: [f64; 3], order: usize) -> Result<MetricJet> {
    if order > MAX_ORDER {
        return Err(Error::JetOrder {
            needed: order,
            have: MAX_ORDER,
        });
    }
    CompiledMetric::new(spec.clone(), order).jet(point, order)
}
