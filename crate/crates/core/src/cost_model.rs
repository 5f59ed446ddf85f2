//! Arc cost functions, network validation and the auxiliary functions that
//! drive every closed-form equilibrium expression.
//!
//! Given a two-arc network with total mass `M` the auxiliary functions are
//!
//! ```text
//! h(t)   = (c2(M - t) - c1(t)) / c1'(t)        on [0, M]
//! a(t)   = c2'(M - t) / c1'(t)                 on [0, M]
//! F_n(t) = (M - t)(1 + a(t)) + n h(t)
//! ```
//!
//! `h` is extended linearly with slope `-EPSILON` outside `[0, M]` and `a` is
//! extended by constants, which makes both inverses total.

use std::ops::Deref;

use crate::error::{CostProperty, Error, Result};
use crate::numeric::{bisect_decreasing, bisect_increasing, BISECTION_TOL};

/// Slope of the linear extension of `h` outside `[0, M]`.
pub const EPSILON: f64 = 1.0;

/// Relative slack under which the crossing-slope comparison counts as a tie.
const TIE_TOL: f64 = 1e-9;

/// Uniform sample count used by the convexity and monotonicity checks.
const VALIDATION_SAMPLES: usize = 1024;

/// Anything usable as a per-unit arc cost.
///
/// Evaluation is unchecked: callers are responsible for staying inside the
/// validated domain. [`ArcCost::eval`] and [`ArcCost::marginal`] are the
/// checked entry points.
pub trait Cost {
    fn value(&self, t: f64) -> f64;
    fn slope(&self, t: f64) -> f64;
}

impl<C: Cost + ?Sized> Cost for &C {
    fn value(&self, t: f64) -> f64 {
        (**self).value(t)
    }
    fn slope(&self, t: f64) -> f64 {
        (**self).slope(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    Affine,
    Polynomial,
    /// `c(t) = base + integral of a piecewise-linear marginal cost` sampled at
    /// uniform knots over `[0, domain_bound]`.
    TabulatedConvex,
}

/// Per-unit cost function of one arc.
///
/// For [`ArcKind::Affine`] and [`ArcKind::Polynomial`] the coefficients are
/// ascending-degree. For [`ArcKind::TabulatedConvex`] the first coefficient
/// is `c(0)` and the rest are the marginal costs `c'` at the knots.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcCost {
    kind: ArcKind,
    coefficients: Vec<f64>,
    domain_bound: f64,
    /// Tabulated only: integral of the marginal cost from 0 to each knot.
    knot_integrals: Vec<f64>,
}

impl ArcCost {
    pub fn affine(intercept: f64, slope: f64, domain_bound: f64) -> Self {
        ArcCost {
            kind: ArcKind::Affine,
            coefficients: vec![intercept, slope],
            domain_bound,
            knot_integrals: Vec::new(),
        }
    }

    /// Polynomial with ascending-degree coefficients. Trailing zero
    /// coefficients are dropped; one or two remaining coefficients make the
    /// arc affine.
    pub fn polynomial(coefficients: &[f64], domain_bound: f64) -> Self {
        let mut coefficients = coefficients.to_vec();
        while coefficients.len() > 1 && coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(0.0);
        }
        let kind = if coefficients.len() <= 2 {
            ArcKind::Affine
        } else {
            ArcKind::Polynomial
        };
        ArcCost {
            kind,
            coefficients,
            domain_bound,
            knot_integrals: Vec::new(),
        }
    }

    /// Convex cost from `c(0) = base` and marginal costs at `marginals.len()`
    /// uniform knots spanning `[0, domain_bound]`.
    pub fn tabulated(base: f64, marginals: &[f64], domain_bound: f64) -> Self {
        let mut coefficients = Vec::with_capacity(marginals.len() + 1);
        coefficients.push(base);
        coefficients.extend_from_slice(marginals);
        let mut knot_integrals = vec![0.0];
        if marginals.len() >= 2 {
            let step = domain_bound / (marginals.len() - 1) as f64;
            for w in marginals.windows(2) {
                let last = *knot_integrals.last().unwrap();
                knot_integrals.push(last + 0.5 * (w[0] + w[1]) * step);
            }
        }
        ArcCost {
            kind: ArcKind::TabulatedConvex,
            coefficients,
            domain_bound,
            knot_integrals,
        }
    }

    pub fn kind(&self) -> ArcKind {
        self.kind
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn domain_bound(&self) -> f64 {
        self.domain_bound
    }

    /// `c(t)`, rejecting `t` outside `[0, domain_bound]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.value(t))
    }

    /// `c'(t)`, rejecting `t` outside `[0, domain_bound]`.
    pub fn marginal(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.slope(t))
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if !(0.0..=self.domain_bound).contains(&t) {
            return Err(Error::Domain {
                t,
                bound: self.domain_bound,
            });
        }
        Ok(())
    }

    fn curvature(&self, t: f64) -> f64 {
        match self.kind {
            ArcKind::Affine => 0.0,
            ArcKind::Polynomial => {
                let mut acc = 0.0;
                for (i, c) in self.coefficients.iter().enumerate().skip(2).rev() {
                    acc = acc * t + (i * (i - 1)) as f64 * c;
                }
                acc
            }
            ArcKind::TabulatedConvex => {
                let (seg, _) = self.segment(t);
                let m = &self.coefficients[1..];
                (m[seg + 1] - m[seg]) / self.knot_step()
            }
        }
    }

    fn knot_step(&self) -> f64 {
        self.domain_bound / (self.coefficients.len() - 2) as f64
    }

    /// Segment index and offset within it; out-of-range `t` extrapolates the
    /// first or last segment.
    fn segment(&self, t: f64) -> (usize, f64) {
        let step = self.knot_step();
        let last = self.coefficients.len() - 3;
        let seg = if t <= 0.0 {
            0
        } else {
            ((t / step).floor() as usize).min(last)
        };
        (seg, t - seg as f64 * step)
    }

    /// Checks strict monotonicity, convexity and non-negativity on
    /// `[0, domain_bound]`.
    ///
    /// Polynomials of degree at most 4 have a quadratic second derivative and
    /// are checked exactly at its endpoints and vertex; higher degrees rely on
    /// sampling only, which can miss a narrow non-convex window.
    pub fn validate(&self) -> Result<()> {
        let bound = self.domain_bound;
        if !bound.is_finite() || bound <= 0.0 {
            return Err(Error::Network(format!(
                "domain bound must be positive and finite, got {bound}"
            )));
        }
        if let Some(bad) = self.coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::CostAssumption {
                property: CostProperty::Finite,
                witness: 0.0,
                detail: format!("coefficient {bad} is not finite"),
            });
        }
        match self.kind {
            ArcKind::Affine | ArcKind::Polynomial => self.validate_polynomial(),
            ArcKind::TabulatedConvex => self.validate_tabulated(),
        }
    }

    fn validate_polynomial(&self) -> Result<()> {
        let bound = self.domain_bound;
        let degree = self.coefficients.len() - 1;
        let mut witnesses: Vec<f64> = (0..=VALIDATION_SAMPLES)
            .map(|i| bound * i as f64 / VALIDATION_SAMPLES as f64)
            .collect();
        if (3..=4).contains(&degree) {
            // c'' = 2 c2 + 6 c3 t + 12 c4 t^2: its minimum on the interval is at
            // an endpoint or at the vertex.
            let c4 = self.coefficients.get(4).copied().unwrap_or(0.0);
            let c3 = self.coefficients[3];
            if c4 != 0.0 {
                let vertex = -6.0 * c3 / (24.0 * c4);
                if vertex > 0.0 && vertex < bound {
                    witnesses.push(vertex);
                }
            }
        }
        for &t in &witnesses {
            if self.curvature(t) < 0.0 {
                return Err(Error::CostAssumption {
                    property: CostProperty::Convex,
                    witness: t,
                    detail: format!("second derivative {} < 0", self.curvature(t)),
                });
            }
        }
        for &t in &witnesses {
            if self.slope(t) <= 0.0 {
                return Err(Error::CostAssumption {
                    property: CostProperty::StrictlyIncreasing,
                    witness: t,
                    detail: format!("derivative {} <= 0", self.slope(t)),
                });
            }
        }
        for &t in &witnesses {
            if self.value(t) < 0.0 {
                return Err(Error::CostAssumption {
                    property: CostProperty::NonNegative,
                    witness: t,
                    detail: format!("cost {} < 0", self.value(t)),
                });
            }
        }
        Ok(())
    }

    fn validate_tabulated(&self) -> Result<()> {
        let marginals = &self.coefficients[1..];
        if marginals.len() < 2 {
            return Err(Error::Network(
                "tabulated cost needs at least two marginal-cost knots".into(),
            ));
        }
        let step = self.knot_step();
        for (i, w) in marginals.windows(2).enumerate() {
            if w[1] < w[0] {
                return Err(Error::CostAssumption {
                    property: CostProperty::Convex,
                    witness: step * (i + 1) as f64,
                    detail: format!("marginal cost drops from {} to {}", w[0], w[1]),
                });
            }
        }
        if marginals[0] <= 0.0 {
            return Err(Error::CostAssumption {
                property: CostProperty::StrictlyIncreasing,
                witness: 0.0,
                detail: format!("marginal cost {} <= 0", marginals[0]),
            });
        }
        if self.coefficients[0] < 0.0 {
            return Err(Error::CostAssumption {
                property: CostProperty::NonNegative,
                witness: 0.0,
                detail: format!("cost {} < 0", self.coefficients[0]),
            });
        }
        Ok(())
    }
}

impl Cost for ArcCost {
    fn value(&self, t: f64) -> f64 {
        match self.kind {
            ArcKind::Affine | ArcKind::Polynomial => self
                .coefficients
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * t + c),
            ArcKind::TabulatedConvex => {
                let (seg, u) = self.segment(t);
                let m = &self.coefficients[1..];
                let slope = (m[seg + 1] - m[seg]) / self.knot_step();
                self.coefficients[0] + self.knot_integrals[seg] + m[seg] * u + 0.5 * slope * u * u
            }
        }
    }

    fn slope(&self, t: f64) -> f64 {
        match self.kind {
            ArcKind::Affine | ArcKind::Polynomial => {
                let mut acc = 0.0;
                for (i, c) in self.coefficients.iter().enumerate().skip(1).rev() {
                    acc = acc * t + i as f64 * c;
                }
                acc
            }
            ArcKind::TabulatedConvex => {
                let (seg, u) = self.segment(t);
                let m = &self.coefficients[1..];
                m[seg] + (m[seg + 1] - m[seg]) * u / self.knot_step()
            }
        }
    }
}

/// A cost pre-loaded with a fixed flow: `t -> c(offset + t)`.
#[derive(Debug, Clone, Copy)]
pub struct Shifted<C> {
    pub inner: C,
    pub offset: f64,
}

impl<C: Cost> Cost for Shifted<C> {
    fn value(&self, t: f64) -> f64 {
        self.inner.value(self.offset + t)
    }
    fn slope(&self, t: f64) -> f64 {
        self.inner.slope(self.offset + t)
    }
}

/// Two parallel arcs carrying total mass `mass`, in a fixed orientation.
///
/// No orientation convention is imposed here; see [`CanonicalNetwork`].
#[derive(Debug, Clone, PartialEq)]
pub struct Network<C = ArcCost> {
    pub arc1: C,
    pub arc2: C,
    pub mass: f64,
}

impl<C: Cost> Network<C> {
    pub fn new(arc1: C, arc2: C, mass: f64) -> Self {
        Network { arc1, arc2, mass }
    }

    /// `c1(t) - c2(M - t)`, strictly increasing in `t`.
    pub fn cost_gap(&self, t: f64) -> f64 {
        self.arc1.value(t) - self.arc2.value(self.mass - t)
    }

    /// The point where both arcs cost the same when all mass is routed,
    /// if it exists in `[0, M]`.
    pub fn crossing(&self) -> Option<f64> {
        let m = self.mass;
        if self.arc1.value(m) >= self.arc2.value(0.0) && self.arc2.value(m) >= self.arc1.value(0.0)
        {
            Some(bisect_increasing(
                |t| self.cost_gap(t),
                0.0,
                m,
                BISECTION_TOL,
            ))
        } else {
            None
        }
    }

    pub fn h(&self, t: f64) -> f64 {
        let m = self.mass;
        if t < 0.0 {
            self.h_inner(0.0) - EPSILON * t
        } else if t > m {
            self.h_inner(m) - EPSILON * (t - m)
        } else {
            self.h_inner(t)
        }
    }

    fn h_inner(&self, t: f64) -> f64 {
        (self.arc2.value(self.mass - t) - self.arc1.value(t)) / self.arc1.slope(t)
    }

    pub fn a(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.mass);
        self.arc2.slope(self.mass - t) / self.arc1.slope(t)
    }

    /// `F_n(t) = (M - t)(1 + a(t)) + n h(t)`.
    pub fn f(&self, n: usize, t: f64) -> f64 {
        (self.mass - t) * (1.0 + self.a(t)) + n as f64 * self.h(t)
    }

    /// `H = h(M) = (c2(0) - c1(M)) / c1'(M)`.
    pub fn big_h(&self) -> f64 {
        self.h_inner(self.mass)
    }

    /// Inverse of `h`. Values beyond `[h(M), h(0)]` are resolved on the
    /// linear extension; inside, by bisection on `[0, M]`.
    pub fn inverse_h(&self, v: f64) -> Result<f64> {
        if !v.is_finite() {
            return Err(Error::Bracket { value: v });
        }
        let m = self.mass;
        let top = self.h_inner(0.0);
        let bottom = self.h_inner(m);
        if v >= top {
            return Ok((top - v) / EPSILON);
        }
        if v <= bottom {
            return Ok(m + (bottom - v) / EPSILON);
        }
        Ok(bisect_decreasing(
            |t| self.h_inner(t) - v,
            0.0,
            m,
            BISECTION_TOL,
        ))
    }

    /// Inverse of `F_n`, total in the same way as [`Network::inverse_h`].
    pub fn inverse_f(&self, n: usize, v: f64) -> Result<f64> {
        if !v.is_finite() {
            return Err(Error::Bracket { value: v });
        }
        let m = self.mass;
        let nf = n as f64;
        let top = self.f(n, 0.0);
        let bottom = self.f(n, m);
        if v >= top {
            return Ok((top - v) / (1.0 + self.a(0.0) + nf * EPSILON));
        }
        if v <= bottom {
            return Ok(m + (bottom - v) / (1.0 + self.a(m) + nf * EPSILON));
        }
        Ok(bisect_decreasing(
            |t| self.f(n, t) - v,
            0.0,
            m,
            BISECTION_TOL,
        ))
    }
}

/// Which of the two admissible orderings holds after canonicalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum AssumptionCase {
    /// `c1(M) < c2(0)`: arc 1 is strictly cheaper whatever the split.
    I,
    /// The arcs cross at `xi_hat` and arc 1 absorbs the crossing weight.
    II,
}

/// Constants derived from the auxiliary functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxiliaryBundle {
    pub big_h: f64,
    /// `a(xi_hat)`, present iff the crossing exists.
    pub big_a: Option<f64>,
    pub xi_hat: Option<f64>,
    pub epsilon: f64,
}

/// A validated network whose arcs are ordered so that arc 1 is weakly
/// cheaper at every equilibrium.
#[derive(Debug, Clone)]
pub struct CanonicalNetwork {
    net: Network<ArcCost>,
    swapped: bool,
    case: AssumptionCase,
    xi_hat: Option<f64>,
}

impl CanonicalNetwork {
    /// Validates both arcs and orders them. `swapped` is set when `arc_b`
    /// becomes arc 1. A tie in the crossing-slope comparison, up to a
    /// relative 1e-9, keeps the input order.
    pub fn new(arc_a: ArcCost, arc_b: ArcCost, mass: f64) -> Result<Self> {
        arc_a.validate()?;
        arc_b.validate()?;
        if !mass.is_finite() || mass <= 0.0 {
            return Err(Error::Network(format!(
                "total mass must be positive, got {mass}"
            )));
        }
        let bound = arc_a.domain_bound().min(arc_b.domain_bound());
        if mass >= bound {
            return Err(Error::Network(format!(
                "total mass {mass} must lie below the cost domain bound {bound}"
            )));
        }

        let forward = Network::new(arc_a, arc_b, mass);
        let (c1, c2) = (&forward.arc1, &forward.arc2);
        if c1.value(mass) < c2.value(0.0) {
            return Ok(Self::assemble(forward, false, AssumptionCase::I));
        }
        if c2.value(mass) < c1.value(0.0) {
            let Network { arc1, arc2, mass } = forward;
            return Ok(Self::assemble(
                Network::new(arc2, arc1, mass),
                true,
                AssumptionCase::I,
            ));
        }
        let xi = forward
            .crossing()
            .ok_or_else(|| Error::Network("arcs cross but no crossing was found".into()))?;
        let lhs = xi * c1.slope(xi);
        let rhs = (mass - xi) * c2.slope(mass - xi);
        // xi is only known to bisection accuracy, so ties are detected with slack.
        if lhs >= rhs - TIE_TOL * rhs.abs().max(1.0) {
            Ok(Self::assemble(forward, false, AssumptionCase::II))
        } else {
            let Network { arc1, arc2, mass } = forward;
            Ok(Self::assemble(
                Network::new(arc2, arc1, mass),
                true,
                AssumptionCase::II,
            ))
        }
    }

    fn assemble(net: Network<ArcCost>, swapped: bool, case: AssumptionCase) -> Self {
        let xi_hat = match case {
            AssumptionCase::I => None,
            AssumptionCase::II => net.crossing(),
        };
        CanonicalNetwork {
            net,
            swapped,
            case,
            xi_hat,
        }
    }

    pub fn network(&self) -> &Network<ArcCost> {
        &self.net
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }

    pub fn case(&self) -> AssumptionCase {
        self.case
    }

    pub fn xi_hat(&self) -> Option<f64> {
        self.xi_hat
    }

    /// `F_0(xi_hat) = (M - xi_hat)(1 + A)`, the largest atomic mass
    /// compatible with both arcs costing the same.
    pub fn f0_at_xi_hat(&self) -> Option<f64> {
        self.xi_hat.map(|xi| self.net.f(0, xi))
    }

    pub fn aux(&self) -> AuxiliaryBundle {
        AuxiliaryBundle {
            big_h: self.net.big_h(),
            big_a: self.xi_hat.map(|xi| self.net.a(xi)),
            xi_hat: self.xi_hat,
            epsilon: EPSILON,
        }
    }

    /// Maps a pair indexed by canonical arc to the caller's arc order.
    pub fn to_user<T: Copy>(&self, pair: [T; 2]) -> [T; 2] {
        if self.swapped {
            [pair[1], pair[0]]
        } else {
            pair
        }
    }

    /// Maps a pair in the caller's arc order to canonical order.
    pub fn from_user<T: Copy>(&self, pair: [T; 2]) -> [T; 2] {
        self.to_user(pair)
    }

    /// The arcs in the caller's original order.
    pub fn user_arcs(&self) -> [&ArcCost; 2] {
        self.to_user([&self.net.arc1, &self.net.arc2])
    }
}

impl Deref for CanonicalNetwork {
    type Target = Network<ArcCost>;

    fn deref(&self) -> &Network<ArcCost> {
        &self.net
    }
}
