//! Two-period state evolution and incentive capacity.
//!
//! The bandit environment has binary outcomes (`0` failure, `1` success), a
//! safe action with known success probability `p`, and an innovative action
//! described by two models `q_L(1) = theta_l < p < theta_h = q_H(1)` with
//! prior weight `m` on `q_H`. After an innovation step the agent updates the
//! posterior by Bayes rule and the misspecification intensity by the
//! log-likelihood-ratio rule `lambda_2(y) = -log(max_q q(y)) / gamma`.
//!
//! The incentive gap at a state `(mu, lambda)` and continuation profile `x`
//! is `M(mu, lambda; x) = G(x; mu, lambda) - g_q1(x; lambda)`; its supremum
//! over profiles is the incentive capacity `C(mu, lambda)`. By translation
//! invariance the gap depends on `x` only through the spread
//! `zeta = x(1) - x(0)`, and substituting `w = lambda * zeta` shows
//! `C(mu, lambda) = kappa(mu) / lambda` for an intensity-free numerator
//! `kappa`. The supremum is often a limit: the two analytic boundary values
//! are `sum_q mu(q) log(p / theta_q)` (spread to -inf) and
//! `sum_q mu(q) log((1-p) / (1-theta_q))` (spread to +inf).
//!
//! A breakthrough trap occurs when the post-success capacity falls below the
//! innovation cost `k`.

use crate::entropic::Intensity;
use crate::error::CoreError;
use crate::opt::{bisect_root, scan_golden_max};
use crate::wage::WageMap;
use serde::{Deserialize, Serialize};

/// Primitives of the two-period innovation environment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicPrimitives {
    /// Safe-action success probability.
    pub p: f64,
    /// Innovation success probability under the pessimistic model.
    pub theta_l: f64,
    /// Innovation success probability under the optimistic model.
    pub theta_h: f64,
    /// Prior weight on the optimistic model.
    pub m: f64,
    /// Innovation cost (utils); the safe action costs zero.
    pub k: f64,
    /// LLR scale: larger `gamma` means evidence moves the intensity less.
    pub gamma: f64,
    /// Scale-up multiplier on period-2 output after early innovative
    /// success followed by continued innovation.
    pub a_scale: f64,
    /// Agent discount on period-2 utility.
    pub delta: f64,
    /// Reservation utility.
    pub u0: f64,
    /// Period-1 misspecification intensity. The `Zero` tag selects the
    /// expected-utility benchmark, under which the intensity stays zero in
    /// period 2 as well.
    pub lambda1: Intensity,
    pub hspec: WageMap,
}

impl DynamicPrimitives {
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(0.0 < self.theta_l && self.theta_l < self.p && self.p < self.theta_h && self.theta_h < 1.0)
        {
            return Err(CoreError::invalid(
                "need 0 < theta_l < p < theta_h < 1",
            ));
        }
        if !(self.m > 0.0 && self.m < 1.0) {
            return Err(CoreError::invalid("prior weight m must be in (0,1)"));
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(CoreError::invalid("innovation cost k must be positive"));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(CoreError::invalid("gamma must be positive"));
        }
        if !(self.a_scale.is_finite() && self.a_scale >= 1.0) {
            return Err(CoreError::invalid("scale-up multiplier must be >= 1"));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(CoreError::invalid("delta must be in (0,1]"));
        }
        if !self.u0.is_finite() {
            return Err(CoreError::invalid("reservation utility must be finite"));
        }
        self.hspec.validate()
    }
}

/// The dynamic state: posterior weight on the optimistic model and the
/// current misspecification intensity.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RobustnessState {
    pub m_high: f64,
    pub lambda: Intensity,
}

/// Posterior weight on `q_H` after observing outcome `y` from an innovation
/// step.
pub fn bayes_update(prims: &DynamicPrimitives, m_prior: f64, y: usize) -> f64 {
    let (lh, ll) = if y == 1 {
        (prims.theta_h, prims.theta_l)
    } else {
        (1.0 - prims.theta_h, 1.0 - prims.theta_l)
    };
    m_prior * lh / (m_prior * lh + (1.0 - m_prior) * ll)
}

/// Post-outcome intensity from the LLR rule: `-log(theta_h)/gamma` after a
/// success, `-log(1 - theta_l)/gamma` after a failure.
pub fn llr_update(prims: &DynamicPrimitives, y: usize) -> f64 {
    if y == 1 {
        -prims.theta_h.ln() / prims.gamma
    } else {
        -(1.0 - prims.theta_l).ln() / prims.gamma
    }
}

/// State after an innovation step with outcome `y`, starting from the prior.
pub fn post_outcome_state(prims: &DynamicPrimitives, y: usize) -> RobustnessState {
    match prims.lambda1 {
        // Expected-utility benchmark: the intensity stays at the endpoint.
        Intensity::Zero => RobustnessState {
            m_high: bayes_update(prims, prims.m, y),
            lambda: Intensity::Zero,
        },
        _ => RobustnessState {
            m_high: bayes_update(prims, prims.m, y),
            lambda: Intensity::Finite(llr_update(prims, y)),
        },
    }
}

/// Entropic certainty equivalent of a Bernoulli model with success
/// probability `theta` over the binary profile `(x0, x1)`.
pub fn g_bernoulli(theta: f64, x0: f64, x1: f64, lambda: Intensity) -> f64 {
    match lambda {
        Intensity::Zero => (1.0 - theta) * x0 + theta * x1,
        Intensity::Infinite => x0.min(x1),
        Intensity::Finite(l) => {
            let m = x0.min(x1);
            let s = (1.0 - theta) * (-l * (x0 - m)).exp() + theta * (-l * (x1 - m)).exp();
            m - s.ln() / l
        }
    }
}

/// Prior-weighted innovation value `G(x; mu, lambda)` at a binary state.
pub fn g_mix(prims: &DynamicPrimitives, state: &RobustnessState, x0: f64, x1: f64) -> f64 {
    state.m_high * g_bernoulli(prims.theta_h, x0, x1, state.lambda)
        + (1.0 - state.m_high) * g_bernoulli(prims.theta_l, x0, x1, state.lambda)
}

/// Incentive gap `M(mu, lambda; x) = G(x; mu, lambda) - g_q1(x; lambda)`.
/// Translation-invariant in `x`.
pub fn incentive_gap(
    state: &RobustnessState,
    prims: &DynamicPrimitives,
    x: &[f64],
) -> Result<f64, CoreError> {
    if x.len() != 2 {
        return Err(CoreError::invalid("incentive gap needs a binary profile"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::invalid("profile entries must be finite"));
    }
    Ok(g_mix(prims, state, x[0], x[1]) - g_bernoulli(prims.p, x[0], x[1], state.lambda))
}

/// The intensity-free capacity numerator and its decomposition.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KappaReport {
    /// `sup_w Phi(w)` where `C(mu, lambda) = sup / lambda`.
    pub sup: f64,
    /// Limit of `Phi` as the spread goes to `+inf`.
    pub boundary_plus: f64,
    /// Limit as the spread goes to `-inf`.
    pub boundary_minus: f64,
    /// Interior maximizer, when the interior strictly beats both limits.
    pub interior_arg: Option<f64>,
}

fn phi(p: f64, theta_l: f64, theta_h: f64, m: f64, w: f64) -> f64 {
    let e = (-w).exp();
    let term = |th: f64| ((1.0 - th) + th * e).ln();
    term(p) - m * term(theta_h) - (1.0 - m) * term(theta_l)
}

/// `kappa(mu) = sup_w Phi(w)`: golden-section over the interior box
/// `w in [-50, 50]` (spread `50 / lambda` in utility units) compared against
/// the two analytic boundary limits.
pub fn capacity_kappa(prims: &DynamicPrimitives, m_high: f64) -> KappaReport {
    let b_plus = m_high * ((1.0 - prims.p) / (1.0 - prims.theta_h)).ln()
        + (1.0 - m_high) * ((1.0 - prims.p) / (1.0 - prims.theta_l)).ln();
    let b_minus = m_high * (prims.p / prims.theta_h).ln()
        + (1.0 - m_high) * (prims.p / prims.theta_l).ln();
    let f = |w: f64| phi(prims.p, prims.theta_l, prims.theta_h, m_high, w);
    let (arg, interior) = scan_golden_max(f, -50.0, 50.0, 201, 1e-10);
    let boundary_best = b_plus.max(b_minus);
    if interior > boundary_best {
        KappaReport {
            sup: interior,
            boundary_plus: b_plus,
            boundary_minus: b_minus,
            interior_arg: Some(arg),
        }
    } else {
        KappaReport {
            sup: boundary_best,
            boundary_plus: b_plus,
            boundary_minus: b_minus,
            interior_arg: None,
        }
    }
}

/// Incentive capacity at a state, `sup_x M(mu, lambda; x)`, with an
/// attainment flag.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CapacityReport {
    /// `C(mu, lambda)`; `+inf` at the expected-utility endpoint when the
    /// posterior mean success rate differs from `p`.
    pub value: f64,
    /// Whether the supremum is attained at a finite spread: true only when
    /// the interior maximum beats both boundary limits by 1e-9.
    pub attained: bool,
    /// Maximizing spread `zeta = x(1) - x(0)` when attained.
    pub spread: Option<f64>,
}

/// Mean success probability of the innovation roadmap at posterior `m`.
pub fn theta_bar(prims: &DynamicPrimitives, m_high: f64) -> f64 {
    m_high * prims.theta_h + (1.0 - m_high) * prims.theta_l
}

pub fn incentive_capacity(
    state: &RobustnessState,
    prims: &DynamicPrimitives,
) -> Result<CapacityReport, CoreError> {
    if !(0.0..=1.0).contains(&state.m_high) {
        return Err(CoreError::invalid("posterior weight out of [0,1]"));
    }
    match state.lambda {
        Intensity::Zero => {
            // Expected-utility benchmark: the gap is (theta_bar - p) * zeta.
            let tb = theta_bar(prims, state.m_high);
            if (tb - prims.p).abs() < 1e-14 {
                Ok(CapacityReport {
                    value: 0.0,
                    attained: true,
                    spread: Some(0.0),
                })
            } else {
                Ok(CapacityReport {
                    value: f64::INFINITY,
                    attained: false,
                    spread: None,
                })
            }
        }
        Intensity::Infinite => {
            // Both valuations collapse to min(x); the gap is identically 0.
            Ok(CapacityReport {
                value: 0.0,
                attained: true,
                spread: Some(0.0),
            })
        }
        Intensity::Finite(l) => {
            let kr = capacity_kappa(prims, state.m_high);
            let boundary_best = kr.boundary_plus.max(kr.boundary_minus);
            let attained = kr.interior_arg.is_some() && (kr.sup - boundary_best) / l > 1e-9;
            Ok(CapacityReport {
                value: kr.sup / l,
                attained,
                spread: if attained {
                    kr.interior_arg.map(|w| w / l)
                } else {
                    None
                },
            })
        }
    }
}

/// How the post-success intensity compares with the trap threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdRelation {
    /// `lambda_2(1) > lambda*`: the trap mechanism can bind.
    Above,
    /// `lambda_2(1) < lambda*`.
    Below,
    /// Knife edge `lambda_2(1) = lambda*`; no verdict is implied.
    Boundary,
}

/// Breakthrough-trap diagnostic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrapReport {
    /// `lambda* = (1/k) log((1-p)/(1-theta_h))`.
    pub lambda_star: f64,
    /// Post-success intensity `lambda_2(1)`; zero in the expected-utility
    /// benchmark.
    pub lambda_success: f64,
    pub lambda_failure: f64,
    pub post_success_state: RobustnessState,
    /// `C(mu_2(.|1), lambda_2(1))`; may be `+inf`.
    pub post_success_capacity: f64,
    /// The trap verdict `C < k`.
    pub trap: bool,
    pub threshold_relation: ThresholdRelation,
    /// The threshold and its footnote rewriting
    /// `k log(1/theta_h) > gamma log((1-p)/(1-theta_h))` must agree.
    pub condition_forms_agree: bool,
    /// When `lambda_2(1) > lambda*`: a `theta_l` level below which the trap
    /// holds (bisected to 1e-6), per the existence claim.
    pub theta_l_bar: Option<f64>,
}

/// Computes the trap threshold, the post-success state and capacity, the
/// trap verdict, and (when the threshold condition holds) a certificate
/// level for `theta_l`.
pub fn trap_check(prims: &DynamicPrimitives) -> Result<TrapReport, CoreError> {
    prims.validate()?;
    let lambda_star = ((1.0 - prims.p) / (1.0 - prims.theta_h)).ln() / prims.k;
    let eu_benchmark = matches!(prims.lambda1, Intensity::Zero);
    let lambda_success = if eu_benchmark { 0.0 } else { llr_update(prims, 1) };
    let lambda_failure = if eu_benchmark { 0.0 } else { llr_update(prims, 0) };
    let post = post_outcome_state(prims, 1);
    let cap = incentive_capacity(&post, prims)?;
    let trap = cap.value < prims.k;

    let rel = if eu_benchmark {
        ThresholdRelation::Below
    } else {
        let d = lambda_success - lambda_star;
        if d.abs() <= 1e-12 * (1.0 + lambda_star.abs()) {
            ThresholdRelation::Boundary
        } else if d > 0.0 {
            ThresholdRelation::Above
        } else {
            ThresholdRelation::Below
        }
    };

    // Footnote form of the same condition.
    let lhs = prims.k * (1.0 / prims.theta_h).ln();
    let rhs = prims.gamma * ((1.0 - prims.p) / (1.0 - prims.theta_h)).ln();
    let footnote_above = lhs > rhs;
    let condition_forms_agree = match rel {
        ThresholdRelation::Above => footnote_above,
        ThresholdRelation::Below => eu_benchmark || !footnote_above,
        ThresholdRelation::Boundary => true,
    };

    let theta_l_bar = if rel == ThresholdRelation::Above && !eu_benchmark {
        Some(trap_certificate(prims, lambda_success)?)
    } else {
        None
    };

    Ok(TrapReport {
        lambda_star,
        lambda_success,
        lambda_failure,
        post_success_state: post,
        post_success_capacity: cap.value,
        trap,
        threshold_relation: rel,
        condition_forms_agree,
        theta_l_bar,
    })
}

/// Capacity at the post-success state if `theta_l` were replaced (posterior
/// recomputed, `lambda_2(1)` unchanged since it depends only on `theta_h`).
fn post_success_capacity_at(
    prims: &DynamicPrimitives,
    lambda_success: f64,
    theta_l: f64,
) -> Result<f64, CoreError> {
    let mut p2 = prims.clone();
    p2.theta_l = theta_l;
    let state = RobustnessState {
        m_high: bayes_update(&p2, p2.m, 1),
        lambda: Intensity::Finite(lambda_success),
    };
    Ok(incentive_capacity(&state, &p2)?.value)
}

/// Largest `theta_l` below which the post-success trap holds, found by
/// geometric scan plus bisection to 1e-6. Returns `p` when the trap holds
/// for every tested level.
fn trap_certificate(prims: &DynamicPrimitives, lambda_success: f64) -> Result<f64, CoreError> {
    let g = |tl: f64| -> Result<f64, CoreError> {
        Ok(post_success_capacity_at(prims, lambda_success, tl)? - prims.k)
    };
    let hi = prims.p * (1.0 - 1e-9);
    if g(hi)? < 0.0 {
        return Ok(prims.p);
    }
    // Scan down geometrically until the trap holds.
    let mut lo = hi;
    for _ in 0..120 {
        lo *= 0.5;
        if g(lo)? < 0.0 {
            break;
        }
    }
    if g(lo)? >= 0.0 {
        // No trap found even at tiny theta_l; should not happen when
        // lambda_2(1) > lambda*, but report the smallest tested level.
        return Ok(lo);
    }
    let root = bisect_root(
        |tl| g(tl).expect("validated primitives"),
        lo,
        lo * 2.0,
        1e-6,
    );
    Ok(root)
}
