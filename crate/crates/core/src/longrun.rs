//! Infinite-horizon machinery: seeded path simulation under a true outcome
//! process, the log-likelihood-ratio misspecification statistic, intensity
//! updating rules, truncated value recursions with contraction bounds, the
//! frozen-state limit recursion, and the long-run innovation speed limit.
//!
//! The global structured models share the known safe component, so Bayesian
//! learning concerns only the innovation arm and the posterior is a function
//! of the innovation outcome counts. The LLR statistic compares the best
//! structured model against the per-action empirical maximum likelihood
//! (closed form from outcome frequencies with `0 log 0 = 0`). A
//! statistically sophisticated agent sets `lambda_t = LLR / (gamma t)`;
//! lenient and demanding harness rules damp or amplify that by a `log t`
//! envelope, driving `lambda_t` to `0` or `+inf` on misspecified paths.
//!
//! Value recursions run by backward induction on the contingency tree,
//! collapsed to outcome-count levels (the built-in contracts and state
//! rules are functions of the count statistic), with the a-priori
//! truncation bound `delta^(T+1-t) * (xbar + k) / (1 - delta)`.
//!
//! The speed limit `alpha* = (gamma / D*) * max_{best fit} lambda_bar_k(q)`
//! caps the long-run innovation share; the capacity-gated policy (innovate
//! iff `C(mu_t, lambda_t) >= k`) operationalizes the mechanism and is the
//! canonical path generator for probing it.

use crate::dynamic_contract::ActionKind;
use crate::dynamics_state::{
    capacity_kappa, g_bernoulli, g_mix, DynamicPrimitives, RobustnessState,
};
use crate::entropic::Intensity;
use crate::error::CoreError;
use crate::rng::CounterRng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// True outcome process: success probabilities per action, iid over time
/// conditional on actions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrueProcess {
    pub safe_success: f64,
    pub innovate_success: f64,
}

impl TrueProcess {
    pub fn validate(&self) -> Result<(), CoreError> {
        for v in [self.safe_success, self.innovate_success] {
            if !(v > 0.0 && v < 1.0) {
                return Err(CoreError::invalid("true success probabilities must be in (0,1)"));
            }
        }
        Ok(())
    }

    fn success(&self, a: ActionKind) -> f64 {
        match a {
            ActionKind::Safe => self.safe_success,
            ActionKind::Innovate => self.innovate_success,
        }
    }
}

/// Sufficient statistic of a private history: counts of (action, outcome)
/// pairs, `n[action][outcome]` with action 0 = safe, 1 = innovate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub n: [[u64; 2]; 2],
}

fn aidx(a: ActionKind) -> usize {
    match a {
        ActionKind::Safe => 0,
        ActionKind::Innovate => 1,
    }
}

impl Counts {
    pub fn add(&mut self, a: ActionKind, y: usize) {
        self.n[aidx(a)][y] += 1;
    }

    pub fn total(&self) -> u64 {
        self.n.iter().flatten().sum()
    }

    pub fn innovations(&self) -> u64 {
        self.n[1][0] + self.n[1][1]
    }
}

/// Append-only record of (action, outcome) steps.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PrivateHistory {
    pub steps: Vec<(ActionKind, usize)>,
}

impl PrivateHistory {
    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for (a, y) in &self.steps {
            c.add(*a, *y);
        }
        c
    }
}

/// Posterior weight on the optimistic model given innovation counts
/// (safe steps carry a likelihood common to all structured models).
pub fn posterior_m(prims: &DynamicPrimitives, counts: &Counts) -> f64 {
    let d = counts.n[1][0] as f64 * ((1.0 - prims.theta_h) / (1.0 - prims.theta_l)).ln()
        + counts.n[1][1] as f64 * (prims.theta_h / prims.theta_l).ln();
    1.0 / (1.0 + ((1.0 - prims.m) / prims.m) * (-d).exp())
}

fn empirical_loglik(n: &[u64; 2]) -> f64 {
    let tot = (n[0] + n[1]) as f64;
    let mut ll = 0.0;
    for &c in n {
        if c > 0 {
            ll += c as f64 * ((c as f64 / tot).ln());
        }
    }
    ll
}

/// LLR contribution of the innovation arm: empirical maximum likelihood
/// minus the best structured model's likelihood.
pub fn innovation_llr(prims: &DynamicPrimitives, counts: &Counts) -> f64 {
    let n = &counts.n[1];
    if n[0] + n[1] == 0 {
        return 0.0;
    }
    let structured = |theta: f64| n[0] as f64 * (1.0 - theta).ln() + n[1] as f64 * theta.ln();
    let best = structured(prims.theta_l).max(structured(prims.theta_h));
    (empirical_loglik(n) - best).max(0.0)
}

/// The full log-likelihood-ratio statistic against all unstructured
/// action-indexed alternatives:
/// `-log( max_q prod q_{a_t}(y_t) / max_p prod p_{a_t}(y_t) )`, evaluated in
/// closed form from per-action empirical frequencies. Every structured
/// model shares the safe component, so the safe arm contributes its
/// empirical-vs-`p` mismatch.
pub fn llr_statistic(prims: &DynamicPrimitives, counts: &Counts) -> f64 {
    let safe = &counts.n[0];
    let safe_part = if safe[0] + safe[1] == 0 {
        0.0
    } else {
        let structured = safe[0] as f64 * (1.0 - prims.p).ln() + safe[1] as f64 * prims.p.ln();
        (empirical_loglik(safe) - structured).max(0.0)
    };
    safe_part + innovation_llr(prims, counts)
}

/// Intensity updating rule.
///
/// The sophisticated rule is the average LLR, `lambda_t = LLR / (gamma t)`.
/// The lenient and demanding harness rules scale it by a `1 + log(1 + t)`
/// envelope (down or up), so on misspecified paths they drive the intensity
/// to `0` and `+inf` respectively. The rule consumes the innovation
/// component of the LLR: the safe arm is known, so safe steps generate no
/// misspecification evidence and an all-safe path keeps the intensity
/// constant.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LambdaRule {
    Sophisticated { gamma: f64 },
    Lenient { gamma: f64 },
    Demanding { gamma: f64 },
}

impl LambdaRule {
    pub fn validate(&self) -> Result<(), CoreError> {
        let g = match self {
            LambdaRule::Sophisticated { gamma }
            | LambdaRule::Lenient { gamma }
            | LambdaRule::Demanding { gamma } => *gamma,
        };
        if g.is_finite() && g > 0.0 {
            Ok(())
        } else {
            Err(CoreError::invalid("lambda rule needs gamma > 0"))
        }
    }

    /// Raw intensity at date `t >= 1` given the accumulated innovation LLR.
    pub fn value(&self, llr: f64, t: usize) -> f64 {
        let t = t as f64;
        match self {
            LambdaRule::Sophisticated { gamma } => llr / (gamma * t),
            LambdaRule::Lenient { gamma } => llr / (gamma * t * (1.0 + t.ln_1p())),
            LambdaRule::Demanding { gamma } => llr * (1.0 + t.ln_1p()) / (gamma * t),
        }
    }

    pub fn state_at(
        &self,
        prims: &DynamicPrimitives,
        counts: &Counts,
        t: usize,
    ) -> Result<RobustnessState, CoreError> {
        Ok(RobustnessState {
            m_high: posterior_m(prims, counts),
            lambda: Intensity::from_raw(self.value(innovation_llr(prims, counts), t))?,
        })
    }
}

/// Path policy mapping the current state to an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    AlwaysSafe,
    AlwaysInnovate,
    /// Innovate iff the current incentive capacity covers the innovation
    /// cost. A constructive stand-in for equilibrium paths on which
    /// innovation occurs whenever it is contractible.
    CapacityGated,
}

impl Policy {
    fn decide(
        &self,
        prims: &DynamicPrimitives,
        state: &RobustnessState,
        kappa_cache: &mut HashMap<u64, f64>,
    ) -> Result<ActionKind, CoreError> {
        Ok(match self {
            Policy::AlwaysSafe => ActionKind::Safe,
            Policy::AlwaysInnovate => ActionKind::Innovate,
            Policy::CapacityGated => match state.lambda {
                // No accumulated evidence (LLR = 0). The gate uses the
                // vanishing-intensity limit of capacity, kappa(mu)/lambda ->
                // +inf (kappa > 0 whenever theta_l < p < theta_h), rather
                // than the expected-utility endpoint case split, so it stays
                // well-defined on knife-edge priors with theta_bar = p.
                Intensity::Zero => ActionKind::Innovate,
                Intensity::Infinite => ActionKind::Safe,
                Intensity::Finite(l) => {
                    // C(mu, lambda) = kappa(mu) / lambda; cache kappa by the
                    // quantized posterior (it is intensity-free).
                    let key = (state.m_high * 1e12).round() as u64;
                    let kappa = *kappa_cache
                        .entry(key)
                        .or_insert_with(|| capacity_kappa(prims, state.m_high).sup);
                    if kappa >= prims.k * l {
                        ActionKind::Innovate
                    } else {
                        ActionKind::Safe
                    }
                }
            },
        })
    }
}

/// One simulated step.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub action: ActionKind,
    pub outcome: usize,
    /// Posterior weight on the optimistic model entering the step.
    pub m_high: f64,
    /// Intensity entering the step (raw value; 0 at the endpoint).
    pub lambda: f64,
    /// Running innovation share through this step.
    pub alpha: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub steps: Vec<StepRecord>,
    pub counts: Counts,
    pub final_m: f64,
    pub final_lambda: f64,
    pub final_alpha: f64,
}

/// Simulates `horizon` steps under the policy and updating rule, drawing
/// outcomes from the true process. Fully deterministic given the seed: the
/// draw at date `t` is output `t` of the seeded counter stream.
pub fn simulate_path(
    prims: &DynamicPrimitives,
    process: &TrueProcess,
    policy: Policy,
    rule: &LambdaRule,
    horizon: usize,
    seed: u64,
) -> Result<Trajectory, CoreError> {
    prims.validate()?;
    process.validate()?;
    rule.validate()?;
    if horizon == 0 {
        return Err(CoreError::invalid("horizon must be at least 1"));
    }
    let mut counts = Counts::default();
    let mut steps = Vec::with_capacity(horizon);
    let mut kappa_cache = HashMap::new();
    let mut innovations = 0u64;
    for t in 1..=horizon {
        let state = rule.state_at(prims, &counts, t)?;
        let action = policy.decide(prims, &state, &mut kappa_cache)?;
        let u = (CounterRng::at(seed, t as u64) >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let y = usize::from(u < process.success(action));
        if action == ActionKind::Innovate {
            innovations += 1;
        }
        counts.add(action, y);
        steps.push(StepRecord {
            t,
            action,
            outcome: y,
            m_high: state.m_high,
            lambda: match state.lambda {
                Intensity::Zero => 0.0,
                Intensity::Finite(l) => l,
                Intensity::Infinite => f64::INFINITY,
            },
            alpha: innovations as f64 / t as f64,
        });
    }
    let final_state = rule.state_at(prims, &counts, horizon + 1)?;
    Ok(Trajectory {
        seed,
        steps,
        counts,
        final_m: final_state.m_high,
        final_lambda: rule.value(innovation_llr(prims, &counts), horizon + 1),
        final_alpha: innovations as f64 / horizon as f64,
    })
}

/// Components of the innovation speed limit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpeedLimitReport {
    /// Best-fit KL discrepancy of the innovation roadmap,
    /// `min_q KL(p*_2 || q)`.
    pub d_star: f64,
    /// Models attaining the minimum ("low", "high").
    pub best_fit: Vec<String>,
    /// `(1/k) log((1-p)/(1-theta_h))`.
    pub lambda_bar_high: f64,
    /// `(1/k) log(p/theta_l)`.
    pub lambda_bar_low: f64,
    /// `(gamma / D*) max over best fits`; `+inf` when correctly specified.
    pub alpha_star: f64,
    pub correctly_specified: bool,
}

fn bernoulli_kl(p: f64, q: f64) -> f64 {
    p * (p / q).ln() + (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln()
}

/// The long-run bound on the innovation share and its ingredients.
pub fn speed_limit(
    prims: &DynamicPrimitives,
    process: &TrueProcess,
) -> Result<SpeedLimitReport, CoreError> {
    prims.validate()?;
    process.validate()?;
    let kl_l = bernoulli_kl(process.innovate_success, prims.theta_l);
    let kl_h = bernoulli_kl(process.innovate_success, prims.theta_h);
    let d_star = kl_l.min(kl_h);
    let lambda_bar_high = ((1.0 - prims.p) / (1.0 - prims.theta_h)).ln() / prims.k;
    let lambda_bar_low = (prims.p / prims.theta_l).ln() / prims.k;
    let mut best_fit = Vec::new();
    let mut bound = f64::NEG_INFINITY;
    if kl_l <= d_star + 1e-15 {
        best_fit.push("low".to_string());
        bound = bound.max(lambda_bar_low);
    }
    if kl_h <= d_star + 1e-15 {
        best_fit.push("high".to_string());
        bound = bound.max(lambda_bar_high);
    }
    let correctly_specified = d_star <= 1e-15;
    let alpha_star = if correctly_specified {
        f64::INFINITY
    } else {
        prims.gamma * bound / d_star
    };
    Ok(SpeedLimitReport {
        d_star,
        best_fit,
        lambda_bar_high,
        lambda_bar_low,
        alpha_star,
        correctly_specified,
    })
}

/// Final-state summary of one gated-policy path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub final_alpha: f64,
    pub final_lambda: f64,
    pub final_m: f64,
    pub n_innovate: u64,
    pub n_safe: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleReport {
    pub speed_limit: SpeedLimitReport,
    pub per_seed: Vec<SeedSummary>,
    pub max_final_alpha: f64,
    /// Label of the path generator; the gated policy stands in for
    /// equilibrium paths, it does not construct one.
    pub policy: Policy,
}

/// Runs the policy over a fixed seed set and aggregates realized innovation
/// shares against the speed limit.
pub fn cycle_experiment(
    prims: &DynamicPrimitives,
    process: &TrueProcess,
    policy: Policy,
    rule: &LambdaRule,
    horizon: usize,
    seeds: &[u64],
) -> Result<CycleReport, CoreError> {
    if seeds.is_empty() {
        return Err(CoreError::invalid("need at least one seed"));
    }
    let sl = speed_limit(prims, process)?;
    let mut per_seed = Vec::with_capacity(seeds.len());
    let mut max_alpha: f64 = 0.0;
    for &seed in seeds {
        let traj = simulate_path(prims, process, policy, rule, horizon, seed)?;
        max_alpha = max_alpha.max(traj.final_alpha);
        per_seed.push(SeedSummary {
            seed,
            final_alpha: traj.final_alpha,
            final_lambda: traj.final_lambda,
            final_m: traj.final_m,
            n_innovate: traj.counts.innovations(),
            n_safe: traj.counts.n[0][0] + traj.counts.n[0][1],
        });
    }
    Ok(CycleReport {
        speed_limit: sl,
        per_seed,
        max_final_alpha: max_alpha,
        policy,
    })
}

/// Outcome-contingent wage schedules usable at infinite horizon; all are
/// uniformly bounded by construction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InfiniteContract {
    Zero,
    Constant { level: f64 },
    SuccessBonus { base: f64, bonus: f64 },
}

impl InfiniteContract {
    pub fn validate(&self) -> Result<(), CoreError> {
        let ok = match self {
            InfiniteContract::Zero => true,
            InfiniteContract::Constant { level } => level.is_finite(),
            InfiniteContract::SuccessBonus { base, bonus } => {
                base.is_finite() && bonus.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(CoreError::invalid("contract parameters must be finite"))
        }
    }

    pub fn pay(&self, y: usize) -> f64 {
        match self {
            InfiniteContract::Zero => 0.0,
            InfiniteContract::Constant { level } => *level,
            InfiniteContract::SuccessBonus { base, bonus } => {
                base + if y == 1 { *bonus } else { 0.0 }
            }
        }
    }

    /// Sup-norm bound on the payments.
    pub fn bound(&self) -> f64 {
        match self {
            InfiniteContract::Zero => 0.0,
            InfiniteContract::Constant { level } => level.abs(),
            InfiniteContract::SuccessBonus { base, bonus } => {
                base.abs().max((base + bonus).abs())
            }
        }
    }
}

/// Result of a truncated value recursion at one root.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecursionResult {
    /// `W_t^T` at the root.
    pub w_root: f64,
    /// Uniform value bound `B = (xbar + k) / (1 - delta)`.
    pub value_bound: f64,
    /// A-priori truncation error bound `delta^(T+1-t) * B` at the root.
    pub truncation_bound: f64,
}

fn enumerate_level(j: usize) -> Vec<[u16; 4]> {
    let j = j as u16;
    let mut v = Vec::new();
    for a in 0..=j {
        for b in 0..=(j - a) {
            for c in 0..=(j - a - b) {
                v.push([a, b, c, j - a - b - c]);
            }
        }
    }
    v
}

/// Backward induction on outcome-count levels from `W_{T+1} = 0`; the state
/// at each node comes from `state_of(level, offset)`.
fn recursion_dp(
    prims: &DynamicPrimitives,
    contract: &InfiniteContract,
    delta: f64,
    levels: usize,
    state_of: &dyn Fn(usize, &[u16; 4]) -> RobustnessState,
) -> f64 {
    let pay = [contract.pay(0), contract.pay(1)];
    // Level `levels` is the terminal W = 0 layer.
    let mut next_nodes = enumerate_level(levels);
    let mut next_index: HashMap<[u16; 4], u32> = next_nodes
        .iter()
        .enumerate()
        .map(|(i, o)| (*o, i as u32))
        .collect();
    let mut next_vals = vec![0.0; next_nodes.len()];

    for j in (0..levels).rev() {
        let nodes = enumerate_level(j);
        let mut vals = vec![0.0; nodes.len()];
        for (i, off) in nodes.iter().enumerate() {
            let st = state_of(j, off);
            let succ = |cell: usize| -> f64 {
                let mut o = *off;
                o[cell] += 1;
                next_vals[next_index[&o] as usize]
            };
            // Cells: [safe-fail, safe-success, innovate-fail, innovate-success].
            let v_safe = g_bernoulli(
                prims.p,
                pay[0] + delta * succ(0),
                pay[1] + delta * succ(1),
                st.lambda,
            );
            let v_innov = g_mix(
                prims,
                &st,
                pay[0] + delta * succ(2),
                pay[1] + delta * succ(3),
            ) - prims.k;
            vals[i] = v_safe.max(v_innov);
        }
        next_nodes = nodes;
        next_index = next_nodes
            .iter()
            .enumerate()
            .map(|(i, o)| (*o, i as u32))
            .collect();
        next_vals = vals;
    }
    next_vals[0]
}

fn recursion_guard(
    prims: &DynamicPrimitives,
    contract: &InfiniteContract,
    delta: f64,
    root_t: usize,
    horizon: usize,
) -> Result<usize, CoreError> {
    prims.validate()?;
    contract.validate()?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CoreError::invalid("recursion needs delta in (0,1)"));
    }
    if root_t == 0 || horizon < root_t {
        return Err(CoreError::invalid("need 1 <= root_t <= horizon"));
    }
    Ok(horizon + 1 - root_t)
}

/// Truncated continuation value `W_t^T` at a root private history (given by
/// its counts and date) with the state evolving by Bayes and the lambda
/// rule along every contingency.
pub fn value_recursion(
    prims: &DynamicPrimitives,
    rule: &LambdaRule,
    contract: &InfiniteContract,
    root: &Counts,
    root_t: usize,
    horizon: usize,
    delta: f64,
) -> Result<RecursionResult, CoreError> {
    let levels = recursion_guard(prims, contract, delta, root_t, horizon)?;
    rule.validate()?;
    let state_of = |j: usize, off: &[u16; 4]| -> RobustnessState {
        let mut c = *root;
        c.n[0][0] += off[0] as u64;
        c.n[0][1] += off[1] as u64;
        c.n[1][0] += off[2] as u64;
        c.n[1][1] += off[3] as u64;
        rule.state_at(prims, &c, root_t + j)
            .expect("validated rule and counts")
    };
    let w = recursion_dp(prims, contract, delta, levels, &state_of);
    let b = (contract.bound() + prims.k) / (1.0 - delta);
    Ok(RecursionResult {
        w_root: w,
        value_bound: b,
        truncation_bound: delta.powi(levels as i32) * b,
    })
}

/// Truncated value under the frozen limiting operator at `(m_inf,
/// lambda_inf)`; endpoints are legal (`lambda = +inf` collapses both
/// operators to the worst case).
pub fn limit_recursion(
    prims: &DynamicPrimitives,
    m_inf: f64,
    lambda_inf: Intensity,
    contract: &InfiniteContract,
    root_t: usize,
    horizon: usize,
    delta: f64,
) -> Result<RecursionResult, CoreError> {
    let levels = recursion_guard(prims, contract, delta, root_t, horizon)?;
    if !(0.0..=1.0).contains(&m_inf) {
        return Err(CoreError::invalid("limit posterior out of [0,1]"));
    }
    let frozen = RobustnessState {
        m_high: m_inf,
        lambda: lambda_inf,
    };
    let state_of = move |_: usize, _: &[u16; 4]| frozen;
    let w = recursion_dp(prims, contract, delta, levels, &state_of);
    let b = (contract.bound() + prims.k) / (1.0 - delta);
    Ok(RecursionResult {
        w_root: w,
        value_bound: b,
        truncation_bound: delta.powi(levels as i32) * b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wage::WageMap;

    fn longrun_prims() -> DynamicPrimitives {
        DynamicPrimitives {
            p: 0.5,
            theta_l: 0.2,
            theta_h: 0.8,
            m: 0.5,
            k: 1.0,
            gamma: 1.0,
            a_scale: 2.0,
            delta: 1.0,
            u0: 0.0,
            lambda1: Intensity::Finite(0.5),
            hspec: WageMap::ExpPlusLinear,
        }
    }

    fn misspecified() -> TrueProcess {
        TrueProcess {
            safe_success: 0.5,
            innovate_success: 0.6,
        }
    }

    #[test]
    fn llr_closed_form_examples() {
        let prims = longrun_prims();
        // Empty history.
        assert_eq!(llr_statistic(&prims, &Counts::default()), 0.0);
        // Single innovation success: unstructured max is 1.
        let mut c = Counts::default();
        c.add(ActionKind::Innovate, 1);
        assert!((llr_statistic(&prims, &c) - 0.223_143_551_314_209_76).abs() < 1e-12);
        // Frequencies matching a structured model exactly: zero.
        let mut c = Counts::default();
        for _ in 0..2 {
            c.add(ActionKind::Safe, 1);
            c.add(ActionKind::Safe, 0);
        }
        c.add(ActionKind::Innovate, 1);
        for _ in 0..4 {
            c.add(ActionKind::Innovate, 0);
        }
        assert!(llr_statistic(&prims, &c).abs() < 1e-12);
        // Nonnegative on random histories.
        let mut rng = CounterRng::new(5);
        let mut c = Counts::default();
        for _ in 0..200 {
            let a = if rng.bernoulli(0.5) {
                ActionKind::Safe
            } else {
                ActionKind::Innovate
            };
            c.add(a, usize::from(rng.bernoulli(0.4)));
            assert!(llr_statistic(&prims, &c) >= 0.0);
        }
    }

    #[test]
    fn safe_paths_keep_state_constant() {
        let prims = longrun_prims();
        let rule = LambdaRule::Sophisticated { gamma: 1.0 };
        let traj = simulate_path(
            &prims,
            &misspecified(),
            Policy::AlwaysSafe,
            &rule,
            500,
            42,
        )
        .unwrap();
        for s in &traj.steps {
            assert_eq!(s.m_high, prims.m);
            assert_eq!(s.lambda, 0.0);
        }
    }

    #[test]
    fn correctly_specified_intensity_vanishes() {
        let prims = longrun_prims();
        let process = TrueProcess {
            safe_success: 0.5,
            innovate_success: 0.8,
        };
        let rule = LambdaRule::Sophisticated { gamma: 1.0 };
        let traj = simulate_path(&prims, &process, Policy::AlwaysInnovate, &rule, 20_000, 7)
            .unwrap();
        assert!(traj.final_lambda < 0.01, "{}", traj.final_lambda);
        // Posterior goes to the true model.
        assert!(traj.final_m > 0.99);
    }

    #[test]
    fn sophisticated_rate_and_posterior_concentration() {
        // Misspecified always-innovate path: lambda -> D*/gamma, posterior
        // concentrates on the KL minimizer (the optimistic model).
        let prims = longrun_prims();
        let rule = LambdaRule::Sophisticated { gamma: 1.0 };
        let traj = simulate_path(
            &prims,
            &misspecified(),
            Policy::AlwaysInnovate,
            &rule,
            50_000,
            3,
        )
        .unwrap();
        let d_star = 0.104_649_628_752_909_48;
        assert!(
            (traj.final_lambda - d_star).abs() < 0.02,
            "{}",
            traj.final_lambda
        );
        assert!(traj.final_m > 0.99, "{}", traj.final_m);
        // lambda_t equals LLR/(gamma t) exactly along the path.
        let c = traj.counts;
        let expect = innovation_llr(&prims, &c) / (1.0 * (traj.steps.len() as f64 + 1.0));
        assert!((traj.final_lambda - expect).abs() < 1e-15);
    }

    #[test]
    fn lenient_and_demanding_envelopes() {
        let prims = longrun_prims();
        let lenient = LambdaRule::Lenient { gamma: 1.0 };
        let demanding = LambdaRule::Demanding { gamma: 1.0 };
        let t_l = simulate_path(&prims, &misspecified(), Policy::AlwaysInnovate, &lenient, 50_000, 3)
            .unwrap();
        let t_d = simulate_path(
            &prims,
            &misspecified(),
            Policy::AlwaysInnovate,
            &demanding,
            50_000,
            3,
        )
        .unwrap();
        // Lenient decays toward zero; demanding grows past any fixed level.
        assert!(t_l.final_lambda < 0.02, "{}", t_l.final_lambda);
        assert!(t_d.final_lambda > 1.0, "{}", t_d.final_lambda);
        let mid_l = t_l.steps[999].lambda;
        assert!(t_l.final_lambda < mid_l);
        let mid_d = t_d.steps[999].lambda;
        assert!(t_d.final_lambda > mid_d);
    }

    #[test]
    fn determinism_across_replays() {
        let prims = longrun_prims();
        let rule = LambdaRule::Sophisticated { gamma: 1.0 };
        let a = simulate_path(&prims, &misspecified(), Policy::CapacityGated, &rule, 2_000, 11)
            .unwrap();
        let b = simulate_path(&prims, &misspecified(), Policy::CapacityGated, &rule, 2_000, 11)
            .unwrap();
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.final_alpha, b.final_alpha);
        for (x, y) in a.steps.iter().zip(&b.steps) {
            assert_eq!(x.outcome, y.outcome);
            assert_eq!(x.action, y.action);
        }
    }

    #[test]
    fn speed_limit_formula() {
        let mut prims = longrun_prims();
        prims.gamma = 0.05;
        let rep = speed_limit(&prims, &misspecified()).unwrap();
        assert!((rep.d_star - 0.104_649_628_752_909_48).abs() < 1e-15);
        assert_eq!(rep.best_fit, vec!["high".to_string()]);
        assert!((rep.lambda_bar_high - 2.5f64.ln()).abs() < 1e-15);
        assert!((rep.alpha_star - 0.437_789_767_050_979_83).abs() < 1e-12);
        // Doubling gamma doubles the limit.
        let mut p2 = prims.clone();
        p2.gamma = 0.1;
        let rep2 = speed_limit(&p2, &misspecified()).unwrap();
        assert!((rep2.alpha_star - 2.0 * rep.alpha_star).abs() < 1e-12);
        // Correctly specified: unbounded.
        let rep3 = speed_limit(
            &prims,
            &TrueProcess {
                safe_success: 0.5,
                innovate_success: 0.2,
            },
        )
        .unwrap();
        assert!(rep3.correctly_specified);
        assert!(rep3.alpha_star.is_infinite());
    }

    #[test]
    fn gated_policy_respects_speed_limit() {
        // Short version of the acceptance probe: 4 seeds, T = 20000.
        let mut prims = longrun_prims();
        prims.gamma = 0.05;
        let rule = LambdaRule::Sophisticated { gamma: 0.05 };
        let rep = cycle_experiment(
            &prims,
            &misspecified(),
            Policy::CapacityGated,
            &rule,
            20_000,
            &[1, 2, 3, 4],
        )
        .unwrap();
        let alpha_star = rep.speed_limit.alpha_star;
        for s in &rep.per_seed {
            assert!(
                s.final_alpha <= alpha_star + 0.05,
                "seed {}: {} vs {}",
                s.seed,
                s.final_alpha,
                alpha_star
            );
            assert!(s.n_innovate > 200 && s.n_safe > 200);
        }
    }

    #[test]
    fn posterior_odds_bound_dominates_tree_deviation() {
        // Local stability of the posterior over all depth-N contingency
        // extensions, against the K^N odds bound.
        let prims = longrun_prims();
        let rule = LambdaRule::Sophisticated { gamma: 1.0 };
        let traj = simulate_path(&prims, &misspecified(), Policy::AlwaysInnovate, &rule, 2_000, 9)
            .unwrap();
        let root = traj.counts;
        let t = 2_001usize;
        let m_root = posterior_m(&prims, &root);
        let n = 5;
        let k_ratio: f64 = (prims.theta_h / prims.theta_l)
            .max((1.0 - prims.theta_l) / (1.0 - prims.theta_h));
        let bound = 2.0 * k_ratio.powi(n as i32) * (1.0 - m_root) / m_root;
        // Walk every (action, outcome) extension of depth n.
        let mut worst: f64 = 0.0;
        let cells = [
            (ActionKind::Safe, 0),
            (ActionKind::Safe, 1),
            (ActionKind::Innovate, 0),
            (ActionKind::Innovate, 1),
        ];
        let mut stack = vec![(root, 0usize)];
        while let Some((c, depth)) = stack.pop() {
            if depth == n {
                let m = posterior_m(&prims, &c);
                worst = worst.max(2.0 * (1.0 - m));
                continue;
            }
            for (a, y) in cells {
                let mut c2 = c;
                c2.add(a, y);
                stack.push((c2, depth + 1));
            }
        }
        assert!(
            worst <= bound,
            "tree deviation {worst} exceeds odds bound {bound}"
        );

        // LLR local stability over the same extensions: measured deviation
        // of the normalized statistic within B (1 + log(t+N)) / t.
        let q_min = [
            prims.p,
            1.0 - prims.p,
            prims.theta_l,
            1.0 - prims.theta_l,
            prims.theta_h,
            1.0 - prims.theta_h,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
        let b_const = n as f64 * (1.0 + 3.0 * (1.0 / q_min).ln());
        let llr_root = llr_statistic(&prims, &root) / t as f64;
        let llr_bound = b_const * (1.0 + ((t + n) as f64).ln()) / t as f64;
        let mut stack = vec![(root, 0usize)];
        while let Some((c, depth)) = stack.pop() {
            if depth == n {
                let v = llr_statistic(&prims, &c) / (t + n) as f64;
                assert!(
                    (v - llr_root).abs() <= llr_bound,
                    "LLR deviation {} exceeds {llr_bound}",
                    (v - llr_root).abs()
                );
                continue;
            }
            for (a, y) in cells {
                let mut c2 = c;
                c2.add(a, y);
                stack.push((c2, depth + 1));
            }
        }
    }

    #[test]
    fn zero_and_constant_contract_recursions() {
        let prims = longrun_prims();
        let rule = LambdaRule::Sophisticated { gamma: 1.0 };
        // Zero contract: W identically zero (safe action, no pay).
        let r = value_recursion(
            &prims,
            &rule,
            &InfiniteContract::Zero,
            &Counts::default(),
            1,
            30,
            0.9,
        )
        .unwrap();
        assert!(r.w_root.abs() < 1e-12);
        // Constant contract: geometric sum, states irrelevant.
        let xi = 0.7;
        let r = limit_recursion(
            &prims,
            0.5,
            Intensity::Finite(1.0),
            &InfiniteContract::Constant { level: xi },
            1,
            30,
            0.9,
        )
        .unwrap();
        let expect = xi * (1.0 - 0.9f64.powi(30)) / (1.0 - 0.9);
        assert!((r.w_root - expect).abs() < 1e-9, "{} vs {expect}", r.w_root);
    }

    #[test]
    fn truncation_gap_within_contraction_bound() {
        let mut prims = longrun_prims();
        prims.k = 0.1;
        let rule = LambdaRule::Sophisticated { gamma: 1.0 };
        let contract = InfiniteContract::SuccessBonus {
            base: 0.0,
            bonus: 1.0,
        };
        let root = Counts::default();
        let w20 = value_recursion(&prims, &rule, &contract, &root, 1, 20, 0.9).unwrap();
        let w40 = value_recursion(&prims, &rule, &contract, &root, 1, 40, 0.9).unwrap();
        assert!((w20.value_bound - 11.0).abs() < 1e-12);
        let gap = (w20.w_root - w40.w_root).abs();
        assert!(
            gap <= w20.truncation_bound + 1e-12,
            "gap {gap} vs bound {}",
            w20.truncation_bound
        );
        assert!((w20.truncation_bound - 11.0 * 0.9f64.powi(20)).abs() < 1e-12);
    }

    #[test]
    fn demanding_limit_operator_contracts() {
        // Frozen worst-case operator: recursion still well-defined and
        // bounded by the contraction constant.
        let prims = longrun_prims();
        let contract = InfiniteContract::SuccessBonus {
            base: 0.2,
            bonus: 0.5,
        };
        let r = limit_recursion(&prims, 0.9, Intensity::Infinite, &contract, 1, 40, 0.9)
            .unwrap();
        // Worst case pays the base every period under the safe action.
        let expect = 0.2 * (1.0 - 0.9f64.powi(40)) / (1.0 - 0.9);
        assert!((r.w_root - expect).abs() < 1e-9);
        assert!(r.w_root.abs() <= r.value_bound);
    }

    #[test]
    fn bridge_gap_shrinks_along_sophisticated_path() {
        // |W_t - W_t_inf| at simulated roots decreases across t on the
        // misspecified always-innovate path.
        let prims = longrun_prims();
        let rule = LambdaRule::Sophisticated { gamma: 1.0 };
        let contract = InfiniteContract::SuccessBonus {
            base: 0.0,
            bonus: 0.5,
        };
        let d_star = 0.104_649_628_752_909_48;
        let horizon_depth = 60;
        let mut gaps = Vec::new();
        for t in [100usize, 1_000, 10_000] {
            let traj = simulate_path(
                &prims,
                &misspecified(),
                Policy::AlwaysInnovate,
                &rule,
                t,
                21,
            )
            .unwrap();
            let root_t = t + 1;
            let w = value_recursion(
                &prims,
                &rule,
                &contract,
                &traj.counts,
                root_t,
                root_t + horizon_depth,
                0.9,
            )
            .unwrap();
            let w_inf = limit_recursion(
                &prims,
                1.0,
                Intensity::Finite(d_star),
                &contract,
                root_t,
                root_t + horizon_depth,
                0.9,
            )
            .unwrap();
            gaps.push((w.w_root - w_inf.w_root).abs());
        }
        assert!(
            gaps[0] > gaps[1] && gaps[1] > gaps[2],
            "gaps not decreasing: {gaps:?}"
        );
    }
}
