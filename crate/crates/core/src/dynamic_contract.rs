//! The two-period contracting game.
//!
//! A dynamic contract is a pair `(x1, x2)` of utility payments on the
//! period-1 outcome and on outcome pairs. An action plan `(a1, sigma2)`
//! prescribes the period-1 action and a continuation action per period-1
//! outcome. The agent's continuation value at a node reduces to
//! `max { g_q1(x; lambda), G(x; mu, lambda) - k }` (the joint minimization
//! over distortions decomposes model by model), ties broken toward
//! innovation; the period-1 choice compares the same one-step operators on
//! `x1 + delta * V2`.
//!
//! The solver exploits the optimal-contract structure: at innovation nodes
//! the local incentive gap binds (`M = k`), at safe nodes the continuation
//! is constant, the ex-ante value binds at the reservation utility, and what
//! remains is a three-variable search over the period-1 spread and the two
//! node levels. The principal's problem then reduces to comparing the eight
//! action plans.

use crate::dynamics_state::{
    g_bernoulli, g_mix, incentive_capacity, incentive_gap, post_outcome_state, theta_bar,
    DynamicPrimitives, RobustnessState,
};
use crate::entropic::Intensity;
use crate::error::CoreError;
use crate::opt::{bisect_root, nelder_mead};
use crate::rng::CounterRng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    Safe,
    Innovate,
}

/// Utility payments: `x1[y1]` in period 1 and `x2[y1][y2]` in period 2.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DynamicContract {
    pub x1: [f64; 2],
    pub x2: [[f64; 2]; 2],
}

impl DynamicContract {
    pub fn constant(level: f64) -> Self {
        DynamicContract {
            x1: [level, level],
            x2: [[level, level], [level, level]],
        }
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        let all_finite = self.x1.iter().all(|v| v.is_finite())
            && self.x2.iter().flatten().all(|v| v.is_finite());
        if all_finite {
            Ok(())
        } else {
            Err(CoreError::invalid("contract entries must be finite"))
        }
    }
}

/// `(a1, sigma2)`: period-1 action and continuation policy per outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionPlan {
    pub a1: ActionKind,
    /// Continuation action after `y1 = 0` and `y1 = 1`.
    pub sigma2: [ActionKind; 2],
}

impl ActionPlan {
    pub fn all() -> Vec<ActionPlan> {
        let acts = [ActionKind::Safe, ActionKind::Innovate];
        let mut out = Vec::with_capacity(8);
        for a1 in acts {
            for s0 in acts {
                for s1 in acts {
                    out.push(ActionPlan {
                        a1,
                        sigma2: [s0, s1],
                    });
                }
            }
        }
        out
    }

    pub const ALL_SAFE: ActionPlan = ActionPlan {
        a1: ActionKind::Safe,
        sigma2: [ActionKind::Safe, ActionKind::Safe],
    };
}

/// Node state at `t = 2` after outcome `y1`, under the plan's period-1
/// action: the posterior and intensity update only after innovation.
pub fn node_state(prims: &DynamicPrimitives, a1: ActionKind, y1: usize) -> RobustnessState {
    match a1 {
        ActionKind::Innovate => post_outcome_state(prims, y1),
        ActionKind::Safe => RobustnessState {
            m_high: prims.m,
            lambda: prims.lambda1,
        },
    }
}

/// One-step continuation value at a node and the maximizing action, ties
/// broken toward innovation.
pub fn continuation_value(
    prims: &DynamicPrimitives,
    state: &RobustnessState,
    x: &[f64],
) -> Result<(f64, ActionKind), CoreError> {
    if x.len() != 2 {
        return Err(CoreError::invalid("binary outcome node"));
    }
    let safe = g_bernoulli(prims.p, x[0], x[1], state.lambda);
    let innovate = g_mix(prims, state, x[0], x[1]) - prims.k;
    if innovate >= safe {
        Ok((innovate, ActionKind::Innovate))
    } else {
        Ok((safe, ActionKind::Safe))
    }
}

/// Continuation values of a contract at both nodes under the plan's
/// period-1 action.
fn v2_of(
    prims: &DynamicPrimitives,
    contract: &DynamicContract,
    a1: ActionKind,
) -> Result<[f64; 2], CoreError> {
    let mut v2 = [0.0; 2];
    for y1 in 0..2 {
        let st = node_state(prims, a1, y1);
        let (v, _) = continuation_value(prims, &st, &contract.x2[y1])?;
        v2[y1] = v;
    }
    Ok(v2)
}

/// First-period incentive gap of a contract:
/// `M(mu1, lambda1; x1 + delta * V2) - k`, nonnegative iff early innovation
/// is optimal. `V2` is evaluated at the innovation-updated node states.
pub fn first_period_gap(
    prims: &DynamicPrimitives,
    contract: &DynamicContract,
) -> Result<f64, CoreError> {
    contract.validate()?;
    let v2 = v2_of(prims, contract, ActionKind::Innovate)?;
    let z = [
        contract.x1[0] + prims.delta * v2[0],
        contract.x1[1] + prims.delta * v2[1],
    ];
    let st1 = RobustnessState {
        m_high: prims.m,
        lambda: prims.lambda1,
    };
    Ok(incentive_gap(&st1, prims, &z)? - prims.k)
}

/// Ex-ante value of a contract under a plan: the plan's period-1 operator
/// applied to `x1 + delta * V2`.
pub fn plan_value(
    prims: &DynamicPrimitives,
    plan: &ActionPlan,
    contract: &DynamicContract,
) -> Result<f64, CoreError> {
    let v2 = v2_of(prims, contract, plan.a1)?;
    let z0 = contract.x1[0] + prims.delta * v2[0];
    let z1 = contract.x1[1] + prims.delta * v2[1];
    let st1 = RobustnessState {
        m_high: prims.m,
        lambda: prims.lambda1,
    };
    Ok(match plan.a1 {
        ActionKind::Safe => g_bernoulli(prims.p, z0, z1, st1.lambda),
        ActionKind::Innovate => g_mix(prims, &st1, z0, z1) - prims.k,
    })
}

/// Mean success probability of period-1 output under the plan.
fn mean1(prims: &DynamicPrimitives, a1: ActionKind) -> f64 {
    match a1 {
        ActionKind::Safe => prims.p,
        ActionKind::Innovate => theta_bar(prims, prims.m),
    }
}

/// Mean success probability of period-2 output at node `y1` under the plan.
fn mean2(prims: &DynamicPrimitives, plan: &ActionPlan, y1: usize) -> f64 {
    match plan.sigma2[y1] {
        ActionKind::Safe => prims.p,
        ActionKind::Innovate => {
            let st = node_state(prims, plan.a1, y1);
            theta_bar(prims, st.m_high)
        }
    }
}

/// Principal's expected profit: expected output with the scale-up indicator
/// minus expected wages under the plan-consistent mean models.
pub fn profit(
    prims: &DynamicPrimitives,
    plan: &ActionPlan,
    contract: &DynamicContract,
) -> Result<f64, CoreError> {
    contract.validate()?;
    let q1 = mean1(prims, plan.a1);
    let p1 = [1.0 - q1, q1];
    let mut output = q1;
    let mut wages = 0.0;
    for y1 in 0..2 {
        let scale = if plan.a1 == ActionKind::Innovate
            && y1 == 1
            && plan.sigma2[1] == ActionKind::Innovate
        {
            prims.a_scale
        } else {
            1.0
        };
        output += p1[y1] * scale * mean2(prims, plan, y1);
        let q2 = mean2(prims, plan, y1);
        let p2 = [1.0 - q2, q2];
        wages += p1[y1] * prims.hspec.h(contract.x1[y1]);
        for y2 in 0..2 {
            wages += p1[y1] * p2[y2] * prims.hspec.h(contract.x2[y1][y2]);
        }
    }
    Ok(output - wages)
}

/// No-intertemporal-arbitrage condition for the wage map:
/// `delta * h'(+inf) > h'(-inf)`; holds for both built-in maps at any
/// `delta > 0`.
pub fn no_intertemporal_arbitrage(prims: &DynamicPrimitives) -> bool {
    let (lo, hi) = prims.hspec.asymptotic_slopes();
    prims.delta * hi > lo
}

/// Per-node diagnostics of a solved plan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeReport {
    pub y1: usize,
    pub action: ActionKind,
    pub state: RobustnessState,
    /// Local incentive gap of the final continuation profile.
    pub gap: f64,
    /// Binding spread chosen at innovation nodes.
    pub spread: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanSolution {
    pub plan: ActionPlan,
    pub contract: DynamicContract,
    pub profit: f64,
    /// Ex-ante agent value; equals the reservation utility at a solution.
    pub v1: f64,
    pub node_reports: Vec<NodeReport>,
}

/// Why a plan cannot be implemented.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanInfeasible {
    pub plan: ActionPlan,
    /// Node at which capacity falls short, if the failure is local.
    pub node: Option<usize>,
    pub reason: String,
}

pub type PlanOutcome = Result<PlanSolution, PlanInfeasible>;

/// Spread(s) `zeta` with `M(mu, lambda; (0, zeta)) = k`, for a node that
/// must implement innovation. Errors when the capacity cannot cover `k`.
pub(crate) fn binding_spreads(
    prims: &DynamicPrimitives,
    state: &RobustnessState,
    k: f64,
) -> Result<Vec<f64>, String> {
    match state.lambda {
        Intensity::Infinite => Err("worst-case endpoint has zero capacity".into()),
        Intensity::Zero => {
            let tb = theta_bar(prims, state.m_high);
            if (tb - prims.p).abs() < 1e-14 {
                Err("expected-utility capacity is zero at theta_bar = p".into())
            } else {
                Ok(vec![k / (tb - prims.p)])
            }
        }
        Intensity::Finite(l) => {
            let cap = incentive_capacity(state, prims).map_err(|e| e.to_string())?;
            if cap.value < k - 1e-12 {
                return Err(format!("capacity {} below cost {k}", cap.value));
            }
            if (cap.value - k).abs() <= 1e-9 {
                return if cap.attained {
                    Ok(vec![cap.spread.expect("attained capacity has a spread")])
                } else {
                    Err(format!(
                        "capacity equals cost {k} but the supremum is not attained"
                    ))
                };
            }
            // Scan the scaled spread for crossings of the gap level.
            let gap_at = |w: f64| {
                incentive_gap(state, prims, &[0.0, w / l]).expect("finite inputs") - k
            };
            let lo = -60.0;
            let hi = 60.0;
            let n = 2400;
            let step = (hi - lo) / n as f64;
            let mut roots = Vec::new();
            let mut prev_w = lo;
            let mut prev_g = gap_at(prev_w);
            for i in 1..=n {
                let w = lo + step * i as f64;
                let g = gap_at(w);
                if prev_g == 0.0 {
                    roots.push(prev_w / l);
                } else if prev_g * g < 0.0 {
                    let r = bisect_root(gap_at, prev_w, w, 1e-12);
                    roots.push(r / l);
                }
                prev_w = w;
                prev_g = g;
            }
            if roots.is_empty() {
                Err("no binding spread found inside the search box".into())
            } else {
                Ok(roots)
            }
        }
    }
}

/// Node profile `(s, s + zeta)` leveled so the innovation value `G - k`
/// equals `level`.
pub(crate) fn innovation_profile(
    prims: &DynamicPrimitives,
    state: &RobustnessState,
    zeta: f64,
    level: f64,
) -> [f64; 2] {
    let g0 = g_mix(prims, state, 0.0, zeta);
    let s = level + prims.k - g0;
    [s, s + zeta]
}

/// Among candidate binding spreads, pick the one with the smaller node
/// expected wage at equal certainty equivalent (level normalized to zero).
pub(crate) fn choose_spread(
    prims: &DynamicPrimitives,
    state: &RobustnessState,
    roots: &[f64],
) -> f64 {
    let mut best = roots[0];
    let mut best_wage = f64::INFINITY;
    let tb = theta_bar(prims, state.m_high);
    for &z in roots {
        let x = innovation_profile(prims, state, z, 0.0);
        let wage = (1.0 - tb) * prims.hspec.h(x[0]) + tb * prims.hspec.h(x[1]);
        if wage < best_wage - 1e-12 || (wage - best_wage).abs() <= 1e-12 && z < best {
            best_wage = wage;
            best = z;
        }
    }
    best
}

/// Search configuration for the level-allocation step.
#[derive(Debug, Clone)]
pub struct PlanSolveOptions {
    pub n_starts: usize,
    pub seed: u64,
    pub nm_max_iter: usize,
}

impl Default for PlanSolveOptions {
    fn default() -> Self {
        PlanSolveOptions {
            n_starts: 8,
            seed: 0x2b_1a,
            nm_max_iter: 500,
        }
    }
}

/// Solves the principal's wage-minimization problem for one plan: binding
/// spreads per innovation node, constant continuations at safe nodes, then
/// a multi-start search over the period-1 spread and the node levels with
/// the ex-ante value pinned at the reservation utility.
pub fn solve_plan(
    prims: &DynamicPrimitives,
    plan: &ActionPlan,
    opts: &PlanSolveOptions,
) -> Result<PlanOutcome, CoreError> {
    prims.validate()?;
    let states = [node_state(prims, plan.a1, 0), node_state(prims, plan.a1, 1)];
    let mut spreads = [None, None];
    for y1 in 0..2 {
        if plan.sigma2[y1] == ActionKind::Innovate {
            match binding_spreads(prims, &states[y1], prims.k) {
                Ok(roots) => spreads[y1] = Some(choose_spread(prims, &states[y1], &roots)),
                Err(reason) => {
                    return Ok(Err(PlanInfeasible {
                        plan: *plan,
                        node: Some(y1),
                        reason,
                    }))
                }
            }
        }
    }

    // Build the contract from free variables (d, l0, l1): x1 = (c, c + d)
    // with c pinned by V1 = U0, and node continuation values V2(y) = l_y.
    let st1 = RobustnessState {
        m_high: prims.m,
        lambda: prims.lambda1,
    };
    let q1 = mean1(prims, plan.a1);
    let p1 = [1.0 - q1, q1];
    let build = |vars: &[f64]| -> (DynamicContract, f64) {
        let (d, l0, l1) = (vars[0], vars[1], vars[2]);
        let zs = [prims.delta * l0, d + prims.delta * l1];
        let vhat = match plan.a1 {
            ActionKind::Safe => g_bernoulli(prims.p, zs[0], zs[1], st1.lambda),
            ActionKind::Innovate => g_mix(prims, &st1, zs[0], zs[1]) - prims.k,
        };
        let c = prims.u0 - vhat;
        let mut x2 = [[0.0; 2]; 2];
        for y1 in 0..2 {
            x2[y1] = match spreads[y1] {
                Some(z) => innovation_profile(prims, &states[y1], z, [l0, l1][y1]),
                None => [[l0, l1][y1]; 2],
            };
        }
        let contract = DynamicContract {
            x1: [c, c + d],
            x2,
        };
        // First-period gap, translation-invariant: evaluate on the shape.
        let gap1 = incentive_gap(&st1, prims, &zs).expect("finite shape") - prims.k;
        (contract, gap1)
    };

    let wages_of = |contract: &DynamicContract| -> f64 {
        let mut w = 0.0;
        for y1 in 0..2 {
            let q2 = mean2(prims, plan, y1);
            w += p1[y1]
                * (prims.hspec.h(contract.x1[y1])
                    + (1.0 - q2) * prims.hspec.h(contract.x2[y1][0])
                    + q2 * prims.hspec.h(contract.x2[y1][1]));
        }
        w
    };

    let gap_penalty = |gap1: f64| -> f64 {
        match plan.a1 {
            // Ties break toward innovation, so innovation needs gap >= 0 and
            // safety needs strictly negative gap.
            ActionKind::Innovate => (-gap1).max(0.0).powi(2),
            ActionKind::Safe => (gap1 + 1e-9).max(0.0).powi(2),
        }
    };

    let mut starts: Vec<Vec<f64>> = vec![
        vec![0.0, prims.u0, prims.u0],
        vec![0.0, 0.0, 0.0],
        vec![1.0, prims.u0, prims.u0 + 1.0],
        vec![-1.0, prims.u0 + 1.0, prims.u0],
    ];
    let mut rng = CounterRng::new(opts.seed);
    while starts.len() < opts.n_starts {
        starts.push(vec![
            rng.range(-3.0, 3.0),
            prims.u0 + rng.range(-3.0, 3.0),
            prims.u0 + rng.range(-3.0, 3.0),
        ]);
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in &starts {
        let mut current = start.clone();
        for rho in [1e4, 1e7, 1e10] {
            let obj = |vars: &[f64]| {
                let (contract, gap1) = build(vars);
                wages_of(&contract) + rho * gap_penalty(gap1)
            };
            let (sol, _) = nelder_mead(obj, &current, 0.5, opts.nm_max_iter, 1e-14);
            current = sol;
        }
        let (contract, gap1) = build(&current);
        if gap_penalty(gap1) > 1e-14 {
            continue;
        }
        let w = wages_of(&contract);
        if best.as_ref().map_or(true, |(bw, _)| w < *bw) {
            best = Some((w, current));
        }
    }

    let Some((_, vars)) = best else {
        return Ok(Err(PlanInfeasible {
            plan: *plan,
            node: None,
            reason: "no level allocation satisfies the first-period constraint".into(),
        }));
    };

    let (contract, _) = build(&vars);
    let mut node_reports = Vec::with_capacity(2);
    for y1 in 0..2 {
        let gap = incentive_gap(&states[y1], prims, &contract.x2[y1])? - prims.k;
        node_reports.push(NodeReport {
            y1,
            action: plan.sigma2[y1],
            state: states[y1],
            gap: gap + prims.k,
            spread: spreads[y1],
        });
    }
    let v1 = plan_value(prims, plan, &contract)?;
    let profit = profit(prims, plan, &contract)?;
    Ok(Ok(PlanSolution {
        plan: *plan,
        contract,
        profit,
        v1,
        node_reports,
    }))
}

/// Outcome of the eight-plan enumeration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BestPlanReport {
    pub best: PlanSolution,
    /// Every plan's outcome in lexicographic plan order.
    pub all: Vec<PlanOutcome>,
}

/// Enumerates all eight plans, solves each, and returns the profit
/// maximizer (ties broken by lexicographic plan order; the all-safe plan is
/// always feasible).
pub fn best_plan(
    prims: &DynamicPrimitives,
    opts: &PlanSolveOptions,
) -> Result<BestPlanReport, CoreError> {
    let mut all = Vec::with_capacity(8);
    let mut best: Option<PlanSolution> = None;
    for plan in ActionPlan::all() {
        let outcome = solve_plan(prims, &plan, opts)?;
        if let Ok(sol) = &outcome {
            if best.as_ref().map_or(true, |b| sol.profit > b.profit + 1e-12) {
                best = Some(sol.clone());
            }
        }
        all.push(outcome);
    }
    let best = best.ok_or_else(|| {
        CoreError::invalid("no feasible plan; the all-safe plan should always solve")
    })?;
    Ok(BestPlanReport { best, all })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropic::Intensity;
    use crate::wage::WageMap;

    fn base_prims() -> DynamicPrimitives {
        DynamicPrimitives {
            p: 0.5,
            theta_l: 0.2,
            theta_h: 0.8,
            m: 0.5,
            k: 0.1,
            gamma: 1.0,
            a_scale: 2.0,
            delta: 1.0,
            u0: 0.0,
            lambda1: Intensity::Finite(0.1),
            hspec: WageMap::ExpPlusLinear,
        }
    }

    fn trap_prims() -> DynamicPrimitives {
        DynamicPrimitives {
            p: 0.5,
            theta_l: 0.01,
            theta_h: 0.8,
            m: 0.5,
            k: 1.0,
            gamma: 0.1,
            a_scale: 2.0,
            delta: 1.0,
            u0: 0.0,
            lambda1: Intensity::Finite(0.5),
            hspec: WageMap::ExpPlusLinear,
        }
    }

    #[test]
    fn continuation_value_cases() {
        let prims = base_prims();
        let st = RobustnessState {
            m_high: 0.5,
            lambda: Intensity::Finite(1.0),
        };
        // Constant profile: safe wins (gap 0 < k).
        let (v, a) = continuation_value(&prims, &st, &[0.4, 0.4]).unwrap();
        assert!((v - 0.4).abs() < 1e-14);
        assert_eq!(a, ActionKind::Safe);

        // At a binding profile the tie breaks toward innovation.
        let roots = binding_spreads(&prims, &st, prims.k).unwrap();
        let z = choose_spread(&prims, &st, &roots);
        let x = innovation_profile(&prims, &st, z, 0.7);
        let (v, a) = continuation_value(&prims, &st, &x).unwrap();
        assert!((v - 0.7).abs() < 1e-9);
        assert_eq!(a, ActionKind::Innovate);
    }

    #[test]
    fn continuation_value_matches_joint_minimization_grid() {
        // Direct joint minimization over the two model conditionals on a
        // mesh-0.01 grid must match the reduced form within 1e-3.
        let prims = base_prims();
        let st = RobustnessState {
            m_high: 0.45,
            lambda: Intensity::Finite(1.2),
        };
        let x = [0.3, -0.8];
        let l = 1.2;
        let kl = |r: f64, q: f64| {
            r * (r / q).ln() + (1.0 - r) * ((1.0 - r) / (1.0 - q)).ln()
        };
        // Innovation branch: mixture over per-model tilts.
        let mut joint_best = f64::INFINITY;
        let mesh = 100;
        for i in 1..mesh {
            for j in 1..mesh {
                let (rl, rh) = (i as f64 / mesh as f64, j as f64 / mesh as f64);
                let e_l = (1.0 - rl) * x[0] + rl * x[1];
                let e_h = (1.0 - rh) * x[0] + rh * x[1];
                let cost = (1.0 - st.m_high) * (e_l + kl(rl, prims.theta_l) / l)
                    + st.m_high * (e_h + kl(rh, prims.theta_h) / l);
                joint_best = joint_best.min(cost);
            }
        }
        let reduced = g_mix(&prims, &st, x[0], x[1]);
        assert!(
            (joint_best - reduced).abs() < 1e-3,
            "joint {joint_best} vs reduced {reduced}"
        );
        // Safe branch: single-model grid.
        let mut safe_best = f64::INFINITY;
        for i in 1..mesh {
            let r = i as f64 / mesh as f64;
            safe_best = safe_best
                .min((1.0 - r) * x[0] + r * x[1] + kl(r, prims.p) / l);
        }
        let safe_reduced = g_bernoulli(prims.p, x[0], x[1], st.lambda);
        assert!((safe_best - safe_reduced).abs() < 1e-3);
    }

    #[test]
    fn first_period_gap_examples() {
        let prims = base_prims();
        // All-constant contract: gap = -k.
        let c = DynamicContract::constant(0.3);
        let g = first_period_gap(&prims, &c).unwrap();
        assert!((g - (-prims.k)).abs() < 1e-12);

        // Common shift leaves the gap unchanged.
        let mut rich = DynamicContract {
            x1: [0.0, 2.0],
            x2: [[0.0, 1.0], [0.5, 3.0]],
        };
        let g1 = first_period_gap(&prims, &rich).unwrap();
        for v in rich.x1.iter_mut() {
            *v += 0.9;
        }
        for row in rich.x2.iter_mut() {
            for v in row.iter_mut() {
                *v += 0.9;
            }
        }
        let g2 = first_period_gap(&prims, &rich).unwrap();
        assert!((g1 - g2).abs() < 1e-12);

        // Large success spreads at both dates make early innovation
        // optimal at small lambda1. The prior mean equals p here, so the
        // first-order term vanishes and the wedge is pure curvature: it
        // needs a sizable spread.
        let big = DynamicContract {
            x1: [0.0, 6.0],
            x2: [[0.0, 6.0], [0.0, 6.0]],
        };
        assert!(first_period_gap(&prims, &big).unwrap() > 0.0);
    }

    #[test]
    fn all_safe_plan_full_insurance() {
        let prims = base_prims();
        let out = solve_plan(&prims, &ActionPlan::ALL_SAFE, &PlanSolveOptions::default())
            .unwrap()
            .expect("all-safe is always feasible");
        // Constant continuations and a flat period-1 profile.
        for y1 in 0..2 {
            assert!((out.contract.x2[y1][0] - out.contract.x2[y1][1]).abs() < 1e-9);
        }
        assert!((out.contract.x1[0] - out.contract.x1[1]).abs() < 1e-6);
        assert!((out.v1 - prims.u0).abs() < 1e-9);
        // Profit: expected output 2p minus wages, no dependence on A.
        let mut p10 = prims.clone();
        p10.a_scale = 10.0;
        let out10 = solve_plan(&p10, &ActionPlan::ALL_SAFE, &PlanSolveOptions::default())
            .unwrap()
            .unwrap();
        assert!((out.profit - out10.profit).abs() < 1e-8);
    }

    #[test]
    fn safe_node_insurance_is_cheapest() {
        // Replacing a safe node's constant continuation with a mean-
        // preserving non-constant profile of equal certainty equivalent
        // weakly raises the node wage.
        let prims = base_prims();
        let out = solve_plan(&prims, &ActionPlan::ALL_SAFE, &PlanSolveOptions::default())
            .unwrap()
            .unwrap();
        let level = out.contract.x2[0][0];
        let st = node_state(&prims, ActionKind::Safe, 0);
        for spread in [0.2, 1.0, 3.0] {
            // Solve for the shift keeping the safe certainty equivalent.
            let ce = |s: f64| g_bernoulli(prims.p, s, s + spread, st.lambda);
            let shift = bisect_root(|s| ce(s) - level, level - spread.abs() - 1.0, level + 1.0, 1e-12);
            let perturbed = [shift, shift + spread];
            let w0 = prims.hspec.h(level);
            let w1 = (1.0 - prims.p) * prims.hspec.h(perturbed[0])
                + prims.p * prims.hspec.h(perturbed[1]);
            assert!(w1 >= w0 - 1e-10, "spread {spread}: {w1} < {w0}");
        }
    }

    #[test]
    fn solved_innovation_plans_bind() {
        let prims = base_prims();
        for plan in ActionPlan::all() {
            let outcome = solve_plan(&prims, &plan, &PlanSolveOptions::default()).unwrap();
            if let Ok(sol) = outcome {
                assert!((sol.v1 - prims.u0).abs() < 1e-6, "plan {plan:?}");
                for nr in &sol.node_reports {
                    if nr.action == ActionKind::Innovate {
                        assert!(
                            (nr.gap - prims.k).abs() < 1e-6,
                            "plan {plan:?} node {} gap {}",
                            nr.y1,
                            nr.gap
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn trap_instance_blocks_post_success_innovation() {
        let prims = trap_prims();
        let bp = best_plan(&prims, &PlanSolveOptions::default()).unwrap();
        // Plans with early innovation and post-success innovation are
        // infeasible at the success node.
        for outcome in &bp.all {
            match outcome {
                Ok(sol) => {
                    assert!(
                        !(sol.plan.a1 == ActionKind::Innovate
                            && sol.plan.sigma2[1] == ActionKind::Innovate),
                        "trap plan solved: {:?}",
                        sol.plan
                    );
                }
                Err(inf) => {
                    if inf.plan.a1 == ActionKind::Innovate
                        && inf.plan.sigma2[1] == ActionKind::Innovate
                    {
                        assert_eq!(inf.node, Some(1));
                    }
                }
            }
        }
        assert!(
            !(bp.best.plan.a1 == ActionKind::Innovate
                && bp.best.plan.sigma2[1] == ActionKind::Innovate)
        );
        // Profit of every solved plan is independent of the multiplier.
        let mut p10 = prims.clone();
        p10.a_scale = 10.0;
        let bp10 = best_plan(&p10, &PlanSolveOptions::default()).unwrap();
        for (a, b) in bp.all.iter().zip(&bp10.all) {
            if let (Ok(sa), Ok(sb)) = (a, b) {
                assert!(
                    (sa.profit - sb.profit).abs() < 1e-8,
                    "plan {:?}: {} vs {}",
                    sa.plan,
                    sa.profit,
                    sb.profit
                );
            }
        }
    }

    #[test]
    fn expected_utility_benchmark_scales_up() {
        // lambda == 0 benchmark: capacity is infinite, so post-success
        // innovation is implementable, and for a large multiplier the
        // scale-up plan wins. Needs a prior mean different from p: at
        // lambda = 0 the period-1 wedge is (theta_bar - p) * spread.
        let mut prims = base_prims();
        prims.m = 0.6;
        prims.lambda1 = Intensity::Zero;
        prims.a_scale = 100.0;
        let bp = best_plan(&prims, &PlanSolveOptions::default()).unwrap();
        assert_eq!(bp.best.plan.a1, ActionKind::Innovate);
        assert_eq!(bp.best.plan.sigma2[1], ActionKind::Innovate);
    }

    #[test]
    fn huge_cost_prefers_all_safe() {
        let mut prims = base_prims();
        prims.k = 50.0;
        let bp = best_plan(&prims, &PlanSolveOptions::default()).unwrap();
        assert_eq!(bp.best.plan, ActionPlan::ALL_SAFE);
    }

    #[test]
    fn arbitrage_condition_holds_for_builtin_maps() {
        let prims = base_prims();
        assert!(no_intertemporal_arbitrage(&prims));
        let mut p2 = prims;
        p2.delta = 0.5;
        p2.hspec = WageMap::Exponential { rate: 1.0 };
        assert!(no_intertemporal_arbitrage(&p2));
    }
}
