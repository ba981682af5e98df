//! Remedies against breakthrough traps: coarse feedback design, screening
//! at hiring, and post-success turnover.
//!
//! A coarse evaluation policy reports every success as favorable and each
//! failure as favorable with probability `r` (no false negatives). Raising
//! `r` makes a favorable signal less surprising under the structured models,
//! damping the post-signal intensity `lambda_2(s=1) =
//! -log(r + (1-r) theta_h) / gamma`; the minimum coarsening that keeps it at
//! or below the trap threshold has the closed form
//! `r* = max{0, (exp(-gamma lambda*) - theta_h) / (1 - theta_h)}`.
//!
//! Screening exploits heterogeneity in the LLR scale `gamma`: with a
//! non-degenerate success-contingent continuation, the value difference
//! between an innovation track and an exploitation track is strictly
//! increasing in `gamma`, so a bracketed root is a unique hiring cutoff.
//!
//! Turnover replaces the incumbent after a success: the new agent inherits
//! the posterior but not the misspecification shock, so innovation is
//! contractible again whenever `C(mu_S, lambda_2(1)) < k < C(mu_S, lambda_1)`,
//! and the net profit then rises linearly in the scale-up multiplier.

use crate::dynamic_contract::{
    best_plan, binding_spreads, choose_spread, innovation_profile, ActionKind, PlanSolveOptions,
};
use crate::dynamics_state::{
    bayes_update, g_bernoulli, g_mix, incentive_capacity, incentive_gap, llr_update, theta_bar,
    DynamicPrimitives, RobustnessState,
};
use crate::entropic::Intensity;
use crate::error::CoreError;
use crate::opt::{bisect_root, nelder_mead};
use crate::rng::CounterRng;
use serde::{Deserialize, Serialize};

/// Coarse evaluation policy: favorable with probability `r` on a failure,
/// always favorable on a success.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FeedbackPolicy {
    pub r: f64,
}

impl FeedbackPolicy {
    pub fn validate(&self) -> Result<(), CoreError> {
        if (0.0..=1.0).contains(&self.r) {
            Ok(())
        } else {
            Err(CoreError::invalid("false-positive rate must be in [0,1]"))
        }
    }
}

/// State after a favorable evaluation `s_1 = 1` under the coarse policy:
/// Bayes with likelihoods `r + (1-r) theta`, LLR update on the signal law.
pub fn feedback_state(prims: &DynamicPrimitives, r: f64) -> Result<RobustnessState, CoreError> {
    FeedbackPolicy { r }.validate()?;
    let lh = r + (1.0 - r) * prims.theta_h;
    let ll = r + (1.0 - r) * prims.theta_l;
    let m_post = prims.m * lh / (prims.m * lh + (1.0 - prims.m) * ll);
    let lambda = -lh.ln() / prims.gamma;
    Ok(RobustnessState {
        m_high: m_post,
        lambda: Intensity::from_raw(lambda)?,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoarseningReport {
    pub lambda_star: f64,
    /// Post-success intensity under full revelation.
    pub lambda_success_raw: f64,
    pub r_star: f64,
    /// Intensity after a favorable signal at `r*`.
    pub lambda_at_r_star: f64,
}

/// The minimum evaluation coarsening `r*` that keeps the favorable-signal
/// intensity at or below the trap threshold.
pub fn optimal_coarsening(prims: &DynamicPrimitives) -> Result<CoarseningReport, CoreError> {
    prims.validate()?;
    let lambda_star = ((1.0 - prims.p) / (1.0 - prims.theta_h)).ln() / prims.k;
    let r_star = ((-prims.gamma * lambda_star).exp() - prims.theta_h) / (1.0 - prims.theta_h);
    let r_star = r_star.max(0.0);
    let lh = r_star + (1.0 - r_star) * prims.theta_h;
    Ok(CoarseningReport {
        lambda_star,
        lambda_success_raw: llr_update(prims, 1),
        r_star,
        lambda_at_r_star: -lh.ln() / prims.gamma,
    })
}

/// A menu of two dynamic contracts offered at hiring: an exploitation track
/// `E` and an innovation track `I` whose success-contingent continuation is
/// non-constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HiringMenu {
    pub exploit: crate::dynamic_contract::DynamicContract,
    pub innovate: crate::dynamic_contract::DynamicContract,
}

impl HiringMenu {
    pub fn validate(&self) -> Result<(), CoreError> {
        self.exploit.validate()?;
        self.innovate.validate()?;
        if self.innovate.x2[1][0] == self.innovate.x2[1][1] {
            return Err(CoreError::invalid(
                "innovation track needs a non-constant success-contingent continuation",
            ));
        }
        Ok(())
    }
}

fn v2_at(
    prims: &DynamicPrimitives,
    state: &RobustnessState,
    x: &[f64; 2],
) -> f64 {
    let safe = g_bernoulli(prims.p, x[0], x[1], state.lambda);
    let innovate = g_mix(prims, state, x[0], x[1]) - prims.k;
    safe.max(innovate)
}

/// Ex-ante values `(V1_E, V1_I)` of the two tracks for an agent of LLR
/// scale `gamma`. Validates the track-action hypothesis: the exploitation
/// track must make the safe period-1 action optimal and the innovation
/// track the innovative one, at this `gamma`.
pub fn screening_values(
    prims: &DynamicPrimitives,
    menu: &HiringMenu,
    gamma: f64,
) -> Result<(f64, f64), CoreError> {
    prims.validate()?;
    menu.validate()?;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(CoreError::invalid("gamma must be positive"));
    }
    let st1 = RobustnessState {
        m_high: prims.m,
        lambda: prims.lambda1,
    };

    // Exploitation track: no update after the safe action, so the state
    // (and hence the value) never sees gamma.
    let e = &menu.exploit;
    let v2e = [v2_at(prims, &st1, &e.x2[0]), v2_at(prims, &st1, &e.x2[1])];
    let ze = [
        e.x1[0] + prims.delta * v2e[0],
        e.x1[1] + prims.delta * v2e[1],
    ];
    let v1_e_safe = g_bernoulli(prims.p, ze[0], ze[1], st1.lambda);
    let v1_e_innov = g_mix(prims, &st1, ze[0], ze[1]) - prims.k;
    if v1_e_innov >= v1_e_safe {
        return Err(CoreError::precondition(format!(
            "exploitation track fails its hypothesis at gamma={gamma}: innovation optimal"
        )));
    }

    // Innovation track: post-outcome intensities scale as Z(y)/gamma.
    let i = &menu.innovate;
    let mut p2 = prims.clone();
    p2.gamma = gamma;
    let mut v2i = [0.0; 2];
    for y1 in 0..2 {
        let st = RobustnessState {
            m_high: bayes_update(&p2, p2.m, y1),
            lambda: Intensity::from_raw(llr_update(&p2, y1))?,
        };
        v2i[y1] = v2_at(prims, &st, &i.x2[y1]);
    }
    let zi = [
        i.x1[0] + prims.delta * v2i[0],
        i.x1[1] + prims.delta * v2i[1],
    ];
    let v1_i_innov = g_mix(prims, &st1, zi[0], zi[1]) - prims.k;
    let v1_i_safe = g_bernoulli(prims.p, zi[0], zi[1], st1.lambda);
    if v1_i_innov < v1_i_safe {
        return Err(CoreError::precondition(format!(
            "innovation track fails its hypothesis at gamma={gamma}: safe optimal"
        )));
    }

    Ok((v1_e_safe, v1_i_innov))
}

/// Track value difference `D(gamma) = V1_I(gamma) - V1_E`.
pub fn screening_diff(
    prims: &DynamicPrimitives,
    menu: &HiringMenu,
    gamma: f64,
) -> Result<f64, CoreError> {
    let (ve, vi) = screening_values(prims, menu, gamma)?;
    Ok(vi - ve)
}

/// Unique indifference cutoff `gamma*` on a sign-changing bracket, by
/// bisection to 1e-8 on the strictly increasing `D`.
pub fn screening_cutoff(
    prims: &DynamicPrimitives,
    menu: &HiringMenu,
    gamma_lo: f64,
    gamma_hi: f64,
) -> Result<f64, CoreError> {
    if !(gamma_lo < gamma_hi) {
        return Err(CoreError::invalid("cutoff bracket must satisfy lo < hi"));
    }
    let d_lo = screening_diff(prims, menu, gamma_lo)?;
    let d_hi = screening_diff(prims, menu, gamma_hi)?;
    if !(d_lo < 0.0 && d_hi > 0.0) {
        return Err(CoreError::invalid(format!(
            "bracket does not straddle the cutoff: D({gamma_lo})={d_lo}, D({gamma_hi})={d_hi}"
        )));
    }
    Ok(bisect_root(
        |g| screening_diff(prims, menu, g).expect("validated inside the bracket"),
        gamma_lo,
        gamma_hi,
        1e-8,
    ))
}

/// Pieces of a turnover arrangement and the resulting profit line in the
/// scale-up multiplier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TurnoverReport {
    /// `C(mu_S, lambda_2(1)) < k < C(mu_S, lambda_1)`.
    pub sandwich_holds: bool,
    pub capacity_incumbent: f64,
    pub capacity_new_agent: f64,
    /// Net profit at `A = 1` of the constructed turnover arrangement.
    pub profit_intercept: Option<f64>,
    /// `d profit / d A = P(y1=1) * sum_q mu_S(q) q(1)`, strictly positive
    /// when the sandwich holds.
    pub profit_slope: Option<f64>,
    /// Best keep-incumbent profit (eight-plan enumeration).
    pub keep_profit: f64,
    /// Multiplier beyond which turnover strictly beats keeping the
    /// incumbent; `1` when turnover already wins at `A = 1`.
    pub a_bar: Option<f64>,
    /// Continuation action chosen at the incumbent's failure node.
    pub failure_action: Option<ActionKind>,
}

/// Evaluates the turnover sandwich and, when it holds, constructs the
/// arrangement: the incumbent innovates in period 1 and is replaced after a
/// success by a new agent who inherits the posterior at the pre-shock
/// intensity `lambda_1`; the new agent's continuation binds the local gap
/// at `k` with his one-shot participation at `u0`.
pub fn turnover_analysis(
    prims: &DynamicPrimitives,
    replacement_cost: f64,
) -> Result<TurnoverReport, CoreError> {
    prims.validate()?;
    if !(replacement_cost.is_finite() && replacement_cost >= 0.0) {
        return Err(CoreError::invalid("replacement cost must be nonnegative"));
    }
    let m_s = bayes_update(prims, prims.m, 1);
    let incumbent_state = RobustnessState {
        m_high: m_s,
        lambda: Intensity::from_raw(llr_update(prims, 1))?,
    };
    let new_state = RobustnessState {
        m_high: m_s,
        lambda: prims.lambda1,
    };
    let cap_inc = incentive_capacity(&incumbent_state, prims)?.value;
    let cap_new = incentive_capacity(&new_state, prims)?.value;
    let keep = best_plan(prims, &PlanSolveOptions::default())?;
    let sandwich = cap_inc < prims.k && prims.k < cap_new;
    if !sandwich {
        return Ok(TurnoverReport {
            sandwich_holds: false,
            capacity_incumbent: cap_inc,
            capacity_new_agent: cap_new,
            profit_intercept: None,
            profit_slope: None,
            keep_profit: keep.best.profit,
            a_bar: None,
            failure_action: None,
        });
    }

    // New agent's success-node contract: binding spread at his state,
    // leveled so his one-shot participation binds at u0.
    let roots = binding_spreads(prims, &new_state, prims.k)
        .map_err(CoreError::invalid)?;
    let zeta_new = choose_spread(prims, &new_state, &roots);
    let x_new = innovation_profile(prims, &new_state, zeta_new, prims.u0);
    let tb_s = theta_bar(prims, m_s);
    let new_agent_wage = (1.0 - tb_s) * prims.hspec.h(x_new[0]) + tb_s * prims.hspec.h(x_new[1]);

    // Incumbent: period-1 innovation with severance after success and a
    // safe or innovative continuation after failure.
    let st1 = RobustnessState {
        m_high: prims.m,
        lambda: prims.lambda1,
    };
    let q1 = theta_bar(prims, prims.m);
    let failure_state = RobustnessState {
        m_high: bayes_update(prims, prims.m, 0),
        lambda: Intensity::from_raw(llr_update(prims, 0))?,
    };

    let mut best: Option<(f64, ActionKind)> = None;
    for failure_action in [ActionKind::Safe, ActionKind::Innovate] {
        let zeta_f = match failure_action {
            ActionKind::Safe => None,
            ActionKind::Innovate => match binding_spreads(prims, &failure_state, prims.k) {
                Ok(roots) => Some(choose_spread(prims, &failure_state, &roots)),
                Err(_) => continue,
            },
        };
        let q2f = match failure_action {
            ActionKind::Safe => prims.p,
            ActionKind::Innovate => theta_bar(prims, failure_state.m_high),
        };
        // Level allocation over (d, l0, s): x1 = (c, c+d) with c pinned by
        // V1 = u0; failure continuation value l0; severance s.
        let build = |vars: &[f64]| -> ([f64; 2], [f64; 2], f64, f64) {
            let (d, l0, sev) = (vars[0], vars[1], vars[2]);
            let zs = [prims.delta * l0, d + prims.delta * sev];
            let vhat = g_mix(prims, &st1, zs[0], zs[1]) - prims.k;
            let c = prims.u0 - vhat;
            let x1 = [c, c + d];
            let x2f = match zeta_f {
                Some(z) => innovation_profile(prims, &failure_state, z, l0),
                None => [l0, l0],
            };
            let gap1 = incentive_gap(&st1, prims, &zs).expect("finite shape") - prims.k;
            (x1, x2f, sev, gap1)
        };
        let wages_of = |x1: &[f64; 2], x2f: &[f64; 2], sev: f64| -> f64 {
            q1 * (prims.hspec.h(x1[1]) + prims.hspec.h(sev) + new_agent_wage)
                + (1.0 - q1)
                    * (prims.hspec.h(x1[0])
                        + (1.0 - q2f) * prims.hspec.h(x2f[0])
                        + q2f * prims.hspec.h(x2f[1]))
        };
        let mut starts = vec![
            vec![0.0, prims.u0, prims.u0],
            vec![1.0, prims.u0, prims.u0],
            vec![-1.0, prims.u0, prims.u0 + 1.0],
        ];
        let mut rng = CounterRng::new(0x7ea);
        while starts.len() < 8 {
            starts.push(vec![
                rng.range(-3.0, 3.0),
                prims.u0 + rng.range(-2.0, 2.0),
                prims.u0 + rng.range(-2.0, 2.0),
            ]);
        }
        let mut local_best: Option<f64> = None;
        for start in &starts {
            let mut current = start.clone();
            for rho in [1e4, 1e7, 1e10] {
                let obj = |vars: &[f64]| {
                    let (x1, x2f, sev, gap1) = build(vars);
                    wages_of(&x1, &x2f, sev) + rho * (-gap1).max(0.0).powi(2)
                };
                let (sol, _) = nelder_mead(obj, &current, 0.5, 500, 1e-14);
                current = sol;
            }
            let (x1, x2f, sev, gap1) = build(&current);
            if gap1 < -1e-7 {
                continue;
            }
            let w = wages_of(&x1, &x2f, sev);
            if local_best.map_or(true, |b| w < b) {
                local_best = Some(w);
            }
        }
        if let Some(w) = local_best {
            // Net profit at A = 1.
            let output1 = q1 + q1 * tb_s + (1.0 - q1) * q2f;
            let profit1 = output1 - w - replacement_cost * q1;
            if best.map_or(true, |(b, _)| profit1 > b) {
                best = Some((profit1, failure_action));
            }
        }
    }

    let Some((profit1, failure_action)) = best else {
        return Ok(TurnoverReport {
            sandwich_holds: true,
            capacity_incumbent: cap_inc,
            capacity_new_agent: cap_new,
            profit_intercept: None,
            profit_slope: None,
            keep_profit: keep.best.profit,
            a_bar: None,
            failure_action: None,
        });
    };

    let slope = q1 * tb_s;
    let a_bar = if profit1 >= keep.best.profit {
        1.0
    } else {
        1.0 + (keep.best.profit - profit1) / slope
    };
    Ok(TurnoverReport {
        sandwich_holds: true,
        capacity_incumbent: cap_inc,
        capacity_new_agent: cap_new,
        profit_intercept: Some(profit1),
        profit_slope: Some(slope),
        keep_profit: keep.best.profit,
        a_bar: Some(a_bar),
        failure_action: Some(failure_action),
    })
}

/// Net turnover profit at a given multiplier from the report's affine form.
pub fn turnover_profit_at(report: &TurnoverReport, a: f64) -> Option<f64> {
    Some(report.profit_intercept? + report.profit_slope? * (a - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamic_contract::DynamicContract;
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
            lambda1: Intensity::Finite(0.5),
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
            lambda1: Intensity::Finite(0.05),
            hspec: WageMap::ExpPlusLinear,
        }
    }

    #[test]
    fn feedback_state_matches_raw_and_uninformative_ends() {
        let prims = trap_prims();
        // r = 0: identical to the raw post-success state.
        let s0 = feedback_state(&prims, 0.0).unwrap();
        assert!((s0.m_high - bayes_update(&prims, prims.m, 1)).abs() < 1e-15);
        assert!(
            (s0.lambda.as_finite().unwrap() - llr_update(&prims, 1)).abs() < 1e-15
        );
        // r = 1: uninformative signal, posterior = prior, intensity 0.
        let s1 = feedback_state(&prims, 1.0).unwrap();
        assert!((s1.m_high - prims.m).abs() < 1e-15);
        assert!(matches!(s1.lambda, Intensity::Zero));
        // Hand value at r = 0.5, theta_h = 0.8, gamma = 0.1.
        let s = feedback_state(&prims, 0.5).unwrap();
        assert!(
            (s.lambda.as_finite().unwrap() - 1.053_605_156_578_263).abs() < 1e-12
        );
    }

    #[test]
    fn coarsening_formula_and_constraint() {
        // p=0.5, theta_h=0.8, k=1, gamma=0.1: r* ~ 0.5622.
        let prims = trap_prims();
        let rep = optimal_coarsening(&prims).unwrap();
        assert!((rep.lambda_star - 0.916_290_731_874_155_1).abs() < 1e-12);
        let expected =
            ((-prims.gamma * rep.lambda_star).exp() - prims.theta_h) / (1.0 - prims.theta_h);
        assert!((rep.r_star - expected).abs() < 1e-15);
        assert!((rep.r_star - 0.562_217_682_777_403_9).abs() < 1e-12);
        // Constraint met at r* (with equality), violated just below.
        assert!(rep.lambda_at_r_star <= rep.lambda_star + 1e-9);
        let below = feedback_state(&prims, rep.r_star - 1e-6).unwrap();
        assert!(below.lambda.as_finite().unwrap() > rep.lambda_star);
        // Cross-check r* by bisection on the constraint.
        let root = bisect_root(
            |r| {
                let lh = r + (1.0 - r) * prims.theta_h;
                -lh.ln() / prims.gamma - rep.lambda_star
            },
            0.0,
            1.0,
            1e-12,
        );
        assert!((root - rep.r_star).abs() < 1e-9);
        // lambda(s=1) strictly decreasing in r.
        let mut last = f64::INFINITY;
        for i in 1..=10 {
            let st = feedback_state(&prims, i as f64 / 10.0).unwrap();
            let l = match st.lambda {
                Intensity::Zero => 0.0,
                Intensity::Finite(v) => v,
                Intensity::Infinite => f64::INFINITY,
            };
            assert!(l < last);
            last = l;
        }
    }

    #[test]
    fn coarsening_clamps_to_zero_when_unneeded() {
        // Large gamma: lambda_2(1) already below lambda*.
        let mut prims = trap_prims();
        prims.gamma = 10.0;
        let rep = optimal_coarsening(&prims).unwrap();
        assert_eq!(rep.r_star, 0.0);
    }

    #[test]
    fn feedback_escape_as_theta_l_vanishes() {
        // With r fixed, the favorable-signal capacity blows up as theta_l
        // shrinks, so the trap cannot arise under the coarse policy.
        let mut prims = trap_prims();
        let mut last = 0.0;
        for tl in [0.01, 1e-3, 1e-4] {
            prims.theta_l = tl;
            let st = feedback_state(&prims, 0.5).unwrap();
            let c = incentive_capacity(&st, &prims).unwrap().value;
            assert!(c > last);
            last = c;
        }
        assert!(last > prims.k);
    }

    // The prior mean equals p on this instance, so the period-1 wedge is
    // pure curvature and the innovation track needs a sizable success
    // spread at both dates to satisfy its own hypothesis.
    fn screening_menu() -> HiringMenu {
        HiringMenu {
            exploit: DynamicContract::constant(0.525),
            innovate: DynamicContract {
                x1: [0.0, 1.5],
                x2: [[0.0, 0.0], [0.0, 3.0]],
            },
        }
    }

    #[test]
    fn screening_diff_monotone_and_cutoff() {
        let prims = base_prims();
        let menu = screening_menu();
        let grid: Vec<f64> = (0..10).map(|i| 0.35 + 0.5 * i as f64).collect();
        let mut prev = f64::NEG_INFINITY;
        let mut ve_ref = None;
        for &g in &grid {
            let (ve, vi) = screening_values(&prims, &menu, g).unwrap();
            // Exploitation value never sees gamma.
            if let Some(r) = ve_ref {
                let diff: f64 = ve - r;
                assert!(diff.abs() < 1e-12);
            }
            ve_ref = Some(ve);
            let d = vi - ve;
            assert!(d > prev, "D not increasing at gamma={g}");
            prev = d;
        }
        let d_lo = screening_diff(&prims, &menu, grid[0]).unwrap();
        let d_hi = screening_diff(&prims, &menu, *grid.last().unwrap()).unwrap();
        assert!(d_lo < 0.0 && d_hi > 0.0, "bracket: {d_lo}, {d_hi}");
        let cut = screening_cutoff(&prims, &menu, grid[0], *grid.last().unwrap()).unwrap();
        assert!(screening_diff(&prims, &menu, cut).unwrap().abs() <= 1e-6);
        // Degenerate bracket rejected.
        assert!(screening_cutoff(&prims, &menu, 2.0, 2.0).is_err());
        // Raising the success bonus shifts the cutoff down.
        let mut sweeter = menu.clone();
        sweeter.innovate.x2[1][1] += 0.5;
        let cut2 = screening_cutoff(&prims, &sweeter, grid[0], *grid.last().unwrap()).unwrap();
        assert!(cut2 < cut);
    }

    #[test]
    fn screening_rejects_degenerate_menu() {
        let prims = base_prims();
        let menu = HiringMenu {
            exploit: DynamicContract::constant(0.2),
            innovate: DynamicContract::constant(0.3),
        };
        assert!(screening_diff(&prims, &menu, 1.0).is_err());
    }

    #[test]
    fn turnover_sandwich_and_affine_profit() {
        let prims = trap_prims();
        let rep = turnover_analysis(&prims, 0.2).unwrap();
        assert!(rep.sandwich_holds, "{rep:?}");
        let slope = rep.profit_slope.unwrap();
        let expected_slope =
            theta_bar(&prims, prims.m) * theta_bar(&prims, bayes_update(&prims, prims.m, 1));
        assert!((slope - expected_slope).abs() < 1e-12);
        assert!(slope > 0.0);
        // Exact affine fit through A in {2, 5, 10}.
        let p2 = turnover_profit_at(&rep, 2.0).unwrap();
        let p5 = turnover_profit_at(&rep, 5.0).unwrap();
        let p10 = turnover_profit_at(&rep, 10.0).unwrap();
        let fit_slope = (p10 - p2) / 8.0;
        let resid = (p5 - (p2 + fit_slope * 3.0)).abs();
        assert!(resid < 1e-10);
        // Large enough A makes turnover beat keeping the incumbent.
        let a_bar = rep.a_bar.unwrap();
        assert!(turnover_profit_at(&rep, a_bar + 1.0).unwrap() > rep.keep_profit);

        // Replacement cost moves the threshold linearly.
        let rep_costly = turnover_analysis(&prims, 10.2).unwrap();
        let da = rep_costly.a_bar.unwrap() - a_bar;
        let expected_da = 10.0 * theta_bar(&prims, prims.m) / slope;
        assert!((da - expected_da).abs() < 1e-6, "{da} vs {expected_da}");
    }

    #[test]
    fn turnover_no_gain_when_intensities_match() {
        let mut prims = trap_prims();
        prims.lambda1 = Intensity::Finite(llr_update(&prims, 1));
        let rep = turnover_analysis(&prims, 0.0).unwrap();
        assert!(!rep.sandwich_holds);
        assert!(rep.profit_slope.is_none());
    }
}
