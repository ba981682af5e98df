//! Entropic valuation engine.
//!
//! For a full-support model `q` over a finite outcome set and a utility
//! profile `x`, the certainty equivalent with robustness intensity `lambda`
//! is
//!
//! ```text
//! g_q(x; lambda) = -(1/lambda) log sum_y q(y) exp(-lambda x(y)),
//! ```
//!
//! the closed form of the KL-penalized worst case
//! `min_p { E_p[x] + (1/lambda) KL(p || q) }`, whose unique minimizer is the
//! exponential tilt `p(y) ~ q(y) exp(-lambda x(y))`. A roadmap is a finite
//! set of models plus a full-support prior; its value aggregates the
//! per-model certainty equivalents linearly under the prior. The intensity
//! is an extended nonnegative real: the `0` endpoint is the expected-utility
//! limit `E_q[x]` and the `+inf` endpoint is the worst case `min_y x(y)`.
//!
//! All sums are evaluated with the shift `m = min_y x(y)` inside the
//! log-sum-exp, so exponents are bounded above by zero and the evaluation
//! cannot overflow for `lambda * spread(x)` up to about 700.

use crate::error::CoreError;
use serde::{Deserialize, Serialize};

/// Tolerance for probability vectors on ingestion; inputs within this of
/// summing to one are renormalized exactly.
pub const PROB_TOL: f64 = 1e-12;

/// Raw intensities below this are treated as the `0` endpoint, above
/// `1/ENDPOINT_EPS` as the `+inf` endpoint.
pub const ENDPOINT_EPS: f64 = 1e-10;

/// Ordered finite set of outcome identifiers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeSpace {
    labels: Vec<String>,
}

impl OutcomeSpace {
    pub fn new(labels: Vec<String>) -> Result<Self, CoreError> {
        if labels.len() < 2 {
            return Err(CoreError::invalid("outcome space needs at least 2 outcomes"));
        }
        for i in 0..labels.len() {
            for j in (i + 1)..labels.len() {
                if labels[i] == labels[j] {
                    return Err(CoreError::invalid(format!(
                        "duplicate outcome label {:?}",
                        labels[i]
                    )));
                }
            }
        }
        Ok(OutcomeSpace { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A full-support probability distribution over the outcome set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    probs: Vec<f64>,
}

impl Model {
    /// Validates positivity and unit mass within [`PROB_TOL`], then
    /// renormalizes exactly (serialized configs carry decimal rounding).
    pub fn new(probs: Vec<f64>) -> Result<Self, CoreError> {
        if probs.len() < 2 {
            return Err(CoreError::invalid("model needs at least 2 outcomes"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(CoreError::invalid("model probabilities must be strictly positive"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(CoreError::invalid(format!(
                "model probabilities sum to {sum}, not 1"
            )));
        }
        let probs = probs.iter().map(|p| p / sum).collect();
        Ok(Model { probs })
    }

    /// Bernoulli model on outcomes `(0 = failure, 1 = success)`.
    pub fn bernoulli(success: f64) -> Result<Self, CoreError> {
        Model::new(vec![1.0 - success, success])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A finite model set with a full-support prior over it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Roadmap {
    models: Vec<Model>,
    prior: Vec<f64>,
}

impl Roadmap {
    pub fn new(models: Vec<Model>, prior: Vec<f64>) -> Result<Self, CoreError> {
        if models.is_empty() {
            return Err(CoreError::invalid("roadmap needs at least one model"));
        }
        if prior.len() != models.len() {
            return Err(CoreError::invalid("prior length must match model count"));
        }
        let n = models[0].len();
        if models.iter().any(|m| m.len() != n) {
            return Err(CoreError::invalid("all roadmap models must share one outcome space"));
        }
        for i in 0..models.len() {
            for j in (i + 1)..models.len() {
                if models[i] == models[j] {
                    return Err(CoreError::invalid("roadmap models must be distinct"));
                }
            }
        }
        if prior.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(CoreError::invalid("prior must have full support"));
        }
        let sum: f64 = prior.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(CoreError::invalid(format!("prior sums to {sum}, not 1")));
        }
        let prior = prior.iter().map(|p| p / sum).collect();
        Ok(Roadmap { models, prior })
    }

    /// Singleton roadmap: unit-mass prior on one model.
    pub fn singleton(model: Model) -> Self {
        Roadmap {
            models: vec![model],
            prior: vec![1.0],
        }
    }

    pub fn models(&self) -> &[Model] {
        &self.models
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn n_outcomes(&self) -> usize {
        self.models[0].len()
    }

    /// Prior-weighted mixture of the models (the principal's effective
    /// outcome distribution).
    pub fn mean_model(&self) -> Model {
        let n = self.n_outcomes();
        let mut probs = vec![0.0; n];
        for (m, w) in self.models.iter().zip(&self.prior) {
            for (acc, p) in probs.iter_mut().zip(m.probs()) {
                *acc += w * p;
            }
        }
        let sum: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= sum;
        }
        Model { probs }
    }
}

/// Extended nonnegative robustness intensity with explicit endpoint tags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Intensity {
    /// Expected-utility limit (`g_q(x; 0) = E_q[x]`).
    Zero,
    /// Interior multiplier intensity, strictly positive.
    Finite(f64),
    /// Worst-case limit (`g_q(x; inf) = min_y x(y)`).
    Infinite,
}

impl Intensity {
    /// Classifies a raw nonnegative value, mapping values below
    /// [`ENDPOINT_EPS`] to the `0` endpoint and above its reciprocal to the
    /// `+inf` endpoint; raw evaluation there is numerically meaningless and
    /// the endpoint formulas are the correct limits.
    pub fn from_raw(v: f64) -> Result<Self, CoreError> {
        if !v.is_finite() && v != f64::INFINITY {
            return Err(CoreError::invalid("intensity must be a nonnegative real or inf"));
        }
        if v < 0.0 {
            return Err(CoreError::invalid("intensity must be nonnegative"));
        }
        if v < ENDPOINT_EPS {
            Ok(Intensity::Zero)
        } else if v > 1.0 / ENDPOINT_EPS {
            Ok(Intensity::Infinite)
        } else {
            Ok(Intensity::Finite(v))
        }
    }

    pub fn finite(v: f64) -> Result<Self, CoreError> {
        if !(v.is_finite() && v > 0.0) {
            return Err(CoreError::invalid("finite intensity must be strictly positive"));
        }
        Ok(Intensity::Finite(v))
    }

    /// The finite value, if interior.
    pub fn as_finite(&self) -> Option<f64> {
        match self {
            Intensity::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

fn check_profile(x: &[f64], n: usize) -> Result<(), CoreError> {
    if x.len() != n {
        return Err(CoreError::invalid(format!(
            "profile length {} does not match outcome count {n}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::invalid("utility profile entries must be finite"));
    }
    Ok(())
}

fn min_of(x: &[f64]) -> f64 {
    x.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Certainty equivalent `g_q(x; lambda)` with endpoint-safe evaluation.
pub fn certainty_equivalent(q: &Model, x: &[f64], lambda: Intensity) -> Result<f64, CoreError> {
    check_profile(x, q.len())?;
    Ok(match lambda {
        Intensity::Zero => q.probs().iter().zip(x).map(|(p, v)| p * v).sum(),
        Intensity::Infinite => min_of(x),
        Intensity::Finite(l) => {
            let m = min_of(x);
            let s: f64 = q
                .probs()
                .iter()
                .zip(x)
                .map(|(p, v)| p * (-l * (v - m)).exp())
                .sum();
            m - s.ln() / l
        }
    })
}

/// Nature's minimizer: the exponential tilt `p(y) ~ q(y) exp(-lambda x(y))`.
/// Only defined for finite positive intensities; at the endpoints the caller
/// uses `q` itself (`lambda = 0`) or argmin mass (`lambda = inf`).
pub fn tilted_belief(q: &Model, x: &[f64], lambda: Intensity) -> Result<Model, CoreError> {
    check_profile(x, q.len())?;
    let l = match lambda {
        Intensity::Finite(l) => l,
        Intensity::Zero => return Err(CoreError::Endpoint("0")),
        Intensity::Infinite => return Err(CoreError::Endpoint("inf")),
    };
    // Log-space weights shifted so the largest is zero.
    let logw: Vec<f64> = q
        .probs()
        .iter()
        .zip(x)
        .map(|(p, v)| p.ln() - l * v)
        .collect();
    let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|lw| (lw - top).exp()).collect();
    let sum: f64 = w.iter().sum();
    Ok(Model {
        probs: w.iter().map(|v| v / sum).collect(),
    })
}

/// Roadmap value: prior-average of per-model certainty equivalents, net of
/// the action cost. Linear in the prior.
pub fn arc_value(r: &Roadmap, x: &[f64], lambda: Intensity, cost: f64) -> Result<f64, CoreError> {
    let mut acc = 0.0;
    for (q, w) in r.models().iter().zip(r.prior()) {
        acc += w * certainty_equivalent(q, x, lambda)?;
    }
    Ok(acc - cost)
}

/// The agent's effective model: prior-average of per-model tilted beliefs.
/// Coordinate `y` equals the gradient of [`arc_value`] in `x(y)`.
pub fn effective_belief(r: &Roadmap, x: &[f64], lambda: Intensity) -> Result<Model, CoreError> {
    if lambda.as_finite().is_none() {
        return Err(CoreError::Endpoint(match lambda {
            Intensity::Zero => "0",
            _ => "inf",
        }));
    }
    let n = r.n_outcomes();
    let mut probs = vec![0.0; n];
    for (q, w) in r.models().iter().zip(r.prior()) {
        let t = tilted_belief(q, x, lambda)?;
        for (acc, p) in probs.iter_mut().zip(t.probs()) {
            *acc += w * p;
        }
    }
    let sum: f64 = probs.iter().sum();
    for p in probs.iter_mut() {
        *p /= sum;
    }
    Ok(Model { probs })
}

/// KL divergence between two same-length distributions.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(pi, qi)| if *pi > 0.0 { pi * (pi / qi).ln() } else { 0.0 })
        .sum()
}

/// Average within-model KL distortion: prior-average of
/// `KL(tilt(q, x, lambda) || q)`. Zero iff `x` is constant; invariant to
/// common translation of `x`.
pub fn avg_kl_distortion(r: &Roadmap, x: &[f64], lambda: Intensity) -> Result<f64, CoreError> {
    let mut acc = 0.0;
    for (q, w) in r.models().iter().zip(r.prior()) {
        let t = tilted_belief(q, x, lambda)?;
        acc += w * kl_divergence(t.probs(), q.probs());
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn half_half() -> Model {
        Model::new(vec![0.5, 0.5]).unwrap()
    }

    /// Independent oracle: minimize `E_p[x] + (1/lambda) KL(p || q)` over a
    /// fine grid on the simplex (binary outcomes: 1-D grid of mesh 1e-3).
    fn penalized_min_on_grid(q: &Model, x: &[f64], lambda: f64) -> (f64, Vec<f64>) {
        assert_eq!(q.len(), 2);
        let mut best = f64::INFINITY;
        let mut best_p = vec![0.5, 0.5];
        let mesh = 1_000;
        for i in 1..mesh {
            let p1 = i as f64 / mesh as f64;
            let p = [1.0 - p1, p1];
            let obj = p[0] * x[0]
                + p[1] * x[1]
                + (p[0] * (p[0] / q.probs()[0]).ln() + p[1] * (p[1] / q.probs()[1]).ln()) / lambda;
            if obj < best {
                best = obj;
                best_p = p.to_vec();
            }
        }
        (best, best_p)
    }

    #[test]
    fn constant_profile_returns_level() {
        let q = half_half();
        for lam in [Intensity::Zero, Intensity::Finite(2.5), Intensity::Infinite] {
            let v = certainty_equivalent(&q, &[1.7, 1.7], lam).unwrap();
            assert!((v - 1.7).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_value_and_grid_oracle() {
        let q = half_half();
        let x = [0.0, 3f64.ln()];
        let v = certainty_equivalent(&q, &x, Intensity::Finite(1.0)).unwrap();
        // -(1/1) log(0.5 + 0.5/3) = -log(2/3)
        assert!((v - 0.405_465_108_108_164_4).abs() < 1e-12);
        let (grid_v, _) = penalized_min_on_grid(&q, &x, 1.0);
        assert!((v - grid_v).abs() < 1e-5, "closed form {v} vs grid {grid_v}");
        // Worst-case endpoint.
        let vinf = certainty_equivalent(&q, &x, Intensity::Infinite).unwrap();
        assert_eq!(vinf, 0.0);
    }

    #[test]
    fn tilt_matches_hand_normalization_and_grid() {
        let q = half_half();
        let x = [0.0, 3f64.ln()];
        let t = tilted_belief(&q, &x, Intensity::Finite(1.0)).unwrap();
        assert!((t.probs()[0] - 0.75).abs() < 1e-12);
        assert!((t.probs()[1] - 0.25).abs() < 1e-12);

        // Tilt minimizes the penalized objective over the grid.
        let mut rng = CounterRng::new(11);
        for _ in 0..20 {
            let q = Model::bernoulli(rng.range(0.05, 0.95)).unwrap();
            let x = [rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)];
            let lam = rng.range(0.2, 3.0);
            let t = tilted_belief(&q, &x, Intensity::Finite(lam)).unwrap();
            let obj_t = t.probs()[0] * x[0]
                + t.probs()[1] * x[1]
                + kl_divergence(t.probs(), q.probs()) / lam;
            let (grid_v, _) = penalized_min_on_grid(&q, &x, lam);
            assert!(obj_t <= grid_v + 1e-9, "tilt objective {obj_t} vs grid {grid_v}");
        }
    }

    #[test]
    fn tilt_constant_profile_is_model() {
        let q = Model::new(vec![0.3, 0.2, 0.5]).unwrap();
        let t = tilted_belief(&q, &[4.0, 4.0, 4.0], Intensity::Finite(2.0)).unwrap();
        for (a, b) in t.probs().iter().zip(q.probs()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn tilt_rejects_endpoints() {
        let q = half_half();
        assert!(matches!(
            tilted_belief(&q, &[0.0, 1.0], Intensity::Zero),
            Err(CoreError::Endpoint("0"))
        ));
        assert!(matches!(
            tilted_belief(&q, &[0.0, 1.0], Intensity::Infinite),
            Err(CoreError::Endpoint("inf"))
        ));
    }

    #[test]
    fn arc_value_examples() {
        // Singleton roadmap: multiplier value minus cost.
        let q = half_half();
        let r = Roadmap::singleton(q.clone());
        let x = [0.0, 3f64.ln()];
        let v = arc_value(&r, &x, Intensity::Finite(1.0), 0.25).unwrap();
        let g = certainty_equivalent(&q, &x, Intensity::Finite(1.0)).unwrap();
        assert!((v - (g - 0.25)).abs() < 1e-15);

        // Constant profile: level minus cost, any roadmap and lambda.
        let r2 = Roadmap::new(
            vec![
                Model::new(vec![0.3, 0.4, 0.3]).unwrap(),
                Model::new(vec![0.45, 0.1, 0.45]).unwrap(),
            ],
            vec![0.5, 0.5],
        )
        .unwrap();
        for lam in [Intensity::Zero, Intensity::Finite(0.7), Intensity::Infinite] {
            let v = arc_value(&r2, &[2.0, 2.0, 2.0], lam, 1.0).unwrap();
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_contract_value_matches_moment_form() {
        // Two-model roadmap on three outcomes, x = (0, b, 2b):
        // value = -(1/l)(sum of prior-weighted log M_q(b)) - cost with
        // M_q(b) = q0 + q1 e^{-l b} + q2 e^{-2 l b}.
        let r = Roadmap::new(
            vec![
                Model::new(vec![0.3, 0.4, 0.3]).unwrap(),
                Model::new(vec![0.45, 0.1, 0.45]).unwrap(),
            ],
            vec![0.5, 0.5],
        )
        .unwrap();
        let l = 1.0;
        for b in [-1.5, -0.3, 0.0, 0.4, 2.0] {
            let x = [0.0, b, 2.0 * b];
            let v = arc_value(&r, &x, Intensity::Finite(l), 1.0).unwrap();
            let mq = |q: &Model| {
                q.probs()[0] + q.probs()[1] * (-l * b).exp() + q.probs()[2] * (-2.0 * l * b).exp()
            };
            let expect = -(0.5 * mq(&r.models()[0]).ln() + 0.5 * mq(&r.models()[1]).ln()) / l - 1.0;
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn effective_belief_trivial_cases() {
        let r = Roadmap::new(
            vec![
                Model::bernoulli(0.2).unwrap(),
                Model::bernoulli(0.8).unwrap(),
            ],
            vec![0.4, 0.6],
        )
        .unwrap();
        // Constant profile: mean model.
        let e = effective_belief(&r, &[1.0, 1.0], Intensity::Finite(1.5)).unwrap();
        let mean = r.mean_model();
        for (a, b) in e.probs().iter().zip(mean.probs()) {
            assert!((a - b).abs() < 1e-14);
        }
        // Singleton: tilted belief of that model.
        let s = Roadmap::singleton(Model::bernoulli(0.3).unwrap());
        let x = [0.4, -1.0];
        let e = effective_belief(&s, &x, Intensity::Finite(2.0)).unwrap();
        let t = tilted_belief(&s.models()[0], &x, Intensity::Finite(2.0)).unwrap();
        for (a, b) in e.probs().iter().zip(t.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn gradient_identity_finite_differences() {
        let r = Roadmap::new(
            vec![
                Model::new(vec![0.2, 0.5, 0.3]).unwrap(),
                Model::new(vec![0.6, 0.1, 0.3]).unwrap(),
            ],
            vec![0.35, 0.65],
        )
        .unwrap();
        let mut rng = CounterRng::new(3);
        for _ in 0..50 {
            let x = [rng.range(-2.0, 2.0), rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)];
            let lam = Intensity::Finite(rng.range(0.3, 3.0));
            let e = effective_belief(&r, &x, lam).unwrap();
            for y in 0..3 {
                let h = 1e-6;
                let mut xp = x;
                xp[y] += h;
                let mut xm = x;
                xm[y] -= h;
                let fd = (arc_value(&r, &xp, lam, 0.0).unwrap()
                    - arc_value(&r, &xm, lam, 0.0).unwrap())
                    / (2.0 * h);
                assert!(
                    (fd - e.probs()[y]).abs() < 1e-5,
                    "fd {fd} vs gradient {}",
                    e.probs()[y]
                );
            }
        }
    }

    #[test]
    fn kl_distortion_examples() {
        let r = Roadmap::singleton(half_half());
        let lam = Intensity::Finite(1.0);
        // Constant profile: zero.
        assert!(avg_kl_distortion(&r, &[0.7, 0.7], lam).unwrap() < 1e-15);
        // Hand value: KL((0.75, 0.25) || (0.5, 0.5)).
        let d = avg_kl_distortion(&r, &[0.0, 3f64.ln()], lam).unwrap();
        assert!((d - 0.130_812_035_941_136_94).abs() < 1e-12);
        // Translation invariance of the distortion.
        let d2 = avg_kl_distortion(&r, &[5.0, 5.0 + 3f64.ln()], lam).unwrap();
        assert!((d - d2).abs() < 1e-12);
    }

    #[test]
    fn endpoint_continuity_bounds() {
        let q = Model::new(vec![0.25, 0.35, 0.4]).unwrap();
        let x = [0.3, -0.9, 1.4];
        let mean: f64 = q.probs().iter().zip(&x).map(|(p, v)| p * v).sum();
        // lambda -> 0: approaches the mean.
        for l in [1e-3, 1e-4, 1e-5] {
            let v = certainty_equivalent(&q, &x, Intensity::Finite(l)).unwrap();
            assert!((v - mean).abs() < 2.0 * l);
        }
        // lambda -> inf: |g - min x| <= |log q_min| / lambda.
        let qmin: f64 = q.probs().iter().cloned().fold(f64::INFINITY, f64::min);
        for l in [10.0, 100.0, 1000.0] {
            let v = certainty_equivalent(&q, &x, Intensity::Finite(l)).unwrap();
            assert!((v - (-0.9)).abs() <= qmin.ln().abs() / l + 1e-15);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Model::new(vec![0.5, 0.5, 0.1]).is_err());
        assert!(Model::new(vec![1.0, 0.0]).is_err());
        let q = half_half();
        assert!(certainty_equivalent(&q, &[f64::NAN, 0.0], Intensity::Finite(1.0)).is_err());
        assert!(certainty_equivalent(&q, &[0.0], Intensity::Finite(1.0)).is_err());
        assert!(Roadmap::new(
            vec![half_half(), half_half()],
            vec![0.5, 0.5]
        )
        .is_err());
        assert!(Intensity::from_raw(-1.0).is_err());
        assert!(matches!(Intensity::from_raw(1e-12).unwrap(), Intensity::Zero));
        assert!(matches!(Intensity::from_raw(1e12).unwrap(), Intensity::Infinite));
        assert!(matches!(Intensity::from_raw(2.0).unwrap(), Intensity::Finite(_)));
    }
}
