//! Config file schema: one JSON document per scenario, strictly validated
//! (unknown fields rejected), with extended-real literals `"inf"`,
//! `"-inf"`, and `"zero-limit"` for intensity endpoints.

use anyhow::{anyhow, bail, Result};
use roadmap_core::dynamic_contract::DynamicContract;
use roadmap_core::dynamics_state::DynamicPrimitives;
use roadmap_core::entropic::{Intensity, Model, OutcomeSpace, Roadmap};
use roadmap_core::extensions::{RoadmapDesignProblem, ShirkPrimitives, ThreeOutcomePrimitives};
use roadmap_core::interventions::HiringMenu;
use roadmap_core::longrun::{InfiniteContract, LambdaRule, Policy, TrueProcess};
use roadmap_core::static_contract::{ActionSpec, StaticScenario};
use roadmap_core::wage::WageMap;
use serde::Deserialize;

/// Intensity in configs: a number, `"inf"`, or `"zero-limit"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum IntensitySpec {
    Tag(String),
    Value(f64),
}

impl IntensitySpec {
    pub fn to_intensity(&self) -> Result<Intensity> {
        match self {
            IntensitySpec::Value(v) => Ok(Intensity::from_raw(*v)?),
            IntensitySpec::Tag(t) => match t.as_str() {
                "inf" => Ok(Intensity::Infinite),
                "zero-limit" => Ok(Intensity::Zero),
                other => bail!("unknown intensity literal {other:?}; use a number, \"inf\", or \"zero-limit\""),
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Scenario {
    Static(StaticConfig),
    Dynamic(DynamicConfig),
    Screening(ScreeningConfig),
    Turnover(TurnoverConfig),
    Longrun(LongrunConfig),
    BridgeCheck(BridgeConfig),
    Design(DesignConfig),
    Milestones(MilestonesConfig),
    Shirking(ShirkingConfig),
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Static(_) => "static",
            Scenario::Dynamic(_) => "dynamic",
            Scenario::Screening(_) => "screening",
            Scenario::Turnover(_) => "turnover",
            Scenario::Longrun(_) => "longrun",
            Scenario::BridgeCheck(_) => "bridge-check",
            Scenario::Design(_) => "design",
            Scenario::Milestones(_) => "milestones",
            Scenario::Shirking(_) => "shirking",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionConfig {
    pub name: String,
    pub cost: f64,
    pub models: Vec<Vec<f64>>,
    pub prior: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticConfig {
    pub outcomes: Vec<String>,
    pub actions: Vec<ActionConfig>,
    pub lambda: IntensitySpec,
    pub u0: f64,
    #[serde(default)]
    pub wage_map: WageMap,
    /// Action the principal implements.
    pub a_star: String,
}

impl StaticConfig {
    pub fn to_scenario(&self) -> Result<(StaticScenario, usize)> {
        let outcomes = OutcomeSpace::new(self.outcomes.clone())?;
        let mut actions = Vec::with_capacity(self.actions.len());
        for a in &self.actions {
            let models = a
                .models
                .iter()
                .map(|m| Model::new(m.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            actions.push(ActionSpec {
                name: a.name.clone(),
                roadmap: Roadmap::new(models, a.prior.clone())?,
                cost: a.cost,
            });
        }
        let scenario = StaticScenario {
            outcomes,
            actions,
            lambda: self.lambda.to_intensity()?,
            u0: self.u0,
            hspec: self.wage_map,
        };
        scenario.validate()?;
        let a_star = scenario.action_index(&self.a_star)?;
        Ok((scenario, a_star))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicConfig {
    pub p: f64,
    pub theta_l: f64,
    pub theta_h: f64,
    pub m: f64,
    pub k: f64,
    pub gamma: f64,
    #[serde(default = "default_a_scale")]
    pub a_scale: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub u0: f64,
    pub lambda1: IntensitySpec,
    #[serde(default)]
    pub wage_map: WageMap,
}

fn default_a_scale() -> f64 {
    2.0
}

fn default_delta() -> f64 {
    1.0
}

impl DynamicConfig {
    pub fn to_primitives(&self) -> Result<DynamicPrimitives> {
        let prims = DynamicPrimitives {
            p: self.p,
            theta_l: self.theta_l,
            theta_h: self.theta_h,
            m: self.m,
            k: self.k,
            gamma: self.gamma,
            a_scale: self.a_scale,
            delta: self.delta,
            u0: self.u0,
            lambda1: self.lambda1.to_intensity()?,
            hspec: self.wage_map,
        };
        prims.validate()?;
        Ok(prims)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractConfig {
    pub x1: [f64; 2],
    pub x2: [[f64; 2]; 2],
}

impl ContractConfig {
    pub fn to_contract(&self) -> DynamicContract {
        DynamicContract {
            x1: self.x1,
            x2: self.x2,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreeningConfig {
    pub primitives: DynamicConfig,
    pub exploit: ContractConfig,
    pub innovate: ContractConfig,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
}

impl ScreeningConfig {
    pub fn menu(&self) -> HiringMenu {
        HiringMenu {
            exploit: self.exploit.to_contract(),
            innovate: self.innovate.to_contract(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TurnoverConfig {
    pub primitives: DynamicConfig,
    #[serde(default)]
    pub replacement_cost: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrueProcessConfig {
    pub safe_success: f64,
    pub innovate_success: f64,
}

impl TrueProcessConfig {
    pub fn to_process(&self) -> TrueProcess {
        TrueProcess {
            safe_success: self.safe_success,
            innovate_success: self.innovate_success,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RuleConfig {
    Sophisticated { gamma: f64 },
    Lenient { gamma: f64 },
    Demanding { gamma: f64 },
}

impl RuleConfig {
    pub fn to_rule(&self) -> LambdaRule {
        match self {
            RuleConfig::Sophisticated { gamma } => LambdaRule::Sophisticated { gamma: *gamma },
            RuleConfig::Lenient { gamma } => LambdaRule::Lenient { gamma: *gamma },
            RuleConfig::Demanding { gamma } => LambdaRule::Demanding { gamma: *gamma },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LongrunConfig {
    pub primitives: DynamicConfig,
    pub true_process: TrueProcessConfig,
    pub rule: RuleConfig,
    #[serde(default = "default_policy")]
    pub policy: Policy,
    pub horizon: usize,
    /// Explicit path seeds; `--seed` appends one more run.
    #[serde(default)]
    pub seeds: Vec<u64>,
    /// Thinning stride for trajectory output.
    #[serde(default = "default_stride")]
    pub stride: usize,
}

fn default_policy() -> Policy {
    Policy::CapacityGated
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ContractSpec {
    Zero,
    Constant { level: f64 },
    SuccessBonus { base: f64, bonus: f64 },
}

impl ContractSpec {
    pub fn to_contract(&self) -> InfiniteContract {
        match self {
            ContractSpec::Zero => InfiniteContract::Zero,
            ContractSpec::Constant { level } => InfiniteContract::Constant { level: *level },
            ContractSpec::SuccessBonus { base, bonus } => InfiniteContract::SuccessBonus {
                base: *base,
                bonus: *bonus,
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeConfig {
    pub primitives: DynamicConfig,
    pub true_process: TrueProcessConfig,
    pub rule: RuleConfig,
    pub contract: ContractSpec,
    pub delta: f64,
    /// Dates at which to compare the evolving and frozen recursions.
    pub roots: Vec<usize>,
    /// Contingency depth of each truncated recursion.
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_depth() -> usize {
    60
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub models: Vec<f64>,
    pub mu0: Vec<f64>,
    pub rho: f64,
    pub lambda: f64,
    pub k: f64,
    #[serde(default)]
    pub u0: f64,
    pub q1: f64,
    #[serde(default)]
    pub wage_map: WageMap,
}

impl DesignConfig {
    pub fn to_problem(&self) -> RoadmapDesignProblem {
        RoadmapDesignProblem {
            models: self.models.clone(),
            mu0: self.mu0.clone(),
            rho: self.rho,
            lambda: self.lambda,
            k: self.k,
            u0: self.u0,
            q1: self.q1,
            hspec: self.wage_map,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MilestonesConfig {
    pub p: f64,
    pub psi: f64,
    pub theta_l: f64,
    pub eps_l: f64,
    pub theta_h: f64,
    pub eps_h: f64,
    pub m: f64,
    pub k: f64,
    pub gamma: f64,
    /// State at which to evaluate the capacity and diagnostic condition.
    pub m_high: f64,
    pub lambda: IntensitySpec,
}

impl MilestonesConfig {
    pub fn to_primitives(&self) -> ThreeOutcomePrimitives {
        ThreeOutcomePrimitives {
            p: self.p,
            psi: self.psi,
            theta_l: self.theta_l,
            eps_l: self.eps_l,
            theta_h: self.theta_h,
            eps_h: self.eps_h,
            m: self.m,
            k: self.k,
            gamma: self.gamma,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShirkingConfig {
    pub p0: f64,
    pub p: f64,
    pub theta_l: f64,
    pub theta_h: f64,
    pub k1: f64,
    pub k: f64,
    pub m_high: f64,
    pub lambda: IntensitySpec,
}

impl ShirkingConfig {
    pub fn to_primitives(&self) -> ShirkPrimitives {
        ShirkPrimitives {
            p0: self.p0,
            p: self.p,
            theta_l: self.theta_l,
            theta_h: self.theta_h,
            k1: self.k1,
            k: self.k,
        }
    }
}

/// A sweep grid parsed from `--grid name=start:stop:count`.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub name: String,
    pub values: Vec<f64>,
}

pub fn parse_grid(spec: &str) -> Result<GridSpec> {
    let (name, rest) = spec
        .split_once('=')
        .ok_or_else(|| anyhow!("grid spec must look like name=start:stop:count"))?;
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        bail!("grid spec must look like name=start:stop:count");
    }
    let start: f64 = parts[0].parse()?;
    let stop: f64 = parts[1].parse()?;
    let count: usize = parts[2].parse()?;
    if count < 2 || !start.is_finite() || !stop.is_finite() || stop <= start {
        bail!("grid needs start < stop and count >= 2");
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok(GridSpec {
        name: name.to_string(),
        values: (0..count).map(|i| start + step * i as f64).collect(),
    })
}
