//! Domain types and the closed-form objective.
//!
//! The composite objective is `F = alpha * S + beta * R - gamma * E` where
//!
//! * `S` (sustainability impact) grows with AI adoption times a logarithmic
//!   renewable-energy term, plus a quadratic efficiency-gain term,
//! * `R` (economic resilience) is linear in innovation and market stability
//!   and grows with the square root of AI investment,
//! * `E` (environmental cost) is a normalized linear cost of energy, carbon
//!   and water consumption.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{field} is not a finite number ({value})")]
    NonFinite { field: &'static str, value: f64 },
    #[error("{field} = {value} is outside the domain of the model ({reason})")]
    Domain {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid weights ({alpha}, {beta}, {gamma}): {reason}")]
    InvalidWeights {
        alpha: f64,
        beta: f64,
        gamma: f64,
        reason: &'static str,
    },
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("invalid bounds for {variable}: [{lower}, {upper}]")]
    InvalidBounds {
        variable: &'static str,
        lower: f64,
        upper: f64,
    },
    #[error("gradient is singular at ai_investment = 0")]
    Singular,
}

/// The nine decision variables, in canonical vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    AiAdoption,
    RenewableEnergy,
    EfficiencyGain,
    InnovationIndex,
    MarketStability,
    AiInvestment,
    EnergyConsumption,
    CarbonEmissions,
    WaterUsage,
}

impl Variable {
    pub const COUNT: usize = 9;

    pub const ALL: [Variable; Self::COUNT] = [
        Variable::AiAdoption,
        Variable::RenewableEnergy,
        Variable::EfficiencyGain,
        Variable::InnovationIndex,
        Variable::MarketStability,
        Variable::AiInvestment,
        Variable::EnergyConsumption,
        Variable::CarbonEmissions,
        Variable::WaterUsage,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// snake_case field name, as used in JSON and CSV output.
    pub fn name(self) -> &'static str {
        match self {
            Variable::AiAdoption => "ai_adoption",
            Variable::RenewableEnergy => "renewable_energy",
            Variable::EfficiencyGain => "efficiency_gain",
            Variable::InnovationIndex => "innovation_index",
            Variable::MarketStability => "market_stability",
            Variable::AiInvestment => "ai_investment",
            Variable::EnergyConsumption => "energy_consumption",
            Variable::CarbonEmissions => "carbon_emissions",
            Variable::WaterUsage => "water_usage",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Variable::AiAdoption => "scale 1-10",
            Variable::RenewableEnergy => "percent",
            Variable::EfficiencyGain => "percent",
            Variable::InnovationIndex => "scale 0-100",
            Variable::MarketStability => "scale 1-10",
            Variable::AiInvestment => "USD per capita",
            Variable::EnergyConsumption => "MWh",
            Variable::CarbonEmissions => "t CO2",
            Variable::WaterUsage => "liters",
        }
    }

    /// Cost variables enter the objective only through the environmental term.
    pub fn is_cost(self) -> bool {
        matches!(
            self,
            Variable::EnergyConsumption | Variable::CarbonEmissions | Variable::WaterUsage
        )
    }

    pub fn from_name(name: &str) -> Option<Variable> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }
}

impl std::fmt::Display for Variable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One AI deployment strategy: a point in the nine-dimensional decision space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeploymentStrategy {
    pub ai_adoption: f64,
    pub renewable_energy: f64,
    pub efficiency_gain: f64,
    pub innovation_index: f64,
    pub market_stability: f64,
    pub ai_investment: f64,
    pub energy_consumption: f64,
    pub carbon_emissions: f64,
    pub water_usage: f64,
}

impl DeploymentStrategy {
    pub fn from_array(x: [f64; Variable::COUNT]) -> Self {
        Self {
            ai_adoption: x[0],
            renewable_energy: x[1],
            efficiency_gain: x[2],
            innovation_index: x[3],
            market_stability: x[4],
            ai_investment: x[5],
            energy_consumption: x[6],
            carbon_emissions: x[7],
            water_usage: x[8],
        }
    }

    pub fn to_array(&self) -> [f64; Variable::COUNT] {
        [
            self.ai_adoption,
            self.renewable_energy,
            self.efficiency_gain,
            self.innovation_index,
            self.market_stability,
            self.ai_investment,
            self.energy_consumption,
            self.carbon_emissions,
            self.water_usage,
        ]
    }

    pub fn get(&self, v: Variable) -> f64 {
        self.to_array()[v.index()]
    }

    pub fn with(&self, v: Variable, value: f64) -> Self {
        let mut x = self.to_array();
        x[v.index()] = value;
        Self::from_array(x)
    }

    pub fn check_finite(&self) -> Result<(), ModelError> {
        for v in Variable::ALL {
            let value = self.get(v);
            if !value.is_finite() {
                return Err(ModelError::NonFinite {
                    field: v.name(),
                    value,
                });
            }
        }
        Ok(())
    }
}

/// Weights of the composite objective. Construct through [`WeightConfig::new`]
/// to enforce the simplex constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights")]
pub struct WeightConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl TryFrom<RawWeights> for WeightConfig {
    type Error = ModelError;

    fn try_from(raw: RawWeights) -> Result<Self, Self::Error> {
        WeightConfig::new(raw.alpha, raw.beta, raw.gamma)
    }
}

impl WeightConfig {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, ModelError> {
        let w = Self { alpha, beta, gamma };
        w.validate()?;
        Ok(w)
    }

    /// Skips the simplex check. Only the objective-scaling experiments need
    /// weights off the simplex; [`composite_objective`] still rejects them.
    pub fn unchecked(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let err = |reason| ModelError::InvalidWeights {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            reason,
        };
        if !(self.alpha.is_finite() && self.beta.is_finite() && self.gamma.is_finite()) {
            return Err(err("weights must be finite"));
        }
        if self.alpha < 0.0 || self.beta < 0.0 || self.gamma < 0.0 {
            return Err(err("weights must be non-negative"));
        }
        if (self.alpha + self.beta + self.gamma - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(err("weights must sum to 1"));
        }
        Ok(())
    }
}

impl Default for WeightConfig {
    /// The sustainability-focused configuration (0.6, 0.3, 0.1).
    fn default() -> Self {
        Self {
            alpha: 0.6,
            beta: 0.3,
            gamma: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Natural,
    Ten,
}

impl LogBase {
    pub fn log1p_ratio(self, ratio: f64) -> f64 {
        match self {
            LogBase::Natural => ratio.ln_1p(),
            LogBase::Ten => ratio.ln_1p() / std::f64::consts::LN_10,
        }
    }

    /// d/dx log(x) = 1 / (x * ln(base)).
    fn derivative_scale(self) -> f64 {
        match self {
            LogBase::Natural => 1.0,
            LogBase::Ten => 1.0 / std::f64::consts::LN_10,
        }
    }
}

/// Coefficients and normalization constants of the three component functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub norm_energy: f64,
    pub norm_carbon: f64,
    pub norm_water: f64,
    pub log_base: LogBase,
}

impl Default for ModelCoefficients {
    fn default() -> Self {
        Self {
            a1: 0.6,
            a2: 0.4,
            b1: 0.4,
            b2: 0.4,
            b3: 0.2,
            g1: 0.4,
            g2: 0.4,
            g3: 0.2,
            norm_energy: 2000.0,
            norm_carbon: 1000.0,
            norm_water: 5000.0,
            log_base: LogBase::Natural,
        }
    }
}

impl ModelCoefficients {
    pub fn with_log_base(mut self, log_base: LogBase) -> Self {
        self.log_base = log_base;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [
            self.a1,
            self.a2,
            self.b1,
            self.b2,
            self.b3,
            self.g1,
            self.g2,
            self.g3,
            self.norm_energy,
            self.norm_carbon,
            self.norm_water,
        ];
        if all.iter().any(|c| !c.is_finite() || *c <= 0.0) {
            return Err(ModelError::InvalidCoefficients(
                "all coefficients must be finite and positive".into(),
            ));
        }
        for (name, sum) in [
            ("a1 + a2", self.a1 + self.a2),
            ("b1 + b2 + b3", self.b1 + self.b2 + self.b3),
            ("g1 + g2 + g3", self.g1 + self.g2 + self.g3),
        ] {
            if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(ModelError::InvalidCoefficients(format!(
                    "{name} = {sum}, expected 1"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub const fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lower, self.upper)
    }
}

/// Closed box of admissible strategies, one interval per variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSet {
    pub ai_adoption: Interval,
    pub renewable_energy: Interval,
    pub efficiency_gain: Interval,
    pub innovation_index: Interval,
    pub market_stability: Interval,
    pub ai_investment: Interval,
    pub energy_consumption: Interval,
    pub carbon_emissions: Interval,
    pub water_usage: Interval,
}

impl Default for BoundsSet {
    fn default() -> Self {
        Self {
            ai_adoption: Interval::new(1.0, 10.0),
            renewable_energy: Interval::new(10.0, 100.0),
            efficiency_gain: Interval::new(5.0, 80.0),
            innovation_index: Interval::new(20.0, 100.0),
            market_stability: Interval::new(1.0, 10.0),
            ai_investment: Interval::new(10.0, 1000.0),
            energy_consumption: Interval::new(50.0, 2000.0),
            carbon_emissions: Interval::new(20.0, 1000.0),
            water_usage: Interval::new(100.0, 5000.0),
        }
    }
}

impl BoundsSet {
    pub fn get(&self, v: Variable) -> Interval {
        match v {
            Variable::AiAdoption => self.ai_adoption,
            Variable::RenewableEnergy => self.renewable_energy,
            Variable::EfficiencyGain => self.efficiency_gain,
            Variable::InnovationIndex => self.innovation_index,
            Variable::MarketStability => self.market_stability,
            Variable::AiInvestment => self.ai_investment,
            Variable::EnergyConsumption => self.energy_consumption,
            Variable::CarbonEmissions => self.carbon_emissions,
            Variable::WaterUsage => self.water_usage,
        }
    }

    pub fn set(&mut self, v: Variable, interval: Interval) {
        let slot = match v {
            Variable::AiAdoption => &mut self.ai_adoption,
            Variable::RenewableEnergy => &mut self.renewable_energy,
            Variable::EfficiencyGain => &mut self.efficiency_gain,
            Variable::InnovationIndex => &mut self.innovation_index,
            Variable::MarketStability => &mut self.market_stability,
            Variable::AiInvestment => &mut self.ai_investment,
            Variable::EnergyConsumption => &mut self.energy_consumption,
            Variable::CarbonEmissions => &mut self.carbon_emissions,
            Variable::WaterUsage => &mut self.water_usage,
        };
        *slot = interval;
    }

    pub fn lower(&self) -> [f64; Variable::COUNT] {
        Variable::ALL.map(|v| self.get(v).lower)
    }

    pub fn upper(&self) -> [f64; Variable::COUNT] {
        Variable::ALL.map(|v| self.get(v).upper)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for v in Variable::ALL {
            let b = self.get(v);
            if !(b.lower.is_finite() && b.upper.is_finite() && b.lower < b.upper) {
                return Err(ModelError::InvalidBounds {
                    variable: v.name(),
                    lower: b.lower,
                    upper: b.upper,
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, s: &DeploymentStrategy) -> bool {
        Variable::ALL.into_iter().all(|v| self.get(v).contains(s.get(v)))
    }

    /// The first variable lying outside its interval, if any.
    pub fn first_violation(&self, s: &DeploymentStrategy) -> Option<Variable> {
        Variable::ALL
            .into_iter()
            .find(|&v| !self.get(v).contains(s.get(v)))
    }

    pub fn project(&self, s: &DeploymentStrategy) -> DeploymentStrategy {
        let mut x = s.to_array();
        for v in Variable::ALL {
            x[v.index()] = self.get(v).clamp(x[v.index()]);
        }
        DeploymentStrategy::from_array(x)
    }
}

/// The three component values at one strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentScores {
    pub sustainability: f64,
    pub resilience: f64,
    pub environmental: f64,
}

impl ComponentScores {
    pub fn combine(&self, w: &WeightConfig) -> f64 {
        w.alpha * self.sustainability + w.beta * self.resilience - w.gamma * self.environmental
    }
}

fn finite(field: &'static str, value: f64) -> Result<f64, ModelError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::NonFinite { field, value })
    }
}

fn non_negative(field: &'static str, value: f64) -> Result<f64, ModelError> {
    finite(field, value)?;
    if value < 0.0 {
        return Err(ModelError::Domain {
            field,
            value,
            reason: "must be non-negative",
        });
    }
    Ok(value)
}

/// `a1 * ai_adoption * log(1 + renewable/100) + a2 * (efficiency/100)^2`
pub fn sustainability_impact(
    s: &DeploymentStrategy,
    c: &ModelCoefficients,
) -> Result<f64, ModelError> {
    let ai = finite("ai_adoption", s.ai_adoption)?;
    let ren = non_negative("renewable_energy", s.renewable_energy)?;
    let eff = finite("efficiency_gain", s.efficiency_gain)?;
    let eff_frac = eff / 100.0;
    Ok(c.a1 * ai * c.log_base.log1p_ratio(ren / 100.0) + c.a2 * eff_frac * eff_frac)
}

/// `b1 * innovation/100 + b2 * stability/10 + b3 * sqrt(investment/1000)`
pub fn economic_resilience(
    s: &DeploymentStrategy,
    c: &ModelCoefficients,
) -> Result<f64, ModelError> {
    let inn = finite("innovation_index", s.innovation_index)?;
    let ms = finite("market_stability", s.market_stability)?;
    let inv = non_negative("ai_investment", s.ai_investment)?;
    Ok(c.b1 * inn / 100.0 + c.b2 * ms / 10.0 + c.b3 * (inv / 1000.0).sqrt())
}

/// Normalized linear cost of energy, carbon and water use.
pub fn environmental_cost(
    s: &DeploymentStrategy,
    c: &ModelCoefficients,
) -> Result<f64, ModelError> {
    let en = non_negative("energy_consumption", s.energy_consumption)?;
    let co2 = non_negative("carbon_emissions", s.carbon_emissions)?;
    let water = non_negative("water_usage", s.water_usage)?;
    Ok(c.g1 * en / c.norm_energy + c.g2 * co2 / c.norm_carbon + c.g3 * water / c.norm_water)
}

pub fn component_scores(
    s: &DeploymentStrategy,
    c: &ModelCoefficients,
) -> Result<ComponentScores, ModelError> {
    Ok(ComponentScores {
        sustainability: sustainability_impact(s, c)?,
        resilience: economic_resilience(s, c)?,
        environmental: environmental_cost(s, c)?,
    })
}

pub fn composite_objective(
    s: &DeploymentStrategy,
    w: &WeightConfig,
    c: &ModelCoefficients,
) -> Result<f64, ModelError> {
    w.validate()?;
    weighted_objective(s, w, c)
}

/// Composite objective without the simplex check on `w`.
pub(crate) fn weighted_objective(
    s: &DeploymentStrategy,
    w: &WeightConfig,
    c: &ModelCoefficients,
) -> Result<f64, ModelError> {
    Ok(component_scores(s, c)?.combine(w))
}

/// Analytic gradient of the composite objective, in [`Variable::ALL`] order.
pub fn objective_gradient(
    s: &DeploymentStrategy,
    w: &WeightConfig,
    c: &ModelCoefficients,
) -> Result<[f64; Variable::COUNT], ModelError> {
    w.validate()?;
    weighted_gradient(s, w, c)
}

pub(crate) fn weighted_gradient(
    s: &DeploymentStrategy,
    w: &WeightConfig,
    c: &ModelCoefficients,
) -> Result<[f64; Variable::COUNT], ModelError> {
    s.check_finite()?;
    if s.renewable_energy <= -100.0 {
        return Err(ModelError::Domain {
            field: "renewable_energy",
            value: s.renewable_energy,
            reason: "log(1 + x/100) needs x > -100",
        });
    }
    if s.ai_investment == 0.0 {
        return Err(ModelError::Singular);
    }
    non_negative("ai_investment", s.ai_investment)?;

    let log_term = c.log_base.log1p_ratio(s.renewable_energy / 100.0);
    Ok([
        w.alpha * c.a1 * log_term,
        w.alpha * c.a1 * s.ai_adoption * c.log_base.derivative_scale()
            / (100.0 + s.renewable_energy),
        w.alpha * c.a2 * 2.0 * s.efficiency_gain / 10_000.0,
        w.beta * c.b1 / 100.0,
        w.beta * c.b2 / 10.0,
        w.beta * c.b3 / (2000.0 * (s.ai_investment / 1000.0).sqrt()),
        -w.gamma * c.g1 / c.norm_energy,
        -w.gamma * c.g2 / c.norm_carbon,
        -w.gamma * c.g3 / c.norm_water,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn strategy(x: [f64; 9]) -> DeploymentStrategy {
        DeploymentStrategy::from_array(x)
    }

    const CORNER: [f64; 9] = [10.0, 100.0, 80.0, 100.0, 10.0, 1000.0, 50.0, 20.0, 100.0];
    const START: [f64; 9] = [5.0, 50.0, 40.0, 60.0, 6.0, 200.0, 800.0, 300.0, 1500.0];

    #[test]
    fn sustainability_examples() {
        let c = ModelCoefficients::default();
        assert_abs_diff_eq!(
            sustainability_impact(&strategy(CORNER), &c).unwrap(),
            4.41488,
            epsilon = 1e-5
        );
        assert_abs_diff_eq!(
            sustainability_impact(&strategy(START), &c).unwrap(),
            1.28040,
            epsilon = 1e-5
        );
        let zero = strategy(START).with(Variable::RenewableEnergy, 0.0).with(Variable::EfficiencyGain, 0.0);
        assert_eq!(sustainability_impact(&zero, &c).unwrap(), 0.0);
    }

    #[test]
    fn sustainability_rejects_non_finite() {
        let c = ModelCoefficients::default();
        let s = strategy(START).with(Variable::AiAdoption, f64::NAN);
        assert!(matches!(
            sustainability_impact(&s, &c),
            Err(ModelError::NonFinite { field: "ai_adoption", .. })
        ));
    }

    #[test]
    fn resilience_examples() {
        let c = ModelCoefficients::default();
        let at = |inn, ms, inv| {
            let s = strategy(START)
                .with(Variable::InnovationIndex, inn)
                .with(Variable::MarketStability, ms)
                .with(Variable::AiInvestment, inv);
            economic_resilience(&s, &c).unwrap()
        };
        assert_abs_diff_eq!(at(100.0, 10.0, 1000.0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(at(60.0, 6.0, 200.0), 0.56944, epsilon = 1e-5);
        assert_abs_diff_eq!(at(50.0, 5.0, 10.0), 0.42, epsilon = 1e-9);

        let negative = strategy(START).with(Variable::AiInvestment, -1.0);
        assert!(matches!(
            economic_resilience(&negative, &c),
            Err(ModelError::Domain { field: "ai_investment", .. })
        ));
    }

    #[test]
    fn environmental_examples() {
        let c = ModelCoefficients::default();
        let at = |en, co2, water| {
            let s = strategy(START)
                .with(Variable::EnergyConsumption, en)
                .with(Variable::CarbonEmissions, co2)
                .with(Variable::WaterUsage, water);
            environmental_cost(&s, &c).unwrap()
        };
        assert_abs_diff_eq!(at(2000.0, 1000.0, 5000.0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(at(800.0, 300.0, 1500.0), 0.34, epsilon = 1e-9);
        assert_abs_diff_eq!(at(50.0, 20.0, 100.0), 0.022, epsilon = 1e-9);

        let s = strategy(START).with(Variable::WaterUsage, -5.0);
        assert!(environmental_cost(&s, &c).is_err());
    }

    #[test]
    fn composite_examples() {
        let c = ModelCoefficients::default();
        let x = strategy(CORNER);
        let f = composite_objective(&x, &WeightConfig::new(0.6, 0.3, 0.1).unwrap(), &c).unwrap();
        assert_abs_diff_eq!(f, 2.94673, epsilon = 1e-5);
        let f = composite_objective(&x, &WeightConfig::new(0.33, 0.33, 0.34).unwrap(), &c).unwrap();
        assert_abs_diff_eq!(f, 1.77943, epsilon = 1e-5);

        let bad = WeightConfig::unchecked(0.5, 0.6, 0.1);
        assert!(matches!(
            composite_objective(&x, &bad, &c),
            Err(ModelError::InvalidWeights { .. })
        ));
    }

    #[test]
    fn composite_of_equal_components() {
        let c = ModelCoefficients {
            a1: 0.0,
            a2: 1.0,
            b1: 1.0,
            b2: 0.0,
            b3: 0.0,
            g1: 1.0,
            g2: 0.0,
            g3: 0.0,
            norm_energy: 100.0,
            ..ModelCoefficients::default()
        };
        let s = strategy(START)
            .with(Variable::EfficiencyGain, 50.0)
            .with(Variable::InnovationIndex, 25.0)
            .with(Variable::EnergyConsumption, 25.0);
        for w in [(0.6, 0.3, 0.1), (0.2, 0.2, 0.6), (1.0, 0.0, 0.0)] {
            let w = WeightConfig::new(w.0, w.1, w.2).unwrap();
            // S = R = E = 0.25; the cost enters with a minus sign.
            let f = composite_objective(&s, &w, &c).unwrap();
            assert_abs_diff_eq!(f, (w.alpha + w.beta - w.gamma) * 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn weight_validation() {
        assert!(WeightConfig::new(0.5, 0.6, 0.1).is_err());
        assert!(WeightConfig::new(-0.1, 0.6, 0.5).is_err());
        assert!(WeightConfig::new(0.33, 0.33, 0.34).is_ok());
        assert!(serde_json::from_str::<WeightConfig>(r#"{"alpha":0.5,"beta":0.6,"gamma":0.1}"#).is_err());
        let w: WeightConfig =
            serde_json::from_str(r#"{"alpha":0.2,"beta":0.2,"gamma":0.6}"#).unwrap();
        assert_eq!(w, WeightConfig::new(0.2, 0.2, 0.6).unwrap());
    }

    #[test]
    fn gradient_examples() {
        let c = ModelCoefficients::default();
        let w = WeightConfig::default();
        let g = objective_gradient(&strategy(START), &w, &c).unwrap();
        assert_abs_diff_eq!(g[Variable::WaterUsage.index()], -4e-6, epsilon = 1e-18);

        let s = strategy(START).with(Variable::RenewableEnergy, 0.0);
        let g = objective_gradient(&s, &w, &c).unwrap();
        assert_eq!(g[Variable::AiAdoption.index()], 0.0);

        let s = strategy(START).with(Variable::AiInvestment, 0.0);
        assert_eq!(objective_gradient(&s, &w, &c), Err(ModelError::Singular));
    }

    #[test]
    fn default_coefficients_and_bounds_are_valid() {
        ModelCoefficients::default().validate().unwrap();
        BoundsSet::default().validate().unwrap();
        let mut b = BoundsSet::default();
        b.set(Variable::WaterUsage, Interval::new(5.0, 5.0));
        assert!(b.validate().is_err());
    }

    #[test]
    fn strategy_json_uses_field_names() {
        let json = serde_json::to_value(strategy(CORNER)).unwrap();
        for v in Variable::ALL {
            assert_eq!(json[v.name()].as_f64().unwrap(), strategy(CORNER).get(v));
        }
    }
}
