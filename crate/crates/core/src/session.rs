//! Time-stepped receive-session simulator.
//!
//! Each step takes the offered rate (optionally capped by the downlink),
//! applies the current throttle factor, and integrates the resulting heat
//! excess into the surface plate with forward Euler. If a step would carry
//! the plate past `t_safe`, the throttle policy is applied and the step is
//! recomputed before it commits.
//!
//! Neither throttle policy nor the cool-down model comes from the
//! underlying thermal model, which only says the chip must back off once
//! the surface hits its bound. They are concrete, documented choices.

use serde::{Deserialize, Serialize};

use crate::compute::max_receiving_rate;
use crate::dataset::{Cell, Dataset};
use crate::error::{invalid, ModelError, Result};
use crate::link::{downlink_rate, LinkConfig};
use crate::thermal::{heat_report, stable_duration, StableDuration};
use crate::units::{Handset, Power, Rate, SemiconductorNode, Temperature};

/// Fixed CSV header of exported traces.
pub const TRACE_CSV_HEADER: [&str; 5] = ["elapsed_s", "rate_bps", "t_sur_k", "h_total_w", "throttled"];

pub const DEFAULT_STEP_S: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThrottleMode {
    /// Stop receiving entirely on the first violation.
    HardShutoff,
    /// Multiply the rate by `step_fraction` on each violation.
    StepDown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recovery {
    /// Plate temperature holds once heat falls back within P_TD.
    None,
    /// Plate cools at `cooldown_power` while below P_TD; when it is back at
    /// ambient the full offered rate is restored.
    LinearCooldown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThrottlePolicy {
    mode: ThrottleMode,
    step_fraction: f64,
    recovery: Recovery,
    cooldown_power: Option<Power>,
}

impl ThrottlePolicy {
    pub fn hard_shutoff() -> Self {
        Self {
            mode: ThrottleMode::HardShutoff,
            step_fraction: 0.5,
            recovery: Recovery::None,
            cooldown_power: None,
        }
    }

    pub fn step_down(step_fraction: f64) -> Result<Self> {
        if !(step_fraction > 0.0 && step_fraction <= 1.0) {
            return Err(invalid("step fraction", step_fraction, "must lie in (0, 1]"));
        }
        Ok(Self {
            mode: ThrottleMode::StepDown,
            step_fraction,
            recovery: Recovery::None,
            cooldown_power: None,
        })
    }

    /// `cooldown_power` of `None` removes heat at the current P_TD − H_total
    /// margin.
    pub fn with_recovery(self, recovery: Recovery, cooldown_power: Option<Power>) -> Self {
        Self {
            recovery,
            cooldown_power,
            ..self
        }
    }

    pub fn mode(&self) -> ThrottleMode {
        self.mode
    }
    pub fn step_fraction(&self) -> f64 {
        self.step_fraction
    }
    pub fn recovery(&self) -> Recovery {
        self.recovery
    }

    fn throttle(&self, factor: f64) -> f64 {
        match self.mode {
            ThrottleMode::HardShutoff => 0.0,
            ThrottleMode::StepDown => factor * self.step_fraction,
        }
    }
}

impl Default for ThrottlePolicy {
    fn default() -> Self {
        Self::hard_shutoff()
    }
}

/// Rate the base station offers over time.
#[derive(Debug, Clone, PartialEq)]
pub enum OfferedLoad {
    Constant(Rate),
    /// Piecewise-constant: each `(start_s, rate)` holds until the next
    /// start. The first start must be 0.
    Steps(Vec<(f64, Rate)>),
}

impl OfferedLoad {
    pub fn steps(mut steps: Vec<(f64, Rate)>) -> Result<Self> {
        steps.sort_by(|a, b| a.0.total_cmp(&b.0));
        match steps.first() {
            Some((start, _)) if *start == 0.0 => {}
            Some((start, _)) => return Err(invalid("first step start", *start, "must be 0")),
            None => return Err(invalid("step count", 0.0, "need at least one step")),
        }
        if steps.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("step start", 0.0, "starts must be distinct"));
        }
        Ok(OfferedLoad::Steps(steps))
    }

    pub fn at(&self, t: f64) -> Rate {
        match self {
            OfferedLoad::Constant(r) => *r,
            OfferedLoad::Steps(steps) => steps
                .iter()
                .take_while(|(start, _)| *start <= t)
                .last()
                .map(|(_, r)| *r)
                .unwrap_or(Rate::ZERO),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSample {
    pub elapsed_s: f64,
    pub rate_bps: Rate,
    pub t_sur_k: Temperature,
    pub h_total_w: Power,
    pub throttled: bool,
}

/// Sample 0 is the state at t = 0. Sample i > 0 holds the state at the end
/// of step i together with the rate and heat applied during that step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionTrace {
    pub step_s: f64,
    pub samples: Vec<TraceSample>,
    /// End-of-step times at which the throttle policy fired.
    pub throttle_events: Vec<f64>,
}

impl SessionTrace {
    pub fn first_throttle(&self) -> Option<f64> {
        self.throttle_events.first().copied()
    }

    pub fn max_temperature(&self) -> Temperature {
        self.samples
            .iter()
            .map(|s| s.t_sur_k)
            .fold(self.samples[0].t_sur_k, |a, b| if b > a { b } else { a })
    }

    pub fn to_dataset(&self) -> Dataset {
        let mut d = Dataset::new(TRACE_CSV_HEADER);
        for s in &self.samples {
            d.push(vec![
                Cell::Num(s.elapsed_s),
                Cell::Num(s.rate_bps.bps()),
                Cell::Num(s.t_sur_k.kelvin()),
                Cell::Num(s.h_total_w.watts()),
                Cell::Bool(s.throttled),
            ]);
        }
        d
    }

    pub fn to_csv_string(&self) -> String {
        self.to_dataset().to_csv_string()
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.to_dataset().to_json_records()
    }
}

pub fn simulate_session(
    handset: &Handset,
    link: Option<&LinkConfig>,
    offered: &OfferedLoad,
    policy: &ThrottlePolicy,
    duration: f64,
    step: f64,
) -> Result<SessionTrace> {
    if !(step.is_finite() && step > 0.0 && duration.is_finite() && step <= duration) {
        return Err(ModelError::InvalidStep { step, duration });
    }
    let steps = (duration / step).round() as usize;
    let plate = &handset.plate;
    let capacity = plate.heat_capacity();
    let t_envir = plate.t_envir().kelvin();
    let t_safe = plate.t_safe().kelvin();
    let p_td = handset.chip.p_td().watts();
    let leak = plate.leakage_w_per_k();
    let downlink = link.map(downlink_rate);

    let channel_rate = |t: f64| {
        let r = offered.at(t);
        downlink.map_or(r, |d| r.min(d))
    };
    let h_total = |rate: Rate| {
        heat_report(&handset.chip, &handset.rf, rate, handset.landauer_temp, &handset.constants)
            .h_total
            .watts()
    };
    // Net heating power into the plate for a given chip heat and plate temperature.
    let net_heating = |h: f64, temp: f64| {
        let absorbed = (h - p_td).max(0.0) - leak * (temp - t_envir);
        if h >= p_td {
            return absorbed;
        }
        match policy.recovery {
            Recovery::None => absorbed.min(0.0),
            Recovery::LinearCooldown => {
                let removal = policy.cooldown_power.map_or(p_td - h, Power::watts);
                absorbed.min(0.0) - removal
            }
        }
    };

    let mut temp = t_envir;
    let mut factor = 1.0_f64;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut throttle_events = Vec::new();

    let r0 = channel_rate(0.0);
    samples.push(TraceSample {
        elapsed_s: 0.0,
        rate_bps: r0,
        t_sur_k: Temperature::from_kelvin(temp)?,
        h_total_w: Power::from_watts(h_total(r0))?,
        throttled: false,
    });

    for i in 0..steps {
        let start = i as f64 * step;
        let end = (i + 1) as f64 * step;
        let base = channel_rate(start);
        let mut rate = base.scaled(factor)?;
        let mut h = h_total(rate);
        let mut next = temp + net_heating(h, temp) * step / capacity;
        if next > t_safe {
            factor = policy.throttle(factor);
            throttle_events.push(end);
            rate = base.scaled(factor)?;
            h = h_total(rate);
            next = temp + net_heating(h, temp) * step / capacity;
        }
        temp = next.clamp(t_envir, t_safe);
        if policy.recovery == Recovery::LinearCooldown && factor < 1.0 && temp <= t_envir {
            factor = 1.0;
        }
        samples.push(TraceSample {
            elapsed_s: end,
            rate_bps: rate,
            t_sur_k: Temperature::from_kelvin(temp)?,
            h_total_w: Power::from_watts(h)?,
            throttled: factor < 1.0,
        });
    }

    Ok(SessionTrace {
        step_s: step,
        samples,
        throttle_events,
    })
}

/// One cell of the rate-versus-duration table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DurationRow {
    pub node_nm: f64,
    pub beta: f64,
    pub rate: Rate,
    pub r_max: Rate,
    pub duration: StableDuration,
}

/// Closed-form stable duration for every (node, β, rate) combination, on
/// top of `base`'s receive chain, plate and constants. Rates at or below
/// R_max are reported as unbounded.
pub fn duration_table(
    base: &Handset,
    nodes: &[SemiconductorNode],
    betas: &[f64],
    rates: &[Rate],
) -> Result<Vec<DurationRow>> {
    if nodes.is_empty() || betas.is_empty() || rates.is_empty() {
        return Err(invalid("grid size", 0.0, "node, beta and rate grids must be non-empty"));
    }
    let mut rows = Vec::with_capacity(nodes.len() * betas.len() * rates.len());
    for node in nodes {
        for &beta in betas {
            let chip = base.chip.with_node(*node).with_beta(beta)?;
            let r_max = max_receiving_rate(&chip, &base.rf, base.landauer_temp, &base.constants)?;
            for &rate in rates {
                let report = heat_report(&chip, &base.rf, rate, base.landauer_temp, &base.constants);
                rows.push(DurationRow {
                    node_nm: node.feature_nm(),
                    beta,
                    rate,
                    r_max,
                    duration: stable_duration(&report, &base.plate),
                });
            }
        }
    }
    Ok(rows)
}
