//! Experiment runner: preset and custom parameter sweeps producing
//! column-ordered datasets plus a headline summary.
//!
//! Configs are TOML documents:
//!
//! ```toml
//! scenario = "custom"          # fig3a | fig3b | fig4a | fig4b | fig4c | custom
//! format = "csv"               # csv | json
//!
//! [overrides]                  # any subset; unknown keys are rejected
//! node_nm = 5
//! beta = 0.2
//! bandwidth_hz = 5e8
//!
//! [sweep]
//! axis = "snr_db"              # beta | rate_bps | snr_db | p_td_w | lambda_coupling | bandwidth_hz
//! start = -10.0
//! stop = 40.0
//! points = 51
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::compute::max_receiving_rate;
use crate::dataset::{Cell, Dataset};
use crate::error::ModelError;
use crate::link::{adapt, crossover_snr, Hertz, LinkConfig, Snr};
use crate::session::duration_table;
use crate::thermal::{heat_report, stable_duration, StableDuration};
use crate::units::{
    ChipProfile, Handset, PhysicalConstants, Power, Rate, RfChainConfig, SemiconductorNode, SurfacePlate, Temperature,
    BETA_MAX,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{scenario}: {source}")]
    Model {
        scenario: &'static str,
        #[source]
        source: ModelError,
    },
    #[error("config file: {0}")]
    Toml(#[from] toml::de::Error),
}

fn invalid(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.to_string(),
        message: message.into(),
    }
}

fn at<T>(path: &str, r: Result<T, ModelError>) -> Result<T, ConfigError> {
    r.map_err(|e| invalid(path, e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// R_max versus β for the 5, 10 and 14 nm nodes.
    Fig3a,
    /// Stable duration versus offered rate on 5 nm.
    Fig3b,
    /// R_downlink versus R_max over SNR: 14 nm, 20 MHz.
    Fig4a,
    /// Same, 10 nm, 500 MHz.
    Fig4b,
    /// Same, 5 nm, 500 MHz.
    Fig4c,
    Custom,
}

impl ScenarioKind {
    pub const PRESETS: [ScenarioKind; 5] = [
        ScenarioKind::Fig3a,
        ScenarioKind::Fig3b,
        ScenarioKind::Fig4a,
        ScenarioKind::Fig4b,
        ScenarioKind::Fig4c,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Fig3a => "fig3a",
            ScenarioKind::Fig3b => "fig3b",
            ScenarioKind::Fig4a => "fig4a",
            ScenarioKind::Fig4b => "fig4b",
            ScenarioKind::Fig4c => "fig4c",
            ScenarioKind::Custom => "custom",
        }
    }

    fn default_axis(self) -> Option<Sweep> {
        let sweep = |axis, start, stop, points| Some(Sweep { axis, start, stop, points });
        match self {
            ScenarioKind::Fig3a => sweep(SweepAxis::Beta, 0.01, BETA_MAX, 34),
            ScenarioKind::Fig3b => sweep(SweepAxis::RateBps, 1e9, 12e9, 23),
            ScenarioKind::Fig4a | ScenarioKind::Fig4b | ScenarioKind::Fig4c => sweep(SweepAxis::SnrDb, -10.0, 40.0, 51),
            ScenarioKind::Custom => None,
        }
    }

    /// (node, bandwidth) the preset is defined on.
    fn base(self) -> (SemiconductorNode, f64) {
        match self {
            ScenarioKind::Fig4a => (SemiconductorNode::nm14(), 20e6),
            ScenarioKind::Fig4b => (SemiconductorNode::nm10(), 500e6),
            _ => (SemiconductorNode::nm5(), 500e6),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Beta,
    RateBps,
    SnrDb,
    PTdW,
    LambdaCoupling,
    BandwidthHz,
}

impl SweepAxis {
    pub fn column(self) -> &'static str {
        match self {
            SweepAxis::Beta => "beta",
            SweepAxis::RateBps => "rate_bps",
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::PTdW => "p_td_w",
            SweepAxis::LambdaCoupling => "lambda_coupling",
            SweepAxis::BandwidthHz => "bandwidth_hz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Sweep {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.points < 2 {
            return Err(invalid("sweep.points", format!("need at least 2 points, got {}", self.points)));
        }
        for (path, v) in [("sweep.start", self.start), ("sweep.stop", self.stop)] {
            if !v.is_finite() {
                return Err(invalid(path, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Parameter overrides. Unset fields keep the scenario's defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub node_nm: Option<u32>,
    pub gap_factor: Option<f64>,
    pub beta: Option<f64>,
    pub k_bp: Option<f64>,
    pub fanout_f0: Option<f64>,
    pub activity_alpha: Option<f64>,
    pub p_td_w: Option<f64>,
    pub n_trx: Option<u32>,
    pub p_lna_w: Option<f64>,
    pub pae_eta: Option<f64>,
    pub lambda_coupling: Option<f64>,
    pub specific_heat: Option<f64>,
    pub density: Option<f64>,
    pub area_m2: Option<f64>,
    pub thickness_m: Option<f64>,
    pub t_envir_k: Option<f64>,
    pub t_safe_k: Option<f64>,
    pub leakage_w_per_k: Option<f64>,
    pub landauer_temp_k: Option<f64>,
    pub boltzmann_k: Option<f64>,
    pub bandwidth_hz: Option<f64>,
    pub streams: Option<u32>,
    pub snr_db: Option<f64>,
    pub rate_bps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub overrides: Overrides,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn preset(scenario: ScenarioKind) -> Self {
        Self {
            scenario,
            overrides: Overrides::default(),
            sweep: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }
}

/// Fully resolved model inputs for one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub handset: Handset,
    pub link: LinkConfig,
    pub rate: Rate,
}

impl Params {
    fn r_max(&self) -> Result<Rate, ModelError> {
        let h = &self.handset;
        max_receiving_rate(&h.chip, &h.rf, h.landauer_temp, &h.constants)
    }

    fn duration_at(&self, rate: Rate) -> StableDuration {
        let h = &self.handset;
        let report = heat_report(&h.chip, &h.rf, rate, h.landauer_temp, &h.constants);
        stable_duration(&report, &h.plate)
    }

    /// Rebuilds the record that owns `axis` with the new value, so the
    /// owner's invariants are re-checked.
    fn with_axis(&self, axis: SweepAxis, v: f64) -> Result<Self, ModelError> {
        let mut p = *self;
        let h = &mut p.handset;
        match axis {
            SweepAxis::Beta => h.chip = h.chip.with_beta(v)?,
            SweepAxis::RateBps => p.rate = Rate::from_bps(v)?,
            SweepAxis::SnrDb => p.link = p.link.with_snr(Snr::from_db(v)?),
            SweepAxis::PTdW => h.chip = h.chip.with_p_td(Power::from_watts(v)?),
            SweepAxis::LambdaCoupling => {
                h.rf = RfChainConfig::unchecked(h.rf.n_trx(), h.rf.p_lna(), h.rf.pae_eta(), v)?;
            }
            SweepAxis::BandwidthHz => p.link = LinkConfig::new(Hertz::new(v)?, p.link.streams(), p.link.snr())?,
        }
        Ok(p)
    }
}

/// Applies `overrides` on top of the preset defaults for `kind`.
pub fn resolve(kind: ScenarioKind, o: &Overrides) -> Result<Params, ConfigError> {
    let (preset_node, preset_bw) = kind.base();
    let mut node = match o.node_nm {
        Some(nm) => SemiconductorNode::preset(nm)
            .ok_or_else(|| invalid("overrides.node_nm", format!("no preset for {nm} nm (use 5, 10, 14 or set gap_factor)")))?,
        None => preset_node,
    };
    if let Some(g) = o.gap_factor {
        node = at("overrides.gap_factor", node.with_gap_factor(g))?;
    }

    let defaults = Handset::reference(node, BETA_MAX).expect("reference handset is valid");
    let c = defaults.chip;
    let p_td = match o.p_td_w {
        Some(w) => at("overrides.p_td_w", Power::from_watts(w))?,
        None => c.p_td(),
    };
    let beta = o.beta.unwrap_or(BETA_MAX);
    let chip = at(
        "overrides",
        ChipProfile::unchecked(
            node,
            o.k_bp.unwrap_or(c.k_bp()),
            o.fanout_f0.unwrap_or(c.fanout_f0()),
            o.activity_alpha.unwrap_or(c.activity_alpha()),
            beta,
            p_td,
        ),
    )
    .map_err(|e| retarget(e, o))?;

    let r = defaults.rf;
    let p_lna = match o.p_lna_w {
        Some(w) => at("overrides.p_lna_w", Power::from_watts(w))?,
        None => r.p_lna(),
    };
    let rf = at(
        "overrides",
        RfChainConfig::new(
            o.n_trx.unwrap_or(r.n_trx()),
            p_lna,
            o.pae_eta.unwrap_or(r.pae_eta()),
            o.lambda_coupling.unwrap_or(r.lambda_coupling()),
        ),
    )
    .map_err(|e| retarget(e, o))?;

    let pl = SurfacePlate::default();
    let temp = |path: &str, v: Option<f64>, d: Temperature| match v {
        Some(k) => at(path, Temperature::from_kelvin(k)),
        None => Ok(d),
    };
    let plate = at(
        "overrides",
        SurfacePlate::new(
            o.specific_heat.unwrap_or(pl.specific_heat()),
            o.density.unwrap_or(pl.density()),
            o.area_m2.unwrap_or(pl.area()),
            o.thickness_m.unwrap_or(pl.thickness()),
            temp("overrides.t_envir_k", o.t_envir_k, pl.t_envir())?,
            temp("overrides.t_safe_k", o.t_safe_k, pl.t_safe())?,
        ),
    )
    .map_err(|e| retarget(e, o))?;
    let plate = at("overrides.leakage_w_per_k", plate.with_leakage(o.leakage_w_per_k.unwrap_or(0.0)))?;

    let landauer_temp = temp("overrides.landauer_temp_k", o.landauer_temp_k, defaults.landauer_temp)?;
    let constants = match o.boltzmann_k {
        Some(k) => at("overrides.boltzmann_k", PhysicalConstants::new(k))?,
        None => defaults.constants,
    };

    let bandwidth = at("overrides.bandwidth_hz", Hertz::new(o.bandwidth_hz.unwrap_or(preset_bw)))?;
    let snr = at("overrides.snr_db", Snr::from_db(o.snr_db.unwrap_or(10.0)))?;
    let link = at(
        "overrides.streams",
        LinkConfig::new(bandwidth, o.streams.unwrap_or(rf.n_trx()), snr),
    )?;
    let rate = at("overrides.rate_bps", Rate::from_bps(o.rate_bps.unwrap_or(4e9)))?;

    Ok(Params {
        handset: Handset {
            chip,
            rf,
            plate,
            landauer_temp,
            constants,
        },
        link,
        rate,
    })
}

/// Points a record-level error at the specific override field when the
/// failing quantity can be identified.
fn retarget(e: ConfigError, o: &Overrides) -> ConfigError {
    let ConfigError::Invalid { message, .. } = &e else { return e };
    let field = [
        ("beta", o.beta.is_some(), "beta"),
        ("K_BP", o.k_bp.is_some(), "k_bp"),
        ("fanout", o.fanout_f0.is_some(), "fanout_f0"),
        ("activity", o.activity_alpha.is_some(), "activity_alpha"),
        ("antenna count", o.n_trx.is_some(), "n_trx"),
        ("power-added", o.pae_eta.is_some(), "pae_eta"),
        ("coupling", o.lambda_coupling.is_some(), "lambda_coupling"),
        ("specific heat", o.specific_heat.is_some(), "specific_heat"),
        ("density", o.density.is_some(), "density"),
        ("area", o.area_m2.is_some(), "area_m2"),
        ("thickness", o.thickness_m.is_some(), "thickness_m"),
        ("safe temperature", true, "t_safe_k"),
    ]
    .into_iter()
    .find(|(needle, set, _)| *set && message.contains(needle));
    match field {
        Some((_, _, name)) => invalid(&format!("overrides.{name}"), message.clone()),
        None => e,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: ScenarioKind,
    pub dataset: Dataset,
    /// Headline numbers in a fixed order.
    pub summary: Vec<(String, Cell)>,
}

impl ScenarioReport {
    pub fn summary_value(&self, key: &str) -> Option<&Cell> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn to_csv_string(&self) -> String {
        self.dataset.to_csv_string()
    }

    pub fn to_json(&self) -> Value {
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::to_value(v).expect("cells serialize")))
            .collect();
        json!({
            "scenario": self.scenario.name(),
            "summary": summary,
            "rows": self.dataset.to_json_records(),
        })
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv_string(),
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("JSON serializes");
                s.push('\n');
                s
            }
        }
    }
}

pub fn run_scenario(config: &ExperimentConfig) -> Result<ScenarioReport, ConfigError> {
    let kind = config.scenario;
    let sweep = match (config.sweep, kind.default_axis()) {
        (Some(s), Some(d)) if s.axis != d.axis => {
            return Err(invalid(
                "sweep.axis",
                format!("{} sweeps {}, not {}", kind.name(), d.axis.column(), s.axis.column()),
            ))
        }
        (Some(s), _) => s,
        (None, Some(d)) => d,
        (None, None) => return Err(invalid("sweep", "custom scenarios need a sweep")),
    };
    sweep.validate()?;
    let base = resolve(kind, &config.overrides)?;
    let model = |e: ModelError| ConfigError::Model {
        scenario: kind.name(),
        source: e,
    };
    let points: Vec<Params> = sweep
        .values()
        .into_iter()
        .map(|v| base.with_axis(sweep.axis, v).map_err(|e| invalid("sweep", e.to_string())))
        .collect::<Result<_, _>>()?;

    match kind {
        ScenarioKind::Fig3a => rmax_vs_beta(&config.overrides, &base, &points).map_err(model),
        ScenarioKind::Fig3b => duration_vs_rate(&config.overrides, &base, &points).map_err(model),
        ScenarioKind::Fig4a | ScenarioKind::Fig4b | ScenarioKind::Fig4c => {
            rates_vs_snr(kind, &base, &points).map_err(model)
        }
        ScenarioKind::Custom => custom(&base, sweep.axis, &points).map_err(model),
    }
}

fn par_rows<F>(points: &[Params], f: F) -> Result<Vec<Vec<Cell>>, ModelError>
where
    F: Fn(&Params) -> Result<Vec<Cell>, ModelError> + Sync + Send,
{
    // `collect` on an indexed parallel iterator keeps input order.
    points.par_iter().map(f).collect()
}

fn duration_cell(d: StableDuration) -> Cell {
    match d {
        StableDuration::Finite(s) => Cell::Num(s),
        StableDuration::Unbounded => Cell::Text("unbounded".into()),
    }
}

fn rmax_vs_beta(o: &Overrides, base: &Params, points: &[Params]) -> Result<ScenarioReport, ModelError> {
    let nodes: Vec<SemiconductorNode> = if o.node_nm.is_some() || o.gap_factor.is_some() {
        vec![base.handset.chip.node()]
    } else {
        SemiconductorNode::presets().to_vec()
    };
    let label = |n: &SemiconductorNode| format!("rmax_{}nm_bps", n.feature_nm());
    let mut columns = vec!["beta".to_string()];
    columns.extend(nodes.iter().map(label));
    let mut dataset = Dataset::new(columns);

    let rmax_on = |p: &Params, node: SemiconductorNode| {
        let mut q = *p;
        q.handset.chip = q.handset.chip.with_node(node);
        q.r_max()
    };
    for row in par_rows(points, |p| {
        let mut row = vec![Cell::Num(p.handset.chip.beta())];
        for n in &nodes {
            row.push(Cell::Num(rmax_on(p, *n)?.bps()));
        }
        Ok(row)
    })? {
        dataset.push(row);
    }

    let at_cap = base.with_axis(SweepAxis::Beta, BETA_MAX)?;
    let mut summary = Vec::new();
    for n in &nodes {
        summary.push((
            format!("rmax_{}nm_at_beta_max_bps", n.feature_nm()),
            Cell::Num(rmax_on(&at_cap, *n)?.bps()),
        ));
    }
    Ok(ScenarioReport {
        scenario: ScenarioKind::Fig3a,
        dataset,
        summary,
    })
}

fn duration_vs_rate(o: &Overrides, base: &Params, points: &[Params]) -> Result<ScenarioReport, ModelError> {
    let betas = match o.beta {
        Some(b) => vec![b],
        None => vec![0.10, 0.20, BETA_MAX],
    };
    let rates: Vec<Rate> = points.iter().map(|p| p.rate).collect();
    let node = base.handset.chip.node();
    let rows = duration_table(&base.handset, &[node], &betas, &rates)?;

    let mut dataset = Dataset::new(["rate_bps", "beta", "r_max_bps", "duration_s"]);
    for r in &rows {
        dataset.push(vec![
            Cell::Num(r.rate.bps()),
            Cell::Num(r.beta),
            Cell::Num(r.r_max.bps()),
            duration_cell(r.duration),
        ]);
    }

    let headline = base.with_axis(SweepAxis::Beta, *betas.first().expect("non-empty"))?;
    let headline_rate = Rate::from_gbps(4.0)?;
    let summary = vec![
        ("beta".to_string(), Cell::Num(headline.handset.chip.beta())),
        ("r_max_bps".to_string(), Cell::Num(headline.r_max()?.bps())),
        ("rate_bps".to_string(), Cell::Num(headline_rate.bps())),
        ("duration_s".to_string(), duration_cell(headline.duration_at(headline_rate))),
    ];
    Ok(ScenarioReport {
        scenario: ScenarioKind::Fig3b,
        dataset,
        summary,
    })
}

fn rates_vs_snr(kind: ScenarioKind, base: &Params, points: &[Params]) -> Result<ScenarioReport, ModelError> {
    let r_max = base.r_max()?;
    let mut dataset = Dataset::new([
        "snr_db",
        "r_downlink_bps",
        "r_max_bps",
        "r_phone_bps",
        "binding",
        "redundancy_bps",
    ]);
    for row in par_rows(points, |p| {
        let d = adapt(r_max, &p.link);
        Ok(vec![
            Cell::Num(p.link.snr().db()),
            Cell::Num(d.r_downlink.bps()),
            Cell::Num(d.r_max.bps()),
            Cell::Num(d.r_phone.bps()),
            Cell::Text(d.binding_constraint.label().into()),
            Cell::Num(d.redundancy.bps()),
        ])
    })? {
        dataset.push(row);
    }

    let crossover = crossover_snr(r_max, base.link.bandwidth(), base.link.streams())?;
    let summary = vec![
        ("node_nm".to_string(), Cell::Num(base.handset.chip.node().feature_nm())),
        ("bandwidth_hz".to_string(), Cell::Num(base.link.bandwidth().hz())),
        ("streams".to_string(), Cell::Int(base.link.streams().into())),
        ("r_max_bps".to_string(), Cell::Num(r_max.bps())),
        ("crossover_snr_db".to_string(), Cell::Num(crossover)),
        ("below_crossover".to_string(), Cell::Text("channel_limited".into())),
        ("above_crossover".to_string(), Cell::Text("terminal_limited".into())),
    ];
    Ok(ScenarioReport {
        scenario: kind,
        dataset,
        summary,
    })
}

fn custom(base: &Params, axis: SweepAxis, points: &[Params]) -> Result<ScenarioReport, ModelError> {
    let mut dataset = Dataset::new([
        axis.column(),
        "r_max_bps",
        "r_downlink_bps",
        "r_phone_bps",
        "binding",
        "offered_rate_bps",
        "duration_s",
    ]);
    let axis_value = |p: &Params| match axis {
        SweepAxis::Beta => p.handset.chip.beta(),
        SweepAxis::RateBps => p.rate.bps(),
        SweepAxis::SnrDb => p.link.snr().db(),
        SweepAxis::PTdW => p.handset.chip.p_td().watts(),
        SweepAxis::LambdaCoupling => p.handset.rf.lambda_coupling(),
        SweepAxis::BandwidthHz => p.link.bandwidth().hz(),
    };
    for row in par_rows(points, |p| {
        let r_max = p.r_max()?;
        let d = adapt(r_max, &p.link);
        Ok(vec![
            Cell::Num(axis_value(p)),
            Cell::Num(r_max.bps()),
            Cell::Num(d.r_downlink.bps()),
            Cell::Num(d.r_phone.bps()),
            Cell::Text(d.binding_constraint.label().into()),
            Cell::Num(p.rate.bps()),
            duration_cell(p.duration_at(p.rate)),
        ])
    })? {
        dataset.push(row);
    }
    let r_max = base.r_max()?;
    let summary = vec![
        ("sweep_axis".to_string(), Cell::Text(axis.column().into())),
        ("points".to_string(), Cell::Int(points.len() as i64)),
        ("base_r_max_bps".to_string(), Cell::Num(r_max.bps())),
    ];
    Ok(ScenarioReport {
        scenario: ScenarioKind::Custom,
        dataset,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(report: &ScenarioReport, key: &str) -> f64 {
        report.summary_value(key).and_then(Cell::as_f64).unwrap()
    }

    #[test]
    fn fig3a_summary_endpoints() {
        let r = run_scenario(&ExperimentConfig::preset(ScenarioKind::Fig3a)).unwrap();
        assert!((num(&r, "rmax_5nm_at_beta_max_bps") / 9.74e9 - 1.0).abs() < 0.01);
        assert!((num(&r, "rmax_10nm_at_beta_max_bps") / 2.17e9 - 1.0).abs() < 1e-9);
        assert!((num(&r, "rmax_14nm_at_beta_max_bps") / 1.55e9 - 1.0).abs() < 1e-9);
        assert_eq!(r.dataset.rows.len(), 34);
        assert_eq!(r.dataset.columns, ["beta", "rmax_5nm_bps", "rmax_10nm_bps", "rmax_14nm_bps"]);
        assert_eq!(r.dataset.rows.last().unwrap()[0], Cell::Num(BETA_MAX));
    }

    #[test]
    fn fig3b_contains_headline_point() {
        let r = run_scenario(&ExperimentConfig::preset(ScenarioKind::Fig3b)).unwrap();
        assert!((num(&r, "duration_s") - 3.971_965_768).abs() < 1e-6);
        assert!((num(&r, "r_max_bps") - 2.865_656_474_778e9).abs() < 1.0);
        let rate = r.dataset.column("rate_bps").unwrap();
        let beta = r.dataset.column("beta").unwrap();
        let dur = r.dataset.column("duration_s").unwrap();
        let row = r
            .dataset
            .rows
            .iter()
            .find(|row| row[rate] == Cell::Num(4e9) && row[beta] == Cell::Num(0.1))
            .unwrap();
        assert!((row[dur].as_f64().unwrap() - 3.971_965_768).abs() < 1e-6);
    }

    #[test]
    fn fig4_presets_report_crossovers() {
        let b = run_scenario(&ExperimentConfig::preset(ScenarioKind::Fig4b)).unwrap();
        assert!((num(&b, "crossover_snr_db") - 0.4975).abs() < 1e-3);
        let c = run_scenario(&ExperimentConfig::preset(ScenarioKind::Fig4c)).unwrap();
        assert!((num(&c, "crossover_snr_db") - 14.514_084_548_841_13).abs() < 1e-9);
        let a = run_scenario(&ExperimentConfig::preset(ScenarioKind::Fig4a)).unwrap();
        let binding = a.dataset.column("binding").unwrap();
        let snr = a.dataset.column("snr_db").unwrap();
        for row in &a.dataset.rows {
            if row[snr].as_f64().unwrap() <= 30.0 {
                assert_eq!(row[binding], Cell::Text("channel_limited".into()));
            }
        }
    }

    #[test]
    fn custom_needs_a_real_sweep() {
        let mut cfg = ExperimentConfig::preset(ScenarioKind::Custom);
        assert!(matches!(run_scenario(&cfg), Err(ConfigError::Invalid { path, .. }) if path == "sweep"));
        cfg.sweep = Some(Sweep {
            axis: SweepAxis::Beta,
            start: 0.1,
            stop: 0.2,
            points: 1,
        });
        assert!(matches!(run_scenario(&cfg), Err(ConfigError::Invalid { path, .. }) if path == "sweep.points"));
        cfg.sweep.as_mut().unwrap().points = 3;
        let r = run_scenario(&cfg).unwrap();
        assert_eq!(r.dataset.rows.len(), 3);
        assert_eq!(r.dataset.columns[0], "beta");
    }

    #[test]
    fn preset_axis_cannot_be_swapped() {
        let mut cfg = ExperimentConfig::preset(ScenarioKind::Fig4b);
        cfg.sweep = Some(Sweep {
            axis: SweepAxis::Beta,
            start: 0.1,
            stop: 0.2,
            points: 3,
        });
        assert!(matches!(run_scenario(&cfg), Err(ConfigError::Invalid { path, .. }) if path == "sweep.axis"));
    }

    #[test]
    fn overrides_are_checked_with_field_paths() {
        let mut cfg = ExperimentConfig::preset(ScenarioKind::Fig4c);
        cfg.overrides.beta = Some(0.5);
        assert!(matches!(run_scenario(&cfg), Err(ConfigError::Invalid { path, .. }) if path == "overrides.beta"));
        let mut cfg = ExperimentConfig::preset(ScenarioKind::Fig4c);
        cfg.overrides.pae_eta = Some(1.5);
        assert!(matches!(run_scenario(&cfg), Err(ConfigError::Invalid { path, .. }) if path == "overrides.pae_eta"));
        let mut cfg = ExperimentConfig::preset(ScenarioKind::Fig4c);
        cfg.overrides.node_nm = Some(7);
        assert!(matches!(run_scenario(&cfg), Err(ConfigError::Invalid { path, .. }) if path == "overrides.node_nm"));
        let mut cfg = ExperimentConfig::preset(ScenarioKind::Fig4c);
        cfg.overrides.t_safe_k = Some(290.0);
        assert!(matches!(run_scenario(&cfg), Err(ConfigError::Invalid { path, .. }) if path == "overrides.t_safe_k"));
    }

    #[test]
    fn model_errors_carry_scenario() {
        let mut cfg = ExperimentConfig::preset(ScenarioKind::Fig4b);
        cfg.overrides.p_td_w = Some(0.001);
        let err = run_scenario(&cfg).unwrap_err();
        assert!(matches!(err, ConfigError::Model { scenario: "fig4b", .. }), "{err}");
    }

    #[test]
    fn toml_round_trip_and_unknown_keys() {
        let text = r#"
            scenario = "custom"
            format = "json"
            [overrides]
            node_nm = 10
            beta = 0.2
            [sweep]
            axis = "snr_db"
            start = 0.0
            stop = 20.0
            points = 5
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.format, OutputFormat::Json);
        assert_eq!(cfg.overrides.node_nm, Some(10));
        let back = ExperimentConfig::from_toml(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(ExperimentConfig::from_toml("scenario = \"fig3a\"\n[overrides]\nbogus = 1\n").is_err());
    }

    #[test]
    fn sweep_values_hit_endpoints_exactly() {
        let s = Sweep {
            axis: SweepAxis::Beta,
            start: 0.01,
            stop: BETA_MAX,
            points: 34,
        };
        let v = s.values();
        assert_eq!(v[0], 0.01);
        assert_eq!(*v.last().unwrap(), BETA_MAX);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn json_keeps_full_precision() {
        let r = run_scenario(&ExperimentConfig::preset(ScenarioKind::Fig3a)).unwrap();
        let j = r.to_json();
        let v = j["summary"]["rmax_5nm_at_beta_max_bps"].as_f64().unwrap();
        assert_eq!(v, num(&r, "rmax_5nm_at_beta_max_bps"));
        assert_eq!(j["rows"].as_array().unwrap().len(), 34);
    }
}
