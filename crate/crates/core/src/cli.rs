//! Command-line front end.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::chipdb::{self, round2, ChipSpec};
use crate::compute::max_receiving_rate;
use crate::dataset::{Cell, Dataset};
use crate::link::{crossover_snr, downlink_rate, Hertz, LinkConfig, Snr};
use crate::scenario::{run_scenario, ExperimentConfig, OutputFormat, ScenarioKind};
use crate::session::{simulate_session, OfferedLoad, Recovery, ThrottlePolicy, DEFAULT_STEP_S};
use crate::thermal::{heat_report, stable_duration, StableDuration};
use crate::units::{
    ChipProfile, Handset, Power, Rate, RfChainConfig, SemiconductorNode, Temperature, BETA_MAX, DEFAULT_ACTIVITY,
    DEFAULT_FANOUT, DEFAULT_K_BP, DEFAULT_LAMBDA, DEFAULT_P_TD_W, DEFAULT_LANDAUER_TEMP_K,
};

#[derive(Debug, Parser)]
#[command(name = "rxlimit", version, about = "Thermally limited receiving rate of handsets")]
pub struct Cli {
    /// Experiment config file (TOML); used by `scenario`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Reserved. Every model is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One-off calculators.
    Calc {
        #[command(subcommand)]
        calc: Calc,
    },
    /// Run a preset or config-driven sweep.
    Scenario {
        /// Preset name; omit when --config is given.
        #[arg(value_enum)]
        name: Option<ScenarioName>,
    },
    /// Query the chip catalog.
    Chipdb {
        #[command(subcommand)]
        action: ChipdbAction,
    },
    /// Time-stepped receive session with throttling.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScenarioName {
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig4c,
}

impl From<ScenarioName> for ScenarioKind {
    fn from(n: ScenarioName) -> Self {
        match n {
            ScenarioName::Fig3a => ScenarioKind::Fig3a,
            ScenarioName::Fig3b => ScenarioKind::Fig3b,
            ScenarioName::Fig4a => ScenarioKind::Fig4a,
            ScenarioName::Fig4b => ScenarioKind::Fig4b,
            ScenarioName::Fig4c => ScenarioKind::Fig4c,
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct HandsetArgs {
    /// Process node preset: 5nm, 10nm or 14nm.
    #[arg(long, default_value = "5nm")]
    pub node: SemiconductorNode,
    /// Override the node's gap factor to the Landauer limit.
    #[arg(long)]
    pub gap: Option<f64>,
    /// Baseband share of chip compute power, (0, 0.34].
    #[arg(long, default_value_t = BETA_MAX)]
    pub beta: f64,
    /// Thermal design power in W.
    #[arg(long, default_value_t = DEFAULT_P_TD_W)]
    pub p_td: f64,
    #[arg(long, default_value_t = DEFAULT_K_BP)]
    pub k_bp: f64,
    #[arg(long, default_value_t = DEFAULT_FANOUT)]
    pub f0: f64,
    #[arg(long, default_value_t = DEFAULT_ACTIVITY)]
    pub alpha: f64,
    /// Fraction of LNA heat coupled into the chip.
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    /// Temperature for the Landauer bound, K.
    #[arg(long, default_value_t = DEFAULT_LANDAUER_TEMP_K)]
    pub temp_k: f64,
}

impl HandsetArgs {
    pub fn handset(&self) -> anyhow::Result<Handset> {
        let node = match self.gap {
            Some(g) => self.node.with_gap_factor(g)?,
            None => self.node,
        };
        let base = Handset::reference(node, self.beta)?;
        let chip = ChipProfile::unchecked(
            node,
            self.k_bp,
            self.f0,
            self.alpha,
            self.beta,
            Power::from_watts(self.p_td)?,
        )?;
        let rf = RfChainConfig::new(base.rf.n_trx(), base.rf.p_lna(), base.rf.pae_eta(), self.lambda)?;
        Ok(Handset {
            chip,
            rf,
            landauer_temp: Temperature::from_kelvin(self.temp_k)?,
            ..base
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Calc {
    /// Maximum sustainable receiving rate.
    Rmax(HandsetArgs),
    /// Time until the surface reaches the safe bound at a given rate.
    Duration {
        #[command(flatten)]
        handset: HandsetArgs,
        #[arg(long)]
        rate: Rate,
    },
    /// SNR at which the downlink rate equals R_max.
    Crossover {
        #[arg(long)]
        rmax: Rate,
        #[arg(long)]
        bw: Hertz,
        #[arg(long, default_value_t = 4)]
        streams: u32,
    },
    /// Downlink rate streams × BW × log2(1 + SNR).
    Downlink {
        /// SNR in dB.
        #[arg(long, allow_hyphen_values = true)]
        snr: Snr,
        #[arg(long)]
        bw: Hertz,
        #[arg(long, default_value_t = 4)]
        streams: u32,
    },
    /// Heat density from power and package size, or of a catalog product.
    Heatdensity {
        /// W
        #[arg(long, requires = "area", conflicts_with = "product")]
        power: Option<f64>,
        /// cm²
        #[arg(long)]
        area: Option<f64>,
        #[arg(long)]
        product: Option<String>,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ChipdbAction {
    /// All rows with computed heat density and consistency flag.
    List {
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Strict load: fails on the first inconsistent row.
    Validate {
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// One product.
    Show {
        product: String,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Hard,
    StepDown,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RecoveryArg {
    None,
    Cooldown,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub handset: HandsetArgs,
    /// Offered rate.
    #[arg(long)]
    pub rate: Rate,
    #[arg(long, value_enum, default_value = "hard")]
    pub policy: PolicyArg,
    #[arg(long, default_value_t = 0.5)]
    pub step_fraction: f64,
    #[arg(long, value_enum, default_value = "none")]
    pub recovery: RecoveryArg,
    /// Session length, s.
    #[arg(long, default_value_t = 10.0)]
    pub duration: f64,
    /// Integration step, s.
    #[arg(long, default_value_t = DEFAULT_STEP_S)]
    pub step: f64,
    /// Cap the offered rate by a downlink at this SNR (dB).
    #[arg(long, allow_hyphen_values = true, requires = "bw")]
    pub snr: Option<Snr>,
    #[arg(long)]
    pub bw: Option<Hertz>,
    #[arg(long, default_value_t = 4)]
    pub streams: u32,
}

/// What a command produced: the main payload plus optional notes for stderr.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub notes: Vec<String>,
}

impl Outcome {
    fn line(s: String) -> Self {
        Self {
            stdout: s + "\n",
            notes: Vec::new(),
        }
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let format = cli.format;
    match &cli.command {
        Command::Calc { calc } => run_calc(calc),
        Command::Scenario { name } => run_scenario_cmd(cli.config.as_ref(), *name, format),
        Command::Chipdb { action } => run_chipdb(action, format.unwrap_or_default()),
        Command::Simulate(args) => run_simulate(args, format.unwrap_or_default()),
    }
}

fn rmax_of(h: &Handset) -> anyhow::Result<Rate> {
    Ok(max_receiving_rate(&h.chip, &h.rf, h.landauer_temp, &h.constants)?)
}

fn run_calc(calc: &Calc) -> anyhow::Result<Outcome> {
    match calc {
        Calc::Rmax(args) => {
            let r = rmax_of(&args.handset()?)?;
            Ok(Outcome::line(r.to_string()))
        }
        Calc::Duration { handset, rate } => {
            let h = handset.handset()?;
            let report = heat_report(&h.chip, &h.rf, *rate, h.landauer_temp, &h.constants);
            let mut out = match stable_duration(&report, &h.plate) {
                d @ StableDuration::Finite(_) => Outcome::line(d.to_string()),
                StableDuration::Unbounded => Outcome::line(format!("unbounded (R_max = {})", rmax_of(&h)?)),
            };
            out.notes.push(format!(
                "closed-form lumped plate: excess {:.4} W into ℂM = {:.4} J/K over {:.2} K",
                report.excess.watts(),
                h.plate.heat_capacity(),
                h.plate.headroom()
            ));
            Ok(out)
        }
        Calc::Crossover { rmax, bw, streams } => {
            let db = crossover_snr(*rmax, *bw, *streams)?;
            Ok(Outcome::line(format!("{db:.2} dB")))
        }
        Calc::Downlink { snr, bw, streams } => {
            let link = LinkConfig::new(*bw, *streams, *snr)?;
            Ok(Outcome::line(downlink_rate(&link).to_string()))
        }
        Calc::Heatdensity {
            power,
            area,
            product,
            catalog,
        } => {
            let density = match (power, area, product) {
                (Some(p), Some(a), None) => {
                    if *a <= 0.0 {
                        bail!("package size must be > 0");
                    }
                    p / a
                }
                (None, None, Some(name)) => {
                    let specs = catalog_specs(catalog.as_ref())?;
                    let spec = find_product(&specs, name)?;
                    spec.heat_density()?
                }
                _ => bail!("give either --power and --area, or --product"),
            };
            Ok(Outcome::line(format!("{density:.2} W/cm²")))
        }
    }
}

fn run_scenario_cmd(
    config: Option<&PathBuf>,
    name: Option<ScenarioName>,
    format: Option<OutputFormat>,
) -> anyhow::Result<Outcome> {
    let mut cfg = match (config, name) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_toml(&text)?
        }
        (None, Some(name)) => ExperimentConfig::preset(name.into()),
        (Some(_), Some(_)) => bail!("give either a preset name or --config, not both"),
        (None, None) => bail!("give a preset name or --config"),
    };
    if let Some(f) = format {
        cfg.format = f;
    }
    let report = run_scenario(&cfg)?;
    let notes = report
        .summary
        .iter()
        .map(|(k, v)| match v {
            Cell::Num(x) => format!("{k} = {x}"),
            Cell::Int(x) => format!("{k} = {x}"),
            Cell::Bool(x) => format!("{k} = {x}"),
            Cell::Text(x) => format!("{k} = {x}"),
        })
        .collect();
    Ok(Outcome {
        stdout: report.render(cfg.format),
        notes,
    })
}

fn catalog_specs(path: Option<&PathBuf>) -> anyhow::Result<Vec<ChipSpec>> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(chipdb::parse_catalog(&text)?)
        }
        None => Ok(chipdb::bundled_catalog()),
    }
}

fn find_product<'a>(specs: &'a [ChipSpec], name: &str) -> anyhow::Result<&'a ChipSpec> {
    let needle = name.to_lowercase();
    specs
        .iter()
        .find(|s| s.product.to_lowercase() == needle)
        .or_else(|| specs.iter().find(|s| s.product.to_lowercase().contains(&needle)))
        .ok_or_else(|| anyhow!("no product matching {name:?}"))
}

fn render(d: &Dataset, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => d.to_csv_string(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&d.to_json_records()).expect("JSON serializes");
            s.push('\n');
            s
        }
    }
}

fn run_chipdb(action: &ChipdbAction, format: OutputFormat) -> anyhow::Result<Outcome> {
    let table = |specs: &[ChipSpec]| {
        let checks = chipdb::check_heat_density(specs);
        let mut d = Dataset::new([
            "device",
            "company",
            "product",
            "node_nm",
            "power_w",
            "package_cm2",
            "stated_w_cm2",
            "computed_w_cm2",
            "consistent",
        ]);
        for (s, c) in specs.iter().zip(&checks) {
            d.push(vec![
                s.device_class.as_str().into(),
                s.company.as_str().into(),
                s.product.as_str().into(),
                Cell::Int(s.node_nm.into()),
                Cell::Num(s.power_w),
                Cell::Num(s.package_cm2),
                Cell::Num(s.stated_heat_density),
                Cell::Num(round2(c.computed)),
                Cell::Bool(c.ok),
            ]);
        }
        (d, checks)
    };
    match action {
        ChipdbAction::List { catalog } => {
            let specs = catalog_specs(catalog.as_ref())?;
            let (d, checks) = table(&specs);
            let notes = checks
                .iter()
                .filter(|c| !c.ok)
                .map(|c| {
                    format!(
                        "{}: stated {:.2} W/cm² but power/area = {:.2} W/cm²",
                        c.product, c.stated, c.computed
                    )
                })
                .collect();
            Ok(Outcome {
                stdout: render(&d, format),
                notes,
            })
        }
        ChipdbAction::Validate { catalog } => {
            let text = match catalog {
                Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
                None => chipdb::bundled_catalog_text().to_string(),
            };
            let specs = chipdb::load_catalog(&text)?;
            Ok(Outcome::line(format!("{} rows valid", specs.len())))
        }
        ChipdbAction::Show { product, catalog } => {
            let specs = catalog_specs(catalog.as_ref())?;
            let spec = find_product(&specs, product)?.clone();
            let (d, _) = table(std::slice::from_ref(&spec));
            Ok(Outcome {
                stdout: render(&d, format),
                notes: Vec::new(),
            })
        }
    }
}

fn run_simulate(args: &SimulateArgs, format: OutputFormat) -> anyhow::Result<Outcome> {
    let handset = args.handset.handset()?;
    let policy = match args.policy {
        PolicyArg::Hard => ThrottlePolicy::hard_shutoff(),
        PolicyArg::StepDown => ThrottlePolicy::step_down(args.step_fraction)?,
    };
    let policy = match args.recovery {
        RecoveryArg::None => policy,
        RecoveryArg::Cooldown => policy.with_recovery(Recovery::LinearCooldown, None),
    };
    let link = match (args.snr, args.bw) {
        (Some(snr), Some(bw)) => Some(LinkConfig::new(bw, args.streams, snr)?),
        _ => None,
    };
    let trace = simulate_session(
        &handset,
        link.as_ref(),
        &OfferedLoad::Constant(args.rate),
        &policy,
        args.duration,
        args.step,
    )?;
    let mut notes = vec![format!("R_max = {}", rmax_of(&handset)?)];
    match trace.first_throttle() {
        Some(t) => notes.push(format!(
            "first throttle at {t:.2} s ({} events)",
            trace.throttle_events.len()
        )),
        None => notes.push("no throttling".into()),
    }
    Ok(Outcome {
        stdout: render(&trace.to_dataset(), format),
        notes,
    })
}
