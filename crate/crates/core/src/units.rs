//! Physical constants, unit-bearing scalars and the parameter records shared
//! by every model in the crate.
//!
//! All records are immutable value objects. Checked constructors reject
//! values outside the physical domain so the model functions never need to
//! re-validate their inputs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, ModelError, Result};

/// Offset between the Celsius and Kelvin scales.
pub const CELSIUS_OFFSET: f64 = 273.15;

/// Boltzmann constant rounded to three significant figures, the value the
/// reference results were computed with.
pub const BOLTZMANN_3SF: f64 = 1.38e-23;

/// CODATA 2018 exact Boltzmann constant.
pub const BOLTZMANN_CODATA: f64 = 1.380_649e-23;

/// Temperature at which the Landauer bound is evaluated unless overridden.
pub const DEFAULT_LANDAUER_TEMP_K: f64 = 300.0;

/// Upper bound on the baseband share of chip compute power: application
/// processor plus storage take at least 64 %.
pub const BETA_MAX: f64 = 0.34;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    boltzmann_k: f64,
}

impl PhysicalConstants {
    pub fn new(boltzmann_k: f64) -> Result<Self> {
        if !(boltzmann_k.is_finite() && boltzmann_k > 0.0) {
            return Err(invalid("Boltzmann constant", boltzmann_k, "must be finite and > 0"));
        }
        Ok(Self { boltzmann_k })
    }

    pub fn codata() -> Self {
        Self {
            boltzmann_k: BOLTZMANN_CODATA,
        }
    }

    pub fn boltzmann_k(&self) -> f64 {
        self.boltzmann_k
    }

    pub fn ln2(&self) -> f64 {
        std::f64::consts::LN_2
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            boltzmann_k: BOLTZMANN_3SF,
        }
    }
}

/// Minimum energy in joules to erase one bit at `temp`: k·T·ln2.
pub fn landauer_bit_energy(constants: &PhysicalConstants, temp: Temperature) -> f64 {
    constants.boltzmann_k() * temp.kelvin() * constants.ln2()
}

fn non_negative(quantity: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(invalid(quantity, value, "must be finite and >= 0"))
    }
}

fn positive(quantity: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(quantity, value, "must be finite and > 0"))
    }
}

/// Data rate in bits per second.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Rate(f64);

impl Rate {
    pub const ZERO: Rate = Rate(0.0);

    pub fn from_bps(bps: f64) -> Result<Self> {
        non_negative("rate", bps).map(Rate)
    }

    pub fn from_gbps(gbps: f64) -> Result<Self> {
        Self::from_bps(gbps * 1e9)
    }

    pub fn bps(self) -> f64 {
        self.0
    }

    pub fn gbps(self) -> f64 {
        self.0 / 1e9
    }

    pub fn scaled(self, factor: f64) -> Result<Self> {
        Self::from_bps(self.0 * factor)
    }

    pub fn min(self, other: Rate) -> Rate {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }
}

impl TryFrom<f64> for Rate {
    type Error = ModelError;
    fn try_from(v: f64) -> Result<Self> {
        Rate::from_bps(v)
    }
}

impl From<Rate> for f64 {
    fn from(r: Rate) -> f64 {
        r.0
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (scale, unit) = match self.0 {
            v if v >= 1e9 => (1e9, "Gbps"),
            v if v >= 1e6 => (1e6, "Mbps"),
            v if v >= 1e3 => (1e3, "kbps"),
            _ => (1.0, "bps"),
        };
        let precision = f.precision().unwrap_or(2);
        write!(f, "{:.*} {}", precision, self.0 / scale, unit)
    }
}

impl FromStr for Rate {
    type Err = ModelError;

    /// Accepts a bare number (bits/s) or one of the suffixes `bps`, `kbps`,
    /// `Mbps`, `Gbps` (case-insensitive, optional whitespace).
    fn from_str(s: &str) -> Result<Self> {
        let v = parse_suffixed(
            s,
            "rate",
            &[("gbps", 1e9), ("mbps", 1e6), ("kbps", 1e3), ("bps", 1.0)],
        )?;
        Rate::from_bps(v)
    }
}

/// Splits a trailing unit suffix off `s` and scales the numeric part.
pub(crate) fn parse_suffixed(s: &str, what: &'static str, suffixes: &[(&str, f64)]) -> Result<f64> {
    let trimmed = s.trim();
    let lower = trimmed.to_ascii_lowercase();
    let (number, scale) = suffixes
        .iter()
        .find_map(|(suffix, scale)| lower.strip_suffix(suffix).map(|n| (n.trim(), *scale)))
        .unwrap_or((lower.as_str(), 1.0));
    number
        .parse::<f64>()
        .map(|v| v * scale)
        .map_err(|_| ModelError::Parse {
            what,
            input: s.to_string(),
        })
}

/// Power in watts.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Power(f64);

impl Power {
    pub const ZERO: Power = Power(0.0);

    pub fn from_watts(w: f64) -> Result<Self> {
        non_negative("power", w).map(Power)
    }

    pub fn from_milliwatts(mw: f64) -> Result<Self> {
        Self::from_watts(mw * 1e-3)
    }

    pub fn watts(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Power {
    type Error = ModelError;
    fn try_from(v: f64) -> Result<Self> {
        Power::from_watts(v)
    }
}

impl From<Power> for f64 {
    fn from(p: Power) -> f64 {
        p.0
    }
}

impl fmt::Display for Power {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let precision = f.precision().unwrap_or(4);
        write!(f, "{:.*} W", precision, self.0)
    }
}

/// Absolute temperature in kelvin.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Temperature(f64);

impl Temperature {
    pub fn from_kelvin(k: f64) -> Result<Self> {
        positive("temperature", k).map(Temperature)
    }

    pub fn from_celsius(c: f64) -> Result<Self> {
        Self::from_kelvin(c + CELSIUS_OFFSET)
    }

    pub fn kelvin(self) -> f64 {
        self.0
    }

    pub fn celsius(self) -> f64 {
        self.0 - CELSIUS_OFFSET
    }
}

impl TryFrom<f64> for Temperature {
    type Error = ModelError;
    fn try_from(v: f64) -> Result<Self> {
        Temperature::from_kelvin(v)
    }
}

impl From<Temperature> for f64 {
    fn from(t: Temperature) -> f64 {
        t.0
    }
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2} K ({:.2} °C)", self.0, self.celsius())
    }
}

/// Where a node's gap factor came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GapProvenance {
    /// Published estimate.
    Stated,
    /// Recovered by inverting the R_max formula at a published R_max
    /// endpoint under the default handset parameters.
    DerivedFromRmax { target_bps: f64 },
    /// Supplied by the user.
    User,
}

/// A semiconductor process node and its switching-energy gap to the
/// Landauer limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiconductorNode {
    feature_nm: f64,
    gap_factor: f64,
    provenance: GapProvenance,
}

/// Published gap factor of 5 nm silicon.
pub const GAP_5NM: f64 = 454.2;
/// Gap factor recovered from R_max = 2.17 Gbps at β = 0.34.
pub const GAP_10NM: f64 = 2_039.343_769_986_327;
/// Gap factor recovered from R_max = 1.55 Gbps at β = 0.34.
pub const GAP_14NM: f64 = 2_855.081_277_980_857;

impl SemiconductorNode {
    pub fn new(feature_nm: f64, gap_factor: f64) -> Result<Self> {
        positive("feature size", feature_nm)?;
        if !(gap_factor.is_finite() && gap_factor >= 1.0) {
            return Err(invalid(
                "gap factor",
                gap_factor,
                "must be >= 1 (switching energy cannot beat the Landauer limit)",
            ));
        }
        Ok(Self {
            feature_nm,
            gap_factor,
            provenance: GapProvenance::User,
        })
    }

    pub fn nm5() -> Self {
        Self {
            feature_nm: 5.0,
            gap_factor: GAP_5NM,
            provenance: GapProvenance::Stated,
        }
    }

    pub fn nm10() -> Self {
        Self {
            feature_nm: 10.0,
            gap_factor: GAP_10NM,
            provenance: GapProvenance::DerivedFromRmax { target_bps: 2.17e9 },
        }
    }

    pub fn nm14() -> Self {
        Self {
            feature_nm: 14.0,
            gap_factor: GAP_14NM,
            provenance: GapProvenance::DerivedFromRmax { target_bps: 1.55e9 },
        }
    }

    /// Built-in preset for a feature size, if one exists.
    pub fn preset(feature_nm: u32) -> Option<Self> {
        match feature_nm {
            5 => Some(Self::nm5()),
            10 => Some(Self::nm10()),
            14 => Some(Self::nm14()),
            _ => None,
        }
    }

    pub fn presets() -> [Self; 3] {
        [Self::nm5(), Self::nm10(), Self::nm14()]
    }

    pub fn feature_nm(&self) -> f64 {
        self.feature_nm
    }

    pub fn gap_factor(&self) -> f64 {
        self.gap_factor
    }

    pub fn provenance(&self) -> GapProvenance {
        self.provenance
    }

    pub fn with_gap_factor(self, gap_factor: f64) -> Result<Self> {
        Self::new(self.feature_nm, gap_factor)
    }
}

impl FromStr for SemiconductorNode {
    type Err = ModelError;

    /// Parses `5nm`, `10`, `14 nm`, ... into one of the built-in presets.
    fn from_str(s: &str) -> Result<Self> {
        let nm = parse_suffixed(s, "semiconductor node", &[("nm", 1.0)])?;
        if nm.fract() != 0.0 || nm < 0.0 {
            return Err(ModelError::Parse {
                what: "semiconductor node",
                input: s.to_string(),
            });
        }
        Self::preset(nm as u32).ok_or_else(|| ModelError::Parse {
            what: "semiconductor node (known presets: 5nm, 10nm, 14nm)",
            input: s.to_string(),
        })
    }
}

/// Baseband and thermal-budget parameters of a handset chip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChipProfile {
    node: SemiconductorNode,
    k_bp: f64,
    fanout_f0: f64,
    activity_alpha: f64,
    beta: f64,
    p_td: Power,
}

pub const DEFAULT_K_BP: f64 = 1e8;
/// Upper end of the typical 3-4 fanout range; with α = 0.2 this is the only
/// combination that lands on the published 9.74 Gbps endpoint.
pub const DEFAULT_FANOUT: f64 = 4.0;
pub const DEFAULT_ACTIVITY: f64 = 0.2;
pub const DEFAULT_P_TD_W: f64 = 3.0;

fn check_beta(beta: f64) -> Result<f64> {
    if beta.is_finite() && beta > 0.0 && beta <= BETA_MAX {
        Ok(beta)
    } else {
        Err(invalid("beta", beta, "must lie in (0, 0.34]"))
    }
}

impl ChipProfile {
    /// Default chip (K_BP = 1e8, F0 = 4, α = 0.2, P_TD = 3 W) on `node`.
    pub fn new(node: SemiconductorNode, beta: f64) -> Result<Self> {
        Self::typical(
            node,
            DEFAULT_K_BP,
            DEFAULT_FANOUT,
            DEFAULT_ACTIVITY,
            beta,
            Power::from_watts(DEFAULT_P_TD_W)?,
        )
    }

    /// Checked against the typical circuit ranges: 3 ≤ F0 ≤ 4, 0.1 ≤ α ≤ 0.2.
    pub fn typical(
        node: SemiconductorNode,
        k_bp: f64,
        fanout_f0: f64,
        activity_alpha: f64,
        beta: f64,
        p_td: Power,
    ) -> Result<Self> {
        if !(3.0..=4.0).contains(&fanout_f0) {
            return Err(invalid("fanout F0", fanout_f0, "typical range is [3, 4]"));
        }
        if !(0.1..=0.2).contains(&activity_alpha) {
            return Err(invalid("activity factor", activity_alpha, "typical range is [0.1, 0.2]"));
        }
        Self::unchecked(node, k_bp, fanout_f0, activity_alpha, beta, p_td)
    }

    /// Skips the typical-range checks on F0 and α; any positive value is
    /// accepted. β is still capped.
    pub fn unchecked(
        node: SemiconductorNode,
        k_bp: f64,
        fanout_f0: f64,
        activity_alpha: f64,
        beta: f64,
        p_td: Power,
    ) -> Result<Self> {
        Ok(Self {
            node,
            k_bp: positive("K_BP", k_bp)?,
            fanout_f0: positive("fanout F0", fanout_f0)?,
            activity_alpha: positive("activity factor", activity_alpha)?,
            beta: check_beta(beta)?,
            p_td,
        })
    }

    pub fn node(&self) -> SemiconductorNode {
        self.node
    }
    pub fn k_bp(&self) -> f64 {
        self.k_bp
    }
    pub fn fanout_f0(&self) -> f64 {
        self.fanout_f0
    }
    pub fn activity_alpha(&self) -> f64 {
        self.activity_alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn p_td(&self) -> Power {
        self.p_td
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        Ok(Self {
            beta: check_beta(beta)?,
            ..self
        })
    }

    pub fn with_node(self, node: SemiconductorNode) -> Self {
        Self { node, ..self }
    }

    pub fn with_p_td(self, p_td: Power) -> Self {
        Self { p_td, ..self }
    }
}

/// Receive-chain parameters of the handset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfChainConfig {
    n_trx: u32,
    p_lna: Power,
    pae_eta: f64,
    lambda_coupling: f64,
}

pub const DEFAULT_N_TRX: u32 = 4;
pub const DEFAULT_P_LNA_MW: f64 = 24.3;
pub const DEFAULT_PAE: f64 = 0.59;
pub const DEFAULT_LAMBDA: f64 = 0.30;

impl RfChainConfig {
    pub fn new(n_trx: u32, p_lna: Power, pae_eta: f64, lambda_coupling: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&pae_eta) {
            return Err(invalid("power-added efficiency", pae_eta, "must lie in [0, 1)"));
        }
        Self::unchecked(n_trx, p_lna, pae_eta, lambda_coupling)
    }

    /// Like [`RfChainConfig::new`] but admits the ideal η = 1 boundary.
    pub fn unchecked(n_trx: u32, p_lna: Power, pae_eta: f64, lambda_coupling: f64) -> Result<Self> {
        if n_trx == 0 {
            return Err(invalid("antenna count", 0.0, "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&pae_eta) {
            return Err(invalid("power-added efficiency", pae_eta, "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&lambda_coupling) {
            return Err(invalid("heat coupling ratio", lambda_coupling, "must lie in [0, 1]"));
        }
        Ok(Self {
            n_trx,
            p_lna,
            pae_eta,
            lambda_coupling,
        })
    }

    pub fn n_trx(&self) -> u32 {
        self.n_trx
    }
    pub fn p_lna(&self) -> Power {
        self.p_lna
    }
    pub fn pae_eta(&self) -> f64 {
        self.pae_eta
    }
    pub fn lambda_coupling(&self) -> f64 {
        self.lambda_coupling
    }
}

impl Default for RfChainConfig {
    fn default() -> Self {
        Self {
            n_trx: DEFAULT_N_TRX,
            p_lna: Power(DEFAULT_P_LNA_MW * 1e-3),
            pae_eta: DEFAULT_PAE,
            lambda_coupling: DEFAULT_LAMBDA,
        }
    }
}

/// Lumped thermal mass of the surface hotspot above the chip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePlate {
    specific_heat: f64,
    density: f64,
    area: f64,
    thickness: f64,
    t_envir: Temperature,
    t_safe: Temperature,
    leakage_w_per_k: f64,
}

impl SurfacePlate {
    /// `specific_heat` in J/(kg·K), `density` in kg/m³, `area` in m²,
    /// `thickness` in m.
    pub fn new(
        specific_heat: f64,
        density: f64,
        area: f64,
        thickness: f64,
        t_envir: Temperature,
        t_safe: Temperature,
    ) -> Result<Self> {
        positive("specific heat", specific_heat)?;
        positive("density", density)?;
        positive("plate area", area)?;
        positive("plate thickness", thickness)?;
        if t_safe.kelvin() <= t_envir.kelvin() {
            return Err(invalid(
                "safe temperature",
                t_safe.kelvin(),
                "must exceed the ambient temperature",
            ));
        }
        Ok(Self {
            specific_heat,
            density,
            area,
            thickness,
            t_envir,
            t_safe,
            leakage_w_per_k: 0.0,
        })
    }

    /// Heat lost from the plate to ambient per kelvin of overtemperature.
    /// Zero (the default) sends all excess heat into the plate.
    pub fn with_leakage(self, leakage_w_per_k: f64) -> Result<Self> {
        Ok(Self {
            leakage_w_per_k: non_negative("plate leakage", leakage_w_per_k)?,
            ..self
        })
    }

    pub fn with_t_envir(self, t_envir: Temperature) -> Result<Self> {
        Self::new(
            self.specific_heat,
            self.density,
            self.area,
            self.thickness,
            t_envir,
            self.t_safe,
        )?
        .with_leakage(self.leakage_w_per_k)
    }

    pub fn specific_heat(&self) -> f64 {
        self.specific_heat
    }
    pub fn density(&self) -> f64 {
        self.density
    }
    pub fn area(&self) -> f64 {
        self.area
    }
    pub fn thickness(&self) -> f64 {
        self.thickness
    }
    pub fn t_envir(&self) -> Temperature {
        self.t_envir
    }
    pub fn t_safe(&self) -> Temperature {
        self.t_safe
    }
    pub fn leakage_w_per_k(&self) -> f64 {
        self.leakage_w_per_k
    }

    /// kg
    pub fn mass(&self) -> f64 {
        self.density * self.area * self.thickness
    }

    /// ℂ·M in J/K.
    pub fn heat_capacity(&self) -> f64 {
        self.specific_heat * self.mass()
    }

    /// Temperature headroom t_safe − t_envir in K.
    pub fn headroom(&self) -> f64 {
        self.t_safe.kelvin() - self.t_envir.kelvin()
    }
}

impl Default for SurfacePlate {
    /// 1 cm² × 1 mm of 7075-T6 aluminium between 27 °C and 45 °C.
    fn default() -> Self {
        Self {
            specific_heat: 870.0,
            density: 3000.0,
            area: 1e-4,
            thickness: 1e-3,
            t_envir: Temperature(27.0 + CELSIUS_OFFSET),
            t_safe: Temperature(45.0 + CELSIUS_OFFSET),
            leakage_w_per_k: 0.0,
        }
    }
}

/// Everything needed to evaluate one handset: chip, receive chain, surface
/// plate, and the temperature and constants used for the Landauer bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Handset {
    pub chip: ChipProfile,
    pub rf: RfChainConfig,
    pub plate: SurfacePlate,
    pub landauer_temp: Temperature,
    pub constants: PhysicalConstants,
}

impl Handset {
    /// Default handset on `node` with baseband share `beta`.
    pub fn reference(node: SemiconductorNode, beta: f64) -> Result<Self> {
        Ok(Self {
            chip: ChipProfile::new(node, beta)?,
            rf: RfChainConfig::default(),
            plate: SurfacePlate::default(),
            landauer_temp: Temperature(DEFAULT_LANDAUER_TEMP_K),
            constants: PhysicalConstants::default(),
        })
    }
}
