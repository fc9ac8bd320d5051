//! Downlink rate, link adaptation against R_max, and crossover SNRs.
//!
//! The downlink rate is modelled as `streams × BW × log2(1 + SNR)`: one
//! spatial stream per handset antenna, all at the same SNR. SNR crosses this
//! module's public boundary in dB and is held internally as a linear ratio.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, ModelError, Result};
use crate::units::{parse_suffixed, Power, Rate};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Per-stream spectral efficiency above which 2^x − 1 is no longer safely
/// representable in an f64.
pub const MAX_BITS_PER_HZ: f64 = 1000.0;

/// Relative gap below which R_downlink and R_max are reported as a tie.
pub const TIE_TOLERANCE: f64 = 1e-9;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Frequency or bandwidth in Hz.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Hertz(f64);

impl Hertz {
    pub fn new(hz: f64) -> Result<Self> {
        if hz.is_finite() && hz > 0.0 {
            Ok(Hertz(hz))
        } else {
            Err(invalid("frequency", hz, "must be finite and > 0"))
        }
    }

    pub fn mhz(mhz: f64) -> Result<Self> {
        Self::new(mhz * 1e6)
    }

    pub fn ghz(ghz: f64) -> Result<Self> {
        Self::new(ghz * 1e9)
    }

    pub fn hz(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Hertz {
    type Error = ModelError;
    fn try_from(v: f64) -> Result<Self> {
        Hertz::new(v)
    }
}

impl From<Hertz> for f64 {
    fn from(h: Hertz) -> f64 {
        h.0
    }
}

impl FromStr for Hertz {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self> {
        Hertz::new(parse_suffixed(
            s,
            "frequency",
            &[("ghz", 1e9), ("mhz", 1e6), ("khz", 1e3), ("hz", 1.0)],
        )?)
    }
}

impl fmt::Display for Hertz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (scale, unit) = match self.0 {
            v if v >= 1e9 => (1e9, "GHz"),
            v if v >= 1e6 => (1e6, "MHz"),
            v if v >= 1e3 => (1e3, "kHz"),
            _ => (1.0, "Hz"),
        };
        write!(f, "{} {}", self.0 / scale, unit)
    }
}

/// Linear signal-to-noise power ratio.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Snr(f64);

impl Snr {
    pub fn from_linear(ratio: f64) -> Result<Self> {
        if ratio.is_finite() && ratio > 0.0 {
            Ok(Snr(ratio))
        } else {
            Err(invalid("SNR", ratio, "linear ratio must be finite and > 0"))
        }
    }

    pub fn from_db(db: f64) -> Result<Self> {
        if !db.is_finite() {
            return Err(invalid("SNR", db, "dB value must be finite"));
        }
        Self::from_linear(db_to_linear(db))
    }

    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        linear_to_db(self.0)
    }
}

impl FromStr for Snr {
    type Err = ModelError;
    /// A dB value, with or without a `dB` suffix.
    fn from_str(s: &str) -> Result<Self> {
        Snr::from_db(parse_suffixed(s, "SNR", &[("db", 1.0)])?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    bandwidth: Hertz,
    streams: u32,
    snr: Snr,
}

impl LinkConfig {
    pub fn new(bandwidth: Hertz, streams: u32, snr: Snr) -> Result<Self> {
        if streams == 0 {
            return Err(invalid("stream count", 0.0, "must be >= 1"));
        }
        Ok(Self {
            bandwidth,
            streams,
            snr,
        })
    }

    pub fn bandwidth(&self) -> Hertz {
        self.bandwidth
    }
    pub fn streams(&self) -> u32 {
        self.streams
    }
    pub fn snr(&self) -> Snr {
        self.snr
    }

    pub fn with_snr(self, snr: Snr) -> Self {
        Self { snr, ..self }
    }
}

/// Base-station side parameters used to derive an SNR from geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power: Power,
    pub bs_antennas: u32,
    pub carrier: Hertz,
    pub distance_m: f64,
    pub cell_radius_m: f64,
    /// W/Hz
    pub noise_psd: f64,
}

impl LinkBudget {
    pub fn new(
        tx_power: Power,
        bs_antennas: u32,
        carrier: Hertz,
        distance_m: f64,
        cell_radius_m: f64,
        noise_psd_dbm_per_hz: f64,
    ) -> Result<Self> {
        if tx_power.watts() <= 0.0 {
            return Err(invalid("transmit power", tx_power.watts(), "must be > 0"));
        }
        if bs_antennas == 0 {
            return Err(invalid("base-station antenna count", 0.0, "must be >= 1"));
        }
        for (name, v) in [("distance", distance_m), ("cell radius", cell_radius_m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, v, "must be finite and > 0"));
            }
        }
        if !noise_psd_dbm_per_hz.is_finite() {
            return Err(invalid("noise PSD", noise_psd_dbm_per_hz, "must be finite"));
        }
        Ok(Self {
            tx_power,
            bs_antennas,
            carrier,
            distance_m,
            cell_radius_m,
            noise_psd: db_to_linear(noise_psd_dbm_per_hz) * 1e-3,
        })
    }

    /// 5 W, 256 antennas, 3.7 GHz, handset at the 100 m cell edge,
    /// −174 dBm/Hz.
    pub fn reference() -> Self {
        Self::new(Power::from_watts(5.0).unwrap(), 256, Hertz(3.7e9), 100.0, 100.0, -174.0)
            .expect("reference budget is valid")
    }

    pub fn with_carrier(self, carrier: Hertz) -> Self {
        Self { carrier, ..self }
    }

    pub fn with_distance(self, distance_m: f64) -> Result<Self> {
        Self::new(
            self.tx_power,
            self.bs_antennas,
            self.carrier,
            distance_m,
            self.cell_radius_m,
            linear_to_db(self.noise_psd * 1e3),
        )
    }

    /// The handset sits outside the nominal cell. Allowed, but worth flagging.
    pub fn beyond_cell_edge(&self) -> bool {
        self.distance_m > self.cell_radius_m
    }
}

/// R_downlink = streams × BW × log2(1 + SNR).
pub fn downlink_rate(link: &LinkConfig) -> Rate {
    let bps = f64::from(link.streams) * link.bandwidth.hz() * link.snr.linear().ln_1p() / std::f64::consts::LN_2;
    Rate::from_bps(bps).expect("capacity is non-negative")
}

/// Per-stream SNR from free-space path loss, with transmit power and array
/// gain split evenly over the streams. Uses the link's bandwidth and stream
/// count; its SNR is ignored.
pub fn snr_from_budget(budget: &LinkBudget, link: &LinkConfig) -> Result<Snr> {
    let streams = f64::from(link.streams);
    let path_gain = (SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * budget.carrier.hz() * budget.distance_m)).powi(2);
    let signal = (budget.tx_power.watts() / streams) * (f64::from(budget.bs_antennas) / streams) * path_gain;
    let noise = budget.noise_psd * link.bandwidth.hz();
    Snr::from_linear(signal / noise)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingConstraint {
    /// Channel offers more than the handset can process: R_phone = R_max.
    TerminalLimited,
    /// Handset could process more than the channel offers: R_phone = R_downlink.
    ChannelLimited,
    Tie,
}

impl BindingConstraint {
    pub fn label(self) -> &'static str {
        match self {
            BindingConstraint::TerminalLimited => "terminal_limited",
            BindingConstraint::ChannelLimited => "channel_limited",
            BindingConstraint::Tie => "tie",
        }
    }
}

impl fmt::Display for BindingConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdaptationDecision {
    pub r_downlink: Rate,
    pub r_max: Rate,
    pub r_phone: Rate,
    pub binding_constraint: BindingConstraint,
    /// |r_downlink − r_max|
    pub redundancy: Rate,
}

/// Link-adaptive receive rate: the smaller of R_max and R_downlink.
pub fn adapt(r_max: Rate, link: &LinkConfig) -> AdaptationDecision {
    let r_downlink = downlink_rate(link);
    let (d, m) = (r_downlink.bps(), r_max.bps());
    let gap = (d - m).abs();
    let scale = d.max(m);
    let binding_constraint = if gap <= TIE_TOLERANCE * scale {
        BindingConstraint::Tie
    } else if d > m {
        BindingConstraint::TerminalLimited
    } else {
        BindingConstraint::ChannelLimited
    };
    AdaptationDecision {
        r_downlink,
        r_max,
        r_phone: r_downlink.min(r_max),
        binding_constraint,
        redundancy: Rate::from_bps(gap).expect("absolute gap"),
    }
}

/// SNR in dB at which R_downlink equals `r_max`.
pub fn crossover_snr(r_max: Rate, bandwidth: Hertz, streams: u32) -> Result<f64> {
    if r_max.bps() <= 0.0 {
        return Err(invalid("R_max", r_max.bps(), "must be > 0"));
    }
    if streams == 0 {
        return Err(invalid("stream count", 0.0, "must be >= 1"));
    }
    let bits_per_hz = r_max.bps() / (f64::from(streams) * bandwidth.hz());
    if bits_per_hz > MAX_BITS_PER_HZ {
        return Err(ModelError::Overflow { bits_per_hz });
    }
    Ok(linear_to_db((bits_per_hz * std::f64::consts::LN_2).exp_m1()))
}
