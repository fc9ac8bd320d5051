//! Heat generation and the lumped surface-plate energy balance.
//!
//! While total heat stays within the thermal design power the surface sits at
//! ambient. Anything above it is absorbed by the hotspot plate:
//! `excess · t = ℂ·M·(T_sur − T_envir)`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::compute::bp_power;
use crate::error::{invalid, Result};
use crate::units::{ChipProfile, PhysicalConstants, Power, Rate, RfChainConfig, SurfacePlate, Temperature};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatReport {
    pub h_lna: Power,
    pub h_chip: Power,
    /// h_chip + λ·h_lna
    pub h_total: Power,
    pub p_td: Power,
    /// max(0, h_total − p_td)
    pub excess: Power,
}

/// Heat dissipated by the LNAs: N_TRX · P_LNA · (1 − η).
pub fn lna_heat(rf: &RfChainConfig) -> Power {
    let w = f64::from(rf.n_trx()) * rf.p_lna().watts() * (1.0 - rf.pae_eta());
    Power::from_watts(w).expect("LNA heat is non-negative")
}

pub fn heat_report(
    chip: &ChipProfile,
    rf: &RfChainConfig,
    rate: Rate,
    temp: Temperature,
    constants: &PhysicalConstants,
) -> HeatReport {
    let h_lna = lna_heat(rf);
    let h_chip = bp_power(chip, rate, temp, constants).p_chip;
    let h_total = h_chip.watts() + rf.lambda_coupling() * h_lna.watts();
    let p_td = chip.p_td();
    HeatReport {
        h_lna,
        h_chip,
        h_total: Power::from_watts(h_total).expect("total heat is non-negative"),
        p_td,
        excess: Power::from_watts((h_total - p_td.watts()).max(0.0)).expect("clamped at zero"),
    }
}

/// How long a heat load can be held before the plate reaches `t_safe`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum StableDuration {
    Finite(f64),
    Unbounded,
}

impl StableDuration {
    pub fn seconds(self) -> Option<f64> {
        match self {
            StableDuration::Finite(s) => Some(s),
            StableDuration::Unbounded => None,
        }
    }

    /// Finite seconds, or +∞.
    pub fn as_f64(self) -> f64 {
        self.seconds().unwrap_or(f64::INFINITY)
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, StableDuration::Unbounded)
    }
}

impl fmt::Display for StableDuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StableDuration::Finite(s) => write!(f, "{:.*} s", f.precision().unwrap_or(2), s),
            StableDuration::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for StableDuration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StableDuration::Finite(v) => s.serialize_f64(*v),
            StableDuration::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

pub fn stable_duration(report: &HeatReport, plate: &SurfacePlate) -> StableDuration {
    let excess = report.excess.watts();
    if excess <= 0.0 {
        return StableDuration::Unbounded;
    }
    let capacity = plate.heat_capacity();
    let headroom = plate.headroom();
    let leak = plate.leakage_w_per_k();
    if leak == 0.0 {
        return StableDuration::Finite(capacity * headroom / excess);
    }
    // With leakage the plate relaxes toward T_envir + excess/leak.
    let saturation = leak * headroom / excess;
    if saturation >= 1.0 {
        StableDuration::Unbounded
    } else {
        StableDuration::Finite(-(capacity / leak) * (-saturation).ln_1p())
    }
}

/// Plate temperature after holding `report`'s load for `elapsed` seconds,
/// clamped at `t_safe`.
pub fn surface_temperature(report: &HeatReport, plate: &SurfacePlate, elapsed: f64) -> Result<Temperature> {
    if !(elapsed.is_finite() && elapsed >= 0.0) {
        return Err(invalid("elapsed time", elapsed, "must be finite and >= 0"));
    }
    let excess = report.excess.watts();
    let capacity = plate.heat_capacity();
    let leak = plate.leakage_w_per_k();
    let rise = if leak == 0.0 {
        excess * elapsed / capacity
    } else {
        (excess / leak) * -(-leak * elapsed / capacity).exp_m1()
    };
    let t = (plate.t_envir().kelvin() + rise).min(plate.t_safe().kelvin());
    Temperature::from_kelvin(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compute::max_receiving_rate;
    use crate::units::{Handset, SemiconductorNode};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn report_at(h: &Handset, rate: Rate) -> HeatReport {
        heat_report(&h.chip, &h.rf, rate, h.landauer_temp, &h.constants)
    }

    fn excess_report(excess: f64) -> HeatReport {
        let w = |v| Power::from_watts(v).unwrap();
        HeatReport {
            h_lna: w(0.0),
            h_chip: w(3.0 + excess),
            h_total: w(3.0 + excess),
            p_td: w(3.0),
            excess: w(excess),
        }
    }

    #[test]
    fn lna_heat_reference_values() {
        assert!(rel(lna_heat(&RfChainConfig::default()).watts(), 0.039_852) < 1e-14);
        let p = Power::from_milliwatts(24.3).unwrap();
        let single = RfChainConfig::new(1, p, 0.59, 0.3).unwrap();
        assert!(rel(lna_heat(&single).watts(), 0.009_963) < 1e-14);
        let ideal = RfChainConfig::unchecked(4, p, 1.0, 0.3).unwrap();
        assert_eq!(lna_heat(&ideal), Power::ZERO);
    }

    #[test]
    fn heat_report_at_4gbps() {
        let h = Handset::reference(SemiconductorNode::nm5(), 0.1).unwrap();
        let r = report_at(&h, Rate::from_gbps(4.0).unwrap());
        assert!(rel(r.h_chip.watts(), 4.170_834_049_788_014) < 1e-12);
        assert!(rel(r.h_total.watts(), 4.182_789_649_788_014) < 1e-12);
        assert!(rel(r.excess.watts(), 1.182_789_649_788_014) < 1e-12);
    }

    #[test]
    fn idle_chip_has_no_excess() {
        let h = Handset::reference(SemiconductorNode::nm5(), 0.1).unwrap();
        let r = report_at(&h, Rate::ZERO);
        assert_eq!(r.h_chip, Power::ZERO);
        assert!(rel(r.h_total.watts(), 0.3 * 0.039_852) < 1e-14);
        assert_eq!(r.excess, Power::ZERO);
        assert!(stable_duration(&r, &h.plate).is_unbounded());
    }

    #[test]
    fn no_excess_at_rmax() {
        let h = Handset::reference(SemiconductorNode::nm5(), 0.34).unwrap();
        let rmax = max_receiving_rate(&h.chip, &h.rf, h.landauer_temp, &h.constants).unwrap();
        let r = report_at(&h, rmax);
        assert!(r.excess.watts() <= 1e-10 * h.chip.p_td().watts());
    }

    #[test]
    fn duration_at_4gbps() {
        let h = Handset::reference(SemiconductorNode::nm5(), 0.1).unwrap();
        let r = report_at(&h, Rate::from_gbps(4.0).unwrap());
        let d = stable_duration(&r, &h.plate).seconds().unwrap();
        assert!(rel(d, 3.971_965_768_251_354) < 1e-12);
    }

    #[test]
    fn duration_halves_when_excess_doubles() {
        let plate = SurfacePlate::default();
        let a = stable_duration(&excess_report(0.7), &plate).as_f64();
        let b = stable_duration(&excess_report(1.4), &plate).as_f64();
        assert!(rel(b, a / 2.0) < 1e-15);
    }

    #[test]
    fn temperature_midpoint_and_clamp() {
        let h = Handset::reference(SemiconductorNode::nm5(), 0.1).unwrap();
        let r = report_at(&h, Rate::from_gbps(4.0).unwrap());
        let d = stable_duration(&r, &h.plate).as_f64();
        let mid = surface_temperature(&r, &h.plate, d / 2.0).unwrap();
        assert!((mid.celsius() - 36.0).abs() < 1e-9);
        let end = surface_temperature(&r, &h.plate, d).unwrap();
        assert!((end.celsius() - 45.0).abs() < 1e-9);
        let later = surface_temperature(&r, &h.plate, 10.0 * d).unwrap();
        assert_eq!(later, h.plate.t_safe());
        assert!(surface_temperature(&r, &h.plate, -1.0).is_err());
    }

    #[test]
    fn idle_surface_stays_at_ambient() {
        let plate = SurfacePlate::default();
        let r = excess_report(0.0);
        for t in [0.0, 1.0, 1e6] {
            assert_eq!(surface_temperature(&r, &plate, t).unwrap(), plate.t_envir());
        }
    }

    #[test]
    fn leakage_lengthens_duration_and_can_make_it_unbounded() {
        let plate = SurfacePlate::default();
        let r = excess_report(1.0);
        let sealed = stable_duration(&r, &plate).as_f64();
        let leaky = plate.with_leakage(0.01).unwrap();
        let d = stable_duration(&r, &leaky).as_f64();
        assert!(d > sealed);
        // The plate reaches exactly t_safe at the reported duration.
        let t = surface_temperature(&r, &leaky, d).unwrap();
        assert!((t.kelvin() - plate.t_safe().kelvin()).abs() < 1e-9);
        // 1 W / (0.1 W/K) = 10 K of headroom needed < 18 K available.
        let very_leaky = plate.with_leakage(0.1).unwrap();
        assert!(stable_duration(&r, &very_leaky).is_unbounded());
    }

    proptest! {
        #[test]
        fn energy_conservation(excess in 1e-6f64..100.0) {
            let plate = SurfacePlate::default();
            let d = stable_duration(&excess_report(excess), &plate).as_f64();
            let stored = plate.heat_capacity() * plate.headroom();
            prop_assert!(rel(excess * d, stored) < 1e-12);
        }

        #[test]
        fn surface_temperature_monotone_and_clamped(
            excess in 0.0f64..50.0, a in 0.0f64..100.0, b in 0.0f64..100.0
        ) {
            let plate = SurfacePlate::default();
            let r = excess_report(excess);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let tl = surface_temperature(&r, &plate, lo).unwrap();
            let th = surface_temperature(&r, &plate, hi).unwrap();
            prop_assert!(tl <= th);
            prop_assert!(th <= plate.t_safe());
            prop_assert!(tl >= plate.t_envir());
        }

        #[test]
        fn duration_decreases_with_rate_above_rmax(beta in 0.01f64..0.34, f1 in 1.001f64..4.0, f2 in 1.001f64..4.0) {
            prop_assume!((f1 - f2).abs() > 1e-6);
            let h = Handset::reference(SemiconductorNode::nm5(), beta).unwrap();
            let rmax = max_receiving_rate(&h.chip, &h.rf, h.landauer_temp, &h.constants).unwrap();
            let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
            let dl = stable_duration(&report_at(&h, rmax.scaled(lo).unwrap()), &h.plate).as_f64();
            let dh = stable_duration(&report_at(&h, rmax.scaled(hi).unwrap()), &h.plate).as_f64();
            prop_assert!(dh < dl);
        }
    }
}
