//! Baseband computation load and the closed-form maximum receiving rate.
//!
//! Every received bit costs `K_BP` logic operations, each switching
//! `F0·α` gate loads at `G_S` times the Landauer energy. The baseband gets a
//! share β of the chip compute power, and the chip as a whole may dissipate
//! at most `P_TD` minus the LNA heat coupled into it. Solving that budget for
//! the rate gives R_max.

use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::thermal::lna_heat;
use crate::units::{landauer_bit_energy, ChipProfile, PhysicalConstants, Power, Rate, RfChainConfig, Temperature};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComputePowerBreakdown {
    /// Baseband processor power.
    pub p_bp: Power,
    /// Whole-chip compute power, p_bp / β.
    pub p_chip: Power,
    /// Baseband energy per received bit in joules.
    pub per_bit_energy_bp: f64,
}

/// Logic operations per second needed to receive at `rate`.
pub fn baseband_ops(chip: &ChipProfile, rate: Rate) -> f64 {
    chip.k_bp() * rate.bps()
}

/// Baseband energy per received bit: K_BP·F0·α·G_S·kT·ln2.
pub fn per_bit_energy(chip: &ChipProfile, temp: Temperature, constants: &PhysicalConstants) -> f64 {
    chip.k_bp() * switching_energy(chip, temp, constants)
}

/// Energy of a single logic operation: F0·α·G_S·kT·ln2.
fn switching_energy(chip: &ChipProfile, temp: Temperature, constants: &PhysicalConstants) -> f64 {
    chip.fanout_f0() * chip.activity_alpha() * chip.node().gap_factor() * landauer_bit_energy(constants, temp)
}

pub fn bp_power(
    chip: &ChipProfile,
    rate: Rate,
    temp: Temperature,
    constants: &PhysicalConstants,
) -> ComputePowerBreakdown {
    let p_bp = baseband_ops(chip, rate) * switching_energy(chip, temp, constants);
    // Both factors are non-negative and finite for validated inputs.
    let p_bp = Power::from_watts(p_bp).expect("baseband power is non-negative");
    let p_chip = Power::from_watts(p_bp.watts() / chip.beta()).expect("chip power is non-negative");
    ComputePowerBreakdown {
        p_bp,
        p_chip,
        per_bit_energy_bp: per_bit_energy(chip, temp, constants),
    }
}

/// Compute budget left for the chip once coupled LNA heat is accounted for.
fn compute_budget(chip: &ChipProfile, rf: &RfChainConfig) -> Result<f64> {
    let coupled = rf.lambda_coupling() * lna_heat(rf).watts();
    let p_td = chip.p_td().watts();
    if coupled >= p_td {
        return Err(ModelError::BudgetExhausted {
            coupled_lna_w: coupled,
            p_td_w: p_td,
        });
    }
    Ok(p_td - coupled)
}

/// R_max = β(P_TD − λH_LNA) / (K_BP·F0·α·G_S·kT·ln2).
pub fn max_receiving_rate(
    chip: &ChipProfile,
    rf: &RfChainConfig,
    temp: Temperature,
    constants: &PhysicalConstants,
) -> Result<Rate> {
    let budget = compute_budget(chip, rf)?;
    Rate::from_bps(chip.beta() * budget / per_bit_energy(chip, temp, constants))
}

/// Inverts [`max_receiving_rate`] for the gap factor G_S. The gap factor of
/// `chip`'s node is ignored.
pub fn gap_from_rmax(
    target_rmax: Rate,
    chip: &ChipProfile,
    rf: &RfChainConfig,
    temp: Temperature,
    constants: &PhysicalConstants,
) -> Result<f64> {
    if target_rmax.bps() <= 0.0 {
        return Err(ModelError::InvalidQuantity {
            quantity: "target R_max",
            value: target_rmax.bps(),
            reason: "must be > 0",
        });
    }
    let budget = compute_budget(chip, rf)?;
    let per_bit_without_gap = chip.k_bp()
        * chip.fanout_f0()
        * chip.activity_alpha()
        * landauer_bit_energy(constants, temp);
    Ok(chip.beta() * budget / (target_rmax.bps() * per_bit_without_gap))
}
