use thiserror::Error;

/// Errors raised by the model layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid {quantity}: {value} ({reason})")]
    InvalidQuantity {
        quantity: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The LNA heat coupled into the chip already meets or exceeds the thermal
    /// design power, so no compute budget remains for the baseband.
    #[error("thermal budget exhausted: coupled LNA heat {coupled_lna_w} W >= P_TD {p_td_w} W")]
    BudgetExhausted { coupled_lna_w: f64, p_td_w: f64 },

    #[error("spectral efficiency {bits_per_hz} bit/s/Hz per stream is beyond the representable range")]
    Overflow { bits_per_hz: f64 },

    #[error("invalid time step {step} s for a session of {duration} s")]
    InvalidStep { step: f64, duration: f64 },

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

pub(crate) fn invalid(quantity: &'static str, value: f64, reason: &'static str) -> ModelError {
    ModelError::InvalidQuantity {
        quantity,
        value,
        reason,
    }
}
