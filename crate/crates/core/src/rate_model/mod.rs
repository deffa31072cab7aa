//! SINRs, stream rates and max-min objectives.
//!
//! [`coordinated_sinrs`] and [`cooperative_sinrs`] evaluate the closed-form
//! SINR expressions of the two integration schemes; [`rsma_rates`] turns them
//! into beam and CU totals for given common-rate portions. The
//! [`DecodeLayout`] view enumerates every (receiver, stream) decode event and
//! is what the optimizers build their constraints from; it also covers NOMA
//! with successive interference cancellation.

mod beamformers;
mod layout;
mod rates;
mod sinr;

pub use beamformers::{Access, BeamformerRecord, BeamformerSet, Scheme, TransmitStrategy};
pub use layout::{
    global_receivers, noma_rates, Column, ColumnRole, DecodeEvent, DecodeLayout, Evaluation, NomaOrder, Pool, RateLink, ReceiverId,
    UserRef,
};
pub use rates::{
    beam_private_minimum, mmf_objective, optimal_portions, rsma_rates, water_fill, CommonRatePortions,
    DecodabilityViolation, PortionPool, RateVector, DECODABILITY_TOL,
};
pub use sinr::{cooperative_sinrs, coordinated_sinrs, sinrs, SinrTable};

#[cfg(test)]
mod tests;
