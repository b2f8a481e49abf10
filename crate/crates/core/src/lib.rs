//! Secrecy rates, rate regions and toy-scale coding simulations for MIMO
//! wiretap channels whose eavesdropper channel varies arbitrarily.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod codebook;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod mc;
pub mod noise;
pub mod quantization;
pub mod rates;
pub mod region;

pub use channel::{canonicalize_eve, EveState, EveTrace, MainChannel, PowerConfig};
pub use codebook::{BinningParams, Codebook, SecrecyMode, ToyCaps};
pub use error::{Result, WiretapError};
pub use linalg::ComplexMat;
pub use quantization::{PerturbationRadii, QuantGrid, ScheduleParams};
pub use rates::{Convention, LeakageMode};
pub use region::{RatePoint, RateRegion};
