//! Heat-bath Glauber dynamics driven by an explicit random mapping stream:
//! single chains, the grand coupling, exact sampling from the past, and
//! censored and systematic block dynamics.

mod blocks;
mod cftp;
mod chain;
mod stream;

pub use blocks::{block_graph, censored_run, cylinder_fifths, halves, systematic_block_step, Block, BlockSchedule};
pub use cftp::{coupling_time, coupling_tv_upper, pair_step, Cftp, CftpSample, CouplingEstimate, DEFAULT_CAP};
pub use chain::{heat_bath_step, Chain, GrandCoupling};
pub use stream::{StreamCursor, Update, UpdateStream};

pub use crate::exactref::HeatBath;
