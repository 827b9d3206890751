//! Call-auction order matching.
//!
//! Given a book of bids and asks, the engine computes matchings that trade
//! as much volume as possible:
//!
//! * [`maximum_matching`] maximises volume with per-transaction prices,
//! * [`um_star`] finds the maximum-volume fair matching at a single price by
//!   sorting,
//! * [`uniform_star`] produces the same per-order quantities in worst-case
//!   linear time.
//!
//! The [`verify`] module checks validity, fairness and uniformity of any
//! matching and bounds the achievable volume.

pub mod bench;
pub mod engine;
pub mod error;
pub mod instance;
pub mod io;
pub mod orders;
pub mod selection;
pub mod verify;

pub use engine::{
    assign_uniform_price, make_fair, match_greedy, max_fair_matching, maximum_matching, um_star,
    uniform_ask, uniform_bid, uniform_star,
};
pub use error::{BookError, Error, Result};
pub use orders::{
    pad_with_dummy, range_of, split, strip_dummy, tradable, CompetitiveKey, DummyDescriptor,
    Matching, Order, OrderBook, Price, Side, Traded, Transaction, Volume, MAX_ORDER_FIELD,
    MAX_PRICE,
};
pub use selection::{select_kth, select_q, split_q, QuantitySplit};
pub use verify::{
    certified_upper_bound, check_bound, check_fair, check_uniform, check_valid,
    demand_supply_bound, element_distinctness, oracle_max_volume, oracle_uniform_volume, Check,
    VerificationReport, Violation,
};
