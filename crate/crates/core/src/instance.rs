//! Seeded random order books.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::orders::{Order, OrderBook, MAX_ORDER_FIELD, MAX_PRICE};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSpec {
    pub n_bids: usize,
    pub n_asks: usize,
    pub price_low: u64,
    pub price_high: u64,
    pub qty_low: u64,
    pub qty_high: u64,
    pub seed: u64,
}

impl InstanceSpec {
    /// `n` orders split evenly, prices in `[1, 10^6]`, quantities in `[1, 100]`.
    pub fn balanced(n: usize, seed: u64) -> Self {
        InstanceSpec {
            n_bids: n / 2,
            n_asks: n - n / 2,
            price_low: 1,
            price_high: 1_000_000,
            qty_low: 1,
            qty_high: 100,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.price_low > self.price_high || self.price_high > MAX_PRICE {
            return Err(Error::Domain(format!(
                "price range [{}, {}] is empty or exceeds {MAX_PRICE}",
                self.price_low, self.price_high
            )));
        }
        if self.qty_low == 0 || self.qty_low > self.qty_high {
            return Err(Error::Domain(format!(
                "quantity range [{}, {}] must be non-empty and positive",
                self.qty_low, self.qty_high
            )));
        }
        let total = self.n_bids as u128 + self.n_asks as u128;
        if total > MAX_ORDER_FIELD as u128 {
            return Err(Error::Domain(format!(
                "{total} orders do not fit the id space"
            )));
        }
        Ok(())
    }
}

/// Draws a book from `spec`. Bids get ids `1..=n_bids`, asks the ids after
/// them; timestamps run from 1 on each side. The same spec always yields the
/// same book.
pub fn gen_instance(spec: &InstanceSpec) -> Result<OrderBook> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let bids = (0..spec.n_bids as u64)
        .map(|i| {
            let price = rng.gen_range(spec.price_low..=spec.price_high);
            let qty = rng.gen_range(spec.qty_low..=spec.qty_high);
            Order::bid(i + 1, i + 1, price, qty)
        })
        .collect();
    let offset = spec.n_bids as u64;
    let asks = (0..spec.n_asks as u64)
        .map(|i| {
            let price = rng.gen_range(spec.price_low..=spec.price_high);
            let qty = rng.gen_range(spec.qty_low..=spec.qty_high);
            Order::ask(offset + i + 1, i + 1, price, qty)
        })
        .collect();
    Ok(OrderBook::new(bids, asks)?)
}
