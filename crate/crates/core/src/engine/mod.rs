//! Matching algorithms.
//!
//! * [`maximum_matching`] and [`max_fair_matching`]: dynamic-price, maximum
//!   volume (the latter also fair).
//! * [`um_star`]: sort-based maximum-volume uniform-price matcher.
//! * [`uniform_star`]: the same output quantities in worst-case linear time.

mod fair;
mod uniform;

use std::cmp::Reverse;
use std::collections::HashMap;

pub use fair::make_fair;
pub use uniform::{uniform_ask, uniform_bid, uniform_star};

use crate::error::{Error, Result};
use crate::orders::{
    keys_tradable, tradable, CompetitiveKey, Matching, Order, OrderBook, Price, Side, SideStats,
    Transaction,
};
use crate::selection::Ranked;

/// Compact stand-in for an order inside the engine.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Lot {
    pub key: CompetitiveKey,
    pub qty: u64,
    pub id: u64,
}

impl Ranked for Lot {
    #[inline]
    fn rank_key(&self) -> CompetitiveKey {
        self.key
    }
    #[inline]
    fn quantity(&self) -> u64 {
        self.qty
    }
    #[inline]
    fn set_quantity(&mut self, qty: u64) {
        self.qty = qty;
    }
}

pub(crate) fn lots(orders: &[Order]) -> Vec<Lot> {
    orders
        .iter()
        .map(|o| Lot {
            key: o.key(),
            qty: o.qty,
            id: o.id,
        })
        .collect()
}

/// The greedy `Match` loop: pair the heads of the two lists while they are
/// tradable, trading the smaller remaining quantity each time. Stops at the
/// first untradable head pair or when a list runs out. Returns the volume
/// emitted.
pub(crate) fn greedy<B: Ranked, A: Ranked>(
    bids: &[B],
    asks: &[A],
    mut emit: impl FnMut(&B, &A, u64),
) -> u64 {
    let (mut i, mut j) = (0, 0);
    let (mut bid_left, mut ask_left) = (0, 0);
    let mut volume = 0;
    while i < bids.len() && j < asks.len() {
        let (b, a) = (&bids[i], &asks[j]);
        if !keys_tradable(b.rank_key(), a.rank_key()) {
            break;
        }
        if bid_left == 0 {
            bid_left = b.quantity();
        }
        if ask_left == 0 {
            ask_left = a.quantity();
        }
        let q = bid_left.min(ask_left);
        emit(b, a, q);
        volume += q;
        bid_left -= q;
        ask_left -= q;
        if bid_left == 0 {
            i += 1;
        }
        if ask_left == 0 {
            j += 1;
        }
    }
    volume
}

/// Greedy matching of bids and asks that are already sorted most-competitive
/// first. Transactions are appended to `matching` at the ask's limit price.
pub fn match_greedy(bids: &[Order], asks: &[Order], matching: &mut Matching) {
    greedy(bids, asks, |b, a, qty| {
        matching.transactions.push(Transaction {
            bid_id: b.id,
            ask_id: a.id,
            qty,
            price: a.price,
        })
    });
}

/// Builds lots for both sides of `book`, appending the padding order (if
/// any) as one extra lot on its side.
pub(crate) fn padded_lots(book: &OrderBook) -> (Vec<Lot>, Vec<Lot>, Option<Order>) {
    let build = |orders: &[Order]| {
        let mut stats = SideStats::default();
        let mut lots = Vec::with_capacity(orders.len() + 1);
        lots.extend(orders.iter().map(|o| {
            stats.add(o);
            Lot {
                key: o.key(),
                qty: o.qty,
                id: o.id,
            }
        }));
        (lots, stats)
    };
    let (mut bids, bid_stats) = build(book.bids());
    let (mut asks, ask_stats) = build(book.asks());
    let dummy = SideStats::dummy(&bid_stats, &ask_stats);
    if let Some(d) = &dummy {
        let side = match d.side {
            Side::Bid => &mut bids,
            Side::Ask => &mut asks,
        };
        side.push(Lot {
            key: d.key(),
            qty: d.qty,
            id: d.id,
        });
    }
    (bids, asks, dummy)
}

/// Collects transactions from lots, priced at the ask limit, while tracking
/// the lowest matched bid limit for the uniform-price step.
pub(crate) struct Emitter<'a> {
    dummy: Option<&'a Order>,
    transactions: Vec<Transaction>,
    lowest_bid: Option<CompetitiveKey>,
    highest_ask: Option<CompetitiveKey>,
}

impl<'a> Emitter<'a> {
    pub fn new(book: &OrderBook, dummy: Option<&'a Order>) -> Self {
        Emitter {
            dummy,
            // greedy emits at most one transaction per order
            transactions: Vec::with_capacity(book.len() + 1),
            lowest_bid: None,
            highest_ask: None,
        }
    }

    #[inline]
    pub fn emit(&mut self, b: &Lot, a: &Lot, qty: u64) {
        self.transactions.push(Transaction {
            bid_id: b.id,
            ask_id: a.id,
            qty,
            price: a.key.price(Side::Ask),
        });
        // larger bid key = lower bid price, larger ask key = higher ask price
        if self.lowest_bid.is_none_or(|k| b.key > k) {
            self.lowest_bid = Some(b.key);
        }
        if self.highest_ask.is_none_or(|k| a.key > k) {
            self.highest_ask = Some(a.key);
        }
    }

    /// Prices every transaction at the highest matched ask limit. Fails if
    /// the padding order traded.
    pub fn finish_uniform(self) -> Result<Matching> {
        let (Some(bid), Some(ask)) = (self.lowest_bid, self.highest_ask) else {
            return Ok(Matching::default());
        };
        let (floor, clearing) = (bid.price(Side::Bid), ask.price(Side::Ask));
        if let Some(dummy) = self.dummy {
            // the padding order is the only one with an infinite limit
            if floor == Price::NegInf || clearing == Price::PosInf {
                return Err(Error::Internal(format!(
                    "the padding {} {} traded",
                    dummy.side, dummy.id
                )));
            }
        }
        if clearing > floor {
            return Err(Error::Internal(format!(
                "clearing price {clearing} exceeds the lowest matched bid limit {floor}"
            )));
        }
        let mut transactions = self.transactions;
        for t in &mut transactions {
            t.price = clearing;
        }
        Ok(Matching::new(transactions))
    }
}

/// Sort-then-match uniform-price matcher: pad, sort both sides by
/// competitiveness, greedily match, price uniformly.
pub fn um_star(book: &OrderBook) -> Result<Matching> {
    let (mut bids, mut asks, dummy) = padded_lots(book);
    bids.sort_unstable_by_key(|l| l.key);
    asks.sort_unstable_by_key(|l| l.key);
    let mut out = Emitter::new(book, dummy.as_ref());
    greedy(&bids, &asks, |b, a, q| out.emit(b, a, q));
    out.finish_uniform()
}

/// Sets every transaction's price to the highest limit among the matched
/// asks. Fails if that price is above some matched bid's limit, which
/// cannot happen for a top-down greedy matching.
pub fn assign_uniform_price(matching: Matching, book: &OrderBook) -> Result<Matching> {
    let limits = |orders: &[Order]| -> HashMap<u64, Price> {
        orders.iter().map(|o| (o.id, o.price)).collect()
    };
    let (bid_limits, ask_limits) = (limits(book.bids()), limits(book.asks()));
    let lookup = |map: &HashMap<u64, Price>, side: Side, id: u64| {
        map.get(&id)
            .copied()
            .ok_or_else(|| Error::Internal(format!("{side} {id} is not in the book")))
    };
    let mut clearing: Option<Price> = None;
    let mut floor = Price::PosInf;
    for t in &matching.transactions {
        let ask = lookup(&ask_limits, Side::Ask, t.ask_id)?;
        let bid = lookup(&bid_limits, Side::Bid, t.bid_id)?;
        clearing = clearing.max(Some(ask));
        floor = floor.min(bid);
    }
    let Some(clearing) = clearing else {
        return Ok(matching);
    };
    if clearing > floor {
        return Err(Error::Internal(format!(
            "clearing price {clearing} exceeds the lowest matched bid limit {floor}"
        )));
    }
    let mut matching = matching;
    for t in &mut matching.transactions {
        t.price = clearing;
    }
    Ok(matching)
}

/// Maximum-volume matching with dynamic prices: bids by competitiveness,
/// asks by decreasing price (earlier timestamp first among equal prices).
/// The top pair trades if tradable, otherwise the top ask is dropped. Each
/// transaction is priced at its ask's limit. The result need not be fair.
pub fn maximum_matching(book: &OrderBook) -> Matching {
    let mut bids: Vec<&Order> = book.bids().iter().collect();
    let mut asks: Vec<&Order> = book.asks().iter().collect();
    bids.sort_unstable_by_key(|o| o.key());
    asks.sort_unstable_by_key(|o| (Reverse(o.price), o.timestamp));

    let mut transactions = Vec::new();
    let (mut i, mut j) = (0, 0);
    let (mut bid_left, mut ask_left) = (0, 0);
    while i < bids.len() && j < asks.len() {
        let (b, a) = (bids[i], asks[j]);
        if !tradable(b, a) {
            j += 1;
            ask_left = 0;
            continue;
        }
        if bid_left == 0 {
            bid_left = b.qty;
        }
        if ask_left == 0 {
            ask_left = a.qty;
        }
        let qty = bid_left.min(ask_left);
        transactions.push(Transaction {
            bid_id: b.id,
            ask_id: a.id,
            qty,
            price: a.price,
        });
        bid_left -= qty;
        ask_left -= qty;
        if bid_left == 0 {
            i += 1;
        }
        if ask_left == 0 {
            j += 1;
        }
    }
    Matching::new(transactions)
}

/// Fair matching of maximum volume.
pub fn max_fair_matching(book: &OrderBook) -> Result<Matching> {
    make_fair(&maximum_matching(book), book)
}
