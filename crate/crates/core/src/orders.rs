//! Orders, order books, transactions and matchings.
//!
//! Competitiveness is price-time priority: a bid beats another bid with a
//! higher limit price, an ask beats another ask with a lower one, and equal
//! prices fall back to the earlier timestamp. Every order exposes this as a
//! [`CompetitiveKey`] where a smaller key means "more competitive", so the
//! whole order relation reduces to one integer comparison.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{BookError, Error, Result};

/// Largest limit price a real order may carry. The two values above it are
/// taken by the ranks of the sentinels.
pub const MAX_PRICE: u64 = u64::MAX - 2;

/// Largest id or timestamp a real order may carry; the next value is kept
/// free for the padding order.
pub const MAX_ORDER_FIELD: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "B")]
    Bid,
    #[serde(rename = "A")]
    Ask,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Bid => Side::Ask,
            Side::Ask => Side::Bid,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Bid => "bid",
            Side::Ask => "ask",
        })
    }
}

/// A limit price: a natural number, or one of the two sentinels used by
/// padding orders. The derived ordering puts `NegInf` below and `PosInf`
/// above every finite price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Price {
    NegInf,
    Finite(u64),
    PosInf,
}

impl Price {
    pub fn is_sentinel(self) -> bool {
        !matches!(self, Price::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Price::Finite(p) => Some(p),
            _ => None,
        }
    }

    /// Order-preserving embedding into `u64`.
    pub(crate) fn rank(self) -> u64 {
        match self {
            Price::NegInf => 0,
            Price::Finite(p) => p.min(MAX_PRICE) + 1,
            Price::PosInf => u64::MAX,
        }
    }

    pub(crate) fn from_rank(rank: u64) -> Price {
        match rank {
            0 => Price::NegInf,
            u64::MAX => Price::PosInf,
            r => Price::Finite(r - 1),
        }
    }
}

impl From<u64> for Price {
    fn from(p: u64) -> Self {
        Price::Finite(p)
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Price::NegInf => f.write_str("-inf"),
            Price::Finite(p) => write!(f, "{p}"),
            Price::PosInf => f.write_str("+inf"),
        }
    }
}

/// Sort key for price-time priority: smaller is more competitive.
///
/// The high 64 bits hold the price rank (inverted for bids), the low 64 bits
/// the timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompetitiveKey(u128);

impl CompetitiveKey {
    pub fn new(side: Side, price: Price, timestamp: u64) -> Self {
        let rank = match side {
            Side::Bid => u64::MAX - price.rank(),
            Side::Ask => price.rank(),
        };
        CompetitiveKey(((rank as u128) << 64) | timestamp as u128)
    }

    #[inline(always)]
    pub(crate) fn bits(self) -> u128 {
        self.0
    }

    #[inline(always)]
    pub(crate) fn from_bits(bits: u128) -> Self {
        CompetitiveKey(bits)
    }

    pub fn price(self, side: Side) -> Price {
        let hi = (self.0 >> 64) as u64;
        match side {
            Side::Bid => Price::from_rank(u64::MAX - hi),
            Side::Ask => Price::from_rank(hi),
        }
    }
}

/// Tradability expressed on keys: the bid's limit is at least the ask's.
#[inline]
pub(crate) fn keys_tradable(bid: CompetitiveKey, ask: CompetitiveKey) -> bool {
    let bid_rank = u64::MAX - (bid.0 >> 64) as u64;
    let ask_rank = (ask.0 >> 64) as u64;
    bid_rank >= ask_rank
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Order {
    pub id: u64,
    pub timestamp: u64,
    pub side: Side,
    pub price: Price,
    pub qty: u64,
}

impl Order {
    pub fn new(side: Side, id: u64, timestamp: u64, price: impl Into<Price>, qty: u64) -> Self {
        Order {
            id,
            timestamp,
            side,
            price: price.into(),
            qty,
        }
    }

    pub fn bid(id: u64, timestamp: u64, price: u64, qty: u64) -> Self {
        Order::new(Side::Bid, id, timestamp, price, qty)
    }

    pub fn ask(id: u64, timestamp: u64, price: u64, qty: u64) -> Self {
        Order::new(Side::Ask, id, timestamp, price, qty)
    }

    pub fn is_dummy(&self) -> bool {
        self.price.is_sentinel()
    }

    pub fn key(&self) -> CompetitiveKey {
        CompetitiveKey::new(self.side, self.price, self.timestamp)
    }

    pub fn with_qty(&self, qty: u64) -> Order {
        Order {
            qty,
            ..self.clone()
        }
    }

    /// `true` when `self` is strictly more competitive than `other`.
    pub fn more_competitive(&self, other: &Order) -> Result<bool> {
        if self.side != other.side {
            return Err(Error::SideMismatch {
                expected: self.side,
                found: other.side,
            });
        }
        Ok(self.key() < other.key())
    }
}

/// Whether a bid and an ask can trade with each other.
pub fn tradable(bid: &Order, ask: &Order) -> bool {
    bid.price >= ask.price
}

/// Total quantity of an order set or a matching.
pub trait Volume {
    fn vol(&self) -> u64;
}

impl Volume for [Order] {
    fn vol(&self) -> u64 {
        self.iter().map(|o| o.qty).sum()
    }
}

impl Volume for Vec<Order> {
    fn vol(&self) -> u64 {
        self.as_slice().vol()
    }
}

impl Volume for Matching {
    fn vol(&self) -> u64 {
        self.transactions.iter().map(|t| t.qty).sum()
    }
}

/// The input of a call auction: bids and asks with distinct ids and
/// distinct timestamps on each side.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrderBook {
    bids: Vec<Order>,
    asks: Vec<Order>,
}

impl OrderBook {
    pub fn new(bids: Vec<Order>, asks: Vec<Order>) -> Result<Self, BookError> {
        let mut ids = HashSet::with_capacity(bids.len() + asks.len());
        for (orders, side) in [(&bids, Side::Bid), (&asks, Side::Ask)] {
            let mut stamps: HashMap<u64, u64> = HashMap::with_capacity(orders.len());
            for o in orders.iter() {
                if o.side != side {
                    return Err(BookError::WrongSide {
                        id: o.id,
                        expected: side,
                    });
                }
                if o.qty == 0 {
                    return Err(BookError::ZeroQuantity(o.id));
                }
                let price = o.price.finite().ok_or(BookError::SentinelPrice(o.id))?;
                if price > MAX_PRICE {
                    return Err(BookError::Reserved {
                        id: o.id,
                        field: "price",
                        value: price,
                        max: MAX_PRICE,
                    });
                }
                for (field, value) in [("id", o.id), ("timestamp", o.timestamp)] {
                    if value > MAX_ORDER_FIELD {
                        return Err(BookError::Reserved {
                            id: o.id,
                            field,
                            value,
                            max: MAX_ORDER_FIELD,
                        });
                    }
                }
                if !ids.insert(o.id) {
                    return Err(BookError::DuplicateId(o.id));
                }
                if let Some(first) = stamps.insert(o.timestamp, o.id) {
                    return Err(BookError::DuplicateTimestamp {
                        side,
                        timestamp: o.timestamp,
                        first,
                        second: o.id,
                    });
                }
            }
        }
        Ok(OrderBook { bids, asks })
    }

    pub fn empty() -> Self {
        OrderBook::default()
    }

    pub fn bids(&self) -> &[Order] {
        &self.bids
    }

    pub fn asks(&self) -> &[Order] {
        &self.asks
    }

    pub fn side(&self, side: Side) -> &[Order] {
        match side {
            Side::Bid => &self.bids,
            Side::Ask => &self.asks,
        }
    }

    pub fn len(&self) -> usize {
        self.bids.len() + self.asks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty() && self.asks.is_empty()
    }

    pub fn into_parts(self) -> (Vec<Order>, Vec<Order>) {
        (self.bids, self.asks)
    }

    /// Distinct finite limit prices present in the book, ascending.
    pub fn limit_prices(&self) -> Vec<u64> {
        let mut prices: Vec<u64> = self
            .bids
            .iter()
            .chain(&self.asks)
            .filter_map(|o| o.price.finite())
            .collect();
        prices.sort_unstable();
        prices.dedup();
        prices
    }

    /// The padding order that equalizes the two sides' volumes, if any.
    pub(crate) fn dummy_order(&self) -> Option<Order> {
        let stats = |orders: &[Order]| {
            orders.iter().fold(SideStats::default(), |mut s, o| {
                s.add(o);
                s
            })
        };
        SideStats::dummy(&stats(&self.bids), &stats(&self.asks))
    }
}

/// Running totals over one side, enough to build the padding order.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct SideStats {
    vol: u64,
    max_id: Option<u64>,
    max_ts: Option<u64>,
}

impl SideStats {
    #[inline]
    pub fn add(&mut self, o: &Order) {
        self.vol += o.qty;
        self.max_id = self.max_id.max(Some(o.id));
        self.max_ts = self.max_ts.max(Some(o.timestamp));
    }

    pub fn dummy(bids: &SideStats, asks: &SideStats) -> Option<Order> {
        let next_id = bids.max_id.max(asks.max_id).map_or(0, |m| m + 1);
        let next_ts = |s: &SideStats| s.max_ts.map_or(0, |m| m + 1);
        match bids.vol.cmp(&asks.vol) {
            std::cmp::Ordering::Greater => Some(Order::new(
                Side::Ask,
                next_id,
                next_ts(asks),
                Price::PosInf,
                bids.vol - asks.vol,
            )),
            std::cmp::Ordering::Less => Some(Order::new(
                Side::Bid,
                next_id,
                next_ts(bids),
                Price::NegInf,
                asks.vol - bids.vol,
            )),
            std::cmp::Ordering::Equal => None,
        }
    }
}

/// What [`pad_with_dummy`] added to a book.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DummyDescriptor {
    pub order: Option<Order>,
}

/// Equalizes bid and ask volume by appending one untradable order.
pub fn pad_with_dummy(book: &OrderBook) -> (OrderBook, DummyDescriptor) {
    let mut padded = book.clone();
    let order = book.dummy_order();
    if let Some(d) = &order {
        match d.side {
            Side::Bid => padded.bids.push(d.clone()),
            Side::Ask => padded.asks.push(d.clone()),
        }
    }
    (padded, DummyDescriptor { order })
}

/// Removes transactions that reference the padding order. A sentinel order is
/// never tradable, so finding one is reported as an engine fault.
pub fn strip_dummy(matching: Matching, descriptor: &DummyDescriptor) -> Result<Matching> {
    let Some(dummy) = &descriptor.order else {
        return Ok(matching);
    };
    let hit = |t: &Transaction| match dummy.side {
        Side::Bid => t.bid_id == dummy.id,
        Side::Ask => t.ask_id == dummy.id,
    };
    if let Some(t) = matching.transactions.iter().find(|t| hit(t)) {
        return Err(Error::Internal(format!(
            "transaction {}-{} trades the padding {} {}",
            t.bid_id, t.ask_id, dummy.side, dummy.id
        )));
    }
    Ok(matching)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transaction {
    pub bid_id: u64,
    pub ask_id: u64,
    pub qty: u64,
    pub price: Price,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    pub transactions: Vec<Transaction>,
}

impl Matching {
    pub fn new(transactions: Vec<Transaction>) -> Self {
        Matching { transactions }
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    /// Quantity traded by `order`, matching on its id and side.
    pub fn qty_traded(&self, order: &Order) -> u64 {
        self.transactions
            .iter()
            .filter(|t| match order.side {
                Side::Bid => t.bid_id == order.id,
                Side::Ask => t.ask_id == order.id,
            })
            .map(|t| t.qty)
            .sum()
    }

    /// Traded quantity per order id, one map per side.
    pub fn traded(&self) -> Traded {
        let mut traded = Traded::default();
        for t in &self.transactions {
            *traded.bids.entry(t.bid_id).or_default() += t.qty;
            *traded.asks.entry(t.ask_id).or_default() += t.qty;
        }
        traded
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Traded {
    pub bids: HashMap<u64, u64>,
    pub asks: HashMap<u64, u64>,
}

impl Traded {
    pub fn get(&self, side: Side, id: u64) -> u64 {
        let map = match side {
            Side::Bid => &self.bids,
            Side::Ask => &self.asks,
        };
        map.get(&id).copied().unwrap_or(0)
    }
}

fn check_same_side(orders: &[Order], side: Side) -> Result<()> {
    match orders.iter().find(|o| o.side != side) {
        Some(o) => Err(Error::SideMismatch {
            expected: side,
            found: o.side,
        }),
        None => Ok(()),
    }
}

/// Partitions `orders` into those at least as competitive as `pivot` and
/// those strictly less competitive. Input order is kept within each part.
pub fn split(orders: &[Order], pivot: &Order) -> Result<(Vec<Order>, Vec<Order>)> {
    check_same_side(orders, pivot.side)?;
    if !orders.contains(pivot) {
        return Err(Error::NotFound { id: pivot.id });
    }
    let key = pivot.key();
    Ok(orders.iter().cloned().partition(|o| o.key() <= key))
}

/// Positions `pivot` occupies when the units of `orders` are laid out from
/// most to least competitive, counting from 1.
pub fn range_of(orders: &[Order], pivot: &Order) -> Result<RangeInclusive<u64>> {
    let (at_least, _) = split(orders, pivot)?;
    let hi = at_least.vol();
    Ok(hi - pivot.qty + 1..=hi)
}
