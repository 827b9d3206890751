#![allow(dead_code)]

use std::collections::HashMap;

use proptest::prelude::*;
use xmatch_core::{Matching, Order, OrderBook, Side};

/// Book from (price, qty) lists. Ids run 1.. over bids then asks and
/// timestamps are the given permutations.
pub fn build(
    bids: &[(u64, u64)],
    asks: &[(u64, u64)],
    bid_ts: &[u64],
    ask_ts: &[u64],
) -> OrderBook {
    let nb = bids.len() as u64;
    let b = bids
        .iter()
        .zip(bid_ts)
        .zip(1..)
        .map(|((&(p, q), &t), id)| Order::bid(id, t, p, q))
        .collect();
    let a = asks
        .iter()
        .zip(ask_ts)
        .zip(1..)
        .map(|((&(p, q), &t), id)| Order::ask(nb + id, t, p, q))
        .collect();
    OrderBook::new(b, a).expect("generated book is valid")
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<u64>> {
    Just((1..=n as u64).collect::<Vec<_>>()).prop_shuffle()
}

/// Random books with up to `max_n` orders per side and shuffled timestamps,
/// so time priority disagrees with input order.
pub fn book(max_n: usize, max_price: u64, max_qty: u64) -> impl Strategy<Value = OrderBook> {
    let side = move || prop::collection::vec((1..=max_price, 1..=max_qty), 0..=max_n);
    (side(), side())
        .prop_flat_map(|(b, a)| {
            let (nb, na) = (b.len(), a.len());
            (Just(b), Just(a), permutation(nb), permutation(na))
        })
        .prop_map(|(b, a, tb, ta)| build(&b, &a, &tb, &ta))
}

/// One side's orders, all bids or all asks.
pub fn side_orders(
    side: Side,
    max_n: usize,
    max_price: u64,
    max_qty: u64,
) -> impl Strategy<Value = Vec<Order>> {
    book(max_n, max_price, max_qty).prop_map(move |b| b.side(side).to_vec())
}

/// Traded quantity per (side, id).
pub fn per_order(m: &Matching) -> HashMap<(Side, u64), u64> {
    let mut out = HashMap::new();
    for t in &m.transactions {
        *out.entry((Side::Bid, t.bid_id)).or_default() += t.qty;
        *out.entry((Side::Ask, t.ask_id)).or_default() += t.qty;
    }
    out
}

/// Orders sorted from most to least competitive.
pub fn sorted(orders: &[Order]) -> Vec<Order> {
    let mut v = orders.to_vec();
    v.sort_by_key(|o| o.key());
    v
}
