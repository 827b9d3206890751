use std::cmp::Reverse;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::orders::{Matching, Order, OrderBook, Price, Side, Transaction};
use crate::verify::check_valid;

/// Rewrites a valid matching into a fair one with the same volume.
///
/// Two refill passes. The first keeps every transaction's ask and quantity
/// but hands its bid side to the most competitive bids, assigning the
/// highest-priced of those to the transactions with the highest ask limits.
/// The second does the same for asks: it keeps the bids and hands the ask
/// side to the most competitive asks, pairing lowest bid limits with lowest
/// ask limits. Pairing both sides in the same price direction keeps every
/// piece tradable. Transaction prices carry over, clamped into the new
/// pair's limit interval, so a uniform matching stays uniform.
pub fn make_fair(matching: &Matching, book: &OrderBook) -> Result<Matching> {
    let report = check_valid(matching, book);
    if let Some(first) = report.violations.first() {
        return Err(Error::InvalidMatching {
            violations: report.violations.len(),
            first: first.to_string(),
        });
    }
    let bids: HashMap<u64, &Order> = book.bids().iter().map(|o| (o.id, o)).collect();
    let asks: HashMap<u64, &Order> = book.asks().iter().map(|o| (o.id, o)).collect();

    let mut pieces = matching.transactions.clone();
    pieces.sort_by_key(|t| Reverse(asks[&t.ask_id].price));
    let pieces = refill(&pieces, book.bids(), Side::Bid, &bids, &asks)?;

    let mut pieces = pieces;
    pieces.sort_by_key(|t| bids[&t.bid_id].price);
    let pieces = refill(&pieces, book.asks(), Side::Ask, &bids, &asks)?;

    Ok(Matching::new(coalesce(pieces)))
}

/// Reassigns the `side` of each transaction, in the given order, to orders of
/// that side taken from most to least competitive.
fn refill(
    transactions: &[Transaction],
    side_orders: &[Order],
    side: Side,
    bids: &HashMap<u64, &Order>,
    asks: &HashMap<u64, &Order>,
) -> Result<Vec<Transaction>> {
    let mut supply: Vec<&Order> = side_orders.iter().collect();
    supply.sort_unstable_by_key(|o| o.key());
    let mut supply = supply.into_iter();

    let mut out = Vec::with_capacity(transactions.len());
    let mut current: Option<(&Order, u64)> = None;
    for t in transactions {
        let mut need = t.qty;
        while need > 0 {
            let (order, left) = match current.take() {
                Some(c) => c,
                None => {
                    let o = supply.next().ok_or_else(|| {
                        Error::Internal(format!("{side} supply exhausted during refill"))
                    })?;
                    (o, o.qty)
                }
            };
            let q = need.min(left);
            let (bid, ask) = match side {
                Side::Bid => (order, asks[&t.ask_id]),
                Side::Ask => (bids[&t.bid_id], order),
            };
            if bid.price < ask.price {
                return Err(Error::Internal(format!(
                    "refill paired untradable bid {} and ask {}",
                    bid.id, ask.id
                )));
            }
            out.push(Transaction {
                bid_id: bid.id,
                ask_id: ask.id,
                qty: q,
                price: clamp(t.price, ask.price, bid.price),
            });
            need -= q;
            if left > q {
                current = Some((order, left - q));
            }
        }
    }
    Ok(out)
}

fn clamp(price: Price, low: Price, high: Price) -> Price {
    price.max(low).min(high)
}

/// Merges consecutive pieces with the same pair and price.
fn coalesce(pieces: Vec<Transaction>) -> Vec<Transaction> {
    let mut out: Vec<Transaction> = Vec::with_capacity(pieces.len());
    for t in pieces {
        match out.last_mut() {
            Some(last)
                if (last.bid_id, last.ask_id, last.price) == (t.bid_id, t.ask_id, t.price) =>
            {
                last.qty += t.qty
            }
            _ => out.push(t),
        }
    }
    out
}
