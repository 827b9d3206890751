//! Linear-time uniform-price matching by alternately bisecting bids and asks.
//!
//! Each step takes the median of one side, cuts the other side at the same
//! volume, and compares the two boundary orders. If they are tradable, every
//! order in the two competitive halves is tradable with every other one, so
//! the halves are matched exhaustively and the step continues on the less
//! competitive remainders. Otherwise the remainders can never trade and are
//! dropped. The side being bisected alternates, so two steps halve the input.
//!
//! Both order lists live in one buffer per side; a step only narrows the
//! window into each buffer. An order cut in two by a quantity split keeps a
//! single slot whose quantity is rewritten when the window moves past it.

use super::{greedy, lots, padded_lots, Emitter, Lot};
use crate::error::{Error, Result};
use crate::orders::{keys_tradable, Matching, Order, OrderBook, Side, Transaction, Volume};
use crate::selection::Selector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bisect {
    Bids,
    Asks,
}

struct Window {
    lo: usize,
    hi: usize,
    vol: u64,
}

impl Window {
    fn full(lots: &[Lot]) -> Self {
        Window {
            lo: 0,
            hi: lots.len(),
            vol: lots.iter().map(|l| l.qty).sum(),
        }
    }

    fn len(&self) -> usize {
        self.hi - self.lo
    }
}

/// Outcome of bisecting the `median` side and quantity-splitting the other.
struct Cut {
    /// Absolute index of the median on the bisected side.
    median: usize,
    /// Absolute index of the boundary order on the split side.
    boundary: usize,
    /// Volume of each competitive half.
    q: u64,
    /// Part of the boundary order that falls outside the competitive half.
    extra: u64,
}

fn cut(
    sel: &mut Selector,
    median_side: &mut [Lot],
    mw: &Window,
    split_side: &mut [Lot],
    sw: &Window,
) -> Cut {
    let k = mw.len().div_ceil(2) - 1;
    let q = sel.select(&mut median_side[mw.lo..mw.hi], k);
    let median = mw.lo + k;
    let (boundary, before) = sel.select_q_before(&mut split_side[sw.lo..sw.hi], q);
    let boundary = sw.lo + boundary;
    let extra = before + split_side[boundary].qty - q;
    Cut {
        median,
        boundary,
        q,
        extra,
    }
}

/// Runs the alternating bisection over the windows, emitting transactions.
fn run(
    bids: &mut [Lot],
    asks: &mut [Lot],
    start: Bisect,
    emit: &mut impl FnMut(&Lot, &Lot, u64),
) -> Result<()> {
    let mut bw = Window::full(bids);
    let mut aw = Window::full(asks);
    let mut phase = start;
    let mut sel = Selector::default();
    loop {
        if bw.vol != aw.vol {
            return Err(Error::Internal(format!(
                "bid volume {} and ask volume {} diverged",
                bw.vol, aw.vol
            )));
        }
        if bw.len() == 0 || aw.len() == 0 {
            return Ok(());
        }
        if bw.len() == 1 && aw.len() == 1 && !keys_tradable(bids[bw.lo].key, asks[aw.lo].key) {
            return Ok(());
        }

        let cut = match phase {
            Bisect::Bids => cut(&mut sel, bids, &bw, asks, &aw),
            Bisect::Asks => cut(&mut sel, asks, &aw, bids, &bw),
        };
        let (bid_at, ask_at) = match phase {
            Bisect::Bids => (cut.median, cut.boundary),
            Bisect::Asks => (cut.boundary, cut.median),
        };
        // Shrink the boundary order to its share of the competitive half.
        match phase {
            Bisect::Bids => asks[ask_at].qty -= cut.extra,
            Bisect::Asks => bids[bid_at].qty -= cut.extra,
        }

        if keys_tradable(bids[bid_at].key, asks[ask_at].key) {
            let matched = greedy(&bids[bw.lo..=bid_at], &asks[aw.lo..=ask_at], &mut *emit);
            if matched != cut.q {
                return Err(Error::Internal(format!(
                    "exhaustive match produced volume {matched}, expected {}",
                    cut.q
                )));
            }
            // The median side moves strictly past the median; the split side
            // restarts at the boundary slot if part of it is left over.
            let (mw, sw, split_lots) = match phase {
                Bisect::Bids => (&mut bw, &mut aw, &mut *asks),
                Bisect::Asks => (&mut aw, &mut bw, &mut *bids),
            };
            mw.lo = cut.median + 1;
            mw.vol -= cut.q;
            if cut.extra > 0 {
                split_lots[cut.boundary].qty = cut.extra;
                sw.lo = cut.boundary;
            } else {
                sw.lo = cut.boundary + 1;
            }
            sw.vol -= cut.q;
        } else {
            bw.hi = bid_at + 1;
            aw.hi = ask_at + 1;
            bw.vol = cut.q;
            aw.vol = cut.q;
        }
        phase = match phase {
            Bisect::Bids => Bisect::Asks,
            Bisect::Asks => Bisect::Bids,
        };
    }
}

fn check_side(orders: &[Order], side: Side) -> Result<()> {
    match orders.iter().find(|o| o.side != side) {
        Some(o) => Err(Error::SideMismatch {
            expected: side,
            found: o.side,
        }),
        None => Ok(()),
    }
}

fn run_on_orders(
    bids: &[Order],
    asks: &[Order],
    matching: Matching,
    start: Bisect,
) -> Result<Matching> {
    check_side(bids, Side::Bid)?;
    check_side(asks, Side::Ask)?;
    if bids.vol() != asks.vol() {
        return Err(Error::Internal(format!(
            "bid volume {} differs from ask volume {}",
            bids.vol(),
            asks.vol()
        )));
    }
    let mut bid_lots = lots(bids);
    let mut ask_lots = lots(asks);
    let mut out = matching;
    run(&mut bid_lots, &mut ask_lots, start, &mut |b, a, qty| {
        out.transactions.push(Transaction {
            bid_id: b.id,
            ask_id: a.id,
            qty,
            price: a.key.price(Side::Ask),
        })
    })?;
    Ok(out)
}

/// Bisects bids first. Requires equal bid and ask volume. Appends
/// transactions priced at the ask limit to `matching`.
pub fn uniform_bid(bids: &[Order], asks: &[Order], matching: Matching) -> Result<Matching> {
    run_on_orders(bids, asks, matching, Bisect::Bids)
}

/// Mirror image of [`uniform_bid`]: bisects asks first.
pub fn uniform_ask(bids: &[Order], asks: &[Order], matching: Matching) -> Result<Matching> {
    run_on_orders(bids, asks, matching, Bisect::Asks)
}

/// Maximum-volume fair uniform-price matching in worst-case linear time.
/// Every order trades exactly the quantity it trades under [`super::um_star`].
pub fn uniform_star(book: &OrderBook) -> Result<Matching> {
    let (mut bids, mut asks, dummy) = padded_lots(book);
    let mut out = Emitter::new(book, dummy.as_ref());
    run(&mut bids, &mut asks, Bisect::Bids, &mut |b, a, q| {
        out.emit(b, a, q)
    })?;
    out.finish_uniform()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::um_star;
    use crate::orders::Price;

    #[test]
    fn uniform_bid_examples() {
        let m = uniform_bid(&[], &[], Matching::default()).unwrap();
        assert!(m.is_empty());

        let bids = [Order::bid(1, 1, 10, 2)];
        let asks = [Order::ask(2, 1, 5, 1), Order::ask(3, 2, 7, 2)];
        // volumes differ (2 vs 3): the precondition is enforced
        assert!(matches!(
            uniform_bid(&bids, &asks, Matching::default()),
            Err(Error::Internal(_))
        ));

        // padded with an untradable bid: the median bid cuts a2 after one unit
        let padded = [
            bids[0].clone(),
            Order::new(Side::Bid, 4, 2, Price::NegInf, 1),
        ];
        let m = uniform_bid(&padded, &asks, Matching::default()).unwrap();
        assert_eq!(m.vol(), 2);
        let traded = m.traded();
        assert_eq!(
            (
                traded.get(Side::Bid, 1),
                traded.get(Side::Ask, 2),
                traded.get(Side::Ask, 3)
            ),
            (2, 1, 1)
        );

        let m = uniform_bid(
            &[Order::bid(1, 1, 3, 1)],
            &[Order::ask(2, 1, 9, 1)],
            Matching::default(),
        )
        .unwrap();
        assert!(m.is_empty());
        let m = uniform_ask(
            &[Order::bid(1, 1, 3, 1)],
            &[Order::ask(2, 1, 9, 1)],
            Matching::default(),
        )
        .unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn uniform_star_matches_um_star_on_small_book() {
        let book = OrderBook::new(
            vec![Order::bid(1, 1, 10, 2)],
            vec![Order::ask(2, 1, 5, 1), Order::ask(3, 2, 7, 2)],
        )
        .unwrap();
        let fast = uniform_star(&book).unwrap();
        let slow = um_star(&book).unwrap();
        assert_eq!(fast.traded(), slow.traded());
        assert!(fast
            .transactions
            .iter()
            .all(|t| t.price == Price::Finite(7)));
        assert!(uniform_star(&OrderBook::empty()).unwrap().is_empty());
    }

    #[test]
    fn split_order_keeps_both_parts() {
        // the big bid is cut across the first bisection and must trade fully
        let bids = vec![
            Order::bid(1, 1, 20, 5),
            Order::bid(2, 2, 19, 1),
            Order::bid(3, 3, 18, 1),
        ];
        let asks = vec![
            Order::ask(4, 1, 1, 2),
            Order::ask(5, 2, 2, 2),
            Order::ask(6, 3, 3, 2),
            Order::ask(7, 4, 4, 1),
        ];
        let book = OrderBook::new(bids, asks).unwrap();
        let fast = uniform_star(&book).unwrap();
        assert_eq!(fast.traded(), um_star(&book).unwrap().traded());
        assert_eq!(fast.vol(), 7);
    }
}
