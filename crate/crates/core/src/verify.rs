//! Checkers for matchings, volume bounds, ground-truth oracles and the
//! element-distinctness reduction.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::engine::maximum_matching;
use crate::error::{Error, Result};
use crate::orders::{Matching, Order, OrderBook, Price, Side, Volume};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Valid,
    Fair,
    Uniform,
    Bound,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Valid => "valid",
            Check::Fair => "fair",
            Check::Uniform => "uniform",
            Check::Bound => "bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownOrder {
        tx: usize,
        side: Side,
        id: u64,
    },
    ZeroQuantity {
        tx: usize,
    },
    NotTradable {
        tx: usize,
        bid_id: u64,
        ask_id: u64,
        bid_price: Price,
        ask_price: Price,
    },
    PriceOutOfRange {
        tx: usize,
        price: Price,
        low: Price,
        high: Price,
    },
    Overfilled {
        side: Side,
        id: u64,
        traded: u64,
        qty: u64,
    },
    Unfair {
        side: Side,
        stronger: u64,
        weaker: u64,
    },
    NonUniform {
        tx: usize,
        price: Price,
        expected: Price,
    },
    BoundExceeded {
        price: u64,
        volume: u64,
        bound: u64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownOrder { tx, side, id } => write!(f, "transaction #{tx}: {side} {id} is not in the book"),
            Violation::ZeroQuantity { tx } => write!(f, "transaction #{tx} has zero quantity"),
            Violation::NotTradable { tx, bid_id, ask_id, bid_price, ask_price } => write!(
                f,
                "transaction #{tx}: bid {bid_id} at {bid_price} cannot trade with ask {ask_id} at {ask_price}"
            ),
            Violation::PriceOutOfRange { tx, price, low, high } => {
                write!(f, "transaction #{tx}: price {price} outside [{low}, {high}]")
            }
            Violation::Overfilled { side, id, traded, qty } => {
                write!(f, "{side} {id} trades {traded} but offers only {qty}")
            }
            Violation::Unfair { side, stronger, weaker } => write!(
                f,
                "{side} {weaker} trades while the more competitive {side} {stronger} is not fully traded"
            ),
            Violation::NonUniform { tx, price, expected } => {
                write!(f, "transaction #{tx} priced {price}, expected {expected}")
            }
            Violation::BoundExceeded { price, volume, bound } => {
                write!(f, "volume {volume} exceeds the demand-supply bound {bound} at price {price}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub check: Check,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    fn new(check: Check, violations: Vec<Violation>) -> Self {
        VerificationReport { check, violations }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "{}: pass", self.check);
        }
        write!(
            f,
            "{}: FAIL ({} violation(s))",
            self.check,
            self.violations.len()
        )?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

fn index(orders: &[Order]) -> HashMap<u64, &Order> {
    orders.iter().map(|o| (o.id, o)).collect()
}

/// Checks that `matching` is a matching over `book`: known orders,
/// tradable pairs, prices between the two limits, no order overfilled.
pub fn check_valid(matching: &Matching, book: &OrderBook) -> VerificationReport {
    let bids = index(book.bids());
    let asks = index(book.asks());
    let mut violations = Vec::new();
    for (tx, t) in matching.transactions.iter().enumerate() {
        if t.qty == 0 {
            violations.push(Violation::ZeroQuantity { tx });
        }
        let bid = bids.get(&t.bid_id);
        let ask = asks.get(&t.ask_id);
        if bid.is_none() {
            violations.push(Violation::UnknownOrder {
                tx,
                side: Side::Bid,
                id: t.bid_id,
            });
        }
        if ask.is_none() {
            violations.push(Violation::UnknownOrder {
                tx,
                side: Side::Ask,
                id: t.ask_id,
            });
        }
        let (Some(bid), Some(ask)) = (bid, ask) else {
            continue;
        };
        if bid.price < ask.price {
            violations.push(Violation::NotTradable {
                tx,
                bid_id: bid.id,
                ask_id: ask.id,
                bid_price: bid.price,
                ask_price: ask.price,
            });
        } else if t.price < ask.price || t.price > bid.price || t.price.is_sentinel() {
            violations.push(Violation::PriceOutOfRange {
                tx,
                price: t.price,
                low: ask.price,
                high: bid.price,
            });
        }
    }
    let traded = matching.traded();
    for o in book.bids().iter().chain(book.asks()) {
        let q = traded.get(o.side, o.id);
        if q > o.qty {
            violations.push(Violation::Overfilled {
                side: o.side,
                id: o.id,
                traded: q,
                qty: o.qty,
            });
        }
    }
    VerificationReport::new(Check::Valid, violations)
}

/// Checks price-time fairness on both sides: once an order is not fully
/// traded, no less competitive order on its side may trade at all.
pub fn check_fair(matching: &Matching, book: &OrderBook) -> VerificationReport {
    let traded = matching.traded();
    let mut violations = Vec::new();
    for side in [Side::Bid, Side::Ask] {
        let mut orders: Vec<&Order> = book.side(side).iter().collect();
        orders.sort_unstable_by_key(|o| o.key());
        let mut first_short: Option<u64> = None;
        for o in orders {
            let q = traded.get(side, o.id);
            if let Some(stronger) = first_short {
                if q > 0 {
                    violations.push(Violation::Unfair {
                        side,
                        stronger,
                        weaker: o.id,
                    });
                }
            } else if q < o.qty {
                first_short = Some(o.id);
            }
        }
    }
    VerificationReport::new(Check::Fair, violations)
}

/// Checks that all transactions share one price.
pub fn check_uniform(matching: &Matching) -> VerificationReport {
    let mut violations = Vec::new();
    if let Some(first) = matching.transactions.first() {
        for (tx, t) in matching.transactions.iter().enumerate() {
            if t.price != first.price {
                violations.push(Violation::NonUniform {
                    tx,
                    price: t.price,
                    expected: first.price,
                });
            }
        }
    }
    VerificationReport::new(Check::Uniform, violations)
}

/// Checks the matching's volume against the demand-supply bound at every
/// limit price in the book.
pub fn check_bound(matching: &Matching, book: &OrderBook) -> VerificationReport {
    let volume = matching.vol();
    let profile = PriceProfile::new(book);
    let violations = book
        .limit_prices()
        .into_iter()
        .filter_map(|p| {
            let bound = profile.demand_supply(p);
            (volume > bound).then_some(Violation::BoundExceeded {
                price: p,
                volume,
                bound,
            })
        })
        .collect();
    VerificationReport::new(Check::Bound, violations)
}

/// Sorted limit prices with prefix volumes, for per-price volume queries.
struct PriceProfile {
    bids: Vec<(u64, u64)>,
    asks: Vec<(u64, u64)>,
}

impl PriceProfile {
    fn new(book: &OrderBook) -> Self {
        let cumulative = |orders: &[Order]| {
            let mut v: Vec<(u64, u64)> = orders
                .iter()
                .filter_map(|o| o.price.finite().map(|p| (p, o.qty)))
                .collect();
            v.sort_unstable();
            let mut acc = 0;
            for e in &mut v {
                acc += e.1;
                e.1 = acc;
            }
            v
        };
        PriceProfile {
            bids: cumulative(book.bids()),
            asks: cumulative(book.asks()),
        }
    }

    /// Volume of orders priced strictly below `p`.
    fn below(side: &[(u64, u64)], p: u64) -> u64 {
        let n = side.partition_point(|&(q, _)| q < p);
        if n == 0 {
            0
        } else {
            side[n - 1].1
        }
    }

    /// Volume of orders priced at most `p`.
    fn at_most(side: &[(u64, u64)], p: u64) -> u64 {
        let n = side.partition_point(|&(q, _)| q <= p);
        if n == 0 {
            0
        } else {
            side[n - 1].1
        }
    }

    fn total(side: &[(u64, u64)]) -> u64 {
        side.last().map_or(0, |e| e.1)
    }

    fn demand_supply(&self, p: u64) -> u64 {
        let bids_above = Self::total(&self.bids) - Self::at_most(&self.bids, p);
        let bids_at = Self::at_most(&self.bids, p) - Self::below(&self.bids, p);
        let asks_below = Self::below(&self.asks, p);
        let asks_at = Self::at_most(&self.asks, p) - asks_below;
        bids_above + asks_below + bids_at.min(asks_at)
    }

    fn uniform_at(&self, p: u64) -> u64 {
        let bids_at_least = Self::total(&self.bids) - Self::below(&self.bids, p);
        bids_at_least.min(Self::at_most(&self.asks, p))
    }
}

/// Upper bound on the volume of any matching over `book`:
/// `Vol(B>p) + Vol(A<p) + min(Vol(B=p), Vol(A=p))`.
pub fn demand_supply_bound(book: &OrderBook, p: Price) -> Result<u64> {
    let p = p.finite().ok_or_else(|| {
        Error::Domain(format!(
            "the demand-supply bound needs a finite price, got {p}"
        ))
    })?;
    Ok(PriceProfile::new(book).demand_supply(p))
}

/// The tightest demand-supply bound over the book's limit prices, with the
/// price attaining it (`None` for an empty book).
pub fn certified_upper_bound(book: &OrderBook) -> (u64, Option<u64>) {
    let profile = PriceProfile::new(book);
    book.limit_prices()
        .into_iter()
        .map(|p| (profile.demand_supply(p), Some(p)))
        .min_by_key(|&(bound, _)| bound)
        .unwrap_or((0, None))
}

/// Oracle inputs are capped at this many order units (bids plus asks).
pub const ORACLE_UNIT_LIMIT: u64 = 10_000;

/// Maximum matching volume by unit expansion and Hopcroft-Karp on the
/// bipartite tradability graph.
pub fn oracle_max_volume(book: &OrderBook) -> Result<u64> {
    let units = book.bids().vol() + book.asks().vol();
    if units > ORACLE_UNIT_LIMIT {
        return Err(Error::TooLarge {
            volume: units,
            limit: ORACLE_UNIT_LIMIT,
        });
    }
    let expand = |orders: &[Order]| -> Vec<Price> {
        orders
            .iter()
            .flat_map(|o| std::iter::repeat_n(o.price, o.qty as usize))
            .collect()
    };
    let left = expand(book.bids());
    let mut right = expand(book.asks());
    right.sort_unstable();
    // A bid unit is adjacent to exactly the ask units priced at or below it,
    // which is a prefix of the sorted ask units.
    let degree: Vec<usize> = left
        .iter()
        .map(|&p| right.partition_point(|&a| a <= p))
        .collect();
    Ok(hopcroft_karp(&degree, right.len()) as u64)
}

/// Maximum matching size in a bipartite graph where left vertex `u` is
/// adjacent to right vertices `0..degree[u]`.
fn hopcroft_karp(degree: &[usize], n_right: usize) -> usize {
    const FREE: usize = usize::MAX;
    let n_left = degree.len();
    let mut match_left = vec![FREE; n_left];
    let mut match_right = vec![FREE; n_right];
    let mut dist = vec![0usize; n_left];
    let mut size = 0;
    loop {
        // layer the graph from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_left[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut reachable_free = false;
        while let Some(u) = queue.pop_front() {
            for &w in &match_right[..degree[u]] {
                if w == FREE {
                    reachable_free = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !reachable_free {
            return size;
        }
        // vertex-disjoint shortest augmenting paths, iterative DFS
        let mut next_edge = vec![0usize; n_left];
        for root in 0..n_left {
            if match_left[root] != FREE {
                continue;
            }
            let mut stack = vec![root];
            let mut found = false;
            while let Some(&u) = stack.last() {
                if found {
                    break;
                }
                if next_edge[u] >= degree[u] {
                    dist[u] = usize::MAX;
                    stack.pop();
                    continue;
                }
                let v = next_edge[u];
                next_edge[u] += 1;
                let w = match_right[v];
                if w == FREE {
                    found = true;
                    // flip the path recorded on the stack
                    let mut right = v;
                    while let Some(x) = stack.pop() {
                        let prev = match_left[x];
                        match_left[x] = right;
                        match_right[right] = x;
                        right = prev;
                    }
                } else if dist[w] == dist[u] + 1 {
                    stack.push(w);
                }
            }
            if found {
                size += 1;
            }
        }
    }
}

/// Best uniform-price volume: `max_p min(Vol(B>=p), Vol(A<=p))` over the
/// book's limit prices.
pub fn oracle_uniform_volume(book: &OrderBook) -> u64 {
    let profile = PriceProfile::new(book);
    book.limit_prices()
        .into_iter()
        .map(|p| profile.uniform_at(p))
        .max()
        .unwrap_or(0)
}

/// Decides whether `xs`, a sequence over `1..=n` with `n = xs.len()`, has
/// pairwise distinct elements using two maximum-volume matchings. Bids priced
/// `1..=n` face asks priced by `xs`, then the roles swap; both matchings
/// reach volume `n` exactly when `xs` is a permutation.
pub fn element_distinctness(xs: &[u64]) -> Result<bool> {
    let n = xs.len() as u64;
    if n == 0 {
        return Err(Error::Domain(
            "element distinctness needs at least one element".into(),
        ));
    }
    if let Some(&x) = xs.iter().find(|&&x| x == 0 || x > n) {
        return Err(Error::Domain(format!("element {x} is outside [1, {n}]")));
    }
    let grid = |side| {
        (1..=n)
            .map(|i| Order::new(side, i, i, i, 1))
            .collect::<Vec<_>>()
    };
    let input = |side| {
        xs.iter()
            .zip(1..)
            .map(|(&x, i)| Order::new(side, n + i, i, x, 1))
            .collect::<Vec<_>>()
    };
    let first = OrderBook::new(grid(Side::Bid), input(Side::Ask))?;
    let second = OrderBook::new(input(Side::Bid), grid(Side::Ask))?;
    Ok(maximum_matching(&first).vol() == n && maximum_matching(&second).vol() == n)
}
