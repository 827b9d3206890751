//! Deterministic linear-time selection by competitiveness.
//!
//! The in-place routines rearrange a slice so that the selected element sits
//! at its final sorted position, everything before it is more competitive and
//! everything after it is less competitive. The uniform-price matcher relies
//! on that layout to split order lists without allocating.

use crate::error::{Error, Result};
use crate::orders::{CompetitiveKey, Order, Side, Volume};

/// Anything that can be ranked by price-time priority and carries a quantity.
pub trait Ranked {
    fn rank_key(&self) -> CompetitiveKey;
    fn quantity(&self) -> u64;
    fn set_quantity(&mut self, qty: u64);
}

impl Ranked for Order {
    #[inline]
    fn rank_key(&self) -> CompetitiveKey {
        self.key()
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

const GROUP: usize = 5;
const SMALL: usize = 16;
/// Scratch levels for the median recursion; each level is a fifth of the
/// one above, so this covers any slice length.
const DEPTH: usize = 32;

/// Anything with a competitiveness key, including bare keys.
trait Keyed {
    fn key(&self) -> CompetitiveKey;
    fn weight(&self) -> u64;
}

impl<T: Ranked> Keyed for T {
    #[inline(always)]
    fn key(&self) -> CompetitiveKey {
        self.rank_key()
    }
    #[inline(always)]
    fn weight(&self) -> u64 {
        self.quantity()
    }
}

impl Keyed for CompetitiveKey {
    #[inline(always)]
    fn key(&self) -> CompetitiveKey {
        *self
    }
    #[inline(always)]
    fn weight(&self) -> u64 {
        0
    }
}

fn insertion_sort<T: Keyed>(v: &mut [T]) {
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j].key() < v[j - 1].key() {
            v.swap(j, j - 1);
            j -= 1;
        }
    }
}

#[inline(always)]
fn min_max(a: u128, b: u128) -> (u128, u128) {
    if b < a {
        (b, a)
    } else {
        (a, b)
    }
}

#[inline(always)]
fn median_of_three(a: u128, b: u128, c: u128) -> u128 {
    let (lo, hi) = min_max(a, b);
    min_max(lo, min_max(hi, c).0).1
}

#[inline(always)]
fn median_of_five<T: Keyed>(g: &[T]) -> CompetitiveKey {
    let (a, b, c, d, e) = (
        g[0].key().bits(),
        g[1].key().bits(),
        g[2].key().bits(),
        g[3].key().bits(),
        g[4].key().bits(),
    );
    let (ab_lo, ab_hi) = min_max(a, b);
    let (cd_lo, cd_hi) = min_max(c, d);
    // the smaller pair minimum and the larger pair maximum cannot be the
    // median; the median of five is the median of what remains
    CompetitiveKey::from_bits(median_of_three(
        e,
        min_max(ab_lo, cd_lo).1,
        min_max(ab_hi, cd_hi).0,
    ))
}

/// Rank among the `m` group medians to pivot on for target rank `k` in `n`
/// elements. Near either end the pivot is pulled towards `k` while still
/// guaranteeing that `k` falls on the smaller side; otherwise it is the
/// median of the medians.
fn pivot_rank(n: usize, m: usize, k: usize) -> usize {
    if k < n / 6 {
        // at least 3(j + 1) - 1 elements rank strictly before the pivot
        (k + 2).div_ceil(3).saturating_sub(1).min(m - 1)
    } else if n - k < n / 6 {
        // at least 3(m - j) elements rank at or after the pivot
        m.saturating_sub((n - k).div_ceil(3))
    } else {
        m / 2
    }
}

/// Rank among `c` leftover group medians, all known to lie in the window,
/// that is guaranteed to put target `k` on the small side of the partition.
/// Only worth it when `k` sits near an end of the window.
fn reuse_rank(n: usize, c: usize, k: usize) -> Option<usize> {
    let after = n - 1 - k;
    if k < n / 8 && k + 1 < c {
        // `k + 1` candidates rank strictly before the pivot
        Some(k + 1)
    } else if after < n / 8 && after < c {
        // `after` candidates rank strictly after the pivot
        Some(c - 1 - after)
    } else {
        None
    }
}

fn weight<T: Keyed>(v: &[T]) -> u64 {
    v.iter().map(Keyed::weight).sum()
}

/// Returns the total weight of `v[..=k]` once it is in place.
fn select_with<T: Keyed>(v: &mut [T], k: usize, pool: &mut [Vec<CompetitiveKey>]) -> u64 {
    let (medians, deeper) = pool.split_first_mut().expect("scratch depth exceeded");
    let (mut lo, mut hi) = (0, v.len());
    // weight of v[..lo]
    let mut before = 0;
    // Group medians from an earlier round that lie inside the window. Near
    // the ends of the window one of them makes a good pivot without a fresh
    // pass over the groups.
    let mut cands = 0..0;
    loop {
        let n = hi - lo;
        if n <= SMALL {
            insertion_sort(&mut v[lo..hi]);
            return before + weight(&v[lo..=k]);
        }
        let window = &mut v[lo..hi];
        let r = match reuse_rank(n, cands.len(), k - lo) {
            Some(r) => r,
            None => {
                medians.clear();
                medians.extend(window.chunks_exact(GROUP).map(median_of_five));
                cands = 0..medians.len();
                pivot_rank(n, medians.len(), k - lo)
            }
        };
        select_with(&mut medians[cands.clone()], r, deeper);
        let pivot = medians[cands.start + r];

        let (lt, w) = block_partition(window, |t| t.key() < pivot);
        let lt = lo + lt;
        if k < lt {
            hi = lt;
            cands = cands.start..cands.start + r;
        } else if lt > lo {
            lo = lt;
            before += w;
            cands = cands.start + r + 1..cands.end;
        } else {
            // Nothing ranks before the pivot: sweep out its ties so the
            // window shrinks even when many keys are equal.
            let (le, w) = block_partition(window, |t| t.key() <= pivot);
            let le = lo + le;
            if k < le {
                return before + weight(&v[lo..=k]);
            }
            lo = le;
            before += w;
            cands = cands.start + r + 1..cands.end;
        }
        // A reused pivot that failed to cut the window enough forces a
        // fresh median-of-medians round, which keeps the worst case linear.
        if 4 * (hi - lo) > 3 * n {
            cands = 0..0;
        }
    }
}

const BLOCK: usize = 128;

/// Moves elements satisfying `left` to the front and returns their count
/// and total weight. Scans from both ends in blocks, recording out-of-place
/// offsets without branching and then swapping them pairwise; each finished
/// left block is weighed while still in cache.
fn block_partition<T: Keyed>(v: &mut [T], left: impl Fn(&T) -> bool) -> (usize, u64) {
    let mut offs_l = [0u8; BLOCK];
    let mut offs_r = [0u8; BLOCK];
    let (mut l, mut r) = (0usize, v.len());
    let (mut start_l, mut num_l) = (0usize, 0usize);
    let (mut start_r, mut num_r) = (0usize, 0usize);
    let mut w = 0;
    while r - l > 2 * BLOCK {
        if num_l == 0 {
            start_l = 0;
            for i in 0..BLOCK {
                offs_l[num_l] = i as u8;
                num_l += usize::from(!left(&v[l + i]));
            }
        }
        if num_r == 0 {
            start_r = 0;
            for i in 0..BLOCK {
                offs_r[num_r] = i as u8;
                num_r += usize::from(left(&v[r - 1 - i]));
            }
        }
        let n = num_l.min(num_r);
        for j in 0..n {
            v.swap(
                l + offs_l[start_l + j] as usize,
                r - 1 - offs_r[start_r + j] as usize,
            );
        }
        start_l += n;
        start_r += n;
        num_l -= n;
        num_r -= n;
        if num_l == 0 {
            w += weight(&v[l..l + BLOCK]);
            l += BLOCK;
        }
        if num_r == 0 {
            r -= BLOCK;
        }
    }
    // Finish the middle with a plain two-pointer scan. A block still holding
    // recorded offsets is simply rescanned.
    let settled = l;
    loop {
        while l < r && left(&v[l]) {
            l += 1;
        }
        while l < r && !left(&v[r - 1]) {
            r -= 1;
        }
        if l >= r {
            return (l, w + weight(&v[settled..l]));
        }
        r -= 1;
        v.swap(l, r);
        l += 1;
    }
}

/// Reusable scratch space for the median recursion. Keeping one around
/// across many selections avoids reallocating the median buffers.
#[derive(Debug)]
pub struct Selector {
    pool: Vec<Vec<CompetitiveKey>>,
}

impl Default for Selector {
    fn default() -> Self {
        Selector {
            pool: vec![Vec::new(); DEPTH],
        }
    }
}

impl Selector {
    /// Moves the element of 0-based rank `k` to `v[k]`, with more
    /// competitive elements before it and less competitive ones after.
    /// Worst-case linear: pivots are medians of groups of five.
    ///
    /// Returns the total quantity of `v[..=k]`.
    ///
    /// Panics if `k >= v.len()`.
    pub fn select<T: Ranked>(&mut self, v: &mut [T], k: usize) -> u64 {
        assert!(
            k < v.len(),
            "rank {k} out of bounds for {} elements",
            v.len()
        );
        select_with(v, k, &mut self.pool)
    }

    /// Weighted selection: finds the element whose unit range contains `q`
    /// (1-based) and leaves `v` partitioned around it. Returns its index.
    ///
    /// Follows the halving scheme: select the median, split, keep the half
    /// whose cumulative volume brackets `q`. The half kept on the left side
    /// still holds the median itself.
    ///
    /// Panics if `q` is zero or exceeds the total quantity.
    pub fn select_q<T: Ranked>(&mut self, v: &mut [T], q: u64) -> usize {
        self.select_q_before(v, q).0
    }

    /// [`Selector::select_q`] that also returns the total quantity of the
    /// elements before the returned index.
    pub fn select_q_before<T: Ranked>(&mut self, v: &mut [T], q: u64) -> (usize, u64) {
        let (mut lo, mut hi, mut q) = (0, v.len(), q);
        let mut before = 0;
        assert!(q >= 1, "quantity must be positive");
        loop {
            assert!(lo < hi, "quantity exceeds the volume of the order list");
            let k = (hi - lo).div_ceil(2) - 1;
            let vol_at_least = self.select(&mut v[lo..hi], k);
            let m = lo + k;
            let vol_better = vol_at_least - v[m].quantity();
            if vol_better < q && q <= vol_at_least {
                return (m, before + vol_better);
            }
            if q <= vol_better {
                hi = m + 1;
            } else {
                q -= vol_at_least;
                before += vol_at_least;
                lo = m + 1;
            }
        }
    }
}

/// One-off [`Selector::select`].
pub fn select_in_place<T: Ranked>(v: &mut [T], k: usize) -> u64 {
    Selector::default().select(v, k)
}

/// One-off [`Selector::select_q`].
pub fn select_q_in_place<T: Ranked>(v: &mut [T], q: u64) -> usize {
    Selector::default().select_q(v, q)
}

fn common_side(orders: &[Order]) -> Result<Option<Side>> {
    let Some(first) = orders.first() else {
        return Ok(None);
    };
    match orders.iter().find(|o| o.side != first.side) {
        Some(o) => Err(Error::SideMismatch {
            expected: first.side,
            found: o.side,
        }),
        None => Ok(Some(first.side)),
    }
}

/// The `t`-th most competitive order (1-based).
pub fn select_kth(orders: &[Order], t: usize) -> Result<Order> {
    common_side(orders)?;
    if t == 0 || t > orders.len() {
        return Err(Error::OutOfRange {
            what: "rank",
            value: t as u64,
            min: 1,
            max: orders.len() as u64,
        });
    }
    let mut work = orders.to_vec();
    select_in_place(&mut work, t - 1);
    Ok(work.swap_remove(t - 1))
}

fn check_quantity(orders: &[Order], q: u64) -> Result<()> {
    common_side(orders)?;
    let vol = orders.vol();
    if q == 0 || q > vol {
        return Err(Error::OutOfRange {
            what: "quantity",
            value: q,
            min: 1,
            max: vol,
        });
    }
    Ok(())
}

/// The order whose unit range contains `q`.
pub fn select_q(orders: &[Order], q: u64) -> Result<Order> {
    check_quantity(orders, q)?;
    let mut work = orders.to_vec();
    let j = select_q_in_place(&mut work, q);
    Ok(work.swap_remove(j))
}

/// Result of splitting an order list at a quantity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantitySplit {
    /// The order whose range contains the split quantity, at full size.
    pub pivot: Order,
    /// Orders at least as competitive as the pivot, volume exactly `q`.
    pub at_least: Vec<Order>,
    /// The rest, including the pivot's leftover part if it was cut.
    pub at_most: Vec<Order>,
}

/// Splits `orders` so the more competitive part has volume exactly `q`,
/// cutting the boundary order in two when needed. Both parts of a cut order
/// keep its id, timestamp and price.
pub fn split_q(orders: &[Order], q: u64) -> Result<QuantitySplit> {
    check_quantity(orders, q)?;
    let mut work = orders.to_vec();
    let j = select_q_in_place(&mut work, q);
    let pivot = work[j].clone();
    let vol_before: u64 = work[..j].iter().map(|o| o.qty).sum();
    let extra = vol_before + pivot.qty - q;
    let mut at_most = work.split_off(j + 1);
    if extra > 0 {
        work[j].qty = pivot.qty - extra;
        at_most.push(pivot.with_qty(extra));
    }
    Ok(QuantitySplit {
        pivot,
        at_least: work,
        at_most,
    })
}
