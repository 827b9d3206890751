mod common;

use proptest::prelude::*;
use xmatch_core::{pad_with_dummy, range_of, split, tradable, Order, Side, Volume};

use common::{book, side_orders, sorted};

fn beats(a: &Order, b: &Order) -> bool {
    a.more_competitive(b).unwrap()
}

proptest! {
    #[test]
    fn competitiveness_is_a_strict_total_order(orders in side_orders(Side::Bid, 8, 4, 3)) {
        for a in &orders {
            prop_assert!(!beats(a, a));
            for b in &orders {
                if a.id != b.id {
                    prop_assert!(beats(a, b) != beats(b, a));
                }
                for c in &orders {
                    if beats(a, b) && beats(b, c) {
                        prop_assert!(beats(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn ask_competitiveness_is_a_strict_total_order(orders in side_orders(Side::Ask, 8, 4, 3)) {
        for a in &orders {
            for b in &orders {
                prop_assert_eq!(a.id == b.id, !beats(a, b) && !beats(b, a));
                if beats(a, b) {
                    // cheaper asks come first, then earlier ones
                    prop_assert!(a.price < b.price || (a.price == b.price && a.timestamp < b.timestamp));
                }
            }
        }
    }

    #[test]
    fn split_partitions(orders in side_orders(Side::Bid, 12, 5, 4), pick in any::<prop::sample::Index>()) {
        prop_assume!(!orders.is_empty());
        let pivot = &orders[pick.index(orders.len())];
        let (at_least, below) = split(&orders, pivot).unwrap();
        prop_assert_eq!(at_least.len() + below.len(), orders.len());
        for o in &at_least {
            prop_assert!(o.id == pivot.id || beats(o, pivot));
        }
        for o in &below {
            prop_assert!(beats(pivot, o));
        }
        let mut ids: Vec<u64> = at_least.iter().chain(&below).map(|o| o.id).collect();
        ids.sort_unstable();
        let mut want: Vec<u64> = orders.iter().map(|o| o.id).collect();
        want.sort_unstable();
        prop_assert_eq!(ids, want);
    }

    #[test]
    fn ranges_tile_the_volume(orders in side_orders(Side::Ask, 12, 5, 4)) {
        let mut next = 1;
        for o in sorted(&orders) {
            let r = range_of(&orders, &o).unwrap();
            prop_assert_eq!(*r.start(), next);
            prop_assert_eq!(r.end() - r.start() + 1, o.qty);
            next = r.end() + 1;
        }
        prop_assert_eq!(next - 1, orders.vol());
    }

    #[test]
    fn padding_balances_volume(b in book(8, 6, 5)) {
        let (padded, descriptor) = pad_with_dummy(&b);
        prop_assert_eq!(padded.bids().vol(), padded.asks().vol());
        match descriptor.order {
            None => prop_assert_eq!(b.bids().vol(), b.asks().vol()),
            Some(d) => {
                prop_assert!(d.is_dummy());
                let others = padded.side(d.side.opposite());
                for o in others {
                    let (bid, ask) = match d.side {
                        Side::Bid => (&d, o),
                        Side::Ask => (o, &d),
                    };
                    prop_assert!(!tradable(bid, ask));
                }
                let ids = b.bids().iter().chain(b.asks()).map(|o| o.id);
                prop_assert!(ids.into_iter().all(|id| id != d.id));
            }
        }
    }
}
