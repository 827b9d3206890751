//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xmatch_core::bench::Algorithm;
use xmatch_core::instance::{gen_instance, InstanceSpec};
use xmatch_core::{
    check_fair, check_uniform, check_valid, demand_supply_bound, element_distinctness,
    max_fair_matching, maximum_matching, oracle_max_volume, oracle_uniform_volume, range_of,
    um_star, uniform_star, Matching, Order, OrderBook, Price, Side, Volume,
};

type Outcome = Result<String, String>;

/// Every book with at most three orders per side, prices in {1,2,3} and
/// quantities in {1,2}.
fn exhaustive_books() -> Vec<OrderBook> {
    let shapes: Vec<(u64, u64)> = (1..=3).flat_map(|p| (1..=2).map(move |q| (p, q))).collect();
    let mut side_lists: Vec<Vec<Vec<(u64, u64)>>> = vec![vec![vec![]]];
    for len in 1..=3 {
        let mut next = Vec::new();
        for prefix in &side_lists[len - 1] {
            for &s in &shapes {
                let mut v = prefix.clone();
                v.push(s);
                next.push(v);
            }
        }
        side_lists.push(next);
    }
    let all: Vec<&Vec<(u64, u64)>> = side_lists.iter().flatten().collect();
    let mut books = Vec::new();
    for bids in &all {
        for asks in &all {
            books.push(build(bids, asks));
        }
    }
    books
}

fn build(bids: &[(u64, u64)], asks: &[(u64, u64)]) -> OrderBook {
    let nb = bids.len() as u64;
    let b = bids
        .iter()
        .enumerate()
        .map(|(i, &(p, q))| Order::bid(i as u64 + 1, i as u64 + 1, p, q))
        .collect();
    let a = asks
        .iter()
        .enumerate()
        .map(|(i, &(p, q))| Order::ask(nb + i as u64 + 1, i as u64 + 1, p, q))
        .collect();
    OrderBook::new(b, a).expect("generated book is well formed")
}

fn random_book(rng: &mut ChaCha8Rng, max_n: usize, max_price: u64, max_qty: u64) -> OrderBook {
    let n = rng.gen_range(0..=max_n);
    let nb = rng.gen_range(0..=n);
    let mut side = |len: usize| -> Vec<(u64, u64)> {
        (0..len)
            .map(|_| (rng.gen_range(1..=max_price), rng.gen_range(1..=max_qty)))
            .collect()
    };
    let bids = side(nb);
    let asks = side(n - nb);
    // shuffle timestamps so competitiveness is not tied to id order
    let mut book = build(&bids, &asks);
    let (mut b, mut a) = book.clone().into_parts();
    for list in [&mut b, &mut a] {
        let mut ts: Vec<u64> = (1..=list.len() as u64).collect();
        for i in (1..ts.len()).rev() {
            ts.swap(i, rng.gen_range(0..=i));
        }
        for (o, t) in list.iter_mut().zip(ts) {
            o.timestamp = t;
        }
    }
    book = OrderBook::new(b, a).expect("generated book is well formed");
    book
}

fn small_family() -> Vec<OrderBook> {
    let mut books = exhaustive_books();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    books.extend((0..10_000).map(|_| random_book(&mut rng, 10, 8, 3)));
    books
}

fn medium_family() -> Vec<OrderBook> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    (0..10_000)
        .map(|_| random_book(&mut rng, 200, 50, 10))
        .collect()
}

struct Outputs {
    max: Matching,
    max_fair: Matching,
    um: Matching,
    uniform: Matching,
}

fn outputs(book: &OrderBook) -> Result<Outputs, String> {
    Ok(Outputs {
        max: maximum_matching(book),
        max_fair: max_fair_matching(book).map_err(|e| e.to_string())?,
        um: um_star(book).map_err(|e| e.to_string())?,
        uniform: uniform_star(book).map_err(|e| e.to_string())?,
    })
}

fn describe(book: &OrderBook) -> String {
    format!("bids {:?} asks {:?}", book.bids(), book.asks())
}

fn within(limit: Duration, start: Instant, summary: String) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{summary} in {took:.2?}"))
    } else {
        Err(format!("{summary} but took {took:.2?} (limit {limit:?})"))
    }
}

fn criterion_1(small: &[OrderBook]) -> Outcome {
    let start = Instant::now();
    for book in small {
        let got = max_fair_matching(book).map_err(|e| e.to_string())?.vol();
        let want = oracle_max_volume(book).map_err(|e| e.to_string())?;
        if got != want {
            return Err(format!(
                "volume {got} vs oracle {want} on {}",
                describe(book)
            ));
        }
    }
    within(
        Duration::from_secs(60),
        start,
        format!("{} books agree", small.len()),
    )
}

fn criterion_2(small: &[OrderBook]) -> Outcome {
    let start = Instant::now();
    for book in small {
        let fast = uniform_star(book).map_err(|e| e.to_string())?.vol();
        let slow = um_star(book).map_err(|e| e.to_string())?.vol();
        let oracle = oracle_uniform_volume(book);
        if fast != slow || slow != oracle {
            return Err(format!(
                "uniform_star {fast}, um_star {slow}, oracle {oracle} on {}",
                describe(book)
            ));
        }
    }
    within(
        Duration::from_secs(60),
        start,
        format!("{} books agree", small.len()),
    )
}

fn criterion_3(medium: &[OrderBook]) -> Outcome {
    let start = Instant::now();
    for book in medium {
        let fast = uniform_star(book).map_err(|e| e.to_string())?.traded();
        let slow = um_star(book).map_err(|e| e.to_string())?.traded();
        for o in book.bids().iter().chain(book.asks()) {
            let (f, s) = (fast.get(o.side, o.id), slow.get(o.side, o.id));
            if f != s {
                return Err(format!(
                    "order {} traded {f} vs {s} on {}",
                    o.id,
                    describe(book)
                ));
            }
        }
    }
    within(
        Duration::from_secs(120),
        start,
        format!("{} books, every order equal", medium.len()),
    )
}

fn criterion_4(families: &[&[OrderBook]]) -> Outcome {
    let mut checked = 0usize;
    for book in families.iter().flat_map(|f| f.iter()) {
        let out = outputs(book)?;
        for (name, m) in [
            ("maximum_matching", &out.max),
            ("max_fair_matching", &out.max_fair),
            ("um_star", &out.um),
            ("uniform_star", &out.uniform),
        ] {
            let r = check_valid(m, book);
            if !r.passed() {
                return Err(format!("{name}: {r} on {}", describe(book)));
            }
        }
        for (name, m) in [
            ("max_fair_matching", &out.max_fair),
            ("um_star", &out.um),
            ("uniform_star", &out.uniform),
        ] {
            let r = check_fair(m, book);
            if !r.passed() {
                return Err(format!("{name}: {r} on {}", describe(book)));
            }
        }
        for (name, m) in [("um_star", &out.um), ("uniform_star", &out.uniform)] {
            let r = check_uniform(m);
            if !r.passed() {
                return Err(format!("{name}: {r}"));
            }
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} books, all outputs valid, fair and uniform where required"
    ))
}

fn criterion_5(families: &[&[OrderBook]]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut probes = 0usize;
    for book in families.iter().flat_map(|f| f.iter()) {
        let out = outputs(book)?;
        let top = book.limit_prices().last().copied().unwrap_or(1);
        let mut prices = book.limit_prices();
        let grid: HashSet<u64> = prices.iter().copied().collect();
        let mut off = 0;
        while off < 16 {
            let p = rng.gen_range(0..=top + 2);
            if !grid.contains(&p) {
                prices.push(p);
                off += 1;
            }
        }
        for p in prices {
            let bound = demand_supply_bound(book, Price::Finite(p)).map_err(|e| e.to_string())?;
            for (name, m) in [
                ("maximum_matching", &out.max),
                ("max_fair_matching", &out.max_fair),
                ("um_star", &out.um),
                ("uniform_star", &out.uniform),
            ] {
                if m.vol() > bound {
                    return Err(format!(
                        "{name} volume {} exceeds bound {bound} at p = {p} on {}",
                        m.vol(),
                        describe(book)
                    ));
                }
            }
            probes += 1;
        }
    }
    Ok(format!("{probes} price probes, no bound exceeded"))
}

fn criterion_6(families: &[&[OrderBook]]) -> Outcome {
    let mut checked = 0usize;
    for book in families.iter().flat_map(|f| f.iter()) {
        let out = outputs(book)?;
        let (max, fair, uni) = (out.max.vol(), out.max_fair.vol(), out.uniform.vol());
        if max != fair || fair < uni {
            return Err(format!(
                "maximum {max}, fair {fair}, uniform {uni} on {}",
                describe(book)
            ));
        }
        checked += 1;
    }
    Ok(format!("{checked} books ordered"))
}

fn distinct_by_scan(xs: &[u64]) -> bool {
    let mut seen = HashSet::new();
    xs.iter().all(|x| seen.insert(*x))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut cases = 0usize;
    for n in 1..=5u32 {
        let alphabet = u64::from(n);
        let total = alphabet.pow(n);
        for mut code in 0..total {
            let xs: Vec<u64> = (0..n)
                .map(|_| {
                    let d = code % alphabet;
                    code /= alphabet;
                    d + 1
                })
                .collect();
            let got = element_distinctness(&xs).map_err(|e| e.to_string())?;
            if got != distinct_by_scan(&xs) {
                return Err(format!("wrong answer on {xs:?}"));
            }
            cases += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    for i in 0..10_000 {
        // even rounds draw a permutation of 1..=100 with at most one value
        // overwritten, odd rounds draw uniformly, so both answers occur
        let mut xs: Vec<u64> = (1..=100).collect();
        if i % 2 == 0 {
            xs.shuffle(&mut rng);
            if i % 4 == 0 {
                let (at, from) = (rng.gen_range(0..100), rng.gen_range(0..100));
                xs[at] = xs[from];
            }
        } else {
            xs.iter_mut().for_each(|x| *x = rng.gen_range(1..=100));
        }
        let got = element_distinctness(&xs).map_err(|e| e.to_string())?;
        if got != distinct_by_scan(&xs) {
            return Err(format!("wrong answer on {xs:?}"));
        }
        cases += 1;
    }
    within(
        Duration::from_secs(60),
        start,
        format!("{cases} inputs agree"),
    )
}

/// Median of three timed runs per (algorithm, book) pair after one warm-up
/// each. The runs are interleaved so that slow phases of the machine hit
/// every pair alike.
fn interleaved_medians(pairs: &[(Algorithm, &OrderBook)]) -> Result<Vec<Duration>, String> {
    let mut samples = vec![Vec::new(); pairs.len()];
    for round in 0..4 {
        for (&(algorithm, book), times) in pairs.iter().zip(&mut samples) {
            let start = Instant::now();
            let matching = algorithm.run(book).map_err(|e| e.to_string())?;
            let elapsed = start.elapsed();
            drop(matching);
            if round > 0 {
                times.push(elapsed);
            }
        }
    }
    Ok(samples
        .into_iter()
        .map(|mut times| {
            times.sort();
            times[1]
        })
        .collect())
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let book =
        |n: usize| gen_instance(&InstanceSpec::balanced(n, 0x5eed_0008)).map_err(|e| e.to_string());

    let (small, mid) = (book(1 << 20)?, book(1 << 21)?);
    let t = interleaved_medians(&[
        (Algorithm::UniformStar, &small),
        (Algorithm::UniformStar, &mid),
    ])?;
    drop((small, mid));
    let (t20, t21) = (t[0], t[1]);
    let ratio = t21.as_secs_f64() / t20.as_secs_f64();

    let large = book(1 << 22)?;
    let t = interleaved_medians(&[
        (Algorithm::UniformStar, &large),
        (Algorithm::UmStar, &large),
    ])?;
    let (fast, slow) = (t[0], t[1]);

    let summary = format!(
        "2^20 {t20:.2?}, 2^21 {t21:.2?} (ratio {ratio:.2}); 2^22 uniform_star {fast:.2?} vs um_star {slow:.2?}"
    );
    if ratio > 2.5 {
        return Err(format!("{summary}: ratio above 2.5"));
    }
    if fast > slow {
        return Err(format!("{summary}: uniform_star slower"));
    }
    within(Duration::from_secs(300), start, summary)
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let mut transactions = 0usize;
    for _ in 0..1_000 {
        let book = random_book(&mut rng, 100, 30, 10);
        let m = um_star(&book).map_err(|e| e.to_string())?;
        let find = |side: Side, id: u64| book.side(side).iter().find(|o| o.id == id).cloned();
        for t in &m.transactions {
            let (b, a) = (
                find(Side::Bid, t.bid_id).ok_or("unknown bid")?,
                find(Side::Ask, t.ask_id).ok_or("unknown ask")?,
            );
            let rb = range_of(book.bids(), &b).map_err(|e| e.to_string())?;
            let ra = range_of(book.asks(), &a).map_err(|e| e.to_string())?;
            if rb.end() < ra.start() || ra.end() < rb.start() {
                return Err(format!(
                    "bid {} range {rb:?} and ask {} range {ra:?} are disjoint",
                    b.id, a.id
                ));
            }
            transactions += 1;
        }
    }
    Ok(format!(
        "{transactions} transactions with overlapping ranges"
    ))
}

fn main() -> ExitCode {
    let small = small_family();
    let medium = medium_family();
    let families: [&[OrderBook]; 2] = [&small, &medium];

    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("1 max-volume oracle", Box::new(|| criterion_1(&small))),
        ("2 uniform-volume oracle", Box::new(|| criterion_2(&small))),
        (
            "3 per-order quantity equality",
            Box::new(|| criterion_3(&medium)),
        ),
        (
            "4 validity, fairness, uniformity",
            Box::new(|| criterion_4(&families)),
        ),
        ("5 demand-supply bound", Box::new(|| criterion_5(&families))),
        ("6 volume ordering", Box::new(|| criterion_6(&families))),
        ("7 element distinctness", Box::new(criterion_7)),
        ("8 linear-time scaling", Box::new(criterion_8)),
        ("9 overlapping ranges", Box::new(criterion_9)),
    ];

    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion/criteria failed");
        ExitCode::FAILURE
    }
}
