//! Wall-clock comparison of the matchers on generated books.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::engine::{maximum_matching, um_star, uniform_star};
use crate::error::{Error, Result};
use crate::instance::{gen_instance, InstanceSpec};
use crate::orders::{Matching, OrderBook, Volume};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    UmStar,
    UniformStar,
    MaximumMatching,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::UmStar,
        Algorithm::UniformStar,
        Algorithm::MaximumMatching,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::UmStar => "um_star",
            Algorithm::UniformStar => "uniform_star",
            Algorithm::MaximumMatching => "maximum_matching",
        }
    }

    pub fn run(self, book: &OrderBook) -> Result<Matching> {
        match self {
            Algorithm::UmStar => um_star(book),
            Algorithm::UniformStar => uniform_star(book),
            Algorithm::MaximumMatching => Ok(maximum_matching(book)),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    pub n: usize,
    /// Median wall time in seconds.
    pub wall_time: f64,
    pub volume: u64,
}

/// Median of `reps` timed runs after one discarded warm-up run.
pub fn time_median(
    algorithm: Algorithm,
    book: &OrderBook,
    reps: usize,
) -> Result<(Duration, Matching)> {
    let mut last = algorithm.run(book)?;
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps.max(1) {
        drop(last);
        let start = Instant::now();
        last = algorithm.run(book)?;
        times.push(start.elapsed());
    }
    times.sort();
    Ok((times[times.len() / 2], last))
}

/// Times each algorithm on a book of `n` orders per size, drawn from
/// `template` with `n_bids = n / 2`. Fails if the two uniform-price matchers
/// disagree on volume.
pub fn run_bench(
    sizes: &[usize],
    template: &InstanceSpec,
    algorithms: &[Algorithm],
) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for &n in sizes {
        let spec = InstanceSpec {
            n_bids: n / 2,
            n_asks: n - n / 2,
            ..template.clone()
        };
        let book = gen_instance(&spec)?;
        let mut uniform_volume: Option<(Algorithm, u64)> = None;
        for &algorithm in algorithms {
            let (time, matching) = time_median(algorithm, &book, 3)?;
            let volume = matching.vol();
            if algorithm != Algorithm::MaximumMatching {
                match uniform_volume {
                    Some((other, v)) if v != volume => {
                        return Err(Error::Internal(format!(
                            "{other} traded {v} but {algorithm} traded {volume} at n = {n}"
                        )))
                    }
                    _ => uniform_volume = Some((algorithm, volume)),
                }
            }
            records.push(BenchRecord {
                algorithm,
                n,
                wall_time: time.as_secs_f64(),
                volume,
            });
        }
    }
    Ok(records)
}
