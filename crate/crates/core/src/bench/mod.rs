//! The collaborative-filtering benchmark: ratings ingestion and the
//! OFW/OGD comparison on a trace-norm ball.

mod compare;
mod ratings;

pub use compare::{
    run_cf_compare, Algorithms, BenchConfig, BenchSummary, CompareOutput, CACHE_CHECK_EVERY, CACHE_CHECK_SAMPLES,
    CACHE_CHECK_TOL,
};
pub use ratings::{load_ratings, parse_ratings, write_ratings, RatingRecord, RatingSet};

use crate::error::Result;
use crate::harness::{gen_stream, PlantedMatrix, StreamKind, StreamSpec};
use crate::engine::CostEvent;
use crate::oracles::DomainSpec;

/// A synthetic ratings sequence drawn from a planted low-rank matrix, with
/// the planted matrix.
pub fn planted_ratings(rows: usize, cols: usize, rank: usize, noise: f64, horizon: usize, seed: u64) -> Result<(Vec<RatingRecord>, PlantedMatrix)> {
    // tau only shapes the metadata, which is not used here
    let domain = DomainSpec::trace_norm_ball(rows, cols, 1.0)?;
    let spec = StreamSpec { kind: StreamKind::MatrixEntry { rank, noise }, horizon, seed };
    let stream = gen_stream(&spec, &domain)?;
    let records = stream
        .events
        .iter()
        .map(|e| match *e {
            CostEvent::MatrixEntry { i, j, rating } => RatingRecord { user: i, item: j, rating },
            _ => unreachable!("matrix stream"),
        })
        .collect();
    Ok((records, stream.planted.expect("matrix stream carries its planted matrix")))
}
