//! Agent-based Monte-Carlo engine.

mod histogram;
mod population;
mod run;
mod seeds;
mod sweep;
mod uniqueness;

pub use histogram::{edge_histogram, EdgeHistogram, HistogramConfig};
pub use population::{approves, generate_population, PopulationIndex};
pub use run::{prover_tree, run_prover, ProverRun};
pub use seeds::{stream_rng, with_jobs, Stream};
pub use sweep::{sweep, ConfusionCounts, Percent, SweepCell, SweepConfig, SweepResult};
pub use uniqueness::{monte_carlo_uniqueness, uniqueness_experiment, UniquenessConfig, UniquenessRow};
