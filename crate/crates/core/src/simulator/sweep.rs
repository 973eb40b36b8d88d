use std::fmt;
use std::ops::AddAssign;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{grid, Mix};
use crate::error::{Error, Result};
use crate::simulator::population::generate_population;
use crate::simulator::run::run_prover;
use crate::simulator::seeds::{stream_rng, with_jobs, Stream};
use crate::types::{Environment, ThetaParams};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn record(&mut self, honest: bool, truthful: bool) {
        match (honest, truthful) {
            (true, true) => self.tp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fp += 1,
        }
    }

    pub fn honest_runs(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn dishonest_runs(&self) -> u64 {
        self.tn + self.fp
    }

    pub fn total(&self) -> u64 {
        self.honest_runs() + self.dishonest_runs()
    }

    /// `None` when no honest prover ran.
    pub fn tp_pct(&self) -> Option<Percent> {
        Percent::ratio(self.tp, self.honest_runs())
    }

    pub fn fn_pct(&self) -> Option<Percent> {
        self.tp_pct().map(Percent::complement)
    }

    pub fn tn_pct(&self) -> Option<Percent> {
        Percent::ratio(self.tn, self.dishonest_runs())
    }

    pub fn fp_pct(&self) -> Option<Percent> {
        self.tn_pct().map(Percent::complement)
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, other: Self) {
        self.tp += other.tp;
        self.tn += other.tn;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

/// A percentage held as an integer number of millionths of a percent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Percent(pub u64);

impl Percent {
    pub const SCALE: u64 = 1_000_000;
    pub const HUNDRED: Percent = Percent(100 * Self::SCALE);

    /// `part / whole * 100`, rounded half up.
    pub fn ratio(part: u64, whole: u64) -> Option<Self> {
        if whole == 0 {
            return None;
        }
        let scaled = part as u128 * Self::HUNDRED.0 as u128;
        let whole = whole as u128;
        Some(Self(((scaled + whole / 2) / whole) as u64))
    }

    pub fn complement(self) -> Self {
        Self(Self::HUNDRED.0 - self.0)
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / Self::SCALE as f64
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:06}", self.0 / Self::SCALE, self.0 % Self::SCALE)
    }
}

impl std::str::FromStr for Percent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad percentage `{s}`"));
        let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 6 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let whole: u64 = whole.parse().map_err(|_| bad())?;
        let frac: u64 = if frac.is_empty() { 0 } else { format!("{frac:0<6}").parse().map_err(|_| bad())? };
        Ok(Self(whole * Self::SCALE + frac))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub env: Environment,
    pub theta: ThetaParams,
    pub grid_step: f64,
    pub runs_per_agent: usize,
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        grid(self.grid_step)?;
        if self.runs_per_agent == 0 {
            return Err(Error::InvalidParameter("runs per agent must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub p_h: f64,
    pub p_c: f64,
    pub counts: ConfusionCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    /// Row-major over `p_h`, then `p_c`.
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn total_runs(&self) -> u64 {
        self.cells.iter().map(|c| c.counts.total()).sum()
    }

    pub fn cell(&self, p_h: f64, p_c: f64) -> Option<&SweepCell> {
        self.cells.iter().find(|c| (c.p_h - p_h).abs() < 1e-9 && (c.p_c - p_c).abs() < 1e-9)
    }
}

/// One repetition: a fresh population where every agent proves once.
fn repetition(config: &SweepConfig, mix: Mix, path: [u64; 3]) -> ConfusionCounts {
    let mut pop_rng = stream_rng(config.seed, Stream::Population, &path);
    let population = generate_population(&config.env, mix, &mut pop_rng);
    let mut counts = ConfusionCounts::default();
    for agent in population.agents() {
        let mut rng = stream_rng(config.seed, Stream::Prover, &[path[0], path[1], path[2], agent.id.0 as u64]);
        let run = run_prover(agent.id, &population, &config.theta, &mut rng);
        counts.record(agent.is_honest(), run.verdict.truthful);
    }
    counts
}

/// Runs every agent as prover `runs_per_agent` times on each grid cell,
/// regenerating the population for every repetition.
pub fn sweep(config: &SweepConfig, jobs: Option<usize>) -> Result<SweepResult> {
    config.validate()?;
    let axis = grid(config.grid_step)?;
    let cells: Vec<(usize, usize)> = (0..axis.len()).flat_map(|i| (0..axis.len()).map(move |j| (i, j))).collect();
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.runs_per_agent).map(move |rep| (c, rep)))
        .collect();
    let per_task: Vec<ConfusionCounts> = with_jobs(jobs, || {
        tasks
            .par_iter()
            .map(|&(c, rep)| {
                let (i, j) = cells[c];
                let mix = Mix { p_h: axis[i], p_c: axis[j] };
                repetition(config, mix, [i as u64, j as u64, rep as u64])
            })
            .collect()
    });
    let mut totals = vec![ConfusionCounts::default(); cells.len()];
    for (&(c, _), counts) in tasks.iter().zip(per_task) {
        totals[c] += counts;
    }
    let cells = cells
        .iter()
        .zip(totals)
        .map(|(&(i, j), counts)| SweepCell { p_h: axis[i], p_c: axis[j], counts })
        .collect();
    Ok(SweepResult { config: config.clone(), cells })
}
