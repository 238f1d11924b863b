//! Output-length distribution experiments.
//!
//! * [`fig3`]: output lengths of uniformly random machines, one histogram per size.
//! * [`fig4`]: output lengths of size-6 machines made by gluing two random picks
//!   from a bag of size-3 machines with output length 6 or 7, against random
//!   size-6 machines.
//! * [`hillclimb_vs_recombination`]: equal-budget comparison of the hill-climbing
//!   baseline against recombination.
//!
//! Trials draw from per-trial streams and histograms merge commutatively, so
//! reports are identical for any thread count.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glue::{glue, random_slot};
use crate::histogram::{merge_histograms, Histogram};
use crate::machine::{efficiency_ratio, Bnm};
use crate::sampler::{derive_seed, sample_bnm, RngStream};
use crate::search::{hill_climb, run_recombination, seed_bag, AcceptRule, Bag};

// Sub-stream indices under the master seed.
const STREAM_SEED_BAG: u64 = 0;
const STREAM_GLUED: u64 = 1;
const STREAM_RANDOM: u64 = 2;
const STREAM_RECOMBINE: u64 = 3;
const STREAM_HILL: u64 = 4;

/// Which length goes into the histograms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthMode {
    /// Length of the canonical (primitive) output c-string.
    #[default]
    Canonical,
    /// Period of the state cycle.
    RawCycle,
}

impl LengthMode {
    pub fn measure(self, m: &Bnm) -> u64 {
        match self {
            LengthMode::Canonical => m.output_cstring().len() as u64,
            LengthMode::RawCycle => m.find_cycle().cycle_len,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSummary {
    pub mean: f64,
    pub tail_mass: f64,
    pub loglog_slope: Option<f64>,
    pub modal_length: Option<u64>,
    pub max_length: Option<u64>,
    pub octave_counts: Vec<u64>,
}

impl HistogramSummary {
    pub fn of(h: &Histogram, tail_threshold: u64) -> Self {
        HistogramSummary {
            mean: h.mean(),
            tail_mass: h.tail_mass(tail_threshold),
            loglog_slope: h.loglog_slope(),
            modal_length: h.modal_length(),
            max_length: h.bins.keys().next_back().copied(),
            octave_counts: h.octave_counts(),
        }
    }

    pub fn octaves_nonincreasing(&self) -> bool {
        self.octave_counts.windows(2).all(|w| w[0] >= w[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub trials: u64,
    pub master_seed: u64,
    pub tail_threshold: u64,
    pub length_mode: LengthMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_bag_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_bag_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_bag_lengths: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_bag_entries: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ConfigEcho,
    pub histograms: BTreeMap<String, Histogram>,
    pub summaries: BTreeMap<String, HistogramSummary>,
}

impl ExperimentReport {
    fn new(experiment: &str, config: ConfigEcho, histograms: BTreeMap<String, Histogram>) -> Self {
        let summaries = histograms
            .iter()
            .map(|(k, h)| (k.clone(), HistogramSummary::of(h, config.tail_threshold)))
            .collect();
        ExperimentReport {
            experiment: experiment.to_string(),
            config,
            histograms,
            summaries,
        }
    }

    pub fn summary(&self, name: &str) -> Option<&HistogramSummary> {
        self.summaries.get(name)
    }
}

/// Histogram over `trials` independent trials; `trial` maps a trial's stream to a length.
fn histogram_of<F>(trials: u64, seed: u64, trial: F) -> Histogram
where
    F: Fn(&mut RngStream) -> u64 + Sync,
{
    (0..trials)
        .into_par_iter()
        .fold(Histogram::new, |mut h, t| {
            h.add(trial(&mut RngStream::for_trial(seed, t)));
            h
        })
        .reduce(Histogram::new, merge_histograms)
}

#[derive(Debug, Clone)]
pub struct Fig3Config {
    pub sizes: Vec<usize>,
    pub trials: u64,
    pub master_seed: u64,
    pub tail_threshold: u64,
    pub length_mode: LengthMode,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Fig3Config {
            sizes: vec![3, 6, 9],
            trials: 100_000,
            master_seed: 0,
            tail_threshold: 16,
            length_mode: LengthMode::Canonical,
        }
    }
}

/// Histograms are named `size<N>`.
pub fn fig3(config: &Fig3Config) -> Result<ExperimentReport> {
    if config.trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let mut histograms = BTreeMap::new();
    for &size in &config.sizes {
        if size == 0 {
            return Err(Error::ZeroSize);
        }
        let seed = derive_seed(config.master_seed, size as u64);
        let mode = config.length_mode;
        let h = histogram_of(config.trials, seed, |rng| {
            mode.measure(&sample_bnm(size, rng).expect("size >= 1"))
        });
        histograms.insert(format!("size{size}"), h);
    }
    let echo = ConfigEcho {
        trials: config.trials,
        master_seed: config.master_seed,
        tail_threshold: config.tail_threshold,
        length_mode: config.length_mode,
        sizes: Some(config.sizes.clone()),
        seed_bag_budget: None,
        seed_bag_size: None,
        seed_bag_lengths: None,
        seed_bag_entries: None,
    };
    Ok(ExperimentReport::new("fig3", echo, histograms))
}

#[derive(Debug, Clone)]
pub struct Fig4Config {
    pub trials: u64,
    pub master_seed: u64,
    pub seed_bag_budget: u64,
    pub seed_bag_size: usize,
    pub seed_bag_lengths: BTreeSet<u64>,
    pub tail_threshold: u64,
    pub length_mode: LengthMode,
}

impl Default for Fig4Config {
    fn default() -> Self {
        Fig4Config {
            trials: 100_000,
            master_seed: 0,
            seed_bag_budget: 100_000,
            seed_bag_size: 3,
            seed_bag_lengths: [6, 7].into_iter().collect(),
            tail_threshold: 16,
            length_mode: LengthMode::Canonical,
        }
    }
}

/// Histograms `glued` (unfiltered pick-two-and-glue candidates) and `random`
/// (random machines of the glued size).
pub fn fig4(config: &Fig4Config) -> Result<ExperimentReport> {
    if config.trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let bag = seed_bag(
        config.seed_bag_size,
        &config.seed_bag_lengths,
        config.seed_bag_budget,
        derive_seed(config.master_seed, STREAM_SEED_BAG),
    )?;
    if bag.is_empty() {
        return Err(Error::SeedBagEmpty);
    }
    let mode = config.length_mode;
    let glued = histogram_of(
        config.trials,
        derive_seed(config.master_seed, STREAM_GLUED),
        |rng| mode.measure(&glue_pick(&bag, rng)),
    );
    let size = 2 * config.seed_bag_size;
    let random = histogram_of(
        config.trials,
        derive_seed(config.master_seed, STREAM_RANDOM),
        |rng| mode.measure(&sample_bnm(size, rng).expect("size >= 1")),
    );
    let echo = ConfigEcho {
        trials: config.trials,
        master_seed: config.master_seed,
        tail_threshold: config.tail_threshold,
        length_mode: config.length_mode,
        sizes: Some(vec![size]),
        seed_bag_budget: Some(config.seed_bag_budget),
        seed_bag_size: Some(config.seed_bag_size),
        seed_bag_lengths: Some(config.seed_bag_lengths.iter().copied().collect()),
        seed_bag_entries: Some(bag.len()),
    };
    let histograms = [("glued".to_string(), glued), ("random".to_string(), random)]
        .into_iter()
        .collect();
    Ok(ExperimentReport::new("fig4", echo, histograms))
}

/// One unfiltered glued candidate: same draw order as a recombination step,
/// without the keep decision.
pub fn glue_pick(bag: &Bag, rng: &mut RngStream) -> Bnm {
    let a = &bag.entries()[rng.below(bag.len())].machine;
    let b = &bag.entries()[rng.below(bag.len())].machine;
    let slot = random_slot(b, rng);
    glue(a, b, slot).expect("slot drawn from b")
}

#[derive(Debug, Clone)]
pub struct HillClimbConfig {
    pub size: usize,
    pub starts: u64,
    pub budget_per_start: u64,
    pub master_seed: u64,
    pub min_ratio: f64,
    pub seed_bag_budget: u64,
}

impl Default for HillClimbConfig {
    fn default() -> Self {
        HillClimbConfig {
            size: 6,
            starts: 1_000,
            budget_per_start: 1_000,
            master_seed: 0,
            min_ratio: 0.8,
            seed_bag_budget: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HillClimbArm {
    pub starts: u64,
    pub evaluations: u64,
    pub local_optima: u64,
    pub all_monotone: bool,
    pub best_out_len: u64,
    pub best_ratio: f64,
    pub mean_best_out_len: f64,
    /// Final (best) output length per start.
    pub final_lengths: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecombinationArm {
    pub seed_bag_entries: usize,
    pub evaluations: u64,
    pub accepted: u64,
    /// Over candidates of the target size only.
    pub best_out_len: u64,
    pub best_ratio: f64,
    pub mean_out_len: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HillClimbReport {
    pub size: usize,
    pub starts: u64,
    pub budget_per_start: u64,
    pub master_seed: u64,
    pub min_ratio: f64,
    pub seed_bag_budget: u64,
    pub hill_climb: HillClimbArm,
    pub recombination: RecombinationArm,
}

/// Hill climbing from `starts` random machines against one recombination run
/// with the same total evaluation budget, capped at the target size. The
/// recombination bag is seeded from half-size machines with output lengths
/// `{2h, 2h + 1}` (h = size / 2), the same construction as [`fig4`].
pub fn hillclimb_vs_recombination(config: &HillClimbConfig) -> Result<HillClimbReport> {
    let size = config.size;
    if size < 2 {
        return Err(Error::ZeroSize);
    }
    let hill_seed = derive_seed(config.master_seed, STREAM_HILL);
    let outcomes: Vec<_> = (0..config.starts)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngStream::for_trial(hill_seed, t);
            let start = sample_bnm(size, &mut rng).expect("size >= 1");
            hill_climb(&start, config.budget_per_start, &mut rng)
        })
        .collect();
    let mut final_lengths = Histogram::new();
    for o in &outcomes {
        final_lengths.add(o.best.out_len);
    }
    let best_out_len = final_lengths.bins.keys().next_back().copied().unwrap_or(1);
    let hill = HillClimbArm {
        starts: config.starts,
        evaluations: outcomes.iter().map(|o| o.evaluations).sum(),
        local_optima: outcomes.iter().filter(|o| o.local_optimum).count() as u64,
        all_monotone: outcomes
            .iter()
            .all(|o| o.trajectory.windows(2).all(|w| w[0] <= w[1])),
        best_out_len,
        best_ratio: efficiency_ratio(size, best_out_len),
        mean_best_out_len: final_lengths.mean(),
        final_lengths,
    };

    let half = size / 2;
    let lengths: BTreeSet<u64> = [2 * half as u64, 2 * half as u64 + 1].into_iter().collect();
    let bag = seed_bag(
        half,
        &lengths,
        config.seed_bag_budget,
        derive_seed(config.master_seed, STREAM_SEED_BAG),
    )?;
    if bag.is_empty() {
        return Err(Error::SeedBagEmpty);
    }
    let seed_bag_entries = bag.len();
    let rule = AcceptRule::new(config.min_ratio, Some(size))?;
    let budget = config.starts * config.budget_per_start;
    let (_, stats) = run_recombination(
        bag,
        budget,
        &rule,
        derive_seed(config.master_seed, STREAM_RECOMBINE),
    )?;
    let at_size: Vec<_> = stats.records.iter().filter(|r| r.size == size).collect();
    let best_out_len = at_size.iter().map(|r| r.out_len).max().unwrap_or(1);
    let mean_out_len = if at_size.is_empty() {
        0.0
    } else {
        at_size.iter().map(|r| r.out_len).sum::<u64>() as f64 / at_size.len() as f64
    };
    let recombination = RecombinationArm {
        seed_bag_entries,
        evaluations: budget,
        accepted: stats.accepted() as u64,
        best_out_len,
        best_ratio: efficiency_ratio(size, best_out_len),
        mean_out_len,
    };

    Ok(HillClimbReport {
        size,
        starts: config.starts,
        budget_per_start: config.budget_per_start,
        master_seed: config.master_seed,
        min_ratio: config.min_ratio,
        seed_bag_budget: config.seed_bag_budget,
        hill_climb: hill,
        recombination,
    })
}
