//! Bags of machines and the search strategies that fill them.
//!
//! * recombination: pick two bag entries (with replacement), glue them at a
//!   random port, keep the result if it passes the [`AcceptRule`] and its
//!   output is new for its size;
//! * random search: sample fresh machines of one size under the same rule;
//! * hill climbing: first-improvement local search on output length over a
//!   bit-flip and rewire neighborhood.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::cstring::CanonicalCString;
use crate::error::{Error, Result};
use crate::glue::{glue, random_slot};
use crate::machine::{efficiency_ratio, Bnm};
use crate::sampler::{sample_bnm, RngStream};

const CHUNK: u64 = 8192;

#[derive(Debug, Clone, PartialEq)]
pub struct BagEntry {
    pub machine: Bnm,
    pub out: CanonicalCString,
    pub out_len: u64,
    pub ratio: f64,
    /// Bag indices of the `(feeding, receiving)` parents.
    pub lineage: Option<(usize, usize)>,
    pub trial: u64,
}

impl BagEntry {
    pub fn evaluate(machine: Bnm, lineage: Option<(usize, usize)>, trial: u64) -> Self {
        let out = machine.output_cstring();
        let out_len = out.len() as u64;
        let ratio = efficiency_ratio(machine.size(), out_len);
        BagEntry {
            machine,
            out,
            out_len,
            ratio,
            lineage,
            trial,
        }
    }

    pub fn size(&self) -> usize {
        self.machine.size()
    }
}

/// Ordered set of entries, unique by `(size, output)`. An entry's identifier is
/// its insertion index.
#[derive(Debug, Clone, Default)]
pub struct Bag {
    entries: Vec<BagEntry>,
    index: HashMap<(usize, CanonicalCString), usize>,
}

impl PartialEq for Bag {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Bag {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds a bag, rejecting duplicates and lineage that points forward.
    pub fn from_entries(entries: Vec<BagEntry>) -> Result<Self> {
        let mut bag = Bag::new();
        for (i, entry) in entries.into_iter().enumerate() {
            if let Some((p, q)) = entry.lineage {
                if p >= i || q >= i {
                    return Err(Error::Entry {
                        entry: i,
                        message: format!(
                            "lineage [{p}, {q}] references an entry not yet in the bag"
                        ),
                    });
                }
            }
            if bag.insert(entry).is_none() {
                return Err(Error::Entry {
                    entry: i,
                    message: "duplicate (size, output) pair".into(),
                });
            }
        }
        Ok(bag)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BagEntry] {
        &self.entries
    }

    pub fn get(&self, id: usize) -> Option<&BagEntry> {
        self.entries.get(id)
    }

    pub fn contains(&self, size: usize, out: &CanonicalCString) -> bool {
        self.index.contains_key(&(size, out.clone()))
    }

    /// Returns the new entry's id, or `None` if its `(size, output)` is already present.
    pub fn insert(&mut self, entry: BagEntry) -> Option<usize> {
        let key = (entry.size(), entry.out.clone());
        if self.index.contains_key(&key) {
            return None;
        }
        let id = self.entries.len();
        self.index.insert(key, id);
        self.entries.push(entry);
        Some(id)
    }
}

/// Keep a candidate when `ratio >= min_ratio` and, if set, `size <= max_size`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptRule {
    min_ratio: f64,
    max_size: Option<usize>,
}

impl Default for AcceptRule {
    fn default() -> Self {
        AcceptRule {
            min_ratio: 0.8,
            max_size: None,
        }
    }
}

impl AcceptRule {
    pub fn new(min_ratio: f64, max_size: Option<usize>) -> Result<Self> {
        if !(0.0..=1.0).contains(&min_ratio) {
            return Err(Error::InvalidThreshold(min_ratio));
        }
        Ok(AcceptRule {
            min_ratio,
            max_size,
        })
    }

    pub fn min_ratio(&self) -> f64 {
        self.min_ratio
    }

    pub fn max_size(&self) -> Option<usize> {
        self.max_size
    }

    pub fn passes(&self, entry: &BagEntry) -> bool {
        entry.ratio >= self.min_ratio && self.max_size.is_none_or(|cap| entry.size() <= cap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub size: usize,
    pub out_len: u64,
    pub ratio: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchStats {
    pub records: Vec<TrialRecord>,
}

impl SearchStats {
    pub fn trials(&self) -> usize {
        self.records.len()
    }

    pub fn accepted(&self) -> usize {
        self.records.iter().filter(|r| r.accepted).count()
    }

    pub fn best_ratio(&self) -> Option<f64> {
        self.records.iter().map(|r| r.ratio).reduce(f64::max)
    }

    pub fn mean_out_len(&self) -> Option<f64> {
        if self.records.is_empty() {
            return None;
        }
        let sum: u64 = self.records.iter().map(|r| r.out_len).sum();
        Some(sum as f64 / self.records.len() as f64)
    }

    fn push(&mut self, entry: &BagEntry, accepted: bool) {
        self.records.push(TrialRecord {
            trial: entry.trial,
            size: entry.size(),
            out_len: entry.out_len,
            ratio: entry.ratio,
            accepted,
        });
    }
}

/// Evaluates `count` random machines in parallel, chunk by chunk, and hands them
/// to `visit` in trial order.
fn for_each_random(
    size: usize,
    count: u64,
    seed: u64,
    mut visit: impl FnMut(BagEntry),
) -> Result<()> {
    if size == 0 {
        return Err(Error::ZeroSize);
    }
    let mut start = 0;
    while start < count {
        let end = (start + CHUNK).min(count);
        let chunk: Vec<BagEntry> = (start..end)
            .into_par_iter()
            .map(|t| {
                let m = sample_bnm(size, &mut RngStream::for_trial(seed, t)).expect("size >= 1");
                BagEntry::evaluate(m, None, t)
            })
            .collect();
        chunk.into_iter().for_each(&mut visit);
        start = end;
    }
    Ok(())
}

/// Random machines of `size` whose output length is in `allowed_lengths`.
pub fn seed_bag(
    size: usize,
    allowed_lengths: &BTreeSet<u64>,
    budget: u64,
    seed: u64,
) -> Result<Bag> {
    let mut bag = Bag::new();
    for_each_random(size, budget, seed, |entry| {
        if allowed_lengths.contains(&entry.out_len) {
            bag.insert(entry);
        }
    })?;
    Ok(bag)
}

/// One pick-glue-evaluate-keep round. The rng is consumed in the order:
/// feeding pick, receiving pick, slot node, slot port.
pub fn recombine_step(
    bag: &mut Bag,
    rng: &mut RngStream,
    rule: &AcceptRule,
    trial: u64,
) -> Result<(BagEntry, bool)> {
    if bag.is_empty() {
        return Err(Error::EmptyBag);
    }
    let i = rng.below(bag.len());
    let j = rng.below(bag.len());
    let (a, b) = (&bag.entries[i].machine, &bag.entries[j].machine);
    let slot = random_slot(b, rng);
    let glued = glue(a, b, slot)?;
    let candidate = BagEntry::evaluate(glued, Some((i, j)), trial);
    let accepted = rule.passes(&candidate) && bag.insert(candidate.clone()).is_some();
    Ok((candidate, accepted))
}

/// Runs `budget` recombination steps; step `t` draws from `RngStream::for_trial(seed, t)`.
pub fn run_recombination(
    initial: Bag,
    budget: u64,
    rule: &AcceptRule,
    seed: u64,
) -> Result<(Bag, SearchStats)> {
    if initial.is_empty() {
        return Err(Error::EmptyBag);
    }
    let mut bag = initial;
    let mut stats = SearchStats::default();
    for t in 0..budget {
        let mut rng = RngStream::for_trial(seed, t);
        let (candidate, accepted) = recombine_step(&mut bag, &mut rng, rule, t)?;
        stats.push(&candidate, accepted);
    }
    Ok((bag, stats))
}

pub fn run_random_search(
    size: usize,
    budget: u64,
    rule: &AcceptRule,
    seed: u64,
) -> Result<(Bag, SearchStats)> {
    let mut bag = Bag::new();
    let mut stats = SearchStats::default();
    for_each_random(size, budget, seed, |entry| {
        let accepted = rule.passes(&entry) && bag.insert(entry.clone()).is_some();
        stats.push(&entry, accepted);
    })?;
    Ok((bag, stats))
}

/// Number of single-edit neighbors: `4N` truth-table bit flips plus
/// `2N(N-1)` rewires of one input port to a different node.
pub fn neighborhood_size(size: usize) -> usize {
    4 * size + 2 * size * size.saturating_sub(1)
}

/// The `k`-th neighbor in the fixed enumeration: flips first (node-major,
/// entry-minor), then rewires (node, port, target skipping the current input).
pub fn neighbor(m: &Bnm, k: usize) -> Bnm {
    let n = m.size();
    let mut nodes = m.nodes().to_vec();
    if k < 4 * n {
        let node = &mut nodes[k / 4];
        node.tt = node.tt.flip((k % 4) as u8);
    } else {
        let r = k - 4 * n;
        let per_node = 2 * (n - 1);
        let (node, rem) = (r / per_node, r % per_node);
        let (port, t) = (rem / (n - 1), rem % (n - 1));
        let current = nodes[node].inputs[port];
        nodes[node].inputs[port] = if t >= current { t + 1 } else { t };
    }
    Bnm::new(nodes, m.output()).expect("neighbor keeps indices in range")
}

#[derive(Debug, Clone)]
pub struct HillClimbOutcome {
    pub best: BagEntry,
    /// Output length of the start followed by each improvement; nondecreasing.
    pub trajectory: Vec<u64>,
    pub evaluations: u64,
    /// True when the search stopped because no neighbor improves.
    pub local_optimum: bool,
}

/// First-improvement hill climbing on output length. Each round visits
/// neighbors in uniformly random order without replacement and moves on the
/// first strict improvement. `budget` caps neighbor evaluations.
pub fn hill_climb(start: &Bnm, budget: u64, rng: &mut RngStream) -> HillClimbOutcome {
    let mut best = BagEntry::evaluate(start.clone(), None, 0);
    let mut trajectory = vec![best.out_len];
    let mut evaluations = 0u64;
    let mut order: Vec<usize> = Vec::new();

    loop {
        let total = neighborhood_size(best.size());
        order.clear();
        order.extend(0..total);
        let mut improved = None;
        for i in 0..total {
            if evaluations >= budget {
                return HillClimbOutcome {
                    best,
                    trajectory,
                    evaluations,
                    local_optimum: false,
                };
            }
            let j = i + rng.below(total - i);
            order.swap(i, j);
            let cand = neighbor(&best.machine, order[i]);
            evaluations += 1;
            let entry = BagEntry::evaluate(cand, None, evaluations);
            if entry.out_len > best.out_len {
                improved = Some(entry);
                break;
            }
        }
        match improved {
            Some(entry) => {
                trajectory.push(entry.out_len);
                best = entry;
            }
            None => {
                return HillClimbOutcome {
                    best,
                    trajectory,
                    evaluations,
                    local_optimum: true,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{NodeSpec, TruthTable};

    fn lengths_6_7() -> BTreeSet<u64> {
        [6, 7].into_iter().collect()
    }

    fn assert_consistent(bag: &Bag) {
        for e in bag.entries() {
            assert!(e.machine.validate().is_ok());
            let fresh = BagEntry::evaluate(e.machine.clone(), e.lineage, e.trial);
            assert_eq!(&fresh, e);
        }
    }

    #[test]
    fn seed_bag_examples() {
        let bag = seed_bag(3, &lengths_6_7(), 100_000, 1).unwrap();
        assert!(!bag.is_empty());
        assert!(bag
            .entries()
            .iter()
            .all(|e| e.out_len == 6 || e.out_len == 7));
        assert_consistent(&bag);
        assert!(seed_bag(3, &lengths_6_7(), 0, 1).unwrap().is_empty());
    }

    #[test]
    fn empty_bag_errors() {
        let mut rng = RngStream::new(0);
        assert!(matches!(
            recombine_step(&mut Bag::new(), &mut rng, &AcceptRule::default(), 0),
            Err(Error::EmptyBag)
        ));
        assert!(run_recombination(Bag::new(), 5, &AcceptRule::default(), 0).is_err());
    }

    #[test]
    fn single_entry_recombines_with_itself() {
        let bag = seed_bag(3, &lengths_6_7(), 100_000, 4).unwrap();
        let mut one = Bag::new();
        one.insert(bag.entries()[0].clone());
        let (cand, accepted) =
            recombine_step(&mut one, &mut RngStream::new(9), &AcceptRule::default(), 0).unwrap();
        assert_eq!(cand.size(), 6);
        assert_eq!(cand.lineage, Some((0, 0)));
        if accepted {
            assert_eq!(one.len(), 2);
            assert_eq!(one.entries()[1], cand);
        }
    }

    #[test]
    fn strict_threshold_accepts_only_maximal_cycles() {
        let bag = seed_bag(3, &lengths_6_7(), 100_000, 4).unwrap();
        let rule = AcceptRule::new(1.0, None).unwrap();
        let (_, stats) = run_recombination(bag, 2_000, &rule, 3).unwrap();
        for r in &stats.records {
            if r.accepted {
                assert_eq!(r.out_len, 1u64 << r.size);
            }
        }
    }

    #[test]
    fn recombination_zero_budget_and_determinism() {
        let bag = seed_bag(3, &lengths_6_7(), 50_000, 8).unwrap();
        let (same, stats) = run_recombination(bag.clone(), 0, &AcceptRule::default(), 1).unwrap();
        assert_eq!(same, bag);
        assert_eq!(stats.trials(), 0);

        let rule = AcceptRule::new(0.7, Some(12)).unwrap();
        let a = run_recombination(bag.clone(), 3_000, &rule, 21).unwrap();
        let b = run_recombination(bag, 3_000, &rule, 21).unwrap();
        assert_eq!(a, b);
        assert_consistent(&a.0);
        // lineage closure and dedup
        let mut keys = BTreeSet::new();
        for (i, e) in a.0.entries().iter().enumerate() {
            if let Some((p, q)) = e.lineage {
                assert!(p < i && q < i);
            }
            assert!(keys.insert((e.size(), e.out.to_string())));
            assert!(e.size() <= 12);
        }
    }

    #[test]
    fn random_search_examples() {
        let rule = AcceptRule::default();
        let (bag, stats) = run_random_search(6, 0, &rule, 1).unwrap();
        assert!(bag.is_empty() && stats.trials() == 0);
        let a = run_random_search(6, 5_000, &rule, 1).unwrap();
        let b = run_random_search(6, 5_000, &rule, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.1.trials(), 5_000);
        assert!(a.0.entries().iter().all(|e| e.out_len >= 28));
        assert_consistent(&a.0);
    }

    #[test]
    fn invalid_threshold() {
        assert!(AcceptRule::new(1.5, None).is_err());
        assert!(AcceptRule::new(-0.1, None).is_err());
    }

    #[test]
    fn neighborhood_enumeration() {
        assert_eq!(neighborhood_size(6), 84);
        assert_eq!(neighborhood_size(1), 4);
        let m = sample_bnm(4, &mut RngStream::new(17)).unwrap();
        let total = neighborhood_size(4);
        let mut seen = BTreeSet::new();
        for k in 0..total {
            let nb = neighbor(&m, k);
            assert_ne!(nb, m);
            let diff: usize = nb
                .nodes()
                .iter()
                .zip(m.nodes())
                .map(|(x, y)| {
                    (x.tt.bits() ^ y.tt.bits()).count_ones() as usize
                        + (x.inputs[0] != y.inputs[0]) as usize
                        + (x.inputs[1] != y.inputs[1]) as usize
                })
                .sum();
            assert_eq!(diff, 1);
            assert!(seen.insert(format!("{:?}", nb.nodes())));
        }
    }

    #[test]
    fn hill_climb_stops_at_local_optimum() {
        // NOT of itself: output "01" has the maximal length 2 for one node.
        let m = Bnm::new(vec![NodeSpec::new(TruthTable::NOR, 0, 0)], 0).unwrap();
        let out = hill_climb(&m, 1_000, &mut RngStream::new(0));
        assert_eq!(out.best.machine, m);
        assert_eq!(out.trajectory, vec![2]);
        assert!(out.local_optimum);
        assert_eq!(out.evaluations, 4);
    }

    #[test]
    fn hill_climb_trajectory_is_monotone() {
        for seed in 0..20 {
            let mut rng = RngStream::new(seed);
            let start = sample_bnm(6, &mut rng).unwrap();
            let out = hill_climb(&start, 1_000, &mut rng);
            assert!(out.trajectory.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(*out.trajectory.last().unwrap(), out.best.out_len);
            assert!(out.evaluations <= 1_000);
        }
    }

    #[test]
    fn hill_climb_zero_budget_returns_start() {
        let mut rng = RngStream::new(2);
        let start = sample_bnm(5, &mut rng).unwrap();
        let out = hill_climb(&start, 0, &mut rng);
        assert_eq!(out.best.machine, start);
        assert_eq!(out.evaluations, 0);
        assert!(!out.local_optimum);
    }
}
