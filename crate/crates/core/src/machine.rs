//! Machine representation, synchronous stepping and state-cycle detection.

use std::fmt;

use crate::cstring::{canonicalize_bits, CanonicalCString};
use crate::error::{Error, Result};

/// A 2-input boolean function. Output for inputs `(a, b)` is bit `2a + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable(u8);

impl TruthTable {
    pub const ZERO: TruthTable = TruthTable(0);
    pub const NOR: TruthTable = TruthTable(1);
    pub const XOR: TruthTable = TruthTable(6);
    pub const AND: TruthTable = TruthTable(8);
    /// Copies the first input.
    pub const FIRST: TruthTable = TruthTable(12);

    pub fn new(bits: u8) -> Result<Self> {
        if bits > 15 {
            return Err(Error::TruthTableRange(bits.into()));
        }
        Ok(TruthTable(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn eval(self, a: bool, b: bool) -> bool {
        eval_node(self, a, b)
    }

    /// Same table with one of its four entries inverted.
    pub fn flip(self, entry: u8) -> TruthTable {
        debug_assert!(entry < 4);
        TruthTable(self.0 ^ (1 << entry))
    }
}

#[inline]
pub fn eval_node(tt: TruthTable, a: bool, b: bool) -> bool {
    let index = 2 * a as u8 + b as u8;
    (tt.0 >> index) & 1 == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeSpec {
    pub tt: TruthTable,
    pub inputs: [usize; 2],
}

impl NodeSpec {
    pub fn new(tt: TruthTable, in0: usize, in1: usize) -> Self {
        NodeSpec {
            tt,
            inputs: [in0, in1],
        }
    }
}

/// A rule broken by a candidate machine description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Empty,
    OutputOutOfRange {
        output: usize,
        size: usize,
    },
    EdgeOutOfRange {
        node: usize,
        port: u8,
        target: usize,
        size: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Empty => f.write_str("machine has no nodes"),
            Violation::OutputOutOfRange { output, size } => {
                write!(f, "output out of range (output {output}, size {size})")
            }
            Violation::EdgeOutOfRange {
                node,
                port,
                target,
                size,
            } => write!(
                f,
                "edge target out of range (node {node} input {port} -> {target}, size {size})"
            ),
        }
    }
}

/// Checks every structural rule and reports all violations, not just the first.
pub fn validate(nodes: &[NodeSpec], output: usize) -> std::result::Result<(), Vec<Violation>> {
    let size = nodes.len();
    let mut violations = Vec::new();
    if size == 0 {
        violations.push(Violation::Empty);
    }
    if output >= size {
        violations.push(Violation::OutputOutOfRange { output, size });
    }
    for (node, spec) in nodes.iter().enumerate() {
        for (port, &target) in spec.inputs.iter().enumerate() {
            if target >= size {
                violations.push(Violation::EdgeOutOfRange {
                    node,
                    port: port as u8,
                    target,
                    size,
                });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Bit-packed node states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateVector {
    words: Vec<u64>,
    len: usize,
}

impl StateVector {
    pub fn zeros(len: usize) -> Self {
        StateVector {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = StateVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

/// Transient length `mu` and period `lambda` of the trajectory from the all-zero state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CycleSummary {
    pub transient_len: u64,
    pub cycle_len: u64,
}

/// Full result of running a machine to its state cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub cycle: CycleSummary,
    /// Output-node bits over one period, starting at the first cycle state.
    pub raw_output: Vec<u8>,
    pub output: CanonicalCString,
}

/// A zero-input single-output machine of 2-input nodes.
///
/// Construction validates every index, so a `Bnm` value is always well formed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bnm {
    nodes: Vec<NodeSpec>,
    output: usize,
}

impl Bnm {
    pub fn new(nodes: Vec<NodeSpec>, output: usize) -> Result<Self> {
        validate(&nodes, output).map_err(Error::InvalidMachine)?;
        Ok(Bnm { nodes, output })
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        validate(&self.nodes, self.output)
    }

    /// Writes the synchronous successor of `src` into `dst`.
    pub fn step_into(&self, src: &StateVector, dst: &mut StateVector) {
        debug_assert_eq!(src.len(), self.size());
        debug_assert_eq!(dst.len(), self.size());
        dst.words.iter_mut().for_each(|w| *w = 0);
        for (i, node) in self.nodes.iter().enumerate() {
            let a = src.get(node.inputs[0]);
            let b = src.get(node.inputs[1]);
            if node.tt.eval(a, b) {
                dst.words[i / 64] |= 1 << (i % 64);
            }
        }
    }

    pub fn step(&self, state: &StateVector) -> StateVector {
        let mut next = StateVector::zeros(self.size());
        self.step_into(state, &mut next);
        next
    }

    /// Brent's cycle detection from the all-zero state. Memory is O(N)
    /// regardless of how long the cycle is.
    pub fn find_cycle(&self) -> CycleSummary {
        self.locate_cycle().0
    }

    /// Returns the cycle summary together with the first state on the cycle.
    fn locate_cycle(&self) -> (CycleSummary, StateVector) {
        let n = self.size();
        let start = StateVector::zeros(n);
        let mut scratch = StateVector::zeros(n);

        let mut power: u64 = 1;
        let mut lambda: u64 = 1;
        let mut tortoise = start.clone();
        let mut hare = self.step(&start);
        while tortoise != hare {
            if power == lambda {
                tortoise.clone_from(&hare);
                power *= 2;
                lambda = 0;
            }
            self.step_into(&hare, &mut scratch);
            std::mem::swap(&mut hare, &mut scratch);
            lambda += 1;
        }

        // Hare leads by lambda; walking both until they meet lands on the cycle entry.
        tortoise.clone_from(&start);
        hare.clone_from(&start);
        for _ in 0..lambda {
            self.step_into(&hare, &mut scratch);
            std::mem::swap(&mut hare, &mut scratch);
        }
        let mut mu: u64 = 0;
        while tortoise != hare {
            self.step_into(&tortoise, &mut scratch);
            std::mem::swap(&mut tortoise, &mut scratch);
            self.step_into(&hare, &mut scratch);
            std::mem::swap(&mut hare, &mut scratch);
            mu += 1;
        }

        (
            CycleSummary {
                transient_len: mu,
                cycle_len: lambda,
            },
            tortoise,
        )
    }

    /// Output-node bits over one full cycle, replayed from the cycle entry.
    pub fn raw_cycle_output(&self) -> (CycleSummary, Vec<u8>) {
        let (summary, mut state) = self.locate_cycle();
        let mut scratch = StateVector::zeros(self.size());
        let mut bits = Vec::with_capacity(summary.cycle_len as usize);
        for _ in 0..summary.cycle_len {
            bits.push(state.get(self.output) as u8);
            self.step_into(&state, &mut scratch);
            std::mem::swap(&mut state, &mut scratch);
        }
        (summary, bits)
    }

    pub fn output_cstring(&self) -> CanonicalCString {
        self.evaluate().output
    }

    pub fn evaluate(&self) -> Evaluation {
        let (cycle, raw_output) = self.raw_cycle_output();
        let output = canonicalize_bits(&raw_output);
        Evaluation {
            cycle,
            raw_output,
            output,
        }
    }
}

/// Continuous efficiency score `log2(L) / N`; lies in `[0, 1]` for these machines
/// because `L <= 2^N`.
pub fn efficiency_ratio(size: usize, out_len: u64) -> f64 {
    debug_assert!(size >= 1 && out_len >= 1);
    (out_len as f64).log2() / size as f64
}
