//! Reference implementations used only by tests.
//!
//! Everything here works on plain `(tt, in0, in1)` triples and `Vec<bool>`
//! states so that it shares no code path with the library.

#![allow(dead_code)]

use std::collections::HashMap;

/// `(truth table, in0, in1)` per node; output node index separately.
pub type RawNode = (u8, usize, usize);

pub fn naive_step(nodes: &[RawNode], state: &[bool]) -> Vec<bool> {
    nodes
        .iter()
        .map(|&(tt, i0, i1)| {
            let a = state[i0] as u8;
            let b = state[i1] as u8;
            (tt >> (2 * a + b)) & 1 == 1
        })
        .collect()
}

/// Returns `(mu, lambda, raw output bits over one cycle starting at cycle entry)`.
pub fn naive_cycle(nodes: &[RawNode], output: usize) -> (u64, u64, Vec<u8>) {
    let mut seen: HashMap<Vec<bool>, u64> = HashMap::new();
    let mut history: Vec<Vec<bool>> = Vec::new();
    let mut state = vec![false; nodes.len()];
    let mut t = 0u64;
    loop {
        if let Some(&first) = seen.get(&state) {
            let mu = first;
            let lambda = t - first;
            let bits = history[mu as usize..]
                .iter()
                .map(|s| s[output] as u8)
                .collect();
            return (mu, lambda, bits);
        }
        seen.insert(state.clone(), t);
        history.push(state.clone());
        state = naive_step(nodes, &state);
        t += 1;
    }
}

/// Least rotation of the primitive prefix, by trying every divisor and every rotation.
pub fn brute_canonical(bits: &[u8]) -> Vec<u8> {
    assert!(!bits.is_empty());
    let n = bits.len();
    let period = (1..=n)
        .find(|&p| n.is_multiple_of(p) && (0..n).all(|i| bits[i] == bits[i % p]))
        .unwrap();
    let prefix = &bits[..period];
    (0..period)
        .map(|r| {
            let mut v = prefix[r..].to_vec();
            v.extend_from_slice(&prefix[..r]);
            v
        })
        .min()
        .unwrap()
}

pub fn bits_from_str(s: &str) -> Vec<u8> {
    s.bytes().map(|c| c - b'0').collect()
}

pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter()
        .map(|&b| if b == 1 { '1' } else { '0' })
        .collect()
}
