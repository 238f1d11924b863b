//! Gluing rule: machine `a` drives one input port of machine `b`.

use crate::error::{Error, Result};
use crate::machine::{Bnm, NodeSpec};
use crate::sampler::RngStream;

/// An input port of a node in the second (receiving) machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GlueSlot {
    pub node: usize,
    pub port: u8,
}

impl GlueSlot {
    pub fn new(node: usize, port: u8) -> Self {
        GlueSlot { node, port }
    }

    fn check(self, b: &Bnm) -> Result<()> {
        if self.node >= b.size() || self.port > 1 {
            return Err(Error::InvalidSlot {
                node: self.node,
                port: self.port,
                size: b.size(),
            });
        }
        Ok(())
    }
}

/// Nodes of `a` come first and are unchanged; `b`'s nodes follow with indices
/// shifted by `|a|`, except that `slot` now reads `a`'s output node. The glued
/// machine reports `b`'s output.
pub fn glue(a: &Bnm, b: &Bnm, slot: GlueSlot) -> Result<Bnm> {
    slot.check(b)?;
    let offset = a.size();
    let mut nodes = Vec::with_capacity(a.size() + b.size());
    nodes.extend_from_slice(a.nodes());
    nodes.extend(b.nodes().iter().map(|n| NodeSpec {
        tt: n.tt,
        inputs: [n.inputs[0] + offset, n.inputs[1] + offset],
    }));
    nodes[offset + slot.node].inputs[slot.port as usize] = a.output();
    Bnm::new(nodes, b.output() + offset)
}

/// Uniform over the `2 * |b|` ports: node first, then port.
pub fn random_slot(b: &Bnm, rng: &mut RngStream) -> GlueSlot {
    let node = rng.below(b.size());
    let port = rng.below(2) as u8;
    GlueSlot { node, port }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::TruthTable;
    use crate::sampler::sample_bnm;

    fn node(tt: u8, i0: usize, i1: usize) -> NodeSpec {
        NodeSpec::new(TruthTable::new(tt).unwrap(), i0, i1)
    }

    #[test]
    fn sizes_add() {
        let mut rng = RngStream::new(3);
        let a = sample_bnm(3, &mut rng).unwrap();
        let b = sample_bnm(3, &mut rng).unwrap();
        let g = glue(&a, &b, GlueSlot::new(1, 0)).unwrap();
        assert_eq!(g.size(), 6);
        assert_eq!(g.output(), b.output() + 3);
        assert_eq!(&g.nodes()[..3], a.nodes());
    }

    #[test]
    fn rewires_designated_port() {
        let a = Bnm::new(vec![node(6, 1, 2), node(1, 0, 0), node(8, 1, 0)], 0).unwrap();
        let b = Bnm::new(vec![node(6, 1, 1), node(12, 0, 0)], 1).unwrap();
        let g = glue(&a, &b, GlueSlot::new(0, 1)).unwrap();
        assert_eq!(g.nodes()[3].inputs, [4, 0]);
        assert_eq!(g.nodes()[4].inputs, [3, 3]);
        assert_eq!(g.output(), 4);
    }

    #[test]
    fn invalid_slot() {
        let a = Bnm::new(vec![node(1, 0, 0)], 0).unwrap();
        assert!(matches!(
            glue(&a, &a, GlueSlot::new(1, 0)),
            Err(Error::InvalidSlot { .. })
        ));
        assert!(glue(&a, &a, GlueSlot::new(0, 2)).is_err());
    }

    #[test]
    fn self_glue_is_a_copy() {
        let a = Bnm::new(vec![node(1, 0, 0)], 0).unwrap();
        let g = glue(&a, &a, GlueSlot::new(0, 0)).unwrap();
        assert_eq!(g.nodes(), &[node(1, 0, 0), node(1, 0, 1)]);
        assert_eq!(a.size(), 1);
    }

    #[test]
    fn single_node_slots() {
        let b = Bnm::new(vec![node(1, 0, 0)], 0).unwrap();
        for seed in 0..50 {
            let s = random_slot(&b, &mut RngStream::new(seed));
            assert_eq!(s.node, 0);
            assert!(s.port <= 1);
        }
        assert_eq!(
            random_slot(&b, &mut RngStream::new(8)),
            random_slot(&b, &mut RngStream::new(8))
        );
    }

    #[test]
    fn slot_frequencies() {
        let b = sample_bnm(4, &mut RngStream::new(0)).unwrap();
        let mut rng = RngStream::new(5150);
        let mut counts = [0u32; 8];
        let draws = 100_000;
        for _ in 0..draws {
            let s = random_slot(&b, &mut rng);
            counts[s.node * 2 + s.port as usize] += 1;
        }
        let p = 1.0 / 8.0;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - draws as f64 * p).abs() < 5.0 * sigma);
        }
    }
}
