//! Reduced ordered decision diagrams over symbol bits, used to split the
//! outgoing cubes of a state (or macro-state) into disjoint regions.

use std::collections::HashMap;

use super::Cube;

pub(crate) const NO_LEAF: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Leaf(u32),
    Branch { var: u8, lo: u32, hi: u32 },
}

#[derive(Debug, Default)]
pub(crate) struct Dd {
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
}

impl Dd {
    pub fn new() -> Dd {
        Dd::default()
    }

    fn mk(&mut self, node: Node) -> u32 {
        if let Node::Branch { lo, hi, .. } = node {
            if lo == hi {
                return lo;
            }
        }
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.unique.insert(node, id);
        id
    }

    /// Builds the diagram mapping each symbol to `leaf_of(payloads of the
    /// entries whose cube contains it)`. Payload slices handed to `leaf_of`
    /// keep entry order.
    pub fn build<P: Copy>(&mut self, entries: &[(Cube, P)], leaf_of: &mut impl FnMut(&[P]) -> u32) -> u32 {
        let owned: Vec<(Cube, P)> = entries.to_vec();
        self.split(owned, 0, leaf_of)
    }

    fn split<P: Copy>(&mut self, entries: Vec<(Cube, P)>, from: u32, leaf_of: &mut impl FnMut(&[P]) -> u32) -> u32 {
        let above = if from >= 64 { 0 } else { u64::MAX << from };
        let cared = entries.iter().fold(0u64, |m, (c, _)| m | c.mask) & above;
        if cared == 0 {
            let payloads: Vec<P> = entries.iter().map(|e| e.1).collect();
            let v = leaf_of(&payloads);
            return self.mk(Node::Leaf(v));
        }
        let var = cared.trailing_zeros();
        let bit = 1u64 << var;
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for &(c, p) in &entries {
            if c.mask & bit == 0 {
                lo.push((c, p));
                hi.push((c, p));
            } else if c.value & bit == 0 {
                lo.push((c, p));
            } else {
                hi.push((c, p));
            }
        }
        let l = self.split(lo, var + 1, leaf_of);
        let h = self.split(hi, var + 1, leaf_of);
        self.mk(Node::Branch { var: var as u8, lo: l, hi: h })
    }

    /// Disjoint cubes covering the symbol space with their leaf values,
    /// in depth-first order with the 0-branch first. `NO_LEAF` regions are
    /// omitted.
    pub fn paths(&self, root: u32) -> Vec<(Cube, u32)> {
        let mut out = Vec::new();
        self.walk(root, Cube::FULL, &mut out);
        out
    }

    fn walk(&self, id: u32, acc: Cube, out: &mut Vec<(Cube, u32)>) {
        match self.nodes[id as usize] {
            Node::Leaf(v) => {
                if v != NO_LEAF {
                    out.push((acc, v));
                }
            }
            Node::Branch { var, lo, hi } => {
                self.walk(lo, acc.with(var as usize, false), out);
                self.walk(hi, acc.with(var as usize, true), out);
            }
        }
    }
}
