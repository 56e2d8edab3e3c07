//! Genome encoding and synchronous network dynamics.
//!
//! A genome holds `R` node genes. Nodes `0..N` receive the environmental input
//! (their states are clamped to it every cycle), nodes `N..2N` are the partner
//! ports used when two cells are coupled, and nodes `R-N..R` are the trait
//! nodes whose states are scored on a landscape.
//!
//! Truth tables are stored as bitmasks: bit `p` of `function_table` is the
//! next state for input pattern `p`, where the pattern is read from the
//! connections most-significant-first (`inputs[0]` is the high bit). The
//! methylation table `epi_table` uses the same convention over `epi_inputs`;
//! a set bit means "methylate".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported connectivity; tables are held in a `u32`.
pub const MAX_CONNECTIVITY: usize = 5;

/// One node's heritable genes.
///
/// `epi_inputs` and `epi_table` are always present, even when `epi_flag` is
/// clear, so that switching a node back into epigenetic control restores its
/// previous control genes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeGene {
    pub start_state: bool,
    pub function_table: u32,
    pub inputs: Vec<usize>,
    pub epi_flag: bool,
    pub epi_inputs: Vec<usize>,
    pub epi_table: u32,
}

#[inline]
fn pattern(conns: &[usize], states: &[bool]) -> u32 {
    conns.iter().fold(0, |p, &j| (p << 1) | states[j] as u32)
}

#[inline]
fn lookup(table: u32, pattern: u32) -> bool {
    (table >> pattern) & 1 == 1
}

impl NodeGene {
    /// Next state this node's Boolean function gives for the (local) state vector.
    pub fn output(&self, states: &[bool]) -> bool {
        lookup(self.function_table, pattern(&self.inputs, states))
    }

    /// Whether the control table fires for the current state vector.
    pub fn methylation_signal(&self, states: &[bool]) -> bool {
        lookup(self.epi_table, pattern(&self.epi_inputs, states))
    }
}

/// A complete heritable network encoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Genome {
    nodes: Vec<NodeGene>,
    n_traits: usize,
    dev_steps: u32,
}

fn table_mask(arity: usize) -> u32 {
    if arity >= 5 {
        u32::MAX
    } else {
        (1u32 << (1 << arity)) - 1
    }
}

fn check_conns(what: &str, i: usize, conns: &[usize], r: usize) -> Result<()> {
    if conns.len() > MAX_CONNECTIVITY {
        return Err(Error::InvalidGenome(format!(
            "node {i} has {} {what}, at most {MAX_CONNECTIVITY} supported",
            conns.len()
        )));
    }
    for (a, &j) in conns.iter().enumerate() {
        if j >= r || j == i || conns[..a].contains(&j) {
            return Err(Error::InvalidGenome(format!(
                "node {i} {what} {conns:?} must be distinct, non-self and below R={r}"
            )));
        }
    }
    Ok(())
}

impl Genome {
    pub fn new(nodes: Vec<NodeGene>, n_traits: usize, dev_steps: u32) -> Result<Self> {
        let g = Self { nodes, n_traits, dev_steps };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.nodes.len();
        if r < 3 * self.n_traits || r == 0 {
            return Err(Error::InvalidGenome(format!(
                "R={r} nodes cannot host disjoint input, port and trait sets for N={}",
                self.n_traits
            )));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            check_conns("inputs", i, &node.inputs, r)?;
            check_conns("epigenetic inputs", i, &node.epi_inputs, r)?;
            if node.function_table & !table_mask(node.inputs.len()) != 0
                || node.epi_table & !table_mask(node.epi_inputs.len()) != 0
            {
                return Err(Error::InvalidGenome(format!("node {i} table has bits beyond its arity")));
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[NodeGene] {
        &self.nodes
    }

    pub(crate) fn nodes_mut(&mut self) -> &mut [NodeGene] {
        &mut self.nodes
    }

    /// `R`
    pub fn r_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// `N`
    pub fn n_traits(&self) -> usize {
        self.n_traits
    }

    /// `N'`, always equal to `N`.
    pub fn n_inputs(&self) -> usize {
        self.n_traits
    }

    /// Unscored development cycles run before fitness is measured.
    pub fn dev_steps(&self) -> u32 {
        self.dev_steps
    }

    pub(crate) fn set_dev_steps(&mut self, d: u32) {
        self.dev_steps = d;
    }

    pub fn input_ids(&self) -> std::ops::Range<usize> {
        0..self.n_traits
    }

    pub fn partner_port_ids(&self) -> std::ops::Range<usize> {
        self.n_traits..2 * self.n_traits
    }

    pub fn trait_ids(&self) -> std::ops::Range<usize> {
        self.nodes.len() - self.n_traits..self.nodes.len()
    }

    pub fn epi_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.epi_flag).count()
    }

    pub fn epi_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].epi_flag).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("genome serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: Self = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }
}

/// Phenotype of a running cell: node states plus methylation marks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellState {
    pub states: Vec<bool>,
    pub methylated: Vec<bool>,
}

impl CellState {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `methylated[i]` implies `!states[i]`.
    pub fn is_consistent(&self) -> bool {
        self.states.iter().zip(&self.methylated).all(|(&s, &m)| !(m && s))
    }
}

/// Initial phenotype for a genome, optionally inheriting marks (and states)
/// from a parent's final state.
pub fn init_state(g: &Genome, inherited: Option<&CellState>, reset_states: bool) -> Result<CellState> {
    let r = g.r_nodes();
    let start: Vec<bool> = g.nodes.iter().map(|n| n.start_state).collect();
    let Some(parent) = inherited else {
        return Ok(CellState { states: start, methylated: vec![false; r] });
    };
    if parent.states.len() != r || parent.methylated.len() != r {
        return Err(Error::Parameter(format!("inherited state has {} nodes, genome has R={r}", parent.states.len())));
    }
    let methylated: Vec<bool> = g.nodes.iter().zip(&parent.methylated).map(|(n, &m)| m && n.epi_flag).collect();
    let base = if reset_states { &start } else { &parent.states };
    let states = base.iter().zip(&methylated).map(|(&s, &m)| s && !m).collect();
    Ok(CellState { states, methylated })
}

/// One synchronous update. All reads come from `s`, all writes go to `out`.
/// `partner_traits`, when given, replaces connection slot 0 of every
/// partner-port node.
pub(crate) fn step_into(
    g: &Genome,
    s: &CellState,
    input_bits: &[bool],
    partner_traits: Option<&[bool]>,
    out: &mut CellState,
) {
    let n = g.n_traits;
    let states = &s.states;
    for (i, node) in g.nodes.iter().enumerate() {
        if i < n {
            out.states[i] = input_bits[i];
            out.methylated[i] = false;
            continue;
        }
        if node.epi_flag {
            let fire = node.methylation_signal(states);
            if fire || s.methylated[i] {
                out.methylated[i] = fire;
                out.states[i] = false;
                continue;
            }
        }
        out.methylated[i] = false;
        out.states[i] = match partner_traits {
            Some(partner) if i < 2 * n && !node.inputs.is_empty() => {
                let p = node.inputs[1..].iter().fold(partner[i - n] as u32, |p, &j| (p << 1) | states[j] as u32);
                lookup(node.function_table, p)
            }
            _ => node.output(states),
        };
    }
}

pub(crate) fn check_step_args(g: &Genome, s: &CellState, input_bits: &[bool], partner: Option<&[bool]>) -> Result<()> {
    let r = g.r_nodes();
    if s.states.len() != r || s.methylated.len() != r {
        return Err(Error::Parameter(format!("state has {} nodes, genome has R={r}", s.states.len())));
    }
    if input_bits.len() != g.n_inputs() {
        return Err(Error::Parameter(format!(
            "input has {} bits, genome expects N'={}",
            input_bits.len(),
            g.n_inputs()
        )));
    }
    if let Some(p) = partner {
        if p.len() != g.n_traits {
            return Err(Error::Parameter(format!(
                "partner traits have {} bits, genome expects N={}",
                p.len(),
                g.n_traits
            )));
        }
    }
    Ok(())
}

/// Advance a cell by one synchronous cycle.
///
/// Per node: input nodes copy `input_bits` and are never methylated;
/// epigenetic nodes that become or remain methylated, or that shed their
/// mark this cycle, are forced to 0; every other node applies its Boolean
/// function. Pass `partner_traits` only for coupled (multicell) cells.
pub fn step_cell(g: &Genome, s: &CellState, input_bits: &[bool], partner_traits: Option<&[bool]>) -> Result<CellState> {
    check_step_args(g, s, input_bits, partner_traits)?;
    let mut out = s.clone();
    step_into(g, s, input_bits, partner_traits, &mut out);
    Ok(out)
}

/// States of the trait nodes, in index order.
pub fn trait_bits(g: &Genome, s: &CellState) -> Vec<bool> {
    s.states[g.trait_ids()].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(inputs: Vec<usize>, table: u32) -> NodeGene {
        NodeGene {
            start_state: false,
            function_table: table,
            inputs,
            epi_flag: false,
            epi_inputs: vec![],
            epi_table: 0,
        }
    }

    /// The six-node network of the methylation walkthrough: N=2 inputs,
    /// node 2 is constantly on, node 3 is epigenetic over nodes {1, 2} and
    /// would switch on from the all-zero state.
    fn walkthrough() -> Genome {
        let mut nodes = vec![
            node(vec![1, 2], 0),
            node(vec![0, 2], 0),
            node(vec![0, 1], 0b1111),
            node(vec![0, 1], 0b0001),
            node(vec![0, 1], 0),
            node(vec![0, 1], 0),
        ];
        nodes[3].epi_flag = true;
        nodes[3].epi_inputs = vec![1, 2];
        // methylate only for pattern (node1, node2) = (0, 0)
        nodes[3].epi_table = 0b0001;
        Genome::new(nodes, 2, 0).unwrap()
    }

    #[test]
    fn methylation_blocks_activation_then_releases_late() {
        let g = walkthrough();
        let s0 = init_state(&g, None, true).unwrap();
        assert!(s0.states.iter().all(|&b| !b));
        assert!(g.nodes()[3].output(&s0.states), "unmethylated the node would switch on");
        let s1 = step_cell(&g, &s0, &[false, false], None).unwrap();
        assert!(!s1.states[3]);
        assert!(s1.methylated[3]);
        assert!(s1.states[2]);
        // pattern is now (0, 1): the table row is 0 so the mark is shed,
        // but the node stays off for this cycle
        let s2 = step_cell(&g, &s1, &[false, false], None).unwrap();
        assert!(!s2.methylated[3]);
        assert!(!s2.states[3]);
        // ...and the function takes over again on the following cycle
        let s3 = step_cell(&g, &s2, &[false, false], None).unwrap();
        assert!(s3.states[3]);
        assert!(!s3.methylated[3]);
    }

    #[test]
    fn persistent_signal_keeps_node_methylated() {
        let mut g = walkthrough();
        g.nodes_mut()[3].epi_table = 0b1111;
        let mut s = init_state(&g, None, true).unwrap();
        for _ in 0..5 {
            s = step_cell(&g, &s, &[false, false], None).unwrap();
            assert!(s.methylated[3] && !s.states[3]);
        }
    }

    #[test]
    fn identity_network_is_a_fixed_point() {
        // self-loops are not allowed, so nodes copy a partner with the same start state
        let nodes: Vec<_> =
            (0..6).map(|i| NodeGene { start_state: (i / 2) % 2 == 0, ..node(vec![i ^ 1], 0b10) }).collect();
        let g = Genome::new(nodes, 0, 0).unwrap();
        let s = init_state(&g, None, true).unwrap();
        assert_eq!(step_cell(&g, &s, &[], None).unwrap(), s);
    }

    #[test]
    fn inputs_are_clamped() {
        let g = walkthrough();
        let s = init_state(&g, None, true).unwrap();
        let s1 = step_cell(&g, &s, &[true, false], None).unwrap();
        assert_eq!(&s1.states[..2], &[true, false]);
    }

    #[test]
    fn partner_replaces_slot_zero_of_ports() {
        // N=1: node 0 input, node 1 partner port copying slot 0, node 2 trait.
        let nodes = vec![node(vec![2], 0), node(vec![0], 0b10), node(vec![1], 0b10)];
        let g = Genome::new(nodes, 1, 0).unwrap();
        let s = init_state(&g, None, true).unwrap();
        let local = step_cell(&g, &s, &[false], None).unwrap();
        assert!(!local.states[1]);
        let coupled = step_cell(&g, &s, &[false], Some(&[true])).unwrap();
        assert!(coupled.states[1]);
    }

    #[test]
    fn inheritance_rules() {
        let mut g = walkthrough();
        for n in g.nodes_mut() {
            n.start_state = true;
        }
        let mut parent = CellState { states: vec![false; 6], methylated: vec![false; 6] };
        parent.methylated[3] = true;
        parent.methylated[4] = true; // node 4 is not epigenetic
        let s = init_state(&g, Some(&parent), true).unwrap();
        assert_eq!(s.states, vec![true, true, true, false, true, true]);
        assert!(s.methylated[3]);
        assert!(!s.methylated[4]);
        let kept = init_state(&g, Some(&parent), false).unwrap();
        assert_eq!(kept.states, vec![false; 6]);
        assert!(init_state(&g, Some(&CellState { states: vec![false; 5], methylated: vec![false; 5] }), true).is_err());
    }

    #[test]
    fn trait_bits_read_last_nodes() {
        let g = walkthrough();
        let mut s = init_state(&g, None, true).unwrap();
        assert_eq!(trait_bits(&g, &s), vec![false, false]);
        s.states[5] = true;
        assert_eq!(trait_bits(&g, &s), vec![false, true]);
    }

    #[test]
    fn genome_validation() {
        assert!(Genome::new(vec![node(vec![0], 0b10), node(vec![0], 0b10)], 0, 0).is_err());
        assert!(Genome::new(vec![node(vec![1, 1], 0), node(vec![0], 0)], 0, 0).is_err());
        assert!(Genome::new(vec![node(vec![1], 0b100), node(vec![0], 0)], 0, 0).is_err());
        assert!(Genome::new(vec![node(vec![1], 0), node(vec![0], 0)], 1, 0).is_err());
        let g = walkthrough();
        assert_eq!(Genome::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn step_argument_checks() {
        let g = walkthrough();
        let s = init_state(&g, None, true).unwrap();
        assert!(step_cell(&g, &s, &[false], None).is_err());
        assert!(step_cell(&g, &s, &[false, false], Some(&[true])).is_err());
    }
}
