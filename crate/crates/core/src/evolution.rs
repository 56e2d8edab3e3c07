//! Random genomes, single-point mutation and the 1+1 hill-climber.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::network::{CellState, Genome, NodeGene, MAX_CONNECTIVITY};
use crate::scenarios::{evaluate_untraced, Landscapes, Order, ScenarioConfig, ScenarioKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub r_nodes: usize,
    pub n_traits: usize,
    pub b_connectivity: usize,
    pub generations: usize,
    pub development_enabled: bool,
    pub heritable_epigenetics: bool,
    pub reset_states: bool,
    /// When false, random genomes carry no epigenetic nodes and the three
    /// epigenetic mutation classes are never drawn (the classical RBN control).
    pub epigenetics_enabled: bool,
    /// Probability that a node of a fresh random genome is epigenetic.
    pub initial_epi_fraction: f64,
    pub seed: u64,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        Self {
            r_nodes: 100,
            n_traits: 10,
            b_connectivity: 2,
            generations: 30_000,
            development_enabled: false,
            heritable_epigenetics: false,
            reset_states: true,
            epigenetics_enabled: true,
            initial_epi_fraction: 0.0,
            seed: 0,
        }
    }
}

impl EvolutionParams {
    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_CONNECTIVITY).contains(&self.b_connectivity) {
            return param(format!("B={} outside supported range 1..=5", self.b_connectivity));
        }
        if self.generations == 0 {
            return param("generations must be at least 1");
        }
        if self.r_nodes < 3 * self.n_traits {
            return param(format!("R={} must be at least 3N={}", self.r_nodes, 3 * self.n_traits));
        }
        if self.r_nodes <= self.b_connectivity {
            return param(format!("R={} cannot supply B={} distinct inputs", self.r_nodes, self.b_connectivity));
        }
        if !(0.0..=1.0).contains(&self.initial_epi_fraction) {
            return param("initial_epi_fraction must lie in [0, 1]");
        }
        Ok(())
    }
}

fn sample_inputs(rng: &mut impl Rng, r: usize, b: usize, own: usize) -> Vec<usize> {
    index::sample(rng, r - 1, b).into_iter().map(|j| if j >= own { j + 1 } else { j }).collect()
}

fn random_table(rng: &mut impl Rng, arity: usize) -> u32 {
    let entries = 1u32 << arity;
    (0..entries).fold(0, |t, bit| t | ((rng.gen::<bool>() as u32) << bit))
}

/// A genome with every gene uniform random and `D = 0`.
pub fn random_genome(rng: &mut impl Rng, params: &EvolutionParams) -> Result<Genome> {
    params.validate()?;
    let (r, b) = (params.r_nodes, params.b_connectivity);
    let nodes = (0..r)
        .map(|i| {
            let start_state = rng.gen::<bool>();
            let function_table = random_table(rng, b);
            let inputs = sample_inputs(rng, r, b, i);
            let flag = rng.gen_bool(params.initial_epi_fraction);
            let epi_inputs = sample_inputs(rng, r, b, i);
            let epi_table = random_table(rng, b);
            NodeGene {
                start_state,
                function_table,
                inputs,
                epi_flag: flag && params.epigenetics_enabled,
                epi_inputs,
                epi_table,
            }
        })
        .collect();
    Genome::new(nodes, params.n_traits, 0)
}

/// The mutation classes, in the order they are enumerated for drawing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationKind {
    FunctionBit,
    Connection,
    StartState,
    EpiFlag,
    EpiTableBit,
    EpiConnection,
    DevSteps,
}

fn applicable_kinds(g: &Genome, params: &EvolutionParams) -> Vec<MutationKind> {
    use MutationKind::*;
    let r = g.r_nodes();
    let can_rewire = |arity: usize| arity > 0 && r - 1 > arity;
    let mut kinds = vec![FunctionBit];
    if g.nodes().iter().any(|n| can_rewire(n.inputs.len())) {
        kinds.push(Connection);
    }
    kinds.push(StartState);
    if params.epigenetics_enabled {
        kinds.push(EpiFlag);
        let epi: Vec<&NodeGene> = g.nodes().iter().filter(|n| n.epi_flag).collect();
        if !epi.is_empty() {
            kinds.push(EpiTableBit);
            if epi.iter().any(|n| can_rewire(n.epi_inputs.len())) {
                kinds.push(EpiConnection);
            }
        }
    }
    if params.development_enabled {
        kinds.push(DevSteps);
    }
    kinds
}

/// Replace one entry of `conns` with a node that is neither `own` nor
/// already connected. Returns false when no such node exists.
fn rewire(rng: &mut impl Rng, conns: &mut [usize], own: usize, r: usize) -> bool {
    let free: Vec<usize> = (0..r).filter(|j| *j != own && !conns.contains(j)).collect();
    if conns.is_empty() || free.is_empty() {
        return false;
    }
    let slot = rng.gen_range(0..conns.len());
    conns[slot] = free[rng.gen_range(0..free.len())];
    true
}

/// Copy `g` with exactly one mutation, drawn uniformly among the classes that
/// apply to it.
pub fn mutate(rng: &mut impl Rng, g: &Genome, params: &EvolutionParams) -> Genome {
    mutate_with_kind(rng, g, params).0
}

pub fn mutate_with_kind(rng: &mut impl Rng, g: &Genome, params: &EvolutionParams) -> (Genome, MutationKind) {
    let kinds = applicable_kinds(g, params);
    let kind = kinds[rng.gen_range(0..kinds.len())];
    let mut child = g.clone();
    let r = child.r_nodes();
    match kind {
        MutationKind::FunctionBit => {
            let i = rng.gen_range(0..r);
            let node = &mut child.nodes_mut()[i];
            let bit = rng.gen_range(0..1u32 << node.inputs.len());
            node.function_table ^= 1 << bit;
        }
        MutationKind::Connection => {
            let candidates: Vec<usize> =
                (0..r).filter(|&i| !g.nodes()[i].inputs.is_empty() && r - 1 > g.nodes()[i].inputs.len()).collect();
            let i = candidates[rng.gen_range(0..candidates.len())];
            rewire(rng, &mut child.nodes_mut()[i].inputs, i, r);
        }
        MutationKind::StartState => {
            let i = rng.gen_range(0..r);
            child.nodes_mut()[i].start_state ^= true;
        }
        MutationKind::EpiFlag => {
            let i = rng.gen_range(0..r);
            child.nodes_mut()[i].epi_flag ^= true;
        }
        MutationKind::EpiTableBit => {
            let epi = g.epi_nodes();
            let i = epi[rng.gen_range(0..epi.len())];
            let node = &mut child.nodes_mut()[i];
            let bit = rng.gen_range(0..1u32 << node.epi_inputs.len());
            node.epi_table ^= 1 << bit;
        }
        MutationKind::EpiConnection => {
            let epi: Vec<usize> = g
                .epi_nodes()
                .into_iter()
                .filter(|&i| !g.nodes()[i].epi_inputs.is_empty() && r - 1 > g.nodes()[i].epi_inputs.len())
                .collect();
            let i = epi[rng.gen_range(0..epi.len())];
            rewire(rng, &mut child.nodes_mut()[i].epi_inputs, i, r);
        }
        MutationKind::DevSteps => {
            let d = child.dev_steps();
            let d = if rng.gen::<bool>() { d + 1 } else { d.saturating_sub(1) };
            child.set_dev_steps(d);
        }
    }
    (child, kind)
}

/// What replacement compares: fitness, then epigenetic node count, then `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub fitness: f64,
    pub epi_count: usize,
    pub dev_steps: u32,
}

impl Candidate {
    pub fn of(g: &Genome, fitness: f64) -> Self {
        Self { fitness, epi_count: g.epi_count(), dev_steps: g.dev_steps() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    KeepParent,
    Replace,
}

/// Replacement rule. Higher fitness wins outright; on an exact tie fewer
/// epigenetic nodes wins, then smaller `D`, then a fair coin. `D` is always
/// zero without development, so that tier only matters when it is enabled.
pub fn prefer(parent: Candidate, child: Candidate, rng: &mut impl Rng) -> Preference {
    use std::cmp::Ordering::*;
    let by_fitness = child.fitness.partial_cmp(&parent.fitness).unwrap_or(Less);
    let decided = match by_fitness {
        Greater => Some(true),
        Less => Some(false),
        Equal => match child.epi_count.cmp(&parent.epi_count) {
            Less => Some(true),
            Greater => Some(false),
            Equal => match child.dev_steps.cmp(&parent.dev_steps) {
                Less => Some(true),
                Greater => Some(false),
                Equal => None,
            },
        },
    };
    match decided.unwrap_or_else(|| rng.gen::<bool>()) {
        true => Preference::Replace,
        false => Preference::KeepParent,
    }
}

/// Per-generation history of one hill-climbing run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub fitness: Vec<f64>,
    pub epi_nodes: Vec<usize>,
    pub dev_steps: Vec<u32>,
    pub final_genome: Genome,
    /// Final cell state(s) of the surviving parent, kept in heritable mode.
    pub final_states: Option<Vec<CellState>>,
}

impl RunRecord {
    pub fn generations(&self) -> usize {
        self.fitness.len()
    }

    pub fn final_fitness(&self) -> f64 {
        *self.fitness.last().expect("at least one generation")
    }

    pub fn final_epi_nodes(&self) -> usize {
        *self.epi_nodes.last().expect("at least one generation")
    }

    pub fn final_dev_steps(&self) -> u32 {
        *self.dev_steps.last().expect("at least one generation")
    }
}

fn check_agreement(params: &EvolutionParams, cfg: &ScenarioConfig, lands: &Landscapes) -> Result<()> {
    params.validate()?;
    cfg.validate()?;
    if params.n_traits != cfg.n_traits {
        return param(format!("evolution N={} but scenario N={}", params.n_traits, cfg.n_traits));
    }
    if params.development_enabled != cfg.development_enabled {
        return param("development flag differs between evolution and scenario settings");
    }
    if params.heritable_epigenetics != cfg.heritable || params.reset_states != cfg.reset_states {
        return param("heritability settings differ between evolution and scenario settings");
    }
    lands.check_for(cfg)
}

/// Evolve one random genome for `params.generations` generations.
///
/// In heritable mode each child starts from the surviving parent's final
/// state(s). Under switching, a child always lives the reverse of its
/// parent's life, so the phase order flips whenever a child is accepted.
pub fn run_hill_climber(
    params: &EvolutionParams,
    cfg: &ScenarioConfig,
    lands: &Landscapes,
    rng: &mut impl Rng,
) -> Result<RunRecord> {
    check_agreement(params, cfg, lands)?;
    let mut parent = random_genome(rng, params)?;
    let mut order = Order::AFirst;
    let mut parent_eval = evaluate_untraced(&parent, cfg, lands, None, order)?;

    let mut fitness = Vec::with_capacity(params.generations);
    let mut epi_nodes = Vec::with_capacity(params.generations);
    let mut dev_steps = Vec::with_capacity(params.generations);
    for _ in 0..params.generations {
        let child = mutate(rng, &parent, params);
        let child_order = match cfg.kind {
            ScenarioKind::Switching => order.flip(),
            _ => order,
        };
        let inherited = cfg.heritable.then_some(parent_eval.finals.as_slice());
        let child_eval = evaluate_untraced(&child, cfg, lands, inherited, child_order)?;
        let verdict =
            prefer(Candidate::of(&parent, parent_eval.fitness), Candidate::of(&child, child_eval.fitness), rng);
        if verdict == Preference::Replace {
            parent = child;
            parent_eval = child_eval;
            order = child_order;
        }
        fitness.push(parent_eval.fitness);
        epi_nodes.push(parent.epi_count());
        dev_steps.push(parent.dev_steps());
    }
    Ok(RunRecord {
        fitness,
        epi_nodes,
        dev_steps,
        final_genome: parent,
        final_states: cfg.heritable.then_some(parent_eval.finals),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    use crate::SimRng;

    fn params(b: usize) -> EvolutionParams {
        EvolutionParams { b_connectivity: b, initial_epi_fraction: 0.5, ..Default::default() }
    }

    /// Number of differing gene elements: table bits, connection slots,
    /// start states, flags, and |delta D|.
    pub(crate) fn gene_distance(a: &Genome, b: &Genome) -> usize {
        let nodes: usize = a
            .nodes()
            .iter()
            .zip(b.nodes())
            .map(|(x, y)| {
                (x.function_table ^ y.function_table).count_ones() as usize
                    + (x.epi_table ^ y.epi_table).count_ones() as usize
                    + x.inputs.iter().zip(&y.inputs).filter(|(p, q)| p != q).count()
                    + x.epi_inputs.iter().zip(&y.epi_inputs).filter(|(p, q)| p != q).count()
                    + (x.start_state != y.start_state) as usize
                    + (x.epi_flag != y.epi_flag) as usize
            })
            .sum();
        nodes + a.dev_steps().abs_diff(b.dev_steps()) as usize
    }

    #[test]
    fn random_genome_shape() {
        let mut rng = SimRng::seed_from_u64(5);
        for b in 1..=5 {
            let g = random_genome(&mut rng, &params(b)).unwrap();
            assert_eq!(g.dev_steps(), 0);
            assert_eq!(g.r_nodes(), 100);
            for (i, n) in g.nodes().iter().enumerate() {
                assert_eq!(n.inputs.len(), b);
                assert_eq!(n.epi_inputs.len(), b);
                assert!(!n.inputs.contains(&i));
            }
        }
        let a = random_genome(&mut SimRng::seed_from_u64(9), &params(3)).unwrap();
        let b = random_genome(&mut SimRng::seed_from_u64(9), &params(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn epigenetics_off_means_no_epi_nodes() {
        let p = EvolutionParams { epigenetics_enabled: false, ..params(4) };
        let mut rng = SimRng::seed_from_u64(2);
        let mut g = random_genome(&mut rng, &p).unwrap();
        assert_eq!(g.epi_count(), 0);
        for _ in 0..2000 {
            let (child, kind) = mutate_with_kind(&mut rng, &g, &p);
            assert!(matches!(kind, MutationKind::FunctionBit | MutationKind::Connection | MutationKind::StartState));
            g = child;
        }
        assert_eq!(g.epi_count(), 0);
    }

    #[test]
    fn mutation_is_single_point() {
        let p = EvolutionParams { development_enabled: true, ..params(3) };
        let mut rng = SimRng::seed_from_u64(77);
        let mut g = random_genome(&mut rng, &p).unwrap();
        for _ in 0..5000 {
            let (child, kind) = mutate_with_kind(&mut rng, &g, &p);
            let d = gene_distance(&g, &child);
            if kind == MutationKind::DevSteps && g.dev_steps() == 0 && child.dev_steps() == 0 {
                assert_eq!(d, 0);
            } else {
                assert_eq!(d, 1, "{kind:?}");
            }
            child.validate().unwrap();
            g = child;
        }
    }

    #[test]
    fn no_epigenetic_nodes_means_no_epi_table_mutations() {
        let p = params(2);
        let mut rng = SimRng::seed_from_u64(3);
        let mut g = random_genome(&mut rng, &EvolutionParams { initial_epi_fraction: 0.0, ..p.clone() }).unwrap();
        assert_eq!(g.epi_count(), 0);
        let mut seen_flag = false;
        for _ in 0..3000 {
            let kind = mutate_with_kind(&mut rng, &g, &p).1;
            assert!(!matches!(kind, MutationKind::EpiTableBit | MutationKind::EpiConnection));
            seen_flag |= kind == MutationKind::EpiFlag;
        }
        assert!(seen_flag);
        // once a node is epigenetic the epigenetic classes become available
        g.nodes_mut()[50].epi_flag = true;
        let kinds = applicable_kinds(&g, &p);
        assert!(kinds.contains(&MutationKind::EpiTableBit) && kinds.contains(&MutationKind::EpiConnection));
    }

    #[test]
    fn dev_steps_floor_at_zero() {
        let p = EvolutionParams { development_enabled: true, ..params(2) };
        let mut rng = SimRng::seed_from_u64(4);
        let g = random_genome(&mut rng, &p).unwrap();
        let mut saw_floor = false;
        for _ in 0..500 {
            let (child, kind) = mutate_with_kind(&mut rng, &g, &p);
            if kind == MutationKind::DevSteps {
                assert!(child.dev_steps() <= 1);
                saw_floor |= child.dev_steps() == 0;
            }
        }
        assert!(saw_floor);
    }

    #[test]
    fn all_classes_drawn_uniformly() {
        let p = EvolutionParams { development_enabled: true, ..params(2) };
        let mut rng = SimRng::seed_from_u64(8);
        let g = random_genome(&mut rng, &p).unwrap();
        let mut counts = std::collections::HashMap::new();
        let draws = 70_000;
        for _ in 0..draws {
            *counts.entry(mutate_with_kind(&mut rng, &g, &p).1).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 7);
        for c in counts.values() {
            assert!((*c as f64 - draws as f64 / 7.0).abs() < 500.0, "{counts:?}");
        }
    }

    fn cand(fitness: f64, epi_count: usize, dev_steps: u32) -> Candidate {
        Candidate { fitness, epi_count, dev_steps }
    }

    #[test]
    fn preference_tiers() {
        let mut rng = SimRng::seed_from_u64(1);
        assert_eq!(prefer(cand(0.50, 5, 0), cand(0.51, 90, 9), &mut rng), Preference::Replace);
        assert_eq!(prefer(cand(0.50, 5, 0), cand(0.49, 0, 0), &mut rng), Preference::KeepParent);
        assert_eq!(prefer(cand(0.50, 5, 0), cand(0.50, 4, 0), &mut rng), Preference::Replace);
        assert_eq!(prefer(cand(0.50, 5, 0), cand(0.50, 6, 0), &mut rng), Preference::KeepParent);
        assert_eq!(prefer(cand(0.50, 5, 3), cand(0.50, 5, 2), &mut rng), Preference::Replace);
        assert_eq!(prefer(cand(0.50, 5, 2), cand(0.50, 5, 3), &mut rng), Preference::KeepParent);
        let replaced =
            (0..10_000).filter(|_| prefer(cand(0.5, 5, 2), cand(0.5, 5, 2), &mut rng) == Preference::Replace).count();
        assert!((4_700..5_300).contains(&replaced));
    }

    #[test]
    fn bad_params_rejected() {
        assert!(params(0).validate().is_err());
        assert!(params(6).validate().is_err());
        assert!(EvolutionParams { generations: 0, ..params(2) }.validate().is_err());
        assert!(EvolutionParams { r_nodes: 29, ..params(2) }.validate().is_err());
    }

    proptest::proptest! {
        #[test]
        fn prefer_never_accepts_worse(pf in 0.0f64..1.0, cf in 0.0f64..1.0, pe in 0usize..100, ce in 0usize..100, seed: u64) {
            let mut rng = SimRng::seed_from_u64(seed);
            let verdict = prefer(cand(pf, pe, 0), cand(cf, ce, 0), &mut rng);
            if cf < pf {
                proptest::prop_assert_eq!(verdict, Preference::KeepParent);
            }
            if cf > pf {
                proptest::prop_assert_eq!(verdict, Preference::Replace);
            }
        }
    }
}
