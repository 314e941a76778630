//! The semi-chaotic genetic engine and the four channel-assignment algorithms.
//!
//! A run starts from either a semi-chaotic population (the heuristic primary
//! chromosome plus copies whose weak genes are redrawn at random) or a fully
//! random one. Each generation keeps the best individual, selects parents
//! whose fitness is at least one standard deviation above the population
//! mean, and breeds the rest of the next generation by per-gene crossover
//! (each gene comes from the parent whose link is fairer) followed by random
//! redraws of weak genes.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{draw_feasible, mclr_assign, repair, ChannelAssignment, OverlapMatrix};
use crate::error::{Error, Result};
use crate::fitness::{fairness_fitness, FitnessReport, RadioModel};
use crate::ranking::{rank_links, score_nodes_weighted, CriterionWeights};
use crate::rng::{child_rng, Rng};
use crate::topology::{ConflictGraph, Topology};

const STREAM_INIT: u64 = 1;
const STREAM_BREED: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitnessKind {
    /// Maximise Jain's index over per-link fairness.
    Fairness,
    /// Maximise the negated total interference.
    Interference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    SemiChaotic,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "FA_SCGA")]
    FaScga,
    #[serde(rename = "SCGA")]
    Scga,
    #[serde(rename = "IA_GA")]
    IaGa,
    #[serde(rename = "MCLR")]
    Mclr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::FaScga,
        Algorithm::Scga,
        Algorithm::IaGa,
        Algorithm::Mclr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::FaScga => "FA_SCGA",
            Algorithm::Scga => "SCGA",
            Algorithm::IaGa => "IA_GA",
            Algorithm::Mclr => "MCLR",
        }
    }

    /// The GA configuration this algorithm runs with; `None` for the
    /// heuristic, which has no evolutionary loop.
    pub fn configure(self, base: &GaConfig) -> Option<GaConfig> {
        let (init_kind, fitness_kind) = match self {
            Algorithm::FaScga => (InitKind::SemiChaotic, FitnessKind::Fairness),
            Algorithm::Scga => (InitKind::SemiChaotic, FitnessKind::Interference),
            Algorithm::IaGa => (InitKind::Random, FitnessKind::Interference),
            Algorithm::Mclr => return None,
        };
        Some(GaConfig {
            init_kind,
            fitness_kind,
            ..base.clone()
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_uppercase())
            .collect();
        match key.trim_end_matches("CAA") {
            "FASCGA" => Ok(Algorithm::FaScga),
            "SCGA" => Ok(Algorithm::Scga),
            "IAGA" => Ok(Algorithm::IaGa),
            "MCLR" => Ok(Algorithm::Mclr),
            _ => Err(Error::InvalidConfig(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    /// Probability that a weak gene is redrawn during mutation.
    pub mutation_prob: f64,
    /// Fairness-fitness runs stop once the best individual reaches this.
    pub target_fairness: f64,
    /// Generations without improvement before the run stops.
    pub stall_window: usize,
    /// Genes whose link fairness is at least this are kept by mutation.
    pub strong_gene_threshold: f64,
    pub fitness_kind: FitnessKind,
    pub init_kind: InitKind,
    /// Interference ceiling for the heuristic; `None` uses each link's
    /// conflict degree.
    pub mclr_threshold: Option<f64>,
    pub weights: CriterionWeights,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 40,
            max_iterations: 200,
            mutation_prob: 0.2,
            target_fairness: 0.99,
            stall_window: 20,
            strong_gene_threshold: 1.0,
            fitness_kind: FitnessKind::Fairness,
            init_kind: InitKind::SemiChaotic,
            mclr_threshold: None,
            weights: CriterionWeights::default(),
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if self.population_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "population_size must be at least 2, got {}",
                self.population_size
            )));
        }
        if !unit(self.mutation_prob)
            || !unit(self.target_fairness)
            || !unit(self.strong_gene_threshold)
        {
            return Err(Error::InvalidConfig(
                "mutation_prob, target_fairness and strong_gene_threshold must lie in [0, 1]"
                    .into(),
            ));
        }
        if self.stall_window == 0 {
            return Err(Error::InvalidConfig(
                "stall_window must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// The immutable problem instance shared by every individual.
#[derive(Debug, Clone, Copy)]
pub struct Instance<'a> {
    pub topology: &'a Topology,
    pub conflicts: &'a ConflictGraph,
    pub overlap: &'a OverlapMatrix,
    pub radio: &'a RadioModel,
}

impl<'a> Instance<'a> {
    pub fn new(
        topology: &'a Topology,
        conflicts: &'a ConflictGraph,
        overlap: &'a OverlapMatrix,
        radio: &'a RadioModel,
    ) -> Self {
        Instance {
            topology,
            conflicts,
            overlap,
            radio,
        }
    }

    pub fn channels(&self) -> usize {
        self.overlap.channel_count()
    }

    pub fn evaluate(&self, assignment: ChannelAssignment, kind: FitnessKind) -> Result<Individual> {
        let report = fairness_fitness(
            &assignment,
            self.topology,
            self.conflicts,
            self.overlap,
            self.radio,
        )?;
        let fitness = fitness_value(&report, kind);
        Ok(Individual {
            assignment,
            report,
            fitness,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub assignment: ChannelAssignment,
    pub report: FitnessReport,
    pub fitness: f64,
}

pub fn fitness_value(report: &FitnessReport, kind: FitnessKind) -> f64 {
    match kind {
        FitnessKind::Fairness => report.fairness_index,
        FitnessKind::Interference => -report.total_interference,
    }
}

/// The heuristic assignment that seeds the semi-chaotic population.
pub fn primary_chromosome(instance: &Instance, cfg: &GaConfig) -> Result<ChannelAssignment> {
    let scores = score_nodes_weighted(instance.topology, &cfg.weights)?;
    let ranks = rank_links(instance.topology, &scores);
    mclr_assign(
        instance.topology,
        instance.conflicts,
        &ranks,
        instance.overlap,
        instance.channels(),
        cfg.mclr_threshold,
    )
}

/// Individual 0 is `primary`; every other individual keeps the primary's
/// zero-interference genes and redraws the rest from their feasible channels.
pub fn init_population_semi_chaotic(
    instance: &Instance,
    primary: &ChannelAssignment,
    cfg: &GaConfig,
    seed: u64,
) -> Result<Vec<Individual>> {
    cfg.validate()?;
    primary.validate(instance.topology)?;
    let strong: Vec<bool> = (0..primary.len())
        .map(|l| primary.interference_index(l, instance.conflicts, instance.overlap) == 0.0)
        .collect();

    (0..cfg.population_size)
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                return instance.evaluate(primary.clone(), cfg.fitness_kind);
            }
            let mut rng = child_rng(seed, &[STREAM_INIT, k as u64]);
            let mut genes: Vec<Option<usize>> = primary
                .genes
                .iter()
                .zip(&strong)
                .map(|(&g, &s)| s.then_some(g))
                .collect();
            for link in 0..genes.len() {
                if !strong[link] {
                    genes[link] = Some(draw_feasible(
                        link,
                        &genes,
                        instance.topology,
                        instance.channels(),
                        &mut rng,
                    ));
                }
            }
            let assignment = ChannelAssignment::new(
                genes.into_iter().map(Option::unwrap).collect(),
                instance.channels(),
            );
            instance.evaluate(assignment, cfg.fitness_kind)
        })
        .collect()
}

/// Every gene drawn uniformly from its feasible channels, in link order.
pub fn init_population_random(
    instance: &Instance,
    cfg: &GaConfig,
    seed: u64,
) -> Result<Vec<Individual>> {
    cfg.validate()?;
    (0..cfg.population_size)
        .into_par_iter()
        .map(|k| {
            let mut rng = child_rng(seed, &[STREAM_INIT, k as u64]);
            let assignment = random_assignment(instance, &mut rng);
            instance.evaluate(assignment, cfg.fitness_kind)
        })
        .collect()
}

fn random_assignment(instance: &Instance, rng: &mut Rng) -> ChannelAssignment {
    let mut genes: Vec<Option<usize>> = vec![None; instance.topology.link_count()];
    for link in 0..genes.len() {
        genes[link] = Some(draw_feasible(
            link,
            &genes,
            instance.topology,
            instance.channels(),
            rng,
        ));
    }
    ChannelAssignment::new(
        genes.into_iter().map(Option::unwrap).collect(),
        instance.channels(),
    )
}

fn evaluate_all(
    instance: &Instance,
    assignments: Vec<ChannelAssignment>,
    kind: FitnessKind,
) -> Result<Vec<Individual>> {
    assignments
        .into_par_iter()
        .map(|a| instance.evaluate(a, kind))
        .collect()
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Indices of the selected parents: those with fitness at least one
/// (population) standard deviation above the mean. When fewer than two
/// qualify, the two fittest are returned, best first.
pub fn select_parents(population: &[Individual]) -> Vec<usize> {
    assert!(
        !population.is_empty(),
        "cannot select from an empty population"
    );
    let fitness: Vec<f64> = population.iter().map(|i| i.fitness).collect();
    if fitness.iter().all(|&f| f == fitness[0]) {
        return (0..fitness.len()).collect();
    }
    let (mean, std) = mean_and_std(&fitness);
    let cutoff = mean + std;
    let selected: Vec<usize> = (0..fitness.len())
        .filter(|&i| fitness[i] >= cutoff)
        .collect();
    if selected.len() >= 2 {
        return selected;
    }
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
    order.truncate(2);
    order
}

/// Per-gene crossover: each gene comes from the parent whose link fairness is
/// higher (ties favour `a`), then the radio budget is repaired.
pub fn crossover(a: &Individual, b: &Individual, instance: &Instance) -> ChannelAssignment {
    let genes = a
        .assignment
        .genes
        .iter()
        .zip(&b.assignment.genes)
        .zip(a.report.per_link.iter().zip(&b.report.per_link))
        .map(|((&ga, &gb), (fa, fb))| {
            if fb.link_fairness > fa.link_fairness {
                gb
            } else {
                ga
            }
        })
        .collect();
    let mut child = ChannelAssignment::new(genes, a.assignment.channel_count);
    repair(
        &mut child,
        instance.topology,
        instance.conflicts,
        instance.overlap,
    );
    child
}

/// Redraws each weak gene (link fairness below the strong threshold) with
/// probability `mutation_prob`, from the channels feasible given all other genes.
pub fn mutate(
    child: &ChannelAssignment,
    report: &FitnessReport,
    cfg: &GaConfig,
    instance: &Instance,
    rng: &mut Rng,
) -> ChannelAssignment {
    let mut genes: Vec<Option<usize>> = child.genes.iter().map(|&g| Some(g)).collect();
    for (link, lr) in report.per_link.iter().enumerate() {
        if lr.link_fairness >= cfg.strong_gene_threshold {
            continue;
        }
        if rng.gen_bool(cfg.mutation_prob) {
            genes[link] = None;
            genes[link] = Some(draw_feasible(
                link,
                &genes,
                instance.topology,
                child.channel_count,
                rng,
            ));
        }
    }
    let mut out = ChannelAssignment::new(
        genes.into_iter().map(Option::unwrap).collect(),
        child.channel_count,
    );
    repair(
        &mut out,
        instance.topology,
        instance.conflicts,
        instance.overlap,
    );
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub best: Individual,
    pub history: Vec<GenerationStats>,
    pub iterations: usize,
    /// Radio-constraint violations seen across every individual produced.
    pub radio_violations: usize,
}

pub fn history_csv(history: &[GenerationStats]) -> String {
    let mut out = String::from("generation,best,mean,sigma\n");
    for h in history {
        out.push_str(&format!(
            "{},{},{},{}\n",
            h.generation, h.best, h.mean, h.sigma
        ));
    }
    out
}

fn stats(generation: usize, population: &[Individual], best: f64) -> GenerationStats {
    let fitness: Vec<f64> = population.iter().map(|i| i.fitness).collect();
    let (mean, sigma) = mean_and_std(&fitness);
    GenerationStats {
        generation,
        best,
        mean,
        sigma,
    }
}

fn best_index(population: &[Individual]) -> usize {
    (0..population.len())
        .max_by(|&a, &b| {
            population[a]
                .fitness
                .total_cmp(&population[b].fitness)
                .then(b.cmp(&a))
        })
        .unwrap()
}

fn reached_target(best: &Individual, cfg: &GaConfig) -> bool {
    match cfg.fitness_kind {
        FitnessKind::Fairness => best.fitness >= cfg.target_fairness,
        FitnessKind::Interference => best.report.total_interference == 0.0,
    }
}

/// Runs the evolutionary loop with the init and fitness kinds given in `cfg`.
pub fn evolve(instance: &Instance, cfg: &GaConfig, seed: u64) -> Result<RunOutcome> {
    cfg.validate()?;
    let topology = instance.topology;
    let violations = |pop: &[Individual]| -> usize {
        pop.iter()
            .map(|i| i.assignment.radio_violations(topology).len())
            .sum()
    };

    let mut population = match cfg.init_kind {
        InitKind::SemiChaotic => {
            let primary = primary_chromosome(instance, cfg)?;
            init_population_semi_chaotic(instance, &primary, cfg, seed)?
        }
        InitKind::Random => init_population_random(instance, cfg, seed)?,
    };
    let mut radio_violations = violations(&population);
    let mut best = population[best_index(&population)].clone();
    let mut history = vec![stats(0, &population, best.fitness)];
    let mut iterations = 0;
    let mut stalled = 0;

    while !reached_target(&best, cfg)
        && iterations < cfg.max_iterations
        && stalled < cfg.stall_window
    {
        iterations += 1;
        let parents = select_parents(&population);
        let elite = population[best_index(&population)].clone();
        // Breeding is sequential; only evaluation fans out.
        let mut rngs: Vec<Rng> = (1..cfg.population_size)
            .map(|k| child_rng(seed, &[STREAM_BREED, iterations as u64, k as u64]))
            .collect();
        let crossed: Vec<ChannelAssignment> = rngs
            .iter_mut()
            .map(|rng| {
                let a = &population[parents[rng.gen_range(0..parents.len())]];
                let b = &population[parents[rng.gen_range(0..parents.len())]];
                crossover(a, b, instance)
            })
            .collect();
        let crossed = evaluate_all(instance, crossed, cfg.fitness_kind)?;
        let mutated: Vec<ChannelAssignment> = crossed
            .iter()
            .zip(&mut rngs)
            .map(|(c, rng)| mutate(&c.assignment, &c.report, cfg, instance, rng))
            .collect();
        let children = evaluate_all(instance, mutated, cfg.fitness_kind)?;

        population = std::iter::once(elite).chain(children).collect();
        radio_violations += violations(&population[1..]);
        let gen_best = &population[best_index(&population)];
        if gen_best.fitness > best.fitness {
            best = gen_best.clone();
            stalled = 0;
        } else {
            stalled += 1;
        }
        history.push(stats(iterations, &population, best.fitness));
    }

    Ok(RunOutcome {
        best,
        history,
        iterations,
        radio_violations,
    })
}

/// Runs one of the four algorithms. The heuristic returns its assignment
/// evaluated under fairness fitness, with zero iterations.
pub fn run(
    algorithm: Algorithm,
    instance: &Instance,
    cfg: &GaConfig,
    seed: u64,
) -> Result<RunOutcome> {
    match algorithm.configure(cfg) {
        Some(ga_cfg) => evolve(instance, &ga_cfg, seed),
        None => {
            let primary = primary_chromosome(instance, cfg)?;
            let radio_violations = primary.radio_violations(instance.topology).len();
            let best = instance.evaluate(primary, FitnessKind::Fairness)?;
            let history = vec![GenerationStats {
                generation: 0,
                best: best.fitness,
                mean: best.fitness,
                sigma: 0.0,
            }];
            Ok(RunOutcome {
                best,
                history,
                iterations: 0,
                radio_violations,
            })
        }
    }
}
