use std::collections::{BTreeMap, BTreeSet};

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Axis, Orientation};
use crate::model::{Layout, SpaceProgram};
use crate::solution::{Provenance, SolutionRecord};

use super::guided::{random_repair, repair_moves, Move};
use super::init::init_with_rng;
use super::penalty::{penalty_components, PenaltyComponents};
use super::transform::{
    apply_transformation, Operation, Target, TransformKind, Transformation, MAX_STEPS,
};
use super::EpsapError;

/// A scored layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub layout: Layout,
    pub fitness: f64,
    pub penalty_breakdown: PenaltyComponents,
    /// Cached [`Layout::content_hash`].
    pub hash: String,
}

impl Individual {
    fn rank_key(&self) -> (f64, &str) {
        (self.fitness, self.hash.as_str())
    }
}

/// Scores a layout: weighted sum of the seven indicators, lower is better.
pub fn evaluate(layout: &Layout, program: &SpaceProgram) -> Individual {
    let penalty_breakdown = penalty_components(layout, program);
    Individual {
        fitness: penalty_breakdown.weighted_sum(&program.objective_weights),
        penalty_breakdown,
        hash: layout.content_hash(),
        layout: layout.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EsParams {
    pub mu: usize,
    pub lambda: usize,
    pub max_generations_stage1: usize,
    pub max_steps_stage2: usize,
    pub seed: u64,
    /// Generations without improvement before stage one restarts from a fresh population,
    /// keeping the best individuals found so far. Zero disables restarts.
    pub restart_after: usize,
    pub transformation_probabilities: BTreeMap<TransformKind, f64>,
}

impl Default for EsParams {
    fn default() -> Self {
        Self {
            mu: 12,
            lambda: 48,
            max_generations_stage1: 2000,
            max_steps_stage2: 500,
            seed: 0,
            restart_after: 200,
            transformation_probabilities: [
                (TransformKind::Translate, 0.5),
                (TransformKind::Stretch, 0.25),
                (TransformKind::Rotate90, 0.125),
                (TransformKind::Mirror, 0.125),
            ]
            .into(),
        }
    }
}

impl EsParams {
    pub fn check(&self) -> Result<(), EpsapError> {
        if self.mu < 1 {
            return Err(EpsapError::InvalidParams("mu must be at least 1".into()));
        }
        if self.lambda < self.mu {
            return Err(EpsapError::InvalidParams(format!(
                "lambda {} < mu {}",
                self.lambda, self.mu
            )));
        }
        let probs = &self.transformation_probabilities;
        if probs.values().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(EpsapError::InvalidParams(
                "transformation probabilities must lie in [0, 1]".into(),
            ));
        }
        let sum: f64 = probs.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(EpsapError::InvalidParams(format!(
                "transformation probabilities sum to {sum}"
            )));
        }
        Ok(())
    }
}

/// One line of the per-generation log.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub generation: usize,
    pub best_fitness: f64,
    pub max_generations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionOutcome {
    pub solutions: Vec<SolutionRecord>,
    /// Best fitness after initialisation (index 0) and after every stage-one generation.
    pub best_per_generation: Vec<f64>,
    pub generations_run: usize,
    pub local_search_steps: usize,
}

/// Chance that one mutation slot uses a repair move instead of a blind transformation.
const REPAIR_PROBABILITY: f64 = 0.3;

/// Relative weights of the levels a random transformation targets.
const LEVEL_WEIGHTS: [(LevelPick, f64); 5] = [
    (LevelPick::Opening, 0.30),
    (LevelPick::Space, 0.45),
    (LevelPick::Cluster, 0.10),
    (LevelPick::Storey, 0.10),
    (LevelPick::Building, 0.05),
];

#[derive(Clone, Copy)]
enum LevelPick {
    Opening,
    Space,
    Cluster,
    Storey,
    Building,
}

fn draw_steps<R: Rng>(rng: &mut R) -> i32 {
    let scale = [2, 6, MAX_STEPS][rng.gen_range(0..3)];
    let mag = rng.gen_range(1..=scale);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

fn random_transformation<R: Rng>(
    layout: &Layout,
    kinds: &[(TransformKind, f64)],
    rng: &mut R,
) -> Transformation {
    let kind_dist = WeightedIndex::new(kinds.iter().map(|k| k.1)).expect("probabilities checked");
    let kind = kinds[kind_dist.sample(rng)].0;
    let spaces: Vec<&str> = layout.spaces().map(|s| s.id.as_str()).collect();
    let openings: Vec<&str> = layout.openings().map(|o| o.id.as_str()).collect();
    let available: Vec<(LevelPick, f64)> = LEVEL_WEIGHTS
        .iter()
        .copied()
        .filter(|(l, _)| !matches!(l, LevelPick::Opening) || !openings.is_empty())
        .collect();
    let level_dist = WeightedIndex::new(available.iter().map(|l| l.1)).expect("positive weights");
    let target = match available[level_dist.sample(rng)].0 {
        LevelPick::Opening => {
            Target::Opening(openings[rng.gen_range(0..openings.len())].to_string())
        }
        LevelPick::Space => Target::Space(spaces[rng.gen_range(0..spaces.len())].to_string()),
        LevelPick::Cluster => Target::Cluster(spaces[rng.gen_range(0..spaces.len())].to_string()),
        LevelPick::Storey => Target::Storey(rng.gen_range(0..layout.storeys.len())),
        LevelPick::Building => Target::Building,
    };
    let op = match kind {
        TransformKind::Translate => match rng.gen_range(0..3) {
            0 => Operation::Translate {
                dx: draw_steps(rng),
                dy: 0,
            },
            1 => Operation::Translate {
                dx: 0,
                dy: draw_steps(rng),
            },
            _ => Operation::Translate {
                dx: draw_steps(rng),
                dy: draw_steps(rng),
            },
        },
        TransformKind::Rotate90 => Operation::Rotate90 {
            quarter_turns: rng.gen_range(1..=3),
        },
        TransformKind::Stretch => Operation::Stretch {
            side: Orientation::from_index(rng.gen_range(0..4)),
            steps: draw_steps(rng),
        },
        TransformKind::Mirror => Operation::Mirror {
            axis: if rng.gen_bool(0.5) { Axis::X } else { Axis::Y },
        },
    };
    Transformation::new(target, op)
}

fn sort_and_truncate(mut pool: Vec<Individual>, keep: usize) -> Vec<Individual> {
    pool.sort_by(|a, b| {
        a.rank_key()
            .partial_cmp(&b.rank_key())
            .expect("finite fitness")
    });
    let mut seen = BTreeSet::new();
    pool.retain(|ind| seen.insert(ind.hash.clone()));
    pool.truncate(keep);
    pool
}

/// Deterministic neighbourhood for the local search: single steps plus every repair move.
fn neighbourhood(layout: &Layout, program: &SpaceProgram) -> Vec<Move> {
    let mut out: Vec<Move> = single_steps(layout).into_iter().map(|t| vec![t]).collect();
    out.extend(repair_moves(layout, program));
    out
}

fn single_steps(layout: &Layout) -> Vec<Transformation> {
    let mut out = Vec::new();
    for s in layout.spaces() {
        let t = |op| Transformation::new(Target::Space(s.id.clone()), op);
        for step in [1, 5] {
            for (dx, dy) in [(step, 0), (-step, 0), (0, step), (0, -step)] {
                out.push(t(Operation::Translate { dx, dy }));
            }
        }
        for side in Orientation::ALL {
            for steps in [1, -1] {
                out.push(t(Operation::Stretch { side, steps }));
            }
        }
        for q in [1, 2, 3] {
            out.push(t(Operation::Rotate90 { quarter_turns: q }));
        }
        out.push(t(Operation::Mirror { axis: Axis::X }));
        out.push(t(Operation::Mirror { axis: Axis::Y }));
    }
    for o in layout.openings() {
        let t = |op| Transformation::new(Target::Opening(o.id.clone()), op);
        for step in [1, -1, 5, -5] {
            out.push(t(Operation::Translate { dx: step, dy: step }));
        }
        for q in [1, 2, 3] {
            out.push(t(Operation::Rotate90 { quarter_turns: q }));
        }
        out.push(t(Operation::Mirror { axis: Axis::X }));
    }
    out
}

/// Steepest descent over the single-step neighbourhood.
fn local_search(
    start: Individual,
    program: &SpaceProgram,
    max_steps: usize,
) -> (Individual, usize) {
    let mut current = start;
    let mut steps = 0;
    while steps < max_steps && current.fitness > 0.0 {
        let moves = neighbourhood(&current.layout, program);
        let best = moves
            .par_iter()
            .enumerate()
            .filter_map(|(i, m)| {
                let mut l = current.layout.clone();
                for t in m {
                    l = apply_transformation(&l, t).ok()?;
                }
                Some((i, evaluate(&l, program)))
            })
            .min_by(|a, b| {
                (a.1.fitness, a.0)
                    .partial_cmp(&(b.1.fitness, b.0))
                    .expect("finite fitness")
            });
        match best {
            Some((_, cand)) if cand.fitness < current.fitness - 1e-12 => {
                current = cand;
                steps += 1;
            }
            _ => break,
        }
    }
    (current, steps)
}

fn best_of(population: &[Individual], archive: &[Individual]) -> f64 {
    population
        .iter()
        .chain(archive)
        .map(|i| i.fitness)
        .fold(f64::INFINITY, f64::min)
}

/// Generates ranked alternative layouts for `program`.
pub fn evolve(
    program: &SpaceProgram,
    params: &EsParams,
    n_solutions: usize,
) -> Result<Vec<SolutionRecord>, EpsapError> {
    evolve_with_observer(program, params, n_solutions, &mut |_| {}).map(|o| o.solutions)
}

/// Like [`evolve`], reporting every stage-one generation to `observer`.
pub fn evolve_with_observer(
    program: &SpaceProgram,
    params: &EsParams,
    n_solutions: usize,
    observer: &mut dyn FnMut(&GenerationLog),
) -> Result<EvolutionOutcome, EpsapError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let population = init_with_rng(program, params.mu, &mut rng)?;
    let mut population = sort_and_truncate(population, params.mu);
    let mut found_at: BTreeMap<String, usize> =
        population.iter().map(|i| (i.hash.clone(), 0)).collect();
    let kinds: Vec<(TransformKind, f64)> = params
        .transformation_probabilities
        .iter()
        .filter(|(_, p)| **p > 0.0)
        .map(|(k, p)| (*k, *p))
        .collect();
    let mut archive: Vec<Individual> = Vec::new();
    let mut stagnant = 0;
    let mut history = vec![population[0].fitness];
    let max_gen = params.max_generations_stage1;
    observer(&GenerationLog {
        generation: 0,
        best_fitness: history[0],
        max_generations: max_gen,
    });

    let mut generation = 0;
    while generation < max_gen && best_of(&population, &archive) > 0.0 {
        generation += 1;
        if params.restart_after > 0 && stagnant >= params.restart_after {
            archive.extend(population);
            archive = sort_and_truncate(archive, params.mu);
            population = sort_and_truncate(init_with_rng(program, params.mu, &mut rng)?, params.mu);
            for i in &population {
                found_at.entry(i.hash.clone()).or_insert(generation);
            }
            stagnant = 0;
        }
        // all random draws happen here, before the parallel evaluation
        let plans: Vec<(usize, Vec<Transformation>)> = (0..params.lambda)
            .map(|_| {
                let parent = rng.gen_range(0..population.len());
                let count = rng.gen_range(1..=3);
                let mut layout = population[parent].layout.clone();
                let mut ts = Vec::with_capacity(count);
                for _ in 0..count {
                    let repair = if rng.gen_bool(REPAIR_PROBABILITY) {
                        random_repair(&layout, program, &mut rng)
                    } else {
                        None
                    };
                    let step = repair
                        .unwrap_or_else(|| vec![random_transformation(&layout, &kinds, &mut rng)]);
                    for t in step {
                        // targets are drawn from the current layout, so application cannot fail
                        layout =
                            apply_transformation(&layout, &t).expect("target drawn from layout");
                        ts.push(t);
                    }
                }
                (parent, ts)
            })
            .collect();
        let offspring: Vec<Individual> = plans
            .par_iter()
            .map(|(parent, ts)| {
                let mut layout = population[*parent].layout.clone();
                for t in ts {
                    layout = apply_transformation(&layout, t).expect("target drawn from layout");
                }
                evaluate(&layout, program)
            })
            .collect();
        for o in &offspring {
            found_at.entry(o.hash.clone()).or_insert(generation);
        }
        let before = population[0].fitness;
        let mut pool = population;
        pool.extend(offspring);
        population = sort_and_truncate(pool, params.mu);
        if population[0].fitness < before - 1e-12 {
            stagnant = 0;
        } else {
            stagnant += 1;
        }
        let best = best_of(&population, &archive);
        history.push(best);
        observer(&GenerationLog {
            generation,
            best_fitness: best,
            max_generations: max_gen,
        });
    }

    archive.extend(population);
    let searched: Vec<(Individual, usize)> = sort_and_truncate(archive, params.mu)
        .into_iter()
        .map(|ind| local_search(ind, program, params.max_steps_stage2))
        .collect();
    let local_steps = searched.iter().map(|s| s.1).sum();
    let step_of: BTreeMap<String, usize> =
        searched.iter().map(|(i, s)| (i.hash.clone(), *s)).collect();
    let finals = sort_and_truncate(searched.into_iter().map(|s| s.0).collect(), n_solutions);
    let solutions = finals
        .into_iter()
        .map(|ind| SolutionRecord {
            id: ind.hash.clone(),
            fitness: ind.fitness,
            penalties: ind.penalty_breakdown,
            thermal_objective: None,
            provenance: Provenance {
                seed: params.seed,
                generation: found_at.get(&ind.hash).copied().unwrap_or(generation),
                local_search_steps: step_of.get(&ind.hash).copied().unwrap_or(0),
                optimization_trace: Vec::new(),
            },
            layout: ind.layout,
        })
        .collect();
    Ok(EvolutionOutcome {
        solutions,
        best_per_generation: history,
        generations_run: generation,
        local_search_steps: local_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epsap::test_support::*;
    use crate::geometry::Rect;
    use crate::model::{AdjacencyKind, AdjacencyRequirement, PenaltyWeights};

    #[test]
    fn fitness_is_weighted_sum_of_components() {
        let (layout, mut program) = compliant_pair();
        let mut l = layout.clone();
        l.storeys[0].spaces[1].rect = Rect::new(4.5, 1.0, 4.0, 4.0);
        let ind = evaluate(&l, &program);
        let resum: f64 = ind.penalty_breakdown.to_map().values().sum();
        assert!((ind.fitness - resum).abs() < 1e-9);
        program.objective_weights = PenaltyWeights::uniform(0.0);
        assert_eq!(evaluate(&l, &program).fitness, 0.0);
    }

    #[test]
    fn overlap_only_fitness() {
        let mut program = bare_program(&[("a", 1.0), ("b", 1.0)]);
        program.spaces.iter_mut().for_each(|s| s.min_side = 1.0);
        let l = boxes(&[("a", 0.0, 0.0, 1.0, 1.0), ("b", 0.5, 0.5, 1.0, 1.0)]);
        assert_eq!(evaluate(&l, &program).fitness, 0.25);
    }

    #[test]
    fn single_space_is_feasible_at_generation_zero() {
        let mut program = bare_program(&[("studio", 24.0)]);
        program.boundary = vec![Rect::new(0.0, 0.0, 8.0, 8.0)];
        let out = evolve_with_observer(
            &program,
            &EsParams {
                seed: 3,
                ..Default::default()
            },
            3,
            &mut |_| {},
        )
        .unwrap();
        assert_eq!(out.generations_run, 0);
        assert_eq!(out.solutions[0].fitness, 0.0);
    }

    #[test]
    fn ranked_and_truncated() {
        let mut program = bare_program(&[("a", 12.0), ("b", 9.0), ("c", 6.0)]);
        program.boundary = vec![Rect::new(0.0, 0.0, 6.0, 6.0)];
        let params = EsParams {
            seed: 5,
            max_generations_stage1: 30,
            max_steps_stage2: 5,
            ..Default::default()
        };
        let sols = evolve(&program, &params, 3).unwrap();
        assert!(sols.len() <= 3 && !sols.is_empty());
        for w in sols.windows(2) {
            assert!((w[0].fitness, &w[0].id) <= (w[1].fitness, &w[1].id));
        }
    }

    #[test]
    fn elitism_and_determinism() {
        let mut program = bare_program(&[("a", 12.0), ("b", 9.0), ("c", 8.0)]);
        program.boundary = vec![Rect::new(0.0, 0.0, 7.0, 6.0)];
        program.adjacency_requirements.push(AdjacencyRequirement {
            a: "a".into(),
            b: "b".into(),
            kind: AdjacencyKind::DoorConnected,
        });
        let params = EsParams {
            seed: 11,
            max_generations_stage1: 60,
            max_steps_stage2: 20,
            ..Default::default()
        };
        let mut logs = Vec::new();
        let out = evolve_with_observer(&program, &params, 4, &mut |g| logs.push(*g)).unwrap();
        for w in out.best_per_generation.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert_eq!(logs.len(), out.best_per_generation.len());
        let again = evolve_with_observer(&program, &params, 4, &mut |_| {}).unwrap();
        assert_eq!(
            serde_json::to_string(&out).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn bad_params_rejected() {
        let program = bare_program(&[("a", 12.0)]);
        let p = EsParams {
            mu: 5,
            lambda: 2,
            ..Default::default()
        };
        assert!(matches!(
            evolve(&program, &p, 1),
            Err(EpsapError::InvalidParams(_))
        ));
        let mut p = EsParams::default();
        p.transformation_probabilities
            .insert(TransformKind::Mirror, 0.5);
        assert!(matches!(
            evolve(&program, &p, 1),
            Err(EpsapError::InvalidParams(_))
        ));
    }
}
