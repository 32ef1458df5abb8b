use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Pending, SearchConfig, SearchError, SearchResult, SearchTask, Session};
use crate::proposer::{validate_candidate, OracleError, ProposalOracle};
use crate::trajectory::StepSink;

fn tournament(s: &Session<'_>, population: &[usize], rng: &mut ChaCha8Rng) -> usize {
    let a = population[rng.random_range(0..population.len())];
    let b = population[rng.random_range(0..population.len())];
    if s.better(b, a) {
        b
    } else {
        a
    }
}

fn recover(result: Result<String, OracleError>, fallback: &str) -> Result<String, SearchError> {
    match result {
        Ok(text) => Ok(text),
        Err(OracleError::NoScriptMatch(_)) => Ok(fallback.to_string()),
        Err(e) => Err(e.into()),
    }
}

/// Generation 0 comes from one proposal round, padded with copies of the
/// original. Each generation breeds a full brood by size-2 tournaments,
/// oracle crossover and oracle mutation, then keeps the current elite plus
/// the best offspring.
pub fn genetic_search(
    cfg: &SearchConfig,
    task: &SearchTask,
    proposer: &dyn ProposalOracle,
    sink: &mut dyn StepSink,
) -> Result<SearchResult, SearchError> {
    let mut s = Session::start(cfg, task, proposer, None, sink)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let size = cfg.ga_population;

    let mut population: Vec<usize> = s.expand(0, size, "ga-init")?.into_iter().map(|(id, _)| id).collect();
    population.truncate(size);
    population.resize(size, 0);

    for generation in 0..=cfg.ga_generations {
        let elite = population
            .iter()
            .copied()
            .reduce(|a, b| if s.better(b, a) { b } else { a })
            .expect("population is never empty");
        s.trace.population_sizes.push(population.len());
        s.trace.elite_scores.push(s.candidates[elite].score);
        if generation == cfg.ga_generations || population.iter().any(|&i| s.qualifies(i)) {
            break;
        }

        s.rounds += 1;
        let mut brood = Vec::with_capacity(size);
        for _ in 0..size {
            let a = tournament(&s, &population, &mut rng);
            let b = tournament(&s, &population, &mut rng);
            let ctx = s.context(a);
            let (text_a, text_b) = (&s.candidates[a].text, &s.candidates[b].text);
            let mut child = recover(proposer.crossover(&ctx, text_a, text_b), text_a)?;
            if rng.random::<f64>() < cfg.ga_mutation_rate {
                child = recover(proposer.mutate(&ctx, &child), &child)?;
            }
            let domain =
                validate_candidate(&child, Some(&task.problem)).unwrap_or_else(|_| s.candidates[a].domain.clone());
            brood.push(Pending {
                domain,
                parent: a,
                phase: "ga-offspring",
            });
        }
        let mut offspring: Vec<usize> = s.admit(brood)?.into_iter().map(|(id, _)| id).collect();
        offspring.sort_by(|&x, &y| {
            let (sx, tx) = s.key(x);
            let (sy, ty) = s.key(y);
            sx.total_cmp(&sy).then_with(|| tx.cmp(ty))
        });
        population = std::iter::once(elite)
            .chain(offspring.into_iter().take(size - 1))
            .collect();
    }
    Ok(s.finish(None))
}
