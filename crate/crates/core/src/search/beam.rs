use super::{SearchConfig, SearchError, SearchResult, SearchTask, Session};
use crate::distance::{hybrid_rank, DistanceOracle};
use crate::proposer::ProposalOracle;
use crate::trajectory::StepSink;

/// Expands every beam member, pools members and children, ranks the pool by
/// (score, oracle rank against the original, canonical text) and keeps the
/// top `beam_width`.
pub fn beam_search(
    cfg: &SearchConfig,
    task: &SearchTask,
    proposer: &dyn ProposalOracle,
    distance: &DistanceOracle,
    sink: &mut dyn StepSink,
) -> Result<SearchResult, SearchError> {
    let mut s = Session::start(cfg, task, proposer, Some(distance), sink)?;
    let keep = cfg.hybrid_keep.unwrap_or(2 * cfg.beam_width).max(1);
    let mut beam = vec![0];
    s.trace.level_sizes.push(1);
    if s.qualifies(0) {
        return Ok(s.finish(None));
    }

    for _ in 0..cfg.max_depth {
        let mut pool = beam.clone();
        for &member in &beam {
            for (id, _) in s.expand(member, cfg.proposals_per_expansion, "beam")? {
                if !pool.contains(&id) {
                    pool.push(id);
                }
            }
        }

        let texts: Vec<&str> = pool.iter().map(|&i| s.candidates[i].text.as_str()).collect();
        let ranked = hybrid_rank(&s.candidates[0].text, &texts, keep.min(pool.len()), distance)?;
        let mut position = vec![0; pool.len()];
        for (pos, &j) in ranked.order.iter().enumerate() {
            position[j] = pos;
        }
        for (j, &id) in pool.iter().enumerate() {
            s.candidates[id].semantic_position = Some(position[j]);
        }

        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.sort_by(|&x, &y| {
            let (sx, tx) = s.key(pool[x]);
            let (sy, ty) = s.key(pool[y]);
            sx.total_cmp(&sy)
                .then_with(|| position[x].cmp(&position[y]))
                .then_with(|| tx.cmp(ty))
        });
        beam = order.into_iter().take(cfg.beam_width).map(|j| pool[j]).collect();
        s.trace.level_sizes.push(beam.len());
        if pool.iter().any(|&i| s.qualifies(i)) {
            break;
        }
    }
    Ok(s.finish(None))
}
