use super::{SearchConfig, SearchError, SearchResult, SearchTask, Session};
use crate::proposer::ProposalOracle;
use crate::trajectory::StepSink;

/// Level-by-level expansion: level `d` holds the candidates first produced
/// by `d` proposal rounds. The first qualifying candidate, in insertion
/// order, ends the search.
pub fn bfs_search(
    cfg: &SearchConfig,
    task: &SearchTask,
    proposer: &dyn ProposalOracle,
    sink: &mut dyn StepSink,
) -> Result<SearchResult, SearchError> {
    let mut s = Session::start(cfg, task, proposer, None, sink)?;
    s.trace.level_sizes.push(1);
    if s.qualifies(0) {
        return Ok(s.finish(Some(0)));
    }
    let mut level = vec![0];
    for _ in 0..cfg.max_depth {
        let mut next = Vec::new();
        for &node in &level {
            for (id, new) in s.expand(node, cfg.proposals_per_expansion, "bfs")? {
                if !new {
                    continue;
                }
                next.push(id);
                if s.qualifies(id) {
                    s.trace.level_sizes.push(next.len());
                    return Ok(s.finish(Some(id)));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        s.trace.level_sizes.push(next.len());
        level = next;
    }
    Ok(s.finish(None))
}
