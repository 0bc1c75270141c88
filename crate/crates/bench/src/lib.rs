//! Workloads shared by the benchmarks under `benches/`.

use pcmorph_core::{explore, resource_tl, thread_program, Check, ExplorationResult, Result};

/// Explores `threads` lock/unlock threads of `rounds` rounds each at `bound`.
pub fn explore_lock(threads: usize, rounds: u32, bound: u32) -> Result<ExplorationResult> {
    let r = resource_tl(bound);
    let progs = (0..threads).map(|_| thread_program(&r, rounds)).collect::<Result<Vec<_>>>()?;
    explore(&r, &progs, &Check::ALL)
}
