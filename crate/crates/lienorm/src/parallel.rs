//! Rayon drivers for the Monte Carlo integrator. Blocks are evaluated in
//! any order and merged by block index, so the result matches the
//! sequential integrator bit for bit.

use lienorm_core::holo::HoloMap;
use lienorm_core::quadrature::{
    convergence_rows, mc_block, mc_blocks, mc_finish, Bump, ConvergenceRow, IntegrationResult,
    SampleBox,
};
use lienorm_core::{Error, Result};
use rayon::prelude::*;

pub fn mc_weak_integral(
    map: &(impl HoloMap + Sync),
    bump: &Bump,
    epsilon: f64,
    bx: &SampleBox,
    samples: u64,
    seed: u64,
) -> Result<IntegrationResult> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let blocks = mc_blocks(samples)
        .into_par_iter()
        .map(|(k, count)| mc_block(map, bump, epsilon, bx, seed, k, count))
        .collect::<Result<Vec<_>>>()?;
    Ok(mc_finish(&blocks, bx.volume()))
}

pub fn convergence_study(
    map: &(impl HoloMap + Sync),
    bump: &Bump,
    epsilons: &[f64],
    bx: &SampleBox,
    samples: u64,
    seed: u64,
    reference: f64,
) -> Result<Vec<ConvergenceRow>> {
    convergence_rows(epsilons, reference, |eps| {
        mc_weak_integral(map, bump, eps, bx, samples, seed)
    })
}
