//! Simulated tomography runs: draw outcomes from a dense state, fold the
//! estimators and assemble the RDM.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fgu::{estimate_all, Estimate, ShadowSample};
use crate::majorana::MajoranaIndex;
use crate::mapping::Mapping;
use crate::nc::{estimate_all_nc, EigenCache, EigenMethod, NCSample};
use crate::observables::{assemble_rdm, rdm_support, RDMTensor};
use crate::perm::{sample_nc_setting, PermSetting, Setting};
use crate::rng::{substream, Domain};
use crate::sim::{outcome_distribution, sample_outcome, simulate_shots, DenseState};

#[derive(Clone, Debug, PartialEq)]
pub struct TomographyResult {
    pub estimates: BTreeMap<MajoranaIndex, Estimate>,
    pub rdm: RDMTensor,
    pub shots: usize,
}

fn fold(
    settings: &[Setting],
    outcomes: &[Vec<u64>],
    m: &Mapping,
    k: usize,
    method: EigenMethod,
) -> Result<TomographyResult> {
    let targets: Vec<MajoranaIndex> = rdm_support(m.n(), k).into_iter().filter(|t| !t.is_identity()).collect();
    let mut fgu = Vec::new();
    let mut nc = Vec::new();
    for (s, outs) in settings.iter().zip(outcomes) {
        for &outcome in outs {
            match s {
                Setting::Fgu(q) => fgu.push(ShadowSample { setting: q.clone(), outcome }),
                Setting::Nc(q) => nc.push(NCSample { setting: q.clone(), outcome }),
            }
        }
    }
    let estimates = match (fgu.is_empty(), nc.is_empty()) {
        (false, true) => estimate_all(&fgu, &targets, m)?,
        (true, false) => estimate_all_nc(&nc, &targets, &EigenCache::new(m.clone(), method))?,
        (true, true) => return Err(Error::EmptySamples),
        (false, false) => return Err(Error::InvalidArgument("plan mixes FGU and NC settings".into())),
    };
    let means: BTreeMap<MajoranaIndex, f64> = estimates.iter().map(|(t, e)| (*t, e.mean)).collect();
    let rdm = assemble_rdm(&means, m.n(), k)?;
    Ok(TomographyResult { estimates, rdm, shots: fgu.len() + nc.len() })
}

/// Runs `shots` shots of every setting in a plan; setting `i` draws its
/// outcomes from substream `i`.
pub fn run_plan(
    state: &DenseState,
    settings: &[Setting],
    m: &Mapping,
    k: usize,
    shots: usize,
    seed: u64,
    method: EigenMethod,
) -> Result<TomographyResult> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots per setting must be at least 1".into()));
    }
    if settings.is_empty() {
        return Err(Error::EmptySamples);
    }
    let outcomes = settings
        .par_iter()
        .enumerate()
        .map(|(i, s)| simulate_shots(state, s, m, shots, seed, i as u64))
        .collect::<Result<Vec<_>>>()?;
    fold(settings, &outcomes, m, k, method)
}

/// `samples` freshly drawn FGU settings with one shot each; sample `i`
/// takes its setting and outcome from substreams `i`.
pub fn random_fgu_tomography(
    state: &DenseState,
    m: &Mapping,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<TomographyResult> {
    let (settings, outcomes) = random_single_shots(state, m, samples, seed, |n, i| {
        Ok(Setting::Fgu(PermSetting::sample(n, &mut substream(seed, Domain::Plan, i))?))
    })?;
    fold(&settings, &outcomes, m, k, EigenMethod::Exact)
}

/// As [`random_fgu_tomography`] for the NC ensemble.
pub fn random_nc_tomography(
    state: &DenseState,
    m: &Mapping,
    k: usize,
    samples: usize,
    seed: u64,
    method: EigenMethod,
) -> Result<TomographyResult> {
    let (settings, outcomes) = random_single_shots(state, m, samples, seed, |n, i| {
        Ok(Setting::Nc(sample_nc_setting(n, &mut substream(seed, Domain::Plan, i))?))
    })?;
    fold(&settings, &outcomes, m, k, method)
}

type Shots = (Vec<Setting>, Vec<Vec<u64>>);

fn random_single_shots(
    state: &DenseState,
    m: &Mapping,
    samples: usize,
    seed: u64,
    draw: impl Fn(usize, u64) -> Result<Setting> + Sync,
) -> Result<Shots> {
    if samples == 0 {
        return Err(Error::EmptySamples);
    }
    let pairs = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = draw(state.n, i)?;
            let probs = outcome_distribution(state, &s, m)?;
            let z = sample_outcome(&probs, &mut substream(seed, Domain::Outcomes, i));
            Ok((s, vec![z]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairs.into_iter().unzip())
}
