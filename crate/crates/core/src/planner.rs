//! Randomized coverage planning, deterministic-strategy setting counts, and
//! the measurement time model.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::fgu::covered_targets;
use crate::majorana::MajoranaIndex;
use crate::mapping::Mapping;
use crate::nc::nc_covered;
use crate::perm::{sample_nc_setting, PermSetting, Setting};
use crate::rng::{substream, Domain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Fgu,
    Nc,
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ensemble::Fgu => "fgu",
            Ensemble::Nc => "nc",
        })
    }
}

impl FromStr for Ensemble {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fgu" => Ok(Ensemble::Fgu),
            "nc" => Ok(Ensemble::Nc),
            other => Err(Error::InvalidArgument(format!("unknown ensemble '{other}' (fgu|nc)"))),
        }
    }
}

/// Randomly drawn settings covering every target at least `r` times.
#[derive(Clone, Debug, PartialEq)]
pub struct CoveragePlan {
    pub n: usize,
    pub k: usize,
    pub ensemble: Ensemble,
    pub mapping: Mapping,
    pub r: u64,
    pub seed: u64,
    pub settings: Vec<Setting>,
    /// Cover count per target.
    pub coverage: BTreeMap<MajoranaIndex, u64>,
}

impl CoveragePlan {
    pub fn k_r(&self) -> usize {
        self.settings.len()
    }

    pub fn min_coverage(&self) -> u64 {
        self.coverage.values().copied().min().unwrap_or(0)
    }

    pub fn mean_coverage(&self) -> f64 {
        if self.coverage.is_empty() {
            return 0.0;
        }
        self.coverage.values().sum::<u64>() as f64 / self.coverage.len() as f64
    }

    pub fn targets(&self) -> impl Iterator<Item = &MajoranaIndex> {
        self.coverage.keys()
    }
}

/// Targets: every monomial of even degree `2..=2k`.
pub fn plan_targets(n: usize, k: usize) -> Vec<MajoranaIndex> {
    (1..=k).flat_map(|j| MajoranaIndex::all_of_degree(n, 2 * j)).collect()
}

/// Samples settings until each target is covered `r` times. Setting `i` is
/// drawn from its own substream, so plans are reproducible per seed.
pub fn coverage_plan(
    n: usize,
    k: usize,
    ensemble: Ensemble,
    r: u64,
    seed: u64,
    mapping: &Mapping,
) -> Result<CoveragePlan> {
    if r == 0 {
        return Err(Error::InvalidArgument("coverage target r must be at least 1".into()));
    }
    if k == 0 || k > n {
        return Err(Error::DegreeOutOfRange { n, k });
    }
    if mapping.n() != n {
        return Err(Error::ModeMismatch { expected: n, found: mapping.n() });
    }
    let targets = plan_targets(n, k);
    let mut coverage: BTreeMap<MajoranaIndex, u64> = targets.iter().map(|t| (*t, 0)).collect();
    let mut deficit = coverage.len();
    let mut settings = Vec::new();
    let bump = |coverage: &mut BTreeMap<MajoranaIndex, u64>, t: &MajoranaIndex, deficit: &mut usize| {
        let c = coverage.get_mut(t).expect("target registered");
        *c += 1;
        if *c == r {
            *deficit -= 1;
        }
    };
    while deficit > 0 {
        let mut rng = substream(seed, Domain::Plan, settings.len() as u64);
        match ensemble {
            Ensemble::Fgu => {
                let q = PermSetting::sample(n, &mut rng)?;
                for (_, tau, _) in covered_targets(&q, mapping, k)? {
                    bump(&mut coverage, &tau, &mut deficit);
                }
                settings.push(Setting::Fgu(q));
            }
            Ensemble::Nc => {
                let s = sample_nc_setting(n, &mut rng)?;
                for t in &targets {
                    if nc_covered(&s, t, mapping) {
                        bump(&mut coverage, t, &mut deficit);
                    }
                }
                settings.push(Setting::Nc(s));
            }
        }
    }
    Ok(CoveragePlan { n, k, ensemble, mapping: mapping.clone(), r, seed, settings, coverage })
}

fn rational_to_u128_ceil(x: &BigRational) -> Result<u128> {
    x.ceil().to_integer().to_u128().ok_or_else(|| Error::InvalidArgument(format!("count {x} does not fit in 128 bits")))
}

fn big(n: u64, k: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(binomial(n, k)))
}

/// Number of binary-partition rounds, `⌈log₂ n⌉`.
fn log2_ceil(n: usize) -> u32 {
    usize::BITS - (n - 1).leading_zeros()
}

/// `3^k (k−1) Σ_{m=0}^{⌈log₂ n⌉−1} m^{k−2}`, with `0^0 = 1`.
pub fn eqot(k: usize, n: usize) -> Result<u128> {
    if k < 2 || n < 2 {
        return Err(Error::InvalidArgument(format!("eqot needs k ≥ 2 and n ≥ 2 (got k={k}, n={n})")));
    }
    let sum: u128 = (0..log2_ceil(n) as u128).map(|m| m.pow(k as u32 - 2)).sum();
    Ok(3u128.pow(k as u32) * (k as u128 - 1) * sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// `4⌈n/2⌉ + 1` swap circuits for the 1-RDM.
    Swap1,
    Eqot,
    Mt2,
    Mt3,
    Mt4,
    /// `C(n,k)` swap circuits.
    SwapK,
    Naive,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::Swap1,
        Strategy::Eqot,
        Strategy::Mt2,
        Strategy::Mt3,
        Strategy::Mt4,
        Strategy::SwapK,
        Strategy::Naive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Swap1 => "swap1",
            Strategy::Eqot => "eqot",
            Strategy::Mt2 => "mt2",
            Strategy::Mt3 => "mt3",
            Strategy::Mt4 => "mt4",
            Strategy::SwapK => "swap-k",
            Strategy::Naive => "naive",
        }
    }

    /// RDM order the strategy measures, if fixed.
    pub fn fixed_k(self) -> Option<usize> {
        match self {
            Strategy::Swap1 => Some(1),
            Strategy::Mt2 => Some(2),
            Strategy::Mt3 => Some(3),
            Strategy::Mt4 => Some(4),
            _ => None,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown strategy '{s}'")))
    }
}

/// Swap-network + EQOT totals, with `eqot` injectable so the term structure can
/// be checked independently of the EQOT values. Rounded up once at the end.
pub(crate) fn mt_count_with(k: usize, n: usize, eqot: impl Fn(usize) -> Result<u128>) -> Result<u128> {
    let e = |j| eqot(j).map(|v| BigRational::from_integer(BigInt::from(v)));
    let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
    let n64 = n as u64;
    let mut total = BigRational::one() + big(n64, 2) * BigRational::from_integer(BigInt::from(4));
    // degree-j index blocks use EQOT(k+j, n); only the top block gets the (2/3)^{2k} reduction
    for j in 2..=k {
        let mut term = big(n64, j as u64) * e(k + j)?;
        if j == k {
            term *= two_thirds.pow(2 * k as i32);
        }
        total += term;
    }
    rational_to_u128_ceil(&total)
}

/// Number of measurement settings for a deterministic strategy.
pub fn strategy_count(strategy: Strategy, k: usize, n: usize) -> Result<u128> {
    if let Some(fk) = strategy.fixed_k() {
        if fk != k {
            return Err(Error::InvalidArgument(format!("strategy {strategy} measures the {fk}-RDM, not k={k}")));
        }
    }
    if k == 0 || n < 2 * k {
        return Err(Error::DegreeOutOfRange { n, k });
    }
    match strategy {
        Strategy::Swap1 => Ok(4 * n.div_ceil(2) as u128 + 1),
        Strategy::Eqot => eqot(k, n),
        Strategy::Mt2 | Strategy::Mt3 | Strategy::Mt4 => mt_count_with(k, n, |j| eqot(j, n)),
        Strategy::SwapK => rational_to_u128_ceil(&big(n as u64, k as u64)),
        Strategy::Naive => {
            let ck = binomial(n as u64, k as u64);
            let pairs = &ck * (&ck + 1u32) / 2u32;
            let total = pairs * num_bigint::BigUint::from(3u32).pow(2 * k as u32);
            total.to_u128().ok_or_else(|| Error::InvalidArgument("naive count overflows 128 bits".into()))
        }
    }
}

/// All strategies applicable to `(k, n)` with their counts.
pub fn strategy_counts(k: usize, n: usize) -> Result<Vec<(Strategy, u128)>> {
    if k == 0 || n < 2 * k {
        return Err(Error::DegreeOutOfRange { n, k });
    }
    let mut out = Vec::new();
    for s in Strategy::ALL {
        if s.fixed_k().is_some_and(|fk| fk != k) || (s == Strategy::Eqot && k < 2) {
            continue;
        }
        out.push((s, strategy_count(s, k, n)?));
    }
    Ok(out)
}

/// Parameters of the wall-clock model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeModel {
    /// Shots per second.
    pub f_samp: f64,
    /// Circuit load time in seconds.
    pub t_load: f64,
    /// Shots per observable-equivalent.
    pub shots: f64,
    /// Coverage target of the randomized plan.
    pub r: f64,
    /// Deterministic settings `C` or randomized `K_r`.
    pub settings: f64,
}

/// `C (S/f + t_load)` or `K_r (⌈S/r⌉/f + t_load)`.
pub fn time_model(tm: &TimeModel, deterministic: bool) -> Result<f64> {
    let TimeModel { f_samp, t_load, shots, r, settings } = *tm;
    for (name, v) in [("f_samp", f_samp), ("shots", shots), ("r", r), ("settings", settings)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidArgument(format!("{name} = {v} must be positive")));
        }
    }
    if !(t_load.is_finite() && t_load >= 0.0) {
        return Err(Error::InvalidArgument(format!("t_load = {t_load} must be nonnegative")));
    }
    Ok(if deterministic {
        settings * (shots / f_samp + t_load)
    } else {
        settings * ((shots / r).ceil() / f_samp + t_load)
    })
}

/// `p_ℓ ∝ √V_ℓ`.
pub fn allocation(variances: &[f64]) -> Result<Vec<f64>> {
    if let Some(v) = variances.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidArgument(format!("variance {v} must be finite and nonnegative")));
    }
    let roots: Vec<f64> = variances.iter().map(|v| v.sqrt()).collect();
    let total: f64 = roots.iter().sum();
    if total == 0.0 {
        return Err(Error::InvalidArgument("all variances are zero".into()));
    }
    Ok(roots.into_iter().map(|s| s / total).collect())
}

/// `Σ_ℓ m_ℓ / p_ℓ − E²` for second moments `m_ℓ = tr(O_ℓ² ρ)`.
pub fn reframed_variance(second_moments: &[f64], p: &[f64], total_expectation: f64) -> Result<f64> {
    if second_moments.len() != p.len() {
        return Err(Error::InvalidArgument(format!(
            "{} second moments but {} probabilities",
            second_moments.len(),
            p.len()
        )));
    }
    let mut acc = 0.0;
    for (l, (&m, &pl)) in second_moments.iter().zip(p).enumerate() {
        if m == 0.0 {
            continue;
        }
        if pl <= 0.0 {
            return Err(Error::InvalidArgument(format!("term {l} has moment {m} but probability {pl}")));
        }
        acc += m / pl;
    }
    Ok(acc - total_expectation * total_expectation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::MappingKind;

    #[test]
    fn eqot_values() {
        assert_eq!(eqot(4, 8).unwrap(), 1215);
        assert_eq!(eqot(2, 8).unwrap(), 27);
        assert_eq!(eqot(2, 2).unwrap(), 9);
        assert_eq!(eqot(3, 2).unwrap(), 0);
        assert!(eqot(1, 8).is_err());
        let mut prev = 0;
        for n in 2..200 {
            let v = eqot(5, n).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn strategy_values() {
        assert_eq!(strategy_count(Strategy::Swap1, 1, 12).unwrap(), 25);
        assert_eq!(strategy_count(Strategy::Swap1, 1, 5).unwrap(), 13);
        assert_eq!(strategy_count(Strategy::Mt2, 2, 8).unwrap(), 6833);
        assert_eq!(strategy_count(Strategy::Naive, 1, 4).unwrap(), 90);
        assert_eq!(strategy_count(Strategy::SwapK, 3, 8).unwrap(), 56);
        assert!(strategy_count(Strategy::Mt2, 3, 8).is_err());
        assert!(strategy_count(Strategy::Naive, 3, 5).is_err());
    }

    #[test]
    fn mt_term_structure_with_unit_eqot() {
        let one = |_| Ok(1);
        for n in 8..20u64 {
            let c2 = (n * (n - 1) / 2) as u128;
            let c3 = (n * (n - 1) * (n - 2) / 6) as u128;
            let c4 = (n * (n - 1) * (n - 2) * (n - 3) / 24) as u128;
            let base = 1 + 4 * c2;
            // ceil(c·16/81), ceil(c2 + c3·64/729), ceil(c2 + c3 + c4·256/6561)
            assert_eq!(mt_count_with(2, n as usize, one).unwrap(), base + (c2 * 16).div_ceil(81));
            assert_eq!(mt_count_with(3, n as usize, one).unwrap(), base + c2 + (c3 * 64).div_ceil(729));
            assert_eq!(mt_count_with(4, n as usize, one).unwrap(), base + c2 + c3 + (c4 * 256).div_ceil(6561));
        }
    }

    #[test]
    fn time_model_values() {
        let tm = TimeModel { f_samp: 5000.0, t_load: 0.1, shots: 2.5e5, r: 50.0, settings: 10.0 };
        assert!((time_model(&tm, true).unwrap() - 501.0).abs() < 1e-9);
        let rand = TimeModel { t_load: 0.0, settings: 200.0, ..tm };
        assert!((time_model(&rand, false).unwrap() - 200.0 / 50.0 * 2.5e5 / 5000.0).abs() < 1e-9);
        assert!(time_model(&TimeModel { f_samp: 0.0, ..tm }, true).is_err());
    }

    #[test]
    fn allocation_values() {
        let p = allocation(&[1.0, 4.0]).unwrap();
        assert!((p[0] - 1.0 / 3.0).abs() < 1e-15 && (p[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(allocation(&[2.0, 2.0, 2.0, 2.0]).unwrap(), vec![0.25; 4]);
        assert_eq!(allocation(&[0.0, 1.0]).unwrap(), vec![0.0, 1.0]);
        assert!(allocation(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn reframed_variance_values() {
        assert!((reframed_variance(&[2.0], &[1.0], 1.0).unwrap() - 1.0).abs() < 1e-15);
        let opt = reframed_variance(&[1.0, 4.0], &allocation(&[1.0, 4.0]).unwrap(), 0.0).unwrap();
        let uni = reframed_variance(&[1.0, 4.0], &[0.5, 0.5], 0.0).unwrap();
        assert!((opt - 9.0).abs() < 1e-12 && (uni - 10.0).abs() < 1e-12);
        assert!(reframed_variance(&[1.0], &[0.0], 0.0).is_err());
        assert!(reframed_variance(&[0.0, 1.0], &[0.0, 1.0], 0.0).is_ok());
    }

    #[test]
    fn small_fgu_plan() {
        let m = Mapping::jordan_wigner(2).unwrap();
        let plan = coverage_plan(2, 1, Ensemble::Fgu, 1, 1, &m).unwrap();
        assert!(plan.k_r() >= 3);
        assert!(plan.min_coverage() >= 1);
        assert_eq!(plan.coverage.len(), 6);
        assert_eq!(plan, coverage_plan(2, 1, Ensemble::Fgu, 1, 1, &m).unwrap());
    }

    #[test]
    fn small_nc_plan() {
        let m = Mapping::new(MappingKind::BravyiKitaev, 4).unwrap();
        let plan = coverage_plan(4, 2, Ensemble::Nc, 3, 9, &m).unwrap();
        assert!(plan.min_coverage() >= 3);
        assert!(plan.settings.iter().all(|s| matches!(s, Setting::Nc(_))));
    }
}
