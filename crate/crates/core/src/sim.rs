//! Dense desk-scale simulator used as the reference oracle.
//!
//! Matrices act on `2^n` amplitudes with qubit `j` as bit `j` of the basis
//! index, in the qubit picture of whichever [`Mapping`] is supplied.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fermion::{FermionTerm, Ladder};
use crate::majorana::MajoranaIndex;
use crate::mapping::Mapping;
use crate::observables::{ObservableDecomposition, RDMTensor};
use crate::pauli::{Letter, PauliString};
use crate::perm::{decompose_transpositions, NCSetting, PermSetting, Setting};
use crate::rng::{substream, Domain};

pub type CMatrix = DMatrix<Complex64>;

/// Dense states and unitaries refuse larger systems.
pub const MAX_DENSE_MODES: usize = 8;
/// Single operator matrices go a little further.
pub const MAX_DENSE_OPERATOR_MODES: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_size(n: usize) -> Result<()> {
    check_limit(n, MAX_DENSE_MODES)
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n == 0 || n > limit {
        return Err(Error::SizeLimit { n, limit });
    }
    Ok(())
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Density operator on `n` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    pub n: usize,
    pub rho: CMatrix,
}

impl DenseState {
    pub fn from_density(n: usize, rho: CMatrix) -> Result<Self> {
        check_size(n)?;
        let dim = 1usize << n;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "density matrix is {}x{}, expected {dim}x{dim}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let s = DenseState { n, rho };
        s.validate(1e-10)?;
        Ok(s)
    }

    /// Pure state from amplitudes; the vector must have unit norm.
    pub fn from_amplitudes(n: usize, amps: &[Complex64]) -> Result<Self> {
        check_size(n)?;
        if amps.len() != 1 << n {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes given for {} basis states",
                amps.len(),
                1usize << n
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("state norm² is {norm}, expected 1")));
        }
        let v = nalgebra::DVector::from_column_slice(amps);
        Ok(DenseState { n, rho: &v * v.adjoint() })
    }

    pub fn basis_state(n: usize, bits: u64) -> Result<Self> {
        check_size(n)?;
        if bits >> n != 0 {
            return Err(Error::InvalidArgument(format!("basis index {bits} exceeds {n} qubits")));
        }
        let dim = 1usize << n;
        let mut rho = CMatrix::zeros(dim, dim);
        rho[(bits as usize, bits as usize)] = ONE;
        Ok(DenseState { n, rho })
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Hermitian, unit trace and positive semidefinite within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let herm = max_abs(&(&self.rho - self.rho.adjoint()));
        if herm > tol {
            return Err(Error::InvalidArgument(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = self.rho.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidArgument(format!("density matrix trace is {tr}")));
        }
        let eig = self.rho.clone().symmetric_eigenvalues();
        let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -tol {
            return Err(Error::InvalidArgument(format!("density matrix has eigenvalue {min:e}")));
        }
        Ok(())
    }
}

/// Inputs accepted by [`reference_state`].
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    /// Mode occupations, mode 0 first.
    Fock(Vec<u8>),
    MaximallyMixed,
    GroundStateOf(ObservableDecomposition),
    /// Full-rank Ginibre state from the given seed.
    RandomMixed(u64),
}

pub fn reference_state(n: usize, spec: &StateSpec, m: &Mapping) -> Result<DenseState> {
    check_size(n)?;
    if m.n() != n {
        return Err(Error::ModeMismatch { expected: n, found: m.n() });
    }
    let dim = 1usize << n;
    match spec {
        StateSpec::Fock(occ) => {
            if occ.len() != n || occ.iter().any(|&o| o > 1) {
                return Err(Error::InvalidArgument(format!("Fock occupations must be {n} values in {{0,1}}")));
            }
            let bits = occ.iter().enumerate().fold(0u64, |b, (p, &o)| b | (o as u64) << p);
            DenseState::basis_state(n, m.encode_occupation(bits))
        }
        StateSpec::MaximallyMixed => {
            let rho = CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
            Ok(DenseState { n, rho })
        }
        StateSpec::GroundStateOf(h) => {
            if h.n != n {
                return Err(Error::ModeMismatch { expected: n, found: h.n });
            }
            let eig = observable_dense(h, m)?.symmetric_eigen();
            let (imin, _) =
                eig.eigenvalues
                    .iter()
                    .enumerate()
                    .fold((0, f64::INFINITY), |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc });
            let v = eig.eigenvectors.column(imin).into_owned();
            Ok(DenseState { n, rho: &v * v.adjoint() })
        }
        StateSpec::RandomMixed(seed) => {
            let mut rng = substream(*seed, Domain::State, n as u64);
            let g = CMatrix::from_fn(dim, dim, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let mut rho = &g * g.adjoint();
            let tr = rho.trace();
            rho /= tr;
            // exact Hermitian symmetrization against rounding
            let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
            Ok(DenseState { n, rho })
        }
    }
}

/// Dense matrix of `γ_idx` in the mapping's qubit picture.
pub fn gamma_dense(idx: usize, m: &Mapping) -> Result<CMatrix> {
    check_limit(m.n(), MAX_DENSE_OPERATOR_MODES)?;
    if idx >= 2 * m.n() {
        return Err(Error::InvalidArgument(format!("γ_{idx} out of range for n = {}", m.n())));
    }
    Ok(m.gamma(idx).to_dense())
}

pub fn majorana_dense(mu: &MajoranaIndex, m: &Mapping) -> Result<CMatrix> {
    check_limit(m.n(), MAX_DENSE_OPERATOR_MODES)?;
    Ok(m.to_pauli(mu)?.to_dense())
}

pub fn observable_dense(h: &ObservableDecomposition, m: &Mapping) -> Result<CMatrix> {
    check_size(h.n)?;
    let dim = 1usize << h.n;
    let mut out = CMatrix::identity(dim, dim) * Complex64::new(h.identity, 0.0);
    for (mu, c) in &h.coefficients {
        out += m.to_pauli(mu)?.to_dense() * Complex64::new(*c, 0.0);
    }
    Ok(out)
}

/// `P · M` for a Pauli string `P`, in `O(dim²)`.
pub fn pauli_left_mul(p: &PauliString, mat: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(mat.nrows(), mat.ncols());
    for b in 0..mat.nrows() {
        let (c, to) = p.apply_to_basis(b as u64);
        let c = c.to_complex();
        for col in 0..mat.ncols() {
            out[(to as usize, col)] = c * mat[(b, col)];
        }
    }
    out
}

/// Unitary `U` with `U γ_j U† = γ_{π(j)}` for every wire `j`.
///
/// Each adjacent transposition `(a, a+1)` of the odd–even network is the gate
/// `exp(π/4 · γ_a γ_{a+1}) = (I + γ_a γ_{a+1})/√2`, which sends `γ_a → −γ_{a+1}`
/// and `γ_{a+1} → γ_a`. The accumulated signs come in an even number and are
/// removed by the monomial `Π_{m ∈ S} γ_m` over the negated output wires.
pub fn build_setting_unitary(setting: &PermSetting, m: &Mapping) -> Result<CMatrix> {
    let n = setting.n();
    check_size(n)?;
    if m.n() != n {
        return Err(Error::ModeMismatch { expected: n, found: m.n() });
    }
    let dim = 1usize << n;
    let net = decompose_transpositions(setting.images());
    let mut u = CMatrix::identity(dim, dim);
    // where γ_j currently sits, and with which sign
    let mut wire: Vec<usize> = (0..2 * n).collect();
    let mut negative = vec![false; 2 * n];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for a in net.gates() {
        let pair = m.gamma(a).mul(m.gamma(a + 1));
        u = (&u + pauli_left_mul(&pair, &u)) * Complex64::new(s, 0.0);
        for j in 0..2 * n {
            if wire[j] == a {
                wire[j] = a + 1;
                negative[j] = !negative[j];
            } else if wire[j] == a + 1 {
                wire[j] = a;
            }
        }
    }
    debug_assert_eq!(wire, setting.images());
    let mut flip: Vec<usize> = (0..2 * n).filter(|&j| negative[j]).map(|j| wire[j]).collect();
    debug_assert!(flip.len().is_multiple_of(2));
    flip.sort_unstable();
    let mut fix = PauliString::identity(n);
    for w in flip {
        fix = fix.mul(m.gamma(w));
    }
    Ok(pauli_left_mul(&fix, &u))
}

fn single_qubit_rotation(letter: Letter) -> Option<[[Complex64; 2]; 2]> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match letter {
        Letter::Z | Letter::I => None,
        // H
        Letter::X => {
            Some([[Complex64::new(h, 0.0), Complex64::new(h, 0.0)], [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)]])
        }
        // H S†
        Letter::Y => {
            Some([[Complex64::new(h, 0.0), Complex64::new(0.0, -h)], [Complex64::new(h, 0.0), Complex64::new(0.0, h)]])
        }
    }
}

/// Applies a single-qubit gate to qubit `q` from the left.
fn apply_1q_left(mat: &mut CMatrix, q: usize, g: &[[Complex64; 2]; 2]) {
    let bit = 1usize << q;
    for b0 in 0..mat.nrows() {
        if b0 & bit != 0 {
            continue;
        }
        let b1 = b0 | bit;
        for col in 0..mat.ncols() {
            let (x0, x1) = (mat[(b0, col)], mat[(b1, col)]);
            mat[(b0, col)] = g[0][0] * x0 + g[0][1] * x1;
            mat[(b1, col)] = g[1][0] * x0 + g[1][1] * x1;
        }
    }
}

/// Full pre-measurement unitary: the wire permutation, followed for NC
/// settings by rotating each qubit's basis letter onto `Z`.
pub fn setting_unitary(setting: &Setting, m: &Mapping) -> Result<CMatrix> {
    match setting {
        Setting::Fgu(q) => build_setting_unitary(q, m),
        Setting::Nc(s) => nc_unitary(s, m),
    }
}

fn nc_unitary(s: &NCSetting, m: &Mapping) -> Result<CMatrix> {
    let mut u = build_setting_unitary(&s.wire_permutation(), m)?;
    for (q, &l) in s.basis().iter().enumerate() {
        if let Some(g) = single_qubit_rotation(l) {
            apply_1q_left(&mut u, q, &g);
        }
    }
    Ok(u)
}

/// Diagonal of `U ρ U†` given the unitary.
pub fn outcome_distribution_for_unitary(state: &DenseState, u: &CMatrix) -> Vec<f64> {
    let ur = u * &state.rho;
    (0..state.dim())
        .map(|z| {
            let mut acc = ZERO;
            for a in 0..state.dim() {
                acc += ur[(z, a)] * u[(z, a)].conj();
            }
            acc.re.max(0.0)
        })
        .collect()
}

/// `Pr[z] = ⟨z|U ρ U†|z⟩` for the setting's unitary.
pub fn outcome_distribution(state: &DenseState, setting: &Setting, m: &Mapping) -> Result<Vec<f64>> {
    if setting.n() != state.n {
        return Err(Error::ModeMismatch { expected: state.n, found: setting.n() });
    }
    let u = setting_unitary(setting, m)?;
    Ok(outcome_distribution_for_unitary(state, &u))
}

/// Same distribution via `2^{-n} (1 + Σ_{σ ∈ D} sign · ⟨z|Γ_σ|z⟩ · g_τ)` over
/// the diagonal preimages, from Majorana expectations `g` of degree ≤ `2n`.
pub fn outcome_distribution_from_expectations(
    g: &BTreeMap<MajoranaIndex, f64>,
    setting: &PermSetting,
    m: &Mapping,
) -> Result<Vec<f64>> {
    let n = setting.n();
    let dim = 1usize << n;
    let inv = setting.inverse();
    let mut p = vec![1.0; dim];
    for k in 1..=n {
        for sigma in m.diagonal_set(k)? {
            let (_, tau) = inv.act_on_tuple(&sigma);
            let (sign, _) = setting.act_on_tuple(&tau);
            let gt = *g.get(&tau).ok_or_else(|| Error::MissingEstimate(tau.to_string()))?;
            for (z, pz) in p.iter_mut().enumerate() {
                *pz += sign as f64 * m.diag_matrix_element(&sigma, z as u64)? as f64 * gt;
            }
        }
    }
    Ok(p.into_iter().map(|x| x / dim as f64).collect())
}

/// Inverse-CDF draw from a probability vector.
pub fn sample_outcome<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> u64 {
    let total: f64 = probs.iter().sum();
    let x = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if x < acc {
            return i as u64;
        }
    }
    // rounding: fall back to the last outcome with positive weight
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u64
}

/// `tr(P ρ)`.
pub fn pauli_expectation(state: &DenseState, p: &PauliString) -> Complex64 {
    let mut acc = ZERO;
    for b in 0..state.dim() {
        let (c, to) = p.apply_to_basis(b as u64);
        acc += c.to_complex() * state.rho[(b, to as usize)];
    }
    acc
}

/// `g_μ = tr(Γ_μ ρ)` for all even degrees `2..=max_degree`.
pub fn exact_majorana_expectations(
    state: &DenseState,
    max_degree: usize,
    m: &Mapping,
) -> Result<BTreeMap<MajoranaIndex, f64>> {
    check_size(state.n)?;
    if m.n() != state.n {
        return Err(Error::ModeMismatch { expected: state.n, found: m.n() });
    }
    let mut out = BTreeMap::new();
    for d in (2..=max_degree.min(2 * state.n)).step_by(2) {
        for mu in MajoranaIndex::all_of_degree(state.n, d) {
            out.insert(mu, pauli_expectation(state, &m.to_pauli_unchecked(&mu)).re);
        }
    }
    Ok(out)
}

/// `tr(O ρ)` for an observable.
pub fn exact_expectation(state: &DenseState, h: &ObservableDecomposition, m: &Mapping) -> Result<f64> {
    let mut acc = h.identity;
    for (mu, c) in &h.coefficients {
        acc += c * pauli_expectation(state, &m.to_pauli(mu)?).re;
    }
    Ok(acc)
}

/// Action of one ladder operator on a basis state. Both Majorana images of a
/// mode flip the same qubits, so the result is a single basis state.
fn ladder_on_basis(op: Ladder, b: u64, m: &Mapping) -> (Complex64, u64) {
    let (c0, t0) = m.gamma(2 * op.mode).apply_to_basis(b);
    let (c1, t1) = m.gamma(2 * op.mode + 1).apply_to_basis(b);
    debug_assert_eq!(t0, t1);
    let i_half = if op.dagger { Complex64::new(0.0, -0.5) } else { Complex64::new(0.0, 0.5) };
    (c0.to_complex() * 0.5 + c1.to_complex() * i_half, t0)
}

/// `tr(T ρ)` for a ladder monomial, evaluated by applying `T` to each basis state.
pub fn ladder_expectation(state: &DenseState, term: &FermionTerm, m: &Mapping) -> Complex64 {
    let mut acc = ZERO;
    for b in 0..state.dim() as u64 {
        let mut c = term.coefficient;
        let mut cur = b;
        for op in term.ops.iter().rev() {
            let (f, to) = ladder_on_basis(*op, cur, m);
            c *= f;
            cur = to;
            if c == ZERO {
                break;
            }
        }
        if c != ZERO {
            // T|b⟩ = c|cur⟩ contributes c·⟨b|ρ|cur⟩
            acc += c * state.rho[(b as usize, cur as usize)];
        }
    }
    acc
}

/// Reference k-RDM from direct ladder-operator traces.
pub fn exact_rdm(state: &DenseState, k: usize, m: &Mapping) -> Result<RDMTensor> {
    check_size(state.n)?;
    if m.n() != state.n {
        return Err(Error::ModeMismatch { expected: state.n, found: m.n() });
    }
    let mut rdm = RDMTensor::zeros(state.n, k)?;
    let tuples = rdm.tuples();
    for (rp, p) in tuples.iter().enumerate() {
        for (rq, q) in tuples.iter().enumerate() {
            let v = ladder_expectation(state, &FermionTerm::rdm_element(p, q), m);
            rdm.set(rp, rq, v);
        }
    }
    Ok(rdm)
}

/// Draws `shots` outcomes for a setting from substream `index` of `seed`.
pub fn simulate_shots(
    state: &DenseState,
    setting: &Setting,
    m: &Mapping,
    shots: usize,
    seed: u64,
    index: u64,
) -> Result<Vec<u64>> {
    let probs = outcome_distribution(state, setting, m)?;
    let mut rng = substream(seed, Domain::Outcomes, index);
    Ok((0..shots).map(|_| sample_outcome(&probs, &mut rng)).collect())
}
