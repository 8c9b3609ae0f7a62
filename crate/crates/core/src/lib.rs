//! Classical-shadow tomography of fermionic reduced density matrices.
//!
//! Two measurement ensembles are supported: fermionic Gaussian Clifford
//! unitaries (even permutations of the `2n` Majorana wires) and
//! number-conserving mode permutations followed by single-qubit Pauli
//! measurements. A dense simulator for up to eight modes serves as the
//! reference oracle.

pub mod combinatorics;
pub mod error;
pub mod fermion;
pub mod fgu;
pub mod io;
pub mod majorana;
pub mod mapping;
pub mod nc;
pub mod observables;
pub mod pauli;
pub mod perm;
pub mod pipeline;
pub mod planner;
pub mod rng;
pub mod sim;
pub mod validate;

pub use error::{Error, Result};
pub use majorana::{MajoranaIndex, Phase};
pub use mapping::{Mapping, MappingKind};
pub use observables::{ObservableDecomposition, RDMTensor};
pub use pauli::{Letter, PauliString};
pub use perm::{NCSetting, PermSetting, Setting};
pub use planner::{CoveragePlan, Ensemble, Strategy};
pub use sim::DenseState;
