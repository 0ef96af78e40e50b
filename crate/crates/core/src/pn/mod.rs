mod darboux;
mod eigen;
mod poisson;

pub use darboux::{build_dn_transform, sample_eigen, verify_dn};
pub use eigen::{decompose, eigen_analysis, eigenvalue_fields, EigenData, DISTINCT_GAP, RECONSTRUCTION_TOL};
pub use poisson::{
    fibre_hamiltonian_field, hamiltonian_vector_field, magri_morosi, magri_morosi_unchecked, pn_check, poisson_apply,
    poisson_bracket, PNReport, PoissonMap, Verdict,
};
