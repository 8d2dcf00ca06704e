//! Relative closeness of finite measures and mm-spaces: exact coupling
//! feasibility, Hall violators, W-infinity, certificates and net
//! discretization. Masses are exact rationals throughout.

mod certificate;
mod coupling;
mod flow;
mod prokhorov;
mod wasserstein;

pub use certificate::{
    admissible_pairs, certify_closeness, discretize, distortion_tolerance, seed_order, verify_certificate,
    CertificateCheck, Certification, ClosenessCertificate, CrossMetric,
};
pub use coupling::{coupling_feasibility, Coupling, Feasibility, FeasibilityProblem, HallViolator, Side};
pub use prokhorov::{relative_prokhorov_bruteforce, BRUTE_FORCE_LIMIT};
pub use wasserstein::linf_wasserstein;
