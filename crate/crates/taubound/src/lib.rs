//! Computable lower bounds on the concurrence of multipartite mixed
//! quantum states, with comparison separability criteria and threshold
//! scanning.
//!
//! The bound aggregates, over every bipartition of the parties and every
//! pair of antisymmetric rotation generators on the two sides, a
//! Wootters-style spin-flip concurrence computed from the top four
//! eigenvalues of rho times its conjugated partner. It vanishes on fully
//! separable (and, on three qubits, on all PPT) states, equals the
//! squared pure-state concurrence on pure states, and detects the
//! entanglement of W/GHZ isotropic mixtures beyond sharp thresholds in
//! the mixing parameter.

pub mod analysis;
pub mod bounds;
pub mod criteria;
pub mod error;
pub mod partitions;
pub mod states;
pub mod tensor;

pub use analysis::{
    criteria_compare, distill_flag, threshold_scan, verify_suite, Detector, DistillReport,
    ScanResult, VerifyResult,
};
pub use bounds::{
    calibration_constant, lambda_spectrum, pair_concurrence, pure_concurrence, tau_2, tau_n,
    BoundReport, LambdaSpectrum, KAPPA,
};
pub use criteria::{
    correlation_tensor, kf_criterion, ppt_check, witness_expectation, CorrelationTensor,
    CriteriaReport,
};
pub use error::{Error, Result};
pub use partitions::{
    embed_pair_operator, enumerate_bipartitions, so_generator, Bipartition, GeneratorIndex,
    PairOperator,
};
pub use states::{
    haar_random_pure, isotropic_mix, load_state, load_state_from_path, make_bell, make_ghz,
    make_product, make_w, save_state, save_state_to_path, DensityMatrix, Family, PureState, State,
    StateFamily,
};
pub use tensor::{
    eig_real_spectrum, kron, partial_trace, partial_transpose, permute_subsystems, singular_values,
    CMatrix, CVector, DimList, C64,
};
