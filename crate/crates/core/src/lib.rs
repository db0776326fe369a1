//! Polynomial filters of commuting graph shifts and iterative inverse
//! filtering by Chebyshev interpolation of the reciprocal filter response.

pub mod cube;
pub mod denoise;
pub mod distributed;
pub mod error;
pub mod filter;
pub mod graph;
pub mod poly;
pub mod shift;
pub mod solve;

pub use cube::{Cube, Interval};
pub use error::{Error, Result};
pub use graph::{build_circulant, build_knn, build_path, Graph};
pub use poly::{chebyshev_nodes, chebyshev_series_reciprocal, interpolate_reciprocal, sup_error, MultiPoly};
pub use shift::{check_commute, kron_pair, sym_normalized_laplacian, Shift, SpectralMethod};
pub use filter::{apply_filter, FilterSpec, LinearOperator, ShiftFamily};
pub use solve::{arma_solve, cipa_solve, contraction_bound, cpa_solve, ogda_solve, relative_error, IterTrace, SolveOptions};
pub use distributed::{distribute, sim_apply_filter, sim_cipa, Network, RoundLedger, Which};
pub use denoise::{add_noise, denoise_sweep, snr, synth_dataset, tikhonov_filterspec, SpatioTemporalSignal};
