//! Two-channel critically-sampled spline graph filter bank with spectral
//! sampling, for arbitrary undirected graphs.
//!
//! - [`graph`]: graphs, Laplacians, sampling sets and Kron reduction
//! - [`generators`]: seeded sensor and community graph generators
//! - [`spectral`]: eigenbases and the graph Fourier transform
//! - [`filterbank`]: kernel design, perfect-reconstruction check, analysis
//!   and closed-form synthesis, plus the vertex-sampling reference bank
//! - [`experiments`]: nonlinear approximation and Monte-Carlo denoising
//! - [`io`]: plain-text file formats

pub mod error;
pub mod experiments;
pub mod filterbank;
pub mod generators;
pub mod graph;
pub mod io;
pub mod spectral;

pub use error::{Error, Result};
pub use filterbank::{SpectralFilterBank, SubbandCoefficients};
pub use graph::{Graph, LaplacianKind, LaplacianMatrix, VertexSet};
pub use spectral::{SpectralBasis, SpectralSignal};
