//! Stock-correlation networks built from normalized mutual information.
//!
//! The pipeline runs in a fixed order:
//!
//! 1. [`ingest`]: load closing prices, take log-returns, bin each series.
//! 2. [`infotheory`]: entropies and the pairwise NMI [`SimilarityMatrix`].
//! 3. [`filters`]: sparsify the complete NMI graph with the proportional
//!    degree (PD) filter or the planar maximally filtered graph (PMFG).
//! 4. [`graph`], [`clustering`], [`metrics`]: cliques, Louvain and normalized
//!    spectral clustering, adjusted Rand index, clique homogeneity.
//! 5. [`experiments`]: seeded studies that compare the two filters and write
//!    plot-ready output.

pub mod clustering;
pub mod error;
pub mod experiments;
pub mod filters;
pub mod graph;
pub mod infotheory;
pub mod ingest;
pub mod metrics;
pub(crate) mod numeric;

pub use error::{Error, Result};

pub use clustering::{EigenSpectrum, Partition};
pub use filters::{DegreeBudget, PdNetwork, StockWeights};
pub use graph::{Clique, Network};
pub use infotheory::SimilarityMatrix;
pub use ingest::{Binning, PriceMatrix, ReturnMatrix, SectorTable};
