//! Distance-matrix Wasserstein (DMW) statistics for comparing finite metric
//! measure spaces.
pub mod base;
mod error;
pub mod estimators;
pub mod gw;
pub mod kernels;
pub mod ot;
pub mod spaces;
pub use error::{DmwError, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/spaces.md")]
    struct Spaces;
    #[doc = include_str!("../../../book/src/matrix-laws.md")]
    struct MatrixLaws;
    #[doc = include_str!("../../../book/src/transport.md")]
    struct Transport;
    #[doc = include_str!("../../../book/src/estimators.md")]
    struct Estimators;
    #[doc = include_str!("../../../book/src/gromov-wasserstein.md")]
    struct GromovWasserstein;
    #[doc = include_str!("../../../book/src/kernels.md")]
    struct Kernels;
    #[doc = include_str!("../../../book/src/experiments.md")]
    struct Experiments;
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    struct Reproducibility;
}
