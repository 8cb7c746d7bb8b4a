//! Mittag-Leffler spectral solutions of fractional relaxation equations,
//! their Caputo residuals, and a fractional Adams integrator to compare with.

pub mod abm;
pub mod error;
pub mod fit;
pub mod grid;
pub mod io;
pub mod mittag_leffler;
pub mod problem;
pub mod quad;
pub mod residual;
pub mod special;
pub mod spectral;
pub mod sum;
pub mod trajectory;

pub use error::{Error, Result};

// the guide's snippets run as doctests
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub struct Intro;
    #[doc = include_str!("../../../book/src/mittag_leffler.md")]
    pub struct MittagLeffler;
    #[doc = include_str!("../../../book/src/spectral.md")]
    pub struct Spectral;
    #[doc = include_str!("../../../book/src/residual.md")]
    pub struct Residual;
    #[doc = include_str!("../../../book/src/integrator.md")]
    pub struct Integrator;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
