pub mod error;
pub mod quantale;
pub mod vcat;
pub mod vmod;
pub mod squares;
pub mod endo;
pub mod lifting;
pub mod coalg;
pub mod gen;

pub use error::{Error, Result};
pub use quantale::{QValue, Quantale, QuantaleKind};
pub use vcat::{functor_le, Limits, VCat, VFunctor};

/// The guide in `book/` and the README are compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/quantales.md")]
    mod quantales {}
    #[doc = include_str!("../../../book/src/categories.md")]
    mod categories {}
    #[doc = include_str!("../../../book/src/modules.md")]
    mod modules {}
    #[doc = include_str!("../../../book/src/squares.md")]
    mod squares {}
    #[doc = include_str!("../../../book/src/functors.md")]
    mod functors {}
    #[doc = include_str!("../../../book/src/lifting.md")]
    mod lifting {}
    #[doc = include_str!("../../../book/src/coalgebras.md")]
    mod coalgebras {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
