//! Ultrametric wavelet analysis on finite measured ball trees and their products.
//!
//! - [`tree`]: ball trees, `sup`, regular subtrees
//! - [`wavelets`]: orthonormal wavelet bases, analysis and synthesis
//! - [`pdo`]: operator symbols, eigenvalues and the dense kernel operator
//! - [`product`]: product hypergraphs, multiwavelets, polynomial operators
//! - [`distributions`]: generalized functions as wavelet series
//! - [`cauchy`]: characteristics and the Cauchy problem solver
//! - [`io`]: JSON file formats used by the command-line tool

pub mod cauchy;
pub mod distributions;
pub mod error;
pub mod io;
mod par;
pub mod pdo;
pub mod product;
pub mod tree;
pub mod wavelets;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use par::is_parallel;
