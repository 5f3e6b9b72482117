//! Fractal analysis of polylines through recursive bend hierarchies.
//!
//! A curve is decomposed into bends (three-vertex features found by a
//! Douglas-Peucker style recursion), the bend sizes are classified with
//! head/tail breaks, and the number of recurring "far more small than large"
//! levels is reported as the ht-index. Power-law fitting of the bend sizes and
//! box-counting dimension of the curve are provided as classical cross-checks.
//!
//! ```
//! use bendscale::{bends, geometry, headtail};
//!
//! let curve = geometry::gen_half_circle(250, 1.0).unwrap();
//! let decomposition = bends::decompose(&curve).unwrap();
//! let sizes = bends::bend_sizes(&decomposition, true);
//! let ht = headtail::ht_index(&sizes).unwrap();
//! assert!(ht >= 3);
//! ```

pub mod analysis;
pub mod bends;
pub mod boxcount;
pub mod error;
pub mod geometry;
pub mod headtail;
pub mod io;
pub mod json;
pub mod par;
pub mod plot;
pub mod powerlaw;
mod quadrature;
pub mod rng;

pub use error::{Error, Result};
pub use geometry::{Point, Polyline};
