//! Divide-and-conquer synthesis of large planar phased arrays clustered into
//! domino-shaped sub-arrays.
//!
//! The crate is organised bottom-up:
//!
//! * [`aperture`]: pixel lattice, checkerboard colouring, boundary heights and
//!   raster partitions of the aperture;
//! * [`tiling`]: domino tilings, height functions, exhaustive enumeration and
//!   tileability;
//! * [`radiation`]: excitations, far-field patterns on a `(u, v)` lattice,
//!   masks, the mask-matching cost and pattern metrics;
//! * [`synthesis`]: the enumerative and genetic partition optimisers and the
//!   divide-and-conquer driver;
//! * [`io`]: CSV import/export of tilings, excitations and results.

pub mod aperture;
pub mod error;
pub mod io;
pub mod radiation;
pub mod synthesis;
pub mod tiling;

pub use error::{Error, Result};
