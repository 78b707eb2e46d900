//! Bordered sutured algebra over the two-element field: strands algebras of
//! arc diagrams, typed A-infinity modules, box tensor products, join maps
//! and the homology block reconstruction.

pub mod ainf;
pub mod checks;
pub mod arc_diagram;
pub mod conventions;
pub mod error;
pub mod gf2;
pub mod join;
pub mod models;
pub mod nice;
pub mod report;
pub mod sfh;
pub mod strands;
pub mod tensor;

pub use arc_diagram::{ArcDiagram, Kind, Layout, PairSet, SurfaceStats, Violation};
pub use error::{Error, Result};
pub use gf2::{ChainComplexGf2, Gf2Matrix, Gf2Vector, Homology};
pub use strands::{ABasisElem, AlgebraModel};
