//! Experiment harness: parameter sweeps written as CSV tables and SVG line
//! charts, plus the `sensor-aoi` command line.

pub mod cli;
pub mod grid;
pub mod output;
pub mod svg;
pub mod sweep;

pub use grid::Grid;
pub use output::{read_csv, write_csv, CSV_HEADER};
pub use svg::{render_svg, Column, Series};
pub use sweep::{run_sweep, ResultRow, SweepSpec, SweepVar};
