//! On-disk formats: binary field dumps, checkpoint directories, legacy VTK,
//! and the level-by-level run driver that writes them.

mod checkpoint;
mod field;
mod run;
mod vtk;

pub use checkpoint::{
    read_checkpoint, read_manifest, write_checkpoint, Manifest, CHECKPOINT_FORMAT,
};
pub use field::{read_field, write_field, FieldData, FIELD_MAGIC};
pub use run::{run_levels, LevelSummary, RunOptions, RunSummary};
pub use vtk::write_vtk;
