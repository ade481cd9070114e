//! Switch graphs under the train and ball semantics, logarithmic-size
//! counter gadgets, and reductions from Digicomp to ARRIVAL and from DAG
//! path counting to Digicomp.

pub mod arrival;
pub mod dag;
pub mod digicomp;
pub mod dot;
pub mod format;
pub mod gadgets;
pub mod generate;
pub mod model;
pub mod reductions;
pub mod verify;

mod topo;

pub use arrival::{run_arrival, step, trace_arrival, ArrivalError, Detector, RunOutcome, Verdict};
pub use dag::DagInstance;
pub use digicomp::{parity_diagnostic, run_digicomp_fast, run_digicomp_naive, BallCounts, DigicompOutcome};
pub use dot::{export_dot, DotMark};
pub use format::{parse_any, parse_instance, FormatError, Instance, InstanceKind};
pub use gadgets::{build_ball_counter, build_train_counter, counter_exit_trace, CounterGadget, CounterKind, Port};
pub use model::{ArrivalInstance, Configuration, DigicompInstance, ModelError, SwitchGraph, SwitchStates, VertexId};
pub use reductions::{
    layer_dag, reduce_dagpaths_to_digicomp, reduce_digicomp_to_arrival, split_outdegree, ReductionCertificate, Role,
};
