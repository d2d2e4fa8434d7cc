//! Experiment files and run reports.

pub mod experiments;
pub mod parser;
pub mod report;
pub mod spec;

pub use parser::{parse_experiment, ParseError, ParseErrorKind};
pub use report::{render_report, state_label, ReportFormat};
pub use spec::{
    Builtin, Coefficient, DeviceDecl, ExperimentSpec, MatrixExpr, ObservableDecl, RouteDecl, StateDecl,
};
