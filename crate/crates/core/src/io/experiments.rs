//! Experiment files shipped with the crate (see `experiments/`).

/// Source, three Stern-Gerlach devices (S_z, S_x, S_z), three cameras and a battery.
pub const HEATING_DEMO: &str = include_str!("../../experiments/heating_demo.sgx");

/// `HEATING_DEMO` with the S_x device removed.
pub const HEATING_DEMO_NO_B: &str = include_str!("../../experiments/heating_demo_no_B.sgx");

/// `HEATING_DEMO` with the x+ beam sent through a second S_z device into a second battery.
pub const HEATING_DEMO_FULL_BATTERY: &str = include_str!("../../experiments/heating_demo_full_battery.sgx");

/// An |x+> beam drifting in the field before an S_x measurement.
pub const DRIFT_DEMO: &str = include_str!("../../experiments/drift_demo.sgx");

pub const ALL: [(&str, &str); 4] = [
    ("heating_demo", HEATING_DEMO),
    ("heating_demo_no_B", HEATING_DEMO_NO_B),
    ("heating_demo_full_battery", HEATING_DEMO_FULL_BATTERY),
    ("drift_demo", DRIFT_DEMO),
];
