//! The fast examples, run as tests.

mod constants_report {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/constants_report.rs"));
}
mod gauss_sums {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/gauss_sums.rs"));
}
mod farey_arcs {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/farey_arcs.rs"));
}
mod singular_series {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/singular_series.rs"));
}
mod exceptional_set {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/exceptional_set.rs"));
}
mod mean_values {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/mean_values.rs"));
}
mod weyl_sums_parseval {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/weyl_sums_parseval.rs"));
}
mod main_term_compare {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/main_term_compare.rs"));
}

#[test]
fn constants_report_passes() {
    assert!(constants_report::run().unwrap());
}

#[test]
fn gauss_sums_runs() {
    gauss_sums::run().unwrap();
}

#[test]
fn farey_arcs_runs() {
    farey_arcs::run().unwrap();
}

#[test]
fn singular_series_runs() {
    singular_series::run().unwrap();
}

#[test]
fn exceptional_set_runs() {
    exceptional_set::run(20_000).unwrap();
}

#[test]
fn mean_values_runs() {
    mean_values::run().unwrap();
}

#[test]
fn weyl_sums_runs() {
    weyl_sums_parseval::run(10_000).unwrap();
}

#[test]
fn main_term_compare_runs() {
    main_term_compare::run(40_000, 20).unwrap();
}
