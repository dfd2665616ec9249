//! Runs the quick examples so they cannot rot.

#[path = "../examples/benchmark_desk.rs"]
mod benchmark_desk;
#[path = "../examples/gate_and_unit.rs"]
mod gate_and_unit;
#[path = "../examples/gradient_check.rs"]
mod gradient_check;
#[path = "../examples/lstar_roundtrip.rs"]
mod lstar_roundtrip;
#[path = "../examples/parameter_counts.rs"]
mod parameter_counts;
#[path = "../examples/pjm_windows.rs"]
mod pjm_windows;
#[path = "../examples/train_and_checkpoint.rs"]
mod train_and_checkpoint;

#[test]
fn parameter_counts_runs() {
    parameter_counts::run_example().unwrap();
}

#[test]
fn gate_and_unit_runs() {
    gate_and_unit::run_example().unwrap();
}

#[test]
fn gradient_check_runs() {
    gradient_check::run_example().unwrap();
}

#[test]
fn lstar_roundtrip_runs() {
    lstar_roundtrip::run_example().unwrap();
}

#[test]
fn pjm_windows_runs() {
    pjm_windows::run_example().unwrap();
}

#[test]
fn train_and_checkpoint_runs() {
    train_and_checkpoint::run_example().unwrap();
}

#[test]
fn benchmark_desk_runs() {
    benchmark_desk::run_example(Vec::new()).unwrap();
}
