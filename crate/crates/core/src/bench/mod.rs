//! Benchmarks on two linked five-qubit nodes: circuits, routing, noisy
//! execution, quantum volume and success-region scans.

mod circuit;
mod exec;
mod gap;
mod library;
mod qv;
mod routing;

pub use circuit::{apply_to_statevector, Circuit, Gate, GateKind, LOCAL_GATE_TIME};
pub use exec::{readout_distribution, run_noisy, simulate_noisy, BenchScore};
pub use gap::{
    analytic_boundary, best_link, gap_scan, link_frontier, log_space, AnalyticBoundary,
    FrontierPoint, GapGrid, SUCCESS_THRESHOLD,
};
pub use library::{
    adder, adder_layout, bernstein_vazirani, build_benchmark, ghz, haar_unitary, qft,
    qv_model_circuit, BENCHMARK_NAMES,
};
pub use qv::{heavy_output_probability, quantum_volume, QvResult, QvWidthResult, MIN_QV_TRIALS};
pub use routing::{route, route_with, CircuitStats, NodeTopology, RoutedCircuit, SwapPolicy};
