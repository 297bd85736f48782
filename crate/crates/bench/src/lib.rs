//! Inputs shared by the benchmarks in `benches/`.

use lesionseg::grabcut::FlowNetwork;
use lesionseg::synth::{fixture_set, LesionFixture};

/// A 4-connected `width x height` grid whose left half leans to the source
/// and right half to the sink, with capacities from a fixed LCG.
pub fn grid_network(width: usize, height: usize) -> FlowNetwork {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = move || {
        state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
        (state >> 33) as f64 / (1u64 << 31) as f64
    };
    let mut net = FlowNetwork::with_edge_capacity(width * height, 2 * width * height);
    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            let lean = if x < width / 2 { 1.0 } else { 0.0 };
            net.set_terminals(i, 10.0 * next() * (0.5 + lean), 10.0 * next() * (1.5 - lean));
            if x + 1 < width {
                net.add_edge(i, i + 1, 5.0 * next());
            }
            if y + 1 < height {
                net.add_edge(i, i + width, 5.0 * next());
            }
        }
    }
    net
}

pub fn fixture(size: usize) -> LesionFixture {
    fixture_set(2, size, 42).swap_remove(1)
}
