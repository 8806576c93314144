//! Shared fixtures for the criterion benchmarks in `benches/`.

use revhash_core::esop::{self, Effort};
use revhash_core::{corpus, Circuit, EsopCover, Limits, PlaFunction};

/// A corpus function at each pipeline stage.
pub struct Fixture {
    pub function: PlaFunction,
    pub cover: EsopCover,
    pub minimized: EsopCover,
    pub circuit: Circuit,
}

/// Prepare the named corpus function. Panics on unknown names.
pub fn fixture(name: &str) -> Fixture {
    let function = corpus::benchmark(name)
        .unwrap_or_else(|| panic!("no corpus function {name}"))
        .function();
    let cover = esop::from_pla(&function, &Limits::default()).expect("corpus fits the limits");
    let minimized = esop::minimize(&cover, Effort::default());
    let circuit = revhash_core::synth::synthesize(&minimized);
    Fixture {
        function,
        cover,
        minimized,
        circuit,
    }
}
