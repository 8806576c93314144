//! Reversible circuit synthesis for small hash functions.
//!
//! The pipeline reads a function table (`.pla`), converts it to an
//! exclusive-or sum of products, optionally shrinks that cover, and maps each
//! product onto a multi-controlled Toffoli gate over `n` input lines and `m`
//! zero-initialised output lines. Because every gate is an involution, running
//! the gate list backwards undoes the computation; [`invert`] uses the same
//! structure to recover preimages of a target output.
//!
//! ```
//! use revhash_core::{esop, pla, sim, synth, Bits};
//!
//! let doc = pla::parse_pla(".i 2\n.o 1\n0- 0\n-0 0\n11 1\n.e\n").unwrap();
//! let cover = esop::from_pla(&doc.function, &Default::default()).unwrap();
//! let circuit = synth::synthesize(&cover);
//! assert_eq!(circuit.gates.len(), 1);
//!
//! let y = sim::evaluate(&circuit, &"11".parse::<Bits>().unwrap()).unwrap();
//! assert_eq!(y.to_string(), "1");
//! ```

pub mod analyze;
pub mod bits;
pub mod circuit_io;
pub mod corpus;
pub mod error;
pub mod esop;
pub mod invert;
pub mod pla;
pub mod sim;
pub mod synth;

pub use bits::Bits;
pub use error::{Error, Result};
pub use esop::{CoverCost, EsopCover};
pub use invert::{PartialAssignment, PreimageResult};
pub use pla::{Cube, Literal, PlaFunction, Semantics};
pub use sim::{State, VerifyReport};
pub use synth::{Circuit, Gate};

use serde::{Deserialize, Serialize};

/// Size budgets for exhaustive and expanding operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest input arity enumerated exhaustively (truth tables, brute force).
    pub max_inputs: usize,
    /// Largest circuit width whose full state space is swept by identity checks.
    pub max_width: usize,
    /// Largest cube list produced by expansion or disjoint conversion.
    pub max_cubes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_inputs: 24,
            max_width: 20,
            max_cubes: 1 << 24,
        }
    }
}

impl Limits {
    pub fn check_inputs(&self, n: usize) -> Result<()> {
        if n > self.max_inputs || n > 63 {
            return Err(Error::Resource(format!(
                "{n} inputs exceed the exhaustive limit of {}",
                self.max_inputs.min(63)
            )));
        }
        Ok(())
    }

    pub fn check_width(&self, width: usize) -> Result<()> {
        if width > self.max_width || width > 63 {
            return Err(Error::Resource(format!(
                "width {width} exceeds the exhaustive state limit of {}",
                self.max_width.min(63)
            )));
        }
        Ok(())
    }
}
