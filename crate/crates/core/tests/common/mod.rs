//! Helpers shared by the integration tests.
#![allow(dead_code)]

pub mod classgen;
pub mod criteria;
pub mod gen;
pub mod golden;
pub mod listings;
pub mod tpeval;

use fungo_core::backend::Session;
use fungo_core::codegen::AdaptationTable;
use fungo_core::parser;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR")))
        .unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn session(src: &str) -> Session {
    let p = parser::parse_program(src).unwrap_or_else(|ds| {
        let msgs: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
        panic!("{}\n---\n{src}", msgs.join("\n"))
    });
    Session::new(p, AdaptationTable::standard()).unwrap_or_else(|e| panic!("{e}\n---\n{src}"))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
