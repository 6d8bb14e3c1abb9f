//! Shared fixtures for the benchmarks.

use spl_core::{PrimeTables, RhoTable, Theta};

pub fn tables(limit: u64) -> PrimeTables {
    PrimeTables::build(limit).expect("sieve fits in memory")
}

pub fn rho_table() -> RhoTable {
    RhoTable::build(spl_core::dickman::DEFAULT_U_MAX, spl_core::dickman::DEFAULT_STEP).expect("default grid is valid")
}

pub fn theta(num: u64, den: u64) -> Theta {
    Theta::new(num, den).expect("0 < num/den < 1")
}
