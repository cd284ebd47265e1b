//! Plus modular symbols of elliptic curves via Manin symbols for Gamma_0(N).

mod hecke;
mod linalg;
mod p1;
mod space;
mod symbol;

pub use hecke::heilbronn_cremona;
pub use p1::{gamma0_index, P1List};
pub use space::{build_space, ManinSymbolSpace, MAX_LEVEL};
pub use symbol::{
    isolate_symbol, isolate_with, normalize, plus_symbol, raw_value, IsolatedSymbol, PlusModularSymbol,
    CERT_TOLERANCE, SCALE_MAX_DEN,
};
