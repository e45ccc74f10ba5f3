pub mod error;
pub mod interaction;
pub mod riemann;
pub mod roots;
pub mod waves;
pub mod front;
pub mod functionals;
pub mod admissibility;
pub mod data;
pub mod tracker;
pub mod exact;
pub mod io;
