//! Numerical substrate: log-domain reals, log-gamma, quadrature, root solving.

mod gamma;
mod logreal;
mod quadrature;
mod roots;

pub use gamma::log_gamma;
pub use logreal::LogScaledReal;
pub use quadrature::{
    integrate, integrate_semi_infinite, integrate_semi_infinite_scaled, Quadrature,
    QuadratureResult,
};
pub use roots::{solve_bracketed, solve_bracketed_newton};
