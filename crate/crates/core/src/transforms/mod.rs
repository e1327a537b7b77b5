//! Representation maps: Wigner, quasicharacteristic, Husimi, matrix elements,
//! off-diagonal Wigner transforms, twisted convolution and momentum marginals.

pub mod husimi;
pub mod offdiag;
pub mod wigner;

pub use husimi::{husimi, husimi_direct, matel, MatelSampler};
pub use offdiag::{
    offdiag_wigner, reference_wigner_at, standard_form, twisted_convolution, twisted_convolution_with,
    TwistedValue,
};
pub use wigner::{
    momentum_density, momentum_marginal, quasichar, quasichar_direct, quasichar_exact, wigner, wigner_at,
    wigner_complex, wigner_kernel_at, wigner_of_kernel,
};
