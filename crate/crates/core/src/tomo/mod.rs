//! Desk-scale tomography bench: parallel-beam Radon matrix, piecewise-constant
//! phantoms, orthonormal Haar wavelets and Gaussian noise.

mod grid;
pub mod io;
mod noise;
mod phantom;
mod radon;
mod wavelet;

pub use grid::{ImageGrid, Sinogram};
pub use noise::add_noise;
pub use phantom::{blocks_phantom, shepp_phantom, Phantom, BLOCKS_VALUES};
pub use radon::{build_radon, radon_angles, radon_offsets, trace_ray, RadonGeometry};
pub use wavelet::{
    wavelet_inverse, wavelet_inverse_2d, wavelet_transform, wavelet_transform_2d, WaveletSynthesis,
};
