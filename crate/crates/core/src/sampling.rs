//! Random targets and channels for property sweeps.
//!
//! Targets are drawn Haar-uniformly (normalized complex Gaussian vectors);
//! channels come from Frobenius-normalized Ginibre matrices, optionally with
//! a forced Schmidt rank.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{ChannelState, TargetState};
use crate::error::{Error, Result};

fn gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-uniform random pure target of dimension `d`.
pub fn random_target<R: Rng>(d: usize, rng: &mut R) -> Result<TargetState> {
    if !(2..=32).contains(&d) {
        return Err(Error::BadDimension(d));
    }
    loop {
        let raw: Vec<Complex64> = (0..d).map(|_| gaussian(rng)).collect();
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return TargetState::new(raw.iter().map(|a| a / norm).collect());
        }
    }
}

/// Random channel with full-support Ginibre coefficients (almost surely of
/// full Schmidt rank).
pub fn random_channel<R: Rng>(d: usize, rng: &mut R) -> Result<ChannelState> {
    if !(2..=32).contains(&d) {
        return Err(Error::BadDimension(d));
    }
    loop {
        let m = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
        let norm = m.norm();
        if norm > 1e-6 {
            return ChannelState::new(m / Complex64::new(norm, 0.0));
        }
    }
}

/// Random channel whose coefficient matrix has rank exactly `rank`
/// (almost surely), built as a product of d×rank Ginibre factors. A rank of
/// 1 gives a product channel.
pub fn random_channel_of_rank<R: Rng>(d: usize, rank: usize, rng: &mut R) -> Result<ChannelState> {
    if !(2..=32).contains(&d) {
        return Err(Error::BadDimension(d));
    }
    if rank == 0 || rank > d {
        return Err(Error::IndexOutOfRange {
            index: rank,
            count: d,
        });
    }
    loop {
        let a = DMatrix::from_fn(d, rank, |_, _| gaussian(rng));
        let b = DMatrix::from_fn(d, rank, |_, _| gaussian(rng));
        let m = a * b.adjoint();
        let norm = m.norm();
        if norm > 1e-6 {
            return ChannelState::new(m / Complex64::new(norm, 0.0));
        }
    }
}
