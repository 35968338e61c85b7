#![allow(dead_code)]

use nalgebra::DMatrix;
use qmeter_core::{BipartiteState, ChannelMatrix, Complex64, MeasurementDevice, PureState};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_vector(rng: &mut impl Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| gaussian_complex(rng)).collect()
}

pub fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> PureState {
    PureState::normalized(random_vector(rng, n)).unwrap()
}

pub fn random_bipartite(rng: &mut impl Rng, n: usize, m: usize) -> BipartiteState {
    let mut v = random_vector(rng, n * m);
    normalize(&mut v);
    BipartiteState::from_matrix(DMatrix::from_fn(n, m, |i, j| v[i * m + j])).unwrap()
}

/// Modified Gram-Schmidt on `count` Gaussian vectors of length `dim`.
pub fn gram_schmidt_columns(rng: &mut impl Rng, count: usize, dim: usize) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    while out.len() < count {
        let mut v = random_vector(rng, dim);
        for u in &out {
            let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= overlap * y);
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            out.push(v);
        }
    }
    out
}

pub fn random_device(rng: &mut impl Rng, n: usize, m: usize) -> (MeasurementDevice, Vec<Vec<Complex64>>) {
    let cols = gram_schmidt_columns(rng, n, n * m);
    (MeasurementDevice::from_unitary(n, m, &cols).unwrap(), cols)
}

pub fn random_simplex(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    // occasional exact zeros exercise the 0 log 0 convention
    let w: Vec<f64> = (0..len)
        .map(|_| if rng.random_bool(0.15) { 0.0 } else { rng.random::<f64>() })
        .collect();
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        let mut one = vec![0.0; len];
        one[rng.random_range(0..len)] = 1.0;
        return one;
    }
    w.into_iter().map(|x| x / total).collect()
}

pub fn random_channel(rng: &mut impl Rng, n: usize, m: usize) -> ChannelMatrix {
    ChannelMatrix::from_rows((0..n).map(|_| random_simplex(rng, m)).collect()).unwrap()
}

/// Pointer distribution from the full `n*m` output vector `U (alpha)` of the
/// isometry, summed over the system index.
pub fn composite_oracle(cols: &[Vec<Complex64>], alpha: &[Complex64], n: usize, m: usize) -> Vec<f64> {
    let out: Vec<Complex64> = (0..n * m)
        .map(|row| cols.iter().zip(alpha).map(|(c, a)| c[row] * a).sum())
        .collect();
    (0..m)
        .map(|j| (0..n).map(|i| out[i * m + j].norm_sqr()).sum())
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn bsc_device(q: f64) -> MeasurementDevice {
    qmeter_core::device::showcase::symmetric_imperfect(q).unwrap()
}
