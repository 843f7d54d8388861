//! Ancilla input amplitudes and the QPE kernel `α(x)`.
//!
//! For an ancilla input `Σ_τ ψ_τ |τ⟩` the outcome amplitude at offset `x` is
//! `α(x) = N_q^{−1/2} Σ_τ ψ_τ e^{2πiτx/N_q}`; `|α|²` is periodic in `x` with period `N_q`.

use num_complex::Complex;

use crate::scalar::{cis, Real};

/// Number of bins `2^n_q`.
pub fn n_bins(n_q: usize) -> usize {
    1usize << n_q
}

/// `N_q^{−1/2}` on every basis state.
pub fn uniform_amplitudes<T: Real>(n_q: usize) -> Vec<T> {
    let n = n_bins(n_q);
    vec![T::one() / T::from_count(n).sqrt(); n]
}

/// `√(2/N_q) sin(π(τ + ½)/N_q)`.
pub fn epe_amplitudes<T: Real>(n_q: usize) -> Vec<T> {
    let n = T::from_count(n_bins(n_q));
    let s = (T::lit(2.0) / n).sqrt();
    (0..n_bins(n_q))
        .map(|t| s * (T::PI() * (T::from_count(t) + T::lit(0.5)) / n).sin())
        .collect()
}

/// `C_S(n_q, a) = √((1 − e^{−2a}) / (1 − e^{−2aN_q}))`.
pub fn slater_norm<T: Real>(n_q: usize, a: T) -> T {
    let n = T::from_count(n_bins(n_q));
    let two = T::lit(2.0);
    ((-two * a).exp_m1() / (-two * a * n).exp_m1()).sqrt()
}

/// `C_S e^{−aτ}`.
pub fn slater_amplitudes<T: Real>(n_q: usize, a: T) -> Vec<T> {
    let c = slater_norm(n_q, a);
    (0..n_bins(n_q))
        .map(|t| c * (-a * T::from_count(t)).exp())
        .collect()
}

/// Exact finite sum `N_q^{−1/2} Σ_τ ψ_τ e^{2πiτx/N_q}`.
pub fn alpha_from_amplitudes<T: Real>(amps: &[T], x: T) -> Complex<T> {
    let n = T::from_count(amps.len());
    let w = T::TAU() * x / n;
    let sum = amps
        .iter()
        .enumerate()
        .fold(Complex::new(T::zero(), T::zero()), |acc, (t, &a)| {
            acc + cis(w * T::from_count(t)) * a
        });
    sum / n.sqrt()
}

pub fn alpha_uniform<T: Real>(x: T, n_q: usize) -> Complex<T> {
    alpha_from_amplitudes(&uniform_amplitudes(n_q), x)
}

pub fn alpha_epe<T: Real>(x: T, n_q: usize) -> Complex<T> {
    alpha_from_amplitudes(&epe_amplitudes(n_q), x)
}

pub fn alpha_slater<T: Real>(x: T, n_q: usize, a: T) -> Complex<T> {
    alpha_from_amplitudes(&slater_amplitudes(n_q, a), x)
}

/// `x` reduced into `[−N_q/2, N_q/2)`.
pub fn wrap_offset<T: Real>(x: T, n_q: usize) -> T {
    let n = T::from_count(n_bins(n_q));
    let half = n * T::lit(0.5);
    let r = (x + half) % n;
    let r = if r < T::zero() { r + n } else { r };
    r - half
}

/// `sin²(πx) / (N_q² sin²(πx/N_q))`, equal to 1 on multiples of `N_q`.
pub fn alpha_uniform_sq_closed<T: Real>(x: T, n_q: usize) -> T {
    let n = T::from_count(n_bins(n_q));
    let d = (T::PI() * x / n).sin();
    if d.abs() < T::lit(1e-12) {
        return T::one();
    }
    let s = (T::PI() * x).sin();
    s * s / (n * n * d * d)
}

/// Closed geometric form `N_q^{−1}(1 − e^{2πix}) / (1 − e^{2πix/N_q})`.
pub fn alpha_uniform_closed<T: Real>(x: T, n_q: usize) -> Complex<T> {
    let n = T::from_count(n_bins(n_q));
    let one = Complex::new(T::one(), T::zero());
    let den = one - cis(T::TAU() * x / n);
    if den.norm() < T::lit(1e-12) {
        return cis(T::PI() * x * (T::one() - T::one() / n));
    }
    (one - cis(T::TAU() * x)) / den / n
}

/// Factored closed form of the EPE kernel, with the removable poles at
/// `sin((δ ± π)/2N_q) = 0` replaced by their limits.
pub fn alpha_epe_closed<T: Real>(x: T, n_q: usize) -> Complex<T> {
    let n = T::from_count(n_bins(n_q));
    let two = T::lit(2.0);
    let delta = T::TAU() * x;
    let pi = T::PI();
    let a = ((delta + pi) / (two * n)).sin();
    let b = ((delta - pi) / (two * n)).sin();
    let tol = T::lit(1e-9);
    let c_half = (delta / two).cos();
    // cos(δ/2) / (A·B) with the vanishing factor resolved by l'Hôpital.
    let ratio = if b.abs() < tol {
        -n * (delta / two).sin() / ((delta - pi) / (two * n)).cos() / a
    } else if a.abs() < tol {
        -n * (delta / two).sin() / ((delta + pi) / (two * n)).cos() / b
    } else {
        c_half / (a * b)
    };
    let mag = -(two.sqrt() / n) * ratio * (delta / (two * n)).cos() * (pi / (two * n)).sin();
    cis(delta * (T::one() - T::one() / n) / two) * mag
}

/// `|α_epe(0)|² = 2 / (N_q² sin²(π/2N_q))`.
pub fn alpha_epe_peak<T: Real>(n_q: usize) -> T {
    let n = T::from_count(n_bins(n_q));
    let s = (T::PI() / (T::lit(2.0) * n)).sin();
    T::lit(2.0) / (n * n * s * s)
}

/// Exact geometric ratio `C_S N_q^{−1/2} (1 − e^{2πix − aN_q}) / (1 − e^{2πix/N_q − a})`.
pub fn alpha_slater_closed<T: Real>(x: T, n_q: usize, a: T) -> Complex<T> {
    let n = T::from_count(n_bins(n_q));
    let one = Complex::new(T::one(), T::zero());
    let num = one - cis(T::TAU() * x) * (-a * n).exp();
    let den = one - cis(T::TAU() * x / n) * (-a).exp();
    num / den * (slater_norm(n_q, a) / n.sqrt())
}

/// Lorentzian approximation `C_S N_q^{−1/2} / (a − 2πix/N_q)` at the wrapped offset.
pub fn alpha_slater_lorentzian<T: Real>(x: T, n_q: usize, a: T) -> Complex<T> {
    let n = T::from_count(n_bins(n_q));
    let xw = wrap_offset(x, n_q);
    let den = Complex::new(a, -T::TAU() * xw / n);
    Complex::new(slater_norm(n_q, a) / n.sqrt(), T::zero()) / den
}
