//! Post-processing of QPE outcome distributions: peaks, Lorentzian broadening, the ℓ²
//! metric and the statistical-error experiment.

use std::fmt::Write as _;

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qpe::{analytic_pk, EigenSpectrum, QpeConfig, Variant};
use crate::scalar::Real;
use crate::sim::Histogram;

/// Points of the common comparison grid.
pub const N_OMEGA: usize = 1 << 10;

/// `(E_j, w_j)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct PeakSet<T> {
    peaks: Vec<(T, T)>,
}

impl<T: Real> PeakSet<T> {
    pub fn new(peaks: Vec<(T, T)>) -> Result<Self> {
        if let Some(p) = peaks
            .iter()
            .find(|p| !p.0.is_finite() || !(p.1 >= T::zero()) || !p.1.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "invalid peak ({}, {})",
                p.0, p.1
            )));
        }
        Ok(Self { peaks })
    }

    pub fn peaks(&self) -> &[(T, T)] {
        &self.peaks
    }

    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn total_weight(&self) -> T {
        self.peaks.iter().map(|p| p.1).sum()
    }

    /// Peaks of every set with weights scaled by the matching factor.
    pub fn weighted_union(sets: &[(T, &PeakSet<T>)]) -> Result<Self> {
        let peaks = sets
            .iter()
            .flat_map(|(s, set)| set.peaks.iter().map(move |&(e, w)| (e, *s * w)))
            .collect();
        Self::new(peaks)
    }

    /// Peaks at the true energies of one polarization.
    pub fn from_eigen(spec: &EigenSpectrum<T>, nu: usize) -> Result<Self> {
        let w = spec.weights().get(nu).ok_or(Error::IndexOutOfRange {
            what: "polarization",
            index: nu,
            limit: spec.n_polarizations(),
        })?;
        Self::new(
            spec.energies()
                .iter()
                .copied()
                .zip(w.iter().copied())
                .collect(),
        )
    }
}

/// Intensities on a uniform energy grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSeries<T> {
    omega: Vec<T>,
    intensity: Vec<T>,
}

impl<T: Real> SpectrumSeries<T> {
    pub fn new(omega: Vec<T>, intensity: Vec<T>) -> Result<Self> {
        if omega.len() != intensity.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} grid points, {} intensities",
                omega.len(),
                intensity.len()
            )));
        }
        if omega.len() < 2 || omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "grid must have two or more increasing points".into(),
            ));
        }
        if intensity
            .iter()
            .any(|v| !(*v >= T::zero()) || !v.is_finite())
        {
            return Err(Error::InvalidArgument(
                "intensities must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { omega, intensity })
    }

    pub fn omega(&self) -> &[T] {
        &self.omega
    }

    pub fn intensity(&self) -> &[T] {
        &self.intensity
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Scales intensities to unit sum.
    pub fn normalized(mut self) -> Result<Self> {
        let s: T = self.intensity.iter().copied().sum();
        if !(s > T::zero()) {
            return Err(Error::InvalidArgument("spectrum has no weight".into()));
        }
        for v in &mut self.intensity {
            *v = *v / s;
        }
        Ok(self)
    }

    /// `omega,intensity` rows with an optional display offset added to `omega`.
    pub fn to_csv(&self, offset: T) -> String {
        let mut s = String::from("omega,intensity\n");
        for (w, v) in self.omega.iter().zip(&self.intensity) {
            let _ = writeln!(s, "{:e},{:e}", *w + offset, v);
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut omega = Vec::new();
        let mut intensity = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let mut f = line.split(',');
            let mut next = || -> Result<T> {
                f.next()
                    .ok_or(Error::Parse {
                        line: i + 1,
                        msg: "missing field".into(),
                    })?
                    .trim()
                    .parse::<f64>()
                    .map(T::lit)
                    .map_err(|e| Error::Parse {
                        line: i + 1,
                        msg: e.to_string(),
                    })
            };
            omega.push(next()?);
            intensity.push(next()?);
        }
        Self::new(omega, intensity)
    }
}

/// `ω_ℓ = ω_min + ℓ (ω_max − ω_min)/n` for `ℓ = 0, …, n−1`.
pub fn uniform_grid<T: Real>(omega_min: T, omega_max: T, n: usize) -> Result<Vec<T>> {
    if n < 2 || !(omega_max > omega_min) {
        return Err(Error::InvalidArgument(
            "grid needs n ≥ 2 and a nondegenerate window".into(),
        ));
    }
    let step = (omega_max - omega_min) / T::from_count(n);
    Ok((0..n)
        .map(|l| omega_min + step * T::from_count(l))
        .collect())
}

/// The `N_OMEGA`-point grid over the window of `cfg`.
pub fn common_grid<T: Real>(cfg: &QpeConfig<T>) -> Vec<T> {
    uniform_grid(cfg.omega_min, cfg.omega_max, N_OMEGA).expect("validated window")
}

/// Peaks at `ω_min + k/t₀` with the empirical bin probabilities.
pub fn histogram_to_peaks<T: Real>(hist: &Histogram, cfg: &QpeConfig<T>) -> Result<PeakSet<T>> {
    if hist.is_empty() {
        return Err(Error::InvalidArgument("empty histogram".into()));
    }
    if hist.n_bits() != cfg.n_q {
        return Err(Error::DimensionMismatch(format!(
            "histogram over {} bits, n_q = {}",
            hist.n_bits(),
            cfg.n_q
        )));
    }
    let total = T::lit(hist.total() as f64);
    PeakSet::new(
        hist.counts()
            .iter()
            .map(|(&k, &c)| (cfg.bin_energy(k as usize), T::lit(c as f64) / total))
            .collect(),
    )
}

/// Peaks from a bin probability vector.
pub fn probabilities_to_peaks<T: Real>(p: &[T], cfg: &QpeConfig<T>) -> Result<PeakSet<T>> {
    if p.len() != cfg.n_bins() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for {} bins",
            p.len(),
            cfg.n_bins()
        )));
    }
    PeakSet::new(
        p.iter()
            .enumerate()
            .map(|(k, &w)| (cfg.bin_energy(k), w))
            .collect(),
    )
}

/// Unnormalized `Σ_j w_j/((ω − E_j)² + η²)` on `grid`.
pub fn broaden_raw<T: Real>(peaks: &PeakSet<T>, grid: &[T], eta: T) -> Result<Vec<T>> {
    if !(eta > T::zero()) || !eta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "broadening η = {eta} must be positive"
        )));
    }
    let eta2 = eta * eta;
    Ok(grid
        .iter()
        .map(|&w| {
            peaks
                .peaks
                .iter()
                .map(|&(e, wt)| wt / ((w - e) * (w - e) + eta2))
                .sum()
        })
        .collect())
}

/// Lorentzian spectrum of the summed polarization sets, normalized to unit sum.
pub fn lorentzian_spectrum<T: Real>(
    sets: &[PeakSet<T>],
    grid: &[T],
    eta: T,
) -> Result<SpectrumSeries<T>> {
    let mut acc = vec![T::zero(); grid.len()];
    for s in sets {
        for (a, v) in acc.iter_mut().zip(broaden_raw(s, grid, eta)?) {
            *a = *a + v;
        }
    }
    SpectrumSeries::new(grid.to_vec(), acc)?.normalized()
}

/// Periodic linear interpolation of bin values onto `grid`, normalized to unit sum.
pub fn interpolate_bins<T: Real>(
    p: &[T],
    cfg: &QpeConfig<T>,
    grid: &[T],
) -> Result<SpectrumSeries<T>> {
    if p.len() != cfg.n_bins() {
        return Err(Error::DimensionMismatch(format!(
            "{} values for {} bins",
            p.len(),
            cfg.n_bins()
        )));
    }
    let n = p.len();
    let t0 = cfg.t0();
    let nf = T::from_count(n);
    let vals = grid
        .iter()
        .map(|&w| {
            let x = ((w - cfg.omega_min) * t0) % nf;
            let x = if x < T::zero() { x + nf } else { x };
            let k0 = x.floor();
            let f = x - k0;
            let k0 = k0.to_usize().unwrap_or(0).min(n - 1);
            p[k0] * (T::one() - f) + p[(k0 + 1) % n] * f
        })
        .collect();
    SpectrumSeries::new(grid.to_vec(), vals)?.normalized()
}

/// How bin probabilities become a spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PostProcess<T> {
    /// Each bin is a peak broadened with width `eta`.
    Lorentzian { eta: T },
    /// The bin profile itself, interpolated onto the grid.
    Interpolate,
}

impl<T: Real> PostProcess<T> {
    /// Interpolation for the slater input (its outcome law is already Lorentzian),
    /// broadening otherwise.
    pub fn for_variant(variant: Variant, eta: T) -> Self {
        match variant {
            Variant::Slater => PostProcess::Interpolate,
            _ => PostProcess::Lorentzian { eta },
        }
    }

    pub fn apply(&self, p: &[T], cfg: &QpeConfig<T>, grid: &[T]) -> Result<SpectrumSeries<T>> {
        match self {
            PostProcess::Lorentzian { eta } => {
                lorentzian_spectrum(&[probabilities_to_peaks(p, cfg)?], grid, *eta)
            }
            PostProcess::Interpolate => interpolate_bins(p, cfg, grid),
        }
    }
}

/// `√(Σ_ℓ |a_ℓ − b_ℓ|²)` on identical grids.
pub fn l2_error<T: Real>(a: &SpectrumSeries<T>, b: &SpectrumSeries<T>) -> Result<T> {
    let tol = T::lit(1e-9);
    if a.len() != b.len()
        || a.omega
            .iter()
            .zip(&b.omega)
            .any(|(x, y)| (*x - *y).abs() > tol * (T::one() + x.abs()))
    {
        return Err(Error::DimensionMismatch(
            "spectra live on different grids".into(),
        ));
    }
    Ok(a.intensity
        .iter()
        .zip(&b.intensity)
        .map(|(x, y)| (*x - *y) * (*x - *y))
        .sum::<T>()
        .sqrt())
}

/// `√(Σ_k |p_k − q_k|²)` between two outcome distributions.
pub fn l2_distance<T: Real>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(
            "distributions differ in length".into(),
        ));
    }
    Ok(p.iter()
        .zip(q)
        .map(|(a, b)| (*a - *b) * (*a - *b))
        .sum::<T>()
        .sqrt())
}

/// Lorentzian spectrum at the exact energies, all polarizations summed.
pub fn reference_spectrum<T: Real>(
    spec: &EigenSpectrum<T>,
    grid: &[T],
    eta: T,
) -> Result<SpectrumSeries<T>> {
    let sets: Vec<PeakSet<T>> = (0..spec.n_polarizations())
        .map(|nu| PeakSet::from_eigen(spec, nu))
        .collect::<Result<_>>()?;
    lorentzian_spectrum(&sets, grid, eta)
}

/// Multinomial sample of `n` outcomes from `p`, returned as frequencies.
pub fn sample_frequencies<T: Real>(p: &[T], n: usize, seed: u64) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "at least one measurement is required".into(),
        ));
    }
    let w: Vec<f64> = p.iter().map(|x| x.to_f64_lossy().max(0.0)).collect();
    let dist = WeightedIndex::new(&w).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; p.len()];
    for _ in 0..n {
        counts[dist.sample(&mut rng)] += 1;
    }
    let nf = n as f64;
    Ok(counts.into_iter().map(|c| T::lit(c as f64 / nf)).collect())
}

/// Mean and sample standard deviation of a statistical-error experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentStats<T> {
    pub mean: T,
    pub std: T,
}

/// Per trial: draw `n_meas` outcomes from the analytic law, post-process and compare with
/// the post-processed infinite-shot law. Trial `i` uses seed `seed ^ i`.
pub fn statistical_experiment<T: Real>(
    cfg: &QpeConfig<T>,
    spec: &EigenSpectrum<T>,
    post: PostProcess<T>,
    n_meas: usize,
    trials: usize,
    seed: u64,
) -> Result<ExperimentStats<T>> {
    if trials < 2 {
        return Err(Error::InvalidArgument(
            "at least two trials are required".into(),
        ));
    }
    let grid = common_grid(cfg);
    let p = analytic_pk(spec, cfg)?;
    let exact = post.apply(&p, cfg, &grid)?;
    let errs: Vec<T> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let f = sample_frequencies(&p, n_meas, seed ^ i)?;
            l2_error(&post.apply(&f, cfg, &grid)?, &exact)
        })
        .collect::<Result<_>>()?;
    let n = T::from_count(trials);
    let mean = errs.iter().copied().sum::<T>() / n;
    let var = errs.iter().map(|e| (*e - mean) * (*e - mean)).sum::<T>() / (n - T::one());
    Ok(ExperimentStats {
        mean,
        std: var.sqrt(),
    })
}

/// One row of the experiment report.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow<T> {
    pub n_q: usize,
    pub variant: Variant,
    pub n_meas: usize,
    pub stats: ExperimentStats<T>,
}

/// `n_q,variant,n_meas,mean_l2,std_l2`.
pub fn experiment_csv<T: Real>(rows: &[ExperimentRow<T>]) -> String {
    let mut s = String::from("n_q,variant,n_meas,mean_l2,std_l2\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{:e},{:e}",
            r.n_q, r.variant, r.n_meas, r.stats.mean, r.stats.std
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_q: usize) -> QpeConfig<f64> {
        QpeConfig::uniform(n_q, 0.0, 8.0).unwrap()
    }

    #[test]
    fn histogram_peaks() {
        let c = cfg(3);
        let h = Histogram::from_counts(3, [(2, 250), (5, 750)]);
        let p = histogram_to_peaks(&h, &c).unwrap();
        assert_eq!(p.peaks(), &[(2.0, 0.25), (5.0, 0.75)]);
        let one = histogram_to_peaks(&Histogram::from_counts(3, [(0, 9)]), &c).unwrap();
        assert_eq!(one.peaks(), &[(0.0, 1.0)]);
        let uniform =
            histogram_to_peaks(&Histogram::from_counts(3, (0..8).map(|k| (k, 5))), &c).unwrap();
        assert_eq!(uniform.len(), 8);
        assert!(uniform.peaks().iter().all(|p| p.1 == 0.125));
        assert!(histogram_to_peaks(&Histogram::new(3), &c).is_err());
        assert!(histogram_to_peaks(&h, &cfg(4)).is_err());
    }

    #[test]
    fn grid_layout() {
        let g = common_grid(&cfg(3));
        assert_eq!(g.len(), N_OMEGA);
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 8.0 / 1024.0).abs() < 1e-15);
        assert!(g[N_OMEGA - 1] < 8.0);
    }

    #[test]
    fn lorentzian_shape() {
        let g = common_grid(&cfg(3));
        let centre = PeakSet::new(vec![(4.0, 1.0)]).unwrap();
        let s = lorentzian_spectrum(&[centre], &g, 0.1).unwrap();
        let v = s.intensity();
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let imax = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(imax, 512);
        for d in 1..500 {
            assert!((v[512 - d] - v[512 + d]).abs() < 1e-15);
        }
        let flat =
            lorentzian_spectrum(&[PeakSet::new(vec![(4.0, 1.0)]).unwrap()], &g, 800.0).unwrap();
        let (mx, mn) = flat
            .intensity()
            .iter()
            .fold((0.0f64, 1.0f64), |(a, b), v| (a.max(*v), b.min(*v)));
        assert!(mx / mn < 1.0001);
        assert!(broaden_raw(&PeakSet::new(vec![(4.0, 1.0)]).unwrap(), &g, 0.0).is_err());
    }

    #[test]
    fn half_window_masses() {
        let g = common_grid(&cfg(3));
        let p = PeakSet::new(vec![(2.0, 1.0), (6.0, 3.0)]).unwrap();
        let s = lorentzian_spectrum(&[p], &g, 0.08).unwrap();
        let lo: f64 = s.intensity()[..512].iter().sum();
        let hi: f64 = s.intensity()[512..].iter().sum();
        // Oracle: ∫ w/((ω−E)²+η²) dω = (w/η)[atan((ω−E)/η)].
        let mass = |e: f64, w: f64, a: f64, b: f64| {
            w * (((b - e) / 0.08).atan() - ((a - e) / 0.08).atan())
        };
        let want = (mass(2.0, 1.0, 4.0, 8.0) + mass(6.0, 3.0, 4.0, 8.0))
            / (mass(2.0, 1.0, 0.0, 4.0) + mass(6.0, 3.0, 0.0, 4.0));
        assert!((hi / lo / want - 1.0).abs() < 0.02, "{} vs {want}", hi / lo);
        assert!((want / 3.0 - 1.0).abs() < 0.1);
    }

    #[test]
    fn l2_metric() {
        let g = vec![0.0, 1.0];
        let a = SpectrumSeries::new(g.clone(), vec![1.0, 0.0]).unwrap();
        let b = SpectrumSeries::new(g.clone(), vec![0.0, 1.0]).unwrap();
        assert!((l2_error(&a, &b).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(l2_error(&a, &a).unwrap(), 0.0);
        let c = SpectrumSeries::new(vec![0.0, 2.0], vec![0.0, 1.0]).unwrap();
        assert!(l2_error(&a, &c).is_err());
    }

    #[test]
    fn interpolation_reproduces_bins() {
        let c = cfg(3);
        let p = vec![0.1, 0.2, 0.0, 0.3, 0.1, 0.1, 0.1, 0.1];
        let s = interpolate_bins(&p, &c, &common_grid(&c)).unwrap();
        // Grid point 128·k sits on bin k; values scale by the common normalization.
        let scale = s.intensity()[128] / 0.2;
        for k in 0..8 {
            assert!((s.intensity()[128 * k] - scale * p[k]).abs() < 1e-15);
        }
        // Midway between bins 7 and 0 (periodic wrap).
        assert!((s.intensity()[1023 - 63] - scale * (0.1 + (0.1 - 0.1) * 0.5)).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_and_offset() {
        let s = SpectrumSeries::new(vec![0.0, 0.5], vec![0.25, 0.75]).unwrap();
        let t = s.to_csv(0.0);
        assert!(t.starts_with("omega,intensity\n"));
        assert_eq!(SpectrumSeries::from_csv(&t).unwrap(), s);
        let shifted = SpectrumSeries::<f64>::from_csv(&s.to_csv(-4.96)).unwrap();
        assert!((shifted.omega()[0] + 4.96).abs() < 1e-15);
    }

    #[test]
    fn experiment_is_deterministic_and_validated() {
        let c = QpeConfig::uniform(5, 0.0, 1.0).unwrap();
        let spec = EigenSpectrum::single(vec![0.2, 0.45, 0.7], vec![0.5, 0.3, 0.2]).unwrap();
        let post = PostProcess::Lorentzian { eta: 0.02 };
        let a = statistical_experiment(&c, &spec, post, 500, 2, 9).unwrap();
        let b = statistical_experiment(&c, &spec, post, 500, 2, 9).unwrap();
        assert_eq!(a, b);
        assert!(statistical_experiment(&c, &spec, post, 500, 1, 9).is_err());
        let rows = vec![ExperimentRow {
            n_q: 5,
            variant: Variant::Uniform,
            n_meas: 500,
            stats: a,
        }];
        assert!(
            experiment_csv(&rows).starts_with("n_q,variant,n_meas,mean_l2,std_l2\n5,uniform,500,")
        );
    }
}
