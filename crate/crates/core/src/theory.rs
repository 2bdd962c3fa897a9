//! Independent Bessel-series evaluation of the imaging maps for a single
//! anomaly, and the harmonic-cancellation analysis of antenna arrangements.
//!
//! The series predicts F_rx = (1 - |J_0(k d) + E_rx/N|^2)^(-1/2) with
//! E_rx the arrangement-dependent remainder; an arrangement whose harmonic
//! sums vanish over the retained orders removes the remainder entirely.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ArraySplit, RoiGrid};
use crate::imaging::apply_clamp;
use crate::special::{bessel_j_sequence, truncation_order};

/// Default cap on series truncation orders.
pub const DEFAULT_ORDER_CAP: usize = 100;
/// Samples used when maximizing |J_p(k d)| over a distance range.
const SCORE_SAMPLES: usize = 256;
/// Slack allowed on |J_0 + E/N| before a grid point is flagged as outside
/// the series' validity.
const SERIES_SLACK: f64 = 1e-6;

/// Harmonic magnitudes |sum_n e^{i p theta_n}| for |p| <= P.
#[derive(Debug, Clone)]
pub struct ArrangementSpectrum {
    angles: Vec<f64>,
    order: usize,
    /// Magnitudes indexed by p + order, p in -order..=order.
    magnitudes: Vec<f64>,
}

impl ArrangementSpectrum {
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn magnitude(&self, p: i32) -> f64 {
        let idx = p + self.order as i32;
        self.magnitudes[idx as usize]
    }

    /// (p, magnitude) pairs in ascending p.
    pub fn harmonics(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        let order = self.order as i32;
        self.magnitudes
            .iter()
            .enumerate()
            .map(move |(i, &m)| (i as i32 - order, m))
    }
}

/// Complex harmonic sums H_p = sum_n e^{i p theta_n} for p = 0..=order.
fn harmonic_sums(angles: &[f64], order: usize) -> Vec<Complex64> {
    (0..=order)
        .map(|p| {
            angles
                .iter()
                .map(|&t| Complex64::new(0.0, p as f64 * t).exp())
                .sum()
        })
        .collect()
}

/// Harmonic content of an angle set. The p = 0 entry equals the antenna
/// count; magnitudes are even in p (conjugate pairs).
pub fn arrangement_spectrum(angles: &[f64], order: usize) -> Result<ArrangementSpectrum> {
    if angles.is_empty() {
        return Err(Error::InvalidParameter("angle list is empty".into()));
    }
    if order < 1 {
        return Err(Error::InvalidParameter("spectrum order must be >= 1".into()));
    }
    let sums = harmonic_sums(angles, order);
    let mut magnitudes = vec![0.0; 2 * order + 1];
    for p in 0..=order {
        let m = sums[p].norm();
        magnitudes[order + p] = m;
        magnitudes[order - p] = m;
    }
    magnitudes[order] = angles.len() as f64;
    Ok(ArrangementSpectrum {
        angles: angles.to_vec(),
        order,
        magnitudes,
    })
}

/// Arrangement-dependent remainder sum_n sum_{0<|p|<=P} i^p J_p(k d)
/// e^{ip(theta_n - phi)} with d = |r - r_star| and phi the polar angle of
/// r - r_star. Exactly zero at r = r_star.
pub fn artifact_term(
    r: [f64; 2],
    r_star: [f64; 2],
    angles: &[f64],
    k: Complex64,
    order: usize,
) -> Result<Complex64> {
    if order < 1 {
        return Err(Error::InvalidParameter("artifact order must be >= 1".into()));
    }
    let dx = r[0] - r_star[0];
    let dy = r[1] - r_star[1];
    let d = (dx * dx + dy * dy).sqrt();
    if d == 0.0 {
        return Ok(Complex64::new(0.0, 0.0)); // every J_p(0) vanishes for p != 0
    }
    let phi = dy.atan2(dx);
    let seq = bessel_j_sequence(order, k * d)?;
    let sums = harmonic_sums(angles, order);
    let mut total = Complex64::new(0.0, 0.0);
    let mut ipow = Complex64::new(1.0, 0.0);
    for p in 1..=order {
        ipow *= Complex64::new(0.0, 1.0);
        let e_minus = Complex64::new(0.0, -(p as f64) * phi).exp();
        // i^{-p} J_{-p} = i^p J_p folds the -p term into the conjugate sum
        let pair = e_minus * sums[p] + e_minus.conj() * sums[p].conj();
        total += ipow * seq[p] * pair;
    }
    Ok(total)
}

/// Series prediction of the two one-sided maps for a single anomaly.
#[derive(Debug, Clone)]
pub struct SeriesMapPrediction {
    grid: RoiGrid,
    f_rx: Vec<f64>,
    f_tx: Vec<f64>,
    truncation: usize,
    anomaly_center: [f64; 2],
    clamp: f64,
    /// Grid points where |J_0 + E/N| exceeded 1 beyond the series slack.
    flagged: usize,
}

impl SeriesMapPrediction {
    pub fn grid(&self) -> &RoiGrid {
        &self.grid
    }

    pub fn f_rx(&self) -> &[f64] {
        &self.f_rx
    }

    pub fn f_tx(&self) -> &[f64] {
        &self.f_tx
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn anomaly_center(&self) -> [f64; 2] {
        self.anomaly_center
    }

    pub fn clamp(&self) -> f64 {
        self.clamp
    }

    pub fn flagged(&self) -> usize {
        self.flagged
    }
}

/// Evaluates the structure series over the grid: the receiver side uses the
/// receive angles with divisor N, the transmitter side the conjugated
/// harmonic form with divisor M.
pub fn series_map(
    grid: &RoiGrid,
    r_star: [f64; 2],
    split: &ArraySplit,
    k: Complex64,
    tol: f64,
    clamp: f64,
) -> Result<SeriesMapPrediction> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("series grid is empty".into()));
    }
    if !(clamp > 1.0) || !clamp.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "clamp must be a finite value above 1, got {clamp}"
        )));
    }
    let max_d = grid.max_distance_from(r_star);
    let order = truncation_order(k, max_d, tol, DEFAULT_ORDER_CAP)?;
    let rx_angles = split.rx_angles();
    let tx_angles = split.tx_angles();
    let rx_sums = harmonic_sums(&rx_angles, order);
    let tx_sums = harmonic_sums(&tx_angles, order);
    let n = rx_angles.len() as f64;
    let m = tx_angles.len() as f64;

    let rows: Vec<(f64, f64, bool)> = grid
        .points()
        .par_iter()
        .map(|&p| -> Result<(f64, f64, bool)> {
            let dx = p[0] - r_star[0];
            let dy = p[1] - r_star[1];
            let d = (dx * dx + dy * dy).sqrt();
            if d == 0.0 {
                return Ok((clamp, clamp, false));
            }
            let phi = dy.atan2(dx);
            let seq = bessel_j_sequence(order, k * d)?;
            let mut e_rx = Complex64::new(0.0, 0.0);
            let mut e_tx = Complex64::new(0.0, 0.0);
            let mut ipow = Complex64::new(1.0, 0.0);
            for q in 1..=order {
                ipow *= Complex64::new(0.0, 1.0);
                let e_minus = Complex64::new(0.0, -(q as f64) * phi).exp();
                e_rx += ipow * seq[q] * (e_minus * rx_sums[q] + e_minus.conj() * rx_sums[q].conj());
                // transmitter side per the (-i)^q e^{-iq(theta - phi)} form;
                // (-i)^{-q} J_{-q} = (-i)^q J_q folds the -q term
                e_tx += ipow.conj()
                    * seq[q]
                    * (e_minus.conj() * tx_sums[q].conj() + e_minus * tx_sums[q]);
            }
            let inner_rx = seq[0] + e_rx / n;
            let inner_tx = seq[0] + e_tx / m;
            let flag = inner_rx.norm() > 1.0 + SERIES_SLACK || inner_tx.norm() > 1.0 + SERIES_SLACK;
            Ok((
                prediction_value(inner_rx, clamp),
                prediction_value(inner_tx, clamp),
                flag,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(SeriesMapPrediction {
        grid: grid.clone(),
        f_rx: rows.iter().map(|r| r.0).collect(),
        f_tx: rows.iter().map(|r| r.1).collect(),
        truncation: order,
        anomaly_center: r_star,
        clamp,
        flagged: rows.iter().filter(|r| r.2).count(),
    })
}

/// (1 - |inner|^2)^(-1/2) with the imaging clamp semantics.
fn prediction_value(inner: Complex64, clamp: f64) -> f64 {
    let s = 1.0 - inner.norm_sqr();
    if s <= 0.0 {
        return clamp;
    }
    apply_clamp(s.sqrt(), clamp)
}

/// Scalar arrangement quality: harmonic magnitudes weighted by the largest
/// |J_p(k d)| over d <= max_distance, summed over 0 < |p| <= P and divided
/// by the antenna count. Lower is better; vanishing harmonics give zero.
pub fn arrangement_score(
    angles: &[f64],
    k: Complex64,
    max_distance: f64,
    tol: f64,
) -> Result<f64> {
    if angles.is_empty() {
        return Err(Error::InvalidParameter("angle list is empty".into()));
    }
    if !(max_distance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "max_distance must be positive, got {max_distance}"
        )));
    }
    let order = truncation_order(k, max_distance, tol, DEFAULT_ORDER_CAP)?;
    let sums = harmonic_sums(angles, order);
    let mut weights = vec![0.0f64; order + 1];
    for j in 1..=SCORE_SAMPLES {
        let d = max_distance * j as f64 / SCORE_SAMPLES as f64;
        let seq = bessel_j_sequence(order, k * d)?;
        for (w, v) in weights.iter_mut().zip(&seq) {
            *w = w.max(v.norm());
        }
    }
    let mut total = 0.0;
    for p in 1..=order {
        // +p and -p carry equal magnitude
        total += 2.0 * weights[p] * sums[p].norm();
    }
    Ok(total / angles.len() as f64)
}
