//! SVD-based MUSIC reconstruction: signal-subspace estimation, noise
//! projections, test vectors, and the imaging maps over the ROI grid.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::forward::{field_value, wavenumber, FieldModel, ScatteringMatrix};
use crate::geometry::{ArraySplit, RoiGrid};

/// Default ceiling substituted for divisions by a near-zero projection norm.
pub const DEFAULT_CLAMP: f64 = 1e8;
/// Default relative singular-value threshold for signal-rank selection.
pub const DEFAULT_DELTA: f64 = 0.1;

/// Signal-subspace part of an SVD: descending singular values and the first
/// r left/right singular vectors.
#[derive(Debug, Clone)]
pub struct SubspaceSplit {
    singular_values: Vec<f64>,
    left_signal: DMatrix<Complex64>,
    right_signal: DMatrix<Complex64>,
    rank: usize,
}

impl SubspaceSplit {
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// N x r matrix of left signal vectors.
    pub fn left_signal(&self) -> &DMatrix<Complex64> {
        &self.left_signal
    }

    /// M x r matrix of right signal vectors.
    pub fn right_signal(&self) -> &DMatrix<Complex64> {
        &self.right_signal
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Which side of the factorization a vector belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Receiver side (left singular vectors, dimension N).
    Left,
    /// Transmitter side (right singular vectors, dimension M).
    Right,
}

/// Splits K into signal and noise subspaces: the signal rank is the count
/// of singular values within a factor delta of the largest.
pub fn subspace_split(matrix: &ScatteringMatrix, delta: f64) -> Result<SubspaceSplit> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "signal threshold delta must lie in (0, 1), got {delta}"
        )));
    }
    let entries = matrix.entries();
    if entries.iter().all(|v| v.norm() == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let svd = crate::svd::jacobi_svd(entries);
    let values = svd.values;
    let tau1 = values[0];
    if !(tau1 > 0.0) || !tau1.is_finite() {
        return Err(Error::ZeroMatrix);
    }
    let rank = values.iter().take_while(|&&t| t >= delta * tau1).count();
    let left_signal = DMatrix::from_fn(entries.nrows(), rank, |i, j| svd.u[(i, j)]);
    let right_signal = DMatrix::from_fn(entries.ncols(), rank, |i, j| svd.v[(i, j)]);
    Ok(SubspaceSplit {
        singular_values: values,
        left_signal,
        right_signal,
        rank,
    })
}

/// Norm of the noise-subspace projection (I - sum_j s_j s_j^*) v for a unit
/// vector v on the chosen side. Lies in [0, 1].
pub fn noise_projection_norm(sub: &SubspaceSplit, v: &DVector<Complex64>, side: Side) -> Result<f64> {
    let signal = match side {
        Side::Left => sub.left_signal(),
        Side::Right => sub.right_signal(),
    };
    if v.len() != signal.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "vector has length {} but the {} side has dimension {}",
            v.len(),
            match side {
                Side::Left => "left",
                Side::Right => "right",
            },
            signal.nrows()
        )));
    }
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "test vector must be unit length, got |v| = {norm}"
        )));
    }
    let mut w = v.clone();
    for j in 0..signal.ncols() {
        let s = signal.column(j);
        let coeff = s.dotc(v); // s^H v
        w.zip_apply(&s, |wi, si| *wi -= coeff * si);
    }
    Ok(w.norm().min(1.0))
}

/// Unit test vectors for a trial point r: f collects the receiver-side
/// incident fields E(a_n, r); g the conjugated transmitter-side fields.
pub fn test_vectors(
    point: [f64; 2],
    split: &ArraySplit,
    k: Complex64,
    model: FieldModel,
) -> Result<(DVector<Complex64>, DVector<Complex64>)> {
    let f_raw: Vec<Complex64> = split
        .rx_positions()
        .iter()
        .map(|&a| field_value(model, a, point, k))
        .collect::<Result<_>>()?;
    let g_raw: Vec<Complex64> = split
        .tx_positions()
        .iter()
        .map(|&b| field_value(model, b, point, k).map(|e| e.conj()))
        .collect::<Result<_>>()?;
    let mut f = DVector::from_vec(f_raw);
    let mut g = DVector::from_vec(g_raw);
    f /= Complex64::new(f.norm(), 0.0);
    g /= Complex64::new(g.norm(), 0.0);
    Ok((f, g))
}

/// Which imaging function a map holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Tx,
    Rx,
    Combined,
}

impl MapKind {
    pub fn as_str(&self, normalized: bool) -> &'static str {
        match (self, normalized) {
            (MapKind::Tx, false) => "F_tx",
            (MapKind::Rx, false) => "F_rx",
            (MapKind::Combined, false) => "F",
            (MapKind::Tx, true) => "N_tx",
            (MapKind::Rx, true) => "N_rx",
            (MapKind::Combined, true) => "N",
        }
    }
}

/// Scalar field over the ROI grid.
#[derive(Debug, Clone)]
pub struct ImagingMap {
    grid: RoiGrid,
    values: Vec<f64>,
    kind: MapKind,
    normalized: bool,
    peak_clamp: f64,
}

impl ImagingMap {
    pub fn from_values(
        grid: RoiGrid,
        values: Vec<f64>,
        kind: MapKind,
        normalized: bool,
        peak_clamp: f64,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(
                "map values must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            grid,
            values,
            kind,
            normalized,
            peak_clamp,
        })
    }

    pub fn grid(&self) -> &RoiGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn peak_clamp(&self) -> f64 {
        self.peak_clamp
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Index and coordinates of the first maximal grid point in row-major
    /// order.
    pub fn argmax(&self) -> (usize, [f64; 2]) {
        let mut best = 0usize;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        (best, self.grid.points()[best])
    }

    /// Writes the text table: header `x y value`, one row per grid point in
    /// row-major order, shortest round-trip floats.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "x y value")?;
        for (p, v) in self.grid.points().iter().zip(&self.values) {
            writeln!(w, "{} {} {}", p[0], p[1], v)?;
        }
        Ok(())
    }

    /// Parses a map table and checks it enumerates exactly the given grid.
    pub fn read_text<R: BufRead>(
        r: R,
        grid: RoiGrid,
        kind: MapKind,
        normalized: bool,
        peak_clamp: f64,
    ) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty map file".into()))??;
        if header.trim() != "x y value" {
            return Err(Error::Parse(format!("unexpected map header '{header}'")));
        }
        let mut values = Vec::with_capacity(grid.len());
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let x = parse_float(it.next(), "x coordinate")?;
            let y = parse_float(it.next(), "y coordinate")?;
            let v = parse_float(it.next(), "map value")?;
            let p = grid.points().get(i).ok_or_else(|| {
                Error::GridMismatch(format!("map has more rows than the {}-point grid", grid.len()))
            })?;
            if x != p[0] || y != p[1] {
                return Err(Error::GridMismatch(format!(
                    "row {} is ({x}, {y}) but the grid point is ({}, {})",
                    i + 1,
                    p[0],
                    p[1]
                )));
            }
            values.push(v);
        }
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "map has {} rows but the grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        Self::from_values(grid, values, kind, normalized, peak_clamp)
    }
}

fn parse_float(tok: Option<&str>, what: &str) -> Result<f64> {
    tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("malformed {what}")))
}

/// The three maps produced by one reconstruction.
#[derive(Debug, Clone)]
pub struct ImagingMaps {
    pub f_tx: ImagingMap,
    pub f_rx: ImagingMap,
    pub f: ImagingMap,
}

/// Sweeps the grid: per point, F_rx = 1/|F_noise f|, F_tx = 1/|G_noise g|,
/// F = (F_rx + F_tx)/2, all capped at `clamp`.
pub fn imaging_maps(
    matrix: &ScatteringMatrix,
    grid: &RoiGrid,
    delta: f64,
    model: FieldModel,
    clamp: f64,
) -> Result<ImagingMaps> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("imaging grid is empty".into()));
    }
    if !(clamp > 1.0) || !clamp.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "clamp must be a finite value above 1, got {clamp}"
        )));
    }
    let sub = subspace_split(matrix, delta)?;
    let k = wavenumber(matrix.medium());
    let split = matrix.split();
    let per_point: Vec<(f64, f64)> = grid
        .points()
        .par_iter()
        .map(|&p| -> Result<(f64, f64)> {
            let (f, g) = test_vectors(p, split, k, model)?;
            let nf = noise_projection_norm(&sub, &f, Side::Left)?;
            let ng = noise_projection_norm(&sub, &g, Side::Right)?;
            Ok((apply_clamp(nf, clamp), apply_clamp(ng, clamp)))
        })
        .collect::<Result<_>>()?;
    let f_rx: Vec<f64> = per_point.iter().map(|t| t.0).collect();
    let f_tx: Vec<f64> = per_point.iter().map(|t| t.1).collect();
    let f: Vec<f64> = f_rx
        .iter()
        .zip(&f_tx)
        .map(|(a, b)| (0.5 * (a + b)).min(clamp))
        .collect();
    Ok(ImagingMaps {
        f_tx: ImagingMap::from_values(grid.clone(), f_tx, MapKind::Tx, false, clamp)?,
        f_rx: ImagingMap::from_values(grid.clone(), f_rx, MapKind::Rx, false, clamp)?,
        f: ImagingMap::from_values(grid.clone(), f, MapKind::Combined, false, clamp)?,
    })
}

/// 1/norm with the configured ceiling for near-zero norms.
pub fn apply_clamp(norm: f64, clamp: f64) -> f64 {
    if norm * clamp < 1.0 {
        clamp
    } else {
        1.0 / norm
    }
}

/// Divides by the maximum so the output peaks at exactly 1.
pub fn normalize_map(map: &ImagingMap) -> Result<ImagingMap> {
    let max = map.max_value();
    if !(max > 0.0) {
        return Err(Error::AllZeroMap);
    }
    let values = map.values().iter().map(|v| v / max).collect();
    ImagingMap::from_values(map.grid().clone(), values, map.kind(), true, map.peak_clamp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{born_scattering_matrix, AnomalySpec, MediumSpec};
    use crate::geometry::AntennaArray;

    fn setup() -> (ScatteringMatrix, MediumSpec) {
        let arr = AntennaArray::uniform_circle(16, 0.09).unwrap();
        let split = ArraySplit::new(
            arr,
            &[1, 3, 5, 7, 9, 11, 13, 15],
            &[2, 4, 6, 8, 10, 12, 14, 16],
        )
        .unwrap();
        let m = MediumSpec::new(20.0, 0.2, 1e9).unwrap();
        let a = AnomalySpec::new([0.01, 0.03], 0.01, 55.0, 1.2).unwrap();
        (
            born_scattering_matrix(&split, &m, &[a], FieldModel::ExactHankel).unwrap(),
            m,
        )
    }

    #[test]
    fn rank_one_detected() {
        let (k, _) = setup();
        let sub = subspace_split(&k, 0.1).unwrap();
        assert_eq!(sub.rank(), 1);
        assert!(sub.singular_values()[1] / sub.singular_values()[0] < 1e-12);
    }

    #[test]
    fn two_anomalies_give_rank_two() {
        let arr = AntennaArray::uniform_circle(16, 0.09).unwrap();
        let split = ArraySplit::new(
            arr,
            &[1, 3, 5, 7, 9, 11, 13, 15],
            &[2, 4, 6, 8, 10, 12, 14, 16],
        )
        .unwrap();
        let m = MediumSpec::new(20.0, 0.2, 1e9).unwrap();
        let a1 = AnomalySpec::new([0.01, 0.03], 0.01, 55.0, 1.2).unwrap();
        let a2 = AnomalySpec::new([-0.04, -0.02], 0.01, 45.0, 1.0).unwrap();
        let k = born_scattering_matrix(&split, &m, &[a1, a2], FieldModel::ExactHankel).unwrap();
        let sub = subspace_split(&k, 0.1).unwrap();
        assert_eq!(sub.rank(), 2);
    }

    #[test]
    fn zero_matrix_rejected() {
        let arr = AntennaArray::uniform_circle(16, 0.09).unwrap();
        let split = ArraySplit::new(arr, &[1], &[2]).unwrap();
        let m = MediumSpec::new(20.0, 0.2, 1e9).unwrap();
        let zero = AnomalySpec::new([0.0, 0.0], 0.01, 20.0, 0.2).unwrap();
        let k = born_scattering_matrix(&split, &m, &[zero], FieldModel::ExactHankel).unwrap();
        assert!(matches!(subspace_split(&k, 0.1), Err(Error::ZeroMatrix)));
    }

    #[test]
    fn projection_norm_limits() {
        let (k, _) = setup();
        let sub = subspace_split(&k, 0.1).unwrap();
        // the signal vector itself projects to zero
        let u1 = DVector::from_column_slice(sub.left_signal().column(0).as_slice());
        assert!(noise_projection_norm(&sub, &u1, Side::Left).unwrap() < 1e-12);
        // dimension mismatch rejected
        let short = DVector::from_element(3, Complex64::new(1.0, 0.0));
        assert!(matches!(
            noise_projection_norm(&sub, &short, Side::Left),
            Err(Error::DimensionMismatch(_))
        ));
        // a non-unit vector is rejected
        let long = DVector::from_element(8, Complex64::new(1.0, 0.0));
        assert!(noise_projection_norm(&sub, &long, Side::Left).is_err());
    }

    #[test]
    fn projection_norm_matches_gram_schmidt_residual() {
        let (k, _) = setup();
        let sub = subspace_split(&k, 0.1).unwrap();
        // a deterministic pseudo-random unit vector
        let raw: Vec<Complex64> = (0..8)
            .map(|i| {
                let t = (i as f64 + 1.0) * 0.7311;
                Complex64::new(t.sin(), (2.3 * t).cos())
            })
            .collect();
        let mut v = DVector::from_vec(raw);
        v /= Complex64::new(v.norm(), 0.0);
        let got = noise_projection_norm(&sub, &v, Side::Left).unwrap();
        // explicit residual against the single signal vector
        let s = sub.left_signal().column(0);
        let coeff = s.dotc(&v);
        let mut resid = v.clone();
        for i in 0..8 {
            resid[i] -= coeff * s[i];
        }
        assert!((got - resid.norm()).abs() < 1e-12);
    }

    #[test]
    fn test_vector_normalization_and_far_field_magnitudes() {
        let arr = AntennaArray::uniform_circle(16, 0.09).unwrap();
        let split = ArraySplit::new(
            arr,
            &[1, 3, 5, 7, 9, 11, 13, 15],
            &[2, 4, 6, 8, 10, 12, 14, 16],
        )
        .unwrap();
        let m = MediumSpec::new(20.0, 0.2, 1e9).unwrap();
        let k = wavenumber(&m);
        let (f, g) = test_vectors([0.013, -0.021], &split, k, FieldModel::ExactHankel).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-12);
        assert!((g.norm() - 1.0).abs() < 1e-12);
        // entries proportional to the incident fields: cosine similarity 1
        let raw: Vec<Complex64> = split
            .rx_positions()
            .iter()
            .map(|&a| crate::forward::incident_field(a, [0.013, -0.021], k).unwrap())
            .collect();
        let raw = DVector::from_vec(raw);
        let cos = f.dotc(&raw).norm() / raw.norm();
        assert!((cos - 1.0).abs() < 1e-12);

        // for a lossless medium the far-field entries share one magnitude
        let lossless = MediumSpec::new(20.0, 0.0, 1e9).unwrap();
        let kr = wavenumber(&lossless);
        let (f, _) = test_vectors([0.013, -0.021], &split, kr, FieldModel::FarField).unwrap();
        let want = 1.0 / (8.0f64).sqrt();
        for v in f.iter() {
            assert!((v.norm() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn maps_peak_at_the_anomaly_and_normalize() {
        let (k, _) = setup();
        let grid = RoiGrid::new(0.08, 0.002).unwrap();
        let maps = imaging_maps(&k, &grid, 0.1, FieldModel::ExactHankel, DEFAULT_CLAMP).unwrap();
        let (_, at) = maps.f.argmax();
        assert!((at[0] - 0.01).abs() < 1e-12 && (at[1] - 0.03).abs() < 1e-12);
        assert!(maps.f.max_value() == DEFAULT_CLAMP);
        // all values at least 1 before normalization
        assert!(maps.f_rx.values().iter().all(|&v| v >= 1.0));

        let norm = normalize_map(&maps.f).unwrap();
        assert_eq!(norm.max_value(), 1.0);
        let (i, _) = norm.argmax();
        assert_eq!(i, maps.f.argmax().0);

        // constant map normalizes to all ones
        let c = ImagingMap::from_values(grid.clone(), vec![4.0; grid.len()], MapKind::Combined, false, 8.0)
            .unwrap();
        let n = normalize_map(&c).unwrap();
        assert!(n.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn map_table_round_trip() {
        let (k, _) = setup();
        let grid = RoiGrid::new(0.08, 0.01).unwrap();
        let maps = imaging_maps(&k, &grid, 0.1, FieldModel::ExactHankel, 3.0).unwrap();
        let mut buf = Vec::new();
        maps.f.write_text(&mut buf).unwrap();
        let back = ImagingMap::read_text(buf.as_slice(), grid, MapKind::Combined, false, 3.0).unwrap();
        assert_eq!(back.values(), maps.f.values());

        let other = RoiGrid::new(0.08, 0.02).unwrap();
        assert!(matches!(
            ImagingMap::read_text(buf.as_slice(), other, MapKind::Combined, false, 3.0),
            Err(Error::GridMismatch(_))
        ));
    }
}
