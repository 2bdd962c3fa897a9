//! Background wavenumber, incident fields, contrast, and the Born-approximate
//! scattering matrix for one or more small anomalies: the synthetic data
//! generator for the imaging pipeline.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::geometry::ArraySplit;
use crate::special::hankel0_2;

/// Vacuum permittivity (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854e-12;
/// Vacuum permeability (H/m).
pub const VACUUM_PERMEABILITY: f64 = 4.0e-7 * PI;

/// Background (matching liquid) electrical parameters at the operating
/// frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumSpec {
    eps_b: f64,
    sigma_b: f64,
    mu_b: f64,
    frequency: f64,
}

impl MediumSpec {
    /// Background permittivity given as a multiple of the vacuum value,
    /// conductivity in S/m, frequency in Hz; permeability defaults to the
    /// vacuum value.
    pub fn new(eps_rel: f64, sigma_b: f64, frequency: f64) -> Result<Self> {
        Self::with_absolute(eps_rel * VACUUM_PERMITTIVITY, sigma_b, VACUUM_PERMEABILITY, frequency)
    }

    pub fn with_absolute(eps_b: f64, sigma_b: f64, mu_b: f64, frequency: f64) -> Result<Self> {
        if !(eps_b > 0.0) || !(mu_b > 0.0) || !(frequency > 0.0) || !(sigma_b >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "medium requires eps_b > 0, mu_b > 0, frequency > 0, sigma_b >= 0 \
                 (got {eps_b}, {mu_b}, {frequency}, {sigma_b})"
            )));
        }
        Ok(Self {
            eps_b,
            sigma_b,
            mu_b,
            frequency,
        })
    }

    pub fn eps_b(&self) -> f64 {
        self.eps_b
    }

    pub fn sigma_b(&self) -> f64 {
        self.sigma_b
    }

    pub fn mu_b(&self) -> f64 {
        self.mu_b
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// Angular frequency omega = 2 pi f.
    pub fn omega(&self) -> f64 {
        2.0 * PI * self.frequency
    }
}

/// One circular anomaly: center, radius and electrical parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnomalySpec {
    center: [f64; 2],
    radius: f64,
    eps: f64,
    sigma: f64,
}

impl AnomalySpec {
    /// Permittivity given as a multiple of the vacuum value.
    pub fn new(center: [f64; 2], radius: f64, eps_rel: f64, sigma: f64) -> Result<Self> {
        if !(radius > 0.0) || !(eps_rel > 0.0) || !(sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "anomaly requires radius > 0, eps > 0, sigma >= 0 \
                 (got {radius}, {eps_rel}, {sigma})"
            )));
        }
        if !center[0].is_finite() || !center[1].is_finite() {
            return Err(Error::InvalidParameter("anomaly center must be finite".into()));
        }
        Ok(Self {
            center,
            radius,
            eps: eps_rel * VACUUM_PERMITTIVITY,
            sigma,
        })
    }

    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Which incident-field kernel generates data and test vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldModel {
    /// Green's-function kernel (i/4) H_0^(2)(k |d - r|).
    ExactHankel,
    /// Far-field plane-wave form (-1+i) e^{-ikR} / (4 sqrt(k pi R)) e^{ik theta . r}.
    FarField,
}

impl FieldModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            FieldModel::ExactHankel => "exact-hankel",
            FieldModel::FarField => "far-field",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact-hankel" => Ok(FieldModel::ExactHankel),
            "far-field" => Ok(FieldModel::FarField),
            other => Err(Error::InvalidParameter(format!(
                "unknown field model '{other}' (expected 'exact-hankel' or 'far-field')"
            ))),
        }
    }
}

/// How a scattering matrix came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    BornSynthetic,
    FarFieldSynthetic,
    File,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::BornSynthetic => "born-synthetic",
            Provenance::FarFieldSynthetic => "far-field-synthetic",
            Provenance::File => "file",
        }
    }
}

/// Complex N x M scattered-field matrix: rows follow the receiver set,
/// columns the transmitter set.
#[derive(Debug, Clone)]
pub struct ScatteringMatrix {
    entries: DMatrix<Complex64>,
    split: ArraySplit,
    medium: MediumSpec,
    provenance: Provenance,
}

impl ScatteringMatrix {
    /// Wraps externally produced entries (rows = receivers, columns =
    /// transmitters of the split).
    pub fn new(
        entries: DMatrix<Complex64>,
        split: ArraySplit,
        medium: MediumSpec,
        provenance: Provenance,
    ) -> Result<Self> {
        if entries.nrows() != split.rx_count() || entries.ncols() != split.tx_count() {
            return Err(Error::DimensionMismatch(format!(
                "entries are {} x {} but the split has N = {}, M = {}",
                entries.nrows(),
                entries.ncols(),
                split.rx_count(),
                split.tx_count()
            )));
        }
        if entries.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "scattering matrix entries must be finite".into(),
            ));
        }
        Ok(Self {
            entries,
            split,
            medium,
            provenance,
        })
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn split(&self) -> &ArraySplit {
        &self.split
    }

    pub fn medium(&self) -> &MediumSpec {
        &self.medium
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Receivers (rows).
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    /// Transmitters (columns).
    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// Writes the interchange text format: header `N M frequency`, then one
    /// `n m re im` line per entry, row-major, 1-based indices. Floats use
    /// the shortest round-trip representation.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{} {} {}", self.rows(), self.cols(), self.medium.frequency())?;
        for n in 0..self.rows() {
            for m in 0..self.cols() {
                let v = self.entries[(n, m)];
                writeln!(w, "{} {} {} {}", n + 1, m + 1, v.re, v.im)?;
            }
        }
        Ok(())
    }

    /// Parses the interchange format, re-binding the matrix to the given
    /// split and medium. Dimensions and frequency must agree.
    pub fn read_text<R: BufRead>(r: R, split: ArraySplit, medium: MediumSpec) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty scattering-matrix file".into()))??;
        let mut it = header.split_whitespace();
        let rows: usize = parse_field(it.next(), "row count")?;
        let cols: usize = parse_field(it.next(), "column count")?;
        let frequency: f64 = parse_field(it.next(), "frequency")?;
        if rows != split.rx_count() || cols != split.tx_count() {
            return Err(Error::DimensionMismatch(format!(
                "file is {rows} x {cols} but the split has N = {} receivers, M = {} transmitters",
                split.rx_count(),
                split.tx_count()
            )));
        }
        if frequency != medium.frequency() {
            return Err(Error::InvalidParameter(format!(
                "file frequency {frequency} differs from the configured {}",
                medium.frequency()
            )));
        }
        let mut entries = DMatrix::from_element(rows, cols, Complex64::new(0.0, 0.0));
        let mut seen = 0usize;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let n: usize = parse_field(it.next(), "receiver index")?;
            let m: usize = parse_field(it.next(), "transmitter index")?;
            let re: f64 = parse_field(it.next(), "real part")?;
            let im: f64 = parse_field(it.next(), "imaginary part")?;
            if n == 0 || n > rows || m == 0 || m > cols {
                return Err(Error::Parse(format!("entry index ({n}, {m}) out of range")));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Parse(format!("non-finite entry at ({n}, {m})")));
            }
            entries[(n - 1, m - 1)] = Complex64::new(re, im);
            seen += 1;
        }
        if seen != rows * cols {
            return Err(Error::Parse(format!(
                "expected {} entries, found {seen}",
                rows * cols
            )));
        }
        Ok(Self {
            entries,
            split,
            medium,
            provenance: Provenance::File,
        })
    }
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("malformed {what}")))
}

/// Background wavenumber k = omega sqrt(mu_b (eps_b + i sigma_b / omega)),
/// on the branch with Im k <= 0 so that e^{-ikR} decays with distance.
pub fn wavenumber(medium: &MediumSpec) -> Complex64 {
    let omega = medium.omega();
    let inner = Complex64::new(medium.eps_b(), medium.sigma_b() / omega) * medium.mu_b();
    let k = omega * inner.sqrt();
    if k.im > 0.0 {
        k.conj()
    } else {
        k
    }
}

/// Contrast of the anomaly against the background:
/// (eps - eps_b)/eps_b + i (sigma - sigma_b)/(omega eps_b).
pub fn contrast(medium: &MediumSpec, anomaly: &AnomalySpec) -> Complex64 {
    Complex64::new(
        (anomaly.eps() - medium.eps_b()) / medium.eps_b(),
        (anomaly.sigma() - medium.sigma_b()) / (medium.omega() * medium.eps_b()),
    )
}

/// Outcome of the small-anomaly condition 4 alpha (sqrt(eps/eps_b) - 1) < lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallAnomalyReport {
    pub pass: bool,
    /// Left side of the condition, in meters.
    pub lhs: f64,
    /// Wavelength 2 pi / Re(k), in meters.
    pub wavelength: f64,
    /// lhs / wavelength; below 1 passes.
    pub ratio: f64,
}

/// Checks the validity condition of the Born linearization. Failure is a
/// warning condition, not an error.
pub fn small_anomaly_check(medium: &MediumSpec, anomaly: &AnomalySpec) -> SmallAnomalyReport {
    let lhs = 4.0 * anomaly.radius() * ((anomaly.eps() / medium.eps_b()).sqrt() - 1.0);
    let wavelength = 2.0 * PI / wavenumber(medium).re;
    SmallAnomalyReport {
        pass: lhs < wavelength,
        lhs,
        wavelength,
        ratio: lhs / wavelength,
    }
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Incident field (i/4) H_0^(2)(k |antenna - point|).
pub fn incident_field(antenna: [f64; 2], point: [f64; 2], k: Complex64) -> Result<Complex64> {
    let d = distance(antenna, point);
    if d == 0.0 {
        return Err(Error::Coincidence(format!(
            "field point coincides with the antenna at ({}, {})",
            antenna[0], antenna[1]
        )));
    }
    Ok(Complex64::new(0.0, 0.25) * hankel0_2(k * d)?)
}

/// Far-field form of the incident field for an antenna on the circle of
/// radius R = |antenna|: (-1+i) e^{-ikR} / (4 sqrt(k pi R)) e^{ik theta . r}.
pub fn far_field_incident(antenna: [f64; 2], point: [f64; 2], k: Complex64) -> Result<Complex64> {
    let radius = (antenna[0] * antenna[0] + antenna[1] * antenna[1]).sqrt();
    if !(radius > 0.0) {
        return Err(Error::InvalidGeometry(
            "far-field antenna must sit on a circle of positive radius".into(),
        ));
    }
    let unit = [antenna[0] / radius, antenna[1] / radius];
    let i = Complex64::new(0.0, 1.0);
    let prefactor =
        Complex64::new(-1.0, 1.0) * (-i * k * radius).exp() / (4.0 * (k * PI * radius).sqrt());
    let phase = (i * k * (unit[0] * point[0] + unit[1] * point[1])).exp();
    Ok(prefactor * phase)
}

/// Evaluates the chosen incident-field kernel.
pub fn field_value(
    model: FieldModel,
    antenna: [f64; 2],
    point: [f64; 2],
    k: Complex64,
) -> Result<Complex64> {
    match model {
        FieldModel::ExactHankel => incident_field(antenna, point, k),
        FieldModel::FarField => far_field_incident(antenna, point, k),
    }
}

/// Born-approximate scattering matrix: entry (n, m) sums, over anomalies,
/// (i k^2 alpha^2 pi / (4 omega mu_b)) O E(a_n, r*) E(b_m, r*).
/// A single anomaly yields an exact rank-1 outer product.
pub fn born_scattering_matrix(
    split: &ArraySplit,
    medium: &MediumSpec,
    anomalies: &[AnomalySpec],
    model: FieldModel,
) -> Result<ScatteringMatrix> {
    if anomalies.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one anomaly is required".into(),
        ));
    }
    for (i, a) in anomalies.iter().enumerate() {
        for b in anomalies.iter().skip(i + 1) {
            if distance(a.center(), b.center()) <= a.radius() + b.radius() {
                return Err(Error::AnomalyOverlap(format!(
                    "anomalies at ({}, {}) and ({}, {}) are not disjoint",
                    a.center()[0],
                    a.center()[1],
                    b.center()[0],
                    b.center()[1]
                )));
            }
        }
    }
    let k = wavenumber(medium);
    let rx = split.rx_positions();
    let tx = split.tx_positions();
    let mut entries =
        DMatrix::from_element(rx.len(), tx.len(), Complex64::new(0.0, 0.0));
    for anomaly in anomalies {
        let coeff = Complex64::new(0.0, 1.0) * k * k * anomaly.radius() * anomaly.radius() * PI
            / (4.0 * medium.omega() * medium.mu_b())
            * contrast(medium, anomaly);
        let rx_fields: Vec<Complex64> = rx
            .iter()
            .map(|&a| field_value(model, a, anomaly.center(), k))
            .collect::<Result<_>>()?;
        let tx_fields: Vec<Complex64> = tx
            .iter()
            .map(|&b| field_value(model, b, anomaly.center(), k))
            .collect::<Result<_>>()?;
        for (n, ea) in rx_fields.iter().enumerate() {
            for (m, eb) in tx_fields.iter().enumerate() {
                // grouping the symmetric field product first keeps the
                // entry bit-identical under a transmit/receive role swap
                entries[(n, m)] += coeff * (ea * eb);
            }
        }
    }
    let provenance = match model {
        FieldModel::ExactHankel => Provenance::BornSynthetic,
        FieldModel::FarField => Provenance::FarFieldSynthetic,
    };
    Ok(ScatteringMatrix {
        entries,
        split: split.clone(),
        medium: *medium,
        provenance,
    })
}
