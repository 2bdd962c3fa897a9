//! Antenna arrays on a circle, transmit/receive subset selection, and the
//! masked region-of-interest grid.

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Ordered antenna positions on a circle of radius R.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaArray {
    radius: f64,
    angles: Vec<f64>,
    positions: Vec<[f64; 2]>,
}

impl AntennaArray {
    /// Builds an array from explicit angles (radians). Angles must be
    /// distinct modulo 2 pi and the radius positive.
    pub fn new(radius: f64, angles: Vec<f64>) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "array radius must be positive, got {radius}"
            )));
        }
        if angles.is_empty() {
            return Err(Error::InvalidGeometry("array needs at least one antenna".into()));
        }
        let mut wrapped: Vec<f64> = angles.iter().map(|a| a.rem_euclid(TWO_PI)).collect();
        wrapped.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in wrapped.windows(2) {
            if (w[1] - w[0]).abs() < 1e-12 {
                return Err(Error::InvalidGeometry(format!(
                    "antenna angles coincide modulo 2 pi near {} rad",
                    w[0]
                )));
            }
        }
        let positions = angles
            .iter()
            .map(|&a| [radius * a.cos(), radius * a.sin()])
            .collect();
        Ok(Self {
            radius,
            angles,
            positions,
        })
    }

    /// S antennas arranged uniformly with theta_s = 3 pi/2 - 2 (s-1) pi / S,
    /// s = 1..=S, at positions R (cos theta_s, sin theta_s).
    pub fn uniform_circle(count: usize, radius: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidGeometry(
                "antenna count must be at least 1".into(),
            ));
        }
        let angles = (1..=count)
            .map(|s| 1.5 * std::f64::consts::PI - 2.0 * (s - 1) as f64 * std::f64::consts::PI / count as f64)
            .collect();
        Self::new(radius, angles)
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    /// Position of antenna `id` (1-based, matching the configuration and
    /// report convention).
    pub fn position(&self, id: usize) -> Result<[f64; 2]> {
        self.check_id(id)?;
        Ok(self.positions[id - 1])
    }

    /// Angle of antenna `id` (1-based).
    pub fn angle(&self, id: usize) -> Result<f64> {
        self.check_id(id)?;
        Ok(self.angles[id - 1])
    }

    fn check_id(&self, id: usize) -> Result<()> {
        if id == 0 || id > self.len() {
            return Err(Error::IndexOutOfBounds(format!(
                "antenna id {id} not in 1..={}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// A disjoint transmit/receive partition of an antenna array. Index sets
/// hold 1-based antenna ids in caller order.
#[derive(Debug, Clone, PartialEq)]
pub struct ArraySplit {
    array: AntennaArray,
    tx: Vec<usize>,
    rx: Vec<usize>,
}

impl ArraySplit {
    pub fn new(array: AntennaArray, tx: &[usize], rx: &[usize]) -> Result<Self> {
        if tx.is_empty() || rx.is_empty() {
            return Err(Error::InvalidGeometry(
                "transmit and receive sets must both be non-empty".into(),
            ));
        }
        for &set in &[tx, rx] {
            for &id in set {
                if id == 0 || id > array.len() {
                    return Err(Error::IndexOutOfBounds(format!(
                        "antenna id {id} not in 1..={}",
                        array.len()
                    )));
                }
            }
            let mut sorted = set.to_vec();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate antenna id in index set {set:?}"
                )));
            }
        }
        if let Some(id) = tx.iter().find(|id| rx.contains(id)) {
            return Err(Error::SplitOverlap(format!(
                "antenna {id} appears in both the transmit and receive sets"
            )));
        }
        Ok(Self {
            array,
            tx: tx.to_vec(),
            rx: rx.to_vec(),
        })
    }

    pub fn array(&self) -> &AntennaArray {
        &self.array
    }

    pub fn radius(&self) -> f64 {
        self.array.radius()
    }

    /// Number of transmitters (M).
    pub fn tx_count(&self) -> usize {
        self.tx.len()
    }

    /// Number of receivers (N).
    pub fn rx_count(&self) -> usize {
        self.rx.len()
    }

    pub fn tx_ids(&self) -> &[usize] {
        &self.tx
    }

    pub fn rx_ids(&self) -> &[usize] {
        &self.rx
    }

    pub fn tx_positions(&self) -> Vec<[f64; 2]> {
        self.tx.iter().map(|&id| self.array.positions()[id - 1]).collect()
    }

    pub fn rx_positions(&self) -> Vec<[f64; 2]> {
        self.rx.iter().map(|&id| self.array.positions()[id - 1]).collect()
    }

    pub fn tx_angles(&self) -> Vec<f64> {
        self.tx.iter().map(|&id| self.array.angles()[id - 1]).collect()
    }

    pub fn rx_angles(&self) -> Vec<f64> {
        self.rx.iter().map(|&id| self.array.angles()[id - 1]).collect()
    }
}

/// Uniform Cartesian lattice intersected with the ROI disk. The lattice is
/// anchored at the origin so the disk's point symmetry is exact; points are
/// enumerated row-major (y outer, x inner), both ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiGrid {
    radius: f64,
    step: f64,
    half_cells: usize,
    points: Vec<[f64; 2]>,
    mask: Vec<bool>,
}

impl RoiGrid {
    pub fn new(radius: f64, step: f64) -> Result<Self> {
        if !(radius > 0.0) || !(step > 0.0) || !radius.is_finite() || !step.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid radius and step must be positive, got radius {radius}, step {step}"
            )));
        }
        if step > radius {
            return Err(Error::InvalidParameter(format!(
                "grid step {step} exceeds the ROI radius {radius}"
            )));
        }
        let half_cells = (radius / step).floor() as usize;
        let side = 2 * half_cells + 1;
        let mut points = Vec::new();
        let mut mask = Vec::with_capacity(side * side);
        let r2 = radius * radius;
        for j in -(half_cells as i64)..=(half_cells as i64) {
            let y = j as f64 * step;
            for i in -(half_cells as i64)..=(half_cells as i64) {
                let x = i as f64 * step;
                let inside = x * x + y * y <= r2;
                mask.push(inside);
                if inside {
                    points.push([x, y]);
                }
            }
        }
        Ok(Self {
            radius,
            step,
            half_cells,
            points,
            mask,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    /// Disk membership of the bounding-box lattice, row-major.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Cells per bounding-box side (2 floor(radius/step) + 1).
    pub fn side(&self) -> usize {
        2 * self.half_cells + 1
    }

    /// True when both grids enumerate the identical lattice.
    pub fn same_lattice(&self, other: &RoiGrid) -> bool {
        self.radius == other.radius && self.step == other.step && self.len() == other.len()
    }

    /// Largest |r - r_ref| over the grid, used to size series truncations.
    pub fn max_distance_from(&self, r_ref: [f64; 2]) -> f64 {
        self.points
            .iter()
            .map(|p| ((p[0] - r_ref[0]).powi(2) + (p[1] - r_ref[1]).powi(2)).sqrt())
            .fold(0.0, f64::max)
    }
}
