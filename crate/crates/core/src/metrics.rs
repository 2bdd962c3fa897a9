//! Jaccard-index evaluation of imaging maps against ground-truth anomaly
//! supports on the ROI grid.

use crate::error::{Error, Result};
use crate::forward::AnomalySpec;
use crate::geometry::RoiGrid;
use crate::imaging::ImagingMap;

/// A subset of grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySupport {
    grid: RoiGrid,
    members: Vec<bool>,
}

impl BinarySupport {
    pub fn grid(&self) -> &RoiGrid {
        &self.grid
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|m| **m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }
}

/// Grid points inside some anomaly disk. A tiny anomaly that captures no
/// lattice point yields an empty support; callers should warn on that.
pub fn truth_support(grid: &RoiGrid, anomalies: &[AnomalySpec]) -> BinarySupport {
    let members = grid
        .points()
        .iter()
        .map(|p| {
            anomalies.iter().any(|a| {
                let dx = p[0] - a.center()[0];
                let dy = p[1] - a.center()[1];
                dx * dx + dy * dy <= a.radius() * a.radius()
            })
        })
        .collect();
    BinarySupport {
        grid: grid.clone(),
        members,
    }
}

/// Grid points whose normalized map value reaches the threshold.
pub fn threshold_support(map: &ImagingMap, zeta: f64) -> Result<BinarySupport> {
    if !map.is_normalized() {
        return Err(Error::InvalidParameter(
            "threshold_support requires a normalized map".into(),
        ));
    }
    if !(0.0..=1.0).contains(&zeta) {
        return Err(Error::InvalidParameter(format!(
            "threshold must lie in [0, 1], got {zeta}"
        )));
    }
    let members = map.values().iter().map(|&v| v >= zeta).collect();
    Ok(BinarySupport {
        grid: map.grid().clone(),
        members,
    })
}

/// Intersection over union in percent; 0 when both sets are empty.
pub fn jaccard(a: &BinarySupport, b: &BinarySupport) -> Result<f64> {
    if !a.grid.same_lattice(&b.grid) {
        return Err(Error::GridMismatch(
            "supports live on different grids".into(),
        ));
    }
    let mut inter = 0usize;
    let mut union = 0usize;
    for (&x, &y) in a.members.iter().zip(&b.members) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    if union == 0 {
        return Ok(0.0);
    }
    Ok(100.0 * inter as f64 / union as f64)
}

/// Jaccard index of the thresholded map against the truth at each threshold.
pub fn jaccard_curve(
    map: &ImagingMap,
    truth: &BinarySupport,
    zetas: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if zetas.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "threshold list must be sorted ascending".into(),
        ));
    }
    zetas
        .iter()
        .map(|&z| {
            let support = threshold_support(map, z)?;
            Ok((z, jaccard(&support, truth)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{normalize_map, MapKind};

    fn grid() -> RoiGrid {
        RoiGrid::new(0.08, 0.001).unwrap()
    }

    #[test]
    fn truth_support_matches_brute_force_count() {
        let g = grid();
        let a = AnomalySpec::new([0.01, 0.03], 0.01, 55.0, 1.2).unwrap();
        let s = truth_support(&g, &[a]);
        let brute = g
            .points()
            .iter()
            .filter(|p| {
                let dx = p[0] - 0.01;
                let dy = p[1] - 0.03;
                dx * dx + dy * dy <= 0.01 * 0.01
            })
            .count();
        assert_eq!(s.count(), brute);
        assert!(brute > 300 && brute < 330); // ~ pi (alpha/step)^2 cells
    }

    #[test]
    fn truth_support_union_and_tiny_anomaly() {
        let g = grid();
        let a1 = AnomalySpec::new([0.01, 0.03], 0.01, 55.0, 1.2).unwrap();
        let a2 = AnomalySpec::new([-0.04, -0.02], 0.01, 45.0, 1.0).unwrap();
        let both = truth_support(&g, &[a1, a2]);
        let s1 = truth_support(&g, &[a1]);
        let s2 = truth_support(&g, &[a2]);
        let union: Vec<bool> = s1
            .members()
            .iter()
            .zip(s2.members())
            .map(|(&a, &b)| a || b)
            .collect();
        assert_eq!(both.members(), union.as_slice());
        // permutation invariance
        let swapped = truth_support(&g, &[a2, a1]);
        assert_eq!(both.members(), swapped.members());

        // an anomaly between lattice points captures nothing
        let tiny = AnomalySpec::new([0.0105, 0.0305], 3e-4, 55.0, 1.2).unwrap();
        let coarse = RoiGrid::new(0.08, 0.001).unwrap();
        assert!(truth_support(&coarse, &[tiny]).is_empty());
    }

    #[test]
    fn threshold_support_levels() {
        let g = RoiGrid::new(0.02, 0.01).unwrap();
        let values: Vec<f64> = (0..g.len()).map(|i| (i + 1) as f64).collect();
        let map = ImagingMap::from_values(g.clone(), values, MapKind::Combined, false, 1e8).unwrap();
        let norm = normalize_map(&map).unwrap();
        assert_eq!(threshold_support(&norm, 0.0).unwrap().count(), g.len());
        assert_eq!(threshold_support(&norm, 1.0).unwrap().count(), 1);
        assert!(threshold_support(&norm, 1.5).is_err());
        assert!(threshold_support(&map, 0.5).is_err()); // not normalized
        // hand-computed level set at 0.5
        let half = threshold_support(&norm, 0.5).unwrap();
        let expect = norm.values().iter().filter(|&&v| v >= 0.5).count();
        assert_eq!(half.count(), expect);
    }

    #[test]
    fn jaccard_basics() {
        let g = RoiGrid::new(0.02, 0.01).unwrap();
        let a = AnomalySpec::new([0.0, 0.0], 0.015, 55.0, 1.2).unwrap();
        let s = truth_support(&g, &[a]);
        assert_eq!(jaccard(&s, &s).unwrap(), 100.0);

        // disjoint sets score zero
        let other = BinarySupport {
            grid: g.clone(),
            members: s.members().iter().map(|&m| !m).collect(),
        };
        assert_eq!(jaccard(&s, &other).unwrap(), 0.0);
        // symmetric
        assert_eq!(jaccard(&other, &s).unwrap(), jaccard(&s, &other).unwrap());

        // |a| = |b| = 30 with 15 shared: 15/45
        let g2 = RoiGrid::new(0.08, 0.01).unwrap();
        let mut ma = vec![false; g2.len()];
        let mut mb = vec![false; g2.len()];
        for i in 0..30 {
            ma[i] = true;
            mb[i + 15] = true;
        }
        let sa = BinarySupport { grid: g2.clone(), members: ma };
        let sb = BinarySupport { grid: g2.clone(), members: mb };
        let j = jaccard(&sa, &sb).unwrap();
        assert!((j - 100.0 * 15.0 / 45.0).abs() < 1e-12);

        // both empty: defined as zero
        let ea = BinarySupport { grid: g2.clone(), members: vec![false; g2.len()] };
        let eb = BinarySupport { grid: g2, members: vec![false; ea.members.len()] };
        assert_eq!(jaccard(&ea, &eb).unwrap(), 0.0);

        // grid mismatch rejected
        let g3 = RoiGrid::new(0.08, 0.02).unwrap();
        let sc = BinarySupport { grid: g3.clone(), members: vec![false; g3.len()] };
        assert!(matches!(jaccard(&sa, &sc), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn curve_against_indicator_map() {
        let g = grid();
        let a = AnomalySpec::new([0.01, 0.03], 0.01, 55.0, 1.2).unwrap();
        let truth = truth_support(&g, &[a]);
        let values: Vec<f64> = truth.members().iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        let map = ImagingMap::from_values(g.clone(), values, MapKind::Combined, true, 1e8).unwrap();
        let zetas: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        for (_, j) in jaccard_curve(&map, &truth, &zetas).unwrap() {
            assert_eq!(j, 100.0);
        }

        // constant map: curve sits at |truth|/|grid|
        let ones = ImagingMap::from_values(g.clone(), vec![1.0; g.len()], MapKind::Combined, true, 1e8)
            .unwrap();
        let want = 100.0 * truth.count() as f64 / g.len() as f64;
        for (_, j) in jaccard_curve(&ones, &truth, &zetas).unwrap() {
            assert!((j - want).abs() < 1e-12);
        }

        // at zeta = 1 the curve equals the argmax-set Jaccard
        let mut values = vec![0.5; g.len()];
        values[10] = 1.0;
        let peaked =
            ImagingMap::from_values(g.clone(), values, MapKind::Combined, true, 1e8).unwrap();
        let curve = jaccard_curve(&peaked, &truth, &[1.0]).unwrap();
        let argmax_set = threshold_support(&peaked, 1.0).unwrap();
        assert_eq!(curve[0].1, jaccard(&argmax_set, &truth).unwrap());

        // unsorted thresholds rejected
        assert!(jaccard_curve(&peaked, &truth, &[0.5, 0.2]).is_err());
    }
}
