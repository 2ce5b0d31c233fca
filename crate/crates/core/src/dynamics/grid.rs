use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Rectangular, cell-centred discretization of `[q_min, q_max] × [p_min, p_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nq: usize,
    pub np: usize,
}

pub const MIN_POINTS: usize = 8;

impl GridGeometry {
    pub fn new(q_min: f64, q_max: f64, p_min: f64, p_max: f64, nq: usize, np: usize) -> Result<Self> {
        let g = GridGeometry { q_min, q_max, p_min, p_max, nq, np };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.q_min, self.q_max, self.p_min, self.p_max].iter().all(|x| x.is_finite());
        if !finite || self.q_min >= self.q_max || self.p_min >= self.p_max {
            return Err(Error::InvalidParameter { name: "grid bounds", reason: "must be finite and strictly ordered" });
        }
        if self.nq < MIN_POINTS || self.np < MIN_POINTS {
            return Err(Error::InvalidParameter { name: "grid size", reason: "need at least 8 points per axis" });
        }
        Ok(())
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / self.nq as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.np as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dq() * self.dp()
    }

    #[inline]
    pub fn q(&self, i: usize) -> f64 {
        self.q_min + (i as f64 + 0.5) * self.dq()
    }

    #[inline]
    pub fn p(&self, j: usize) -> f64 {
        self.p_min + (j as f64 + 0.5) * self.dp()
    }

    pub fn len(&self) -> usize {
        self.nq * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, q: f64, p: f64) -> bool {
        (self.q_min..=self.q_max).contains(&q) && (self.p_min..=self.p_max).contains(&p)
    }

    /// Node coordinates in storage order.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.nq).flat_map(move |i| (0..self.np).map(move |j| (self.q(i), self.p(j))))
    }

    /// Same bounds, each axis refined by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        GridGeometry { nq: self.nq * factor, np: self.np * factor, ..*self }
    }
}

/// Discretized Wigner function at time `t`.
///
/// Values are stored row-major with `q` as the slow index:
/// `values[i * np + j] = w(q_i, p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    geometry: GridGeometry,
    values: Vec<f64>,
    t: f64,
}

impl PhaseGrid {
    pub fn zeros(geometry: GridGeometry, t: f64) -> Result<Self> {
        geometry.validate()?;
        Ok(PhaseGrid { geometry, values: vec![0.0; geometry.len()], t })
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(geometry: GridGeometry, t: f64, f: F) -> Result<Self> {
        geometry.validate()?;
        let values = geometry.nodes().map(|(q, p)| f(q, p)).collect();
        Ok(PhaseGrid { geometry, values, t })
    }

    pub fn from_values(geometry: GridGeometry, t: f64, values: Vec<f64>) -> Result<Self> {
        geometry.validate()?;
        if values.len() != geometry.len() {
            return Err(Error::InvalidParameter { name: "grid values", reason: "length must equal nq * np" });
        }
        Ok(PhaseGrid { geometry, values, t })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub(crate) fn storage_mut(&mut self) -> &mut Vec<f64> {
        &mut self.values
    }

    pub(crate) fn set_t(&mut self, t: f64) {
        self.t = t;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.geometry.np + j]
    }

    /// Midpoint-rule `∫∫ w dq dp`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.geometry.cell_area()
    }

    /// Midpoint-rule `∫∫ |w| dq dp`.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.geometry.cell_area()
    }

    /// Midpoint-rule `∫∫ |self − other| dq dp` on a shared geometry.
    pub fn l1_distance(&self, other: &PhaseGrid) -> Result<f64> {
        if self.geometry != other.geometry {
            return Err(Error::InvalidParameter { name: "grid geometry", reason: "grids must share geometry" });
        }
        let sum: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).sum();
        Ok(sum * self.geometry.cell_area())
    }

    /// `(q, p, w)` triples in storage order.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.geometry.nodes().zip(&self.values).map(|((q, p), w)| (q, p, *w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_validation() {
        assert!(GridGeometry::new(0.0, 1.0, 0.0, 1.0, 8, 8).is_ok());
        assert!(GridGeometry::new(1.0, 1.0, 0.0, 1.0, 8, 8).is_err());
        assert!(GridGeometry::new(0.0, 1.0, 2.0, 1.0, 8, 8).is_err());
        assert!(GridGeometry::new(0.0, 1.0, 0.0, 1.0, 7, 8).is_err());
        assert!(GridGeometry::new(0.0, f64::INFINITY, 0.0, 1.0, 8, 8).is_err());
    }

    #[test]
    fn nodes_are_cell_centred() {
        let g = GridGeometry::new(-1.0, 1.0, 0.0, 4.0, 8, 16).unwrap();
        assert_eq!(g.q(0), -0.875);
        assert_eq!(g.p(15), 3.875);
        assert_eq!(g.nodes().count(), 128);
        assert_eq!(g.nodes().nth(1), Some((-0.875, 0.375)));
    }

    #[test]
    fn constant_grid_mass_is_area() {
        let g = GridGeometry::new(-1.0, 2.0, 0.0, 4.0, 10, 12).unwrap();
        let grid = PhaseGrid::from_fn(g, 0.0, |_, _| 0.5).unwrap();
        assert!((grid.mass() - 6.0).abs() < 1e-12);
        assert_eq!(grid.l1_distance(&grid).unwrap(), 0.0);
    }
}
