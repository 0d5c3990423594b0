//! Dugundji systems for the open interval and the open square, and the
//! extension operator `F` built from `e_{n+1}`.
//!
//! A system is generated lazily from the nested triangulation in [`mesh`]:
//! the cells are the open vertex stars, the partition of unity is given by the
//! barycentric hat functions, and every vertex is anchored at its orthogonal
//! projection onto the nearest face of the cube. The metric on the cube is the
//! sup-metric throughout, which keeps every check exact:
//!
//! 1. cells lie in the open cube and anchors on its boundary,
//! 2. every point meets at most `n + 1` cells (one per vertex of its simplex),
//! 3. `x ∈ U_s ⇒ d(x, a_s) <= 2 d(x, ∂I^n)`.
//!
//! For (3), `h(x) = d(x, a_s) - 2 d(x, ∂I^n)` is a norm minus twice a minimum
//! of affine maps, hence convex on each simplex, so `h <= 0` at the simplex
//! vertices bounds it on the whole closed star.

mod extend;
pub mod mesh;
mod verify;

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_point, half, Rational};

pub use extend::{
    boundary_continuity_probe, dyadic_path, extend, shrink_probe, BoundaryData, ProbeReport,
    ShrinkCounterexample, ShrinkReport,
};
pub use mesh::{Point, Simplex, VertexId};
pub use verify::{verify_system, Condition, VerifyReport, Violation};

use mesh::{boundary_distance, in_cube, is_interior, loop_vertices, ring};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DugundjiSystem {
    dim: usize,
    anchor_overrides: BTreeMap<VertexId, Point>,
}

/// Builds the system for the open `n`-cube, `n ∈ {1, 2}`.
pub fn build_system(n: usize) -> Result<DugundjiSystem> {
    if !(1..=2).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    Ok(DugundjiSystem {
        dim: n,
        anchor_overrides: BTreeMap::new(),
    })
}

impl DugundjiSystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Re-anchors one vertex. Only useful for negative controls.
    pub fn with_anchor(mut self, vertex: VertexId, anchor: Point) -> Self {
        self.anchor_overrides.insert(vertex, anchor);
        self
    }

    /// Boundary anchor of a vertex: the projection onto the nearest face,
    /// ties broken by taking the lexicographically smallest projection.
    pub fn anchor(&self, v: &VertexId) -> Point {
        if let Some(a) = self.anchor_overrides.get(v) {
            return a.clone();
        }
        nearest_face_projection(&v.position)
    }

    pub fn vertices(&self, level: u32) -> Vec<VertexId> {
        loop_vertices(self.dim, level)
    }

    /// Simplices of the closed ring between loops `level` and `level + 1`.
    pub fn ring(&self, level: u32) -> Vec<Simplex> {
        ring(self.dim, level)
    }

    /// Closed star of every vertex of level `<= depth`, keyed in global order.
    pub fn stars(&self, depth: u32) -> BTreeMap<VertexId, Vec<Simplex>> {
        let mut stars: BTreeMap<VertexId, Vec<Simplex>> = BTreeMap::new();
        for level in 0..=depth {
            for s in self.ring(level) {
                for v in &s.vertices {
                    if v.level <= depth {
                        stars.entry(v.clone()).or_default().push(s.clone());
                    }
                }
            }
        }
        stars
    }

    /// Anchors of all vertices with level `<= depth`, deduplicated.
    pub fn anchors_up_to(&self, depth: u32) -> Vec<Point> {
        let mut out: Vec<Point> = (0..=depth)
            .flat_map(|l| self.vertices(l))
            .map(|v| self.anchor(&v))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn check_point(&self, x: &[Rational]) -> Result<()> {
        if x.len() != self.dim || !in_cube(x) {
            return Err(Error::OutsideCube(format_point(x)));
        }
        Ok(())
    }

    /// Nonzero partition-of-unity weights at an interior point, in global
    /// order. At most `n + 1` entries; they sum to exactly 1.
    pub fn pou_eval(&self, x: &[Rational]) -> Result<Vec<(VertexId, Rational)>> {
        self.check_point(x)?;
        if !is_interior(x) {
            return Err(Error::NotInterior(format_point(x)));
        }
        let (simplex, bary) = mesh::locate(self.dim, x);
        let mut out: Vec<(VertexId, Rational)> = simplex
            .vertices
            .into_iter()
            .zip(bary)
            .filter(|(_, w)| !w.is_zero())
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }
}

fn nearest_face_projection(x: &[Rational]) -> Point {
    let d = boundary_distance(x);
    let mut best: Option<Point> = None;
    for (i, c) in x.iter().enumerate() {
        for face in [Rational::zero(), Rational::one()] {
            let gap = if face.is_zero() {
                c.clone()
            } else {
                Rational::one() - c
            };
            if gap == d {
                let mut p = x.to_vec();
                p[i] = face;
                if best.as_ref().is_none_or(|b| p < *b) {
                    best = Some(p);
                }
            }
        }
    }
    best.expect("some face realises the boundary distance")
}

/// Centre of the cube.
pub fn centre(dim: usize) -> Point {
    vec![half(); dim]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn vid(level: u32, pos: &[Rational]) -> VertexId {
        VertexId {
            level,
            position: pos.to_vec(),
        }
    }

    #[test]
    fn only_low_dimensions() {
        assert!(build_system(1).is_ok());
        assert!(build_system(2).is_ok());
        assert_eq!(build_system(3), Err(Error::UnsupportedDimension(3)));
        assert_eq!(build_system(0), Err(Error::UnsupportedDimension(0)));
    }

    #[test]
    fn anchors() {
        let s1 = build_system(1).unwrap();
        assert_eq!(s1.anchor(&vid(2, &[rat(1, 4)])), vec![int(0)]);
        assert_eq!(s1.anchor(&vid(0, &[rat(1, 2)])), vec![int(0)]);
        assert_eq!(s1.anchor(&vid(1, &[rat(9, 16)])), vec![int(1)]);
        let s2 = build_system(2).unwrap();
        assert_eq!(
            s2.anchor(&vid(3, &[rat(1, 8), rat(3, 8)])),
            vec![int(0), rat(3, 8)]
        );
        // corner of a loop: tie between the left and bottom faces
        assert_eq!(
            s2.anchor(&vid(3, &[rat(1, 8), rat(1, 8)])),
            vec![int(0), rat(1, 8)]
        );
        assert_eq!(s2.anchor(&vid(0, &[half(), half()])), vec![int(0), half()]);
    }

    #[test]
    fn interval_point_in_two_cells() {
        let s = build_system(1).unwrap();
        let w = s.pou_eval(&[rat(3, 8)]).unwrap();
        assert_eq!(w.len(), 2);
        let vs: Vec<_> = w.iter().map(|(v, _)| v.position[0].clone()).collect();
        assert!(vs.contains(&rat(1, 4)) && vs.contains(&rat(7, 16)));
    }

    #[test]
    fn pou_examples() {
        let s = build_system(1).unwrap();
        assert_eq!(s.pou_eval(&[rat(1, 4)]).unwrap(), vec![(vid(2, &[rat(1, 4)]), int(1))]);
        let w = s.pou_eval(&[rat(3, 16)]).unwrap();
        assert_eq!(w.iter().map(|e| e.1.clone()).collect::<Vec<_>>(), vec![rat(1, 2), rat(1, 2)]);
        let s2 = build_system(2).unwrap();
        let w = s2.pou_eval(&[rat(1, 3), rat(1, 3)]).unwrap();
        assert!(w.len() <= 3);
        assert_eq!(w.iter().map(|e| &e.1).sum::<Rational>(), int(1));
        assert!(w.windows(2).all(|p| p[0].0 < p[1].0));
        assert!(s.pou_eval(&[int(0)]).is_err());
        assert!(s.pou_eval(&[rat(3, 2)]).is_err());
        assert!(s2.pou_eval(&[rat(1, 2)]).is_err());
    }

    #[test]
    fn interior_triangle_points_meet_three_stars() {
        let s = build_system(2).unwrap();
        for t in s.ring(3).iter().take(20) {
            let third = rat(1, 3);
            let x: Point = (0..2)
                .map(|i| t.vertices.iter().map(|v| &v.position[i] * &third).sum())
                .collect();
            assert_eq!(s.pou_eval(&x).unwrap().len(), 3);
        }
    }
}
