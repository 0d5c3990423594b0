use std::fmt;

use num_traits::{One, Signed};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::mesh::{
    barycentric, boundary_distance, is_interior, on_boundary, ring_level, sup_distance, Point,
    Simplex, VertexId,
};
use super::DugundjiSystem;
use crate::gen;
use crate::rational::{format_point, int, rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// Cells inside the open cube, anchors on its boundary.
    Containment,
    /// Local finiteness with multiplicity at most `n + 1`.
    Multiplicity,
    /// `d(x, a_s) <= 2 d(x, ∂I^n)` on every cell.
    AnchorDistance,
    /// Weights positive on their cells and summing to 1.
    PartitionOfUnity,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Containment => "condition (1): containment",
            Condition::Multiplicity => "condition (2): multiplicity",
            Condition::AnchorDistance => "condition (3): anchor distance",
            Condition::PartitionOfUnity => "partition of unity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    /// Offending cell (its vertex), when one is identifiable.
    pub cell: Option<String>,
    pub witness: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub depth: u32,
    pub cells: usize,
    pub simplices: usize,
    pub points_checked: usize,
    pub max_multiplicity: usize,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

const SAMPLE_SEED: u64 = 0x4455_4755_4e44_4a49;

/// Checks conditions (1)-(3) and the partition of unity for every cell of
/// level `<= depth`.
///
/// Condition (3) is certified exactly at the vertices of each closed star.
/// Multiplicity is counted by brute force over all stars (bounding-box
/// filtered) at every mesh vertex, every simplex barycentre and a batch of
/// seeded random rational points, and must agree with [`DugundjiSystem::pou_eval`].
pub fn verify_system(sys: &DugundjiSystem, depth: u32) -> VerifyReport {
    let depth = depth.max(1);
    let dim = sys.dim();
    let stars = sys.stars(depth + 1);
    let mut violations = Vec::new();
    let mut cells = 0;

    for (v, simplices) in stars.iter().filter(|(v, _)| v.level <= depth) {
        cells += 1;
        let a = sys.anchor(v);
        let cell = Some(describe(v));
        if !on_boundary(&a) || a.len() != dim {
            violations.push(Violation {
                condition: Condition::Containment,
                cell: cell.clone(),
                witness: format_point(&a),
                detail: "anchor is not on the boundary".into(),
            });
        }
        for w in simplices.iter().flat_map(|s| &s.vertices) {
            if !is_interior(&w.position) {
                violations.push(Violation {
                    condition: Condition::Containment,
                    cell: cell.clone(),
                    witness: format_point(&w.position),
                    detail: "closed star leaves the open cube".into(),
                });
            }
            let h = sup_distance(&w.position, &a) - boundary_distance(&w.position) * int(2);
            if h.is_positive() {
                violations.push(Violation {
                    condition: Condition::AnchorDistance,
                    cell: cell.clone(),
                    witness: format_point(&w.position),
                    detail: format!(
                        "d(x,a) - 2 d(x,∂) = {} > 0 with a = {}",
                        crate::rational::format_rational(&h),
                        format_point(&a)
                    ),
                });
            }
        }
    }
    violations.dedup();

    let index: Vec<(&VertexId, &Vec<Simplex>, (Point, Point))> = stars
        .iter()
        .map(|(v, ss)| (v, ss, bounding_box(ss)))
        .collect();

    let mut points: Vec<Point> = Vec::new();
    let mut simplices = 0;
    for level in 0..=depth {
        for s in sys.ring(level) {
            simplices += 1;
            points.extend(s.vertices.iter().map(|v| v.position.clone()));
            points.push(barycentre(&s));
        }
    }
    let mut rng = gen::rng(SAMPLE_SEED ^ depth as u64 ^ ((dim as u64) << 32));
    for _ in 0..200 {
        points.push(random_point(&mut rng, dim, depth));
    }
    points.sort();
    points.dedup();

    let checked: Vec<(usize, Vec<Violation>)> = points
        .par_iter()
        .filter(|x| ring_level(x) <= depth)
        .map(|x| check_point(sys, &index, x))
        .collect();
    let max_multiplicity = checked.iter().map(|(m, _)| *m).max().unwrap_or(0);
    violations.extend(checked.into_iter().flat_map(|(_, v)| v));

    VerifyReport {
        n: dim,
        depth,
        cells,
        simplices,
        points_checked: points.len(),
        max_multiplicity,
        violations,
    }
}

type StarIndex<'a> = [(&'a VertexId, &'a Vec<Simplex>, (Point, Point))];

/// Multiplicity at `x` by brute force, and its agreement with `pou_eval`.
fn check_point(sys: &DugundjiSystem, index: &StarIndex, x: &Point) -> (usize, Vec<Violation>) {
    let dim = sys.dim();
    let mut violations = Vec::new();
    let containing: Vec<&VertexId> = index
        .iter()
        .filter(|(v, ss, bb)| in_box(x, bb) && in_open_star(v, ss, x))
        .map(|(v, _, _)| *v)
        .collect();
    if containing.len() > dim + 1 || containing.is_empty() {
        violations.push(Violation {
            condition: Condition::Multiplicity,
            cell: None,
            witness: format_point(x),
            detail: format!("point meets {} cells", containing.len()),
        });
    }
    match sys.pou_eval(x) {
        Ok(weights) => {
            let total: Rational = weights.iter().map(|(_, w)| w).sum();
            let support: Vec<&VertexId> = weights.iter().map(|(v, _)| v).collect();
            if !total.is_one()
                || weights.iter().any(|(_, w)| !w.is_positive())
                || support != containing
            {
                violations.push(Violation {
                    condition: Condition::PartitionOfUnity,
                    cell: None,
                    witness: format_point(x),
                    detail: format!(
                        "weights sum to {} on {} cells, point meets {} cells",
                        crate::rational::format_rational(&total),
                        support.len(),
                        containing.len()
                    ),
                });
            }
        }
        Err(e) => violations.push(Violation {
            condition: Condition::PartitionOfUnity,
            cell: None,
            witness: format_point(x),
            detail: e.to_string(),
        }),
    }
    (containing.len(), violations)
}

fn describe(v: &VertexId) -> String {
    format!("star of ({}) at level {}", format_point(&v.position), v.level)
}

fn barycentre(s: &Simplex) -> Point {
    let k = Rational::from_integer((s.vertices.len() as i64).into());
    let dim = s.vertices[0].position.len();
    (0..dim)
        .map(|i| s.vertices.iter().map(|v| &v.position[i]).sum::<Rational>() / &k)
        .collect()
}

fn bounding_box(simplices: &[Simplex]) -> (Point, Point) {
    let dim = simplices[0].vertices[0].position.len();
    let coords = |i: usize| simplices.iter().flat_map(|s| &s.vertices).map(move |v| &v.position[i]);
    let lo = (0..dim).map(|i| coords(i).min().unwrap().clone()).collect();
    let hi = (0..dim).map(|i| coords(i).max().unwrap().clone()).collect();
    (lo, hi)
}

fn in_box(x: &[Rational], (lo, hi): &(Point, Point)) -> bool {
    x.iter().zip(lo).zip(hi).all(|((c, l), h)| l <= c && c <= h)
}

/// Whether `x` has a positive barycentric coordinate for `centre` in some
/// simplex of its star.
fn in_open_star(centre: &VertexId, simplices: &[Simplex], x: &[Rational]) -> bool {
    simplices.iter().any(|s| {
        let bary = barycentric(s, x);
        bary.iter().all(|l| !l.is_negative())
            && s.vertices
                .iter()
                .zip(&bary)
                .any(|(v, l)| v == centre && l.is_positive())
    })
}

/// A random rational interior point no deeper than ring `depth`.
fn random_point(rng: &mut gen::CaseRng, dim: usize, depth: u32) -> Point {
    let min = super::mesh::loop_boundary_distance(depth + 1);
    loop {
        let den: i64 = rng.random_range(2..=97);
        let p: Point = (0..dim)
            .map(|_| rat(rng.random_range(1..den), den))
            .collect();
        if boundary_distance(&p) >= min {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dugundji::build_system;

    #[test]
    fn interval_passes_to_depth_ten() {
        let r = verify_system(&build_system(1).unwrap(), 10);
        assert!(r.is_ok(), "{:#?}", r.violations);
        assert_eq!(r.max_multiplicity, 2);
    }

    #[test]
    fn square_passes_to_depth_four() {
        let r = verify_system(&build_system(2).unwrap(), 4);
        assert!(r.is_ok(), "{:#?}", &r.violations[..r.violations.len().min(5)]);
        assert_eq!(r.max_multiplicity, 3);
    }

    #[test]
    fn corrupted_anchor_is_reported() {
        let v = VertexId {
            level: 2,
            position: vec![rat(1, 4)],
        };
        let sys = build_system(1).unwrap().with_anchor(v, vec![int(1)]);
        let r = verify_system(&sys, 4);
        let hit = r
            .violations
            .iter()
            .find(|v| v.condition == Condition::AnchorDistance && v.witness == "1/8")
            .expect("h(1/8) = 7/8 - 2/8 > 0");
        assert!(hit.detail.contains("5/8"));
        assert!(hit.cell.as_deref().unwrap().contains("1/4"));
    }
}
