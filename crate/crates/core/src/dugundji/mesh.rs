//! Nested-square triangulations of the open interval and open square.
//!
//! Vertices sit on concentric "loops" around the centre `c = (1/2, ..)`: loop 0
//! is the centre, loop 1 is the square of half-width `1/16`, and loop `k >= 2`
//! is the square at sup-distance `2^-k` from the boundary. Ring `k` is the
//! closed region between loops `k` and `k + 1`; in the square it is
//! triangulated by zipping the two loops together in pseudo-angle order, so
//! adjacent rings share exactly the vertices of their common loop and the
//! triangulation is conforming.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::rational::{dyadic, half, int, rat, Rational};

pub type Point = Vec<Rational>;

/// A mesh vertex. The derived order (loop level, then lexicographic position)
/// is the global order on the index set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId {
    pub level: u32,
    pub position: Point,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplex {
    pub vertices: Vec<VertexId>,
}

/// Half-width of loop `level` around the centre.
pub fn loop_half_width(level: u32) -> Rational {
    match level {
        0 => Rational::zero(),
        1 => rat(1, 16),
        k => half() - dyadic(k),
    }
}

/// Sup-distance from loop `level` to the boundary.
pub fn loop_boundary_distance(level: u32) -> Rational {
    half() - loop_half_width(level)
}

/// Spacing of vertices along the sides of loop `level` in the square.
pub fn loop_spacing(level: u32) -> Rational {
    match level {
        0 | 1 => rat(1, 16),
        k => dyadic(k + 1),
    }
}

/// `min_i min(x_i, 1 - x_i)`: sup-distance to the boundary of the cube.
pub fn boundary_distance(x: &[Rational]) -> Rational {
    x.iter()
        .map(|c| c.clone().min(Rational::one() - c))
        .min()
        .expect("points have at least one coordinate")
}

pub fn sup_distance(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

pub fn in_cube(x: &[Rational]) -> bool {
    x.iter().all(|c| !c.is_negative() && *c <= Rational::one())
}

pub fn is_interior(x: &[Rational]) -> bool {
    in_cube(x) && boundary_distance(x).is_positive()
}

pub fn on_boundary(x: &[Rational]) -> bool {
    in_cube(x) && boundary_distance(x).is_zero()
}

/// Loop `level` in order: for the square, counter-clockwise from the
/// bottom-right corner.
pub fn loop_vertices(dim: usize, level: u32) -> Vec<VertexId> {
    let c = half();
    let h = loop_half_width(level);
    let id = |position: Point| VertexId { level, position };
    if level == 0 {
        return vec![id(vec![c; dim])];
    }
    if dim == 1 {
        return vec![id(vec![&c - &h]), id(vec![&c + &h])];
    }
    let s = loop_spacing(level);
    let m = ((&h * int(2)) / &s).to_integer();
    let m: i64 = i64::try_from(m).expect("loop size fits in i64");
    let (lo, hi) = (&c - &h, &c + &h);
    let step = |i: i64| &s * int(i);
    let mut out = Vec::with_capacity(4 * m as usize);
    for i in 0..m {
        out.push(id(vec![hi.clone(), &lo + step(i)]));
    }
    for i in 0..m {
        out.push(id(vec![&hi - step(i), hi.clone()]));
    }
    for i in 0..m {
        out.push(id(vec![lo.clone(), &hi - step(i)]));
    }
    for i in 0..m {
        out.push(id(vec![&lo + step(i), lo.clone()]));
    }
    out
}

/// Position on the perimeter of the unit square `[-1,1]^2`, in `[0, 8)`,
/// counter-clockwise from the corner `(1,-1)`. Monotone along every loop.
fn pseudo_angle(p: &[Rational]) -> Rational {
    let c = half();
    let (u, v) = (&p[0] - &c, &p[1] - &c);
    let m = u.abs().max(v.abs());
    let (w1, w2) = (&u / &m, &v / &m);
    let one = Rational::one();
    if w1 == one {
        w2 + int(1)
    } else if w2 == one {
        int(3) - w1
    } else if w1 == -one.clone() {
        int(5) - w2
    } else {
        w1 + int(7)
    }
}

/// Closed region between loops `level` and `level + 1`.
pub fn ring(dim: usize, level: u32) -> Vec<Simplex> {
    let inner = loop_vertices(dim, level);
    let outer = loop_vertices(dim, level + 1);
    if dim == 1 {
        let seg = |a: &VertexId, b: &VertexId| Simplex {
            vertices: vec![a.clone(), b.clone()],
        };
        return if level == 0 {
            vec![seg(&outer[0], &inner[0]), seg(&inner[0], &outer[1])]
        } else {
            vec![seg(&outer[0], &inner[0]), seg(&inner[1], &outer[1])]
        };
    }
    let tri = |a: &VertexId, b: &VertexId, c: &VertexId| Simplex {
        vertices: vec![a.clone(), b.clone(), c.clone()],
    };
    if level == 0 {
        let n = outer.len();
        return (0..n)
            .map(|j| tri(&inner[0], &outer[j], &outer[(j + 1) % n]))
            .collect();
    }
    zip_loops(&inner, &outer, tri)
}

fn zip_loops<F>(inner: &[VertexId], outer: &[VertexId], tri: F) -> Vec<Simplex>
where
    F: Fn(&VertexId, &VertexId, &VertexId) -> Simplex,
{
    let (na, nb) = (inner.len(), outer.len());
    let next_angle = |lp: &[VertexId], i: usize| {
        if i + 1 == lp.len() {
            int(8)
        } else {
            pseudo_angle(&lp[i + 1].position)
        }
    };
    let mut out = Vec::with_capacity(na + nb);
    let (mut i, mut j) = (0, 0);
    while i < na || j < nb {
        let advance_inner = if i == na {
            false
        } else if j == nb {
            true
        } else {
            next_angle(inner, i) <= next_angle(outer, j)
        };
        if advance_inner {
            out.push(tri(&inner[i], &inner[(i + 1) % na], &outer[j % nb]));
            i += 1;
        } else {
            out.push(tri(&inner[i % na], &outer[j], &outer[(j + 1) % nb]));
            j += 1;
        }
    }
    out
}

/// Barycentric coordinates of `x` in the simplex, one per vertex.
pub fn barycentric(simplex: &Simplex, x: &[Rational]) -> Vec<Rational> {
    let p: Vec<&Point> = simplex.vertices.iter().map(|v| &v.position).collect();
    match p.len() {
        2 => {
            let l0 = (&p[1][0] - &x[0]) / (&p[1][0] - &p[0][0]);
            let l1 = Rational::one() - &l0;
            vec![l0, l1]
        }
        3 => {
            let (x0, y0) = (&p[0][0], &p[0][1]);
            let (ax, ay) = (&p[1][0] - x0, &p[1][1] - y0);
            let (bx, by) = (&p[2][0] - x0, &p[2][1] - y0);
            let (dx, dy) = (&x[0] - x0, &x[1] - y0);
            let det = &ax * &by - &bx * &ay;
            let l1 = (&dx * &by - &bx * &dy) / &det;
            let l2 = (&ax * &dy - &dx * &ay) / &det;
            let l0 = Rational::one() - &l1 - &l2;
            vec![l0, l1, l2]
        }
        n => panic!("unsupported simplex with {n} vertices"),
    }
}

/// Twice the signed area (2D) or the signed length (1D).
pub fn signed_volume(simplex: &Simplex) -> Rational {
    let p: Vec<&Point> = simplex.vertices.iter().map(|v| &v.position).collect();
    match p.len() {
        2 => &p[1][0] - &p[0][0],
        3 => {
            (&p[1][0] - &p[0][0]) * (&p[2][1] - &p[0][1])
                - (&p[2][0] - &p[0][0]) * (&p[1][1] - &p[0][1])
        }
        n => panic!("unsupported simplex with {n} vertices"),
    }
}

/// Ring containing an interior point (the inner one when `x` lies on a loop).
pub fn ring_level(x: &[Rational]) -> u32 {
    let d = boundary_distance(x);
    if d >= loop_boundary_distance(1) {
        return 0;
    }
    if d >= loop_boundary_distance(2) {
        return 1;
    }
    let mut k = 2;
    while d < loop_boundary_distance(k + 1) {
        k += 1;
    }
    k
}

/// A simplex containing the interior point `x` with its barycentric
/// coordinates.
pub fn locate(dim: usize, x: &[Rational]) -> (Simplex, Vec<Rational>) {
    let level = ring_level(x);
    let local = if dim == 2 && level > 0 {
        local_triangles(level, x)
    } else {
        Vec::new()
    };
    let full = std::iter::once(()).flat_map(|_| ring(dim, level));
    for s in local.into_iter().chain(full) {
        let bary = barycentric(&s, x);
        if bary.iter().all(|l| !l.is_negative()) {
            return (s, bary);
        }
    }
    unreachable!("ring {level} does not cover its own points")
}

/// Number of vertices on loop `level >= 1` of the square.
fn loop_len(level: u32) -> usize {
    let m = ((loop_half_width(level) * int(2)) / loop_spacing(level)).to_integer();
    4 * usize::try_from(m).expect("loop size fits in usize")
}

/// Vertex `idx` of loop `level >= 1` of the square, as in [`loop_vertices`].
fn loop_vertex(level: u32, idx: usize) -> VertexId {
    let h = loop_half_width(level);
    let s = loop_spacing(level);
    let m = loop_len(level) / 4;
    let (lo, hi) = (half() - &h, half() + &h);
    let off = &s * int((idx % m) as i64);
    let position = match idx / m {
        0 => vec![hi, &lo + off],
        1 => vec![&hi - off, hi],
        2 => vec![lo, &hi - off],
        _ => vec![&lo + off, lo],
    };
    VertexId { level, position }
}

/// Largest index on loop `level` whose pseudo-angle is `<= theta`.
fn angle_index(level: u32, theta: &Rational) -> usize {
    let (mut lo, mut hi) = (0, loop_len(level));
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if pseudo_angle(&loop_vertex(level, mid).position) <= *theta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// The triangles of ring `level` whose zip state lies within a few steps of
/// the direction of `x`, plus those around angle 0. A triangle not containing
/// the centre covers exactly the directions between its vertices, so the one
/// containing `x` is among them.
fn local_triangles(level: u32, x: &[Rational]) -> Vec<Simplex> {
    let (na, nb) = (loop_len(level), loop_len(level + 1));
    let theta = pseudo_angle(x);
    let key = |l: u32, n: usize, i: usize| {
        if i + 1 >= n {
            int(8)
        } else {
            pseudo_angle(&loop_vertex(l, i + 1).position)
        }
    };
    let near = |n: usize, c: usize| -> Vec<usize> {
        let mut v: Vec<usize> = (c.saturating_sub(3)..=(c + 3).min(n))
            .chain(0..3.min(n))
            .chain(n.saturating_sub(3)..=n)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let (ia, jb) = (angle_index(level, &theta), angle_index(level + 1, &theta));
    let vertex = |l: u32, n: usize, i: usize| loop_vertex(l, i % n);
    let (is, js) = (near(na, ia), near(nb, jb));
    let keys = |l: u32, n: usize, idx: &[usize]| -> BTreeMap<usize, Rational> {
        idx.iter()
            .flat_map(|&i| [i.saturating_sub(1), i])
            .map(|i| (i, key(l, n, i)))
            .collect()
    };
    let (ka, kb) = (keys(level, na, &is), keys(level + 1, nb, &js));
    let mut out = Vec::new();
    for &i in &is {
        for &j in &js {
            if i == na && j == nb {
                continue;
            }
            // (i, j) lies on the merge path iff every consumed key precedes
            // every pending one (inner keys win ties)
            let consumed_ok = (i == 0 || j == nb || ka[&(i - 1)] <= kb[&j])
                && (j == 0 || i == na || kb[&(j - 1)] < ka[&i]);
            if !consumed_ok {
                continue;
            }
            let advance_inner = j == nb || (i < na && ka[&i] <= kb[&j]);
            let vertices = if advance_inner {
                vec![vertex(level, na, i), vertex(level, na, i + 1), vertex(level + 1, nb, j)]
            } else {
                vec![vertex(level, na, i), vertex(level + 1, nb, j), vertex(level + 1, nb, j + 1)]
            };
            out.push(Simplex { vertices });
        }
    }
    out
}

pub fn compare_points(a: &[Rational], b: &[Rational]) -> Ordering {
    a.cmp(b)
}
