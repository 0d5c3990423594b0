//! Seeded random generators for spaces, step functions and functionals.
//!
//! All randomness in the crate goes through [`CaseRng`], ChaCha8 seeded from a
//! single `u64`, so every generated case replays identically on any machine.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equiconnect::SimplexWeights;
use crate::functionals::{Window, WindowedFunctional};
use crate::rational::{int, rat, Rational};
use crate::space::{validate_space, Space, SpaceMap, TestFunctional};
use crate::stepfn::StepFunction;

pub type CaseRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CaseRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for case `index` of a run seeded with `seed` (splitmix64 mixing).
pub fn case_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const DENOMINATORS: [i64; 8] = [2, 3, 4, 5, 6, 8, 10, 12];

/// Knobs bounding the size of generated objects; shrinking lowers them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Size {
    pub max_points: usize,
    pub max_pieces: usize,
    pub max_den: usize,
}

impl Size {
    pub const DEFAULT: Size = Size {
        max_points: 5,
        max_pieces: 6,
        max_den: DENOMINATORS.len(),
    };

    /// Successively smaller sizes, largest first, ending at the minimum.
    pub fn shrinks(self) -> Vec<Size> {
        let mut out = Vec::new();
        let mut s = self;
        loop {
            let next = Size {
                max_points: (s.max_points - 1).max(2),
                max_pieces: (s.max_pieces - 1).max(1),
                max_den: (s.max_den - 1).max(1),
            };
            if next == s {
                return out;
            }
            out.push(next);
            s = next;
        }
    }
}

impl Default for Size {
    fn default() -> Self {
        Size::DEFAULT
    }
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// A random metric on 2..=`size.max_points` points: random edge weights in
/// `(0, 1]` closed under shortest paths.
pub fn space(rng: &mut CaseRng, size: Size) -> Space {
    let n = rng.random_range(2..=size.max_points.max(2));
    let table = metric_table(rng, n);
    validate_space(labels(n), table).expect("shortest-path closure is a metric")
}

pub fn metric_table(rng: &mut CaseRng, n: usize) -> Vec<Vec<Rational>> {
    let mut d = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..i {
            let w = rat(rng.random_range(1..=12), 12);
            d[i][j] = w.clone();
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// A square table with the first triangle inequality broken: `d(p0,p1) = 1`
/// while `d(p0,p2) = d(p2,p1) = 1/4`.
pub fn corrupted_space(rng: &mut CaseRng) -> Space {
    let n = rng.random_range(3..=5);
    let mut d = metric_table(rng, n);
    let q = rat(1, 4);
    d[0][1] = int(1);
    d[1][0] = int(1);
    d[0][2] = q.clone();
    d[2][0] = q.clone();
    d[1][2] = q.clone();
    d[2][1] = q;
    crate::space::FiniteMetricSpace::new_unchecked(labels(n), d).expect("square table")
}

pub fn denominator(rng: &mut CaseRng, size: Size) -> i64 {
    DENOMINATORS[rng.random_range(0..size.max_den.clamp(1, DENOMINATORS.len()))]
}

/// A rational in `[0, 1]` with a small denominator.
pub fn unit_rational(rng: &mut CaseRng, size: Size) -> Rational {
    let den = denominator(rng, size);
    rat(rng.random_range(0..=den), den)
}

/// A rational in `(0, 1)`.
pub fn open_unit_rational(rng: &mut CaseRng, size: Size) -> Rational {
    let den = denominator(rng, size).max(2);
    rat(rng.random_range(1..den), den)
}

pub fn step(rng: &mut CaseRng, space: &Space, size: Size) -> StepFunction {
    let pieces = rng.random_range(1..=size.max_pieces.max(1));
    let den = denominator(rng, size) * rng.random_range(1..=2);
    let mut cuts: Vec<i64> = (0..pieces - 1).map(|_| rng.random_range(1..den)).collect();
    cuts.sort_unstable();
    cuts.dedup();
    let mut bps = vec![int(0)];
    bps.extend(cuts.iter().map(|&c| rat(c, den)));
    bps.push(int(1));
    let values = (0..bps.len() - 1)
        .map(|_| rng.random_range(0..space.len()))
        .collect();
    StepFunction::from_indices(space, bps, values).expect("generated breakpoints are valid")
}

pub fn functional(rng: &mut CaseRng, space: &Space) -> TestFunctional {
    let values = (0..space.len())
        .map(|_| rat(rng.random_range(-12..=12), 6))
        .collect();
    TestFunctional::from_values(space, values).expect("one value per point")
}

pub fn window(rng: &mut CaseRng, size: Size) -> Window {
    let den = denominator(rng, size);
    let a = rng.random_range(0..den);
    let b = rng.random_range(a + 1..=den);
    Window::new(rat(a, den), rat(b, den)).expect("a < b")
}

pub fn family(rng: &mut CaseRng, space: &Space, size: Size) -> Vec<WindowedFunctional> {
    let count = rng.random_range(1..=size.max_pieces.max(1));
    (0..count)
        .map(|_| WindowedFunctional::new(functional(rng, space), window(rng, size)))
        .collect()
}

pub fn map(rng: &mut CaseRng, domain: &Space, codomain: &Space) -> SpaceMap {
    let table = (0..domain.len())
        .map(|_| rng.random_range(0..codomain.len()))
        .collect();
    SpaceMap::from_indices(domain, codomain, table).expect("indices in range")
}

/// Random simplex weights; each coordinate is zero with probability
/// `zero_chance`, at least one stays positive.
pub fn weights(rng: &mut CaseRng, len: usize, zero_chance: f64) -> SimplexWeights {
    let mut raw: Vec<i64> = (0..len)
        .map(|_| {
            if rng.random_bool(zero_chance) {
                0
            } else {
                rng.random_range(1..=9)
            }
        })
        .collect();
    if raw.iter().all(|&w| w == 0) {
        let j = rng.random_range(0..len);
        raw[j] = rng.random_range(1..=9);
    }
    let total: i64 = raw.iter().sum();
    SimplexWeights::new(raw.into_iter().map(|w| rat(w, total)).collect())
        .expect("normalised weights")
}
