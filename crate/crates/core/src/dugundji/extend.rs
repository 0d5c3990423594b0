use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use super::mesh::{in_cube, on_boundary, Point};
use super::DugundjiSystem;
use crate::equiconnect::{e1, e_n, SimplexWeights};
use crate::error::{Error, Result};
use crate::functionals::{pseudometric, WindowedFunctional};
use crate::gen;
use crate::rational::{dyadic, format_point, format_rational, half, rat, Rational};
use crate::space::{ensure_same, Space};
use crate::stepfn::{hm_distance, StepFunction};

/// Values of a boundary map `∂I^n -> HM X` at finitely many boundary points:
/// every anchor the extension will consult, plus any points probed directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryData {
    dim: usize,
    space: Space,
    values: BTreeMap<Point, StepFunction>,
}

impl BoundaryData {
    pub fn new<I>(dim: usize, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Point, StepFunction)>,
    {
        let values: BTreeMap<Point, StepFunction> = values.into_iter().collect();
        let space = values
            .values()
            .next()
            .ok_or_else(|| Error::MissingBoundaryValue("any point".into()))?
            .space()
            .clone();
        for (p, f) in &values {
            if p.len() != dim || !on_boundary(p) {
                return Err(Error::OutsideCube(format!("{} (not on the boundary)", format_point(p))));
            }
            ensure_same(&space, f.space())?;
        }
        Ok(BoundaryData { dim, space, values })
    }

    /// Tabulates `f` at every anchor of level `<= depth` and at `extra` points.
    pub fn from_fn<F>(sys: &DugundjiSystem, depth: u32, extra: &[Point], f: F) -> Result<Self>
    where
        F: Fn(&Point) -> StepFunction,
    {
        let points = sys.anchors_up_to(depth).into_iter().chain(extra.iter().cloned());
        Self::new(sys.dim(), points.map(|p| {
            let v = f(&p);
            (p, v)
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn get(&self, p: &[Rational]) -> Option<&StepFunction> {
        self.values.get(p)
    }

    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.values.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Point, &StepFunction)> {
        self.values.iter()
    }

    fn require(&self, p: &[Rational]) -> Result<&StepFunction> {
        self.get(p)
            .ok_or_else(|| Error::MissingBoundaryValue(format_point(p)))
    }
}

/// The extension `F`: `f(x)` on the boundary; inside, `e_{n+1}` of the anchor
/// values of the cells containing `x`, weighted by the partition of unity and
/// taken in the global order. Unused slots are padded with weight 0.
pub fn extend(sys: &DugundjiSystem, data: &BoundaryData, x: &[Rational]) -> Result<StepFunction> {
    if x.len() != sys.dim() || !in_cube(x) {
        return Err(Error::OutsideCube(format_point(x)));
    }
    if data.dim() != sys.dim() {
        return Err(Error::UnsupportedDimension(data.dim()));
    }
    if on_boundary(x) {
        return data.require(x).cloned();
    }
    let active = sys.pou_eval(x)?;
    let mut points = Vec::with_capacity(sys.dim() + 1);
    let mut weights = Vec::with_capacity(sys.dim() + 1);
    for (v, w) in &active {
        points.push(data.require(&sys.anchor(v))?.clone());
        weights.push(w.clone());
    }
    while points.len() < sys.dim() + 1 {
        points.push(points[points.len() - 1].clone());
        weights.push(Rational::zero());
    }
    e_n(&points, &SimplexWeights::new(weights)?)
}

/// `p + 2^(1-m) (c - p)` for `m = 1..=steps`: a path of interior points
/// converging to the boundary point `p` with geometrically shrinking steps.
pub fn dyadic_path(p: &[Rational], steps: u32) -> Vec<Point> {
    let c = half();
    (1..=steps)
        .map(|m| {
            let k = dyadic(m - 1);
            p.iter().map(|pi| pi + (&c - pi) * &k).collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub point: String,
    pub tolerance: String,
    pub distances: Vec<String>,
    /// First index from which every distance is below the tolerance.
    pub settled_from: Option<usize>,
    pub tail_below_tolerance: bool,
    #[serde(skip)]
    pub exact: Vec<Rational>,
}

/// Evaluates `F` along `path` and reports `d_HM(F(x_m), f(p))` per sample.
pub fn boundary_continuity_probe(
    sys: &DugundjiSystem,
    data: &BoundaryData,
    p: &[Rational],
    path: &[Point],
    tol: &Rational,
) -> Result<ProbeReport> {
    let target = data.require(p)?;
    let exact = path
        .iter()
        .map(|x| hm_distance(&extend(sys, data, x)?, target))
        .collect::<Result<Vec<_>>>()?;
    let settled_from = match exact.iter().rposition(|d| d >= tol) {
        None if exact.is_empty() => None,
        None => Some(0),
        Some(i) if i + 1 < exact.len() => Some(i + 1),
        Some(_) => None,
    };
    Ok(ProbeReport {
        point: format_point(p),
        tolerance: format_rational(tol),
        distances: exact.iter().map(format_rational).collect(),
        settled_from,
        tail_below_tolerance: settled_from.is_some(),
        exact,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShrinkCounterexample {
    pub points: Vec<StepFunction>,
    pub weights: SimplexWeights,
    pub image: StepFunction,
    pub distance: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShrinkReport {
    pub samples: usize,
    pub counterexample: Option<ShrinkCounterexample>,
}

impl ShrinkReport {
    pub fn summary(&self) -> String {
        match &self.counterexample {
            None => format!("no counterexample in {} samples", self.samples),
            Some(c) => format!(
                "counterexample: e-image {} at pseudometric distance {}",
                c.image,
                format_rational(&c.distance)
            ),
        }
    }
}

/// Searches for `arity`-tuples in the `δ_inner`-ball of `z` (for the
/// pseudometric of `family`) and simplex weights whose `e_arity` image leaves
/// the `δ_outer`-ball. A reported counterexample falsifies the candidate
/// neighbourhood; `None` means none was found in `samples` tries.
#[allow(clippy::too_many_arguments)]
pub fn shrink_probe(
    z: &StepFunction,
    family: &[WindowedFunctional],
    outer: &Rational,
    inner: &Rational,
    samples: usize,
    seed: u64,
    arity: usize,
) -> Result<ShrinkReport> {
    if !inner.is_positive() || inner > outer {
        return Err(Error::out_of_range(
            "radii",
            format!("inner {} outer {}", format_rational(inner), format_rational(outer)),
            "0 < inner <= outer",
        ));
    }
    if arity == 0 {
        return Err(Error::out_of_range("arity", arity, ">= 1"));
    }
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut rng = gen::rng(seed);
    for _ in 0..samples {
        let points = (0..arity)
            .map(|_| perturb_within(&mut rng, z, family, inner))
            .collect::<Result<Vec<_>>>()?;
        let weights = gen::weights(&mut rng, arity, 0.3);
        let image = e_n(&points, &weights)?;
        let distance = pseudometric(family, &image, z)?;
        if distance >= *outer {
            return Ok(ShrinkReport {
                samples,
                counterexample: Some(ShrinkCounterexample {
                    points,
                    weights,
                    image,
                    distance,
                }),
            });
        }
    }
    Ok(ShrinkReport {
        samples,
        counterexample: None,
    })
}

/// Overwrites up to three random subintervals of `z` with random points,
/// halving their lengths until the result is strictly inside the ball.
fn perturb_within(
    rng: &mut gen::CaseRng,
    z: &StepFunction,
    family: &[WindowedFunctional],
    radius: &Rational,
) -> Result<StepFunction> {
    let space = z.space();
    let patches: Vec<(Rational, Rational, usize)> = (0..rng.random_range(0..=3))
        .map(|_| {
            let den = rng.random_range(2..=16);
            let start = rat(rng.random_range(0..den), den);
            let len = rat(rng.random_range(1..=den), den * rng.random_range(1..=4));
            (start, len, rng.random_range(0..space.len()))
        })
        .collect();
    let mut scale = Rational::one();
    loop {
        let mut f = z.clone();
        for (start, len, v) in &patches {
            let end = (start + len * &scale).min(Rational::one());
            let patched = e1(&f, &StepFunction::constant(space, *v), start)?;
            f = e1(&patched, &f, &end)?;
        }
        if pseudometric(family, &f, z)? < *radius {
            return Ok(f);
        }
        scale /= Rational::from_integer(2.into());
    }
}
