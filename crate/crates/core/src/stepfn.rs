//! Right-open step functions `[0,1) -> X` in canonical form.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, in_unit_interval, Rational};
use crate::space::{ensure_same, Space, SpaceMap};

/// A step function with breakpoints `0 = t0 < t1 < ... < tn = 1` taking
/// `values[i]` (a point index) on `[t_i, t_{i+1})`.
///
/// Always canonical: no zero-length pieces and no two adjacent pieces with
/// the same value, so structural equality is equality of functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepFunction {
    space: Space,
    breakpoints: Vec<Rational>,
    values: Vec<usize>,
}

/// Common refinement of two step functions over the same space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub breakpoints: Vec<Rational>,
    pub pairs: Vec<(usize, usize)>,
}

impl Refinement {
    pub fn pieces(&self) -> impl Iterator<Item = (&Rational, &Rational, (usize, usize))> {
        self.breakpoints
            .windows(2)
            .zip(&self.pairs)
            .map(|(w, &p)| (&w[0], &w[1], p))
    }
}

impl StepFunction {
    /// Canonicalizes raw step data given by point labels.
    pub fn canonicalize<S: AsRef<str>>(
        space: &Space,
        breakpoints: Vec<Rational>,
        labels: &[S],
    ) -> Result<Self> {
        let values = labels
            .iter()
            .map(|l| space.index_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(space, breakpoints, values)
    }

    /// Canonicalizes raw step data given by point indices.
    pub fn from_indices(space: &Space, breakpoints: Vec<Rational>, values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyPieces);
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::PieceCount {
                breakpoints: breakpoints.len(),
                values: values.len(),
            });
        }
        if let Some(b) = breakpoints.iter().find(|b| !in_unit_interval(b)) {
            return Err(Error::BreakpointOutOfRange(format_rational(b)));
        }
        if !breakpoints[0].is_zero()
            || !breakpoints[breakpoints.len() - 1].is_one()
            || breakpoints.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::BadBreakpoints);
        }
        if let Some(&v) = values.iter().find(|&&v| v >= space.len()) {
            return Err(Error::UnknownLabel(format!("#{v}")));
        }
        Ok(Self::assemble(space, breakpoints, values))
    }

    /// Drops empty pieces and merges equal neighbours. Input must already
    /// satisfy the shape preconditions.
    pub(crate) fn assemble(space: &Space, breakpoints: Vec<Rational>, values: Vec<usize>) -> Self {
        let mut bps = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<usize> = Vec::with_capacity(values.len());
        bps.push(Rational::zero());
        for (w, v) in breakpoints.windows(2).zip(values) {
            if w[0] == w[1] {
                continue;
            }
            if vals.last() == Some(&v) {
                *bps.last_mut().unwrap() = w[1].clone();
            } else {
                vals.push(v);
                bps.push(w[1].clone());
            }
        }
        StepFunction {
            space: space.clone(),
            breakpoints: bps,
            values: vals,
        }
    }

    pub fn constant(space: &Space, point: usize) -> Self {
        assert!(point < space.len(), "point index out of range");
        StepFunction {
            space: space.clone(),
            breakpoints: vec![Rational::zero(), Rational::one()],
            values: vec![point],
        }
    }

    pub fn constant_label(space: &Space, label: &str) -> Result<Self> {
        Ok(Self::constant(space, space.index_of(label)?))
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value_labels(&self) -> Vec<&str> {
        self.values.iter().map(|&v| self.space.label(v)).collect()
    }

    /// Iterates `(start, end, point)` over the pieces.
    pub fn pieces(&self) -> impl Iterator<Item = (&Rational, &Rational, usize)> {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (&w[0], &w[1], v))
    }

    pub fn piece_count(&self) -> usize {
        self.values.len()
    }

    /// Membership in the subspace of functions with at most `n` pieces.
    pub fn in_hm_n(&self, n: usize) -> Result<bool> {
        if n < 1 {
            return Err(Error::out_of_range("n", n, "n >= 1"));
        }
        Ok(self.piece_count() <= n)
    }

    /// Point index at `t`; a breakpoint belongs to the piece on its right.
    pub fn evaluate(&self, t: &Rational) -> Result<usize> {
        if t.is_negative() || *t >= Rational::one() {
            return Err(Error::out_of_range("t", format_rational(t), "[0,1)"));
        }
        Ok(self.value_at(t))
    }

    pub(crate) fn value_at(&self, t: &Rational) -> usize {
        let k = self.breakpoints.partition_point(|b| b <= t);
        self.values[k.saturating_sub(1).min(self.values.len() - 1)]
    }

    /// Replaces every value through `map`.
    pub fn pushforward(&self, map: &SpaceMap) -> Result<StepFunction> {
        ensure_same(&self.space, map.domain())?;
        let values = self.values.iter().map(|&v| map.apply(v)).collect();
        Ok(Self::assemble(map.codomain(), self.breakpoints.clone(), values))
    }

    /// `∫_a^b w(f(t)) dt` for a weight on the points, `0 <= a <= b <= 1`.
    pub(crate) fn integrate<F>(&self, a: &Rational, b: &Rational, weight: F) -> Rational
    where
        F: Fn(usize) -> Rational,
    {
        let mut total = Rational::zero();
        for (s, e, v) in self.pieces() {
            let lo = if s > a { s } else { a };
            let hi = if e < b { e } else { b };
            if lo < hi {
                total += weight(v) * (hi - lo);
            }
        }
        total
    }
}

/// Merges the breakpoint sets of `f` and `g` and reports both values on each
/// refined piece.
pub fn common_refinement(f: &StepFunction, g: &StepFunction) -> Result<Refinement> {
    ensure_same(&f.space, &g.space)?;
    let mut breakpoints = vec![Rational::zero()];
    let mut pairs = Vec::with_capacity(f.values.len() + g.values.len());
    let (mut i, mut j) = (0, 0);
    while i < f.values.len() && j < g.values.len() {
        pairs.push((f.values[i], g.values[j]));
        let (fe, ge) = (&f.breakpoints[i + 1], &g.breakpoints[j + 1]);
        breakpoints.push(fe.min(ge).clone());
        match fe.cmp(ge) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    Ok(Refinement { breakpoints, pairs })
}

/// `∫_0^1 d(f(t), g(t)) dt`, exact.
pub fn hm_distance(f: &StepFunction, g: &StepFunction) -> Result<Rational> {
    let r = common_refinement(f, g)?;
    let space = &f.space;
    Ok(r.pieces()
        .map(|(s, e, (a, b))| space.dist(a, b) * (e - s))
        .sum())
}

/// Lebesgue measure of `{t : d(α(t), β(t)) >= δ}`.
pub fn bad_set_measure(alpha: &StepFunction, delta: &Rational, beta: &StepFunction) -> Result<Rational> {
    let r = common_refinement(alpha, beta)?;
    let space = &alpha.space;
    Ok(r.pieces()
        .filter(|(_, _, (a, b))| space.dist(*a, *b) >= delta)
        .map(|(s, e, _)| e - s)
        .sum())
}

/// Whether `β` lies in the basic neighbourhood `<α, U_δ, ε>` where
/// `U_δ = {(p,q) : d(p,q) < δ}`: the measure of the set where `(α(t), β(t))`
/// leaves `U_δ` must be strictly below `ε`.
pub fn neighborhood_contains(
    alpha: &StepFunction,
    delta: &Rational,
    eps: &Rational,
    beta: &StepFunction,
) -> Result<bool> {
    if !delta.is_positive() {
        return Err(Error::out_of_range("delta", format_rational(delta), "> 0"));
    }
    if !eps.is_positive() {
        return Err(Error::out_of_range("eps", format_rational(eps), "> 0"));
    }
    Ok(bad_set_measure(alpha, delta, beta)? < *eps)
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, e, v) in self.pieces() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(
                f,
                "{}|[{},{})",
                self.space.label(v),
                format_rational(s),
                format_rational(e)
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::space::validate_space;

    pub(crate) fn unit_xy() -> Space {
        validate_space(
            vec!["x".into(), "y".into()],
            vec![vec![int(0), int(1)], vec![int(1), int(0)]],
        )
        .unwrap()
    }

    fn step(space: &Space, bps: &[(i64, i64)], labels: &[&str]) -> StepFunction {
        let bps = bps.iter().map(|&(p, q)| rat(p, q)).collect();
        StepFunction::canonicalize(space, bps, labels).unwrap()
    }

    #[test]
    fn canonicalize_merges_and_drops() {
        let s = unit_xy();
        let merged = step(&s, &[(0, 1), (1, 2), (1, 1)], &["x", "x"]);
        assert_eq!(merged, StepFunction::constant(&s, 0));
        let kept = step(&s, &[(0, 1), (1, 3), (1, 1)], &["x", "y"]);
        assert_eq!(kept.breakpoints(), &[int(0), rat(1, 3), int(1)]);
        let degenerate = step(&s, &[(0, 1), (1, 2), (1, 2), (1, 1)], &["x", "y", "x"]);
        assert_eq!(degenerate.to_string(), "x|[0/1,1/1)");
        let inner = step(&s, &[(0, 1), (1, 2), (1, 2), (1, 1)], &["x", "y", "y"]);
        assert_eq!(inner.to_string(), "x|[0/1,1/2) y|[1/2,1/1)");
    }

    #[test]
    fn canonicalize_errors() {
        let s = unit_xy();
        let none: [&str; 0] = [];
        assert_eq!(
            StepFunction::canonicalize(&s, vec![int(0)], &none),
            Err(Error::EmptyPieces)
        );
        assert_eq!(
            StepFunction::canonicalize(&s, vec![int(0), rat(3, 2)], &["x"]),
            Err(Error::BreakpointOutOfRange("3/2".into()))
        );
        assert_eq!(
            StepFunction::canonicalize(&s, vec![int(0), int(1)], &["q"]),
            Err(Error::UnknownLabel("q".into()))
        );
        assert_eq!(
            StepFunction::canonicalize(&s, vec![int(0), rat(1, 2)], &["x"]),
            Err(Error::BadBreakpoints)
        );
        assert_eq!(
            StepFunction::canonicalize(&s, vec![int(0), rat(2, 3), rat(1, 3), int(1)], &["x", "y", "x"]),
            Err(Error::BadBreakpoints)
        );
    }

    #[test]
    fn evaluate_right_open() {
        let s = unit_xy();
        let f = step(&s, &[(0, 1), (1, 2), (1, 1)], &["x", "y"]);
        assert_eq!(f.evaluate(&rat(1, 2)).unwrap(), 1);
        assert_eq!(f.evaluate(&int(0)).unwrap(), 0);
        assert_eq!(StepFunction::constant(&s, 0).evaluate(&rat(7, 8)).unwrap(), 0);
        assert!(f.evaluate(&int(1)).is_err());
        assert!(f.evaluate(&rat(-1, 8)).is_err());
    }

    #[test]
    fn refinement_is_union() {
        let s = unit_xy();
        let f = step(&s, &[(0, 1), (1, 2), (1, 1)], &["x", "y"]);
        let g = step(&s, &[(0, 1), (1, 3), (1, 1)], &["y", "x"]);
        let r = common_refinement(&f, &g).unwrap();
        assert_eq!(r.breakpoints, vec![int(0), rat(1, 3), rat(1, 2), int(1)]);
        assert_eq!(r.pairs, vec![(0, 1), (0, 0), (1, 0)]);
        assert_eq!(common_refinement(&f, &f).unwrap().breakpoints, f.breakpoints());
        let c = common_refinement(&StepFunction::constant(&s, 0), &StepFunction::constant(&s, 1)).unwrap();
        assert_eq!(c.pairs, vec![(0, 1)]);
    }

    #[test]
    fn distance_examples() {
        let s = unit_xy();
        let f = step(&s, &[(0, 1), (1, 2), (1, 1)], &["x", "y"]);
        let g = step(&s, &[(0, 1), (1, 3), (1, 1)], &["y", "x"]);
        assert_eq!(hm_distance(&f, &f).unwrap(), int(0));
        let (x, y) = (StepFunction::constant(&s, 0), StepFunction::constant(&s, 1));
        assert_eq!(hm_distance(&x, &y).unwrap(), int(1));
        // 1·(1/3) + 0·(1/6) + 1·(1/2)
        assert_eq!(hm_distance(&f, &g).unwrap(), rat(5, 6));
    }

    #[test]
    fn mismatched_spaces_rejected() {
        let s = unit_xy();
        let other = validate_space(
            vec!["x".into(), "y".into()],
            vec![vec![int(0), rat(1, 2)], vec![rat(1, 2), int(0)]],
        )
        .unwrap();
        let f = StepFunction::constant(&s, 0);
        let g = StepFunction::constant(&other, 0);
        assert_eq!(hm_distance(&f, &g), Err(Error::SpaceMismatch));
        assert_eq!(common_refinement(&f, &g), Err(Error::SpaceMismatch));
    }

    #[test]
    fn piece_counts() {
        let s = unit_xy();
        let c = StepFunction::constant(&s, 0);
        assert_eq!(c.piece_count(), 1);
        assert!(c.in_hm_n(1).unwrap());
        let f = step(&s, &[(0, 1), (1, 2), (1, 1)], &["x", "y"]);
        assert_eq!(f.piece_count(), 2);
        assert!(!f.in_hm_n(1).unwrap());
        assert!(f.in_hm_n(5).unwrap());
        assert!(f.in_hm_n(0).is_err());
    }

    #[test]
    fn neighbourhood_examples() {
        let s = unit_xy();
        let alpha = StepFunction::constant(&s, 0);
        let beta = step(&s, &[(0, 1), (1, 4), (1, 1)], &["y", "x"]);
        assert!(neighborhood_contains(&alpha, &rat(1, 2), &rat(1, 3), &alpha).unwrap());
        assert!(neighborhood_contains(&alpha, &rat(1, 2), &rat(1, 3), &beta).unwrap());
        // measure 1/4 is not < 1/4
        assert!(!neighborhood_contains(&alpha, &rat(1, 2), &rat(1, 4), &beta).unwrap());
        assert!(neighborhood_contains(&alpha, &int(0), &rat(1, 4), &beta).is_err());
        assert!(neighborhood_contains(&alpha, &int(1), &int(0), &beta).is_err());
    }

    #[test]
    fn pushforward_examples() {
        let s = unit_xy();
        let f = step(&s, &[(0, 1), (1, 2), (1, 1)], &["x", "y"]);
        assert_eq!(f.pushforward(&SpaceMap::identity(&s)).unwrap(), f);
        let to_y = SpaceMap::constant(&s, &s, 1);
        assert_eq!(f.pushforward(&to_y).unwrap(), StepFunction::constant(&s, 1));
        let swap = SpaceMap::from_pairs(&s, &s, [("x", "y"), ("y", "x")]).unwrap();
        assert_eq!(
            f.pushforward(&swap).unwrap(),
            step(&s, &[(0, 1), (1, 2), (1, 1)], &["y", "x"])
        );
    }
}
