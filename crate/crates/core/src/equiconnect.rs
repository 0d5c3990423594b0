//! The splice map `e1`, its iterate `e_n` over simplex weights, the exact
//! midpoint construction, and the uniform-continuity certificate for `e1`.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{window_average, Window, WindowedFunctional};
use crate::rational::{abs, format_rational, in_unit_interval, Rational};
use crate::space::{ensure_same, functional_norm, TestFunctional};
use crate::stepfn::StepFunction;

/// A point of the standard simplex: nonnegative weights summing to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexWeights(Vec<Rational>);

impl SimplexWeights {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::BadWeights("no weights".into()));
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::BadWeights(format!("negative weight {}", format_rational(w))));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::BadWeights(format!("sum is {}", format_rational(&total))));
        }
        Ok(SimplexWeights(weights))
    }

    /// The `j`-th vertex of the simplex of dimension `len - 1`.
    pub fn vertex(len: usize, j: usize) -> Self {
        assert!(j < len, "vertex index out of range");
        SimplexWeights(
            (0..len)
                .map(|i| if i == j { Rational::one() } else { Rational::zero() })
                .collect(),
        )
    }

    pub fn weights(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn push_clipped(
    f: &StepFunction,
    lo: &Rational,
    hi: &Rational,
    bps: &mut Vec<Rational>,
    vals: &mut Vec<usize>,
) {
    for (s, e, v) in f.pieces() {
        let s = s.max(lo);
        let e = e.min(hi);
        if s < e {
            vals.push(v);
            bps.push(e.clone());
        }
    }
}

/// `α` on `[0, t)` and `β` on `[t, 1)`.
pub fn e1(alpha: &StepFunction, beta: &StepFunction, t: &Rational) -> Result<StepFunction> {
    ensure_same(alpha.space(), beta.space())?;
    if !in_unit_interval(t) {
        return Err(Error::out_of_range("t", format_rational(t), "[0,1]"));
    }
    let (zero, one) = (Rational::zero(), Rational::one());
    let mut bps = vec![zero.clone()];
    let mut vals = Vec::with_capacity(alpha.piece_count() + beta.piece_count());
    push_clipped(alpha, &zero, t, &mut bps, &mut vals);
    push_clipped(beta, t, &one, &mut bps, &mut vals);
    Ok(StepFunction::assemble(alpha.space(), bps, vals))
}

/// Iterated splice: `x_1 = a_1`, `x_i = e1(x_{i-1}, a_i, Λ_{i-1} / Λ_i)` with
/// `Λ_i` the prefix sums of the weights. A zero prefix `Λ_i = 0` gives ratio 0.
pub fn e_n(points: &[StepFunction], weights: &SimplexWeights) -> Result<StepFunction> {
    if points.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: points.len(),
            right: weights.len(),
        });
    }
    let (first, rest) = points
        .split_first()
        .ok_or_else(|| Error::BadWeights("no points".into()))?;
    let mut x = first.clone();
    let mut prefix = weights.0[0].clone();
    for (a, w) in rest.iter().zip(&weights.0[1..]) {
        let next = &prefix + w;
        let ratio = if next.is_zero() {
            Rational::zero()
        } else {
            &prefix / &next
        };
        x = e1(&x, a, &ratio)?;
        prefix = next;
    }
    Ok(x)
}

/// A step function whose projection onto `coords` is exactly the average of
/// the projections of `α` and `β`.
///
/// The unit interval is cut at every breakpoint of `α` and `β` and every window
/// endpoint of `coords`; each resulting cell takes `α` on its left half and `β`
/// on its right half.
pub fn hm_midpoint(
    alpha: &StepFunction,
    beta: &StepFunction,
    coords: &[WindowedFunctional],
) -> Result<StepFunction> {
    if coords.is_empty() {
        return Err(Error::EmptyFamily);
    }
    ensure_same(alpha.space(), beta.space())?;
    for wf in coords {
        ensure_same(alpha.space(), wf.space())?;
    }
    let mut cuts: Vec<Rational> = alpha
        .breakpoints()
        .iter()
        .chain(beta.breakpoints())
        .cloned()
        .chain(coords.iter().flat_map(|wf| [wf.window.a().clone(), wf.window.b().clone()]))
        .collect();
    cuts.sort();
    cuts.dedup();

    let two = Rational::from_integer(2.into());
    let mut bps = vec![Rational::zero()];
    let mut vals = Vec::with_capacity(2 * cuts.len());
    for w in cuts.windows(2) {
        let mid = (&w[0] + &w[1]) / &two;
        vals.push(alpha.value_at(&w[0]));
        bps.push(mid);
        vals.push(beta.value_at(&w[0]));
        bps.push(w[1].clone());
    }
    Ok(StepFunction::assemble(alpha.space(), bps, vals))
}

/// Constants of the uniform-continuity argument for `e1` against the
/// entourage `|φ_(0,1)(α) - φ_(0,1)(β)| < δ`.
///
/// With `c = max |φ|`, `n` is the smallest integer with `1/n < δ/(2c)`, the grid
/// is `a_i = i/n`, the `V` entourage bounds every cell-average gap by
/// `δ/(2n²)` and the `E` entourage bounds `|t1 - t2|` by `1/(2n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuityCertificate {
    pub functional: TestFunctional,
    pub delta: Rational,
    pub norm: Rational,
    pub n: u64,
    pub grid: Vec<Rational>,
    pub v_threshold: Rational,
    pub e_threshold: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub in_v: bool,
    pub in_e: bool,
    pub conclusion: bool,
}

impl CertificateCheck {
    /// The implication the certificate is supposed to guarantee.
    pub fn sound(&self) -> bool {
        !(self.in_v && self.in_e) || self.conclusion
    }
}

pub fn make_certificate(phi: &TestFunctional, delta: &Rational) -> Result<ContinuityCertificate> {
    if !delta.is_positive() {
        return Err(Error::out_of_range("delta", format_rational(delta), "> 0"));
    }
    let norm = functional_norm(phi);
    let n: u64 = if norm.is_zero() {
        1
    } else {
        // 1/n < δ/(2c)  <=>  n > 2c/δ
        let bound = (&norm * Rational::from_integer(2.into())) / delta;
        let n = bound.floor().to_integer() + 1;
        u64::try_from(n).map_err(|_| Error::out_of_range("n", "too large", "u64"))?
    };
    Ok(certificate_with_n(phi, delta, norm, n))
}

fn certificate_with_n(
    phi: &TestFunctional,
    delta: &Rational,
    norm: Rational,
    n: u64,
) -> ContinuityCertificate {
    let nn = Rational::from_integer(n.into());
    let grid = (0..=n)
        .map(|i| Rational::new(i.into(), n.into()))
        .collect();
    let two = Rational::from_integer(2.into());
    ContinuityCertificate {
        functional: phi.clone(),
        delta: delta.clone(),
        norm,
        n,
        grid,
        v_threshold: delta / (&two * &nn * &nn),
        e_threshold: Rational::one() / (&two * &nn),
    }
}

impl ContinuityCertificate {
    pub fn is_trivial(&self) -> bool {
        self.norm.is_zero()
    }

    /// Checks the stored fields against the defining formulas.
    pub fn is_consistent(&self) -> bool {
        let fresh = make_certificate(&self.functional, &self.delta);
        matches!(fresh, Ok(c) if c == *self)
    }

    pub fn cell(&self, i: usize) -> WindowedFunctional {
        let w = Window::new(self.grid[i].clone(), self.grid[i + 1].clone())
            .expect("grid cells are proper windows");
        WindowedFunctional::new(self.functional.clone(), w)
    }

    pub fn cells(&self) -> impl Iterator<Item = WindowedFunctional> + '_ {
        (0..self.grid.len() - 1).map(|i| self.cell(i))
    }

    /// Whether `(f, g)` lies in the `V` entourage.
    pub fn in_v(&self, f: &StepFunction, g: &StepFunction) -> Result<bool> {
        for wf in self.cells() {
            let gap = window_average(&wf, f)? - window_average(&wf, g)?;
            if abs(&gap) >= self.v_threshold {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn in_e(&self, t1: &Rational, t2: &Rational) -> bool {
        abs(&(t1 - t2)) < self.e_threshold
    }
}

#[allow(clippy::too_many_arguments)]
pub fn check_certificate(
    cert: &ContinuityCertificate,
    alpha1: &StepFunction,
    beta1: &StepFunction,
    t1: &Rational,
    alpha2: &StepFunction,
    beta2: &StepFunction,
    t2: &Rational,
) -> Result<CertificateCheck> {
    let space = cert.functional.space();
    for f in [alpha1, beta1, alpha2, beta2] {
        ensure_same(space, f.space())?;
    }
    let in_v = cert.in_v(alpha1, alpha2)? && cert.in_v(beta1, beta2)?;
    let in_e = cert.in_e(t1, t2);
    let whole = WindowedFunctional::new(cert.functional.clone(), Window::unit());
    let g1 = e1(alpha1, beta1, t1)?;
    let g2 = e1(alpha2, beta2, t2)?;
    let gap = window_average(&whole, &g1)? - window_average(&whole, &g2)?;
    Ok(CertificateCheck {
        in_v,
        in_e,
        conclusion: abs(&gap) < cert.delta,
    })
}

/// Smallest grid size for which the `V`/`E` hypotheses really force the
/// conclusion. Whole cells away from the splice points contribute less than
/// `δ/(2n²)` in total and the one or two cells around them at most `2c/n`, so
/// `2c/n + δ/(2n²) <= δ` suffices. The stated choice `1/n < δ/(2c)` can miss
/// this by up to `δ/(2n²)`.
pub fn safe_grid_size(norm: &Rational, delta: &Rational) -> u64 {
    if norm.is_zero() {
        return 1;
    }
    let two = Rational::from_integer(2.into());
    let mut n = ((norm * &two) / delta).floor().to_integer() + 1u32;
    loop {
        let nn = Rational::from_integer(n.clone());
        if &(norm * &two) / &nn + delta / (&two * &nn * &nn) <= *delta {
            return u64::try_from(n).expect("grid size fits in u64");
        }
        n.inc();
    }
}

/// Certificate with an explicit grid size instead of the smallest admissible one.
pub fn certificate_with_grid(
    phi: &TestFunctional,
    delta: &Rational,
    n: u64,
) -> Result<ContinuityCertificate> {
    if !delta.is_positive() {
        return Err(Error::out_of_range("delta", format_rational(delta), "> 0"));
    }
    if n == 0 {
        return Err(Error::out_of_range("n", n, ">= 1"));
    }
    Ok(certificate_with_n(phi, delta, functional_norm(phi), n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::space::{validate_space, Space};

    fn unit_xy() -> Space {
        validate_space(
            vec!["x".into(), "y".into()],
            vec![vec![int(0), int(1)], vec![int(1), int(0)]],
        )
        .unwrap()
    }

    fn step(s: &Space, bps: &[Rational], labels: &[&str]) -> StepFunction {
        StepFunction::canonicalize(s, bps.to_vec(), labels).unwrap()
    }

    #[test]
    fn e1_examples() {
        let s = unit_xy();
        let a = step(&s, &[int(0), rat(1, 3), int(1)], &["x", "y"]);
        let b = step(&s, &[int(0), rat(3, 4), int(1)], &["y", "x"]);
        assert_eq!(e1(&a, &b, &int(1)).unwrap(), a);
        assert_eq!(e1(&a, &b, &int(0)).unwrap(), b);
        let (x, y) = (StepFunction::constant(&s, 0), StepFunction::constant(&s, 1));
        assert_eq!(
            e1(&x, &y, &rat(1, 3)).unwrap(),
            step(&s, &[int(0), rat(1, 3), int(1)], &["x", "y"])
        );
        assert_eq!(e1(&a, &a, &rat(5, 7)).unwrap(), a);
        assert!(e1(&a, &b, &rat(3, 2)).is_err());
    }

    #[test]
    fn e1_piece_bound() {
        let s = unit_xy();
        let a = step(&s, &[int(0), rat(1, 3), rat(2, 3), int(1)], &["x", "y", "x"]);
        let b = step(&s, &[int(0), rat(1, 2), int(1)], &["x", "y"]);
        let g = e1(&a, &b, &rat(1, 2)).unwrap();
        assert!(g.piece_count() <= a.piece_count() + b.piece_count() + 1);
        assert_eq!(g.to_string(), "x|[0/1,1/3) y|[1/3,1/1)");
    }

    #[test]
    fn e_n_examples() {
        let s = unit_xy();
        let a = step(&s, &[int(0), rat(1, 5), int(1)], &["y", "x"]);
        let w = SimplexWeights::new(vec![rat(1, 3), rat(1, 6), rat(1, 2)]).unwrap();
        assert_eq!(e_n(&[a.clone(), a.clone(), a.clone()], &w).unwrap(), a);

        let (x, y) = (StepFunction::constant(&s, 0), StepFunction::constant(&s, 1));
        let pts = [x.clone(), y.clone(), a.clone()];
        for j in 0..3 {
            assert_eq!(e_n(&pts, &SimplexWeights::vertex(3, j)).unwrap(), pts[j]);
        }
        let half = SimplexWeights::new(vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(
            e_n(&[x, y], &half).unwrap(),
            step(&s, &[int(0), rat(1, 2), int(1)], &["x", "y"])
        );
        assert!(e_n(&pts, &half).is_err());
    }

    #[test]
    fn simplex_weights_validated() {
        assert!(SimplexWeights::new(vec![]).is_err());
        assert!(SimplexWeights::new(vec![rat(1, 2), rat(1, 3)]).is_err());
        assert!(SimplexWeights::new(vec![rat(3, 2), rat(-1, 2)]).is_err());
        assert!(SimplexWeights::new(vec![int(0), int(1)]).is_ok());
    }

    #[test]
    fn midpoint_examples() {
        let s = unit_xy();
        let phi = TestFunctional::from_values(&s, vec![int(0), int(1)]).unwrap();
        let coords = vec![WindowedFunctional::new(phi.clone(), Window::unit())];
        let a = step(&s, &[int(0), rat(1, 2), int(1)], &["x", "y"]);
        assert_eq!(hm_midpoint(&a, &a, &coords).unwrap(), a);

        let (x, y) = (StepFunction::constant(&s, 0), StepFunction::constant(&s, 1));
        let g = hm_midpoint(&x, &y, &coords).unwrap();
        assert_eq!(g, step(&s, &[int(0), rat(1, 2), int(1)], &["x", "y"]));
        assert_eq!(window_average(&coords[0], &g).unwrap(), rat(1, 2));

        let g = hm_midpoint(&a, &y, &coords).unwrap();
        assert_eq!(g, step(&s, &[int(0), rat(1, 4), int(1)], &["x", "y"]));
        assert_eq!(window_average(&coords[0], &g).unwrap(), rat(3, 4));
        assert!(hm_midpoint(&a, &y, &[]).is_err());
    }

    #[test]
    fn certificate_constants() {
        let s = unit_xy();
        let phi = TestFunctional::from_values(&s, vec![int(0), int(1)]).unwrap();
        let c = make_certificate(&phi, &rat(1, 2)).unwrap();
        assert_eq!(c.n, 5);
        assert_eq!(c.v_threshold, rat(1, 100));
        assert_eq!(c.e_threshold, rat(1, 10));
        assert_eq!(c.grid.len(), 6);
        assert_eq!(c.grid[2], rat(2, 5));
        assert!(c.is_consistent());

        assert_eq!(make_certificate(&phi, &int(2)).unwrap().n, 2);

        let zero = TestFunctional::from_values(&s, vec![int(0), int(0)]).unwrap();
        let t = make_certificate(&zero, &rat(1, 9)).unwrap();
        assert!(t.is_trivial());
        assert_eq!(t.n, 1);
        assert!(make_certificate(&phi, &int(0)).is_err());
    }

    #[test]
    fn certificate_checks() {
        let s = unit_xy();
        let phi = TestFunctional::from_values(&s, vec![int(0), int(1)]).unwrap();
        let c = make_certificate(&phi, &rat(1, 2)).unwrap();
        let a = step(&s, &[int(0), rat(1, 3), int(1)], &["x", "y"]);
        let b = step(&s, &[int(0), rat(2, 3), int(1)], &["y", "x"]);
        let t = rat(3, 7);
        let r = check_certificate(&c, &a, &b, &t, &a, &b, &t).unwrap();
        assert_eq!(
            r,
            CertificateCheck {
                in_v: true,
                in_e: true,
                conclusion: true
            }
        );
        // |φ(x) - φ(y)| = 1 on every cell
        let (x, y) = (StepFunction::constant(&s, 0), StepFunction::constant(&s, 1));
        let r = check_certificate(&c, &x, &b, &t, &y, &b, &t).unwrap();
        assert!(!r.in_v);
        assert!(r.sound());
    }

    /// The stated constants leave no room once `δ - 2c/n` is below the
    /// accumulated whole-cell error. With `δ = 401/1000`, `c = 1`, `n = 5`,
    /// swapping the halves of cell 0 around `t = 1/10` makes the spliced
    /// functions constant `x` and `y` there, and the remaining cells push the
    /// gap from `2/5` to `0.4064 > δ` while staying inside `V`.
    #[test]
    fn tight_delta_breaks_stated_constants() {
        let s = unit_xy();
        let phi = TestFunctional::from_values(&s, vec![int(1), int(-1)]).unwrap();
        let delta = rat(401, 1000);
        let c = make_certificate(&phi, &delta).unwrap();
        assert_eq!(c.n, 5);
        let t = rat(1, 10);
        let a1 = step(&s, &[int(0), t.clone(), int(1)], &["x", "y"]);
        let a2 = step(&s, &[int(0), t.clone(), rat(1, 5), int(1)], &["y", "x", "y"]);
        let b1 = step(&s, &[int(0), t.clone(), int(1)], &["y", "x"]);
        let l = rat(1, 1250);
        let mut bps = vec![int(0), t.clone(), rat(1, 5)];
        let mut labels = vec!["x", "y"];
        for j in 1..5 {
            let a = rat(j, 5);
            bps.push(&a + &l);
            bps.push(if j == 4 { int(1) } else { rat(j + 1, 5) });
            labels.extend(["y", "x"]);
        }
        let b2 = step(&s, &bps, &labels);
        let r = check_certificate(&c, &a1, &b1, &t, &a2, &b2, &t).unwrap();
        assert!(r.in_v && r.in_e);
        assert!(!r.conclusion);

        let safe = safe_grid_size(&c.norm, &delta);
        assert!(safe > c.n);
        let fixed = certificate_with_grid(&phi, &delta, safe).unwrap();
        assert!(check_certificate(&fixed, &a1, &b1, &t, &a2, &b2, &t).unwrap().sound());
    }
}
