//! Windowed averages `φ_(a,b)(α) = (b-a)^-1 ∫_a^b φ(α(t)) dt`, the max-gap
//! pseudometrics they generate, and finite-coordinate projections.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rational::{dyadic, format_rational, in_unit_interval, Rational};
use crate::space::{ensure_same, signed_range, Space, TestFunctional};
use crate::stepfn::StepFunction;

/// An interval `(a, b)` with `0 <= a < b <= 1`. Endpoints carry no measure,
/// so open and half-open windows integrate identically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Window {
    a: Rational,
    b: Rational,
}

impl Window {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if !in_unit_interval(&a) || !in_unit_interval(&b) || a >= b {
            return Err(Error::BadWindow {
                a: format_rational(&a),
                b: format_rational(&b),
            });
        }
        Ok(Window { a, b })
    }

    pub fn unit() -> Self {
        Window {
            a: Rational::zero(),
            b: Rational::one(),
        }
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn length(&self) -> Rational {
        &self.b - &self.a
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowedFunctional {
    pub functional: TestFunctional,
    pub window: Window,
}

impl WindowedFunctional {
    pub fn new(functional: TestFunctional, window: Window) -> Self {
        WindowedFunctional { functional, window }
    }

    pub fn space(&self) -> &Space {
        self.functional.space()
    }
}

pub fn window_average(wf: &WindowedFunctional, alpha: &StepFunction) -> Result<Rational> {
    ensure_same(wf.space(), alpha.space())?;
    let Window { a, b } = &wf.window;
    let phi = &wf.functional;
    let integral = alpha.integrate(a, b, |v| phi.value(v).clone());
    Ok(integral / wf.window.length())
}

/// `max_i |φ_i(f) - φ_i(g)|` over a nonempty family.
pub fn pseudometric(
    family: &[WindowedFunctional],
    f: &StepFunction,
    g: &StepFunction,
) -> Result<Rational> {
    let pf = project(f, family)?;
    let pg = project(g, family)?;
    Ok(max_gap(&pf, &pg))
}

/// Coordinates of `α` under each functional of the family.
pub fn project(alpha: &StepFunction, family: &[WindowedFunctional]) -> Result<Vec<Rational>> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    family.iter().map(|wf| window_average(wf, alpha)).collect()
}

/// Sup-norm gap between two coordinate vectors of equal length.
pub fn max_gap(u: &[Rational], v: &[Rational]) -> Rational {
    u.iter()
        .zip(v)
        .map(|(a, b)| (a - b).abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

pub fn convex_midpoint_vector(u: &[Rational], v: &[Rational]) -> Result<Vec<Rational>> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let two = Rational::from_integer(2.into());
    Ok(u.iter().zip(v).map(|(a, b)| (a + b) / &two).collect())
}

/// A deterministic finite subfamily: one indicator functional per point,
/// crossed with `windows` dyadic windows. The first window is always `(0,1)`;
/// the rest are dyadic intervals `(j/2^k, (j+1)/2^k)`, `1 <= k <= 6`, drawn
/// from a ChaCha8 stream seeded with `seed`.
pub fn sample_family(
    space: &Space,
    windows: usize,
    seed: u64,
) -> Result<Vec<WindowedFunctional>> {
    if windows < 1 {
        return Err(Error::out_of_range("windows", windows, ">= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ws = vec![Window::unit()];
    while ws.len() < windows {
        let k: u32 = rng.random_range(1..=6);
        let j: i64 = rng.random_range(0..(1i64 << k));
        let a = dyadic(k) * Rational::from_integer(j.into());
        let b = &a + dyadic(k);
        ws.push(Window::new(a, b)?);
    }
    let mut family = Vec::with_capacity(space.len() * windows);
    for p in 0..space.len() {
        for w in &ws {
            family.push(WindowedFunctional::new(
                TestFunctional::indicator(space, p),
                w.clone(),
            ));
        }
    }
    Ok(family)
}

/// Whether `value` lies in `[min φ, max φ]`, where every window average of
/// `φ` must land.
pub fn within_signed_range(wf: &WindowedFunctional, value: &Rational) -> bool {
    let (lo, hi) = signed_range(&wf.functional);
    &lo <= value && value <= &hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::space::validate_space;

    fn unit_xy() -> Space {
        validate_space(
            vec!["x".into(), "y".into()],
            vec![vec![int(0), int(1)], vec![int(1), int(0)]],
        )
        .unwrap()
    }

    fn xy_half(s: &Space) -> StepFunction {
        StepFunction::canonicalize(s, vec![int(0), rat(1, 2), int(1)], &["x", "y"]).unwrap()
    }

    fn phi01(s: &Space) -> TestFunctional {
        TestFunctional::from_values(s, vec![int(0), int(1)]).unwrap()
    }

    fn wf(phi: &TestFunctional, a: Rational, b: Rational) -> WindowedFunctional {
        WindowedFunctional::new(phi.clone(), Window::new(a, b).unwrap())
    }

    #[test]
    fn windows_validated() {
        assert!(Window::new(rat(1, 2), rat(1, 2)).is_err());
        assert!(Window::new(rat(3, 4), rat(1, 2)).is_err());
        assert!(Window::new(int(0), rat(3, 2)).is_err());
        assert!(Window::new(rat(-1, 2), rat(1, 2)).is_err());
        assert!(Window::new(int(0), int(1)).is_ok());
    }

    #[test]
    fn average_examples() {
        let s = unit_xy();
        let phi = TestFunctional::from_values(&s, vec![rat(2, 7), int(5)]).unwrap();
        let x = StepFunction::constant(&s, 0);
        assert_eq!(
            window_average(&wf(&phi, rat(1, 3), rat(5, 9)), &x).unwrap(),
            rat(2, 7)
        );

        let phi = phi01(&s);
        let a = xy_half(&s);
        assert_eq!(window_average(&wf(&phi, int(0), int(1)), &a).unwrap(), rat(1, 2));
        // 2·(0·(1/4) + 1·(1/4))
        assert_eq!(
            window_average(&wf(&phi, rat(1, 4), rat(3, 4)), &a).unwrap(),
            rat(1, 2)
        );
    }

    #[test]
    fn pseudometric_examples() {
        let s = unit_xy();
        let phi = phi01(&s);
        let fam = vec![wf(&phi, int(0), int(1))];
        let (x, y) = (StepFunction::constant(&s, 0), StepFunction::constant(&s, 1));
        assert_eq!(pseudometric(&fam, &x, &x).unwrap(), int(0));
        assert_eq!(pseudometric(&fam, &x, &y).unwrap(), int(1));
        // gaps 1/4 and 1/2
        let quarter = TestFunctional::from_values(&s, vec![int(0), rat(1, 4)]).unwrap();
        let half = TestFunctional::from_values(&s, vec![int(0), rat(1, 2)]).unwrap();
        let fam = vec![wf(&quarter, int(0), int(1)), wf(&half, int(0), int(1))];
        assert_eq!(pseudometric(&fam, &x, &y).unwrap(), rat(1, 2));
        assert_eq!(pseudometric(&[], &x, &y), Err(Error::EmptyFamily));
    }

    #[test]
    fn projection_examples() {
        let s = unit_xy();
        let phi = TestFunctional::from_values(&s, vec![rat(3, 5), int(1)]).unwrap();
        let x = StepFunction::constant(&s, 0);
        assert_eq!(
            project(&x, &[wf(&phi, int(0), int(1))]).unwrap(),
            vec![rat(3, 5)]
        );

        let phi = phi01(&s);
        let fam = vec![wf(&phi, int(0), rat(1, 2)), wf(&phi, rat(1, 2), int(1))];
        let a = xy_half(&s);
        assert_eq!(project(&a, &fam).unwrap(), vec![int(0), int(1)]);
        let b = StepFunction::constant(&s, 1);
        let gap = max_gap(&project(&a, &fam).unwrap(), &project(&b, &fam).unwrap());
        assert_eq!(gap, pseudometric(&fam, &a, &b).unwrap());
        assert_eq!(project(&a, &[]), Err(Error::EmptyFamily));
    }

    #[test]
    fn midpoint_vectors() {
        let u = vec![rat(1, 3), rat(2, 5)];
        assert_eq!(convex_midpoint_vector(&u, &u).unwrap(), u);
        assert_eq!(
            convex_midpoint_vector(&[int(0), int(1)], &[int(1), int(0)]).unwrap(),
            vec![rat(1, 2), rat(1, 2)]
        );
        assert_eq!(
            convex_midpoint_vector(&[rat(1, 3)], &[rat(1, 2)]).unwrap(),
            vec![rat(5, 12)]
        );
        assert!(convex_midpoint_vector(&[int(0)], &[]).is_err());
    }

    #[test]
    fn sampled_families() {
        let s = unit_xy();
        assert_eq!(
            sample_family(&s, 3, 9).unwrap(),
            sample_family(&s, 3, 9).unwrap()
        );
        let one = sample_family(&s, 1, 4).unwrap();
        assert!(one.iter().all(|wf| wf.window == Window::unit()));
        assert_eq!(sample_family(&s, 2, 4).unwrap().len(), 4);
        assert!(sample_family(&s, 0, 4).is_err());
    }

    #[test]
    fn sign_changing_average_leaves_absolute_interval() {
        let s = unit_xy();
        let phi = TestFunctional::from_values(&s, vec![rat(-1, 2), rat(1, 4)]).unwrap();
        let w = wf(&phi, rat(1, 8), rat(7, 8));
        let v = window_average(&w, &xy_half(&s)).unwrap();
        assert!(within_signed_range(&w, &v));
        assert!(v.is_negative());
        assert!(v < crate::space::functional_range(&phi).0);
    }
}
