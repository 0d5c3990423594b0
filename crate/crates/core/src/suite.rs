//! Seeded property suites.
//!
//! Case `i` of a run seeded with `s` draws everything from
//! `ChaCha8Rng::seed_from_u64(case_seed(s, i))`, so a failure replays from
//! `(suite, seed, i)` alone. Failing cases are re-run at successively smaller
//! [`Size`]s and the smallest input that still fails is reported. Cases run in
//! parallel; failures are sorted by case index, so reports do not depend on
//! scheduling.

use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dugundji::{
    build_system, dyadic_path, extend, mesh, BoundaryData, DugundjiSystem, Point,
};
use crate::equiconnect::{
    check_certificate, e1, e_n, hm_midpoint, make_certificate, SimplexWeights,
};
use crate::error::{Error, Result};
use crate::functionals::{convex_midpoint_vector, project, pseudometric, within_signed_range};
use crate::gen::{self, CaseRng, Size};
use crate::rational::{format_point, format_rational, int, rat, Rational};
use crate::space::{functional_norm, SpaceMap, TestFunctional};
use crate::stepfn::{hm_distance, StepFunction};

pub const SUITES: [&str; 9] = [
    "metric-axioms",
    "functoriality",
    "pseudometrics",
    "midpoint",
    "certificate",
    "e-n-laws",
    "dugundji-1",
    "dugundji-2",
    "boundary-continuity",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SuiteOptions {
    /// Negative control: `metric-axioms` draws from corrupted distance tables.
    pub corrupt: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub property: String,
    pub case: u64,
    pub seed: u64,
    pub input: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: u64,
    pub failures: Vec<Failure>,
    pub wall_time_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut out = format!(
            "{status} {}: {} cases, {} failures (seed {}, {} ms)",
            self.suite,
            self.cases,
            self.failures.len(),
            self.seed,
            self.wall_time_ms
        );
        for f in self.failures.iter().take(5) {
            out.push_str(&format!("\n  case {} [{}]: {}", f.case, f.property, f.input));
        }
        out
    }

    /// JSON with the wall time zeroed, for byte comparisons across runs.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.wall_time_ms = 0;
        serde_json::to_string(&r).expect("reports serialize")
    }
}

/// One failed property inside a case.
struct Broken {
    property: String,
    input: String,
}

type CaseFn = fn(&mut CaseRng, Size, SuiteOptions) -> Vec<Broken>;

fn case_fn(name: &str) -> Result<CaseFn> {
    Ok(match name {
        "metric-axioms" => metric_axioms,
        "functoriality" => functoriality,
        "pseudometrics" => pseudometrics,
        "midpoint" => midpoint,
        "certificate" => certificate,
        "e-n-laws" => e_n_laws,
        "dugundji-1" => dugundji_1,
        "dugundji-2" => dugundji_2,
        "boundary-continuity" => boundary_continuity,
        other => return Err(Error::UnknownSuite(other.to_string())),
    })
}

pub fn run_suite(name: &str, seed: u64, cases: u64) -> Result<SuiteReport> {
    run_suite_with(name, seed, cases, SuiteOptions::default())
}

pub fn run_suite_with(name: &str, seed: u64, cases: u64, opts: SuiteOptions) -> Result<SuiteReport> {
    let run = case_fn(name)?;
    let start = Instant::now();
    let mut failures: Vec<Failure> = (0..cases)
        .into_par_iter()
        .flat_map_iter(|case| {
            let s = gen::case_seed(seed, case);
            let broken = run(&mut gen::rng(s), Size::DEFAULT, opts);
            let broken = if broken.is_empty() {
                broken
            } else {
                minimise(run, s, opts, broken)
            };
            broken.into_iter().map(move |b| Failure {
                property: b.property,
                case,
                seed: s,
                input: b.input,
            })
        })
        .collect();
    failures.sort_by(|a, b| (a.case, &a.property).cmp(&(b.case, &b.property)));
    Ok(SuiteReport {
        suite: name.to_string(),
        seed,
        cases,
        failures,
        wall_time_ms: start.elapsed().as_millis(),
    })
}

fn minimise(run: CaseFn, seed: u64, opts: SuiteOptions, mut best: Vec<Broken>) -> Vec<Broken> {
    for size in Size::DEFAULT.shrinks() {
        let again = run(&mut gen::rng(seed), size, opts);
        if !again.is_empty() {
            best = again;
        }
    }
    best
}

/// Collects failed checks of one case.
#[derive(Default)]
struct Checks(Vec<Broken>);

impl Checks {
    fn check(&mut self, property: &str, ok: bool, input: impl FnOnce() -> String) {
        if !ok {
            self.0.push(Broken {
                property: property.to_string(),
                input: input(),
            });
        }
    }

    /// Records an unexpected library error as a failure.
    fn ok<T>(&mut self, property: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(property, false, || format!("error: {e}"));
                None
            }
        }
    }

    fn done(self) -> Vec<Broken> {
        self.0
    }
}

fn metric_axioms(rng: &mut CaseRng, size: Size, opts: SuiteOptions) -> Vec<Broken> {
    let mut c = Checks::default();
    let space = if opts.corrupt {
        gen::corrupted_space(rng)
    } else {
        gen::space(rng, size)
    };
    if let Some((axiom, witness)) = space.violation() {
        c.check(&format!("space: {axiom}"), false, || witness);
    }
    let mut fs: Vec<StepFunction> = (0..3).map(|_| gen::step(rng, &space, size)).collect();
    if opts.corrupt {
        // constants at the three points of the broken triangle
        fs = (0..3).map(|p| StepFunction::constant(&space, p)).collect();
        fs.swap(1, 2);
    }
    let d = |a: &StepFunction, b: &StepFunction| hm_distance(a, b).expect("same space");
    let show = |fs: &[&StepFunction]| {
        fs.iter()
            .map(|f| format!("[{f}]"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let (f, g, h) = (&fs[0], &fs[1], &fs[2]);
    c.check("zero diagonal", d(f, f).is_zero(), || show(&[f]));
    c.check("symmetry", d(f, g) == d(g, f), || show(&[f, g]));
    c.check("separation", (d(f, g).is_zero()) == (f == g), || show(&[f, g]));
    c.check("bound", d(f, g) <= Rational::one(), || show(&[f, g]));
    c.check("triangle inequality", d(f, h) <= d(f, g) + d(g, h), || {
        show(&[f, g, h])
    });
    c.done()
}

fn functoriality(rng: &mut CaseRng, size: Size, _: SuiteOptions) -> Vec<Broken> {
    let mut c = Checks::default();
    let (x, y, z) = (gen::space(rng, size), gen::space(rng, size), gen::space(rng, size));
    let (m1, m2) = (gen::map(rng, &x, &y), gen::map(rng, &y, &z));
    let f = gen::step(rng, &x, size);
    let input = || format!("f = {f}; m1 = {:?}; m2 = {:?}", m1.table(), m2.table());
    let id = f.pushforward(&SpaceMap::identity(&x)).expect("same space");
    c.check("identity", id == f, input);
    let composite = m1.then(&m2).expect("composable");
    let lhs = f.pushforward(&composite).expect("same space");
    let rhs = f
        .pushforward(&m1)
        .and_then(|g| g.pushforward(&m2))
        .expect("same space");
    c.check("composition", lhs == rhs, input);
    let g = gen::step(rng, &x, size);
    let expand = hm_distance(&f, &g).expect("same space");
    let image = hm_distance(&lhs, &g.pushforward(&composite).expect("same space"))
        .expect("same space");
    // distances are at most 1 and pushforwards only disagree where the
    // originals do
    let disagreement: Rational = crate::stepfn::common_refinement(&f, &g)
        .expect("same space")
        .pieces()
        .filter(|(_, _, (a, b))| a != b)
        .map(|(s, e, _)| e - s)
        .sum();
    c.check("support of change", image <= disagreement && expand <= disagreement, input);
    c.done()
}

fn pseudometrics(rng: &mut CaseRng, size: Size, _: SuiteOptions) -> Vec<Broken> {
    let mut c = Checks::default();
    let space = gen::space(rng, size);
    let family = gen::family(rng, &space, size);
    let fs: Vec<StepFunction> = (0..3).map(|_| gen::step(rng, &space, size)).collect();
    let rho = |a: &StepFunction, b: &StepFunction| pseudometric(&family, a, b).expect("same space");
    let (f, g, h) = (&fs[0], &fs[1], &fs[2]);
    let input = || format!("f = {f}; g = {g}; h = {h}; {} functionals", family.len());
    c.check("zero diagonal", rho(f, f).is_zero(), input);
    c.check("symmetry", rho(f, g) == rho(g, f), input);
    c.check("triangle inequality", rho(f, h) <= rho(f, g) + rho(g, h), input);
    if let Some(p) = c.ok("projection", project(f, &family)) {
        let inside = family.iter().zip(&p).all(|(wf, v)| within_signed_range(wf, v));
        c.check("projection range", inside, input);
    }
    // a window average moves by at most (max φ - min φ) · measure / length
    let spread = family
        .iter()
        .map(|wf| {
            let (lo, hi) = crate::space::signed_range(&wf.functional);
            (hi - lo) / wf.window.length()
        })
        .max()
        .expect("nonempty family");
    let disagreement: Rational = crate::stepfn::common_refinement(f, g)
        .expect("same space")
        .pieces()
        .filter(|(_, _, (a, b))| a != b)
        .map(|(s, e, _)| e - s)
        .sum();
    c.check("lipschitz in disagreement", rho(f, g) <= spread * disagreement, input);
    c.done()
}

fn midpoint(rng: &mut CaseRng, size: Size, _: SuiteOptions) -> Vec<Broken> {
    let mut c = Checks::default();
    let space = gen::space(rng, size);
    let (a, b) = (gen::step(rng, &space, size), gen::step(rng, &space, size));
    let coords = gen::family(rng, &space, size);
    let input = || format!("alpha = {a}; beta = {b}; {} coords", coords.len());
    let Some(m) = c.ok("midpoint", hm_midpoint(&a, &b, &coords)) else {
        return c.done();
    };
    let (pa, pb, pm) = (
        project(&a, &coords).expect("same space"),
        project(&b, &coords).expect("same space"),
        project(&m, &coords).expect("same space"),
    );
    let avg = convex_midpoint_vector(&pa, &pb).expect("same length");
    c.check("exact average", pm == avg, input);
    c.done()
}

/// Overwrites short random intervals of `f` so that every grid-cell average
/// under `phi` moves by less than `bound`.
fn nudge(
    rng: &mut CaseRng,
    f: &StepFunction,
    phi: &TestFunctional,
    n: u64,
    bound: &Rational,
) -> StepFunction {
    let c = functional_norm(phi);
    if c.is_zero() {
        return gen::step(rng, f.space(), Size::DEFAULT);
    }
    // a patch of length L shifts a cell average by at most 2cLn
    let max_len = (bound / (int(4) * &c * int(n as i64))).min(rat(1, 2));
    let mut g = f.clone();
    for _ in 0..rng.random_range(0..=2) {
        let len = &max_len * rat(rng.random_range(1..=8), 8);
        let start = rat(rng.random_range(0..=1000), 1000) * (Rational::one() - &len);
        let end = &start + &len;
        let v = StepFunction::constant(f.space(), rng.random_range(0..f.space().len()));
        let patched = e1(&g, &v, &start).expect("t in range");
        g = e1(&patched, &g, &end).expect("t in range");
    }
    g
}

fn certificate(rng: &mut CaseRng, size: Size, _: SuiteOptions) -> Vec<Broken> {
    let mut c = Checks::default();
    let space = gen::space(rng, size);
    let phi = gen::functional(rng, &space);
    let delta = rat(rng.random_range(1..=12), rng.random_range(1..=12));
    let Some(cert) = c.ok("certificate", make_certificate(&phi, &delta)) else {
        return c.done();
    };
    let a1 = gen::step(rng, &space, size);
    let b1 = gen::step(rng, &space, size);
    let a2 = nudge(rng, &a1, &phi, cert.n, &cert.v_threshold);
    let b2 = nudge(rng, &b1, &phi, cert.n, &cert.v_threshold);
    let t1 = gen::unit_rational(rng, size);
    let shift = &cert.e_threshold * rat(rng.random_range(-99..=99), 100);
    let t2 = (&t1 + shift).clamp(Rational::zero(), Rational::one());
    let input = || {
        format!(
            "phi = {phi}; delta = {}; n = {}; a1 = {a1}; b1 = {b1}; t1 = {}; a2 = {a2}; b2 = {b2}; t2 = {}",
            format_rational(&delta),
            cert.n,
            format_rational(&t1),
            format_rational(&t2)
        )
    };
    if let Some(r) = c.ok("check", check_certificate(&cert, &a1, &b1, &t1, &a2, &b2, &t2)) {
        c.check("hypotheses hold", r.in_v && r.in_e, input);
        c.check("soundness", r.sound(), input);
    }
    c.done()
}

fn e_n_laws(rng: &mut CaseRng, size: Size, _: SuiteOptions) -> Vec<Broken> {
    let mut c = Checks::default();
    let space = gen::space(rng, size);
    let (a, b) = (gen::step(rng, &space, size), gen::step(rng, &space, size));
    let t = gen::unit_rational(rng, size);
    let input2 = || format!("alpha = {a}; beta = {b}; t = {}", format_rational(&t));
    c.check("endpoint t=0", e1(&a, &b, &Rational::zero()).ok() == Some(b.clone()), input2);
    c.check("endpoint t=1", e1(&a, &b, &Rational::one()).ok() == Some(a.clone()), input2);
    c.check("idempotence", e1(&a, &a, &t).ok() == Some(a.clone()), input2);

    let k = rng.random_range(1..=4);
    let points: Vec<StepFunction> = (0..k).map(|_| gen::step(rng, &space, size)).collect();
    let w = gen::weights(rng, k, 0.3);
    let show = |pts: &[StepFunction], w: &SimplexWeights| {
        let ws: Vec<String> = w.weights().iter().map(format_rational).collect();
        let ps: Vec<String> = pts.iter().map(|p| format!("[{p}]")).collect();
        format!("points = {}; weights = {}", ps.join(" "), ws.join(","))
    };
    let j = rng.random_range(0..k);
    let vertex = SimplexWeights::vertex(k, j);
    c.check("vertex identity", e_n(&points, &vertex).ok() == Some(points[j].clone()), || {
        show(&points, &vertex)
    });
    let same = vec![a.clone(); k];
    c.check("diagonal identity", e_n(&same, &w).ok() == Some(a.clone()), || show(&same, &w));

    let Some(base) = c.ok("e_n", e_n(&points, &w)) else {
        return c.done();
    };
    let at = rng.random_range(0..=k);
    let mut padded = points.clone();
    padded.insert(at, gen::step(rng, &space, size));
    let mut pw = w.weights().to_vec();
    pw.insert(at, Rational::zero());
    let pw = SimplexWeights::new(pw).expect("still on the simplex");
    c.check("zero padding", e_n(&padded, &pw).ok() == Some(base.clone()), || show(&padded, &pw));

    let selects = base.pieces().all(|(s, _, v)| points.iter().any(|p| p.value_at(s) == v))
        && base
            .breakpoints()
            .iter()
            .all(|l| l.is_one() || points.iter().any(|p| p.value_at(l) == base.value_at(l)));
    c.check("pointwise selection", selects, || show(&points, &w));

    let other = gen::space(rng, size);
    let m = gen::map(rng, &space, &other);
    let lhs = e1(&a, &b, &t).and_then(|g| g.pushforward(&m));
    let rhs = a
        .pushforward(&m)
        .and_then(|pa| e1(&pa, &b.pushforward(&m)?, &t));
    c.check("naturality", lhs.is_ok() && lhs == rhs, input2);
    c.done()
}

/// Boundary data holding exactly the anchors active at `x`.
fn local_data<F>(sys: &DugundjiSystem, x: &[Rational], f: F) -> Result<BoundaryData>
where
    F: Fn(&Point) -> StepFunction,
{
    let anchors: Vec<Point> = sys
        .pou_eval(x)?
        .iter()
        .map(|(v, _)| sys.anchor(v))
        .collect();
    BoundaryData::new(sys.dim(), anchors.into_iter().map(|a| {
        let v = f(&a);
        (a, v)
    }))
}

/// A random interior point at most `levels` rings deep.
fn interior_point(rng: &mut CaseRng, dim: usize, levels: u32) -> Point {
    let k = rng.random_range(1..=levels);
    let den = 1i64 << (k + 2);
    loop {
        let x: Point = (0..dim)
            .map(|_| rat(rng.random_range(1..den * 3), den * 3))
            .collect();
        if mesh::is_interior(&x) {
            return x;
        }
    }
}

fn dugundji_case(rng: &mut CaseRng, size: Size, dim: usize, levels: u32) -> Vec<Broken> {
    let mut c = Checks::default();
    let sys = build_system(dim).expect("supported dimension");
    let x = interior_point(rng, dim, levels);
    let input = || format!("x = {}", format_point(&x));
    let Some(weights) = c.ok("pou", sys.pou_eval(&x)) else {
        return c.done();
    };
    let total: Rational = weights.iter().map(|(_, w)| w).sum();
    c.check("partition of unity", total.is_one(), input);
    c.check("positive weights", weights.iter().all(|(_, w)| w.is_positive()), input);
    c.check("multiplicity", weights.len() <= dim + 1, input);
    c.check("global order", weights.windows(2).all(|p| p[0].0 < p[1].0), input);
    let bd = mesh::boundary_distance(&x);
    for (v, _) in &weights {
        let a = sys.anchor(v);
        c.check("condition (1)", mesh::on_boundary(&a) && mesh::is_interior(&v.position), || {
            format!("x = {}; vertex {}", format_point(&x), format_point(&v.position))
        });
        c.check("condition (3)", mesh::sup_distance(&x, &a) <= &bd * int(2), || {
            format!("x = {}; anchor {}", format_point(&x), format_point(&a))
        });
    }

    let space = gen::space(rng, size);
    let table: Vec<StepFunction> = (0..4).map(|_| gen::step(rng, &space, size)).collect();
    // one step function per face of the cube
    let pick = |a: &Point| {
        let i = a.iter().position(|c| c.is_zero() || c.is_one()).expect("boundary point");
        table[2 * i + usize::from(a[i].is_one())].clone()
    };
    let Some(data) = c.ok("boundary data", local_data(&sys, &x, pick)) else {
        return c.done();
    };
    let Some(fx) = c.ok("extend", extend(&sys, &data, &x)) else {
        return c.done();
    };
    let again = extend(&sys, &data, &x).ok();
    c.check("determinism", again.as_ref() == Some(&fx), input);
    let anchors: Vec<&StepFunction> = data.entries().map(|(_, f)| f).collect();
    let confined = takes_values_among(&fx, &anchors);
    c.check("range confinement", confined, || {
        format!("x = {}; F(x) = {fx}", format_point(&x))
    });
    c.done()
}

/// Whether `f(l)` equals some `sources[i](l)` for every `l`. All functions
/// are constant between consecutive points of the merged breakpoint set, so
/// checking those points is exhaustive.
pub fn takes_values_among(f: &StepFunction, sources: &[&StepFunction]) -> bool {
    let mut cuts: Vec<&Rational> = f
        .breakpoints()
        .iter()
        .chain(sources.iter().flat_map(|g| g.breakpoints()))
        .filter(|l| !l.is_one())
        .collect();
    cuts.sort();
    cuts.dedup();
    cuts.into_iter()
        .all(|l| sources.iter().any(|g| g.value_at(l) == f.value_at(l)))
}

fn dugundji_1(rng: &mut CaseRng, size: Size, _: SuiteOptions) -> Vec<Broken> {
    dugundji_case(rng, size, 1, 12)
}

fn dugundji_2(rng: &mut CaseRng, size: Size, _: SuiteOptions) -> Vec<Broken> {
    dugundji_case(rng, size, 2, 6)
}

/// A random boundary point of the cube with small denominators.
fn boundary_point(rng: &mut CaseRng, dim: usize) -> Point {
    let mut p: Point = (0..dim).map(|_| rat(rng.random_range(0..=8), 8)).collect();
    let i = rng.random_range(0..dim);
    p[i] = int(rng.random_range(0..=1));
    p
}

fn boundary_continuity(rng: &mut CaseRng, size: Size, _: SuiteOptions) -> Vec<Broken> {
    let mut c = Checks::default();
    let dim = rng.random_range(1..=2);
    let sys = build_system(dim).expect("supported dimension");
    let space = gen::space(rng, size);
    let (a, b) = (gen::step(rng, &space, size), gen::step(rng, &space, size));
    // f(p) = e1(A, B, p_1): continuous on the boundary, and a change of p by r
    // moves f(p) by at most r in measure
    let f = |p: &Point| e1(&a, &b, &p[0]).expect("t in [0,1]");
    let p = boundary_point(rng, dim);
    let fp = f(&p);
    let input = || format!("n = {dim}; p = {}; A = {a}; B = {b}", format_point(&p));

    let at_p = BoundaryData::new(dim, [(p.clone(), fp.clone())]).expect("boundary point");
    c.check("agrees on boundary", extend(&sys, &at_p, &p).ok() == Some(fp.clone()), input);

    let diam = space.diameter();
    let mut last = None;
    for x in dyadic_path(&p, 12) {
        let Some(data) = c.ok("boundary data", local_data(&sys, &x, f)) else {
            break;
        };
        let Some(fx) = c.ok("extend", extend(&sys, &data, &x)) else {
            break;
        };
        let d = hm_distance(&fx, &fp).expect("same space");
        // anchors lie within 3 d(x, p) of p, so F(x) and f(p) differ on a set
        // of measure at most 6 d(x, p)
        let bound = mesh::sup_distance(&x, &p) * int(6) * &diam;
        c.check("modulus", d <= bound, || {
            format!("{}; x = {}; distance {}", input(), format_point(&x), format_rational(&d))
        });
        last = Some(d);
    }
    if a == b {
        c.check("constant data", last.is_some_and(|d| d.is_zero()), input);
    }
    c.done()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_briefly() {
        for name in SUITES {
            let r = run_suite(name, 1, 40).unwrap();
            assert!(r.passed(), "{}", r.summary());
        }
    }

    #[test]
    fn unknown_suite() {
        assert_eq!(
            run_suite("nope", 0, 1),
            Err(Error::UnknownSuite("nope".into()))
        );
    }

    #[test]
    fn deterministic_modulo_time() {
        let a = run_suite("midpoint", 9, 30).unwrap();
        let b = run_suite("midpoint", 9, 30).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
    }

    #[test]
    fn negative_control_names_axiom() {
        let r = run_suite_with("metric-axioms", 3, 10, SuiteOptions { corrupt: true }).unwrap();
        assert!(!r.passed());
        assert!(r.failures.iter().any(|f| f.property == "space: triangle inequality"));
        assert!(r.failures.iter().any(|f| f.property == "triangle inequality"));
    }
}
