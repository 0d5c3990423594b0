//! `hm`: command-line front end to `hm-core`.
//!
//! Exit status: 0 success, 1 a checked property failed, 2 bad input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use hm_core::docs::{
    self, family_doc, load_family, BoundaryDoc, CertificateDoc, FunctionalDoc, MapDoc, SpaceDoc,
    StepDoc,
};
use hm_core::dugundji::{self, build_system, dyadic_path};
use hm_core::equiconnect::{self, SimplexWeights};
use hm_core::functionals::{self, Window, WindowedFunctional};
use hm_core::rational::{format_point, format_rational, parse_point, parse_rational};
use hm_core::stepfn;
use hm_core::suite::{self, SuiteOptions};
use hm_core::{Rational, StepFunction};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hm", version, about = "Exact step-function spaces over finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integral distance between two step functions.
    Dist { f: PathBuf, g: PathBuf },
    /// Value of a step function at t in [0,1).
    Eval {
        f: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Pushforward of a step function along a map.
    Push {
        f: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Whether BETA lies in the neighbourhood <ALPHA, U_delta, eps>.
    Nbhd {
        alpha: PathBuf,
        beta: PathBuf,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        eps: String,
    },
    /// Windowed average of a functional along a step function.
    Avg {
        f: PathBuf,
        #[arg(long)]
        functional: PathBuf,
        /// Window as "a,b".
        #[arg(long, default_value = "0/1,1/1")]
        window: String,
    },
    /// Pseudometric of a functional family between two step functions.
    Rho {
        f: PathBuf,
        g: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Coordinates of a step function under a functional family.
    Project {
        f: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Seeded family of indicator functionals over dyadic windows.
    SampleFamily {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        windows: usize,
    },
    /// ALPHA on [0,t), BETA on [t,1).
    E1 {
        alpha: PathBuf,
        beta: PathBuf,
        #[arg(long)]
        t: String,
    },
    /// Iterated splice of the given points with simplex weights.
    En {
        #[arg(required = true)]
        points: Vec<PathBuf>,
        /// Comma-separated weights, one per point.
        #[arg(long)]
        weights: String,
    },
    /// Step function projecting to the exact average of ALPHA and BETA.
    Midpoint {
        alpha: PathBuf,
        beta: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Continuity certificate for e1 at tolerance delta.
    Certificate {
        #[arg(long)]
        functional: PathBuf,
        #[arg(long)]
        delta: String,
    },
    /// Evaluates a certificate on two splice inputs.
    CheckCert {
        cert: PathBuf,
        alpha1: PathBuf,
        beta1: PathBuf,
        alpha2: PathBuf,
        beta2: PathBuf,
        #[arg(long)]
        t1: String,
        #[arg(long)]
        t2: String,
    },
    /// Describes the Dugundji system of the open n-cube.
    BuildSystem {
        #[arg(long)]
        n: usize,
        /// Number of loop levels to list.
        #[arg(long, default_value_t = 3)]
        levels: u32,
    },
    /// Checks the Dugundji conditions for all cells up to a depth.
    VerifySystem {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        depth: u32,
    },
    /// Evaluates the extension of boundary data at a point of the cube.
    Extend {
        boundary: PathBuf,
        /// Point as "p/q" or "p/q,p/q".
        #[arg(long)]
        at: String,
    },
    /// Distances from F along a dyadic path to the value at a boundary point.
    ProbeBoundary {
        boundary: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 12)]
        steps: u32,
        #[arg(long, default_value = "1/100")]
        tol: String,
    },
    /// Searches for splice images escaping a pseudometric ball.
    ProbeShrink {
        z: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        outer: String,
        #[arg(long)]
        inner: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of points fed to e_n (n + 1 for the n-cube).
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
    /// Runs a seeded property suite.
    Check {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: u64,
        /// Negative control: feed corrupted distance tables.
        #[arg(long)]
        corrupt: bool,
    },
}

/// Outcome of a verb that ran to completion.
enum Outcome {
    Ok,
    PropertyFailed,
}

fn read_doc<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    docs::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn step(path: &Path) -> Result<StepFunction> {
    Ok(read_doc::<StepDoc>(path)?.load()?)
}

fn family(path: &Path) -> Result<Vec<WindowedFunctional>> {
    Ok(load_family(&read_doc::<docs::FamilyDoc>(path)?)?)
}

fn rational(text: &str) -> Result<Rational> {
    parse_rational(text.trim()).with_context(|| format!("parsing {text:?}"))
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", docs::to_json(value));
}

fn print_step(f: &StepFunction) {
    print_json(&StepDoc::of(f));
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Dist { f, g } => {
            println!("{}", format_rational(&stepfn::hm_distance(&step(&f)?, &step(&g)?)?));
        }
        Command::Eval { f, at } => {
            let f = step(&f)?;
            println!("{}", f.space().label(f.evaluate(&rational(&at)?)?));
        }
        Command::Push { f, map } => {
            let f = step(&f)?;
            let m = read_doc::<MapDoc>(&map)?.load(f.space())?;
            print_step(&f.pushforward(&m)?);
        }
        Command::Nbhd { alpha, beta, delta, eps } => {
            let (a, b) = (step(&alpha)?, step(&beta)?);
            let delta = rational(&delta)?;
            let inside = stepfn::neighborhood_contains(&a, &delta, &rational(&eps)?, &b)?;
            let bad = stepfn::bad_set_measure(&a, &delta, &b)?;
            print_json(&json!({ "contains": inside, "bad_set_measure": format_rational(&bad) }));
        }
        Command::Avg { f, functional, window } => {
            let f = step(&f)?;
            let phi = read_doc::<FunctionalDoc>(&functional)?.load_over(f.space())?;
            let ends = parse_point(&window)?;
            let [a, b] = <[Rational; 2]>::try_from(ends)
                .map_err(|_| anyhow::anyhow!("window must be \"a,b\""))?;
            let wf = WindowedFunctional::new(phi, Window::new(a, b)?);
            println!("{}", format_rational(&functionals::window_average(&wf, &f)?));
        }
        Command::Rho { f, g, family: fam } => {
            let d = functionals::pseudometric(&family(&fam)?, &step(&f)?, &step(&g)?)?;
            println!("{}", format_rational(&d));
        }
        Command::Project { f, family: fam } => {
            let coords = functionals::project(&step(&f)?, &family(&fam)?)?;
            print_json(&coords.iter().map(format_rational).collect::<Vec<_>>());
        }
        Command::SampleFamily { space, seed, windows } => {
            let space = read_doc::<SpaceDoc>(&space)?.load()?;
            print_json(&family_doc(&functionals::sample_family(&space, windows, seed)?));
        }
        Command::E1 { alpha, beta, t } => {
            print_step(&equiconnect::e1(&step(&alpha)?, &step(&beta)?, &rational(&t)?)?);
        }
        Command::En { points, weights } => {
            let points = points.iter().map(|p| step(p)).collect::<Result<Vec<_>>>()?;
            let w = SimplexWeights::new(parse_point(&weights)?)?;
            print_step(&equiconnect::e_n(&points, &w)?);
        }
        Command::Midpoint { alpha, beta, family: fam } => {
            print_step(&equiconnect::hm_midpoint(&step(&alpha)?, &step(&beta)?, &family(&fam)?)?);
        }
        Command::Certificate { functional, delta } => {
            let phi = read_doc::<FunctionalDoc>(&functional)?.load()?;
            let c = equiconnect::make_certificate(&phi, &rational(&delta)?)?;
            print_json(&CertificateDoc::of(&c));
        }
        Command::CheckCert { cert, alpha1, beta1, alpha2, beta2, t1, t2 } => {
            let cert = read_doc::<CertificateDoc>(&cert)?.load()?;
            let r = equiconnect::check_certificate(
                &cert,
                &step(&alpha1)?,
                &step(&beta1)?,
                &rational(&t1)?,
                &step(&alpha2)?,
                &step(&beta2)?,
                &rational(&t2)?,
            )?;
            print_json(&r);
            if !r.sound() {
                return Ok(Outcome::PropertyFailed);
            }
        }
        Command::BuildSystem { n, levels } => {
            let sys = build_system(n)?;
            let loops: Vec<_> = (0..=levels)
                .map(|l| {
                    let vs = sys.vertices(l);
                    json!({
                        "level": l,
                        "boundary_distance": format_rational(&dugundji::mesh::loop_boundary_distance(l)),
                        "vertices": vs.len(),
                        "first": vs.first().map(|v| json!({
                            "position": format_point(&v.position),
                            "anchor": format_point(&sys.anchor(v)),
                        })),
                    })
                })
                .collect();
            print_json(&json!({ "n": n, "multiplicity": n + 1, "loops": loops }));
        }
        Command::VerifySystem { n, depth } => {
            let r = dugundji::verify_system(&build_system(n)?, depth);
            print_json(&r);
            if !r.is_ok() {
                return Ok(Outcome::PropertyFailed);
            }
        }
        Command::Extend { boundary, at } => {
            let data = read_doc::<BoundaryDoc>(&boundary)?.load()?;
            let sys = build_system(data.dim())?;
            print_step(&dugundji::extend(&sys, &data, &parse_point(&at)?)?);
        }
        Command::ProbeBoundary { boundary, point, steps, tol } => {
            let data = read_doc::<BoundaryDoc>(&boundary)?.load()?;
            let sys = build_system(data.dim())?;
            let p = parse_point(&point)?;
            let r = dugundji::boundary_continuity_probe(
                &sys,
                &data,
                &p,
                &dyadic_path(&p, steps),
                &rational(&tol)?,
            )?;
            print_json(&r);
            if !r.tail_below_tolerance {
                return Ok(Outcome::PropertyFailed);
            }
        }
        Command::ProbeShrink { z, family: fam, outer, inner, samples, seed, arity } => {
            let z = step(&z)?;
            let fam = family(&fam)?;
            let r = dugundji::shrink_probe(
                &z,
                &fam,
                &rational(&outer)?,
                &rational(&inner)?,
                samples,
                seed,
                arity,
            )?;
            let counterexample = r.counterexample.as_ref().map(|c| {
                json!({
                    "points": c.points.iter().map(StepDoc::of).collect::<Vec<_>>(),
                    "weights": c.weights.weights().iter().map(format_rational).collect::<Vec<_>>(),
                    "image": StepDoc::of(&c.image),
                    "distance": format_rational(&c.distance),
                })
            });
            print_json(&json!({
                "samples": r.samples,
                "summary": r.summary(),
                "counterexample": counterexample,
            }));
            if r.counterexample.is_some() {
                return Ok(Outcome::PropertyFailed);
            }
        }
        Command::Check { suite: name, seed, cases, corrupt } => {
            let r = suite::run_suite_with(&name, seed, cases, SuiteOptions { corrupt })?;
            print_json(&r);
            eprintln!("{}", r.summary());
            if !r.passed() {
                return Ok(Outcome::PropertyFailed);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::PropertyFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
