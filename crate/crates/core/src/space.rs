//! Finite metric spaces, real-valued test functionals on them, and maps
//! between them.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{abs, format_rational, Rational};

/// Metric axioms checked by [`validate_space`], in checking order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    ZeroDiagonal,
    Symmetry,
    ZeroOffDiagonal,
    BoundExceeded,
    TriangleInequality,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::ZeroDiagonal => "zero diagonal",
            Axiom::Symmetry => "symmetry (asymmetric table)",
            Axiom::ZeroOffDiagonal => "zero off-diagonal (positivity)",
            Axiom::BoundExceeded => "bound exceeded",
            Axiom::TriangleInequality => "triangle inequality",
        })
    }
}

/// A finite metric space with labelled points and a rational metric bounded by 1.
///
/// The label order fixes every iteration order in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
    index: HashMap<String, usize>,
}

pub type Space = Arc<FiniteMetricSpace>;

/// Validates a labelled distance table and returns the shared space.
pub fn validate_space(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Space> {
    let index = build_index(&labels)?;
    check_shape(labels.len(), &dist)?;
    if let Some((axiom, witness)) = first_violation(&labels, &dist) {
        return Err(Error::Axiom { axiom, witness });
    }
    Ok(Arc::new(FiniteMetricSpace {
        labels,
        dist,
        index,
    }))
}

fn build_index(labels: &[String]) -> Result<HashMap<String, usize>> {
    if labels.is_empty() {
        return Err(Error::EmptySpace);
    }
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(index)
}

fn check_shape(points: usize, dist: &[Vec<Rational>]) -> Result<()> {
    if dist.len() != points || dist.iter().any(|row| row.len() != points) {
        return Err(Error::TableShape {
            rows: dist.len(),
            points,
        });
    }
    Ok(())
}

/// Returns the first violated axiom (in [`Axiom`] order) with a witness
/// description, or `None` for a valid table. The table must be square.
pub fn first_violation(labels: &[String], dist: &[Vec<Rational>]) -> Option<(Axiom, String)> {
    let n = labels.len();
    let pair = |i: usize, j: usize| format!("({}, {})", labels[i], labels[j]);
    for i in 0..n {
        if !dist[i][i].is_zero() {
            return Some((Axiom::ZeroDiagonal, pair(i, i)));
        }
    }
    for i in 0..n {
        for j in 0..i {
            if dist[i][j] != dist[j][i] {
                return Some((Axiom::Symmetry, pair(i, j)));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && !dist[i][j].is_positive() {
                return Some((Axiom::ZeroOffDiagonal, pair(i, j)));
            }
        }
    }
    let one = Rational::one();
    for i in 0..n {
        for j in 0..n {
            if dist[i][j] > one {
                return Some((Axiom::BoundExceeded, pair(i, j)));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if dist[i][j] > &dist[i][k] + &dist[k][j] {
                    let w = format!("({}, {}) via {}", labels[i], labels[j], labels[k]);
                    return Some((Axiom::TriangleInequality, w));
                }
            }
        }
    }
    None
}

impl FiniteMetricSpace {
    /// Builds a space without checking the metric axioms. Only the shape and
    /// labels are checked. Used to inject broken tables into negative-control
    /// suites.
    pub fn new_unchecked(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Space> {
        let index = build_index(&labels)?;
        check_shape(labels.len(), &dist)?;
        Ok(Arc::new(FiniteMetricSpace {
            labels,
            dist,
            index,
        }))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn table(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn diameter(&self) -> Rational {
        self.dist
            .iter()
            .flatten()
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Re-runs the axiom check; `None` means the table is a valid metric.
    pub fn violation(&self) -> Option<(Axiom, String)> {
        first_violation(&self.labels, &self.dist)
    }
}

pub(crate) fn same_space(a: &Space, b: &Space) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn ensure_same(a: &Space, b: &Space) -> Result<()> {
    if same_space(a, b) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// A real-valued function on the points of a finite space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestFunctional {
    space: Space,
    values: Vec<Rational>,
}

impl TestFunctional {
    /// Takes one `(label, value)` pair per point, in any order.
    pub fn from_pairs<I, S>(space: &Space, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: AsRef<str>,
    {
        let mut values: Vec<Option<Rational>> = vec![None; space.len()];
        for (label, v) in pairs {
            let i = space.index_of(label.as_ref())?;
            values[i] = Some(v);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::MissingValue(space.label(i).to_string())))
            .collect::<Result<_>>()?;
        Ok(TestFunctional {
            space: space.clone(),
            values,
        })
    }

    /// Values listed in the space's label order.
    pub fn from_values(space: &Space, values: Vec<Rational>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: space.len(),
            });
        }
        Ok(TestFunctional {
            space: space.clone(),
            values,
        })
    }

    /// The indicator of a single point.
    pub fn indicator(space: &Space, point: usize) -> Self {
        let values = (0..space.len())
            .map(|i| if i == point { Rational::one() } else { Rational::zero() })
            .collect();
        TestFunctional {
            space: space.clone(),
            values,
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, point: usize) -> &Rational {
        &self.values[point]
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        TestFunctional {
            space: self.space.clone(),
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        Ok(TestFunctional {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// `max |φ(x)|` over the points.
pub fn functional_norm(phi: &TestFunctional) -> Rational {
    phi.values.iter().map(abs).max().unwrap_or_else(Rational::zero)
}

/// `[min |φ(x)|, max |φ(x)|]`, the coordinate interval of the product embedding
/// taken literally with absolute values.
pub fn functional_range(phi: &TestFunctional) -> (Rational, Rational) {
    let lo = phi.values.iter().map(abs).min().unwrap_or_else(Rational::zero);
    (lo, functional_norm(phi))
}

/// `[min φ(x), max φ(x)]`; every window average of `φ` lies in this interval.
pub fn signed_range(phi: &TestFunctional) -> (Rational, Rational) {
    let lo = phi.values.iter().min().cloned().unwrap_or_else(Rational::zero);
    let hi = phi.values.iter().max().cloned().unwrap_or_else(Rational::zero);
    (lo, hi)
}

/// A total map between the point sets of two finite spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceMap {
    domain: Space,
    codomain: Space,
    table: Vec<usize>,
}

impl SpaceMap {
    pub fn from_pairs<I, S, T>(domain: &Space, codomain: &Space, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let mut table = vec![None; domain.len()];
        for (from, to) in pairs {
            table[domain.index_of(from.as_ref())?] = Some(codomain.index_of(to.as_ref())?);
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| Error::MissingValue(domain.label(i).to_string())))
            .collect::<Result<_>>()?;
        Ok(SpaceMap {
            domain: domain.clone(),
            codomain: codomain.clone(),
            table,
        })
    }

    pub fn from_indices(domain: &Space, codomain: &Space, table: Vec<usize>) -> Result<Self> {
        if table.len() != domain.len() {
            return Err(Error::LengthMismatch {
                left: table.len(),
                right: domain.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&j| j >= codomain.len()) {
            return Err(Error::UnknownLabel(format!("#{bad}")));
        }
        Ok(SpaceMap {
            domain: domain.clone(),
            codomain: codomain.clone(),
            table,
        })
    }

    pub fn identity(space: &Space) -> Self {
        SpaceMap {
            domain: space.clone(),
            codomain: space.clone(),
            table: (0..space.len()).collect(),
        }
    }

    pub fn constant(domain: &Space, codomain: &Space, target: usize) -> Self {
        SpaceMap {
            domain: domain.clone(),
            codomain: codomain.clone(),
            table: vec![target; domain.len()],
        }
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &SpaceMap) -> Result<SpaceMap> {
        ensure_same(&self.codomain, &then.domain)?;
        Ok(SpaceMap {
            domain: self.domain.clone(),
            codomain: then.codomain.clone(),
            table: self.table.iter().map(|&j| then.table[j]).collect(),
        })
    }

    pub fn domain(&self) -> &Space {
        &self.domain
    }

    pub fn codomain(&self) -> &Space {
        &self.codomain
    }

    pub fn apply(&self, point: usize) -> usize {
        self.table[point]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

impl fmt::Display for TestFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{}:{}", self.space.label(i), format_rational(v)))
            .collect();
        write!(f, "φ{{{}}}", parts.join(", "))
    }
}
