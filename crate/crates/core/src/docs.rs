//! JSON documents for every object the CLI and bindings exchange.
//!
//! Rationals are strings `"p/q"`; point values are labels. Each document type
//! converts to and from its library object, validating on the way in.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dugundji::BoundaryData;
use crate::equiconnect::{ContinuityCertificate, SimplexWeights};
use crate::error::{Error, Result};
use crate::functionals::{Window, WindowedFunctional};
use crate::rational::{format_point, format_rational, parse_point, parse_rational, Rational};
use crate::space::{validate_space, Space, SpaceMap, TestFunctional};
use crate::stepfn::StepFunction;

fn rationals(texts: &[String]) -> Result<Vec<Rational>> {
    texts.iter().map(|t| parse_rational(t)).collect()
}

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub points: Vec<String>,
    pub dist: Vec<Vec<String>>,
}

impl SpaceDoc {
    pub fn load(&self) -> Result<Space> {
        let dist = self
            .dist
            .iter()
            .map(|row| rationals(row))
            .collect::<Result<Vec<_>>>()?;
        validate_space(self.points.clone(), dist)
    }

    pub fn of(space: &Space) -> Self {
        SpaceDoc {
            points: space.labels().to_vec(),
            dist: space.table().iter().map(|r| strings(r)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalDoc {
    pub space: SpaceDoc,
    pub values: BTreeMap<String, String>,
}

impl FunctionalDoc {
    pub fn load(&self) -> Result<TestFunctional> {
        let space = self.space.load()?;
        self.load_over(&space)
    }

    pub fn load_over(&self, space: &Space) -> Result<TestFunctional> {
        let pairs = self
            .values
            .iter()
            .map(|(k, v)| Ok((k.as_str(), parse_rational(v)?)))
            .collect::<Result<Vec<_>>>()?;
        TestFunctional::from_pairs(space, pairs)
    }

    pub fn of(phi: &TestFunctional) -> Self {
        let space = phi.space();
        FunctionalDoc {
            space: SpaceDoc::of(space),
            values: (0..space.len())
                .map(|i| (space.label(i).to_string(), format_rational(phi.value(i))))
                .collect(),
        }
    }
}

/// A map between finite spaces. Without `codomain`, the map is an endomap of
/// whatever domain it is applied to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<SpaceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<SpaceDoc>,
    pub table: BTreeMap<String, String>,
}

impl MapDoc {
    pub fn load(&self, domain: &Space) -> Result<SpaceMap> {
        if let Some(d) = &self.domain {
            crate::space::ensure_same(&d.load()?, domain)?;
        }
        let codomain = match &self.codomain {
            Some(c) => c.load()?,
            None => domain.clone(),
        };
        SpaceMap::from_pairs(domain, &codomain, self.table.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    pub fn of(map: &SpaceMap) -> Self {
        let (d, c) = (map.domain(), map.codomain());
        MapDoc {
            domain: Some(SpaceDoc::of(d)),
            codomain: Some(SpaceDoc::of(c)),
            table: (0..d.len())
                .map(|i| (d.label(i).to_string(), c.label(map.apply(i)).to_string()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDoc {
    pub space: SpaceDoc,
    pub breakpoints: Vec<String>,
    pub values: Vec<String>,
}

impl StepDoc {
    pub fn load(&self) -> Result<StepFunction> {
        self.load_over(&self.space.load()?)
    }

    pub fn load_over(&self, space: &Space) -> Result<StepFunction> {
        StepFunction::canonicalize(space, rationals(&self.breakpoints)?, &self.values)
    }

    pub fn of(f: &StepFunction) -> Self {
        StepDoc {
            space: SpaceDoc::of(f.space()),
            breakpoints: strings(f.breakpoints()),
            values: f.value_labels().into_iter().map(String::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowDoc {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberDoc {
    pub functional: FunctionalDoc,
    pub window: WindowDoc,
}

/// A functional family: a list of `{functional, window}` records.
pub type FamilyDoc = Vec<MemberDoc>;

pub fn load_family(doc: &[MemberDoc]) -> Result<Vec<WindowedFunctional>> {
    doc.iter()
        .map(|m| {
            let w = Window::new(parse_rational(&m.window.a)?, parse_rational(&m.window.b)?)?;
            Ok(WindowedFunctional::new(m.functional.load()?, w))
        })
        .collect()
}

pub fn family_doc(family: &[WindowedFunctional]) -> FamilyDoc {
    family
        .iter()
        .map(|wf| MemberDoc {
            functional: FunctionalDoc::of(&wf.functional),
            window: WindowDoc {
                a: format_rational(wf.window.a()),
                b: format_rational(wf.window.b()),
            },
        })
        .collect()
}

pub fn load_weights(texts: &[String]) -> Result<SimplexWeights> {
    SimplexWeights::new(rationals(texts)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDoc {
    pub n: usize,
}

/// `{"system":{"n":1}, "values":{"0/1": <stepfn>, "1/1": <stepfn>}}`; in the
/// square the keys are `"p/q,p/q"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryDoc {
    pub system: SystemDoc,
    pub values: BTreeMap<String, StepDoc>,
}

impl BoundaryDoc {
    pub fn load(&self) -> Result<BoundaryData> {
        let entries = self
            .values
            .iter()
            .map(|(k, v)| Ok((parse_point(k)?, v.load()?)))
            .collect::<Result<Vec<_>>>()?;
        BoundaryData::new(self.system.n, entries)
    }

    pub fn of(data: &BoundaryData) -> Self {
        BoundaryDoc {
            system: SystemDoc { n: data.dim() },
            values: data
                .entries()
                .map(|(p, f)| (format_point(p), StepDoc::of(f)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub functional: FunctionalDoc,
    pub delta: String,
    pub norm: String,
    pub n: u64,
    pub grid: Vec<String>,
    pub v_threshold: String,
    pub e_threshold: String,
}

impl CertificateDoc {
    pub fn of(c: &ContinuityCertificate) -> Self {
        CertificateDoc {
            functional: FunctionalDoc::of(&c.functional),
            delta: format_rational(&c.delta),
            norm: format_rational(&c.norm),
            n: c.n,
            grid: strings(&c.grid),
            v_threshold: format_rational(&c.v_threshold),
            e_threshold: format_rational(&c.e_threshold),
        }
    }

    pub fn load(&self) -> Result<ContinuityCertificate> {
        Ok(ContinuityCertificate {
            functional: self.functional.load()?,
            delta: parse_rational(&self.delta)?,
            norm: parse_rational(&self.norm)?,
            n: self.n,
            grid: rationals(&self.grid)?,
            v_threshold: parse_rational(&self.v_threshold)?,
            e_threshold: parse_rational(&self.e_threshold)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    const XY: &str = r#"{"points":["x","y"],"dist":[["0","1"],["1","0"]]}"#;

    #[test]
    fn step_document_round_trip() {
        let text = format!(r#"{{"space":{XY},"breakpoints":["0/1","2/4","1/1"],"values":["x","y"]}}"#);
        let f = parse::<StepDoc>(&text).unwrap().load().unwrap();
        assert_eq!(f.breakpoints(), &[int(0), rat(1, 2), int(1)]);
        let doc = StepDoc::of(&f);
        assert_eq!(doc.breakpoints, vec!["0/1", "1/2", "1/1"]);
        assert_eq!(parse::<StepDoc>(&to_json(&doc)).unwrap().load().unwrap(), f);
    }

    #[test]
    fn bad_documents() {
        assert!(matches!(parse::<SpaceDoc>("{"), Err(Error::Document(_))));
        let bad = r#"{"points":["x","y"],"dist":[["0","1/0"],["1","0"]]}"#;
        assert!(matches!(
            parse::<SpaceDoc>(bad).unwrap().load(),
            Err(Error::ZeroDenominator(_))
        ));
    }

    #[test]
    fn boundary_document() {
        let text = format!(
            r#"{{"system":{{"n":1}},"values":{{
                "0/1":{{"space":{XY},"breakpoints":["0","1"],"values":["x"]}},
                "1/1":{{"space":{XY},"breakpoints":["0","1"],"values":["y"]}}}}}}"#
        );
        let data = parse::<BoundaryDoc>(&text).unwrap().load().unwrap();
        assert_eq!(data.points().count(), 2);
        assert_eq!(BoundaryDoc::of(&data).load().unwrap(), data);
    }

    #[test]
    fn certificate_round_trip() {
        let space = parse::<SpaceDoc>(XY).unwrap().load().unwrap();
        let phi = TestFunctional::from_values(&space, vec![int(0), int(1)]).unwrap();
        let c = crate::equiconnect::make_certificate(&phi, &rat(1, 2)).unwrap();
        let doc = CertificateDoc::of(&c);
        assert_eq!(doc.n, 5);
        assert_eq!(doc.v_threshold, "1/100");
        assert_eq!(doc.load().unwrap(), c);
    }
}
