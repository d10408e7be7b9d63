//! Versioned JSON documents for coefficients, polynomials and reports.
//!
//! Every document carries `"schema": 1`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::coding::{EkSpaceElement, MartingaleExpansion, ModulatedTerm};
use crate::error::{invalid, Result};
use crate::haar::{DyadicNode, HaarCoeffs};
use crate::torus::{ArcBundle, TrigPoly};
use crate::value::ValueVec;

pub const SCHEMA_VERSION: u32 = 1;

/// `{"schema": 1, ...body}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versioned<T> {
    pub schema: u32,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Versioned<T> {
    pub fn new(body: T) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            body,
        }
    }

    pub fn into_checked(self) -> Result<T> {
        if self.schema != SCHEMA_VERSION {
            return invalid(format!(
                "unsupported schema {}, expected {SCHEMA_VERSION}",
                self.schema
            ));
        }
        Ok(self.body)
    }
}

pub fn to_json<T: Serialize>(body: &T) -> Result<String> {
    serde_json::to_string_pretty(&Versioned::new(body))
        .map_err(|e| crate::Error::InvalidInput(format!("serialisation failed: {e}")))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let doc: Versioned<T> = serde_json::from_str(text).map_err(|e| {
        crate::Error::InvalidInput(format!(
            "malformed JSON at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    doc.into_checked()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarEntryDoc {
    pub depth: u32,
    pub index: u64,
    pub value: Vec<f64>,
}

/// Haar coefficients; the root coefficient is the entry at depth 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarCoeffsDoc {
    pub depth_limit: u32,
    pub value_dim: usize,
    pub mean: Vec<f64>,
    pub entries: Vec<HaarEntryDoc>,
}

impl From<&HaarCoeffs<f64>> for HaarCoeffsDoc {
    fn from(c: &HaarCoeffs<f64>) -> Self {
        let mut entries = Vec::new();
        if !c.root().is_zero() {
            entries.push(HaarEntryDoc {
                depth: 0,
                index: 0,
                value: c.root().components().to_vec(),
            });
        }
        entries.extend(c.entries().iter().map(|(n, v)| HaarEntryDoc {
            depth: n.depth(),
            index: n.index(),
            value: v.components().to_vec(),
        }));
        Self {
            depth_limit: c.depth_limit(),
            value_dim: c.value_dim(),
            mean: c.mean().components().to_vec(),
            entries,
        }
    }
}

impl HaarCoeffsDoc {
    pub fn to_coeffs(&self) -> Result<HaarCoeffs<f64>> {
        let mut c = HaarCoeffs::zero(self.depth_limit, self.value_dim)
            .with_mean(ValueVec::new(self.mean.clone()))?;
        for e in &self.entries {
            c = c.with_entry(DyadicNode::new(e.depth, e.index)?, ValueVec::new(e.value.clone()))?;
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    pub freq: Vec<i64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolyDoc {
    pub d: usize,
    pub clusters: usize,
    pub value_dim: usize,
    pub terms: Vec<TermDoc>,
}

fn term_docs(p: &TrigPoly<f64>) -> Vec<TermDoc> {
    p.terms()
        .iter()
        .map(|(l, c)| TermDoc {
            freq: l.clone(),
            re: c.iter().map(|z| z.re).collect(),
            im: c.iter().map(|z| z.im).collect(),
        })
        .collect()
}

fn poly_from_terms(d: usize, clusters: usize, value_dim: usize, terms: &[TermDoc]) -> Result<TrigPoly<f64>> {
    let mut p = TrigPoly::new(d, clusters, value_dim)?;
    for t in terms {
        if t.re.len() != t.im.len() {
            return invalid("term has differing real and imaginary lengths");
        }
        let c = t.re.iter().zip(&t.im).map(|(&a, &b)| Complex::new(a, b)).collect();
        p = p.with_term(t.freq.clone(), c)?;
    }
    Ok(p)
}

impl From<&TrigPoly<f64>> for TrigPolyDoc {
    fn from(p: &TrigPoly<f64>) -> Self {
        Self {
            d: p.d(),
            clusters: p.clusters(),
            value_dim: p.value_dim(),
            terms: term_docs(p),
        }
    }
}

impl TrigPolyDoc {
    pub fn to_poly(&self) -> Result<TrigPoly<f64>> {
        poly_from_terms(self.d, self.clusters, self.value_dim, &self.terms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EkBlockDoc {
    pub m: usize,
    pub sign: char,
    pub terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EkElementDoc {
    pub d: usize,
    pub k: usize,
    pub value_dim: usize,
    pub blocks: Vec<EkBlockDoc>,
}

fn sign_char(plus: bool) -> char {
    if plus {
        '+'
    } else {
        '-'
    }
}

impl From<&EkSpaceElement<f64>> for EkElementDoc {
    fn from(e: &EkSpaceElement<f64>) -> Self {
        Self {
            d: e.d(),
            k: e.k(),
            value_dim: e.value_dim(),
            blocks: e
                .blocks()
                .iter()
                .map(|b| EkBlockDoc {
                    m: b.m,
                    sign: sign_char(b.plus),
                    terms: term_docs(&b.poly),
                })
                .collect(),
        }
    }
}

impl EkElementDoc {
    pub fn to_element(&self) -> Result<EkSpaceElement<f64>> {
        let mut e = EkSpaceElement::new(self.d, self.k, self.value_dim)?;
        for b in &self.blocks {
            let plus = match b.sign {
                '+' => true,
                '-' => false,
                other => return invalid(format!("block sign must be '+' or '-', got {other:?}")),
            };
            let poly = poly_from_terms(self.d, self.k + 1, self.value_dim, &b.terms)?;
            e.push_block(b.m, plus, poly)?;
        }
        Ok(e)
    }
}

/// A list of `E_k` elements, typically one per `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EkFamilyDoc {
    pub elements: Vec<EkElementDoc>,
}

impl EkFamilyDoc {
    pub fn new(family: &[EkSpaceElement<f64>]) -> Self {
        Self {
            elements: family.iter().map(EkElementDoc::from).collect(),
        }
    }

    pub fn to_family(&self) -> Result<Vec<EkSpaceElement<f64>>> {
        self.elements.iter().map(EkElementDoc::to_element).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeValueDoc {
    pub index: u64,
    pub value: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleBlockDoc {
    pub toss: usize,
    pub k: usize,
    pub m: usize,
    pub sign: char,
    pub values: Vec<NodeValueDoc>,
}

/// Nonzero blocks of a martingale expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleDoc {
    pub d: usize,
    pub depth_limit: u32,
    pub mean: Vec<f64>,
    pub blocks: Vec<MartingaleBlockDoc>,
}

impl From<&MartingaleExpansion<f64>> for MartingaleDoc {
    fn from(e: &MartingaleExpansion<f64>) -> Self {
        Self {
            d: e.d(),
            depth_limit: e.depth_limit(),
            mean: e.mean().components().to_vec(),
            blocks: e
                .nonzero_blocks()
                .map(|b| MartingaleBlockDoc {
                    toss: b.toss(e.d()),
                    k: b.k(),
                    m: b.m(),
                    sign: sign_char(b.plus()),
                    values: b
                        .factor()
                        .values()
                        .iter()
                        .map(|(&index, v)| NodeValueDoc {
                            index,
                            value: v.components().to_vec(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcPieceDoc {
    /// Arc number `n` of `[nπ/2, (n+1)π/2)`.
    pub arc: i8,
    pub terms: Vec<TermDoc>,
}

/// Quarter-arc bundle; every piece lives on the same torus as the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcBundleDoc {
    pub var: usize,
    pub d: usize,
    pub clusters: usize,
    pub value_dim: usize,
    pub pieces: Vec<ArcPieceDoc>,
}

impl From<&ArcBundle<f64>> for ArcBundleDoc {
    fn from(b: &ArcBundle<f64>) -> Self {
        let first = b.pieces().next().expect("four pieces").1;
        Self {
            var: b.var(),
            d: first.d(),
            clusters: first.clusters(),
            value_dim: first.value_dim(),
            pieces: b
                .pieces()
                .map(|(arc, p)| ArcPieceDoc {
                    arc: arc.n(),
                    terms: term_docs(p),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulatedTermDoc {
    pub k: usize,
    pub m: usize,
    pub sign: char,
    pub freq: Vec<i64>,
    /// Stacked integer frequency, decimal.
    pub stacked: Vec<String>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationDoc {
    pub a: u64,
    pub terms: Vec<ModulatedTermDoc>,
}

impl ModulationDoc {
    pub fn new(a: u64, terms: &[ModulatedTerm<f64>]) -> Self {
        Self {
            a,
            terms: terms
                .iter()
                .map(|t| ModulatedTermDoc {
                    k: t.k,
                    m: t.m,
                    sign: sign_char(t.plus),
                    freq: t.freq.clone(),
                    stacked: t.scaled.stacked_exact(a).iter().map(|n| n.to_string()).collect(),
                    re: t.coeff.iter().map(|z| z.re).collect(),
                    im: t.coeff.iter().map(|z| z.im).collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{random_ek_elements, RandomEkSpec};

    #[test]
    fn haar_roundtrip() {
        let c = HaarCoeffs::zero(2, 2)
            .with_mean(ValueVec::new(vec![1.0, 2.0]))
            .unwrap()
            .with_entry(DyadicNode::ROOT, ValueVec::new(vec![0.5, 0.0]))
            .unwrap()
            .with_entry(DyadicNode::new(2, 3).unwrap(), ValueVec::new(vec![-1.0, 0.25]))
            .unwrap();
        let text = to_json(&HaarCoeffsDoc::from(&c)).unwrap();
        assert!(text.contains("\"schema\": 1"));
        let back: HaarCoeffsDoc = from_json(&text).unwrap();
        assert_eq!(back.to_coeffs().unwrap(), c);
    }

    #[test]
    fn ek_roundtrip() {
        for e in random_ek_elements::<f64>(&RandomEkSpec::default()).unwrap() {
            let text = to_json(&EkElementDoc::from(&e)).unwrap();
            let back: EkElementDoc = from_json(&text).unwrap();
            assert_eq!(back.to_element().unwrap(), e);
        }
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let text = r#"{"schema": 2, "d": 1, "clusters": 1, "value_dim": 1, "terms": []}"#;
        assert!(from_json::<TrigPolyDoc>(text).is_err());
        let text = r#"{"schema": 1, "d": 1, "clusters": 1, "value_dim": 1, "terms": []}"#;
        assert!(from_json::<TrigPolyDoc>(text).unwrap().to_poly().unwrap().is_empty());
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = from_json::<TrigPolyDoc>("{\n  \"schema\": 1,\n  \"d\": x\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"));
    }
}
