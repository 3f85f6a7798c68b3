//! Problem files and machine-readable reports.
//!
//! A problem file is JSON with three keys:
//!
//! ```json
//! {
//!   "algebra": { "blocks": [2, 2] },
//!   "elements": { "A": [ [[[1,0],[0,0]], [[0,0],[1,0]]], [[[2,0],[0,0]], [[0,0],[0,0]]] ] },
//!   "subalgebra": { "kind": "constant_tuple" }
//! }
//! ```
//!
//! An element is a list of blocks, a block a list of rows, an entry an
//! `[re, im]` pair. The subalgebra is either `{"kind", "params"}` with kind one
//! of `scalars`, `diagonal`, `block_diagonal` (params `{"partition": [..]}`),
//! `constant_tuple`, `center`, or `{"generators": [names]}`. Unknown keys are
//! rejected everywhere.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{BlockAlgebra, Element};
use crate::certificate::{PureState, Witness};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::subalgebra::{Subalgebra, SubalgebraKind};

/// Block matrices with `[re, im]` entries.
pub type ElementLiteral = Vec<Vec<Vec<[f64; 2]>>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub blocks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDiagonalParams {
    pub partition: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<BlockDiagonalParams>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubalgebraSpec {
    Standard(StandardSpec),
    Generated(GeneratorSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub algebra: AlgebraSpec,
    pub elements: BTreeMap<String, ElementLiteral>,
    pub subalgebra: SubalgebraSpec,
}

/// A validated problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub algebra: BlockAlgebra,
    pub elements: BTreeMap<String, Element>,
    pub subalgebra: Subalgebra,
}

impl Problem {
    pub fn element(&self, name: &str) -> Result<&Element> {
        self.elements.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.elements.keys().map(String::as_str).collect();
            Error::Parse(format!("no element named {name:?} (known: {})", known.join(", ")))
        })
    }
}

fn parse_error(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

pub fn element_from_literal(lit: &ElementLiteral, algebra: &BlockAlgebra) -> Result<Element> {
    let dims = algebra.block_dims();
    if lit.len() != dims.len() {
        return Err(Error::Parse(format!("expected {} blocks, found {}", dims.len(), lit.len())));
    }
    let mut blocks = Vec::with_capacity(dims.len());
    for (j, (rows, &n)) in lit.iter().zip(dims).enumerate() {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse(format!("block {j} must be {n}x{n}")));
        }
        let mut m = CMatrix::zeros(n, n);
        for (p, row) in rows.iter().enumerate() {
            for (q, [re, im]) in row.iter().enumerate() {
                if !(re.is_finite() && im.is_finite()) {
                    return Err(Error::Parse(format!("block {j} entry ({p}, {q}) is not finite")));
                }
                m[(p, q)] = Complex64::new(*re, *im);
            }
        }
        blocks.push(m);
    }
    Element::new(blocks).map_err(parse_error)
}

pub fn element_to_literal(x: &Element) -> ElementLiteral {
    x.blocks()
        .iter()
        .map(|m| (0..m.nrows()).map(|p| (0..m.ncols()).map(|q| [m[(p, q)].re, m[(p, q)].im]).collect()).collect())
        .collect()
}

fn subalgebra_kind(spec: &StandardSpec) -> Result<SubalgebraKind> {
    let no_params = |kind| {
        if spec.params.is_some() {
            return Err(Error::Parse(format!("subalgebra kind {:?} takes no params", spec.kind)));
        }
        Ok(kind)
    };
    match spec.kind.as_str() {
        "scalars" => no_params(SubalgebraKind::Scalars),
        "diagonal" => no_params(SubalgebraKind::Diagonal),
        "constant_tuple" => no_params(SubalgebraKind::ConstantTuple),
        "center" => no_params(SubalgebraKind::Center),
        "block_diagonal" => match &spec.params {
            Some(p) => Ok(SubalgebraKind::BlockDiagonal(p.partition.clone())),
            None => Err(Error::Parse("block_diagonal needs params.partition".into())),
        },
        other => Err(Error::Parse(format!("unknown subalgebra kind {other:?}"))),
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }

    /// Check shapes and build the algebra, elements and subalgebra. Every
    /// failure is reported as a parse error.
    pub fn validate(&self) -> Result<Problem> {
        if self.algebra.blocks.iter().any(|&n| n > 64) {
            return Err(Error::Parse("block sizes above 64 are not supported".into()));
        }
        let algebra = BlockAlgebra::new(self.algebra.blocks.clone()).map_err(parse_error)?;
        let mut elements = BTreeMap::new();
        for (name, lit) in &self.elements {
            let x = element_from_literal(lit, &algebra).map_err(|e| Error::Parse(format!("element {name:?}: {e}")))?;
            elements.insert(name.clone(), x);
        }
        let subalgebra = match &self.subalgebra {
            SubalgebraSpec::Standard(spec) => Subalgebra::standard(&algebra, &subalgebra_kind(spec)?),
            SubalgebraSpec::Generated(spec) => {
                let gens = spec
                    .generators
                    .iter()
                    .map(|g| elements.get(g).cloned().ok_or_else(|| Error::Parse(format!("unknown generator {g:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                Subalgebra::generated_by(&algebra, &gens)
            }
        }
        .map_err(|e| Error::Parse(format!("subalgebra: {e}")))?;
        Ok(Problem { algebra, elements, subalgebra })
    }
}

/// Parse and validate a problem file.
pub fn load_problem(text: &str) -> Result<Problem> {
    ProblemFile::parse(text)?.validate()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorLiteral {
    pub block: usize,
    pub entries: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateReport {
    pub weights: Vec<f64>,
    pub signs: Vec<i8>,
    pub vectors: Vec<VectorLiteral>,
    pub residuals: BTreeMap<String, f64>,
}

impl CertificateReport {
    pub fn from_witness(w: &Witness) -> Self {
        CertificateReport {
            weights: w.weights.clone(),
            signs: w.signs.clone(),
            vectors: w
                .pure_states
                .iter()
                .map(|p| VectorLiteral { block: p.block, entries: p.vector.iter().map(|z| [z.re, z.im]).collect() })
                .collect(),
            residuals: w.residuals.clone(),
        }
    }

    /// Rebuild the witness (without re-verifying it).
    pub fn to_witness(&self) -> Result<Witness> {
        let states = self
            .vectors
            .iter()
            .map(|v| PureState {
                block: v.block,
                vector: CVector::from_iterator(v.entries.len(), v.entries.iter().map(|[re, im]| Complex64::new(*re, *im))),
            })
            .collect();
        let mut w = Witness::new(states, self.signs.clone(), self.weights.clone()).map_err(parse_error)?;
        w.residuals = self.residuals.clone();
        Ok(w)
    }
}

/// Output of `dist --json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistReport {
    pub radius: f64,
    pub minimizer: ElementLiteral,
    pub certificate: Option<CertificateReport>,
    pub iterations: usize,
}

impl DistReport {
    pub fn parse(text: &str) -> Result<Self> {
        let r: DistReport = serde_json::from_str(text).map_err(parse_error)?;
        if !(r.radius.is_finite() && r.radius >= 0.0) {
            return Err(Error::Parse(format!("radius must be finite and nonnegative, got {}", r.radius)));
        }
        if let Some(c) = &r.certificate {
            if c.weights.len() != c.signs.len() || c.weights.len() != c.vectors.len() {
                return Err(Error::Parse("certificate lists have different lengths".into()));
            }
        }
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "algebra": {"blocks": [2]},
        "elements": {"X": [[[[0,0],[1,0]], [[1,0],[0,0]]]]},
        "subalgebra": {"kind": "diagonal"}
    }"#;

    #[test]
    fn parses_example() {
        let p = load_problem(EXAMPLE).unwrap();
        assert_eq!(p.subalgebra.real_herm_dim(), 2);
        assert!((p.element("X").unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(p.element("Y").is_err());
    }

    #[test]
    fn rejects_unknown_fields_and_bad_shapes() {
        let extra = EXAMPLE.replace("\"kind\": \"diagonal\"", "\"kind\": \"diagonal\", \"oops\": 1");
        assert!(matches!(load_problem(&extra), Err(Error::Parse(_))));
        let bad = EXAMPLE.replace("[[[[0,0],[1,0]], [[1,0],[0,0]]]]", "[[[[0,0],[1,0]]]]");
        assert!(matches!(load_problem(&bad), Err(Error::Parse(_))));
        let kind = EXAMPLE.replace("diagonal", "upper_triangular");
        assert!(matches!(load_problem(&kind), Err(Error::Parse(_))));
        let top = EXAMPLE.replacen('{', "{\"comment\": \"x\",", 1);
        assert!(matches!(load_problem(&top), Err(Error::Parse(_))));
    }

    #[test]
    fn generators_subalgebra() {
        let text = r#"{
            "algebra": {"blocks": [2]},
            "elements": {"P": [[[[1,0],[0,0]], [[0,0],[0,0]]]]},
            "subalgebra": {"generators": ["P"]}
        }"#;
        assert_eq!(load_problem(text).unwrap().subalgebra.real_herm_dim(), 2);
    }

    #[test]
    fn report_round_trip() {
        let r = DistReport {
            radius: 1.5,
            minimizer: vec![vec![vec![[1.0, 0.0]]]],
            certificate: Some(CertificateReport {
                weights: vec![1.0],
                signs: vec![1],
                vectors: vec![VectorLiteral { block: 0, entries: vec![[1.0, 0.0]] }],
                residuals: BTreeMap::from([("orthogonality".to_string(), 0.0)]),
            }),
            iterations: 3,
        };
        assert_eq!(DistReport::parse(&r.to_json()).unwrap(), r);
        assert!(DistReport::parse("{\"radius\": -1, \"minimizer\": [], \"certificate\": null, \"iterations\": 0}").is_err());
    }
}
