//! JSON encodings of matrices, pairs, structures, patterns and traces.
//!
//! ```text
//! matrix    {"rows":n,"cols":m,"entries":[[re,im],...]}        row-major
//! pair      {"A":matrix,"B":matrix}
//! structure {"blocks":[{"kind":"H","n":2,"lambda":[0.0,1.0]},{"kind":"L","n":0}]}
//! pattern   {"n":n,"maskA":[[0|1,...],...],"maskB":[...],"params":p}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::{BlockKind, CanonicalBlock, CanonicalStructure, SkewPair};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::pattern::{StarMask, StarPattern};
use crate::reduction::ReductionTrace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &DenseMatrix<Complex64>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<DenseMatrix<Complex64>> {
        if self.entries.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        DenseMatrix::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairJson {
    #[serde(rename = "A")]
    pub a: MatrixJson,
    #[serde(rename = "B")]
    pub b: MatrixJson,
}

impl PairJson {
    pub fn from_pair(p: &SkewPair<Complex64>) -> Self {
        Self {
            a: MatrixJson::from_matrix(p.a()),
            b: MatrixJson::from_matrix(p.b()),
        }
    }

    pub fn to_pair(&self) -> Result<SkewPair<Complex64>> {
        SkewPair::new(self.a.to_matrix()?, self.b.to_matrix()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub kind: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[f64; 2]>,
}

impl BlockJson {
    pub fn from_block(b: &CanonicalBlock) -> Self {
        Self {
            kind: b.kind().to_string(),
            n: b.size(),
            lambda: b.eigenvalue().map(|z| [z.re, z.im]),
        }
    }

    pub fn to_block(&self) -> Result<CanonicalBlock> {
        let reject_lambda = |kind: BlockKind| {
            if self.lambda.is_some() {
                Err(Error::InvalidBlock(format!(
                    "{kind} blocks carry no eigenvalue"
                )))
            } else {
                Ok(())
            }
        };
        match self.kind.as_str() {
            "H" => {
                let [re, im] = self
                    .lambda
                    .ok_or_else(|| Error::InvalidBlock("H block needs \"lambda\"".into()))?;
                CanonicalBlock::h(self.n, Complex64::new(re, im))
            }
            "K" => {
                reject_lambda(BlockKind::K)?;
                CanonicalBlock::k(self.n)
            }
            "L" => {
                reject_lambda(BlockKind::L)?;
                Ok(CanonicalBlock::l(self.n))
            }
            other => Err(Error::InvalidBlock(format!("unknown block kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureJson {
    pub blocks: Vec<BlockJson>,
}

impl StructureJson {
    pub fn from_structure(s: &CanonicalStructure) -> Self {
        Self {
            blocks: s.blocks().iter().map(BlockJson::from_block).collect(),
        }
    }

    pub fn to_structure(&self) -> Result<CanonicalStructure> {
        let blocks = self
            .blocks
            .iter()
            .map(BlockJson::to_block)
            .collect::<Result<Vec<_>>>()?;
        Ok(CanonicalStructure::new(blocks))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternJson {
    pub n: usize,
    #[serde(rename = "maskA")]
    pub mask_a: Vec<Vec<u8>>,
    #[serde(rename = "maskB")]
    pub mask_b: Vec<Vec<u8>>,
    pub params: usize,
}

impl PatternJson {
    pub fn from_pattern(p: &StarPattern) -> Self {
        Self {
            n: p.n(),
            mask_a: p.mask_a().to_rows(),
            mask_b: p.mask_b().to_rows(),
            params: p.param_count(),
        }
    }

    pub fn to_pattern(&self) -> Result<StarPattern> {
        let p = StarPattern::from_masks(
            StarMask::from_rows(&self.mask_a)?,
            StarMask::from_rows(&self.mask_b)?,
        )?;
        if p.n() != self.n || p.param_count() != self.params {
            return Err(Error::InvalidPattern(format!(
                "declared n = {}, params = {} but masks give n = {}, params = {}",
                self.n,
                self.params,
                p.n(),
                p.param_count()
            )));
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationJson {
    pub x: MatrixJson,
    pub step_norm: f64,
    pub off_pattern_norm: f64,
    pub full_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceJson {
    pub converged: bool,
    pub iteration_count: usize,
    pub initial_off_pattern_norm: f64,
    pub initial_full_norm: f64,
    pub residuals: Vec<f64>,
    pub decay_constants: Vec<f64>,
    pub iterations: Vec<IterationJson>,
    #[serde(rename = "S")]
    pub s: MatrixJson,
    #[serde(rename = "D")]
    pub d: PairJson,
    /// Off-pattern norm of `D`; zero up to rounding when converged.
    pub d_off_pattern_norm: f64,
}

impl TraceJson {
    pub fn from_trace(t: &ReductionTrace, pattern: &StarPattern) -> Result<Self> {
        Ok(Self {
            converged: t.converged,
            iteration_count: t.iterations.len(),
            initial_off_pattern_norm: t.initial_off_pattern_norm,
            initial_full_norm: t.initial_full_norm,
            residuals: t.residuals(),
            decay_constants: t.decay_constants(),
            iterations: t
                .iterations
                .iter()
                .map(|r| IterationJson {
                    x: MatrixJson::from_matrix(&r.x),
                    step_norm: r.step_norm,
                    off_pattern_norm: r.off_pattern_norm,
                    full_norm: r.full_norm,
                })
                .collect(),
            s: MatrixJson::from_matrix(&t.s),
            d: PairJson::from_pair(&t.d),
            d_off_pattern_norm: pattern.off_pattern_norm(&t.d)?,
        })
    }
}

pub fn parse_structure(text: &str) -> Result<CanonicalStructure> {
    serde_json::from_str::<StructureJson>(text)?.to_structure()
}

pub fn parse_pair(text: &str) -> Result<SkewPair<Complex64>> {
    serde_json::from_str::<PairJson>(text)?.to_pair()
}

pub fn parse_pattern(text: &str) -> Result<StarPattern> {
    serde_json::from_str::<PatternJson>(text)?.to_pattern()
}

pub fn structure_to_json(s: &CanonicalStructure) -> String {
    serde_json::to_string(&StructureJson::from_structure(s)).expect("structure serialises")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::assemble;

    #[test]
    fn structure_round_trip() {
        let text = r#"{"blocks":[{"kind":"L","n":0},{"kind":"H","n":2,"lambda":[0.0,1.0]}]}"#;
        let s = parse_structure(text).unwrap();
        assert_eq!(s.to_string(), "H_2(0+1i) ⊕ L_0");
        assert_eq!(parse_structure(&structure_to_json(&s)).unwrap(), s);
    }

    #[test]
    fn structure_errors() {
        assert!(parse_structure(r#"{"blocks":[{"kind":"H","n":1}]}"#).is_err());
        assert!(parse_structure(r#"{"blocks":[{"kind":"K","n":0}]}"#).is_err());
        assert!(parse_structure(r#"{"blocks":[{"kind":"X","n":1}]}"#).is_err());
        assert!(parse_structure(r#"{"blocks":[{"kind":"L","n":1,"lambda":[1,0]}]}"#).is_err());
        assert!(matches!(parse_structure("{"), Err(Error::Json(_))));
    }

    #[test]
    fn pair_round_trip_and_validation() {
        let text = r#"{"A":{"rows":2,"cols":2,"entries":[[0,0],[1,0],[-1,0],[0,0]]},
                       "B":{"rows":2,"cols":2,"entries":[[0,0],[0,2],[0,-2],[0,0]]}}"#;
        let p = parse_pair(text).unwrap();
        assert_eq!(p.b()[(0, 1)], Complex64::new(0.0, 2.0));
        let again = serde_json::to_string(&PairJson::from_pair(&p)).unwrap();
        assert_eq!(parse_pair(&again).unwrap(), p);

        let not_skew = r#"{"A":{"rows":2,"cols":2,"entries":[[0,0],[1,0],[1,0],[0,0]]},
                           "B":{"rows":2,"cols":2,"entries":[[0,0],[0,0],[0,0],[0,0]]}}"#;
        assert!(matches!(parse_pair(not_skew), Err(Error::NotSkew(_))));
        let short = r#"{"A":{"rows":2,"cols":2,"entries":[[0,0]]},
                        "B":{"rows":2,"cols":2,"entries":[[0,0],[0,0],[0,0],[0,0]]}}"#;
        assert!(matches!(
            parse_pair(short),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn pattern_round_trip() {
        let s =
            parse_structure(r#"{"blocks":[{"kind":"H","n":1,"lambda":[0,0]},{"kind":"L","n":1}]}"#)
                .unwrap();
        let p = assemble(&s);
        let text = serde_json::to_string(&PatternJson::from_pattern(&p)).unwrap();
        assert!(text.contains("\"maskA\""));
        let back = parse_pattern(&text).unwrap();
        assert_eq!(back.mask_a(), p.mask_a());
        assert_eq!(back.mask_b(), p.mask_b());

        let mut bad = PatternJson::from_pattern(&p);
        bad.params += 1;
        assert!(bad.to_pattern().is_err());
    }
}
