//! Declarative program description: arrays, rectangular loop nests and affine
//! references, read from JSON and validated up front.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProgramError {
    #[error("schema error: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("program has no loop nests")]
    NoNests,
    #[error("array `{0}` declared more than once")]
    DuplicateArray(String),
    #[error("array `{name}`: {msg}")]
    BadArray { name: String, msg: String },
    #[error("nest `{0}` declared more than once")]
    DuplicateNest(String),
    #[error("nest `{nest}`: {msg}")]
    BadNest { nest: String, msg: String },
    #[error("nest `{nest}` reference #{reference}: unknown array `{array}`")]
    UnknownArray {
        nest: String,
        reference: usize,
        array: String,
    },
    #[error("nest `{nest}` reference #{reference}: {what} has size {found}, expected {expected}")]
    DimensionError {
        nest: String,
        reference: usize,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error(
        "nest `{nest}` reference #{reference}: subscript {dim} of `{array}` ranges over [{lo}, {hi}], outside [0, {extent})"
    )]
    OutOfBounds {
        nest: String,
        reference: usize,
        array: String,
        dim: usize,
        lo: i64,
        hi: i64,
        extent: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("loop position {position} out of range for a nest of depth {depth}")]
pub struct IndexError {
    pub position: usize,
    pub depth: usize,
}

fn default_element_size() -> u64 {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayDecl {
    pub name: String,
    pub dims: usize,
    pub extents: Vec<u64>,
    #[serde(default = "default_element_size")]
    pub element_size: u64,
}

/// One loop with inclusive integer bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Loop {
    pub index: String,
    pub lower: i64,
    pub upper: i64,
}

impl Loop {
    pub fn trip_count(&self) -> u64 {
        (self.upper - self.lower + 1) as u64
    }
}

/// `array[matrix · I + offset]` where `I` is the nest's iteration vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineReference {
    pub array: String,
    pub matrix: Vec<Vec<i64>>,
    pub offset: Vec<i64>,
}

impl AffineReference {
    pub fn element(&self, iteration: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, f)| row.iter().zip(iteration).map(|(a, i)| a * i).sum::<i64>() + f)
            .collect()
    }
}

/// Element difference between two consecutive iterations of loop `innermost`:
/// column `innermost` of the access matrix.
pub fn innermost_step_delta(reference: &AffineReference, innermost: usize) -> Result<Vec<i64>, IndexError> {
    let depth = reference.matrix.first().map_or(0, Vec::len);
    if innermost >= depth {
        return Err(IndexError {
            position: innermost,
            depth,
        });
    }
    Ok(reference.matrix.iter().map(|row| row[innermost]).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopNest {
    pub name: String,
    pub weight: f64,
    pub loops: Vec<Loop>,
    pub allowed_innermost: Vec<String>,
    pub references: Vec<AffineReference>,
}

impl LoopNest {
    pub fn depth(&self) -> usize {
        self.loops.len()
    }

    pub fn iteration_count(&self) -> u64 {
        self.loops.iter().map(Loop::trip_count).product()
    }

    pub fn loop_position(&self, index: &str) -> Option<usize> {
        self.loops.iter().position(|l| l.index == index)
    }

    /// Innermost-loop candidates in preference order: the original innermost
    /// loop first, then outward, restricted to `allowed_innermost`.
    pub fn innermost_candidates(&self) -> Vec<usize> {
        (0..self.depth())
            .rev()
            .filter(|&p| self.allowed_innermost.contains(&self.loops[p].index))
            .collect()
    }

    /// Loop positions from outermost to innermost once `innermost` is moved
    /// inside; the other loops keep their relative order.
    pub fn loop_order_with_innermost(&self, innermost: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.depth()).filter(|&p| p != innermost).collect();
        order.push(innermost);
        order
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Program {
    pub arrays: Vec<ArrayDecl>,
    pub nests: Vec<LoopNest>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NestDoc {
    name: String,
    #[serde(default)]
    weight: Option<f64>,
    loops: Vec<Loop>,
    #[serde(default)]
    allowed_innermost: Option<Vec<String>>,
    #[serde(default)]
    references: Vec<AffineReference>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProgramDoc {
    arrays: Vec<ArrayDecl>,
    nests: Vec<NestDoc>,
}

/// Parses and validates a program document.
pub fn parse_program(text: &str) -> Result<Program, ProgramError> {
    let doc: ProgramDoc = serde_json::from_str(text)?;
    let nests = doc
        .nests
        .into_iter()
        .map(|n| {
            let weight = n
                .weight
                .unwrap_or_else(|| n.loops.iter().map(Loop::trip_count).product::<u64>() as f64);
            let allowed_innermost = n
                .allowed_innermost
                .unwrap_or_else(|| n.loops.iter().map(|l| l.index.clone()).collect());
            LoopNest {
                name: n.name,
                weight,
                loops: n.loops,
                allowed_innermost,
                references: n.references,
            }
        })
        .collect();
    let program = Program {
        arrays: doc.arrays,
        nests,
    };
    program.validate()?;
    Ok(program)
}

impl Program {
    pub fn array(&self, name: &str) -> Option<&ArrayDecl> {
        self.arrays.iter().find(|a| a.name == name)
    }

    pub fn array_index(&self, name: &str) -> Option<usize> {
        self.arrays.iter().position(|a| a.name == name)
    }

    pub fn nest(&self, name: &str) -> Option<&LoopNest> {
        self.nests.iter().find(|n| n.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("program serializes")
    }

    pub fn validate(&self) -> Result<(), ProgramError> {
        if self.nests.is_empty() {
            return Err(ProgramError::NoNests);
        }
        for (i, a) in self.arrays.iter().enumerate() {
            if self.arrays[..i].iter().any(|b| b.name == a.name) {
                return Err(ProgramError::DuplicateArray(a.name.clone()));
            }
            let bad = |msg: String| ProgramError::BadArray {
                name: a.name.clone(),
                msg,
            };
            if a.dims == 0 {
                return Err(bad("dims must be at least 1".into()));
            }
            if a.extents.len() != a.dims {
                return Err(bad(format!("{} extents given for {} dims", a.extents.len(), a.dims)));
            }
            if a.extents.contains(&0) {
                return Err(bad("extents must be positive".into()));
            }
            if a.element_size == 0 {
                return Err(bad("element_size must be positive".into()));
            }
        }
        for (i, n) in self.nests.iter().enumerate() {
            if self.nests[..i].iter().any(|m| m.name == n.name) {
                return Err(ProgramError::DuplicateNest(n.name.clone()));
            }
            self.validate_nest(n)?;
        }
        Ok(())
    }

    fn validate_nest(&self, n: &LoopNest) -> Result<(), ProgramError> {
        let bad = |msg: String| ProgramError::BadNest {
            nest: n.name.clone(),
            msg,
        };
        if n.loops.is_empty() {
            return Err(bad("nest has no loops".into()));
        }
        if !n.weight.is_finite() || n.weight < 0.0 {
            return Err(bad(format!("weight {} must be a nonnegative number", n.weight)));
        }
        for (j, l) in n.loops.iter().enumerate() {
            if l.lower > l.upper {
                return Err(bad(format!("loop `{}` has lower {} > upper {}", l.index, l.lower, l.upper)));
            }
            if n.loops[..j].iter().any(|m| m.index == l.index) {
                return Err(bad(format!("loop index `{}` repeated", l.index)));
            }
        }
        for idx in &n.allowed_innermost {
            if n.loop_position(idx).is_none() {
                return Err(bad(format!("allowed_innermost names unknown loop `{idx}`")));
            }
        }
        for (r, reference) in n.references.iter().enumerate() {
            let array = self.array(&reference.array).ok_or_else(|| ProgramError::UnknownArray {
                nest: n.name.clone(),
                reference: r,
                array: reference.array.clone(),
            })?;
            let dim_err = |what, expected, found| ProgramError::DimensionError {
                nest: n.name.clone(),
                reference: r,
                what,
                expected,
                found,
            };
            if reference.matrix.len() != array.dims {
                return Err(dim_err("access matrix rows", array.dims, reference.matrix.len()));
            }
            if reference.offset.len() != array.dims {
                return Err(dim_err("offset", array.dims, reference.offset.len()));
            }
            for row in &reference.matrix {
                if row.len() != n.depth() {
                    return Err(dim_err("access matrix row", n.depth(), row.len()));
                }
            }
            // affine over a box: extremes are reached at box corners, per term
            for (d, (row, &f)) in reference.matrix.iter().zip(&reference.offset).enumerate() {
                let (mut lo, mut hi) = (f, f);
                for (&a, l) in row.iter().zip(&n.loops) {
                    let (x, y) = (a * l.lower, a * l.upper);
                    lo += x.min(y);
                    hi += x.max(y);
                }
                let extent = array.extents[d];
                if lo < 0 || hi >= extent as i64 {
                    return Err(ProgramError::OutOfBounds {
                        nest: n.name.clone(),
                        reference: r,
                        array: array.name.clone(),
                        dim: d,
                        lo,
                        hi,
                        extent,
                    });
                }
            }
        }
        Ok(())
    }
}
