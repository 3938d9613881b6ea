//! Candidate layout derivation and the binary constraint network built from it.
//!
//! Each (nest, innermost loop) pair yields at most one preferred layout per
//! array. Every array's candidates form its domain, and layouts derived under the
//! same restructuring are recorded as allowed pairs between the arrays involved.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intmat;
use crate::layout::{canonicalize, LayoutMatrix};
use crate::program::{innermost_step_delta, Program};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("schema error: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("variable `{0}` listed more than once")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` has no domain")]
    MissingDomain(String),
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("domain of `{var}` lists {layout} twice")]
    DuplicateValue { var: String, layout: LayoutMatrix },
    #[error("domain of `{var}` mixes layouts of different dimensionality")]
    MixedDimensions { var: String },
    #[error("constraint pairs `{0}` with itself")]
    SelfPair(String),
    #[error("allowed pair ({a}, {b}) on `{vi}`–`{vj}` uses a value outside the domains")]
    ValueOutsideDomain {
        vi: String,
        vj: String,
        a: LayoutMatrix,
        b: LayoutMatrix,
    },
    #[error("nest `{nest}` does not allow loop position {position} innermost")]
    InnermostNotAllowed { nest: String, position: usize },
}

/// Which restructuring produced an allowed pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Provenance {
    pub nest: String,
    pub innermost: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArrayLayout {
    pub array: String,
    pub layout: Option<LayoutMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedReference {
    pub array: String,
    /// Position of the reference within its nest.
    pub reference: usize,
}

/// Preferred layouts of every array referenced by one nest under one
/// innermost-loop choice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestDerivation {
    pub nest: String,
    pub innermost: String,
    #[serde(skip)]
    pub innermost_position: usize,
    pub layouts: Vec<ArrayLayout>,
    pub dropped: Vec<DroppedReference>,
}

impl NestDerivation {
    pub fn layout_of(&self, array: &str) -> Option<&LayoutMatrix> {
        self.layouts
            .iter()
            .find(|a| a.array == array)
            .and_then(|a| a.layout.as_ref())
    }
}

/// Layout whose rows annihilate every delta, or `None` when the deltas span
/// more than one direction (or there are none to align with).
pub fn derive_layout(deltas: &[Vec<i64>]) -> Option<LayoutMatrix> {
    let k = deltas.first()?.len();
    if intmat::rank(deltas) > 1 {
        return None;
    }
    let kernel = intmat::hermite_rows(&intmat::integer_kernel(deltas, k));
    debug_assert_eq!(kernel.len(), k - 1);
    let rows = kernel
        .iter()
        .map(|r| canonicalize(r))
        .collect::<Result<Vec<_>, _>>()
        .ok()?;
    LayoutMatrix::new(rows).ok()
}

/// Derives the preferred layout of every array referenced in nest `nest` when
/// loop position `innermost` runs innermost.
///
/// When an array's references disagree, references are dropped from the
/// highest position down until the remaining deltas admit a layout.
pub fn derive_for_nest(
    program: &Program,
    nest: usize,
    innermost: usize,
) -> Result<NestDerivation, NetworkError> {
    let n = &program.nests[nest];
    let allowed = innermost < n.depth() && n.allowed_innermost.contains(&n.loops[innermost].index);
    if !allowed {
        return Err(NetworkError::InnermostNotAllowed {
            nest: n.name.clone(),
            position: innermost,
        });
    }
    let mut layouts = Vec::new();
    let mut dropped = Vec::new();
    for array in &program.arrays {
        let refs: Vec<usize> = (0..n.references.len())
            .filter(|&r| n.references[r].array == array.name)
            .collect();
        if refs.is_empty() {
            continue;
        }
        let mut live: Vec<(usize, Vec<i64>)> = refs
            .iter()
            .map(|&r| {
                let d = innermost_step_delta(&n.references[r], innermost).expect("validated depth");
                (r, d)
            })
            .filter(|(_, d)| d.iter().any(|&x| x != 0))
            .collect();
        let layout = loop {
            let deltas: Vec<Vec<i64>> = live.iter().map(|(_, d)| d.clone()).collect();
            if let Some(l) = derive_layout(&deltas) {
                break Some(l);
            }
            match live.pop() {
                Some((r, _)) => dropped.push(DroppedReference {
                    array: array.name.clone(),
                    reference: r,
                }),
                None => break None,
            }
        };
        layouts.push(ArrayLayout {
            array: array.name.clone(),
            layout,
        });
    }
    Ok(NestDerivation {
        nest: n.name.clone(),
        innermost: n.loops[innermost].index.clone(),
        innermost_position: innermost,
        layouts,
        dropped,
    })
}

/// Every derivation, nest by nest, innermost candidates in preference order.
pub fn derive_all(program: &Program) -> Vec<NestDerivation> {
    program
        .nests
        .iter()
        .enumerate()
        .flat_map(|(i, n)| {
            n.innermost_candidates()
                .into_iter()
                .map(move |p| derive_for_nest(program, i, p).expect("candidate is allowed"))
        })
        .collect()
}

/// Allowed layout pairs for one variable pair `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Constraint {
    allowed: Vec<(LayoutMatrix, LayoutMatrix)>,
    provenance: Vec<Vec<Provenance>>,
}

impl Constraint {
    pub fn allowed(&self) -> &[(LayoutMatrix, LayoutMatrix)] {
        &self.allowed
    }

    /// Restructurings that produced each allowed pair (empty for ingested networks).
    pub fn provenance(&self) -> &[Vec<Provenance>] {
        &self.provenance
    }

    pub fn contains(&self, a: &LayoutMatrix, b: &LayoutMatrix) -> bool {
        self.allowed.iter().any(|(x, y)| x == a && y == b)
    }

    fn insert(&mut self, a: LayoutMatrix, b: LayoutMatrix, from: Option<Provenance>) {
        let idx = match self.allowed.iter().position(|(x, y)| *x == a && *y == b) {
            Some(i) => i,
            None => {
                self.allowed.push((a, b));
                self.provenance.push(Vec::new());
                self.allowed.len() - 1
            }
        };
        if let Some(p) = from {
            if !self.provenance[idx].contains(&p) {
                self.provenance[idx].push(p);
            }
        }
    }
}

/// Variables (arrays), their candidate layouts, and binary allowed-pair
/// constraints. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintNetwork {
    variables: Vec<String>,
    domains: Vec<Vec<LayoutMatrix>>,
    constraints: BTreeMap<(usize, usize), Constraint>,
}

/// An allowed pair discarded on ingestion because one side is not in its
/// variable's domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrunedPair {
    pub pair: (String, String),
    pub values: (LayoutMatrix, LayoutMatrix),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintDoc {
    pub pair: (String, String),
    pub allowed: Vec<(LayoutMatrix, LayoutMatrix)>,
}

/// JSON form of a network.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub variables: Vec<String>,
    pub domains: IndexMap<String, Vec<LayoutMatrix>>,
    pub constraints: Vec<ConstraintDoc>,
}

impl ConstraintNetwork {
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn domain(&self, var: usize) -> &[LayoutMatrix] {
        &self.domains[var]
    }

    /// Constraint between `i` and `j` in either order; the returned flag is
    /// true when the stored orientation is `(j, i)`.
    pub fn constraint(&self, i: usize, j: usize) -> Option<(&Constraint, bool)> {
        if i < j {
            self.constraints.get(&(i, j)).map(|c| (c, false))
        } else {
            self.constraints.get(&(j, i)).map(|c| (c, true))
        }
    }

    pub fn constraints(&self) -> impl Iterator<Item = ((usize, usize), &Constraint)> {
        self.constraints.iter().map(|(&k, c)| (k, c))
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    /// Whether `var_i = a, var_j = b` is permitted. Unconstrained pairs are
    /// always permitted.
    pub fn allows(&self, i: usize, a: &LayoutMatrix, j: usize, b: &LayoutMatrix) -> bool {
        match self.constraint(i, j) {
            None => true,
            Some((c, false)) => c.contains(a, b),
            Some((c, true)) => c.contains(b, a),
        }
    }

    /// Variables sharing a constraint with `var`, in variable order.
    pub fn neighbors(&self, var: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&w| w != var && self.constraint(var, w).is_some())
            .collect()
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<(), NetworkError> {
        for (i, v) in self.variables.iter().enumerate() {
            if self.variables[..i].contains(v) {
                return Err(NetworkError::DuplicateVariable(v.clone()));
            }
            let dom = &self.domains[i];
            if dom.is_empty() {
                return Err(NetworkError::EmptyDomain(v.clone()));
            }
            for (a, l) in dom.iter().enumerate() {
                if dom[..a].contains(l) {
                    return Err(NetworkError::DuplicateValue {
                        var: v.clone(),
                        layout: l.clone(),
                    });
                }
                if l.dims() != dom[0].dims() {
                    return Err(NetworkError::MixedDimensions { var: v.clone() });
                }
            }
        }
        for (&(i, j), c) in &self.constraints {
            if i == j {
                return Err(NetworkError::SelfPair(self.variables[i].clone()));
            }
            for (a, b) in &c.allowed {
                if !self.domains[i].contains(a) || !self.domains[j].contains(b) {
                    return Err(NetworkError::ValueOutsideDomain {
                        vi: self.variables[i].clone(),
                        vj: self.variables[j].clone(),
                        a: a.clone(),
                        b: b.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Builds a network from its JSON document.
    ///
    /// Allowed pairs naming a value outside the corresponding domain can never
    /// be selected; they are removed and returned so callers can report them.
    pub fn from_doc(doc: NetworkDoc) -> Result<(Self, Vec<PrunedPair>), NetworkError> {
        let variables = doc.variables;
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].contains(v) {
                return Err(NetworkError::DuplicateVariable(v.clone()));
            }
        }
        let index = |name: &str| {
            variables
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| NetworkError::UnknownVariable(name.to_string()))
        };
        for name in doc.domains.keys() {
            index(name)?;
        }
        let domains = variables
            .iter()
            .map(|v| {
                doc.domains
                    .get(v)
                    .cloned()
                    .ok_or_else(|| NetworkError::MissingDomain(v.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut constraints: BTreeMap<(usize, usize), Constraint> = BTreeMap::new();
        let mut pruned = Vec::new();
        for c in doc.constraints {
            let (i, j) = (index(&c.pair.0)?, index(&c.pair.1)?);
            if i == j {
                return Err(NetworkError::SelfPair(c.pair.0));
            }
            let entry = constraints.entry((i.min(j), i.max(j))).or_default();
            for (a, b) in c.allowed {
                if !domains[i].contains(&a) || !domains[j].contains(&b) {
                    pruned.push(PrunedPair {
                        pair: c.pair.clone(),
                        values: (a, b),
                    });
                    continue;
                }
                if i < j {
                    entry.insert(a, b, None);
                } else {
                    entry.insert(b, a, None);
                }
            }
        }
        let net = ConstraintNetwork {
            variables,
            domains,
            constraints,
        };
        net.validate()?;
        Ok((net, pruned))
    }

    pub fn from_json(text: &str) -> Result<(Self, Vec<PrunedPair>), NetworkError> {
        Self::from_doc(serde_json::from_str(text)?)
    }

    pub fn to_doc(&self) -> NetworkDoc {
        NetworkDoc {
            variables: self.variables.clone(),
            domains: self
                .variables
                .iter()
                .cloned()
                .zip(self.domains.iter().cloned())
                .collect(),
            constraints: self
                .constraints
                .iter()
                .map(|(&(i, j), c)| ConstraintDoc {
                    pair: (self.variables[i].clone(), self.variables[j].clone()),
                    allowed: c.allowed.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("network serializes")
    }
}

/// Assembles the constraint network for `program`.
pub fn build_network(program: &Program) -> ConstraintNetwork {
    build_from_derivations(program, &derive_all(program))
}

pub fn build_from_derivations(program: &Program, derivations: &[NestDerivation]) -> ConstraintNetwork {
    let variables: Vec<String> = program.arrays.iter().map(|a| a.name.clone()).collect();
    let mut domains: Vec<Vec<LayoutMatrix>> = vec![Vec::new(); variables.len()];
    let mut constraints: BTreeMap<(usize, usize), Constraint> = BTreeMap::new();
    for d in derivations {
        let chosen: Vec<(usize, &LayoutMatrix)> = d
            .layouts
            .iter()
            .filter_map(|a| {
                let l = a.layout.as_ref()?;
                Some((program.array_index(&a.array).expect("declared array"), l))
            })
            .collect();
        for &(i, l) in &chosen {
            if !domains[i].contains(l) {
                domains[i].push(l.clone());
            }
        }
        let prov = Provenance {
            nest: d.nest.clone(),
            innermost: d.innermost.clone(),
        };
        for (x, &(i, li)) in chosen.iter().enumerate() {
            for &(j, lj) in &chosen[x + 1..] {
                let (key, a, b) = if i < j { ((i, j), li, lj) } else { ((j, i), lj, li) };
                constraints
                    .entry(key)
                    .or_default()
                    .insert(a.clone(), b.clone(), Some(prov.clone()));
            }
        }
    }
    // fallback candidates for arrays no derivation reached
    let derived = domains.clone();
    for (i, array) in program.arrays.iter().enumerate() {
        if !domains[i].is_empty() {
            continue;
        }
        let mut pool: Vec<LayoutMatrix> = Vec::new();
        for l in derived.iter().flatten() {
            if l.dims() == array.dims && !pool.contains(l) {
                pool.push(l.clone());
            }
        }
        if pool.is_empty() {
            pool.push(LayoutMatrix::row_major(array.dims));
        }
        domains[i] = pool;
    }
    let net = ConstraintNetwork {
        variables,
        domains,
        constraints,
    };
    debug_assert!(net.validate().is_ok());
    net
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;

    const SKEWED: &str = include_str!("../tests/fixtures/skewed_pair.json");
    const FOUR_ARRAYS: &str = include_str!("../tests/fixtures/four_array_network.json");

    fn lm(rows: &[&[i64]]) -> LayoutMatrix {
        LayoutMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn derive_layout_examples() {
        assert_eq!(derive_layout(&[vec![1, 1]]), Some(lm(&[&[1, -1]])));
        assert_eq!(derive_layout(&[vec![1, 0]]), Some(lm(&[&[0, 1]])));
        assert_eq!(derive_layout(&[vec![1, 0], vec![0, 1]]), None);
        assert_eq!(derive_layout(&[vec![2, 0], vec![-1, 0]]), Some(lm(&[&[0, 1]])));
        assert_eq!(derive_layout(&[]), None);
        assert_eq!(derive_layout(&[vec![3]]), Some(LayoutMatrix::row_major(1)));
        assert_eq!(
            derive_layout(&[vec![0, 0, 1]]),
            Some(LayoutMatrix::row_major(3))
        );
    }

    #[test]
    fn skewed_derivations() {
        let p = parse_program(SKEWED).unwrap();
        let inner = derive_for_nest(&p, 0, 1).unwrap();
        assert_eq!(inner.layout_of("Q1"), Some(&lm(&[&[1, -1]])));
        assert_eq!(inner.layout_of("Q2"), Some(&lm(&[&[0, 1]])));
        let swapped = derive_for_nest(&p, 0, 0).unwrap();
        assert_eq!(swapped.layout_of("Q1"), Some(&lm(&[&[0, 1]])));
        assert_eq!(swapped.layout_of("Q2"), Some(&lm(&[&[1, -1]])));
        assert!(inner.dropped.is_empty() && swapped.dropped.is_empty());
    }

    #[test]
    fn plain_row_access_gives_row_major() {
        let text = r#"{"arrays":[{"name":"Q","dims":2,"extents":[4,4]}],
          "nests":[{"name":"n","loops":[{"index":"i1","lower":0,"upper":3},{"index":"i2","lower":0,"upper":3}],
          "references":[{"array":"Q","matrix":[[1,0],[0,1]],"offset":[0,0]}]}]}"#;
        let p = parse_program(text).unwrap();
        let d = derive_for_nest(&p, 0, 1).unwrap();
        assert_eq!(d.layout_of("Q"), Some(&LayoutMatrix::row_major(2)));
        let net = build_network(&p);
        assert_eq!(net.len(), 1);
        assert_eq!(net.constraint_count(), 0);
    }

    #[test]
    fn conflicting_references_drop_highest_first() {
        // A[i][j] and A[j][i] with j innermost: deltas (0,1) and (1,0)
        let text = r#"{"arrays":[{"name":"A","dims":2,"extents":[4,4]}],
          "nests":[{"name":"n","loops":[{"index":"i","lower":0,"upper":3},{"index":"j","lower":0,"upper":3}],
          "references":[{"array":"A","matrix":[[1,0],[0,1]],"offset":[0,0]},
                        {"array":"A","matrix":[[0,1],[1,0]],"offset":[0,0]}]}]}"#;
        let p = parse_program(text).unwrap();
        let d = derive_for_nest(&p, 0, 1).unwrap();
        assert_eq!(d.layout_of("A"), Some(&LayoutMatrix::row_major(2)));
        assert_eq!(
            d.dropped,
            vec![DroppedReference {
                array: "A".into(),
                reference: 1
            }]
        );
    }

    #[test]
    fn temporal_only_array_gets_no_entry() {
        let text = r#"{"arrays":[{"name":"A","dims":2,"extents":[4,4]},{"name":"B","dims":2,"extents":[4,4]}],
          "nests":[{"name":"n","loops":[{"index":"i","lower":0,"upper":3},{"index":"j","lower":0,"upper":3}],
          "references":[{"array":"A","matrix":[[1,0],[0,0]],"offset":[0,0]},
                        {"array":"B","matrix":[[1,0],[0,1]],"offset":[0,0]}]}]}"#;
        let p = parse_program(text).unwrap();
        let d = derive_for_nest(&p, 0, 1).unwrap();
        assert_eq!(d.layouts[0].layout, None);
        let net = build_network(&p);
        // A only varies with i, so it gets a layout from the interchanged nest
        assert_eq!(net.domain(0), &[lm(&[&[0, 1]])]);
        assert_eq!(net.constraint_count(), 1);
    }

    #[test]
    fn disallowed_innermost_rejected() {
        let p = parse_program(&SKEWED.replace("\"loops\"", "\"allowed_innermost\": [\"i2\"], \"loops\"")).unwrap();
        assert!(matches!(
            derive_for_nest(&p, 0, 0),
            Err(NetworkError::InnermostNotAllowed { position: 0, .. })
        ));
        let net = build_network(&p);
        assert_eq!(net.domain(0), &[lm(&[&[1, -1]])]);
    }

    #[test]
    fn skewed_network() {
        let p = parse_program(SKEWED).unwrap();
        let net = build_network(&p);
        assert_eq!(net.variables(), &["Q1", "Q2"]);
        assert_eq!(net.domain(0), &[lm(&[&[1, -1]]), lm(&[&[0, 1]])]);
        assert_eq!(net.domain(1), &[lm(&[&[0, 1]]), lm(&[&[1, -1]])]);
        let (c, flipped) = net.constraint(0, 1).unwrap();
        assert!(!flipped);
        assert_eq!(
            c.allowed(),
            &[
                (lm(&[&[1, -1]]), lm(&[&[0, 1]])),
                (lm(&[&[0, 1]]), lm(&[&[1, -1]]))
            ]
        );
        assert_eq!(c.provenance()[0][0].innermost, "i2");
        assert_eq!(c.provenance()[1][0].innermost, "i1");
        assert_eq!(build_network(&p), net);
    }

    #[test]
    fn unreached_array_falls_back() {
        let text = SKEWED.replace(
            "\"arrays\": [",
            "\"arrays\": [{\"name\": \"Z\", \"dims\": 2, \"extents\": [2, 2]}, {\"name\": \"V\", \"dims\": 1, \"extents\": [2]},",
        );
        let p = parse_program(&text).unwrap();
        let net = build_network(&p);
        assert_eq!(net.domain(0), &[lm(&[&[1, -1]]), lm(&[&[0, 1]])]);
        assert_eq!(net.domain(1), &[LayoutMatrix::row_major(1)]);
    }

    #[test]
    fn four_array_network_loads_and_validates() {
        let (net, pruned) = ConstraintNetwork::from_json(FOUR_ARRAYS).unwrap();
        net.validate().unwrap();
        assert_eq!(net.len(), 4);
        assert_eq!(net.constraint_count(), 6);
        // S_24 lists ((1 0),(0 1)), but (1 0) is not a value of Q2
        assert_eq!(pruned.len(), 1);
        assert_eq!(pruned[0].pair, ("Q2".to_string(), "Q4".to_string()));
        for v in 0..4 {
            assert_eq!(net.neighbors(v).len(), 3);
        }
    }

    #[test]
    fn doc_errors() {
        let bad = r#"{"variables":["A","A"],"domains":{"A":[[[1,0]]]},"constraints":[]}"#;
        assert!(matches!(ConstraintNetwork::from_json(bad), Err(NetworkError::DuplicateVariable(_))));
        let bad = r#"{"variables":["A"],"domains":{},"constraints":[]}"#;
        assert!(matches!(ConstraintNetwork::from_json(bad), Err(NetworkError::MissingDomain(_))));
        let bad = r#"{"variables":["A"],"domains":{"A":[]},"constraints":[]}"#;
        assert!(matches!(ConstraintNetwork::from_json(bad), Err(NetworkError::EmptyDomain(_))));
        let bad = r#"{"variables":["A"],"domains":{"A":[[[1,0]],[[2,0]]]},"constraints":[]}"#;
        assert!(matches!(ConstraintNetwork::from_json(bad), Err(NetworkError::DuplicateValue { .. })));
        let bad = r#"{"variables":["A"],"domains":{"A":[[[1,0]]]},"constraints":[{"pair":["A","A"],"allowed":[]}]}"#;
        assert!(matches!(ConstraintNetwork::from_json(bad), Err(NetworkError::SelfPair(_))));
        let bad = r#"{"variables":["A"],"domains":{"A":[[[1,0]]],"B":[[[1,0]]]},"constraints":[]}"#;
        assert!(matches!(ConstraintNetwork::from_json(bad), Err(NetworkError::UnknownVariable(_))));
    }

    #[test]
    fn reversed_pair_orientation_is_normalized() {
        let text = r#"{"variables":["A","B"],"domains":{"A":[[[1,0]],[[0,1]]],"B":[[[1,1]]]},
          "constraints":[{"pair":["B","A"],"allowed":[[[[1,1]],[[0,1]]]]}]}"#;
        let (net, _) = ConstraintNetwork::from_json(text).unwrap();
        assert!(net.allows(0, &lm(&[&[0, 1]]), 1, &lm(&[&[1, 1]])));
        assert!(!net.allows(0, &lm(&[&[1, 0]]), 1, &lm(&[&[1, 1]])));
        assert!(net.allows(1, &lm(&[&[1, 1]]), 0, &lm(&[&[0, 1]])));
        let (again, _) = ConstraintNetwork::from_json(&net.to_json()).unwrap();
        assert_eq!(again, net);
    }
}
