//! Seeded generators for random networks and programs, used by the test
//! suites and for quick experiments.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::layout::LayoutMatrix;
use crate::network::{ConstraintDoc, ConstraintNetwork, NetworkDoc};
use crate::program::{parse_program, Program};

#[derive(Debug, Clone, Copy)]
pub struct NetworkParams {
    pub max_vars: usize,
    pub max_domain: usize,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            max_vars: 6,
            max_domain: 4,
        }
    }
}

const POOL: [[i64; 2]; 8] = [[1, 0], [0, 1], [1, 1], [1, -1], [1, 2], [2, 1], [1, -2], [2, -1]];

/// Random binary network. Constraint density and per-pair tightness are
/// themselves drawn uniformly from [0, 1], so instances range from empty to
/// complete graphs and from trivially sat to unsat.
pub fn random_network<R: Rng>(rng: &mut R, params: NetworkParams) -> ConstraintNetwork {
    let n = rng.gen_range(1..=params.max_vars);
    let density: f64 = rng.gen();
    let tightness: f64 = rng.gen();
    let variables: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();
    let domains: Vec<Vec<LayoutMatrix>> = (0..n)
        .map(|_| {
            let size = rng.gen_range(1..=params.max_domain.min(POOL.len()));
            let mut pool = POOL.to_vec();
            pool.shuffle(rng);
            pool[..size]
                .iter()
                .map(|r| LayoutMatrix::from_rows(&[*r]).expect("pool layouts are valid"))
                .collect()
        })
        .collect();
    let mut constraints = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !rng.gen_bool(density) {
                continue;
            }
            let mut allowed = Vec::new();
            for a in &domains[i] {
                for b in &domains[j] {
                    if !rng.gen_bool(tightness) {
                        allowed.push((a.clone(), b.clone()));
                    }
                }
            }
            constraints.push(ConstraintDoc {
                pair: (variables[i].clone(), variables[j].clone()),
                allowed,
            });
        }
    }
    let doc = NetworkDoc {
        domains: variables.iter().cloned().zip(domains).collect(),
        variables,
        constraints,
    };
    ConstraintNetwork::from_doc(doc).expect("generated network is valid").0
}

#[derive(Debug, Clone, Copy)]
pub struct ProgramParams {
    pub arrays: usize,
    pub nests: usize,
    /// References per nest are drawn from `1..=max_refs`.
    pub max_refs: usize,
    pub trip: i64,
}

impl Default for ProgramParams {
    fn default() -> Self {
        ProgramParams {
            arrays: 12,
            nests: 8,
            max_refs: 5,
            trip: 8,
        }
    }
}

/// Random program of 2-D and 3-D arrays accessed through 0/1 affine
/// subscripts with at most two loop indices per subscript.
pub fn random_program<R: Rng>(rng: &mut R, params: ProgramParams) -> Program {
    let extent = 2 * (params.trip - 1) + 1;
    let arrays: Vec<serde_json::Value> = (0..params.arrays)
        .map(|i| {
            let dims = if rng.gen_bool(0.75) { 2 } else { 3 };
            serde_json::json!({"name": format!("A{i}"), "dims": dims, "extents": vec![extent; dims]})
        })
        .collect();
    let dims_of: Vec<usize> = arrays.iter().map(|a| a["dims"].as_u64().unwrap() as usize).collect();
    let nests: Vec<serde_json::Value> = (0..params.nests)
        .map(|n| {
            let depth = rng.gen_range(2..=3usize);
            let loops: Vec<serde_json::Value> = (0..depth)
                .map(|l| serde_json::json!({"index": format!("i{l}"), "lower": 0, "upper": params.trip - 1}))
                .collect();
            let nrefs = rng.gen_range(1..=params.max_refs);
            let refs: Vec<serde_json::Value> = (0..nrefs)
                .map(|_| {
                    let a = rng.gen_range(0..params.arrays);
                    let matrix: Vec<Vec<i64>> = (0..dims_of[a])
                        .map(|_| {
                            let mut row = vec![0i64; depth];
                            let ones = rng.gen_range(1..=2usize);
                            for _ in 0..ones {
                                row[rng.gen_range(0..depth)] = 1;
                            }
                            row
                        })
                        .collect();
                    serde_json::json!({"array": format!("A{a}"), "matrix": matrix, "offset": vec![0; dims_of[a]]})
                })
                .collect();
            let weight = rng.gen_range(1..=100);
            serde_json::json!({"name": format!("n{n}"), "weight": weight, "loops": loops, "references": refs})
        })
        .collect();
    let doc = serde_json::json!({"arrays": arrays, "nests": nests});
    parse_program(&doc.to_string()).expect("generated program is valid")
}
