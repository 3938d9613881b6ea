//! Scoring a layout assignment: an analytic spatial-locality score per
//! reference, and exact miss counts from replaying the address trace through a
//! cache model.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cache::{CacheConfig, CacheCounts, Hierarchy};
use crate::layout::{complete_linearization, LayoutError, LayoutMatrix, LinearizationMap};
use crate::network::NestDerivation;
use crate::program::{innermost_step_delta, Program};
use crate::solver::Assignment;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no layout assigned to referenced array `{0}`")]
    IncompleteAssignment(String),
    #[error("layout for `{array}` is {found}-D but the array is {expected}-D")]
    DimensionMismatch {
        array: String,
        expected: usize,
        found: usize,
    },
    #[error("expected one innermost choice per nest ({expected}), got {found}")]
    InnermostCount { expected: usize, found: usize },
    #[error("nest `{nest}` has no loop position {position}")]
    InvalidInnermost { nest: String, position: usize },
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefReport {
    pub array: String,
    pub compatible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestReport {
    pub name: String,
    pub innermost: String,
    pub refs: Vec<RefReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalityReport {
    pub score: f64,
    pub nests: Vec<NestReport>,
    /// Keyed "L1", "L2", … in hierarchy order.
    pub cache: IndexMap<String, CacheCounts>,
}

fn check_innermost(program: &Program, innermost: &[usize]) -> Result<(), EvalError> {
    if innermost.len() != program.nests.len() {
        return Err(EvalError::InnermostCount {
            expected: program.nests.len(),
            found: innermost.len(),
        });
    }
    for (n, &p) in program.nests.iter().zip(innermost) {
        if p >= n.depth() {
            return Err(EvalError::InvalidInnermost {
                nest: n.name.clone(),
                position: p,
            });
        }
    }
    Ok(())
}

fn layout_for<'a>(program: &Program, assignment: &'a Assignment, array: &str) -> Result<&'a LayoutMatrix, EvalError> {
    let layout = assignment
        .get(array)
        .ok_or_else(|| EvalError::IncompleteAssignment(array.to_string()))?;
    let dims = program.array(array).map_or(layout.dims(), |a| a.dims);
    if layout.dims() != dims {
        return Err(EvalError::DimensionMismatch {
            array: array.to_string(),
            expected: dims,
            found: layout.dims(),
        });
    }
    Ok(layout)
}

/// Weighted fraction of references whose innermost delta stays on one storage
/// line. Zero deltas count as compatible.
pub fn locality_score(
    program: &Program,
    assignment: &Assignment,
    innermost: &[usize],
) -> Result<(f64, Vec<NestReport>), EvalError> {
    check_innermost(program, innermost)?;
    let mut nests = Vec::with_capacity(program.nests.len());
    let (mut good_w, mut total_w) = (0.0f64, 0.0f64);
    let (mut good, mut total) = (0usize, 0usize);
    for (nest, &pos) in program.nests.iter().zip(innermost) {
        let mut refs = Vec::with_capacity(nest.references.len());
        for r in &nest.references {
            let layout = layout_for(program, assignment, &r.array)?;
            let delta = innermost_step_delta(r, pos).expect("checked position");
            let compatible = layout.annihilates(&delta);
            refs.push(RefReport {
                array: r.array.clone(),
                compatible,
            });
        }
        let c = refs.iter().filter(|r| r.compatible).count();
        good_w += nest.weight * c as f64;
        total_w += nest.weight * refs.len() as f64;
        good += c;
        total += refs.len();
        nests.push(NestReport {
            name: nest.name.clone(),
            innermost: nest.loops[pos].index.clone(),
            refs,
        });
    }
    // all-zero weights fall back to an unweighted fraction
    let score = if total_w > 0.0 {
        good_w / total_w
    } else if total > 0 {
        good as f64 / total as f64
    } else {
        1.0
    };
    Ok((score, nests))
}

/// Replays every nest's reference trace through the cache hierarchy.
///
/// Arrays are placed back to back in declaration order, each base aligned to
/// the largest line size in `levels`.
pub fn simulate_cache(
    program: &Program,
    assignment: &Assignment,
    innermost: &[usize],
    levels: &[CacheConfig],
) -> Result<Vec<CacheCounts>, EvalError> {
    check_innermost(program, innermost)?;
    let align = levels.iter().map(|c| c.line).max().unwrap_or(1);
    let mut maps: Vec<(u64, LinearizationMap)> = Vec::with_capacity(program.arrays.len());
    let mut next_base = 0u64;
    for a in &program.arrays {
        let referenced = program
            .nests
            .iter()
            .any(|n| n.references.iter().any(|r| r.array == a.name));
        let layout = match assignment.get(&a.name) {
            Some(_) => layout_for(program, assignment, &a.name)?.clone(),
            None if referenced => return Err(EvalError::IncompleteAssignment(a.name.clone())),
            None => LayoutMatrix::row_major(a.dims),
        };
        let map = complete_linearization(&layout, &a.extents, a.element_size)?;
        let base = next_base.div_ceil(align) * align;
        next_base = base + map.footprint();
        maps.push((base, map));
    }

    let mut cache = Hierarchy::new(levels);
    for (nest, &pos) in program.nests.iter().zip(innermost) {
        let refs: Vec<(&crate::program::AffineReference, &(u64, LinearizationMap))> = nest
            .references
            .iter()
            .map(|r| {
                let idx = program.array_index(&r.array).expect("validated");
                (r, &maps[idx])
            })
            .collect();
        if refs.is_empty() {
            continue;
        }
        let order = nest.loop_order_with_innermost(pos);
        let mut iter: Vec<i64> = nest.loops.iter().map(|l| l.lower).collect();
        'nest: loop {
            for (r, (base, map)) in &refs {
                cache.access(base + map.address_unchecked(&r.element(&iter)));
            }
            for &p in order.iter().rev() {
                if iter[p] < nest.loops[p].upper {
                    iter[p] += 1;
                    continue 'nest;
                }
                iter[p] = nest.loops[p].lower;
            }
            break;
        }
    }
    Ok(cache.counts())
}

/// Analytic score plus cache counts in one report.
pub fn evaluate(
    program: &Program,
    assignment: &Assignment,
    innermost: &[usize],
    levels: &[CacheConfig],
) -> Result<LocalityReport, EvalError> {
    let (score, nests) = locality_score(program, assignment, innermost)?;
    let counts = simulate_cache(program, assignment, innermost, levels)?;
    let cache = counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (format!("L{}", i + 1), c))
        .collect();
    Ok(LocalityReport { score, nests, cache })
}

/// The loop order each nest was written with.
pub fn original_innermost(program: &Program) -> Vec<usize> {
    program.nests.iter().map(|n| n.depth() - 1).collect()
}

/// Per nest, the innermost choice whose derivation agrees with `assignment`
/// on the most arrays (and hence explains the most allowed pairs). Ties keep
/// candidate order; nests where nothing agrees keep their original order.
pub fn provenance_innermost(program: &Program, derivations: &[NestDerivation], assignment: &Assignment) -> Vec<usize> {
    program
        .nests
        .iter()
        .map(|nest| {
            let mut best: Option<(usize, usize)> = None;
            for d in derivations.iter().filter(|d| d.nest == nest.name) {
                let matched = d
                    .layouts
                    .iter()
                    .filter(|al| al.layout.is_some() && al.layout.as_ref() == assignment.get(&al.array))
                    .count();
                if matched > 0 && best.is_none_or(|(m, _)| matched > m) {
                    best = Some((matched, d.innermost_position));
                }
            }
            best.map_or(nest.depth() - 1, |(_, p)| p)
        })
        .collect()
}

/// Every array row-major.
pub fn row_major_assignment(program: &Program) -> Assignment {
    program
        .arrays
        .iter()
        .map(|a| (a.name.clone(), LayoutMatrix::row_major(a.dims)))
        .collect()
}
