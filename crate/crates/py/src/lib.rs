//! Python bindings exposing the main types and operations: tree enumeration,
//! cactus composition, interval membership and projection, homology, the
//! knot-tower action, and the verification suites.  Structured values cross
//! the boundary as JSON strings in the same schemas the CLI uses.

use cacti_core::action::{act as core_act, upsilon_tree, AlignedMap};
use cacti_core::cacti::{CactusJson, ProjectiveCactus};
use cacti_core::cells::{cact1_complex, cactus_in_cell, fiber_complex, Field};
use cacti_core::intervals::{ov1_membership, project_to_cactus, OvElement, OvJson};
use cacti_core::knots::{budney_act, KnotMap};
use cacti_core::rat::parse_q;
use cacti_core::trees::enumerate_bw_trees;
use cacti_core::verify::run_suite;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cactus_from_json(s: &str) -> PyResult<ProjectiveCactus> {
    let j: CactusJson = serde_json::from_str(s).map_err(err)?;
    ProjectiveCactus::from_json(&j).map_err(err)
}

fn ov_from_json(s: &str) -> PyResult<OvElement> {
    let j: OvJson = serde_json::from_str(s).map_err(err)?;
    OvElement::from_json(&j).map_err(err)
}

/// Structural keys of all b/w trees of the given arity, with dimensions.
#[pyfunction]
fn tree_census(m: usize) -> PyResult<Vec<(usize, String)>> {
    let trees = enumerate_bw_trees(m).map_err(err)?;
    Ok(trees.into_iter().map(|t| (t.dim(), t.key())).collect())
}

/// Betti numbers of the cell complex of normalized cacti.
#[pyfunction]
#[pyo3(signature = (m, field="f2"))]
fn betti(m: usize, field: &str) -> PyResult<Vec<usize>> {
    let f = match field {
        "f2" => Field::F2,
        "q" => Field::Qq,
        other => return Err(PyValueError::new_err(format!("unknown field {other}"))),
    };
    cact1_complex(m).map_err(err)?.betti(f).map_err(err)
}

/// Insert one cactus (JSON) into a lobe of another; returns JSON.
#[pyfunction]
fn compose_cacti(outer: &str, lobe: usize, inner: &str) -> PyResult<String> {
    let a = cactus_from_json(outer)?;
    let b = cactus_from_json(inner)?;
    let r = a.compose(lobe, &b).map_err(err)?;
    serde_json::to_string(&r.to_json()).map_err(err)
}

/// The corolla cactus with unit arcs, as JSON.
#[pyfunction]
fn star_cactus(m: usize) -> PyResult<String> {
    let c = ProjectiveCactus::from_normalized(cacti_core::cacti::NormalizedCactus::star(m));
    serde_json::to_string(&c.to_json()).map_err(err)
}

/// Decide membership of an overlapping-intervals element (JSON) in the
/// normalized subspace; returns the witness tree key or None.
#[pyfunction]
fn ov_member(element: &str) -> PyResult<Option<String>> {
    let e = ov_from_json(element)?;
    Ok(ov1_membership(&e).map(|w| w.tree.key()))
}

/// Project a normalized element onto its cactus, as JSON.
#[pyfunction]
fn ov_project(element: &str) -> PyResult<String> {
    let e = ov_from_json(element)?;
    let w = ov1_membership(&e)
        .ok_or_else(|| PyValueError::new_err("element is not in the normalized subspace"))?;
    let c = project_to_cactus(&e, &w).map_err(err)?;
    let p = ProjectiveCactus::from_normalized(c);
    serde_json::to_string(&p.to_json()).map_err(err)
}

/// Fiber of the projection over the all-arcs-equal cactus of a tree cell:
/// (cells by dimension, reduced homology vanishes).
#[pyfunction]
fn fiber_summary(m: usize, cell_index: usize) -> PyResult<(Vec<usize>, bool)> {
    let trees = enumerate_bw_trees(m).map_err(err)?;
    let t = trees
        .get(cell_index)
        .ok_or_else(|| PyValueError::new_err("cell index out of range"))?;
    let f = fiber_complex(&cactus_in_cell(t)).map_err(err)?;
    let counts = f.complex.cell_counts();
    let acyclic = f.complex.reduced_homology_vanishes().map_err(err)?;
    Ok((counts, acyclic))
}

/// Evaluate the cactus action on built-in knots at rational times; returns
/// the flattened pairwise directions of the output configuration.
#[pyfunction]
fn act(cactus: &str, knot_names: Vec<String>, times: Vec<String>) -> PyResult<Vec<Vec<f64>>> {
    let c = cactus_from_json(cactus)?;
    let t: Vec<_> = times
        .iter()
        .map(|s| parse_q(s))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let n = t.len();
    let maps: Vec<AlignedMap> = knot_names
        .iter()
        .map(|name| KnotMap::by_name(name).map(|k| AlignedMap::knot_derived(k, n, 3)))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let out = core_act(&c, &maps, &t).map_err(err)?;
    Ok(out.v.iter().map(|w| w.iter().copied().collect()).collect())
}

/// The collapsed insertion tree of a cactus at rational times, as a key.
#[pyfunction]
fn insertion_tree(cactus: &str, times: Vec<String>) -> PyResult<String> {
    let c = cactus_from_json(cactus)?;
    let t: Vec<_> = times
        .iter()
        .map(|s| parse_q(s))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    Ok(upsilon_tree(&c, &t).map_err(err)?.key())
}

/// Sample the interval action on built-in knots along the core curve.
#[pyfunction]
fn knot_action_samples(
    element: &str,
    knot_names: Vec<String>,
    samples: usize,
) -> PyResult<Vec<(f64, Vec<f64>)>> {
    let e = ov_from_json(element)?;
    let ks: Vec<KnotMap> = knot_names
        .iter()
        .map(|n| KnotMap::by_name(n))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let f = budney_act(&e, &ks).map_err(err)?;
    let mut out = Vec::new();
    for k in 0..samples {
        let t = -1.0 + 2.0 * k as f64 / (samples.max(2) - 1) as f64;
        let p = f.curve(t, 3);
        out.push((t, p.iter().copied().collect()));
    }
    Ok(out)
}

/// Run a verification suite; returns (passed, cases, max_deviation, json).
#[pyfunction]
#[pyo3(signature = (suite, seed=1, cases=100, tol=None))]
fn verify(suite: &str, seed: u64, cases: u64, tol: Option<f64>) -> PyResult<(bool, u64, f64, String)> {
    let r = run_suite(suite, seed, cases, tol).map_err(err)?;
    Ok((r.passed(), r.cases, r.max_deviation, r.to_json()))
}

#[pymodule]
fn cacti_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(tree_census, m)?)?;
    m.add_function(wrap_pyfunction!(betti, m)?)?;
    m.add_function(wrap_pyfunction!(compose_cacti, m)?)?;
    m.add_function(wrap_pyfunction!(star_cactus, m)?)?;
    m.add_function(wrap_pyfunction!(ov_member, m)?)?;
    m.add_function(wrap_pyfunction!(ov_project, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_summary, m)?)?;
    m.add_function(wrap_pyfunction!(act, m)?)?;
    m.add_function(wrap_pyfunction!(insertion_tree, m)?)?;
    m.add_function(wrap_pyfunction!(knot_action_samples, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
