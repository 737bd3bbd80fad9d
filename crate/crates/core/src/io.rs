//! JSON instance formats: graphs (explicit or by generator name), function
//! tables, 0-extension and cut instances, and descent traces. All rationals
//! travel as `"p/q"` strings (or plain JSON integers); infinity as `"inf"`.

use crate::graph::{
    complete_bipartite_graph, complete_graph, cube_graph, cycle_graph, grid_graph, path_graph,
    tree_graph, GraphError, OrientedGraph, SubdivisionMap,
};
use crate::lconvex::SDATrace;
use crate::midpoint::{alternating_grid, linear_grid, rooted_tree_product, zigzag_tree_product};
use crate::rational::{rat_int, ExtRat, Rat};
use crate::solver::{CutInstance, SolverError, ZeroExtInstance};
use num_traits::Signed;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Midpoint(#[from] crate::midpoint::MidpointError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

fn bad(msg: impl Into<String>) -> IoError {
    IoError::Invalid(msg.into())
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value, IoError> {
    v.get(name).ok_or_else(|| bad(format!("missing field \"{name}\"")))
}

fn as_usize(v: &Value, name: &str) -> Result<usize, IoError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| bad(format!("field \"{name}\" must be a nonnegative integer")))
}

fn as_i64(v: &Value, name: &str) -> Result<i64, IoError> {
    v.as_i64()
        .ok_or_else(|| bad(format!("field \"{name}\" must be an integer")))
}

/// Parses `"p/q"`, `"inf"`, or a plain JSON integer.
pub fn ext_rat_from_json(v: &Value, name: &str) -> Result<ExtRat, IoError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(ExtRat::from_int)
            .ok_or_else(|| bad(format!("field \"{name}\" must be an integer or \"p/q\""))),
        Value::String(s) => s
            .parse()
            .map_err(|_| bad(format!("field \"{name}\": cannot parse \"{s}\" as a rational"))),
        _ => Err(bad(format!("field \"{name}\" must be an integer or \"p/q\""))),
    }
}

/// Like [`ext_rat_from_json`] but rejects `"inf"`.
pub fn rat_from_json(v: &Value, name: &str) -> Result<Rat, IoError> {
    match ext_rat_from_json(v, name)? {
        ExtRat::Finite(r) => Ok(r),
        ExtRat::Inf => Err(bad(format!("field \"{name}\" must be finite"))),
    }
}

fn i64_pair(v: &Value, name: &str) -> Result<(i64, i64), IoError> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| bad(format!("field \"{name}\" must be a pair")))?;
    Ok((as_i64(&arr[0], name)?, as_i64(&arr[1], name)?))
}

fn edge_list(v: &Value, names: Option<&[String]>) -> Result<Vec<(usize, usize)>, IoError> {
    let resolve = |e: &Value| -> Result<usize, IoError> {
        match e {
            Value::Number(_) => as_usize(e, "edges"),
            Value::String(s) => names
                .and_then(|ns| ns.iter().position(|n| n == s))
                .ok_or_else(|| bad(format!("unknown vertex name \"{s}\" in edges"))),
            _ => Err(bad("edge endpoints must be indices or vertex names")),
        }
    };
    v.as_array()
        .ok_or_else(|| bad("field \"edges\" must be an array of pairs"))?
        .iter()
        .map(|pair| {
            let arr = pair
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| bad("each edge must be a pair"))?;
            Ok((resolve(&arr[0])?, resolve(&arr[1])?))
        })
        .collect()
}

fn generator_graph(v: &Value, name: &str) -> Result<OrientedGraph, IoError> {
    match name {
        "path" => Ok(path_graph(as_usize(field(v, "n")?, "n")?)),
        "cycle" => Ok(cycle_graph(as_usize(field(v, "n")?, "n")?)),
        "complete" => Ok(complete_graph(as_usize(field(v, "k")?, "k")?)),
        "complete_bipartite" => Ok(complete_bipartite_graph(
            as_usize(field(v, "k")?, "k")?,
            as_usize(field(v, "l")?, "l")?,
        )),
        "cube" => Ok(cube_graph(as_usize(field(v, "n")?, "n")?)),
        "grid" => {
            let dims: Vec<usize> = field(v, "dims")?
                .as_array()
                .ok_or_else(|| bad("field \"dims\" must be an array"))?
                .iter()
                .map(|d| as_usize(d, "dims"))
                .collect::<Result<_, _>>()?;
            Ok(grid_graph(&dims))
        }
        "linear_grid" => {
            let n = as_usize(field(v, "n")?, "n")?;
            let bounds = i64_pair(field(v, "bounds")?, "bounds")?;
            Ok(linear_grid(n, bounds)?.graph().clone())
        }
        "alternating_grid" => {
            let n = as_usize(field(v, "n")?, "n")?;
            let bounds = i64_pair(field(v, "bounds")?, "bounds")?;
            Ok(alternating_grid(n, bounds)?.graph().clone())
        }
        "tree" => {
            let n = as_usize(field(v, "n")?, "n")?;
            let edges = edge_list(field(v, "edges")?, None)?;
            match field(v, "orientation")?.as_str() {
                Some("zigzag") => Ok(zigzag_tree_product(&[(n, edges)])?.graph().clone()),
                Some("rooted") => {
                    let root = as_usize(field(v, "root")?, "root")?;
                    Ok(rooted_tree_product(&[(n, edges, root)])?.graph().clone())
                }
                Some("none") => Ok(tree_graph(n, &edges)),
                _ => Err(bad(
                    "field \"orientation\" must be \"zigzag\", \"rooted\", or \"none\"",
                )),
            }
        }
        "subdivision" => {
            let base = graph_from_json(field(v, "of")?)?;
            Ok(SubdivisionMap::new(&base)?.star)
        }
        "product" => {
            let factors = field(v, "factors")?
                .as_array()
                .ok_or_else(|| bad("field \"factors\" must be an array of graphs"))?;
            let mut graphs = factors.iter().map(graph_from_json);
            let first = graphs
                .next()
                .ok_or_else(|| bad("field \"factors\" must be nonempty"))??;
            graphs.try_fold(first, |acc, g| Ok(acc.product(&g?)))
        }
        other => Err(bad(format!("unknown generator \"{other}\""))),
    }
}

/// Loads a graph: either `{"generator": name, ...}` or an explicit
/// `{"vertices": count | [names], "edges": [[u,v],...],
///   "orientation": {"u-v": "u>v", ...}?, "edge_length": "p/q"?}`.
/// In the orientation map, `"a>b"` puts `a` above `b`.
pub fn graph_from_json(v: &Value) -> Result<OrientedGraph, IoError> {
    if let Some(gen) = v.get("generator") {
        let name = gen
            .as_str()
            .ok_or_else(|| bad("field \"generator\" must be a string"))?;
        return generator_graph(v, name);
    }
    let (n, names) = match field(v, "vertices")? {
        Value::Number(num) => (as_usize(&Value::Number(num.clone()), "vertices")?, None),
        Value::Array(arr) => {
            let names: Vec<String> = arr
                .iter()
                .map(|x| {
                    x.as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| bad("vertex names must be strings"))
                })
                .collect::<Result<_, _>>()?;
            (names.len(), Some(names))
        }
        _ => return Err(bad("field \"vertices\" must be a count or a name list")),
    };
    let edges = edge_list(field(v, "edges")?, names.as_deref())?;
    let edge_length = match v.get("edge_length") {
        Some(el) => {
            let r = rat_from_json(el, "edge_length")?;
            if !r.is_positive() {
                return Err(bad("field \"edge_length\" must be positive"));
            }
            r
        }
        None => rat_int(1),
    };
    let mut g = OrientedGraph::new(n, &edges, edge_length)?;
    if let Some(names) = names.clone() {
        g = g.with_names(names);
    }
    if let Some(orient) = v.get("orientation") {
        let map = orient
            .as_object()
            .ok_or_else(|| bad("field \"orientation\" must be an object"))?;
        let resolve = |s: &str| -> Result<usize, IoError> {
            if let Some(ns) = &names {
                if let Some(i) = ns.iter().position(|n| n == s) {
                    return Ok(i);
                }
            }
            s.parse()
                .map_err(|_| bad(format!("unknown vertex \"{s}\" in orientation")))
        };
        let mut directed = Vec::with_capacity(map.len());
        for (key, val) in map {
            let val = val
                .as_str()
                .ok_or_else(|| bad("orientation values must be strings like \"a>b\""))?;
            let (upper, lower) = val
                .split_once('>')
                .map(|(a, b)| (a, b))
                .or_else(|| val.split_once('<').map(|(a, b)| (b, a)))
                .ok_or_else(|| bad(format!("orientation \"{key}\": expected \"a>b\" or \"a<b\"")))?;
            directed.push((resolve(lower.trim())?, resolve(upper.trim())?));
        }
        directed.sort();
        g = g.with_directed_edges(&directed)?;
    }
    Ok(g)
}

/// Loads a table of `n` extended rationals: a bare array, `{"values":
/// [...]}` (index order), or `{"values": {"name": "p/q", ...}}` keyed by
/// element name (resolved by `namer`) with absent entries infinite.
pub fn values_from_json(
    v: &Value,
    n: usize,
    namer: impl Fn(usize) -> String,
) -> Result<Vec<ExtRat>, IoError> {
    let values = v.get("values").unwrap_or(v);
    match values {
        Value::Array(arr) => {
            if arr.len() != n {
                return Err(bad(format!(
                    "field \"values\" has {} entries for {} elements",
                    arr.len(),
                    n
                )));
            }
            arr.iter().map(|x| ext_rat_from_json(x, "values")).collect()
        }
        Value::Object(map) => {
            let mut out = vec![ExtRat::Inf; n];
            for (key, val) in map {
                let idx = (0..n)
                    .find(|&i| namer(i) == *key)
                    .or_else(|| key.parse().ok().filter(|&i: &usize| i < n))
                    .ok_or_else(|| bad(format!("unknown element \"{key}\" in values")))?;
                out[idx] = ext_rat_from_json(val, "values")?;
            }
            Ok(out)
        }
        _ => Err(bad("field \"values\" must be an array or an object")),
    }
}

/// Loads a function table over the vertices of a graph.
pub fn fn_from_json(v: &Value, graph: &OrientedGraph) -> Result<Vec<ExtRat>, IoError> {
    values_from_json(v, graph.len(), |i| graph.name(i).to_owned())
}

/// Loads a poset: `{"elements": count | [names], "covers": [[child,
/// parent], ...]}` (covers by index or name).
pub fn poset_from_json(v: &Value) -> Result<crate::poset::Poset, IoError> {
    let (n, names) = match field(v, "elements")? {
        Value::Number(num) => (as_usize(&Value::Number(num.clone()), "elements")?, None),
        Value::Array(arr) => {
            let names: Vec<String> = arr
                .iter()
                .map(|x| {
                    x.as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| bad("element names must be strings"))
                })
                .collect::<Result<_, _>>()?;
            (names.len(), Some(names))
        }
        _ => return Err(bad("field \"elements\" must be a count or a name list")),
    };
    let covers = edge_list(field(v, "covers")?, names.as_deref())?;
    let mut poset = crate::poset::Poset::from_pairs(n, &covers)
        .map_err(|e| bad(format!("field \"covers\": {e:?}")))?;
    if let Some(names) = names {
        poset = poset.with_names(names);
    }
    Ok(poset)
}

/// Loads a 0-extension instance:
/// `{"n": vars, "graph": <graph> | "factors": [<graph>...],
///   "b": [[per target vertex]...], "c": [[i, j, "w"], ...]}`.
pub fn zero_ext_from_json(v: &Value) -> Result<ZeroExtInstance, IoError> {
    let n = as_usize(field(v, "n")?, "n")?;
    let factors: Vec<OrientedGraph> = if let Some(fs) = v.get("factors") {
        fs.as_array()
            .ok_or_else(|| bad("field \"factors\" must be an array of graphs"))?
            .iter()
            .map(graph_from_json)
            .collect::<Result<_, _>>()?
    } else {
        vec![graph_from_json(field(v, "graph")?)?]
    };
    let total: usize = factors.iter().map(OrientedGraph::len).product();
    let b: Vec<Vec<Rat>> = field(v, "b")?
        .as_array()
        .filter(|rows| rows.len() == n)
        .ok_or_else(|| bad("field \"b\" must have one row per variable"))?
        .iter()
        .map(|row| {
            row.as_array()
                .filter(|r| r.len() == total)
                .ok_or_else(|| bad("each row of \"b\" must cover every target vertex"))?
                .iter()
                .map(|w| rat_from_json(w, "b"))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let c = match v.get("c") {
        None => Vec::new(),
        Some(cv) => cv
            .as_array()
            .ok_or_else(|| bad("field \"c\" must be an array of [i, j, weight]"))?
            .iter()
            .map(|t| -> Result<(usize, usize, Rat), IoError> {
                let arr = t
                    .as_array()
                    .filter(|a| a.len() == 3)
                    .ok_or_else(|| bad("each entry of \"c\" must be [i, j, weight]"))?;
                Ok((
                    as_usize(&arr[0], "c")?,
                    as_usize(&arr[1], "c")?,
                    rat_from_json(&arr[2], "c")?,
                ))
            })
            .collect::<Result<_, _>>()?,
    };
    Ok(ZeroExtInstance::new(factors, n, b, c)?)
}

/// Loads a cut instance:
/// `{"nodes": n, "edges": [[u, v, "cap"], ...], "terminals": [t, ...]}`.
pub fn cut_from_json(v: &Value) -> Result<CutInstance, IoError> {
    let n_nodes = as_usize(field(v, "nodes")?, "nodes")?;
    let edges = field(v, "edges")?
        .as_array()
        .ok_or_else(|| bad("field \"edges\" must be an array of [u, v, capacity]"))?
        .iter()
        .map(|t| {
            let arr = t
                .as_array()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| bad("each edge must be [u, v, capacity]"))?;
            Ok((
                as_usize(&arr[0], "edges")?,
                as_usize(&arr[1], "edges")?,
                rat_from_json(&arr[2], "edges")?,
            ))
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    let terminals = field(v, "terminals")?
        .as_array()
        .ok_or_else(|| bad("field \"terminals\" must be an array"))?
        .iter()
        .map(|t| as_usize(t, "terminals"))
        .collect::<Result<Vec<_>, _>>()?;
    if edges.iter().any(|&(u, w, _)| u >= n_nodes || w >= n_nodes)
        || terminals.iter().any(|&t| t >= n_nodes)
    {
        return Err(bad("edge endpoints and terminals must be node indices"));
    }
    Ok(CutInstance { n_nodes, edges, terminals })
}

/// Serializes a descent trace (iterates as tuples, values as strings).
pub fn trace_to_json(trace: &SDATrace) -> Value {
    json!({
        "iterates": trace.iterates,
        "values": trace.values.iter().map(ExtRat::to_string).collect::<Vec<_>>(),
        "local_sizes": trace.local_sizes,
        "moves": trace.moves,
        "probes": trace.probes,
    })
}
