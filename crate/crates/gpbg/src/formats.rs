//! JSON, CSV, DOT and binary renderings of the combinatorial and numeric objects.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};

use gpbg_core::board::{EchelonClass, ReductionGraph};
use gpbg_core::forest::{TreeForest, Vertex};
use gpbg_core::kernel::{ExprArena, ExprId, ForestKernels, KernelExpr, Node, NormBound};
use gpbg_core::map::{CollisionMap, HighlightedMatrix, Permutation};

use crate::error::{GpbgError, Result};
use crate::grid::{Grid, GridFunction};

pub fn vertex_label(v: Vertex) -> String {
    match v {
        Vertex::Root(j) => format!("W{j}"),
        Vertex::Internal(l) => format!("v{l}"),
        Vertex::Leaf(i) => format!("u{i}"),
    }
}

pub fn map_to_json(m: &CollisionMap) -> Value {
    json!({"k": m.k(), "n": m.n(), "mu": m.mu()})
}

pub fn map_from_json(v: &Value) -> Result<CollisionMap> {
    let field = |name: &str| {
        v.get(name)
            .ok_or_else(|| GpbgError::Format(format!("missing field {name:?}")))
    };
    let k = field("k")?
        .as_u64()
        .ok_or_else(|| GpbgError::Format("k is not an integer".into()))? as usize;
    let mu: Vec<usize> = serde_json::from_value(field("mu")?.clone())?;
    if let Some(n) = v.get("n").and_then(Value::as_u64) {
        if n as usize != mu.len() {
            return Err(GpbgError::Format(format!("n = {n} but mu has {} entries", mu.len())));
        }
    }
    Ok(CollisionMap::new(k, mu)?)
}

pub fn matrix_to_json(m: &HighlightedMatrix) -> Value {
    json!({"k": m.k(), "n": m.n(), "mu": m.highlights(), "rows": m.rows()})
}

fn perm_json(p: &Permutation) -> Value {
    json!(p.as_slice())
}

pub fn class_to_json(c: &EchelonClass) -> Value {
    json!({
        "representative": matrix_to_json(&c.representative),
        "members": c.members.iter()
            .map(|(m, s)| json!({"mu": m.mu(), "sigma": perm_json(s)}))
            .collect::<Vec<_>>(),
    })
}

pub fn classes_to_json(k: usize, n: usize, classes: &[EchelonClass]) -> Value {
    json!({
        "k": k,
        "n": n,
        "count": classes.len(),
        "bound": gpbg_core::board::echelon_class_bound(k, n).to_string(),
        "classes": classes.iter().map(class_to_json).collect::<Vec<_>>(),
    })
}

pub fn classes_to_csv(classes: &[EchelonClass]) -> String {
    let mut s = String::from("class,representative,mu,sigma\n");
    for (i, c) in classes.iter().enumerate() {
        for (m, sigma) in &c.members {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                i,
                join(c.representative.highlights()),
                join(m.mu()),
                join(sigma.as_slice())
            );
        }
    }
    s
}

/// Space-separated list, the in-cell list format of all CSV outputs.
pub fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn maps_to_csv(maps: &[CollisionMap]) -> String {
    let mut s = String::from("k,n,mu\n");
    for m in maps {
        let _ = writeln!(s, "{},{},{}", m.k(), m.n(), join(m.mu()));
    }
    s
}

pub fn forest_to_json(f: &TreeForest) -> Value {
    let trees: Vec<Value> = (1..=f.k())
        .map(|j| {
            let t = f.tree(j);
            json!({
                "root": t.root,
                "internal": t.internal,
                "leaves": t.leaves,
                "edges": f.edges(j).into_iter()
                    .map(|(a, b)| json!([vertex_label(a), vertex_label(b)]))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({"map": map_to_json(f.map()), "trees": trees, "distinguished": f.distinguished_index()})
}

pub fn forest_to_dot(f: &TreeForest) -> String {
    let mut s = String::from("digraph forest {\n  node [shape=circle];\n");
    for j in 1..=f.k() {
        let bold = j == f.distinguished_index();
        let _ = writeln!(s, "  subgraph cluster_{j} {{\n    style=invis;");
        for (a, b) in f.edges(j) {
            let style = if bold { " [penwidth=3, style=bold]" } else { "" };
            let _ = writeln!(s, "    {} -> {}{};", vertex_label(a), vertex_label(b), style);
        }
        s.push_str("  }\n");
    }
    s.push_str("}\n");
    s
}

pub fn reduction_graph_to_dot(g: &ReductionGraph) -> String {
    let mut s = String::from("digraph reduction {\n  node [shape=box];\n");
    for (i, b) in g.nodes.iter().enumerate() {
        let _ = writeln!(
            s,
            "  b{i} [label=\"mu=[{}]\\ntimes=[{}]\"];",
            join(b.map().mu()),
            join(b.time_row().as_slice())
        );
    }
    for &(from, to, j) in &g.edges {
        let _ = writeln!(s, "  b{from} -> b{to} [label=\"{j}\"];");
    }
    s.push_str("}\n");
    s
}

pub fn expr_to_json(a: &ExprArena, id: ExprId) -> Value {
    match a.node(id) {
        Node::Phi => json!({"op": "phi"}),
        Node::Cubic => json!({"op": "cubic"}),
        Node::Conj(e) => json!({"op": "conj", "arg": expr_to_json(a, e)}),
        Node::Prop { from, to, arg } => {
            json!({"op": "prop", "from": from.index(), "to": to.index(), "arg": expr_to_json(a, arg)})
        }
        Node::Prod3(fs) => json!({"op": "prod3", "args": fs.map(|f| expr_to_json(a, f))}),
    }
}

pub fn kernel_expr_to_json(a: &ExprArena, k: &KernelExpr) -> Value {
    json!({
        "alpha": k.alpha,
        "vertex": vertex_label(k.vertex),
        "time": k.time.index(),
        "terms": k.terms.iter().map(|t| json!({
            "sign": t.sign,
            "psi": expr_to_json(a, t.psi),
            "chi": expr_to_json(a, t.chi),
            "text": format!("{} {}(x) \\overline{{{}}}(x')", if t.sign > 0 { "+" } else { "-" }, a.render(t.psi), a.render(t.chi)),
        })).collect::<Vec<_>>(),
    })
}

pub fn kernels_to_json(fk: &ForestKernels) -> Value {
    let factors: Vec<Value> = fk
        .factors
        .iter()
        .map(|f| {
            json!({
                "j": f.j(),
                "m": f.m(),
                "distinguished": f.is_distinguished(),
                "sigma": f.factor.sigma,
                "time_slots": f.factor.time_slots.iter().map(|t| t.index()).collect::<Vec<_>>(),
                "theta": f.theta.iter().map(|k| kernel_expr_to_json(&fk.arena, k)).collect::<Vec<_>>(),
                "outer": kernel_expr_to_json(&fk.arena, &f.outer),
            })
        })
        .collect();
    json!({"factors": factors})
}

/// One line per term, `Θ_α = Σ ±ψ(x) conj χ(x′)`.
pub fn kernels_to_pretty(fk: &ForestKernels) -> String {
    let mut s = String::new();
    for f in &fk.factors {
        let tag = if f.is_distinguished() { " (distinguished)" } else { "" };
        let _ = writeln!(s, "factor {}{}: m = {}", f.j(), tag, f.m());
        for k in f.theta.iter().chain(std::iter::once(&f.outer)) {
            let name = if k.alpha == 0 {
                String::from("J")
            } else {
                format!("Θ_{}", k.alpha)
            };
            let _ = writeln!(s, "  {name} at t_{} ({} terms)", k.time.index(), k.len());
            for t in &k.terms {
                let sign = if t.sign > 0 { '+' } else { '-' };
                let _ = writeln!(
                    s,
                    "    {sign} {}(x) \\overline{{{}}}(x')",
                    fk.arena.render(t.psi),
                    fk.arena.render(t.chi)
                );
            }
        }
    }
    s
}

pub fn bound_to_json(b: &NormBound) -> Value {
    json!({
        "mode": format!("{:?}", b.mode),
        "distinguished": b.distinguished,
        "m": b.m,
        "time_power": b.time_power,
        "phi_power": b.phi_power,
        "prefactor_log2": b.prefactor_log2,
        "phi_norm": b.phi_norm.label(),
        "terminal_norm": b.terminal_norm.map(|n| n.label()),
        "pretty": b.pretty(),
    })
}

const GPGF_MAGIC: &[u8; 4] = b"GPGF";
const GPGF_VERSION: u32 = 1;

/// `GPGF`, version and `N` (little-endian), then interleaved `re, im` doubles.
pub fn encode_gpgf(f: &GridFunction) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 16 * f.values.len());
    out.extend_from_slice(GPGF_MAGIC);
    out.extend_from_slice(&GPGF_VERSION.to_le_bytes());
    out.extend_from_slice(&(f.values.len() as u64).to_le_bytes());
    for z in &f.values {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

/// The header carries no box length, so the caller supplies `l`.
pub fn decode_gpgf(bytes: &[u8], l: f64) -> Result<GridFunction> {
    if bytes.len() < 16 || &bytes[..4] != GPGF_MAGIC {
        return Err(GpbgError::Format("missing GPGF header".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != GPGF_VERSION {
        return Err(GpbgError::Format(format!("unsupported GPGF version {version}")));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let body = &bytes[16..];
    if n.checked_mul(16) != Some(body.len()) {
        return Err(GpbgError::Format(format!(
            "expected {n} samples, found {} bytes",
            body.len()
        )));
    }
    let values = body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    GridFunction::new(Grid::new(n, l)?, values)
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| GpbgError::Invalid(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gpbg_core::forest::build_forest;
    use gpbg_core::kernel::build_kernels;

    #[test]
    fn map_round_trip() {
        let m = CollisionMap::new(2, vec![1, 2, 3, 3]).unwrap();
        let v = map_to_json(&m);
        assert_eq!(v.to_string(), r#"{"k":2,"mu":[1,2,3,3],"n":4}"#);
        assert_eq!(map_from_json(&v).unwrap(), m);
        assert!(map_from_json(&json!({"k": 1, "mu": [2]})).is_err());
        assert!(map_from_json(&json!({"k": 1, "n": 2, "mu": [1]})).is_err());
    }

    #[test]
    fn forest_json_and_dot() {
        let f = build_forest(&CollisionMap::new(2, vec![1, 2, 3, 3]).unwrap());
        let v = forest_to_json(&f);
        assert_eq!(v["distinguished"], 1);
        assert_eq!(v["trees"][0]["internal"], json!([1, 3, 4]));
        assert_eq!(v["trees"][1]["leaves"], json!([2, 4]));
        let dot = forest_to_dot(&f);
        assert!(dot.contains("W1 -> v1 [penwidth=3, style=bold];"));
        assert!(dot.contains("W2 -> v2;"));
    }

    #[test]
    fn kernel_json_has_time_labels() {
        let fk = build_kernels(&build_forest(&CollisionMap::new(1, vec![1]).unwrap())).unwrap();
        let v = kernels_to_json(&fk);
        let theta = &v["factors"][0]["theta"][0];
        assert_eq!(theta["time"], 1);
        assert_eq!(theta["terms"][0]["psi"], json!({"op": "cubic"}));
        assert_eq!(v["factors"][0]["outer"]["terms"][0]["psi"]["op"], "prop");
        assert!(kernels_to_pretty(&fk).contains("Θ_1 at t_1 (2 terms)"));
    }
}
