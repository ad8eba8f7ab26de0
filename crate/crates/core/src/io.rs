//! Text formats: PACE `.gr` graphs, PACE `.td` decompositions, cost files,
//! and solution files. All vertex and bag ids in files are 1-based.

use std::fmt::Write as _;

use crate::cost::{self, CostModel};
use crate::error::{Error, Result};
use crate::graph::{Graph, Subgraph};
use crate::treedecomp::TreeDecomposition;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.first() {
            None => None,
            Some(&"c") => None,
            Some(t) if t.starts_with('#') => None,
            Some(_) => Some((i + 1, toks)),
        }
    })
}

fn num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected {what}, found `{tok}`")))
}

/// Parses `p tw <n> <m>` followed by `m` edge lines `u v`.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut pairs = Vec::new();
    for (line, toks) in content_lines(text) {
        match (header, toks.as_slice()) {
            (None, ["p", "tw", n, m]) => {
                header = Some((num(n, line, "vertex count")?, num(m, line, "edge count")?));
            }
            (None, _) => return Err(Error::parse(line, "expected header `p tw <n> <m>`")),
            (Some(_), ["p", ..]) => return Err(Error::parse(line, "duplicate header")),
            (Some((n, _)), [a, b]) => {
                let a: usize = num(a, line, "vertex id")?;
                let b: usize = num(b, line, "vertex id")?;
                if a == b {
                    return Err(Error::parse(line, format!("loop at vertex {a}")));
                }
                for x in [a, b] {
                    if x == 0 || x > n {
                        return Err(Error::parse(line, format!("vertex {x} out of range 1..={n}")));
                    }
                }
                pairs.push((a, b));
            }
            (Some(_), _) => return Err(Error::parse(line, "expected edge line `u v`")),
        }
    }
    let (n, m) = header.ok_or_else(|| Error::parse(0, "missing header `p tw <n> <m>`"))?;
    if pairs.len() != m {
        return Err(Error::parse(
            0,
            format!("header declares {m} edges but file has {} edge lines", pairs.len()),
        ));
    }
    Graph::from_one_based(n, &pairs)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("p tw {} {}\n", g.n(), g.m());
    for e in g.edges() {
        let _ = writeln!(out, "{} {}", e.u + 1, e.v + 1);
    }
    out
}

fn family_table(n: usize, vertex: usize, family: &str, args: &[&str], line: usize) -> Result<Vec<i64>> {
    let wrap = |e: Error| Error::parse(line, e.to_string());
    let arity = |k: usize| {
        if args.len() == k {
            Ok(())
        } else {
            Err(Error::parse(
                line,
                format!("`{family}` takes {k} parameters, got {}", args.len()),
            ))
        }
    };
    match family {
        "table" => {
            if args.len() != n {
                return Err(Error::parse(
                    line,
                    format!("table has {} entries, expected {n}", args.len()),
                ));
            }
            args.iter().map(|t| num(t, line, "integer cost")).collect()
        }
        "set" => {
            let joined = args.join(",");
            let set = joined
                .split(',')
                .filter(|t| !t.is_empty())
                .map(|t| num(t, line, "degree"))
                .collect::<Result<Vec<usize>>>()?;
            cost::factor_table(n, vertex, &set).map_err(wrap)
        }
        "interval" => {
            arity(2)?;
            let l = num(args[0], line, "lower bound")?;
            let u = num(args[1], line, "upper bound")?;
            cost::interval_table(n, vertex, l, u).map_err(wrap)
        }
        "target" => {
            arity(1)?;
            let b = num(args[0], line, "target degree")?;
            cost::interval_table(n, vertex, b, b).map_err(wrap)
        }
        "cubic-main" | "cubic-other" => {
            arity(0)?;
            if n < 4 {
                return Err(wrap(Error::GadgetTooSmall(n)));
            }
            Ok(if family == "cubic-main" {
                cost::cubic_main_table(n)
            } else {
                cost::cubic_other_table(n)
            })
        }
        other => Err(Error::parse(line, format!("unknown cost family `{other}`"))),
    }
}

/// Parses a cost file for `n` vertices. Each line is `<v> <family> <args…>`
/// or `default <family> <args…>`; families are `table`, `set`, `interval`,
/// `target`, `cubic-main` and `cubic-other`.
pub fn parse_costs(text: &str, n: usize) -> Result<CostModel> {
    let mut tables: Vec<Option<Vec<i64>>> = vec![None; n];
    let mut default: Option<(usize, String, Vec<String>)> = None;
    for (line, toks) in content_lines(text) {
        if toks.len() < 2 {
            return Err(Error::parse(line, "expected `<vertex|default> <family> [args]`"));
        }
        let args = &toks[2..];
        if toks[0] == "default" {
            if default.is_some() {
                return Err(Error::parse(line, "duplicate default line"));
            }
            // Validate once against vertex 1 so errors point at this line.
            if n > 0 {
                family_table(n, 0, toks[1], args, line)?;
            }
            default = Some((line, toks[1].to_string(), args.iter().map(|s| s.to_string()).collect()));
            continue;
        }
        let v: usize = num(toks[0], line, "vertex id or `default`")?;
        if v == 0 || v > n {
            return Err(Error::parse(line, format!("vertex {v} out of range 1..={n}")));
        }
        if tables[v - 1].is_some() {
            return Err(Error::parse(line, format!("vertex {v} listed twice")));
        }
        tables[v - 1] = Some(family_table(n, v - 1, toks[1], args, line)?);
    }
    let mut out = Vec::with_capacity(n);
    for (i, t) in tables.into_iter().enumerate() {
        match (t, &default) {
            (Some(t), _) => out.push(t),
            (None, Some((line, family, args))) => {
                let args: Vec<&str> = args.iter().map(String::as_str).collect();
                out.push(family_table(n, i, family, &args, *line)?);
            }
            (None, None) => {
                return Err(Error::parse(0, format!("no costs for vertex {} and no default", i + 1)));
            }
        }
    }
    CostModel::new(out)
}

/// One literal `table` line per vertex.
pub fn write_costs(model: &CostModel) -> String {
    let mut out = String::new();
    for (i, t) in model.tables().iter().enumerate() {
        let _ = write!(out, "{} table", i + 1);
        for x in t {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    out
}

/// A parsed `.td` file together with the vertex count from its solution line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TdFile {
    pub decomposition: TreeDecomposition,
    pub n: usize,
}

/// Parses a PACE `.td` file. Checks the solution line against the bags and
/// that the tree edges form a tree; axiom checks against a graph are left
/// to [`crate::treedecomp::validate_td`].
pub fn parse_td(text: &str) -> Result<TdFile> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    for (line, toks) in content_lines(text) {
        match (header, toks.as_slice()) {
            (None, ["s", "td", nb, w, n]) => {
                let nb: usize = num(nb, line, "bag count")?;
                header = Some((nb, num(w, line, "max bag size")?, num(n, line, "vertex count")?));
                bags = vec![None; nb];
            }
            (None, _) => return Err(Error::parse(line, "expected solution line `s td <bags> <width+1> <n>`")),
            (Some(_), ["s", ..]) => return Err(Error::parse(line, "duplicate solution line")),
            (Some((nb, _, n)), ["b", id, rest @ ..]) => {
                let id: usize = num(id, line, "bag id")?;
                if id == 0 || id > nb {
                    return Err(Error::parse(line, format!("bag id {id} out of range 1..={nb}")));
                }
                if bags[id - 1].is_some() {
                    return Err(Error::parse(line, format!("bag {id} listed twice")));
                }
                let mut bag = Vec::with_capacity(rest.len());
                for t in rest {
                    let x: usize = num(t, line, "vertex id")?;
                    if x == 0 || x > n {
                        return Err(Error::parse(line, format!("bag {id} references vertex {x} > n = {n}")));
                    }
                    bag.push(x - 1);
                }
                bags[id - 1] = Some(bag);
            }
            (Some((nb, _, _)), [a, b]) => {
                let a: usize = num(a, line, "bag id")?;
                let b: usize = num(b, line, "bag id")?;
                for x in [a, b] {
                    if x == 0 || x > nb {
                        return Err(Error::parse(line, format!("tree edge names bag {x} out of range")));
                    }
                }
                edges.push((a - 1, b - 1));
            }
            (Some(_), _) => return Err(Error::parse(line, "expected `b <id> <vertices…>` or tree edge `a b`")),
        }
    }
    let (nb, declared, n) = header.ok_or_else(|| Error::parse(0, "missing solution line"))?;
    let bags: Vec<Vec<usize>> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::parse(0, format!("bag {} missing", i + 1))))
        .collect::<Result<_>>()?;
    let td = TreeDecomposition::new(bags, edges);
    if td.max_bag_size() != declared {
        return Err(Error::parse(
            0,
            format!(
                "solution line declares width+1 = {declared} but the largest bag has {} vertices",
                td.max_bag_size()
            ),
        ));
    }
    if !is_tree(nb, td.tree_edges()) {
        return Err(Error::parse(0, "tree edges do not form a tree: not a tree"));
    }
    Ok(TdFile { decomposition: td, n })
}

fn is_tree(k: usize, edges: &[(usize, usize)]) -> bool {
    if k == 0 {
        return edges.is_empty();
    }
    if edges.len() != k - 1 {
        return false;
    }
    // Union-find: k − 1 edges without a cycle span all k bags.
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

/// Normalized `.td`: bags in id order with sorted vertices, tree edges as
/// `min max` pairs in ascending order.
pub fn write_td(td: &TreeDecomposition, n: usize) -> String {
    let mut out = format!("s td {} {} {}\n", td.len(), td.max_bag_size(), n);
    for (i, bag) in td.bags().iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for x in bag {
            let _ = write!(out, " {}", x + 1);
        }
        out.push('\n');
    }
    let mut edges: Vec<(usize, usize)> = td
        .tree_edges()
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    for (a, b) in edges {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

/// `value <v>` then one `edge <u> <v>` line per chosen edge, canonical order.
pub fn write_solution(value: i64, solution: &Subgraph<'_>) -> String {
    let mut out = format!("value {value}\n");
    for e in solution.edges() {
        let _ = writeln!(out, "edge {} {}", e.u + 1, e.v + 1);
    }
    out
}

pub fn parse_solution<'g>(text: &str, host: &'g Graph) -> Result<(i64, Subgraph<'g>)> {
    let mut value = None;
    let mut ids = Vec::new();
    for (line, toks) in content_lines(text) {
        match toks.as_slice() {
            ["value", v] if value.is_none() => value = Some(num(v, line, "integer value")?),
            ["edge", a, b] => {
                let a: usize = num(a, line, "vertex id")?;
                let b: usize = num(b, line, "vertex id")?;
                let id = (a >= 1 && b >= 1)
                    .then(|| host.edge_id(a - 1, b - 1))
                    .flatten()
                    .ok_or_else(|| Error::parse(line, format!("{{{a},{b}}} is not an edge of the graph")))?;
                ids.push(id);
            }
            _ => return Err(Error::parse(line, "expected `value <v>` or `edge <u> <v>`")),
        }
    }
    let value = value.ok_or_else(|| Error::parse(0, "missing value line"))?;
    Ok((value, Subgraph::from_edge_ids(host, ids)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use proptest::prelude::*;

    #[test]
    fn graph_examples() {
        let g = parse_graph("c triangle\np tw 3 3\n1 2\n2 3\n1 3\n").unwrap();
        assert_eq!(g.m(), 3);
        let g = parse_graph("p tw 2 0\n").unwrap();
        assert_eq!((g.n(), g.m()), (2, 0));
        let err = parse_graph("p tw 3 2\n1 2\n2 3\n1 3\n").unwrap_err();
        assert!(err.to_string().contains("declares 2 edges but file has 3"), "{err}");
        let err = parse_graph("p tw 3 1\n2 2\n").unwrap_err();
        assert_eq!(err, Error::parse(2, "loop at vertex 2"));
        assert!(matches!(parse_graph("p tw 3 1\n1 4\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_graph("1 2\n").is_err());
    }

    #[test]
    fn costs_examples() {
        let m = parse_costs("default target 1\n", 4).unwrap();
        assert!(m.tables().iter().all(|t| t == &[1, 0, 1, 2]));

        let m = parse_costs("1 table 9 4 1 0\ndefault target 0\n", 4).unwrap();
        assert_eq!(m.table(0), &[9, 4, 1, 0]);
        assert_eq!(m.table(3), &[0, 1, 2, 3]);

        let m = parse_costs("default set 0,2\n", 3).unwrap();
        assert!(m.tables().iter().all(|t| t == &[0, 1, 0]));

        let m = parse_costs("1 cubic-main\ndefault cubic-other\n2 interval 1 2\n", 4).unwrap();
        assert_eq!(m.table(0), &[9, 4, 1, 0]);
        assert_eq!(m.table(1), &[1, 0, 0, 1]);
        assert_eq!(m.table(2), &[0, 4, 2, 0]);
    }

    #[test]
    fn costs_errors() {
        assert!(parse_costs("1 target 0\n", 2).unwrap_err().to_string().contains("vertex 2"));
        assert!(matches!(parse_costs("1 table 1 2\n2 table 0\n", 2), Err(Error::Parse { line: 2, .. })));
        assert!(parse_costs("default wobble 3\n", 2).unwrap_err().to_string().contains("unknown cost family"));
        assert!(parse_costs("default target 1\n1 target 0\n1 target 0\n", 2).is_err());
        assert!(parse_costs("default interval 2 1\n", 3).is_err());
        assert!(parse_costs("default cubic-main\n", 3).is_err());
    }

    #[test]
    fn td_parse_and_emit() {
        let text = "c hand written\ns td 3 2 4\nb 2 3 2\nb 1 1 2\nb 3 4 3\n2 1\n3 2\n";
        let td = parse_td(text).unwrap();
        assert_eq!(td.n, 4);
        assert_eq!(td.decomposition.bags()[1], vec![1, 2]);
        let norm = "s td 3 2 4\nb 1 1 2\nb 2 2 3\nb 3 3 4\n1 2\n2 3\n";
        assert_eq!(write_td(&td.decomposition, td.n), norm);
        assert_eq!(write_td(&parse_td(norm).unwrap().decomposition, 4), norm);
    }

    #[test]
    fn td_errors() {
        let err = parse_td("s td 2 3 3\nb 1 1 2\nb 2 2 3\n1 2\n").unwrap_err();
        assert!(err.to_string().contains("width+1 = 3"), "{err}");
        let err = parse_td("s td 3 1 3\nb 1 1\nb 2 2\nb 3 3\n1 2\n2 3\n3 1\n").unwrap_err();
        assert!(err.to_string().contains("not a tree"), "{err}");
        let err = parse_td("s td 3 1 3\nb 1 1\nb 2 2\nb 3 3\n1 2\n").unwrap_err();
        assert!(err.to_string().contains("not a tree"), "{err}");
        assert!(parse_td("s td 1 1 2\nb 1 3\n").unwrap_err().to_string().contains("vertex 3 > n = 2"));
        assert!(parse_td("s td x 1 2\n").is_err());
        assert!(parse_td("b 1 1\n").is_err());
    }

    #[test]
    fn solution_round_trip() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let s = Subgraph::from_edges(&g, &[Edge::new(1, 2)]).unwrap();
        let text = write_solution(-4, &s);
        assert_eq!(text, "value -4\nedge 2 3\n");
        let (v, back) = parse_solution(&text, &g).unwrap();
        assert_eq!((v, back), (-4, s));
        assert!(parse_solution("value 1\nedge 1 3\n", &g).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (0usize..10).prop_flat_map(|n| {
            proptest::collection::vec((0..n.max(1), 0..n.max(1)), 0..30).prop_map(move |p| {
                let p: Vec<_> = p.into_iter().filter(|(a, b)| a != b && *a < n && *b < n).collect();
                Graph::new(n, &p).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn graph_and_costs_round_trip(g in arb_graph(), seed in any::<u64>()) {
            let text = write_graph(&g);
            prop_assert_eq!(&parse_graph(&text).unwrap(), &g);
            let n = g.n();
            let tables: Vec<Vec<i64>> = (0..n)
                .map(|i| (0..n).map(|x| ((seed >> ((i + x) % 60)) as i64 % 19) - 9).collect())
                .collect();
            let m = CostModel::new(tables).unwrap();
            let text = write_costs(&m);
            prop_assert_eq!(parse_costs(&text, n).unwrap(), m);
        }

        #[test]
        fn td_round_trip(g in arb_graph()) {
            let (td, _) = crate::treedecomp::min_fill_decompose(&g);
            let text = write_td(&td, g.n());
            let back = parse_td(&text).unwrap();
            prop_assert_eq!(write_td(&back.decomposition, back.n), text);
        }
    }
}
