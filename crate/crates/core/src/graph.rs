//! Weighted undirected graphs, G-set ingestion and cut evaluation.
//!
//! Vertices are `0..n` internally. The G-set text format is 1-indexed and the
//! conversion happens only inside [`parse_gset`].

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Immutable weighted undirected graph in CSR form.
///
/// Neighbor lists are sorted by vertex id so single edge weights can be looked
/// up by binary search.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    nbrs: Vec<usize>,
    wts: Vec<f64>,
    degree_w: Vec<f64>,
    integer_weights: bool,
}

impl Graph {
    /// Builds a graph from 0-indexed edges.
    ///
    /// Rejects self-loops, duplicate undirected edges, out-of-range endpoints
    /// and negative or non-finite weights.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("graph must have at least one vertex".into()));
        }
        let mut deg = vec![0usize; n];
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(Error::Validation(format!(
                    "edge ({}, {}) has an endpoint outside 1..={n}",
                    e.u + 1,
                    e.v + 1
                )));
            }
            if e.u == e.v {
                return Err(Error::Validation(format!("self-loop at vertex {}", e.u + 1)));
            }
            if !e.w.is_finite() || e.w < 0.0 {
                return Err(Error::Validation(format!(
                    "edge ({}, {}) has weight {}; weights must be finite and nonnegative",
                    e.u + 1,
                    e.v + 1,
                    e.w
                )));
            }
            deg[e.u] += 1;
            deg[e.v] += 1;
        }

        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + deg[i];
        }
        let mut fill = offsets[..n].to_vec();
        let mut pairs = vec![(0usize, 0f64); offsets[n]];
        for e in &edges {
            pairs[fill[e.u]] = (e.v, e.w);
            fill[e.u] += 1;
            pairs[fill[e.v]] = (e.u, e.w);
            fill[e.v] += 1;
        }
        for i in 0..n {
            let row = &mut pairs[offsets[i]..offsets[i + 1]];
            row.sort_by_key(|&(j, _)| j);
            if let Some(dup) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::Validation(format!(
                    "duplicate edge ({}, {})",
                    i.min(dup[0].0) + 1,
                    i.max(dup[0].0) + 1
                )));
            }
        }
        let (nbrs, wts): (Vec<usize>, Vec<f64>) = pairs.into_iter().unzip();
        let degree_w = (0..n)
            .map(|i| wts[offsets[i]..offsets[i + 1]].iter().sum())
            .collect();
        let integer_weights = edges.iter().all(|e| e.w.fract() == 0.0 && e.w < 2f64.powi(40));

        Ok(Self {
            n,
            edges,
            offsets,
            nbrs,
            wts,
            degree_w,
            integer_weights,
        })
    }

    /// Convenience constructor from 0-indexed `(u, v, w)` triples.
    pub fn from_triples(n: usize, triples: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(n, triples.iter().map(|&(u, v, w)| Edge { u, v, w }).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree_w(&self, i: usize) -> f64 {
        self.degree_w[i]
    }

    pub fn degrees_w(&self) -> &[f64] {
        &self.degree_w
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// True when every weight is an integer small enough that all sums the
    /// solver forms stay exact in `f64`.
    pub fn has_integer_weights(&self) -> bool {
        self.integer_weights
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.nbrs[range.clone()]
            .iter()
            .copied()
            .zip(self.wts[range].iter().copied())
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let range = self.offsets[i]..self.offsets[i + 1];
        let row = &self.nbrs[range.clone()];
        row.binary_search(&j).ok().map(|k| self.wts[range.start + k])
    }

    pub fn max_degree_w(&self) -> f64 {
        self.degree_w.iter().copied().fold(0.0, f64::max)
    }
}

/// A bipartition with its value. `side[i]` is `+1` for S and `-1` for S'.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    pub side: Vec<i8>,
    pub value: f64,
}

impl Cut {
    pub fn from_side(g: &Graph, side: Vec<i8>) -> Result<Self> {
        let value = cut_value(g, &side)?;
        Ok(Self { side, value })
    }
}

/// Sum of weights over edges whose endpoints carry opposite labels.
pub fn cut_value(g: &Graph, side: &[i8]) -> Result<f64> {
    if side.len() != g.n() {
        return Err(Error::Argument(format!(
            "side vector has length {}, graph has {} vertices",
            side.len(),
            g.n()
        )));
    }
    if let Some(i) = side.iter().position(|&s| s != 1 && s != -1) {
        return Err(Error::Argument(format!(
            "side label at vertex {} is {}, expected +1 or -1",
            i + 1,
            side[i]
        )));
    }
    Ok(g.edges()
        .iter()
        .filter(|e| side[e.u] != side[e.v])
        .map(|e| e.w)
        .sum())
}

/// `y = (D - W) x`.
pub fn laplacian_apply(g: &Graph, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != g.n() {
        return Err(Error::Argument(format!(
            "vector has length {}, graph has {} vertices",
            x.len(),
            g.n()
        )));
    }
    let mut y = vec![0.0; g.n()];
    laplacian_apply_into(g, x, &mut y);
    Ok(y)
}

pub(crate) fn laplacian_apply_into(g: &Graph, x: &[f64], y: &mut [f64]) {
    for (i, yi) in y.iter_mut().enumerate() {
        let mut acc = g.degree_w(i) * x[i];
        for (j, w) in g.neighbors(i) {
            acc -= w * x[j];
        }
        *yi = acc;
    }
}

/// Parses the G-set text format: a header line `n m` followed by exactly `m`
/// lines `u v w` with 1-indexed endpoints. Blank lines are skipped.
pub fn parse_gset<R: Read>(reader: R) -> Result<Graph> {
    let reader = BufReader::new(reader);
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(parse_err(lineno, "header must be `n m`"));
                }
                let n = parse_usize(fields[0], lineno, "vertex count")?;
                let m = parse_usize(fields[1], lineno, "edge count")?;
                if n == 0 {
                    return Err(parse_err(lineno, "vertex count must be positive"));
                }
                header = Some((n, m));
                edges.reserve(m);
            }
            Some((n, m)) => {
                if edges.len() == m {
                    return Err(parse_err(lineno, format!("more than the {m} declared edge lines")));
                }
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "edge line must be `u v w`"));
                }
                let u = parse_usize(fields[0], lineno, "endpoint")?;
                let v = parse_usize(fields[1], lineno, "endpoint")?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(parse_err(lineno, format!("endpoint out of range 1..={n}")));
                }
                let w: f64 = fields[2]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad weight `{}`", fields[2])))?;
                edges.push(Edge { u: u - 1, v: v - 1, w });
            }
        }
    }

    let (n, m) = header.ok_or_else(|| parse_err(1, "missing header"))?;
    if edges.len() != m {
        return Err(parse_err(
            0,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Graph::new(n, edges)
}

/// Reads a G-set file, transparently decompressing `*.gz`.
pub fn read_gset_file(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        parse_gset(GzDecoder::new(file))
    } else {
        parse_gset(file)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_usize(s: &str, line: usize, what: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| parse_err(line, format!("bad {what} `{s}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        parse_gset("3 3\n1 2 1\n1 3 1\n2 3 1\n".as_bytes()).unwrap()
    }

    #[test]
    fn parses_triangle() {
        let g = triangle();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 3);
        assert!(g.edges().iter().all(|e| e.w == 1.0));
        assert_eq!(g.degree_w(0), 2.0);
        assert!(g.has_integer_weights());
    }

    #[test]
    fn parses_single_weighted_edge() {
        let g = parse_gset("2 1\n1 2 3\n".as_bytes()).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.weight(0, 1), Some(3.0));
        assert_eq!(g.weight(1, 0), Some(3.0));
    }

    #[test]
    fn rejects_malformed_input() {
        let cases = [
            ("3\n1 2 1\n", 1),
            ("3 2\n1 2 1\n1 x 1\n", 3),
            ("3 2\n1 2 1\n", 0),
            ("3 1\n1 2 1\n2 3 1\n", 3),
            ("3 1\n1 4 1\n", 2),
        ];
        for (text, want_line) in cases {
            match parse_gset(text.as_bytes()) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want_line, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn rejects_duplicates_and_self_loops() {
        assert!(matches!(
            parse_gset("3 2\n1 2 1\n2 1 4\n".as_bytes()),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_gset("3 1\n2 2 1\n".as_bytes()),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Graph::from_triples(2, &[(0, 1, -1.0)]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn adjacency_is_symmetric() {
        let g = Graph::from_triples(4, &[(0, 1, 2.0), (1, 2, 3.0), (0, 3, 1.5)]).unwrap();
        for i in 0..g.n() {
            for (j, w) in g.neighbors(i) {
                assert_eq!(g.weight(j, i), Some(w));
            }
        }
        assert_eq!(g.weight(0, 2), None);
    }

    #[test]
    fn cut_values() {
        let g = triangle();
        assert_eq!(cut_value(&g, &[1, -1, -1]).unwrap(), 2.0);
        assert_eq!(cut_value(&g, &[1, 1, 1]).unwrap(), 0.0);
        let c4 = Graph::from_triples(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)])
            .unwrap();
        assert_eq!(cut_value(&c4, &[1, -1, 1, -1]).unwrap(), 4.0);
        assert!(matches!(cut_value(&g, &[1, -1]), Err(Error::Argument(_))));
        assert!(matches!(cut_value(&g, &[1, 0, 1]), Err(Error::Argument(_))));
    }

    #[test]
    fn laplacian_examples() {
        let edge = Graph::from_triples(2, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(laplacian_apply(&edge, &[1.0, -1.0]).unwrap(), vec![2.0, -2.0]);
        let g = triangle();
        assert_eq!(laplacian_apply(&g, &[1.0, 0.0, -1.0]).unwrap(), vec![3.0, 0.0, -3.0]);
        assert_eq!(laplacian_apply(&g, &[1.0; 3]).unwrap(), vec![0.0; 3]);
        assert!(laplacian_apply(&g, &[1.0]).is_err());
    }

    #[test]
    fn gzip_input_is_sniffed_by_extension() {
        use flate2::write::GzEncoder;
        use std::io::Write;
        let dir = std::env::temp_dir().join(format!("si-maxcut-gz-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("tri.gset.gz");
        let mut enc = GzEncoder::new(File::create(&path).unwrap(), flate2::Compression::default());
        enc.write_all(b"3 3\n1 2 1\n1 3 1\n2 3 1\n").unwrap();
        enc.finish().unwrap();
        let g = read_gset_file(&path).unwrap();
        assert_eq!(g.m(), 3);
        std::fs::remove_dir_all(&dir).ok();
    }
}
