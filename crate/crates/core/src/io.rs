//! Edge-list text format and the JSON block sidecar.
//!
//! ```text
//! n m
//! u v      (m lines, 0 <= u < v < n)
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, ParseErrorKind, Result};
use crate::generate::BlockLayout;
use crate::graph::{Graph, GraphBuilder};

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines
        .next()
        .ok_or(Error::parse(1, ParseErrorKind::MissingHeader))?;
    let (n, m) = parse_pair(header)
        .ok_or_else(|| Error::parse(hline, ParseErrorKind::Malformed(header.into())))?;
    let mut b = GraphBuilder::new(n);
    let mut seen = HashSet::new();
    let mut found = 0;
    for (line, text) in lines {
        let (u, v) = parse_pair(text)
            .ok_or_else(|| Error::parse(line, ParseErrorKind::Malformed(text.into())))?;
        for x in [u, v] {
            if x >= n {
                return Err(Error::parse(
                    line,
                    ParseErrorKind::VertexOutOfRange { vertex: x, n },
                ));
            }
        }
        if u == v {
            return Err(Error::parse(line, ParseErrorKind::SelfLoop(u)));
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(Error::parse(
                line,
                ParseErrorKind::DuplicateEdge(key.0, key.1),
            ));
        }
        b.add_edge(u, v);
        found += 1;
    }
    if found != m {
        return Err(Error::parse(
            hline,
            ParseErrorKind::EdgeCountMismatch { declared: m, found },
        ));
    }
    Ok(b.build())
}

fn parse_pair(s: &str) -> Option<(usize, usize)> {
    let mut it = s.split_ascii_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((a, b))
}

pub fn format_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    parse_graph(&text)
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_graph(g)).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })
}

pub fn load_blocks(path: impl AsRef<Path>) -> Result<BlockLayout> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn save_blocks(layout: &BlockLayout, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string(layout)?;
    fs::write(path, text + "\n").map_err(|source| Error::Io {
        path: path.into(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_gnp, Seed};

    fn kind(e: Error) -> (usize, ParseErrorKind) {
        match e {
            Error::Parse { line, kind } => (line, kind),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parses_path() {
        let g = parse_graph("3 2\n0 1\n1 2").unwrap();
        assert_eq!(g, Graph::path(3));
    }

    #[test]
    fn distinct_parse_errors_name_the_line() {
        assert_eq!(
            kind(parse_graph("3 1\n0 0").unwrap_err()),
            (2, ParseErrorKind::SelfLoop(0))
        );
        assert_eq!(
            kind(parse_graph("3 1\n0 3").unwrap_err()),
            (2, ParseErrorKind::VertexOutOfRange { vertex: 3, n: 3 })
        );
        assert_eq!(
            kind(parse_graph("3 2\n0 1\n1 0").unwrap_err()),
            (3, ParseErrorKind::DuplicateEdge(0, 1))
        );
        assert_eq!(
            kind(parse_graph("3 1\n0 x").unwrap_err()),
            (2, ParseErrorKind::Malformed("0 x".into()))
        );
        assert_eq!(
            kind(parse_graph("3 2\n0 1").unwrap_err()),
            (
                1,
                ParseErrorKind::EdgeCountMismatch {
                    declared: 2,
                    found: 1
                }
            )
        );
        assert_eq!(
            kind(parse_graph("").unwrap_err()).1,
            ParseErrorKind::MissingHeader
        );
    }

    #[test]
    fn round_trip_through_file() {
        let g = gen_gnp(50, 0.3, Seed(1)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.el");
        save_graph(&g, &path).unwrap();
        assert_eq!(load_graph(&path).unwrap(), g);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(&format!("50 {}\n", g.edge_count())));
    }

    #[test]
    fn blocks_sidecar_round_trip() {
        let layout = BlockLayout {
            blocks: vec![vec![0, 1], vec![2, 3]],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.blocks.json");
        save_blocks(&layout, &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "{\"blocks\":[[0,1],[2,3]]}\n"
        );
        assert_eq!(load_blocks(&path).unwrap(), layout);
    }
}
