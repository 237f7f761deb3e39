//! Line-oriented graph text format:
//!
//! ```text
//! # comment
//! nodes A B C D
//! A -> B
//! A -- C
//! ```

use std::fmt;
use std::str::FromStr;

use super::{EdgeKind, NodeId, PDGraph};
use crate::error::{Error, Result};

impl FromStr for PDGraph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut names: Vec<NodeId> = Vec::new();
        let mut edges: Vec<(usize, String, String, EdgeKind)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            let parse_err = |message: String| Error::Parse { line, message };
            if toks[0] == "nodes" {
                for t in &toks[1..] {
                    let id = NodeId::new(*t).map_err(|e| parse_err(e.to_string()))?;
                    if names.contains(&id) {
                        return Err(parse_err(format!("node {id} declared twice")));
                    }
                    names.push(id);
                }
                continue;
            }
            match toks.as_slice() {
                [a, "->", b] => edges.push((line, a.to_string(), b.to_string(), EdgeKind::Directed)),
                [a, "--", b] => edges.push((line, a.to_string(), b.to_string(), EdgeKind::Undirected)),
                _ => return Err(parse_err(format!("expected `A -> B`, `A -- B` or `nodes ...`, got {body:?}"))),
            }
        }
        let mut g = PDGraph::from_ids(names)?;
        for (line, a, b, kind) in edges {
            let err = |e: Error| Error::Parse {
                line,
                message: e.to_string(),
            };
            let i = g.idx(&a).map_err(|_| err(Error::UnknownNode(a.clone())))?;
            let j = g.idx(&b).map_err(|_| err(Error::UnknownNode(b.clone())))?;
            g.add_edge_idx(i, j, kind).map_err(err)?;
        }
        Ok(g)
    }
}

impl fmt::Display for PDGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("nodes")?;
        for n in self.nodes() {
            write!(f, " {n}")?;
        }
        writeln!(f)?;
        for (a, b) in self.directed_edges() {
            writeln!(f, "{a} -> {b}")?;
        }
        for (a, b) in self.undirected_edges() {
            writeln!(f, "{a} -- {b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let g: PDGraph = "# fig\nnodes b a\n\na -> b  # edge\n".parse().unwrap();
        assert_eq!(g.to_string(), "nodes a b\na -> b\n");
    }

    #[test]
    fn rejects_malformed_input() {
        let cases = [
            ("nodes a b\na -> b\nb -> a", 3),
            ("nodes a b\na -- b\na -> b", 3),
            ("nodes a\na -> a", 2),
            ("nodes a\na -> z", 2),
            ("nodes a b\na => b", 2),
            ("nodes a a", 1),
        ];
        for (text, want) in cases {
            match text.parse::<PDGraph>() {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
