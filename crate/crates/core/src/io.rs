//! Tab-separated edge lists, follow lists and layout coordinates.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{ConversationGraph, GraphBuilder};
use crate::measures::Point;
use crate::records::normalize_user;

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = (usize, std::io::Result<String>)> {
    reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| match l {
            Ok(s) => !s.trim().is_empty() && !s.starts_with('#'),
            Err(_) => true,
        })
}

/// Reads `src<TAB>dst[<TAB>weight]`; lines starting with `#` are skipped. Ids are
/// lowercased and repeated edges add up their weights.
pub fn read_edge_list<R: BufRead>(reader: R, directed: bool, source: &str) -> Result<ConversationGraph> {
    let mut b = GraphBuilder::new(directed);
    for (line_no, line) in data_lines(reader) {
        let line = line?;
        let err = |msg: String| Error::Parse {
            path: source.to_string(),
            line: line_no,
            msg,
        };
        let fields: Vec<&str> = line.trim_end_matches(['\r', '\n']).split('\t').collect();
        let (src, dst, weight) = match fields.as_slice() {
            [s, d] => (*s, *d, 1),
            [s, d, w] => (*s, *d, w.trim().parse::<u64>().map_err(|e| err(format!("bad weight '{w}': {e}")))?),
            _ => return Err(err(format!("expected 2 or 3 tab-separated fields, got {}", fields.len()))),
        };
        let (src, dst) = (normalize_user(src), normalize_user(dst));
        if src.is_empty() || dst.is_empty() {
            return Err(err("empty vertex id".into()));
        }
        if weight == 0 {
            return Err(err("weight must be >= 1".into()));
        }
        if src == dst {
            continue;
        }
        b.add_edge(&src, &dst, weight);
    }
    Ok(b.build())
}

/// Writes the edges sorted by source id then target id, undirected edges with the
/// smaller id first. Reading the output back yields an identical file.
pub fn write_edge_list<W: Write>(g: &ConversationGraph, mut w: W) -> Result<()> {
    let mut lines: Vec<(&str, &str, u64)> = g
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (g.id(e.src), g.id(e.dst));
            if !g.is_directed() && b < a {
                (b, a, e.weight)
            } else {
                (a, b, e.weight)
            }
        })
        .collect();
    lines.sort();
    for (a, b, wt) in lines {
        writeln!(w, "{a}\t{b}\t{wt}")?;
    }
    Ok(())
}

/// Reads `follower<TAB>followee` pairs.
pub fn read_follow_edges<R: BufRead>(reader: R, source: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (line_no, line) in data_lines(reader) {
        let line = line?;
        match line.trim_end().split('\t').collect::<Vec<_>>().as_slice() {
            [a, b] if !a.is_empty() && !b.is_empty() => out.push((a.to_string(), b.to_string())),
            _ => {
                return Err(Error::Parse {
                    path: source.to_string(),
                    line: line_no,
                    msg: "expected 'follower<TAB>followee'".into(),
                })
            }
        }
    }
    Ok(out)
}

/// Writes `id<TAB>x<TAB>y<TAB>side` with a header line.
pub fn write_layout<W: Write>(
    g: &ConversationGraph,
    coords: &[Point],
    sides: Option<&crate::partition::Partition>,
    mut w: W,
) -> Result<()> {
    writeln!(w, "# id\tx\ty\tside")?;
    for (v, (x, y)) in coords.iter().enumerate() {
        match sides {
            Some(p) => writeln!(w, "{}\t{x}\t{y}\t{}", g.id(v), p.side(v))?,
            None => writeln!(w, "{}\t{x}\t{y}\t", g.id(v))?,
        }
    }
    Ok(())
}
