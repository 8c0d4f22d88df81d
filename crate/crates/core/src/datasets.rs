//! Bundled reference data.

use crate::graph::ConversationGraph;
use crate::io::read_edge_list;
use crate::partition::{import_partition, Partition};

/// Zachary's karate club, members numbered 0–33, as an edge-list file.
pub const KARATE_EDGES: &str = include_str!("../data/karate.tsv");
/// The two factions after the split (0 = the instructor's, 1 = the officer's).
pub const KARATE_FACTIONS: &str = include_str!("../data/karate_factions.tsv");

pub fn karate_club() -> ConversationGraph {
    read_edge_list(KARATE_EDGES.as_bytes(), false, "karate.tsv").expect("bundled karate edge list is valid")
}

pub fn karate_factions(g: &ConversationGraph) -> Partition {
    import_partition(g, KARATE_FACTIONS.as_bytes()).expect("bundled karate factions are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Side;

    #[test]
    fn karate_shape() {
        let g = karate_club();
        assert_eq!(g.vertex_count(), 34);
        assert_eq!(g.edge_count(), 78);
        assert!(g.is_connected());
        let p = karate_factions(&g);
        assert_eq!(p.size(Side::X), 17);
        assert_eq!(p.side(g.index_of("0").unwrap()), Side::X);
        assert_eq!(p.side(g.index_of("33").unwrap()), Side::Y);
    }
}
