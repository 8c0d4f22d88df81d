//! Embedding Controversy: `1 − (d_X + d_Y) / (2·d_XY)` over mean pairwise distances of a
//! two-dimensional layout.

use crate::error::{Error, Result};
use crate::measures::layout::Point;
use crate::partition::{Partition, Side};

fn dist(a: Point, b: Point) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Mean distance over unordered pairs within `vs`; 0 for fewer than two points.
fn mean_within(pos: &[Point], vs: &[usize]) -> f64 {
    if vs.len() < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            total += dist(pos[a], pos[b]);
        }
    }
    total / (vs.len() * (vs.len() - 1) / 2) as f64
}

pub fn ec(embedding: &[Point], p: &Partition) -> Result<f64> {
    if embedding.len() != p.len() {
        return Err(Error::Input(format!(
            "embedding has {} points for {} vertices",
            embedding.len(),
            p.len()
        )));
    }
    let x = p.members(Side::X);
    let y = p.members(Side::Y);
    if x.is_empty() || y.is_empty() {
        return Err(Error::Degenerate("partition has an empty side".into()));
    }
    let mut cross = 0.0;
    for &a in &x {
        for &b in &y {
            cross += dist(embedding[a], embedding[b]);
        }
    }
    let d_xy = cross / (x.len() * y.len()) as f64;
    if !(d_xy > 0.0) {
        return Err(Error::Degenerate("coincident partitions".into()));
    }
    let d_x = mean_within(embedding, &x);
    let d_y = mean_within(embedding, &y);
    Ok(1.0 - (d_x + d_y) / (2.0 * d_xy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_pairs() {
        let pos = [(0.0, 0.0), (0.0, 1.0), (100.0, 0.0), (100.0, 1.0)];
        let p = Partition::split_at(4, 2).unwrap();
        let d_xy = (100.0 + 100.0 + 2.0 * (100.0f64 * 100.0 + 1.0).sqrt()) / 4.0;
        let expected = 1.0 - 2.0 / (2.0 * d_xy);
        let got = ec(&pos, &p).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 0.990).abs() < 5e-4);
    }

    #[test]
    fn coincident_within_sides() {
        let pos = [(1.0, 1.0), (1.0, 1.0), (5.0, 2.0), (5.0, 2.0)];
        assert_eq!(ec(&pos, &Partition::split_at(4, 2).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn same_cloud_is_near_zero() {
        // interleaved lattice points: both sides sample the same cloud
        let pos: Vec<Point> = (0..400).map(|i| ((i % 20) as f64, (i / 20) as f64)).collect();
        let p = Partition::new((0..400).map(|i| if (i + i / 20) % 2 == 0 { Side::X } else { Side::Y }).collect()).unwrap();
        assert!(ec(&pos, &p).unwrap().abs() < 0.01);
    }

    #[test]
    fn all_points_coincide() {
        let pos = [(0.0, 0.0); 4];
        assert!(ec(&pos, &Partition::split_at(4, 2).unwrap()).unwrap_err().to_string().contains("coincident partitions"));
    }

    #[test]
    fn singleton_side_has_zero_spread() {
        let pos = [(0.0, 0.0), (3.0, 0.0), (3.0, 4.0)];
        let p = Partition::split_at(3, 1).unwrap();
        // d_X = 0, d_Y = 4, d_XY = (3 + 5)/2
        assert!((ec(&pos, &p).unwrap() - (1.0 - 4.0 / 8.0)).abs() < 1e-12);
    }
}
