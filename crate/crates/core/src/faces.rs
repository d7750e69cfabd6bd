//! Face traversal of the planar subdivision induced by a rectangulation.
//!
//! Vertices are the box corners and every segment endpoint; edges join
//! consecutive vertices along each segment and each wall. Faces are walked
//! with the face on the left, always preferring a left turn. A bounded face
//! is a rectangle iff its boundary walk makes four left turns and no others.

use std::collections::HashMap;

use crate::model::{End, Orientation, Rectangulation, Side, Stopper};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceSummary {
    pub bounded: usize,
    pub rectangular: usize,
    pub outer: usize,
}

// Directions counter-clockwise: east, north, west, south.
fn direction(from: (i64, i64), to: (i64, i64)) -> usize {
    match ((to.0 - from.0).signum(), (to.1 - from.1).signum()) {
        (1, 0) => 0,
        (0, 1) => 1,
        (-1, 0) => 2,
        (0, -1) => 3,
        _ => unreachable!("edges are axis-parallel and non-degenerate"),
    }
}

pub fn trace_faces(rect: &Rectangulation) -> FaceSummary {
    let config = rect.config();
    let (w, h) = (config.width(), config.height());

    // Stations along every line: (fixed coordinate, orientation) -> along-axis coordinates.
    let mut lines: Vec<(Orientation, i64, Vec<i64>)> = Vec::new();
    let mut walls: HashMap<Side, Vec<i64>> = HashMap::new();
    walls.insert(Side::Bottom, vec![0, w]);
    walls.insert(Side::Top, vec![0, w]);
    walls.insert(Side::Left, vec![0, h]);
    walls.insert(Side::Right, vec![0, h]);

    for s in rect.segments() {
        let mut stations = vec![s.lo, s.hi];
        stations.extend(rect.resting_on(s.owner).map(|(g, _)| rect.segment(g).at));
        lines.push((s.orientation, s.at, stations));
        for end in [End::Low, End::High] {
            if let Stopper::Wall(side) = s.stopper(end) {
                walls.get_mut(&side).expect("all walls present").push(s.at);
            }
        }
    }
    for (side, stations) in walls {
        let (o, at) = match side {
            Side::Bottom => (Orientation::Horizontal, 0),
            Side::Top => (Orientation::Horizontal, h),
            Side::Left => (Orientation::Vertical, 0),
            Side::Right => (Orientation::Vertical, w),
        };
        lines.push((o, at, stations));
    }

    let mut ids: HashMap<(i64, i64), usize> = HashMap::new();
    let mut coords: Vec<(i64, i64)> = Vec::new();
    let mut adj: Vec<[Option<usize>; 4]> = Vec::new();
    let mut vertex = |p: (i64, i64), adj: &mut Vec<[Option<usize>; 4]>| {
        *ids.entry(p).or_insert_with(|| {
            coords.push(p);
            adj.push([None; 4]);
            coords.len() - 1
        })
    };
    for (o, at, mut stations) in lines {
        stations.sort_unstable();
        stations.dedup();
        let pt = |c: i64| match o {
            Orientation::Horizontal => (c, at),
            Orientation::Vertical => (at, c),
        };
        for pair in stations.windows(2) {
            let (p, q) = (pt(pair[0]), pt(pair[1]));
            let (u, v) = (vertex(p, &mut adj), vertex(q, &mut adj));
            let d = direction(p, q);
            adj[u][d] = Some(v);
            adj[v][(d + 2) % 4] = Some(u);
        }
    }

    let mut visited = vec![[false; 4]; adj.len()];
    let mut summary = FaceSummary { bounded: 0, rectangular: 0, outer: 0 };
    for start in 0..adj.len() {
        for start_dir in 0..4 {
            if adj[start][start_dir].is_none() || visited[start][start_dir] {
                continue;
            }
            let (mut u, mut d) = (start, start_dir);
            let (mut lefts, mut others, mut winding) = (0i32, 0i32, 0i32);
            loop {
                visited[u][d] = true;
                let v = adj[u][d].expect("edge exists");
                // left, straight, right, back
                let turn = [(1, 1), (0, 0), (3, -1), (2, -2)]
                    .into_iter()
                    .find(|&(t, _)| adj[v][(d + t) % 4].is_some())
                    .expect("every vertex has the edge we arrived on");
                match turn.1 {
                    1 => lefts += 1,
                    0 => {}
                    _ => others += 1,
                }
                winding += turn.1;
                u = v;
                d = (d + turn.0) % 4;
                if u == start && d == start_dir {
                    break;
                }
            }
            if winding < 0 {
                summary.outer += 1;
            } else {
                summary.bounded += 1;
                if lefts == 4 && others == 0 {
                    summary.rectangular += 1;
                }
            }
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn faces_of_fixtures() {
        let s = trace_faces(&fixtures::pinwheel());
        assert_eq!(s, FaceSummary { bounded: 5, rectangular: 5, outer: 1 });
        let s = trace_faces(&fixtures::diagonal_t());
        assert_eq!(s, FaceSummary { bounded: 3, rectangular: 3, outer: 1 });
    }
}
