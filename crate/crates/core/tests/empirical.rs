//! Properties of flips that are observed, not assumed: whether flipping
//! twice returns to the start, and whether flips connect all
//! rectangulations of a point set.

use std::collections::VecDeque;

use rectangulations::symmetry::all_permutations;
use rectangulations::*;

#[test]
fn flip_involution_and_connectivity() {
    for n in 1..=4 {
        let (mut involutive, mut total, mut connected, mut unreachable) = (0usize, 0usize, 0usize, 0usize);
        let perms = all_permutations(n);
        for p in &perms {
            let set = enumerate_backtracking(&PointConfig::from_perm(p).unwrap()).unwrap();
            let mut adjacency = vec![Vec::new(); set.len()];
            let mut incoming = vec![0usize; set.len()];
            for (i, g) in set.iter().enumerate() {
                for a in 0..n {
                    let f = flip(g, a).unwrap();
                    let j = set.position(&f.canonical_key()).expect("flip stays in the set");
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                    if i != j {
                        incoming[j] += 1;
                    }
                    total += 1;
                    if flip(&f, a).unwrap() == *g {
                        involutive += 1;
                    }
                }
            }
            let mut seen = vec![false; set.len()];
            let mut queue = VecDeque::from([0]);
            seen[0] = true;
            while let Some(i) = queue.pop_front() {
                for &j in &adjacency[i] {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            if seen.iter().all(|&s| s) {
                connected += 1;
            }
            unreachable += incoming.iter().filter(|&&c| c == 0).count();
        }
        println!(
            "n = {n}: flip twice is the identity for {involutive}/{total} flips; \
             undirected flip graph connected for {connected}/{} point sets; {unreachable} members are no flip's image",
            perms.len()
        );
    }
}
