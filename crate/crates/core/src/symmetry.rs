//! The eight symmetries of the square acting on permutations: reflections
//! in x and y, and the x/y transpose (inverse permutation).

use std::collections::BTreeSet;

/// Mirror left-right.
pub fn reverse(perm: &[usize]) -> Vec<usize> {
    perm.iter().rev().copied().collect()
}

/// Mirror top-bottom.
pub fn complement(perm: &[usize]) -> Vec<usize> {
    let n = perm.len();
    perm.iter().map(|&r| n + 1 - r).collect()
}

/// Swap the axes.
pub fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut out = vec![0; perm.len()];
    for (i, &r) in perm.iter().enumerate() {
        out[r - 1] = i + 1;
    }
    out
}

pub fn orbit(perm: &[usize]) -> BTreeSet<Vec<usize>> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![perm.to_vec()];
    while let Some(p) = stack.pop() {
        if seen.insert(p.clone()) {
            stack.extend([reverse(&p), complement(&p), inverse(&p)]);
        }
    }
    seen
}

/// Lexicographically smallest member of the orbit.
pub fn representative(perm: &[usize]) -> Vec<usize> {
    orbit(perm).into_iter().next().expect("orbit contains perm")
}

pub fn is_representative(perm: &[usize]) -> bool {
    representative(perm) == perm
}

/// All permutations of `1..=n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (1..=n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return out };
        let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(all_permutations(0), vec![Vec::<usize>::new()]);
        assert_eq!(all_permutations(3).len(), 6);
        assert_eq!(all_permutations(4).len(), 24);
        assert_eq!(all_permutations(3)[1], vec![1, 3, 2]);
    }

    #[test]
    fn orbits_partition_permutations() {
        for n in 1..=5 {
            let perms = all_permutations(n);
            let total: usize = perms.iter().filter(|p| is_representative(p)).map(|p| orbit(p).len()).sum();
            assert_eq!(total, perms.len());
            assert!(perms.iter().all(|p| orbit(p).len() <= 8 && 8 % orbit(p).len() == 0));
        }
    }

    #[test]
    fn pinwheel_orbit() {
        let o = orbit(&[2, 4, 1, 3]);
        assert_eq!(o.into_iter().collect::<Vec<_>>(), vec![vec![2, 4, 1, 3], vec![3, 1, 4, 2]]);
    }
}
