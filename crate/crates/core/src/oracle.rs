//! Brute-force reference implementations over explicit relation matrices.
//!
//! Nothing here shares code with the union-find, the construction drivers
//! or the preorder closure; these routines exist only to cross-check them.

use std::collections::BTreeSet;

use crate::eqrel::{Card, Character, Partition};

/// `m[x][y]` is true iff `x` is related to `y`.
pub type Matrix = Vec<Vec<bool>>;

pub fn relation_matrix(p: &Partition) -> Matrix {
    let w = p.window();
    (0..w)
        .map(|x| {
            (0..w)
                .map(|y| p.same_class(x, y).expect("in window"))
                .collect()
        })
        .collect()
}

/// Least equivalence relation on `[0, window)` containing `pairs`, by naive
/// fixed-point iteration.
pub fn closure_of_pairs(window: usize, pairs: &[(usize, usize)]) -> Matrix {
    let mut m = vec![vec![false; window]; window];
    for (x, row) in m.iter_mut().enumerate() {
        row[x] = true;
    }
    for &(x, y) in pairs {
        m[x][y] = true;
        m[y][x] = true;
    }
    saturate(&mut m);
    m
}

/// Least reflexive transitive relation containing `pairs`.
pub fn preorder_closure(n: usize, pairs: &[(usize, usize)]) -> Matrix {
    let mut m = vec![vec![false; n]; n];
    for (x, row) in m.iter_mut().enumerate() {
        row[x] = true;
    }
    for &(x, y) in pairs {
        m[x][y] = true;
    }
    saturate(&mut m);
    m
}

fn saturate(m: &mut Matrix) {
    let n = m.len();
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in 0..n {
                if m[x][y] {
                    continue;
                }
                if (0..n).any(|z| m[x][z] && m[z][y]) {
                    m[x][y] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return;
        }
    }
}

pub fn is_reflexive(m: &Matrix) -> bool {
    (0..m.len()).all(|x| m[x][x])
}

pub fn is_symmetric(m: &Matrix) -> bool {
    let n = m.len();
    (0..n).all(|x| (0..n).all(|y| m[x][y] == m[y][x]))
}

pub fn is_transitive(m: &Matrix) -> bool {
    let n = m.len();
    (0..n).all(|x| (0..n).all(|y| !m[x][y] || (0..n).all(|z| !m[y][z] || m[x][z])))
}

pub fn is_equivalence(m: &Matrix) -> bool {
    is_reflexive(m) && is_symmetric(m) && is_transitive(m)
}

/// `a ⊆ b` on the common window.
pub fn is_subrelation(a: &Matrix, b: &Matrix) -> bool {
    let n = a.len().min(b.len());
    (0..n).all(|x| (0..n).all(|y| !a[x][y] || b[x][y]))
}

/// Classes of an equivalence matrix, each listed ascending, sorted by minimum.
pub fn classes(m: &Matrix) -> Vec<Vec<usize>> {
    let n = m.len();
    (0..n)
        .filter(|&x| (0..x).all(|y| !m[x][y]))
        .map(|x| (0..n).filter(|&y| m[x][y]).collect())
        .collect()
}

pub fn character(m: &Matrix, stable_only: &BTreeSet<usize>) -> Character {
    let mut ch = Character::new();
    for class in classes(m) {
        if stable_only.contains(&class[0]) {
            ch.add(Card::Finite(class.len() as u64), 1);
        }
    }
    ch
}

pub fn oldest_class_min(m: &Matrix, k: usize) -> Option<usize> {
    classes(m)
        .into_iter()
        .filter(|c| c.len() == k)
        .map(|c| c[0])
        .min()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_chains() {
        let m = closure_of_pairs(4, &[(0, 1), (2, 1)]);
        assert_eq!(classes(&m), vec![vec![0, 1, 2], vec![3]]);
        assert!(is_equivalence(&m));
    }

    #[test]
    fn preorder_closure_is_directed() {
        let m = preorder_closure(3, &[(0, 1), (1, 2)]);
        assert!(m[0][2]);
        assert!(!m[2][0]);
        assert!(is_reflexive(&m) && is_transitive(&m) && !is_symmetric(&m));
    }

    #[test]
    fn detects_non_transitive() {
        let mut m = closure_of_pairs(3, &[(0, 1)]);
        m[1][2] = true;
        m[2][1] = true;
        assert!(!is_transitive(&m));
    }
}
