//! The six benchmark systems, already centered at their stable fixed point.

use alloc::vec;
use alloc::vec::Vec;

use crate::polymap::{Poly, PolyMap};

fn map(names: &[&str], comps: Vec<Vec<(Vec<u32>, f64)>>) -> PolyMap {
    let n = names.len();
    let comps = comps
        .into_iter()
        .map(|t| Poly::from_terms(n, t).expect("static example"))
        .collect();
    PolyMap::new(names.iter().map(|s| (*s).into()).collect(), comps).expect("static example")
}

/// `x ↦ x/2 − x² + 2x³ − 4x⁴`
pub fn example1() -> PolyMap {
    map(&["x"], vec![vec![(vec![1], 0.5), (vec![2], -1.0), (vec![3], 2.0), (vec![4], -4.0)]])
}

/// `(x, y) ↦ (−y(1 − x² − y²), −x(1 − x² − y²))`
pub fn example2() -> PolyMap {
    map(
        &["x", "y"],
        vec![
            vec![(vec![0, 1], -1.0), (vec![2, 1], 1.0), (vec![0, 3], 1.0)],
            vec![(vec![1, 0], -1.0), (vec![3, 0], 1.0), (vec![1, 2], 1.0)],
        ],
    )
}

/// `(x, y) ↦ (4x³, 9y³)`
pub fn example3() -> PolyMap {
    map(&["x", "y"], vec![vec![(vec![3, 0], 4.0)], vec![(vec![0, 3], 9.0)]])
}

/// `x ↦ −x² − 2x³ − 4x⁴ − 8x⁵`
pub fn example4() -> PolyMap {
    map(
        &["x"],
        vec![vec![(vec![2], -1.0), (vec![3], -2.0), (vec![4], -4.0), (vec![5], -8.0)]],
    )
}

/// `(x, y) ↦ (−x/2 + xy, −y/2 + xy)`
pub fn example5() -> PolyMap {
    map(
        &["x", "y"],
        vec![
            vec![(vec![1, 0], -0.5), (vec![1, 1], 1.0)],
            vec![(vec![0, 1], -0.5), (vec![1, 1], 1.0)],
        ],
    )
}

/// Three-dimensional quadratic-plus-cubic system with zero linear part.
pub fn example6() -> PolyMap {
    let t = |e: [u32; 3], c: f64| (e.to_vec(), c);
    map(
        &["x", "y", "z"],
        vec![
            vec![
                t([1, 1, 0], 1.0 / 2.0),
                t([1, 0, 1], 1.0 / 4.0),
                t([2, 1, 0], 1.0 / 3.0),
                t([2, 0, 1], 1.0 / 12.0),
                t([1, 2, 0], -1.0 / 3.0),
                t([1, 0, 2], -1.0 / 12.0),
                t([1, 1, 1], -1.0 / 12.0),
            ],
            vec![
                t([1, 1, 0], -1.0 / 2.0),
                t([0, 1, 1], 1.0 / 2.0),
                t([2, 1, 0], -1.0 / 3.0),
                t([1, 2, 0], 1.0 / 3.0),
                t([0, 2, 1], 1.0 / 3.0),
                t([0, 1, 2], -1.0 / 3.0),
                t([1, 1, 1], 1.0 / 6.0),
            ],
            vec![
                t([0, 1, 1], -1.0 / 2.0),
                t([1, 0, 1], -1.0 / 4.0),
                t([2, 0, 1], -1.0 / 12.0),
                t([0, 2, 1], -1.0 / 3.0),
                t([1, 0, 2], 1.0 / 12.0),
                t([0, 1, 2], 1.0 / 3.0),
                t([1, 1, 1], -1.0 / 12.0),
            ],
        ],
    )
}

pub fn by_id(id: u32) -> Option<PolyMap> {
    Some(match id {
        1 => example1(),
        2 => example2(),
        3 => example3(),
        4 => example4(),
        5 => example5(),
        6 => example6(),
        _ => return None,
    })
}

/// Known fixed points other than the origin, for plotting.
pub fn other_fixed_points(id: u32) -> Vec<Vec<f64>> {
    match id {
        1 => vec![vec![-0.271845]],
        2 => vec![vec![1.0, 1.0], vec![-1.0, -1.0]],
        5 => vec![vec![1.5, 1.5]],
        _ => Vec::new(),
    }
}
