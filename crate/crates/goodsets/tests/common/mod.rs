//! Test-side oracles, kept independent of the library's linear algebra:
//! integer fraction-free elimination, the definitional goodness check
//! (solvability of every indicator system), and definitional fullness
//! (maximality inside the ambient product). Plus seeded random set
//! generators shared by the property and acceptance suites.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use goodsets::{Point, PointSet};

/// Own column indexing: (coordinate, symbol name) pairs in sorted order.
pub fn column_map(s: &PointSet) -> BTreeMap<(usize, String), usize> {
    let mut keys = BTreeSet::new();
    for p in s.points() {
        for (i, sym) in p.coords().iter().enumerate() {
            keys.insert((i, sym.as_str().to_owned()));
        }
    }
    keys.into_iter()
        .enumerate()
        .map(|(idx, key)| (key, idx))
        .collect()
}

/// 0/1 integer rows of the point set over its own column map.
pub fn int_rows(s: &PointSet) -> Vec<Vec<i128>> {
    let map = column_map(s);
    s.points()
        .iter()
        .map(|p| {
            let mut row = vec![0i128; map.len()];
            for (i, sym) in p.coords().iter().enumerate() {
                row[map[&(i, sym.as_str().to_owned())]] = 1;
            }
            row
        })
        .collect()
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

fn normalize_row(row: &mut [i128]) {
    let g = row.iter().fold(0i128, |acc, &v| gcd(acc, v));
    if g > 1 {
        for v in row.iter_mut() {
            *v /= g;
        }
    }
}

/// Integer fraction-free elimination; returns the rank.
pub fn int_rank(mut rows: Vec<Vec<i128>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank][col];
        for r in rank + 1..rows.len() {
            let a = rows[r][col];
            if a == 0 {
                continue;
            }
            let g = gcd(p, a);
            let (mp, ma) = (p / g, a / g);
            let pivot_row = rows[rank].clone();
            for (v, pv) in rows[r].iter_mut().zip(&pivot_row) {
                *v = *v * mp - pv * ma;
            }
            normalize_row(&mut rows[r]);
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Is the integer system `rows * u = rhs` consistent?
pub fn int_consistent(rows: &[Vec<i128>], rhs: &[i128]) -> bool {
    let base = int_rank(rows.to_vec());
    let augmented: Vec<Vec<i128>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut row = r.clone();
            row.push(b);
            row
        })
        .collect();
    int_rank(augmented) == base
}

/// Definitional goodness: every indicator function decomposes, i.e. each
/// standard-basis right-hand side is solvable.
pub fn oracle_good(s: &PointSet) -> bool {
    if s.is_empty() {
        return true;
    }
    let rows = int_rows(s);
    for i in 0..rows.len() {
        let mut rhs = vec![0i128; rows.len()];
        rhs[i] = 1;
        if !int_consistent(&rows, &rhs) {
            return false;
        }
    }
    true
}

/// Definitional fullness: good, and no point of the ambient product of the
/// set's own projections can be added while staying good.
pub fn oracle_full(s: &PointSet) -> bool {
    if !oracle_good(s) {
        return false;
    }
    let projections = s.projections().unwrap();
    let n = s.dimension();
    let mut odometer = vec![0usize; n];
    loop {
        let names: Vec<&str> = odometer
            .iter()
            .enumerate()
            .map(|(i, &j)| projections[i][j].as_str())
            .collect();
        let candidate = Point::from_names(&names).unwrap();
        if s.position(&candidate).is_none() {
            let mut points: Vec<Point> = s.points().to_vec();
            points.push(candidate);
            let extended = PointSet::new(n, points).unwrap();
            if oracle_good(&extended) {
                return false;
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            odometer[i] += 1;
            if odometer[i] < projections[i].len() {
                break;
            }
            odometer[i] = 0;
        }
    }
}

/// Every full subset of `s` containing `required`, found by plain bitmask
/// enumeration with the definitional fullness check. Ascending index lists,
/// ordered by (size, lexicographic).
pub fn oracle_full_subsets(s: &PointSet, required: &[usize]) -> Vec<Vec<usize>> {
    let n = s.len();
    assert!(n <= 16, "oracle enumeration is for small sets");
    let req_mask: u32 = required.iter().fold(0, |m, &i| m | (1 << i));
    let mut found = Vec::new();
    for mask in 1u32..(1 << n) {
        if mask & req_mask != req_mask {
            continue;
        }
        let indices: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let subset = s.subset(&indices).unwrap();
        if oracle_full(&subset) {
            found.push(indices);
        }
    }
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    found
}

/// Related components by definition: close the "share a full subset"
/// relation transitively over the oracle's full subsets.
pub fn oracle_related_components(s: &PointSet) -> Vec<Vec<usize>> {
    let full = oracle_full_subsets(s, &[]);
    let mut parent: Vec<usize> = (0..s.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for k in &full {
        for &i in &k[1..] {
            let (a, b) = (find(&mut parent, k[0]), find(&mut parent, i));
            if a != b {
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..s.len() {
        let r = find(&mut parent, i);
        blocks.entry(r).or_default().push(i);
    }
    blocks.into_values().collect()
}

/// Inclusion-maximal full subsets per the oracle.
pub fn oracle_full_components(s: &PointSet) -> Vec<Vec<usize>> {
    let full = oracle_full_subsets(s, &[]);
    let mut maximal: Vec<Vec<usize>> = Vec::new();
    'outer: for k in &full {
        for other in &full {
            if other.len() > k.len() && k.iter().all(|i| other.contains(i)) {
                continue 'outer;
            }
        }
        maximal.push(k.clone());
    }
    maximal.sort_by_key(|b| b[0]);
    maximal
}

/// Random separated point set: disjoint per-coordinate symbol pools.
pub fn random_separated_set(rng: &mut impl Rng, dimension: usize, max_points: usize) -> PointSet {
    let pool_sizes: Vec<usize> = (0..dimension).map(|_| rng.gen_range(1..=4)).collect();
    let n_points = rng.gen_range(1..=max_points);
    let mut rows: BTreeSet<Vec<String>> = BTreeSet::new();
    for _ in 0..n_points {
        let row: Vec<String> = (0..dimension)
            .map(|i| format!("c{}s{}", i + 1, rng.gen_range(1..=pool_sizes[i])))
            .collect();
        rows.insert(row);
    }
    let rows: Vec<Vec<&str>> = rows
        .iter()
        .map(|r| r.iter().map(String::as_str).collect())
        .collect();
    let refs: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
    PointSet::from_rows(dimension, &refs).unwrap()
}

/// Random set over one shared symbol pool, so symbols may repeat across
/// coordinates (usually not separated).
pub fn random_shared_pool_set(rng: &mut impl Rng, dimension: usize, max_points: usize) -> PointSet {
    let pool: usize = rng.gen_range(2..=5);
    let n_points = rng.gen_range(1..=max_points);
    let mut rows: BTreeSet<Vec<String>> = BTreeSet::new();
    for _ in 0..n_points {
        let row: Vec<String> = (0..dimension)
            .map(|_| format!("s{}", rng.gen_range(1..=pool)))
            .collect();
        rows.insert(row);
    }
    let rows: Vec<Vec<&str>> = rows
        .iter()
        .map(|r| r.iter().map(String::as_str).collect())
        .collect();
    let refs: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
    PointSet::from_rows(dimension, &refs).unwrap()
}
