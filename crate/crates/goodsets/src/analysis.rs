//! Decision procedures on point sets: goodness, boundary sets, fullness,
//! full and related components, and geodesics.
//!
//! A set is *good* when the rows of its incidence matrix are linearly
//! independent, so that every function on the set splits into a sum of
//! one-coordinate functions. A *boundary* is a set of columns whose
//! deletion leaves a square invertible matrix; prescribing the unknowns on
//! a boundary pins down the decomposition uniquely. A good set is *full*
//! when its column deficit (#columns - #points) is the least possible,
//! namely dimension - 1, which happens exactly when it is a maximal good
//! subset of the product of its own projections.
//!
//! Subset searches are exhaustive and exact, pruned by two facts: subsets
//! of good sets are good, and a full subset must satisfy the column-count
//! identity. Budgets cap the number of candidates examined; exceeding a
//! budget is a hard error, never a silent approximation.

use std::collections::{BTreeSet, HashMap, HashSet};

use num::Zero;

use crate::error::{Error, Result};
use crate::incidence::{ColumnKey, IncidenceMatrix};
use crate::linalg::Rational;
use crate::points::{Point, PointSet, Symbol};

/// Search limits for subset and product enumeration, CLI-configurable.
#[derive(Clone, Debug)]
pub struct Budgets {
    /// Maximum number of candidate subsets a search may examine.
    pub subset_candidates: u64,
    /// Maximum number of ambient product tuples a search may visit.
    pub product_tuples: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            subset_candidates: 1 << 20,
            product_tuples: 1_000_000,
        }
    }
}

struct Counter {
    used: u64,
    limit: u64,
    what: &'static str,
}

impl Counter {
    fn new(limit: u64, what: &'static str) -> Self {
        Counter {
            used: 0,
            limit,
            what,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::BudgetExceeded(format!(
                "{}: more than {} candidates",
                self.what, self.limit
            )))
        } else {
            Ok(())
        }
    }
}

/// A set of incidence columns on which boundary values get prescribed.
/// For separated sets this is just a set of symbols.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoundarySet {
    elements: BTreeSet<ColumnKey>,
}

impl BoundarySet {
    pub fn new(elements: BTreeSet<ColumnKey>) -> Self {
        BoundarySet { elements }
    }

    /// Resolve plain symbol names against a separated set, where each
    /// symbol pins down exactly one column.
    pub fn from_symbols<'a, I>(s: &PointSet, names: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        if !s.is_separated() {
            return Err(Error::UnsupportedInput);
        }
        let mut coordinate_of: HashMap<&Symbol, usize> = HashMap::new();
        for p in s.points() {
            for (i, sym) in p.coords().iter().enumerate() {
                coordinate_of.insert(sym, i);
            }
        }
        let mut elements = BTreeSet::new();
        for name in names {
            let symbol = Symbol::new(name)?;
            let &coordinate = coordinate_of
                .get(&symbol)
                .ok_or_else(|| Error::UnknownBoundaryElement(name.to_owned()))?;
            elements.insert(ColumnKey { coordinate, symbol });
        }
        Ok(BoundarySet { elements })
    }

    pub fn elements(&self) -> &BTreeSet<ColumnKey> {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        self.elements.iter().any(|k| k.symbol.as_str() == name)
    }

    /// Element labels: plain symbol names, qualified by coordinate only
    /// when a symbol repeats across coordinates.
    pub fn labels(&self) -> Vec<String> {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for k in &self.elements {
            *seen.entry(k.symbol.as_str()).or_insert(0) += 1;
        }
        self.elements
            .iter()
            .map(|k| {
                if seen[k.symbol.as_str()] > 1 {
                    k.to_string()
                } else {
                    k.symbol.as_str().to_owned()
                }
            })
            .collect()
    }

    fn column_indices(&self, m: &IncidenceMatrix) -> Result<BTreeSet<usize>> {
        self.elements
            .iter()
            .map(|k| {
                m.column_index(k)
                    .ok_or_else(|| Error::UnknownBoundaryElement(k.to_string()))
            })
            .collect()
    }
}

/// Disjoint blocks of point indices covering a set. Blocks are ascending
/// and ordered by their least element.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    fn new(mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        Partition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn all_singletons(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for b in &self.blocks {
            for &i in b {
                if i >= n || seen[i] {
                    return false;
                }
                seen[i] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// True iff the incidence rows of `s` are linearly independent, i.e. every
/// function on `s` admits an additive decomposition.
pub fn is_good(s: &PointSet) -> Result<bool> {
    let m = s.incidence_matrix()?;
    let mut reducer = RowReducer::new(m.n_cols());
    for r in 0..m.n_rows() {
        match reducer.reduce(row_vector(&m, r)) {
            Some(red) => reducer.push(red),
            None => return Ok(false),
        }
    }
    Ok(true)
}

/// True iff deleting the columns of `b` from the incidence matrix leaves a
/// square invertible matrix, so that prescribing values on `b` makes the
/// decomposition exist and be unique for every function.
pub fn is_boundary(s: &PointSet, b: &BoundarySet) -> Result<bool> {
    if !s.is_separated() {
        return Err(Error::UnsupportedInput);
    }
    let m = s.incidence_matrix()?;
    if !is_good(s)? {
        return Err(Error::NotGood);
    }
    let dropped = b.column_indices(&m)?;
    if m.n_cols() - dropped.len() != m.n_rows() {
        return Ok(false);
    }
    let reduced = m.matrix_without_columns(&dropped);
    Ok(reduced.rank() == m.n_rows())
}

/// Result of a boundary enumeration; `truncated` is set when the output
/// was cut off at the cap.
#[derive(Clone, Debug)]
pub struct BoundaryEnumeration {
    pub boundaries: Vec<BoundarySet>,
    pub truncated: bool,
}

/// All boundary sets of a good separated set, in lexicographic column
/// order, truncated at `cap`.
pub fn enumerate_boundaries(
    s: &PointSet,
    cap: usize,
    budgets: &Budgets,
) -> Result<BoundaryEnumeration> {
    if !s.is_separated() {
        return Err(Error::UnsupportedInput);
    }
    let m = s.incidence_matrix()?;
    if !is_good(s)? {
        return Err(Error::NotGood);
    }
    let size = m.n_cols() - m.n_rows();
    let mut counter = Counter::new(budgets.subset_candidates, "boundary enumeration");
    let mut boundaries = Vec::new();
    let mut truncated = false;
    let mut choice: Vec<usize> = Vec::with_capacity(size);
    enumerate_combinations(m.n_cols(), size, 0, &mut choice, &mut |dropped| {
        counter.tick()?;
        if boundaries.len() == cap {
            truncated = true;
            return Ok(false);
        }
        let drop_set: BTreeSet<usize> = dropped.iter().copied().collect();
        let reduced = m.matrix_without_columns(&drop_set);
        if reduced.rank() == m.n_rows() {
            let elements = dropped.iter().map(|&c| m.columns()[c].clone()).collect();
            boundaries.push(BoundarySet::new(elements));
        }
        Ok(true)
    })?;
    Ok(BoundaryEnumeration {
        boundaries,
        truncated,
    })
}

/// True iff `s` is good and its column deficit equals dimension - 1, the
/// criterion for being a maximal good subset of its own ambient product.
pub fn is_full(s: &PointSet) -> Result<bool> {
    if !s.is_separated() {
        return Err(Error::UnsupportedInput);
    }
    let m = s.incidence_matrix()?;
    if m.n_cols() != m.n_rows() + s.dimension() - 1 {
        return Ok(false);
    }
    is_good(s)
}

/// Definitional fullness check: enumerate the ambient product of the
/// projections and verify no outside point can be added while staying
/// good. Agrees with `is_full` wherever both run.
pub fn maximality_oracle(s: &PointSet, budgets: &Budgets) -> Result<bool> {
    let m = s.incidence_matrix()?;
    if !is_good(s)? {
        return Err(Error::NotGood);
    }
    let projections = s.projections()?;
    let mut total: u64 = 1;
    for p in &projections {
        total = total
            .checked_mul(p.len() as u64)
            .filter(|&t| t <= budgets.product_tuples)
            .ok_or_else(|| {
                Error::BudgetExceeded(format!(
                    "ambient product exceeds {} tuples",
                    budgets.product_tuples
                ))
            })?;
    }
    let mut reducer = RowReducer::new(m.n_cols());
    for r in 0..m.n_rows() {
        let red = reducer
            .reduce(row_vector(&m, r))
            .expect("rows of a good set are independent");
        reducer.push(red);
    }
    let existing: HashSet<&[Symbol]> = s.points().iter().map(Point::coords).collect();
    let n = s.dimension();
    let mut odometer = vec![0usize; n];
    loop {
        let candidate: Vec<Symbol> = odometer
            .iter()
            .enumerate()
            .map(|(i, &j)| projections[i][j].clone())
            .collect();
        if !existing.contains(candidate.as_slice()) {
            let mut row = vec![Rational::zero(); m.n_cols()];
            for (i, sym) in candidate.iter().enumerate() {
                let key = ColumnKey {
                    coordinate: i,
                    symbol: sym.clone(),
                };
                let col = m
                    .column_index(&key)
                    .expect("product symbols come from the projections");
                row[col] = Rational::from_integer(1.into());
            }
            if reducer.reduce(row).is_some() {
                // The extension is still good, so s is not maximal.
                return Ok(false);
            }
        }
        // advance
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(true);
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

/// Full subsets of `s` containing `min_pts`, ordered by size then
/// lexicographically, truncated at `cap`.
#[derive(Clone, Debug)]
pub struct SubsetStream {
    pub subsets: Vec<Vec<usize>>,
    pub truncated: bool,
}

pub fn full_subsets(
    s: &PointSet,
    min_pts: &[usize],
    cap: usize,
    budgets: &Budgets,
) -> Result<SubsetStream> {
    if !s.is_separated() {
        return Err(Error::UnsupportedInput);
    }
    let mut subsets = collect_full_supersets(s, min_pts, budgets)?;
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let truncated = subsets.len() > cap;
    subsets.truncate(cap);
    Ok(SubsetStream { subsets, truncated })
}

/// Equivalence classes of "some full subset contains both points".
pub fn related_components(s: &PointSet, budgets: &Budgets) -> Result<Partition> {
    components_prelude(s)?;
    let full = collect_full_supersets(s, &[], budgets)?;
    let mut uf = UnionFind::new(s.len());
    for subset in &full {
        for &i in &subset[1..] {
            uf.union(subset[0], i);
        }
    }
    let partition = Partition::new(uf.blocks());
    debug_assert!(partition.is_partition_of(s.len()));
    debug_assert!(blocks_are_full(s, &partition));
    Ok(partition)
}

/// The maximal full subsets of a good set; these partition the set.
pub fn full_components(s: &PointSet, budgets: &Budgets) -> Result<Partition> {
    components_prelude(s)?;
    let full = collect_full_supersets(s, &[], budgets)?;
    let mut maximal: Vec<&Vec<usize>> = Vec::new();
    'outer: for k in &full {
        for other in &full {
            if other.len() > k.len() && is_subset(k, other) {
                continue 'outer;
            }
        }
        maximal.push(k);
    }
    let partition = Partition::new(maximal.into_iter().cloned().collect());
    debug_assert!(partition.is_partition_of(s.len()));
    debug_assert!(blocks_are_full(s, &partition));
    Ok(partition)
}

fn components_prelude(s: &PointSet) -> Result<()> {
    if !s.is_separated() {
        return Err(Error::UnsupportedInput);
    }
    if !is_good(s)? {
        return Err(Error::NotGood);
    }
    Ok(())
}

fn blocks_are_full(s: &PointSet, p: &Partition) -> bool {
    p.blocks()
        .iter()
        .all(|b| matches!(s.subset(b).and_then(|t| is_full(&t)), Ok(true)))
}

/// A smallest full subset containing two given points, with the number of
/// minimum-cardinality witnesses.
#[derive(Clone, Debug)]
pub struct Geodesic {
    /// Ascending point indices of the lexicographically least minimum.
    pub indices: Vec<usize>,
    /// How many full subsets attain the minimum cardinality.
    pub minima: u64,
}

pub fn geodesic(s: &PointSet, from: &Point, to: &Point, budgets: &Budgets) -> Result<Geodesic> {
    let a = s
        .position(from)
        .ok_or_else(|| Error::Shape(format!("point {from} is not in the set")))?;
    let b = s
        .position(to)
        .ok_or_else(|| Error::Shape(format!("point {to} is not in the set")))?;
    geodesic_by_index(s, a, b, budgets)
}

pub fn geodesic_by_index(
    s: &PointSet,
    from: usize,
    to: usize,
    budgets: &Budgets,
) -> Result<Geodesic> {
    components_prelude(s)?;
    if from >= s.len() || to >= s.len() {
        return Err(Error::Shape("point index out of range".into()));
    }
    if from == to {
        return Ok(Geodesic {
            indices: vec![from],
            minima: 1,
        });
    }
    let base = [from.min(to), from.max(to)];
    let full = collect_full_supersets(s, &base, budgets)?;
    let Some(min_len) = full.iter().map(Vec::len).min() else {
        return Err(Error::NotRelated);
    };
    let mut minima: Vec<&Vec<usize>> = full.iter().filter(|k| k.len() == min_len).collect();
    minima.sort();
    Ok(Geodesic {
        indices: minima[0].clone(),
        minima: minima.len() as u64,
    })
}

/// Depth-first enumeration of every full subset of `s` containing `base`.
///
/// The walk visits exactly the good subsets (supersets of non-good sets
/// are pruned by heredity) and records those whose column count equals
/// |K| + dimension - 1. Every candidate examined counts against the
/// subset budget.
fn collect_full_supersets(
    s: &PointSet,
    base: &[usize],
    budgets: &Budgets,
) -> Result<Vec<Vec<usize>>> {
    let m = s.incidence_matrix()?;
    let mut base: Vec<usize> = base.to_vec();
    base.sort_unstable();
    base.dedup();
    if base.iter().any(|&i| i >= s.len()) {
        return Err(Error::Shape("point index out of range".into()));
    }
    let mut counter = Counter::new(budgets.subset_candidates, "full-subset search");
    let mut state = SearchState {
        matrix: &m,
        reducer: RowReducer::new(m.n_cols()),
        chosen: Vec::new(),
        col_refs: vec![0u32; m.n_cols()],
        col_count: 0,
        dimension: s.dimension(),
    };
    for &i in &base {
        counter.tick()?;
        if !state.try_push(i) {
            // base itself is not good, so it has no full supersets
            return Ok(Vec::new());
        }
    }
    let in_base: HashSet<usize> = base.iter().copied().collect();
    let mut found = Vec::new();
    dfs_full(&mut state, &in_base, 0, s.len(), &mut counter, &mut found)?;
    Ok(found)
}

struct SearchState<'a> {
    matrix: &'a IncidenceMatrix,
    reducer: RowReducer,
    chosen: Vec<usize>,
    col_refs: Vec<u32>,
    col_count: usize,
    dimension: usize,
}

impl SearchState<'_> {
    /// Add point `i` if the subset stays good; returns false otherwise.
    fn try_push(&mut self, i: usize) -> bool {
        let Some(red) = self.reducer.reduce(row_vector(self.matrix, i)) else {
            return false;
        };
        self.reducer.push(red);
        self.chosen.push(i);
        for &c in self.matrix.row_columns(i) {
            self.col_refs[c] += 1;
            if self.col_refs[c] == 1 {
                self.col_count += 1;
            }
        }
        true
    }

    fn pop(&mut self) {
        let i = self.chosen.pop().expect("pop matches push");
        self.reducer.pop();
        for &c in self.matrix.row_columns(i) {
            self.col_refs[c] -= 1;
            if self.col_refs[c] == 0 {
                self.col_count -= 1;
            }
        }
    }

    fn is_full_now(&self) -> bool {
        !self.chosen.is_empty() && self.col_count == self.chosen.len() + self.dimension - 1
    }
}

fn dfs_full(
    state: &mut SearchState<'_>,
    in_base: &HashSet<usize>,
    next: usize,
    n_points: usize,
    counter: &mut Counter,
    found: &mut Vec<Vec<usize>>,
) -> Result<()> {
    if state.is_full_now() {
        let mut subset = state.chosen.clone();
        subset.sort_unstable();
        found.push(subset);
    }
    for i in next..n_points {
        if in_base.contains(&i) {
            continue;
        }
        counter.tick()?;
        if state.try_push(i) {
            dfs_full(state, in_base, i + 1, n_points, counter, found)?;
            state.pop();
        }
    }
    Ok(())
}

/// Incremental row-echelon basis used to test row independence while
/// subsets grow and shrink stack-wise.
struct RowReducer {
    cols: usize,
    basis: Vec<(usize, Vec<Rational>)>,
}

impl RowReducer {
    fn new(cols: usize) -> Self {
        RowReducer {
            cols,
            basis: Vec::new(),
        }
    }

    /// Eliminate `row` against the basis; `None` means it is dependent.
    fn reduce(&self, mut row: Vec<Rational>) -> Option<(usize, Vec<Rational>)> {
        debug_assert_eq!(row.len(), self.cols);
        for (pivot, basis_row) in &self.basis {
            if row[*pivot].is_zero() {
                continue;
            }
            let factor = &row[*pivot] / &basis_row[*pivot];
            for c in *pivot..self.cols {
                if !basis_row[c].is_zero() {
                    let v = &row[c] - &factor * &basis_row[c];
                    row[c] = v;
                }
            }
        }
        row.iter()
            .position(|v| !v.is_zero())
            .map(|pivot| (pivot, row))
    }

    fn push(&mut self, reduced: (usize, Vec<Rational>)) {
        self.basis.push(reduced);
    }

    fn pop(&mut self) {
        self.basis.pop();
    }
}

fn row_vector(m: &IncidenceMatrix, row: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); m.n_cols()];
    for &c in m.row_columns(row) {
        v[c] = Rational::from_integer(1.into());
    }
    v
}

/// Visit all `size`-subsets of `0..n` in lexicographic order. The callback
/// returns false to stop the walk early.
fn enumerate_combinations(
    n: usize,
    size: usize,
    start: usize,
    choice: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]) -> Result<bool>,
) -> Result<bool> {
    if choice.len() == size {
        return visit(choice);
    }
    let remaining = size - choice.len();
    for i in start..=n.saturating_sub(remaining) {
        choice.push(i);
        let keep_going = enumerate_combinations(n, size, i + 1, choice, visit)?;
        choice.pop();
        if !keep_going {
            return Ok(false);
        }
    }
    Ok(true)
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    // both ascending
    let mut it = b.iter();
    a.iter().all(|x| it.by_ref().any(|y| y == x))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller root so block order follows point order
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }

    fn blocks(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..n {
            let r = self.find(i);
            by_root.entry(r).or_default().push(i);
        }
        let mut blocks: Vec<Vec<usize>> = by_root.into_values().collect();
        blocks.sort_by_key(|b| b[0]);
        blocks
    }
}
