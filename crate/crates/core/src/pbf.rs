//! Pseudo-Boolean functions on dense interaction sets.
//!
//! A pseudo-Boolean function `f: {0,1}^n -> R` is stored as the binary
//! polynomial `f(x) = sum_{L in S} beta_L prod_{k in L} x_k`, where the
//! family `S` is kept dense (closed under taking subsets). The storage is a
//! DAG with one node per `L in S`; node `L'` is a child of `L` iff
//! `L' = L + {k}` for a single `k`. Every superset of a node is therefore
//! reachable through child links, which is what [`PseudoBooleanFunction::extract_subset_family`]
//! and the approximation operators use to clip out `S_lambda`.
//!
//! [`DenseLocalFunction`] holds all `2^m` values of a function of `m`
//! listed variables and converts to and from interaction coefficients with
//! the subset-sum (zeta) and Möbius transforms.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Deserialize;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::fmt_real;

/// Largest number of variables a [`DenseLocalFunction`] may hold.
pub const TABLE_CAP: usize = 25;

/// Coefficients with magnitude below this are dropped when they have no
/// surviving superset.
pub const PRUNE_TOL: f64 = 1e-12;

/// A set of variable indices identifying one interaction term.
///
/// Indices are kept strictly increasing. Ordering is by size first and
/// lexicographic within a size.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct InteractionSet(SmallVec<[usize; 4]>);

impl InteractionSet {
    pub fn empty() -> Self {
        InteractionSet(SmallVec::new())
    }

    /// Builds a set from arbitrary indices. Duplicates are rejected.
    pub fn new<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut v: SmallVec<[usize; 4]> = indices.into_iter().collect();
        v.sort_unstable();
        for w in v.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidArgument(format!(
                    "duplicate index {} in interaction set",
                    w[0]
                )));
            }
        }
        Ok(InteractionSet(v))
    }

    pub(crate) fn from_sorted(v: SmallVec<[usize; 4]>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        InteractionSet(v)
    }

    pub fn singleton(i: usize) -> Self {
        let mut v = SmallVec::new();
        v.push(i);
        InteractionSet(v)
    }

    pub fn pair(i: usize, j: usize) -> Self {
        assert_ne!(i, j, "pair needs two distinct indices");
        let mut v = SmallVec::new();
        v.push(i.min(j));
        v.push(i.max(j));
        InteractionSet(v)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0.binary_search(&k).is_ok()
    }

    pub fn is_subset_of(&self, other: &InteractionSet) -> bool {
        self.0.iter().all(|k| other.contains(*k))
    }

    pub fn is_disjoint(&self, other: &InteractionSet) -> bool {
        self.0.iter().all(|k| !other.contains(*k))
    }

    pub fn with(&self, k: usize) -> Self {
        match self.0.binary_search(&k) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut v = self.0.clone();
                v.insert(pos, k);
                InteractionSet(v)
            }
        }
    }

    pub fn without(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        if let Ok(pos) = v.binary_search(&k) {
            v.remove(pos);
        }
        InteractionSet(v)
    }

    pub fn union(&self, other: &InteractionSet) -> Self {
        let mut v: SmallVec<[usize; 4]> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        InteractionSet(v)
    }

    pub fn difference(&self, other: &InteractionSet) -> Self {
        InteractionSet(self.0.iter().copied().filter(|k| !other.contains(*k)).collect())
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// The subset selected by `mask` over this set's indices (bit `k` picks the `k`-th index).
    pub fn subset_from_mask(&self, mask: usize) -> Self {
        InteractionSet(
            self.0
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &k)| k)
                .collect(),
        )
    }

    /// True iff `x_k = 1` for every `k` in the set.
    pub fn all_on(&self, x: &[u8]) -> bool {
        self.0.iter().all(|&k| x[k] != 0)
    }
}

impl PartialOrd for InteractionSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for InteractionSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl fmt::Debug for InteractionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for InteractionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, k) in self.0.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "}}")
    }
}

impl serde::Serialize for InteractionSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter())
    }
}

impl From<&[usize]> for InteractionSet {
    /// Panics on duplicate indices.
    fn from(v: &[usize]) -> Self {
        InteractionSet::new(v.iter().copied()).expect("duplicate index")
    }
}

/// Which part of `S` relative to a set `lambda` to extract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetFamily {
    /// `S_lambda`: every `L in S` with `lambda ⊆ L`.
    Containing,
    /// `S \ S_lambda`.
    Complement,
    /// `S^0_lambda`: every `L in S` disjoint from `lambda`.
    Disjoint,
}

#[derive(Clone, Debug)]
struct Node {
    set: InteractionSet,
    beta: f64,
    children: Vec<usize>,
}

/// Sparse binary polynomial represented on a dense interaction family.
#[derive(Clone, Debug)]
pub struct PseudoBooleanFunction {
    n: usize,
    nodes: Vec<Option<Node>>,
    free: Vec<usize>,
    index: HashMap<InteractionSet, usize>,
}

const ROOT: usize = 0;

impl PseudoBooleanFunction {
    /// The zero function of `n` variables (only the constant node).
    pub fn new(n: usize) -> Self {
        let mut index = HashMap::new();
        index.insert(InteractionSet::empty(), ROOT);
        PseudoBooleanFunction {
            n,
            nodes: vec![Some(Node {
                set: InteractionSet::empty(),
                beta: 0.0,
                children: Vec::new(),
            })],
            free: Vec::new(),
            index,
        }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut f = Self::new(n);
        f.node_mut(ROOT).beta = c;
        f
    }

    /// Builds a function from `(set, beta)` pairs. Repeated sets are summed.
    /// The dense closure is inserted and negligible coefficients pruned.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (InteractionSet, f64)>,
    {
        let mut f = Self::new(n);
        for (set, beta) in terms {
            f.add_term(&set, beta)?;
        }
        f.prune(PRUNE_TOL);
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nodes, i.e. `|S|`.
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn constant_term(&self) -> f64 {
        self.node(ROOT).beta
    }

    /// `beta_L`, or 0 when `L` is not in `S`.
    pub fn beta(&self, set: &InteractionSet) -> f64 {
        self.index
            .get(set)
            .map(|&idx| self.node(idx).beta)
            .unwrap_or(0.0)
    }

    pub fn contains(&self, set: &InteractionSet) -> bool {
        self.index.contains_key(set)
    }

    /// Children of `set` in the DAG (`set + {k}` for each present `k`), sorted.
    pub fn children(&self, set: &InteractionSet) -> Vec<InteractionSet> {
        let Some(&idx) = self.index.get(set) else {
            return Vec::new();
        };
        let mut out: Vec<InteractionSet> = self
            .node(idx)
            .children
            .iter()
            .map(|&c| self.node(c).set.clone())
            .collect();
        out.sort();
        out
    }

    /// All `(L, beta_L)` sorted by size, then lexicographically.
    pub fn terms(&self) -> Vec<(InteractionSet, f64)> {
        let mut out: Vec<(InteractionSet, f64)> = self
            .nodes
            .iter()
            .flatten()
            .map(|node| (node.set.clone(), node.beta))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Largest `|L|` over nodes with a non-zero coefficient.
    pub fn degree(&self) -> usize {
        self.nodes
            .iter()
            .flatten()
            .filter(|node| node.beta != 0.0)
            .map(|node| node.set.len())
            .max()
            .unwrap_or(0)
    }

    /// Sorted list of variables mentioned by any node.
    pub fn variables(&self) -> Vec<usize> {
        let mut vars: Vec<usize> = self
            .nodes
            .iter()
            .flatten()
            .filter(|node| node.set.len() == 1)
            .map(|node| node.set.indices()[0])
            .collect();
        vars.sort_unstable();
        vars
    }

    /// True when every node's subsets are present and every child link is consistent.
    pub fn is_dense(&self) -> bool {
        self.nodes.iter().flatten().all(|node| {
            node.set
                .indices()
                .iter()
                .all(|&k| self.index.contains_key(&node.set.without(k)))
        })
    }

    pub fn evaluate(&self, x: &[u8]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[u8]) -> f64 {
        // Walk the DAG from the root, following only links to switched-on variables.
        let mut total = 0.0;
        let mut seen = HashSet::new();
        let mut stack = vec![ROOT];
        while let Some(idx) = stack.pop() {
            let node = self.node(idx);
            total += node.beta;
            for &c in &node.children {
                let child = self.node(c);
                if child.set.all_on(x) && seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        total
    }

    /// Adds `delta` to `beta_set`, inserting `set` and its missing subsets.
    pub fn add_term(&mut self, set: &InteractionSet, delta: f64) -> Result<()> {
        if let Some(k) = set.max_index() {
            if k >= self.n {
                return Err(Error::VariableOutOfRange { var: k, n: self.n });
            }
        }
        self.add_unchecked(set, delta);
        Ok(())
    }

    pub(crate) fn add_unchecked(&mut self, set: &InteractionSet, delta: f64) {
        let idx = self.ensure_node(set);
        self.node_mut(idx).beta += delta;
    }

    fn ensure_node(&mut self, set: &InteractionSet) -> usize {
        if let Some(&idx) = self.index.get(set) {
            return idx;
        }
        let parents: Vec<usize> = set
            .indices()
            .iter()
            .map(|&k| self.ensure_node(&set.without(k)))
            .collect();
        let node = Node {
            set: set.clone(),
            beta: 0.0,
            children: Vec::new(),
        };
        let idx = match self.free.pop() {
            Some(slot) => {
                self.nodes[slot] = Some(node);
                slot
            }
            None => {
                self.nodes.push(Some(node));
                self.nodes.len() - 1
            }
        };
        for p in parents {
            self.node_mut(p).children.push(idx);
        }
        self.index.insert(set.clone(), idx);
        idx
    }

    fn node(&self, idx: usize) -> &Node {
        self.nodes[idx].as_ref().expect("live node")
    }

    fn node_mut(&mut self, idx: usize) -> &mut Node {
        self.nodes[idx].as_mut().expect("live node")
    }

    /// Removes a node that has no children.
    fn remove_leaf(&mut self, idx: usize) {
        debug_assert_ne!(idx, ROOT);
        let node = self.nodes[idx].take().expect("live node");
        debug_assert!(node.children.is_empty());
        for &k in node.set.indices() {
            let parent = self.index[&node.set.without(k)];
            self.node_mut(parent).children.retain(|&c| c != idx);
        }
        self.index.remove(&node.set);
        self.free.push(idx);
    }

    /// Node indices of every superset of `set` present in `S` (including `set`),
    /// found by walking child links. Sorted by the set order.
    fn superset_nodes(&self, set: &InteractionSet) -> Vec<usize> {
        let Some(&start) = self.index.get(set) else {
            return Vec::new();
        };
        let mut seen = HashSet::new();
        seen.insert(start);
        let mut stack = vec![start];
        let mut out = vec![start];
        while let Some(idx) = stack.pop() {
            for &c in &self.node(idx).children {
                if seen.insert(c) {
                    stack.push(c);
                    out.push(c);
                }
            }
        }
        out.sort_by(|&a, &b| self.node(a).set.cmp(&self.node(b).set));
        out
    }

    /// `S_set` as `(L, beta_L)` pairs, sorted.
    pub fn supersets(&self, set: &InteractionSet) -> Vec<(InteractionSet, f64)> {
        self.superset_nodes(set)
            .into_iter()
            .map(|idx| {
                let node = self.node(idx);
                (node.set.clone(), node.beta)
            })
            .collect()
    }

    pub fn extract_subset_family(
        &self,
        lambda: &InteractionSet,
        mode: SubsetFamily,
    ) -> Vec<(InteractionSet, f64)> {
        match mode {
            SubsetFamily::Containing => self.supersets(lambda),
            SubsetFamily::Complement => {
                let containing: HashSet<usize> =
                    self.superset_nodes(lambda).into_iter().collect();
                let mut out: Vec<(InteractionSet, f64)> = self
                    .index
                    .iter()
                    .filter(|(_, idx)| !containing.contains(idx))
                    .map(|(set, &idx)| (set.clone(), self.node(idx).beta))
                    .collect();
                out.sort_by(|a, b| a.0.cmp(&b.0));
                out
            }
            SubsetFamily::Disjoint => self
                .terms()
                .into_iter()
                .filter(|(set, _)| set.is_disjoint(lambda))
                .collect(),
        }
    }

    /// Sorted neighbours of variable `i`: every other variable sharing a node with it.
    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        let mut vars: Vec<usize> = self
            .superset_nodes(&InteractionSet::singleton(i))
            .into_iter()
            .flat_map(|idx| self.node(idx).set.indices().to_vec())
            .filter(|&k| k != i)
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Removes `S_set` (all supersets of `set`), returning the removed terms sorted.
    /// Removing an up-closed family keeps `S` dense. The root is never removed.
    pub fn remove_supersets(&mut self, set: &InteractionSet) -> Vec<(InteractionSet, f64)> {
        let idxs = self.superset_nodes(set);
        let removed: Vec<(InteractionSet, f64)> = idxs
            .iter()
            .map(|&idx| {
                let node = self.node(idx);
                (node.set.clone(), node.beta)
            })
            .collect();
        for &idx in idxs.iter().rev() {
            if idx == ROOT {
                self.node_mut(ROOT).beta = 0.0;
            } else {
                self.remove_leaf(idx);
            }
        }
        removed
    }

    /// Drops every node with `|beta| < tol` that has no surviving superset.
    pub fn prune(&mut self, tol: f64) {
        let mut idxs: Vec<usize> = self.index.values().copied().collect();
        idxs.sort_by(|&a, &b| self.node(b).set.cmp(&self.node(a).set));
        self.prune_nodes(&idxs, tol);
    }

    /// Prune restricted to the listed sets (and, through them, nothing else).
    pub(crate) fn prune_sets(&mut self, sets: &[InteractionSet], tol: f64) {
        let mut idxs: Vec<usize> = sets.iter().filter_map(|s| self.index.get(s).copied()).collect();
        idxs.sort_by(|&a, &b| self.node(b).set.cmp(&self.node(a).set));
        idxs.dedup();
        self.prune_nodes(&idxs, tol);
    }

    fn prune_nodes(&mut self, idxs_desc: &[usize], tol: f64) {
        for &idx in idxs_desc {
            if idx == ROOT {
                continue;
            }
            let Some(node) = self.nodes[idx].as_ref() else {
                continue;
            };
            if node.children.is_empty() && node.beta.abs() < tol {
                self.remove_leaf(idx);
            }
        }
    }

    /// Multiplies every coefficient by `a`.
    pub fn scale(&mut self, a: f64) {
        for node in self.nodes.iter_mut().flatten() {
            node.beta *= a;
        }
    }

    /// `a f + b g` on the dense closure of `S_f ∪ S_g`, pruned.
    pub fn add_scaled(f: &Self, g: &Self, a: f64, b: f64) -> Result<Self> {
        if f.n != g.n {
            return Err(Error::DimensionMismatch {
                expected: f.n,
                got: g.n,
            });
        }
        let mut out = f.clone();
        out.scale(a);
        for (set, beta) in g.terms() {
            out.add_unchecked(&set, b * beta);
        }
        out.prune(PRUNE_TOL);
        Ok(out)
    }

    /// In-place `self += b g`.
    pub fn add_assign_scaled(&mut self, g: &Self, b: f64) -> Result<()> {
        if self.n != g.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: g.n,
            });
        }
        for (set, beta) in g.terms() {
            self.add_unchecked(&set, b * beta);
        }
        self.prune(PRUNE_TOL);
        Ok(())
    }

    /// Serialises as `{"n": .., "terms": [{"set": [..], "beta": ..}, ..]}` with
    /// terms in set order and reals at 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = format!("{{\"n\": {}, \"terms\": [", self.n);
        for (pos, (set, beta)) in self.terms().iter().enumerate() {
            if pos > 0 {
                out.push_str(", ");
            }
            let idx: Vec<String> = set.indices().iter().map(|k| k.to_string()).collect();
            out.push_str(&format!(
                "{{\"set\": [{}], \"beta\": {}}}",
                idx.join(", "),
                fmt_real(*beta)
            ));
        }
        out.push_str("]}");
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Term {
            set: Vec<usize>,
            beta: f64,
        }
        #[derive(Deserialize)]
        struct Doc {
            n: usize,
            terms: Vec<Term>,
        }
        let doc: Doc = serde_json::from_str(text)?;
        let mut f = Self::new(doc.n);
        for term in doc.terms {
            let set = InteractionSet::new(term.set)?;
            f.add_term(&set, term.beta)?;
        }
        f.prune(PRUNE_TOL);
        Ok(f)
    }
}

impl PartialEq for PseudoBooleanFunction {
    /// Same `n` and the same node family with identical coefficients.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.terms() == other.terms()
    }
}

/// All `2^m` values of a function of `m` listed variables.
///
/// Entry `mask` holds the value at the assignment where the `k`-th listed
/// variable equals bit `k` of `mask`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseLocalFunction {
    variables: Vec<usize>,
    values: Vec<f64>,
}

impl DenseLocalFunction {
    pub fn new(variables: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        check_table_size(variables.len())?;
        let mut sorted = variables.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(
                "duplicate variable in local table".into(),
            ));
        }
        if values.len() != 1usize << variables.len() {
            return Err(Error::DimensionMismatch {
                expected: 1usize << variables.len(),
                got: values.len(),
            });
        }
        Ok(DenseLocalFunction { variables, values })
    }

    /// Table filled by `value(mask)` for every assignment mask.
    pub fn from_fn(variables: Vec<usize>, value: impl Fn(usize) -> f64) -> Result<Self> {
        check_table_size(variables.len())?;
        let values = (0..1usize << variables.len()).map(value).collect();
        Self::new(variables, values)
    }

    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    /// Interaction coefficients reproducing every table entry (Möbius transform).
    /// The result lives on `n` variables, which must cover every listed index.
    pub fn to_interactions(&self, n: usize) -> Result<PseudoBooleanFunction> {
        if let Some(&k) = self.variables.iter().max() {
            if k >= n {
                return Err(Error::VariableOutOfRange { var: k, n });
            }
        }
        let mut coeffs = self.values.clone();
        mobius(&mut coeffs);
        let sorted = sorted_positions(&self.variables);
        let mut f = PseudoBooleanFunction::new(n);
        for (mask, beta) in coeffs.into_iter().enumerate() {
            if beta.abs() >= PRUNE_TOL {
                f.add_unchecked(&mask_to_set(&self.variables, &sorted, mask), beta);
            }
        }
        Ok(f)
    }

    /// Tabulates `f` over `variables`; `f` may mention no other variable.
    pub fn from_interactions(f: &PseudoBooleanFunction, variables: Vec<usize>) -> Result<Self> {
        check_table_size(variables.len())?;
        let position: HashMap<usize, usize> =
            variables.iter().enumerate().map(|(b, &v)| (v, b)).collect();
        let mut values = vec![0.0; 1usize << variables.len()];
        for (set, beta) in f.terms() {
            let mut mask = 0usize;
            for k in set.indices() {
                match position.get(k) {
                    Some(&b) => mask |= 1 << b,
                    None => return Err(Error::UnlistedVariable(*k)),
                }
            }
            values[mask] += beta;
        }
        subset_sum(&mut values);
        Self::new(variables, values)
    }
}

/// Möbius transform of a value table (see [`DenseLocalFunction::to_interactions`]).
pub fn interactions_from_values(
    table: &DenseLocalFunction,
    n: usize,
) -> Result<PseudoBooleanFunction> {
    table.to_interactions(n)
}

/// Value table of `f` over `variables` (see [`DenseLocalFunction::from_interactions`]).
pub fn values_from_interactions(
    f: &PseudoBooleanFunction,
    variables: Vec<usize>,
) -> Result<DenseLocalFunction> {
    DenseLocalFunction::from_interactions(f, variables)
}

pub(crate) fn check_table_size(m: usize) -> Result<()> {
    if m > TABLE_CAP {
        Err(Error::TableTooLarge { m, cap: TABLE_CAP })
    } else {
        Ok(())
    }
}

/// In place: `v[S] <- sum_{T ⊆ S} v[T]`.
pub(crate) fn subset_sum(v: &mut [f64]) {
    let len = v.len();
    debug_assert!(len.is_power_of_two());
    let mut bit = 1;
    while bit < len {
        for s in 0..len {
            if s & bit != 0 {
                v[s] += v[s ^ bit];
            }
        }
        bit <<= 1;
    }
}

/// In place inverse of [`subset_sum`].
pub(crate) fn mobius(v: &mut [f64]) {
    let len = v.len();
    debug_assert!(len.is_power_of_two());
    let mut bit = 1;
    while bit < len {
        for s in 0..len {
            if s & bit != 0 {
                v[s] -= v[s ^ bit];
            }
        }
        bit <<= 1;
    }
}

/// For unsorted variable lists: the bit positions in increasing-variable order.
fn sorted_positions(vars: &[usize]) -> Vec<usize> {
    let mut pos: Vec<usize> = (0..vars.len()).collect();
    pos.sort_by_key(|&b| vars[b]);
    pos
}

fn mask_to_set(vars: &[usize], sorted: &[usize], mask: usize) -> InteractionSet {
    InteractionSet::from_sorted(
        sorted
            .iter()
            .filter(|&&b| mask >> b & 1 == 1)
            .map(|&b| vars[b])
            .collect(),
    )
}

/// Sorted variable list and coefficient vector for the local part of `terms`
/// (each term stripped of `strip`). Entry `mask` holds the summed coefficient
/// of the stripped monomial with that mask.
pub(crate) fn local_coefficients(
    terms: &[(InteractionSet, f64)],
    strip: &InteractionSet,
) -> Result<(Vec<usize>, Vec<f64>)> {
    let mut vars: Vec<usize> = terms
        .iter()
        .flat_map(|(set, _)| set.indices().iter().copied())
        .filter(|&k| !strip.contains(k))
        .collect();
    vars.sort_unstable();
    vars.dedup();
    check_table_size(vars.len())?;
    let mut coeffs = vec![0.0; 1usize << vars.len()];
    for (set, beta) in terms {
        let mut mask = 0usize;
        for k in set.indices() {
            if !strip.contains(*k) {
                let b = vars.binary_search(k).expect("collected above");
                mask |= 1 << b;
            }
        }
        coeffs[mask] += beta;
    }
    Ok((vars, coeffs))
}

/// Adds the polynomial with Möbius coefficients `coeffs` over sorted `vars`,
/// each monomial extended by `extra`, into `f`. Returns the touched sets.
pub(crate) fn add_local_coefficients(
    f: &mut PseudoBooleanFunction,
    vars: &[usize],
    coeffs: &[f64],
    extra: &InteractionSet,
) -> Vec<InteractionSet> {
    let mut touched = Vec::new();
    for (mask, &beta) in coeffs.iter().enumerate() {
        if beta.abs() < PRUNE_TOL {
            continue;
        }
        let base: SmallVec<[usize; 4]> = vars
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &k)| k)
            .collect();
        let set = InteractionSet::from_sorted(base).union(extra);
        f.add_unchecked(&set, beta);
        touched.push(set);
    }
    touched
}
