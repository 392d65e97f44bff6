//! Binary MRF model families on rectangular lattices.
//!
//! Every builder returns the energy `U(x)` as a pseudo-Boolean polynomial so
//! that `p(x) = exp(U(x)) / c`. Nodes are numbered row-major and all lattices
//! use free boundaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pbf::{mobius, InteractionSet, PseudoBooleanFunction, PRUNE_TOL};

/// Symmetric neighbour lists, one sorted list per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighbourhoodSystem {
    neighbours: Vec<Vec<usize>>,
}

impl NeighbourhoodSystem {
    /// Builds the system from undirected edges. Self-loops are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut neighbours = vec![Vec::new(); n];
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-neighbour at node {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::VariableOutOfRange { var: a.max(b), n });
            }
            neighbours[a].push(b);
            neighbours[b].push(a);
        }
        for list in &mut neighbours {
            list.sort_unstable();
            list.dedup();
        }
        Ok(NeighbourhoodSystem { neighbours })
    }

    pub fn n(&self) -> usize {
        self.neighbours.len()
    }

    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.neighbours[i]
    }

    pub fn are_neighbours(&self, a: usize, b: usize) -> bool {
        self.neighbours[a].binary_search(&b).is_ok()
    }

    /// Every pair in `set` is a pair of neighbours.
    pub fn is_clique(&self, set: &InteractionSet) -> bool {
        let idx = set.indices();
        idx.iter()
            .enumerate()
            .all(|(p, &a)| idx[p + 1..].iter().all(|&b| self.are_neighbours(a, b)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.neighbours.iter().enumerate().all(|(a, list)| {
            list.iter()
                .all(|&b| b != a && self.neighbours[b].binary_search(&a).is_ok())
        })
    }
}

/// A `rows x cols` lattice with row-major node numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub rows: usize,
    pub cols: usize,
}

impl LatticeSpec {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "lattice must be at least 1x1, got {rows}x{cols}"
            )));
        }
        Ok(LatticeSpec { rows, cols })
    }

    pub fn n(&self) -> usize {
        self.rows * self.cols
    }

    pub fn node(&self, r: usize, c: usize) -> usize {
        r * self.cols + c
    }

    /// Horizontal then vertical nearest-neighbour pairs.
    pub fn first_order_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c + 1 < self.cols {
                    pairs.push((self.node(r, c), self.node(r, c + 1)));
                }
                if r + 1 < self.rows {
                    pairs.push((self.node(r, c), self.node(r + 1, c)));
                }
            }
        }
        pairs
    }

    /// All pairs within the given offset predicate (`dr >= 0` half-plane to avoid duplicates).
    fn pairs_within(&self, near: impl Fn(i64, i64) -> bool) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        let (rows, cols) = (self.rows as i64, self.cols as i64);
        for r in 0..rows {
            for c in 0..cols {
                for dr in 0..=2i64 {
                    for dc in -2..=2i64 {
                        if (dr == 0 && dc <= 0) || !near(dr, dc) {
                            continue;
                        }
                        let (r2, c2) = (r + dr, c + dc);
                        if r2 < rows && c2 >= 0 && c2 < cols {
                            pairs.push((
                                self.node(r as usize, c as usize),
                                self.node(r2 as usize, c2 as usize),
                            ));
                        }
                    }
                }
            }
        }
        pairs
    }

    /// Node lists `[TL, TR, BL, BR]` of every 2x2 block.
    pub fn blocks_2x2(&self) -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for r in 0..self.rows.saturating_sub(1) {
            for c in 0..self.cols.saturating_sub(1) {
                out.push([
                    self.node(r, c),
                    self.node(r, c + 1),
                    self.node(r + 1, c),
                    self.node(r + 1, c + 1),
                ]);
            }
        }
        out
    }

    /// Node lists `[centre, up, right, down, left]` of every complete 5-node cross.
    pub fn crosses(&self) -> Vec<[usize; 5]> {
        let mut out = Vec::new();
        for r in 1..self.rows.saturating_sub(1) {
            for c in 1..self.cols.saturating_sub(1) {
                out.push([
                    self.node(r, c),
                    self.node(r - 1, c),
                    self.node(r, c + 1),
                    self.node(r + 1, c),
                    self.node(r, c - 1),
                ]);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    /// `theta * sum_{i~j} I(x_i = x_j)`; one parameter.
    Ising,
    /// Third-order neighbourhood with 2x2 and cross cliques; ten potentials.
    HigherOrder,
    /// `theta * sum_i x_i`; one parameter.
    Independence,
    /// `theta0 * sum I(x_i != x_j) + theta1 * sum I(x_i = x_j = 1)`; two parameters.
    Autologistic,
    /// Rotation-invariant 2x2 cliques; five parameters.
    #[serde(rename = "rotinv2x2")]
    RotInv2x2,
}

impl ModelFamily {
    pub fn param_count(self) -> usize {
        match self {
            ModelFamily::Ising | ModelFamily::Independence => 1,
            ModelFamily::Autologistic => 2,
            ModelFamily::RotInv2x2 => 5,
            ModelFamily::HigherOrder => 10,
        }
    }

    pub fn build(self, lattice: LatticeSpec, params: &[f64]) -> Result<MarkovRandomField> {
        if params.len() != self.param_count() {
            return Err(Error::Config(format!(
                "{self:?} takes {} parameters, got {}",
                self.param_count(),
                params.len()
            )));
        }
        match self {
            ModelFamily::Ising => Ok(build_ising(lattice, params[0])),
            ModelFamily::Independence => Ok(build_independence(lattice, params[0])),
            ModelFamily::Autologistic => Ok(build_autologistic(lattice, params[0], params[1])),
            ModelFamily::RotInv2x2 => {
                let theta: [f64; 5] = params.try_into().expect("length checked");
                build_2x2_rotinv(lattice, &theta)
            }
            ModelFamily::HigherOrder => {
                let pot: [f64; 10] = params.try_into().expect("length checked");
                build_higher_order(lattice, &pot)
            }
        }
    }
}

/// Model description as read from a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub family: ModelFamily,
    pub rows: usize,
    pub cols: usize,
    pub params: Vec<f64>,
}

impl ModelConfig {
    pub fn lattice(&self) -> Result<LatticeSpec> {
        LatticeSpec::new(self.rows, self.cols)
    }

    pub fn build(&self) -> Result<MarkovRandomField> {
        self.family.build(self.lattice()?, &self.params)
    }
}

/// A binary MRF `p(x) ∝ exp(U(x))`.
#[derive(Clone, Debug)]
pub struct MarkovRandomField {
    pub graph: NeighbourhoodSystem,
    pub energy: PseudoBooleanFunction,
    pub family: Option<ModelFamily>,
    pub params: Vec<f64>,
    pub lattice: Option<LatticeSpec>,
}

impl MarkovRandomField {
    /// A model on an arbitrary graph. Every interaction must sit on a clique.
    pub fn new(graph: NeighbourhoodSystem, energy: PseudoBooleanFunction) -> Result<Self> {
        if graph.n() != energy.n() {
            return Err(Error::DimensionMismatch {
                expected: graph.n(),
                got: energy.n(),
            });
        }
        let mrf = MarkovRandomField {
            graph,
            energy,
            family: None,
            params: Vec::new(),
            lattice: None,
        };
        if let Some((set, _)) = mrf.non_clique_interaction() {
            return Err(Error::InvalidArgument(format!(
                "interaction {set} is not a clique of the graph"
            )));
        }
        Ok(mrf)
    }

    pub fn n(&self) -> usize {
        self.energy.n()
    }

    /// `U(x)`.
    pub fn energy_at(&self, x: &[u8]) -> Result<f64> {
        self.energy.evaluate(x)
    }

    /// First non-zero interaction that is not a clique of the graph.
    pub fn non_clique_interaction(&self) -> Option<(InteractionSet, f64)> {
        self.energy
            .terms()
            .into_iter()
            .find(|(set, beta)| *beta != 0.0 && !self.graph.is_clique(set))
    }
}

fn lattice_model(
    lattice: LatticeSpec,
    pairs: Vec<(usize, usize)>,
    energy: PseudoBooleanFunction,
    family: ModelFamily,
    params: Vec<f64>,
) -> MarkovRandomField {
    let graph = NeighbourhoodSystem::from_edges(lattice.n(), pairs).expect("lattice edges are valid");
    MarkovRandomField {
        graph,
        energy,
        family: Some(family),
        params,
        lattice: Some(lattice),
    }
}

/// Ising model; per edge `I(x_i = x_j) = 1 - x_i - x_j + 2 x_i x_j`.
pub fn build_ising(lattice: LatticeSpec, theta: f64) -> MarkovRandomField {
    let pairs = lattice.first_order_pairs();
    let mut energy = PseudoBooleanFunction::new(lattice.n());
    for &(a, b) in &pairs {
        energy.add_unchecked(&InteractionSet::empty(), theta);
        energy.add_unchecked(&InteractionSet::singleton(a), -theta);
        energy.add_unchecked(&InteractionSet::singleton(b), -theta);
        energy.add_unchecked(&InteractionSet::pair(a, b), 2.0 * theta);
    }
    energy.prune(PRUNE_TOL);
    lattice_model(lattice, pairs, energy, ModelFamily::Ising, vec![theta])
}

/// Independent sites, `U(x) = theta sum_i x_i`.
pub fn build_independence(lattice: LatticeSpec, theta: f64) -> MarkovRandomField {
    let mut energy = PseudoBooleanFunction::new(lattice.n());
    for k in 0..lattice.n() {
        energy.add_unchecked(&InteractionSet::singleton(k), theta);
    }
    energy.prune(PRUNE_TOL);
    lattice_model(lattice, Vec::new(), energy, ModelFamily::Independence, vec![theta])
}

/// Autologistic model with equal horizontal and vertical interactions.
pub fn build_autologistic(lattice: LatticeSpec, theta0: f64, theta1: f64) -> MarkovRandomField {
    let pairs = lattice.first_order_pairs();
    let mut energy = PseudoBooleanFunction::new(lattice.n());
    for &(a, b) in &pairs {
        // I(x_a != x_b) = x_a + x_b - 2 x_a x_b and I(x_a = x_b = 1) = x_a x_b.
        energy.add_unchecked(&InteractionSet::singleton(a), theta0);
        energy.add_unchecked(&InteractionSet::singleton(b), theta0);
        energy.add_unchecked(&InteractionSet::pair(a, b), theta1 - 2.0 * theta0);
    }
    energy.prune(PRUNE_TOL);
    lattice_model(
        lattice,
        pairs,
        energy,
        ModelFamily::Autologistic,
        vec![theta0, theta1],
    )
}

/// Higher-order model on the third-order neighbourhood (all nodes within
/// Manhattan distance 2). `pot[0..4]` are the 2x2-block class potentials
/// (uniform, one odd corner, adjacent pair, diagonal pair) and `pot[4..10]`
/// the cross class potentials (uniform, odd centre, one odd arm, two adjacent
/// odd arms, odd centre plus one arm, two opposite odd arms), all invariant
/// under rotation, reflection and colour inversion.
pub fn build_higher_order(lattice: LatticeSpec, pot: &[f64; 10]) -> Result<MarkovRandomField> {
    let tables = ClassTables::get()?;
    let block_coeffs = potential_coefficients(&tables.block_higher_order, &pot[..4]);
    let cross_coeffs = potential_coefficients(&tables.cross, &pot[4..]);
    let mut energy = PseudoBooleanFunction::new(lattice.n());
    for block in lattice.blocks_2x2() {
        add_clique(&mut energy, &block, &block_coeffs);
    }
    for cross in lattice.crosses() {
        add_clique(&mut energy, &cross, &cross_coeffs);
    }
    energy.prune(PRUNE_TOL);
    let pairs = lattice.pairs_within(|dr, dc| dr.abs() + dc.abs() <= 2);
    Ok(lattice_model(
        lattice,
        pairs,
        energy,
        ModelFamily::HigherOrder,
        pot.to_vec(),
    ))
}

/// Rotation-invariant 2x2 model on the 3x3 neighbourhood. The all-zero block
/// has potential 0; `theta[0..5]` belong to one black corner, an adjacent black
/// pair, a diagonal black pair, three black and four black.
pub fn build_2x2_rotinv(lattice: LatticeSpec, theta: &[f64; 5]) -> Result<MarkovRandomField> {
    let tables = ClassTables::get()?;
    let pot = [0.0, theta[0], theta[1], theta[2], theta[3], theta[4]];
    let coeffs = potential_coefficients(&tables.block_rotation, &pot);
    let mut energy = PseudoBooleanFunction::new(lattice.n());
    for block in lattice.blocks_2x2() {
        add_clique(&mut energy, &block, &coeffs);
    }
    energy.prune(PRUNE_TOL);
    let pairs = lattice.pairs_within(|dr, dc| dr.abs() <= 1 && dc.abs() <= 1);
    Ok(lattice_model(
        lattice,
        pairs,
        energy,
        ModelFamily::RotInv2x2,
        theta.to_vec(),
    ))
}

/// Möbius coefficients of the local potential table `mask -> pot[class[mask]]`.
fn potential_coefficients(class: &[usize], pot: &[f64]) -> Vec<f64> {
    let mut values: Vec<f64> = class.iter().map(|&c| pot[c]).collect();
    mobius(&mut values);
    values
}

fn add_clique(energy: &mut PseudoBooleanFunction, nodes: &[usize], coeffs: &[f64]) {
    for (mask, &beta) in coeffs.iter().enumerate() {
        if beta == 0.0 {
            continue;
        }
        let set = InteractionSet::new(
            nodes
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &k)| k),
        )
        .expect("clique nodes are distinct");
        energy.add_unchecked(&set, beta);
    }
}

/// Configuration-class lookup tables, built by orbit enumeration.
#[derive(Debug)]
pub struct ClassTables {
    /// 16 entries, classes 0..4 under rotation, reflection and inversion.
    pub block_higher_order: Vec<usize>,
    /// 32 entries, classes 0..6 under rotation, reflection and inversion.
    pub cross: Vec<usize>,
    /// 16 entries, classes 0..6 under rotation only.
    pub block_rotation: Vec<usize>,
}

impl ClassTables {
    pub fn get() -> Result<&'static ClassTables> {
        use std::sync::OnceLock;
        static TABLES: OnceLock<std::result::Result<ClassTables, String>> = OnceLock::new();
        TABLES
            .get_or_init(|| ClassTables::build().map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::InvalidArgument(e.clone()))
    }

    fn build() -> Result<ClassTables> {
        // Block positions TL, TR, BL, BR as (row, col).
        let block: [(i64, i64); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];
        let block_rot = position_permutation(&block, |(r, c)| (c, 1 - r));
        let block_ref = position_permutation(&block, |(r, c)| (r, 1 - c));
        // Cross positions centre, up, right, down, left.
        let cross: [(i64, i64); 5] = [(0, 0), (-1, 0), (0, 1), (1, 0), (0, -1)];
        let cross_rot = position_permutation(&cross, |(r, c)| (c, -r));
        let cross_ref = position_permutation(&cross, |(r, c)| (r, -c));

        let block_higher_order = orbit_classes(
            4,
            &[block_rot.clone(), block_ref],
            true,
            &[0b0000, 0b0001, 0b0011, 0b1001],
        )?;
        let cross = orbit_classes(
            5,
            &[cross_rot, cross_ref],
            true,
            &[0b00000, 0b00001, 0b00010, 0b00110, 0b00011, 0b01010],
        )?;
        let block_rotation = orbit_classes(
            4,
            &[block_rot],
            false,
            &[0b0000, 0b0001, 0b0011, 0b1001, 0b0111, 0b1111],
        )?;
        Ok(ClassTables {
            block_higher_order,
            cross,
            block_rotation,
        })
    }
}

fn position_permutation(
    positions: &[(i64, i64)],
    map: impl Fn((i64, i64)) -> (i64, i64),
) -> Vec<usize> {
    positions
        .iter()
        .map(|&p| {
            let q = map(p);
            positions
                .iter()
                .position(|&s| s == q)
                .expect("symmetry maps the clique onto itself")
        })
        .collect()
}

/// Class of every configuration mask under the group generated by the
/// position permutations (plus colour inversion when `invert`). Classes are
/// numbered by the order of `representatives`; fails unless the orbits match
/// the representatives one to one.
fn orbit_classes(
    size: usize,
    generators: &[Vec<usize>],
    invert: bool,
    representatives: &[usize],
) -> Result<Vec<usize>> {
    // Close the generators into the full permutation group.
    let identity: Vec<usize> = (0..size).collect();
    let mut group = vec![identity];
    let mut frontier = 0;
    while frontier < group.len() {
        let g = group[frontier].clone();
        frontier += 1;
        for h in generators {
            let composed: Vec<usize> = g.iter().map(|&p| h[p]).collect();
            if !group.contains(&composed) {
                group.push(composed);
            }
        }
    }
    let full = (1usize << size) - 1;
    let apply = |perm: &[usize], mask: usize| -> usize {
        (0..size)
            .filter(|&p| mask >> p & 1 == 1)
            .fold(0, |acc, p| acc | 1 << perm[p])
    };
    let canonical = |mask: usize| -> usize {
        group
            .iter()
            .flat_map(|g| {
                let m = apply(g, mask);
                if invert {
                    vec![m, m ^ full]
                } else {
                    vec![m]
                }
            })
            .min()
            .expect("group is non-empty")
    };
    let rep_canon: Vec<usize> = representatives.iter().map(|&r| canonical(r)).collect();
    let mut distinct = rep_canon.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != representatives.len() {
        return Err(Error::InvalidArgument(
            "configuration class representatives share an orbit".into(),
        ));
    }
    let mut classes = Vec::with_capacity(full + 1);
    for mask in 0..=full {
        let c = canonical(mask);
        match rep_canon.iter().position(|&r| r == c) {
            Some(class) => classes.push(class),
            None => {
                return Err(Error::InvalidArgument(format!(
                    "configuration {mask:#b} belongs to no listed class; orbit count differs from {}",
                    representatives.len()
                )))
            }
        }
    }
    Ok(classes)
}
