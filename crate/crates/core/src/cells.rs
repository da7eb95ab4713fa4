//! Cell complexes: the tree-indexed CW structure on normalized cacti, chain
//! complexes with Betti numbers over GF(2) and the rationals, and the cubical
//! fiber complexes of the projection from normalized overlapping intervals.

use crate::cacti::NormalizedCactus;
use crate::error::{Error, Result};
use crate::intervals::Interval;
use crate::perm::Perm;
use crate::rat::{q, q_one, Q};
use crate::trees::{enumerate_bw_trees, BwTree};
use num_traits::Zero;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// A finite regular cell complex given by its boundary incidences.
#[derive(Clone, Debug)]
pub struct CellComplex {
    pub cells: Vec<Cell>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub id: usize,
    pub dim: usize,
    /// faces with odd incidence (for regular complexes: incidence 1)
    pub faces: Vec<usize>,
    /// signed incidences when an orientation has been fixed
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signed_faces: Option<Vec<(usize, i64)>>,
    pub meta: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Field {
    F2,
    Qq,
}

impl CellComplex {
    pub fn cell_counts(&self) -> Vec<usize> {
        let top = self.cells.iter().map(|c| c.dim).max().unwrap_or(0);
        let mut counts = vec![0usize; top + 1];
        for c in &self.cells {
            counts[c.dim] += 1;
        }
        counts
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().map(|c| if c.dim % 2 == 0 { 1i64 } else { -1i64 }).sum()
    }

    /// Checks facial dimensions and that the boundary squares to zero.
    pub fn validate(&self) -> Result<()> {
        for c in &self.cells {
            for &f in &c.faces {
                if self.cells[f].dim + 1 != c.dim {
                    return Err(Error::InvalidComplex(format!(
                        "cell {} has a face of the wrong dimension",
                        c.id
                    )));
                }
            }
            if let Some(sf) = &c.signed_faces {
                for &(f, s) in sf {
                    if self.cells[f].dim + 1 != c.dim || s == 0 {
                        return Err(Error::InvalidComplex(format!(
                            "cell {} has a bad signed face",
                            c.id
                        )));
                    }
                }
            }
        }
        for c in &self.cells {
            let mut count: HashMap<usize, usize> = HashMap::new();
            for &f in &c.faces {
                for &g in &self.cells[f].faces {
                    *count.entry(g).or_insert(0) += 1;
                }
            }
            if count.values().any(|&k| k % 2 != 0) {
                return Err(Error::InvalidComplex(format!(
                    "mod-2 boundary does not square to zero at cell {}",
                    c.id
                )));
            }
            if let Some(sf) = &c.signed_faces {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for &(f, s) in sf {
                    let inner = self.cells[f]
                        .signed_faces
                        .as_ref()
                        .ok_or_else(|| Error::InvalidComplex("missing orientation".into()))?;
                    for &(g, t) in inner {
                        *acc.entry(g).or_insert(0) += s * t;
                    }
                }
                if acc.values().any(|&k| k != 0) {
                    return Err(Error::InvalidComplex(format!(
                        "signed boundary does not square to zero at cell {}",
                        c.id
                    )));
                }
            }
        }
        Ok(())
    }

    fn by_dim(&self) -> Vec<Vec<usize>> {
        let top = self.cells.iter().map(|c| c.dim).max().unwrap_or(0);
        let mut out = vec![Vec::new(); top + 1];
        for c in &self.cells {
            out[c.dim].push(c.id);
        }
        out
    }

    /// Betti numbers from boundary ranks.
    pub fn betti(&self, field: Field) -> Result<Vec<usize>> {
        self.validate()?;
        let by_dim = self.by_dim();
        let top = by_dim.len() - 1;
        let mut pos = vec![0usize; self.cells.len()];
        for ids in &by_dim {
            for (k, &id) in ids.iter().enumerate() {
                pos[id] = k;
            }
        }
        let mut ranks = vec![0usize; top + 2]; // ranks[d] = rank of C_d -> C_{d-1}
        for d in 1..=top {
            let rows = by_dim[d - 1].len();
            match field {
                Field::F2 => {
                    let cols: Vec<BTreeSet<usize>> = by_dim[d]
                        .iter()
                        .map(|&id| self.cells[id].faces.iter().map(|&f| pos[f]).collect())
                        .collect();
                    ranks[d] = rank_f2(cols);
                }
                Field::Qq => {
                    let cols: Vec<Vec<(usize, Q)>> = by_dim[d]
                        .iter()
                        .map(|&id| {
                            self.cells[id]
                                .signed_faces
                                .as_ref()
                                .ok_or_else(|| {
                                    Error::InvalidComplex(
                                        "rational Betti numbers need an orientation".into(),
                                    )
                                })
                                .map(|sf| {
                                    sf.iter().map(|&(f, s)| (pos[f], q(s, 1))).collect()
                                })
                        })
                        .collect::<Result<_>>()?;
                    ranks[d] = rank_q(cols, rows);
                }
            }
        }
        Ok((0..=top).map(|d| by_dim[d].len() - ranks[d] - ranks[d + 1]).collect())
    }

    /// Nonempty, connected, and acyclic in positive degrees over GF(2).
    pub fn reduced_homology_vanishes(&self) -> Result<bool> {
        let b = self.betti(Field::F2)?;
        Ok(b.first() == Some(&1) && b.iter().skip(1).all(|&x| x == 0))
    }
}

/// Column-reduction rank over GF(2); columns are sets of row indices.
fn rank_f2(mut cols: Vec<BTreeSet<usize>>) -> usize {
    let mut pivot_owner: HashMap<usize, usize> = HashMap::new();
    let mut rank = 0usize;
    for j in 0..cols.len() {
        loop {
            let Some(&p) = cols[j].iter().next_back() else { break };
            match pivot_owner.get(&p) {
                None => {
                    pivot_owner.insert(p, j);
                    rank += 1;
                    break;
                }
                Some(&k) => {
                    let other = cols[k].clone();
                    let mine = std::mem::take(&mut cols[j]);
                    cols[j] = mine.symmetric_difference(&other).copied().collect();
                }
            }
        }
    }
    rank
}

/// Exact rational rank by Gaussian elimination.
fn rank_q(cols: Vec<Vec<(usize, Q)>>, rows: usize) -> usize {
    let mut dense: Vec<Vec<Q>> = cols
        .into_iter()
        .map(|col| {
            let mut v = vec![Q::from_integer(0.into()); rows];
            for (r, x) in col {
                v[r] = x;
            }
            v
        })
        .collect();
    let ncols = dense.len();
    let mut rank = 0usize;
    let mut used_rows: Vec<bool> = vec![false; rows];
    for j in 0..ncols {
        let Some(p) = (0..rows).find(|&r| !used_rows[r] && !dense[j][r].is_zero()) else {
            continue;
        };
        used_rows[p] = true;
        rank += 1;
        let pivot = dense[j][p].clone();
        for k in j + 1..ncols {
            if !dense[k][p].is_zero() {
                let factor = &dense[k][p] / &pivot;
                for r in 0..rows {
                    let sub = &dense[j][r] * &factor;
                    dense[k][r] = &dense[k][r] - sub;
                }
            }
        }
    }
    rank
}

/// The CW complex on the space of normalized cacti of arity `m`: one cell per
/// tree, glued along angle collapses.  Orientations come from the product of
/// simplices in label order with the alternating coface sign.
pub fn cact1_complex(m: usize) -> Result<CellComplex> {
    let trees = enumerate_bw_trees(m)?;
    let mut index: HashMap<String, usize> = HashMap::new();
    for (id, t) in trees.iter().enumerate() {
        index.insert(t.key(), id);
    }
    let mut cells = Vec::new();
    for (id, t) in trees.iter().enumerate() {
        let mut signed: BTreeMap<usize, i64> = BTreeMap::new();
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for (w, angle, t2) in t.all_collapses() {
            let pre: usize = (1..w).map(|l| t.arity(t.white_vertex(l).unwrap())).sum();
            let sign = if (pre + angle) % 2 == 0 { 1i64 } else { -1i64 };
            let fid = index[&t2.key()];
            *signed.entry(fid).or_insert(0) += sign;
            *counts.entry(fid).or_insert(0) += 1;
        }
        let faces: Vec<usize> =
            counts.iter().filter(|&(_, &k)| k % 2 == 1).map(|(&f, _)| f).collect();
        let signed_faces: Vec<(usize, i64)> =
            signed.into_iter().filter(|&(_, s)| s != 0).collect();
        cells.push(Cell { id, dim: t.dim(), faces, signed_faces: Some(signed_faces), meta: t.key() });
    }
    Ok(CellComplex { cells })
}

/// The trees indexing the cells of `cact1_complex(m)`, in cell-id order.
pub fn cact1_trees(m: usize) -> Result<Vec<BwTree>> {
    enumerate_bw_trees(m)
}

/// An interior sample of the open cell of a tree: all arcs equal.
pub fn cactus_in_cell(tree: &BwTree) -> NormalizedCactus {
    let m = tree.num_whites();
    let mut arcs = Vec::new();
    for l in 1..=m {
        let k = tree.arity(tree.white_vertex(l).unwrap()) + 1;
        arcs.push(vec![q_one() / q(k as i64, 1); k]);
    }
    NormalizedCactus::new(tree.clone(), arcs).unwrap()
}

// ---------------------------------------------------------------------------
// fiber complexes of the projection onto cacti
// ---------------------------------------------------------------------------

/// Lattice assignment of one endpoint coordinate, in units of `|I|/m`
/// relative to the enclosing black interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum CoordAssign {
    Int(i64),
    Open(i64),
}

/// Value of `Y_left - X_right` on a diagonal pair sharing a lattice unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Rel {
    Lt,
    Eq,
    Gt,
}

/// A cell of the fiber: coordinates `(X_1, Y_1, .., X_m, Y_m)`, diagonal
/// relations for sibling pairs in a shared unit, and the height order on the
/// sibling pairs that overlap somewhere on the closed cell.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct FiberCell {
    coords: Vec<CoordAssign>,
    rels: Vec<((usize, usize), Rel)>,
    order: Vec<((usize, usize), bool)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct SibPair {
    left: usize,
    right: usize,
}

pub struct FiberComplex {
    pub complex: CellComplex,
    /// one signature per compatible height order: the endpoint box together
    /// with the order on the pairs that can overlap inside it
    pub piece_signatures: Vec<(Perm, String)>,
}

fn x_of(label: usize) -> usize {
    2 * (label - 1)
}

fn y_of(label: usize) -> usize {
    2 * (label - 1) + 1
}

fn pair_overlaps(
    coords: &[CoordAssign],
    rels: &BTreeMap<(usize, usize), Rel>,
    p: SibPair,
) -> bool {
    let yi = coords[y_of(p.left)];
    let xj = coords[x_of(p.right)];
    match (yi, xj) {
        (CoordAssign::Int(a), CoordAssign::Int(b)) => a > b,
        (CoordAssign::Open(a), CoordAssign::Int(b)) => b <= a,
        (CoordAssign::Int(a), CoordAssign::Open(b)) => a >= b + 1,
        (CoordAssign::Open(a), CoordAssign::Open(b)) => {
            if a == b {
                matches!(rels.get(&(p.left, p.right)), Some(Rel::Gt))
            } else {
                a > b
            }
        }
    }
}

/// Union-find classes of equal open coordinates plus the strict edges between
/// them; `None` if the relations are contradictory.
fn class_structure(
    coords: &[CoordAssign],
    rels: &BTreeMap<(usize, usize), Rel>,
) -> Option<(Vec<usize>, BTreeSet<(usize, usize)>)> {
    let n = coords.len();
    let mut rep: Vec<usize> = (0..n).collect();
    fn find(rep: &mut Vec<usize>, a: usize) -> usize {
        let mut a = a;
        while rep[a] != a {
            rep[a] = rep[rep[a]];
            a = rep[a];
        }
        a
    }
    for (&(i, j), &r) in rels {
        if r == Rel::Eq {
            let a = find(&mut rep, y_of(i));
            let b = find(&mut rep, x_of(j));
            rep[a] = b;
        }
    }
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (&(i, j), &r) in rels {
        let a = find(&mut rep, y_of(i));
        let b = find(&mut rep, x_of(j));
        match r {
            Rel::Lt => {
                if a == b {
                    return None;
                }
                edges.insert((a, b));
            }
            Rel::Gt => {
                if a == b {
                    return None;
                }
                edges.insert((b, a));
            }
            Rel::Eq => {}
        }
    }
    // cycle check on the class digraph
    let nodes: BTreeSet<usize> = (0..n)
        .filter(|&c| matches!(coords[c], CoordAssign::Open(_)))
        .map(|c| find(&mut rep, c))
        .collect();
    let mut indeg: BTreeMap<usize, usize> = nodes.iter().map(|&v| (v, 0)).collect();
    for &(a, b) in &edges {
        if a == b {
            return None;
        }
        *indeg.get_mut(&b)? += 1;
    }
    let mut queue: Vec<usize> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
    let mut seen = 0usize;
    let mut indeg = indeg;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &(a, b) in &edges {
            if a == v {
                let d = indeg.get_mut(&b).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push(b);
                }
            }
        }
    }
    if seen != nodes.len() {
        return None;
    }
    let reps: Vec<usize> = (0..n).map(|c| find(&mut rep, c)).collect();
    Some((reps, edges))
}

fn cell_dim(cell: &FiberCell) -> usize {
    let rels: BTreeMap<(usize, usize), Rel> = cell.rels.iter().cloned().collect();
    let (reps, _) = class_structure(&cell.coords, &rels).expect("stored cells are consistent");
    let classes: BTreeSet<usize> = (0..cell.coords.len())
        .filter(|&c| matches!(cell.coords[c], CoordAssign::Open(_)))
        .map(|c| reps[c])
        .collect();
    classes.len()
}

/// All codimension-one faces of a fiber cell.
fn fiber_faces(cell: &FiberCell, pairs: &[SibPair]) -> Vec<FiberCell> {
    let rels: BTreeMap<(usize, usize), Rel> = cell.rels.iter().cloned().collect();
    let order: BTreeMap<(usize, usize), bool> = cell.order.iter().cloned().collect();
    let (reps, edges) = class_structure(&cell.coords, &rels).expect("consistent cell");
    let n = cell.coords.len();
    let open: Vec<usize> =
        (0..n).filter(|&c| matches!(cell.coords[c], CoordAssign::Open(_))).collect();
    let classes: BTreeSet<usize> = open.iter().map(|&c| reps[c]).collect();

    let restrict_order = |coords: &[CoordAssign],
                          new_rels: &BTreeMap<(usize, usize), Rel>|
     -> Vec<((usize, usize), bool)> {
        pairs
            .iter()
            .filter(|&&p| pair_overlaps(coords, new_rels, p))
            .map(|&p| {
                let key = (p.left, p.right);
                (key, *order.get(&key).expect("face overlap implies parent overlap"))
            })
            .collect()
    };

    let mut out: Vec<FiberCell> = Vec::new();

    // collapse one class to one of its unit endpoints
    for &cl in &classes {
        let members: Vec<usize> = open.iter().copied().filter(|&c| reps[c] == cl).collect();
        let k = match cell.coords[members[0]] {
            CoordAssign::Open(k) => k,
            CoordAssign::Int(_) => unreachable!(),
        };
        let has_pred = edges.iter().any(|&(_, b)| b == cl);
        let has_succ = edges.iter().any(|&(a, _)| a == cl);
        for (target, blocked) in [(k, has_pred), (k + 1, has_succ)] {
            if blocked {
                continue;
            }
            let mut coords = cell.coords.clone();
            for &c in &members {
                coords[c] = CoordAssign::Int(target);
            }
            let new_rels: BTreeMap<(usize, usize), Rel> = rels
                .iter()
                .filter(|((i, j), _)| {
                    reps[y_of(*i)] != cl && reps[x_of(*j)] != cl
                })
                .map(|(&k2, &v)| (k2, v))
                .collect();
            let order = restrict_order(&coords, &new_rels);
            out.push(FiberCell {
                coords,
                rels: new_rels.into_iter().collect(),
                order,
            });
        }
    }

    // merge two adjacent classes along a strict edge
    for &(a, b) in &edges {
        let mut new_rels = rels.clone();
        for (&(i, j), r) in new_rels.iter_mut() {
            let ca = reps[y_of(i)];
            let cb = reps[x_of(j)];
            if (ca == a && cb == b) || (ca == b && cb == a) {
                *r = Rel::Eq;
            }
        }
        if class_structure(&cell.coords, &new_rels).is_none() {
            continue; // a longer chain separates the two classes
        }
        let order = restrict_order(&cell.coords, &new_rels);
        out.push(FiberCell {
            coords: cell.coords.clone(),
            rels: new_rels.into_iter().collect(),
            order,
        });
    }

    out
}

/// Builds the fiber of the projection over a cactus as a regular cell
/// complex: the union over compatible height orders of the endpoint boxes,
/// subdivided along the sibling diagonals and glued along agreement of the
/// order on overlapping pairs.
pub fn fiber_complex(cactus: &NormalizedCactus) -> Result<FiberComplex> {
    let tree = cactus.tree();
    let m = cactus.arity();
    let parent = tree.parent_map();

    // sibling pairs: whites sharing a black parent, in planar order
    let mut pairs: Vec<SibPair> = Vec::new();
    for v in tree.black_vertices() {
        let kids = tree.children(v);
        for a in 0..kids.len() {
            for b in a + 1..kids.len() {
                pairs.push(SibPair { left: tree.label(kids[a]), right: tree.label(kids[b]) });
            }
        }
    }

    let alpha_of_parent = |label: usize| -> i64 {
        let w = tree.white_vertex(label).unwrap();
        tree.alpha(parent[w].unwrap()) as i64
    };
    let sum_alpha = |labels: &[usize]| -> i64 {
        labels.iter().map(|&l| tree.alpha_label(l).unwrap() as i64).sum()
    };

    let sigmas = tree.compatible_sigmas();
    let mut cells_map: BTreeMap<FiberCell, usize> = BTreeMap::new();
    let mut piece_signatures = Vec::new();

    for sigma in &sigmas {
        let inv = sigma.inverse();
        // integer box ranges per coordinate
        let mut lo = vec![0i64; 2 * m];
        let mut hi = vec![0i64; 2 * m];
        for i in 1..=m {
            let lam = sum_alpha(&tree.lambda(i)?);
            let lam_p = sum_alpha(&tree.lambda_plus(i, sigma)?);
            let rho = sum_alpha(&tree.rho(i)?);
            let rho_p = sum_alpha(&tree.rho_plus(i, sigma)?);
            let av = alpha_of_parent(i);
            lo[x_of(i)] = lam - lam_p;
            hi[x_of(i)] = lam;
            lo[y_of(i)] = av - rho;
            hi[y_of(i)] = av - rho + rho_p;
        }

        // piece signature: the box plus the order on pairs that can overlap
        // somewhere inside it
        let mut sig = format!("{:?}|{:?}|", lo, hi);
        for p in &pairs {
            if hi[y_of(p.left)] > lo[x_of(p.right)] {
                let below = inv.apply(p.left) < inv.apply(p.right);
                sig.push_str(&format!("({},{},{}),", p.left, p.right, below));
            }
        }
        piece_signatures.push((sigma.clone(), sig));

        // enumerate every cell of the subdivided box
        let mut coords = vec![CoordAssign::Int(0); 2 * m];
        enumerate_cells(
            0,
            &lo,
            &hi,
            &mut coords,
            &pairs,
            &inv,
            &mut cells_map,
        );
    }

    // assign ids by canonical order, then wire up faces
    let keyed: Vec<FiberCell> = cells_map.keys().cloned().collect();
    let ids: BTreeMap<FiberCell, usize> =
        keyed.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let mut cells = Vec::new();
    for (id, fc) in keyed.iter().enumerate() {
        let dim = cell_dim(fc);
        let mut faces = Vec::new();
        if dim > 0 {
            for f in fiber_faces(fc, &pairs) {
                let fid = *ids
                    .get(&f)
                    .ok_or_else(|| Error::InvalidComplex("face escaped the complex".into()))?;
                faces.push(fid);
            }
            faces.sort_unstable();
            let before = faces.len();
            faces.dedup();
            if faces.len() != before {
                return Err(Error::InvalidComplex("duplicate face of a fiber cell".into()));
            }
        }
        cells.push(Cell { id, dim, faces, signed_faces: None, meta: format!("{fc:?}") });
    }
    Ok(FiberComplex { complex: CellComplex { cells }, piece_signatures })
}

fn enumerate_cells(
    c: usize,
    lo: &[i64],
    hi: &[i64],
    coords: &mut Vec<CoordAssign>,
    pairs: &[SibPair],
    inv: &Perm,
    out: &mut BTreeMap<FiberCell, usize>,
) {
    let n = lo.len();
    if c == n {
        // active diagonal pairs: both open in the same unit
        let active: Vec<SibPair> = pairs
            .iter()
            .copied()
            .filter(|p| {
                matches!(
                    (coords[y_of(p.left)], coords[x_of(p.right)]),
                    (CoordAssign::Open(a), CoordAssign::Open(b)) if a == b
                )
            })
            .collect();
        let mut rels: BTreeMap<(usize, usize), Rel> = BTreeMap::new();
        assign_rels(0, &active, coords, pairs, inv, &mut rels, out);
        return;
    }
    for k in lo[c]..=hi[c] {
        coords[c] = CoordAssign::Int(k);
        enumerate_cells(c + 1, lo, hi, coords, pairs, inv, out);
    }
    for k in lo[c]..hi[c] {
        coords[c] = CoordAssign::Open(k);
        enumerate_cells(c + 1, lo, hi, coords, pairs, inv, out);
    }
    coords[c] = CoordAssign::Int(lo[c]);
}

fn assign_rels(
    idx: usize,
    active: &[SibPair],
    coords: &Vec<CoordAssign>,
    pairs: &[SibPair],
    inv: &Perm,
    rels: &mut BTreeMap<(usize, usize), Rel>,
    out: &mut BTreeMap<FiberCell, usize>,
) {
    if idx == active.len() {
        if class_structure(coords, rels).is_none() {
            return;
        }
        let order: Vec<((usize, usize), bool)> = pairs
            .iter()
            .filter(|&&p| pair_overlaps(coords, rels, p))
            .map(|&p| ((p.left, p.right), inv.apply(p.left) < inv.apply(p.right)))
            .collect();
        let cell = FiberCell {
            coords: coords.clone(),
            rels: rels.iter().map(|(&k, &v)| (k, v)).collect(),
            order,
        };
        let next = out.len();
        out.entry(cell).or_insert(next);
        return;
    }
    let p = active[idx];
    for r in [Rel::Lt, Rel::Eq, Rel::Gt] {
        rels.insert((p.left, p.right), r);
        assign_rels(idx + 1, active, coords, pairs, inv, rels, out);
    }
    rels.remove(&(p.left, p.right));
}

/// Pieces of the fiber that coincide as subsets: groups of height orders with
/// equal signatures.
pub fn coincident_pieces(f: &FiberComplex) -> Vec<Vec<Perm>> {
    let mut groups: BTreeMap<&String, Vec<Perm>> = BTreeMap::new();
    for (s, sig) in &f.piece_signatures {
        groups.entry(sig).or_default().push(s.clone());
    }
    groups.into_values().filter(|g| g.len() > 1).collect()
}

/// Interval data reconstructed for the black vertices of a cactus; used by
/// callers that need the fiber in absolute coordinates.
pub fn black_intervals_of_cactus(c: &NormalizedCactus) -> Result<BTreeMap<usize, Interval>> {
    let tree = c.tree();
    let m = c.arity();
    let unit = q(2, 1) / q(m as i64, 1);
    let parent = tree.parent_map();
    let mut blacks: BTreeMap<usize, Interval> = BTreeMap::new();
    blacks.insert(tree.root(), Interval::whole());
    // preorder guarantees parents come first
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        if tree.is_white(v) {
            let l = tree.label(v);
            let p = parent[v].unwrap();
            let piv = blacks[&p].clone();
            let lam: i64 = tree.lambda(l)?.iter().map(|&u| tree.alpha_label(u).unwrap() as i64).sum();
            let b = &piv.lo + &unit * q(lam, 1);
            let mut cursor = b;
            for (j, &bk) in tree.children(v).iter().enumerate() {
                cursor += &unit * &c.arcs(l)[j];
                let len = &unit * q(tree.alpha(bk) as i64, 1);
                let iv = Interval { lo: cursor.clone(), hi: &cursor + &len };
                cursor = iv.hi.clone();
                blacks.insert(bk, iv);
            }
        }
        for &u in tree.children(v) {
            stack.push(u);
        }
    }
    Ok(blacks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cacti::NormalizedCactus;

    #[test]
    fn point_and_circle() {
        let c1 = cact1_complex(1).unwrap();
        assert_eq!(c1.cell_counts(), vec![1]);
        assert_eq!(c1.betti(Field::F2).unwrap(), vec![1]);

        let c2 = cact1_complex(2).unwrap();
        assert_eq!(c2.cell_counts(), vec![2, 2]);
        assert_eq!(c2.betti(Field::F2).unwrap(), vec![1, 1]);
        assert_eq!(c2.betti(Field::Qq).unwrap(), vec![1, 1]);
    }

    #[test]
    fn betti_numbers_match_the_braid_oracle() {
        // oracle: coefficients of (1+t)(1+2t)... expanded by hand
        let c3 = cact1_complex(3).unwrap();
        assert_eq!(c3.betti(Field::F2).unwrap(), vec![1, 3, 2]);
        assert_eq!(c3.betti(Field::Qq).unwrap(), vec![1, 3, 2]);
    }

    #[test]
    fn euler_characteristic_vanishes() {
        for m in 2..=4usize {
            let c = cact1_complex(m).unwrap();
            assert_eq!(c.euler_characteristic(), 0, "arity {m}");
        }
    }

    #[test]
    fn boundaries_square_to_zero_and_are_regular() {
        for m in 1..=4usize {
            let c = cact1_complex(m).unwrap();
            c.validate().unwrap();
            for cell in &c.cells {
                if let Some(sf) = &cell.signed_faces {
                    for &(_, s) in sf {
                        assert!(s.abs() == 1, "incidence exceeds one in arity {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn symmetric_action_permutes_cells_freely() {
        for m in 2..=4usize {
            let trees = cact1_trees(m).unwrap();
            for sigma in Perm::all(m) {
                if sigma.is_identity() {
                    continue;
                }
                for t in &trees {
                    assert_ne!(t.sigma_act(&sigma), *t, "fixed cell in arity {m}");
                }
            }
        }
    }

    #[test]
    fn fiber_over_single_lobe_is_a_point() {
        let c = NormalizedCactus::star(1);
        let f = fiber_complex(&c).unwrap();
        assert_eq!(f.complex.cell_counts(), vec![1]);
        assert!(f.complex.reduced_homology_vanishes().unwrap());
    }

    #[test]
    fn fiber_over_two_lobe_corolla_is_an_interval() {
        let c = NormalizedCactus::star(2);
        let f = fiber_complex(&c).unwrap();
        f.complex.validate().unwrap();
        assert_eq!(f.complex.cell_counts(), vec![3, 2]);
        assert!(f.complex.reduced_homology_vanishes().unwrap());
    }

    #[test]
    fn fiber_over_interior_of_an_edge_cell_is_a_point() {
        // the one-dimensional cells of arity 2 have unique height orders, so
        // their fibers are single points
        for t in cact1_trees(2).unwrap() {
            if t.dim() == 1 {
                let c = cactus_in_cell(&t);
                let f = fiber_complex(&c).unwrap();
                assert_eq!(f.complex.cell_counts(), vec![1]);
            }
        }
    }

    #[test]
    fn total_cells_of_the_normalized_interval_space_in_arity_two() {
        // product structure: cells over a cactus cell are (cell x fiber cell)
        let trees = cact1_trees(2).unwrap();
        let mut vertices = 0usize;
        let mut edges = 0usize;
        for t in &trees {
            let f = fiber_complex(&cactus_in_cell(t)).unwrap();
            let counts = f.complex.cell_counts();
            let fv = counts.first().copied().unwrap_or(0);
            let fe = counts.get(1).copied().unwrap_or(0);
            if t.dim() == 0 {
                vertices += fv;
                edges += fe;
            } else {
                edges += fv; // edge x fiber-vertex
            }
        }
        assert_eq!(vertices, 6);
        assert_eq!(edges, 6);
    }

    #[test]
    fn fiber_over_three_lobe_corolla_matches_the_known_picture() {
        let c = NormalizedCactus::star(3);
        let f = fiber_complex(&c).unwrap();
        f.complex.validate().unwrap();
        assert!(f.complex.reduced_homology_vanishes().unwrap());
        // exactly one coinciding pair of pieces: the two orders that agree
        // wherever their boxes allow an overlap
        let groups = coincident_pieces(&f);
        assert_eq!(groups.len(), 1);
        let g = &groups[0];
        assert_eq!(g.len(), 2);
        let imgs: BTreeSet<&[usize]> = g.iter().map(|p| p.images()).collect();
        let expect: BTreeSet<&[usize]> =
            [&[2usize, 1, 3][..], &[2usize, 3, 1][..]].into_iter().collect();
        assert_eq!(imgs, expect);
    }

    #[test]
    fn all_fibers_in_arity_three_are_acyclic() {
        for t in cact1_trees(3).unwrap() {
            let f = fiber_complex(&cactus_in_cell(&t)).unwrap();
            f.complex.validate().unwrap();
            assert!(
                f.complex.reduced_homology_vanishes().unwrap(),
                "fiber over cell {} is not acyclic",
                t.key()
            );
        }
    }
}

#[cfg(test)]
mod arity_four_tests {
    use super::*;

    #[test]
    fn betti_in_arity_four() {
        // oracle: (1+t)(1+2t)(1+3t) = 1 + 6t + 11t^2 + 6t^3, expanded by hand
        let c = cact1_complex(4).unwrap();
        assert_eq!(c.cell_counts().iter().sum::<usize>(), 528);
        assert_eq!(c.betti(Field::F2).unwrap(), vec![1, 6, 11, 6]);
        assert_eq!(c.betti(Field::Qq).unwrap(), vec![1, 6, 11, 6]);
    }

    #[test]
    fn all_fibers_in_arity_four_are_acyclic() {
        for t in cact1_trees(4).unwrap() {
            let f = fiber_complex(&cactus_in_cell(&t)).unwrap();
            assert!(
                f.complex.reduced_homology_vanishes().unwrap(),
                "fiber over cell {} is not acyclic",
                t.key()
            );
        }
    }
}
