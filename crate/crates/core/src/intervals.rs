//! Budney's overlapping-intervals operad, the projection from little 2-cubes,
//! the tree-indexed normalized subspace, and its projection onto normalized
//! cacti.

use crate::cacti::NormalizedCactus;
use crate::error::{Error, Result};
use crate::perm::{linear_extensions, Perm};
use crate::rat::{format_q, parse_q, q, q_one, Q};
use crate::trees::{enumerate_bw_trees, BwTree};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// An oriented affine subinterval of `[-1,1]`, identified with the
/// orientation-preserving affine embedding it is the image of.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Result<Interval> {
        if lo >= hi {
            return Err(Error::invalid("interval needs lo < hi"));
        }
        Ok(Interval { lo, hi })
    }

    pub fn whole() -> Interval {
        Interval { lo: -q_one(), hi: q_one() }
    }

    pub fn length(&self) -> Q {
        &self.hi - &self.lo
    }

    /// Image of `t ∈ [-1,1]` under the associated affine map.
    pub fn apply(&self, t: &Q) -> Q {
        &self.lo + (t + q_one()) * self.length() / q(2, 1)
    }

    pub fn apply_f64(&self, t: f64) -> f64 {
        let lo = crate::rat::to_f64(&self.lo);
        let hi = crate::rat::to_f64(&self.hi);
        lo + (t + 1.0) * (hi - lo) / 2.0
    }

    pub fn inverse_f64(&self, x: f64) -> f64 {
        let lo = crate::rat::to_f64(&self.lo);
        let hi = crate::rat::to_f64(&self.hi);
        -1.0 + 2.0 * (x - lo) / (hi - lo)
    }

    /// Affine composition: the image of `other` under `self`.
    pub fn compose(&self, other: &Interval) -> Interval {
        Interval { lo: self.apply(&other.lo), hi: self.apply(&other.hi) }
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        // interiors intersect
        (if self.lo > other.lo { &self.lo } else { &other.lo })
            < (if self.hi < other.hi { &self.hi } else { &other.hi })
    }
}

/// An equivalence class of overlapping intervals: the intervals plus the
/// height order restricted to overlapping pairs.  `(i, j) ∈ below` means the
/// interiors meet and `i` sits strictly below `j`; exactly one of `(i,j)`,
/// `(j,i)` is recorded per overlapping pair, so derived equality is class
/// equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OvElement {
    intervals: Vec<Interval>,
    below: BTreeSet<(usize, usize)>,
}

impl OvElement {
    /// From intervals and a height order (`sigma(1)` = lowest label).
    pub fn from_heights(intervals: Vec<Interval>, sigma: &Perm) -> Result<OvElement> {
        if sigma.len() != intervals.len() {
            return Err(Error::invalid("height order arity mismatch"));
        }
        let inv = sigma.inverse();
        let mut below = BTreeSet::new();
        for i in 1..=intervals.len() {
            for j in i + 1..=intervals.len() {
                if intervals[i - 1].overlaps(&intervals[j - 1]) {
                    if inv.apply(i) < inv.apply(j) {
                        below.insert((i, j));
                    } else {
                        below.insert((j, i));
                    }
                }
            }
        }
        Ok(OvElement { intervals, below })
    }

    /// From intervals and an explicit order relation; every overlapping pair
    /// must be decided exactly once and the relation must be acyclic.
    pub fn from_order(
        intervals: Vec<Interval>,
        order: BTreeSet<(usize, usize)>,
    ) -> Result<OvElement> {
        let m = intervals.len();
        for &(a, b) in &order {
            if a == 0 || b == 0 || a > m || b > m || a == b {
                return Err(Error::invalid("order pair out of range"));
            }
            if !intervals[a - 1].overlaps(&intervals[b - 1]) {
                return Err(Error::invalid(format!(
                    "order pair ({a},{b}) relates non-overlapping intervals"
                )));
            }
            if order.contains(&(b, a)) {
                return Err(Error::invalid(format!("order decides ({a},{b}) both ways")));
            }
        }
        for i in 1..=m {
            for j in i + 1..=m {
                if intervals[i - 1].overlaps(&intervals[j - 1])
                    && !order.contains(&(i, j))
                    && !order.contains(&(j, i))
                {
                    return Err(Error::invalid(format!(
                        "overlapping pair ({i},{j}) is undecided"
                    )));
                }
            }
        }
        if linear_extensions(m, &order).is_empty() {
            return Err(Error::invalid("height order has a cycle"));
        }
        Ok(OvElement { intervals, below: order })
    }

    pub fn arity(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn interval(&self, i: usize) -> &Interval {
        &self.intervals[i - 1]
    }

    pub fn below(&self) -> &BTreeSet<(usize, usize)> {
        &self.below
    }

    /// The identity of the operad: the whole interval in arity 1.
    pub fn identity() -> OvElement {
        OvElement { intervals: vec![Interval::whole()], below: BTreeSet::new() }
    }

    /// The element tiling the interval by `m` equal touching pieces.
    pub fn star(m: usize) -> OvElement {
        let u = q(2, 1) / q(m as i64, 1);
        let intervals = (0..m)
            .map(|i| Interval {
                lo: -q_one() + &u * q(i as i64, 1),
                hi: -q_one() + &u * q(i as i64 + 1, 1),
            })
            .collect();
        OvElement { intervals, below: BTreeSet::new() }
    }

    /// All height orders representing this class, lex-ordered.
    pub fn representatives(&self) -> Vec<Perm> {
        linear_extensions(self.arity(), &self.below)
    }

    pub fn canonical_sigma(&self) -> Perm {
        self.representatives().into_iter().next().expect("order is acyclic")
    }

    /// Right symmetric action: the interval at slot `i` becomes the old one
    /// at slot `sigma(i)`.
    pub fn sigma_act(&self, sigma: &Perm) -> OvElement {
        let m = self.arity();
        assert_eq!(m, sigma.len());
        let intervals = (1..=m).map(|i| self.intervals[sigma.apply(i) - 1].clone()).collect();
        let inv = sigma.inverse();
        let below = self.below.iter().map(|&(a, b)| (inv.apply(a), inv.apply(b))).collect();
        OvElement { intervals, below }
    }

    /// Full operadic composition.
    pub fn compose_all(&self, inners: &[OvElement]) -> Result<OvElement> {
        let m = self.arity();
        if inners.len() != m {
            return Err(Error::invalid("need one inner element per slot"));
        }
        let sigma = self.canonical_sigma();
        let taus: Vec<Perm> = inners.iter().map(|e| e.canonical_sigma()).collect();
        let ks: Vec<usize> = inners.iter().map(|e| e.arity()).collect();

        let mut intervals = Vec::new();
        for i in 1..=m {
            for jv in inners[i - 1].intervals() {
                intervals.push(self.intervals[i - 1].compose(jv));
            }
        }
        // block heights: the inner heights nest inside the outer ones
        let beta = Perm::direct_sum(&taus).compose(&sigma.block_perm(&ks));
        OvElement::from_heights(intervals, &beta)
    }

    /// Partial composition at slot `i`.
    pub fn compose_at(&self, i: usize, inner: &OvElement) -> Result<OvElement> {
        let m = self.arity();
        if i == 0 || i > m {
            return Err(Error::Range(format!("slot {i} out of 1..={m}")));
        }
        let inners: Vec<OvElement> = (1..=m)
            .map(|j| if j == i { inner.clone() } else { OvElement::identity() })
            .collect();
        self.compose_all(&inners)
    }
}

/// A little 2-cube with exact rational axis intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cube2 {
    pub x: Interval,
    pub y: Interval,
}

impl Cube2 {
    pub fn compose(&self, other: &Cube2) -> Cube2 {
        Cube2 { x: self.x.compose(&other.x), y: self.y.compose(&other.y) }
    }

    pub fn overlaps(&self, other: &Cube2) -> bool {
        self.x.overlaps(&other.x) && self.y.overlaps(&other.y)
    }

    fn y_center(&self) -> Q {
        (&self.y.lo + &self.y.hi) / q(2, 1)
    }
}

/// An element of the little 2-cubes operad: cubes with disjoint interiors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cubes2Element {
    cubes: Vec<Cube2>,
}

impl Cubes2Element {
    pub fn new(cubes: Vec<Cube2>) -> Result<Cubes2Element> {
        for i in 0..cubes.len() {
            for j in i + 1..cubes.len() {
                if cubes[i].overlaps(&cubes[j]) {
                    return Err(Error::invalid(format!(
                        "cubes {} and {} have overlapping interiors",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Cubes2Element { cubes })
    }

    pub fn arity(&self) -> usize {
        self.cubes.len()
    }

    pub fn cubes(&self) -> &[Cube2] {
        &self.cubes
    }

    pub fn identity() -> Cubes2Element {
        Cubes2Element { cubes: vec![Cube2 { x: Interval::whole(), y: Interval::whole() }] }
    }

    pub fn compose_all(&self, inners: &[Cubes2Element]) -> Result<Cubes2Element> {
        if inners.len() != self.arity() {
            return Err(Error::invalid("need one inner element per slot"));
        }
        let mut cubes = Vec::new();
        for (i, inner) in inners.iter().enumerate() {
            for c in &inner.cubes {
                cubes.push(self.cubes[i].compose(c));
            }
        }
        Cubes2Element::new(cubes)
    }

    pub fn compose_at(&self, i: usize, inner: &Cubes2Element) -> Result<Cubes2Element> {
        let m = self.arity();
        if i == 0 || i > m {
            return Err(Error::Range(format!("slot {i} out of 1..={m}")));
        }
        let inners: Vec<Cubes2Element> = (1..=m)
            .map(|j| if j == i { inner.clone() } else { Cubes2Element::identity() })
            .collect();
        self.compose_all(&inners)
    }

    pub fn sigma_act(&self, sigma: &Perm) -> Cubes2Element {
        let m = self.arity();
        Cubes2Element {
            cubes: (1..=m).map(|i| self.cubes[sigma.apply(i) - 1].clone()).collect(),
        }
    }
}

/// First-axis shadows with heights read off the second-axis centers.  Ties in
/// the centers only occur for cubes whose shadows have disjoint interiors, so
/// any tie-break yields the same class.
pub fn cubes_to_ov(c: &Cubes2Element) -> Result<OvElement> {
    let m = c.arity();
    for i in 1..=m {
        for j in i + 1..=m {
            let (a, b) = (&c.cubes[i - 1], &c.cubes[j - 1]);
            if a.x.overlaps(&b.x) && a.y_center() == b.y_center() {
                return Err(Error::invalid(
                    "overlapping shadows with equal heights violate cube disjointness",
                ));
            }
        }
    }
    let mut order: Vec<usize> = (1..=m).collect();
    order.sort_by(|&a, &b| {
        c.cubes[a - 1].y_center().cmp(&c.cubes[b - 1].y_center()).then(a.cmp(&b))
    });
    let sigma = Perm::from_images(order).unwrap();
    let intervals = c.cubes.iter().map(|cb| cb.x.clone()).collect();
    OvElement::from_heights(intervals, &sigma)
}

/// A certificate that an element lies in the normalized subspace: the height
/// order, the indexing tree, and the reconstructed black-vertex intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ov1Witness {
    pub sigma: Perm,
    pub tree: BwTree,
    /// keyed by black vertex id of `tree`
    pub black_intervals: BTreeMap<usize, Interval>,
}

/// The endpoint bounds `(a_i, b_i, c_i, d_i)` cut out for the white vertex
/// labeled `i` by the tree and height order, relative to its parent's
/// interval.
pub fn white_bounds(
    tree: &BwTree,
    sigma: &Perm,
    i: usize,
    parent: &Interval,
) -> Result<(Q, Q, Q, Q)> {
    let m = tree.num_whites();
    let unit = q(2, 1) / q(m as i64, 1);
    let sum = |labels: &[usize]| -> Q {
        labels.iter().map(|&l| q(tree.alpha_label(l).unwrap() as i64, 1)).sum::<Q>()
    };
    let lambda = tree.lambda(i)?;
    let rho = tree.rho(i)?;
    let lambda_plus = tree.lambda_plus(i, sigma)?;
    let rho_plus = tree.rho_plus(i, sigma)?;
    let lam_minus: Vec<usize> =
        lambda.iter().copied().filter(|l| !lambda_plus.contains(l)).collect();
    let rho_minus: Vec<usize> = rho.iter().copied().filter(|l| !rho_plus.contains(l)).collect();
    let a = &parent.lo + &unit * sum(&lam_minus);
    let b = &parent.lo + &unit * sum(&lambda);
    let c = &parent.hi - &unit * sum(&rho);
    let d = &parent.hi - &unit * sum(&rho_minus);
    Ok((a, b, c, d))
}

/// Reconstructs the black intervals from the white ones (leftmost left
/// endpoint and rightmost right endpoint over the whites directly above).
fn reconstruct_blacks(e: &OvElement, tree: &BwTree) -> BTreeMap<usize, Interval> {
    let mut out = BTreeMap::new();
    for v in tree.black_vertices() {
        let kids = tree.children(v);
        if kids.is_empty() {
            continue;
        }
        let lo = kids.iter().map(|&w| &e.interval(tree.label(w)).lo).min().unwrap().clone();
        let hi = kids.iter().map(|&w| &e.interval(tree.label(w)).hi).max().unwrap().clone();
        out.insert(v, Interval { lo, hi });
    }
    out
}

/// Checks the tree-indexed endpoint bounds for a fixed `(sigma, tree)` pair.
pub fn check_membership(e: &OvElement, sigma: &Perm, tree: &BwTree) -> Option<Ov1Witness> {
    let m = e.arity();
    let unit = q(2, 1) / q(m as i64, 1);
    let blacks = reconstruct_blacks(e, tree);
    let root_iv = blacks.get(&tree.root())?;
    if *root_iv != Interval::whole() {
        return None;
    }
    let parent = tree.parent_map();
    for i in 1..=m {
        let w = tree.white_vertex(i).unwrap();
        let p = parent[w].unwrap();
        let piv = blacks.get(&p)?;
        let (a, b, c, d) = white_bounds(tree, sigma, i, piv).ok()?;
        let li = e.interval(i);
        if !(a <= li.lo && li.lo <= b && c <= li.hi && li.hi <= d) {
            return None;
        }
        // black children: exact lengths, containment in the core, ordering
        let kids = tree.children(w);
        let mut prev_hi: Option<Q> = None;
        for &v in kids {
            let iv = blacks.get(&v)?;
            let want = &unit * q(tree.alpha(v) as i64, 1);
            if iv.length() != want {
                return None;
            }
            if iv.lo < b || iv.hi > c {
                return None;
            }
            if let Some(ph) = prev_hi {
                if iv.lo < ph {
                    return None;
                }
            }
            prev_hi = Some(iv.hi.clone());
        }
    }
    Some(Ov1Witness { sigma: sigma.clone(), tree: tree.clone(), black_intervals: blacks })
}

/// Searches height orders (lex order) and compatible trees (by dimension,
/// then key) and returns the first witness; the first tree found indexes the
/// element's cell.
pub fn ov1_membership(e: &OvElement) -> Option<Ov1Witness> {
    let m = e.arity();
    let trees = enumerate_bw_trees(m).ok()?;
    for sigma in e.representatives() {
        for tree in trees.iter().filter(|t| t.is_compatible(&sigma)) {
            if let Some(w) = check_membership(e, &sigma, tree) {
                return Some(w);
            }
        }
    }
    None
}

/// All witnesses over all height orders and compatible trees.
pub fn ov1_all_witnesses(e: &OvElement) -> Vec<Ov1Witness> {
    let m = e.arity();
    let trees = match enumerate_bw_trees(m) {
        Ok(t) => t,
        Err(_) => return Vec::new(),
    };
    let mut out = Vec::new();
    for sigma in e.representatives() {
        for tree in trees.iter().filter(|t| t.is_compatible(&sigma)) {
            if let Some(w) = check_membership(e, &sigma, tree) {
                out.push(w);
            }
        }
    }
    out
}

/// Projects a witnessed element onto its normalized cactus: the gaps between
/// consecutive black intervals inside each white core, rescaled to barycentric
/// arc lengths.
pub fn project_to_cactus(e: &OvElement, w: &Ov1Witness) -> Result<NormalizedCactus> {
    if check_membership(e, &w.sigma, &w.tree).is_none() {
        return Err(Error::invalid("witness does not certify the element"));
    }
    let m = e.arity();
    let scale = q(m as i64, 2);
    let tree = &w.tree;
    let parent = tree.parent_map();
    let mut arcs = Vec::new();
    for i in 1..=m {
        let wv = tree.white_vertex(i).unwrap();
        let p = parent[wv].unwrap();
        let piv = &w.black_intervals[&p];
        let (_, b, c, _) = white_bounds(tree, &w.sigma, i, piv)?;
        let mut tuple = Vec::new();
        let mut cursor = b;
        for &v in tree.children(wv) {
            let iv = &w.black_intervals[&v];
            tuple.push((&iv.lo - &cursor) * &scale);
            cursor = iv.hi.clone();
        }
        tuple.push((&c - &cursor) * &scale);
        arcs.push(tuple);
    }
    NormalizedCactus::new(tree.clone(), arcs)
}

/// Membership and projection in one step.
pub fn p_m(e: &OvElement) -> Option<NormalizedCactus> {
    let w = ov1_membership(e)?;
    project_to_cactus(e, &w).ok()
}

/// JSON wire format for overlapping-interval elements.
#[derive(Serialize, Deserialize)]
pub struct OvJson {
    pub intervals: Vec<[String; 2]>,
    pub order: Vec<[usize; 2]>,
}

impl OvElement {
    pub fn to_json(&self) -> OvJson {
        OvJson {
            intervals: self
                .intervals
                .iter()
                .map(|iv| [format_q(&iv.lo), format_q(&iv.hi)])
                .collect(),
            order: self.below.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    pub fn from_json(j: &OvJson) -> Result<OvElement> {
        let intervals = j
            .intervals
            .iter()
            .map(|[lo, hi]| Interval::new(parse_q(lo)?, parse_q(hi)?))
            .collect::<Result<Vec<_>>>()?;
        let order: BTreeSet<(usize, usize)> = j.order.iter().map(|&[a, b]| (a, b)).collect();
        OvElement::from_order(intervals, order)
    }
}

/// Random generators shared by the verification suites and tests.
pub mod gen {
    use super::*;
    use rand::Rng;

    pub fn rand_q(rng: &mut impl Rng, lo: &Q, hi: &Q, steps: u32) -> Q {
        let k = rng.random_range(0..=steps);
        lo + (hi - lo) * q(k as i64, steps as i64)
    }

    /// Nonnegative rationals with the given sum.
    pub fn rand_splits(rng: &mut impl Rng, total: &Q, parts: usize, steps: u32) -> Vec<Q> {
        if parts == 0 {
            return Vec::new();
        }
        let mut cuts: Vec<u32> = (0..parts - 1).map(|_| rng.random_range(0..=steps)).collect();
        cuts.sort_unstable();
        let mut out = Vec::with_capacity(parts);
        let mut prev = 0u32;
        for c in cuts {
            out.push(total * q((c - prev) as i64, steps as i64));
            prev = c;
        }
        out.push(total * q((steps - prev) as i64, steps as i64));
        out
    }

    /// A random element of the overlapping-intervals space.
    pub fn rand_ov(rng: &mut impl Rng, m: usize) -> OvElement {
        let mut intervals = Vec::new();
        while intervals.len() < m {
            let a = rand_q(rng, &-q_one(), &q_one(), 16);
            let b = rand_q(rng, &-q_one(), &q_one(), 16);
            if a < b {
                intervals.push(Interval { lo: a, hi: b });
            } else if b < a {
                intervals.push(Interval { lo: b, hi: a });
            }
        }
        let sigmas = Perm::all(m);
        let sigma = &sigmas[rng.random_range(0..sigmas.len())];
        OvElement::from_heights(intervals, sigma).unwrap()
    }

    /// A random element of the normalized subspace, sampled by walking a
    /// random compatible `(sigma, tree)` pair top-down through its bounds.
    pub fn rand_ov1(rng: &mut impl Rng, m: usize) -> OvElement {
        let trees = enumerate_bw_trees(m).unwrap();
        let tree = &trees[rng.random_range(0..trees.len())];
        let sigmas = tree.compatible_sigmas();
        let sigma = &sigmas[rng.random_range(0..sigmas.len())];
        let unit = q(2, 1) / q(m as i64, 1);

        fn place(
            tree: &BwTree,
            sigma: &Perm,
            unit: &Q,
            parent_iv: Interval,
            white: usize,
            intervals: &mut Vec<Option<Interval>>,
            rng: &mut impl Rng,
        ) {
            let i = tree.label(white);
            let (a, b, c, d) = white_bounds(tree, sigma, i, &parent_iv).unwrap();
            let lo = rand_q(rng, &a, &b, 8);
            let hi = rand_q(rng, &c, &d, 8);
            intervals[i - 1] = Some(Interval { lo, hi });
            // black children: exact lengths, random gaps inside [b, c]
            let kids = tree.children(white);
            let lengths: Vec<Q> =
                kids.iter().map(|&v| unit * q(tree.alpha(v) as i64, 1)).collect();
            let slack = &c - &b - lengths.iter().sum::<Q>();
            let gaps = rand_splits(rng, &slack, kids.len() + 1, 8);
            let mut cursor = b;
            for (idx, &v) in kids.iter().enumerate() {
                cursor += &gaps[idx];
                let iv = Interval { lo: cursor.clone(), hi: &cursor + &lengths[idx] };
                cursor = iv.hi.clone();
                for &u in tree.children(v) {
                    place(tree, sigma, unit, iv.clone(), u, intervals, rng);
                }
            }
        }

        let mut intervals: Vec<Option<Interval>> = vec![None; m];
        for &u in tree.children(tree.root()) {
            place(tree, sigma, &unit, Interval::whole(), u, &mut intervals, rng);
        }
        let intervals: Vec<Interval> = intervals.into_iter().map(|x| x.unwrap()).collect();
        OvElement::from_heights(intervals, sigma).unwrap()
    }

    /// A random little-2-cubes element built by operadic nesting, so the
    /// disjointness invariant holds by construction.
    pub fn rand_cubes(rng: &mut impl Rng, m: usize) -> Cubes2Element {
        fn shrink(rng: &mut impl Rng) -> Interval {
            // a positive-length random subinterval of [-1,1]
            loop {
                let s = rand_splits(rng, &q(2, 1), 3, 8);
                if s[1] > crate::rat::q_zero() {
                    return Interval { lo: -q_one() + &s[0], hi: q_one() - &s[2] };
                }
            }
        }
        // split the square into m horizontal bands, then shrink a random
        // cube inside each band
        let mut bands;
        loop {
            bands = rand_splits(rng, &q(2, 1), m, 16);
            if bands.iter().all(|b| b > &crate::rat::q_zero()) {
                break;
            }
        }
        let mut cubes = Vec::new();
        let mut ylo = -q_one();
        for band in bands {
            let yhi = &ylo + &band;
            let outer =
                Cube2 { x: Interval::whole(), y: Interval { lo: ylo.clone(), hi: yhi.clone() } };
            cubes.push(outer.compose(&Cube2 { x: shrink(rng), y: shrink(rng) }));
            ylo = yhi;
        }
        let mut perm_idx: Vec<usize> = (1..=m).collect();
        for i in (1..m).rev() {
            let j = rng.random_range(0..=i);
            perm_idx.swap(i, j);
        }
        let sigma = Perm::from_images(perm_idx).unwrap();
        Cubes2Element::new(cubes).unwrap().sigma_act(&sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn iv(lo: i64, lo_d: i64, hi: i64, hi_d: i64) -> Interval {
        Interval { lo: q(lo, lo_d), hi: q(hi, hi_d) }
    }

    #[test]
    fn class_equality_ignores_heights_of_disjoint_pairs() {
        let ivs = vec![iv(-1, 1, 0, 1), iv(0, 1, 1, 1)];
        let a = OvElement::from_heights(ivs.clone(), &Perm::identity(2)).unwrap();
        let b = OvElement::from_heights(ivs, &Perm::from_images(vec![2, 1]).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn class_equality_sees_heights_of_overlapping_pairs() {
        let ivs = vec![iv(-1, 1, 1, 1), iv(-1, 1, 1, 1)];
        let a = OvElement::from_heights(ivs.clone(), &Perm::identity(2)).unwrap();
        let b = OvElement::from_heights(ivs, &Perm::from_images(vec![2, 1]).unwrap()).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn same_height_criterion() {
        // swapping the heights of a pair changes nothing iff the interiors
        // are disjoint
        let touching = vec![iv(-1, 1, 0, 1), iv(0, 1, 1, 1)];
        let overlapping = vec![iv(-1, 1, 1, 4), iv(-1, 4, 1, 1)];
        let swap = Perm::from_images(vec![2, 1]).unwrap();
        for (ivs, same) in [(touching, true), (overlapping, false)] {
            let a = OvElement::from_heights(ivs.clone(), &Perm::identity(2)).unwrap();
            let b = OvElement::from_heights(ivs, &swap).unwrap();
            assert_eq!(a == b, same);
        }
    }

    #[test]
    fn unit_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let e = gen::rand_ov(&mut rng, 3);
            let ids = vec![OvElement::identity(); 3];
            assert_eq!(e.compose_all(&ids).unwrap(), e);
            assert_eq!(OvElement::identity().compose_at(1, &e).unwrap(), e);
        }
    }

    #[test]
    fn composition_matches_numeric_height_oracle() {
        // oracle: give block i the height sigma^{-1}(i) and offset the inner
        // heights fractionally inside the block, then sort numerically
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let outer = gen::rand_ov(&mut rng, 3);
            let inners: Vec<OvElement> = (0..3).map(|_| gen::rand_ov(&mut rng, 2)).collect();
            let got = outer.compose_all(&inners).unwrap();

            let sigma = outer.canonical_sigma();
            let sinv = sigma.inverse();
            let mut keyed: Vec<(Q, usize)> = Vec::new();
            let mut intervals = Vec::new();
            let mut slot = 0usize;
            for i in 1..=3usize {
                let tau = inners[i - 1].canonical_sigma();
                let tinv = tau.inverse();
                for j in 1..=inners[i - 1].arity() {
                    slot += 1;
                    let h = q(sinv.apply(i) as i64, 1)
                        + q(tinv.apply(j) as i64, (inners[i - 1].arity() + 1) as i64);
                    keyed.push((h, slot));
                    intervals.push(outer.interval(i).compose(inners[i - 1].interval(j)));
                }
            }
            keyed.sort();
            let heights =
                Perm::from_images(keyed.into_iter().map(|(_, s)| s).collect()).unwrap();
            let expect = OvElement::from_heights(intervals, &heights).unwrap();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn composition_is_representative_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let outer = gen::rand_ov(&mut rng, 3);
            let inner = gen::rand_ov(&mut rng, 2);
            let mut results = BTreeSet::new();
            for sigma in outer.representatives() {
                let o2 = OvElement::from_heights(outer.intervals().to_vec(), &sigma).unwrap();
                assert_eq!(o2, outer);
                results.insert(format!("{:?}", o2.compose_at(2, &inner).unwrap()));
            }
            assert_eq!(results.len(), 1);
        }
    }

    #[test]
    fn cubes_projection_examples() {
        // stacked full-width cubes: both shadows are the whole interval,
        // lower cube below upper
        let stacked = Cubes2Element::new(vec![
            Cube2 { x: Interval::whole(), y: iv(-1, 1, 0, 1) },
            Cube2 { x: Interval::whole(), y: iv(0, 1, 1, 1) },
        ])
        .unwrap();
        let e = cubes_to_ov(&stacked).unwrap();
        assert_eq!(e.interval(1), &Interval::whole());
        assert!(e.below().contains(&(1, 2)));

        // side by side: disjoint shadows, empty order
        let side = Cubes2Element::new(vec![
            Cube2 { x: iv(-1, 1, 0, 1), y: Interval::whole() },
            Cube2 { x: iv(0, 1, 1, 1), y: Interval::whole() },
        ])
        .unwrap();
        let e = cubes_to_ov(&side).unwrap();
        assert!(e.below().is_empty());
    }

    #[test]
    fn cubes_projection_is_an_operad_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let outer = gen::rand_cubes(&mut rng, 3);
            let inners: Vec<Cubes2Element> =
                (0..3).map(|_| gen::rand_cubes(&mut rng, 2)).collect();
            let lhs = cubes_to_ov(&outer.compose_all(&inners).unwrap()).unwrap();
            let rhs = cubes_to_ov(&outer)
                .unwrap()
                .compose_all(
                    &inners.iter().map(|c| cubes_to_ov(c).unwrap()).collect::<Vec<_>>(),
                )
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn star_is_accepted_with_corolla_witness() {
        for m in 1..=4usize {
            let w = ov1_membership(&OvElement::star(m)).expect("tiling element is normalized");
            assert_eq!(w.tree.dim(), 0);
            assert_eq!(&w.tree, NormalizedCactus::star(m).tree());
            let c = project_to_cactus(&OvElement::star(m), &w).unwrap();
            assert_eq!(c, NormalizedCactus::star(m));
        }
    }

    #[test]
    fn normalized_subspace_is_not_closed_under_composition() {
        let a = OvElement::from_heights(
            vec![Interval::whole(), iv(-1, 2, 1, 2)],
            &Perm::identity(2),
        )
        .unwrap();
        let b = OvElement::star(2);
        assert!(ov1_membership(&a).is_some());
        assert!(ov1_membership(&b).is_some());
        let c = a.compose_at(1, &b).unwrap();
        assert!(ov1_membership(&c).is_none());
    }

    #[test]
    fn membership_is_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let e = gen::rand_ov1(&mut rng, 3);
            assert!(ov1_membership(&e).is_some());
            for sigma in Perm::all(3) {
                assert!(ov1_membership(&e.sigma_act(&sigma)).is_some());
            }
        }
        // and a non-member stays a non-member
        let a = OvElement::from_heights(
            vec![Interval::whole(), iv(-1, 2, 1, 2)],
            &Perm::identity(2),
        )
        .unwrap();
        let c = a.compose_at(1, &OvElement::star(2)).unwrap();
        for sigma in Perm::all(3) {
            assert!(ov1_membership(&c.sigma_act(&sigma)).is_none());
        }
    }

    #[test]
    fn witness_reconstruction_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..10 {
            let e = gen::rand_ov1(&mut rng, 3);
            for w in ov1_all_witnesses(&e) {
                for v in w.tree.black_vertices() {
                    let kids = w.tree.children(v);
                    if kids.is_empty() {
                        continue;
                    }
                    let lo =
                        kids.iter().map(|&u| &e.interval(w.tree.label(u)).lo).min().unwrap();
                    let hi =
                        kids.iter().map(|&u| &e.interval(w.tree.label(u)).hi).max().unwrap();
                    assert_eq!(&w.black_intervals[&v].lo, lo);
                    assert_eq!(&w.black_intervals[&v].hi, hi);
                }
            }
        }
    }

    #[test]
    fn projection_is_witness_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..25 {
            let e = gen::rand_ov1(&mut rng, 3);
            let all = ov1_all_witnesses(&e);
            assert!(!all.is_empty());
            let cacti: BTreeSet<String> = all
                .iter()
                .map(|w| format!("{:?}", project_to_cactus(&e, w).unwrap()))
                .collect();
            assert_eq!(cacti.len(), 1, "projection must not depend on the witness");
        }
    }

    #[test]
    fn ov_json_round_trip_and_rejection() {
        let e = OvElement::star(3);
        let j = e.to_json();
        let back = OvElement::from_json(&j).unwrap();
        assert_eq!(e, back);

        // a cyclic order must be rejected
        let bad = OvJson {
            intervals: vec![
                ["-1".into(), "1".into()],
                ["-1".into(), "1".into()],
                ["-1".into(), "1".into()],
            ],
            order: vec![[1, 2], [2, 3], [3, 1]],
        };
        assert!(OvElement::from_json(&bad).is_err());
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn arb_interval() -> impl Strategy<Value = Interval> {
        (0i64..64, 1i64..64).prop_map(|(a, w)| {
            let lo = q(a, 32) - q_one();
            let hi = (&lo + q(w, 32)).min(q_one());
            let hi = if hi > lo { hi } else { &lo + q(1, 64) };
            Interval { lo, hi }
        })
    }

    proptest! {
        #[test]
        fn affine_composition_is_associative(
            a in arb_interval(), b in arb_interval(), c in arb_interval()
        ) {
            prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        }

        #[test]
        fn the_whole_interval_is_a_two_sided_unit(a in arb_interval()) {
            prop_assert_eq!(Interval::whole().compose(&a), a.clone());
            prop_assert_eq!(a.compose(&Interval::whole()), a);
        }

        #[test]
        fn overlap_is_symmetric_and_detects_sharing(
            a in arb_interval(), b in arb_interval()
        ) {
            prop_assert_eq!(a.overlaps(&b), b.overlaps(&a));
            if a.overlaps(&b) {
                // a shared interior point exists
                let lo = if a.lo > b.lo { &a.lo } else { &b.lo };
                let hi = if a.hi < b.hi { &a.hi } else { &b.hi };
                let mid = (lo + hi) / q(2, 1);
                prop_assert!(a.lo < mid && mid < a.hi);
                prop_assert!(b.lo < mid && mid < b.hi);
            }
        }
    }
}

#[cfg(test)]
mod preimage_tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_element_has_a_cube_preimage() {
        // stack cubes at integer heights read off any linear extension
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..25 {
            let m = 3;
            let e = gen::rand_ov(&mut rng, m);
            let sigma = e.canonical_sigma();
            let inv = sigma.inverse();
            let band = q(2, m as i64);
            let cubes: Vec<Cube2> = (1..=m)
                .map(|i| {
                    let h = inv.apply(i) as i64; // 1-based height
                    let ylo = -q_one() + &band * q(h - 1, 1);
                    Cube2 {
                        x: e.interval(i).clone(),
                        y: Interval { lo: ylo.clone(), hi: ylo + &band },
                    }
                })
                .collect();
            let c = Cubes2Element::new(cubes).expect("stacked cubes are disjoint");
            assert_eq!(cubes_to_ov(&c).unwrap(), e);
        }
    }
}
