//! Spineless cacti in three flavors (normalized, arbitrary lengths,
//! projective), their arc-list and coendomorphism descriptions, the symmetric
//! action, and operadic insertion implemented by arc-list splicing.

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::pl::PlMap;
use crate::rat::{q_one, q_zero, Q};
use crate::trees::{BwTree, BwTreeJson, PlantedTree};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A normalized spineless cactus: every lobe has length 1.  Stored as its
/// minimal-cell b/w tree together with barycentric arc lengths per lobe
/// (`arity + 1` nonnegative rationals summing to 1).  Canonical form has no
/// zero arc at a positive-arity angle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalizedCactus {
    tree: BwTree,
    /// `arcs[l-1]` are the arc lengths of the lobe labeled `l`.
    arcs: Vec<Vec<Q>>,
}

impl NormalizedCactus {
    pub fn new(tree: BwTree, arcs: Vec<Vec<Q>>) -> Result<NormalizedCactus> {
        let m = tree.num_whites();
        if m == 0 {
            return Err(Error::EmptyArity("cacti need at least one lobe".into()));
        }
        if arcs.len() != m {
            return Err(Error::invalid("need one arc tuple per lobe"));
        }
        for l in 1..=m {
            let v = tree.white_vertex(l).unwrap();
            let t = &arcs[l - 1];
            if t.len() != tree.arity(v) + 1 {
                return Err(Error::invalid(format!("lobe {l}: need arity+1 arcs")));
            }
            if t.iter().any(|x| x < &q_zero()) {
                return Err(Error::invalid(format!("lobe {l}: negative arc")));
            }
            let total: Q = t.iter().sum();
            if total != q_one() {
                return Err(Error::invalid(format!("lobe {l}: arcs must sum to 1")));
            }
        }
        let mut c = NormalizedCactus { tree, arcs };
        c.canonicalize()?;
        Ok(c)
    }

    /// Collapses angles whose arc length is zero until the cell is minimal.
    fn canonicalize(&mut self) -> Result<()> {
        loop {
            let mut hit = None;
            'outer: for l in 1..=self.arcs.len() {
                let v = self.tree.white_vertex(l).unwrap();
                if self.tree.arity(v) == 0 {
                    continue;
                }
                for (i, a) in self.arcs[l - 1].iter().enumerate() {
                    if a.is_zero() {
                        hit = Some((l, i));
                        break 'outer;
                    }
                }
            }
            match hit {
                None => return Ok(()),
                Some((l, i)) => {
                    self.tree = self.tree.angle_collapse(l, i)?;
                    self.arcs[l - 1].remove(i);
                }
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arcs.len()
    }

    pub fn tree(&self) -> &BwTree {
        &self.tree
    }

    pub fn arcs(&self, label: usize) -> &[Q] {
        &self.arcs[label - 1]
    }

    /// The unique normalized corolla cactus with lobes `1..=m` left to right.
    pub fn star(m: usize) -> NormalizedCactus {
        let mut children = vec![Vec::new(); m + 1];
        children[0] = (1..=m).collect();
        let mut label = vec![0usize];
        label.extend(1..=m);
        let tree = BwTree::new(PlantedTree { root: 0, children }, label).unwrap();
        NormalizedCactus::new(tree, vec![vec![q_one()]; m]).unwrap()
    }

    pub fn with_lengths(self, lengths: Vec<Q>) -> Result<Cactus> {
        Cactus::new(self, lengths)
    }

    pub fn sigma_act(&self, sigma: &Perm) -> NormalizedCactus {
        let inv = sigma.inverse();
        let m = self.arity();
        let tree = self.tree.sigma_act(sigma);
        let mut arcs = vec![Vec::new(); m];
        for l in 1..=m {
            arcs[inv.apply(l) - 1] = self.arcs[l - 1].clone();
        }
        NormalizedCactus { tree, arcs }
    }

    /// Insertion in the normalized flavor: the inserted cactus keeps unit
    /// lobes, so the result is normalized but composition is not associative.
    pub fn compose(&self, i: usize, other: &NormalizedCactus) -> Result<NormalizedCactus> {
        let a = Cactus::unit_lengths(self.clone());
        let b = Cactus::unit_lengths(other.clone());
        // do not rescale: cut positions on lobe i stretch by the full
        // perimeter of the inserted cactus
        let spliced = splice(&a, i, &b, &q_one())?;
        for len in &spliced.lengths {
            debug_assert_eq!(len, &q_one());
        }
        Ok(spliced.shape)
    }
}

/// A spineless cactus with arbitrary positive lobe lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cactus {
    pub shape: NormalizedCactus,
    /// `lengths[l-1]` is the length of the lobe labeled `l`.
    pub lengths: Vec<Q>,
}

impl Cactus {
    pub fn new(shape: NormalizedCactus, lengths: Vec<Q>) -> Result<Cactus> {
        if lengths.len() != shape.arity() {
            return Err(Error::invalid("need one length per lobe"));
        }
        if lengths.iter().any(|x| x <= &q_zero()) {
            return Err(Error::invalid("lobe lengths must be positive"));
        }
        Ok(Cactus { shape, lengths })
    }

    pub fn unit_lengths(shape: NormalizedCactus) -> Cactus {
        let m = shape.arity();
        Cactus { shape, lengths: vec![q_one(); m] }
    }

    pub fn arity(&self) -> usize {
        self.shape.arity()
    }

    pub fn perimeter(&self) -> Q {
        self.lengths.iter().sum()
    }

    pub fn sigma_act(&self, sigma: &Perm) -> Cactus {
        let inv = sigma.inverse();
        let m = self.arity();
        let mut lengths = vec![q_zero(); m];
        for l in 1..=m {
            lengths[inv.apply(l) - 1] = self.lengths[l - 1].clone();
        }
        Cactus { shape: self.shape.sigma_act(sigma), lengths }
    }

    /// Operadic insertion: `other` is rescaled to the length of lobe `i`.
    pub fn compose(&self, i: usize, other: &Cactus) -> Result<Cactus> {
        if other.arity() == 0 {
            return Err(Error::EmptyArity("cannot insert an empty cactus".into()));
        }
        let len_i = &self.lengths[i - 1];
        let scale = len_i / other.perimeter();
        splice(self, i, other, &scale)
    }
}

/// A projective spineless cactus: lobe lengths are positive and sum to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectiveCactus(Cactus);

impl ProjectiveCactus {
    pub fn new(shape: NormalizedCactus, lobe_lengths: Vec<Q>) -> Result<ProjectiveCactus> {
        let c = Cactus::new(shape, lobe_lengths)?;
        Ok(ProjectiveCactus::from_cactus(c))
    }

    /// Rescales total length to 1.
    pub fn from_cactus(c: Cactus) -> ProjectiveCactus {
        let total = c.perimeter();
        let lengths = c.lengths.iter().map(|x| x / &total).collect();
        ProjectiveCactus(Cactus { shape: c.shape, lengths })
    }

    /// The image of a normalized cactus: all lobes get length `1/m`.
    pub fn from_normalized(shape: NormalizedCactus) -> ProjectiveCactus {
        ProjectiveCactus::from_cactus(Cactus::unit_lengths(shape))
    }

    pub fn shape(&self) -> &NormalizedCactus {
        &self.0.shape
    }

    pub fn lobe_lengths(&self) -> &[Q] {
        &self.0.lengths
    }

    pub fn as_cactus(&self) -> &Cactus {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.arity()
    }

    pub fn underlying_tree(&self) -> &BwTree {
        self.0.shape.tree()
    }

    pub fn sigma_act(&self, sigma: &Perm) -> ProjectiveCactus {
        ProjectiveCactus(self.0.sigma_act(sigma))
    }

    pub fn compose(&self, i: usize, other: &ProjectiveCactus) -> Result<ProjectiveCactus> {
        Ok(ProjectiveCactus::from_cactus(self.0.compose(i, &other.0)?))
    }

    pub fn to_arclist(&self) -> ArcList {
        to_arclist(&self.0)
    }

    pub fn local_root(&self, label: usize) -> Q {
        local_root(&self.0, label)
    }

    pub fn rho(&self, label: usize) -> PlMap {
        rho_map(&self.0, label)
    }

    pub fn coend_eval(&self, s: &Q) -> Vec<Q> {
        coend_eval(&self.0, s)
    }
}

/// Partition-of-the-circle description: labeled arcs from the global root,
/// clockwise, lengths summing to the perimeter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcList {
    pub arcs: Vec<(usize, Q)>,
}

impl ArcList {
    pub fn perimeter(&self) -> Q {
        self.arcs.iter().map(|(_, x)| x).sum()
    }

    /// Drops zero arcs and merges adjacent arcs with equal labels.
    pub fn canonical(mut self) -> ArcList {
        let mut out: Vec<(usize, Q)> = Vec::new();
        for (l, x) in self.arcs.drain(..) {
            if x.is_zero() {
                continue;
            }
            match out.last_mut() {
                Some((pl, px)) if *pl == l => *px += x,
                _ => out.push((l, x)),
            }
        }
        ArcList { arcs: out }
    }

    /// Labels in order of first appearance must be `1..=m` as a set and no
    /// label may recur after closing; this rules out `(i,j,i,j)` patterns.
    pub fn validate(&self) -> Result<usize> {
        let mut open: Vec<usize> = Vec::new();
        let mut closed: Vec<usize> = Vec::new();
        for (l, x) in &self.arcs {
            if x < &q_zero() {
                return Err(Error::invalid("negative arc length"));
            }
            if open.last() == Some(l) {
                continue;
            }
            if let Some(pos) = open.iter().position(|o| o == l) {
                // returning to an enclosing lobe: everything above it closes
                for o in open.drain(pos + 1..) {
                    closed.push(o);
                }
            } else if closed.contains(l) {
                return Err(Error::NotACactus(format!(
                    "label {l} reappears after closing (an (i,j,i,j) interleaving)"
                )));
            } else {
                open.push(*l);
            }
        }
        closed.extend(open.drain(..));
        let m = closed.len();
        let mut seen = vec![false; m + 1];
        for l in closed {
            if l == 0 || l > m || seen[l] {
                return Err(Error::NotACactus("labels must be exactly 1..m".into()));
            }
            seen[l] = true;
        }
        Ok(m)
    }
}

/// Traverses the perimeter, emitting labeled arcs in canonical form.
pub fn to_arclist(c: &Cactus) -> ArcList {
    let tree = c.shape.tree();
    let mut arcs = Vec::new();
    fn visit(c: &Cactus, v: usize, arcs: &mut Vec<(usize, Q)>) {
        let tree = c.shape.tree();
        let l = tree.label(v);
        let len = &c.lengths[l - 1];
        let t = c.shape.arcs(l);
        arcs.push((l, &t[0] * len));
        for (j, &b) in tree.children(v).iter().enumerate() {
            for &u in tree.children(b) {
                visit(c, u, arcs);
            }
            arcs.push((l, &t[j + 1] * len));
        }
    }
    for &u in tree.children(tree.root()) {
        visit(c, u, &mut arcs);
    }
    ArcList { arcs }.canonical()
}

/// Rebuilds the canonical cactus from an arc list.
pub fn from_arclist(list: &ArcList) -> Result<Cactus> {
    let list = list.clone().canonical();
    let m = list.validate()?;
    if m == 0 {
        return Err(Error::EmptyArity("empty arc list".into()));
    }

    struct Open {
        label: usize,
        finished: Vec<Q>,
        cur: Q,
        /// groups of child subtrees; `groups[k]` sits between `finished[k]`
        /// and the next arc
        groups: Vec<Vec<usize>>,
        group_open: bool,
    }

    // tree under construction
    let mut children: Vec<Vec<usize>> = vec![Vec::new()]; // vertex 0 = root black
    let mut label: Vec<usize> = vec![0];
    let mut arcs_by_label: BTreeMap<usize, Vec<Q>> = BTreeMap::new();
    let mut lengths_by_label: BTreeMap<usize, Q> = BTreeMap::new();
    let mut white_vertex: BTreeMap<usize, usize> = BTreeMap::new();

    let mut stack: Vec<Open> = Vec::new();

    fn close(
        top: Open,
        children: &mut Vec<Vec<usize>>,
        label: &mut Vec<usize>,
        arcs_by_label: &mut BTreeMap<usize, Vec<Q>>,
        lengths_by_label: &mut BTreeMap<usize, Q>,
        white_vertex: &mut BTreeMap<usize, usize>,
    ) {
        let mut finished = top.finished;
        finished.push(top.cur);
        let total: Q = finished.iter().sum();
        let normalized: Vec<Q> = finished.iter().map(|x| x / &total).collect();
        // build the white vertex with one black child per group
        let w = children.len();
        children.push(Vec::new());
        label.push(top.label);
        for group in &top.groups {
            let b = children.len();
            children.push(group.clone());
            label.push(0);
            children[w].push(b);
        }
        arcs_by_label.insert(top.label, normalized);
        lengths_by_label.insert(top.label, total);
        white_vertex.insert(top.label, w);
    }

    for (l, x) in &list.arcs {
        if stack.last().map(|o| o.label) == Some(*l) {
            let top = stack.last_mut().unwrap();
            top.cur += x;
            top.group_open = false;
            continue;
        }
        if let Some(pos) = stack.iter().position(|o| o.label == *l) {
            // close everything above, attaching each to the lobe below it
            while stack.len() > pos + 1 {
                let top = stack.pop().unwrap();
                let closed_label = top.label;
                close(
                    top,
                    &mut children,
                    &mut label,
                    &mut arcs_by_label,
                    &mut lengths_by_label,
                    &mut white_vertex,
                );
                let wv = white_vertex[&closed_label];
                let parent = stack.last_mut().unwrap();
                if parent.group_open {
                    parent.groups.last_mut().unwrap().push(wv);
                } else {
                    parent.finished.push(std::mem::replace(&mut parent.cur, q_zero()));
                    parent.groups.push(vec![wv]);
                    parent.group_open = true;
                }
            }
            let top = stack.last_mut().unwrap();
            top.cur += x;
            top.group_open = false;
        } else {
            stack.push(Open {
                label: *l,
                finished: Vec::new(),
                cur: x.clone(),
                groups: Vec::new(),
                group_open: false,
            });
        }
    }
    // close the remaining lobes; they attach below, the last ones to the root
    while let Some(top) = stack.pop() {
        let lbl = top.label;
        close(
            top,
            &mut children,
            &mut label,
            &mut arcs_by_label,
            &mut lengths_by_label,
            &mut white_vertex,
        );
        let wv = white_vertex[&lbl];
        match stack.last_mut() {
            Some(parent) => {
                if parent.group_open {
                    parent.groups.last_mut().unwrap().push(wv);
                } else {
                    parent.finished.push(std::mem::replace(&mut parent.cur, q_zero()));
                    parent.groups.push(vec![wv]);
                    parent.group_open = true;
                }
            }
            None => children[0].push(wv),
        }
    }

    let tree = BwTree::new(PlantedTree { root: 0, children }, label)?;
    let arcs: Vec<Vec<Q>> = (1..=m).map(|l| arcs_by_label[&l].clone()).collect();
    let lengths: Vec<Q> = (1..=m).map(|l| lengths_by_label[&l].clone()).collect();
    let shape = NormalizedCactus::new(tree, arcs)?;
    Cactus::new(shape, lengths)
}

/// Splices `b` into lobe `i` of `a`.  `b`'s arc lengths are multiplied by
/// `scale`; the attachment positions along lobe `i` advance through the
/// scaled circuit at rate `total_b * scale / len_i` per unit of lobe `i`.
fn splice(a: &Cactus, i: usize, b: &Cactus, scale: &Q) -> Result<Cactus> {
    let m = a.arity();
    if i == 0 || i > m {
        return Err(Error::Range(format!("lobe index {i} out of 1..={m}")));
    }
    let k = b.arity();
    let la = to_arclist(a);
    let lb = to_arclist(b);
    let len_i = &a.lengths[i - 1];
    let rate = b.perimeter() * scale / len_i;

    let relabel_a = |l: usize| if l < i { l } else { l + k - 1 };
    let relabel_b = |l: usize| i - 1 + l;

    let mut out: Vec<(usize, Q)> = Vec::new();
    let mut cursor = 0usize; // index into lb.arcs
    let mut cursor_used = q_zero(); // consumed length of the current b arc (scaled units)
    for (l, x) in &la.arcs {
        if *l != i {
            out.push((relabel_a(*l), x.clone()));
            continue;
        }
        // consume x * rate of b's scaled circuit; totals match exactly, so
        // the cursor never overruns
        let mut need = x * &rate;
        while need > q_zero() {
            assert!(cursor < lb.arcs.len(), "splice cursor overran the inserted circuit");
            let (bl, bx) = &lb.arcs[cursor];
            let avail = bx * scale - &cursor_used;
            if avail <= need {
                if avail > q_zero() {
                    out.push((relabel_b(*bl), avail.clone()));
                }
                need -= avail;
                cursor += 1;
                cursor_used = q_zero();
            } else {
                out.push((relabel_b(*bl), need.clone()));
                cursor_used += &need;
                need = q_zero();
            }
        }
    }
    from_arclist(&ArcList { arcs: out })
}

pub fn compose_normalized(
    a: &NormalizedCactus,
    i: usize,
    b: &NormalizedCactus,
) -> Result<NormalizedCactus> {
    a.compose(i, b)
}

/// Position of the first occurrence of lobe `label` along the perimeter.
pub fn local_root(c: &Cactus, label: usize) -> Q {
    let list = to_arclist(c);
    let mut pos = q_zero();
    for (l, x) in &list.arcs {
        if *l == label {
            return pos;
        }
        pos += x;
    }
    pos
}

/// The lobe-collapse map for lobe `label` as a piecewise-linear map of
/// `[-1,1]`, after scaling the perimeter to the interval.
pub fn rho_map(c: &Cactus, label: usize) -> PlMap {
    let list = to_arclist(c);
    let per = c.perimeter();
    let len = &c.lengths[label - 1];
    let two = Q::from_integer(2.into());
    let minus_one = -q_one();
    let mut breaks: Vec<(Q, Q)> = Vec::new();
    let mut pos = q_zero();
    let mut dist = q_zero();
    breaks.push((minus_one.clone(), minus_one.clone()));
    for (l, x) in &list.arcs {
        pos += x;
        if *l == label {
            dist += x;
        }
        let bx = &minus_one + &two * &pos / &per;
        let by = &minus_one + &two * &dist / len;
        if breaks.last().map(|p| &p.0) != Some(&bx) {
            breaks.push((bx, by));
        }
    }
    PlMap::new(breaks)
}

/// Evaluates the coendomorphism map at perimeter time `s ∈ [0, perimeter)`:
/// the `i`-th output is the fraction of lobe `i` traversed so far.
pub fn coend_eval(c: &Cactus, s: &Q) -> Vec<Q> {
    let list = to_arclist(c);
    let m = c.arity();
    let mut out = vec![q_zero(); m];
    let mut pos = q_zero();
    for (l, x) in &list.arcs {
        let next = &pos + x;
        let covered = if s >= &next {
            x.clone()
        } else if s > &pos {
            s - &pos
        } else {
            q_zero()
        };
        out[*l - 1] += &covered / &c.lengths[*l - 1];
        pos = next;
    }
    out
}

/// JSON wire format shared by all three cactus flavors.
#[derive(Serialize, Deserialize)]
pub struct CactusJson {
    pub tree: BwTreeJson,
    /// arcs per lobe label (string key), each `"p/q"`
    pub arcs: BTreeMap<String, Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lobe_lengths: Option<Vec<String>>,
}

impl ProjectiveCactus {
    pub fn to_json(&self) -> CactusJson {
        let mut arcs = BTreeMap::new();
        for l in 1..=self.arity() {
            arcs.insert(
                l.to_string(),
                self.shape().arcs(l).iter().map(crate::rat::format_q).collect(),
            );
        }
        CactusJson {
            tree: self.shape().tree().to_json(),
            arcs,
            lobe_lengths: Some(self.lobe_lengths().iter().map(crate::rat::format_q).collect()),
        }
    }

    pub fn from_json(j: &CactusJson) -> Result<ProjectiveCactus> {
        let tree = BwTree::from_json(&j.tree)?;
        let m = tree.num_whites();
        let mut arcs = Vec::new();
        for l in 1..=m {
            let raw = j
                .arcs
                .get(&l.to_string())
                .ok_or_else(|| Error::parse("arcs", format!("missing lobe {l}")))?;
            arcs.push(raw.iter().map(|s| crate::rat::parse_q(s)).collect::<Result<Vec<Q>>>()?);
        }
        let shape = NormalizedCactus::new(tree, arcs)?;
        let lengths = match &j.lobe_lengths {
            Some(raw) => raw.iter().map(|s| crate::rat::parse_q(s)).collect::<Result<Vec<Q>>>()?,
            None => vec![q_one(); m],
        };
        ProjectiveCactus::new(shape, lengths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    pub fn two_story(a: Q) -> NormalizedCactus {
        // lobe 2 on top of lobe 1, splitting lobe 1 into arcs (a, 1-a)
        let children = vec![vec![1], vec![2], vec![3], vec![]];
        let label = vec![0, 1, 0, 2];
        let tree = BwTree::new(PlantedTree { root: 0, children }, label).unwrap();
        let arcs = vec![vec![a.clone(), q_one() - a], vec![q_one()]];
        NormalizedCactus::new(tree, arcs).unwrap()
    }

    #[test]
    fn star_two_arclist() {
        let c = Cactus::unit_lengths(NormalizedCactus::star(2));
        let list = to_arclist(&c);
        assert_eq!(list.arcs, vec![(1, q_one()), (2, q_one())]);
    }

    #[test]
    fn two_story_arclist() {
        let c = Cactus::unit_lengths(two_story(q(1, 3)));
        let list = to_arclist(&c);
        assert_eq!(list.arcs, vec![(1, q(1, 3)), (2, q_one()), (1, q(2, 3))]);
    }

    #[test]
    fn arclist_round_trip() {
        let c = Cactus::unit_lengths(two_story(q(1, 4)));
        let back = from_arclist(&to_arclist(&c)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn interleaved_arclist_rejected() {
        let bad = ArcList {
            arcs: vec![(1, q_one()), (2, q_one()), (1, q_one()), (2, q_one())],
        };
        assert!(matches!(from_arclist(&bad), Err(Error::NotACactus(_))));
    }

    #[test]
    fn zero_arc_canonicalizes_to_smaller_cell() {
        // attachment at the very end of lobe 1 collapses to the corolla
        let c = NormalizedCactus::new(
            two_story(q(1, 2)).tree().clone(),
            vec![vec![q_one(), q_zero()], vec![q_one()]],
        )
        .unwrap();
        assert_eq!(c, NormalizedCactus::star(2));
    }

    #[test]
    fn unit_insertion_relabels_only() {
        let c = ProjectiveCactus::from_normalized(two_story(q(1, 3)));
        let unit = ProjectiveCactus::from_normalized(NormalizedCactus::star(1));
        for i in 1..=2 {
            let r = c.compose(i, &unit).unwrap();
            assert_eq!(r, c);
            let l = unit.compose(1, &c).unwrap();
            assert_eq!(l, c);
        }
    }

    #[test]
    fn projective_insertion_preserves_total_length() {
        let a = ProjectiveCactus::from_normalized(NormalizedCactus::star(3));
        let b = ProjectiveCactus::from_normalized(two_story(q(1, 2)));
        let r = a.compose(2, &b).unwrap();
        assert_eq!(r.arity(), 4);
        let total: Q = r.lobe_lengths().iter().sum();
        assert_eq!(total, q_one());
    }

    #[test]
    fn coend_star_two_speeds() {
        // on the lobe-1 half the first coordinate moves at full speed and the
        // second stands still
        let c = Cactus::unit_lengths(NormalizedCactus::star(2));
        let v = coend_eval(&c, &q(1, 2));
        assert_eq!(v, vec![q(1, 2), q_zero()]);
        let v = coend_eval(&c, &q(3, 2));
        assert_eq!(v, vec![q_one(), q(1, 2)]);
    }

    #[test]
    fn rho_star_two() {
        let c = Cactus::unit_lengths(NormalizedCactus::star(2));
        let r = rho_map(&c, 1);
        assert_eq!(r.eval(&q(-1, 1)), q(-1, 1));
        assert_eq!(r.eval(&q(-1, 2)), q(0, 1));
        assert_eq!(r.eval(&q(0, 1)), q_one());
        assert_eq!(r.eval(&q(1, 2)), q_one());
    }

    #[test]
    fn local_roots() {
        let c = Cactus::unit_lengths(two_story(q(1, 3)));
        assert_eq!(local_root(&c, 1), q_zero());
        assert_eq!(local_root(&c, 2), q(1, 3));
    }

    #[test]
    fn sigma_action_is_a_right_action() {
        let c = ProjectiveCactus::from_normalized(two_story(q(1, 3)));
        let s = Perm::from_images(vec![2, 1]).unwrap();
        let id = Perm::identity(2);
        assert_eq!(c.sigma_act(&id), c);
        let twice = c.sigma_act(&s).sigma_act(&s);
        assert_eq!(twice, c);
    }
}

#[cfg(test)]
mod variant_tests {
    use super::*;
    use crate::rat::q;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_cact(rng: &mut impl Rng, m: usize) -> Cactus {
        let c = crate::verify::rand_pcact(rng, m);
        // arbitrary positive total length
        let scale = q(rng.random_range(1..6i64), rng.random_range(1..4i64));
        let lengths = c.lobe_lengths().iter().map(|x| x * &scale).collect();
        Cactus::new(c.shape().clone(), lengths).unwrap()
    }

    #[test]
    fn unnormalized_composition_is_associative_with_right_unit_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let m = rng.random_range(2..=3usize);
            let a = rand_cact(&mut rng, m);
            let b = rand_cact(&mut rng, 2);
            let c = rand_cact(&mut rng, 2);
            let i = rng.random_range(1..=m);
            let j = rng.random_range(1..=2usize);
            let lhs = a.compose(i, &b).unwrap().compose(i + j - 1, &c).unwrap();
            let rhs = a.compose(i, &b.compose(j, &c).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "associativity in the unnormalized flavor");
            // any single lobe acts as a right unit regardless of its length
            let u = Cactus::new(NormalizedCactus::star(1), vec![q(7, 3)]).unwrap();
            assert_eq!(a.compose(i, &u).unwrap(), a);
        }
        // ... but only as a right unit: inserting on the left rescales
        let a = Cactus::new(NormalizedCactus::star(2), vec![q(1, 1), q(1, 1)]).unwrap();
        let u = Cactus::new(NormalizedCactus::star(1), vec![q(7, 3)]).unwrap();
        let left = u.compose(1, &a).unwrap();
        assert_ne!(left, a, "left insertion rescales the total length");
        assert_eq!(left.perimeter(), q(7, 3));
    }

    #[test]
    fn normalized_composition_has_a_recorded_associativity_violation() {
        // frozen witness found by search: a two-story cactus with arcs
        // (1/2, 1/2) against two corollas, composed twice at the first lobe
        let a = tests::two_story(q(1, 2));
        let b = NormalizedCactus::star(2);
        let c = NormalizedCactus::star(2);
        let lhs = a.compose(1, &b).unwrap().compose(1, &c).unwrap();
        let rhs = a.compose(1, &b.compose(1, &c).unwrap()).unwrap();
        assert_ne!(lhs, rhs, "the normalized flavor must not be associative");
        // the failure is structural: even the underlying trees differ
        assert_ne!(lhs.tree(), rhs.tree());
        // while both unit laws still hold
        let u = NormalizedCactus::star(1);
        assert_eq!(a.compose(1, &u).unwrap(), a);
        assert_eq!(u.compose(1, &a).unwrap(), a);
    }
}

#[cfg(test)]
mod composition_regression {
    use super::*;
    use crate::rat::q;
    use crate::trees::{BwTree, PlantedTree};

    #[test]
    fn inserting_a_corolla_pair_into_a_middle_lobe() {
        // outer: lobe 1 with lobes 2 and 3 attached at separate points,
        // arc lengths (1/4, 1/4, 1/2); all lobes length one
        let children = vec![vec![1], vec![2, 4], vec![3], vec![], vec![5], vec![]];
        let label = vec![0, 1, 0, 2, 0, 3];
        let tree = BwTree::new(PlantedTree { root: 0, children }, label).unwrap();
        let shape = NormalizedCactus::new(
            tree,
            vec![vec![q(1, 4), q(1, 4), q(1, 2)], vec![q(1, 1)], vec![q(1, 1)]],
        )
        .unwrap();
        let outer = Cactus::new(shape, vec![q(1, 1), q(1, 1), q(1, 1)]).unwrap();
        let inner = Cactus::unit_lengths(NormalizedCactus::star(2));

        let got = outer.compose(2, &inner).unwrap();

        // expected by hand: the inserted pair lands at the old attachment
        // point sharing one intersection vertex, the old third lobe becomes
        // the fourth, and the inserted lobes are rescaled to length 1/2
        let children = vec![vec![1], vec![2, 5], vec![3, 4], vec![], vec![], vec![6], vec![]];
        let label = vec![0, 1, 0, 2, 3, 0, 4];
        let tree = BwTree::new(PlantedTree { root: 0, children }, label).unwrap();
        let shape = NormalizedCactus::new(
            tree,
            vec![
                vec![q(1, 4), q(1, 4), q(1, 2)],
                vec![q(1, 1)],
                vec![q(1, 1)],
                vec![q(1, 1)],
            ],
        )
        .unwrap();
        let want =
            Cactus::new(shape, vec![q(1, 1), q(1, 2), q(1, 2), q(1, 1)]).unwrap();
        assert_eq!(got, want);
    }
}


#[cfg(test)]
mod wire_tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn cactus_json_round_trip() {
        let c = crate::samples::seven_lobe_cactus();
        let j = serde_json::to_string(&c.to_json()).unwrap();
        let back = ProjectiveCactus::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn invalid_arc_sums_are_rejected() {
        let tree = NormalizedCactus::star(2).tree().clone();
        let bad = NormalizedCactus::new(tree, vec![vec![q(1, 2)], vec![q(1, 1)]]);
        assert!(bad.is_err());
    }
}
