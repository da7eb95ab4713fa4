//! Planted trees with a black/white bipartition, labeled white vertices,
//! angle collapses, and the sibling statistics used by the normalized
//! overlapping-interval bounds.

use crate::error::{Error, Result};
use crate::perm::Perm;
use serde::{Deserialize, Serialize};

/// A planted tree: vertices with ordered child lists; the order encodes the
/// planar embedding.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlantedTree {
    pub root: usize,
    pub children: Vec<Vec<usize>>,
}

impl PlantedTree {
    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn parent_map(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.children.len()];
        for (v, kids) in self.children.iter().enumerate() {
            for &c in kids {
                parent[c] = Some(v);
            }
        }
        parent
    }

    fn validate(&self) -> Result<()> {
        let n = self.children.len();
        if self.root >= n {
            return Err(Error::invalid("root id out of range"));
        }
        let mut seen = vec![false; n];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &c in &self.children[v] {
                if c >= n || seen[c] {
                    return Err(Error::invalid("not a tree"));
                }
                seen[c] = true;
                count += 1;
                stack.push(c);
            }
        }
        if count != n {
            return Err(Error::invalid("disconnected vertex set"));
        }
        Ok(())
    }
}

/// A b/w tree: planted, black root, bipartite coloring forced by depth parity,
/// white vertices labeled bijectively by `{1..m}`.  Stored in canonical
/// preorder numbering so that structural equality is plain equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BwTree {
    root: usize,
    children: Vec<Vec<usize>>,
    /// 0 for black vertices, the label for white ones.
    label: Vec<usize>,
}

impl BwTree {
    /// Builds and canonicalizes; checks the b/w tree invariants.
    pub fn new(tree: PlantedTree, label: Vec<usize>) -> Result<BwTree> {
        tree.validate()?;
        if label.len() != tree.len() {
            return Err(Error::invalid("label list length mismatch"));
        }
        let t = BwTree { root: tree.root, children: tree.children, label };
        t.check()?;
        Ok(t.renumbered())
    }

    fn check(&self) -> Result<()> {
        // depth parity must agree with the coloring implied by labels
        let mut depth = vec![0usize; self.children.len()];
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            for &c in &self.children[v] {
                depth[c] = depth[v] + 1;
                stack.push(c);
            }
        }
        let mut m = 0;
        for v in 0..self.children.len() {
            let white = depth[v] % 2 == 1;
            if white != (self.label[v] > 0) {
                return Err(Error::invalid("coloring does not alternate from the black root"));
            }
            if white {
                m += 1;
            }
            if !white && v != self.root && self.children[v].is_empty() {
                return Err(Error::invalid("non-root univalent vertex must be white"));
            }
        }
        let mut seen = vec![false; m + 1];
        for v in 0..self.children.len() {
            let l = self.label[v];
            if l > 0 {
                if l > m || seen[l] {
                    return Err(Error::invalid("white labels must be a bijection with {1..m}"));
                }
                seen[l] = true;
            }
        }
        Ok(())
    }

    /// Renumbers vertices in preorder (root first, children in planar order).
    fn renumbered(&self) -> BwTree {
        let n = self.children.len();
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            for &c in self.children[v].iter().rev() {
                stack.push(c);
            }
        }
        let mut new_id = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            new_id[v] = i;
        }
        let mut children = vec![Vec::new(); n];
        let mut label = vec![0usize; n];
        for &v in &order {
            children[new_id[v]] = self.children[v].iter().map(|&c| new_id[c]).collect();
            label[new_id[v]] = self.label[v];
        }
        BwTree { root: 0, children, label }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn arity(&self, v: usize) -> usize {
        self.children[v].len()
    }

    pub fn is_white(&self, v: usize) -> bool {
        self.label[v] > 0
    }

    pub fn label(&self, v: usize) -> usize {
        self.label[v]
    }

    pub fn parent_map(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.children.len()];
        for (v, kids) in self.children.iter().enumerate() {
            for &c in kids {
                parent[c] = Some(v);
            }
        }
        parent
    }

    /// Number of white vertices.
    pub fn num_whites(&self) -> usize {
        self.label.iter().filter(|&&l| l > 0).count()
    }

    /// White vertex carrying a given label.
    pub fn white_vertex(&self, label: usize) -> Option<usize> {
        (0..self.len()).find(|&v| self.label[v] == label)
    }

    /// Vertex ids of the black vertices.
    pub fn black_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| !self.is_white(v)).collect()
    }

    /// Cell dimension: sum of white arities.
    pub fn dim(&self) -> usize {
        (0..self.len()).filter(|&v| self.is_white(v)).map(|v| self.arity(v)).sum()
    }

    /// Compact structural key, e.g. `b(w1(b(w2)))`.
    pub fn key(&self) -> String {
        fn rec(t: &BwTree, v: usize, out: &mut String) {
            if t.is_white(v) {
                out.push('w');
                out.push_str(&t.label(v).to_string());
            } else {
                out.push('b');
            }
            if !t.children[v].is_empty() {
                out.push('(');
                for &c in &t.children[v] {
                    rec(t, c, out);
                }
                out.push(')');
            }
        }
        let mut s = String::new();
        rec(self, self.root, &mut s);
        s
    }

    /// Relabels whites: the vertex labeled `k` becomes labeled `σ⁻¹(k)`.
    /// This is the right action matching the one on cacti and intervals.
    pub fn sigma_act(&self, sigma: &Perm) -> BwTree {
        let inv = sigma.inverse();
        let mut t = self.clone();
        for l in t.label.iter_mut() {
            if *l > 0 {
                *l = inv.apply(*l);
            }
        }
        t.renumbered()
    }

    /// Glues the cyclically consecutive edges `e_i, e_{i+1}` at the white
    /// vertex labeled `white`, with `e_0` the incoming edge.
    pub fn angle_collapse(&self, white: usize, angle: usize) -> Result<BwTree> {
        let v = self
            .white_vertex(white)
            .ok_or_else(|| Error::Range(format!("no white vertex labeled {white}")))?;
        let k = self.arity(v);
        if k == 0 {
            return Err(Error::CannotCollapse(format!(
                "white vertex {white} has no outgoing edges"
            )));
        }
        if angle > k {
            return Err(Error::Range(format!("angle {angle} out of range 0..={k}")));
        }
        let parent = self.parent_map();
        let mut children = self.children.clone();
        if angle == 0 || angle == k {
            let b = if angle == 0 { children[v][0] } else { children[v][k - 1] };
            let p = parent[v].expect("white vertex always has a black parent");
            let moved = children[b].clone();
            let pos = children[p].iter().position(|&c| c == v).unwrap();
            if angle == 0 {
                children[v].remove(0);
                let mut new_kids = children[p][..pos].to_vec();
                new_kids.extend_from_slice(&moved);
                new_kids.extend_from_slice(&children[p][pos..]);
                children[p] = new_kids;
            } else {
                children[v].pop();
                let mut new_kids = children[p][..=pos].to_vec();
                new_kids.extend_from_slice(&moved);
                new_kids.extend_from_slice(&children[p][pos + 1..]);
                children[p] = new_kids;
            }
            children[b].clear();
        } else {
            let b1 = children[v][angle - 1];
            let b2 = children[v][angle];
            let mut merged = children[b1].clone();
            merged.extend_from_slice(&children[b2]);
            children[b1] = merged;
            children[b2].clear();
            children[v].remove(angle);
        }
        // drop the orphaned black vertex by rebuilding from the root
        let keep = BwTree { root: self.root, children, label: self.label.clone() };
        Ok(keep.garbage_collected())
    }

    fn garbage_collected(&self) -> BwTree {
        let n = self.children.len();
        let mut reach = vec![false; n];
        let mut stack = vec![self.root];
        reach[self.root] = true;
        while let Some(v) = stack.pop() {
            for &c in &self.children[v] {
                reach[c] = true;
                stack.push(c);
            }
        }
        let mut new_id = vec![usize::MAX; n];
        let mut children = Vec::new();
        let mut label = Vec::new();
        let mut next = 0usize;
        for v in 0..n {
            if reach[v] {
                new_id[v] = next;
                next += 1;
            }
        }
        for v in 0..n {
            if reach[v] {
                children.push(self.children[v].iter().map(|&c| new_id[c]).collect());
                label.push(self.label[v]);
            }
        }
        BwTree { root: new_id[self.root], children, label }.renumbered()
    }

    /// All trees one angle collapse below this one, tagged with `(white, angle)`.
    pub fn all_collapses(&self) -> Vec<(usize, usize, BwTree)> {
        let mut out = Vec::new();
        for v in 0..self.len() {
            if self.is_white(v) && self.arity(v) > 0 {
                let w = self.label(v);
                for i in 0..=self.arity(v) {
                    out.push((w, i, self.angle_collapse(w, i).unwrap()));
                }
            }
        }
        out
    }

    /// White siblings strictly to the left of the white labeled `i`, in planar order.
    pub fn lambda(&self, i: usize) -> Result<Vec<usize>> {
        let (sibs, pos) = self.siblings(i)?;
        Ok(sibs[..pos].iter().map(|&v| self.label(v)).collect())
    }

    /// White siblings strictly to the right, in planar order.
    pub fn rho(&self, i: usize) -> Result<Vec<usize>> {
        let (sibs, pos) = self.siblings(i)?;
        Ok(sibs[pos + 1..].iter().map(|&v| self.label(v)).collect())
    }

    fn siblings(&self, i: usize) -> Result<(Vec<usize>, usize)> {
        let v = self
            .white_vertex(i)
            .ok_or_else(|| Error::Range(format!("no white vertex labeled {i}")))?;
        let parent = self.parent_map();
        let p = parent[v].unwrap();
        let sibs = self.children[p].clone();
        let pos = sibs.iter().position(|&c| c == v).unwrap();
        Ok((sibs, pos))
    }

    /// `α(v)`: whites strictly above `v`, plus one if `v` itself is white.
    pub fn alpha(&self, v: usize) -> usize {
        let mut count = if self.is_white(v) { 1 } else { 0 };
        let mut stack: Vec<usize> = self.children[v].to_vec();
        while let Some(u) = stack.pop() {
            if self.is_white(u) {
                count += 1;
            }
            stack.extend_from_slice(&self.children[u]);
        }
        count
    }

    pub fn alpha_label(&self, white: usize) -> Result<usize> {
        let v = self
            .white_vertex(white)
            .ok_or_else(|| Error::Range(format!("no white vertex labeled {white}")))?;
        Ok(self.alpha(v))
    }

    /// `λ⁺(i)` for a compatible height order `σ` (read as a height list:
    /// `σ(1)` is the lowest label).
    pub fn lambda_plus(&self, i: usize, sigma: &Perm) -> Result<Vec<usize>> {
        self.plus_set(i, sigma, true)
    }

    pub fn rho_plus(&self, i: usize, sigma: &Perm) -> Result<Vec<usize>> {
        self.plus_set(i, sigma, false)
    }

    fn plus_set(&self, i: usize, sigma: &Perm, left: bool) -> Result<Vec<usize>> {
        if !self.is_compatible(sigma) {
            return Err(Error::Incompatible(format!("σ = {:?}", sigma.images())));
        }
        let inv = sigma.inverse();
        let side = if left { self.lambda(i)? } else { self.rho(i)? };
        let hi = inv.apply(i);
        let mut out = Vec::new();
        for (idx, &w) in side.iter().enumerate() {
            if inv.apply(w) <= hi {
                continue;
            }
            // siblings strictly between w and i must all sit above i as well;
            // for the left side those are the later entries of `side`, for the
            // right side the earlier ones.
            let between: &[usize] = if left { &side[idx + 1..] } else { &side[..idx] };
            if between.iter().all(|&u| inv.apply(u) > hi) {
                out.push(w);
            }
        }
        Ok(out)
    }

    /// True iff every root-to-leaf sequence of white labels is a subsequence
    /// of the image list of `sigma`.
    pub fn is_compatible(&self, sigma: &Perm) -> bool {
        let inv = sigma.inverse();
        // equivalent formulation: along every downward path the height
        // strictly increases; it suffices to check white-to-white steps.
        fn rec(t: &BwTree, inv: &Perm, v: usize, last_height: usize) -> bool {
            let next = if t.is_white(v) { inv.apply(t.label(v)) } else { last_height };
            if t.is_white(v) && next <= last_height {
                return false;
            }
            t.children[v].iter().all(|&c| rec(t, inv, c, next))
        }
        rec(self, &inv, self.root, 0)
    }

    /// All height orders compatible with this tree.
    pub fn compatible_sigmas(&self) -> Vec<Perm> {
        Perm::all(self.num_whites())
            .into_iter()
            .filter(|s| self.is_compatible(s))
            .collect()
    }
}

/// All b/w trees with `m` labeled white vertices, sorted by dimension and key.
pub fn enumerate_bw_trees(m: usize) -> Result<Vec<BwTree>> {
    if m == 0 {
        return Err(Error::EmptyArity("no b/w trees in arity 0".into()));
    }
    let shapes = black_shapes(m);
    let mut out = Vec::new();
    for shape in &shapes {
        let skeleton = shape_to_tree(shape);
        let whites: Vec<usize> =
            (0..skeleton.label.len()).filter(|&v| skeleton.label[v] > 0).collect();
        for perm in Perm::all(m) {
            let mut label = skeleton.label.clone();
            for (slot, &v) in whites.iter().enumerate() {
                label[v] = perm.apply(slot + 1);
            }
            out.push(BwTree { root: skeleton.root, children: skeleton.children.clone(), label });
        }
    }
    out.sort_by_key(|t| (t.dim(), t.key()));
    Ok(out)
}

/// All trees of `enumerate_bw_trees(m)` compatible with `sigma`.
pub fn trees_compatible_with(m: usize, sigma: &Perm) -> Result<Vec<BwTree>> {
    Ok(enumerate_bw_trees(m)?.into_iter().filter(|t| t.is_compatible(sigma)).collect())
}

#[derive(Clone, Debug)]
enum Shape {
    White(Vec<Shape>),
    Black(Vec<Shape>),
}

fn compositions(total: usize, min_parts: usize) -> Vec<Vec<usize>> {
    // ordered compositions of `total` into parts >= 1, allowing zero parts
    // only when total == 0 and min_parts == 0
    let mut out = Vec::new();
    if total == 0 {
        if min_parts == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    for first in 1..=total {
        for mut rest in compositions(total - first, 0) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out.retain(|c| c.len() >= min_parts);
    out
}

fn white_shapes(w: usize) -> Vec<Shape> {
    // a white vertex plus black branches containing w-1 whites in total
    let mut out = Vec::new();
    for comp in compositions(w - 1, 0) {
        let branch_choices: Vec<Vec<Shape>> = comp.iter().map(|&c| black_shapes(c)).collect();
        for combo in cartesian(&branch_choices) {
            out.push(Shape::White(combo));
        }
    }
    out
}

fn black_shapes(w: usize) -> Vec<Shape> {
    // a black vertex with at least one white child branch (univalent
    // non-root black vertices are forbidden)
    let mut out = Vec::new();
    for comp in compositions(w, 1) {
        let branch_choices: Vec<Vec<Shape>> = comp.iter().map(|&c| white_shapes(c)).collect();
        for combo in cartesian(&branch_choices) {
            out.push(Shape::Black(combo));
        }
    }
    out
}

fn cartesian(choices: &[Vec<Shape>]) -> Vec<Vec<Shape>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        let mut next = Vec::new();
        for prefix in &out {
            for s in c {
                let mut p = prefix.clone();
                p.push(s.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn shape_to_tree(shape: &Shape) -> BwTree {
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut label: Vec<usize> = Vec::new();
    let mut white_count = 0usize;
    fn rec(
        s: &Shape,
        children: &mut Vec<Vec<usize>>,
        label: &mut Vec<usize>,
        white_count: &mut usize,
    ) -> usize {
        let id = children.len();
        children.push(Vec::new());
        match s {
            Shape::White(kids) => {
                *white_count += 1;
                label.push(*white_count); // provisional label, reassigned later
                for k in kids {
                    let c = rec(k, children, label, white_count);
                    children[id].push(c);
                }
            }
            Shape::Black(kids) => {
                label.push(0);
                for k in kids {
                    let c = rec(k, children, label, white_count);
                    children[id].push(c);
                }
            }
        }
        id
    }
    rec(shape, &mut children, &mut label, &mut white_count);
    BwTree { root: 0, children, label }
}

/// JSON wire format for b/w trees.
#[derive(Serialize, Deserialize)]
pub struct BwTreeJson {
    pub root: usize,
    pub children: Vec<Vec<usize>>,
    pub colors: String,
    pub white_labels: Vec<usize>,
}

impl BwTree {
    pub fn to_json(&self) -> BwTreeJson {
        let colors: String =
            (0..self.len()).map(|v| if self.is_white(v) { 'w' } else { 'b' }).collect();
        let m = self.num_whites();
        let white_labels = (1..=m).map(|l| self.white_vertex(l).unwrap()).collect();
        BwTreeJson { root: self.root, children: self.children.clone(), colors, white_labels }
    }

    pub fn from_json(j: &BwTreeJson) -> Result<BwTree> {
        let n = j.children.len();
        if j.colors.len() != n {
            return Err(Error::invalid("colors string length mismatch"));
        }
        let mut label = vec![0usize; n];
        for (idx, &v) in j.white_labels.iter().enumerate() {
            if v >= n {
                return Err(Error::invalid("white label vertex out of range"));
            }
            label[v] = idx + 1;
        }
        for (v, c) in j.colors.chars().enumerate() {
            let white = c == 'w';
            if white != (label[v] > 0) {
                return Err(Error::invalid("colors and white_labels disagree"));
            }
        }
        BwTree::new(PlantedTree { root: j.root, children: j.children.clone() }, label)
    }
}

/// A tree in the insertion category: internal vertices labeled `0..=m`
/// (0 is the root), leaves standing for marked points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpsilonTree {
    /// Per internal label, its ordered children.
    pub children: Vec<Vec<UpChild>>,
    /// Labels of the internal vertices directly above the root vertex 0.
    pub root_label: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpChild {
    /// An internal vertex, by its label in `1..=m`.
    Internal(usize),
    /// A leaf standing for the marked point with this 1-based index.
    Leaf(usize),
}

impl UpsilonTree {
    pub fn leaf_count(&self) -> usize {
        self.children
            .iter()
            .flat_map(|kids| kids.iter())
            .filter(|c| matches!(c, UpChild::Leaf(_)))
            .count()
    }

    pub fn key(&self) -> String {
        fn rec(t: &UpsilonTree, label: usize, out: &mut String) {
            out.push_str(&format!("v{label}("));
            for c in &t.children[label] {
                match c {
                    UpChild::Leaf(i) => out.push_str(&format!("t{i},")),
                    UpChild::Internal(l) => {
                        rec(t, *l, out);
                        out.push(',');
                    }
                }
            }
            out.push(')');
        }
        let mut s = String::new();
        rec(self, 0, &mut s);
        s
    }
}
