//! The cactus action on tower-stage mapping-space models: per-lobe index
//! sets and collapse maps, the collapsed insertion tree, the iterated
//! configuration insertion it directs, aligned maps, and the tower
//! projection.

use crate::cacti::{rho_map, to_arclist, ProjectiveCactus};
use crate::configs::FramedConfig;
use crate::error::{Error, Result};
use crate::knots::{q_ev_config, KnotMap};
use crate::pl::PlMap;
use crate::rat::{q_one, to_f64, Q};
use crate::trees::{UpChild, UpsilonTree};
use std::collections::BTreeSet;

/// One slot of a lobe: either a marked time on the lobe or the local root of
/// a lobe directly above it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slot {
    Time(usize),
    ChildRoot(usize),
}

/// The combinatorial data the action extracts from one lobe.
#[derive(Clone, Debug)]
pub struct LobeContext {
    pub lobe: usize,
    /// the face index set, a subset of `{0..n}`
    pub s_set: BTreeSet<usize>,
    /// parts `(k_p, times of part p)` split by the lobes directly above
    pub parts: Vec<(usize, Vec<usize>)>,
    /// slots in traversal order: part-p times, then the p-th child root
    pub slots: Vec<Slot>,
    /// the collapse map of this lobe
    pub rho: PlMap,
    /// `rho` applied to each slot's perimeter coordinate
    pub slot_values: Vec<Q>,
}

/// Everything the action needs from a cactus and a parameter tuple.
#[derive(Clone, Debug)]
pub struct ActionContext {
    /// host lobe of each marked time
    pub host: Vec<usize>,
    /// per lobe, in label order
    pub lobes: Vec<LobeContext>,
    /// lobes attached at the global root, in traversal order
    pub root_lobes: Vec<usize>,
    /// lobes directly above each lobe, in traversal order
    pub children: Vec<Vec<usize>>,
    /// lobe directly below each lobe (0 at the root)
    pub parent: Vec<usize>,
    /// perimeter coordinate of each lobe's first appearance
    pub opens: Vec<Q>,
}

impl ActionContext {
    pub fn in_branch(&self, mut h: usize, top: usize) -> bool {
        loop {
            if h == top {
                return true;
            }
            if h == 0 {
                return false;
            }
            h = self.parent[h];
        }
    }
}

/// Assigns each marked time to a lobe and computes every lobe's context.
/// Times at a local root go to the lobe opening there ("as high up and as far
/// right as possible"); times at a closing coordinate with no opening go to
/// the closing lobe.
pub fn action_context(c: &ProjectiveCactus, t: &[Q]) -> Result<ActionContext> {
    let m = c.arity();
    for w in t.windows(2) {
        if w[0] > w[1] {
            return Err(Error::invalid("marked times must be nondecreasing"));
        }
    }
    if let (Some(first), Some(last)) = (t.first(), t.last()) {
        if first < &-q_one() || last > &q_one() {
            return Err(Error::invalid("marked times must lie in the interval"));
        }
    }

    // arc runs in traversal order, scaled onto the interval
    let list = to_arclist(c.as_cactus());
    let per = c.as_cactus().perimeter();
    let two = Q::from_integer(2.into());
    let mut runs: Vec<(usize, Q, Q)> = Vec::new();
    let mut pos = -q_one();
    for (l, x) in &list.arcs {
        let next = &pos + &two * x / &per;
        runs.push((*l, pos.clone(), next.clone()));
        pos = next;
    }

    let mut opens: Vec<Option<Q>> = vec![None; m + 1];
    let mut closes: Vec<Option<Q>> = vec![None; m + 1];
    for (l, start, end) in &runs {
        if opens[*l].is_none() {
            opens[*l] = Some(start.clone());
        }
        closes[*l] = Some(end.clone());
    }
    let opens: Vec<Q> = (0..=m)
        .map(|l| if l == 0 { -q_one() } else { opens[l].clone().unwrap() })
        .collect();
    let closes: Vec<Q> = (0..=m)
        .map(|l| if l == 0 { q_one() } else { closes[l].clone().unwrap() })
        .collect();

    let mut host = Vec::with_capacity(t.len());
    for ti in t {
        let mut found = None;
        for (l, start, end) in &runs {
            if start < ti && ti < end {
                found = Some(*l);
                break;
            }
        }
        if found.is_none() {
            found = (1..=m).find(|&l| &opens[l] == ti);
        }
        if found.is_none() {
            found = (1..=m).find(|&l| &closes[l] == ti);
        }
        host.push(found.ok_or_else(|| Error::invalid("time outside the perimeter"))?);
    }

    let tree = c.underlying_tree();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
    let root_lobes: Vec<usize> =
        tree.children(tree.root()).iter().map(|&u| tree.label(u)).collect();
    for l in 1..=m {
        let v = tree.white_vertex(l).unwrap();
        for &b in tree.children(v) {
            for &u in tree.children(b) {
                children[l].push(tree.label(u));
            }
        }
    }
    let mut parent = vec![0usize; m + 1];
    for l in 1..=m {
        for &u in &children[l] {
            parent[u] = l;
        }
    }

    let mut lobes = Vec::with_capacity(m);
    for l in 1..=m {
        let kids = &children[l];
        let w = kids.len();
        let mut region_start: Vec<Q> = Vec::with_capacity(w + 1);
        let mut region_end: Vec<Q> = Vec::with_capacity(w + 1);
        region_start.push(opens[l].clone());
        for &k in kids {
            region_end.push(opens[k].clone());
            region_start.push(closes[k].clone());
        }
        region_end.push(closes[l].clone());

        let mut parts: Vec<(usize, Vec<usize>)> = Vec::new();
        for p in 0..=w {
            let times: Vec<usize> = (0..t.len())
                .filter(|&j| {
                    host[j] == l && t[j] >= region_start[p] && t[j] <= region_end[p]
                })
                .map(|j| j + 1)
                .collect();
            let k_p = match times.first() {
                Some(&j) => j - 1,
                None => {
                    // times strictly before this region, plus times at its
                    // left boundary not claimed by a lobe opening there
                    let start = &region_start[p];
                    let opener = (1..=m).find(|&o| &opens[o] == start);
                    (0..t.len())
                        .filter(|&j| {
                            t[j] < *start || (&t[j] == start && Some(host[j]) != opener)
                        })
                        .count()
                }
            };
            parts.push((k_p, times));
        }

        let mut s_set = BTreeSet::new();
        for (k_p, times) in &parts {
            s_set.insert(*k_p);
            for &j in times {
                s_set.insert(j);
            }
        }

        let rho = rho_map(c.as_cactus(), l);
        let mut slots = Vec::new();
        let mut slot_values = Vec::new();
        for p in 0..=w {
            for &j in &parts[p].1 {
                slots.push(Slot::Time(j));
                slot_values.push(rho.eval(&t[j - 1]));
            }
            if p < w {
                slots.push(Slot::ChildRoot(kids[p]));
                slot_values.push(rho.eval(&opens[kids[p]]));
            }
        }

        lobes.push(LobeContext { lobe: l, s_set, parts, slots, rho, slot_values });
    }

    Ok(ActionContext { host, lobes, root_lobes, children, parent, opens })
}

/// The collapsed insertion tree: the root keeps one child per root lobe,
/// lobes keep their labels, and each lobe carries a leaf per marked time
/// interleaved with its child lobes.
pub fn upsilon_tree(c: &ProjectiveCactus, t: &[Q]) -> Result<UpsilonTree> {
    let ctx = action_context(c, t)?;
    let m = c.arity();
    let mut children: Vec<Vec<UpChild>> = vec![Vec::new(); m + 1];
    children[0] = ctx.root_lobes.iter().map(|&l| UpChild::Internal(l)).collect();
    for lc in &ctx.lobes {
        children[lc.lobe] = lc
            .slots
            .iter()
            .map(|s| match s {
                Slot::Time(j) => UpChild::Leaf(*j),
                Slot::ChildRoot(l) => UpChild::Internal(*l),
            })
            .collect();
    }
    Ok(UpsilonTree { children, root_label: 0 })
}

/// An element of the tower-stage mapping-space model, closed under the
/// operations built here.
#[derive(Clone, Debug)]
pub enum AlignedMap {
    /// the constant basepoint map
    Constant { n: usize, d: usize },
    /// evaluation of a framed long knot followed by the shrinking limit
    KnotDerived { knot: KnotMap, n: usize, d: usize },
    /// the action of a projective cactus on lower maps
    Action { cactus: ProjectiveCactus, inputs: Vec<AlignedMap> },
    /// restriction along the last coface
    Projected { inner: Box<AlignedMap> },
}

impl AlignedMap {
    pub fn n(&self) -> usize {
        match self {
            AlignedMap::Constant { n, .. } | AlignedMap::KnotDerived { n, .. } => *n,
            AlignedMap::Action { inputs, .. } => inputs[0].n(),
            AlignedMap::Projected { inner } => inner.n() - 1,
        }
    }

    pub fn d(&self) -> usize {
        match self {
            AlignedMap::Constant { d, .. } | AlignedMap::KnotDerived { d, .. } => *d,
            AlignedMap::Action { inputs, .. } => inputs[0].d(),
            AlignedMap::Projected { inner } => inner.d(),
        }
    }

    pub fn knot_derived(knot: KnotMap, n: usize, d: usize) -> AlignedMap {
        AlignedMap::KnotDerived { knot, n, d }
    }

    /// Evaluates at a nondecreasing rational tuple in the interval.
    pub fn eval(&self, t: &[Q]) -> Result<FramedConfig> {
        if t.len() != self.n() {
            return Err(Error::invalid(format!(
                "aligned map of arity {} evaluated at {} times",
                self.n(),
                t.len()
            )));
        }
        match self {
            AlignedMap::Constant { n, d } => Ok(FramedConfig::e_config(*n, *d)),
            AlignedMap::KnotDerived { knot, d, .. } => {
                let tf: Vec<f64> = t.iter().map(to_f64).collect();
                q_ev_config(knot, *d, &tf)
            }
            AlignedMap::Action { cactus, inputs } => act(cactus, inputs, t),
            AlignedMap::Projected { inner } => {
                let mut t2 = t.to_vec();
                t2.push(q_one());
                let full = inner.eval(&t2)?;
                let keep: Vec<usize> = (1..=self.n()).collect();
                Ok(full.restrict(&keep))
            }
        }
    }
}

/// Restriction along the last coface: forget the final marked point.
pub fn tower_project(phi: AlignedMap) -> Result<AlignedMap> {
    if phi.n() == 0 {
        return Err(Error::EmptyArity("cannot project below stage zero".into()));
    }
    Ok(AlignedMap::Projected { inner: Box::new(phi) })
}

/// The action of a projective cactus on aligned maps at one tuple: each
/// lobe's map is evaluated on its collapsed face, and the results are
/// inserted into one another along the collapsed insertion tree.
pub fn act(c: &ProjectiveCactus, maps: &[AlignedMap], t: &[Q]) -> Result<FramedConfig> {
    ActArgs::new(c, maps, t)?.run(false)
}

/// The same composite, collapsing the tree in the opposite order; operad
/// associativity of insertion makes the outputs agree.
pub fn act_reversed_order(
    c: &ProjectiveCactus,
    maps: &[AlignedMap],
    t: &[Q],
) -> Result<FramedConfig> {
    ActArgs::new(c, maps, t)?.run(true)
}

struct ActArgs<'a> {
    ctx: ActionContext,
    maps: &'a [AlignedMap],
    t: &'a [Q],
    d: usize,
}

impl<'a> ActArgs<'a> {
    fn new(c: &ProjectiveCactus, maps: &'a [AlignedMap], t: &'a [Q]) -> Result<ActArgs<'a>> {
        if maps.len() != c.arity() {
            return Err(Error::invalid("need one aligned map per lobe"));
        }
        let n = t.len();
        let d = maps[0].d();
        for f in maps {
            if f.n() != n || f.d() != d {
                return Err(Error::invalid("aligned maps must share arity and dimension"));
            }
        }
        Ok(ActArgs { ctx: action_context(c, t)?, maps, t, d })
    }

    fn branch_times(&self, l: usize) -> usize {
        self.ctx.host.iter().filter(|&&h| self.ctx.in_branch(h, l)).count()
    }

    /// Evaluates lobe `l`'s map on its collapsed face and keeps one
    /// representative point per populated slot.  Child slots whose branch
    /// carries no marked time amount to inserting the empty configuration,
    /// so they are dropped outright.
    fn core(&self, l: usize) -> Result<(FramedConfig, Vec<Slot>)> {
        let lc = &self.ctx.lobes[l - 1];
        // the collapse map sends every index to its slot value: times below
        // the lobe to the endpoints, branch times to their local root
        let tuple: Vec<Q> = self.t.iter().map(|x| lc.rho.eval(x)).collect();
        let full = self.maps[l - 1].eval(&tuple)?;
        let mut reps = Vec::new();
        let mut kept = Vec::new();
        for s in &lc.slots {
            match s {
                Slot::Time(j) => {
                    reps.push(*j);
                    kept.push(s.clone());
                }
                Slot::ChildRoot(u) => {
                    let rep = (1..=self.t.len())
                        .find(|&j| self.ctx.in_branch(self.ctx.host[j - 1], *u));
                    if let Some(j) = rep {
                        reps.push(j);
                        kept.push(s.clone());
                    }
                }
            }
        }
        Ok((full.restrict(&reps), kept))
    }

    fn expand(&self, l: usize, reversed: bool) -> Result<FramedConfig> {
        let (core, kept) = self.core(l)?;
        let mut out = core;
        let positions: Vec<(usize, usize)> = kept
            .iter()
            .enumerate()
            .filter_map(|(idx, s)| match s {
                Slot::ChildRoot(u) => Some((idx + 1, *u)),
                Slot::Time(_) => None,
            })
            .collect();
        if reversed {
            let mut shift = 0usize;
            for &(pos, u) in positions.iter() {
                let sub = self.expand(u, reversed)?;
                let arity = sub.n;
                out = out.insert(pos + shift, &sub)?;
                shift += arity - 1;
            }
        } else {
            for &(pos, u) in positions.iter().rev() {
                let sub = self.expand(u, reversed)?;
                out = out.insert(pos, &sub)?;
            }
        }
        Ok(out)
    }

    fn run(&self, reversed: bool) -> Result<FramedConfig> {
        let populated: Vec<usize> = self
            .ctx
            .root_lobes
            .iter()
            .copied()
            .filter(|&l| self.branch_times(l) > 0)
            .collect();
        let mut out = FramedConfig::e_config(populated.len(), self.d);
        if reversed {
            let mut shift = 0usize;
            for (idx, &l) in populated.iter().enumerate() {
                let sub = self.expand(l, reversed)?;
                let arity = sub.n;
                out = out.insert(idx + 1 + shift, &sub)?;
                shift += arity - 1;
            }
        } else {
            for (idx, &l) in populated.iter().enumerate().rev() {
                let sub = self.expand(l, reversed)?;
                out = out.insert(idx + 1, &sub)?;
            }
        }
        Ok(out)
    }
}

/// Checks the aligned-square condition at the `i`-th face for one sample: the
/// value at the collided tuple must be the `i`-th coface of its own
/// restriction.  Returns the deviation.
pub fn face_coherence_deviation(phi: &AlignedMap, i: usize, u: &[Q]) -> Result<f64> {
    let n = phi.n();
    if u.len() + 1 != n || i > n {
        return Err(Error::invalid("face sample has the wrong arity"));
    }
    let mut t = Vec::with_capacity(n);
    if i == 0 {
        t.push(-q_one());
        t.extend_from_slice(u);
    } else if i == n {
        t.extend_from_slice(u);
        t.push(q_one());
    } else {
        t.extend_from_slice(&u[..i]);
        t.push(u[i - 1].clone());
        t.extend_from_slice(&u[i..]);
    }
    let full = phi.eval(&t)?;
    let drop = if i == 0 {
        1
    } else if i == n {
        n
    } else {
        i
    };
    let keep: Vec<usize> = (1..=n).filter(|&k| k != drop).collect();
    let core = full.restrict(&keep);
    let rebuilt = core.coface(i)?;
    Ok(full.deviation(&rebuilt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cacti::NormalizedCactus;
    use crate::perm::Perm;
    use crate::rat::q;
    use crate::samples;

    fn qs(vals: &[(i64, i64)]) -> Vec<Q> {
        vals.iter().map(|&(a, b)| q(a, b)).collect()
    }

    #[test]
    fn index_sets_of_the_seven_lobe_fixture() {
        let c = samples::seven_lobe_cactus();
        let t = samples::seven_lobe_t();
        let ctx = action_context(&c, &t).unwrap();
        let expect = samples::seven_lobe_s_table();
        for l in 1..=7usize {
            assert_eq!(ctx.lobes[l - 1].s_set, expect[l - 1], "index set of lobe {l}");
        }
    }

    #[test]
    fn collapsed_tree_of_the_seven_lobe_fixture() {
        let c = samples::seven_lobe_cactus();
        let t = samples::seven_lobe_t();
        let tree = upsilon_tree(&c, &t).unwrap();
        assert_eq!(tree.key(), samples::seven_lobe_upsilon_key());
        assert_eq!(tree.leaf_count(), 12);
    }

    #[test]
    fn single_lobe_context_is_trivial() {
        let c = ProjectiveCactus::from_normalized(NormalizedCactus::star(1));
        let t = qs(&[(-1, 2), (0, 1), (3, 4)]);
        let ctx = action_context(&c, &t).unwrap();
        let lc = &ctx.lobes[0];
        let n = t.len();
        assert_eq!(lc.s_set, (0..=n).collect());
        assert_eq!(lc.slots.len(), n);
        for (j, v) in lc.slot_values.iter().enumerate() {
            assert_eq!(v, &t[j]);
        }
    }

    #[test]
    fn single_lobe_action_is_the_identity() {
        let c = ProjectiveCactus::from_normalized(NormalizedCactus::star(1));
        let phi = AlignedMap::knot_derived(KnotMap::Trefoil, 3, 3);
        let t = qs(&[(-1, 2), (-1, 8), (5, 8)]);
        let lhs = act(&c, &[phi.clone()], &t).unwrap();
        let rhs = phi.eval(&t).unwrap();
        assert_eq!(lhs.deviation(&rhs), 0.0);
    }

    #[test]
    fn left_collision_boundary_case() {
        // all times at the left end of a two-lobe corolla: the first lobe
        // claims them at its opening root, and the other lobe sees them as
        // already encountered
        let c = ProjectiveCactus::from_normalized(NormalizedCactus::star(2));
        let t = qs(&[(-1, 1), (-1, 1)]);
        let ctx = action_context(&c, &t).unwrap();
        assert_eq!(ctx.host, vec![1, 1]);
        assert_eq!(ctx.lobes[0].s_set, [0, 1, 2].into_iter().collect());
        assert_eq!(ctx.lobes[1].s_set, [2].into_iter().collect::<BTreeSet<_>>());
        assert!(ctx.lobes[1].slots.is_empty());
    }

    #[test]
    fn arity_two_formula() {
        // both lobes at the global root: the action equals inserting each
        // face evaluation into the two-point axis configuration
        let c = ProjectiveCactus::from_normalized(NormalizedCactus::star(2));
        let phi1 = AlignedMap::knot_derived(KnotMap::Trefoil, 2, 3);
        let phi2 = AlignedMap::knot_derived(KnotMap::FrameTwist, 2, 3);
        let t = qs(&[(-3, 4), (1, 4)]);
        let got = act(&c, &[phi1.clone(), phi2.clone()], &t).unwrap();

        // by hand: the first collapse doubles [-1,0], the second [0,1]
        let x1 = phi1.eval(&qs(&[(-1, 2), (1, 1)])).unwrap().restrict(&[1]);
        let x2 = phi2.eval(&qs(&[(-1, 1), (-1, 2)])).unwrap().restrict(&[2]);
        let e2 = FramedConfig::e_config(2, 3);
        let want = e2.insert(2, &x2).unwrap().insert(1, &x1).unwrap();
        assert!(got.deviation(&want) <= 1e-12, "deviation {}", got.deviation(&want));
    }

    #[test]
    fn collapse_order_independence() {
        let c = samples::seven_lobe_cactus();
        let t = samples::seven_lobe_t();
        let maps: Vec<AlignedMap> = (0..7)
            .map(|k| {
                let knot = if k % 2 == 0 { KnotMap::Trefoil } else { KnotMap::FrameTwist };
                AlignedMap::knot_derived(knot, 12, 3)
            })
            .collect();
        let a = act(&c, &maps, &t).unwrap();
        let b = act_reversed_order(&c, &maps, &t).unwrap();
        assert!(a.deviation(&b) <= 1e-12, "order dependence {}", a.deviation(&b));
    }

    #[test]
    fn action_equivariance() {
        let c = samples::seven_lobe_cactus();
        let t = samples::seven_lobe_t();
        let maps: Vec<AlignedMap> = (0..7)
            .map(|k| {
                let knot = if k % 3 == 0 { KnotMap::Trefoil } else { KnotMap::FrameTwist };
                AlignedMap::knot_derived(knot, 12, 3)
            })
            .collect();
        for sigma in [
            Perm::from_images(vec![2, 1, 3, 4, 5, 6, 7]).unwrap(),
            Perm::from_images(vec![3, 1, 2, 5, 4, 7, 6]).unwrap(),
        ] {
            let c_sigma = c.sigma_act(&sigma.inverse());
            let lhs = act(&c_sigma, &maps, &t).unwrap();
            let permuted: Vec<AlignedMap> =
                (1..=7).map(|i| maps[sigma.apply(i) - 1].clone()).collect();
            let rhs = act(&c, &permuted, &t).unwrap();
            assert!(lhs.deviation(&rhs) <= 1e-10, "equivariance {}", lhs.deviation(&rhs));
        }
    }

    #[test]
    fn action_respects_cactus_insertion() {
        let outer = ProjectiveCactus::from_normalized(NormalizedCactus::star(2));
        let inner = ProjectiveCactus::from_normalized(crate::cells::cactus_in_cell(
            &crate::trees::enumerate_bw_trees(2)
                .unwrap()
                .into_iter()
                .find(|t| t.dim() == 1)
                .unwrap(),
        ));
        let composed = outer.compose(2, &inner).unwrap();
        let n = 3;
        let maps: Vec<AlignedMap> = vec![
            AlignedMap::knot_derived(KnotMap::Trefoil, n, 3),
            AlignedMap::knot_derived(KnotMap::FrameTwist, n, 3),
            AlignedMap::knot_derived(KnotMap::Trefoil, n, 3),
        ];
        let t = qs(&[(-5, 8), (1, 8), (7, 8)]);
        let lhs = act(&composed, &maps, &t).unwrap();
        let nested =
            AlignedMap::Action { cactus: inner, inputs: vec![maps[1].clone(), maps[2].clone()] };
        let rhs = act(&outer, &[maps[0].clone(), nested], &t).unwrap();
        assert!(lhs.deviation(&rhs) <= 1e-10, "insertion law {}", lhs.deviation(&rhs));
    }

    #[test]
    fn projection_compatibility_square() {
        let c = ProjectiveCactus::from_normalized(NormalizedCactus::star(2));
        let n = 3;
        let maps = vec![
            AlignedMap::knot_derived(KnotMap::Trefoil, n, 3),
            AlignedMap::knot_derived(KnotMap::FrameTwist, n, 3),
        ];
        let action = AlignedMap::Action { cactus: c.clone(), inputs: maps.clone() };
        let projected_then = tower_project(action).unwrap();
        let then_projected = AlignedMap::Action {
            cactus: c,
            inputs: maps.into_iter().map(|f| tower_project(f).unwrap()).collect(),
        };
        for t in [qs(&[(-1, 2), (1, 4)]), qs(&[(-7, 8), (7, 8)]), qs(&[(0, 1), (0, 1)])] {
            let a = projected_then.eval(&t).unwrap();
            let b = then_projected.eval(&t).unwrap();
            assert!(a.deviation(&b) <= 1e-10, "projection square {}", a.deviation(&b));
        }
    }

    #[test]
    fn tower_projection_of_the_constant_map_is_constant() {
        let c = AlignedMap::Constant { n: 4, d: 3 };
        let p = tower_project(c).unwrap();
        let t = qs(&[(-1, 2), (0, 1), (1, 2)]);
        let want = AlignedMap::Constant { n: 3, d: 3 }.eval(&t).unwrap();
        assert_eq!(p.eval(&t).unwrap().deviation(&want), 0.0);
    }

    #[test]
    fn tower_projection_commutes_with_knot_evaluation() {
        let f = KnotMap::Trefoil;
        let p = tower_project(AlignedMap::knot_derived(f.clone(), 4, 3)).unwrap();
        let direct = AlignedMap::knot_derived(f, 3, 3);
        for t in [qs(&[(-1, 2), (0, 1), (1, 2)]), qs(&[(-9, 10), (-1, 3), (9, 10)])] {
            let a = p.eval(&t).unwrap();
            let b = direct.eval(&t).unwrap();
            assert!(a.deviation(&b) <= 1e-12);
        }
    }

    #[test]
    fn face_coherence_of_knot_derived_maps() {
        let phi = AlignedMap::knot_derived(KnotMap::Trefoil, 3, 3);
        for i in 0..=3usize {
            for u in [qs(&[(-1, 2), (1, 3)]), qs(&[(-7, 9), (2, 3)]), qs(&[(1, 5), (2, 5)])] {
                let dev = face_coherence_deviation(&phi, i, &u).unwrap();
                assert!(dev <= 1e-8, "face {i} deviates by {dev}");
            }
        }
    }

    #[test]
    fn face_coherence_of_action_outputs() {
        let c = ProjectiveCactus::from_normalized(NormalizedCactus::star(2));
        let phi = AlignedMap::Action {
            cactus: c,
            inputs: vec![
                AlignedMap::knot_derived(KnotMap::Trefoil, 3, 3),
                AlignedMap::knot_derived(KnotMap::FrameTwist, 3, 3),
            ],
        };
        for i in 0..=3usize {
            for u in [qs(&[(-1, 2), (1, 3)]), qs(&[(-2, 5), (1, 5)])] {
                let dev = face_coherence_deviation(&phi, i, &u).unwrap();
                assert!(dev <= 1e-8, "face {i} deviates by {dev}");
            }
        }
    }
}
