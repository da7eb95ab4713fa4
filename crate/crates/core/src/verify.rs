//! Seeded verification suites with machine-readable reports.

use crate::action::{
    act, act_reversed_order, face_coherence_deviation, tower_project, AlignedMap,
};
use crate::cacti::{NormalizedCactus, ProjectiveCactus};
use crate::cells::{cact1_complex, cact1_trees, cactus_in_cell, fiber_complex, Field};
use crate::configs::FramedConfig;
use crate::error::{Error, Result};
use crate::intervals::{
    cubes_to_ov, gen, ov1_all_witnesses, ov1_membership, project_to_cactus, OvElement,
};
use crate::knots::{budney_act, budney_act_with, KnotMap};
use crate::perm::Perm;
use crate::rat::{q, q_one, Q};
use crate::trees::enumerate_bw_trees;
use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

pub const SUITES: &[&str] = &[
    "ov-operad",
    "pcact-operad",
    "cubes-map",
    "p-m",
    "cells",
    "fibers",
    "configs-cosimplicial",
    "action-axioms",
    "action-faces",
    "projection-compat",
    "budney",
];

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub case: u64,
    pub detail: String,
    pub repro: String,
}

/// Outcome of one suite run.  The machine-readable rendering excludes the
/// wall time so identical seeds give byte-identical reports.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub suite: String,
    pub seed: u64,
    pub cases: u64,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub failures: Vec<Failure>,
    #[serde(skip)]
    pub wall_ms: u128,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_human(&self) -> String {
        let status = if self.passed() { "ok" } else { "FAILED" };
        let mut out = format!(
            "suite {:<22} seed {:<6} cases {:<6} max deviation {:.3e}  [{}] ({} ms)\n",
            self.suite, self.seed, self.cases, self.max_deviation, status, self.wall_ms
        );
        for f in &self.failures {
            out.push_str(&format!("  case {}: {}\n    repro: {}\n", f.case, f.detail, f.repro));
        }
        out
    }
}

struct Recorder {
    suite: String,
    seed: u64,
    tolerance: f64,
    cases: u64,
    max_dev: f64,
    failures: Vec<Failure>,
}

impl Recorder {
    fn new(suite: &str, seed: u64, tolerance: f64) -> Recorder {
        Recorder {
            suite: suite.to_string(),
            seed,
            tolerance,
            cases: 0,
            max_dev: 0.0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, dev: f64, detail: impl Fn() -> String) {
        self.cases += 1;
        if dev.is_nan() {
            self.max_dev = f64::INFINITY;
        } else if dev > self.max_dev {
            self.max_dev = dev;
        }
        if !(dev <= self.tolerance) {
            let case = self.cases;
            self.failures.push(Failure {
                case,
                detail: format!("deviation {dev:.3e}: {}", detail()),
                repro: format!(
                    "cacti verify --suite {} --seed {} --cases {} --tol {:.1e}",
                    self.suite, self.seed, case, self.tolerance
                ),
            });
        }
    }

    fn check_true(&mut self, ok: bool, detail: impl Fn() -> String) {
        self.check(if ok { 0.0 } else { 1.0 }, detail);
    }

    fn finish(self, wall_ms: u128) -> RunReport {
        RunReport {
            suite: self.suite,
            seed: self.seed,
            cases: self.cases,
            tolerance: self.tolerance,
            max_deviation: self.max_dev,
            failures: self.failures,
            wall_ms,
        }
    }
}

/// Runs a named suite.  `cases` scales the number of random checks; suites
/// testing exact equalities ignore `tol`.
pub fn run_suite(name: &str, seed: u64, cases: u64, tol: Option<f64>) -> Result<RunReport> {
    let start = Instant::now();
    let rec = match name {
        "ov-operad" => ov_operad_suite(seed, cases),
        "pcact-operad" => pcact_operad_suite(seed, cases),
        "cubes-map" => cubes_map_suite(seed, cases),
        "p-m" => p_m_suite(seed, cases),
        "cells" => cells_suite(seed),
        "fibers" => fibers_suite(seed),
        "configs-cosimplicial" => configs_suite(seed, cases, tol.unwrap_or(1e-12)),
        "action-axioms" => action_axioms_suite(seed, cases, tol.unwrap_or(1e-10)),
        "action-faces" => action_faces_suite(seed, cases, tol.unwrap_or(1e-8)),
        "projection-compat" => projection_suite(seed, cases, tol.unwrap_or(1e-10)),
        "budney" => budney_suite(seed, cases, tol.unwrap_or(1e-10)),
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(rec.finish(start.elapsed().as_millis()))
}

// ---------------------------------------------------------------------------
// random generators shared by the suites and the acceptance tests
// ---------------------------------------------------------------------------

pub fn rand_pcact(rng: &mut impl Rng, m: usize) -> ProjectiveCactus {
    let trees = enumerate_bw_trees(m).unwrap();
    let tree = trees[rng.random_range(0..trees.len())].clone();
    let mut arcs = Vec::new();
    for l in 1..=m {
        let parts = tree.arity(tree.white_vertex(l).unwrap()) + 1;
        // keep arcs strictly positive so the sampled cell is the tree's own
        let mut split;
        loop {
            split = gen::rand_splits(rng, &q_one(), parts, 8);
            if split.iter().all(|x| x > &q(0, 1)) {
                break;
            }
        }
        arcs.push(split);
    }
    let shape = NormalizedCactus::new(tree, arcs).unwrap();
    let mut lengths;
    loop {
        lengths = gen::rand_splits(rng, &q_one(), m, 16);
        if lengths.iter().all(|x| x > &q(0, 1)) {
            break;
        }
    }
    ProjectiveCactus::new(shape, lengths).unwrap()
}

pub fn rand_t(rng: &mut impl Rng, n: usize) -> Vec<Q> {
    let mut t: Vec<Q> = (0..n).map(|_| gen::rand_q(rng, &-q_one(), &q_one(), 64)).collect();
    t.sort();
    t
}

pub fn rand_knot(rng: &mut impl Rng) -> KnotMap {
    match rng.random_range(0..3) {
        0 => KnotMap::Identity,
        1 => KnotMap::Trefoil,
        _ => KnotMap::FrameTwist,
    }
}

pub fn rand_maps(rng: &mut impl Rng, m: usize, n: usize, d: usize) -> Vec<AlignedMap> {
    (0..m)
        .map(|_| {
            if rng.random_range(0..5) == 0 {
                AlignedMap::Constant { n, d }
            } else {
                AlignedMap::knot_derived(rand_knot(rng), n, d)
            }
        })
        .collect()
}

pub fn rand_config(rng: &mut impl Rng, n: usize, d: usize) -> FramedConfig {
    let mut v = Vec::new();
    for _ in 0..n * n.saturating_sub(1) / 2 {
        let mut w: DVector<f64> = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0f64));
        while w.norm() < 1e-3 {
            w = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0f64));
        }
        let nrm = w.norm();
        v.push(w / nrm);
    }
    let mut frames = Vec::new();
    while frames.len() < n {
        let f = nalgebra::DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0f64));
        if f.clone().lu().determinant().abs() > 1e-3 {
            frames.push(f);
        }
    }
    FramedConfig { n, d, v, frames }
}


/// The block permutation relating a relabeled outer composition to the
/// composition with permuted inputs: source block `i` (of size `ks[i-1]`)
/// maps onto target block `sigma(i)`, preserving inner order.
pub fn outer_block_perm(sigma: &Perm, ks: &[usize]) -> Perm {
    let m = ks.len();
    let sinv = sigma.inverse();
    // target block b holds the input placed there, of size ks[sinv(b)-1]
    let mut target_off = vec![0usize; m + 1];
    for b in 1..=m {
        target_off[b] = target_off[b - 1] + ks[sinv.apply(b) - 1];
    }
    let mut source_off = vec![0usize; m + 1];
    for i in 1..=m {
        source_off[i] = source_off[i - 1] + ks[i - 1];
    }
    let total = source_off[m];
    let mut images = vec![0usize; total];
    for i in 1..=m {
        let b = sigma.apply(i);
        for j in 1..=ks[i - 1] {
            images[source_off[i - 1] + j - 1] = target_off[b - 1] + j;
        }
    }
    Perm::from_images(images).unwrap()
}

// ---------------------------------------------------------------------------
// individual suites
// ---------------------------------------------------------------------------

fn ov_operad_suite(seed: u64, cases: u64) -> Recorder {
    let mut rec = Recorder::new("ov-operad", seed, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let m = rng.random_range(2..=4usize);
        let k = rng.random_range(1..=3usize);
        let e = gen::rand_ov(&mut rng, m);
        let f = gen::rand_ov(&mut rng, k);
        let g = gen::rand_ov(&mut rng, 2);
        let ids = vec![OvElement::identity(); m];
        rec.check_true(e.compose_all(&ids).unwrap() == e, || "right unit".into());
        rec.check_true(
            OvElement::identity().compose_at(1, &e).unwrap() == e,
            || "left unit".into(),
        );
        let i = rng.random_range(1..=m);
        let j = rng.random_range(1..=k);
        let lhs = e.compose_at(i, &f).unwrap().compose_at(i + j - 1, &g).unwrap();
        let rhs = e.compose_at(i, &f.compose_at(j, &g).unwrap()).unwrap();
        rec.check_true(lhs == rhs, || format!("associativity at ({i},{j})"));
        // outer equivariance: relabeling permutes the blocks
        let sigmas = Perm::all(m);
        let sigma = sigmas[rng.random_range(0..sigmas.len())].clone();
        let inners: Vec<OvElement> =
            (0..m)
            .map(|_| {
                let kk = rng.random_range(1..=2usize);
                gen::rand_ov(&mut rng, kk)
            })
            .collect();
        let lhs = e.sigma_act(&sigma).compose_all(&inners).unwrap();
        let sinv = sigma.inverse();
        let permuted: Vec<OvElement> =
            (1..=m).map(|s| inners[sinv.apply(s) - 1].clone()).collect();
        let tau_out =
            outer_block_perm(&sigma, &inners.iter().map(|x| x.arity()).collect::<Vec<_>>());
        let rhs = e.compose_all(&permuted).unwrap().sigma_act(&tau_out);
        rec.check_true(lhs == rhs, || "outer equivariance".into());
        // inner equivariance
        let taus = Perm::all(k);
        let tau = taus[rng.random_range(0..taus.len())].clone();
        let lhs = e.compose_at(i, &f.sigma_act(&tau)).unwrap();
        let mut parts: Vec<Perm> =
            (1..=m).map(|l| Perm::identity(if l == i { k } else { 1 })).collect();
        parts[i - 1] = tau.clone();
        let rhs = e.compose_at(i, &f).unwrap().sigma_act(&Perm::direct_sum(&parts));
        rec.check_true(lhs == rhs, || "inner equivariance".into());
    }
    rec
}

fn pcact_operad_suite(seed: u64, cases: u64) -> Recorder {
    let mut rec = Recorder::new("pcact-operad", seed, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = ProjectiveCactus::from_normalized(NormalizedCactus::star(1));
    for _ in 0..cases {
        let m = rng.random_range(2..=4usize);
        let k = rng.random_range(1..=3usize);
        let a = rand_pcact(&mut rng, m);
        let b = rand_pcact(&mut rng, k);
        let c = rand_pcact(&mut rng, 2);
        let i = rng.random_range(1..=m);
        let j = rng.random_range(1..=k);
        rec.check_true(a.compose(i, &unit).unwrap() == a, || "right unit".into());
        rec.check_true(unit.compose(1, &a).unwrap() == a, || "left unit".into());
        let lhs = a.compose(i, &b).unwrap().compose(i + j - 1, &c).unwrap();
        let rhs = a.compose(i, &b.compose(j, &c).unwrap()).unwrap();
        rec.check_true(lhs == rhs, || format!("associativity at ({i},{j})"));
        if m >= 2 {
            let i2 = if i == m { 1 } else { i + 1 };
            let (lo, hi) = if i < i2 { (i, i2) } else { (i2, i) };
            let lhs = a.compose(hi, &c).unwrap().compose(lo, &b).unwrap();
            let rhs = a.compose(lo, &b).unwrap().compose(hi + k - 1, &c).unwrap();
            rec.check_true(lhs == rhs, || format!("disjoint slots ({lo},{hi})"));
        }
        let sigmas = Perm::all(m);
        let sigma = sigmas[rng.random_range(0..sigmas.len())].clone();
        let inners: Vec<ProjectiveCactus> =
            (0..m)
            .map(|_| {
                let kk = rng.random_range(1..=2usize);
                rand_pcact(&mut rng, kk)
            })
            .collect();
        let mut lhs = a.sigma_act(&sigma);
        for slot in (1..=m).rev() {
            lhs = lhs.compose(slot, &inners[slot - 1]).unwrap();
        }
        let sinv = sigma.inverse();
        let mut rhs = a.clone();
        for slot in (1..=m).rev() {
            rhs = rhs.compose(slot, &inners[sinv.apply(slot) - 1]).unwrap();
        }
        let tau =
            outer_block_perm(&sigma, &inners.iter().map(|x| x.arity()).collect::<Vec<_>>());
        let rhs = rhs.sigma_act(&tau);
        rec.check_true(lhs == rhs, || "equivariance".into());
    }
    rec
}

fn cubes_map_suite(seed: u64, cases: u64) -> Recorder {
    let mut rec = Recorder::new("cubes-map", seed, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let m = rng.random_range(1..=3usize);
        let outer = gen::rand_cubes(&mut rng, m);
        let inners: Vec<_> =
            (0..m)
            .map(|_| {
                let kk = rng.random_range(1..=2usize);
                gen::rand_cubes(&mut rng, kk)
            })
            .collect();
        let lhs = cubes_to_ov(&outer.compose_all(&inners).unwrap()).unwrap();
        let projected: Vec<OvElement> =
            inners.iter().map(|c| cubes_to_ov(c).unwrap()).collect();
        let rhs = cubes_to_ov(&outer).unwrap().compose_all(&projected).unwrap();
        rec.check_true(lhs == rhs, || "projection is an operad map".into());
        let sigmas = Perm::all(m);
        let sigma = sigmas[rng.random_range(0..sigmas.len())].clone();
        rec.check_true(
            cubes_to_ov(&outer.sigma_act(&sigma)).unwrap()
                == cubes_to_ov(&outer).unwrap().sigma_act(&sigma),
            || "projection equivariance".into(),
        );
    }
    rec
}

fn p_m_suite(seed: u64, cases: u64) -> Recorder {
    let mut rec = Recorder::new("p-m", seed, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for m in 1..=4usize {
        let e = OvElement::star(m);
        let w = ov1_membership(&e);
        rec.check_true(w.is_some(), || format!("tiling element of arity {m} accepted"));
        if let Some(w) = w {
            rec.check_true(w.tree.dim() == 0, || "tiling witness is a corolla".into());
            rec.check_true(
                project_to_cactus(&e, &w).unwrap() == NormalizedCactus::star(m),
                || "tiling element projects to the corolla cactus".into(),
            );
        }
    }
    let a = OvElement::from_heights(
        vec![
            crate::intervals::Interval::whole(),
            crate::intervals::Interval { lo: q(-1, 2), hi: q(1, 2) },
        ],
        &Perm::identity(2),
    )
    .unwrap();
    let b = OvElement::star(2);
    rec.check_true(ov1_membership(&a).is_some(), || "nested factor accepted".into());
    rec.check_true(ov1_membership(&b).is_some(), || "tiling factor accepted".into());
    rec.check_true(
        ov1_membership(&a.compose_at(1, &b).unwrap()).is_none(),
        || "composite rejected".into(),
    );
    for _ in 0..cases {
        let e = gen::rand_ov1(&mut rng, 3);
        let all = ov1_all_witnesses(&e);
        rec.check_true(!all.is_empty(), || "sampled element is a member".into());
        let mut images = std::collections::BTreeSet::new();
        for w in &all {
            images.insert(format!("{:?}", project_to_cactus(&e, w).unwrap()));
        }
        rec.check_true(images.len() == 1, || "projection is witness independent".into());
    }
    rec
}

fn cells_suite(seed: u64) -> Recorder {
    let mut rec = Recorder::new("cells", seed, 0.0);
    let tables: [(usize, Vec<usize>); 4] =
        [(1, vec![1]), (2, vec![1, 1]), (3, vec![1, 3, 2]), (4, vec![1, 6, 11, 6])];
    for (m, betti) in tables {
        let c = cact1_complex(m).unwrap();
        rec.check_true(c.validate().is_ok(), || format!("complex of arity {m} is valid"));
        rec.check_true(
            c.betti(Field::F2).unwrap() == betti,
            || format!("GF(2) Betti numbers of arity {m}"),
        );
        rec.check_true(
            c.betti(Field::Qq).unwrap() == betti,
            || format!("rational Betti numbers of arity {m}"),
        );
        if m >= 2 {
            rec.check_true(
                c.euler_characteristic() == 0,
                || format!("Euler characteristic of arity {m}"),
            );
        }
    }
    let c2 = cact1_complex(2).unwrap();
    rec.check_true(c2.cell_counts() == vec![2, 2], || "arity 2 census".into());
    rec.check_true(cact1_trees(2).unwrap().len() == 4, || "four trees in arity 2".into());
    rec
}

fn fibers_suite(seed: u64) -> Recorder {
    let mut rec = Recorder::new("fibers", seed, 0.0);
    for m in 1..=3usize {
        for t in cact1_trees(m).unwrap() {
            let f = fiber_complex(&cactus_in_cell(&t)).unwrap();
            rec.check_true(
                f.complex.reduced_homology_vanishes().unwrap(),
                || format!("fiber over cell {} of arity {m}", t.key()),
            );
        }
    }
    rec
}

fn configs_suite(seed: u64, cases: u64, tol: f64) -> Recorder {
    let mut rec = Recorder::new("configs-cosimplicial", seed, tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 3;
    for _ in 0..cases {
        let n = rng.random_range(1..=5usize);
        let c = rand_config(&mut rng, n, d);
        let i = rng.random_range(0..=n + 1);
        let j = rng.random_range(i + 1..=n + 2);
        let lhs = c.coface(i).unwrap().coface(j).unwrap();
        let rhs = c.coface(j - 1).unwrap().coface(i).unwrap();
        rec.check(lhs.deviation(&rhs), || format!("coface identity ({i},{j}) at n={n}"));
        let k = rng.random_range(0..n);
        let up = c.coface(i).unwrap();
        let got = up.codegeneracy(k).unwrap();
        let want = if i < k {
            c.codegeneracy(k - 1).unwrap().coface(i).unwrap()
        } else if i == k || i == k + 1 {
            c.clone()
        } else {
            c.codegeneracy(k).unwrap().coface(i - 1).unwrap()
        };
        rec.check(got.deviation(&want), || format!("mixed identity ({i},{k}) at n={n}"));
    }
    rec
}

fn action_axioms_suite(seed: u64, cases: u64, tol: f64) -> Recorder {
    let mut rec = Recorder::new("action-axioms", seed, tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 3;
    let unit_cactus = ProjectiveCactus::from_normalized(NormalizedCactus::star(1));
    for _ in 0..cases {
        let n = rng.random_range(1..=4usize);
        let t = rand_t(&mut rng, n);
        let phi = AlignedMap::knot_derived(rand_knot(&mut rng), n, d);
        let lhs = act(&unit_cactus, std::slice::from_ref(&phi), &t).unwrap();
        let rhs = phi.eval(&t).unwrap();
        rec.check(lhs.deviation(&rhs), || "unit law".into());

        let m = rng.random_range(2..=3usize);
        let c = rand_pcact(&mut rng, m);
        let maps = rand_maps(&mut rng, m, n, d);
        let sigmas = Perm::all(m);
        let sigma = sigmas[rng.random_range(0..sigmas.len())].clone();
        let lhs = act(&c.sigma_act(&sigma.inverse()), &maps, &t).unwrap();
        let permuted: Vec<AlignedMap> =
            (1..=m).map(|i| maps[sigma.apply(i) - 1].clone()).collect();
        let rhs = act(&c, &permuted, &t).unwrap();
        rec.check(lhs.deviation(&rhs), || "equivariance".into());

        let a = act(&c, &maps, &t).unwrap();
        let b = act_reversed_order(&c, &maps, &t).unwrap();
        rec.check(a.deviation(&b), || "collapse order independence".into());

        let k = rng.random_range(1..=2usize);
        let c2 = rand_pcact(&mut rng, k);
        let i = rng.random_range(1..=m);
        let maps2 = rand_maps(&mut rng, m + k - 1, n, d);
        let lhs = act(&c.compose(i, &c2).unwrap(), &maps2, &t).unwrap();
        let nested =
            AlignedMap::Action { cactus: c2, inputs: maps2[i - 1..i + k - 1].to_vec() };
        let mut outer_maps: Vec<AlignedMap> = maps2[..i - 1].to_vec();
        outer_maps.push(nested);
        outer_maps.extend_from_slice(&maps2[i + k - 1..]);
        let rhs = act(&c, &outer_maps, &t).unwrap();
        rec.check(lhs.deviation(&rhs), || format!("insertion law at slot {i}"));
    }
    rec
}

fn action_faces_suite(seed: u64, cases: u64, tol: f64) -> Recorder {
    let mut rec = Recorder::new("action-faces", seed, tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 3;
    for _ in 0..cases {
        let n = rng.random_range(2..=4usize);
        let m = rng.random_range(1..=3usize);
        let c = rand_pcact(&mut rng, m);
        let phi = AlignedMap::Action { cactus: c, inputs: rand_maps(&mut rng, m, n, d) };
        let i = rng.random_range(0..=n);
        let u = rand_t(&mut rng, n - 1);
        let dev = face_coherence_deviation(&phi, i, &u).unwrap();
        rec.check(dev, || format!("aligned square at face {i}, n={n}, m={m}"));
    }
    rec
}

fn projection_suite(seed: u64, cases: u64, tol: f64) -> Recorder {
    let mut rec = Recorder::new("projection-compat", seed, tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 3;
    for _ in 0..cases {
        let n = rng.random_range(2..=4usize);
        let m = rng.random_range(1..=3usize);
        let c = rand_pcact(&mut rng, m);
        let maps = rand_maps(&mut rng, m, n, d);
        let action = AlignedMap::Action { cactus: c.clone(), inputs: maps.clone() };
        let lhs = tower_project(action).unwrap();
        let rhs = AlignedMap::Action {
            cactus: c,
            inputs: maps.into_iter().map(|f| tower_project(f).unwrap()).collect(),
        };
        let u = rand_t(&mut rng, n - 1);
        let a = lhs.eval(&u).unwrap();
        let b = rhs.eval(&u).unwrap();
        rec.check(a.deviation(&b), || format!("projection square at n={n}, m={m}"));
    }
    rec
}

fn budney_suite(seed: u64, cases: u64, tol: f64) -> Recorder {
    let mut rec = Recorder::new("budney", seed, tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 3;
    fn sample_dev(f: &KnotMap, g: &KnotMap, rng: &mut ChaCha8Rng, d: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for _ in 0..8 {
            let mut x = DVector::zeros(d);
            x[0] = rng.random_range(-1.2..1.2f64);
            x[1] = rng.random_range(-0.3..0.3f64);
            worst = worst.max((f.eval(&x) - g.eval(&x)).amax());
        }
        worst
    }
    // the tiling element fixes the identity knot exactly
    for m in 1..=4usize {
        let e = OvElement::star(m);
        let f = budney_act(&e, &vec![KnotMap::Identity; m]).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..=20 {
            let mut x = DVector::zeros(d);
            x[0] = -1.0 + 0.1 * k as f64;
            worst = worst.max((f.eval(&x) - x).amax());
        }
        rec.check(worst, || format!("identity knots fixed by the arity-{m} tiling"));
    }
    for _ in 0..cases {
        let m = rng.random_range(1..=3usize);
        let e = gen::rand_ov(&mut rng, m);
        let knots: Vec<KnotMap> = (0..m).map(|_| rand_knot(&mut rng)).collect();
        let reps = e.representatives();
        let base = budney_act_with(&e, &knots, &reps[0]).unwrap();
        for s in reps.iter().skip(1) {
            let other = budney_act_with(&e, &knots, s).unwrap();
            rec.check(sample_dev(&base, &other, &mut rng, d), || {
                "representative independence".into()
            });
        }
        let k = rng.random_range(1..=2usize);
        let inner = gen::rand_ov(&mut rng, k);
        let i = rng.random_range(1..=m);
        let inner_knots: Vec<KnotMap> = (0..k).map(|_| rand_knot(&mut rng)).collect();
        let composed = e.compose_at(i, &inner).unwrap();
        let mut all_knots = Vec::new();
        all_knots.extend_from_slice(&knots[..i - 1]);
        all_knots.extend(inner_knots.iter().cloned());
        all_knots.extend_from_slice(&knots[i..]);
        let lhs = budney_act(&composed, &all_knots).unwrap();
        let g = budney_act(&inner, &inner_knots).unwrap();
        let mut outer_knots = knots.clone();
        outer_knots[i - 1] = g;
        let rhs = budney_act(&e, &outer_knots).unwrap();
        rec.check(sample_dev(&lhs, &rhs, &mut rng, d), || format!("composition at slot {i}"));
        let f = budney_act(&e, &knots).unwrap();
        let mut worst: f64 = 0.0;
        for s in [-1.5f64, -1.0, 1.0, 1.25] {
            let mut x = DVector::zeros(d);
            x[0] = s;
            x[2] = 0.2;
            worst = worst.max((f.eval(&x) - x).amax());
        }
        rec.check(worst, || "identity outside the interval".into());
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_at_small_budgets() {
        for name in SUITES {
            let r = run_suite(name, 1, 10, None).unwrap();
            assert!(r.passed(), "suite {name} failed:\n{}", r.render_human());
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite("pcact-operad", 42, 20, None).unwrap();
        let b = run_suite("pcact-operad", 42, 20, None).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(matches!(run_suite("nope", 0, 1, None), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn failure_records_carry_a_repro_command() {
        let mut rec = Recorder::new("pcact-operad", 7, 0.0);
        rec.check(1.0, || "synthetic".into());
        let rep = rec.finish(0);
        assert!(!rep.passed());
        assert!(rep.failures[0].repro.contains("--seed 7"));
    }
}
