//! Hand-encoded regression fixtures: a large labeled tree exercising the
//! sibling statistics, and a seven-lobe cactus with a twelve-point parameter
//! vector exercising every local-root tie convention of the action.

use crate::cacti::{NormalizedCactus, ProjectiveCactus};
use crate::rat::{q, Q};
use crate::trees::{BwTree, PlantedTree};
use std::collections::BTreeSet;

/// A tree with 19 labeled white vertices.  Root children are the whites
/// (2, 1, 4, 3) in planar order; label sequences increase upwards along every
/// path, so the identity height order is compatible.
pub fn tree_19() -> BwTree {
    // adjacency written as (vertex name, label, children names)
    // black vertices carry label 0
    let spec: Vec<(&str, usize, Vec<&str>)> = vec![
        ("root", 0, vec!["w2", "w1", "w4", "w3"]),
        ("w2", 2, vec!["b2"]),
        ("b2", 0, vec!["w18"]),
        ("w18", 18, vec![]),
        ("w1", 1, vec!["v1"]),
        ("v1", 0, vec!["w5"]),
        ("w5", 5, vec!["b11"]),
        ("b11", 0, vec!["w10", "w9", "w6", "w11", "w13", "w12"]),
        ("w10", 10, vec![]),
        ("w9", 9, vec!["v2"]),
        ("v2", 0, vec!["w15"]),
        ("w15", 15, vec![]),
        ("w6", 6, vec!["v6"]),
        ("v6", 0, vec!["w7", "w8"]),
        ("w7", 7, vec!["b7"]),
        ("b7", 0, vec!["w14"]),
        ("w14", 14, vec![]),
        ("w8", 8, vec![]),
        ("w11", 11, vec![]),
        ("w13", 13, vec![]),
        ("w12", 12, vec![]),
        ("w4", 4, vec!["v3"]),
        ("v3", 0, vec!["w16", "w17"]),
        ("w16", 16, vec!["b16"]),
        ("b16", 0, vec!["w19"]),
        ("w19", 19, vec![]),
        ("w17", 17, vec![]),
        ("w3", 3, vec![]),
    ];
    build_tree(&spec)
}

fn build_tree(spec: &[(&str, usize, Vec<&str>)]) -> BwTree {
    let index = |name: &str| spec.iter().position(|(n, _, _)| *n == name).unwrap();
    let children: Vec<Vec<usize>> =
        spec.iter().map(|(_, _, kids)| kids.iter().map(|k| index(k)).collect()).collect();
    let label: Vec<usize> = spec.iter().map(|(_, l, _)| *l).collect();
    BwTree::new(PlantedTree { root: 0, children }, label).unwrap()
}

/// A seven-lobe projective cactus.  Lobes 2, 7, 5 sit at the global root in
/// that order; lobe 2 carries lobes 6 and 1; lobe 1 carries lobes 4 and 3.
pub fn seven_lobe_cactus() -> ProjectiveCactus {
    let spec: Vec<(&str, usize, Vec<&str>)> = vec![
        ("root", 0, vec!["w2", "w7", "w5"]),
        ("w2", 2, vec!["b6", "b1"]),
        ("b6", 0, vec!["w6"]),
        ("w6", 6, vec![]),
        ("b1", 0, vec!["w1"]),
        ("w1", 1, vec!["b4", "b3"]),
        ("b4", 0, vec!["w4"]),
        ("w4", 4, vec![]),
        ("b3", 0, vec!["w3"]),
        ("w3", 3, vec![]),
        ("w7", 7, vec![]),
        ("w5", 5, vec![]),
    ];
    let tree = build_tree(&spec);
    let one = q(1, 1);
    let arcs: Vec<Vec<Q>> = vec![
        vec![q(1, 3), q(1, 3), q(1, 3)], // lobe 1
        vec![q(1, 2), q(1, 4), q(1, 4)], // lobe 2
        vec![one.clone()],               // lobe 3
        vec![one.clone()],               // lobe 4
        vec![one.clone()],               // lobe 5
        vec![one.clone()],               // lobe 6
        vec![one],                       // lobe 7
    ];
    let shape = NormalizedCactus::new(tree, arcs).unwrap();
    let lengths = vec![q(3, 16), q(1, 4), q(1, 8), q(1, 8), q(1, 8), q(1, 16), q(1, 8)];
    ProjectiveCactus::new(shape, lengths).unwrap()
}

/// Twelve nondecreasing parameters in `[-1,1]` for [`seven_lobe_cactus`],
/// placed so that one lands exactly at the local root of lobe 4 (first
/// appearance) and one at the closing point of lobe 3 (last appearance).
pub fn seven_lobe_t() -> Vec<Q> {
    vec![
        q(-7, 8),
        q(-15, 32),
        q(-13, 32),
        q(-3, 8),
        q(1, 16),
        q(1, 8),
        q(3, 16),
        q(1, 4),
        q(5, 8),
        q(13, 16),
        q(7, 8),
        q(15, 16),
    ]
}

/// The expected index sets `S_ℓ` for the fixture above, `ℓ = 1..=7`.
pub fn seven_lobe_s_table() -> Vec<BTreeSet<usize>> {
    let raw: Vec<Vec<usize>> = vec![
        vec![1, 2, 3, 4, 8],
        vec![0, 1, 8],
        vec![4, 5, 6, 7, 8],
        vec![3, 4],
        vec![9, 10, 11, 12],
        vec![1],
        vec![8, 9],
    ];
    raw.into_iter().map(|v| v.into_iter().collect()).collect()
}

/// The expected collapsed insertion tree for the fixture: the key lists each
/// internal vertex with its leaves and internal children in planar order.
pub fn seven_lobe_upsilon_key() -> String {
    "v0(v2(t1,v6(),v1(t2,t3,v4(t4,),v3(t5,t6,t7,t8,),),),v7(t9,),v5(t10,t11,t12,),)".to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    #[test]
    fn stats_on_the_19_tree() {
        let t = tree_19();
        assert_eq!(t.num_whites(), 19);
        let id = Perm::identity(19);
        assert!(t.is_compatible(&id));

        assert_eq!(t.alpha_label(3).unwrap(), 1);
        assert_eq!(t.lambda(3).unwrap(), vec![2, 1, 4]);
        assert_eq!(t.lambda_plus(3, &id).unwrap(), vec![4]);
        assert_eq!(t.rho(3).unwrap(), Vec::<usize>::new());
        assert_eq!(t.rho_plus(3, &id).unwrap(), Vec::<usize>::new());

        assert_eq!(t.alpha_label(4).unwrap(), 4);
        assert_eq!(t.lambda(4).unwrap(), vec![2, 1]);
        assert_eq!(t.lambda_plus(4, &id).unwrap(), Vec::<usize>::new());
        assert_eq!(t.rho(4).unwrap(), vec![3]);
        assert_eq!(t.rho_plus(4, &id).unwrap(), Vec::<usize>::new());

        assert_eq!(t.alpha_label(11).unwrap(), 1);
        assert_eq!(t.lambda(11).unwrap(), vec![10, 9, 6]);
        assert_eq!(t.lambda_plus(11, &id).unwrap(), Vec::<usize>::new());
        assert_eq!(t.rho(11).unwrap(), vec![13, 12]);
        assert_eq!(t.rho_plus(11, &id).unwrap(), vec![13, 12]);

        // named black vertices, located by the labels directly above them
        let root = t.root();
        assert_eq!(t.alpha(root), 19);
        let parent = t.parent_map();
        let above = |label: usize| parent[t.white_vertex(label).unwrap()].unwrap();
        assert_eq!(t.alpha(above(5)), 11); // v1
        assert_eq!(t.alpha(above(15)), 1); // v2
        assert_eq!(t.alpha(above(16)), 3); // v3
        assert_eq!(t.alpha(above(7)), 3); // v6
    }

    #[test]
    fn iterated_collapse_reaches_dimension_zero_in_dim_steps() {
        let mut t = tree_19();
        let d = t.dim();
        assert_eq!(d, 8);
        let mut steps = 0;
        'outer: loop {
            for l in 1..=19 {
                let v = t.white_vertex(l).unwrap();
                if t.arity(v) > 0 {
                    t = t.angle_collapse(l, 0).unwrap();
                    steps += 1;
                    continue 'outer;
                }
            }
            break;
        }
        assert_eq!(steps, d);
        assert_eq!(t.dim(), 0);
    }

    #[test]
    fn seven_lobe_cactus_is_consistent() {
        let c = seven_lobe_cactus();
        assert_eq!(c.arity(), 7);
        let total: Q = c.lobe_lengths().iter().sum();
        assert_eq!(total, q(1, 1));
        assert_eq!(c.underlying_tree().dim(), 4);
    }

    #[test]
    fn seven_lobe_round_trips_through_arclists() {
        let c = seven_lobe_cactus();
        let list = c.to_arclist();
        let back = crate::cacti::from_arclist(&list).unwrap();
        assert_eq!(&back, c.as_cactus());
    }
}
