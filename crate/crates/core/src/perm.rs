//! Permutations of `{1..m}` and linear extensions of height orders.

use std::collections::BTreeSet;

/// A permutation of `{1..m}`, stored as the image list `[p(1), .., p(m)]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(m: usize) -> Perm {
        Perm((1..=m).collect())
    }

    /// Builds from a 1-based image list; `None` if it is not a bijection.
    pub fn from_images(images: Vec<usize>) -> Option<Perm> {
        let m = images.len();
        let mut seen = vec![false; m + 1];
        for &x in &images {
            if x == 0 || x > m || seen[x] {
                return None;
            }
            seen[x] = true;
        }
        Some(Perm(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| x == i + 1)
    }

    /// `p(i)` for `i` in `1..=m`.
    pub fn apply(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x - 1] = i + 1;
        }
        Perm(inv)
    }

    /// Composition `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len());
        Perm((1..=self.len()).map(|i| self.apply(other.apply(i))).collect())
    }

    /// All permutations of `{1..m}` in lexicographic order of their image lists.
    pub fn all(m: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(m);
        let mut used = vec![false; m + 1];
        fn rec(m: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Perm>) {
            if cur.len() == m {
                out.push(Perm(cur.clone()));
                return;
            }
            for x in 1..=m {
                if !used[x] {
                    used[x] = true;
                    cur.push(x);
                    rec(m, cur, used, out);
                    cur.pop();
                    used[x] = false;
                }
            }
        }
        rec(m, &mut cur, &mut used, &mut out);
        out
    }

    /// Block sum: acts as `self` on the first `m` letters shifted blockwise by `ks`.
    /// `block_perm(σ, ks)` permutes `1..=Σks` by moving block `i` (of size `ks[i-1]`)
    /// to the position block `σ⁻¹` dictates, preserving the order inside blocks.
    pub fn block_perm(&self, ks: &[usize]) -> Perm {
        assert_eq!(self.len(), ks.len());
        let total: usize = ks.iter().sum();
        let mut offsets = vec![0usize; ks.len() + 1];
        for i in 0..ks.len() {
            offsets[i + 1] = offsets[i] + ks[i];
        }
        // image of the j-th letter of block i: position of block i after permuting
        // blocks by self, plus j.
        let mut images = vec![0usize; total];
        // the blocks appear in the order self(1), self(2), ... at the target
        let mut target_offset = vec![0usize; ks.len() + 1];
        for slot in 0..ks.len() {
            let b = self.apply(slot + 1) - 1;
            target_offset[slot + 1] = target_offset[slot] + ks[b];
        }
        // block b sits at slot self^{-1}(b+1)
        let inv = self.inverse();
        for b in 0..ks.len() {
            let slot = inv.apply(b + 1) - 1;
            for j in 0..ks[b] {
                // letter offsets[b]+j+1 maps to target_offset[slot]+j+1
                images[target_offset[slot] + j] = offsets[b] + j + 1;
            }
        }
        Perm(images)
    }

    /// Direct sum `τ₁ ⊕ ... ⊕ τ_m` acting blockwise.
    pub fn direct_sum(parts: &[Perm]) -> Perm {
        let mut images = Vec::new();
        let mut off = 0usize;
        for p in parts {
            for i in 1..=p.len() {
                images.push(off + p.apply(i));
            }
            off += p.len();
        }
        Perm(images)
    }
}

/// All linear extensions of the strict relation `below ⊆ {1..m}²`, as permutations
/// read as height lists: `σ(1)` is the lowest label.  Returned in lexicographic
/// order of the image lists; the relation must be acyclic.
pub fn linear_extensions(m: usize, below: &BTreeSet<(usize, usize)>) -> Vec<Perm> {
    let mut preds: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m + 1];
    for &(a, b) in below {
        preds[b].insert(a);
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(m);
    let mut placed = vec![false; m + 1];
    fn rec(
        m: usize,
        preds: &[BTreeSet<usize>],
        cur: &mut Vec<usize>,
        placed: &mut Vec<bool>,
        out: &mut Vec<Perm>,
    ) {
        if cur.len() == m {
            out.push(Perm::from_images(cur.clone()).unwrap());
            return;
        }
        for x in 1..=m {
            if !placed[x] && preds[x].iter().all(|&p| placed[p]) {
                placed[x] = true;
                cur.push(x);
                rec(m, preds, cur, placed, out);
                cur.pop();
                placed[x] = false;
            }
        }
    }
    rec(m, &preds, &mut cur, &mut placed, &mut out);
    out
}
