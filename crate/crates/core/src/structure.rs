//! Structural classification of `p`-groups: nilpotency class, exponent,
//! regularity, metacyclic shape, and detection of regular-wreath quotients
//! with an explicit verified isomorphism.

use std::sync::Arc;

use crate::catalog;
use crate::error::Error;
use crate::group::{
    all_subgroups, commutator_subgroup, p_part, quotient_group, FiniteGroup, GroupHom,
    QuotientData, Subgroup,
};

/// Shape summary of a finite `p`-group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureProfile {
    pub order: usize,
    pub nilpotency_class: u32,
    pub exponent: u64,
    pub is_abelian: bool,
    pub is_regular: bool,
    pub is_metacyclic: bool,
}

/// Computes the profile of a `p`-group by direct search.
///
/// Regularity is the power-commutator condition tested on every ordered
/// pair: with `H = <x, y>` and `D = [H, H]`, the element
/// `(xy)^p (x^p y^p)^{-1}` must lie in `<d^p : d in D>`. Metacyclic means
/// some cyclic normal subgroup has cyclic quotient.
pub fn structure_profile(s: &Subgroup, p: u64) -> StructureProfile {
    assert_eq!(
        p_part(s.order() as u64, p) as usize,
        s.order(),
        "profile is defined for p-groups"
    );
    let parent = s.parent();
    let is_abelian = s.is_abelian();
    let exponent = s.exponent();

    let mut class = 0;
    let mut gamma = s.clone();
    while gamma.order() > 1 {
        gamma = commutator_subgroup(&gamma, s);
        class += 1;
    }

    let is_regular = if is_abelian {
        true
    } else {
        let mut ok = true;
        'outer: for &x in s.members() {
            for &y in s.members() {
                if x == 0 || y == 0 {
                    continue;
                }
                let h = Subgroup::generate(parent, &[x, y]);
                let d = commutator_subgroup(&h, &h);
                let powers: Vec<u32> =
                    d.members().iter().map(|&t| parent.power(t as usize, p) as u32).collect();
                let target = Subgroup::generate(parent, &powers);
                let xy_p = parent.power(parent.mul(x as usize, y as usize), p);
                let xpyp = parent.mul(parent.power(x as usize, p), parent.power(y as usize, p));
                let defect = parent.mul(xy_p, parent.inv(xpyp));
                if !target.contains(defect) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        ok
    };

    let is_metacyclic = {
        let mut cyclic_subs: Vec<Subgroup> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for &x in s.members() {
            let c = Subgroup::generate(parent, &[x]);
            if seen.insert(c.members().to_vec()) {
                cyclic_subs.push(c);
            }
        }
        cyclic_subs.into_iter().any(|n| {
            n.is_normal_in(s)
                && quotient_group(s, &n)
                    .map(|q| Subgroup::full(&q.group).is_cyclic())
                    .unwrap_or(false)
        })
    };

    StructureProfile {
        order: s.order(),
        nilpotency_class: class,
        exponent,
        is_abelian,
        is_regular,
        is_metacyclic,
    }
}

/// An explicit isomorphism witnessing a wreath-product quotient.
pub struct WreathWitness {
    pub kernel: Subgroup,
    pub quotient: QuotientData,
    /// Bijective homomorphism from the quotient onto the reference copy of
    /// `C_p wr C_p`; verified pointwise at construction.
    pub iso: GroupHom,
}

/// Searches for a normal subgroup `K` with `S/K` isomorphic to the regular
/// wreath product `C_p wr C_p`. Supported for `p` in `{2, 3}`.
pub fn has_wreath_quotient(s: &Subgroup, p: u64) -> Result<Option<WreathWitness>, Error> {
    if p != 2 && p != 3 {
        return Err(Error::Unsupported(format!(
            "wreath-quotient detection supports p = 2 and p = 3, got {p}"
        )));
    }
    let wreath = catalog::build(&format!("wreath:{p}"))?;
    let target = wreath.order();
    if s.order() % target != 0 {
        return Ok(None);
    }
    let kernel_order = s.order() / target;
    let candidates: Vec<Subgroup> = if kernel_order == 1 {
        vec![Subgroup::trivial(s.parent())]
    } else {
        all_subgroups(s)?
            .into_iter()
            .filter(|k| k.order() == kernel_order && k.is_normal_in(s))
            .collect()
    };
    for kernel in candidates {
        let quotient = quotient_group(s, &kernel).expect("kernel was checked normal");
        if let Some(iso) = find_isomorphism(&quotient.group, &wreath) {
            return Ok(Some(WreathWitness { kernel, quotient, iso }));
        }
    }
    Ok(None)
}

/// Searches for an isomorphism `a -> b` by backtracking over images of a
/// small generating set, pruned by element-order profiles. The returned map
/// is validated as a bijective homomorphism on the full table.
pub fn find_isomorphism(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> Option<GroupHom> {
    let n = a.order();
    if n != b.order() {
        return None;
    }
    let mut profile_a: Vec<u64> = (0..n).map(|x| a.element_order(x)).collect();
    let mut profile_b: Vec<u64> = (0..n).map(|x| b.element_order(x)).collect();
    let orders_a = profile_a.clone();
    profile_a.sort_unstable();
    profile_b.sort_unstable();
    if profile_a != profile_b {
        return None;
    }

    let gens = Subgroup::full(a).small_generating_set();
    let candidates: Vec<Vec<u32>> = gens
        .iter()
        .map(|&g| {
            let o = orders_a[g as usize];
            (0..n as u32).filter(|&h| b.element_order(h as usize) == o).collect()
        })
        .collect();

    let mut images = vec![0u32; gens.len()];
    fn assign(
        a: &Arc<FiniteGroup>,
        b: &Arc<FiniteGroup>,
        gens: &[u32],
        candidates: &[Vec<u32>],
        images: &mut Vec<u32>,
        depth: usize,
    ) -> Option<Vec<u32>> {
        if depth == gens.len() {
            return extend_to_isomorphism(a, b, gens, images);
        }
        for &h in &candidates[depth] {
            images[depth] = h;
            if let Some(map) = assign(a, b, gens, candidates, images, depth + 1) {
                return Some(map);
            }
        }
        None
    }

    let map = assign(a, b, &gens, &candidates, &mut images, 0)?;
    let hom = GroupHom::new(Subgroup::full(a), Subgroup::full(b), map)
        .expect("extension already verified multiplicativity");
    debug_assert!(hom.is_injective());
    Some(hom)
}

/// Propagates generator images through the Cayley graph of `a`; returns the
/// full image vector when the propagation is consistent, bijective, and
/// multiplicative on every pair.
fn extend_to_isomorphism(
    a: &Arc<FiniteGroup>,
    b: &Arc<FiniteGroup>,
    gens: &[u32],
    images: &[u32],
) -> Option<Vec<u32>> {
    let n = a.order();
    let unset = u32::MAX;
    let mut map = vec![unset; n];
    map[0] = 0;
    let mut frontier = vec![0usize];
    while let Some(x) = frontier.pop() {
        let y = map[x] as usize;
        for (&g, &h) in gens.iter().zip(images.iter()) {
            let xg = a.mul(x, g as usize);
            let yh = b.mul(y, h as usize) as u32;
            if map[xg] == unset {
                map[xg] = yh;
                frontier.push(xg);
            } else if map[xg] != yh {
                return None;
            }
        }
    }
    if map.contains(&unset) {
        // Generators of `a` must reach everything; stalling means the chosen
        // generating set was wrong, which would be a bug.
        unreachable!("generating set failed to reach the whole group");
    }
    let mut seen = vec![false; n];
    for &y in &map {
        if seen[y as usize] {
            return None;
        }
        seen[y as usize] = true;
    }
    for x in 0..n {
        for y in 0..n {
            if map[a.mul(x, y)] != b.mul(map[x] as usize, map[y] as usize) as u32 {
                return None;
            }
        }
    }
    Some(map)
}
