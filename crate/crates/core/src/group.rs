//! Dense finite-group arithmetic.
//!
//! A [`FiniteGroup`] is a full multiplication table over element indices
//! `0..n` with the identity pinned at index 0. Subgroups are sorted index
//! sets tied to their parent table, and homomorphisms store the full image
//! vector of their domain. All higher layers (fusion systems, Burnside
//! modules, transfer maps) compute with these indices, so every result is
//! exact and reproducible.

use std::fmt;
use std::sync::Arc;

use crate::error::Error;

/// Largest group order the dense representation accepts.
pub const MAX_ORDER: usize = 400;

/// Largest subgroup order for which exhaustive subgroup enumeration runs.
pub const MAX_ENUMERATION_ORDER: usize = 64;

/// `p`-part of `n`: the largest power of `p` dividing `n`.
pub fn p_part(mut n: u64, p: u64) -> u64 {
    let mut part = 1;
    while n % p == 0 {
        part *= p;
        n /= p;
    }
    part
}

/// Prime factors of `n`, ascending, without multiplicity.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn lcm(a: u64, b: u64) -> u64 {
    let mut x = a;
    let mut y = b;
    while y != 0 {
        let t = x % y;
        x = y;
        y = t;
    }
    a / x * b
}

/// Splitmix64 step, used for deterministic sampling during validation.
fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A finite group stored as a complete Cayley table.
///
/// Index 0 is the identity. `mul` is row-major: `mul[a * order + b]` is the
/// product `a * b`. The table is validated at construction (closure, latin
/// square, identity, inverses, associativity), so arithmetic never fails.
pub struct FiniteGroup {
    name: String,
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    labels: Vec<String>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.order)
    }
}

impl FiniteGroup {
    /// Validates and wraps a multiplication table.
    ///
    /// Associativity is checked on all triples up to order 100 and on
    /// 100_000 deterministic samples beyond that; the remaining axioms are
    /// always checked in full.
    pub fn new(
        name: impl Into<String>,
        order: usize,
        mul: Vec<u32>,
        labels: Option<Vec<String>>,
    ) -> Result<Arc<FiniteGroup>, Error> {
        let name = name.into();
        if order == 0 {
            return Err(Error::Parse("group order must be positive".into()));
        }
        if order > MAX_ORDER {
            return Err(Error::OrderBound(order, MAX_ORDER));
        }
        if mul.len() != order * order {
            return Err(Error::Parse(format!(
                "expected {} table entries, got {}",
                order * order,
                mul.len()
            )));
        }
        if mul.iter().any(|&x| x as usize >= order) {
            return Err(Error::Parse("table entry out of range".into()));
        }
        // Identity at index 0 and latin-square rows/columns.
        let mut seen_row = vec![false; order];
        let mut seen_col = vec![false; order];
        for a in 0..order {
            if mul[a * order] as usize != a || mul[a] as usize != a {
                return Err(Error::Parse("index 0 is not a two-sided identity".into()));
            }
            seen_row.iter_mut().for_each(|s| *s = false);
            seen_col.iter_mut().for_each(|s| *s = false);
            for b in 0..order {
                let r = mul[a * order + b] as usize;
                let c = mul[b * order + a] as usize;
                if seen_row[r] || seen_col[c] {
                    return Err(Error::Parse("table row or column is not a permutation".into()));
                }
                seen_row[r] = true;
                seen_col[c] = true;
            }
        }
        let mut inv = vec![u32::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if mul[a * order + b] == 0 {
                    if mul[b * order + a] != 0 {
                        return Err(Error::Parse("one-sided inverse".into()));
                    }
                    inv[a] = b as u32;
                }
            }
        }
        let assoc = |a: usize, b: usize, c: usize| {
            mul[mul[a * order + b] as usize * order + c] == mul[a * order + mul[b * order + c] as usize]
        };
        if order <= 100 {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if !assoc(a, b, c) {
                            return Err(Error::Parse(format!(
                                "associativity fails at ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut state = 0x5eed0f_u64;
            for _ in 0..100_000 {
                let a = (splitmix(&mut state) % order as u64) as usize;
                let b = (splitmix(&mut state) % order as u64) as usize;
                let c = (splitmix(&mut state) % order as u64) as usize;
                if !assoc(a, b, c) {
                    return Err(Error::Parse(format!("associativity fails at ({a}, {b}, {c})")));
                }
            }
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != order {
                    return Err(Error::Parse("label count does not match order".into()));
                }
                l
            }
            None => (0..order).map(|i| format!("g{i}")).collect(),
        };
        Ok(Arc::new(FiniteGroup { name, order, mul, inv, labels }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// Conjugation `g x g^{-1}`.
    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// Commutator `x^{-1} y^{-1} x y`.
    #[inline]
    pub fn comm(&self, x: usize, y: usize) -> usize {
        self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y))
    }

    /// `x^k` for `k >= 0`.
    pub fn power(&self, x: usize, k: u64) -> usize {
        let mut acc = 0;
        let mut base = x;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn element_order(&self, x: usize) -> u64 {
        let mut n = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            n += 1;
        }
        n
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

fn mask_words(order: usize) -> usize {
    order.div_ceil(64)
}

/// A subgroup of a [`FiniteGroup`], stored as a sorted member list plus a
/// bitmask for O(1) membership tests. Cloning is cheap.
#[derive(Clone)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    members: Arc<Vec<u32>>,
    mask: Arc<Vec<u64>>,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {} of {})", self.order(), self.parent.name())
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) && self.members == other.members
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    fn from_sorted_members(parent: Arc<FiniteGroup>, members: Vec<u32>) -> Subgroup {
        let mut mask = vec![0u64; mask_words(parent.order())];
        for &m in &members {
            mask[m as usize / 64] |= 1 << (m % 64);
        }
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(!members.is_empty() && members[0] == 0);
        Subgroup { parent, members: Arc::new(members), mask: Arc::new(mask) }
    }

    /// The whole group as a subgroup of itself.
    pub fn full(parent: &Arc<FiniteGroup>) -> Subgroup {
        Subgroup::from_sorted_members(parent.clone(), (0..parent.order() as u32).collect())
    }

    pub fn trivial(parent: &Arc<FiniteGroup>) -> Subgroup {
        Subgroup::from_sorted_members(parent.clone(), vec![0])
    }

    /// Closure of `gens` under multiplication.
    pub fn generate(parent: &Arc<FiniteGroup>, gens: &[u32]) -> Subgroup {
        let order = parent.order();
        let mut mask = vec![0u64; mask_words(order)];
        let mut elems: Vec<u32> = Vec::new();
        let push = |mask: &mut Vec<u64>, elems: &mut Vec<u32>, x: u32| {
            let (w, b) = (x as usize / 64, x % 64);
            if mask[w] >> b & 1 == 0 {
                mask[w] |= 1 << b;
                elems.push(x);
            }
        };
        push(&mut mask, &mut elems, 0);
        for &g in gens {
            assert!((g as usize) < order, "generator out of range");
            push(&mut mask, &mut elems, g);
        }
        let mut i = 0;
        while i < elems.len() {
            let a = elems[i] as usize;
            for j in 0..=i {
                let b = elems[j] as usize;
                let ab = parent.mul(a, b) as u32;
                push(&mut mask, &mut elems, ab);
                let ba = parent.mul(b, a) as u32;
                push(&mut mask, &mut elems, ba);
            }
            i += 1;
        }
        elems.sort_unstable();
        Subgroup::from_sorted_members(parent.clone(), elems)
    }

    /// `<self, extra>`.
    pub fn generated_with(&self, extra: &[u32]) -> Subgroup {
        let mut gens: Vec<u32> = self.members.as_ref().clone();
        gens.extend_from_slice(extra);
        Subgroup::generate(&self.parent, &gens)
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.mask[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent)
            && self.mask.iter().zip(other.mask.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn is_full(&self) -> bool {
        self.order() == self.parent.order()
    }

    pub fn index_in(&self, scope: &Subgroup) -> usize {
        debug_assert!(self.is_subgroup_of(scope));
        scope.order() / self.order()
    }

    /// `g * self * g^{-1}`.
    pub fn conjugate(&self, g: usize) -> Subgroup {
        let mut members: Vec<u32> =
            self.members.iter().map(|&x| self.parent.conj(g, x as usize) as u32).collect();
        members.sort_unstable();
        Subgroup::from_sorted_members(self.parent.clone(), members)
    }

    pub fn is_normal_in(&self, scope: &Subgroup) -> bool {
        assert!(self.is_subgroup_of(scope));
        scope
            .members
            .iter()
            .all(|&g| self.members.iter().all(|&x| self.contains(self.parent.conj(g as usize, x as usize))))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        assert!(Arc::ptr_eq(&self.parent, &other.parent));
        let members: Vec<u32> =
            self.members.iter().copied().filter(|&x| other.contains(x as usize)).collect();
        Subgroup::from_sorted_members(self.parent.clone(), members)
    }

    /// Smallest subgroup containing both operands.
    pub fn join(&self, other: &Subgroup) -> Subgroup {
        assert!(Arc::ptr_eq(&self.parent, &other.parent));
        let mut gens: Vec<u32> = self.members.as_ref().clone();
        gens.extend_from_slice(&other.members);
        Subgroup::generate(&self.parent, &gens)
    }

    /// The set `{a * b}`; panics unless that set is already a subgroup
    /// (it always is when either factor normalizes the other).
    pub fn product_with(&self, other: &Subgroup) -> Subgroup {
        let join = self.join(other);
        let expected = self.order() * other.order() / self.intersection(other).order();
        assert_eq!(
            join.order(),
            expected,
            "setwise product is not a subgroup"
        );
        join
    }

    pub fn is_abelian(&self) -> bool {
        self.members.iter().all(|&a| {
            self.members
                .iter()
                .all(|&b| self.parent.mul(a as usize, b as usize) == self.parent.mul(b as usize, a as usize))
        })
    }

    pub fn exponent(&self) -> u64 {
        self.members
            .iter()
            .fold(1, |acc, &x| lcm(acc, self.parent.element_order(x as usize)))
    }

    pub fn is_cyclic(&self) -> bool {
        self.members.iter().any(|&x| self.parent.element_order(x as usize) as usize == self.order())
    }

    pub fn is_elementary_abelian(&self, p: u64) -> bool {
        self.is_abelian()
            && self
                .members
                .iter()
                .all(|&x| x == 0 || self.parent.element_order(x as usize) == p)
    }

    /// Generator indices for a small generating set, greedy by element order.
    pub fn small_generating_set(&self) -> Vec<u32> {
        let mut best: Vec<u32> = Vec::new();
        let mut current = Subgroup::trivial(&self.parent);
        // Prefer high-order elements so the set stays short.
        let mut by_order: Vec<u32> = self.members.as_ref().clone();
        by_order.sort_by_key(|&x| std::cmp::Reverse(self.parent.element_order(x as usize)));
        while current.order() < self.order() {
            let next = by_order
                .iter()
                .copied()
                .find(|&x| !current.contains(x as usize))
                .expect("generating set construction stalled");
            best.push(next);
            current = current.generated_with(&[next]);
        }
        if best.is_empty() {
            best.push(0);
        }
        best
    }

    /// Member labels of a small generating set, sorted.
    pub fn generator_words(&self) -> Vec<String> {
        let mut words: Vec<String> = self
            .small_generating_set()
            .iter()
            .map(|&x| self.parent.label(x as usize).to_string())
            .collect();
        words.sort();
        words
    }
}

/// A homomorphism between subgroups, possibly of different parent tables.
///
/// `images[i]` is the image of `domain.members()[i]` as an element index of
/// `codomain.parent()`. Construction verifies multiplicativity in full.
#[derive(Clone)]
pub struct GroupHom {
    domain: Subgroup,
    codomain: Subgroup,
    images: Vec<u32>,
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GroupHom({} -> {}, domain order {})",
            self.domain.parent.name(),
            self.codomain.parent.name(),
            self.domain.order()
        )
    }
}

impl PartialEq for GroupHom {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain
            && Arc::ptr_eq(&self.codomain.parent, &other.codomain.parent)
            && self.images == other.images
    }
}

impl Eq for GroupHom {}

impl GroupHom {
    pub fn new(domain: Subgroup, codomain: Subgroup, images: Vec<u32>) -> Result<GroupHom, Error> {
        if images.len() != domain.order() {
            return Err(Error::Parse("image vector length mismatch".into()));
        }
        if images.iter().any(|&y| !codomain.contains(y as usize)) {
            return Err(Error::Parse("image outside codomain".into()));
        }
        let hom = GroupHom { domain, codomain, images };
        for &a in hom.domain.members() {
            for &b in hom.domain.members() {
                let ab = hom.domain.parent.mul(a as usize, b as usize);
                let lhs = hom.apply(ab);
                let rhs = hom.codomain.parent.mul(hom.apply(a as usize), hom.apply(b as usize));
                if lhs != rhs {
                    return Err(Error::Parse("map is not a homomorphism".into()));
                }
            }
        }
        Ok(hom)
    }

    pub fn identity(sub: &Subgroup) -> GroupHom {
        GroupHom {
            domain: sub.clone(),
            codomain: sub.clone(),
            images: sub.members().to_vec(),
        }
    }

    pub fn inclusion(sub: &Subgroup, into: &Subgroup) -> GroupHom {
        assert!(sub.is_subgroup_of(into));
        GroupHom { domain: sub.clone(), codomain: into.clone(), images: sub.members().to_vec() }
    }

    /// `x -> g x g^{-1}` as a map `domain -> codomain` within one parent.
    /// Panics if the conjugate lands outside the codomain.
    pub fn conjugation(g: usize, domain: &Subgroup, codomain: &Subgroup) -> GroupHom {
        assert!(Arc::ptr_eq(&domain.parent, &codomain.parent));
        let images: Vec<u32> = domain
            .members()
            .iter()
            .map(|&x| {
                let y = domain.parent.conj(g, x as usize);
                assert!(codomain.contains(y), "conjugate escapes codomain");
                y as u32
            })
            .collect();
        GroupHom { domain: domain.clone(), codomain: codomain.clone(), images }
    }

    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    pub fn codomain(&self) -> &Subgroup {
        &self.codomain
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        let pos = self
            .domain
            .members()
            .binary_search(&(x as u32))
            .expect("element outside the domain");
        self.images[pos] as usize
    }

    pub fn image_subgroup(&self) -> Subgroup {
        let mut members = self.images.clone();
        members.sort_unstable();
        members.dedup();
        Subgroup::from_sorted_members(self.codomain.parent.clone(), members)
    }

    pub fn kernel(&self) -> Subgroup {
        let members: Vec<u32> = self
            .domain
            .members()
            .iter()
            .copied()
            .filter(|&x| self.apply(x as usize) == 0)
            .collect();
        Subgroup::from_sorted_members(self.domain.parent.clone(), members)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().order() == 1
    }

    /// `self . first` (apply `first`, then `self`).
    pub fn compose(&self, first: &GroupHom) -> GroupHom {
        let images: Vec<u32> =
            first.domain.members().iter().map(|&x| self.apply(first.apply(x as usize)) as u32).collect();
        GroupHom { domain: first.domain.clone(), codomain: self.codomain.clone(), images }
    }

    pub fn restrict(&self, sub: &Subgroup) -> GroupHom {
        assert!(sub.is_subgroup_of(&self.domain));
        let images: Vec<u32> = sub.members().iter().map(|&x| self.apply(x as usize) as u32).collect();
        GroupHom { domain: sub.clone(), codomain: self.codomain.clone(), images }
    }

    /// Inverse of an injective map, defined on its image.
    pub fn inverse_on_image(&self) -> GroupHom {
        assert!(self.is_injective());
        let image = self.image_subgroup();
        let mut pairs: Vec<(u32, u32)> = self
            .domain
            .members()
            .iter()
            .zip(self.images.iter())
            .map(|(&x, &y)| (y, x))
            .collect();
        pairs.sort_unstable();
        let images: Vec<u32> = pairs.into_iter().map(|(_, x)| x).collect();
        GroupHom { domain: image, codomain: self.domain.clone(), images }
    }

    /// Restricts the codomain to the stated subgroup (must contain the image).
    pub fn with_codomain(&self, codomain: &Subgroup) -> GroupHom {
        assert!(Arc::ptr_eq(&codomain.parent, &self.codomain.parent));
        assert!(self.images.iter().all(|&y| codomain.contains(y as usize)));
        GroupHom { domain: self.domain.clone(), codomain: codomain.clone(), images: self.images.clone() }
    }
}

/// Left-coset bookkeeping for `scope / sub`: a transversal plus the
/// rep-of-coset lookup used by transfer sums.
pub struct CosetData {
    scope: Subgroup,
    sub: Subgroup,
    reps: Vec<u32>,
    rep_of: Vec<u32>,
}

impl CosetData {
    pub fn reps(&self) -> &[u32] {
        &self.reps
    }

    /// Representative of the coset `x * sub`; `x` must lie in the scope.
    #[inline]
    pub fn rep(&self, x: usize) -> usize {
        let r = self.rep_of[x];
        debug_assert!(r != u32::MAX, "element outside the coset scope");
        r as usize
    }

    /// The transversal action `x . t`: representative of `(x t) sub`.
    #[inline]
    pub fn dot(&self, x: usize, t: usize) -> usize {
        self.rep(self.scope.parent.mul(x, t))
    }

    pub fn scope(&self) -> &Subgroup {
        &self.scope
    }

    pub fn sub(&self) -> &Subgroup {
        &self.sub
    }
}

/// Left-coset transversal of `sub` in `scope`, ordered by least member.
/// Every coset `t * sub` is tagged with its representative `t`.
pub fn coset_data(scope: &Subgroup, sub: &Subgroup) -> CosetData {
    assert!(sub.is_subgroup_of(scope), "transversal needs a nested pair");
    let parent = scope.parent();
    let mut rep_of = vec![u32::MAX; parent.order()];
    let mut reps = Vec::with_capacity(scope.order() / sub.order());
    for &t in scope.members() {
        if rep_of[t as usize] == u32::MAX {
            reps.push(t);
            for &s in sub.members() {
                rep_of[parent.mul(t as usize, s as usize)] = t;
            }
        }
    }
    debug_assert_eq!(reps.len() * sub.order(), scope.order());
    CosetData { scope: scope.clone(), sub: sub.clone(), reps, rep_of }
}

/// Representatives of the double cosets `h g k` inside `scope`, ordered by
/// least member; each representative is the least element of its double coset.
pub fn double_coset_reps(scope: &Subgroup, h: &Subgroup, k: &Subgroup) -> Vec<u32> {
    assert!(h.is_subgroup_of(scope) && k.is_subgroup_of(scope));
    let parent = scope.parent();
    let mut covered = vec![false; parent.order()];
    let mut reps = Vec::new();
    for &g in scope.members() {
        if covered[g as usize] {
            continue;
        }
        reps.push(g);
        for &a in h.members() {
            let ag = parent.mul(a as usize, g as usize);
            for &b in k.members() {
                covered[parent.mul(ag, b as usize)] = true;
            }
        }
    }
    reps
}

/// All members of the double coset `h g k`, sorted.
pub fn double_coset(scope: &Subgroup, h: &Subgroup, g: usize, k: &Subgroup) -> Vec<u32> {
    let parent = scope.parent();
    let mut out = Vec::new();
    let mut seen = vec![false; parent.order()];
    for &a in h.members() {
        let ag = parent.mul(a as usize, g);
        for &b in k.members() {
            let x = parent.mul(ag, b as usize);
            if !seen[x] {
                seen[x] = true;
                out.push(x as u32);
            }
        }
    }
    out.sort_unstable();
    out
}

/// A quotient `scope / normal` together with the canonical projection.
/// The quotient is a fresh table whose element `i` is the coset of `reps[i]`.
#[derive(Clone)]
pub struct QuotientData {
    pub group: Arc<FiniteGroup>,
    pub proj: GroupHom,
    reps: Vec<u32>,
}

impl QuotientData {
    /// A preimage of quotient element `i` (its stored representative).
    pub fn lift(&self, i: usize) -> usize {
        self.reps[i] as usize
    }
}

/// Builds the quotient group of `scope` by a normal subgroup.
pub fn quotient_group(scope: &Subgroup, normal: &Subgroup) -> Result<QuotientData, Error> {
    if !normal.is_subgroup_of(scope) || !normal.is_normal_in(scope) {
        return Err(Error::NotNormal { sub: normal.order(), scope: scope.order() });
    }
    let parent = scope.parent();
    let cosets = coset_data(scope, normal);
    let reps = cosets.reps().to_vec();
    let n = reps.len();
    let mut index_of = vec![u32::MAX; parent.order()];
    for (i, &r) in reps.iter().enumerate() {
        index_of[r as usize] = i as u32;
    }
    let mut mul = vec![0u32; n * n];
    for (i, &a) in reps.iter().enumerate() {
        for (j, &b) in reps.iter().enumerate() {
            let prod = cosets.rep(parent.mul(a as usize, b as usize));
            mul[i * n + j] = index_of[prod];
        }
    }
    let labels: Vec<String> = reps.iter().map(|&r| format!("[{}]", parent.label(r as usize))).collect();
    let name = format!("{}/{}", scope_name(scope), normal.order());
    let group = FiniteGroup::new(name, n, mul, Some(labels))?;
    let full = Subgroup::full(&group);
    let images: Vec<u32> = scope.members().iter().map(|&x| index_of[cosets.rep(x as usize)]).collect();
    let proj = GroupHom { domain: scope.clone(), codomain: full, images };
    Ok(QuotientData { group, proj, reps })
}

fn scope_name(scope: &Subgroup) -> String {
    if scope.is_full() {
        scope.parent().name().to_string()
    } else {
        format!("{}[{}]", scope.parent().name(), scope.order())
    }
}

/// Normalizer of `h` in `scope`.
pub fn normalizer(scope: &Subgroup, h: &Subgroup) -> Subgroup {
    let parent = scope.parent();
    let members: Vec<u32> = scope
        .members()
        .iter()
        .copied()
        .filter(|&g| h.members().iter().all(|&x| h.contains(parent.conj(g as usize, x as usize))))
        .collect();
    Subgroup::from_sorted_members(parent.clone(), members)
}

/// Centralizer of `h` in `scope`.
pub fn centralizer(scope: &Subgroup, h: &Subgroup) -> Subgroup {
    let parent = scope.parent();
    let members: Vec<u32> = scope
        .members()
        .iter()
        .copied()
        .filter(|&g| {
            h.members()
                .iter()
                .all(|&x| parent.mul(g as usize, x as usize) == parent.mul(x as usize, g as usize))
        })
        .collect();
    Subgroup::from_sorted_members(parent.clone(), members)
}

/// A Sylow `p`-subgroup of `scope`, grown deterministically: starting from a
/// cyclic `p`-subgroup, repeatedly adjoin a normalizing element whose coset
/// has order `p` until the full `p`-part is reached.
pub fn sylow_subgroup(scope: &Subgroup, p: u64) -> Subgroup {
    let parent = scope.parent();
    let target = p_part(scope.order() as u64, p);
    let mut current = Subgroup::trivial(parent);
    if target == 1 {
        return current;
    }
    // Seed with the p-part of the first element of order divisible by p.
    for &x in scope.members() {
        let o = parent.element_order(x as usize);
        if o % p == 0 {
            let y = parent.power(x as usize, o / p_part(o, p));
            current = Subgroup::generate(parent, &[y as u32]);
            break;
        }
    }
    while (current.order() as u64) < target {
        let norm = normalizer(scope, &current);
        let mut grown = false;
        for &g in norm.members() {
            if current.contains(g as usize) {
                continue;
            }
            // Order of the coset g*current in the quotient of the normalizer.
            let mut m = 1u64;
            let mut y = g as usize;
            while !current.contains(y) {
                y = parent.mul(y, g as usize);
                m += 1;
            }
            if m == p {
                current = current.generated_with(&[g]);
                grown = true;
                break;
            }
        }
        assert!(grown, "sylow growth stalled below the full p-part");
    }
    current
}

/// `O^p(scope)`: the subgroup generated by all elements of order prime to `p`.
/// It is the smallest normal subgroup with `p`-group quotient.
pub fn p_residual(scope: &Subgroup, p: u64) -> Subgroup {
    let parent = scope.parent();
    let gens: Vec<u32> = scope
        .members()
        .iter()
        .copied()
        .filter(|&x| parent.element_order(x as usize) % p != 0)
        .collect();
    Subgroup::generate(parent, &gens)
}

/// `[a, b]`: closure of all commutators between the two subgroups.
pub fn commutator_subgroup(a: &Subgroup, b: &Subgroup) -> Subgroup {
    assert!(Arc::ptr_eq(a.parent(), b.parent()));
    let parent = a.parent();
    let mut gens = Vec::new();
    for &x in a.members() {
        for &y in b.members() {
            gens.push(parent.comm(x as usize, y as usize) as u32);
        }
    }
    gens.sort_unstable();
    gens.dedup();
    Subgroup::generate(parent, &gens)
}

/// Closure of `{ u^{-1} f(u) }` over the listed endomaps of `p`.
pub fn commutator_with_maps(p: &Subgroup, maps: &[GroupHom]) -> Subgroup {
    let parent = p.parent();
    let mut gens = Vec::new();
    for f in maps {
        assert!(f.domain() == p, "map domain must be the given subgroup");
        for &u in p.members() {
            let v = f.apply(u as usize);
            gens.push(parent.mul(parent.inv(u as usize), v) as u32);
        }
    }
    gens.sort_unstable();
    gens.dedup();
    Subgroup::generate(parent, &gens)
}

/// Frattini subgroup of a `p`-group: `S^p [S, S]`.
pub fn frattini_subgroup(s: &Subgroup, p: u64) -> Subgroup {
    assert_eq!(
        p_part(s.order() as u64, p) as usize,
        s.order(),
        "frattini formula applies to p-groups"
    );
    let parent = s.parent();
    let mut gens: Vec<u32> = s.members().iter().map(|&x| parent.power(x as usize, p) as u32).collect();
    gens.extend_from_slice(commutator_subgroup(s, s).members());
    gens.sort_unstable();
    gens.dedup();
    Subgroup::generate(parent, &gens)
}

/// Every subgroup of `scope`, found as a closure fixpoint: extend each known
/// subgroup by one additional generator until nothing new appears. Bounded by
/// [`MAX_ENUMERATION_ORDER`] because the lattice grows quickly.
pub fn all_subgroups(scope: &Subgroup) -> Result<Vec<Subgroup>, Error> {
    if scope.order() > MAX_ENUMERATION_ORDER {
        return Err(Error::EnumerationBound { order: scope.order(), limit: MAX_ENUMERATION_ORDER });
    }
    let mut seen = std::collections::BTreeSet::<Vec<u32>>::new();
    let mut queue: Vec<Subgroup> = vec![Subgroup::trivial(scope.parent())];
    seen.insert(queue[0].members().to_vec());
    let mut out = Vec::new();
    while let Some(h) = queue.pop() {
        for &g in scope.members() {
            if h.contains(g as usize) {
                continue;
            }
            let k = h.generated_with(&[g]);
            if seen.insert(k.members().to_vec()) {
                queue.push(k.clone());
            }
        }
        out.push(h);
    }
    out.sort_by(|a, b| (a.order(), a.members()).cmp(&(b.order(), b.members())));
    Ok(out)
}

/// All subgroups `h` with `s <= h <= scope`, smallest first.
pub fn overgroups(scope: &Subgroup, s: &Subgroup) -> Vec<Subgroup> {
    assert!(s.is_subgroup_of(scope));
    let mut seen = std::collections::BTreeSet::<Vec<u32>>::new();
    let mut queue: Vec<Subgroup> = vec![s.clone()];
    seen.insert(s.members().to_vec());
    let mut out = Vec::new();
    while let Some(h) = queue.pop() {
        for &g in scope.members() {
            if h.contains(g as usize) {
                continue;
            }
            let k = h.generated_with(&[g]);
            if k.is_subgroup_of(scope) && seen.insert(k.members().to_vec()) {
                queue.push(k.clone());
            }
        }
        out.push(h);
    }
    out.sort_by(|a, b| (a.order(), a.members()).cmp(&(b.order(), b.members())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    /// Naive quadratic closure, kept distinct from `Subgroup::generate` as an
    /// oracle: saturate the set by one full pairwise-product round at a time.
    fn closure_oracle(g: &Arc<FiniteGroup>, gens: &[u32]) -> Vec<u32> {
        let mut set: std::collections::BTreeSet<u32> = gens.iter().copied().collect();
        set.insert(0);
        loop {
            let snapshot: Vec<u32> = set.iter().copied().collect();
            let before = set.len();
            for &a in &snapshot {
                for &b in &snapshot {
                    set.insert(g.mul(a as usize, b as usize) as u32);
                }
            }
            if set.len() == before {
                return set.into_iter().collect();
            }
        }
    }

    fn s4() -> Arc<FiniteGroup> {
        catalog::build("symmetric:4").unwrap()
    }

    fn elem(g: &Arc<FiniteGroup>, label: &str) -> u32 {
        g.labels()
            .iter()
            .position(|l| l == label)
            .unwrap_or_else(|| panic!("no element labelled {label}")) as u32
    }

    #[test]
    fn generate_matches_naive_closure() {
        let g = s4();
        let full = Subgroup::full(&g);
        for gens in [
            vec![elem(&g, "(1 2 3 4)"), elem(&g, "(1 3)")],
            vec![elem(&g, "(1 2)")],
            vec![elem(&g, "(1 2 3)"), elem(&g, "(1 2)(3 4)")],
            vec![],
        ] {
            let fast = Subgroup::generate(&g, &gens);
            assert_eq!(fast.members(), closure_oracle(&g, &gens).as_slice());
            assert!(fast.is_subgroup_of(&full));
        }
    }

    #[test]
    fn four_cycle_and_transposition_generate_order_eight() {
        let g = s4();
        let h = Subgroup::generate(&g, &[elem(&g, "(1 2 3 4)"), elem(&g, "(1 3)")]);
        assert_eq!(h.order(), 8);
        let s3 = catalog::build("symmetric:3").unwrap();
        let whole = Subgroup::generate(&s3, &[elem(&s3, "(1 2 3)"), elem(&s3, "(1 2)")]);
        assert_eq!(whole.order(), 6);
    }

    #[test]
    fn sylow_subgroups_have_the_full_p_part() {
        let g = s4();
        let full = Subgroup::full(&g);
        let syl2 = sylow_subgroup(&full, 2);
        assert_eq!(syl2.order(), 8);
        assert!(!syl2.is_abelian());
        let s3 = catalog::build("symmetric:3").unwrap();
        let syl3 = sylow_subgroup(&Subgroup::full(&s3), 3);
        assert_eq!(syl3.order(), 3);
        let c5 = catalog::build("cyclic:5").unwrap();
        assert_eq!(sylow_subgroup(&Subgroup::full(&c5), 2).order(), 1);
        // Conjugates of a Sylow subgroup are Sylow; spot check the count for S4.
        let mut distinct = std::collections::BTreeSet::new();
        for x in 0..g.order() {
            distinct.insert(syl2.conjugate(x).members().to_vec());
        }
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn commutator_subgroups() {
        let d8 = catalog::build("dihedral:8").unwrap();
        let full = Subgroup::full(&d8);
        let derived = commutator_subgroup(&full, &full);
        assert_eq!(derived.order(), 2);
        assert_eq!(derived, centralizer(&full, &full).intersection(&derived));

        let c4 = catalog::build("cyclic:4").unwrap();
        let c4full = Subgroup::full(&c4);
        assert_eq!(commutator_subgroup(&c4full, &c4full).order(), 1);

        // An order-3 automorphism of the Klein four-group moves every
        // involution, so the twisted commutators already fill the group.
        let v4 = catalog::build("product:cyclic:2xcyclic:2").unwrap();
        let v4full = Subgroup::full(&v4);
        let members = v4full.members().to_vec();
        assert_eq!(members.len(), 4);
        let images = vec![0, members[2], members[3], members[1]];
        let alpha = GroupHom::new(v4full.clone(), v4full.clone(), images).unwrap();
        assert_eq!(commutator_with_maps(&v4full, &[alpha]).order(), 4);
    }

    #[test]
    fn frattini_subgroups() {
        let v4 = catalog::build("product:cyclic:2xcyclic:2").unwrap();
        assert_eq!(frattini_subgroup(&Subgroup::full(&v4), 2).order(), 1);
        let d8 = catalog::build("dihedral:8").unwrap();
        let phi = frattini_subgroup(&Subgroup::full(&d8), 2);
        assert_eq!(phi.order(), 2);
        assert!(phi.is_normal_in(&Subgroup::full(&d8)));
        let c9 = catalog::build("cyclic:9").unwrap();
        assert_eq!(frattini_subgroup(&Subgroup::full(&c9), 3).order(), 3);
    }

    #[test]
    fn coset_data_partitions_the_scope() {
        let d8 = catalog::build("dihedral:8").unwrap();
        let full = Subgroup::full(&d8);
        let z = centralizer(&full, &full);
        assert_eq!(z.order(), 2);
        let cosets = coset_data(&full, &z);
        assert_eq!(cosets.reps().len(), 4);
        // Bookkeeping identity: x.t represents the coset of x*t.
        for &x in full.members() {
            for &t in cosets.reps() {
                let r = cosets.dot(x as usize, t as usize);
                let xt = d8.mul(x as usize, t as usize);
                // r and xt lie in the same left coset.
                assert!(z.contains(d8.mul(d8.inv(r), xt)));
            }
        }
        let whole = coset_data(&full, &full);
        assert_eq!(whole.reps(), &[0]);
    }

    #[test]
    fn double_cosets_partition_and_match_sizes() {
        let s3 = catalog::build("symmetric:3").unwrap();
        let full = Subgroup::full(&s3);
        let h = Subgroup::generate(&s3, &[elem(&s3, "(1 2)")]);
        let reps = double_coset_reps(&full, &h, &h);
        assert_eq!(reps.len(), 2);
        let sizes: Vec<usize> = reps.iter().map(|&g| double_coset(&full, &h, g as usize, &h).len()).collect();
        assert_eq!(sizes, vec![2, 4]);

        let g = s4();
        let gfull = Subgroup::full(&g);
        let syl = sylow_subgroup(&gfull, 2);
        let reps = double_coset_reps(&gfull, &syl, &syl);
        assert_eq!(reps.len(), 2);
        let total: usize = reps.iter().map(|&x| double_coset(&gfull, &syl, x as usize, &syl).len()).sum();
        assert_eq!(total, 24);
    }

    #[test]
    fn quotients_are_groups_with_exact_kernels() {
        let d8 = catalog::build("dihedral:8").unwrap();
        let full = Subgroup::full(&d8);
        let z = centralizer(&full, &full);
        let q = quotient_group(&full, &z).unwrap();
        assert_eq!(q.group.order(), 4);
        let qfull = Subgroup::full(&q.group);
        assert!(qfull.is_elementary_abelian(2));
        assert_eq!(q.proj.kernel(), z);

        let g = s4();
        let gfull = Subgroup::full(&g);
        let v4 = Subgroup::generate(&g, &[elem(&g, "(1 2)(3 4)"), elem(&g, "(1 3)(2 4)")]);
        let q = quotient_group(&gfull, &v4).unwrap();
        assert_eq!(q.group.order(), 6);
        assert!(!Subgroup::full(&q.group).is_abelian());

        let c4 = Subgroup::generate(&g, &[elem(&g, "(1 2 3 4)")]);
        assert!(quotient_group(&gfull, &c4).is_err());
    }

    #[test]
    fn p_residual_examples() {
        let g = s4();
        let full = Subgroup::full(&g);
        let o2 = p_residual(&full, 2);
        assert_eq!(o2.order(), 12);
        // No smaller normal subgroup has 2-group quotient: scan everything.
        for h in all_subgroups(&full).unwrap() {
            if h.is_normal_in(&full) && h.order() < 12 {
                let q = quotient_group(&full, &h).unwrap();
                assert_ne!(p_part(q.group.order() as u64, 2) as usize, q.group.order());
            }
        }
        let q = quotient_group(&full, &o2).unwrap();
        assert_eq!(q.group.order(), 2);

        let d8 = catalog::build("dihedral:8").unwrap();
        assert_eq!(p_residual(&Subgroup::full(&d8), 2).order(), 1);
        let s3 = catalog::build("symmetric:3").unwrap();
        assert_eq!(p_residual(&Subgroup::full(&s3), 2).order(), 3);
    }

    #[test]
    fn subgroup_enumeration_is_exhaustive_at_small_order() {
        let d8 = catalog::build("dihedral:8").unwrap();
        let subs = all_subgroups(&Subgroup::full(&d8)).unwrap();
        assert_eq!(subs.len(), 10);
        let q8 = catalog::build("quaternion:8").unwrap();
        assert_eq!(all_subgroups(&Subgroup::full(&q8)).unwrap().len(), 6);
        let g = s4();
        let subs = all_subgroups(&Subgroup::full(&g)).unwrap();
        assert_eq!(subs.len(), 30);
        // Order counts for S4: classic lattice data.
        let count = |k: usize| subs.iter().filter(|h| h.order() == k).count();
        assert_eq!((count(1), count(2), count(3), count(4)), (1, 9, 4, 7));
        assert_eq!((count(6), count(8), count(12), count(24)), (4, 3, 1, 1));
    }

    #[test]
    fn overgroups_of_a_sylow_subgroup() {
        let a5 = catalog::build("alternating:5").unwrap();
        let full = Subgroup::full(&a5);
        let v4 = sylow_subgroup(&full, 2);
        let over = overgroups(&full, &v4);
        let orders: Vec<usize> = over.iter().map(|h| h.order()).collect();
        assert_eq!(orders, vec![4, 12, 60]);
    }

    #[test]
    fn hom_validation_and_inverse() {
        let g = s4();
        let full = Subgroup::full(&g);
        let c4 = Subgroup::generate(&g, &[elem(&g, "(1 2 3 4)")]);
        let conj = GroupHom::conjugation(elem(&g, "(1 2)") as usize, &c4, &full);
        assert!(conj.is_injective());
        let inv = conj.inverse_on_image();
        for &x in c4.members() {
            assert_eq!(inv.apply(conj.apply(x as usize)), x as usize);
        }
        // A non-multiplicative image vector is rejected.
        let broken = GroupHom::new(
            c4.clone(),
            full.clone(),
            vec![0, elem(&g, "(1 2)"), elem(&g, "(1 3)(2 4)"), elem(&g, "(1 4 3 2)")],
        );
        assert!(broken.is_err());
    }

    #[test]
    fn product_with_requires_actual_products() {
        let g = s4();
        let v4 = Subgroup::generate(&g, &[elem(&g, "(1 2)(3 4)"), elem(&g, "(1 3)(2 4)")]);
        let c3 = Subgroup::generate(&g, &[elem(&g, "(1 2 3)")]);
        let prod = v4.product_with(&c3);
        assert_eq!(prod.order(), 12);
    }

    #[test]
    fn rejects_non_groups() {
        // A 2x2 table that is not associative/latin.
        assert!(FiniteGroup::new("bad", 2, vec![0, 1, 1, 1], None).is_err());
        // Valid C2.
        assert!(FiniteGroup::new("c2", 2, vec![0, 1, 1, 0], None).is_ok());
    }
}
