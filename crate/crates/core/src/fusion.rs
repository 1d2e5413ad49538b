//! Fusion systems realized by an ambient finite group: morphism sets, the
//! focal, hyperfocal and elementary focal subgroups, subsystem and quotient
//! constructions, strong closure and invariance.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::Error;
use crate::group::{
    all_subgroups, commutator_subgroup, frattini_subgroup, normalizer, p_part, p_residual,
    quotient_group, sylow_subgroup, FiniteGroup, GroupHom, QuotientData, Subgroup,
};

/// A morphism of a fusion system: an injective homomorphism `P -> Q`
/// together with an ambient element certifying it.
#[derive(Clone)]
pub struct FusionMorphism {
    pub map: GroupHom,
    /// For ambient systems, an element `g` with `map = c_g` on the domain.
    /// For quotient systems, the certificate of an inducing morphism.
    pub witness: u32,
}

#[derive(Clone)]
pub enum SystemKind {
    /// `F_S(G)`: every morphism is conjugation by an ambient element.
    Ambient { ambient: Subgroup },
    /// A quotient system on `S/T`: morphisms are those induced by base
    /// morphisms between the preimages of their domain and codomain.
    Quotient { base: Box<FusionSystem>, kernel: Subgroup, data: QuotientData },
}

/// A fusion system on a finite `p`-group `S`, always group-realized (ambient
/// or a quotient of an ambient system), so saturation holds by construction.
#[derive(Clone)]
pub struct FusionSystem {
    p: u64,
    s: Subgroup,
    kind: SystemKind,
}

impl FusionSystem {
    /// The system `F_S(G)` on a Sylow `p`-subgroup `s` of `ambient`.
    pub fn ambient(p: u64, s: Subgroup, ambient: Subgroup) -> FusionSystem {
        assert!(
            Arc::ptr_eq(s.parent(), ambient.parent()),
            "fusion data must live in one root group"
        );
        assert!(s.is_subgroup_of(&ambient));
        assert_eq!(
            s.order() as u64,
            p_part(ambient.order() as u64, p),
            "S must be a Sylow p-subgroup of the ambient group"
        );
        FusionSystem { p, s, kind: SystemKind::Ambient { ambient } }
    }

    /// `F_S(G)` for a whole group with `S` chosen by the Sylow search.
    pub fn of_group(g: &Arc<FiniteGroup>, p: u64) -> FusionSystem {
        let full = Subgroup::full(g);
        let s = sylow_subgroup(&full, p);
        FusionSystem::ambient(p, s, full)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> &Subgroup {
        &self.s
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn ambient_subgroup(&self) -> Option<&Subgroup> {
        match &self.kind {
            SystemKind::Ambient { ambient } => Some(ambient),
            SystemKind::Quotient { .. } => None,
        }
    }

    /// True when the realization is `F_S(S)`, in which case every morphism
    /// is inner and several invariants collapse to exact group theory. Use
    /// `is_trivial` to detect triviality of other realizations.
    pub fn is_trivially_realized(&self) -> bool {
        matches!(&self.kind, SystemKind::Ambient { ambient } if ambient.order() == self.s.order())
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            SystemKind::Ambient { ambient } => format!(
                "fusion system at p={} on S of order {} with ambient of order {} in {}",
                self.p,
                self.s.order(),
                ambient.order(),
                ambient.parent().name()
            ),
            SystemKind::Quotient { kernel, .. } => format!(
                "quotient fusion system at p={} on a group of order {} (kernel of order {})",
                self.p,
                self.s.order(),
                kernel.order()
            ),
        }
    }
}

/// All morphisms `P -> Q` of the system, deduplicated as maps and sorted by
/// their image vectors. The witness of each map is its least certificate.
pub fn hom_set(f: &FusionSystem, p_sub: &Subgroup, q_sub: &Subgroup) -> Vec<FusionMorphism> {
    assert!(
        p_sub.is_subgroup_of(f.s()) && q_sub.is_subgroup_of(f.s()),
        "hom_set arguments must sit inside S"
    );
    let mut seen: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
    match &f.kind {
        SystemKind::Ambient { ambient } => {
            let parent = f.s.parent();
            for &g in ambient.members() {
                let mut images = Vec::with_capacity(p_sub.order());
                let mut ok = true;
                for &x in p_sub.members() {
                    let y = parent.conj(g as usize, x as usize);
                    if !q_sub.contains(y) {
                        ok = false;
                        break;
                    }
                    images.push(y as u32);
                }
                if ok {
                    seen.entry(images).or_insert(g);
                }
            }
        }
        SystemKind::Quotient { base, data, .. } => {
            let up = preimage(base.s(), data, p_sub);
            let vp = preimage(base.s(), data, q_sub);
            for phi in hom_set(base, &up, &vp) {
                // Well-defined because the kernel is strongly closed in the
                // base system, hence mapped into itself by phi.
                let images: Vec<u32> = p_sub
                    .members()
                    .iter()
                    .map(|&x| data.proj.apply(phi.map.apply(data.lift(x as usize))) as u32)
                    .collect();
                seen.entry(images).or_insert(phi.witness);
            }
        }
    }
    seen.into_iter()
        .map(|(images, witness)| {
            let map = GroupHom::new(p_sub.clone(), q_sub.clone(), images)
                .expect("fusion morphisms are homomorphisms");
            debug_assert!(map.is_injective());
            FusionMorphism { map, witness }
        })
        .collect()
}

fn preimage(base_s: &Subgroup, data: &QuotientData, bar: &Subgroup) -> Subgroup {
    let members: Vec<u32> = base_s
        .members()
        .iter()
        .copied()
        .filter(|&x| bar.contains(data.proj.apply(x as usize)))
        .collect();
    Subgroup::generate(base_s.parent(), &members)
}

/// The image `map(sub)` as a subgroup of the codomain's parent.
pub fn apply_to_subgroup(map: &GroupHom, sub: &Subgroup) -> Subgroup {
    let images: Vec<u32> =
        sub.members().iter().map(|&x| map.apply(x as usize) as u32).collect();
    Subgroup::generate(map.codomain().parent(), &images)
}

/// `Aut_F(P)` assembled as an abstract group, with its morphisms aligned to
/// the group's element indices and the member list of `O^p(Aut_F(P))`.
pub struct AutData {
    pub morphisms: Vec<FusionMorphism>,
    /// Composition group of the morphisms; the identity map sits at index 0.
    pub group: Arc<FiniteGroup>,
    /// Indices into `morphisms` forming `O^p(Aut_F(P))`.
    pub op_residual: Vec<u32>,
}

pub fn aut_f(f: &FusionSystem, p_sub: &Subgroup) -> AutData {
    // Injective endomaps of a finite group are automorphisms, so the whole
    // hom-set qualifies.
    let homs = hom_set(f, p_sub, p_sub);
    let n = homs.len();
    let id_images: Vec<u32> = p_sub.members().to_vec();
    let id_pos = homs
        .iter()
        .position(|m| m.map.images() == &id_images[..])
        .expect("the identity is a morphism of every fusion system");
    let mut order: Vec<usize> = (0..n).collect();
    order.swap(0, id_pos);
    let morphisms: Vec<FusionMorphism> = order.into_iter().map(|i| homs[i].clone()).collect();

    let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
    for (i, m) in morphisms.iter().enumerate() {
        index.insert(m.map.images().to_vec(), i as u32);
    }
    let mut table = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            let images: Vec<u32> = p_sub
                .members()
                .iter()
                .map(|&x| morphisms[a].map.apply(morphisms[b].map.apply(x as usize)) as u32)
                .collect();
            table[a * n + b] = *index.get(&images).expect("hom-sets are closed under composition");
        }
    }
    let group = FiniteGroup::new("aut", n, table, None).expect("composition table is a group");
    let op = p_residual(&Subgroup::full(&group), f.p);
    AutData { morphisms, group, op_residual: op.members().to_vec() }
}

/// The focal subgroup: closure of `u^{-1} α(u)` over all `P ≤ S` and
/// `α ∈ Aut_F(P)`. For `F_S(S)` this collapses to the derived subgroup,
/// which is returned without subgroup enumeration.
pub fn focal_subgroup(f: &FusionSystem) -> Result<Subgroup, Error> {
    if f.is_trivially_realized() {
        return Ok(commutator_subgroup(f.s(), f.s()));
    }
    let parent = f.s.parent().clone();
    let mut gens: BTreeSet<u32> = BTreeSet::new();
    for p_sub in all_subgroups(f.s())? {
        for m in hom_set(f, &p_sub, &p_sub) {
            for &u in p_sub.members() {
                gens.insert(parent.mul(parent.inv(u as usize), m.map.apply(u as usize)) as u32);
            }
        }
    }
    let gens: Vec<u32> = gens.into_iter().collect();
    Ok(Subgroup::generate(&parent, &gens))
}

/// The hyperfocal subgroup: closure of `u^{-1} α(u)` over `P ≤ S` and
/// `α ∈ O^p(Aut_F(P))`. Ambient realizations are cross-checked against
/// `S ∩ O^p(G)`.
pub fn hyperfocal_subgroup(f: &FusionSystem) -> Result<Subgroup, Error> {
    if f.is_trivially_realized() {
        return Ok(Subgroup::trivial(f.s.parent()));
    }
    let parent = f.s.parent().clone();
    let mut gens: BTreeSet<u32> = BTreeSet::new();
    for p_sub in all_subgroups(f.s())? {
        let aut = aut_f(f, &p_sub);
        for &i in &aut.op_residual {
            let m = &aut.morphisms[i as usize];
            for &u in p_sub.members() {
                gens.insert(parent.mul(parent.inv(u as usize), m.map.apply(u as usize)) as u32);
            }
        }
    }
    let gens: Vec<u32> = gens.into_iter().collect();
    let result = Subgroup::generate(&parent, &gens);
    if let SystemKind::Ambient { ambient } = &f.kind {
        let oracle = p_residual(ambient, f.p).intersection(f.s());
        assert!(result == oracle, "hyperfocal closure must equal S ∩ O^p(G)");
    }
    Ok(result)
}

/// The elementary focal subgroup `Φ(S)·A^p_F(S)`, asserted equal to
/// `Φ(S)·O^p_F(S)`.
pub fn elementary_focal_subgroup(f: &FusionSystem) -> Result<Subgroup, Error> {
    let phi = frattini_subgroup(f.s(), f.p);
    if f.is_trivially_realized() {
        // focal = [S,S] ≤ Φ(S), so both products collapse to Φ(S)
        debug_assert!(commutator_subgroup(f.s(), f.s()).is_subgroup_of(&phi));
        return Ok(phi);
    }
    let focal = focal_subgroup(f)?;
    let hyper = hyperfocal_subgroup(f)?;
    let a = phi.product_with(&focal);
    let b = phi.product_with(&hyper);
    assert!(a == b, "Φ(S)·A^p and Φ(S)·O^p must agree");
    Ok(a)
}

/// `F_S(N_G(S))`, the normalizer subsystem of an ambient realization.
pub fn normalizer_subsystem(f: &FusionSystem) -> FusionSystem {
    let SystemKind::Ambient { ambient } = &f.kind else {
        panic!("the normalizer subsystem is defined for ambient realizations");
    };
    let n = normalizer(ambient, f.s());
    FusionSystem::ambient(f.p, f.s.clone(), n)
}

/// `F_S(H0)` for an intermediate group `S ≤ H0 ≤ G`.
pub fn intermediate_subsystem(f: &FusionSystem, h0: &Subgroup) -> Result<FusionSystem, Error> {
    let SystemKind::Ambient { ambient } = &f.kind else {
        panic!("intermediate subsystems are defined for ambient realizations");
    };
    if !f.s.is_subgroup_of(h0) {
        return Err(Error::Containment {
            sub: "the Sylow subgroup".into(),
            sup: "the intermediate group".into(),
        });
    }
    if !h0.is_subgroup_of(ambient) {
        return Err(Error::Containment {
            sub: "the intermediate group".into(),
            sup: "the ambient group".into(),
        });
    }
    Ok(FusionSystem::ambient(f.p, f.s.clone(), h0.clone()))
}

/// The `p`-power index subsystem on `N`, realized as `F_N(N·O^p(G))` for
/// `O^p_F(S) ≤ N ≤ S`. The hyperfocal subgroup is preserved by this
/// construction, which is asserted whenever both sides are computable.
pub fn p_power_index_subsystem(f: &FusionSystem, n: &Subgroup) -> Result<FusionSystem, Error> {
    let SystemKind::Ambient { ambient } = &f.kind else {
        panic!("p-power index subsystems are defined for ambient realizations");
    };
    assert!(n.is_subgroup_of(f.s()));
    let hyper = hyperfocal_subgroup(f)?;
    if !hyper.is_subgroup_of(n) {
        return Err(Error::Containment {
            sub: "the hyperfocal subgroup".into(),
            sup: "the chosen subgroup".into(),
        });
    }
    let h = n.product_with(&p_residual(ambient, f.p));
    assert_eq!(
        p_part(h.order() as u64, f.p) as usize,
        n.order(),
        "N must be Sylow in N·O^p(G)"
    );
    let sub = FusionSystem::ambient(f.p, n.clone(), h);
    if let Ok(sub_hyper) = hyperfocal_subgroup(&sub) {
        assert!(sub_hyper == hyper, "p-power index subsystems preserve the hyperfocal subgroup");
    }
    Ok(sub)
}

/// The quotient system on `S/T` for a strongly closed `T`: hom-sets are the
/// maps induced by base morphisms between preimages.
pub fn quotient_system(f: &FusionSystem, t: &Subgroup) -> Result<FusionSystem, Error> {
    if !is_strongly_closed(f, t) {
        return Err(Error::NotStronglyClosed);
    }
    // Strong closure under the inner morphisms alone already forces T ⊴ S.
    let data = quotient_group(f.s(), t).expect("strongly closed subgroups are normal in S");
    let s_bar = Subgroup::full(&data.group);
    Ok(FusionSystem {
        p: f.p,
        s: s_bar,
        kind: SystemKind::Quotient { base: Box::new(f.clone()), kernel: t.clone(), data },
    })
}

/// True when no morphism moves an element of `T` outside `T`. Cyclic
/// subgroups suffice: a morphism escapes exactly when its restriction to
/// the cyclic subgroup of some element does.
pub fn is_strongly_closed(f: &FusionSystem, t: &Subgroup) -> bool {
    assert!(t.is_subgroup_of(f.s()));
    let parent = f.s.parent();
    for &x in t.members() {
        let c = Subgroup::generate(parent, &[x]);
        for m in hom_set(f, &c, f.s()) {
            if !t.contains(m.map.apply(x as usize)) {
                return false;
            }
        }
    }
    true
}

/// Exhaustive invariance check for a subsystem on `T`: for every
/// isomorphism `φ: Q -> P` of the outer system and all `U, V ≤ Q ∩ P`
/// inside `T`, conjugation by `φ` must keep the subsystem's hom-sets inside
/// the subsystem.
pub fn is_invariant(f: &FusionSystem, sub: &FusionSystem) -> Result<bool, Error> {
    let t = sub.s().clone();
    assert!(
        Arc::ptr_eq(t.parent(), f.s.parent()),
        "the subsystem must live in the same root group"
    );
    assert!(t.is_subgroup_of(f.s()));
    if !is_strongly_closed(f, &t) {
        return Err(Error::NotStronglyClosed);
    }
    type HomTable = BTreeMap<(Vec<u32>, Vec<u32>), BTreeSet<Vec<u32>>>;
    let mut subs_of: BTreeMap<Vec<u32>, Vec<Subgroup>> = BTreeMap::new();
    let mut sub_homs: HomTable = HomTable::new();
    let mut homs_between = |a: &Subgroup, b: &Subgroup| -> BTreeSet<Vec<u32>> {
        sub_homs
            .entry((a.members().to_vec(), b.members().to_vec()))
            .or_insert_with(|| {
                hom_set(sub, a, b).into_iter().map(|m| m.map.images().to_vec()).collect()
            })
            .clone()
    };

    for q in all_subgroups(f.s())? {
        for phi in hom_set(f, &q, f.s()) {
            let p_img = phi.map.image_subgroup();
            let inter = q.intersection(&p_img).intersection(&t);
            let small = subs_of
                .entry(inter.members().to_vec())
                .or_insert_with(|| {
                    all_subgroups(&inter).expect("the intersection inherits the size bound")
                })
                .clone();
            let inv = phi.map.inverse_on_image();
            for u in &small {
                let phi_u = apply_to_subgroup(&phi.map, u);
                for v in &small {
                    let phi_v = apply_to_subgroup(&phi.map, v);
                    let psis = homs_between(u, v);
                    if psis.is_empty() {
                        continue;
                    }
                    let allowed = homs_between(&phi_u, &phi_v);
                    for psi_images in &psis {
                        // conjugate: w ∈ φU maps to φ(ψ(φ^{-1}(w)))
                        let conj: Vec<u32> = phi_u
                            .members()
                            .iter()
                            .map(|&w| {
                                let x = inv.apply(w as usize);
                                let pos = u
                                    .members()
                                    .binary_search(&(x as u32))
                                    .expect("φ^{-1} lands in U");
                                phi.map.apply(psi_images[pos] as usize) as u32
                            })
                            .collect();
                        if !allowed.contains(&conj) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Control of transfer: the subsystem has the same focal subgroup.
pub fn controls_transfer(f: &FusionSystem, h: &FusionSystem) -> Result<bool, Error> {
    assert!(h.s() == f.s(), "control of transfer compares systems on the same S");
    Ok(focal_subgroup(h)? == focal_subgroup(f)?)
}

/// True when every morphism is induced by conjugation inside `S` itself.
pub fn is_trivial(f: &FusionSystem) -> Result<bool, Error> {
    if f.is_trivially_realized() {
        return Ok(true);
    }
    let inner = FusionSystem::ambient(f.p, f.s.clone(), f.s.clone());
    for p_sub in all_subgroups(f.s())? {
        // Inner maps are always present, so comparing set sizes suffices;
        // equality is still checked map by map.
        let actual: BTreeSet<Vec<u32>> =
            hom_set(f, &p_sub, f.s()).iter().map(|m| m.map.images().to_vec()).collect();
        let inner_set: BTreeSet<Vec<u32>> =
            hom_set(&inner, &p_sub, f.s()).iter().map(|m| m.map.images().to_vec()).collect();
        if actual != inner_set {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn system(name: &str, p: u64) -> FusionSystem {
        let g = catalog::build(name).unwrap();
        FusionSystem::of_group(&g, p)
    }

    fn double_transpositions(f: &FusionSystem) -> Vec<u32> {
        let g = f.s().parent();
        (0..g.order() as u32)
            .filter(|&x| {
                g.element_order(x as usize) == 2 && g.label(x as usize).matches('(').count() == 2
            })
            .collect()
    }

    #[test]
    fn residuals_of_the_symmetric_group_on_four_points() {
        let f = system("symmetric:4", 2);
        assert_eq!(f.s().order(), 8);
        let focal = focal_subgroup(&f).unwrap();
        let hyper = hyperfocal_subgroup(&f).unwrap();
        let elem = elementary_focal_subgroup(&f).unwrap();
        assert_eq!(focal.order(), 4);
        assert!(focal == hyper && focal == elem);
        assert!(focal.is_elementary_abelian(2));
        assert!(focal.is_normal_in(f.s()));
        // focal = [S,S] · hyperfocal
        let derived = commutator_subgroup(f.s(), f.s());
        assert_eq!(derived.order(), 2);
        assert!(derived.product_with(&hyper) == focal);
    }

    #[test]
    fn residuals_of_trivially_realized_systems() {
        let f = system("wreath:3", 3);
        assert!(f.is_trivially_realized());
        assert_eq!(focal_subgroup(&f).unwrap().order(), 9);
        assert_eq!(hyperfocal_subgroup(&f).unwrap().order(), 1);
        assert_eq!(elementary_focal_subgroup(&f).unwrap().order(), 9);

        let small = system("symmetric:3", 2);
        assert!(!small.is_trivially_realized());
        assert_eq!(hyperfocal_subgroup(&small).unwrap().order(), 1);
        assert!(is_trivial(&small).unwrap());
        assert!(!is_trivial(&system("symmetric:3", 3)).unwrap());
    }

    #[test]
    fn hom_sets_enumerate_conjugation_maps() {
        let f = system("symmetric:4", 2);
        let parent = f.s().parent().clone();
        let trivial = Subgroup::trivial(&parent);
        assert_eq!(hom_set(&f, &trivial, &trivial).len(), 1);

        let dts = double_transpositions(&f);
        let in_s: Vec<u32> = dts.iter().copied().filter(|&x| f.s().contains(x as usize)).collect();
        assert_eq!(in_s.len(), 3, "a Sylow 2-subgroup holds all double transpositions");
        let v4 = Subgroup::generate(&parent, &in_s);
        assert_eq!(v4.order(), 4);
        let a = in_s[0];
        let c = Subgroup::generate(&parent, &[a]);
        let homs = hom_set(&f, &c, &v4);
        let images: BTreeSet<u32> = homs.iter().map(|m| m.map.apply(a as usize) as u32).collect();
        assert_eq!(images.into_iter().collect::<Vec<_>>(), in_s, "a fuses onto each involution");
        for m in &homs {
            let g = m.witness as usize;
            for &x in c.members() {
                assert_eq!(m.map.apply(x as usize), parent.conj(g, x as usize));
            }
        }
    }

    #[test]
    fn automorphism_groups_in_fusion_systems() {
        let f = system("alternating:4", 2);
        assert_eq!(f.s().order(), 4);
        let aut = aut_f(&f, f.s());
        assert_eq!(aut.group.order(), 3);
        assert_eq!(aut.op_residual.len(), 3, "a 2'-group equals its own 2-residual");

        let s4 = system("symmetric:4", 2);
        let parent = s4.s().parent().clone();
        let a = double_transpositions(&s4)[0];
        let c2 = Subgroup::generate(&parent, &[a]);
        assert_eq!(aut_f(&s4, &c2).group.order(), 1);

        let trivial = system("dihedral:8", 2);
        let aut_s = aut_f(&trivial, trivial.s());
        assert_eq!(aut_s.group.order(), 4, "inner automorphisms of D8");
        assert_eq!(aut_s.op_residual.len(), 1, "2-residual of a 2-group is trivial");
    }

    #[test]
    fn subsystem_constructions() {
        let f = system("symmetric:4", 2);
        let n = normalizer_subsystem(&f);
        assert!(n.is_trivially_realized(), "the Sylow 2-subgroup of S4 is self-normalizing");
        assert!(!controls_transfer(&f, &n).unwrap());
        assert!(controls_transfer(&f, &f).unwrap());

        let g_full = f.ambient_subgroup().unwrap().clone();
        assert!(controls_transfer(&f, &intermediate_subsystem(&f, &g_full).unwrap()).unwrap());
        let trivial_sub = intermediate_subsystem(&f, f.s()).unwrap();
        assert!(trivial_sub.is_trivially_realized());
        let a4 = p_residual(&g_full, 2);
        assert_eq!(a4.order(), 12);
        assert!(matches!(
            intermediate_subsystem(&f, &a4),
            Err(Error::Containment { .. })
        ));
    }

    #[test]
    fn p_power_index_subsystems() {
        let f = system("symmetric:4", 2);
        let hyper = hyperfocal_subgroup(&f).unwrap();
        let sub = p_power_index_subsystem(&f, &hyper).unwrap();
        assert_eq!(sub.ambient_subgroup().unwrap().order(), 12, "V4 · O^2(S4) = A4");
        assert!(hyperfocal_subgroup(&sub).unwrap() == hyper);

        // N = S recovers the whole system's fusion.
        let same = p_power_index_subsystem(&f, f.s()).unwrap();
        assert_eq!(same.ambient_subgroup().unwrap().order(), 24);
        for p_sub in all_subgroups(f.s()).unwrap() {
            let lhs: BTreeSet<Vec<u32>> =
                hom_set(&f, &p_sub, f.s()).iter().map(|m| m.map.images().to_vec()).collect();
            let rhs: BTreeSet<Vec<u32>> =
                hom_set(&same, &p_sub, f.s()).iter().map(|m| m.map.images().to_vec()).collect();
            assert_eq!(lhs, rhs);
        }

        let derived = commutator_subgroup(f.s(), f.s());
        assert!(matches!(
            p_power_index_subsystem(&f, &derived),
            Err(Error::Containment { .. })
        ));

        let gl = system("GL23", 2);
        assert_eq!(gl.s().order(), 16);
        let gl_hyper = hyperfocal_subgroup(&gl).unwrap();
        assert_eq!(gl_hyper.order(), 8, "S ∩ SL_2(3) is quaternion");
        let gl_sub = p_power_index_subsystem(&gl, &gl_hyper).unwrap();
        assert_eq!(gl_sub.ambient_subgroup().unwrap().order(), 24);
        assert!(hyperfocal_subgroup(&gl_sub).unwrap() == gl_hyper);
    }

    #[test]
    fn strong_closure_and_quotients() {
        let f = system("symmetric:4", 2);
        assert!(is_strongly_closed(&f, f.s()));
        let hyper = hyperfocal_subgroup(&f).unwrap();
        assert!(is_strongly_closed(&f, &hyper));
        let parent = f.s().parent().clone();
        let four_cycle = f
            .s()
            .members()
            .iter()
            .copied()
            .find(|&x| parent.element_order(x as usize) == 4)
            .unwrap();
        let c4 = Subgroup::generate(&parent, &[four_cycle]);
        assert!(!is_strongly_closed(&f, &c4), "the central involution fuses out of C4");
        assert!(matches!(quotient_system(&f, &c4), Err(Error::NotStronglyClosed)));

        let q = quotient_system(&f, &hyper).unwrap();
        assert_eq!(q.s().order(), 2);
        assert!(is_trivial(&q).unwrap());
        // quotient by the trivial subgroup keeps the fusion
        let q1 = quotient_system(&f, &Subgroup::trivial(&parent)).unwrap();
        assert!(!is_trivial(&q1).unwrap());
        assert_eq!(focal_subgroup(&q1).unwrap().order(), 4);

        // nested quotients of a trivially realized system stay trivial
        let d8 = system("dihedral:8", 2);
        let z = centralizer_center(&d8);
        let step1 = quotient_system(&d8, &z).unwrap();
        assert_eq!(step1.s().order(), 4);
        let t2 = Subgroup::generate(step1.s().parent(), &[step1.s().members()[1]]);
        let step2 = quotient_system(&step1, &t2).unwrap();
        assert_eq!(step2.s().order(), 2);
        assert!(is_trivial(&step2).unwrap());
    }

    fn centralizer_center(f: &FusionSystem) -> Subgroup {
        crate::group::centralizer(f.s(), f.s())
    }

    #[test]
    fn composition_stays_inside_hom_sets() {
        for (name, p) in [("symmetric:4", 2), ("symmetric:3", 3)] {
            let f = system(name, p);
            let subs = all_subgroups(f.s()).unwrap();
            for psub in &subs {
                for qsub in &subs {
                    let first = hom_set(&f, psub, qsub);
                    for rsub in &subs {
                        let second = hom_set(&f, qsub, rsub);
                        let target: BTreeSet<Vec<u32>> = hom_set(&f, psub, rsub)
                            .iter()
                            .map(|m| m.map.images().to_vec())
                            .collect();
                        for phi in &first {
                            for psi in &second {
                                let composite: Vec<u32> = psub
                                    .members()
                                    .iter()
                                    .map(|&x| psi.map.apply(phi.map.apply(x as usize)) as u32)
                                    .collect();
                                assert!(target.contains(&composite));
                            }
                        }
                    }
                }
            }
        }
    }

    /// Saturated-case characterization: the automorphisms of `T` in the
    /// outer system act on the subsystem, and every outer morphism between
    /// subgroups of `T` splits as (subsystem morphism) ∘ (automorphism).
    fn aschbacher_invariant(f: &FusionSystem, sub: &FusionSystem) -> bool {
        let t = sub.s();
        if !is_strongly_closed(f, t) {
            return false;
        }
        let aut_t = hom_set(f, t, t);
        let subs_t = all_subgroups(t).unwrap();
        for alpha in &aut_t {
            for u in &subs_t {
                let au = apply_to_subgroup(&alpha.map, u);
                for v in &subs_t {
                    let av = apply_to_subgroup(&alpha.map, v);
                    let rhs: BTreeSet<Vec<u32>> = hom_set(sub, &au, &av)
                        .iter()
                        .map(|m| m.map.images().to_vec())
                        .collect();
                    for psi in hom_set(sub, u, v) {
                        let conj: Vec<u32> = au
                            .members()
                            .iter()
                            .map(|&w| {
                                let x = alpha.map.inverse_on_image().apply(w as usize);
                                alpha.map.apply(psi.map.apply(x)) as u32
                            })
                            .collect();
                        if !rhs.contains(&conj) {
                            return false;
                        }
                    }
                }
            }
        }
        for p in &subs_t {
            for q in &subs_t {
                'psi: for psi in hom_set(f, p, q) {
                    for chi in &aut_t {
                        let chi_p = apply_to_subgroup(&chi.map, p);
                        for phi in hom_set(sub, &chi_p, q) {
                            if p.members().iter().all(|&x| {
                                phi.map.apply(chi.map.apply(x as usize)) == psi.map.apply(x as usize)
                            }) {
                                continue 'psi;
                            }
                        }
                    }
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn invariance_of_subsystems() {
        let f = system("symmetric:4", 2);
        assert!(is_invariant(&f, &f).unwrap());

        let hyper = hyperfocal_subgroup(&f).unwrap();
        let good = p_power_index_subsystem(&f, &hyper).unwrap();
        assert!(is_invariant(&f, &good).unwrap());
        assert!(aschbacher_invariant(&f, &good));

        let inner = intermediate_subsystem(&f, f.s()).unwrap();
        assert!(!is_invariant(&f, &inner).unwrap(), "S4-fusion escapes D8's inner maps on V4");
        assert!(!aschbacher_invariant(&f, &inner));

        // abelian T with its trivial subsystem is invariant
        let a4 = system("alternating:4", 2);
        let triv = intermediate_subsystem(&a4, a4.s()).unwrap();
        assert!(is_invariant(&a4, &triv).unwrap());
        assert!(aschbacher_invariant(&a4, &triv));

        // non strongly closed T is rejected
        let parent = f.s().parent().clone();
        let four_cycle = f
            .s()
            .members()
            .iter()
            .copied()
            .find(|&x| parent.element_order(x as usize) == 4)
            .unwrap();
        let c4 = Subgroup::generate(&parent, &[four_cycle]);
        let c4_sys = FusionSystem::ambient(2, c4.clone(), c4);
        assert!(matches!(is_invariant(&f, &c4_sys), Err(Error::NotStronglyClosed)));
    }

    #[test]
    fn quotient_by_hyperfocal_is_trivial_and_conversely() {
        for (name, p) in [("symmetric:4", 2), ("GL23", 2), ("symmetric:3", 3)] {
            let f = system(name, p);
            let hyper = hyperfocal_subgroup(&f).unwrap();
            let q = quotient_system(&f, &hyper).unwrap();
            assert!(is_trivial(&q).unwrap(), "{name}: quotient by the hyperfocal is trivial");
            // and any strongly closed T with trivial quotient contains it
            for t in all_subgroups(f.s()).unwrap() {
                if !is_strongly_closed(&f, &t) {
                    continue;
                }
                let qt = quotient_system(&f, &t).unwrap();
                if is_trivial(&qt).unwrap() {
                    assert!(hyper.is_subgroup_of(&t));
                }
            }
        }
    }
}
