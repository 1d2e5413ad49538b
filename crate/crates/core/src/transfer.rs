//! Degree-1 cohomology with trivial abelian coefficients: transfer along
//! subgroups, the action of double Burnside elements on `Hom(S, A)`, the
//! fusion-system transfer map τ with its kernel and image subgroups, and
//! the transfer identities relating a system to its p-power index
//! subsystems.

use std::sync::Arc;

use crate::burnside::{
    characteristic_biset, characteristic_idempotent, epsilon, verify_characteristic,
    BurnsideElement, CoeffRing,
};
use crate::error::Error;
use crate::fusion::{
    focal_subgroup, hyperfocal_subgroup, p_power_index_subsystem, FusionSystem, SystemKind,
};
use crate::group::{
    all_subgroups, commutator_subgroup, coset_data, prime_divisors, quotient_group, FiniteGroup,
    QuotientData, Subgroup,
};

/// A homomorphism from a subgroup `S` into a finite abelian p-group `A`
/// carrying the trivial action, i.e. an element of `H^1(S; A)`. Stored as
/// the full image table aligned with the member list of `S`.
#[derive(Clone)]
pub struct DegreeOneClass {
    source: Subgroup,
    coefficients: Arc<FiniteGroup>,
    images: Vec<u32>,
}

impl DegreeOneClass {
    /// Validates the homomorphism property and the coefficient shape.
    pub fn new(source: Subgroup, coefficients: Arc<FiniteGroup>, images: Vec<u32>) -> DegreeOneClass {
        assert_eq!(images.len(), source.order(), "one image per member");
        let full = Subgroup::full(&coefficients);
        assert!(full.is_abelian(), "coefficients must be abelian");
        assert!(
            prime_divisors(coefficients.order() as u64).len() <= 1,
            "coefficients must be a p-group"
        );
        let out = DegreeOneClass { source, coefficients, images };
        let parent = out.source.parent();
        for &x in out.source.members() {
            for &y in out.source.members() {
                let xy = parent.mul(x as usize, y as usize);
                assert_eq!(
                    out.apply(xy),
                    out.coefficients.mul(out.apply(x as usize), out.apply(y as usize)),
                    "images must define a homomorphism"
                );
            }
        }
        out
    }

    /// The canonical projection onto a quotient of `S`, as a degree-1 class.
    pub fn projection(q: &QuotientData) -> DegreeOneClass {
        let source = q.proj.domain().clone();
        let images: Vec<u32> =
            source.members().iter().map(|&x| q.proj.apply(x as usize) as u32).collect();
        DegreeOneClass::new(source, q.group.clone(), images)
    }

    pub fn trivial(source: Subgroup, coefficients: Arc<FiniteGroup>) -> DegreeOneClass {
        let images = vec![0; source.order()];
        DegreeOneClass { source, coefficients, images }
    }

    pub fn source(&self) -> &Subgroup {
        &self.source
    }

    pub fn coefficients(&self) -> &Arc<FiniteGroup> {
        &self.coefficients
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// Image of a source member, as an element index of the coefficient group.
    pub fn apply(&self, x: usize) -> usize {
        let pos = self
            .source
            .members()
            .binary_search(&(x as u32))
            .expect("argument must lie in the source");
        self.images[pos] as usize
    }

    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(|&a| a == 0)
    }

    pub fn kernel(&self) -> Subgroup {
        let members: Vec<u32> = self
            .source
            .members()
            .iter()
            .zip(&self.images)
            .filter_map(|(&x, &a)| (a == 0).then_some(x))
            .collect();
        Subgroup::generate(self.source.parent(), &members)
    }

    /// The image, as a subgroup of the coefficient group.
    pub fn image_subgroup(&self) -> Subgroup {
        let full = Subgroup::full(&self.coefficients);
        let mut gens = self.images.clone();
        gens.sort_unstable();
        gens.dedup();
        Subgroup::generate(full.parent(), &gens)
    }
}

impl PartialEq for DegreeOneClass {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && Arc::ptr_eq(&self.coefficients, &other.coefficients)
            && self.images == other.images
    }
}

impl Eq for DegreeOneClass {}

impl std::fmt::Debug for DegreeOneClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "DegreeOneClass(|S| = {}, A = {}, images = {:?})",
            self.source.order(),
            self.coefficients.order(),
            self.images
        )
    }
}

/// Transfer `tr^S_P(f)(x) = Σ_t f(rep(xt)^{-1} · xt)` over a left
/// transversal `t` of `P` in `S`, summed in the abelian coefficient group.
pub fn degree_one_transfer(s: &Subgroup, f: &DegreeOneClass) -> DegreeOneClass {
    let cosets = coset_data(s, f.source());
    let reps = cosets.reps().to_vec();
    degree_one_transfer_with(s, f, &reps)
}

/// Transfer with an explicit transversal: `transversal` must contain one
/// element of each left coset of the source of `f` in `S`. The resulting
/// homomorphism does not depend on the choice.
pub fn degree_one_transfer_with(
    s: &Subgroup,
    f: &DegreeOneClass,
    transversal: &[u32],
) -> DegreeOneClass {
    let p_sub = f.source();
    assert!(p_sub.is_subgroup_of(s), "transfer goes up a nested pair");
    let parent = s.parent();
    let cosets = coset_data(s, p_sub);
    assert_eq!(transversal.len(), cosets.reps().len(), "one element per coset");
    let mut chosen = vec![u32::MAX; parent.order()];
    for &t in transversal {
        let r = cosets.rep(t as usize);
        assert_eq!(chosen[r], u32::MAX, "transversal elements must cover distinct cosets");
        chosen[r] = t;
    }
    let a = f.coefficients();
    let images: Vec<u32> = s
        .members()
        .iter()
        .map(|&x| {
            let mut acc = 0usize;
            for &t in transversal {
                let xt = parent.mul(x as usize, t as usize);
                let back = chosen[cosets.rep(xt)] as usize;
                let h = parent.mul(parent.inv(back), xt);
                debug_assert!(p_sub.contains(h), "coset defect lands in P");
                acc = a.mul(acc, f.apply(h));
            }
            acc as u32
        })
        .collect();
    DegreeOneClass::new(s.clone(), a.clone(), images)
}

/// The degree-1 action of `X ∈ A(S,S)` on `Hom(S, A)`:
/// `Σ c_{[P,φ]} · tr^S_P(f ∘ φ)`. Modular coefficients require the
/// exponent of `A` to divide `p^k`.
pub fn h1_action(x: &BurnsideElement, f: &DegreeOneClass) -> Result<DegreeOneClass, Error> {
    let s = f.source();
    assert!(x.source() == s && x.target() == s, "the action needs a square module on S");
    let a = f.coefficients();
    let exp = Subgroup::full(a).exponent();
    if let CoeffRing::ModPk { p, k, modulus } = x.ring() {
        if modulus % exp as i64 != 0 {
            return Err(Error::PrecisionTooLow { p, k, exponent: exp });
        }
    }
    let parent = s.parent();
    let mut images = vec![0u32; s.order()];
    for (gen, c) in x.terms() {
        let p_sub = Subgroup::generate(parent, gen.members());
        let pulled: Vec<u32> =
            gen.images().iter().map(|&v| f.apply(v as usize) as u32).collect();
        let restricted = DegreeOneClass::new(p_sub, a.clone(), pulled);
        let tr = degree_one_transfer(s, &restricted);
        let e = c.rem_euclid(exp as i64) as u64;
        for (acc, &v) in images.iter_mut().zip(tr.images()) {
            *acc = a.mul(*acc as usize, a.power(v as usize, e)) as u32;
        }
    }
    Ok(DegreeOneClass::new(s.clone(), a.clone(), images))
}

/// The transfer map `τ^F_{H,X}: S → S/[S,H]` of a characteristic element
/// `X`, together with the data certifying the degree-1 identities: the
/// kernel equals the focal subgroup of `F`, and `τ∘τ = ε(X)·τ`.
pub struct TransferMap {
    pub map: DegreeOneClass,
    pub quotient: QuotientData,
    pub commutator: Subgroup,
    pub kernel: Subgroup,
    pub image: Subgroup,
    pub provenance: BurnsideElement,
}

pub fn transfer_map(
    f: &FusionSystem,
    h: &FusionSystem,
    x: &BurnsideElement,
) -> Result<TransferMap, Error> {
    assert!(h.s() == f.s() && h.p() == f.p(), "H must be a subsystem on the same S");
    if f.s().order() <= 64 {
        if !verify_characteristic(f, x)?.all() {
            return Err(Error::NotCharacteristic);
        }
    } else if !f.is_trivially_realized()
        || *x != BurnsideElement::identity(f.s(), x.ring())
    {
        return Err(Error::Unsupported(
            "characteristic verification needs |S| <= 64 unless F = F_S(S) with X = [S,id]".into(),
        ));
    }
    let commutator = focal_subgroup(h)?;
    let quotient = quotient_group(f.s(), &commutator)?;
    let pi = DegreeOneClass::projection(&quotient);
    let map = h1_action(x, &pi)?;

    let kernel = map.kernel();
    let focal = focal_subgroup(f)?;
    assert_eq!(kernel.members(), focal.members(), "Ker τ is the focal subgroup");

    // τ factors through S/[S,H], and the induced endomorphism satisfies
    // τ∘τ = ε(X)·τ
    let a = map.coefficients();
    let exp = Subgroup::full(a).exponent();
    let eps = epsilon(x).rem_euclid(exp as i64) as u64;
    for &x0 in f.s().members() {
        let once = map.apply(x0 as usize);
        let twice = map.apply(quotient.lift(once));
        assert_eq!(twice, a.power(once, eps), "τ∘τ = ε(X)·τ");
    }

    let image = map.image_subgroup();
    Ok(TransferMap { map, quotient, commutator, kernel, image, provenance: x.clone() })
}

/// The trivial subsystem `F_S(S)` on the Sylow subgroup of `F`.
pub fn inner_subsystem(f: &FusionSystem) -> FusionSystem {
    FusionSystem::ambient(f.p(), f.s().clone(), f.s().clone())
}

/// The subgroup `T_F ≤ S` with `T_F/S' = Im(τ^F_S)`: the preimage of the
/// image of the transfer map against the trivial subsystem. Independent of
/// the characteristic element used.
pub fn transfer_image_subgroup(f: &FusionSystem, x: &BurnsideElement) -> Result<Subgroup, Error> {
    let tm = transfer_map(f, &inner_subsystem(f), x)?;
    let members: Vec<u32> = f
        .s()
        .members()
        .iter()
        .copied()
        .filter(|&m| tm.image.contains(tm.quotient.proj.apply(m as usize)))
        .collect();
    Ok(Subgroup::generate(f.s().parent(), &members))
}

/// Classical transfer (Verlagerung) of the scope group into `S/S'`,
/// restricted to `S`, computed by direct coset summation. `q` must be the
/// quotient of `S` by its derived subgroup.
pub fn group_verlagerung(scope: &Subgroup, s: &Subgroup, q: &QuotientData) -> DegreeOneClass {
    assert!(s.is_subgroup_of(scope), "S must sit inside the scope");
    assert_eq!(q.proj.domain().members(), s.members(), "q must be a quotient of S");
    let parent = scope.parent();
    let cosets = coset_data(scope, s);
    let images: Vec<u32> = s
        .members()
        .iter()
        .map(|&x| {
            let mut acc = 0usize;
            for &t in cosets.reps() {
                let xt = parent.mul(x as usize, t as usize);
                let h = parent.mul(parent.inv(cosets.rep(xt)), xt);
                acc = q.group.mul(acc, q.proj.apply(h));
            }
            acc as u32
        })
        .collect();
    DegreeOneClass::new(s.clone(), q.group.clone(), images)
}

/// Internal direct decomposition `S/[S,H] = [S,F]/[S,H] × T_F[S,H]/[S,H]`,
/// verified by subgroup arithmetic in the quotient. When `S/[S,H]` is
/// cyclic and the focal subgroup is proper, additionally asserts
/// `[S,H] = [S,F]`.
pub fn check_decomposition(f: &FusionSystem, h: &FusionSystem) -> Result<bool, Error> {
    let omega = characteristic_biset(f);
    let tm = transfer_map(f, h, &omega)?;
    let t_f = transfer_image_subgroup(f, &omega)?;
    let focal = focal_subgroup(f)?;
    let q_full = Subgroup::full(&tm.quotient.group);
    let proj_sub = |sub: &Subgroup| {
        let members: Vec<u32> =
            sub.members().iter().map(|&m| tm.quotient.proj.apply(m as usize) as u32).collect();
        Subgroup::generate(q_full.parent(), &members)
    };
    let a_focal = proj_sub(&focal);
    let a_t = proj_sub(&t_f);
    let direct = a_focal.intersection(&a_t).order() == 1
        && a_focal.order() * a_t.order() == q_full.order();
    if q_full.is_cyclic() && focal.order() < f.s().order() {
        assert_eq!(
            tm.commutator.members(),
            focal.members(),
            "a cyclic quotient with proper focal forces [S,H] = [S,F]"
        );
    }
    Ok(direct)
}

/// Commutativity of the transfer square for `O^p_F(S) ≤ N ⊴ S`:
/// `τ^F_S ∘ incl = ρ ∘ τ^{F_N}_N` pointwise on `N`, where `ρ: N/N' → S/S'`
/// is induced by the inclusion; also asserts `ρ(Im τ^{F_N}) ⊆ Im τ^F`.
pub fn check_transfer_square(f: &FusionSystem, n: &Subgroup, k: u32) -> Result<bool, Error> {
    if !n.is_normal_in(f.s()) {
        return Err(Error::NotNormal { sub: n.order(), scope: f.s().order() });
    }
    let f_n = p_power_index_subsystem(f, n)?;
    let omega_f = characteristic_idempotent(f, k)?;
    let omega_n = characteristic_idempotent(&f_n, k)?;
    let tau_f = transfer_map(f, &inner_subsystem(f), &omega_f)?;
    let tau_n = transfer_map(&f_n, &inner_subsystem(&f_n), &omega_n)?;

    let rho: Vec<u32> = (0..tau_n.quotient.group.order())
        .map(|i| tau_f.quotient.proj.apply(tau_n.quotient.lift(i)) as u32)
        .collect();
    let commutes = n
        .members()
        .iter()
        .all(|&x| tau_f.map.apply(x as usize) == rho[tau_n.map.apply(x as usize)] as usize);
    for &a in tau_n.image.members() {
        assert!(
            tau_f.image.contains(rho[a as usize] as usize),
            "ρ maps Im τ^F_N into Im τ^F"
        );
    }
    Ok(commutes)
}

/// Outcome of the transfer identities quantified over all admissible
/// normal subgroups: conjugation invariance of subsystem transfer maps and
/// normality of their image subgroups, the intersection formula
/// `T_F ∩ N = T_{F_N}·S'`, and the direct products `S/V = U/V × T_F·V/V`.
#[derive(Debug, Clone, Copy)]
pub struct SectionReport {
    pub conjugation_invariance: bool,
    pub image_normality: bool,
    pub intersection_formula: bool,
    pub direct_products: bool,
    pub invariance_cases: usize,
    pub intersection_cases: usize,
    pub product_cases: usize,
}

impl SectionReport {
    pub fn all(&self) -> bool {
        self.conjugation_invariance
            && self.image_normality
            && self.intersection_formula
            && self.direct_products
    }
}

pub fn check_section5(f: &FusionSystem) -> Result<SectionReport, Error> {
    let SystemKind::Ambient { .. } = f.kind() else {
        panic!("the transfer identities quantify over ambient realizations");
    };
    if f.s().order() > 32 {
        return Err(Error::Unsupported(format!(
            "transfer identity sweeps need |S| <= 32, got {}",
            f.s().order()
        )));
    }
    let s = f.s();
    let parent = s.parent();
    let hyper = hyperfocal_subgroup(f)?;
    let focal = focal_subgroup(f)?;
    let derived = commutator_subgroup(s, s);
    let t_f = transfer_image_subgroup(f, &characteristic_biset(f))?;
    let subgroups = all_subgroups(s)?;

    let mut report = SectionReport {
        conjugation_invariance: true,
        image_normality: true,
        intersection_formula: true,
        direct_products: true,
        invariance_cases: 0,
        intersection_cases: 0,
        product_cases: 0,
    };

    for n in &subgroups {
        if !hyper.is_subgroup_of(n) || !n.is_normal_in(s) {
            continue;
        }
        let f_n = p_power_index_subsystem(f, n)?;
        let omega_n = characteristic_biset(&f_n);
        let tau_n = transfer_map(&f_n, &inner_subsystem(&f_n), &omega_n)?;
        let t_fn = transfer_image_subgroup(&f_n, &omega_n)?;

        // conjugation by any s0 ∈ S fixes τ^{F_N}: c̄_{s0} ∘ τ ∘ c_{s0^{-1}} = τ
        report.invariance_cases += 1;
        for &s0 in s.members() {
            let s0 = s0 as usize;
            let ok = n.members().iter().all(|&x| {
                let moved = parent.conj(parent.inv(s0), x as usize);
                let back = tau_n.quotient.lift(tau_n.map.apply(moved));
                tau_n.quotient.proj.apply(parent.conj(s0, back)) == tau_n.map.apply(x as usize)
            });
            if !ok {
                report.conjugation_invariance = false;
            }
        }
        if !t_fn.is_normal_in(s) {
            report.image_normality = false;
        }

        if focal.is_subgroup_of(n) {
            report.intersection_cases += 1;
            let lhs = t_f.intersection(n);
            let rhs = t_fn.product_with(&derived);
            if lhs.members() != rhs.members() {
                report.intersection_formula = false;
            }
        }

        // direct products S/V = U/V × T_F·V/V for T_{F_U}·[U,S] ≤ V ≤ U
        let u = n;
        let floor = t_fn.product_with(&commutator_subgroup(u, s));
        for v in &subgroups {
            if !floor.is_subgroup_of(v) || !v.is_subgroup_of(u) {
                continue;
            }
            assert!(v.is_normal_in(s), "[U,S] ≤ V forces normality in S");
            report.product_cases += 1;
            let q = quotient_group(s, v)?;
            let q_full = Subgroup::full(&q.group);
            let proj_sub = |sub: &Subgroup| {
                let members: Vec<u32> =
                    sub.members().iter().map(|&m| q.proj.apply(m as usize) as u32).collect();
                Subgroup::generate(q_full.parent(), &members)
            };
            let side_u = proj_sub(u);
            let side_t = proj_sub(&t_f.product_with(v));
            let ok = side_u.is_normal_in(&q_full)
                && side_t.is_normal_in(&q_full)
                && side_u.intersection(&side_t).order() == 1
                && side_u.order() * side_t.order() == q_full.order();
            if !ok {
                report.direct_products = false;
            }
        }
    }
    Ok(report)
}
