//! Executable forms of the control-of-transfer theorems: residual
//! agreement between a system and a subsystem, the wreath-quotient
//! obstruction to control, p-nilpotency detection, and the structural
//! conditions on S that force control.

use crate::error::Error;
use crate::fusion::{
    controls_transfer, elementary_focal_subgroup, focal_subgroup, hyperfocal_subgroup, is_trivial,
    normalizer_subsystem, FusionSystem, SystemKind,
};
use crate::group::{frattini_subgroup, p_residual, prime_divisors, Subgroup};
use crate::structure::{has_wreath_quotient, structure_profile};

/// Verdict of one theorem instance with recomputable witness strings.
#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub theorem: &'static str,
    pub instance: String,
    pub verdict: bool,
    pub witness: Vec<String>,
}

/// Equivalence of the three residual comparisons between `F` and a
/// subsystem `H` on the same Sylow subgroup: the elementary, focal and
/// hyperfocal subgroups of `F` and `H` agree either all three times or
/// not at all. The common boolean is the verdict.
pub fn tate_check(f: &FusionSystem, h: &FusionSystem) -> Result<TheoremReport, Error> {
    assert!(h.s() == f.s() && h.p() == f.p(), "H must be a subsystem on the same S");
    let rows = [
        ("elementary", elementary_focal_subgroup(f)?, elementary_focal_subgroup(h)?),
        ("focal", focal_subgroup(f)?, focal_subgroup(h)?),
        ("hyperfocal", hyperfocal_subgroup(f)?, hyperfocal_subgroup(h)?),
    ];
    let flags: Vec<bool> = rows.iter().map(|(_, a, b)| a.members() == b.members()).collect();
    assert!(
        flags.iter().all(|&x| x == flags[0]),
        "residual equalities must agree, got {flags:?} for {}",
        f.describe()
    );
    let witness = rows
        .iter()
        .map(|(tag, a, b)| format!("{tag}: {} in F vs {} in H", a.order(), b.order()))
        .collect();
    Ok(TheoremReport {
        theorem: "tate",
        instance: format!("{} against {}", f.describe(), h.describe()),
        verdict: flags[0],
        witness,
    })
}

/// If the normalizer subsystem fails to control transfer in `F`, then `S`
/// must surject onto `C_p ≀ C_p`; the witness kernel is recorded. When
/// control holds the verdict is vacuously true.
pub fn yoshida_check(f: &FusionSystem) -> Result<TheoremReport, Error> {
    let normalizer = normalizer_subsystem(f);
    let control = controls_transfer(f, &normalizer)?;
    if control {
        return Ok(TheoremReport {
            theorem: "yoshida",
            instance: f.describe(),
            verdict: true,
            witness: vec!["the normalizer subsystem controls transfer".into()],
        });
    }
    let witness = has_wreath_quotient(f.s(), f.p())?;
    let Some(w) = witness else {
        panic!("control fails for {} yet S has no wreath quotient", f.describe());
    };
    Ok(TheoremReport {
        theorem: "yoshida",
        instance: f.describe(),
        verdict: true,
        witness: vec![
            format!("control fails; kernel of order {}", w.kernel.order()),
            format!("quotient of order {} is C_p wr C_p", w.quotient.group.order()),
        ],
    })
}

/// The product criterion behind the wreath obstruction: for `E` elementary
/// abelian of index `p` in `R`, `x ∈ E` and `z ∈ R − E`, a nontrivial
/// `∏_{i<p} z^{-i} x z^i` forces a `C_p ≀ C_p` quotient of `R`. Returns
/// whether the product was nontrivial; the forced quotient is asserted.
pub fn wreath_lemma_check(
    r: &Subgroup,
    e: &Subgroup,
    x: usize,
    z: usize,
) -> Result<bool, Error> {
    let primes = prime_divisors(r.order() as u64);
    let bad = |msg: &str| Error::Unsupported(format!("wreath product lemma: {msg}"));
    let [p] = primes[..] else {
        return Err(bad("R must be a nontrivial p-group"));
    };
    if !e.is_subgroup_of(r) || r.order() != e.order() * p as usize {
        return Err(bad("E must have index p in R"));
    }
    if !e.is_elementary_abelian(p) {
        return Err(bad("E must be elementary abelian"));
    }
    if !e.contains(x) || !r.contains(z) || e.contains(z) {
        return Err(bad("need x in E and z in R - E"));
    }
    let parent = r.parent();
    let mut acc = 0usize;
    let mut zi = 0usize;
    for _ in 0..p {
        acc = parent.mul(acc, parent.conj(parent.inv(zi), x));
        zi = parent.mul(zi, z);
    }
    if acc == 0 {
        return Ok(false);
    }
    let w = has_wreath_quotient(r, p)?;
    assert!(w.is_some(), "a nontrivial norm product forces a wreath quotient");
    Ok(true)
}

/// Three equivalent readings of p-nilpotency, asserted to agree: the
/// elementary focal subgroup collapses onto the Frattini subgroup, the
/// fusion system is trivial, and the ambient group has a normal
/// p-complement.
pub fn p_nilpotency_check(f: &FusionSystem) -> Result<TheoremReport, Error> {
    let SystemKind::Ambient { ambient } = f.kind() else {
        panic!("p-nilpotency compares against the ambient group");
    };
    let elementary = elementary_focal_subgroup(f)?;
    let frattini = frattini_subgroup(f.s(), f.p());
    let restriction_iso = elementary.members() == frattini.members();
    let trivial = is_trivial(f)?;
    let residual = p_residual(ambient, f.p());
    let complement = residual.order() as u64 % f.p() != 0;
    assert_eq!(
        restriction_iso, trivial,
        "degree-1 restriction is an isomorphism exactly for trivial fusion: {}",
        f.describe()
    );
    assert_eq!(
        trivial, complement,
        "trivial fusion matches the normal p-complement criterion: {}",
        f.describe()
    );
    Ok(TheoremReport {
        theorem: "p-nilpotency",
        instance: f.describe(),
        verdict: trivial,
        witness: vec![
            format!("elementary focal of order {}, Frattini of order {}", elementary.order(), frattini.order()),
            format!("p-residual of order {}", residual.order()),
        ],
    })
}

/// Structural conditions on `S` that force the normalizer subsystem to
/// control transfer: nilpotency class below `p`, exponent at most `p`,
/// regularity, and (for odd `p`) metacyclic structure. Odd nonabelian
/// metacyclic `S` additionally forces a proper focal subgroup. One report
/// per condition that fires.
pub fn corollary_suite(f: &FusionSystem) -> Result<Vec<TheoremReport>, Error> {
    let p = f.p();
    let profile = structure_profile(f.s(), p);
    let normalizer = normalizer_subsystem(f);
    let control = controls_transfer(f, &normalizer)?;
    let mut fired: Vec<(&'static str, String)> = Vec::new();
    if (profile.nilpotency_class as u64) < p {
        fired.push(("control-class", format!("class {} < p", profile.nilpotency_class)));
    }
    if profile.exponent <= p {
        fired.push(("control-exponent", format!("exponent {} <= p", profile.exponent)));
    }
    if profile.is_regular {
        fired.push(("control-regular", "S is regular".into()));
    }
    if p != 2 && profile.is_metacyclic {
        fired.push(("control-metacyclic", "S is metacyclic at odd p".into()));
    }
    let mut out = Vec::new();
    for (tag, why) in fired {
        assert!(control, "{why} must force control of transfer: {}", f.describe());
        out.push(TheoremReport {
            theorem: tag,
            instance: f.describe(),
            verdict: true,
            witness: vec![why],
        });
    }
    if p != 2 && profile.is_metacyclic && !profile.is_abelian {
        let focal = focal_subgroup(f)?;
        assert!(
            focal.order() < f.s().order(),
            "odd nonabelian metacyclic S keeps the focal subgroup proper: {}",
            f.describe()
        );
        out.push(TheoremReport {
            theorem: "proper-focal",
            instance: f.describe(),
            verdict: true,
            witness: vec![format!("focal of order {} < {}", focal.order(), f.s().order())],
        });
    }
    Ok(out)
}
