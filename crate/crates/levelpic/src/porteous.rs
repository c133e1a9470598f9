//! First-principles derivation of the Mukai-type degeneracy classes.
//!
//! In genus 6 and 8 a general curve embeds in a homogeneous Mukai variety,
//! and the locus where a torsion twist of the embedding bundle acquires
//! unexpected sections is a divisor. This module rebuilds its class:
//!
//! 1. push-forward first Chern classes of the twisted bundle and of the
//!    squared line bundle, expressed in the tautological basis of the
//!    auxiliary space (the auxiliary symbols `a, b, c` record the
//!    universal line-bundle data, `d` the locus where the torsion sheaf
//!    degenerates, `rho` the ramification correction);
//! 2. the first-degeneracy-locus formula `[Z] = c1(F) - c1(E)` for the
//!    evaluation-type morphism between the assembled bundles, checked
//!    against its closed form in the rank `r`;
//! 3. push-forward along the generically finite projection `sigma` to the
//!    partial level model, substituting the known images of the
//!    tautological symbols and expanding the pulled-back boundary.
//!
//! The endpoint equals the closed-form virtual class of
//! [`crate::formulas::mukai_virtual_class`]; the pipeline recomputes it
//! from the Chern-class inputs rather than quoting it.

use std::fmt::Write as _;

use crate::divclass::{BasisSymbol, DivisorClass, SpaceDescriptor};
use crate::formulas;
use crate::{rat, rat_int, Error, Rational};

use BasisSymbol::*;

/// Numerical frame of the derivation for one genus: the Brill-Noether
/// rank `r`, the line-bundle degree `d`, and the degree of the projection
/// `sigma` from the auxiliary space to the partial level model.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PipelineConfig {
    g: u32,
    level: u32,
    r: u32,
    d: u32,
    deg_sigma: u32,
}

impl PipelineConfig {
    /// Only genus 6 (rank 2, degree 6, five-fold `sigma`) and genus 8
    /// (rank 3, degree 9, fourteen-fold `sigma`) carry the construction.
    pub fn new(g: u32, level: u32) -> Result<Self, Error> {
        // Validates genus and level in one place.
        let aux = SpaceDescriptor::gspace(g, level)?;
        let (r, d) = match aux.model() {
            crate::divclass::SpaceModel::GSpace { r, d } => (r, d),
            _ => unreachable!("gspace constructor returns auxiliary models"),
        };
        let deg_sigma = if g == 6 { 5 } else { 14 };
        Ok(Self {
            g,
            level,
            r,
            d,
            deg_sigma,
        })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn deg_sigma(&self) -> u32 {
        self.deg_sigma
    }

    /// The auxiliary space the tautological classes live on.
    pub fn aux_space(&self) -> SpaceDescriptor {
        SpaceDescriptor::gspace(self.g, self.level).expect("validated at construction")
    }

    /// The partial level model the derivation lands on.
    pub fn target_space(&self) -> SpaceDescriptor {
        SpaceDescriptor::rprime(self.g, self.level).expect("validated at construction")
    }
}

/// Which torsion twist the pushforward uses. The first Chern class comes
/// out the same either way (the twist only shifts even-degree terms), and
/// keeping both spellings lets callers say which bundle they mean.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TorsionTwist {
    Direct,
    Inverse,
}

fn aux_class(
    cfg: &PipelineConfig,
    terms: Vec<(BasisSymbol, Rational)>,
) -> DivisorClass {
    DivisorClass::from_terms(cfg.aux_space(), terms)
        .expect("tautological symbols belong to the auxiliary basis")
}

/// `c1` of the pushforward of the torsion-twisted line bundle:
/// `lambda + 1/2 a - 1/2 b + d - 1/2 rho`. The half-integral terms are
/// the Riemann-Roch contribution of the twist; `d` accounts for the locus
/// where the pushforward acquires a rank-one obstruction.
pub fn c1_pushforward_twisted(cfg: &PipelineConfig, _twist: TorsionTwist) -> DivisorClass {
    aux_class(
        cfg,
        vec![
            (Lambda, rat_int(1)),
            (FrakA, rat(1, 2)),
            (FrakB, rat(-1, 2)),
            (FrakD, rat_int(1)),
            (Rho, rat(-1, 2)),
        ],
    )
}

/// `c1` of the pushforward of the squared line bundle:
/// `lambda + 2 a - b`.
pub fn c1_pushforward_square(cfg: &PipelineConfig) -> DivisorClass {
    aux_class(
        cfg,
        vec![
            (Lambda, rat_int(1)),
            (FrakA, rat_int(2)),
            (FrakB, rat_int(-1)),
        ],
    )
}

/// First Chern class of a symmetric square: `c1(Sym^2 G) = (rk G + 1)
/// c1(G)` for a bundle of the given rank.
pub fn sym2_c1(rank: u32, c1: &DivisorClass) -> DivisorClass {
    c1.scale(&rat_int(rank as i64 + 1))
}

/// `c1` of the domain bundle of the evaluation-type morphism: the twisted
/// pushforward minus `r - 1` copies of the squared pushforward, corrected
/// by the symmetric square of the rank-`(r+1)` span bundle whose `c1` is
/// `c` (each of the `r - 1` copies contributes one symmetric-square
/// factor, giving the multiple `(r-1)(r+2) c`).
pub fn c1_domain_bundle(cfg: &PipelineConfig) -> DivisorClass {
    let r = cfg.r() as i64;
    let twisted = c1_pushforward_twisted(cfg, TorsionTwist::Direct);
    let square = c1_pushforward_square(cfg);
    let span_c1 = aux_class(cfg, vec![(FrakC, rat_int(1))]);
    let sym2 = sym2_c1(cfg.r() + 1, &span_c1);
    twisted
        .sub(&square.scale(&rat_int(r - 1)))
        .and_then(|x| x.add(&sym2.scale(&rat_int(r - 1))))
        .expect("all summands share the auxiliary space")
}

/// The closed form the degeneracy class must equal:
/// `(r-3) lambda + (2r-3) a - (r-2) b - (r^2+r-2) c - 2 d + rho`.
fn degeneracy_closed_form(cfg: &PipelineConfig) -> DivisorClass {
    let r = cfg.r() as i64;
    aux_class(
        cfg,
        vec![
            (Lambda, rat_int(r - 3)),
            (FrakA, rat_int(2 * r - 3)),
            (FrakB, rat_int(-(r - 2))),
            (FrakC, rat_int(-(r * r + r - 2))),
            (FrakD, rat_int(-2)),
            (Rho, rat_int(1)),
        ],
    )
}

/// Class of the first degeneracy locus of the evaluation-type morphism,
/// `[Z] = c1(F) - c1(E)`, where the codomain `F` is the obstruction
/// bundle with `c1(F) = -c1` of the twisted pushforward. The result is
/// checked against the closed form in `r`; a mismatch is a bug in the
/// Chern-class bank, not a user error.
pub fn degeneracy_class(cfg: &PipelineConfig) -> Result<DivisorClass, Error> {
    let c1_f = c1_pushforward_twisted(cfg, TorsionTwist::Direct).neg();
    let computed = c1_f.sub(&c1_domain_bundle(cfg))?;
    let closed = degeneracy_closed_form(cfg);
    if computed != closed {
        return Err(Error::InternalInconsistency(format!(
            "degeneracy class at g={}: computed {computed}, closed form {closed}",
            cfg.g()
        )));
    }
    Ok(computed)
}

/// The expansion of the pulled-back total boundary on the partial model:
/// `d0' + d0'' + l sum_a d0^(a)`, obtained from the actual pullback rule.
fn pulled_back_boundary(cfg: &PipelineConfig) -> Result<DivisorClass, Error> {
    let mbar = SpaceDescriptor::mbar(cfg.g(), cfg.level())?;
    DivisorClass::from_terms(mbar, vec![(Delta0, rat_int(1))])?
        .pullback(&cfg.target_space())
}

/// The images `sigma_*` of the tautological symbols `a, b, c`, as pairs
/// `(lambda coefficient, pi*d0 coefficient)`.
fn sigma_constants(cfg: &PipelineConfig) -> [(BasisSymbol, Rational, Rational); 3] {
    match cfg.g() {
        6 => [
            (FrakA, rat_int(-93), rat(23, 2)),
            (FrakB, rat(-3, 2), rat(3, 4)),
            (FrakC, rat(-133, 4), rat(33, 8)),
        ],
        8 => [
            (FrakA, rat_int(-267), rat(69, 2)),
            (FrakB, rat_int(3), rat(3, 2)),
            (FrakC, rat_int(-100), rat_int(13)),
        ],
        _ => unreachable!("config construction limits the genus"),
    }
}

/// The image `sigma_*(s)` on the partial model for one auxiliary basis
/// symbol `s`, fully expanded into the boundary basis.
fn sigma_image(cfg: &PipelineConfig, sym: BasisSymbol) -> Result<DivisorClass, Error> {
    let target = cfg.target_space();
    let deg = rat_int(cfg.deg_sigma() as i64);
    let boundary = pulled_back_boundary(cfg)?;
    match sym {
        // Pulled-back classes push forward with the degree of sigma.
        Lambda => DivisorClass::from_terms(target, vec![(Lambda, deg)]),
        PullbackDelta0 => Ok(boundary.scale(&deg)),
        Rho => Ok(formulas::rho(&target)?.scale(&deg)),
        Delta0Prime | Delta0DoublePrime | Delta0Ram(_) => {
            DivisorClass::from_terms(target, vec![(sym, deg)])
        }
        // The degenerate locus maps onto the Wirtinger boundary with
        // multiplicity one; its pushforward carries the full degree.
        FrakD => DivisorClass::from_terms(target, vec![(Delta0DoublePrime, deg)]),
        FrakA | FrakB | FrakC => {
            let (_, lam, pid0) = sigma_constants(cfg)
                .into_iter()
                .find(|(s, _, _)| *s == sym)
                .map(|(s, x, y)| (s, x, y))
                .expect("constants cover a, b, c");
            DivisorClass::from_terms(target, vec![(Lambda, lam)])?
                .add(&boundary.scale(&pid0))
        }
        other => Err(Error::UnknownSymbol(other)),
    }
}

/// Pushes a class on the auxiliary space forward along `sigma`, symbol by
/// symbol, landing on the partial level model.
pub fn substitute_and_pushforward(
    cfg: &PipelineConfig,
    z: &DivisorClass,
) -> Result<DivisorClass, Error> {
    if z.space() != cfg.aux_space() {
        return Err(Error::SpaceMismatch {
            left: z.space(),
            right: cfg.aux_space(),
        });
    }
    let mut acc = DivisorClass::zero(cfg.target_space());
    for (sym, coeff) in z.terms() {
        acc = acc.add(&sigma_image(cfg, sym)?.scale(coeff))?;
    }
    Ok(acc)
}

/// End-to-end derivation: degeneracy class on the auxiliary space, then
/// pushforward to the partial level model.
pub fn derive_mukai_class(g: u32, level: u32) -> Result<DivisorClass, Error> {
    let cfg = PipelineConfig::new(g, level)?;
    substitute_and_pushforward(&cfg, &degeneracy_class(&cfg)?)
}

/// One recorded step of the derivation transcript.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DerivationStep {
    /// Short machine-stable name of the rule applied.
    pub rule: &'static str,
    /// Human-readable content of the step, exact classes included.
    pub detail: String,
}

/// A full derivation: the numerical frame, the steps in order, and the
/// resulting class on the partial level model.
#[derive(Clone, PartialEq, Debug)]
pub struct Derivation {
    pub config: PipelineConfig,
    pub steps: Vec<DerivationStep>,
    pub result: DivisorClass,
}

/// Runs [`derive_mukai_class`] and records what happened at each step.
/// The recorded classes are the ones actually computed, not re-quoted
/// constants; the final step equals the returned result.
pub fn derive_transcript(g: u32, level: u32) -> Result<Derivation, Error> {
    let cfg = PipelineConfig::new(g, level)?;
    let mut steps = Vec::new();

    let twisted = c1_pushforward_twisted(&cfg, TorsionTwist::Direct);
    steps.push(DerivationStep {
        rule: "pushforward-chern-twisted",
        detail: format!("c1(chi_*(L x eta)) = {twisted} (either twist direction)"),
    });

    let square = c1_pushforward_square(&cfg);
    steps.push(DerivationStep {
        rule: "pushforward-chern-square",
        detail: format!("c1(chi_*(L^2)) = {square}"),
    });

    let domain = c1_domain_bundle(&cfg);
    steps.push(DerivationStep {
        rule: "domain-bundle",
        detail: format!(
            "c1(E) = c1(twisted) - {} c1(square) + {} c = {domain}",
            cfg.r() - 1,
            (cfg.r() - 1) * (cfg.r() + 2),
        ),
    });

    let codomain = twisted.neg();
    steps.push(DerivationStep {
        rule: "codomain-bundle",
        detail: format!("c1(F) = -c1(twisted) = {codomain}"),
    });

    let z = degeneracy_class(&cfg)?;
    steps.push(DerivationStep {
        rule: "first-degeneracy-locus",
        detail: format!(
            "[Z] = c1(F) - c1(E) = {z}; agrees with the closed form \
             (r-3) lambda + (2r-3) a - (r-2) b - (r^2+r-2) c - 2 d + rho at r = {}",
            cfg.r()
        ),
    });

    let mut sigma_lines = format!("deg sigma = {}; lambda -> {} lambda", cfg.deg_sigma(), cfg.deg_sigma());
    for (sym, lam, pid0) in sigma_constants(&cfg) {
        let image = DivisorClass::from_terms(
            cfg.aux_space(),
            vec![(Lambda, lam), (PullbackDelta0, pid0)],
        )
        .expect("lambda and pi*d0 are auxiliary symbols");
        let _ = write!(sigma_lines, "; {} -> {image}", sym.text(cfg.g()));
    }
    let _ = write!(
        sigma_lines,
        "; d -> {} d0'' (multiplicity one onto the Wirtinger boundary); rho -> {} rho",
        cfg.deg_sigma(),
        cfg.deg_sigma()
    );
    steps.push(DerivationStep {
        rule: "pushforward-sigma",
        detail: sigma_lines,
    });

    steps.push(DerivationStep {
        rule: "expand-boundary",
        detail: format!(
            "pi*d0 = {}; rho = {}",
            pulled_back_boundary(&cfg)?,
            formulas::rho(&cfg.target_space())?
        ),
    });

    let result = substitute_and_pushforward(&cfg, &z)?;
    steps.push(DerivationStep {
        rule: "result",
        detail: format!("sigma_*[Z] = {result}"),
    });

    Ok(Derivation {
        config: cfg,
        steps,
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divclass::SpaceModel;

    #[test]
    fn config_frames() {
        let c6 = PipelineConfig::new(6, 3).unwrap();
        assert_eq!((c6.r(), c6.d(), c6.deg_sigma()), (2, 6, 5));
        assert_eq!(c6.aux_space().model(), SpaceModel::GSpace { r: 2, d: 6 });
        let c8 = PipelineConfig::new(8, 3).unwrap();
        assert_eq!((c8.r(), c8.d(), c8.deg_sigma()), (3, 9, 14));
        assert_eq!(PipelineConfig::new(7, 3), Err(Error::UnsupportedGenus(7)));
        assert_eq!(PipelineConfig::new(6, 4), Err(Error::NonPrimeLevel(4)));
    }

    #[test]
    fn chern_inputs_are_pinned() {
        let cfg = PipelineConfig::new(6, 3).unwrap();
        let twisted = c1_pushforward_twisted(&cfg, TorsionTwist::Direct);
        assert_eq!(twisted.to_string(), "lambda + 1/2 a - 1/2 b + d - 1/2 rho");
        assert_eq!(
            twisted,
            c1_pushforward_twisted(&cfg, TorsionTwist::Inverse)
        );
        assert_eq!(c1_pushforward_square(&cfg).to_string(), "lambda + 2 a - b");
    }

    #[test]
    fn sym2_rule() {
        let cfg = PipelineConfig::new(6, 3).unwrap();
        let c1 = c1_pushforward_square(&cfg);
        assert_eq!(sym2_c1(2, &c1), c1.scale(&rat_int(3)));
    }

    #[test]
    fn domain_bundle_classes() {
        let c6 = PipelineConfig::new(6, 3).unwrap();
        assert_eq!(
            c1_domain_bundle(&c6).to_string(),
            "-3/2 a + 1/2 b + 4 c + d - 1/2 rho"
        );
        let c8 = PipelineConfig::new(8, 3).unwrap();
        assert_eq!(
            c1_domain_bundle(&c8).to_string(),
            "-lambda - 7/2 a + 3/2 b + 10 c + d - 1/2 rho"
        );
    }

    #[test]
    fn degeneracy_classes_match_closed_form() {
        let c6 = PipelineConfig::new(6, 3).unwrap();
        assert_eq!(
            degeneracy_class(&c6).unwrap().to_string(),
            "-lambda + a - 4 c - 2 d + rho"
        );
        let c8 = PipelineConfig::new(8, 3).unwrap();
        assert_eq!(
            degeneracy_class(&c8).unwrap().to_string(),
            "3 a - b - 10 c - 2 d + rho"
        );
    }

    #[test]
    fn sigma_images_of_single_symbols() {
        let cfg = PipelineConfig::new(6, 3).unwrap();
        let one = |sym| {
            let z = DivisorClass::from_terms(cfg.aux_space(), vec![(sym, rat_int(1))]).unwrap();
            substitute_and_pushforward(&cfg, &z).unwrap()
        };
        assert_eq!(one(Lambda).to_string(), "5 lambda");
        let a = one(FrakA);
        assert_eq!(a.coeff(Lambda), rat_int(-93));
        assert_eq!(a.coeff(Delta0Prime), rat(23, 2));
        assert_eq!(a.coeff(Delta0DoublePrime), rat(23, 2));
        assert_eq!(a.coeff(Delta0Ram(1)), rat(69, 2));
        assert_eq!(one(Rho).to_string(), "10/3 d0^(1)");
        assert_eq!(
            one(PullbackDelta0).to_string(),
            "5 d0' + 5 d0'' + 15 d0^(1)"
        );
        let cfg8 = PipelineConfig::new(8, 3).unwrap();
        let d = DivisorClass::from_terms(cfg8.aux_space(), vec![(FrakD, rat_int(1))]).unwrap();
        assert_eq!(
            substitute_and_pushforward(&cfg8, &d).unwrap().to_string(),
            "14 d0''"
        );
    }

    #[test]
    fn pushforward_is_linear_and_checks_spaces() {
        let cfg = PipelineConfig::new(8, 3).unwrap();
        let x = DivisorClass::from_terms(
            cfg.aux_space(),
            vec![(FrakA, rat(1, 2)), (Lambda, rat_int(3))],
        )
        .unwrap();
        let y = DivisorClass::from_terms(
            cfg.aux_space(),
            vec![(FrakA, rat(-1, 2)), (Rho, rat_int(2))],
        )
        .unwrap();
        let lhs = substitute_and_pushforward(&cfg, &x.add(&y).unwrap()).unwrap();
        let rhs = substitute_and_pushforward(&cfg, &x)
            .unwrap()
            .add(&substitute_and_pushforward(&cfg, &y).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);

        let wrong = DivisorClass::zero(cfg.target_space());
        assert!(matches!(
            substitute_and_pushforward(&cfg, &wrong),
            Err(Error::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn derivation_reproduces_the_closed_forms() {
        for level in [2, 3] {
            assert_eq!(
                derive_mukai_class(6, level).unwrap(),
                formulas::mukai_virtual_class(6, level).unwrap()
            );
            assert_eq!(
                derive_mukai_class(8, level).unwrap(),
                formulas::mukai_virtual_class(8, level).unwrap()
            );
        }
    }

    #[test]
    fn transcript_records_the_actual_run() {
        let t = derive_transcript(8, 3).unwrap();
        assert_eq!(t.result, formulas::mukai_virtual_class(8, 3).unwrap());
        let rules: Vec<&str> = t.steps.iter().map(|s| s.rule).collect();
        assert_eq!(
            rules,
            vec![
                "pushforward-chern-twisted",
                "pushforward-chern-square",
                "domain-bundle",
                "codomain-bundle",
                "first-degeneracy-locus",
                "pushforward-sigma",
                "expand-boundary",
                "result",
            ]
        );
        assert!(t.steps[4].detail.contains("3 a - b - 10 c - 2 d + rho"));
        assert!(t.steps[5].detail.contains("deg sigma = 14"));
        assert!(t.steps[7]
            .detail
            .contains("196 lambda - 28 d0' - 56 d0'' - 224/3 d0^(1)"));
    }
}
