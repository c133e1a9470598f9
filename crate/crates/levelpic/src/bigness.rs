//! Bigness certificates for canonical classes.
//!
//! Given a catalog of effective divisor classes on a level model, the
//! canonical class is big once it can be written as `epsilon * lambda +
//! sum_i alpha_i E_i + R` with `epsilon > 0`, every `alpha_i >= 0`, and
//! `R` an effective combination of boundary symbols. [`max_epsilon`]
//! finds the largest such `epsilon` by exact linear programming (the
//! unique lexicographically smallest coefficient vector among optimal
//! ones), returning a dual vector as an optimality witness and
//! cross-checking small programs against exhaustive vertex enumeration.
//! [`verify_certificate`] replays a claimed decomposition from scratch,
//! sharing no code path with the search.
//!
//! Everything is exact: a reported `epsilon = 3/17` means exactly `3/17`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::divclass::{BasisSymbol, DivisorClass, SpaceDescriptor};
use crate::formulas::{self, SlopeReport};
use crate::linprog::{self, LpOutcome, StandardLp};
use crate::{Error, Rational};

/// One named effective class. The name addresses the entry in
/// certificates; the provenance is free-form documentation.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(default)]
    pub provenance: String,
    pub class: DivisorClass,
}

/// A catalog of effective classes on one space. Invariants, enforced at
/// construction: entry names are distinct and nonempty, all classes share
/// the catalog's space, and every class has positive `lambda` coefficient
/// (so it can enter a normalized combination).
#[derive(Clone, PartialEq, Debug)]
pub struct EffectiveCatalog {
    space: SpaceDescriptor,
    entries: Vec<CatalogEntry>,
}

impl EffectiveCatalog {
    pub fn empty(space: SpaceDescriptor) -> Self {
        Self {
            space,
            entries: Vec::new(),
        }
    }

    pub fn new(space: SpaceDescriptor, entries: Vec<CatalogEntry>) -> Result<Self, Error> {
        let mut catalog = Self::empty(space);
        for entry in entries {
            catalog.push(entry)?;
        }
        Ok(catalog)
    }

    /// Builds a catalog from a nonempty entry list, taking the space from
    /// the first entry.
    pub fn from_entries(entries: Vec<CatalogEntry>) -> Result<Self, Error> {
        let space = entries
            .first()
            .map(|e| e.class.space())
            .ok_or_else(|| Error::InvalidCatalog("no entries to take the space from".into()))?;
        Self::new(space, entries)
    }

    pub fn push(&mut self, entry: CatalogEntry) -> Result<(), Error> {
        if entry.name.is_empty() {
            return Err(Error::InvalidCatalog("entry with an empty name".into()));
        }
        if self.entries.iter().any(|e| e.name == entry.name) {
            return Err(Error::DuplicateName(entry.name));
        }
        if entry.class.space() != self.space {
            return Err(Error::SpaceMismatch {
                left: entry.class.space(),
                right: self.space,
            });
        }
        if entry.class.coeff(BasisSymbol::Lambda) <= Rational::zero() {
            return Err(Error::NotNormalizable(entry.name));
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Parses the on-disk format: a JSON array of entries.
    pub fn from_json_str(s: &str) -> Result<Self, Error> {
        let entries: Vec<CatalogEntry> =
            serde_json::from_str(s).map_err(|e| Error::InvalidCatalog(e.to_string()))?;
        Self::from_entries(entries)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("catalog entries serialize")
    }
}

/// The two effective classes behind the genus-8, level-3 general-type
/// proof: the Mukai-type and syzygy-type virtual classes, each with the
/// excess degeneracy along the ramified boundary removed. (The Wirtinger
/// correction is deliberately not applied: the uncorrected classes exceed
/// the honest divisor classes by effective boundary multiples, which is
/// all a bigness certificate needs.)
pub fn builtin_catalog(g: u32, level: u32) -> Result<EffectiveCatalog, Error> {
    if (g, level) != (8, 3) {
        return Err(Error::OutOfValidity(format!(
            "a built-in catalog exists only for genus 8, level 3 (asked for g={g}, l={level})"
        )));
    }
    let space = SpaceDescriptor::rprime(8, 3)?;
    let ram_correction = DivisorClass::from_terms(
        space,
        vec![(BasisSymbol::Delta0Ram(1), crate::rat_int(-28))],
    )?;
    let mukai = formulas::mukai_virtual_class(8, 3)?.add(&ram_correction)?;
    EffectiveCatalog::new(
        space,
        vec![
            CatalogEntry {
                name: "mukai-improved".into(),
                provenance: "degeneracy class of the torsion-twisted Mukai bundle, \
                             ramified-boundary excess (order 2, degree 14) removed"
                    .into(),
                class: mukai,
            },
            CatalogEntry {
                name: "koszul-improved".into(),
                provenance: "order-3 syzygy-vanishing class, ramified-boundary excess \
                             (order 10) removed"
                    .into(),
                class: formulas::koszul_improved_class(3, 3)?,
            },
        ],
    )
}

/// A claimed decomposition `K = epsilon * lambda + sum alpha_i E_i +
/// residual`. Produced by [`max_epsilon`] or supplied externally;
/// [`verify_certificate`] checks it against a catalog and a canonical
/// class from scratch.
#[derive(Clone, PartialEq, Debug)]
pub struct BignessCertificate {
    pub epsilon: Rational,
    /// Coefficients by catalog entry name; absent names mean zero.
    pub coefficients: BTreeMap<String, Rational>,
    pub residual: DivisorClass,
}

/// Result of replaying a certificate.
#[derive(Clone, PartialEq, Debug)]
pub struct VerificationReport {
    pub pass: bool,
    /// `K - epsilon * lambda - sum alpha_i E_i`, recomputed here.
    pub recomputed_residual: DivisorClass,
    /// Human-readable reasons when `pass` is false.
    pub failures: Vec<String>,
}

fn lambda_class(space: SpaceDescriptor, value: &Rational) -> Result<DivisorClass, Error> {
    DivisorClass::from_terms(space, vec![(BasisSymbol::Lambda, value.clone())])
}

/// Replays a certificate: recomputes the residual, and checks that
/// `epsilon > 0`, that the residual matches the claimed one, and that it
/// is a nonnegative combination of boundary symbols. Structural problems
/// (unknown entry names, negative coefficients, mismatched spaces) are
/// errors; mathematical failures come back as `pass = false` with
/// reasons.
pub fn verify_certificate(
    k: &DivisorClass,
    catalog: &EffectiveCatalog,
    certificate: &BignessCertificate,
) -> Result<VerificationReport, Error> {
    let space = k.space();
    if space != catalog.space() {
        return Err(Error::SpaceMismatch {
            left: space,
            right: catalog.space(),
        });
    }
    if certificate.residual.space() != space {
        return Err(Error::SpaceMismatch {
            left: certificate.residual.space(),
            right: space,
        });
    }
    let mut combination = DivisorClass::zero(space);
    for (name, alpha) in &certificate.coefficients {
        let entry = catalog
            .get(name)
            .ok_or_else(|| Error::UnknownCatalogEntry(name.clone()))?;
        if *alpha < Rational::zero() {
            return Err(Error::NegativeCoefficient(name.clone()));
        }
        combination = combination.add(&entry.class.scale(alpha))?;
    }
    let recomputed = k
        .sub(&lambda_class(space, &certificate.epsilon)?)?
        .sub(&combination)?;

    let mut failures = Vec::new();
    if certificate.epsilon <= Rational::zero() {
        failures.push(format!(
            "epsilon = {} is not positive",
            certificate.epsilon
        ));
    }
    if recomputed != certificate.residual {
        failures.push(format!(
            "claimed residual {} but recomputation gives {}",
            certificate.residual, recomputed
        ));
    }
    if !recomputed.coeff(BasisSymbol::Lambda).is_zero() {
        failures.push(format!(
            "residual keeps a lambda coefficient of {}",
            recomputed.coeff(BasisSymbol::Lambda)
        ));
    }
    for (sym, c) in recomputed.terms() {
        if sym != BasisSymbol::Lambda && *c < Rational::zero() {
            failures.push(format!(
                "residual coefficient of {} is negative: {c}",
                sym.text(space.g())
            ));
        }
    }
    Ok(VerificationReport {
        pass: failures.is_empty(),
        recomputed_residual: recomputed,
        failures,
    })
}

/// The optimum of the bigness program, independent of the sign of
/// `epsilon`.
#[derive(Clone, PartialEq, Debug)]
pub struct OptimalCombination {
    pub epsilon: Rational,
    /// Optimal coefficients by entry name (lexicographically smallest
    /// vector, in catalog order, among the optima).
    pub coefficients: BTreeMap<String, Rational>,
    /// `K - epsilon * lambda - sum alpha_i E_i`; effective and free of
    /// `lambda` by construction.
    pub residual: DivisorClass,
    /// Dual multiplier per boundary symbol: the optimality witness,
    /// verified exactly against the primal value inside the solver.
    pub dual: Vec<(BasisSymbol, Rational)>,
    /// Whether exhaustive vertex enumeration re-derived the optimum
    /// (done for catalogs of at most four classes).
    pub cross_checked: bool,
}

impl OptimalCombination {
    pub fn certificate(&self) -> BignessCertificate {
        BignessCertificate {
            epsilon: self.epsilon.clone(),
            coefficients: self.coefficients.clone(),
            residual: self.residual.clone(),
        }
    }
}

/// Outcome of the search for the best `epsilon`.
#[derive(Clone, PartialEq, Debug)]
pub enum MaxEpsilonOutcome {
    /// `epsilon > 0`: bigness certified.
    Certified(OptimalCombination),
    /// The program is feasible but its best `epsilon` is not positive;
    /// the optimum is reported for inspection.
    NotPositive(OptimalCombination),
    /// No nonnegative combination covers the boundary of `K` at all
    /// (always the case for an empty catalog against a canonical class).
    Infeasible,
}

/// Maximizes `epsilon` with `K - epsilon * lambda - sum alpha_i E_i`
/// effective and supported on boundary symbols, over `alpha >= 0`.
/// Equivalently: minimizes the `lambda`-cost `sum alpha_i *
/// lambda(E_i)`, subject to the combination covering every boundary
/// coefficient of `K`; then `epsilon = lambda(K) - cost`.
pub fn max_epsilon(
    k: &DivisorClass,
    catalog: &EffectiveCatalog,
) -> Result<MaxEpsilonOutcome, Error> {
    let space = k.space();
    if space != catalog.space() {
        return Err(Error::SpaceMismatch {
            left: space,
            right: catalog.space(),
        });
    }
    let boundary = space.boundary_basis();
    let lp = StandardLp {
        c: catalog
            .entries()
            .iter()
            .map(|e| e.class.coeff(BasisSymbol::Lambda))
            .collect(),
        a: boundary
            .iter()
            .map(|sym| {
                catalog
                    .entries()
                    .iter()
                    .map(|e| -e.class.coeff(*sym))
                    .collect()
            })
            .collect(),
        b: boundary.iter().map(|sym| -k.coeff(*sym)).collect(),
    };
    let solution = match linprog::solve_lex_min(&lp)? {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Infeasible => return Ok(MaxEpsilonOutcome::Infeasible),
        LpOutcome::Unbounded => {
            return Err(Error::InternalInconsistency(
                "lambda-cost is bounded below by zero yet reported unbounded".into(),
            ))
        }
    };

    let cross_checked = catalog.len() <= 4;
    if cross_checked {
        match linprog::solve_by_enumeration(&lp) {
            Some((x, value)) if x == solution.x && value == solution.value => {}
            other => {
                return Err(Error::InternalInconsistency(format!(
                    "vertex enumeration disagrees with the simplex optimum: {other:?} \
                     vs ({:?}, {})",
                    solution.x, solution.value
                )))
            }
        }
    }

    let epsilon = k.coeff(BasisSymbol::Lambda) - &solution.value;
    let mut combination = DivisorClass::zero(space);
    let mut coefficients = BTreeMap::new();
    for (entry, alpha) in catalog.entries().iter().zip(&solution.x) {
        combination = combination.add(&entry.class.scale(alpha))?;
        coefficients.insert(entry.name.clone(), alpha.clone());
    }
    let residual = k.sub(&lambda_class(space, &epsilon)?)?.sub(&combination)?;
    debug_assert!(residual.coeff(BasisSymbol::Lambda).is_zero());

    let combo = OptimalCombination {
        epsilon: epsilon.clone(),
        coefficients,
        residual,
        dual: boundary.into_iter().zip(solution.dual).collect(),
        cross_checked,
    };
    if epsilon > Rational::zero() {
        Ok(MaxEpsilonOutcome::Certified(combo))
    } else {
        Ok(MaxEpsilonOutcome::NotPositive(combo))
    }
}

/// Verdict of [`general_type_report`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    GeneralType,
    NotEstablished,
}

/// The full argument for one `(g, l)`: canonical class, best
/// `epsilon`, slope criterion on the exhibited effective class, verdict.
#[derive(Clone, PartialEq, Debug)]
pub struct GeneralTypeReport {
    pub g: u32,
    pub level: u32,
    /// The canonical class restricted to the partial model.
    pub canonical: DivisorClass,
    pub outcome: MaxEpsilonOutcome,
    /// Slope criterion applied to `K - epsilon * lambda` (the effective
    /// side of the decomposition) when the program had an optimum with
    /// positive `lambda` part.
    pub slope: Option<SlopeReport>,
    pub verdict: Verdict,
    pub conclusion: String,
}

/// Decides general type for the level moduli space from a catalog of
/// effective classes: restricts the canonical class to the partial
/// model, maximizes `epsilon`, and reports. Valid for `4 <= g <= 23`
/// (the slope reduction to the irreducible boundary needs the upper
/// bound) and prime `l >= 3`.
pub fn general_type_report(
    g: u32,
    level: u32,
    catalog: &EffectiveCatalog,
) -> Result<GeneralTypeReport, Error> {
    if g > 23 {
        return Err(Error::OutOfValidity(format!(
            "the slope reduction is proved for g <= 23, got {g}"
        )));
    }
    let canonical = formulas::canonical_class(g, level)?.restrict_to_partial()?;
    let outcome = max_epsilon(&canonical, catalog)?;

    let (slope, verdict, conclusion) = match &outcome {
        MaxEpsilonOutcome::Certified(combo) => {
            let effective_side = canonical.sub(&lambda_class(
                canonical.space(),
                &combo.epsilon,
            )?)?;
            let slope = formulas::slope_bounds_ok(&effective_side)?;
            let conclusion = format!(
                "epsilon = {} > 0: the canonical class is {} lambda plus an effective \
                 combination of catalog classes plus an effective boundary class; lambda \
                 is big, so the canonical class is big and the level moduli space is of \
                 general type (slope reduction valid for g <= 23)",
                combo.epsilon, combo.epsilon
            );
            (Some(slope), Verdict::GeneralType, conclusion)
        }
        MaxEpsilonOutcome::NotPositive(combo) => {
            let effective_side = canonical.sub(&lambda_class(
                canonical.space(),
                &combo.epsilon,
            )?)?;
            let slope = if effective_side.coeff(BasisSymbol::Lambda) > Rational::zero() {
                Some(formulas::slope_bounds_ok(&effective_side)?)
            } else {
                None
            };
            let conclusion = format!(
                "best epsilon = {} is not positive: this catalog does not exhibit the \
                 canonical class as big, and general type is not established",
                combo.epsilon
            );
            (slope, Verdict::NotEstablished, conclusion)
        }
        MaxEpsilonOutcome::Infeasible => (
            None,
            Verdict::NotEstablished,
            "no nonnegative combination of the catalog covers the boundary of the \
             canonical class; general type is not established"
                .to_string(),
        ),
    };

    Ok(GeneralTypeReport {
        g,
        level,
        canonical,
        outcome,
        slope,
        verdict,
        conclusion,
    })
}
