//! Closed-form divisor classes and numerical criteria.
//!
//! This module is the bank of known classes: the canonical class of the
//! full level model, the ramification correction class `rho`, the
//! Mukai-type degeneracy classes in genus 6 and 8 together with their
//! boundary-corrected improvements, the syzygy-type classes on genus
//! `2i+2` spaces, the sheet census of the boundary over irreducible
//! curves, and the slope criterion that turns an effective class into a
//! bigness statement for the canonical class.
//!
//! All formulas are exact; validity ranges are enforced and produce
//! [`Error::OutOfValidity`] rather than silently extrapolating.

use num_integer::Integer as IntegerOps;
use num_traits::Zero;

use crate::divclass::{BasisSymbol, DivisorClass, SpaceDescriptor, SpaceModel};
use crate::{is_prime, rat_int, Error, Integer, Rational};

use BasisSymbol::*;

/// Exact binomial coefficient, safe far beyond machine-word factorials.
pub fn binom(n: u32, k: u32) -> Integer {
    num_integer::binomial(Integer::from(n), Integer::from(k))
}

fn ratio(n: Integer, d: Integer) -> Rational {
    Rational::new(n, d)
}

/// Sheet counts of the level cover over the irreducible boundary.
///
/// Over a one-nodal irreducible curve the level structures split into the
/// unramified sheets counted by `delta0prime_count`, the Wirtinger
/// components (one per ramification index, each a degree-2 cover of the
/// boundary of the classical space), and for each `1 <= a <= l/2` one
/// ramified component of degree `delta0ram_degree`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoundaryCensus {
    pub g: u32,
    pub level: u32,
    /// Number of Wirtinger-type components: `floor(l/2)`.
    pub wirtinger_components: u32,
    /// Degree of each Wirtinger component over the boundary: always 2.
    pub wirtinger_degree_each: u32,
    /// Sheets over the unramified component: `l * (l^(2g-2) - 1)`.
    pub delta0prime_count: Integer,
    /// Degree of each ramified component: `2 * l^(2g-2)`.
    pub delta0ram_degree: Integer,
}

/// Counts the boundary sheets of the level cover; valid for `g >= 2` and
/// prime `l`.
pub fn boundary_census(g: u32, level: u32) -> Result<BoundaryCensus, Error> {
    if g < 2 {
        return Err(Error::OutOfValidity(format!(
            "boundary census needs g >= 2, got {g}"
        )));
    }
    if !is_prime(level) {
        return Err(Error::NonPrimeLevel(level));
    }
    let big_l = Integer::from(level);
    let power = big_l.pow(2 * g - 2);
    let census = BoundaryCensus {
        g,
        level,
        wirtinger_components: level / 2,
        wirtinger_degree_each: 2,
        delta0prime_count: &big_l * (&power - 1),
        delta0ram_degree: 2 * &power,
    };
    // l >= 2 and g >= 2 force every count positive.
    assert!(census.wirtinger_components >= 1);
    assert!(census.delta0prime_count > Integer::zero());
    assert!(census.delta0ram_degree > Integer::zero());
    Ok(census)
}

/// The canonical class of the full level model, for `g >= 4` and prime
/// `l >= 3`:
///
/// ```text
/// 13 lambda - 2 (d0' + d0'') - (l+1) sum_a d0^(a)
///   - 2 sum_i (d_i + d_{g-i} + d_{i:g-i}) - d_{g-1}
/// ```
///
/// with the half-genus tail counted once on even genus.
pub fn canonical_class(g: u32, level: u32) -> Result<DivisorClass, Error> {
    if g < 4 {
        return Err(Error::OutOfValidity(format!(
            "canonical-class formula needs g >= 4, got {g}"
        )));
    }
    if level == 2 {
        return Err(Error::OutOfValidity(
            "canonical-class formula needs level >= 3".into(),
        ));
    }
    let space = SpaceDescriptor::rbar(g, level)?;
    let mut terms = vec![
        (Lambda, rat_int(13)),
        (Delta0Prime, rat_int(-2)),
        (Delta0DoublePrime, rat_int(-2)),
    ];
    for a in 1..=level / 2 {
        terms.push((Delta0Ram(a), rat_int(-(level as i64) - 1)));
    }
    for i in 1..=g / 2 {
        terms.push((DeltaI(i), rat_int(-2)));
        terms.push((DeltaIColonGMinusI(i), rat_int(-2)));
        if !(g % 2 == 0 && i == g / 2) {
            terms.push((DeltaGMinusI(i), rat_int(-2)));
        }
    }
    // The component generically branched over the classical d_{g-1}.
    terms.push((DeltaGMinusI(1), rat_int(-1)));
    DivisorClass::from_terms(space, terms)
}

/// The ramification correction class `sum_a (a(l-a)/l) d0^(a)` on any
/// space whose basis carries the ramified boundary symbols.
pub fn rho(space: &SpaceDescriptor) -> Result<DivisorClass, Error> {
    if space.model() == SpaceModel::MbarG {
        return Err(Error::WrongModel {
            expected: "a space with ramified boundary symbols",
            found: *space,
        });
    }
    let level = space.level();
    let terms = (1..=level / 2).map(|a| {
        (
            Delta0Ram(a),
            ratio(
                Integer::from(a) * Integer::from(level - a),
                Integer::from(level),
            ),
        )
    });
    DivisorClass::from_terms(*space, terms)
}

fn mukai_space(g: u32, level: u32) -> Result<SpaceDescriptor, Error> {
    if g != 6 && g != 8 {
        return Err(Error::UnsupportedGenus(g));
    }
    SpaceDescriptor::rprime(g, level)
}

fn mukai_terms(
    g: u32,
    level: u32,
    d0pp: i64,
) -> impl Iterator<Item = (BasisSymbol, Rational)> {
    let (lam, d0p) = if g == 6 { (35, -5) } else { (196, -28) };
    let head = [
        (Lambda, rat_int(lam)),
        (Delta0Prime, rat_int(d0p)),
        (Delta0DoublePrime, rat_int(d0pp)),
    ];
    let l = level as i64;
    let ram = (1..=level / 2).map(move |a_idx| {
        let a = a_idx as i64;
        let body = if g == 6 {
            l * l - a * l + a * a
        } else {
            2 * l * l - a * l + a * a
        };
        let scale = if g == 6 { 5 } else { 14 };
        (Delta0Ram(a_idx), Rational::new((-scale * body).into(), l.into()))
    });
    head.into_iter().chain(ram)
}

/// Virtual class of the Mukai-type degeneracy divisor on the partial
/// level model, for genus 6 or 8 and any prime level:
///
/// ```text
/// g=6:  35 lambda - 5 d0' - 15 d0'' - (5/l)  sum_a (l^2   - a l + a^2) d0^(a)
/// g=8: 196 lambda - 28 d0' - 56 d0'' - (14/l) sum_a (2 l^2 - a l + a^2) d0^(a)
/// ```
pub fn mukai_virtual_class(g: u32, level: u32) -> Result<DivisorClass, Error> {
    let space = mukai_space(g, level)?;
    let d0pp = if g == 6 { -15 } else { -56 };
    DivisorClass::from_terms(space, mukai_terms(g, level, d0pp))
}

/// Alternate normalization of [`mukai_virtual_class`]: identical except
/// for the `d0''` coefficient (`-5` vs `-15` in genus 6, `-28` vs `-56`
/// in genus 8; the discrepancy equals the degeneration term of the
/// derivation). [`mukai_virtual_class`] is the form the derivation in
/// [`crate::porteous`] reproduces; this one is kept so the two
/// conventions can be compared exactly.
pub fn mukai_virtual_class_variant(g: u32, level: u32) -> Result<DivisorClass, Error> {
    let space = mukai_space(g, level)?;
    let d0pp = if g == 6 { -5 } else { -28 };
    DivisorClass::from_terms(space, mukai_terms(g, level, d0pp))
}

/// The Mukai-type virtual class corrected by the known excess degeneracy:
/// the torsion-bundle sections jump to one extra dimension along the
/// Wirtinger boundary (subtract `5 d0''` in genus 6, `28 d0''` in genus
/// 8), and for `(g,l) = (8,3)` the bundle construction degenerates to
/// order 2 along the ramified boundary as well (subtract `28 d0^(1)`).
pub fn mukai_improved_class(g: u32, level: u32) -> Result<DivisorClass, Error> {
    let virtual_class = mukai_virtual_class(g, level)?;
    let wirtinger = if g == 6 { -5 } else { -28 };
    let mut extra = vec![(Delta0DoublePrime, rat_int(wirtinger))];
    if g == 8 && level == 3 {
        extra.push((Delta0Ram(1), rat_int(-28)));
    }
    let correction = DivisorClass::from_terms(virtual_class.space(), extra)?;
    virtual_class.add(&correction)
}

/// Whether syzygy order `i` satisfies the parity hypothesis of the
/// syzygy-divisor construction: `i` odd, or `C(2i-1, i)` even.
pub fn koszul_parity_ok(i: u32) -> bool {
    i % 2 == 1 || binom(2 * i - 1, i).is_even()
}

/// The prefactor `C(2i-2, i) / (i-1)` of the syzygy-type class; needs
/// `i >= 2`.
pub fn koszul_prefactor(i: u32) -> Result<Rational, Error> {
    if i < 2 {
        return Err(Error::OutOfValidity(format!(
            "syzygy prefactor needs i >= 2, got {i}"
        )));
    }
    Ok(ratio(binom(2 * i - 2, i), Integer::from(i - 1)))
}

fn koszul_genus(i: u32) -> u32 {
    2 * i + 2
}

/// The syzygy order whose divisor lives on genus `g = 2i + 2`.
pub fn koszul_index_for_genus(g: u32) -> Result<u32, Error> {
    if g < 6 || g % 2 != 0 {
        return Err(Error::OutOfValidity(format!(
            "syzygy classes live on even genus 2i+2 >= 6, got {g}"
        )));
    }
    Ok((g - 2) / 2)
}

/// Virtual class of the syzygy-type divisor of order `i` on the partial
/// level model of genus `2i + 2`, for prime level `l >= 3`:
///
/// ```text
/// C(2i-2, i)/(i-1) * [ (6i+1) lambda - i d0' - i d0''
///     - (1/l) sum_a (i l^2 + 5 a^2 i - 5 a i l - 2 a^2 + 2 a l) d0^(a) ]
/// ```
///
/// Orders failing the parity hypothesis are rejected: the construction
/// needs the hypothesis and the class is unproved without it.
pub fn koszul_virtual_class(i: u32, level: u32) -> Result<DivisorClass, Error> {
    if i < 2 {
        return Err(Error::OutOfValidity(format!(
            "syzygy class needs i >= 2, got {i}"
        )));
    }
    if level == 2 {
        return Err(Error::OutOfValidity(
            "syzygy class formula needs level >= 3".into(),
        ));
    }
    if !koszul_parity_ok(i) {
        return Err(Error::ParityConditionViolated(i));
    }
    let space = SpaceDescriptor::rprime(koszul_genus(i), level)?;
    let prefactor = koszul_prefactor(i)?;
    let ii = i as i64;
    let l = level as i64;
    let mut terms = vec![
        (Lambda, rat_int(6 * ii + 1)),
        (Delta0Prime, rat_int(-ii)),
        (Delta0DoublePrime, rat_int(-ii)),
    ];
    for a_idx in 1..=level / 2 {
        let a = a_idx as i64;
        let body = ii * l * l + 5 * a * a * ii - 5 * a * ii * l - 2 * a * a + 2 * a * l;
        terms.push((Delta0Ram(a_idx), Rational::new((-body).into(), l.into())));
    }
    Ok(DivisorClass::from_terms(space, terms)?.scale(&prefactor))
}

/// Order of the excess degeneracy of the syzygy construction along the
/// ramified boundary: `C(2i-1, i-1)`, computed as `5 C(2i-1, i-1) -
/// 2 C(2i, i)` the way the excess calculation produces it, with the
/// agreement of the two forms checked.
pub fn koszul_boundary_degeneracy_order(i: u32) -> Result<Integer, Error> {
    if i < 1 {
        return Err(Error::OutOfValidity(format!(
            "degeneracy order needs i >= 1, got {i}"
        )));
    }
    let computed = 5 * binom(2 * i - 1, i - 1) - 2 * binom(2 * i, i);
    let closed = binom(2 * i - 1, i - 1);
    if computed != closed {
        return Err(Error::InternalInconsistency(format!(
            "syzygy degeneracy order at i={i}: {computed} vs {closed}"
        )));
    }
    Ok(closed)
}

/// The syzygy-type virtual class corrected by the excess degeneracy along
/// every ramified boundary component.
pub fn koszul_improved_class(i: u32, level: u32) -> Result<DivisorClass, Error> {
    let virtual_class = koszul_virtual_class(i, level)?;
    let order = Rational::from(koszul_boundary_degeneracy_order(i)?);
    let correction = DivisorClass::from_terms(
        virtual_class.space(),
        (1..=level / 2).map(|a| (Delta0Ram(a), -order.clone())),
    )?;
    virtual_class.add(&correction)
}

/// One slope comparison of [`slope_bounds_ok`]: for a class
/// `A lambda - B s - ...` the criterion needs `B > 0` and `A / B`
/// strictly below the threshold attached to the boundary symbol `s`.
#[derive(Clone, PartialEq, Debug)]
pub struct SlopeBound {
    pub symbol: BasisSymbol,
    /// `B`, the negated coefficient of the symbol.
    pub boundary_coefficient: Rational,
    /// `A / B` when `B > 0`; a nonpositive `B` has no usable slope.
    pub ratio: Option<Rational>,
    pub threshold: Rational,
    pub pass: bool,
}

/// Outcome of the slope criterion for one effective class.
#[derive(Clone, PartialEq, Debug)]
pub struct SlopeReport {
    pub lambda_coefficient: Rational,
    pub bounds: Vec<SlopeBound>,
    pub all_pass: bool,
    /// The reduction to irreducible-boundary slopes assumes `g <= 23`
    /// (above that, the classes over reducible curves need separate
    /// control and the criterion is silent).
    pub reduction_applicable: bool,
}

/// Checks the slope criterion for an effective class `E = A lambda - sum
/// B_s s` on a level model: the canonical class dominates a positive
/// multiple of `lambda` plus an effective class once `A/B < 13/2` at
/// `d0'` and `d0''` and `A/B < 13/(l+1)` at every `d0^(a)`, all strictly.
/// Coefficients of reducible-boundary symbols play no role (for
/// `g <= 23` they take care of themselves).
pub fn slope_bounds_ok(class: &DivisorClass) -> Result<SlopeReport, Error> {
    let space = class.space();
    if !matches!(space.model(), SpaceModel::RbarGL | SpaceModel::RPrimeGL) {
        return Err(Error::WrongModel {
            expected: "a level model (full or partial)",
            found: space,
        });
    }
    let a = class.coeff(Lambda);
    if a <= Rational::zero() {
        return Err(Error::NotNormalized);
    }
    let level = space.level() as i64;
    let mut symbols = vec![
        (Delta0Prime, crate::rat(13, 2)),
        (Delta0DoublePrime, crate::rat(13, 2)),
    ];
    for r in 1..=space.half_level() {
        symbols.push((Delta0Ram(r), crate::rat(13, level + 1)));
    }
    let bounds: Vec<SlopeBound> = symbols
        .into_iter()
        .map(|(symbol, threshold)| {
            let b = -class.coeff(symbol);
            let ratio = if b > Rational::zero() {
                Some(&a / &b)
            } else {
                None
            };
            let pass = ratio.as_ref().is_some_and(|r| *r < threshold);
            SlopeBound {
                symbol,
                boundary_coefficient: b,
                ratio,
                threshold,
                pass,
            }
        })
        .collect();
    Ok(SlopeReport {
        lambda_coefficient: a,
        all_pass: bounds.iter().all(|b| b.pass),
        reduction_applicable: space.g() <= 23,
        bounds,
    })
}

/// String-addressable registry of the class bank, used by the command
/// line and the self-check report.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FormulaId {
    Canonical,
    MukaiVirtual,
    MukaiImproved,
    KoszulVirtual,
    KoszulImproved,
    Rho,
    Census,
}

impl FormulaId {
    pub const ALL: [FormulaId; 7] = [
        FormulaId::Canonical,
        FormulaId::MukaiVirtual,
        FormulaId::MukaiImproved,
        FormulaId::KoszulVirtual,
        FormulaId::KoszulImproved,
        FormulaId::Rho,
        FormulaId::Census,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FormulaId::Canonical => "canonical",
            FormulaId::MukaiVirtual => "mukai-virtual",
            FormulaId::MukaiImproved => "mukai-improved",
            FormulaId::KoszulVirtual => "koszul-virtual",
            FormulaId::KoszulImproved => "koszul-improved",
            FormulaId::Rho => "rho",
            FormulaId::Census => "census",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            FormulaId::Canonical => "canonical class of the full level model",
            FormulaId::MukaiVirtual => "virtual Mukai-type degeneracy class (g = 6 or 8)",
            FormulaId::MukaiImproved => "boundary-corrected Mukai-type class (g = 6 or 8)",
            FormulaId::KoszulVirtual => "virtual syzygy-type class (g = 2i+2)",
            FormulaId::KoszulImproved => "boundary-corrected syzygy-type class (g = 2i+2)",
            FormulaId::Rho => "ramification correction class",
            FormulaId::Census => "sheet census of the irreducible boundary",
        }
    }

    pub fn from_id(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::UnknownFormula(s.to_string()))
    }
}
