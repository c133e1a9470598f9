//! Exact-rational calculus for divisor classes on moduli spaces of curves
//! with level structure.
//!
//! The library works in the rational Picard group of four families of
//! spaces: the classical moduli space of stable genus-`g` curves, two models
//! of the moduli space of curves with a level-`l` structure (a full model
//! carrying the complete boundary, and a partial model carrying only the
//! boundary over irreducible curves), and an auxiliary space of torsion
//! bundle data used while deriving degeneracy-locus classes.
//!
//! Everything is computed over exact rationals; no floating point enters any
//! class computation or any certificate check.
//!
//! Module map:
//! * [`divclass`] — basis symbols, space descriptors, divisor classes, and
//!   the pullback/restriction operations between spaces.
//! * [`formulas`] — the closed-form class bank: canonical classes, the
//!   Mukai-type and syzygy-type effective divisors, boundary census counts,
//!   and slope criteria.
//! * [`porteous`] — the Chern-class pipeline that rederives the Mukai-type
//!   divisor classes from first principles and records a step transcript.
//! * [`bigness`] — exact linear programming over effective-divisor catalogs,
//!   producing verifiable bigness certificates for canonical classes.
//! * [`linprog`] — the underlying exact-rational simplex solver and the
//!   vertex-enumeration oracle used to cross-check it.

pub mod bigness;
pub mod divclass;
pub mod formulas;
pub mod linprog;
pub mod porteous;

use divclass::{BasisSymbol, SpaceDescriptor};

/// Arbitrary-precision rational number; every coefficient in the crate is
/// one of these. Values are kept reduced with a positive denominator by the
/// underlying representation.
pub type Rational = num_rational::BigRational;

/// Arbitrary-precision integer, used for census counts and binomials.
pub type Integer = num_bigint::BigInt;

/// Shorthand for a rational from an integer pair. Panics on a zero
/// denominator, which never occurs for the literal constants it is fed.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(Integer::from(numer), Integer::from(denom))
}

/// Shorthand for an integral rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from(Integer::from(n))
}

/// Trial-division primality test; the levels in play are tiny.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Two classes living on different spaces were combined.
    #[error("space mismatch: {left} vs {right}")]
    SpaceMismatch {
        left: SpaceDescriptor,
        right: SpaceDescriptor,
    },
    /// A pullback was requested between spaces of different genus.
    #[error("genus mismatch: source has g={left}, target has g={right}")]
    GenusMismatch { left: u32, right: u32 },
    /// An operation has no defined formula at this level.
    #[error("unsupported level {level}: {context}")]
    UnsupportedLevel { level: u32, context: &'static str },
    /// Level structures are only treated for prime level.
    #[error("level {0} is not prime")]
    NonPrimeLevel(u32),
    /// A basis symbol does not belong to the space it was used on.
    #[error("symbol {symbol} is not in the divisor basis of {space}")]
    InvalidSymbol {
        symbol: BasisSymbol,
        space: SpaceDescriptor,
    },
    /// An operation received a class on the wrong kind of space.
    #[error("expected a class on {expected}, got one on {found}")]
    WrongModel {
        expected: &'static str,
        found: SpaceDescriptor,
    },
    /// The Mukai-type classes exist only for the two genera with a
    /// rank-based Brill-Noether model.
    #[error("no degeneracy-class model for genus {0} (supported: 6 and 8)")]
    UnsupportedGenus(u32),
    /// Parameters left the range on which a formula is proved.
    #[error("out of validity range: {0}")]
    OutOfValidity(String),
    /// The syzygy-divisor construction requires an odd-order or
    /// even-binomial case; the excluded case is rejected.
    #[error("syzygy order i={0} fails the parity condition (i odd or C(2i-1,i) even)")]
    ParityConditionViolated(u32),
    /// Slope bounds apply only to classes with positive lambda coefficient.
    #[error("class is not normalized: lambda coefficient must be positive")]
    NotNormalized,
    /// Certificate coefficients must be nonnegative.
    #[error("negative coefficient for catalog entry `{0}`")]
    NegativeCoefficient(String),
    /// A certificate referenced a catalog entry that does not exist.
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
    /// Catalog entries must have distinct names.
    #[error("duplicate catalog entry name `{0}`")]
    DuplicateName(String),
    /// A catalog entry cannot be normalized for the slope criterion.
    #[error("catalog entry `{0}` has nonpositive lambda coefficient")]
    NotNormalizable(String),
    /// A substitution encountered a symbol with no rewrite rule.
    #[error("no substitution rule for symbol {0}")]
    UnknownSymbol(BasisSymbol),
    /// A formula identifier was not recognized.
    #[error("unknown formula id `{0}`")]
    UnknownFormula(String),
    /// The catalog file or structure was malformed.
    #[error("invalid catalog: {0}")]
    InvalidCatalog(String),
    /// An internal cross-check failed; indicates a bug, never user error.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}
