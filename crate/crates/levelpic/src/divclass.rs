//! Divisor classes on moduli spaces of curves with level structure.
//!
//! A [`DivisorClass`] is a formal rational linear combination of basis
//! symbols attached to one concrete space. Classes are kept in canonical
//! form at all times:
//!
//! * zero coefficients are never stored, so structural equality of the
//!   coefficient maps is equality of classes;
//! * every stored symbol belongs to the divisor basis of the owning space
//!   (checked on construction, so downstream code never re-validates);
//! * on the full level model with even genus, the symbol for the boundary
//!   divisor indexed by a half-genus tail is stored once (the two index
//!   conventions name the same divisor and are merged on insertion).
//!
//! Four kinds of space occur. `Mbar` is the classical moduli space of
//! stable genus-`g` curves with basis `lambda, d0, d1, ..., d_{g/2}`.
//! `Rbar` is the full level-`l` model, where `d0` splits into `d0'`, `d0''`
//! and ramified components `d0^(a)` for `1 <= a <= l/2`, and each `d_i`
//! splits into `d_i`, `d_{g-i}`, `d_{i:g-i}` according to where the level
//! structure concentrates. `RPrime` keeps only `lambda` and the boundary
//! over irreducible curves. `G` is an auxiliary space of torsion-bundle
//! data over `RPrime` whose basis consists of tautological symbols
//! `a, b, c, d`, the ramification class `rho`, and the pulled-back total
//! boundary `pi*d0`, together with the boundary symbols of `RPrime`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{is_prime, rat_int, Error, Integer, Rational};

/// Which of the four space families a descriptor refers to.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum SpaceModel {
    /// Classical moduli of stable curves, no level structure.
    MbarG,
    /// Full moduli of level-`l` curves, complete boundary basis.
    RbarGL,
    /// Partial model: only `lambda` and the boundary over irreducible
    /// curves survive.
    RPrimeGL,
    /// Auxiliary torsion-bundle space over the partial model; `r` is the
    /// rank of the relevant Brill-Noether bundle and `d` its degree.
    GSpace { r: u32, d: u32 },
}

/// A concrete space: genus, level, and model. Constructed through the
/// checked constructors, so a descriptor in hand is always valid (genus at
/// least 2, prime level, and recognized auxiliary parameters).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct SpaceDescriptor {
    g: u32,
    level: u32,
    model: SpaceModel,
}

impl SpaceDescriptor {
    fn check_params(g: u32, level: u32) -> Result<(), Error> {
        if g < 2 {
            return Err(Error::OutOfValidity(format!(
                "genus {g} is below 2; boundary bases need g >= 2"
            )));
        }
        if !is_prime(level) {
            return Err(Error::NonPrimeLevel(level));
        }
        Ok(())
    }

    /// The classical moduli space of stable genus-`g` curves. The level is
    /// carried along for uniformity (pullback targets supply their own).
    pub fn mbar(g: u32, level: u32) -> Result<Self, Error> {
        Self::check_params(g, level)?;
        Ok(Self {
            g,
            level,
            model: SpaceModel::MbarG,
        })
    }

    /// The full moduli space of genus-`g` curves with a level-`l` structure.
    pub fn rbar(g: u32, level: u32) -> Result<Self, Error> {
        Self::check_params(g, level)?;
        Ok(Self {
            g,
            level,
            model: SpaceModel::RbarGL,
        })
    }

    /// The partial model keeping only the boundary over irreducible curves.
    pub fn rprime(g: u32, level: u32) -> Result<Self, Error> {
        Self::check_params(g, level)?;
        Ok(Self {
            g,
            level,
            model: SpaceModel::RPrimeGL,
        })
    }

    /// The auxiliary torsion-bundle space used by the degeneracy-class
    /// pipeline. Only genus 6 (rank 2, degree 6) and genus 8 (rank 3,
    /// degree 9) carry the relevant Brill-Noether model.
    pub fn gspace(g: u32, level: u32) -> Result<Self, Error> {
        Self::check_params(g, level)?;
        let (r, d) = match g {
            6 => (2, 6),
            8 => (3, 9),
            _ => return Err(Error::UnsupportedGenus(g)),
        };
        Ok(Self {
            g,
            level,
            model: SpaceModel::GSpace { r, d },
        })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn model(&self) -> SpaceModel {
        self.model
    }

    /// Largest index of a `d_i` symbol: `floor(g/2)`.
    pub fn half_genus(&self) -> u32 {
        self.g / 2
    }

    /// Largest ramification index of a `d0^(a)` symbol: `floor(l/2)`.
    pub fn half_level(&self) -> u32 {
        self.level / 2
    }

    /// Merges the two index conventions that name one divisor: on the full
    /// model with even genus, the half-genus tail symbol is stored under
    /// its `d_{g/2}` name.
    fn normalize_symbol(&self, sym: BasisSymbol) -> BasisSymbol {
        if let BasisSymbol::DeltaGMinusI(i) = sym {
            if self.model == SpaceModel::RbarGL && self.g % 2 == 0 && i == self.g / 2 {
                return BasisSymbol::DeltaI(i);
            }
        }
        sym
    }

    /// Whether `sym` belongs to this space's canonical divisor basis.
    pub fn contains(&self, sym: BasisSymbol) -> bool {
        use BasisSymbol::*;
        let half_g = self.half_genus();
        let half_l = self.half_level();
        match self.model {
            SpaceModel::MbarG => match sym {
                Lambda | Delta0 => true,
                DeltaI(i) => 1 <= i && i <= half_g,
                _ => false,
            },
            SpaceModel::RbarGL => match sym {
                Lambda | Delta0Prime | Delta0DoublePrime => true,
                Delta0Ram(a) => 1 <= a && a <= half_l,
                DeltaI(i) => 1 <= i && i <= half_g,
                // The half-genus tail name is normalized away for even g.
                DeltaGMinusI(i) => 1 <= i && i <= half_g && !(self.g % 2 == 0 && i == half_g),
                DeltaIColonGMinusI(i) => 1 <= i && i <= half_g,
                _ => false,
            },
            SpaceModel::RPrimeGL => match sym {
                Lambda | Delta0Prime | Delta0DoublePrime => true,
                Delta0Ram(a) => 1 <= a && a <= half_l,
                _ => false,
            },
            SpaceModel::GSpace { .. } => match sym {
                Lambda | FrakA | FrakB | FrakC | FrakD | Rho | PullbackDelta0 => true,
                Delta0Prime | Delta0DoublePrime => true,
                Delta0Ram(a) => 1 <= a && a <= half_l,
                _ => false,
            },
        }
    }

    /// The full divisor basis in canonical rendering order.
    pub fn basis(&self) -> Vec<BasisSymbol> {
        use BasisSymbol::*;
        let half_g = self.half_genus();
        let half_l = self.half_level();
        let mut out = vec![Lambda];
        match self.model {
            SpaceModel::MbarG => {
                out.push(Delta0);
                out.extend((1..=half_g).map(DeltaI));
            }
            SpaceModel::RbarGL => {
                out.push(Delta0Prime);
                out.push(Delta0DoublePrime);
                out.extend((1..=half_l).map(Delta0Ram));
                out.extend((1..=half_g).map(DeltaI));
                // Ascending total index g-i, skipping the merged g/2 name.
                let top = if self.g % 2 == 0 { half_g - 1 } else { half_g };
                out.extend((1..=top).rev().map(DeltaGMinusI));
                out.extend((1..=half_g).map(DeltaIColonGMinusI));
            }
            SpaceModel::RPrimeGL => {
                out.push(Delta0Prime);
                out.push(Delta0DoublePrime);
                out.extend((1..=half_l).map(Delta0Ram));
            }
            SpaceModel::GSpace { .. } => {
                out.extend([FrakA, FrakB, FrakC, FrakD, Rho, PullbackDelta0]);
                out.push(Delta0Prime);
                out.push(Delta0DoublePrime);
                out.extend((1..=half_l).map(Delta0Ram));
            }
        }
        out
    }

    /// The basis without `lambda`; these are the rows of the bigness
    /// linear programs.
    pub fn boundary_basis(&self) -> Vec<BasisSymbol> {
        self.basis()
            .into_iter()
            .filter(|s| *s != BasisSymbol::Lambda)
            .collect()
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.model {
            SpaceModel::MbarG => write!(f, "Mbar(g={})", self.g),
            SpaceModel::RbarGL => write!(f, "Rbar(g={},l={})", self.g, self.level),
            SpaceModel::RPrimeGL => write!(f, "RPrime(g={},l={})", self.g, self.level),
            SpaceModel::GSpace { r, d } => {
                write!(f, "G(g={},l={},r={},d={})", self.g, self.level, r, d)
            }
        }
    }
}

/// One basis symbol of the rational Picard group of some space. Which
/// symbols are admissible depends on the space; see [`SpaceDescriptor::contains`].
///
/// Boundary symbols over reducible curves use the index convention of the
/// full level model: `DeltaI(i)` is the component whose genus-`i` piece
/// carries a trivialized level structure, `DeltaGMinusI(i)` the one where
/// the genus-`g-i` piece does, and `DeltaIColonGMinusI(i)` the mixed one.
/// All three are indexed by `1 <= i <= g/2`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum BasisSymbol {
    /// Hodge class.
    Lambda,
    /// Total irreducible boundary of the classical space.
    Delta0,
    /// Irreducible-boundary component where the vanishing cycle pairs
    /// trivially with the level structure.
    Delta0Prime,
    /// Irreducible-boundary component of Wirtinger type.
    Delta0DoublePrime,
    /// Ramified irreducible-boundary component with pairing value `a`.
    Delta0Ram(u32),
    /// Reducible boundary, level structure trivial on the genus-`i` piece.
    DeltaI(u32),
    /// Reducible boundary, level structure trivial on the genus-`g-i` piece.
    DeltaGMinusI(u32),
    /// Reducible boundary, level structure nontrivial on both pieces.
    DeltaIColonGMinusI(u32),
    /// Tautological push-forward symbol `a` of the auxiliary space.
    FrakA,
    /// Tautological push-forward symbol `b` of the auxiliary space.
    FrakB,
    /// Tautological push-forward symbol `c` of the auxiliary space.
    FrakC,
    /// Class of the locus where the torsion sheaf degenerates, auxiliary
    /// space only.
    FrakD,
    /// Ramification correction class of the auxiliary space.
    Rho,
    /// Pullback of the total irreducible boundary to the auxiliary space.
    PullbackDelta0,
}

impl BasisSymbol {
    /// Sort key giving the canonical rendering order: `lambda`, auxiliary
    /// symbols, `d0`-family ascending, `d_i` ascending, `d_{g-i}` ascending
    /// in the total index `g-i` (so descending in `i`), mixed symbols
    /// ascending.
    fn order_key(self) -> (u8, u32) {
        use BasisSymbol::*;
        match self {
            Lambda => (0, 0),
            FrakA => (1, 0),
            FrakB => (2, 0),
            FrakC => (3, 0),
            FrakD => (4, 0),
            Rho => (5, 0),
            PullbackDelta0 => (6, 0),
            Delta0 => (7, 0),
            Delta0Prime => (8, 0),
            Delta0DoublePrime => (9, 0),
            Delta0Ram(a) => (10, a),
            DeltaI(i) => (11, i),
            DeltaGMinusI(i) => (12, u32::MAX - i),
            DeltaIColonGMinusI(i) => (13, i),
        }
    }

    /// Rendering text; needs the genus to spell out total indices.
    pub fn text(&self, g: u32) -> String {
        use BasisSymbol::*;
        match *self {
            Lambda => "lambda".into(),
            Delta0 => "d0".into(),
            Delta0Prime => "d0'".into(),
            Delta0DoublePrime => "d0''".into(),
            Delta0Ram(a) => format!("d0^({a})"),
            DeltaI(i) => format!("d_{i}"),
            DeltaGMinusI(i) => format!("d_{}", g - i),
            DeltaIColonGMinusI(i) => format!("d_{{{}:{}}}", i, g - i),
            FrakA => "a".into(),
            FrakB => "b".into(),
            FrakC => "c".into(),
            FrakD => "d".into(),
            Rho => "rho".into(),
            PullbackDelta0 => "pi*d0".into(),
        }
    }

    /// Key used in JSON coefficient maps; needs the genus for the same
    /// reason as [`BasisSymbol::text`].
    pub fn json_key(&self, g: u32) -> String {
        use BasisSymbol::*;
        match *self {
            Lambda => "lambda".into(),
            Delta0 => "d0".into(),
            Delta0Prime => "d0p".into(),
            Delta0DoublePrime => "d0pp".into(),
            Delta0Ram(a) => format!("d0r{a}"),
            DeltaI(i) => format!("d{i}"),
            DeltaGMinusI(i) => format!("d{}", g - i),
            DeltaIColonGMinusI(i) => format!("d{}:{}", i, g - i),
            FrakA => "a".into(),
            FrakB => "b".into(),
            FrakC => "c".into(),
            FrakD => "d".into(),
            Rho => "rho".into(),
            PullbackDelta0 => "pid0".into(),
        }
    }

    /// Inverse of [`BasisSymbol::json_key`]. Single boundary indices are
    /// resolved against the genus: `d{k}` means `DeltaI(k)` for
    /// `k <= g/2` and `DeltaGMinusI(g-k)` for larger `k`.
    pub fn parse_json_key(key: &str, g: u32) -> Result<Self, String> {
        use BasisSymbol::*;
        match key {
            "lambda" => return Ok(Lambda),
            "d0" => return Ok(Delta0),
            "d0p" => return Ok(Delta0Prime),
            "d0pp" => return Ok(Delta0DoublePrime),
            "a" => return Ok(FrakA),
            "b" => return Ok(FrakB),
            "c" => return Ok(FrakC),
            "d" => return Ok(FrakD),
            "rho" => return Ok(Rho),
            "pid0" => return Ok(PullbackDelta0),
            _ => {}
        }
        if let Some(rest) = key.strip_prefix("d0r") {
            let a: u32 = rest
                .parse()
                .map_err(|_| format!("bad ramification index in `{key}`"))?;
            return Ok(Delta0Ram(a));
        }
        if let Some(rest) = key.strip_prefix('d') {
            if let Some((lo, hi)) = rest.split_once(':') {
                let i: u32 = lo.parse().map_err(|_| format!("bad index in `{key}`"))?;
                let j: u32 = hi.parse().map_err(|_| format!("bad index in `{key}`"))?;
                if i == 0 || i > j || i + j != g {
                    return Err(format!(
                        "mixed boundary key `{key}` does not match genus {g}"
                    ));
                }
                return Ok(DeltaIColonGMinusI(i));
            }
            let k: u32 = rest.parse().map_err(|_| format!("bad index in `{key}`"))?;
            if k == 0 || k >= g {
                return Err(format!("boundary index {k} out of range for genus {g}"));
            }
            if k <= g / 2 {
                return Ok(DeltaI(k));
            }
            return Ok(DeltaGMinusI(g - k));
        }
        Err(format!("unknown coefficient key `{key}`"))
    }
}

impl PartialOrd for BasisSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BasisSymbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Display for BasisSymbol {
    /// Genus-free spelling for error messages; class rendering goes through
    /// [`BasisSymbol::text`] instead.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use BasisSymbol::*;
        match *self {
            DeltaGMinusI(i) => write!(f, "d_{{g-{i}}}"),
            DeltaIColonGMinusI(i) => write!(f, "d_{{{i}:g-{i}}}"),
            other => write!(f, "{}", other.text(0)),
        }
    }
}

/// A divisor class: a space descriptor plus a sparse coefficient map in
/// canonical form (see the module docs for the invariants).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DivisorClass {
    space: SpaceDescriptor,
    coeffs: BTreeMap<BasisSymbol, Rational>,
}

impl DivisorClass {
    /// The zero class on `space`.
    pub fn zero(space: SpaceDescriptor) -> Self {
        Self {
            space,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds a class from `(symbol, coefficient)` terms. Symbols are
    /// normalized and validated against the space; repeated symbols are
    /// summed; zero coefficients are pruned.
    pub fn from_terms<I>(space: SpaceDescriptor, terms: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (BasisSymbol, Rational)>,
    {
        let mut coeffs: BTreeMap<BasisSymbol, Rational> = BTreeMap::new();
        for (raw, c) in terms {
            let sym = space.normalize_symbol(raw);
            if !space.contains(sym) {
                return Err(Error::InvalidSymbol { symbol: raw, space });
            }
            let entry = coeffs.entry(sym).or_insert_with(Rational::zero);
            *entry += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Self { space, coeffs })
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    /// The coefficient of `sym`, zero when absent. The symbol is normalized
    /// first, so both names of a merged divisor answer alike.
    pub fn coeff(&self, sym: BasisSymbol) -> Rational {
        let sym = self.space.normalize_symbol(sym);
        self.coeffs.get(&sym).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in canonical order; only nonzero coefficients appear.
    pub fn terms(&self) -> impl Iterator<Item = (BasisSymbol, &Rational)> {
        self.coeffs.iter().map(|(s, c)| (*s, c))
    }

    /// Symbols with nonzero coefficient, in canonical order.
    pub fn support(&self) -> Vec<BasisSymbol> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sum of two classes on the same space.
    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch {
                left: self.space,
                right: other.space,
            });
        }
        let mut coeffs = self.coeffs.clone();
        for (sym, c) in &other.coeffs {
            let entry = coeffs.entry(*sym).or_insert_with(Rational::zero);
            *entry += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Self {
            space: self.space,
            coeffs,
        })
    }

    /// Difference of two classes on the same space.
    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-rat_int(1))
    }

    /// The class scaled by `c`.
    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.space);
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(s, x)| (*s, x * c))
            .collect();
        Self {
            space: self.space,
            coeffs,
        }
    }

    /// Pullback along the covering map from a level model to the classical
    /// space, applied to a class on the classical space. The target chooses
    /// the level and the model (full or partial).
    ///
    /// The rules, symbol by symbol: `lambda` pulls back to `lambda`; `d0`
    /// pulls back to `d0' + d0'' + l * sum_a d0^(a)`; `d1` pulls back to
    /// `2 d_1 + 2 d_{1:g-1} + d_{g-1}` (for level at least 3; the genus-1
    /// piece of a `d1`-curve always carries nontrivial structure, with
    /// doubled multiplicity from the elliptic involution, except over the
    /// `d_{g-1}` locus); `d_i` for `i >= 2` pulls back to
    /// `d_i + d_{g-i} + d_{i:g-i}`, the three symbols collapsing to two at
    /// `i = g/2`. On the partial model all reducible-boundary images are
    /// dropped.
    ///
    /// Level 2 is rejected whenever `d1` has a nonzero coefficient: there
    /// the elliptic-involution bookkeeping differs and no rule is provided.
    pub fn pullback(&self, target: &SpaceDescriptor) -> Result<Self, Error> {
        use BasisSymbol::*;
        if self.space.model != SpaceModel::MbarG {
            return Err(Error::WrongModel {
                expected: "the classical moduli space",
                found: self.space,
            });
        }
        let to_partial = match target.model {
            SpaceModel::RbarGL => false,
            SpaceModel::RPrimeGL => true,
            _ => {
                return Err(Error::WrongModel {
                    expected: "a level model (full or partial)",
                    found: *target,
                })
            }
        };
        if self.space.g != target.g {
            return Err(Error::GenusMismatch {
                left: self.space.g,
                right: target.g,
            });
        }
        let g = target.g;
        let level = target.level;
        let mut terms: Vec<(BasisSymbol, Rational)> = Vec::new();
        for (sym, c) in &self.coeffs {
            match *sym {
                Lambda => terms.push((Lambda, c.clone())),
                Delta0 => {
                    terms.push((Delta0Prime, c.clone()));
                    terms.push((Delta0DoublePrime, c.clone()));
                    for a in 1..=level / 2 {
                        terms.push((Delta0Ram(a), c * rat_int(level as i64)));
                    }
                }
                DeltaI(1) => {
                    if level == 2 {
                        return Err(Error::UnsupportedLevel {
                            level,
                            context: "the pullback rule for d_1 needs level >= 3",
                        });
                    }
                    if !to_partial {
                        terms.push((DeltaI(1), c * rat_int(2)));
                        terms.push((DeltaIColonGMinusI(1), c * rat_int(2)));
                        terms.push((DeltaGMinusI(1), c.clone()));
                    }
                }
                DeltaI(i) => {
                    if !to_partial {
                        terms.push((DeltaI(i), c.clone()));
                        terms.push((DeltaIColonGMinusI(i), c.clone()));
                        // At i = g/2 the tail symbol coincides with d_i
                        // itself and contributes no separate component.
                        if !(g % 2 == 0 && i == g / 2) {
                            terms.push((DeltaGMinusI(i), c.clone()));
                        }
                    }
                }
                other => {
                    return Err(Error::InvalidSymbol {
                        symbol: other,
                        space: self.space,
                    })
                }
            }
        }
        Self::from_terms(*target, terms)
    }

    /// Restriction from the full level model to the partial one: keeps
    /// `lambda` and the irreducible boundary, drops everything else.
    pub fn restrict_to_partial(&self) -> Result<Self, Error> {
        use BasisSymbol::*;
        if self.space.model != SpaceModel::RbarGL {
            return Err(Error::WrongModel {
                expected: "the full level model",
                found: self.space,
            });
        }
        let target = SpaceDescriptor::rprime(self.space.g, self.space.level)?;
        let terms = self
            .coeffs
            .iter()
            .filter(|(s, _)| {
                matches!(s, Lambda | Delta0Prime | Delta0DoublePrime | Delta0Ram(_))
            })
            .map(|(s, c)| (*s, c.clone()));
        Self::from_terms(target, terms)
    }

    /// Text rendering: terms in canonical order joined by signs, unit
    /// coefficients suppressed. With `decimals`, non-integral coefficients
    /// get an approximate decimal in parentheses after the exact value; the
    /// exact value always stays.
    pub fn render_text(&self, decimals: bool) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let g = self.space.g;
        let mut out = String::new();
        for (idx, (sym, c)) in self.coeffs.iter().enumerate() {
            let negative = c.is_negative();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = c.abs();
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                if decimals && !mag.is_integer() {
                    let approx = mag.to_f64().unwrap_or(f64::NAN);
                    out.push_str(&format!(" (~{approx:.6})"));
                }
                out.push(' ');
            }
            out.push_str(&sym.text(g));
        }
        out
    }
}

trait IsOne {
    fn is_one(&self) -> bool;
}

impl IsOne for Rational {
    fn is_one(&self) -> bool {
        *self == rat_int(1)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text(false))
    }
}

/// Strict parser for the serialized rational format `p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = Integer::from_str(numer).map_err(|_| format!("bad numerator in `{s}`"))?;
    let d = Integer::from_str(denom).map_err(|_| format!("bad denominator in `{s}`"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rational::new(n, d))
}

fn model_tag(model: SpaceModel) -> &'static str {
    match model {
        SpaceModel::MbarG => "Mbar",
        SpaceModel::RbarGL => "Rbar",
        SpaceModel::RPrimeGL => "RPrime",
        SpaceModel::GSpace { .. } => "G",
    }
}

impl Serialize for SpaceDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let gspace = matches!(self.model, SpaceModel::GSpace { .. });
        let mut st = serializer.serialize_struct("SpaceDescriptor", if gspace { 5 } else { 3 })?;
        st.serialize_field("g", &self.g)?;
        st.serialize_field("l", &self.level)?;
        st.serialize_field("model", model_tag(self.model))?;
        if let SpaceModel::GSpace { r, d } = self.model {
            st.serialize_field("r", &r)?;
            st.serialize_field("d", &d)?;
        }
        st.end()
    }
}

#[derive(Deserialize)]
struct SpaceDto {
    g: u32,
    l: u32,
    model: String,
    #[serde(default)]
    r: Option<u32>,
    #[serde(default)]
    d: Option<u32>,
}

impl<'de> Deserialize<'de> for SpaceDescriptor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = SpaceDto::deserialize(deserializer)?;
        let space = match dto.model.as_str() {
            "Mbar" => SpaceDescriptor::mbar(dto.g, dto.l),
            "Rbar" => SpaceDescriptor::rbar(dto.g, dto.l),
            "RPrime" => SpaceDescriptor::rprime(dto.g, dto.l),
            "G" => {
                let space = SpaceDescriptor::gspace(dto.g, dto.l);
                if let Ok(s) = &space {
                    if let SpaceModel::GSpace { r, d } = s.model() {
                        let r_ok = dto.r.map_or(true, |x| x == r);
                        let d_ok = dto.d.map_or(true, |x| x == d);
                        if !r_ok || !d_ok {
                            return Err(D::Error::custom(format!(
                                "auxiliary space for genus {} has r={r}, d={d}",
                                dto.g
                            )));
                        }
                    }
                }
                space
            }
            other => return Err(D::Error::custom(format!("unknown model `{other}`"))),
        };
        space.map_err(|e| D::Error::custom(e.to_string()))
    }
}

impl Serialize for DivisorClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("DivisorClass", 2)?;
        st.serialize_field("space", &self.space)?;
        st.serialize_field("coeffs", &CoeffMap(self))?;
        st.end()
    }
}

/// Serializes the coefficient map with keys in canonical basis order (the
/// map is streamed, so the emitted JSON preserves this order).
struct CoeffMap<'a>(&'a DivisorClass);

impl Serialize for CoeffMap<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let g = self.0.space.g;
        let mut map = serializer.serialize_map(Some(self.0.coeffs.len()))?;
        for (sym, c) in &self.0.coeffs {
            map.serialize_entry(&sym.json_key(g), &c.to_string())?;
        }
        map.end()
    }
}

#[derive(Deserialize)]
struct ClassDto {
    space: SpaceDescriptor,
    #[serde(default)]
    coeffs: BTreeMap<String, String>,
}

impl<'de> Deserialize<'de> for DivisorClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = ClassDto::deserialize(deserializer)?;
        let g = dto.space.g();
        let mut terms = Vec::with_capacity(dto.coeffs.len());
        for (key, value) in &dto.coeffs {
            let sym = BasisSymbol::parse_json_key(key, g).map_err(D::Error::custom)?;
            let c = parse_rational(value).map_err(D::Error::custom)?;
            terms.push((sym, c));
        }
        DivisorClass::from_terms(dto.space, terms).map_err(|e| D::Error::custom(e.to_string()))
    }
}
