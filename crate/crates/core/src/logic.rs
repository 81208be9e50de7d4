//! The decision language: modal operators for full HS², RCC8 and RCC5,
//! comparators, γ thresholds, and decisions with their textual forms.
//!
//! A modal operator `⟨X⟩` evaluated at `r` reaches every `s` with
//! `r R_X s`. Derived (topological) operators are unions of relation
//! tuples; `⟨ρ⟩` at `r` reaches the rectangles that stand in RCC relation
//! `ρ` to `r` (so `⟨NTPP⁻¹⟩` from a pixel reaches the windows strictly
//! containing it).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geometry::{classify_pair, enumerate_rectangles, GridBounds, RelationTuple};
use crate::oracle::rcc8_classify;

/// The eight Egenhofer-Franzosa relations. Each names the relation of the
/// second region to the first (`s` to `r`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rcc8 {
    Dc,
    Ec,
    Po,
    Tpp,
    Ntpp,
    TppInv,
    NtppInv,
    Eq,
}

impl Rcc8 {
    /// The seven relations usable as modalities (equality excluded).
    pub const MODAL: [Rcc8; 7] = [
        Rcc8::Dc,
        Rcc8::Ec,
        Rcc8::Po,
        Rcc8::Tpp,
        Rcc8::Ntpp,
        Rcc8::TppInv,
        Rcc8::NtppInv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rcc8::Dc => "DC",
            Rcc8::Ec => "EC",
            Rcc8::Po => "PO",
            Rcc8::Tpp => "TPP",
            Rcc8::Ntpp => "NTPP",
            Rcc8::TppInv => "TPPi",
            Rcc8::NtppInv => "NTPPi",
            Rcc8::Eq => "EQ",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rcc8::TppInv => "TPP⁻¹",
            Rcc8::NtppInv => "NTPP⁻¹",
            other => other.name(),
        }
    }

    pub fn inverse(self) -> Self {
        match self {
            Rcc8::Tpp => Rcc8::TppInv,
            Rcc8::TppInv => Rcc8::Tpp,
            Rcc8::Ntpp => Rcc8::NtppInv,
            Rcc8::NtppInv => Rcc8::Ntpp,
            other => other,
        }
    }
}

/// Standard RCC5 coarsening of RCC8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rcc5 {
    Dr,
    Po,
    Pp,
    PpInv,
}

impl Rcc5 {
    pub const MODAL: [Rcc5; 4] = [Rcc5::Dr, Rcc5::Po, Rcc5::Pp, Rcc5::PpInv];

    pub fn name(self) -> &'static str {
        match self {
            Rcc5::Dr => "DR",
            // kept apart from the RCC8 spelling so decisions parse back
            Rcc5::Po => "PO5",
            Rcc5::Pp => "PP",
            Rcc5::PpInv => "PPi",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rcc5::Po => "PO",
            Rcc5::PpInv => "PP⁻¹",
            other => other.name(),
        }
    }

    pub fn parts(self) -> &'static [Rcc8] {
        match self {
            Rcc5::Dr => &[Rcc8::Dc, Rcc8::Ec],
            Rcc5::Po => &[Rcc8::Po],
            Rcc5::Pp => &[Rcc8::Tpp, Rcc8::Ntpp],
            Rcc5::PpInv => &[Rcc8::TppInv, Rcc8::NtppInv],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DerivedOperator {
    Rcc8(Rcc8),
    Rcc5(Rcc5),
}

impl DerivedOperator {
    pub fn name(self) -> &'static str {
        match self {
            DerivedOperator::Rcc8(r) => r.name(),
            DerivedOperator::Rcc5(r) => r.name(),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            DerivedOperator::Rcc8(r) => r.symbol(),
            DerivedOperator::Rcc5(r) => r.symbol(),
        }
    }

    pub fn tuples(self) -> &'static [RelationTuple] {
        match self {
            DerivedOperator::Rcc8(r) => &rcc8_tables()[&r],
            DerivedOperator::Rcc5(r) => &rcc5_tables()[&r],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OperatorSpec {
    Direct(RelationTuple),
    Derived(DerivedOperator),
}

impl OperatorSpec {
    pub fn name(&self) -> String {
        match self {
            OperatorSpec::Direct(t) => t.to_string(),
            OperatorSpec::Derived(d) => d.name().to_string(),
        }
    }

    pub fn symbol(&self) -> String {
        match self {
            OperatorSpec::Direct(t) => t.symbol(),
            OperatorSpec::Derived(d) => d.symbol().to_string(),
        }
    }
}

impl FromStr for OperatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('(') {
            let t: RelationTuple = s.parse()?;
            if t.is_identity() {
                return Err(Error::Parse {
                    line: 0,
                    message: "the identity tuple is not a modal operator".into(),
                });
            }
            return Ok(OperatorSpec::Direct(t));
        }
        if let Some(r) = Rcc8::MODAL.into_iter().find(|r| r.name() == s) {
            return Ok(OperatorSpec::Derived(DerivedOperator::Rcc8(r)));
        }
        if let Some(r) = Rcc5::MODAL.into_iter().find(|r| r.name() == s) {
            return Ok(OperatorSpec::Derived(DerivedOperator::Rcc5(r)));
        }
        Err(Error::Parse {
            line: 0,
            message: format!("unknown operator `{s}`"),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FragmentId {
    Hs2Full,
    Hs2Rcc8,
    Hs2Rcc5,
    Propositional,
}

impl FragmentId {
    pub fn name(self) -> &'static str {
        match self {
            FragmentId::Hs2Full => "hs2_full",
            FragmentId::Hs2Rcc8 => "hs2_rcc8",
            FragmentId::Hs2Rcc5 => "hs2_rcc5",
            FragmentId::Propositional => "propositional",
        }
    }
}

impl FromStr for FragmentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hs2_full" | "hs2" => Ok(FragmentId::Hs2Full),
            "hs2_rcc8" | "rcc8" => Ok(FragmentId::Hs2Rcc8),
            "hs2_rcc5" | "rcc5" => Ok(FragmentId::Hs2Rcc5),
            "propositional" | "prop" => Ok(FragmentId::Propositional),
            other => Err(Error::Config(format!("unknown fragment `{other}`"))),
        }
    }
}

impl fmt::Display for FragmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Modal operators of a fragment, in canonical order: full HS² lists the
/// 168 non-identity tuples by code; RCC8 lists DC, EC, PO, TPP, NTPP,
/// TPP⁻¹, NTPP⁻¹; RCC5 lists DR, PO, PP, PP⁻¹.
pub fn operator_set(fragment: FragmentId) -> Vec<OperatorSpec> {
    match fragment {
        FragmentId::Hs2Full => (0..168)
            .map(|code| OperatorSpec::Direct(RelationTuple::from_code(code, 2)))
            .collect(),
        FragmentId::Hs2Rcc8 => Rcc8::MODAL
            .into_iter()
            .map(|r| OperatorSpec::Derived(DerivedOperator::Rcc8(r)))
            .collect(),
        FragmentId::Hs2Rcc5 => Rcc5::MODAL
            .into_iter()
            .map(|r| OperatorSpec::Derived(DerivedOperator::Rcc5(r)))
            .collect(),
        FragmentId::Propositional => Vec::new(),
    }
}

/// The relation tuples an operator ranges over, sorted.
pub fn expand_operator(op: &OperatorSpec) -> Vec<RelationTuple> {
    match op {
        OperatorSpec::Direct(t) => vec![t.clone()],
        OperatorSpec::Derived(d) => d.tuples().to_vec(),
    }
}

/// Classifies every ordered pair of distinct rectangles on an `n × n` grid
/// with the topological oracle and collects the relation tuples seen for
/// each RCC8 relation.
pub fn derive_rcc8_tuples(n: u32) -> BTreeMap<Rcc8, BTreeSet<RelationTuple>> {
    let bounds = GridBounds::planar(n, n).expect("n >= 1");
    let rects: Vec<_> = enumerate_rectangles(&bounds).collect();
    let mut out: BTreeMap<Rcc8, BTreeSet<RelationTuple>> = BTreeMap::new();
    for r in &rects {
        for s in &rects {
            if r == s {
                continue;
            }
            let rel = rcc8_classify(s, r);
            let t = classify_pair(r, s).expect("same dimensions");
            out.entry(rel).or_default().insert(t);
        }
    }
    out
}

fn rcc8_tables() -> &'static BTreeMap<Rcc8, Vec<RelationTuple>> {
    static TABLES: OnceLock<BTreeMap<Rcc8, Vec<RelationTuple>>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let derived = derive_rcc8_tuples(4);
        Rcc8::MODAL
            .into_iter()
            .map(|r| {
                (
                    r,
                    derived.get(&r).map(|s| s.iter().cloned().collect()).unwrap_or_default(),
                )
            })
            .collect()
    })
}

fn rcc5_tables() -> &'static BTreeMap<Rcc5, Vec<RelationTuple>> {
    static TABLES: OnceLock<BTreeMap<Rcc5, Vec<RelationTuple>>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let rcc8 = rcc8_tables();
        Rcc5::MODAL
            .into_iter()
            .map(|r| {
                let set: BTreeSet<RelationTuple> = r.parts().iter().flat_map(|p| rcc8[p].iter().cloned()).collect();
                (r, set.into_iter().collect())
            })
            .collect()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Comparator {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Comparator {
    pub const ALL: [Comparator; 6] = [
        Comparator::Lt,
        Comparator::Le,
        Comparator::Eq,
        Comparator::Ne,
        Comparator::Ge,
        Comparator::Gt,
    ];

    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Lt => value < threshold,
            Comparator::Le => value <= threshold,
            Comparator::Eq => value == threshold,
            Comparator::Ne => value != threshold,
            Comparator::Ge => value >= threshold,
            Comparator::Gt => value > threshold,
        }
    }

    /// The complement comparator: `v ⋈ a` fails iff `v ⋈̄ a` holds.
    pub fn complement(self) -> Self {
        match self {
            Comparator::Lt => Comparator::Ge,
            Comparator::Le => Comparator::Gt,
            Comparator::Eq => Comparator::Ne,
            Comparator::Ne => Comparator::Eq,
            Comparator::Ge => Comparator::Lt,
            Comparator::Gt => Comparator::Le,
        }
    }

    pub fn ascii(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Eq => "=",
            Comparator::Ne => "!=",
            Comparator::Ge => ">=",
            Comparator::Gt => ">",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "≤",
            Comparator::Eq => "=",
            Comparator::Ne => "≠",
            Comparator::Ge => "≥",
            Comparator::Gt => ">",
        }
    }
}

impl FromStr for Comparator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Comparator::ALL
            .into_iter()
            .find(|c| c.ascii() == s || c.symbol() == s)
            .ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("unknown comparator `{s}`"),
            })
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ascii())
    }
}

/// A non-negative fraction `num/den` in lowest terms, at most 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: u32,
    den: u32,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Ratio {
    fn reduced(num: u32, den: u32) -> Self {
        let g = gcd(num, den).max(1);
        Ratio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn num(self) -> u32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_one(self) -> bool {
        self.num == self.den
    }

    pub fn complement(self) -> Self {
        Ratio::reduced(self.den - self.num, self.den)
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Decimal when the denominator divides a power of ten, else `num/den`.
    fn text(self) -> String {
        let mut den = self.den;
        let mut digits = 0u32;
        while den.is_multiple_of(10) {
            den /= 10;
            digits += 1;
        }
        let (mut twos, mut fives) = (0u32, 0u32);
        while den.is_multiple_of(2) {
            den /= 2;
            twos += 1;
        }
        while den.is_multiple_of(5) {
            den /= 5;
            fives += 1;
        }
        if den != 1 {
            return format!("{}/{}", self.num, self.den);
        }
        let places = digits + twos.max(fives);
        let scale = 10u64.pow(places);
        let scaled = self.num as u64 * scale / self.den as u64;
        if places == 0 {
            return scaled.to_string();
        }
        let int = scaled / scale;
        let frac = scaled % scale;
        format!("{int}.{frac:0width$}", width = places as usize)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// Minimum fraction of a rectangle's pixels that must satisfy a test;
/// an exact rational in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gamma(Ratio);

impl Gamma {
    pub const ONE: Gamma = Gamma(Ratio { num: 1, den: 1 });

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::Config(format!("gamma {num}/{den} outside (0,1]")));
        }
        Ok(Gamma(Ratio::reduced(num, den)))
    }

    pub fn ratio(self) -> Ratio {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0.as_f64()
    }

    pub fn is_one(self) -> bool {
        self.0.is_one()
    }

    /// Smallest satisfying-pixel count out of `total`: `ceil(γ·total)`.
    pub fn required(self, total: u64) -> u64 {
        let (n, d) = (self.0.num as u64, self.0.den as u64);
        (n * total).div_ceil(d)
    }

    /// `count / total >= γ`, in exact integer arithmetic.
    pub fn admits(self, count: u64, total: u64) -> bool {
        count * self.0.den as u64 >= self.0.num as u64 * total
    }
}

impl PartialOrd for Gamma {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gamma {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.num as u64 * other.0.den as u64).cmp(&(other.0.num as u64 * self.0.den as u64))
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Gamma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("bad gamma `{s}`"));
        if let Some((n, d)) = s.split_once('/') {
            return Gamma::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            );
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() || frac.len() > 6 {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u32.pow(frac.len() as u32);
        let int: u32 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac_v: u32 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        Gamma::new(int * den + frac_v, den)
    }
}

/// A propositional test `A ⋈_γ a`, optionally under a modal operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Decision {
    pub operator: Option<OperatorSpec>,
    pub attribute: usize,
    pub comparator: Comparator,
    pub threshold: f64,
    pub gamma: Gamma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Notation {
    /// `<NTPPi>(A43 >=_0.8 1978)`; parseable.
    Ascii,
    /// `⟨NTPP⁻¹⟩(A₄₃ ≥₀.₈ 1978)`.
    Unicode,
}

fn subscript(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            '0'..='9' => char::from_u32('₀' as u32 + c.to_digit(10).unwrap()).unwrap(),
            other => other,
        })
        .collect()
}

/// Comparator and displayed fraction of a test, as printed on an edge.
/// For a dual form the fraction means "strictly more than".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TestForm {
    pub comparator: Comparator,
    pub fraction: Ratio,
}

impl TestForm {
    pub fn of(d: &Decision) -> Self {
        TestForm {
            comparator: d.comparator,
            fraction: d.gamma.ratio(),
        }
    }

    /// `⋈_γ` becomes `⋈̄_{1-γ}`.
    pub fn negate(self) -> Self {
        TestForm {
            comparator: self.comparator.complement(),
            fraction: self.fraction.complement(),
        }
    }

    /// Subscript omitted when it carries no information (γ = 1, or a
    /// dual fraction of 0).
    fn render(self, notation: Notation, dual: bool) -> String {
        let omit = if dual {
            self.fraction.is_zero()
        } else {
            self.fraction.is_one()
        };
        match notation {
            Notation::Ascii if omit => self.comparator.ascii().to_string(),
            Notation::Ascii => format!("{}_{}", self.comparator.ascii(), self.fraction),
            Notation::Unicode if omit => self.comparator.symbol().to_string(),
            Notation::Unicode => format!("{}{}", self.comparator.symbol(), subscript(&self.fraction.to_string())),
        }
    }
}

impl Decision {
    pub fn propositional(attribute: usize, comparator: Comparator, threshold: f64, gamma: Gamma) -> Self {
        Decision {
            operator: None,
            attribute,
            comparator,
            threshold,
            gamma,
        }
    }

    pub fn modal(op: OperatorSpec, attribute: usize, comparator: Comparator, threshold: f64, gamma: Gamma) -> Self {
        Decision {
            operator: Some(op),
            attribute,
            comparator,
            threshold,
            gamma,
        }
    }

    pub fn is_modal(&self) -> bool {
        self.operator.is_some()
    }

    /// Attributes print 1-based: index 0 is `A1`.
    fn body(&self, form: TestForm, notation: Notation, dual: bool) -> String {
        let attr = (self.attribute + 1).to_string();
        let attr = match notation {
            Notation::Ascii => format!("A{attr}"),
            Notation::Unicode => format!("A{}", subscript(&attr)),
        };
        format!("{attr} {} {}", form.render(notation, dual), self.threshold)
    }

    /// The test without its operator: `A₄₃ ≥₀.₈ 1978`.
    pub fn test_display(&self, notation: Notation) -> String {
        self.body(TestForm::of(self), notation, false)
    }

    pub fn display(&self, notation: Notation) -> String {
        let body = self.body(TestForm::of(self), notation, false);
        match (&self.operator, notation) {
            (None, _) => body,
            (Some(op), Notation::Ascii) => format!("<{}>({body})", op.name()),
            (Some(op), Notation::Unicode) => format!("⟨{}⟩({body})", op.symbol()),
        }
    }

    /// The form shown on the "no" branch: `⟨X⟩(A ⋈_γ a)` renders as
    /// `[X](A ⋈̄_{1-γ} a)`. Display only; evaluation of the "no" branch
    /// is always failure of the positive decision.
    pub fn negated_display(&self, notation: Notation) -> String {
        let body = self.body(TestForm::of(self).negate(), notation, true);
        match (&self.operator, notation) {
            (None, _) => body,
            (Some(op), Notation::Ascii) => format!("[{}]({body})", op.name()),
            (Some(op), Notation::Unicode) => format!("[{}]({body})", op.symbol()),
        }
    }
}

/// Dual display of a decision for its "no" branch.
pub fn negate_decision_display(d: &Decision) -> String {
    d.negated_display(Notation::Unicode)
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(Notation::Ascii))
    }
}

impl FromStr for Decision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |m: &str| Error::Parse {
            line: 0,
            message: format!("{m} in decision `{s}`"),
        };
        let (operator, body) = if let Some(rest) = s.strip_prefix('<') {
            let (op, rest) = rest.split_once(">(").ok_or_else(|| bad("unterminated operator"))?;
            let body = rest.strip_suffix(')').ok_or_else(|| bad("missing `)`"))?;
            (Some(op.parse::<OperatorSpec>()?), body)
        } else {
            (None, s)
        };
        let mut parts = body.split_whitespace();
        let attr = parts
            .next()
            .and_then(|a| a.strip_prefix('A'))
            .and_then(|a| a.parse::<usize>().ok())
            .filter(|&a| a >= 1)
            .ok_or_else(|| bad("bad attribute"))?;
        let test = parts.next().ok_or_else(|| bad("missing comparator"))?;
        let (cmp, gamma) = match test.split_once('_') {
            Some((c, g)) => (c.parse::<Comparator>()?, g.parse::<Gamma>()?),
            None => (test.parse::<Comparator>()?, Gamma::ONE),
        };
        let threshold: f64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("bad threshold"))?;
        if parts.next().is_some() {
            return Err(bad("trailing input"));
        }
        Ok(Decision {
            operator,
            attribute: attr - 1,
            comparator: cmp,
            threshold,
            gamma,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AllenRelation::*;

    #[test]
    fn operator_counts() {
        assert_eq!(operator_set(FragmentId::Hs2Full).len(), 168);
        assert_eq!(operator_set(FragmentId::Hs2Rcc8).len(), 7);
        assert_eq!(operator_set(FragmentId::Hs2Rcc5).len(), 4);
        assert!(operator_set(FragmentId::Propositional).is_empty());
    }

    #[test]
    fn full_operators_distinct_without_identity() {
        let ops = operator_set(FragmentId::Hs2Full);
        let set: BTreeSet<_> = ops.iter().cloned().collect();
        assert_eq!(set.len(), 168);
        assert!(!ops.contains(&OperatorSpec::Direct(RelationTuple::identity(2))));
    }

    #[test]
    fn expansions() {
        let t = RelationTuple::new(vec![After, Equal]);
        assert_eq!(expand_operator(&OperatorSpec::Direct(t.clone())), vec![t]);
        let ntpp = expand_operator(&OperatorSpec::Derived(DerivedOperator::Rcc8(Rcc8::Ntpp)));
        assert!(ntpp.contains(&RelationTuple::new(vec![During, During])));
        // DC: some axis separated by a gap (L or Li); 13² - 11² tuples
        let dc = expand_operator(&OperatorSpec::Derived(DerivedOperator::Rcc8(Rcc8::Dc)));
        assert_eq!(dc.len(), 48);
    }

    #[test]
    fn printed_dc_union_is_subset() {
        let dc: BTreeSet<_> = expand_operator(&OperatorSpec::Derived(DerivedOperator::Rcc8(Rcc8::Dc)))
            .into_iter()
            .collect();
        for x in [After, Later, Begins, Ends, During, Overlaps, Equal] {
            for t in [vec![LaterInv, x], vec![Later, x], vec![x, LaterInv], vec![x, Later]] {
                assert!(dc.contains(&RelationTuple::new(t)));
            }
        }
    }

    #[test]
    fn gamma_parsing_and_arithmetic() {
        let g: Gamma = "0.7".parse().unwrap();
        assert_eq!(g, Gamma::new(7, 10).unwrap());
        assert!(g.admits(3, 4));
        assert!(!Gamma::ONE.admits(3, 4));
        assert!("0.75".parse::<Gamma>().unwrap().admits(3, 4));
        assert_eq!("1".parse::<Gamma>().unwrap(), Gamma::ONE);
        assert_eq!("2/3".parse::<Gamma>().unwrap().to_string(), "2/3");
        assert!("0".parse::<Gamma>().is_err());
        assert!("1.2".parse::<Gamma>().is_err());
        assert_eq!(Gamma::new(6, 10).unwrap().required(9), 6);
        assert_eq!(Gamma::ONE.required(9), 9);
        assert_eq!(Gamma::new(1, 1000).unwrap().required(9), 1);
    }

    #[test]
    fn dual_display_matches_figure_forms() {
        let ntppi = OperatorSpec::Derived(DerivedOperator::Rcc8(Rcc8::NtppInv));
        let root = Decision::modal(ntppi, 42, Comparator::Ge, 1978.0, "0.8".parse().unwrap());
        assert_eq!(negate_decision_display(&root), "[NTPP⁻¹](A₄₃ <₀.₂ 1978)");
        assert_eq!(root.display(Notation::Unicode), "⟨NTPP⁻¹⟩(A₄₃ ≥₀.₈ 1978)");

        let prop = Decision::propositional(41, Comparator::Lt, 3367.0, Gamma::ONE);
        assert_eq!(negate_decision_display(&prop), "A₄₂ ≥ 3367");

        let ec = Decision::modal(
            OperatorSpec::Derived(DerivedOperator::Rcc8(Rcc8::Ec)),
            82,
            Comparator::Ge,
            638.0,
            Gamma::ONE,
        );
        assert_eq!(negate_decision_display(&ec), "[EC](A₈₃ < 638)");
        assert_eq!(ec.negated_display(Notation::Ascii), "[EC](A83 < 638)");
    }

    #[test]
    fn negation_is_an_involution() {
        for c in Comparator::ALL {
            for (n, d) in [(1, 1), (3, 5), (7, 10), (1, 3)] {
                let form = TestForm {
                    comparator: c,
                    fraction: Ratio::reduced(n, d),
                };
                assert_eq!(form.negate().negate(), form);
            }
        }
    }

    #[test]
    fn decision_text_round_trip() {
        let cases = [
            Decision::propositional(0, Comparator::Le, 1.5, Gamma::ONE),
            Decision::propositional(3, Comparator::Ne, -2.25, "0.6".parse().unwrap()),
            Decision::modal(
                OperatorSpec::Direct(RelationTuple::new(vec![After, Equal])),
                1,
                Comparator::Gt,
                7.0,
                "0.9".parse().unwrap(),
            ),
            Decision::modal(
                OperatorSpec::Derived(DerivedOperator::Rcc5(Rcc5::PpInv)),
                9,
                Comparator::Lt,
                0.1,
                Gamma::new(2, 3).unwrap(),
            ),
        ];
        for d in cases {
            let text = d.to_string();
            assert_eq!(text.parse::<Decision>().unwrap(), d, "{text}");
        }
        assert_eq!(
            Decision::modal(
                OperatorSpec::Direct(RelationTuple::new(vec![DuringInv, DuringInv])),
                0,
                Comparator::Ge,
                3.0,
                "0.8".parse().unwrap()
            )
            .to_string(),
            "<(Di,Di)>(A1 >=_0.8 3)"
        );
        assert!("<(=,=)>(A1 <= 2)".parse::<Decision>().is_err());
        assert!("A0 <= 2".parse::<Decision>().is_err());
    }
}
