//! Finitely generated submonoids of the non-negative integers.
//!
//! A cone `⟨g_1, …, g_k⟩` is the set of all finite sums of generators, plus 0.
//! When the generators are coprime the cone is the positive cone of a simple
//! component: it is cofinite, has a conductor `N` (the least integer with
//! `N−1` outside the cone and everything from `N` on inside), and a finite gap
//! set.
//!
//! Membership and the conductor are computed from the table of smallest
//! members per residue class modulo the least generator (a shortest-path
//! computation), which makes single queries O(1) regardless of how large the
//! conductor is. The naive marking sweep lives in [`crate::oracle`] and is
//! used by the test suite as an independent route to the same answers.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use once_cell::sync::OnceCell;
use serde::Serialize;

use crate::{Error, Result};

/// Hard cap on materializing gap sets; profiles of cones with larger
/// conductors must be queried through `contains`/`conductor` instead.
const GAP_MATERIALIZE_LIMIT: u64 = 1 << 24;

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// A finitely generated submonoid of ℤ⁺ with a write-once analysis cache.
///
/// Cones are immutable; the residue table is computed at most once and shared
/// by all clones of the same `Arc`.
#[derive(Debug, Clone)]
pub struct IntegerCone {
    gens: Vec<u64>,
    data: OnceCell<ConeData>,
}

#[derive(Debug, Clone)]
struct ConeData {
    gcd: u64,
    /// Least generator of the gcd-reduced cone.
    modulus: u64,
    /// `apery[r]` = smallest member of the reduced cone congruent to `r`.
    apery: Vec<u64>,
    /// Conductor of the reduced cone (`0` when the reduced cone is all of ℤ⁺).
    reduced_conductor: u64,
}

/// Analysis summary of a cone, as emitted on the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeProfile {
    pub minimal_generators: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conductor: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<u64>>,
    pub is_simple: bool,
}

impl PartialEq for IntegerCone {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens
    }
}
impl Eq for IntegerCone {}

impl IntegerCone {
    /// Builds a cone from positive generators. Generators are sorted and
    /// deduplicated; the denoted set is unchanged by either.
    pub fn new(mut gens: Vec<u64>) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::Precondition("cone needs at least one generator".into()));
        }
        if gens.iter().any(|&g| g == 0) {
            return Err(Error::Precondition("generators must be positive".into()));
        }
        gens.sort_unstable();
        gens.dedup();
        Ok(IntegerCone { gens, data: OnceCell::new() })
    }

    pub fn generators(&self) -> &[u64] {
        &self.gens
    }

    pub fn min_generator(&self) -> u64 {
        self.gens[0]
    }

    pub fn gcd(&self) -> u64 {
        self.gens.iter().fold(0, |acc, &g| gcd_u64(acc, g))
    }

    /// True iff the generators are coprime, i.e. the cone is the positive
    /// cone of a simple component.
    pub fn is_simple(&self) -> bool {
        self.gcd() == 1
    }

    fn data(&self) -> Result<&ConeData> {
        self.data.get_or_try_init(|| compute_data(&self.gens))
    }

    /// Exact membership decision.
    pub fn contains(&self, x: u64) -> bool {
        let data = self.data().expect("residue table fits u64 for u64 queries");
        if x % data.gcd != 0 {
            return false;
        }
        let y = x / data.gcd;
        if y >= data.reduced_conductor {
            return true;
        }
        data.apery[(y % data.modulus) as usize] <= y
    }

    /// Membership for arbitrarily large inputs. Anything at or above the
    /// reduced conductor (after dividing out the gcd) is a member.
    pub fn contains_big(&self, x: &BigUint) -> bool {
        let data = self.data().expect("residue table fits u64 for big queries");
        let g = BigUint::from(data.gcd);
        if !(x % &g).is_zero() {
            return false;
        }
        let y = x / &g;
        if y >= BigUint::from(data.reduced_conductor) {
            return true;
        }
        let y = y.to_u64().expect("below conductor implies u64 range");
        data.apery[(y % data.modulus) as usize] <= y
    }

    /// The conductor, defined only for simple cones: the unique `N` with
    /// `N − 1` outside the cone and `N + k` inside for all `k ≥ 0`.
    /// For `⟨1⟩` this is 0 (`−1` is no member and every non-negative integer is).
    pub fn conductor(&self) -> Result<u64> {
        let data = self.data()?;
        if data.gcd != 1 {
            return Err(Error::Precondition(
                "conductor undefined: generators have a common factor".into(),
            ));
        }
        Ok(data.reduced_conductor)
    }

    /// Number of gaps (non-members below the conductor) of a simple cone.
    pub fn genus(&self) -> Result<u64> {
        let data = self.data()?;
        if data.gcd != 1 {
            return Err(Error::Precondition("genus undefined: cone not simple".into()));
        }
        let m = data.modulus;
        let mut count = 0u64;
        for (r, &a) in data.apery.iter().enumerate() {
            count += (a - r as u64) / m;
        }
        Ok(count)
    }

    /// Materializes the gap set of a simple cone.
    pub fn gaps(&self) -> Result<Vec<u64>> {
        let conductor = self.conductor()?;
        if conductor > GAP_MATERIALIZE_LIMIT {
            return Err(Error::WorkLimit {
                limit: GAP_MATERIALIZE_LIMIT,
                context: format!("materializing gaps below conductor {conductor}"),
            });
        }
        Ok((1..conductor).filter(|&x| !self.contains(x)).collect())
    }

    /// The unique minimal generating set: generators not expressible as a sum
    /// of two nonzero members.
    pub fn minimal_generators(&self) -> Vec<u64> {
        let mut minimal = Vec::new();
        for &gi in &self.gens {
            let redundant = self
                .gens
                .iter()
                .any(|&gj| gj < gi && self.contains(gi - gj));
            if !redundant {
                minimal.push(gi);
            }
        }
        minimal
    }

    /// A cone over the same set presented by its minimal generators.
    pub fn minimized(&self) -> IntegerCone {
        IntegerCone::new(self.minimal_generators()).expect("minimal set is nonempty")
    }

    /// Set equality of the denoted cones.
    pub fn same_cone(&self, other: &IntegerCone) -> bool {
        self.minimal_generators() == other.minimal_generators()
    }

    /// Full profile: minimal generators, and conductor plus gap set when the
    /// cone is simple.
    pub fn analyze(&self) -> Result<ConeProfile> {
        let minimal_generators = self.minimal_generators();
        if !self.is_simple() {
            return Ok(ConeProfile {
                minimal_generators,
                conductor: None,
                gaps: None,
                is_simple: false,
            });
        }
        Ok(ConeProfile {
            minimal_generators,
            conductor: Some(self.conductor()?),
            gaps: Some(self.gaps()?),
            is_simple: true,
        })
    }

    /// Modulus (least generator) and smallest-member-per-residue table of a
    /// simple cone. `x` is a member iff `table[x % modulus] <= x`.
    pub(crate) fn residue_table(&self) -> Result<(u64, &[u64])> {
        let data = self.data()?;
        if data.gcd != 1 {
            return Err(Error::Precondition("residue table needs a simple cone".into()));
        }
        Ok((data.modulus, &data.apery))
    }

    /// The cone with every generator multiplied by `m`.
    pub fn scaled(&self, m: u64) -> Result<IntegerCone> {
        if m == 0 {
            return Err(Error::Precondition("scale factor must be positive".into()));
        }
        let gens = self
            .gens
            .iter()
            .map(|&g| {
                g.checked_mul(m)
                    .ok_or_else(|| Error::Overflow(format!("{g}*{m} exceeds u64")))
            })
            .collect::<Result<Vec<_>>>()?;
        IntegerCone::new(gens)
    }

    /// Smallest positive member.
    pub fn min_positive(&self) -> u64 {
        self.gens[0]
    }

    /// The unique state on `(ℤ, cone, u)` evaluated at `x`: every group
    /// morphism ℤ → ℝ is multiplication by a scalar and `s(u) = 1` forces
    /// `s(x) = x/u`.
    pub fn state(&self, u: u64, x: u64) -> Result<BigRational> {
        if u == 0 {
            return Err(Error::Precondition("order-unit must be nonzero".into()));
        }
        if !self.contains(u) {
            return Err(Error::Precondition(format!("{u} is not in the cone")));
        }
        Ok(BigRational::new(x.into(), u.into()))
    }
}

fn compute_data(gens: &[u64]) -> Result<ConeData> {
    let gcd = gens.iter().fold(0, |acc, &g| gcd_u64(acc, g));
    let reduced: Vec<u64> = gens.iter().map(|&g| g / gcd).collect();
    let modulus = reduced[0];
    let n = modulus as usize;
    let mut dist: Vec<u128> = vec![u128::MAX; n];
    dist[0] = 0;
    let mut heap: BinaryHeap<Reverse<(u128, u64)>> = BinaryHeap::new();
    heap.push(Reverse((0, 0)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        for &g in &reduced {
            if g % modulus == 0 {
                continue;
            }
            let nv = (v + g % modulus) % modulus;
            let nd = d + g as u128;
            if nd < dist[nv as usize] {
                dist[nv as usize] = nd;
                heap.push(Reverse((nd, nv)));
            }
        }
    }
    let mut apery = Vec::with_capacity(n);
    let mut max = 0u128;
    for (r, &d) in dist.iter().enumerate() {
        debug_assert!(d < u128::MAX, "residue {r} unreachable in reduced cone");
        max = max.max(d);
        apery.push(
            d.to_u64()
                .ok_or_else(|| Error::Overflow("residue table exceeds u64".into()))?,
        );
    }
    let reduced_conductor = if modulus == 1 {
        0
    } else {
        (max + 1 - modulus as u128)
            .to_u64()
            .ok_or_else(|| Error::Overflow("conductor exceeds u64".into()))?
    };
    Ok(ConeData { gcd, modulus, apery, reduced_conductor })
}

/// `a·H + b·K`: the cone generated by the scaled generators of both inputs.
/// The generator list is kept as the raw union; callers minimize when growth
/// matters.
pub fn combine(a: u64, h: &IntegerCone, b: u64, k: &IntegerCone) -> Result<IntegerCone> {
    if a == 0 || b == 0 {
        return Err(Error::Precondition("combine multipliers must be positive".into()));
    }
    let mut gens = h.scaled(a)?.gens;
    gens.extend_from_slice(&k.scaled(b)?.gens);
    IntegerCone::new(gens)
}

/// The cone of `S = (1/L)(⋂ cones) ∩ ℤ`.
///
/// Requires every input simple and `L` coprime with every generator. Members
/// are decided by intersecting membership, the scan runs to a bound past
/// which everything is a member, and minimal generators are extracted from
/// the scanned window.
pub fn intersect_scale(cones: &[IntegerCone], l: u64) -> Result<IntegerCone> {
    if cones.is_empty() {
        return Err(Error::Precondition("need at least one cone".into()));
    }
    if l == 0 {
        return Err(Error::Precondition("L must be positive".into()));
    }
    for cone in cones {
        if !cone.is_simple() {
            return Err(Error::Precondition(format!(
                "cone <{}> is not simple",
                cone.gens.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(",")
            )));
        }
        for &g in &cone.gens {
            if gcd_u64(l, g) != 1 {
                return Err(Error::Precondition(format!(
                    "L={l} shares a factor with generator {g}"
                )));
            }
        }
    }
    let joint_conductor = cones
        .iter()
        .map(|c| c.conductor())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap();
    // Everything from ceil(N*/L) on is a member of S.
    let scaled_conductor = joint_conductor.div_ceil(l);
    let member = |x: u64| -> bool {
        let lx = x.checked_mul(l).expect("scan bound fits u64");
        cones.iter().all(|c| c.contains(lx))
    };
    if scaled_conductor == 0 {
        return IntegerCone::new(vec![1]);
    }
    let first = (1..=scaled_conductor).find(|&x| member(x)).unwrap_or(scaled_conductor);
    // Minimal generators all lie below first + scaled_conductor.
    let bound = first + scaled_conductor;
    let members: Vec<u64> = (first..=bound).filter(|&x| member(x)).collect();
    let mut minimal = Vec::new();
    for &x in &members {
        let splits = members
            .iter()
            .take_while(|&&u| u + first <= x)
            .any(|&u| member(x - u));
        if !splits {
            minimal.push(x);
        }
    }
    IntegerCone::new(minimal)
}

impl fmt::Display for IntegerCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

impl FromStr for IntegerCone {
    type Err = Error;

    /// Parses the textual cone form `"<2,5>"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = s
            .strip_prefix('<')
            .and_then(|r| r.strip_suffix('>'))
            .ok_or_else(|| Error::Parse(format!("expected <g1,g2,...>, got {s:?}")))?;
        let gens = inner
            .split(',')
            .map(|digits| {
                digits
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad generator {digits:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        IntegerCone::new(gens)
    }
}

/// A cone of the form `a·H⁺ + p·⟨c,d⟩` kept unexpanded, so that chains whose
/// conductors outgrow any scan range stay exactly decidable.
#[derive(Debug, Clone)]
pub enum LayeredCone {
    Flat(Arc<IntegerCone>),
    Layered(Arc<LayeredNode>),
}

#[derive(Debug)]
pub struct LayeredNode {
    pub multiplier: BigUint,
    pub inner: LayeredCone,
    pub p: BigUint,
    pub c: BigUint,
    pub d: BigUint,
    conductor: BigUint,
    /// `pc ≡ pd ≡ 1 (mod a)`, which pins `z1 + z2 (mod a)` during search.
    canonical: bool,
}

impl LayeredCone {
    pub fn flat(cone: IntegerCone) -> LayeredCone {
        LayeredCone::Flat(Arc::new(cone))
    }

    /// Builds `a·inner + p·⟨c,d⟩` after checking the full constraint set of
    /// the gap construction; the conductor is then `(a−1)pc + a(N−1) + 1`,
    /// cross-checked by a window scan wherever that is feasible.
    pub fn extend(
        inner: LayeredCone,
        a: &BigUint,
        p: &BigUint,
        c: &BigUint,
        d: &BigUint,
    ) -> Result<LayeredCone> {
        if !inner.is_simple()? {
            return Err(Error::Precondition("inner cone must be simple".into()));
        }
        let n_inner = inner.conductor()?;
        let two = BigUint::from(2u32);
        if a < &two {
            return Err(Error::Precondition("multiplier a must be at least 2".into()));
        }
        let checks = [
            (a.gcd(p).is_one(), "gcd(a,p) = 1"),
            (a.gcd(c).is_one(), "gcd(a,c) = 1"),
            (c.gcd(d).is_one(), "gcd(c,d) = 1"),
            (((p * c) % a).is_one(), "pc ≡ 1 (mod a)"),
            (((p * d) % a).is_one(), "pd ≡ 1 (mod a)"),
            (p > &n_inner, "p > N"),
            (p * c > a * &n_inner, "pc > aN"),
            (
                {
                    let pc = p * c;
                    let floor = ((a - 1u32) * &pc + a * (&n_inner - 1u32)).max(a * c);
                    d > &floor
                },
                "d > max{(a-1)pc + a(N-1), ac}",
            ),
        ];
        for (ok, label) in checks {
            if !ok {
                return Err(Error::Precondition(format!("layered extension needs {label}")));
            }
        }
        let pc = p * c;
        let conductor = (a - 1u32) * &pc + a * (&n_inner - 1u32) + 1u32;
        Ok(LayeredCone::Layered(Arc::new(LayeredNode {
            multiplier: a.clone(),
            inner,
            p: p.clone(),
            c: c.clone(),
            d: d.clone(),
            conductor,
            canonical: true,
        })))
    }

    /// Exact membership by recursive decomposition: peel off `p(c·z1 + d·z2)`,
    /// require the rest divisible by `a`, and test the quotient in the inner
    /// cone. With the canonical congruences, `z1` is pinned modulo `a` per
    /// choice of `z2`.
    pub fn contains(&self, x: &BigUint) -> bool {
        match self {
            LayeredCone::Flat(cone) => cone.contains_big(x),
            LayeredCone::Layered(node) => {
                let pc = &node.p * &node.c;
                let pd = &node.p * &node.d;
                let a = &node.multiplier;
                let mut z2 = BigUint::zero();
                loop {
                    let used = &pd * &z2;
                    if used > *x {
                        return false;
                    }
                    let rest = x - used;
                    if node.canonical {
                        // z1 ≡ rest (mod a) because pc ≡ 1 (mod a).
                        let mut z1 = &rest % a;
                        loop {
                            let term = &pc * &z1;
                            if term > rest {
                                break;
                            }
                            let rem = &rest - term;
                            debug_assert!((&rem % a).is_zero());
                            if node.inner.contains(&(rem / a)) {
                                return true;
                            }
                            z1 += a;
                        }
                    } else {
                        let mut z1 = BigUint::zero();
                        loop {
                            let term = &pc * &z1;
                            if term > rest {
                                break;
                            }
                            let rem = &rest - term;
                            if (&rem % a).is_zero() && node.inner.contains(&(rem / a)) {
                                return true;
                            }
                            z1 += 1u32;
                        }
                    }
                    z2 += 1u32;
                }
            }
        }
    }

    pub fn is_simple(&self) -> Result<bool> {
        match self {
            LayeredCone::Flat(cone) => Ok(cone.is_simple()),
            // gcd(a, pc) = 1 follows from pc ≡ 1 (mod a).
            LayeredCone::Layered(_) => Ok(true),
        }
    }

    pub fn conductor(&self) -> Result<BigUint> {
        match self {
            LayeredCone::Flat(cone) => Ok(BigUint::from(cone.conductor()?)),
            LayeredCone::Layered(node) => Ok(node.conductor.clone()),
        }
    }

    /// Smallest positive member: `min(a·min(H), pc)` for layered cones.
    pub fn min_positive(&self) -> BigUint {
        match self {
            LayeredCone::Flat(cone) => BigUint::from(cone.min_positive()),
            LayeredCone::Layered(node) => {
                let via_inner = &node.multiplier * node.inner.min_positive();
                let pc = &node.p * &node.c;
                via_inner.min(pc)
            }
        }
    }

    /// Expands to an explicit generator list when everything fits in `u64`.
    pub fn expand_flat(&self) -> Result<IntegerCone> {
        match self {
            LayeredCone::Flat(cone) => Ok((**cone).clone()),
            LayeredCone::Layered(node) => {
                let inner = node.inner.expand_flat()?;
                let a = node
                    .multiplier
                    .to_u64()
                    .ok_or_else(|| Error::Overflow("multiplier exceeds u64".into()))?;
                let mut gens = inner.scaled(a)?.gens;
                for value in [&node.p * &node.c, &node.p * &node.d] {
                    gens.push(
                        value
                            .to_u64()
                            .ok_or_else(|| Error::Overflow("generator exceeds u64".into()))?,
                    );
                }
                IntegerCone::new(gens)
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            LayeredCone::Flat(_) => 0,
            LayeredCone::Layered(node) => 1 + node.inner.depth(),
        }
    }
}

impl fmt::Display for LayeredCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayeredCone::Flat(cone) => write!(f, "{cone}"),
            LayeredCone::Layered(node) => {
                match &node.inner {
                    LayeredCone::Flat(cone) => write!(f, "{}*{}", node.multiplier, cone)?,
                    nested => write!(f, "{}*({})", node.multiplier, nested)?,
                }
                write!(f, "+{}*<{},{}>", node.p, node.c, node.d)
            }
        }
    }
}

impl FromStr for LayeredCone {
    type Err = Error;

    /// Parses `"<2,5>"`, `"5*<2,5>+6*<6,161>"`, and nested forms with
    /// parentheses. Two-term inputs whose tail is `p*<c,d>` and whose
    /// parameters satisfy the gap-construction constraints stay layered;
    /// everything else is flattened to an explicit generator list.
    fn from_str(s: &str) -> Result<Self> {
        parse_layered(&mut Tokenizer::new(s), 0)
    }
}

struct Tokenizer<'a> {
    rest: &'a str,
}

impl<'a> Tokenizer<'a> {
    fn new(s: &'a str) -> Self {
        Tokenizer { rest: s.trim() }
    }
    fn peek(&self) -> Option<char> {
        self.rest.trim_start().chars().next()
    }
    fn bump(&mut self) -> Option<char> {
        self.rest = self.rest.trim_start();
        let mut chars = self.rest.chars();
        let c = chars.next()?;
        self.rest = chars.as_str();
        Some(c)
    }
    fn number(&mut self) -> Result<u64> {
        self.rest = self.rest.trim_start();
        let end = self
            .rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest.len());
        if end == 0 {
            return Err(Error::Parse(format!("expected a number at {:?}", self.rest)));
        }
        let (digits, rest) = self.rest.split_at(end);
        self.rest = rest;
        digits
            .parse()
            .map_err(|_| Error::Parse(format!("number {digits:?} does not fit u64")))
    }
}

fn parse_flat_cone(tok: &mut Tokenizer) -> Result<IntegerCone> {
    if tok.bump() != Some('<') {
        return Err(Error::Parse("expected '<'".into()));
    }
    let mut gens = vec![tok.number()?];
    while tok.peek() == Some(',') {
        tok.bump();
        gens.push(tok.number()?);
    }
    if tok.bump() != Some('>') {
        return Err(Error::Parse("expected '>'".into()));
    }
    IntegerCone::new(gens)
}

fn parse_atom(tok: &mut Tokenizer, depth: usize) -> Result<LayeredCone> {
    match tok.peek() {
        Some('<') => Ok(LayeredCone::flat(parse_flat_cone(tok)?)),
        Some('(') => {
            tok.bump();
            let inner = parse_layered(tok, depth + 1)?;
            if tok.bump() != Some(')') {
                return Err(Error::Parse("expected ')'".into()));
            }
            Ok(inner)
        }
        other => Err(Error::Parse(format!("unexpected token {other:?}"))),
    }
}

fn parse_layered(tok: &mut Tokenizer, depth: usize) -> Result<LayeredCone> {
    if depth > 32 {
        return Err(Error::Parse("cone expression nests too deeply".into()));
    }
    let mut terms: Vec<(u64, LayeredCone)> = Vec::new();
    loop {
        let mult = if tok.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            let m = tok.number()?;
            if tok.bump() != Some('*') {
                return Err(Error::Parse("expected '*' after multiplier".into()));
            }
            m
        } else {
            1
        };
        terms.push((mult, parse_atom(tok, depth)?));
        if tok.peek() == Some('+') {
            tok.bump();
        } else {
            break;
        }
    }
    if depth == 0 && !tok.rest.trim().is_empty() {
        return Err(Error::Parse(format!("trailing input {:?}", tok.rest.trim())));
    }
    build_from_terms(terms)
}

fn build_from_terms(terms: Vec<(u64, LayeredCone)>) -> Result<LayeredCone> {
    if terms.len() == 1 {
        let (m, cone) = terms.into_iter().next().unwrap();
        if m == 1 {
            return Ok(cone);
        }
        let flat = cone.expand_flat()?;
        return Ok(LayeredCone::flat(flat.scaled(m)?));
    }
    if terms.len() == 2 {
        if let LayeredCone::Flat(cd) = &terms[1].1 {
            if cd.generators().len() == 2 {
                let (a, inner) = (&terms[0].0, terms[0].1.clone());
                let p = BigUint::from(terms[1].0);
                let c = BigUint::from(cd.generators()[0]);
                let d = BigUint::from(cd.generators()[1]);
                if let Ok(layered) =
                    LayeredCone::extend(inner, &BigUint::from(*a), &p, &c, &d)
                {
                    return Ok(layered);
                }
            }
        }
    }
    // General case: flatten every term.
    let mut gens = Vec::new();
    for (m, cone) in terms {
        gens.extend_from_slice(cone.expand_flat()?.scaled(m)?.generators());
    }
    Ok(LayeredCone::flat(IntegerCone::new(gens)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn cone(s: &str) -> IntegerCone {
        s.parse().unwrap()
    }

    #[test]
    fn membership_matches_hand_values() {
        let c = cone("<2,5>");
        assert!(!c.contains(3));
        assert!(c.contains(7));
        assert!(c.contains(0));
        let layered: LayeredCone = "5*<2,5>+6*<6,161>".parse().unwrap();
        assert!(!layered.contains(&BigUint::from(15u32)));
        assert!(layered.contains(&BigUint::from(10u32)));
        assert!(layered.contains(&BigUint::from(36u32)));
    }

    #[test]
    fn analyze_two_generator_cones() {
        let p = cone("<2,7>").analyze().unwrap();
        assert_eq!(p.conductor, Some(6));
        assert_eq!(p.gaps.as_deref(), Some(&[1, 3, 5][..]));
        assert_eq!(p.minimal_generators, vec![2, 7]);

        let p = cone("<3,5>").analyze().unwrap();
        assert_eq!(p.conductor, Some(8));
        assert_eq!(p.gaps.as_deref(), Some(&[1, 2, 4, 7][..]));
    }

    #[test]
    fn whole_line_cone_has_conductor_zero() {
        // N with N-1 outside the cone and N+k inside: for <1> only N = 0
        // works, since 0 itself is a member.
        let p = cone("<1>").analyze().unwrap();
        assert_eq!(p.conductor, Some(0));
        assert_eq!(p.gaps.as_deref(), Some(&[][..]));
    }

    #[test]
    fn non_simple_cone_has_no_conductor() {
        let c = cone("<4,6>");
        assert!(!c.is_simple());
        assert!(c.conductor().is_err());
        let p = c.analyze().unwrap();
        assert_eq!(p.conductor, None);
        assert!(c.contains(10));
        assert!(!c.contains(5));
    }

    #[test]
    fn simple_component_examples() {
        assert!(cone("<2,5>").is_simple());
        assert!(!cone("<4,6>").is_simple());
        assert!(cone("<6,10,15>").is_simple());
    }

    #[test]
    fn combine_scales_generators() {
        let g = combine(3, &cone("<2,5>"), 10, &cone("<3,7>")).unwrap();
        assert_eq!(g.generators(), &[6, 15, 30, 70]);
        let g = combine(2, &cone("<2,5>"), 7, &cone("<2,5>")).unwrap();
        assert_eq!(g.generators(), &[4, 10, 14, 35]);
        let g = combine(1, &cone("<2,5>"), 1, &cone("<3>")).unwrap();
        assert_eq!(g.minimal_generators(), vec![2, 3]);
    }

    #[test]
    fn minimal_generators_fixpoint() {
        for s in ["<2,5>", "<6,15,30,70>", "<4,10,14,35>", "<12,30,42,56,105>"] {
            let c = cone(s);
            let min = c.minimized();
            assert!(c.same_cone(&min));
            assert_eq!(min.analyze().unwrap(), c.analyze().unwrap());
        }
        assert_eq!(cone("<12,30,42,56,105>").minimal_generators(), vec![12, 30, 56, 105]);
    }

    #[test]
    fn apery_route_matches_sweep_oracle() {
        let cones = ["<2,5>", "<3,5>", "<2,7>", "<6,10,15>", "<5,7,9,11>", "<17,19>"];
        for s in cones {
            let c = cone(s);
            let (oracle_conductor, oracle_gaps) = oracle::sweep_profile(c.generators());
            assert_eq!(c.conductor().unwrap(), oracle_conductor, "{s}");
            assert_eq!(c.gaps().unwrap(), oracle_gaps, "{s}");
            assert_eq!(c.genus().unwrap(), c.gaps().unwrap().len() as u64, "{s}");
            let bitmap = oracle::members_bitmap(c.generators(), 400);
            for x in 0..=400u64 {
                assert_eq!(c.contains(x), bitmap[x as usize], "{s} at {x}");
            }
        }
    }

    #[test]
    fn intersect_scale_examples() {
        let s = intersect_scale(&[cone("<2,7>"), cone("<3,5>")], 1).unwrap();
        let profile = s.analyze().unwrap();
        assert_eq!(profile.conductor, Some(8));
        assert_eq!(profile.gaps.as_deref(), Some(&[1, 2, 3, 4, 5, 7][..]));

        let s = intersect_scale(&[cone("<2,3>")], 1).unwrap();
        assert!(s.same_cone(&cone("<2,3>")));

        let s = intersect_scale(&[cone("<2,7>"), cone("<2,7>")], 1).unwrap();
        assert!(s.same_cone(&cone("<2,7>")));

        assert!(intersect_scale(&[cone("<4,6>")], 1).is_err());
    }

    #[test]
    fn intersect_scale_gaps_union_when_l_is_one() {
        let a = cone("<2,7>");
        let b = cone("<3,5>");
        let s = intersect_scale(&[a.clone(), b.clone()], 1).unwrap();
        let mut expected: Vec<u64> = a.gaps().unwrap();
        expected.extend(b.gaps().unwrap());
        expected.sort_unstable();
        expected.dedup();
        assert_eq!(s.gaps().unwrap(), expected);
    }

    #[test]
    fn intersect_scale_with_scaling() {
        // Members of <2,3> ∩ <3,4> that are multiples of 5, divided by 5.
        let s = intersect_scale(&[cone("<2,3>"), cone("<3,4>")], 5).unwrap();
        for x in 0..60u64 {
            let expected = cone("<2,3>").contains(5 * x) && cone("<3,4>").contains(5 * x);
            assert_eq!(s.contains(x), expected, "at {x}");
        }
    }

    #[test]
    fn state_is_x_over_u() {
        let c = cone("<2,5>");
        assert_eq!(c.state(2, 5).unwrap(), BigRational::new(5.into(), 2.into()));
        assert_eq!(c.state(5, 5).unwrap(), BigRational::from_integer(1.into()));
        assert_eq!(c.state(2, 0).unwrap(), BigRational::from_integer(0.into()));
        assert!(c.state(0, 1).is_err());
        assert!(c.state(3, 1).is_err());
    }

    #[test]
    fn layered_agrees_with_flat_expansion() {
        let layered: LayeredCone = "5*<2,5>+6*<6,161>".parse().unwrap();
        assert!(matches!(layered, LayeredCone::Layered(_)));
        let flat = layered.expand_flat().unwrap();
        assert_eq!(flat.generators(), &[10, 25, 36, 966]);
        let conductor = layered.conductor().unwrap().to_u64().unwrap();
        assert_eq!(conductor, 160);
        for x in 0..=2 * conductor {
            assert_eq!(
                layered.contains(&BigUint::from(x)),
                flat.contains(x),
                "mismatch at {x}"
            );
        }
    }

    #[test]
    fn cone_literal_round_trip_and_errors() {
        assert_eq!(cone("<2,5>").to_string(), "<2,5>");
        let layered: LayeredCone = "5*<2,5>+6*<6,161>".parse().unwrap();
        assert_eq!(layered.to_string(), "5*<2,5>+6*<6,161>");
        assert!("<2,>".parse::<IntegerCone>().is_err());
        assert!("<>".parse::<IntegerCone>().is_err());
        assert!("<0>".parse::<IntegerCone>().is_err());
        assert!("2,5".parse::<IntegerCone>().is_err());
    }
}
