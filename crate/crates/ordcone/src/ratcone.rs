//! Block monoids: submonoids `M ⊆ ℚ⁺` generated by `k/r` for `k ∈ A` and
//! `(k'/r)(s/r)^n` for `k' ∈ B`, `n ≥ 1`, where `A = ⟨q, p−q⟩` and
//! `B = ⟨r, s−r⟩`.
//!
//! Membership in `M` is decided twice, by two independent procedures:
//!
//! - **direct**: a bounded search over the scaled integer identity
//!   `x·r^{L+1} = k·r^L + Σ k_l·s^l·r^{L−l}`. The level cap is sound because
//!   a nonzero level-`l` term contributes at least `(s/r)^l` (the least
//!   nonzero element of `B` is `r`), so levels with `(s/r)^l > x` are forced
//!   to zero.
//! - **ladder**: membership at the minimal level of the row `G_0⁺ = A`,
//!   `G_i⁺ = r·G_{i−1}⁺ + s^i·B`, whose connecting maps are checked
//!   order-embeddings. A rational with denominator dividing `r^{i+1}` lies in
//!   `M` iff `r^{i+1}·x` lies in `G_i⁺`.
//!
//! The ladder extends lazily and is poisoned permanently if an embedding
//! check ever fails (it cannot, for valid parameters, but soundness beats
//! availability).

use std::collections::HashSet;
use std::sync::{Arc, RwLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::embed::{
    decide_order_embedding, DirectedSystem, EmbeddingDecision, LimitElement, MultiplicationMap,
};
use crate::intcone::{combine, IntegerCone};
use crate::report::Verdict;
use crate::{Error, Result};

/// Work budget for one direct membership decision (search nodes visited).
const DIRECT_WORK_LIMIT: u64 = 200_000_000;

/// The `(q, p, s, r)` data of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockParams {
    pub q: u64,
    pub p: u64,
    pub s: u64,
    pub r: u64,
}

impl std::fmt::Display for BlockParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(q={},p={},s={},r={})", self.q, self.p, self.s, self.r)
    }
}

#[derive(Debug)]
struct LadderState {
    stages: Vec<Arc<IntegerCone>>,
    decisions: Vec<EmbeddingDecision>,
    poisoned: Option<(usize, u64)>,
}

/// A block: the cones `A`, `B` and the lazily extended ladder.
///
/// Immutable except for ladder extension, which is idempotent and atomic per
/// level; membership queries are read-only.
#[derive(Debug)]
pub struct Block {
    params: BlockParams,
    a_cone: Arc<IntegerCone>,
    b_cone: Arc<IntegerCone>,
    ladder: RwLock<LadderState>,
}

/// Validates the block axioms and builds the cones. Every violated
/// constraint is reported, not just the first.
pub fn new_block(q: u64, p: u64, s: u64, r: u64) -> Result<Block> {
    let mut violations = Vec::new();
    if q < 2 {
        violations.push(format!("1 < q fails (q={q})"));
    }
    if p <= 2 * q {
        violations.push(format!("q < p-q fails (q={q}, p={p})"));
    }
    if q.gcd(&p) != 1 {
        violations.push(format!("gcd(q,p) != 1 (gcd({q},{p})={})", q.gcd(&p)));
    }
    if s == 0 {
        violations.push("s = 0".into());
    }
    if r < 2 {
        violations.push(format!("1 < r fails (r={r})"));
    }
    if s <= 2 * r {
        violations.push(format!("r < s-r fails (r={r}, s={s})"));
    }
    if r.gcd(&s) != 1 {
        violations.push(format!("gcd(r,s) != 1 (gcd({r},{s})={})", r.gcd(&s)));
    }
    if !violations.is_empty() {
        return Err(Error::BlockParams(violations));
    }
    let a_cone = IntegerCone::new(vec![q, p - q])?;
    if !a_cone.contains(s) {
        return Err(Error::BlockParams(vec![format!("s not in A ({s} outside {a_cone})")]));
    }
    let b_cone = IntegerCone::new(vec![r, s - r])?;
    let a_cone = Arc::new(a_cone);
    let ladder = RwLock::new(LadderState {
        stages: vec![a_cone.clone()],
        decisions: Vec::new(),
        poisoned: None,
    });
    Ok(Block {
        params: BlockParams { q, p, s, r },
        a_cone,
        b_cone: Arc::new(b_cone),
        ladder,
    })
}

impl Block {
    pub fn params(&self) -> BlockParams {
        self.params
    }
    pub fn a_cone(&self) -> &Arc<IntegerCone> {
        &self.a_cone
    }
    pub fn b_cone(&self) -> &Arc<IntegerCone> {
        &self.b_cone
    }

    /// `e_n = (s/r)^n`, exactly.
    pub fn e(&self, n: u32) -> BigRational {
        BigRational::new(
            BigInt::from(self.params.s).pow(n),
            BigInt::from(self.params.r).pow(n),
        )
    }

    /// Direct membership decision. Negative inputs are simply non-members.
    pub fn contains_direct(&self, x: &BigRational) -> Result<bool> {
        if x.is_negative() {
            return Ok(false);
        }
        if x.is_zero() {
            return Ok(true);
        }
        let r = self.params.r;
        let s = self.params.s;
        let den = x.denom().to_biguint().expect("canonical denominator");
        if !divides_some_power(&den, r) {
            return Ok(false);
        }
        // Level cap: largest L with (s/r)^L <= x.
        let num = x.numer().to_biguint().expect("non-negative numerator");
        let mut level_cap = 0u32;
        let (mut s_pow, mut r_pow) = (BigUint::one(), BigUint::one());
        loop {
            let next_s = &s_pow * s;
            let next_r = &r_pow * r;
            if &next_s * &den <= &num * &next_r {
                s_pow = next_s;
                r_pow = next_r;
                level_cap += 1;
            } else {
                break;
            }
        }
        // Denominator must divide r^{L+1}; members have no finer structure.
        let r_top = &r_pow * r;
        if !(&r_top % &den).is_zero() {
            return Ok(false);
        }
        let target = num * (&r_top / &den);
        let mut search = DirectSearch::new(self, level_cap, DIRECT_WORK_LIMIT);
        search.run(level_cap, target)
    }

    /// Ladder membership decision: find the minimal level whose scaling
    /// clears the denominator and test there.
    pub fn contains_ladder(&self, x: &BigRational) -> Result<bool> {
        if x.is_negative() {
            return Ok(false);
        }
        if x.is_zero() {
            return Ok(true);
        }
        let r = self.params.r;
        let den = x.denom().to_biguint().expect("canonical denominator");
        if !divides_some_power(&den, r) {
            return Ok(false);
        }
        let mut power = 1u32;
        let mut acc = BigUint::from(r);
        while !(&acc % &den).is_zero() {
            acc *= r;
            power += 1;
        }
        let level = (power - 1) as usize;
        let stage = self.ladder_stage(level)?;
        let value = (x * BigRational::from_integer(BigInt::from(acc)))
            .to_integer()
            .to_biguint()
            .expect("scaled value is a non-negative integer");
        Ok(stage.contains_big(&value))
    }

    /// The ladder stage `G_i⁺`, extending lazily. Extension decides each new
    /// connecting map; a refuted map poisons the block.
    pub fn ladder_stage(&self, level: usize) -> Result<Arc<IntegerCone>> {
        {
            let state = self.ladder.read().expect("ladder lock");
            if let Some((lvl, witness)) = state.poisoned {
                return Err(Error::Poisoned { level: lvl, witness });
            }
            if state.stages.len() > level {
                return Ok(state.stages[level].clone());
            }
        }
        let mut state = self.ladder.write().expect("ladder lock");
        while state.stages.len() <= level {
            let next_level = state.stages.len();
            let s_pow = self
                .params
                .s
                .checked_pow(next_level as u32)
                .ok_or_else(|| Error::Overflow(format!("s^{next_level} exceeds u64")))?;
            let prev = state.stages.last().unwrap().clone();
            let next = Arc::new(combine(self.params.r, &prev, s_pow, &self.b_cone)?);
            let map = MultiplicationMap::new(self.params.r, prev, next.clone())?;
            let decision = decide_order_embedding(&map, u64::MAX)?;
            if let EmbeddingDecision::Refuted { witness } = &decision {
                let w = witness.to_u64().unwrap_or(u64::MAX);
                state.poisoned = Some((next_level, w));
                return Err(Error::Poisoned { level: next_level, witness: w });
            }
            state.stages.push(next);
            state.decisions.push(decision);
        }
        Ok(state.stages[level].clone())
    }

    /// The ladder as a directed system truncated at `levels`.
    pub fn ladder_system(&self, levels: usize) -> Result<DirectedSystem> {
        self.ladder_stage(levels)?;
        let state = self.ladder.read().expect("ladder lock");
        DirectedSystem::from_parts(
            state.stages[..=levels].to_vec(),
            vec![self.params.r; levels],
            u64::MAX,
        )
    }

    /// The representative of a rational in the ladder limit: minimal stage
    /// `i` with `r^{i+1}·x` integral, and that integer as the value.
    pub fn lift_to_ladder(&self, x: &BigRational) -> Result<LimitElement> {
        if x.is_negative() {
            return Err(Error::Precondition(format!("{x} is negative")));
        }
        let r = self.params.r;
        let den = x.denom().to_biguint().expect("canonical denominator");
        if !divides_some_power(&den, r) {
            return Err(Error::Precondition(format!(
                "{x} has a denominator prime outside r={r}"
            )));
        }
        let mut power = 1u32;
        let mut acc = BigUint::from(r);
        while !(&acc % &den).is_zero() {
            acc *= r;
            power += 1;
        }
        let value = (x * BigRational::from_integer(BigInt::from(acc)))
            .to_integer()
            .to_biguint()
            .expect("scaled value is non-negative");
        Ok(LimitElement { stage: (power - 1) as usize, value })
    }
}

/// True iff `den` divides some power of `base`.
fn divides_some_power(den: &BigUint, base: u64) -> bool {
    let mut d = den.clone();
    loop {
        if d.is_one() {
            return true;
        }
        let g = d.gcd(&BigUint::from(base));
        if g.is_one() {
            return false;
        }
        d /= g;
    }
}

/// Depth-first search over the scaled identity, high level first. Per level
/// the coefficient is pinned modulo `r` (dividing the remainder by `r` must
/// stay integral), which prunes the candidate set by a factor of `r`.
struct DirectSearch<'a> {
    block: &'a Block,
    s_powers: Vec<BigUint>,
    s_inv_mod_r: u64,
    work: u64,
    work_limit: u64,
    failed: HashSet<(u32, BigUint)>,
}

impl<'a> DirectSearch<'a> {
    fn new(block: &'a Block, level_cap: u32, work_limit: u64) -> Self {
        let mut s_powers = vec![BigUint::one()];
        for _ in 0..level_cap {
            let next = s_powers.last().unwrap() * block.params.s;
            s_powers.push(next);
        }
        let s_inv_mod_r = mod_inverse(block.params.s % block.params.r, block.params.r)
            .expect("gcd(r,s) = 1");
        DirectSearch {
            block,
            s_powers,
            s_inv_mod_r,
            work: 0,
            work_limit,
            failed: HashSet::new(),
        }
    }

    fn run(&mut self, level: u32, target: BigUint) -> Result<bool> {
        self.work += 1;
        if self.work > self.work_limit {
            return Err(Error::WorkLimit {
                limit: self.work_limit,
                context: "direct membership search".into(),
            });
        }
        if level == 0 {
            // Remaining coefficient must lie in A ∪ {0}.
            return Ok(target.is_zero() || self.block.a_cone.contains_big(&target));
        }
        let key = (level, target.clone());
        if self.failed.contains(&key) {
            return Ok(false);
        }
        let r = self.block.params.r;
        let s_l = self.s_powers[level as usize].clone();
        // k·s^level ≡ target (mod r)  ⇒  k ≡ target·s^{-level} (mod r).
        let target_mod_r = (&target % r).to_u64().unwrap();
        let residue = target_mod_r * pow_mod(self.s_inv_mod_r, level as u64, r) % r;
        let max_k = &target / &s_l;
        let residue_big = BigUint::from(residue);
        if max_k >= residue_big {
            // Largest candidate ≡ residue (mod r), descending by r.
            let steps = (&max_k - &residue_big) / r;
            let mut k = residue_big + steps * r;
            loop {
                let usable = k.is_zero() || self.block.b_cone.contains_big(&k);
                if usable {
                    let rest = &target - &k * &s_l;
                    debug_assert!((&rest % r).is_zero());
                    if self.run(level - 1, rest / r)? {
                        return Ok(true);
                    }
                }
                if k < BigUint::from(r) {
                    break;
                }
                k -= r;
            }
        }
        self.failed.insert(key);
        Ok(false)
    }
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, a as i128);
    while new_r != 0 {
        let quotient = r / new_r;
        (t, new_t) = (new_t, t - quotient * new_t);
        (r, new_r) = (new_r, r - quotient * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(((t % m as i128 + m as i128) % m as i128) as u64)
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    base = 0;
    let _ = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    acc as u64
}

/// Checks `s ∉ t·D` on the prefix `m ≤ level_bound` by testing
/// `t·e_m − s ∉ M`. The full claim quantifies over all `m`; the verdict says
/// how far it was examined.
pub fn check_not_multiple(block: &Block, t: u64, level_bound: u32) -> Result<Verdict> {
    let r = block.params().r;
    if t == 0 || t > r - 1 {
        return Err(Error::Precondition(format!("t must satisfy 1 <= t <= r-1 = {}", r - 1)));
    }
    let s = BigRational::from_integer(BigInt::from(block.params().s));
    let t_big = BigRational::from_integer(BigInt::from(t));
    for m in 1..=level_bound {
        let diff = &t_big * block.e(m) - &s;
        if diff.is_negative() {
            continue;
        }
        if block.contains_direct(&diff)? {
            return Ok(Verdict::refuted(
                format!("m={m}: {t}*e_{m} - s = {diff} lies in M"),
                format!("s is dominated by {t}*e_{m}"),
            ));
        }
    }
    Ok(Verdict::to_bound(
        level_bound as u64,
        format!("{t}*e_m - s outside M for every m <= {level_bound}"),
    ))
}

/// Per-sample witnesses that `r·D` covers the cone: for each sample `x ∈ M`,
/// a `k` with `x ≤_M r·e_k`.
pub struct CoversOutcome {
    pub witnesses: Vec<(BigRational, u32)>,
    pub verdict: Verdict,
}

/// Searches a covering index for every sample, guided first (find `n` with
/// `x ≤ n·e_1`, take `k` with `n < 2^k`, via the doubling inequality
/// `2^k·e_1 ≤ r·e_k`), then exhaustively up to `k_cap`.
pub fn check_covers(block: &Block, samples: &[BigRational], k_cap: u32) -> Result<CoversOutcome> {
    let r_big = BigRational::from_integer(BigInt::from(block.params().r));
    let mut witnesses = Vec::with_capacity(samples.len());
    let mut failed: Option<BigRational> = None;
    for x in samples {
        if !block.contains_direct(x)? {
            return Err(Error::Precondition(format!("sample {x} is not in M")));
        }
        if x.is_zero() {
            witnesses.push((x.clone(), 0));
            continue;
        }
        let mut found = None;
        // Guided: x <= n·e_1 for the first workable n, then 2^k > n.
        let e1 = block.e(1);
        let n_floor = (x / &e1).ceil().to_integer().to_u64().unwrap_or(u64::MAX);
        let n_cap = n_floor.saturating_add(2 * block.params().s + 64);
        let guess_cap = 1u64.checked_shl(k_cap).unwrap_or(u64::MAX);
        for n in n_floor.max(1)..=n_cap.min(guess_cap) {
            let slack = BigRational::from_integer(BigInt::from(n)) * &e1 - x;
            if !slack.is_negative() && block.contains_direct(&slack)? {
                let k = 64 - n.leading_zeros(); // smallest k with 2^k > n
                if k <= k_cap {
                    let diff = &r_big * block.e(k) - x;
                    if !diff.is_negative() && block.contains_direct(&diff)? {
                        found = Some(k);
                    }
                }
                break;
            }
        }
        if found.is_none() {
            for k in 0..=k_cap {
                let diff = &r_big * block.e(k) - x;
                if !diff.is_negative() && block.contains_direct(&diff)? {
                    found = Some(k);
                    break;
                }
            }
        }
        match found {
            Some(k) => witnesses.push((x.clone(), k)),
            None => {
                failed.get_or_insert_with(|| x.clone());
                witnesses.push((x.clone(), u32::MAX));
            }
        }
    }
    let verdict = match failed {
        None => Verdict::proved(format!(
            "every one of the {} samples is dominated by r*e_k for some k <= {k_cap}",
            samples.len()
        )),
        Some(x) => Verdict::to_bound(
            k_cap as u64,
            format!("no covering index below k={k_cap} for sample {x}"),
        ),
    };
    Ok(CoversOutcome { witnesses, verdict })
}

/// The interval `D = ⟨e_n⟩` over a block: generated by `e_1, e_2, …`, a
/// monotone presentation since `e_{n+1} − e_n = (s/r)^n (s−r)/r` lies in `M`.
pub fn interval_d(block: Arc<Block>) -> crate::intervals::Interval {
    crate::intervals::Interval::block_powers(block)
}

/// Parses a rational literal: `a/b` or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        None => (s, "1"),
        Some((n, d)) => (n, d),
    };
    let num: BigInt = num
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let den: BigInt = den
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    fn rational(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn block_3_10() -> Block {
        new_block(2, 7, 10, 3).unwrap()
    }

    fn block_2_7() -> Block {
        new_block(2, 7, 7, 2).unwrap()
    }

    #[test]
    fn new_block_examples() {
        let b = block_2_7();
        assert_eq!(b.a_cone().generators(), &[2, 5]);
        assert_eq!(b.b_cone().generators(), &[2, 5]);
        let b = block_3_10();
        assert_eq!(b.a_cone().generators(), &[2, 5]);
        assert_eq!(b.b_cone().generators(), &[3, 7]);
        assert!(new_block(2, 7, 7, 3).is_ok());
        match new_block(2, 7, 6, 2) {
            Err(Error::BlockParams(violations)) => {
                assert!(violations.iter().any(|v| v.contains("gcd(r,s)")));
            }
            other => panic!("expected parameter violations, got {other:?}"),
        }
    }

    #[test]
    fn e_is_exact_exponentiation() {
        let b = block_3_10();
        assert_eq!(b.e(2), rational("100/9"));
        assert_eq!(b.e(0), rational("1"));
        let b = block_2_7();
        assert_eq!(b.e(3), rational("343/8"));
    }

    #[test]
    fn direct_membership_examples() {
        let b = block_3_10();
        assert!(b.contains_direct(&rational("10/3")).unwrap());
        assert!(!b.contains_direct(&rational("110/9")).unwrap());
        assert!(b.contains_direct(&rational("7/3")).unwrap());
        assert!(!b.contains_direct(&rational("1")).unwrap()); // 3 is outside A
        assert!(b.contains_direct(&rational("0")).unwrap());
        assert!(!b.contains_direct(&rational("1/2")).unwrap()); // denominator prime 2
        let b = block_2_7();
        assert!(b.contains_direct(&rational("7")).unwrap());
        assert!(!b.contains_direct(&rational("-7/2")).unwrap());
    }

    #[test]
    fn ladder_membership_examples() {
        let b = block_3_10();
        assert!(!b.contains_ladder(&rational("110/9")).unwrap());
        assert!(b.contains_ladder(&rational("7/3")).unwrap());
        let b = block_2_7();
        assert!(!b.contains_ladder(&rational("1/2")).unwrap());
        assert_eq!(b.ladder_stage(1).unwrap().generators(), &[4, 10, 14, 35]);
    }

    #[test]
    fn the_two_procedures_agree_on_a_window() {
        let b = block_3_10();
        for a in 0..200u32 {
            for j in 0..=2u32 {
                let x = BigRational::new(a.into(), BigInt::from(3).pow(j));
                let direct = b.contains_direct(&x).unwrap();
                let ladder = b.contains_ladder(&x).unwrap();
                assert_eq!(direct, ladder, "disagreement at {x}");
            }
        }
    }

    #[test]
    fn monotone_difference_of_generators() {
        let b = block_3_10();
        for n in 0..8u32 {
            let diff = b.e(n + 1) - b.e(n);
            assert!(b.contains_direct(&diff).unwrap(), "e_{} - e_{} outside M", n + 1, n);
            assert!(b.contains_ladder(&diff).unwrap());
        }
    }

    #[test]
    fn not_multiple_prefix_and_spot_value() {
        let b = block_3_10();
        let verdict = check_not_multiple(&b, 2, 10).unwrap();
        assert_eq!(verdict.status, Status::VerifiedToBound);
        assert_eq!(verdict.bound, Some(10));
        // Spot value from the t = 2 witness family.
        assert_eq!(
            BigRational::from_integer(2.into()) * b.e(2)
                - BigRational::from_integer(10.into()),
            rational("110/9")
        );
        let b = block_2_7();
        let verdict = check_not_multiple(&b, 1, 10).unwrap();
        assert_eq!(verdict.status, Status::VerifiedToBound);
        assert!(check_not_multiple(&b, 2, 10).is_err()); // t must stay below r
        let b = block_3_10();
        assert!(check_not_multiple(&b, 3, 10).is_err());
    }

    #[test]
    fn covers_examples() {
        let b = block_3_10();
        let out = check_covers(&b, &[rational("2/3")], 8).unwrap();
        assert_eq!(out.witnesses[0].1, 1); // 3e_1 - 2/3 = 28/3 with 28 in A
        let out = check_covers(&b, &[rational("0")], 8).unwrap();
        assert_eq!(out.witnesses[0].1, 0);
        let b = block_2_7();
        let out = check_covers(&b, &[rational("7")], 8).unwrap();
        assert!(out.witnesses[0].1 <= 4);
        assert_eq!(out.verdict.status, Status::Proved);
        assert!(check_covers(&b, &[rational("1/2")], 8).is_err());
    }

    #[test]
    fn lift_to_ladder_sends_e_n_to_s_powers() {
        let b = block_3_10();
        for n in 1..=5u32 {
            let lifted = b.lift_to_ladder(&b.e(n)).unwrap();
            assert_eq!(lifted.stage, (n - 1) as usize);
            assert_eq!(lifted.value, BigUint::from(10u64).pow(n));
        }
    }
}
