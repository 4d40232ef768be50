//! Multiplication maps between simple components, exact order-embedding
//! decisions, directed systems, and commutative grids.
//!
//! A positive map `×r : (ℤ, S) → (ℤ, T)` is an order-embedding iff
//! `r·x ∈ T ⟺ x ∈ S` for every `x ≥ 0`. Beyond
//! `max(N_S, ⌈N_T/r⌉)` both sides hold automatically, so the property is
//! decidable. Two exact deciders are provided: a residue-class comparison
//! (membership thresholds per congruence class, O(lcm of the least
//! generators) independent of the conductors) and plain enumeration up to the
//! conductor bound. Layered cones only support the enumeration route.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::intcone::{combine, IntegerCone, LayeredCone};
use crate::{Error, Result};

/// Outcome of an embedding check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingDecision {
    /// Holds for every `x ≥ 0`.
    Proved { method: &'static str },
    /// Fails; the witness satisfies exactly one of `x ∈ S`, `r·x ∈ T`.
    Refuted { witness: BigUint },
    /// Only examined up to `bound`; the conductor-derived bound was out of
    /// reach of the configured work limit.
    CheckedToBound { bound: u64 },
}

impl EmbeddingDecision {
    pub fn is_proved(&self) -> bool {
        matches!(self, EmbeddingDecision::Proved { .. })
    }
    pub fn is_refuted(&self) -> bool {
        matches!(self, EmbeddingDecision::Refuted { .. })
    }
}

impl fmt::Display for EmbeddingDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbeddingDecision::Proved { method } => write!(f, "proved ({method})"),
            EmbeddingDecision::Refuted { witness } => write!(f, "refuted (witness {witness})"),
            EmbeddingDecision::CheckedToBound { bound } => {
                write!(f, "verified_to_bound ({bound})")
            }
        }
    }
}

/// A multiplication map between simple components. Positivity
/// (`multiplier·g ∈ target` for every source generator) is checked at
/// construction.
#[derive(Debug, Clone)]
pub struct MultiplicationMap {
    pub multiplier: u64,
    pub source: Arc<IntegerCone>,
    pub target: Arc<IntegerCone>,
}

impl MultiplicationMap {
    pub fn new(
        multiplier: u64,
        source: Arc<IntegerCone>,
        target: Arc<IntegerCone>,
    ) -> Result<Self> {
        if multiplier == 0 {
            return Err(Error::Precondition("multiplier must be positive".into()));
        }
        for &g in source.generators() {
            let image = g
                .checked_mul(multiplier)
                .ok_or_else(|| Error::Overflow(format!("{multiplier}*{g} exceeds u64")))?;
            if !target.contains(image) {
                return Err(Error::Precondition(format!(
                    "map is not positive: {multiplier}*{g} = {image} is outside the target"
                )));
            }
        }
        Ok(MultiplicationMap { multiplier, source, target })
    }
}

/// Largest residue-class period the class decider will enumerate.
const CLASS_LIMIT: u64 = 1 << 22;

/// Exact order-embedding decision for a map between flat simple cones.
///
/// Tries the residue-class comparison first and falls back to enumeration up
/// to `max(N_S, ⌈N_T/r⌉)`; `work_limit` caps the fallback.
pub fn decide_order_embedding(map: &MultiplicationMap, work_limit: u64) -> Result<EmbeddingDecision> {
    if !map.source.is_simple() || !map.target.is_simple() {
        return Err(Error::Precondition(
            "order-embedding decision needs simple cones".into(),
        ));
    }
    let r = map.multiplier;
    let (ms, ap_s) = map.source.residue_table()?;
    let (mt, ap_t) = map.target.residue_table()?;
    let period_t = mt / r.gcd(&mt);
    let l = (ms as u128).lcm(&(period_t as u128));
    if l <= CLASS_LIMIT as u128 {
        let l = l as u64;
        let mut witness: Option<u128> = None;
        for rho in 0..l {
            let ts = ap_s[(rho % ms) as usize] as u128;
            let image_residue = ((rho as u128) * (r as u128) % (mt as u128)) as usize;
            let tt = (ap_t[image_residue] as u128).div_ceil(r as u128);
            let first_s = first_in_class(rho as u128, l as u128, ts);
            let first_t = first_in_class(rho as u128, l as u128, tt);
            if first_s != first_t {
                let w = first_s.min(first_t);
                if witness.map(|cur| w < cur).unwrap_or(true) {
                    witness = Some(w);
                }
            }
        }
        return Ok(match witness {
            None => EmbeddingDecision::Proved { method: "residue-class thresholds" },
            Some(w) => EmbeddingDecision::Refuted { witness: BigUint::from(w) },
        });
    }
    let bound = map.source.conductor()?.max(map.target.conductor()?.div_ceil(r));
    let scan_to = bound.min(work_limit);
    for x in 0..=scan_to {
        if map.source.contains(x) != map.target.contains(x * r) {
            return Ok(EmbeddingDecision::Refuted { witness: BigUint::from(x) });
        }
    }
    if scan_to < bound {
        Ok(EmbeddingDecision::CheckedToBound { bound: scan_to })
    } else {
        Ok(EmbeddingDecision::Proved { method: "enumeration to conductor bound" })
    }
}

fn first_in_class(rho: u128, l: u128, threshold: u128) -> u128 {
    if threshold <= rho {
        rho
    } else {
        rho + l * (threshold - rho).div_ceil(l)
    }
}

/// Boolean form of the exact decision.
pub fn is_order_embedding(map: &MultiplicationMap) -> Result<bool> {
    match decide_order_embedding(map, u64::MAX)? {
        EmbeddingDecision::Proved { .. } => Ok(true),
        EmbeddingDecision::Refuted { .. } => Ok(false),
        EmbeddingDecision::CheckedToBound { .. } => unreachable!("uncapped scan"),
    }
}

/// Embedding check between layered cones by enumeration. The bound is
/// conductor-derived exactly as in the flat case; when it exceeds
/// `work_limit` the scan stops there and says so.
pub fn decide_layered_embedding(
    multiplier: &BigUint,
    source: &LayeredCone,
    target: &LayeredCone,
    work_limit: u64,
) -> Result<EmbeddingDecision> {
    if !source.is_simple()? || !target.is_simple()? {
        return Err(Error::Precondition(
            "order-embedding decision needs simple cones".into(),
        ));
    }
    let n_s = source.conductor()?;
    let n_t = target.conductor()?;
    let bound_big = n_s.max(n_t.div_ceil(multiplier));
    let (scan_to, capped) = match bound_big.to_u64() {
        Some(b) if b <= work_limit => (b, false),
        _ => (work_limit, true),
    };
    for x in 0..=scan_to {
        let x_big = BigUint::from(x);
        if source.contains(&x_big) != target.contains(&(&x_big * multiplier)) {
            return Ok(EmbeddingDecision::Refuted { witness: x_big });
        }
    }
    if capped {
        Ok(EmbeddingDecision::CheckedToBound { bound: scan_to })
    } else {
        Ok(EmbeddingDecision::Proved { method: "enumeration to conductor bound" })
    }
}

/// An element of the limit of a directed system: a stage index and an integer
/// value at that stage. `(i, v)` is identified with
/// `(i+k, v·∏ intervening multipliers)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitElement {
    pub stage: usize,
    pub value: BigUint,
}

impl LimitElement {
    pub fn new(stage: usize, value: impl Into<BigUint>) -> Self {
        LimitElement { stage, value: value.into() }
    }
}

impl fmt::Display for LimitElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(stage {}, value {})", self.stage, self.value)
    }
}

/// One connecting map of a directed system, with its embedding decision.
#[derive(Debug, Clone)]
pub struct SystemMap {
    pub multiplier: u64,
    pub decision: EmbeddingDecision,
}

/// A sequence of simple components joined by multiplication maps. Immutable
/// after construction; `verified` means every connecting map is a proved
/// order-embedding, which is what makes limit queries reduce to stage
/// queries.
#[derive(Debug, Clone)]
pub struct DirectedSystem {
    stages: Vec<Arc<IntegerCone>>,
    maps: Vec<SystemMap>,
}

impl DirectedSystem {
    /// Assembles a system, deciding every connecting map.
    pub fn from_parts(
        stages: Vec<Arc<IntegerCone>>,
        multipliers: Vec<u64>,
        work_limit: u64,
    ) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::Precondition("system needs at least one stage".into()));
        }
        if multipliers.len() + 1 != stages.len() {
            return Err(Error::Precondition(format!(
                "{} stages need {} multipliers, got {}",
                stages.len(),
                stages.len() - 1,
                multipliers.len()
            )));
        }
        let mut maps = Vec::with_capacity(multipliers.len());
        for (i, &m) in multipliers.iter().enumerate() {
            let map = MultiplicationMap::new(m, stages[i].clone(), stages[i + 1].clone())?;
            let decision = decide_order_embedding(&map, work_limit)?;
            maps.push(SystemMap { multiplier: m, decision });
        }
        Ok(DirectedSystem { stages, maps })
    }

    pub fn truncation(&self) -> usize {
        self.stages.len()
    }

    pub fn stage(&self, i: usize) -> Option<&Arc<IntegerCone>> {
        self.stages.get(i)
    }

    pub fn stages(&self) -> &[Arc<IntegerCone>] {
        &self.stages
    }

    pub fn maps(&self) -> &[SystemMap] {
        &self.maps
    }

    pub fn is_verified(&self) -> bool {
        self.maps.iter().all(|m| m.decision.is_proved())
    }

    /// Product of the multipliers carrying stage `from` to stage `to`.
    pub fn multiplier_product(&self, from: usize, to: usize) -> Result<BigUint> {
        if from > to || to > self.maps.len() {
            return Err(Error::Precondition(format!(
                "no path from stage {from} to stage {to}"
            )));
        }
        let mut acc = BigUint::from(1u32);
        for map in &self.maps[from..to] {
            acc *= BigUint::from(map.multiplier);
        }
        Ok(acc)
    }

    /// Representative of a limit element at a later stage.
    pub fn lift(&self, e: &LimitElement, to_stage: usize) -> Result<LimitElement> {
        let factor = self.multiplier_product(e.stage, to_stage)?;
        Ok(LimitElement { stage: to_stage, value: &e.value * factor })
    }
}

/// Positivity of a limit element. Valid because order-embeddings make
/// limit-positivity equivalent to positivity at the element's own stage; an
/// unverified system would only give a one-sided answer, so it is refused.
pub fn limit_contains(sys: &DirectedSystem, e: &LimitElement) -> Result<bool> {
    if e.stage >= sys.truncation() {
        return Err(Error::Precondition(format!(
            "stage {} beyond truncation {}",
            e.stage,
            sys.truncation()
        )));
    }
    if !sys.is_verified() {
        return Err(Error::Unverified(
            "limit membership needs every connecting map proved".into(),
        ));
    }
    Ok(sys.stages[e.stage].contains_big(&e.value))
}

/// The row `G_0⁺ = A`, `G_i⁺ = r·G_{i−1}⁺ + s^i·B` with connecting maps `×r`.
/// Errors if any embedding check fails, which signals invalid parameters.
pub fn build_row(
    a: &IntegerCone,
    b: &IntegerCone,
    r: u64,
    s: u64,
    n_stages: usize,
    work_limit: u64,
) -> Result<DirectedSystem> {
    if r.gcd(&s) != 1 {
        return Err(Error::Precondition(format!("gcd(r,s) = gcd({r},{s}) must be 1")));
    }
    if !a.is_simple() || !b.is_simple() {
        return Err(Error::Precondition("row endpoints must be simple cones".into()));
    }
    let mut stages: Vec<Arc<IntegerCone>> = vec![Arc::new(a.clone())];
    let mut s_power = 1u64;
    for i in 1..=n_stages {
        s_power = s_power
            .checked_mul(s)
            .ok_or_else(|| Error::Overflow(format!("s^{i} exceeds u64")))?;
        let next = combine(r, stages.last().unwrap(), s_power, b)?;
        stages.push(Arc::new(next));
    }
    let system = DirectedSystem::from_parts(stages, vec![r; n_stages], work_limit)?;
    if let Some(bad) = system.maps.iter().position(|m| m.decision.is_refuted()) {
        return Err(Error::Precondition(format!(
            "row map at stage {bad} is not an order-embedding: {}",
            system.maps[bad].decision
        )));
    }
    Ok(system)
}

/// Which recurrence a grid was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Cons,
    ErtoremaBlock,
    Laleche,
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridKind::Cons => write!(f, "cons"),
            GridKind::ErtoremaBlock => write!(f, "ertorema_block"),
            GridKind::Laleche => write!(f, "laleche"),
        }
    }
}

/// Boundary data for [`build_grid`].
pub enum GridParams {
    /// Top row is the `(q1, p1)` ladder over `A = ⟨q1, p1−q1⟩`, left column
    /// the `(q2, p2)` ladder over `B1 = ⟨q2, p2−q2⟩` from the same corner.
    Cons { q1: u64, p1: u64, q2: u64, p2: u64 },
    /// Explicit top row with one constant horizontal multiplier; left column
    /// a `(q, p)` ladder from the corner.
    BlockLeft { top: Vec<Arc<IntegerCone>>, top_mult: u64, q: u64, p: u64 },
    /// Both boundaries explicit, with per-step multipliers.
    Explicit {
        top: Vec<Arc<IntegerCone>>,
        top_mults: Vec<u64>,
        left: Vec<Arc<IntegerCone>>,
        left_mults: Vec<u64>,
    },
}

/// Result of checking one grid edge.
#[derive(Debug, Clone)]
pub struct EdgeReport {
    pub row: usize,
    pub col: usize,
    /// 'h' for the map to `(row, col+1)`, 'v' for the map to `(row+1, col)`.
    pub direction: char,
    pub multiplier: u64,
    pub decision: EmbeddingDecision,
}

/// A `(rows+1) × (cols+1)` array of simple components satisfying a combine
/// recurrence, every edge decided at construction.
pub struct Grid {
    pub kind: GridKind,
    cells: Vec<Vec<Arc<IntegerCone>>>,
    row_mults: Vec<u64>,
    col_mults: Vec<u64>,
    edge_reports: Vec<EdgeReport>,
}

fn block_ladder_cone(q: u64, p: u64, label: &str) -> Result<IntegerCone> {
    if q < 2 || p <= 2 * q {
        return Err(Error::Precondition(format!(
            "{label}: need 1 < q < p-q, got q={q}, p={p}"
        )));
    }
    if q.gcd(&p) != 1 {
        return Err(Error::Precondition(format!("{label}: gcd({q},{p}) must be 1")));
    }
    IntegerCone::new(vec![q, p - q])
}

/// Materializes the grid of the requested kind, checks every horizontal and
/// vertical map, and errors on gcd violations or a refuted embedding.
/// Interior cells satisfy `G_{i,j} = v_i·G_{i−1,j} + h_j·G_{i,j−1}` and are
/// kept minimized to control generator growth.
pub fn build_grid(
    kind: GridKind,
    params: GridParams,
    rows: usize,
    cols: usize,
    work_limit: u64,
) -> Result<Grid> {
    let (top, row_mults, left, col_mults) = match params {
        GridParams::Cons { q1, p1, q2, p2 } => {
            let a = block_ladder_cone(q1, p1, "top ladder")?;
            let b1 = block_ladder_cone(q2, p2, "left ladder")?;
            if q2.gcd(&q1) != 1 {
                return Err(Error::Precondition(format!(
                    "vertical multiplier {q2} must be coprime with horizontal {q1}"
                )));
            }
            if !a.contains(p2) {
                return Err(Error::Precondition(format!(
                    "p2 = {p2} must lie in the corner cone {a}"
                )));
            }
            let top_row = build_row(&a, &a, q1, p1, cols, work_limit)?;
            let left_col = build_row(&a, &b1, q2, p2, rows, work_limit)?;
            (
                top_row.stages().to_vec(),
                vec![q1; cols],
                left_col.stages().to_vec(),
                vec![q2; rows],
            )
        }
        GridParams::BlockLeft { top, top_mult, q, p } => {
            if top.len() != cols + 1 {
                return Err(Error::Precondition(format!(
                    "top row needs {} cones, got {}",
                    cols + 1,
                    top.len()
                )));
            }
            let b = block_ladder_cone(q, p, "left ladder")?;
            if q.gcd(&top_mult) != 1 {
                return Err(Error::Precondition(format!(
                    "vertical multiplier {q} must be coprime with horizontal {top_mult}"
                )));
            }
            if !top[0].contains(p) {
                return Err(Error::Precondition(format!(
                    "p = {p} must lie in the corner cone {}",
                    top[0]
                )));
            }
            let left_col = build_row(&top[0], &b, q, p, rows, work_limit)?;
            (top, vec![top_mult; cols], left_col.stages().to_vec(), vec![q; rows])
        }
        GridParams::Explicit { top, top_mults, left, left_mults } => {
            if top.len() != cols + 1 || top_mults.len() != cols {
                return Err(Error::Precondition("top boundary sizes inconsistent".into()));
            }
            if left.len() != rows + 1 || left_mults.len() != rows {
                return Err(Error::Precondition("left boundary sizes inconsistent".into()));
            }
            if !top[0].same_cone(&left[0]) {
                return Err(Error::Precondition("boundary corners disagree".into()));
            }
            for &v in &left_mults {
                for &h in &top_mults {
                    if v.gcd(&h) != 1 {
                        return Err(Error::Precondition(format!(
                            "gcd({v},{h}) must be 1 across the grid"
                        )));
                    }
                }
            }
            (top, top_mults, left, left_mults)
        }
    };

    let mut cells: Vec<Vec<Arc<IntegerCone>>> = vec![top];
    for i in 1..=rows {
        let mut row: Vec<Arc<IntegerCone>> = vec![left[i].clone()];
        for j in 1..=cols {
            let above = &cells[i - 1][j];
            let before = &row[j - 1];
            let cell = combine(col_mults[i - 1], above, row_mults[j - 1], before)?.minimized();
            row.push(Arc::new(cell));
        }
        cells.push(row);
    }

    let mut edge_reports = Vec::new();
    for i in 0..=rows {
        for j in 0..cols {
            let map = MultiplicationMap::new(row_mults[j], cells[i][j].clone(), cells[i][j + 1].clone())?;
            let decision = decide_order_embedding(&map, work_limit)?;
            edge_reports.push(EdgeReport {
                row: i,
                col: j,
                direction: 'h',
                multiplier: row_mults[j],
                decision,
            });
        }
    }
    for i in 0..rows {
        for j in 0..=cols {
            let map = MultiplicationMap::new(col_mults[i], cells[i][j].clone(), cells[i + 1][j].clone())?;
            let decision = decide_order_embedding(&map, work_limit)?;
            edge_reports.push(EdgeReport {
                row: i,
                col: j,
                direction: 'v',
                multiplier: col_mults[i],
                decision,
            });
        }
    }
    if let Some(bad) = edge_reports.iter().find(|e| e.decision.is_refuted()) {
        return Err(Error::Precondition(format!(
            "grid edge ({},{},{}) is not an order-embedding: {}",
            bad.row, bad.col, bad.direction, bad.decision
        )));
    }

    Ok(Grid { kind, cells, row_mults, col_mults, edge_reports })
}

impl Grid {
    pub fn rows(&self) -> usize {
        self.cells.len() - 1
    }
    pub fn cols(&self) -> usize {
        self.cells[0].len() - 1
    }
    pub fn cell(&self, i: usize, j: usize) -> &Arc<IntegerCone> {
        &self.cells[i][j]
    }
    pub fn row_multipliers(&self) -> &[u64] {
        &self.row_mults
    }
    pub fn col_multipliers(&self) -> &[u64] {
        &self.col_mults
    }
    pub fn edge_reports(&self) -> &[EdgeReport] {
        &self.edge_reports
    }

    /// Both path multipliers around each unit square; they must agree as
    /// integers for the diagram to commute.
    pub fn square_products(&self) -> Vec<(usize, usize, u64, u64)> {
        let mut out = Vec::new();
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let right_then_down = self.row_mults[j].checked_mul(self.col_mults[i]);
                let down_then_right = self.col_mults[i].checked_mul(self.row_mults[j]);
                out.push((
                    i,
                    j,
                    right_then_down.expect("square product fits u64"),
                    down_then_right.expect("square product fits u64"),
                ));
            }
        }
        out
    }

    /// The diagonal `G_{i,i}` with step multipliers
    /// `row_mult[i]·col_mult[i]`, decided directly as its own system.
    pub fn diagonal_system(&self, work_limit: u64) -> Result<DirectedSystem> {
        let n = self.rows().min(self.cols());
        let stages: Vec<Arc<IntegerCone>> = (0..=n).map(|i| self.cells[i][i].clone()).collect();
        let mut mults = Vec::with_capacity(n);
        for i in 0..n {
            let m = self.row_mults[i]
                .checked_mul(self.col_mults[i])
                .ok_or_else(|| Error::Overflow("diagonal multiplier exceeds u64".into()))?;
            mults.push(m);
        }
        DirectedSystem::from_parts(stages, mults, work_limit)
    }

    /// Composite map from a top-row stage to the same-index diagonal stage
    /// (the vertical multipliers accumulated down to the diagonal).
    pub fn top_to_diagonal_multiplier(&self, stage: usize) -> Result<u64> {
        let mut acc = 1u64;
        for i in 0..stage {
            acc = acc
                .checked_mul(self.col_mults[i])
                .ok_or_else(|| Error::Overflow("vertical product exceeds u64".into()))?;
        }
        Ok(acc)
    }

    /// Composite map from a left-column stage to the same-index diagonal
    /// stage (the horizontal multipliers accumulated to the right).
    pub fn left_to_diagonal_multiplier(&self, stage: usize) -> Result<u64> {
        let mut acc = 1u64;
        for j in 0..stage {
            acc = acc
                .checked_mul(self.row_mults[j])
                .ok_or_else(|| Error::Overflow("horizontal product exceeds u64".into()))?;
        }
        Ok(acc)
    }
}

/// A stagewise morphism between two directed systems: stage `j` of the source
/// maps into stage `j` of the target by `×multipliers[j]`. Verification
/// checks each stage map and that every square with the systems' own maps
/// commutes (equal multiplier products).
pub struct SystemMorphism {
    pub source: Arc<DirectedSystem>,
    pub target: Arc<DirectedSystem>,
    multipliers: Vec<u64>,
    stage_decisions: Vec<EmbeddingDecision>,
}

impl SystemMorphism {
    pub fn new(
        source: Arc<DirectedSystem>,
        target: Arc<DirectedSystem>,
        multipliers: Vec<u64>,
        work_limit: u64,
    ) -> Result<Self> {
        let n = multipliers.len();
        if n > source.truncation() || n > target.truncation() {
            return Err(Error::Precondition(
                "morphism longer than the systems it connects".into(),
            ));
        }
        for j in 0..n.saturating_sub(1) {
            let lhs = (multipliers[j + 1] as u128) * (source.maps()[j].multiplier as u128);
            let rhs = (target.maps()[j].multiplier as u128) * (multipliers[j] as u128);
            if lhs != rhs {
                return Err(Error::Precondition(format!(
                    "morphism square at stage {j} does not commute: {lhs} != {rhs}"
                )));
            }
        }
        let mut stage_decisions = Vec::with_capacity(n);
        for (j, &m) in multipliers.iter().enumerate() {
            let map = MultiplicationMap::new(
                m,
                source.stages()[j].clone(),
                target.stages()[j].clone(),
            )?;
            stage_decisions.push(decide_order_embedding(&map, work_limit)?);
        }
        Ok(SystemMorphism { source, target, multipliers, stage_decisions })
    }

    pub fn is_verified(&self) -> bool {
        self.stage_decisions.iter().all(|d| d.is_proved())
    }

    pub fn stage_decisions(&self) -> &[EmbeddingDecision] {
        &self.stage_decisions
    }

    pub fn apply(&self, e: &LimitElement) -> Result<LimitElement> {
        let m = self
            .multipliers
            .get(e.stage)
            .ok_or_else(|| Error::Precondition(format!("stage {} beyond morphism", e.stage)))?;
        Ok(LimitElement { stage: e.stage, value: &e.value * BigUint::from(*m) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn cone(s: &str) -> Arc<IntegerCone> {
        Arc::new(s.parse().unwrap())
    }

    fn decide(m: u64, src: &str, tgt: &str) -> EmbeddingDecision {
        let map = MultiplicationMap::new(m, cone(src), cone(tgt)).unwrap();
        decide_order_embedding(&map, u64::MAX).unwrap()
    }

    #[test]
    fn embedding_examples() {
        assert!(decide(2, "<2,5>", "<4,10,14,35>").is_proved());
        match decide(2, "<2,5>", "<2,5>") {
            EmbeddingDecision::Refuted { witness } => {
                let w = witness.to_u64().unwrap();
                // Exactly one side of the equivalence holds at the witness.
                let src: IntegerCone = "<2,5>".parse().unwrap();
                assert_ne!(src.contains(w), src.contains(2 * w));
            }
            other => panic!("expected refutation, got {other:?}"),
        }
        assert!(decide(1, "<2,5>", "<2,5>").is_proved());
    }

    #[test]
    fn class_decider_agrees_with_enumeration_oracle() {
        let cases = [
            (2, "<2,5>", "<4,10,14,35>"),
            (2, "<2,5>", "<2,5>"),
            (3, "<2,5>", "<6,15,30,70>"),
            (3, "<2,5>", "<6,15,21,28>"),
            (5, "<2,3>", "<10,15,21,276>"),
            (7, "<3,4>", "<3,4>"),
            (1, "<6,10,15>", "<6,10,15>"),
        ];
        for (m, s, t) in cases {
            let src: IntegerCone = s.parse().unwrap();
            let tgt: IntegerCone = t.parse().unwrap();
            let bound = src.conductor().unwrap().max(tgt.conductor().unwrap()) * 2 + 10;
            let oracle_witness =
                oracle::embedding_counterexample(m, src.generators(), tgt.generators(), bound);
            match MultiplicationMap::new(m, Arc::new(src), Arc::new(tgt)) {
                Ok(map) => {
                    let decision = decide_order_embedding(&map, u64::MAX).unwrap();
                    match decision {
                        EmbeddingDecision::Proved { .. } => {
                            assert_eq!(oracle_witness, None, "{m} {s} {t}")
                        }
                        EmbeddingDecision::Refuted { .. } => {
                            assert!(oracle_witness.is_some(), "{m} {s} {t}")
                        }
                        _ => unreachable!(),
                    }
                }
                Err(_) => {
                    // Map not even positive; the oracle must find a mismatch
                    // somewhere too (a source generator failing).
                    assert!(oracle_witness.is_some(), "{m} {s} {t}");
                }
            }
        }
    }

    #[test]
    fn build_row_matches_expected_stages() {
        let sys = build_row(
            &"<2,5>".parse().unwrap(),
            &"<3,7>".parse().unwrap(),
            3,
            10,
            2,
            u64::MAX,
        )
        .unwrap();
        assert_eq!(sys.stage(0).unwrap().generators(), &[2, 5]);
        assert_eq!(sys.stage(1).unwrap().generators(), &[6, 15, 30, 70]);
        assert_eq!(sys.stage(2).unwrap().generators(), &[18, 45, 90, 210, 300, 700]);
        assert!(sys.is_verified());
        for stage in sys.stages() {
            assert!(stage.is_simple());
        }

        let one_step = build_row(
            &"<2,5>".parse().unwrap(),
            &"<2,5>".parse().unwrap(),
            2,
            7,
            1,
            u64::MAX,
        )
        .unwrap();
        assert_eq!(one_step.stage(1).unwrap().generators(), &[4, 10, 14, 35]);

        let trivial = build_row(
            &"<2,5>".parse().unwrap(),
            &"<3,7>".parse().unwrap(),
            3,
            10,
            0,
            u64::MAX,
        )
        .unwrap();
        assert_eq!(trivial.truncation(), 1);
    }

    #[test]
    fn limit_membership_is_stagewise() {
        let sys = build_row(
            &"<2,5>".parse().unwrap(),
            &"<3,7>".parse().unwrap(),
            3,
            10,
            2,
            u64::MAX,
        )
        .unwrap();
        assert!(limit_contains(&sys, &LimitElement::new(0, 7u32)).unwrap());
        assert!(!limit_contains(&sys, &LimitElement::new(0, 3u32)).unwrap());
        // Consistency: the images of a non-member stay outside later stages.
        assert!(!limit_contains(&sys, &LimitElement::new(1, 9u32)).unwrap());
        assert!(!limit_contains(&sys, &LimitElement::new(2, 27u32)).unwrap());
        assert!(limit_contains(&sys, &LimitElement::new(1, 0u32)).unwrap());
        assert!(limit_contains(&sys, &LimitElement::new(2, 63u32)).unwrap());
        assert!(limit_contains(&sys, &LimitElement::new(3, 1u32)).is_err());
    }

    #[test]
    fn cons_grid_cell_and_diagonal() {
        let grid = build_grid(
            GridKind::Cons,
            GridParams::Cons { q1: 2, p1: 7, q2: 3, p2: 7 },
            1,
            1,
            u64::MAX,
        )
        .unwrap();
        assert!(grid
            .cell(1, 1)
            .same_cone(&"<12,30,42,56,105>".parse().unwrap()));
        assert_eq!(grid.cell(0, 1).generators(), &[4, 10, 14, 35]);
        assert_eq!(grid.cell(1, 0).generators(), &[6, 15, 21, 28]);
        for e in grid.edge_reports() {
            assert!(e.decision.is_proved(), "edge {e:?}");
        }
        for (_, _, a, b) in grid.square_products() {
            assert_eq!(a, b);
            assert_eq!(a, 6);
        }
        let diag = grid.diagonal_system(u64::MAX).unwrap();
        assert_eq!(diag.truncation(), 2);
        assert_eq!(diag.maps()[0].multiplier, 6);
        assert!(diag.is_verified());
    }

    #[test]
    fn grid_rejects_gcd_violation() {
        let err = build_grid(
            GridKind::Cons,
            GridParams::Cons { q1: 2, p1: 7, q2: 4, p2: 9 },
            1,
            1,
            u64::MAX,
        );
        assert!(err.is_err());
    }

    #[test]
    fn zero_size_grid_is_just_the_corner() {
        let grid = build_grid(
            GridKind::Cons,
            GridParams::Cons { q1: 2, p1: 7, q2: 3, p2: 7 },
            0,
            0,
            u64::MAX,
        )
        .unwrap();
        assert_eq!(grid.rows(), 0);
        assert_eq!(grid.cols(), 0);
        assert_eq!(grid.cell(0, 0).generators(), &[2, 5]);
        let diag = grid.diagonal_system(u64::MAX).unwrap();
        assert_eq!(diag.truncation(), 1);
    }

    #[test]
    fn morphism_from_top_row_to_diagonal() {
        let grid = build_grid(
            GridKind::Cons,
            GridParams::Cons { q1: 2, p1: 7, q2: 3, p2: 7 },
            2,
            2,
            u64::MAX,
        )
        .unwrap();
        let top = Arc::new(
            DirectedSystem::from_parts(
                (0..=2).map(|j| grid.cell(0, j).clone()).collect(),
                vec![2, 2],
                u64::MAX,
            )
            .unwrap(),
        );
        let diag = Arc::new(grid.diagonal_system(u64::MAX).unwrap());
        let mults: Vec<u64> = (0..=2)
            .map(|j| grid.top_to_diagonal_multiplier(j).unwrap())
            .collect();
        assert_eq!(mults, vec![1, 3, 9]);
        let morphism = SystemMorphism::new(top, diag, mults, u64::MAX).unwrap();
        assert!(morphism.is_verified());
        let e = LimitElement::new(1, 7u32 * 7);
        let image = morphism.apply(&e).unwrap();
        assert_eq!(image.value, BigUint::from(147u32));
    }
}
