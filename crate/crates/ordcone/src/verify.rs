//! The bundled verification suite: one record per criterion, every bound and
//! tolerance pinned here.
//!
//! Repeated runs with the same bounds and seed produce identical records.
//! The fault hook exists so the harness can prove to itself that a flipped
//! answer surfaces as a refutation with a witness and a failing exit code.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::construct::{build_chain, build_laleche, extend_component, find_pcd, residue_coverage};
use crate::embed::{build_grid, GridKind, GridParams, LimitElement, MultiplicationMap};
use crate::intcone::{IntegerCone, LayeredCone};
use crate::intervals::{Element, Interval};
use crate::oracle;
use crate::ratcone::{check_covers, check_not_multiple, new_block};
use crate::report::{Record, Status, Verdict};
use crate::sampling::SampleStream;
use crate::{Result, RunBounds};

/// Deliberate corruptions for the self-test path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip one membership answer inside the dual-oracle comparison.
    FlipMembership,
}

/// Runs every criterion and returns one record per criterion.
pub fn run_all(bounds: &RunBounds, seed: u64, fault: Option<Fault>) -> Result<Vec<Record>> {
    let mut stream = SampleStream::new(seed);
    Ok(vec![
        conductor_closed_form(&mut stream.fork("c01"))?,
        dual_oracle_agreement(&mut stream.fork("c02"), fault)?,
        properness_and_covering(&mut stream.fork("c03"), bounds)?,
        pcd_chooser(&mut stream.fork("c04"))?,
        gap_certificate(bounds)?,
        chain_depth_three(bounds)?,
        embedding_vs_brute_force(&mut stream.fork("c07"))?,
        grid_integrity(&mut stream.fork("c08"), bounds)?,
        unboundedness_probe()?,
    ])
}

/// 200 random coprime pairs `2 <= k < l <= 60`: conductor `kl - k - l + 1`
/// and gap count `(k-1)(l-1)/2`, exactly.
fn conductor_closed_form(stream: &mut SampleStream) -> Result<Record> {
    for _ in 0..200 {
        let (k, l) = stream.coprime_pair(2, 60);
        let cone = IntegerCone::new(vec![k, l])?;
        let profile = cone.analyze()?;
        let expected_conductor = k * l - k - l + 1;
        let expected_genus = (k - 1) * (l - 1) / 2;
        if profile.conductor != Some(expected_conductor) {
            return Ok(Record::new(
                "c01.conductor_closed_form",
                Verdict::refuted(
                    format!("<{k},{l}>"),
                    format!(
                        "conductor {:?} differs from {expected_conductor}",
                        profile.conductor
                    ),
                ),
            ));
        }
        if profile.gaps.as_ref().map(|g| g.len() as u64) != Some(expected_genus) {
            return Ok(Record::new(
                "c01.conductor_closed_form",
                Verdict::refuted(format!("<{k},{l}>"), "gap count mismatch".to_string()),
            ));
        }
    }
    Ok(Record::new(
        "c01.conductor_closed_form",
        Verdict::proved("200 random coprime pairs match kl-k-l+1 and (k-1)(l-1)/2".to_string()),
    ))
}

/// Block `(2,7,10,3)`, 500 rationals `a/3^j` with `j <= 5`,
/// `a <= 100·3^j`: the direct and ladder procedures agree on every input.
fn dual_oracle_agreement(stream: &mut SampleStream, fault: Option<Fault>) -> Result<Record> {
    let block = new_block(2, 7, 10, 3)?;
    let flip_at = match fault {
        Some(Fault::FlipMembership) => Some(250usize),
        None => None,
    };
    for i in 0..500usize {
        let x = stream.rational_with_denominator_power(3, 5, 100);
        let mut direct = block.contains_direct(&x)?;
        if flip_at == Some(i) {
            direct = !direct;
        }
        let ladder = block.contains_ladder(&x)?;
        if direct != ladder {
            return Ok(Record::new(
                "c02.dual_membership_agreement",
                Verdict::refuted(
                    x.to_string(),
                    format!("direct says {direct}, ladder says {ladder}"),
                ),
            ));
        }
    }
    Ok(Record::new(
        "c02.dual_membership_agreement",
        Verdict::proved("500 sampled rationals decided identically by both procedures".to_string()),
    ))
}

/// Block `(3,10)`: `s ∉ t·D` for `t ∈ {1,2}` to level 10 with the spot value
/// `2e_2 − s = 110/9` outside `M`, and `r·D` covers 100 sampled members.
fn properness_and_covering(stream: &mut SampleStream, bounds: &RunBounds) -> Result<Record> {
    let block = new_block(2, 7, 10, 3)?;
    for t in [1u64, 2] {
        let verdict = check_not_multiple(&block, t, 10)?;
        if verdict.status != Status::VerifiedToBound {
            return Ok(Record::new(
                "c03.properness_and_covering",
                Verdict::refuted(format!("t={t}"), verdict.note),
            ));
        }
    }
    let spot = BigRational::from_integer(2.into()) * block.e(2)
        - BigRational::from_integer(10.into());
    let expected = BigRational::new(110.into(), 9.into());
    if spot != expected || block.contains_direct(&spot)? || block.contains_ladder(&spot)? {
        return Ok(Record::new(
            "c03.properness_and_covering",
            Verdict::refuted(spot.to_string(), "spot value 110/9 misbehaved".to_string()),
        ));
    }
    let samples: Vec<BigRational> = (0..100)
        .map(|_| {
            let k = stream.cone_member(block.a_cone(), 4);
            BigRational::new(BigInt::from(k), BigInt::from(3))
        })
        .collect();
    let covers = check_covers(&block, &samples, bounds.level_bound.max(10))?;
    if covers.verdict.status != Status::Proved {
        return Ok(Record::new(
            "c03.properness_and_covering",
            Verdict::refuted("covers".to_string(), covers.verdict.note),
        ));
    }
    Ok(Record::new(
        "c03.properness_and_covering",
        Verdict::to_bound(
            10,
            "s outside tD for t in {1,2} to level 10 (spot 110/9 confirmed by both oracles); \
             r·D covered 100 sampled members with explicit witnesses"
                .to_string(),
        ),
    ))
}

/// 100 random `(a <= 30, N <= 50)` choices re-verified by direct arithmetic,
/// plus the two frozen minimal triples.
fn pcd_chooser(stream: &mut SampleStream) -> Result<Record> {
    for _ in 0..100 {
        let a = BigUint::from(stream.u64_in(2, 30));
        let n = BigUint::from(stream.u64_in(1, 50));
        let triple = find_pcd(&a, &n)?;
        if triple.verify().is_err() {
            return Ok(Record::new(
                "c04.pcd_chooser",
                Verdict::refuted(format!("a={a}, N={n}"), "constraint re-check failed".to_string()),
            ));
        }
    }
    let t = find_pcd(&BigUint::from(3u32), &BigUint::from(6u32))?;
    let frozen_36 = (t.p.to_u64(), t.c.to_u64(), t.d.to_u64()) == (Some(7), Some(4), Some(73));
    let t = find_pcd(&BigUint::from(5u32), &BigUint::from(4u32))?;
    let frozen_54 = (t.p.to_u64(), t.c.to_u64(), t.d.to_u64()) == (Some(6), Some(6), Some(161));
    if !frozen_36 || !frozen_54 {
        return Ok(Record::new(
            "c04.pcd_chooser",
            Verdict::refuted("frozen triples".to_string(), "minimal search drifted".to_string()),
        ));
    }
    Ok(Record::new(
        "c04.pcd_chooser",
        Verdict::proved(
            "100 random choices satisfy all six constraints; (3,6) gives (7,4,73) and (5,4) gives (6,6,161)"
                .to_string(),
        ),
    ))
}

/// `H = <2,5>`, `a = 5`: gap set `{15,51,87,123,159}` disjoint from the
/// extension, residue coverage to 1000, and the window conductor `160`.
fn gap_certificate(bounds: &RunBounds) -> Result<Record> {
    let h = LayeredCone::flat("<2,5>".parse()?);
    let ext = extend_component(&h, &BigUint::from(5u32), bounds)?;
    let expected: Vec<BigUint> = [15u32, 51, 87, 123, 159].iter().map(|&v| v.into()).collect();
    if ext.gaps.values(10) != expected {
        return Ok(Record::new(
            "c05.gap_certificate",
            Verdict::refuted("L".to_string(), "gap progression drifted".to_string()),
        ));
    }
    if ext.gap_disjoint.status != Status::Proved {
        return Ok(Record::new("c05.gap_certificate", ext.gap_disjoint));
    }
    if ext.gaps.n_g != BigUint::from(160u32) || ext.conductor_window.status != Status::Proved {
        return Ok(Record::new(
            "c05.gap_certificate",
            Verdict::refuted(ext.gaps.n_g.to_string(), "conductor disagrees with l_4 + 1".to_string()),
        ));
    }
    let sweep = residue_coverage(&ext, 1000);
    if sweep.status != Status::Proved {
        return Ok(Record::new("c05.gap_certificate", sweep));
    }
    Ok(Record::new(
        "c05.gap_certificate",
        Verdict::proved(
            "L = {15,51,87,123,159} outside 5<2,5>+6<6,161>, residue coverage to 1000, window conductor 160"
                .to_string(),
        ),
    ))
}

/// Chain over `<2,5>` with pool `(5,161,30000)` to depth 3: every condition
/// record exact and green, `s_2(y_2) = 61/25`, states increasing above the
/// divergence bound.
fn chain_depth_three(bounds: &RunBounds) -> Result<Record> {
    let h1: IntegerCone = "<2,5>".parse()?;
    let out = build_chain(&h1, &[5, 161, 30000], 3, bounds)?;
    if let Some(bad) = out.records.iter().find(|r| r.status == Status::Refuted) {
        return Ok(Record::new(
            "c06.chain_depth_three",
            Verdict::refuted(bad.claim.clone(), bad.note.clone()),
        ));
    }
    if out.states[1] != BigRational::new(61.into(), 25.into()) {
        return Ok(Record::new(
            "c06.chain_depth_three",
            Verdict::refuted(out.states[1].to_string(), "s_2(y_2) drifted from 61/25".to_string()),
        ));
    }
    let conductors: Vec<Option<u64>> =
        out.stages.iter().map(|s| s.conductor.to_u64()).collect();
    if conductors != vec![Some(4), Some(160), Some(4224640)] {
        return Ok(Record::new(
            "c06.chain_depth_three",
            Verdict::refuted(format!("{conductors:?}"), "conductor sequence drifted".to_string()),
        ));
    }
    Ok(Record::new(
        "c06.chain_depth_three",
        Verdict::proved(
            "conditions (a)-(e) exact for every pair j < i at depth 3; states 1, 61/25, 7213/805 increase above the bound"
                .to_string(),
        ),
    ))
}

/// 100 random multiplication maps: the exact decision agrees with the
/// exhaustive check over `[0, 2·max(conductor)]`.
fn embedding_vs_brute_force(stream: &mut SampleStream) -> Result<Record> {
    for _ in 0..100 {
        let src = stream.simple_cone(40);
        let tgt = stream.simple_cone(40);
        let multiplier = stream.u64_in(1, 6);
        let bound = 2 * src.conductor()?.max(tgt.conductor()?) + 2;
        let oracle_says = oracle::embedding_counterexample(
            multiplier,
            src.generators(),
            tgt.generators(),
            bound,
        )
        .is_none();
        let artifact_says =
            match MultiplicationMap::new(multiplier, Arc::new(src.clone()), Arc::new(tgt.clone()))
            {
                Ok(map) => crate::embed::is_order_embedding(&map)?,
                Err(_) => false, // not even positive
            };
        if artifact_says != oracle_says {
            return Ok(Record::new(
                "c07.embedding_decision",
                Verdict::refuted(
                    format!("x{multiplier}: {src} -> {tgt}"),
                    format!("exact decision {artifact_says}, brute force {oracle_says}"),
                ),
            ));
        }
    }
    Ok(Record::new(
        "c07.embedding_decision",
        Verdict::proved("100 random maps decided identically to brute force".to_string()),
    ))
}

/// The 4x4 cons grid and the 3x3 combined grid: every edge an
/// order-embedding, every square commutative, and limit positivity stable
/// under 100 random stage lifts.
fn grid_integrity(stream: &mut SampleStream, bounds: &RunBounds) -> Result<Record> {
    let cons = build_grid(
        GridKind::Cons,
        GridParams::Cons { q1: 2, p1: 7, q2: 3, p2: 7 },
        3,
        3,
        bounds.work_limit,
    )?;
    for e in cons.edge_reports() {
        if !e.decision.is_proved() {
            return Ok(Record::new(
                "c08.grid_integrity",
                Verdict::refuted(
                    format!("cons edge ({},{},{})", e.row, e.col, e.direction),
                    format!("{}", e.decision),
                ),
            ));
        }
    }
    for (i, j, a, b) in cons.square_products() {
        if a != b {
            return Ok(Record::new(
                "c08.grid_integrity",
                Verdict::refuted(format!("cons square ({i},{j})"), "paths disagree".to_string()),
            ));
        }
    }
    let laleche_bounds = RunBounds { sample_count: 10, ..*bounds };
    let laleche = build_laleche(&[2, 3], &[5, 161], 2, None, 0, &laleche_bounds)?;
    if let Some(bad) = laleche.records.iter().find(|r| r.status == Status::Refuted) {
        return Ok(Record::new(
            "c08.grid_integrity",
            Verdict::refuted(bad.claim.clone(), bad.note.clone()),
        ));
    }
    for (label, grid) in [("cons", &cons), ("laleche", &laleche.grid)] {
        let diag = grid.diagonal_system(bounds.work_limit)?;
        if !diag.is_verified() {
            return Ok(Record::new(
                "c08.grid_integrity",
                Verdict::refuted(label.to_string(), "diagonal not fully proved".to_string()),
            ));
        }
        for _ in 0..50 {
            let stage = stream.usize_in(0, diag.truncation() - 1);
            let cap = diag.stage(stage).unwrap().conductor()? * 2 + 2;
            let value = BigUint::from(stream.u64_in(0, cap));
            let here = diag
                .stage(stage)
                .unwrap()
                .contains_big(&value);
            for later in stage + 1..diag.truncation() {
                let lifted = diag
                    .lift(&LimitElement { stage, value: value.clone() }, later)?;
                if diag.stage(later).unwrap().contains_big(&lifted.value) != here {
                    return Ok(Record::new(
                        "c08.grid_integrity",
                        Verdict::refuted(
                            format!("{label} stage {stage} value {value}"),
                            "stagewise positivity unstable".to_string(),
                        ),
                    ));
                }
            }
        }
    }
    Ok(Record::new(
        "c08.grid_integrity",
        Verdict::proved(
            "all edges embeddings, all squares commute, 100 random limit elements stagewise-stable"
                .to_string(),
        ),
    ))
}

/// Block `(3,10)`, `u = 1`, threshold `10^6`: the probe answers `n = 12`,
/// since `(10/3)^12 > 10^6 > (10/3)^11`.
fn unboundedness_probe() -> Result<Record> {
    let block = Arc::new(new_block(2, 7, 10, 3)?);
    let d = Interval::block_powers(block);
    let threshold = BigRational::from_integer(1_000_000.into());
    let verdict = d.state_sup_probe(
        &Element::rational(BigRational::from_integer(1.into())),
        &threshold,
        32,
    )?;
    if verdict.status != Status::Proved || verdict.witness.as_deref() != Some("n=12") {
        return Ok(Record::new(
            "c09.unboundedness_probe",
            Verdict::refuted(
                verdict.witness.unwrap_or_default(),
                "probe did not certify the threshold at n = 12".to_string(),
            ),
        ));
    }
    Ok(Record::new(
        "c09.unboundedness_probe",
        Verdict::proved("state of e_12 exceeds 10^6, state of e_11 does not".to_string()),
    ))
}
