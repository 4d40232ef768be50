//! Algebraic invariants checked across random inputs, plus the exhaustive
//! two-generator conductor identity.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

use ordcone::embed::{build_row, limit_contains, LimitElement};
use ordcone::intcone::{intersect_scale, IntegerCone, LayeredCone};
use ordcone::intervals::{Element, Interval};
use ordcone::oracle;
use ordcone::ratcone::{new_block, Block};
use ordcone::report::Status;
use ordcone::supernat::{Exponent, Supernatural};

fn arb_supernatural() -> impl Strategy<Value = Supernatural> {
    let primes = prop::sample::subsequence(vec![2u64, 3, 5, 7, 11, 13], 0..=4);
    primes.prop_flat_map(|ps| {
        let exps = prop::collection::vec(
            prop_oneof![
                (1u32..5).prop_map(Exponent::Finite),
                Just(Exponent::Infinite)
            ],
            ps.len(),
        );
        exps.prop_map(move |es| {
            let parts: Vec<(u64, Exponent)> =
                ps.iter().copied().zip(es.into_iter()).collect();
            Supernatural::from_parts(&parts).unwrap()
        })
    })
}

fn arb_simple_cone() -> impl Strategy<Value = IntegerCone> {
    prop::collection::vec(2u64..40, 2..5)
        .prop_filter("coprime generators", |gens| {
            use num_integer::Integer;
            gens.iter().fold(0u64, |acc, &g| acc.gcd(&g)) == 1
        })
        .prop_map(|gens| IntegerCone::new(gens).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn supernatural_mul_is_commutative_and_associative(
        a in arb_supernatural(),
        b in arb_supernatural(),
        c in arb_supernatural(),
    ) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn supernatural_divides_antisymmetry(a in arb_supernatural(), b in arb_supernatural()) {
        if a.divides(&b) && b.divides(&a) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn supernatural_coprime_divides_product(a in arb_supernatural(), b in arb_supernatural()) {
        if a.coprime(&b) {
            let product = a.mul(&b);
            prop_assert!(a.divides(&product));
            prop_assert!(b.divides(&product));
        }
    }

    #[test]
    fn subgroup_membership_closed_under_addition(
        n in arb_supernatural(),
        a in -50i64..50,
        b in -50i64..50,
        da in 1i64..40,
        db in 1i64..40,
    ) {
        let x = BigRational::new(a.into(), da.into());
        let y = BigRational::new(b.into(), db.into());
        if n.subgroup_contains(&x) && n.subgroup_contains(&y) {
            prop_assert!(n.subgroup_contains(&(x + y)));
        }
    }

    #[test]
    fn cone_membership_closed_under_addition(
        cone in arb_simple_cone(),
        seed_x in 0usize..6,
        seed_y in 0usize..6,
        reps in 1u64..4,
    ) {
        let gens = cone.generators();
        let x = gens[seed_x % gens.len()] * reps;
        let y = gens[seed_y % gens.len()];
        prop_assert!(cone.contains(x));
        prop_assert!(cone.contains(y));
        prop_assert!(cone.contains(x + y));
    }

    #[test]
    fn analyze_is_a_regeneration_fixpoint(cone in arb_simple_cone()) {
        let minimized = cone.minimized();
        prop_assert_eq!(minimized.analyze().unwrap(), cone.analyze().unwrap());
    }

    #[test]
    fn apery_membership_matches_sweep(cone in arb_simple_cone(), x in 0u64..400) {
        let bitmap = oracle::members_bitmap(cone.generators(), 400);
        prop_assert_eq!(cone.contains(x), bitmap[x as usize]);
    }

    #[test]
    fn embedding_decision_matches_brute_force(
        src in arb_simple_cone(),
        tgt in arb_simple_cone(),
        multiplier in 1u64..6,
    ) {
        let bound = 2 * src.conductor().unwrap().max(tgt.conductor().unwrap()) + 2;
        let oracle_ok = oracle::embedding_counterexample(
            multiplier, src.generators(), tgt.generators(), bound,
        ).is_none();
        let ours = match ordcone::embed::MultiplicationMap::new(
            multiplier, Arc::new(src), Arc::new(tgt),
        ) {
            Ok(map) => ordcone::embed::is_order_embedding(&map).unwrap(),
            Err(_) => false,
        };
        prop_assert_eq!(ours, oracle_ok);
    }
}

#[test]
fn conductor_identity_for_every_coprime_pair_up_to_60() {
    use num_integer::Integer;
    for k in 2u64..60 {
        for l in k + 1..=60 {
            if k.gcd(&l) != 1 {
                continue;
            }
            let cone = IntegerCone::new(vec![k, l]).unwrap();
            assert_eq!(cone.conductor().unwrap(), k * l - k - l + 1, "<{k},{l}>");
            assert_eq!(cone.genus().unwrap(), (k - 1) * (l - 1) / 2, "<{k},{l}>");
        }
    }
}

#[test]
fn layered_and_flat_agree_below_twice_the_conductor() {
    for literal in ["5*<2,5>+6*<6,161>", "5*<2,3>+3*<7,92>"] {
        let layered: LayeredCone = literal.parse().unwrap();
        let flat = layered.expand_flat().unwrap();
        let conductor: u64 = layered.conductor().unwrap().try_into().unwrap();
        for x in 0..=2 * conductor {
            assert_eq!(layered.contains(&BigUint::from(x)), flat.contains(x), "{literal} at {x}");
        }
    }
}

#[test]
fn intersect_scale_gaps_are_the_union_below_the_joint_conductor() {
    let cones: Vec<IntegerCone> =
        ["<2,7>", "<3,5>", "<4,9>"].iter().map(|s| s.parse().unwrap()).collect();
    let s = intersect_scale(&cones, 1).unwrap();
    let joint = cones.iter().map(|c| c.conductor().unwrap()).max().unwrap();
    for x in 0..joint {
        let in_all = cones.iter().all(|c| c.contains(x));
        assert_eq!(s.contains(x), in_all, "at {x}");
    }
}

#[test]
fn stagewise_positivity_is_stable_along_verified_rows() {
    let sys = build_row(
        &"<2,5>".parse().unwrap(),
        &"<3,7>".parse().unwrap(),
        3,
        10,
        3,
        u64::MAX,
    )
    .unwrap();
    assert!(sys.is_verified());
    for stage in 0..sys.truncation() {
        let cap = sys.stage(stage).unwrap().conductor().unwrap() * 2;
        for x in 0..=cap.min(300) {
            let here =
                limit_contains(&sys, &LimitElement::new(stage, x)).unwrap();
            for later in stage + 1..sys.truncation() {
                let lifted = sys.lift(&LimitElement::new(stage, x), later).unwrap();
                assert_eq!(limit_contains(&sys, &lifted).unwrap(), here);
            }
        }
    }
}

fn block_3_10() -> Arc<Block> {
    Arc::new(new_block(2, 7, 10, 3).unwrap())
}

#[test]
fn generator_monotonicity_to_level_ten() {
    let block = block_3_10();
    for n in 0..10u32 {
        let diff = block.e(n + 1) - block.e(n);
        assert!(block.contains_direct(&diff).unwrap(), "direct at {n}");
        assert!(block.contains_ladder(&diff).unwrap(), "ladder at {n}");
    }
}

#[test]
fn doubling_claim_on_small_indices() {
    // 2^k e_n <= r e_{n+k-1} as membership of the difference, n,k <= 5.
    let block = block_3_10();
    let r = BigRational::from_integer(3.into());
    for n in 1..=5u32 {
        for k in 1..=5u32 {
            let lhs = BigRational::from_integer(BigInt::from(1u64 << k)) * block.e(n);
            let rhs = &r * block.e(n + k - 1);
            let diff = rhs - lhs;
            assert!(
                block.contains_direct(&diff).unwrap(),
                "2^{k} e_{n} not below r e_{}",
                n + k - 1
            );
            assert!(block.contains_ladder(&diff).unwrap());
        }
    }
}

#[test]
fn block_membership_closed_under_addition() {
    let block = block_3_10();
    let members = [
        BigRational::new(2.into(), 3.into()),
        BigRational::new(10.into(), 3.into()),
        BigRational::new(100.into(), 9.into()),
        BigRational::new(7.into(), 3.into()),
        BigRational::from_integer(10.into()),
    ];
    for x in &members {
        assert!(block.contains_direct(x).unwrap());
        for y in &members {
            let sum = x + y;
            assert!(block.contains_direct(&sum).unwrap(), "{x} + {y}");
            assert!(block.contains_ladder(&sum).unwrap(), "{x} + {y}");
        }
    }
}

#[test]
fn properness_prefix_to_level_ten() {
    // e_m never dominates s on the prefix, nor does any t·e_m for t < r.
    let block = block_3_10();
    let s = BigRational::from_integer(10.into());
    for m in 1..=10u32 {
        for t in 1..=2u64 {
            let diff = BigRational::from_integer(BigInt::from(t)) * block.e(m) - &s;
            assert!(!block.contains_direct(&diff).unwrap(), "t={t}, m={m}");
            assert!(!block.contains_ladder(&diff).unwrap(), "t={t}, m={m}");
        }
    }
}

#[test]
fn interval_membership_is_order_hereditary() {
    let block = block_3_10();
    let d = Interval::block_powers(block.clone());
    let x = block.e(2);
    let below = [
        BigRational::new(2.into(), 3.into()),
        BigRational::new(10.into(), 3.into()),
        BigRational::from_integer(0.into()),
    ];
    let vx = d.contains_up_to(&Element::rational(x.clone()), 5).unwrap();
    assert_eq!(vx.status, Status::Proved);
    for y in below {
        // y <= x in the ambient order...
        assert!(block.contains_direct(&(&x - &y)).unwrap());
        // ...so y is found no later than x.
        let vy = d.contains_up_to(&Element::rational(y.clone()), 5).unwrap();
        assert_eq!(vy.status, Status::Proved, "hereditary failure at {y}");
    }
}

#[test]
fn scale_equals_iterated_sum() {
    let block = block_3_10();
    let d = Interval::block_powers(block);
    let tripled = d.scale(3).unwrap();
    let summed = d.sum(&d).unwrap().sum(&d).unwrap();
    for n in 1..=5 {
        assert_eq!(tripled.generator(n).unwrap(), summed.generator(n).unwrap());
    }
}

#[test]
fn pushforward_preserves_proved_membership() {
    let block = block_3_10();
    let d = Interval::block_powers(block.clone());
    let lifted = d.into_ladder(8).unwrap();
    for value in ["10/3", "2/3", "100/9"] {
        let x: BigRational = ordcone::ratcone::parse_rational(value).unwrap();
        let v = d.contains_up_to(&Element::rational(x.clone()), 6).unwrap();
        assert_eq!(v.status, Status::Proved, "{value}");
        let image = block.lift_to_ladder(&x).unwrap();
        let v_img = lifted.contains_up_to(&Element::Limit(image), 6).unwrap();
        assert_eq!(v_img.status, Status::Proved, "{value} image");
        assert_eq!(v_img.witness, v.witness, "{value} witness");
    }
}

#[test]
fn covering_intervals_are_soft_per_sample() {
    // r·D = G⁺ makes D soft: for each sampled member x of D, some
    // (r+1)x <= r·e_k. The witness n = r always appears in the soft search.
    let block = block_3_10();
    let d = Interval::block_powers(block.clone());
    let r = BigRational::from_integer(3.into());
    for n in 1..=5u32 {
        let x = block.e(n);
        let mut witnessed = false;
        for k in n..=n + 2 {
            let diff = &r * block.e(k) - (&r + BigRational::from_integer(1.into())) * &x;
            if !diff.is_negative() && block.contains_direct(&diff).unwrap() {
                witnessed = true;
                break;
            }
        }
        assert!(witnessed, "no softness witness with n = r for e_{n}");
    }
    assert_eq!(d.is_soft(5).unwrap().status, Status::Proved);
}

use num_traits::Signed;
