//! Reference implementations kept deliberately naive.
//!
//! These are the independent second routes the test and acceptance suites
//! compare against: a marking sweep for membership and conductor (terminating
//! once a full window of consecutive members appears), and an exhaustive
//! order-embedding check. None of them share code with the production paths.

/// Membership bitmap of `⟨gens⟩` over `[0, bound]` by the classic marking DP.
pub fn members_bitmap(gens: &[u64], bound: u64) -> Vec<bool> {
    let n = bound as usize;
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for x in 1..=n {
        for &g in gens {
            let g = g as usize;
            if g <= x && reach[x - g] {
                reach[x] = true;
                break;
            }
        }
    }
    reach
}

/// Conductor and gap set of a simple cone by sweeping until a run of
/// `min(gens)` consecutive members shows up; everything past such a window is
/// reachable by adding the least generator.
pub fn sweep_profile(gens: &[u64]) -> (u64, Vec<u64>) {
    let window = *gens.iter().min().expect("nonempty") as usize;
    let mut reach = vec![true]; // 0 is a member
    let mut run = 1usize;
    let mut x = 0usize;
    while run < window {
        x += 1;
        let hit = gens
            .iter()
            .any(|&g| (g as usize) <= x && reach[x - g as usize]);
        reach.push(hit);
        run = if hit { run + 1 } else { 0 };
    }
    let conductor = (x + 1 - window) as u64;
    let gaps = (1..conductor)
        .filter(|&g| !reach[g as usize])
        .collect();
    (conductor, gaps)
}

/// Exhaustive order-embedding check for `×multiplier : ⟨src⟩ → ⟨tgt⟩` over
/// `x ∈ [0, bound]`. Returns the first `x` where `multiplier·x ∈ tgt` and
/// `x ∈ src` disagree.
pub fn embedding_counterexample(
    multiplier: u64,
    src: &[u64],
    tgt: &[u64],
    bound: u64,
) -> Option<u64> {
    let src_map = members_bitmap(src, bound);
    let tgt_map = members_bitmap(tgt, bound * multiplier);
    (0..=bound).find(|&x| src_map[x as usize] != tgt_map[(x * multiplier) as usize])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_matches_frobenius_formula() {
        let (conductor, gaps) = sweep_profile(&[2, 7]);
        assert_eq!(conductor, 6);
        assert_eq!(gaps, vec![1, 3, 5]);
        let (conductor, gaps) = sweep_profile(&[3, 5]);
        assert_eq!(conductor, 8);
        assert_eq!(gaps, vec![1, 2, 4, 7]);
        let (conductor, gaps) = sweep_profile(&[1]);
        assert_eq!(conductor, 0);
        assert!(gaps.is_empty());
    }

    #[test]
    fn embedding_oracle_spots_the_known_failure() {
        // ×2 : <2,5> → <2,5> fails already at x = 1 (2 is a member, 1 is
        // not); x = 3 refutes as well but is not the least witness.
        assert_eq!(embedding_counterexample(2, &[2, 5], &[2, 5], 20), Some(1));
        // ×2 : <2,5> → <4,10,14,35> is an embedding on any window.
        assert_eq!(embedding_counterexample(2, &[2, 5], &[4, 10, 14, 35], 60), None);
    }
}
