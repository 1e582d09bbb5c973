//! Search experiments around short elements of second derived subgroups.
//!
//! The membership test used here is independent of the library: a reduced
//! word with vanishing exponent sums lies in the second derived subgroup of
//! the free group if and only if all its Fox derivatives, projected to the
//! group ring of the abelianization, vanish (the classical solution of the
//! word problem in free metabelian groups).

use std::collections::HashMap;

use marked_groups::words::{enumerate_words, Word};

/// Monomial in the abelianization: exponent vector per generator.
type Monomial = Vec<i32>;

/// Fox derivatives of `w` projected to Z[a1^±..an^±]; one polynomial per generator.
fn fox_derivatives(w: &Word) -> Vec<HashMap<Monomial, i64>> {
    let n = usize::from(w.arity());
    let mut out: Vec<HashMap<Monomial, i64>> = vec![HashMap::new(); n];
    let mut prefix: Monomial = vec![0; n];
    for l in w.letters() {
        let g = usize::from(l.index) - 1;
        if l.inverse {
            prefix[g] -= 1;
            // d(x^-1) = -x^-1, so the contribution is minus the prefix
            // including this letter.
            let entry = out[g].entry(prefix.clone()).or_insert(0);
            *entry -= 1;
            if *entry == 0 {
                out[g].remove(&prefix);
            }
        } else {
            let entry = out[g].entry(prefix.clone()).or_insert(0);
            *entry += 1;
            if *entry == 0 {
                out[g].remove(&prefix);
            }
            prefix[g] += 1;
        }
    }
    out
}

/// Membership in the second derived subgroup F'' (for reduced words).
fn in_second_derived(w: &Word) -> bool {
    (1..=w.arity()).all(|i| w.exponent_sum(i) == 0)
        && fox_derivatives(w).iter().all(|poly| poly.is_empty())
}

fn word(arity: u16, text: &str) -> Word {
    Word::parse(arity, text).unwrap()
}

#[test]
fn fox_checker_sanity() {
    // Plain commutators are in F' but not F''.
    assert!(!in_second_derived(&word(2, "abAB")));
    // The identity is in every derived subgroup.
    assert!(in_second_derived(&Word::identity(2)));
    // [[a,b],[a,b]^(b^-1)] lies in F'' (commutator of two members of F').
    let u = word(2, "abAB");
    let v = u.conjugate_by(&word(2, "B"));
    let c = u.commutator(&v);
    assert_eq!(c.len(), 14);
    assert!(in_second_derived(&c));
    // [[a,b],[b,c]] in F_3''.
    let u3 = word(3, "abAB");
    let v3 = word(3, "bcBC");
    let c3 = u3.commutator(&v3);
    assert_eq!(c3.len(), 14);
    assert!(in_second_derived(&c3));
    // An F'-element that is not in F''.
    assert!(!in_second_derived(&word(2, "aabAAB")));
}

/// Exhaustive minimum-length search in F_2'' (fast enough to run by default).
#[test]
fn min_second_derived_length_rank2() {
    let mut min_len = None;
    for w in enumerate_words(2, 12) {
        if !w.is_empty() && in_second_derived(&w) {
            min_len = Some(w.len());
            break;
        }
    }
    // No nontrivial element of F_2'' has reduced length <= 12.
    assert_eq!(min_len, None);
}

/// DFS with exponent-sum pruning over F_4 words; finds the minimum length of a
/// nontrivial element of F_4'' up to the given cap. Run manually:
/// `cargo test -p marked-groups --test derived_search -- --ignored --nocapture`
#[test]
#[ignore]
fn min_second_derived_length_rank4() {
    for target in (4..=12).step_by(2) {
        let found = search_rank4_exact(target);
        println!("rank-4 second-derived words of length {target}: {found:?}");
        if found.is_some() {
            return;
        }
    }
    println!("no nontrivial element of F_4'' with length <= 12");
}

fn search_rank4_exact(len: usize) -> Option<String> {
    // letters: slot s in 0..8, generator s/2, sign s%2.
    let mut stack: Vec<(u16, bool)> = Vec::with_capacity(len);
    let mut sums = [0i32; 4];
    fn dfs(
        stack: &mut Vec<(u16, bool)>,
        sums: &mut [i32; 4],
        len: usize,
    ) -> Option<String> {
        let depth = stack.len();
        if depth == len {
            let w = Word::from_letters(
                4,
                stack.iter().map(|&(i, inv)| {
                    if inv {
                        marked_groups::words::Letter::inv(i)
                    } else {
                        marked_groups::words::Letter::gen(i)
                    }
                }),
            )
            .unwrap();
            if w.len() == len && in_second_derived(&w) {
                return Some(w.to_string());
            }
            return None;
        }
        let imbalance: i32 = sums.iter().map(|s| s.abs()).sum();
        let remaining = (len - depth) as i32;
        if imbalance > remaining {
            return None;
        }
        // Fix the first letter to the positive first generator: generator
        // permutations and inversions are length-preserving automorphisms
        // fixing F'' setwise.
        let slots: &[u32] = if depth == 0 { &[0] } else { &[0, 1, 2, 3, 4, 5, 6, 7] };
        for &s in slots {
            let index = (s / 2 + 1) as u16;
            let inverse = s % 2 == 1;
            if let Some(&(pi, pinv)) = stack.last() {
                if pi == index && pinv != inverse {
                    continue; // keep the word freely reduced
                }
            }
            stack.push((index, inverse));
            sums[usize::from(index) - 1] += if inverse { -1 } else { 1 };
            let hit = dfs(stack, sums, len);
            sums[usize::from(index) - 1] -= if inverse { -1 } else { 1 };
            stack.pop();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
    dfs(&mut stack, &mut sums, len)
}
