mod common;

use num_rational::Ratio;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use litsel::clause::{is_tautology, normalize_variables, Literal};
use litsel::harness::compute_uscore;
use litsel::ordering::{compare_terms, OrderResult};
use litsel::saturation::subsumes;
use litsel::subst::{mgu, Substitution};
use litsel::term::{TermBank, TermId, TermNode};
use litsel::tptp::{parse_str, print_clause};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn tree_size(bank: &TermBank, t: TermId) -> u32 {
    match bank.node(t) {
        TermNode::Var(_) => 1,
        TermNode::App(_, args) => 1 + args.iter().map(|&a| tree_size(bank, a)).sum::<u32>(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cached_weight_is_tree_size(seed: u64) {
        let mut g = Gen::new();
        let t = g.term(&mut rng(seed), 4);
        prop_assert_eq!(g.bank.weight(t), tree_size(&g.bank, t));
    }

    #[test]
    fn kbo_is_irreflexive_and_antisymmetric(seed: u64) {
        let mut g = Gen::new();
        let mut r = rng(seed);
        let (s, t) = (g.term(&mut r, 3), g.term(&mut r, 3));
        prop_assert_eq!(compare_terms(&g.bank, &g.params, s, s), OrderResult::Equal);
        let (st, ts) = (compare_terms(&g.bank, &g.params, s, t), compare_terms(&g.bank, &g.params, t, s));
        prop_assert_eq!(st, ts.reverse());
    }

    #[test]
    fn kbo_total_on_ground_terms(seed: u64) {
        let mut g = Gen::new();
        let mut r = rng(seed);
        let (s, t) = (g.ground_term(&mut r, 4), g.ground_term(&mut r, 4));
        let c = compare_terms(&g.bank, &g.params, s, t);
        prop_assert_ne!(c, OrderResult::Incomparable);
        prop_assert_eq!(c == OrderResult::Equal, s == t);
    }

    #[test]
    fn kbo_stable_under_substitution(seed: u64) {
        let mut g = Gen::new();
        let mut r = rng(seed);
        let (s, t) = (g.term(&mut r, 3), g.term(&mut r, 3));
        let before = compare_terms(&g.bank, &g.params, s, t);
        let mut sigma = Substitution::new();
        for v in 0..g.max_var {
            let u = g.term(&mut r, 2);
            sigma.bind(v, u);
        }
        let (a, b) = (sigma.apply(&mut g.bank, s), sigma.apply(&mut g.bank, t));
        if before == OrderResult::Greater {
            prop_assert_eq!(compare_terms(&g.bank, &g.params, a, b), OrderResult::Greater);
        }
    }

    #[test]
    fn mgu_agrees_with_reference_and_unifies(seed: u64) {
        let mut g = Gen::new();
        let mut r = rng(seed);
        let (s, t) = (g.term(&mut r, 3), g.term(&mut r, 3));
        let expected = naive_unifiable_in(&g.bank, s, 0, t, 0);
        match mgu(&mut g.bank, s, t) {
            None => prop_assert!(!expected),
            Some(theta) => {
                prop_assert!(expected);
                let (a, b) = (theta.apply(&mut g.bank, s), theta.apply(&mut g.bank, t));
                prop_assert_eq!(a, b);
                // idempotent: no bound variable survives in the range
                let bindings: Vec<(u32, TermId)> = theta.iter().collect();
                for (_, u) in bindings {
                    prop_assert_eq!(theta.apply(&mut g.bank, u), u);
                }
            }
        }
    }

    #[test]
    fn tautology_ignores_order_and_names(seed: u64) {
        let mut g = Gen::new();
        let mut r = rng(seed);
        let mut lits = g.clause(&mut r, 4);
        if r.gen_bool(0.5) {
            let l = *lits.choose(&mut r).unwrap();
            lits.push(l.negated());
        }
        let base = is_tautology(&lits);
        let mut shuffled = lits.clone();
        shuffled.shuffle(&mut r);
        prop_assert_eq!(is_tautology(&shuffled), base);
        let renamed = normalize_variables(&mut g.bank, &shuffled);
        prop_assert_eq!(is_tautology(&renamed), base);
    }

    #[test]
    fn clause_subsumes_its_weakenings(seed: u64) {
        let mut g = Gen::new();
        let mut r = rng(seed);
        let c = g.clause(&mut r, 3);
        let mut sigma = Substitution::new();
        for v in 0..g.max_var {
            let u = g.term(&mut r, 1);
            sigma.bind(v, u);
        }
        let mut d: Vec<Literal> = sigma.apply_literals(&mut g.bank, &c);
        d.extend(g.clause(&mut r, 2));
        d.shuffle(&mut r);
        prop_assert!(subsumes(&g.bank, &c, &c));
        prop_assert!(subsumes(&g.bank, &c, &d));
    }

    #[test]
    fn uscores_sum_to_distinct_solved(rows in 1usize..24, cols in 0usize..200, seed: u64) {
        let mut r = rng(seed);
        let density: f64 = r.gen();
        let m: Vec<Vec<bool>> = (0..rows).map(|_| (0..cols).map(|_| r.gen_bool(density)).collect()).collect();
        let sum: Ratio<u64> = compute_uscore(&m).into_iter().sum();
        let solved = (0..cols).filter(|&j| m.iter().any(|row| row[j])).count() as u64;
        prop_assert_eq!(sum, Ratio::from_integer(solved));
    }

    #[test]
    fn printed_clauses_parse_back(seed: u64) {
        let mut g = Gen::new();
        let mut r = rng(seed);
        let n = r.gen_range(1..5);
        let mut text = String::new();
        for i in 0..n {
            let c = g.clause(&mut r, 4);
            let c = normalize_variables(&mut g.bank, &c);
            text.push_str(&print_clause(&g.bank, &format!("c{i}"), "axiom", &c));
            text.push('\n');
        }
        let p = parse_str(&text, "rt", &[]).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let mut again = String::new();
        for c in &p.clauses {
            again.push_str(&print_clause(&p.bank, &c.name, &c.role, &c.literals));
            again.push('\n');
        }
        prop_assert_eq!(again, text);
    }
}
