use super::Term;
use crate::error::{Error, Result};

/// Each rule removes at least one node, so a term of size `k` needs fewer
/// than `k` steps; the limit only guards against a broken rule.
pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rewrite {
    pub term: Term,
    pub steps: u64,
}

/// Rewrites with the four equations oriented left to right, innermost first
/// and leftmost among siblings, until no rule applies.
pub fn rewrite(t: &Term, states: usize, step_limit: u64) -> Result<Rewrite> {
    let mut steps = 0;
    let term = normalize(t, states, &mut steps, step_limit)?;
    Ok(Rewrite { term, steps })
}

fn normalize(t: &Term, n: usize, steps: &mut u64, limit: u64) -> Result<Term> {
    let mut node = match t {
        Term::Var(v) => Term::Var(*v),
        Term::Update(s, arg) => Term::update(*s, normalize(arg, n, steps, limit)?),
        Term::Lookup(bs) => Term::Lookup(
            bs.iter()
                .map(|b| normalize(b, n, steps, limit))
                .collect::<Result<_>>()?,
        ),
    };
    // Every rule's result has normal children, so only the root can be a redex.
    while let Some(next) = step_at_root(&node, n) {
        *steps += 1;
        if *steps > limit {
            return Err(Error::CeilingExceeded {
                work: *steps as u128,
                ceiling: limit,
            });
        }
        node = next;
    }
    Ok(node)
}

fn step_at_root(t: &Term, n: usize) -> Option<Term> {
    match t {
        Term::Update(s, arg) => match arg.as_ref() {
            // u_s(u_t(x)) → u_t(x)
            Term::Update(..) => Some((**arg).clone()),
            // u_s(l(a)) → u_s(a_s)
            Term::Lookup(bs) => bs.get(*s).map(|a| Term::update(*s, a.clone())),
            Term::Var(_) => None,
        },
        Term::Lookup(bs) => {
            // l(u_0(x), .., u_{n-1}(x)) → x
            if let Some(Term::Update(_, x)) = bs.first() {
                let matches = bs
                    .iter()
                    .enumerate()
                    .all(|(s, b)| matches!(b, Term::Update(s2, y) if *s2 == s && y == x));
                if matches {
                    return Some((**x).clone());
                }
            }
            // l(l(a_s0, ..)_s) → l(a_ss)
            if bs.len() == n
                && bs
                    .iter()
                    .all(|b| matches!(b, Term::Lookup(inner) if inner.len() == n))
            {
                let diag = bs
                    .iter()
                    .enumerate()
                    .map(|(s, b)| match b {
                        Term::Lookup(inner) => inner[s].clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                return Some(Term::Lookup(diag));
            }
            None
        }
        Term::Var(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equational::{denote, parse, random_term};
    use crate::finset::FinSet;
    use crate::state_monad::StateMonadCtx;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rw(text: &str, n: usize) -> String {
        let t = parse(text, n).unwrap();
        rewrite(&t, n, DEFAULT_STEP_LIMIT).unwrap().term.to_string()
    }

    #[test]
    fn single_rules() {
        assert_eq!(rw("u0(u1(x0))", 2), "u1(x0)");
        assert_eq!(rw("l(u0(x0),u1(x0))", 2), "x0");
        assert_eq!(rw("u0(l(x0,x1))", 2), "u0(x0)");
        assert_eq!(rw("l(l(x0,x1),l(x2,x3))", 2), "l(x0,x3)");
    }

    #[test]
    fn nested_redexes() {
        assert_eq!(rw("u1(l(x0,u0(l(x1,x2))))", 2), "u0(x1)");
        assert_eq!(rw("l(u0(u1(x0)),u1(x0))", 2), "l(u1(x0),u1(x0))");
        // Equal to u0(x0) but not reachable by the oriented rules.
        assert_eq!(rw("l(u0(x0),u0(x0))", 2), "l(u0(x0),u0(x0))");
        assert_eq!(rw("x3", 3), "x3");
        assert_eq!(rw("l(x0)", 1), "l(x0)");
    }

    #[test]
    fn preserves_denotation_and_shrinks() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let n = 2;
            let ctx = StateMonadCtx::new(FinSet::new(n));
            let t = random_term(&mut rng, n, 2, 5);
            let r = rewrite(&t, n, DEFAULT_STEP_LIMIT).unwrap();
            assert_eq!(
                denote(&ctx, &t, 2).unwrap(),
                denote(&ctx, &r.term, 2).unwrap()
            );
            assert!(r.term.size() + r.steps as usize <= t.size());
            assert!(step_at_root(&r.term, n).is_none());
            // Idempotent.
            assert_eq!(rewrite(&r.term, n, DEFAULT_STEP_LIMIT).unwrap().steps, 0);
        }
    }

    #[test]
    fn step_limit_is_enforced() {
        let t = parse("u0(u0(u0(x0)))", 1).unwrap();
        assert!(matches!(
            rewrite(&t, 1, 1),
            Err(Error::CeilingExceeded { .. })
        ));
    }
}
