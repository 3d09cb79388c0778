//! Export to the CPLEX LP text format, for solving with an external MILP
//! solver.
//!
//! The formulation makes the inner minimization explicit by enumerating the
//! whole attack space. With `W` the set of robot subsets of size at most
//! `alpha` (the empty attack included), binaries `x_p` ("trajectory p is
//! chosen") and `y_{t,w}` ("target t stays covered under attack w"), and an
//! integer `z`:
//!
//! ```text
//! maximize z
//! s.t.  Σ_{p ∈ P_r} x_p = 1                       for every robot r
//!       Σ_{p ∈ N_t \ V_w} x_p ≥ y_{t,w}           for every target t, w ∈ W
//!       Σ_t weight(t) · y_{t,w} ≥ z               for every w ∈ W
//! ```
//!
//! where `N_t` are the trajectories covering `t` and `V_w` all trajectories
//! of the robots in `w`. The weighted objective generalizes the unit-weight
//! form; with fractional weights the integrality of `z` makes the bound
//! conservative. `|W|` grows binomially, so exports are budget-guarded.
//!
//! Variable naming (`x_p{id}`, `y_t{id}_w{index}`, `z`) and the ordering of
//! `W` (lexicographic by robot-id tuple, empty attack first) are fixed and
//! covered by byte-exact golden tests.

use std::fmt::Write;

use crate::model::{RobotId, Scenario};

/// Attack-subset count above which [`export_ilp`] refuses to run.
pub const DEFAULT_ILP_BUDGET: u128 = 100_000;

/// Why the export was refused.
#[derive(Debug, thiserror::Error)]
pub enum IlpError {
    #[error("ILP would enumerate {attacks} attack subsets, over the budget of {budget}")]
    BudgetExceeded { attacks: u128, budget: u128 },
}

/// Exports the scenario with [`DEFAULT_ILP_BUDGET`].
pub fn export_ilp(s: &Scenario) -> Result<String, IlpError> {
    export_ilp_budgeted(s, DEFAULT_ILP_BUDGET)
}

/// Exports the scenario as CPLEX LP text with an explicit budget on `|W|`.
pub fn export_ilp_budgeted(s: &Scenario, budget: u128) -> Result<String, IlpError> {
    let n_robots = s.robots().len();
    let mut attack_count: u128 = 0;
    for size in 0..=s.alpha() {
        attack_count = attack_count.saturating_add(binomial(n_robots, size));
    }
    if attack_count > budget {
        return Err(IlpError::BudgetExceeded { attacks: attack_count, budget });
    }

    // all robot subsets of size <= alpha, lexicographic by id tuple,
    // starting with the empty attack
    let mut attacks: Vec<Vec<RobotId>> = Vec::with_capacity(attack_count as usize);
    let mut stack: Vec<RobotId> = Vec::new();
    subsets_lex(n_robots, s.alpha(), 0, &mut stack, &mut attacks);
    debug_assert_eq!(attacks.len() as u128, attack_count);

    // N_t: trajectories covering each target
    let mut covered_by: Vec<Vec<usize>> = vec![Vec::new(); s.targets().len()];
    for p in s.trajectories() {
        for &t in &p.covers {
            covered_by[t].push(p.id);
        }
    }

    let mut out = String::new();
    let mut forced_zero: Vec<String> = Vec::new();
    out.push_str("\\ resilient coverage maximization\n");
    out.push_str("\\ x_p: trajectory p chosen; y_t_w: target t covered under attack w; z: objective\n");
    out.push_str("Maximize\n obj: z\nSubject To\n");

    for r in s.robots() {
        let terms: Vec<String> = r.trajectories.iter().map(|p| format!("x_p{p}")).collect();
        write_constraint(&mut out, &format!("assign_r{}", r.id), &terms, "= 1");
    }

    let mut in_attack = vec![false; n_robots];
    for t in s.targets() {
        for (wi, w) in attacks.iter().enumerate() {
            for &r in w {
                in_attack[r] = true;
            }
            let y = format!("y_t{}_w{}", t.id, wi);
            let terms: Vec<String> = covered_by[t.id]
                .iter()
                .filter(|&&p| !in_attack[s.trajectory(p).robot])
                .map(|p| format!("x_p{p}"))
                .collect();
            if terms.is_empty() {
                // empty sum: the constraint degenerates and the variable is
                // additionally pinned by an explicit bound
                forced_zero.push(y.clone());
            }
            write_constraint(&mut out, &format!("cov_t{}_w{}", t.id, wi), &terms, &format!("- {y} >= 0"));
            for &r in w {
                in_attack[r] = false;
            }
        }
    }

    for wi in 0..attacks.len() {
        let terms: Vec<String> = s
            .targets()
            .iter()
            .map(|t| format!("{} y_t{}_w{}", t.weight, t.id, wi))
            .collect();
        write_constraint(&mut out, &format!("val_w{wi}"), &terms, "- z >= 0");
    }

    out.push_str("Bounds\n");
    for y in &forced_zero {
        writeln!(out, " {y} = 0").expect("writing to String cannot fail");
    }

    out.push_str("Binaries\n");
    let mut names: Vec<String> = s.trajectories().iter().map(|p| format!("x_p{}", p.id)).collect();
    for t in s.targets() {
        for wi in 0..attacks.len() {
            names.push(format!("y_t{}_w{}", t.id, wi));
        }
    }
    for chunk in names.chunks(10) {
        writeln!(out, " {}", chunk.join(" ")).expect("writing to String cannot fail");
    }

    out.push_str("Generals\n z\nEnd\n");
    Ok(out)
}

/// Emits ` name: t1 + t2 + ... tail`, wrapping at eight terms per line;
/// continuation lines are indented two spaces.
fn write_constraint(out: &mut String, name: &str, terms: &[String], tail: &str) {
    write!(out, " {name}:").expect("writing to String cannot fail");
    for (i, term) in terms.iter().enumerate() {
        if i > 0 {
            out.push_str(" +");
        }
        if i > 0 && i % 8 == 0 {
            out.push_str("\n  ");
        } else {
            out.push(' ');
        }
        out.push_str(term);
    }
    out.push(' ');
    out.push_str(tail);
    out.push('\n');
}

fn subsets_lex(
    n: usize,
    max_size: usize,
    start: usize,
    stack: &mut Vec<RobotId>,
    out: &mut Vec<Vec<RobotId>>,
) {
    out.push(stack.clone());
    if stack.len() == max_size {
        return;
    }
    for r in start..n {
        stack.push(r);
        subsets_lex(n, max_size, r + 1, stack, out);
        stack.pop();
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scenario;

    fn section<'a>(text: &'a str, start: &str, end: &str) -> &'a str {
        let a = text.find(start).unwrap_or_else(|| panic!("missing section {start}"));
        let b = text[a..].find(end).map(|i| a + i).unwrap_or(text.len());
        &text[a..b]
    }

    #[test]
    fn tiny_export_has_the_expected_shape() {
        let text = export_ilp(&Scenario::tiny()).unwrap();
        let count = |prefix: &str| text.lines().filter(|l| l.starts_with(prefix)).count();
        assert_eq!(count(" assign_r"), 3);
        assert_eq!(count(" cov_t"), 24); // 6 targets x 4 attacks
        assert_eq!(count(" val_w"), 4); // empty attack + 3 singletons

        let binaries = section(&text, "Binaries", "Generals");
        let names: Vec<&str> = binaries.split_whitespace().skip(1).collect();
        assert_eq!(names.iter().filter(|n| n.starts_with("x_p")).count(), 6);
        assert_eq!(names.iter().filter(|n| n.starts_with("y_t")).count(), 24);

        // exactly the four (target, attack) pairs no surviving robot covers
        let bounds = section(&text, "Bounds", "Binaries");
        let forced: Vec<&str> =
            bounds.lines().skip(1).filter(|l| !l.is_empty()).collect();
        assert_eq!(
            forced,
            vec![" y_t0_w1 = 0", " y_t1_w1 = 0", " y_t3_w2 = 0", " y_t5_w3 = 0"]
        );

        assert!(text.contains(" assign_r0: x_p0 + x_p1 = 1"));
        assert!(text.contains(" cov_t0_w0: x_p0 + x_p1 - y_t0_w0 >= 0"));
        assert!(text.contains(" cov_t0_w1: - y_t0_w1 >= 0"));
        assert!(text.contains("val_w0: 1 y_t0_w0 + 1 y_t1_w0"));
        assert!(text.ends_with("Generals\n z\nEnd\n"));
    }

    #[test]
    fn attack_subsets_are_lexicographic_with_empty_first() {
        let mut out = Vec::new();
        subsets_lex(3, 2, 0, &mut Vec::new(), &mut out);
        assert_eq!(
            out,
            vec![
                vec![],
                vec![0],
                vec![0, 1],
                vec![0, 2],
                vec![1],
                vec![1, 2],
                vec![2]
            ]
        );
    }

    #[test]
    fn export_is_deterministic() {
        let s = Scenario::tiny();
        assert_eq!(export_ilp(&s).unwrap(), export_ilp(&s).unwrap());
    }

    #[test]
    fn export_refuses_over_budget() {
        match export_ilp_budgeted(&Scenario::tiny(), 3) {
            Err(IlpError::BudgetExceeded { attacks: 4, budget: 3 }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn weights_appear_as_objective_coefficients() {
        let s = Scenario::build(1, vec![2.5, 1.0], vec![vec![vec![0], vec![1]]]).unwrap();
        let text = export_ilp(&s).unwrap();
        assert!(text.contains(" val_w0: 2.5 y_t0_w0 + 1 y_t1_w0 - z >= 0"));
    }
}
