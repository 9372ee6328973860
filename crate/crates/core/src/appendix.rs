//! Standalone evaluator for the two slope inequalities in five parameters
//! `1 >= a_1 >= ... >= a_5 >= 0` and `delta >= 0`, with a brute-force grid
//! oracle.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{q, Rational};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AppendixInput {
    a: Vec<Rational>,
    delta: Rational,
}

impl AppendixInput {
    /// Rejects inputs that are not sorted or leave `[0, 1]`.
    pub fn new(a: Vec<Rational>, delta: Rational) -> Result<Self> {
        if a.len() != 5 {
            return Err(Error::Input(format!("expected 5 coefficients, got {}", a.len())));
        }
        if a[0] > Rational::one() || a[4].is_negative() || a.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!("need 1 >= a1 >= ... >= a5 >= 0, got {a:?}")));
        }
        if delta.is_negative() {
            return Err(Error::Domain(format!("delta must be nonnegative, got {delta}")));
        }
        Ok(AppendixInput { a, delta })
    }

    pub fn a(&self) -> &[Rational] {
        &self.a
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }
}

/// Largest of `a2, a2+a3, a2+a4, a2+a5, a3+a4, a3+a5, a4+a5, a2+a3+a4,
/// a2+a3+a5, a2+a4+a5, a3+a4+a5, a2+a3+a4+a5` not exceeding 1.
pub fn n_value(inp: &AppendixInput) -> Rational {
    let [_, a2, a3, a4, a5] = <&[Rational; 5]>::try_from(inp.a.as_slice()).expect("length checked");
    let candidates = [
        a2.clone(),
        a2 + a3,
        a2 + a4,
        a2 + a5,
        a3 + a4,
        a3 + a5,
        a4 + a5,
        a2 + a3 + a4,
        a2 + a3 + a5,
        a2 + a4 + a5,
        a3 + a4 + a5,
        a2 + a3 + a4 + a5,
    ];
    candidates
        .into_iter()
        .filter(|c| *c <= Rational::one())
        .max()
        .unwrap_or_else(Rational::zero)
}

/// `2 / (3 + 2 a1 + 2 delta + N)`.
pub fn first_lhs(inp: &AppendixInput) -> Rational {
    q(2, 1) / (q(3, 1) + q(2, 1) * &inp.a[0] + q(2, 1) * &inp.delta + n_value(inp))
}

/// `(2/3)(4 + 2 delta + sum a) / (4 + 4 delta + 2 sum a - sum a^2)`.
pub fn first_rhs(inp: &AppendixInput) -> Rational {
    let sum: Rational = inp.a.iter().sum();
    let sq: Rational = inp.a.iter().map(|x| x * x).sum();
    q(2, 3) * (q(4, 1) + q(2, 1) * &inp.delta + &sum) / (q(4, 1) + q(4, 1) * &inp.delta + q(2, 1) * &sum - sq)
}

/// Which of the four cases applies, 1-based, tested in order.
pub fn alpha_case(inp: &AppendixInput) -> u8 {
    let a = &inp.a;
    let one = Rational::one();
    if &a[1] + &a[2] <= &one + &a[3] {
        1
    } else if &a[1] + &a[3] <= one {
        2
    } else if &a[2] + &a[3] <= one {
        3
    } else {
        4
    }
}

pub fn alpha_piecewise(inp: &AppendixInput) -> Rational {
    let a = &inp.a;
    let tail = match alpha_case(inp) {
        1 => &a[1] + &a[2] + &a[3],
        2 => &a[1] + &a[3],
        3 => &a[2] + &a[3],
        _ => a[1].clone(),
    };
    q(2, 1) / (q(3, 1) + q(2, 1) * &a[0] + q(2, 1) * &inp.delta + tail)
}

/// `(8 + 4 delta + 2 sum_1^4 a) / (12 + 12 delta + 6 sum_1^4 a - 3 sum_1^4 a^2)`.
pub fn second_rhs(inp: &AppendixInput) -> Rational {
    let sum: Rational = inp.a[..4].iter().sum();
    let sq: Rational = inp.a[..4].iter().map(|x| x * x).sum();
    (q(8, 1) + q(4, 1) * &inp.delta + q(2, 1) * &sum)
        / (q(12, 1) + q(12, 1) * &inp.delta + q(6, 1) * &sum - q(3, 1) * sq)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PropA1 {
    pub ineq1: bool,
    pub ineq2: bool,
    pub strict1: bool,
    pub strict2: bool,
}

pub fn prop_a1(inp: &AppendixInput) -> PropA1 {
    let (l1, r1) = (first_lhs(inp), first_rhs(inp));
    let (l2, r2) = (alpha_piecewise(inp), second_rhs(inp));
    PropA1 {
        ineq1: l1 <= r1,
        ineq2: l2 <= r2,
        strict1: l1 < r1,
        strict2: l2 < r2,
    }
}

/// Both inequalities hold, strictly unless `a1 = delta = 0`, where both are
/// equalities.
pub fn is_expected(inp: &AppendixInput, p: &PropA1) -> bool {
    let slice = inp.a[0].is_zero() && inp.delta.is_zero();
    p.ineq1 && p.ineq2 && p.strict1 != slice && p.strict2 != slice
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AppendixReport {
    pub max_denominator: u32,
    pub delta_max: Rational,
    pub points: usize,
    pub equality_cases: Vec<AppendixInput>,
    pub counterexamples: Vec<AppendixInput>,
}

/// Checks every input whose coordinates are multiples of `1/max_denominator`,
/// with `a_i` in `[0, 1]` and `delta` in `[0, delta_max]`.
pub fn grid_oracle(max_denominator: u32, delta_max: &Rational) -> Result<AppendixReport> {
    if max_denominator == 0 {
        return Err(Error::Input("max denominator must be at least 1".into()));
    }
    if delta_max.is_negative() {
        return Err(Error::Domain(format!(
            "delta window must be nonnegative, got {delta_max}"
        )));
    }
    let den = max_denominator as i64;
    let steps: Vec<Rational> = (0..=den).rev().map(|k| q(k, den)).collect();
    let mut tuples = Vec::new();
    let mut cur = Vec::with_capacity(5);
    fill(&steps, 0, &mut cur, &mut tuples);
    let mut deltas = Vec::new();
    let mut k = 0i64;
    while q(k, den) <= *delta_max {
        deltas.push(q(k, den));
        k += 1;
    }
    let jobs: Vec<(&Vec<Rational>, &Rational)> =
        tuples.iter().flat_map(|a| deltas.iter().map(move |d| (a, d))).collect();
    let (points, mut equality_cases, mut counterexamples) = jobs
        .par_iter()
        .map(|(a, d)| {
            let inp = AppendixInput::new((*a).clone(), (*d).clone()).expect("grid points are sorted");
            let p = prop_a1(&inp);
            let eq = !p.strict1 && !p.strict2 && p.ineq1 && p.ineq2;
            let bad = !is_expected(&inp, &p);
            (
                1usize,
                if eq { vec![inp.clone()] } else { vec![] },
                if bad { vec![inp] } else { vec![] },
            )
        })
        .reduce(
            || (0, Vec::new(), Vec::new()),
            |mut x, y| {
                x.0 += y.0;
                x.1.extend(y.1);
                x.2.extend(y.2);
                x
            },
        );
    equality_cases.sort();
    counterexamples.sort();
    Ok(AppendixReport {
        max_denominator,
        delta_max: delta_max.clone(),
        points,
        equality_cases,
        counterexamples,
    })
}

fn fill(steps: &[Rational], start: usize, cur: &mut Vec<Rational>, out: &mut Vec<Vec<Rational>>) {
    if cur.len() == 5 {
        out.push(cur.clone());
        return;
    }
    for i in start..steps.len() {
        cur.push(steps[i].clone());
        fill(steps, i, cur, out);
        cur.pop();
    }
}
