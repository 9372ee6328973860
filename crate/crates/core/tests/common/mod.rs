#![allow(dead_code)]

use kstab::curves::{fiber_classes, minus_one_curves, mori_generators};
use kstab::rational::q;
use kstab::ratlp::{cone_member, Membership};
use kstab::{DivClass, Rational, SurfaceModel};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn model(d: u8) -> SurfaceModel {
    SurfaceModel::new(d).unwrap()
}

pub fn small_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(lo * den..=hi * den);
    q(num, den)
}

/// `t (-K + sum x_i G_i)` for a few distinct (-1)-curves or fibers `G_i`,
/// `0 <= x_i < 1`, and a random scale `t`. Always ample.
pub fn random_ample(s: &SurfaceModel, rng: &mut ChaCha8Rng) -> DivClass {
    let curves = minus_one_curves(s);
    let fibers = fiber_classes(s);
    let mut l = s.anticanonical();
    let mut used: Vec<DivClass> = Vec::new();
    for _ in 0..rng.gen_range(0..=4) {
        let g = if !fibers.is_empty() && rng.gen_bool(0.3) {
            fibers[rng.gen_range(0..fibers.len())].clone()
        } else {
            curves[rng.gen_range(0..curves.len())].clone()
        };
        if used.contains(&g) {
            continue;
        }
        let den = rng.gen_range(2..=7);
        let x = q(rng.gen_range(0..den), den);
        l = l.add_scaled(&x, &g);
        used.push(g);
    }
    let t = q(rng.gen_range(1..=9), rng.gen_range(1..=4));
    l.scale(&t)
}

/// A class near `-K` with each coordinate moved by at most `spread`.
pub fn random_class(s: &SurfaceModel, rng: &mut ChaCha8Rng, spread: i64) -> DivClass {
    let mut l = s.anticanonical();
    l.h += small_rational(rng, -spread, spread, 6);
    for x in l.e.iter_mut() {
        *x += small_rational(rng, -spread, spread, 6);
    }
    l
}

/// `sum t_i G_i == target` checked directly.
pub fn substitutes(target: &DivClass, gens: &[DivClass], t: &[Rational]) -> bool {
    let s = model(9 - target.r() as u8);
    t.len() == gens.len()
        && t.iter().all(|x| !x.is_negative())
        && gens.iter().zip(t).fold(s.zero(), |acc, (g, x)| acc.add_scaled(x, g)) == *target
}

/// Membership of `K + lambda l` in the Mori cone, re-verifying every `Yes`.
pub fn member_at(s: &SurfaceModel, l: &DivClass, lambda: &Rational) -> Result<bool, String> {
    let gens = mori_generators(s);
    let target = s.canonical().add_scaled(lambda, l);
    match cone_member(&target, &gens).map_err(|e| e.to_string())? {
        Membership::Yes(t) => {
            if substitutes(&target, &gens, &t) {
                Ok(true)
            } else {
                Err(format!("membership witness for {target} fails substitution"))
            }
        }
        Membership::No => Ok(false),
    }
}

/// Bisection for the threshold: returns `(lo, hi)` with `K + lo l` outside
/// and `K + hi l` inside the cone, `hi - lo <= width`.
pub fn bisect_threshold(s: &SurfaceModel, l: &DivClass, width: &Rational) -> Result<(Rational, Rational), String> {
    let mut lo = Rational::zero();
    if member_at(s, l, &lo)? {
        return Err("K itself lies in the Mori cone".into());
    }
    let mut hi = Rational::one();
    while !member_at(s, l, &hi)? {
        lo = hi.clone();
        hi = &hi * q(2, 1);
    }
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / q(2, 1);
        if member_at(s, l, &mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}
