//! The light-cone side: finding λ with q(λ) > 0 in a polyhedron, or a linear
//! functional separating the polyhedron from the open light cone.
//!
//! The search maximizes the concave function f(λ) = λ_0 - |λ'| (positive
//! exactly on the open light cone) by conditional-gradient steps with an
//! exact LP oracle. At a maximizer the gradient (1, -λ'/|λ'|) is the
//! separating functional, which is rounded outward so it stays in the closed
//! dual cone and then checked exactly by one more LP.

use super::{fmt_vec, realizable, slack_system, unit, DecideOptions, EliminationProof, Verdict};
use crate::arith::{self, Rational};
use crate::polyhedra::{self, LpOutcome, Polyhedron, Sense};
use num_traits::{One, Signed, Zero};

pub fn lorentz_q(l: &[Rational]) -> Rational {
    let mut q = &l[0] * &l[0];
    for x in &l[1..] {
        q -= x * x;
    }
    q
}

/// λ_0 > 0 and q(λ) > 0.
pub fn in_open_light_cone(l: &[Rational]) -> bool {
    l[0].is_positive() && lorentz_q(l).is_positive()
}

/// h_0 > 0 and h_0² >= Σh_i². Such h pairs positively with every point of
/// the open light cone, by Cauchy-Schwarz.
pub fn is_dual_light_cone(h: &[Rational]) -> bool {
    !h.is_empty() && h[0].is_positive() && !lorentz_q(h).is_negative()
}

fn floats(x: &[Rational]) -> Vec<f64> {
    x.iter().map(arith::to_f64).collect()
}

fn f_value(x: &[f64]) -> f64 {
    x[0] - x[1..].iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn gradient(x: &[f64]) -> Vec<f64> {
    let r = x[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut g = vec![1.0];
    if r > 0.0 {
        g.extend(x[1..].iter().map(|v| -v / r));
    } else {
        g.extend(std::iter::repeat_n(0.0, x.len() - 1));
    }
    g
}

/// Rational r >= |x'|.
fn norm_upper(x: &[Rational]) -> Rational {
    let ss: Rational = x[1..].iter().map(|v| v * v).sum();
    if let Some(r) = arith::rational_sqrt(&ss) {
        return r;
    }
    let mut r = arith::dyadic(arith::to_f64(&ss).sqrt() * (1.0 + 1e-12), 40);
    if !r.is_positive() {
        r = &ss + Rational::one();
    }
    let bump = Rational::one() + Rational::new(1.into(), (1u64 << 30).into());
    while &r * &r < ss {
        r *= &bump;
    }
    r
}

/// The gradient of f at `x`, rounded into the closed dual light cone.
pub(crate) fn separating_functional(x: &[Rational]) -> Vec<Rational> {
    let mut h = vec![Rational::one()];
    if x[1..].iter().all(|v| v.is_zero()) {
        h.extend(std::iter::repeat_n(Rational::zero(), x.len() - 1));
        return h;
    }
    let r = norm_upper(x);
    h.extend(x[1..].iter().map(|v| -v / &r));
    debug_assert!(is_dual_light_cone(&h));
    h
}

/// Golden-section search for the maximum of a concave function on [0, 1].
fn golden_max(phi: impl Fn(f64) -> f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..80 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if phi(a) < phi(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    let s = (lo + hi) / 2.0;
    if phi(1.0) >= phi(s) {
        1.0
    } else {
        s
    }
}

fn combine(x: &[Rational], y: &[Rational], s: &Rational) -> Vec<Rational> {
    x.iter().zip(y).map(|(a, b)| a + s * (b - a)).collect()
}

pub(crate) struct Ascent {
    pub best: Vec<Rational>,
    pub hit: Option<Vec<Rational>>,
}

/// Conditional-gradient ascent on f over `p`, whose first `nl` coordinates
/// are λ; `p` must be bounded in those coordinates.
pub(crate) fn ascend(p: &Polyhedron, nl: usize, start: Vec<Rational>, iters: usize) -> Ascent {
    let mut x = start;
    for _ in 0..iters {
        if in_open_light_cone(&x[..nl]) {
            break;
        }
        let xf = floats(&x[..nl]);
        let g = gradient(&xf);
        let mut obj: Vec<Rational> = g.iter().map(|v| arith::dyadic(*v, 24)).collect();
        obj.resize(p.dim, Rational::zero());
        let y = match polyhedra::optimize_linear(p, &obj, Sense::Maximize) {
            LpOutcome::Optimal { point, .. } => point,
            _ => break,
        };
        let yf = floats(&y[..nl]);
        let gap: f64 = g.iter().zip(yf.iter().zip(&xf)).map(|(gi, (a, b))| gi * (a - b)).sum();
        let scale = 1.0 + xf[0].abs();
        if gap <= 1e-12 * scale {
            break;
        }
        let phi = |s: f64| {
            let z: Vec<f64> = xf.iter().zip(&yf).map(|(a, b)| a + s * (b - a)).collect();
            f_value(&z)
        };
        let s = golden_max(phi);
        let mut s_rat = arith::dyadic(s, 20);
        if !s_rat.is_positive() {
            s_rat = Rational::new(1.into(), (1u64 << 20).into());
        }
        if s_rat > Rational::one() {
            s_rat = Rational::one();
        }
        if phi(arith::to_f64(&s_rat)) <= f_value(&xf) + 1e-15 * scale {
            break;
        }
        x = combine(&x, &y, &s_rat);
    }
    let hit = in_open_light_cone(&x[..nl]).then(|| x[..nl].to_vec());
    Ascent { best: x[..nl].to_vec(), hit }
}

/// `real` with every λ_i <= m added.
fn bounded(real: &Polyhedron, m: &Rational) -> Polyhedron {
    let mut p = real.clone();
    for i in 0..p.dim {
        p.add_le(unit(p.dim, i), m.clone());
    }
    p
}

/// x + ε(p - x) for the first ε = 2^-k with q > 0; `x` must have q(x) > 0.
pub(crate) fn pull_inside(x: &[Rational], p: &[Rational]) -> Option<Vec<Rational>> {
    let mut eps = Rational::new(1.into(), 2.into());
    for _ in 0..400 {
        let w = combine(x, p, &eps);
        if in_open_light_cone(&w) {
            return Some(w);
        }
        eps /= Rational::from_integer(2.into());
    }
    None
}

/// x + s·r for the first s = 2^k with q > 0; `r` must lie in the open cone.
pub(crate) fn along_ray(x: &[Rational], r: &[Rational]) -> Option<Vec<Rational>> {
    let mut s = Rational::one();
    for _ in 0..400 {
        let w: Vec<Rational> = x.iter().zip(r).map(|(a, b)| a + &s * b).collect();
        if in_open_light_cone(&w) {
            return Some(w);
        }
        s *= Rational::from_integer(2.into());
    }
    None
}

enum Separation {
    Proof(Verdict),
    Ray(Vec<Rational>),
    Failed(Rational),
}

fn separate(real: &Polyhedron, x: &[Rational]) -> Separation {
    let h = separating_functional(x);
    match polyhedra::optimize_linear(real, &h, Sense::Maximize) {
        LpOutcome::Optimal { value, certificate, .. } if !value.is_positive() => {
            Separation::Proof(Verdict::Eliminated { proof: EliminationProof::LorentzSeparation { h, certificate } })
        }
        LpOutcome::Optimal { value, .. } => Separation::Failed(value),
        LpOutcome::Unbounded { ray, .. } => Separation::Ray(ray),
        _ => Separation::Failed(Rational::zero()),
    }
}

/// Everything after strict positivity is settled: `p` is a strictly positive
/// solution with min entry 2·`floor` and q(p) <= 0.
pub(crate) fn light_cone_search(
    real: &Polyhedron,
    p: &[Rational],
    floor: &Rational,
    opts: &DecideOptions,
) -> Result<Verdict, Vec<String>> {
    let n = real.dim - 1;
    let mut notes = Vec::new();
    // The largest λ_0 among strictly positive solutions is the cheapest probe.
    let s = slack_system(real, Some(floor));
    match polyhedra::optimize_linear(&s, &unit(n + 2, 0), Sense::Maximize) {
        LpOutcome::Unbounded { point, ray } => {
            let (x, r) = (&point[..=n], &ray[..=n]);
            if in_open_light_cone(x) {
                return Ok(realizable(x.to_vec()));
            }
            if in_open_light_cone(r) {
                if let Some(w) = along_ray(x, r) {
                    return Ok(realizable(w));
                }
            }
        }
        LpOutcome::Optimal { point, .. } if in_open_light_cone(&point[..=n]) => {
            return Ok(realizable(point[..=n].to_vec()));
        }
        _ => {}
    }

    let mut m = p[0].clone().max(Rational::one()) * Rational::from_integer(4.into());
    for _ in 0..3 {
        let pm = bounded(real, &m);
        let asc = ascend(&pm, n + 1, p.to_vec(), opts.ascent_iterations);
        if let Some(x) = asc.hit {
            if let Some(w) = pull_inside(&x, p) {
                return Ok(realizable(w));
            }
        }
        match separate(real, &asc.best) {
            Separation::Proof(v) => return Ok(v),
            Separation::Ray(r) => {
                if in_open_light_cone(&r) {
                    if let Some(w) = along_ray(p, &r) {
                        return Ok(realizable(w));
                    }
                }
            }
            Separation::Failed(value) => {
                notes.push(format!(
                    "ascent within λ <= {} stopped at {} without separating (h·λ reaches {})",
                    arith::format_rational(&m),
                    fmt_vec(&asc.best),
                    arith::format_rational(&value)
                ));
            }
        }
        m *= Rational::from_integer(16.into());
    }

    match polyhedra::enumerate_vertices_rays(real, opts.basis_cap) {
        Ok(vr) => {
            for r in &vr.rays {
                if in_open_light_cone(r) {
                    if let Some(w) = along_ray(p, r) {
                        return Ok(realizable(w));
                    }
                }
            }
            for v in &vr.vertices {
                if in_open_light_cone(v) {
                    if let Some(w) = pull_inside(v, p) {
                        return Ok(realizable(w));
                    }
                }
            }
            if vr.rays.is_empty() && vr.lineality.is_empty() && !vr.vertices.is_empty() {
                let x = vertex_ascent(&vr.vertices);
                if in_open_light_cone(&x) {
                    if let Some(w) = pull_inside(&x, p) {
                        return Ok(realizable(w));
                    }
                }
                if let Separation::Proof(v) = separate(real, &x) {
                    return Ok(v);
                }
                notes.push(format!("vertex ascent over {} vertices did not separate", vr.vertices.len()));
            } else {
                notes.push("unbounded polyhedron without a light-cone ray".into());
            }
        }
        Err(e) => notes.push(format!("vertex enumeration skipped: {e}")),
    }
    Err(notes)
}

/// Conditional-gradient ascent on f over the convex hull of explicit
/// vertices, in floating point; the result is rounded to a rational point
/// inside the hull (a convex combination with dyadic weights).
fn vertex_ascent(vertices: &[Vec<Rational>]) -> Vec<Rational> {
    let vf: Vec<Vec<f64>> = vertices.iter().map(|v| floats(v)).collect();
    let k = vf.len();
    let mut w = vec![0.0f64; k];
    let best0 = (0..k).max_by(|&a, &b| f_value(&vf[a]).total_cmp(&f_value(&vf[b]))).expect("non-empty");
    w[best0] = 1.0;
    let point = |w: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; vf[0].len()];
        for (wi, v) in w.iter().zip(&vf) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += wi * vi;
            }
        }
        x
    };
    for _ in 0..4000 {
        let x = point(&w);
        let g = gradient(&x);
        let dot = |v: &[f64]| g.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let j = (0..k).max_by(|&a, &b| dot(&vf[a]).total_cmp(&dot(&vf[b]))).expect("non-empty");
        if dot(&vf[j]) - dot(&x) <= 1e-14 * (1.0 + x[0].abs()) {
            break;
        }
        let phi = |s: f64| {
            let z: Vec<f64> = x.iter().zip(&vf[j]).map(|(a, b)| a + s * (b - a)).collect();
            f_value(&z)
        };
        let s = golden_max(phi);
        for wi in w.iter_mut() {
            *wi *= 1.0 - s;
        }
        w[j] += s;
    }
    // Dyadic weights summing to exactly one.
    let denom: i64 = 1 << 30;
    let mut ints: Vec<i64> = w.iter().map(|x| (x * denom as f64).floor().max(0.0) as i64).collect();
    let rest = denom - ints.iter().sum::<i64>();
    let top = (0..k).max_by(|&a, &b| w[a].total_cmp(&w[b])).expect("non-empty");
    ints[top] += rest;
    let mut x = vec![Rational::zero(); vertices[0].len()];
    for (c, v) in ints.iter().zip(vertices) {
        if *c == 0 {
            continue;
        }
        let c = Rational::new((*c).into(), denom.into());
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += &c * vi;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_vec};

    #[test]
    fn q_values() {
        assert_eq!(lorentz_q(&rat_vec(&[4, 1, 1, 1, 1, 1, 1, 1])), rat(9, 1));
        assert_eq!(lorentz_q(&rat_vec(&[3, 1, 1, 1, 1, 1, 1, 1, 1, 1])), rat(0, 1));
        assert!(!in_open_light_cone(&rat_vec(&[-2, 1])));
    }

    #[test]
    fn separating_functional_is_in_dual_cone() {
        for x in [vec![1, 2, 3], vec![5, 0, 0], vec![2, 1, 1], vec![7, 3, 5, 1]] {
            let h = separating_functional(&rat_vec(&x));
            assert!(is_dual_light_cone(&h), "{x:?}");
        }
    }

    #[test]
    fn segment_outside_cone_is_separated() {
        // λ_0 = 1, λ_1 = 2 (a single point outside the cone): h·λ <= 0 proves it.
        let mut p = Polyhedron::new(2);
        p.add_eq(rat_vec(&[1, 0]), rat(1, 1));
        p.add_eq(rat_vec(&[0, 1]), rat(2, 1));
        match separate(&p, &rat_vec(&[1, 2])) {
            Separation::Proof(Verdict::Eliminated { proof: EliminationProof::LorentzSeparation { h, certificate } }) => {
                assert!(is_dual_light_cone(&h));
                assert!(certificate.proves_upper_bound(&p, &h, &Rational::zero()));
            }
            _ => panic!("expected a separation"),
        }
    }

    #[test]
    fn vertex_ascent_finds_midpoint() {
        // Endpoints (1, ±1) sit on the cone boundary; the midpoint (1, 0) is inside.
        let x = vertex_ascent(&[rat_vec(&[1, 1]), rat_vec(&[1, -1])]);
        assert!(in_open_light_cone(&x));
    }
}
