//! Projected gradient descent over the power set with Armijo backtracking.
//!
//! The first trial step is `initial_step`; later trial steps use the
//! Barzilai-Borwein (spectral) ratio of the last accepted move. Every
//! accepted step passes the Armijo test, so the objective sequence never
//! increases.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::simplex::project_onto_budget;

#[derive(Debug, Clone, PartialEq)]
pub struct PgOptions {
    pub max_iters: usize,
    /// Stop when `||p - Proj(p - grad)|| <= tol * (1 + |f|)`.
    pub tol: f64,
    pub initial_step: f64,
    pub shrink: f64,
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for PgOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            tol: 1e-8,
            initial_step: 1.0,
            shrink: 0.5,
            armijo: 1e-4,
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PgOutcome<T> {
    pub point: Vec<T>,
    pub value: T,
    pub gradient: Vec<T>,
    pub iterations: usize,
    pub pg_norm: T,
    pub converged: bool,
}

fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y) * (*x - *y))
        .sum::<T>()
        .sqrt()
}

pub(crate) fn projected_gradient_norm<T: Real>(point: &[T], gradient: &[T], budget: T) -> T {
    let trial: Vec<T> = point.iter().zip(gradient).map(|(p, g)| *p - *g).collect();
    dist(point, &project_onto_budget(&trial, budget))
}

/// Minimizes `objective` over `{p >= 0, sum p <= budget}` starting from the
/// projection of `start`. `observe` sees every accepted iterate and its value.
pub fn projected_gradient<T, F, O>(
    mut objective: F,
    start: &[T],
    budget: T,
    opts: &PgOptions,
    mut observe: O,
) -> Result<PgOutcome<T>>
where
    T: Real,
    F: FnMut(&[T]) -> Result<(T, Vec<T>)>,
    O: FnMut(&[T], T),
{
    let mut x = project_onto_budget(start, budget);
    let (mut f, mut g) = objective(&x)?;
    if !f.is_finite() {
        return Err(Error::NonFinite("objective at start point".into()));
    }
    observe(&x, f);

    let initial = T::lit(opts.initial_step);
    let (min_step, max_step) = (initial * T::lit(1e-12), initial * T::lit(1e12));
    let mut step = initial;
    let mut iterations = 0;
    let mut pg_norm = projected_gradient_norm(&x, &g, budget);

    while iterations < opts.max_iters {
        if pg_norm <= T::lit(opts.tol) * (T::one() + f.abs()) {
            break;
        }
        let mut s = step;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let trial: Vec<T> = x.iter().zip(&g).map(|(p, d)| *p - s * *d).collect();
            let q = project_onto_budget(&trial, budget);
            let slope: T = g.iter().zip(q.iter().zip(&x)).map(|(d, (a, b))| *d * (*a - *b)).sum();
            let (fq, gq) = objective(&q)?;
            if fq.is_finite() && fq <= f + T::lit(opts.armijo) * slope {
                accepted = Some((q, fq, gq));
                break;
            }
            s *= T::lit(opts.shrink);
        }
        let Some((q, fq, gq)) = accepted else {
            // line search exhausted: at the round-off floor
            break;
        };
        iterations += 1;

        let sy: T = q
            .iter()
            .zip(&x)
            .zip(gq.iter().zip(&g))
            .map(|((a, b), (c, d))| (*a - *b) * (*c - *d))
            .sum();
        let ss: T = q.iter().zip(&x).map(|(a, b)| (*a - *b) * (*a - *b)).sum();
        step = if sy > T::zero() { ss / sy } else { s + s };
        step = step.max(min_step).min(max_step);

        let moved = ss > T::zero();
        x = q;
        f = fq;
        g = gq;
        observe(&x, f);
        pg_norm = projected_gradient_norm(&x, &g, budget);
        if !moved {
            break;
        }
    }

    let converged = pg_norm <= T::lit(opts.tol) * (T::one() + f.abs());
    Ok(PgOutcome {
        point: x,
        value: f,
        gradient: g,
        iterations,
        pg_norm,
        converged,
    })
}
