//! Geometry of the power set `{p >= 0, sum p <= P}`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::scalar::Real;

/// Euclidean projection onto `{x >= 0, sum x = total}`, sort based.
pub fn project_onto_face<T: Real>(y: &[T], total: T) -> Vec<T> {
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumulative = T::zero();
    let mut theta = T::zero();
    for (i, u) in sorted.iter().enumerate() {
        cumulative += *u;
        let candidate = (cumulative - total) / T::from_usize_lossy(i + 1);
        if *u - candidate > T::zero() {
            theta = candidate;
        }
    }
    let mut x: Vec<T> = y.iter().map(|v| (*v - theta).max(T::zero())).collect();
    // large inputs leave theta with an absolute error far above ulp(total)
    let sum: T = x.iter().copied().sum();
    if sum > total {
        let scale = total / sum;
        x.iter_mut().for_each(|v| *v *= scale);
    }
    x
}

/// Euclidean projection onto `{x >= 0, sum x <= budget}`.
///
/// The face projection is only needed when clipping alone leaves the
/// budget violated.
pub fn project_onto_budget<T: Real>(y: &[T], budget: T) -> Vec<T> {
    let clipped: Vec<T> = y.iter().map(|v| v.max(T::zero())).collect();
    if clipped.iter().copied().sum::<T>() <= budget {
        clipped
    } else {
        project_onto_face(y, budget)
    }
}

/// Uniform draw from the solid simplex `{p >= 0, sum p <= budget}` using
/// `users + 1` exponential spacings (the last one is the unused budget).
pub fn uniform_in_budget<T: Real, R: Rng + ?Sized>(rng: &mut R, users: usize, budget: T) -> Vec<T> {
    let spacings: Vec<f64> = (0..=users).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = spacings.iter().sum();
    spacings[..users]
        .iter()
        .map(|e| budget * T::lit(e / total))
        .collect()
}

/// Number of lattice points `{i in N^k : sum i <= resolution}`, i.e.
/// `C(resolution + k, k)`, saturating at `u128::MAX`.
pub fn lattice_count(users: usize, resolution: usize) -> u128 {
    let mut acc: u128 = 1;
    for j in 1..=users as u128 {
        acc = match acc.checked_mul(resolution as u128 + j) {
            Some(v) => v / j,
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic enumeration of `{i in N^k : sum i <= resolution}`, first
/// coordinate slowest.
#[derive(Debug, Clone)]
pub struct Lattice {
    resolution: usize,
    current: Option<Vec<usize>>,
}

impl Lattice {
    pub fn new(users: usize, resolution: usize) -> Self {
        Self {
            resolution,
            current: Some(vec![0; users]),
        }
    }
}

impl Iterator for Lattice {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let mut sum: usize = next.iter().sum();
        let mut pos = next.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            if sum < self.resolution {
                next[pos] += 1;
                self.current = Some(next);
                break;
            }
            sum -= next[pos];
            next[pos] = 0;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projection_of_huge_steps_stays_in_budget() {
        let budget = 1.4516500677773299;
        for scale in [1e6, 1e9, 1e12] {
            let y = [scale * 0.37, scale * 0.37 + 0.3, -scale];
            let x = project_onto_budget(&y, budget);
            assert!(x.iter().sum::<f64>() <= budget);
            assert!(x.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn projection_keeps_feasible_points() {
        let y = [1.0, 2.0, 0.5];
        assert_eq!(project_onto_budget(&y, 10.0), y.to_vec());
        assert_eq!(project_onto_budget(&[-1.0, 2.0], 10.0), vec![0.0, 2.0]);
    }

    #[test]
    fn projection_onto_face_sums_to_total() {
        let x = project_onto_budget(&[8.0, 6.0, -3.0], 10.0);
        assert!((x.iter().sum::<f64>() - 10.0).abs() < 1e-12);
        assert_eq!(x, vec![6.0, 4.0, 0.0]);
        let p = project_onto_face::<f64>(&[0.3, 0.3, 0.3], 1.0);
        for v in p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn lattice_matches_binomial() {
        for k in 1..5 {
            for r in 0..7 {
                let pts: Vec<_> = Lattice::new(k, r).collect();
                assert_eq!(pts.len() as u128, lattice_count(k, r));
                assert!(pts.iter().all(|p| p.iter().sum::<usize>() <= r));
            }
        }
        assert_eq!(lattice_count(3, 40), 12341);
        assert_eq!(
            Lattice::new(1, 2).collect::<Vec<_>>(),
            vec![vec![0], vec![1], vec![2]]
        );
    }

    #[test]
    fn uniform_draws_are_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p: Vec<f64> = uniform_in_budget(&mut rng, 4, 10.0);
            assert!(p.iter().all(|v| *v >= 0.0));
            assert!(p.iter().sum::<f64>() <= 10.0);
        }
    }
}
