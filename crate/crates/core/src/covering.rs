//! Covering-number upper bounds: how many centers `Q_j` suffice so that every
//! `P_θ` lies within f-divergence `ε²` of one of them.

use crate::divergence::{f_divergence_slices, ConvexGenerator, DiscreteDistribution};
use crate::error::{BoundError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringBound {
    pub epsilon: f64,
    /// Extended positive integer, stored as a float so that volumetric counts
    /// far beyond `u64` stay representable.
    pub count: f64,
    pub construction: String,
}

/// Ceiling that ignores relative rounding noise below `1e-12`.
pub(crate) fn ceil_count(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    (x * (1.0 - 1e-12)).ceil().max(1.0)
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(BoundError::OutOfRange {
            name,
            value: v,
            expected: "positive and finite",
        })
    }
}

fn volumetric(count: f64, epsilon: f64) -> CoveringBound {
    CoveringBound {
        epsilon,
        count,
        construction: "volumetric".into(),
    }
}

/// Gaussian location `N(θ, σ²I)`, `‖θ‖ ≤ Γ`, KL balls of radius `ε²`:
/// `(3Γ / (√2 ε σ))^d` while `√2 ε σ ≤ Γ`, otherwise the origin alone.
pub fn gaussian_location_kl_cover(gamma: f64, sigma: f64, d: usize, epsilon: f64) -> Result<CoveringBound> {
    positive("gamma", gamma)?;
    positive("sigma", sigma)?;
    positive("epsilon", epsilon)?;
    if d == 0 {
        return Err(BoundError::InvalidProblem("dimension must be at least 1".into()));
    }
    let radius = std::f64::consts::SQRT_2 * epsilon * sigma;
    if radius > gamma {
        return Ok(volumetric(1.0, epsilon));
    }
    Ok(volumetric(ceil_count((3.0 * gamma / radius).powi(d as i32)), epsilon))
}

/// Same family with χ² balls: the Euclidean radius is `σ √log(1 + ε²)`.
pub fn gaussian_location_chi2_cover(gamma: f64, sigma: f64, d: usize, epsilon: f64) -> Result<CoveringBound> {
    positive("gamma", gamma)?;
    positive("sigma", sigma)?;
    positive("epsilon", epsilon)?;
    if d == 0 {
        return Err(BoundError::InvalidProblem("dimension must be at least 1".into()));
    }
    let radius = sigma * (epsilon * epsilon).ln_1p().sqrt();
    if radius > gamma {
        return Ok(volumetric(1.0, epsilon));
    }
    Ok(volumetric(ceil_count((3.0 * gamma / radius).powi(d as i32)), epsilon))
}

/// Spiked covariance `N(0, I + θθᵀ)` with `n` samples:
/// `(36 n / log(1 + ε²))^{d/2}`, valid for `log(1 + ε²) ≤ 4n` and `n ≥ d/2`.
pub fn spiked_covariance_chi2_cover(n: usize, d: usize, epsilon: f64) -> Result<CoveringBound> {
    positive("epsilon", epsilon)?;
    if d == 0 || n == 0 {
        return Err(BoundError::InvalidProblem("n and d must be at least 1".into()));
    }
    if (2 * n) < d {
        return Err(BoundError::Precondition(format!("n = {n} is below d/2 = {}", d as f64 / 2.0)));
    }
    let level = (epsilon * epsilon).ln_1p();
    if level > 4.0 * n as f64 {
        return Err(BoundError::Precondition(format!(
            "log(1 + eps^2) = {level} exceeds 4n = {}",
            4 * n
        )));
    }
    let count = (36.0 * n as f64 / level).powf(d as f64 / 2.0);
    Ok(volumetric(ceil_count(count), epsilon))
}

/// Farthest-point greedy cover with centers drawn from the rows; the returned
/// count is certified by checking every row against every chosen center.
pub fn greedy_cover_finite(
    f: &ConvexGenerator,
    rows: &[DiscreteDistribution],
    epsilon: f64,
) -> Result<CoveringBound> {
    positive("epsilon", epsilon)?;
    let (count, _) = greedy_centers(f, rows, epsilon)?;
    Ok(CoveringBound {
        epsilon,
        count: count as f64,
        construction: "greedy".into(),
    })
}

/// Indices of the centers chosen by [`greedy_cover_finite`].
pub fn greedy_centers(
    f: &ConvexGenerator,
    rows: &[DiscreteDistribution],
    epsilon: f64,
) -> Result<(usize, Vec<usize>)> {
    if rows.is_empty() {
        return Err(BoundError::InvalidProblem("no rows to cover".into()));
    }
    let m = rows[0].len();
    if let Some(r) = rows.iter().find(|r| r.len() != m) {
        return Err(BoundError::AlphabetMismatch { left: m, right: r.len() });
    }
    let radius = epsilon * epsilon;
    let div = |i: usize, j: usize| f_divergence_slices(f, rows[i].weights(), rows[j].weights());
    let mut centers = vec![0usize];
    let mut gap: Vec<f64> = (0..rows.len()).map(|i| div(i, 0)).collect();
    loop {
        let (far, worst) = gap
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
        if worst <= radius {
            break;
        }
        centers.push(far);
        for (i, g) in gap.iter_mut().enumerate() {
            *g = g.min(div(i, far));
        }
    }
    let certified = (0..rows.len()).all(|i| centers.iter().any(|&c| div(i, c) <= radius));
    if !certified {
        return Err(BoundError::InvalidProblem("greedy cover failed certification".into()));
    }
    Ok((centers.len(), centers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kl_cover_examples() {
        let c = gaussian_location_kl_cover(10.0, 1.0, 1, 1.0).unwrap();
        assert_eq!(c.count, 22.0);
        let boundary = 10.0 / (std::f64::consts::SQRT_2 * 1.0);
        for d in 1..=4 {
            let c = gaussian_location_kl_cover(10.0, 1.0, d, boundary).unwrap();
            assert_eq!(c.count, 3f64.powi(d as i32));
        }
        assert_eq!(gaussian_location_kl_cover(10.0, 1.0, 3, 1e6).unwrap().count, 1.0);
        assert!(gaussian_location_kl_cover(-1.0, 1.0, 1, 1.0).is_err());
        assert!(gaussian_location_kl_cover(1.0, 1.0, 1, 0.0).is_err());
    }

    #[test]
    fn chi2_cover_examples() {
        let eps = (1f64.exp() - 1.0).sqrt();
        assert_eq!(gaussian_location_chi2_cover(10.0, 1.0, 1, eps).unwrap().count, 30.0);
        for d in 1..=6 {
            let eps = ((d as f64).exp() - 1.0).sqrt();
            let gamma = (d as f64).sqrt();
            let c = gaussian_location_chi2_cover(gamma, 1.0, d, eps).unwrap();
            assert_eq!(c.count, 3f64.powi(d as i32));
        }
        assert_eq!(gaussian_location_chi2_cover(1.0, 1.0, 2, 100.0).unwrap().count, 1.0);
    }

    #[test]
    fn spiked_cover_examples() {
        for d in [2usize, 4, 8] {
            let eps = ((d as f64).exp() - 1.0).sqrt();
            let c = spiked_covariance_chi2_cover(d, d, eps).unwrap();
            assert_abs_diff_eq!(c.count, 36f64.powf(d as f64 / 2.0), epsilon = 1e-6 * c.count);
        }
        let (n, d) = (64usize, 8usize);
        let level = (n as f64 / 2.0).min(d as f64);
        let eps = level.exp_m1().sqrt();
        let c = spiked_covariance_chi2_cover(n, d, eps).unwrap();
        let expected = (36.0 * n as f64 / level).powf(d as f64 / 2.0);
        assert_abs_diff_eq!(c.count, expected.ceil(), epsilon = 1.0);
        assert!(spiked_covariance_chi2_cover(1, 1, 1e3).is_err());
        assert!(spiked_covariance_chi2_cover(1, 4, 1.0).is_err());
    }

    #[test]
    fn monotone_in_epsilon() {
        let grid: Vec<f64> = (0..60).map(|k| 10f64.powf(-2.0 + 0.07 * k as f64)).collect();
        for w in grid.windows(2) {
            let a = gaussian_location_kl_cover(7.0, 0.5, 3, w[0]).unwrap().count;
            let b = gaussian_location_kl_cover(7.0, 0.5, 3, w[1]).unwrap().count;
            assert!(b <= a);
            let a = gaussian_location_chi2_cover(7.0, 0.5, 3, w[0]).unwrap().count;
            let b = gaussian_location_chi2_cover(7.0, 0.5, 3, w[1]).unwrap().count;
            assert!(b <= a);
        }
    }

    #[test]
    fn kl_cover_is_constructive_in_one_dimension() {
        let (gamma, sigma) = (10.0, 1.0);
        for &eps in &[0.05, 0.3, 1.0, 3.0] {
            let m = gaussian_location_kl_cover(gamma, sigma, 1, eps).unwrap().count as usize;
            // equally spaced centers; the worst point is half a spacing away
            let spacing = 2.0 * gamma / m as f64;
            let centers: Vec<f64> = (0..m).map(|j| -gamma + spacing * (j as f64 + 0.5)).collect();
            let worst = (0..=2000)
                .map(|k| -gamma + 2.0 * gamma * k as f64 / 2000.0)
                .map(|x| {
                    centers
                        .iter()
                        .map(|c| (x - c).powi(2) / (2.0 * sigma * sigma))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max);
            assert!(worst <= eps * eps + 1e-12, "eps={eps}: {worst}");
        }
    }

    fn dist(w: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(w.to_vec()).unwrap()
    }

    #[test]
    fn greedy_examples() {
        let kl = ConvexGenerator::kl();
        let same = vec![dist(&[0.3, 0.7]); 5];
        assert_eq!(greedy_cover_finite(&kl, &same, 0.1).unwrap().count, 1.0);

        let rows = vec![dist(&[0.6, 0.4]), dist(&[0.4, 0.6]), dist(&[0.5, 0.5])];
        assert_eq!(greedy_cover_finite(&kl, &rows, 1.0).unwrap().count, 1.0);

        // four rows at mutual KL about 1
        let k = 4;
        let theta = 0.35;
        let rows: Vec<DiscreteDistribution> = (0..k)
            .map(|i| {
                let mut w = vec![theta / (k - 1) as f64; k];
                w[i] = 1.0 - theta;
                dist(&w)
            })
            .collect();
        let d01 = f_divergence_slices(&kl, rows[0].weights(), rows[1].weights());
        assert!(d01 > 0.5 && d01 < 2.0, "{d01}");
        let c = greedy_cover_finite(&kl, &rows, 0.5f64.sqrt()).unwrap();
        assert_eq!(c.count, 4.0);
    }
}
