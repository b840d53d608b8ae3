//! Deterministic low-discrepancy points: shifted Halton sequences in the
//! unit cube and their images on the sphere and in boxes.

use crate::sim::RngStream;

const PRIMES: [u32; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// `n` points of the Halton sequence in `[0,1)^d` (indices `1..=n`) with a
/// Cranley–Patterson rotation drawn from `seed`. `d` is at most 24.
pub fn halton(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(d <= PRIMES.len(), "halton: dimension above {}", PRIMES.len());
    let mut u = RngStream::new(seed, 0).uniforms();
    let shift: Vec<f64> = (0..d).map(|_| u.next()).collect();
    (1..=n as u64)
        .map(|i| {
            (0..d)
                .map(|j| (radical_inverse(i, PRIMES[j]) + shift[j]).fract())
                .collect()
        })
        .collect()
}

/// Inverse of the standard normal CDF (Acklam's rational approximation,
/// relative error below 1.2e-9). `p` must lie in `(0, 1)`.
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const LOW: f64 = 0.02425;
    debug_assert!(p > 0.0 && p < 1.0);
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - LOW {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// `n` quasi-uniform unit vectors in `ℝ^d`: Halton points pushed through the
/// Gaussian quantile coordinatewise and normalized.
pub fn sphere_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    halton(n, d, seed)
        .into_iter()
        .filter_map(|u| {
            let g: Vec<f64> = u
                .iter()
                .map(|&p| normal_quantile(p.clamp(1e-12, 1.0 - 1e-12)))
                .collect();
            let r = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            (r > 1e-12).then(|| g.iter().map(|v| v / r).collect())
        })
        .collect()
}

/// `n` quasi-random points in the box `[-K, K]^d`.
pub fn box_points(n: usize, d: usize, half_width: f64, seed: u64) -> Vec<Vec<f64>> {
    halton(n, d, seed)
        .into_iter()
        .map(|u| u.iter().map(|&p| half_width * (2.0 * p - 1.0)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn van_der_corput() {
        let got: Vec<f64> = (1..=4).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(got, [0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn quantile_known_values() {
        assert!(normal_quantile(0.5).abs() < 1e-12);
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-8);
        assert!((normal_quantile(0.01) + 2.326_347_874_040_841).abs() < 1e-8);
        assert!((normal_quantile(1e-10) + 6.361_340_902_404_056).abs() < 1e-7);
    }

    #[test]
    fn sphere_points_are_unit_and_spread() {
        let pts = sphere_points(512, 3, 7);
        assert_eq!(pts.len(), 512);
        let mut mean = [0.0; 3];
        for p in &pts {
            let r: f64 = p.iter().map(|v| v * v).sum();
            assert!((r - 1.0).abs() < 1e-12);
            for i in 0..3 {
                mean[i] += p[i] / 512.0;
            }
        }
        assert!(mean.iter().all(|m| m.abs() < 0.05), "{mean:?}");
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(sphere_points(16, 2, 1), sphere_points(16, 2, 1));
        assert_ne!(sphere_points(16, 2, 1), sphere_points(16, 2, 2));
    }

    #[test]
    fn box_points_inside() {
        for p in box_points(100, 2, 3.0, 0) {
            assert!(p.iter().all(|v| v.abs() <= 3.0));
        }
    }
}
