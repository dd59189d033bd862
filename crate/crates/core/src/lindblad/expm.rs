//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant (Higham 2005).

use nalgebra::{DMatrix, SMatrix};

use super::C64;

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which Padé(13) meets double precision without scaling.
const THETA13: f64 = 5.371_920_351_148_152;

fn one_norm<const N: usize>(a: &SMatrix<C64, N, N>) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn expm<const N: usize>(a: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * C64::from(2f64.powi(-squarings));

    let b = |k: usize| C64::from(PADE13[k]);
    let id = SMatrix::<C64, N, N>::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;

    let u_inner = a6 * (a6 * b(13) + a4 * b(11) + a2 * b(9)) + a6 * b(7) + a4 * b(5) + a2 * b(3) + id * b(1);
    let u = a * u_inner;
    let v = a6 * (a6 * b(12) + a4 * b(10) + a2 * b(8)) + a6 * b(6) + a4 * b(4) + a2 * b(2) + id * b(0);

    let denominator = DMatrix::from_column_slice(N, N, (v - u).as_slice());
    let numerator = DMatrix::from_column_slice(N, N, (v + u).as_slice());
    let solved = denominator
        .lu()
        .solve(&numerator)
        .expect("Padé denominator is nonsingular after scaling");
    let mut result = SMatrix::<C64, N, N>::from_column_slice(solved.as_slice());
    for _ in 0..squarings {
        result = result * result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    #[test]
    fn zero_is_identity() {
        let z = SMatrix::<C64, 4, 4>::zeros();
        assert_eq!(expm(&z), SMatrix::<C64, 4, 4>::identity());
    }

    #[test]
    fn diagonal_matches_scalar_exp() {
        let d = SMatrix::<C64, 3, 3>::from_diagonal(&nalgebra::Vector3::new(
            C64::new(-30.0, 2.0),
            C64::new(0.5, 0.0),
            C64::new(0.0, 100.0),
        ));
        let e = expm(&d);
        for k in 0..3 {
            let exact = d[(k, k)].exp();
            assert!((e[(k, k)] - exact).norm() < 1e-12 * exact.norm().max(1.0));
        }
    }

    #[test]
    fn rotation_generator() {
        // exp(θ [[0, −1], [1, 0]]) = [[cos θ, −sin θ], [sin θ, cos θ]]
        let theta = 7.3;
        let a = Matrix2::new(C64::from(0.0), C64::from(-theta), C64::from(theta), C64::from(0.0));
        let e = expm(&a);
        assert!((e[(0, 0)].re - theta.cos()).abs() < 1e-13);
        assert!((e[(1, 0)].re - theta.sin()).abs() < 1e-13);
    }

    #[test]
    fn nilpotent_is_exact_polynomial() {
        let a = Matrix2::new(C64::from(0.0), C64::from(40.0), C64::from(0.0), C64::from(0.0));
        let e = expm(&a);
        assert!((e[(0, 1)].re - 40.0).abs() < 1e-11);
        assert!((e[(0, 0)].re - 1.0).abs() < 1e-14);
    }
}
