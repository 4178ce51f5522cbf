//! Angle rotation applied to relaxation vectors before hyperplane rounding.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const ANGLE_TOL: f64 = 1e-9;
const DEGENERATE_SIN: f64 = 1e-12;

/// `f_gamma(theta) = (1 - gamma) theta + gamma pi (1 - cos theta) / 2`.
pub fn rotate(theta: f64, gamma: f64) -> f64 {
    (1.0 - gamma) * theta + gamma * PI * (1.0 - theta.cos()) / 2.0
}

/// Angle between the rotated vectors `v'_i`, `v'_j` given the original
/// angles `theta_ij` between `v_i, v_j`, `theta_i` between `v_0, v_i` and
/// `theta_j` between `v_0, v_j`.
pub fn rotated_pair_angle(theta_ij: f64, theta_i: f64, theta_j: f64, gamma: f64) -> Result<f64> {
    for (name, a) in [
        ("theta_ij", theta_ij),
        ("theta_i", theta_i),
        ("theta_j", theta_j),
    ] {
        if !(-ANGLE_TOL..=PI + ANGLE_TOL).contains(&a) {
            return Err(Error::Domain(format!("{name} = {a} outside [0, pi]")));
        }
    }
    let lo = (theta_i - theta_j).abs();
    let hi = (theta_i + theta_j).min(2.0 * PI - theta_i - theta_j);
    if theta_ij < lo - ANGLE_TOL || theta_ij > hi + ANGLE_TOL {
        return Err(Error::Domain(format!(
            "angles ({theta_ij}, {theta_i}, {theta_j}) are not realizable by unit vectors"
        )));
    }
    Ok(rotated_pair_angle_clamped(
        theta_ij, theta_i, theta_j, gamma,
    ))
}

/// [`rotated_pair_angle`] without the realizability check; the spherical
/// term is clamped to `[-1, 1]`.
pub fn rotated_pair_angle_clamped(theta_ij: f64, theta_i: f64, theta_j: f64, gamma: f64) -> f64 {
    let (fi, fj) = (rotate(theta_i, gamma), rotate(theta_j, gamma));
    let (si, sj) = (theta_i.sin(), theta_j.sin());
    if si.abs() < DEGENERATE_SIN {
        return if theta_i < PI / 2.0 { fj } else { PI - fj };
    }
    if sj.abs() < DEGENERATE_SIN {
        return if theta_j < PI / 2.0 { fi } else { PI - fi };
    }
    let t = ((theta_ij.cos() - theta_i.cos() * theta_j.cos()) / (si * sj)).clamp(-1.0, 1.0);
    (fi.cos() * fj.cos() + t * fi.sin() * fj.sin())
        .clamp(-1.0, 1.0)
        .acos()
}

/// Angle between two vectors given their cosine, robust to rounding.
pub fn angle_from_cos(c: f64) -> f64 {
    c.clamp(-1.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn rotation_fixed_points() {
        for gamma in [0.0, 0.2, 0.722, 1.0] {
            assert_eq!(rotate(0.0, gamma), 0.0);
            assert_abs_diff_eq!(rotate(PI, gamma), PI, epsilon = 1e-15);
            assert_abs_diff_eq!(rotate(PI / 2.0, gamma), PI / 2.0, epsilon = 1e-15);
        }
        for k in 0..=100 {
            let t = PI * k as f64 / 100.0;
            assert_eq!(rotate(t, 0.0), t);
        }
    }

    #[test]
    fn rotation_is_monotone() {
        for gamma in [0.0, 0.3, 0.653, 1.0] {
            let mut prev = -1.0;
            for k in 0..=10_000 {
                let v = rotate(PI * k as f64 / 10_000.0, gamma);
                assert!(v >= prev && (0.0..=PI + 1e-15).contains(&v));
                prev = v;
            }
        }
    }

    #[test]
    fn pair_angle_identities() {
        assert_abs_diff_eq!(
            rotated_pair_angle(1.1, 0.7, 0.9, 0.0).unwrap(),
            1.1,
            epsilon = 1e-12
        );
        for x in [0.0, 0.4, 1.7, PI] {
            assert_abs_diff_eq!(
                rotated_pair_angle(x, PI / 2.0, PI / 2.0, 0.6).unwrap(),
                x,
                epsilon = 1e-12
            );
        }
        let (a, b, g) = (0.6, 1.3, 0.5);
        let want = rotate(a, g) + rotate(b, g);
        assert!(want <= PI);
        assert_abs_diff_eq!(
            rotated_pair_angle(a + b, a, b, g).unwrap(),
            want,
            epsilon = 1e-7
        );
    }

    #[test]
    fn degenerate_and_unrealizable() {
        assert_abs_diff_eq!(
            rotated_pair_angle(1.0, 0.0, 1.0, 0.4).unwrap(),
            rotate(1.0, 0.4),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            rotated_pair_angle(PI - 1.0, PI, 1.0, 0.4).unwrap(),
            PI - rotate(1.0, 0.4),
            epsilon = 1e-15
        );
        assert!(matches!(
            rotated_pair_angle(2.0, 0.3, 0.4, 0.1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            rotated_pair_angle(0.1, 4.0, 0.4, 0.1),
            Err(Error::Domain(_))
        ));
    }

    fn unit3(a: f64, b: f64) -> [f64; 3] {
        [a.sin() * b.cos(), a.sin() * b.sin(), a.cos()]
    }

    fn dot(u: &[f64; 3], v: &[f64; 3]) -> f64 {
        u.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// Rotates `v` in the plane of `v0 = e_z` to polar angle `f(theta)`.
    fn rotate_vec(v: &[f64; 3], gamma: f64) -> [f64; 3] {
        let theta = angle_from_cos(v[2]);
        let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
        let f = rotate(theta, gamma);
        if r < 1e-15 {
            return *v;
        }
        [f.sin() * v[0] / r, f.sin() * v[1] / r, f.cos()]
    }

    proptest! {
        #[test]
        fn matches_explicit_rotation(a in 0.01f64..3.13, b in 0.0f64..6.2, c in 0.01f64..3.13, d in 0.0f64..6.2, gamma in 0.0f64..1.0) {
            let (vi, vj) = (unit3(a, b), unit3(c, d));
            let ti = angle_from_cos(vi[2]);
            let tj = angle_from_cos(vj[2]);
            let tij = angle_from_cos(dot(&vi, &vj));
            let got = rotated_pair_angle(tij, ti, tj, gamma).unwrap();
            let want = angle_from_cos(dot(&rotate_vec(&vi, gamma), &rotate_vec(&vj, gamma)));
            prop_assert!((got - want).abs() < 1e-6, "{} vs {}", got, want);
        }
    }
}
