//! Bundled test profiles with closed-form derivatives and analytic `u(0)`.

use std::f64::consts::LN_2;

use super::TestFunction;

const R_MAX: f64 = 10.0;

macro_rules! profile {
    ($name:expr, $u0:expr, $u:expr, $du:expr, $d2u:expr) => {
        TestFunction::new($name, $u0, R_MAX, $u, $du)
            .expect("bundled profile is valid")
            .with_second_derivative($d2u)
    };
}

/// Profiles with `u(0) != 0`: their `u/r` carries a point source.
pub fn nonvanishing() -> Vec<TestFunction> {
    vec![
        profile!("exp_decay", 1.0, |r: f64| (-r).exp(), |r: f64| -(-r).exp(), |r: f64| (-r).exp()),
        profile!("shifted_quadratic", 2.0, |r: f64| 2.0 + r * r, |r: f64| 2.0 * r, |_| 2.0),
        profile!("cosine", 1.0, f64::cos, |r: f64| -r.sin(), |r: f64| -r.cos()),
        profile!(
            "lorentzian",
            1.0,
            |r: f64| 1.0 / (1.0 + r),
            |r: f64| -1.0 / (1.0 + r).powi(2),
            |r: f64| 2.0 / (1.0 + r).powi(3)
        ),
        profile!(
            "gaussian",
            1.0,
            |r: f64| (-r * r).exp(),
            |r: f64| -2.0 * r * (-r * r).exp(),
            |r: f64| (4.0 * r * r - 2.0) * (-r * r).exp()
        ),
        profile!(
            "shifted_cube",
            1.0,
            |r: f64| (1.0 + r).powi(3),
            |r: f64| 3.0 * (1.0 + r).powi(2),
            |r: f64| 6.0 * (1.0 + r)
        ),
        profile!("shifted_log", LN_2, |r: f64| (2.0 + r).ln(), |r: f64| 1.0 / (2.0 + r), |r: f64| -1.0
            / (2.0 + r).powi(2)),
        profile!(
            "shifted_sqrt",
            1.0,
            |r: f64| (1.0 + r).sqrt(),
            |r: f64| 0.5 / (1.0 + r).sqrt(),
            |r: f64| -0.25 * (1.0 + r).powf(-1.5)
        ),
        profile!(
            "damped_parabola",
            1.0,
            |r: f64| (1.0 - r * r) * (-r).exp(),
            |r: f64| (r * r - 2.0 * r - 1.0) * (-r).exp(),
            |r: f64| (-r * r + 4.0 * r - 1.0) * (-r).exp()
        ),
        profile!("coulomb_green", 1.0, |_| 1.0, |_| 0.0, |_| 0.0),
        profile!("negative_affine", -0.5, |r: f64| r - 0.5, |_| 1.0, |_| 0.0),
        profile!("offset_sine", 3.0, |r: f64| 3.0 - r.sin(), |r: f64| -r.cos(), f64::sin),
    ]
}

/// Profiles with `u(0) = 0`: no point source survives.
pub fn vanishing() -> Vec<TestFunction> {
    vec![
        profile!("sine", 0.0, f64::sin, f64::cos, |r: f64| -r.sin()),
        profile!(
            "hydrogenic",
            0.0,
            |r: f64| r * (-r).exp(),
            |r: f64| (1.0 - r) * (-r).exp(),
            |r: f64| (r - 2.0) * (-r).exp()
        ),
        profile!("square", 0.0, |r: f64| r * r, |r: f64| 2.0 * r, |_| 2.0),
        profile!(
            "tanh",
            0.0,
            f64::tanh,
            |r: f64| 1.0 / r.cosh().powi(2),
            |r: f64| -2.0 * r.tanh() / r.cosh().powi(2)
        ),
        profile!(
            "rational",
            0.0,
            |r: f64| r / (1.0 + r * r),
            |r: f64| (1.0 - r * r) / (1.0 + r * r).powi(2),
            |r: f64| (2.0 * r.powi(3) - 6.0 * r) / (1.0 + r * r).powi(3)
        ),
        profile!(
            "damped_sinh",
            0.0,
            |r: f64| 0.5 * ((-r).exp() - (-3.0 * r).exp()),
            |r: f64| 0.5 * (-(-r).exp() + 3.0 * (-3.0 * r).exp()),
            |r: f64| 0.5 * ((-r).exp() - 9.0 * (-3.0 * r).exp())
        ),
        profile!("identity", 0.0, |r: f64| r, |_| 1.0, |_| 0.0),
    ]
}

pub fn suite() -> Vec<TestFunction> {
    let mut all = nonvanishing();
    all.extend(vanishing());
    all
}

pub fn names() -> Vec<String> {
    suite().iter().map(|f| f.label().to_owned()).collect()
}

pub fn by_name(name: &str) -> Option<TestFunction> {
    suite().into_iter().find(|f| f.label() == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_sizes_and_names() {
        assert!(nonvanishing().len() >= 10);
        assert!(vanishing().len() >= 5);
        assert!(nonvanishing().iter().all(|f| f.value_at_zero() != 0.0));
        assert!(vanishing().iter().all(|f| f.value_at_zero() == 0.0));
        let mut n = names();
        let len = n.len();
        n.dedup();
        assert_eq!(n.len(), len);
        assert!(by_name("gaussian").is_some());
        assert!(by_name("nope").is_none());
    }

    #[test]
    fn second_derivatives_match_differences() {
        for f in suite() {
            for r in [0.3, 1.7, 4.2] {
                let h = 1e-5;
                let fd = (f.derivative(r + h) - f.derivative(r - h)) / (2.0 * h);
                assert!((fd - f.second_derivative(r)).abs() < 1e-6 * fd.abs().max(1.0), "{}", f.label());
            }
        }
    }
}
