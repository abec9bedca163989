//! Central finite-difference gradient checking.
//!
//! Used by tests as an oracle that is independent of the tape: it only ever
//! evaluates a loss closure at perturbed inputs. All checks run in f64.

/// Central difference `(f(x+h e_i) - f(x-h e_i)) / 2h` at coordinate `i`.
pub fn central_diff(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let mut xp = x.to_vec();
    xp[i] += h;
    let fp = f(&xp);
    xp[i] = x[i] - h;
    let fm = f(&xp);
    (fp - fm) / (2.0 * h)
}

/// Relative error with an absolute floor for near-zero pairs.
pub fn rel_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-8 {
        // Both effectively zero: report the absolute gap against the floor.
        (a - b).abs() / 1e-8
    } else {
        (a - b).abs() / scale
    }
}

/// Worst relative error between analytic gradient entries and central
/// differences at the given coordinates.
pub fn max_rel_error_at(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x: &[f64],
    analytic: &[f64],
    coords: &[usize],
    h: f64,
) -> f64 {
    let mut worst = 0.0f64;
    for &i in coords {
        let fd = central_diff(f, x, i, h);
        let err = rel_error(fd, analytic[i]);
        if err > worst {
            worst = err;
        }
    }
    worst
}

/// Directional derivative check: compares `g · u` against the central
/// difference of `f` along direction `u`. Covers every coordinate at once.
pub fn directional_rel_error(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x: &[f64],
    analytic: &[f64],
    direction: &[f64],
    h: f64,
) -> f64 {
    assert_eq!(x.len(), direction.len());
    let xp: Vec<f64> = x.iter().zip(direction).map(|(v, u)| v + h * u).collect();
    let xm: Vec<f64> = x.iter().zip(direction).map(|(v, u)| v - h * u).collect();
    let fd = (f(&xp) - f(&xm)) / (2.0 * h);
    let an: f64 = analytic.iter().zip(direction).map(|(g, u)| g * u).sum();
    rel_error(fd, an)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_diff_on_quadratic() {
        let mut f = |x: &[f64]| x[0] * x[0] + 3.0 * x[1];
        let x = [2.0, 5.0];
        assert!((central_diff(&mut f, &x, 0, 1e-5) - 4.0).abs() < 1e-8);
        assert!((central_diff(&mut f, &x, 1, 1e-5) - 3.0).abs() < 1e-8);
    }

    #[test]
    fn directional_matches_dot() {
        let mut f = |x: &[f64]| x[0] * x[1];
        let x = [2.0, -3.0];
        let g = [-3.0, 2.0];
        let u = [0.6, 0.8];
        assert!(directional_rel_error(&mut f, &x, &g, &u, 1e-5) < 1e-8);
    }
}
