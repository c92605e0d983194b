//! Locating atoms: peaks of the smoothed density are refined to a point and
//! then measured by boundary limits.

use num_complex::Complex64;
use opfree_core::atoms::{atom_mass, AtomReport};
use opfree_core::cauchy_cf::stieltjes_density;
use opfree_core::Result;

/// Grid candidates lighter than this are treated as continuous spectrum.
pub const MIN_SCAN_MASS: f64 = 1e-3;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

pub fn scan<F>(mut g: F, xs: &[f64], epsilon: f64, at: &[f64]) -> Result<Vec<AtomReport>>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let dens = stieltjes_density(&mut g, xs, epsilon)?;
    let d = &dens.densities;
    let h = xs[1] - xs[0];
    let mut found: Vec<AtomReport> = Vec::new();
    for i in 0..d.len() {
        let left = if i == 0 { f64::NEG_INFINITY } else { d[i - 1] };
        let right = d.get(i + 1).copied().unwrap_or(f64::NEG_INFINITY);
        if !(d[i] > 0.0 && d[i] > left && d[i] >= right) {
            continue;
        }
        let r = refine(&mut g, xs[i], h)?;
        if found.iter().any(|a| (a.location - r).abs() <= 0.5 * h) {
            continue;
        }
        let rep = atom_mass(&mut g, r)?;
        log::debug!("candidate {r}: mass {:e}", rep.mass);
        if rep.mass >= MIN_SCAN_MASS {
            found.push(rep);
        }
    }
    for &r in at {
        found.retain(|a| a.location != r);
        found.push(atom_mass(&mut g, r)?);
    }
    found.sort_by(|a, b| a.location.total_cmp(&b.location));
    Ok(found)
}

/// Golden-section search for the peak of `−Im G(x + iε)` on `[x0 − h, x0 + h]`
/// with `ε` well below the grid spacing. Keeps `x0` unless something beats it.
fn refine<F>(g: &mut F, x0: f64, h: f64) -> Result<f64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let eps = h / 64.0;
    let mut f = |x: f64| -> Result<f64> { Ok(-g(Complex64::new(x, eps))?.im) };
    let (mut a, mut b) = (x0 - h, x0 + h);
    let mut c = b - GOLDEN * (b - a);
    let mut e = a + GOLDEN * (b - a);
    let (mut fc, mut fe) = (f(c)?, f(e)?);
    let stop = 1e-12 * x0.abs().max(1.0);
    for _ in 0..200 {
        if b - a <= stop {
            break;
        }
        if fc >= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + GOLDEN * (b - a);
            fe = f(e)?;
        }
    }
    let best = 0.5 * (a + b);
    let best = if f(x0)? >= f(best)? { x0 } else { best };
    // search noise only; keep round inputs round
    let snapped = (best * 1e9).round() / 1e9;
    Ok(if (snapped - best).abs() <= 1e-11 * best.abs().max(1.0) { snapped } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use opfree_core::cauchy_cf::grid;
    use opfree_core::measure::cauchy_exact;
    use opfree_core::DiscreteMeasure;

    #[test]
    fn finds_off_grid_atoms() {
        let mu = DiscreteMeasure::new(vec![-0.8137, 0.25, 1.4], vec![0.2, 0.5, 0.3]).unwrap();
        let xs = grid(-2.0, 2.0, 201).unwrap();
        let reps = scan(|z| cauchy_exact(&mu, z), &xs, 1e-3, &[]).unwrap();
        assert_eq!(reps.len(), 3);
        for (rep, (x, w)) in reps.iter().zip(mu.points().iter().zip(mu.weights())) {
            assert!((rep.location - x).abs() < 1e-8, "{rep:?}");
            assert!((rep.mass - w).abs() < 1e-6, "{rep:?}");
        }
    }

    #[test]
    fn requested_points_are_always_reported() {
        let mu = DiscreteMeasure::point_mass(0.0);
        let xs = grid(-1.0, 1.0, 101).unwrap();
        let reps = scan(|z| cauchy_exact(&mu, z), &xs, 1e-3, &[0.5, 0.0]).unwrap();
        assert_eq!(reps.len(), 2);
        assert_eq!(reps[0].location, 0.0);
        assert!((reps[0].mass - 1.0).abs() < 1e-9);
        assert!(reps[1].mass < 1e-9);
    }
}
