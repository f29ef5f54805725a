use rayon::prelude::*;

use crate::error::{Error, Result};

/// Finite-difference stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FdScheme {
    #[default]
    Forward,
    Central,
}

/// Finite-difference gradient; components are evaluated in parallel and
/// written to their own slots, so results do not depend on scheduling.
pub fn gradient<F>(f: F, x: &[f64], step: f64, scheme: FdScheme) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if !(step > 0.0) {
        return Err(Error::Domain(format!("finite-difference step {step} must be positive")));
    }
    let f0 = match scheme {
        FdScheme::Forward => {
            let v = f(x)?;
            if !v.is_finite() {
                return Err(Error::NonFinite { what: "function at base point".into(), index: 0 });
            }
            v
        }
        FdScheme::Central => 0.0,
    };
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let h = step * x[i].abs().max(1.0);
            let mut xp = x.to_vec();
            xp[i] = x[i] + h;
            let fp = f(&xp)?;
            let g = match scheme {
                FdScheme::Forward => (fp - f0) / h,
                FdScheme::Central => {
                    xp[i] = x[i] - h;
                    let fm = f(&xp)?;
                    (fp - fm) / (2.0 * h)
                }
            };
            if g.is_finite() {
                Ok(g)
            } else {
                Err(Error::NonFinite { what: "finite-difference derivative".into(), index: i })
            }
        })
        .collect()
}

/// Finite-difference Jacobian of a vector function with `rows` outputs,
/// returned row-major (`rows x x.len()`). Columns are evaluated in parallel.
pub fn jacobian<F>(f: F, x: &[f64], rows: usize, step: f64, scheme: FdScheme) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()> + Sync,
{
    if !(step > 0.0) {
        return Err(Error::Domain(format!("finite-difference step {step} must be positive")));
    }
    let n = x.len();
    let mut base = vec![0.0; rows];
    if scheme == FdScheme::Forward {
        f(x, &mut base)?;
    }
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let h = step * x[i].abs().max(1.0);
            let mut xp = x.to_vec();
            xp[i] = x[i] + h;
            let mut plus = vec![0.0; rows];
            f(&xp, &mut plus)?;
            let col: Vec<f64> = match scheme {
                FdScheme::Forward => plus.iter().zip(&base).map(|(p, b)| (p - b) / h).collect(),
                FdScheme::Central => {
                    xp[i] = x[i] - h;
                    let mut minus = vec![0.0; rows];
                    f(&xp, &mut minus)?;
                    plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect()
                }
            };
            if col.iter().all(|v| v.is_finite()) {
                Ok(col)
            } else {
                Err(Error::NonFinite { what: "finite-difference Jacobian column".into(), index: i })
            }
        })
        .collect::<Result<_>>()?;
    let mut out = vec![0.0; rows * n];
    for (i, col) in columns.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            out[r * n + i] = *v;
        }
    }
    Ok(out)
}
