use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

fn check<T: Real>(samples: &[(T, T)]) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: samples.len() });
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(invalid(format!("sample times not strictly increasing at t = {}", w[1].0)));
        }
    }
    Ok(())
}

/// Composite trapezoid rule over `(time, value)` samples.
pub fn quadrature_trapezoid<T: Real>(samples: &[(T, T)]) -> Result<T> {
    check(samples)?;
    let half = T::lit(0.5);
    Ok(samples.windows(2).map(|w| half * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum())
}

/// Running trapezoid integral; the first entry is zero.
pub fn cumulative_trapezoid<T: Real>(samples: &[(T, T)]) -> Result<Vec<T>> {
    check(samples)?;
    let half = T::lit(0.5);
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(samples.len());
    out.push(acc);
    for w in samples.windows(2) {
        acc = acc + half * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
        out.push(acc);
    }
    Ok(out)
}

/// Trapezoid rule for `f` on `[a, b]` with `panels` equal panels.
pub fn trapezoid_fn<T: Real>(a: T, b: T, panels: usize, mut f: impl FnMut(T) -> T) -> T {
    let panels = panels.max(1);
    let n = T::from_usize(panels).unwrap();
    let h = (b - a) / n;
    let mut sum = (f(a) + f(b)) * T::lit(0.5);
    for k in 1..panels {
        sum = sum + f(a + T::from_usize(k).unwrap() * h);
    }
    sum * h
}
