use crate::scalar::Real;

/// Result of a simplex search.
#[derive(Debug, Clone)]
pub struct Minimum<T> {
    pub point: Vec<T>,
    pub value: T,
    pub evaluations: usize,
}

/// Nelder–Mead minimization from `start` with initial edge `step`.
pub fn nelder_mead<T: Real>(mut f: impl FnMut(&[T]) -> T, start: &[T], step: T, tol: T, max_evals: usize) -> Minimum<T> {
    let n = start.len();
    let (alpha, gamma, rho, sigma) = (T::one(), T::lit(2.0), T::lit(0.5), T::lit(0.5));
    let mut simplex: Vec<Vec<T>> = vec![start.to_vec()];
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] = p[i] + step;
        simplex.push(p);
    }
    let mut values: Vec<T> = simplex.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let nt = T::from_usize(n).unwrap();
    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if (values[n] - values[0]).abs() <= tol {
            break;
        }
        let centroid: Vec<T> = (0..n).map(|k| simplex[..n].iter().map(|p| p[k]).sum::<T>() / nt).collect();
        let along = |s: T| -> Vec<T> { (0..n).map(|k| centroid[k] + s * (simplex[n][k] - centroid[k])).collect() };
        let xr = along(-alpha);
        let fr = f(&xr);
        evals += 1;
        if fr < values[0] {
            let xe = along(-gamma);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let xc = if fr < values[n] { along(-rho) } else { along(rho) };
            let fc = f(&xc);
            evals += 1;
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                for i in 1..=n {
                    let p: Vec<T> = (0..n).map(|k| simplex[0][k] + sigma * (simplex[i][k] - simplex[0][k])).collect();
                    values[i] = f(&p);
                    simplex[i] = p;
                }
                evals += n;
            }
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap();
    Minimum { point: simplex[best].clone(), value: values[best], evaluations: evals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let m = nelder_mead(
            |p: &[f64]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            &[-1.2, 1.0],
            0.5,
            1e-20,
            20000,
        );
        assert!((m.point[0] - 1.0).abs() < 1e-5 && (m.point[1] - 1.0).abs() < 1e-5, "{:?}", m.point);
    }
}
