use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Initial value problem `y' = rhs(t, y)`, `y(t0) = y0`.
///
/// The right-hand side writes its value into the output slice.
pub struct OdeProblem<T, F> {
    t0: T,
    y0: Vec<T>,
    rhs: F,
}

impl<T, F> OdeProblem<T, F>
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
{
    pub fn new(t0: T, y0: Vec<T>, rhs: F) -> Result<Self> {
        if y0.is_empty() {
            return Err(invalid("ODE dimension must be positive"));
        }
        if !t0.is_finite() || y0.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite initial data"));
        }
        let problem = Self { t0, y0, rhs };
        let mut probe = vec![T::zero(); problem.dimension()];
        problem.eval(t0, &problem.y0, &mut probe)?;
        Ok(problem)
    }

    pub fn dimension(&self) -> usize {
        self.y0.len()
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn y0(&self) -> &[T] {
        &self.y0
    }

    /// Evaluates the right-hand side, rejecting non-finite values.
    pub fn eval(&self, t: T, y: &[T], out: &mut [T]) -> Result<()> {
        (self.rhs)(t, y, out);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { time: t.as_f64() });
        }
        Ok(())
    }
}

/// Sampled solution: `states[k]` is the state at `times[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
}

impl<T: Copy> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(T, &[T])> {
        Some((*self.times.last()?, self.states.last()?.as_slice()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, &[T])> {
        self.times.iter().copied().zip(self.states.iter().map(Vec::as_slice))
    }
}

/// Fixed-step time grid `t0 + k dt`, final step shortened to land on `t_end`.
#[derive(Debug, Clone, Copy)]
pub struct StepGrid<T> {
    t0: T,
    dt: T,
    t_end: T,
    steps: usize,
}

impl<T: Real> StepGrid<T> {
    pub fn new(t0: T, dt: T, t_end: T) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(invalid(format!("time step must be positive, got {dt}")));
        }
        if !(t_end > t0) || !t_end.is_finite() {
            return Err(invalid(format!("t_end = {t_end} must exceed t0 = {t0}")));
        }
        let guard = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
        let ratio = (t_end - t0) / dt;
        let steps = (ratio * (T::one() - guard)).ceil().to_usize().unwrap_or(0).max(1);
        Ok(Self { t0, dt, t_end, steps })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Time at the start of step `k` (`k == steps` gives `t_end`).
    pub fn time(&self, k: usize) -> T {
        if k >= self.steps {
            self.t_end
        } else {
            self.t0 + T::from_usize(k).unwrap() * self.dt
        }
    }
}

/// Scratch buffers for one RK4 step.
pub struct Rk4Workspace<T> {
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    tmp: Vec<T>,
}

impl<T: Real> Rk4Workspace<T> {
    pub fn new(dimension: usize) -> Self {
        let z = vec![T::zero(); dimension];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }
}

/// One classical RK4 step of a fallible field.
pub fn rk4_step<T, G>(f: &mut G, t: T, y: &[T], h: T, ws: &mut Rk4Workspace<T>, out: &mut [T]) -> Result<()>
where
    T: Real,
    G: FnMut(T, &[T], &mut [T]) -> Result<()>,
{
    let half = h / T::lit(2.0);
    let n = y.len();
    f(t, y, &mut ws.k1)?;
    for i in 0..n {
        ws.tmp[i] = y[i] + half * ws.k1[i];
    }
    f(t + half, &ws.tmp, &mut ws.k2)?;
    for i in 0..n {
        ws.tmp[i] = y[i] + half * ws.k2[i];
    }
    f(t + half, &ws.tmp, &mut ws.k3)?;
    for i in 0..n {
        ws.tmp[i] = y[i] + h * ws.k3[i];
    }
    f(t + h, &ws.tmp, &mut ws.k4)?;
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    for i in 0..n {
        out[i] = y[i] + sixth * (ws.k1[i] + two * ws.k2[i] + two * ws.k3[i] + ws.k4[i]);
    }
    Ok(())
}

pub const MIDPOINT_MAX_ITERATIONS: usize = 50;

/// One implicit midpoint step `y1 = y + h f(t + h/2, (y + y1)/2)` by fixed-point iteration.
///
/// Returns the final iteration increment; the caller decides convergence.
pub fn midpoint_step<T, G>(f: &mut G, t: T, y: &[T], h: T, scratch: &mut [T], mid: &mut [T], out: &mut [T]) -> Result<(T, bool)>
where
    T: Real,
    G: FnMut(T, &[T], &mut [T]) -> Result<()>,
{
    let n = y.len();
    let half = h / T::lit(2.0);
    let tm = t + half;
    f(t, y, scratch)?;
    for i in 0..n {
        out[i] = y[i] + h * scratch[i];
    }
    let accept = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
    let floor = T::epsilon() * T::lit(2.0);
    let mut previous = T::infinity();
    let mut diff = T::infinity();
    for _ in 0..MIDPOINT_MAX_ITERATIONS {
        for i in 0..n {
            mid[i] = (y[i] + out[i]) / T::lit(2.0);
        }
        f(tm, mid, scratch)?;
        let mut scale = T::one();
        diff = T::zero();
        for i in 0..n {
            let next = y[i] + h * scratch[i];
            diff = diff.max((next - out[i]).abs());
            scale = scale.max(next.abs());
            out[i] = next;
        }
        let rel = diff / scale;
        if rel <= floor || (rel <= accept && rel >= previous) {
            return Ok((diff, true));
        }
        previous = rel;
    }
    let scale = out.iter().fold(T::one(), |m, v| m.max(v.abs()));
    Ok((diff, diff / scale <= accept))
}

fn drive<T, F, S>(problem: &OdeProblem<T, F>, dt: T, t_end: T, stride: usize, mut step: S) -> Result<Trajectory<T>>
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
    S: FnMut(usize, T, &[T], T, &mut [T]) -> Result<()>,
{
    if stride == 0 {
        return Err(invalid("output stride must be positive"));
    }
    let grid = StepGrid::new(problem.t0(), dt, t_end)?;
    let n = grid.steps();
    let mut times = Vec::with_capacity(n / stride + 2);
    let mut states = Vec::with_capacity(n / stride + 2);
    times.push(problem.t0());
    states.push(problem.y0().to_vec());
    let mut y = problem.y0().to_vec();
    let mut next = y.clone();
    for k in 0..n {
        let t = grid.time(k);
        let h = grid.time(k + 1) - t;
        step(k, t, &y, h, &mut next)?;
        std::mem::swap(&mut y, &mut next);
        if (k + 1) % stride == 0 || k + 1 == n {
            times.push(grid.time(k + 1));
            states.push(y.clone());
        }
    }
    Ok(Trajectory { times, states })
}

/// Classical RK4 sampled at every step.
pub fn integrate_rk4<T, F>(problem: &OdeProblem<T, F>, dt: T, t_end: T) -> Result<Trajectory<T>>
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
{
    integrate_rk4_strided(problem, dt, t_end, 1)
}

/// Classical RK4 keeping every `stride`-th sample plus the final one.
pub fn integrate_rk4_strided<T, F>(problem: &OdeProblem<T, F>, dt: T, t_end: T, stride: usize) -> Result<Trajectory<T>>
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
{
    let mut ws = Rk4Workspace::new(problem.dimension());
    let mut field = |t: T, y: &[T], out: &mut [T]| problem.eval(t, y, out);
    drive(problem, dt, t_end, stride, |_, t, y, h, out| rk4_step(&mut field, t, y, h, &mut ws, out))
}

/// Implicit midpoint rule sampled at every step.
pub fn integrate_implicit_midpoint<T, F>(problem: &OdeProblem<T, F>, dt: T, t_end: T) -> Result<Trajectory<T>>
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
{
    integrate_implicit_midpoint_strided(problem, dt, t_end, 1)
}

pub fn integrate_implicit_midpoint_strided<T, F>(problem: &OdeProblem<T, F>, dt: T, t_end: T, stride: usize) -> Result<Trajectory<T>>
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
{
    let d = problem.dimension();
    let mut scratch = vec![T::zero(); d];
    let mut mid = vec![T::zero(); d];
    let mut field = |t: T, y: &[T], out: &mut [T]| problem.eval(t, y, out);
    drive(problem, dt, t_end, stride, |k, t, y, h, out| {
        let (residual, ok) = midpoint_step(&mut field, t, y, h, &mut scratch, &mut mid, out)?;
        if ok {
            Ok(())
        } else {
            Err(Error::NoConvergence { step: k, time: t.as_f64(), residual: residual.as_f64() })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_grid_lands_on_end() {
        let g = StepGrid::new(0.0, 1e-4, 2.0).unwrap();
        assert_eq!(g.steps(), 20000);
        assert_eq!(g.time(g.steps()), 2.0);
        let g = StepGrid::new(0.0, 0.3, 1.0).unwrap();
        assert_eq!(g.steps(), 4);
        assert!((g.time(3) - 0.9f64).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_steps() {
        let p = OdeProblem::new(0.0, vec![1.0], |_, _, o: &mut [f64]| o[0] = 0.0).unwrap();
        assert!(integrate_rk4(&p, 0.0, 1.0).is_err());
        assert!(integrate_rk4(&p, 0.1, 0.0).is_err());
        assert!(integrate_rk4_strided(&p, 0.1, 1.0, 0).is_err());
    }

    #[test]
    fn nonfinite_rhs_reports_time() {
        let p = OdeProblem::new(0.0, vec![1.0], |t: f64, _, o: &mut [f64]| {
            o[0] = if t > 0.45 { f64::NAN } else { 1.0 }
        })
        .unwrap();
        match integrate_rk4(&p, 0.1, 1.0) {
            Err(Error::NonFinite { time }) => assert!(time > 0.45 && time < 0.6, "{time}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn midpoint_divergence_names_step() {
        // stiff linear decay with h*L far above the fixed-point contraction limit
        let p = OdeProblem::new(0.0, vec![1.0], |_, y: &[f64], o: &mut [f64]| o[0] = -1e3 * y[0]).unwrap();
        match integrate_implicit_midpoint(&p, 0.1, 1.0) {
            Err(Error::NoConvergence { step, .. }) => assert_eq!(step, 0),
            Err(Error::NonFinite { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn strided_keeps_final_sample() {
        let p = OdeProblem::new(0.0, vec![0.0], |_, _, o: &mut [f64]| o[0] = 1.0).unwrap();
        let tr = integrate_rk4_strided(&p, 0.1, 1.05, 4).unwrap();
        assert_eq!(tr.times.len(), 4);
        assert_eq!(*tr.times.last().unwrap(), 1.05);
        assert!((tr.states.last().unwrap()[0] - 1.05).abs() < 1e-14);
    }
}
