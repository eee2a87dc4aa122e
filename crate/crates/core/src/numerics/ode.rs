//! Fixed-step classical Runge-Kutta integration.

use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OdeOptions {
    /// Upper bound on the internal step. The step never exceeds a quarter of
    /// the smallest grid spacing regardless of this value.
    pub max_step: Option<f64>,
}

/// States sampled on the requested grid; `states[k]` belongs to `times[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn component(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[index]).collect()
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Integrates `dy/dt = generator(t, y)` and samples the solution on `t_grid`.
///
/// The generator writes the derivative into its third argument. Row 0 of the
/// trajectory is `state0` itself.
pub fn integrate_ode<F>(
    mut generator: F,
    state0: &[f64],
    t_grid: &[f64],
    options: &OdeOptions,
) -> Result<Trajectory, NumericsError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if t_grid.is_empty() {
        return Err(NumericsError::InvalidInput("empty time grid".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(NumericsError::InvalidInput("time grid contains non-finite values".into()));
    }
    let min_spacing = t_grid.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if min_spacing <= 0.0 {
        return Err(NumericsError::InvalidInput("time grid must be strictly ascending".into()));
    }
    if state0.iter().any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFiniteState { t: t_grid[0] });
    }
    let mut step = min_spacing / 4.0;
    if let Some(max) = options.max_step {
        if !(max > 0.0) {
            return Err(NumericsError::InvalidInput("max_step must be positive".into()));
        }
        step = step.min(max);
    }

    let dim = state0.len();
    let mut y = state0.to_vec();
    let mut states = Vec::with_capacity(t_grid.len());
    states.push(y.clone());

    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];

    for w in t_grid.windows(2) {
        let span = w[1] - w[0];
        let n_sub = (span / step).ceil().max(1.0) as usize;
        let h = span / n_sub as f64;
        for s in 0..n_sub {
            let t = w[0] + s as f64 * h;
            generator(t, &y, &mut k1);
            for i in 0..dim {
                tmp[i] = y[i] + 0.5 * h * k1[i];
            }
            generator(t + 0.5 * h, &tmp, &mut k2);
            for i in 0..dim {
                tmp[i] = y[i] + 0.5 * h * k2[i];
            }
            generator(t + 0.5 * h, &tmp, &mut k3);
            for i in 0..dim {
                tmp[i] = y[i] + h * k3[i];
            }
            generator(t + h, &tmp, &mut k4);
            for i in 0..dim {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(NumericsError::NonFiniteState { t: t + h });
            }
        }
        states.push(y.clone());
    }

    Ok(Trajectory { times: t_grid.to_vec(), states })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let traj = integrate_ode(|_, y, dy| dy[0] = -y[0], &[1.0], &grid, &OdeOptions::default()).unwrap();
        assert_eq!(traj.states[0], vec![1.0]);
        assert!((traj.last()[0] - (-1.0_f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn conservative_rate_matrix_keeps_total() {
        // columns sum to zero
        let rates = [[-0.3, 0.1, 0.0], [0.2, -0.5, 0.7], [0.1, 0.4, -0.7]];
        let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.25).collect();
        let traj = integrate_ode(
            |_, y, dy| {
                for i in 0..3 {
                    dy[i] = (0..3).map(|j| rates[i][j] * y[j]).sum();
                }
            },
            &[0.6, 0.3, 0.1],
            &grid,
            &OdeOptions::default(),
        )
        .unwrap();
        for s in &traj.states {
            assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let f = |_: f64, _: &[f64], dy: &mut [f64]| dy[0] = 0.0;
        let opts = OdeOptions::default();
        assert!(matches!(integrate_ode(f, &[1.0], &[], &opts), Err(NumericsError::InvalidInput(_))));
        assert!(matches!(integrate_ode(f, &[1.0], &[0.0, 0.0], &opts), Err(NumericsError::InvalidInput(_))));
        assert!(matches!(integrate_ode(f, &[1.0], &[1.0, 0.5], &opts), Err(NumericsError::InvalidInput(_))));
    }

    #[test]
    fn non_finite_state_is_reported() {
        let grid = [0.0, 1.0, 2.0];
        let err =
            integrate_ode(|_, y, dy| dy[0] = 1.0 / (1.0 - y[0]), &[1.0], &grid, &OdeOptions::default()).unwrap_err();
        assert!(matches!(err, NumericsError::NonFiniteState { .. }));
    }

    #[test]
    fn single_point_grid_returns_initial_state() {
        let traj = integrate_ode(|_, _, dy| dy[0] = 1.0, &[2.5], &[3.0], &OdeOptions::default()).unwrap();
        assert_eq!(traj.states, vec![vec![2.5]]);
    }
}
