//! Optical spin pumping in the four lowest levels {1, 2, A, B}.

use super::DynamicsError;
use crate::numerics::{integrate_ode, nlls_fit, DataPoint, LsqOptions, OdeOptions, Trajectory};
use crate::spectra::{SpectrumTrace, TransitionLine};
use crate::units::boltzmann;

/// Field magnitude of the pumping experiment, T.
pub const DEFAULT_PUMP_FIELD_T: f64 = 0.13;

const TRUNCATED_GROUND: [&str; 2] = ["1", "2"];
const TRUNCATED_EXCITED: [&str; 2] = ["A", "B"];
const TRACE_POINTS: usize = 2001;

/// Classical rate equations `dp/dt = R p`; `rates[i][j]` is the rate from
/// level `j` into level `i` and every column of `R` sums to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RateModel {
    pub labels: Vec<String>,
    pub rates: Vec<Vec<f64>>,
    /// Spontaneous emission rate out of each level, 1/ns; zero for ground levels.
    pub emission: Vec<f64>,
}

impl RateModel {
    /// Builds the generator from `(from, to, rate)` triples.
    pub fn from_transitions(
        labels: Vec<String>,
        transitions: &[(usize, usize, f64)],
        emission: Vec<f64>,
    ) -> Result<Self, DynamicsError> {
        let n = labels.len();
        if emission.len() != n {
            return Err(DynamicsError::LengthMismatch(format!("{n} levels but {} emission rates", emission.len())));
        }
        let mut rates = vec![vec![0.0; n]; n];
        for &(from, to, rate) in transitions {
            if from >= n || to >= n || from == to {
                return Err(DynamicsError::InvalidInput(format!("bad transition {from} -> {to}")));
            }
            if !(rate >= 0.0) || !rate.is_finite() {
                return Err(DynamicsError::InvalidInput(format!("rate {rate} must be finite and non-negative")));
            }
            rates[to][from] += rate;
            rates[from][from] -= rate;
        }
        Ok(Self { labels, rates, emission })
    }

    pub fn n_levels(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Largest total escape rate of any level.
    pub fn fastest_rate(&self) -> f64 {
        (0..self.n_levels()).map(|i| -self.rates[i][i]).fold(0.0, f64::max)
    }

    pub fn apply(&self, p: &[f64], dp: &mut [f64]) {
        for (i, row) in self.rates.iter().enumerate() {
            dp[i] = row.iter().zip(p).map(|(r, x)| r * x).sum();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpingConfig {
    /// Resonant drive rate on the pumped line, both directions, 1/ns.
    pub pump_rate: f64,
    /// Total spontaneous decay rate of each excited level, 1/ns.
    pub radiative_rate: f64,
    /// Downhill ground spin-flip rate, 1/ns.
    pub spin_flip_rate: f64,
    /// Lattice temperature for detailed balance, K.
    pub temperature_k: f64,
}

impl Default for PumpingConfig {
    fn default() -> Self {
        Self {
            pump_rate: 0.05,
            radiative_rate: 1.0 / 4.5,
            // 1.26 ms
            spin_flip_rate: 1.0 / 1.26e6,
            temperature_k: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpingResult {
    /// Fluorescence of the readout line versus time in ns.
    pub trace: SpectrumTrace,
    /// Population left outside the readout line's ground level at the end.
    pub steady_polarization: f64,
    /// Decay time of the fluorescence after the optical transient, ns;
    /// infinite when the fluorescence does not decay.
    pub pump_time_constant: f64,
    pub populations: Trajectory,
}

impl PumpingResult {
    /// Largest deviation of total population from its initial value.
    pub fn population_drift(&self) -> f64 {
        let total0: f64 = self.populations.states[0].iter().sum();
        self.populations.states.iter().map(|s| (s.iter().sum::<f64>() - total0).abs()).fold(0.0, f64::max)
    }
}

fn find_line<'a>(lines: &'a [TransitionLine], label: &str) -> Result<&'a TransitionLine, DynamicsError> {
    lines.iter().find(|l| l.label() == label).ok_or_else(|| DynamicsError::UnknownLine(label.to_string()))
}

fn split_label(label: &str) -> Result<(&str, &str), DynamicsError> {
    let valid = label.len() == 2 && TRUNCATED_EXCITED.contains(&&label[..1]) && TRUNCATED_GROUND.contains(&&label[1..]);
    if valid {
        Ok((&label[..1], &label[1..]))
    } else {
        Err(DynamicsError::UnknownLine(label.to_string()))
    }
}

/// Four-level pumping model; level order is `1, 2, A, B`.
///
/// Radiative decay of each excited level is shared between the two retained
/// ground levels in proportion to the line intensities.
pub fn build_pumping_model(
    lines: &[TransitionLine],
    pumped_line: &str,
    config: &PumpingConfig,
) -> Result<RateModel, DynamicsError> {
    let rates_ok =
        [config.pump_rate, config.radiative_rate, config.spin_flip_rate].iter().all(|r| *r >= 0.0 && r.is_finite());
    if !rates_ok || !(config.temperature_k >= 0.0) {
        return Err(DynamicsError::InvalidInput(format!("invalid pumping configuration {config:?}")));
    }
    let (pumped_e, pumped_g) = split_label(pumped_line)?;
    find_line(lines, pumped_line)?;

    let labels: Vec<String> = TRUNCATED_GROUND.iter().chain(&TRUNCATED_EXCITED).map(|s| s.to_string()).collect();
    let idx = |l: &str| labels.iter().position(|x| x == l).expect("truncated label");
    let mut transitions = Vec::new();

    for e in TRUNCATED_EXCITED {
        let strengths: Vec<f64> = TRUNCATED_GROUND
            .iter()
            .map(|g| find_line(lines, &format!("{e}{g}")).map(|l| l.intensity))
            .collect::<Result<_, _>>()?;
        let total: f64 = strengths.iter().sum();
        if !(total > 0.0) {
            return Err(DynamicsError::InvalidInput(format!("level {e} has no radiative channel")));
        }
        for (g, s) in TRUNCATED_GROUND.iter().zip(&strengths) {
            transitions.push((idx(e), idx(g), config.radiative_rate * s / total));
        }
    }

    transitions.push((idx(pumped_g), idx(pumped_e), config.pump_rate));
    transitions.push((idx(pumped_e), idx(pumped_g), config.pump_rate));

    // E(2) - E(1) from two lines sharing the excited level A
    let splitting = find_line(lines, "A1")?.freq_offset - find_line(lines, "A2")?.freq_offset;
    let (low, high) = if splitting >= 0.0 { ("1", "2") } else { ("2", "1") };
    transitions.push((idx(high), idx(low), config.spin_flip_rate));
    transitions.push((idx(low), idx(high), config.spin_flip_rate * boltzmann(splitting.abs(), config.temperature_k)));

    let emission = labels
        .iter()
        .map(|l| if TRUNCATED_EXCITED.contains(&l.as_str()) { config.radiative_rate } else { 0.0 })
        .collect();
    RateModel::from_transitions(labels, &transitions, emission)
}

/// Integrates the rate model over `duration_ns` and reads out the
/// fluorescence of `readout_line`.
pub fn pumping_trace(
    model: &RateModel,
    initial: &[f64],
    duration_ns: f64,
    readout_line: &str,
) -> Result<PumpingResult, DynamicsError> {
    let n = model.n_levels();
    if initial.len() != n {
        return Err(DynamicsError::LengthMismatch(format!("{n} levels but {} initial populations", initial.len())));
    }
    if initial.iter().any(|p| !(*p >= 0.0)) || (initial.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(DynamicsError::InvalidInput("initial populations must be non-negative and sum to 1".into()));
    }
    if !(duration_ns > 0.0) || !duration_ns.is_finite() {
        return Err(DynamicsError::InvalidInput(format!("duration {duration_ns} ns must be positive")));
    }
    let (excited, ground) = split_label(readout_line)?;
    let bright = model.index_of(excited).ok_or_else(|| DynamicsError::UnknownLine(readout_line.into()))?;
    let readout_ground = model.index_of(ground).ok_or_else(|| DynamicsError::UnknownLine(readout_line.into()))?;

    let times: Vec<f64> = (0..TRACE_POINTS).map(|k| duration_ns * k as f64 / (TRACE_POINTS - 1) as f64).collect();
    let fastest = model.fastest_rate();
    let options = OdeOptions { max_step: (fastest > 0.0).then(|| 0.1 / fastest) };
    let populations = integrate_ode(|_, p, dp| model.apply(p, dp), initial, &times, &options)?;

    let fluorescence: Vec<f64> =
        populations.states.iter().map(|p| (model.emission[bright] * p[bright]).max(0.0)).collect();
    let last = populations.last();
    let is_ground = |i: usize| model.emission[i] == 0.0;
    let steady_polarization =
        (0..n).filter(|&i| is_ground(i) && i != readout_ground).map(|i| last[i]).sum::<f64>().clamp(0.0, 1.0);
    let pump_time_constant = decay_time(&times, &fluorescence, fastest);
    let trace = SpectrumTrace::new(times, fluorescence).map_err(|e| DynamicsError::InvalidInput(e.to_string()))?;
    Ok(PumpingResult { trace, steady_polarization, pump_time_constant, populations })
}

/// Exponential-with-floor decay time of the signal after the optical transient.
fn decay_time(times: &[f64], signal: &[f64], fastest_rate: f64) -> f64 {
    let skip = if fastest_rate > 0.0 { 10.0 / fastest_rate } else { 0.0 };
    let start = times.partition_point(|t| *t < skip);
    if times.len() - start < 10 {
        return f64::INFINITY;
    }
    let (t, y) = (&times[start..], &signal[start..]);
    let (first, end) = (y[0], y[y.len() - 1]);
    if !(first - end > 1e-9 * first.abs().max(f64::MIN_POSITIVE)) {
        return f64::INFINITY;
    }
    let target = end + (first - end) / std::f64::consts::E;
    let crossing = y.iter().position(|v| *v <= target).unwrap_or(y.len() - 1);
    let tau0 = (t[crossing] - t[0]).max(t[1] - t[0]);
    let data: Vec<DataPoint> = t.iter().zip(y).map(|(x, v)| DataPoint::new(x - t[0], *v)).collect();
    let model = |p: &[f64], x: f64| p[0] * (-x / p[1]).exp() + p[2];
    let bounds = [(f64::NEG_INFINITY, f64::INFINITY), (1e-12, f64::INFINITY), (f64::NEG_INFINITY, f64::INFINITY)];
    match nlls_fit(model, &[first - end, tau0, end], &data, Some(&bounds), &LsqOptions::default()) {
        Ok(fit) if fit.params[1].is_finite() => fit.params[1],
        _ => tau0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(label: &str, freq: f64, intensity: f64) -> TransitionLine {
        TransitionLine {
            from_label: label[..1].into(),
            to_label: label[1..].into(),
            freq_offset: freq,
            intensity,
            spin_overlap: 1.0,
            thermal_weight: 0.5,
        }
    }

    fn toy_lines(cross: f64) -> Vec<TransitionLine> {
        vec![
            line("A1", 0.0, 1.0 - cross),
            line("A2", -3.0, cross),
            line("B1", 3.0, cross),
            line("B2", 0.0, 1.0 - cross),
        ]
    }

    #[test]
    fn columns_sum_to_zero() {
        let model = build_pumping_model(&toy_lines(0.1), "A1", &PumpingConfig::default()).unwrap();
        for j in 0..4 {
            let col: f64 = (0..4).map(|i| model.rates[i][j]).sum();
            assert!(col.abs() < 1e-18);
            for i in 0..4 {
                if i != j {
                    assert!(model.rates[i][j] >= 0.0);
                }
            }
        }
    }

    #[test]
    fn closed_cycle_does_not_pump() {
        let config = PumpingConfig { spin_flip_rate: 0.0, ..PumpingConfig::default() };
        let model = build_pumping_model(&toy_lines(0.0), "A1", &config).unwrap();
        let result = pumping_trace(&model, &[0.5, 0.5, 0.0, 0.0], 2000.0, "A1").unwrap();
        assert!((result.steady_polarization - 0.5).abs() < 1e-12);
        assert_eq!(result.pump_time_constant, f64::INFINITY);
    }

    #[test]
    fn slow_rate_matches_two_state_reduction() {
        let config = PumpingConfig { spin_flip_rate: 0.0, ..PumpingConfig::default() };
        let b = 0.05;
        let model = build_pumping_model(&toy_lines(b), "A1", &config).unwrap();
        let result = pumping_trace(&model, &[1.0, 0.0, 0.0, 0.0], 3000.0, "A1").unwrap();
        let (p, g) = (config.pump_rate, config.radiative_rate);
        let s = 2.0 * p + g;
        let k = (s - (s * s - 4.0 * p * g * b).sqrt()) / 2.0;
        assert!((result.pump_time_constant * k - 1.0).abs() < 1e-4, "{}", result.pump_time_constant * k);
        assert!(result.population_drift() < 1e-9);
    }

    #[test]
    fn unknown_lines_rejected() {
        let lines = toy_lines(0.1);
        let config = PumpingConfig::default();
        assert_eq!(build_pumping_model(&lines, "C1", &config), Err(DynamicsError::UnknownLine("C1".into())));
        assert_eq!(build_pumping_model(&lines[..2], "A1", &config), Err(DynamicsError::UnknownLine("B1".into())));
        let model = build_pumping_model(&lines, "A1", &config).unwrap();
        assert!(matches!(pumping_trace(&model, &[1.0, 0.0, 0.0, 0.0], 10.0, "A3"), Err(DynamicsError::UnknownLine(_))));
    }

    #[test]
    fn null_generator_keeps_populations() {
        let model = RateModel::from_transitions(
            vec!["1".into(), "2".into(), "A".into(), "B".into()],
            &[],
            vec![0.0, 0.0, 1.0, 1.0],
        )
        .unwrap();
        let result = pumping_trace(&model, &[0.25, 0.25, 0.25, 0.25], 100.0, "A1").unwrap();
        assert_eq!(result.populations.last(), &[0.25; 4]);
    }
}
