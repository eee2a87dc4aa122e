//! Hamiltonian parameters from field-dependent optical line positions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FitError;
use crate::defect::{eigensystem_in_defect_frame, lab_to_defect_frame, DefectParameters, Manifold, ModelError};
use crate::numerics::{nlls_fit_vector, FitResult, LsqOptions};
use crate::spectra::SweepGeometry;

/// Fit parameter order.
pub const FIELD_PARAM_NAMES: [&str; 6] = ["lambda_g", "lambda_e", "jt_g", "jt_e", "quench_g", "quench_e"];

/// Predicted lines closer than this share one slot in the ambiguity check, GHz.
const SLOT_MERGE_GHZ: f64 = 1e-6;
/// Spread of restart starting points relative to the initial values.
const RESTART_SPREAD: f64 = 0.1;

/// Which of [`FIELD_PARAM_NAMES`] are varied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeMask(pub [bool; 6]);

impl FreeMask {
    pub const ALL: FreeMask = FreeMask([true; 6]);
    /// Spin-orbit and Jahn-Teller magnitudes; quenching held.
    pub const SPLITTINGS: FreeMask = FreeMask([true, true, true, true, false, false]);

    fn indices(&self) -> Vec<usize> {
        (0..6).filter(|&i| self.0[i]).collect()
    }
}

/// Observed line positions at one field magnitude, GHz.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldObservation {
    pub b_tesla: f64,
    pub lines: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldFitOptions {
    /// Extra randomized starts beyond the given initial parameters.
    pub restarts: usize,
    pub seed: u64,
    /// Cap on reassign-and-refit rounds.
    pub max_assignment_rounds: usize,
    pub lsq: LsqOptions,
}

impl Default for FieldFitOptions {
    fn default() -> Self {
        Self { restarts: 0, seed: 0, max_assignment_rounds: 10, lsq: LsqOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldFit {
    /// Values for all of [`FIELD_PARAM_NAMES`]; held parameters report zero error.
    pub fit: FitResult,
    pub parameters: DefectParameters,
    /// Line label assigned to every observed line, per field point.
    pub assignments: Vec<Vec<String>>,
    /// Start that produced the result; 0 is the supplied initialization.
    pub restart: usize,
}

fn to_vector(p: &DefectParameters) -> [f64; 6] {
    [
        p.lambda_g,
        p.lambda_e,
        p.jt_magnitude(Manifold::Ground),
        p.jt_magnitude(Manifold::Excited),
        p.quench_g,
        p.quench_e,
    ]
}

/// Magnitudes from `v`, Jahn-Teller orientations from `template`.
fn from_vector(template: &DefectParameters, v: &[f64; 6]) -> DefectParameters {
    let orient = |jt: [f64; 2], mag: f64| {
        let angle = if jt == [0.0, 0.0] { 0.0 } else { jt[1].atan2(jt[0]) };
        [mag * angle.cos(), mag * angle.sin()]
    };
    DefectParameters {
        lambda_g: v[0],
        lambda_e: v[1],
        jt_g: orient(template.jt_g, v[2]),
        jt_e: orient(template.jt_e, v[3]),
        quench_g: v[4],
        quench_e: v[5],
        ..*template
    }
}

const BOUNDS: [(f64, f64); 6] = [
    (f64::MIN_POSITIVE, f64::INFINITY),
    (f64::MIN_POSITIVE, f64::INFINITY),
    (0.0, f64::INFINITY),
    (0.0, f64::INFINITY),
    (0.0, 1.0),
    (0.0, 1.0),
];

/// All sixteen `(label, frequency)` pairs at a defect-frame field.
pub fn predicted_lines(p: &DefectParameters, b_defect: [f64; 3]) -> Result<Vec<(String, f64)>, ModelError> {
    let gs = eigensystem_in_defect_frame(p, Manifold::Ground, b_defect)?;
    let es = eigensystem_in_defect_frame(p, Manifold::Excited, b_defect)?;
    let mut out = Vec::with_capacity(16);
    for (ei, el) in es.energies.iter().zip(&es.labels) {
        for (gi, gl) in gs.energies.iter().zip(&gs.labels) {
            out.push((format!("{el}{gl}"), ei - gi + es.zpl_offset));
        }
    }
    Ok(out)
}

/// Unique assignment of observed lines to predicted lines, closest pairs first.
fn assign(observed: &[f64], predicted: &[f64]) -> Vec<usize> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(observed.len() * predicted.len());
    for (k, o) in observed.iter().enumerate() {
        for (s, q) in predicted.iter().enumerate() {
            pairs.push(((o - q).abs(), k, s));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut slot_of = vec![usize::MAX; observed.len()];
    let mut used = vec![false; predicted.len()];
    for (_, k, s) in pairs {
        if slot_of[k] == usize::MAX && !used[s] {
            slot_of[k] = s;
            used[s] = true;
        }
    }
    slot_of
}

/// Fails if more observed lines sit nearest to a predicted frequency than it
/// has degenerate lines.
fn check_ambiguity(b_tesla: f64, observed: &[f64], predicted: &[f64]) -> Result<(), FitError> {
    let mut freqs = predicted.to_vec();
    freqs.sort_by(f64::total_cmp);
    let mut slots: Vec<(f64, usize)> = Vec::new();
    for f in freqs {
        match slots.last_mut() {
            Some((c, m)) if (f - *c).abs() <= SLOT_MERGE_GHZ => *m += 1,
            _ => slots.push((f, 1)),
        }
    }
    let mut claimed: Vec<Vec<f64>> = vec![Vec::new(); slots.len()];
    for &o in observed {
        let nearest = (0..slots.len())
            .min_by(|&a, &b| (o - slots[a].0).abs().total_cmp(&(o - slots[b].0).abs()))
            .expect("sixteen predicted lines");
        claimed[nearest].push(o);
    }
    for ((freq, multiplicity), obs) in slots.iter().zip(&claimed) {
        if obs.len() > *multiplicity {
            return Err(FitError::AssignmentAmbiguous { b_tesla, first: obs[0], second: obs[1], predicted: *freq });
        }
    }
    Ok(())
}

struct Problem<'a> {
    observed: &'a [FieldObservation],
    b_defect: Vec<[f64; 3]>,
    template: DefectParameters,
    free: Vec<usize>,
    targets: Vec<f64>,
}

impl Problem<'_> {
    fn full(&self, base: &[f64; 6], free_values: &[f64]) -> [f64; 6] {
        let mut v = *base;
        for (&i, &x) in self.free.iter().zip(free_values) {
            v[i] = x;
        }
        v
    }

    fn predictions(&self, v: &[f64; 6]) -> Result<Vec<Vec<(String, f64)>>, ModelError> {
        let p = from_vector(&self.template, v);
        self.b_defect.iter().map(|b| predicted_lines(&p, *b)).collect()
    }

    fn assignment(&self, v: &[f64; 6]) -> Result<Vec<Vec<usize>>, ModelError> {
        let preds = self.predictions(v)?;
        Ok(self
            .observed
            .iter()
            .zip(&preds)
            .map(|(obs, pred)| assign(&obs.lines, &pred.iter().map(|(_, f)| *f).collect::<Vec<_>>()))
            .collect())
    }

    fn solve_from(&self, start: [f64; 6], options: &FieldFitOptions) -> Result<FieldFit, FitError> {
        let mut current = start;
        let mut slots = self.assignment(&current)?;
        let mut fit = None;
        for _ in 0..options.max_assignment_rounds.max(1) {
            let fixed = slots.clone();
            let model = |free_values: &[f64]| -> Vec<f64> {
                let v = self.full(&current, free_values);
                match self.predictions(&v) {
                    Ok(preds) => {
                        fixed.iter().zip(&preds).flat_map(|(s, pred)| s.iter().map(move |&k| pred[k].1)).collect()
                    }
                    Err(_) => vec![f64::NAN; self.targets.len()],
                }
            };
            let p0: Vec<f64> = self.free.iter().map(|&i| current[i]).collect();
            let bounds: Vec<(f64, f64)> = self.free.iter().map(|&i| BOUNDS[i]).collect();
            let weights = vec![1.0; self.targets.len()];
            let result = nlls_fit_vector(model, &p0, &self.targets, &weights, Some(&bounds), &options.lsq)?;
            current = self.full(&current, &result.params);
            fit = Some(result);
            let next = self.assignment(&current)?;
            if next == slots {
                break;
            }
            slots = next;
        }
        let lsq = fit.expect("at least one round");

        let preds = self.predictions(&current)?;
        for (obs, pred) in self.observed.iter().zip(&preds) {
            let freqs: Vec<f64> = pred.iter().map(|(_, f)| *f).collect();
            check_ambiguity(obs.b_tesla, &obs.lines, &freqs)?;
        }
        let assignments =
            slots.iter().zip(&preds).map(|(s, pred)| s.iter().map(|&k| pred[k].0.clone()).collect()).collect();

        let mut std_errors = [0.0; 6];
        for (&i, &e) in self.free.iter().zip(&lsq.std_errors) {
            std_errors[i] = e;
        }
        let fit = FitResult { params: current.to_vec(), std_errors: std_errors.to_vec(), ..lsq };
        Ok(FieldFit { fit, parameters: from_vector(&self.template, &current), assignments, restart: 0 })
    }
}

/// Least-squares fit of Hamiltonian parameters to observed line positions.
///
/// Observed lines are matched uniquely to predicted lines, closest pairs first;
/// the fit alternates between solving with a fixed matching and rematching
/// until the matching is stable. Jahn-Teller orientations are taken from
/// `init` and held. With `restarts > 0` additional starts are drawn around
/// `init` and the lowest residual wins, ties going to the earliest start.
pub fn fit_field_dependence(
    observed: &[FieldObservation],
    geometry: SweepGeometry,
    init: &DefectParameters,
    free: FreeMask,
    options: &FieldFitOptions,
) -> Result<FieldFit, FitError> {
    init.validate()?;
    if observed.is_empty() {
        return Err(FitError::InsufficientData { points: 0, params: free.indices().len() });
    }
    let free_idx = free.indices();
    if free_idx.is_empty() {
        return Err(FitError::InvalidInput("no free parameters".into()));
    }
    for obs in observed {
        if !(obs.b_tesla >= 0.0) || !obs.b_tesla.is_finite() {
            return Err(FitError::InvalidInput(format!("field {} T must be non-negative", obs.b_tesla)));
        }
        if obs.lines.len() > 16 {
            return Err(FitError::InvalidInput(format!(
                "{} lines at {} T exceed the 16 predicted",
                obs.lines.len(),
                obs.b_tesla
            )));
        }
        if obs.lines.iter().any(|f| !f.is_finite()) {
            return Err(FitError::InvalidInput("observed lines must be finite".into()));
        }
    }
    let norm = geometry.direction.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(FitError::InvalidInput("field direction has zero length".into()));
    }
    let unit = lab_to_defect_frame(geometry.direction.map(|c| c / norm), geometry.axis)?;
    let problem = Problem {
        observed,
        b_defect: observed.iter().map(|o| unit.map(|c| c * o.b_tesla)).collect(),
        template: *init,
        free: free_idx,
        targets: observed.iter().flat_map(|o| o.lines.iter().copied()).collect(),
    };

    let base = to_vector(init);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut starts = vec![base];
    for _ in 0..options.restarts {
        let mut v = base;
        for &i in &problem.free {
            let u: f64 = rng.random_range(-1.0..=1.0);
            v[i] = (v[i] * (1.0 + RESTART_SPREAD * u)).clamp(BOUNDS[i].0, BOUNDS[i].1);
        }
        starts.push(v);
    }

    let mut best: Option<FieldFit> = None;
    let mut first_error = None;
    for (k, start) in starts.into_iter().enumerate() {
        match problem.solve_from(start, options) {
            Ok(mut fit) => {
                fit.restart = k;
                if best.as_ref().is_none_or(|b| fit.fit.residual_norm < b.fit.residual_norm) {
                    best = Some(fit);
                }
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_error.expect("at least one start"))
}
