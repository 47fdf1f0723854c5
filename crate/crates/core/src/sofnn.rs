//! Self-organizing fuzzy neural network.
//!
//! Five layers: Gaussian memberships per input, product rule firing,
//! normalization, first-order (TSK) linear consequents, and a summing output.
//! Structure is learned online in one pass: a badly predicted sample that no
//! neuron covers gets its own neuron, a badly predicted covered sample widens
//! the nearest neuron, and every sample updates the consequents by recursive
//! least squares. Neurons that never fire noticeably are pruned at the end.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ErrorKind;
use crate::linalg::{ridge_least_squares, Matrix};

pub const WIDEN_FACTOR: f64 = 1.1;
pub const PRUNE_THRESHOLD: f64 = 1e-4;
pub const RLS_INIT: f64 = 1e4;
pub const WIDTH_FLOOR: f64 = 1e-6;
pub const MODEL_VERSION: u32 = 1;

/// Ridge weight for the post-pruning consequent refit, pulling
/// unidentified directions toward the pre-pruning values.
const REFIT_RIDGE: f64 = 1e-8;
/// Shrinkage toward the global linear model in [`SofnnModel::consolidate`];
/// the same prior precision the RLS initialization implies.
pub const CONSOLIDATION_RIDGE: f64 = 1.0 / RLS_INIT;

#[derive(Debug, Error)]
pub enum SofnnError {
    #[error("no training samples")]
    EmptySamples,
    #[error("sample {index}: target is not finite")]
    NonFiniteTarget { index: usize },
    #[error("sample {index}: input {dim} = {value} outside [0, 1]")]
    InputOutOfRange {
        index: usize,
        dim: usize,
        value: f64,
    },
    #[error("expected {expected} inputs, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("model has no neurons")]
    Untrained,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("model file: {0}")]
    ModelFile(String),
    #[error("model file i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl SofnnError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            SofnnError::Untrained => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SofnnParams {
    /// Per-sample absolute error above which structure may change.
    pub delta: f64,
    /// Initial membership width of a new neuron.
    pub sigma0: f64,
    /// Target training RMSE; further epochs stop once it is reached.
    pub k_rmse: f64,
    /// Per-input coverage distance.
    pub k_d: Vec<f64>,
}

impl SofnnParams {
    /// `delta = 0.04`, `sigma0 = 0.01`, `k_rmse = 0.05`, `k_d = 0.1` per input.
    pub fn standard(inputs: usize) -> Self {
        SofnnParams {
            delta: 0.04,
            sigma0: 0.01,
            k_rmse: 0.05,
            k_d: vec![0.1; inputs],
        }
    }

    pub fn validate(&self, inputs: usize) -> Result<(), SofnnError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SofnnError::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("delta", self.delta)?;
        positive("sigma0", self.sigma0)?;
        positive("k_rmse", self.k_rmse)?;
        if self.k_d.len() != inputs {
            return Err(SofnnError::InvalidParams(format!(
                "k_d has {} entries for {inputs} inputs",
                self.k_d.len()
            )));
        }
        for &k in &self.k_d {
            positive("k_d", k)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Neuron {
    pub centers: Vec<f64>,
    pub widths: Vec<f64>,
}

impl Neuron {
    fn log_firing(&self, x: &[f64]) -> f64 {
        -self
            .centers
            .iter()
            .zip(&self.widths)
            .zip(x)
            .map(|((c, s), xi)| (xi - c) * (xi - c) / (2.0 * s * s))
            .sum::<f64>()
    }

    fn covers(&self, x: &[f64], k_d: &[f64]) -> bool {
        self.centers
            .iter()
            .zip(x)
            .zip(k_d)
            .all(|((c, xi), k)| (xi - c).abs() <= *k)
    }

    fn distance2(&self, x: &[f64]) -> f64 {
        self.centers
            .iter()
            .zip(x)
            .map(|(c, xi)| (xi - c) * (xi - c))
            .sum()
    }
}

/// Recursive least-squares state over the flattened consequent vector.
#[derive(Clone, Debug, PartialEq)]
pub struct RlsState {
    n: usize,
    /// Inverse correlation matrix, `n x n` row-major.
    p: Vec<f64>,
}

impl RlsState {
    fn empty() -> Self {
        RlsState {
            n: 0,
            p: Vec::new(),
        }
    }

    fn grow(&mut self, extra: usize) {
        let m = self.n + extra;
        let mut p = vec![0.0; m * m];
        for i in 0..self.n {
            p[i * m..i * m + self.n].copy_from_slice(&self.p[i * self.n..(i + 1) * self.n]);
        }
        for i in self.n..m {
            p[i * m + i] = RLS_INIT;
        }
        self.n = m;
        self.p = p;
    }

    /// Standard RLS step with unit forgetting factor.
    fn update(&mut self, theta: &mut [f64], phi: &[f64], target: f64) {
        let n = self.n;
        let mut v = vec![0.0; n];
        for (i, vi) in v.iter_mut().enumerate() {
            let row = &self.p[i * n..(i + 1) * n];
            *vi = row.iter().zip(phi).map(|(a, b)| a * b).sum();
        }
        let denom = 1.0 + phi.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
        let err = target
            - phi
                .iter()
                .zip(theta.iter())
                .map(|(a, b)| a * b)
                .sum::<f64>();
        for (t, vi) in theta.iter_mut().zip(&v) {
            *t += vi * err / denom;
        }
        for i in 0..n {
            let vi = v[i] / denom;
            if vi == 0.0 {
                continue;
            }
            let row = &mut self.p[i * n..(i + 1) * n];
            for (pij, vj) in row.iter_mut().zip(&v) {
                *pij -= vi * vj;
            }
        }
    }
}

/// What a training step did to the network structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepAction {
    /// Consequents only.
    Update,
    /// A neuron was added at the sample.
    Added,
    /// The given neuron was widened.
    Widened(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SofnnModel {
    pub inputs: usize,
    pub neurons: Vec<Neuron>,
    /// Neuron-major: `[b0, b1, .., br]` for neuron 0, then neuron 1, ...
    consequents: Vec<f64>,
    pub params: SofnnParams,
    #[serde(skip)]
    rls: Option<RlsState>,
}

impl SofnnModel {
    pub fn new(params: SofnnParams) -> Result<Self, SofnnError> {
        let inputs = params.k_d.len();
        params.validate(inputs)?;
        Ok(SofnnModel {
            inputs,
            neurons: Vec::new(),
            consequents: Vec::new(),
            params,
            rls: Some(RlsState::empty()),
        })
    }

    /// Builds a fixed model from explicit parts. `consequents[j]` holds
    /// `[b0, b1, .., br]` for neuron `j`.
    pub fn from_parts(
        params: SofnnParams,
        neurons: Vec<Neuron>,
        consequents: Vec<Vec<f64>>,
    ) -> Result<Self, SofnnError> {
        let inputs = params.k_d.len();
        params.validate(inputs)?;
        if consequents.len() != neurons.len() {
            return Err(SofnnError::ModelFile(format!(
                "{} consequent columns for {} neurons",
                consequents.len(),
                neurons.len()
            )));
        }
        for (j, n) in neurons.iter().enumerate() {
            if n.centers.len() != inputs
                || n.widths.len() != inputs
                || consequents[j].len() != inputs + 1
            {
                return Err(SofnnError::ModelFile(format!(
                    "neuron {j} has wrong dimensions"
                )));
            }
            if n.widths
                .iter()
                .any(|&w| !(w >= WIDTH_FLOOR && w.is_finite()))
            {
                return Err(SofnnError::ModelFile(format!(
                    "neuron {j} has a width below {WIDTH_FLOOR}"
                )));
            }
            if n.centers
                .iter()
                .chain(&consequents[j])
                .any(|v| !v.is_finite())
            {
                return Err(SofnnError::ModelFile(format!(
                    "neuron {j} has non-finite parameters"
                )));
            }
        }
        Ok(SofnnModel {
            inputs,
            neurons,
            consequents: consequents.into_iter().flatten().collect(),
            params,
            rls: None,
        })
    }

    pub fn neuron_count(&self) -> usize {
        self.neurons.len()
    }

    pub fn consequent(&self, j: usize) -> &[f64] {
        let w = self.inputs + 1;
        &self.consequents[j * w..(j + 1) * w]
    }

    /// Consequent matrix with one row per parameter (bias, then each input
    /// slope) and one column per neuron.
    pub fn consequent_matrix(&self) -> Vec<Vec<f64>> {
        (0..=self.inputs)
            .map(|i| {
                (0..self.neurons.len())
                    .map(|j| self.consequent(j)[i])
                    .collect()
            })
            .collect()
    }

    fn check_input(&self, x: &[f64]) -> Result<(), SofnnError> {
        if x.len() != self.inputs {
            return Err(SofnnError::DimensionMismatch {
                expected: self.inputs,
                found: x.len(),
            });
        }
        if self.neurons.is_empty() {
            return Err(SofnnError::Untrained);
        }
        Ok(())
    }

    /// Normalization-layer outputs. Firing strengths are shifted in log space
    /// before normalizing so inputs far from every center stay well defined.
    pub fn normalized_firing(&self, x: &[f64]) -> Result<Vec<f64>, SofnnError> {
        self.check_input(x)?;
        Ok(self.psi(x))
    }

    fn psi(&self, x: &[f64]) -> Vec<f64> {
        let logs: Vec<f64> = self.neurons.iter().map(|n| n.log_firing(x)).collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        let sum: f64 = w.iter().sum();
        w.into_iter().map(|v| v / sum).collect()
    }

    fn rule_output(&self, j: usize, x: &[f64]) -> f64 {
        let b = self.consequent(j);
        b[0] + b[1..].iter().zip(x).map(|(bi, xi)| bi * xi).sum::<f64>()
    }

    fn forward(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let psi = self.psi(x);
        let y = psi
            .iter()
            .enumerate()
            .map(|(j, p)| p * self.rule_output(j, x))
            .sum();
        (psi, y)
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64, SofnnError> {
        self.check_input(x)?;
        Ok(self.forward(x).1)
    }

    /// RLS regressor: `psi_j * [1, x]` for every neuron.
    fn regressor(&self, psi: &[f64], x: &[f64]) -> Vec<f64> {
        let mut phi = Vec::with_capacity(psi.len() * (self.inputs + 1));
        for &p in psi {
            phi.push(p);
            phi.extend(x.iter().map(|xi| p * xi));
        }
        phi
    }

    fn add_neuron(&mut self, x: &[f64], consequent: Vec<f64>) {
        self.neurons.push(Neuron {
            centers: x.to_vec(),
            widths: vec![self.params.sigma0.max(WIDTH_FLOOR); self.inputs],
        });
        self.consequents.extend(consequent);
        self.rls
            .get_or_insert_with(RlsState::empty)
            .grow(self.inputs + 1);
        if self
            .rls
            .as_ref()
            .is_some_and(|r| r.n != self.consequents.len())
        {
            // state was dropped (loaded or refitted model); restart it
            let mut fresh = RlsState::empty();
            fresh.grow(self.consequents.len());
            self.rls = Some(fresh);
        }
    }

    fn rls_update(&mut self, x: &[f64], y: f64) {
        let psi = self.psi(x);
        let phi = self.regressor(&psi, x);
        let rls = self.rls.get_or_insert_with(|| {
            let mut r = RlsState::empty();
            r.grow(phi.len());
            r
        });
        if rls.n != phi.len() {
            *rls = RlsState::empty();
            rls.grow(phi.len());
        }
        rls.update(&mut self.consequents, &phi, y);
    }

    /// One online learning step on `(x, y)`; returns the a-priori error and
    /// what changed.
    pub fn observe(&mut self, x: &[f64], y: f64) -> Result<(f64, StepAction), SofnnError> {
        if x.len() != self.inputs {
            return Err(SofnnError::DimensionMismatch {
                expected: self.inputs,
                found: x.len(),
            });
        }
        if self.neurons.is_empty() {
            let mut b = vec![0.0; self.inputs + 1];
            b[0] = y;
            self.add_neuron(x, b);
            self.rls_update(x, y);
            return Ok((y, StepAction::Added));
        }
        let (psi, pred) = self.forward(x);
        let err = y - pred;
        let covered = self.neurons.iter().any(|n| n.covers(x, &self.params.k_d));
        let action = if err.abs() <= self.params.delta {
            StepAction::Update
        } else if !covered {
            // start from the local effective linear model, shifted to hit y
            let w = self.inputs + 1;
            let mut b = vec![0.0; w];
            for (j, p) in psi.iter().enumerate() {
                for (bi, cj) in b.iter_mut().zip(self.consequent(j)) {
                    *bi += p * cj;
                }
            }
            b[0] += err;
            self.add_neuron(x, b);
            StepAction::Added
        } else {
            let nearest = self
                .neurons
                .iter()
                .enumerate()
                .map(|(j, n)| (j, n.distance2(x)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(j, _)| j)
                .expect("non-empty");
            for w in &mut self.neurons[nearest].widths {
                *w *= WIDEN_FACTOR;
            }
            StepAction::Widened(nearest)
        };
        self.rls_update(x, y);
        Ok((err, action))
    }

    pub fn rmse(&self, samples: &[(Vec<f64>, f64)]) -> Result<f64, SofnnError> {
        let mut ss = 0.0;
        for (x, y) in samples {
            let p = self.predict(x)?;
            ss += (y - p) * (y - p);
        }
        Ok((ss / samples.len().max(1) as f64).sqrt())
    }

    /// Removes neurons whose normalized firing never reaches the threshold
    /// on `samples`, then refits consequents in batch. Returns how many were
    /// removed. At least one neuron is always kept.
    pub fn prune(&mut self, samples: &[(Vec<f64>, f64)]) -> usize {
        if self.neurons.len() <= 1 || samples.is_empty() {
            return 0;
        }
        let mut max_psi = vec![0.0f64; self.neurons.len()];
        for (x, _) in samples {
            for (m, p) in max_psi.iter_mut().zip(self.psi(x)) {
                *m = m.max(p);
            }
        }
        let mut keep: Vec<usize> = (0..self.neurons.len())
            .filter(|&j| max_psi[j] >= PRUNE_THRESHOLD)
            .collect();
        if keep.is_empty() {
            let best = (0..max_psi.len())
                .max_by(|&a, &b| max_psi[a].total_cmp(&max_psi[b]))
                .unwrap();
            keep.push(best);
        }
        let removed = self.neurons.len() - keep.len();
        if removed == 0 {
            return 0;
        }
        let w = self.inputs + 1;
        self.neurons = keep.iter().map(|&j| self.neurons[j].clone()).collect();
        self.consequents = keep
            .iter()
            .flat_map(|&j| self.consequents[j * w..(j + 1) * w].to_vec())
            .collect();
        self.refit_consequents(samples);
        removed
    }

    /// Batch least-squares refit of all consequents for the current neurons.
    pub fn refit_consequents(&mut self, samples: &[(Vec<f64>, f64)]) {
        let rows: Vec<Vec<f64>> = samples
            .iter()
            .map(|(x, _)| self.regressor(&self.psi(x), x))
            .collect();
        let a = Matrix::from_rows(&rows);
        let resid: Vec<f64> = samples
            .iter()
            .zip(&rows)
            .map(|((_, y), phi)| {
                y - phi
                    .iter()
                    .zip(&self.consequents)
                    .map(|(p, t)| p * t)
                    .sum::<f64>()
            })
            .collect();
        let step = ridge_least_squares(&a, &resid, REFIT_RIDGE);
        for (t, s) in self.consequents.iter_mut().zip(step) {
            *t += s;
        }
        self.rls = None;
    }

    /// Batch refit of all consequents, shrunk toward the single global
    /// linear least-squares model. Rules that fire on few samples borrow
    /// the global slopes in directions their own data do not determine.
    pub fn consolidate(&mut self, samples: &[(Vec<f64>, f64)]) {
        let design: Vec<Vec<f64>> = samples
            .iter()
            .map(|(x, _)| std::iter::once(1.0).chain(x.iter().copied()).collect())
            .collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let global = ridge_least_squares(&Matrix::from_rows(&design), &ys, REFIT_RIDGE);
        let prior: Vec<f64> = self
            .neurons
            .iter()
            .flat_map(|_| global.iter().copied())
            .collect();
        let rows: Vec<Vec<f64>> = samples
            .iter()
            .map(|(x, _)| self.regressor(&self.psi(x), x))
            .collect();
        // sum of psi is 1, so the prior alone predicts the global model
        let resid: Vec<f64> = samples
            .iter()
            .zip(&design)
            .map(|((_, y), d)| y - d.iter().zip(&global).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let step = ridge_least_squares(&Matrix::from_rows(&rows), &resid, CONSOLIDATION_RIDGE);
        self.consequents = prior.iter().zip(step).map(|(p, s)| p + s).collect();
        self.rls = None;
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            version: MODEL_VERSION,
            r: self.inputs,
            neurons: self.neurons.clone(),
            consequents: self.consequent_matrix(),
            params: self.params.clone(),
        }
    }

    pub fn from_file(file: ModelFile) -> Result<Self, SofnnError> {
        if file.version != MODEL_VERSION {
            return Err(SofnnError::ModelFile(format!(
                "unsupported version {} (expected {MODEL_VERSION})",
                file.version
            )));
        }
        if file.params.k_d.len() != file.r {
            return Err(SofnnError::ModelFile("k_d length does not match r".into()));
        }
        if file.consequents.len() != file.r + 1
            || file
                .consequents
                .iter()
                .any(|row| row.len() != file.neurons.len())
        {
            return Err(SofnnError::ModelFile(
                "consequent matrix has wrong shape".into(),
            ));
        }
        let cols: Vec<Vec<f64>> = (0..file.neurons.len())
            .map(|j| file.consequents.iter().map(|row| row[j]).collect())
            .collect();
        SofnnModel::from_parts(file.params, file.neurons, cols)
    }

    pub fn save<W: Write>(&self, w: W) -> Result<(), SofnnError> {
        serde_json::to_writer_pretty(w, &self.to_file())
            .map_err(|e| SofnnError::ModelFile(e.to_string()))
    }

    pub fn load<R: Read>(r: R) -> Result<Self, SofnnError> {
        let file: ModelFile =
            serde_json::from_reader(r).map_err(|e| SofnnError::ModelFile(e.to_string()))?;
        SofnnModel::from_file(file)
    }
}

/// On-disk model layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub r: usize,
    pub neurons: Vec<Neuron>,
    /// `(r + 1) x neurons`: bias row, then one slope row per input.
    pub consequents: Vec<Vec<f64>>,
    pub params: SofnnParams,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainOptions {
    /// Online passes over the data; stops early once `k_rmse` is met.
    pub epochs: usize,
    /// Finish with [`SofnnModel::consolidate`] when more than one neuron
    /// remains. Otherwise consequents are refitted only after pruning.
    pub consolidate: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            epochs: 1,
            consolidate: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    /// Running RMSE of a-priori errors, one entry per step.
    pub rmse_so_far: Vec<f64>,
    /// Neuron count after each step.
    pub neuron_counts: Vec<usize>,
    /// `(step, action)` for every structural change.
    pub events: Vec<(usize, StepAction)>,
    /// Training RMSE of the model after each epoch.
    pub epoch_rmse: Vec<f64>,
    pub pruned: usize,
    pub consolidated: bool,
    pub final_rmse: f64,
    pub reached_target: bool,
}

impl TrainLog {
    pub fn additions(&self) -> usize {
        self.events
            .iter()
            .filter(|(_, a)| *a == StepAction::Added)
            .count()
    }
}

fn validate_samples(samples: &[(Vec<f64>, f64)], inputs: usize) -> Result<(), SofnnError> {
    if samples.is_empty() {
        return Err(SofnnError::EmptySamples);
    }
    for (index, (x, y)) in samples.iter().enumerate() {
        if x.len() != inputs {
            return Err(SofnnError::DimensionMismatch {
                expected: inputs,
                found: x.len(),
            });
        }
        if !y.is_finite() {
            return Err(SofnnError::NonFiniteTarget { index });
        }
        if let Some((dim, &value)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(SofnnError::InputOutOfRange { index, dim, value });
        }
    }
    Ok(())
}

/// Trains a network on `samples` in their given order.
pub fn train(
    samples: &[(Vec<f64>, f64)],
    params: &SofnnParams,
    opts: TrainOptions,
) -> Result<(SofnnModel, TrainLog), SofnnError> {
    let mut model = SofnnModel::new(params.clone())?;
    validate_samples(samples, model.inputs)?;
    let mut log = TrainLog::default();
    let mut ss = 0.0;
    let mut step = 0usize;
    for _ in 0..opts.epochs.max(1) {
        for (x, y) in samples {
            let (err, action) = model.observe(x, *y)?;
            ss += err * err;
            step += 1;
            log.rmse_so_far.push((ss / step as f64).sqrt());
            log.neuron_counts.push(model.neuron_count());
            if action != StepAction::Update {
                log.events.push((step - 1, action));
            }
        }
        let rmse = model.rmse(samples)?;
        log.epoch_rmse.push(rmse);
        if rmse <= params.k_rmse {
            break;
        }
    }
    log.pruned = model.prune(samples);
    if opts.consolidate && model.neuron_count() > 1 {
        model.consolidate(samples);
        log.consolidated = true;
    }
    log.final_rmse = model.rmse(samples)?;
    log.reached_target = log.final_rmse <= params.k_rmse;
    Ok((model, log))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(r: usize) -> SofnnParams {
        SofnnParams::standard(r)
    }

    #[test]
    fn single_neuron_outputs_its_bias() {
        let m = SofnnModel::from_parts(
            params(2),
            vec![Neuron {
                centers: vec![0.3, 0.7],
                widths: vec![0.1, 0.1],
            }],
            vec![vec![2.5, 0.0, 0.0]],
        )
        .unwrap();
        assert_eq!(m.predict(&[0.3, 0.7]).unwrap(), 2.5);
        assert_eq!(m.predict(&[1.0, 0.0]).unwrap(), 2.5);
    }

    #[test]
    fn identical_neurons_with_equal_consequents() {
        let n = Neuron {
            centers: vec![0.5],
            widths: vec![0.2],
        };
        let m = SofnnModel::from_parts(
            params(1),
            vec![n.clone(), n],
            vec![vec![1.5, 0.0], vec![1.5, 0.0]],
        )
        .unwrap();
        assert!((m.predict(&[0.1]).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn far_inputs_do_not_underflow() {
        let m = SofnnModel::from_parts(
            params(1),
            vec![
                Neuron {
                    centers: vec![0.0],
                    widths: vec![1e-6],
                },
                Neuron {
                    centers: vec![0.1],
                    widths: vec![1e-6],
                },
            ],
            vec![vec![1.0, 0.0], vec![3.0, 0.0]],
        )
        .unwrap();
        let psi = m.normalized_firing(&[1.0]).unwrap();
        assert!((psi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(m.predict(&[1.0]).unwrap(), 3.0);
    }

    #[test]
    fn untrained_and_mismatch_errors() {
        let m = SofnnModel::new(params(2)).unwrap();
        assert!(matches!(m.predict(&[0.1, 0.2]), Err(SofnnError::Untrained)));
        let t = SofnnModel::from_parts(
            params(2),
            vec![Neuron {
                centers: vec![0.0, 0.0],
                widths: vec![1.0, 1.0],
            }],
            vec![vec![0.0; 3]],
        )
        .unwrap();
        assert!(matches!(
            t.predict(&[0.1]),
            Err(SofnnError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_sample_interpolates() {
        let (m, log) = train(
            &[(vec![0.2, 0.9], 0.37)],
            &params(2),
            TrainOptions::default(),
        )
        .unwrap();
        assert_eq!(m.neuron_count(), 1);
        assert!((m.predict(&[0.2, 0.9]).unwrap() - 0.37).abs() < 1e-9);
        assert_eq!(log.additions(), 1);
    }

    #[test]
    fn conflicting_duplicates_do_not_grow() {
        let samples: Vec<_> = (0..50).map(|i| (vec![0.5, 0.5], (i % 2) as f64)).collect();
        let (m, _) = train(&samples, &params(2), TrainOptions::default()).unwrap();
        assert_eq!(m.neuron_count(), 1);
    }

    #[test]
    fn bad_samples_rejected() {
        let p = params(1);
        assert!(matches!(
            train(&[], &p, TrainOptions::default()),
            Err(SofnnError::EmptySamples)
        ));
        assert!(matches!(
            train(&[(vec![0.5], f64::NAN)], &p, TrainOptions::default()),
            Err(SofnnError::NonFiniteTarget { index: 0 })
        ));
        assert!(matches!(
            train(&[(vec![1.5], 0.0)], &p, TrainOptions::default()),
            Err(SofnnError::InputOutOfRange { .. })
        ));
        let mut bad = params(1);
        bad.sigma0 = 0.0;
        assert!(matches!(
            train(&[(vec![0.5], 0.0)], &bad, TrainOptions::default()),
            Err(SofnnError::InvalidParams(_))
        ));
    }

    #[test]
    fn file_rejects_wrong_version_and_truncation() {
        let (m, _) = train(
            &[(vec![0.2], 0.3), (vec![0.8], 0.9)],
            &params(1),
            TrainOptions::default(),
        )
        .unwrap();
        let mut f = m.to_file();
        f.version = 99;
        assert!(SofnnModel::from_file(f).is_err());
        let mut buf = Vec::new();
        m.save(&mut buf).unwrap();
        buf.truncate(buf.len() / 2);
        assert!(matches!(
            SofnnModel::load(buf.as_slice()),
            Err(SofnnError::ModelFile(_))
        ));
    }
}
