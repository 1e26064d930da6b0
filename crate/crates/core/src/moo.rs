//! Design spaces, objective vectors, trials and the Pareto machinery built on
//! them (dominance, non-dominated sorting, crowding distance, 2-D hypervolume).

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Executor, Result};

/// One continuous design variable with closed box bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    #[serde(default)]
    pub unit: String,
}

impl Param {
    pub fn new(name: impl Into<String>, lower: f64, upper: f64, unit: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            lower,
            upper,
            unit: unit.into(),
        }
    }

    pub fn range(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Ordered list of named, box-bounded parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Param>", into = "Vec<Param>")]
pub struct DesignSpace {
    params: Vec<Param>,
}

impl DesignSpace {
    pub fn new(params: Vec<Param>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut seen = HashSet::new();
        for p in &params {
            if p.name.trim().is_empty() {
                return Err(Error::EmptyName);
            }
            if !seen.insert(p.name.as_str()) {
                return Err(Error::DuplicateName(p.name.clone()));
            }
            // `!(a < b)` also rejects NaN bounds.
            if !(p.lower < p.upper) || !p.lower.is_finite() || !p.upper.is_finite() {
                return Err(Error::InvalidBounds {
                    name: p.name.clone(),
                    lower: p.lower,
                    upper: p.upper,
                });
            }
        }
        Ok(Self { params })
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    /// Validates `values` against the bounds.
    pub fn vector(&self, values: Vec<f64>) -> Result<DesignVector> {
        self.check(&values)?;
        Ok(DesignVector(values))
    }

    pub fn check(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                found: values.len(),
            });
        }
        for (p, &v) in self.params.iter().zip(values) {
            if !(p.lower <= v && v <= p.upper) {
                return Err(Error::OutOfBounds {
                    name: p.name.clone(),
                    value: v,
                    lower: p.lower,
                    upper: p.upper,
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &DesignVector) -> bool {
        self.check(x.values()).is_ok()
    }

    pub fn center(&self) -> DesignVector {
        DesignVector(self.params.iter().map(|p| 0.5 * (p.lower + p.upper)).collect())
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> DesignVector {
        DesignVector(
            self.params
                .iter()
                .map(|p| p.lower + rng.gen::<f64>() * p.range())
                .collect(),
        )
    }

    /// Maps each coordinate to `[0, 1]` relative to its bounds.
    pub fn normalize(&self, x: &DesignVector) -> Vec<f64> {
        self.params
            .iter()
            .zip(x.values())
            .map(|(p, v)| (v - p.lower) / p.range())
            .collect()
    }

    /// Copy of `x` with coordinate `index` replaced by `value`, clamped.
    pub fn with_coordinate(&self, x: &DesignVector, index: usize, value: f64) -> DesignVector {
        let mut v = x.0.clone();
        let p = &self.params[index];
        v[index] = value.clamp(p.lower, p.upper);
        DesignVector(v)
    }
}

impl TryFrom<Vec<Param>> for DesignSpace {
    type Error = Error;
    fn try_from(params: Vec<Param>) -> Result<Self> {
        Self::new(params)
    }
}

impl From<DesignSpace> for Vec<Param> {
    fn from(space: DesignSpace) -> Self {
        space.params
    }
}

/// A point in a [`DesignSpace`]. Construct through [`DesignSpace::vector`]
/// when the values come from outside the solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DesignVector(Vec<f64>);

impl DesignVector {
    /// Wraps values without checking bounds.
    pub fn from_unchecked(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Bitwise equality, used when replaying a trial log.
    pub fn bitwise_eq(&self, other: &DesignVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl std::ops::Index<usize> for DesignVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Finite objective values, minimization convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyObjectives);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|v| -v).collect())
    }
}

impl std::ops::Index<usize> for ObjectiveVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for ObjectiveVector {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<ObjectiveVector> for Vec<f64> {
    fn from(o: ObjectiveVector) -> Self {
        o.0
    }
}

/// Result of evaluating one design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Ok { objectives: ObjectiveVector },
    Failed { reason: String },
}

impl Outcome {
    pub fn objectives(&self) -> Option<&ObjectiveVector> {
        match self {
            Outcome::Ok { objectives } => Some(objectives),
            Outcome::Failed { .. } => None,
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, Outcome::Ok { .. })
    }
}

impl From<std::result::Result<ObjectiveVector, String>> for Outcome {
    fn from(r: std::result::Result<ObjectiveVector, String>) -> Self {
        match r {
            Ok(objectives) => Outcome::Ok { objectives },
            Err(reason) => Outcome::Failed { reason },
        }
    }
}

/// One design evaluation.
///
/// `eval_seconds` is wall-clock time and is not serialized: trial logs must
/// be byte-identical across worker counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trial {
    pub trial_id: u64,
    pub generation: usize,
    pub design: DesignVector,
    #[serde(flatten)]
    pub outcome: Outcome,
    pub rng_seed: u64,
    #[serde(default)]
    pub tag: String,
    #[serde(skip)]
    pub eval_seconds: f64,
}

/// Equality ignores `eval_seconds`.
impl PartialEq for Trial {
    fn eq(&self, other: &Self) -> bool {
        self.trial_id == other.trial_id
            && self.generation == other.generation
            && self.design == other.design
            && self.outcome == other.outcome
            && self.rng_seed == other.rng_seed
            && self.tag == other.tag
    }
}

impl Trial {
    pub fn objectives(&self) -> Option<&ObjectiveVector> {
        self.outcome.objectives()
    }
}

fn check_same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

#[inline]
fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<bool> {
    check_same_len(a.values(), b.values())?;
    Ok(dominates_unchecked(a.values(), b.values()))
}

/// Fast non-dominated sorting. Fronts list indices into `points` in
/// ascending order; every index appears exactly once.
pub fn non_dominated_sort(points: &[ObjectiveVector]) -> Result<Vec<Vec<usize>>> {
    non_dominated_sort_with(points, &Executor::sequential())
}

/// [`non_dominated_sort`] with the pairwise dominance pass spread over
/// `exec`. The result does not depend on the executor.
pub fn non_dominated_sort_with(points: &[ObjectiveVector], exec: &Executor) -> Result<Vec<Vec<usize>>> {
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    for p in points {
        check_same_len(first.values(), p.values())?;
    }
    let n = points.len();

    // For each point: the points it dominates, and how many dominate it.
    let relations: Vec<(Vec<usize>, usize)> = exec.map_range(n, |i| {
        let pi = points[i].values();
        let mut dominated = Vec::new();
        let mut count = 0usize;
        for (j, q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let pj = q.values();
            if dominates_unchecked(pi, pj) {
                dominated.push(j);
            } else if dominates_unchecked(pj, pi) {
                count += 1;
            }
        }
        (dominated, count)
    });

    let mut counts: Vec<usize> = relations.iter().map(|r| r.1).collect();
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| counts[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &relations[i].0 {
                counts[j] -= 1;
                if counts[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    Ok(fronts)
}

/// NSGA-II crowding distance of each member of `front`.
///
/// Boundary points of every objective get `+inf`; objectives with zero range
/// contribute nothing.
#[allow(clippy::needless_range_loop)]
pub fn crowding_distance(front: &[ObjectiveVector]) -> Vec<f64> {
    let n = front.len();
    let mut distance = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].len();
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        order.sort_by(|&a, &b| front[a][k].total_cmp(&front[b][k]));
        let range = front[order[n - 1]][k] - front[order[0]][k];
        if range <= 0.0 {
            continue;
        }
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        for w in 1..n - 1 {
            let i = order[w];
            if distance[i].is_finite() {
                distance[i] += (front[order[w + 1]][k] - front[order[w - 1]][k]) / range;
            }
        }
    }
    distance
}

/// Front-0 trials of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    /// Sorted by `trial_id`. Duplicated objective vectors are all kept.
    pub trials: Vec<Trial>,
    /// Set when the study had no successful trial at all.
    pub no_successful_trials: bool,
}

pub fn pareto_front(trials: &[Trial]) -> ParetoFront {
    let ok: Vec<&Trial> = trials.iter().filter(|t| t.outcome.is_ok()).collect();
    if ok.is_empty() {
        return ParetoFront {
            trials: Vec::new(),
            no_successful_trials: true,
        };
    }
    let points: Vec<ObjectiveVector> = ok.iter().filter_map(|t| t.objectives().cloned()).collect();
    // Mixed objective counts cannot come out of one study; treat as empty.
    let fronts = match non_dominated_sort(&points) {
        Ok(f) => f,
        Err(err) => {
            log::warn!("cannot extract Pareto front: {err}");
            return ParetoFront {
                trials: Vec::new(),
                no_successful_trials: false,
            };
        }
    };
    let mut members: Vec<Trial> = fronts[0].iter().map(|&i| ok[i].clone()).collect();
    members.sort_by_key(|t| t.trial_id);
    ParetoFront {
        trials: members,
        no_successful_trials: false,
    }
}

/// Area dominated by `front` and bounded by `reference` (two objectives).
pub fn hypervolume_2d(front: &[ObjectiveVector], reference: &ObjectiveVector) -> Result<f64> {
    if reference.len() != 2 {
        return Err(Error::NotBiObjective(reference.len()));
    }
    for p in front {
        if p.len() != 2 {
            return Err(Error::NotBiObjective(p.len()));
        }
        if !dominates_unchecked(p.values(), reference.values()) {
            return Err(Error::ReferenceNotDominated {
                point: p.values().to_vec(),
                reference: reference.values().to_vec(),
            });
        }
    }
    let mut pts: Vec<(f64, f64)> = front.iter().map(|p| (p[0], p[1])).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let (rx, ry) = (reference[0], reference[1]);
    let mut ceiling = ry;
    let mut area = 0.0;
    for (x, y) in pts {
        if y < ceiling {
            area += (rx - x) * (ceiling - y);
            ceiling = y;
        }
    }
    Ok(area)
}
