//! Digital paths: sequences of equal-or-adjacent points in a fixed image.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::DigitalImage;

/// A continuous map `I_m -> X`, stored as point indices `p_0..p_m`.
#[derive(Clone, Debug)]
pub struct DigitalPath {
    target: Arc<DigitalImage>,
    steps: Vec<usize>,
}

impl PartialEq for DigitalPath {
    fn eq(&self, other: &Self) -> bool {
        self.steps == other.steps && same_target(&self.target, &other.target)
    }
}

fn same_target(a: &Arc<DigitalImage>, b: &Arc<DigitalImage>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// True iff consecutive entries are equal or adjacent and every index is valid.
pub fn is_valid_walk(target: &DigitalImage, steps: &[usize]) -> bool {
    !steps.is_empty()
        && steps.iter().all(|&p| p < target.len())
        && steps.windows(2).all(|w| target.is_close(w[0], w[1]))
}

impl DigitalPath {
    pub fn new(target: Arc<DigitalImage>, steps: Vec<usize>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidPath("a path needs at least one point".into()));
        }
        for &p in &steps {
            target.check_index(p)?;
        }
        if let Some(t) = steps.windows(2).position(|w| !target.is_close(w[0], w[1])) {
            return Err(Error::InvalidPath(format!(
                "steps {t} and {} are neither equal nor adjacent",
                t + 1
            )));
        }
        Ok(DigitalPath { target, steps })
    }

    /// The constant path of length `m` at `p`.
    pub fn constant(target: Arc<DigitalImage>, p: usize, m: usize) -> Result<Self> {
        target.check_index(p)?;
        Ok(DigitalPath {
            target,
            steps: vec![p; m + 1],
        })
    }

    pub fn target(&self) -> &Arc<DigitalImage> {
        &self.target
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    /// The length parameter `m` (number of steps minus one).
    pub fn len(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> usize {
        self.steps[0]
    }

    pub fn end(&self) -> usize {
        *self.steps.last().expect("paths are nonempty")
    }

    /// Value at time `t`, holding the terminal point for `t > m`.
    pub fn at(&self, t: usize) -> usize {
        self.steps[t.min(self.steps.len() - 1)]
    }

    pub fn reversed(&self) -> DigitalPath {
        let mut steps = self.steps.clone();
        steps.reverse();
        DigitalPath {
            target: Arc::clone(&self.target),
            steps,
        }
    }

    /// `f * g`: `f` on `[0, m]` followed by `g` shifted to `[m, m + n]`.
    pub fn concat(&self, g: &DigitalPath) -> Result<DigitalPath> {
        if !same_target(&self.target, &g.target) {
            return Err(Error::TargetMismatch);
        }
        if self.end() != g.start() {
            return Err(Error::EndpointMismatch {
                end: self.end(),
                start: g.start(),
            });
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&g.steps[1..]);
        Ok(DigitalPath {
            target: Arc::clone(&self.target),
            steps,
        })
    }

    /// Pads with the terminal point up to length exactly `m`.
    pub fn stabilize(&self, m: usize) -> Result<DigitalPath> {
        if m < self.len() {
            return Err(Error::StabilizeTooShort {
                len: self.len(),
                requested: m,
            });
        }
        let mut steps = self.steps.clone();
        steps.resize(m + 1, self.end());
        Ok(DigitalPath {
            target: Arc::clone(&self.target),
            steps,
        })
    }

    /// Same-time closeness after stabilizing both paths to the longer length.
    pub fn pointwise_close(&self, g: &DigitalPath) -> Result<bool> {
        if !same_target(&self.target, &g.target) {
            return Err(Error::TargetMismatch);
        }
        Ok(steps_close(&self.target, &self.steps, &g.steps))
    }

    pub fn to_doc(&self) -> PathDoc {
        PathDoc {
            image: self.target.label().to_string(),
            steps: self.steps.clone(),
        }
    }
}

/// Same-time closeness of two index sequences, holding terminal points.
pub fn steps_close(target: &DigitalImage, f: &[usize], g: &[usize]) -> bool {
    let m = f.len().max(g.len());
    (0..m).all(|t| {
        let a = f[t.min(f.len() - 1)];
        let b = g[t.min(g.len() - 1)];
        target.is_close(a, b)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathDoc {
    pub image: String,
    pub steps: Vec<usize>,
}
