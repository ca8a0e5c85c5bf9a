use crate::image::ImageVector;

/// First iterate of a run whose proximity is at most `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonOutput {
    pub iterate: ImageVector,
    /// Iteration index `K` of the output.
    pub index: usize,
    pub prox_value: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    /// The sweep budget ran out before the target proximity was reached.
    IterationsExhausted,
    /// The perturbation schedule underflowed to zero.
    ScheduleExhausted,
    /// Too many schedule draws without an acceptable perturbation.
    DrawCapReached,
}

impl FailureReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::IterationsExhausted => "iterations-exhausted",
            Self::ScheduleExhausted => "schedule-exhausted",
            Self::DrawCapReached => "draw-cap-reached",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub reason: FailureReason,
    pub last_iterate: ImageVector,
    pub last_index: usize,
    pub last_prox: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Converged(EpsilonOutput),
    Failed(RunFailure),
}

impl Outcome {
    pub fn is_converged(&self) -> bool {
        matches!(self, Self::Converged(_))
    }

    pub fn converged(&self) -> Option<&EpsilonOutput> {
        match self {
            Self::Converged(out) => Some(out),
            Self::Failed(_) => None,
        }
    }

    /// The output iterate, or the last iterate reached before failing.
    pub fn iterate(&self) -> &ImageVector {
        match self {
            Self::Converged(out) => &out.iterate,
            Self::Failed(f) => &f.last_iterate,
        }
    }

    pub fn index(&self) -> usize {
        match self {
            Self::Converged(out) => out.index,
            Self::Failed(f) => f.last_index,
        }
    }

    pub fn prox(&self) -> f64 {
        match self {
            Self::Converged(out) => out.prox_value,
            Self::Failed(f) => f.last_prox,
        }
    }

    pub fn failure(&self) -> Option<FailureReason> {
        match self {
            Self::Converged(_) => None,
            Self::Failed(f) => Some(f.reason),
        }
    }
}
