use core::ops::AddAssign;

/// Work counters shared by the chart and recursive engines.
///
/// Reset at the start of every parsing operation; each field only grows while
/// that operation runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounters {
    /// Calls to the feature-structure compatibility score.
    pub structure_compat_evals: u64,
    /// Assignments whose faded score was computed (including rescoring).
    pub assignment_scorings: u64,
    /// Binary additions spent summing assignment scores into interpretations.
    pub elementary_sums: u64,
    /// Interpretations whose score was computed.
    pub interpretations_scored: u64,
}

impl OpCounters {
    pub fn reset(&mut self) {
        *self = OpCounters::default();
    }
}

impl AddAssign for OpCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.structure_compat_evals += rhs.structure_compat_evals;
        self.assignment_scorings += rhs.assignment_scorings;
        self.elementary_sums += rhs.elementary_sums;
        self.interpretations_scored += rhs.interpretations_scored;
    }
}
