use std::fmt;

/// A list of violated invariants. Empty means well-formed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport<I> {
    pub issues: Vec<I>,
}

impl<I> Default for ValidationReport<I> {
    fn default() -> Self {
        Self { issues: Vec::new() }
    }
}

impl<I: fmt::Display> ValidationReport<I> {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn messages(&self) -> Vec<String> {
        self.issues.iter().map(ToString::to_string).collect()
    }
}

impl<I> ValidationReport<I> {
    pub(crate) fn push(&mut self, issue: I) {
        self.issues.push(issue);
    }
}
