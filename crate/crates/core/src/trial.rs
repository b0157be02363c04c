//! Placeholder.
#[derive(Debug)] pub struct TrialRecord;
