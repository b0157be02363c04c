//! Placeholder.
#[derive(Debug)] pub struct FailureType;
#[derive(Debug)] pub struct Outcome;
#[derive(Debug)] pub struct SweepResult;
