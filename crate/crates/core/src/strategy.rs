//! Placeholder.
#[derive(Debug)] pub struct TaskSpec;
