//! Placeholder.
#[derive(Debug)] pub struct SimConfig;
