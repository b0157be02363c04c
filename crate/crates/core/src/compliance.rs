//! Placeholder.
#[derive(Debug)] pub struct DesignParams;
#[derive(Debug)] pub struct DesignTable;
#[derive(Debug)] pub struct StiffnessSpec;
