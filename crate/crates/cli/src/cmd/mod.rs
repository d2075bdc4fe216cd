pub mod analyze;
pub mod complete;
pub mod design;
pub mod duality;
pub mod scatter;
pub mod squeeze;
pub mod synth;
