//! Random-map genericity surveys and the non-closed image demonstration.

mod demo;
mod survey;

pub use demo::{
    nonclosed_demo_report, rsoc_yz_image_contains, witness_nonclosed_demo, yz_projection, DemoReport,
    WitnessSequence,
};
pub use survey::{
    random_map, survey, ClassFractions, RadiusStats, SurveyConfig, SurveyReport, SurveyRow,
    B_RECHECK_RADIUS,
};
