//! Seeded Monte Carlo link simulation, sweeps and result files.

pub mod campaign;
pub mod config;
pub mod sim;
pub mod sweep;

pub use campaign::{run_campaign, CampaignOptions, CampaignSummary, CsvRow};
pub use config::{Campaign, CoresetSection, Experiment, OfdmSection, SimConfig, StopRule, Vary};
pub use sim::{LinkSimulator, TrialOutcome};
pub use sweep::{
    required_cnr, resolve_workers, run_bler_point, run_bler_point_at, search_required_cnr, sweep, trial_seed,
    wilson_halfwidth, BlerCurve, BlerPoint, RequiredCnr, SearchPlan,
};
