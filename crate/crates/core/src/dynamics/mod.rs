//! Matching transfer on lines, the 4-regular forest from a four-copy
//! doubling matching, and a free `F₂` action generating a forest.

pub mod action;
pub mod forest;
pub mod line;

pub use action::{audit_action, f2_action_from_forest, synthetic_tree, ActionAudit, F2Action, StageReport, TreeWindow, SLOTS};
pub use forest::{forest_demo, forest_from_paradox, ForestReport, lipschitz_violations, ForestWindow, TripleFunctionSystem};
pub use line::{
    majority_ball, odd_path_graph, positions_to_matching, random_gn_matching, transfer_matching, Direction,
    OrientedTwoRegular, Transfer,
};
