//! Gradient-boosted regression trees trained with a pairwise logistic
//! ranking objective over dataset groups.

mod model;
mod objective;
mod tree;

pub use model::{feature_hash, GBRanker, RankerConfig, TrainReport, MODEL_VERSION};
pub use objective::{accumulate_pairwise, pairwise_gradients, pairwise_loss};
pub use tree::{fit_tree_to_gradients, leaf_weight, split_gain, FeatureMatrix, RegNode, RegTree, TreeGrowth};
