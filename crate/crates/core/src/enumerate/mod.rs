//! Brute-force layer: exhaustive generators, uniform samplers, block
//! decomposition, fringe counting and chain matching.

mod blocks;
mod census;
mod chain;
mod sample;
mod trees;

pub use blocks::{block_cut_tree, fringe_count, is_class_member, BlockCutTree};
pub(crate) use blocks::check_fringe_graph;
pub use chain::{chain_frequencies, exact_chain_frequencies_labelled_trees, matches_chain, ChainMatcher};
pub use census::{all_class_members_labelled, rooted_members, MAX_LABELLED_MEMBERS};
pub(crate) use census::for_each_assignment;
pub use trees::{
    all_labelled_trees, all_unlabelled_free_trees, all_unlabelled_rooted_trees, for_each_labelled_tree,
    level_sequence_graph, level_sequences, prufer_decode, LabelledTrees, LevelSequences, MAX_LABELLED_TREES,
    MAX_UNLABELLED_TREES,
};
pub use sample::{sample_labelled_tree, sample_uniform_rooted, UniformSampler};
pub(crate) use sample::{blocks_of_size, cycles_of, Shape};
