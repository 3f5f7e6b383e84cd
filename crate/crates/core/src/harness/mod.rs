//! Corpus pipeline: ingestion, model construction, synthetic corpora,
//! statistics, and batch attack simulation with CSV reports.

pub mod corpus;
pub mod report;
pub mod synth;

pub use corpus::{
    build_variation_model, load_reference, load_sequences, parse_sequences, Corpus, InputFormat,
    LoadOptions, ModelBuild, Record,
};
pub use report::{
    histogram, histogram_csv, nearest_rank, simulate_attacks, simulate_attacks_observed, spearman,
    Aggregates, AttackKind, AttackReport, Bin, ReportRow,
};
pub use synth::{
    corpus_stats, generate_synthetic_corpus, generate_synthetic_corpus_with, stats_of, CorpusStats,
    EventCounts, EventPlanter, Moments, PlantedSequence, SynthConfig, SyntheticCorpus,
};
