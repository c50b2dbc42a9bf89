use std::path::PathBuf;

use crate::netcore::ClassKey;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("node id {id} out of range for a network of {node_count} nodes")]
    InvalidNode { id: usize, node_count: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("degenerate infection groups ({infected} infected, {uninfected} uninfected)")]
    DegenerateGroups { infected: usize, uninfected: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mixing specification is infeasible: {0}")]
    InfeasibleSpec(String),
    #[error("degree sequence has odd sum {0}")]
    OddDegreeSum(u64),
    #[error("degree sequence is not graphical: {0}")]
    NotGraphical(String),
    #[error("start network does not match the requested degree/infection sequences")]
    SequenceMismatch,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("eligible seed pool has {available} nodes, {requested} requested")]
    SeedPoolTooSmall { available: usize, requested: usize },
    #[error("no weight for class {0}")]
    MissingWeight(ClassKey),
    #[error("respondent {0} has zero degree")]
    ZeroDegree(usize),
    #[error("sample has no recruitment edges")]
    NoRecruitmentEdges,
    #[error("respondent {0} has no cross-alter count")]
    MissingCrossAlters(usize),
    #[error("observed sample counts ({sampled}) exceed population size {pop_size}")]
    SampleExceedsPopulation { sampled: usize, pop_size: usize },
    #[error("class {0} is sampled but has no members in the realized population")]
    EmptyRealizedClass(ClassKey),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        Error::Iteration {
            iteration,
            source: Box::new(self),
        }
    }
}
