use qcfa::automata::StepError;
use qcfa::baselines::BaselineError;
use qcfa::engine::EngineError;
use qcfa::machines::MachineError;
use qcfa::oracles::OracleError;
use qcfa::report::ReportError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;
pub const EXIT_COUNTEREXAMPLE: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) | CliError::Io(_) => EXIT_VALIDATION,
            CliError::Inconclusive(_) => EXIT_INCONCLUSIVE,
        }
    }
}

impl From<MachineError> for CliError {
    fn from(e: MachineError) -> Self {
        match e {
            MachineError::Epsilon(_) | MachineError::Parameter(_) => CliError::Usage(e.to_string()),
            MachineError::Certification(_) => CliError::Inconclusive(e.to_string()),
            MachineError::Alphabet(_) | MachineError::Validation(_) => CliError::Validation(e.to_string()),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Argument(_) => CliError::Usage(e.to_string()),
            EngineError::Step(StepError::SymbolNotInAlphabet(_)) => CliError::Validation(e.to_string()),
            EngineError::Inconclusive(_) | EngineError::NodeCap(_) | EngineError::BranchCap(_) => {
                CliError::Inconclusive(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::Parameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Cap(_) => CliError::Usage(e.to_string()),
            OracleError::Symbol(_) => CliError::Validation(e.to_string()),
            OracleError::Inconclusive(_) => CliError::Inconclusive(e.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Machine(e) => e.into(),
            ReportError::Baseline(e) => e.into(),
            ReportError::Family(_) => CliError::Usage(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}
