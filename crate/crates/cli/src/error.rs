use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("no such input file: {0}")]
    MissingInput(String),
    #[error("bad filling {0:?}: expected CUSP=P/Q")]
    FillingSyntax(String),
    #[error("bad class {0:?}: expected comma-separated integers")]
    ClassSyntax(String),
    #[error("configuration rejected:\n{}", .0.join("\n"))]
    Config(Vec<String>),
    #[error("cannot start the worker pool: {0}")]
    Pool(String),
    #[error("{0}")]
    Record(String),
}
