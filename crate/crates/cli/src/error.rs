use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: tweetnet_core::Error,
    },

    #[error(transparent)]
    Core(#[from] tweetnet_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 2 configuration, 3 data, 4 internal.
    pub fn exit_code(&self) -> i32 {
        use tweetnet_core::Error as E;
        let core = match self {
            CliError::Config(_) => return 2,
            CliError::Io { .. } => return 4,
            CliError::Stage { source, .. } | CliError::Core(source) => source,
        };
        match core {
            E::Config(_) | E::Argument(_) => 2,
            E::Io { .. } => 4,
            E::CorpusFormat { .. }
            | E::UnknownNode(_)
            | E::NoValidK { .. }
            | E::Training(_)
            | E::Data(_)
            | E::MissingScores(_)
            | E::Format(_) => 3,
        }
    }
}

/// Attaches a stage name to core errors.
pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for tweetnet_core::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|source| CliError::Stage { stage, source })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tweetnet_core::Error as E;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(E::Argument("k".into())).exit_code(), 2);
        assert_eq!(Err::<(), _>(E::Data("bad".into())).stage("bot").unwrap_err().exit_code(), 3);
        let io = std::io::Error::other("disk");
        assert_eq!(CliError::Core(E::Io { path: "a".into(), source: io }).exit_code(), 4);
    }
}
