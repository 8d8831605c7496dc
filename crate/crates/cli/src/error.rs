use std::fmt;

/// Failure classified by exit code: 1 usage/config, 2 data, 3 numerical.
#[derive(Debug)]
pub enum CliError {
    Config(anyhow::Error),
    Data(anyhow::Error),
    Numerical(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn data(msg: impl fmt::Display) -> Self {
        CliError::Data(anyhow::anyhow!("{msg}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (CliError::Config(e) | CliError::Data(e) | CliError::Numerical(e)) = self;
        write!(f, "{e:#}")
    }
}

impl std::error::Error for CliError {}

impl From<discatt::Error> for CliError {
    fn from(e: discatt::Error) -> Self {
        match e {
            discatt::Error::Numerical(_) => CliError::Numerical(e.into()),
            discatt::Error::InvalidArgument(_) => CliError::Config(e.into()),
            _ => CliError::Data(e.into()),
        }
    }
}
