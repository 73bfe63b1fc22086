use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorKind {
    Ideal,
    PauliX,
    PauliY,
    PauliZ,
    StatePrep,
    Dephase1q,
    Dephase2q,
    FlipFlop2q,
    Readout10,
    Readout01,
    DoubleReadout1010,
    WhiteNoise,
    Custom(String),
}

impl ErrorKind {
    pub fn is_readout(&self) -> bool {
        matches!(self, ErrorKind::Readout10 | ErrorKind::Readout01 | ErrorKind::DoubleReadout1010)
    }

    pub fn short_name(&self) -> String {
        match self {
            ErrorKind::Ideal => "ideal".into(),
            ErrorKind::PauliX => "X".into(),
            ErrorKind::PauliY => "Y".into(),
            ErrorKind::PauliZ => "Z".into(),
            ErrorKind::StatePrep => "prep".into(),
            ErrorKind::Dephase1q => "deph1".into(),
            ErrorKind::Dephase2q => "deph2".into(),
            ErrorKind::FlipFlop2q => "flipflop".into(),
            ErrorKind::Readout10 => "ro10".into(),
            ErrorKind::Readout01 => "ro01".into(),
            ErrorKind::DoubleReadout1010 => "ro1010".into(),
            ErrorKind::WhiteNoise => "white".into(),
            ErrorKind::Custom(s) => s.clone(),
        }
    }
}

/// Identifies one error source: what happened, where, and when.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ErrorLabel {
    pub kind: ErrorKind,
    #[serde(default)]
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub layer: Option<usize>,
}

impl ErrorLabel {
    pub fn new(kind: ErrorKind, qubits: Vec<usize>, layer: Option<usize>) -> Self {
        ErrorLabel { kind, qubits, layer }
    }

    pub fn ideal() -> Self {
        Self::new(ErrorKind::Ideal, vec![], None)
    }

    pub fn white_noise() -> Self {
        Self::new(ErrorKind::WhiteNoise, vec![], None)
    }

    pub fn custom(name: impl Into<String>) -> Self {
        Self::new(ErrorKind::Custom(name.into()), vec![], None)
    }
}

impl fmt::Display for ErrorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.short_name())?;
        if !self.qubits.is_empty() {
            let q: Vec<String> = self.qubits.iter().map(|q| q.to_string()).collect();
            write!(f, "[{}]", q.join(","))?;
        }
        if let Some(l) = self.layer {
            write!(f, "@{l}")?;
        }
        Ok(())
    }
}
