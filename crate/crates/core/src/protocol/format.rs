//! JSON protocol documents.
//!
//! ```json
//! {"type": "pulse_sequence", "T": 4.0,
//!  "pulses": [{"t": 1.0, "axis": [1.0, 0.0, 0.0], "angle": 3.141592653589793}],
//!  "initial_state": {"alpha": 1.5707963267948966, "beta": 0.0}}
//! ```
//!
//! A pulse carries either `axis` + `angle` or a `matrix` of four `[re, im]`
//! pairs in row-major order. Continuous controls use `"type":
//! "transverse_drive"` (with `g`) or `"type": "piecewise"` (with `segments`).
//! Floats are written shortest-round-trip, so documents reload bit-exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    ContinuousControl, ControlKind, GeneratorSegment, InitialState, Pulse, PulseSequence, Rotation,
};
use crate::error::{Error, Result};
use crate::linalg::Mat2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseDoc {
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[f64; 2]; 4]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialStateDoc {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentDoc {
    pub t0: f64,
    pub t1: f64,
    pub generator: [[f64; 2]; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProtocolDocument {
    PulseSequence {
        #[serde(rename = "T")]
        total_time: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        t0: f64,
        pulses: Vec<PulseDoc>,
        initial_state: InitialStateDoc,
    },
    TransverseDrive {
        #[serde(rename = "T")]
        total_time: f64,
        g: f64,
    },
    Piecewise {
        #[serde(rename = "T")]
        total_time: f64,
        segments: Vec<SegmentDoc>,
    },
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn mat_to_doc(m: &Mat2) -> [[f64; 2]; 4] {
    [m.a, m.b, m.c, m.d].map(|z| [z.re, z.im])
}

fn mat_from_doc(d: &[[f64; 2]; 4]) -> Mat2 {
    let z = |p: [f64; 2]| Complex64::new(p[0], p[1]);
    Mat2::new(z(d[0]), z(d[1]), z(d[2]), z(d[3]))
}

impl From<&PulseSequence> for ProtocolDocument {
    fn from(seq: &PulseSequence) -> Self {
        let pulses = seq
            .pulses
            .iter()
            .map(|p| match p.rotation {
                Rotation::AxisAngle { axis, angle } => PulseDoc {
                    t: p.time,
                    axis: Some(axis),
                    angle: Some(angle),
                    matrix: None,
                },
                Rotation::Matrix(m) => PulseDoc {
                    t: p.time,
                    axis: None,
                    angle: None,
                    matrix: Some(mat_to_doc(&m)),
                },
            })
            .collect();
        ProtocolDocument::PulseSequence {
            total_time: seq.total_time,
            t0: seq.start_time,
            pulses,
            initial_state: InitialStateDoc {
                alpha: seq.initial_state.alpha,
                beta: seq.initial_state.beta,
            },
        }
    }
}

impl From<&ContinuousControl> for ProtocolDocument {
    fn from(c: &ContinuousControl) -> Self {
        match &c.kind {
            ControlKind::TransverseDrive { g } => ProtocolDocument::TransverseDrive {
                total_time: c.total_time,
                g: *g,
            },
            ControlKind::Piecewise(segs) => ProtocolDocument::Piecewise {
                total_time: c.total_time,
                segments: segs
                    .iter()
                    .map(|s| SegmentDoc {
                        t0: s.t0,
                        t1: s.t1,
                        generator: mat_to_doc(&s.generator),
                    })
                    .collect(),
            },
        }
    }
}

/// A decoded protocol of either family.
#[derive(Debug, Clone, PartialEq)]
pub enum DecodedProtocol {
    Discrete(PulseSequence),
    Continuous(ContinuousControl),
}

impl ProtocolDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Converts to a validated protocol.
    pub fn decode(&self) -> Result<DecodedProtocol> {
        match self {
            ProtocolDocument::PulseSequence {
                total_time,
                t0,
                pulses,
                initial_state,
            } => {
                let pulses = pulses
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let rotation = match (p.axis, p.angle, p.matrix) {
                            (Some(axis), Some(angle), None) => Rotation::AxisAngle { axis, angle },
                            (None, None, Some(m)) => Rotation::Matrix(mat_from_doc(&m)),
                            _ => {
                                return Err(Error::InvalidProtocol(format!(
                                    "pulse {i}: expected either axis+angle or matrix"
                                )))
                            }
                        };
                        Ok(Pulse::new(p.t, rotation))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let seq = PulseSequence {
                    pulses,
                    total_time: *total_time,
                    start_time: *t0,
                    initial_state: InitialState {
                        alpha: initial_state.alpha,
                        beta: initial_state.beta,
                    },
                };
                seq.validate()?;
                Ok(DecodedProtocol::Discrete(seq))
            }
            ProtocolDocument::TransverseDrive { total_time, g } => Ok(DecodedProtocol::Continuous(
                ContinuousControl::transverse_drive(*g, *total_time)?,
            )),
            ProtocolDocument::Piecewise {
                total_time,
                segments,
            } => {
                let segs = segments
                    .iter()
                    .map(|s| GeneratorSegment {
                        t0: s.t0,
                        t1: s.t1,
                        generator: mat_from_doc(&s.generator),
                    })
                    .collect();
                Ok(DecodedProtocol::Continuous(ContinuousControl::piecewise(
                    segs,
                    *total_time,
                )?))
            }
        }
    }
}
