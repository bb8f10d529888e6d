//! JSON shapes for windows, shift sets and system descriptions.
//!
//! ```json
//! {"window": {"breakpoints": [0, 1], "values": [[1, 0]]},
//!  "T": {"type": "periodic", "a": 1, "offsets": [0]},
//!  "S": {"type": "aps", "progressions": [[1, 0]]}}
//! ```

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::shiftsets::{Perturbation, Progression, ShiftSet};
use crate::windows::StepWindow;

/// `{"breakpoints": [...], "values": [[re, im], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct WindowSpec<T: Scalar> {
    pub breakpoints: Vec<T>,
    pub values: Vec<[T; 2]>,
}

impl<T: Scalar> TryFrom<&WindowSpec<T>> for StepWindow<T> {
    type Error = Error;

    fn try_from(spec: &WindowSpec<T>) -> Result<Self> {
        StepWindow::new(
            spec.breakpoints.clone(),
            spec.values
                .iter()
                .map(|&[re, im]| Complex::new(re, im))
                .collect(),
        )
    }
}

impl<T: Scalar> From<&StepWindow<T>> for WindowSpec<T> {
    fn from(w: &StepWindow<T>) -> Self {
        Self {
            breakpoints: w.breakpoints().to_vec(),
            values: w.values().iter().map(|v| [v.re, v.im]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "snake_case",
    deny_unknown_fields,
    bound = "T: Scalar"
)]
pub enum PerturbationSpec<T: Scalar> {
    Alternating { amplitude: T, spacing: T },
    Jitter { amplitude: T, seed: u64 },
    Decay { scale: T, shift: T },
}

/// Progressions are written `[period, offset]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "type",
    rename_all = "snake_case",
    deny_unknown_fields,
    bound = "T: Scalar"
)]
pub enum ShiftSetSpec<T: Scalar> {
    Periodic {
        a: T,
        offsets: Vec<T>,
    },
    Aps {
        progressions: Vec<[T; 2]>,
    },
    Explicit {
        points: Vec<T>,
        window: [T; 2],
    },
    Perturbed {
        base: Box<ShiftSetSpec<T>>,
        rule: PerturbationSpec<T>,
    },
}

impl<T: Scalar> TryFrom<&ShiftSetSpec<T>> for ShiftSet<T> {
    type Error = Error;

    fn try_from(spec: &ShiftSetSpec<T>) -> Result<Self> {
        match spec {
            ShiftSetSpec::Periodic { a, offsets } => ShiftSet::periodic(*a, offsets.clone()),
            ShiftSetSpec::Aps { progressions } => ShiftSet::union_of_aps(
                progressions
                    .iter()
                    .map(|&[period, offset]| Progression { period, offset })
                    .collect(),
            ),
            ShiftSetSpec::Explicit { points, window } => {
                ShiftSet::explicit(points.clone(), (window[0], window[1]))
            }
            ShiftSetSpec::Perturbed { base, rule } => {
                let rule = match *rule {
                    PerturbationSpec::Alternating { amplitude, spacing } => {
                        Perturbation::Alternating { amplitude, spacing }
                    }
                    PerturbationSpec::Jitter { amplitude, seed } => {
                        Perturbation::Jitter { amplitude, seed }
                    }
                    PerturbationSpec::Decay { scale, shift } => {
                        Perturbation::Decay { scale, shift }
                    }
                };
                ShiftSet::perturbed(ShiftSet::try_from(base.as_ref())?, rule)
            }
        }
    }
}

impl<T: Scalar> From<&ShiftSet<T>> for ShiftSetSpec<T> {
    fn from(set: &ShiftSet<T>) -> Self {
        match set {
            ShiftSet::Periodic { period, offsets } => ShiftSetSpec::Periodic {
                a: *period,
                offsets: offsets.clone(),
            },
            ShiftSet::UnionOfAps(aps) => ShiftSetSpec::Aps {
                progressions: aps.iter().map(|p| [p.period, p.offset]).collect(),
            },
            ShiftSet::Explicit { points, window } => ShiftSetSpec::Explicit {
                points: points.clone(),
                window: [window.0, window.1],
            },
            ShiftSet::Perturbed { base, rule } => ShiftSetSpec::Perturbed {
                base: Box::new(ShiftSetSpec::from(base.as_ref())),
                rule: match *rule {
                    Perturbation::Alternating { amplitude, spacing } => {
                        PerturbationSpec::Alternating { amplitude, spacing }
                    }
                    Perturbation::Jitter { amplitude, seed } => {
                        PerturbationSpec::Jitter { amplitude, seed }
                    }
                    Perturbation::Decay { scale, shift } => {
                        PerturbationSpec::Decay { scale, shift }
                    }
                },
            },
        }
    }
}

/// A Gabor system description; `f` is an optional analysis function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct SystemSpec<T: Scalar> {
    pub window: WindowSpec<T>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub time_set: Option<ShiftSetSpec<T>>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub freq_set: Option<ShiftSetSpec<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<WindowSpec<T>>,
}

/// A bare sorted point list, `{"points": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct PointsSpec<T: Scalar> {
    pub points: Vec<T>,
}

/// Any accepted input document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, bound = "T: Scalar")]
pub enum InputSpec<T: Scalar> {
    System(SystemSpec<T>),
    Points(PointsSpec<T>),
}

pub fn parse_input<T: Scalar>(text: &str) -> std::result::Result<InputSpec<T>, serde_json::Error> {
    // untagged enums lose the position of syntax errors, so check syntax first
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("points").is_some() {
        serde_json::from_str(text).map(InputSpec::Points)
    } else {
        serde_json::from_str(text).map(InputSpec::System)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_system() {
        let text = r#"{
            "window": {"breakpoints": [0, 0.5, 1, 1.5], "values": [[1, 0], [0, 0], [1, 0]]},
            "T": {"type": "periodic", "a": 2, "offsets": [0, 0.5]},
            "S": {"type": "aps", "progressions": [[2, 0], [2, 0.5]]}
        }"#;
        let InputSpec::System(sys) = parse_input::<f64>(text).unwrap() else {
            panic!("expected a system");
        };
        let w = StepWindow::try_from(&sys.window).unwrap();
        assert_eq!(w.energy(), 1.0);
        let t = ShiftSet::try_from(sys.time_set.as_ref().unwrap()).unwrap();
        let s = ShiftSet::try_from(sys.freq_set.as_ref().unwrap()).unwrap();
        assert_eq!(
            t.enumerate(-2.0, 2.0).unwrap(),
            s.enumerate(-2.0, 2.0).unwrap()
        );
        assert!(sys.f.is_none());
    }

    #[test]
    fn parses_points_and_perturbed_sets() {
        let InputSpec::Points(p) = parse_input::<f64>(r#"{"points": [0, 0.5, 2]}"#).unwrap() else {
            panic!("expected points");
        };
        assert_eq!(p.points, vec![0.0, 0.5, 2.0]);

        let spec: ShiftSetSpec<f64> = serde_json::from_str(
            r#"{"type": "perturbed", "base": {"type": "periodic", "a": 1, "offsets": [0]},
                "rule": {"kind": "alternating", "amplitude": 0.1, "spacing": 1}}"#,
        )
        .unwrap();
        let set = ShiftSet::try_from(&spec).unwrap();
        assert_eq!(set.enumerate(-0.5, 1.5).unwrap(), vec![0.1, 0.9]);
        assert_eq!(ShiftSetSpec::from(&set), spec);
    }

    #[test]
    fn syntax_errors_keep_their_position() {
        let err = parse_input::<f64>("{\n  \"window\": [1,\n}").unwrap_err();
        assert!(err.is_syntax());
        assert_eq!(err.line(), 3);
    }

    #[test]
    fn invalid_contents_are_domain_errors() {
        let spec = WindowSpec::<f64> {
            breakpoints: vec![1.0, 0.0],
            values: vec![[1.0, 0.0]],
        };
        assert!(matches!(
            StepWindow::try_from(&spec),
            Err(Error::InvalidWindow(_))
        ));
        let bad: std::result::Result<ShiftSetSpec<f64>, _> =
            serde_json::from_str(r#"{"type": "lattice", "a": 1}"#);
        assert!(bad.is_err());
    }
}
