use std::cmp::Ordering;
use std::io::Read;

use anyhow::{anyhow, bail, Context, Result};
use gabortile::io::{parse_input, InputSpec, SystemSpec};
use gabortile::{ShiftSet, StepWindow};

/// A parsed input document and the name it was read from.
pub struct Input {
    pub label: String,
    pub spec: InputSpec<f64>,
}

/// Reads `arg` as a file path, `-` for stdin, or inline JSON when it
/// starts with `{`.
pub fn load(arg: &str) -> Result<Input> {
    let (label, text) = if arg.trim_start().starts_with('{') {
        ("<inline>".to_string(), arg.to_string())
    } else if arg == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .context("reading stdin")?;
        ("<stdin>".to_string(), text)
    } else {
        let text = std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
        (arg.to_string(), text)
    };
    let spec = parse_input(&text).map_err(|e| {
        anyhow!(
            "{label}:{}:{}: malformed input: {}",
            e.line(),
            e.column(),
            strip_position(&e.to_string())
        )
    })?;
    Ok(Input { label, spec })
}

/// serde_json appends " at line L column C"; the position is reported
/// separately.
fn strip_position(msg: &str) -> &str {
    msg.rfind(" at line ").map_or(msg, |i| &msg[..i])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    #[value(name = "T")]
    T,
    #[value(name = "S")]
    S,
}

impl Input {
    pub fn system(&self) -> Result<&SystemSpec<f64>> {
        match &self.spec {
            InputSpec::System(s) => Ok(s),
            InputSpec::Points(_) => bail!(
                "{}: expected a system description with a \"window\"",
                self.label
            ),
        }
    }

    pub fn window(&self) -> Result<StepWindow<f64>> {
        StepWindow::try_from(&self.system()?.window)
            .with_context(|| format!("{}: window", self.label))
    }

    /// The analysis function `f`, defaulting to the window.
    pub fn analysis_function(&self) -> Result<StepWindow<f64>> {
        match &self.system()?.f {
            Some(f) => StepWindow::try_from(f).with_context(|| format!("{}: f", self.label)),
            None => self.window(),
        }
    }

    pub fn shift_set(&self, which: Which) -> Result<ShiftSet<f64>> {
        let sys = self.system()?;
        let (name, spec) = match which {
            Which::T => ("T", &sys.time_set),
            Which::S => ("S", &sys.freq_set),
        };
        let spec = spec
            .as_ref()
            .ok_or_else(|| anyhow!("{}: input has no \"{name}\" shift set", self.label))?;
        ShiftSet::try_from(spec).with_context(|| format!("{}: shift set {name}", self.label))
    }

    /// Sorted points: the bare list, or the chosen set enumerated on
    /// `[lo, hi]`.
    pub fn points(&self, which: Which, lo: f64, hi: f64) -> Result<Vec<f64>> {
        match &self.spec {
            InputSpec::Points(p) => {
                if p.points
                    .windows(2)
                    .any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
                {
                    bail!("{}: points must be strictly increasing", self.label);
                }
                Ok(p.points.clone())
            }
            InputSpec::System(_) => Ok(self.shift_set(which)?.enumerate(lo, hi)?),
        }
    }

    /// The chosen set, or an explicit set over the bare point list.
    pub fn set_or_points(&self, which: Which) -> Result<ShiftSet<f64>> {
        match &self.spec {
            InputSpec::Points(p) => {
                let (Some(&lo), Some(&hi)) = (p.points.first(), p.points.last()) else {
                    bail!("{}: empty point list", self.label);
                };
                Ok(ShiftSet::explicit(p.points.clone(), (lo, hi))?)
            }
            InputSpec::System(_) => self.shift_set(which),
        }
    }
}
