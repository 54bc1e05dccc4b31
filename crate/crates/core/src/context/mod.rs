//! Diver context: sensor frames, abnormality thresholds and message purposes.

mod profile;
mod thresholds;

pub use profile::{read_profile_csv, simulate_dive_profile, write_profile_csv, ProfileShape};
pub use thresholds::{Comparator, Rule, ThresholdConfig};

use std::{fmt, path::PathBuf, str::FromStr};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textcodec;

#[derive(Debug, Error, PartialEq)]
pub enum ContextError {
    #[error("purpose {purpose} is not valid for a {role} message")]
    InvalidPurposeRole { purpose: PurposeTag, role: Role },
    #[error("unknown purpose {0:?}")]
    UnknownPurpose(String),
    #[error("unknown sensor field {0:?}")]
    UnknownField(String),
    #[error("invalid threshold rule {0:?}")]
    InvalidRule(String),
    #[error("dive duration must be positive")]
    InvalidDuration,
    #[error("invalid sensor frame: {0}")]
    InvalidFrame(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Sender,
    Reply,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Sender => "sender",
            Role::Reply => "reply",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PurposeTag {
    Safety,
    Navigation,
    Environment,
    Equipment,
    Acknowledge,
    Refuse,
    Assist,
    Resend,
}

impl PurposeTag {
    pub const ALL: [PurposeTag; 8] = [
        PurposeTag::Safety,
        PurposeTag::Navigation,
        PurposeTag::Environment,
        PurposeTag::Equipment,
        PurposeTag::Acknowledge,
        PurposeTag::Refuse,
        PurposeTag::Assist,
        PurposeTag::Resend,
    ];

    pub fn role(self) -> Role {
        match self {
            PurposeTag::Safety | PurposeTag::Navigation | PurposeTag::Environment | PurposeTag::Equipment => {
                Role::Sender
            }
            _ => Role::Reply,
        }
    }

    pub fn for_role(role: Role) -> impl Iterator<Item = PurposeTag> {
        Self::ALL.into_iter().filter(move |p| p.role() == role)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PurposeTag::Safety => "safety",
            PurposeTag::Navigation => "navigation",
            PurposeTag::Environment => "environment",
            PurposeTag::Equipment => "equipment",
            PurposeTag::Acknowledge => "acknowledge",
            PurposeTag::Refuse => "refuse",
            PurposeTag::Assist => "assist",
            PurposeTag::Resend => "resend",
        }
    }
}

impl fmt::Display for PurposeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PurposeTag {
    type Err = ContextError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == t)
            .ok_or_else(|| ContextError::UnknownPurpose(s.to_string()))
    }
}

/// A normalized diver message.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub text: String,
    pub role: Role,
    pub purpose: PurposeTag,
}

impl Message {
    /// Normalizes `raw` and checks that `purpose` belongs to `role`.
    pub fn new(raw: &str, role: Role, purpose: PurposeTag) -> crate::Result<Self> {
        if purpose.role() != role {
            return Err(ContextError::InvalidPurposeRole { purpose, role }.into());
        }
        Ok(Self { text: textcodec::normalize_message(raw)?, role, purpose })
    }
}

/// The nine monitored readings, in their canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorField {
    Depth,
    WaterTemp,
    TankPressure,
    HeartRate,
    Heading,
    Ndl,
    DiveTime,
    AscentRate,
    Battery,
}

impl SensorField {
    pub const ALL: [SensorField; 9] = [
        SensorField::Depth,
        SensorField::WaterTemp,
        SensorField::TankPressure,
        SensorField::HeartRate,
        SensorField::Heading,
        SensorField::Ndl,
        SensorField::DiveTime,
        SensorField::AscentRate,
        SensorField::Battery,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SensorField::Depth => "depth",
            SensorField::WaterTemp => "water_temp",
            SensorField::TankPressure => "tank_pressure",
            SensorField::HeartRate => "heart_rate",
            SensorField::Heading => "heading",
            SensorField::Ndl => "ndl",
            SensorField::DiveTime => "dive_time",
            SensorField::AscentRate => "ascent_rate",
            SensorField::Battery => "battery",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            SensorField::Depth => "m",
            SensorField::WaterTemp => "°C",
            SensorField::TankPressure => "psi",
            SensorField::HeartRate => "bpm",
            SensorField::Heading => "deg",
            SensorField::Ndl => "min",
            SensorField::DiveTime => "s",
            SensorField::AscentRate => "m/min",
            SensorField::Battery => "%",
        }
    }
}

impl fmt::Display for SensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SensorField {
    type Err = ContextError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| ContextError::UnknownField(s.to_string()))
    }
}

/// One sample of the diver's instruments. `ascent_rate` is positive while
/// rising.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SensorFrame {
    pub depth: f64,
    pub water_temp: f64,
    pub tank_pressure: f64,
    pub heart_rate: f64,
    pub heading: f64,
    pub ndl: f64,
    pub dive_time: f64,
    pub ascent_rate: f64,
    pub battery: f64,
}

impl SensorFrame {
    pub fn get(&self, field: SensorField) -> f64 {
        match field {
            SensorField::Depth => self.depth,
            SensorField::WaterTemp => self.water_temp,
            SensorField::TankPressure => self.tank_pressure,
            SensorField::HeartRate => self.heart_rate,
            SensorField::Heading => self.heading,
            SensorField::Ndl => self.ndl,
            SensorField::DiveTime => self.dive_time,
            SensorField::AscentRate => self.ascent_rate,
            SensorField::Battery => self.battery,
        }
    }

    pub fn validate(&self) -> Result<(), ContextError> {
        if !(self.depth >= 0.0) {
            return Err(ContextError::InvalidFrame(format!("depth {}", self.depth)));
        }
        if !(0.0..=100.0).contains(&self.battery) {
            return Err(ContextError::InvalidFrame(format!("battery {}", self.battery)));
        }
        if !(0.0..360.0).contains(&self.heading) {
            return Err(ContextError::InvalidFrame(format!("heading {}", self.heading)));
        }
        Ok(())
    }
}

/// A reading that broke its threshold rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Abnormal {
    pub field: SensorField,
    pub value: f64,
    pub rule: Rule,
}

impl fmt::Display for Abnormal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit = self.field.unit();
        write!(
            f,
            "{}: {} {} (rule {} {} {})",
            self.field,
            fmt_num(self.value),
            unit,
            self.rule.comparator,
            fmt_num(self.rule.limit),
            unit
        )
    }
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.1}")
    }
}

/// Readings of `frame` that violate a rule in `cfg`, in canonical field order.
pub fn filter_abnormal(frame: &SensorFrame, cfg: &ThresholdConfig) -> Vec<Abnormal> {
    SensorField::ALL
        .into_iter()
        .filter_map(|field| {
            let rule = cfg.rule(field)?;
            let value = frame.get(field);
            rule.violated_by(value).then_some(Abnormal { field, value, rule })
        })
        .collect()
}

/// The prompt prefix handed to recoverers: purpose, abnormal readings, image.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContextRecord {
    pub purpose: PurposeTag,
    pub readings: Vec<Abnormal>,
    pub image_ref: Option<PathBuf>,
}

impl fmt::Display for ContextRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "purpose: {}", self.purpose)?;
        for r in &self.readings {
            writeln!(f, "{r}")?;
        }
        match &self.image_ref {
            Some(p) => writeln!(f, "image: {}", p.display()),
            None => writeln!(f, "image: none"),
        }
    }
}

pub fn assemble_context(
    role: Role,
    abnormal: &[Abnormal],
    purpose: PurposeTag,
    image_ref: Option<PathBuf>,
) -> Result<ContextRecord, ContextError> {
    if purpose.role() != role {
        return Err(ContextError::InvalidPurposeRole { purpose, role });
    }
    let mut readings = abnormal.to_vec();
    readings.sort_by_key(|a| a.field);
    Ok(ContextRecord { purpose, readings, image_ref })
}
