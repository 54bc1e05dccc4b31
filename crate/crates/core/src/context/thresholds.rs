use std::{collections::BTreeMap, fmt, path::Path};

use serde::Serialize;

use super::{ContextError, SensorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Comparator {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
        })
    }
}

/// A reading is abnormal when `value <comparator> limit` holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rule {
    pub comparator: Comparator,
    pub limit: f64,
}

impl Rule {
    pub fn violated_by(&self, value: f64) -> bool {
        match self.comparator {
            Comparator::Lt => value < self.limit,
            Comparator::Le => value <= self.limit,
            Comparator::Gt => value > self.limit,
            Comparator::Ge => value >= self.limit,
        }
    }

    /// Parses `"< 700"`, `">=9"` and similar.
    pub fn parse(s: &str) -> Result<Self, ContextError> {
        let t = s.trim();
        let (comparator, rest) = if let Some(r) = t.strip_prefix("<=") {
            (Comparator::Le, r)
        } else if let Some(r) = t.strip_prefix(">=") {
            (Comparator::Ge, r)
        } else if let Some(r) = t.strip_prefix('<') {
            (Comparator::Lt, r)
        } else if let Some(r) = t.strip_prefix('>') {
            (Comparator::Gt, r)
        } else {
            return Err(ContextError::InvalidRule(s.to_string()));
        };
        let limit: f64 = rest.trim().parse().map_err(|_| ContextError::InvalidRule(s.to_string()))?;
        if !limit.is_finite() {
            return Err(ContextError::InvalidRule(s.to_string()));
        }
        Ok(Self { comparator, limit })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.comparator, self.limit)
    }
}

/// At most one rule per sensor field. Stored as a TOML table of
/// `field = "<op> <limit>"` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdConfig {
    rules: BTreeMap<SensorField, Rule>,
}

const DEFAULT_TOML: &str = "\
# Abnormal-reading rules, one per sensor field: field = \"<op> <limit>\".
water_temp = \"< 15\"
tank_pressure = \"< 700\"

# Illustrative recreational-diving limits, not taken from measured data.
depth = \"> 30\"
ascent_rate = \"> 9\"
ndl = \"< 5\"
heart_rate = \"> 150\"
battery = \"< 15\"
";

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self::from_toml(DEFAULT_TOML).expect("default thresholds parse")
    }
}

impl ThresholdConfig {
    pub fn empty() -> Self {
        Self { rules: BTreeMap::new() }
    }

    /// The default rule file, with comments.
    pub fn default_toml() -> &'static str {
        DEFAULT_TOML
    }

    pub fn rule(&self, field: SensorField) -> Option<Rule> {
        self.rules.get(&field).copied()
    }

    /// Sets the rule for `field`, replacing any existing one.
    pub fn set(&mut self, field: SensorField, rule: Rule) {
        self.rules.insert(field, rule);
    }

    pub fn remove(&mut self, field: SensorField) -> Option<Rule> {
        self.rules.remove(&field)
    }

    pub fn rules(&self) -> impl Iterator<Item = (SensorField, Rule)> + '_ {
        self.rules.iter().map(|(f, r)| (*f, *r))
    }

    pub fn from_toml(s: &str) -> crate::Result<Self> {
        let table: BTreeMap<String, String> = toml::from_str(s).map_err(|e| crate::Error::Config(e.to_string()))?;
        let mut rules = BTreeMap::new();
        for (k, v) in table {
            rules.insert(k.parse::<SensorField>()?, Rule::parse(&v)?);
        }
        Ok(Self { rules })
    }

    pub fn to_toml(&self) -> String {
        self.rules.iter().map(|(f, r)| format!("{f} = \"{r}\"\n")).collect()
    }

    pub fn load(path: &Path) -> crate::Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}
