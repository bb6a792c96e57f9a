//! Line-oriented scenario config: a `[kind]` section header followed by
//! `key = value` lines, `#` comments. Parsing collects every error (with
//! its line number) instead of stopping at the first.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    EnergyGain,
    LaserLoss,
    Excitation,
    Cosmology,
    Superposition,
    FockSim,
    Validate,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::EnergyGain => "energy-gain",
            Kind::LaserLoss => "laser-loss",
            Kind::Excitation => "excitation",
            Kind::Cosmology => "cosmology",
            Kind::Superposition => "superposition",
            Kind::FockSim => "fock-sim",
            Kind::Validate => "validate",
        }
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "energy-gain" => Ok(Kind::EnergyGain),
            "laser-loss" => Ok(Kind::LaserLoss),
            "excitation" => Ok(Kind::Excitation),
            "cosmology" => Ok(Kind::Cosmology),
            "superposition" => Ok(Kind::Superposition),
            "fock-sim" => Ok(Kind::FockSim),
            "validate" => Ok(Kind::Validate),
            other => Err(format!("unknown scenario kind \"{other}\"")),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A parsed and validated scenario configuration.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub kind: Kind,
    numbers: BTreeMap<String, f64>,
    strings: BTreeMap<String, String>,
}

impl ScenarioConfig {
    pub fn num(&self, key: &str, default: f64) -> f64 {
        self.numbers.get(key).copied().unwrap_or(default)
    }

    /// Required numeric key; presence was already enforced by the parser.
    pub fn req(&self, key: &str) -> f64 {
        self.numbers[key]
    }

    pub fn str_opt(&self, key: &str) -> Option<&str> {
        self.strings.get(key).map(|s| s.as_str())
    }

    pub fn has(&self, key: &str) -> bool {
        self.numbers.contains_key(key) || self.strings.contains_key(key)
    }

    /// Sorted `key = value` pairs for the CSV metadata echo.
    pub fn echo(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .numbers
            .iter()
            .map(|(k, v)| format!("{k} = {v:e}"))
            .chain(self.strings.iter().map(|(k, v)| format!("{k} = {v}")))
            .collect();
        lines.sort();
        lines
    }
}

/// Key schema entry: name, whether the value is a free-form string, and
/// whether the key must be present.
struct KeySpec {
    name: &'static str,
    string_valued: bool,
    required: bool,
}

const fn num_req(name: &'static str) -> KeySpec {
    KeySpec { name, string_valued: false, required: true }
}
const fn num_opt(name: &'static str) -> KeySpec {
    KeySpec { name, string_valued: false, required: false }
}
const fn str_req(name: &'static str) -> KeySpec {
    KeySpec { name, string_valued: true, required: true }
}
const fn str_opt(name: &'static str) -> KeySpec {
    KeySpec { name, string_valued: true, required: false }
}

fn schema(kind: Kind) -> Vec<KeySpec> {
    let common = [
        num_opt("lambda_rate"),
        num_opt("a_cm"),
        num_opt("lambdabar_n_cm"),
    ];
    let mut keys: Vec<KeySpec> = common.into_iter().collect();
    match kind {
        Kind::EnergyGain => keys.extend([
            num_opt("mass_cm_inv"),
            num_opt("ka_min"),
            num_opt("ka_max"),
            num_opt("n_points"),
            num_opt("tol"),
        ]),
        Kind::LaserLoss | Kind::Excitation => {
            keys.extend([
                num_opt("lambda0_nm"),
                num_opt("k0_cm_inv"),
                num_req("sigma_cm"),
                num_req("n0"),
                num_req("t_s"),
                str_opt("regime"),
                num_opt("n_points"),
            ]);
            // lambda_rate is part of the documented minimal config
            keys.retain(|k| k.name != "lambda_rate");
            keys.push(num_req("lambda_rate"));
        }
        Kind::Cosmology => keys.extend([
            num_opt("temp0_k"),
            num_opt("t0_s"),
            num_opt("z0"),
            num_opt("delta"),
            num_opt("lambda_min_cm"),
            num_opt("lambda_max_cm"),
            num_opt("n_points"),
        ]),
        Kind::Superposition => keys.extend([
            num_req("n_photons"),
            num_req("sigma_cm"),
            num_req("k0_cm_inv"),
            num_req("d_cm"),
            num_req("t_s"),
            num_opt("mass_cm_inv"),
            num_opt("n_points"),
        ]),
        Kind::FockSim => keys.extend([
            str_req("modes"),
            str_req("initial"),
            num_req("n_max"),
            num_req("l_box_cm"),
            num_req("t_s"),
            num_opt("mass_cm_inv"),
            num_opt("steps"),
            num_opt("record_every"),
        ]),
        Kind::Validate => {}
    }
    keys
}

/// Parses config text, returning either a validated config or the full list
/// of errors, each prefixed with its line number.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, Vec<String>> {
    let mut errors: Vec<String> = Vec::new();
    let mut kind: Option<Kind> = None;
    let mut entries: Vec<(usize, String, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(section) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            match section.trim().parse::<Kind>() {
                Ok(k) => {
                    if kind.is_some() {
                        errors.push(format!(
                            "line {lineno}: duplicate section header [{section}]"
                        ));
                    } else {
                        kind = Some(k);
                    }
                }
                Err(e) => errors.push(format!("line {lineno}: {e}")),
            }
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => {
                entries.push((lineno, k.trim().to_string(), v.trim().to_string()))
            }
            None => errors.push(format!(
                "line {lineno}: expected `key = value` or a [section] header, got \"{line}\""
            )),
        }
    }

    let Some(kind) = kind else {
        errors.push("missing scenario kind (no [section] header)".to_string());
        return Err(errors);
    };

    let keys = schema(kind);
    let mut numbers: BTreeMap<String, f64> = BTreeMap::new();
    let mut strings: BTreeMap<String, String> = BTreeMap::new();
    let mut required_lines: BTreeMap<&str, usize> = BTreeMap::new();

    for (lineno, key, value) in &entries {
        let Some(spec) = keys.iter().find(|s| s.name == key.as_str()) else {
            errors.push(format!(
                "line {lineno}: unknown key \"{key}\" for kind {kind}"
            ));
            continue;
        };
        if numbers.contains_key(key.as_str()) || strings.contains_key(key.as_str()) {
            errors.push(format!("line {lineno}: duplicate key \"{key}\""));
            continue;
        }
        required_lines.insert(spec.name, *lineno);
        if spec.string_valued {
            strings.insert(key.clone(), value.clone());
        } else {
            match value.parse::<f64>() {
                Ok(x) if x.is_finite() => {
                    numbers.insert(key.clone(), x);
                }
                _ => errors.push(format!(
                    "line {lineno}: key \"{key}\" needs a finite number, got \"{value}\""
                )),
            }
        }
    }

    for spec in &keys {
        if spec.required && !numbers.contains_key(spec.name) && !strings.contains_key(spec.name)
        {
            // only complain when the key did not fail to parse above
            if !required_lines.contains_key(spec.name) {
                errors.push(format!("missing required key \"{}\" for kind {kind}", spec.name));
            }
        }
    }

    // domain checks on parsed values
    if let Some(&lr) = numbers.get("lambda_rate") {
        if lr < 0.0 {
            let line = required_lines.get("lambda_rate").copied().unwrap_or(0);
            errors.push(format!("line {line}: lambda_rate must be >= 0, got {lr}"));
        }
    }
    for key in ["a_cm", "sigma_cm", "t_s", "lambdabar_n_cm"] {
        if let Some(&v) = numbers.get(key) {
            if v <= 0.0 && key != "t_s" || v < 0.0 {
                let line = required_lines.get(key).copied().unwrap_or(0);
                errors.push(format!("line {line}: {key} must be positive, got {v}"));
            }
        }
    }
    if matches!(kind, Kind::LaserLoss | Kind::Excitation)
        && !numbers.contains_key("lambda0_nm")
        && !numbers.contains_key("k0_cm_inv")
    {
        errors.push(format!(
            "missing required key: one of \"lambda0_nm\" or \"k0_cm_inv\" for kind {kind}"
        ));
    }
    if let Some(regime) = strings.get("regime") {
        if !["low", "high", "exact", "low_k0a", "high_k0a"].contains(&regime.as_str()) {
            let line = required_lines.get("regime").copied().unwrap_or(0);
            errors.push(format!(
                "line {line}: regime must be one of low, high, exact; got \"{regime}\""
            ));
        }
    }

    if errors.is_empty() {
        Ok(ScenarioConfig { kind, numbers, strings })
    } else {
        Err(errors)
    }
}
