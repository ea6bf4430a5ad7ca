use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{InitError, SourceClass};

/// Sampling policy for automatic initialization.
///
/// Each cell is perturbed with probability `perturb_probability`; a perturbed
/// cell draws its source class from `class_weights` among the classes that
/// have at least one candidate. Classes missing from the map weigh zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitPolicy {
    pub perturb_probability: f64,
    pub class_weights: BTreeMap<SourceClass, f64>,
    pub seed: u64,
}

impl Default for InitPolicy {
    fn default() -> Self {
        Self {
            perturb_probability: 0.5,
            class_weights: SourceClass::valid().map(|c| (c, 1.0)).collect(),
            seed: 0,
        }
    }
}

impl InitPolicy {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_probability(mut self, p: f64) -> Self {
        self.perturb_probability = p;
        self
    }

    pub fn weight(&self, class: SourceClass) -> f64 {
        self.class_weights.get(&class).copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<(), InitError> {
        let p = self.perturb_probability;
        if !(0.0..=1.0).contains(&p) {
            return Err(InitError::InvalidPolicy(format!(
                "perturb_probability {p} outside [0, 1]"
            )));
        }
        for (class, &w) in &self.class_weights {
            if !w.is_finite() || w < 0.0 {
                return Err(InitError::InvalidPolicy(format!("weight {w} for class {class}")));
            }
            if w > 0.0 && !class.is_valid() {
                return Err(InitError::InvalidPolicy(format!(
                    "class {class} sets dataset/category bits without the table bit"
                )));
            }
        }
        if !self.class_weights.values().any(|&w| w > 0.0) {
            return Err(InitError::InvalidPolicy("no class has positive weight".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_policy_file() {
        let json = r#"{"perturb_probability":0.25,"class_weights":{"0000":0,"0010":2.0,"1010":1},"seed":7}"#;
        let p: InitPolicy = serde_json::from_str(json).unwrap();
        p.validate().unwrap();
        assert_eq!(p.weight("0010".parse().unwrap()), 2.0);
        assert_eq!(p.weight("0111".parse().unwrap()), 0.0);
    }

    #[test]
    fn rejects_bad_policies() {
        assert!(InitPolicy::default().with_probability(1.5).validate().is_err());
        let mut p = InitPolicy::default();
        p.class_weights.insert("1000".parse().unwrap(), 1.0);
        assert!(p.validate().is_err());
        let p = InitPolicy {
            class_weights: BTreeMap::new(),
            ..InitPolicy::default()
        };
        assert!(p.validate().is_err());
        assert!(InitPolicy::default().validate().is_ok());
    }
}
