//! Object property defaults, keyed by record class then field name (without units).
//!
//! The `Schedule:Constant` entry is keyed by schedule name instead and holds the values of the
//! constant schedules the templates create.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::schema;
use crate::IdfError;

pub const SCHEDULE_VALUES: &str = "Schedule:Constant";

const BUNDLED: &str = include_str!("../data/defaults.json");

#[derive(Clone, Debug, PartialEq)]
pub struct Defaults {
    map: BTreeMap<String, BTreeMap<String, String>>,
}

fn render_value(class: &str, field: &str, v: &Value) -> Result<String, IdfError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(if *b { "Yes" } else { "No" }.to_string()),
        _ => Err(IdfError::Defaults(format!(
            "{class} / {field}: expected a string, number or boolean"
        ))),
    }
}

impl Defaults {
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED).expect("bundled defaults parse")
    }

    pub fn from_json(text: &str) -> Result<Self, IdfError> {
        let raw: BTreeMap<String, BTreeMap<String, Value>> =
            serde_json::from_str(text).map_err(|e| IdfError::Defaults(e.to_string()))?;
        let mut map = BTreeMap::new();
        for (class, fields) in raw {
            let mut out = BTreeMap::new();
            for (field, v) in fields {
                out.insert(field.clone(), render_value(&class, &field, &v)?);
            }
            map.insert(class, out);
        }
        Ok(Self { map })
    }

    /// Applies project overrides. Keys must name a known class and one of its fields
    /// (or a template schedule), so misspelt overrides are reported instead of ignored.
    pub fn with_overrides(
        mut self,
        overrides: &BTreeMap<String, BTreeMap<String, Value>>,
    ) -> Result<Self, IdfError> {
        for (class, fields) in overrides {
            let known_schedules = self.map.get(SCHEDULE_VALUES).cloned().unwrap_or_default();
            let def = schema::class(class)
                .ok_or_else(|| IdfError::Defaults(format!("unknown record class '{class}'")))?;
            for (field, v) in fields {
                let ok = if def.name == SCHEDULE_VALUES {
                    known_schedules.contains_key(field)
                } else {
                    def.index_of(field).is_some()
                };
                if !ok {
                    return Err(IdfError::Defaults(format!(
                        "{class} has no field '{field}'"
                    )));
                }
                let value = render_value(class, field, v)?;
                self.map
                    .entry(def.name.to_string())
                    .or_default()
                    .insert(field.clone(), value);
            }
        }
        Ok(self)
    }

    pub fn get(&self, class: &str, field: &str) -> Option<&str> {
        self.map
            .get(class)
            .and_then(|m| m.get(field))
            .map(String::as_str)
    }

    pub fn class(&self, class: &str) -> Option<&BTreeMap<String, String>> {
        self.map.get(class)
    }

    /// Numeric default, for values the templates compute with.
    pub fn num(&self, class: &str, field: &str) -> Result<f64, IdfError> {
        let v = self
            .get(class, field)
            .ok_or_else(|| IdfError::Defaults(format!("{class} / {field} has no default")))?;
        v.parse()
            .map_err(|_| IdfError::Defaults(format!("{class} / {field} = '{v}' is not a number")))
    }

    pub fn schedule_value(&self, schedule: &str) -> Result<f64, IdfError> {
        self.num(SCHEDULE_VALUES, schedule)
    }
}

impl Default for Defaults {
    fn default() -> Self {
        Self::bundled()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_keys_are_schema_fields() {
        let d = Defaults::bundled();
        for (class, fields) in &d.map {
            let def = schema::class(class).unwrap_or_else(|| panic!("unknown class {class}"));
            assert_eq!(def.name, class);
            if class == SCHEDULE_VALUES {
                continue;
            }
            for f in fields.keys() {
                assert!(def.index_of(f).is_some(), "{class} has no field {f}");
            }
        }
    }

    #[test]
    fn overrides_replace_and_validate() {
        let mut o = BTreeMap::new();
        o.insert(
            "Boiler:HotWater".to_string(),
            BTreeMap::from([("Nominal Capacity".to_string(), Value::from(12000))]),
        );
        let d = Defaults::bundled().with_overrides(&o).unwrap();
        assert_eq!(
            d.num("Boiler:HotWater", "Nominal Capacity").unwrap(),
            12000.0
        );

        o.insert(
            "Boiler:HotWater".to_string(),
            BTreeMap::from([("Nominal Capacty".to_string(), Value::from(1))]),
        );
        assert!(matches!(
            Defaults::bundled().with_overrides(&o),
            Err(IdfError::Defaults(_))
        ));
        let bad = BTreeMap::from([("Boyler".to_string(), BTreeMap::new())]);
        assert!(Defaults::bundled().with_overrides(&bad).is_err());
    }
}
