//! Assembles records by field name against the schema, filling gaps from the defaults.

use std::fmt::Display;

use crate::defaults::Defaults;
use crate::document::{Field, Record};
use crate::schema::{self, field_key, ClassDef};
use crate::IdfError;

/// Formats a computed number: at most six decimals, no negative zero.
pub fn num(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

/// Rejects user-supplied names that would break the IDF syntax.
pub fn checked_name(value: &str) -> Result<&str, IdfError> {
    if value.trim().is_empty() || value.contains([',', ';', '!', '\n', '\r']) {
        return Err(IdfError::InvalidName {
            value: value.to_string(),
        });
    }
    Ok(value)
}

pub struct RecordBuilder {
    def: &'static ClassDef,
    values: Vec<Option<String>>,
}

impl RecordBuilder {
    /// Panics on a class the schema does not know; templates only use known classes.
    pub fn new(class: &str) -> Self {
        let def = schema::class(class)
            .unwrap_or_else(|| panic!("record class {class} is not in the schema"));
        Self {
            def,
            values: vec![None; def.fields.len()],
        }
    }

    pub fn set(mut self, key: &str, value: impl Display) -> Self {
        let i = self
            .def
            .index_of(key)
            .unwrap_or_else(|| panic!("{} has no field {key}", self.def.name));
        self.values[i] = Some(value.to_string());
        self
    }

    pub fn num(self, key: &str, value: f64) -> Self {
        self.set(key, num(value))
    }

    /// Appends the next value of the repeating group.
    pub fn push(mut self, value: impl Display) -> Self {
        assert!(
            !self.def.group.is_empty(),
            "{} has no repeating fields",
            self.def.name
        );
        self.values.push(Some(value.to_string()));
        self
    }

    /// Unset fields take the class defaults; trailing empty fields are dropped.
    pub fn build(self, defaults: &Defaults) -> Record {
        let class_defaults = defaults.class(self.def.name);
        let mut fields: Vec<Field> = self
            .values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let def = self.def.field(i).expect("field within schema");
                let value = v
                    .or_else(|| {
                        class_defaults
                            .and_then(|m| m.get(field_key(&def.name)))
                            .cloned()
                    })
                    .unwrap_or_default();
                Field {
                    value,
                    comment: def.name,
                }
            })
            .collect();
        while fields.len() > 1 && fields.last().is_some_and(|f| f.value.is_empty()) {
            fields.pop();
        }
        Record {
            class: self.def.name.to_string(),
            fields,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_are_short_and_signless_at_zero() {
        assert_eq!(num(0.30000000000000004), "0.3");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(-1e-9), "0");
        assert_eq!(num(12.0), "12");
        assert_eq!(num(-2.5), "-2.5");
    }

    #[test]
    fn names_with_separators_are_rejected() {
        assert_eq!(checked_name("Living room").unwrap(), "Living room");
        for bad in ["a,b", "a;b", "a!b", "a\nb", " "] {
            assert!(
                matches!(checked_name(bad), Err(IdfError::InvalidName { .. })),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn defaults_fill_unset_fields_only() {
        let d = Defaults::bundled();
        let r = RecordBuilder::new("Pump:ConstantSpeed")
            .set("Name", "P")
            .set("Rated Flow Rate", 0.002)
            .build(&d);
        assert_eq!(r.get("Rated Flow Rate {m3/s}"), Some("0.002"));
        assert_eq!(r.get("Motor Efficiency"), Some("0.9"));
        assert_eq!(r.get("Inlet Node Name"), Some(""));
        assert_eq!(r.fields.len(), 9);
    }

    #[test]
    fn groups_and_trailing_blanks() {
        let d = Defaults::bundled();
        let r = RecordBuilder::new("BranchList")
            .set("Name", "L")
            .push("a")
            .push("b")
            .build(&d);
        assert_eq!(r.fields[2].comment, "Branch 2 Name");
        let r = RecordBuilder::new("ZoneHVAC:EquipmentConnections")
            .set("Zone Name", "Z")
            .build(&d);
        assert_eq!(r.fields.len(), 1);
    }
}
