//! IDF records and their text form.

use std::fmt::Write as _;

use crate::IdfError;

/// Column at which field comments start.
const COMMENT_COLUMN: usize = 27;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    pub value: String,
    /// Field name shown in the trailing `!-` comment; empty for none.
    pub comment: String,
}

/// One IDF object: a class name and its ordered field values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub class: String,
    pub fields: Vec<Field>,
}

impl Record {
    pub fn value(&self, i: usize) -> Option<&str> {
        self.fields.get(i).map(|f| f.value.as_str())
    }

    /// Value of the field whose comment is `name`, ignoring a trailing `{units}`.
    pub fn get(&self, name: &str) -> Option<&str> {
        let matches = |c: &str| {
            c == name
                || c.strip_prefix(name)
                    .is_some_and(|rest| rest.starts_with(" {"))
        };
        self.fields
            .iter()
            .find(|f| matches(&f.comment))
            .map(|f| f.value.as_str())
    }

    /// First field, which is the object name for most classes.
    pub fn name(&self) -> &str {
        self.value(0).unwrap_or("")
    }

    pub fn values(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|f| f.value.as_str())
    }
}

fn push_field_line(out: &mut String, value: &str, sep: char, comment: &str) {
    let start = out.len();
    let _ = write!(out, "  {value}{sep}");
    if !comment.is_empty() {
        let used = out.len() - start;
        let pad = COMMENT_COLUMN.saturating_sub(used).max(1);
        out.extend(std::iter::repeat_n(' ', pad));
        let _ = write!(out, "!- {comment}");
    }
    out.push('\n');
}

impl Record {
    /// Single-field records stay on the class line (`Version, 8.8;`), others get one field per line.
    pub fn render_into(&self, out: &mut String) {
        match self.fields.as_slice() {
            [] => {
                let _ = writeln!(out, "{};", self.class);
            }
            [f] => {
                let _ = write!(out, "{}, {};", self.class, f.value);
                if !f.comment.is_empty() {
                    let _ = write!(out, "  !- {}", f.comment);
                }
                out.push('\n');
            }
            fields => {
                let _ = writeln!(out, "{},", self.class);
                let last = fields.len() - 1;
                for (i, f) in fields.iter().enumerate() {
                    push_field_line(out, &f.value, if i == last { ';' } else { ',' }, &f.comment);
                }
            }
        }
    }
}

/// An ordered list of records.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdfDocument {
    pub records: Vec<Record>,
}

impl IdfDocument {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.records.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            r.render_into(&mut out);
        }
        out
    }

    pub fn of_class<'a>(&'a self, class: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records
            .iter()
            .filter(move |r| r.class.eq_ignore_ascii_case(class))
    }

    pub fn count(&self, class: &str) -> usize {
        self.of_class(class).count()
    }

    /// Record of `class` with the given name (case-insensitive, as EnergyPlus compares names).
    pub fn find(&self, class: &str, name: &str) -> Option<&Record> {
        self.records
            .iter()
            .find(|r| r.class.eq_ignore_ascii_case(class) && r.name().eq_ignore_ascii_case(name))
    }

    /// Parses IDF text. `!-` comments are kept as field names; other comments are dropped.
    pub fn parse(text: &str) -> Result<Self, IdfError> {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        let mut records = Vec::new();
        let mut class: Option<String> = None;
        let mut fields: Vec<Field> = Vec::new();
        let mut start_line = 0;
        for (n, line) in text.lines().enumerate() {
            let (code, comment) = match line.find('!') {
                Some(i) => (&line[..i], Some(&line[i..])),
                None => (line, None),
            };
            // index into `fields` of the last field completed on this line
            let mut last_on_line: Option<usize> = None;
            let mut token_start = 0;
            for (i, c) in code.char_indices() {
                if c != ',' && c != ';' {
                    continue;
                }
                let token = code[token_start..i].trim().to_string();
                token_start = i + 1;
                match &class {
                    None => {
                        if token.is_empty() {
                            return Err(IdfError::Parse {
                                line: n + 1,
                                message: "record without a class name".into(),
                            });
                        }
                        class = Some(token);
                        start_line = n + 1;
                    }
                    Some(_) => {
                        fields.push(Field {
                            value: token,
                            comment: String::new(),
                        });
                        last_on_line = Some(fields.len() - 1);
                    }
                }
                if c == ';' {
                    if let (Some(i), Some(cm)) =
                        (last_on_line, comment.and_then(|c| c.strip_prefix("!-")))
                    {
                        fields[i].comment = cm.trim().to_string();
                    }
                    last_on_line = None;
                    let cls = class.take().expect("class set above");
                    records.push(Record {
                        class: cls,
                        fields: std::mem::take(&mut fields),
                    });
                }
            }
            let rest = code[token_start..].trim();
            if !rest.is_empty() {
                return Err(IdfError::Parse {
                    line: n + 1,
                    message: format!("'{rest}' is not terminated by ',' or ';'"),
                });
            }
            if let (Some(i), Some(cm)) = (last_on_line, comment.and_then(|c| c.strip_prefix("!-")))
            {
                fields[i].comment = cm.trim().to_string();
            }
        }
        if let Some(c) = class {
            return Err(IdfError::Parse {
                line: start_line,
                message: format!("record '{c}' is not terminated by ';'"),
            });
        }
        Ok(Self { records })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(class: &str, fields: &[(&str, &str)]) -> Record {
        Record {
            class: class.into(),
            fields: fields
                .iter()
                .map(|(v, c)| Field {
                    value: v.to_string(),
                    comment: c.to_string(),
                })
                .collect(),
        }
    }

    #[test]
    fn renders_one_field_per_line() {
        let doc = IdfDocument {
            records: vec![
                rec("Version", &[("8.8", "Version Identifier")]),
                rec(
                    "Zone",
                    &[("Z-0-a", "Name"), ("", "Type"), ("1", "Multiplier")],
                ),
            ],
        };
        let text = doc.render();
        assert_eq!(
            text,
            "Version, 8.8;  !- Version Identifier\n\nZone,\n  Z-0-a,                   !- Name\n  ,                        !- Type\n  1;                       !- Multiplier\n"
        );
        assert_eq!(IdfDocument::parse(&text).unwrap(), doc);
    }

    #[test]
    fn parses_compact_third_party_style() {
        let doc = IdfDocument::parse("! header\nTimestep,4;\nOutput:Variable,*,Zone Mean Air Temperature,\n  Hourly; !- Frequency\n").unwrap();
        assert_eq!(doc.records.len(), 2);
        assert_eq!(doc.records[0].value(0), Some("4"));
        assert_eq!(doc.records[1].fields.len(), 3);
        assert_eq!(doc.records[1].fields[2].comment, "Frequency");
        assert_eq!(doc.records[1].fields[1].comment, "");
    }

    #[test]
    fn unterminated_records_are_errors() {
        assert!(matches!(
            IdfDocument::parse("Zone,\n  a,\n"),
            Err(IdfError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            IdfDocument::parse("Zone, a"),
            Err(IdfError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            IdfDocument::parse(";"),
            Err(IdfError::Parse { .. })
        ));
    }

    #[test]
    fn record_without_fields() {
        let doc = IdfDocument {
            records: vec![rec("Output:Surfaces:List", &[])],
        };
        assert_eq!(IdfDocument::parse(&doc.render()).unwrap(), doc);
    }
}
