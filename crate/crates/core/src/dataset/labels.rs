use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::DatasetError;

/// Which ARFF attributes are labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelSpec {
    /// Label attributes by name (MULAN XML); the order defines Y columns.
    Names(Vec<String>),
    /// The first `n` attributes.
    First(usize),
    /// The last `n` attributes.
    Last(usize),
    /// Read the MEKA `-C n` option from the `@relation` line
    /// (`n > 0`: first n attributes, `n < 0`: last |n|).
    Header,
}

/// Parses a MULAN label file: every `<label name="..."/>` element in
/// document order, including nested (hierarchical) ones.
pub fn parse_label_xml(text: &str) -> Result<LabelSpec, DatasetError> {
    let doc = roxmltree::Document::parse(text).map_err(|e| DatasetError::LabelXml(e.to_string()))?;
    let mut names = Vec::new();
    let mut seen = HashSet::new();
    for node in doc.descendants().filter(|n| n.is_element() && n.tag_name().name() == "label") {
        let name = node
            .attribute("name")
            .ok_or_else(|| DatasetError::LabelXml("<label> element without a name attribute".into()))?;
        if !seen.insert(name.to_string()) {
            return Err(DatasetError::LabelXml(format!("duplicate label '{name}'")));
        }
        names.push(name.to_string());
    }
    if names.is_empty() {
        return Err(DatasetError::LabelXml("no <label> elements".into()));
    }
    Ok(LabelSpec::Names(names))
}
