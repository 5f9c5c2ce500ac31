use crate::model::normalize_surface;

/// Committee roles recognized after the last comma, in normalized form.
pub const ROLE_LEXICON: [&str; 7] = [
    "CHAIR",
    "COCHAIR",
    "COMMITTEE MEMBER",
    "MEMBER",
    "ADVISOR",
    "COADVISOR",
    "DIRECTOR",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedContributor {
    pub name: String,
    pub role: Option<String>,
    /// Text between the name and the role (the comma and its spacing).
    pub separator: String,
}

pub fn is_role(s: &str) -> bool {
    let key = normalize_surface(s);
    ROLE_LEXICON.contains(&key.as_str())
}

/// Splits `"Name, Role"` on the last comma when the suffix is a known role.
pub fn parse_contributor(value: &str) -> ParsedContributor {
    if let Some(comma) = value.rfind(',') {
        let suffix = &value[comma + 1..];
        if is_role(suffix) {
            let head = &value[..comma];
            let name = head.trim();
            let role = suffix.trim();
            let name_end = head.trim_end().len();
            let role_start = comma + 1 + (suffix.len() - suffix.trim_start().len());
            return ParsedContributor {
                name: name.to_string(),
                role: Some(role.to_string()),
                separator: value[name_end..role_start].to_string(),
            };
        }
    }
    ParsedContributor {
        name: value.trim().to_string(),
        role: None,
        separator: String::new(),
    }
}
