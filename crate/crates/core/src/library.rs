//! Past-project libraries: a directory of `.goal` files searched in full
//! text over contribution links.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dsl;
use crate::export::contribution_text;
use crate::model::{natural_cmp, Id};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LibraryHit {
    pub file: String,
    pub link: Id,
    pub contribution: String,
    pub description: String,
    pub confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence_label: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LibrarySearch {
    pub term: String,
    pub hits: Vec<LibraryHit>,
    /// Files that could not be read or parsed, with the reason.
    pub skipped: Vec<(String, String)>,
}

/// Case-insensitive search of every link's contribution text, description,
/// confidence label and confidence value in `dir/*.goal`.
pub fn search(dir: &Path, term: &str) -> std::io::Result<LibrarySearch> {
    let mut files: Vec<_> = fs::read_dir(dir)?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "goal"))
        .collect();
    files.sort();
    let needle = term.to_lowercase();
    let mut out = LibrarySearch { term: term.to_string(), ..Default::default() };
    for path in files {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let parsed = match fs::read(&path).map_err(|e| e.to_string()).and_then(|b| {
            dsl::parse_bytes(&b).map_err(|errs| errs.first().map(ToString::to_string).unwrap_or_default())
        }) {
            Ok(p) => p,
            Err(reason) => {
                out.skipped.push((name, reason));
                continue;
            }
        };
        let mut links: Vec<_> = parsed.model.contributions.values().collect();
        links.sort_by(|a, b| natural_cmp(a.id.as_str(), b.id.as_str()));
        for l in links {
            let contribution = contribution_text(&parsed.model, l);
            let label = l.confidence.label.map(|p| p.as_str().to_string());
            let value = l.confidence.value.normalize().to_string();
            let haystack =
                [contribution.as_str(), l.description.as_str(), label.as_deref().unwrap_or(""), value.as_str()];
            if haystack.iter().any(|h| h.to_lowercase().contains(&needle)) {
                out.hits.push(LibraryHit {
                    file: name.clone(),
                    link: l.id.clone(),
                    contribution,
                    description: l.description.clone(),
                    confidence: l.confidence.as_f64(),
                    confidence_label: label,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ENTRY: &str = r#"
requirement R {
  kind: F
  headline: "Template library"
  fit: "in use"
}

objective T {
  activity: Reduced
  focus: "Blade Setup Time"
  direction: reduction
  target: 50
  threshold: 30
  as_is: 100
  unit: "%"
}

link T1 {
  from: R
  to: T
  effect: reduction
  unit: "%"
  amount: 55
  confidence: great
  description: "Measured after six months"
}
"#;

    #[test]
    fn matches_are_case_insensitive_across_fields() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.goal"), ENTRY).unwrap();
        std::fs::write(dir.path().join("notes.txt"), "blade").unwrap();
        for term in ["BLADE", "six months", "great", "0.75"] {
            let found = search(dir.path(), term).unwrap();
            assert_eq!(found.hits.len(), 1, "{term}");
            assert_eq!(found.hits[0].confidence_label.as_deref(), Some("great"));
        }
        assert!(search(dir.path(), "turbine").unwrap().hits.is_empty());
    }

    #[test]
    fn unreadable_entries_are_skipped_with_a_reason() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.goal"), ENTRY).unwrap();
        std::fs::write(dir.path().join("b.goal"), "link {").unwrap();
        let found = search(dir.path(), "blade").unwrap();
        assert_eq!(found.hits.len(), 1);
        assert_eq!(found.skipped.len(), 1);
        assert_eq!(found.skipped[0].0, "b.goal");
        assert!(found.skipped[0].1.contains("PARSE_"), "{}", found.skipped[0].1);
    }

    #[test]
    fn missing_directory_is_an_error() {
        assert!(search(Path::new("/definitely/not/here"), "x").is_err());
    }
}
