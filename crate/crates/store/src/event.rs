use serde::{Deserialize, Serialize};
use sitcalc::{ActionInstance, Term, Timestamp};

/// One line of a project log. Field order is the serialized order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEvent {
    pub seq: u64,
    pub project: String,
    pub actor: String,
    pub at: Timestamp,
    pub kind: String,
    pub args: Vec<Term>,
}

impl ActionEvent {
    pub fn new(seq: u64, project: impl Into<String>, a: &ActionInstance) -> Self {
        Self {
            seq,
            project: project.into(),
            actor: a.actor.clone(),
            at: a.at,
            kind: a.kind.clone(),
            args: a.args.clone(),
        }
    }

    pub fn action(&self) -> ActionInstance {
        ActionInstance::new(self.kind.clone(), self.args.clone()).by(self.actor.clone()).at(self.at)
    }

    /// Canonical single-line JSON, without the trailing newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("events always serialize")
    }

    pub fn from_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_line() {
        let a = ActionInstance::new("add_data", vec![Term::sym("h1"), Term::sym("type"), Term::Str("a b".into())])
            .at("2024-01-01T00:00:00.000Z".parse().unwrap());
        let e = ActionEvent::new(1, "p1", &a);
        let line = e.to_line();
        assert_eq!(
            line,
            r#"{"seq":1,"project":"p1","actor":"anon","at":"2024-01-01T00:00:00.000Z","kind":"add_data","args":["h1","type",{"str":"a b"}]}"#
        );
        assert_eq!(ActionEvent::from_line(&line).unwrap(), e);
        assert_eq!(e.action(), a);
    }

    #[test]
    fn rejects_extra_fields() {
        let line = r#"{"seq":1,"project":"p1","actor":"anon","at":"2024-01-01T00:00:00.000Z","kind":"k","args":[],"x":1}"#;
        assert!(ActionEvent::from_line(line).is_err());
    }
}
