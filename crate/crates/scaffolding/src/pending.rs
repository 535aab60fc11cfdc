use serde::{Deserialize, Serialize};
use sitcalc::{ActionInstance, Reasoner, Situation, Term};

use crate::kinds::{bank_entries, INTERVENE};

/// An intervention that could be shown now, with the hint for its level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pending {
    pub intervention: String,
    pub query: String,
    pub level: i64,
    pub payload: String,
}

impl Pending {
    pub fn action(&self) -> ActionInstance {
        ActionInstance::new(
            INTERVENE,
            vec![Term::Sym(self.intervention.clone()), Term::Str(self.query.clone()), Term::Int(self.level)],
        )
    }
}

/// Every `(I, Q, L)` with `intervene(I, Q, L)` possible in `s`, ordered by
/// intervention id and then level.
pub fn pending_interventions(r: &Reasoner, s: &Situation) -> sitcalc::Result<Vec<Pending>> {
    let mut out = Vec::new();
    for entry in bank_entries(r.registry()) {
        for level in 1..=entry.max_level() {
            let p = Pending {
                intervention: entry.id.clone(),
                query: entry.query_key(),
                level,
                payload: entry.payload(level).unwrap_or_default().to_string(),
            };
            if r.poss(&p.action(), s)? {
                out.push(p);
            }
        }
    }
    Ok(out)
}
